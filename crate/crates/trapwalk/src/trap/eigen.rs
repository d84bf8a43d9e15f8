use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::trap::grid::SimGrid;
use crate::trap::potential::GaussianTrap;
use crate::{Error, Result};

/// Half width of the window diagonalized around a single trap.
pub const DEFAULT_WINDOW: f64 = 40.0;

/// Orthonormal real eigenstates on a grid, lowest energy first.
#[derive(Clone, Debug, PartialEq)]
pub struct VibrationalBasis {
    pub energies: Vec<f64>,
    /// Each state sampled on the full grid with Σ φ² dx = 1.
    pub states: Vec<Vec<f64>>,
}

impl VibrationalBasis {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// Largest |⟨φᵢ|φⱼ⟩ − δᵢⱼ|.
    pub fn orthonormality_error(&self, dx: f64) -> f64 {
        let mut e: f64 = 0.0;
        for (i, a) in self.states.iter().enumerate() {
            for (j, b) in self.states.iter().enumerate() {
                let s: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() * dx;
                e = e.max((s - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
        e
    }
}

/// Sinc-DVR kinetic matrix element for points `i`, `j` of spacing `dx`.
fn kinetic(i: usize, j: usize, dx: f64) -> f64 {
    if i == j {
        PI * PI / (6.0 * dx * dx)
    } else {
        let d = i as f64 - j as f64;
        let s = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
        s / (dx * dx * d * d)
    }
}

/// Lowest `n` eigenpairs of −½∂ₓ² + V restricted to grid points `lo..hi`.
///
/// States count as available while their energy stays below the potential
/// at both window edges.
pub fn eigenstates_in_window(
    grid: &SimGrid,
    v: &[f64],
    lo: usize,
    hi: usize,
    n: usize,
) -> Result<VibrationalBasis> {
    if hi <= lo + 1 || hi > grid.len() {
        return Err(Error::Invalid("empty diagonalization window".into()));
    }
    let m = hi - lo;
    let dx = grid.dx();
    let h = DMatrix::from_fn(m, m, |i, j| {
        kinetic(i, j, dx) + if i == j { v[lo + i] } else { 0.0 }
    });
    let eig = SymmetricEigen::try_new(h, 1e-14, 10_000).ok_or(Error::NoConvergence)?;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let ceiling = v[lo].min(v[hi - 1]);
    let available = order
        .iter()
        .take_while(|&&i| eig.eigenvalues[i] < ceiling)
        .count();
    if n > available {
        return Err(Error::TooManyLevels {
            requested: n,
            available,
        });
    }
    let norm = 1.0 / dx.sqrt();
    let mut energies = Vec::with_capacity(n);
    let mut states = Vec::with_capacity(n);
    for &k in order.iter().take(n) {
        energies.push(eig.eigenvalues[k]);
        let col = eig.eigenvectors.column(k);
        let peak = col.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let first = col
            .iter()
            .find(|x| x.abs() > 1e-3 * peak)
            .copied()
            .unwrap_or(1.0);
        let sign = if first < 0.0 { -norm } else { norm };
        let mut s = vec![0.0; grid.len()];
        for (i, x) in col.iter().enumerate() {
            s[lo + i] = x * sign;
        }
        states.push(s);
    }
    Ok(VibrationalBasis { energies, states })
}

/// Lowest `n` eigenpairs of the whole-grid potential `v`.
pub fn eigenstates_of(grid: &SimGrid, v: &[f64], n: usize) -> Result<VibrationalBasis> {
    eigenstates_in_window(grid, v, 0, grid.len(), n)
}

/// Lowest `n` levels of a single trap, diagonalized on a window of half
/// width `half_width` around its center.
pub fn trap_eigenstates(
    trap: &GaussianTrap,
    n: usize,
    grid: &SimGrid,
    half_width: f64,
) -> Result<VibrationalBasis> {
    let lo = grid.nearest(trap.center() - half_width);
    let hi = grid.nearest(trap.center() + half_width) + 1;
    let v: Vec<f64> = (0..grid.len()).map(|i| trap.value(grid.x(i))).collect();
    eigenstates_in_window(grid, &v, lo, hi, n)
}

/// Lowest `n` levels of a single trap with the default window.
pub fn eigenstates(trap: &GaussianTrap, n: usize, grid: &SimGrid) -> Result<VibrationalBasis> {
    trap_eigenstates(trap, n, grid, DEFAULT_WINDOW)
}
