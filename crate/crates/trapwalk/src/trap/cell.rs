use nalgebra::{DMatrix, SymmetricEigen};

use crate::trap::eigen::{trap_eigenstates, DEFAULT_WINDOW};
use crate::trap::grid::{overlap_real, SimGrid};
use crate::trap::potential::{GaussianTrap, PotentialForm, DEFAULT_V0};
use crate::trap::pulse::{
    PulseRunner, PulseSchedule, Shake, TrapLayout, DEFAULT_DT, DEFAULT_DX, DEFAULT_MARGIN,
};
use crate::walk::PulseKind;
use crate::{Error, Result, C64};

/// Numerical and physical settings shared by every trap simulation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellSpec {
    pub v0: f64,
    pub form: PotentialForm,
    pub dx: f64,
    pub dt: f64,
    /// Free space kept beyond the outermost trap positions.
    pub margin: f64,
}

impl Default for CellSpec {
    fn default() -> Self {
        Self {
            v0: DEFAULT_V0,
            form: PotentialForm::SumGaussian,
            dx: DEFAULT_DX,
            dt: DEFAULT_DT,
            margin: DEFAULT_MARGIN,
        }
    }
}

impl CellSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.v0 > 0.0) {
            return Err(Error::OutOfRange {
                name: "v0",
                value: self.v0,
                constraint: "v0 > 0",
            });
        }
        if !(self.dx > 0.0 && self.dx <= crate::trap::grid::MAX_DX) {
            return Err(Error::OutOfRange {
                name: "dx",
                value: self.dx,
                constraint: "0 < dx <= 0.25",
            });
        }
        if !(self.dt > 0.0) {
            return Err(Error::OutOfRange {
                name: "dt",
                value: self.dt,
                constraint: "dt > 0",
            });
        }
        if !(self.margin >= 0.0) {
            return Err(Error::OutOfRange {
                name: "margin",
                value: self.margin,
                constraint: "margin >= 0",
            });
        }
        Ok(())
    }

    /// Grid covering `[lo, hi]` plus the margin on both sides.
    pub fn grid_for(&self, lo: f64, hi: f64) -> Result<SimGrid> {
        SimGrid::covering(lo - self.margin, hi + self.margin, self.dx, self.dt)
    }
}

/// Single-trap eigenstates for traps at `centers`, `levels` each, made
/// mutually orthonormal by symmetric (Löwdin) orthogonalization.
///
/// State index is `trap · levels + level`.
#[derive(Clone, Debug)]
pub struct LocalizedBasis {
    pub levels: usize,
    pub centers: Vec<f64>,
    pub energies: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// Index range of grid points where each trap's states are nonzero.
    pub support: Vec<(usize, usize)>,
}

impl LocalizedBasis {
    pub fn new(grid: &SimGrid, centers: &[f64], v0: f64, levels: usize) -> Result<Self> {
        if levels == 0 {
            return Err(Error::Invalid("need at least one level".into()));
        }
        let mut raw = Vec::with_capacity(centers.len() * levels);
        let mut energies = Vec::new();
        let mut support = Vec::with_capacity(centers.len());
        for (i, &c) in centers.iter().enumerate() {
            let b = trap_eigenstates(&GaussianTrap::new(c, v0)?, levels, grid, DEFAULT_WINDOW)?;
            if i == 0 {
                energies = b.energies.clone();
            }
            support.push((
                grid.nearest(c - DEFAULT_WINDOW),
                grid.nearest(c + DEFAULT_WINDOW) + 1,
            ));
            raw.extend(b.states);
        }
        let states = lowdin(&raw, grid.dx())?;
        let support = expand_support(&states, &support, centers.len(), levels);
        Ok(Self {
            levels,
            centers: centers.to_vec(),
            energies,
            states,
            support,
        })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, trap: usize, level: usize) -> &[f64] {
        &self.states[trap * self.levels + level]
    }

    /// ⟨φ(trap, level)|ψ⟩.
    pub fn project(&self, trap: usize, level: usize, psi: &[C64], dx: f64) -> C64 {
        let (lo, hi) = self.support[trap];
        overlap_real(&self.state(trap, level)[lo..hi], &psi[lo..hi], dx)
    }
}

fn expand_support(
    states: &[Vec<f64>],
    guess: &[(usize, usize)],
    n: usize,
    levels: usize,
) -> Vec<(usize, usize)> {
    (0..n)
        .map(|t| {
            let mut lo = guess[t].0;
            let mut hi = guess[t].1;
            for l in 0..levels {
                let s = &states[t * levels + l];
                if let Some(i) = s.iter().position(|&x| x != 0.0) {
                    lo = lo.min(i);
                }
                if let Some(i) = s.iter().rposition(|&x| x != 0.0) {
                    hi = hi.max(i + 1);
                }
            }
            (lo, hi)
        })
        .collect()
}

/// Symmetric orthonormalization S^{-1/2} of real states.
pub fn lowdin(raw: &[Vec<f64>], dx: f64) -> Result<Vec<Vec<f64>>> {
    let m = raw.len();
    let s = DMatrix::from_fn(m, m, |i, j| {
        raw[i].iter().zip(&raw[j]).map(|(a, b)| a * b).sum::<f64>() * dx
    });
    let eig = SymmetricEigen::try_new(s, 1e-15, 10_000).ok_or(Error::NoConvergence)?;
    if eig.eigenvalues.iter().any(|&l| l < 1e-8) {
        return Err(Error::Invalid(
            "localized states are nearly linearly dependent".into(),
        ));
    }
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
    let w = &eig.eigenvectors * d * eig.eigenvectors.transpose();
    let n = raw[0].len();
    let mut out = vec![vec![0.0; n]; m];
    for (i, o) in out.iter_mut().enumerate() {
        for (j, r) in raw.iter().enumerate() {
            let c = w[(j, i)];
            if c.abs() < 1e-300 {
                continue;
            }
            for (x, y) in o.iter_mut().zip(r) {
                *x += c * y;
            }
        }
    }
    Ok(out)
}

/// Projection of a pulse propagator onto retained vibrational levels.
#[derive(Clone, Debug, PartialEq)]
pub struct EffectiveUnitary {
    /// Pair blocks use index `2·level + side` (side 0 right, 1 left); lone
    /// traps use the level index.
    pub matrix: DMatrix<C64>,
    pub levels: usize,
    /// Largest column-norm deficit, 1 − Σ_out |U_out,in|².
    pub leakage: f64,
}

impl EffectiveUnitary {
    pub fn from_matrix(matrix: DMatrix<C64>, levels: usize) -> Self {
        let leakage = (0..matrix.ncols())
            .map(|j| 1.0 - matrix.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>())
            .fold(0.0, f64::max)
            .max(0.0);
        Self {
            matrix,
            levels,
            leakage,
        }
    }

    /// 2×2 block of one level in (+, −) = (right, left) order.
    pub fn level_block(&self, level: usize) -> DMatrix<C64> {
        self.matrix
            .view((2 * level, 2 * level), (2, 2))
            .into_owned()
    }
}

/// Band-truncation bound above which extraction is rejected.
pub const MAX_LEAKAGE: f64 = 0.2;

/// Traps taking part in one extraction: a layout, which of its traps carry
/// the basis (one lone trap or a left/right pair), and the grid.
#[derive(Clone, Debug)]
pub struct Window {
    pub layout: TrapLayout,
    pub active: Vec<usize>,
    pub grid: SimGrid,
}

impl Window {
    /// Isolated two-trap cell.
    pub fn pair(spec: &CellSpec, schedule: &PulseSchedule) -> Result<Self> {
        let layout = TrapLayout::pair(schedule.a_max, spec.v0, spec.form);
        Self::new(spec, schedule, layout, vec![0, 1], 0.0)
    }

    /// Slot of a row with neighbors: traps `first..first+n` of a `kind`
    /// pulse, with `active` indices into that range.
    pub fn in_row(
        spec: &CellSpec,
        schedule: &PulseSchedule,
        kind: PulseKind,
        first: i64,
        n: usize,
        active: Vec<usize>,
        shake_amplitude: f64,
    ) -> Result<Self> {
        let layout = TrapLayout::row(first, n, schedule.a_max, kind, spec.v0, spec.form);
        Self::new(spec, schedule, layout, active, shake_amplitude)
    }

    fn new(
        spec: &CellSpec,
        schedule: &PulseSchedule,
        layout: TrapLayout,
        active: Vec<usize>,
        shake_amplitude: f64,
    ) -> Result<Self> {
        spec.validate()?;
        if active.is_empty() || active.len() > 2 || active.iter().any(|&a| a >= layout.rest.len()) {
            return Err(Error::Invalid(
                "window needs one or two active traps".into(),
            ));
        }
        let (lo, hi) = active
            .iter()
            .map(|&a| layout.reach(a, schedule, shake_amplitude))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), (a, b)| {
                (l.min(a), h.max(b))
            });
        let grid = spec.grid_for(lo, hi)?;
        Ok(Self {
            layout,
            active,
            grid,
        })
    }

    pub fn basis(&self, levels: usize) -> Result<LocalizedBasis> {
        let centers: Vec<f64> = self.active.iter().map(|&a| self.layout.rest[a]).collect();
        LocalizedBasis::new(&self.grid, &centers, self.layout.v0, levels)
    }

    /// Maps a matrix index to (active slot, level).
    pub fn slot_of(&self, index: usize) -> (usize, usize) {
        if self.active.len() == 1 {
            (0, index)
        } else {
            let (level, side) = (index / 2, index % 2);
            (1 - side, level)
        }
    }

    pub fn dim(&self, levels: usize) -> usize {
        self.active.len() * levels
    }

    /// Basis wavefunctions in matrix order, stacked into a batch buffer.
    pub fn basis_batch(&self, basis: &LocalizedBasis) -> Vec<C64> {
        let dim = self.dim(basis.levels);
        let n = self.grid.len();
        let mut buf = vec![C64::new(0.0, 0.0); dim * n];
        for i in 0..dim {
            let (slot, level) = self.slot_of(i);
            for (z, &x) in buf[i * n..(i + 1) * n]
                .iter_mut()
                .zip(basis.state(slot, level))
            {
                *z = C64::new(x, 0.0);
            }
        }
        buf
    }

    /// Matrix of ⟨basis_out|ψ_in⟩ for a batch of propagated columns.
    pub fn project_batch(&self, basis: &LocalizedBasis, buf: &[C64]) -> DMatrix<C64> {
        let dim = self.dim(basis.levels);
        let n = self.grid.len();
        let cols = buf.len() / n;
        let dx = self.grid.dx();
        DMatrix::from_fn(dim, cols, |r, c| {
            let (slot, level) = self.slot_of(r);
            basis.project(slot, level, &buf[c * n..(c + 1) * n], dx)
        })
    }
}

/// Runs the pulse on every retained basis state of the window and projects
/// back onto the band, whatever the leakage.
pub fn propagate_window(
    window: &Window,
    schedule: &PulseSchedule,
    levels: usize,
    shake: Option<&Shake>,
) -> Result<EffectiveUnitary> {
    let basis = window.basis(levels)?;
    let mut buf = window.basis_batch(&basis);
    let mut runner = PulseRunner::new(&window.grid);
    runner.run_pulse(&mut buf, &window.layout, schedule, shake);
    Ok(EffectiveUnitary::from_matrix(
        window.project_batch(&basis, &buf),
        levels,
    ))
}

/// [`propagate_window`], rejecting leakage above [`MAX_LEAKAGE`].
pub fn extract_window(
    window: &Window,
    schedule: &PulseSchedule,
    levels: usize,
    shake: Option<&Shake>,
) -> Result<EffectiveUnitary> {
    let u = propagate_window(window, schedule, levels, shake)?;
    if u.leakage > MAX_LEAKAGE {
        return Err(Error::Leakage {
            leakage: u.leakage,
            bound: MAX_LEAKAGE,
        });
    }
    Ok(u)
}

/// Effective unitary of the isolated two-trap cell.
pub fn extract_effective_unitary(
    spec: &CellSpec,
    schedule: &PulseSchedule,
    levels: usize,
    shake: Option<&Shake>,
) -> Result<EffectiveUnitary> {
    let w = Window::pair(spec, schedule)?;
    extract_window(&w, schedule, levels, shake)
}
