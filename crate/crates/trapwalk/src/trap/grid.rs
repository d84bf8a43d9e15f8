use std::f64::consts::PI;

use crate::{Error, Result, C64};

/// Largest spacing that still resolves the trap ground state.
pub const MAX_DX: f64 = 0.25;

/// Uniform periodic grid `x_i = x_min + i·dx`, `i < n_points`.
#[derive(Clone, Debug, PartialEq)]
pub struct SimGrid {
    x_min: f64,
    dx: f64,
    n: usize,
    dt: f64,
}

impl SimGrid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize, dt: f64) -> Result<Self> {
        if !n_points.is_power_of_two() || n_points < 4 {
            return Err(Error::Invalid(format!(
                "n_points {n_points} is not a power of two >= 4"
            )));
        }
        if !(x_max > x_min) {
            return Err(Error::Invalid("x_max must exceed x_min".into()));
        }
        if !(dt > 0.0) {
            return Err(Error::OutOfRange {
                name: "dt",
                value: dt,
                constraint: "dt > 0",
            });
        }
        let dx = (x_max - x_min) / n_points as f64;
        if dx > MAX_DX {
            return Err(Error::OutOfRange {
                name: "dx",
                value: dx,
                constraint: "dx <= 0.25",
            });
        }
        Ok(Self {
            x_min,
            dx,
            n: n_points,
            dt,
        })
    }

    /// Smallest power-of-two grid with spacing `dx` covering `[lo, hi]`,
    /// centered on the interval.
    pub fn covering(lo: f64, hi: f64, dx: f64, dt: f64) -> Result<Self> {
        if !(dx > 0.0) {
            return Err(Error::OutOfRange {
                name: "dx",
                value: dx,
                constraint: "dx > 0",
            });
        }
        let need = ((hi - lo) / dx).ceil().max(4.0) as usize;
        let n = need.next_power_of_two();
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * n as f64 * dx;
        Self::new(mid - half, mid + half, n, dt)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_min + self.n as f64 * self.dx
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Angular wavenumbers in FFT order.
    pub fn ks(&self) -> Vec<f64> {
        let n = self.n as i64;
        let dk = 2.0 * PI / (self.n as f64 * self.dx);
        (0..n)
            .map(|i| if i < n / 2 { i } else { i - n } as f64 * dk)
            .collect()
    }

    /// Index of the grid point nearest to `x`, clamped to the grid.
    pub fn nearest(&self, x: f64) -> usize {
        let i = ((x - self.x_min) / self.dx).round();
        i.clamp(0.0, (self.n - 1) as f64) as usize
    }

    pub fn with_dt(&self, dt: f64) -> Self {
        Self { dt, ..self.clone() }
    }
}

/// Complex field sampled on a [`SimGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct WaveFunction {
    pub values: Vec<C64>,
}

impl WaveFunction {
    pub fn new(values: Vec<C64>) -> Self {
        Self { values }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self::new(values.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    pub fn norm_sqr(&self, grid: &SimGrid) -> f64 {
        norm_sqr(&self.values, grid.dx())
    }

    pub fn normalize(&mut self, grid: &SimGrid) {
        let n = self.norm_sqr(grid).sqrt();
        if n > 0.0 {
            self.values.iter_mut().for_each(|z| *z /= n);
        }
    }

    /// Rows `x,re,im` with a header line.
    pub fn to_csv(&self, grid: &SimGrid) -> String {
        let mut s = String::from("x,re,im\n");
        for (i, z) in self.values.iter().enumerate() {
            s.push_str(&format!("{},{},{}\n", grid.x(i), z.re, z.im));
        }
        s
    }
}

pub fn norm_sqr(psi: &[C64], dx: f64) -> f64 {
    psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx
}

/// ⟨a|b⟩ = Σ conj(a)·b·dx for a real bra.
pub fn overlap_real(a: &[f64], b: &[C64], dx: f64) -> C64 {
    a.iter().zip(b).map(|(&x, z)| z * x).sum::<C64>() * dx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_power_of_two_and_coarse_grids() {
        assert!(SimGrid::new(-10.0, 10.0, 100, 0.01).is_err());
        assert!(SimGrid::new(-100.0, 100.0, 256, 0.01).is_err());
        assert!(SimGrid::new(-10.0, 10.0, 128, 0.01).is_ok());
    }

    #[test]
    fn covering_grid() {
        let g = SimGrid::covering(-45.6, 45.6, 0.2, 0.005).unwrap();
        assert_eq!(g.len(), 512);
        assert!((g.dx() - 0.2).abs() < 1e-15);
        assert!(g.x_min() <= -45.6 && g.x_max() >= 45.6);
    }

    #[test]
    fn wavenumbers_are_fft_ordered() {
        let g = SimGrid::new(0.0, 2.0, 8, 0.1).unwrap();
        let k = g.ks();
        let dk = 2.0 * PI / 2.0;
        assert!((k[1] - dk).abs() < 1e-15);
        assert!((k[4] + 4.0 * dk).abs() < 1e-15);
        assert!((k[7] + dk).abs() < 1e-15);
    }
}
