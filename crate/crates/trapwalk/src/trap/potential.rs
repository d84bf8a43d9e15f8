use crate::trap::grid::SimGrid;
use crate::{Error, Result};

/// Trap depth used throughout unless configured otherwise.
pub const DEFAULT_V0: f64 = 200.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianTrap {
    center: f64,
    depth: f64,
}

impl GaussianTrap {
    pub fn new(center: f64, depth: f64) -> Result<Self> {
        if !(depth > 0.0) {
            return Err(Error::OutOfRange {
                name: "V0",
                value: depth,
                constraint: "V0 > 0",
            });
        }
        Ok(Self { center, depth })
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn depth(&self) -> f64 {
        self.depth
    }

    /// −V0 exp(−(x−c)²/(2V0)); the harmonic frequency at the bottom is 1.
    pub fn value(&self, x: f64) -> f64 {
        let d = x - self.center;
        -self.depth * (-d * d / (2.0 * self.depth)).exp()
    }
}

/// How several traps combine into one potential.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PotentialForm {
    #[default]
    SumGaussian,
    /// min over traps of (x − xᵢ)²
    PiecewiseHarmonic,
}

pub fn potential(x: f64, traps: &[GaussianTrap], form: PotentialForm) -> f64 {
    match form {
        PotentialForm::SumGaussian => traps.iter().map(|t| t.value(x)).sum(),
        PotentialForm::PiecewiseHarmonic => traps
            .iter()
            .map(|t| (x - t.center).powi(2))
            .fold(f64::INFINITY, f64::min),
    }
}

/// Tail cutoff for the recurrence: contributions below V0·1e-18 are dropped.
const TAIL: f64 = 1e-18;

/// Writes Σᵢ −V0 exp(−(x−cᵢ)²/(2V0)) on every grid point into `out`.
///
/// Uses the exact multiplicative recurrence of a Gaussian on a uniform grid,
/// so each trap costs a few multiplications per point instead of an `exp`.
pub fn fill_gaussian_sum(grid: &SimGrid, centers: &[f64], v0: f64, out: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = 0.0);
    for &c in centers {
        add_gaussian(grid, c, v0, out);
    }
}

fn add_gaussian(grid: &SimGrid, c: f64, v0: f64, out: &mut [f64]) {
    let n = grid.len();
    let dx = grid.dx();
    let u = 1.0 / (2.0 * v0);
    let q = (-2.0 * u * dx * dx).exp();
    let j0 = grid.nearest(c);
    let d0 = grid.x(j0) - c;
    let g0 = (-u * d0 * d0).exp();
    out[j0] -= v0 * g0;

    let mut g = g0;
    let mut r = (-u * (2.0 * d0 * dx + dx * dx)).exp();
    for v in out.iter_mut().take(n).skip(j0 + 1) {
        g *= r;
        r *= q;
        if g < TAIL {
            break;
        }
        *v -= v0 * g;
    }
    let mut g = g0;
    let mut l = (-u * (-2.0 * d0 * dx + dx * dx)).exp();
    for v in out[..j0].iter_mut().rev() {
        g *= l;
        l *= q;
        if g < TAIL {
            break;
        }
        *v -= v0 * g;
    }
}

pub fn fill_piecewise_harmonic(grid: &SimGrid, centers: &[f64], out: &mut [f64]) {
    for (i, v) in out.iter_mut().enumerate() {
        let x = grid.x(i);
        *v = centers
            .iter()
            .map(|c| (x - c).powi(2))
            .fold(f64::INFINITY, f64::min);
    }
}

/// Fills the potential of traps at `centers` in the chosen form.
pub fn fill(grid: &SimGrid, centers: &[f64], v0: f64, form: PotentialForm, out: &mut [f64]) {
    match form {
        PotentialForm::SumGaussian => fill_gaussian_sum(grid, centers, v0, out),
        PotentialForm::PiecewiseHarmonic => fill_piecewise_harmonic(grid, centers, out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trap_bottom_and_piecewise_midpoint() {
        let t = GaussianTrap::new(3.0, 200.0).unwrap();
        assert_eq!(t.value(3.0), -200.0);
        let pair = [
            GaussianTrap::new(-5.0, 200.0).unwrap(),
            GaussianTrap::new(5.0, 200.0).unwrap(),
        ];
        assert_eq!(
            potential(0.0, &pair, PotentialForm::PiecewiseHarmonic),
            25.0
        );
        assert!(GaussianTrap::new(0.0, 0.0).is_err());
    }

    #[test]
    fn recurrence_matches_direct_evaluation() {
        let g = SimGrid::new(-400.0, 419.2, 4096, 0.005).unwrap();
        let centers = [-31.37, 0.0, 59.9, 301.05];
        let mut v = vec![0.0; g.len()];
        fill_gaussian_sum(&g, &centers, 200.0, &mut v);
        let traps: Vec<_> = centers
            .iter()
            .map(|&c| GaussianTrap::new(c, 200.0).unwrap())
            .collect();
        let err = (0..g.len())
            .map(|i| (v[i] - potential(g.x(i), &traps, PotentialForm::SumGaussian)).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "max error {err}");
    }
}
