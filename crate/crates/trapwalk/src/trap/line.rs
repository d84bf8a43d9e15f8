//! Full-line integration: every pulse of the walk is integrated on one grid
//! holding the whole row of traps.

use crate::trap::cell::{CellSpec, LocalizedBasis};
use crate::trap::grid::SimGrid;
use crate::trap::pulse::{PulseRunner, PulseSchedule, Segment, ShakingSpec, TrapLayout};
use crate::walk::{Distribution, PulseKind};
use crate::{Error, Result, C64};

/// Width of the strip at each grid edge watched by the boundary guard.
pub const BOUNDARY_STRIP: f64 = 2.0;
/// Largest tolerated population inside the boundary strips.
pub const BOUNDARY_LIMIT: f64 = 1e-6;

/// Row of `n_traps` traps with alternating coin and shift pulses.
#[derive(Clone, Debug, PartialEq)]
pub struct LineSpec {
    pub cell: CellSpec,
    pub n_traps: usize,
    pub coin: PulseSchedule,
    pub shift: PulseSchedule,
    /// Vibrational levels per trap used for projected populations.
    pub levels: usize,
}

impl LineSpec {
    pub fn validate(&self) -> Result<()> {
        self.cell.validate()?;
        if self.n_traps < 2 || self.n_traps % 2 != 0 {
            return Err(Error::Invalid(format!(
                "n_traps must be even and >= 2 (got {})",
                self.n_traps
            )));
        }
        if self.levels == 0 {
            return Err(Error::Invalid("need at least one level".into()));
        }
        if self.coin.a_max != self.shift.a_max {
            return Err(Error::Invalid(
                "coin and shift pulses need the same a_max".into(),
            ));
        }
        Ok(())
    }

    /// Trap indices `lo..=hi`, with qubit 0 (traps 0 and 1) at the center.
    pub fn bounds(&self) -> (i64, i64) {
        row_bounds(self.n_traps)
    }
}

/// Trap index range of an even row of `n_traps`, qubit 0 central.
pub fn row_bounds(n_traps: usize) -> (i64, i64) {
    let q = (n_traps / 2) as i64;
    let lo = -2 * (q / 2);
    (lo, lo + n_traps as i64 - 1)
}

/// Trap populations after one walk step.
#[derive(Clone, Debug, PartialEq)]
pub struct LineRecord {
    pub step: usize,
    /// Probability inside each trap's cell, split at midpoints between rest
    /// positions; sums to one.
    pub spatial: Distribution,
    /// |⟨φ_j(trap)|ψ⟩|² per retained level j.
    pub projected: Vec<Distribution>,
    pub ground_population: f64,
}

/// Σ over traps of |⟨φ₀(trap)|ψ⟩|².
pub fn ground_state_population(psi: &[C64], basis: &LocalizedBasis, dx: f64) -> f64 {
    (0..basis.centers.len())
        .map(|t| basis.project(t, 0, psi, dx).norm_sqr())
        .sum()
}

/// Population within [`BOUNDARY_STRIP`] of either grid edge.
pub fn boundary_population(psi: &[C64], grid: &SimGrid) -> f64 {
    let w = ((BOUNDARY_STRIP / grid.dx()).ceil() as usize).min(psi.len() / 2);
    let n = psi.len();
    psi[..w]
        .iter()
        .chain(&psi[n - w..])
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        * grid.dx()
}

/// Integrates `steps` walk steps (coin pulse, then shift pulse) on the whole
/// row. `initial` lists (trap, level, amplitude) terms, normalized here.
/// Shaking phases are drawn one per pulse in order.
pub fn run_walk_line(
    spec: &LineSpec,
    initial: &[(i64, usize, C64)],
    steps: usize,
    shaking: Option<&ShakingSpec>,
) -> Result<Vec<LineRecord>> {
    spec.validate()?;
    let (lo, hi) = spec.bounds();
    if initial.is_empty() {
        return Err(Error::Invalid("empty initial state".into()));
    }
    for &(j, v, _) in initial {
        if j < lo || j > hi || v >= spec.levels {
            return Err(Error::Invalid(format!(
                "initial term (trap {j}, level {v}) outside the row"
            )));
        }
    }
    let a = spec.coin.a_max;
    let amp = shaking.map_or(0.0, |s| s.amplitude);
    let ex = spec
        .coin
        .max_excursion(amp)
        .max(spec.shift.max_excursion(amp));
    let grid = spec.cell.grid_for(lo as f64 * a - ex, hi as f64 * a + ex)?;
    let n = grid.len();
    let dx = grid.dx();

    let rest: Vec<f64> = (lo..=hi).map(|j| j as f64 * a).collect();
    let basis = LocalizedBasis::new(&grid, &rest, spec.cell.v0, spec.levels)?;
    let mut psi = vec![C64::new(0.0, 0.0); n];
    for &(j, v, c) in initial {
        for (z, &x) in psi.iter_mut().zip(basis.state((j - lo) as usize, v)) {
            *z += c * x;
        }
    }
    let norm = crate::trap::grid::norm_sqr(&psi, dx).sqrt();
    if norm == 0.0 {
        return Err(Error::Invalid("zero initial state".into()));
    }
    psi.iter_mut().for_each(|z| *z /= norm);

    let layouts = [PulseKind::Coin, PulseKind::Shift]
        .map(|k| TrapLayout::row(lo, spec.n_traps, a, k, spec.cell.v0, spec.cell.form));
    let mut phases = shaking.map(|s| s.phases());
    let mut runner = PulseRunner::new(&grid);
    let mut out = Vec::with_capacity(steps + 1);
    out.push(record(0, &psi, &grid, &basis, lo));
    for step in 1..=steps {
        for (layout, schedule) in layouts.iter().zip([&spec.coin, &spec.shift]) {
            let shake = match (shaking, phases.as_mut()) {
                (Some(s), Some(ph)) => Some(s.realize(ph.next().expect("endless stream"))),
                _ => None,
            };
            for seg in [Segment::RampIn, Segment::Hold, Segment::RampOut] {
                runner.run_segment(&mut psi, layout, schedule, shake.as_ref(), seg);
                guard(&psi, &grid)?;
            }
        }
        out.push(record(step, &psi, &grid, &basis, lo));
    }
    Ok(out)
}

fn guard(psi: &[C64], grid: &SimGrid) -> Result<()> {
    let p = boundary_population(psi, grid);
    if p > BOUNDARY_LIMIT {
        return Err(Error::Boundary {
            population: p,
            limit: BOUNDARY_LIMIT,
        });
    }
    Ok(())
}

fn record(step: usize, psi: &[C64], grid: &SimGrid, basis: &LocalizedBasis, lo: i64) -> LineRecord {
    let dx = grid.dx();
    let c = &basis.centers;
    let mut spatial = vec![0.0; c.len()];
    let mut t = 0;
    for (i, z) in psi.iter().enumerate() {
        let x = grid.x(i);
        while t + 1 < c.len() && x > 0.5 * (c[t] + c[t + 1]) {
            t += 1;
        }
        spatial[t] += z.norm_sqr() * dx;
    }
    let projected = (0..basis.levels)
        .map(|v| {
            Distribution::new(
                lo,
                (0..c.len())
                    .map(|t| basis.project(t, v, psi, dx).norm_sqr())
                    .collect(),
            )
        })
        .collect();
    LineRecord {
        step,
        spatial: Distribution::new(lo, spatial),
        projected,
        ground_population: ground_state_population(psi, basis, dx),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_center_qubit_zero() {
        assert_eq!(row_bounds(14), (-6, 7));
        assert_eq!(row_bounds(62), (-30, 31));
        assert_eq!(row_bounds(4), (-2, 1));
    }
}
