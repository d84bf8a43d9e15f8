//! Numerical checks of the propagator and the bound-state solver.

use crate::trap::eigen::eigenstates;
use crate::trap::grid::{norm_sqr, SimGrid};
use crate::trap::potential::GaussianTrap;
use crate::trap::propagate::SplitStep;
use crate::walk::scaling_exponent;
use crate::{Error, Result, C64};

/// Time-step refinement of a packet oscillating in one Gaussian trap.
#[derive(Clone, Debug, PartialEq)]
pub struct Refinement {
    /// (dt, ‖ψ_dt − ψ_ref‖) at the final time.
    pub errors: Vec<(f64, f64)>,
    /// Slope of log error against log dt.
    pub order: f64,
}

fn gaussian_packet(g: &SimGrid, x0: f64, sigma: f64) -> Vec<C64> {
    let mut p: Vec<C64> = g
        .xs()
        .iter()
        .map(|&x| C64::new((-(x - x0).powi(2) / (4.0 * sigma * sigma)).exp(), 0.0))
        .collect();
    let n = norm_sqr(&p, g.dx()).sqrt();
    p.iter_mut().for_each(|z| *z /= n);
    p
}

fn evolve_in_trap(v0: f64, dt: f64, t_end: f64) -> Result<(SimGrid, Vec<C64>)> {
    let g = SimGrid::new(-25.6, 25.6, 256, dt)?;
    let trap = GaussianTrap::new(0.0, v0)?;
    let v: Vec<f64> = g.xs().iter().map(|&x| trap.value(x)).collect();
    let mut psi = gaussian_packet(&g, 2.0, 0.8);
    let steps = (t_end / dt).round() as usize;
    SplitStep::new(&g).evolve(&mut psi, 0.0, steps, |_, w| w.copy_from_slice(&v));
    Ok((g, psi))
}

/// Evolves a displaced packet in a trap of depth `v0` to `t_end` with every
/// step size in `dts` and compares with a run at the smallest step over 8.
/// Every dt must divide `t_end`.
pub fn dt_refinement(v0: f64, dts: &[f64], t_end: f64) -> Result<Refinement> {
    if dts.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: dts.len(),
        });
    }
    for &dt in dts {
        let n = t_end / dt;
        if !(dt > 0.0) || (n - n.round()).abs() > 1e-9 {
            return Err(Error::Invalid(format!("dt {dt} does not divide t_end {t_end}")));
        }
    }
    let finest = dts.iter().copied().fold(f64::INFINITY, f64::min);
    let (g, reference) = evolve_in_trap(v0, finest / 8.0, t_end)?;
    let mut errors = Vec::with_capacity(dts.len());
    for &dt in dts {
        let (_, psi) = evolve_in_trap(v0, dt, t_end)?;
        let diff: Vec<C64> = psi.iter().zip(&reference).map(|(a, b)| a - b).collect();
        errors.push((dt, norm_sqr(&diff, g.dx()).sqrt()));
    }
    let order = scaling_exponent(&errors)?;
    Ok(Refinement { errors, order })
}

/// Width of a free Gaussian packet after time `t`: (measured, analytic),
/// with σ(t) = σ₀ √(1 + (t / 2σ₀²)²).
pub fn free_spreading(sigma0: f64, t: f64, dt: f64) -> Result<(f64, f64)> {
    if !(sigma0 > 0.0) {
        return Err(Error::OutOfRange {
            name: "sigma0",
            value: sigma0,
            constraint: "sigma0 > 0",
        });
    }
    let analytic = sigma0 * (1.0 + (t / (2.0 * sigma0 * sigma0)).powi(2)).sqrt();
    let half = (12.0 * analytic).max(12.8);
    let n = ((2.0 * half / 0.1).ceil() as usize).next_power_of_two();
    let g = SimGrid::new(-half, half, n, dt)?;
    let mut psi = gaussian_packet(&g, 0.0, sigma0);
    let steps = (t / dt).round() as usize;
    SplitStep::new(&g).evolve(&mut psi, 0.0, steps, |_, w| w.fill(0.0));
    let dx = g.dx();
    let xs = g.xs();
    let mean: f64 = xs.iter().zip(&psi).map(|(x, z)| x * z.norm_sqr()).sum::<f64>() * dx;
    let second: f64 = xs
        .iter()
        .zip(&psi)
        .map(|(x, z)| (x - mean).powi(2) * z.norm_sqr())
        .sum::<f64>()
        * dx;
    Ok((second.sqrt(), analytic))
}

/// E₁ − E₀ of a single Gaussian trap of depth `v0`.
pub fn level_spacing(v0: f64, dx: f64) -> Result<f64> {
    let half = 20.0;
    let n = ((2.0 * half / dx).ceil() as usize).next_power_of_two();
    let g = SimGrid::new(-half, half, n, 0.01)?;
    let b = eigenstates(&GaussianTrap::new(0.0, v0)?, 2, &g)?;
    Ok(b.energies[1] - b.energies[0])
}
