use crate::{Error, Result};

/// Duration of one walk step (coin and shift pulse) in units of 1/ωₓ.
pub const DEFAULT_STEP_TIME_FACTOR: f64 = 500.0;

/// Per-step decoherence probability from a background event rate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Budget {
    /// Step duration in seconds.
    pub step_duration: f64,
    /// Probability of an event within one step.
    pub p: f64,
    /// Expected number of events over the walk.
    pub tp: f64,
}

/// p = rate · step duration with step duration = `step_time_factor`/ωₓ, and
/// tp = steps · p.
pub fn decoherence_budget(
    omega_x: f64,
    step_time_factor: f64,
    scattering_rate: f64,
    steps: usize,
) -> Result<Budget> {
    if !(omega_x > 0.0) {
        return Err(Error::OutOfRange {
            name: "omega_x",
            value: omega_x,
            constraint: "omega_x > 0",
        });
    }
    if !(step_time_factor >= 0.0) {
        return Err(Error::OutOfRange {
            name: "step_time_factor",
            value: step_time_factor,
            constraint: "step_time_factor >= 0",
        });
    }
    if !(scattering_rate >= 0.0) {
        return Err(Error::OutOfRange {
            name: "scattering_rate",
            value: scattering_rate,
            constraint: "scattering_rate >= 0",
        });
    }
    let step_duration = step_time_factor / omega_x;
    let p = scattering_rate * step_duration;
    Ok(Budget {
        step_duration,
        p,
        tp: steps as f64 * p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_rate() {
        let b = decoherence_budget(1e5, 500.0, 0.0, 17).unwrap();
        assert_eq!(b.p, 0.0);
        assert_eq!(b.tp, 0.0);
        assert!(decoherence_budget(0.0, 500.0, 1.0, 17).is_err());
    }
}
