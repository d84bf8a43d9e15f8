use crate::walk::Distribution;
use crate::{Error, Result};

/// Reduced Planck constant in J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant in J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Atomic mass unit in kg.
pub const AMU: f64 = 1.660_539_066_60e-27;

/// Default cumulative Boltzmann weight kept by the level truncation.
pub const DEFAULT_TRUNCATION: f64 = 0.999;

/// How the temperature is given.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Temperature {
    /// Inverse temperature in units of 1/ħωₓ.
    Beta(f64),
    /// Ground-state population P₀ of the harmonic ladder,
    /// e^{−βħω} = 1 − P₀.
    GroundPopulation(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThermalSpec {
    pub temperature: Temperature,
    pub truncation: f64,
}

impl ThermalSpec {
    pub fn new(temperature: Temperature, truncation: f64) -> Result<Self> {
        match temperature {
            Temperature::Beta(b) if !(b > 0.0) => {
                return Err(Error::OutOfRange {
                    name: "beta",
                    value: b,
                    constraint: "beta > 0",
                })
            }
            Temperature::GroundPopulation(p) if !(p > 0.0 && p <= 1.0) => {
                return Err(Error::OutOfRange {
                    name: "ground_population",
                    value: p,
                    constraint: "0 < P0 <= 1",
                })
            }
            _ => {}
        }
        if !(truncation > 0.0 && truncation <= 1.0) {
            return Err(Error::OutOfRange {
                name: "truncation",
                value: truncation,
                constraint: "0 < truncation <= 1",
            });
        }
        Ok(Self {
            temperature,
            truncation,
        })
    }

    pub fn from_ground_population(p0: f64) -> Result<Self> {
        Self::new(Temperature::GroundPopulation(p0), DEFAULT_TRUNCATION)
    }

    /// β in units of 1/ħωₓ; infinite at P₀ = 1.
    pub fn beta(&self) -> f64 {
        match self.temperature {
            Temperature::Beta(b) => b,
            Temperature::GroundPopulation(p) => -(1.0 - p).ln(),
        }
    }
}

/// Boltzmann weights e^{−β(E_j − E₀)}/z of the shortest prefix of `energies`
/// holding `spec.truncation` of the total weight, renormalized over that
/// prefix.
///
/// The weight beyond the last supplied level is estimated as a geometric
/// tail with the last level spacing. Fails if the supplied levels cannot
/// reach the truncation threshold.
pub fn boltzmann_weights(energies: &[f64], spec: &ThermalSpec) -> Result<Vec<f64>> {
    if energies.is_empty() {
        return Err(Error::Invalid("no levels supplied".into()));
    }
    let beta = spec.beta();
    if beta.is_infinite() {
        return Ok(vec![1.0]);
    }
    let e0 = energies[0];
    let w: Vec<f64> = energies.iter().map(|e| (-beta * (e - e0)).exp()).collect();
    let tail = match energies.len() {
        1 => 0.0,
        n => {
            let r = (-beta * (energies[n - 1] - energies[n - 2])).exp();
            if r >= 1.0 {
                f64::INFINITY
            } else {
                w[n - 1] * r / (1.0 - r)
            }
        }
    };
    let z = w.iter().sum::<f64>() + tail;
    let mut acc = 0.0;
    for (j, x) in w.iter().enumerate() {
        acc += x / z;
        if acc >= spec.truncation {
            let kept = &w[..=j];
            let s: f64 = kept.iter().sum();
            return Ok(kept.iter().map(|x| x / s).collect());
        }
    }
    Err(Error::Truncation {
        threshold: spec.truncation,
        reached: acc,
    })
}

/// Classical mixture Σ_j w_j P_j of per-level distributions.
pub fn thermal_average(per_level: &[Distribution], weights: &[f64]) -> Result<Distribution> {
    if weights.len() > per_level.len() {
        return Err(Error::Invalid(format!(
            "{} weights but only {} level distributions",
            weights.len(),
            per_level.len()
        )));
    }
    let parts: Vec<(f64, &Distribution)> = weights.iter().copied().zip(per_level).collect();
    Ok(Distribution::weighted_sum(&parts))
}

/// ⟨ν⟩ = (1 − P₀)/P₀ for a harmonic ladder.
pub fn mean_quanta(p0: f64) -> Result<f64> {
    check_p0(p0)?;
    Ok((1.0 - p0) / p0)
}

/// Σ j w_j.
pub fn mean_quanta_of(weights: &[f64]) -> f64 {
    weights.iter().enumerate().map(|(j, w)| j as f64 * w).sum()
}

fn check_p0(p0: f64) -> Result<()> {
    if !(p0 > 0.0 && p0 <= 1.0) {
        return Err(Error::OutOfRange {
            name: "ground_population",
            value: p0,
            constraint: "0 < P0 <= 1",
        });
    }
    Ok(())
}

/// Atomic species with its mass.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Species {
    Rb87,
    Rb85,
    Cs133,
    Na23,
    Li7,
}

impl Species {
    pub fn mass_kg(self) -> f64 {
        AMU * match self {
            Species::Rb87 => 86.909_180_53,
            Species::Rb85 => 84.911_789_74,
            Species::Cs133 => 132.905_451_96,
            Species::Na23 => 22.989_769_28,
            Species::Li7 => 7.016_003_44,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Species::Rb87 => "Rb87",
            Species::Rb85 => "Rb85",
            Species::Cs133 => "Cs133",
            Species::Na23 => "Na23",
            Species::Li7 => "Li7",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            Species::Rb87,
            Species::Rb85,
            Species::Cs133,
            Species::Na23,
            Species::Li7,
        ]
        .into_iter()
        .find(|sp| sp.name().eq_ignore_ascii_case(s))
    }

    /// Ground-state spread α⁻¹ = √(ħ/mω) in meters.
    pub fn oscillator_length(self, omega: f64) -> f64 {
        (HBAR / (self.mass_kg() * omega)).sqrt()
    }
}

/// Temperature in kelvin of a harmonic trap of angular frequency `omega`
/// (s⁻¹) whose ground state holds population `p0`. The mapping does not
/// depend on the mass.
pub fn temperature_mapping(p0: f64, omega: f64, _species: Species) -> Result<f64> {
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(Error::OutOfRange {
            name: "ground_population",
            value: p0,
            constraint: "0 < P0 < 1",
        });
    }
    if !(omega > 0.0) {
        return Err(Error::OutOfRange {
            name: "omega",
            value: omega,
            constraint: "omega > 0",
        });
    }
    Ok(HBAR * omega / (K_B * -(1.0 - p0).ln()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_weights_are_geometric() {
        let e: Vec<f64> = (0..40).map(|j| j as f64 + 0.5).collect();
        let spec = ThermalSpec::from_ground_population(0.5).unwrap();
        let w = boltzmann_weights(&e, &spec).unwrap();
        assert!((w[1] / w[0] - 0.5).abs() < 1e-12);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((mean_quanta_of(&w) - 1.0).abs() < 0.02);
    }

    #[test]
    fn truncation_unreachable() {
        let spec = ThermalSpec::from_ground_population(0.25).unwrap();
        assert!(matches!(
            boltzmann_weights(&[0.0, 1.0, 2.0], &spec),
            Err(Error::Truncation { .. })
        ));
    }

    #[test]
    fn zero_temperature_keeps_ground_level() {
        let spec = ThermalSpec::from_ground_population(1.0).unwrap();
        assert_eq!(boltzmann_weights(&[0.0, 1.0], &spec).unwrap(), vec![1.0]);
    }
}
