use crate::walk::line::WalkState1D;
use crate::{Error, Result};

/// Probability per integer site, stored from `offset` upward.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    pub offset: i64,
    pub probs: Vec<f64>,
}

impl Distribution {
    pub fn new(offset: i64, probs: Vec<f64>) -> Self {
        Self { offset, probs }
    }

    pub fn point(site: i64) -> Self {
        Self::new(site, vec![1.0])
    }

    pub fn prob(&self, site: i64) -> f64 {
        let i = site - self.offset;
        if i < 0 || i as usize >= self.probs.len() {
            0.0
        } else {
            self.probs[i as usize]
        }
    }

    pub fn sites(&self) -> std::ops::Range<i64> {
        self.offset..self.offset + self.probs.len() as i64
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(move |(i, &p)| (self.offset + i as i64, p))
    }

    /// Copy rescaled to unit total; unchanged if the total is zero.
    pub fn normalized(&self) -> Self {
        let t = self.total();
        if t == 0.0 {
            return self.clone();
        }
        Self::new(self.offset, self.probs.iter().map(|p| p / t).collect())
    }

    /// Mirror image k → −k.
    pub fn mirrored(&self) -> Self {
        let mut p = self.probs.clone();
        p.reverse();
        Self::new(-(self.offset + self.probs.len() as i64 - 1), p)
    }

    /// Pointwise weighted sum over a common support.
    pub fn weighted_sum(parts: &[(f64, &Distribution)]) -> Self {
        let lo = parts.iter().map(|(_, d)| d.offset).min().unwrap_or(0);
        let hi = parts
            .iter()
            .map(|(_, d)| d.offset + d.probs.len() as i64)
            .max()
            .unwrap_or(0);
        let mut probs = vec![0.0; (hi - lo).max(0) as usize];
        for (w, d) in parts {
            for (k, p) in d.iter() {
                probs[(k - lo) as usize] += w * p;
            }
        }
        Self::new(lo, probs)
    }
}

/// Traces out the coin.
pub fn position_distribution(state: &WalkState1D) -> Distribution {
    Distribution::new(
        state.offset(),
        state
            .amplitudes()
            .iter()
            .map(|a| a[0].norm_sqr() + a[1].norm_sqr())
            .collect(),
    )
}

/// Sums trap pairs (2k, 2k+1) into qubit k.
pub fn qubit_distribution(traps: &Distribution) -> Distribution {
    if traps.probs.is_empty() {
        return Distribution::new(0, Vec::new());
    }
    let lo = traps.offset.div_euclid(2);
    let hi = (traps.offset + traps.probs.len() as i64 - 1).div_euclid(2);
    let mut probs = vec![0.0; (hi - lo + 1) as usize];
    for (j, p) in traps.iter() {
        probs[(j.div_euclid(2) - lo) as usize] += p;
    }
    Distribution::new(lo, probs)
}

pub fn mean(dist: &Distribution) -> f64 {
    dist.iter().map(|(k, p)| k as f64 * p).sum()
}

/// Σ P(x)(x − x₀)².
pub fn variance(dist: &Distribution, origin: f64) -> f64 {
    dist.iter()
        .map(|(k, p)| p * (k as f64 - origin).powi(2))
        .sum()
}

/// Least-squares slope of log σ² against log t.
pub fn scaling_exponent(series: &[(f64, f64)]) -> Result<f64> {
    if series.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: series.len(),
        });
    }
    if series.iter().any(|&(t, v)| t <= 0.0 || v <= 0.0) {
        return Err(Error::Invalid(
            "scaling fit needs positive t and variance".into(),
        ));
    }
    let pts: Vec<(f64, f64)> = series.iter().map(|&(t, v)| (t.ln(), v.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Invalid("scaling fit needs distinct t values".into()));
    }
    Ok(sxy / sxx)
}

/// Uniform reference of half width t/√2 over integer qubit indices.
pub fn uniform_reference(t: f64) -> Result<Distribution> {
    if !(t > 0.0) {
        return Err(Error::OutOfRange {
            name: "t",
            value: t,
            constraint: "t > 0",
        });
    }
    let h = (t / std::f64::consts::SQRT_2).floor() as i64;
    let n = (2 * h + 1) as usize;
    Ok(Distribution::new(-h, vec![1.0 / n as f64; n]))
}

/// Σ |p − q| over the union of both supports.
pub fn l1_distance(a: &Distribution, b: &Distribution) -> f64 {
    let lo = a.offset.min(b.offset);
    let hi = (a.offset + a.probs.len() as i64).max(b.offset + b.probs.len() as i64);
    (lo..hi).map(|k| (a.prob(k) - b.prob(k)).abs()).sum()
}

/// ν(t) = Σₙ |P(n,t) − P_u(t)| against the uniform reference.
pub fn total_variational_distance(qubits: &Distribution, t: f64) -> Result<f64> {
    Ok(l1_distance(qubits, &uniform_reference(t)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nu_of_uniform_is_zero() {
        let u = uniform_reference(17.0).unwrap();
        assert_eq!(u.offset, -12);
        assert!(total_variational_distance(&u, 17.0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn nu_of_point_mass() {
        let d = Distribution::point(0);
        let nu = total_variational_distance(&d, 2.0).unwrap();
        assert!((nu - 4.0 / 3.0).abs() < 1e-15);
        assert!(total_variational_distance(&d, 0.0).is_err());
    }

    #[test]
    fn qubit_pairs() {
        let d = Distribution::new(-1, vec![0.1, 0.2, 0.3, 0.4]);
        let q = qubit_distribution(&d);
        assert_eq!(q.offset, -1);
        assert_eq!(q.probs.len(), 3);
        assert!((q.prob(-1) - 0.1).abs() < 1e-15 && (q.prob(0) - 0.5).abs() < 1e-15);
        assert!((q.prob(1) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn exponent_of_power_law() {
        let s: Vec<(f64, f64)> = (1..6)
            .map(|t| (t as f64, 3.0 * (t as f64).powf(1.5)))
            .collect();
        assert!((scaling_exponent(&s).unwrap() - 1.5).abs() < 1e-12);
        assert!(scaling_exponent(&s[..2]).is_err());
    }

    #[test]
    fn point_mass_variance() {
        assert_eq!(variance(&Distribution::point(4), 4.0), 0.0);
    }

    #[test]
    fn mirror() {
        let d = Distribution::new(-1, vec![0.5, 0.25, 0.25]);
        let m = d.mirrored();
        assert_eq!(m.prob(1), 0.5);
        assert_eq!(m.prob(-1), 0.25);
    }
}
