use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::walk::coin::CoinOp;
use crate::walk::line::{Shift1D, WalkState1D};
use crate::walk::metrics::Distribution;
use crate::{Error, Result, C64};

/// Which subsystem a decoherence event measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Coin,
    Position,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecoherenceModel {
    p: f64,
    target: Target,
    trajectories: usize,
    seed: u64,
}

impl DecoherenceModel {
    pub fn new(p: f64, target: Target, trajectories: usize, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::OutOfRange {
                name: "p",
                value: p,
                constraint: "0 <= p <= 1",
            });
        }
        if trajectories == 0 {
            return Err(Error::Invalid("need at least one trajectory".into()));
        }
        Ok(Self {
            p,
            target,
            trajectories,
            seed,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn target(&self) -> Target {
        self.target
    }

    pub fn trajectories(&self) -> usize {
        self.trajectories
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Trajectory-averaged distribution after one step count.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleSnapshot {
    pub step: usize,
    pub mean: Distribution,
    /// Standard error of the mean, per site.
    pub std_err: Distribution,
    /// Mean over trajectories of Σ P(x)(x − x₀)².
    pub variance: f64,
    pub variance_std_err: f64,
}

/// Random stream for one trajectory, derived from (seed, index).
pub fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

const CHUNK: usize = 64;

struct Acc {
    lo: i64,
    sum: Vec<Vec<f64>>,
    sum_sq: Vec<Vec<f64>>,
    var: Vec<f64>,
    var_sq: Vec<f64>,
}

impl Acc {
    fn new(lo: i64, width: usize, steps: usize) -> Self {
        Self {
            lo,
            sum: vec![vec![0.0; width]; steps],
            sum_sq: vec![vec![0.0; width]; steps],
            var: vec![0.0; steps],
            var_sq: vec![0.0; steps],
        }
    }

    fn add(&mut self, other: &Acc) {
        for s in 0..self.var.len() {
            for (a, b) in self.sum[s].iter_mut().zip(&other.sum[s]) {
                *a += b;
            }
            for (a, b) in self.sum_sq[s].iter_mut().zip(&other.sum_sq[s]) {
                *a += b;
            }
            self.var[s] += other.var[s];
            self.var_sq[s] += other.var_sq[s];
        }
    }
}

/// Runs independent pure-state trajectories with random projective
/// measurements and returns ensemble statistics after every step 1..=steps.
///
/// Each step applies the coin, the shift, then with probability `p`
/// measures the target subsystem. The result depends only on the inputs
/// and the seed, not on the thread count.
pub fn decohere_evolve(
    state: &WalkState1D,
    model: &DecoherenceModel,
    coin: &CoinOp,
    shift: Shift1D,
    steps: usize,
    origin: f64,
) -> Result<Vec<EnsembleSnapshot>> {
    if coin.dim() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            got: coin.dim(),
        });
    }
    let lo = state.offset() - steps as i64;
    let width = state.amplitudes().len() + 2 * steps;
    let m = model.trajectories;
    let n_chunks = m.div_ceil(CHUNK);
    let chunks: Vec<Acc> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = Acc::new(lo, width, steps);
            for j in c * CHUNK..((c + 1) * CHUNK).min(m) {
                run_trajectory(state, model, coin, shift, steps, origin, j as u64, &mut acc);
            }
            acc
        })
        .collect();
    let mut total = Acc::new(lo, width, steps);
    for c in &chunks {
        total.add(c);
    }
    let mf = m as f64;
    let se = |s: f64, s2: f64| -> f64 {
        if m < 2 {
            return 0.0;
        }
        let mean = s / mf;
        let var = ((s2 - mf * mean * mean) / (mf - 1.0)).max(0.0);
        (var / mf).sqrt()
    };
    let out = (0..steps)
        .map(|s| {
            let mean: Vec<f64> = total.sum[s].iter().map(|x| x / mf).collect();
            let err: Vec<f64> = total.sum[s]
                .iter()
                .zip(&total.sum_sq[s])
                .map(|(&a, &b)| se(a, b))
                .collect();
            EnsembleSnapshot {
                step: s + 1,
                mean: Distribution::new(total.lo, mean),
                std_err: Distribution::new(total.lo, err),
                variance: total.var[s] / mf,
                variance_std_err: se(total.var[s], total.var_sq[s]),
            }
        })
        .collect();
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn run_trajectory(
    init: &WalkState1D,
    model: &DecoherenceModel,
    coin: &CoinOp,
    shift: Shift1D,
    steps: usize,
    origin: f64,
    index: u64,
    acc: &mut Acc,
) {
    let mut rng = trajectory_rng(model.seed, index);
    let mut s = init.clone();
    for step in 0..steps {
        s.apply_coin(coin, None).expect("coin dimension checked");
        s.shift(shift);
        if model.p > 0.0 && rng.gen::<f64>() < model.p {
            measure(&mut s, model.target, &mut rng);
        }
        let mut var = 0.0;
        for (i, a) in s.amplitudes().iter().enumerate() {
            let k = s.offset() + i as i64;
            let p = a[0].norm_sqr() + a[1].norm_sqr();
            let idx = (k - acc.lo) as usize;
            acc.sum[step][idx] += p;
            acc.sum_sq[step][idx] += p * p;
            var += p * (k as f64 - origin).powi(2);
        }
        acc.var[step] += var;
        acc.var_sq[step] += var * var;
    }
}

fn sample(weights: impl Iterator<Item = f64>, total: f64, u: f64) -> usize {
    let mut acc = 0.0;
    let mut last = 0;
    for (i, w) in weights.enumerate() {
        if w > 0.0 {
            last = i;
            acc += w;
            if u * total < acc {
                return i;
            }
        }
    }
    last
}

fn measure(s: &mut WalkState1D, target: Target, rng: &mut ChaCha8Rng) {
    let zero = C64::new(0.0, 0.0);
    let norm = s.norm_sqr();
    let u: f64 = rng.gen();
    let amps = s.amps_mut();
    match target {
        Target::Position => {
            let k = sample(
                amps.iter().map(|a| a[0].norm_sqr() + a[1].norm_sqr()),
                norm,
                u,
            );
            let w = (amps[k][0].norm_sqr() + amps[k][1].norm_sqr()).sqrt();
            for (i, a) in amps.iter_mut().enumerate() {
                if i == k {
                    a[0] /= w;
                    a[1] /= w;
                } else {
                    *a = [zero; 2];
                }
            }
        }
        Target::Coin => {
            let p_plus: f64 = amps.iter().map(|a| a[0].norm_sqr()).sum();
            let c = if u * norm < p_plus { 0 } else { 1 };
            let w = if c == 0 { p_plus } else { norm - p_plus }.sqrt();
            for a in amps.iter_mut() {
                a[1 - c] = zero;
                a[c] /= w;
            }
        }
        Target::Both => {
            let flat = amps.iter().flat_map(|a| [a[0].norm_sqr(), a[1].norm_sqr()]);
            let j = sample(flat, norm, u);
            let (k, c) = (j / 2, j % 2);
            let phase = amps[k][c] / amps[k][c].norm();
            for a in amps.iter_mut() {
                *a = [zero; 2];
            }
            amps[k][c] = phase;
        }
    }
    s.trim();
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::coin::hadamard_coin;

    #[test]
    fn rejects_bad_probability() {
        assert!(DecoherenceModel::new(1.5, Target::Both, 10, 0).is_err());
        assert!(DecoherenceModel::new(0.5, Target::Both, 0, 0).is_err());
    }

    #[test]
    fn zero_rate_matches_unitary_walk() {
        let m = DecoherenceModel::new(0.0, Target::Both, 5, 1).unwrap();
        let s0 = WalkState1D::plus(0);
        let snaps = decohere_evolve(&s0, &m, &hadamard_coin(), Shift1D::Standard, 3, 0.0).unwrap();
        let last = &snaps[2];
        assert!((last.mean.prob(1) - 0.625).abs() < 1e-12);
        assert!(last.std_err.probs.iter().all(|&e| e < 1e-9));
    }

    #[test]
    fn reproducible_with_seed() {
        let m = DecoherenceModel::new(0.3, Target::Position, 100, 42).unwrap();
        let s0 = WalkState1D::plus(0);
        let a = decohere_evolve(&s0, &m, &hadamard_coin(), Shift1D::Standard, 15, 0.0).unwrap();
        let b = decohere_evolve(&s0, &m, &hadamard_coin(), Shift1D::Standard, 15, 0.0).unwrap();
        assert_eq!(a, b);
        let m2 = DecoherenceModel::new(0.3, Target::Position, 100, 43).unwrap();
        let c = decohere_evolve(&s0, &m2, &hadamard_coin(), Shift1D::Standard, 15, 0.0).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn coin_measurement_keeps_norm() {
        let m = DecoherenceModel::new(1.0, Target::Coin, 20, 7).unwrap();
        let s0 = WalkState1D::plus(0);
        let snaps = decohere_evolve(&s0, &m, &hadamard_coin(), Shift1D::Standard, 10, 0.0).unwrap();
        for s in &snaps {
            assert!((s.mean.total() - 1.0).abs() < 1e-12);
        }
    }
}
