//! Parameter sweeps over shaking amplitude and decoherence probability.

use std::f64::consts::FRAC_1_SQRT_2;

use rayon::prelude::*;

use crate::lab::reduce::{CellReducer, RowRecord, WalkPulses, DEFAULT_PHASE_BINS};
use crate::trap::cell::CellSpec;
use crate::trap::pulse::{ShakingSpec, DEFAULT_OMEGA_SHAKE};
use crate::walk::{
    decohere_evolve, qubit_distribution, scaling_exponent, total_variational_distance, variance, CoinOp,
    DecoherenceModel, Distribution, Shift1D, Target, TrapRow, WalkState1D,
};
use crate::{Error, Result, C64};

/// Default walk length of sweeps.
pub const DEFAULT_SWEEP_STEPS: usize = 17;

/// Metrics after one step.
#[derive(Clone, Debug, PartialEq)]
pub struct StepMetrics {
    pub step: usize,
    /// Σ P(n) n² of the per-qubit (or per-site) distribution.
    pub variance: f64,
    /// ν(t); absent at t = 0.
    pub nu: Option<f64>,
    /// Population left in the vibrational ground band, for trap walks.
    pub ground_population: Option<f64>,
}

/// Results for one control value.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub control: f64,
    /// Per-qubit (per-site for abstract walks) distribution after every
    /// recorded step, normalized.
    pub distributions: Vec<(usize, Distribution)>,
    pub metrics: Vec<StepMetrics>,
    /// Slope of log σ² against log t over the fit window, if defined.
    pub exponent: Option<f64>,
    /// Largest leakage of the extracted pulses (trap walks only).
    pub max_leakage: Option<f64>,
}

impl SweepPoint {
    pub fn last(&self) -> &StepMetrics {
        self.metrics.last().expect("at least one step")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    /// Name of the control variable.
    pub control: &'static str,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    /// (control, ν) at the last step.
    pub fn final_nu(&self) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .filter_map(|p| p.last().nu.map(|n| (p.control, n)))
            .collect()
    }
}

/// Index of the smallest value if it lies strictly inside the series.
pub fn interior_minimum(values: &[f64]) -> Option<usize> {
    let (i, _) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))?;
    (i > 0 && i + 1 < values.len()).then_some(i)
}

fn metrics_of(step: usize, qubits: &Distribution, ground: Option<f64>) -> Result<StepMetrics> {
    Ok(StepMetrics {
        step,
        variance: variance(qubits, 0.0),
        nu: if step > 0 {
            Some(total_variational_distance(qubits, step as f64)?)
        } else {
            None
        },
        ground_population: ground,
    })
}

fn exponent_of(metrics: &[StepMetrics], from: usize) -> Option<f64> {
    let series: Vec<(f64, f64)> = metrics
        .iter()
        .filter(|m| m.step >= from.max(1))
        .map(|m| (m.step as f64, m.variance))
        .collect();
    scaling_exponent(&series).ok()
}

/// Shaken trap walks replayed through the cell reduction, averaged over
/// realizations of the per-pulse phases.
#[derive(Clone, Debug, PartialEq)]
pub struct ShakeSweep {
    pub cell: CellSpec,
    pub pulses: WalkPulses,
    /// αΔa values.
    pub amplitudes: Vec<f64>,
    pub omega: f64,
    pub steps: usize,
    pub realizations: usize,
    pub bins: usize,
    /// Vibrational levels kept per trap.
    pub levels: usize,
    pub seed: u64,
    /// (trap, level, amplitude) terms of the initial state.
    pub initial: Vec<(i64, usize, C64)>,
    /// First step of the scaling fit.
    pub fit_from: usize,
}

impl Default for ShakeSweep {
    fn default() -> Self {
        Self {
            cell: CellSpec::default(),
            pulses: WalkPulses::standard(),
            amplitudes: vec![0.0, 0.02, 0.03, 0.05, 0.09, 0.15, 0.3],
            omega: DEFAULT_OMEGA_SHAKE,
            steps: DEFAULT_SWEEP_STEPS,
            realizations: 256,
            bins: DEFAULT_PHASE_BINS,
            levels: 1,
            seed: 0,
            initial: central_qubit_superposition(),
            fit_from: 3,
        }
    }
}

/// (|0,+⟩ + |0,−⟩)/√2: ground states of traps 0 and 1.
pub fn central_qubit_superposition() -> Vec<(i64, usize, C64)> {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    vec![(0, 0, h), (1, 0, h)]
}

/// Averages the records of several realizations step by step.
fn average_records(runs: &[Vec<RowRecord>]) -> Vec<(usize, Distribution, f64)> {
    let m = runs.len() as f64;
    (0..runs[0].len())
        .map(|s| {
            let traps: Vec<(f64, &Distribution)> = runs.iter().map(|r| (1.0 / m, &r[s].traps)).collect();
            let ground = runs.iter().map(|r| r[s].ground_population()).sum::<f64>() / m;
            (runs[0][s].step, Distribution::weighted_sum(&traps), ground)
        })
        .collect()
}

/// For every amplitude: extracted pulses with shaking, `realizations` walks
/// on an unbounded row, and metrics of the averaged per-qubit distribution.
/// Extractions may leak any amount; the band population is reported as the
/// ground-state population when one level is kept.
pub fn shaking_sweep(sweep: &ShakeSweep) -> Result<SweepResult> {
    if sweep.realizations == 0 || sweep.steps == 0 {
        return Err(Error::Invalid("need at least one realization and one step".into()));
    }
    let row = TrapRow::from_traps(&sweep.initial, sweep.levels, None)?;
    let mut points = Vec::with_capacity(sweep.amplitudes.len());
    for &amp in &sweep.amplitudes {
        let shaking = ShakingSpec::new(sweep.omega, amp, sweep.seed)?;
        let mut red = CellReducer::new(sweep.cell, sweep.pulses, sweep.levels, None)?
            .with_max_leakage(1.0)
            .with_shaking(shaking, sweep.bins)?;
        red.prefill()?;
        let m = if amp > 0.0 { sweep.realizations } else { 1 };
        let runs: Vec<Vec<RowRecord>> = (0..m as u64)
            .into_par_iter()
            .map(|r| red.replay(&row, sweep.steps, r))
            .collect::<Result<_>>()?;
        let mut distributions = Vec::new();
        let mut metrics = Vec::new();
        for (step, traps, ground) in average_records(&runs) {
            let q = qubit_distribution(&traps).normalized();
            metrics.push(metrics_of(step, &q, Some(ground))?);
            distributions.push((step, q));
        }
        points.push(SweepPoint {
            control: amp,
            exponent: exponent_of(&metrics, sweep.fit_from),
            distributions,
            metrics,
            max_leakage: Some(red.max_leakage_seen()),
        });
    }
    Ok(SweepResult {
        control: "shake_amplitude",
        points,
    })
}

/// Monte-Carlo decoherence on the abstract line for several event
/// probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct DecoherenceSweep {
    pub probabilities: Vec<f64>,
    pub steps: usize,
    pub coin: CoinOp,
    pub shift: Shift1D,
    pub target: Target,
    pub trajectories: usize,
    pub seed: u64,
    pub initial: WalkState1D,
    pub fit_from: usize,
}

impl DecoherenceSweep {
    pub fn new(probabilities: Vec<f64>, steps: usize, trajectories: usize, seed: u64) -> Self {
        Self {
            probabilities,
            steps,
            coin: crate::walk::coin::hadamard_coin(),
            shift: Shift1D::Standard,
            target: Target::Both,
            trajectories,
            seed,
            initial: WalkState1D::plus(0),
            fit_from: 10,
        }
    }
}

pub fn decoherence_sweep(sweep: &DecoherenceSweep) -> Result<SweepResult> {
    let mut points = Vec::with_capacity(sweep.probabilities.len());
    for (i, &p) in sweep.probabilities.iter().enumerate() {
        let model = DecoherenceModel::new(p, sweep.target, sweep.trajectories, sweep.seed.wrapping_add(i as u64))?;
        let snaps = decohere_evolve(&sweep.initial, &model, &sweep.coin, sweep.shift, sweep.steps, 0.0)?;
        let mut distributions = Vec::with_capacity(snaps.len());
        let mut metrics = Vec::with_capacity(snaps.len());
        for s in snaps {
            let mut m = metrics_of(s.step, &s.mean, None)?;
            m.variance = s.variance;
            metrics.push(m);
            distributions.push((s.step, s.mean));
        }
        points.push(SweepPoint {
            control: p,
            exponent: exponent_of(&metrics, sweep.fit_from),
            distributions,
            metrics,
            max_leakage: None,
        });
    }
    Ok(SweepResult {
        control: "p",
        points,
    })
}
