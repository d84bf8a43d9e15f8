//! Experiment orchestration: turns a validated config into a [`Report`].

use std::f64::consts::FRAC_1_SQRT_2;

use serde_json::{json, Map, Value};
use trapwalk::lab::{
    boltzmann_weights, decoherence_budget, decoherence_sweep, thermal::mean_quanta_of, search_experiment, shaking_sweep,
    temperature_mapping, CellReducer, DecoherenceSweep, RowRecord, ShakeSweep, Species, StepMetrics, SweepResult,
    WalkPulses,
};
use trapwalk::trap::study::{dt_refinement, free_spreading, level_spacing};
use trapwalk::trap::{
    calibrate_hold_time, eigenstates, extract_effective_unitary, fit_coin_params, fit_shift_params, run_walk_line,
    GaussianTrap, LineSpec, PulseTarget, ShakingSpec, SimGrid,
};
use trapwalk::walk::coin::{
    biased_coin, coin_c0, coin_entangled_2d, coin_separable_2d, hadamard_coin, tunneling_coin,
};
use trapwalk::walk::{
    position_distribution, qubit_distribution, scaling_exponent, search_step, total_variational_distance, variance,
    CoinOp, Distribution, GeneralShiftParams, SearchSetup, Shift1D, Target, TrapRow, WalkState1D, WalkState2D,
};
use trapwalk::{Error, Result, C64};

use crate::config::{
    Coin2DName, CoinName, Engine, Initial1D, Initial2D, Kind, PulseName, RunConfig, ShiftName, TargetName,
};

/// One distribution row: (index_k, index_l, probability).
pub type Row = (i64, Option<i64>, f64);

/// Output of one control value.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    /// Control value of a sweep point; `None` for single runs.
    pub control: Option<f64>,
    /// Distribution rows of every recorded step.
    pub recorded: Vec<(usize, Vec<Row>)>,
    pub metrics: Vec<StepMetrics>,
    pub exponent: Option<f64>,
    pub max_leakage: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    /// Name of the sweep control, if any.
    pub control: Option<&'static str>,
    pub series: Vec<Series>,
    /// Kind-specific results.
    pub extra: Map<String, Value>,
}

impl Report {
    fn single(series: Series) -> Self {
        Self {
            control: None,
            series: vec![series],
            extra: Map::new(),
        }
    }
}

fn rows_1d(d: &Distribution) -> Vec<Row> {
    d.iter().filter(|&(_, p)| p != 0.0).map(|(k, p)| (k, None, p)).collect()
}

fn step_metrics(step: usize, nu_of: Option<&Distribution>, var: f64, ground: Option<f64>) -> Result<StepMetrics> {
    let nu = match nu_of {
        Some(d) if step > 0 => Some(total_variational_distance(d, step as f64)?),
        _ => None,
    };
    Ok(StepMetrics {
        step,
        variance: var,
        nu,
        ground_population: ground,
    })
}

fn fit(metrics: &[StepMetrics], from: usize) -> Option<f64> {
    let pts: Vec<(f64, f64)> = metrics
        .iter()
        .filter(|m| m.step >= from.max(1))
        .map(|m| (m.step as f64, m.variance))
        .collect();
    scaling_exponent(&pts).ok()
}

/// Runs the experiment described by `config`, which must be valid.
pub fn execute(config: &RunConfig) -> Result<Report> {
    match config.kind {
        Kind::Walk1d => walk1d(config),
        Kind::Walk2d => walk2d(config),
        Kind::Physical => physical(config),
        Kind::Thermal => thermal(config),
        Kind::Shake => shake(config),
        Kind::Decohere => decohere(config),
        Kind::Search => search(config),
        Kind::Calibrate => calibrate(config),
        Kind::Convergence => convergence(config),
    }
}

fn coin_1d(config: &RunConfig) -> Result<CoinOp> {
    let w = &config.walk;
    Ok(match w.coin {
        CoinName::Hadamard => hadamard_coin(),
        CoinName::Tunneling => tunneling_coin(w.theta),
        CoinName::Biased => biased_coin(w.bias, w.delta_c)?,
        CoinName::Identity => CoinOp::identity(2),
    })
}

fn shift_1d(config: &RunConfig) -> Result<Shift1D> {
    let w = &config.walk;
    Ok(match w.shift {
        ShiftName::Standard => Shift1D::Standard,
        ShiftName::Flipflop => Shift1D::FlipFlop,
        ShiftName::General => Shift1D::General(GeneralShiftParams::new(w.c, w.delta_o)?),
    })
}

fn initial_1d(config: &RunConfig) -> Result<WalkState1D> {
    let h = FRAC_1_SQRT_2;
    match config.walk.initial {
        Initial1D::Plus => Ok(WalkState1D::plus(0)),
        Initial1D::Minus => Ok(WalkState1D::minus(0)),
        Initial1D::Symmetric => WalkState1D::localized(0, [C64::new(h, 0.0), C64::new(0.0, h)]),
        Initial1D::Balanced => WalkState1D::localized(0, [C64::new(h, 0.0), C64::new(h, 0.0)]),
    }
}

fn walk1d(config: &RunConfig) -> Result<Report> {
    let coin = coin_1d(config)?;
    let shift = shift_1d(config)?;
    let mut s = initial_1d(config)?;
    let steps = config.steps();
    let mut recorded = Vec::new();
    let mut metrics = Vec::with_capacity(steps + 1);
    for t in 0..=steps {
        if t > 0 {
            s.phase_walk_step(config.walk.phase, &coin, shift)?;
        }
        let d = position_distribution(&s);
        metrics.push(step_metrics(t, Some(&d), variance(&d, 0.0), None)?);
        if config.is_recorded(t) {
            recorded.push((t, rows_1d(&d)));
        }
    }
    Ok(Report::single(Series {
        control: None,
        recorded,
        exponent: fit(&metrics, config.walk.fit_from),
        metrics,
        max_leakage: None,
    }))
}

fn walk2d(config: &RunConfig) -> Result<Report> {
    let l = &config.lattice;
    let coin = match l.coin {
        Coin2DName::Separable => coin_separable_2d(),
        Coin2DName::Entangled => coin_entangled_2d(),
        Coin2DName::Grover => coin_c0(),
    };
    let (one, zero) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
    let amps = match l.initial {
        Initial2D::PlusPlus => [one, zero, zero, zero],
        Initial2D::PlusMinus => [zero, one, zero, zero],
        Initial2D::MinusPlus => [zero, zero, one, zero],
        Initial2D::MinusMinus => [zero, zero, zero, one],
        Initial2D::Uniform => [C64::new(0.5, 0.0); 4],
    };
    let mut s = WalkState2D::localized(0, 0, amps)?;
    let steps = config.steps();
    let mut recorded = Vec::new();
    let mut metrics = Vec::with_capacity(steps + 1);
    for t in 0..=steps {
        if t > 0 {
            s.apply_coin(&coin, None)?;
            match l.shift {
                ShiftName::Flipflop => s.shift_flipflop_2d(),
                _ => s.shift_2d(),
            }
        }
        let sites = s.site_distribution();
        let var = sites.iter().map(|&(k, l, p)| p * (k * k + l * l) as f64).sum();
        metrics.push(step_metrics(t, None, var, None)?);
        if config.is_recorded(t) {
            let rows = sites
                .into_iter()
                .filter(|&(_, _, p)| p != 0.0)
                .map(|(k, l, p)| (k, Some(l), p))
                .collect();
            recorded.push((t, rows));
        }
    }
    Ok(Report::single(Series {
        control: None,
        recorded,
        exponent: fit(&metrics, l.fit_from),
        metrics,
        max_leakage: None,
    }))
}

fn pulses(config: &RunConfig) -> Result<WalkPulses> {
    let t = &config.trap;
    Ok(WalkPulses {
        coin: t.schedule(t.hold_coin)?,
        shift: t.schedule(t.hold_shift)?,
    })
}

/// Records of a trap walk: per-trap distribution (normalized), ground-state
/// population.
fn trap_series(
    config: &RunConfig,
    steps: impl Iterator<Item = (usize, Distribution, f64)>,
    max_leakage: Option<f64>,
) -> Result<Series> {
    let mut recorded = Vec::new();
    let mut metrics = Vec::new();
    for (t, traps, ground) in steps {
        let q = qubit_distribution(&traps).normalized();
        metrics.push(step_metrics(t, Some(&q), variance(&q, 0.0), Some(ground))?);
        if config.is_recorded(t) {
            recorded.push((t, rows_1d(&traps)));
        }
    }
    Ok(Series {
        control: None,
        recorded,
        exponent: fit(&metrics, config.physical.fit_from),
        metrics,
        max_leakage,
    })
}

fn physical(config: &RunConfig) -> Result<Report> {
    let p = &config.physical;
    let cell = config.trap.cell();
    let pulses = pulses(config)?;
    let initial = p.initial.terms(p.initial_level);
    let shaking = if p.shake_amplitude > 0.0 {
        Some(ShakingSpec::new(p.shake_omega, p.shake_amplitude, config.seed)?)
    } else {
        None
    };
    let steps = config.steps();
    let series = match p.engine {
        Engine::Full => {
            let spec = LineSpec {
                cell,
                n_traps: p.n_traps,
                coin: pulses.coin,
                shift: pulses.shift,
                levels: p.levels,
            };
            let records = run_walk_line(&spec, &initial, steps, shaking.as_ref())?;
            trap_series(
                config,
                records.into_iter().map(|r| (r.step, r.spatial, r.ground_population)),
                None,
            )?
        }
        Engine::Reduced => {
            let bounds = trapwalk::trap::line::row_bounds(p.n_traps);
            let mut red = CellReducer::new(cell, pulses, p.levels, Some(bounds))?.with_max_leakage(p.max_leakage);
            if let Some(s) = shaking {
                red = red.with_shaking(s, trapwalk::lab::reduce::DEFAULT_PHASE_BINS)?;
            }
            let row = TrapRow::from_traps(&initial, p.levels, Some(bounds))?;
            let records = red.walk(&row, steps, 0)?;
            let leak = red.max_leakage_seen();
            trap_series(config, records.into_iter().map(reduced_step), Some(leak))?
        }
    };
    Ok(Report::single(series))
}

fn reduced_step(r: RowRecord) -> (usize, Distribution, f64) {
    let g = r.ground_population();
    (r.step, r.traps.normalized(), g)
}

/// Single-trap level energies, enough to hold the truncated weight.
fn thermal_weights(config: &RunConfig) -> Result<(Vec<f64>, Vec<f64>)> {
    let spec = config.thermal_spec()?;
    let g = SimGrid::new(-51.2, 51.2, 512, config.trap.dt)?;
    let trap = GaussianTrap::new(0.0, config.trap.v0)?;
    let mut n = 8;
    loop {
        let energies = eigenstates(&trap, n, &g)?.energies;
        match boltzmann_weights(&energies, &spec) {
            Ok(w) => return Ok((energies, w)),
            Err(Error::Truncation { .. }) if n < 128 => n *= 2,
            Err(e) => return Err(e),
        }
    }
}

fn thermal(config: &RunConfig) -> Result<Report> {
    let th = &config.thermal;
    let (energies, weights) = thermal_weights(config)?;
    let kept = weights.len();
    let levels = kept + th.extra_levels;
    let mut red = CellReducer::new(config.trap.cell(), pulses(config)?, levels, None)?.with_max_leakage(th.max_leakage);
    let steps = config.steps();
    let mut per_level = Vec::with_capacity(kept);
    for j in 0..kept {
        let row = TrapRow::from_traps(&config.physical.initial.terms(j), levels, None)?;
        per_level.push(red.walk(&row, steps, 0)?);
    }
    let mut recorded = Vec::new();
    let mut metrics = Vec::new();
    for t in 0..=steps {
        let traps: Vec<Distribution> = per_level.iter().map(|r| r[t].traps.normalized()).collect();
        let parts: Vec<(f64, &Distribution)> = weights.iter().copied().zip(&traps).collect();
        let mix = Distribution::weighted_sum(&parts);
        let ground: f64 = weights
            .iter()
            .zip(&per_level)
            .map(|(w, r)| w * r[t].ground_population())
            .sum();
        let q = qubit_distribution(&mix).normalized();
        metrics.push(step_metrics(t, Some(&q), variance(&q, 0.0), Some(ground))?);
        if config.is_recorded(t) {
            recorded.push((t, rows_1d(&q)));
        }
    }
    let mut extra = Map::new();
    extra.insert("weights".into(), json!(weights));
    extra.insert("level_energies".into(), json!(energies[..kept]));
    extra.insert("mean_quanta".into(), json!(mean_quanta_of(&weights)));
    extra.insert("beta".into(), json!(config.thermal_spec()?.beta()));
    if th.beta.is_none() {
        let species = Species::parse(&th.species).ok_or_else(|| Error::Invalid("unknown species".into()))?;
        let kelvin = temperature_mapping(th.ground_population, th.omega_si, species)?;
        extra.insert("temperature_uK".into(), json!(kelvin * 1e6));
    }
    Ok(Report {
        control: None,
        series: vec![Series {
            control: None,
            recorded,
            exponent: fit(&metrics, config.physical.fit_from),
            metrics,
            max_leakage: Some(red.max_leakage_seen()),
        }],
        extra,
    })
}

fn sweep_report(config: &RunConfig, sweep: SweepResult) -> Report {
    let series = sweep
        .points
        .into_iter()
        .map(|p| Series {
            control: Some(p.control),
            recorded: p
                .distributions
                .iter()
                .filter(|(t, _)| config.is_recorded(*t))
                .map(|(t, d)| (*t, rows_1d(d)))
                .collect(),
            metrics: p.metrics,
            exponent: p.exponent,
            max_leakage: p.max_leakage,
        })
        .collect();
    Report {
        control: Some(sweep.control),
        series,
        extra: Map::new(),
    }
}

fn shake(config: &RunConfig) -> Result<Report> {
    let s = &config.shake;
    let sweep = ShakeSweep {
        cell: config.trap.cell(),
        pulses: pulses(config)?,
        amplitudes: s.amplitudes.clone(),
        omega: s.omega,
        steps: config.steps(),
        realizations: s.realizations,
        bins: s.bins,
        levels: s.levels,
        seed: config.seed,
        initial: config.physical.initial.terms(0),
        fit_from: s.fit_from,
    };
    let result = shaking_sweep(&sweep)?;
    let nus: Vec<f64> = result.points.iter().map(|p| p.last().nu.unwrap_or(f64::NAN)).collect();
    let mut report = sweep_report(config, result);
    report.extra.insert(
        "interior_minimum".into(),
        json!(trapwalk::lab::interior_minimum(&nus).map(|i| s.amplitudes[i])),
    );
    Ok(report)
}

fn decohere(config: &RunConfig) -> Result<Report> {
    let d = &config.decohere;
    let mut sweep = DecoherenceSweep::new(d.probabilities.clone(), config.steps(), d.trajectories, config.seed);
    sweep.coin = coin_1d(config)?;
    sweep.shift = shift_1d(config)?;
    sweep.initial = initial_1d(config)?;
    sweep.fit_from = config.walk.fit_from;
    sweep.target = match d.target {
        TargetName::Coin => Target::Coin,
        TargetName::Position => Target::Position,
        TargetName::Both => Target::Both,
    };
    let mut report = sweep_report(config, decoherence_sweep(&sweep)?);
    let budget: Vec<Value> = d
        .scattering_rates
        .iter()
        .map(|&rate| {
            decoherence_budget(d.omega_si, d.step_time_factor, rate, config.steps())
                .map(|b| json!({ "rate": rate, "step_duration": b.step_duration, "p": b.p, "tp": b.tp }))
        })
        .collect::<Result<_>>()?;
    report.extra.insert("budget".into(), Value::Array(budget));
    Ok(report)
}

fn search(config: &RunConfig) -> Result<Report> {
    let setup = SearchSetup::new(config.search.side, config.search.marked_site())?;
    let steps = config.steps();
    let result = search_experiment(&setup, steps)?;
    let c = (setup.side as f64 - 1.0) / 2.0;
    let mut s = WalkState2D::search_initial(&setup);
    let mut recorded = Vec::new();
    let mut metrics = Vec::with_capacity(steps + 1);
    for t in 0..=steps {
        if t > 0 {
            search_step(&mut s, &setup)?;
        }
        let sites = s.site_distribution();
        let var = sites
            .iter()
            .map(|&(k, l, p)| p * ((k as f64 - c).powi(2) + (l as f64 - c).powi(2)))
            .sum();
        metrics.push(step_metrics(t, None, var, None)?);
        if config.is_recorded(t) {
            recorded.push((
                t,
                sites
                    .into_iter()
                    .filter(|&(_, _, p)| p != 0.0)
                    .map(|(k, l, p)| (k, Some(l), p))
                    .collect(),
            ));
        }
    }
    let n = setup.n_sites() as f64;
    let mut extra = Map::new();
    extra.insert("marked_probability".into(), json!(result.series));
    extra.insert(
        "first_peak".into(),
        json!(result.first_peak.map(|(t, p)| json!({ "step": t, "probability": p }))),
    );
    extra.insert(
        "max".into(),
        json!({ "step": result.max.0, "probability": result.max.1, "times_n": result.max.1 * n }),
    );
    extra.insert("max_site_deviation".into(), json!(result.max_site_deviation));
    Ok(Report {
        control: None,
        series: vec![Series {
            control: None,
            recorded,
            metrics,
            exponent: None,
            max_leakage: None,
        }],
        extra,
    })
}

fn calibrate(config: &RunConfig) -> Result<Report> {
    let ca = &config.calibrate;
    let target = match ca.target {
        PulseName::Pi => PulseTarget::Pi,
        PulseName::PiOver2 => PulseTarget::PiOver2,
    };
    let cell = config.trap.cell();
    let hold = match target {
        PulseTarget::Pi => config.trap.hold_shift,
        PulseTarget::PiOver2 => config.trap.hold_coin,
    };
    let schedule = config.trap.schedule(hold)?;
    let cal = calibrate_hold_time(&cell, &schedule, target, ca.level, ca.t_max)?;
    let u = extract_effective_unitary(&cell, &schedule.with_hold(cal.t_i), ca.level + 1, None)?;
    let block = u.level_block(ca.level);
    let (param, delta) = match target {
        PulseTarget::Pi => fit_shift_params(&trapwalk::trap::nearest_unitary(&block))?,
        PulseTarget::PiOver2 => fit_coin_params(&trapwalk::trap::nearest_unitary(&block))?,
    };
    let mut extra = Map::new();
    extra.insert("t_i".into(), json!(cal.t_i));
    extra.insert("fidelity".into(), json!(cal.fidelity));
    extra.insert("leakage".into(), json!(u.leakage));
    extra.insert(
        "fit".into(),
        match target {
            PulseTarget::Pi => json!({ "c": param, "delta_o": delta }),
            PulseTarget::PiOver2 => json!({ "p": param, "delta_c": delta }),
        },
    );
    extra.insert(
        "scan".into(),
        json!(cal
            .scan
            .iter()
            .map(|&(t, transfer, f)| json!({ "t_i": t, "transfer": transfer, "fidelity": f }))
            .collect::<Vec<_>>()),
    );
    Ok(Report {
        control: None,
        series: Vec::new(),
        extra,
    })
}

fn convergence(config: &RunConfig) -> Result<Report> {
    let cv = &config.convergence;
    let r = dt_refinement(config.trap.v0, &cv.dts, cv.t_end)?;
    let (measured, analytic) = free_spreading(cv.sigma0, cv.t_end, 0.01)?;
    let spacing = level_spacing(config.trap.v0, cv.spacing_dx)?;
    let mut extra = Map::new();
    extra.insert(
        "refinement".into(),
        json!(r
            .errors
            .iter()
            .map(|&(dt, e)| json!({ "dt": dt, "error": e }))
            .collect::<Vec<_>>()),
    );
    extra.insert("order".into(), json!(r.order));
    extra.insert(
        "free_spreading".into(),
        json!({ "measured": measured, "analytic": analytic }),
    );
    extra.insert("level_spacing".into(), json!(spacing));
    Ok(Report {
        control: None,
        series: Vec::new(),
        extra,
    })
}
