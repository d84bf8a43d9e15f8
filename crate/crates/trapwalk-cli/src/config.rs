//! Run configuration: TOML text with one section per concern.
//!
//! ```toml
//! kind = "walk1d"
//! steps = 3
//!
//! [walk]
//! coin = "hadamard"
//! initial = "plus"
//! ```

use std::fmt;

use serde::{Deserialize, Serialize};
use trapwalk::lab::{Species, ThermalSpec, Temperature};
use trapwalk::trap::pulse::{
    RampShape, DEFAULT_A_MAX, DEFAULT_A_MIN, DEFAULT_DT, DEFAULT_DX, DEFAULT_MARGIN, DEFAULT_OMEGA_SHAKE,
    DEFAULT_T_R,
};
use trapwalk::trap::{CellSpec, PotentialForm, PulseSchedule, HOLD_PI, HOLD_PI_OVER_2};
use trapwalk::walk::{GeneralShiftParams, SearchSetup};

/// Largest row the full integration runs without `--long-jobs`.
pub const DESK_TRAPS: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Walk1d,
    Walk2d,
    Physical,
    Thermal,
    Shake,
    Decohere,
    Search,
    Calibrate,
    Convergence,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Walk1d => "walk1d",
            Kind::Walk2d => "walk2d",
            Kind::Physical => "physical",
            Kind::Thermal => "thermal",
            Kind::Shake => "shake",
            Kind::Decohere => "decohere",
            Kind::Search => "search",
            Kind::Calibrate => "calibrate",
            Kind::Convergence => "convergence",
        }
    }

    /// Walk length used when `steps` is absent.
    pub fn default_steps(self) -> usize {
        match self {
            Kind::Walk1d => 100,
            Kind::Walk2d => 20,
            Kind::Physical => 5,
            Kind::Thermal | Kind::Shake | Kind::Decohere => 17,
            Kind::Search => 200,
            Kind::Calibrate | Kind::Convergence => 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub record_every: usize,
    #[serde(default)]
    pub walk: WalkSection,
    #[serde(default)]
    pub lattice: LatticeSection,
    #[serde(default)]
    pub trap: TrapSection,
    #[serde(default)]
    pub physical: PhysicalSection,
    #[serde(default)]
    pub thermal: ThermalSection,
    #[serde(default)]
    pub shake: ShakeSection,
    #[serde(default)]
    pub decohere: DecohereSection,
    #[serde(default)]
    pub search: SearchSection,
    #[serde(default)]
    pub calibrate: CalibrateSection,
    #[serde(default)]
    pub convergence: ConvergenceSection,
}

fn one() -> usize {
    1
}

impl RunConfig {
    /// Default configuration of an experiment kind.
    pub fn new(kind: Kind) -> Self {
        Self {
            kind,
            steps: None,
            seed: 0,
            record_every: 1,
            walk: WalkSection::default(),
            lattice: LatticeSection::default(),
            trap: TrapSection::default(),
            physical: PhysicalSection::default(),
            thermal: ThermalSection::default(),
            shake: ShakeSection::default(),
            decohere: DecohereSection::default(),
            search: SearchSection::default(),
            calibrate: CalibrateSection::default(),
            convergence: ConvergenceSection::default(),
        }
    }

    pub fn steps(&self) -> usize {
        self.steps.unwrap_or_else(|| self.kind.default_steps())
    }

    /// Copy with every implicit default written out.
    pub fn resolved(&self) -> Self {
        let mut c = self.clone();
        c.steps = Some(self.steps());
        c
    }

    pub fn is_recorded(&self, step: usize) -> bool {
        step % self.record_every == 0 || step == self.steps()
    }

    pub fn to_toml(&self) -> Result<String, toml::ser::Error> {
        toml::to_string(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoinName {
    Hadamard,
    Tunneling,
    Biased,
    Identity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftName {
    Standard,
    Flipflop,
    General,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Initial1D {
    /// |0,+⟩
    Plus,
    /// |0,−⟩
    Minus,
    /// (|0,+⟩ + i|0,−⟩)/√2
    Symmetric,
    /// (|0,+⟩ + |0,−⟩)/√2
    Balanced,
}

/// Abstract walk on the line; also the coin and shift of `decohere` runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WalkSection {
    pub coin: CoinName,
    /// Pulse area of the tunneling coin.
    pub theta: f64,
    /// p of the biased coin.
    pub bias: f64,
    /// Δ_C of the biased coin.
    pub delta_c: f64,
    pub shift: ShiftName,
    /// Transfer probability of the general shift.
    pub c: f64,
    /// Δ_O of the general shift.
    pub delta_o: f64,
    pub initial: Initial1D,
    /// Phase φ of the phase walk; 0 is the plain walk.
    pub phase: f64,
    /// First step of the scaling fit.
    pub fit_from: usize,
}

impl Default for WalkSection {
    fn default() -> Self {
        Self {
            coin: CoinName::Hadamard,
            theta: std::f64::consts::FRAC_PI_2,
            bias: 0.5,
            delta_c: 0.0,
            shift: ShiftName::Standard,
            c: 1.0,
            delta_o: 0.0,
            initial: Initial1D::Plus,
            phase: 0.0,
            fit_from: 10,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coin2DName {
    Separable,
    Entangled,
    Grover,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Initial2D {
    #[serde(rename = "++")]
    PlusPlus,
    #[serde(rename = "+-")]
    PlusMinus,
    #[serde(rename = "-+")]
    MinusPlus,
    #[serde(rename = "--")]
    MinusMinus,
    /// Equal superposition of the four coin states.
    #[serde(rename = "uniform")]
    Uniform,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LatticeSection {
    pub coin: Coin2DName,
    pub shift: ShiftName,
    pub initial: Initial2D,
    pub fit_from: usize,
}

impl Default for LatticeSection {
    fn default() -> Self {
        Self {
            coin: Coin2DName::Separable,
            shift: ShiftName::Standard,
            initial: Initial2D::PlusPlus,
            fit_from: 5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RampName {
    Beta,
    Smoothstep,
    Linear,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormName {
    SumGaussian,
    PiecewiseHarmonic,
}

/// Trap potential, pulse timing and grid settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrapSection {
    #[serde(rename = "V0")]
    pub v0: f64,
    pub a_max: f64,
    pub a_min: f64,
    pub t_r: f64,
    pub ramp: RampName,
    pub ramp_a: f64,
    pub ramp_b: f64,
    /// Hold time of the coin (π/2) pulse.
    pub hold_coin: f64,
    /// Hold time of the shift (π) pulse.
    pub hold_shift: f64,
    pub form: FormName,
    pub dx: f64,
    pub dt: f64,
    pub margin: f64,
}

impl Default for TrapSection {
    fn default() -> Self {
        Self {
            v0: trapwalk::trap::potential::DEFAULT_V0,
            a_max: DEFAULT_A_MAX,
            a_min: DEFAULT_A_MIN,
            t_r: DEFAULT_T_R,
            ramp: RampName::Beta,
            ramp_a: 2.5,
            ramp_b: 8.0,
            hold_coin: HOLD_PI_OVER_2,
            hold_shift: HOLD_PI,
            form: FormName::SumGaussian,
            dx: DEFAULT_DX,
            dt: DEFAULT_DT,
            margin: DEFAULT_MARGIN,
        }
    }
}

impl TrapSection {
    pub fn cell(&self) -> CellSpec {
        CellSpec {
            v0: self.v0,
            form: match self.form {
                FormName::SumGaussian => PotentialForm::SumGaussian,
                FormName::PiecewiseHarmonic => PotentialForm::PiecewiseHarmonic,
            },
            dx: self.dx,
            dt: self.dt,
            margin: self.margin,
        }
    }

    pub fn ramp_shape(&self) -> RampShape {
        match self.ramp {
            RampName::Beta => RampShape::Beta {
                a: self.ramp_a,
                b: self.ramp_b,
            },
            RampName::Smoothstep => RampShape::Smoothstep,
            RampName::Linear => RampShape::Linear,
        }
    }

    pub fn schedule(&self, hold: f64) -> trapwalk::Result<PulseSchedule> {
        PulseSchedule::new(self.a_max, self.a_min, self.t_r, hold, self.ramp_shape())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    /// Schrödinger integration of the whole row.
    Full,
    /// Extracted pulse unitaries replayed on the row.
    Reduced,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrapInitial {
    /// Equal superposition of traps 0 and 1.
    Superposition,
    /// Trap 0 (qubit 0, coin −).
    Left,
    /// Trap 1 (qubit 0, coin +).
    Right,
}

impl TrapInitial {
    pub fn terms(self, level: usize) -> Vec<(i64, usize, trapwalk::C64)> {
        let h = trapwalk::C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let one = trapwalk::C64::new(1.0, 0.0);
        match self {
            TrapInitial::Superposition => vec![(0, level, h), (1, level, h)],
            TrapInitial::Left => vec![(0, level, one)],
            TrapInitial::Right => vec![(1, level, one)],
        }
    }
}

/// Walk of an atom on a finite row of moving traps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhysicalSection {
    pub engine: Engine,
    pub n_traps: usize,
    /// Vibrational levels kept per trap.
    pub levels: usize,
    pub initial: TrapInitial,
    pub initial_level: usize,
    /// αΔa; 0 disables shaking.
    pub shake_amplitude: f64,
    pub shake_omega: f64,
    /// Leakage bound of the reduced engine.
    pub max_leakage: f64,
    /// First step of the scaling fit.
    pub fit_from: usize,
}

impl Default for PhysicalSection {
    fn default() -> Self {
        Self {
            engine: Engine::Full,
            n_traps: DESK_TRAPS,
            levels: 1,
            initial: TrapInitial::Superposition,
            initial_level: 0,
            shake_amplitude: 0.0,
            shake_omega: DEFAULT_OMEGA_SHAKE,
            max_leakage: trapwalk::lab::reduce::REDUCTION_LEAKAGE,
            fit_from: 3,
        }
    }
}

/// Thermal mixture of walks started in each vibrational level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ThermalSection {
    /// Ground-state population P₀ of the harmonic ladder.
    pub ground_population: f64,
    /// β in units of 1/ħωₓ; takes precedence over `ground_population`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    pub truncation: f64,
    /// Trap frequency ωₓ in s⁻¹ for the temperature in kelvin.
    pub omega_si: f64,
    pub species: String,
    /// Levels kept above the highest thermally populated one.
    pub extra_levels: usize,
    pub max_leakage: f64,
}

impl Default for ThermalSection {
    fn default() -> Self {
        Self {
            ground_population: 0.5,
            beta: None,
            truncation: trapwalk::lab::thermal::DEFAULT_TRUNCATION,
            omega_si: 1e5,
            species: "Rb87".into(),
            extra_levels: 1,
            max_leakage: 1.0,
        }
    }
}

impl ThermalSection {
    pub fn spec(&self) -> trapwalk::Result<ThermalSpec> {
        let t = match self.beta {
            Some(b) => Temperature::Beta(b),
            None => Temperature::GroundPopulation(self.ground_population),
        };
        ThermalSpec::new(t, self.truncation)
    }
}

/// Sweep over the shaking amplitude αΔa.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ShakeSection {
    pub amplitudes: Vec<f64>,
    pub omega: f64,
    pub realizations: usize,
    pub bins: usize,
    pub levels: usize,
    pub fit_from: usize,
}

impl Default for ShakeSection {
    fn default() -> Self {
        let d = trapwalk::lab::ShakeSweep::default();
        Self {
            amplitudes: d.amplitudes,
            omega: d.omega,
            realizations: d.realizations,
            bins: d.bins,
            levels: d.levels,
            fit_from: d.fit_from,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetName {
    Coin,
    Position,
    Both,
}

/// Sweep over the per-step decoherence probability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecohereSection {
    pub probabilities: Vec<f64>,
    pub trajectories: usize,
    pub target: TargetName,
    /// Background event rates in s⁻¹ for the budget estimate.
    pub scattering_rates: Vec<f64>,
    pub omega_si: f64,
    pub step_time_factor: f64,
}

impl Default for DecohereSection {
    fn default() -> Self {
        Self {
            probabilities: vec![0.0, 0.005, 0.05, 0.13, 1.0],
            trajectories: 1000,
            target: TargetName::Both,
            scattering_rates: vec![0.1, 1.0],
            omega_si: 1e5,
            step_time_factor: trapwalk::lab::budget::DEFAULT_STEP_TIME_FACTOR,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchSection {
    pub side: usize,
    /// `[k, l]` of the marked site, or `[]` for none.
    pub marked: Vec<i64>,
}

impl Default for SearchSection {
    fn default() -> Self {
        Self {
            side: 8,
            marked: vec![3, 4],
        }
    }
}

impl SearchSection {
    pub fn marked_site(&self) -> Option<(i64, i64)> {
        match self.marked.as_slice() {
            [k, l] => Some((*k, *l)),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseName {
    Pi,
    #[serde(rename = "pi_over_2")]
    PiOver2,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CalibrateSection {
    pub target: PulseName,
    pub level: usize,
    pub t_max: f64,
}

impl Default for CalibrateSection {
    fn default() -> Self {
        Self {
            target: PulseName::PiOver2,
            level: 0,
            t_max: 200.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConvergenceSection {
    pub dts: Vec<f64>,
    pub t_end: f64,
    pub sigma0: f64,
    pub spacing_dx: f64,
}

impl Default for ConvergenceSection {
    fn default() -> Self {
        Self {
            dts: vec![0.04, 0.02, 0.01, 0.005],
            t_end: 5.0,
            sigma0: 1.0,
            spacing_dx: 0.1,
        }
    }
}

/// One problem with a configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    /// Dotted key such as `trap.a_min`.
    pub key: Option<String>,
    /// 1-based line of the key in the source text.
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(l) = self.line {
            write!(f, "line {l}: ")?;
        }
        if let Some(k) = &self.key {
            write!(f, "`{k}`: ")?;
        }
        f.write_str(&self.message)
    }
}

/// Every problem found in one configuration.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub struct ConfigErrors(pub Vec<ConfigError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Line of `key` inside `[section]` (top level when `section` is empty).
pub fn find_key_line(text: &str, dotted: &str) -> Option<usize> {
    let (section, key) = match dotted.rsplit_once('.') {
        Some((s, k)) => (s, k),
        None => ("", dotted),
    };
    let mut current = "";
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix('[') {
            current = rest.split(']').next().unwrap_or("").trim();
            continue;
        }
        if current != section {
            continue;
        }
        if let Some((k, _)) = line.split_once('=') {
            if k.trim().trim_matches('"') == key {
                return Some(i + 1);
            }
        }
    }
    None
}

fn section_at(text: &str, line: usize) -> String {
    text.lines()
        .take(line)
        .filter_map(|l| l.trim().strip_prefix('['))
        .last()
        .map(|r| r.split(']').next().unwrap_or("").trim().to_string())
        .unwrap_or_default()
}

fn deserialize_error(text: &str, e: &toml::de::Error) -> ConfigError {
    let line = e.span().map(|s| line_of_offset(text, s.start));
    let key = line.and_then(|l| {
        let src = text.lines().nth(l - 1)?;
        let (k, _) = src.split_once('=')?;
        let k = k.trim().trim_matches('"');
        let section = section_at(text, l);
        Some(if section.is_empty() {
            k.to_string()
        } else {
            format!("{section}.{k}")
        })
    });
    let mut message = e.message().trim().to_string();
    if message.contains("expected usize") || message.contains("expected u64") {
        message = format!("must be a non-negative integer ({message})");
    }
    ConfigError { key, line, message }
}

/// Parses and validates a configuration.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigErrors> {
    let config: RunConfig = toml::from_str(text).map_err(|e| ConfigErrors(vec![deserialize_error(text, &e)]))?;
    let mut errors = config.validate();
    for e in &mut errors {
        if let Some(k) = &e.key {
            e.line = find_key_line(text, k);
        }
    }
    if errors.is_empty() {
        Ok(config)
    } else {
        Err(ConfigErrors(errors))
    }
}

struct Checker(Vec<ConfigError>);

impl Checker {
    fn check(&mut self, ok: bool, key: &str, constraint: &str) {
        if !ok {
            self.0.push(ConfigError {
                key: Some(key.to_string()),
                line: None,
                message: format!("must satisfy {constraint}"),
            });
        }
    }

    fn library(&mut self, r: trapwalk::Result<()>, section: &str, fallback: &str) {
        if let Err(e) = r {
            let key = match &e {
                trapwalk::Error::OutOfRange { name, .. } => {
                    let n = if *name == "v0" { "V0" } else { name };
                    format!("{section}.{n}")
                }
                _ => format!("{section}.{fallback}"),
            };
            self.0.push(ConfigError {
                key: Some(key),
                line: None,
                message: e.to_string(),
            });
        }
    }
}

impl RunConfig {
    /// Checks every section against the preconditions of the library.
    pub fn validate(&self) -> Vec<ConfigError> {
        let mut c = Checker(Vec::new());
        let walks = !matches!(self.kind, Kind::Calibrate | Kind::Convergence);
        c.check(!walks || self.steps() >= 1, "steps", "steps >= 1");
        c.check(self.record_every >= 1, "record_every", "record_every >= 1");

        let w = &self.walk;
        c.check(w.theta.is_finite(), "walk.theta", "a finite angle");
        c.check((0.0..=1.0).contains(&w.bias), "walk.bias", "0 <= bias <= 1");
        c.check(w.delta_c.is_finite(), "walk.delta_c", "a finite phase");
        c.check(w.phase.is_finite(), "walk.phase", "a finite phase");
        c.check(w.fit_from >= 1, "walk.fit_from", "fit_from >= 1");
        if w.shift == ShiftName::General {
            c.library(GeneralShiftParams::new(w.c, w.delta_o).map(|_| ()), "walk", "c");
        }
        c.check(self.lattice.fit_from >= 1, "lattice.fit_from", "fit_from >= 1");
        c.check(
            !(self.lattice.shift == ShiftName::General),
            "lattice.shift",
            "shift in {standard, flipflop}",
        );

        let t = &self.trap;
        c.library(t.cell().validate(), "trap", "dx");
        c.check(t.hold_coin >= 0.0, "trap.hold_coin", "hold_coin >= 0");
        c.check(t.hold_shift >= 0.0, "trap.hold_shift", "hold_shift >= 0");
        c.check(t.a_min > 0.0 && t.a_min < t.a_max, "trap.a_min", "0 < a_min < a_max");
        c.check(t.t_r >= 0.0, "trap.t_r", "t_r >= 0");
        if t.ramp == RampName::Beta {
            c.check(t.ramp_a >= 1.0, "trap.ramp_a", "ramp_a >= 1");
            c.check(t.ramp_b >= 1.0, "trap.ramp_b", "ramp_b >= 1");
        }

        let p = &self.physical;
        c.check(
            p.n_traps >= 2 && p.n_traps % 2 == 0,
            "physical.n_traps",
            "an even n_traps >= 2",
        );
        c.check(p.levels >= 1, "physical.levels", "levels >= 1");
        c.check(p.initial_level < p.levels, "physical.initial_level", "initial_level < levels");
        c.check(p.shake_amplitude >= 0.0, "physical.shake_amplitude", "shake_amplitude >= 0");
        c.check(p.fit_from >= 1, "physical.fit_from", "fit_from >= 1");
        c.check(p.shake_omega > 0.0, "physical.shake_omega", "shake_omega > 0");
        c.check(
            p.max_leakage > 0.0 && p.max_leakage <= 1.0,
            "physical.max_leakage",
            "0 < max_leakage <= 1",
        );

        let th = &self.thermal;
        if let Some(b) = th.beta {
            c.check(b > 0.0, "thermal.beta", "beta > 0");
        } else {
            c.check(
                th.ground_population > 0.0 && th.ground_population < 1.0,
                "thermal.ground_population",
                "0 < ground_population < 1",
            );
        }
        c.check(
            th.truncation > 0.0 && th.truncation <= 1.0,
            "thermal.truncation",
            "0 < truncation <= 1",
        );
        c.check(th.omega_si > 0.0, "thermal.omega_si", "omega_si > 0");
        c.check(
            Species::parse(&th.species).is_some(),
            "thermal.species",
            "one of Rb87, Rb85, Cs133, Na23, Li7",
        );
        c.check(
            th.max_leakage > 0.0 && th.max_leakage <= 1.0,
            "thermal.max_leakage",
            "0 < max_leakage <= 1",
        );

        let s = &self.shake;
        c.check(!s.amplitudes.is_empty(), "shake.amplitudes", "at least one amplitude");
        c.check(
            s.amplitudes.iter().all(|a| *a >= 0.0 && a.is_finite()),
            "shake.amplitudes",
            "every amplitude >= 0",
        );
        c.check(s.omega > 0.0, "shake.omega", "omega > 0");
        c.check(s.realizations >= 1, "shake.realizations", "realizations >= 1");
        c.check(s.bins >= 1, "shake.bins", "bins >= 1");
        c.check(s.levels >= 1, "shake.levels", "levels >= 1");

        let d = &self.decohere;
        c.check(!d.probabilities.is_empty(), "decohere.probabilities", "at least one probability");
        c.check(
            d.probabilities.iter().all(|p| (0.0..=1.0).contains(p)),
            "decohere.probabilities",
            "every probability in [0, 1]",
        );
        c.check(d.trajectories >= 1, "decohere.trajectories", "trajectories >= 1");
        c.check(
            d.scattering_rates.iter().all(|r| *r >= 0.0),
            "decohere.scattering_rates",
            "every rate >= 0",
        );
        c.check(d.omega_si > 0.0, "decohere.omega_si", "omega_si > 0");
        c.check(d.step_time_factor >= 0.0, "decohere.step_time_factor", "step_time_factor >= 0");

        let se = &self.search;
        c.check(
            se.marked.is_empty() || se.marked.len() == 2,
            "search.marked",
            "[] or [k, l]",
        );
        c.check(se.side >= 1, "search.side", "side >= 1");
        if se.side >= 1 {
            c.library(
                SearchSetup::new(se.side, se.marked_site()).map(|_| ()),
                "search",
                "marked",
            );
        }

        let ca = &self.calibrate;
        c.check(ca.t_max > 0.0, "calibrate.t_max", "t_max > 0");

        let cv = &self.convergence;
        c.check(cv.dts.len() >= 3, "convergence.dts", "at least three step sizes");
        c.check(
            cv.dts.iter().all(|dt| {
                let n = cv.t_end / dt;
                *dt > 0.0 && (n - n.round()).abs() < 1e-9
            }),
            "convergence.dts",
            "every dt > 0 dividing t_end",
        );
        c.check(cv.t_end > 0.0, "convergence.t_end", "t_end > 0");
        c.check(cv.sigma0 > 0.0, "convergence.sigma0", "sigma0 > 0");
        c.check(
            cv.spacing_dx > 0.0 && cv.spacing_dx <= 0.25,
            "convergence.spacing_dx",
            "0 < spacing_dx <= 0.25",
        );
        c.0
    }

    /// The resolved thermal specification; valid after [`Self::validate`].
    pub fn thermal_spec(&self) -> trapwalk::Result<ThermalSpec> {
        self.thermal.spec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_lines_respect_sections() {
        let text = "kind = \"physical\"\nsteps = 2\n[trap]\nsteps = 1\na_min = 70\n";
        assert_eq!(find_key_line(text, "steps"), Some(2));
        assert_eq!(find_key_line(text, "trap.a_min"), Some(5));
        assert_eq!(find_key_line(text, "trap.dx"), None);
    }

    #[test]
    fn default_sections_validate() {
        for kind in [Kind::Walk1d, Kind::Physical, Kind::Search, Kind::Convergence] {
            assert!(RunConfig::new(kind).validate().is_empty());
        }
    }
}
