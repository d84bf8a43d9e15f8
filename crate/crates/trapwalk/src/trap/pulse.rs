use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::beta::beta_reg;

use crate::trap::grid::SimGrid;
use crate::trap::potential::{fill, PotentialForm};
use crate::trap::propagate::SplitStep;
use crate::walk::PulseKind;
use crate::{Error, Result, C64};

pub const DEFAULT_A_MAX: f64 = 60.0;
pub const DEFAULT_A_MIN: f64 = 28.8;
pub const DEFAULT_T_R: f64 = 100.0;
pub const DEFAULT_DX: f64 = 0.2;
pub const DEFAULT_DT: f64 = 0.005;
pub const DEFAULT_MARGIN: f64 = 10.0;
pub const DEFAULT_OMEGA_SHAKE: f64 = 0.01;

/// Normalized approach profile s(τ), rising from 0 at τ = 0 to 1 at τ = 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RampShape {
    /// 3τ² − 2τ³
    Smoothstep,
    /// Regularized incomplete beta function I_τ(a, b); the velocity profile
    /// is τ^(a−1)(1−τ)^(b−1). (2, 2) is smoothstep.
    Beta {
        a: f64,
        b: f64,
    },
    Linear,
}

impl Default for RampShape {
    fn default() -> Self {
        RampShape::Beta { a: 2.5, b: 8.0 }
    }
}

impl RampShape {
    pub fn progress(&self, tau: f64) -> f64 {
        let t = tau.clamp(0.0, 1.0);
        match *self {
            RampShape::Smoothstep => t * t * (3.0 - 2.0 * t),
            RampShape::Linear => t,
            RampShape::Beta { a, b } => {
                if t == 0.0 {
                    0.0
                } else if t == 1.0 {
                    1.0
                } else {
                    beta_reg(a, b, t)
                }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let RampShape::Beta { a, b } = *self {
            if !(a >= 1.0) || !(b >= 1.0) {
                return Err(Error::Invalid(format!(
                    "beta ramp needs a, b >= 1 (got {a}, {b})"
                )));
            }
        }
        Ok(())
    }
}

/// Approach, hold and separate; the separation is the time mirror of the
/// approach. Separations are center-to-center distances.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PulseSchedule {
    pub a_max: f64,
    pub a_min: f64,
    pub t_r: f64,
    pub t_i: f64,
    pub ramp: RampShape,
}

impl PulseSchedule {
    pub fn new(a_max: f64, a_min: f64, t_r: f64, t_i: f64, ramp: RampShape) -> Result<Self> {
        if !(a_min < a_max) || !(a_min > 0.0) {
            return Err(Error::Invalid(format!(
                "need 0 < a_min < a_max (got {a_min}, {a_max})"
            )));
        }
        if !(t_r >= 0.0) || !(t_i >= 0.0) {
            return Err(Error::Invalid("ramp and hold times must be >= 0".into()));
        }
        ramp.validate()?;
        Ok(Self {
            a_max,
            a_min,
            t_r,
            t_i,
            ramp,
        })
    }

    /// Default geometry and ramp with hold time `t_i`.
    pub fn standard(t_i: f64) -> Self {
        Self {
            a_max: DEFAULT_A_MAX,
            a_min: DEFAULT_A_MIN,
            t_r: DEFAULT_T_R,
            t_i,
            ramp: RampShape::default(),
        }
    }

    pub fn with_hold(&self, t_i: f64) -> Self {
        Self { t_i, ..*self }
    }

    pub fn duration(&self) -> f64 {
        2.0 * self.t_r + self.t_i
    }

    /// Unperturbed separation at pulse-local time `t`.
    pub fn separation(&self, t: f64) -> f64 {
        let span = self.a_max - self.a_min;
        if t < self.t_r {
            self.a_max - span * self.ramp.progress(t / self.t_r)
        } else if t <= self.t_r + self.t_i {
            self.a_min
        } else if self.t_r == 0.0 {
            self.a_max
        } else {
            let tau = (t - self.t_r - self.t_i) / self.t_r;
            self.a_max - span * self.ramp.progress(1.0 - tau)
        }
    }

    /// 0 at full separation, 1 at closest approach.
    pub fn envelope(&self, t: f64) -> f64 {
        (self.a_max - self.separation(t)) / (self.a_max - self.a_min)
    }

    /// Greatest distance any trap moves from its rest position.
    pub fn max_excursion(&self, shake_amplitude: f64) -> f64 {
        0.5 * (self.a_max - self.a_min + shake_amplitude)
    }
}

/// Sinusoidal perturbation of the separation with a random phase per pulse.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShakingSpec {
    pub omega: f64,
    pub amplitude: f64,
    pub seed: u64,
}

impl ShakingSpec {
    pub fn new(omega: f64, amplitude: f64, seed: u64) -> Result<Self> {
        if !(amplitude >= 0.0) {
            return Err(Error::OutOfRange {
                name: "amplitude",
                value: amplitude,
                constraint: "amplitude >= 0",
            });
        }
        Ok(Self {
            omega,
            amplitude,
            seed,
        })
    }

    /// Phase stream; the n-th draw belongs to the n-th pulse.
    pub fn phases(&self) -> impl Iterator<Item = f64> {
        self.stream_phases(0)
    }

    /// Independent phase stream number `stream` for the same seed.
    pub fn stream_phases(&self, stream: u64) -> impl Iterator<Item = f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        std::iter::repeat_with(move || rng.gen_range(0.0..2.0 * PI))
    }

    pub fn realize(&self, phase: f64) -> Shake {
        Shake {
            omega: self.omega,
            amplitude: self.amplitude,
            phase,
        }
    }
}

/// Perturbation of one pulse: Δa·sin(ωt + φ) scaled by the approach envelope,
/// so the separation returns exactly to a_max between pulses.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Shake {
    pub omega: f64,
    pub amplitude: f64,
    pub phase: f64,
}

impl Shake {
    pub fn offset(&self, schedule: &PulseSchedule, t: f64) -> f64 {
        self.amplitude * (self.omega * t + self.phase).sin() * schedule.envelope(t)
    }
}

/// Rest positions of a row of traps and the side each moves toward.
#[derive(Clone, Debug, PartialEq)]
pub struct TrapLayout {
    pub rest: Vec<f64>,
    /// +1 moves right, −1 moves left while approaching.
    pub dirs: Vec<f64>,
    pub v0: f64,
    pub form: PotentialForm,
}

impl TrapLayout {
    /// Two traps at ±a_max/2 approaching each other.
    pub fn pair(a_max: f64, v0: f64, form: PotentialForm) -> Self {
        Self {
            rest: vec![-0.5 * a_max, 0.5 * a_max],
            dirs: vec![1.0, -1.0],
            v0,
            form,
        }
    }

    /// Traps `first..first+n` of a row with spacing `a_max`, moving as in a
    /// pulse of `kind` (each trap toward its partner in that pulse).
    pub fn row(
        first: i64,
        n: usize,
        a_max: f64,
        kind: PulseKind,
        v0: f64,
        form: PotentialForm,
    ) -> Self {
        let par = kind.first_parity();
        let idx = first..first + n as i64;
        Self {
            rest: idx.clone().map(|j| j as f64 * a_max).collect(),
            dirs: idx
                .map(|j| {
                    if (j - par).rem_euclid(2) == 0 {
                        1.0
                    } else {
                        -1.0
                    }
                })
                .collect(),
            v0,
            form,
        }
    }

    /// Interval swept by trap `i` during a pulse with shaking amplitude
    /// `shake_amplitude`.
    pub fn reach(&self, i: usize, schedule: &PulseSchedule, shake_amplitude: f64) -> (f64, f64) {
        let inward = 0.5 * (schedule.a_max - schedule.a_min + shake_amplitude);
        let outward = 0.5 * shake_amplitude;
        let r = self.rest[i];
        if self.dirs[i] > 0.0 {
            (r - outward, r + inward)
        } else {
            (r - inward, r + outward)
        }
    }

    pub fn centers(&self, schedule: &PulseSchedule, separation: f64, out: &mut Vec<f64>) {
        let half = 0.5 * (schedule.a_max - separation);
        out.clear();
        out.extend(self.rest.iter().zip(&self.dirs).map(|(r, d)| r + d * half));
    }
}

/// Stepper that integrates pulses on one grid; reuses FFT plans.
pub struct PulseRunner {
    grid: SimGrid,
    stepper: SplitStep,
    dt_nominal: f64,
}

/// Part of a pulse.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Segment {
    RampIn,
    Hold,
    RampOut,
}

impl PulseRunner {
    pub fn new(grid: &SimGrid) -> Self {
        Self {
            grid: grid.clone(),
            stepper: SplitStep::new(grid),
            dt_nominal: grid.dt(),
        }
    }

    pub fn grid(&self) -> &SimGrid {
        &self.grid
    }

    fn set_dt(&mut self, dt: f64) {
        if self.stepper.grid().dt() != dt {
            self.stepper = SplitStep::new(&self.grid.with_dt(dt));
        }
    }

    /// Integrates one segment of a pulse on a batch buffer.
    pub fn run_segment(
        &mut self,
        buf: &mut [C64],
        layout: &TrapLayout,
        schedule: &PulseSchedule,
        shake: Option<&Shake>,
        segment: Segment,
    ) {
        let (t0, len) = match segment {
            Segment::RampIn => (0.0, schedule.t_r),
            Segment::Hold => (schedule.t_r, schedule.t_i),
            Segment::RampOut => (schedule.t_r + schedule.t_i, schedule.t_r),
        };
        if len <= 0.0 {
            return;
        }
        let n = ((len / self.dt_nominal).round() as usize).max(1);
        self.set_dt(len / n as f64);
        let grid = self.grid.clone();
        let mut centers = Vec::with_capacity(layout.rest.len());
        let shake = shake.filter(|s| s.amplitude != 0.0);
        self.stepper.evolve(buf, t0, n, |t, v| {
            let mut d = schedule.separation(t);
            if let Some(s) = shake {
                d += s.offset(schedule, t);
            }
            layout.centers(schedule, d, &mut centers);
            fill(&grid, &centers, layout.v0, layout.form, v);
        });
    }

    /// Integrates a full pulse: ramp in, hold, ramp out.
    pub fn run_pulse(
        &mut self,
        buf: &mut [C64],
        layout: &TrapLayout,
        schedule: &PulseSchedule,
        shake: Option<&Shake>,
    ) {
        for seg in [Segment::RampIn, Segment::Hold, Segment::RampOut] {
            self.run_segment(buf, layout, schedule, shake, seg);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ramp_shapes() {
        let s = RampShape::Beta { a: 2.0, b: 2.0 };
        for i in 0..=10 {
            let t = i as f64 / 10.0;
            assert!((s.progress(t) - RampShape::Smoothstep.progress(t)).abs() < 1e-12);
        }
        assert!(RampShape::Beta { a: 0.5, b: 2.0 }.validate().is_err());
    }

    #[test]
    fn schedule_is_continuous() {
        let p = PulseSchedule::standard(20.0);
        assert_eq!(p.separation(0.0), 60.0);
        assert!((p.separation(100.0) - 28.8).abs() < 1e-12);
        assert!((p.separation(120.0) - 28.8).abs() < 1e-12);
        assert!((p.separation(220.0) - 60.0).abs() < 1e-12);
        let mut prev = p.separation(0.0);
        for i in 1..=2200 {
            let d = p.separation(i as f64 * 0.1);
            assert!((d - prev).abs() < 0.2);
            prev = d;
        }
        assert!(PulseSchedule::new(20.0, 30.0, 1.0, 1.0, RampShape::Linear).is_err());
    }

    #[test]
    fn row_directions() {
        let c = TrapLayout::row(
            0,
            4,
            60.0,
            PulseKind::Coin,
            200.0,
            PotentialForm::SumGaussian,
        );
        assert_eq!(c.dirs, vec![1.0, -1.0, 1.0, -1.0]);
        let s = TrapLayout::row(
            0,
            4,
            60.0,
            PulseKind::Shift,
            200.0,
            PotentialForm::SumGaussian,
        );
        assert_eq!(s.dirs, vec![-1.0, 1.0, -1.0, 1.0]);
    }

    #[test]
    fn shake_phases_are_seeded() {
        let a: Vec<f64> = ShakingSpec::new(0.01, 0.1, 5)
            .unwrap()
            .phases()
            .take(4)
            .collect();
        let b: Vec<f64> = ShakingSpec::new(0.01, 0.1, 5)
            .unwrap()
            .phases()
            .take(4)
            .collect();
        assert_eq!(a, b);
        assert!(a.iter().all(|&p| (0.0..2.0 * PI).contains(&p)));
        assert!(ShakingSpec::new(0.01, -0.1, 5).is_err());
    }
}
