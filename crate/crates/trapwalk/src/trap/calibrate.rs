use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::DMatrix;

use crate::trap::cell::{CellSpec, Window};
use crate::trap::eigen::eigenstates_of;
use crate::trap::fit::fidelity;
use crate::trap::potential::fill;
use crate::trap::pulse::{PulseRunner, PulseSchedule, Segment};
use crate::{Error, Result, C64};

/// Target operation of a tunneling pulse.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PulseTarget {
    /// Full population exchange, [[0, i], [i, 0]].
    Pi,
    /// Balanced splitting, [[1, i], [i, 1]]/√2.
    PiOver2,
}

impl PulseTarget {
    pub fn matrix(self) -> DMatrix<C64> {
        let (c, s) = match self {
            PulseTarget::Pi => (0.0, 1.0),
            PulseTarget::PiOver2 => (FRAC_1_SQRT_2, FRAC_1_SQRT_2),
        };
        DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(c, 0.0),
                C64::new(0.0, s),
                C64::new(0.0, s),
                C64::new(c, 0.0),
            ],
        )
    }

    /// Calibrated hold time under the default cell and ramp.
    pub fn default_hold(self) -> f64 {
        match self {
            PulseTarget::Pi => HOLD_PI,
            PulseTarget::PiOver2 => HOLD_PI_OVER_2,
        }
    }

    pub fn theta(self) -> f64 {
        match self {
            PulseTarget::Pi => PI,
            PulseTarget::PiOver2 => PI / 2.0,
        }
    }
}

/// Minimum fidelity of a calibrated pulse.
pub const CALIBRATION_FIDELITY: f64 = 0.99;

/// Calibrated hold time of the default π/2 pulse (fidelity 0.99928).
pub const HOLD_PI_OVER_2: f64 = 19.6375;
/// Calibrated hold time of the default π pulse (fidelity 0.99088).
pub const HOLD_PI: f64 = 121.7366;

/// Hold-time dependence of one level's 2×2 block, factorized through the
/// eigenstates of the static closest-approach Hamiltonian:
/// U(t_i) = R_out · diag(e^{−iE t_i}) · R_in.
pub struct HoldScan {
    energies: Vec<f64>,
    r_in: DMatrix<C64>,
    r_out: DMatrix<C64>,
    /// Population of the ramped-in states outside the retained eigenstates.
    pub truncation: f64,
}

impl HoldScan {
    pub fn new(spec: &CellSpec, schedule: &PulseSchedule, level: usize) -> Result<Self> {
        let window = Window::pair(spec, schedule)?;
        let grid = &window.grid;
        let basis = window.basis(level + 1)?;
        let n = grid.len();

        let mut centers = Vec::new();
        window
            .layout
            .centers(schedule, schedule.a_min, &mut centers);
        let mut v = vec![0.0; n];
        fill(grid, &centers, window.layout.v0, window.layout.form, &mut v);
        let k = (4 * (level + 1) + 12).min(n / 4);
        let eig = eigenstates_of(grid, &v, k)?;

        let mut runner = PulseRunner::new(grid);
        let cols = [2 * level, 2 * level + 1];
        let mut buf = vec![C64::new(0.0, 0.0); 2 * n];
        for (c, &idx) in cols.iter().enumerate() {
            let (slot, lv) = window.slot_of(idx);
            for (z, &x) in buf[c * n..(c + 1) * n]
                .iter_mut()
                .zip(basis.state(slot, lv))
            {
                *z = C64::new(x, 0.0);
            }
        }
        runner.run_segment(&mut buf, &window.layout, schedule, None, Segment::RampIn);
        let dx = grid.dx();
        let r_in = DMatrix::from_fn(k, 2, |r, c| {
            eig.states[r]
                .iter()
                .zip(&buf[c * n..(c + 1) * n])
                .map(|(&a, z)| z * a)
                .sum::<C64>()
                * dx
        });
        let truncation = (0..2)
            .map(|c| 1.0 - r_in.column(c).iter().map(|z| z.norm_sqr()).sum::<f64>())
            .fold(0.0, f64::max);

        let mut buf = vec![C64::new(0.0, 0.0); k * n];
        for (c, s) in eig.states.iter().enumerate() {
            for (z, &x) in buf[c * n..(c + 1) * n].iter_mut().zip(s) {
                *z = C64::new(x, 0.0);
            }
        }
        runner.run_segment(&mut buf, &window.layout, schedule, None, Segment::RampOut);
        let r_out = DMatrix::from_fn(2, k, |r, c| {
            let (slot, lv) = window.slot_of(cols[r]);
            basis.project(slot, lv, &buf[c * n..(c + 1) * n], dx)
        });
        Ok(Self {
            energies: eig.energies,
            r_in,
            r_out,
            truncation,
        })
    }

    /// 2×2 block for hold time `t_i`.
    pub fn block(&self, t_i: f64) -> DMatrix<C64> {
        let e0 = self.energies[0];
        let mut mid = self.r_in.clone();
        for (r, e) in self.energies.iter().enumerate() {
            let ph = C64::from_polar(1.0, -(e - e0) * t_i);
            for c in 0..2 {
                mid[(r, c)] *= ph;
            }
        }
        &self.r_out * mid
    }
}

/// Result of a hold-time calibration.
#[derive(Clone, Debug, PartialEq)]
pub struct Calibration {
    pub t_i: f64,
    pub fidelity: f64,
    /// Scan rows (t_i, transfer probability left → right, fidelity).
    pub scan: Vec<(f64, f64, f64)>,
}

/// Scan resolution for the hold time.
pub const SCAN_STEP: f64 = 0.25;

/// Smallest hold time whose level block reaches the target with fidelity at
/// least [`CALIBRATION_FIDELITY`]: the first local fidelity maximum above the
/// threshold, refined by golden-section search.
pub fn calibrate_hold_time(
    spec: &CellSpec,
    schedule: &PulseSchedule,
    target: PulseTarget,
    level: usize,
    t_max: f64,
) -> Result<Calibration> {
    let scan = HoldScan::new(spec, schedule, level)?;
    let tm = target.matrix();
    let f = |t: f64| fidelity(&tm, &scan.block(t));
    let steps = (t_max / SCAN_STEP).floor() as usize;
    let rows: Vec<(f64, f64, f64)> = (0..=steps)
        .map(|i| {
            let t = i as f64 * SCAN_STEP;
            let b = scan.block(t);
            (t, b[(0, 1)].norm_sqr(), fidelity(&tm, &b))
        })
        .collect();
    let mut found = None;
    for i in 0..rows.len() {
        let here = rows[i].2;
        let left = if i > 0 {
            rows[i - 1].2
        } else {
            f64::NEG_INFINITY
        };
        let right = rows.get(i + 1).map_or(f64::NEG_INFINITY, |r| r.2);
        if here >= CALIBRATION_FIDELITY && here >= left && here >= right {
            found = Some(i);
            break;
        }
    }
    let Some(i) = found else {
        return Err(Error::Unreachable {
            t_max,
            threshold: CALIBRATION_FIDELITY,
        });
    };
    let lo = (rows[i].0 - SCAN_STEP).max(0.0);
    let hi = (rows[i].0 + SCAN_STEP).min(t_max);
    let t = golden_max(&f, lo, hi, 1e-6);
    Ok(Calibration {
        t_i: t,
        fidelity: f(t),
        scan: rows,
    })
}

fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}
