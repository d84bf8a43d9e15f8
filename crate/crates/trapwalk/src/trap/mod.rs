//! Continuous-space dynamics of moving Gaussian traps.
//!
//! A pulse brings two traps from separation `a_max` to `a_min`, holds them
//! for `t_i` and separates them again. Tunneling during the pulse acts as a
//! coin (within a qubit) or as a shift (between qubits).

pub mod calibrate;
pub mod cell;
pub mod eigen;
pub mod fit;
pub mod grid;
pub mod line;
pub mod potential;
pub mod propagate;
pub mod pulse;
pub mod study;

pub use calibrate::{calibrate_hold_time, Calibration, HoldScan, PulseTarget, HOLD_PI, HOLD_PI_OVER_2};
pub use cell::{
    extract_effective_unitary, extract_window, propagate_window, CellSpec, EffectiveUnitary,
    LocalizedBasis, Window,
};
pub use eigen::{eigenstates, VibrationalBasis};
pub use fit::{fidelity, fit_coin_params, fit_shift_params, nearest_unitary};
pub use grid::{SimGrid, WaveFunction};
pub use line::{ground_state_population, run_walk_line, LineRecord, LineSpec};
pub use potential::{potential, GaussianTrap, PotentialForm};
pub use propagate::SplitStep;
pub use pulse::{PulseRunner, PulseSchedule, RampShape, Segment, Shake, ShakingSpec, TrapLayout};
