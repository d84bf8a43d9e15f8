//! Exact coined quantum walks on the line and the square lattice.

pub mod brickwork;
pub mod coin;
pub mod decoherence;
pub mod lattice;
pub mod line;
pub mod metrics;

pub use brickwork::{Block, PulseKind, Slot, TrapRow};
pub use coin::CoinOp;
pub use decoherence::{decohere_evolve, DecoherenceModel, EnsembleSnapshot, Target};
pub use lattice::{search_step, SearchSetup, WalkState2D};
pub use line::{GeneralShiftParams, Shift1D, WalkState1D};
pub use metrics::{
    l1_distance, position_distribution, qubit_distribution, scaling_exponent,
    total_variational_distance, uniform_reference, variance, Distribution,
};

use crate::Result;

/// Position distributions after every step 1..=steps of a unitary walk.
pub fn evolve_1d(
    state: &WalkState1D,
    coin: &CoinOp,
    shift: Shift1D,
    steps: usize,
) -> Result<Vec<Distribution>> {
    let mut s = state.clone();
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        s.step(coin, shift)?;
        out.push(position_distribution(&s));
    }
    Ok(out)
}
