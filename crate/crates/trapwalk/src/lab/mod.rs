//! Experiments composing the walk and trap engines.

pub mod budget;
pub mod reduce;
pub mod search;
pub mod sweep;
pub mod thermal;

pub use budget::{decoherence_budget, Budget};
pub use search::{search_experiment, SearchResult};
pub use reduce::{cell_reduce_and_walk, CellReducer, RowRecord, WalkPulses};
pub use thermal::{
    boltzmann_weights, mean_quanta, temperature_mapping, thermal_average, Species, Temperature, ThermalSpec,
};
pub use sweep::{
    decoherence_sweep, interior_minimum, shaking_sweep, DecoherenceSweep, ShakeSweep, StepMetrics, SweepPoint, SweepResult,
};
