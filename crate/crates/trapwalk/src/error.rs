use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not unitary: max |U†U - I| = {0:.3e}")]
    NotUnitary(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("parameter `{name}` out of range: {value} ({constraint})")]
    OutOfRange {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("site ({k}, {l}) lies outside the grid")]
    OutsideGrid { k: i64, l: i64 },
    #[error("requested {requested} bound states, only {available} available")]
    TooManyLevels { requested: usize, available: usize },
    #[error("eigensolver did not converge")]
    NoConvergence,
    #[error("population {population:.3e} reached the grid boundary (limit {limit:.0e})")]
    Boundary { population: f64, limit: f64 },
    #[error("leakage {leakage:.3e} exceeds bound {bound}")]
    Leakage { leakage: f64, bound: f64 },
    #[error("target unreachable: no hold time up to {t_max} reaches fidelity {threshold}")]
    Unreachable { t_max: f64, threshold: f64 },
    #[error("thermal truncation needs weight {threshold}, levels supplied reach {reached:.6}")]
    Truncation { threshold: f64, reached: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
}
