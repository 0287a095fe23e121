use crate::direction::DirectionTraceEntry;
use crate::minnorm::MinNormSolution;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    Dimension {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("non-finite {what} from objective `{objective}` at {point:?}")]
    NonFiniteOracle {
        objective: String,
        what: &'static str,
        point: Vec<f64>,
    },

    #[error("non-finite input to {0}")]
    NonFiniteInput(&'static str),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("min-norm solver did not reach tolerance after {iterations} iterations (gap {gap:e})")]
    MinNormConvergence {
        iterations: usize,
        gap: f64,
        best: Box<MinNormSolution>,
    },

    /// The bisection of the subgradient search ran out of probes without
    /// finding a subgradient that separates the direction.
    #[error("subgradient bisection for objective {objective} stalled at t = {t:e}")]
    BisectionStall {
        objective: usize,
        t: f64,
        last_subgradient: Vec<f64>,
    },

    /// Direction computation exceeded its loop guard. Finite termination is
    /// guaranteed for locally Lipschitz objectives, so this points at a broken
    /// oracle or tolerance.
    #[error("descent direction search did not terminate within {iterations} passes")]
    DirectionNontermination {
        iterations: usize,
        trace: Vec<DirectionTraceEntry>,
    },

    /// Even the floor step `eps / ||v||` failed sufficient decrease, so the
    /// direction handed to the line search was not acceptable.
    #[error("line search contract violated for objective {objective}: step {step:e} gives no sufficient decrease")]
    ArmijoContract { objective: usize, step: f64 },

    #[error("selection removed every box; the root box may not contain the attractor")]
    EmptyCover,

    #[error("unknown problem `{0}`")]
    UnknownProblem(String),
}
