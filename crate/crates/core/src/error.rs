use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "failed to generate a {d}-regular bipartite graph with parts {part_a}:{part_b} \
         after {attempts} attempts"
    )]
    BipartiteGenerationFailed {
        part_a: usize,
        part_b: usize,
        d: usize,
        attempts: usize,
    },

    #[error("failed to generate a connected graph with a triangle (n={n}, d={d}) after {attempts} attempts")]
    EnsembleGenerationFailed { n: usize, d: usize, attempts: usize },

    #[error("graph does not carry the planted 3-colorable tag; use the brute-force oracle")]
    NotEnsembleGraph,

    #[error("coloring does not assign a color to active qudit {0}")]
    MissingColor(usize),

    #[error("qudit {0} is not active in this Hamiltonian")]
    InactiveQudit(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("Hamiltonian has no couplings left; finish by brute force")]
    NoCouplings,

    #[error("search space of {size} assignments exceeds the budget of {budget}")]
    BudgetExceeded { size: f64, budget: f64 },

    #[error("corrupted elimination trail: survivor {survivor} unassigned when reconstructing {eliminated}")]
    CorruptTrail { eliminated: usize, survivor: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
