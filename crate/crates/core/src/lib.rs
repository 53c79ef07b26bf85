//! Classical simulation of level-1 QAOA and recursive QAOA for MAX-k-CUT
//! on qudits.
//!
//! The level-1 state restricted to any two qudits is computed exactly from
//! their common neighbourhood, so energies and pairwise correlations cost
//! polynomial time on sparse graphs. Everything numeric is generic over
//! [`scalar::Real`] (`f32`/`f64`); classical bookkeeping also works with
//! exact integer couplings.
//!
//! ```
//! use qudit_qaoa::{Graph, Hamiltonian64, GridSearch, AngleOptimizer};
//!
//! let g = Graph::complete(3);
//! let h = Hamiltonian64::from_graph(&g, 3).unwrap();
//! let best = GridSearch::default().optimize(&h).unwrap();
//! assert!(best.energy > 2.0);
//! ```

pub mod baselines;
pub mod engine;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod hamiltonian;
pub mod io;
pub mod linalg;
pub mod optimizer;
pub mod oracle;
pub mod poly;
pub mod rqaoa;
pub mod scalar;

pub use engine::{Angles, Qaoa1};
pub use error::{Error, Result};
pub use graph::{generate_ensemble_graph, EnsembleConfig, Graph};
pub use hamiltonian::{Coloring, CostHamiltonian, FourierTables};
pub use optimizer::{AngleOptimizer, AutoOptimizer, GridSearch, LocalSearch, Optimized};
pub use rqaoa::{ConstraintRecord, RqaoaOutcome};

pub type Hamiltonian64 = CostHamiltonian<f64>;
pub type Hamiltonian32 = CostHamiltonian<f32>;
/// Exact integer couplings, for elimination bookkeeping and optima.
pub type IntHamiltonian = CostHamiltonian<i64>;
pub type Angles64 = Angles<f64>;
pub type Qaoa1f64<'h> = Qaoa1<'h, f64>;
