//! Exact toolkit for measurement scenarios, no-signalling empirical models
//! and their macroscopic averages.
//!
//! The crate is organised bottom-up:
//!
//! * [`lp`]: exact-rational simplex with witnesses and Farkas certificates.
//! * [`complex`]: abstract simplicial complexes, joins, Graham reduction,
//!   semiregularisation and quotients by vertex partitions.
//! * [`scenario`]: measurement scenarios, the multipartite family
//!   `Σ(n, k, r)` with its site symmetry, and the acyclicity predicate.
//! * [`model`]: empirical models with exact probabilities, averaging along a
//!   symmetry and the standard boxes.
//! * [`locality`]: global extensions, Bell functionals, no-signalling optima
//!   and monogamy relations.
//! * [`doc`]: the JSON document formats shared with the command line tool.

pub mod complex;
pub mod doc;
pub mod error;
pub mod locality;
pub mod lp;
pub mod model;
pub mod rational;
pub mod scenario;

pub use complex::{ReductionStep, ReductionTrace, SimplicialComplex, VertexPartition};
pub use error::{Error, Result};
pub use locality::{BellFunctional, GlobalDistribution, MonogamyReport};
pub use lp::{LinearProgram, LpOutcome};
pub use model::{Assignment, ContextDistribution, EmpiricalModel, FloatModel};
pub use rational::Rational;
pub use scenario::{MultipartiteSpec, Scenario, SiteSymmetry};
