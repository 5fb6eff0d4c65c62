//! Exact and sampled evaluation of connection probabilities in finite
//! percolation graphs, checkers for correlation inequalities between them,
//! and counterexample search.

pub mod checkers;
pub mod engine;
pub mod error;
pub mod event;
pub mod graph;
pub mod montecarlo;
pub mod num;
pub mod search;

pub use engine::{EdgePolynomial, Engine, PatternTable, PhiTable};
pub use error::{Error, Result};
pub use event::{EventExpr, NumExpr};
pub use graph::{Configuration, Edge, TerminalSpec, VertexId, WeightedGraph};
pub use num::{Mode, Num, Prob};
