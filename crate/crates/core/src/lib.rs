//! Fractional tight-cycle decompositions of k-uniform hypergraphs.
//!
//! The pipeline samples a random regular transition system, puts uniform
//! weight on the compatible ℓ-cycles, balances the per-edge deviations with an
//! explicit flow on the disjointness digraph, and realises that flow with
//! transporters (closed walks whose spliced cycles move weight between two
//! disjoint edges). Every quantity on a verification path is an exact rational.
//!
//! Module map:
//!
//! - [`hypergraph`]: the k-graph model, codegrees, links and generators
//! - [`walks`]: walks, tight cycles, walk counting and connectivity
//! - [`transitions`]: transition systems and the compatibility digraph
//! - [`markov`]: exact finite Markov chains and the mixing bound
//! - [`transport`]: the flow-balancing construction
//! - [`transporter`]: transporters and weight shifting
//! - [`decomposer`]: the end-to-end pipeline, verification and an LP oracle

pub mod decomposer;
pub mod error;
pub mod hypergraph;
pub mod markov;
pub mod rational;
pub mod transitions;
pub mod transport;
pub mod transporter;
pub mod walks;

pub use decomposer::{
    adjust, average_decompositions, edge_deviation, example_structure_check, initial_weights,
    lp_oracle, verify, DecompositionReport, OracleOutcome, PipelineConfig, SystemChoice,
    WeightFunction,
};
pub use error::{Error, Result};
pub use hypergraph::{Hypergraph, LabeledExample, Vertex};
pub use markov::FiniteChain;
pub use rational::Rational;
pub use transitions::{CompatibilityDigraph, TransitionSystem};
pub use transport::{BalancedFlow, WeightedDigraph};
pub use transporter::Transporter;
pub use walks::{OrderedEdges, TightCycle, Walk};
