//! Instance generators, exact oracles for small instances, training-set
//! construction and evaluation metrics.

pub mod dataset;
pub mod generate;
pub mod metrics;
pub mod oracle;

pub use dataset::{build_training_set, Labeled};
pub use generate::{gen_ba, gen_er, gen_op, gen_tsp, vertex_weight, PrizeScheme};
pub use metrics::{average_precision, primal_gap};
pub use oracle::{exact_mwcp, exact_op, exact_tsp, MWCP_MAX_N, OP_MAX_N, TSP_MAX_N};
