//! Column generation for the LP relaxation of graph colouring as set
//! covering, with a learned sampler as heuristic pricer.

pub mod cg;
pub mod master;
pub mod pricing;
pub mod simplex;

pub use cg::{
    all_maximal_independent_sets, cg_loop, cg_loop_with_trace, harvest_pricing_instances, init_columns, CgConfig,
    CgOutcome, CgRecord, CgTrace, PricingModel, CG_TRACE_HEADER,
};
pub use master::{MisColumn, RestrictedMaster, RmpSolution};
pub use pricing::{price_exact, price_heuristic, reduced_cost, HeuristicParams, PricerKind, PricingResult};
pub use simplex::{Cmp, LinearProgram, LpSolution};
