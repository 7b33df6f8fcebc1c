pub mod cg;
pub mod eval;
pub mod gen;
pub mod label;
pub mod solve;
pub mod train;
