//! Exact Weil-model equivariant de Rham computations and differential
//! equivariant cochains on finite models.

pub mod exactlin;
pub mod gca;
pub mod liealg;
pub mod gstar;
pub mod chern;
pub mod diffcoh;
pub mod modelfile;
pub mod cli;
