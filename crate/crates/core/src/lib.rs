//! Maximum clique search that splits a graph into k-core subproblems and
//! hands the small ones to a size-limited annealing device.

pub mod backend;
pub mod cli;
pub mod clique;
pub mod coloring;
pub mod graph;
pub mod kcore;
pub mod orchestrator;
pub mod qubo;

#[cfg(test)]
mod oracle;
