//! Bayesian detection of meso-scale structure with a two-block stochastic
//! block model.
//!
//! Given a simple undirected graph, [`sampler::run_chain`] draws from the
//! joint posterior of node labels and block edge probabilities
//! `(p11, p12, p22)`. [`inference`] turns those draws into posterior
//! probabilities of assortative communities, disassortative communities and
//! core-periphery structure, along with label and density uncertainty.

pub mod cli;
pub mod datasets;
pub mod error;
pub mod graph;
pub mod inference;
pub mod model;
pub mod sampler;
pub mod synth;

pub use error::{Error, Result};
