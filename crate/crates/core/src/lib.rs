//! Bayesian learning of discrete causal networks.
//!
//! The crate scores candidate DAGs over categorical variables by their exact
//! Dirichlet-multinomial marginal likelihood. Data may mix passive
//! observations with cases in which some variables were set by intervention,
//! and variables may be hidden; hidden values are summed out exactly. Priors
//! for every candidate structure come from one prior network and an
//! equivalent sample size. A causal simulator produces ground-truth data
//! under any mix of interventions.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;

pub mod causal_sim;
pub mod equivalence;
pub mod error;
pub mod model;
pub mod priors;
pub mod scoring;
pub mod search;
mod special;

pub use error::{Error, Result};
pub use model::{
    Case, Cpt, Dag, Dataset, DiscreteNetwork, JointDistribution, Mode, Observation, Variable,
};
pub use priors::{PriorCounts, PriorModel};
pub use scoring::{DataCounts, HypothesisPosterior};
