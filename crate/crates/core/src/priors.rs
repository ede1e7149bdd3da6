//! Dirichlet exponents for candidate structures.
//!
//! Exponents come either from one prior network and an equivalent sample
//! size, `N'_ijk = N' * p(x_i = k, Pa(x_i) = j)` with the probability read off
//! the prior network's joint, or from a constant fill for uninformative
//! priors. Either way an exponent row depends only on the child and its
//! parent set, so families shared by two structures get identical rows.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{joint_from_network, state_space_size, Dag, DiscreteNetwork, JointDistribution};

/// Default exponent for uninformative priors.
pub const DEFAULT_EPSILON: f64 = 1e-4;

/// A per-family table indexed by parent configuration `j` and child state `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Family<T> {
    child: usize,
    parents: Vec<usize>,
    arity: usize,
    values: Vec<T>,
}

impl<T: Copy> Family<T> {
    pub(crate) fn new(child: usize, parents: Vec<usize>, arity: usize, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len() % arity, 0);
        Family {
            child,
            parents,
            arity,
            values,
        }
    }

    pub fn child(&self) -> usize {
        self.child
    }

    /// Parents in the structure's order (ascending node index).
    pub fn parents(&self) -> &[usize] {
        &self.parents
    }

    /// Number of child states `r_i`.
    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Number of parent configurations `q_i`.
    pub fn configs(&self) -> usize {
        self.values.len() / self.arity
    }

    pub fn row(&self, j: usize) -> &[T] {
        &self.values[j * self.arity..(j + 1) * self.arity]
    }

    pub fn get(&self, j: usize, k: usize) -> T {
        self.values[j * self.arity + k]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub(crate) fn same_index(&self, other: &Family<impl Copy>) -> bool {
        self.child == other.child
            && self.parents == other.parents
            && self.arity == other.arity
            && self.values.len() == other.values.len()
    }
}

impl Family<f64> {
    /// `N'_ij`.
    pub fn row_sum(&self, j: usize) -> f64 {
        self.row(j).iter().sum()
    }
}

/// Dirichlet exponents `N'_ijk` for every family of one structure.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorCounts {
    families: Vec<Family<f64>>,
}

impl PriorCounts {
    pub fn new(families: Vec<Family<f64>>) -> Self {
        PriorCounts { families }
    }

    pub fn families(&self) -> &[Family<f64>] {
        &self.families
    }

    pub fn family(&self, node: usize) -> &Family<f64> {
        &self.families[node]
    }

    /// `N'_ijk`.
    pub fn get(&self, node: usize, j: usize, k: usize) -> f64 {
        self.families[node].get(j, k)
    }

    /// `N'_ij`.
    pub fn row_sum(&self, node: usize, j: usize) -> f64 {
        self.families[node].row_sum(j)
    }

    /// Rows `(variable index, j, k, N'_ijk)` in index order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, usize, f64)> + '_ {
        self.families.iter().enumerate().flat_map(|(i, f)| {
            f.values()
                .iter()
                .enumerate()
                .map(move |(idx, &v)| (i, idx / f.arity(), idx % f.arity(), v))
        })
    }
}

/// Source of family priors, shared across every structure scored in a run.
#[derive(Debug, Clone)]
pub enum PriorModel {
    /// Exponents from a prior network's joint and an equivalent sample size.
    PriorNetwork {
        names: Vec<String>,
        joint: JointDistribution,
        ess: f64,
    },
    /// Every exponent equal to `epsilon`.
    Uninformative {
        names: Vec<String>,
        arities: Vec<usize>,
        epsilon: f64,
    },
}

impl PriorModel {
    pub fn from_prior_network(net: &DiscreteNetwork, ess: f64, cap: u128) -> Result<Self> {
        if !(ess > 0.0 && ess.is_finite()) {
            return Err(Error::NonPositive {
                what: "equivalent sample size",
                value: ess,
            });
        }
        let joint = joint_from_network(net, cap)?;
        let names = net.variables().iter().map(|v| v.name().into()).collect();
        Ok(PriorModel::PriorNetwork { names, joint, ess })
    }

    pub fn uninformative(names: Vec<String>, arities: Vec<usize>, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::NonPositive {
                what: "epsilon",
                value: epsilon,
            });
        }
        if names.len() != arities.len() {
            return Err(Error::VariableMismatch(format!(
                "{} names but {} arities",
                names.len(),
                arities.len()
            )));
        }
        Ok(PriorModel::Uninformative {
            names,
            arities,
            epsilon,
        })
    }

    pub fn names(&self) -> &[String] {
        match self {
            PriorModel::PriorNetwork { names, .. } | PriorModel::Uninformative { names, .. } => {
                names
            }
        }
    }

    pub fn arities(&self) -> &[usize] {
        match self {
            PriorModel::PriorNetwork { joint, .. } => joint.arities(),
            PriorModel::Uninformative { arities, .. } => arities,
        }
    }

    /// Exponents for `child` given `parents` (listed in the order used to
    /// index configurations).
    pub fn family(&self, child: usize, parents: &[usize]) -> Family<f64> {
        let arities = self.arities();
        let r = arities[child];
        match self {
            PriorModel::PriorNetwork { joint, ess, .. } => {
                let mut vars = parents.to_vec();
                vars.push(child);
                let mut values = joint.marginal(&vars);
                values.iter_mut().for_each(|p| *p *= ess);
                Family::new(child, parents.to_vec(), r, values)
            }
            PriorModel::Uninformative { epsilon, .. } => {
                let q: usize = parents.iter().map(|&p| arities[p]).product();
                Family::new(child, parents.to_vec(), r, vec![*epsilon; q * r])
            }
        }
    }

    /// Checks that `structure` is over this model's variables, in order.
    pub fn check_structure(&self, structure: &Dag) -> Result<()> {
        let names = self.names();
        if structure.nodes() != names {
            return Err(Error::VariableMismatch(format!(
                "structure over [{}] but priors over [{}]",
                structure.nodes().join(", "),
                names.join(", ")
            )));
        }
        Ok(())
    }

    pub fn for_structure(&self, structure: &Dag) -> Result<PriorCounts> {
        self.check_structure(structure)?;
        Ok(PriorCounts::new(
            (0..structure.len())
                .map(|i| self.family(i, structure.parents(i)))
                .collect(),
        ))
    }
}

/// Exponents for `structure` from `prior_net` with equivalent sample size `ess`.
pub fn dirichlet_prior_from_prior_network(
    prior_net: &DiscreteNetwork,
    ess: f64,
    structure: &Dag,
    cap: u128,
) -> Result<PriorCounts> {
    PriorModel::from_prior_network(prior_net, ess, cap)?.for_structure(structure)
}

/// Constant exponents `epsilon` for `structure`.
pub fn uninformative_prior(
    structure: &Dag,
    arities: &[usize],
    epsilon: f64,
) -> Result<PriorCounts> {
    if state_space_size(arities) == 0 {
        return Err(Error::ArityMismatch("zero arity".into()));
    }
    PriorModel::uninformative(structure.nodes().to_vec(), arities.to_vec(), epsilon)?
        .for_structure(structure)
}
