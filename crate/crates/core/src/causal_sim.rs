//! Causal semantics for ground-truth networks: mapping variables, set
//! decisions, and a seeded simulator for observational and experimental data.
//!
//! Every variable `x` is a deterministic function of its set decision, its
//! parents, and its mechanism `x(Pa(x))`: a set decision "set x to k" forces
//! `x = k`; "do nothing" yields the mechanism's value at the realized parent
//! configuration. With mechanisms independent of each other and each
//! mechanism's components independent, the component at configuration `j`
//! is distributed as the CPT row `j`, so sampling the child straight from
//! that row is distributionally identical to drawing a whole mechanism.
//!
//! Random numbers come from ChaCha8 seeded with [`SeedableRng::seed_from_u64`].
//! Each unset variable consumes one 64-bit word per case (two when the word
//! is rejected, never in practice), cases in order, variables in the
//! network's topological order; the top 53 bits form a uniform in `[0, 1)`.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::model::{
    next_config, state_space_size, Case, Dataset, DiscreteNetwork, JointDistribution, Observation,
    Variable,
};

/// Largest mapping-state count [`mapping_state_count`] reports.
pub const MAPPING_COUNT_CAP: u64 = 1_000_000_000;

/// Largest mechanism table [`enumerate_mapping_states`] materializes.
pub const MAPPING_TABLE_CAP: u64 = 1_000_000;

/// A set decision for one variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SetDecision {
    #[default]
    DoNothing,
    Set(usize),
}

/// Number of functions from `q` parent configurations to `r` child states.
pub fn mapping_state_count(child_arity: usize, parent_configs: usize) -> Result<u64> {
    if child_arity < 2 {
        return Err(Error::ArityMismatch(format!(
            "child arity {child_arity} is below 2"
        )));
    }
    if parent_configs < 1 {
        return Err(Error::ArityMismatch("no parent configurations".into()));
    }
    let mut count: u64 = 1;
    for _ in 0..parent_configs {
        count = count
            .checked_mul(child_arity as u64)
            .filter(|&c| c <= MAPPING_COUNT_CAP)
            .ok_or(Error::CapExceeded {
                what: "mapping state count",
                value: (child_arity as u128)
                    .saturating_pow(parent_configs.min(u32::MAX as usize) as u32),
                cap: MAPPING_COUNT_CAP as u128,
            })?;
    }
    Ok(count)
}

/// Every state of a mapping variable `x(Y)`: each state is a total function
/// listing the child state for configurations `j = 0..q`. States are in
/// mixed-radix order over `(f(0), f(1), ...)`, `f(0)` most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MechanismTable {
    child_arity: usize,
    parent_configs: usize,
    states: Vec<Vec<usize>>,
}

impl MechanismTable {
    pub fn child_arity(&self) -> usize {
        self.child_arity
    }

    pub fn parent_configs(&self) -> usize {
        self.parent_configs
    }

    pub fn states(&self) -> &[Vec<usize>] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Index of a function in the table.
    pub fn index_of(&self, function: &[usize]) -> Option<usize> {
        if function.len() != self.parent_configs {
            return None;
        }
        function.iter().try_fold(0usize, |acc, &k| {
            (k < self.child_arity).then(|| acc * self.child_arity + k)
        })
    }
}

/// Enumerates the mapping variable of `child` given `parents`. With no
/// parents there is one configuration and `r` states, one per child value.
pub fn enumerate_mapping_states(child: &Variable, parents: &[Variable]) -> Result<MechanismTable> {
    let r = child.arity();
    let parent_arities: Vec<usize> = parents.iter().map(Variable::arity).collect();
    let q = state_space_size(&parent_arities);
    if q > MAPPING_TABLE_CAP as u128 {
        return Err(Error::CapExceeded {
            what: "parent configurations",
            value: q,
            cap: MAPPING_TABLE_CAP as u128,
        });
    }
    let q = q as usize;
    let count = mapping_state_count(r, q)?;
    if count > MAPPING_TABLE_CAP {
        return Err(Error::CapExceeded {
            what: "mapping states",
            value: count as u128,
            cap: MAPPING_TABLE_CAP as u128,
        });
    }
    let arities = vec![r; q];
    let mut function = vec![0usize; q];
    let mut states = Vec::with_capacity(count as usize);
    loop {
        states.push(function.clone());
        if !next_config(&mut function, &arities) {
            break;
        }
    }
    Ok(MechanismTable {
        child_arity: r,
        parent_configs: q,
        states,
    })
}

/// Child value under a mechanism state: `Set(k)` yields `k`; "do nothing"
/// yields the mechanism's value at parent configuration `j`.
pub fn apply_mechanism(mechanism: &[usize], j: usize, decision: SetDecision) -> Result<usize> {
    if j >= mechanism.len() {
        return Err(Error::ArityMismatch(format!(
            "parent configuration {j} outside a mechanism over {} configurations",
            mechanism.len()
        )));
    }
    Ok(match decision {
        SetDecision::Set(k) => k,
        SetDecision::DoNothing => mechanism[j],
    })
}

/// Set decisions for every simulated case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Regime {
    /// The same decisions in every case.
    Broadcast(Vec<SetDecision>),
    /// One decision list per case.
    PerCase(Vec<Vec<SetDecision>>),
}

impl Regime {
    /// "Do nothing" for all `n_vars` variables in every case.
    pub fn observational(n_vars: usize) -> Self {
        Regime::Broadcast(vec![SetDecision::DoNothing; n_vars])
    }

    /// Broadcast regime setting `assignments` `(variable, state)`.
    pub fn intervene(n_vars: usize, assignments: &[(usize, usize)]) -> Self {
        let mut decisions = vec![SetDecision::DoNothing; n_vars];
        for &(v, k) in assignments {
            decisions[v] = SetDecision::Set(k);
        }
        Regime::Broadcast(decisions)
    }

    pub fn decisions(&self, case: usize) -> &[SetDecision] {
        match self {
            Regime::Broadcast(d) => d,
            Regime::PerCase(all) => &all[case],
        }
    }

    fn validate(&self, truth: &DiscreteNetwork, n_cases: usize) -> Result<()> {
        let rows: &[Vec<SetDecision>] = match self {
            Regime::Broadcast(d) => core::slice::from_ref(d),
            Regime::PerCase(all) => {
                if all.len() != n_cases {
                    return Err(Error::ArityMismatch(format!(
                        "regime has {} rows for {n_cases} cases",
                        all.len()
                    )));
                }
                all
            }
        };
        let vars = truth.variables();
        for row in rows {
            if row.len() != vars.len() {
                return Err(Error::ArityMismatch(format!(
                    "regime row covers {} of {} variables",
                    row.len(),
                    vars.len()
                )));
            }
            for (d, v) in row.iter().zip(vars) {
                if let SetDecision::Set(k) = *d {
                    if k >= v.arity() {
                        return Err(Error::StateOutOfRange {
                            variable: v.name().to_string(),
                            index: k,
                            arity: v.arity(),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Uniform in `[0, 1)` from the top 53 bits of one word.
fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Inverse-CDF draw from `row`.
fn draw(row: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let u = unit(rng);
    let mut acc = 0.0;
    for (k, &p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return k;
        }
    }
    row.len() - 1
}

fn config_index(truth: &DiscreteNetwork, node: usize, assignment: &[usize]) -> usize {
    let vars = truth.variables();
    truth
        .cpt(node)
        .parents()
        .iter()
        .fold(0usize, |j, &p| j * vars[p].arity() + assignment[p])
}

fn to_case(values: &[usize], decisions: &[SetDecision]) -> Case {
    Case::new(
        values
            .iter()
            .zip(decisions)
            .map(|(&k, d)| match d {
                SetDecision::Set(_) => Observation::Set(k),
                SetDecision::DoNothing => Observation::Observed(k),
            })
            .collect(),
    )
}

/// Samples `n_cases` cases from `truth` under `regime`.
///
/// Per case, variables are visited in topological order: a set variable takes
/// its set value and its CPT is not consulted; any other variable is drawn
/// from its CPT row at the realized parent values. Set values are recorded as
/// [`Observation::Set`], the rest as [`Observation::Observed`].
pub fn simulate(
    truth: &DiscreteNetwork,
    regime: &Regime,
    n_cases: usize,
    seed: u64,
) -> Result<Dataset> {
    regime.validate(truth, n_cases)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = truth.variables().len();
    let mut out = Dataset::empty(truth.variables().to_vec());
    let mut values = vec![0usize; n];
    for l in 0..n_cases {
        let decisions = regime.decisions(l);
        for &v in truth.dag().topological_order() {
            values[v] = match decisions[v] {
                SetDecision::Set(k) => k,
                SetDecision::DoNothing => draw(truth.row_at(v, &values), &mut rng),
            };
        }
        out.push(to_case(&values, decisions))?;
    }
    Ok(out)
}

/// Simulated cases together with the mechanism state drawn for every
/// variable in every case.
#[derive(Debug, Clone, PartialEq)]
pub struct MechanismSample {
    pub dataset: Dataset,
    /// `mechanisms[l][i]` is the function `j -> k` drawn for variable `i` in
    /// case `l`.
    pub mechanisms: Vec<Vec<Vec<usize>>>,
}

/// Like [`simulate`], but draws every mechanism state in full (each component
/// independently from its CPT row) and derives values with
/// [`apply_mechanism`]. Uses a different random stream than [`simulate`].
pub fn simulate_with_mechanisms(
    truth: &DiscreteNetwork,
    regime: &Regime,
    n_cases: usize,
    seed: u64,
) -> Result<MechanismSample> {
    regime.validate(truth, n_cases)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = truth.variables().len();
    let mut dataset = Dataset::empty(truth.variables().to_vec());
    let mut mechanisms = Vec::with_capacity(n_cases);
    let mut values = vec![0usize; n];
    for l in 0..n_cases {
        let decisions = regime.decisions(l);
        let mut drawn = vec![Vec::new(); n];
        for &v in truth.dag().topological_order() {
            let mech: Vec<usize> = truth
                .cpt(v)
                .rows()
                .iter()
                .map(|row| draw(row, &mut rng))
                .collect();
            values[v] = apply_mechanism(&mech, config_index(truth, v, &values), decisions[v])?;
            drawn[v] = mech;
        }
        dataset.push(to_case(&values, decisions))?;
        mechanisms.push(drawn);
    }
    Ok(MechanismSample {
        dataset,
        mechanisms,
    })
}

/// Exact distribution of the unset variables (in network order) under
/// `do_assignment`: the product of the unset variables' CPT entries with set
/// variables clamped wherever they appear as parents.
pub fn interventional_distribution(
    truth: &DiscreteNetwork,
    do_assignment: &[(usize, usize)],
    cap: u128,
) -> Result<JointDistribution> {
    let arities = truth.arities();
    let n = arities.len();
    let mut clamped: Vec<Option<usize>> = vec![None; n];
    for &(v, k) in do_assignment {
        let var = truth
            .variables()
            .get(v)
            .ok_or_else(|| Error::UnknownNode(format!("#{v}")))?;
        if k >= var.arity() {
            return Err(Error::StateOutOfRange {
                variable: var.name().to_string(),
                index: k,
                arity: var.arity(),
            });
        }
        clamped[v] = Some(k);
    }
    let free: Vec<usize> = (0..n).filter(|&v| clamped[v].is_none()).collect();
    let free_arities: Vec<usize> = free.iter().map(|&v| arities[v]).collect();
    let size = state_space_size(&free_arities);
    if size > cap {
        return Err(Error::StateSpaceTooLarge { states: size, cap });
    }
    let mut assignment: Vec<usize> = clamped.iter().map(|c| c.unwrap_or(0)).collect();
    let mut sub = vec![0usize; free.len()];
    let mut probs = Vec::with_capacity(size as usize);
    loop {
        for (&v, &k) in free.iter().zip(&sub) {
            assignment[v] = k;
        }
        probs.push(
            free.iter()
                .map(|&v| truth.row_at(v, &assignment)[assignment[v]])
                .product(),
        );
        if !next_config(&mut sub, &free_arities) {
            break;
        }
    }
    JointDistribution::new(free_arities, probs)
}
