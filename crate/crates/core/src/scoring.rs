//! Counting with intervention semantics, closed-form Dirichlet-multinomial
//! scores, predictives, and exact marginalization over missing values.
//!
//! A variable that was set in a case has its incoming arcs broken for that
//! case: it adds nothing to its own family's counts, yet its value still
//! selects the parent configuration of its children.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::equivalence::equivalent;
use crate::error::{Error, Result};
use crate::model::{state_space_size, Case, Dag, Dataset, Mode, Observation};
use crate::priors::{Family, PriorCounts, PriorModel};
use crate::special::{ln_rising, LogSumExp};

pub use crate::special::{log_gamma, log_sum_exp};

/// Default cap on the number of database completions enumerated.
pub const DEFAULT_COMPLETION_CAP: u128 = 10_000_000;

/// Sufficient statistics `N_ijk` for one structure.
#[derive(Debug, Clone, PartialEq)]
pub struct DataCounts {
    families: Vec<Family<u64>>,
    cases: usize,
}

impl DataCounts {
    /// All-zero counts laid out like `priors`.
    pub fn zeros_like(priors: &PriorCounts) -> Self {
        DataCounts {
            families: priors
                .families()
                .iter()
                .map(|f| {
                    Family::new(
                        f.child(),
                        f.parents().to_vec(),
                        f.arity(),
                        vec![0u64; f.values().len()],
                    )
                })
                .collect(),
            cases: 0,
        }
    }

    fn zeros(structure: &Dag, arities: &[usize]) -> Self {
        let families = (0..structure.len())
            .map(|i| {
                let parents = structure.parents(i).to_vec();
                let q: usize = parents.iter().map(|&p| arities[p]).product();
                Family::new(i, parents, arities[i], vec![0u64; q * arities[i]])
            })
            .collect();
        DataCounts { families, cases: 0 }
    }

    pub fn families(&self) -> &[Family<u64>] {
        &self.families
    }

    pub fn family(&self, node: usize) -> &Family<u64> {
        &self.families[node]
    }

    /// `N_ijk`.
    pub fn get(&self, node: usize, j: usize, k: usize) -> u64 {
        self.families[node].get(j, k)
    }

    /// `N_ij`.
    pub fn row_sum(&self, node: usize, j: usize) -> u64 {
        self.families[node].row(j).iter().sum()
    }

    /// Total count recorded for a variable.
    pub fn total(&self, node: usize) -> u64 {
        self.families[node].values().iter().sum()
    }

    /// Number of cases counted.
    pub fn cases(&self) -> usize {
        self.cases
    }

    /// Adds one complete case. `set[i]` marks variables set by intervention.
    fn add(&mut self, arities: &[usize], states: &[usize], set: impl Fn(usize) -> bool) {
        self.cases += 1;
        for fam in &mut self.families {
            let child = fam.child();
            if set(child) {
                continue;
            }
            let j = fam
                .parents()
                .iter()
                .fold(0usize, |j, &p| j * arities[p] + states[p]);
            let r = fam.arity();
            fam.values_mut()[j * r + states[child]] += 1;
        }
    }

    /// Prior exponents with these counts added: the posterior Dirichlet.
    pub fn posterior(&self, priors: &PriorCounts) -> Result<PriorCounts> {
        check_index(self, priors)?;
        Ok(PriorCounts::new(
            priors
                .families()
                .iter()
                .zip(&self.families)
                .map(|(p, c)| {
                    let values = p
                        .values()
                        .iter()
                        .zip(c.values())
                        .map(|(&a, &n)| a + n as f64)
                        .collect();
                    Family::new(p.child(), p.parents().to_vec(), p.arity(), values)
                })
                .collect(),
        ))
    }
}

fn check_structure(dataset: &Dataset, structure: &Dag) -> Result<()> {
    if structure.nodes() != dataset.variable_names().as_slice() {
        return Err(Error::VariableMismatch(format!(
            "structure over [{}] but data over [{}]",
            structure.nodes().join(", "),
            dataset.variable_names().join(", ")
        )));
    }
    Ok(())
}

fn check_index(counts: &DataCounts, priors: &PriorCounts) -> Result<()> {
    if counts.families.len() != priors.families().len() {
        return Err(Error::IndexMismatch(format!(
            "{} count families vs {} prior families",
            counts.families.len(),
            priors.families().len()
        )));
    }
    for (c, p) in counts.families.iter().zip(priors.families()) {
        if !p.same_index(c) {
            return Err(Error::IndexMismatch(format!(
                "family of variable #{} differs",
                c.child()
            )));
        }
    }
    Ok(())
}

/// Counts `N_ijk` from a dataset without missing values.
pub fn sufficient_stats(dataset: &Dataset, structure: &Dag) -> Result<DataCounts> {
    check_structure(dataset, structure)?;
    let arities = dataset.arities();
    let mut counts = DataCounts::zeros(structure, &arities);
    let mut states = vec![0usize; arities.len()];
    for (l, case) in dataset.cases().iter().enumerate() {
        for (i, obs) in case.values().iter().enumerate() {
            states[i] = obs.value().ok_or_else(|| Error::MissingValue {
                case: l,
                variable: dataset.variables()[i].name().to_string(),
            })?;
        }
        counts.add(&arities, &states, |i| case.get(i).is_set());
    }
    Ok(counts)
}

/// Counts for one family, `child` given `parents` (ascending), from a
/// dataset without missing values in those variables.
pub fn family_counts(dataset: &Dataset, child: usize, parents: &[usize]) -> Result<Family<u64>> {
    let arities = dataset.arities();
    let q: usize = parents.iter().map(|&p| arities[p]).product();
    let r = arities[child];
    let mut values = vec![0u64; q * r];
    let value = |l: usize, case: &Case, i: usize| {
        case.get(i).value().ok_or_else(|| Error::MissingValue {
            case: l,
            variable: dataset.variables()[i].name().to_string(),
        })
    };
    for (l, case) in dataset.cases().iter().enumerate() {
        if case.get(child).is_set() {
            continue;
        }
        let mut j = 0usize;
        for &p in parents {
            j = j * arities[p] + value(l, case, p)?;
        }
        values[j * r + value(l, case, child)?] += 1;
    }
    Ok(Family::new(child, parents.to_vec(), r, values))
}

/// Log of the Gamma-ratio product for one family.
pub fn family_log_ml(counts: &Family<u64>, prior: &Family<f64>) -> f64 {
    let mut total = 0.0;
    for j in 0..prior.configs() {
        let n_row = counts.row(j);
        let n_ij: u64 = n_row.iter().sum();
        if n_ij == 0 {
            continue;
        }
        let a_row = prior.row(j);
        let a_ij: f64 = a_row.iter().sum();
        total -= ln_rising(a_ij, n_ij);
        for (&a, &n) in a_row.iter().zip(n_row) {
            total += ln_rising(a, n);
        }
    }
    total
}

/// Natural log of
/// `∏_ij Γ(N'_ij)/Γ(N'_ij + N_ij) ∏_k Γ(N'_ijk + N_ijk)/Γ(N'_ijk)`.
pub fn log_marginal_likelihood(counts: &DataCounts, priors: &PriorCounts) -> Result<f64> {
    check_index(counts, priors)?;
    Ok(counts
        .families
        .iter()
        .zip(priors.families())
        .map(|(c, p)| family_log_ml(c, p))
        .sum())
}

/// Probability of the next case: one factor `(N'_ijk + N_ijk)/(N'_ij + N_ij)`
/// per variable, with `j` and `k` read from the case. Variables set in the
/// case contribute a factor of one.
pub fn predictive_case_prob(case: &Case, counts: &DataCounts, priors: &PriorCounts) -> Result<f64> {
    Ok(libm::exp(log_predictive_case_prob(case, counts, priors)?))
}

pub fn log_predictive_case_prob(
    case: &Case,
    counts: &DataCounts,
    priors: &PriorCounts,
) -> Result<f64> {
    check_index(counts, priors)?;
    if case.len() != priors.families().len() {
        return Err(Error::ArityMismatch(format!(
            "case has {} values for {} variables",
            case.len(),
            priors.families().len()
        )));
    }
    let states: Vec<usize> = case
        .values()
        .iter()
        .enumerate()
        .map(|(i, o)| {
            o.value().ok_or_else(|| Error::MissingValue {
                case: 0,
                variable: format!("#{i}"),
            })
        })
        .collect::<Result<_>>()?;
    let mut log_p = 0.0;
    for (c, p) in counts.families.iter().zip(priors.families()) {
        let child = c.child();
        if case.get(child).is_set() {
            continue;
        }
        let k = states[child];
        if k >= p.arity() {
            return Err(Error::StateOutOfRange {
                variable: format!("#{child}"),
                index: k,
                arity: p.arity(),
            });
        }
        let mut j = 0usize;
        for &par in p.parents() {
            let r = priors.family(par).arity();
            j = j * r + states[par];
        }
        let num = p.get(j, k) + c.get(j, k) as f64;
        let den = p.row_sum(j) + counts.row_sum(child, j) as f64;
        log_p += libm::log(num / den);
    }
    Ok(log_p)
}

/// Number of completions of the missing values in `dataset`.
pub fn completion_count(dataset: &Dataset) -> u128 {
    let arities = dataset.arities();
    let slots: Vec<usize> = dataset
        .cases()
        .iter()
        .flat_map(|c| {
            c.values()
                .iter()
                .enumerate()
                .filter(|(_, o)| o.is_missing())
                .map(|(i, _)| arities[i])
        })
        .collect();
    state_space_size(&slots)
}

/// Calls `visit` with the log probability of every completed database.
///
/// Missing slots are enumerated mixed-radix, case-major with variables in
/// declared order inside a case; the first slot is most significant.
fn for_each_completion(
    structure: &Dag,
    priors: &PriorCounts,
    dataset: &Dataset,
    cap: u128,
    mut visit: impl FnMut(f64),
) -> Result<()> {
    check_structure(dataset, structure)?;
    let arities = dataset.arities();
    let base = DataCounts::zeros(structure, &arities);
    check_index(&base, priors)?;
    let total = completion_count(dataset);
    if total > cap {
        return Err(Error::TooManyCompletions {
            completions: total,
            cap,
        });
    }

    let n = arities.len();
    let mut missing_vars = vec![false; n];
    let mut slots = Vec::new();
    let mut states: Vec<Vec<usize>> = Vec::with_capacity(dataset.len());
    for (l, case) in dataset.cases().iter().enumerate() {
        let mut row = Vec::with_capacity(n);
        for (i, obs) in case.values().iter().enumerate() {
            match obs {
                Observation::Missing => {
                    missing_vars[i] = true;
                    slots.push((l, i));
                    row.push(0);
                }
                Observation::Observed(k) | Observation::Set(k) => row.push(*k),
            }
        }
        states.push(row);
    }

    // Families untouched by any missing variable score the same in every
    // completion; count them once.
    let touched: Vec<bool> = (0..n)
        .map(|i| missing_vars[i] || structure.parents(i).iter().any(|&p| missing_vars[p]))
        .collect();
    let mut fixed = base.clone();
    for (case, row) in dataset.cases().iter().zip(&states) {
        fixed.add(&arities, row, |i| touched[i] || case.get(i).is_set());
    }
    let fixed_log: f64 = fixed
        .families
        .iter()
        .zip(priors.families())
        .filter(|(c, _)| !touched[c.child()])
        .map(|(c, p)| family_log_ml(c, p))
        .sum();

    let slot_arities: Vec<usize> = slots.iter().map(|&(_, i)| arities[i]).collect();
    let mut slot_states = vec![0usize; slots.len()];
    loop {
        for (&(l, i), &k) in slots.iter().zip(&slot_states) {
            states[l][i] = k;
        }
        let mut varying = base.clone();
        for (case, row) in dataset.cases().iter().zip(&states) {
            varying.add(&arities, row, |i| !touched[i] || case.get(i).is_set());
        }
        let varying_log: f64 = varying
            .families
            .iter()
            .zip(priors.families())
            .filter(|(c, _)| touched[c.child()])
            .map(|(c, p)| family_log_ml(c, p))
            .sum();
        visit(fixed_log + varying_log);
        if !crate::model::next_config(&mut slot_states, &slot_arities) {
            break;
        }
    }
    Ok(())
}

/// Log probability of each completed database, in enumeration order.
pub fn completion_log_terms(
    structure: &Dag,
    priors: &PriorCounts,
    dataset: &Dataset,
    cap: u128,
) -> Result<Vec<f64>> {
    let mut terms = Vec::new();
    for_each_completion(structure, priors, dataset, cap, |t| terms.push(t))?;
    Ok(terms)
}

/// Log marginal likelihood summed exactly over every completion of the
/// missing values. Equals [`log_marginal_likelihood`] on complete data.
pub fn log_ml_with_hidden(
    structure: &Dag,
    priors: &PriorCounts,
    dataset: &Dataset,
    cap: u128,
) -> Result<f64> {
    if !dataset.has_missing() {
        return log_marginal_likelihood(&sufficient_stats(dataset, structure)?, priors);
    }
    let mut acc = LogSumExp::new();
    for_each_completion(structure, priors, dataset, cap, |t| acc.add(t))?;
    Ok(acc.value())
}

/// One scored hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisScore {
    pub id: usize,
    pub structure: Dag,
    pub prior: f64,
    pub log_ml: f64,
    pub posterior: f64,
}

/// Posterior over a hypothesis list, entries in input order.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisPosterior {
    entries: Vec<HypothesisScore>,
}

impl HypothesisPosterior {
    /// Normalizes `prior * exp(log_ml)` over the supplied entries. The
    /// normalizer is accumulated in ascending order of the unnormalized log
    /// posterior so that the result does not depend on entry order.
    pub fn from_scores(scores: Vec<(Dag, f64, f64)>) -> Self {
        let log_post: Vec<f64> = scores
            .iter()
            .map(|(_, prior, log_ml)| libm::log(*prior) + log_ml)
            .collect();
        let mut sorted = log_post.clone();
        sorted.sort_by(f64::total_cmp);
        let z = log_sum_exp(&sorted);
        let entries = scores
            .into_iter()
            .zip(log_post)
            .enumerate()
            .map(|(id, ((structure, prior, log_ml), lp))| HypothesisScore {
                id,
                structure,
                prior,
                log_ml,
                posterior: libm::exp(lp - z),
            })
            .collect();
        HypothesisPosterior { entries }
    }

    pub fn entries(&self) -> &[HypothesisScore] {
        &self.entries
    }

    /// Entries by descending posterior, ties by ascending id.
    pub fn ranked(&self) -> Vec<&HypothesisScore> {
        let mut out: Vec<&HypothesisScore> = self.entries.iter().collect();
        out.sort_by(|a, b| b.posterior.total_cmp(&a.posterior).then(a.id.cmp(&b.id)));
        out
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|e| e.posterior).sum()
    }
}

fn check_hypothesis_priors(priors: impl Iterator<Item = f64>) -> Result<()> {
    let mut sum = 0.0;
    for p in priors {
        if !(p >= 0.0 && p.is_finite()) {
            return Err(Error::InvalidHypothesisPriors(p));
        }
        sum += p;
    }
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidHypothesisPriors(sum));
    }
    Ok(())
}

/// Posterior over `hypotheses` given `dataset`.
///
/// In acausal mode each hypothesis stands for its equivalence class, so the
/// list may not hold two equivalent structures and the data may not hold
/// interventions.
pub fn structure_posteriors(
    hypotheses: &[(Dag, f64)],
    prior: &PriorModel,
    dataset: &Dataset,
    mode: Mode,
    cap: u128,
) -> Result<HypothesisPosterior> {
    if hypotheses.is_empty() {
        return Err(Error::NoHypotheses);
    }
    check_hypothesis_priors(hypotheses.iter().map(|(_, p)| *p))?;
    dataset.check_mode(mode)?;
    if mode == Mode::Acausal {
        for (a, (da, _)) in hypotheses.iter().enumerate() {
            for (db, _) in &hypotheses[a + 1..] {
                if equivalent(da, db)? {
                    return Err(Error::InvalidDataset(format!(
                        "acausal hypotheses `{da}` and `{db}` are equivalent"
                    )));
                }
            }
        }
    }
    let mut scores = Vec::with_capacity(hypotheses.len());
    for (dag, p) in hypotheses {
        let priors = prior.for_structure(dag)?;
        let log_ml = log_ml_with_hidden(dag, &priors, dataset, cap)?;
        scores.push((dag.clone(), *p, log_ml));
    }
    Ok(HypothesisPosterior::from_scores(scores))
}

/// Log of `p(case | dataset, structure)`.
///
/// With complete data this is the product of posterior means; otherwise it
/// is the ratio of the exact marginal likelihoods with and without the case,
/// which also permits missing values in `case`.
pub fn log_predictive(
    case: &Case,
    structure: &Dag,
    prior: &PriorModel,
    dataset: &Dataset,
    cap: u128,
) -> Result<f64> {
    let priors = prior.for_structure(structure)?;
    if !dataset.has_missing() && case.is_complete() {
        let counts = sufficient_stats(dataset, structure)?;
        return log_predictive_case_prob(case, &counts, &priors);
    }
    let extended = dataset.with_case(case.clone())?;
    let with = log_ml_with_hidden(structure, &priors, &extended, cap)?;
    let without = log_ml_with_hidden(structure, &priors, dataset, cap)?;
    Ok(with - without)
}

/// Model-averaged probability of `case`: `Σ_s p(case | D, s) p(s | D)`.
pub fn model_average_predict(
    case: &Case,
    posterior: &HypothesisPosterior,
    dataset: &Dataset,
    prior: &PriorModel,
    cap: u128,
) -> Result<f64> {
    let mut total = 0.0;
    for entry in posterior.entries() {
        if entry.posterior == 0.0 {
            continue;
        }
        let lp = log_predictive(case, &entry.structure, prior, dataset, cap)?;
        total += entry.posterior * libm::exp(lp);
    }
    Ok(total)
}

/// Log marginal likelihood from scratch: priors for `structure`, then the
/// exact (hidden-aware) score.
pub fn score_structure(
    structure: &Dag,
    prior: &PriorModel,
    dataset: &Dataset,
    cap: u128,
) -> Result<f64> {
    let priors = prior.for_structure(structure)?;
    log_ml_with_hidden(structure, &priors, dataset, cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DiscreteNetwork, Variable, DEFAULT_JOINT_CAP};
    use crate::priors::{dirichlet_prior_from_prior_network, uninformative_prior};
    use alloc::string::String;
    use Observation::{Missing, Observed as O, Set as S};

    fn names(list: &[&str]) -> Vec<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    fn xy() -> (Vec<Variable>, Dag) {
        let vars = vec![Variable::binary("x"), Variable::binary("y")];
        let dag = Dag::from_names(names(&["x", "y"]), &[("x", "y")]).unwrap();
        (vars, dag)
    }

    #[test]
    fn set_parent_still_indexes_child() {
        let (vars, dag) = xy();
        let ds = Dataset::new(vars, vec![Case::new(vec![S(1), O(1)])], &[]).unwrap();
        let c = sufficient_stats(&ds, &dag).unwrap();
        assert_eq!(c.get(1, 1, 1), 1);
        assert_eq!(c.total(0), 0);
        assert_eq!(c.total(1), 1);
    }

    #[test]
    fn set_child_is_not_counted() {
        let (vars, dag) = xy();
        let ds = Dataset::new(vars, vec![Case::new(vec![O(0), S(1)])], &[]).unwrap();
        let c = sufficient_stats(&ds, &dag).unwrap();
        assert_eq!(c.get(0, 0, 0), 1);
        assert_eq!(c.total(1), 0);
    }

    #[test]
    fn empty_dataset_counts_zero() {
        let (vars, dag) = xy();
        let c = sufficient_stats(&Dataset::empty(vars), &dag).unwrap();
        assert!(c
            .families()
            .iter()
            .all(|f| f.values().iter().all(|&n| n == 0)));
    }

    #[test]
    fn missing_values_are_redirected() {
        let (vars, dag) = xy();
        let ds = Dataset::new(vars, vec![Case::new(vec![O(0), Missing])], &[]).unwrap();
        assert!(matches!(
            sufficient_stats(&ds, &dag),
            Err(Error::MissingValue { case: 0, .. })
        ));
    }

    #[test]
    fn zero_counts_score_zero() {
        let (vars, dag) = xy();
        let priors = uninformative_prior(&dag, &[2, 2], 0.7).unwrap();
        let c = sufficient_stats(&Dataset::empty(vars), &dag).unwrap();
        assert_eq!(log_marginal_likelihood(&c, &priors).unwrap(), 0.0);
    }

    #[test]
    fn single_variable_sequential_product() {
        let vars = vec![Variable::binary("x")];
        let dag = Dag::empty(names(&["x"])).unwrap();
        let priors = uninformative_prior(&dag, &[2], 1.0).unwrap();
        let ds = Dataset::new(vars, vec![Case::observed(&[1]), Case::observed(&[1])], &[]).unwrap();
        let c = sufficient_stats(&ds, &dag).unwrap();
        let ml = libm::exp(log_marginal_likelihood(&c, &priors).unwrap());
        assert!((ml - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn index_mismatch_is_reported() {
        let (vars, dag) = xy();
        let other = Dag::empty(names(&["x", "y"])).unwrap();
        let priors = uninformative_prior(&other, &[2, 2], 1.0).unwrap();
        let c = sufficient_stats(&Dataset::empty(vars), &dag).unwrap();
        assert!(matches!(
            log_marginal_likelihood(&c, &priors),
            Err(Error::IndexMismatch(_))
        ));
    }

    #[test]
    fn predictive_posterior_means() {
        let vars = vec![Variable::binary("x")];
        let dag = Dag::empty(names(&["x"])).unwrap();
        let priors = uninformative_prior(&dag, &[2], 1.0).unwrap();
        let empty = sufficient_stats(&Dataset::empty(vars.clone()), &dag).unwrap();
        let p = predictive_case_prob(&Case::observed(&[1]), &empty, &priors).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        let one = Dataset::new(vars, vec![Case::observed(&[1])], &[]).unwrap();
        let c = sufficient_stats(&one, &dag).unwrap();
        let p = predictive_case_prob(&Case::observed(&[1]), &c, &priors).unwrap();
        assert!((p - 2.0 / 3.0).abs() < 1e-15);
        assert!(predictive_case_prob(&Case::new(vec![Missing]), &c, &priors).is_err());
    }

    #[test]
    fn predictive_of_set_variable_is_one() {
        let (vars, dag) = xy();
        let priors = uninformative_prior(&dag, &[2, 2], 1.0).unwrap();
        let c = sufficient_stats(&Dataset::empty(vars), &dag).unwrap();
        let p = predictive_case_prob(&Case::new(vec![S(1), O(0)]), &c, &priors).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
    }

    #[test]
    fn uninformative_limit_predicts_seen_state() {
        let vars = vec![Variable::binary("x")];
        let dag = Dag::empty(names(&["x"])).unwrap();
        let one = Dataset::new(vars, vec![Case::observed(&[1])], &[]).unwrap();
        let c = sufficient_stats(&one, &dag).unwrap();
        let mut last_gap = f64::INFINITY;
        for eps in [1e-2, 1e-4, 1e-6] {
            let priors = uninformative_prior(&dag, &[2], eps).unwrap();
            let p = predictive_case_prob(&Case::observed(&[1]), &c, &priors).unwrap();
            let gap = 1.0 - p;
            assert!(gap < last_gap && gap < 2.0 * eps);
            last_gap = gap;
        }
    }

    fn ghl_setup() -> (Dag, Dag, PriorModel, Dataset) {
        let vars = vec![
            Variable::binary("g"),
            Variable::binary("h"),
            Variable::binary("l"),
        ];
        let n = names(&["g", "h", "l"]);
        let cs1 = Dag::from_names(n.clone(), &[("g", "h"), ("g", "l"), ("h", "l")]).unwrap();
        let cs2 = Dag::from_names(n, &[("g", "h"), ("g", "l")]).unwrap();
        let net = DiscreteNetwork::uniform(vars.clone()).unwrap();
        let prior = PriorModel::from_prior_network(&net, 24.0, DEFAULT_JOINT_CAP).unwrap();
        let case = Case::new(vec![Missing, O(1), O(1)]);
        let ds = Dataset::new(vars, vec![case.clone(), case], &[0]).unwrap();
        (cs1, cs2, prior, ds)
    }

    #[test]
    fn hidden_gene_terms() {
        let (cs1, _, prior, ds) = ghl_setup();
        let priors = prior.for_structure(&cs1).unwrap();
        let terms = completion_log_terms(&cs1, &priors, &ds, DEFAULT_COMPLETION_CAP).unwrap();
        assert_eq!(terms.len(), 4);
        // enumeration order: (g1, g2) = (0,0), (0,1), (1,0), (1,1)
        assert!((terms[3] - libm::log(1.0 / 50.0)).abs() < 1e-12);
        let total = log_ml_with_hidden(&cs1, &priors, &ds, DEFAULT_COMPLETION_CAP).unwrap();
        assert!((total - log_sum_exp(&terms)).abs() < 1e-14);
    }

    #[test]
    fn completion_cap() {
        let (cs1, _, prior, ds) = ghl_setup();
        let priors = prior.for_structure(&cs1).unwrap();
        assert!(matches!(
            log_ml_with_hidden(&cs1, &priors, &ds, 3),
            Err(Error::TooManyCompletions {
                completions: 4,
                cap: 3
            })
        ));
    }

    #[test]
    fn hidden_gene_posteriors() {
        let (cs1, cs2, prior, ds) = ghl_setup();
        let post = structure_posteriors(
            &[(cs1, 0.5), (cs2, 0.5)],
            &prior,
            &ds,
            Mode::Causal,
            DEFAULT_COMPLETION_CAP,
        )
        .unwrap();
        let p = post.entries();
        assert!((p[0].posterior - 0.51).abs() <= 0.005);
        assert!((p[1].posterior - 0.49).abs() <= 0.005);
        assert!((post.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hypothesis_prior_checks() {
        let (cs1, cs2, prior, ds) = ghl_setup();
        let bad = structure_posteriors(
            &[(cs1.clone(), 0.5), (cs2, 0.6)],
            &prior,
            &ds,
            Mode::Causal,
            DEFAULT_COMPLETION_CAP,
        );
        assert!(matches!(bad, Err(Error::InvalidHypothesisPriors(_))));
        assert!(matches!(
            structure_posteriors(&[], &prior, &ds, Mode::Causal, 10),
            Err(Error::NoHypotheses)
        ));
        let equiv = Dag::from_names(
            names(&["g", "h", "l"]),
            &[("h", "g"), ("g", "l"), ("h", "l")],
        )
        .unwrap();
        assert!(structure_posteriors(
            &[(cs1, 0.5), (equiv, 0.5)],
            &prior,
            &ds,
            Mode::Acausal,
            DEFAULT_COMPLETION_CAP
        )
        .is_err());
    }

    #[test]
    fn equivalent_pair_ties_on_observational_data() {
        let (vars, xy_dag) = xy();
        let yx = Dag::from_names(names(&["x", "y"]), &[("y", "x")]).unwrap();
        let net = DiscreteNetwork::uniform(vars.clone()).unwrap();
        let prior = PriorModel::from_prior_network(&net, 4.0, DEFAULT_JOINT_CAP).unwrap();
        let ds = Dataset::new(
            vars,
            [[0, 0], [1, 1], [1, 1], [0, 1]]
                .iter()
                .map(|s| Case::observed(s))
                .collect(),
            &[],
        )
        .unwrap();
        let post = structure_posteriors(
            &[(xy_dag, 0.5), (yx, 0.5)],
            &prior,
            &ds,
            Mode::Causal,
            DEFAULT_COMPLETION_CAP,
        )
        .unwrap();
        assert!((post.entries()[0].posterior - 0.5).abs() < 1e-12);
    }

    #[test]
    fn experimental_case_splits_equivalent_pair() {
        let (vars, xy_dag) = xy();
        let yx = Dag::from_names(names(&["x", "y"]), &[("y", "x")]).unwrap();
        let net = DiscreteNetwork::new(
            vars.clone(),
            xy_dag.clone(),
            vec![
                crate::model::Cpt::new(0, vec![], vec![vec![0.5, 0.5]]),
                crate::model::Cpt::new(1, vec![0], vec![vec![0.8, 0.2], vec![0.2, 0.8]]),
            ],
        )
        .unwrap();
        let prior = PriorModel::from_prior_network(&net, 4.0, DEFAULT_JOINT_CAP).unwrap();
        let ds = Dataset::new(vars, vec![Case::new(vec![S(1), O(1)])], &[]).unwrap();
        let post = structure_posteriors(
            &[(xy_dag.clone(), 0.5), (yx.clone(), 0.5)],
            &prior,
            &ds,
            Mode::Causal,
            DEFAULT_COMPLETION_CAP,
        )
        .unwrap();
        let e = post.entries();
        // x -> y scores p(y=1 | x=1) = 0.8; y -> x scores p(y=1) = 0.5.
        assert!((e[0].log_ml - libm::log(0.8)).abs() < 1e-12);
        assert!((e[1].log_ml - libm::log(0.5)).abs() < 1e-12);
        assert!((e[0].posterior - 0.8 / 1.3).abs() < 1e-12);
        assert!(structure_posteriors(
            &[(xy_dag, 1.0)],
            &prior,
            &ds,
            Mode::Acausal,
            DEFAULT_COMPLETION_CAP
        )
        .is_err());
    }

    #[test]
    fn modular_priors_are_bit_identical() {
        let (_, cs2, prior, _) = ghl_setup();
        let n = names(&["g", "h", "l"]);
        let other = Dag::from_names(n, &[("g", "h"), ("l", "g")]).unwrap();
        let a = prior.for_structure(&cs2).unwrap();
        let b = prior.for_structure(&other).unwrap();
        // h has parents {g} in both
        assert_eq!(a.family(1), b.family(1));
        let net = DiscreteNetwork::uniform(vec![
            Variable::binary("g"),
            Variable::binary("h"),
            Variable::binary("l"),
        ])
        .unwrap();
        let c = dirichlet_prior_from_prior_network(&net, 24.0, &cs2, DEFAULT_JOINT_CAP).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn single_hypothesis_average_equals_predictive() {
        let (vars, dag) = xy();
        let net = DiscreteNetwork::uniform(vars.clone()).unwrap();
        let prior = PriorModel::from_prior_network(&net, 2.0, DEFAULT_JOINT_CAP).unwrap();
        let ds = Dataset::new(
            vars,
            vec![Case::observed(&[1, 0]), Case::new(vec![S(0), O(1)])],
            &[],
        )
        .unwrap();
        let post =
            structure_posteriors(&[(dag.clone(), 1.0)], &prior, &ds, Mode::Causal, 10).unwrap();
        let case = Case::observed(&[1, 1]);
        let avg = model_average_predict(&case, &post, &ds, &prior, 10).unwrap();
        let counts = sufficient_stats(&ds, &dag).unwrap();
        let direct =
            predictive_case_prob(&case, &counts, &prior.for_structure(&dag).unwrap()).unwrap();
        assert!((avg - direct).abs() < 1e-15);
    }

    #[test]
    fn ratio_route_matches_posterior_means() {
        let (vars, dag) = xy();
        let net = DiscreteNetwork::uniform(vars.clone()).unwrap();
        let prior = PriorModel::from_prior_network(&net, 3.0, DEFAULT_JOINT_CAP).unwrap();
        let ds = Dataset::new(
            vars,
            vec![
                Case::observed(&[1, 0]),
                Case::new(vec![S(0), O(1)]),
                Case::observed(&[1, 1]),
            ],
            &[],
        )
        .unwrap();
        let priors = prior.for_structure(&dag).unwrap();
        let case = Case::new(vec![O(1), O(1)]);
        let counts = sufficient_stats(&ds, &dag).unwrap();
        let direct = log_predictive_case_prob(&case, &counts, &priors).unwrap();
        let with = log_ml_with_hidden(&dag, &priors, &ds.with_case(case).unwrap(), 10).unwrap();
        let without = log_ml_with_hidden(&dag, &priors, &ds, 10).unwrap();
        assert!((direct - (with - without)).abs() < 1e-12);
    }

    #[test]
    fn ranking_breaks_ties_by_id() {
        let n = names(&["x", "y"]);
        let a = Dag::empty(n.clone()).unwrap();
        let b = Dag::from_names(n, &[("x", "y")]).unwrap();
        let post = HypothesisPosterior::from_scores(vec![(a, 0.5, -1.0), (b, 0.5, -1.0)]);
        let ranked = post.ranked();
        assert_eq!((ranked[0].id, ranked[1].id), (0, 1));
    }
}
