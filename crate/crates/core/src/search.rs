//! Hypothesis spaces and structure search.
//!
//! Small domains are scored exhaustively over every DAG (causal mode) or
//! every equivalence class (acausal mode). Larger domains use greedy
//! hill-climbing over single-arc additions, deletions and reversals with
//! seeded random restarts.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::equivalence::{equivalence_classes, EquivalenceClass};
use crate::error::{Error, Result};
use crate::model::{ArcCode, Dag, Dataset, Mode};
use crate::priors::PriorModel;
use crate::scoring::{family_counts, family_log_ml, log_ml_with_hidden, HypothesisPosterior};

/// Largest node count [`enumerate_dags`] accepts by default.
pub const DEFAULT_ENUMERATION_CAP: usize = 5;

/// Default parent bound for greedy search.
pub const DEFAULT_MAX_PARENTS: usize = 3;

/// Every DAG on `nodes` with at most `max_parents` parents per node, sorted
/// by ascending [`Dag::arc_code`].
pub fn enumerate_dags(
    nodes: &[String],
    max_parents: Option<usize>,
    cap: usize,
) -> Result<Vec<Dag>> {
    let n = nodes.len();
    if n > cap {
        return Err(Error::CapExceeded {
            what: "node count",
            value: n as u128,
            cap: cap as u128,
        });
    }
    let bound = max_parents.unwrap_or(n);
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    // each unordered pair: absent, a -> b, or b -> a
    let mut choice = vec![0usize; pairs.len()];
    let threes = vec![3usize; pairs.len()];
    let mut out = Vec::new();
    loop {
        let arcs = pairs
            .iter()
            .zip(&choice)
            .filter_map(|(&(a, b), &c)| match c {
                1 => Some((a, b)),
                2 => Some((b, a)),
                _ => None,
            });
        let mut indegree = vec![0usize; n];
        let arcs: Vec<(usize, usize)> = arcs.inspect(|&(_, c)| indegree[c] += 1).collect();
        if indegree.iter().all(|&d| d <= bound) {
            if let Ok(dag) = Dag::new(nodes.to_vec(), arcs) {
                out.push(dag);
            }
        }
        if !crate::model::next_config(&mut choice, &threes) {
            break;
        }
    }
    out.sort_by_cached_key(Dag::arc_code);
    Ok(out)
}

/// Scores structures against one dataset and prior, caching family scores
/// (complete data) or whole-structure scores (data with missing values).
pub struct Scorer<'a> {
    prior: &'a PriorModel,
    dataset: &'a Dataset,
    cap: u128,
    complete: bool,
    families: BTreeMap<(usize, Vec<usize>), f64>,
    structures: BTreeMap<ArcCode, f64>,
}

impl<'a> Scorer<'a> {
    pub fn new(prior: &'a PriorModel, dataset: &'a Dataset, cap: u128) -> Result<Self> {
        if prior.names() != dataset.variable_names().as_slice() {
            return Err(Error::VariableMismatch(
                "prior and data list different variables".into(),
            ));
        }
        if prior.arities() != dataset.arities().as_slice() {
            return Err(Error::VariableMismatch(
                "prior and data disagree on variable arities".into(),
            ));
        }
        Ok(Scorer {
            prior,
            dataset,
            cap,
            complete: !dataset.has_missing(),
            families: BTreeMap::new(),
            structures: BTreeMap::new(),
        })
    }

    /// Whether structure scores decompose over families.
    pub fn decomposable(&self) -> bool {
        self.complete
    }

    /// Log score of one family; only meaningful on complete data.
    pub fn family(&mut self, child: usize, parents: &[usize]) -> Result<f64> {
        let key = (child, parents.to_vec());
        if let Some(&s) = self.families.get(&key) {
            return Ok(s);
        }
        let counts = family_counts(self.dataset, child, parents)?;
        let s = family_log_ml(&counts, &self.prior.family(child, parents));
        self.families.insert(key, s);
        Ok(s)
    }

    /// Log marginal likelihood of `dag`.
    pub fn score(&mut self, dag: &Dag) -> Result<f64> {
        if self.complete {
            let mut total = 0.0;
            for i in 0..dag.len() {
                total += self.family(i, dag.parents(i))?;
            }
            return Ok(total);
        }
        let code = dag.arc_code();
        if let Some(&s) = self.structures.get(&code) {
            return Ok(s);
        }
        let priors = self.prior.for_structure(dag)?;
        let s = log_ml_with_hidden(dag, &priors, self.dataset, self.cap)?;
        self.structures.insert(code, s);
        Ok(s)
    }
}

/// A single-arc change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MoveKind {
    Add,
    Delete,
    Reverse,
}

/// One committed hill-climbing step on arc `from -> to` (for a reversal, the
/// arc before reversing).
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub kind: MoveKind,
    pub from: usize,
    pub to: usize,
    pub delta: f64,
    pub score: f64,
}

/// One hill-climbing run from a start structure to a local optimum.
#[derive(Debug, Clone, PartialEq)]
pub struct ClimbRun {
    pub start: Dag,
    pub start_score: f64,
    pub steps: Vec<Step>,
    pub end: Dag,
    pub end_score: f64,
}

/// Outcome of a structure search.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub mode: Mode,
    /// Posterior over the hypotheses that were scored. For greedy search this
    /// is normalized over the distinct local optima found.
    pub posterior: HypothesisPosterior,
    /// In acausal mode, the class each hypothesis stands for (by id).
    pub classes: Option<Vec<EquivalenceClass>>,
    /// Greedy runs, best run first; empty for exhaustive search.
    pub runs: Vec<ClimbRun>,
}

impl SearchResult {
    /// Hypotheses by descending posterior, ties by id.
    pub fn ranked(&self) -> Vec<&crate::scoring::HypothesisScore> {
        self.posterior.ranked()
    }

    pub fn best(&self) -> &Dag {
        &self.ranked()[0].structure
    }

    /// Class of hypothesis `id` in acausal mode.
    pub fn class(&self, id: usize) -> Option<&EquivalenceClass> {
        self.classes.as_ref().map(|c| &c[id])
    }
}

/// Full posterior over every DAG (causal) or equivalence class (acausal) on
/// the dataset's variables, with a uniform hypothesis prior.
pub fn exhaustive_posterior(
    dataset: &Dataset,
    prior: &PriorModel,
    mode: Mode,
    max_parents: Option<usize>,
    enumeration_cap: usize,
    completion_cap: u128,
) -> Result<SearchResult> {
    dataset.check_mode(mode)?;
    let dags = enumerate_dags(&dataset.variable_names(), max_parents, enumeration_cap)?;
    let mut scorer = Scorer::new(prior, dataset, completion_cap)?;
    match mode {
        Mode::Causal => {
            let p = 1.0 / dags.len() as f64;
            let mut scores = Vec::with_capacity(dags.len());
            for dag in dags {
                let s = scorer.score(&dag)?;
                scores.push((dag, p, s));
            }
            Ok(SearchResult {
                mode,
                posterior: HypothesisPosterior::from_scores(scores),
                classes: None,
                runs: Vec::new(),
            })
        }
        Mode::Acausal => {
            let classes = equivalence_classes(&dags)?;
            let p = 1.0 / classes.len() as f64;
            let mut scores = Vec::with_capacity(classes.len());
            for class in &classes {
                let s = scorer.score(&class.representative)?;
                scores.push((class.representative.clone(), p, s));
            }
            Ok(SearchResult {
                mode,
                posterior: HypothesisPosterior::from_scores(scores),
                classes: Some(classes),
                runs: Vec::new(),
            })
        }
    }
}

/// Settings for [`greedy_search`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreedyConfig {
    pub mode: Mode,
    pub seed: u64,
    /// Random restarts in addition to the run from the empty graph.
    pub restarts: usize,
    pub max_parents: usize,
    pub completion_cap: u128,
}

impl Default for GreedyConfig {
    fn default() -> Self {
        GreedyConfig {
            mode: Mode::Causal,
            seed: 0,
            restarts: 10,
            max_parents: DEFAULT_MAX_PARENTS,
            completion_cap: crate::scoring::DEFAULT_COMPLETION_CAP,
        }
    }
}

/// Uniform draw in `0..n` by rejection.
fn below(rng: &mut ChaCha8Rng, n: usize) -> usize {
    let n = n as u64;
    let zone = u64::MAX - u64::MAX % n;
    loop {
        let v = rng.next_u64();
        if v < zone {
            return (v % n) as usize;
        }
    }
}

/// A random DAG: shuffle the nodes, then keep each forward arc with
/// probability 1/2 while the child has room under `max_parents`.
fn random_dag(nodes: &[String], max_parents: usize, rng: &mut ChaCha8Rng) -> Result<Dag> {
    let n = nodes.len();
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, below(rng, i + 1));
    }
    let mut indegree = vec![0usize; n];
    let mut arcs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let keep = rng.next_u64() >> 63 == 1;
            let (p, c) = (perm[i], perm[j]);
            if keep && indegree[c] < max_parents {
                indegree[c] += 1;
                arcs.push((p, c));
            }
        }
    }
    Dag::new(nodes.to_vec(), arcs)
}

/// Score change of a move, or `None` if the move is not legal.
fn move_delta(
    scorer: &mut Scorer<'_>,
    dag: &Dag,
    current: f64,
    kind: MoveKind,
    a: usize,
    b: usize,
    max_parents: usize,
) -> Result<Option<(Dag, f64)>> {
    let with_parents = |node: usize, add: Option<usize>, remove: Option<usize>| {
        let mut ps: Vec<usize> = dag
            .parents(node)
            .iter()
            .copied()
            .filter(|&p| Some(p) != remove)
            .collect();
        if let Some(x) = add {
            ps.push(x);
            ps.sort_unstable();
        }
        ps
    };
    let next_arcs = |drop: Option<(usize, usize)>, push: Option<(usize, usize)>| {
        dag.arcs()
            .filter(move |&arc| Some(arc) != drop)
            .chain(push)
            .collect::<Vec<_>>()
    };
    let candidate = match kind {
        MoveKind::Add => {
            if dag.adjacent(a, b) || dag.parents(b).len() >= max_parents || dag.reaches(b, a) {
                return Ok(None);
            }
            dag.with_arcs(next_arcs(None, Some((a, b))))?
        }
        MoveKind::Delete => {
            if !dag.has_arc(a, b) {
                return Ok(None);
            }
            dag.with_arcs(next_arcs(Some((a, b)), None))?
        }
        MoveKind::Reverse => {
            if !dag.has_arc(a, b) || dag.parents(a).len() >= max_parents {
                return Ok(None);
            }
            match dag.with_arcs(next_arcs(Some((a, b)), Some((b, a)))) {
                Ok(d) => d,
                Err(Error::CycleDetected(_)) => return Ok(None),
                Err(e) => return Err(e),
            }
        }
    };
    let delta = if scorer.decomposable() {
        match kind {
            MoveKind::Add => {
                scorer.family(b, &with_parents(b, Some(a), None))?
                    - scorer.family(b, dag.parents(b))?
            }
            MoveKind::Delete => {
                scorer.family(b, &with_parents(b, None, Some(a)))?
                    - scorer.family(b, dag.parents(b))?
            }
            MoveKind::Reverse => {
                scorer.family(b, &with_parents(b, None, Some(a)))?
                    - scorer.family(b, dag.parents(b))?
                    + scorer.family(a, &with_parents(a, Some(b), None))?
                    - scorer.family(a, dag.parents(a))?
            }
        }
    } else {
        scorer.score(&candidate)? - current
    };
    Ok(Some((candidate, delta)))
}

/// Hill-climbs from `start` until no single-arc move raises the score.
/// Candidate moves are visited by `(from, to, kind)`; the first move with the
/// largest strictly positive gain is committed.
pub fn climb(scorer: &mut Scorer<'_>, start: Dag, max_parents: usize) -> Result<ClimbRun> {
    const MIN_GAIN: f64 = 1e-12;
    let start_score = scorer.score(&start)?;
    let mut dag = start.clone();
    let mut score = start_score;
    let mut steps = Vec::new();
    let n = dag.len();
    loop {
        let mut best: Option<(MoveKind, usize, usize, Dag, f64)> = None;
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                for kind in [MoveKind::Add, MoveKind::Delete, MoveKind::Reverse] {
                    if let Some((cand, delta)) =
                        move_delta(scorer, &dag, score, kind, a, b, max_parents)?
                    {
                        let better = match &best {
                            None => delta > MIN_GAIN,
                            Some((.., d)) => delta > *d,
                        };
                        if better {
                            best = Some((kind, a, b, cand, delta));
                        }
                    }
                }
            }
        }
        let Some((kind, from, to, next, _)) = best else {
            break;
        };
        let next_score = scorer.score(&next)?;
        if next_score <= score {
            break;
        }
        steps.push(Step {
            kind,
            from,
            to,
            delta: next_score - score,
            score: next_score,
        });
        dag = next;
        score = next_score;
    }
    Ok(ClimbRun {
        start,
        start_score,
        steps,
        end: dag,
        end_score: score,
    })
}

/// Greedy search: one climb from the empty graph plus `restarts` climbs from
/// seeded random DAGs. Hypotheses in the result are the distinct local optima
/// (or their classes in acausal mode), uniform prior.
pub fn greedy_search(
    dataset: &Dataset,
    prior: &PriorModel,
    config: &GreedyConfig,
) -> Result<SearchResult> {
    dataset.check_mode(config.mode)?;
    let mut scorer = Scorer::new(prior, dataset, config.completion_cap)?;
    let nodes = dataset.variable_names();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut runs = Vec::with_capacity(config.restarts + 1);
    runs.push(climb(
        &mut scorer,
        Dag::empty(nodes.clone())?,
        config.max_parents,
    )?);
    for _ in 0..config.restarts {
        let start = random_dag(&nodes, config.max_parents, &mut rng)?;
        runs.push(climb(&mut scorer, start, config.max_parents)?);
    }
    // best first; stable so earlier runs win ties
    runs.sort_by(|a, b| b.end_score.total_cmp(&a.end_score));

    let mut optima: Vec<(Dag, f64)> = Vec::new();
    for run in &runs {
        if !optima.iter().any(|(d, _)| *d == run.end) {
            optima.push((run.end.clone(), run.end_score));
        }
    }
    let (scores, classes) = match config.mode {
        Mode::Causal => {
            let p = 1.0 / optima.len() as f64;
            (
                optima
                    .into_iter()
                    .map(|(d, s)| (d, p, s))
                    .collect::<Vec<_>>(),
                None,
            )
        }
        Mode::Acausal => {
            let dags: Vec<Dag> = optima.iter().map(|(d, _)| d.clone()).collect();
            let classes = equivalence_classes(&dags)?;
            let p = 1.0 / classes.len() as f64;
            let mut scores = Vec::with_capacity(classes.len());
            for class in &classes {
                let s = scorer.score(&class.representative)?;
                scores.push((class.representative.clone(), p, s));
            }
            (scores, Some(classes))
        }
    };
    Ok(SearchResult {
        mode: config.mode,
        posterior: HypothesisPosterior::from_scores(scores),
        classes,
        runs,
    })
}
