//! Variables, DAG structures, conditional probability tables and cases.
//!
//! State identity is positional: state `k` of a variable is the `k`-th label
//! in its declared list. Parent configurations are encoded mixed-radix with
//! the first listed parent most significant, so for parents `[a, b]` with
//! arities `[2, 3]` the assignment `a = 1, b = 2` has index `1 * 3 + 2 = 5`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Default cap on the number of joint states enumerated densely.
pub const DEFAULT_JOINT_CAP: u128 = 1 << 20;

/// Row-sum tolerance accepted when loading a table.
pub const CPT_LOAD_TOLERANCE: f64 = 1e-9;

/// Whether hypotheses are read causally (one per DAG) or acausally (one per
/// Markov equivalence class).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Causal,
    Acausal,
}

/// A categorical variable with at least two named states.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Variable {
    name: String,
    states: Vec<String>,
}

impl Variable {
    pub fn new(name: impl Into<String>, states: Vec<String>) -> Result<Self> {
        let name = name.into();
        if states.len() < 2 {
            return Err(Error::TooFewStates(name));
        }
        let mut seen = BTreeSet::new();
        for s in &states {
            if !seen.insert(s.as_str()) {
                return Err(Error::DuplicateState {
                    variable: name,
                    state: s.clone(),
                });
            }
        }
        Ok(Variable { name, states })
    }

    /// A variable with states `"0", "1", ..., "r-1"`.
    pub fn with_arity(name: impl Into<String>, arity: usize) -> Result<Self> {
        Self::new(name, (0..arity).map(|k| k.to_string()).collect())
    }

    pub fn binary(name: impl Into<String>) -> Self {
        Self::with_arity(name, 2).expect("two states")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn arity(&self) -> usize {
        self.states.len()
    }

    pub fn state_index(&self, label: &str) -> Option<usize> {
        self.states.iter().position(|s| s == label)
    }
}

/// Product of arities, saturating instead of overflowing.
pub fn state_space_size(arities: &[usize]) -> u128 {
    arities
        .iter()
        .fold(1u128, |acc, &r| acc.saturating_mul(r as u128))
}

/// Mixed-radix index of `states` (first entry most significant).
pub fn parent_config_index(arities: &[usize], states: &[usize]) -> Result<usize> {
    if arities.len() != states.len() {
        return Err(Error::ArityMismatch(format!(
            "{} parents but {} states supplied",
            arities.len(),
            states.len()
        )));
    }
    let mut j = 0usize;
    for (pos, (&r, &s)) in arities.iter().zip(states).enumerate() {
        if s >= r {
            return Err(Error::StateOutOfRange {
                variable: format!("parent #{pos}"),
                index: s,
                arity: r,
            });
        }
        j = j * r + s;
    }
    Ok(j)
}

/// Inverse of [`parent_config_index`].
pub fn decode_parent_config(arities: &[usize], index: usize) -> Result<Vec<usize>> {
    let q = state_space_size(arities);
    if index as u128 >= q {
        return Err(Error::ArityMismatch(format!(
            "configuration index {index} out of range for {q} configurations"
        )));
    }
    let mut states = vec![0; arities.len()];
    let mut rest = index;
    for (slot, &r) in states.iter_mut().zip(arities).rev() {
        *slot = rest % r;
        rest /= r;
    }
    Ok(states)
}

/// Steps `states` to the next mixed-radix configuration, last entry fastest.
/// Returns `false` after wrapping around to all zeros.
pub(crate) fn next_config(states: &mut [usize], arities: &[usize]) -> bool {
    for (s, &r) in states.iter_mut().zip(arities).rev() {
        *s += 1;
        if *s < r {
            return true;
        }
        *s = 0;
    }
    false
}

/// Mixed-radix index of the values of `vars` read from a full assignment.
pub(crate) fn config_of(vars: &[usize], arities: &[usize], assignment: &[usize]) -> usize {
    vars.iter()
        .fold(0usize, |j, &v| j * arities[v] + assignment[v])
}

/// Checks a graph given by node names and named arcs; returns a topological
/// order of node indices on success.
pub fn validate_dag(nodes: &[String], arcs: &[(String, String)]) -> Result<Vec<usize>> {
    let dag = Dag::from_names(nodes.to_vec(), arcs)?;
    Ok(dag.topological_order().to_vec())
}

/// A directed acyclic graph over named nodes.
///
/// Parent lists are kept sorted by node index; that order is the parent
/// order used for counts and priors built against this structure.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dag {
    nodes: Vec<String>,
    arcs: BTreeSet<(usize, usize)>,
    parents: Vec<Vec<usize>>,
    order: Vec<usize>,
}

impl Dag {
    pub fn new(nodes: Vec<String>, arcs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let n = nodes.len();
        let mut seen = BTreeSet::new();
        for name in &nodes {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateNode(name.clone()));
            }
        }
        let mut set = BTreeSet::new();
        for (p, c) in arcs {
            if p >= n {
                return Err(Error::UnknownNode(format!("#{p}")));
            }
            if c >= n {
                return Err(Error::UnknownNode(format!("#{c}")));
            }
            if p == c {
                return Err(Error::SelfArc(nodes[p].clone()));
            }
            if !set.insert((p, c)) {
                return Err(Error::DuplicateArc(nodes[p].clone(), nodes[c].clone()));
            }
        }
        let mut parents = vec![Vec::new(); n];
        for &(p, c) in &set {
            parents[c].push(p);
        }
        let order = match topological_sort(n, &set) {
            Some(order) => order,
            None => {
                let cycle = find_cycle(n, &set)
                    .into_iter()
                    .map(|i| nodes[i].clone())
                    .collect();
                return Err(Error::CycleDetected(cycle));
            }
        };
        Ok(Dag {
            nodes,
            arcs: set,
            parents,
            order,
        })
    }

    pub fn from_names<S: AsRef<str>>(nodes: Vec<String>, arcs: &[(S, S)]) -> Result<Self> {
        let index: BTreeMap<&str, usize> = nodes
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let lookup = |s: &S| {
            index
                .get(s.as_ref())
                .copied()
                .ok_or_else(|| Error::UnknownNode(s.as_ref().to_string()))
        };
        let mut indexed = Vec::with_capacity(arcs.len());
        for (p, c) in arcs {
            indexed.push((lookup(p)?, lookup(c)?));
        }
        Dag::new(nodes, indexed)
    }

    pub fn empty(nodes: Vec<String>) -> Result<Self> {
        Dag::new(nodes, core::iter::empty())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == name)
    }

    /// Arcs as `(parent, child)` index pairs in ascending order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.arcs.iter().copied()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn has_arc(&self, parent: usize, child: usize) -> bool {
        self.arcs.contains(&(parent, child))
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.has_arc(a, b) || self.has_arc(b, a)
    }

    pub fn parents(&self, node: usize) -> &[usize] {
        &self.parents[node]
    }

    pub fn topological_order(&self) -> &[usize] {
        &self.order
    }

    /// Whether a directed path `from ~> to` exists (a node reaches itself).
    pub fn reaches(&self, from: usize, to: usize) -> bool {
        let mut stack = vec![from];
        let mut seen = vec![false; self.len()];
        while let Some(v) = stack.pop() {
            if v == to {
                return true;
            }
            if core::mem::replace(&mut seen[v], true) {
                continue;
            }
            for &(p, c) in self.arcs.range((v, 0)..(v + 1, 0)) {
                debug_assert_eq!(p, v);
                if !seen[c] {
                    stack.push(c);
                }
            }
        }
        false
    }

    /// Descendants of `node`, excluding itself.
    pub fn descendants(&self, node: usize) -> BTreeSet<usize> {
        (0..self.len())
            .filter(|&v| v != node && self.reaches(node, v))
            .collect()
    }

    /// Same node set with a different arc set.
    pub fn with_arcs(&self, arcs: impl IntoIterator<Item = (usize, usize)>) -> Result<Dag> {
        Dag::new(self.nodes.clone(), arcs)
    }

    /// The arc-set code: bit `parent * n + child` set for every arc.
    pub fn arc_code(&self) -> ArcCode {
        let n = self.len();
        let mut bits: Vec<usize> = self.arcs.iter().map(|&(p, c)| p * n + c).collect();
        bits.sort_unstable_by(|a, b| b.cmp(a));
        ArcCode(bits)
    }

    pub fn arc_labels(&self) -> Vec<(String, String)> {
        self.arcs
            .iter()
            .map(|&(p, c)| (self.nodes[p].clone(), self.nodes[c].clone()))
            .collect()
    }
}

impl core::fmt::Display for Dag {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        if self.arcs.is_empty() {
            return f.write_str("(no arcs)");
        }
        for (i, &(p, c)) in self.arcs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}->{}", self.nodes[p], self.nodes[c])?;
        }
        Ok(())
    }
}

/// Arc-set code compared as an unsigned integer with bit `parent * n + child`
/// set for every arc. Stored as the set bit positions in descending order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ArcCode(Vec<usize>);

impl ArcCode {
    /// The code as an integer, when it fits.
    pub fn as_u128(&self) -> Option<u128> {
        self.0
            .iter()
            .try_fold(0u128, |acc, &b| (b < 128).then(|| acc | (1u128 << b)))
    }
}

impl Ord for ArcCode {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            if a != b {
                return a.cmp(b);
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl PartialOrd for ArcCode {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

fn topological_sort(n: usize, arcs: &BTreeSet<(usize, usize)>) -> Option<Vec<usize>> {
    let mut indegree = vec![0usize; n];
    for &(_, c) in arcs {
        indegree[c] += 1;
    }
    let mut ready: BTreeSet<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = ready.pop_first() {
        order.push(v);
        for &(_, c) in arcs.range((v, 0)..(v + 1, 0)) {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.insert(c);
            }
        }
    }
    (order.len() == n).then_some(order)
}

/// Returns the nodes of one directed cycle, first node repeated at the end.
fn find_cycle(n: usize, arcs: &BTreeSet<(usize, usize)>) -> Vec<usize> {
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut color = vec![0u8; n];
    let mut path = Vec::new();
    fn visit(
        v: usize,
        arcs: &BTreeSet<(usize, usize)>,
        color: &mut [u8],
        path: &mut Vec<usize>,
    ) -> Option<Vec<usize>> {
        color[v] = 1;
        path.push(v);
        for &(_, c) in arcs.range((v, 0)..(v + 1, 0)) {
            match color[c] {
                1 => {
                    let start = path.iter().position(|&x| x == c).unwrap_or(0);
                    let mut cycle = path[start..].to_vec();
                    cycle.push(c);
                    return Some(cycle);
                }
                0 => {
                    if let Some(cycle) = visit(c, arcs, color, path) {
                        return Some(cycle);
                    }
                }
                _ => {}
            }
        }
        path.pop();
        color[v] = 2;
        None
    }
    for v in 0..n {
        if color[v] == 0 {
            if let Some(cycle) = visit(v, arcs, &mut color, &mut path) {
                return cycle;
            }
        }
    }
    Vec::new()
}

/// Conditional probability table for one child given an ordered parent list.
///
/// `table` holds `q` rows of `r` probabilities, row `j` addressed by
/// [`parent_config_index`] over `parents` in the listed order.
#[derive(Debug, Clone, PartialEq)]
pub struct Cpt {
    child: usize,
    parents: Vec<usize>,
    rows: Vec<Vec<f64>>,
}

impl Cpt {
    pub fn new(child: usize, parents: Vec<usize>, rows: Vec<Vec<f64>>) -> Self {
        Cpt {
            child,
            parents,
            rows,
        }
    }

    pub fn child(&self) -> usize {
        self.child
    }

    pub fn parents(&self) -> &[usize] {
        &self.parents
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.rows[j]
    }
}

/// A DAG over categorical variables with one CPT per variable.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteNetwork {
    variables: Vec<Variable>,
    dag: Dag,
    cpts: Vec<Cpt>,
}

impl DiscreteNetwork {
    /// Builds a network. `cpts` may come in any order; each CPT's parent set
    /// must equal the DAG parents of its child (the listed order may differ).
    /// Rows must be strictly positive and sum to one within
    /// [`CPT_LOAD_TOLERANCE`]; rows off by more than 1e-12 are renormalized.
    pub fn new(variables: Vec<Variable>, dag: Dag, cpts: Vec<Cpt>) -> Result<Self> {
        let names: Vec<&str> = variables.iter().map(Variable::name).collect();
        if names.len() != dag.len() || names.iter().zip(dag.nodes()).any(|(a, b)| *a != b) {
            return Err(Error::VariableMismatch(
                "DAG nodes must list the network variables in the same order".into(),
            ));
        }
        let arities: Vec<usize> = variables.iter().map(Variable::arity).collect();
        let mut slots: Vec<Option<Cpt>> = vec![None; variables.len()];
        for mut cpt in cpts {
            let name = variables
                .get(cpt.child)
                .ok_or_else(|| Error::UnknownNode(format!("#{}", cpt.child)))?
                .name()
                .to_string();
            let invalid = |reason: String| Error::InvalidCpt {
                variable: name.clone(),
                reason,
            };
            if slots[cpt.child].is_some() {
                return Err(invalid("more than one table".into()));
            }
            let mut listed: Vec<usize> = cpt.parents.clone();
            listed.sort_unstable();
            let before = listed.len();
            listed.dedup();
            if listed.len() != before || listed != dag.parents(cpt.child) {
                return Err(invalid("parent list does not match the graph".into()));
            }
            let parent_arities: Vec<usize> = cpt.parents.iter().map(|&p| arities[p]).collect();
            let q = state_space_size(&parent_arities);
            if cpt.rows.len() as u128 != q {
                return Err(invalid(format!(
                    "expected {q} rows, found {}",
                    cpt.rows.len()
                )));
            }
            let r = arities[cpt.child];
            for (j, row) in cpt.rows.iter_mut().enumerate() {
                if row.len() != r {
                    return Err(invalid(format!(
                        "row {j} has {} entries, expected {r}",
                        row.len()
                    )));
                }
                if let Some(bad) = row.iter().find(|&&p| !(p > 0.0 && p.is_finite())) {
                    return Err(invalid(format!("row {j} has non-positive entry {bad}")));
                }
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > CPT_LOAD_TOLERANCE {
                    return Err(invalid(format!("row {j} sums to {sum}")));
                }
                if (sum - 1.0).abs() > 1e-12 {
                    row.iter_mut().for_each(|p| *p /= sum);
                }
            }
            let child = cpt.child;
            slots[child] = Some(cpt);
        }
        let cpts = slots
            .into_iter()
            .enumerate()
            .map(|(i, c)| {
                c.ok_or_else(|| Error::InvalidCpt {
                    variable: variables[i].name().to_string(),
                    reason: "no table given".into(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DiscreteNetwork {
            variables,
            dag,
            cpts,
        })
    }

    /// A network over `variables` where every variable is independent and
    /// uniform; its joint is uniform.
    pub fn uniform(variables: Vec<Variable>) -> Result<Self> {
        let names = variables.iter().map(|v| v.name().to_string()).collect();
        let dag = Dag::empty(names)?;
        let cpts = variables
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let r = v.arity();
                Cpt::new(i, Vec::new(), vec![vec![1.0 / r as f64; r]])
            })
            .collect();
        DiscreteNetwork::new(variables, dag, cpts)
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name() == name)
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn cpt(&self, node: usize) -> &Cpt {
        &self.cpts[node]
    }

    pub fn cpts(&self) -> &[Cpt] {
        &self.cpts
    }

    pub fn arities(&self) -> Vec<usize> {
        self.variables.iter().map(Variable::arity).collect()
    }

    /// The CPT row of `node` at the parent values found in `assignment`.
    pub fn row_at(&self, node: usize, assignment: &[usize]) -> &[f64] {
        let cpt = &self.cpts[node];
        let j = cpt.parents.iter().fold(0usize, |j, &p| {
            j * self.variables[p].arity() + assignment[p]
        });
        &cpt.rows[j]
    }
}

/// Dense joint distribution over variables in declared order, mixed-radix
/// with the first variable most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    arities: Vec<usize>,
    probs: Vec<f64>,
}

impl JointDistribution {
    pub fn new(arities: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        if state_space_size(&arities) != probs.len() as u128 {
            return Err(Error::ArityMismatch(format!(
                "{} probabilities for {} joint states",
                probs.len(),
                state_space_size(&arities)
            )));
        }
        Ok(JointDistribution { arities, probs })
    }

    pub fn arities(&self) -> &[usize] {
        &self.arities
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn prob(&self, states: &[usize]) -> Result<f64> {
        Ok(self.probs[parent_config_index(&self.arities, states)?])
    }

    /// Marginal over `vars` (in the given order), laid out mixed-radix.
    pub fn marginal(&self, vars: &[usize]) -> Vec<f64> {
        let sub: Vec<usize> = vars.iter().map(|&v| self.arities[v]).collect();
        let mut out = vec![0.0; state_space_size(&sub) as usize];
        let mut states = vec![0usize; self.arities.len()];
        for &p in &self.probs {
            out[config_of(vars, &self.arities, &states)] += p;
            next_config(&mut states, &self.arities);
        }
        out
    }
}

/// Exact joint of a network by enumeration of every joint state.
pub fn joint_from_network(net: &DiscreteNetwork, cap: u128) -> Result<JointDistribution> {
    let arities = net.arities();
    let states_total = state_space_size(&arities);
    if states_total > cap {
        return Err(Error::StateSpaceTooLarge {
            states: states_total,
            cap,
        });
    }
    let mut probs = Vec::with_capacity(states_total as usize);
    let mut states = vec![0usize; arities.len()];
    loop {
        let p = (0..arities.len())
            .map(|i| net.row_at(i, &states)[states[i]])
            .product();
        probs.push(p);
        if !next_config(&mut states, &arities) {
            break;
        }
    }
    Ok(JointDistribution { arities, probs })
}

/// Status of one variable in one case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Observation {
    /// Seen in state `k` without intervention.
    Observed(usize),
    /// Set to state `k` by an intervention.
    Set(usize),
    /// Not seen.
    Missing,
}

impl Observation {
    pub fn value(self) -> Option<usize> {
        match self {
            Observation::Observed(k) | Observation::Set(k) => Some(k),
            Observation::Missing => None,
        }
    }

    pub fn is_set(self) -> bool {
        matches!(self, Observation::Set(_))
    }

    pub fn is_missing(self) -> bool {
        matches!(self, Observation::Missing)
    }
}

/// One case: an observation per dataset variable, in variable order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Case(Vec<Observation>);

impl Case {
    pub fn new(values: Vec<Observation>) -> Self {
        Case(values)
    }

    pub fn observed(states: &[usize]) -> Self {
        Case(states.iter().map(|&k| Observation::Observed(k)).collect())
    }

    pub fn get(&self, i: usize) -> Observation {
        self.0[i]
    }

    pub fn values(&self) -> &[Observation] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.0.iter().all(|o| !o.is_missing())
    }

    pub fn is_experimental(&self) -> bool {
        self.0.iter().any(|o| o.is_set())
    }

    /// State values when the case is complete.
    pub fn states(&self) -> Option<Vec<usize>> {
        self.0.iter().map(|o| o.value()).collect()
    }
}

/// An ordered list of cases over declared variables, with hidden variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    variables: Vec<Variable>,
    cases: Vec<Case>,
    hidden: BTreeSet<usize>,
}

impl Dataset {
    pub fn new(variables: Vec<Variable>, cases: Vec<Case>, hidden: &[usize]) -> Result<Self> {
        let mut ds = Dataset {
            variables,
            cases: Vec::new(),
            hidden: hidden.iter().copied().collect(),
        };
        if let Some(&h) = ds.hidden.iter().find(|&&h| h >= ds.variables.len()) {
            return Err(Error::UnknownNode(format!("#{h}")));
        }
        for case in cases {
            ds.push(case)?;
        }
        Ok(ds)
    }

    pub fn empty(variables: Vec<Variable>) -> Self {
        Dataset {
            variables,
            cases: Vec::new(),
            hidden: BTreeSet::new(),
        }
    }

    pub fn push(&mut self, case: Case) -> Result<()> {
        let at = self.cases.len();
        if case.len() != self.variables.len() {
            return Err(Error::InvalidDataset(format!(
                "case {at} has {} values for {} variables",
                case.len(),
                self.variables.len()
            )));
        }
        for (i, (obs, var)) in case.values().iter().zip(&self.variables).enumerate() {
            if let Some(k) = obs.value() {
                if k >= var.arity() {
                    return Err(Error::StateOutOfRange {
                        variable: var.name().to_string(),
                        index: k,
                        arity: var.arity(),
                    });
                }
            }
            if self.hidden.contains(&i) && !obs.is_missing() {
                return Err(Error::InvalidDataset(format!(
                    "case {at}: hidden variable `{}` has a value",
                    var.name()
                )));
            }
        }
        self.cases.push(case);
        Ok(())
    }

    /// Marks `name` hidden and blanks it in every case.
    pub fn hide(&mut self, name: &str) -> Result<()> {
        let i = self
            .variable_index(name)
            .ok_or_else(|| Error::UnknownNode(name.to_string()))?;
        self.hidden.insert(i);
        for case in &mut self.cases {
            case.0[i] = Observation::Missing;
        }
        Ok(())
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable_names(&self) -> Vec<String> {
        self.variables
            .iter()
            .map(|v| v.name().to_string())
            .collect()
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name() == name)
    }

    pub fn arities(&self) -> Vec<usize> {
        self.variables.iter().map(Variable::arity).collect()
    }

    pub fn cases(&self) -> &[Case] {
        &self.cases
    }

    pub fn len(&self) -> usize {
        self.cases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cases.is_empty()
    }

    pub fn hidden(&self) -> &BTreeSet<usize> {
        &self.hidden
    }

    pub fn has_missing(&self) -> bool {
        self.cases.iter().any(|c| !c.is_complete())
    }

    pub fn has_interventions(&self) -> bool {
        self.cases.iter().any(Case::is_experimental)
    }

    /// First `(case, variable)` holding a `Set` value.
    pub fn first_intervention(&self) -> Option<(usize, usize)> {
        self.cases
            .iter()
            .enumerate()
            .find_map(|(l, c)| c.values().iter().position(|o| o.is_set()).map(|i| (l, i)))
    }

    /// The first `n` cases as a new dataset.
    pub fn prefix(&self, n: usize) -> Dataset {
        Dataset {
            variables: self.variables.clone(),
            cases: self.cases[..n.min(self.cases.len())].to_vec(),
            hidden: self.hidden.clone(),
        }
    }

    /// Cases with no `Set` values only.
    pub fn observational_only(&self) -> Dataset {
        Dataset {
            variables: self.variables.clone(),
            cases: self
                .cases
                .iter()
                .filter(|c| !c.is_experimental())
                .cloned()
                .collect(),
            hidden: self.hidden.clone(),
        }
    }

    pub fn with_case(&self, case: Case) -> Result<Dataset> {
        let mut out = self.clone();
        out.push(case)?;
        Ok(out)
    }

    /// Errors if the dataset holds interventions and `mode` is acausal.
    pub fn check_mode(&self, mode: Mode) -> Result<()> {
        if mode == Mode::Acausal {
            if let Some((case, var)) = self.first_intervention() {
                return Err(Error::InterventionInAcausalMode {
                    case,
                    variable: self.variables[var].name().to_string(),
                });
            }
        }
        Ok(())
    }
}
