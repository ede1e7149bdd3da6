//! Markov equivalence of DAGs: two DAGs are equivalent iff they share a
//! skeleton and the same set of v-structures.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::Dag;

/// Undirected edges `(a, b)` with `a < b`.
pub fn skeleton(dag: &Dag) -> BTreeSet<(usize, usize)> {
    dag.arcs().map(|(p, c)| (p.min(c), p.max(c))).collect()
}

/// Triples `(a, c, b)` with `a -> c <- b`, `a` and `b` nonadjacent, `a < b`.
pub fn v_structures(dag: &Dag) -> BTreeSet<(usize, usize, usize)> {
    let mut out = BTreeSet::new();
    for c in 0..dag.len() {
        let parents = dag.parents(c);
        for (x, &a) in parents.iter().enumerate() {
            for &b in &parents[x + 1..] {
                if !dag.adjacent(a, b) {
                    out.insert((a.min(b), c, a.max(b)));
                }
            }
        }
    }
    out
}

pub fn equivalent(d1: &Dag, d2: &Dag) -> Result<bool> {
    if d1.nodes() != d2.nodes() {
        return Err(Error::NodeSetMismatch);
    }
    Ok(skeleton(d1) == skeleton(d2) && v_structures(d1) == v_structures(d2))
}

/// A set of mutually equivalent DAGs.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceClass {
    /// Member with the smallest arc code.
    pub representative: Dag,
    /// Members sorted by arc code.
    pub members: Vec<Dag>,
    pub skeleton: BTreeSet<(usize, usize)>,
    pub v_structures: BTreeSet<(usize, usize, usize)>,
}

impl EquivalenceClass {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, dag: &Dag) -> bool {
        self.members.iter().any(|m| m == dag)
    }
}

/// Partitions `dags` into equivalence classes. Members within a class and the
/// classes themselves are ordered by [`Dag::arc_code`] of their smallest
/// member. Duplicate input DAGs are kept once.
pub fn equivalence_classes(dags: &[Dag]) -> Result<Vec<EquivalenceClass>> {
    if let Some(first) = dags.first() {
        if dags.iter().any(|d| d.nodes() != first.nodes()) {
            return Err(Error::NodeSetMismatch);
        }
    }
    let mut sorted: Vec<&Dag> = dags.iter().collect();
    sorted.sort_by_cached_key(|d| d.arc_code());
    sorted.dedup();

    type Key = (BTreeSet<(usize, usize)>, BTreeSet<(usize, usize, usize)>);
    let mut classes: Vec<(Key, Vec<Dag>)> = Vec::new();
    for dag in sorted {
        let key = (skeleton(dag), v_structures(dag));
        match classes.iter_mut().find(|(k, _)| *k == key) {
            Some((_, members)) => members.push(dag.clone()),
            None => classes.push((key, alloc::vec![dag.clone()])),
        }
    }
    Ok(classes
        .into_iter()
        .map(|((skeleton, v_structures), members)| EquivalenceClass {
            representative: members[0].clone(),
            members,
            skeleton,
            v_structures,
        })
        .collect())
}
