//! Independent reference implementations used by the integration tests.
//!
//! Nothing here calls into the library's scoring, prior, equivalence or
//! search code; only the plain data types are shared.

#![allow(dead_code)]

use std::collections::BTreeSet;

use causal_bde::model::{Cpt, Dag, DiscreteNetwork, Observation, Variable};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

pub fn below(rng: &mut ChaCha8Rng, n: usize) -> usize {
    (rng.next_u64() % n as u64) as usize
}

pub fn names(n: usize) -> Vec<String> {
    ["a", "b", "c", "d", "e", "f"][..n]
        .iter()
        .map(|s| s.to_string())
        .collect()
}

/// Row of `r` probabilities, each at least `floor / r` before normalizing.
pub fn random_row(rng: &mut ChaCha8Rng, r: usize, floor: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..r).map(|_| floor + unit(rng)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|p| p / total).collect()
}

/// Random network over `n` variables with arities in `2..=max_arity` and arcs
/// drawn with probability one half along a random node order.
pub fn random_network(rng: &mut ChaCha8Rng, n: usize, max_arity: usize) -> DiscreteNetwork {
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, below(rng, i + 1));
    }
    let mut arcs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if unit(rng) < 0.5 {
                arcs.push((order[a], order[b]));
            }
        }
    }
    random_network_on(rng, n, max_arity, &arcs)
}

pub fn random_network_on(
    rng: &mut ChaCha8Rng,
    n: usize,
    max_arity: usize,
    arcs: &[(usize, usize)],
) -> DiscreteNetwork {
    let arities: Vec<usize> = (0..n).map(|_| 2 + below(rng, max_arity - 1)).collect();
    let vars: Vec<Variable> = names(n)
        .into_iter()
        .zip(&arities)
        .map(|(name, &r)| Variable::with_arity(name, r).unwrap())
        .collect();
    let dag = Dag::new(names(n), arcs.iter().copied()).unwrap();
    let cpts = (0..n)
        .map(|i| {
            let parents = parents_of(arcs, i);
            let q: usize = parents.iter().map(|&p| arities[p]).product();
            let rows = (0..q).map(|_| random_row(rng, arities[i], 0.1)).collect();
            Cpt::new(i, parents, rows)
        })
        .collect();
    DiscreteNetwork::new(vars, dag, cpts).unwrap()
}

/// Parents of `child` in ascending index order.
pub fn parents_of(arcs: &[(usize, usize)], child: usize) -> Vec<usize> {
    let mut out: Vec<usize> = arcs
        .iter()
        .filter(|&&(_, c)| c == child)
        .map(|&(p, _)| p)
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

pub fn arcs_of(dag: &Dag) -> Vec<(usize, usize)> {
    dag.arcs().collect()
}

/// Mixed-radix index, first entry most significant.
pub fn radix(arities: &[usize], states: &[usize]) -> usize {
    arities
        .iter()
        .zip(states)
        .fold(0, |acc, (&r, &s)| acc * r + s)
}

/// Every joint state over `arities`, first variable slowest.
pub fn all_states(arities: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &r in arities {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..r).map(move |k| {
                    let mut v = prefix.clone();
                    v.push(k);
                    v
                })
            })
            .collect();
    }
    out
}

/// Joint of a network by direct product of CPT entries.
pub fn joint(net: &DiscreteNetwork) -> Vec<f64> {
    let arities = net.arities();
    all_states(&arities)
        .iter()
        .map(|x| {
            net.cpts()
                .iter()
                .map(|cpt| {
                    let pa: Vec<usize> = cpt.parents().to_vec();
                    let ar: Vec<usize> = pa.iter().map(|&p| arities[p]).collect();
                    let st: Vec<usize> = pa.iter().map(|&p| x[p]).collect();
                    cpt.row(radix(&ar, &st))[x[cpt.child()]]
                })
                .product()
        })
        .collect()
}

/// Dirichlet exponents `[i][j][k]` for `arcs` from a prior network joint.
pub fn eq8_priors(net: &DiscreteNetwork, ess: f64, arcs: &[(usize, usize)]) -> Vec<Vec<Vec<f64>>> {
    let arities = net.arities();
    let p = joint(net);
    let states = all_states(&arities);
    (0..arities.len())
        .map(|i| {
            let pa = parents_of(arcs, i);
            let ar: Vec<usize> = pa.iter().map(|&v| arities[v]).collect();
            let q: usize = ar.iter().product();
            let mut table = vec![vec![0.0; arities[i]]; q];
            for (x, &px) in states.iter().zip(&p) {
                let st: Vec<usize> = pa.iter().map(|&v| x[v]).collect();
                table[radix(&ar, &st)][x[i]] += px;
            }
            for row in &mut table {
                for v in row.iter_mut() {
                    *v *= ess;
                }
            }
            table
        })
        .collect()
}

pub fn constant_priors(
    arities: &[usize],
    arcs: &[(usize, usize)],
    value: f64,
) -> Vec<Vec<Vec<f64>>> {
    (0..arities.len())
        .map(|i| {
            let q: usize = parents_of(arcs, i).iter().map(|&p| arities[p]).product();
            vec![vec![value; arities[i]]; q]
        })
        .collect()
}

/// Probability of a complete database as the product of one-step-ahead
/// posterior-mean predictives, counts updated after each case. A set
/// variable is neither predicted nor counted in its own family.
pub fn sequential_ml(
    arities: &[usize],
    arcs: &[(usize, usize)],
    priors: &[Vec<Vec<f64>>],
    cases: &[Vec<Observation>],
) -> f64 {
    let mut alpha: Vec<Vec<Vec<f64>>> = priors.to_vec();
    let mut prob = 1.0;
    for case in cases {
        let values: Vec<usize> = case
            .iter()
            .map(|o| match o {
                Observation::Observed(k) | Observation::Set(k) => *k,
                Observation::Missing => panic!("sequential_ml needs complete cases"),
            })
            .collect();
        for i in 0..arities.len() {
            if matches!(case[i], Observation::Set(_)) {
                continue;
            }
            let pa = parents_of(arcs, i);
            let ar: Vec<usize> = pa.iter().map(|&v| arities[v]).collect();
            let st: Vec<usize> = pa.iter().map(|&v| values[v]).collect();
            let row = &mut alpha[i][radix(&ar, &st)];
            let total: f64 = row.iter().sum();
            prob *= row[values[i]] / total;
            row[values[i]] += 1.0;
        }
    }
    prob
}

/// Sum of [`sequential_ml`] over every completion of the missing values.
pub fn brute_force_hidden_ml(
    arities: &[usize],
    arcs: &[(usize, usize)],
    priors: &[Vec<Vec<f64>>],
    cases: &[Vec<Observation>],
) -> f64 {
    let slots: Vec<(usize, usize)> = cases
        .iter()
        .enumerate()
        .flat_map(|(l, c)| {
            c.iter()
                .enumerate()
                .filter(|(_, o)| matches!(o, Observation::Missing))
                .map(move |(i, _)| (l, i))
        })
        .collect();
    let slot_arities: Vec<usize> = slots.iter().map(|&(_, i)| arities[i]).collect();
    all_states(&slot_arities)
        .iter()
        .map(|fill| {
            let mut completed = cases.to_vec();
            for (&(l, i), &k) in slots.iter().zip(fill) {
                completed[l][i] = Observation::Observed(k);
            }
            sequential_ml(arities, arcs, priors, &completed)
        })
        .sum()
}

pub fn has_cycle(n: usize, arcs: &[(usize, usize)]) -> bool {
    // 0 = unvisited, 1 = on stack, 2 = done
    fn visit(v: usize, arcs: &[(usize, usize)], mark: &mut [u8]) -> bool {
        mark[v] = 1;
        for &(p, c) in arcs {
            if p == v && (mark[c] == 1 || (mark[c] == 0 && visit(c, arcs, mark))) {
                return true;
            }
        }
        mark[v] = 2;
        false
    }
    let mut mark = vec![0u8; n];
    (0..n).any(|v| mark[v] == 0 && visit(v, arcs, &mut mark))
}

/// Every acyclic subset of the `n (n - 1)` possible arcs.
pub fn brute_force_dags(n: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b)))
        .collect();
    (0u64..1 << pairs.len())
        .map(|mask| {
            pairs
                .iter()
                .enumerate()
                .filter(|(bit, _)| mask >> bit & 1 == 1)
                .map(|(_, &arc)| arc)
                .collect::<Vec<_>>()
        })
        .filter(|arcs| !has_cycle(n, arcs))
        .collect()
}

fn descendants(n: usize, arcs: &[(usize, usize)], v: usize) -> Vec<bool> {
    let mut seen = vec![false; n];
    let mut stack = vec![v];
    while let Some(u) = stack.pop() {
        if !seen[u] {
            seen[u] = true;
            stack.extend(arcs.iter().filter(|a| a.0 == u).map(|a| a.1));
        }
    }
    seen
}

/// Whether every path between `a` and `b` is blocked by `given`, checked by
/// walking all simple paths of the skeleton.
pub fn d_separated(n: usize, arcs: &[(usize, usize)], a: usize, b: usize, given: &[bool]) -> bool {
    let adj = |u: usize, v: usize| arcs.contains(&(u, v)) || arcs.contains(&(v, u));
    let desc: Vec<Vec<bool>> = (0..n).map(|v| descendants(n, arcs, v)).collect();
    let opens = |prev: usize, mid: usize, next: usize| {
        let collider = arcs.contains(&(prev, mid)) && arcs.contains(&(next, mid));
        if collider {
            (0..n).any(|d| desc[mid][d] && given[d])
        } else {
            !given[mid]
        }
    };
    fn walk(
        path: &mut Vec<usize>,
        target: usize,
        n: usize,
        adj: &dyn Fn(usize, usize) -> bool,
        opens: &dyn Fn(usize, usize, usize) -> bool,
    ) -> bool {
        let last = *path.last().unwrap();
        if last == target {
            return path.windows(3).all(|w| opens(w[0], w[1], w[2]));
        }
        for next in 0..n {
            if adj(last, next) && !path.contains(&next) {
                path.push(next);
                let found = walk(path, target, n, adj, opens);
                path.pop();
                if found {
                    return true;
                }
            }
        }
        false
    }
    !walk(&mut vec![a], b, n, &adj, &opens)
}

/// All d-separation statements `(a, b, conditioning mask)` with `a < b`.
pub fn independence_model(n: usize, arcs: &[(usize, usize)]) -> BTreeSet<(usize, usize, u32)> {
    let mut out = BTreeSet::new();
    for a in 0..n {
        for b in a + 1..n {
            for mask in 0u32..1 << n {
                if mask >> a & 1 == 1 || mask >> b & 1 == 1 {
                    continue;
                }
                let given: Vec<bool> = (0..n).map(|v| mask >> v & 1 == 1).collect();
                if d_separated(n, arcs, a, b, &given) {
                    out.insert((a, b, mask));
                }
            }
        }
    }
    out
}

/// Cases drawn uniformly at random, all observed.
pub fn random_cases(rng: &mut ChaCha8Rng, arities: &[usize], m: usize) -> Vec<Vec<usize>> {
    (0..m)
        .map(|_| arities.iter().map(|&r| below(rng, r)).collect())
        .collect()
}

/// Whether `|count / n - p|` is within `sigmas` binomial standard deviations.
pub fn within_sigma(count: usize, n: usize, p: f64, sigmas: f64) -> bool {
    let sd = (p * (1.0 - p) / n as f64).sqrt();
    (count as f64 / n as f64 - p).abs() <= sigmas * sd
}

/// Random cases: each value is `Set` with probability `set_rate`, otherwise
/// observed; variables in `hidden` are always missing.
pub fn random_observations(
    rng: &mut ChaCha8Rng,
    arities: &[usize],
    m: usize,
    set_rate: f64,
    hidden: &[usize],
) -> Vec<Vec<Observation>> {
    (0..m)
        .map(|_| {
            arities
                .iter()
                .enumerate()
                .map(|(i, &r)| {
                    if hidden.contains(&i) {
                        Observation::Missing
                    } else if unit(rng) < set_rate {
                        Observation::Set(below(rng, r))
                    } else {
                        Observation::Observed(below(rng, r))
                    }
                })
                .collect()
        })
        .collect()
}

pub fn dataset(
    net: &DiscreteNetwork,
    cases: &[Vec<Observation>],
    hidden: &[usize],
) -> causal_bde::Dataset {
    causal_bde::Dataset::new(
        net.variables().to_vec(),
        cases.iter().cloned().map(causal_bde::Case::new).collect(),
        hidden,
    )
    .unwrap()
}

/// A uniformly chosen DAG on `n` nodes from the brute-force list.
pub fn random_structure(rng: &mut ChaCha8Rng, n: usize) -> Dag {
    let all = brute_force_dags(n);
    let arcs = all[below(rng, all.len())].clone();
    Dag::new(names(n), arcs).unwrap()
}
