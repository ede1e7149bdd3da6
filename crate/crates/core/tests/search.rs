mod common;

use causal_bde::causal_sim::{simulate, Regime, SetDecision};
use causal_bde::model::{Cpt, DiscreteNetwork, Variable, DEFAULT_JOINT_CAP};
use causal_bde::priors::{PriorModel, DEFAULT_EPSILON};
use causal_bde::scoring::DEFAULT_COMPLETION_CAP;
use causal_bde::search::{
    climb, exhaustive_posterior, greedy_search, GreedyConfig, Scorer, DEFAULT_ENUMERATION_CAP,
};
use causal_bde::{Dag, Dataset, Mode};
use common::*;

const CAP: u128 = DEFAULT_COMPLETION_CAP;

fn xy_truth() -> DiscreteNetwork {
    let vars = vec![Variable::binary("x"), Variable::binary("y")];
    let dag = Dag::new(vec!["x".into(), "y".into()], [(0, 1)]).unwrap();
    DiscreteNetwork::new(
        vars,
        dag,
        vec![
            Cpt::new(0, vec![], vec![vec![0.4, 0.6]]),
            Cpt::new(1, vec![0], vec![vec![0.85, 0.15], vec![0.2, 0.8]]),
        ],
    )
    .unwrap()
}

fn uniform_prior(net: &DiscreteNetwork, ess: f64) -> PriorModel {
    let flat = DiscreteNetwork::uniform(net.variables().to_vec()).unwrap();
    PriorModel::from_prior_network(&flat, ess, DEFAULT_JOINT_CAP).unwrap()
}

#[test]
fn greedy_finds_the_exhaustive_optimum() {
    let mut hits = 0;
    let mut g = rng(2024);
    for instance in 0..100u64 {
        let n = 2 + below(&mut g, 2);
        let truth = random_network(&mut g, n, 3);
        let m = 20 + below(&mut g, 200);
        let data = simulate(&truth, &Regime::observational(n), m, instance).unwrap();
        let prior = uniform_prior(&truth, 1.0 + 9.0 * unit(&mut g));
        let exhaustive = exhaustive_posterior(
            &data,
            &prior,
            Mode::Causal,
            None,
            DEFAULT_ENUMERATION_CAP,
            CAP,
        )
        .unwrap();
        let top = exhaustive
            .posterior
            .entries()
            .iter()
            .map(|e| e.log_ml)
            .fold(f64::NEG_INFINITY, f64::max);
        let config = GreedyConfig {
            seed: instance,
            restarts: 10,
            ..GreedyConfig::default()
        };
        let greedy = greedy_search(&data, &prior, &config).unwrap();
        if (greedy.runs[0].end_score - top).abs() <= 1e-9 * top.abs().max(1.0) {
            hits += 1;
        }
    }
    assert!(hits >= 95, "greedy matched exhaustive on {hits} of 100");
}

#[test]
fn empty_graph_is_optimal_without_data() {
    let vars: Vec<Variable> = names(3).into_iter().map(Variable::binary).collect();
    let data = Dataset::empty(vars.clone());
    let prior = PriorModel::uninformative(names(3), vec![2; 3], DEFAULT_EPSILON).unwrap();
    let mut scorer = Scorer::new(&prior, &data, CAP).unwrap();
    let empty = Dag::empty(names(3)).unwrap();
    let base = scorer.score(&empty).unwrap();
    for a in 0..3 {
        for b in 0..3 {
            if a != b {
                let next = Dag::new(names(3), [(a, b)]).unwrap();
                assert!(scorer.score(&next).unwrap() <= base);
            }
        }
    }
    let run = climb(&mut scorer, empty.clone(), 3).unwrap();
    assert!(run.steps.is_empty());
    assert_eq!(run.end, empty);
}

#[test]
fn greedy_traces_are_deterministic_and_increasing() {
    let mut g = rng(99);
    let truth = random_network(&mut g, 4, 2);
    let data = simulate(&truth, &Regime::observational(4), 300, 1).unwrap();
    let prior = uniform_prior(&truth, 2.0);
    let config = GreedyConfig {
        seed: 17,
        restarts: 5,
        ..GreedyConfig::default()
    };
    let a = greedy_search(&data, &prior, &config).unwrap();
    let b = greedy_search(&data, &prior, &config).unwrap();
    assert_eq!(a, b);
    for run in &a.runs {
        let mut score = run.start_score;
        for step in &run.steps {
            assert!(step.delta > 0.0);
            assert!(step.score > score);
            score = step.score;
        }
        assert!(run.end_score >= run.start_score);
    }
}

#[test]
fn observational_data_leaves_direction_open_and_experiments_settle_it() {
    let truth = xy_truth();
    let prior = uniform_prior(&truth, 4.0);
    let observational = simulate(&truth, &Regime::observational(2), 2000, 7).unwrap();

    let acausal = exhaustive_posterior(
        &observational,
        &prior,
        Mode::Acausal,
        None,
        DEFAULT_ENUMERATION_CAP,
        CAP,
    )
    .unwrap();
    let top = acausal.ranked()[0].id;
    let class = acausal.class(top).unwrap();
    let forward = Dag::new(truth.dag().nodes().to_vec(), [(0, 1)]).unwrap();
    let backward = Dag::new(truth.dag().nodes().to_vec(), [(1, 0)]).unwrap();
    assert_eq!(class.members, [forward.clone(), backward.clone()]);

    let causal_obs = exhaustive_posterior(
        &observational,
        &prior,
        Mode::Causal,
        None,
        DEFAULT_ENUMERATION_CAP,
        CAP,
    )
    .unwrap();
    let post = |r: &causal_bde::search::SearchResult, d: &Dag| {
        r.posterior
            .entries()
            .iter()
            .find(|e| e.structure == *d)
            .unwrap()
            .posterior
    };
    assert!((post(&causal_obs, &forward) - post(&causal_obs, &backward)).abs() < 1e-9);

    // extend with 400 cases that set x at random
    let mut g = rng(7);
    let regime = Regime::PerCase(
        (0..400)
            .map(|_| vec![SetDecision::Set(below(&mut g, 2)), SetDecision::DoNothing])
            .collect(),
    );
    let experimental = simulate(&truth, &regime, 400, 8).unwrap();
    let mut combined = observational.clone();
    for case in experimental.cases() {
        combined.push(case.clone()).unwrap();
    }
    let causal = exhaustive_posterior(
        &combined,
        &prior,
        Mode::Causal,
        None,
        DEFAULT_ENUMERATION_CAP,
        CAP,
    )
    .unwrap();
    assert_eq!(causal.best(), &forward);
    assert!(post(&causal, &forward) > 0.99);
}
