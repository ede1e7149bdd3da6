//! Subcommand bodies. Every table goes to `out` as CSV.

use std::fs;
use std::io::Write;
use std::path::Path;

use causal_bde::causal_sim::{simulate, Regime};
use causal_bde::model::DEFAULT_JOINT_CAP;
use causal_bde::scoring::{
    model_average_predict, structure_posteriors, sufficient_stats, HypothesisScore,
    DEFAULT_COMPLETION_CAP,
};
use causal_bde::search::{
    exhaustive_posterior, greedy_search, GreedyConfig, MoveKind, SearchResult,
    DEFAULT_ENUMERATION_CAP, DEFAULT_MAX_PARENTS,
};
use causal_bde::{Cpt, Dataset, DiscreteNetwork, PriorModel};

use crate::error::{io_error, CliError, CliResult};
use crate::formats::{
    parse_arc_list, read_cases, read_network, read_regime, read_structures, to_dot, write_cases,
    write_network,
};
use crate::{
    Command, DataArgs, LearnArgs, PredictArgs, PriorArgs, PriorsArgs, ScoreArgs, SearchArg,
    SimulateArgs, MAX_COMPLETIONS_ENV,
};

pub fn dispatch(command: Command, out: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Priors(args) => priors(args, out),
        Command::Score(args) => score(args, out),
        Command::Learn(args) => learn(args, out),
        Command::Predict(args) => predict(args, out),
        Command::Simulate(args) => simulate_cmd(args, out),
    }
}

/// Probability with 6 significant digits.
pub fn sig6(value: f64) -> String {
    if value == 0.0 || !value.is_finite() {
        return format!("{value}");
    }
    let exponent = value.abs().log10().floor() as i32;
    if (-5..=5).contains(&exponent) {
        let decimals = (5 - exponent).max(0) as usize;
        format!("{value:.decimals$}")
    } else {
        format!("{value:.5e}")
    }
}

fn completion_cap() -> CliResult<u128> {
    match std::env::var(MAX_COMPLETIONS_ENV) {
        Ok(text) => text
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{MAX_COMPLETIONS_ENV}=`{text}` is not a count"))),
        Err(_) => Ok(DEFAULT_COMPLETION_CAP),
    }
}

fn load_prior(args: &PriorArgs) -> CliResult<(DiscreteNetwork, PriorModel)> {
    let net = read_network(&args.prior_network)?;
    let model = match (args.ess, args.epsilon) {
        (Some(ess), None) => PriorModel::from_prior_network(&net, ess, DEFAULT_JOINT_CAP)
            .map_err(|e| CliError::from(e).in_file(&args.prior_network))?,
        (None, Some(eps)) => PriorModel::uninformative(
            net.variables()
                .iter()
                .map(|v| v.name().to_string())
                .collect(),
            net.arities(),
            eps,
        )
        .map_err(|e| CliError::Usage(format!("--epsilon: {e}")))?,
        _ => return Err(CliError::Usage("give one of --ess or --epsilon".into())),
    };
    Ok((net, model))
}

fn load_data(args: &DataArgs, net: &DiscreteNetwork) -> CliResult<Dataset> {
    read_cases(&args.data, net.variables(), &args.hidden)
}

fn log10(ln: f64) -> f64 {
    ln / std::f64::consts::LN_10
}

fn csv_writer(out: &mut dyn Write) -> csv::Writer<&mut dyn Write> {
    csv::Writer::from_writer(out)
}

fn emit<I, S>(w: &mut csv::Writer<&mut dyn Write>, record: I) -> CliResult<()>
where
    I: IntoIterator<Item = S>,
    S: AsRef<[u8]>,
{
    w.write_record(record)
        .map_err(|e| CliError::Data(format!("writing output: {e}")))
}

fn finish(mut w: csv::Writer<&mut dyn Write>) -> CliResult<()> {
    w.flush()
        .map_err(|e| CliError::Data(format!("writing output: {e}")))
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| io_error(path, e))
}

fn priors(args: PriorsArgs, out: &mut dyn Write) -> CliResult<()> {
    let (net, model) = load_prior(&args.prior)?;
    let names: Vec<String> = model.names().to_vec();
    let dag = parse_arc_list(&args.structure, &names)?;
    let counts = model.for_structure(&dag)?;
    let mut rows: Vec<(usize, usize, usize, f64)> = counts.entries().collect();
    rows.sort_by(|a, b| {
        let va = net.variables()[a.0].name();
        let vb = net.variables()[b.0].name();
        va.cmp(vb).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2))
    });
    let mut w = csv_writer(out);
    emit(&mut w, ["variable", "j", "k", "count"])?;
    for (i, j, k, value) in rows {
        emit(
            &mut w,
            [
                names[i].clone(),
                j.to_string(),
                k.to_string(),
                format!("{value}"),
            ],
        )?;
    }
    finish(w)
}

fn score(args: ScoreArgs, out: &mut dyn Write) -> CliResult<()> {
    let (net, model) = load_prior(&args.prior)?;
    let data = load_data(&args.data, &net)?;
    let hypotheses = read_structures(&args.structures, model.names())?;
    let pairs: Vec<_> = hypotheses
        .iter()
        .map(|h| (h.dag.clone(), h.prior))
        .collect();
    let posterior =
        structure_posteriors(&pairs, &model, &data, args.mode.into(), completion_cap()?)?;
    let mut w = csv_writer(out);
    emit(&mut w, ["id", "posterior", "log10_ml", "ln_ml"])?;
    let mut ranked = posterior.ranked();
    ranked.sort_by(|a, b| {
        b.posterior
            .total_cmp(&a.posterior)
            .then_with(|| hypotheses[a.id].id.cmp(&hypotheses[b.id].id))
    });
    for entry in ranked {
        emit(
            &mut w,
            [
                hypotheses[entry.id].id.clone(),
                sig6(entry.posterior),
                format!("{}", log10(entry.log_ml)),
                format!("{}", entry.log_ml),
            ],
        )?;
    }
    finish(w)
}

fn search(
    args: &LearnArgs,
    data: &Dataset,
    model: &PriorModel,
    cap: u128,
) -> CliResult<SearchResult> {
    let mode = args.mode.into();
    Ok(match args.search {
        SearchArg::Exhaustive => exhaustive_posterior(
            data,
            model,
            mode,
            args.max_parents,
            DEFAULT_ENUMERATION_CAP,
            cap,
        )?,
        SearchArg::Greedy => greedy_search(
            data,
            model,
            &GreedyConfig {
                mode,
                seed: args.seed,
                restarts: args.restarts,
                max_parents: args.max_parents.unwrap_or(DEFAULT_MAX_PARENTS),
                completion_cap: cap,
            },
        )?,
    })
}

/// Top structure with posterior-mean tables; needs complete data.
fn posterior_mean_network(
    net: &DiscreteNetwork,
    data: &Dataset,
    model: &PriorModel,
    best: &HypothesisScore,
) -> CliResult<DiscreteNetwork> {
    if data.has_missing() {
        return Err(CliError::Data(
            "--network-out needs data without missing values".into(),
        ));
    }
    let dag = &best.structure;
    let counts = sufficient_stats(data, dag)?;
    let post = counts.posterior(&model.for_structure(dag)?)?;
    let cpts = (0..dag.len())
        .map(|i| {
            let fam = post.family(i);
            let rows = (0..fam.configs())
                .map(|j| {
                    let total = fam.row_sum(j);
                    fam.row(j).iter().map(|a| a / total).collect()
                })
                .collect();
            Cpt::new(i, dag.parents(i).to_vec(), rows)
        })
        .collect();
    Ok(DiscreteNetwork::new(
        net.variables().to_vec(),
        dag.clone(),
        cpts,
    )?)
}

fn move_name(kind: MoveKind) -> &'static str {
    match kind {
        MoveKind::Add => "add",
        MoveKind::Delete => "delete",
        MoveKind::Reverse => "reverse",
    }
}

fn write_trace(path: &Path, result: &SearchResult) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut rows = vec![vec![
        "run".to_string(),
        "step".into(),
        "move".into(),
        "from".into(),
        "to".into(),
        "delta".into(),
        "ln_ml".into(),
    ]];
    for (r, run) in result.runs.iter().enumerate() {
        let nodes = run.start.nodes();
        rows.push(vec![
            r.to_string(),
            "0".into(),
            "start".into(),
            String::new(),
            String::new(),
            String::new(),
            format!("{}", run.start_score),
        ]);
        for (s, step) in run.steps.iter().enumerate() {
            rows.push(vec![
                r.to_string(),
                (s + 1).to_string(),
                move_name(step.kind).into(),
                nodes[step.from].clone(),
                nodes[step.to].clone(),
                format!("{}", step.delta),
                format!("{}", step.score),
            ]);
        }
    }
    for row in rows {
        w.write_record(row)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    fs::write(path, bytes).map_err(|e| io_error(path, e))
}

fn learn(args: LearnArgs, out: &mut dyn Write) -> CliResult<()> {
    if args.trace.is_some() && args.search != SearchArg::Greedy {
        return Err(CliError::Usage("--trace needs --search greedy".into()));
    }
    let (net, model) = load_prior(&args.prior)?;
    let data = load_data(&args.data, &net)?;
    let result = search(&args, &data, &model, completion_cap()?)?;
    let ranked = result.ranked();

    let mut w = csv_writer(out);
    let mut header = vec!["rank", "posterior", "log10_ml", "ln_ml", "structure"];
    if result.classes.is_some() {
        header.extend(["class_size", "members"]);
    }
    emit(&mut w, header)?;
    for (rank, entry) in ranked.iter().take(args.top).enumerate() {
        let mut row = vec![
            (rank + 1).to_string(),
            sig6(entry.posterior),
            format!("{}", log10(entry.log_ml)),
            format!("{}", entry.log_ml),
            entry.structure.to_string(),
        ];
        if let Some(class) = result.class(entry.id) {
            row.push(class.len().to_string());
            let members: Vec<String> = class.members.iter().map(|m| format!("[{m}]")).collect();
            row.push(members.join(" "));
        }
        emit(&mut w, row)?;
    }
    finish(w)?;

    if let Some(path) = &args.dot {
        write_file(path, &to_dot(result.best()))?;
    }
    if let Some(path) = &args.network_out {
        write_network(
            path,
            &posterior_mean_network(&net, &data, &model, ranked[0])?,
        )?;
    }
    if let Some(path) = &args.trace {
        write_trace(path, &result)?;
    }
    Ok(())
}

fn predict(args: PredictArgs, out: &mut dyn Write) -> CliResult<()> {
    let (net, model) = load_prior(&args.prior)?;
    let data = load_data(&args.data, &net)?;
    let queries = read_cases(&args.cases, net.variables(), &args.data.hidden)?;
    let cap = completion_cap()?;
    let mode = args.mode.into();
    let posterior = match &args.structures {
        Some(path) => {
            let pairs: Vec<_> = read_structures(path, model.names())?
                .into_iter()
                .map(|h| (h.dag, h.prior))
                .collect();
            structure_posteriors(&pairs, &model, &data, mode, cap)?
        }
        None => {
            exhaustive_posterior(
                &data,
                &model,
                mode,
                args.max_parents,
                DEFAULT_ENUMERATION_CAP,
                cap,
            )?
            .posterior
        }
    };
    let mut w = csv_writer(out);
    emit(&mut w, ["case", "probability", "ln_probability"])?;
    for (l, case) in queries.cases().iter().enumerate() {
        let p = model_average_predict(case, &posterior, &data, &model, cap)?;
        emit(
            &mut w,
            [(l + 1).to_string(), sig6(p), format!("{}", p.ln())],
        )?;
    }
    finish(w)
}

fn parse_do(spec: &str, net: &DiscreteNetwork) -> CliResult<(usize, usize)> {
    let (name, label) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("--do `{spec}` is not of the form name=state")))?;
    let (name, label) = (name.trim(), label.trim());
    let i = net
        .variable_index(name)
        .ok_or_else(|| CliError::Usage(format!("--do: unknown variable `{name}`")))?;
    let k = net.variables()[i]
        .state_index(label)
        .ok_or_else(|| CliError::Usage(format!("--do: `{label}` is not a state of `{name}`")))?;
    Ok((i, k))
}

fn simulate_cmd(args: SimulateArgs, out: &mut dyn Write) -> CliResult<()> {
    let net = read_network(&args.network)?;
    let n_vars = net.variables().len();
    let regime = match &args.regime {
        Some(path) => read_regime(path, &net, args.n)?,
        None => {
            let sets = args
                .interventions
                .iter()
                .map(|s| parse_do(s, &net))
                .collect::<CliResult<Vec<_>>>()?;
            if sets.is_empty() {
                Regime::observational(n_vars)
            } else {
                Regime::intervene(n_vars, &sets)
            }
        }
    };
    let mut data = simulate(&net, &regime, args.n, args.seed)?;
    for name in &args.hidden {
        data.hide(name)
            .map_err(|_| CliError::Usage(format!("--hidden `{name}` is not a variable")))?;
    }
    match &args.out {
        Some(path) => {
            let file = fs::File::create(path).map_err(|e| io_error(path, e))?;
            write_cases(file, &data)
        }
        None => write_cases(out, &data),
    }
}
