//! File formats: network and structure JSON, case and regime CSV, DOT.
//!
//! Case files are UTF-8 CSV with a header of variable names. A cell holds a
//! bare state label (observed), `?` (missing) or `!label` (set by
//! intervention). Hidden variables must be `?` in every row or left out.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use causal_bde::causal_sim::{Regime, SetDecision};
use causal_bde::model::{Cpt, Dag, DiscreteNetwork, Observation, Variable};
use causal_bde::{Case, Dataset};
use serde::{Deserialize, Serialize};

use crate::error::{io_error, CliError, CliResult};

pub const MISSING: &str = "?";
pub const SET_PREFIX: char = '!';

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableSpec {
    pub name: String,
    pub states: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CptSpec {
    #[serde(default)]
    pub parents: Vec<String>,
    /// One row per parent configuration, first parent most significant.
    pub table: Vec<Vec<f64>>,
}

/// Network file. Without `cpts` every table is uniform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub variables: Vec<VariableSpec>,
    #[serde(default)]
    pub arcs: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cpts: Option<BTreeMap<String, CptSpec>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureSpec {
    pub id: String,
    #[serde(default)]
    pub arcs: Vec<(String, String)>,
    #[serde(default)]
    pub prior: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructuresFile {
    pub structures: Vec<StructureSpec>,
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| io_error(path, e))
}

fn check_label(variable: &str, label: &str) -> CliResult<()> {
    if label.is_empty() || label == MISSING || label.starts_with(SET_PREFIX) {
        return Err(CliError::Data(format!(
            "variable `{variable}`: state label `{label}` is empty, `?` or starts with `!`"
        )));
    }
    Ok(())
}

impl NetworkFile {
    pub fn from_network(net: &DiscreteNetwork) -> Self {
        let name = |i: usize| net.variables()[i].name().to_string();
        NetworkFile {
            variables: net
                .variables()
                .iter()
                .map(|v| VariableSpec {
                    name: v.name().to_string(),
                    states: v.states().to_vec(),
                })
                .collect(),
            arcs: net.dag().arc_labels(),
            cpts: Some(
                net.cpts()
                    .iter()
                    .map(|c| {
                        let spec = CptSpec {
                            parents: c.parents().iter().map(|&p| name(p)).collect(),
                            table: c.rows().to_vec(),
                        };
                        (name(c.child()), spec)
                    })
                    .collect(),
            ),
        }
    }

    pub fn to_network(&self) -> CliResult<DiscreteNetwork> {
        let mut variables = Vec::with_capacity(self.variables.len());
        for spec in &self.variables {
            for label in &spec.states {
                check_label(&spec.name, label)?;
            }
            variables.push(Variable::new(spec.name.clone(), spec.states.clone())?);
        }
        let names: Vec<String> = self.variables.iter().map(|v| v.name.clone()).collect();
        let dag = Dag::from_names(names.clone(), &self.arcs)?;
        let index = |name: &str| {
            dag.node_index(name)
                .ok_or_else(|| CliError::Data(format!("unknown variable `{name}`")))
        };
        let cpts = match &self.cpts {
            None => variables
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let q: usize = dag
                        .parents(i)
                        .iter()
                        .map(|&p| variables[p].arity())
                        .product();
                    let r = v.arity();
                    Cpt::new(i, dag.parents(i).to_vec(), vec![vec![1.0 / r as f64; r]; q])
                })
                .collect(),
            Some(specs) => {
                let mut cpts = Vec::with_capacity(specs.len());
                for (child, spec) in specs {
                    let parents = spec
                        .parents
                        .iter()
                        .map(|p| index(p))
                        .collect::<CliResult<Vec<_>>>()?;
                    cpts.push(Cpt::new(index(child)?, parents, spec.table.clone()));
                }
                cpts
            }
        };
        Ok(DiscreteNetwork::new(variables, dag, cpts)?)
    }
}

pub fn parse_network(text: &str) -> CliResult<DiscreteNetwork> {
    let file: NetworkFile =
        serde_json::from_str(text).map_err(|e| CliError::Data(e.to_string()))?;
    file.to_network()
}

pub fn read_network(path: &Path) -> CliResult<DiscreteNetwork> {
    parse_network(&read_text(path)?).map_err(|e| e.in_file(path))
}

pub fn network_json(net: &DiscreteNetwork) -> String {
    let mut out =
        serde_json::to_string_pretty(&NetworkFile::from_network(net)).expect("network serializes");
    out.push('\n');
    out
}

pub fn write_network(path: &Path, net: &DiscreteNetwork) -> CliResult<()> {
    fs::write(path, network_json(net)).map_err(|e| io_error(path, e))
}

/// Parses `a->b, b->c` (an empty string is the empty graph).
pub fn parse_arc_list(text: &str, nodes: &[String]) -> CliResult<Dag> {
    let mut arcs = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (p, c) = part
            .split_once("->")
            .ok_or_else(|| CliError::Usage(format!("arc `{part}` is not of the form a->b")))?;
        arcs.push((p.trim().to_string(), c.trim().to_string()));
    }
    Dag::from_names(nodes.to_vec(), &arcs).map_err(|e| CliError::Usage(e.to_string()))
}

/// A hypothesis read from a structures file.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypothesis {
    pub id: String,
    pub dag: Dag,
    pub prior: f64,
}

/// Reads hypotheses over `nodes`. Priors default to uniform when none is
/// given; otherwise every structure needs one.
pub fn read_structures(path: &Path, nodes: &[String]) -> CliResult<Vec<Hypothesis>> {
    let inner = || -> CliResult<Vec<Hypothesis>> {
        let file: StructuresFile =
            serde_json::from_str(&read_text(path)?).map_err(|e| CliError::Data(e.to_string()))?;
        if file.structures.is_empty() {
            return Err(CliError::Data("no structures given".into()));
        }
        let mut ids = BTreeSet::new();
        let given = file.structures.iter().filter(|s| s.prior.is_some()).count();
        if given != 0 && given != file.structures.len() {
            return Err(CliError::Data(
                "give a prior for every structure or for none".into(),
            ));
        }
        let uniform = 1.0 / file.structures.len() as f64;
        let mut out = Vec::with_capacity(file.structures.len());
        for spec in file.structures {
            if !ids.insert(spec.id.clone()) {
                return Err(CliError::Data(format!(
                    "duplicate structure id `{}`",
                    spec.id
                )));
            }
            let dag = Dag::from_names(nodes.to_vec(), &spec.arcs)
                .map_err(|e| CliError::Data(format!("structure `{}`: {e}", spec.id)))?;
            out.push(Hypothesis {
                id: spec.id,
                dag,
                prior: spec.prior.unwrap_or(uniform),
            });
        }
        Ok(out)
    };
    inner().map_err(|e| e.in_file(path))
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    CliError::Data(format!("{}: {e}", path.display()))
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

/// Maps each header column to a variable index.
fn header_columns(
    path: &Path,
    headers: &csv::StringRecord,
    variables: &[Variable],
) -> CliResult<Vec<usize>> {
    let mut seen = BTreeSet::new();
    headers
        .iter()
        .map(|h| {
            let i = variables
                .iter()
                .position(|v| v.name() == h)
                .ok_or_else(|| {
                    CliError::Data(format!(
                        "{}: line 1: unknown variable `{h}`",
                        path.display()
                    ))
                })?;
            if !seen.insert(i) {
                return Err(CliError::Data(format!(
                    "{}: line 1: column `{h}` appears twice",
                    path.display()
                )));
            }
            Ok(i)
        })
        .collect()
}

/// Parses a case file over `variables`; `hidden` names must be `?` in every
/// row or absent from the header. `path` is used in messages only.
pub fn parse_cases(
    reader: impl Read,
    path: &Path,
    variables: &[Variable],
    hidden: &[String],
) -> CliResult<Dataset> {
    let hidden_idx = hidden
        .iter()
        .map(|h| {
            variables
                .iter()
                .position(|v| v.name() == h)
                .ok_or_else(|| CliError::Usage(format!("--hidden `{h}` is not a variable")))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    let columns = header_columns(path, &headers, variables)?;
    for (i, v) in variables.iter().enumerate() {
        if !columns.contains(&i) && !hidden_idx.contains(&i) {
            return Err(CliError::Data(format!(
                "{}: line 1: no column for variable `{}`",
                path.display(),
                v.name()
            )));
        }
    }
    let mut data = Dataset::new(variables.to_vec(), Vec::new(), &hidden_idx)?;
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = line_of(&record);
        let at = |msg: String| CliError::Data(format!("{}: line {line}: {msg}", path.display()));
        let mut obs = vec![Observation::Missing; variables.len()];
        for (cell, &i) in record.iter().zip(&columns) {
            let var = &variables[i];
            obs[i] =
                if cell == MISSING {
                    Observation::Missing
                } else if hidden_idx.contains(&i) {
                    return Err(at(format!(
                        "hidden variable `{}` has value `{cell}`",
                        var.name()
                    )));
                } else if let Some(label) = cell.strip_prefix(SET_PREFIX) {
                    Observation::Set(var.state_index(label).ok_or_else(|| {
                        at(format!("`{label}` is not a state of `{}`", var.name()))
                    })?)
                } else {
                    Observation::Observed(var.state_index(cell).ok_or_else(|| {
                        at(format!("`{cell}` is not a state of `{}`", var.name()))
                    })?)
                };
        }
        data.push(Case::new(obs)).map_err(|e| at(e.to_string()))?;
    }
    Ok(data)
}

pub fn read_cases(path: &Path, variables: &[Variable], hidden: &[String]) -> CliResult<Dataset> {
    let file = fs::File::open(path).map_err(|e| io_error(path, e))?;
    parse_cases(file, path, variables, hidden)
}

/// Writes every variable as a column, in variable order.
pub fn write_cases(out: impl Write, data: &Dataset) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    let write_err = |e: csv::Error| CliError::Data(format!("writing cases: {e}"));
    w.write_record(data.variables().iter().map(Variable::name))
        .map_err(write_err)?;
    for case in data.cases() {
        let row = case
            .values()
            .iter()
            .zip(data.variables())
            .map(|(o, v)| match *o {
                Observation::Observed(k) => v.states()[k].clone(),
                Observation::Set(k) => format!("{SET_PREFIX}{}", v.states()[k]),
                Observation::Missing => MISSING.to_string(),
            });
        w.write_record(row).map_err(write_err)?;
    }
    w.flush()
        .map_err(|e| CliError::Data(format!("writing cases: {e}")))
}

/// Reads a regime file: one row (applied to every case) or `n_cases` rows.
/// An empty cell leaves the variable alone; `label` or `!label` sets it.
pub fn read_regime(path: &Path, net: &DiscreteNetwork, n_cases: usize) -> CliResult<Regime> {
    let file = fs::File::open(path).map_err(|e| io_error(path, e))?;
    let variables = net.variables();
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    let columns = header_columns(path, &headers, variables)?;
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = line_of(&record);
        let mut row = vec![SetDecision::DoNothing; variables.len()];
        for (cell, &i) in record.iter().zip(&columns) {
            if cell.is_empty() {
                continue;
            }
            let label = cell.strip_prefix(SET_PREFIX).unwrap_or(cell);
            let k = variables[i].state_index(label).ok_or_else(|| {
                CliError::Data(format!(
                    "{}: line {line}: `{label}` is not a state of `{}`",
                    path.display(),
                    variables[i].name()
                ))
            })?;
            row[i] = SetDecision::Set(k);
        }
        rows.push(row);
    }
    match rows.len() {
        1 => Ok(Regime::Broadcast(rows.pop().unwrap())),
        n if n == n_cases => Ok(Regime::PerCase(rows)),
        n => Err(CliError::Data(format!(
            "{}: {n} regime rows; expected 1 or {n_cases}",
            path.display()
        ))),
    }
}

fn dot_id(name: &str) -> String {
    format!("\"{}\"", name.replace('\\', "\\\\").replace('"', "\\\""))
}

/// DOT digraph of `dag`, nodes labeled by variable name.
pub fn to_dot(dag: &Dag) -> String {
    let mut out = String::from("digraph structure {\n");
    for node in dag.nodes() {
        out.push_str(&format!("  {};\n", dot_id(node)));
    }
    for (p, c) in dag.arc_labels() {
        out.push_str(&format!("  {} -> {};\n", dot_id(&p), dot_id(&c)));
    }
    out.push_str("}\n");
    out
}
