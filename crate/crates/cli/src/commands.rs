use herdkit::exact::reach_matrix;
use herdkit::graph::{graph_from_matrix, layer_decomposition};
use herdkit::leader::{corollary1_check, corollary2_check, prop2_check, prop3_check, reduce, validate_assumption1};
use herdkit::matrix::permute;
use herdkit::oracle::herdable_with;
use herdkit::sim::synthesize_plan;
use herdkit::tree::{diagonal_pair_herdable, prop5_check, prop7_report, select_leader, validate_tree, DiagonalPair};
use herdkit::unisign::{greedy_check, greedy_trace};
use herdkit::{Arithmetic, Error, HerdabilityVerdict, Permutation, RealMatrix, SignClass, Status};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::report::{matrix, nodes, num, vector, Report};
use crate::system::{Mode, SystemDescriptor};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Check,
    Greedy,
    Reduce,
    Layers,
    TreeLeader,
    TreeCheck,
    Simulate,
    Diag,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Check => "check",
            CommandKind::Greedy => "greedy",
            CommandKind::Reduce => "reduce",
            CommandKind::Layers => "layers",
            CommandKind::TreeLeader => "tree-leader",
            CommandKind::TreeCheck => "tree-check",
            CommandKind::Simulate => "simulate",
            CommandKind::Diag => "diag",
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub mode: Option<Mode>,
    pub threshold: Option<f64>,
    pub x0: Option<Vec<f64>>,
}

struct Pair {
    a: RealMatrix,
    b: RealMatrix,
    arith: Arithmetic,
}

fn pair(desc: &SystemDescriptor, opts: &Options) -> Result<Pair, CliError> {
    let a = desc.state_matrix()?;
    let b = desc
        .input_matrix()?
        .ok_or_else(|| CliError::Convention("system needs \"B\" or \"leaders\"".into()))?;
    Ok(Pair { a, b, arith: desc.arithmetic(opts.mode) })
}

fn arithmetic_name(p: &Pair) -> Result<&'static str, CliError> {
    Ok(if p.arith.use_exact(&[&p.a, &p.b])? { "exact" } else { "float" })
}

pub fn run(kind: CommandKind, desc: &SystemDescriptor, opts: &Options) -> Result<Report, CliError> {
    match kind {
        CommandKind::Check => check(desc, opts),
        CommandKind::Greedy => greedy(desc, opts),
        CommandKind::Reduce => reduce_cmd(desc, opts),
        CommandKind::Layers => layers(desc, opts),
        CommandKind::TreeLeader => tree_leader(desc),
        CommandKind::TreeCheck => tree_check(desc),
        CommandKind::Simulate => simulate(desc, opts),
        CommandKind::Diag => diag(desc),
    }
}

fn check(desc: &SystemDescriptor, opts: &Options) -> Result<Report, CliError> {
    let p = pair(desc, opts)?;
    let verdict = herdable_with(&p.a, &p.b, p.arith)?;
    Ok(Report::from_verdict(verdict)
        .detail("arithmetic", json!(arithmetic_name(&p)?))
        .detail("n", json!(p.a.rows()))
        .detail("m", json!(p.b.cols())))
}

fn sign_str(s: SignClass) -> &'static str {
    match s {
        SignClass::Positive => "+",
        SignClass::Negative => "-",
        SignClass::Zero => "0",
    }
}

fn greedy(desc: &SystemDescriptor, opts: &Options) -> Result<Report, CliError> {
    let p = pair(desc, opts)?;
    let r = reach_matrix(&p.a, &p.b, p.a.rows(), p.arith)?.real;
    let steps = greedy_trace(&r).map(|trace| {
        Value::Array(
            trace
                .blocks
                .iter()
                .map(|b| {
                    let (col, sign) = b.columns[0];
                    json!({"column": col + 1, "sign": sign_str(sign), "rows": nodes(&b.rows)})
                })
                .collect(),
        )
    });
    Ok(Report::from_verdict(greedy_check(&r))
        .detail("arithmetic", json!(arithmetic_name(&p)?))
        .detail("steps", steps.unwrap_or(Value::Null)))
}

/// Leaders first (in the given order), then the remaining nodes ascending.
fn leaders_first(desc: &SystemDescriptor) -> Result<(Vec<usize>, Permutation), CliError> {
    let leaders = desc
        .leaders()
        .ok_or_else(|| CliError::Convention("this command needs a \"leaders\" list".into()))?;
    let mut order = leaders.clone();
    order.extend((0..desc.n).filter(|v| !leaders.contains(v)));
    Ok((leaders, Permutation::new(order)?))
}

fn reduce_cmd(desc: &SystemDescriptor, opts: &Options) -> Result<Report, CliError> {
    let p = pair(desc, opts)?;
    let (leaders, perm) = leaders_first(desc)?;
    let m = leaders.len();
    let a = permute(&p.a, &perm, &perm)?;
    let (a22, a21) = reduce(&a, m)?;
    let full = herdable_with(&p.a, &p.b, p.arith)?;
    let reduced = herdable_with(&a22, &a21, p.arith)?;
    let followers = &perm.as_slice()[m..];
    let equivalent = full.status == reduced.status;
    let reduced_status = reduced.status.as_str();
    Ok(Report::from_verdict(full)
        .detail("leaders", nodes(&leaders))
        .detail("followers", nodes(followers))
        .detail("A22", matrix(&a22))
        .detail("A21", matrix(&a21))
        .detail("reduced_status", json!(reduced_status))
        .detail("equivalent", json!(equivalent)))
}

fn layers(desc: &SystemDescriptor, opts: &Options) -> Result<Report, CliError> {
    let p = pair(desc, opts)?;
    let (leaders, perm) = leaders_first(desc)?;
    let m = leaders.len();
    let g = graph_from_matrix(&p.a, true)?;
    let decomposition = layer_decomposition(&g, &leaders)?;
    let report = if m == desc.n {
        Report::from_verdict(herdable_with(&p.a, &p.b, p.arith)?)
    } else {
        let a = permute(&p.a, &perm, &perm)?;
        let s = validate_assumption1(&a, m)?;
        let checks = [
            ("unisigned_cover", prop2_check(&s)?),
            ("uniform_outside_cover", prop3_check(&s)?),
            ("balanced_leader_class", corollary1_check(&a, m)?),
            ("one_step_uniform_leaders", corollary2_check(&a, m)?),
        ];
        let summary: serde_json::Map<String, Value> =
            checks.iter().map(|(k, v)| (k.to_string(), json!(v.status.as_str()))).collect();
        let verdict = checks
            .into_iter()
            .map(|(_, v)| v)
            .find(HerdabilityVerdict::is_herdable)
            .unwrap_or_else(HerdabilityVerdict::unknown);
        Report::from_verdict(verdict).detail("checks", Value::Object(summary))
    };
    Ok(report
        .detail("leaders", nodes(&leaders))
        .detail("layers", Value::Array(decomposition.layers.iter().map(|l| nodes(l)).collect()))
        .detail("depth", json!(decomposition.depth())))
}

fn tree_leader(desc: &SystemDescriptor) -> Result<Report, CliError> {
    let a = desc.state_matrix()?;
    Ok(match select_leader(&a)? {
        Some((leader, verdict)) => Report::from_verdict(verdict).detail("leader", json!(leader + 1)),
        None => Report::from_verdict(HerdabilityVerdict::unknown()).detail("leader", Value::Null),
    })
}

fn single_leader(desc: &SystemDescriptor) -> Result<usize, CliError> {
    if let Some(l) = desc.leaders() {
        if let [leader] = l.as_slice() {
            return Ok(*leader);
        }
    } else if let Some(b) = desc.input_matrix()? {
        if b.cols() == 1 {
            let col = b.col(0);
            let support: Vec<usize> = (0..col.len()).filter(|&i| col[i] != 0.0).collect();
            if let [i] = support.as_slice() {
                if col[*i] == 1.0 {
                    return Ok(*i);
                }
            }
        }
    }
    Err(CliError::Convention("tree commands need exactly one leader".into()))
}

fn tree_check(desc: &SystemDescriptor) -> Result<Report, CliError> {
    let a = desc.state_matrix()?;
    let leader = single_leader(desc)?;
    let t = validate_tree(&a, leader)?;
    let depth = t.depth();
    let report = if depth <= 2 {
        let r = prop7_report(&t)?;
        let violation = r.violation.map_or(Value::Null, |(i, j)| json!([i + 1, j + 1]));
        let test = if depth <= 1 { "depth-one" } else { "depth-two" };
        Report::from_verdict(r.verdict).detail("test", json!(test)).detail("violation", violation)
    } else {
        Report::from_verdict(prop5_check(&t)?).detail("test", json!("layer-uniform"))
    };
    Ok(report
        .detail("depth", json!(depth))
        .detail("leader", json!(leader + 1))
        .detail("layers", Value::Array(t.layers().layers.iter().map(|l| nodes(l)).collect())))
}

fn simulate(desc: &SystemDescriptor, opts: &Options) -> Result<Report, CliError> {
    let p = pair(desc, opts)?;
    let n = p.a.rows();
    let h = opts.threshold.unwrap_or(1.0);
    let x0 = opts.x0.clone().unwrap_or_else(|| vec![0.0; n]);
    let verdict = herdable_with(&p.a, &p.b, p.arith)?;
    if verdict.status != Status::Herdable {
        return Ok(Report::from_verdict(verdict).detail("threshold", num(h)));
    }
    let plan = match synthesize_plan(&p.a, &p.b, &x0, h) {
        Ok(plan) => plan,
        Err(Error::NotHerdable) => return Err(CliError::Core(Error::Structure("oracle verdicts disagree".into()))),
        Err(e) => return Err(e.into()),
    };
    Ok(Report::from_verdict(verdict)
        .detail("threshold", num(h))
        .detail("x0", vector(&x0))
        .detail("horizon", json!(plan.horizon))
        .detail("scale", num(plan.scale))
        .detail("inputs", Value::Array(plan.inputs.iter().map(|u| vector(u)).collect()))
        .detail("final_state", vector(&plan.final_state)))
}

fn diag(desc: &SystemDescriptor) -> Result<Report, CliError> {
    let a = desc.state_matrix()?;
    let b = desc
        .input_matrix()?
        .ok_or_else(|| CliError::Convention("diag needs a single input column \"B\"".into()))?;
    if b.cols() != 1 {
        return Err(CliError::Convention("diag needs a single input column".into()));
    }
    let n = a.rows();
    if (0..n).any(|i| (0..n).any(|j| i != j && a.get(i, j) != 0.0)) {
        return Err(CliError::Convention("diag needs a diagonal state matrix".into()));
    }
    let lambda: Vec<f64> = (0..n).map(|i| a.get(i, i)).collect();
    let pair = DiagonalPair::new(lambda.clone(), b.col(0))?;
    let verdict = diagonal_pair_herdable(&pair)?;
    Ok(Report::from_verdict(verdict).detail("lambda", vector(&lambda)).detail("gamma", vector(&pair.gamma)))
}
