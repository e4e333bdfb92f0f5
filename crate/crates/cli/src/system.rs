//! System files.
//!
//! Two formats are accepted, both with 1-based node indices.
//!
//! JSON:
//!
//! ```text
//! {"n": 3, "A": [[...], ...] | "edges": [[i, j, w], ...],
//!  "B": [[...], ...] | "leaders": [1, ...],
//!  "directed": true, "mode": "float" | "exact"}
//! ```
//!
//! Edge list: a header line `# n=<int> leaders=<csv> directed=<0|1>`
//! (optionally followed by `mode=<float|exact>`), then one `i j w` per line.
//! Later lines starting with `#` and blank lines are ignored.
//!
//! An edge `(i, j, w)` is an arc from `i` to `j` and sets `A[j][i] = w`;
//! undirected edges also set `A[i][j]`.

use std::collections::{BTreeMap, BTreeSet};

use herdkit::{Arithmetic, RealMatrix};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Edges,
}

impl Format {
    pub fn from_name(name: &str) -> Option<Format> {
        match name {
            "json" => Some(Format::Json),
            "edges" => Some(Format::Edges),
            _ => None,
        }
    }

    /// `.json` files are JSON, `.edges` and `.txt` are edge lists.
    pub fn from_extension(path: &std::path::Path) -> Option<Format> {
        match path.extension()?.to_str()? {
            "json" => Some(Format::Json),
            "edges" | "txt" => Some(Format::Edges),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Float,
    Exact,
}

impl Mode {
    pub fn parse(s: &str) -> Option<Mode> {
        match s {
            "float" => Some(Mode::Float),
            "exact" => Some(Mode::Exact),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Float => "float",
            Mode::Exact => "exact",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Dense(Vec<Vec<f64>>),
    /// `(from, to, weight)`, 1-based.
    Edges(Vec<(usize, usize, f64)>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum InputSpec {
    Dense(Vec<Vec<f64>>),
    /// 1-based leader nodes, in input-column order.
    Leaders(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemDescriptor {
    pub n: usize,
    pub state: StateSpec,
    pub input: Option<InputSpec>,
    pub directed: bool,
    pub mode: Option<Mode>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    n: usize,
    #[serde(rename = "A")]
    a: Option<Vec<Vec<f64>>>,
    edges: Option<Vec<(usize, usize, f64)>>,
    #[serde(rename = "B")]
    b: Option<Vec<Vec<f64>>>,
    leaders: Option<Vec<usize>>,
    directed: Option<bool>,
    mode: Option<String>,
}

pub fn parse_system(text: &str, format: Format) -> Result<SystemDescriptor, CliError> {
    let desc = match format {
        Format::Json => parse_json(text)?,
        Format::Edges => parse_edges(text)?,
    };
    desc.validate()?;
    Ok(desc)
}

fn parse_mode(s: &str) -> Result<Mode, CliError> {
    Mode::parse(s).ok_or_else(|| CliError::parse(None, format!("mode must be \"float\" or \"exact\", got {s:?}")))
}

fn parse_json(text: &str) -> Result<SystemDescriptor, CliError> {
    let raw: RawSystem =
        serde_json::from_str(text).map_err(|e| CliError::parse(Some(e.line()), e.to_string()))?;
    let state = match (raw.a, raw.edges) {
        (Some(a), None) => StateSpec::Dense(a),
        (None, Some(e)) => StateSpec::Edges(e),
        (Some(_), Some(_)) => return Err(CliError::Convention("both \"A\" and \"edges\" given".into())),
        (None, None) => return Err(CliError::parse(None, "missing field \"A\" or \"edges\"")),
    };
    let input = match (raw.b, raw.leaders) {
        (Some(_), Some(_)) => return Err(CliError::Convention("both \"B\" and \"leaders\" given".into())),
        (Some(b), None) => Some(InputSpec::Dense(b)),
        (None, Some(l)) => Some(InputSpec::Leaders(l)),
        (None, None) => None,
    };
    let mode = raw.mode.as_deref().map(parse_mode).transpose()?;
    Ok(SystemDescriptor { n: raw.n, state, input, directed: raw.directed.unwrap_or(true), mode })
}

fn parse_edges(text: &str) -> Result<SystemDescriptor, CliError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (header_no, header) = lines.next().ok_or_else(|| CliError::parse(None, "empty edge list"))?;
    let header_line = header_no + 1;
    let body = header
        .trim()
        .strip_prefix('#')
        .ok_or_else(|| CliError::parse(Some(header_line), "expected header \"# n=<int> leaders=<csv> directed=<0|1>\""))?;
    let mut fields = BTreeMap::new();
    for token in body.split_whitespace() {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| CliError::parse(Some(header_line), format!("malformed header field {token:?}")))?;
        if fields.insert(key, value).is_some() {
            return Err(CliError::parse(Some(header_line), format!("duplicate header field {key:?}")));
        }
    }
    let field = |key: &str| {
        fields
            .get(key)
            .copied()
            .ok_or_else(|| CliError::parse(Some(header_line), format!("header is missing {key}=")))
    };
    if let Some(key) = fields.keys().find(|k| !["n", "leaders", "directed", "mode"].contains(k)) {
        return Err(CliError::parse(Some(header_line), format!("unknown header field {key:?}")));
    }
    let n: usize = field("n")?
        .parse()
        .map_err(|_| CliError::parse(Some(header_line), "n must be a nonnegative integer"))?;
    let leaders = field("leaders")?
        .split(',')
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CliError::parse(Some(header_line), "leaders must be a comma-separated list of integers"))?;
    let directed = match field("directed")? {
        "0" => false,
        "1" => true,
        other => return Err(CliError::parse(Some(header_line), format!("directed must be 0 or 1, got {other:?}"))),
    };
    let mode = fields.get("mode").map(|s| parse_mode(s)).transpose()?;

    let mut edges = Vec::new();
    for (no, line) in lines {
        let line_no = no + 1;
        let line = line.trim();
        if line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let [i, j, w] = tokens.as_slice() else {
            return Err(CliError::parse(Some(line_no), format!("expected \"i j w\", got {line:?}")));
        };
        let i = i.parse().map_err(|_| CliError::parse(Some(line_no), format!("bad node index {i:?}")))?;
        let j = j.parse().map_err(|_| CliError::parse(Some(line_no), format!("bad node index {j:?}")))?;
        let w: f64 = w.parse().map_err(|_| CliError::parse(Some(line_no), format!("bad weight {w:?}")))?;
        edges.push((i, j, w));
    }
    let input = (!leaders.is_empty()).then_some(InputSpec::Leaders(leaders));
    Ok(SystemDescriptor { n, state: StateSpec::Edges(edges), input, directed, mode })
}

impl SystemDescriptor {
    pub(crate) fn validate(&self) -> Result<(), CliError> {
        if self.n == 0 {
            return Err(CliError::parse(None, "n must be positive"));
        }
        let weights: Vec<f64> = match &self.state {
            StateSpec::Dense(rows) => {
                if rows.len() != self.n || rows.iter().any(|r| r.len() != self.n) {
                    return Err(CliError::parse(None, format!("\"A\" must be {0}x{0}", self.n)));
                }
                rows.iter().flatten().copied().collect()
            }
            StateSpec::Edges(edges) => {
                let mut seen = BTreeSet::new();
                for (k, &(i, j, _)) in edges.iter().enumerate() {
                    if !(1..=self.n).contains(&i) || !(1..=self.n).contains(&j) {
                        return Err(CliError::parse(None, format!("edge {} has a node outside 1..{}", k + 1, self.n)));
                    }
                    let key = if self.directed { (i, j) } else { (i.min(j), i.max(j)) };
                    if !seen.insert(key) {
                        return Err(CliError::parse(None, format!("edge {} repeats ({i}, {j})", k + 1)));
                    }
                }
                edges.iter().map(|e| e.2).collect()
            }
        };
        let mut all = weights;
        match &self.input {
            Some(InputSpec::Dense(rows)) => {
                let m = rows.first().map_or(0, Vec::len);
                if rows.len() != self.n || m == 0 || rows.iter().any(|r| r.len() != m) {
                    return Err(CliError::parse(None, format!("\"B\" must have {} rows of equal nonzero length", self.n)));
                }
                all.extend(rows.iter().flatten());
            }
            Some(InputSpec::Leaders(l)) => {
                if l.is_empty() {
                    return Err(CliError::parse(None, "leader list is empty"));
                }
                if let Some(v) = l.iter().find(|&&v| !(1..=self.n).contains(&v)) {
                    return Err(CliError::parse(None, format!("leader {v} outside 1..{}", self.n)));
                }
                if l.iter().collect::<BTreeSet<_>>().len() != l.len() {
                    return Err(CliError::parse(None, "leader list has duplicates"));
                }
            }
            None => {}
        }
        if let Some(x) = all.iter().find(|x| !x.is_finite()) {
            return Err(CliError::parse(None, format!("non-finite weight {x}")));
        }
        if self.mode == Some(Mode::Exact) {
            if let Some(x) = all.iter().find(|x| x.fract() != 0.0 || x.abs() >= 9.007_199_254_740_992e15) {
                return Err(CliError::parse(None, format!("exact mode requires integer weights, got {x}")));
            }
        }
        Ok(())
    }

    pub fn state_matrix(&self) -> Result<RealMatrix, CliError> {
        let n = self.n;
        match &self.state {
            StateSpec::Dense(rows) => Ok(RealMatrix::from_rows(rows)?),
            StateSpec::Edges(edges) => {
                let mut a = RealMatrix::zeros(n, n);
                for &(i, j, w) in edges {
                    a.set(j - 1, i - 1, w);
                    if !self.directed {
                        a.set(i - 1, j - 1, w);
                    }
                }
                Ok(a)
            }
        }
    }

    /// 0-based leaders, if the input is given as a leader list.
    pub fn leaders(&self) -> Option<Vec<usize>> {
        match &self.input {
            Some(InputSpec::Leaders(l)) => Some(l.iter().map(|v| v - 1).collect()),
            _ => None,
        }
    }

    pub fn input_matrix(&self) -> Result<Option<RealMatrix>, CliError> {
        match &self.input {
            None => Ok(None),
            Some(InputSpec::Dense(rows)) => Ok(Some(RealMatrix::from_rows(rows)?)),
            Some(InputSpec::Leaders(l)) => {
                let idx: Vec<usize> = l.iter().map(|v| v - 1).collect();
                Ok(Some(RealMatrix::selection(self.n, &idx)?))
            }
        }
    }

    /// The arithmetic used by the exact oracle, after applying an override.
    pub fn arithmetic(&self, overridden: Option<Mode>) -> Arithmetic {
        match overridden.or(self.mode) {
            Some(Mode::Float) => Arithmetic::Float,
            Some(Mode::Exact) => Arithmetic::Exact,
            None => Arithmetic::Auto,
        }
    }

    pub fn serialize(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => Ok(self.to_json()),
            Format::Edges => self.to_edges(),
        }
    }

    fn to_json(&self) -> String {
        let mut obj = serde_json::Map::new();
        obj.insert("n".into(), json!(self.n));
        obj.insert("directed".into(), json!(self.directed));
        match &self.state {
            StateSpec::Dense(rows) => obj.insert("A".into(), json!(rows)),
            StateSpec::Edges(edges) => obj.insert("edges".into(), Value::Array(edges.iter().map(|&(i, j, w)| json!([i, j, w])).collect())),
        };
        match &self.input {
            Some(InputSpec::Dense(rows)) => {
                obj.insert("B".into(), json!(rows));
            }
            Some(InputSpec::Leaders(l)) => {
                obj.insert("leaders".into(), json!(l));
            }
            None => {}
        }
        if let Some(mode) = self.mode {
            obj.insert("mode".into(), json!(mode.as_str()));
        }
        let mut s = serde_json::to_string(&Value::Object(obj)).expect("serializable");
        s.push('\n');
        s
    }

    fn to_edges(&self) -> Result<String, CliError> {
        let leaders = match &self.input {
            Some(InputSpec::Leaders(l)) => l.iter().map(usize::to_string).collect::<Vec<_>>().join(","),
            None => String::new(),
            Some(InputSpec::Dense(_)) => {
                return Err(CliError::Convention("edge lists cannot carry a dense input matrix".into()));
            }
        };
        let edges = match &self.state {
            StateSpec::Edges(e) => e.clone(),
            StateSpec::Dense(rows) => {
                let a = RealMatrix::from_rows(rows)?;
                if !self.directed && !a.is_symmetric() {
                    return Err(CliError::Convention("undirected system with asymmetric A".into()));
                }
                let mut e = Vec::new();
                for i in 0..self.n {
                    for j in 0..self.n {
                        let w = a.get(j, i);
                        if w != 0.0 && (self.directed || i <= j) {
                            e.push((i + 1, j + 1, w));
                        }
                    }
                }
                e
            }
        };
        let mut out = format!("# n={} leaders={} directed={}", self.n, leaders, self.directed as u8);
        if let Some(mode) = self.mode {
            out.push_str(&format!(" mode={}", mode.as_str()));
        }
        out.push('\n');
        for (i, j, w) in edges {
            out.push_str(&format!("{i} {j} {w}\n"));
        }
        Ok(out)
    }
}
