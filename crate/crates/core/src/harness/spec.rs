use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::groupoid::{cyclic_table, product_table, symmetric_table, with_size_cap, Groupoid};
use crate::measure::{HaarSystem, MeasuredGroupoid};

pub const SCHEMA_VERSION: u32 = 1;

pub const DEFAULT_P_GRID: [f64; 6] = [1.0, 1.25, 4.0 / 3.0, 1.5, 1.75, 2.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Plancherel,
    Hy,
    Proofpath,
    Tensor,
    Modular,
    Oracles,
}

impl Check {
    pub const ALL: [Check; 6] = [Check::Plancherel, Check::Hy, Check::Proofpath, Check::Tensor, Check::Modular, Check::Oracles];

    pub fn name(self) -> &'static str {
        match self {
            Check::Plancherel => "plancherel",
            Check::Hy => "hy",
            Check::Proofpath => "proofpath",
            Check::Tensor => "tensor",
            Check::Modular => "modular",
            Check::Oracles => "oracles",
        }
    }
}

impl std::str::FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown check `{s}`")))
    }
}

/// Per-row pass thresholds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteTolerances {
    /// Relative slack on inequalities.
    pub inequality: f64,
    pub plancherel: f64,
    pub route: f64,
    pub oracle: f64,
    pub hilbert_schmidt: f64,
    pub tensor: f64,
    pub modular: f64,
    pub commutation: f64,
    pub cocycle: f64,
    pub cauchy: f64,
}

impl Default for SuiteTolerances {
    fn default() -> Self {
        SuiteTolerances {
            inequality: 1e-9,
            plancherel: 1e-8,
            route: 1e-8,
            oracle: 1e-8,
            hilbert_schmidt: 1e-10,
            tensor: 1e-8,
            modular: 1e-8,
            commutation: 1e-10,
            cocycle: 1e-12,
            cauchy: 1e-8,
        }
    }
}

/// A scalar applied to every unit, or one value per unit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Weights {
    Scalar(f64),
    PerUnit(Vec<f64>),
}

impl Weights {
    fn expand(&self, units: usize, what: &str) -> Result<Vec<f64>> {
        match self {
            Weights::Scalar(c) => Ok(vec![*c; units]),
            Weights::PerUnit(v) if v.len() == units => Ok(v.clone()),
            Weights::PerUnit(v) => Err(Error::Parse(format!("{what} has {} entries, groupoid has {units} units", v.len()))),
        }
    }
}

/// One measured groupoid of a suite. `groupoid` is kept as raw JSON and
/// interpreted by [`FixtureSpec::build`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureSpec {
    pub id: String,
    pub groupoid: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<Weights>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Weights>,
}

impl FixtureSpec {
    pub fn build(&self) -> Result<Arc<MeasuredGroupoid>> {
        build_node(&self.groupoid, self.w.as_ref(), self.mu.as_ref())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteSpec {
    pub schema_version: u32,
    pub fixtures: Vec<FixtureSpec>,
    pub p_grid: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub tolerances: SuiteTolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size_cap: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    schema_version: Option<u32>,
    id: Option<String>,
    groupoid: Option<Value>,
    w: Option<Weights>,
    mu: Option<Weights>,
    #[serde(alias = "fixtures")]
    groupoids: Option<Vec<FixtureSpec>>,
    p_grid: Option<Vec<f64>>,
    trials: Option<usize>,
    seed: Option<u64>,
    checks: Option<Vec<String>>,
    tol: Option<f64>,
    #[serde(default)]
    tolerances: Option<SuiteTolerances>,
    size_cap: Option<usize>,
}

impl SuiteSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawSpec = serde_json::from_str(text)?;
        let version = raw.schema_version.unwrap_or(SCHEMA_VERSION);
        if version != SCHEMA_VERSION {
            return Err(Error::Parse(format!("unsupported schema_version {version}")));
        }
        let mut fixtures = raw.groupoids.unwrap_or_default();
        if let Some(g) = raw.groupoid {
            let id = raw.id.unwrap_or_else(|| descriptor_id(&g));
            fixtures.insert(
                0,
                FixtureSpec {
                    id,
                    groupoid: g,
                    w: raw.w,
                    mu: raw.mu,
                },
            );
        } else if raw.w.is_some() || raw.mu.is_some() {
            return Err(Error::Parse("`w`/`mu` given without `groupoid`".into()));
        }
        let checks = match raw.checks {
            None => Check::ALL.to_vec(),
            Some(v) => v.iter().map(|s| s.parse()).collect::<Result<_>>()?,
        };
        let mut tolerances = raw.tolerances.unwrap_or_default();
        if let Some(t) = raw.tol {
            tolerances.inequality = t;
        }
        let spec = SuiteSpec {
            schema_version: SCHEMA_VERSION,
            fixtures,
            p_grid: raw.p_grid.unwrap_or_else(|| DEFAULT_P_GRID.to_vec()),
            trials: raw.trials.unwrap_or(20),
            seed: raw.seed.unwrap_or(0),
            checks,
            tolerances,
            size_cap: raw.size_cap,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Parse("trials must be at least 1".into()));
        }
        if let Some(&p) = self.p_grid.iter().find(|p| !(1.0..=2.0).contains(*p)) {
            return Err(Error::BadExponent(p));
        }
        let mut ids: Vec<&str> = self.fixtures.iter().map(|f| f.id.as_str()).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Parse(format!("duplicate fixture id `{}`", w[0])));
        }
        if self.tolerances.inequality < 0.0 || self.tolerances.inequality.is_nan() {
            return Err(Error::Parse("tolerance must be non-negative".into()));
        }
        self.build_fixtures().map(|_| ())
    }

    /// Builds every measured groupoid under `size_cap` when set.
    pub fn build_fixtures(&self) -> Result<Vec<(String, Arc<MeasuredGroupoid>)>> {
        let run = || self.fixtures.iter().map(|f| Ok((f.id.clone(), f.build()?))).collect();
        match self.size_cap {
            Some(cap) => with_size_cap(cap, run),
            None => run(),
        }
    }
}

pub fn load_spec(path: impl AsRef<Path>) -> Result<SuiteSpec> {
    SuiteSpec::parse(&std::fs::read_to_string(path)?)
}

fn descriptor_id(g: &Value) -> String {
    let ty = g.get("type").and_then(Value::as_str).unwrap_or("groupoid");
    match g.get("n").and_then(Value::as_u64) {
        Some(n) => format!("{ty}{n}"),
        None => ty.to_string(),
    }
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Parse(format!("missing field `{key}` in {v}")))
}

fn usize_field(v: &Value, key: &str) -> Result<usize> {
    field(v, key)?
        .as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| Error::Parse(format!("`{key}` must be a non-negative integer")))
}

fn parse_field<T: serde::de::DeserializeOwned>(v: &Value, key: &str) -> Result<T> {
    Ok(serde_json::from_value(field(v, key)?.clone())?)
}

fn optional_weights(v: &Value, key: &str) -> Result<Option<Weights>> {
    v.get(key).map(|w| serde_json::from_value(w.clone())).transpose().map_err(Error::from)
}

/// Group multiplication table of a descriptor that denotes a group.
fn group_table(v: &Value) -> Result<Vec<Vec<usize>>> {
    let ty = field(v, "type")?.as_str().unwrap_or_default();
    match ty {
        "cyclic" => Ok(cyclic_table(usize_field(v, "n")?)),
        "symmetric" => Ok(symmetric_table(usize_field(v, "n")?)),
        "group" => parse_field(v, "table"),
        "product" => Ok(product_table(&group_table(field(v, "left")?)?, &group_table(field(v, "right")?)?)),
        other => Err(Error::UnknownConstructor(format!("`{other}` is not a group constructor"))),
    }
}

/// Interprets a groupoid descriptor.
pub fn build_groupoid(v: &Value) -> Result<Groupoid> {
    let ty = field(v, "type")?.as_str().ok_or_else(|| Error::Parse("`type` must be a string".into()))?;
    match ty {
        "cyclic" | "symmetric" | "group" => Groupoid::from_group(&group_table(v)?),
        "space" => Groupoid::space(usize_field(v, "n")?),
        "pair" => Groupoid::pair(usize_field(v, "n")?),
        "action" => {
            let table = group_table(field(v, "group")?)?;
            let points = usize_field(v, "points")?;
            let action: Vec<Vec<usize>> = match v.get("action") {
                Some(a) => serde_json::from_value(a.clone())?,
                None => (0..points).map(|x| vec![x; table.len()]).collect(),
            };
            Groupoid::from_action(&table, points, &action)
        }
        "product" => Groupoid::product(&build_groupoid(field(v, "left")?)?, &build_groupoid(field(v, "right")?)?),
        "disjoint_union" => {
            let parts: Vec<Value> = parse_field(v, "parts")?;
            let mut it = parts.iter();
            let first = it.next().ok_or_else(|| Error::Parse("`parts` is empty".into()))?;
            it.try_fold(build_groupoid(first)?, |acc, p| Groupoid::disjoint_union(&acc, &build_groupoid(p)?))
        }
        "explicit" => {
            let units: Vec<usize> = parse_field(v, "units")?;
            let range: Vec<usize> = parse_field(v, "range")?;
            let labels = match v.get("labels") {
                Some(l) => serde_json::from_value(l.clone())?,
                None => (0..range.len()).map(|i| format!("g{i}")).collect(),
            };
            let compose: Vec<Vec<Option<usize>>> = parse_field(v, "compose")?;
            Groupoid::from_tables(labels, units, range, parse_field(v, "source")?, parse_field(v, "inverse")?, compose.concat())
        }
        other => Err(Error::UnknownConstructor(other.to_string())),
    }
}

/// Products and unions without explicit weights keep their factor
/// structure, so each part may carry its own `w`/`mu`.
fn build_node(v: &Value, w: Option<&Weights>, mu: Option<&Weights>) -> Result<Arc<MeasuredGroupoid>> {
    let ty = v.get("type").and_then(Value::as_str).unwrap_or_default();
    if w.is_none() && mu.is_none() {
        match ty {
            "product" => {
                let part = |k: &str| -> Result<Arc<MeasuredGroupoid>> {
                    let p = field(v, k)?;
                    build_node(p, optional_weights(p, "w")?.as_ref(), optional_weights(p, "mu")?.as_ref())
                };
                return MeasuredGroupoid::product(&part("left")?, &part("right")?);
            }
            "disjoint_union" => {
                let parts: Vec<Value> = parse_field(v, "parts")?;
                let mut built = parts
                    .iter()
                    .map(|p| build_node(p, optional_weights(p, "w")?.as_ref(), optional_weights(p, "mu")?.as_ref()))
                    .collect::<Result<Vec<_>>>()?
                    .into_iter();
                let first = built.next().ok_or_else(|| Error::Parse("`parts` is empty".into()))?;
                return built.try_fold(first, |acc, p| MeasuredGroupoid::disjoint_union(&acc, &p));
            }
            _ => {}
        }
    }
    let g = build_groupoid(v)?;
    let units = g.n_units();
    let own_w = optional_weights(v, "w")?;
    let own_mu = optional_weights(v, "mu")?;
    let w = w
        .or(own_w.as_ref())
        .map(|x| x.expand(units, "w"))
        .transpose()?
        .unwrap_or_else(|| vec![1.0; units]);
    let mu = mu
        .or(own_mu.as_ref())
        .map(|x| x.expand(units, "mu"))
        .transpose()?
        .unwrap_or_else(|| vec![1.0; units]);
    MeasuredGroupoid::build(g, HaarSystem::new(w)?, mu)
}
