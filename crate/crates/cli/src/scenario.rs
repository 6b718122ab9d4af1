//! Scenario files. A file holds one scenario object or an array of them.
//!
//! ```json
//! {
//!   "name": "grid sobolev",
//!   "space": {"generator": {"kind": "grid2d", "nx": 8, "ny": 8, "h": 0.125}},
//!   "exponents": {"s": 1, "p": 1, "Q": 2},
//!   "function": {"type": "coordinate", "axis": 0},
//!   "verify": {"theorem": "sobolev_local", "center": 36, "r0": 0.25}
//! }
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use hajlasz_core::exponent::{ExponentField, ExponentFormula, Tag};
use hajlasz_core::float::Float;
use hajlasz_core::functions::FunctionSpec;
use hajlasz_core::generators::GeneratorSpec;
use hajlasz_core::hajlasz::Scale;
use hajlasz_core::space::MetricMeasureSpace;
use hajlasz_core::verify::{CounterexampleParams, Mode, NecessityMode};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::spacefile::{load_space, SpaceFile};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceSource {
    Generator(GeneratorSpec),
    File(PathBuf),
    Inline(SpaceFile),
}

/// A bare number (or `"inf"`) is a constant field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExponentSource {
    Constant(Float),
    Spec(ExponentSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ExponentSpec {
    Formula(ExponentFormula),
    Values(Vec<Float>),
    File(PathBuf),
}

/// Exponent file: `{"name": "p", "values": [...]}` or `{"name": "Q", "formula": {...}}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExponentFile {
    name: Tag,
    #[serde(default)]
    values: Option<Vec<Float>>,
    #[serde(default)]
    formula: Option<ExponentFormula>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormTask {
    /// Which exponent to measure in; `p` by default.
    #[serde(default)]
    pub exponent: Option<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientNorm {
    #[default]
    M,
    TriebelLizorkin,
    Besov,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradientTask {
    #[serde(default)]
    pub norm: GradientNorm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalTask {
    pub center: usize,
    pub r0: f64,
    #[serde(default)]
    pub sigma: Option<f64>,
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub candidate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoserTask {
    pub center: usize,
    pub r0: f64,
    #[serde(default)]
    pub sigma: Option<f64>,
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub c1: Option<f64>,
    #[serde(default)]
    pub c2: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlobalTask {
    #[serde(default)]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub candidate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "theorem", rename_all = "snake_case")]
pub enum VerifyTask {
    SobolevLocal(LocalTask),
    MoserTrudingerLocal(MoserTask),
    MorreyLocal(LocalTask),
    LocalEmbedding(LocalTask),
    Bounded(GlobalTask),
    DoublingSob(GlobalTask),
    DoublingMt(GlobalTask),
    DoublingHolder(GlobalTask),
    Counterexample(CounterexampleParams),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NecessityTask {
    pub mode: NecessityMode,
    #[serde(default = "default_scale")]
    pub scale: Scale,
    #[serde(default)]
    pub epsilon: Option<f64>,
}

fn default_scale() -> Scale {
    Scale::LpLq
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub space: Option<SpaceSource>,
    #[serde(default)]
    pub exponents: BTreeMap<String, ExponentSource>,
    /// A function spec; `{"type": "random"}` may omit the seed.
    #[serde(default)]
    pub function: Option<Value>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub norm: Option<NormTask>,
    #[serde(default)]
    pub gradient: Option<GradientTask>,
    #[serde(default)]
    pub verify: Option<VerifyTask>,
    #[serde(default)]
    pub necessity: Option<NecessityTask>,
}

/// A parsed scenario together with the directory relative paths refer to.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub scenario: Scenario,
    pub name: String,
    pub base: PathBuf,
}

/// Parse the text of one scenario file; `label` names it in diagnostics and
/// in default scenario names.
pub fn parse_scenarios(text: &str, label: &str, base: &Path) -> Result<Vec<Loaded>> {
    let value: Value = serde_json::from_str(text).with_context(|| format!("{label}: not valid JSON"))?;
    let items = match value {
        Value::Array(items) => items,
        other => vec![other],
    };
    let many = items.len() > 1;
    items
        .into_iter()
        .enumerate()
        .map(|(i, item)| {
            let scenario: Scenario =
                serde_json::from_value(item).with_context(|| format!("{label}: scenario {i} is malformed"))?;
            let name = match &scenario.name {
                Some(n) => n.clone(),
                None if many => format!("{label}#{i}"),
                None => label.to_string(),
            };
            Ok(Loaded { scenario, name, base: base.to_path_buf() })
        })
        .collect()
}

pub fn load_scenarios(path: &Path) -> Result<Vec<Loaded>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "scenario".into());
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_scenarios(&text, &label, &base)
}

fn tag_for(key: &str) -> Result<Tag> {
    Ok(match key {
        "p" => Tag::P,
        "s" => Tag::S,
        "q" => Tag::Q,
        "Q" => Tag::Dim,
        "gamma" | "beta" => Tag::Gamma,
        "alpha" => Tag::Alpha,
        "epsilon" => Tag::Epsilon,
        "t" => Tag::T,
        _ => bail!("unknown exponent name {key:?} (expected one of p, s, q, Q, gamma, beta, alpha, epsilon, t)"),
    })
}

impl Loaded {
    pub fn space(&self) -> Result<MetricMeasureSpace> {
        match &self.scenario.space {
            None => bail!("scenario {:?} has no \"space\"", self.name),
            Some(SpaceSource::Generator(g)) => Ok(g.build()?),
            Some(SpaceSource::File(p)) => load_space(&self.base.join(p)),
            Some(SpaceSource::Inline(f)) => f.build(),
        }
    }

    pub fn has_exponent(&self, key: &str) -> bool {
        self.scenario.exponents.contains_key(key)
    }

    pub fn exponent(&self, key: &str, space: &MetricMeasureSpace) -> Result<ExponentField> {
        let tag = tag_for(key)?;
        let src = self
            .scenario
            .exponents
            .get(key)
            .ok_or_else(|| anyhow!("scenario {:?} needs exponent {key:?}", self.name))?;
        let n = space.len();
        let field = match src {
            ExponentSource::Constant(v) => ExponentField::constant(tag, n, v.0),
            ExponentSource::Spec(ExponentSpec::Formula(f)) => f.expand(tag, space),
            ExponentSource::Spec(ExponentSpec::Values(v)) => ExponentField::new(tag, v.iter().map(|x| x.0).collect()),
            ExponentSource::Spec(ExponentSpec::File(p)) => {
                let path = self.base.join(p);
                let text = std::fs::read_to_string(&path).with_context(|| format!("cannot read {}", path.display()))?;
                let file: ExponentFile =
                    serde_json::from_str(&text).with_context(|| format!("malformed exponent file {}", path.display()))?;
                if file.name != tag {
                    bail!("{} holds exponent {:?}, expected {key:?}", path.display(), file.name.name());
                }
                match (file.values, file.formula) {
                    (Some(v), None) => ExponentField::new(tag, v.iter().map(|x| x.0).collect()),
                    (None, Some(f)) => f.expand(tag, space),
                    _ => bail!("{}: give exactly one of \"values\" and \"formula\"", path.display()),
                }
            }
        };
        let field = field.with_context(|| format!("exponent {key:?}"))?;
        field.check_len(n).with_context(|| format!("exponent {key:?}"))?;
        Ok(field)
    }

    /// The function `u`; `seed` fills in a missing seed of a random function.
    pub fn function(&self, space: &MetricMeasureSpace, seed: u64) -> Result<(Vec<f64>, Option<u64>)> {
        let mut v = self
            .scenario
            .function
            .clone()
            .ok_or_else(|| anyhow!("scenario {:?} has no \"function\"", self.name))?;
        let mut used = None;
        if let Value::Object(m) = &mut v {
            if m.get("type").and_then(Value::as_str) == Some("random") {
                let s = match m.get("seed") {
                    Some(s) => s.as_u64().ok_or_else(|| anyhow!("random seed must be a nonnegative integer"))?,
                    None => {
                        m.insert("seed".into(), Value::from(seed));
                        seed
                    }
                };
                used = Some(s);
            }
        }
        let spec: FunctionSpec = serde_json::from_value(v).context("malformed \"function\"")?;
        Ok((spec.evaluate(space)?, used))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_single_and_array() {
        let one = r#"{"space": {"generator": {"kind": "grid1d", "n": 4, "h": 0.25}}, "exponents": {"p": 2, "q": "inf"},
                      "function": {"type": "constant", "value": 3}, "norm": {}}"#;
        let l = parse_scenarios(one, "x", Path::new(".")).unwrap();
        assert_eq!(l.len(), 1);
        assert_eq!(l[0].name, "x");
        let sp = l[0].space().unwrap();
        assert_eq!(l[0].exponent("q", &sp).unwrap().get(0), f64::INFINITY);
        assert_eq!(l[0].function(&sp, 0).unwrap().0, vec![3.0; 4]);
        let two = format!("[{one}, {one}]");
        let l = parse_scenarios(&two, "x", Path::new(".")).unwrap();
        assert_eq!(l[1].name, "x#1");
    }

    #[test]
    fn unknown_field_rejected() {
        let bad = r#"{"spaec": {}}"#;
        let err = format!("{:#}", parse_scenarios(bad, "bad", Path::new(".")).unwrap_err());
        assert!(err.contains("malformed") && err.contains("spaec"), "{err}");
    }

    #[test]
    fn random_seed_filled_in() {
        let text = r#"{"space": {"generator": {"kind": "grid1d", "n": 3, "h": 1}}, "function": {"type": "random"}}"#;
        let l = &parse_scenarios(text, "r", Path::new(".")).unwrap()[0];
        let sp = l.space().unwrap();
        let (a, s) = l.function(&sp, 7).unwrap();
        assert_eq!(s, Some(7));
        assert_eq!(a, l.function(&sp, 7).unwrap().0);
        assert_ne!(a, l.function(&sp, 8).unwrap().0);
    }
}
