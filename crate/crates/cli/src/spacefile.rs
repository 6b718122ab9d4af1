//! Space files: `{"n", "metric": {"type": "matrix", "values"} | {"type": "euclidean", "coords"}, "weights", "labels"?}`.

use std::path::Path;

use anyhow::{bail, Context, Result};
use hajlasz_core::space::MetricMeasureSpace;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Metric {
    Matrix { values: Vec<Vec<f64>> },
    Euclidean { coords: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFile {
    pub n: usize,
    pub metric: Metric,
    pub weights: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl SpaceFile {
    pub fn from_space(space: &MetricMeasureSpace) -> SpaceFile {
        let n = space.len();
        let metric = match space.coords() {
            Some(c) => Metric::Euclidean { coords: c.to_vec() },
            None => Metric::Matrix { values: (0..n).map(|i| space.row(i).to_vec()).collect() },
        };
        SpaceFile { n, metric, weights: space.weights().to_vec(), labels: space.labels().map(|l| l.to_vec()) }
    }

    pub fn build(&self) -> Result<MetricMeasureSpace> {
        let rows = match &self.metric {
            Metric::Matrix { values } => values.len(),
            Metric::Euclidean { coords } => coords.len(),
        };
        if rows != self.n || self.weights.len() != self.n {
            bail!("n = {} but the metric has {rows} rows and there are {} weights", self.n, self.weights.len());
        }
        let space = match &self.metric {
            Metric::Matrix { values } => MetricMeasureSpace::new(values.clone(), self.weights.clone()),
            Metric::Euclidean { coords } => MetricMeasureSpace::euclidean(coords.clone(), self.weights.clone()),
        }?;
        Ok(match &self.labels {
            Some(l) => space.with_labels(l.clone())?,
            None => space,
        })
    }
}

pub fn parse_space(text: &str) -> Result<MetricMeasureSpace> {
    let file: SpaceFile = serde_json::from_str(text).context("malformed space file")?;
    file.build().context("invalid space")
}

pub fn load_space(path: &Path) -> Result<MetricMeasureSpace> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_space(&text).with_context(|| format!("in {}", path.display()))
}

pub fn space_to_string(space: &MetricMeasureSpace) -> Result<String> {
    crate::canonical::to_string(&SpaceFile::from_space(space))
}
