//! JSON formats: graphs, filters, sensor layouts, feature manifests and
//! experiment configurations.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::SensorLayout;
use crate::filtering::JointFilterSpec;
use crate::graph::WeightedGraph;
use crate::sim::ExperimentConfig;

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

fn to_pretty<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(json_error)?;
    s.push('\n');
    Ok(s)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coords: Option<Vec<Vec<f64>>>,
}

/// `{"n": N, "edges": [[i, j, w], ...], "coords": [[x, y, z], ...]}` with
/// 0-based indices, each undirected edge listed once.
pub fn parse_graph_json(text: &str) -> Result<WeightedGraph> {
    let f: GraphFile = serde_json::from_str(text).map_err(json_error)?;
    let g = WeightedGraph::from_edges(f.n, &f.edges)?;
    match f.coords {
        Some(c) => g.with_coords(c),
        None => Ok(g),
    }
}

pub fn graph_to_json(g: &WeightedGraph) -> Result<String> {
    to_pretty(&GraphFile {
        n: g.n_vertices(),
        edges: g.edges(),
        coords: g.coords().map(|c| c.to_vec()),
    })
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FilterFile {
    l1: usize,
    l2: usize,
    taps_re: Vec<Vec<f64>>,
    taps_im: Vec<Vec<f64>>,
}

/// `{"l1": L1, "l2": L2, "taps_re": [[..]], "taps_im": [[..]]}`; row `p`
/// (time power), column `q` (graph power).
pub fn parse_filter_json(text: &str) -> Result<JointFilterSpec> {
    let f: FilterFile = serde_json::from_str(text).map_err(json_error)?;
    let shape_ok = |t: &Vec<Vec<f64>>| t.len() == f.l1 && t.iter().all(|r| r.len() == f.l2);
    if !shape_ok(&f.taps_re) || !shape_ok(&f.taps_im) {
        return Err(Error::Parse(format!("tap arrays must be {}x{}", f.l1, f.l2)));
    }
    if f.l1 == 0 || f.l2 == 0 {
        return Err(Error::Parse("filter needs l1 >= 1 and l2 >= 1".into()));
    }
    let taps = DMatrix::from_fn(f.l1, f.l2, |p, q| Complex64::new(f.taps_re[p][q], f.taps_im[p][q]));
    JointFilterSpec::new(taps)
}

pub fn filter_to_json(spec: &JointFilterSpec) -> Result<String> {
    let t = spec.taps();
    let grid = |part: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
        (0..t.nrows()).map(|p| (0..t.ncols()).map(|q| part(&t[(p, q)])).collect()).collect()
    };
    to_pretty(&FilterFile {
        l1: spec.l1(),
        l2: spec.l2(),
        taps_re: grid(|z| z.re),
        taps_im: grid(|z| z.im),
    })
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelEntry {
    name: String,
    coord: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayoutFile {
    channels: Vec<ChannelEntry>,
    #[serde(default)]
    glb_pairs: Vec<(String, String)>,
}

/// `{"channels": [{"name": .., "coord": [..]}, ..], "glb_pairs": [[a, b], ..]}`.
pub fn parse_layout_json(text: &str) -> Result<SensorLayout> {
    let f: LayoutFile = serde_json::from_str(text).map_err(json_error)?;
    let (names, coords) = f.channels.into_iter().map(|c| (c.name, c.coord)).unzip();
    SensorLayout::new(names, coords, &f.glb_pairs)
}

pub fn layout_to_json(layout: &SensorLayout) -> Result<String> {
    let n = layout.names();
    to_pretty(&LayoutFile {
        channels: n
            .iter()
            .zip(layout.coords())
            .map(|(name, coord)| ChannelEntry {
                name: name.clone(),
                coord: coord.clone(),
            })
            .collect(),
        glb_pairs: layout
            .glb_pairs()
            .iter()
            .map(|&(i, j)| (n[i].clone(), n[j].clone()))
            .collect(),
    })
}

/// Labels may be written as JSON strings or numbers.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum LabelValue {
    Text(String),
    Int(i64),
    Float(f64),
}

impl LabelValue {
    fn into_string(self) -> String {
        match self {
            LabelValue::Text(s) => s,
            LabelValue::Int(i) => i.to_string(),
            LabelValue::Float(f) => f.to_string(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SampleEntry {
    path: String,
    label: LabelValue,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestFile {
    samples: Vec<SampleEntry>,
    rate_hz: f64,
    layout: String,
}

/// One recording listed in a manifest. Paths are as written in the file.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifestSample {
    pub path: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub samples: Vec<ManifestSample>,
    pub rate_hz: f64,
    pub layout: String,
}

/// `{"samples": [{"path": .., "label": ..}], "rate_hz": .., "layout": ..}`.
pub fn parse_manifest_json(text: &str) -> Result<Manifest> {
    let f: ManifestFile = serde_json::from_str(text).map_err(json_error)?;
    if !(f.rate_hz > 0.0 && f.rate_hz.is_finite()) {
        return Err(Error::Parse(format!("rate_hz must be positive, got {}", f.rate_hz)));
    }
    if f.samples.is_empty() {
        return Err(Error::Parse("manifest lists no samples".into()));
    }
    Ok(Manifest {
        samples: f
            .samples
            .into_iter()
            .map(|s| ManifestSample {
                path: s.path,
                label: s.label.into_string(),
            })
            .collect(),
        rate_hz: f.rate_hz,
        layout: f.layout,
    })
}

/// Experiment configuration; omitted fields take their defaults.
pub fn parse_config_json(text: &str) -> Result<ExperimentConfig> {
    serde_json::from_str(text).map_err(json_error)
}

pub fn config_to_json(cfg: &ExperimentConfig) -> Result<String> {
    to_pretty(cfg)
}
