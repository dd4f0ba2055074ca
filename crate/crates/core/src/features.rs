//! Sensor-array feature pipeline: a distance-kernel graph over channel
//! coordinates, framing of multichannel recordings, per-sample JPSD features
//! and column standardization.

use std::collections::HashMap;

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::harmonic::{JointBasis, TimeVertexSignal};
use crate::jpsd::gbm;
use crate::rng::rng_from_seed;

/// Channel names, coordinates and the privileged ("global") channel pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorLayout {
    names: Vec<String>,
    coords: Vec<Vec<f64>>,
    glb_pairs: Vec<(usize, usize)>,
}

impl SensorLayout {
    pub fn new(names: Vec<String>, coords: Vec<Vec<f64>>, glb_pairs: &[(String, String)]) -> Result<Self> {
        if names.len() != coords.len() {
            return Err(Error::dimension(names.len(), coords.len()));
        }
        if names.len() < 2 {
            return Err(Error::DegenerateLayout(format!("{} channel(s); need at least 2", names.len())));
        }
        let dim = coords[0].len();
        if dim == 0 || coords.iter().any(|c| c.len() != dim) {
            return Err(Error::DegenerateLayout("coordinates must share a positive dimension".into()));
        }
        if coords.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateLayout("non-finite coordinate".into()));
        }
        let mut index = HashMap::new();
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.as_str(), i).is_some() {
                return Err(Error::DegenerateLayout(format!("duplicate channel name {n:?}")));
            }
        }
        let mut pairs = Vec::with_capacity(glb_pairs.len());
        for (a, b) in glb_pairs {
            let find = |s: &String| {
                index
                    .get(s.as_str())
                    .copied()
                    .ok_or_else(|| Error::DegenerateLayout(format!("unknown channel {s:?} in global pair")))
            };
            let (i, j) = (find(a)?, find(b)?);
            if i == j {
                return Err(Error::DegenerateLayout(format!("global pair joins {a:?} to itself")));
            }
            pairs.push((i.min(j), i.max(j)));
        }
        pairs.sort_unstable();
        pairs.dedup();
        Ok(SensorLayout {
            names,
            coords,
            glb_pairs: pairs,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn coords(&self) -> &[Vec<f64>] {
        &self.coords
    }

    /// Privileged pairs as sorted index pairs `(i, j)`, `i < j`.
    pub fn glb_pairs(&self) -> &[(usize, usize)] {
        &self.glb_pairs
    }

    pub fn is_global(&self, i: usize, j: usize) -> bool {
        self.glb_pairs.binary_search(&(i.min(j), i.max(j))).is_ok()
    }
}

/// Sum of absolute coordinate differences.
pub fn manhattan(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// `kappa * exp(-dist / (2 gamma^2))`.
pub fn kernel_weight(dist: f64, gamma: f64, kappa: f64) -> f64 {
    kappa * (-dist / (2.0 * gamma * gamma)).exp()
}

/// Which channel pairs receive an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgeRule {
    /// Complete weighted graph.
    #[default]
    All,
    /// Pairs where either channel is among the other's `k` nearest (by
    /// Manhattan distance), plus all global pairs.
    Knn(usize),
}

/// Kernel graph over the layout. Global pairs use `kappa_global`, all other
/// pairs `kappa_local`. Pairs whose weight underflows to zero get no edge.
pub fn kernel_graph(
    layout: &SensorLayout,
    gamma: f64,
    kappa_global: f64,
    kappa_local: f64,
    rule: EdgeRule,
) -> Result<WeightedGraph> {
    for (name, v) in [("gamma", gamma), ("kappa_global", kappa_global), ("kappa_local", kappa_local)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
        }
    }
    let n = layout.len();
    let c = layout.coords();
    if c.iter().all(|p| p == &c[0]) {
        return Err(Error::DegenerateLayout("all channels share one position".into()));
    }
    let dist = DMatrix::from_fn(n, n, |i, j| manhattan(&c[i], &c[j]));
    let mut keep = DMatrix::from_element(n, n, matches!(rule, EdgeRule::All));
    if let EdgeRule::Knn(k) = rule {
        if k == 0 {
            return Err(Error::InvalidParameter("k-nearest rule needs k >= 1".into()));
        }
        for i in 0..n {
            let mut others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            others.sort_by(|&a, &b| dist[(i, a)].total_cmp(&dist[(i, b)]).then(a.cmp(&b)));
            for &j in others.iter().take(k) {
                keep[(i, j)] = true;
                keep[(j, i)] = true;
            }
        }
        for &(i, j) in layout.glb_pairs() {
            keep[(i, j)] = true;
        }
    }
    let mut edges = Vec::new();
    for j in 0..n {
        for i in 0..j {
            if !(keep[(i, j)] || keep[(j, i)]) {
                continue;
            }
            let kappa = if layout.is_global(i, j) { kappa_global } else { kappa_local };
            let w = kernel_weight(dist[(i, j)], gamma, kappa);
            if w > 0.0 {
                edges.push((i, j, w));
            }
        }
    }
    WeightedGraph::from_edges(n, &edges)?.with_coords(c.to_vec())
}

/// Samples per frame: `floor(frame_ms * rate / 1000)`.
pub fn frame_len(frame_ms: f64, sample_rate_hz: f64) -> Result<usize> {
    if !(frame_ms > 0.0 && frame_ms.is_finite() && sample_rate_hz > 0.0 && sample_rate_hz.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "frame {frame_ms} ms at {sample_rate_hz} Hz"
        )));
    }
    // the epsilon keeps e.g. 150 ms at 200 Hz at 30 samples despite rounding
    let len = (frame_ms * sample_rate_hz / 1000.0 + 1e-9).floor() as usize;
    if len < 2 {
        return Err(Error::FrameTooShort { samples: len });
    }
    Ok(len)
}

/// Non-overlapping frames of a channels x time recording; a trailing partial
/// frame is dropped.
pub fn frame_signal(raw: &DMatrix<f64>, frame_ms: f64, sample_rate_hz: f64) -> Result<Vec<TimeVertexSignal>> {
    let len = frame_len(frame_ms, sample_rate_hz)?;
    let count = raw.ncols() / len;
    if count == 0 {
        return Err(Error::EmptyInput("recording is shorter than one frame"));
    }
    Ok((0..count)
        .map(|f| TimeVertexSignal::from_real(&raw.columns(f * len, len).into_owned()))
        .collect())
}

/// One row of JPSD features per sample, plus labels.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub values: DMatrix<f64>,
    pub labels: Vec<String>,
    pub standardized: bool,
}

impl FeatureMatrix {
    pub fn new(values: DMatrix<f64>, labels: Vec<String>) -> Result<Self> {
        if values.nrows() != labels.len() {
            return Err(Error::dimension(values.nrows(), labels.len()));
        }
        Ok(FeatureMatrix {
            values,
            labels,
            standardized: false,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.values.ncols()
    }
}

/// Row `s` is the Bartlett JPSD estimate over the frames of sample `s`.
pub fn extract_jpsd_features(
    samples: &[Vec<TimeVertexSignal>],
    labels: Vec<String>,
    jb: &JointBasis,
) -> Result<FeatureMatrix> {
    if samples.len() != labels.len() {
        return Err(Error::dimension(samples.len(), labels.len()));
    }
    let rows = samples
        .par_iter()
        .map(|frames| gbm(frames, jb).map(|t| t.into_vec()))
        .collect::<Result<Vec<_>>>()?;
    let mut values = DMatrix::zeros(rows.len(), jb.len());
    for (r, row) in rows.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            values[(r, c)] = *v;
        }
    }
    FeatureMatrix::new(values, labels)
}

/// Per-column `(z - mean) / sigma` with the population sigma; constant
/// columns become zero.
pub fn zscore(fm: &FeatureMatrix) -> Result<FeatureMatrix> {
    let ns = fm.n_samples();
    if ns < 2 {
        return Err(Error::TooFewSamples { found: ns });
    }
    let mut values = fm.values.clone();
    for mut col in values.column_iter_mut() {
        let first = col[0];
        if col.iter().all(|v| *v == first) {
            col.fill(0.0);
            continue;
        }
        let mean = col.sum() / ns as f64;
        let sd = (col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / ns as f64).sqrt();
        col.apply(|v| *v = (*v - mean) / sd);
    }
    Ok(FeatureMatrix {
        values,
        labels: fm.labels.clone(),
        standardized: true,
    })
}

/// Adds white Gaussian noise at `snr_db` relative to the mean power of the
/// whole matrix. The noise is rescaled so the realized SNR is exact.
/// `None` or `+inf` leaves the data unchanged.
pub fn add_noise(raw: &DMatrix<f64>, snr_db: Option<f64>, seed: u64) -> Result<DMatrix<f64>> {
    let snr = match snr_db {
        None => return Ok(raw.clone()),
        Some(s) if s == f64::INFINITY => return Ok(raw.clone()),
        Some(s) if s.is_nan() || s == f64::NEG_INFINITY => {
            return Err(Error::InvalidParameter(format!("SNR {s} dB")));
        }
        Some(s) => s,
    };
    if raw.is_empty() {
        return Err(Error::EmptyInput("empty recording"));
    }
    let count = raw.len() as f64;
    let power = raw.iter().map(|v| v * v).sum::<f64>() / count;
    if power == 0.0 {
        return Err(Error::NotDefined("SNR of a zero signal".into()));
    }
    let mut rng = rng_from_seed(seed);
    let noise = DMatrix::from_fn(raw.nrows(), raw.ncols(), |_, _| {
        <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng)
    });
    let noise_power = noise.iter().map(|v| v * v).sum::<f64>() / count;
    let target = power / 10f64.powf(snr / 10.0);
    Ok(raw + noise * (target / noise_power).sqrt())
}
