//! Monte-Carlo experiments: NMSE, bias and spread of JPSD estimators on
//! random graphs and random JFIR filters, and sweeps over one knob.
//!
//! Trial `t` draws its graph, filter, realizations and graph windows from
//! streams derived from `(seed, t)`, so every point of a sweep sees the same
//! random instances (common random numbers) and results do not depend on
//! thread scheduling.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::filtering::{random_filter, JointFilterSpec, TapKind};
use crate::graph::{gen_erdos_renyi, gen_watts_strogatz, WeightedGraph};
use crate::harmonic::{JointBasis, TimeVertexSignal};
use crate::jpsd::{gbm, gwm_with_gain, WindowBank, WindowGain};
use crate::rng::{child_rng, derive_seed};
use crate::stationarity::{synthesize_jwss, JpsdVector, SynthesisMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphKind {
    Er,
    Ws,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Gbm,
    Gwm,
}

/// Experiment knobs. Every field has a default, so a JSON config only needs
/// the fields it changes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub graph: GraphKind,
    pub n: usize,
    /// Edge probability for ER graphs.
    pub p: f64,
    /// Ring degree for WS graphs.
    pub k_ring: usize,
    /// Rewiring probability for WS graphs.
    pub beta: f64,
    pub m: usize,
    pub l1: usize,
    pub l2: usize,
    pub taps: TapKind,
    pub synthesis: SynthesisMode,
    pub method: Method,
    /// Time window length `L`.
    pub window_len: usize,
    /// Time window hop; `None` means `floor(L / 2)`.
    pub hop: Option<usize>,
    pub k2: usize,
    /// Heat-kernel bandwidth; `None` means `rho_G / 10`.
    pub bandwidth: Option<f64>,
    pub gain: WindowGain,
    pub q: usize,
    pub trials: usize,
    pub seed: u64,
    /// Draw a new graph for every trial; otherwise trial 0's graph is reused.
    pub redraw_graph: bool,
    /// Values for the `q` sweep axis.
    pub q_values: Vec<usize>,
    /// `(L1, L2)` pairs for the `degrees` sweep axis.
    pub degree_grid: Vec<(usize, usize)>,
    /// `(L, K2)` pairs for the `window_geometry` sweep axis.
    pub window_grid: Vec<(usize, usize)>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            graph: GraphKind::Er,
            n: 100,
            p: 0.1,
            k_ring: 4,
            beta: 0.3,
            m: 128,
            l1: 7,
            l2: 4,
            taps: TapKind::Complex,
            synthesis: SynthesisMode::Complex,
            method: Method::Gwm,
            window_len: 32,
            hop: None,
            k2: 5,
            bandwidth: None,
            gain: WindowGain::Spectral,
            q: 1,
            trials: 50,
            seed: 0,
            redraw_graph: true,
            q_values: (1..=10).collect(),
            degree_grid: (2..=8).flat_map(|a| (2..=6).map(move |b| (a, b))).collect(),
            window_grid: vec![(16, 5), (32, 5), (64, 5), (32, 2), (32, 10)],
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("n", self.n),
            ("m", self.m),
            ("l1", self.l1),
            ("l2", self.l2),
            ("window_len", self.window_len),
            ("k2", self.k2),
            ("q", self.q),
            ("trials", self.trials),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::InvalidParameter(format!("{name} must be positive")));
            }
        }
        if self.hop == Some(0) {
            return Err(Error::InvalidParameter("hop must be positive".into()));
        }
        if let Some(b) = self.bandwidth {
            if !(b > 0.0 && b.is_finite()) {
                return Err(Error::InvalidParameter(format!("bandwidth {b}")));
            }
        }
        if self.method == Method::Gwm {
            if self.window_len > self.m {
                return Err(Error::Geometry(format!(
                    "window length {} exceeds M = {}",
                    self.window_len, self.m
                )));
            }
            if self.k2 > self.n {
                return Err(Error::Geometry(format!("K2 = {} exceeds N = {}", self.k2, self.n)));
            }
        }
        Ok(())
    }

    pub fn effective_hop(&self) -> usize {
        self.hop.unwrap_or((self.window_len / 2).max(1))
    }

    pub fn generate_graph(&self, seed: u64) -> Result<WeightedGraph> {
        match self.graph {
            GraphKind::Er => gen_erdos_renyi(self.n, self.p, seed),
            GraphKind::Ws => gen_watts_strogatz(self.n, self.k_ring, self.beta, seed),
        }
    }
}

/// Everything drawn for one Monte-Carlo trial.
#[derive(Debug, Clone)]
pub struct TrialInstance {
    pub index: usize,
    pub graph: WeightedGraph,
    pub basis: JointBasis,
    pub filter: JointFilterSpec,
    pub truth: JpsdVector,
    pub realizations: Vec<TimeVertexSignal>,
    /// Seed for the graph window centres.
    pub window_seed: u64,
}

pub fn draw_trial(cfg: &ExperimentConfig, index: usize) -> Result<TrialInstance> {
    let trial_seed = derive_seed(cfg.seed, &[index as u64]);
    let graph_seed = if cfg.redraw_graph {
        derive_seed(trial_seed, &[0])
    } else {
        derive_seed(derive_seed(cfg.seed, &[0]), &[0])
    };
    let graph = cfg.generate_graph(graph_seed)?;
    let basis = JointBasis::from_graph(&graph, cfg.m)?;
    let mut filter_rng = child_rng(trial_seed, &[1]);
    let filter = random_filter(cfg.l1, cfg.l2, cfg.taps, &basis, &mut filter_rng)?;
    let (realizations, truth) =
        synthesize_jwss(&filter, &basis, cfg.q, derive_seed(trial_seed, &[2]), cfg.synthesis)?;
    Ok(TrialInstance {
        index,
        graph,
        basis,
        filter,
        truth,
        realizations,
        window_seed: derive_seed(trial_seed, &[3]),
    })
}

/// The estimator named by `cfg.method`, applied to one trial.
pub fn estimate(cfg: &ExperimentConfig, trial: &TrialInstance) -> Result<JpsdVector> {
    match cfg.method {
        Method::Gbm => gbm(&trial.realizations, &trial.basis),
        Method::Gwm => {
            let bank = trial_bank(cfg, trial)?;
            gwm_with_gain(&trial.realizations, &trial.basis, &bank, cfg.gain)
        }
    }
}

fn trial_bank(cfg: &ExperimentConfig, trial: &TrialInstance) -> Result<WindowBank> {
    let graph_basis = trial.basis.graph();
    let bandwidth = cfg.bandwidth.unwrap_or(graph_basis.rho() / 10.0);
    WindowBank::joint(
        &trial.graph,
        graph_basis,
        cfg.m,
        cfg.window_len,
        cfg.effective_hop(),
        cfg.k2,
        bandwidth,
        trial.window_seed,
    )
}

/// Summary over trials of the normalized errors
/// `e_t = (theta_hat_t - theta_t) / ||theta_t||`:
/// `nmse = mean ||e_t||^2`, `bias = ||mean e_t||`,
/// `std = sqrt(mean ||e_t - mean e||^2)`, so `nmse = bias^2 + std^2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub nmse: f64,
    pub bias: f64,
    pub std: f64,
    /// Mean estimator wall time per trial; excludes drawing the instance.
    pub wall_time_seconds: f64,
    pub trials: usize,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub report: MetricReport,
    /// `||e_t||^2` per trial, in trial order.
    pub trial_nmse: Vec<f64>,
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    run_experiment_with(cfg, |trial| estimate(cfg, trial))
}

/// Runs `cfg.trials` trials in parallel with a custom estimator.
pub fn run_experiment_with<F>(cfg: &ExperimentConfig, estimator: F) -> Result<ExperimentResult>
where
    F: Fn(&TrialInstance) -> Result<JpsdVector> + Sync,
{
    cfg.validate()?;
    let outcomes = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let trial = draw_trial(cfg, t)?;
            let start = Instant::now();
            let est = estimator(&trial)?;
            let elapsed = start.elapsed().as_secs_f64();
            if est.len() != trial.truth.len() {
                return Err(Error::dimension(trial.truth.len(), est.len()));
            }
            let norm = trial.truth.norm();
            if norm == 0.0 {
                return Err(Error::NotDefined("true JPSD is identically zero".into()));
            }
            let err: Vec<f64> = est
                .as_slice()
                .iter()
                .zip(trial.truth.as_slice())
                .map(|(a, b)| (a - b) / norm)
                .collect();
            Ok((err, elapsed))
        })
        .collect::<Result<Vec<_>>>()?;
    let errors: Vec<Vec<f64>> = outcomes.iter().map(|(e, _)| e.clone()).collect();
    let mut report = summarize(&errors);
    report.wall_time_seconds = outcomes.iter().map(|(_, s)| s).sum::<f64>() / cfg.trials as f64;
    Ok(ExperimentResult {
        report,
        trial_nmse: errors.iter().map(|e| e.iter().map(|v| v * v).sum()).collect(),
    })
}

/// Bias/std/NMSE of a set of normalized error vectors.
pub fn summarize(errors: &[Vec<f64>]) -> MetricReport {
    let t = errors.len();
    if t == 0 {
        return MetricReport {
            nmse: 0.0,
            bias: 0.0,
            std: 0.0,
            wall_time_seconds: 0.0,
            trials: 0,
        };
    }
    let d = errors[0].len();
    let mut mean = vec![0.0; d];
    for e in errors {
        for (m, v) in mean.iter_mut().zip(e) {
            *m += v / t as f64;
        }
    }
    let nmse = errors.iter().map(|e| e.iter().map(|v| v * v).sum::<f64>()).sum::<f64>() / t as f64;
    let var = errors
        .iter()
        .map(|e| e.iter().zip(&mean).map(|(v, m)| (v - m) * (v - m)).sum::<f64>())
        .sum::<f64>()
        / t as f64;
    MetricReport {
        nmse,
        bias: mean.iter().map(|m| m * m).sum::<f64>().sqrt(),
        std: var.sqrt(),
        wall_time_seconds: 0.0,
        trials: t,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Q,
    Degrees,
    WindowGeometry,
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "q" => Ok(SweepAxis::Q),
            "degrees" => Ok(SweepAxis::Degrees),
            "window_geometry" => Ok(SweepAxis::WindowGeometry),
            other => Err(Error::InvalidParameter(format!(
                "unknown sweep axis {other:?} (expected q, degrees or window_geometry)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    /// `Q`, `L1xL2` or `LxK2`.
    pub axis_value: String,
    pub result: ExperimentResult,
}

/// One experiment per value of `axis`, all sharing the same trial seeds.
pub fn sweep(cfg: &ExperimentConfig, axis: SweepAxis) -> Result<Vec<SweepRow>> {
    let points: Vec<(String, ExperimentConfig)> = match axis {
        SweepAxis::Q => cfg
            .q_values
            .iter()
            .map(|&q| (q.to_string(), ExperimentConfig { q, ..cfg.clone() }))
            .collect(),
        SweepAxis::Degrees => cfg
            .degree_grid
            .iter()
            .map(|&(l1, l2)| (format!("{l1}x{l2}"), ExperimentConfig { l1, l2, ..cfg.clone() }))
            .collect(),
        SweepAxis::WindowGeometry => cfg
            .window_grid
            .iter()
            .map(|&(window_len, k2)| {
                (
                    format!("{window_len}x{k2}"),
                    ExperimentConfig {
                        window_len,
                        k2,
                        method: Method::Gwm,
                        ..cfg.clone()
                    },
                )
            })
            .collect(),
    };
    if points.is_empty() {
        return Err(Error::EmptyInput("sweep axis has no values"));
    }
    points
        .into_iter()
        .map(|(axis_value, c)| {
            Ok(SweepRow {
                axis_value,
                result: run_experiment(&c)?,
            })
        })
        .collect()
}

/// CSV `axis_value,nmse,bias,std,wall_time_s,trials`. Wall time is written
/// only when `timing` is set so that repeated runs are byte-identical.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W, timing: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let fail = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(["axis_value", "nmse", "bias", "std", "wall_time_s", "trials"])
        .map_err(fail)?;
    for row in rows {
        let r = &row.result.report;
        let time = if timing { crate::io::fmt_f64(r.wall_time_seconds) } else { String::new() };
        w.write_record([
            row.axis_value.clone(),
            crate::io::fmt_f64(r.nmse),
            crate::io::fmt_f64(r.bias),
            crate::io::fmt_f64(r.std),
            time,
            r.trials.to_string(),
        ])
        .map_err(fail)?;
    }
    w.flush()?;
    Ok(())
}

/// Average ranks, ties sharing the mean of their positions (1-based).
pub fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &o in &order[i..=j] {
            out[o] = r;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation and its two-sided p-value from the
/// t approximation with `n - 2` degrees of freedom.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() {
        return Err(Error::dimension(x.len(), y.len()));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::TooFewSamples { found: n });
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let mean = (n as f64 + 1.0) / 2.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mean) * (b - mean);
        sxx += (a - mean) * (a - mean);
        syy += (b - mean) * (b - mean);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::NotDefined("constant input has no rank correlation".into()));
    }
    let rho = sxy / (sxx * syy).sqrt();
    let df = (n - 2) as f64;
    if rho.abs() >= 1.0 {
        return Ok((rho.clamp(-1.0, 1.0), 0.0));
    }
    let t = rho * (df / (1.0 - rho * rho)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::NotDefined(e.to_string()))?;
    Ok((rho, 2.0 * (1.0 - dist.cdf(t.abs()))))
}
