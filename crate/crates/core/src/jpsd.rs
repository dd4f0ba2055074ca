//! Joint windowing and JPSD estimation by periodogram averaging.
//!
//! The Bartlett estimator (GBM) averages raw joint periodograms
//! `|jft(X_q)|^2`. The Welch estimator (GWM) averages periodograms of
//! windowed signals `a_G a_D^T .* X_q` over a bank of separable windows
//! and over realizations; with a single realization the bank alone supplies
//! the averaging.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::harmonic::{jft, JointBasis, SpectralBasis, TimeVertexSignal};
use crate::linalg::Split;
use crate::rng::rng_from_seed;
use crate::stationarity::JpsdVector;

/// A separable time-vertex window `a_G a_D^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointWindow {
    pub time_window: DVector<f64>,
    pub graph_window: DVector<f64>,
}

impl JointWindow {
    /// `a_G a_D^T .* X`.
    pub fn apply(&self, x: &TimeVertexSignal) -> Result<TimeVertexSignal> {
        let (n, m) = x.shape();
        if n != self.graph_window.len() || m != self.time_window.len() {
            return Err(Error::Geometry(format!(
                "window is {}x{}, signal is {n}x{m}",
                self.graph_window.len(),
                self.time_window.len()
            )));
        }
        let mut out = x.data().clone();
        for k in 0..m {
            for l in 0..n {
                out[(l, k)] *= self.graph_window[l] * self.time_window[k];
            }
        }
        Ok(TimeVertexSignal::new(out))
    }

    /// `sum(a_J^2) / (N M)`.
    pub fn mean_square_gain(&self) -> f64 {
        let n = self.graph_window.len() as f64;
        let m = self.time_window.len() as f64;
        self.graph_window.norm_squared() * self.time_window.norm_squared() / (n * m)
    }
}

/// All pairs of `K1` time windows and `K2` graph windows.
#[derive(Debug, Clone)]
pub struct WindowBank {
    time: Vec<DVector<f64>>,
    graph: Vec<DVector<f64>>,
    window_len: usize,
    hop: usize,
}

impl WindowBank {
    /// `window_len` and `hop` are bookkeeping for the time windows and are
    /// not checked against their supports.
    pub fn new(
        time: Vec<DVector<f64>>,
        graph: Vec<DVector<f64>>,
        window_len: usize,
        hop: usize,
    ) -> Result<Self> {
        if time.is_empty() || graph.is_empty() {
            return Err(Error::EmptyInput("window bank needs time and graph windows"));
        }
        let m = time[0].len();
        let n = graph[0].len();
        if time.iter().any(|w| w.len() != m) || graph.iter().any(|w| w.len() != n) {
            return Err(Error::Geometry("windows of one domain differ in length".into()));
        }
        let bad = |w: &DVector<f64>| w.iter().any(|v| !v.is_finite() || *v < 0.0);
        if time.iter().any(bad) || graph.iter().any(bad) {
            return Err(Error::InvalidParameter("window entries must be finite and nonnegative".into()));
        }
        Ok(WindowBank {
            time,
            graph,
            window_len,
            hop,
        })
    }

    /// The single all-ones window; GWM with it is GBM.
    pub fn identity(n: usize, m: usize) -> Self {
        WindowBank {
            time: vec![DVector::from_element(m, 1.0)],
            graph: vec![DVector::from_element(n, 1.0)],
            window_len: m,
            hop: m.max(1),
        }
    }

    /// Hamming time windows combined with heat-kernel graph windows.
    #[allow(clippy::too_many_arguments)]
    pub fn joint(
        graph: &WeightedGraph,
        basis: &SpectralBasis,
        m: usize,
        window_len: usize,
        hop: usize,
        k2: usize,
        bandwidth: f64,
        seed: u64,
    ) -> Result<Self> {
        let time = hamming_bank(m, window_len, hop)?;
        let graph_windows = graph_window_bank(graph, basis, k2, bandwidth, seed)?;
        WindowBank::new(time, graph_windows, window_len, hop)
    }

    /// Hamming time windows with a single all-ones graph window.
    pub fn time_only(n: usize, m: usize, window_len: usize, hop: usize) -> Result<Self> {
        let time = hamming_bank(m, window_len, hop)?;
        WindowBank::new(time, vec![DVector::from_element(n, 1.0)], window_len, hop)
    }

    pub fn k1(&self) -> usize {
        self.time.len()
    }

    pub fn k2(&self) -> usize {
        self.graph.len()
    }

    pub fn len(&self) -> usize {
        self.k1() * self.k2()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn window_len(&self) -> usize {
        self.window_len
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    pub fn n(&self) -> usize {
        self.graph[0].len()
    }

    pub fn m(&self) -> usize {
        self.time[0].len()
    }

    pub fn time_windows(&self) -> &[DVector<f64>] {
        &self.time
    }

    pub fn graph_windows(&self) -> &[DVector<f64>] {
        &self.graph
    }

    /// Windows in time-major order: index `t * K2 + g`.
    pub fn windows(&self) -> impl Iterator<Item = JointWindow> + '_ {
        self.time.iter().flat_map(move |t| {
            self.graph.iter().map(move |g| JointWindow {
                time_window: t.clone(),
                graph_window: g.clone(),
            })
        })
    }
}

/// Number of length-`window_len` windows with hop `hop` that fit in `m`.
pub fn window_count(m: usize, window_len: usize, hop: usize) -> usize {
    (m - window_len) / hop + 1
}

/// Hamming taper `0.54 - 0.46 cos(2 pi n / (L - 1))`; `[1]` for `L = 1`.
pub fn hamming(window_len: usize) -> Vec<f64> {
    if window_len == 1 {
        return vec![1.0];
    }
    let d = (window_len - 1) as f64;
    (0..window_len)
        .map(|i| 0.54 - 0.46 * (2.0 * std::f64::consts::PI * i as f64 / d).cos())
        .collect()
}

/// `K1 = floor((m - L) / hop) + 1` Hamming tapers, window `k` supported on
/// `[k hop, k hop + L)`.
pub fn hamming_bank(m: usize, window_len: usize, hop: usize) -> Result<Vec<DVector<f64>>> {
    if window_len == 0 || hop == 0 {
        return Err(Error::InvalidParameter("window length and hop must be positive".into()));
    }
    if window_len > m {
        return Err(Error::Geometry(format!(
            "window length {window_len} exceeds signal length {m}"
        )));
    }
    let taper = hamming(window_len);
    Ok((0..window_count(m, window_len, hop))
        .map(|k| {
            let mut w = DVector::zeros(m);
            w.rows_mut(k * hop, window_len).copy_from_slice(&taper);
            w
        })
        .collect())
}

/// `K2` vertex-localized windows `Phi_G exp(-Lambda / bandwidth) Phi_G^T e_c`,
/// clamped at zero and scaled to a maximum of one. Centers are spread by a
/// farthest-point sweep on hop distance; the seed picks the first center and
/// breaks ties.
pub fn graph_window_bank(
    graph: &WeightedGraph,
    basis: &SpectralBasis,
    k2: usize,
    bandwidth: f64,
    seed: u64,
) -> Result<Vec<DVector<f64>>> {
    let n = graph.n_vertices();
    if basis.dim() != n {
        return Err(Error::dimension(n, basis.dim()));
    }
    if k2 == 0 || k2 > n {
        return Err(Error::Geometry(format!("{k2} graph windows on {n} vertices")));
    }
    if !(bandwidth > 0.0) || bandwidth.is_nan() {
        return Err(Error::InvalidParameter(format!("bandwidth {bandwidth}")));
    }
    let centers = spread_centers(graph, k2, seed)?;
    let phi = basis.vectors().map(|z| z.re);
    let gain = DVector::from_iterator(n, basis.eigenvalues().iter().map(|l| (-l / bandwidth).exp()));
    centers
        .into_iter()
        .map(|c| {
            let row = phi.row(c).transpose();
            let mut w = &phi * row.component_mul(&gain);
            w.apply(|v| *v = v.max(0.0));
            let top = w.max();
            if !(top > 0.0) {
                return Err(Error::NotDefined(format!("graph window at vertex {c} vanished")));
            }
            Ok(w / top)
        })
        .collect()
}

fn spread_centers(graph: &WeightedGraph, k: usize, seed: u64) -> Result<Vec<usize>> {
    graph.require_connected()?;
    let n = graph.n_vertices();
    let mut rng = rng_from_seed(seed);
    let mut centers = vec![rng.random_range(0..n)];
    let mut nearest: Vec<usize> = hops(graph, centers[0]);
    let mut taken: BTreeSet<usize> = centers.iter().copied().collect();
    while centers.len() < k {
        let far = (0..n)
            .filter(|v| !taken.contains(v))
            .map(|v| nearest[v])
            .max()
            .expect("fewer centers than vertices");
        let ties: Vec<usize> = (0..n).filter(|v| !taken.contains(v) && nearest[*v] == far).collect();
        let c = ties[rng.random_range(0..ties.len())];
        centers.push(c);
        taken.insert(c);
        for (d, h) in nearest.iter_mut().zip(hops(graph, c)) {
            *d = (*d).min(h);
        }
    }
    Ok(centers)
}

fn hops(graph: &WeightedGraph, src: usize) -> Vec<usize> {
    graph
        .hop_distances(src)
        .into_iter()
        .map(|d| d.unwrap_or(usize::MAX))
        .collect()
}

fn check_realizations(realizations: &[TimeVertexSignal], jb: &JointBasis) -> Result<()> {
    if realizations.is_empty() {
        return Err(Error::EmptyInput("no realizations"));
    }
    for x in realizations {
        if x.shape() != (jb.n(), jb.m()) {
            return Err(Error::Geometry(format!(
                "signal is {}x{}, basis is {}x{}",
                x.n_vertices(),
                x.n_times(),
                jb.n(),
                jb.m()
            )));
        }
    }
    Ok(())
}

fn sum_in_order(parts: Vec<Vec<f64>>, len: usize) -> Vec<f64> {
    parts.into_iter().fold(vec![0.0; len], |mut acc, p| {
        for (a, v) in acc.iter_mut().zip(p) {
            *a += v;
        }
        acc
    })
}

/// Generalized Bartlett estimate `(1/Q) sum_q |jft(X_q)|^2`.
pub fn gbm(realizations: &[TimeVertexSignal], jb: &JointBasis) -> Result<JpsdVector> {
    check_realizations(realizations, jb)?;
    let parts = realizations
        .par_iter()
        .map(|x| jft(jb, x).map(|xh| xh.power()))
        .collect::<Result<Vec<_>>>()?;
    let q = realizations.len() as f64;
    let mut theta = sum_in_order(parts, jb.len());
    theta.iter_mut().for_each(|t| *t /= q);
    JpsdVector::new(theta)
}

/// How GWM compensates for the energy removed by the windows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowGain {
    /// Divide the summed periodograms at graph frequency `l` by the summed
    /// white-noise response of the windows there,
    /// `sum_w (sum_v a_G(v)^2 phi_l(v)^2) (sum_n a_D(n)^2 / M)`.
    /// White noise then estimates to exactly one in expectation.
    #[default]
    Spectral,
    /// Divide each windowed periodogram by its mean square gain
    /// `sum(a_J^2) / (N M)`.
    Scalar,
    /// Literal average of windowed periodograms.
    Raw,
}

/// Generalized Welch estimate with the default gain compensation.
pub fn gwm(realizations: &[TimeVertexSignal], jb: &JointBasis, bank: &WindowBank) -> Result<JpsdVector> {
    gwm_with_gain(realizations, jb, bank, WindowGain::default())
}

/// Generalized Welch estimate: the average over realizations and bank
/// windows of `|jft(a_G a_D^T .* X_q)|^2`, compensated as `gain` says.
pub fn gwm_with_gain(
    realizations: &[TimeVertexSignal],
    jb: &JointBasis,
    bank: &WindowBank,
    gain: WindowGain,
) -> Result<JpsdVector> {
    check_realizations(realizations, jb)?;
    if bank.n() != jb.n() || bank.m() != jb.m() {
        return Err(Error::Geometry(format!(
            "window bank is {}x{}, basis is {}x{}",
            bank.n(),
            bank.m(),
            jb.n(),
            jb.m()
        )));
    }
    let (n, m) = (jb.n(), jb.m());
    let graph_energy: Vec<f64> = bank.graph.iter().map(|g| g.norm_squared()).collect();
    // Phi_G^T diag(a_G), one per graph window
    let graph_ops: Vec<DMatrix<f64>> = bank
        .graph
        .iter()
        .map(|g| {
            let mut op = jb.phi_g_t().clone();
            for (c, w) in g.iter().enumerate() {
                op.column_mut(c).scale_mut(*w);
            }
            op
        })
        .collect();
    let jobs: Vec<(usize, usize)> = (0..realizations.len())
        .flat_map(|q| (0..bank.k1()).map(move |t| (q, t)))
        .collect();
    let parts = jobs
        .par_iter()
        .map(|&(q, t)| {
            let a_d = &bank.time[t];
            let mut acc = vec![0.0; n * m];
            let Some(start) = a_d.iter().position(|v| *v != 0.0) else {
                return acc;
            };
            let end = a_d.iter().rposition(|v| *v != 0.0).unwrap() + 1;
            let width = end - start;
            let x = realizations[q].data();
            let mut seg = Split {
                re: DMatrix::zeros(n, width),
                im: DMatrix::zeros(n, width),
            };
            for k in 0..width {
                let w = a_d[start + k];
                for l in 0..n {
                    let z = x[(l, start + k)];
                    seg.re[(l, k)] = z.re * w;
                    seg.im[(l, k)] = z.im * w;
                }
            }
            let y = seg.right(&jb.dft_split_rows(start, width), true);
            let time_energy = a_d.norm_squared();
            for (op, ge) in graph_ops.iter().zip(&graph_energy) {
                let z = y.left_real(op);
                let scale = match gain {
                    WindowGain::Scalar => {
                        let g = ge * time_energy / (n * m) as f64;
                        if g > 0.0 {
                            1.0 / g
                        } else {
                            0.0
                        }
                    }
                    WindowGain::Raw | WindowGain::Spectral => 1.0,
                };
                for ((a, re), im) in acc.iter_mut().zip(z.re.iter()).zip(z.im.iter()) {
                    *a += (re * re + im * im) * scale;
                }
            }
            acc
        })
        .collect::<Vec<_>>();
    let q = realizations.len() as f64;
    let mut theta = sum_in_order(parts, n * m);
    match gain {
        WindowGain::Spectral => {
            let denom = spectral_gain(jb, bank);
            for (j, t) in theta.iter_mut().enumerate() {
                let d = q * denom[j % n];
                *t = if d > 0.0 { *t / d } else { 0.0 };
            }
        }
        WindowGain::Scalar | WindowGain::Raw => {
            let count = q * bank.len() as f64;
            theta.iter_mut().for_each(|t| *t /= count);
        }
    }
    JpsdVector::new(theta)
}

/// Expected summed windowed periodogram of unit white noise at each graph
/// frequency (it does not depend on the time frequency).
pub fn spectral_gain(jb: &JointBasis, bank: &WindowBank) -> Vec<f64> {
    let m = jb.m() as f64;
    let time: f64 = bank.time.iter().map(|a| a.norm_squared() / m).sum();
    let phi_sq = jb.phi_g().map(|v| v * v);
    let mut graph = DVector::zeros(jb.n());
    for a in &bank.graph {
        graph += phi_sq.tr_mul(&a.map(|v| v * v));
    }
    graph.iter().map(|g| g * time).collect()
}
