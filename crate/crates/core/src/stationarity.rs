//! JWSS synthesis, true-JPSD bookkeeping and second-order stationarity
//! diagnostics.
//!
//! A zero-mean process is JWSS exactly when its covariance is diagonalized by
//! the joint Fourier basis, `R = Phi_J diag(theta) Phi_J^*`. The diagnostics
//! below measure how far a covariance is from that form, from block-circulant
//! structure in time, and from graph-diagonal blocks. Covariances are dense
//! `NM x NM` matrices, so they are limited to small instances.
//!
//! Graph eigenvectors inside a repeated eigenvalue are not canonical. Entries
//! coupling two joint coordinates that share the same graph eigenvalue and the
//! same DFT bin are therefore not counted as off-diagonal; this makes every
//! residual independent of the eigensolver's choice of basis.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::filtering::{apply_response, spectral_response, JointFilterSpec, SpectralResponse};
use crate::harmonic::{inverse_jft, jft, JointBasis, SpectralBasis, TimeVertexSignal};
use crate::linalg::Split;
use crate::rng::child_rng;

/// Largest `N M` for which a dense covariance is built.
pub const MAX_COVARIANCE_DIM: usize = 4096;

/// Tolerance for treating two eigenvalues as equal.
pub const EIGEN_CLUSTER_TOL: f64 = 1e-9;

/// Joint power spectral density `theta_j`, `j = l + k N`.
#[derive(Debug, Clone, PartialEq)]
pub struct JpsdVector {
    theta: Vec<f64>,
}

impl JpsdVector {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        if let Some(j) = theta.iter().position(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "JPSD entry {j} = {} is not finite and nonnegative",
                theta[j]
            )));
        }
        Ok(JpsdVector { theta })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.theta
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.theta
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.theta.iter().map(|t| t * t).sum::<f64>().sqrt()
    }

    /// `||self - truth||^2 / ||truth||^2`.
    pub fn normalized_sq_error(&self, truth: &JpsdVector) -> Result<f64> {
        if self.len() != truth.len() {
            return Err(Error::dimension(truth.len(), self.len()));
        }
        let den: f64 = truth.theta.iter().map(|t| t * t).sum();
        if den == 0.0 {
            return Err(Error::NotDefined("true JPSD is identically zero".into()));
        }
        let num: f64 = self.theta.iter().zip(&truth.theta).map(|(a, b)| (a - b) * (a - b)).sum();
        Ok(num / den)
    }
}

/// Output JPSD of a joint filter: `S_y = |H|^2 .* S_x`.
pub fn filtered_jpsd(resp: &SpectralResponse, input: &JpsdVector) -> Result<JpsdVector> {
    if resp.len() != input.len() {
        return Err(Error::dimension(resp.len(), input.len()));
    }
    JpsdVector::new(
        resp.values
            .iter()
            .zip(&input.theta)
            .map(|(h, t)| h.norm_sqr() * t)
            .collect(),
    )
}

/// Dense covariance `E[x x^*]` of `x = vec(X)`.
#[derive(Debug, Clone)]
pub struct EmpiricalCovariance {
    matrix: DMatrix<Complex64>,
    samples: usize,
}

impl EmpiricalCovariance {
    pub fn from_matrix(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::dimension(
                "square matrix",
                format!("{}x{}", matrix.nrows(), matrix.ncols()),
            ));
        }
        check_cap(matrix.nrows())?;
        Ok(EmpiricalCovariance { matrix, samples: 0 })
    }

    /// Plain sample average `(1/Q) sum_q x_q x_q^*` (zero mean assumed).
    pub fn from_realizations(realizations: &[TimeVertexSignal]) -> Result<Self> {
        let first = realizations.first().ok_or(Error::EmptyInput("no realizations"))?;
        let (n, m) = first.shape();
        let d = n * m;
        check_cap(d)?;
        let q = realizations.len();
        let mut stacked = DMatrix::<Complex64>::zeros(d, q);
        for (c, x) in realizations.iter().enumerate() {
            if x.shape() != (n, m) {
                return Err(Error::dimension(format!("{n}x{m}"), format!("{:?}", x.shape())));
            }
            stacked.column_mut(c).copy_from_slice(x.data().as_slice());
        }
        let s = Split::from_complex(&stacked);
        let adj = Split {
            re: s.re.transpose(),
            im: -s.im.transpose(),
        };
        let r = s.right(&adj, false).into_complex() / Complex64::new(q as f64, 0.0);
        Ok(EmpiricalCovariance { matrix: r, samples: q })
    }

    /// `Phi_J diag(theta) Phi_J^*`, the covariance of a JWSS process.
    pub fn analytic(jb: &JointBasis, theta: &JpsdVector) -> Result<Self> {
        if theta.len() != jb.len() {
            return Err(Error::dimension(jb.len(), theta.len()));
        }
        check_cap(jb.len())?;
        let d = jb.len();
        let mut r = DMatrix::<Complex64>::zeros(d, d);
        for c in 0..d {
            // column c = Phi_J (theta .* (Phi_J^* e_c))
            let e = unit_signal(jb, c);
            let mut xh = jft(jb, &e)?.into_data();
            for (v, t) in xh.iter_mut().zip(&theta.theta) {
                *v *= t;
            }
            let col = inverse_jft(jb, &TimeVertexSignal::new(xh))?;
            r.column_mut(c).copy_from_slice(col.data().as_slice());
        }
        Ok(EmpiricalCovariance { matrix: r, samples: 0 })
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn matrix_mut(&mut self) -> &mut DMatrix<Complex64> {
        &mut self.matrix
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `max |R - R^*|`.
    pub fn hermitian_defect(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

fn check_cap(d: usize) -> Result<()> {
    if d > MAX_COVARIANCE_DIM {
        return Err(Error::Size(format!(
            "covariance dimension {d} exceeds {MAX_COVARIANCE_DIM}"
        )));
    }
    Ok(())
}

fn unit_signal(jb: &JointBasis, j: usize) -> TimeVertexSignal {
    let mut e = DMatrix::<Complex64>::zeros(jb.n(), jb.m());
    let (l, k) = jb.pair(j);
    e[(l, k)] = Complex64::new(1.0, 0.0);
    TimeVertexSignal::new(e)
}

/// Labels values so that values within `tol` (chained after sorting) share
/// a label.
pub fn cluster_labels(values: &[f64], tol: f64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut labels = vec![0; values.len()];
    let mut label = 0;
    for w in 0..order.len() {
        if w > 0 && values[order[w]] - values[order[w - 1]] > tol {
            label += 1;
        }
        labels[order[w]] = label;
    }
    labels
}

/// Real-valued or complex JWSS synthesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SynthesisMode {
    /// Filter real white noise with the (complex) spectral response as is.
    #[default]
    Complex,
    /// Use the conjugate-symmetrized magnitude
    /// `sqrt((|H(l,k)|^2 + |H(l,-k)|^2) / 2)`, which yields real signals.
    Real,
}

/// Spectral response actually used for synthesis in the given mode.
pub fn synthesis_response(spec: &JointFilterSpec, jb: &JointBasis, mode: SynthesisMode) -> SpectralResponse {
    let resp = spectral_response(spec, jb);
    match mode {
        SynthesisMode::Complex => resp,
        SynthesisMode::Real => {
            let (n, m) = (jb.n(), jb.m());
            let values = (0..n * m)
                .map(|j| {
                    let (l, k) = jb.pair(j);
                    let mirror = jb.index(l, (m - k) % m);
                    let p = 0.5 * (resp.values[j].norm_sqr() + resp.values[mirror].norm_sqr());
                    Complex64::new(p.sqrt(), 0.0)
                })
                .collect();
            SpectralResponse { values }
        }
    }
}

/// Draws `q` realizations of `H z` with `z` real standard-normal `N x M`
/// white noise, and returns them with the true JPSD `|H|^2`.
/// Realization `r` uses the stream derived from `(seed, r)`, so prefixes
/// of longer draws coincide with shorter ones.
pub fn synthesize_jwss(
    spec: &JointFilterSpec,
    jb: &JointBasis,
    q: usize,
    seed: u64,
    mode: SynthesisMode,
) -> Result<(Vec<TimeVertexSignal>, JpsdVector)> {
    let resp = synthesis_response(spec, jb, mode);
    let truth = JpsdVector::new(resp.power())?;
    let realizations = synthesize_with_response(&resp, jb, q, seed, mode)?;
    Ok((realizations, truth))
}

pub(crate) fn synthesize_with_response(
    resp: &SpectralResponse,
    jb: &JointBasis,
    q: usize,
    seed: u64,
    mode: SynthesisMode,
) -> Result<Vec<TimeVertexSignal>> {
    (0..q)
        .into_par_iter()
        .map(|r| {
            let mut rng = child_rng(seed, &[r as u64]);
            let z = white_noise(jb.n(), jb.m(), &mut rng);
            let y = apply_response(resp, jb, &z)?;
            Ok(match mode {
                SynthesisMode::Complex => y,
                SynthesisMode::Real => TimeVertexSignal::from_real(&y.real_part()),
            })
        })
        .collect()
}

pub fn white_noise<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> TimeVertexSignal {
    let z = DMatrix::from_fn(n, m, |_, _| rng.sample::<f64, _>(StandardNormal));
    TimeVertexSignal::from_real(&z)
}

/// `Phi_J^* R Phi_J`.
pub fn spectral_covariance(cov: &EmpiricalCovariance, jb: &JointBasis) -> Result<DMatrix<Complex64>> {
    let d = jb.len();
    if cov.dim() != d {
        return Err(Error::dimension(d, cov.dim()));
    }
    let left = jft_columns(&cov.matrix, jb)?;
    Ok(jft_columns(&left.adjoint(), jb)?.adjoint())
}

fn jft_columns(a: &DMatrix<Complex64>, jb: &JointBasis) -> Result<DMatrix<Complex64>> {
    let mut out = DMatrix::<Complex64>::zeros(a.nrows(), a.ncols());
    for c in 0..a.ncols() {
        let x = TimeVertexSignal::new(DMatrix::from_column_slice(jb.n(), jb.m(), a.column(c).as_slice()));
        out.column_mut(c).copy_from_slice(jft(jb, &x)?.data().as_slice());
    }
    Ok(out)
}

/// Relative off-diagonal energy of `Phi_J^* R Phi_J`.
/// Zero for JWSS covariances; the rank-one covariance of a deterministic
/// spike scores close to one.
pub fn diagonalization_residual(cov: &EmpiricalCovariance, jb: &JointBasis) -> Result<f64> {
    check_cap(cov.dim())?;
    let c = spectral_covariance(cov, jb)?;
    let graph_class = cluster_labels(jb.graph().eigenvalues(), EIGEN_CLUSTER_TOL);
    let class = |j: usize| {
        let (l, k) = jb.pair(j);
        (graph_class[l], k)
    };
    let d = jb.len();
    let mut off = 0.0;
    let mut total = 0.0;
    for b in 0..d {
        for a in 0..d {
            let e = c[(a, b)].norm_sqr();
            total += e;
            if class(a) != class(b) {
                off += e;
            }
        }
    }
    Ok(if total == 0.0 { 0.0 } else { (off / total).sqrt() })
}

fn check_blocks(cov: &EmpiricalCovariance, n: usize, m: usize) -> Result<()> {
    if n == 0 || m == 0 || cov.dim() != n * m {
        return Err(Error::dimension(format!("{n} * {m}"), cov.dim()));
    }
    Ok(())
}

fn block(cov: &EmpiricalCovariance, n: usize, a: usize, b: usize) -> DMatrix<Complex64> {
    cov.matrix.view((a * n, b * n), (n, n)).into_owned()
}

/// Deviation from block-circulant structure. `R` is cut into `m x m` blocks
/// `Xi_(a,b)` of size `n x n` (time-major, matching `vec`); blocks with the
/// same lag `(a - b) mod m` should coincide. Returns the largest Frobenius
/// distance of a block from its lag-class mean, relative to the largest
/// block norm.
pub fn block_circulant_residual(cov: &EmpiricalCovariance, n: usize, m: usize) -> Result<f64> {
    check_blocks(cov, n, m)?;
    let mut scale = 0.0_f64;
    let mut worst = 0.0_f64;
    for lag in 0..m {
        let members: Vec<DMatrix<Complex64>> = (0..m).map(|b| block(cov, n, (b + lag) % m, b)).collect();
        let mean = members.iter().fold(DMatrix::zeros(n, n), |acc, x| acc + x) / Complex64::new(m as f64, 0.0);
        for x in &members {
            scale = scale.max(x.norm());
            worst = worst.max((x - &mean).norm());
        }
    }
    Ok(if scale == 0.0 { 0.0 } else { worst / scale })
}

/// Largest off-diagonal energy of `Phi_G^* Xi_(a,b) Phi_G` over all blocks,
/// relative to the largest block norm. Zero when every block is diagonalized
/// by the graph Fourier basis.
pub fn block_graph_diag_residual(
    cov: &EmpiricalCovariance,
    graph_basis: &SpectralBasis,
    n: usize,
    m: usize,
) -> Result<f64> {
    check_blocks(cov, n, m)?;
    if graph_basis.dim() != n {
        return Err(Error::dimension(n, graph_basis.dim()));
    }
    let labels = cluster_labels(graph_basis.eigenvalues(), EIGEN_CLUSTER_TOL);
    let phi = graph_basis.vectors();
    let mut scale = 0.0_f64;
    let mut worst = 0.0_f64;
    for a in 0..m {
        for b in 0..m {
            let bh = phi.adjoint() * block(cov, n, a, b) * phi;
            let mut off = 0.0;
            for c in 0..n {
                for r in 0..n {
                    if labels[r] != labels[c] {
                        off += bh[(r, c)].norm_sqr();
                    }
                }
            }
            scale = scale.max(bh.norm());
            worst = worst.max(off.sqrt());
        }
    }
    Ok(if scale == 0.0 { 0.0 } else { worst / scale })
}

/// Fraction of the variance of `theta` left unexplained by the best function
/// of the joint Laplacian eigenvalue `lambda_J,j`: within-group sum of squares
/// over total sum of squares, grouping equal `lambda_J` values.
pub fn joint_graph_psd_fit(theta: &JpsdVector, jb: &JointBasis) -> Result<f64> {
    if theta.len() != jb.len() {
        return Err(Error::dimension(jb.len(), theta.len()));
    }
    let lam = jb.joint_eigenvalues();
    let labels = cluster_labels(&lam, EIGEN_CLUSTER_TOL);
    let groups = labels.iter().max().map_or(0, |&g| g + 1);
    let mut sum = vec![0.0; groups];
    let mut count = vec![0usize; groups];
    for (&g, &t) in labels.iter().zip(&theta.theta) {
        sum[g] += t;
        count[g] += 1;
    }
    let mean_all = theta.theta.iter().sum::<f64>() / theta.len().max(1) as f64;
    let mut within = 0.0;
    let mut total = 0.0;
    for (&g, &t) in labels.iter().zip(&theta.theta) {
        let mg = sum[g] / count[g] as f64;
        within += (t - mg).powi(2);
        total += (t - mean_all).powi(2);
    }
    Ok(if total <= f64::EPSILON * mean_all.abs().max(1.0) * theta.len() as f64 * 1e-6 || total == 0.0 {
        0.0
    } else {
        within / total
    })
}
