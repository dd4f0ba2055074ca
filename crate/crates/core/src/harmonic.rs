//! Spectral bases and the graph, discrete-time and joint Fourier transforms.
//!
//! The joint basis is the Kronecker product `Phi_D (x) Phi_G`, but it is never
//! materialized on the hot path: the JFT of an `N x M` signal is the two-sided
//! product `Phi_G^* X conj(Phi_D)`, which costs `O(N^2 M + N M^2)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{build_laplacian, rho_bound, Laplacian, WeightedGraph};
use crate::linalg::Split;

/// Magnitude below which a component does not decide an eigenvector's sign.
const SIGN_EPS: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    Graph,
    Time,
}

/// Orthonormal eigenbasis of a Laplacian together with its eigenvalues and
/// angular frequencies.
#[derive(Debug, Clone)]
pub struct SpectralBasis {
    kind: BasisKind,
    vectors: DMatrix<Complex64>,
    eigenvalues: Vec<f64>,
    frequencies: Vec<f64>,
    rho: f64,
}

impl SpectralBasis {
    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Columns are the Fourier modes.
    pub fn vectors(&self) -> &DMatrix<Complex64> {
        &self.vectors
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Graph bases: reduced frequencies `pi * sqrt(lambda / rho)`.
    /// Time bases: `2 pi k / M`.
    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Replaces the spectral bound and recomputes the reduced frequencies.
    /// Eigenvalues are clamped into `[0, rho]` so every frequency lies in
    /// `[0, pi]`.
    pub fn with_rho(mut self, rho: f64) -> Result<Self> {
        if self.kind != BasisKind::Graph {
            return Err(Error::InvalidParameter("rho applies to graph bases only".into()));
        }
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::InvalidParameter(format!("rho = {rho} must be positive")));
        }
        self.rho = rho;
        self.frequencies = reduced_frequencies(&self.eigenvalues, rho);
        Ok(self)
    }
}

fn reduced_frequencies(eigenvalues: &[f64], rho: f64) -> Vec<f64> {
    eigenvalues
        .iter()
        .map(|&l| PI * (l.clamp(0.0, rho) / rho).sqrt())
        .collect()
}

/// Eigendecomposition of a symmetric matrix with ascending eigenvalues and
/// sign-fixed eigenvectors (first component of magnitude above `1e-8` is
/// positive). The frequencies use `rho = lambda_max` until
/// [`SpectralBasis::with_rho`] installs a different bound.
pub fn eigendecompose_symmetric(l: &Laplacian) -> Result<SpectralBasis> {
    let n = l.dim();
    let eig = l
        .matrix()
        .clone()
        .try_symmetric_eigen(1e-15, 10_000)
        .ok_or(Error::Convergence)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let scale = eig.eigenvalues.amax().max(1.0);
    let mut vectors = DMatrix::<Complex64>::zeros(n, n);
    let mut eigenvalues = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(src);
        let sign = col
            .iter()
            .find(|v| v.abs() > SIGN_EPS)
            .map_or(1.0, |v| v.signum());
        for i in 0..n {
            vectors[(i, dst)] = Complex64::new(sign * col[i], 0.0);
        }
        // rounding can leave a Laplacian's zero mode slightly negative
        let v = eig.eigenvalues[src];
        eigenvalues.push(if v < 0.0 && v > -1e-12 * scale { 0.0 } else { v });
    }
    let rho = eigenvalues.last().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
    let frequencies = reduced_frequencies(&eigenvalues, rho);
    Ok(SpectralBasis {
        kind: BasisKind::Graph,
        vectors,
        eigenvalues,
        frequencies,
        rho,
    })
}

/// Graph Fourier basis of a connected graph with the degree-based bound as
/// `rho`.
pub fn graph_basis(g: &WeightedGraph) -> Result<SpectralBasis> {
    g.require_connected()?;
    let rho = rho_bound(g)?;
    eigendecompose_symmetric(&build_laplacian(g))?.with_rho(rho)
}

/// Unitary DFT synthesis matrix `Phi_D[n, k] = exp(i n w_k) / sqrt(M)`.
/// Columns stay in natural frequency order, so the eigenvalues
/// `2 (1 - cos w_k)` are not sorted.
pub fn dft_basis(m: usize) -> Result<SpectralBasis> {
    if m == 0 {
        return Err(Error::Size("time basis needs m >= 1".into()));
    }
    let scale = 1.0 / (m as f64).sqrt();
    let vectors = DMatrix::from_fn(m, m, |n, k| {
        // reduce n*k mod m first so large products keep full accuracy
        let phase = 2.0 * PI * ((n * k) % m) as f64 / m as f64;
        Complex64::from_polar(scale, phase)
    });
    let frequencies: Vec<f64> = (0..m).map(|k| 2.0 * PI * k as f64 / m as f64).collect();
    let eigenvalues = frequencies.iter().map(|w| 2.0 * (1.0 - w.cos())).collect();
    Ok(SpectralBasis {
        kind: BasisKind::Time,
        vectors,
        eigenvalues,
        frequencies,
        rho: 4.0,
    })
}

pub fn gft(basis: &SpectralBasis, x: &DVector<Complex64>) -> Result<DVector<Complex64>> {
    check_len(basis.dim(), x.len())?;
    Ok(basis.vectors.ad_mul(x))
}

pub fn inverse_gft(basis: &SpectralBasis, xhat: &DVector<Complex64>) -> Result<DVector<Complex64>> {
    check_len(basis.dim(), xhat.len())?;
    Ok(&basis.vectors * xhat)
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::dimension(expected, found))
    }
}

/// Time-varying graph signal: `N x M`, rows are vertices, columns time steps.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeVertexSignal {
    data: DMatrix<Complex64>,
}

impl TimeVertexSignal {
    pub fn new(data: DMatrix<Complex64>) -> Self {
        TimeVertexSignal { data }
    }

    pub fn from_real(data: &DMatrix<f64>) -> Self {
        TimeVertexSignal {
            data: data.map(|v| Complex64::new(v, 0.0)),
        }
    }

    pub fn zeros(n: usize, m: usize) -> Self {
        TimeVertexSignal {
            data: DMatrix::zeros(n, m),
        }
    }

    /// Reshapes a length `N M` vector (column-major `vec`) into a signal.
    pub fn from_vec(n: usize, m: usize, v: &DVector<Complex64>) -> Result<Self> {
        check_len(n * m, v.len())?;
        Ok(TimeVertexSignal {
            data: DMatrix::from_column_slice(n, m, v.as_slice()),
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.data.nrows()
    }

    pub fn n_times(&self) -> usize {
        self.data.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.data.shape()
    }

    pub fn data(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn into_data(self) -> DMatrix<Complex64> {
        self.data
    }

    /// `vec(X)`: columns stacked, entry `(l, k)` lands at `l + k N`.
    pub fn vec(&self) -> DVector<Complex64> {
        DVector::from_column_slice(self.data.as_slice())
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    pub fn real_part(&self) -> DMatrix<f64> {
        self.data.map(|z| z.re)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Entrywise squared magnitude in `vec` order.
    pub fn power(&self) -> Vec<f64> {
        self.data.iter().map(|z| z.norm_sqr()).collect()
    }
}

/// Product of a graph basis and an `M`-point DFT basis, with cached split
/// real/imaginary factors for fast transforms.
#[derive(Debug, Clone)]
pub struct JointBasis {
    graph: SpectralBasis,
    time: SpectralBasis,
    phi_g: DMatrix<f64>,
    phi_g_t: DMatrix<f64>,
    dft_re: DMatrix<f64>,
    dft_im: DMatrix<f64>,
}

impl JointBasis {
    pub fn new(graph: SpectralBasis, time: SpectralBasis) -> Result<Self> {
        if graph.kind != BasisKind::Graph || time.kind != BasisKind::Time {
            return Err(Error::InvalidParameter(
                "joint basis needs a graph basis and a time basis".into(),
            ));
        }
        if graph.vectors.iter().any(|z| z.im != 0.0) {
            return Err(Error::InvalidParameter("graph basis must be real".into()));
        }
        let phi_g = graph.vectors.map(|z| z.re);
        let phi_g_t = phi_g.transpose();
        let dft_re = time.vectors.map(|z| z.re);
        let dft_im = time.vectors.map(|z| z.im);
        Ok(JointBasis {
            graph,
            time,
            phi_g,
            phi_g_t,
            dft_re,
            dft_im,
        })
    }

    /// Graph basis of `g` joined with the `m`-point DFT basis.
    pub fn from_graph(g: &WeightedGraph, m: usize) -> Result<Self> {
        JointBasis::new(graph_basis(g)?, dft_basis(m)?)
    }

    pub fn graph(&self) -> &SpectralBasis {
        &self.graph
    }

    pub fn time(&self) -> &SpectralBasis {
        &self.time
    }

    pub fn n(&self) -> usize {
        self.graph.dim()
    }

    pub fn m(&self) -> usize {
        self.time.dim()
    }

    pub fn len(&self) -> usize {
        self.n() * self.m()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Joint index `j = l + k N`.
    pub fn index(&self, l: usize, k: usize) -> usize {
        l + k * self.n()
    }

    /// Inverse of [`JointBasis::index`].
    pub fn pair(&self, j: usize) -> (usize, usize) {
        (j % self.n(), j / self.n())
    }

    /// `lambda_J,j = lambda_G,l + lambda_D,k`.
    pub fn joint_eigenvalue(&self, j: usize) -> f64 {
        let (l, k) = self.pair(j);
        self.graph.eigenvalues[l] + self.time.eigenvalues[k]
    }

    pub fn joint_eigenvalues(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.joint_eigenvalue(j)).collect()
    }

    pub(crate) fn phi_g(&self) -> &DMatrix<f64> {
        &self.phi_g
    }

    pub(crate) fn phi_g_t(&self) -> &DMatrix<f64> {
        &self.phi_g_t
    }

    pub(crate) fn dft_split_rows(&self, start: usize, len: usize) -> Split {
        Split {
            re: self.dft_re.rows(start, len).into_owned(),
            im: self.dft_im.rows(start, len).into_owned(),
        }
    }

    fn dft_split(&self) -> Split {
        Split {
            re: self.dft_re.clone(),
            im: self.dft_im.clone(),
        }
    }

    pub fn check_signal(&self, x: &TimeVertexSignal) -> Result<()> {
        if x.shape() != (self.n(), self.m()) {
            return Err(Error::dimension(
                format!("{}x{} signal", self.n(), self.m()),
                format!("{}x{}", x.n_vertices(), x.n_times()),
            ));
        }
        Ok(())
    }

    /// Explicit `Phi_J = Phi_D (x) Phi_G`. Size `NM x NM`; small instances only.
    pub fn joint_matrix(&self) -> DMatrix<Complex64> {
        self.time.vectors.kronecker(&self.graph.vectors)
    }
}

/// JFT: `X_hat = Phi_G^* X conj(Phi_D)`, i.e. `vec(X_hat) = Phi_J^* vec(X)`.
pub fn jft(jb: &JointBasis, x: &TimeVertexSignal) -> Result<TimeVertexSignal> {
    jb.check_signal(x)?;
    let a = Split::from_complex(&x.data).left_real(jb.phi_g_t());
    let out = a.right(&jb.dft_split(), true);
    Ok(TimeVertexSignal::new(out.into_complex()))
}

/// Inverse JFT: `X = Phi_G X_hat Phi_D^T` (`Phi_D` is symmetric).
pub fn inverse_jft(jb: &JointBasis, xhat: &TimeVertexSignal) -> Result<TimeVertexSignal> {
    jb.check_signal(xhat)?;
    let a = Split::from_complex(&xhat.data).left_real(jb.phi_g());
    let out = a.right(&jb.dft_split(), false);
    Ok(TimeVertexSignal::new(out.into_complex()))
}
