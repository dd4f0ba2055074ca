//! JFIR joint filters: bivariate polynomials `sum_{p,q} h_(p,q) T_J^(p,q)`.
//!
//! The spectral response `H(l, k) = sum_{p,q} h_(p,q) exp(-i (q w_G,l + p w_D,k))`
//! is the canonical application path. Summing translated copies of the input
//! is kept only as [`apply_filter_by_translations`] for cross-checking.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::harmonic::{inverse_jft, jft, JointBasis, TimeVertexSignal};
use crate::rng::rng_from_seed;
use crate::translation::joint_translate;

/// Taps `h_(p,q)`: row `p` indexes time shifts (`L1` rows), column `q`
/// graph shifts (`L2` columns).
#[derive(Debug, Clone, PartialEq)]
pub struct JointFilterSpec {
    taps: DMatrix<Complex64>,
}

impl JointFilterSpec {
    pub fn new(taps: DMatrix<Complex64>) -> Result<Self> {
        if taps.nrows() == 0 || taps.ncols() == 0 {
            return Err(Error::InvalidParameter("filter needs L1 >= 1 and L2 >= 1".into()));
        }
        if taps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("filter taps must be finite".into()));
        }
        Ok(JointFilterSpec { taps })
    }

    /// The filter whose only tap is `h_(0,0) = 1`.
    pub fn identity() -> Self {
        JointFilterSpec {
            taps: DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0)),
        }
    }

    /// Pure time filter `sum_p h_p T_D^p`.
    pub fn time_only(taps: &[Complex64]) -> Result<Self> {
        JointFilterSpec::new(DMatrix::from_column_slice(taps.len(), 1, taps))
    }

    /// Pure graph filter `sum_q h_q T_G^q`.
    pub fn graph_only(taps: &[Complex64]) -> Result<Self> {
        JointFilterSpec::new(DMatrix::from_row_slice(1, taps.len(), taps))
    }

    pub fn taps(&self) -> &DMatrix<Complex64> {
        &self.taps
    }

    pub fn l1(&self) -> usize {
        self.taps.nrows()
    }

    pub fn l2(&self) -> usize {
        self.taps.ncols()
    }

    pub fn degrees(&self) -> (usize, usize) {
        (self.l1() - 1, self.l2() - 1)
    }

    pub fn scaled(&self, s: f64) -> Self {
        JointFilterSpec {
            taps: self.taps.map(|z| z * s),
        }
    }
}

/// Diagonal of `Phi_J^* H_J Phi_J`, length `N M` in `j = l + k N` order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResponse {
    pub values: Vec<Complex64>,
}

impl SpectralResponse {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `|H|^2`, the output JPSD for white input.
    pub fn power(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm_sqr()).collect()
    }
}

/// Evaluates the bivariate trigonometric polynomial on every joint frequency
/// pair. Cost `O(M L1 L2 + N M L2)`.
pub fn spectral_response(spec: &JointFilterSpec, jb: &JointBasis) -> SpectralResponse {
    let (n, m) = (jb.n(), jb.m());
    let (l1, l2) = (spec.l1(), spec.l2());
    let wd = jb.time().frequencies();
    let wg = jb.graph().frequencies();

    // per graph power q: time polynomial evaluated at every w_D,k
    let mut time_poly = DMatrix::<Complex64>::zeros(l2, m);
    for k in 0..m {
        for p in 0..l1 {
            let ph = Complex64::from_polar(1.0, -(p as f64) * wd[k]);
            for q in 0..l2 {
                time_poly[(q, k)] += spec.taps[(p, q)] * ph;
            }
        }
    }
    let graph_ph: Vec<Vec<Complex64>> = wg
        .iter()
        .map(|w| (0..l2).map(|q| Complex64::from_polar(1.0, -(q as f64) * w)).collect())
        .collect();

    let mut values = Vec::with_capacity(n * m);
    for k in 0..m {
        for gp in &graph_ph {
            values.push((0..l2).map(|q| gp[q] * time_poly[(q, k)]).sum());
        }
    }
    SpectralResponse { values }
}

/// Multiplies the JFT of `x` by a length `N M` response and transforms back.
pub fn apply_response(resp: &SpectralResponse, jb: &JointBasis, x: &TimeVertexSignal) -> Result<TimeVertexSignal> {
    if resp.len() != jb.len() {
        return Err(Error::dimension(jb.len(), resp.len()));
    }
    let mut data = jft(jb, x)?.into_data();
    for (v, h) in data.iter_mut().zip(&resp.values) {
        *v *= h;
    }
    inverse_jft(jb, &TimeVertexSignal::new(data))
}

/// `y = IJFT(H .* JFT(x))`.
pub fn apply_filter(spec: &JointFilterSpec, jb: &JointBasis, x: &TimeVertexSignal) -> Result<TimeVertexSignal> {
    apply_response(&spectral_response(spec, jb), jb, x)
}

/// `sum_{p,q} h_(p,q) T_J^(p,q) x`, evaluated one translation at a time.
pub fn apply_filter_by_translations(
    spec: &JointFilterSpec,
    jb: &JointBasis,
    x: &TimeVertexSignal,
) -> Result<TimeVertexSignal> {
    jb.check_signal(x)?;
    let mut acc = DMatrix::<Complex64>::zeros(jb.n(), jb.m());
    for p in 0..spec.l1() {
        for q in 0..spec.l2() {
            let h = spec.taps[(p, q)];
            if h == Complex64::new(0.0, 0.0) {
                continue;
            }
            acc += joint_translate(jb, x, p as i64, q as i64)?.data() * h;
        }
    }
    Ok(TimeVertexSignal::new(acc))
}

/// Distribution of randomly drawn taps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TapKind {
    /// Real and imaginary parts i.i.d. standard normal.
    #[default]
    Complex,
    /// Real taps, i.i.d. standard normal.
    Real,
}

/// Random filter of shape `l1 x l2`, scaled so that `max |H| = 1` on `jb`.
pub fn random_filter<R: Rng + ?Sized>(
    l1: usize,
    l2: usize,
    kind: TapKind,
    jb: &JointBasis,
    rng: &mut R,
) -> Result<JointFilterSpec> {
    if l1 == 0 || l2 == 0 {
        return Err(Error::InvalidParameter("filter needs L1 >= 1 and L2 >= 1".into()));
    }
    let taps = DMatrix::from_fn(l1, l2, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = match kind {
            TapKind::Complex => rng.sample(StandardNormal),
            TapKind::Real => 0.0,
        };
        Complex64::new(re, im)
    });
    let spec = JointFilterSpec::new(taps)?;
    let peak = spectral_response(&spec, jb).max_abs();
    if peak <= 0.0 || !peak.is_finite() {
        return Err(Error::NotDefined("random filter has an all-zero response".into()));
    }
    Ok(spec.scaled(1.0 / peak))
}

/// Largest `||T(H(X)) - H(T(X))||_F / ||X||_F` over random complex inputs,
/// for an arbitrary linear operator `op`.
pub fn commutation_residual_with<F>(
    op: F,
    jb: &JointBasis,
    upsilon: i64,
    theta: i64,
    trials: usize,
    seed: u64,
) -> Result<f64>
where
    F: Fn(&TimeVertexSignal) -> Result<TimeVertexSignal>,
{
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let mut rng = rng_from_seed(seed);
    let mut worst = 0.0_f64;
    for _ in 0..trials {
        let x = TimeVertexSignal::new(DMatrix::from_fn(jb.n(), jb.m(), |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        }));
        let th = joint_translate(jb, &op(&x)?, upsilon, theta)?;
        let ht = op(&joint_translate(jb, &x, upsilon, theta)?)?;
        let r = (th.data() - ht.data()).norm() / x.frobenius_norm();
        worst = worst.max(r);
    }
    Ok(worst)
}

/// Empirical check that a JFIR filter commutes with `T_J^(u,t)`.
pub fn commutation_residual(
    spec: &JointFilterSpec,
    jb: &JointBasis,
    upsilon: i64,
    theta: i64,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    let resp = spectral_response(spec, jb);
    commutation_residual_with(|x| apply_response(&resp, jb, x), jb, upsilon, theta, trials, seed)
}
