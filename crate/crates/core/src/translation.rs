//! Isometric translation operators on time, graph and the joint domain.
//!
//! Every operator is a diagonal phase in the corresponding spectral basis:
//! `T_D^u = Phi_D P_D^u Phi_D^*`, `T_G^t = Phi_G P_G^t Phi_G^*` and
//! `T_J^(u,t) = T_D^u (x) T_G^t`, whose phase at joint index `j = l + k N` is
//! `exp(-i (t w_G,l + u w_D,k))`. Integer shifts may be negative.

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::harmonic::{inverse_jft, jft, BasisKind, JointBasis, SpectralBasis, TimeVertexSignal};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftDomain {
    Time,
    Graph,
    Joint,
}

/// Unit-modulus spectral multiplier of a translation.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseShift {
    pub domain: ShiftDomain,
    pub upsilon: i64,
    pub theta: i64,
    pub phases: Vec<Complex64>,
}

impl PhaseShift {
    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    /// Entrywise product, i.e. composition of the two translations.
    pub fn compose(&self, other: &PhaseShift) -> Result<PhaseShift> {
        if self.domain != other.domain || self.len() != other.len() {
            return Err(Error::dimension(self.len(), other.len()));
        }
        Ok(PhaseShift {
            domain: self.domain,
            upsilon: self.upsilon + other.upsilon,
            theta: self.theta + other.theta,
            phases: self
                .phases
                .iter()
                .zip(&other.phases)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }
}

/// Phase `u * w_D,k` reduced exactly modulo `2 pi` via integer arithmetic.
fn time_angle(m: usize, k: usize, upsilon: i64) -> f64 {
    let m = m as i128;
    let r = (k as i128 * upsilon as i128).rem_euclid(m);
    2.0 * PI * r as f64 / m as f64
}

pub fn time_phase(time: &SpectralBasis, upsilon: i64) -> PhaseShift {
    let m = time.dim();
    PhaseShift {
        domain: ShiftDomain::Time,
        upsilon,
        theta: 0,
        phases: (0..m)
            .map(|k| Complex64::from_polar(1.0, -time_angle(m, k, upsilon)))
            .collect(),
    }
}

pub fn graph_phase(graph: &SpectralBasis, theta: i64) -> PhaseShift {
    PhaseShift {
        domain: ShiftDomain::Graph,
        upsilon: 0,
        theta,
        phases: graph
            .frequencies()
            .iter()
            .map(|w| Complex64::from_polar(1.0, -(theta as f64) * w))
            .collect(),
    }
}

/// Joint phase vector in `j = l + k N` order.
pub fn joint_phase(jb: &JointBasis, upsilon: i64, theta: i64) -> PhaseShift {
    let n = jb.n();
    let m = jb.m();
    let wg = jb.graph().frequencies();
    let mut phases = Vec::with_capacity(n * m);
    for k in 0..m {
        let a = time_angle(m, k, upsilon);
        for &w in wg {
            phases.push(Complex64::from_polar(1.0, -(theta as f64 * w + a)));
        }
    }
    PhaseShift {
        domain: ShiftDomain::Joint,
        upsilon,
        theta,
        phases,
    }
}

/// Right circular shift: `y[n] = x[(n - u) mod M]`.
pub fn time_shift(x: &DVector<Complex64>, upsilon: i64) -> DVector<Complex64> {
    let m = x.len();
    if m == 0 {
        return x.clone();
    }
    let s = upsilon.rem_euclid(m as i64) as usize;
    DVector::from_fn(m, |n, _| x[(n + m - s) % m])
}

/// Same shift applied through the DFT basis, `Phi_D P_D^u Phi_D^* x`.
pub fn time_shift_spectral(time: &SpectralBasis, x: &DVector<Complex64>, upsilon: i64) -> Result<DVector<Complex64>> {
    if time.kind() != BasisKind::Time {
        return Err(Error::InvalidParameter("time shift needs a time basis".into()));
    }
    apply_phase(time, &time_phase(time, upsilon), x)
}

/// `Phi_G diag(exp(-i t w_G)) Phi_G^* x`.
pub fn graph_translate(basis: &SpectralBasis, x: &DVector<Complex64>, theta: i64) -> Result<DVector<Complex64>> {
    apply_phase(basis, &graph_phase(basis, theta), x)
}

fn apply_phase(basis: &SpectralBasis, p: &PhaseShift, x: &DVector<Complex64>) -> Result<DVector<Complex64>> {
    if x.len() != basis.dim() {
        return Err(Error::dimension(basis.dim(), x.len()));
    }
    let mut xh = basis.vectors().ad_mul(x);
    for (v, ph) in xh.iter_mut().zip(&p.phases) {
        *v *= ph;
    }
    Ok(basis.vectors() * xh)
}

/// `(u, t)`-translation `T_G^t X (T_D^T)^u`, computed as a spectral phase.
pub fn joint_translate(jb: &JointBasis, x: &TimeVertexSignal, upsilon: i64, theta: i64) -> Result<TimeVertexSignal> {
    let xh = jft(jb, x)?;
    let phase = joint_phase(jb, upsilon, theta);
    let mut data = xh.into_data();
    for (v, ph) in data.iter_mut().zip(&phase.phases) {
        *v *= ph;
    }
    inverse_jft(jb, &TimeVertexSignal::new(data))
}
