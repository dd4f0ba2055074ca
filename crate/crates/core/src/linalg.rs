//! Complex matrix products routed through real GEMM.
//!
//! nalgebra multiplies `f64` matrices with a blocked kernel but falls back to
//! a generic loop for `Complex<f64>`, so complex products are assembled from
//! real and imaginary parts.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub(crate) struct Split {
    pub re: DMatrix<f64>,
    pub im: DMatrix<f64>,
}

impl Split {
    pub fn from_complex(m: &DMatrix<Complex64>) -> Self {
        Split {
            re: m.map(|z| z.re),
            im: m.map(|z| z.im),
        }
    }

    pub fn into_complex(self) -> DMatrix<Complex64> {
        let Split { re, im } = self;
        re.zip_map(&im, Complex64::new)
    }

    pub fn is_real(&self) -> bool {
        self.im.iter().all(|&v| v == 0.0)
    }

    /// `real * self`
    pub fn left_real(&self, a: &DMatrix<f64>) -> Split {
        Split {
            re: a * &self.re,
            im: if self.is_real() {
                DMatrix::zeros(a.nrows(), self.im.ncols())
            } else {
                a * &self.im
            },
        }
    }

    /// `self * b` when `conj` is false, `self * conj(b)` otherwise.
    pub fn right(&self, b: &Split, conj: bool) -> Split {
        let s = if conj { -1.0 } else { 1.0 };
        let real_input = self.is_real();
        let mut re = &self.re * &b.re;
        let mut im = &self.re * &b.im;
        im *= s;
        if !real_input {
            re -= (&self.im * &b.im) * s;
            im += &self.im * &b.re;
        }
        Split { re, im }
    }
}
