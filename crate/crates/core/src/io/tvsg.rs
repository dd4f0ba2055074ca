//! TVSG binary signal format.
//!
//! A 16-byte header (`b"TVSG"`, `u32` N, `u32` M, `u32` flags) followed by
//! the N x M samples in row-major order as little-endian `f64`. Flag bit 0
//! marks complex data stored as interleaved `(re, im)` pairs; other flag bits
//! must be zero.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::harmonic::TimeVertexSignal;

pub const MAGIC: &[u8; 4] = b"TVSG";
pub const HEADER_LEN: usize = 16;
pub const FLAG_COMPLEX: u32 = 1;

fn read_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4-byte slice"))
}

pub fn decode_tvsg(bytes: &[u8]) -> Result<TimeVertexSignal> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Parse(format!("TVSG header needs 16 bytes, got {}", bytes.len())));
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::Parse("missing TVSG magic".into()));
    }
    let n = read_u32(bytes, 4) as usize;
    let m = read_u32(bytes, 8) as usize;
    let flags = read_u32(bytes, 12);
    if flags & !FLAG_COMPLEX != 0 {
        return Err(Error::Parse(format!("unknown TVSG flags {flags:#x}")));
    }
    if n == 0 || m == 0 {
        return Err(Error::Parse(format!("TVSG shape {n}x{m} is empty")));
    }
    let complex = flags & FLAG_COMPLEX != 0;
    let per = if complex { 16 } else { 8 };
    let body = n
        .checked_mul(m)
        .and_then(|c| c.checked_mul(per))
        .ok_or_else(|| Error::Parse(format!("TVSG shape {n}x{m} overflows")))?;
    if bytes.len() - HEADER_LEN != body {
        return Err(Error::Parse(format!(
            "TVSG body has {} bytes, shape {n}x{m} needs {body}",
            bytes.len() - HEADER_LEN
        )));
    }
    let mut vals = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")));
    let mut data = DMatrix::<Complex64>::zeros(n, m);
    for r in 0..n {
        for c in 0..m {
            let re = vals.next().expect("length checked");
            let im = if complex { vals.next().expect("length checked") } else { 0.0 };
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::Parse(format!("non-finite sample at ({r}, {c})")));
            }
            data[(r, c)] = Complex64::new(re, im);
        }
    }
    Ok(TimeVertexSignal::new(data))
}

/// Encodes `x`, as real data when every imaginary part is zero.
pub fn encode_tvsg(x: &TimeVertexSignal) -> Result<Vec<u8>> {
    let (n, m) = x.shape();
    let to_u32 = |v: usize| {
        u32::try_from(v).map_err(|_| Error::Size(format!("dimension {v} does not fit the TVSG header")))
    };
    let complex = !x.is_real();
    let mut out = Vec::with_capacity(HEADER_LEN + n * m * if complex { 16 } else { 8 });
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&to_u32(n)?.to_le_bytes());
    out.extend_from_slice(&to_u32(m)?.to_le_bytes());
    out.extend_from_slice(&(if complex { FLAG_COMPLEX } else { 0 }).to_le_bytes());
    for r in 0..n {
        for c in 0..m {
            let z = x.data()[(r, c)];
            out.extend_from_slice(&z.re.to_le_bytes());
            if complex {
                out.extend_from_slice(&z.im.to_le_bytes());
            }
        }
    }
    Ok(out)
}
