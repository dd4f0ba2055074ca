//! File formats. Every parser takes an in-memory `&str` or `&[u8]`, so the
//! same entry points serve the CLI, the tests and the fuzz targets.

mod json;
mod tables;
mod tvsg;

use std::fs;
use std::path::Path;

pub use json::{
    config_to_json, filter_to_json, graph_to_json, layout_to_json, parse_config_json, parse_filter_json,
    parse_graph_json, parse_layout_json, parse_manifest_json, Manifest, ManifestSample,
};
pub use tables::{
    parse_jpsd_csv, parse_signal_csv, write_features_csv, write_jpsd_csv, write_signal_csv, JpsdTable,
    JPSD_HEADER,
};
pub use tvsg::{decode_tvsg, encode_tvsg, FLAG_COMPLEX, HEADER_LEN, MAGIC};

use crate::error::{Error, Result};
use crate::harmonic::TimeVertexSignal;

/// Seventeen significant digits in scientific notation; parses back to the
/// same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Decodes TVSG when the bytes start with its magic, CSV otherwise.
pub fn decode_signal(bytes: &[u8]) -> Result<TimeVertexSignal> {
    if bytes.starts_with(MAGIC) {
        decode_tvsg(bytes)
    } else {
        let text = std::str::from_utf8(bytes).map_err(|e| Error::Parse(format!("signal file: {e}")))?;
        parse_signal_csv(text)
    }
}

pub fn read_signal(path: &Path) -> Result<TimeVertexSignal> {
    decode_signal(&fs::read(path)?)
}

/// Writes TVSG for a `.tvsg` extension and CSV otherwise.
pub fn write_signal(path: &Path, x: &TimeVertexSignal) -> Result<()> {
    let is_tvsg = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("tvsg"));
    if is_tvsg {
        fs::write(path, encode_tvsg(x)?)?;
    } else {
        fs::write(path, write_signal_csv(x)?)?;
    }
    Ok(())
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}
