use std::collections::BTreeMap;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{CompactFormatter, Formatter};
use spectralci::inference::InferenceResult;

/// Compact JSON with every real written to 17 significant digits.
struct Digits17;

impl Formatter for Digits17 {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        CompactFormatter.write_f32(w, value)
    }
}

#[derive(Serialize)]
struct CiJson<'a> {
    point: f64,
    s_hat: f64,
    lower: f64,
    upper: f64,
    alpha: f64,
    diagnostics: &'a BTreeMap<String, f64>,
}

pub fn ci_json(ci: &InferenceResult<f64>) -> String {
    let doc = CiJson {
        point: ci.point,
        s_hat: ci.s_hat,
        lower: ci.lower,
        upper: ci.upper,
        alpha: ci.alpha,
        diagnostics: &ci.diagnostics,
    };
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Digits17);
    doc.serialize(&mut ser)
        .expect("in-memory JSON serialization");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON is UTF-8")
}

/// Writes `text` to `out`, or to stdout when no path is given.
pub fn deliver(text: &str, out: Option<&Path>) -> io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}
