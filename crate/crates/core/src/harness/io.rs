//! Trace CSV and PGM image files.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::point::Point;
use crate::trace::TraceRecord;

pub const TRACE_HEADER: &str = "iter,elapsed_s,f,delta,eta,alpha";

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Renders a trace; floats use the shortest representation that round-trips.
pub fn trace_to_csv(records: &[TraceRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.iter,
            r.elapsed,
            r.f,
            opt(r.delta),
            opt(r.eta),
            opt(r.alpha)
        );
    }
    out
}

pub fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn write_trace_csv(path: &Path, records: &[TraceRecord]) -> Result<()> {
    write_file(path, trace_to_csv(records).as_bytes())
}

/// Clamps to `[0, 1]` and scales to `0..=255`, rounding half up.
fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0 + 0.5).floor() as u8
}

/// Encodes an image as binary (`P5`) or ASCII (`P2`) PGM with maxval 255.
pub fn encode_pgm(image: &Point, binary: bool) -> Result<Vec<u8>> {
    let (rows, cols) = image.shape().ok_or(Error::ShapeMissing)?;
    let magic = if binary { "P5" } else { "P2" };
    let mut out = format!("{magic}\n{cols} {rows}\n255\n").into_bytes();
    if binary {
        out.extend(image.iter().map(|&v| quantize(v)));
    } else {
        for row in image.chunks(cols) {
            let line: Vec<String> = row.iter().map(|&v| quantize(v).to_string()).collect();
            out.extend_from_slice(line.join(" ").as_bytes());
            out.push(b'\n');
        }
    }
    Ok(out)
}

pub fn write_pgm(path: &Path, image: &Point, binary: bool) -> Result<()> {
    write_file(path, &encode_pgm(image, binary)?)
}

/// Decodes `P2` or `P5` data with maxval 255 into values in `[0, 1]`.
pub fn decode_pgm(data: &[u8]) -> Result<Point> {
    let bad = |msg: &str| Error::InvalidParameter(format!("malformed PGM: {msg}"));
    // header: magic, width, height, maxval separated by whitespace
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < data.len() && data[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if data.get(pos) == Some(&b'#') {
            while pos < data.len() && data[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        while pos < data.len() && !data[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        fields.push(std::str::from_utf8(&data[start..pos]).map_err(|_| bad("header"))?.to_string());
    }
    let parse = |s: &str| s.parse::<usize>().map_err(|_| bad("header number"));
    let (cols, rows, maxval) = (parse(&fields[1])?, parse(&fields[2])?, parse(&fields[3])?);
    if maxval != 255 {
        return Err(bad("only maxval 255 is supported"));
    }
    let n = rows * cols;
    let values: Vec<f64> = match fields[0].as_str() {
        "P5" => {
            let body = data.get(pos + 1..pos + 1 + n).ok_or_else(|| bad("truncated data"))?;
            body.iter().map(|&b| b as f64 / 255.0).collect()
        }
        "P2" => {
            let text = std::str::from_utf8(&data[pos..]).map_err(|_| bad("data"))?;
            let vals = text
                .split_ascii_whitespace()
                .map(|t| t.parse::<u8>().map(|b| b as f64 / 255.0).map_err(|_| bad("pixel")))
                .collect::<Result<Vec<_>>>()?;
            if vals.len() != n {
                return Err(bad("pixel count"));
            }
            vals
        }
        _ => return Err(bad("unknown magic")),
    };
    Point::image(rows, cols, values)
}
