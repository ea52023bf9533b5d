//! File formats: the self-describing complex CSV matrix format and JSON
//! output with every float written to 17 significant digits.

use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter, Serializer};

use crate::error::{FrameError, Result};
use crate::spectral::{CMatrix, C64};

/// Serde adapter: non-finite floats are written as `null` and read back as `+∞`.
pub mod non_finite {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

/// Formats `x` with 17 significant digits in scientific notation.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Pretty JSON formatter that writes floats with 17 significant digits.
struct SeventeenDigits<'a>(PrettyFormatter<'a>);

impl Formatter for SeventeenDigits<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }
}

pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = Serializer::with_formatter(&mut buf, SeventeenDigits(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

fn format_complex(z: C64) -> String {
    let im = format_f64(z.im);
    if im.starts_with('-') {
        format!("{}{}j", format_f64(z.re), im)
    } else {
        format!("{}+{}j", format_f64(z.re), im)
    }
}

/// Writes the `# dim=<d> count=<N> field=complex` CSV format.
pub fn matrix_to_csv(m: &CMatrix) -> String {
    let mut out = format!("# dim={} count={} field=complex\n", m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format_complex(m[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn write_matrix_csv(path: impl AsRef<Path>, m: &CMatrix) -> Result<()> {
    std::fs::write(path, matrix_to_csv(m))?;
    Ok(())
}

pub fn read_matrix_csv(path: impl AsRef<Path>) -> Result<CMatrix> {
    let text = std::fs::read_to_string(path.as_ref())?;
    parse_matrix_csv(&text)
        .map_err(|e| FrameError::Parse(format!("{}: {e}", path.as_ref().display())))
}

/// Parses a complex entry such as `1.5e0-2.0e-1j`, `0.5+2j`, `3` or `-4j`.
pub fn parse_complex(token: &str) -> Result<C64> {
    let t = token.trim();
    let bad = || FrameError::Parse(format!("bad complex entry `{t}`"));
    let Some(body) = t.strip_suffix('j').or_else(|| t.strip_suffix('i')) else {
        return t.parse::<f64>().map(|re| C64::new(re, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is neither leading nor part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    match split {
        Some(i) => {
            let re = body[..i].parse::<f64>().map_err(|_| bad())?;
            let im_text = &body[i..];
            let im = match im_text {
                "+" => 1.0,
                "-" => -1.0,
                s => s.parse::<f64>().map_err(|_| bad())?,
            };
            Ok(C64::new(re, im))
        }
        None => {
            let im = match body {
                "" | "+" => 1.0,
                "-" => -1.0,
                s => s.parse::<f64>().map_err(|_| bad())?,
            };
            Ok(C64::new(0.0, im))
        }
    }
}

pub fn parse_matrix_csv(text: &str) -> Result<CMatrix> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| FrameError::Parse("empty matrix file".into()))?;
    let (dim, count) = parse_header(header)?;
    let mut entries = Vec::with_capacity(dim * count);
    let mut rows = 0;
    for line in lines {
        if line.trim_start().starts_with('#') {
            continue;
        }
        let row: Vec<C64> = line.split(',').map(parse_complex).collect::<Result<_>>()?;
        if row.len() != count {
            return Err(FrameError::Parse(format!("row {rows} has {} entries, header says {count}", row.len())));
        }
        entries.extend(row);
        rows += 1;
    }
    if rows != dim {
        return Err(FrameError::Parse(format!("found {rows} rows, header says {dim}")));
    }
    Ok(CMatrix::from_row_slice(dim, count, &entries))
}

fn parse_header(line: &str) -> Result<(usize, usize)> {
    let body = line
        .trim()
        .strip_prefix('#')
        .ok_or_else(|| FrameError::Parse("matrix file must start with `# dim=.. count=.. field=complex`".into()))?;
    let mut dim = None;
    let mut count = None;
    let mut field = None;
    for part in body.split_whitespace() {
        let (k, v) = part.split_once('=').ok_or_else(|| FrameError::Parse(format!("bad header token `{part}`")))?;
        let num = || v.parse::<usize>().map_err(|_| FrameError::Parse(format!("bad header value `{part}`")));
        match k {
            "dim" => dim = Some(num()?),
            "count" => count = Some(num()?),
            "field" => field = Some(v.to_string()),
            other => return Err(FrameError::Parse(format!("unknown header key `{other}`"))),
        }
    }
    if field.as_deref() != Some("complex") {
        return Err(FrameError::Parse("header must declare field=complex".into()));
    }
    match (dim, count) {
        (Some(d), Some(n)) if d > 0 && n > 0 => Ok((d, n)),
        _ => Err(FrameError::Parse("header needs positive dim and count".into())),
    }
}
