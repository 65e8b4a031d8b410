//! Readers and writers for signals, TF grids, ambiguity grids and reports.
//!
//! CSV floats use Rust's shortest round-trip formatting, so every file reads
//! back bit-exactly. JSON numbers are written with 17 significant digits.
//! Readers detect CSV versus JSON from the first non-blank character.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ambiguity::AmbGrid;
use crate::error::{Result, TfError};
use crate::signal::SampledSignal;
use crate::wigner::TfGrid;

pub const SIGNAL_TAG: &str = "tfkit-signal";
pub const TFGRID_TAG: &str = "tfkit-tfgrid";
pub const AMBGRID_TAG: &str = "tfkit-ambgrid";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = TfError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(TfError::Parse(format!("unknown format `{s}`"))),
        }
    }
}

/// JSON formatter writing every float as `d.dddddddddddddddde±x`.
struct SigDigits17;

impl serde_json::ser::Formatter for SigDigits17 {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }
}

/// Serializes to compact JSON with 17 significant digits per float.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigits17);
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

fn is_json(text: &str) -> bool {
    text.trim_start().starts_with('{')
}

fn check_tag(found_tag: &str, found_version: u32, tag: &str) -> Result<()> {
    if found_tag != tag {
        return Err(TfError::Parse(format!(
            "expected a {tag} file, found `{found_tag}`"
        )));
    }
    if found_version != FORMAT_VERSION {
        return Err(TfError::Parse(format!(
            "unsupported {tag} version {found_version} (reader supports v{FORMAT_VERSION})"
        )));
    }
    Ok(())
}

/// Parses `# <tag> v<version>, key=value, ...`.
fn parse_header(line: &str, tag: &str) -> Result<BTreeMap<String, String>> {
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| TfError::Parse(format!("missing `# {tag}` header")))?;
    let mut parts = body.split(',').map(str::trim);
    let head = parts.next().unwrap_or_default();
    let (found, version) = head
        .split_once(' ')
        .ok_or_else(|| TfError::Parse(format!("malformed header `{line}`")))?;
    let version: u32 = version
        .trim()
        .strip_prefix('v')
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| TfError::Parse(format!("malformed version in `{line}`")))?;
    check_tag(found, version, tag)?;
    let mut fields = BTreeMap::new();
    for p in parts {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| TfError::Parse(format!("malformed header field `{p}`")))?;
        fields.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(fields)
}

fn field<T: std::str::FromStr>(fields: &BTreeMap<String, String>, key: &str) -> Result<T> {
    fields
        .get(key)
        .ok_or_else(|| TfError::Parse(format!("header lacks `{key}`")))?
        .parse()
        .map_err(|_| TfError::Parse(format!("bad value for `{key}`")))
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| TfError::Parse(format!("bad number `{s}`")))
}

fn parse_row(line: &str, expect: usize) -> Result<Vec<f64>> {
    let row = line.split(',').map(parse_f64).collect::<Result<Vec<_>>>()?;
    if row.len() != expect {
        return Err(TfError::Parse(format!(
            "expected {expect} values per row, found {}",
            row.len()
        )));
    }
    Ok(row)
}

fn push_row<'a>(out: &mut String, values: impl Iterator<Item = &'a f64>) {
    for (i, v) in values.enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{v}");
    }
    out.push('\n');
}

// ---- signals ----

#[derive(Serialize, Deserialize)]
struct SignalJson {
    format: String,
    version: u32,
    fs: f64,
    t0: f64,
    samples: Vec<[f64; 2]>,
}

pub fn signal_to_string(a: &SampledSignal, format: Format) -> Result<String> {
    match format {
        Format::Csv => {
            let mut out = format!(
                "# {SIGNAL_TAG} v{FORMAT_VERSION}, fs={}, t0={}\n",
                a.sample_rate(),
                a.t0()
            );
            for s in a.samples() {
                let _ = writeln!(out, "{},{}", s.re, s.im);
            }
            Ok(out)
        }
        Format::Json => to_json(&SignalJson {
            format: SIGNAL_TAG.into(),
            version: FORMAT_VERSION,
            fs: a.sample_rate(),
            t0: a.t0(),
            samples: a.samples().iter().map(|s| [s.re, s.im]).collect(),
        }),
    }
}

pub fn signal_from_str(text: &str) -> Result<SampledSignal> {
    if is_json(text) {
        let j: SignalJson = serde_json::from_str(text)?;
        check_tag(&j.format, j.version, SIGNAL_TAG)?;
        let samples = j
            .samples
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        return SampledSignal::new(samples, j.fs, j.t0);
    }
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = parse_header(lines.next().unwrap_or_default(), SIGNAL_TAG)?;
    let fs: f64 = field(&header, "fs")?;
    let t0: f64 = field(&header, "t0")?;
    let samples = lines
        .map(|l| parse_row(l, 2).map(|v| Complex64::new(v[0], v[1])))
        .collect::<Result<Vec<_>>>()?;
    SampledSignal::new(samples, fs, t0)
}

pub fn write_signal(path: &Path, a: &SampledSignal, format: Format) -> Result<()> {
    fs::write(path, signal_to_string(a, format)?)?;
    Ok(())
}

pub fn read_signal_path(path: &Path) -> Result<SampledSignal> {
    signal_from_str(&fs::read_to_string(path)?)
}

// ---- TF grids ----

#[derive(Serialize, Deserialize)]
struct TfGridJson {
    format: String,
    version: u32,
    n: usize,
    fs: f64,
    t_axis: Vec<f64>,
    f_axis: Vec<f64>,
    values: Vec<Vec<f64>>,
}

pub fn tfgrid_to_string(g: &TfGrid, format: Format) -> Result<String> {
    let n = g.n();
    match format {
        Format::Csv => {
            let mut out = format!(
                "# {TFGRID_TAG} v{FORMAT_VERSION}, n={n}, fs={}\n",
                g.sample_rate
            );
            push_row(&mut out, g.t_axis.iter());
            push_row(&mut out, g.f_axis.iter());
            for row in g.values.rows() {
                push_row(&mut out, row.iter());
            }
            Ok(out)
        }
        Format::Json => to_json(&TfGridJson {
            format: TFGRID_TAG.into(),
            version: FORMAT_VERSION,
            n,
            fs: g.sample_rate,
            t_axis: g.t_axis.clone(),
            f_axis: g.f_axis.clone(),
            values: g.values.rows().into_iter().map(|r| r.to_vec()).collect(),
        }),
    }
}

fn square<T: Clone>(rows: Vec<Vec<T>>, n: usize) -> Result<Array2<T>> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(TfError::Parse(format!("grid is not {n} x {n}")));
    }
    let flat: Vec<T> = rows.into_iter().flatten().collect();
    Ok(Array2::from_shape_vec((n, n), flat).expect("shape checked"))
}

fn check_axes(n: usize, t: &[f64], f: &[f64]) -> Result<()> {
    if n == 0 || t.len() != n || f.len() != n {
        return Err(TfError::Parse(format!("axes do not have length n = {n}")));
    }
    Ok(())
}

pub fn tfgrid_from_str(text: &str) -> Result<TfGrid> {
    let (n, fs, t_axis, f_axis, rows) = if is_json(text) {
        let j: TfGridJson = serde_json::from_str(text)?;
        check_tag(&j.format, j.version, TFGRID_TAG)?;
        (j.n, j.fs, j.t_axis, j.f_axis, j.values)
    } else {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = parse_header(lines.next().unwrap_or_default(), TFGRID_TAG)?;
        let n: usize = field(&header, "n")?;
        let fs: f64 = field(&header, "fs")?;
        let t = parse_row(lines.next().unwrap_or_default(), n)?;
        let f = parse_row(lines.next().unwrap_or_default(), n)?;
        let rows = lines.map(|l| parse_row(l, n)).collect::<Result<Vec<_>>>()?;
        (n, fs, t, f, rows)
    };
    check_axes(n, &t_axis, &f_axis)?;
    let values = square(rows, n)?;
    Ok(TfGrid {
        values,
        t_axis,
        f_axis,
        sample_rate: fs,
    })
}

pub fn write_tfgrid(path: &Path, g: &TfGrid, format: Format) -> Result<()> {
    fs::write(path, tfgrid_to_string(g, format)?)?;
    Ok(())
}

pub fn read_tfgrid_path(path: &Path) -> Result<TfGrid> {
    tfgrid_from_str(&fs::read_to_string(path)?)
}

// ---- ambiguity grids ----

#[derive(Serialize, Deserialize)]
struct AmbGridJson {
    format: String,
    version: u32,
    n: usize,
    fs: f64,
    t0: f64,
    tau_axis: Vec<f64>,
    nu_axis: Vec<f64>,
    /// Rows over delay; each entry is `[re, im]`.
    values: Vec<Vec<[f64; 2]>>,
}

pub fn ambgrid_to_string(g: &AmbGrid, format: Format) -> Result<String> {
    let n = g.n();
    match format {
        Format::Csv => {
            let mut out = format!(
                "# {AMBGRID_TAG} v{FORMAT_VERSION}, n={n}, fs={}, t0={}\n",
                g.sample_rate, g.t0
            );
            push_row(&mut out, g.tau_axis.iter());
            push_row(&mut out, g.nu_axis.iter());
            for row in g.values.rows() {
                let flat: Vec<f64> = row.iter().flat_map(|v| [v.re, v.im]).collect();
                push_row(&mut out, flat.iter());
            }
            Ok(out)
        }
        Format::Json => to_json(&AmbGridJson {
            format: AMBGRID_TAG.into(),
            version: FORMAT_VERSION,
            n,
            fs: g.sample_rate,
            t0: g.t0,
            tau_axis: g.tau_axis.clone(),
            nu_axis: g.nu_axis.clone(),
            values: g
                .values
                .rows()
                .into_iter()
                .map(|r| r.iter().map(|v| [v.re, v.im]).collect())
                .collect(),
        }),
    }
}

pub fn ambgrid_from_str(text: &str) -> Result<AmbGrid> {
    let (n, fs, t0, tau_axis, nu_axis, rows) = if is_json(text) {
        let j: AmbGridJson = serde_json::from_str(text)?;
        check_tag(&j.format, j.version, AMBGRID_TAG)?;
        let rows = j
            .values
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|[re, im]| Complex64::new(re, im))
                    .collect()
            })
            .collect();
        (j.n, j.fs, j.t0, j.tau_axis, j.nu_axis, rows)
    } else {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = parse_header(lines.next().unwrap_or_default(), AMBGRID_TAG)?;
        let n: usize = field(&header, "n")?;
        let fs: f64 = field(&header, "fs")?;
        let t0: f64 = field(&header, "t0")?;
        let tau = parse_row(lines.next().unwrap_or_default(), n)?;
        let nu = parse_row(lines.next().unwrap_or_default(), n)?;
        let rows = lines
            .map(|l| {
                parse_row(l, 2 * n)
                    .map(|v| v.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect())
            })
            .collect::<Result<Vec<Vec<Complex64>>>>()?;
        (n, fs, t0, tau, nu, rows)
    };
    check_axes(n, &tau_axis, &nu_axis)?;
    let values = square(rows, n)?;
    Ok(AmbGrid {
        values,
        tau_axis,
        nu_axis,
        sample_rate: fs,
        t0,
    })
}

pub fn write_ambgrid(path: &Path, g: &AmbGrid, format: Format) -> Result<()> {
    fs::write(path, ambgrid_to_string(g, format)?)?;
    Ok(())
}

pub fn read_ambgrid_path(path: &Path) -> Result<AmbGrid> {
    ambgrid_from_str(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{generate, SignalSpec};

    fn sig() -> SampledSignal {
        generate(&SignalSpec::gaussian(16, 4.0, 1.0).param("fc", 0.3)).unwrap()
    }

    #[test]
    fn signal_csv_layout() {
        let a = SampledSignal::new(
            vec![Complex64::new(0.5, -1.0), Complex64::new(0.1, 0.0)],
            2.0,
            -0.5,
        )
        .unwrap();
        let text = signal_to_string(&a, Format::Csv).unwrap();
        assert_eq!(text, "# tfkit-signal v1, fs=2, t0=-0.5\n0.5,-1\n0.1,0\n");
        assert_eq!(signal_from_str(&text).unwrap(), a);
    }

    #[test]
    fn signal_json_is_exact() {
        let a = sig();
        let text = signal_to_string(&a, Format::Json).unwrap();
        assert!(text.contains("\"format\":\"tfkit-signal\""));
        assert_eq!(signal_from_str(&text).unwrap(), a);
    }

    #[test]
    fn version_mismatch_rejected() {
        let bad = "# tfkit-signal v2, fs=2, t0=0\n1,0\n0,0\n";
        assert!(matches!(signal_from_str(bad), Err(TfError::Parse(m)) if m.contains("version")));
        let wrong = "# tfkit-tfgrid v1, n=2, fs=2\n";
        assert!(signal_from_str(wrong).is_err());
        let json =
            r#"{"format":"tfkit-signal","version":7,"fs":1.0,"t0":0.0,"samples":[[1,0],[0,0]]}"#;
        assert!(signal_from_str(json).is_err());
    }

    #[test]
    fn malformed_input_rejected() {
        assert!(signal_from_str("").is_err());
        assert!(signal_from_str("# tfkit-signal v1, fs=2\n1,0\n0,0\n").is_err());
        assert!(signal_from_str("# tfkit-signal v1, fs=2, t0=0\n1,0,3\n0,0\n").is_err());
        assert!(signal_from_str("# tfkit-signal v1, fs=2, t0=0\n1,x\n0,0\n").is_err());
    }

    #[test]
    fn grids_round_trip() {
        let a = sig();
        let w = crate::wigner::wvd(&a).unwrap();
        for f in [Format::Csv, Format::Json] {
            assert_eq!(
                tfgrid_from_str(&tfgrid_to_string(&w, f).unwrap()).unwrap(),
                w
            );
        }
        let amb = crate::ambiguity::ambiguity_from_wvd(&w);
        for f in [Format::Csv, Format::Json] {
            assert_eq!(
                ambgrid_from_str(&ambgrid_to_string(&amb, f).unwrap()).unwrap(),
                amb
            );
        }
        let csv = tfgrid_to_string(&w, Format::Csv).unwrap();
        let truncated: String = csv.lines().take(5).map(|l| format!("{l}\n")).collect();
        assert!(tfgrid_from_str(&truncated).is_err());
    }

    #[test]
    fn json_uses_17_digits() {
        assert_eq!(to_json(&0.1).unwrap(), "1.0000000000000001e-1\n");
        assert_eq!(to_json(&-2.5).unwrap(), "-2.5000000000000000e0\n");
        let back: f64 = serde_json::from_str(&to_json(&(1.0 / 3.0)).unwrap()).unwrap();
        assert_eq!(back, 1.0 / 3.0);
    }
}
