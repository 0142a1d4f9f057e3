//! File formats: rate-profile CSV, trajectory CSV, matrix files and the JSON
//! run report.
//!
//! Numbers are written with 17 significant digits (`{:.16e}`), which is
//! enough for every `f64` to survive a write/read cycle bit for bit. Lines
//! starting with `#` are comments; the trajectory writer uses them to carry
//! metadata (`# key=value`).

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::differential::AngularVelocity;
use crate::linalg::{Mat3, Vec3};
use crate::propagator::{
    DriftReport, Interpolation, Method, RateProfile, Trajectory, TrajectoryMeta, TrajectorySample,
};

pub const PROFILE_HEADER: [&str; 4] = ["t", "wx", "wy", "wz"];
pub const TRAJECTORY_HEADER: [&str; 12] = [
    "t",
    "r11",
    "r12",
    "r13",
    "r21",
    "r22",
    "r23",
    "r31",
    "r32",
    "r33",
    "ortho_err",
    "det_err",
];

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    /// The file parsed but its content violates a domain invariant.
    #[error(transparent)]
    Invalid(#[from] crate::Error),
}

impl FormatError {
    fn parse(line: u64, message: impl Into<String>) -> Self {
        FormatError::Parse {
            line,
            message: message.into(),
        }
    }
}

impl From<csv::Error> for FormatError {
    fn from(e: csv::Error) -> Self {
        let line = e.position().map(|p| p.line()).unwrap_or(0);
        match e.into_kind() {
            csv::ErrorKind::Io(io) => FormatError::Io(io),
            kind => FormatError::parse(line, format!("{kind:?}")),
        }
    }
}

/// Formats a value with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    // `+ 0.0` turns -0.0 into 0.0
    format!("{:.16e}", v + 0.0)
}

fn parse_f64(field: &str, line: u64, column: &str) -> Result<f64, FormatError> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|e| FormatError::parse(line, format!("column {column}: '{field}': {e}")))
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .has_headers(true)
        .from_reader(text.as_bytes())
}

fn check_header(rdr: &mut csv::Reader<&[u8]>, expected: &[&str]) -> Result<(), FormatError> {
    let headers = rdr.headers()?.clone();
    let line = headers.position().map(|p| p.line()).unwrap_or(1);
    if headers.iter().ne(expected.iter().copied()) {
        return Err(FormatError::parse(
            line,
            format!(
                "expected header '{}', found '{}'",
                expected.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    Ok(())
}

/// Reads a `t,wx,wy,wz` profile. With `degrees`, rates are taken as deg/s
/// and converted to rad/s.
pub fn read_profile_csv(
    mut input: impl Read,
    interpolation: Interpolation,
    degrees: bool,
) -> Result<RateProfile, FormatError> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let mut rdr = csv_reader(&text);
    check_header(&mut rdr, &PROFILE_HEADER)?;
    let scale = if degrees { PI / 180.0 } else { 1.0 };
    let mut samples = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.len() != PROFILE_HEADER.len() {
            return Err(FormatError::parse(
                line,
                format!("expected 4 fields, found {}", rec.len()),
            ));
        }
        let mut v = [0.0; 4];
        for (i, slot) in v.iter_mut().enumerate() {
            *slot = parse_f64(&rec[i], line, PROFILE_HEADER[i])?;
        }
        let w = Vec3::new(v[1], v[2], v[3]).scale(scale);
        samples.push((v[0], AngularVelocity::from(w)));
    }
    Ok(RateProfile::new(samples, interpolation)?)
}

pub fn write_profile_csv(mut out: impl Write, profile: &RateProfile) -> std::io::Result<()> {
    writeln!(out, "{}", PROFILE_HEADER.join(","))?;
    for (t, w) in profile.samples() {
        writeln!(
            out,
            "{},{},{},{}",
            fmt_f64(*t),
            fmt_f64(w.w.x),
            fmt_f64(w.w.y),
            fmt_f64(w.w.z)
        )?;
    }
    Ok(())
}

/// Writes a trajectory with metadata comments, the fixed header and one row
/// per sample. `extra` adds further `# key=value` lines.
pub fn write_trajectory_csv(
    mut out: impl Write,
    traj: &Trajectory,
    extra: &[(&str, String)],
) -> std::io::Result<()> {
    let meta = traj.meta();
    let method = meta.method.map(Method::name).unwrap_or("unknown");
    writeln!(out, "# method={method}")?;
    writeln!(out, "# dt={}", fmt_f64(meta.dt))?;
    writeln!(out, "# truncated_span={}", meta.truncated_span)?;
    for (k, v) in extra {
        writeln!(out, "# {k}={v}")?;
    }
    writeln!(out, "{}", TRAJECTORY_HEADER.join(","))?;
    let mut line = String::new();
    for s in traj.samples() {
        line.clear();
        line.push_str(&fmt_f64(s.t));
        for v in s.r.to_row_major() {
            let _ = write!(line, ",{}", fmt_f64(v));
        }
        let _ = write!(
            line,
            ",{},{}",
            fmt_f64(s.r.orthogonality_error()),
            fmt_f64((s.r.det() - 1.0).abs())
        );
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// `# key=value` metadata lines found anywhere in `text`.
fn comment_metadata(text: &str) -> BTreeMap<String, String> {
    text.lines()
        .filter_map(|l| l.trim_start().strip_prefix('#'))
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect()
}

/// Reads a trajectory CSV. The `ortho_err`/`det_err` columns are parsed but
/// not trusted; they are recomputed from the matrices on demand.
pub fn read_trajectory_csv(mut input: impl Read) -> Result<Trajectory, FormatError> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let meta_kv = comment_metadata(&text);
    let mut rdr = csv_reader(&text);
    check_header(&mut rdr, &TRAJECTORY_HEADER)?;
    let mut samples = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.len() != TRAJECTORY_HEADER.len() {
            return Err(FormatError::parse(
                line,
                format!("expected 12 fields, found {}", rec.len()),
            ));
        }
        let mut v = [0.0; 12];
        for (i, slot) in v.iter_mut().enumerate() {
            *slot = parse_f64(&rec[i], line, TRAJECTORY_HEADER[i])?;
        }
        let mut e = [0.0; 9];
        e.copy_from_slice(&v[1..10]);
        samples.push(TrajectorySample {
            t: v[0],
            r: Mat3::from_row_major(e),
        });
    }
    if samples.is_empty() {
        return Err(FormatError::parse(0, "trajectory has no rows"));
    }

    let method = meta_kv.get("method").and_then(|m| m.parse::<Method>().ok());
    let dt = match meta_kv.get("dt") {
        Some(v) => parse_f64(v, 0, "dt metadata")?,
        None if samples.len() >= 2 => {
            (samples[samples.len() - 1].t - samples[0].t) / (samples.len() - 1) as f64
        }
        None => 0.0,
    };
    let truncated_span = meta_kv
        .get("truncated_span")
        .map(|v| v == "true")
        .unwrap_or(false);
    let meta = TrajectoryMeta {
        method,
        dt,
        initial: samples[0].r,
        truncated_span,
    };
    Ok(Trajectory::new(samples, meta)?)
}

/// Reads a 3x3 matrix: nine numbers in row-major order, separated by commas
/// and/or whitespace, with `#` comments allowed.
pub fn read_matrix(mut input: impl Read) -> Result<Mat3, FormatError> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let mut values = Vec::with_capacity(9);
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        for field in line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
        {
            values.push(parse_f64(field, n as u64 + 1, "matrix entry")?);
        }
    }
    let e: [f64; 9] = values.as_slice().try_into().map_err(|_| {
        FormatError::parse(
            0,
            format!("expected 9 matrix entries, found {}", values.len()),
        )
    })?;
    Ok(Mat3::from_row_major(e))
}

pub fn write_matrix(mut out: impl Write, m: &Mat3) -> std::io::Result<()> {
    for row in m.rows() {
        writeln!(
            out,
            "{},{},{}",
            fmt_f64(row[0]),
            fmt_f64(row[1]),
            fmt_f64(row[2])
        )?;
    }
    Ok(())
}

/// Summary of a propagation or verification run.
///
/// JSON schema (all numbers are JSON numbers):
///
/// ```text
/// {
///   "method":          string,           // exp | euler | euler-renorm | unknown
///   "dt":              number,           // seconds
///   "steps":           integer,          // samples - 1
///   "max_ortho_err":   number,
///   "max_det_err":     number,
///   "max_residual":    number,           // only present when verification ran
///   "estimated_order": number | null,
///   "truncated_span":  boolean
/// }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub method: String,
    pub dt: f64,
    pub steps: usize,
    pub max_ortho_err: f64,
    pub max_det_err: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_residual: Option<f64>,
    pub estimated_order: Option<f64>,
    pub truncated_span: bool,
}

impl Report {
    pub fn from_trajectory(traj: &Trajectory, drift: &DriftReport) -> Self {
        let meta = traj.meta();
        Report {
            method: meta
                .method
                .map(Method::name)
                .unwrap_or("unknown")
                .to_string(),
            dt: if traj.len() >= 2 {
                traj.spacing()
            } else {
                meta.dt
            },
            steps: traj.len() - 1,
            max_ortho_err: drift.max_ortho_err,
            max_det_err: drift.max_det_err,
            max_residual: None,
            estimated_order: None,
            truncated_span: meta.truncated_span,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// `key: value` lines. Floats use the shortest representation that
    /// reads back to the same value, as in the JSON form.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_else(|| "null".into());
        let _ = writeln!(s, "method: {}", self.method);
        let _ = writeln!(s, "dt: {:e}", self.dt);
        let _ = writeln!(s, "steps: {}", self.steps);
        let _ = writeln!(s, "max_ortho_err: {:e}", self.max_ortho_err);
        let _ = writeln!(s, "max_det_err: {:e}", self.max_det_err);
        if self.max_residual.is_some() {
            let _ = writeln!(s, "max_residual: {}", opt(self.max_residual));
        }
        let _ = writeln!(s, "estimated_order: {}", opt(self.estimated_order));
        let _ = writeln!(s, "truncated_span: {}", self.truncated_span);
        s
    }

    /// Parses the text form back; the inverse of [`Report::to_text`].
    pub fn from_text(text: &str) -> Result<Report, FormatError> {
        let kv: BTreeMap<&str, &str> = text
            .lines()
            .filter_map(|l| l.split_once(':'))
            .map(|(k, v)| (k.trim(), v.trim()))
            .collect();
        let get = |k: &str| {
            kv.get(k)
                .copied()
                .ok_or_else(|| FormatError::parse(0, format!("missing field {k}")))
        };
        let num = |k: &str| -> Result<f64, FormatError> { parse_f64(get(k)?, 0, k) };
        let opt = |k: &str| -> Result<Option<f64>, FormatError> {
            match kv.get(k) {
                None | Some(&"null") => Ok(None),
                Some(v) => parse_f64(v, 0, k).map(Some),
            }
        };
        Ok(Report {
            method: get("method")?.to_string(),
            dt: num("dt")?,
            steps: get("steps")?
                .parse()
                .map_err(|e| FormatError::parse(0, format!("steps: {e}")))?,
            max_ortho_err: num("max_ortho_err")?,
            max_det_err: num("max_det_err")?,
            max_residual: opt("max_residual")?,
            estimated_order: opt("estimated_order")?,
            truncated_span: get("truncated_span")? == "true",
        })
    }
}
