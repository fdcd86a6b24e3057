//! Request parsing, response rendering and path dumps for the command line.

use std::io::{self, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certify::{solve, Diagnostics, SolveConfig, SolveError};
use crate::complex_poly::Polynomial;
use crate::homotopy::{PathChoice, StartSystem, TrackedPath, TrackerConfig};

/// Header row of a path dump.
pub const DUMP_HEADER: &str = "path,t,re,im,residual";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("empty input")]
    Empty,
    #[error("invalid document at line {line}, column {column}: {message}")]
    Document {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("coefficient {index} at column {column}: cannot parse {text:?} as a number")]
    Number {
        index: usize,
        column: usize,
        text: String,
    },
    #[error("need at least 2 coefficients, got {0}")]
    TooFewCoefficients(usize),
    #[error("coefficient {0} is not finite")]
    NonFinite(usize),
    #[error("{0}")]
    InvalidOption(String),
}

/// A polynomial with optional solver overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveRequest {
    /// Ascending `[re, im]` pairs.
    pub coefficients: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certify: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dump_paths: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<StartSystem>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathChoice>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_restarts: Option<usize>,
}

impl SolveRequest {
    pub fn from_coefficients(coefficients: Vec<[f64; 2]>) -> Self {
        Self {
            coefficients,
            steps: None,
            tol: None,
            seed: None,
            certify: None,
            dump_paths: None,
            start: None,
            path: None,
            max_restarts: None,
        }
    }

    pub fn validate(&self) -> Result<(), ParseError> {
        if self.coefficients.len() < 2 {
            return Err(ParseError::TooFewCoefficients(self.coefficients.len()));
        }
        if let Some(i) = self
            .coefficients
            .iter()
            .position(|[re, im]| !(re.is_finite() && im.is_finite()))
        {
            return Err(ParseError::NonFinite(i));
        }
        if self.steps == Some(0) {
            return Err(ParseError::InvalidOption("steps must be >= 1".into()));
        }
        if let Some(tol) = self.tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(ParseError::InvalidOption("tol must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn polynomial(&self) -> Result<Polynomial, crate::complex_poly::PolyError> {
        Polynomial::new(
            self.coefficients
                .iter()
                .map(|&[re, im]| Complex64::new(re, im))
                .collect(),
        )
    }

    pub fn config(&self) -> SolveConfig {
        let base = TrackerConfig::default();
        SolveConfig {
            tracker: TrackerConfig {
                steps: self.steps.unwrap_or(base.steps),
                residual_tol: self.tol.unwrap_or(base.residual_tol),
                seed: self.seed.unwrap_or(base.seed),
                start: self.start.unwrap_or(base.start),
                path: self.path.unwrap_or(base.path),
                max_restarts: self.max_restarts.unwrap_or(base.max_restarts),
                ..base
            },
            certify: self.certify.unwrap_or(true),
        }
    }
}

/// Parses a JSON request (leading `{`), a JSON array of `[re, im]` pairs
/// (leading `[`), or comma-separated real coefficients.
pub fn parse_input(text: &str) -> Result<SolveRequest, ParseError> {
    let trimmed = text.trim();
    let request = match trimmed.chars().next() {
        None => return Err(ParseError::Empty),
        Some('{') => serde_json::from_str::<SolveRequest>(trimmed).map_err(document_error)?,
        Some('[') => SolveRequest::from_coefficients(
            serde_json::from_str::<Vec<[f64; 2]>>(trimmed).map_err(document_error)?,
        ),
        Some(_) => SolveRequest::from_coefficients(parse_csv(text)?),
    };
    request.validate()?;
    Ok(request)
}

fn document_error(e: serde_json::Error) -> ParseError {
    ParseError::Document {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

fn parse_csv(text: &str) -> Result<Vec<[f64; 2]>, ParseError> {
    let mut out = Vec::new();
    let mut column = 1;
    for (index, field) in text.split(',').enumerate() {
        let lead = field.len() - field.trim_start().len();
        let token = field.trim();
        let value: f64 = token.parse().map_err(|_| ParseError::Number {
            index,
            column: column + lead,
            text: token.to_string(),
        })?;
        out.push([value, 0.0]);
        column += field.chars().count() + 1;
    }
    Ok(out)
}

/// JSON form of a request; [`parse_input`] reads it back unchanged.
pub fn format_request(request: &SolveRequest) -> String {
    serde_json::to_string(request).expect("requests serialize")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Success,
    Failure,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootEntry {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
    pub residual: f64,
    pub certified: bool,
    pub path_indices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResponse {
    pub status: Status,
    /// Degree after trimming leading zeros.
    pub degree: usize,
    pub roots: Vec<RootEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Diagnostics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Response plus the tracked paths, for dumping.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub response: SolveResponse,
    pub paths: Vec<TrackedPath>,
}

fn entries(reports: &[crate::certify::RootReport]) -> Vec<RootEntry> {
    reports
        .iter()
        .map(|r| RootEntry {
            re: r.value.re,
            im: r.value.im,
            multiplicity: r.multiplicity,
            residual: r.residual,
            certified: r.certified,
            path_indices: r.path_indices.clone(),
        })
        .collect()
}

pub fn run(request: &SolveRequest) -> RunOutput {
    let failure = |degree: usize, error: String, diagnostics: Option<Diagnostics>, roots| RunOutput {
        response: SolveResponse {
            status: Status::Failure,
            degree,
            roots,
            diagnostics,
            error: Some(error),
        },
        paths: Vec::new(),
    };
    let f = match request.polynomial() {
        Ok(f) => f,
        Err(e) => return failure(0, e.to_string(), None, Vec::new()),
    };
    match solve(&f, &request.config()) {
        Ok(solution) => RunOutput {
            response: SolveResponse {
                status: Status::Success,
                degree: f.degree(),
                roots: entries(&solution.reports),
                diagnostics: Some(solution.diagnostics),
                error: None,
            },
            paths: solution.paths,
        },
        Err(SolveError::RestartsExhausted {
            attempts,
            last_failure,
            partial,
            diagnostics,
        }) => failure(
            f.degree(),
            format!("all {attempts} attempts failed; last failure: {last_failure}"),
            Some(*diagnostics),
            entries(&partial),
        ),
        Err(e) => failure(f.degree(), e.to_string(), None, Vec::new()),
    }
}

/// Pretty JSON with a trailing newline.
pub fn render_response(response: &SolveResponse) -> String {
    let mut s = serde_json::to_string_pretty(response).expect("responses serialize");
    s.push('\n');
    s
}

/// Writes one CSV row per sample, sorted by path index then `t`, with 17
/// significant digits.
pub fn dump_paths<W: Write>(paths: &[TrackedPath], mut out: W) -> io::Result<()> {
    writeln!(out, "{DUMP_HEADER}")?;
    let mut order: Vec<&TrackedPath> = paths.iter().collect();
    order.sort_by_key(|p| p.index);
    for path in order {
        let mut samples = path.samples.clone();
        samples.sort_by(|a, b| a.t.total_cmp(&b.t));
        for s in samples {
            writeln!(
                out,
                "{},{:.16e},{:.16e},{:.16e},{:.16e}",
                path.index, s.t, s.z.re, s.z.im, s.residual
            )?;
        }
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        let r = parse_input("-1,0,1").unwrap();
        assert_eq!(r.coefficients, vec![[-1.0, 0.0], [0.0, 0.0], [1.0, 0.0]]);
        let r = parse_input(r#"{"coefficients": [[-4, 0], [0, 0], [1, 0]]}"#).unwrap();
        assert_eq!(r.polynomial().unwrap().degree(), 2);
        let r = parse_input("[[1, 2], [3, -4]]").unwrap();
        assert_eq!(r.coefficients, vec![[1.0, 2.0], [3.0, -4.0]]);
        assert!(matches!(parse_input("abc"), Err(ParseError::Number { index: 0, .. })));
        assert!(matches!(
            parse_input("1, 2, x"),
            Err(ParseError::Number { index: 2, column: 7, .. })
        ));
        assert_eq!(parse_input("5"), Err(ParseError::TooFewCoefficients(1)));
        assert_eq!(parse_input("1,inf"), Err(ParseError::NonFinite(1)));
        assert!(matches!(
            parse_input(r#"{"coefficients": [[1, 0], [1, 0]], "bogus": 1}"#),
            Err(ParseError::Document { .. })
        ));
        assert_eq!(parse_input("  "), Err(ParseError::Empty));
    }

    #[test]
    fn run_examples() {
        let out = run(&parse_input("-4,0,1").unwrap());
        assert_eq!(out.response.status, Status::Success);
        let mut re: Vec<f64> = out.response.roots.iter().map(|r| r.re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] + 2.0).abs() < 1e-12 && (re[1] - 2.0).abs() < 1e-12);

        let out = run(&parse_input("1,1,0").unwrap());
        assert_eq!(out.response.degree, 1);
        assert_eq!(out.response.roots.len(), 1);
        assert_eq!(out.response.roots[0].re, -1.0);

        let out = run(&parse_input("-1,0,0,1").unwrap());
        assert_eq!(out.response.roots.len(), 3);
        assert!(out.response.roots.iter().all(|r| r.certified));
    }

    #[test]
    fn dump_examples() {
        let mut request = parse_input("-1,0,0,1").unwrap();
        request.steps = Some(8);
        request.start = Some(StartSystem::Unit);
        let out = run(&request);
        let mut buf = Vec::new();
        dump_paths(&out.paths, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], DUMP_HEADER);
        assert_eq!(lines.len(), 1 + 3 * 9);

        for line in &lines[1..] {
            let fields: Vec<&str> = line.split(',').collect();
            let first = lines
                .iter()
                .find(|l| l.starts_with(&format!("{},", fields[0])))
                .unwrap();
            let first: Vec<&str> = first.split(',').collect();
            let (re, im): (f64, f64) = (fields[2].parse().unwrap(), fields[3].parse().unwrap());
            let (re0, im0): (f64, f64) = (first[2].parse().unwrap(), first[3].parse().unwrap());
            assert!((re - re0).abs() <= 1e-15 && (im - im0).abs() <= 1e-15);
        }

        let mut request = parse_input("-4,0,1").unwrap();
        request.start = Some(StartSystem::Unit);
        let out = run(&request);
        let mut buf = Vec::new();
        dump_paths(&out.paths, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let last_of_path_1 = text.lines().rfind(|l| l.starts_with("1,")).unwrap();
        let re: f64 = last_of_path_1.split(',').nth(2).unwrap().parse().unwrap();
        assert!((re - 2.0).abs() < 1e-8);
    }
}
