//! Output shapes: the error envelope with exit codes, JSON report structs
//! (field order is part of the contract), and the CSV writer for sweeps.

use monomial_lab::{ChainReport, DefectStats, DegreeClassification, EquationFamily, GpProbeResult,
    Mode, Scalar, StabilityReport};
use serde::{Deserialize, Serialize};

/// A command failure: `Usage` problems exit with 2, `Math` failures
/// (verification or certification did not hold) with 1.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{kind}: {message}")]
pub struct CliError {
    pub kind: String,
    pub message: String,
    pub exit_code: i32,
}

impl CliError {
    pub fn usage(kind: &str, message: impl Into<String>) -> CliError {
        CliError { kind: kind.to_string(), message: message.into(), exit_code: 2 }
    }

    pub fn math(kind: &str, message: impl Into<String>) -> CliError {
        CliError { kind: kind.to_string(), message: message.into(), exit_code: 1 }
    }

    /// The stderr envelope: `{"error":{"kind":...,"message":...}}`.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Inner<'a> {
            kind: &'a str,
            message: &'a str,
        }
        #[derive(Serialize)]
        struct Envelope<'a> {
            error: Inner<'a>,
        }
        serde_json::to_string(&Envelope {
            error: Inner { kind: &self.kind, message: &self.message },
        })
        .expect("error envelope serializes")
    }
}

/// Classification result. Field order and presence are pinned: `lambda`
/// appears whenever the ratio is defined, `degree` only for integer
/// degrees, `value` only for non-integer degrees, `fallback` only when the
/// base is undefined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Scalar>,
    pub class: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fallback: Option<String>,
}

impl ClassifyReport {
    pub fn from_family(family: &EquationFamily) -> ClassifyReport {
        match family.classify() {
            DegreeClassification::Degree { k, lambda } => ClassifyReport {
                lambda: Some(lambda),
                class: "Degree".to_string(),
                degree: Some(k),
                value: None,
                fallback: None,
            },
            DegreeClassification::NonIntegerDegree { value } => ClassifyReport {
                lambda: Some(family.scaling_ratio()),
                class: "NonIntegerDegree".to_string(),
                degree: None,
                value: Some(value),
                fallback: None,
            },
            DegreeClassification::DegenerateRatio { lambda } => ClassifyReport {
                lambda: Some(lambda),
                class: "DegenerateRatio".to_string(),
                degree: None,
                value: None,
                fallback: None,
            },
            DegreeClassification::UndefinedBase => ClassifyReport {
                lambda: None,
                class: "UndefinedBase".to_string(),
                degree: None,
                value: None,
                fallback: Some("gp-degree".to_string()),
            },
        }
    }
}

/// Defect statistics over a sampled grid of argument pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub family: String,
    pub fn_spec: String,
    pub mode: Mode,
    pub pairs_sampled: usize,
    pub max_abs: Scalar,
    pub mean_abs: Scalar,
    pub argmax: (Scalar, Scalar),
    pub tol: f64,
    pub solved: bool,
}

impl ResidualReport {
    pub fn new(
        family: String,
        fn_spec: String,
        mode: Mode,
        pairs_sampled: usize,
        stats: DefectStats,
        tol: f64,
    ) -> ResidualReport {
        let solved = stats.max_abs.to_f64().abs() <= tol;
        ResidualReport {
            family,
            fn_spec,
            mode,
            pairs_sampled,
            max_abs: stats.max_abs,
            mean_abs: stats.mean_abs,
            argmax: stats.argmax,
            tol,
            solved,
        }
    }
}

/// Degree-probe outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpDegreeReport {
    pub fn_spec: String,
    pub mode: Mode,
    pub max_n: u32,
    pub trials: u32,
    pub tol: f64,
    pub seed: u64,
    pub result: GpProbeResult,
}

/// Chain verification outcome with its inputs echoed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainVerifyReport {
    pub family: String,
    pub fn_spec: String,
    pub report: ChainReport,
}

/// Stabilization wrapper: the engine report plus the re-checked bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilizeReport {
    pub family: String,
    pub fn_spec: String,
    pub pass: bool,
    pub margin: f64,
    pub report: StabilityReport,
}

/// One sweep row; the columns of the CSV, in order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub family: String,
    pub fn_spec: String,
    pub psi: String,
    pub eps: String,
    pub branch_i: u8,
    pub l: f64,
    pub iterations: u32,
    pub bound_at_ref: f64,
    pub measured_error: f64,
    pub pass: bool,
}

pub const SWEEP_HEADER: &str =
    "family,fn_spec,psi,eps,branch_i,L,iterations,bound_at_ref,measured_error,pass";

/// Quotes a CSV field only when it contains a comma, quote, or newline.
pub fn csv_escape(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Renders the full CSV document (header plus one line per row, each line
/// terminated by `\n`).
pub fn write_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            csv_escape(&r.family),
            csv_escape(&r.fn_spec),
            csv_escape(&r.psi),
            csv_escape(&r.eps),
            r.branch_i,
            r.l,
            r.iterations,
            r.bound_at_ref,
            r.measured_error,
            r.pass,
        ));
    }
    out
}
