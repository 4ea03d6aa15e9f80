//! Report documents (canonical JSON) and their CSV projection.

use std::io::Write;

use serde::{Deserialize, Serialize};
use sectio::estimators::{Adjudication, InequalityReport, Verdict};
use sectio::kernel::{
    blaschke_groemer_constant, busemann_intersection_constant, busemann_simplex_constant, crofton_factor,
    identity_constants, prob_constants, schneider_constant, thm1_constant, thm2_constant, IdentityFamily,
    MomentParams,
};
use sectio::stats::MCEstimate;

use crate::config::{ExperimentConfig, REPORT_VERSION};

/// Header of the per-report CSV rows.
pub const CSV_HEADER: [&str; 14] =
    ["theorem", "body", "d", "k", "p", "n", "lhs", "lhs_se", "rhs", "rhs_se", "ratio", "ratio_se", "verdict", "error"];

/// Every closed-form constant available for one `(d, k, p)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsTable {
    pub d: usize,
    pub k: usize,
    pub p: f64,
    pub thm1_constant: f64,
    pub thm2_constant: f64,
    /// `C'`, defined for `k < d`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prob_affine_constant: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crofton_factor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub busemann_intersection: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schneider: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub busemann_simplex: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blaschke_groemer: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub identity_linear: Option<f64>,
    /// `(d+p)(d+p+1) / (2 d kappa_d)` as usually displayed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub identity_affine_printed: Option<f64>,
    /// Twice the displayed value; the one consistent with the affine constant at `k = 1`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub identity_affine_doubled: Option<f64>,
}

impl ConstantsTable {
    pub fn new(params: &MomentParams) -> Self {
        let (d, k, p) = (params.d(), params.k(), params.p());
        let linear_identity = (k == 1).then(|| identity_constants(d, p, IdentityFamily::Linear).ok()).flatten();
        let affine_identity = (k == 1).then(|| identity_constants(d, p, IdentityFamily::Affine).ok()).flatten();
        Self {
            d,
            k,
            p,
            thm1_constant: thm1_constant(params),
            thm2_constant: thm2_constant(params),
            prob_affine_constant: prob_constants(params).ok().map(|c| c.affine),
            crofton_factor: (k < d).then(|| crofton_factor(d, k)),
            busemann_intersection: (p == 0.0).then(|| busemann_intersection_constant(d, k)),
            schneider: (p == 0.0).then(|| schneider_constant(d, k)),
            busemann_simplex: (k == d).then(|| busemann_simplex_constant(d, p)),
            blaschke_groemer: (k == d).then(|| blaschke_groemer_constant(d, p)),
            identity_linear: linear_identity.map(|c| c.printed),
            identity_affine_printed: affine_identity.map(|c| c.printed),
            identity_affine_doubled: affine_identity.map(|c| c.doubled),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Payload {
    Inequality { report: InequalityReport },
    Identity { report: InequalityReport, #[serde(skip_serializing_if = "Option::is_none")] adjudication: Option<Adjudication> },
    Estimate { quantity: String, estimate: MCEstimate },
    Constants { constants: ConstantsTable },
}

impl Payload {
    pub fn report(&self) -> Option<&InequalityReport> {
        match self {
            Payload::Inequality { report } | Payload::Identity { report, .. } => Some(report),
            _ => None,
        }
    }
}

/// Standard errors of each estimated component, flattened for quick reading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StandardErrors {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimate: Option<f64>,
}

impl StandardErrors {
    fn of(payload: &Payload) -> Self {
        let mut se = StandardErrors { lhs: None, rhs: None, ratio: None, estimate: None };
        if let Some(r) = payload.report() {
            se.lhs = Some(r.lhs.std_error);
            se.rhs = Some(r.rhs.std_error);
            se.ratio = Some(r.ratio_std_error);
        }
        if let Payload::Estimate { estimate, .. } = payload {
            se.estimate = Some(estimate.std_error);
        }
        se
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorInfo {
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub version: String,
    pub config: ExperimentConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub payload: Option<Payload>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub standard_errors: Option<StandardErrors>,
    /// Present only when timing was requested, so default output stays
    /// byte-for-byte reproducible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
}

impl ReportDocument {
    pub fn success(config: ExperimentConfig, payload: Payload) -> Self {
        Self {
            version: REPORT_VERSION.into(),
            config,
            standard_errors: Some(StandardErrors::of(&payload)),
            payload: Some(payload),
            wall_time_seconds: None,
            error: None,
        }
    }

    pub fn failure(config: ExperimentConfig, kind: &str, message: String) -> Self {
        Self {
            version: REPORT_VERSION.into(),
            config,
            payload: None,
            standard_errors: None,
            wall_time_seconds: None,
            error: Some(ErrorInfo { kind: kind.into(), message }),
        }
    }

    pub fn verdict(&self) -> Option<Verdict> {
        self.payload.as_ref().and_then(Payload::report).map(|r| r.verdict)
    }

    /// Process exit code: 0 for equality, strict inequality or plain
    /// estimates, 2 for a violation, 3 for inconclusive, 1 for errors.
    pub fn exit_code(&self) -> i32 {
        if self.error.is_some() {
            return 1;
        }
        match self.verdict() {
            Some(Verdict::Violation) => 2,
            Some(Verdict::Inconclusive) => 3,
            _ => 0,
        }
    }
}

/// Exit code of a batch: any violation wins, then errors, then inconclusive.
pub fn batch_exit_code(docs: &[ReportDocument]) -> i32 {
    let codes: Vec<i32> = docs.iter().map(ReportDocument::exit_code).collect();
    [2, 1, 3].into_iter().find(|c| codes.contains(c)).unwrap_or(0)
}

/// Shortest decimal that reads back to the same `f64` is at most 17
/// significant digits; this always writes exactly 17.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn csv_row(doc: &ReportDocument) -> Vec<String> {
    let cfg = &doc.config;
    let first = |v: &[usize]| v.first().map(ToString::to_string).unwrap_or_default();
    let mut row = vec![
        cfg.theorem.map(|t| t.to_string()).unwrap_or_default(),
        cfg.bodies.first().cloned().unwrap_or_default(),
        cfg.d.to_string(),
        first(&cfg.ks),
        cfg.ps.first().map(|&p| format_float(p)).unwrap_or_default(),
        cfg.n.to_string(),
    ];
    match doc.payload.as_ref() {
        Some(Payload::Inequality { report }) | Some(Payload::Identity { report, .. }) => {
            row[0] = report.theorem.to_string();
            row.extend(
                [report.lhs.mean, report.lhs.std_error, report.rhs.mean, report.rhs.std_error, report.ratio, report.ratio_std_error]
                    .map(format_float),
            );
            row.push(report.verdict.to_string());
            row.push(String::new());
        }
        Some(Payload::Estimate { estimate, .. }) => {
            row.extend([format_float(estimate.mean), format_float(estimate.std_error)]);
            row.extend(std::iter::repeat_n(String::new(), 6));
        }
        Some(Payload::Constants { .. }) | None => {
            row.extend(std::iter::repeat_n(String::new(), 7));
            row.push(doc.error.as_ref().map(|e| e.message.clone()).unwrap_or_default());
        }
    }
    row
}

/// Writes the CSV projection: one row per report, estimates in the `lhs`
/// columns.
pub fn write_csv<W: Write>(out: W, docs: &[ReportDocument]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for doc in docs {
        w.write_record(csv_row(doc))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a constants table as `name,value` rows.
pub fn write_constants_csv<W: Write>(out: W, table: &ConstantsTable) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["name", "value"])?;
    let value = serde_json::to_value(table).map_err(std::io::Error::other)?;
    if let serde_json::Value::Object(map) = value {
        for (name, v) in map {
            let text = match v.as_f64() {
                Some(x) if !matches!(name.as_str(), "d" | "k") => format_float(x),
                _ => v.to_string(),
            };
            w.write_record([name, text])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Command;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, std::f64::consts::PI, 1e-300, 6.02214076e23, -2.5] {
            let s = format_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap().replace(['-', '.'], "");
            assert_eq!(mantissa.len(), 17, "{s}");
        }
    }

    #[test]
    fn batch_codes() {
        let cfg = ExperimentConfig::new(Command::Crofton, 3);
        let err = ReportDocument::failure(cfg.clone(), "config", "bad".into());
        let est = MCEstimate::exact(1.0, 10, 0);
        let ok = ReportDocument::success(cfg, Payload::Estimate { quantity: "V1".into(), estimate: est });
        assert_eq!(batch_exit_code(std::slice::from_ref(&ok)), 0);
        assert_eq!(batch_exit_code(&[ok.clone(), err.clone()]), 1);
        assert_eq!(batch_exit_code(&[]), 0);
    }

    #[test]
    fn constants_table_fields() {
        let t = ConstantsTable::new(&MomentParams::new(3, 2, 1.0).unwrap());
        assert!(t.prob_affine_constant.is_some());
        assert!(t.busemann_intersection.is_none());
        assert!(t.identity_linear.is_none());
        let t = ConstantsTable::new(&MomentParams::new(2, 1, 0.0).unwrap());
        assert!((t.identity_affine_doubled.unwrap() - t.thm2_constant).abs() < 1e-12);
    }
}
