//! Quantitative evaluation reports.
//!
//! A report joins reference patches with measured (or mapped) values by
//! sample id, carries one row per matched patch, and derives a summary plus
//! workflow diagnostics. The diagnostic vocabulary names the recurring
//! profiling problems a print shop runs into; the trigger thresholds are
//! fixed here and echoed in the report metadata so readers can see them.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cgats::MeasurementSet;
use crate::color::{delta_e_ab, lab_to_lch, Cmyk, LabColor};
use crate::gamut::{chroma_shift, GamutBoundary};

#[derive(Debug, Error, PartialEq)]
pub enum ReportError {
    #[error("no measured ids match the reference; nothing to evaluate")]
    NoMatches,
}

/// One reference patch to evaluate against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRow {
    pub id: String,
    pub lab: LabColor,
}

/// One evaluated patch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub id: String,
    pub reference_lab: LabColor,
    pub measured_lab: LabColor,
    pub delta_e: f64,
    pub chroma_shift: f64,
    pub cmyk: Option<Cmyk>,
    pub tic: Option<f64>,
    /// Whether the reference color falls outside the evaluation boundary;
    /// absent when no boundary was supplied.
    pub out_of_gamut: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub patch_count: usize,
    pub mean_delta_e: f64,
    pub max_delta_e: f64,
    pub p95_delta_e: f64,
    /// Largest measured |a*| over rows whose reference is neutral.
    pub gray_balance_max_a: f64,
    /// Largest measured |b*| over rows whose reference is neutral.
    pub gray_balance_max_b: f64,
    pub percent_out_of_gamut: f64,
    pub max_tic: Option<f64>,
}

/// The recurring profiling problems reports can flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Diagnostic {
    DeviceCalibration,
    MisunderstoodProfilingSetup,
    ProfilingProcess,
    InappropriateTestTarget,
    InappropriateProfilingSoftware,
}

impl Diagnostic {
    pub fn label(&self) -> &'static str {
        match self {
            Diagnostic::DeviceCalibration => "Device calibration",
            Diagnostic::MisunderstoodProfilingSetup => "Misunderstood profiling set-up options",
            Diagnostic::ProfilingProcess => "Lack of understanding of the profiling process",
            Diagnostic::InappropriateTestTarget => "Inappropriate test target",
            Diagnostic::InappropriateProfilingSoftware => "Inappropriate profiling software",
        }
    }
}

/// Trigger thresholds, serialized into every report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Mean difference above this flags device calibration.
    pub calibration_mean_delta_e: f64,
    /// Any ink-coverage breach flags the profiling set-up.
    pub tic_breach_margin: f64,
    /// Gray-balance drift above this flags process understanding.
    pub gray_balance_cast: f64,
    /// Matched-reference coverage below this flags the test target.
    pub min_reference_coverage: f64,
    /// 95th percentile above this flags the profiling software.
    pub software_p95_delta_e: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            calibration_mean_delta_e: 6.0,
            tic_breach_margin: 1e-9,
            gray_balance_cast: 4.0,
            min_reference_coverage: 0.9,
            software_p95_delta_e: 15.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub per_patch: Vec<ReportRow>,
    pub summary: Summary,
    /// Labels of the triggered diagnostics.
    pub diagnostics: Vec<String>,
    pub warnings: Vec<String>,
    pub thresholds: Thresholds,
    /// A validated job specification embedded verbatim, when supplied.
    pub job_spec: Option<String>,
}

const NEUTRAL_REFERENCE_CHROMA: f64 = 1e-6;

fn summarize(rows: &[ReportRow]) -> Summary {
    let n = rows.len();
    let mean = rows.iter().map(|r| r.delta_e).sum::<f64>() / n.max(1) as f64;
    let max = rows.iter().map(|r| r.delta_e).fold(0.0, f64::max);
    let mut sorted: Vec<f64> = rows.iter().map(|r| r.delta_e).collect();
    sorted.sort_by(f64::total_cmp);
    let p95 = if n == 0 {
        0.0
    } else {
        sorted[((0.95 * n as f64).ceil() as usize).clamp(1, n) - 1]
    };
    let (mut gray_a, mut gray_b) = (0.0f64, 0.0f64);
    for r in rows {
        if lab_to_lch(r.reference_lab).c < NEUTRAL_REFERENCE_CHROMA {
            gray_a = gray_a.max(r.measured_lab.a.abs());
            gray_b = gray_b.max(r.measured_lab.b.abs());
        }
    }
    let flagged = rows.iter().filter(|r| r.out_of_gamut.is_some()).count();
    let out = rows.iter().filter(|r| r.out_of_gamut == Some(true)).count();
    let percent_out = if flagged == 0 { 0.0 } else { 100.0 * out as f64 / flagged as f64 };
    let max_tic = rows.iter().filter_map(|r| r.tic).fold(None, |acc: Option<f64>, t| {
        Some(acc.map_or(t, |a| a.max(t)))
    });
    Summary {
        patch_count: n,
        mean_delta_e: mean,
        max_delta_e: max,
        p95_delta_e: p95,
        gray_balance_max_a: gray_a,
        gray_balance_max_b: gray_b,
        percent_out_of_gamut: percent_out,
        max_tic,
    }
}

fn diagnose(
    summary: &Summary,
    rows: &[ReportRow],
    coverage: f64,
    tic_limit: Option<f64>,
    thresholds: &Thresholds,
) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if summary.mean_delta_e > thresholds.calibration_mean_delta_e {
        out.push(Diagnostic::DeviceCalibration);
    }
    if let Some(limit) = tic_limit {
        if rows.iter().filter_map(|r| r.tic).any(|t| t > limit + thresholds.tic_breach_margin) {
            out.push(Diagnostic::MisunderstoodProfilingSetup);
        }
    }
    if summary.gray_balance_max_a.max(summary.gray_balance_max_b) > thresholds.gray_balance_cast {
        out.push(Diagnostic::ProfilingProcess);
    }
    if coverage < thresholds.min_reference_coverage {
        out.push(Diagnostic::InappropriateTestTarget);
    }
    if summary.p95_delta_e > thresholds.software_p95_delta_e {
        out.push(Diagnostic::InappropriateProfilingSoftware);
    }
    out
}

impl EvalReport {
    /// Assembles a report from already-built rows (the test-form path).
    /// `coverage` is the matched fraction of the reference; `tic_limit`
    /// enables the ink-coverage breach check.
    pub fn from_rows(
        rows: Vec<ReportRow>,
        warnings: Vec<String>,
        coverage: f64,
        tic_limit: Option<f64>,
    ) -> Self {
        let thresholds = Thresholds::default();
        let summary = summarize(&rows);
        let diagnostics = diagnose(&summary, &rows, coverage, tic_limit, &thresholds)
            .iter()
            .map(|d| d.label().to_string())
            .collect();
        EvalReport { per_patch: rows, summary, diagnostics, warnings, thresholds, job_spec: None }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Fixed-width text table of the per-patch rows plus the summary.
    pub fn write_text_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<10} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>7} {:>6}\n",
            "SAMPLE_ID", "REF_L", "REF_A", "REF_B", "MEAS_L", "MEAS_A", "MEAS_B", "DE", "GAMUT"
        ));
        for r in &self.per_patch {
            let gamut = match r.out_of_gamut {
                Some(true) => "OUT",
                Some(false) => "in",
                None => "-",
            };
            out.push_str(&format!(
                "{:<10} {:>8.2} {:>8.2} {:>8.2} {:>8.2} {:>8.2} {:>8.2} {:>7.3} {:>6}\n",
                r.id,
                r.reference_lab.l,
                r.reference_lab.a,
                r.reference_lab.b,
                r.measured_lab.l,
                r.measured_lab.a,
                r.measured_lab.b,
                r.delta_e,
                gamut
            ));
        }
        out.push_str(&format!(
            "# patches {}  mean dE {:.4}  max dE {:.4}  p95 dE {:.4}\n",
            self.summary.patch_count,
            self.summary.mean_delta_e,
            self.summary.max_delta_e,
            self.summary.p95_delta_e
        ));
        for d in &self.diagnostics {
            out.push_str(&format!("# diagnostic: {d}\n"));
        }
        out
    }
}

/// Joins reference rows with measurements by id and builds the report.
/// Unmatched measured ids become warnings; unmatched reference ids lower
/// the coverage that feeds the test-target diagnostic.
pub fn build_report(
    reference: &[ReferenceRow],
    measured: &MeasurementSet,
    boundary: Option<&GamutBoundary>,
) -> Result<EvalReport, ReportError> {
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for row in reference {
        if let Some(m) = measured.find(&row.id) {
            let ref_lch = lab_to_lch(row.lab);
            rows.push(ReportRow {
                id: row.id.clone(),
                reference_lab: row.lab,
                measured_lab: m.lab,
                delta_e: delta_e_ab(row.lab, m.lab),
                chroma_shift: chroma_shift(ref_lch, lab_to_lch(m.lab)),
                cmyk: None,
                tic: None,
                out_of_gamut: boundary.map(|b| !b.in_gamut(ref_lch)),
            });
        }
    }
    if rows.is_empty() {
        return Err(ReportError::NoMatches);
    }
    for m in &measured.rows {
        if !reference.iter().any(|r| r.id == m.id) {
            warnings.push(format!("measured id '{}' not present in the reference", m.id));
        }
    }
    let coverage = rows.len() as f64 / reference.len().max(1) as f64;
    Ok(EvalReport::from_rows(rows, warnings, coverage, None))
}
