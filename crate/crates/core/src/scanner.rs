//! Scanner characterization: fit a polynomial correction from scanned RGB
//! to reference colorimetry, and score the result.
//!
//! The objective lives in XYZ so the problem stays linear least squares;
//! color difference is used only for scoring. Features are computed from
//! gamma-decoded linear RGB, since sensor response is closer to linear
//! light. Normal equations are accumulated in a canonical sample order, so
//! the fitted coefficients are bit-identical under input reordering.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cgats::MeasurementSet;
use crate::chart::parse_patch_id;
use crate::color::{
    delta_e_ab, lab_to_xyz, srgb_to_linear, xyz_to_lab, LabColor, Rgb8, RgbLinear, WhitePoint,
    XyzColor,
};

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("need at least {need} samples for this basis, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("feature matrix is rank deficient; sample colors are degenerate")]
    RankDeficient,
    #[error("sample id '{0}' does not match the chart id grammar")]
    BadPatchId(String),
    #[error("measurement row '{0}' carries no scanner RGB values")]
    MissingRgb(String),
    #[error("no samples to score")]
    Empty,
    #[error("model table line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// One training point: the device response for a patch of known colorimetry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScannerSample {
    pub patch_id: String,
    pub scanner_rgb: Rgb8,
    pub reference_lab: LabColor,
}

impl ScannerSample {
    /// Validates the id against the chart grammar (row letter + column).
    pub fn new(patch_id: &str, scanner_rgb: Rgb8, reference_lab: LabColor) -> Result<Self, FitError> {
        if parse_patch_id(patch_id).is_none() {
            return Err(FitError::BadPatchId(patch_id.to_string()));
        }
        Ok(ScannerSample { patch_id: patch_id.to_string(), scanner_rgb, reference_lab })
    }
}

/// Converts measurement rows (which must carry RGB) into fit samples.
pub fn samples_from_measurements(set: &MeasurementSet) -> Result<Vec<ScannerSample>, FitError> {
    set.rows
        .iter()
        .map(|row| {
            let rgb = row.rgb.ok_or_else(|| FitError::MissingRgb(row.id.clone()))?;
            ScannerSample::new(&row.id, rgb, row.lab)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    Linear,
    Quadratic,
}

impl Basis {
    pub fn terms(&self) -> &'static [&'static str] {
        match self {
            Basis::Linear => &["1", "r", "g", "b"],
            Basis::Quadratic => &["1", "r", "g", "b", "r2", "g2", "b2", "rg", "rb", "gb"],
        }
    }

    fn features(&self, lin: RgbLinear) -> Vec<f64> {
        let (r, g, b) = (lin.r, lin.g, lin.b);
        match self {
            Basis::Linear => vec![1.0, r, g, b],
            Basis::Quadratic => {
                vec![1.0, r, g, b, r * r, g * g, b * b, r * g, r * b, g * b]
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitStats {
    pub mean_delta_e: f64,
    pub max_delta_e: f64,
    pub samples: usize,
}

/// A fitted polynomial correction mapping device RGB to XYZ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScannerModel {
    pub basis: Basis,
    pub terms: Vec<String>,
    /// One (x, y, z) coefficient triple per term.
    pub coefficients: Vec<[f64; 3]>,
    pub stats: FitStats,
}

/// Solves `a * x = rhs` for the square system by LU with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut rhs: Vec<[f64; 3]>) -> Result<Vec<[f64; 3]>, FitError> {
    let n = a.len();
    let scale: f64 = a
        .iter()
        .flat_map(|row| row.iter().map(|v| v.abs()))
        .fold(0.0, f64::max)
        .max(1e-300);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot][col].abs() < 1e-12 * scale {
            return Err(FitError::RankDeficient);
        }
        a.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor == 0.0 {
                continue;
            }
            let (head, tail) = a.split_at_mut(row);
            for (dst, src) in tail[0][col..].iter_mut().zip(&head[col][col..]) {
                *dst -= factor * src;
            }
            let pivot_rhs = rhs[col];
            for (dst, src) in rhs[row].iter_mut().zip(pivot_rhs) {
                *dst -= factor * src;
            }
        }
    }
    let mut x = vec![[0.0; 3]; n];
    for row in (0..n).rev() {
        for k in 0..3 {
            let mut v = rhs[row][k];
            for col in row + 1..n {
                v -= a[row][col] * x[col][k];
            }
            x[row][k] = v / a[row][row];
        }
    }
    Ok(x)
}

/// Least-squares fit of the basis to the samples, minimizing squared XYZ
/// error. Requires at least twice as many samples as terms.
pub fn fit_scanner(samples: &[ScannerSample], basis: Basis) -> Result<ScannerModel, FitError> {
    let terms = basis.terms();
    let need = 2 * terms.len();
    if samples.len() < need {
        return Err(FitError::TooFewSamples { need, got: samples.len() });
    }

    // canonical accumulation order: makes the sums, and therefore the
    // solution, independent of the caller's sample order. Runs of equal
    // samples collapse to one weighted contribution, so uniform duplication
    // rescales the sums exactly and the solution is bit-identical.
    let key = |s: &ScannerSample| {
        (
            s.patch_id.clone(),
            s.scanner_rgb.r,
            s.scanner_rgb.g,
            s.scanner_rgb.b,
            s.reference_lab.l.to_bits(),
            s.reference_lab.a.to_bits(),
            s.reference_lab.b.to_bits(),
        )
    };
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&i, &j| key(&samples[i]).cmp(&key(&samples[j])));

    let t = terms.len();
    let mut gram = vec![vec![0.0f64; t]; t];
    let mut moment = vec![[0.0f64; 3]; t];
    let mut pos = 0;
    while pos < order.len() {
        let s = &samples[order[pos]];
        let mut run = 1;
        while pos + run < order.len() && key(&samples[order[pos + run]]) == key(s) {
            run += 1;
        }
        pos += run;
        let weight = run as f64;
        let f = basis.features(srgb_to_linear(s.scanner_rgb));
        let target = lab_to_xyz(s.reference_lab, &WhitePoint::D50);
        for i in 0..t {
            for j in 0..t {
                gram[i][j] += weight * (f[i] * f[j]);
            }
            moment[i][0] += weight * (f[i] * target.x);
            moment[i][1] += weight * (f[i] * target.y);
            moment[i][2] += weight * (f[i] * target.z);
        }
    }
    let coefficients = solve(gram, moment)?;

    let mut model = ScannerModel {
        basis,
        terms: terms.iter().map(|s| s.to_string()).collect(),
        coefficients,
        stats: FitStats { mean_delta_e: 0.0, max_delta_e: 0.0, samples: samples.len() },
    };
    let (mut sum, mut max) = (0.0f64, 0.0f64);
    for s in samples {
        let de = delta_e_ab(apply_model(&model, s.scanner_rgb), s.reference_lab);
        sum += de;
        max = max.max(de);
    }
    model.stats.mean_delta_e = sum / samples.len() as f64;
    model.stats.max_delta_e = max;
    Ok(model)
}

/// Runs device RGB through the fitted correction: features x coefficients
/// gives XYZ, converted to Lab.
pub fn apply_model(model: &ScannerModel, rgb: Rgb8) -> LabColor {
    let f = model.basis.features(srgb_to_linear(rgb));
    let mut xyz = [0.0f64; 3];
    for (fi, coef) in f.iter().zip(&model.coefficients) {
        xyz[0] += fi * coef[0];
        xyz[1] += fi * coef[1];
        xyz[2] += fi * coef[2];
    }
    xyz_to_lab(XyzColor::new(xyz[0], xyz[1], xyz[2]), &WhitePoint::D50)
}

/// Per-patch fit quality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub per_patch: Vec<(String, f64)>,
    pub mean_delta_e: f64,
    pub max_delta_e: f64,
    pub p95_delta_e: f64,
    /// Up to ten worst patches, largest difference first.
    pub worst: Vec<(String, f64)>,
}

impl FitReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Scores the model against samples: per-patch difference, mean, max, the
/// nearest-rank 95th percentile and the worst-ten list.
pub fn score_model(model: &ScannerModel, samples: &[ScannerSample]) -> Result<FitReport, FitError> {
    if samples.is_empty() {
        return Err(FitError::Empty);
    }
    let per_patch: Vec<(String, f64)> = samples
        .iter()
        .map(|s| {
            (s.patch_id.clone(), delta_e_ab(apply_model(model, s.scanner_rgb), s.reference_lab))
        })
        .collect();
    let n = per_patch.len();
    let mean = per_patch.iter().map(|(_, d)| d).sum::<f64>() / n as f64;
    let max = per_patch.iter().map(|(_, d)| *d).fold(0.0, f64::max);
    let mut sorted: Vec<f64> = per_patch.iter().map(|(_, d)| *d).collect();
    sorted.sort_by(f64::total_cmp);
    let rank = ((0.95 * n as f64).ceil() as usize).clamp(1, n);
    let p95 = sorted[rank - 1];
    let mut worst = per_patch.clone();
    worst.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    worst.truncate(10);
    Ok(FitReport { per_patch, mean_delta_e: mean, max_delta_e: max, p95_delta_e: p95, worst })
}

impl ScannerModel {
    /// Plain-text coefficient table: one line per term with its XYZ triple.
    pub fn write_table(&self) -> String {
        let mut out = String::from("SCANNER_MODEL\n");
        out.push_str(&format!(
            "BASIS {}\n",
            match self.basis {
                Basis::Linear => "Linear",
                Basis::Quadratic => "Quadratic",
            }
        ));
        out.push_str(&format!(
            "FIT_MEAN_DE {}\nFIT_MAX_DE {}\nFIT_SAMPLES {}\n",
            self.stats.mean_delta_e, self.stats.max_delta_e, self.stats.samples
        ));
        out.push_str("BEGIN_COEFFICIENTS\n");
        for (term, c) in self.terms.iter().zip(&self.coefficients) {
            out.push_str(&format!("{term} {} {} {}\n", c[0], c[1], c[2]));
        }
        out.push_str("END_COEFFICIENTS\n");
        out
    }

    pub fn parse_table(text: &str) -> Result<Self, FitError> {
        let err = |line: usize, message: &str| FitError::Parse {
            line,
            message: message.to_string(),
        };
        let mut basis = None;
        let mut stats = FitStats { mean_delta_e: 0.0, max_delta_e: 0.0, samples: 0 };
        let mut rows: Vec<(String, [f64; 3])> = Vec::new();
        let mut state = 0; // 0 = magic, 1 = header, 2 = coefficients, 3 = done
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match state {
                0 => {
                    if line != "SCANNER_MODEL" {
                        return Err(err(n + 1, "expected SCANNER_MODEL header"));
                    }
                    state = 1;
                }
                1 => {
                    if line == "BEGIN_COEFFICIENTS" {
                        state = 2;
                        continue;
                    }
                    let (key, val) = line
                        .split_once(char::is_whitespace)
                        .ok_or_else(|| err(n + 1, "bad header line"))?;
                    match key {
                        "BASIS" => {
                            basis = Some(match val.trim() {
                                "Linear" => Basis::Linear,
                                "Quadratic" => Basis::Quadratic,
                                other => return Err(err(n + 1, &format!("unknown basis '{other}'"))),
                            })
                        }
                        "FIT_MEAN_DE" => {
                            stats.mean_delta_e =
                                val.trim().parse().map_err(|_| err(n + 1, "bad number"))?
                        }
                        "FIT_MAX_DE" => {
                            stats.max_delta_e =
                                val.trim().parse().map_err(|_| err(n + 1, "bad number"))?
                        }
                        "FIT_SAMPLES" => {
                            stats.samples =
                                val.trim().parse().map_err(|_| err(n + 1, "bad number"))?
                        }
                        other => return Err(err(n + 1, &format!("unknown key '{other}'"))),
                    }
                }
                2 => {
                    if line == "END_COEFFICIENTS" {
                        state = 3;
                        continue;
                    }
                    let parts: Vec<&str> = line.split_whitespace().collect();
                    if parts.len() != 4 {
                        return Err(err(n + 1, "expected: term x y z"));
                    }
                    let mut triple = [0.0; 3];
                    for (slot, tok) in triple.iter_mut().zip(&parts[1..]) {
                        *slot = tok.parse().map_err(|_| err(n + 1, "non-numeric coefficient"))?;
                    }
                    rows.push((parts[0].to_string(), triple));
                }
                _ => return Err(err(n + 1, "content after END_COEFFICIENTS")),
            }
        }
        let basis = basis.ok_or_else(|| err(0, "missing BASIS"))?;
        if state != 3 {
            return Err(err(0, "missing END_COEFFICIENTS"));
        }
        let expected = basis.terms();
        if rows.len() != expected.len()
            || rows.iter().zip(expected).any(|((name, _), want)| name != want)
        {
            return Err(err(0, "coefficient terms do not match the basis"));
        }
        Ok(ScannerModel {
            basis,
            terms: expected.iter().map(|s| s.to_string()).collect(),
            coefficients: rows.into_iter().map(|(_, c)| c).collect(),
            stats,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::color::linear_to_xyz;

    const CODES: [u8; 6] = [0, 51, 102, 153, 204, 255];

    /// Samples from a device whose XYZ response is a known 3x3 matrix
    /// applied to linear RGB (optionally with a channel power distortion).
    fn synthetic_samples(matrix: [[f64; 3]; 3], gamma: f64) -> Vec<ScannerSample> {
        let mut out = Vec::new();
        let letters = ["A", "B", "C", "D", "E", "F"];
        for (i, &r) in CODES.iter().enumerate() {
            for (j, &g) in CODES.iter().enumerate() {
                for (k, &b) in CODES.iter().enumerate() {
                    let rgb = Rgb8::new(r, g, b);
                    let lin = srgb_to_linear(rgb);
                    let (lr, lg, lb) = (lin.r.powf(gamma), lin.g.powf(gamma), lin.b.powf(gamma));
                    let xyz = XyzColor::new(
                        matrix[0][0] * lr + matrix[0][1] * lg + matrix[0][2] * lb,
                        matrix[1][0] * lr + matrix[1][1] * lg + matrix[1][2] * lb,
                        matrix[2][0] * lr + matrix[2][1] * lg + matrix[2][2] * lb,
                    );
                    out.push(ScannerSample {
                        patch_id: format!("{}{}", letters[i], (j * 6 + k) % 22 + 1),
                        scanner_rgb: rgb,
                        reference_lab: xyz_to_lab(xyz, &WhitePoint::D50),
                    });
                }
            }
        }
        out
    }

    const DEVICE: [[f64; 3]; 3] = [
        [0.45, 0.32, 0.18],
        [0.22, 0.70, 0.08],
        [0.02, 0.12, 0.78],
    ];

    #[test]
    fn linear_basis_recovers_linear_device() {
        let samples = synthetic_samples(DEVICE, 1.0);
        let model = fit_scanner(&samples, Basis::Linear).unwrap();
        // intercept near zero, matrix columns recovered
        for (k, device_row) in DEVICE.iter().enumerate() {
            assert!(model.coefficients[0][k].abs() < 1e-10);
            for (t, want) in device_row.iter().enumerate() {
                assert!((model.coefficients[1 + t][k] - want).abs() < 1e-6);
            }
        }
        assert!(model.stats.mean_delta_e < 0.1);
    }

    #[test]
    fn exact_fit_reproduces_training_points() {
        let samples = synthetic_samples(DEVICE, 1.0);
        let model = fit_scanner(&samples, Basis::Linear).unwrap();
        for s in samples.iter().step_by(17) {
            let lab = apply_model(&model, s.scanner_rgb);
            assert!(delta_e_ab(lab, s.reference_lab) < 1e-6);
        }
    }

    #[test]
    fn duplication_leaves_model_unchanged() {
        let samples = synthetic_samples(DEVICE, 1.1);
        let mut doubled = samples.clone();
        doubled.extend(samples.iter().cloned());
        let a = fit_scanner(&samples, Basis::Quadratic).unwrap();
        let b = fit_scanner(&doubled, Basis::Quadratic).unwrap();
        assert_eq!(a.coefficients, b.coefficients);
    }

    #[test]
    fn fit_is_order_invariant() {
        let samples = synthetic_samples(DEVICE, 1.1);
        let mut reversed = samples.clone();
        reversed.reverse();
        let mut shuffled = samples.clone();
        shuffled.rotate_left(91);
        shuffled.swap(3, 77);
        let a = fit_scanner(&samples, Basis::Quadratic).unwrap();
        let b = fit_scanner(&reversed, Basis::Quadratic).unwrap();
        let c = fit_scanner(&shuffled, Basis::Quadratic).unwrap();
        assert_eq!(a.coefficients, b.coefficients);
        assert_eq!(a.coefficients, c.coefficients);
    }

    #[test]
    fn residuals_are_orthogonal_to_features() {
        let samples = synthetic_samples(DEVICE, 1.15);
        let model = fit_scanner(&samples, Basis::Quadratic).unwrap();
        let t = model.terms.len();
        let mut dot = vec![[0.0f64; 3]; t];
        let mut scale = 0.0f64;
        for s in &samples {
            let f = model.basis.features(srgb_to_linear(s.scanner_rgb));
            let target = lab_to_xyz(s.reference_lab, &WhitePoint::D50);
            let mut pred = [0.0f64; 3];
            for (fi, c) in f.iter().zip(&model.coefficients) {
                pred[0] += fi * c[0];
                pred[1] += fi * c[1];
                pred[2] += fi * c[2];
            }
            let resid = [target.x - pred[0], target.y - pred[1], target.z - pred[2]];
            for i in 0..t {
                for k in 0..3 {
                    dot[i][k] += f[i] * resid[k];
                    scale = scale.max((f[i] * resid[k]).abs());
                }
            }
        }
        for row in &dot {
            for v in row {
                assert!(v.abs() < 1e-6, "residual correlation {v} (scale {scale})");
            }
        }
    }

    #[test]
    fn quadratic_never_underperforms_linear() {
        for gamma in [1.0, 1.1, 1.3] {
            let samples = synthetic_samples(DEVICE, gamma);
            let sse = |basis| {
                let model = fit_scanner(&samples, basis).unwrap();
                samples
                    .iter()
                    .map(|s| {
                        let f = model.basis.features(srgb_to_linear(s.scanner_rgb));
                        let target = lab_to_xyz(s.reference_lab, &WhitePoint::D50);
                        let mut pred = [0.0f64; 3];
                        for (fi, c) in f.iter().zip(&model.coefficients) {
                            pred[0] += fi * c[0];
                            pred[1] += fi * c[1];
                            pred[2] += fi * c[2];
                        }
                        (target.x - pred[0]).powi(2)
                            + (target.y - pred[1]).powi(2)
                            + (target.z - pred[2]).powi(2)
                    })
                    .sum::<f64>()
            };
            assert!(sse(Basis::Quadratic) <= sse(Basis::Linear) + 1e-9);
        }
    }

    #[test]
    fn holdout_error_stays_near_training_error() {
        let all = synthetic_samples(DEVICE, 1.08);
        let train: Vec<ScannerSample> =
            all.iter().enumerate().filter(|(i, _)| i % 5 != 0).map(|(_, s)| s.clone()).collect();
        let held: Vec<ScannerSample> =
            all.iter().enumerate().filter(|(i, _)| i % 5 == 0).map(|(_, s)| s.clone()).collect();
        let model = fit_scanner(&train, Basis::Quadratic).unwrap();
        let train_mean = score_model(&model, &train).unwrap().mean_delta_e;
        let held_mean = score_model(&model, &held).unwrap().mean_delta_e;
        assert!(held_mean < 2.0 * train_mean, "holdout {held_mean} vs train {train_mean}");
    }

    #[test]
    fn gray_ramp_stays_monotone_through_the_model() {
        let samples = synthetic_samples(DEVICE, 1.08);
        for basis in [Basis::Linear, Basis::Quadratic] {
            let model = fit_scanner(&samples, basis).unwrap();
            let mut last = f64::NEG_INFINITY;
            for v in (0..=255).step_by(5) {
                let l = apply_model(&model, Rgb8::new(v, v, v)).l;
                assert!(l >= last - 1e-9, "L dipped at code {v} with {basis:?}");
                last = l;
            }
        }
    }

    #[test]
    fn identity_device_scores_clean() {
        // the device reproduces chart renderings exactly; reference values
        // are what a spectrophotometer would read off those renderings
        let boundary = crate::gamut::GamutBoundary::srgb_default();
        let chart = crate::chart::build_target(&boundary, crate::chart::ChartParams::default());
        let samples: Vec<ScannerSample> = chart
            .patches
            .iter()
            .map(|p| ScannerSample {
                patch_id: p.id(),
                scanner_rgb: p.reference_rgb,
                reference_lab: crate::color::rgb_to_lab(p.reference_rgb),
            })
            .collect();
        let model = fit_scanner(&samples, Basis::Quadratic).unwrap();
        assert!(model.stats.mean_delta_e < 0.5, "mean {}", model.stats.mean_delta_e);
    }

    #[test]
    fn too_few_and_degenerate_inputs_error() {
        let samples = synthetic_samples(DEVICE, 1.0);
        assert_eq!(
            fit_scanner(&samples[..10], Basis::Quadratic),
            Err(FitError::TooFewSamples { need: 20, got: 10 })
        );
        // every sample the same color: features are collinear
        let flat: Vec<ScannerSample> = (0..30)
            .map(|i| ScannerSample {
                patch_id: format!("A{}", i % 22 + 1),
                scanner_rgb: Rgb8::new(80, 80, 80),
                reference_lab: LabColor::new(40.0, 0.0, 0.0),
            })
            .collect();
        assert_eq!(fit_scanner(&flat, Basis::Linear), Err(FitError::RankDeficient));
    }

    #[test]
    fn sample_id_grammar_is_enforced() {
        assert!(ScannerSample::new("A1", Rgb8::new(0, 0, 0), LabColor::new(0.0, 0.0, 0.0)).is_ok());
        assert!(matches!(
            ScannerSample::new("patch-9", Rgb8::new(0, 0, 0), LabColor::new(0.0, 0.0, 0.0)),
            Err(FitError::BadPatchId(_))
        ));
    }

    #[test]
    fn score_report_is_consistent() {
        let samples = synthetic_samples(DEVICE, 1.2);
        let model = fit_scanner(&samples, Basis::Linear).unwrap();
        let report = score_model(&model, &samples).unwrap();
        let mean = report.per_patch.iter().map(|(_, d)| d).sum::<f64>() / report.per_patch.len() as f64;
        assert!((report.mean_delta_e - mean).abs() < 1e-12);
        // percentile against an independent sort
        let mut sorted: Vec<f64> = report.per_patch.iter().map(|(_, d)| *d).collect();
        sorted.sort_by(f64::total_cmp);
        let rank = ((0.95 * sorted.len() as f64).ceil() as usize).max(1);
        assert_eq!(report.p95_delta_e, sorted[rank - 1]);
        assert_eq!(report.worst.len(), 10);
        assert!(report.worst[0].1 >= report.worst[9].1);
        assert_eq!(report.worst[0].1, report.max_delta_e);
    }

    #[test]
    fn perfect_model_scores_zero() {
        let samples = synthetic_samples(DEVICE, 1.0);
        let model = fit_scanner(&samples, Basis::Linear).unwrap();
        let report = score_model(&model, &samples).unwrap();
        assert!(report.max_delta_e < 1e-9);
    }

    #[test]
    fn model_table_round_trip() {
        let samples = synthetic_samples(DEVICE, 1.1);
        let model = fit_scanner(&samples, Basis::Quadratic).unwrap();
        let text = model.write_table();
        let back = ScannerModel::parse_table(&text).unwrap();
        assert_eq!(model, back);
        assert!(ScannerModel::parse_table("garbage").is_err());
    }

    #[test]
    fn features_are_linear_light() {
        // sanity: a doubling of linear light doubles the linear features
        let f = Basis::Linear.features(RgbLinear::new(0.25, 0.5, 0.125));
        assert_eq!(f, vec![1.0, 0.25, 0.5, 0.125]);
        let _ = linear_to_xyz(RgbLinear::new(0.0, 0.0, 0.0));
    }
}
