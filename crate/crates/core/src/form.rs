//! The digital test form: a fixed set of evaluation elements composed in
//! RGB, pushed through intent mapping and separation, and rendered twice
//! for side-by-side inspection.
//!
//! Each element probes one thing an output profile can get wrong: gray
//! balance in both color modes, gamut warnings, intent behavior, chroma
//! shift, skin tones, ink coverage and the per-ink tone scales. The
//! lightness-circle row supports reading changes in two directions: across
//! hues within a circle, and across lightness levels between circles.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cgats::MeasurementSet;
use crate::color::{
    delta_e_ab, lab_to_lch, lab_to_rgb, lch_to_lab, rgb_to_lab, LabColor, LchColor, Rgb8,
};
use crate::gamut::{chroma_shift, GamutBoundary, IntentKind, IntentMapping};
use crate::raster::Raster;
use crate::report::ReportRow;
use crate::separation::{separate, SeparationParams};

#[derive(Debug, Error, PartialEq)]
pub enum FormError {
    #[error("the form has no {0:?} element")]
    MissingElement(ElementKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ElementKind {
    RgbGrayRamp,
    CmykGrayBalance,
    LightnessCircles,
    GamutWarningChart,
    IntentComparisonStrip,
    ChromaShiftPatches,
    SkinTones,
    TicPatches,
    InkToneScales,
}

/// The evaluation topics the form covers, each served by one element kind.
pub const COVERED_TOPICS: &[(&str, ElementKind)] = &[
    ("different color gamuts", ElementKind::GamutWarningChart),
    ("rgb gray balance", ElementKind::RgbGrayRamp),
    ("rendering intents", ElementKind::IntentComparisonStrip),
    ("gamut warning", ElementKind::GamutWarningChart),
    ("separation", ElementKind::InkToneScales),
    ("cmyk gray balance", ElementKind::CmykGrayBalance),
    ("chroma shift", ElementKind::ChromaShiftPatches),
    ("gamut mapping", ElementKind::LightnessCircles),
    ("skin tones", ElementKind::SkinTones),
    ("total ink coverage", ElementKind::TicPatches),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl Rect {
    pub fn intersects(&self, other: &Rect) -> bool {
        self.x < other.x + other.w
            && other.x < self.x + self.w
            && self.y < other.y + other.h
            && other.y < self.y + self.h
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormPatch {
    pub id: String,
    pub rgb: Rgb8,
    pub lab: LabColor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormElement {
    pub kind: ElementKind,
    pub patches: Vec<FormPatch>,
    pub layout: Rect,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestForm {
    pub elements: Vec<FormElement>,
    pub width: usize,
    pub height: usize,
    pub separation: SeparationParams,
    pub boundary: GamutBoundary,
    pub intent: IntentKind,
}

pub const LIGHTNESS_LEVELS: [f64; 5] = [20.0, 35.0, 50.0, 65.0, 80.0];
const RING_CHROMA_FRACTION: f64 = 0.6;

const SKIN_TONES: [(f64, f64, f64); 8] = [
    (72.0, 13.0, 17.0),
    (66.0, 15.0, 19.0),
    (60.0, 17.0, 21.0),
    (54.0, 19.0, 22.0),
    (48.0, 18.0, 21.0),
    (42.0, 17.0, 19.0),
    (36.0, 15.0, 17.0),
    (30.0, 13.0, 15.0),
];

const TIC_PROBES: [(u8, u8, u8); 6] = [
    (10, 10, 10),
    (20, 20, 20),
    (30, 30, 30),
    (35, 25, 18),
    (50, 38, 28),
    (15, 12, 10),
];

const MARGIN: usize = 16;
const CELL: usize = 24;
const GAP: usize = 12;
const CIRCLE_CELL: usize = 120;

fn patch_from_lch(id: String, lch: LchColor) -> FormPatch {
    let lab = lch_to_lab(lch);
    FormPatch { id, rgb: lab_to_rgb(lab), lab }
}

fn patch_from_rgb(id: String, rgb: Rgb8) -> FormPatch {
    FormPatch { id, rgb, lab: rgb_to_lab(rgb) }
}

/// Composes the form: one element per covered topic kind, laid out in
/// non-overlapping rows with the lightness circles spanning the top.
pub fn build_form(
    separation: SeparationParams,
    boundary: GamutBoundary,
    intent: IntentKind,
) -> TestForm {
    let mut elements = Vec::new();
    let width = 2 * MARGIN + 5 * CIRCLE_CELL;
    let mut y = MARGIN;

    // lightness circles: five levels, each ringed by twelve hues at 60%
    // of the boundary's chroma, with a neutral center
    let mut circles = Vec::new();
    for (ci, &l) in LIGHTNESS_LEVELS.iter().enumerate() {
        circles.push(patch_from_lch(format!("LC{ci}-C"), LchColor::new(l, 0.0, 0.0)));
        for hi in 0..12 {
            let h = hi as f64 * 30.0;
            let c = RING_CHROMA_FRACTION * boundary.max_chroma(l, h);
            circles.push(patch_from_lch(format!("LC{ci}-H{:03}", hi * 30), LchColor::new(l, c, h)));
        }
    }
    elements.push(FormElement {
        kind: ElementKind::LightnessCircles,
        patches: circles,
        layout: Rect { x: MARGIN, y, w: 5 * CIRCLE_CELL, h: CIRCLE_CELL },
    });
    y += CIRCLE_CELL + GAP;

    // sixteen neutral code steps from 0 to 255
    let gray: Vec<FormPatch> = (0..16)
        .map(|i| {
            let v = ((i * 255 + 8) / 15).min(255) as u8;
            patch_from_rgb(format!("GRAY{i:02}"), Rgb8::new(v, v, v))
        })
        .collect();
    elements.push(FormElement {
        kind: ElementKind::RgbGrayRamp,
        patches: gray,
        layout: Rect { x: MARGIN, y, w: 16 * CELL, h: CELL },
    });
    y += CELL + GAP;

    let cmyk_gray: Vec<FormPatch> = (0..12)
        .map(|i| {
            let v = (255 - i * 255 / 11) as u8;
            patch_from_rgb(format!("CGB{i:02}"), Rgb8::new(v, v, v))
        })
        .collect();
    elements.push(FormElement {
        kind: ElementKind::CmykGrayBalance,
        patches: cmyk_gray,
        layout: Rect { x: MARGIN, y, w: 12 * CELL, h: CELL },
    });
    y += CELL + GAP;

    // probes straddling the boundary: one inside and one outside per hue
    let mut warning = Vec::new();
    for hi in 0..12 {
        let h = hi as f64 * 30.0;
        let cm = boundary.max_chroma(50.0, h);
        warning.push(patch_from_lch(format!("GW{:03}-IN", hi * 30), LchColor::new(50.0, 0.8 * cm, h)));
        warning.push(patch_from_lch(
            format!("GW{:03}-OUT", hi * 30),
            LchColor::new(50.0, 1.2 * cm, h),
        ));
    }
    elements.push(FormElement {
        kind: ElementKind::GamutWarningChart,
        patches: warning,
        layout: Rect { x: MARGIN, y, w: 12 * CELL, h: 2 * CELL },
    });
    y += 2 * CELL + GAP;

    let strip: Vec<FormPatch> = (0..12)
        .map(|hi| {
            let h = hi as f64 * 30.0;
            patch_from_lch(
                format!("IC{:03}", hi * 30),
                LchColor::new(50.0, 0.9 * boundary.max_chroma(50.0, h), h),
            )
        })
        .collect();
    elements.push(FormElement {
        kind: ElementKind::IntentComparisonStrip,
        patches: strip,
        layout: Rect { x: MARGIN, y, w: 12 * CELL, h: CELL },
    });
    y += CELL + GAP;

    // deliberately out-of-gamut colors, so the shift column has signal
    let shift: Vec<FormPatch> = (0..8)
        .map(|i| {
            let h = i as f64 * 45.0;
            let l = 35.0 + 5.0 * i as f64;
            patch_from_lch(
                format!("CS{i}"),
                LchColor::new(l, 1.3 * boundary.max_chroma(l, h), h),
            )
        })
        .collect();
    elements.push(FormElement {
        kind: ElementKind::ChromaShiftPatches,
        patches: shift,
        layout: Rect { x: MARGIN, y, w: 8 * CELL, h: CELL },
    });
    y += CELL + GAP;

    let skins: Vec<FormPatch> = SKIN_TONES
        .iter()
        .enumerate()
        .map(|(i, &(l, a, b))| {
            let lab = LabColor::new(l, a, b);
            FormPatch { id: format!("SKIN{i}"), rgb: lab_to_rgb(lab), lab }
        })
        .collect();
    elements.push(FormElement {
        kind: ElementKind::SkinTones,
        patches: skins,
        layout: Rect { x: MARGIN, y, w: 8 * CELL, h: CELL },
    });
    y += CELL + GAP;

    let tic: Vec<FormPatch> = TIC_PROBES
        .iter()
        .enumerate()
        .map(|(i, &(r, g, b))| patch_from_rgb(format!("TIC{i}"), Rgb8::new(r, g, b)))
        .collect();
    elements.push(FormElement {
        kind: ElementKind::TicPatches,
        patches: tic,
        layout: Rect { x: MARGIN, y, w: 6 * CELL, h: CELL },
    });
    y += CELL + GAP;

    // twelve-step ramps for each ink, expressed as RGB complements
    let mut inks = Vec::new();
    for (ink, name) in ["C", "M", "Y", "K"].iter().enumerate() {
        for step in 0..12 {
            let f = (step + 1) as f64 / 12.0;
            let lin = 1.0 - f;
            let rgb = match ink {
                0 => linear_from_encoded(lin, 1.0, 1.0),
                1 => linear_from_encoded(1.0, lin, 1.0),
                2 => linear_from_encoded(1.0, 1.0, lin),
                _ => linear_from_encoded(lin, lin, lin),
            };
            inks.push(patch_from_rgb(format!("INK-{name}-{step:02}"), rgb));
        }
    }
    elements.push(FormElement {
        kind: ElementKind::InkToneScales,
        patches: inks,
        layout: Rect { x: MARGIN, y, w: 12 * CELL, h: 4 * CELL },
    });
    y += 4 * CELL;

    TestForm { elements, width, height: y + MARGIN, separation, boundary, intent }
}

// ink fractions live on the gamma-encoded axis, like the separation's
// complements
fn linear_from_encoded(r: f64, g: f64, b: f64) -> Rgb8 {
    Rgb8::new(
        (r * 255.0).round() as u8,
        (g * 255.0).round() as u8,
        (b * 255.0).round() as u8,
    )
}

/// Soft proof of a separation: the inverse of the naive complements with
/// black folded in. A screen-side approximation, not a press simulation.
pub fn proof_rgb(cmyk: crate::color::Cmyk) -> Rgb8 {
    let enc = |ink: f64| 1.0 - (ink + cmyk.k).min(1.0);
    linear_from_encoded(enc(cmyk.c), enc(cmyk.m), enc(cmyk.y))
}

/// The two renderings, the combined proofing canvas and the per-patch
/// table.
#[derive(Debug, Clone, PartialEq)]
pub struct FormRender {
    pub reference: Raster,
    pub converted: Raster,
    /// Left half reference, right half converted, with the lightness
    /// circles drawn once across the top of both halves. Each circle
    /// swatch shows the reference color around a converted inset, so the
    /// circles read in two directions: hues around a circle, lightness
    /// across the row.
    pub pair: Raster,
    pub table: Vec<ReportRow>,
}

fn mapped_pipeline(
    form: &TestForm,
    mapping: &IntentMapping<'_>,
    patch: &FormPatch,
) -> (LabColor, crate::separation::SeparationResult, Rgb8) {
    let ref_lch = lab_to_lch(patch.lab);
    let mapped_lch = mapping.map(ref_lch);
    let mapped_lab = lch_to_lab(mapped_lch);
    let sep = separate(lab_to_rgb(mapped_lab), &form.separation);
    (mapped_lab, sep, proof_rgb(sep.cmyk))
}

/// Runs every patch through intent mapping, separation and soft proof.
/// Raster A shows the reference colors, raster B the proofed conversion,
/// and the table carries the numbers behind both.
pub fn render_comparison(form: &TestForm) -> FormRender {
    let refs: Vec<LchColor> = form
        .elements
        .iter()
        .flat_map(|e| e.patches.iter().map(|p| lab_to_lch(p.lab)))
        .collect();
    let mapping = IntentMapping::new(&form.boundary, form.intent, &refs);

    let mut table = Vec::new();
    let mut reference =
        Raster::new(form.width, form.height, Rgb8::new(255, 255, 255)).expect("nonzero dims");
    let mut converted = reference.clone();
    let mut element_proofs = Vec::with_capacity(form.elements.len());

    for element in &form.elements {
        let mut proofs = Vec::with_capacity(element.patches.len());
        for patch in &element.patches {
            let ref_lch = lab_to_lch(patch.lab);
            let (mapped_lab, sep, proof) = mapped_pipeline(form, &mapping, patch);
            table.push(ReportRow {
                id: patch.id.clone(),
                reference_lab: patch.lab,
                measured_lab: mapped_lab,
                delta_e: delta_e_ab(patch.lab, mapped_lab),
                chroma_shift: chroma_shift(ref_lch, lab_to_lch(mapped_lab)),
                cmyk: Some(sep.cmyk),
                tic: Some(sep.tic),
                out_of_gamut: Some(!form.boundary.in_gamut(ref_lch)),
            });
            proofs.push(proof);
        }
        draw_element(&mut reference, element, |i| element.patches[i].rgb);
        draw_element(&mut converted, element, |i| proofs[i]);
        element_proofs.push(proofs);
    }
    let pair = render_pair(form, &reference, &converted, &element_proofs);
    FormRender { reference, converted, pair, table }
}

/// The combined proofing canvas: circles once across the top, then the
/// remaining rows of the reference render on the left and the converted
/// render on the right.
fn render_pair(
    form: &TestForm,
    reference: &Raster,
    converted: &Raster,
    element_proofs: &[Vec<Rgb8>],
) -> Raster {
    let w = form.width;
    let mut pair =
        Raster::new(2 * w, form.height, Rgb8::new(255, 255, 255)).expect("nonzero dims");
    let circles_idx = form
        .elements
        .iter()
        .position(|e| e.kind == ElementKind::LightnessCircles);
    let band_end = match circles_idx {
        Some(i) => {
            let e = &form.elements[i];
            // one circles row centered over both halves, converted inset
            // inside each reference swatch
            let centered = Rect { x: (2 * w - e.layout.w) / 2, ..e.layout };
            draw_circles_pair(&mut pair, &centered, &e.patches, &element_proofs[i]);
            e.layout.y + e.layout.h + GAP / 2
        }
        None => 0,
    };
    blit_rows(&mut pair, reference, band_end, 0);
    blit_rows(&mut pair, converted, band_end, w);
    pair
}

fn blit_rows(dst: &mut Raster, src: &Raster, from_y: usize, dst_x: usize) {
    for y in from_y..src.height() {
        for x in 0..src.width() {
            dst.set(dst_x + x, y, src.get(x, y));
        }
    }
}

fn draw_circles_pair(raster: &mut Raster, rect: &Rect, patches: &[FormPatch], proofs: &[Rgb8]) {
    for ci in 0..5 {
        let base = ci * 13;
        let cx = (rect.x + ci * CIRCLE_CELL + CIRCLE_CELL / 2) as i64;
        let cy = (rect.y + CIRCLE_CELL / 2) as i64;
        raster.fill_circle(cx, cy, 18, patches[base].rgb);
        raster.fill_circle(cx, cy, 9, proofs[base]);
        for hi in 0..12 {
            let angle = (hi as f64 * 30.0).to_radians();
            let px = cx + (40.0 * angle.cos()).round() as i64 - 7;
            let py = cy - (40.0 * angle.sin()).round() as i64 - 7;
            let (x, y) = (px.max(0) as usize, py.max(0) as usize);
            raster.fill_rect(x, y, 14, 14, patches[base + 1 + hi].rgb);
            raster.fill_rect(x + 4, y + 4, 6, 6, proofs[base + 1 + hi]);
        }
    }
}

fn draw_element(raster: &mut Raster, element: &FormElement, color: impl Fn(usize) -> Rgb8) {
    let rect = element.layout;
    match element.kind {
        ElementKind::LightnessCircles => {
            // five circles: neutral center disc, ring of twelve hue swatches
            for ci in 0..5 {
                let base = ci * 13;
                let cx = (rect.x + ci * CIRCLE_CELL + CIRCLE_CELL / 2) as i64;
                let cy = (rect.y + CIRCLE_CELL / 2) as i64;
                raster.fill_circle(cx, cy, 18, color(base));
                for hi in 0..12 {
                    let angle = (hi as f64 * 30.0).to_radians();
                    let px = cx + (40.0 * angle.cos()).round() as i64 - 7;
                    let py = cy - (40.0 * angle.sin()).round() as i64 - 7;
                    raster.fill_rect(px.max(0) as usize, py.max(0) as usize, 14, 14, color(base + 1 + hi));
                }
            }
        }
        _ => {
            let per_row = rect.w / CELL;
            for (i, _) in element.patches.iter().enumerate() {
                let x = rect.x + (i % per_row) * CELL;
                let y = rect.y + (i / per_row) * CELL;
                raster.fill_rect(x + 1, y + 1, CELL - 2, CELL - 2, color(i));
            }
        }
    }
}

/// Per-step gray balance: the a*/b* the separation round trip predicts for
/// each neutral step, plus measured deviations when a measurement set is
/// supplied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrayBalanceStep {
    pub id: String,
    pub predicted_a: f64,
    pub predicted_b: f64,
    pub measured_a: Option<f64>,
    pub measured_b: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrayBalanceReport {
    pub steps: Vec<GrayBalanceStep>,
    pub predicted_max_a: f64,
    pub predicted_max_b: f64,
    pub measured_max_a: Option<f64>,
    pub measured_max_b: Option<f64>,
}

pub fn gray_balance_report(
    form: &TestForm,
    measured: Option<&MeasurementSet>,
) -> Result<GrayBalanceReport, FormError> {
    let mut steps = Vec::new();
    for kind in [ElementKind::RgbGrayRamp, ElementKind::CmykGrayBalance] {
        let element = form
            .elements
            .iter()
            .find(|e| e.kind == kind)
            .ok_or(FormError::MissingElement(kind))?;
        for patch in &element.patches {
            let sep = separate(patch.rgb, &form.separation);
            let lab = rgb_to_lab(proof_rgb(sep.cmyk));
            let m = measured.and_then(|set| set.find(&patch.id));
            steps.push(GrayBalanceStep {
                id: patch.id.clone(),
                predicted_a: lab.a,
                predicted_b: lab.b,
                measured_a: m.map(|r| r.lab.a),
                measured_b: m.map(|r| r.lab.b),
            });
        }
    }
    let fold = |f: fn(&GrayBalanceStep) -> f64| steps.iter().map(f).fold(0.0, f64::max);
    let measured_fold = |f: fn(&GrayBalanceStep) -> Option<f64>| {
        let vals: Vec<f64> = steps.iter().filter_map(f).collect();
        if vals.is_empty() {
            None
        } else {
            Some(vals.iter().fold(0.0f64, |a, v| a.max(v.abs())))
        }
    };
    Ok(GrayBalanceReport {
        predicted_max_a: fold(|s| s.predicted_a.abs()),
        predicted_max_b: fold(|s| s.predicted_b.abs()),
        measured_max_a: measured_fold(|s| s.measured_a),
        measured_max_b: measured_fold(|s| s.measured_b),
        steps,
    })
}

impl GrayBalanceReport {
    pub fn write_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<10} {:>10} {:>10} {:>10} {:>10}\n",
            "STEP", "PRED_A", "PRED_B", "MEAS_A", "MEAS_B"
        ));
        for s in &self.steps {
            let fmt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.3}"));
            out.push_str(&format!(
                "{:<10} {:>10.3} {:>10.3} {:>10} {:>10}\n",
                s.id,
                s.predicted_a,
                s.predicted_b,
                fmt(s.measured_a),
                fmt(s.measured_b)
            ));
        }
        out.push_str(&format!(
            "# predicted max |a*| {:.4}  max |b*| {:.4}\n",
            self.predicted_max_a, self.predicted_max_b
        ));
        if let (Some(a), Some(b)) = (self.measured_max_a, self.measured_max_b) {
            out.push_str(&format!("# measured max |a*| {a:.4}  max |b*| {b:.4}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cgats::MeasurementRow;
    use crate::color::Cmyk;

    fn form() -> TestForm {
        build_form(
            SeparationParams::default(),
            GamutBoundary::srgb_default(),
            IntentKind::RelativeColorimetric,
        )
    }

    #[test]
    fn every_topic_is_served_and_every_kind_appears_once() {
        let f = form();
        for (topic, kind) in COVERED_TOPICS {
            let count = f.elements.iter().filter(|e| e.kind == *kind).count();
            assert_eq!(count, 1, "topic '{topic}' has {count} elements of kind {kind:?}");
        }
        let mut kinds: Vec<ElementKind> = f.elements.iter().map(|e| e.kind).collect();
        kinds.sort_by_key(|k| format!("{k:?}"));
        kinds.dedup();
        assert_eq!(kinds.len(), f.elements.len(), "duplicate element kinds");
    }

    #[test]
    fn five_lightness_circles_with_rings() {
        let f = form();
        let circles = f
            .elements
            .iter()
            .find(|e| e.kind == ElementKind::LightnessCircles)
            .unwrap();
        assert_eq!(circles.patches.len(), 5 * 13);
        let centers: Vec<&FormPatch> =
            circles.patches.iter().filter(|p| p.id.ends_with("-C")).collect();
        assert_eq!(centers.len(), 5);
        for (center, l) in centers.iter().zip(LIGHTNESS_LEVELS) {
            assert!((center.lab.l - l).abs() < 1e-9);
        }
    }

    #[test]
    fn gray_ramp_is_sixteen_neutral_steps() {
        let f = form();
        let ramp = f.elements.iter().find(|e| e.kind == ElementKind::RgbGrayRamp).unwrap();
        assert_eq!(ramp.patches.len(), 16);
        for p in &ramp.patches {
            assert!(p.rgb.is_neutral(), "{} is not neutral", p.id);
        }
        assert_eq!(ramp.patches[0].rgb.r, 0);
        assert_eq!(ramp.patches[15].rgb.r, 255);
    }

    #[test]
    fn layout_rects_do_not_overlap_and_fit() {
        let f = form();
        for (i, a) in f.elements.iter().enumerate() {
            assert!(a.layout.x + a.layout.w <= f.width, "{:?} exceeds width", a.kind);
            assert!(a.layout.y + a.layout.h <= f.height, "{:?} exceeds height", a.kind);
            for b in &f.elements[i + 1..] {
                assert!(!a.layout.intersects(&b.layout), "{:?} overlaps {:?}", a.kind, b.kind);
            }
        }
    }

    #[test]
    fn ids_are_unique_across_the_form() {
        let f = form();
        let mut seen = std::collections::HashSet::new();
        for e in &f.elements {
            for p in &e.patches {
                assert!(seen.insert(p.id.clone()), "duplicate id {}", p.id);
            }
        }
    }

    #[test]
    fn table_is_internally_consistent() {
        let f = form();
        let render = render_comparison(&f);
        assert_eq!(
            render.table.len(),
            f.elements.iter().map(|e| e.patches.len()).sum::<usize>()
        );
        for row in &render.table {
            assert!((row.delta_e - delta_e_ab(row.reference_lab, row.measured_lab)).abs() < 1e-9);
            let shift = lab_to_lch(row.measured_lab).c - lab_to_lch(row.reference_lab).c;
            assert!((row.chroma_shift - shift).abs() < 1e-9);
            assert!(row.tic.unwrap() <= f.separation.tic_limit + 1e-9);
        }
    }

    #[test]
    fn warning_flags_agree_with_the_boundary() {
        let f = form();
        let render = render_comparison(&f);
        for row in &render.table {
            let expected = !f.boundary.in_gamut(lab_to_lch(row.reference_lab));
            assert_eq!(row.out_of_gamut, Some(expected), "{}", row.id);
        }
        // the warning chart must contain both flagged and unflagged probes
        let outs = render
            .table
            .iter()
            .filter(|r| r.id.starts_with("GW") && r.id.ends_with("-OUT"))
            .all(|r| r.out_of_gamut == Some(true));
        let ins = render
            .table
            .iter()
            .filter(|r| r.id.starts_with("GW") && r.id.ends_with("-IN"))
            .all(|r| r.out_of_gamut == Some(false));
        assert!(outs && ins);
    }

    #[test]
    fn in_gamut_neutrals_survive_relative_colorimetric_unmapped() {
        let f = form();
        let render = render_comparison(&f);
        for row in render.table.iter().filter(|r| r.id.starts_with("GRAY")) {
            assert!(row.delta_e < 1e-9, "{} moved under clip by {}", row.id, row.delta_e);
        }
    }

    #[test]
    fn cmyk_gray_rows_separate_with_equal_inks() {
        let f = form();
        let element = f
            .elements
            .iter()
            .find(|e| e.kind == ElementKind::CmykGrayBalance)
            .unwrap();
        for p in &element.patches {
            let sep = separate(p.rgb, &f.separation);
            assert_eq!(sep.cmyk.c, sep.cmyk.m);
            assert_eq!(sep.cmyk.m, sep.cmyk.y);
        }
    }

    #[test]
    fn rendering_is_deterministic() {
        let f = form();
        let a = render_comparison(&f);
        let b = render_comparison(&f);
        assert_eq!(a.reference.to_ppm_bytes(), b.reference.to_ppm_bytes());
        assert_eq!(a.converted.to_ppm_bytes(), b.converted.to_ppm_bytes());
        assert_eq!(a.pair.to_ppm_bytes(), b.pair.to_ppm_bytes());
        assert_eq!(a.pair.width(), 2 * a.reference.width());
        assert_eq!(a.pair.height(), a.reference.height());
    }

    #[test]
    fn pure_black_proof_is_neutral() {
        let lab = rgb_to_lab(proof_rgb(Cmyk::new(0.0, 0.0, 0.0, 0.7)));
        assert!(lab.a.abs() < 1e-6 && lab.b.abs() < 1e-6);
    }

    #[test]
    fn gray_balance_prediction_and_measurement() {
        let f = form();
        let report = gray_balance_report(&f, None).unwrap();
        assert_eq!(report.steps.len(), 16 + 12);
        // proof of an equal-ink separation stays neutral
        for s in &report.steps {
            assert!(s.predicted_a.abs() < 1e-6 && s.predicted_b.abs() < 1e-6);
            assert!(s.measured_a.is_none());
        }
        let max_a = report.steps.iter().map(|s| s.predicted_a.abs()).fold(0.0, f64::max);
        assert_eq!(report.predicted_max_a, max_a);

        // all-neutral measurements give zero deviation
        let measured = MeasurementSet {
            header: vec![],
            extra_fields: vec![],
            rows: report
                .steps
                .iter()
                .map(|s| MeasurementRow {
                    id: s.id.clone(),
                    lab: LabColor::new(50.0, 0.0, 0.0),
                    rgb: None,
                })
                .collect(),
        };
        let with = gray_balance_report(&f, Some(&measured)).unwrap();
        assert_eq!(with.measured_max_a, Some(0.0));
        assert_eq!(with.measured_max_b, Some(0.0));
        assert!(with.write_text().contains("GRAY00"));
    }

    #[test]
    fn missing_gray_elements_error() {
        let mut f = form();
        f.elements.retain(|e| e.kind != ElementKind::RgbGrayRamp);
        assert_eq!(
            gray_balance_report(&f, None),
            Err(FormError::MissingElement(ElementKind::RgbGrayRamp))
        );
    }

    #[test]
    fn ink_scales_cover_all_four_inks() {
        let f = form();
        let inks = f.elements.iter().find(|e| e.kind == ElementKind::InkToneScales).unwrap();
        assert_eq!(inks.patches.len(), 48);
        for name in ["C", "M", "Y", "K"] {
            assert_eq!(
                inks.patches.iter().filter(|p| p.id.contains(&format!("-{name}-"))).count(),
                12
            );
        }
        // the cyan ramp darkens only the red channel
        for p in inks.patches.iter().filter(|p| p.id.starts_with("INK-C-")) {
            assert_eq!(p.rgb.g, 255);
            assert_eq!(p.rgb.b, 255);
        }
    }

    #[test]
    fn perceptual_form_still_renders() {
        let f = build_form(
            SeparationParams::default(),
            GamutBoundary::srgb_default(),
            IntentKind::Perceptual,
        );
        let render = render_comparison(&f);
        // chroma-shift probes sit outside the boundary, so the global scale
        // must engage and reduce chroma everywhere
        let scaled = render
            .table
            .iter()
            .find(|r| r.id.starts_with("IC"))
            .map(|r| r.chroma_shift)
            .unwrap();
        assert!(scaled < 0.0);
    }

}
