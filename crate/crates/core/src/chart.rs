//! Scanner-target construction: a 22-column x 12-row grid of 264 patches.
//!
//! Columns 1-12 hold the standardized LCh patches (one hue per column, rows
//! grouped as three luminance levels of four chroma steps each), columns
//! 13-19 the seven tone scales, and columns 20-22 the vendor patches
//! (neutral ramp, skin tones, high-chroma accents). Every patch carries its
//! LCh definition plus Lab and sRGB renderings.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::color::{
    lab_to_lch, lab_to_rgb, lab_to_xyz, lch_to_lab, rgb_to_lab, xyz_to_linear_unclamped, LabColor,
    LchColor, Rgb8, WhitePoint,
};
use crate::gamut::GamutBoundary;
use crate::raster::Raster;

pub const COLUMNS: usize = 22;
pub const ROWS: usize = 12;
pub const PATCH_COUNT: usize = COLUMNS * ROWS;
pub const STANDARD_COUNT: usize = 144;
pub const TONE_SCALE_COUNT: usize = 84;
pub const VENDOR_COUNT: usize = 36;

const ROW_LETTERS: [char; ROWS] = ['A', 'B', 'C', 'D', 'E', 'F', 'G', 'H', 'I', 'J', 'K', 'L'];

#[derive(Debug, Error, PartialEq)]
pub enum ChartError {
    #[error("{what} index {got} out of range (max {max})")]
    IndexOutOfRange { what: &'static str, got: usize, max: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PatchRole {
    StandardLch,
    ToneScale,
    Vendor,
}

/// One target patch. `column` is 1-based (1..=22), `row` 1-based (1..=12)
/// and rendered as the letters A..L.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Patch {
    pub column: u8,
    pub row: u8,
    pub role: PatchRole,
    pub reference_lch: LchColor,
    pub reference_lab: LabColor,
    pub reference_rgb: Rgb8,
}

impl Patch {
    /// Grid id: row letter A-L followed by the column number, e.g. `A1`.
    pub fn id(&self) -> String {
        format!("{}{}", ROW_LETTERS[(self.row - 1) as usize], self.column)
    }
}

/// Parses a grid id like `C17` back to (row, column), both 1-based.
pub fn parse_patch_id(id: &str) -> Option<(u8, u8)> {
    let mut chars = id.chars();
    let letter = chars.next()?;
    let row = ROW_LETTERS.iter().position(|&c| c == letter)? as u8 + 1;
    let col: u8 = chars.as_str().parse().ok()?;
    if (1..=COLUMNS as u8).contains(&col) {
        Some((row, col))
    } else {
        None
    }
}

/// Where a tone scale's darkest step lands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FullTone {
    /// The most chromatic point of the boundary at the scale's hue.
    GamutMax,
    /// A fixed endpoint, used by the near-neutral gray scale.
    Fixed { l: f64, chroma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToneScale {
    pub hue: f64,
    pub full_tone: FullTone,
}

/// Everything that parameterizes target construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartParams {
    pub luminance_levels: [f64; 3],
    pub hue_angles: [f64; 12],
    pub chroma_fractions: [f64; 4],
    pub tone_scales: [ToneScale; 7],
    pub paper_white_l: f64,
    pub name: String,
    pub date: String,
}

impl Default for ChartParams {
    fn default() -> Self {
        // tone scale hues are the device hues of the six full-intensity
        // sRGB inks/overprints; the seventh is a near-neutral print black
        // with a faint warm cast so its chroma steps stay strictly ordered
        let corner_hue = |r, g, b| lab_to_lch(rgb_to_lab(Rgb8::new(r, g, b))).h;
        let chroma = |h| ToneScale { hue: h, full_tone: FullTone::GamutMax };
        ChartParams {
            luminance_levels: [30.0, 50.0, 70.0],
            hue_angles: core::array::from_fn(|i| i as f64 * 30.0),
            chroma_fractions: [0.25, 0.5, 0.75, 1.0],
            tone_scales: [
                chroma(corner_hue(0, 255, 255)),
                chroma(corner_hue(255, 0, 255)),
                chroma(corner_hue(255, 255, 0)),
                chroma(corner_hue(255, 0, 0)),
                chroma(corner_hue(0, 255, 0)),
                chroma(corner_hue(0, 0, 255)),
                ToneScale { hue: 75.0, full_tone: FullTone::Fixed { l: 16.0, chroma: 4.0 } },
            ],
            paper_white_l: 100.0,
            name: "pressform scanner target".to_string(),
            date: String::new(),
        }
    }
}

/// The built target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chart {
    pub patches: Vec<Patch>,
    pub params: ChartParams,
}

/// Largest chroma the boundary admits at (L, h); zero at L = 0 and L = 100.
pub fn max_chroma(l: f64, h: f64, boundary: &GamutBoundary) -> f64 {
    boundary.max_chroma(l, h)
}

/// The standardized patch at (hue, luminance, chroma step). The last chroma
/// step sits exactly on the boundary surface.
pub fn standard_patch_lch(
    hue_index: usize,
    l_index: usize,
    chroma_index: usize,
    params: &ChartParams,
    boundary: &GamutBoundary,
) -> Result<LchColor, ChartError> {
    if hue_index >= 12 {
        return Err(ChartError::IndexOutOfRange { what: "hue", got: hue_index, max: 11 });
    }
    if l_index >= 3 {
        return Err(ChartError::IndexOutOfRange { what: "luminance", got: l_index, max: 2 });
    }
    if chroma_index >= 4 {
        return Err(ChartError::IndexOutOfRange { what: "chroma", got: chroma_index, max: 3 });
    }
    let l = params.luminance_levels[l_index];
    let h = params.hue_angles[hue_index];
    let c = params.chroma_fractions[chroma_index] * boundary.max_chroma(l, h);
    Ok(LchColor::new(l, c, h))
}

fn full_tone(scale: &ToneScale, boundary: &GamutBoundary) -> (f64, f64) {
    match scale.full_tone {
        FullTone::GamutMax => boundary.cusp(scale.hue),
        FullTone::Fixed { l, chroma } => (l, chroma),
    }
}

/// Step `step` of tone scale `scale_index`: hue fixed, chroma climbing from
/// a twelfth of the full tone to the full tone, lightness interpolating
/// from paper white down to the full-tone lightness.
pub fn tone_scale_patch(
    scale_index: usize,
    step: usize,
    params: &ChartParams,
    boundary: &GamutBoundary,
) -> Result<LchColor, ChartError> {
    if scale_index >= 7 {
        return Err(ChartError::IndexOutOfRange { what: "scale", got: scale_index, max: 6 });
    }
    if step >= 12 {
        return Err(ChartError::IndexOutOfRange { what: "step", got: step, max: 11 });
    }
    let scale = &params.tone_scales[scale_index];
    let (l_full, c_full) = full_tone(scale, boundary);
    let t = (step + 1) as f64 / 12.0;
    Ok(LchColor::new(
        (1.0 - t) * params.paper_white_l + t * l_full,
        t * c_full,
        scale.hue,
    ))
}

const VENDOR_SKIN_TONES: [(f64, f64, f64); 12] = [
    (75.0, 12.0, 16.0),
    (71.0, 13.0, 17.0),
    (67.0, 14.0, 18.0),
    (63.0, 15.0, 19.0),
    (59.0, 16.0, 20.0),
    (55.0, 17.0, 21.0),
    (51.0, 18.0, 21.0),
    (47.0, 18.0, 20.0),
    (43.0, 17.0, 19.0),
    (39.0, 16.0, 18.0),
    (35.0, 15.0, 16.0),
    (30.0, 13.0, 14.0),
];

fn vendor_patch_lch(column: usize, step: usize, params: &ChartParams, boundary: &GamutBoundary) -> LchColor {
    match column {
        // 12-step neutral ramp, light to dark
        20 => LchColor::new(95.0 - 90.0 * step as f64 / 11.0, 0.0, 0.0),
        // skin tones, light to deep
        21 => {
            let (l, a, b) = VENDOR_SKIN_TONES[step];
            lab_to_lch(LabColor::new(l, a, b))
        }
        // high-chroma accents at the cusp of each standard hue
        22 => {
            let h = params.hue_angles[step];
            let (l, c) = boundary.cusp(h);
            LchColor::new(l, 0.9 * c, h)
        }
        _ => unreachable!("vendor columns are 20..=22"),
    }
}

/// Clips toward the neutral axis (L and hue held) until the color encodes
/// within the sRGB cube, then encodes. In-cube colors pass through intact.
fn render_rgb(lch: LchColor) -> Rgb8 {
    let encodable = |c: f64| {
        let xyz = lab_to_xyz(lch_to_lab(LchColor::new(lch.l, c, lch.h)), &WhitePoint::D50);
        xyz_to_linear_unclamped(xyz)
            .iter()
            .all(|v| (-1e-9..=1.0 + 1e-9).contains(v))
    };
    if encodable(lch.c) {
        return lab_to_rgb(lch_to_lab(lch));
    }
    let (mut lo, mut hi) = (0.0, lch.c);
    while hi - lo > 1e-7 {
        let mid = 0.5 * (lo + hi);
        if encodable(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lab_to_rgb(lch_to_lab(LchColor::new(lch.l, lo, lch.h)))
}

/// Builds the full 264-patch target against `boundary`.
pub fn build_target(boundary: &GamutBoundary, params: ChartParams) -> Chart {
    let mut patches = Vec::with_capacity(PATCH_COUNT);
    for row in 1..=ROWS as u8 {
        for column in 1..=COLUMNS as u8 {
            let (role, lch) = match column {
                1..=12 => {
                    let l_index = (row as usize - 1) / 4;
                    let chroma_index = (row as usize - 1) % 4;
                    let lch = standard_patch_lch(
                        column as usize - 1,
                        l_index,
                        chroma_index,
                        &params,
                        boundary,
                    )
                    .expect("grid indices are in range");
                    (PatchRole::StandardLch, lch)
                }
                13..=19 => {
                    let lch = tone_scale_patch(
                        column as usize - 13,
                        row as usize - 1,
                        &params,
                        boundary,
                    )
                    .expect("grid indices are in range");
                    (PatchRole::ToneScale, lch)
                }
                _ => (
                    PatchRole::Vendor,
                    vendor_patch_lch(column as usize, row as usize - 1, &params, boundary),
                ),
            };
            let reference_lab = lch_to_lab(lch);
            patches.push(Patch {
                column,
                row,
                role,
                reference_lch: lch,
                reference_lab,
                reference_rgb: render_rgb(lch),
            });
        }
    }
    Chart { patches, params }
}

impl Chart {
    pub fn find(&self, id: &str) -> Option<&Patch> {
        let (row, col) = parse_patch_id(id)?;
        self.patches.iter().find(|p| p.row == row && p.column == col)
    }

    /// (id, reference Lab) pairs in file order.
    pub fn reference_rows(&self) -> Vec<(String, LabColor)> {
        self.patches.iter().map(|p| (p.id(), p.reference_lab)).collect()
    }

    /// The CGATS-style reference document for this chart.
    pub fn reference_document(&self) -> String {
        let rows = self.reference_rows();
        crate::cgats::write_reference(
            &self.params.name,
            &self.params.date,
            rows.iter().map(|(id, lab)| (id.as_str(), *lab)),
        )
    }

    /// Renders the patch grid. Dimensions are exactly
    /// `columns * patch_px + 2 * margin` by `rows * patch_px + 2 * margin`.
    pub fn render(&self, patch_px: usize, margin: usize) -> Raster {
        let patch_px = patch_px.max(2);
        let w = COLUMNS * patch_px + 2 * margin;
        let h = ROWS * patch_px + 2 * margin;
        let mut raster = Raster::new(w, h, Rgb8::new(255, 255, 255)).expect("nonzero dims");
        for p in &self.patches {
            let x = margin + (p.column as usize - 1) * patch_px;
            let y = margin + (p.row as usize - 1) * patch_px;
            raster.fill_rect(x + 1, y + 1, patch_px - 1, patch_px - 1, p.reference_rgb);
        }
        raster
    }
}
