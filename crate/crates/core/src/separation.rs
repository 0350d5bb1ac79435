//! RGB to CMYK separation with GCR/UCR black generation.
//!
//! Complements are taken on the gamma-encoded channels, matching the
//! look-up-table separations that predate ICC workflows. Black ramps
//! linearly from `black_start` over `black_width`, gray replacement removes
//! the same amount from all three chromatic inks, and total ink coverage is
//! limited by scaling C, M, Y while K is preserved.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::color::{Cmyk, Rgb8};

#[derive(Debug, Error, PartialEq)]
pub enum SeparationError {
    #[error("ink limit {limit} is below the black level {k}")]
    LimitBelowBlack { limit: f64, k: f64 },
}

/// Black-generation and ink-limit settings.
///
/// `black_start` is the gray level where black ink begins, `black_width`
/// the gray span over which it ramps to `max_black`. `gcr_strength` removes
/// the black-equivalent gray from C, M, Y everywhere; `ucr_weight` adds
/// removal confined to near-neutrals. `tic_limit` caps C+M+Y+K.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparationParams {
    pub black_start: f64,
    pub black_width: f64,
    pub max_black: f64,
    pub gcr_strength: f64,
    pub ucr_weight: f64,
    pub tic_limit: f64,
}

const MIN_BLACK_WIDTH: f64 = 1e-6;

impl SeparationParams {
    /// Clamps every field into its documented range and shortens the black
    /// ramp so that `black_start + black_width <= 1`.
    pub fn new(
        black_start: f64,
        black_width: f64,
        max_black: f64,
        gcr_strength: f64,
        ucr_weight: f64,
        tic_limit: f64,
    ) -> Self {
        let black_start = black_start.clamp(0.0, 1.0);
        let black_width = black_width
            .clamp(MIN_BLACK_WIDTH, 1.0)
            .min((1.0 - black_start).max(MIN_BLACK_WIDTH));
        SeparationParams {
            black_start,
            black_width,
            max_black: max_black.clamp(0.0, 1.0),
            gcr_strength: gcr_strength.clamp(0.0, 1.0),
            ucr_weight: ucr_weight.clamp(0.0, 1.0),
            tic_limit: tic_limit.clamp(MIN_BLACK_WIDTH, 4.0),
        }
    }
}

impl Default for SeparationParams {
    fn default() -> Self {
        SeparationParams::new(0.25, 0.75, 0.95, 0.6, 0.2, 3.2)
    }
}

/// One separated color with its bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparationResult {
    pub cmyk: Cmyk,
    /// The replaceable gray: min of the naive C, M, Y complements.
    pub gray_component: f64,
    pub tic: f64,
    pub tic_clamped: bool,
}

fn complements(rgb: Rgb8) -> (f64, f64, f64) {
    (
        1.0 - f64::from(rgb.r) / 255.0,
        1.0 - f64::from(rgb.g) / 255.0,
        1.0 - f64::from(rgb.b) / 255.0,
    )
}

/// The common gray part of the naive complements, on gamma-encoded channels.
pub fn gray_component(rgb: Rgb8) -> f64 {
    let (c, m, y) = complements(rgb);
    c.min(m).min(y)
}

/// Black ink for gray level `g`: zero through `black_start`, then a linear
/// ramp over `black_width` up to `max_black`. Monotone nondecreasing.
pub fn black_generation(g: f64, params: &SeparationParams) -> f64 {
    let g = g.clamp(0.0, 1.0);
    if g <= params.black_start {
        0.0
    } else {
        params.max_black * ((g - params.black_start) / params.black_width).clamp(0.0, 1.0)
    }
}

/// Caps total coverage at `tic_limit` by scaling C, M, Y with a common
/// factor; K carries the tone and is preserved. Rejects limits below K.
pub fn apply_tic_limit(cmyk: Cmyk, tic_limit: f64) -> Result<Cmyk, SeparationError> {
    if tic_limit < cmyk.k.max(0.0) {
        return Err(SeparationError::LimitBelowBlack { limit: tic_limit, k: cmyk.k });
    }
    let sum = cmyk.total();
    if sum <= tic_limit {
        return Ok(cmyk);
    }
    let chroma_sum = cmyk.c + cmyk.m + cmyk.y;
    let scale = (tic_limit - cmyk.k) / chroma_sum;
    Ok(Cmyk::new(cmyk.c * scale, cmyk.m * scale, cmyk.y * scale, cmyk.k))
}

/// Full separation: complements, black generation on the gray component,
/// equal-amount GCR/UCR removal, then ink limiting.
pub fn separate(rgb: Rgb8, params: &SeparationParams) -> SeparationResult {
    let (c0, m0, y0) = complements(rgb);
    let gray = c0.min(m0).min(y0);
    // black can never exceed what the ink limit allows
    let k = black_generation(gray, params).min(params.tic_limit);

    let spread = c0.max(m0).max(y0) - gray;
    let neutrality = 1.0 - spread;
    let removal = params.gcr_strength * k + params.ucr_weight * k * neutrality;

    let cmyk = Cmyk::new(c0 - removal, m0 - removal, y0 - removal, k);
    let limited = apply_tic_limit(cmyk, params.tic_limit)
        .expect("k was clamped below the ink limit");
    SeparationResult {
        cmyk: limited,
        gray_component: gray,
        tic: limited.total(),
        tic_clamped: limited != cmyk,
    }
}
