//! Color value types and the conversions between them.
//!
//! The pipeline is sRGB code values -> linear light -> XYZ -> CIELAB -> LCh,
//! with every step invertible. XYZ is D50-adapted (Bradford) because press
//! measurement practice is D50-based; the adapted primary matrix is fixed at
//! construction and all conversions are pure functions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// 8-bit sRGB code values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rgb8 {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl Rgb8 {
    pub fn new(r: u8, g: u8, b: u8) -> Self {
        Rgb8 { r, g, b }
    }

    /// True when all three channels carry the same code value.
    pub fn is_neutral(&self) -> bool {
        self.r == self.g && self.g == self.b
    }
}

/// Linear-light RGB, each channel in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RgbLinear {
    pub r: f64,
    pub g: f64,
    pub b: f64,
}

impl RgbLinear {
    /// Clamps each channel into [0, 1].
    pub fn new(r: f64, g: f64, b: f64) -> Self {
        RgbLinear {
            r: r.clamp(0.0, 1.0),
            g: g.clamp(0.0, 1.0),
            b: b.clamp(0.0, 1.0),
        }
    }
}

/// CIE XYZ tristimulus values, Y normalized so the reference white has Y = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XyzColor {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl XyzColor {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        XyzColor { x, y, z }
    }
}

/// CIELAB. L in [0, 100] for colors no brighter than the reference white.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabColor {
    pub l: f64,
    pub a: f64,
    pub b: f64,
}

impl LabColor {
    pub fn new(l: f64, a: f64, b: f64) -> Self {
        LabColor { l, a, b }
    }
}

/// Polar form of Lab: lightness, chroma, hue angle in degrees.
///
/// Hue is kept normalized to [0, 360) and is canonically 0 for neutrals
/// (C = 0), so value equality is well-defined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LchColor {
    pub l: f64,
    pub c: f64,
    pub h: f64,
}

impl LchColor {
    pub fn new(l: f64, c: f64, h: f64) -> Self {
        let c = c.max(0.0);
        let h = if c == 0.0 { 0.0 } else { h.rem_euclid(360.0) };
        LchColor { l, c, h }
    }
}

/// Ink fractions, each in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cmyk {
    pub c: f64,
    pub m: f64,
    pub y: f64,
    pub k: f64,
}

impl Cmyk {
    /// Clamps each component into [0, 1].
    pub fn new(c: f64, m: f64, y: f64, k: f64) -> Self {
        Cmyk {
            c: c.clamp(0.0, 1.0),
            m: m.clamp(0.0, 1.0),
            y: y.clamp(0.0, 1.0),
            k: k.clamp(0.0, 1.0),
        }
    }

    /// Total ink coverage, the plain sum of the four channels.
    pub fn total(&self) -> f64 {
        self.c + self.m + self.y + self.k
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ColorError {
    #[error("white point components must be strictly positive, got ({0}, {1}, {2})")]
    NonPositiveWhitePoint(f64, f64, f64),
}

/// A validated reference white. Construction rejects nonpositive components,
/// so conversions taking a `WhitePoint` never divide by zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WhitePoint(XyzColor);

impl WhitePoint {
    /// ICC PCS D50 white, the normative XYZ values for print work.
    pub const D50: WhitePoint = WhitePoint(XyzColor {
        x: 0.9642,
        y: 1.0,
        z: 0.8249,
    });

    pub fn new(xyz: XyzColor) -> Result<Self, ColorError> {
        if xyz.x > 0.0 && xyz.y > 0.0 && xyz.z > 0.0 {
            Ok(WhitePoint(xyz))
        } else {
            Err(ColorError::NonPositiveWhitePoint(xyz.x, xyz.y, xyz.z))
        }
    }

    pub fn xyz(&self) -> XyzColor {
        self.0
    }
}

// sRGB primaries adapted to D50 with the Bradford transform. Derived from
// the IEC 61966-2-1 chromaticities and the ICC D50 white; (1,1,1) maps to
// the D50 white exactly (row sums).
#[allow(clippy::excessive_precision)]
const SRGB_TO_XYZ_D50: [[f64; 3]; 3] = [
    [0.43604125161605101, 0.38511291079815552, 0.14304583758579359],
    [0.22248454022947742, 0.7169050786084572, 0.060610381162065241],
    [0.013920187471375373, 0.097067238697123984, 0.71391257383150064],
];

#[allow(clippy::excessive_precision)]
const XYZ_D50_TO_SRGB: [[f64; 3]; 3] = [
    [3.1341863642368191, -1.6172089589982752, -0.49069406400638405],
    [-0.97874850419069415, 1.9161300967735873, 0.033433399159995568],
    [0.071963927802246752, -0.22899387345320327, 1.4057537328964445],
];

fn decode_channel(code: u8) -> f64 {
    let v = f64::from(code) / 255.0;
    if v <= 0.04045 {
        v / 12.92
    } else {
        ((v + 0.055) / 1.055).powf(2.4)
    }
}

fn encode_channel(v: f64) -> u8 {
    let v = v.clamp(0.0, 1.0);
    let e = if v <= 0.003_130_8 {
        12.92 * v
    } else {
        1.055 * v.powf(1.0 / 2.4) - 0.055
    };
    (e * 255.0).round() as u8
}

/// Decodes 8-bit sRGB with the standard IEC 61966-2-1 piecewise curve.
pub fn srgb_to_linear(v: Rgb8) -> RgbLinear {
    RgbLinear::new(decode_channel(v.r), decode_channel(v.g), decode_channel(v.b))
}

/// Encodes linear light back to 8-bit sRGB, clamping out-of-range input.
pub fn linear_to_srgb(v: RgbLinear) -> Rgb8 {
    Rgb8::new(encode_channel(v.r), encode_channel(v.g), encode_channel(v.b))
}

/// Linear sRGB to D50-adapted XYZ.
pub fn linear_to_xyz(v: RgbLinear) -> XyzColor {
    let m = &SRGB_TO_XYZ_D50;
    XyzColor::new(
        m[0][0] * v.r + m[0][1] * v.g + m[0][2] * v.b,
        m[1][0] * v.r + m[1][1] * v.g + m[1][2] * v.b,
        m[2][0] * v.r + m[2][1] * v.g + m[2][2] * v.b,
    )
}

/// Inverse of [`linear_to_xyz`]; channels are clamped to [0, 1].
pub fn xyz_to_linear(v: XyzColor) -> RgbLinear {
    let [r, g, b] = xyz_to_linear_unclamped(v);
    RgbLinear::new(r, g, b)
}

/// The raw inverse matrix product, without clamping. Out-of-range values
/// signal light the sRGB cube cannot encode.
pub fn xyz_to_linear_unclamped(v: XyzColor) -> [f64; 3] {
    let m = &XYZ_D50_TO_SRGB;
    [
        m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
        m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
        m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
    ]
}

const LAB_DELTA: f64 = 6.0 / 29.0;

fn lab_f(t: f64) -> f64 {
    if t > LAB_DELTA * LAB_DELTA * LAB_DELTA {
        t.cbrt()
    } else {
        t / (3.0 * LAB_DELTA * LAB_DELTA) + 4.0 / 29.0
    }
}

fn lab_f_inv(t: f64) -> f64 {
    if t > LAB_DELTA {
        t * t * t
    } else {
        3.0 * LAB_DELTA * LAB_DELTA * (t - 4.0 / 29.0)
    }
}

/// CIE 1976 Lab from XYZ, using the two-branch f(t).
pub fn xyz_to_lab(v: XyzColor, white: &WhitePoint) -> LabColor {
    let w = white.xyz();
    let fx = lab_f(v.x / w.x);
    let fy = lab_f(v.y / w.y);
    let fz = lab_f(v.z / w.z);
    LabColor::new(116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz))
}

/// Inverse of [`xyz_to_lab`].
pub fn lab_to_xyz(v: LabColor, white: &WhitePoint) -> XyzColor {
    let w = white.xyz();
    let fy = (v.l + 16.0) / 116.0;
    let fx = fy + v.a / 500.0;
    let fz = fy - v.b / 200.0;
    XyzColor::new(lab_f_inv(fx) * w.x, lab_f_inv(fy) * w.y, lab_f_inv(fz) * w.z)
}

/// Rectangular to polar: C = sqrt(a^2 + b^2), h = atan2(b, a) in degrees.
pub fn lab_to_lch(v: LabColor) -> LchColor {
    let c = v.a.hypot(v.b);
    let h = v.b.atan2(v.a).to_degrees();
    LchColor::new(v.l, c, h)
}

/// Polar back to rectangular; exact inverse of [`lab_to_lch`] for C > 0.
pub fn lch_to_lab(v: LchColor) -> LabColor {
    let r = v.h.to_radians();
    LabColor::new(v.l, v.c * r.cos(), v.c * r.sin())
}

/// CIE76 color difference: Euclidean distance in Lab.
pub fn delta_e_ab(p: LabColor, q: LabColor) -> f64 {
    let dl = p.l - q.l;
    let da = p.a - q.a;
    let db = p.b - q.b;
    (dl * dl + da * da + db * db).sqrt()
}

/// Full decode: sRGB code values to D50 Lab.
pub fn rgb_to_lab(v: Rgb8) -> LabColor {
    xyz_to_lab(linear_to_xyz(srgb_to_linear(v)), &WhitePoint::D50)
}

/// Full encode: D50 Lab to sRGB code values, clamping out-of-range light.
pub fn lab_to_rgb(v: LabColor) -> Rgb8 {
    linear_to_srgb(xyz_to_linear(lab_to_xyz(v, &WhitePoint::D50)))
}
