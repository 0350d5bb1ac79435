//! Device gamut boundaries, in/out-of-gamut tests and rendering intents.
//!
//! A boundary is a max-chroma table over an (L, hue) grid, built from any
//! sampler that enumerates achievable Lab colors. Construction raises every
//! node bracketing a sample, so each sampled color is guaranteed to test
//! in-gamut against its own boundary. The rows pinned at L = 0 and L = 100
//! stay zero; interpolation clamps to the interior rows so near-extreme
//! samples are still covered.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::color::{lab_to_lch, LabColor, LchColor};

pub const DEFAULT_L_BINS: usize = 16;
pub const DEFAULT_H_BINS: usize = 36;
/// Grid steps per RGB channel for the default sRGB sampler.
pub const DEFAULT_SRGB_GRID: usize = 17;

pub const MIN_L_BINS: usize = 8;
pub const MIN_H_BINS: usize = 24;

#[derive(Debug, Error, PartialEq)]
pub enum BoundaryError {
    #[error("need at least {MIN_L_BINS} L bins and {MIN_H_BINS} hue bins, got {l_bins}x{h_bins}")]
    TooFewBins { l_bins: usize, h_bins: usize },
    #[error("sampler populated only {0} L rows; at least 2 are required")]
    TooFewRows(usize),
    #[error("boundary table line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Max-chroma table over an L x hue grid, with the device's L range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GamutBoundary {
    l_bins: usize,
    h_bins: usize,
    cmax: Vec<f64>,
    l_min: f64,
    l_max: f64,
}

impl GamutBoundary {
    /// Builds a boundary from sampled Lab colors.
    ///
    /// Every node bracketing a sample is raised to the sample's chroma, and
    /// nodes never reached by a sample are filled by linear interpolation
    /// along hue, then along L. Errors if fewer than two L rows see samples.
    pub fn from_samples(
        samples: impl IntoIterator<Item = LabColor>,
        l_bins: usize,
        h_bins: usize,
    ) -> Result<Self, BoundaryError> {
        if l_bins < MIN_L_BINS || h_bins < MIN_H_BINS {
            return Err(BoundaryError::TooFewBins { l_bins, h_bins });
        }
        let mut b = GamutBoundary {
            l_bins,
            h_bins,
            cmax: vec![0.0; l_bins * h_bins],
            l_min: f64::INFINITY,
            l_max: f64::NEG_INFINITY,
        };
        let mut touched = vec![false; l_bins * h_bins];
        let mut populated_cells = vec![false; l_bins];
        for lab in samples {
            let lch = lab_to_lch(lab);
            b.l_min = b.l_min.min(lch.l.clamp(0.0, 100.0));
            b.l_max = b.l_max.max(lch.l.clamp(0.0, 100.0));
            let (k, _, j, j2, _) = b.cell(lch.l, lch.h);
            populated_cells[k] = true;
            for idx in [
                k * h_bins + j,
                k * h_bins + j2,
                (k + 1) * h_bins + j,
                (k + 1) * h_bins + j2,
            ] {
                if b.cmax[idx] < lch.c {
                    b.cmax[idx] = lch.c;
                }
                touched[idx] = true;
            }
        }
        let nonempty = populated_cells.iter().filter(|&&p| p).count();
        if nonempty < 2 {
            return Err(BoundaryError::TooFewRows(nonempty));
        }
        b.fill(&touched);
        Ok(b)
    }

    /// Boundary of the sRGB cube sampled on a `grid`-per-channel lattice.
    pub fn srgb(grid: usize, l_bins: usize, h_bins: usize) -> Result<Self, BoundaryError> {
        let grid = grid.max(2);
        let codes: Vec<u8> = (0..grid)
            .map(|i| ((i * 255 + (grid - 1) / 2) / (grid - 1)) as u8)
            .collect();
        let mut samples = Vec::with_capacity(grid * grid * grid);
        for &r in &codes {
            for &g in &codes {
                for &b in &codes {
                    samples.push(crate::color::rgb_to_lab(crate::color::Rgb8::new(r, g, b)));
                }
            }
        }
        Self::from_samples(samples, l_bins, h_bins)
    }

    /// The default sRGB boundary: 17-step sampler on a 16 x 36 grid.
    pub fn srgb_default() -> Self {
        Self::srgb(DEFAULT_SRGB_GRID, DEFAULT_L_BINS, DEFAULT_H_BINS)
            .expect("srgb sampler populates the grid")
    }

    pub fn l_bins(&self) -> usize {
        self.l_bins
    }

    pub fn h_bins(&self) -> usize {
        self.h_bins
    }

    /// The sampled device's lightness range.
    pub fn l_range(&self) -> (f64, f64) {
        (self.l_min, self.l_max)
    }

    fn step_l(&self) -> f64 {
        100.0 / (self.l_bins - 1) as f64
    }

    fn step_h(&self) -> f64 {
        360.0 / self.h_bins as f64
    }

    /// Cell lookup: interior L row pair (k, k+1) with weight t, cyclic hue
    /// column pair (j, j2) with weight th.
    fn cell(&self, l: f64, h: f64) -> (usize, f64, usize, usize, f64) {
        let sl = self.step_l();
        let lc = l.clamp(sl, (self.l_bins - 2) as f64 * sl);
        let k = ((lc / sl) as usize).clamp(1, self.l_bins - 3);
        let t = (lc - k as f64 * sl) / sl;
        let h = h.rem_euclid(360.0);
        let sh = self.step_h();
        let j = ((h / sh) as usize).min(self.h_bins - 1);
        let th = (h - j as f64 * sh) / sh;
        (k, t, j, (j + 1) % self.h_bins, th)
    }

    fn fill(&mut self, touched: &[bool]) {
        let (nl, nh) = (self.l_bins, self.h_bins);
        // circular interpolation along hue within partially filled rows
        for i in 1..nl - 1 {
            let row_touched: Vec<bool> = (0..nh).map(|j| touched[i * nh + j]).collect();
            let hits: Vec<usize> = (0..nh).filter(|&j| row_touched[j]).collect();
            if hits.is_empty() || hits.len() == nh {
                continue;
            }
            let filled: Vec<f64> = (0..nh)
                .map(|j| {
                    if row_touched[j] {
                        return self.cmax[i * nh + j];
                    }
                    let prev = hits
                        .iter()
                        .map(|&x| if x <= j { x as isize } else { x as isize - nh as isize })
                        .max()
                        .unwrap();
                    let next = hits
                        .iter()
                        .map(|&x| if x >= j { x as isize } else { x as isize + nh as isize })
                        .min()
                        .unwrap();
                    let span = (next - prev) as f64;
                    let t = (j as isize - prev) as f64 / span;
                    let pv = self.cmax[i * nh + prev.rem_euclid(nh as isize) as usize];
                    let nv = self.cmax[i * nh + next.rem_euclid(nh as isize) as usize];
                    (1.0 - t) * pv + t * nv
                })
                .collect();
            self.cmax[i * nh..(i + 1) * nh].copy_from_slice(&filled);
        }
        // rows with no samples at all: interpolate along L, with the pinned
        // zero rows as outer anchors
        let mut anchors = vec![0usize];
        anchors.extend((1..nl - 1).filter(|&i| (0..nh).any(|j| touched[i * nh + j])));
        anchors.push(nl - 1);
        for i in 1..nl - 1 {
            if (0..nh).any(|j| touched[i * nh + j]) {
                continue;
            }
            let lo = *anchors.iter().filter(|&&a| a < i).max().unwrap();
            let hi = *anchors.iter().filter(|&&a| a > i).min().unwrap();
            let t = (i - lo) as f64 / (hi - lo) as f64;
            for j in 0..nh {
                self.cmax[i * nh + j] =
                    (1.0 - t) * self.cmax[lo * nh + j] + t * self.cmax[hi * nh + j];
            }
        }
    }

    /// Largest chroma inside the boundary at (L, h). Zero at L = 0 and L = 100.
    pub fn max_chroma(&self, l: f64, h: f64) -> f64 {
        if l <= 0.0 || l >= 100.0 {
            return 0.0;
        }
        let nh = self.h_bins;
        let (k, t, j, j2, th) = self.cell(l, h);
        let lo = (1.0 - th) * self.cmax[k * nh + j] + th * self.cmax[k * nh + j2];
        let hi = (1.0 - th) * self.cmax[(k + 1) * nh + j] + th * self.cmax[(k + 1) * nh + j2];
        (1.0 - t) * lo + t * hi
    }

    pub fn in_gamut(&self, c: LchColor) -> bool {
        c.c <= self.max_chroma(c.l, c.h) + 1e-9
    }

    /// Looser membership test allowing one table step of slack: the color
    /// passes if it is under the largest of the four surrounding node values.
    pub fn in_gamut_within_step(&self, c: LchColor) -> bool {
        if self.in_gamut(c) {
            return true;
        }
        if c.l <= 0.0 || c.l >= 100.0 {
            return c.c <= 1e-9;
        }
        let nh = self.h_bins;
        let (k, _, j, j2, _) = self.cell(c.l, c.h);
        let cell_max = self.cmax[k * nh + j]
            .max(self.cmax[k * nh + j2])
            .max(self.cmax[(k + 1) * nh + j])
            .max(self.cmax[(k + 1) * nh + j2]);
        c.c <= cell_max + 1e-9
    }

    /// The (L, chroma) of the most chromatic point of the boundary at hue
    /// `h`. The table is piecewise linear in L, so the maximum sits on a
    /// node row; ties resolve to the lowest L.
    pub fn cusp(&self, h: f64) -> (f64, f64) {
        let nh = self.h_bins;
        let h = h.rem_euclid(360.0);
        let sh = self.step_h();
        let j = ((h / sh) as usize).min(nh - 1);
        let j2 = (j + 1) % nh;
        let th = (h - j as f64 * sh) / sh;
        let mut best = (0.0, 0.0);
        for k in 1..self.l_bins - 1 {
            let v = (1.0 - th) * self.cmax[k * nh + j] + th * self.cmax[k * nh + j2];
            if v > best.1 {
                best = (k as f64 * self.step_l(), v);
            }
        }
        best
    }

    /// Plain-text export: header with the bin counts and L range, then one
    /// row of chroma values per L row.
    pub fn write_table(&self) -> String {
        let mut out = String::from("GAMUT_BOUNDARY\n");
        out.push_str(&format!("L_BINS {}\n", self.l_bins));
        out.push_str(&format!("H_BINS {}\n", self.h_bins));
        out.push_str(&format!("L_MIN {}\n", self.l_min));
        out.push_str(&format!("L_MAX {}\n", self.l_max));
        out.push_str("BEGIN_DATA\n");
        for i in 0..self.l_bins {
            let row: Vec<String> = (0..self.h_bins)
                .map(|j| self.cmax[i * self.h_bins + j].to_string())
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out.push_str("END_DATA\n");
        out
    }

    pub fn parse_table(text: &str) -> Result<Self, BoundaryError> {
        let err = |line: usize, message: &str| BoundaryError::Parse {
            line,
            message: message.to_string(),
        };
        let mut lines = text.lines().enumerate();
        let mut l_bins = None;
        let mut h_bins = None;
        let mut l_min = 0.0f64;
        let mut l_max = 100.0f64;
        let mut seen_magic = false;
        let mut data_start = None;
        for (n, raw) in lines.by_ref() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !seen_magic {
                if line != "GAMUT_BOUNDARY" {
                    return Err(err(n + 1, "expected GAMUT_BOUNDARY header"));
                }
                seen_magic = true;
                continue;
            }
            if line == "BEGIN_DATA" {
                data_start = Some(n + 1);
                break;
            }
            let mut parts = line.split_whitespace();
            let key = parts.next().unwrap_or("");
            let val = parts.next().ok_or_else(|| err(n + 1, "missing header value"))?;
            match key {
                "L_BINS" => l_bins = Some(val.parse::<usize>().map_err(|_| err(n + 1, "bad L_BINS"))?),
                "H_BINS" => h_bins = Some(val.parse::<usize>().map_err(|_| err(n + 1, "bad H_BINS"))?),
                "L_MIN" => l_min = val.parse().map_err(|_| err(n + 1, "bad L_MIN"))?,
                "L_MAX" => l_max = val.parse().map_err(|_| err(n + 1, "bad L_MAX"))?,
                other => return Err(err(n + 1, &format!("unknown header key '{other}'"))),
            }
        }
        let l_bins = l_bins.ok_or_else(|| err(0, "missing L_BINS"))?;
        let h_bins = h_bins.ok_or_else(|| err(0, "missing H_BINS"))?;
        if data_start.is_none() {
            return Err(err(0, "missing BEGIN_DATA"));
        }
        if l_bins < MIN_L_BINS || h_bins < MIN_H_BINS {
            return Err(BoundaryError::TooFewBins { l_bins, h_bins });
        }
        let mut cmax = Vec::with_capacity(l_bins * h_bins);
        let mut ended = false;
        for (n, raw) in lines {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line == "END_DATA" {
                ended = true;
                break;
            }
            let vals: Result<Vec<f64>, _> = line.split_whitespace().map(str::parse).collect();
            let vals = vals.map_err(|_| err(n + 1, "non-numeric chroma value"))?;
            if vals.len() != h_bins {
                return Err(err(n + 1, &format!("expected {h_bins} values, got {}", vals.len())));
            }
            if vals.iter().any(|v| *v < 0.0) {
                return Err(err(n + 1, "negative chroma value"));
            }
            cmax.extend(vals);
        }
        if !ended {
            return Err(err(0, "missing END_DATA"));
        }
        if cmax.len() != l_bins * h_bins {
            return Err(err(
                0,
                &format!("expected {} data rows, got {}", l_bins, cmax.len() / h_bins),
            ));
        }
        if cmax[..h_bins].iter().any(|v| *v != 0.0)
            || cmax[(l_bins - 1) * h_bins..].iter().any(|v| *v != 0.0)
        {
            return Err(err(0, "boundary rows at L=0 and L=100 must be zero"));
        }
        Ok(GamutBoundary { l_bins, h_bins, cmax, l_min, l_max })
    }
}

/// Ids of the patches that fall outside the boundary.
pub fn gamut_warning<'a, I>(patches: I, boundary: &GamutBoundary) -> Vec<String>
where
    I: IntoIterator<Item = (&'a str, LchColor)>,
{
    patches
        .into_iter()
        .filter(|(_, c)| !boundary.in_gamut(*c))
        .map(|(id, _)| id.to_string())
        .collect()
}

/// Rendering intent selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntentKind {
    RelativeColorimetric,
    Perceptual,
    Saturation,
}

/// An intent prepared against a boundary and a reference color set.
///
/// The perceptual and saturation intents need a global chroma scale, taken
/// as the smallest cmax/C over the reference colors (capped at 1), and the
/// perceptual intent compresses L linearly into the boundary's L range.
#[derive(Debug, Clone)]
pub struct IntentMapping<'a> {
    boundary: &'a GamutBoundary,
    kind: IntentKind,
    chroma_scale: f64,
}

impl<'a> IntentMapping<'a> {
    pub fn new(boundary: &'a GamutBoundary, kind: IntentKind, reference: &[LchColor]) -> Self {
        let mut scale = 1.0f64;
        for c in reference {
            if c.c > 1e-9 {
                scale = scale.min(boundary.max_chroma(c.l, c.h) / c.c);
            }
        }
        IntentMapping { boundary, kind, chroma_scale: scale.clamp(0.0, 1.0) }
    }

    pub fn chroma_scale(&self) -> f64 {
        self.chroma_scale
    }

    pub fn map(&self, c: LchColor) -> LchColor {
        match self.kind {
            IntentKind::RelativeColorimetric => {
                LchColor::new(c.l, c.c.min(self.boundary.max_chroma(c.l, c.h)), c.h)
            }
            IntentKind::Perceptual => {
                let (lo, hi) = self.boundary.l_range();
                let l = lo + c.l * (hi - lo) / 100.0;
                LchColor::new(l, self.chroma_scale * c.c, c.h)
            }
            IntentKind::Saturation => {
                let pushed = if self.chroma_scale > 0.0 { c.c / self.chroma_scale } else { c.c };
                LchColor::new(c.l, pushed.min(self.boundary.max_chroma(c.l, c.h)), c.h)
            }
        }
    }
}

/// One-shot intent mapping; see [`IntentMapping`] for the reference set role.
pub fn map_intent(
    c: LchColor,
    boundary: &GamutBoundary,
    kind: IntentKind,
    reference: &[LchColor],
) -> LchColor {
    IntentMapping::new(boundary, kind, reference).map(c)
}

/// Signed chroma change, destination minus source.
pub fn chroma_shift(src: LchColor, dst: LchColor) -> f64 {
    dst.c - src.c
}
