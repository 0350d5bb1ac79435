//! In-memory RGB rasters with binary PPM input/output.
//!
//! PPM (P6, maxval 255) is the one mandatory raster format: the writer is
//! byte-deterministic, so emitted files can be compared verbatim in tests.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use thiserror::Error;

use crate::color::Rgb8;

#[derive(Debug, Error)]
pub enum RasterError {
    #[error("raster dimensions must be positive, got {width}x{height}")]
    EmptyDimensions { width: usize, height: usize },
    #[error("ppm: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// A width x height grid of RGB pixels, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    width: usize,
    height: usize,
    pixels: Vec<Rgb8>,
}

impl Raster {
    pub fn new(width: usize, height: usize, background: Rgb8) -> Result<Self, RasterError> {
        if width == 0 || height == 0 {
            return Err(RasterError::EmptyDimensions { width, height });
        }
        Ok(Raster { width, height, pixels: vec![background; width * height] })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> Rgb8 {
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, color: Rgb8) {
        if x < self.width && y < self.height {
            self.pixels[y * self.width + x] = color;
        }
    }

    /// Fills the rectangle with origin (x, y), clipped to the canvas.
    pub fn fill_rect(&mut self, x: usize, y: usize, w: usize, h: usize, color: Rgb8) {
        for yy in y..(y + h).min(self.height) {
            for xx in x..(x + w).min(self.width) {
                self.pixels[yy * self.width + xx] = color;
            }
        }
    }

    /// Fills a disc by integer distance test; deterministic everywhere.
    pub fn fill_circle(&mut self, cx: i64, cy: i64, radius: i64, color: Rgb8) {
        let r2 = radius * radius;
        for dy in -radius..=radius {
            for dx in -radius..=radius {
                if dx * dx + dy * dy <= r2 {
                    let (x, y) = (cx + dx, cy + dy);
                    if x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height {
                        self.pixels[y as usize * self.width + x as usize] = color;
                    }
                }
            }
        }
    }

    /// Copies `other` into this raster with its origin at (x, y).
    pub fn blit(&mut self, other: &Raster, x: usize, y: usize) {
        for yy in 0..other.height {
            for xx in 0..other.width {
                self.set(x + xx, y + yy, other.get(xx, yy));
            }
        }
    }

    /// Binary PPM, header `P6\n{w} {h}\n255\n` followed by raw RGB bytes.
    pub fn write_ppm<W: Write>(&self, mut out: W) -> Result<(), RasterError> {
        write!(out, "P6\n{} {}\n255\n", self.width, self.height)?;
        let mut bytes = Vec::with_capacity(self.pixels.len() * 3);
        for p in &self.pixels {
            bytes.extend_from_slice(&[p.r, p.g, p.b]);
        }
        out.write_all(&bytes)?;
        Ok(())
    }

    pub fn to_ppm_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_ppm(&mut buf).expect("vec write cannot fail");
        buf
    }

    pub fn write_ppm_file(&self, path: &Path) -> Result<(), RasterError> {
        let mut f = fs::File::create(path)?;
        self.write_ppm(&mut f)?;
        Ok(())
    }

    /// Reads a binary PPM with maxval 255; whitespace and `#` comments in
    /// the header are tolerated.
    pub fn read_ppm(bytes: &[u8]) -> Result<Self, RasterError> {
        let mut pos = 0usize;
        let mut token = |bytes: &[u8]| -> Result<String, RasterError> {
            // skip whitespace and comment lines
            loop {
                while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                    pos += 1;
                }
                if pos < bytes.len() && bytes[pos] == b'#' {
                    while pos < bytes.len() && bytes[pos] != b'\n' {
                        pos += 1;
                    }
                    continue;
                }
                break;
            }
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if start == pos {
                return Err(RasterError::Format("unexpected end of header".into()));
            }
            Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
        };

        if token(bytes)? != "P6" {
            return Err(RasterError::Format("not a P6 ppm".into()));
        }
        let width: usize = token(bytes)?
            .parse()
            .map_err(|_| RasterError::Format("bad width".into()))?;
        let height: usize = token(bytes)?
            .parse()
            .map_err(|_| RasterError::Format("bad height".into()))?;
        let maxval: usize = token(bytes)?
            .parse()
            .map_err(|_| RasterError::Format("bad maxval".into()))?;
        if maxval != 255 {
            return Err(RasterError::Format(format!("unsupported maxval {maxval}")));
        }
        if width == 0 || height == 0 {
            return Err(RasterError::EmptyDimensions { width, height });
        }
        // exactly one whitespace byte separates header from data
        pos += 1;
        let need = width * height * 3;
        if bytes.len() < pos || bytes.len() - pos < need {
            return Err(RasterError::Format("truncated pixel data".into()));
        }
        let data = &bytes[pos..pos + need];
        let pixels = data
            .chunks_exact(3)
            .map(|c| Rgb8::new(c[0], c[1], c[2]))
            .collect();
        Ok(Raster { width, height, pixels })
    }

    pub fn read_ppm_file(path: &Path) -> Result<Self, RasterError> {
        Self::read_ppm(&fs::read(path)?)
    }
}
