//! Gray-tone magnitude maps and per-cell direction overlays.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::image::{Dipole, GrayImage, ScalarField};
use crate::integral::DipoleIntegrals;
use crate::window::Rect;
use crate::Threshold;

/// Default exponent for [`tone_map`].
pub const DEFAULT_ALPHA: f64 = 0.5;

/// Default side of an overlay cell, in pixels.
pub const DEFAULT_CELL_SIZE: usize = 20;

/// Fraction of the cell side covered by a fixed-length line.
pub const LINE_FRACTION: f64 = 0.8;

/// Maps magnitudes to bytes with `round(255 * (P / P_max)^alpha)`.
///
/// Rounding is half-up. The peak pixel is always 255. A field whose peak is
/// zero maps to an all-black image.
pub fn tone_map(mag: &ScalarField, alpha: f64) -> Result<GrayImage> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            requirement: "a positive finite number",
        });
    }
    if mag.values().iter().any(|&v| v < 0.0) {
        return Err(Error::InvalidParameter {
            name: "magnitude",
            requirement: "non-negative everywhere",
        });
    }
    let peak = mag.max();
    let pixels = mag
        .values()
        .iter()
        .map(|&p| {
            if peak > 0.0 {
                let t = libm::pow(p / peak, alpha);
                libm::floor(255.0 * t + 0.5).clamp(0.0, 255.0) as u8
            } else {
                0
            }
        })
        .collect();
    GrayImage::new(mag.width(), mag.height(), pixels)
}

/// An 8-bit RGB image, row-major, three bytes per pixel.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RgbImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl RgbImage {
    /// Wraps a row-major `r, g, b` buffer.
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyImage);
        }
        if pixels.len() != 3 * width * height {
            return Err(Error::BufferLength {
                expected: 3 * width * height,
                actual: pixels.len(),
            });
        }
        Ok(RgbImage {
            width,
            height,
            pixels,
        })
    }

    /// Replicates a gray image into all three channels.
    pub fn from_gray(img: &GrayImage) -> Self {
        let pixels = img.pixels().iter().flat_map(|&v| [v, v, v]).collect();
        RgbImage {
            width: img.width(),
            height: img.height(),
            pixels,
        }
    }

    /// Width in pixels.
    pub fn width(&self) -> usize {
        self.width
    }

    /// Height in pixels.
    pub fn height(&self) -> usize {
        self.height
    }

    /// Pixel at column `x`, row `y`.
    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        let i = 3 * (y * self.width + x);
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    /// Sets the pixel at column `x`, row `y`.
    pub fn put(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        let i = 3 * (y * self.width + x);
        self.pixels[i..i + 3].copy_from_slice(&rgb);
    }

    /// Row-major `r, g, b` bytes.
    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }
}

/// One tile of the overlay grid and the dipole of its contents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellDipole {
    /// The tile's pixels.
    pub cell: Rect,
    /// Centre pixel `(x, y)`, at `cell.x0 + size / 2`.
    pub center: (usize, usize),
    /// Dipole of the whole tile, charges taken against the tile mean.
    pub dipole: Dipole,
}

/// Splits the image into `cell_size` squares and takes one dipole per
/// square. Partial tiles at the right and bottom are skipped.
pub fn cell_dipoles(img: &GrayImage, cell_size: usize) -> Result<Vec<CellDipole>> {
    if cell_size < 2 {
        return Err(Error::InvalidParameter {
            name: "cell size",
            requirement: "at least 2",
        });
    }
    let (w, h) = img.dimensions();
    if w < cell_size || h < cell_size {
        return Err(Error::ImageTooSmall {
            width: w,
            height: h,
            min_width: cell_size,
            min_height: cell_size,
        });
    }
    let tables = DipoleIntegrals::new(img);
    let mut cells = Vec::with_capacity((w / cell_size) * (h / cell_size));
    for cy in 0..h / cell_size {
        for cx in 0..w / cell_size {
            let (x0, y0) = (cx * cell_size, cy * cell_size);
            let cell = Rect {
                x0,
                y0,
                x1: x0 + cell_size - 1,
                y1: y0 + cell_size - 1,
            };
            cells.push(CellDipole {
                cell,
                center: (x0 + cell_size / 2, y0 + cell_size / 2),
                dipole: tables.rect_dipole(cell),
            });
        }
    }
    Ok(cells)
}

/// How long the drawn lines are.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LineLength {
    /// `0.8 * cell_size`, rounded up to an odd pixel count.
    #[default]
    FixedFraction,
    /// The fixed length scaled by magnitude over the largest cell magnitude.
    MagnitudeScaled,
}

/// Overlay drawing options.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlayConfig {
    /// Cell side in pixels, at least 2.
    pub cell_size: usize,
    /// Dipoles weaker than this are not drawn.
    pub threshold: Threshold,
    /// Line colour.
    pub line_color: [u8; 3],
    /// Line length rule.
    pub line_length: LineLength,
}

impl Default for OverlayConfig {
    fn default() -> Self {
        OverlayConfig {
            cell_size: DEFAULT_CELL_SIZE,
            threshold: Threshold::default(),
            line_color: [255, 0, 0],
            line_length: LineLength::FixedFraction,
        }
    }
}

/// Pixel count of a fixed-length line: `0.8 * cell_size` rounded, made odd.
pub fn fixed_line_pixels(cell_size: usize) -> usize {
    let l = libm::round(LINE_FRACTION * cell_size as f64) as usize;
    if l.is_multiple_of(2) {
        l + 1
    } else {
        l
    }
}

/// Draws one undirected line per cell whose dipole magnitude reaches the
/// threshold, over an RGB copy of `img`.
///
/// A line passes through the cell centre along the dipole, is clipped to its
/// cell, and is the same pixel set for `d` and `-d`. Zero dipoles are never
/// drawn. Cells whose centre lies outside the image are ignored.
pub fn render_overlay(img: &GrayImage, cells: &[CellDipole], cfg: &OverlayConfig) -> RgbImage {
    let mut out = RgbImage::from_gray(img);
    let peak = cells.iter().map(|c| c.dipole.magnitude()).fold(0.0, f64::max);
    let tau = cfg.threshold.resolve(peak);
    let half = (fixed_line_pixels(cfg.cell_size) - 1) as f64 / 2.0;
    let (w, h) = img.dimensions();
    for c in cells {
        let mag = c.dipole.magnitude();
        let (cx, cy) = c.center;
        if mag == 0.0 || mag < tau || cx >= w || cy >= h {
            continue;
        }
        let reach = match cfg.line_length {
            LineLength::FixedFraction => half,
            LineLength::MagnitudeScaled => half * mag / peak,
        };
        let ox = libm::round(reach * c.dipole.px / mag) as i64;
        let oy = libm::round(reach * c.dipole.py / mag) as i64;
        let (cx, cy) = (cx as i64, cy as i64);
        let (mut a, mut b) = ((cx - ox, cy - oy), (cx + ox, cy + oy));
        if (b.1, b.0) < (a.1, a.0) {
            core::mem::swap(&mut a, &mut b);
        }
        let clip = Rect {
            x0: c.cell.x0,
            y0: c.cell.y0,
            x1: c.cell.x1.min(w - 1),
            y1: c.cell.y1.min(h - 1),
        };
        for (x, y) in Bresenham::new(a, b) {
            if x >= 0 && y >= 0 && clip.contains(x as usize, y as usize) {
                out.put(x as usize, y as usize, cfg.line_color);
            }
        }
    }
    out
}

/// Integer line rasterizer, endpoints included.
struct Bresenham {
    x: i64,
    y: i64,
    end: (i64, i64),
    dx: i64,
    dy: i64,
    sx: i64,
    sy: i64,
    err: i64,
    done: bool,
}

impl Bresenham {
    fn new(from: (i64, i64), to: (i64, i64)) -> Self {
        let dx = (to.0 - from.0).abs();
        let dy = -(to.1 - from.1).abs();
        Bresenham {
            x: from.0,
            y: from.1,
            end: to,
            dx,
            dy,
            sx: if from.0 < to.0 { 1 } else { -1 },
            sy: if from.1 < to.1 { 1 } else { -1 },
            err: dx + dy,
            done: false,
        }
    }
}

impl Iterator for Bresenham {
    type Item = (i64, i64);

    fn next(&mut self) -> Option<(i64, i64)> {
        if self.done {
            return None;
        }
        let p = (self.x, self.y);
        if p == self.end {
            self.done = true;
            return Some(p);
        }
        let e2 = 2 * self.err;
        if e2 >= self.dy {
            self.err += self.dy;
            self.x += self.sx;
        }
        if e2 <= self.dx {
            self.err += self.dx;
            self.y += self.sy;
        }
        Some(p)
    }
}
