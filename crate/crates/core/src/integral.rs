//! Summed-area tables and the constant-time-per-pixel dipole filter.
//!
//! Three tables are built once: brightness `b`, `b * x` and `b * y` with
//! absolute coordinates. For a window `R` with `N` pixels and sums `S`,
//! `Sx`, `Sy` the dipole is
//!
//! ```text
//! p_x = (2 * Sx - S * (x0 + x1)) / (2 * N)
//! p_y = (2 * Sy - S * (y0 + y1)) / (2 * N)
//! ```
//!
//! which is the window-relative first moment of the charges recombined from
//! absolute sums. All sums are exact integers, so the only rounding is the
//! final division.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Result;
use crate::image::{Dipole, GrayImage, VectorField};
use crate::window::{Rect, Window};

/// An integral image with a zero guard row and column.
#[derive(Debug, Clone)]
pub struct SummedArea {
    stride: usize,
    table: Vec<u64>,
}

impl SummedArea {
    /// Builds the table of `weight(x, y, b)` over `img`.
    pub fn new(img: &GrayImage, weight: impl Fn(usize, usize, u8) -> u64) -> Self {
        let (w, h) = img.dimensions();
        let stride = w + 1;
        let mut table = vec![0u64; stride * (h + 1)];
        for y in 0..h {
            let mut run = 0u64;
            let (above, row) = table.split_at_mut((y + 1) * stride);
            let above = &above[y * stride..];
            for (x, &b) in img.row(y).iter().enumerate() {
                run += weight(x, y, b);
                row[x + 1] = above[x + 1] + run;
            }
        }
        SummedArea { stride, table }
    }

    /// Sum over the inclusive rectangle.
    #[inline]
    pub fn sum(&self, r: Rect) -> u64 {
        let s = self.stride;
        let t = &self.table;
        let (x0, y0, x1, y1) = (r.x0, r.y0, r.x1 + 1, r.y1 + 1);
        (t[y1 * s + x1] + t[y0 * s + x0]) - (t[y0 * s + x1] + t[y1 * s + x0])
    }
}

/// The three tables behind [`dipole_field_fast`].
///
/// Rows of the field can be evaluated independently with
/// [`DipoleIntegrals::fill_row`], which is how the parallel driver in the
/// `dipole` crate splits the work.
#[derive(Debug, Clone)]
pub struct DipoleIntegrals {
    width: usize,
    height: usize,
    brightness: SummedArea,
    moment_x: SummedArea,
    moment_y: SummedArea,
}

impl DipoleIntegrals {
    /// Builds the tables for `img`.
    pub fn new(img: &GrayImage) -> Self {
        DipoleIntegrals {
            width: img.width(),
            height: img.height(),
            brightness: SummedArea::new(img, |_, _, b| b as u64),
            moment_x: SummedArea::new(img, |x, _, b| b as u64 * x as u64),
            moment_y: SummedArea::new(img, |_, y, b| b as u64 * y as u64),
        }
    }

    /// `(width, height)` of the source image.
    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    /// Dipole of the window at `(x, y)`. The window must fit the image.
    #[inline]
    pub fn dipole(&self, win: Window, x: usize, y: usize) -> Dipole {
        match win.dipole_rect(x, y, self.width, self.height) {
            Some(r) => self.rect_dipole(r),
            None => Dipole::ZERO,
        }
    }

    /// Dipole of the charges inside `r`.
    #[inline]
    pub fn rect_dipole(&self, r: Rect) -> Dipole {
        let n = r.area() as i128;
        if n == 1 {
            return Dipole::ZERO;
        }
        let s = self.brightness.sum(r) as i128;
        let sx = self.moment_x.sum(r) as i128;
        let sy = self.moment_y.sum(r) as i128;
        let nx = 2 * sx - s * (r.x0 + r.x1) as i128;
        let ny = 2 * sy - s * (r.y0 + r.y1) as i128;
        let denom = (2 * n) as f64;
        Dipole::new(nx as f64 / denom, ny as f64 / denom)
    }

    /// Writes row `y` of the field into `xs` and `ys` (each `width` long).
    pub fn fill_row(&self, win: Window, y: usize, xs: &mut [f64], ys: &mut [f64]) {
        for (x, (px, py)) in xs.iter_mut().zip(ys.iter_mut()).enumerate() {
            let d = self.dipole(win, x, y);
            *px = d.px;
            *py = d.py;
        }
    }
}

/// Local dipole field using summed-area tables, `O(1)` per pixel.
///
/// Agrees with [`crate::dipole_field`] (in practice bit for bit, since both
/// reduce to one rounding of the same rational value).
pub fn dipole_field_fast(img: &GrayImage, win: Window) -> Result<VectorField> {
    let (w, h) = img.dimensions();
    win.check(w, h)?;
    let tables = DipoleIntegrals::new(img);
    let mut xs = vec![0.0; w * h];
    let mut ys = vec![0.0; w * h];
    for (y, (rx, ry)) in xs.chunks_mut(w).zip(ys.chunks_mut(w)).enumerate() {
        tables.fill_row(win, y, rx, ry);
    }
    Ok(VectorField::from_parts(w, h, xs, ys))
}
