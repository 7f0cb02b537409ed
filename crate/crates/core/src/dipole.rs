//! Local means, charges and dipoles evaluated window by window.
//!
//! [`dipole_field`] is the direct evaluation: for every pixel it walks the
//! window, forms the charges against the window mean and sums their first
//! moment. It costs `O(N)` per pixel and is the reference the integral-image
//! path in [`crate::integral`] is checked against.

use alloc::vec::Vec;

use crate::error::Result;
use crate::image::{Dipole, GrayImage, ScalarField, VectorField};
use crate::integral::SummedArea;
use crate::window::{Rect, Window};

/// Mean brightness over the window at every pixel.
///
/// 2x2 blocks on the last row or column are shifted inwards so every mean is
/// over four real pixels; radius windows are clipped at the border.
pub fn local_mean(img: &GrayImage, win: Window) -> Result<ScalarField> {
    let (w, h) = img.dimensions();
    win.check(w, h)?;
    let sums = SummedArea::new(img, |_, _, v| v as u64);
    let mut values = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let r = win.mean_rect(x, y, w, h);
            values.push(sums.sum(r) as f64 / r.area() as f64);
        }
    }
    Ok(ScalarField::from_parts(w, h, values))
}

/// Per-pixel charge `b - M`: brightness minus the local mean.
pub fn charge_map(img: &GrayImage, win: Window) -> Result<ScalarField> {
    let mean = local_mean(img, win)?;
    let values = img
        .pixels()
        .iter()
        .zip(mean.values())
        .map(|(&b, &m)| b as f64 - m)
        .collect();
    Ok(ScalarField::from_parts(img.width(), img.height(), values))
}

/// Dipole of the charges inside `r`, with coordinates relative to its corner.
///
/// Charges are scaled by the pixel count `N` (so `N * q = N * b - S` is an
/// integer) and the result is divided by `N^2` once at the end.
pub(crate) fn rect_dipole(img: &GrayImage, r: Rect) -> Dipole {
    let n = r.area() as i128;
    if n == 1 {
        return Dipole::ZERO;
    }
    let mut total: i128 = 0;
    for y in r.y0..=r.y1 {
        for &b in &img.row(y)[r.x0..=r.x1] {
            total += b as i128;
        }
    }
    let (mut mx, mut my) = (0i128, 0i128);
    for (dy, y) in (r.y0..=r.y1).enumerate() {
        for (dx, &b) in img.row(y)[r.x0..=r.x1].iter().enumerate() {
            let scaled_charge = n * b as i128 - total;
            mx += scaled_charge * dx as i128;
            my += scaled_charge * dy as i128;
        }
    }
    let denom = (n * n) as f64;
    Dipole::new(mx as f64 / denom, my as f64 / denom)
}

/// The dipole of the window at a single pixel, by direct summation.
pub fn dipole_at(img: &GrayImage, win: Window, x: usize, y: usize) -> Result<Dipole> {
    let (w, h) = img.dimensions();
    win.check(w, h)?;
    Ok(match win.dipole_rect(x, y, w, h) {
        Some(r) => rect_dipole(img, r),
        None => Dipole::ZERO,
    })
}

/// Local dipole field by direct summation over every window.
///
/// `p = (1/N) * sum q(k, l) * (x_kl, y_kl)` with `q` taken against the mean of
/// the same window and coordinates relative to the window corner. Since the
/// charges of a window sum to zero the choice of origin does not matter.
pub fn dipole_field(img: &GrayImage, win: Window) -> Result<VectorField> {
    let (w, h) = img.dimensions();
    win.check(w, h)?;
    let mut xs = Vec::with_capacity(w * h);
    let mut ys = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let d = match win.dipole_rect(x, y, w, h) {
                Some(r) => rect_dipole(img, r),
                None => Dipole::ZERO,
            };
            xs.push(d.px);
            ys.push(d.py);
        }
    }
    Ok(VectorField::from_parts(w, h, xs, ys))
}

/// Euclidean norm of every vector.
pub fn magnitude_field(field: &VectorField) -> ScalarField {
    let values = field.iter().map(|v| v.magnitude()).collect();
    ScalarField::from_parts(field.width(), field.height(), values)
}

/// Brightness-weighted mean position of the whole image, origin top-left.
///
/// Uses raw brightness rather than charges, so unlike the local field it
/// depends on where the origin is.
pub fn whole_image_dipole(img: &GrayImage) -> Dipole {
    let (w, h) = img.dimensions();
    let (mut sx, mut sy) = (0u128, 0u128);
    for y in 0..h {
        for (x, &b) in img.row(y).iter().enumerate() {
            sx += b as u128 * x as u128;
            sy += b as u128 * y as u128;
        }
    }
    let n = (w * h) as f64;
    Dipole::new(sx as f64 / n, sy as f64 / n)
}
