//! Gradient baseline, perpendicular field and angle statistics between
//! two vector fields.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::image::{Dipole, GrayImage, VectorField};

/// Brightness gradient by central differences, one-sided at the borders.
///
/// Returns `+grad b`, i.e. pointing towards brighter pixels like the dipole
/// field; the electrostatic `E = -grad V` sign is not applied. An axis of
/// length 1 has zero derivative. At least one axis needs three pixels.
pub fn gradient_field(img: &GrayImage) -> Result<VectorField> {
    let (w, h) = img.dimensions();
    if w < 3 && h < 3 {
        return Err(Error::ImageTooSmall {
            width: w,
            height: h,
            min_width: 3,
            min_height: 1,
        });
    }
    let b = |x: usize, y: usize| img.get(x, y) as f64;
    let mut xs = Vec::with_capacity(w * h);
    let mut ys = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            xs.push(derivative(w, x, |k| b(k, y)));
            ys.push(derivative(h, y, |k| b(x, k)));
        }
    }
    Ok(VectorField::from_parts(w, h, xs, ys))
}

fn derivative(len: usize, at: usize, f: impl Fn(usize) -> f64) -> f64 {
    if len < 2 {
        0.0
    } else if at == 0 {
        f(1) - f(0)
    } else if at == len - 1 {
        f(at) - f(at - 1)
    } else {
        (f(at + 1) - f(at - 1)) / 2.0
    }
}

/// Turns every vector a quarter turn: `(px, py) -> (-py, px)`.
///
/// The result runs along edges instead of across them.
pub fn perpendicular_field(field: &VectorField) -> VectorField {
    field.map(|v| v.perpendicular())
}

/// Summary of per-pixel angles between two vector fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularStats {
    /// Median unsigned angle, degrees in `[0, 180]`.
    pub median_angle_deg: f64,
    /// Mean unsigned angle, degrees.
    pub mean_angle_deg: f64,
    /// Number of pixels that passed the magnitude gate.
    pub sample_count: usize,
}

/// Unsigned angle between two non-zero vectors, in degrees.
///
/// `atan2(|a x b|, a . b)` rather than the arccosine of the normalized dot
/// product, which loses about half the digits near 0 and 180 degrees.
pub fn angle_between(a: Dipole, b: Dipole) -> f64 {
    let cross = a.px * b.py - a.py * b.px;
    libm::atan2(cross.abs(), a.dot(b)).to_degrees()
}

/// Compares the directions of `a` and `b` wherever both have magnitude at
/// least `min_magnitude`.
///
/// Pixels where either vector is zero are always skipped. With no samples
/// the angles are reported as 0.
pub fn angular_agreement(a: &VectorField, b: &VectorField, min_magnitude: f64) -> Result<AngularStats> {
    if a.dimensions() != b.dimensions() {
        return Err(Error::DimensionMismatch {
            left: a.dimensions(),
            right: b.dimensions(),
        });
    }
    if min_magnitude.is_nan() || min_magnitude < 0.0 {
        return Err(Error::InvalidParameter {
            name: "min_magnitude",
            requirement: "a non-negative number",
        });
    }
    let mut angles: Vec<f64> = a
        .iter()
        .zip(b.iter())
        .filter(|(u, v)| {
            let (mu, mv) = (u.magnitude(), v.magnitude());
            mu > 0.0 && mv > 0.0 && mu >= min_magnitude && mv >= min_magnitude
        })
        .map(|(u, v)| angle_between(u, v))
        .collect();
    if angles.is_empty() {
        return Ok(AngularStats {
            median_angle_deg: 0.0,
            mean_angle_deg: 0.0,
            sample_count: 0,
        });
    }
    angles.sort_by(f64::total_cmp);
    let n = angles.len();
    let median = if n % 2 == 1 {
        angles[n / 2]
    } else {
        (angles[n / 2 - 1] + angles[n / 2]) / 2.0
    };
    let mean = angles.iter().sum::<f64>() / n as f64;
    Ok(AngularStats {
        median_angle_deg: median,
        mean_angle_deg: mean,
        sample_count: n,
    })
}

/// Like [`angular_agreement`], but each field is gated at `fraction` of its
/// own peak magnitude, so fields on different scales can be compared.
pub fn angular_agreement_relative(a: &VectorField, b: &VectorField, fraction: f64) -> Result<AngularStats> {
    if fraction.is_nan() || fraction < 0.0 {
        return Err(Error::InvalidParameter {
            name: "fraction",
            requirement: "a non-negative number",
        });
    }
    let unit_peak = |f: &VectorField| {
        let peak = f.max_magnitude();
        if peak > 0.0 {
            f.map(|v| Dipole::new(v.px / peak, v.py / peak))
        } else {
            f.clone()
        }
    };
    angular_agreement(&unit_peak(a), &unit_peak(b), fraction)
}
