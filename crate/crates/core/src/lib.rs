//! Local dipole-moment vector fields over grayscale images.
//!
//! Every pixel is treated as a "charge" equal to its brightness minus the mean
//! brightness of a small window around it. The first moment of those charges
//! over the window is a vector pointing towards the brighter side, which makes
//! it a drop-in alternative to the brightness gradient: its magnitude is an
//! edge strength and its direction crosses boundaries.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, threading and the
//! command line live in the companion `dipole` crate.
//!
//! Coordinates: `x` is the column index growing rightwards, `y` the row index
//! growing downwards, origin at the top-left pixel.
#![no_std]
#![deny(missing_docs)]

extern crate alloc;

pub mod analysis;
mod dipole;
mod error;
mod image;
pub mod integral;
pub mod render;
pub mod segment;
mod window;

pub use crate::dipole::{
    charge_map, dipole_at, dipole_field, local_mean, magnitude_field, whole_image_dipole,
};
pub use crate::error::{Error, Result};
pub use crate::image::{Dipole, GrayImage, ScalarField, VectorField};
pub use crate::integral::{dipole_field_fast, DipoleIntegrals};
pub use crate::window::{Rect, Window};

/// Fraction of the peak magnitude used when a threshold is left on "auto".
pub const AUTO_THRESHOLD_FRACTION: f64 = 0.05;

/// A magnitude threshold, either absolute or relative to the peak.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    /// Keep magnitudes `>= value`.
    Absolute(f64),
    /// Keep magnitudes `>= fraction * peak`.
    FractionOfMax(f64),
}

impl Default for Threshold {
    /// 5% of the peak.
    fn default() -> Self {
        Threshold::FractionOfMax(AUTO_THRESHOLD_FRACTION)
    }
}

impl Threshold {
    /// The absolute cut-off given the peak magnitude.
    pub fn resolve(&self, peak: f64) -> f64 {
        match *self {
            Threshold::Absolute(v) => v,
            Threshold::FractionOfMax(f) => f * peak,
        }
    }
}
