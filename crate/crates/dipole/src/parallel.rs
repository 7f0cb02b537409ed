//! Row-band parallel evaluation of the dipole field.
//!
//! Rows are independent once the summed-area tables exist, so the field is
//! split into rows and handed to rayon. Each value is produced by the same
//! arithmetic as the serial path, so the output does not depend on the
//! number of threads.

use dipole_core::{DipoleIntegrals, GrayImage, Result, VectorField, Window};
use rayon::prelude::*;

/// Same result as [`dipole_core::dipole_field_fast`], computed on the current
/// rayon pool.
pub fn dipole_field_par(img: &GrayImage, win: Window) -> Result<VectorField> {
    let (w, h) = img.dimensions();
    win.check(w, h)?;
    let tables = DipoleIntegrals::new(img);
    let mut xs = vec![0.0; w * h];
    let mut ys = vec![0.0; w * h];
    xs.par_chunks_mut(w)
        .zip(ys.par_chunks_mut(w))
        .enumerate()
        .for_each(|(y, (rx, ry))| tables.fill_row(win, y, rx, ry));
    VectorField::new(w, h, xs, ys)
}
