use alloc::vec::Vec;

use crate::error::{Error, Result};

fn check_dims(width: usize, height: usize) -> Result<usize> {
    if width == 0 || height == 0 {
        return Err(Error::EmptyImage);
    }
    width.checked_mul(height).ok_or(Error::InvalidParameter {
        name: "dimensions",
        requirement: "small enough for width * height to fit in usize",
    })
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

/// A rectangular 8-bit brightness map stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    /// Wraps a row-major pixel buffer.
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        let len = check_dims(width, height)?;
        if pixels.len() != len {
            return Err(Error::BufferLength {
                expected: len,
                actual: pixels.len(),
            });
        }
        Ok(GrayImage {
            width,
            height,
            pixels,
        })
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Result<Self> {
        let len = check_dims(width, height)?;
        let mut pixels = Vec::with_capacity(len);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Ok(GrayImage {
            width,
            height,
            pixels,
        })
    }

    /// An image where every pixel has the value `v`.
    pub fn filled(width: usize, height: usize, v: u8) -> Result<Self> {
        let len = check_dims(width, height)?;
        Ok(GrayImage {
            width,
            height,
            pixels: alloc::vec![v; len],
        })
    }

    /// Width in pixels.
    pub fn width(&self) -> usize {
        self.width
    }

    /// Height in pixels.
    pub fn height(&self) -> usize {
        self.height
    }

    /// `(width, height)`.
    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    /// Brightness at column `x`, row `y`.
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    /// Row-major pixel buffer.
    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    /// One row of pixels.
    pub fn row(&self, y: usize) -> &[u8] {
        &self.pixels[y * self.width..(y + 1) * self.width]
    }

    /// Consumes the image and returns its buffer.
    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }
}

/// A rectangular map of finite real values, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl ScalarField {
    /// Wraps a row-major value buffer. Every value must be finite.
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        let len = check_dims(width, height)?;
        if values.len() != len {
            return Err(Error::BufferLength {
                expected: len,
                actual: values.len(),
            });
        }
        check_finite(&values)?;
        Ok(ScalarField {
            width,
            height,
            values,
        })
    }

    // Callers guarantee length and finiteness.
    pub(crate) fn from_parts(width: usize, height: usize, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), width * height);
        ScalarField {
            width,
            height,
            values,
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

    /// `(width, height)`.
    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    /// Value at column `x`, row `y`.
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    /// Row-major values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Largest value in the field.
    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// A rectangular map of 2-vectors, stored as two row-major component planes.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    width: usize,
    height: usize,
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl VectorField {
    /// Wraps the x and y component planes. Every value must be finite.
    pub fn new(width: usize, height: usize, xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let len = check_dims(width, height)?;
        for plane in [&xs, &ys] {
            if plane.len() != len {
                return Err(Error::BufferLength {
                    expected: len,
                    actual: plane.len(),
                });
            }
            check_finite(plane)?;
        }
        Ok(VectorField { width, height, xs, ys })
    }

    /// A field of zero vectors.
    pub fn zeros(width: usize, height: usize) -> Result<Self> {
        let len = check_dims(width, height)?;
        Ok(VectorField {
            width,
            height,
            xs: alloc::vec![0.0; len],
            ys: alloc::vec![0.0; len],
        })
    }

    pub(crate) fn from_parts(width: usize, height: usize, xs: Vec<f64>, ys: Vec<f64>) -> Self {
        debug_assert_eq!(xs.len(), width * height);
        debug_assert_eq!(ys.len(), width * height);
        VectorField { width, height, xs, ys }
    }

    /// Width in pixels.
    pub fn width(&self) -> usize {
        self.width
    }

    /// Height in pixels.
    pub fn height(&self) -> usize {
        self.height
    }

    /// `(width, height)`.
    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    /// Vector at column `x`, row `y`.
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Dipole {
        let i = y * self.width + x;
        Dipole::new(self.xs[i], self.ys[i])
    }

    /// Row-major x components.
    pub fn x_components(&self) -> &[f64] {
        &self.xs
    }

    /// Row-major y components.
    pub fn y_components(&self) -> &[f64] {
        &self.ys
    }

    /// Iterates vectors in raster order.
    pub fn iter(&self) -> impl Iterator<Item = Dipole> + '_ {
        self.xs
            .iter()
            .zip(&self.ys)
            .map(|(&x, &y)| Dipole::new(x, y))
    }

    /// Applies `f` to every vector.
    pub fn map(&self, mut f: impl FnMut(Dipole) -> Dipole) -> VectorField {
        let mut xs = Vec::with_capacity(self.xs.len());
        let mut ys = Vec::with_capacity(self.ys.len());
        for v in self.iter() {
            let w = f(v);
            xs.push(w.px);
            ys.push(w.py);
        }
        VectorField::from_parts(self.width, self.height, xs, ys)
    }

    /// Largest vector magnitude in the field.
    pub fn max_magnitude(&self) -> f64 {
        self.iter().map(|v| v.magnitude()).fold(0.0, f64::max)
    }

    /// Copies the rectangle `[x0, x0 + width) x [y0, y0 + height)`.
    pub fn crop(&self, x0: usize, y0: usize, width: usize, height: usize) -> Result<VectorField> {
        check_dims(width, height)?;
        if x0 + width > self.width || y0 + height > self.height {
            return Err(Error::DimensionMismatch {
                left: (self.width, self.height),
                right: (x0 + width, y0 + height),
            });
        }
        let mut xs = Vec::with_capacity(width * height);
        let mut ys = Vec::with_capacity(width * height);
        for y in y0..y0 + height {
            let start = y * self.width + x0;
            xs.extend_from_slice(&self.xs[start..start + width]);
            ys.extend_from_slice(&self.ys[start..start + width]);
        }
        Ok(VectorField::from_parts(width, height, xs, ys))
    }

}

/// A dipole moment, or any other 2-vector living in a [`VectorField`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dipole {
    /// Component along the columns (rightwards).
    pub px: f64,
    /// Component along the rows (downwards).
    pub py: f64,
}

impl Dipole {
    /// The zero vector.
    pub const ZERO: Dipole = Dipole { px: 0.0, py: 0.0 };

    /// Builds a vector from its components.
    pub const fn new(px: f64, py: f64) -> Self {
        Dipole { px, py }
    }

    /// Euclidean norm.
    #[inline]
    pub fn magnitude(&self) -> f64 {
        libm::hypot(self.px, self.py)
    }

    /// Dot product.
    #[inline]
    pub fn dot(&self, other: Dipole) -> f64 {
        self.px * other.px + self.py * other.py
    }

    /// The vector turned a quarter turn: `(px, py) -> (-py, px)`.
    #[inline]
    pub fn perpendicular(&self) -> Dipole {
        Dipole::new(-self.py, self.px)
    }
}
