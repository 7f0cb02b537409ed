use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

/// An inclusive pixel rectangle `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rect {
    /// First column.
    pub x0: usize,
    /// First row.
    pub y0: usize,
    /// Last column (inclusive).
    pub x1: usize,
    /// Last row (inclusive).
    pub y1: usize,
}

impl Rect {
    /// Number of columns.
    pub fn width(&self) -> usize {
        self.x1 - self.x0 + 1
    }

    /// Number of rows.
    pub fn height(&self) -> usize {
        self.y1 - self.y0 + 1
    }

    /// Number of pixels covered.
    pub fn area(&self) -> usize {
        self.width() * self.height()
    }

    /// Whether `(x, y)` lies inside.
    pub fn contains(&self, x: usize, y: usize) -> bool {
        (self.x0..=self.x1).contains(&x) && (self.y0..=self.y1).contains(&y)
    }
}

/// The neighborhood over which means, charges and dipoles are taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Window {
    /// The four pixels `(x, y), (x+1, y), (x, y+1), (x+1, y+1)` anchored at
    /// the top-left pixel.
    #[default]
    Block2x2,
    /// `(2 * delta_i + 1)` rows by `(2 * delta_j + 1)` columns centred on
    /// the pixel, clipped at the image border.
    Radius {
        /// Row half-extent.
        delta_i: usize,
        /// Column half-extent.
        delta_j: usize,
    },
}

impl Window {
    /// A symmetric window; both half-extents must be at least 1.
    pub fn radius(delta_i: usize, delta_j: usize) -> Result<Self> {
        if delta_i == 0 || delta_j == 0 {
            return Err(Error::InvalidParameter {
                name: "window radius",
                requirement: "at least 1 in both directions",
            });
        }
        Ok(Window::Radius { delta_i, delta_j })
    }

    /// Smallest `(width, height)` image the window can be applied to.
    pub fn min_size(&self) -> (usize, usize) {
        match self {
            Window::Block2x2 => (2, 2),
            Window::Radius { .. } => (1, 1),
        }
    }

    /// Fails with [`Error::ImageTooSmall`] if the window does not fit.
    pub fn check(&self, width: usize, height: usize) -> Result<()> {
        if let Window::Radius { delta_i, delta_j } = *self {
            if delta_i == 0 || delta_j == 0 {
                return Err(Error::InvalidParameter {
                    name: "window radius",
                    requirement: "at least 1 in both directions",
                });
            }
        }
        let (min_width, min_height) = self.min_size();
        if width < min_width || height < min_height {
            return Err(Error::ImageTooSmall {
                width,
                height,
                min_width,
                min_height,
            });
        }
        Ok(())
    }

    /// The rectangle a dipole at `(x, y)` is taken over, or `None` where the
    /// dipole is defined as zero (the last row and column of a 2x2 block).
    #[inline]
    pub fn dipole_rect(&self, x: usize, y: usize, width: usize, height: usize) -> Option<Rect> {
        match *self {
            Window::Block2x2 => {
                if x + 1 >= width || y + 1 >= height {
                    None
                } else {
                    Some(Rect {
                        x0: x,
                        y0: y,
                        x1: x + 1,
                        y1: y + 1,
                    })
                }
            }
            Window::Radius { .. } => Some(self.mean_rect(x, y, width, height)),
        }
    }

    /// The rectangle the local mean at `(x, y)` is taken over.
    ///
    /// 2x2 blocks that would hang off the bottom or right edge are shifted
    /// back inside the image so the mean is always over four pixels.
    #[inline]
    pub fn mean_rect(&self, x: usize, y: usize, width: usize, height: usize) -> Rect {
        match *self {
            Window::Block2x2 => {
                let x0 = x.min(width.saturating_sub(2));
                let y0 = y.min(height.saturating_sub(2));
                Rect {
                    x0,
                    y0,
                    x1: (x0 + 1).min(width - 1),
                    y1: (y0 + 1).min(height - 1),
                }
            }
            Window::Radius { delta_i, delta_j } => Rect {
                x0: x.saturating_sub(delta_j),
                y0: y.saturating_sub(delta_i),
                x1: (x + delta_j).min(width - 1),
                y1: (y + delta_i).min(height - 1),
            },
        }
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Window::Block2x2 => f.write_str("2x2"),
            Window::Radius { delta_i, delta_j } => write!(f, "r{delta_i}x{delta_j}"),
        }
    }
}

/// Parses `2x2` or `r<delta_i>x<delta_j>`.
impl FromStr for Window {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        const BAD: Error = Error::InvalidParameter {
            name: "window",
            requirement: "\"2x2\" or \"r<delta_i>x<delta_j>\" with both deltas >= 1",
        };
        if s == "2x2" {
            return Ok(Window::Block2x2);
        }
        let rest = s.strip_prefix('r').ok_or(BAD)?;
        let (a, b) = rest.split_once('x').ok_or(BAD)?;
        let digits = |t: &str| !t.is_empty() && t.bytes().all(|c| c.is_ascii_digit());
        if !digits(a) || !digits(b) {
            return Err(BAD);
        }
        let delta_i = a.parse().map_err(|_| BAD)?;
        let delta_j = b.parse().map_err(|_| BAD)?;
        Window::radius(delta_i, delta_j).map_err(|_| BAD)
    }
}
