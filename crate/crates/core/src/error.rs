use core::fmt;

/// Errors produced by the field computations.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The image is smaller than the operation needs.
    ImageTooSmall {
        /// Actual width.
        width: usize,
        /// Actual height.
        height: usize,
        /// Minimum width required.
        min_width: usize,
        /// Minimum height required.
        min_height: usize,
    },
    /// A width or height of zero was requested.
    EmptyImage,
    /// The buffer length does not match `width * height` (times channels).
    BufferLength {
        /// Expected number of elements.
        expected: usize,
        /// Number of elements supplied.
        actual: usize,
    },
    /// A field value was NaN or infinite.
    NonFinite {
        /// Raster index of the offending value.
        index: usize,
    },
    /// Two inputs that must share dimensions do not.
    DimensionMismatch {
        /// Dimensions of the first input.
        left: (usize, usize),
        /// Dimensions of the second input.
        right: (usize, usize),
    },
    /// A numeric parameter is out of its domain.
    InvalidParameter {
        /// Parameter name.
        name: &'static str,
        /// What the parameter must satisfy.
        requirement: &'static str,
    },
}

/// Result alias for this crate.
pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ImageTooSmall {
                width,
                height,
                min_width,
                min_height,
            } => write!(
                f,
                "image is {width}x{height}, needs at least {min_width}x{min_height}"
            ),
            Error::EmptyImage => f.write_str("image dimensions must be at least 1x1"),
            Error::BufferLength { expected, actual } => {
                write!(f, "buffer holds {actual} values, expected {expected}")
            }
            Error::NonFinite { index } => write!(f, "non-finite value at raster index {index}"),
            Error::DimensionMismatch { left, right } => write!(
                f,
                "dimension mismatch: {}x{} vs {}x{}",
                left.0, left.1, right.0, right.1
            ),
            Error::InvalidParameter { name, requirement } => {
                write!(f, "invalid {name}: must be {requirement}")
            }
        }
    }
}

impl core::error::Error for Error {}
