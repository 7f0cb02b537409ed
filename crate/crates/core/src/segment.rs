//! Splitting an image into sign domains by thresholding the dipole magnitude.

use alloc::vec;
use alloc::vec::Vec;

use crate::analysis::perpendicular_field;
use crate::error::{Error, Result};
use crate::image::{GrayImage, ScalarField, VectorField};
use crate::integral::dipole_field_fast;
use crate::window::{Rect, Window};
use crate::dipole::magnitude_field;

/// Smallest domain kept by default.
pub const DEFAULT_MIN_PIXELS: usize = 4;

/// A row-major boolean image.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    /// Wraps a row-major buffer of bits.
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyImage);
        }
        if bits.len() != width * height {
            return Err(Error::BufferLength {
                expected: width * height,
                actual: bits.len(),
            });
        }
        Ok(BinaryMask { width, height, bits })
    }

    /// Width in pixels.
    pub fn width(&self) -> usize {
        self.width
    }

    /// Height in pixels.
    pub fn height(&self) -> usize {
        self.height
    }

    /// Bit at column `x`, row `y`.
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    /// Row-major bits.
    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Number of set bits.
    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// Sets every pixel whose magnitude is at least `tau`.
pub fn threshold_mask(mag: &ScalarField, tau: f64) -> BinaryMask {
    BinaryMask {
        width: mag.width(),
        height: mag.height(),
        bits: mag.values().iter().map(|&p| p >= tau).collect(),
    }
}

/// Pixel adjacency used when labelling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Connectivity {
    /// Edge neighbours only.
    Four,
    /// Edge and corner neighbours.
    #[default]
    Eight,
}

impl TryFrom<u8> for Connectivity {
    type Error = Error;

    fn try_from(n: u8) -> Result<Self> {
        match n {
            4 => Ok(Connectivity::Four),
            8 => Ok(Connectivity::Eight),
            _ => Err(Error::InvalidParameter {
                name: "connectivity",
                requirement: "4 or 8",
            }),
        }
    }
}

/// Component labels: 0 for background, `1..=count` otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    count: usize,
}

impl LabelMap {
    /// Width in pixels.
    pub fn width(&self) -> usize {
        self.width
    }

    /// Height in pixels.
    pub fn height(&self) -> usize {
        self.height
    }

    /// Label at column `x`, row `y`.
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    /// Row-major labels.
    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Number of components.
    pub fn count(&self) -> usize {
        self.count
    }
}

fn find(parent: &mut [u32], mut i: u32) -> u32 {
    while parent[i as usize] != i {
        let up = parent[parent[i as usize] as usize];
        parent[i as usize] = up;
        i = up;
    }
    i
}

fn union(parent: &mut [u32], a: u32, b: u32) -> u32 {
    let (ra, rb) = (find(parent, a), find(parent, b));
    let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
    parent[hi as usize] = lo;
    lo
}

/// Two-pass union-find labelling.
///
/// Labels are dense and numbered in the raster order in which each component
/// is first met, so the output is fully determined by the mask.
pub fn connected_components(mask: &BinaryMask, connectivity: Connectivity) -> LabelMap {
    let (w, h) = (mask.width, mask.height);
    let mut provisional = vec![0u32; w * h];
    // parent[0] is the unused background slot
    let mut parent: Vec<u32> = vec![0];

    for y in 0..h {
        for x in 0..w {
            if !mask.get(x, y) {
                continue;
            }
            let mut neighbours = [0u32; 4];
            let mut n = 0;
            let mut look = |nx: usize, ny: usize| {
                let l = provisional[ny * w + nx];
                if l != 0 {
                    neighbours[n] = l;
                    n += 1;
                }
            };
            if x > 0 {
                look(x - 1, y);
            }
            if y > 0 {
                look(x, y - 1);
                if connectivity == Connectivity::Eight {
                    if x > 0 {
                        look(x - 1, y - 1);
                    }
                    if x + 1 < w {
                        look(x + 1, y - 1);
                    }
                }
            }
            let label = if n == 0 {
                let l = parent.len() as u32;
                parent.push(l);
                l
            } else {
                let mut root = neighbours[0];
                for &other in &neighbours[1..n] {
                    root = union(&mut parent, root, other);
                }
                find(&mut parent, root)
            };
            provisional[y * w + x] = label;
        }
    }

    let mut dense = vec![0u32; parent.len()];
    let mut count = 0u32;
    for l in provisional.iter_mut() {
        if *l == 0 {
            continue;
        }
        let root = find(&mut parent, *l) as usize;
        if dense[root] == 0 {
            count += 1;
            dense[root] = count;
        }
        *l = dense[root];
    }
    LabelMap {
        width: w,
        height: h,
        labels: provisional,
        count: count as usize,
    }
}

/// One connected region of strong dipoles, meant to contain one sign.
#[derive(Debug, Clone, PartialEq)]
pub struct SignDomain {
    /// Component label, starting at 1.
    pub label: u32,
    /// Bounding box in image coordinates.
    pub bbox: Rect,
    /// Membership bits over the bounding box.
    pub mask: BinaryMask,
    /// Number of member pixels.
    pub pixel_count: usize,
    /// Dipoles over the bounding box, zero outside the domain.
    pub dipoles: VectorField,
    /// Quarter-turned `dipoles`.
    pub perpendiculars: VectorField,
}

/// Options for [`extract_domains`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainParams {
    /// Dipole window.
    pub window: Window,
    /// Magnitude threshold (inclusive).
    pub tau: f64,
    /// Pixel adjacency.
    pub connectivity: Connectivity,
    /// Components with fewer pixels are dropped.
    pub min_pixels: usize,
}

impl DomainParams {
    /// Defaults for everything except the threshold.
    pub fn with_tau(tau: f64) -> Self {
        DomainParams {
            window: Window::Block2x2,
            tau,
            connectivity: Connectivity::Eight,
            min_pixels: DEFAULT_MIN_PIXELS,
        }
    }
}

/// Dipole field, magnitude, threshold, labelling, then one [`SignDomain`]
/// per component with at least `min_pixels` pixels, sorted by label.
pub fn extract_domains(img: &GrayImage, params: &DomainParams) -> Result<Vec<SignDomain>> {
    let field = dipole_field_fast(img, params.window)?;
    domains_from_field(&field, params)
}

/// The back half of [`extract_domains`] for a precomputed dipole field.
pub fn domains_from_field(field: &VectorField, params: &DomainParams) -> Result<Vec<SignDomain>> {
    if params.min_pixels == 0 {
        return Err(Error::InvalidParameter {
            name: "min_pixels",
            requirement: "at least 1",
        });
    }
    if params.tau.is_nan() || params.tau < 0.0 {
        return Err(Error::InvalidParameter {
            name: "tau",
            requirement: "a non-negative number",
        });
    }
    let mask = threshold_mask(&magnitude_field(field), params.tau);
    let labels = connected_components(&mask, params.connectivity);
    let (w, h) = field.dimensions();

    let mut boxes: Vec<Option<(Rect, usize)>> = vec![None; labels.count()];
    for y in 0..h {
        for x in 0..w {
            let l = labels.get(x, y);
            if l == 0 {
                continue;
            }
            let slot = &mut boxes[l as usize - 1];
            match slot {
                None => {
                    *slot = Some((
                        Rect {
                            x0: x,
                            y0: y,
                            x1: x,
                            y1: y,
                        },
                        1,
                    ))
                }
                Some((r, n)) => {
                    r.x0 = r.x0.min(x);
                    r.x1 = r.x1.max(x);
                    r.y1 = y;
                    *n += 1;
                }
            }
        }
    }

    let mut out = Vec::new();
    for (i, slot) in boxes.into_iter().enumerate() {
        let Some((bbox, pixel_count)) = slot else { continue };
        if pixel_count < params.min_pixels {
            continue;
        }
        let label = i as u32 + 1;
        let (bw, bh) = (bbox.width(), bbox.height());
        let mut bits = Vec::with_capacity(bw * bh);
        let mut xs = Vec::with_capacity(bw * bh);
        let mut ys = Vec::with_capacity(bw * bh);
        for y in bbox.y0..=bbox.y1 {
            for x in bbox.x0..=bbox.x1 {
                let inside = labels.get(x, y) == label;
                bits.push(inside);
                let d = field.get(x, y);
                xs.push(if inside { d.px } else { 0.0 });
                ys.push(if inside { d.py } else { 0.0 });
            }
        }
        let dipoles = VectorField::from_parts(bw, bh, xs, ys);
        let perpendiculars = perpendicular_field(&dipoles);
        out.push(SignDomain {
            label,
            bbox,
            mask: BinaryMask {
                width: bw,
                height: bh,
                bits,
            },
            pixel_count,
            dipoles,
            perpendiculars,
        });
    }
    Ok(out)
}
