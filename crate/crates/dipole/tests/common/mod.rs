//! Synthetic fixtures shared by the integration tests.
#![allow(dead_code)]

use dipole_core::GrayImage;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_image(rng: &mut ChaCha8Rng, w: usize, h: usize, lo: u8, hi: u8) -> GrayImage {
    GrayImage::from_fn(w, h, |_, _| rng.gen_range(lo..=hi)).unwrap()
}

/// Dark left of column `edge`, bright from `edge` on.
pub fn step_edge(w: usize, h: usize, edge: usize) -> GrayImage {
    GrayImage::from_fn(w, h, |x, _| if x < edge { 0 } else { 255 }).unwrap()
}

pub const DISK_SIZE: usize = 128;
pub const DISK_RADIUS: f64 = 50.0;
pub const DISK_CENTER: f64 = 63.5;

/// Bright filled disk on black, centred between the four middle pixels.
pub fn disk() -> GrayImage {
    GrayImage::from_fn(DISK_SIZE, DISK_SIZE, |x, y| {
        let (dx, dy) = (x as f64 - DISK_CENTER, y as f64 - DISK_CENTER);
        if dx * dx + dy * dy <= DISK_RADIUS * DISK_RADIUS {
            255
        } else {
            0
        }
    })
    .unwrap()
}

/// Separable Gaussian blur with edge clamping, rounded back to bytes.
pub fn gaussian_blur(img: &GrayImage, sigma: f64) -> GrayImage {
    let r = (3.0 * sigma).ceil() as i64;
    let kernel: Vec<f64> = (-r..=r).map(|k| (-(k * k) as f64 / (2.0 * sigma * sigma)).exp()).collect();
    let norm: f64 = kernel.iter().sum();
    let (w, h) = img.dimensions();
    let clamp = |v: i64, n: usize| v.clamp(0, n as i64 - 1) as usize;
    let mut tmp = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            tmp[y * w + x] = kernel
                .iter()
                .enumerate()
                .map(|(i, k)| k * img.get(clamp(x as i64 + i as i64 - r, w), y) as f64)
                .sum::<f64>()
                / norm;
        }
    }
    GrayImage::from_fn(w, h, |x, y| {
        let v: f64 = kernel
            .iter()
            .enumerate()
            .map(|(i, k)| k * tmp[clamp(y as i64 + i as i64 - r, h) * w + x])
            .sum::<f64>()
            / norm;
        v.round().clamp(0.0, 255.0) as u8
    })
    .unwrap()
}

/// Glyph boxes `(x0, y0, x1, y1)` inclusive on the three-glyph sheet.
pub const GLYPH_BOXES: [(usize, usize, usize, usize); 3] = [(12, 14, 29, 33), (52, 12, 71, 35), (92, 14, 111, 33)];

/// White sheet with three separated dark glyphs: a filled square, a plus
/// sign and a filled triangle.
pub fn glyph_sheet() -> GrayImage {
    GrayImage::from_fn(128, 48, |x, y| {
        let square = (12..=29).contains(&x) && (14..=33).contains(&y);
        let plus = ((52..=71).contains(&x) && (21..=26).contains(&y))
            || ((59..=64).contains(&x) && (12..=35).contains(&y));
        // right triangle, hypotenuse along the diagonal
        let tri = (92..=111).contains(&x) && (14..=33).contains(&y) && (x - 92) <= (y - 14);
        if square || plus || tri {
            20
        } else {
            235
        }
    })
    .unwrap()
}

/// Counts 8-connected components by depth-first flood fill.
pub fn flood_fill_count(bits: &[bool], w: usize, h: usize) -> usize {
    let mut seen = vec![false; w * h];
    let mut count = 0;
    for start in 0..w * h {
        if !bits[start] || seen[start] {
            continue;
        }
        count += 1;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(p) = stack.pop() {
            let (x, y) = ((p % w) as i64, (p / w) as i64);
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                        continue;
                    }
                    let q = ny as usize * w + nx as usize;
                    if bits[q] && !seen[q] {
                        seen[q] = true;
                        stack.push(q);
                    }
                }
            }
        }
    }
    count
}

/// Quarter turn of the picture: `(x, y)` moves to `(y, w - 1 - x)`.
pub fn rot90(img: &GrayImage) -> GrayImage {
    let (w, h) = img.dimensions();
    GrayImage::from_fn(h, w, |nx, ny| img.get(w - 1 - ny, nx)).unwrap()
}
