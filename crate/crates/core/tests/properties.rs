use dipole_core::analysis::{angle_between, perpendicular_field};
use dipole_core::render::{render_overlay, tone_map, CellDipole, LineLength, OverlayConfig, RgbImage};
use dipole_core::segment::{
    connected_components, domains_from_field, threshold_mask, BinaryMask, Connectivity, DomainParams,
};
use dipole_core::*;
use proptest::prelude::*;

fn window() -> impl Strategy<Value = Window> {
    prop_oneof![
        Just(Window::Block2x2),
        (1usize..4, 1usize..4).prop_map(|(i, j)| Window::radius(i, j).unwrap()),
    ]
}

fn image(max_side: usize) -> impl Strategy<Value = GrayImage> {
    (2..=max_side, 2..=max_side).prop_flat_map(|(w, h)| {
        proptest::collection::vec(any::<u8>(), w * h).prop_map(move |px| GrayImage::new(w, h, px).unwrap())
    })
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

// The dipole sum with float charges and coordinates measured from an arbitrary origin.
fn dipole_with_origin(img: &GrayImage, r: Rect, ox: f64, oy: f64) -> (f64, f64) {
    let n = r.area() as f64;
    let mut s = 0.0;
    for y in r.y0..=r.y1 {
        for x in r.x0..=r.x1 {
            s += img.get(x, y) as f64;
        }
    }
    let m = s / n;
    let (mut px, mut py) = (0.0, 0.0);
    for y in r.y0..=r.y1 {
        for x in r.x0..=r.x1 {
            let q = img.get(x, y) as f64 - m;
            px += q * (x as f64 - ox);
            py += q * (y as f64 - oy);
        }
    }
    (px / n, py / n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn net_charge_vanishes(img in image(12), win in window()) {
        let (w, h) = img.dimensions();
        let mean = local_mean(&img, win).unwrap();
        for y in 0..h {
            for x in 0..w {
                let r = win.mean_rect(x, y, w, h);
                let m = mean.get(x, y);
                let mut sum = 0.0;
                for yy in r.y0..=r.y1 {
                    for xx in r.x0..=r.x1 {
                        sum += img.get(xx, yy) as f64 - m;
                    }
                }
                prop_assert!(sum.abs() <= 1e-9 * r.area() as f64 * 255.0);
            }
        }
    }

    #[test]
    fn charge_bounds(img in image(10), win in window()) {
        let m = local_mean(&img, win).unwrap();
        prop_assert!(m.values().iter().all(|&v| (0.0..=255.0).contains(&v)));
        let q = charge_map(&img, win).unwrap();
        prop_assert!(q.values().iter().all(|&v| (-255.0..=255.0).contains(&v)));
    }

    #[test]
    fn offset_invariance(img in image(10), win in window(), c in -60i32..60) {
        let lo = *img.pixels().iter().min().unwrap() as i32;
        let hi = *img.pixels().iter().max().unwrap() as i32;
        prop_assume!(lo + c >= 0 && hi + c <= 255);
        let shifted = GrayImage::from_fn(img.width(), img.height(), |x, y| (img.get(x, y) as i32 + c) as u8).unwrap();
        let a = dipole_field(&img, win).unwrap();
        let b = dipole_field(&shifted, win).unwrap();
        for (u, v) in a.iter().zip(b.iter()) {
            prop_assert!((u.px - v.px).abs() <= 1e-9 && (u.py - v.py).abs() <= 1e-9);
        }
        let qa = charge_map(&img, win).unwrap();
        let qb = charge_map(&shifted, win).unwrap();
        for (u, v) in qa.values().iter().zip(qb.values()) {
            prop_assert!((u - v).abs() <= 1e-9);
        }
    }

    #[test]
    fn homogeneity(quarter in image(10), win in window()) {
        // multiples of 4 so that s * b stays integral for s in {1/4, 1/2}
        let img = GrayImage::from_fn(quarter.width(), quarter.height(), |x, y| quarter.get(x, y) / 4 * 4).unwrap();
        let base = dipole_field(&img, win).unwrap();
        for (s, div) in [(0.25, 4u8), (0.5, 2)] {
            let scaled = GrayImage::from_fn(img.width(), img.height(), |x, y| img.get(x, y) / div).unwrap();
            let f = dipole_field(&scaled, win).unwrap();
            for (u, v) in f.iter().zip(base.iter()) {
                prop_assert!(rel_close(u.px, s * v.px, 1e-9) && rel_close(u.py, s * v.py, 1e-9));
            }
        }
    }

    #[test]
    fn origin_independence(img in image(9), win in window(), ox in -500.0f64..500.0, oy in -500.0f64..500.0) {
        let (w, h) = img.dimensions();
        let f = dipole_field(&img, win).unwrap();
        for y in 0..h {
            for x in 0..w {
                let Some(r) = win.dipole_rect(x, y, w, h) else { continue };
                if r.area() == 1 { continue; }
                let (px, py) = dipole_with_origin(&img, r, ox, oy);
                let d = f.get(x, y);
                prop_assert!((d.px - px).abs() <= 1e-9, "{} vs {}", d.px, px);
                prop_assert!((d.py - py).abs() <= 1e-9, "{} vs {}", d.py, py);
            }
        }
    }

    #[test]
    fn fast_path_matches(img in image(20), win in window()) {
        let a = dipole_field(&img, win).unwrap();
        let b = dipole_field_fast(&img, win).unwrap();
        for (u, v) in a.iter().zip(b.iter()) {
            prop_assert!(rel_close(u.px, v.px, 1e-6) && rel_close(u.py, v.py, 1e-6));
        }
    }

    #[test]
    fn magnitude_rotation_invariant(img in image(8), theta in 0.0f64..std::f64::consts::TAU) {
        let f = dipole_field(&img, Window::Block2x2).unwrap();
        let (s, c) = theta.sin_cos();
        let rotated = VectorField::new(
            f.width(),
            f.height(),
            f.iter().map(|v| c * v.px - s * v.py).collect(),
            f.iter().map(|v| s * v.px + c * v.py).collect(),
        ).unwrap();
        let m1 = magnitude_field(&f);
        let m2 = magnitude_field(&rotated);
        for (a, b) in m1.values().iter().zip(m2.values()) {
            prop_assert!((a - b).abs() <= 1e-9);
            prop_assert!(*a >= 0.0);
        }
    }

    #[test]
    fn perpendicular_algebra(img in image(8), win in window()) {
        let f = dipole_field(&img, win).unwrap();
        let p = perpendicular_field(&f);
        let pp = perpendicular_field(&p);
        for ((v, q), qq) in f.iter().zip(p.iter()).zip(pp.iter()) {
            prop_assert_eq!(q.dot(v), 0.0);
            prop_assert_eq!(qq, Dipole::new(-v.px, -v.py));
            prop_assert_eq!(q.magnitude(), v.magnitude());
        }
    }

    #[test]
    fn tone_map_monotone_and_scale_free(values in proptest::collection::vec(0.0f64..1e4, 1..40), alpha in 0.1f64..3.0, c in 0.01f64..100.0, k in -20i32..20) {
        let n = values.len();
        let mag = ScalarField::new(n, 1, values.clone()).unwrap();
        let out = tone_map(&mag, alpha).unwrap();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        for pair in order.windows(2) {
            prop_assert!(out.pixels()[pair[0]] <= out.pixels()[pair[1]]);
        }
        if mag.max() > 0.0 {
            prop_assert_eq!(*out.pixels().iter().max().unwrap(), 255);
        }
        let scaled = ScalarField::new(n, 1, values.iter().map(|v| v * c).collect()).unwrap();
        let out2 = tone_map(&scaled, alpha).unwrap();
        let pow2 = ScalarField::new(n, 1, values.iter().map(|v| v * 2f64.powi(k)).collect()).unwrap();
        prop_assert_eq!(&tone_map(&pow2, alpha).unwrap(), &out);
        // a general factor can move P / P_max by one ulp across a rounding boundary
        for (a, b) in out.pixels().iter().zip(out2.pixels()) {
            prop_assert!((*a as i32 - *b as i32).abs() <= 1);
        }
    }

    #[test]
    fn threshold_monotone(values in proptest::collection::vec(0.0f64..100.0, 1..50), t1 in 0.0f64..100.0, t2 in 0.0f64..100.0) {
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let f = ScalarField::new(values.len(), 1, values).unwrap();
        let a = threshold_mask(&f, lo);
        let b = threshold_mask(&f, hi);
        for (x, y) in a.bits().iter().zip(b.bits()) {
            prop_assert!(!*y || *x);
        }
    }

    #[test]
    fn labels_match_flood_fill(bits in proptest::collection::vec(any::<bool>(), 1..200), w in 1usize..16) {
        let h = bits.len() / w;
        prop_assume!(h >= 1);
        let bits = bits[..w * h].to_vec();
        let mask = BinaryMask::new(w, h, bits.clone()).unwrap();
        for conn in [Connectivity::Four, Connectivity::Eight] {
            let labels = connected_components(&mask, conn);
            let oracle = flood_labels(&bits, w, h, conn == Connectivity::Eight);
            prop_assert_eq!(labels.labels(), &oracle[..]);
        }
    }

    #[test]
    fn domains_partition_the_mask(img in image(24), win in window(), frac in 0.0f64..0.5) {
        let field = dipole_field_fast(&img, win).unwrap();
        let tau = frac * field.max_magnitude();
        let mut params = DomainParams { window: win, ..DomainParams::with_tau(tau) };
        params.min_pixels = 1;
        let domains = domains_from_field(&field, &params).unwrap();
        let mask = threshold_mask(&magnitude_field(&field), tau);
        let (w, h) = img.dimensions();
        let mut cover = vec![0u32; w * h];
        for d in &domains {
            prop_assert_eq!(d.pixel_count, d.mask.count());
            for by in 0..d.bbox.height() {
                for bx in 0..d.bbox.width() {
                    if d.mask.get(bx, by) {
                        cover[(d.bbox.y0 + by) * w + d.bbox.x0 + bx] += 1;
                    }
                    let v = d.dipoles.get(bx, by);
                    let p = d.perpendiculars.get(bx, by);
                    prop_assert!(v.dot(p).abs() <= 1e-9);
                }
            }
        }
        for (c, &m) in cover.iter().zip(mask.bits()) {
            prop_assert_eq!(*c, m as u32);
        }
    }

    #[test]
    fn overlay_lines_are_undirected(px in -10.0f64..10.0, py in -10.0f64..10.0, size in 2usize..40, scaled in any::<bool>()) {
        prop_assume!(px != 0.0 || py != 0.0);
        let img = GrayImage::filled(size, size, 90).unwrap();
        let cell = Rect { x0: 0, y0: 0, x1: size - 1, y1: size - 1 };
        let cfg = OverlayConfig {
            cell_size: size,
            threshold: Threshold::Absolute(0.0),
            line_length: if scaled { LineLength::MagnitudeScaled } else { LineLength::FixedFraction },
            ..OverlayConfig::default()
        };
        let draw = |d: Dipole| {
            render_overlay(&img, &[CellDipole { cell, center: (size / 2, size / 2), dipole: d }], &cfg)
        };
        let a = draw(Dipole::new(px, py));
        let b = draw(Dipole::new(-px, -py));
        prop_assert_eq!(&a, &b);
        let base = RgbImage::from_gray(&img);
        for y in 0..size {
            for x in 0..size {
                let p = a.get(x, y);
                prop_assert!(p == base.get(x, y) || p == cfg.line_color);
            }
        }
    }
}

fn flood_labels(bits: &[bool], w: usize, h: usize, eight: bool) -> Vec<u32> {
    let mut labels = vec![0u32; w * h];
    let mut next = 0;
    for start in 0..w * h {
        if !bits[start] || labels[start] != 0 {
            continue;
        }
        next += 1;
        labels[start] = next;
        let mut stack = vec![start];
        while let Some(p) = stack.pop() {
            let (x, y) = ((p % w) as i64, (p / w) as i64);
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    if (dx == 0 && dy == 0) || (!eight && dx != 0 && dy != 0) {
                        continue;
                    }
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                        continue;
                    }
                    let q = ny as usize * w + nx as usize;
                    if bits[q] && labels[q] == 0 {
                        labels[q] = next;
                        stack.push(q);
                    }
                }
            }
        }
    }
    labels
}

#[test]
fn step_edge_points_to_bright_side() {
    let img = GrayImage::from_fn(16, 8, |x, _| if x < 8 { 10 } else { 200 }).unwrap();
    for win in [Window::Block2x2, Window::radius(1, 1).unwrap(), Window::radius(2, 3).unwrap()] {
        let f = dipole_field(&img, win).unwrap();
        let p = perpendicular_field(&f);
        for y in 0..8 {
            let d = f.get(7, y);
            if win == Window::Block2x2 && y == 7 {
                assert_eq!(d, Dipole::ZERO);
                continue;
            }
            assert_eq!(d.py, 0.0, "{win}");
            assert!(d.px > 0.0, "{win}");
            assert!(p.get(7, y).px.abs() <= 1e-9);
        }
    }
}

#[test]
fn component_count_translation_invariant() {
    let glyphs = |dx: usize, dy: usize| {
        GrayImage::from_fn(60, 40, |x, y| {
            let (x, y) = (x as i64 - dx as i64, y as i64 - dy as i64);
            let a = (5..12).contains(&x) && (5..15).contains(&y);
            let b = (20..24).contains(&x) && (4..20).contains(&y);
            let c = (30..40).contains(&x) && (8..12).contains(&y);
            if a || b || c { 0 } else { 255 }
        })
        .unwrap()
    };
    let count = |img: &GrayImage| {
        let f = dipole_field_fast(img, Window::Block2x2).unwrap();
        let m = threshold_mask(&magnitude_field(&f), 10.0);
        connected_components(&m, Connectivity::Eight).count()
    };
    let base = count(&glyphs(0, 0));
    assert_eq!(base, 3);
    for (dx, dy) in [(1, 0), (0, 3), (7, 9), (13, 11)] {
        assert_eq!(count(&glyphs(dx, dy)), base);
    }
}

#[test]
fn angle_between_is_unsigned() {
    let a = Dipole::new(1.0, 0.0);
    assert!((angle_between(a, Dipole::new(0.0, -1.0)) - 90.0).abs() < 1e-12);
    assert!((angle_between(a, Dipole::new(-1.0, 1e-12)) - 180.0).abs() < 1e-6);
}
