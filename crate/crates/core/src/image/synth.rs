//! Deterministic synthetic grayscale images.

use super::GrayImage;
use crate::dense::GaussianSampler;

fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> GrayImage {
    let mut pixels = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            pixels.push(f(x, y).round().clamp(0.0, 255.0) as u8);
        }
    }
    GrayImage::new(width, height, pixels).expect("positive dimensions")
}

pub fn constant(width: usize, height: usize, value: u8) -> GrayImage {
    GrayImage::new(width, height, vec![value; width * height]).expect("positive dimensions")
}

/// Diagonal ramp covering 0..=255.
pub fn gradient(width: usize, height: usize) -> GrayImage {
    let span = (width + height).saturating_sub(2).max(1) as f64;
    from_fn(width, height, |x, y| 255.0 * (x + y) as f64 / span)
}

/// Sum of `rank` outer products of small non-negative integer vectors.
/// Every pixel is an exact integer, so the image has rank `rank` with no
/// quantization error.
pub fn low_rank_integer(width: usize, height: usize, rank: usize, seed: u64) -> GrayImage {
    let mut s = GaussianSampler::new(seed);
    let mut draw = |len: usize| -> Vec<u32> { s.uniform(len).into_iter().map(|u| (u * 4.0) as u32).collect() };
    let factors: Vec<(Vec<u32>, Vec<u32>)> = (0..rank).map(|_| (draw(height), draw(width))).collect();
    // each product is at most 9, so scaling keeps the sum within 255
    let scale = (255 / (9 * rank.max(1) as u32)).max(1);
    let mut pixels = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            let v: u32 = factors.iter().map(|(a, b)| a[y] * b[x]).sum();
            pixels.push((v * scale).min(255) as u8);
        }
    }
    GrayImage::new(width, height, pixels).expect("positive dimensions")
}

/// Smooth field of Gaussian blobs over a shallow gradient.
pub fn blobs(width: usize, height: usize, seed: u64) -> GrayImage {
    let mut s = GaussianSampler::new(seed);
    let (w, h) = (width as f64, height as f64);
    let blobs: Vec<[f64; 4]> = (0..14)
        .map(|_| {
            let u = s.uniform(4);
            [u[0] * w, u[1] * h, 0.04 * w + u[2] * 0.18 * w, 60.0 + 120.0 * u[3]]
        })
        .collect();
    from_fn(width, height, |x, y| {
        let (x, y) = (x as f64, y as f64);
        let base = 30.0 + 40.0 * x / w + 20.0 * y / h;
        let bump: f64 = blobs
            .iter()
            .map(|[cx, cy, r, amp]| amp * (-((x - cx).powi(2) + (y - cy).powi(2)) / (2.0 * r * r)).exp())
            .sum();
        base + bump
    })
}

/// Flat-shaded scene: sky, ground, a house with a roof, windows and a sun,
/// plus faint texture.
pub fn shapes(width: usize, height: usize, seed: u64) -> GrayImage {
    let mut s = GaussianSampler::new(seed);
    let texture = s.uniform(width * height);
    let (w, h) = (width as f64, height as f64);
    from_fn(width, height, |x, y| {
        let (fx, fy) = (x as f64 / w, y as f64 / h);
        let mut v = if fy < 0.62 {
            200.0 - 60.0 * fy
        } else {
            90.0 + 20.0 * (fx * 9.0).sin()
        };
        // sun
        if (fx - 0.8).powi(2) + (fy - 0.18).powi(2) < 0.006 {
            v = 245.0;
        }
        // wall
        if (0.22..0.62).contains(&fx) && (0.40..0.78).contains(&fy) {
            v = 150.0;
            // windows and door
            if ((0.28..0.36).contains(&fx) || (0.48..0.56).contains(&fx)) && (0.47..0.56).contains(&fy) {
                v = 40.0;
            }
            if (0.39..0.45).contains(&fx) && (0.60..0.78).contains(&fy) {
                v = 70.0;
            }
        }
        // roof: triangle above the wall
        let half = 0.24 * (fy - 0.20) / 0.20;
        if (0.20..0.40).contains(&fy) && (fx - 0.42).abs() < half {
            v = 100.0;
        }
        v + 6.0 * (texture[y * width + x] - 0.5)
    })
}

/// Multi-octave bilinear value noise.
pub fn value_noise(width: usize, height: usize, seed: u64) -> GrayImage {
    let mut s = GaussianSampler::new(seed);
    let octaves: Vec<(usize, Vec<f64>, f64)> = [4usize, 8, 16, 32, 64]
        .iter()
        .enumerate()
        .map(|(k, &cells)| (cells, s.uniform((cells + 1) * (cells + 1)), 0.5f64.powi(k as i32)))
        .collect();
    let total: f64 = octaves.iter().map(|o| o.2).sum();
    from_fn(width, height, |x, y| {
        let mut v = 0.0;
        for (cells, lattice, weight) in &octaves {
            let gx = x as f64 / width as f64 * *cells as f64;
            let gy = y as f64 / height as f64 * *cells as f64;
            let (ix, iy) = (gx.floor() as usize, gy.floor() as usize);
            let (tx, ty) = (gx - ix as f64, gy - iy as f64);
            let at = |i: usize, j: usize| lattice[j.min(*cells) * (cells + 1) + i.min(*cells)];
            let top = at(ix, iy) * (1.0 - tx) + at(ix + 1, iy) * tx;
            let bottom = at(ix, iy + 1) * (1.0 - tx) + at(ix + 1, iy + 1) * tx;
            v += weight * (top * (1.0 - ty) + bottom * ty);
        }
        255.0 * v / total
    })
}

/// Names and builders of the shipped test corpus (256 x 256).
pub fn corpus() -> Vec<(&'static str, GrayImage)> {
    vec![
        ("blobs", blobs(256, 256, 11)),
        ("house", shapes(256, 256, 12)),
        ("clouds", value_noise(256, 256, 13)),
    ]
}
