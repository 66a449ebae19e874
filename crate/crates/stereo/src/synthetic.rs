//! Seeded synthetic stereo pairs with exact ground truth.
//!
//! Textures are standardized box-blurred Gaussian noise (radius 3, wrapped)
//! plus optional white noise, drawn from `ChaCha8Rng::seed_from_u64(seed)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::image::{DisparityMap, ImagePair, Raster};

const BLUR_RADIUS: usize = 3;

/// Smooth and white noise fields of the same shape.
struct Texture {
    width: usize,
    smooth: Vec<f64>,
    white: Vec<f64>,
}

impl Texture {
    fn new(height: usize, width: usize, rng: &mut ChaCha8Rng) -> Texture {
        let n = height * width;
        let raw: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let white: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let r = BLUR_RADIUS as i64;
        let at = |v: i64, u: i64| {
            let v = v.rem_euclid(height as i64) as usize;
            let u = u.rem_euclid(width as i64) as usize;
            raw[v * width + u]
        };
        let area = ((2 * r + 1) * (2 * r + 1)) as f64;
        let mut smooth = Vec::with_capacity(n);
        for v in 0..height as i64 {
            for u in 0..width as i64 {
                let mut s = 0.0;
                for dv in -r..=r {
                    for du in -r..=r {
                        s += at(v + dv, u + du);
                    }
                }
                smooth.push(s / area);
            }
        }
        let mean = smooth.iter().sum::<f64>() / n as f64;
        let sd = (smooth.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
        smooth.iter_mut().for_each(|x| *x /= sd);
        Texture { width, smooth, white }
    }

    fn value(&self, u: usize, v: usize, base: f64, amp: f64, white: f64) -> f64 {
        let u = u % self.width;
        let i = v * self.width + u;
        base + amp * self.smooth[i] + white * self.white[i]
    }
}

fn to_u8(x: f64) -> u8 {
    x.round().clamp(0.0, 255.0) as u8
}

/// Fronto-parallel rectangle in front of a fronto-parallel background.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticScene {
    pub height: usize,
    pub width: usize,
    pub background_disparity: usize,
    pub foreground_disparity: usize,
    /// `[u_start, u_end)` of the foreground in the left image.
    pub foreground_cols: (usize, usize),
    /// `[v_start, v_end)`
    pub foreground_rows: (usize, usize),
    pub background_texture: f64,
    pub background_noise: f64,
    pub foreground_texture: f64,
    pub foreground_noise: f64,
    pub seed: u64,
}

impl SyntheticScene {
    /// 50×60 scene: a nearly textureless background at disparity 4 behind a
    /// strongly textured rectangle at disparity 10.
    pub fn desk(seed: u64) -> Self {
        SyntheticScene {
            height: 50,
            width: 60,
            background_disparity: 4,
            foreground_disparity: 10,
            foreground_cols: (22, 44),
            foreground_rows: (12, 38),
            background_texture: 5.0,
            background_noise: 0.5,
            foreground_texture: 60.0,
            foreground_noise: 0.0,
            seed,
        }
    }

    /// The desk scene with the rectangle scaled to a new image size.
    pub fn with_size(height: usize, width: usize, seed: u64) -> Self {
        let d = SyntheticScene::desk(seed);
        let sc = |x: usize, from: usize, to: usize| x * to / from;
        SyntheticScene {
            height,
            width,
            foreground_cols: (
                sc(d.foreground_cols.0, d.width, width),
                sc(d.foreground_cols.1, d.width, width),
            ),
            foreground_rows: (
                sc(d.foreground_rows.0, d.height, height),
                sc(d.foreground_rows.1, d.height, height),
            ),
            ..d
        }
    }

    fn in_foreground(&self, u: usize, v: usize) -> bool {
        (self.foreground_cols.0..self.foreground_cols.1).contains(&u)
            && (self.foreground_rows.0..self.foreground_rows.1).contains(&v)
    }

    /// Left image, right image and exact left-view disparities. The right
    /// pixel at `u` shows whatever surface the left image has at `u + d`.
    pub fn render(&self) -> ImagePair {
        let (h, w) = (self.height, self.width);
        let max_d = self.background_disparity.max(self.foreground_disparity);
        let tex_w = w + 2 * max_d + 60;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let tex = Texture::new(h, tex_w, &mut rng);
        let bg = |u: usize, v: usize| tex.value(u + 30, v, 100.0, self.background_texture, self.background_noise);
        let fg = |u: usize, v: usize| tex.value(u + 40, v, 170.0, self.foreground_texture, self.foreground_noise);
        let mut left = Raster::filled(w, h, 0);
        let mut right = Raster::filled(w, h, 0);
        let mut gt = Vec::with_capacity(w * h);
        for v in 0..h {
            for u in 0..w {
                let l = if self.in_foreground(u, v) { fg(u, v) } else { bg(u, v) };
                left.set(u, v, to_u8(l));
                let (uf, ub) = (u + self.foreground_disparity, u + self.background_disparity);
                let r = if self.in_foreground(uf, v) {
                    fg(uf, v)
                } else {
                    bg(ub, v)
                };
                right.set(u, v, to_u8(r));
                gt.push(if self.in_foreground(u, v) {
                    self.foreground_disparity
                } else {
                    self.background_disparity
                } as f64);
            }
        }
        ImagePair::new(left, right, Some(DisparityMap::new(w, h, gt).expect("shape"))).expect("shape")
    }
}

/// Textured pair whose right image is the left shifted by `shift` pixels,
/// so every pixel has disparity `shift`.
pub fn shifted_pair(height: usize, width: usize, shift: usize, texture: f64, seed: u64) -> ImagePair {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tex = Texture::new(height, width + shift, &mut rng);
    let px = |u: usize, v: usize| to_u8(tex.value(u, v, 128.0, texture, 0.0));
    let mut left = Raster::filled(width, height, 0);
    let mut right = Raster::filled(width, height, 0);
    for v in 0..height {
        for u in 0..width {
            left.set(u, v, px(u, v));
            right.set(u, v, px(u + shift, v));
        }
    }
    let gt = DisparityMap::new(width, height, vec![shift as f64; width * height]).expect("shape");
    ImagePair::new(left, right, Some(gt)).expect("shape")
}
