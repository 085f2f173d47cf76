//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use ctsev::imaging::{BinaryMask, GrayImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_mask(rng: &mut impl Rng, w: usize, h: usize, p: f64) -> BinaryMask {
    BinaryMask::from_fn(w, h, |_, _| rng.random_bool(p))
}

pub fn random_image(rng: &mut impl Rng, w: usize, h: usize) -> GrayImage {
    GrayImage::from_fn(w, h, |_, _| rng.random_range(0..=255u8) as f64 / 255.0)
}

/// Binary dilation/erosion by a `(2rx+1) x (2ry+1)` rectangle, pixels
/// outside the image counting as background.
pub fn naive_binary(mask: &BinaryMask, rx: isize, ry: isize, dilate: bool) -> BinaryMask {
    let (w, h) = mask.dims();
    let mut out = BinaryMask::empty(w, h);
    for y in 0..h as isize {
        for x in 0..w as isize {
            let mut any = false;
            let mut all = true;
            for dy in -ry..=ry {
                for dx in -rx..=rx {
                    let (nx, ny) = (x + dx, y + dy);
                    let v = nx >= 0 && ny >= 0 && nx < w as isize && ny < h as isize && mask.get(nx as usize, ny as usize);
                    any |= v;
                    all &= v;
                }
            }
            out.set(x as usize, y as usize, if dilate { any } else { all });
        }
    }
    out
}

/// Gray erosion/dilation by a rectangle with edge replication.
pub fn naive_gray(img: &GrayImage, rx: isize, ry: isize, dilate: bool) -> GrayImage {
    let (w, h) = img.dims();
    GrayImage::from_fn(w, h, |x, y| {
        let mut acc = if dilate { f64::NEG_INFINITY } else { f64::INFINITY };
        for dy in -ry..=ry {
            for dx in -rx..=rx {
                let nx = (x as isize + dx).clamp(0, w as isize - 1) as usize;
                let ny = (y as isize + dy).clamp(0, h as isize - 1) as usize;
                let v = img.get(nx, ny);
                acc = if dilate { acc.max(v) } else { acc.min(v) };
            }
        }
        acc
    })
}

/// Smallest threshold maximizing `n0 n1 (mu0 - mu1)^2`, compared as exact
/// fractions `(s0 n1 - s1 n0)^2 / (n0 n1)`.
pub fn exhaustive_otsu(hist: &[u64; 256]) -> usize {
    let mut best_t = 0;
    let mut best: Option<(u128, u128)> = None;
    for t in 0..255 {
        let n0: u64 = hist[..=t].iter().sum();
        let n1: u64 = hist[t + 1..].iter().sum();
        let s0: u64 = hist[..=t].iter().enumerate().map(|(b, &c)| b as u64 * c).sum();
        let s1: u64 = hist[t + 1..].iter().enumerate().map(|(b, &c)| (b + t + 1) as u64 * c).sum();
        let (num, den) = if n0 == 0 || n1 == 0 {
            (0u128, 1u128)
        } else {
            let d = (s0 as i128 * n1 as i128 - s1 as i128 * n0 as i128).unsigned_abs();
            (d * d, n0 as u128 * n1 as u128)
        };
        let better = match best {
            None => true,
            Some((bn, bd)) => num * bd > bn * den,
        };
        if better {
            best = Some((num, den));
            best_t = t;
        }
    }
    best_t
}

/// Component id per pixel from union-find over 8-neighbors; 0 is
/// background, ids are the smallest row-major pixel index of the component
/// plus one.
pub fn union_find_components(mask: &BinaryMask) -> Vec<usize> {
    let (w, h) = mask.dims();
    let mut parent: Vec<usize> = (0..w * h).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for y in 0..h {
        for x in 0..w {
            if !mask.get(x, y) {
                continue;
            }
            for (dx, dy) in [(1isize, 0isize), (-1, 1), (0, 1), (1, 1)] {
                let (nx, ny) = (x as isize + dx, y as isize + dy);
                if mask.get_or_false(nx, ny) {
                    let a = find(&mut parent, y * w + x);
                    let b = find(&mut parent, ny as usize * w + nx as usize);
                    let (lo, hi) = (a.min(b), a.max(b));
                    parent[hi] = lo;
                }
            }
        }
    }
    (0..w * h)
        .map(|i| if mask.bits()[i] { find(&mut parent, i) + 1 } else { 0 })
        .collect()
}

/// Background pixels not 4-connected to the border through background
/// become foreground; computed by repeated relaxation.
pub fn relaxation_fill_holes(mask: &BinaryMask) -> BinaryMask {
    let (w, h) = mask.dims();
    let mut outside = vec![false; w * h];
    for y in 0..h {
        for x in 0..w {
            if (x == 0 || y == 0 || x + 1 == w || y + 1 == h) && !mask.get(x, y) {
                outside[y * w + x] = true;
            }
        }
    }
    loop {
        let mut changed = false;
        for y in 0..h {
            for x in 0..w {
                let i = y * w + x;
                if outside[i] || mask.get(x, y) {
                    continue;
                }
                let near = (x > 0 && outside[i - 1])
                    || (x + 1 < w && outside[i + 1])
                    || (y > 0 && outside[i - w])
                    || (y + 1 < h && outside[i + w]);
                if near {
                    outside[i] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    BinaryMask::from_fn(w, h, |x, y| mask.get(x, y) || !outside[y * w + x])
}

/// Slice retention written straight from the rule: middle third by float
/// division, area scaled from a 512x512 reference.
pub fn reference_gate(area: usize, image_area: usize, index: usize, n: usize) -> bool {
    let i = index as f64;
    let n = n as f64;
    let min_area = 10_000.0 * image_area as f64 / (512.0 * 512.0);
    let in_band = i >= n / 3.0 && i <= 2.0 * n / 3.0;
    (area as f64 >= min_area && in_band) || area as f64 >= 0.7 * image_area as f64
}

/// Sampled positions for `m > 40`: each position joins the last region
/// whose start `floor(r m / 40)` does not exceed it, and each region
/// contributes its lower median.
pub fn partition_positions(m: usize) -> Vec<usize> {
    let mut regions: Vec<Vec<usize>> = vec![Vec::new(); 40];
    for i in 0..m {
        let r = (0..40).rfind(|&r| r * m / 40 <= i).unwrap();
        regions[r].push(i);
    }
    regions.iter().map(|r| r[(r.len() - 1) / 2]).collect()
}

/// Majority of three votes, else the first.
pub fn reference_vote(v: [u8; 3]) -> u8 {
    for c in 1..=4u8 {
        if v.iter().filter(|&&x| x == c).count() >= 2 {
            return c;
        }
    }
    v[0]
}
