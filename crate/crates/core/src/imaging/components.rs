//! Connected-component labeling and the filters built on it.

use std::collections::VecDeque;

use super::image::BinaryMask;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Connectivity {
    Four,
    Eight,
}

impl Connectivity {
    fn offsets(self) -> &'static [(isize, isize)] {
        match self {
            Connectivity::Four => &[(1, 0), (-1, 0), (0, 1), (0, -1)],
            Connectivity::Eight => &[
                (1, 0),
                (-1, 0),
                (0, 1),
                (0, -1),
                (1, 1),
                (1, -1),
                (-1, 1),
                (-1, -1),
            ],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComponentStats {
    pub label: u32,
    pub area: usize,
    /// `(x_min, y_min, x_max, y_max)`, inclusive.
    pub bbox: (usize, usize, usize, usize),
    pub centroid: (f64, f64),
}

/// Label raster; 0 is background, components are numbered `1..=K` in
/// row-major order of their first pixel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labels {
    width: usize,
    height: usize,
    labels: Vec<u32>,
}

impl Labels {
    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.labels
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    /// Mask of the pixels whose label is accepted by `keep`.
    pub fn select(&self, mut keep: impl FnMut(u32) -> bool) -> BinaryMask {
        BinaryMask::from_fn(self.width, self.height, |x, y| {
            let l = self.get(x, y);
            l != 0 && keep(l)
        })
    }
}

pub fn label_components(mask: &BinaryMask, conn: Connectivity) -> (Labels, Vec<ComponentStats>) {
    let (w, h) = mask.dims();
    let mut labels = vec![0u32; w * h];
    let mut stats = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..w * h {
        if !mask.bits()[start] || labels[start] != 0 {
            continue;
        }
        let label = stats.len() as u32 + 1;
        labels[start] = label;
        queue.push_back(start);
        let (mut area, mut sx, mut sy) = (0usize, 0usize, 0usize);
        let mut bbox = (usize::MAX, usize::MAX, 0, 0);
        while let Some(idx) = queue.pop_front() {
            let (x, y) = (idx % w, idx / w);
            area += 1;
            sx += x;
            sy += y;
            bbox = (bbox.0.min(x), bbox.1.min(y), bbox.2.max(x), bbox.3.max(y));
            for &(dx, dy) in conn.offsets() {
                let (nx, ny) = (x as isize + dx, y as isize + dy);
                if mask.get_or_false(nx, ny) {
                    let n = ny as usize * w + nx as usize;
                    if labels[n] == 0 {
                        labels[n] = label;
                        queue.push_back(n);
                    }
                }
            }
        }
        stats.push(ComponentStats {
            label,
            area,
            bbox,
            centroid: (sx as f64 / area as f64, sy as f64 / area as f64),
        });
    }
    (
        Labels {
            width: w,
            height: h,
            labels,
        },
        stats,
    )
}

/// Foreground components under 8-connectivity.
pub fn connected_components(mask: &BinaryMask) -> (Labels, Vec<ComponentStats>) {
    label_components(mask, Connectivity::Eight)
}

/// Keep exactly the components with `area >= min_area`.
pub fn area_filter(mask: &BinaryMask, min_area: usize) -> BinaryMask {
    let (labels, stats) = connected_components(mask);
    labels.select(|l| stats[l as usize - 1].area >= min_area)
}

/// Keep the `n` largest components; equal areas resolve to the lower label.
pub fn keep_largest(mask: &BinaryMask, n: usize) -> BinaryMask {
    let (labels, mut stats) = connected_components(mask);
    stats.sort_by(|a, b| b.area.cmp(&a.area).then(a.label.cmp(&b.label)));
    let kept: Vec<u32> = stats.iter().take(n).map(|s| s.label).collect();
    labels.select(|l| kept.contains(&l))
}

fn border_reachable(mask: &BinaryMask, conn: Connectivity) -> Vec<bool> {
    let (w, h) = mask.dims();
    let mut seen = vec![false; w * h];
    let mut queue = VecDeque::new();
    for y in 0..h {
        for x in 0..w {
            let on_border = x == 0 || y == 0 || x + 1 == w || y + 1 == h;
            let i = y * w + x;
            if on_border && mask.bits()[i] && !seen[i] {
                seen[i] = true;
                queue.push_back(i);
            }
        }
    }
    while let Some(i) = queue.pop_front() {
        let (x, y) = (i % w, i / w);
        for &(dx, dy) in conn.offsets() {
            let (nx, ny) = (x as isize + dx, y as isize + dy);
            if mask.get_or_false(nx, ny) {
                let n = ny as usize * w + nx as usize;
                if !seen[n] {
                    seen[n] = true;
                    queue.push_back(n);
                }
            }
        }
    }
    seen
}

/// Drop every 8-connected foreground component that touches the image border.
pub fn clear_border(mask: &BinaryMask) -> BinaryMask {
    let reach = border_reachable(mask, Connectivity::Eight);
    let (w, h) = mask.dims();
    BinaryMask::from_fn(w, h, |x, y| mask.get(x, y) && !reach[y * w + x])
}

/// Set every background region that cannot reach the image border
/// (4-connected through background) to foreground.
pub fn fill_holes(mask: &BinaryMask) -> BinaryMask {
    let outside = border_reachable(&mask.complement(), Connectivity::Four);
    let (w, h) = mask.dims();
    BinaryMask::from_fn(w, h, |x, y| mask.get(x, y) || !outside[y * w + x])
}
