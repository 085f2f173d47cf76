//! Synthetic lung phantoms with planted ground truth.
//!
//! A phantom slice is a bright body ellipse on a dark background holding two
//! dark lung ellipses. Ground-glass lesions are mid-gray regions grown from a
//! smooth per-scan field (a basal gradient plus a few Gaussian bumps per
//! lung), so each lung's lesion is the set of its pixels with the highest
//! field values. Short bright curvilinear vessels run through the lung
//! interior. Lung size follows a bell profile along the slice axis and
//! involvement ramps ±10% (relative) from apex to base around the target.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::imaging::{erode, io, BinaryMask, GrayImage, StructuringElement};
use crate::lung::ScanVolume;
use crate::wam::SeverityClass;

pub const MAX_INVOLVEMENT: f64 = 0.98;

const BACKGROUND: f64 = 0.02;
const BODY: f64 = 0.70;
const HEALTHY: f64 = 0.04;
const LESION: f64 = 0.40;
const VESSEL: f64 = 0.95;
const BUMPS_PER_LUNG: usize = 3;
const BUMP_AMPLITUDE: f64 = 0.15;
const VESSEL_LENGTH: f64 = 0.08;
const VESSEL_WIDTH: usize = 1;
const SLICE_VARIATION: f64 = 0.10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhantomSpec {
    pub class: SeverityClass,
    /// Target fraction of lung pixels (over the whole scan) that are lesion.
    pub involvement: f64,
    pub n_slices: usize,
    /// Width and height of each slice in pixels.
    pub size: usize,
    pub vessels_per_lung: usize,
    /// Standard deviation of additive Gaussian pixel noise (normalized units).
    pub noise: f64,
    pub seed: u64,
}

impl PhantomSpec {
    /// Spec with the default geometry: 27 slices of 256x256, 3 vessels per lung,
    /// noise 0.002.
    pub fn new(class: SeverityClass, involvement: f64, seed: u64) -> Self {
        Self {
            class,
            involvement,
            n_slices: 27,
            size: 256,
            vessels_per_lung: 3,
            noise: 0.002,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let f = self.involvement;
        if !(0.0..=MAX_INVOLVEMENT).contains(&f) {
            return Err(Error::PhantomSpec(format!(
                "involvement {f} is not feasible (must lie in [0, {MAX_INVOLVEMENT}])"
            )));
        }
        if !self.class.contains(f) {
            return Err(Error::PhantomSpec(format!(
                "involvement {f} lies outside the {} band {:?}",
                self.class,
                self.class.band()
            )));
        }
        if self.n_slices == 0 {
            return Err(Error::PhantomSpec("n_slices must be at least 1".into()));
        }
        if self.size < 64 {
            return Err(Error::PhantomSpec(format!("size {} is below the 64 px minimum", self.size)));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(Error::PhantomSpec(format!("noise {} must be finite and non-negative", self.noise)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhantomScan {
    pub scan: ScanVolume,
    pub lung_masks: Vec<BinaryMask>,
    pub infection_masks: Vec<BinaryMask>,
    pub label: SeverityClass,
    pub spec: PhantomSpec,
}

impl PhantomScan {
    /// Planted lesion pixels over planted lung pixels, whole scan.
    pub fn planted_fraction(&self) -> f64 {
        let lung: usize = self.lung_masks.iter().map(BinaryMask::count).sum();
        let inf: usize = self.infection_masks.iter().map(BinaryMask::count).sum();
        if lung == 0 {
            0.0
        } else {
            inf as f64 / lung as f64
        }
    }

    /// Writes `scans/<id>/`, `lung_masks/<id>/` and `infection_masks/<id>/`
    /// under `root`, one PNG per slice with matching filenames.
    pub fn write(&self, root: &Path, id: &str) -> Result<PathBuf> {
        let dirs = ["scans", "lung_masks", "infection_masks"].map(|d| root.join(d).join(id));
        for d in &dirs {
            fs::create_dir_all(d).map_err(|e| Error::io(format!("creating {}", d.display()), e))?;
        }
        for (i, name) in self.scan.names.iter().enumerate() {
            io::write_gray_png(&self.scan.slices[i], &dirs[0].join(name))?;
            io::write_mask_png(&self.lung_masks[i], &dirs[1].join(name))?;
            io::write_mask_png(&self.infection_masks[i], &dirs[2].join(name))?;
        }
        let [scan_dir, ..] = dirs;
        Ok(scan_dir)
    }
}

/// Per-lung lesion field parameters, fixed for the whole scan.
struct Bump {
    /// Offset from the lung center in units of the lung radii.
    dx: f64,
    dy: f64,
}

struct LungGeometry {
    cx: f64,
    cy: f64,
    rx: f64,
    ry: f64,
}

impl LungGeometry {
    fn contains(&self, x: usize, y: usize) -> bool {
        let dx = (x as f64 - self.cx) / self.rx;
        let dy = (y as f64 - self.cy) / self.ry;
        dx * dx + dy * dy <= 1.0
    }
}

/// Relative lung size along the slice axis: small at apex and base.
fn lung_scale(i: usize, n: usize) -> f64 {
    0.80 + 0.15 * (std::f64::consts::PI * (i as f64 + 0.5) / n as f64).sin()
}

/// Apex-to-base ramp in `[-1, 1]`, antisymmetric about the middle slice.
fn involvement_ramp(i: usize, n: usize) -> f64 {
    2.0 * (i as f64 + 0.5) / n as f64 - 1.0
}

fn slice_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

struct SliceTruth {
    image: GrayImage,
    lung: BinaryMask,
    infection: BinaryMask,
}

fn render_slice(spec: &PhantomSpec, bumps: &[Vec<Bump>; 2], index: usize) -> SliceTruth {
    let w = spec.size;
    let h = spec.size;
    let (wf, hf) = (w as f64, h as f64);
    let mut rng = slice_rng(spec.seed, index as u64 + 1);
    let s = lung_scale(index, spec.n_slices);
    let f_slice = (spec.involvement * (1.0 + SLICE_VARIATION * involvement_ramp(index, spec.n_slices))).clamp(0.0, 1.0);

    let lungs = [wf / 2.0 - 0.19 * wf, wf / 2.0 + 0.19 * wf].map(|cx| LungGeometry {
        cx,
        cy: 0.49 * hf,
        rx: 0.15 * wf * s,
        ry: 0.27 * hf * s,
    });
    let body = |x: usize, y: usize| {
        let dx = (x as f64 - wf / 2.0) / (0.44 * wf);
        let dy = (y as f64 - hf / 2.0) / (0.36 * hf);
        dx * dx + dy * dy <= 1.0
    };

    let mut values = vec![BACKGROUND; w * h];
    let mut lung_bits = vec![false; w * h];
    let mut inf_bits = vec![false; w * h];
    let mut vessel_bits = vec![false; w * h];
    for y in 0..h {
        for x in 0..w {
            if body(x, y) {
                values[y * w + x] = BODY;
            }
        }
    }

    let sigma = 0.08 * wf;
    for (geo, lung_bumps) in lungs.iter().zip(bumps) {
        let mut pixels: Vec<(f64, usize)> = Vec::new();
        for y in 0..h {
            for x in 0..w {
                if !geo.contains(x, y) {
                    continue;
                }
                let mut phi = y as f64 / hf;
                for b in lung_bumps {
                    let bx = geo.cx + b.dx * geo.rx;
                    let by = geo.cy + b.dy * geo.ry;
                    let d2 = (x as f64 - bx).powi(2) + (y as f64 - by).powi(2);
                    phi += BUMP_AMPLITUDE * (-d2 / (2.0 * sigma * sigma)).exp();
                }
                pixels.push((phi, y * w + x));
            }
        }
        let k = (f_slice * pixels.len() as f64).round() as usize;
        pixels.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        for (rank, &(_, idx)) in pixels.iter().enumerate() {
            lung_bits[idx] = true;
            inf_bits[idx] = rank < k;
        }
    }
    let lung = BinaryMask::new(w, h, lung_bits).expect("dimensions match");

    let inner = erode(&lung, &StructuringElement::rect(15, 15).expect("odd size"));
    let length = VESSEL_LENGTH * wf;
    for geo in &lungs {
        let candidates: Vec<(usize, usize)> = inner.iter_true().filter(|&(x, y)| geo.contains(x, y)).collect();
        if candidates.is_empty() {
            continue;
        }
        for _ in 0..spec.vessels_per_lung {
            let (x0, y0) = candidates[rng.random_range(0..candidates.len())];
            let angle = rng.random_range(0.0..std::f64::consts::TAU);
            let curvature = rng.random_range(-0.05..0.05);
            let steps = (length * 4.0) as usize;
            for step in 0..steps {
                let t = if steps > 1 { length * step as f64 / (steps - 1) as f64 } else { 0.0 };
                let a = angle + curvature * t;
                let x = (x0 as f64 + t * a.cos()).round();
                let y = (y0 as f64 + t * a.sin()).round();
                for dx in 0..VESSEL_WIDTH {
                    let (px, py) = (x as isize + dx as isize, y as isize);
                    if inner.get_or_false(px, py) {
                        vessel_bits[py as usize * w + px as usize] = true;
                    }
                }
            }
        }
    }

    let noise = (spec.noise > 0.0).then(|| Normal::new(0.0, spec.noise).expect("finite noise"));
    for i in 0..w * h {
        if lung.bits()[i] {
            values[i] = if vessel_bits[i] {
                VESSEL
            } else if inf_bits[i] {
                LESION
            } else {
                HEALTHY
            };
        }
    }
    let image = GrayImage::from_fn(w, h, |x, y| {
        let mut v = values[y * w + x];
        if let Some(n) = &noise {
            v += n.sample(&mut rng);
        }
        (v.clamp(0.0, 1.0) * 255.0).round() / 255.0
    });
    SliceTruth {
        image,
        lung,
        infection: BinaryMask::new(w, h, inf_bits).expect("dimensions match"),
    }
}

/// Deterministic in `spec`; slices are rendered in parallel.
pub fn generate_phantom(spec: &PhantomSpec) -> Result<PhantomScan> {
    spec.validate()?;
    let mut rng = slice_rng(spec.seed, 0);
    let bumps = [0, 1].map(|_| {
        (0..BUMPS_PER_LUNG)
            .map(|_| Bump {
                dx: rng.random_range(-0.6..0.6),
                dy: rng.random_range(-0.7..0.7),
            })
            .collect::<Vec<_>>()
    });
    let slices: Vec<SliceTruth> = (0..spec.n_slices)
        .into_par_iter()
        .map(|i| render_slice(spec, &bumps, i))
        .collect();
    let names = (0..spec.n_slices).map(|i| format!("{i}.png")).collect();
    let mut images = Vec::with_capacity(slices.len());
    let mut lung_masks = Vec::with_capacity(slices.len());
    let mut infection_masks = Vec::with_capacity(slices.len());
    for s in slices {
        images.push(s.image);
        lung_masks.push(s.lung);
        infection_masks.push(s.infection);
    }
    Ok(PhantomScan {
        scan: ScanVolume::new(format!("phantom-{}", spec.seed), images, names)?,
        lung_masks,
        infection_masks,
        label: spec.class,
        spec: *spec,
    })
}

/// Settings shared by every scan of a generated corpus.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorpusParams {
    pub per_class: usize,
    pub seed: u64,
    pub n_slices: usize,
    pub size: usize,
    pub vessels_per_lung: usize,
    pub noise: f64,
}

impl CorpusParams {
    pub fn new(per_class: usize, seed: u64) -> Self {
        let d = PhantomSpec::new(SeverityClass::Mild, 0.0, 0);
        Self {
            per_class,
            seed,
            n_slices: d.n_slices,
            size: d.size,
            vessels_per_lung: d.vessels_per_lung,
            noise: d.noise,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorpusEntry {
    pub id: String,
    pub spec: PhantomSpec,
}

/// Involvement sampling range of a class; the Critical band stops at the
/// feasibility limit.
pub fn sampling_band(class: SeverityClass) -> (f64, f64) {
    let (lo, hi) = class.band();
    (lo, hi.min(MAX_INVOLVEMENT))
}

/// Specs of a labeled corpus, `per_class` scans per class in class order.
/// Involvements are uniform inside each class band; per-scan seeds are drawn
/// from the corpus seed.
pub fn corpus_specs(params: &CorpusParams) -> Result<Vec<CorpusEntry>> {
    if params.per_class == 0 {
        return Err(Error::PhantomSpec("per-class count must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut out = Vec::with_capacity(4 * params.per_class);
    for class in SeverityClass::ALL {
        let (lo, hi) = sampling_band(class);
        for _ in 0..params.per_class {
            let f = if class == SeverityClass::Critical {
                rng.random_range(lo..=hi)
            } else {
                rng.random_range(lo..hi)
            };
            let spec = PhantomSpec {
                class,
                involvement: f,
                n_slices: params.n_slices,
                size: params.size,
                vessels_per_lung: params.vessels_per_lung,
                noise: params.noise,
                seed: rng.random(),
            };
            spec.validate()?;
            out.push(CorpusEntry {
                id: format!("ph{:04}", out.len()),
                spec,
            });
        }
    }
    Ok(out)
}

fn csv_err(e: csv::Error) -> Error {
    Error::parse("manifest CSV", e.to_string())
}

/// Manifest columns: `id,class,f,seed`.
pub fn write_manifest<W: Write>(out: W, entries: &[CorpusEntry]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["id", "class", "f", "seed"]).map_err(csv_err)?;
    for e in entries {
        w.write_record([
            e.id.clone(),
            e.spec.class.value().to_string(),
            e.spec.involvement.to_string(),
            e.spec.seed.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io("writing manifest", e))
}

/// `(id, class, f, seed)` rows of a manifest.
pub fn read_manifest<R: Read>(input: R) -> Result<Vec<(String, SeverityClass, f64, u64)>> {
    let mut r = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        if rec.len() != 4 {
            return Err(Error::parse("manifest CSV", format!("expected 4 columns, got {}", rec.len())));
        }
        let f = rec[2].parse::<f64>().map_err(|e| Error::parse("manifest CSV", e.to_string()))?;
        let seed = rec[3].parse::<u64>().map_err(|e| Error::parse("manifest CSV", e.to_string()))?;
        rows.push((rec[0].to_string(), rec[1].parse()?, f, seed));
    }
    Ok(rows)
}

/// Generates every scan of the corpus under `root` and writes `manifest.csv`.
pub fn write_corpus(params: &CorpusParams, root: &Path) -> Result<Vec<CorpusEntry>> {
    let entries = corpus_specs(params)?;
    fs::create_dir_all(root).map_err(|e| Error::io(format!("creating {}", root.display()), e))?;
    entries.par_iter().try_for_each(|e| {
        generate_phantom(&e.spec)?.write(root, &e.id)?;
        Ok::<_, Error>(())
    })?;
    let path = root.join("manifest.csv");
    let file = fs::File::create(&path).map_err(|e| Error::io(format!("creating {}", path.display()), e))?;
    write_manifest(std::io::BufWriter::new(file), &entries)?;
    Ok(entries)
}
