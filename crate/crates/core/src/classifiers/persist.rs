//! Model files.
//!
//! Layout: the 7 magic bytes `CTSEV01`, a kind tag byte, the payload length
//! as little-endian u64, the payload, and the SHA-256 of everything before
//! it. All numbers in the payload are little-endian; floats are stored as
//! their IEEE-754 bits, so a load reproduces the model exactly.

use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use super::ensemble::{Ensemble, Member};
use super::ert::ErtModel;
use super::gboost::GbModel;
use super::knn::KnnModel;
use super::logreg::{LogRegModel, N_PARAMS};
use super::svm::{BinarySvm, Kernel, SvmModel};
use super::tree::{Node, Tree};
use super::{ModelKind, TrainedModel, N_CLASSES};
use crate::error::{Error, Result};
use crate::features::FEATURE_DIM;
use crate::wam::SeverityClass;

pub const MAGIC: &[u8; 7] = b"CTSEV01";
const HEADER: usize = MAGIC.len() + 1 + 8;
const CHECKSUM: usize = 32;

#[derive(Default)]
struct Enc(Vec<u8>);

impl Enc {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u32(&mut self, v: usize) {
        self.0.extend_from_slice(&(v as u32).to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_bits().to_le_bytes());
    }
    fn f64s(&mut self, v: &[f64]) {
        self.u32(v.len());
        v.iter().for_each(|&x| self.f64(x));
    }
    fn class(&mut self, c: SeverityClass) {
        self.u8(c.value());
    }
}

struct Dec<'a> {
    buf: &'a [u8],
    pos: usize,
}

fn corrupt(msg: impl Into<String>) -> Error {
    Error::CorruptModel(msg.into())
}

impl<'a> Dec<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or_else(|| corrupt("payload ends early"))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<usize> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")) as usize)
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_bits(self.u64()?))
    }
    fn f64s(&mut self) -> Result<Vec<f64>> {
        let n = self.u32()?;
        if n > self.buf.len() / 8 {
            return Err(corrupt("array length exceeds payload"));
        }
        (0..n).map(|_| self.f64()).collect()
    }
    fn class(&mut self) -> Result<SeverityClass> {
        SeverityClass::from_value(self.u8()?).map_err(|_| corrupt("invalid class value"))
    }
    fn count(&mut self, max: usize, what: &str) -> Result<usize> {
        let n = self.u32()?;
        if n > max {
            return Err(corrupt(format!("{what} count {n} exceeds payload")));
        }
        Ok(n)
    }
    fn finish(&self) -> Result<()> {
        if self.pos == self.buf.len() {
            Ok(())
        } else {
            Err(corrupt("trailing bytes in payload"))
        }
    }
}

fn put_tree<L>(e: &mut Enc, t: &Tree<L>, mut leaf: impl FnMut(&mut Enc, &L)) {
    e.u32(t.nodes.len());
    for n in &t.nodes {
        match n {
            Node::Leaf(v) => {
                e.u8(0);
                leaf(e, v);
            }
            Node::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                e.u8(1);
                e.u32(*feature);
                e.f64(*threshold);
                e.u32(*left);
                e.u32(*right);
            }
        }
    }
}

fn get_tree<L>(d: &mut Dec, mut leaf: impl FnMut(&mut Dec) -> Result<L>) -> Result<Tree<L>> {
    let n = d.count(d.buf.len(), "node")?;
    if n == 0 {
        return Err(corrupt("empty tree"));
    }
    let mut nodes = Vec::with_capacity(n);
    for id in 0..n {
        nodes.push(match d.u8()? {
            0 => Node::Leaf(leaf(d)?),
            1 => {
                let feature = d.u32()?;
                let threshold = d.f64()?;
                let (left, right) = (d.u32()?, d.u32()?);
                // children are always stored after their parent
                if feature >= FEATURE_DIM || left <= id || right <= id || left >= n || right >= n {
                    return Err(corrupt("invalid tree node"));
                }
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                }
            }
            _ => return Err(corrupt("invalid tree node tag")),
        });
    }
    Ok(Tree { nodes })
}

fn encode(e: &mut Enc, m: &TrainedModel) {
    match m {
        TrainedModel::Ert(m) => {
            e.u32(m.trees.len());
            for t in &m.trees {
                put_tree(e, t, |e, c| e.class(*c));
            }
        }
        TrainedModel::GBoost(m) => {
            e.f64(m.learning_rate);
            m.init.iter().for_each(|&v| e.f64(v));
            e.u32(m.rounds.len());
            for round in &m.rounds {
                for t in round {
                    put_tree(e, t, |e, v| e.f64(*v));
                }
            }
            e.f64s(&m.loss_trace);
        }
        TrainedModel::Svm(m) => {
            match m.kernel {
                Kernel::Linear => e.u8(0),
                Kernel::Rbf { gamma } => {
                    e.u8(1);
                    e.f64(gamma);
                }
            }
            e.u8(m.constant.map_or(0, SeverityClass::value));
            e.u32(m.machines.len());
            for b in &m.machines {
                e.class(b.positive);
                e.class(b.negative);
                e.f64(b.rho);
                e.u64(b.iterations as u64);
                e.u8(u8::from(b.converged));
                e.u32(b.support.len());
                for (s, c) in b.support.iter().zip(&b.coef) {
                    s.iter().for_each(|&v| e.f64(v));
                    e.f64(*c);
                }
            }
        }
        TrainedModel::Knn(m) => {
            e.u32(m.k);
            e.u32(m.x.len());
            for (x, y) in m.x.iter().zip(&m.y) {
                x.iter().for_each(|&v| e.f64(v));
                e.class(*y);
            }
        }
        TrainedModel::LogReg(m) => m.params.iter().for_each(|&v| e.f64(v)),
        TrainedModel::Ensemble(m) => {
            for (member, model) in &m.members {
                e.u8(match member {
                    Member::GBoost => 0,
                    Member::Ert => 1,
                    Member::Svm => 2,
                });
                let mut inner = Enc::default();
                encode(&mut inner, model);
                e.u8(model.kind().tag());
                e.u64(inner.0.len() as u64);
                e.0.extend_from_slice(&inner.0);
            }
        }
    }
}

fn vector(d: &mut Dec) -> Result<Vec<f64>> {
    (0..FEATURE_DIM).map(|_| d.f64()).collect()
}

fn decode(kind: ModelKind, d: &mut Dec) -> Result<TrainedModel> {
    let max = d.buf.len();
    Ok(match kind {
        ModelKind::Ert => {
            let n = d.count(max, "tree")?;
            let trees = (0..n).map(|_| get_tree(d, |d| d.class())).collect::<Result<_>>()?;
            TrainedModel::Ert(ErtModel { trees })
        }
        ModelKind::GBoost => {
            let learning_rate = d.f64()?;
            let mut init = [0.0; N_CLASSES];
            for v in &mut init {
                *v = d.f64()?;
            }
            let n = d.count(max, "round")?;
            let mut rounds = Vec::with_capacity(n);
            for _ in 0..n {
                let trees = (0..N_CLASSES)
                    .map(|_| get_tree(d, |d| d.f64()))
                    .collect::<Result<Vec<_>>>()?;
                rounds.push(trees.try_into().map_err(|_| corrupt("round without 4 trees"))?);
            }
            let loss_trace = d.f64s()?;
            TrainedModel::GBoost(GbModel {
                init,
                learning_rate,
                rounds,
                loss_trace,
            })
        }
        ModelKind::Svm => {
            let kernel = match d.u8()? {
                0 => Kernel::Linear,
                1 => Kernel::Rbf { gamma: d.f64()? },
                _ => return Err(corrupt("unknown kernel")),
            };
            let constant = match d.u8()? {
                0 => None,
                v => Some(SeverityClass::from_value(v).map_err(|_| corrupt("invalid class value"))?),
            };
            let n = d.count(max, "machine")?;
            let mut machines = Vec::with_capacity(n);
            for _ in 0..n {
                let positive = d.class()?;
                let negative = d.class()?;
                let rho = d.f64()?;
                let iterations = d.u64()? as usize;
                let converged = d.u8()? != 0;
                let n_sv = d.count(max, "support vector")?;
                let mut support = Vec::with_capacity(n_sv);
                let mut coef = Vec::with_capacity(n_sv);
                for _ in 0..n_sv {
                    support.push(vector(d)?);
                    coef.push(d.f64()?);
                }
                machines.push(BinarySvm {
                    positive,
                    negative,
                    support,
                    coef,
                    rho,
                    iterations,
                    converged,
                });
            }
            TrainedModel::Svm(SvmModel {
                kernel,
                machines,
                constant,
            })
        }
        ModelKind::Knn => {
            let k = d.u32()?;
            let n = d.count(max, "sample")?;
            let mut x = Vec::with_capacity(n);
            let mut y = Vec::with_capacity(n);
            for _ in 0..n {
                x.push(vector(d)?);
                y.push(d.class()?);
            }
            if k == 0 || k > n {
                return Err(corrupt("invalid neighbor count"));
            }
            TrainedModel::Knn(KnnModel { k, x, y })
        }
        ModelKind::LogReg => TrainedModel::LogReg(LogRegModel {
            params: (0..N_PARAMS).map(|_| d.f64()).collect::<Result<_>>()?,
        }),
        ModelKind::Ensemble => {
            let mut members = Vec::with_capacity(3);
            for _ in 0..3 {
                let member = match d.u8()? {
                    0 => Member::GBoost,
                    1 => Member::Ert,
                    2 => Member::Svm,
                    _ => return Err(corrupt("unknown ensemble member")),
                };
                let tag = d.u8()?;
                let kind = ModelKind::from_tag(tag)
                    .ok_or_else(|| Error::ModelVersion(format!("unknown model kind tag {tag}")))?;
                let len = d.u64()?;
                let len = usize::try_from(len).map_err(|_| corrupt("member length overflow"))?;
                let mut inner = Dec {
                    buf: d.take(len)?,
                    pos: 0,
                };
                let model = decode(kind, &mut inner)?;
                inner.finish()?;
                members.push((member, model));
            }
            TrainedModel::Ensemble(Ensemble::new(members).map_err(|e| corrupt(e.to_string()))?)
        }
    })
}

/// Serialized model file contents.
pub fn model_bytes(model: &TrainedModel) -> Vec<u8> {
    let mut payload = Enc::default();
    encode(&mut payload, model);
    let mut out = Vec::with_capacity(HEADER + payload.0.len() + CHECKSUM);
    out.extend_from_slice(MAGIC);
    out.push(model.kind().tag());
    out.extend_from_slice(&(payload.0.len() as u64).to_le_bytes());
    out.extend_from_slice(&payload.0);
    let digest = Sha256::digest(&out);
    out.extend_from_slice(&digest);
    out
}

pub fn model_from_bytes(bytes: &[u8]) -> Result<TrainedModel> {
    if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
        if bytes.starts_with(&MAGIC[..5]) && bytes.len() >= MAGIC.len() {
            return Err(Error::ModelVersion(format!(
                "format version {:?} is not supported",
                String::from_utf8_lossy(&bytes[5..MAGIC.len()])
            )));
        }
        return Err(corrupt("missing CTSEV01 header"));
    }
    if bytes.len() < HEADER {
        return Err(corrupt("file ends inside the header"));
    }
    let tag = bytes[MAGIC.len()];
    let kind = ModelKind::from_tag(tag).ok_or_else(|| Error::ModelVersion(format!("unknown model kind tag {tag}")))?;
    let len = u64::from_le_bytes(bytes[MAGIC.len() + 1..HEADER].try_into().expect("8 bytes"));
    let expected = usize::try_from(len)
        .ok()
        .and_then(|l| l.checked_add(HEADER + CHECKSUM))
        .ok_or_else(|| corrupt("payload length overflow"))?;
    if bytes.len() != expected {
        return Err(corrupt(format!("expected {expected} bytes, found {}", bytes.len())));
    }
    let (body, digest) = bytes.split_at(bytes.len() - CHECKSUM);
    if Sha256::digest(body).as_slice() != digest {
        return Err(corrupt("checksum mismatch"));
    }
    let mut d = Dec {
        buf: &body[HEADER..],
        pos: 0,
    };
    let model = decode(kind, &mut d)?;
    d.finish()?;
    Ok(model)
}

pub fn save_model(model: &TrainedModel, path: &Path) -> Result<()> {
    fs::write(path, model_bytes(model)).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

pub fn load_model(path: &Path) -> Result<TrainedModel> {
    let bytes = fs::read(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    model_from_bytes(&bytes)
}
