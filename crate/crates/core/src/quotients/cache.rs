//! On-disk cache for enumerated Z-model groups.
//!
//! Layout (little endian): magic `PCQG`, version `u32`, then `p`, `n`, `k` as
//! `u32`, the order as `u64`, and the arrays `parent: [u32]`, `letter: [u8]`,
//! `weight: [u8]`, `gen_table: [u32]`. Units are recomputed along the
//! breadth-first tree on load.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use super::build::units_step;
use super::{Model, QuotientGroup};
use crate::error::{Error, Result};
use crate::truncalg::{Shape, UnitElement};

pub const CACHE_VERSION: u32 = 1;
const MAGIC: &[u8; 4] = b"PCQG";

pub(crate) fn cache_path(dir: &Path, tag: &str, p: u32, n: usize, k: usize) -> PathBuf {
    dir.join(format!("{tag}-p{p}-n{n}-k{k}.v{CACHE_VERSION}.pcg"))
}

fn cache_err(e: impl std::fmt::Display) -> Error {
    Error::Cache(e.to_string())
}

/// Writes a Z-model group. Other models are rejected.
pub fn save_group(g: &QuotientGroup, path: &Path) -> Result<()> {
    if !matches!(g.model(), Model::Z { .. }) {
        return Err(Error::Cache("only Z-model groups are cached".into()));
    }
    let mut buf = Vec::new();
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&CACHE_VERSION.to_le_bytes());
    for v in [g.p(), g.rank() as u32, g.depth() as u32] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    buf.extend_from_slice(&(g.order() as u64).to_le_bytes());
    for &v in g.parents() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    buf.extend_from_slice(g.letters());
    buf.extend_from_slice(g.weights());
    for &v in g.gen_table() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(cache_err)?;
    }
    let tmp = path.with_extension("tmp");
    let mut f = fs::File::create(&tmp).map_err(cache_err)?;
    f.write_all(&buf).map_err(cache_err)?;
    fs::rename(&tmp, path).map_err(cache_err)
}

struct Cursor<'a>(&'a [u8]);

impl<'a> Cursor<'a> {
    fn take(&mut self, k: usize) -> Result<&'a [u8]> {
        if self.0.len() < k {
            return Err(Error::Cache("truncated cache file".into()));
        }
        let (a, b) = self.0.split_at(k);
        self.0 = b;
        Ok(a)
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u32s(&mut self, k: usize) -> Result<Vec<u32>> {
        Ok(self
            .take(4 * k)?
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
}

/// Reads a group written by [`save_group`].
pub fn load_group(path: &Path) -> Result<QuotientGroup> {
    let mut raw = Vec::new();
    fs::File::open(path).map_err(cache_err)?.read_to_end(&mut raw).map_err(cache_err)?;
    let mut c = Cursor(&raw);
    if c.take(4)? != MAGIC {
        return Err(Error::Cache("bad magic".into()));
    }
    let version = c.u32()?;
    if version != CACHE_VERSION {
        return Err(Error::Cache(format!("version {version}, expected {CACHE_VERSION}")));
    }
    let (p, n, k) = (c.u32()?, c.u32()? as usize, c.u32()? as usize);
    let order = u64::from_le_bytes(c.take(8)?.try_into().unwrap()) as usize;
    let parent = c.u32s(order)?;
    let letter = c.take(order)?.to_vec();
    let weight = c.take(order)?.to_vec();
    let gen_table = c.u32s(order * 2 * n)?;
    if !c.0.is_empty() {
        return Err(Error::Cache("trailing bytes".into()));
    }
    if parent.iter().enumerate().skip(1).any(|(e, &par)| par as usize >= e) {
        return Err(Error::Cache("parent table is not breadth-first".into()));
    }
    let shape = Shape::with_budget(p, n, k, u128::MAX)?;
    let step = units_step(shape)?;
    let mut units = Vec::with_capacity(order);
    units.push(UnitElement::one(shape));
    for e in 1..order {
        let u = step(&units[parent[e] as usize], letter[e] as usize);
        units.push(u);
    }
    Ok(QuotientGroup::from_parts(
        format!("NZ(p={p},n={n},k={k})"),
        p,
        n,
        k,
        parent,
        letter,
        gen_table,
        weight,
        Model::Z { shape, units },
    ))
}
