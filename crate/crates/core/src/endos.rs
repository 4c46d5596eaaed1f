//! Endomorphisms of relatively free quotients, stored as generator images.
//!
//! Every quotient here is the free group modulo a verbal subgroup, so any
//! tuple of images defines an endomorphism and evaluating witness words is
//! well defined.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::GroupOps;
use crate::quotients::{closure, Model, QuotientGroup, INFINITE_WEIGHT};

/// An endomorphism `x_i -> images[i]`.
#[derive(Clone)]
pub struct Endo {
    group: Arc<QuotientGroup>,
    images: Vec<u32>,
    /// Images of the `2n` letters.
    lets: Vec<u32>,
}

impl PartialEq for Endo {
    fn eq(&self, other: &Self) -> bool {
        self.images == other.images && Arc::ptr_eq(&self.group, &other.group)
    }
}

impl Eq for Endo {}

impl Hash for Endo {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.images.hash(state);
    }
}

impl fmt::Debug for Endo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Endo({self})")
    }
}

impl fmt::Display for Endo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &e) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "x{} -> {}", i + 1, self.group.witness(e))?;
        }
        Ok(())
    }
}

impl Serialize for Endo {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl Endo {
    pub fn new(group: Arc<QuotientGroup>, images: Vec<u32>) -> Result<Self> {
        if images.len() != group.rank() {
            return Err(Error::RankMismatch { left: images.len(), right: group.rank() });
        }
        if let Some(&bad) = images.iter().find(|&&e| e as usize >= group.order()) {
            return Err(Error::InvalidArgument(format!("element {bad} outside the group")));
        }
        let mut lets = images.clone();
        lets.extend(images.iter().map(|&e| group.inv(e)));
        Ok(Endo { group, images, lets })
    }

    pub fn identity(group: Arc<QuotientGroup>) -> Self {
        let gens = group.generators();
        Endo::new(group, gens).expect("generators are valid images")
    }

    /// Images given as words, e.g. `["x1^-1", "x2*x1"]`.
    pub fn from_words(group: Arc<QuotientGroup>, words: &[&str]) -> Result<Self> {
        let images = words.iter().map(|w| group.parse(w)).collect::<Result<Vec<_>>>()?;
        Endo::new(group, images)
    }

    /// Inner automorphism `x -> g x g^-1`.
    pub fn conjugation(group: Arc<QuotientGroup>, g: u32) -> Self {
        let images = group.generators().iter().map(|&x| group.conjugate(x, g)).collect();
        Endo::new(group, images).expect("valid images")
    }

    pub fn group(&self) -> &Arc<QuotientGroup> {
        &self.group
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    /// Evaluates the witness word of `e` on the images.
    #[inline]
    pub fn apply(&self, e: u32) -> u32 {
        let g = &*self.group;
        g.witness_letters(e)
            .iter()
            .fold(0u32, |acc, &l| g.mul(acc, self.lets[l as usize]))
    }

    /// `apply` on every element, in index order.
    pub fn image_table(&self) -> Vec<u32> {
        let g = &*self.group;
        let mut out = vec![0u32; g.order()];
        for e in 1..g.order() as u32 {
            out[e as usize] = g.mul(out[g.parent(e) as usize], self.lets[g.last_letter(e)]);
        }
        out
    }

    fn same_group(&self, other: &Endo) -> Result<()> {
        if !Arc::ptr_eq(&self.group, &other.group) {
            return Err(Error::ParamMismatch(format!(
                "{} vs {}",
                self.group.label(),
                other.group.label()
            )));
        }
        Ok(())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Endo) -> Result<Endo> {
        self.same_group(other)?;
        Ok(self.compose_unchecked(other))
    }

    pub(crate) fn compose_unchecked(&self, other: &Endo) -> Endo {
        let images = other.images.iter().map(|&e| self.apply(e)).collect();
        Endo::new(self.group.clone(), images).expect("valid images")
    }

    /// Matrix of the induced map on `H_p`; column `j` is the image of `x_j`.
    pub fn hp_matrix(&self) -> Vec<Vec<u8>> {
        let n = self.group.rank();
        (0..n)
            .map(|r| (0..n).map(|j| self.group.hp_coords(self.images[j])[r]).collect())
            .collect()
    }

    /// Invertibility of the induced map on `H_p`, which for a finite p-group
    /// is equivalent to bijectivity.
    pub fn is_aut(&self) -> bool {
        det_mod_p(self.hp_matrix(), self.group.p()) != 0
    }

    /// Brute-force bijectivity.
    pub fn is_bijective(&self) -> bool {
        let mut seen = vec![false; self.group.order()];
        for e in self.image_table() {
            if std::mem::replace(&mut seen[e as usize], true) {
                return false;
            }
        }
        true
    }

    pub fn inverse(&self) -> Result<Endo> {
        if !self.is_aut() {
            return Err(Error::NotAutomorphism);
        }
        let table = self.image_table();
        let mut pre = vec![0u32; table.len()];
        for (e, &img) in table.iter().enumerate() {
            pre[img as usize] = e as u32;
        }
        let images = self.group.generators().iter().map(|&x| pre[x as usize]).collect();
        Endo::new(self.group.clone(), images)
    }

    pub fn power(&self, e: i64) -> Result<Endo> {
        let m = AutGroup(self.group.clone());
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        Ok(m.pow(&base, e.abs()))
    }

    /// `f g f^-1 g^-1`.
    pub fn commutator(&self, other: &Endo) -> Result<Endo> {
        self.same_group(other)?;
        let (fi, gi) = (self.inverse()?, other.inverse()?);
        Ok(self.compose_unchecked(other).compose_unchecked(&fi).compose_unchecked(&gi))
    }

    /// Largest `k` with `f(x_i) x_i^-1` in the `(k+1)`-th term for all `i`,
    /// capped at the depth of the group.
    pub fn ia_level(&self) -> Result<usize> {
        if !self.is_aut() {
            return Err(Error::NotAutomorphism);
        }
        Ok(self.displacement_level())
    }

    pub(crate) fn displacement_level(&self) -> usize {
        let g = &*self.group;
        let w = g
            .generators()
            .iter()
            .zip(&self.images)
            .map(|(&x, &y)| g.weight(g.mul(y, g.inv(x))))
            .min()
            .unwrap_or(INFINITE_WEIGHT);
        if w == INFINITE_WEIGHT {
            g.depth()
        } else {
            (w as usize - 1).min(g.depth())
        }
    }

    pub fn is_identity(&self) -> bool {
        self.images == self.group.generators()
    }

    /// Reads the witness words of the images in another group on the same
    /// generators. Towards a quotient this is `psi`; towards a cover it is
    /// the lift.
    pub fn transport(&self, target: &Arc<QuotientGroup>) -> Result<Endo> {
        if target.rank() != self.group.rank() {
            return Err(Error::RankMismatch { left: self.group.rank(), right: target.rank() });
        }
        let images = self
            .images
            .iter()
            .map(|&e| target.eval(&self.group.witness(e)))
            .collect::<Result<Vec<_>>>()?;
        Endo::new(target.clone(), images)
    }

    /// Induced endomorphism on the quotient `target` (`psi`).
    pub fn psi(&self, target: &Arc<QuotientGroup>) -> Result<Endo> {
        if target.order() > self.group.order() || target.p() != self.group.p() {
            return Err(Error::ParamMismatch("psi needs a quotient target".into()));
        }
        self.transport(target)
    }

    /// Lift to the cover `target` by reusing witness words.
    pub fn lift(&self, target: &Arc<QuotientGroup>) -> Result<Endo> {
        if target.order() < self.group.order() || target.p() != self.group.p() {
            return Err(Error::ParamMismatch("lift needs a covering target".into()));
        }
        self.transport(target)
    }
}

/// Determinant over `F_p`.
pub fn det_mod_p(mut m: Vec<Vec<u8>>, p: u32) -> u32 {
    let n = m.len();
    let p = p as i64;
    let mut det = 1i64;
    for c in 0..n {
        let Some(r) = (c..n).find(|&r| m[r][c] != 0) else {
            return 0;
        };
        if r != c {
            m.swap(r, c);
            det = (p - det) % p;
        }
        let pivot = m[c][c] as i64;
        det = det * pivot % p;
        let inv = mod_inv(pivot, p);
        for r in c + 1..n {
            let factor = m[r][c] as i64 * inv % p;
            if factor == 0 {
                continue;
            }
            for k in c..n {
                m[r][k] = ((m[r][k] as i64 - factor * m[c][k] as i64).rem_euclid(p)) as u8;
            }
        }
    }
    det as u32
}

pub(crate) fn mod_inv(a: i64, m: i64) -> i64 {
    let (mut t, mut nt, mut r, mut nr) = (0i64, 1i64, m, a.rem_euclid(m));
    while nr != 0 {
        let q = r / nr;
        (t, nt) = (nt, t - q * nt);
        (r, nr) = (nr, r - q * nr);
    }
    t.rem_euclid(m)
}

/// Automorphisms of one group under composition.
#[derive(Clone)]
pub struct AutGroup(pub Arc<QuotientGroup>);

impl GroupOps for AutGroup {
    type Elem = Endo;
    fn identity(&self) -> Endo {
        Endo::identity(self.0.clone())
    }
    fn mul(&self, a: &Endo, b: &Endo) -> Endo {
        a.compose_unchecked(b)
    }
    fn inv(&self, a: &Endo) -> Endo {
        a.inverse().expect("automorphism")
    }
}

/// The last filtration term `L_k` of `N_k` with a fixed `F_p`-basis.
pub struct Layer {
    group: Arc<QuotientGroup>,
    level: usize,
    basis: Vec<u32>,
    /// `elems[c]` is the element with coordinate index `c`.
    elems: Vec<u32>,
    coords: HashMap<u32, usize>,
}

impl Layer {
    /// `L_k` for `k = depth(group)`.
    pub fn top(group: Arc<QuotientGroup>) -> Result<Self> {
        let level = group.depth();
        Self::at(group, level)
    }

    /// The term of weight `>= level`, which must be elementary abelian.
    pub fn at(group: Arc<QuotientGroup>, level: usize) -> Result<Self> {
        let p = group.p();
        let members = group.layer(level).members().to_vec();
        for &a in &members {
            if group.pow(a, p as i64) != 0 {
                return Err(Error::Verification(format!("layer {level} is not of exponent p")));
            }
        }
        let basis = match group.model() {
            Model::Z { .. } => z_basis(&group, &members, level)?,
            _ => greedy_basis(&group, &members),
        };
        let d = basis.len();
        let count = (p as usize).pow(d as u32);
        if count != members.len() {
            return Err(Error::Verification(format!("layer {level} is not elementary abelian")));
        }
        let mut elems = Vec::with_capacity(count);
        let mut coords = HashMap::with_capacity(count);
        for c in 0..count {
            let mut e = 0u32;
            let mut rest = c;
            for &b in &basis {
                let k = rest % p as usize;
                rest /= p as usize;
                e = group.mul(e, group.pow(b, k as i64));
            }
            elems.push(e);
            coords.insert(e, c);
        }
        if coords.len() != count {
            return Err(Error::Verification("layer basis is not independent".into()));
        }
        Ok(Layer { group, level, basis, elems, coords })
    }

    pub fn group(&self) -> &Arc<QuotientGroup> {
        &self.group
    }
    pub fn level(&self) -> usize {
        self.level
    }
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
    pub fn basis(&self) -> &[u32] {
        &self.basis
    }
    pub fn len(&self) -> usize {
        self.elems.len()
    }
    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }
    pub fn elements(&self) -> &[u32] {
        &self.elems
    }

    /// Element with coordinate index `c` (base-`p` digits, first basis
    /// vector least significant).
    pub fn elem_at(&self, c: usize) -> u32 {
        self.elems[c]
    }

    pub fn elem(&self, coords: &[u8]) -> u32 {
        let p = self.group.p() as usize;
        let c = coords.iter().rev().fold(0usize, |acc, &v| acc * p + v as usize);
        self.elems[c]
    }

    pub fn index_of(&self, e: u32) -> Option<usize> {
        self.coords.get(&e).copied()
    }

    pub fn coords(&self, e: u32) -> Option<Vec<u8>> {
        let p = self.group.p() as usize;
        let mut c = self.index_of(e)?;
        Some(
            (0..self.dim())
                .map(|_| {
                    let v = (c % p) as u8;
                    c /= p;
                    v
                })
                .collect(),
        )
    }
}

/// Reduced row echelon basis of the degree-`level` parts, read back as
/// group elements.
fn z_basis(g: &QuotientGroup, members: &[u32], level: usize) -> Result<Vec<u32>> {
    let p = g.p() as i64;
    let vec_of = |e: u32| g.unit(e).expect("Z model").series().homogeneous(level).to_vec();
    let mut rows: Vec<Vec<u8>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for &e in members {
        let mut v = vec_of(e);
        for (row, &pc) in rows.iter().zip(&pivots) {
            let f = v[pc] as i64;
            if f != 0 {
                for (x, &y) in v.iter_mut().zip(row) {
                    *x = ((*x as i64 - f * y as i64).rem_euclid(p)) as u8;
                }
            }
        }
        if let Some(pc) = v.iter().position(|&x| x != 0) {
            let inv = mod_inv(v[pc] as i64, p);
            for x in v.iter_mut() {
                *x = (*x as i64 * inv % p) as u8;
            }
            for row in rows.iter_mut() {
                let f = row[pc] as i64;
                if f != 0 {
                    for (x, &y) in row.iter_mut().zip(&v) {
                        *x = ((*x as i64 - f * y as i64).rem_euclid(p)) as u8;
                    }
                }
            }
            rows.push(v);
            pivots.push(pc);
        }
    }
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by_key(|&i| pivots[i]);
    let by_vec: HashMap<Vec<u8>, u32> = members.iter().map(|&e| (vec_of(e), e)).collect();
    order
        .into_iter()
        .map(|i| {
            by_vec
                .get(&rows[i])
                .copied()
                .ok_or_else(|| Error::Verification("layer is not linear in the top degree".into()))
        })
        .collect()
}

/// First members in index order that enlarge the span.
fn greedy_basis(g: &QuotientGroup, members: &[u32]) -> Vec<u32> {
    let mut basis = Vec::new();
    let mut span = closure(g, &[]);
    for &e in members {
        if !span.contains(e) {
            span.add_generator(g, e);
            basis.push(e);
        }
    }
    basis
}

/// An element of `Hom(N_1, L)`: a `dim L x n` matrix over `F_p`, column `j`
/// holding the coordinates of the image of `x_j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct HomMatrix {
    pub p: u32,
    pub rows: usize,
    pub cols: usize,
    /// Column-major entries.
    pub entries: Vec<u8>,
}

impl HomMatrix {
    pub fn zero(p: u32, rows: usize, cols: usize) -> Self {
        HomMatrix { p, rows, cols, entries: vec![0; rows * cols] }
    }

    /// The `idx`-th matrix in the enumeration order of [`hom_space`].
    pub fn from_index(p: u32, rows: usize, cols: usize, mut idx: u64) -> Self {
        let entries = (0..rows * cols)
            .map(|_| {
                let v = (idx % p as u64) as u8;
                idx /= p as u64;
                v
            })
            .collect();
        HomMatrix { p, rows, cols, entries }
    }

    pub fn column(&self, j: usize) -> &[u8] {
        &self.entries[j * self.rows..(j + 1) * self.rows]
    }

    pub fn set(&mut self, r: usize, j: usize, v: u8) {
        self.entries[j * self.rows + r] = v % self.p as u8;
    }

    pub fn add(&self, other: &HomMatrix) -> Result<HomMatrix> {
        if (self.p, self.rows, self.cols) != (other.p, other.rows, other.cols) {
            return Err(Error::ParamMismatch("matrix shapes differ".into()));
        }
        let p = self.p as u16;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| ((a as u16 + b as u16) % p) as u8)
            .collect();
        Ok(HomMatrix { entries, ..self.clone() })
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0)
    }
}

/// Size of `Hom(N_1, L)` and its enumeration.
pub struct HomSpace {
    pub p: u32,
    pub rows: usize,
    pub cols: usize,
}

impl HomSpace {
    pub fn count(&self) -> u128 {
        (self.p as u128).pow((self.rows * self.cols) as u32)
    }

    pub fn get(&self, idx: u64) -> HomMatrix {
        HomMatrix::from_index(self.p, self.rows, self.cols, idx)
    }

    pub fn iter(&self) -> impl Iterator<Item = HomMatrix> + '_ {
        (0..self.count() as u64).map(move |i| self.get(i))
    }
}

/// `Hom(N_1, L)` for the layer `L`.
pub fn hom_space(layer: &Layer) -> HomSpace {
    HomSpace {
        p: layer.group.p(),
        rows: layer.dim(),
        cols: layer.group.rank(),
    }
}

/// `i(f)`: `x_j -> f([x_j]) x_j`.
pub fn i_embed(layer: &Layer, f: &HomMatrix) -> Result<Endo> {
    if f.rows != layer.dim() || f.cols != layer.group.rank() || f.p != layer.group.p() {
        return Err(Error::ParamMismatch(format!(
            "matrix {}x{} against layer of dimension {}",
            f.rows,
            f.cols,
            layer.dim()
        )));
    }
    let g = &layer.group;
    let images = (0..f.cols)
        .map(|j| g.mul(layer.elem(f.column(j)), g.generator(j + 1)))
        .collect();
    Endo::new(g.clone(), images)
}

fn tuple_count(base: usize, n: usize, budget: u128) -> Result<usize> {
    let total = (base as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > budget {
        return Err(Error::budget("endomorphism enumeration", total, budget));
    }
    Ok(total as usize)
}

/// Default cap on enumerated image tuples.
pub const ENUM_BUDGET: u128 = 1 << 22;

/// Every automorphism of `g`.
pub fn enumerate_aut(g: &Arc<QuotientGroup>) -> Result<Vec<Endo>> {
    let order = g.order();
    let n = g.rank();
    let total = tuple_count(order, n, ENUM_BUDGET)?;
    let p = g.p();
    let mut out = Vec::new();
    for idx in 0..total {
        let mut rest = idx;
        let images: Vec<u32> = (0..n)
            .map(|_| {
                let v = (rest % order) as u32;
                rest /= order;
                v
            })
            .collect();
        let m: Vec<Vec<u8>> = (0..n).map(|r| images.iter().map(|&e| g.hp_coords(e)[r]).collect()).collect();
        if det_mod_p(m, p) != 0 {
            out.push(Endo::new(g.clone(), images)?);
        }
    }
    Ok(out)
}

/// Every automorphism with `ia_level >= level`: `x_i -> x_i c_i` with `c_i`
/// in the `(level+1)`-th term.
pub fn enumerate_iap(g: &Arc<QuotientGroup>, level: usize) -> Result<Vec<Endo>> {
    let layer = g.layer(level + 1);
    let cs = layer.members();
    let n = g.rank();
    let total = tuple_count(cs.len(), n, ENUM_BUDGET)?;
    let gens = g.generators();
    let mut out = Vec::with_capacity(total);
    for idx in 0..total {
        let mut rest = idx;
        let images: Vec<u32> = (0..n)
            .map(|i| {
                let c = cs[rest % cs.len()];
                rest /= cs.len();
                g.mul(gens[i], c)
            })
            .collect();
        out.push(Endo::new(g.clone(), images)?);
    }
    Ok(out)
}
