//! Fully enumerated finite p-group quotients of the free group.
//!
//! Every group is stored as the breadth-first Cayley graph on the letters
//! `x1..xn, x1^-1..xn^-1`, so each element carries the word that first
//! reached it. Elements also carry a filtration weight: `g` lies in the
//! `l`-th term of the series iff `weight(g) >= l`.

mod build;
mod cache;
mod ns2;
mod series;
mod subgroup;

use std::fmt;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupOps;
use crate::truncalg::{Shape, UnitElement};
use crate::words::Word;

pub use build::{build_ns2, build_nz, build_tilde, coset_quotient, stallings_ambient_depth, Builder, DEFAULT_ORDER_BUDGET};
pub use cache::{load_group, save_group, CACHE_VERSION};
pub use ns2::{Ns2Group, PcElementNS2};
pub use series::{
    derived_subgroup, frattini, lower_central_series, stallings_layers, stallings_series, verify_pcovering,
    zassenhaus_by_definition, series_fuzz, PCoveringReport, SeriesFuzzReport,
};
pub use subgroup::{closure, normal_closure, Subgroup};

/// Weight of the identity element.
pub const INFINITE_WEIGHT: u8 = u8::MAX;

/// Groups up to this order keep a full multiplication table.
pub const TABLE_LIMIT: usize = 2500;

/// Which mod-p central series a quotient belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Series {
    /// Zassenhaus (mod-p dimension) series.
    Z,
    /// Stallings (lower p-central) series.
    S,
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Series::Z => "Z",
            Series::S => "S",
        })
    }
}

impl std::str::FromStr for Series {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Z" | "z" => Ok(Series::Z),
            "S" | "s" => Ok(Series::S),
            _ => Err(Error::InvalidArgument(format!("unknown series {s:?}"))),
        }
    }
}

/// How the elements of a quotient are realized.
#[derive(Clone, Debug)]
pub enum Model {
    /// Units of the truncated algebra of degree `k`.
    Z { shape: Shape, units: Vec<UnitElement> },
    /// Polycyclic class-2 model of `N^S_2`.
    Ns2 { pcs: Vec<PcElementNS2> },
    /// Quotient of an enumerated ambient group by a normal subgroup;
    /// `reps[c]` is the least ambient index in coset `c`.
    Coset { ambient_order: usize, reps: Vec<u32> },
}

impl Model {
    fn tag(&self) -> &'static str {
        match self {
            Model::Z { .. } => "Z",
            Model::Ns2 { .. } => "NS2",
            Model::Coset { .. } => "Coset",
        }
    }
}

/// An enumerated finite group generated by `x1..xn`.
#[derive(Clone)]
pub struct QuotientGroup {
    label: String,
    p: u32,
    n: usize,
    depth: usize,
    parent: Vec<u32>,
    letter: Vec<u8>,
    wit_off: Vec<u32>,
    wit: Vec<u8>,
    gen_table: Vec<u32>,
    inverse: Vec<u32>,
    weight: Vec<u8>,
    hp: Vec<u8>,
    table: Option<Vec<u16>>,
    model: Model,
}

impl fmt::Debug for QuotientGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuotientGroup")
            .field("label", &self.label)
            .field("p", &self.p)
            .field("n", &self.n)
            .field("depth", &self.depth)
            .field("order", &self.order())
            .field("model", &self.model.tag())
            .finish()
    }
}

/// Raw breadth-first enumeration, before the group structure is attached.
pub(crate) struct Enumeration<T> {
    pub payload: Vec<T>,
    pub parent: Vec<u32>,
    pub letter: Vec<u8>,
    pub gen_table: Vec<u32>,
}

/// Breadth-first closure of the identity under right multiplication by the
/// `2n` letters. Fails once more than `limit` elements are found.
pub(crate) fn enumerate<T, F>(n: usize, identity: T, step: F, limit: usize) -> Result<Enumeration<T>>
where
    T: Clone + Eq + Hash,
    F: Fn(&T, usize) -> T,
{
    let mut index = std::collections::HashMap::new();
    index.insert(identity.clone(), 0u32);
    let mut e = Enumeration {
        payload: vec![identity],
        parent: vec![0],
        letter: vec![0],
        gen_table: Vec::new(),
    };
    let mut head = 0;
    while head < e.payload.len() {
        let cur = e.payload[head].clone();
        for l in 0..2 * n {
            let next = step(&cur, l);
            let idx = match index.get(&next) {
                Some(&i) => i,
                None => {
                    let i = e.payload.len();
                    if i >= limit {
                        return Err(Error::budget("group enumeration", i as u128 + 1, limit as u128));
                    }
                    index.insert(next.clone(), i as u32);
                    e.payload.push(next);
                    e.parent.push(head as u32);
                    e.letter.push(l as u8);
                    i as u32
                }
            };
            e.gen_table.push(idx);
        }
        head += 1;
    }
    Ok(e)
}

impl QuotientGroup {
    pub(crate) fn assemble<T>(
        label: String,
        p: u32,
        n: usize,
        depth: usize,
        en: Enumeration<T>,
        weight: Vec<u8>,
        model: impl FnOnce(Vec<T>) -> Model,
    ) -> Self {
        let Enumeration { payload, parent, letter, gen_table } = en;
        Self::from_parts(label, p, n, depth, parent, letter, gen_table, weight, model(payload))
    }

    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_parts(
        label: String,
        p: u32,
        n: usize,
        depth: usize,
        parent: Vec<u32>,
        letter: Vec<u8>,
        gen_table: Vec<u32>,
        weight: Vec<u8>,
        model: Model,
    ) -> Self {
        let order = parent.len();
        let mut wit_off = Vec::with_capacity(order + 1);
        let mut wit = Vec::new();
        let mut hp = vec![0u8; order * n];
        wit_off.push(0u32);
        for e in 0..order {
            if e > 0 {
                let par = parent[e] as usize;
                let (s, t) = (wit_off[par] as usize, wit_off[par + 1] as usize);
                wit.extend_from_within(s..t);
                let l = letter[e] as usize;
                wit.push(l as u8);
                for i in 0..n {
                    hp[e * n + i] = hp[par * n + i];
                }
                let (g, delta) = if l < n { (l, 1) } else { (l - n, p - 1) };
                hp[e * n + g] = ((hp[e * n + g] as u32 + delta) % p) as u8;
            }
            wit_off.push(wit.len() as u32);
        }
        let mut g = QuotientGroup {
            label,
            p,
            n,
            depth,
            parent,
            letter,
            wit_off,
            wit,
            gen_table,
            inverse: Vec::new(),
            weight,
            hp,
            table: None,
            model,
        };
        g.inverse = (0..order as u32)
            .map(|e| {
                let mut acc = 0u32;
                for &l in g.witness_letters(e).iter().rev() {
                    acc = g.step(acc, g.flip(l as usize));
                }
                acc
            })
            .collect();
        if order <= TABLE_LIMIT {
            let mut table = vec![0u16; order * order];
            for a in 0..order {
                table[a * order] = a as u16;
                for b in 1..order {
                    let pa = table[a * order + g.parent[b] as usize] as u32;
                    table[a * order + b] = g.step(pa, g.letter[b] as usize) as u16;
                }
            }
            g.table = Some(table);
        }
        g
    }

    pub fn label(&self) -> &str {
        &self.label
    }
    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn rank(&self) -> usize {
        self.n
    }
    /// Index `k` of `N_k`: the largest finite weight.
    pub fn depth(&self) -> usize {
        self.depth
    }
    pub fn order(&self) -> usize {
        self.parent.len()
    }
    pub fn model(&self) -> &Model {
        &self.model
    }
    pub fn has_table(&self) -> bool {
        self.table.is_some()
    }

    /// `log_p |G|`.
    pub fn log_order(&self) -> u32 {
        log_p(self.order(), self.p)
    }

    /// Index of `x_i` (1-based).
    pub fn generator(&self, i: usize) -> u32 {
        self.step(0, i - 1)
    }

    pub fn generators(&self) -> Vec<u32> {
        (1..=self.n).map(|i| self.generator(i)).collect()
    }

    #[inline]
    fn flip(&self, l: usize) -> usize {
        if l < self.n {
            l + self.n
        } else {
            l - self.n
        }
    }

    /// Right multiplication by a letter (`0..n` positive, `n..2n` inverse).
    #[inline]
    pub fn step(&self, e: u32, l: usize) -> u32 {
        self.gen_table[e as usize * 2 * self.n + l]
    }

    pub(crate) fn gen_table(&self) -> &[u32] {
        &self.gen_table
    }
    pub(crate) fn parents(&self) -> &[u32] {
        &self.parent
    }
    pub(crate) fn letters(&self) -> &[u8] {
        &self.letter
    }
    pub(crate) fn weights(&self) -> &[u8] {
        &self.weight
    }

    pub fn parent(&self, e: u32) -> u32 {
        self.parent[e as usize]
    }

    /// Letter of the last step of `e`'s witness.
    pub fn last_letter(&self, e: u32) -> usize {
        self.letter[e as usize] as usize
    }

    pub fn witness_letters(&self, e: u32) -> &[u8] {
        let e = e as usize;
        &self.wit[self.wit_off[e] as usize..self.wit_off[e + 1] as usize]
    }

    pub fn witness(&self, e: u32) -> Word {
        let n = self.n as i32;
        let letters: Vec<i32> = self
            .witness_letters(e)
            .iter()
            .map(|&l| {
                let l = l as i32;
                if l < n {
                    l + 1
                } else {
                    -(l - n + 1)
                }
            })
            .collect();
        Word::from_letters(self.n, &letters).expect("witness letters are in range")
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.table {
            Some(t) => t[a as usize * self.order() + b as usize] as u32,
            None => self.witness_letters(b).iter().fold(a, |acc, &l| self.step(acc, l as usize)),
        }
    }

    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.inverse[a as usize]
    }

    pub fn pow(&self, a: u32, e: i64) -> u32 {
        GroupOps::pow(self, &a, e)
    }

    pub fn commutator(&self, a: u32, b: u32) -> u32 {
        self.mul(self.mul(self.mul(a, b), self.inv(a)), self.inv(b))
    }

    /// `b a b^-1`.
    pub fn conjugate(&self, a: u32, b: u32) -> u32 {
        self.mul(self.mul(b, a), self.inv(b))
    }

    pub fn element_order(&self, a: u32) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Filtration weight; [`INFINITE_WEIGHT`] for the identity.
    pub fn weight(&self, e: u32) -> u8 {
        self.weight[e as usize]
    }

    /// Whether `e` lies in the `l`-th term of the series.
    pub fn in_layer(&self, e: u32, l: usize) -> bool {
        l <= 1 || self.weight[e as usize] as usize >= l
    }

    /// Coordinates of `e` in `H_p = G / [G,G]G^p`.
    pub fn hp_coords(&self, e: u32) -> &[u8] {
        &self.hp[e as usize * self.n..(e as usize + 1) * self.n]
    }

    /// Image of a word.
    pub fn eval(&self, w: &Word) -> Result<u32> {
        if w.rank() != self.n {
            return Err(Error::RankMismatch { left: w.rank(), right: self.n });
        }
        Ok(w.letters().iter().fold(0u32, |acc, &a| {
            let l = if a > 0 { a as usize - 1 } else { self.n + (-a) as usize - 1 };
            self.step(acc, l)
        }))
    }

    pub fn parse(&self, s: &str) -> Result<u32> {
        self.eval(&Word::parse(self.n, s)?)
    }

    /// Elements of the `l`-th filtration term.
    pub fn layer(&self, l: usize) -> Subgroup {
        let members: Vec<u32> = (0..self.order() as u32).filter(|&e| self.in_layer(e, l)).collect();
        Subgroup::from_members(self.order(), members)
    }

    /// For every element of `self`, the image of its witness in `target`.
    /// This is the natural map when `target` is a quotient of `self` with
    /// the same generators.
    pub fn project_to(&self, target: &QuotientGroup) -> Result<Vec<u32>> {
        if self.n != target.n {
            return Err(Error::RankMismatch { left: self.n, right: target.n });
        }
        let mut img = vec![0u32; self.order()];
        for e in 1..self.order() {
            img[e] = target.step(img[self.parent[e] as usize], self.letter[e] as usize);
        }
        Ok(img)
    }

    /// Checks that `project_to(target)` is a surjective homomorphism, by
    /// comparing right multiplication by each letter on both sides.
    pub fn is_quotient_map(&self, target: &QuotientGroup, proj: &[u32]) -> bool {
        if proj.len() != self.order() {
            return false;
        }
        for e in 0..self.order() as u32 {
            for l in 0..2 * self.n {
                if proj[self.step(e, l) as usize] != target.step(proj[e as usize], l) {
                    return false;
                }
            }
        }
        let mut hit = vec![false; target.order()];
        for &x in proj {
            hit[x as usize] = true;
        }
        hit.into_iter().all(|h| h)
    }

    /// Unit-algebra image of `e` in the Z model.
    pub fn unit(&self, e: u32) -> Option<&UnitElement> {
        match &self.model {
            Model::Z { units, .. } => Some(&units[e as usize]),
            _ => None,
        }
    }
}

impl GroupOps for QuotientGroup {
    type Elem = u32;
    fn identity(&self) -> u32 {
        0
    }
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        QuotientGroup::mul(self, *a, *b)
    }
    fn inv(&self, a: &u32) -> u32 {
        QuotientGroup::inv(self, *a)
    }
}

pub(crate) fn log_p(mut m: usize, p: u32) -> u32 {
    let mut k = 0;
    while m > 1 {
        m /= p as usize;
        k += 1;
    }
    k
}

#[cfg(test)]
mod tests;
