use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use super::{cache, enumerate, normal_closure, Model, Ns2Group, QuotientGroup, Series, Subgroup, INFINITE_WEIGHT};
use crate::error::{Error, Result};
use crate::group::GroupOps;
use crate::truncalg::{Shape, UnitElement, UnitGroup, DEFAULT_COEFF_BUDGET};

/// Largest group order enumerated by default.
pub const DEFAULT_ORDER_BUDGET: usize = 1 << 18;

/// `N^Z_k = Gamma / Gamma^Z_{k+1}` as units of the degree-`k` algebra.
pub fn build_nz(p: u32, n: usize, k: usize) -> Result<QuotientGroup> {
    build_nz_with(p, n, k, DEFAULT_COEFF_BUDGET, DEFAULT_ORDER_BUDGET)
}

pub(crate) fn units_step(shape: Shape) -> Result<impl Fn(&UnitElement, usize) -> UnitElement> {
    let n = shape.rank();
    let mut letters: Vec<UnitElement> = (1..=n).map(|i| UnitElement::generator(shape, i)).collect::<Result<_>>()?;
    let invs: Vec<UnitElement> = letters.iter().map(UnitElement::inv).collect();
    letters.extend(invs);
    let ug = UnitGroup(shape);
    Ok(move |u: &UnitElement, l: usize| ug.mul(u, &letters[l]))
}

pub(crate) fn build_nz_with(p: u32, n: usize, k: usize, coeff_budget: u128, order_budget: usize) -> Result<QuotientGroup> {
    let shape = Shape::with_budget(p, n, k, coeff_budget)?;
    let step = units_step(shape)?;
    let en = enumerate(n, UnitElement::one(shape), step, order_budget)?;
    let weight = en
        .payload
        .iter()
        .map(|u| u.zweight().map_or(INFINITE_WEIGHT, |w| w as u8))
        .collect();
    Ok(QuotientGroup::assemble(format!("NZ(p={p},n={n},k={k})"), p, n, k, en, weight, |units| {
        Model::Z { shape, units }
    }))
}

/// `N^S_2` in the polycyclic model.
pub fn build_ns2(p: u32, n: usize) -> Result<QuotientGroup> {
    let pc = Ns2Group::new(p, n)?;
    if pc.order() > DEFAULT_ORDER_BUDGET as u128 {
        return Err(Error::budget("N^S_2 order", pc.order(), DEFAULT_ORDER_BUDGET as u128));
    }
    let letters: Vec<_> = (0..n)
        .map(|i| pc.generator(i))
        .chain((0..n).map(|i| pc.inv(&pc.generator(i))))
        .collect();
    let en = enumerate(n, pc.identity(), |x, l| pc.mul(x, &letters[l]), DEFAULT_ORDER_BUDGET)?;
    let weight = en.payload.iter().map(|x| pc.weight(x)).collect();
    Ok(QuotientGroup::assemble(format!("NS2(p={p},n={n})"), p, n, 2, en, weight, |pcs| Model::Ns2 { pcs }))
}

/// `ambient / normal`. Each coset is labelled by its least ambient index and
/// weighted by the largest `levels` value among its members.
pub fn coset_quotient(
    ambient: &QuotientGroup,
    normal: &Subgroup,
    levels: &[u8],
    depth: usize,
    label: String,
) -> Result<QuotientGroup> {
    if !normal.is_normal_in(ambient) {
        return Err(Error::InvalidArgument("coset quotient needs a normal subgroup".into()));
    }
    let order = ambient.order();
    let mut coset_of = vec![u32::MAX; order];
    let mut reps = Vec::new();
    let mut cw = Vec::new();
    for a in 0..order as u32 {
        if coset_of[a as usize] != u32::MAX {
            continue;
        }
        let c = reps.len() as u32;
        let mut w = 0u8;
        for &r in normal.members() {
            let e = ambient.mul(a, r);
            coset_of[e as usize] = c;
            w = w.max(levels[e as usize]);
        }
        reps.push(a);
        cw.push(w);
    }
    let en = enumerate(ambient.rank(), 0u32, |&c, l| coset_of[ambient.step(reps[c as usize], l) as usize], order)?;
    let weight = en.payload.iter().map(|&c| cw[c as usize]).collect();
    let bfs_reps = en.payload.iter().map(|&c| reps[c as usize]).collect::<Vec<_>>();
    Ok(QuotientGroup::assemble(label, ambient.p(), ambient.rank(), depth, en, weight, |_| {
        Model::Coset { ambient_order: order, reps: bfs_reps }
    }))
}

/// `R = [Gamma, Gamma^Z_{k+1}] (Gamma^Z_{k+1})^p` inside `ambient`.
pub(crate) fn tilde_relations(ambient: &QuotientGroup, k: usize) -> Subgroup {
    let p = ambient.p() as i64;
    let xs = ambient.generators();
    let mut gens = Vec::new();
    for &z in ambient.layer(k + 1).members() {
        gens.push(ambient.pow(z, p));
        for &x in &xs {
            gens.push(ambient.commutator(x, z));
        }
    }
    normal_closure(ambient, &gens)
}

/// `N~_{k+1} = Gamma / [Gamma, Gamma^Z_{k+1}] (Gamma^Z_{k+1})^2` for `p = 2`,
/// as a quotient of `N^Z_{2k+1}`.
/// Smallest `d` with `Gamma^Z_{d+1} <= Gamma^S_{k+1}`, using
/// `Gamma^Z_m = prod_{i p^j >= m} Gamma_i^{p^j}` and
/// `Gamma_i^{p^j} <= Gamma^S_{i+j}`: every `j` must have
/// `ceil(m / p^j) + j >= k + 1`.
pub fn stallings_ambient_depth(p: u32, k: usize) -> usize {
    let ok = |m: usize| (0..=k).all(|j| m.div_ceil((p as usize).pow(j as u32)) + j > k);
    (1..).find(|&m| ok(m)).expect("m = p^k works") - 1
}

pub fn build_tilde(p: u32, n: usize, k: usize) -> Result<QuotientGroup> {
    if p != 2 {
        return Err(Error::InvalidArgument("tilde quotients are only built for p = 2".into()));
    }
    let ambient = build_nz(p, n, 2 * (k + 1) - 1)?;
    tilde_from_ambient(&ambient, k)
}

pub(crate) fn tilde_from_ambient(ambient: &QuotientGroup, k: usize) -> Result<QuotientGroup> {
    let r = tilde_relations(ambient, k);
    let (p, n) = (ambient.p(), ambient.rank());
    coset_quotient(ambient, &r, ambient.weights(), k + 1, format!("NT(p={p},n={n},k={})", k + 1))
}

type Key = (&'static str, u32, usize, usize);

/// Memoizing constructor with budgets and an optional disk cache.
pub struct Builder {
    pub order_budget: usize,
    pub coeff_budget: u128,
    pub cache_dir: Option<PathBuf>,
    memo: Mutex<HashMap<Key, Arc<QuotientGroup>>>,
}

impl Default for Builder {
    fn default() -> Self {
        Builder {
            order_budget: DEFAULT_ORDER_BUDGET,
            coeff_budget: DEFAULT_COEFF_BUDGET,
            cache_dir: None,
            memo: Mutex::new(HashMap::new()),
        }
    }
}

impl Builder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_cache(mut self, dir: impl Into<PathBuf>) -> Self {
        self.cache_dir = Some(dir.into());
        self
    }

    fn memo<F: FnOnce() -> Result<QuotientGroup>>(&self, key: Key, make: F) -> Result<Arc<QuotientGroup>> {
        if let Some(g) = self.memo.lock().unwrap().get(&key) {
            return Ok(g.clone());
        }
        let g = Arc::new(make()?);
        self.memo.lock().unwrap().insert(key, g.clone());
        Ok(g)
    }

    pub fn nz(&self, p: u32, n: usize, k: usize) -> Result<Arc<QuotientGroup>> {
        self.memo(("Z", p, n, k), || {
            if let Some(dir) = &self.cache_dir {
                let path = cache::cache_path(dir, "Z", p, n, k);
                if let Ok(g) = cache::load_group(&path) {
                    return Ok(g);
                }
                let g = build_nz_with(p, n, k, self.coeff_budget, self.order_budget)?;
                // a failed write only costs a rebuild next time
                let _ = cache::save_group(&g, &path);
                return Ok(g);
            }
            build_nz_with(p, n, k, self.coeff_budget, self.order_budget)
        })
    }

    pub fn ns2(&self, p: u32, n: usize) -> Result<Arc<QuotientGroup>> {
        self.memo(("NS2", p, n, 2), || build_ns2(p, n))
    }

    pub fn tilde(&self, p: u32, n: usize, k: usize) -> Result<Arc<QuotientGroup>> {
        if p != 2 {
            return Err(Error::InvalidArgument("tilde quotients are only built for p = 2".into()));
        }
        let ambient = self.nz(p, n, 2 * k + 1)?;
        self.memo(("T", p, n, k), || tilde_from_ambient(&ambient, k))
    }

    /// `N^S_k` as the quotient of `N^Z_d` by its Stallings term `S_{k+1}`,
    /// with `d` from [`stallings_ambient_depth`].
    pub fn ns_coset(&self, p: u32, n: usize, k: usize) -> Result<Arc<QuotientGroup>> {
        let depth = stallings_ambient_depth(p, k);
        let ambient = self.nz(p, n, depth)?;
        self.memo(("SC", p, n, k), || {
            let s = super::stallings_series(&ambient, k + 1);
            let mut levels = vec![0u8; ambient.order()];
            for (l, sub) in s.iter().enumerate() {
                for &m in sub.members() {
                    levels[m as usize] = (l + 1) as u8;
                }
            }
            for &m in s[k].members() {
                levels[m as usize] = INFINITE_WEIGHT;
            }
            coset_quotient(&ambient, &s[k], &levels, k, format!("NSC(p={p},n={n},k={k})"))
        })
    }

    /// `N^•_k` for either series.
    pub fn quotient(&self, series: Series, p: u32, n: usize, k: usize) -> Result<Arc<QuotientGroup>> {
        match (series, k) {
            (Series::Z, _) | (Series::S, 0 | 1) => self.nz(p, n, k),
            (Series::S, 2) => self.ns2(p, n),
            (Series::S, _) => self.ns_coset(p, n, k),
        }
    }
}
