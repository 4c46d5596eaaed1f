//! Series computed from their definitions inside an enumerated group.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{closure, normal_closure, Builder, QuotientGroup, Series, Subgroup};
use crate::error::{Error, Result};

/// `[A, B]` for normal subgroups: the normal closure of the commutators of
/// their generators.
fn commutator_subgroup(g: &QuotientGroup, a: &Subgroup, b: &Subgroup) -> Subgroup {
    let mut gens = Vec::new();
    for &x in a.generators() {
        for &y in b.generators() {
            gens.push(g.commutator(x, y));
        }
    }
    normal_closure(g, &gens)
}

/// `[G, G]`.
pub fn derived_subgroup(g: &QuotientGroup) -> Subgroup {
    let xs = g.generators();
    let mut gens = Vec::new();
    for &x in &xs {
        for &y in &xs {
            gens.push(g.commutator(x, y));
        }
    }
    normal_closure(g, &gens)
}

/// `G_1, .., G_len` with `G_{i+1} = [G, G_i]`.
pub fn lower_central_series(g: &QuotientGroup, len: usize) -> Vec<Subgroup> {
    let whole = closure(g, &g.generators());
    let mut out = vec![whole.clone()];
    while out.len() < len {
        let next = commutator_subgroup(g, &whole, out.last().unwrap());
        out.push(next);
    }
    out
}

/// Subgroup generated by the `m`-th powers of all members.
fn power_subgroup(g: &QuotientGroup, s: &Subgroup, m: i64) -> Subgroup {
    let gens: Vec<u32> = s.members().iter().map(|&x| g.pow(x, m)).collect();
    closure(g, &gens)
}

/// `prod_{i p^j >= k} (G_i)^{p^j}`, straight from the definition.
pub fn zassenhaus_by_definition(g: &QuotientGroup, k: usize) -> Subgroup {
    let p = g.p() as usize;
    let lcs = lower_central_series(g, k);
    let mut gens = Vec::new();
    for (idx, gi) in lcs.iter().enumerate() {
        let i = idx + 1;
        // smallest j with i p^j >= k
        let mut pj = 1usize;
        while i * pj < k {
            pj *= p;
        }
        gens.extend(power_subgroup(g, gi, pj as i64).generators().iter().copied());
    }
    normal_closure(g, &gens)
}

/// `S_1 .. S_len` with `S_{l+1} = [G, S_l] S_l^p`.
pub fn stallings_series(g: &QuotientGroup, len: usize) -> Vec<Subgroup> {
    let whole = closure(g, &g.generators());
    let mut out = vec![whole.clone()];
    while out.len() < len {
        let s = out.last().unwrap();
        let mut gens: Vec<u32> = commutator_subgroup(g, &whole, s).generators().to_vec();
        gens.extend(power_subgroup(g, s, g.p() as i64).generators().iter().copied());
        out.push(normal_closure(g, &gens));
    }
    out
}

/// `S_1 .. S_{lmax+1}` inside `g` together with `dim L^S_l` for `l <= lmax`.
pub fn stallings_layers(g: &QuotientGroup, lmax: usize) -> (Vec<Subgroup>, Vec<u32>) {
    let s = stallings_series(g, lmax + 1);
    let p = g.p() as usize;
    let dims = s
        .windows(2)
        .map(|w| super::log_p(w[0].order() / w[1].order(), p as u32))
        .collect();
    (s, dims)
}

/// `[G, G] G^p`.
pub fn frattini(g: &QuotientGroup) -> Subgroup {
    let xs = g.generators();
    let mut gens = Vec::new();
    for &x in &xs {
        gens.push(g.pow(x, g.p() as i64));
        for &y in &xs {
            gens.push(g.commutator(x, y));
        }
    }
    normal_closure(g, &gens)
}

/// Outcome of a p-covering check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PCoveringReport {
    pub kernel_order: usize,
    pub central: bool,
    pub elementary_abelian: bool,
    pub in_frattini: bool,
}

impl PCoveringReport {
    pub fn passed(&self) -> bool {
        self.central && self.elementary_abelian && self.in_frattini
    }
}

/// Checks that `total -> base` (witness projection) is a p-covering: the
/// kernel is central, elementary abelian and inside the Frattini subgroup.
pub fn verify_pcovering(total: &QuotientGroup, base: &QuotientGroup) -> Result<PCoveringReport> {
    let proj = total.project_to(base)?;
    if !total.is_quotient_map(base, &proj) {
        return Err(Error::NonSurjective);
    }
    let members: Vec<u32> = (0..total.order() as u32).filter(|&e| proj[e as usize] == 0).collect();
    let kernel = Subgroup::from_members(total.order(), members);
    let p = total.p() as i64;
    let elementary_abelian = kernel.members().iter().all(|&x| total.pow(x, p) == 0)
        && kernel
            .members()
            .iter()
            .all(|&x| kernel.members().iter().all(|&y| total.mul(x, y) == total.mul(y, x)));
    Ok(PCoveringReport {
        kernel_order: kernel.order(),
        central: kernel.is_central_in(total),
        elementary_abelian,
        in_frattini: kernel.is_subset_of(&frattini(total)),
    })
}

/// Outcome of [`series_fuzz`].
#[derive(Clone, Debug, Serialize)]
pub struct SeriesFuzzReport {
    pub p: u32,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub checks: u64,
    pub failures: Vec<String>,
}

impl SeriesFuzzReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.checks > 0
    }
}

/// Random pairs in `N^Z_3` and `N^S_2`: `[G_i, G_j] <= G_{i+j}` in both,
/// `G_i^p <= G_{pi}` for Z and `G_i^p <= G_{i+1}` for S.
pub fn series_fuzz(builder: &Builder, p: u32, n: usize, samples: usize, seed: u64) -> Result<SeriesFuzzReport> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SeriesFuzzReport { p, n, samples, seed, checks: 0, failures: Vec::new() };
    for (series, depth) in [(Series::Z, 3), (Series::S, 2)] {
        let g = builder.quotient(series, p, n, depth)?;
        let weight = |e: u32| g.weight(e) as usize;
        for _ in 0..samples {
            let x = rng.gen_range(0..g.order() as u32);
            let y = rng.gen_range(0..g.order() as u32);
            let c = g.commutator(x, y);
            let power_level = match series {
                Series::Z => weight(x).saturating_mul(p as usize),
                Series::S => weight(x).saturating_add(1),
            };
            rep.checks += 2;
            if !g.in_layer(c, (weight(x) + weight(y)).min(depth + 1)) {
                rep.failures.push(format!("{series}: [{}, {}] = {}", g.witness(x), g.witness(y), g.witness(c)));
            }
            if !g.in_layer(g.pow(x, p as i64), power_level.min(depth + 1)) {
                rep.failures.push(format!("{series}: ({})^{p}", g.witness(x)));
            }
        }
    }
    Ok(rep)
}
