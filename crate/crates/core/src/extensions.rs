//! Verification of the extension `Hom(N_1, L_{k+1}) -> Aut N_{k+1} -> Aut N_k`.
//!
//! Every verifier returns a [`Report`] made of named legs. Legs whose pair
//! count exceeds [`PAIR_BUDGET`] are sampled and marked as such, and every
//! verifier carries a negative-control leg that must reject a broken input.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::endos::{enumerate_aut, enumerate_iap, hom_space, i_embed, Endo, HomMatrix, Layer};
use crate::error::{Error, Result};
use crate::quotients::{Builder, QuotientGroup, Series};
use crate::truncalg::{Shape, TruncSeries, UnitElement};
use crate::words::{alternating_commutator, Word};

/// Exhaustive legs are capped at this many checks.
pub const PAIR_BUDGET: u128 = 1 << 22;

/// Samples drawn by a sampled leg.
pub const SAMPLES: usize = 4096;

/// Report schema version.
pub const REPORT_VERSION: u32 = 1;

/// `(p, n, k, series)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Ctx {
    pub p: u32,
    pub n: usize,
    pub k: usize,
    pub series: Series,
}

impl Ctx {
    pub fn new(p: u32, n: usize, k: usize, series: Series) -> Result<Self> {
        if !crate::is_prime(p) {
            return Err(Error::InvalidArgument(format!("{p} is not prime")));
        }
        if n < 2 {
            return Err(Error::InvalidArgument("rank must be at least 2".into()));
        }
        if k < 1 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        Ok(Ctx { p, n, k, series })
    }
}

impl fmt::Display for Ctx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, p={}, n={}, k={})", self.series, self.p, self.n, self.k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exhaustive,
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Leg {
    pub name: String,
    pub mode: Mode,
    pub count: u64,
    pub pass: bool,
}

impl Leg {
    pub fn new(name: &str, mode: Mode, count: u64, pass: bool) -> Self {
        Leg { name: name.to_string(), mode, count, pass }
    }
}

/// JSON report shared by all verifiers.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub pcentral_report: u32,
    pub ctx: serde_json::Value,
    pub legs: Vec<Leg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
}

impl Report {
    pub fn new(ctx: impl Serialize) -> Self {
        Report {
            pcentral_report: REPORT_VERSION,
            ctx: serde_json::to_value(ctx).expect("context serializes"),
            legs: Vec::new(),
            witness: None,
        }
    }

    pub fn push(&mut self, leg: Leg) {
        self.legs.push(leg);
    }

    pub fn passed(&self) -> bool {
        !self.legs.is_empty() && self.legs.iter().all(|l| l.pass)
    }

    pub fn leg(&self, name: &str) -> Option<&Leg> {
        self.legs.iter().find(|l| l.name == name)
    }
}

fn mode_for(count: u128) -> Mode {
    if count <= PAIR_BUDGET {
        Mode::Exhaustive
    } else {
        Mode::Sampled
    }
}

/// The swap `x1 <-> x2`.
pub fn swap12(g: &Arc<QuotientGroup>) -> Endo {
    let mut images = g.generators();
    images.swap(0, 1);
    Endo::new(g.clone(), images).expect("valid images")
}

/// Outcome of [`verify_exactness`].
#[derive(Clone, Debug, Serialize)]
pub struct ExactnessReport {
    pub ctx: Ctx,
    pub layer_dim: usize,
    pub kernel_size: u128,
    pub hom_size: u128,
    pub i_injective: bool,
    pub i_homomorphism: bool,
    pub image_equals_kernel: bool,
    pub psi_surjective: bool,
    pub report: Report,
}

impl ExactnessReport {
    pub fn verdict(&self) -> bool {
        let expected = (self.ctx.p as u128).pow((self.ctx.n * self.layer_dim) as u32);
        self.report.passed()
            && self.i_injective
            && self.i_homomorphism
            && self.image_equals_kernel
            && self.psi_surjective
            && self.kernel_size == self.hom_size
            && self.hom_size == expected
    }
}

/// Checks `1 -> Hom(N_1, L_{k+1}) -i-> Aut N_{k+1} -psi-> Aut N_k -> 1`.
pub fn verify_exactness(builder: &Builder, ctx: Ctx, seed: u64) -> Result<ExactnessReport> {
    let top = builder.quotient(ctx.series, ctx.p, ctx.n, ctx.k + 1)?;
    let base = builder.quotient(ctx.series, ctx.p, ctx.n, ctx.k)?;
    let layer = Layer::top(top.clone())?;
    let hs = hom_space(&layer);
    let hom_size = hs.count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = Report::new(ctx);

    // (a) i is an injective homomorphism
    let pairs = hom_size * hom_size;
    let mode = mode_for(pairs);
    let (injective, homomorphism, count) = if mode == Mode::Exhaustive {
        let all: Vec<Endo> = hs.iter().map(|f| i_embed(&layer, &f)).collect::<Result<_>>()?;
        let distinct: HashSet<Vec<u32>> = all.iter().map(|e| e.images().to_vec()).collect();
        let mut hom = true;
        for (a, fa) in hs.iter().zip(&all) {
            for (b, fb) in hs.iter().zip(&all) {
                let sum = a.add(&b)?;
                hom &= all[hom_index(&sum)] == fa.compose(fb)?;
            }
        }
        (distinct.len() as u128 == hom_size, hom, pairs as u64)
    } else {
        let mut hom = true;
        let mut inj = true;
        for _ in 0..SAMPLES {
            let a = hs.get(rng.gen_range(0..hom_size as u64));
            let b = hs.get(rng.gen_range(0..hom_size as u64));
            let (fa, fb) = (i_embed(&layer, &a)?, i_embed(&layer, &b)?);
            hom &= i_embed(&layer, &a.add(&b)?)? == fa.compose(&fb)?;
            inj &= (a == b) == (fa == fb);
        }
        (inj, hom, SAMPLES as u64)
    };
    report.push(Leg::new("i-injective", mode, count, injective));
    report.push(Leg::new("i-homomorphism", mode, count, homomorphism));

    // (b) ker psi equals the image of i
    let in_kernel = |f: &Endo| -> Result<bool> { Ok(f.psi(&base)?.is_identity()) };
    let ia_count = (layer_size(&top, 2) as u128).pow(ctx.n as u32);
    let mode = mode_for(ia_count);
    let (image_equals_kernel, kernel_size, count) = if mode == Mode::Exhaustive {
        let image: HashSet<Vec<u32>> = hs
            .iter()
            .map(|f| i_embed(&layer, &f).map(|e| e.images().to_vec()))
            .collect::<Result<_>>()?;
        let mut kernel = HashSet::new();
        for f in enumerate_iap(&top, 1)? {
            if in_kernel(&f)? {
                kernel.insert(f.images().to_vec());
            }
        }
        (kernel == image, kernel.len() as u128, ia_count as u64)
    } else {
        // ker psi consists of x_i c_i with c_i in L_{k+1}; sample IA^p and
        // compare membership in both sets
        let l2 = top.layer(2);
        let mut ok = true;
        for _ in 0..SAMPLES {
            let images: Vec<u32> = (1..=ctx.n)
                .map(|i| top.mul(top.generator(i), l2.members()[rng.gen_range(0..l2.order())]))
                .collect();
            let f = Endo::new(top.clone(), images)?;
            ok &= in_kernel(&f)? == in_image(&layer, &f)?;
        }
        (ok, hom_size, SAMPLES as u64)
    };
    report.push(Leg::new("kernel-equals-image", mode, count, image_equals_kernel));

    // (c) psi is onto: lifts of automorphisms of N_k
    let aut_tuples = (base.order() as u128).pow(ctx.n as u32);
    let mode = mode_for(aut_tuples);
    let auts: Vec<Endo> = if mode == Mode::Exhaustive {
        enumerate_aut(&base)?
    } else {
        let mut v = Vec::new();
        while v.len() < SAMPLES {
            let images = (0..ctx.n).map(|_| rng.gen_range(0..base.order() as u32)).collect();
            let f = Endo::new(base.clone(), images)?;
            if f.is_aut() {
                v.push(f);
            }
        }
        v
    };
    let mut surjective = true;
    for phi in &auts {
        let lifted = phi.lift(&top)?;
        surjective &= lifted.is_aut() && lifted.psi(&base)? == *phi;
    }
    report.push(Leg::new("psi-surjective", mode, auts.len() as u64, surjective));

    // negative control: the swap is not in the kernel nor in the image
    let h = swap12(&top);
    let control = !in_kernel(&h)? && !in_image(&layer, &h)?;
    report.push(Leg::new("negative-control", Mode::Exhaustive, 1, control));

    Ok(ExactnessReport {
        ctx,
        layer_dim: layer.dim(),
        kernel_size,
        hom_size,
        i_injective: injective,
        i_homomorphism: homomorphism,
        image_equals_kernel,
        psi_surjective: surjective,
        report,
    })
}

fn hom_index(f: &HomMatrix) -> usize {
    f.entries.iter().rev().fold(0usize, |acc, &v| acc * f.p as usize + v as usize)
}

fn layer_size(g: &QuotientGroup, l: usize) -> usize {
    g.layer(l).order()
}

/// Whether `f = i(m)` for some `m`, read off from `f(x_j) x_j^-1`.
pub fn in_image(layer: &Layer, f: &Endo) -> Result<bool> {
    let g = layer.group();
    let mut m = HomMatrix::zero(g.p(), layer.dim(), g.rank());
    for (j, &y) in f.images().iter().enumerate() {
        let c = g.mul(y, g.inv(g.generator(j + 1)));
        match layer.coords(c) {
            Some(v) => {
                for (r, &x) in v.iter().enumerate() {
                    m.set(r, j, x);
                }
            }
            None => return Ok(false),
        }
    }
    Ok(i_embed(layer, &m)? == *f)
}

/// Non-centrality witness: `h i(f) h^-1 != i(f)` for the swap `h` and `f`
/// sending `[x1]` to the alternating commutator of length `k+1`.
#[derive(Clone, Debug, Serialize)]
pub struct NoncentralWitness {
    pub f_x1: String,
    pub i_f: Endo,
    pub h: Endo,
    pub conjugate: Endo,
}

pub fn verify_noncentral(builder: &Builder, ctx: Ctx) -> Result<(Report, Option<NoncentralWitness>)> {
    let top = builder.quotient(ctx.series, ctx.p, ctx.n, ctx.k + 1)?;
    let layer = Layer::top(top.clone())?;
    let gamma = top.eval(&alternating_commutator(ctx.n, 1, 2, ctx.k + 1)?)?;
    let coords = layer
        .coords(gamma)
        .ok_or_else(|| Error::Verification("commutator is not in the last layer".into()))?;
    let mut f = HomMatrix::zero(ctx.p, layer.dim(), ctx.n);
    for (r, &v) in coords.iter().enumerate() {
        f.set(r, 0, v);
    }
    let i_f = i_embed(&layer, &f)?;
    let h = swap12(&top);
    let conj = h.compose(&i_f)?.compose(&h.inverse()?)?;
    let mut report = Report::new(ctx);
    report.push(Leg::new("commutator-nontrivial", Mode::Exhaustive, 1, gamma != 0));
    // h(f(h^-1 [x1])) = h(f([x2])) = 1, while f([x1]) = gamma
    let x1 = top.generator(1);
    report.push(Leg::new("conjugate-fixes-x1", Mode::Exhaustive, 1, conj.images()[0] == x1));
    let witness = conj != i_f;
    report.push(Leg::new("non-central", Mode::Exhaustive, 1, witness));
    let id = Endo::identity(top.clone());
    let control = id.compose(&i_f)?.compose(&id)? == i_f;
    report.push(Leg::new("negative-control", Mode::Exhaustive, 1, control));
    let w = witness.then(|| NoncentralWitness {
        f_x1: top.witness(gamma).to_string(),
        i_f: i_f.clone(),
        h: h.clone(),
        conjugate: conj.clone(),
    });
    if let Some(w) = &w {
        report.witness = Some(serde_json::to_value(w).expect("witness serializes"));
    }
    Ok((report, w))
}

/// `i(Hom)` is central in `IA^p(N_{k+1})`.
pub fn verify_ia_central(builder: &Builder, ctx: Ctx, seed: u64) -> Result<Report> {
    let top = builder.quotient(ctx.series, ctx.p, ctx.n, ctx.k + 1)?;
    let layer = Layer::top(top.clone())?;
    let hs = hom_space(&layer);
    let ia_count = (layer_size(&top, 2) as u128).pow(ctx.n as u32);
    let pairs = ia_count * hs.count();
    let mode = mode_for(pairs);
    let mut report = Report::new(ctx);
    let mut violations = 0u64;
    let count;
    if mode == Mode::Exhaustive {
        let embedded: Vec<Endo> = hs.iter().map(|f| i_embed(&layer, &f)).collect::<Result<_>>()?;
        let ia = enumerate_iap(&top, 1)?;
        for g in &ia {
            for f in &embedded {
                if g.compose(f)? != f.compose(g)? {
                    violations += 1;
                }
            }
        }
        count = (ia.len() * embedded.len()) as u64;
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l2 = top.layer(2);
        for _ in 0..SAMPLES {
            let images = (1..=ctx.n)
                .map(|i| top.mul(top.generator(i), l2.members()[rng.gen_range(0..l2.order())]))
                .collect();
            let g = Endo::new(top.clone(), images)?;
            let f = i_embed(&layer, &hs.get(rng.gen_range(0..hs.count() as u64)))?;
            if g.compose(&f)? != f.compose(&g)? {
                violations += 1;
            }
        }
        count = SAMPLES as u64;
    }
    report.push(Leg::new("ia-commutes-with-kernel", mode, count, violations == 0));
    let h = swap12(&top);
    let control = hs.iter().any(|f| {
        let e = i_embed(&layer, &f).expect("valid matrix");
        h.compose(&e).expect("same group") != e.compose(&h).expect("same group")
    });
    report.push(Leg::new("negative-control", Mode::Exhaustive, hs.count() as u64, control));
    Ok(report)
}

/// Kernel of `Aut N~_{k+1} -> Aut N_k` against `Hom(N_1, L~_{k+1})`, for
/// `p = 2`.
pub fn verify_stab_hom(builder: &Builder, n: usize, k: usize, seed: u64) -> Result<(Report, u128)> {
    let ctx = Ctx::new(2, n, k, Series::Z)?;
    let tilde = builder.tilde(2, n, k)?;
    let base = builder.nz(2, n, k)?;
    let layer = Layer::top(tilde.clone())?;
    let mut report = Report::new(ctx);
    let proj = tilde.project_to(&base)?;
    let kernel_is_layer = (0..tilde.order() as u32).all(|e| (proj[e as usize] == 0) == tilde.in_layer(e, k + 1));
    report.push(Leg::new("projection-kernel-is-layer", Mode::Exhaustive, tilde.order() as u64, kernel_is_layer));

    let size = (layer.len() as u128).pow(n as u32);
    let mode = mode_for(size * layer.len() as u128);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let indices: Vec<u128> = if mode == Mode::Exhaustive {
        (0..size).collect()
    } else {
        (0..SAMPLES).map(|_| rng.gen_range(0..size)).collect()
    };
    let gens = tilde.generators();
    let kernel_elem = |mut idx: u128| -> Result<Endo> {
        let images = gens
            .iter()
            .map(|&x| {
                let c = layer.elem_at((idx % layer.len() as u128) as usize);
                idx /= layer.len() as u128;
                tilde.mul(x, c)
            })
            .collect();
        Endo::new(tilde.clone(), images)
    };
    let mut stabilizes = true;
    let mut derivations = true;
    for &idx in &indices {
        let phi = kernel_elem(idx)?;
        stabilizes &= phi.is_aut()
            && phi.psi(&base)?.is_identity()
            && layer.elements().iter().all(|&y| phi.apply(y) == y);
        // d(x) = phi(s(x)) s(x)^-1 with s the witness section
        let d = |x: u32| -> Result<u32> {
            let s = tilde.eval(&base.witness(x))?;
            Ok(tilde.mul(phi.apply(s), tilde.inv(s)))
        };
        for _ in 0..4 {
            let x = rng.gen_range(0..base.order() as u32);
            let y = rng.gen_range(0..base.order() as u32);
            let (dx, dy, dxy) = (d(x)?, d(y)?, d(base.mul(x, y))?);
            derivations &= layer.index_of(dx).is_some() && dxy == tilde.mul(dx, dy);
        }
    }
    report.push(Leg::new("kernel-stabilizes", mode, indices.len() as u64, stabilizes));
    report.push(Leg::new("derivation-additive", Mode::Sampled, 4 * indices.len() as u64, derivations));
    let h = swap12(&tilde);
    let control = !h.psi(&base)?.is_identity();
    report.push(Leg::new("negative-control", Mode::Exhaustive, 1, control));
    Ok((report, size))
}

/// One failed congruence, with the offending units printed.
#[derive(Clone, Debug, Serialize)]
pub struct CongruenceFailure {
    pub check: String,
    pub x: String,
    pub y: String,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CongruenceReport {
    pub p: u32,
    pub n: usize,
    pub degree: usize,
    pub samples: usize,
    pub seed: u64,
    pub checks: u64,
    pub failures: Vec<CongruenceFailure>,
}

impl CongruenceReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.checks > 0
    }
}

/// Random unit with `u - 1` in degrees `>= min_deg`.
pub fn random_unit<R: Rng>(rng: &mut R, shape: Shape, min_deg: usize) -> UnitElement {
    let mut terms: Vec<(Vec<usize>, i64)> = Vec::new();
    for d in min_deg.max(1)..=shape.degree() {
        for _ in 0..3 {
            let mono: Vec<usize> = (0..d).map(|_| rng.gen_range(1..=shape.rank())).collect();
            terms.push((mono, rng.gen_range(0..shape.p() as i64)));
        }
    }
    terms.push((Vec::new(), 1));
    let refs: Vec<(&[usize], i64)> = terms.iter().map(|(m, c)| (m.as_slice(), *c)).collect();
    UnitElement::new(TruncSeries::from_terms(shape, &refs).expect("valid monomials")).expect("constant term 1")
}

fn weight_or(u: &UnitElement, m: usize) -> usize {
    u.zweight().unwrap_or(m + 1)
}

/// Residual-weight congruences behind the IA lemma:
/// `(xy)^{p^j} x^{-p^j}` has weight `>= i p^j + k` when `x` has weight `>= i`
/// and `y` has weight `>= i + k`, plus the basic series properties.
pub fn check_hall_congruence(p: u32, n: usize, samples: usize, seed: u64) -> Result<CongruenceReport> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be positive".into()));
    }
    let m = if n <= 2 { 8 } else { 4 };
    let shape = Shape::new(p, n, m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = CongruenceReport {
        p,
        n,
        degree: m,
        samples,
        seed,
        checks: 0,
        failures: Vec::new(),
    };
    let pu = p as usize;
    for _ in 0..samples {
        let i = rng.gen_range(1..m);
        let k = rng.gen_range(1..=m - i);
        let x = random_unit(&mut rng, shape, i);
        let y = random_unit(&mut rng, shape, i + k);
        let mut pj = 1usize;
        while i * pj <= m - k {
            let lhs = x.mul(&y)?.power(pj as i64).mul(&x.power(pj as i64).inv())?;
            rep.checks += 1;
            if weight_or(&lhs, m) < i * pj + k {
                rep.failures.push(CongruenceFailure {
                    check: format!("congruence i={i} k={k} p^j={pj}"),
                    x: x.to_string(),
                    y: y.to_string(),
                    detail: lhs.to_string(),
                });
            }
            pj *= pu;
        }
        let wx = weight_or(&x, m);
        rep.checks += 2;
        if weight_or(&x.power(p as i64), m) < (pu * wx).min(m + 1) {
            rep.failures.push(CongruenceFailure {
                check: "power".into(),
                x: x.to_string(),
                y: String::new(),
                detail: x.power(p as i64).to_string(),
            });
        }
        let c = x.commutator(&y)?;
        if weight_or(&c, m) < (wx + weight_or(&y, m)).min(m + 1) {
            rep.failures.push(CongruenceFailure {
                check: "commutator".into(),
                x: x.to_string(),
                y: y.to_string(),
                detail: c.to_string(),
            });
        }
    }
    Ok(rep)
}

/// `[gamma_1, gamma_2]` for `gamma_1 = alt(1,2,k)`, `gamma_2 = alt(2,1,l)`.
#[derive(Clone, Debug, Serialize)]
pub struct SharpnessWitness {
    pub k: usize,
    pub l: usize,
    pub gamma1: Word,
    pub gamma2: Word,
    pub zweight: Option<usize>,
    pub via_endo: bool,
}

impl SharpnessWitness {
    pub fn passed(&self) -> bool {
        self.zweight == Some(self.k + self.l) && self.via_endo
    }
}

/// Conjugation by `gamma_1 in Gamma_k` moves `gamma_2 in Gamma_l` by exactly
/// weight `k + l`, in the Z model of depth `k + l` at `(p, n) = (p, 2)`.
pub fn sharpness(builder: &Builder, p: u32, k: usize, l: usize) -> Result<SharpnessWitness> {
    if k == l {
        return Err(Error::InvalidArgument("k = l makes the two commutators equal".into()));
    }
    let gamma1 = alternating_commutator(2, 1, 2, k)?;
    let gamma2 = alternating_commutator(2, 2, 1, l)?;
    let shape = Shape::new(p, 2, k + l)?;
    let c = crate::truncalg::eval_word(&gamma1.commutator(&gamma2)?, shape)?;
    let g = builder.nz(p, 2, k + l)?;
    let f = Endo::conjugation(g.clone(), g.eval(&gamma1)?);
    let g2 = g.eval(&gamma2)?;
    let moved = g.mul(f.apply(g2), g.inv(g2));
    let via_endo = g.unit(moved) == Some(&c) && f.ia_level()? >= k;
    Ok(SharpnessWitness {
        k,
        l,
        gamma1,
        gamma2,
        zweight: c.zweight(),
        via_endo,
    })
}

/// Sampled checks of `[IA_k, G_l] <= G_{k+l}`, `[IA_k, IA_l] <= IA_{k+l}`
/// and, exhaustively where small, that `IA^p` fixes the last layer.
pub fn verify_lemma(builder: &Builder, series: Series, p: u32, n: usize, depth: usize, samples: usize, seed: u64) -> Result<Report> {
    let g = builder.quotient(series, p, n, depth)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = Report::new(Ctx::new(p, n, depth, series)?);
    let layers: Vec<Vec<u32>> = (1..=depth + 1).map(|l| g.layer(l).members().to_vec()).collect();
    let random_ia = |rng: &mut ChaCha8Rng, k: usize| -> Result<Endo> {
        let cs = &layers[k];
        let images = (1..=n).map(|i| g.mul(g.generator(i), cs[rng.gen_range(0..cs.len())])).collect();
        Endo::new(g.clone(), images)
    };
    let (mut ok_action, mut ok_comm, mut checks) = (true, true, 0u64);
    for k in 1..depth {
        for l in 1..=depth {
            for _ in 0..samples {
                let f = random_ia(&mut rng, k)?;
                let x = layers[l - 1][rng.gen_range(0..layers[l - 1].len())];
                ok_action &= g.in_layer(g.mul(f.apply(x), g.inv(x)), k + l);
                if l < depth {
                    let h = random_ia(&mut rng, l)?;
                    ok_comm &= f.commutator(&h)?.ia_level()? >= (k + l).min(depth);
                }
                checks += 1;
            }
        }
    }
    report.push(Leg::new("ia-moves-layers", Mode::Sampled, checks, ok_action));
    report.push(Leg::new("ia-commutators", Mode::Sampled, checks, ok_comm));
    let top = &layers[depth - 1];
    let ia_count = (layers[1].len() as u128).pow(n as u32);
    let mode = mode_for(ia_count * top.len() as u128);
    let ia: Vec<Endo> = if mode == Mode::Exhaustive {
        enumerate_iap(&g, 1)?
    } else {
        (0..samples).map(|_| random_ia(&mut rng, 1)).collect::<Result<_>>()?
    };
    let fixes = ia.iter().all(|f| top.iter().all(|&y| f.apply(y) == y));
    report.push(Leg::new("ia-fixes-last-layer", mode, (ia.len() * top.len()) as u64, fixes));
    let h = swap12(&g);
    let control = top.iter().any(|&y| h.apply(y) != y) || depth == 1;
    report.push(Leg::new("negative-control", Mode::Exhaustive, top.len() as u64, control));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u32, n: usize, k: usize, s: Series) -> Ctx {
        Ctx::new(p, n, k, s).unwrap()
    }

    #[test]
    fn ctx_validation() {
        assert!(Ctx::new(99, 2, 1, Series::Z).is_err());
        assert!(Ctx::new(2, 1, 1, Series::Z).is_err());
        assert!(Ctx::new(2, 2, 0, Series::Z).is_err());
    }

    #[test]
    fn exactness_small_cases() {
        let b = Builder::new();
        for (c, size) in [
            (ctx(2, 2, 1, Series::Z), 64),
            (ctx(3, 2, 1, Series::Z), 9),
            (ctx(2, 2, 2, Series::Z), 16),
            (ctx(2, 2, 1, Series::S), 64),
        ] {
            let r = verify_exactness(&b, c, 1).unwrap();
            assert!(r.verdict(), "{c}: {:?}", r.report.legs);
            assert_eq!(r.kernel_size, size);
        }
    }

    #[test]
    fn noncentral_witnesses() {
        let b = Builder::new();
        for c in [ctx(2, 2, 1, Series::Z), ctx(2, 2, 2, Series::Z), ctx(2, 3, 1, Series::S)] {
            let (r, w) = verify_noncentral(&b, c).unwrap();
            assert!(r.passed(), "{c}: {:?}", r.legs);
            assert!(w.is_some());
        }
    }

    #[test]
    fn ia_central() {
        let b = Builder::new();
        let r = verify_ia_central(&b, ctx(2, 2, 2, Series::Z), 0).unwrap();
        assert!(r.passed());
        assert_eq!(r.leg("ia-commutes-with-kernel").unwrap().count, 1024 * 16);
        assert!(verify_ia_central(&b, ctx(2, 2, 1, Series::S), 0).unwrap().passed());
    }

    #[test]
    fn stab_hom() {
        let b = Builder::new();
        let (r, size) = verify_stab_hom(&b, 2, 1, 0).unwrap();
        assert!(r.passed(), "{:?}", r.legs);
        assert_eq!(size, 64);
    }

    #[test]
    fn congruence_examples() {
        let s = Shape::new(2, 2, 4).unwrap();
        let x = crate::truncalg::eval_word(&Word::parse(2, "x1").unwrap(), s).unwrap();
        let y = crate::truncalg::eval_word(&Word::parse(2, "[x1,x2]").unwrap(), s).unwrap();
        let lhs = x.mul(&y).unwrap().power(2).mul(&x.power(2).inv()).unwrap();
        assert!(lhs.zweight().is_none_or(|w| w >= 3));
        let one = UnitElement::one(s);
        assert!(x.mul(&one).unwrap().power(2).mul(&x.power(2).inv()).unwrap().is_one());
        let rep = check_hall_congruence(2, 2, 500, 7).unwrap();
        assert!(rep.passed());
        assert!(check_hall_congruence(3, 2, 200, 1).unwrap().passed());
        assert!(check_hall_congruence(2, 3, 200, 1).unwrap().passed());
        assert!(check_hall_congruence(2, 2, 0, 1).is_err());
    }

    #[test]
    fn sharpness_cases() {
        let b = Builder::new();
        for (k, l) in [(1, 2), (2, 1), (1, 3)] {
            let w = sharpness(&b, 2, k, l).unwrap();
            assert!(w.passed(), "{k} {l}: {w:?}");
        }
        assert!(sharpness(&b, 2, 2, 2).is_err());
    }

    #[test]
    fn lemma_checks() {
        let b = Builder::new();
        assert!(verify_lemma(&b, Series::Z, 2, 2, 3, 30, 5).unwrap().passed());
        assert!(verify_lemma(&b, Series::Z, 3, 2, 2, 30, 5).unwrap().passed());
        assert!(verify_lemma(&b, Series::S, 2, 3, 2, 30, 5).unwrap().passed());
    }
}
