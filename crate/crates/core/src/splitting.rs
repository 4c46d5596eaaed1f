//! Splitting and non-splitting certificates for
//! `Hom(N_1, L_{k+1}) -> Aut N_{k+1} -> Aut N_k`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::endos::{enumerate_aut, hom_space, i_embed, AutGroup, Endo, Layer};
use crate::error::{Error, Result};
use crate::extensions::{in_image, Ctx, Leg, Mode, Report};
use crate::group::{generate, GroupOps};
use crate::matgroups::{lift_search, power_relators, SEARCH_BUDGET};
use crate::quotients::{Builder, QuotientGroup, Series};
use crate::words::{alternating_commutator, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Split,
    NoSplit,
}

/// Where a section was found.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    /// Over the Sylow subgroup `UT_n(F_p)`.
    Sylow,
    /// Over all of `GL_n(F_p)`.
    Full,
}

/// A section on generators, written as image words so it can be replayed.
#[derive(Clone, Debug, Serialize)]
pub struct SplitCertificate {
    pub ctx: Ctx,
    pub level: Level,
    /// Base generators as image words on `N_k`.
    pub base_gens: Vec<Vec<String>>,
    /// Their lifts as image words on `N_{k+1}`.
    pub section: Vec<Vec<String>>,
    /// Relators over the base generators that the lifts satisfy.
    pub relators: Vec<String>,
    pub base_order: usize,
    /// A Sylow-level section suffices: restriction to a Sylow subgroup is
    /// injective on the p-primary part, and the class is p-torsion because
    /// the kernel is elementary abelian.
    pub transfer_note: bool,
    /// Full `GL_n(F_p)` complement when it was searched for.
    pub full_upgrade: Option<Box<SplitCertificate>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum NoSplitKind {
    Obstruction23,
    CommutatorInKernel,
    ExhaustedSearch,
}

#[derive(Clone, Debug, Serialize)]
pub struct NoSplitCertificate {
    pub ctx: Ctx,
    pub kind: NoSplitKind,
    pub witness: serde_json::Value,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict")]
pub enum Certificate {
    #[serde(rename = "SPLIT")]
    Split(SplitCertificate),
    #[serde(rename = "NOSPLIT")]
    NoSplit(NoSplitCertificate),
}

impl Certificate {
    pub fn verdict(&self) -> Verdict {
        match self {
            Certificate::Split(_) => Verdict::Split,
            Certificate::NoSplit(_) => Verdict::NoSplit,
        }
    }

    pub fn ctx(&self) -> Ctx {
        match self {
            Certificate::Split(c) => c.ctx,
            Certificate::NoSplit(c) => c.ctx,
        }
    }
}

/// `split iff k = 1 and (Z with p odd or (p,n) = (2,2), or S with
/// (p,n) in {(3,2),(2,2)})`. At `p = 2` the two series agree up to `N_2`.
pub fn expected_verdict(series: Series, p: u32, n: usize, k: usize) -> Verdict {
    let split = k == 1
        && match series {
            Series::Z => p % 2 == 1 || (p, n) == (2, 2),
            Series::S => (p, n) == (3, 2) || (p, n) == (2, 2),
        };
    if split {
        Verdict::Split
    } else {
        Verdict::NoSplit
    }
}

fn words_of(e: &Endo) -> Vec<String> {
    let g = e.group();
    e.images().iter().map(|&y| g.witness(y).to_string()).collect()
}

fn endo_from(g: &Arc<QuotientGroup>, words: &[String]) -> Result<Endo> {
    let refs: Vec<&str> = words.iter().map(String::as_str).collect();
    Endo::from_words(g.clone(), &refs)
}

/// `T_ij = I + E_ij` on `N_1`: `x_j -> x_j x_i`.
pub fn transvection(g: &Arc<QuotientGroup>, i: usize, j: usize) -> Endo {
    let mut images = g.generators();
    images[j - 1] = g.mul(g.generator(j), g.generator(i));
    Endo::new(g.clone(), images).expect("valid images")
}

/// The published sections, replayed.
pub fn verify_fixture_sections(builder: &Builder) -> Result<Report> {
    let mut report = Report::new(serde_json::json!({ "fixtures": ["(2,2)", "(3,2)", "(2,3)"] }));
    let cases: [(u32, usize, &[&str], usize, (usize, usize)); 3] = [
        (2, 2, &["x1^-1", "x2*x1"], 2, (1, 2)),
        (3, 2, &["x1*x2^6", "x2*x1"], 3, (1, 2)),
        (2, 3, &["x1^-1", "x2", "x3*x1"], 2, (1, 3)),
    ];
    for (p, n, words, ord, (i, j)) in cases {
        let top = builder.quotient(Series::S, p, n, 2)?;
        let base = builder.quotient(Series::S, p, n, 1)?;
        let s = Endo::from_words(top.clone(), words)?;
        let t = transvection(&base, i, j);
        report.push(Leg::new(&format!("({p},{n}) psi(s) = T{i}{j}"), Mode::Exhaustive, 1, s.psi(&base)? == t));
        report.push(Leg::new(&format!("({p},{n}) s^{ord} = id"), Mode::Exhaustive, 1, s.power(ord as i64)?.is_identity()));
    }
    // negative control: without the inverse the (2,2) map has order 4
    let top = builder.quotient(Series::S, 2, 2, 2)?;
    let bad = Endo::from_words(top, &["x1", "x2*x1"])?;
    report.push(Leg::new("negative-control", Mode::Exhaustive, 1, !bad.power(2)?.is_identity()));
    Ok(report)
}

/// Searches lifts of `base_gens` (endos of `N_1`) to `N_2` over the fibers
/// `lift(g) i(m)`. Accepts when the lifts generate a subgroup of order
/// `target_order`.
fn section_search(
    ctx: Ctx,
    top: &Arc<QuotientGroup>,
    base: &Arc<QuotientGroup>,
    base_gens: &[Endo],
    target_order: usize,
    level: Level,
) -> Result<Option<SplitCertificate>> {
    let layer = Layer::top(top.clone())?;
    let hs = hom_space(&layer);
    let space = hs.count().pow(base_gens.len() as u32);
    if space > SEARCH_BUDGET {
        return Err(Error::budget("section search", space, SEARCH_BUDGET));
    }
    let embedded: Vec<Endo> = hs.iter().map(|m| i_embed(&layer, &m)).collect::<Result<_>>()?;
    let fibers: Vec<Vec<Endo>> = base_gens
        .iter()
        .map(|g| {
            let l = g.lift(top)?;
            Ok(embedded.iter().map(|e| l.compose_unchecked(e)).collect())
        })
        .collect::<Result<_>>()?;
    let base_ops = AutGroup(base.clone());
    let top_ops = AutGroup(top.clone());
    let m = base_gens.len();
    let relators = power_relators(m, if m == 1 { 1 } else { 4 }, |w| {
        let e = eval(&base_ops, w, base_gens);
        base_ops.element_order(&e, target_order).expect("finite order")
    })?;
    let accept = |lifts: &[Endo]| match generate(&top_ops, lifts, target_order) {
        Ok(sub) => sub.len() == target_order,
        Err(_) => false,
    };
    let res = lift_search(&top_ops, &fibers, &relators, accept, SEARCH_BUDGET)?;
    Ok(res.found.map(|idx| SplitCertificate {
        ctx,
        level,
        base_gens: base_gens.iter().map(words_of).collect(),
        section: idx.iter().enumerate().map(|(j, &i)| words_of(&fibers[j][i])).collect(),
        relators: relators.iter().map(Word::to_string).collect(),
        base_order: target_order,
        transfer_note: level == Level::Sylow,
        full_upgrade: None,
    }))
}

fn eval(g: &AutGroup, w: &Word, gens: &[Endo]) -> Endo {
    w.letters().iter().fold(g.identity(), |acc, &a| {
        let x = &gens[a.unsigned_abs() as usize - 1];
        let y = if a > 0 { x.clone() } else { g.inv(x) };
        g.mul(&acc, &y)
    })
}

/// Replays a split certificate: relators hold on the lifts, the lifts
/// project onto the base generators and generate a subgroup of the recorded
/// order.
pub fn replay_split(builder: &Builder, cert: &SplitCertificate) -> Result<bool> {
    let c = cert.ctx;
    let top = builder.quotient(c.series, c.p, c.n, c.k + 1)?;
    let base = builder.quotient(c.series, c.p, c.n, c.k)?;
    let gens: Vec<Endo> = cert.base_gens.iter().map(|w| endo_from(&base, w)).collect::<Result<_>>()?;
    let lifts: Vec<Endo> = cert.section.iter().map(|w| endo_from(&top, w)).collect::<Result<_>>()?;
    let ops = AutGroup(top.clone());
    let m = lifts.len();
    let mut ok = lifts.iter().zip(&gens).all(|(l, g)| l.is_aut() && l.psi(&base).is_ok_and(|e| e == *g));
    for r in &cert.relators {
        ok &= ops.is_identity(&eval(&ops, &Word::parse(m, r)?, &lifts));
    }
    let base_ops = AutGroup(base.clone());
    ok &= generate(&base_ops, &gens, cert.base_order + 1)?.len() == cert.base_order;
    ok &= generate(&ops, &lifts, cert.base_order + 1)?.len() == cert.base_order;
    if let Some(full) = &cert.full_upgrade {
        ok &= replay_split(builder, full)?;
    }
    Ok(ok)
}

/// `k = 1`: Sylow-level section search over `UT_n(F_p)`, with the `(2,3)`
/// obstruction once the search space exceeds the budget.
pub fn split_k1(builder: &Builder, series: Series, p: u32, n: usize) -> Result<Certificate> {
    let ctx = Ctx::new(p, n, 1, series)?;
    let top = builder.quotient(series, p, n, 2)?;
    let base = builder.quotient(series, p, n, 1)?;
    let ut: Vec<Endo> = (1..n).map(|i| transvection(&base, i, i + 1)).collect();
    let ut_order = (p as usize).pow((n * (n - 1) / 2) as u32);
    match section_search(ctx, &top, &base, &ut, ut_order, Level::Sylow) {
        Ok(Some(mut cert)) => {
            if n == 2 {
                cert.full_upgrade = full_upgrade(ctx, &top, &base)?.map(Box::new);
            }
            Ok(Certificate::Split(cert))
        }
        Ok(None) => Ok(Certificate::NoSplit(NoSplitCertificate {
            ctx,
            kind: NoSplitKind::ExhaustedSearch,
            witness: serde_json::json!({ "sylow_order": ut_order, "generators": ut.iter().map(words_of).collect::<Vec<_>>() }),
        })),
        Err(e) if e.is_budget() && (p, n) == (2, 3) => {
            let ob = obstruction_23(builder, series)?;
            if !ob.passed() {
                return Err(Error::Verification("obstruction checks failed".into()));
            }
            Ok(Certificate::NoSplit(ob.certificate(ctx)))
        }
        Err(e) => Err(e),
    }
}

/// Complement over all of `Aut N_1 = GL_n(F_p)`, on a two-generator
/// fixture `<T_12, b>` with `b` the first element that generates.
fn full_upgrade(ctx: Ctx, top: &Arc<QuotientGroup>, base: &Arc<QuotientGroup>) -> Result<Option<SplitCertificate>> {
    let auts = enumerate_aut(base)?;
    let ops = AutGroup(base.clone());
    let a = transvection(base, 1, 2);
    let Some(b) = auts.iter().find(|b| generate(&ops, &[a.clone(), (*b).clone()], auts.len()).is_ok_and(|s| s.len() == auts.len())) else {
        return Ok(None);
    };
    match section_search(ctx, top, base, &[a, b.clone()], auts.len(), Level::Full) {
        Ok(c) => Ok(c),
        Err(e) if e.is_budget() => Ok(None),
        Err(e) => Err(e),
    }
}

/// Result of the `(2,3)` obstruction computation.
#[derive(Clone, Debug, Serialize)]
pub struct Obstruction23 {
    /// `(w, w T13(w), expected)` on the basis of `L_2`.
    pub products: Vec<(String, String, String, bool)>,
    pub additive: bool,
    pub image_size: usize,
    pub x1_sq_in_image: bool,
    pub scanned: u64,
    pub solutions: u64,
    pub t12_involution: bool,
    pub t13_involution: bool,
    pub reduction_agrees: bool,
}

impl Obstruction23 {
    pub fn passed(&self) -> bool {
        self.products.iter().all(|r| r.3)
            && self.additive
            && !self.x1_sq_in_image
            && self.solutions == 0
            && self.scanned == 1 << 18
            && self.t12_involution
            && self.t13_involution
            && self.reduction_agrees
    }

    pub fn certificate(&self, ctx: Ctx) -> NoSplitCertificate {
        NoSplitCertificate {
            ctx,
            kind: NoSplitKind::Obstruction23,
            witness: serde_json::to_value(self).expect("serializes"),
        }
    }
}

/// Products `w T13(w)`, the map `b -> b T13(b)`, and the full scan of
/// `i(m) e T13 e^-1 i(m)^-1 = T13` over `m` for `e = T12~`.
pub fn obstruction_23(builder: &Builder, series: Series) -> Result<Obstruction23> {
    let g = builder.quotient(series, 2, 3, 2)?;
    let layer = Layer::top(g.clone())?;
    let t12 = Endo::from_words(g.clone(), &["x1^-1", "x2*x1", "x3"])?;
    let t13 = Endo::from_words(g.clone(), &["x1^-1", "x2", "x3*x1"])?;
    let table = [
        ("x1^2", "1"),
        ("x2^2", "1"),
        ("x3^2", "x1^2*[x1,x3]"),
        ("[x1,x2]", "1"),
        ("[x1,x3]", "1"),
        ("[x2,x3]", "[x2,x1]"),
    ];
    let beta = |b: u32| g.mul(b, t13.apply(b));
    let mut products = Vec::new();
    for (w, expected) in table {
        let b = g.parse(w)?;
        let v = beta(b);
        products.push((w.to_string(), g.witness(v).to_string(), expected.to_string(), v == g.parse(expected)?));
    }
    let elems = layer.elements();
    let additive = elems.iter().all(|&a| elems.iter().all(|&b| beta(g.mul(a, b)) == g.mul(beta(a), beta(b))));
    let mut image: Vec<u32> = elems.iter().map(|&b| beta(b)).collect();
    image.sort_unstable();
    image.dedup();
    let x1_sq = g.parse("x1^2")?;
    let x1_sq_in_image = image.contains(&x1_sq);

    let hs = hom_space(&layer);
    let c = t12.compose(&t13)?.compose(&t12.inverse()?)?;
    let solutions = (0..hs.count() as u64)
        .into_par_iter()
        .filter(|&idx| {
            let im = i_embed(&layer, &hs.get(idx)).expect("valid matrix");
            im.compose_unchecked(&c) == t13.compose_unchecked(&im)
        })
        .count() as u64;
    Ok(Obstruction23 {
        products,
        additive,
        image_size: image.len(),
        x1_sq_in_image,
        scanned: hs.count() as u64,
        solutions,
        t12_involution: t12.power(2)?.is_identity(),
        t13_involution: t13.power(2)?.is_identity(),
        reduction_agrees: x1_sq_in_image == (solutions > 0),
    })
}

/// `k >= 2`: `c = [conj(x1), conj(alt(2,1,k-1))]` is a nontrivial element of
/// `ker psi` inside `[IA^p, IA^p]`, which a split central extension cannot
/// have.
pub fn nosplit_kge2(builder: &Builder, series: Series, p: u32, n: usize, k: usize) -> Result<NoSplitCertificate> {
    if k < 2 {
        return Err(Error::InvalidArgument("the commutator certificate needs k >= 2".into()));
    }
    let ctx = Ctx::new(p, n, k, series)?;
    let top = builder.quotient(series, p, n, k + 1)?;
    let phi = Endo::conjugation(top.clone(), top.generator(1));
    let gamma = top.eval(&alternating_commutator(n, 2, 1, k - 1)?)?;
    let psi = Endo::conjugation(top.clone(), gamma);
    let c = phi.commutator(&psi)?;
    let cert = NoSplitCertificate {
        ctx,
        kind: NoSplitKind::CommutatorInKernel,
        witness: serde_json::json!({
            "phi": phi.to_string(),
            "psi": psi.to_string(),
            "c": c.to_string(),
        }),
    };
    if !replay_commutator(builder, &cert)? {
        return Err(Error::Verification(format!("commutator certificate fails at {ctx}")));
    }
    Ok(cert)
}

/// Re-parses `phi`, `psi`, `c` and checks `c = [phi, psi]`, `c != id`,
/// `psi_k(c) = id`, `c in i(Hom)` and `phi, psi in IA^p`.
pub fn replay_commutator(builder: &Builder, cert: &NoSplitCertificate) -> Result<bool> {
    let ctx = cert.ctx;
    let top = builder.quotient(ctx.series, ctx.p, ctx.n, ctx.k + 1)?;
    let base = builder.quotient(ctx.series, ctx.p, ctx.n, ctx.k)?;
    let parse = |key: &str| -> Result<Endo> {
        let s = cert.witness[key]
            .as_str()
            .ok_or_else(|| Error::Verification(format!("missing {key}")))?;
        let words: Vec<String> = s.split(", ").map(|part| part.split(" -> ").nth(1).unwrap_or("").to_string()).collect();
        endo_from(&top, &words)
    };
    let (phi, psi, c) = (parse("phi")?, parse("psi")?, parse("c")?);
    let layer = Layer::top(top.clone())?;
    Ok(phi.commutator(&psi)? == c
        && !c.is_identity()
        && c.psi(&base)?.is_identity()
        && in_image(&layer, &c)?
        && phi.ia_level()? >= 1
        && psi.ia_level()? >= 1)
}

/// Runs the certificate appropriate for one grid point.
pub fn certify(builder: &Builder, series: Series, p: u32, n: usize, k: usize) -> Result<Certificate> {
    if k == 1 {
        split_k1(builder, series, p, n)
    } else {
        nosplit_kge2(builder, series, p, n, k).map(Certificate::NoSplit)
    }
}

/// Replays any certificate.
pub fn replay(builder: &Builder, cert: &Certificate) -> Result<bool> {
    match cert {
        Certificate::Split(c) => replay_split(builder, c),
        Certificate::NoSplit(c) => match c.kind {
            NoSplitKind::CommutatorInKernel => replay_commutator(builder, c),
            NoSplitKind::Obstruction23 => Ok(obstruction_23(builder, c.ctx.series)?.passed()),
            NoSplitKind::ExhaustedSearch => Ok(split_k1(builder, c.ctx.series, c.ctx.p, c.ctx.n)?.verdict() == Verdict::NoSplit),
        },
    }
}

/// The `(series, p, n, k)` points of the verdict grid.
pub fn grid_points() -> Vec<(Series, u32, usize, usize)> {
    let mut v = Vec::new();
    for series in [Series::Z, Series::S] {
        for k in [1, 2] {
            for (p, n) in [(2, 2), (3, 2), (2, 3)] {
                v.push((series, p, n, k));
            }
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expected_grid() {
        assert_eq!(expected_verdict(Series::Z, 3, 2, 1), Verdict::Split);
        assert_eq!(expected_verdict(Series::Z, 2, 2, 1), Verdict::Split);
        assert_eq!(expected_verdict(Series::Z, 2, 3, 1), Verdict::NoSplit);
        assert_eq!(expected_verdict(Series::S, 2, 2, 1), Verdict::Split);
        assert_eq!(expected_verdict(Series::S, 3, 2, 1), Verdict::Split);
        assert_eq!(expected_verdict(Series::S, 2, 3, 1), Verdict::NoSplit);
        assert_eq!(expected_verdict(Series::Z, 3, 2, 2), Verdict::NoSplit);
    }

    #[test]
    fn fixtures() {
        let r = verify_fixture_sections(&Builder::new()).unwrap();
        assert!(r.passed(), "{:?}", r.legs);
    }

    #[test]
    fn k1_sections() {
        let b = Builder::new();
        for (s, p, n) in [(Series::Z, 3, 2), (Series::S, 2, 2), (Series::Z, 2, 2)] {
            let c = split_k1(&b, s, p, n).unwrap();
            assert_eq!(c.verdict(), Verdict::Split);
            assert!(replay(&b, &c).unwrap());
            let Certificate::Split(sc) = &c else { unreachable!() };
            assert!(sc.full_upgrade.is_some(), "{s} {p} {n}");
        }
    }

    #[test]
    fn commutator_certificates() {
        let b = Builder::new();
        let c = nosplit_kge2(&b, Series::Z, 2, 2, 2).unwrap();
        assert!(replay_commutator(&b, &c).unwrap());
        assert!(nosplit_kge2(&b, Series::Z, 3, 2, 1).is_err());
        // a tampered witness must fail replay
        let mut bad = c.clone();
        bad.witness["c"] = serde_json::Value::String("x1 -> x1, x2 -> x2".into());
        assert!(!replay_commutator(&b, &bad).unwrap());
    }

    #[test]
    fn obstruction() {
        let ob = obstruction_23(&Builder::new(), Series::S).unwrap();
        assert!(ob.passed(), "{ob:?}");
    }
}
