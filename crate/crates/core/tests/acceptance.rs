//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line.

use std::time::{Duration, Instant};

use pcentral::endos::{enumerate_aut, hom_space, Layer};
use pcentral::extensions::{check_hall_congruence, sharpness, verify_exactness, verify_ia_central, verify_noncentral, Ctx};
use pcentral::matgroups::{verify_split_tables, SearchOutcome};
use pcentral::quotients::{stallings_ambient_depth, stallings_series, verify_pcovering, zassenhaus_by_definition};
use pcentral::splitting::{
    certify, expected_verdict, grid_points, nosplit_kge2, obstruction_23, replay, replay_commutator,
    verify_fixture_sections, NoSplitKind, Verdict,
};
use pcentral::words::hall_identity_suite;
use pcentral::{jennings_dims, Builder, QuotientGroup, Series};

const SEED: u64 = 20_240_917;

fn report(n: usize, pass: bool, limit: Duration, start: Instant, detail: &str) {
    let took = start.elapsed();
    let ok = pass && took <= limit;
    println!(
        "criterion {n:>2}: {} ({:.2}s, limit {}s) {detail}",
        if ok { "PASS" } else { "FAIL" },
        took.as_secs_f64(),
        limit.as_secs()
    );
    assert!(pass, "criterion {n} failed: {detail}");
    assert!(took <= limit, "criterion {n} exceeded {limit:?}");
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

#[test]
fn criterion_01_hall_identities() {
    let t = Instant::now();
    let r = hall_identity_suite(3, 1000, SEED).unwrap();
    report(1, r.passed() && r.failures.is_empty(), secs(5), t, &format!("{} failures", r.failures.len()));
}

#[test]
fn criterion_02_jennings_cross_check() {
    let t = Instant::now();
    let b = Builder::new();
    let mut bad = Vec::new();
    for (p, n, kmax) in [(2, 2, 4), (3, 2, 3), (2, 3, 3)] {
        let jd = jennings_dims(p, n, kmax).unwrap();
        for k in 1..=kmax {
            let g = b.nz(p, n, k).unwrap();
            let want = jd.dims[..k].iter().sum::<u128>() as usize;
            if g.order() != (p as usize).pow(want as u32) {
                bad.push(format!("({p},{n},{k}): {} vs {p}^{want}", g.order()));
            }
        }
    }
    report(2, bad.is_empty(), secs(60), t, &bad.join("; "));
}

/// Checks `S_l <= Z_l` and `Z_{p^(l-1)} <= S_l` on generators inside `N^Z_m`,
/// where `m` is deep enough that `Z_{m+1} <= S_l`.
fn inclusions(g: &QuotientGroup, lmax: usize) -> Vec<String> {
    let p = g.p() as usize;
    let stallings = stallings_series(g, lmax);
    let mut bad = Vec::new();
    for l in 1..=lmax {
        assert!(g.depth() >= stallings_ambient_depth(p as u32, l - 1).max(1));
        let s = &stallings[l - 1];
        let z = zassenhaus_by_definition(g, l);
        if !s.generators().iter().all(|&x| z.contains(x) && g.weight(x) as usize >= l) {
            bad.push(format!("S_{l} not in Z_{l}"));
        }
        let deep = zassenhaus_by_definition(g, p.pow(l as u32 - 1));
        if !deep.generators().iter().all(|&x| s.contains(x)) {
            bad.push(format!("Z_{} not in S_{l}", p.pow(l as u32 - 1)));
        }
    }
    bad
}

#[test]
fn criterion_03_series_inclusions() {
    let t = Instant::now();
    let b = Builder::new();
    let mut bad = Vec::new();
    for (p, n, lmax) in [(2, 2, 3), (2, 3, 2), (3, 2, 2)] {
        let depth = (p as usize).pow(lmax as u32 - 1).max(stallings_ambient_depth(p, lmax - 1));
        let g = b.nz(p, n, depth).unwrap();
        bad.extend(inclusions(&g, lmax).into_iter().map(|e| format!("({p},{n}): {e}")));
    }
    report(3, bad.is_empty(), secs(60), t, &bad.join("; "));
}

#[test]
fn criterion_04_exactness() {
    let t = Instant::now();
    let b = Builder::new();
    let mut bad = Vec::new();
    for (p, n, k, series, size) in [
        (2, 2, 1, Series::Z, 64u128),
        (3, 2, 1, Series::Z, 9),
        (2, 2, 2, Series::Z, 16),
        (2, 2, 1, Series::S, 64),
    ] {
        let ctx = Ctx::new(p, n, k, series).unwrap();
        let r = verify_exactness(&b, ctx, SEED).unwrap();
        let layer = Layer::top(b.quotient(series, p, n, k + 1).unwrap()).unwrap();
        let count = hom_space(&layer).count();
        if !r.verdict() || count != size {
            bad.push(format!("{ctx}: verdict {} size {count}", r.verdict()));
        }
    }
    report(4, bad.is_empty(), secs(120), t, &bad.join("; "));
}

#[test]
fn criterion_05_surjectivity() {
    let t = Instant::now();
    let b = Builder::new();
    let mut bad = Vec::new();
    for (p, expected) in [(2u32, 6usize), (3, 48)] {
        let n1 = b.nz(p, 2, 1).unwrap();
        let n2 = b.nz(p, 2, 2).unwrap();
        let auts = enumerate_aut(&n1).unwrap();
        let ok = auts.iter().all(|a| a.lift(&n2).unwrap().psi(&n1).unwrap() == *a);
        if auts.len() != expected || !ok {
            bad.push(format!("p={p}: {} automorphisms, round trip {ok}", auts.len()));
        }
    }
    report(5, bad.is_empty(), secs(10), t, &bad.join("; "));
}

#[test]
fn criterion_06_centrality() {
    let t = Instant::now();
    let b = Builder::new();
    let mut bad = Vec::new();
    for (p, n, k, series) in [(2, 2, 1, Series::Z), (2, 2, 2, Series::Z), (2, 3, 1, Series::S)] {
        let ctx = Ctx::new(p, n, k, series).unwrap();
        let (r, w) = verify_noncentral(&b, ctx).unwrap();
        if !r.passed() || w.is_none() {
            bad.push(format!("{ctx}: no non-centrality witness"));
        }
    }
    for (k, series) in [(2, Series::Z), (1, Series::S)] {
        let ctx = Ctx::new(2, 2, k, series).unwrap();
        let r = verify_ia_central(&b, ctx, SEED).unwrap();
        if !r.passed() {
            bad.push(format!("{ctx}: IA-centrality violated"));
        }
    }
    report(6, bad.is_empty(), secs(120), t, &bad.join("; "));
}

#[test]
fn criterion_07_lemma_and_sharpness() {
    let t = Instant::now();
    let b = Builder::new();
    let mut bad = Vec::new();
    let c = check_hall_congruence(2, 2, 500, SEED).unwrap();
    if !c.failures.is_empty() {
        bad.push(format!("{} congruence failures", c.failures.len()));
    }
    for (k, l) in [(1, 2), (2, 1), (1, 3)] {
        let w = sharpness(&b, 2, k, l).unwrap();
        if !w.passed() || w.zweight != Some(k + l) {
            bad.push(format!("(k,l)=({k},{l}): weight {:?}", w.zweight));
        }
    }
    report(7, bad.is_empty(), secs(30), t, &bad.join("; "));
}

#[test]
fn criterion_08_pcovering() {
    let t = Instant::now();
    let b = Builder::new();
    let mut bad = Vec::new();
    for n in [2usize, 3] {
        let tilde = b.tilde(2, n, 1).unwrap();
        let base = b.nz(2, n, 1).unwrap();
        let r = verify_pcovering(&tilde, &base).unwrap();
        // dim H_2(H_p; Z/2) = C(n+1, 2)
        let h2 = n * (n + 1) / 2;
        if !r.passed() || r.kernel_order != 1 << h2 {
            bad.push(format!("n={n}: kernel {} passed {}", r.kernel_order, r.passed()));
        }
    }
    report(8, bad.is_empty(), secs(60), t, &bad.join("; "));
}

#[test]
fn criterion_09_matrix_table() {
    let t = Instant::now();
    let rows = verify_split_tables().unwrap();
    let want = [
        ("SL", 2, 2, "EXHAUSTED"),
        ("SL", 3, 2, "FOUND"),
        ("SL", 2, 3, "FOUND"),
        ("GL", 2, 2, "FOUND"),
        ("GL", 3, 2, "FOUND"),
        ("GL", 2, 3, "FOUND"),
    ];
    let mut bad = Vec::new();
    for (kind, p, n, label) in want {
        match rows.iter().find(|r| r.kind.to_string() == kind && r.p == p && r.n == n) {
            Some(r) if r.passed() && r.outcome.label() == label => {
                if let SearchOutcome::Found(_) = r.outcome {
                    if !r.replayed {
                        bad.push(format!("{kind}_{n}(Z/{}) did not replay", p * p));
                    }
                }
            }
            Some(r) => bad.push(format!("{kind}_{n}(Z/{}): {}", p * p, r.outcome.label())),
            None => bad.push(format!("{kind}_{n}(Z/{}) missing", p * p)),
        }
    }
    report(9, bad.is_empty(), secs(600), t, &bad.join("; "));
}

#[test]
fn criterion_10_fixture_sections() {
    let t = Instant::now();
    let r = verify_fixture_sections(&Builder::new()).unwrap();
    let failed: Vec<&str> = r.legs.iter().filter(|l| !l.pass).map(|l| l.name.as_str()).collect();
    report(10, r.passed() && !r.legs.is_empty(), secs(10), t, &failed.join(", "));
}

#[test]
fn criterion_11_obstruction() {
    let t = Instant::now();
    let ob = obstruction_23(&Builder::new(), Series::S).unwrap();
    // the six values w T13(w) on the basis of L_2
    let table = [
        ("x1^2", "1"),
        ("x2^2", "1"),
        ("x3^2", "x1^2*[x1,x3]"),
        ("[x1,x2]", "1"),
        ("[x1,x3]", "1"),
        ("[x2,x3]", "[x2,x1]"),
    ];
    let products_match = ob.products.len() == 6
        && ob.products.iter().zip(table).all(|(row, (w, v))| row.0 == w && row.2 == v && row.3);
    let pass = products_match && ob.image_size < 64 && !ob.x1_sq_in_image && ob.scanned == 262_144 && ob.solutions == 0;
    let detail = format!("image {} of 64, scanned {}, solutions {}", ob.image_size, ob.scanned, ob.solutions);
    report(11, pass && ob.passed(), secs(300), t, &detail);
}

#[test]
fn criterion_12_kge2_and_grid() {
    let t = Instant::now();
    let b = Builder::new();
    let mut bad = Vec::new();
    for p in [2u32, 3] {
        let cert = nosplit_kge2(&b, Series::Z, p, 2, 2).unwrap();
        if cert.kind != NoSplitKind::CommutatorInKernel || !replay_commutator(&b, &cert).unwrap() {
            bad.push(format!("(Z,{p},2,2): commutator certificate"));
        }
    }
    let mut evaluated = 0;
    for (series, p, n, k) in grid_points() {
        match certify(&b, series, p, n, k) {
            Ok(cert) => {
                evaluated += 1;
                let expected = expected_verdict(series, p, n, k);
                if cert.verdict() != expected || !replay(&b, &cert).unwrap() {
                    bad.push(format!("({series},{p},{n},{k}): got {:?}", cert.verdict()));
                }
            }
            Err(e) if e.is_budget() => println!("  skipped ({series},{p},{n},{k}): {e}"),
            Err(e) => bad.push(format!("({series},{p},{n},{k}): {e}")),
        }
    }
    let expected_split = grid_points().into_iter().filter(|&(s, p, n, k)| expected_verdict(s, p, n, k) == Verdict::Split).count();
    let detail = format!("{evaluated}/{} grid points evaluated, {expected_split} split; {}", grid_points().len(), bad.join("; "));
    report(12, bad.is_empty() && evaluated > 0, secs(300), t, &detail);
}
