//! `pcentral`: command-line driver for the quotient, extension and splitting
//! checks.

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use pcentral::extensions::{
    check_hall_congruence, sharpness, verify_exactness, verify_ia_central, verify_lemma, verify_noncentral,
    verify_stab_hom, Ctx, Leg, Mode, Report, REPORT_VERSION,
};
use pcentral::quotients::{series_fuzz, stallings_ambient_depth, stallings_layers, verify_pcovering};
use pcentral::splitting::{certify, expected_verdict, grid_points, obstruction_23, replay, verify_fixture_sections, Verdict};
use pcentral::words::hall_identity_suite;
use pcentral::{jennings_dims, Builder, Error, Series};

use config::{read_config, Overrides, RunConfig};

const EXIT_FAIL: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "pcentral", version, about = "Quotients of free groups by mod-p central series, their automorphisms and extensions")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Prime p.
    #[arg(short = 'p', global = true)]
    p: Option<u32>,
    /// Rank of the free group.
    #[arg(short = 'n', global = true)]
    n: Option<usize>,
    /// Level k.
    #[arg(short = 'k', global = true)]
    k: Option<usize>,
    /// Series: Z (Zassenhaus) or S (Stallings).
    #[arg(short = 's', long, global = true)]
    series: Option<Series>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Largest enumerated group.
    #[arg(long, global = true)]
    order_budget: Option<usize>,
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    no_cache: bool,
    /// Output file; JSON goes to stdout when absent.
    #[arg(short = 'o', long, global = true)]
    output: Option<PathBuf>,
    /// Optional `key = value` file; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Layer dimensions and group orders.
    Dims {
        #[arg(long)]
        kmax: Option<usize>,
    },
    /// Run one verifier.
    Verify {
        what: What,
        /// Second level for `sharpness`.
        #[arg(short = 'l', long)]
        l: Option<usize>,
    },
    /// Splitting or non-splitting certificate for one (series, p, n, k).
    Split,
    /// Randomized suites.
    Fuzz { suite: Suite },
    /// The full verdict grid.
    Grid,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum What {
    Exactness,
    Centrality,
    IaCentral,
    Pcovering,
    Lemma,
    Sharpness,
    StabHom,
    Fixtures,
    Obstruction,
    Matrix,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Suite {
    Hall,
    Series,
    Congruence,
}

/// Why a command did not pass.
enum Failure {
    Verification(String),
    Budget(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            e if e.is_budget() => Failure::Budget(e.to_string()),
            Error::InvalidArgument(_) | Error::Parse { .. } | Error::IndexOutOfRange { .. } | Error::RankMismatch { .. } => {
                Failure::Usage(e.to_string())
            }
            e => Failure::Verification(e.to_string()),
        }
    }
}

type Outcome = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let file = match cli.common.config.as_deref().map(read_config).transpose() {
        Ok(f) => f.unwrap_or_default(),
        Err(msg) => return usage(&msg),
    };
    let kmax = match &cli.command {
        Command::Dims { kmax } => *kmax,
        _ => None,
    };
    let c = cli.common;
    let overrides = Overrides {
        p: c.p,
        n: c.n,
        k: c.k,
        series: c.series,
        seed: c.seed,
        jobs: c.jobs,
        samples: c.samples,
        kmax,
        order_budget: c.order_budget,
        cache_dir: c.cache_dir,
        no_cache: c.no_cache,
        output: c.output,
    };
    let cfg = match RunConfig::resolve(overrides, &file) {
        Ok(cfg) => cfg,
        Err(msg) => return usage(&msg),
    };
    eprintln!("seed = {}", cfg.seed);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build().expect("thread pool");
    let outcome = pool.install(|| run(&cli.command, &cfg));
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(EXIT_FAIL)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("resource limit: {msg}");
            ExitCode::from(EXIT_BUDGET)
        }
        Err(Failure::Usage(msg)) => usage(&msg),
    }
}

fn usage(msg: &str) -> ExitCode {
    eprintln!("usage error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn builder(cfg: &RunConfig) -> Builder {
    let mut b = Builder::new();
    b.order_budget = cfg.order_budget;
    if let Some(dir) = &cfg.cache_dir {
        b = b.with_cache(dir);
    }
    b
}

fn ctx(cfg: &RunConfig) -> Result<Ctx, Failure> {
    Ok(Ctx::new(cfg.p, cfg.n, cfg.k, cfg.series)?)
}

fn emit(cfg: &RunConfig, value: &impl Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("report serializes") + "\n";
    match &cfg.output {
        Some(path) => write_file(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Failure::Verification(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, text).map_err(|e| Failure::Verification(format!("{}: {e}", path.display())))
}

fn run(cmd: &Command, cfg: &RunConfig) -> Outcome {
    match cmd {
        Command::Dims { .. } => cmd_dims(cfg),
        Command::Verify { what, l } => cmd_verify(*what, *l, cfg),
        Command::Split => cmd_split(cfg),
        Command::Fuzz { suite } => cmd_fuzz(*suite, cfg),
        Command::Grid => cmd_grid(cfg),
    }
}

#[derive(Serialize)]
struct DimsRow {
    level: usize,
    dim: Option<u32>,
    log_order: Option<u32>,
    enumerated: Option<usize>,
    note: Option<String>,
}

fn cmd_dims(cfg: &RunConfig) -> Outcome {
    let b = builder(cfg);
    let (p, n, kmax) = (cfg.p, cfg.n, cfg.kmax);
    let mut rows = Vec::new();
    let mut ok = true;
    match cfg.series {
        Series::Z => {
            let jd = jennings_dims(p, n, kmax)?;
            for l in 1..=kmax {
                let log_order = jd.log_orders[l - 1] as u32;
                let (enumerated, note) = match b.nz(p, n, l) {
                    Ok(g) => {
                        let matches = g.log_order() == log_order;
                        ok &= matches;
                        (Some(g.order()), (!matches).then(|| "enumeration disagrees".to_string()))
                    }
                    Err(e) if e.is_budget() => (None, Some(format!("budget: {e}"))),
                    Err(e) => return Err(e.into()),
                };
                rows.push(DimsRow { level: l, dim: Some(jd.dims[l - 1] as u32), log_order: Some(log_order), enumerated, note });
            }
        }
        Series::S => {
            // the deepest level whose ambient fits the budget
            let mut reached = None;
            for top in (1..=kmax).rev() {
                match b.nz(p, n, stallings_ambient_depth(p, top)) {
                    Ok(amb) => {
                        reached = Some((top, stallings_layers(&amb, top).1));
                        break;
                    }
                    Err(e) if e.is_budget() => continue,
                    Err(e) => return Err(e.into()),
                }
            }
            let (top, dims) = reached.unwrap_or((0, Vec::new()));
            let mut log_order = 0;
            for l in 1..=kmax {
                if l <= top {
                    log_order += dims[l - 1];
                    rows.push(DimsRow { level: l, dim: Some(dims[l - 1]), log_order: Some(log_order), enumerated: None, note: None });
                } else {
                    rows.push(DimsRow { level: l, dim: None, log_order: None, enumerated: None, note: Some("budget".into()) });
                }
            }
        }
    }
    let shown: Vec<String> = rows.iter().map(|r| r.dim.map_or("?".to_string(), |d| d.to_string())).collect();
    eprintln!("dims: {}", shown.join(","));
    emit(
        cfg,
        &json!({
            "pcentral_report": REPORT_VERSION,
            "ctx": { "p": p, "n": n, "series": cfg.series, "kmax": kmax },
            "rows": rows,
        }),
    )?;
    Ok(ok)
}

fn cmd_verify(what: What, l: Option<usize>, cfg: &RunConfig) -> Outcome {
    let b = builder(cfg);
    let samples = cfg.samples.unwrap_or(200);
    let (pass, value): (bool, Value) = match what {
        What::Exactness => {
            let r = verify_exactness(&b, ctx(cfg)?, cfg.seed)?;
            (r.verdict(), serde_json::to_value(&r).expect("serializes"))
        }
        What::Centrality => {
            let (r, _) = verify_noncentral(&b, ctx(cfg)?)?;
            (r.passed() && r.witness.is_some(), serde_json::to_value(&r).expect("serializes"))
        }
        What::IaCentral => {
            let r = verify_ia_central(&b, ctx(cfg)?, cfg.seed)?;
            (r.passed(), serde_json::to_value(&r).expect("serializes"))
        }
        What::Pcovering => {
            let c = ctx(cfg)?;
            if c.p != 2 {
                return Err(Failure::Usage("p-covering checks are built for p = 2".into()));
            }
            let tilde = b.tilde(2, c.n, c.k)?;
            let base = b.nz(2, c.n, c.k)?;
            let cov = verify_pcovering(&tilde, &base)?;
            let mut r = Report::new(c);
            r.push(Leg::new("central", Mode::Exhaustive, cov.kernel_order as u64, cov.central));
            r.push(Leg::new("elementary-abelian", Mode::Exhaustive, cov.kernel_order as u64, cov.elementary_abelian));
            r.push(Leg::new("in-frattini", Mode::Exhaustive, cov.kernel_order as u64, cov.in_frattini));
            if c.k == 1 {
                // kernel of the covering of H_p is H_2(H_p; Z/p) of rank C(n+1, 2)
                let expected = 1usize << (c.n * (c.n + 1) / 2);
                r.push(Leg::new("kernel-rank", Mode::Exhaustive, 1, cov.kernel_order == expected));
            }
            let trivial = b.nz(2, c.n, 0)?;
            let control = !verify_pcovering(&base, &trivial)?.passed() || c.k == 0;
            r.push(Leg::new("negative-control", Mode::Exhaustive, 1, control));
            (r.passed(), serde_json::to_value(&r).expect("serializes"))
        }
        What::Lemma => {
            let r = verify_lemma(&b, cfg.series, cfg.p, cfg.n, cfg.k + 1, samples, cfg.seed)?;
            (r.passed(), serde_json::to_value(&r).expect("serializes"))
        }
        What::Sharpness => {
            let w = sharpness(&b, cfg.p, cfg.k, l.unwrap_or(cfg.k + 1))?;
            let mut v = serde_json::to_value(&w).expect("serializes");
            v["pcentral_report"] = json!(REPORT_VERSION);
            (w.passed(), v)
        }
        What::StabHom => {
            if cfg.p != 2 {
                return Err(Failure::Usage("stabilizer checks are built for p = 2".into()));
            }
            let (r, size) = verify_stab_hom(&b, cfg.n, cfg.k, cfg.seed)?;
            let mut v = serde_json::to_value(&r).expect("serializes");
            v["kernel_size"] = json!(size.to_string());
            (r.passed(), v)
        }
        What::Fixtures => {
            let r = verify_fixture_sections(&b)?;
            (r.passed(), serde_json::to_value(&r).expect("serializes"))
        }
        What::Obstruction => {
            let ob = obstruction_23(&b, cfg.series)?;
            let mut v = serde_json::to_value(&ob).expect("serializes");
            v["pcentral_report"] = json!(REPORT_VERSION);
            (ob.passed(), v)
        }
        What::Matrix => {
            let rows = pcentral::matgroups::verify_split_tables()?;
            for r in &rows {
                eprintln!("{}_{}(Z/{}) -> {}_{}(Z/{}): {}", r.kind, r.n, r.p * r.p, r.kind, r.n, r.p, r.outcome.label());
            }
            (rows.iter().all(|r| r.passed()), json!({ "pcentral_report": REPORT_VERSION, "rows": rows }))
        }
    };
    emit(cfg, &value)?;
    eprintln!("{}", if pass { "PASS" } else { "FAIL" });
    Ok(pass)
}

fn cmd_split(cfg: &RunConfig) -> Outcome {
    let b = builder(cfg);
    let c = ctx(cfg)?;
    let cert = certify(&b, c.series, c.p, c.n, c.k)?;
    let replayed = replay(&b, &cert)?;
    let expected = expected_verdict(c.series, c.p, c.n, c.k);
    let label = match &cert {
        pcentral::splitting::Certificate::Split(_) => "SPLIT".to_string(),
        pcentral::splitting::Certificate::NoSplit(n) => format!("NOSPLIT ({})", serde_json::to_value(n.kind).expect("serializes").as_str().unwrap_or("")),
    };
    eprintln!("{c}: {label}");
    let mut v = serde_json::to_value(&cert).expect("serializes");
    v["pcentral_report"] = json!(REPORT_VERSION);
    v["replayed"] = json!(replayed);
    emit(cfg, &v)?;
    Ok(replayed && cert.verdict() == expected)
}

fn cmd_fuzz(suite: Suite, cfg: &RunConfig) -> Outcome {
    let b = builder(cfg);
    let (failures, value): (Vec<String>, Value) = match suite {
        Suite::Hall => {
            let r = hall_identity_suite(3, cfg.samples.unwrap_or(1000), cfg.seed)?;
            let f = r.failures.iter().map(|f| format!("({}) x={} y={} z={}", f.identity, f.x, f.y, f.z)).collect();
            (f, serde_json::to_value(&r).expect("serializes"))
        }
        Suite::Series => {
            let r = series_fuzz(&b, cfg.p, cfg.n, cfg.samples.unwrap_or(500), cfg.seed)?;
            (r.failures.clone(), serde_json::to_value(&r).expect("serializes"))
        }
        Suite::Congruence => {
            let r = check_hall_congruence(cfg.p, cfg.n, cfg.samples.unwrap_or(500), cfg.seed)?;
            let f = r.failures.iter().map(|f| format!("{}: x={} y={}", f.check, f.x, f.y)).collect();
            (f, serde_json::to_value(&r).expect("serializes"))
        }
    };
    let mut value = value;
    value["pcentral_report"] = json!(REPORT_VERSION);
    emit(cfg, &value)?;
    eprintln!("{} failures", failures.len());
    if let Some(smallest) = failures.iter().min_by_key(|f| f.len()) {
        eprintln!("smallest counterexample: {smallest}");
    }
    Ok(failures.is_empty())
}

#[derive(Serialize)]
struct GridRow {
    series: Series,
    p: u32,
    n: usize,
    k: usize,
    verdict: String,
    expected: Verdict,
    certificate_path: Option<String>,
    wall_time_ms: u128,
    replayed: Option<bool>,
    note: Option<String>,
}

impl GridRow {
    fn agrees(&self) -> Option<bool> {
        let verdict = match self.verdict.as_str() {
            "SPLIT" => Verdict::Split,
            "NOSPLIT" => Verdict::NoSplit,
            _ => return None,
        };
        Some(verdict == self.expected && self.replayed == Some(true))
    }
}

fn cmd_grid(cfg: &RunConfig) -> Outcome {
    let b = builder(cfg);
    let out = cfg.output.clone().unwrap_or_else(|| PathBuf::from("verdict-grid.json"));
    let cert_dir = out.parent().unwrap_or(Path::new("")).join("certificates");
    let rows: Vec<Result<GridRow, Failure>> = grid_points()
        .into_par_iter()
        .map(|(series, p, n, k)| {
            let start = Instant::now();
            let expected = expected_verdict(series, p, n, k);
            let mut row = GridRow { series, p, n, k, verdict: "SKIPPED".into(), expected, certificate_path: None, wall_time_ms: 0, replayed: None, note: None };
            match certify(&b, series, p, n, k) {
                Ok(cert) => {
                    row.replayed = Some(replay(&b, &cert)?);
                    row.verdict = if cert.verdict() == Verdict::Split { "SPLIT" } else { "NOSPLIT" }.into();
                    let path = cert_dir.join(format!("{series}-p{p}-n{n}-k{k}.json"));
                    write_file(&path, &(serde_json::to_string_pretty(&cert).expect("serializes") + "\n"))?;
                    row.certificate_path = Some(path.display().to_string());
                }
                Err(e) if e.is_budget() => row.note = Some(e.to_string()),
                Err(e) => return Err(e.into()),
            }
            row.wall_time_ms = start.elapsed().as_millis();
            Ok(row)
        })
        .collect();
    let rows: Vec<GridRow> = rows.into_iter().collect::<Result<_, _>>()?;
    let mut all = true;
    for r in &rows {
        let status = match r.agrees() {
            Some(true) => "agrees",
            Some(false) => {
                all = false;
                "DISAGREES"
            }
            None => "skipped",
        };
        eprintln!("{} p={} n={} k={}: {} (expected {:?}) {status}", r.series, r.p, r.n, r.k, r.verdict, r.expected);
    }
    write_file(&out, &(serde_json::to_string_pretty(&rows).expect("serializes") + "\n"))?;
    Ok(all && rows.iter().any(|r| r.agrees().is_some()))
}
