use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use pcentral::Series;

pub const DEFAULT_SEED: u64 = 20_240_917;

/// Options shared by every subcommand, after merging the config file.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub p: u32,
    pub n: usize,
    pub k: usize,
    pub series: Series,
    pub seed: u64,
    pub jobs: usize,
    pub samples: Option<usize>,
    pub kmax: usize,
    pub order_budget: usize,
    pub cache_dir: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

/// Values given on the command line; `None` means "not given".
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub p: Option<u32>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub series: Option<Series>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub samples: Option<usize>,
    pub kmax: Option<usize>,
    pub order_budget: Option<usize>,
    pub cache_dir: Option<PathBuf>,
    pub no_cache: bool,
    pub output: Option<PathBuf>,
}

const KEYS: [&str; 11] = [
    "p", "n", "k", "series", "seed", "jobs", "samples", "kmax", "order_budget", "cache_dir", "output",
];

/// Reads `key = value` lines; `#` starts a comment.
pub fn read_config(path: &Path) -> Result<HashMap<String, String>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut map = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("{}:{}: expected key = value", path.display(), i + 1))?;
        let key = key.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(format!("{}:{}: unknown key {key}", path.display(), i + 1));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

fn get<T: std::str::FromStr>(file: &HashMap<String, String>, key: &str) -> Result<Option<T>, String> {
    file.get(key)
        .map(|v| v.parse::<T>().map_err(|_| format!("config: bad value for {key}: {v}")))
        .transpose()
}

impl RunConfig {
    pub fn resolve(cli: Overrides, file: &HashMap<String, String>) -> Result<Self, String> {
        let cfg = RunConfig {
            p: cli.p.or(get(file, "p")?).unwrap_or(2),
            n: cli.n.or(get(file, "n")?).unwrap_or(2),
            k: cli.k.or(get(file, "k")?).unwrap_or(1),
            series: cli.series.or(get(file, "series")?).unwrap_or(Series::Z),
            seed: cli.seed.or(get(file, "seed")?).unwrap_or(DEFAULT_SEED),
            jobs: cli.jobs.or(get(file, "jobs")?).unwrap_or(0),
            samples: cli.samples.or(get(file, "samples")?),
            kmax: cli.kmax.or(get(file, "kmax")?).unwrap_or(3),
            order_budget: cli
                .order_budget
                .or(get(file, "order_budget")?)
                .unwrap_or(pcentral::quotients::DEFAULT_ORDER_BUDGET),
            cache_dir: if cli.no_cache { None } else { cli.cache_dir.or(get(file, "cache_dir")?) },
            output: cli.output.or(get(file, "output")?),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), String> {
        if !pcentral::is_prime(self.p) {
            return Err(format!("p = {} is not prime", self.p));
        }
        if self.n < 2 {
            return Err("n must be at least 2".into());
        }
        if self.k < 1 || self.kmax < 1 {
            return Err("k and kmax must be at least 1".into());
        }
        if self.samples == Some(0) {
            return Err("samples must be at least 1".into());
        }
        Ok(())
    }
}
