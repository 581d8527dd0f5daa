use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};

use chiral_blocks::{Error, Result};

pub const THREADS_ENV: &str = "CHIRAL_BLOCKS_THREADS";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    #[default]
    Exact,
    /// Exact results plus a floating-point cross-check column.
    Crosscheck,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Flags shared by every subcommand. Unset flags fall back to the config
/// file, then to per-command defaults.
#[derive(Args, Clone, Debug, Default)]
pub struct CommonArgs {
    /// Disk index: the boundary sphere is S^{4k+1}.
    #[arg(long)]
    pub k: Option<usize>,
    /// Highest eigenlevel N.
    #[arg(long = "max-level")]
    pub max_level: Option<usize>,
    /// Fock truncation degree D.
    #[arg(long)]
    pub trunc: Option<usize>,
    #[arg(long)]
    pub lambda: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads [default: $CHIRAL_BLOCKS_THREADS, else all cores].
    #[arg(long)]
    pub threads: Option<usize>,
    /// Line-based `key=value` file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// Fully resolved settings of one run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub k: usize,
    pub max_level: Option<usize>,
    pub trunc: Option<usize>,
    pub lambda: u32,
    pub seed: u64,
    pub trials: Option<usize>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub mode: Mode,
    pub format: Format,
    pub suite: Option<String>,
}

fn usage(msg: String) -> Error {
    Error::Precondition(msg)
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| usage(format!("config: invalid value '{value}' for '{key}'")))
}

fn parse_enum<T: ValueEnum>(key: &str, value: &str) -> Result<T> {
    T::from_str(value, true).map_err(|_| usage(format!("config: invalid value '{value}' for '{key}'")))
}

/// Reads `key=value` lines. Blank lines and `#` comments are skipped; keys
/// accept either `-` or `_` as separator.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) =
            line.split_once('=').ok_or_else(|| usage(format!("config line {}: expected key=value", no + 1)))?;
        out.insert(key.trim().replace('-', "_"), value.trim().to_string());
    }
    Ok(out)
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs, suite: Option<&str>) -> Result<Self> {
        let file = match &args.config {
            Some(path) => load(path)?,
            None => BTreeMap::new(),
        };
        let known =
            ["k", "max_level", "trunc", "lambda", "seed", "trials", "out", "threads", "mode", "format", "suite"];
        if let Some(key) = file.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(usage(format!("config: unknown key '{key}'")));
        }
        let get = |key: &str| file.get(key).map(String::as_str);
        let num = |key: &str| get(key).map(|v| parse_value::<usize>(key, v)).transpose();

        let threads = match args.threads {
            Some(t) => Some(t),
            None => match num("threads")? {
                Some(t) => Some(t),
                None => match std::env::var(THREADS_ENV) {
                    Ok(v) => Some(parse_value(THREADS_ENV, &v)?),
                    Err(_) => None,
                },
            },
        };
        if threads == Some(0) {
            return Err(usage("thread count must be positive".into()));
        }
        Ok(RunConfig {
            k: args.k.map_or_else(|| num("k").map(|v| v.unwrap_or(0)), Ok)?,
            max_level: args.max_level.map_or_else(|| num("max_level"), |v| Ok(Some(v)))?,
            trunc: args.trunc.map_or_else(|| num("trunc"), |v| Ok(Some(v)))?,
            lambda: match args.lambda {
                Some(l) => l,
                None => get("lambda").map_or(Ok(0), |v| parse_value("lambda", v))?,
            },
            seed: match args.seed {
                Some(s) => s,
                None => get("seed").map_or(Ok(chiral_blocks::random::DEFAULT_SEED), |v| parse_value("seed", v))?,
            },
            trials: args.trials.map_or_else(|| num("trials"), |v| Ok(Some(v)))?,
            out: args.out.clone().or_else(|| get("out").map(PathBuf::from)),
            threads,
            mode: match args.mode {
                Some(m) => m,
                None => get("mode").map_or(Ok(Mode::Exact), |v| parse_enum("mode", v))?,
            },
            format: match args.format {
                Some(f) => f,
                None => get("format").map_or(Ok(Format::Json), |v| parse_enum("format", v))?,
            },
            suite: suite.map(str::to_string).or_else(|| get("suite").map(str::to_string)),
        })
    }
}

fn load(path: &Path) -> Result<BTreeMap<String, String>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_lines() {
        let map = parse_config("# run\nk = 1\nmax-level=2\n\nmode=crosscheck\n").unwrap();
        assert_eq!(map["k"], "1");
        assert_eq!(map["max_level"], "2");
        assert!(parse_config("k 1").is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = std::env::temp_dir().join(format!("chiral-blocks-cfg-{}", std::process::id()));
        std::fs::write(&dir, "k=1\ntrunc=3\nmode=crosscheck\nthreads=2\n").unwrap();
        let args = CommonArgs { k: Some(0), config: Some(dir.clone()), ..Default::default() };
        let cfg = RunConfig::resolve(&args, None).unwrap();
        std::fs::remove_file(&dir).unwrap();
        assert_eq!(cfg.k, 0);
        assert_eq!(cfg.trunc, Some(3));
        assert_eq!(cfg.mode, Mode::Crosscheck);
        assert_eq!(cfg.threads, Some(2));
        assert_eq!(cfg.seed, 42);
    }
}
