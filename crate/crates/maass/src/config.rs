//! Command-line flags, the flat config file and their merge into a
//! [`RunConfig`].
//!
//! A config file holds one `key = value` per line with `#` comments. Keys
//! are the long flag names of the chosen subcommand or the global flags.
//! File values are inserted ahead of the command-line flags, so a flag
//! given on the command line wins.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use crate::cache::default_cache_dir;
use crate::error::{CliError, CliResult};

/// `lo:hi` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl FromStr for Window {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| format!("expected lo:hi, got `{s}`"))?;
        let lo: f64 = a
            .trim()
            .parse()
            .map_err(|_| format!("bad lower end `{a}`"))?;
        let hi: f64 = b
            .trim()
            .parse()
            .map_err(|_| format!("bad upper end `{b}`"))?;
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(format!("window `{s}` needs lo < hi"));
        }
        Ok(Self { lo, hi })
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

/// Comma-separated list of reals.
#[derive(Debug, Clone, PartialEq)]
pub struct RealList(pub Vec<f64>);

impl FromStr for RealList {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| format!("bad number `{p}`"))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(RealList)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ParityArg {
    Even,
    Odd,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LMethod {
    /// `L(1, sym² u)` from the Petersson norm on a grid.
    RankinSelberg,
    /// Partial Euler product over `p <= 1000`.
    Euler,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Computed,
    Uniform,
    SatoTate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum XCutoffArg {
    /// `x = (X + t_g)^θ`.
    Power,
    /// `x = (X + t_g)^{1/(εV)}`.
    Proof,
    /// `x = min{(X + t_g)^{1/(εV)}, Y^{(16 - 0.0001)/(9εV)}}`.
    ProofY,
}

#[derive(Parser, Debug, Clone, PartialEq)]
#[command(
    name = "maass",
    version,
    about = "Hecke–Maass forms, joint moments and moment-bound harnesses"
)]
#[command(args_override_self = true)]
pub struct Cli {
    /// Flat `key = value` config file; command-line flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Form cache directory (default: $MAASS_CACHE_DIR or ./maass-cache).
    #[arg(long, global = true, value_name = "DIR")]
    pub cache_dir: Option<PathBuf>,
    /// Write the CSV here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub output: Option<PathBuf>,
    /// Worker threads, 0 for one per core.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, PartialEq)]
pub enum Command {
    /// Find Maass forms in a spectral window and cache them.
    Solve(SolveArgs),
    /// Joint moment of two cached forms against the Gaussian prediction.
    Moment(MomentArgs),
    /// Spectral expansion of <f², g²> over the cached basis.
    Parseval(ParsevalArgs),
    /// Archimedean exponents and the Stirling weight.
    Weights(WeightsArgs),
    /// Both sides of the Kuznetsov formula on a window.
    Trace(TraceArgs),
    /// Chernoff moment-bound pipeline.
    Bounds(BoundsArgs),
    /// Fast run of the invariant suite.
    Selftest,
}

#[derive(clap::Args, Debug, Clone, PartialEq)]
pub struct SolveArgs {
    #[arg(long, value_enum, default_value = "even")]
    pub parity: ParityArg,
    /// Spectral window `lo:hi`.
    #[arg(long)]
    pub window: Window,
    /// Stored coefficients per form.
    #[arg(long, default_value_t = 1000)]
    pub n_coeffs: usize,
    /// Number of unknowns; derived from the Bessel tail when absent.
    #[arg(long)]
    pub truncation: Option<usize>,
    /// Width of the subwindows scanned independently.
    #[arg(long, default_value_t = 1.0)]
    pub chunk: f64,
}

#[derive(clap::Args, Debug, Clone, PartialEq)]
pub struct MomentArgs {
    #[arg(long, default_value_t = 2)]
    pub a: u32,
    #[arg(long, default_value_t = 2)]
    pub b: u32,
    /// Use the cached even form nearest to this `t` as `f`.
    #[arg(long)]
    pub tf: Option<f64>,
    #[arg(long)]
    pub tg: Option<f64>,
    /// Bump weight `x,y,radius`; constant weight when absent.
    #[arg(long)]
    pub bump: Option<RealList>,
    #[arg(long, default_value_t = 1e-8)]
    pub target_error: f64,
}

#[derive(clap::Args, Debug, Clone, PartialEq)]
pub struct ParsevalArgs {
    #[arg(long)]
    pub tf: Option<f64>,
    #[arg(long)]
    pub tg: Option<f64>,
    /// Cusp-sum cutoffs reported, increasing.
    #[arg(long, default_value = "20,28,36")]
    pub cutoffs: RealList,
    /// Eisenstein truncation `T_E`; `2 max(t_f, t_g)` when absent.
    #[arg(long)]
    pub eis_max: Option<f64>,
    #[arg(long, default_value_t = 0.25)]
    pub eis_spacing: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub target_error: f64,
}

#[derive(clap::Args, Debug, Clone, PartialEq)]
pub struct WeightsArgs {
    /// Random sweep over t_f, t_g, t_k in [5, 40] and t_j in [0.5, 100].
    #[arg(long)]
    pub sweep: bool,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long)]
    pub tj: Option<f64>,
    #[arg(long)]
    pub tf: Option<f64>,
    #[arg(long)]
    pub tg: Option<f64>,
    #[arg(long)]
    pub tk: Option<f64>,
}

#[derive(clap::Args, Debug, Clone, PartialEq)]
pub struct TraceArgs {
    #[arg(long, default_value_t = 1)]
    pub n: u64,
    #[arg(long, default_value_t = 1)]
    pub m: u64,
    #[arg(long = "X")]
    pub x: f64,
    #[arg(long = "Y")]
    pub y: f64,
    #[arg(long = "M")]
    pub m_width: f64,
    #[arg(long, default_value_t = 500)]
    pub cmax: usize,
    /// Form cache to read; overrides --cache-dir.
    #[arg(long, value_name = "DIR")]
    pub forms: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "rankin-selberg")]
    pub l_method: LMethod,
}

#[derive(clap::Args, Debug, Clone, PartialEq)]
pub struct BoundsArgs {
    #[arg(long, value_enum, default_value = "sato-tate")]
    pub model: ModelArg,
    #[arg(long, default_value_t = 1.0)]
    pub l1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub l2: f64,
    #[arg(long, default_value_t = 1.0)]
    pub l3: f64,
    #[arg(long = "X")]
    pub x: f64,
    #[arg(long = "Y")]
    pub y: f64,
    #[arg(long = "M")]
    pub m_width: f64,
    #[arg(long, value_enum, default_value = "power")]
    pub x_cutoff: XCutoffArg,
    /// Exponent θ for `--x-cutoff power`.
    #[arg(long, default_value_t = 1.0)]
    pub theta: f64,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    /// Upper limit constant `C`.
    #[arg(long, default_value_t = 2.0)]
    pub c_upper: f64,
    /// Synthetic entries in the window.
    #[arg(long, default_value_t = 4000)]
    pub entries: usize,
    /// `t_f`, `t_g` of the synthetic twist.
    #[arg(long, default_value_t = 10.0)]
    pub tf: f64,
    #[arg(long, default_value_t = 20.0)]
    pub tg: f64,
    /// Largest prime with Satake data; derived from the cutoff when absent.
    #[arg(long)]
    pub p_max: Option<u64>,
}

/// A validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub cache_dir: PathBuf,
    pub output: Option<PathBuf>,
    pub seed: u64,
    pub threads: usize,
    /// One line per config-file key: where its effective value came from.
    pub provenance: Vec<String>,
}

/// Result of argument parsing.
#[derive(Debug, Clone, PartialEq)]
pub enum Parsed {
    Run(RunConfig),
    /// `--help` or `--version` text, to be printed with exit code 0.
    Info(String),
}

const GLOBAL_VALUE_FLAGS: [&str; 5] =
    ["--config", "--cache-dir", "--output", "--threads", "--seed"];

/// Index of the subcommand token in `argv`.
fn subcommand_index(argv: &[String]) -> Option<usize> {
    let mut i = 1;
    while i < argv.len() {
        let a = &argv[i];
        if GLOBAL_VALUE_FLAGS.contains(&a.as_str()) {
            i += 2;
            continue;
        }
        if !a.starts_with('-') {
            return Some(i);
        }
        i += 1;
    }
    None
}

fn config_path(argv: &[String]) -> Option<PathBuf> {
    let mut it = argv.iter().skip(1);
    let mut found = None;
    while let Some(a) = it.next() {
        if a == "--config" {
            found = it.next().map(PathBuf::from);
        } else if let Some(v) = a.strip_prefix("--config=") {
            found = Some(PathBuf::from(v));
        }
    }
    found
}

/// `(key, value, line)` triples of a config file.
pub fn read_config_file(text: &str, path: &Path) -> CliResult<Vec<(String, String, usize)>> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!(
                "{}:{}: expected `key = value`, got `{line}`",
                path.display(),
                k + 1
            ))
        })?;
        let key = key.trim();
        if key.is_empty() || key == "config" {
            return Err(CliError::Usage(format!(
                "{}:{}: invalid key `{key}`",
                path.display(),
                k + 1
            )));
        }
        out.push((key.to_string(), value.trim().to_string(), k + 1));
    }
    Ok(out)
}

fn flag_given(argv: &[String], key: &str) -> bool {
    let long = format!("--{key}");
    let eq = format!("--{key}=");
    argv.iter()
        .skip(1)
        .any(|a| *a == long || a.starts_with(&eq))
}

/// Merges the config file into `argv` and parses the result.
pub fn parse_config(argv: &[String]) -> CliResult<Parsed> {
    let mut args: Vec<String> = argv.to_vec();
    let mut provenance = Vec::new();
    if let (Some(path), Some(sub_at)) = (config_path(argv), subcommand_index(argv)) {
        let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        let entries = read_config_file(&text, &path)?;
        let root = Cli::command();
        let sub_name = &argv[sub_at];
        let sub = root
            .find_subcommand(sub_name)
            .ok_or_else(|| CliError::Usage(format!("unknown subcommand `{sub_name}`")))?;
        let known: Vec<&clap::Arg> = root.get_arguments().chain(sub.get_arguments()).collect();
        let mut inserted = Vec::new();
        for (key, value, line) in entries {
            let arg = known
                .iter()
                .find(|a| a.get_long() == Some(key.as_str()))
                .ok_or_else(|| {
                    CliError::Usage(format!(
                        "{}:{line}: unknown config key `{key}` for `{sub_name}`",
                        path.display()
                    ))
                })?;
            if flag_given(argv, &key) {
                provenance.push(format!(
                    "{key}: command-line flag overrides config file value `{value}`"
                ));
                continue;
            }
            provenance.push(format!("{key}: config file ({})", path.display()));
            if arg.get_action().takes_values() {
                inserted.push(format!("--{key}={value}"));
            } else {
                match value.as_str() {
                    "true" => inserted.push(format!("--{key}")),
                    "false" => {}
                    _ => {
                        return Err(CliError::Usage(format!(
                            "{}:{line}: key `{key}` takes true or false, got `{value}`",
                            path.display()
                        )))
                    }
                }
            }
        }
        args.splice(sub_at + 1..sub_at + 1, inserted);
    }
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    Ok(Parsed::Info(e.render().to_string()))
                }
                _ => Err(CliError::Usage(
                    e.render().to_string().trim_end().to_string(),
                )),
            };
        }
    };
    let cfg = RunConfig {
        cache_dir: cli.cache_dir.unwrap_or_else(default_cache_dir),
        output: cli.output,
        seed: cli.seed,
        threads: cli.threads,
        command: cli.command,
        provenance,
    };
    cfg.validate()?;
    Ok(Parsed::Run(cfg))
}

fn check(ok: bool, msg: &str) -> CliResult<()> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Usage(msg.to_string()))
    }
}

fn positive(x: f64) -> bool {
    x > 0.0 && x.is_finite()
}

impl RunConfig {
    /// Range checks done before any computation.
    pub fn validate(&self) -> CliResult<()> {
        match &self.command {
            Command::Solve(a) => {
                check(a.window.lo > 0.0, "--window needs lo > 0")?;
                check(
                    a.n_coeffs >= 2 && a.n_coeffs <= 100_000,
                    "--n-coeffs must be in [2, 100000]",
                )?;
                check(positive(a.chunk), "--chunk must be positive")?;
                check(
                    a.truncation.is_none_or(|m| m >= 2),
                    "--truncation must be at least 2",
                )?;
            }
            Command::Moment(a) => {
                check(
                    a.a >= 1 && a.b >= 1 && a.a + a.b <= 12,
                    "--a, --b must be positive with a + b <= 12",
                )?;
                check(
                    a.tf.is_none_or(positive) && a.tg.is_none_or(positive),
                    "--tf, --tg must be positive",
                )?;
                if let Some(b) = &a.bump {
                    check(b.0.len() == 3, "--bump takes x,y,radius")?;
                }
                check(
                    a.target_error > 0.0 && a.target_error < 1.0,
                    "--target-error must be in (0, 1)",
                )?;
            }
            Command::Parseval(a) => {
                check(!a.cutoffs.0.is_empty(), "--cutoffs must not be empty")?;
                check(
                    a.cutoffs.0.iter().all(|c| positive(*c)),
                    "--cutoffs must be positive",
                )?;
                check(
                    a.cutoffs.0.windows(2).all(|w| w[0] < w[1]),
                    "--cutoffs must increase",
                )?;
                check(a.eis_max.is_none_or(positive), "--eis-max must be positive")?;
                check(positive(a.eis_spacing), "--eis-spacing must be positive")?;
                check(
                    a.target_error > 0.0 && a.target_error < 1.0,
                    "--target-error must be in (0, 1)",
                )?;
            }
            Command::Weights(a) => {
                if a.sweep {
                    check(
                        a.samples >= 1 && a.samples <= 10_000_000,
                        "--samples must be in [1, 1e7]",
                    )?;
                } else {
                    let all = [a.tj, a.tf, a.tg, a.tk];
                    check(
                        all.iter().all(Option::is_some),
                        "weights needs --sweep or all of --tj --tf --tg --tk",
                    )?;
                    check(a.tj.unwrap() != 0.0, "--tj must be nonzero")?;
                    check(
                        all[1..].iter().all(|v| v.unwrap() >= 0.0),
                        "--tf, --tg, --tk must be >= 0",
                    )?;
                }
            }
            Command::Trace(a) => {
                check(a.n >= 1 && a.m >= 1, "--n and --m must be at least 1")?;
                check(a.cmax >= 1, "--cmax must be at least 1")?;
                check(
                    positive(a.x) && positive(a.y) && positive(a.m_width),
                    "--X, --Y, --M must be positive",
                )?;
            }
            Command::Bounds(a) => {
                check(
                    [a.l1, a.l2, a.l3].iter().all(|l| positive(*l)),
                    "--l1, --l2, --l3 must be positive",
                )?;
                check(
                    positive(a.x) && positive(a.y) && positive(a.m_width),
                    "--X, --Y, --M must be positive",
                )?;
                check(a.eps > 0.0 && a.eps < 0.5, "--eps must be in (0, 1/2)")?;
                check(a.c_upper >= 1.0, "--c-upper must be at least 1")?;
                check(positive(a.theta), "--theta must be positive")?;
                check(
                    a.entries >= 1 && a.entries <= 1_000_000,
                    "--entries must be in [1, 1e6]",
                )?;
                check(
                    positive(a.tf) && positive(a.tg),
                    "--tf, --tg must be positive",
                )?;
                check(
                    a.p_max.is_none_or(|p| (2..=10_000_000).contains(&p)),
                    "--p-max must be in [2, 1e7]",
                )?;
            }
            Command::Selftest => {}
        }
        Ok(())
    }

    /// Short hash of everything that determines the output.
    pub fn hash(&self) -> String {
        let canon = format!(
            "{:?}|seed={}|cache={}",
            self.command,
            self.seed,
            self.cache_dir.display()
        );
        let d = Sha256::digest(canon.as_bytes());
        d.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    /// Worker count with 0 resolved to the number of cores.
    pub fn worker_count(&self) -> usize {
        if self.threads == 0 {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        } else {
            self.threads
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argv(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    fn run(s: &str) -> RunConfig {
        match parse_config(&argv(s)).unwrap() {
            Parsed::Run(c) => c,
            Parsed::Info(_) => panic!("unexpected info"),
        }
    }

    #[test]
    fn solve_flags() {
        let c = run("maass solve --parity even --window 13.5:14.0");
        match c.command {
            Command::Solve(a) => {
                assert_eq!(a.parity, ParityArg::Even);
                assert_eq!(a.window, Window { lo: 13.5, hi: 14.0 });
                assert_eq!(a.n_coeffs, 1000);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn unknown_flag_is_named() {
        let e = parse_config(&argv("maass solve --window 1:2 --bogus 3")).unwrap_err();
        assert_eq!(e.exit_code(), 64);
        assert!(e.to_string().contains("--bogus"), "{e}");
    }

    #[test]
    fn range_violations_are_usage_errors() {
        assert!(parse_config(&argv("maass bounds --X 100 --Y 50 --M 2 --eps 0.7")).is_err());
        assert!(parse_config(&argv("maass solve --window 2:1")).is_err());
        assert!(parse_config(&argv("maass weights")).is_err());
        assert!(parse_config(&argv("maass parseval --cutoffs 30,20")).is_err());
    }

    #[test]
    fn file_values_and_flag_precedence() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.conf");
        std::fs::write(
            &p,
            "# bounds run\nX = 1000\nY = 500 # half\nM = 10\nl1 = 2\nseed = 9\n",
        )
        .unwrap();
        let c = run(&format!("maass --config {} bounds --l1 3", p.display()));
        match &c.command {
            Command::Bounds(a) => {
                assert_eq!((a.x, a.y, a.m_width), (1000.0, 500.0, 10.0));
                assert_eq!(a.l1, 3.0);
            }
            _ => panic!(),
        }
        assert_eq!(c.seed, 9);
        assert!(c
            .provenance
            .iter()
            .any(|l| l.starts_with("l1: command-line flag overrides")));
    }

    #[test]
    fn unknown_file_key_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.conf");
        std::fs::write(&p, "window = 1:2\ncolour = red\n").unwrap();
        let e = parse_config(&argv(&format!("maass solve --config {}", p.display()))).unwrap_err();
        assert!(e.to_string().contains("colour"), "{e}");
        std::fs::write(&p, "sweep = maybe\n").unwrap();
        assert!(parse_config(&argv(&format!("maass weights --config {}", p.display()))).is_err());
        std::fs::write(&p, "sweep = true\n").unwrap();
        let c = run(&format!("maass weights --config {}", p.display()));
        assert!(matches!(
            c.command,
            Command::Weights(WeightsArgs { sweep: true, .. })
        ));
    }

    #[test]
    fn hash_depends_on_settings() {
        let a = run("maass weights --sweep --samples 10");
        let b = run("maass weights --sweep --samples 11");
        let c = run("maass weights --sweep --samples 10 --threads 3");
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash(), c.hash());
    }

    #[test]
    fn help_is_info() {
        assert!(matches!(
            parse_config(&argv("maass --help")).unwrap(),
            Parsed::Info(_)
        ));
    }
}
