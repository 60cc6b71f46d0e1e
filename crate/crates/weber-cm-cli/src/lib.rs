//! Command surface of the `weber-cm` binary. Every command produces a
//! [`Report`]; `run` parses arguments, executes and renders in one step so
//! the binary and the tests share the same path.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use weber_cm::arith::{DiscriminantPair, DIVISORS_24};
use weber_cm::classpoly::{class_polynomial_at, IntPoly, PolyCache, PolyKind};
use weber_cm::qseries::{blift_check, verify_pol, verify_pol2};
use weber_cm::report::{Check, Format, Report, RunConfig};
use weber_cm::yzlocal::{
    bigcm_check, count_identities, gz_check, table_csv, table_json, table_latex, table_markdown, yz_checks,
    yz_table,
};
use weber_cm::{weilrep, Error, Result};

#[derive(Debug, Parser)]
#[command(name = "weber-cm", version, about = "Exact checks for Weber class invariants and Yui-Zagier resultants")]
pub struct Cli {
    /// Working precision in bits for numerical evaluation (at least 128).
    #[arg(long, global = true, default_value_t = 512)]
    pub precision: u32,
    /// Truncation order N for q-series checks (at least 2).
    #[arg(long, global = true, default_value_t = 4)]
    pub order: u32,
    /// Output format: json, csv, md or text.
    #[arg(long, global = true, default_value = "text")]
    pub format: String,
    /// Directory for cached class polynomials; the WEBER_CM_CACHE variable overrides it.
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Print progress to stderr; repeat for more.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Class polynomial of a discriminant.
    Classpoly {
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
        /// weber (class invariants) or hilbert (j-invariants).
        #[arg(long, default_value = "weber")]
        kind: String,
    },
    /// Yui-Zagier resultants f_s(d1, d2).
    Yz {
        #[command(subcommand)]
        action: YzAction,
    },
    /// Gross-Zagier resultant J(d1, d2).
    Gz {
        #[command(subcommand)]
        action: GzAction,
    },
    /// Weil representation suites.
    Weil {
        #[command(subcommand)]
        action: WeilAction,
    },
    /// Borcherds product identities.
    Borcherds {
        #[command(subcommand)]
        action: BorcherdsAction,
    },
    /// Big CM value log identity.
    Bigcm {
        #[command(subcommand)]
        action: BigcmAction,
    },
}

#[derive(Debug, Args)]
pub struct PairArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub d1: i64,
    #[arg(long, allow_hyphen_values = true)]
    pub d2: i64,
}

#[derive(Debug, Subcommand)]
pub enum YzAction {
    /// Compare the resultant with the prime-power product.
    Verify {
        #[command(flatten)]
        pair: PairArgs,
        /// A divisor of 24, or "all".
        #[arg(long, default_value = "all")]
        s: String,
    },
    /// Table of F(m/k^2) over m = (D - a^2)/4.
    Table {
        #[command(flatten)]
        pair: PairArgs,
        /// Emit a LaTeX tabular instead of the selected format.
        #[arg(long)]
        latex: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum GzAction {
    Verify {
        #[command(flatten)]
        pair: PairArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum WeilAction {
    Check {
        /// A divisor of 24, or "all".
        #[arg(long, default_value = "all")]
        d: String,
        /// relations, cosets, dims, udinv, repembed, appendix, compact or all.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Discriminants for the compact-subgroup suite.
        #[arg(long, allow_hyphen_values = true, default_value_t = -31)]
        d1: i64,
        #[arg(long, allow_hyphen_values = true, default_value_t = -127)]
        d2: i64,
    },
}

#[derive(Debug, Subcommand)]
pub enum BorcherdsAction {
    Check {
        /// A divisor of 24, or "all".
        #[arg(long, default_value = "all")]
        s: String,
        /// 1, -1 or "all".
        #[arg(long, allow_hyphen_values = true, default_value = "all")]
        eps: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum BigcmAction {
    Check {
        #[command(flatten)]
        pair: PairArgs,
        /// A divisor of 24, or "all".
        #[arg(long, default_value = "all")]
        s: String,
    },
}

/// What a command printed and the exit code it asks for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { stdout: text, stderr: String::new(), code }
            } else {
                Outcome { stdout: String::new(), stderr: text, code }
            };
        }
    };
    match execute(&cli) {
        Ok(out) => out,
        Err(e) => Outcome { stdout: String::new(), stderr: format!("error: {e}\n"), code: 2 },
    }
}

fn config(cli: &Cli) -> Result<RunConfig> {
    let cfg = RunConfig {
        precision: cli.precision,
        order: cli.order,
        format: cli.format.parse()?,
        cache_dir: cli.cache_dir.clone(),
        verbosity: cli.verbose,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn parse_divisors(s: &str) -> Result<Vec<u64>> {
    if s == "all" {
        return Ok(DIVISORS_24.to_vec());
    }
    let v: u64 = s.parse().map_err(|_| Error::InvalidInput(format!("not a divisor of 24: {s}")))?;
    if v == 0 || 24 % v != 0 {
        return Err(Error::InvalidInput(format!("{v} does not divide 24")));
    }
    Ok(vec![v])
}

fn parse_eps(s: &str) -> Result<Vec<i32>> {
    match s {
        "all" => Ok(vec![1, -1]),
        "1" | "+1" => Ok(vec![1]),
        "-1" => Ok(vec![-1]),
        _ => Err(Error::InvalidInput(format!("eps must be 1, -1 or all, not {s}"))),
    }
}

fn admissible_pair(p: &PairArgs) -> Result<DiscriminantPair> {
    let pair = DiscriminantPair::new(p.d1, p.d2)?;
    pair.require_admissible()?;
    Ok(pair)
}

fn progress(cfg: &RunConfig, msg: impl FnOnce() -> String) -> String {
    if cfg.verbosity > 0 {
        msg() + "\n"
    } else {
        String::new()
    }
}

/// Class polynomial at the configured precision, certified by agreement 64
/// bits higher; falls back to adaptive precision otherwise.
fn classpoly_at(d: i64, kind: PolyKind, cfg: &RunConfig, cache: &PolyCache) -> Result<(IntPoly, bool)> {
    if cache.dir().is_some() {
        return Ok((cache.get(d, kind)?, true));
    }
    if let Some(lo) = class_polynomial_at(d, kind, cfg.precision)? {
        if class_polynomial_at(d, kind, cfg.precision + 64)?.as_ref() == Some(&lo) {
            return Ok((lo, true));
        }
    }
    Ok((cache.get(d, kind)?, false))
}

fn execute(cli: &Cli) -> Result<Outcome> {
    let cfg = config(cli)?;
    let cache = PolyCache::from_env(cfg.cache_dir.clone());
    let start = Instant::now();
    let mut stderr = String::new();
    let (command, inputs, output, checks): (&str, serde_json::Value, Option<serde_json::Value>, Vec<Check>) =
        match &cli.command {
            Command::Classpoly { d, kind } => {
                let kind: PolyKind = kind.parse()?;
                let (p, at_precision) = classpoly_at(*d, kind, &cfg, &cache)?;
                if !at_precision {
                    stderr += &progress(&cfg, || {
                        format!("precision {} was not enough; used adaptive precision", cfg.precision)
                    });
                }
                let coeffs: Vec<String> = p.coeffs().iter().map(|c| c.to_string()).collect();
                if cfg.format != Format::Json {
                    let text = format!("{p}\ncoefficients (ascending): [{}]\n", coeffs.join(", "));
                    return Ok(Outcome { stdout: text, stderr, code: 0 });
                }
                (
                    "classpoly",
                    json!({"d": d, "kind": kind.name()}),
                    Some(json!({"polynomial": p.to_string(), "coefficients": coeffs})),
                    vec![],
                )
            }
            Command::Yz { action: YzAction::Verify { pair, s } } => {
                let p = admissible_pair(pair)?;
                let s_list = parse_divisors(s)?;
                ("yz verify", json!({"d1": p.d1, "d2": p.d2, "s": s_list}), None, yz_checks(&p, &s_list, &cache)?)
            }
            Command::Yz { action: YzAction::Table { pair, latex } } => {
                let p = admissible_pair(pair)?;
                let rows = yz_table(&p);
                let text = if *latex {
                    table_latex(&rows)
                } else {
                    match cfg.format {
                        Format::Json => table_json(&rows) + "\n",
                        Format::Csv => table_csv(&rows),
                        Format::Md | Format::Text => table_markdown(&rows),
                    }
                };
                return Ok(Outcome { stdout: text, stderr, code: 0 });
            }
            Command::Gz { action: GzAction::Verify { pair } } => {
                let p = DiscriminantPair::new(pair.d1, pair.d2)?;
                ("gz verify", json!({"d1": p.d1, "d2": p.d2}), None, vec![gz_check(&p, &cache)?])
            }
            Command::Weil { action: WeilAction::Check { d, suite, d1, d2 } } => {
                let ds: Vec<u32> = parse_divisors(d)?.into_iter().map(|x| x as u32).collect();
                let mut checks = Vec::new();
                for part in suite_parts(suite)? {
                    stderr += &progress(&cfg, || format!("weil suite {part}"));
                    checks.extend(weil_suite(part, &ds, *d1, *d2)?);
                }
                ("weil check", json!({"d": ds, "suite": suite, "d1": d1, "d2": d2}), None, checks)
            }
            Command::Borcherds { action: BorcherdsAction::Check { s, eps } } => {
                let s_list = parse_divisors(s)?;
                let eps_list = parse_eps(eps)?;
                let mut checks = Vec::new();
                for &s in &s_list {
                    for &e in &eps_list {
                        stderr += &progress(&cfg, || format!("blift s={s} eps={e}"));
                        checks.extend(blift_check(s as u32, e, cfg.order)?);
                    }
                    checks.push(verify_pol(s)?);
                    checks.push(verify_pol2(s));
                }
                (
                    "borcherds check",
                    json!({"s": s_list, "eps": eps_list, "order": cfg.order}),
                    None,
                    checks,
                )
            }
            Command::Bigcm { action: BigcmAction::Check { pair, s } } => {
                let p = admissible_pair(pair)?;
                let s_list = parse_divisors(s)?;
                let mut checks = Vec::new();
                for &s in &s_list {
                    checks.push(bigcm_check(&p, s, &cache)?);
                }
                checks.extend(count_identities(&p)?.into_iter().filter(|c| {
                    s_list.iter().any(|s| c.name.ends_with(&format!(" s={s}")))
                }));
                ("bigcm check", json!({"d1": p.d1, "d2": p.d2, "s": s_list}), None, checks)
            }
        };
    let report = Report {
        command: command.to_string(),
        inputs,
        output,
        checks,
        elapsed_ms: start.elapsed().as_millis() as u64,
    };
    Ok(Outcome { stdout: report.render(cfg.format), stderr, code: report.exit_code() })
}

const SUITES: [&str; 7] = ["relations", "cosets", "dims", "udinv", "repembed", "appendix", "compact"];

fn suite_parts(suite: &str) -> Result<Vec<&'static str>> {
    if suite == "all" {
        return Ok(SUITES.to_vec());
    }
    SUITES
        .iter()
        .find(|&&s| s == suite)
        .map(|&s| vec![s])
        .ok_or_else(|| Error::InvalidInput(format!("unknown suite {suite}")))
}

fn weil_suite(part: &str, ds: &[u32], d1: i64, d2: i64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    match part {
        "appendix" => {
            out.extend(weilrep::verify_appendix_lists());
            out.extend(weilrep::verify_n3());
        }
        "compact" => out.extend(weilrep::lemma_compact_check(d1, d2)),
        _ => {
            for &d in ds {
                match part {
                    "relations" => out.extend(weilrep::verify_relations(d)?),
                    "cosets" => {
                        out.push(weilrep::verify_coset_lemma(d)?);
                        out.extend(weilrep::verify_local_coset_lemmas(d)?);
                        out.extend(weilrep::lemma_additive_check(d)?);
                        if weilrep::Fqm::global(d).size() <= weilrep::DENSE_LIMIT {
                            out.push(weilrep::verify_ufinv(d)?);
                        }
                    }
                    "dims" => out.push(weilrep::verify_dims(d)?),
                    "udinv" => out.push(weilrep::verify_udinv_summary(d)?),
                    "repembed" => {
                        out.extend(weilrep::verify_repembed(d)?);
                        out.push(weilrep::verify_tensor_split(d)?);
                    }
                    _ => unreachable!("suite names are validated"),
                }
            }
        }
    }
    Ok(out)
}
