//! Command-line front end: presentation export, certification, membership, relator
//! search, sweeps over a and offline certificate checks.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use moebius::certify::{
    certify_with, generator_words, membership_report, table_sweep, verify, Certificate,
    CertifyOptions, MoebiusSpec, Status, DEFAULT_WORD_SEARCH_LEN,
};
use moebius::coset::{todd_coxeter, EnumerationLimits, Strategy, DEFAULT_MAX_COSETS};
use moebius::exact::UniModularMatrix;
use moebius::presentation::build_presentation;
use moebius::relator::{find_relator, DEFAULT_RELATOR_BOUND};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(
    name = "moebius",
    version,
    about = "Certify S-arithmeticity of parabolic Moebius groups G(a/b)"
)]
pub struct CliConfig {
    /// Print JSON instead of human-readable text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum Command {
    /// Print the presentation of SL(2, Z[1/b]).
    Present {
        #[arg(value_parser = clap::value_parser!(u64).range(2..))]
        b: u64,
    },
    /// Certify G(a/b) by coset enumeration.
    Certify {
        spec: MoebiusSpec,
        #[command(flatten)]
        limits: LimitArgs,
        /// Also search for a relator among A(a/b), B(a/b).
        #[arg(long)]
        witness: bool,
        /// Letter bound for the relator search.
        #[arg(long, default_value_t = DEFAULT_RELATOR_BOUND)]
        bound: u64,
    },
    /// Decide membership of a matrix in G(a/b).
    Member {
        spec: MoebiusSpec,
        matrix: UniModularMatrix,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Search for a relator among A(a/b), B(a/b).
    Relator {
        spec: MoebiusSpec,
        #[arg(long, default_value_t = DEFAULT_RELATOR_BOUND)]
        bound: u64,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Certify every a in 1..=amax coprime to b.
    Sweep {
        #[arg(value_parser = clap::value_parser!(u64).range(2..))]
        b: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        amax: u64,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Re-check a certificate JSON file offline.
    Verify { certificate: PathBuf },
}

#[derive(Args, Debug, Clone, Copy)]
pub struct LimitArgs {
    #[arg(
        long,
        env = "MOEBIUS_MAX_COSETS",
        default_value_t = DEFAULT_MAX_COSETS,
        value_parser = parse_max_cosets
    )]
    pub max_cosets: usize,
    #[arg(long, value_enum, default_value_t = StrategyArg::Hlt)]
    pub strategy: StrategyArg,
    /// Wall-clock limit for one enumeration, in seconds.
    #[arg(long, default_value_t = 1800)]
    pub time_limit: u64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyArg {
    Hlt,
    Felsch,
}

fn parse_max_cosets(s: &str) -> Result<usize, String> {
    match s.trim().parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(format!("expected a positive integer, got {s:?}")),
    }
}

impl LimitArgs {
    fn limits(&self) -> EnumerationLimits {
        let strategy = match self.strategy {
            StrategyArg::Hlt => Strategy::Hlt,
            StrategyArg::Felsch => Strategy::Felsch,
        };
        EnumerationLimits {
            max_cosets: self.max_cosets,
            strategy,
            time_limit: Some(Duration::from_secs(self.time_limit)),
        }
    }
}

/// Parses `argv` (including the program name), runs the command and returns the exit
/// code: 0 Arithmetic or success, 2 Inconclusive or not found, 1 error, 64 usage.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match CliConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = write!(out, "{rendered}");
                    if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                        EXIT_USAGE
                    } else {
                        EXIT_OK
                    }
                }
                _ => {
                    let _ = write!(err, "{rendered}");
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(&config, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

type CmdResult = Result<i32, Box<dyn std::error::Error>>;

fn status_code(status: Status) -> i32 {
    match status {
        Status::Arithmetic => EXIT_OK,
        Status::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn execute(config: &CliConfig, out: &mut dyn Write) -> CmdResult {
    match &config.command {
        Command::Present { b } => {
            let p = build_presentation(*b)?;
            if config.json {
                writeln!(out, "{}", serde_json::to_string_pretty(&p.to_json())?)?;
            } else {
                write!(out, "{}", p.to_text())?;
            }
            Ok(EXIT_OK)
        }
        Command::Certify {
            spec,
            limits,
            witness,
            bound,
        } => {
            let options = CertifyOptions {
                witness: *witness,
                relator_bound: *bound,
                ..CertifyOptions::default()
            };
            let (cert, _) = certify_with(*spec, &limits.limits(), &options)?;
            print_certificate(&cert, config.json, out)?;
            Ok(status_code(cert.status()))
        }
        Command::Member {
            spec,
            matrix,
            limits,
        } => {
            let (cert, table) = certify_with(*spec, &limits.limits(), &CertifyOptions::default())?;
            let verdict = membership_report(*spec, matrix, &cert, table.as_ref())?;
            if config.json {
                let v = json!({
                    "spec": spec,
                    "matrix": matrix.to_string(),
                    "verdict": verdict,
                    "status": cert.status(),
                });
                writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
            } else {
                writeln!(out, "{verdict}")?;
            }
            Ok(EXIT_OK)
        }
        Command::Relator {
            spec,
            bound,
            limits,
        } => {
            let p = build_presentation(spec.b())?;
            let (wa, wb) = generator_words(*spec, &p, DEFAULT_WORD_SEARCH_LEN)?;
            let outcome = todd_coxeter(&p, &[wa.clone(), wb.clone()], &limits.limits())?;
            let found = match outcome.table() {
                Some(t) => find_relator(&p, &wa, &wb, t, *bound)?,
                None => None,
            };
            if config.json {
                let v = json!({
                    "spec": spec,
                    "relator": found.as_ref().map(|w| w.to_string()),
                    "length": found.as_ref().map(|w| w.length()),
                    "enumerated": outcome.table().is_some(),
                });
                writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
            } else {
                match &found {
                    Some(w) => writeln!(out, "{w}")?,
                    None => writeln!(out, "NotFound")?,
                }
            }
            Ok(if found.is_some() {
                EXIT_OK
            } else {
                EXIT_INCONCLUSIVE
            })
        }
        Command::Sweep { b, amax, limits } => {
            let a_values: Vec<u64> = (1..=*amax)
                .filter(|a| moebius::arith::gcd(*a, *b) == 1)
                .collect();
            let results = table_sweep(*b, &a_values, &limits.limits(), &CertifyOptions::default());
            if config.json {
                let rows: Vec<serde_json::Value> = results
                    .iter()
                    .map(|(a, r)| match r {
                        Ok(c) => c.to_json(),
                        Err(e) => json!({ "a": a, "b": b, "error": e.to_string() }),
                    })
                    .collect();
                writeln!(out, "{}", serde_json::to_string_pretty(&rows)?)?;
            } else {
                writeln!(out, "a\tb\tstatus\tindex\texpected\tpeak_cosets\tms")?;
                for (a, r) in &results {
                    match r {
                        Ok(c) => writeln!(
                            out,
                            "{a}\t{b}\t{}\t{}\t{}\t{}\t{}",
                            c.status(),
                            c.index().map_or("-".to_string(), |i| i.to_string()),
                            c.expected_index(),
                            c.resources().peak_cosets,
                            c.resources().wall_time_ms
                        )?,
                        Err(e) => writeln!(out, "{a}\t{b}\terror: {e}")?,
                    }
                }
                let a_max = results
                    .iter()
                    .take_while(|(_, r)| r.as_ref().is_ok_and(|c| c.is_arithmetic()))
                    .last()
                    .map(|(a, _)| *a);
                match a_max {
                    Some(a) => writeln!(out, "certified through a = {a}")?,
                    None => writeln!(out, "nothing certified")?,
                }
            }
            Ok(if results.iter().any(|(_, r)| r.is_err()) {
                EXIT_ERROR
            } else {
                EXIT_OK
            })
        }
        Command::Verify { certificate } => {
            let text = std::fs::read_to_string(certificate)?;
            let value: serde_json::Value = serde_json::from_str(&text)?;
            let cert = Certificate::from_json(&value)?;
            let v = verify(&cert)?;
            if config.json {
                let out_v = json!({
                    "spec": cert.spec(),
                    "status": v.status,
                    "valid": v.is_valid(),
                    "failures": v.failures,
                });
                writeln!(out, "{}", serde_json::to_string_pretty(&out_v)?)?;
            } else if v.is_valid() {
                writeln!(out, "valid: {} {}", cert.spec(), v.status)?;
            } else {
                writeln!(out, "invalid: {} {}", cert.spec(), v.status)?;
                for f in &v.failures {
                    writeln!(out, "  {f}")?;
                }
            }
            Ok(if v.is_valid() {
                status_code(v.status)
            } else {
                EXIT_ERROR
            })
        }
    }
}

fn print_certificate(
    cert: &Certificate,
    json_mode: bool,
    out: &mut dyn Write,
) -> std::io::Result<()> {
    if json_mode {
        writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&cert.to_json()).expect("certificate serializes")
        )
    } else {
        write!(out, "{}", cert.summary())
    }
}
