//! The `fatpoints` command line.
//!
//! Exit codes: 0 success or Accept, 1 Reject, failed proof or a speciality
//! mismatch in a sweep, 2 usage or parse errors, 3 column budget exceeded.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::combinatorics::{n_bounds, to_count, virtual_dim};
use crate::error::Error;
use crate::oracle::{self, FieldConfig, MERSENNE_31};
use crate::prover::{self, explain, verify, Certificate, ProverConfig, Verdict};
use crate::systems::{classify, LinearSystem};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REJECT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "fatpoints", version, about = "Dimensions of linear systems with general fat points")]
pub struct Cli {
    #[command(flatten)]
    pub opts: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Prime for the rank computations (odd, below 2^31).
    #[arg(long, global = true, default_value_t = MERSENNE_31)]
    pub prime: u64,
    /// Independent random trials per rank computation.
    #[arg(long, global = true, default_value_t = 3)]
    pub trials: u32,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Largest number of monomials the oracle will handle.
    #[arg(long = "max-cols", global = true, default_value_t = 5000)]
    pub max_cols: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report to a file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Fill the ms column of sweeps (makes output depend on the machine).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Dimension of a system by rank over F_p, e.g. "L(r=2,d=4; 2^5)".
    Dim { system: String },
    /// Where L_{r,d}(2^n) sits in the classification.
    Classify { r: u32, d: u32, n: u64 },
    /// Certificate for the dimension of L_{r,d}(2^n).
    Prove {
        r: u32,
        d: u32,
        n: u64,
        /// Certificate file; standard output if absent.
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Check a certificate; exit code 0 iff it is accepted.
    Verify { certificate: PathBuf },
    /// Narrate a certificate.
    Explain { certificate: PathBuf },
    /// One row per (r, d, n) with n in {n-, n+} plus every special row.
    Sweep {
        #[arg(long = "r-min", default_value_t = 2)]
        r_min: u32,
        #[arg(long = "r-max")]
        r_max: u32,
        #[arg(long = "d-min", default_value_t = 2)]
        d_min: u32,
        #[arg(long = "d-max")]
        d_max: u32,
    },
}

impl GlobalOpts {
    fn field(&self) -> FieldConfig {
        FieldConfig {
            prime: self.prime,
            trials: self.trials,
            seed: self.seed,
            max_columns: self.max_cols,
            ..FieldConfig::default()
        }
    }
}

/// Runs the command line with the process's standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the command line, writing reports to `out` and diagnostics to `err`.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Budget { .. } => EXIT_BUDGET,
        Error::Unprovable { .. } => EXIT_REJECT,
        _ => EXIT_USAGE,
    }
}

/// Writes `text` to `--out` if given, else to `out`.
fn emit(opts: &GlobalOpts, out: &mut dyn Write, text: &str) -> crate::Result<()> {
    match &opts.out {
        Some(path) => std::fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> crate::Result<i32> {
    let opts = &cli.opts;
    match &cli.command {
        Command::Dim { system } => {
            let sys: LinearSystem = system.parse()?;
            let report = oracle::dimension(&sys, &opts.field())?;
            let text = match opts.format {
                Format::Json => serde_json::to_string_pretty(&report)? + "\n",
                Format::Csv => {
                    let special = report.special.map(|s| s.to_string()).unwrap_or_default();
                    format!(
                        "system,virtual,expected,dim,special\n\"{}\",{},{},{},{}\n",
                        report.system, report.r#virtual, report.expected, report.dim, special
                    )
                }
                Format::Text => {
                    let verdict = match report.special {
                        Some(true) => "SPECIAL",
                        Some(false) => "non-special",
                        None => "subspace conditions; virtual dimension is a naive count",
                    };
                    format!(
                        "system    {}\nvirtual   {}\nexpected  {}\ndim       {}\n{verdict}\n",
                        report.system, report.r#virtual, report.expected, report.dim
                    )
                }
            };
            emit(opts, out, &text)?;
            Ok(EXIT_OK)
        }
        Command::Classify { r, d, n } => {
            let verdict = classify(*r, *d, *n);
            let v = virtual_dim(*r, *d, &[(2, *n)])?;
            let e = crate::combinatorics::expected_dim(&v);
            let text = match opts.format {
                Format::Json => {
                    #[derive(Serialize)]
                    struct Out<'a> {
                        r: u32,
                        d: u32,
                        n: u64,
                        #[serde(rename = "virtual", with = "crate::bigjson")]
                        virtual_dim: BigInt,
                        #[serde(with = "crate::bigjson")]
                        expected: BigInt,
                        #[serde(flatten)]
                        verdict: &'a classify::SpecialVerdict,
                    }
                    let o = Out {
                        r: *r,
                        d: *d,
                        n: *n,
                        virtual_dim: v,
                        expected: e,
                        verdict: &verdict,
                    };
                    serde_json::to_string_pretty(&o)? + "\n"
                }
                _ => match (verdict.exception_tag, &verdict.closed_form_dim) {
                    (Some(tag), Some(dim)) => format!(
                        "L_{{{r},{d}}}(2^{n}): special, dimension {dim} (expected {e}); {}\n",
                        tag.description()
                    ),
                    _ => format!("L_{{{r},{d}}}(2^{n}): non-special, dimension {e} (virtual {v})\n"),
                },
            };
            emit(opts, out, &text)?;
            Ok(EXIT_OK)
        }
        Command::Prove { r, d, n, output } => {
            let cfg = ProverConfig {
                field: opts.field(),
                ..ProverConfig::default()
            };
            let cert = prover::prove(*r, *d, *n, &cfg)?;
            let json = cert.to_json() + "\n";
            match output.as_ref().or(opts.out.as_ref()) {
                Some(path) => {
                    std::fs::write(path, &json)?;
                    writeln!(
                        out,
                        "{}: {} (dimension {}) by {}, {} nodes",
                        cert.root.claim.system,
                        cert.root.claim.assert.name(),
                        cert.root.claim.value,
                        cert.root.rule,
                        cert.nodes().len()
                    )?;
                }
                None => out.write_all(json.as_bytes())?,
            }
            Ok(EXIT_OK)
        }
        Command::Verify { certificate } => {
            let cert = Certificate::from_json(&std::fs::read_to_string(certificate)?)?;
            let verdict = verify(&cert, &opts.field())?;
            emit(opts, out, &format!("{verdict}\n"))?;
            Ok(match verdict {
                Verdict::Accept => EXIT_OK,
                Verdict::Reject { .. } => EXIT_REJECT,
            })
        }
        Command::Explain { certificate } => {
            let cert = Certificate::from_json(&std::fs::read_to_string(certificate)?)?;
            emit(opts, out, &explain(&cert))?;
            Ok(EXIT_OK)
        }
        Command::Sweep {
            r_min,
            r_max,
            d_min,
            d_max,
        } => {
            let rows = sweep(*r_min..=*r_max, *d_min..=*d_max, opts);
            let mismatch = rows.iter().any(|r| r.mismatch());
            emit(opts, out, &render_rows(&rows, opts.format)?)?;
            Ok(if mismatch { EXIT_REJECT } else { EXIT_OK })
        }
    }
}

/// One line of a sweep.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepRow {
    pub r: u32,
    pub d: u32,
    pub n: u64,
    #[serde(rename = "virtual", with = "crate::bigjson")]
    pub virtual_dim: BigInt,
    #[serde(with = "crate::bigjson")]
    pub expected: BigInt,
    /// The rank result, or `SKIPPED` when over the column budget.
    pub oracle_dim: String,
    /// Empty when skipped.
    pub special: Option<bool>,
    /// The rule the prover would try first.
    pub rule: String,
    pub ms: Option<u64>,
}

impl SweepRow {
    /// Special where the classification says non-special, or the reverse.
    pub fn mismatch(&self) -> bool {
        match self.special {
            Some(s) => s != classify(self.r, self.d, self.n).is_exception,
            None => false,
        }
    }
}

/// Node counts a sweep visits for `(r, d)`: `n⁻`, `n⁺` and every special row.
pub fn sweep_counts(r: u32, d: u32) -> Vec<u64> {
    let (lo, hi) = n_bounds(r, d);
    let (lo, hi) = (to_count(&lo).unwrap_or(0), to_count(&hi).unwrap_or(0));
    // every special row has n <= max(r, 14)
    let top = (hi + 1).max(r as u64).max(14);
    let mut ns: Vec<u64> = (1..=top)
        .filter(|&n| n == lo || n == hi || classify(r, d, n).is_exception)
        .collect();
    ns.dedup();
    ns
}

pub fn sweep(
    rs: std::ops::RangeInclusive<u32>,
    ds: std::ops::RangeInclusive<u32>,
    opts: &GlobalOpts,
) -> Vec<SweepRow> {
    let mut jobs = Vec::new();
    for r in rs.filter(|&r| r >= 2) {
        for d in ds.clone().filter(|&d| d >= 2) {
            jobs.extend(sweep_counts(r, d).into_iter().map(|n| (r, d, n)));
        }
    }
    let field = opts.field();
    let mut rows: Vec<SweepRow> = jobs
        .into_par_iter()
        .map(|(r, d, n)| sweep_row(r, d, n, &field, opts.timing))
        .collect();
    rows.sort_by_key(|row| (row.r, row.d, row.n));
    rows
}

fn sweep_row(r: u32, d: u32, n: u64, field: &FieldConfig, timing: bool) -> SweepRow {
    let start = Instant::now();
    let sys = LinearSystem::nodes(r, d, n).expect("r, d >= 2");
    let rule = prover::plan(&sys).rule.name().to_string();
    let (oracle_dim, special) = match oracle::dimension(&sys, field) {
        Ok(rep) => (rep.dim.to_string(), rep.special),
        Err(Error::Budget { .. }) => ("SKIPPED".to_string(), None),
        Err(e) => (format!("ERROR: {e}"), None),
    };
    SweepRow {
        r,
        d,
        n,
        virtual_dim: sys.virtual_dim(),
        expected: sys.expected_dim(),
        oracle_dim,
        special,
        rule,
        ms: timing.then(|| start.elapsed().as_millis() as u64),
    }
}

pub fn render_rows(rows: &[SweepRow], format: Format) -> crate::Result<String> {
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(rows)? + "\n",
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["r", "d", "n", "virtual", "expected", "oracle_dim", "special", "rule", "ms"])
                .map_err(|e| Error::invalid(e.to_string()))?;
            for row in rows {
                w.write_record([
                    row.r.to_string(),
                    row.d.to_string(),
                    row.n.to_string(),
                    row.virtual_dim.to_string(),
                    row.expected.to_string(),
                    row.oracle_dim.clone(),
                    row.special.map(|s| s.to_string()).unwrap_or_default(),
                    row.rule.clone(),
                    row.ms.map(|m| m.to_string()).unwrap_or_default(),
                ])
                .map_err(|e| Error::invalid(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
            String::from_utf8(bytes).expect("csv output is utf-8")
        }
        Format::Text => {
            let mut s = format!(
                "{:>3} {:>3} {:>5} {:>8} {:>8} {:>10} {:>8} {:<14}{}\n",
                "r", "d", "n", "virtual", "expected", "oracle_dim", "special", "rule",
                if rows.iter().any(|r| r.ms.is_some()) { " ms" } else { "" }
            );
            for row in rows {
                let special = match row.special {
                    Some(true) => "SPECIAL",
                    Some(false) => "no",
                    None => "",
                };
                s += &format!(
                    "{:>3} {:>3} {:>5} {:>8} {:>8} {:>10} {:>8} {:<14}{}\n",
                    row.r,
                    row.d,
                    row.n,
                    row.virtual_dim,
                    row.expected,
                    row.oracle_dim,
                    special,
                    row.rule,
                    row.ms.map(|m| format!(" {m}")).unwrap_or_default()
                );
            }
            s
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut argv = vec!["fatpoints"];
        argv.extend_from_slice(args);
        let code = run_with(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn dim_examples() {
        let (code, out, _) = run_capture(&["dim", "L(r=2,d=4; 2^5)"]);
        assert_eq!(code, 0);
        assert!(out.contains("dim       0") && out.contains("SPECIAL"), "{out}");
        let (_, out, _) = run_capture(&["dim", "L(r=3,d=3; 2^5)"]);
        assert!(out.contains("dim       -1"));
        let (_, out, _) = run_capture(&["dim", "L(r=7,d=2; {L1:codim3, 2^3 on L1}, 2)", "--format", "json"]);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["dim"], 6);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_capture(&["dim", "L(r=2,d=4; 2^)"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["dim", "L(r=9,d=9; 2)", "--max-cols", "100"]).0, EXIT_BUDGET);
        assert_eq!(run_capture(&["--help"]).0, EXIT_OK);
        assert_eq!(run_capture(&["dim", "L(r=2,d=4)", "--prime", "91"]).0, EXIT_USAGE);
    }

    #[test]
    fn classify_text_and_json() {
        let (_, out, _) = run_capture(&["classify", "4", "4", "14"]);
        assert!(out.contains("special, dimension 0"), "{out}");
        let (_, out, _) = run_capture(&["classify", "3", "5", "14", "--format", "json"]);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["is_exception"], false);
        assert_eq!(v["expected"], -1);
    }

    #[test]
    fn sweep_counts_cover_special_rows() {
        assert_eq!(sweep_counts(2, 4), vec![5]);
        assert_eq!(sweep_counts(4, 2), vec![2, 3, 4]);
        assert_eq!(sweep_counts(4, 4), vec![14]);
        assert_eq!(sweep_counts(3, 4), vec![8, 9]);
    }

    #[test]
    fn sweep_small_range() {
        let (code, out, _) = run_capture(&["sweep", "--r-max", "2", "--d-max", "8", "--format", "csv"]);
        assert_eq!(code, 0);
        let mut lines = out.lines();
        assert_eq!(lines.next(), Some("r,d,n,virtual,expected,oracle_dim,special,rule,ms"));
        let special: Vec<&str> = lines.filter(|l| l.contains(",true,")).collect();
        assert_eq!(special, ["2,2,2,-1,-1,0,true,TABLE,", "2,4,5,-1,-1,0,true,TABLE,"]);
        let (code, out, _) = run_capture(&["sweep", "--r-max", "1", "--d-max", "3", "--format", "csv"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 1);
    }

    #[test]
    fn sweep_marks_skipped_rows() {
        let (code, out, _) = run_capture(&[
            "sweep", "--r-min", "8", "--r-max", "8", "--d-min", "8", "--d-max", "8", "--format", "csv",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("SKIPPED"), "{out}");
    }
}
