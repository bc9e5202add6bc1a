//! `fermicluster` command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or config error.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;

use crate::analyzer::{
    analyzer_for, basis_state, classify, classify_sample, derive_group_table, roman,
    ClassificationReport, ClassifiedBranch, EntangledLabel, Family,
};
use crate::cluster::{
    derive_correction_table, prepare_cluster_with, verify_correction_table, CorrectionTable,
    PreparationRecord, PrepMode, N_TABLE,
};
use crate::config::{Tolerances, ENV_TOL_FERMION, ENV_TOL_NORM, ENV_TOL_VERIFY, N_MAX};
use crate::fermion::{pbs_matrix, verify_parity_povm, PovmReport, ScatteringMatrix};
use crate::qstate::StateVector;
use crate::{report, selfcheck, Exec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Largest chain `prepare --mode enumerate` will expand.
pub const N_ENUMERATE_MAX: usize = 12;

#[derive(Debug, Parser)]
#[command(name = "fermicluster", version, about = "Cluster states and entanglement analyzers from parity gadgets")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    global: GlobalArgs,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Run every loop on one thread.
    #[arg(long, global = true)]
    sequential: bool,

    #[arg(long, global = true, env = ENV_TOL_NORM, value_parser = positive_float)]
    tol_norm: Option<f64>,

    #[arg(long, global = true, env = ENV_TOL_VERIFY, value_parser = positive_float)]
    tol_verify: Option<f64>,

    #[arg(long, global = true, env = ENV_TOL_FERMION, value_parser = positive_float)]
    tol_fermion: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Enumerate,
    Sample,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Enumerate => "enumerate",
            Mode::Sample => "sample",
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build an N-qubit linear cluster from |+>^N with chained parity gadgets.
    Prepare {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Mode::Enumerate)]
        mode: Mode,
        #[arg(long)]
        seed: Option<u64>,
        /// Detector pattern, P1 first, 1 = even (e.g. `101`).
        #[arg(long, conflicts_with = "seed")]
        forced: Option<String>,
    },
    /// Run an entanglement analyzer on a named or explicit input state.
    Analyze {
        #[arg(long)]
        family: Family,
        /// `bell:phi+`, `ghz3:g1-`, `quad:vii+` … or `[[re,im],…]`.
        #[arg(long)]
        input: String,
        #[arg(long, value_enum, default_value_t = Mode::Enumerate)]
        mode: Mode,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Derive the feedforward tables (N=2..6) and the four-qubit grouping.
    Tables {
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Compare the beam-splitter encoder with the qubit parity projector.
    FermionCheck {
        #[arg(long, default_value_t = selfcheck::FERMION_SAMPLES, value_parser = at_least_one)]
        samples: usize,
        #[arg(long, default_value_t = selfcheck::SEED)]
        seed: u64,
        /// Replace the beam splitter with the identity (negative control).
        #[arg(long, hide = true)]
        corrupt: bool,
    },
    /// Run the built-in acceptance checks.
    Verify,
}

fn positive_float(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        _ => Err(format!("{s:?} is not a positive number")),
    }
}

fn at_least_one(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v),
        _ => Err(format!("{s:?} must be an integer >= 1")),
    }
}

/// A report plus the exit code it implies.
struct Output {
    body: String,
    code: i32,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<crate::Error> for Failure {
    fn from(e: crate::Error) -> Self {
        use crate::Error::*;
        match e {
            ImpossibleBranch(_) | NoCorrectionFound(_) | Bunched(_) | NotFreshPlus(_) => {
                Failure::Runtime(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let g = &cli.global;
    let defaults = Tolerances::default();
    let tol = Tolerances {
        norm: g.tol_norm.unwrap_or(defaults.norm),
        verify: g.tol_verify.unwrap_or(defaults.verify),
        fermion: g.tol_fermion.unwrap_or(defaults.fermion),
    };
    let exec = if g.sequential {
        Exec::Sequential
    } else {
        Exec::default()
    };

    let result = match &cli.command {
        Command::Prepare { n, mode, seed, forced } => {
            cmd_prepare(*n, *mode, *seed, forced.as_deref(), g.format, &tol, exec)
        }
        Command::Analyze {
            family,
            input,
            mode,
            seed,
        } => cmd_analyze(*family, input, *mode, *seed, g.format, &tol, exec),
        Command::Tables { out_dir } => cmd_tables(out_dir, g.format, exec),
        Command::FermionCheck {
            samples,
            seed,
            corrupt,
        } => cmd_fermion_check(*samples, *seed, *corrupt, g.format, &tol, exec),
        Command::Verify => Ok(cmd_verify(g.format, &tol, exec)),
    };

    match result {
        Ok(o) => {
            let written = match &g.out {
                Some(path) => std::fs::write(path, &o.body)
                    .map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => out.write_all(o.body.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => o.code,
                Err(msg) => {
                    let _ = writeln!(err, "error: {msg}");
                    EXIT_USAGE
                }
            }
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Runtime(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_FAIL
        }
    }
}

fn cmd_prepare(
    n: usize,
    mode: Mode,
    seed: Option<u64>,
    forced: Option<&str>,
    format: Format,
    tol: &Tolerances,
    exec: Exec,
) -> Result<Output, Failure> {
    if !(2..=N_MAX).contains(&n) {
        return Err(Failure::Usage(format!("--n must be in 2..={N_MAX}, got {n}")));
    }
    let prep = match (mode, seed, forced) {
        (Mode::Sample, Some(s), None) => PrepMode::Sample(s),
        (Mode::Sample, None, _) => return Err(Failure::Usage("--mode sample requires --seed".into())),
        (Mode::Sample, Some(_), Some(_)) => unreachable!("clap rejects --seed with --forced"),
        (Mode::Enumerate, Some(_), _) => {
            return Err(Failure::Usage("--seed is only valid with --mode sample".into()))
        }
        (Mode::Enumerate, None, Some(p)) => {
            let bits = crate::cluster::parse_pattern(p)?;
            if bits.len() != n - 1 {
                return Err(Failure::Usage(format!(
                    "--forced needs {} bits for --n {n}, got {}",
                    n - 1,
                    bits.len()
                )));
            }
            PrepMode::Forced(bits)
        }
        (Mode::Enumerate, None, None) => {
            if n > N_ENUMERATE_MAX {
                return Err(Failure::Usage(format!(
                    "enumeration is limited to --n <= {N_ENUMERATE_MAX}; use --mode sample or --forced"
                )));
            }
            PrepMode::Enumerate
        }
    };
    let mode_name = match &prep {
        PrepMode::Forced(_) => "forced",
        _ => mode.name(),
    };
    let records = prepare_cluster_with(n, &prep, tol.verify, exec)?;
    let pass = records.iter().all(|r| r.pass);
    let body = match format {
        Format::Json => report::preparation_json(n, mode_name, seed, &records),
        Format::Text => prepare_text(n, mode_name, &records),
    };
    Ok(Output {
        body,
        code: if pass { EXIT_OK } else { EXIT_FAIL },
    })
}

/// Parses `[[re, im], …]`; the norm must already be 1 within `tol`.
fn parse_explicit(input: &str, family: Family, tol: f64) -> Result<StateVector, Failure> {
    let pairs: Vec<[f64; 2]> = serde_json::from_str(input)
        .map_err(|e| Failure::Usage(format!("--input is neither a label nor [[re,im],...]: {e}")))?;
    let want = family.size();
    if pairs.len() != want {
        return Err(Failure::Usage(format!(
            "{} needs {want} amplitudes, got {}",
            family.name(),
            pairs.len()
        )));
    }
    let amps: Vec<C64> = pairs.iter().map(|[re, im]| C64::new(*re, *im)).collect();
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if !norm.is_finite() || (norm - 1.0).abs() > tol {
        return Err(Failure::Usage(format!(
            "input norm^2 = {norm} is not 1 within {tol:e}; normalize it first"
        )));
    }
    Ok(StateVector::normalized(amps)?)
}

fn cmd_analyze(
    family: Family,
    input: &str,
    mode: Mode,
    seed: Option<u64>,
    format: Format,
    tol: &Tolerances,
    exec: Exec,
) -> Result<Output, Failure> {
    let trimmed = input.trim();
    let (state, expected) = if trimmed.starts_with('[') {
        (parse_explicit(trimmed, family, tol.norm)?, None)
    } else {
        let label: EntangledLabel = trimmed.parse()?;
        if label.family != family {
            return Err(Failure::Usage(format!(
                "input {label} does not belong to family {}",
                family.name()
            )));
        }
        (basis_state(label)?, Some(label))
    };
    let tree = analyzer_for(family);
    let rep = match (mode, seed) {
        (Mode::Enumerate, None) => classify(&tree, &state, expected, exec)?,
        (Mode::Sample, Some(s)) => {
            let (label, record) = classify_sample(&tree, &state, s)?;
            ClassificationReport {
                family,
                input: expected.map_or_else(|| "explicit".to_string(), |l| l.to_string()),
                expected,
                deterministic: expected.is_none_or(|l| l == label),
                branches: vec![ClassifiedBranch {
                    outcomes: record.outcomes.clone(),
                    probability: record.probability,
                    label,
                    record,
                }],
                destroyed_qubits: tree.destroyed_qubits(),
            }
        }
        (Mode::Sample, None) => return Err(Failure::Usage("--mode sample requires --seed".into())),
        (Mode::Enumerate, Some(_)) => {
            return Err(Failure::Usage("--seed is only valid with --mode sample".into()))
        }
    };
    let body = match format {
        Format::Json => report::classification_json(&rep, mode.name(), seed),
        Format::Text => analyze_text(&rep),
    };
    let ok = expected.is_none() || rep.deterministic;
    Ok(Output {
        body,
        code: if ok { EXIT_OK } else { EXIT_FAIL },
    })
}

fn cmd_tables(out_dir: &Path, format: Format, exec: Exec) -> Result<Output, Failure> {
    let tables = (2..=N_TABLE)
        .map(|n| derive_correction_table(n, exec))
        .collect::<crate::Result<Vec<_>>>()?;
    let mut t1_ok = true;
    for t in &tables {
        t1_ok &= verify_correction_table(t)?;
    }
    let group = derive_group_table()?;
    let oracle = selfcheck::group_oracle_matches()?;
    let t2_ok = oracle.iter().all(|&b| b);

    std::fs::create_dir_all(out_dir)
        .map_err(|e| Failure::Usage(format!("cannot create {}: {e}", out_dir.display())))?;
    let t1_path = out_dir.join("table1_derived.json");
    let t2_path = out_dir.join("table2_derived.json");
    for (path, body) in [
        (&t1_path, report::table1_json(&tables, t1_ok)),
        (&t2_path, report::table2_json(&group, &oracle, t2_ok)),
    ] {
        std::fs::write(path, body)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
    }

    let pass = t1_ok && t2_ok;
    let body = match format {
        Format::Json => {
            #[derive(serde::Serialize)]
            struct Summary<'a> {
                schema: u32,
                command: &'static str,
                files: [&'a str; 2],
                table1_verified: bool,
                table2_verified: bool,
                pass: bool,
            }
            report::to_string(&Summary {
                schema: report::SCHEMA,
                command: "tables",
                files: ["table1_derived.json", "table2_derived.json"],
                table1_verified: t1_ok,
                table2_verified: t2_ok,
                pass,
            })
        }
        Format::Text => tables_text(&tables, &group, t1_ok, t2_ok),
    };
    Ok(Output {
        body,
        code: if pass { EXIT_OK } else { EXIT_FAIL },
    })
}

fn cmd_fermion_check(
    samples: usize,
    seed: u64,
    corrupt: bool,
    format: Format,
    tol: &Tolerances,
    exec: Exec,
) -> Result<Output, Failure> {
    let u = if corrupt {
        ScatteringMatrix::identity()
    } else {
        pbs_matrix()
    };
    let r = verify_parity_povm(samples, seed, &u, tol.fermion, exec)?;
    let body = match format {
        Format::Json => report::povm_json(&r),
        Format::Text => fermion_text(&r),
    };
    Ok(Output {
        body,
        code: if r.pass { EXIT_OK } else { EXIT_FAIL },
    })
}

fn cmd_verify(format: Format, tol: &Tolerances, exec: Exec) -> Output {
    let results = selfcheck::run_all(tol, exec);
    let pass = results.iter().all(|r| r.pass);
    let body = match format {
        Format::Json => selfcheck::results_json(&results, tol),
        Format::Text => {
            let mut s: String = results.iter().map(|r| r.line() + "\n").collect();
            let passed = results.iter().filter(|r| r.pass).count();
            let _ = writeln!(s, "{passed}/{} criteria passed", results.len());
            s
        }
    };
    Output {
        body,
        code: if pass { EXIT_OK } else { EXIT_FAIL },
    }
}

fn fmt_complex(a: C64) -> String {
    format!("{:+.6}{:+.6}i", a.re, a.im)
}

fn prepare_text(n: usize, mode: &str, records: &[PreparationRecord]) -> String {
    let mut s = String::new();
    let pass = records.iter().all(|r| r.pass);
    let _ = writeln!(s, "prepare n={n} mode={mode} branches={} pass={pass}", records.len());
    let _ = writeln!(
        s,
        "{:<w$}  {:>12}  {:<16}  {:<9}  {:>10}",
        "outcomes",
        "probability",
        "corrections",
        "canonical",
        "min <K>",
        w = (n - 1).max(8)
    );
    for r in records {
        let corr = if r.corrections.is_empty() {
            "-".to_string()
        } else {
            r.corrections.join(",")
        };
        let min_k = r.stabilizer_expectations.iter().copied().fold(f64::INFINITY, f64::min);
        let _ = writeln!(
            s,
            "{:<w$}  {:>12.6e}  {:<16}  {:<9}  {:>10.6}",
            r.outcomes,
            r.probability,
            corr,
            if r.matches_canonical { "yes" } else { "no" },
            min_k,
            w = (n - 1).max(8)
        );
    }
    if let [only] = records {
        if only.state.dim() <= 16 {
            let _ = writeln!(s, "amplitudes:");
            for (i, a) in only.state.amps().iter().enumerate() {
                let _ = writeln!(s, "  |{i:0w$b}>  {}", fmt_complex(*a), w = n);
            }
        }
    }
    s
}

fn analyze_text(rep: &ClassificationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "analyze family={} input={} branches={} deterministic={} destroyed_qubits={}",
        rep.family.name(),
        rep.input,
        rep.branches.len(),
        rep.deterministic,
        rep.destroyed_qubits
    );
    let _ = writeln!(s, "{:<24}  {:>12}  {:<10}", "outcomes", "probability", "label");
    for b in &rep.branches {
        let outcomes = b
            .outcomes
            .iter()
            .map(|(l, v)| format!("{l}={v}"))
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(s, "{outcomes:<24}  {:>12.6e}  {:<10}", b.probability, b.label.to_string());
    }
    let _ = writeln!(s, "label distribution:");
    for (l, p) in rep.label_distribution() {
        if p > 0.0 {
            let _ = writeln!(s, "  {:<10}  {p:.6}", l.to_string());
        }
    }
    s
}

fn tables_text(
    tables: &[CorrectionTable],
    group: &crate::analyzer::GroupTable,
    t1_ok: bool,
    t2_ok: bool,
) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "feedforward (1 = even, P1 first)  verified={t1_ok}");
    for t in tables {
        let _ = writeln!(s, "N={}", t.n);
        let _ = writeln!(s, "  {:<8}  {:<14}  {:<8}", "pattern", "inline", "deferred");
        for r in &t.rules {
            let inline = if r.inline.is_empty() {
                "-".to_string()
            } else {
                r.inline
                    .iter()
                    .map(|(p, q)| format!("{}{}", p.symbol(), q + 1))
                    .collect::<Vec<_>>()
                    .join(",")
            };
            let deferred: String = r.deferred.factors().iter().map(|p| p.symbol()).collect();
            let _ = writeln!(s, "  {:<8}  {inline:<14}  {deferred:<8}", r.pattern);
        }
    }
    let _ = writeln!(s, "four-qubit groups  verified={t2_ok}");
    let _ = writeln!(s, "  {:<6}  {:<10}", "P1P2", "classes");
    for ((p1, p2), cs) in group.sets() {
        let names: Vec<&str> = cs.into_iter().map(roman).collect();
        let _ = writeln!(s, "  {p1}{p2}      {}", names.join(","));
    }
    for (p3, cs) in group.p3_split() {
        let names: Vec<&str> = cs.into_iter().map(roman).collect();
        let _ = writeln!(s, "  P3={p3}    {}", names.join(","));
    }
    s
}

fn fermion_text(r: &PovmReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "fermion-check samples={} seed={}", r.samples, r.seed);
    let _ = writeln!(s, "  max probability deviation  {:.3e}", r.max_prob_dev);
    let _ = writeln!(s, "  max state deviation        {:.3e}", r.max_state_dev);
    let _ = writeln!(s, "  reflection-phase sweep     {}", if r.phase_sweep_pass { "ok" } else { "FAILED" });
    let _ = writeln!(s, "  P(One) for |++>            {:.6}", r.plus_plus_p_one);
    let _ = writeln!(s, "  tolerance                  {:.1e}", r.tolerance);
    let _ = writeln!(s, "  pass                       {}", r.pass);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("fermicluster").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn prepare_rejects_single_qubit() {
        assert_eq!(run_str(&["prepare", "--n", "1"]).0, EXIT_USAGE);
    }

    #[test]
    fn help_is_success() {
        let (code, out, _) = run_str(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("prepare"));
    }

    #[test]
    fn sample_needs_seed() {
        assert_eq!(run_str(&["prepare", "--n", "3", "--mode", "sample"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["prepare", "--n", "3", "--seed", "4"]).0, EXIT_USAGE);
    }

    #[test]
    fn explicit_input_must_be_normalized() {
        let (code, _, err) = run_str(&["analyze", "--family", "bell", "--input", "[[1,0],[1,0],[0,0],[0,0]]"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("norm"));
    }
}
