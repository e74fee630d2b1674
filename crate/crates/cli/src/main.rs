use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use strongsparse::generators::{
    gen_planted, gen_random, gen_random_nonmonotone, gen_subset_family, gen_xor,
};
use strongsparse::instance::{parse_merge_map, serialize_merge_map, Instance};
use strongsparse::locolor::{brute_lo2, check_lo, lift_colouring, Colouring};
use strongsparse::oracle::{format_assignment, verify_merges, Verdict, DEFAULT_LIMIT};
use strongsparse::reduction::{
    clause_bound_check, sparsify_nonmonotone_with, to_monotone, verify_literal_merges,
    LiteralInstance, ReductionStatus,
};
use strongsparse::sparsifier::{baseline_pair_merge, sparsify_with, SparsifyOptions};

mod bench;

#[derive(Parser)]
#[command(
    name = "strongsparse",
    version,
    about = "Equality-preserving sparsification of 1-in-3-SAT instances"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Monotone,
    Nonmonotone,
}

#[derive(Subcommand)]
enum Command {
    /// Merge variables that agree in every solution and write the quotient.
    Sparsify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "monotone")]
        mode: Mode,
        #[arg(long)]
        out_instance: PathBuf,
        #[arg(long)]
        out_merges: PathBuf,
        /// Append one JSON line of statistics to this file.
        #[arg(long)]
        stats: Option<PathBuf>,
        /// Only merge third variables of clause pairs sharing two variables.
        #[arg(long)]
        baseline: bool,
        /// Worker threads for the dominance pass (1 = sequential).
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Rewrite a signed instance as a monotone one on twice the variables.
    Reduce {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a merge map against every solution (exit 2 on a counterexample,
    /// 3 if the instance is too large to enumerate).
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        merges: PathBuf,
        #[arg(long, default_value_t = DEFAULT_LIMIT)]
        limit: usize,
    },
    /// Write a generated instance or family.
    Generate {
        #[command(subcommand)]
        kind: GenKind,
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Compare the baseline and full sparsifier on a family of instances.
    Bench {
        #[arg(long, value_enum, default_value = "xor")]
        family: bench::Family,
        /// Inclusive range `A..B`.
        #[arg(long)]
        k_range: String,
        #[arg(long)]
        csv: PathBuf,
        /// Write 0 in the `seconds` column so the file is reproducible.
        #[arg(long)]
        no_timing: bool,
    },
    /// Check that a colouring has a unique maximum on every clause (exit 2
    /// otherwise).
    CheckLo {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        colouring: PathBuf,
    },
    /// Pull a colouring of the quotient back to the original variables.
    Lift {
        #[arg(long)]
        merges: PathBuf,
        #[arg(long)]
        colouring: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Find a two-colour LO colouring by exhaustive search (exit 2 if none).
    Lo2 {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_LIMIT)]
        limit: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GenKind {
    Xor {
        #[arg(long)]
        k: u32,
    },
    SubsetFamily {
        #[arg(long)]
        d: usize,
    },
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        seed: u64,
    },
    Planted {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        seed: u64,
    },
    RandomNonmonotone {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        seed: u64,
    },
}

#[derive(Serialize)]
struct StatsLine {
    mode: &'static str,
    n_in: usize,
    m_in: usize,
    rounds: usize,
    merges: usize,
    twin_merges: usize,
    cycle_merges: usize,
    n_out: usize,
    m_out: usize,
    exponent_estimate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    status: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    clause_bound_ok: Option<bool>,
    seconds: f64,
}

/// Exit status for a completed run.
enum Outcome {
    Ok,
    Counterexample,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write(p, text),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn append_stats(path: &Path, line: &StatsLine) -> Result<()> {
    let mut f = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("opening {}", path.display()))?;
    writeln!(f, "{}", serde_json::to_string(line)?)?;
    Ok(())
}

fn log_exponent(n: usize, m: usize) -> Option<f64> {
    (n > 1 && m > 0).then(|| (m as f64).ln() / (n as f64).ln())
}

fn is_signed(text: &str) -> bool {
    text.lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && *l != "c" && !l.starts_with("c "))
        .is_some_and(|l| l.split_whitespace().nth(1) == Some("oitg"))
}

fn sparsify_cmd(
    input: &Path,
    mode: Mode,
    out_instance: &Path,
    out_merges: &Path,
    stats: Option<&Path>,
    baseline: bool,
    threads: usize,
) -> Result<Outcome> {
    if threads == 0 {
        bail!("--threads must be at least 1");
    }
    if threads > 1 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("starting worker threads")?;
    }
    let opts = SparsifyOptions {
        parallel: threads > 1,
    };
    let text = read(input)?;
    let line = match mode {
        Mode::Monotone => {
            let (inst, warnings) = Instance::parse_with_warnings(&text)?;
            for w in warnings {
                eprintln!("warning: {w}");
            }
            if baseline {
                let start = std::time::Instant::now();
                let out = baseline_pair_merge(&inst);
                write(out_instance, &out.instance.to_text())?;
                write(out_merges, &serialize_merge_map(&out.eq))?;
                StatsLine {
                    mode: "baseline",
                    n_in: inst.n(),
                    m_in: inst.m(),
                    rounds: 0,
                    merges: out.merges,
                    twin_merges: 0,
                    cycle_merges: 0,
                    n_out: out.instance.n(),
                    m_out: out.instance.m(),
                    exponent_estimate: log_exponent(out.instance.n(), out.instance.m()),
                    status: None,
                    clause_bound_ok: None,
                    seconds: start.elapsed().as_secs_f64(),
                }
            } else {
                let out = sparsify_with(&inst, opts);
                write(out_instance, &out.instance.to_text())?;
                write(out_merges, &serialize_merge_map(&out.eq))?;
                let s = &out.stats;
                StatsLine {
                    mode: "monotone",
                    n_in: s.n_in,
                    m_in: s.m_in,
                    rounds: s.rounds,
                    merges: s.twin_merges + s.cycle_merges,
                    twin_merges: s.twin_merges,
                    cycle_merges: s.cycle_merges,
                    n_out: s.n_out,
                    m_out: s.m_out,
                    exponent_estimate: s.exponent_estimate(),
                    status: None,
                    clause_bound_ok: None,
                    seconds: s.seconds,
                }
            }
        }
        Mode::Nonmonotone => {
            if baseline {
                bail!("--baseline applies to monotone instances only");
            }
            let li = LiteralInstance::parse(&text)?;
            let start = std::time::Instant::now();
            let out = sparsify_nonmonotone_with(&li, opts);
            let reduced = li.quotient_clauses(&out.eq)?;
            let n_out = out.eq.num_classes();
            write(
                out_instance,
                &LiteralInstance::clauses_to_text(n_out, &reduced),
            )?;
            write(out_merges, &serialize_merge_map(&out.eq))?;
            let bound = clause_bound_check(&li, &out.eq, &out.eq_y)?;
            StatsLine {
                mode: "nonmonotone",
                n_in: li.n(),
                m_in: li.m(),
                rounds: 0,
                merges: li.n() - n_out,
                twin_merges: 0,
                cycle_merges: 0,
                n_out,
                m_out: reduced.len(),
                exponent_estimate: log_exponent(n_out, reduced.len()),
                status: Some(match out.status {
                    ReductionStatus::Ok => "ok",
                    ReductionStatus::UnsatDetected => "unsat_detected",
                }),
                clause_bound_ok: Some(bound.is_ok()),
                seconds: start.elapsed().as_secs_f64(),
            }
        }
    };
    eprintln!(
        "{} -> {} variables, {} -> {} clauses",
        line.n_in, line.n_out, line.m_in, line.m_out
    );
    if let Some(p) = stats {
        append_stats(p, &line)?;
    }
    Ok(Outcome::Ok)
}

fn verify_cmd(input: &Path, merges: &Path, limit: usize) -> Result<Outcome> {
    let text = read(input)?;
    let eq = parse_merge_map(&read(merges)?)?;
    let (verdict, n) = if is_signed(&text) {
        let li = LiteralInstance::parse(&text)?;
        (verify_literal_merges(&li, &eq, limit)?, li.n())
    } else {
        let inst = Instance::parse_lenient(&text)?;
        (verify_merges(&inst, &eq, limit)?, inst.n())
    };
    match verdict {
        Verdict::Ok => {
            println!("ok");
            Ok(Outcome::Ok)
        }
        Verdict::Counterexample(c) => {
            println!(
                "counterexample: solution {} separates {} and {}",
                format_assignment(c.solution, n),
                c.pair.0,
                c.pair.1
            );
            Ok(Outcome::Counterexample)
        }
    }
}

fn generate_cmd(kind: &GenKind, out: Option<&Path>) -> Result<Outcome> {
    let text = match *kind {
        GenKind::Xor { k } => gen_xor(k)?.to_text(),
        GenKind::SubsetFamily { d } => gen_subset_family(d)?.to_text(),
        GenKind::Random { n, m, seed } => gen_random(n, m, seed)?.to_text(),
        GenKind::Planted { n, m, seed } => gen_planted(n, m, seed)?.to_text(),
        GenKind::RandomNonmonotone { n, m, seed } => gen_random_nonmonotone(n, m, seed)?.to_text(),
    };
    emit(out, &text)?;
    Ok(Outcome::Ok)
}

fn check_lo_cmd(input: &Path, colouring: &Path) -> Result<Outcome> {
    let h = Instance::parse_lenient(&read(input)?)?;
    let c = Colouring::parse(&read(colouring)?, h.n())?;
    match check_lo(&h, &c)? {
        Verdict::Ok => {
            println!("ok");
            Ok(Outcome::Ok)
        }
        Verdict::Counterexample(e) => {
            println!("violation: edge {} {} {}", e[0], e[1], e[2]);
            Ok(Outcome::Counterexample)
        }
    }
}

fn lift_cmd(merges: &Path, colouring: &Path, out: Option<&Path>) -> Result<Outcome> {
    let eq = parse_merge_map(&read(merges)?)?;
    let c = Colouring::parse(&read(colouring)?, eq.num_classes())?;
    emit(out, &lift_colouring(&eq, &c)?.to_text())?;
    Ok(Outcome::Ok)
}

fn lo2_cmd(input: &Path, limit: usize, out: Option<&Path>) -> Result<Outcome> {
    let h = Instance::parse_lenient(&read(input)?)?;
    match brute_lo2(&h, limit)? {
        Some(c) => {
            emit(out, &c.to_text())?;
            Ok(Outcome::Ok)
        }
        None => {
            eprintln!("no LO 2-colouring exists");
            Ok(Outcome::Counterexample)
        }
    }
}

fn reduce_cmd(input: &Path, out: Option<&Path>) -> Result<Outcome> {
    let li = LiteralInstance::parse(&read(input)?)?;
    let (inst, _) = to_monotone(&li);
    emit(out, &inst.to_text())?;
    Ok(Outcome::Ok)
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Sparsify {
            input,
            mode,
            out_instance,
            out_merges,
            stats,
            baseline,
            threads,
        } => sparsify_cmd(
            &input,
            mode,
            &out_instance,
            &out_merges,
            stats.as_deref(),
            baseline,
            threads,
        ),
        Command::Reduce { input, out } => reduce_cmd(&input, out.as_deref()),
        Command::Verify {
            input,
            merges,
            limit,
        } => verify_cmd(&input, &merges, limit),
        Command::Generate { kind, out } => generate_cmd(&kind, out.as_deref()),
        Command::Bench {
            family,
            k_range,
            csv,
            no_timing,
        } => {
            let (a, b) = bench::parse_range(&k_range)?;
            bench::run(family, a, b, &csv, !no_timing)?;
            Ok(Outcome::Ok)
        }
        Command::CheckLo { input, colouring } => check_lo_cmd(&input, &colouring),
        Command::Lift {
            merges,
            colouring,
            out,
        } => lift_cmd(&merges, &colouring, out.as_deref()),
        Command::Lo2 { input, limit, out } => lo2_cmd(&input, limit, out.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Counterexample) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<strongsparse::Error>() {
                Some(strongsparse::Error::SizeLimit { .. }) => ExitCode::from(3),
                _ => ExitCode::from(1),
            }
        }
    }
}
