use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use serde::Serialize;

use strongsparse::generators::gen_xor;
use strongsparse::sparsifier::{baseline_pair_merge, sparsify};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Xor,
}

#[derive(Serialize)]
struct Row {
    k: u32,
    n: usize,
    m_in: usize,
    m_out_baseline: usize,
    m_out_full: usize,
    rounds: usize,
    seconds: String,
}

/// Parses `A..B` (inclusive).
pub fn parse_range(s: &str) -> Result<(u32, u32)> {
    let (a, b) = s
        .split_once("..")
        .with_context(|| format!("expected a range `A..B`, got {s:?}"))?;
    let a: u32 = a
        .trim()
        .parse()
        .with_context(|| format!("bad range start {a:?}"))?;
    let b: u32 = b
        .trim()
        .parse()
        .with_context(|| format!("bad range end {b:?}"))?;
    if a > b {
        bail!("empty range {a}..{b}");
    }
    Ok((a, b))
}

pub fn run(family: Family, from: u32, to: u32, csv_path: &Path, timing: bool) -> Result<()> {
    let mut w = csv::Writer::from_path(csv_path)
        .with_context(|| format!("creating {}", csv_path.display()))?;
    for k in from..=to {
        let inst = match family {
            Family::Xor => gen_xor(k)?,
        };
        let baseline = baseline_pair_merge(&inst);
        let full = sparsify(&inst);
        let seconds = if timing { full.stats.seconds } else { 0.0 };
        w.serialize(Row {
            k,
            n: inst.n(),
            m_in: inst.m(),
            m_out_baseline: baseline.instance.m(),
            m_out_full: full.stats.m_out,
            rounds: full.stats.rounds,
            seconds: format!("{seconds:.6}"),
        })?;
        w.flush()?;
        eprintln!(
            "k={k}: n={} m={} baseline={} full={}",
            inst.n(),
            inst.m(),
            baseline.instance.m(),
            full.stats.m_out
        );
    }
    Ok(())
}
