//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line for
//! each, and exits nonzero if any fails.

use std::collections::HashSet;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;

use strongsparse::addcomb::{
    check_condition_i, check_condition_ii, e_k, family_from_instance, total_size, VectorFamily,
};
use strongsparse::f2::{in_span, reduce_mod, rref, solve, BitVec, F2Matrix};
use strongsparse::generators::{
    gen_planted, gen_random, gen_random_nonmonotone, gen_subset_family, gen_xor, rng_from_seed,
};
use strongsparse::instance::Instance;
use strongsparse::locolor::{brute_lo2, check_lo, lift_colouring};
use strongsparse::oracle::{
    count_solutions, enumerate_literal_solutions, pair_uniqueness, verify_merges,
    verify_succ_semantics, DEFAULT_LIMIT,
};
use strongsparse::reduction::{
    clause_bound_check, sparsify_nonmonotone, verify_literal_merges, ReductionStatus,
};
use strongsparse::sparsifier::{
    baseline_pair_merge, compute_alpha, find_cycles, find_twins, sparsify, succ_relation,
    Sparsified,
};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn max_planted(n: usize) -> usize {
    (1..n)
        .map(|t| t * (n - t) * (n - t - 1) / 2)
        .max()
        .unwrap_or(0)
}

/// 500 instances over at most 20 variables and 40 clauses, alternating
/// between planted (satisfiable) and uniformly random ones.
fn soundness_corpus() -> Vec<Instance> {
    (0..500u64)
        .map(|i| {
            let n = 6 + (i % 15) as usize;
            let m = 1 + (i as usize * 37 + i as usize / 15) % 40;
            if i % 2 == 0 {
                gen_planted(n, m.min(max_planted(n)), 1000 + i).unwrap()
            } else {
                gen_random(n, m.min(n * (n - 1) * (n - 2) / 6), 1000 + i).unwrap()
            }
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let mut families = 0;
    for d in 1..=10 {
        let f = gen_subset_family(d).map_err(|e| e.to_string())?;
        let bad_i = check_condition_i(&f);
        ensure(bad_i.is_empty(), || {
            format!(
                "d={d}: condition (i) fails at {:?}",
                &bad_i[..bad_i.len().min(5)]
            )
        })?;
        let bad_ii = check_condition_ii(&f);
        ensure(bad_ii.is_empty(), || {
            format!(
                "d={d}: condition (ii) fails at {:?}",
                &bad_ii[..bad_ii.len().min(5)]
            )
        })?;
        let total = total_size(&f);
        ensure(total == 3usize.pow(d as u32), || {
            format!("d={d}: total size {total} != 3^{d}")
        })?;
        families += 1;
    }
    Ok(format!("{families} families, total sizes 3^d"))
}

fn criterion_2() -> Outcome {
    for k in 2..=6u32 {
        let inst = gen_xor(k).map_err(|e| e.to_string())?;
        let n = 1usize << k;
        let mut brute = 0;
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    if a ^ b ^ c == 0 {
                        brute += 1;
                    }
                }
            }
        }
        let formula = (n - 1) * (n - 2) / 6;
        ensure(inst.m() == formula && brute == formula, || {
            format!(
                "k={k}: {} clauses, enumeration {brute}, formula {formula}",
                inst.m()
            )
        })?;
        ensure(pair_uniqueness(&inst).is_ok(), || {
            format!("k={k}: a pair lies in two clauses")
        })?;
        let base = baseline_pair_merge(&inst);
        ensure(base.merges == 0, || {
            format!("k={k}: baseline merged {}", base.merges)
        })?;
    }
    Ok("k=2..6 counts exact, pairs unique, baseline idle".into())
}

fn criterion_3(corpus: &[Instance], outputs: &[Sparsified]) -> Outcome {
    let mut merged = 0;
    for (i, (inst, out)) in corpus.iter().zip(outputs).enumerate() {
        let v = verify_merges(inst, &out.eq, DEFAULT_LIMIT).map_err(|e| e.to_string())?;
        ensure(v.is_ok(), || format!("instance {i}: unsound merge {v:?}"))?;
        let before = count_solutions(inst, DEFAULT_LIMIT).map_err(|e| e.to_string())?;
        let after = count_solutions(&out.instance, DEFAULT_LIMIT).map_err(|e| e.to_string())?;
        ensure(before == after, || {
            format!("instance {i}: {before} solutions became {after}")
        })?;
        merged += inst.n() - out.instance.n();
    }
    let sat = corpus
        .iter()
        .filter(|i| count_solutions(i, DEFAULT_LIMIT).unwrap() > 0)
        .count();
    Ok(format!(
        "{} instances ({sat} satisfiable), {merged} variables merged",
        corpus.len()
    ))
}

fn criterion_4(corpus: &[Instance], outputs: &[Sparsified]) -> Outcome {
    let mut over_bound = Vec::new();
    for (i, out) in outputs.iter().enumerate() {
        let q = &out.instance;
        let alpha = compute_alpha(q);
        ensure(find_twins(&alpha).is_empty(), || {
            format!("output {i} has twins")
        })?;
        ensure(find_cycles(&succ_relation(q, &alpha)).is_empty(), || {
            format!("output {i} has a cycle")
        })?;
        let p = pair_uniqueness(q);
        ensure(p.is_ok(), || format!("output {i}: {p:?}"))?;
        let n = q.n();
        if q.m() > n * n.saturating_sub(1) / 2 {
            over_bound.push(i);
        }
    }
    if over_bound.is_empty() {
        return Ok(format!(
            "{} outputs twin-free, cycle-free, pair-unique, within the pair bound",
            outputs.len()
        ));
    }
    // Describe the offending outputs so the failure is self-explanatory.
    let collapsed = over_bound
        .iter()
        .filter(|&&i| {
            let q = &outputs[i].instance;
            q.n() == 1 && count_solutions(&corpus[i], DEFAULT_LIMIT).unwrap() == 0
        })
        .count();
    Err(format!(
        "twin-free, cycle-free and pair-unique on all {} outputs, but {} exceed m_out <= n_out(n_out-1)/2; \
         {collapsed} of them are unsatisfiable inputs collapsed to one variable with the clause (1,1,1)",
        outputs.len(),
        over_bound.len()
    ))
}

fn criterion_5() -> Outcome {
    let mut edges = 0;
    for i in 0..200u64 {
        let n = 5 + (i % 12) as usize;
        let m = 1 + (i as usize * 13) % (2 * n);
        let inst = if i % 2 == 0 {
            gen_planted(n, m.min(max_planted(n)), 5000 + i)
        } else {
            gen_random(n, m, 5000 + i)
        }
        .map_err(|e| e.to_string())?
        .complement();
        let g = succ_relation(&inst, &compute_alpha(&inst));
        edges += g.edge_count();
        let v = verify_succ_semantics(&inst, &g, DEFAULT_LIMIT).map_err(|e| e.to_string())?;
        ensure(v.is_ok(), || format!("instance {i}: {v:?}"))?;
    }
    Ok(format!("200 instances, {edges} edges checked"))
}

fn energy_check(label: &str, f: &VectorFamily) -> Result<(), String> {
    let e3 = e_k(f.vectors(), 3).map_err(|e| e.to_string())?;
    let e4 = e_k(f.vectors(), 4).map_err(|e| e.to_string())?;
    let total = total_size(f) as u128;
    ensure(e3 >= total, || format!("{label}: E3 = {e3} < {total}"))?;
    ensure(f.n() as u128 * e4 >= e3 * e3, || {
        format!(
            "{label}: n*E4 = {} < E3^2 = {}",
            f.n() as u128 * e4,
            e3 * e3
        )
    })
}

fn criterion_6(outputs: &[Sparsified]) -> Outcome {
    let mut count = 0;
    for (i, out) in outputs.iter().enumerate() {
        let q = &out.instance;
        let (f, _) =
            family_from_instance(q, &compute_alpha(q)).map_err(|e| format!("output {i}: {e}"))?;
        ensure(check_condition_i(&f).is_empty(), || {
            format!("output {i}: condition (i) fails")
        })?;
        ensure(check_condition_ii(&f).is_empty(), || {
            format!("output {i}: condition (ii) fails")
        })?;
        energy_check(&format!("output {i}"), &f)?;
        count += 1;
    }
    for d in 1..=10 {
        let f = gen_subset_family(d).map_err(|e| e.to_string())?;
        energy_check(&format!("subset family d={d}"), &f)?;
        count += 1;
    }
    Ok(format!("{count} families"))
}

fn criterion_7() -> Outcome {
    let mut unsat = 0;
    let mut merged = 0;
    for i in 0..200u64 {
        let n = 4 + (i % 9) as usize;
        let m = 1 + (i as usize * 7) % (2 * n);
        let li = gen_random_nonmonotone(n, m, 9000 + i).map_err(|e| e.to_string())?;
        let out = sparsify_nonmonotone(&li);
        let v = verify_literal_merges(&li, &out.eq, DEFAULT_LIMIT).map_err(|e| e.to_string())?;
        ensure(v.is_ok(), || format!("instance {i}: {v:?}"))?;
        if out.status == ReductionStatus::UnsatDetected {
            let sols =
                enumerate_literal_solutions(&li, DEFAULT_LIMIT).map_err(|e| e.to_string())?;
            ensure(sols.is_empty(), || {
                format!("instance {i}: flagged unsatisfiable but has solutions")
            })?;
            unsat += 1;
        }
        let b = clause_bound_check(&li, &out.eq, &out.eq_y).map_err(|e| e.to_string())?;
        ensure(b.is_ok(), || format!("instance {i}: {b:?}"))?;
        merged += n - out.eq.num_classes();
    }
    Ok(format!(
        "200 instances, {unsat} detected unsatisfiable, {merged} variables merged"
    ))
}

fn criterion_8() -> Outcome {
    for i in 0..200u64 {
        let n = 5 + (i % 8) as usize;
        let m = (1 + (i as usize * 11) % (2 * n)).min(max_planted(n));
        let inst = gen_planted(n, m, 12000 + i).map_err(|e| e.to_string())?;
        let out = sparsify(&inst);
        let c = brute_lo2(&out.instance, DEFAULT_LIMIT)
            .map_err(|e| e.to_string())?
            .ok_or_else(|| format!("instance {i}: quotient has no LO 2-colouring"))?;
        let lifted = lift_colouring(&out.eq, &c).map_err(|e| e.to_string())?;
        let v = check_lo(&inst, &lifted).map_err(|e| e.to_string())?;
        ensure(v.is_ok(), || {
            format!("instance {i}: lifted colouring fails on {v:?}")
        })?;
    }
    Ok("200 lifted colourings valid".into())
}

fn span_of(ncols: usize, rows: &[BitVec]) -> HashSet<BitVec> {
    let mut span = HashSet::from([BitVec::zeros(ncols)]);
    for r in rows {
        let shifted: Vec<BitVec> = span.iter().map(|s| s ^ r).collect();
        span.extend(shifted);
    }
    span
}

fn criterion_9() -> Outcome {
    let mut rng = rng_from_seed(0xF2);
    for t in 0..1000 {
        let ncols = rng.gen_range(1..=12);
        let nrows = rng.gen_range(0..=14);
        let rows: Vec<BitVec> = (0..nrows)
            .map(|_| BitVec::from_u64(ncols, rng.gen_range(0..1u64 << ncols)))
            .collect();
        let m = F2Matrix::from_rows(ncols, rows.clone()).map_err(|e| e.to_string())?;
        let r = rref(&m);
        let span = span_of(ncols, &rows);
        ensure(span_of(ncols, r.rows()) == span, || {
            format!("system {t}: rref changed the span")
        })?;
        ensure(span.len() == 1 << r.rank(), || {
            format!("system {t}: rank {} for span of {}", r.rank(), span.len())
        })?;

        let v = BitVec::from_u64(ncols, rng.gen_range(0..1u64 << ncols));
        let red = reduce_mod(&r, &v).map_err(|e| e.to_string())?;
        ensure(span.contains(&(&red ^ &v)), || {
            format!("system {t}: reduction left the coset")
        })?;
        ensure(r.pivots().iter().all(|&p| !red.get(p)), || {
            format!("system {t}: reduction not canonical")
        })?;
        for s in &span {
            let other = reduce_mod(&r, &(&v ^ s)).map_err(|e| e.to_string())?;
            ensure(other == red, || {
                format!("system {t}: coset members reduce differently")
            })?;
        }
        ensure(in_span(&r, &v).unwrap() == span.contains(&v), || {
            format!("system {t}: membership wrong")
        })?;

        let b = BitVec::from_u64(nrows, rng.gen_range(0..1u64 << nrows));
        let brute = (0..1u64 << ncols)
            .map(|x| BitVec::from_u64(ncols, x))
            .find(|x| m.mul_vec(x).unwrap() == b);
        match solve(&m, &b).map_err(|e| e.to_string())? {
            Some(x) => ensure(m.mul_vec(&x).unwrap() == b, || {
                format!("system {t}: wrong solution")
            })?,
            None => ensure(brute.is_none(), || {
                format!("system {t}: missed solution {brute:?}")
            })?,
        }
    }
    Ok("1000 systems".into())
}

fn run_bench(dir: &std::path::Path, name: &str, timing: bool) -> Result<String, String> {
    let path = dir.join(name);
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_strongsparse"));
    cmd.args(["bench", "--family", "xor", "--k-range", "2..10", "--csv"])
        .arg(&path);
    if !timing {
        cmd.arg("--no-timing");
    }
    let out = cmd.output().map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        String::from_utf8_lossy(&out.stderr).into_owned()
    })?;
    std::fs::read_to_string(&path).map_err(|e| e.to_string())
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let a = run_bench(dir.path(), "a.csv", false)?;
    let b = run_bench(dir.path(), "b.csv", false)?;
    ensure(a == b, || "untimed runs differ".into())?;
    let timed = run_bench(dir.path(), "t.csv", true)?;
    let strip = |s: &str| -> Vec<String> {
        s.lines()
            .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head).to_string())
            .collect()
    };
    ensure(strip(&a) == strip(&timed), || {
        "timed run differs outside the seconds column".into()
    })?;

    let mut lines = a.lines();
    ensure(
        lines.next() == Some("k,n,m_in,m_out_baseline,m_out_full,rounds,seconds"),
        || "unexpected CSV header".into(),
    )?;
    let mut rows = 0;
    let mut summary = Vec::new();
    for line in lines {
        let f: Vec<usize> = line
            .split(',')
            .take(6)
            .map(|x| x.parse().map_err(|_| format!("bad field in {line:?}")))
            .collect::<Result<_, _>>()?;
        let (k, m_in, base, full) = (f[0], f[2], f[3], f[4]);
        ensure(full <= base && base <= m_in, || {
            format!("row k={k}: {full} <= {base} <= {m_in} fails")
        })?;
        summary.push(format!("k={k}:{m_in}->{full}"));
        rows += 1;
    }
    ensure(rows == 9, || format!("{rows} rows instead of 9"))?;
    Ok(format!("deterministic, {}", summary.join(" ")))
}

fn main() {
    // Respect `cargo test -- --list` and name filters from the default
    // harness by ignoring them: the suite always runs in full.
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }

    let mut failures = 0;
    let mut report =
        |n: usize, name: &str, budget: Option<Duration>, f: &mut dyn FnMut() -> Outcome| {
            let start = Instant::now();
            let result = f();
            let took = start.elapsed();
            let result = match (result, budget) {
                (Ok(msg), Some(b)) if took > b => Err(format!("{msg}; over time budget {b:?}")),
                (r, _) => r,
            };
            match result {
                Ok(msg) => println!(
                    "criterion {n:>2} PASS  {name}: {msg} [{:.2}s]",
                    took.as_secs_f64()
                ),
                Err(msg) => {
                    failures += 1;
                    println!(
                        "criterion {n:>2} FAIL  {name}: {msg} [{:.2}s]",
                        took.as_secs_f64()
                    );
                }
            }
        };

    report(
        1,
        "subset-lattice family",
        Some(Duration::from_secs(30)),
        &mut criterion_1,
    );
    report(
        2,
        "XOR instance counts",
        Some(Duration::from_secs(10)),
        &mut criterion_2,
    );

    let start = Instant::now();
    let corpus = soundness_corpus();
    let outputs: Vec<Sparsified> = corpus.iter().map(sparsify).collect();
    let prep = start.elapsed();
    report(
        3,
        "sparsifier soundness",
        Some(Duration::from_secs(300) - prep),
        &mut || criterion_3(&corpus, &outputs),
    );
    report(4, "fixpoint and structure", None, &mut || {
        criterion_4(&corpus, &outputs)
    });
    report(
        5,
        "dominance semantics",
        Some(Duration::from_secs(120)),
        &mut criterion_5,
    );
    report(6, "energy inequalities", None, &mut || {
        criterion_6(&outputs)
    });
    report(
        7,
        "signed-instance reduction",
        Some(Duration::from_secs(180)),
        &mut criterion_7,
    );
    report(8, "LO colouring lift", None, &mut criterion_8);
    report(
        9,
        "linear algebra against enumeration",
        Some(Duration::from_secs(30)),
        &mut criterion_9,
    );
    report(10, "XOR benchmark report", None, &mut criterion_10);

    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
