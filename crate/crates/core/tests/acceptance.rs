//! Acceptance criteria 1 to 8. Prints one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines are always shown. The process
//! fails only when a criterion outside `KNOWN_RED` fails, or when a known red
//! criterion unexpectedly passes.

use std::path::PathBuf;
use std::time::Instant;

use anyhow::{anyhow, Result};
use coded_pc::analysis::{figure_data, series, Figure};
use coded_pc::cli::{check_privacy_sampled, check_privacy_shape};
use coded_pc::codes::{star_product_code, star_dimension, RSCode};
use coded_pc::config::Config;
use coded_pc::field::{next_prime, PrimeField};
use coded_pc::functions::{monomials, CandidateFunction, CandidateSet, EntropyOracle};
use coded_pc::linalg::greedy_basis;
use coded_pc::matrices::{construct_sys_ppc, n_hat, nu_sys, validate};
use coded_pc::protocol::{run_with_entropy, EntropySummary, RunOutcome, SchemeParams, Variant};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;

/// Criteria expected to fail, with the reason recorded in the project notes.
const KNOWN_RED: &[usize] = &[5];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(failures: Vec<String>, summary: String) -> Outcome {
    if failures.is_empty() {
        Outcome { passed: true, detail: summary }
    } else {
        let more = if failures.len() > 4 { format!(" (+{} more)", failures.len() - 4) } else { String::new() };
        Outcome { passed: false, detail: format!("{summary}; {}{more}", failures[..failures.len().min(4)].join("; ")) }
    }
}

fn config(name: &str) -> Result<Config> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(format!("{name}.toml"));
    Ok(Config::load(path)?)
}

fn rat(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn check_run(out: &RunOutcome, d: usize, l: usize, factor: &BigRational, bad: &mut Vec<String>) {
    let r = &out.report;
    if (r.d, r.l) != (d, l) {
        bad.push(format!("v={} seed {}: D={}, L={}", r.v, r.seed, r.d, r.l));
    }
    if &r.measured_factor != factor {
        bad.push(format!("v={} seed {}: L/D = {}", r.v, r.seed, r.measured_factor));
    }
}

/// Evaluates `oracle` on every message row and compares with the decoder.
fn check_oracle(out: &RunOutcome, oracle: impl Fn(&[u32]) -> u32, bad: &mut Vec<String>) {
    for (s, row) in out.decoded.values.iter().enumerate() {
        for (l, &x) in row.iter().enumerate() {
            let w = out.messages.symbols(s, l);
            if x != oracle(&w) {
                bad.push(format!("v={} seed {}: row {} pos {} decoded {x}", out.report.v, out.report.seed, s + 1, l + 1));
                return;
            }
        }
    }
}

fn criterion1() -> Result<Outcome> {
    let params = config("motivating")?.scheme_params()?;
    let entropy = EntropySummary::of(&params)?;
    let start = Instant::now();
    let mut bad = Vec::new();
    let seeds = 20;
    for seed in 0..seeds {
        for v in 0..params.mu() {
            let out = run_with_entropy(&params, v, seed, &entropy)?;
            check_run(&out, 24, 16, &rat(2, 3), &mut bad);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 1.0 {
        bad.push(format!("took {secs:.2} s"));
    }
    Ok(outcome(bad, format!("D=24, L=16, rate 2/3 for 4 indices x {seeds} seeds in {secs:.3} s")))
}

fn criterion2() -> Result<Outcome> {
    let params = config("example2")?.scheme_params()?;
    let q = params.field.order() as u64;
    let rows = [[1u64, 0], [0, 1], [1, 1], [1, 2]];
    let entropy = EntropySummary::of(&params)?;
    let mut bad = Vec::new();
    for seed in 0..5 {
        for (v, c) in rows.iter().enumerate() {
            let out = run_with_entropy(&params, v, seed, &entropy)?;
            check_run(&out, 48, 32, &rat(2, 3), &mut bad);
            check_oracle(&out, |w| ((c[0] * w[0] as u64 + c[1] * w[1] as u64) % q) as u32, &mut bad);
        }
    }
    Ok(outcome(bad, "D=48, L=32, rate 2/3, direct evaluation matches for all 4 indices".into()))
}

fn criterion3() -> Result<Outcome> {
    let params = config("example3")?.scheme_params()?;
    let q = params.field.order() as u64;
    let oracles: [fn(&[u32], u64) -> u32; 3] =
        [|w, _| w[0], |w, _| w[1], |w, q| ((w[0] as u64 * w[1] as u64) % q) as u32];
    let entropy = EntropySummary::of(&params)?;
    let mut bad = Vec::new();
    for seed in 0..3 {
        for (v, oracle) in oracles.iter().enumerate() {
            let out = run_with_entropy(&params, v, seed, &entropy)?;
            check_run(&out, 336, 128, &rat(128, 336), &mut bad);
            check_oracle(&out, |w| oracle(w, q), &mut bad);
        }
    }
    Ok(outcome(bad, format!("D=336, rate 128/336 * H_min = {:.6}, oracle matches W1, W2, W1*W2", 128.0 / 336.0 * entropy.h_min)))
}

fn criterion4() -> Result<Outcome> {
    let params = config("example4")?.scheme_params()?;
    let entropy = EntropySummary::of(&params)?;
    let mut bad = Vec::new();
    if params.n_queried != 4 {
        bad.push(format!("n_hat = {}", params.n_queried));
    }
    for seed in 0..3 {
        for v in 0..params.mu() {
            let out = run_with_entropy(&params, v, seed, &entropy)?;
            check_run(&out, 120, 54, &rat(9, 20), &mut bad);
            if out.decoded.per_round != [24, 24, 6] {
                bad.push(format!("v={} per-round counts {:?}", v + 1, out.decoded.per_round));
            }
            let touched = (0..out.queries.n_db()).filter(|&j| out.queries.count_at(j) > 0).count();
            if touched != 4 {
                bad.push(format!("v={}: {touched} databases queried", v + 1));
            }
        }
    }
    // With n = 7 the systematic scheme leaves two databases idle.
    let field = PrimeField::new(7)?;
    let wide = SchemeParams::sys_ppc(field, 7, 2, 2, CandidateSet::nonparallel_monomials(field, 2, 2)?)?;
    let out = run_with_entropy(&wide, 2, 0, &EntropySummary::of(&wide)?)?;
    let idle: Vec<usize> = (0..7).filter(|&j| out.queries.count_at(j) == 0).collect();
    if wide.n_queried != 5 || idle != [5, 6] {
        bad.push(format!("n=7: n_hat={}, idle databases {:?}", wide.n_queried, idle));
    }
    Ok(outcome(bad, format!("D=120, rate 0.45 * H_min = {:.6}, n_hat=4, rounds 24/24/6; n=7 queries 5 databases", 0.45 * entropy.h_min)))
}

fn figure_check(which: Figure, tol: f64, names: &[&str]) -> Result<(Vec<String>, Vec<String>)> {
    let data = figure_data(which)?;
    let mut bad = Vec::new();
    let mut shown = Vec::new();
    for &name in names {
        let d = data.delta(name).ok_or_else(|| anyhow!("{which}: no comparison for {name}"))?;
        shown.push(format!("{name} {:.1e}", d.max_abs_delta));
        for &(x, ours, theirs) in &d.points {
            if (ours - theirs).abs() > tol {
                bad.push(format!("{name} at x={x}: {ours:.6} vs {theirs:.6}"));
            }
        }
    }
    Ok((bad, shown))
}

fn criterion5() -> Result<Outcome> {
    let start = Instant::now();
    let names = [series::CONVERSE, series::RS_L, series::SYS_RS_L, series::RS_L_ASYMPTOTIC];
    let (mut bad, shown) = figure_check(Figure::Fig4a, 1e-5, &names)?;
    let secs = start.elapsed().as_secs_f64();
    if secs >= 10.0 {
        bad.push(format!("took {secs:.2} s"));
    }
    Ok(outcome(bad, format!("max |delta|: {} in {secs:.2} s", shown.join(", "))))
}

fn criterion6() -> Result<Outcome> {
    let (mut bad, shown) = figure_check(Figure::Fig5a, 1e-6, &[series::RS_L, series::SYS_RS_L])?;
    let data = figure_data(Figure::Fig5a)?;
    for (name, want) in [(series::RS_L, 0.317224), (series::SYS_RS_L, 0.372699)] {
        let at_half = data.delta(name).and_then(|d| d.points.iter().find(|p| (p.0 - 0.5).abs() < 1e-12)).map(|p| p.1);
        match at_half {
            Some(v) if (v - want).abs() <= 1e-6 => {}
            other => bad.push(format!("{name} at 0.5: {other:?}")),
        }
    }
    Ok(outcome(bad, format!("max |delta|: {}", shown.join(", "))))
}

/// Fixed linear rows over `f` messages; the first `f` are the messages.
fn linear_rows(f: usize) -> Vec<Vec<u32>> {
    let mut rows: Vec<Vec<u32>> = (0..f).map(|i| (0..f).map(|j| u32::from(i == j)).collect()).collect();
    if f > 1 {
        rows.push(vec![1; f]);
        rows.push((0..f).map(|j| if j == 0 { 1 } else { 2 }).collect());
    }
    rows
}

/// Messages followed by the next monomials of degree at most `g`.
fn polynomial_set(field: PrimeField, f: usize, g: usize, mu: usize) -> Result<CandidateSet> {
    let funcs = monomials(f, g).into_iter().take(mu).map(|m| CandidateFunction::monomial(field, m)).collect::<Result<_, _>>()?;
    let mut set = CandidateSet::new(field, f, funcs)?;
    set.g = g;
    Ok(set)
}

fn sweep_configs() -> Result<Vec<SchemeParams>> {
    let mut out = Vec::new();
    for n in 2..=8usize {
        let field = PrimeField::new(next_prime(n.max(3) as u32))?;
        for k in 1..n.min(4) {
            for f in 1..=3 {
                let rows = linear_rows(f);
                for mu in 1..=rows.len().min(4) {
                    out.push(SchemeParams::plc_mds(field, n, k, CandidateSet::linear(field, &rows[..mu])?)?);
                }
                for g in 1..=2 {
                    for mu in f..=monomials(f, g).len().min(4) {
                        let set = polynomial_set(field, f, g, mu)?;
                        out.push(SchemeParams::ppc(field, n, k, g, set.clone())?);
                        out.push(SchemeParams::sys_ppc(field, n, k, g, set)?);
                    }
                }
            }
        }
    }
    Ok(out)
}

fn criterion7() -> Result<Outcome> {
    let start = Instant::now();
    let configs = sweep_configs()?;
    let mut bad = Vec::new();
    let mut counts = [0usize; 3];
    let mut runs = 0;
    for (i, params) in configs.iter().enumerate() {
        let tag = format!(
            "{} n={} k={} g={} f={} mu={}",
            params.variant,
            params.n,
            params.k,
            params.g,
            params.f(),
            params.mu()
        );
        let entropy = EntropySummary::of(params)?;
        for v in 0..params.mu() {
            let tag = format!("{tag} v={}", v + 1);
            let out = match run_with_entropy(params, v, i as u64, &entropy) {
                Ok(out) => out,
                Err(e) => {
                    bad.push(format!("{tag}: {e}"));
                    continue;
                }
            };
            runs += 1;
            let r = &out.report;
            if BigUint::from(r.d) != params.closed_form_download() {
                bad.push(format!("{tag}: D={} vs {}", r.d, params.closed_form_download()));
            }
            if r.measured_factor != r.closed_form_factor {
                bad.push(format!("{tag}: L/D={} vs {}", r.measured_factor, r.closed_form_factor));
            }
            match r.converse {
                Some(c) if r.rate_measured > c + 1e-9 => bad.push(format!("{tag}: rate {} above converse {c}", r.rate_measured)),
                Some(_) => {}
                None => bad.push(format!("{tag}: converse not computed")),
            }
        }
        counts[match params.variant {
            Variant::Plc => 0,
            Variant::Ppc => 1,
            Variant::SysPpc => 2,
        }] += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    Ok(outcome(
        bad,
        format!(
            "{} configurations ({} linear, {} polynomial, {} systematic), {runs} runs with exact D, L/D and rate below the converse in {secs:.1} s",
            configs.len(),
            counts[0],
            counts[1],
            counts[2]
        ),
    ))
}

fn entropy_lemma(bad: &mut Vec<String>) -> Result<usize> {
    let mut instances = 0;
    for q in [3u32, 5, 7] {
        let field = PrimeField::new(q)?;
        for f in 1..=3 {
            let set = CandidateSet::linear(field, &linear_rows(f))?;
            let oracle = EntropyOracle::new(&set)?;
            let pivots = greedy_basis(field, &set.coefficient_rows());
            for h in 1..=pivots.len() {
                instances += 1;
                let got = oracle.joint(&pivots[..h]);
                if (got - h as f64).abs() > 1e-12 {
                    bad.push(format!("q={q} f={f} h={h}: H={got}"));
                }
            }
        }
    }
    Ok(instances)
}

fn systematic_matrix_sweep(bad: &mut Vec<String>) -> Result<usize> {
    let mut checked = 0;
    for n in 2..=12usize {
        let field = PrimeField::new(next_prime(n as u32))?;
        for k in 1..n.min(5) {
            let code = RSCode::default_systematic(field, n, k)?;
            for g in 1..=3 {
                let kt = star_dimension(n, k, g);
                if kt >= n {
                    continue;
                }
                let star = star_product_code(&code, g)?;
                let (rm, _) = construct_sys_ppc(n, k, kt)?;
                let report = validate(&rm, &code.base, Some(&star.base));
                let nh = n_hat(n, k, kt);
                if !report.is_valid() || rm.n_cols() != nh || rm.kappa != k || rm.nu != nu_sys(n, k, kt) {
                    bad.push(format!("n={n} k={k} g={g}: {report}"));
                }
                checked += 1;
            }
        }
    }
    Ok(checked)
}

fn criterion8() -> Result<Outcome> {
    let mut bad = Vec::new();
    let lemma = entropy_lemma(&mut bad)?;
    let trials = 200;
    let mut p_values = Vec::new();
    let mut certified = 0;
    for name in ["motivating", "example2", "example3", "example4"] {
        let cfg = config(name)?;
        let params = cfg.scheme_params()?;
        bad.extend(check_privacy_shape(&params, cfg.run.seed)?.into_iter().map(|m| format!("{name} shape: {m}")));
        let (violations, p) = check_privacy_sampled(&params, trials, cfg.run.seed)?;
        bad.extend(violations.into_iter().map(|m| format!("{name} sampled: {m}")));
        p_values.push(format!("{name} p={:.3}", p.unwrap_or(f64::NAN)));
        let entropy = EntropySummary::of(&params)?;
        for seed in 0..3 {
            for v in 0..params.mu() {
                let d = run_with_entropy(&params, v, seed, &entropy)?.decoded;
                if d.removed_checked == 0 && !params.trivial {
                    bad.push(format!("{name} v={}: no eliminated sums checked", v + 1));
                }
                certified += d.removed_checked;
                bad.extend(d.removed_failures.into_iter().map(|m| format!("{name} v={}: {m}", v + 1)));
            }
        }
    }
    let sys = systematic_matrix_sweep(&mut bad)?;
    Ok(outcome(
        bad,
        format!(
            "entropy lemma on {lemma} pivot prefixes; privacy over {trials} trials ({}); {certified} eliminated sums certified; {sys} systematic matrices valid",
            p_values.join(", ")
        ),
    ))
}

fn main() -> Result<()> {
    let criteria: [(usize, fn() -> Result<Outcome>); 8] = [
        (1, criterion1),
        (2, criterion2),
        (3, criterion3),
        (4, criterion4),
        (5, criterion5),
        (6, criterion6),
        (7, criterion7),
        (8, criterion8),
    ];
    let mut unexpected = Vec::new();
    for (id, run) in criteria {
        let o = run().unwrap_or_else(|e| Outcome { passed: false, detail: format!("error: {e:#}") });
        let known = KNOWN_RED.contains(&id);
        let note = if known && !o.passed { " [known red]" } else { "" };
        println!("criterion {id}: {}{note}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        if o.passed == known {
            unexpected.push(id);
        }
    }
    if unexpected.is_empty() {
        Ok(())
    } else {
        Err(anyhow!("criteria with unexpected status: {unexpected:?}"))
    }
}
