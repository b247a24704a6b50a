//! Subcommands behind the binary: closed-form rates, simulation,
//! invariant verification and figure data.

use std::fmt;
use std::io::Write;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;

use crate::analysis::{self, figure_data, to_f64, Figure, FigureData};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::functions::CandidateSet;
use crate::matrices::{construct_block_cyclic, MatrixKind};
use crate::protocol::{
    build_queries, run_with_entropy, write_reports, EntropySummary, RateReport, SchemeParams, Variant,
    RATE_REPORT_HEADER,
};
use crate::querygen::{privacy_sampled, privacy_shape, q_gen, queries_per_database, round_count};

/// Closed-form line of `rates`, in the rate report layout.
#[derive(Clone, Debug, PartialEq)]
pub struct RatesRow {
    pub params: (String, usize, usize, u32, usize, usize, usize),
    pub l: BigUint,
    pub d: BigUint,
    pub h_min: f64,
    pub rate: f64,
    pub converse: Option<f64>,
}

impl RatesRow {
    fn record(&self) -> Vec<String> {
        let (variant, n, k, q, g, f, mu) = &self.params;
        vec![
            variant.clone(),
            n.to_string(),
            k.to_string(),
            q.to_string(),
            g.to_string(),
            f.to_string(),
            mu.to_string(),
            String::new(),
            String::new(),
            self.l.to_string(),
            format!("{:.9}", self.h_min),
            self.d.to_string(),
            String::new(),
            format!("{:.9}", self.rate),
            self.converse.map_or_else(String::new, |c| format!("{c:.9}")),
        ]
    }
}

/// Closed-form rate and converse for `set` under the configured scheme.
///
/// The polynomial variants only need the formulas, so the field may be
/// smaller than `n` here.
pub fn rates_row(cfg: &Config, set: CandidateSet) -> Result<RatesRow> {
    let s = &cfg.scheme;
    let variant = cfg.variant()?;
    let (n, k) = (s.n, s.k);
    let g = s.g.unwrap_or(set.g);
    let (f, mu) = (set.f, set.mu());
    let entropy = EntropySummary::for_set(&set, n, k)?;
    let (l, d, factor) = match variant {
        Variant::Plc => {
            let p = cfg.scheme_params_with(set)?;
            let (_, nu) = p.kappa_nu();
            (analysis::message_length(k, nu, mu), p.closed_form_download(), p.closed_form_rate()?)
        }
        _ if n <= g * (k - 1) + 1 => {
            (BigUint::from(k), BigUint::from(f * k), BigRational::new(BigInt::from(1), BigInt::from(f)))
        }
        Variant::Ppc => {
            let rm = construct_block_cyclic(n, analysis::k_tilde(n, k, g), MatrixKind::Ppc)?;
            (
                analysis::message_length(k, rm.nu, mu),
                analysis::ppc_download(n, rm.kappa, rm.nu, mu, f, g),
                analysis::ppc_rate_factor(n, k, g, f, mu)?,
            )
        }
        Variant::SysPpc => {
            let (n_hat, kappa, nu) = analysis::sys_parameters(n, k, g);
            (
                analysis::message_length(k, nu, mu),
                analysis::ppc_download(n_hat, kappa, nu, mu, f, g),
                analysis::sys_ppc_rate_factor(n, k, g, f, mu)?,
            )
        }
    };
    Ok(RatesRow {
        params: (variant.to_string(), n, k, s.q, g, f, mu),
        l,
        d,
        h_min: entropy.h_min,
        rate: to_f64(&factor) * entropy.h_min,
        converse: entropy.converse,
    })
}

/// Rows for the configured candidates, or one per `rates.f` entry.
pub fn rates_rows(cfg: &Config) -> Result<Vec<RatesRow>> {
    match &cfg.rates.f {
        None => Ok(vec![rates_row(cfg, cfg.candidate_set()?)?]),
        Some(fs) => fs.iter().map(|&f| rates_row(cfg, cfg.candidate_set_for(f)?)).collect(),
    }
}

pub fn cmd_rates<W: Write>(cfg: &Config, out: W) -> Result<Vec<RatesRow>> {
    let rows = rates_rows(cfg)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RATE_REPORT_HEADER)?;
    for r in &rows {
        w.write_record(r.record())?;
    }
    w.flush()?;
    Ok(rows)
}

/// Runs `trials` seeds starting at `run.seed` for every desired index.
pub fn simulate(cfg: &Config) -> Result<Vec<RateReport>> {
    let params = cfg.scheme_params()?;
    let entropy = EntropySummary::of(&params)?;
    let mut reports = Vec::new();
    for trial in 0..cfg.run.trials {
        let seed = cfg.run.seed.wrapping_add(trial as u64);
        for v in cfg.desired_indices(params.mu()) {
            reports.push(run_with_entropy(&params, v, seed, &entropy)?.report);
        }
    }
    Ok(reports)
}

pub fn cmd_simulate<W: Write>(cfg: &Config, out: W) -> Result<Vec<RateReport>> {
    let reports = simulate(cfg)?;
    write_reports(&reports, out)?;
    Ok(reports)
}

pub fn cmd_figure<W: Write>(which: Figure, out: W) -> Result<FigureData> {
    let data = figure_data(which)?;
    data.write_csv(out)?;
    Ok(data)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Invariant,
    Recovery,
}

/// Outcome of one invariant suite.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub severity: Severity,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// 0 when everything passed, 3 if any recovery failed, else 2.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else if self.checks.iter().any(|c| !c.passed && c.severity == Severity::Recovery) {
            3
        } else {
            2
        }
    }

    fn push(&mut self, name: &'static str, severity: Severity, failures: Vec<String>, ok: String) {
        let passed = failures.is_empty();
        let detail = if passed {
            ok
        } else {
            let more = if failures.len() > 3 { format!(" (+{} more)", failures.len() - 3) } else { String::new() };
            failures.iter().take(3).cloned().collect::<Vec<_>>().join("; ") + &more
        };
        self.checks.push(Check { name, passed, severity, detail });
    }
}

/// Query counts before elimination, per database and round, and the
/// database footprint.
pub fn check_query_counts(params: &SchemeParams) -> Vec<String> {
    let mut bad = Vec::new();
    let Some(im) = &params.interference else {
        return bad;
    };
    let (kappa, nu) = params.kappa_nu();
    let mu = params.mu();
    for v in 0..mu {
        let qs = match q_gen(v, mu, im, params.n) {
            Ok(qs) => qs,
            Err(e) => {
                bad.push(format!("v={}: {e}", v + 1));
                continue;
            }
        };
        for j in 0..params.n {
            let expected = if j < params.n_queried { queries_per_database(mu, kappa, nu) } else { 0 };
            if qs.count_at(j) != expected {
                bad.push(format!("v={}, database {}: {} sums, expected {expected}", v + 1, j + 1, qs.count_at(j)));
            }
            if j >= params.n_queried {
                continue;
            }
            for tau in 1..=mu {
                let want = round_count(mu, kappa, nu, tau);
                if qs.round_count(j, tau) != want {
                    bad.push(format!(
                        "v={}, database {}, round {tau}: {} sums, expected {want}",
                        v + 1,
                        j + 1,
                        qs.round_count(j, tau)
                    ));
                }
            }
        }
    }
    bad
}

/// Structural privacy checks over all desired indices for one seed.
pub fn check_privacy_shape(params: &SchemeParams, seed: u64) -> Result<Vec<String>> {
    let sets = (0..params.mu()).map(|v| build_queries(params, v, seed)).collect::<Result<Vec<_>>>()?;
    Ok(privacy_shape(&sets).violations)
}

/// Chi-square homogeneity of the randomized queries across desired indices.
pub fn check_privacy_sampled(params: &SchemeParams, trials: usize, seed: u64) -> Result<(Vec<String>, Option<f64>)> {
    let report = privacy_sampled(params.mu(), trials, seed, |v, s| build_queries(params, v, s))?;
    Ok((report.violations, report.chi_square.map(|c| c.2)))
}

/// Recovery, reconstructibility, download and rate identities over the
/// configured seeds and desired indices.
pub fn check_runs(params: &SchemeParams, cfg: &Config) -> Result<(Vec<String>, Vec<String>, Vec<String>, usize)> {
    let entropy = EntropySummary::of(params)?;
    let closed_d = params.closed_form_download();
    let (mut recovery, mut recon, mut counts) = (Vec::new(), Vec::new(), Vec::new());
    let mut runs = 0;
    for trial in 0..cfg.run.trials {
        let seed = cfg.run.seed.wrapping_add(trial as u64);
        for v in cfg.desired_indices(params.mu()) {
            runs += 1;
            let out = match run_with_entropy(params, v, seed, &entropy) {
                Ok(out) => out,
                Err(e @ (Error::Recovery(_) | Error::Structural(_))) => {
                    recovery.push(format!("v={}, seed {seed}: {e}", v + 1));
                    continue;
                }
                Err(e) => return Err(e),
            };
            let r = &out.report;
            recon.extend(out.decoded.removed_failures.iter().map(|m| format!("v={}, seed {seed}: {m}", v + 1)));
            if BigUint::from(r.d) != closed_d {
                counts.push(format!("v={}, seed {seed}: D={} but the closed form gives {closed_d}", v + 1, r.d));
            }
            if r.measured_factor != r.closed_form_factor {
                counts.push(format!(
                    "v={}, seed {seed}: rate factor {} differs from {}",
                    v + 1,
                    r.measured_factor,
                    r.closed_form_factor
                ));
            }
            let recovered: usize = out.decoded.per_round.iter().sum();
            if recovered != r.l {
                counts.push(format!("v={}, seed {seed}: rounds recovered {recovered} of {} symbols", v + 1, r.l));
            }
            if let Some(c) = r.converse {
                if r.rate_measured > c + 1e-9 {
                    counts.push(format!("v={}, seed {seed}: rate {} exceeds converse {c}", v + 1, r.rate_measured));
                }
            }
        }
    }
    Ok((recovery, recon, counts, runs))
}

/// Every invariant suite for the configured scheme.
pub fn verify(cfg: &Config) -> Result<VerifyReport> {
    let mut report = VerifyReport::default();
    let params = match cfg.scheme_params() {
        Ok(p) => p,
        Err(e @ Error::Structural(_)) => {
            report.push("rate_matrix", Severity::Invariant, vec![e.to_string()], String::new());
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    let matrix_detail = match &params.rate_matrix {
        Some(rm) => format!("kappa={}, nu={}, {} columns", rm.kappa, rm.nu, rm.n_cols()),
        None => "trivial download, no rate matrix".into(),
    };
    report.push("rate_matrix", Severity::Invariant, Vec::new(), matrix_detail);

    report.push(
        "query_counts",
        Severity::Invariant,
        check_query_counts(&params),
        format!("{} databases queried of {}", params.n_queried, params.n),
    );
    report.push(
        "privacy_shape",
        Severity::Invariant,
        check_privacy_shape(&params, cfg.run.seed)?,
        format!("{} desired indices", params.mu()),
    );
    let trials = cfg.verify.privacy_trials;
    let (violations, p) = check_privacy_sampled(&params, trials, cfg.run.seed)?;
    let detail = match p {
        Some(p) => format!("{trials} trials, p={p:.4}"),
        None => "skipped".into(),
    };
    report.push("privacy_sampled", Severity::Invariant, violations, detail);

    let (recovery, recon, counts, runs) = check_runs(&params, cfg)?;
    report.push("recovery", Severity::Recovery, recovery, format!("{runs} runs"));
    report.push("reconstructibility", Severity::Invariant, recon, format!("{runs} runs"));
    report.push("download_identity", Severity::Invariant, counts, format!("D={}", params.closed_form_download()));
    Ok(report)
}

pub fn cmd_verify<W: Write>(cfg: &Config, mut out: W) -> Result<VerifyReport> {
    let report = verify(cfg)?;
    for c in &report.checks {
        writeln!(out, "{c}")?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(text: &str) -> Config {
        Config::from_toml_str(text).unwrap()
    }

    const MOTIVATING: &str = r#"
        [scheme]
        variant = "plc"
        n = 2
        k = 1
        q = 3
        generator = [[1, 1]]
        [candidates]
        kind = "linear"
        rows = [[1, 0, 1], [0, 1, 0], [1, 1, 1], [1, 2, 1]]
        [run]
        seed = 10
        trials = 5
        [verify]
        privacy_trials = 20
    "#;

    #[test]
    fn simulate_motivating() {
        let reports = simulate(&config(MOTIVATING)).unwrap();
        assert_eq!(reports.len(), 20);
        assert!(reports.iter().all(|r| (r.d, r.l) == (24, 16)));
    }

    #[test]
    fn simulate_is_deterministic() {
        let cfg = config(MOTIVATING);
        let mut a = Vec::new();
        let mut b = Vec::new();
        cmd_simulate(&cfg, &mut a).unwrap();
        cmd_simulate(&cfg, &mut b).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn verify_motivating() {
        let report = verify(&config(MOTIVATING)).unwrap();
        assert!(report.passed(), "{:?}", report.checks);
    }

    #[test]
    fn rates_example2() {
        let text = r#"
            [scheme]
            variant = "plc"
            n = 4
            k = 2
            q = 5
            generator = [[1, 0, 1, 1], [0, 1, 1, 1]]
            rate_matrix = ["1010", "0101"]
            [candidates]
            kind = "linear"
            rows = [[1, 0], [0, 1], [1, 1], [1, 2]]
        "#;
        let rows = rates_rows(&config(text)).unwrap();
        assert!((rows[0].rate - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(rows[0].d, BigUint::from(48u32));
    }

    #[test]
    fn corrupted_matrix_fails_verify() {
        let text = MOTIVATING.replace("generator = [[1, 1]]", "generator = [[1, 1]]\nrate_matrix = [\"11\", \"01\"]");
        let report = verify(&config(&text)).unwrap();
        assert_eq!(report.exit_code(), 2);
    }
}
