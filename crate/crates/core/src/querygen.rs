//! Query generation: the index permutation, the round-based construction of
//! signed τ-sums from a pair of interference matrices, one-time-pad signs and
//! redundancy elimination.
//!
//! Rows and candidate indices are 0-based in memory. The text format and the
//! labels `u` of the interference matrices are 1-based.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::codes::k_subsets;
use crate::error::{Error, Result};
use crate::functions::{binom, monomial_count, CandidateSet};
use crate::linalg::greedy_basis;
use crate::matrices::InterferenceMatrices;

/// Independent random streams derived from one seed.
pub mod stream {
    pub const MESSAGES: u64 = 0;
    pub const PERMUTATION: u64 = 1;
    pub const SIGNS: u64 = 2;
}

/// A ChaCha generator on stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Desired,
    Undesired,
}

/// One signed symbol `sign * U^{(cand)}_{row, j}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    pub cand: usize,
    pub row: usize,
    pub sign: i8,
}

/// A signed sum of symbols of distinct candidates, asked from database `db`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TauSum {
    pub terms: Vec<Term>,
    pub db: usize,
    pub round: usize,
    pub role: Role,
    /// Row label `u` of the rate matrix this sum was generated for.
    pub label: usize,
}

impl TauSum {
    pub fn tau(&self) -> usize {
        self.terms.len()
    }

    /// The set of candidate indices, sorted.
    pub fn sum_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.terms.iter().map(|x| x.cand).collect();
        t.sort_unstable();
        t
    }

    /// `j τ role s*v:t ...`, all indices 1-based.
    pub fn to_text(&self) -> String {
        let role = match self.role {
            Role::Desired => "D",
            Role::Undesired => "U",
        };
        let mut s = format!("{} {} {}", self.db + 1, self.tau(), role);
        for t in &self.terms {
            let sign = if t.sign < 0 { "-1" } else { "+1" };
            s.push_str(&format!(" {sign}*{}:{}", t.cand + 1, t.row + 1));
        }
        s
    }

    pub fn parse(line: &str) -> Result<TauSum> {
        let bad = || Error::Config(format!("malformed query line `{line}`"));
        let mut it = line.split_whitespace();
        let db: usize = it.next().and_then(|x| x.parse().ok()).ok_or_else(bad)?;
        let tau: usize = it.next().and_then(|x| x.parse().ok()).ok_or_else(bad)?;
        let role = match it.next() {
            Some("D") => Role::Desired,
            Some("U") => Role::Undesired,
            _ => return Err(bad()),
        };
        let mut terms = Vec::new();
        for tok in it {
            let (sign, rest) = tok.split_once('*').ok_or_else(bad)?;
            let (v, t) = rest.split_once(':').ok_or_else(bad)?;
            let sign: i8 = sign.parse().map_err(|_| bad())?;
            let cand: usize = v.parse().map_err(|_| bad())?;
            let row: usize = t.parse().map_err(|_| bad())?;
            if db == 0 || cand == 0 || row == 0 || sign.abs() != 1 {
                return Err(bad());
            }
            terms.push(Term { cand: cand - 1, row: row - 1, sign });
        }
        if terms.len() != tau {
            return Err(bad());
        }
        Ok(TauSum { terms, db: db - 1, round: tau, role, label: 0 })
    }
}

impl fmt::Display for TauSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RoundQueries {
    pub desired: Vec<TauSum>,
    pub undesired: Vec<TauSum>,
}

impl RoundQueries {
    pub fn len(&self) -> usize {
        self.desired.len() + self.undesired.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Query sets of all databases for one desired index `v`.
#[derive(Clone, Debug)]
pub struct QuerySet {
    pub v: usize,
    pub mu: usize,
    pub kappa: usize,
    pub nu: usize,
    pub beta: usize,
    /// `rounds[j][τ-1]`; databases that are not queried hold empty rounds.
    pub rounds: Vec<Vec<RoundQueries>>,
    pub permutation: Vec<usize>,
    /// One-time pad `σ_t` per row.
    pub signs: Vec<i8>,
    pub seed: Option<u64>,
    /// `removed_types[τ-1]`: types dropped in round τ.
    pub removed_types: Vec<Vec<Vec<usize>>>,
    /// The dropped sums themselves, kept so their reconstructibility can be checked.
    pub removed: Vec<TauSum>,
}

impl QuerySet {
    pub fn n_db(&self) -> usize {
        self.rounds.len()
    }

    /// Sums sent to database `j` in answer order: round by round, desired first.
    pub fn sums_at(&self, j: usize) -> impl Iterator<Item = &TauSum> {
        self.rounds[j].iter().flat_map(|r| r.desired.iter().chain(&r.undesired))
    }

    pub fn count_at(&self, j: usize) -> usize {
        self.rounds[j].iter().map(RoundQueries::len).sum()
    }

    pub fn round_count(&self, j: usize, tau: usize) -> usize {
        self.rounds[j][tau - 1].len()
    }

    /// Total number of downloaded symbols.
    pub fn total(&self) -> usize {
        (0..self.n_db()).map(|j| self.count_at(j)).sum()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for j in 0..self.n_db() {
            for s in self.sums_at(j) {
                out.push_str(&s.to_text());
                out.push('\n');
            }
        }
        out
    }
}

/// `α_1..α_μ` (index `τ-1`), the row offsets of the rounds.
pub fn alpha_offsets(mu: usize, kappa: usize, nu: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(mu);
    let mut acc = 0usize;
    for tau in 1..=mu {
        acc += binom((mu - 1) as u64, (tau - 1) as u64) as usize * instances_per_type(mu, kappa, nu, tau);
        out.push(acc);
    }
    out
}

/// `κ^{μ-τ}(ν-κ)^{τ-1}`: sums of each type generated per label in round τ.
pub fn instances_per_type(mu: usize, kappa: usize, nu: usize, tau: usize) -> usize {
    kappa.pow((mu - tau) as u32) * (nu - kappa).pow((tau - 1) as u32)
}

/// Sums per database in round τ before elimination: `C(μ,τ)κ^{μ-τ+1}(ν-κ)^{τ-1}`.
pub fn round_count(mu: usize, kappa: usize, nu: usize, tau: usize) -> usize {
    binom(mu as u64, tau as u64) as usize * kappa * instances_per_type(mu, kappa, nu, tau)
}

/// Sums per database over all rounds before elimination.
pub fn queries_per_database(mu: usize, kappa: usize, nu: usize) -> usize {
    (1..=mu).map(|t| round_count(mu, kappa, nu, t)).sum()
}

/// Uniform random permutation of `0..beta`.
pub fn index_prep<R: Rng + ?Sized>(beta: usize, rng: &mut R) -> Vec<usize> {
    let mut p: Vec<usize> = (0..beta).collect();
    p.shuffle(rng);
    p
}

/// Uniform one-time pad of signs, one per row.
pub fn random_signs<R: Rng + ?Sized>(beta: usize, rng: &mut R) -> Vec<i8> {
    (0..beta).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect()
}

fn singleton(cand: usize, row: usize, db: usize, role: Role, label: usize) -> TauSum {
    TauSum { terms: vec![Term { cand, row, sign: 1 }], db, round: 1, role, label }
}

/// Round-1 desired and undesired singletons of label `u` at database `j`.
pub fn initial_round(v: usize, mu: usize, u: usize, alpha1: usize, j: usize) -> (Vec<TauSum>, Vec<TauSum>) {
    let rows = (u - 1) * alpha1..u * alpha1;
    let desired = rows.clone().map(|t| singleton(v, t, j, Role::Desired, u)).collect();
    let undesired = rows
        .flat_map(|t| (0..mu).filter(move |&c| c != v).map(move |c| singleton(c, t, j, Role::Undesired, u)))
        .collect();
    (desired, undesired)
}

/// Rows `l·ν + u` for `l ∈ [α_{τ-1}, α_τ - 1]`, 0-based.
pub fn desired_rows(u: usize, tau: usize, alphas: &[usize], nu: usize) -> Vec<usize> {
    if tau == 1 {
        return ((u - 1) * alphas[0]..u * alphas[0]).collect();
    }
    (alphas[tau - 2]..alphas[tau - 1]).map(|l| l * nu + u - 1).collect()
}

/// Sign of the desired term and factor applied to the side information in a
/// desired sum of type `{v} ∪ s`.
///
/// The lead sign is `(-1)^pos` where `pos` counts side labels below `v`, and
/// the side factor is always `-lead`. Any other coupling makes the per-database
/// sign-cycle statistics depend on `v`.
fn desired_signs(v: usize, s: &[usize]) -> (i8, i8) {
    let pos = s.iter().filter(|&&x| x < v).count();
    let lead = if pos % 2 == 0 { 1 } else { -1 };
    (lead, -lead)
}

/// Re-coordinates sums generated for another database to database `j`.
pub fn reproduce(sums: &[TauSum], j: usize) -> Vec<TauSum> {
    sums.iter().map(|s| TauSum { db: j, ..s.clone() }).collect()
}

/// Side-information pool of database `j` for round τ: the round-(τ-1)
/// undesired sums of every label in `B_j`, re-coordinated to `j`.
pub fn exploit_si(undesired_prev: &BTreeMap<usize, Vec<TauSum>>, b_col: &[usize], j: usize) -> Result<Vec<TauSum>> {
    let mut pool = Vec::new();
    for &b in b_col {
        let donor = undesired_prev
            .get(&b)
            .ok_or_else(|| Error::Structural(format!("no donor database holds label {b}")))?;
        pool.extend(reproduce(donor, j));
    }
    Ok(pool)
}

/// Splits `pool` into `kappa` chunks holding equally many sums of every type,
/// keeping listed order inside each type. Returns `chunks[c][type]`.
pub fn partition(pool: &[TauSum], kappa: usize, types: &[Vec<usize>]) -> Result<Vec<Vec<Vec<TauSum>>>> {
    let mut chunks = vec![vec![Vec::new(); types.len()]; kappa];
    for (s, ty) in types.iter().enumerate() {
        let of_type: Vec<&TauSum> = pool.iter().filter(|x| &x.sum_type() == ty).collect();
        if of_type.len() % kappa != 0 {
            return Err(Error::Structural(format!(
                "{} side-information sums of type {:?} cannot be split into {kappa} chunks",
                of_type.len(),
                ty
            )));
        }
        let size = of_type.len() / kappa;
        for (c, chunk) in chunks.iter_mut().enumerate() {
            chunk[s] = of_type[c * size..(c + 1) * size].iter().map(|&x| x.clone()).collect();
        }
    }
    Ok(chunks)
}

/// Element-wise addition of desired symbols and side information; the
/// desired term keeps its place in ascending candidate order.
pub fn set_addition(desired: &[Term], si: &[TauSum], v: usize, eps_of: impl Fn(&[usize]) -> (i8, i8)) -> Result<Vec<Vec<Term>>> {
    if desired.len() != si.len() {
        return Err(Error::Structural(format!(
            "set addition of {} desired symbols with {} side-information sums",
            desired.len(),
            si.len()
        )));
    }
    Ok(desired
        .iter()
        .zip(si)
        .map(|(d, s)| {
            let (lead, eps) = eps_of(&s.sum_type());
            let mut terms = vec![Term { cand: v, row: d.row, sign: lead * d.sign }];
            terms.extend(s.terms.iter().map(|t| Term { sign: eps * t.sign, ..*t }));
            terms.sort_by_key(|t| t.cand);
            terms
        })
        .collect())
}

/// Undesired τ-sums of a label: one per type `T ∌ v` and instance `k`; the
/// symbol of candidate `z ∈ T` sits in the row of the `k`-th desired sum of
/// type `{v} ∪ T \ {z}`.
pub fn m_sym(
    others: &[usize],
    tau: usize,
    rows_by_type: &BTreeMap<Vec<usize>, Vec<usize>>,
    j: usize,
    u: usize,
) -> Vec<TauSum> {
    let mut out = Vec::new();
    for t in k_subsets(others.len(), tau) {
        let ty: Vec<usize> = t.iter().map(|&i| others[i]).collect();
        let m = rows_by_type.values().next().map_or(0, Vec::len);
        for k in 0..m {
            let terms = ty
                .iter()
                .enumerate()
                .map(|(pos, &z)| {
                    let rest: Vec<usize> = ty.iter().copied().filter(|&x| x != z).collect();
                    let row = rows_by_type[&rest][k];
                    Term { cand: z, row, sign: if pos % 2 == 0 { 1 } else { -1 } }
                })
                .collect();
            out.push(TauSum { terms, db: j, round: tau, role: Role::Undesired, label: u });
        }
    }
    out
}

/// The full query construction for desired index `v` (0-based) with unit
/// signs and the identity permutation. Databases `n_db > A.n_cols()` are
/// left unqueried.
pub fn q_gen(v: usize, mu: usize, im: &InterferenceMatrices, n_db: usize) -> Result<QuerySet> {
    let (kappa, nu, n_cols) = (im.kappa(), im.nu(), im.n_cols());
    if mu == 0 || v >= mu {
        return Err(Error::InvalidParameter(format!("desired index {} outside [1, {mu}]", v + 1)));
    }
    if kappa == 0 || n_cols > n_db || im.b.iter().any(|r| r.len() != n_cols) {
        return Err(Error::Dimension("interference matrices do not fit the database count".into()));
    }
    im.check_cover()?;
    let beta = nu.checked_pow(mu as u32).ok_or(Error::BudgetExceeded(u64::MAX))?;
    let alphas = alpha_offsets(mu, kappa, nu);
    let others: Vec<usize> = (0..mu).filter(|&x| x != v).collect();
    // si_types[τ-1]: the (τ-1)-subsets of the other candidates, lexicographic
    let si_types: Vec<Vec<Vec<usize>>> = (0..mu)
        .map(|s| k_subsets(others.len(), s).into_iter().map(|t| t.iter().map(|&i| others[i]).collect()).collect())
        .collect();

    // per label: desired rows grouped by side-information type, and undesired sums
    let mut rows_by_label: Vec<Vec<BTreeMap<Vec<usize>, Vec<usize>>>> = vec![Vec::new(); nu + 1];
    let mut undesired: Vec<BTreeMap<usize, Vec<TauSum>>> = vec![BTreeMap::new(); mu];
    for u in 1..=nu {
        for tau in 1..=mu {
            let rows = desired_rows(u, tau, &alphas, nu);
            let m = instances_per_type(mu, kappa, nu, tau);
            let mut by_type = BTreeMap::new();
            for (s, ty) in si_types[tau - 1].iter().enumerate() {
                let chunk = if tau == 1 { rows.clone() } else { rows[s * m..(s + 1) * m].to_vec() };
                by_type.insert(ty.clone(), chunk);
            }
            let und = if tau == 1 {
                initial_round(v, mu, u, alphas[0], usize::MAX).1
            } else {
                m_sym(&others, tau, &by_type, usize::MAX, u)
            };
            undesired[tau - 1].insert(u, und);
            rows_by_label[u].push(by_type);
        }
    }

    let mut rounds = vec![vec![RoundQueries::default(); mu]; n_db];
    for j in 0..n_cols {
        let a_col = im.a_col(j);
        for tau in 1..=mu {
            let chunks = if tau >= 2 {
                let pool = exploit_si(&undesired[tau - 2], &im.b_col(j), j)?;
                Some(partition(&pool, kappa, &si_types[tau - 1])?)
            } else {
                None
            };
            let rq = &mut rounds[j][tau - 1];
            for (c, &u) in a_col.iter().enumerate() {
                if let Some(chunks) = &chunks {
                    for (s, ty) in si_types[tau - 1].iter().enumerate() {
                        let rows = &rows_by_label[u][tau - 1][ty];
                        let desired: Vec<Term> = rows.iter().map(|&row| Term { cand: v, row, sign: 1 }).collect();
                        let sums = set_addition(&desired, &chunks[c][s], v, |t| desired_signs(v, t))?;
                        rq.desired.extend(
                            sums.into_iter().map(|terms| TauSum { terms, db: j, round: tau, role: Role::Desired, label: u }),
                        );
                    }
                } else {
                    rq.desired.extend(initial_round(v, mu, u, alphas[0], j).0);
                }
                rq.undesired.extend(reproduce(&undesired[tau - 1][&u], j));
            }
        }
    }
    Ok(QuerySet {
        v,
        mu,
        kappa,
        nu,
        beta,
        rounds,
        permutation: (0..beta).collect(),
        signs: vec![1; beta],
        seed: None,
        removed_types: vec![Vec::new(); mu],
        removed: Vec::new(),
    })
}

/// Multiplies every term by the pad `σ_t` of its row and records the pad.
pub fn assign_signs(qs: &mut QuerySet, sigma: Vec<i8>) -> Result<()> {
    if sigma.len() != qs.beta || sigma.iter().any(|s| s.abs() != 1) {
        return Err(Error::Dimension(format!("sign pad of length {} for beta={}", sigma.len(), qs.beta)));
    }
    let apply = |s: &mut TauSum| {
        for t in &mut s.terms {
            t.sign *= sigma[t.row];
        }
    };
    for db in &mut qs.rounds {
        for rq in db {
            rq.desired.iter_mut().chain(rq.undesired.iter_mut()).for_each(apply);
        }
    }
    qs.removed.iter_mut().for_each(apply);
    for (s, &p) in qs.signs.iter_mut().zip(&sigma) {
        *s *= p;
    }
    Ok(())
}

/// Which τ-sum types are redundant for a scheme.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RemovalScheme {
    None,
    /// Linear candidates: `dependent` are the indices outside a basis of `V`.
    Plc { mu: usize, dependent: Vec<usize> },
    /// Polynomial candidates: round 1 drops everything but the plain
    /// messages, later rounds drop subsets of `beyond`.
    Ppc { mu: usize, identity: Vec<usize>, beyond: Vec<usize> },
}

impl RemovalScheme {
    /// Greedy basis of the coefficient rows in index order; the rest is dependent.
    pub fn plc(set: &CandidateSet) -> RemovalScheme {
        let basis = greedy_basis(set.field, &set.coefficient_rows());
        let dependent = (0..set.mu()).filter(|i| !basis.contains(i)).collect();
        RemovalScheme::Plc { mu: set.mu(), dependent }
    }

    /// Requires the plain messages among the candidates.
    pub fn ppc(set: &CandidateSet) -> Result<RemovalScheme> {
        let identity = set
            .identity_indices()
            .ok_or_else(|| Error::InvalidParameter("candidate set lacks the plain messages".into()))?;
        let basis = greedy_basis(set.field, &set.coefficient_rows());
        let non_basis: Vec<usize> = (0..set.mu()).filter(|i| !basis.contains(i)).collect();
        let excess = set.mu().saturating_sub(monomial_count(set.f, set.g) as usize);
        let beyond = non_basis[non_basis.len() - excess.min(non_basis.len())..].to_vec();
        Ok(RemovalScheme::Ppc { mu: set.mu(), identity, beyond })
    }

    /// `removed[τ-1]`: the types dropped in round τ.
    pub fn removed_types(&self) -> Vec<Vec<Vec<usize>>> {
        let subsets = |pool: &[usize], tau: usize| -> Vec<Vec<usize>> {
            k_subsets(pool.len(), tau).into_iter().map(|s| s.iter().map(|&i| pool[i]).collect()).collect()
        };
        match self {
            RemovalScheme::None => Vec::new(),
            RemovalScheme::Plc { mu, dependent } => (1..=*mu).map(|tau| subsets(dependent, tau)).collect(),
            RemovalScheme::Ppc { mu, identity, beyond } => (1..=*mu)
                .map(|tau| {
                    if tau == 1 {
                        (0..*mu).filter(|i| !identity.contains(i)).map(|i| vec![i]).collect()
                    } else {
                        subsets(beyond, tau)
                    }
                })
                .collect(),
        }
    }

    fn mu(&self) -> Option<usize> {
        match self {
            RemovalScheme::None => None,
            RemovalScheme::Plc { mu, .. } | RemovalScheme::Ppc { mu, .. } => Some(*mu),
        }
    }
}

/// Drops every sum whose type is redundant under `scheme`, recording the
/// types and the sums.
pub fn eliminate_redundancy(qs: &mut QuerySet, scheme: &RemovalScheme) -> Result<()> {
    if let Some(mu) = scheme.mu() {
        if mu != qs.mu {
            return Err(Error::InvalidParameter(format!("removal scheme for mu={mu} applied to mu={}", qs.mu)));
        }
    }
    let types = scheme.removed_types();
    for (tau, ts) in types.iter().enumerate() {
        if ts.is_empty() {
            continue;
        }
        let set: BTreeSet<&Vec<usize>> = ts.iter().collect();
        for db in &mut qs.rounds {
            let rq = &mut db[tau];
            for list in [&mut rq.desired, &mut rq.undesired] {
                let (gone, kept): (Vec<TauSum>, Vec<TauSum>) =
                    std::mem::take(list).into_iter().partition(|s| set.contains(&s.sum_type()));
                *list = kept;
                qs.removed.extend(gone);
            }
        }
        qs.removed_types[tau] = ts.clone();
    }
    Ok(())
}

/// Outcome of the privacy checks.
#[derive(Clone, Debug, Default)]
pub struct PrivacyReport {
    pub violations: Vec<String>,
    /// `(statistic, degrees of freedom, p-value)` of the sampled test.
    pub chi_square: Option<(f64, f64, f64)>,
}

impl PrivacyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Significance level of the sampled homogeneity test.
pub const PRIVACY_SIGNIFICANCE: f64 = 0.01;

/// Structural checks: per database and round, the number of sums of every
/// type and the removed types agree across all desired indices.
pub fn privacy_shape(sets: &[QuerySet]) -> PrivacyReport {
    let mut report = PrivacyReport::default();
    let Some(first) = sets.first() else {
        return report;
    };
    let profile = |qs: &QuerySet, j: usize, tau: usize| -> BTreeMap<Vec<usize>, usize> {
        let mut m = BTreeMap::new();
        let rq = &qs.rounds[j][tau];
        for s in rq.desired.iter().chain(&rq.undesired) {
            *m.entry(s.sum_type()).or_insert(0) += 1;
        }
        m
    };
    for qs in &sets[1..] {
        if qs.n_db() != first.n_db() || qs.mu != first.mu {
            report.violations.push(format!("query sets for v={} have a different shape", qs.v + 1));
            continue;
        }
        for tau in 0..qs.mu {
            if qs.removed_types[tau] != first.removed_types[tau] {
                report
                    .violations
                    .push(format!("round {}: removed types differ between v={} and v={}", tau + 1, first.v + 1, qs.v + 1));
            }
            for j in 0..qs.n_db() {
                if profile(qs, j, tau) != profile(first, j, tau) {
                    report.violations.push(format!(
                        "database {}, round {}: type counts differ between v={} and v={}",
                        j + 1,
                        tau + 1,
                        first.v + 1,
                        qs.v + 1
                    ));
                }
            }
        }
    }
    report
}

/// Sums at database `j` whose signs, scaled so the term of the smallest
/// candidate is positive, are all positive.
fn aligned_sums(qs: &QuerySet, j: usize) -> u64 {
    qs.sums_at(j)
        .filter(|s| {
            let lead = s.terms.iter().min_by_key(|t| t.cand).map_or(1, |t| t.sign);
            s.terms.iter().all(|t| t.sign * lead == 1)
        })
        .count() as u64
}

/// Minimum pooled count per histogram bin and desired index.
const MIN_EXPECTED: u64 = 5;

/// Sampled check: trial `i` contributes one observation per desired index,
/// the pair (database, number of sign-aligned sums there) for database
/// `i mod n`. Sums of one trial share their pads, so only whole-trial
/// statistics are independent, and privacy is a per-database property.
/// The per-index histograms are compared with a chi-square homogeneity
/// test after merging adjacent sparse bins. Desired indices use disjoint
/// seed ranges; `make(v, seed)` builds the randomized query set.
pub fn privacy_sampled(
    mu: usize,
    trials: usize,
    base_seed: u64,
    make: impl Fn(usize, u64) -> Result<QuerySet>,
) -> Result<PrivacyReport> {
    let mut report = PrivacyReport::default();
    if trials == 0 || mu < 2 {
        return Ok(report);
    }
    let mut samples = vec![Vec::with_capacity(trials); mu];
    for (v, obs) in samples.iter_mut().enumerate() {
        for trial in 0..trials {
            let qs = make(v, base_seed.wrapping_add((v * trials + trial) as u64))?;
            let j = trial % qs.n_db().max(1);
            obs.push((j, aligned_sums(&qs, j)));
        }
    }
    let values: BTreeSet<(usize, u64)> = samples.iter().flatten().copied().collect();
    let column = |x: (usize, u64)| samples.iter().map(|o| o.iter().filter(|&&y| y == x).count() as u64).collect::<Vec<_>>();
    let mut bins: Vec<Vec<u64>> = Vec::new();
    let mut open: Option<Vec<u64>> = None;
    for x in values {
        let c = column(x);
        let acc = match open.take() {
            Some(mut acc) => {
                acc.iter_mut().zip(&c).for_each(|(a, b)| *a += b);
                acc
            }
            None => c,
        };
        if acc.iter().sum::<u64>() >= MIN_EXPECTED * mu as u64 {
            bins.push(acc);
        } else {
            open = Some(acc);
        }
    }
    if let Some(rest) = open {
        match bins.last_mut() {
            Some(last) => last.iter_mut().zip(&rest).for_each(|(a, b)| *a += b),
            None => bins.push(rest),
        }
    }
    let grand = (mu * trials) as f64;
    let mut stat = 0.0;
    for bin in &bins {
        let expected = bin.iter().sum::<u64>() as f64 / mu as f64;
        stat += bin.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum::<f64>();
    }
    debug_assert!(grand > 0.0);
    let df = ((mu - 1) * bins.len().saturating_sub(1)) as f64;
    let p = if df > 0.0 {
        let chi = ChiSquared::new(df).map_err(|e| Error::Structural(e.to_string()))?;
        1.0 - chi.cdf(stat)
    } else {
        1.0
    };
    if p < PRIVACY_SIGNIFICANCE {
        report.violations.push(format!("query statistics differ across desired indices (chi2={stat:.3}, df={df}, p={p:.4})"));
    }
    report.chi_square = Some((stat, df, p));
    Ok(report)
}
