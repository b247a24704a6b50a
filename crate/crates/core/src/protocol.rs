//! End-to-end simulation: messages, coded storage, answers and decoding.
//!
//! The decoder is constraint driven. Each basis candidate `b` and virtual row
//! `t` owns a block of unknowns describing the codeword of `X^(b)` at that row:
//! the message vector for linear schemes, or the values of the composite
//! polynomial at the first `d_b` evaluation points for polynomial schemes.
//! Every answer is one linear equation in these unknowns. Polynomial schemes
//! additionally close the system nonlinearly: once all plain messages of a
//! row are known, every candidate of that row is re-encoded.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::Rng;

use crate::analysis::{self, to_f64};
use crate::codes::{star_product_code, LinearCode, RSCode};
use crate::error::{Error, Result};
use crate::field::{lagrange_weights, PrimeField};
use crate::functions::{CandidateSet, EntropyOracle};
use crate::linalg::{greedy_basis, Insert, Matrix, SparseSystem};
use crate::matrices::{construct_block_cyclic, construct_sys_ppc, interference, validate, InterferenceMatrices, MatrixKind, RateMatrix};
use crate::querygen::{
    self, assign_signs, desired_rows, eliminate_redundancy, index_prep, q_gen, random_signs, stream, stream_rng,
    QuerySet, RemovalScheme, Role, RoundQueries, TauSum, Term,
};

/// Largest number of unknowns the decoder accepts.
pub const MAX_UNKNOWNS: usize = 4_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    Plc,
    Ppc,
    SysPpc,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Plc => "plc",
            Variant::Ppc => "ppc",
            Variant::SysPpc => "sysppc",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "plc" => Ok(Variant::Plc),
            "ppc" => Ok(Variant::Ppc),
            "sysppc" | "sys_ppc" | "sys-ppc" => Ok(Variant::SysPpc),
            _ => Err(Error::InvalidParameter(format!("unknown variant {s:?}"))),
        }
    }
}

/// A fully specified scheme instance.
#[derive(Clone, Debug)]
pub struct SchemeParams {
    pub variant: Variant,
    pub field: PrimeField,
    pub n: usize,
    pub k: usize,
    pub g: usize,
    pub candidates: CandidateSet,
    pub storage: LinearCode,
    /// Evaluation points for the polynomial variants.
    pub rs: Option<RSCode>,
    /// `None` on the trivial download path.
    pub rate_matrix: Option<RateMatrix>,
    pub interference: Option<InterferenceMatrices>,
    /// Databases that receive queries (`n_hat` for the systematic scheme).
    pub n_queried: usize,
    pub removal: RemovalScheme,
    /// Whether every message is downloaded and evaluated offline.
    pub trivial: bool,
}

impl SchemeParams {
    /// Linear computation with an arbitrary storage code and rate matrix.
    pub fn plc(code: LinearCode, rate_matrix: RateMatrix, candidates: CandidateSet) -> Result<Self> {
        if candidates.field != code.field {
            return Err(Error::FieldMismatch(candidates.field.order(), code.field.order()));
        }
        if candidates.g != 1 {
            return Err(Error::InvalidParameter("linear computation needs degree-1 candidates".into()));
        }
        if rate_matrix.kind != MatrixKind::Pir && rate_matrix.kind != MatrixKind::GenericPc {
            return Err(Error::InvalidParameter("linear computation needs a PIR rate matrix".into()));
        }
        let report = validate(&rate_matrix, &code, None);
        if !report.is_valid() {
            return Err(Error::Structural(format!("rate matrix: {report}")));
        }
        let im = interference(&rate_matrix);
        im.check_cover()?;
        Ok(SchemeParams {
            variant: Variant::Plc,
            field: code.field,
            n: code.n,
            k: code.k,
            g: 1,
            removal: RemovalScheme::plc(&candidates),
            candidates,
            rate_matrix: Some(rate_matrix),
            interference: Some(im),
            n_queried: code.n,
            storage: code,
            rs: None,
            trivial: false,
        })
    }

    /// Linear computation over a systematic RS code with a block-cyclic
    /// rate matrix of ratio `k/n`.
    pub fn plc_mds(field: PrimeField, n: usize, k: usize, candidates: CandidateSet) -> Result<Self> {
        let code = RSCode::default_systematic(field, n, k)?;
        let rm = construct_block_cyclic(n, k, MatrixKind::Pir)?;
        SchemeParams::plc(code.base, rm, candidates)
    }

    /// Polynomial computation over a Lagrange RS code with evaluation
    /// points `0..n` and interpolation points starting at `n` (mod q).
    pub fn ppc(field: PrimeField, n: usize, k: usize, g: usize, candidates: CandidateSet) -> Result<Self> {
        let q = field.order() as usize;
        let alpha: Vec<u32> = (0..n as u32).collect();
        let gamma: Vec<u32> = (0..k).map(|i| ((n + i) % q) as u32).collect();
        let code = RSCode::new(field, n, k, alpha, gamma)?;
        SchemeParams::ppc_with_code(code, g, candidates, None)
    }

    /// Polynomial computation over `code`; `rate_matrix` defaults to the
    /// block-cyclic matrix of ratio `k~/n`.
    pub fn ppc_with_code(code: RSCode, g: usize, candidates: CandidateSet, rate_matrix: Option<RateMatrix>) -> Result<Self> {
        let candidates = polynomial_candidates(&code, g, candidates)?;
        let (n, k) = (code.n(), code.k());
        let trivial = n <= g * (k - 1) + 1;
        let (rm, im) = if trivial {
            (None, None)
        } else {
            let star = star_product_code(&code, g)?;
            let rm = match rate_matrix {
                Some(rm) => rm,
                None => construct_block_cyclic(n, star.k(), MatrixKind::Ppc)?,
            };
            let report = validate(&rm, &code.base, Some(&star.base));
            if !report.is_valid() {
                return Err(Error::Structural(format!("rate matrix: {report}")));
            }
            let im = interference(&rm);
            im.check_cover()?;
            (Some(rm), Some(im))
        };
        Ok(SchemeParams {
            variant: Variant::Ppc,
            field: code.field(),
            n,
            k,
            g,
            removal: RemovalScheme::ppc(&candidates)?,
            candidates,
            storage: code.base.clone(),
            rs: Some(code),
            rate_matrix: rm,
            interference: im,
            n_queried: n,
            trivial,
        })
    }

    /// Systematic polynomial computation; only `n_hat` databases are queried.
    pub fn sys_ppc(field: PrimeField, n: usize, k: usize, g: usize, candidates: CandidateSet) -> Result<Self> {
        let code = RSCode::default_systematic(field, n, k)?;
        let candidates = polynomial_candidates(&code, g, candidates)?;
        let trivial = n <= g * (k - 1) + 1;
        let (rm, im, n_queried) = if trivial {
            (None, None, n)
        } else {
            let star = star_product_code(&code, g)?;
            let (rm, im) = construct_sys_ppc(n, k, star.k())?;
            let report = validate(&rm, &code.base, Some(&star.base));
            if !report.is_valid() {
                return Err(Error::Structural(format!("rate matrix: {report}")));
            }
            let cols = rm.n_cols();
            (Some(rm), Some(im), cols)
        };
        Ok(SchemeParams {
            variant: Variant::SysPpc,
            field,
            n,
            k,
            g,
            removal: RemovalScheme::ppc(&candidates)?,
            candidates,
            storage: code.base.clone(),
            rs: Some(code),
            rate_matrix: rm,
            interference: im,
            n_queried,
            trivial,
        })
    }

    pub fn f(&self) -> usize {
        self.candidates.f
    }

    pub fn mu(&self) -> usize {
        self.candidates.mu()
    }

    /// `(kappa, nu)` of the rate matrix, `(1, 1)` on the trivial path.
    pub fn kappa_nu(&self) -> (usize, usize) {
        self.rate_matrix.as_ref().map_or((1, 1), |rm| (rm.kappa, rm.nu))
    }

    /// Number of rows `beta = nu^mu` of every message.
    pub fn beta(&self) -> usize {
        if self.trivial {
            return 1;
        }
        self.kappa_nu().1.pow(self.mu() as u32)
    }

    /// Message length `L = beta k`.
    pub fn message_length(&self) -> usize {
        self.beta() * self.k
    }

    /// Closed-form download count.
    pub fn closed_form_download(&self) -> BigUint {
        if self.trivial {
            return BigUint::from(self.f() * self.k);
        }
        let (kappa, nu) = self.kappa_nu();
        match self.variant {
            Variant::Plc => analysis::plc_download(self.n, kappa, nu, self.mu(), self.rank()),
            _ => analysis::ppc_download(self.n_queried, kappa, nu, self.mu(), self.f(), self.g),
        }
    }

    /// Closed-form rate divided by `H_min`.
    pub fn closed_form_rate(&self) -> Result<BigRational> {
        match self.variant {
            Variant::Plc => {
                let (kappa, nu) = self.kappa_nu();
                if kappa * self.n == nu * self.k {
                    analysis::plc_capacity_exact(self.n, self.k, self.rank())
                } else {
                    Ok(analysis::plc_rate_factor(kappa, nu, self.rank()))
                }
            }
            Variant::Ppc => analysis::ppc_rate_factor(self.n, self.k, self.g, self.f(), self.mu()),
            Variant::SysPpc => analysis::sys_ppc_rate_factor(self.n, self.k, self.g, self.f(), self.mu()),
        }
    }

    /// Rank of the candidate coefficient rows.
    pub fn rank(&self) -> usize {
        greedy_basis(self.field, &self.candidates.coefficient_rows()).len()
    }
}

fn polynomial_candidates(code: &RSCode, g: usize, candidates: CandidateSet) -> Result<CandidateSet> {
    if candidates.field != code.field() {
        return Err(Error::FieldMismatch(candidates.field.order(), code.field().order()));
    }
    if g == 0 || candidates.g > g {
        return Err(Error::InvalidParameter(format!("candidates of degree {} exceed g={g}", candidates.g)));
    }
    if candidates.identity_indices().is_none() {
        return Err(Error::InvalidParameter("polynomial candidates must include every plain message".into()));
    }
    let mut c = candidates;
    c.g = g;
    Ok(c)
}

/// `W[m][t][l]`: `f` messages of `beta` rows with `k` symbols each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MessageStore {
    pub w: Vec<Vec<Vec<u32>>>,
}

impl MessageStore {
    /// The `f` symbols at row `t`, position `l`.
    pub fn symbols(&self, t: usize, l: usize) -> Vec<u32> {
        self.w.iter().map(|m| m[t][l]).collect()
    }
}

/// `cells[j][t][m]`: the code symbol of message `m`, row `t`, on database `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodedStore {
    pub cells: Vec<Vec<Vec<u32>>>,
}

impl CodedStore {
    pub fn column(&self, j: usize) -> &[Vec<u32>] {
        &self.cells[j]
    }
}

/// Uniform messages and their row-wise encoding.
pub fn build_store<R: Rng + ?Sized>(params: &SchemeParams, rng: &mut R) -> Result<(MessageStore, CodedStore)> {
    let (f, beta, k, n) = (params.f(), params.beta(), params.k, params.n);
    let q = params.field.order();
    let w: Vec<Vec<Vec<u32>>> =
        (0..f).map(|_| (0..beta).map(|_| (0..k).map(|_| rng.gen_range(0..q)).collect()).collect()).collect();
    let mut cells = vec![vec![vec![0u32; f]; beta]; n];
    for (m, msg) in w.iter().enumerate() {
        for (t, row) in msg.iter().enumerate() {
            for (j, c) in params.storage.encode_row(row)?.into_iter().enumerate() {
                cells[j][t][m] = c;
            }
        }
    }
    Ok((MessageStore { w }, CodedStore { cells }))
}

/// Answers of database `j`: one symbol per τ-sum.
pub fn answer<'a>(
    sums: impl IntoIterator<Item = &'a TauSum>,
    column: &[Vec<u32>],
    candidates: &CandidateSet,
    permutation: &[usize],
) -> Vec<u32> {
    let field = candidates.field;
    sums.into_iter()
        .map(|s| {
            s.terms.iter().fold(0, |acc, t| {
                let v = candidates.evaluate(t.cand, &column[permutation[t.row]]);
                field.add(acc, field.mul(field.sign(t.sign), v))
            })
        })
        .collect()
}

/// Randomized, redundancy-free queries for desired index `v` (0-based).
pub fn build_queries(params: &SchemeParams, v: usize, seed: u64) -> Result<QuerySet> {
    let mu = params.mu();
    if v >= mu {
        return Err(Error::InvalidParameter(format!("desired index {} outside [1, {mu}]", v + 1)));
    }
    let beta = params.beta();
    let perm = index_prep(beta, &mut stream_rng(seed, stream::PERMUTATION));
    let sigma = random_signs(beta, &mut stream_rng(seed, stream::SIGNS));
    let mut qs = match &params.interference {
        Some(im) => q_gen(v, mu, im, params.n)?,
        None => trivial_queries(params, v),
    };
    qs.permutation = perm;
    qs.seed = Some(seed);
    assign_signs(&mut qs, sigma)?;
    if !params.trivial {
        eliminate_redundancy(&mut qs, &params.removal)?;
    }
    Ok(qs)
}

/// Every plain message from the first `k` databases, whatever `v` is.
fn trivial_queries(params: &SchemeParams, v: usize) -> QuerySet {
    let mu = params.mu();
    let ids = params.candidates.identity_indices().expect("checked at construction");
    let mut rounds = vec![vec![RoundQueries::default(); mu]; params.n];
    for (j, db) in rounds.iter_mut().enumerate().take(params.k) {
        db[0].desired = ids
            .iter()
            .map(|&c| TauSum { terms: vec![Term { cand: c, row: 0, sign: 1 }], db: j, round: 1, role: Role::Desired, label: 1 })
            .collect();
    }
    QuerySet {
        v,
        mu,
        kappa: 1,
        nu: 1,
        beta: 1,
        rounds,
        permutation: vec![0],
        signs: vec![1],
        seed: None,
        removed_types: vec![Vec::new(); mu],
        removed: Vec::new(),
    }
}

/// Answers of every database, in the order of [`QuerySet::sums_at`].
pub fn answer_all(params: &SchemeParams, qs: &QuerySet, store: &CodedStore) -> Vec<Vec<u32>> {
    (0..qs.n_db())
        .map(|j| answer(qs.sums_at(j), store.column(j), &params.candidates, &qs.permutation))
        .collect()
}

/// Result of a successful decode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decoded {
    /// `values[s][l]`: the desired evaluation at message row `s` (original order).
    pub values: Vec<Vec<u32>>,
    /// Desired symbols of each round's rows known after that round.
    pub per_round: Vec<usize>,
    /// Rank of the assembled linear system.
    pub rank: usize,
    /// Eliminated sums checked, and those that could not be reconstructed.
    pub removed_checked: usize,
    pub removed_failures: Vec<String>,
}

/// How the unknowns relate to candidates and databases.
struct Layout {
    field: PrimeField,
    basis: Vec<usize>,
    /// `lambda[c]`: coefficients of candidate `c` over the basis.
    lambda: Vec<Vec<u32>>,
    dims: Vec<usize>,
    dmax: usize,
    /// Points whose composite values are the unknowns (polynomial variants).
    points: Vec<u32>,
    /// `eval[b][j][l]`: weight of unknown `l` of basis `b` in the symbol of database `j`.
    eval: Vec<Vec<Vec<u32>>>,
    /// `out[b][i][l]`: weight of unknown `l` of basis `b` in output position `i`.
    out: Vec<Vec<Vec<u32>>>,
}

impl Layout {
    fn new(params: &SchemeParams) -> Result<Self> {
        let field = params.field;
        let rows = params.candidates.coefficient_rows();
        let basis = greedy_basis(field, &rows);
        let lambda = rows.iter().map(|r| combination(field, &basis, &rows, r)).collect::<Result<Vec<_>>>()?;
        let (n, k) = (params.n, params.k);
        let mut dims = Vec::new();
        let mut eval = Vec::new();
        let mut out = Vec::new();
        // interpolation points: storage points first, then the rest of the field
        let points: Vec<u32> = match &params.rs {
            None => Vec::new(),
            Some(rs) => rs.alpha.iter().copied().chain((0..field.order()).filter(|x| !rs.alpha.contains(x))).collect(),
        };
        for &b in &basis {
            match &params.rs {
                None => {
                    let g = &params.storage.generator;
                    dims.push(k);
                    eval.push((0..n).map(|j| g.column(j)).collect());
                    out.push((0..k).map(|i| (0..k).map(|l| u32::from(l == i)).collect()).collect());
                }
                Some(rs) => {
                    let deg = params.candidates.functions[b].degree() as usize;
                    let d = (deg * (k - 1) + 1).min(points.len());
                    let pts = &points[..d];
                    dims.push(d);
                    eval.push(rs.alpha.iter().map(|&a| lagrange_weights(field, pts, a)).collect::<Result<_>>()?);
                    out.push(rs.gamma.iter().map(|&g| lagrange_weights(field, pts, g)).collect::<Result<_>>()?);
                }
            }
        }
        let dmax = dims.iter().copied().max().unwrap_or(1);
        Ok(Layout { field, basis, lambda, dims, dmax, points, eval, out })
    }

    fn var(&self, t: usize, b: usize, l: usize) -> usize {
        (t * self.basis.len() + b) * self.dmax + l
    }

    fn symbol(&self, cand: usize, row: usize, j: usize, coef: u32, terms: &mut Vec<(usize, u32)>) {
        let f = self.field;
        for (b, &lam) in self.lambda[cand].iter().enumerate() {
            if lam == 0 {
                continue;
            }
            let w = f.mul(coef, lam);
            for (l, &e) in self.eval[b][j].iter().enumerate() {
                if e != 0 {
                    terms.push((self.var(row, b, l), f.mul(w, e)));
                }
            }
        }
    }

    fn sum_terms(&self, s: &TauSum) -> Vec<(usize, u32)> {
        let mut terms = Vec::new();
        for t in &s.terms {
            self.symbol(t.cand, t.row, s.db, self.field.sign(t.sign), &mut terms);
        }
        terms
    }

    fn output_terms(&self, v: usize, row: usize, i: usize) -> Vec<(usize, u32)> {
        let f = self.field;
        let mut terms = Vec::new();
        for (b, &lam) in self.lambda[v].iter().enumerate() {
            if lam == 0 {
                continue;
            }
            for (l, &e) in self.out[b][i].iter().enumerate() {
                if e != 0 {
                    terms.push((self.var(row, b, l), f.mul(lam, e)));
                }
            }
        }
        terms
    }
}

/// Coefficients of `target` over the rows `basis` of `rows`.
fn combination(field: PrimeField, basis: &[usize], rows: &[Vec<u32>], target: &[u32]) -> Result<Vec<u32>> {
    let m = target.len();
    let nb = basis.len();
    let mut a = Matrix::zeros(m, nb + 1);
    for (c, &b) in basis.iter().enumerate() {
        for (i, &x) in rows[b].iter().enumerate() {
            a.set(i, c, x);
        }
    }
    for (i, &x) in target.iter().enumerate() {
        a.set(i, nb, x);
    }
    let pivots = a.rref(field);
    if pivots.last() == Some(&nb) {
        return Err(Error::Structural("candidate outside the span of the basis".into()));
    }
    let mut lambda = vec![0; nb];
    for (r, &p) in pivots.iter().enumerate() {
        lambda[p] = a.get(r, nb);
    }
    Ok(lambda)
}

/// Decodes a linear computation scheme.
pub fn decode_plc(params: &SchemeParams, qs: &QuerySet, answers: &[Vec<u32>], store: &CodedStore) -> Result<Decoded> {
    expect_variant(params, Variant::Plc)?;
    decode(params, qs, answers, store)
}

/// Decodes the nonsystematic polynomial scheme.
pub fn decode_ppc(params: &SchemeParams, qs: &QuerySet, answers: &[Vec<u32>], store: &CodedStore) -> Result<Decoded> {
    expect_variant(params, Variant::Ppc)?;
    decode(params, qs, answers, store)
}

/// Decodes the systematic polynomial scheme.
pub fn decode_sys_ppc(params: &SchemeParams, qs: &QuerySet, answers: &[Vec<u32>], store: &CodedStore) -> Result<Decoded> {
    expect_variant(params, Variant::SysPpc)?;
    decode(params, qs, answers, store)
}

fn expect_variant(params: &SchemeParams, v: Variant) -> Result<()> {
    if params.variant != v {
        return Err(Error::InvalidParameter(format!("{} decoder called on a {} scheme", v, params.variant)));
    }
    Ok(())
}

/// Solves for the desired evaluation round by round.
///
/// `store` is only used to evaluate eliminated sums for the
/// reconstructibility report; the decode itself sees nothing but answers.
pub fn decode(params: &SchemeParams, qs: &QuerySet, answers: &[Vec<u32>], store: &CodedStore) -> Result<Decoded> {
    let layout = Layout::new(params)?;
    let field = params.field;
    let (beta, k, mu) = (qs.beta, params.k, qs.mu);
    let nvars = beta * layout.basis.len() * layout.dmax;
    if nvars > MAX_UNKNOWNS {
        return Err(Error::BudgetExceeded(nvars as u64));
    }
    if answers.len() != qs.n_db() {
        return Err(Error::Dimension(format!("{} answer vectors for {} databases", answers.len(), qs.n_db())));
    }
    let mut system = SparseSystem::new(field, nvars);
    let closure = params.rs.is_some().then(|| Closure::new(params, &layout)).transpose()?;
    let mut closed = vec![false; beta];
    let mut per_round = Vec::with_capacity(mu);
    let (_, nu) = (qs.kappa, qs.nu);
    let alphas = querygen::alpha_offsets(mu, qs.kappa, nu);

    // answers arrive round by round; remember where each round starts
    let mut cursor = vec![0usize; qs.n_db()];
    for tau in 1..=mu {
        for j in 0..qs.n_db() {
            let rq = &qs.rounds[j][tau - 1];
            let got = &answers[j];
            for (s, idx) in rq.desired.iter().chain(&rq.undesired).zip(cursor[j]..) {
                let value = *got
                    .get(idx)
                    .ok_or_else(|| Error::Dimension(format!("database {} returned too few answers", j + 1)))?;
                if system.insert(&layout.sum_terms(s), value) == Insert::Inconsistent {
                    return Err(Error::Structural(format!("answer to `{s}` contradicts earlier answers")));
                }
            }
            cursor[j] += rq.len();
        }
        if let Some(cl) = &closure {
            cl.run(&layout, &mut system, &mut closed)?;
        }
        let rows: Vec<usize> = if params.trivial {
            if tau == 1 {
                vec![0]
            } else {
                Vec::new()
            }
        } else {
            (1..=nu).flat_map(|u| desired_rows(u, tau, &alphas, nu)).collect()
        };
        let known = rows
            .iter()
            .flat_map(|&t| (0..k).map(move |i| (t, i)))
            .filter(|&(t, i)| system.evaluate(&layout.output_terms(qs.v, t, i)).is_some())
            .count();
        per_round.push(known);
    }

    let mut values = vec![vec![0u32; k]; beta];
    for t in 0..beta {
        for (i, slot) in values[qs.permutation[t]].iter_mut().enumerate() {
            *slot = system.evaluate(&layout.output_terms(qs.v, t, i)).ok_or_else(|| {
                Error::Recovery(format!("desired symbol {} of virtual row {} is not determined", i + 1, t + 1))
            })?;
        }
    }

    let mut removed_failures = Vec::new();
    for s in &qs.removed {
        let truth = answer([s], store.column(s.db), &params.candidates, &qs.permutation)[0];
        match system.evaluate(&layout.sum_terms(s)) {
            Some(v) if v == truth => {}
            Some(_) => removed_failures.push(format!("`{s}` reconstructs to a wrong value")),
            None => removed_failures.push(format!("`{s}` is not in the span of the answers")),
        }
    }
    Ok(Decoded { values, per_round, rank: system.rank(), removed_checked: qs.removed.len(), removed_failures })
}

/// Re-encoding of rows whose plain messages are known.
struct Closure {
    field: PrimeField,
    /// Basis position of each plain message.
    ids: Vec<usize>,
    /// `to_alpha[l][m]`: value at interpolation point `l` from the first `k` values.
    to_alpha: Vec<Vec<u32>>,
    candidates: CandidateSet,
    k: usize,
}

impl Closure {
    fn new(params: &SchemeParams, layout: &Layout) -> Result<Self> {
        let rs = params.rs.as_ref().expect("polynomial variant");
        let ids = params
            .candidates
            .identity_indices()
            .expect("checked at construction")
            .into_iter()
            .map(|c| {
                layout
                    .basis
                    .iter()
                    .position(|&b| b == c)
                    .ok_or_else(|| Error::InvalidParameter(format!("plain message candidate {} is not in the basis", c + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        let k = params.k;
        let to_alpha = layout.points[..layout.dmax]
            .iter()
            .map(|&a| lagrange_weights(params.field, &rs.alpha[..k], a))
            .collect::<Result<_>>()?;
        Ok(Closure { field: params.field, ids, to_alpha, candidates: params.candidates.clone(), k })
    }

    fn run(&self, layout: &Layout, system: &mut SparseSystem, closed: &mut [bool]) -> Result<()> {
        let f = self.field;
        loop {
            let mut progress = false;
            for t in 0..closed.len() {
                if closed[t] {
                    continue;
                }
                let mut msgs = Vec::with_capacity(self.ids.len());
                for &b in &self.ids {
                    let vals: Option<Vec<u32>> =
                        (0..self.k).map(|l| system.evaluate(&[(layout.var(t, b, l), 1)])).collect();
                    match vals {
                        Some(v) => msgs.push(v),
                        None => break,
                    }
                }
                if msgs.len() < self.ids.len() {
                    continue;
                }
                for (b, &cand) in layout.basis.iter().enumerate() {
                    for l in 0..layout.dims[b] {
                        let point: Vec<u32> = msgs
                            .iter()
                            .map(|m| m.iter().zip(&self.to_alpha[l]).fold(0, |acc, (&x, &w)| f.add(acc, f.mul(x, w))))
                            .collect();
                        let value = self.candidates.evaluate(cand, &point);
                        if system.insert(&[(layout.var(t, b, l), 1)], value) == Insert::Inconsistent {
                            return Err(Error::Structural(format!("re-encoding row {} contradicts the answers", t + 1)));
                        }
                    }
                }
                closed[t] = true;
                progress = true;
            }
            if !progress {
                return Ok(());
            }
        }
    }
}

/// Whether `decoded[s][l] = phi_v(W[.][s][l])` everywhere.
pub fn verify_recovery(decoded: &[Vec<u32>], messages: &MessageStore, candidates: &CandidateSet, v: usize) -> bool {
    recovery_mismatches(decoded, messages, candidates, v).is_empty()
}

/// `(row, position, decoded, expected)` for every wrong symbol.
pub fn recovery_mismatches(
    decoded: &[Vec<u32>],
    messages: &MessageStore,
    candidates: &CandidateSet,
    v: usize,
) -> Vec<(usize, usize, u32, u32)> {
    let mut out = Vec::new();
    let beta = messages.w.first().map_or(0, Vec::len);
    if decoded.len() != beta {
        out.push((decoded.len(), 0, 0, 0));
        return out;
    }
    for (s, row) in decoded.iter().enumerate() {
        for (l, &x) in row.iter().enumerate() {
            let expected = candidates.evaluate(v, &messages.symbols(s, l));
            if x != expected {
                out.push((s, l, x, expected));
            }
        }
    }
    out
}

/// One simulated retrieval.
#[derive(Clone, Debug, PartialEq)]
pub struct RateReport {
    pub variant: Variant,
    pub n: usize,
    pub k: usize,
    pub q: u32,
    pub g: usize,
    pub f: usize,
    pub mu: usize,
    /// 1-based desired index.
    pub v: usize,
    pub seed: u64,
    pub l: usize,
    pub h_min: f64,
    pub d: usize,
    pub rate_measured: f64,
    pub rate_closed_form: f64,
    pub converse: Option<f64>,
    /// `L/D` and the closed-form factor, exact.
    pub measured_factor: BigRational,
    pub closed_form_factor: BigRational,
}

pub const RATE_REPORT_HEADER: [&str; 15] =
    ["variant", "n", "k", "q", "g", "f", "mu", "v", "seed", "L", "Hmin", "D", "rate_measured", "rate_closed_form", "converse"];

impl RateReport {
    pub fn record(&self) -> Vec<String> {
        vec![
            self.variant.to_string(),
            self.n.to_string(),
            self.k.to_string(),
            self.q.to_string(),
            self.g.to_string(),
            self.f.to_string(),
            self.mu.to_string(),
            self.v.to_string(),
            self.seed.to_string(),
            self.l.to_string(),
            format!("{:.9}", self.h_min),
            self.d.to_string(),
            format!("{:.9}", self.rate_measured),
            format!("{:.9}", self.rate_closed_form),
            self.converse.map_or_else(String::new, |c| format!("{c:.9}")),
        ]
    }
}

pub fn write_reports<W: Write>(reports: &[RateReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RATE_REPORT_HEADER)?;
    for r in reports {
        w.write_record(r.record())?;
    }
    w.flush()?;
    Ok(())
}

/// Entropy terms shared by every run of a scheme.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropySummary {
    pub h_min: f64,
    pub converse: Option<f64>,
}

impl EntropySummary {
    pub fn of(params: &SchemeParams) -> Result<Self> {
        EntropySummary::for_set(&params.candidates, params.n, params.k)
    }

    /// The converse is left out when its enumeration is over budget.
    pub fn for_set(set: &CandidateSet, n: usize, k: usize) -> Result<Self> {
        let h_min = EntropyOracle::new(set)?.h_min();
        let converse = analysis::ppc_converse(set, n, k).ok().map(|c| c.value);
        Ok(EntropySummary { h_min, converse })
    }
}

/// Everything a run produces.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub report: RateReport,
    pub decoded: Decoded,
    pub queries: QuerySet,
    pub messages: MessageStore,
}

/// Store, query, answer, decode and verify for desired index `v` (0-based).
pub fn run_end_to_end(params: &SchemeParams, v: usize, seed: u64) -> Result<RunOutcome> {
    let entropy = EntropySummary::of(params)?;
    run_with_entropy(params, v, seed, &entropy)
}

/// [`run_end_to_end`] with precomputed entropy terms.
pub fn run_with_entropy(params: &SchemeParams, v: usize, seed: u64, entropy: &EntropySummary) -> Result<RunOutcome> {
    let (messages, store) = build_store(params, &mut stream_rng(seed, stream::MESSAGES))?;
    let qs = build_queries(params, v, seed)?;
    let answers = answer_all(params, &qs, &store);
    let decoded = match params.variant {
        Variant::Plc => decode_plc(params, &qs, &answers, &store)?,
        Variant::Ppc => decode_ppc(params, &qs, &answers, &store)?,
        Variant::SysPpc => decode_sys_ppc(params, &qs, &answers, &store)?,
    };
    let bad = recovery_mismatches(&decoded.values, &messages, &params.candidates, v);
    if !bad.is_empty() {
        let shown: Vec<String> =
            bad.iter().take(5).map(|(s, l, got, want)| format!("row {} pos {}: got {got}, want {want}", s + 1, l + 1)).collect();
        return Err(Error::Recovery(format!("{} wrong symbols ({})", bad.len(), shown.join("; "))));
    }
    let d = answers.iter().map(Vec::len).sum::<usize>();
    let l = params.message_length();
    let measured_factor = BigRational::new(BigInt::from(l), BigInt::from(d.max(1)));
    let closed_form_factor = params.closed_form_rate()?;
    let report = RateReport {
        variant: params.variant,
        n: params.n,
        k: params.k,
        q: params.field.order(),
        g: params.g,
        f: params.f(),
        mu: params.mu(),
        v: v + 1,
        seed,
        l,
        h_min: entropy.h_min,
        d,
        rate_measured: to_f64(&measured_factor) * entropy.h_min,
        rate_closed_form: to_f64(&closed_form_factor) * entropy.h_min,
        converse: entropy.converse,
        measured_factor,
        closed_form_factor,
    };
    Ok(RunOutcome { report, decoded, queries: qs, messages })
}

/// Measured download of the query design without simulating storage.
pub fn measured_download(params: &SchemeParams, v: usize, seed: u64) -> Result<usize> {
    Ok(build_queries(params, v, seed)?.total())
}

/// Closed-form download as a machine integer, when it fits.
pub fn closed_form_download_usize(params: &SchemeParams) -> Option<usize> {
    params.closed_form_download().to_usize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::example_code;
    use crate::matrices::{construct_mds_cyclic, example_pir_matrix};

    fn fld(q: u32) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    fn motivating() -> SchemeParams {
        let f = fld(3);
        let code = LinearCode::new(f, Matrix::from_rows(&[vec![1, 1]]).unwrap()).unwrap();
        let set = CandidateSet::linear(f, &[vec![1, 0, 1], vec![0, 1, 0], vec![1, 1, 1], vec![1, 2, 1]]).unwrap();
        SchemeParams::plc(code, construct_mds_cyclic(2, 1, MatrixKind::Pir).unwrap(), set).unwrap()
    }

    #[test]
    fn motivating_example_end_to_end() {
        let p = motivating();
        for v in 0..4 {
            let out = run_end_to_end(&p, v, 7).unwrap();
            assert_eq!((out.report.d, out.report.l), (24, 16));
            assert_eq!(out.report.measured_factor, out.report.closed_form_factor);
            assert!(out.decoded.removed_failures.is_empty());
        }
    }

    #[test]
    fn example2_end_to_end() {
        let f = fld(5);
        let set = CandidateSet::linear(f, &[vec![1, 0], vec![0, 1], vec![1, 1], vec![1, 2]]).unwrap();
        let p = SchemeParams::plc(example_code(f), example_pir_matrix(), set).unwrap();
        for v in 0..4 {
            let out = run_end_to_end(&p, v, 3).unwrap();
            assert_eq!((out.report.d, out.report.l), (48, 32));
        }
    }

    #[test]
    fn example3_end_to_end() {
        let f = fld(5);
        let set = CandidateSet::nonparallel_monomials(f, 2, 2).unwrap();
        let p = SchemeParams::ppc(f, 4, 2, 2, set).unwrap();
        for v in 0..3 {
            let out = run_end_to_end(&p, v, 11).unwrap();
            assert_eq!((out.report.d, out.report.l), (336, 128));
            assert!(out.decoded.removed_failures.is_empty(), "{:?}", out.decoded.removed_failures);
        }
    }

    #[test]
    fn example4_end_to_end() {
        let f = fld(5);
        let set = CandidateSet::nonparallel_monomials(f, 2, 2).unwrap();
        let p = SchemeParams::sys_ppc(f, 4, 2, 2, set).unwrap();
        assert_eq!(p.n_queried, 4);
        let out = run_end_to_end(&p, 0, 5).unwrap();
        assert_eq!((out.report.d, out.report.l), (120, 54));
        assert_eq!(out.decoded.per_round, vec![24, 24, 6]);
    }

    #[test]
    fn trivial_path() {
        let f = fld(5);
        let set = CandidateSet::all_monomials(f, 2, 2).unwrap();
        let p = SchemeParams::ppc(f, 3, 2, 2, set).unwrap();
        assert!(p.trivial);
        let out = run_end_to_end(&p, 4, 1).unwrap();
        assert_eq!((out.report.d, out.report.l), (4, 2));
        assert_eq!(out.report.measured_factor, BigRational::new(1.into(), 2.into()));
    }

    #[test]
    fn corrupted_answer_is_caught() {
        let p = motivating();
        let (messages, store) = build_store(&p, &mut stream_rng(9, stream::MESSAGES)).unwrap();
        let qs = build_queries(&p, 0, 9).unwrap();
        let mut answers = answer_all(&p, &qs, &store);
        answers[1][0] = p.field.add(answers[1][0], 1);
        match decode_plc(&p, &qs, &answers, &store) {
            Err(Error::Structural(_)) => {}
            Ok(d) => assert!(!verify_recovery(&d.values, &messages, &p.candidates, 0)),
            Err(e) => panic!("unexpected error {e}"),
        }
    }
}
