//! Closed-form rates, download counts, the converse bound and figure data.
//!
//! Every rate that only depends on integers is computed as an exact
//! [`BigRational`] factor multiplying `H_min`; the `f64` wrappers convert at
//! the boundary.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::codes::star_dimension;
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::functions::{binom, monomial_count, CandidateSet, EntropyOracle};
use crate::matrices::{n_hat, nu_sys};

/// Largest minimum set whose orderings are searched exhaustively.
pub const CONVERSE_PERMUTATION_CAP: usize = 8;

/// Minimum sets examined by the converse before giving up on the rest.
pub const CONVERSE_SET_LIMIT: usize = 256;

fn rat(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn int(v: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn pow(base: &BigRational, e: usize) -> BigRational {
    num_traits::pow(base.clone(), e)
}

pub fn to_f64(r: &BigRational) -> f64 {
    // numerator and denominator can both overflow f64 for large exponents
    let (n, d) = (r.numer(), r.denom());
    let shift = d.bits().max(n.bits()).saturating_sub(1000) as usize;
    let n = (n >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (d >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

fn check_code(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("need 0 < k <= n, got n={n}, k={k}")));
    }
    Ok(())
}

/// `k~ = min(g(k-1)+1, n)`.
pub fn k_tilde(n: usize, k: usize, g: usize) -> usize {
    star_dimension(n, k, g)
}

/// `(1 - a)/(1 - a^f)` with `a = k/n`, and `1/f` at `a = 1`.
pub fn mds_pir_capacity_exact(n: usize, k: usize, f: usize) -> Result<BigRational> {
    check_code(n, k)?;
    if f == 0 {
        return Err(Error::InvalidParameter("f must be positive".into()));
    }
    if k == n {
        return Ok(rat(1, f as u64));
    }
    let a = rat(k as u64, n as u64);
    let one = BigRational::one();
    Ok((&one - &a) / (&one - pow(&a, f)))
}

pub fn mds_pir_capacity(n: usize, k: usize, f: usize) -> Result<f64> {
    mds_pir_capacity_exact(n, k, f).map(|r| to_f64(&r))
}

/// Linear computation capacity for coefficient rank `r`.
pub fn plc_capacity_exact(n: usize, k: usize, r: usize) -> Result<BigRational> {
    mds_pir_capacity_exact(n, k, r)
}

pub fn plc_capacity(n: usize, k: usize, r: usize) -> Result<f64> {
    plc_capacity_exact(n, k, r).map(|r| to_f64(&r))
}

/// Message length `k nu^mu` of the query design.
pub fn message_length(k: usize, nu: usize, mu: usize) -> BigUint {
    BigUint::from(k) * num_traits::pow(BigUint::from(nu), mu)
}

fn term(kappa: usize, nu: usize, mu: usize, tau: usize) -> BigUint {
    num_traits::pow(BigUint::from(kappa), mu - tau) * num_traits::pow(BigUint::from(nu - kappa), tau - 1)
}

/// Download of the linear scheme: `n sum_tau (C(mu,tau) - C(mu-r,tau)) kappa^{mu-tau+1} (nu-kappa)^{tau-1}`.
pub fn plc_download(n: usize, kappa: usize, nu: usize, mu: usize, r: usize) -> BigUint {
    let mut per_db = BigUint::zero();
    for tau in 1..=mu {
        let types = binom(mu as u64, tau as u64) - binom(mu.saturating_sub(r) as u64, tau as u64);
        per_db += BigUint::from(types) * BigUint::from(kappa) * term(kappa, nu, mu, tau);
    }
    BigUint::from(n) * per_db
}

/// Non-redundant τ-sum types for τ ≥ 2 in the polynomial scheme.
pub fn rho(mu: usize, tau: usize, f: usize, g: usize) -> u64 {
    let excess = mu.saturating_sub(monomial_count(f, g) as usize);
    binom(mu as u64, tau as u64) - binom(excess as u64, tau as u64)
}

/// Download of the polynomial schemes over `n_db` queried databases.
pub fn ppc_download(n_db: usize, kappa: usize, nu: usize, mu: usize, f: usize, g: usize) -> BigUint {
    let mut inner = BigUint::from(f) * num_traits::pow(BigUint::from(kappa), mu - 1);
    for tau in 2..=mu {
        inner += BigUint::from(rho(mu, tau, f, g)) * term(kappa, nu, mu, tau);
    }
    BigUint::from(n_db) * BigUint::from(kappa) * inner
}

fn check_candidates(f: usize, g: usize, mu: usize) -> Result<()> {
    if f == 0 || g == 0 {
        return Err(Error::InvalidParameter(format!("need f, g >= 1, got f={f}, g={g}")));
    }
    if mu < f {
        return Err(Error::InvalidParameter(format!("mu={mu} is below f={f}")));
    }
    Ok(())
}

/// `pre (1-a) / (1 - a^m - (m-f)(1-a) a^{mu-1})` with `m = min(mu, M(f,g))`.
fn rate_shape(pre: BigRational, a: BigRational, f: usize, g: usize, mu: usize) -> BigRational {
    let m = mu.min(monomial_count(f, g) as usize);
    let one = BigRational::one();
    let gap = &one - &a;
    let den = &one - pow(&a, m) - int((m - f) as u64) * &gap * pow(&a, mu - 1);
    pre * gap / den
}

/// Rate of the nonsystematic scheme divided by `H_min`.
pub fn ppc_rate_factor(n: usize, k: usize, g: usize, f: usize, mu: usize) -> Result<BigRational> {
    check_code(n, k)?;
    check_candidates(f, g, mu)?;
    if n <= g * (k - 1) + 1 {
        return Ok(rat(1, f as u64));
    }
    let kt = k_tilde(n, k, g);
    Ok(rate_shape(rat(k as u64, kt as u64), rat(kt as u64, n as u64), f, g, mu))
}

pub fn ppc_rate(n: usize, k: usize, g: usize, f: usize, mu: usize, h_min: f64) -> Result<f64> {
    Ok(to_f64(&ppc_rate_factor(n, k, g, f, mu)?) * h_min)
}

/// Parameters `(n_hat, kappa, nu)` of the systematic scheme.
pub fn sys_parameters(n: usize, k: usize, g: usize) -> (usize, usize, usize) {
    let kt = k_tilde(n, k, g);
    (n_hat(n, k, kt), k, nu_sys(n, k, kt))
}

/// Rate of the systematic scheme divided by `H_min`.
pub fn sys_ppc_rate_factor(n: usize, k: usize, g: usize, f: usize, mu: usize) -> Result<BigRational> {
    check_code(n, k)?;
    check_candidates(f, g, mu)?;
    if n <= g * (k - 1) + 1 {
        return Ok(rat(1, f as u64));
    }
    let (nh, kappa, nu) = sys_parameters(n, k, g);
    let pre = rat(k as u64, nh as u64) * rat(nu as u64, kappa as u64);
    Ok(rate_shape(pre, rat(kappa as u64, nu as u64), f, g, mu))
}

pub fn sys_ppc_rate(n: usize, k: usize, g: usize, f: usize, mu: usize, h_min: f64) -> Result<f64> {
    Ok(to_f64(&sys_ppc_rate_factor(n, k, g, f, mu)?) * h_min)
}

/// Rate of a linear scheme with rate-matrix ratio `kappa/nu`, rank `r`.
pub fn plc_rate_factor(kappa: usize, nu: usize, r: usize) -> BigRational {
    if kappa == nu {
        return rat(1, r as u64);
    }
    let a = rat(kappa as u64, nu as u64);
    let one = BigRational::one();
    (&one - &a) / (&one - pow(&a, r))
}

/// `(k/n) max(n - g(k-1) - 1, 0) / (g(k-1)+1)`.
pub fn ppc_rate_asymptotic_factor(n: usize, k: usize, g: usize) -> BigRational {
    let kt = g * (k.max(1) - 1) + 1;
    rat(k as u64, n as u64) * rat(n.saturating_sub(kt) as u64, kt as u64)
}

pub fn ppc_rate_asymptotic(n: usize, k: usize, g: usize, h_min: f64) -> f64 {
    to_f64(&ppc_rate_asymptotic_factor(n, k, g)) * h_min
}

/// Limit of the systematic rate as `f` grows, by the three-case formula.
pub fn sys_ppc_rate_asymptotic_factor(n: usize, k: usize, g: usize) -> BigRational {
    let kt = g * (k.max(1) - 1) + 1;
    if n <= kt {
        return BigRational::zero();
    }
    let delta = n / kt;
    let rem = n - delta * kt;
    let nh = n_hat(n, k, kt) as u64;
    if rem >= k {
        rat((delta * k) as u64, nh)
    } else if delta == 1 {
        rat((n - kt) as u64, n as u64)
    } else {
        rat((delta * k - k) as u64, nh)
    }
}

pub fn sys_ppc_rate_asymptotic(n: usize, k: usize, g: usize, h_min: f64) -> f64 {
    to_f64(&sys_ppc_rate_asymptotic_factor(n, k, g)) * h_min
}

/// Outcome of the converse computation.
#[derive(Clone, Debug, PartialEq)]
pub struct ConverseBound {
    pub value: f64,
    pub h_min: f64,
    pub r: usize,
    /// The minimum set attaining `value`, in the chosen order.
    pub order: Vec<usize>,
    /// False when the set exceeded the permutation cap and the given order was used.
    pub maximized: bool,
}

/// Upper bound on the rate of any scheme for `set` stored with an `[n,k]` code.
pub fn ppc_converse(set: &CandidateSet, n: usize, k: usize) -> Result<ConverseBound> {
    check_code(n, k)?;
    let oracle = EntropyOracle::new(set)?;
    let h_min = oracle.h_min();
    let a = k as f64 / n as f64;
    let first = oracle.minimum_sets(Some(1))?.remove(0);
    let r = first.len();
    // a minimum set whose joint entropy is |L| has unit entropy everywhere,
    // and then so does every other minimum set
    if (oracle.joint(&first) - r as f64).abs() < 1e-9 {
        let den: f64 = (0..r).map(|v| a.powi(v as i32)).sum();
        return Ok(ConverseBound { value: h_min / den, h_min, r, order: first, maximized: true });
    }
    let mut best: Option<ConverseBound> = None;
    for l in oracle.minimum_sets(Some(CONVERSE_SET_LIMIT))? {
        let cand = converse_for_set(&oracle, &l, a, h_min);
        if best.as_ref().map_or(true, |b| cand.value > b.value) {
            best = Some(cand);
        }
    }
    Ok(best.expect("at least one minimum set"))
}

fn converse_for_set(oracle: &EntropyOracle, l: &[usize], a: f64, h_min: f64) -> ConverseBound {
    let r = l.len();
    let singles: Vec<f64> = l.iter().map(|&v| oracle.single(v)).collect();
    let h_b = singles.iter().copied().fold(f64::INFINITY, f64::min);
    if r > CONVERSE_PERMUTATION_CAP {
        let sum = ordered_sum(oracle, l, a);
        return ConverseBound { value: h_min / (h_b + sum), h_min, r, order: l.to_vec(), maximized: false };
    }
    // joint entropies of every subset of L, indexed by bitmask
    let mut joint = vec![0.0; 1 << r];
    for (mask, slot) in joint.iter_mut().enumerate().skip(1) {
        let vars: Vec<usize> = (0..r).filter(|i| mask >> i & 1 == 1).map(|i| l[i]).collect();
        *slot = oracle.joint(&vars);
    }
    let mut best_sum = f64::NEG_INFINITY;
    let mut best_order = l.to_vec();
    for lead in (0..r).filter(|&i| (singles[i] - h_b).abs() < 1e-9) {
        let rest: Vec<usize> = (0..r).filter(|&i| i != lead).collect();
        for perm in permutations(&rest) {
            let mut mask = 1usize << lead;
            let mut sum = 0.0;
            for (v, &i) in perm.iter().enumerate() {
                let next = mask | 1 << i;
                sum += a.powi(v as i32 + 1) * (joint[next] - joint[mask]);
                mask = next;
            }
            if sum > best_sum + 1e-12 {
                best_sum = sum;
                best_order = std::iter::once(lead).chain(perm).map(|i| l[i]).collect();
            }
        }
    }
    ConverseBound { value: h_min / (h_b + best_sum), h_min, r, order: best_order, maximized: true }
}

fn ordered_sum(oracle: &EntropyOracle, l: &[usize], a: f64) -> f64 {
    (1..l.len()).map(|v| a.powi(v as i32) * oracle.conditional(&[l[v]], &l[..v])).sum()
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// Figures with embedded reference data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Figure {
    Fig4a,
    Fig4b,
    Fig5a,
    Fig5b,
}

impl Figure {
    pub const ALL: [Figure; 4] = [Figure::Fig4a, Figure::Fig4b, Figure::Fig5a, Figure::Fig5b];

    pub fn id(self) -> &'static str {
        match self {
            Figure::Fig4a => "fig4a",
            Figure::Fig4b => "fig4b",
            Figure::Fig5a => "fig5a",
            Figure::Fig5b => "fig5b",
        }
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.id() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown figure id {s:?}")))
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    Computed,
    Reference,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Computed => "computed",
            Source::Reference => "paper_fixture",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FigureRow {
    pub figure: Figure,
    pub x: f64,
    pub series: &'static str,
    pub value: f64,
    pub source: Source,
}

/// Largest deviation between a computed series and its reference series.
#[derive(Clone, Debug, PartialEq)]
pub struct FixtureDelta {
    pub series: &'static str,
    pub fixture: &'static str,
    pub max_abs_delta: f64,
    /// `(x, computed, reference)` for every compared point.
    pub points: Vec<(f64, f64, f64)>,
}

#[derive(Clone, Debug, Default)]
pub struct FigureData {
    pub rows: Vec<FigureRow>,
    pub deltas: Vec<FixtureDelta>,
}

impl FigureData {
    pub fn delta(&self, series: &str) -> Option<&FixtureDelta> {
        self.deltas.iter().find(|d| d.series == series)
    }

    pub fn series(&self, name: &str, source: Source) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter(|r| r.series == name && r.source == source)
            .map(|r| (r.x, r.value))
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["figure", "x", "series", "value", "source"])?;
        for r in &self.rows {
            w.write_record([r.figure.id(), &fmt_num(r.x), r.series, &fmt_num(r.value), &r.source.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn fmt_num(v: f64) -> String {
    format!("{v:.15}").trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Series names shared by computed and reference data.
pub mod series {
    pub const CONVERSE: &str = "converse";
    pub const RS_L: &str = "rs_l";
    pub const SYS_RS_L: &str = "sys_rs_l";
    pub const RS_L_ASYMPTOTIC: &str = "rs_l_asymptotic";
    pub const SYS_RS_L_ASYMPTOTIC: &str = "sys_rs_l_asymptotic";
    pub const TRIVIAL: &str = "trivial";
    pub const PPC_SCHEME: &str = "ppc_scheme";
    pub const SYS_PPC_SCHEME: &str = "sys_ppc_scheme";
}

/// Computed series compared against reference series of another name.
const COMPARISONS: [(&str, &str); 5] = [
    (series::CONVERSE, series::CONVERSE),
    (series::RS_L, series::RS_L),
    (series::SYS_RS_L, series::SYS_RS_L),
    (series::RS_L_ASYMPTOTIC, series::PPC_SCHEME),
    (series::TRIVIAL, series::TRIVIAL),
];

mod fixtures {
    pub const FIG4A_CONVERSE: [f64; 8] = [
        0.579380164285695, 0.450629016666652, 0.423725791791031, 0.416619279559735, 0.414632421594621,
        0.414068223886962, 0.41390730644965, 0.41386135300907,
    ];
    pub const FIG4A_RS_L: [f64; 8] = [
        0.38625344285713, 0.237915473653148, 0.22168944039731, 0.220738565673707, 0.220716455604713,
        0.220716253803995, 0.220716253062335, 0.220716253061218,
    ];
    pub const FIG4A_PPC_SCHEME: f64 = 0.220716253061217;
    pub const FIG4A_SYS_RS_L: [f64; 8] = [
        0.413842974489782, 0.26312498378038, 0.248958414239293, 0.248316449804179, 0.248305848852434,
        0.248305784839244, 0.248305784693995, 0.248305784693869,
    ];
    pub const FIG4A_SYS_PPC_SCHEME: f64 = 0.165537189795913;

    pub const FIG4B_CONVERSE: [f64; 8] = [
        1.0, 0.70444313178854, 0.662386825413105, 0.651277612408273, 0.64817166850409, 0.647289689791154,
        0.647038136563762, 0.64696630012092,
    ];
    pub const FIG4B_RS_L: [f64; 8] = [
        0.666666666666666, 0.422665879073124, 0.356064971634178, 0.345683730333475, 0.345048318405106,
        0.34503350636826, 0.345033371169571, 0.345033370672687,
    ];
    pub const FIG4B_PPC_SCHEME: f64 = 0.345033370671938;
    pub const FIG4B_SYS_RS_L: [f64; 8] = [
        0.714285714, 0.462098264292774, 0.39710860465152, 0.388569987168796, 0.388169210702191,
        0.388162582124122, 0.388162542096833, 0.388162542006009,
    ];
    pub const FIG4B_SYS_PPC_SCHEME: f64 = 0.258775028003953;

    /// Storage code rates of the first `f = 2` comparison, `2/n` for `n = 20..=4`.
    pub const FIG5A_ALPHA: [f64; 17] = [
        0.1, 0.105263157894737, 0.111111111111111, 0.117647058823529, 0.125, 0.133333333333333,
        0.142857142857143, 0.153846153846154, 0.166666666666667, 0.181818181818182, 0.2, 0.222222222222222,
        0.25, 0.285714285714286, 0.333333333333333, 0.4, 0.5,
    ];
    pub const FIG5A_TRIVIAL: [f64; 17] = [0.5; 17];
    pub const FIG5A_RS_L: [f64; 17] = [
        0.567442289345916, 0.562341691586083, 0.556701030927835, 0.550432656504346, 0.543429770226457,
        0.535561268209083, 0.526665021523951, 0.516539164089487, 0.504930966469428, 0.491523147681875,
        0.475918522748905, 0.457627118644068, 0.436069413392952, 0.410637933983239, 0.380952380952381,
        0.347801892042293, 0.317224287484511,
    ];
    pub const FIG5A_PPC_SCHEME: [f64; 17] = [
        0.566666666666667, 0.56140350877193, 0.555555555555556, 0.549019607843137, 0.541666666666667,
        0.533333333333333, 0.523809523809524, 0.512820512820513, 0.5, 0.484848484848485, 0.466666666666667,
        0.444444444444444, 0.416666666666667, 0.380952380952381, 0.333333333333333, 0.266666666666667,
        0.166666666666667,
    ];
    pub const FIG5A_SYS_RS_L: [f64; 17] = [
        0.600679056468906, 0.589448150394178, 0.589448150394178, 0.589448150394178, 0.573815644509732,
        0.573815644509732, 0.573815644509732, 0.550833781603012, 0.550833781603012, 0.550833781603012,
        0.514830508474576, 0.514830508474576, 0.514830508474576, 0.457142857142857, 0.457142857142857,
        0.457142857142857, 0.372699386503067,
    ];
    pub const FIG5A_SYS_PPC_SCHEME: [f64; 17] = [
        0.1, 0.105263157894737, 0.111111111111111, 0.117647058823529, 0.125, 0.133333333333333,
        0.142857142857143, 0.153846153846154, 0.166666666666667, 0.181818181818182, 0.2, 0.222222222222222,
        0.25, 0.285714285714286, 0.333333333333333, 0.4, 0.25,
    ];
}

/// Storage parameters of the message-count figures.
pub const FIG4_N: usize = 7;
pub const FIG4_K: usize = 2;
pub const FIG4_G: usize = 2;
pub const FIG4_Q: u32 = 3;
pub const FIG4_MAX_F: usize = 8;

/// Computed curves and reference data for one figure.
pub fn figure_data(which: Figure) -> Result<FigureData> {
    let mut data = FigureData::default();
    match which {
        Figure::Fig4a | Figure::Fig4b => fig4(which, &mut data)?,
        Figure::Fig5a => fig5(which, 2, 2, (4..=20).rev().collect(), &mut data)?,
        Figure::Fig5b => fig5(which, 10, 20, (40..=400).rev().collect(), &mut data)?,
    }
    compare(&mut data);
    Ok(data)
}

fn push(data: &mut FigureData, figure: Figure, x: f64, series: &'static str, value: f64, source: Source) {
    data.rows.push(FigureRow { figure, x, series, value, source });
}

fn fig4(which: Figure, data: &mut FigureData) -> Result<()> {
    let field = PrimeField::new(FIG4_Q)?;
    let (n, k, g) = (FIG4_N, FIG4_K, FIG4_G);
    for f in 1..=FIG4_MAX_F {
        let set = match which {
            Figure::Fig4a => CandidateSet::all_monomials(field, f, g)?,
            _ => CandidateSet::nonparallel_monomials(field, f, g)?,
        };
        let mu = set.mu();
        let converse = ppc_converse(&set, n, k)?;
        let h = converse.h_min;
        let x = f as f64;
        push(data, which, x, series::CONVERSE, converse.value, Source::Computed);
        push(data, which, x, series::RS_L, ppc_rate(n, k, g, f, mu, h)?, Source::Computed);
        push(data, which, x, series::SYS_RS_L, sys_ppc_rate(n, k, g, f, mu, h)?, Source::Computed);
        push(data, which, x, series::RS_L_ASYMPTOTIC, ppc_rate_asymptotic(n, k, g, h), Source::Computed);
        push(data, which, x, series::SYS_RS_L_ASYMPTOTIC, sys_ppc_rate_asymptotic(n, k, g, h), Source::Computed);
        push(data, which, x, series::TRIVIAL, h / f as f64, Source::Computed);
    }
    let (conv, rsl, ppc, sys, sysppc) = match which {
        Figure::Fig4a => (
            fixtures::FIG4A_CONVERSE,
            fixtures::FIG4A_RS_L,
            fixtures::FIG4A_PPC_SCHEME,
            fixtures::FIG4A_SYS_RS_L,
            fixtures::FIG4A_SYS_PPC_SCHEME,
        ),
        _ => (
            fixtures::FIG4B_CONVERSE,
            fixtures::FIG4B_RS_L,
            fixtures::FIG4B_PPC_SCHEME,
            fixtures::FIG4B_SYS_RS_L,
            fixtures::FIG4B_SYS_PPC_SCHEME,
        ),
    };
    for i in 0..FIG4_MAX_F {
        let x = (i + 1) as f64;
        push(data, which, x, series::CONVERSE, conv[i], Source::Reference);
        push(data, which, x, series::RS_L, rsl[i], Source::Reference);
        push(data, which, x, series::PPC_SCHEME, ppc, Source::Reference);
        push(data, which, x, series::SYS_RS_L, sys[i], Source::Reference);
        push(data, which, x, series::SYS_PPC_SCHEME, sysppc, Source::Reference);
    }
    Ok(())
}

/// Rates against the storage code rate `k/n` with `H_min = 1` and `mu = M(f,2)`.
fn fig5(which: Figure, f: usize, k: usize, ns: Vec<usize>, data: &mut FigureData) -> Result<()> {
    let g = 2;
    let mu = monomial_count(f, g) as usize;
    for &n in &ns {
        let x = k as f64 / n as f64;
        push(data, which, x, series::TRIVIAL, 1.0 / f as f64, Source::Computed);
        push(data, which, x, series::RS_L, to_f64(&ppc_rate_factor(n, k, g, f, mu)?), Source::Computed);
        push(data, which, x, series::SYS_RS_L, to_f64(&sys_ppc_rate_factor(n, k, g, f, mu)?), Source::Computed);
        push(data, which, x, series::RS_L_ASYMPTOTIC, ppc_rate_asymptotic(n, k, g, 1.0), Source::Computed);
        push(data, which, x, series::SYS_RS_L_ASYMPTOTIC, sys_ppc_rate_asymptotic(n, k, g, 1.0), Source::Computed);
    }
    if which == Figure::Fig5a {
        let tables: [(&'static str, &[f64; 17]); 5] = [
            (series::TRIVIAL, &fixtures::FIG5A_TRIVIAL),
            (series::RS_L, &fixtures::FIG5A_RS_L),
            (series::PPC_SCHEME, &fixtures::FIG5A_PPC_SCHEME),
            (series::SYS_RS_L, &fixtures::FIG5A_SYS_RS_L),
            (series::SYS_PPC_SCHEME, &fixtures::FIG5A_SYS_PPC_SCHEME),
        ];
        for (name, values) in tables {
            for (x, v) in fixtures::FIG5A_ALPHA.iter().zip(values.iter()) {
                push(data, which, *x, name, *v, Source::Reference);
            }
        }
    }
    Ok(())
}

/// Pairs computed and reference points by position along the grid; both
/// grids are emitted in the same order.
fn compare(data: &mut FigureData) {
    for (computed, fixture) in COMPARISONS {
        let ours = data.series(computed, Source::Computed);
        let theirs = data.series(fixture, Source::Reference);
        if theirs.is_empty() || ours.len() != theirs.len() {
            continue;
        }
        let points: Vec<(f64, f64, f64)> = ours.iter().zip(&theirs).map(|(&(x, a), &(_, b))| (x, a, b)).collect();
        let max_abs_delta = points.iter().map(|&(_, a, b)| (a - b).abs()).fold(0.0, f64::max);
        data.deltas.push(FixtureDelta { series: computed, fixture, max_abs_delta, points });
    }
}
