//! Candidate function sets, monomial counting, exact entropies and the
//! effective rank.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::codes::Combinations;
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::linalg::Matrix;

/// Largest `q^f` the enumeration-based routines accept.
pub const ENUMERATION_BUDGET: u64 = 10_000_000;

/// Tolerance used when comparing entropies.
pub const ENTROPY_EPS: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub exponents: Vec<u32>,
}

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial { exponents }
    }

    /// The monomial `w_v` (0-based `v`) in `f` variables.
    pub fn variable(f: usize, v: usize) -> Self {
        let mut e = vec![0; f];
        e[v] = 1;
        Monomial { exponents: e }
    }

    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }

    pub fn eval(&self, field: PrimeField, w: &[u32]) -> u32 {
        self.exponents
            .iter()
            .zip(w)
            .fold(1 % field.order(), |acc, (&e, &x)| field.mul(acc, field.pow(x, e as u64)))
    }

    /// Whether every exponent shares a common factor above one.
    pub fn is_parallel(&self) -> bool {
        let g = self.exponents.iter().fold(0u32, |a, &b| gcd(a, b));
        g > 1
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// A multivariate polynomial with no constant term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateFunction {
    pub terms: BTreeMap<Monomial, u32>,
}

impl CandidateFunction {
    pub fn new(field: PrimeField, terms: impl IntoIterator<Item = (Monomial, u32)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (m, c) in terms {
            if m.degree() == 0 {
                return Err(Error::InvalidParameter("constant terms are not allowed".into()));
            }
            let e: &mut u32 = map.entry(m).or_insert(0);
            *e = field.add(*e, c % field.order());
        }
        map.retain(|_, c| *c != 0);
        if map.is_empty() {
            return Err(Error::InvalidParameter("candidate function is identically zero".into()));
        }
        Ok(CandidateFunction { terms: map })
    }

    pub fn monomial(field: PrimeField, m: Monomial) -> Result<Self> {
        CandidateFunction::new(field, [(m, 1)])
    }

    /// Linear function with coefficient row `v` over `f = v.len()` messages.
    pub fn linear(field: PrimeField, v: &[u32]) -> Result<Self> {
        let f = v.len();
        CandidateFunction::new(field, v.iter().enumerate().map(|(i, &c)| (Monomial::variable(f, i), c)))
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn num_vars(&self) -> usize {
        self.terms.keys().next().map_or(0, |m| m.exponents.len())
    }

    pub fn eval(&self, field: PrimeField, w: &[u32]) -> u32 {
        self.terms
            .iter()
            .fold(0, |acc, (m, &c)| field.add(acc, field.mul(c, m.eval(field, w))))
    }

    /// `Some(v)` when the function is exactly the message `w_v`.
    pub fn as_identity(&self) -> Option<usize> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, &c) = self.terms.iter().next()?;
        if c != 1 || m.degree() != 1 {
            return None;
        }
        m.exponents.iter().position(|&e| e == 1)
    }

    /// Coefficients scaled so the first nonzero one equals 1.
    fn normalized(&self, field: PrimeField) -> Vec<(Monomial, u32)> {
        let first = *self.terms.values().next().expect("nonzero function");
        let inv = field.inv(first).expect("nonzero coefficient");
        self.terms.iter().map(|(m, &c)| (m.clone(), field.mul(c, inv))).collect()
    }
}

#[derive(Clone, Debug)]
pub struct CandidateSet {
    pub field: PrimeField,
    pub f: usize,
    pub g: usize,
    pub functions: Vec<CandidateFunction>,
    pub includes_identity_messages: bool,
}

impl CandidateSet {
    pub fn new(field: PrimeField, f: usize, functions: Vec<CandidateFunction>) -> Result<Self> {
        if functions.is_empty() {
            return Err(Error::InvalidParameter("candidate set must not be empty".into()));
        }
        if f == 0 {
            return Err(Error::InvalidParameter("need at least one message".into()));
        }
        for (i, func) in functions.iter().enumerate() {
            if func.terms.keys().any(|m| m.exponents.len() != f) {
                return Err(Error::Dimension(format!("candidate {} is not over {f} variables", i + 1)));
            }
        }
        let normals: Vec<_> = functions.iter().map(|p| p.normalized(field)).collect();
        for i in 0..normals.len() {
            for j in 0..i {
                if normals[i] == normals[j] {
                    return Err(Error::InvalidParameter(format!(
                        "candidates {} and {} are scalar multiples",
                        j + 1,
                        i + 1
                    )));
                }
            }
        }
        let g = functions.iter().map(|p| p.degree() as usize).max().unwrap_or(1);
        let mut seen = vec![false; f];
        for p in &functions {
            if let Some(v) = p.as_identity() {
                seen[v] = true;
            }
        }
        let includes_identity_messages = seen.iter().all(|&b| b);
        Ok(CandidateSet { field, f, g, functions, includes_identity_messages })
    }

    pub fn mu(&self) -> usize {
        self.functions.len()
    }

    /// Candidate indices (0-based) of the plain messages `w_1..w_f`, if all present.
    pub fn identity_indices(&self) -> Option<Vec<usize>> {
        let mut idx = vec![None; self.f];
        for (i, p) in self.functions.iter().enumerate() {
            if let Some(v) = p.as_identity() {
                idx[v].get_or_insert(i);
            }
        }
        idx.into_iter().collect()
    }

    /// Coefficient rows over the monomials of degree `1..=g`, in [`monomials`] order.
    pub fn coefficient_rows(&self) -> Vec<Vec<u32>> {
        let basis = monomials(self.f, self.g);
        self.functions
            .iter()
            .map(|p| basis.iter().map(|m| p.terms.get(m).copied().unwrap_or(0)).collect())
            .collect()
    }

    /// The set `V` of linear functions with coefficient rows `rows`.
    pub fn linear(field: PrimeField, rows: &[Vec<u32>]) -> Result<Self> {
        let f = rows.first().map_or(0, |r| r.len());
        let functions = rows.iter().map(|r| CandidateFunction::linear(field, r)).collect::<Result<_>>()?;
        CandidateSet::new(field, f, functions)
    }

    /// All monomials of degree 1..=g, messages first, then by degree.
    pub fn all_monomials(field: PrimeField, f: usize, g: usize) -> Result<Self> {
        let functions = monomials(f, g)
            .into_iter()
            .map(|m| CandidateFunction::monomial(field, m))
            .collect::<Result<_>>()?;
        let mut s = CandidateSet::new(field, f, functions)?;
        s.g = g;
        Ok(s)
    }

    /// Monomials of degree 1..=g that are not a power of another monomial.
    pub fn nonparallel_monomials(field: PrimeField, f: usize, g: usize) -> Result<Self> {
        let functions = monomials(f, g)
            .into_iter()
            .filter(|m| !m.is_parallel())
            .map(|m| CandidateFunction::monomial(field, m))
            .collect::<Result<_>>()?;
        let mut s = CandidateSet::new(field, f, functions)?;
        s.g = g;
        Ok(s)
    }

    pub fn evaluate(&self, v: usize, w: &[u32]) -> u32 {
        self.functions[v].eval(self.field, w)
    }

    fn enumeration_size(&self) -> Result<u64> {
        let size = (self.field.order() as u64).checked_pow(self.f as u32).unwrap_or(u64::MAX);
        if size > ENUMERATION_BUDGET {
            return Err(Error::BudgetExceeded(size));
        }
        Ok(size)
    }

    /// Evaluation table: `table[v][x]` is candidate `v` at the `x`-th message
    /// vector (base-q digits, least significant first).
    pub fn evaluation_table(&self) -> Result<Vec<Vec<u32>>> {
        let size = self.enumeration_size()? as usize;
        let q = self.field.order();
        let mut w = vec![0u32; self.f];
        let mut table = vec![Vec::with_capacity(size); self.mu()];
        for _ in 0..size {
            for (v, col) in table.iter_mut().enumerate() {
                col.push(self.evaluate(v, &w));
            }
            for d in w.iter_mut() {
                *d += 1;
                if *d < q {
                    break;
                }
                *d = 0;
            }
        }
        Ok(table)
    }
}

/// Exponent vectors of degree 1..=g: the f variables first, then by degree,
/// lexicographically descending within a degree.
pub fn monomials(f: usize, g: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    for d in 1..=g as u32 {
        let mut level = Vec::new();
        let mut cur = vec![0u32; f];
        fn rec(pos: usize, left: u32, cur: &mut Vec<u32>, level: &mut Vec<Vec<u32>>) {
            if pos + 1 == cur.len() {
                cur[pos] = left;
                level.push(cur.clone());
                return;
            }
            for e in (0..=left).rev() {
                cur[pos] = e;
                rec(pos + 1, left - e, cur, level);
            }
        }
        rec(0, d, &mut cur, &mut level);
        out.extend(level.into_iter().map(Monomial::new));
    }
    out
}

pub(crate) fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// `M(m,g) = C(g+m, g) - 1`.
pub fn monomial_count(m: usize, g: usize) -> u64 {
    binom((g + m) as u64, g as u64) - 1
}

/// `mu(m,g) = (q^M - 1)/(q - 1)`, the number of polynomials up to scaling.
pub fn polynomial_count(m: usize, g: usize, q: u32) -> BigUint {
    let big_m = monomial_count(m, g) as u32;
    let qb = BigUint::from(q);
    (num_traits::pow(qb.clone(), big_m as usize) - BigUint::one()) / (qb - BigUint::one())
}

/// `mu(m,g)` as a machine integer when it fits.
pub fn polynomial_count_u64(m: usize, g: usize, q: u32) -> Option<u64> {
    polynomial_count(m, g, q).to_u64()
}

fn primes_up_to(g: usize) -> Vec<u64> {
    (2..=g as u64).filter(|&p| (2..p).all(|d| p % d != 0)).collect()
}

/// Number of nonparallel monomials in `f` variables of degree 1..=g, by
/// inclusion-exclusion over products of primes not exceeding `g`.
pub fn nonparallel_count(f: usize, g: usize) -> u64 {
    let primes = primes_up_to(g);
    let mut total = monomial_count(f, g) as i64;
    for mask in 1u64..(1 << primes.len()) {
        let chosen: Vec<u64> = primes
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &p)| p)
            .collect();
        let prod: u64 = chosen.iter().product();
        if prod > g as u64 {
            continue;
        }
        let reduced = g as u64 / prod;
        let term = binom(reduced + f as u64, reduced) as i64 - 1;
        if chosen.len() % 2 == 1 {
            total -= term;
        } else {
            total += term;
        }
    }
    total as u64
}

/// The `mu x f` coefficient matrix of a linear candidate set.
pub fn linear_map(set: &CandidateSet) -> Result<Matrix> {
    let mut v = Matrix::zeros(set.mu(), set.f);
    for (i, p) in set.functions.iter().enumerate() {
        for (m, &c) in &p.terms {
            if m.degree() != 1 {
                return Err(Error::InvalidParameter(format!("candidate {} is not linear", i + 1)));
            }
            let j = m.exponents.iter().position(|&e| e == 1).expect("degree one");
            v.set(i, j, c);
        }
    }
    Ok(v)
}

/// Empirical distribution of a tuple of candidates under uniform messages.
#[derive(Clone, Debug)]
pub struct DistributionTable {
    pub support: HashMap<Vec<u32>, f64>,
    pub entropy_q: f64,
}

/// Exact entropy engine over an enumerated candidate set.
pub struct EntropyOracle<'a> {
    set: &'a CandidateSet,
    table: Vec<Vec<u32>>,
    size: usize,
}

impl<'a> EntropyOracle<'a> {
    pub fn new(set: &'a CandidateSet) -> Result<Self> {
        let table = set.evaluation_table()?;
        let size = table[0].len();
        Ok(EntropyOracle { set, table, size })
    }

    pub fn set(&self) -> &CandidateSet {
        self.set
    }

    /// Callers guarantee `q^|vars|` fits in a u64 key.
    fn counts(&self, vars: &[usize]) -> HashMap<u64, u64> {
        let q = self.set.field.order() as u64;
        let mut counts: HashMap<u64, u64> = HashMap::new();
        for x in 0..self.size {
            let key = vars.iter().fold(0u64, |acc, &v| acc * q + self.table[v][x] as u64);
            *counts.entry(key).or_insert(0) += 1;
        }
        counts
    }

    /// Joint entropy in q-ary units.
    pub fn joint(&self, vars: &[usize]) -> f64 {
        if vars.is_empty() {
            return 0.0;
        }
        let q = self.set.field.order() as f64;
        let total = self.size as f64;
        let counts = if (vars.len() as f64) * q.log2() < 63.0 {
            self.counts(vars)
        } else {
            self.counts_wide(vars)
        };
        -counts
            .values()
            .map(|&c| {
                let p = c as f64 / total;
                p * p.log(q)
            })
            .sum::<f64>()
    }

    fn counts_wide(&self, vars: &[usize]) -> HashMap<u64, u64> {
        let mut ids: HashMap<Vec<u32>, u64> = HashMap::new();
        let mut counts = HashMap::new();
        for x in 0..self.size {
            let key: Vec<u32> = vars.iter().map(|&v| self.table[v][x]).collect();
            let next = ids.len() as u64;
            let id = *ids.entry(key).or_insert(next);
            *counts.entry(id).or_insert(0) += 1;
        }
        counts
    }

    /// `H(X_vars | X_given)`.
    pub fn conditional(&self, vars: &[usize], given: &[usize]) -> f64 {
        let both: Vec<usize> = given.iter().chain(vars).copied().collect();
        self.joint(&both) - self.joint(given)
    }

    pub fn single(&self, v: usize) -> f64 {
        self.joint(&[v])
    }

    pub fn distribution(&self, vars: &[usize]) -> DistributionTable {
        let total = self.size as f64;
        let mut support: HashMap<Vec<u32>, f64> = HashMap::new();
        for x in 0..self.size {
            let key: Vec<u32> = vars.iter().map(|&v| self.table[v][x]).collect();
            *support.entry(key).or_insert(0.0) += 1.0 / total;
        }
        DistributionTable { support, entropy_q: self.joint(vars) }
    }

    pub fn h_min(&self) -> f64 {
        (0..self.set.mu()).map(|v| self.single(v)).fold(f64::INFINITY, f64::min)
    }

    pub fn h_max(&self) -> f64 {
        (0..self.set.mu()).map(|v| self.single(v)).fold(0.0, f64::max)
    }

    pub fn full(&self) -> f64 {
        let all: Vec<usize> = (0..self.set.mu()).collect();
        self.joint(&all)
    }

    /// Effective rank and the lexicographically first minimum set.
    pub fn effective_rank(&self) -> Result<(usize, Vec<usize>)> {
        let sets = self.minimum_sets(Some(1))?;
        Ok((sets[0].len(), sets[0].clone()))
    }

    /// Minimum sets `L` in lexicographic order, at most `limit` of them.
    ///
    /// Each candidate has entropy at most one q-ary unit, so no set smaller
    /// than the full joint entropy can attain it and the search starts there.
    pub fn minimum_sets(&self, limit: Option<usize>) -> Result<Vec<Vec<usize>>> {
        let mu = self.set.mu();
        let target = self.full();
        let start = ((target - ENTROPY_EPS).ceil().max(1.0)) as usize;
        let mut evaluations = 0u64;
        for s in start..=mu {
            let mut found = Vec::new();
            for sub in Combinations::new(mu, s) {
                evaluations += 1;
                if evaluations * self.size as u64 > 50 * ENUMERATION_BUDGET {
                    return Err(Error::BudgetExceeded(evaluations * self.size as u64));
                }
                if (self.joint(&sub) - target).abs() < 1e-7 {
                    found.push(sub);
                    if limit.is_some_and(|l| found.len() >= l) {
                        return Ok(found);
                    }
                }
            }
            if !found.is_empty() {
                return Ok(found);
            }
        }
        unreachable!("the full set always attains the joint entropy")
    }
}

/// Shorthand for a single function's entropy.
pub fn entropy(set: &CandidateSet, vars: &[usize], given: &[usize]) -> Result<f64> {
    let oracle = EntropyOracle::new(set)?;
    Ok(oracle.conditional(vars, given))
}

pub fn effective_rank(set: &CandidateSet) -> Result<(usize, Vec<usize>)> {
    EntropyOracle::new(set)?.effective_rank()
}

pub fn h_min_b(set: &CandidateSet, l: &[usize]) -> Result<f64> {
    let oracle = EntropyOracle::new(set)?;
    Ok(l.iter().map(|&v| oracle.single(v)).fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u32) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    #[test]
    fn counts() {
        assert_eq!(monomial_count(2, 2), 5);
        assert_eq!(monomial_count(1, 1), 1);
        assert_eq!(monomial_count(6, 1), 6);
        assert_eq!(polynomial_count(1, 1, 2), BigUint::from(1u32));
        assert_eq!(polynomial_count(2, 2, 3), BigUint::from(121u32));
        assert_eq!(polynomial_count(1, 1, 5), BigUint::from(1u32));
        assert_eq!(nonparallel_count(2, 2), 3);
        assert_eq!(nonparallel_count(5, 1), 5);
    }

    #[test]
    fn counts_match_brute_force() {
        for fv in 1..=5 {
            for g in 1..=5 {
                let ms = monomials(fv, g);
                assert_eq!(ms.len() as u64, monomial_count(fv, g));
                let np = ms.iter().filter(|m| !m.is_parallel()).count() as u64;
                assert_eq!(np, nonparallel_count(fv, g), "f={fv} g={g}");
            }
        }
    }

    #[test]
    fn monomial_order_starts_with_messages() {
        let ms = monomials(2, 2);
        let e: Vec<Vec<u32>> = ms.into_iter().map(|m| m.exponents).collect();
        assert_eq!(e, vec![vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]);
    }

    #[test]
    fn evaluation_examples() {
        let fld = f(3);
        let xy = CandidateFunction::monomial(fld, Monomial::new(vec![1, 1])).unwrap();
        assert_eq!(xy.eval(fld, &[2, 2]), 1);
        let f5 = f(5);
        let p = CandidateFunction::linear(f5, &[2, 1, 0, 1]).unwrap();
        assert_eq!(p.eval(f5, &[1, 1, 0, 1]), 4);
        let id = CandidateFunction::linear(f5, &[1, 0]).unwrap();
        assert_eq!(id.eval(f5, &[3, 4]), 3);
        assert_eq!(id.as_identity(), Some(0));
    }

    #[test]
    fn scalar_duplicates_rejected() {
        let fld = f(5);
        assert!(CandidateSet::linear(fld, &[vec![1, 2], vec![2, 4]]).is_err());
    }

    #[test]
    fn linear_map_of_motivating_set() {
        let fld = f(5);
        let rows = vec![vec![1, 0, 1], vec![1, 1, 0], vec![2, 1, 1], vec![4, 1, 3]];
        let set = CandidateSet::linear(fld, &rows).unwrap();
        assert_eq!(linear_map(&set).unwrap().to_rows(), rows);
        let nonlin = CandidateSet::all_monomials(f(3), 1, 2).unwrap();
        assert!(linear_map(&nonlin).is_err());
    }

    #[test]
    fn entropies_over_f3() {
        // P(w^2 = 0) = 1/3, P(w^2 = 1) = 2/3
        let oracle_sq = -(1.0f64 / 3.0) * (1.0f64 / 3.0).log(3.0) - (2.0 / 3.0) * (2.0f64 / 3.0).log(3.0);
        // w1 w2: zero for 5 of 9 inputs, 1 and 2 for 2 each
        let oracle_xy = -(5.0f64 / 9.0) * (5.0f64 / 9.0).log(3.0) - 2.0 * (2.0 / 9.0) * (2.0f64 / 9.0).log(3.0);
        let s1 = CandidateSet::all_monomials(f(3), 1, 2).unwrap();
        let e1 = EntropyOracle::new(&s1).unwrap();
        assert!((e1.single(0) - 1.0).abs() < 1e-12);
        assert!((e1.single(1) - oracle_sq).abs() < 1e-12);
        assert!((oracle_sq - 0.579380).abs() < 1e-6);
        let s2 = CandidateSet::all_monomials(f(3), 2, 2).unwrap();
        let e2 = EntropyOracle::new(&s2).unwrap();
        assert!((e2.single(3) - oracle_xy).abs() < 1e-12);
        assert!((oracle_xy - 0.905710).abs() < 1e-5);
    }

    #[test]
    fn effective_rank_linear_equals_matrix_rank() {
        let fld = f(5);
        let rows = vec![vec![1, 0, 0, 1], vec![1, 1, 0, 0], vec![2, 1, 0, 1], vec![4, 1, 0, 3]];
        let set = CandidateSet::linear(fld, &rows).unwrap();
        let (r, l) = effective_rank(&set).unwrap();
        assert_eq!(r, 2);
        assert_eq!(l, vec![0, 1]);
        assert_eq!(linear_map(&set).unwrap().rank(fld), 2);
        assert!((h_min_b(&set, &l).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn budget_guard() {
        let set = CandidateSet::all_monomials(f(11), 7, 1).unwrap();
        assert!(matches!(EntropyOracle::new(&set), Err(Error::BudgetExceeded(_))));
    }
}
