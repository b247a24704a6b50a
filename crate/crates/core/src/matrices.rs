//! Achievable rate matrices, their validators and the interference matrices
//! `A` and `B` that steer query generation.
//!
//! Row labels `u` inside `A`/`B` are 1-based as in the printed examples;
//! column indices are 0-based everywhere.

use std::fmt;

use crate::codes::LinearCode;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MatrixKind {
    Pir,
    GenericPc,
    Ppc,
    SysPpc,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RateMatrix {
    /// `nu x n_cols` binary matrix.
    pub lambda: Vec<Vec<u8>>,
    pub kappa: usize,
    pub nu: usize,
    pub kind: MatrixKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterferenceMatrices {
    /// `kappa x n_cols`, entries in `1..=nu`.
    pub a: Vec<Vec<usize>>,
    /// `(nu - kappa) x n_cols`.
    pub b: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        write!(f, "{}", self.violations.join("; "))
    }
}

impl RateMatrix {
    /// Builds a matrix and infers `kappa` from the first column.
    pub fn new(lambda: Vec<Vec<u8>>, kind: MatrixKind) -> Result<Self> {
        let nu = lambda.len();
        let cols = lambda.first().map_or(0, |r| r.len());
        if nu == 0 || cols == 0 || lambda.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("rate matrix must be a nonempty rectangle".into()));
        }
        if lambda.iter().flatten().any(|&x| x > 1) {
            return Err(Error::InvalidParameter("rate matrix entries must be 0 or 1".into()));
        }
        let kappa = lambda.iter().map(|r| r[0] as usize).sum();
        Ok(RateMatrix { lambda, kappa, nu, kind })
    }

    pub fn n_cols(&self) -> usize {
        self.lambda[0].len()
    }

    /// Support `chi(lambda_u)` of row `u` (0-based row).
    pub fn support(&self, u: usize) -> Vec<usize> {
        self.lambda[u].iter().enumerate().filter(|(_, &x)| x == 1).map(|(j, _)| j).collect()
    }

    pub fn column_weights(&self) -> Vec<usize> {
        (0..self.n_cols()).map(|j| self.lambda.iter().map(|r| r[j] as usize).sum()).collect()
    }

    /// Rows of `0`/`1` characters, one per line.
    pub fn to_text(&self) -> String {
        self.lambda
            .iter()
            .map(|r| r.iter().map(|&x| if x == 1 { '1' } else { '0' }).collect::<String>() + "\n")
            .collect()
    }

    /// Parses rows of `0`/`1` characters; blank lines and `#` comments are skipped.
    pub fn from_text(text: &str, kind: MatrixKind) -> Result<Self> {
        let mut rows = Vec::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let row = line
                .chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| match c {
                    '0' => Ok(0u8),
                    '1' => Ok(1u8),
                    other => Err(Error::InvalidParameter(format!("unexpected character {other:?} in rate matrix"))),
                })
                .collect::<Result<Vec<u8>>>()?;
            rows.push(row);
        }
        RateMatrix::new(rows, kind)
    }
}

fn check_regular(rm: &RateMatrix, report: &mut ValidationReport) {
    for (j, w) in rm.column_weights().into_iter().enumerate() {
        if w != rm.kappa {
            report
                .violations
                .push(format!("column {} has weight {w}, expected kappa={} (column regularity)", j + 1, rm.kappa));
        }
    }
}

fn contains_info_set(code: &LinearCode, support: &[usize]) -> bool {
    support.len() >= code.k && code.information_set_within(support).is_some()
}

/// Checks the kind-specific conditions; `star` is required for PPC kinds.
pub fn validate(rm: &RateMatrix, storage: &LinearCode, star: Option<&LinearCode>) -> ValidationReport {
    let mut report = ValidationReport::default();
    if rm.lambda.len() != rm.nu {
        report.violations.push("row count differs from nu".into());
    }
    check_regular(rm, &mut report);
    match rm.kind {
        MatrixKind::GenericPc => {}
        MatrixKind::Pir => {
            if rm.n_cols() != storage.n {
                report.violations.push(format!("{} columns for a length-{} code", rm.n_cols(), storage.n));
                return report;
            }
            for u in 0..rm.nu {
                if !contains_info_set(storage, &rm.support(u)) {
                    report.violations.push(format!("row {} support holds no information set of C", u + 1));
                }
            }
        }
        MatrixKind::Ppc => {
            let Some(star) = star else {
                report.violations.push("PPC validation needs the star-product code".into());
                return report;
            };
            if rm.n_cols() != star.n {
                report.violations.push(format!("{} columns for a length-{} code", rm.n_cols(), star.n));
                return report;
            }
            if rm.kappa * star.n != rm.nu * star.k {
                report.violations.push(format!(
                    "kappa/nu = {}/{} differs from k~/n = {}/{}",
                    rm.kappa, rm.nu, star.k, star.n
                ));
            }
            for u in 0..rm.nu {
                if !contains_info_set(star, &rm.support(u)) {
                    report.violations.push(format!("row {} support holds no information set of the star code", u + 1));
                }
            }
        }
        MatrixKind::SysPpc => {
            let Some(star) = star else {
                report.violations.push("systematic validation needs the star-product code".into());
                return report;
            };
            let k = storage.k;
            let n_hat = rm.n_cols();
            let rho = n_hat / star.k * rm.kappa;
            let prefix: Vec<usize> = (0..k).collect();
            let (sys, other): (Vec<usize>, Vec<usize>) = (0..rm.nu).partition(|&u| rm.support(u) == prefix);
            if rho > rm.nu {
                report.violations.push(format!("rho={rho} exceeds nu={}", rm.nu));
                return report;
            }
            if other.len() > rho {
                report.violations.push(format!(
                    "{} rows differ from [k] but only rho={rho} information-set rows are allowed",
                    other.len()
                ));
            }
            for &u in &other {
                if !contains_info_set(star, &rm.support(u)) {
                    report.violations.push(format!("row {} support holds no information set of the star code", u + 1));
                }
            }
            let borrowed = rho.saturating_sub(other.len());
            let sys_with_info = sys.iter().filter(|&&u| contains_info_set(star, &rm.support(u))).count();
            if borrowed > sys_with_info || sys.len() < rm.nu - rho {
                report.violations.push(format!(
                    "expected rho={rho} information-set rows and {} rows with support [k]",
                    rm.nu - rho
                ));
            }
        }
    }
    report
}

/// Interference matrices with entries listed in increasing `u` per column.
pub fn interference(rm: &RateMatrix) -> InterferenceMatrices {
    let n = rm.n_cols();
    let mut a = vec![vec![0; n]; rm.kappa];
    let mut b = vec![vec![0; n]; rm.nu - rm.kappa];
    for j in 0..n {
        let ones: Vec<usize> = (0..rm.nu).filter(|&u| rm.lambda[u][j] == 1).map(|u| u + 1).collect();
        let zeros: Vec<usize> = (0..rm.nu).filter(|&u| rm.lambda[u][j] == 0).map(|u| u + 1).collect();
        for (i, u) in ones.into_iter().enumerate().take(rm.kappa) {
            a[i][j] = u;
        }
        for (i, u) in zeros.into_iter().enumerate().take(rm.nu - rm.kappa) {
            b[i][j] = u;
        }
    }
    InterferenceMatrices { a, b }
}

impl InterferenceMatrices {
    pub fn kappa(&self) -> usize {
        self.a.len()
    }

    pub fn n_cols(&self) -> usize {
        self.a.first().map_or(0, |r| r.len())
    }

    pub fn nu(&self) -> usize {
        self.a.len() + self.b.len()
    }

    /// `A_j` in row order.
    pub fn a_col(&self, j: usize) -> Vec<usize> {
        self.a.iter().map(|r| r[j]).collect()
    }

    pub fn b_col(&self, j: usize) -> Vec<usize> {
        self.b.iter().map(|r| r[j]).collect()
    }

    /// Checks that every column of `A` and `B` together is a disjoint cover of `[nu]`.
    pub fn check_cover(&self) -> Result<()> {
        let nu = self.nu();
        for j in 0..self.n_cols() {
            let mut seen = vec![false; nu + 1];
            for u in self.a_col(j).into_iter().chain(self.b_col(j)) {
                if u == 0 || u > nu || seen[u] {
                    return Err(Error::Structural(format!("column {} of A/B is not a cover of [nu]", j + 1)));
                }
                seen[u] = true;
            }
        }
        Ok(())
    }

    /// The rate matrix these interference matrices describe.
    pub fn to_rate_matrix(&self, kind: MatrixKind) -> RateMatrix {
        let n = self.n_cols();
        let mut lambda = vec![vec![0u8; n]; self.nu()];
        for row in &self.a {
            for (j, &u) in row.iter().enumerate() {
                lambda[u - 1][j] = 1;
            }
        }
        RateMatrix { lambda, kappa: self.kappa(), nu: self.nu(), kind }
    }
}

/// `S(u|A)`: columns (0-based) where `u` occurs in `A`.
pub fn coordinate_set(a: &[Vec<usize>], u: usize) -> Vec<usize> {
    let n = a.first().map_or(0, |r| r.len());
    (0..n).filter(|&j| a.iter().any(|r| r[j] == u)).collect()
}

/// `nu = n` rows; row `i` covers the `kappa` cyclically consecutive columns from `i`.
pub fn construct_mds_cyclic(n: usize, kappa: usize, kind: MatrixKind) -> Result<RateMatrix> {
    if kappa == 0 || kappa > n {
        return Err(Error::InvalidParameter(format!("kappa={kappa} outside [1, {n}]")));
    }
    let lambda = (0..n)
        .map(|i| {
            let mut row = vec![0u8; n];
            for t in 0..kappa {
                row[(i + t) % n] = 1;
            }
            row
        })
        .collect();
    RateMatrix::new(lambda, kind)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Smallest cyclic matrix with `kappa/nu = w/n`: `nu = n / gcd(n, w)` rows,
/// row `i` covering the `w` consecutive columns starting at `i w` (mod n).
/// Every row support has exactly `w` columns, so for an MDS code of
/// dimension `w` every row is an information set.
pub fn construct_block_cyclic(n: usize, w: usize, kind: MatrixKind) -> Result<RateMatrix> {
    if w == 0 || w > n {
        return Err(Error::InvalidParameter(format!("row weight {w} outside [1, {n}]")));
    }
    let nu = n / gcd(n, w);
    let lambda = (0..nu)
        .map(|i| {
            let mut row = vec![0u8; n];
            for t in 0..w {
                row[(i * w + t) % n] = 1;
            }
            row
        })
        .collect();
    RateMatrix::new(lambda, kind)
}

/// Number of databases the systematic scheme queries.
pub fn n_hat(n: usize, k: usize, k_tilde: usize) -> usize {
    let delta = n / k_tilde;
    let rem = n - delta * k_tilde;
    if rem >= k {
        k + delta * k_tilde
    } else if delta == 1 {
        n
    } else {
        k + (delta - 1) * k_tilde
    }
}

/// Row count of the systematic rate matrix, by the three-case formula.
pub fn nu_sys(n: usize, k: usize, k_tilde: usize) -> usize {
    let delta = n / k_tilde;
    let rem = n - delta * k_tilde;
    if rem >= k {
        delta * k + k
    } else if delta == 1 {
        n - k_tilde + k
    } else {
        delta * k
    }
}

/// The systematic rate matrix of width `n_hat` with `kappa = k`.
///
/// `A` is filled as follows: the `Gamma = n_hat - delta k~` special labels
/// `delta k + 1 ..= delta k + Gamma` go into the bottom `Gamma` rows of the
/// first `k` columns, then the labels `1..=delta k` are written cyclically into
/// the remaining entries in column-major order.
pub fn construct_sys_ppc(n: usize, k: usize, k_tilde: usize) -> Result<(RateMatrix, InterferenceMatrices)> {
    if k == 0 || k > k_tilde || k_tilde > n {
        return Err(Error::InvalidParameter(format!("need 1 <= k <= k~ <= n, got k={k}, k~={k_tilde}, n={n}")));
    }
    let nh = n_hat(n, k, k_tilde);
    let delta = nh / k_tilde;
    let gamma = nh - delta * k_tilde;
    if gamma > k {
        return Err(Error::Structural(format!("Gamma={gamma} exceeds k={k}")));
    }
    let nu = delta * k + gamma;
    let mut a = vec![vec![0usize; nh]; k];
    for i in 0..gamma {
        for col in a[k - gamma + i].iter_mut().take(k) {
            *col = delta * k + i + 1;
        }
    }
    let cycle = delta * k;
    let mut next = 0usize;
    for j in 0..nh {
        for row in a.iter_mut() {
            if row[j] == 0 {
                row[j] = next % cycle + 1;
                next += 1;
            }
        }
    }
    let mut b = vec![vec![0usize; nh]; nu - k];
    for j in 0..nh {
        let col: Vec<usize> = a.iter().map(|r| r[j]).collect();
        let rest: Vec<usize> = (1..=nu).filter(|u| !col.contains(u)).collect();
        if rest.len() != nu - k {
            return Err(Error::Structural(format!("column {} of A repeats a label", j + 1)));
        }
        for (i, u) in rest.into_iter().enumerate() {
            b[i][j] = u;
        }
    }
    let im = InterferenceMatrices { a, b };
    im.check_cover()?;
    Ok((im.to_rate_matrix(MatrixKind::SysPpc), im))
}

/// Rate matrix of the `[4,2]` example code with `(kappa, nu) = (1, 2)`.
pub fn example_pir_matrix() -> RateMatrix {
    RateMatrix::new(vec![vec![1, 0, 1, 0], vec![0, 1, 0, 1]], MatrixKind::Pir).expect("static")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{example_code, star_product_code, RSCode};
    use crate::field::PrimeField;

    #[test]
    fn example_pir_matrix_is_valid_with_printed_interference() {
        let f = PrimeField::new(5).unwrap();
        let rm = example_pir_matrix();
        assert!(validate(&rm, &example_code(f), None).is_valid());
        let im = interference(&rm);
        assert_eq!(im.a, vec![vec![1, 2, 1, 2]]);
        assert_eq!(im.b, vec![vec![2, 1, 2, 1]]);
        assert_eq!(coordinate_set(&im.a, 1), vec![0, 2]);
        assert_eq!(coordinate_set(&im.a, 3), Vec::<usize>::new());
    }

    #[test]
    fn example_ppc_matrix() {
        let f = PrimeField::new(5).unwrap();
        let c = RSCode::default_systematic(f, 4, 2).unwrap();
        let star = star_product_code(&c, 2).unwrap();
        let rm = construct_block_cyclic(4, 3, MatrixKind::Ppc).unwrap();
        assert_eq!(
            rm.lambda,
            vec![vec![1, 1, 1, 0], vec![1, 1, 0, 1], vec![1, 0, 1, 1], vec![0, 1, 1, 1]]
        );
        assert!(validate(&rm, &c.base, Some(&star.base)).is_valid());
        let im = interference(&rm);
        assert_eq!(im.a, vec![vec![1, 1, 1, 2], vec![2, 2, 3, 3], vec![3, 4, 4, 4]]);
        assert_eq!(im.b, vec![vec![4, 3, 2, 1]]);
    }

    #[test]
    fn all_ones_fails_ppc_ratio() {
        let f = PrimeField::new(5).unwrap();
        let c = RSCode::default_systematic(f, 4, 2).unwrap();
        let star = star_product_code(&c, 2).unwrap();
        let rm = RateMatrix::new(vec![vec![1; 4]; 2], MatrixKind::Ppc).unwrap();
        let rep = validate(&rm, &c.base, Some(&star.base));
        assert!(!rep.is_valid());
        assert!(rep.violations.iter().all(|v| !v.contains("regularity")));
    }

    #[test]
    fn cyclic_examples() {
        let rm = construct_mds_cyclic(2, 1, MatrixKind::Pir).unwrap();
        assert_eq!(rm.lambda, vec![vec![1, 0], vec![0, 1]]);
        let f = PrimeField::new(7).unwrap();
        let c = RSCode::default_systematic(f, 7, 2).unwrap();
        let star = star_product_code(&c, 2).unwrap();
        let rm = construct_mds_cyclic(7, 3, MatrixKind::Ppc).unwrap();
        assert!(validate(&rm, &c.base, Some(&star.base)).is_valid());
    }

    #[test]
    fn systematic_parameters() {
        assert_eq!(n_hat(4, 2, 3), 4);
        assert_eq!(n_hat(7, 2, 3), 5);
        assert_eq!(n_hat(5, 2, 5), 5);
        assert_eq!(nu_sys(4, 2, 3), 3);
        assert_eq!(nu_sys(7, 2, 3), 4);
        assert_eq!(nu_sys(6, 3, 3), n_hat(6, 3, 3));
    }

    #[test]
    fn example_sys_matrix() {
        let (rm, im) = construct_sys_ppc(4, 2, 3).unwrap();
        assert_eq!(im.a, vec![vec![1, 2, 1, 1], vec![3, 3, 2, 2]]);
        assert_eq!(im.b, vec![vec![2, 1, 3, 3]]);
        assert_eq!((rm.kappa, rm.nu), (2, 3));
        assert_eq!(coordinate_set(&im.a, 2), vec![1, 2, 3]);
        let f = PrimeField::new(5).unwrap();
        let c = RSCode::default_systematic(f, 4, 2).unwrap();
        let star = star_product_code(&c, 2).unwrap();
        assert!(validate(&rm, &c.base, Some(&star.base)).is_valid());
    }

    #[test]
    fn text_round_trip() {
        let rm = example_pir_matrix();
        let text = rm.to_text();
        assert_eq!(text, "1010\n0101\n");
        assert_eq!(RateMatrix::from_text(&text, MatrixKind::Pir).unwrap(), rm);
        assert!(RateMatrix::from_text("10x0\n", MatrixKind::Pir).is_err());
    }
}
