//! Dense matrices over a prime field.

use crate::error::{Error, Result};
use crate::field::PrimeField;

/// Row-major dense matrix of residues.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<u32>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1 % field.order());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u32>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::Dimension("ragged matrix rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.concat() })
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<u32> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Submatrix made of the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (c, &j) in cols.iter().enumerate() {
                m.set(i, c, self.get(i, j));
            }
        }
        m
    }

    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        let data = rows.iter().flat_map(|&i| self.row(i).iter().copied()).collect();
        Matrix { rows: rows.len(), cols: self.cols, data }
    }

    pub fn transpose(&self) -> Matrix {
        let mut m = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j));
            }
        }
        m
    }

    pub fn mul(&self, field: PrimeField, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut m = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for t in 0..self.cols {
                let a = self.get(i, t);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = field.add(m.get(i, j), field.mul(a, other.get(t, j)));
                    m.set(i, j, v);
                }
            }
        }
        Ok(m)
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, field: PrimeField, x: &[u32]) -> Result<Vec<u32>> {
        if x.len() != self.rows {
            return Err(Error::Dimension(format!(
                "vector of length {} against {} rows",
                x.len(),
                self.rows
            )));
        }
        let mut out = vec![0u32; self.cols];
        for (i, &a) in x.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o = field.add(*o, field.mul(a, self.get(i, j)));
            }
        }
        Ok(out)
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self, field: PrimeField) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    self.data.swap(p * self.cols + j, r * self.cols + j);
                }
            }
            let inv = field.inv(self.get(r, c)).expect("nonzero pivot");
            for j in 0..self.cols {
                let v = field.mul(self.get(r, j), inv);
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                let factor = self.get(i, c);
                if i == r || factor == 0 {
                    continue;
                }
                for j in 0..self.cols {
                    let v = field.sub(self.get(i, j), field.mul(factor, self.get(r, j)));
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self, field: PrimeField) -> usize {
        self.clone().rref(field).len()
    }

    pub fn inverse(&self, field: PrimeField) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::Dimension("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, 1 % field.order());
        }
        let pivots = aug.rref(field);
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(Error::Structural("singular matrix".into()));
        }
        let mut inv = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, aug.get(i, n + j));
            }
        }
        Ok(inv)
    }
}

/// Indices of a maximal linearly independent subset of `vectors`, chosen
/// greedily in index order.
pub fn greedy_basis(field: PrimeField, vectors: &[Vec<u32>]) -> Vec<usize> {
    let mut basis: Vec<Vec<u32>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    let mut chosen = Vec::new();
    for (idx, v) in vectors.iter().enumerate() {
        let mut w = v.clone();
        for (b, &p) in basis.iter().zip(&pivots) {
            let factor = w[p];
            if factor != 0 {
                for (x, &y) in w.iter_mut().zip(b) {
                    *x = field.sub(*x, field.mul(factor, y));
                }
            }
        }
        if let Some(p) = w.iter().position(|&x| x != 0) {
            let inv = field.inv(w[p]).expect("nonzero");
            for x in w.iter_mut() {
                *x = field.mul(*x, inv);
            }
            // keep earlier basis vectors reduced at the new pivot
            for b in basis.iter_mut() {
                let factor = b[p];
                if factor != 0 {
                    for (x, &y) in b.iter_mut().zip(&w) {
                        *x = field.sub(*x, field.mul(factor, y));
                    }
                }
            }
            basis.push(w);
            pivots.push(p);
            chosen.push(idx);
        }
    }
    chosen
}

/// Outcome of adding one equation to a [`SparseSystem`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Insert {
    /// The equation was independent and now pins a new leading variable.
    New,
    /// Implied by the equations already present.
    Redundant,
    /// Contradicts the equations already present.
    Inconsistent,
}

#[derive(Clone, Debug)]
struct SparseRow {
    /// `(variable, coefficient)` sorted by variable; the last entry is the pivot with coefficient 1.
    entries: Vec<(usize, u32)>,
    rhs: u32,
}

/// Incremental sparse Gaussian elimination over a prime field.
///
/// Rows are kept in echelon form keyed by their largest variable, so a new
/// equation only touches the rows whose pivots it meets. Numbering related
/// unknowns close together keeps fill-in small.
#[derive(Clone, Debug)]
pub struct SparseSystem {
    field: PrimeField,
    pivot_of: Vec<u32>,
    rows: Vec<SparseRow>,
}

const NO_PIVOT: u32 = u32::MAX;

impl SparseSystem {
    pub fn new(field: PrimeField, num_vars: usize) -> Self {
        SparseSystem { field, pivot_of: vec![NO_PIVOT; num_vars], rows: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.pivot_of.len()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn load(&self, terms: &[(usize, u32)]) -> std::collections::BTreeMap<usize, u32> {
        let mut work = std::collections::BTreeMap::new();
        for &(var, c) in terms {
            let e = work.entry(var).or_insert(0);
            *e = self.field.add(*e, c % self.field.order());
        }
        work.retain(|_, c| *c != 0);
        work
    }

    /// Subtracts `factor` times pivot row `r` from `work`, returning the rhs change.
    fn eliminate(&self, work: &mut std::collections::BTreeMap<usize, u32>, r: usize, factor: u32) -> u32 {
        let row = &self.rows[r];
        for &(var, c) in &row.entries {
            let e = work.entry(var).or_insert(0);
            *e = self.field.sub(*e, self.field.mul(factor, c));
            if *e == 0 {
                work.remove(&var);
            }
        }
        self.field.mul(factor, row.rhs)
    }

    /// Adds `sum terms = rhs`.
    pub fn insert(&mut self, terms: &[(usize, u32)], rhs: u32) -> Insert {
        let f = self.field;
        let mut work = self.load(terms);
        let mut rhs = rhs % f.order();
        loop {
            let Some((&lead, &c)) = work.iter().next_back() else {
                return if rhs == 0 { Insert::Redundant } else { Insert::Inconsistent };
            };
            let r = self.pivot_of[lead];
            if r == NO_PIVOT {
                let inv = f.inv(c).expect("nonzero coefficient");
                let entries = work.into_iter().map(|(v, x)| (v, f.mul(x, inv))).collect();
                self.pivot_of[lead] = self.rows.len() as u32;
                self.rows.push(SparseRow { entries, rhs: f.mul(rhs, inv) });
                return Insert::New;
            }
            rhs = f.sub(rhs, self.eliminate(&mut work, r as usize, c));
        }
    }

    /// Value of `sum terms` if the equations determine it.
    pub fn evaluate(&self, terms: &[(usize, u32)]) -> Option<u32> {
        let f = self.field;
        let mut work = self.load(terms);
        let mut value = 0;
        let mut cursor = usize::MAX;
        loop {
            let next = work.range(..cursor).next_back().map(|(&v, &c)| (v, c));
            let Some((var, c)) = next else {
                return work.is_empty().then_some(value);
            };
            let r = self.pivot_of[var];
            if r == NO_PIVOT {
                // a free variable survives; nothing below can cancel it
                return None;
            }
            value = f.add(value, self.eliminate(&mut work, r as usize, c));
            cursor = var;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_inverse() {
        let f = PrimeField::new(5).unwrap();
        let m = Matrix::from_rows(&[vec![1, 2], vec![3, 4]]).unwrap();
        assert_eq!(m.rank(f), 2);
        let inv = m.inverse(f).unwrap();
        assert_eq!(m.mul(f, &inv).unwrap(), Matrix::identity(f, 2));
        let s = Matrix::from_rows(&[vec![1, 2], vec![2, 4]]).unwrap();
        assert_eq!(s.rank(f), 1);
        assert!(s.inverse(f).is_err());
    }

    #[test]
    fn greedy_basis_skips_dependent_rows() {
        let f = PrimeField::new(5).unwrap();
        let v = vec![vec![1, 0, 1], vec![1, 1, 0], vec![2, 1, 1], vec![4, 1, 3]];
        assert_eq!(greedy_basis(f, &v), vec![0, 1]);
    }

    #[test]
    fn sparse_system_solves_and_detects_conflicts() {
        let f = PrimeField::new(7).unwrap();
        let mut s = SparseSystem::new(f, 4);
        // x0 + x1 = 3, x1 - x2 = 1, x2 = 5
        assert_eq!(s.insert(&[(0, 1), (1, 1)], 3), Insert::New);
        assert_eq!(s.evaluate(&[(0, 1)]), None);
        assert_eq!(s.evaluate(&[(0, 2), (1, 2)]), Some(6));
        assert_eq!(s.insert(&[(1, 1), (2, 6)], 1), Insert::New);
        assert_eq!(s.insert(&[(2, 1)], 5), Insert::New);
        assert_eq!(s.evaluate(&[(1, 1)]), Some(6));
        assert_eq!(s.evaluate(&[(0, 1)]), Some(4));
        assert_eq!(s.evaluate(&[(3, 1)]), None);
        assert_eq!(s.insert(&[(0, 1)], 4), Insert::Redundant);
        assert_eq!(s.insert(&[(0, 1)], 5), Insert::Inconsistent);
        assert_eq!(s.rank(), 3);
    }
}
