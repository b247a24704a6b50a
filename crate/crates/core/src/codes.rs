//! Linear codes, Lagrange Reed-Solomon codes and star-product codes.

use crate::error::{Error, Result};
use crate::field::{lagrange_basis, lagrange_weights, PrimeField};
use crate::linalg::Matrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearCode {
    pub field: PrimeField,
    pub n: usize,
    pub k: usize,
    pub generator: Matrix,
}

impl LinearCode {
    pub fn new(field: PrimeField, generator: Matrix) -> Result<Self> {
        let (k, n) = (generator.rows, generator.cols);
        if k == 0 || k > n {
            return Err(Error::Dimension(format!("[{n},{k}] code")));
        }
        if generator.rank(field) != k {
            return Err(Error::InvalidParameter("generator matrix is not full rank".into()));
        }
        Ok(LinearCode { field, n, k, generator })
    }

    /// Codeword `w G`.
    pub fn encode_row(&self, w: &[u32]) -> Result<Vec<u32>> {
        if w.len() != self.k {
            return Err(Error::Dimension(format!("message of length {} for k={}", w.len(), self.k)));
        }
        self.generator.vec_mul(self.field, w)
    }

    /// Whether the columns `info` (0-based) of the generator are invertible.
    pub fn is_information_set(&self, info: &[usize]) -> Result<bool> {
        if info.len() != self.k {
            return Err(Error::Dimension(format!(
                "information set of size {} for k={}",
                info.len(),
                self.k
            )));
        }
        if info.iter().any(|&j| j >= self.n) {
            return Err(Error::Dimension("coordinate out of range".into()));
        }
        Ok(self.generator.select_columns(info).rank(self.field) == self.k)
    }

    /// Some information set inside `support`, preferring lower coordinates.
    pub fn information_set_within(&self, support: &[usize]) -> Option<Vec<usize>> {
        let cols: Vec<Vec<u32>> = support.iter().map(|&j| self.generator.column(j)).collect();
        let chosen = crate::linalg::greedy_basis(self.field, &cols);
        (chosen.len() == self.k).then(|| chosen.into_iter().map(|c| support[c]).collect())
    }

    /// Coefficients expressing codeword coordinate `target` through the
    /// coordinates of the information set `info`.
    pub fn extension_weights(&self, info: &[usize], target: usize) -> Result<Vec<u32>> {
        // c_target = w g_target and w = c_I G_I^{-1}, so the weights are G_I^{-1} g_target
        let inv = self.generator.select_columns(info).inverse(self.field)?;
        let g_t = self.generator.column(target);
        let mut out = vec![0u32; info.len()];
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0;
            for (t, &g) in g_t.iter().enumerate() {
                acc = self.field.add(acc, self.field.mul(inv.get(i, t), g));
            }
            *o = acc;
        }
        Ok(out)
    }

    /// Message recovered from the codeword values at an information set.
    pub fn decode_from(&self, info: &[usize], values: &[u32]) -> Result<Vec<u32>> {
        let inv = self.generator.select_columns(info).inverse(self.field)?;
        inv.vec_mul(self.field, values)
    }
}

/// Reed-Solomon code with a Lagrange generator matrix `G[i][j] = l_i(alpha_j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RSCode {
    pub base: LinearCode,
    pub alpha: Vec<u32>,
    pub gamma: Vec<u32>,
    pub systematic: bool,
}

impl RSCode {
    pub fn new(field: PrimeField, n: usize, k: usize, alpha: Vec<u32>, gamma: Vec<u32>) -> Result<Self> {
        if (field.order() as usize) < n {
            return Err(Error::FieldTooSmall { q: field.order(), n });
        }
        if alpha.len() != n || gamma.len() != k || k == 0 || k > n {
            return Err(Error::Dimension(format!(
                "RS code with n={n}, k={k}, |alpha|={}, |gamma|={}",
                alpha.len(),
                gamma.len()
            )));
        }
        let alpha: Vec<u32> = alpha.iter().map(|a| a % field.order()).collect();
        let gamma: Vec<u32> = gamma.iter().map(|a| a % field.order()).collect();
        let mut g = Matrix::zeros(k, n);
        for i in 0..k {
            let basis = lagrange_basis(field, &gamma, i)?;
            for (j, &a) in alpha.iter().enumerate() {
                g.set(i, j, basis.eval(a));
            }
        }
        // lagrange_basis already rejects repeated gamma; alpha needs its own check
        let mut sorted = alpha.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::RepeatedPoint(w[0]));
        }
        let systematic = gamma[..] == alpha[..k];
        Ok(RSCode { base: LinearCode::new(field, g)?, alpha, gamma, systematic })
    }

    /// Defaults: `alpha_j = j - 1` and systematic `gamma = alpha[..k]`.
    pub fn default_systematic(field: PrimeField, n: usize, k: usize) -> Result<Self> {
        let alpha: Vec<u32> = (0..n as u32).collect();
        let gamma = alpha[..k.min(n)].to_vec();
        RSCode::new(field, n, k, alpha, gamma)
    }

    pub fn n(&self) -> usize {
        self.base.n
    }

    pub fn k(&self) -> usize {
        self.base.k
    }

    pub fn field(&self) -> PrimeField {
        self.base.field
    }

    /// Weights `c_i` with `p(target) = sum_i c_i p(alpha[coords[i]])` for all
    /// polynomials of degree below `coords.len()`.
    pub fn interpolation_weights(&self, coords: &[usize], target: u32) -> Result<Vec<u32>> {
        let xs: Vec<u32> = coords.iter().map(|&j| self.alpha[j]).collect();
        lagrange_weights(self.field(), &xs, target)
    }
}

pub fn rs_code(field: PrimeField, n: usize, k: usize, alpha: Vec<u32>, gamma: Vec<u32>) -> Result<RSCode> {
    RSCode::new(field, n, k, alpha, gamma)
}

pub fn star_dimension(n: usize, k: usize, g: usize) -> usize {
    (g * (k - 1) + 1).min(n)
}

/// The g-fold star-product code of an RS code: same evaluation points,
/// dimension `min(g(k-1)+1, n)`.
pub fn star_product_code(code: &RSCode, g: usize) -> Result<RSCode> {
    if g == 0 {
        return Err(Error::InvalidParameter("star power g must be positive".into()));
    }
    let n = code.n();
    let kt = star_dimension(n, code.k(), g);
    let gamma = if code.systematic {
        code.alpha[..kt].to_vec()
    } else {
        (0..kt as u32).collect()
    };
    RSCode::new(code.field(), n, kt, code.alpha.clone(), gamma)
}

/// Element-wise product of two vectors.
pub fn star_product(field: PrimeField, u: &[u32], v: &[u32]) -> Result<Vec<u32>> {
    if u.len() != v.len() {
        return Err(Error::Dimension(format!("star product of lengths {} and {}", u.len(), v.len())));
    }
    Ok(u.iter().zip(v).map(|(&a, &b)| field.mul(a, b)).collect())
}

/// The `[4,2]` binary-shaped code of the running example, over `field`.
pub fn example_code(field: PrimeField) -> LinearCode {
    let g = Matrix::from_rows(&[vec![1, 0, 1, 1], vec![0, 1, 1, 1]]).expect("static rows");
    LinearCode::new(field, g).expect("rank 2")
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    Combinations::new(n, k).collect()
}

/// Lazy lexicographic iterator over the `k`-subsets of `0..n`.
#[derive(Clone, Debug)]
pub struct Combinations {
    n: usize,
    cur: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Combinations { n, cur: (k <= n).then(|| (0..k).collect()) }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.cur.take()?;
        let k = out.len();
        let mut next = out.clone();
        // rightmost position that can still move up
        if let Some(i) = (0..k).rev().find(|&i| next[i] < self.n - k + i) {
            next[i] += 1;
            for t in i + 1..k {
                next[t] = next[t - 1] + 1;
            }
            self.cur = Some(next);
        }
        Some(out)
    }
}
