//! Prime field arithmetic, univariate polynomials and Lagrange interpolation.
//!
//! Field elements are stored as reduced residues in `[0, q)`. Hot loops in the
//! simulator work on raw `u32` residues through the methods of [`PrimeField`];
//! [`FieldElement`] is the checked, self-describing value type.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    q: u32,
}

impl PrimeField {
    pub fn new(q: u32) -> Result<Self> {
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        Ok(PrimeField { q })
    }

    #[inline]
    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn elem(&self, v: u64) -> FieldElement {
        FieldElement { value: (v % self.q as u64) as u32, q: self.q }
    }

    /// Maps a signed integer to its residue.
    #[inline]
    pub fn from_i64(&self, v: i64) -> u32 {
        v.rem_euclid(self.q as i64) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        (s % self.q as u64) as u32
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        let s = a as u64 + self.q as u64 - b as u64;
        (s % self.q as u64) as u32
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.q as u64) as u32
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn inv(&self, a: u32) -> Option<u32> {
        let a = a % self.q;
        if a == 0 {
            return None;
        }
        let (mut r0, mut r1) = (self.q as i64, a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let quot = r0 / r1;
            (r0, r1) = (r1, r0 - quot * r1);
            (t0, t1) = (t1, t0 - quot * t1);
        }
        debug_assert_eq!(r0, 1);
        Some(self.from_i64(t0))
    }

    pub fn div(&self, a: u32, b: u32) -> Result<u32> {
        let inv = self.inv(b).ok_or(Error::DivisionByZero(self.q))?;
        Ok(self.mul(a, inv))
    }

    pub fn pow(&self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1 % self.q;
        base %= self.q;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// `+1` or `-1` as a residue.
    #[inline]
    pub fn sign(&self, s: i8) -> u32 {
        if s >= 0 {
            1 % self.q
        } else {
            self.neg(1 % self.q)
        }
    }
}

fn is_prime(q: u32) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= q as u64 {
        if q as u64 % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Smallest prime that is at least `n` (and at least 2).
pub fn next_prime(n: u32) -> u32 {
    let mut c = n.max(2);
    while !is_prime(c) {
        c += 1;
    }
    c
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u32,
    q: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl FieldElement {
    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn field(&self) -> PrimeField {
        PrimeField { q: self.q }
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn inverse(&self) -> Result<FieldElement> {
        let v = self.field().inv(self.value).ok_or(Error::DivisionByZero(self.q))?;
        Ok(FieldElement { value: v, q: self.q })
    }

    /// Checked binary operation; fails on mixed fields or division by zero.
    pub fn apply(self, rhs: FieldElement, op: ArithOp) -> Result<FieldElement> {
        if self.q != rhs.q {
            return Err(Error::FieldMismatch(self.q, rhs.q));
        }
        let f = self.field();
        let value = match op {
            ArithOp::Add => f.add(self.value, rhs.value),
            ArithOp::Sub => f.sub(self.value, rhs.value),
            ArithOp::Mul => f.mul(self.value, rhs.value),
            ArithOp::Div => f.div(self.value, rhs.value)?,
        };
        Ok(FieldElement { value, q: self.q })
    }
}

/// Free-function form of [`FieldElement::apply`].
pub fn field_arith(a: FieldElement, b: FieldElement, op: ArithOp) -> Result<FieldElement> {
    a.apply(b, op)
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

macro_rules! forward_op {
    ($trait:ident, $method:ident, $op:expr) => {
        impl $trait for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                self.apply(rhs, $op).expect("operands from the same field")
            }
        }
    };
}

forward_op!(Add, add, ArithOp::Add);
forward_op!(Sub, sub, ArithOp::Sub);
forward_op!(Mul, mul, ArithOp::Mul);

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement { value: self.field().neg(self.value), q: self.q }
    }
}

/// Univariate polynomial, coefficients lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPoly {
    field: PrimeField,
    coeffs: Vec<u32>,
}

impl UniPoly {
    pub fn new(field: PrimeField, coeffs: Vec<u32>) -> Self {
        let mut p = UniPoly {
            field,
            coeffs: coeffs.into_iter().map(|c| c % field.order()).collect(),
        };
        p.trim();
        p
    }

    pub fn zero(field: PrimeField) -> Self {
        UniPoly { field, coeffs: Vec::new() }
    }

    pub fn constant(field: PrimeField, c: u32) -> Self {
        UniPoly::new(field, vec![c])
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: u32) -> u32 {
        let f = self.field;
        self.coeffs.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn eval_at(&self, x: FieldElement) -> Result<FieldElement> {
        if x.field() != self.field {
            return Err(Error::FieldMismatch(self.field.order(), x.field().order()));
        }
        Ok(self.field.elem(self.eval(x.value()) as u64))
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let f = self.field;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(0);
                let b = other.coeffs.get(i).copied().unwrap_or(0);
                f.add(a, b)
            })
            .collect();
        UniPoly::new(f, coeffs)
    }

    pub fn scale(&self, c: u32) -> UniPoly {
        let f = self.field;
        UniPoly::new(f, self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        let f = self.field;
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero(f);
        }
        let mut out = vec![0u32; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        UniPoly::new(f, out)
    }
}

fn check_distinct(points: &[u32]) -> Result<()> {
    let mut seen = points.to_vec();
    seen.sort_unstable();
    for w in seen.windows(2) {
        if w[0] == w[1] {
            return Err(Error::RepeatedPoint(w[0]));
        }
    }
    Ok(())
}

/// The Lagrange basis polynomial that is one at `gamma[i]` and zero at the
/// other points of `gamma` (0-based `i`).
pub fn lagrange_basis(field: PrimeField, gamma: &[u32], i: usize) -> Result<UniPoly> {
    if i >= gamma.len() {
        return Err(Error::Dimension(format!("basis index {i} out of {} points", gamma.len())));
    }
    let gamma: Vec<u32> = gamma.iter().map(|g| g % field.order()).collect();
    check_distinct(&gamma)?;
    let mut num = UniPoly::constant(field, 1);
    let mut denom = 1u32;
    for (t, &g) in gamma.iter().enumerate() {
        if t == i {
            continue;
        }
        num = num.mul(&UniPoly::new(field, vec![field.neg(g), 1]));
        denom = field.mul(denom, field.sub(gamma[i], g));
    }
    let inv = field.inv(denom).ok_or(Error::DivisionByZero(field.order()))?;
    Ok(num.scale(inv))
}

/// Unique polynomial of degree below `points.len()` through the given points.
pub fn lagrange_interpolate(field: PrimeField, points: &[(u32, u32)]) -> Result<UniPoly> {
    if points.is_empty() {
        return Err(Error::InvalidParameter("interpolation needs at least one point".into()));
    }
    let xs: Vec<u32> = points.iter().map(|p| p.0).collect();
    let mut acc = UniPoly::zero(field);
    for (i, &(_, y)) in points.iter().enumerate() {
        if y % field.order() == 0 {
            // still validates the points below
            continue;
        }
        acc = acc.add(&lagrange_basis(field, &xs, i)?.scale(y));
    }
    check_distinct(&xs.iter().map(|x| x % field.order()).collect::<Vec<_>>())?;
    Ok(acc)
}

/// Coefficients `c_i` with `p(target) = sum_i c_i p(xs[i])` for every `p` of
/// degree below `xs.len()`.
pub fn lagrange_weights(field: PrimeField, xs: &[u32], target: u32) -> Result<Vec<u32>> {
    check_distinct(xs)?;
    (0..xs.len())
        .map(|i| Ok(lagrange_basis(field, xs, i)?.eval(target)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_examples() {
        let f = PrimeField::new(7).unwrap();
        let a = f.elem(3);
        let b = f.elem(5);
        assert_eq!(field_arith(a, b, ArithOp::Mul).unwrap().value(), 1);
        assert_eq!(field_arith(f.elem(1), f.elem(3), ArithOp::Div).unwrap().value(), 5);
        assert_eq!(field_arith(a, f.elem(0), ArithOp::Add).unwrap(), a);
    }

    #[test]
    fn division_by_zero_and_mixed_fields() {
        let f7 = PrimeField::new(7).unwrap();
        let f5 = PrimeField::new(5).unwrap();
        assert!(matches!(
            field_arith(f7.elem(1), f7.elem(0), ArithOp::Div),
            Err(Error::DivisionByZero(7))
        ));
        assert!(matches!(
            field_arith(f7.elem(1), f5.elem(1), ArithOp::Add),
            Err(Error::FieldMismatch(7, 5))
        ));
    }

    #[test]
    fn rejects_composite_modulus() {
        assert!(PrimeField::new(9).is_err());
        assert!(PrimeField::new(1).is_err());
        assert!(PrimeField::new(2).is_ok());
    }

    #[test]
    fn inverse_over_f2() {
        let f = PrimeField::new(2).unwrap();
        assert_eq!(f.inv(1), Some(1));
        assert_eq!(f.inv(0), None);
    }

    #[test]
    fn poly_eval_examples() {
        let f7 = PrimeField::new(7).unwrap();
        assert_eq!(UniPoly::new(f7, vec![1, 1]).eval(2), 3);
        assert_eq!(UniPoly::zero(f7).eval(4), 0);
        let f3 = PrimeField::new(3).unwrap();
        assert_eq!(UniPoly::new(f3, vec![0, 0, 1]).eval(2), 1);
    }

    #[test]
    fn lagrange_basis_examples() {
        let f3 = PrimeField::new(3).unwrap();
        assert_eq!(lagrange_basis(f3, &[1], 0).unwrap(), UniPoly::constant(f3, 1));
        assert_eq!(lagrange_basis(f3, &[0, 1], 0).unwrap().coeffs(), &[1, 2]);
        assert!(matches!(lagrange_basis(f3, &[1, 1], 0), Err(Error::RepeatedPoint(1))));
    }

    #[test]
    fn interpolation_rejects_duplicates() {
        let f = PrimeField::new(5).unwrap();
        assert!(lagrange_interpolate(f, &[(1, 0), (1, 0)]).is_err());
        assert!(lagrange_interpolate(f, &[]).is_err());
        assert_eq!(lagrange_interpolate(f, &[(3, 4)]).unwrap(), UniPoly::constant(f, 4));
    }

    #[test]
    fn next_prime_values() {
        assert_eq!(next_prime(0), 2);
        assert_eq!(next_prime(4), 5);
        assert_eq!(next_prime(8), 11);
    }
}
