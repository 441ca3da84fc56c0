//! Exact multivariate integer Laurent polynomials and fraction-free linear
//! algebra over them.
//!
//! Polynomials live in Z[t_1^{±1}, ..., t_mu^{±1}]. Terms are kept in a
//! `BTreeMap` keyed by exponent vectors, so the lexicographic canonical form
//! is maintained by construction and equality is structural.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A multivariate integer Laurent polynomial in canonical form.
///
/// Invariants: no stored coefficient is zero and every exponent vector has
/// length `num_vars`. Exponents may be negative.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    num_vars: usize,
    terms: BTreeMap<Vec<i64>, BigInt>,
}

impl LaurentPoly {
    pub fn zero(num_vars: usize) -> Self {
        LaurentPoly { num_vars, terms: BTreeMap::new() }
    }

    pub fn one(num_vars: usize) -> Self {
        Self::constant(num_vars, BigInt::one())
    }

    pub fn constant(num_vars: usize, value: impl Into<BigInt>) -> Self {
        Self::monomial(vec![0; num_vars], value)
    }

    /// The polynomial `t_index` (zero-based variable index).
    pub fn variable(num_vars: usize, index: usize) -> Self {
        assert!(index < num_vars, "variable index out of range");
        let mut exps = vec![0; num_vars];
        exps[index] = 1;
        Self::monomial(exps, 1)
    }

    /// A single term `coeff * t^exponents`.
    pub fn monomial(exponents: Vec<i64>, coeff: impl Into<BigInt>) -> Self {
        let coeff = coeff.into();
        let num_vars = exponents.len();
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exponents, coeff);
        }
        LaurentPoly { num_vars, terms }
    }

    /// Builds a polynomial from (exponents, coefficient) pairs, summing
    /// duplicates and dropping zeros.
    pub fn from_terms(
        num_vars: usize,
        terms: impl IntoIterator<Item = (Vec<i64>, BigInt)>,
    ) -> Self {
        let mut poly = Self::zero(num_vars);
        for (exps, coeff) in terms {
            assert_eq!(exps.len(), num_vars, "exponent vector length mismatch");
            poly.add_term(exps, coeff);
        }
        poly
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Iterates terms in lexicographic order of exponent vectors.
    pub fn terms(&self) -> impl Iterator<Item = (&[i64], &BigInt)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn coeff(&self, exponents: &[i64]) -> BigInt {
        self.terms.get(exponents).cloned().unwrap_or_else(BigInt::zero)
    }

    fn add_term(&mut self, exps: Vec<i64>, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
            Entry::Vacant(slot) => {
                slot.insert(coeff);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += coeff;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    fn check_vars(&self, other: &Self) -> Result<()> {
        if self.num_vars != other.num_vars {
            return Err(Error::VariableMismatch { left: self.num_vars, right: other.num_vars });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        let mut out = Self::zero(self.num_vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps: Vec<i64> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(exps, ca * cb);
            }
        }
        Ok(out)
    }

    /// Multiplies by the single term `coeff * t^exponents` in place.
    pub fn mul_term(&self, exponents: &[i64], coeff: &BigInt) -> Self {
        assert_eq!(exponents.len(), self.num_vars);
        if coeff.is_zero() {
            return Self::zero(self.num_vars);
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let exps: Vec<i64> = e.iter().zip(exponents).map(|(x, y)| x + y).collect();
                (exps, c * coeff)
            })
            .collect();
        LaurentPoly { num_vars: self.num_vars, terms }
    }

    pub fn scale(&self, factor: &BigInt) -> Self {
        self.mul_term(&vec![0; self.num_vars], factor)
    }

    /// Evaluation at (1, ..., 1): the sum of all coefficients.
    pub fn augment(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// Membership in the set of Laurent polynomials whose value at
    /// (1, ..., 1) is a unit of Z.
    pub fn is_in_u(&self) -> bool {
        self.augment().abs().is_one()
    }

    /// Substitutes `t_i := t_i^{-1}` for every variable.
    pub fn invert_vars(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e.iter().map(|x| -x).collect::<Vec<i64>>(), c.clone()))
            .collect();
        LaurentPoly { num_vars: self.num_vars, terms }
    }

    /// Maps a polynomial in `self.num_vars` variables to one in `new_num_vars`
    /// by substituting `t_i := x_{map[i]}`. Exponents of variables mapped to
    /// the same target accumulate.
    pub fn remap_variables(&self, map: &[usize], new_num_vars: usize) -> Result<Self> {
        if map.len() != self.num_vars {
            return Err(Error::Domain(format!(
                "variable map has {} entries, polynomial has {} variables",
                map.len(),
                self.num_vars
            )));
        }
        if let Some(&bad) = map.iter().find(|&&j| j >= new_num_vars) {
            return Err(Error::Domain(format!(
                "variable map target {bad} out of range for {new_num_vars} variables"
            )));
        }
        let mut out = Self::zero(new_num_vars);
        for (e, c) in &self.terms {
            let mut exps = vec![0i64; new_num_vars];
            for (i, &x) in e.iter().enumerate() {
                exps[map[i]] += x;
            }
            out.add_term(exps, c.clone());
        }
        Ok(out)
    }

    /// Lexicographically largest term, if any.
    pub fn leading_term(&self) -> Option<(&[i64], &BigInt)> {
        self.terms.iter().next_back().map(|(e, c)| (e.as_slice(), c))
    }

    /// Exact division: returns `self / divisor` when the division leaves no
    /// remainder, `None` otherwise. Works for Laurent polynomials because
    /// the lexicographic order on exponent vectors is translation-invariant.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        assert_eq!(self.num_vars, divisor.num_vars);
        let (dlead_e, dlead_c) = divisor.leading_term()?;
        let dlead_e = dlead_e.to_vec();
        let dlead_c = dlead_c.clone();
        let mut rem = self.clone();
        let mut quo = Self::zero(self.num_vars);
        while let Some((rlead_e, rlead_c)) = rem.leading_term() {
            let (qc, r) = num_integer::div_rem(rlead_c.clone(), dlead_c.clone());
            if !r.is_zero() {
                return None;
            }
            let qe: Vec<i64> = rlead_e.iter().zip(&dlead_e).map(|(a, b)| a - b).collect();
            let piece = Self::monomial(qe, qc);
            rem = rem.checked_sub(&piece.checked_mul(divisor).unwrap()).unwrap();
            quo = quo.checked_add(&piece).unwrap();
        }
        Some(quo)
    }

    /// Renders the polynomial with variables `t1, ..., tmu` (or `t` when
    /// there is a single variable), lexicographic term order.
    pub fn to_display_string(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (e, c) in &self.terms {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0)
                .map(|(i, &x)| {
                    let var = if self.num_vars == 1 {
                        "t".to_string()
                    } else {
                        format!("t{}", i + 1)
                    };
                    if x == 1 {
                        var
                    } else {
                        format!("{var}^{x}")
                    }
                })
                .collect();
            let mono = mono.join("*");
            let term = if mono.is_empty() {
                format!("{c}")
            } else if c.is_one() {
                mono
            } else if (-c).is_one() {
                format!("-{mono}")
            } else {
                format!("{c}*{mono}")
            };
            if out.is_empty() {
                out = term;
            } else if term.starts_with('-') {
                out = format!("{out} - {}", &term[1..]);
            } else {
                out = format!("{out} + {term}");
            }
        }
        out
    }
}

impl std::fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LaurentPoly({})", self.to_display_string())
    }
}

impl std::fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.to_display_string())
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait for &LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: &LaurentPoly) -> LaurentPoly {
                self.$checked(rhs).expect("variable count mismatch")
            }
        }
        impl $trait for LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect();
        LaurentPoly { num_vars: self.num_vars, terms }
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

/// A dense matrix over the Laurent ring.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentMatrix {
    rows: usize,
    cols: usize,
    num_vars: usize,
    entries: Vec<LaurentPoly>,
}

impl LaurentMatrix {
    pub fn zeros(rows: usize, cols: usize, num_vars: usize) -> Self {
        let entries = vec![LaurentPoly::zero(num_vars); rows * cols];
        LaurentMatrix { rows, cols, num_vars, entries }
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        num_vars: usize,
        mut f: impl FnMut(usize, usize) -> LaurentPoly,
    ) -> Self {
        let mut m = Self::zeros(rows, cols, num_vars);
        for r in 0..rows {
            for c in 0..cols {
                let p = f(r, c);
                assert_eq!(p.num_vars(), num_vars, "entry variable count mismatch");
                m.entries[r * cols + c] = p;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn get(&self, r: usize, c: usize) -> &LaurentPoly {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: LaurentPoly) {
        assert_eq!(value.num_vars(), self.num_vars);
        self.entries[r * self.cols + c] = value;
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, self.num_vars, |r, c| self.get(c, r).clone())
    }

    pub fn map(&self, mut f: impl FnMut(&LaurentPoly) -> LaurentPoly) -> Self {
        Self::from_fn(self.rows, self.cols, self.num_vars, |r, c| f(self.get(r, c)))
    }

    /// Rank of the matrix over the fraction field Q(t_1, ..., t_mu).
    ///
    /// Each row is first multiplied by the monomial clearing its negative
    /// exponents (monomials are units, so the rank is unchanged); the result
    /// is a polynomial matrix, which is reduced by fraction-free Bareiss
    /// elimination over Z[t_1, ..., t_mu].
    pub fn rank_over_fraction_field(&self) -> usize {
        let mut work: Vec<Vec<LaurentPoly>> = (0..self.rows)
            .map(|r| {
                let row: Vec<&LaurentPoly> = (0..self.cols).map(|c| self.get(r, c)).collect();
                clear_row_denominators(&row, self.num_vars)
            })
            .collect();

        let mut prev = LaurentPoly::one(self.num_vars);
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let Some(pivot) = (rank..self.rows).find(|&r| !work[r][col].is_zero()) else {
                continue;
            };
            work.swap(rank, pivot);
            for r in rank + 1..self.rows {
                for c in col + 1..self.cols {
                    let num = &(&work[rank][col] * &work[r][c]) - &(&work[r][col] * &work[rank][c]);
                    work[r][c] = num
                        .div_exact(&prev)
                        .expect("Bareiss division is exact by construction");
                }
                work[r][col] = LaurentPoly::zero(self.num_vars);
            }
            prev = work[rank][col].clone();
            rank += 1;
        }
        rank
    }
}

impl std::fmt::Debug for LaurentMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "LaurentMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Multiplies a row by the monomial that clears every negative exponent
/// appearing in it.
fn clear_row_denominators(row: &[&LaurentPoly], num_vars: usize) -> Vec<LaurentPoly> {
    let mut min_exp = vec![0i64; num_vars];
    for poly in row {
        for (exps, _) in poly.terms() {
            for (slot, &e) in min_exp.iter_mut().zip(exps) {
                if e < *slot {
                    *slot = e;
                }
            }
        }
    }
    let shift: Vec<i64> = min_exp.iter().map(|&e| -e).collect();
    let unit = BigInt::one();
    row.iter().map(|p| p.mul_term(&shift, &unit)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(num_vars: usize, terms: &[(&[i64], i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(
            num_vars,
            terms.iter().map(|(e, c)| (e.to_vec(), BigInt::from(*c))),
        )
    }

    #[test]
    fn monomial_distribution() {
        // (t + 1) * t^{-1} = 1 + t^{-1}
        let p = poly(1, &[(&[1], 1), (&[0], 1)]);
        let q = poly(1, &[(&[-1], 1)]);
        assert_eq!(&p * &q, poly(1, &[(&[0], 1), (&[-1], 1)]));
    }

    #[test]
    fn multiplication_by_zero_annihilates() {
        let p = poly(2, &[(&[1, 0], 3), (&[0, -2], -1)]);
        assert!((&p * &LaurentPoly::zero(2)).is_zero());
    }

    #[test]
    fn subtraction_cancels_terms() {
        // (1 + t1 + t1^2) - (1 + t2) = t1 + t1^2 - t2
        let p = poly(2, &[(&[0, 0], 1), (&[1, 0], 1), (&[2, 0], 1)]);
        let q = poly(2, &[(&[0, 0], 1), (&[0, 1], 1)]);
        let expect = poly(2, &[(&[1, 0], 1), (&[2, 0], 1), (&[0, 1], -1)]);
        assert_eq!(&p - &q, expect);
    }

    #[test]
    fn augment_sums_coefficients() {
        let p = poly(1, &[(&[0], 1), (&[1], 1), (&[2], 1)]);
        assert_eq!(p.augment(), BigInt::from(3));

        let q = poly(2, &[(&[1, 0], 1), (&[2, 0], 1), (&[0, 1], -1)]);
        assert_eq!(q.augment(), BigInt::from(1));

        // 5t^2 - 6t + 5 evaluates to 4 at t = 1.
        let r = poly(1, &[(&[2], 5), (&[1], -6), (&[0], 5)]);
        assert_eq!(r.augment(), BigInt::from(4));
    }

    #[test]
    fn unit_augmentation_membership() {
        let q = poly(2, &[(&[1, 0], 1), (&[2, 0], 1), (&[0, 1], -1)]);
        assert!(q.is_in_u());
        let r = poly(1, &[(&[2], 5), (&[1], -6), (&[0], 5)]);
        assert!(!r.is_in_u());
        assert!(!LaurentPoly::zero(1).is_in_u());
    }

    #[test]
    fn mismatched_vars_is_an_error() {
        let p = LaurentPoly::one(1);
        let q = LaurentPoly::one(2);
        assert!(matches!(
            p.checked_add(&q),
            Err(Error::VariableMismatch { left: 1, right: 2 })
        ));
    }

    #[test]
    fn exact_division_roundtrip() {
        let p = poly(2, &[(&[1, 1], 2), (&[0, 0], -3), (&[2, -1], 5)]);
        let q = poly(2, &[(&[1, -2], 7), (&[0, 0], 1)]);
        let prod = &p * &q;
        assert_eq!(prod.div_exact(&q).unwrap(), p);
        assert_eq!(prod.div_exact(&p).unwrap(), q);
        // Non-divisible pair.
        let r = poly(2, &[(&[1, 0], 1), (&[0, 0], 1)]);
        assert!(poly(2, &[(&[1, 0], 1)]).div_exact(&r).is_none());
    }

    #[test]
    fn rank_of_nonzero_1x1() {
        // [2 - t - t^{-1}]
        let h = LaurentMatrix::from_fn(1, 1, 1, |_, _| {
            poly(1, &[(&[0], 2), (&[1], -1), (&[-1], -1)])
        });
        assert_eq!(h.rank_over_fraction_field(), 1);
    }

    #[test]
    fn rank_of_empty_matrix() {
        assert_eq!(LaurentMatrix::zeros(0, 0, 1).rank_over_fraction_field(), 0);
    }

    #[test]
    fn rank_with_duplicated_row() {
        let e = poly(1, &[(&[1], 1), (&[0], -1)]);
        let z = LaurentPoly::zero(1);
        let m = LaurentMatrix::from_fn(2, 2, 1, |_, c| if c == 0 { e.clone() } else { z.clone() });
        assert_eq!(m.rank_over_fraction_field(), 1);
    }

    #[test]
    fn remap_swaps_variables() {
        // q = t1 + t1^2 - t2, swap -> t2 + t2^2 - t1
        let q = poly(2, &[(&[1, 0], 1), (&[2, 0], 1), (&[0, 1], -1)]);
        let p = q.remap_variables(&[1, 0], 2).unwrap();
        assert_eq!(p, poly(2, &[(&[0, 1], 1), (&[0, 2], 1), (&[1, 0], -1)]));
        assert_eq!(p.augment(), q.augment());
    }
}
