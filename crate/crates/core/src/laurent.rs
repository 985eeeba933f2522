//! Exact Laurent polynomials in one and N variables.
//!
//! Sparse canonical representation: no stored zero coefficients, unique
//! degree keys. Negative exponents are first-class since the operators shift
//! degrees downward.

use crate::error::{Error, Result};
use crate::scalar::{pow_i, Rat};
use num::Zero;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, Rat>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(Rat::from_integer(1.into()), 0)
    }

    pub fn variable() -> Self {
        Self::monomial(Rat::from_integer(1.into()), 1)
    }

    pub fn monomial(c: Rat, k: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(k, c);
        }
        LaurentPoly { terms }
    }

    pub fn from_terms(pairs: impl IntoIterator<Item = (i64, Rat)>) -> Self {
        let mut p = Self::zero();
        for (k, c) in pairs {
            p.add_term(k, c);
        }
        p
    }

    pub fn add_term(&mut self, k: i64, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(k).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn coeff(&self, k: i64) -> Rat {
        self.terms.get(&k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&i64, &Rat)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly {
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    /// Coefficient of degree n multiplied by base^n.
    pub fn dilate(&self, base: &Rat) -> Result<Self> {
        if base.is_zero() {
            return Err(Error::ParameterDomain("dilate requires base != 0".into()));
        }
        let mut out = Self::zero();
        for (k, c) in &self.terms {
            out.add_term(*k, c * pow_i(base, *k)?);
        }
        Ok(out)
    }

    pub fn evaluate(&self, z: &Rat) -> Result<Rat> {
        let mut acc = Rat::zero();
        for (k, c) in &self.terms {
            if *k < 0 && z.is_zero() {
                return Err(Error::Pole(format!(
                    "evaluation at z=0 with negative exponent {k}"
                )));
            }
            acc += c * pow_i(z, *k)?;
        }
        Ok(acc)
    }

    /// True when only odd exponents carry nonzero coefficients.
    pub fn is_odd(&self) -> bool {
        self.terms.keys().all(|k| k.rem_euclid(2) == 1)
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(*k, c.clone());
        }
        out
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(*k, -c.clone());
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.iter().map(|(k, v)| (*k, -v.clone())).collect(),
        }
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &rhs.terms {
                out.add_term(ka + kb, ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*z")?,
                _ => write!(f, "{c}*z^{k}")?,
            }
        }
        Ok(())
    }
}

/// Exact Laurent polynomial in N variables; arity fixed at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiLaurent {
    arity: usize,
    terms: BTreeMap<Vec<i64>, Rat>,
}

impl MultiLaurent {
    pub fn zero(arity: usize) -> Self {
        MultiLaurent {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(arity: usize) -> Self {
        Self::monomial(vec![0; arity], Rat::from_integer(1.into()))
    }

    pub fn monomial(expo: Vec<i64>, c: Rat) -> Self {
        let arity = expo.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(expo, c);
        }
        MultiLaurent { arity, terms }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, expo: Vec<i64>, c: Rat) {
        assert_eq!(expo.len(), self.arity, "exponent arity mismatch");
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(expo) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<i64>, &Rat)> {
        self.terms.iter()
    }

    fn check_arity(&self, rhs: &MultiLaurent) -> Result<()> {
        if self.arity != rhs.arity {
            return Err(Error::Shape(format!(
                "arity mismatch: {} vs {}",
                self.arity, rhs.arity
            )));
        }
        Ok(())
    }

    pub fn add(&self, rhs: &MultiLaurent) -> Result<MultiLaurent> {
        self.check_arity(rhs)?;
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &MultiLaurent) -> Result<MultiLaurent> {
        self.check_arity(rhs)?;
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(k.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn mul(&self, rhs: &MultiLaurent) -> Result<MultiLaurent> {
        self.check_arity(rhs)?;
        let mut out = MultiLaurent::zero(self.arity);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &rhs.terms {
                let expo: Vec<i64> = ka.iter().zip(kb).map(|(a, b)| a + b).collect();
                out.add_term(expo, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rat) -> MultiLaurent {
        if c.is_zero() {
            return MultiLaurent::zero(self.arity);
        }
        MultiLaurent {
            arity: self.arity,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    /// Scales the chosen variable's degree-n coefficients by base^n.
    pub fn dilate(&self, var: usize, base: &Rat) -> Result<MultiLaurent> {
        if base.is_zero() {
            return Err(Error::ParameterDomain("dilate requires base != 0".into()));
        }
        if var >= self.arity {
            return Err(Error::Shape(format!(
                "variable index {var} out of range for arity {}",
                self.arity
            )));
        }
        let mut out = MultiLaurent::zero(self.arity);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c * pow_i(base, k[var])?);
        }
        Ok(out)
    }

    pub fn evaluate(&self, point: &[Rat]) -> Result<Rat> {
        if point.len() != self.arity {
            return Err(Error::Shape(format!(
                "point arity {} vs polynomial arity {}",
                point.len(),
                self.arity
            )));
        }
        let mut acc = Rat::zero();
        for (k, c) in &self.terms {
            let mut term = c.clone();
            for (e, z) in k.iter().zip(point) {
                if *e < 0 && z.is_zero() {
                    return Err(Error::Pole(format!(
                        "evaluation at a zero coordinate with negative exponent {e}"
                    )));
                }
                term *= pow_i(z, *e)?;
            }
            acc += term;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_i};

    #[test]
    fn difference_of_squares() {
        let z = LaurentPoly::variable();
        let zi = LaurentPoly::monomial(rat_i(1), -1);
        let a = &z + &zi;
        let b = &z - &zi;
        let prod = &a * &b;
        let expect =
            LaurentPoly::from_terms([(2, rat_i(1)), (-2, rat_i(-1))]);
        assert_eq!(prod, expect);
    }

    #[test]
    fn additive_identity() {
        let f = LaurentPoly::from_terms([(3, rat(2, 5)), (-1, rat_i(4))]);
        assert_eq!(&LaurentPoly::zero() + &f, f);
    }

    #[test]
    fn dilate_examples() {
        let p = rat(1, 2);
        let z2 = LaurentPoly::monomial(rat_i(1), 2);
        assert_eq!(
            z2.dilate(&p).unwrap(),
            LaurentPoly::monomial(rat(1, 4), 2)
        );
        let zi = LaurentPoly::monomial(rat_i(1), -1);
        assert_eq!(
            zi.dilate(&rat(1, 3)).unwrap(),
            LaurentPoly::monomial(rat_i(3), -1)
        );
        let f = LaurentPoly::from_terms([(0, rat_i(3)), (1, rat_i(1))]);
        let d = f.dilate(&p).unwrap();
        assert_eq!(d.coeff(0), rat_i(3));
        assert_eq!(d.coeff(1), rat(1, 2));
        assert!(f.dilate(&rat_i(0)).is_err());
    }

    #[test]
    fn evaluate_examples() {
        let f = LaurentPoly::from_terms([(2, rat_i(1)), (0, rat_i(1))]);
        assert_eq!(f.evaluate(&rat_i(2)).unwrap(), rat_i(5));
        let zi = LaurentPoly::monomial(rat_i(1), -1);
        assert_eq!(zi.evaluate(&rat(1, 3)).unwrap(), rat_i(3));
        assert!(zi.evaluate(&rat_i(0)).is_err());
    }

    #[test]
    fn multilaurent_basics() {
        // (z1 z2) * (z1^2) = z1^3 z2
        let a = MultiLaurent::monomial(vec![1, 1], rat_i(1));
        let b = MultiLaurent::monomial(vec![2, 0], rat_i(1));
        let p = a.mul(&b).unwrap();
        assert_eq!(p, MultiLaurent::monomial(vec![3, 1], rat_i(1)));
        // z1 z2^2 at (2,3) -> 18
        let m = MultiLaurent::monomial(vec![1, 2], rat_i(1));
        assert_eq!(m.evaluate(&[rat_i(2), rat_i(3)]).unwrap(), rat_i(18));
        // arity mismatch is a shape error
        let c = MultiLaurent::monomial(vec![1], rat_i(1));
        assert!(a.add(&c).is_err());
    }
}
