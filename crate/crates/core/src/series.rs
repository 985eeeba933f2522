//! Exact multivariate polynomials / truncated series in the coupling
//! variables `t_1..t_K`.
//!
//! One representation serves two uses: uncapped (`cap = None`) exact
//! polynomials such as Bell tables, and total-degree-capped carriers for the
//! constraint operators. Capped arithmetic drops monomials beyond the cap
//! and reports how many were dropped, so operator applications can surface
//! truncation loss.

use crate::error::{Error, Result};
use crate::scalar::{factorial, Rat};
use num::Zero;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TSeries {
    arity: usize,
    cap: Option<u32>,
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl TSeries {
    pub fn zero(arity: usize, cap: Option<u32>) -> Self {
        TSeries {
            arity,
            cap,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(arity: usize, cap: Option<u32>, c: Rat) -> Self {
        let mut s = Self::zero(arity, cap);
        s.add_term(vec![0; arity], c);
        s
    }

    pub fn one(arity: usize, cap: Option<u32>) -> Self {
        Self::constant(arity, cap, Rat::from_integer(1.into()))
    }

    /// The variable `t_i` (1-indexed).
    pub fn var(arity: usize, cap: Option<u32>, i: usize) -> Self {
        assert!(i >= 1 && i <= arity, "variable index out of range");
        let mut e = vec![0u32; arity];
        e[i - 1] = 1;
        let mut s = Self::zero(arity, cap);
        s.add_term(e, Rat::from_integer(1.into()));
        s
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn cap(&self) -> Option<u32> {
        self.cap
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<u32>, &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, expo: &[u32]) -> Rat {
        self.terms.get(expo).cloned().unwrap_or_else(Rat::zero)
    }

    fn within_cap(&self, expo: &[u32]) -> bool {
        match self.cap {
            None => true,
            Some(d) => expo.iter().sum::<u32>() <= d,
        }
    }

    /// Adds one monomial; returns false when the cap dropped it.
    pub fn add_term(&mut self, expo: Vec<u32>, c: Rat) -> bool {
        assert_eq!(expo.len(), self.arity, "exponent arity mismatch");
        if c.is_zero() {
            return true;
        }
        if !self.within_cap(&expo) {
            return false;
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
        true
    }

    fn check_compat(&self, rhs: &TSeries) -> Result<()> {
        if self.arity != rhs.arity {
            return Err(Error::Shape(format!(
                "series arity mismatch: {} vs {}",
                self.arity, rhs.arity
            )));
        }
        Ok(())
    }

    pub fn add(&self, rhs: &TSeries) -> Result<TSeries> {
        self.check_compat(rhs)?;
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &TSeries) -> Result<TSeries> {
        self.check_compat(rhs)?;
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rat) -> TSeries {
        if c.is_zero() {
            return TSeries::zero(self.arity, self.cap);
        }
        TSeries {
            arity: self.arity,
            cap: self.cap,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// Product; the second return value counts cap-dropped monomials.
    pub fn mul(&self, rhs: &TSeries) -> Result<(TSeries, usize)> {
        self.check_compat(rhs)?;
        let mut out = TSeries::zero(self.arity, self.cap);
        let mut dropped = 0usize;
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let expo: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                if !out.add_term(expo, ca * cb) {
                    dropped += 1;
                }
            }
        }
        Ok((out, dropped))
    }

    /// `d/dt_i` (1-indexed).
    pub fn derivative(&self, i: usize) -> TSeries {
        assert!(i >= 1 && i <= self.arity);
        let mut out = TSeries::zero(self.arity, self.cap);
        for (e, c) in &self.terms {
            if e[i - 1] == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[i - 1] -= 1;
            out.add_term(ne, c * Rat::from_integer((e[i - 1] as i64).into()));
        }
        out
    }

    /// Substitutes `t_k -> s_k t_k` (per-variable scaling).
    pub fn scale_vars(&self, scales: &[Rat]) -> Result<TSeries> {
        if scales.len() != self.arity {
            return Err(Error::Shape("scale vector arity mismatch".into()));
        }
        let mut out = TSeries::zero(self.arity, self.cap);
        for (e, c) in &self.terms {
            let mut f = c.clone();
            for (exp, s) in e.iter().zip(scales) {
                f *= crate::scalar::pow_i(s, *exp as i64)?;
            }
            out.add_term(e.clone(), f);
        }
        Ok(out)
    }

    /// Substitutes `t_k -> -t_k`.
    pub fn negate_vars(&self) -> TSeries {
        let mut out = TSeries::zero(self.arity, self.cap);
        for (e, c) in &self.terms {
            let total: u32 = e.iter().sum();
            let sign = if total % 2 == 0 { c.clone() } else { -c.clone() };
            out.add_term(e.clone(), sign);
        }
        out
    }

    pub fn evaluate(&self, point: &[Rat]) -> Result<Rat> {
        if point.len() != self.arity {
            return Err(Error::Shape("evaluation point arity mismatch".into()));
        }
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (exp, z) in e.iter().zip(point) {
                term *= crate::scalar::pow_i(z, *exp as i64)?;
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Recaps the series (dropping overflow monomials silently).
    pub fn with_cap(&self, cap: Option<u32>) -> TSeries {
        let mut out = TSeries::zero(self.arity, cap);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    /// l1 norm of the coefficients as f64 (residual scans).
    pub fn l1_norm_f64(&self) -> f64 {
        self.terms
            .values()
            .map(|c| crate::scalar::to_f64(c).abs())
            .sum()
    }
}

impl fmt::Display for TSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (i, p) in e.iter().enumerate() {
                if *p > 0 {
                    write!(f, "*t{}", i + 1)?;
                    if *p > 1 {
                        write!(f, "^{p}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Truncated exponential of a series with zero constant term:
/// `sum_{k<=order} P^k / k!`.
pub fn exp_truncated(p: &TSeries, order: u32) -> Result<TSeries> {
    if !p.coeff(&vec![0; p.arity()]).is_zero() {
        return Err(Error::Shape(
            "exp_truncated requires a zero constant term".into(),
        ));
    }
    let mut acc = TSeries::one(p.arity(), p.cap());
    let mut power = TSeries::one(p.arity(), p.cap());
    for k in 1..=order {
        power = power.mul(p)?.0;
        if power.is_zero() {
            break;
        }
        acc = acc.add(&power.scale(&factorial(k).recip()))?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_i};

    #[test]
    fn arithmetic_and_cap() {
        let t1 = TSeries::var(2, Some(2), 1);
        let t2 = TSeries::var(2, Some(2), 2);
        let (p, dropped) = t1.add(&t2).unwrap().mul(&t1.add(&t2).unwrap()).unwrap();
        assert_eq!(dropped, 0);
        assert_eq!(p.coeff(&[2, 0]), rat_i(1));
        assert_eq!(p.coeff(&[1, 1]), rat_i(2));
        // cap 2: cubing drops everything of degree 3
        let (q, dropped) = p.mul(&t1).unwrap();
        assert!(q.is_zero());
        assert_eq!(dropped, 3);
    }

    #[test]
    fn derivative_rule() {
        // d/dt1 (t1^2 t2) = 2 t1 t2
        let mut s = TSeries::zero(2, None);
        s.add_term(vec![2, 1], rat_i(1));
        let d = s.derivative(1);
        assert_eq!(d.coeff(&[1, 1]), rat_i(2));
    }

    #[test]
    fn exp_of_single_variable() {
        // exp(t1) truncated at total degree 3
        let t1 = TSeries::var(1, Some(3), 1);
        let e = exp_truncated(&t1, 5).unwrap();
        assert_eq!(e.coeff(&[0]), rat_i(1));
        assert_eq!(e.coeff(&[1]), rat_i(1));
        assert_eq!(e.coeff(&[2]), rat(1, 2));
        assert_eq!(e.coeff(&[3]), rat(1, 6));
    }

    #[test]
    fn order_independence_under_cap() {
        // capped arithmetic is order independent: (a+b)*c == a*c + b*c
        let a = TSeries::var(2, Some(3), 1);
        let b = TSeries::var(2, Some(3), 2);
        let (ab_c, _) = a.add(&b).unwrap().mul(&a).unwrap();
        let (ac, _) = a.mul(&a).unwrap();
        let (bc, _) = b.mul(&a).unwrap();
        assert_eq!(ab_c, ac.add(&bc).unwrap());
    }
}
