//! Grade functions: exact functions of an integer degree n, canonically a
//! finite sum of terms `r * beta^n * n^k`.
//!
//! These are the coefficient language of every graded operator: deformed
//! numbers, dilation prefactors and the degree operator all live here.
//! Closed forms are closed under addition, multiplication and the shift
//! `n -> n + s`, so operator composition stays exact and equality is
//! decidable by canonical comparison. A pointwise mode covers generic
//! deformation functions whose numbers have no two-base closed form.

use crate::algebra::AlgebraSpec;
use crate::error::Result;
use crate::scalar::{binomial_int, pow_i, rat_i, Rat};
use num::{One, Zero};
use std::fmt;
use std::sync::Arc;

/// One closed term `coef * base^n * n^pow`; `base != 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct GTerm {
    pub coef: Rat,
    pub base: Rat,
    pub pow: u32,
}

#[derive(Clone)]
pub enum GradeFn {
    Closed(Vec<GTerm>),
    Pointwise(Arc<dyn Fn(i64) -> Result<Rat> + Send + Sync>),
}

impl fmt::Debug for GradeFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GradeFn::Closed(ts) => write!(f, "GradeFn::Closed({ts:?})"),
            GradeFn::Pointwise(_) => write!(f, "GradeFn::Pointwise(..)"),
        }
    }
}

impl GradeFn {
    pub fn zero() -> Self {
        GradeFn::Closed(Vec::new())
    }

    pub fn constant(c: Rat) -> Self {
        GradeFn::Closed(vec![GTerm {
            coef: c,
            base: Rat::one(),
            pow: 0,
        }])
        .canonical()
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    /// `c * base^n`.
    pub fn exponential(c: Rat, base: Rat) -> Self {
        assert!(!base.is_zero(), "grade-function base must be nonzero");
        GradeFn::Closed(vec![GTerm {
            coef: c,
            base,
            pow: 0,
        }])
        .canonical()
    }

    /// `c * n^k`; `degree(1, 1)` is the plain degree operator coefficient.
    pub fn degree_power(c: Rat, k: u32) -> Self {
        GradeFn::Closed(vec![GTerm {
            coef: c,
            base: Rat::one(),
            pow: k,
        }])
        .canonical()
    }

    /// The deformed number `[n]` of a spec as a grade function: a two-term
    /// closed form for structure-function kinds, pointwise for GenericR.
    pub fn deformed_number(spec: &AlgebraSpec) -> Self {
        if spec.kind == crate::algebra::AlgebraKind::GenericR {
            let s = spec.clone();
            return GradeFn::Pointwise(Arc::new(move |n| s.number(n)));
        }
        let denom = &spec.eps1 - &spec.eps2;
        let c1 = &spec.kappa / &denom;
        let c2 = -&spec.kappa / denom;
        GradeFn::Closed(vec![
            GTerm {
                coef: c1,
                base: spec.eps1.clone(),
                pow: 0,
            },
            GTerm {
                coef: c2,
                base: spec.eps2.clone(),
                pow: 0,
            },
        ])
        .canonical()
    }

    /// `[n + off]` for a fixed integer offset.
    pub fn deformed_number_shift(spec: &AlgebraSpec, off: i64) -> Self {
        Self::deformed_number(spec).shift(off)
    }

    pub fn eval(&self, n: i64) -> Result<Rat> {
        match self {
            GradeFn::Closed(terms) => {
                let mut acc = Rat::zero();
                for t in terms {
                    let npow = pow_i(&rat_i(n), t.pow as i64)?;
                    acc += &t.coef * pow_i(&t.base, n)? * npow;
                }
                Ok(acc)
            }
            GradeFn::Pointwise(f) => f(n),
        }
    }

    pub fn is_closed(&self) -> bool {
        matches!(self, GradeFn::Closed(_))
    }

    pub fn canonical(self) -> Self {
        match self {
            GradeFn::Closed(mut terms) => {
                terms.sort_by(|a, b| (&a.base, a.pow).cmp(&(&b.base, b.pow)));
                let mut merged: Vec<GTerm> = Vec::new();
                for t in terms {
                    if t.coef.is_zero() {
                        continue;
                    }
                    if let Some(last) = merged.last_mut() {
                        if last.base == t.base && last.pow == t.pow {
                            last.coef += t.coef;
                            if last.coef.is_zero() {
                                merged.pop();
                            }
                            continue;
                        }
                    }
                    merged.push(t);
                }
                GradeFn::Closed(merged)
            }
            pw => pw,
        }
    }

    pub fn is_zero_closed(&self) -> Option<bool> {
        match self {
            GradeFn::Closed(ts) => Some(ts.is_empty()),
            GradeFn::Pointwise(_) => None,
        }
    }

    pub fn add(&self, rhs: &GradeFn) -> GradeFn {
        match (self, rhs) {
            (GradeFn::Closed(a), GradeFn::Closed(b)) => {
                let mut terms = a.clone();
                terms.extend(b.iter().cloned());
                GradeFn::Closed(terms).canonical()
            }
            _ => {
                let (a, b) = (self.clone(), rhs.clone());
                GradeFn::Pointwise(Arc::new(move |n| Ok(a.eval(n)? + b.eval(n)?)))
            }
        }
    }

    pub fn neg(&self) -> GradeFn {
        match self {
            GradeFn::Closed(ts) => GradeFn::Closed(
                ts.iter()
                    .map(|t| GTerm {
                        coef: -t.coef.clone(),
                        base: t.base.clone(),
                        pow: t.pow,
                    })
                    .collect(),
            ),
            GradeFn::Pointwise(f) => {
                let f = f.clone();
                GradeFn::Pointwise(Arc::new(move |n| Ok(-f(n)?)))
            }
        }
    }

    pub fn sub(&self, rhs: &GradeFn) -> GradeFn {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &GradeFn) -> GradeFn {
        match (self, rhs) {
            (GradeFn::Closed(a), GradeFn::Closed(b)) => {
                let mut terms = Vec::with_capacity(a.len() * b.len());
                for ta in a {
                    for tb in b {
                        terms.push(GTerm {
                            coef: &ta.coef * &tb.coef,
                            base: &ta.base * &tb.base,
                            pow: ta.pow + tb.pow,
                        });
                    }
                }
                GradeFn::Closed(terms).canonical()
            }
            _ => {
                let (a, b) = (self.clone(), rhs.clone());
                GradeFn::Pointwise(Arc::new(move |n| Ok(a.eval(n)? * b.eval(n)?)))
            }
        }
    }

    pub fn scale(&self, c: &Rat) -> GradeFn {
        self.mul(&GradeFn::constant(c.clone()))
    }

    /// The function `n -> f(n + s)`, closed under the closed form:
    /// `beta^{n+s}(n+s)^k` expands binomially.
    pub fn shift(&self, s: i64) -> GradeFn {
        if s == 0 {
            return self.clone();
        }
        match self {
            GradeFn::Closed(ts) => {
                let mut terms = Vec::new();
                for t in ts {
                    let base_pow = pow_i(&t.base, s).expect("nonzero base");
                    let srat = rat_i(s);
                    for j in 0..=t.pow {
                        let coeff = &t.coef
                            * &base_pow
                            * binomial_int(t.pow, j)
                            * pow_i(&srat, (t.pow - j) as i64).unwrap();
                        terms.push(GTerm {
                            coef: coeff,
                            base: t.base.clone(),
                            pow: j,
                        });
                    }
                }
                GradeFn::Closed(terms).canonical()
            }
            GradeFn::Pointwise(f) => {
                let f = f.clone();
                GradeFn::Pointwise(Arc::new(move |n| f(n + s)))
            }
        }
    }

    /// Exact equality for closed forms; pointwise pairs compare over the
    /// given probe range.
    pub fn eq_on(&self, rhs: &GradeFn, lo: i64, hi: i64) -> Result<bool> {
        match (self, rhs) {
            (GradeFn::Closed(_), GradeFn::Closed(_)) => {
                Ok(self.clone().canonical().closed_eq(&rhs.clone().canonical()))
            }
            _ => {
                for n in lo..=hi {
                    if self.eval(n)? != rhs.eval(n)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    fn closed_eq(&self, rhs: &GradeFn) -> bool {
        match (self, rhs) {
            (GradeFn::Closed(a), GradeFn::Closed(b)) => a == b,
            _ => false,
        }
    }
}

impl fmt::Display for GradeFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GradeFn::Pointwise(_) => write!(f, "<pointwise>"),
            GradeFn::Closed(ts) => {
                if ts.is_empty() {
                    return write!(f, "0");
                }
                let mut first = true;
                for t in ts {
                    if !first {
                        write!(f, " + ")?;
                    }
                    first = false;
                    write!(f, "{}", t.coef)?;
                    if !t.base.is_one() {
                        write!(f, "*({})^n", t.base)?;
                    }
                    if t.pow > 0 {
                        write!(f, "*n^{}", t.pow)?;
                    }
                }
                Ok(())
            }
        }
    }
}
