//! Toy-model constraint operators on truncated coupling series, and the
//! exploratory annihilation scan.
//!
//! The grade factor `[z dz]` of the first constraint term acts on an
//! integrated-out variable; it is carried as a formal marker on the output
//! (reported, never evaluated). The operator-valued `K` factor is reduced to
//! its scalar value (grade-independent for every builtin kind).

use crate::algebra::AlgebraSpec;
use crate::combinat::BellTable;
use crate::error::{Error, Result};
use crate::scalar::{factorial, pow_i, rat_i, Rat};
use crate::series::TSeries;
use crate::special::JacksonGrid;
use num::Zero;

/// The Bell-weighted tail shared by both toy operators:
/// `sum_{k>=1} ((k+m)!/k!) B_k(t^a_1..t^a_k) d/dt_{k+m}` with
/// `t^a_k = (eps1^{ak} - eps2^{ak}) t_k`.
#[derive(Debug, Clone)]
pub struct BellTail {
    terms: Vec<(Rat, TSeries, usize)>,
    pub dropped: usize,
}

impl BellTail {
    fn build(spec: &AlgebraSpec, a: u32, m: i64, arity: usize, cap: u32) -> Result<BellTail> {
        if m < 0 {
            return Err(Error::ParameterDomain("toy operators need m >= 0".into()));
        }
        let scales: Vec<Rat> = (1..=arity)
            .map(|k| {
                Ok(pow_i(&spec.eps1, a as i64 * k as i64)?
                    - pow_i(&spec.eps2, a as i64 * k as i64)?)
            })
            .collect::<Result<_>>()?;
        let mut terms = Vec::new();
        let mut dropped = 0usize;
        let kmax = (arity as i64 - m).max(0) as u32;
        let kmax = kmax.min(20);
        let table = BellTable::build_padded(kmax, arity)?;
        for k in 1..=kmax {
            let target = k as i64 + m;
            if target > arity as i64 {
                dropped += 1;
                continue;
            }
            let bell = table.scaled(k, &scales)?.with_cap(Some(cap));
            let coef = factorial((k as i64 + m) as u32) / factorial(k);
            terms.push((coef, bell, target as usize));
        }
        Ok(BellTail { terms, dropped })
    }

    fn apply(&self, s: &TSeries) -> Result<(TSeries, usize)> {
        let mut out = TSeries::zero(s.arity(), s.cap());
        let mut dropped = self.dropped;
        for (c, bell, target) in &self.terms {
            let d = s.derivative(*target);
            if d.is_zero() {
                continue;
            }
            let (prod, dr) = bell.mul(&d)?;
            dropped += dr;
            out = out.add(&prod.scale(c))?;
        }
        Ok((out, dropped))
    }
}

/// The first constraint operator: a graded term
/// `[z dz] m! eps1^{-am} d/dt_m` (the `[z dz]` factor kept formal) plus the
/// scalar-K Bell tail `K (eps2^{a(m+1+gamma)}/(eps1^a - eps2^a)) * tail`.
#[derive(Debug, Clone)]
pub struct ToyT {
    pub spec: AlgebraSpec,
    pub a: u32,
    pub m: i64,
    pub gamma: i64,
    graded_coef: Rat,
    tail_coef: Rat,
    tail: BellTail,
}

/// Application result: the graded part carries the formal `[z dz]` marker.
#[derive(Debug, Clone)]
pub struct ToyImage {
    /// coefficient series multiplied by the formal `[z dz]_(a)` marker
    pub graded: TSeries,
    pub graded_marker: &'static str,
    pub plain: TSeries,
    pub dropped: usize,
}

pub fn build_toy_t(
    spec: &AlgebraSpec,
    a: u32,
    m: i64,
    gamma: i64,
    arity: usize,
    cap: u32,
) -> Result<ToyT> {
    let tail = BellTail::build(spec, a, m, arity, cap)?;
    let graded_coef = factorial(m as u32) * pow_i(&spec.eps1, -(a as i64) * m)?;
    let da = pow_i(&spec.eps1, a as i64)? - pow_i(&spec.eps2, a as i64)?;
    let tail_coef = spec.k_factor(a)?
        * pow_i(&spec.eps2, a as i64 * (m + 1 + gamma))?
        / da;
    Ok(ToyT {
        spec: spec.clone(),
        a,
        m,
        gamma,
        graded_coef,
        tail_coef,
        tail,
    })
}

impl ToyT {
    pub fn apply(&self, s: &TSeries) -> Result<ToyImage> {
        let graded = if self.m >= 1 && (self.m as usize) <= s.arity() {
            s.derivative(self.m as usize).scale(&self.graded_coef)
        } else if self.m == 0 {
            // d/dt_0 is not a series variable; the term contributes nothing
            TSeries::zero(s.arity(), s.cap())
        } else {
            TSeries::zero(s.arity(), s.cap())
        };
        let (tail, dropped) = self.tail.apply(s)?;
        Ok(ToyImage {
            graded,
            graded_marker: "[z dz]_(a)",
            plain: tail.scale(&self.tail_coef),
            dropped,
        })
    }
}

/// The second constraint operator:
/// `I_m = tau^{a(m+1+gamma)} sum_{k>=1} ((k+m)!/k!) B_k(t^a) d/dt_{k+m}`.
#[derive(Debug, Clone)]
pub struct ToyI {
    coef: Rat,
    tail: BellTail,
}

pub fn build_toy_i(
    spec: &AlgebraSpec,
    a: u32,
    m: i64,
    gamma: i64,
    arity: usize,
    cap: u32,
) -> Result<ToyI> {
    let tail = BellTail::build(spec, a, m, arity, cap)?;
    let coef = pow_i(&spec.tau, a as i64 * (m + 1 + gamma))?;
    Ok(ToyI { coef, tail })
}

impl ToyI {
    pub fn apply(&self, s: &TSeries) -> Result<(TSeries, usize)> {
        let (tail, dropped) = self.tail.apply(s)?;
        Ok((tail.scale(&self.coef), dropped))
    }
}

/// The truncated toy generating series on the bilateral Jackson grid:
/// `Z = sum_{n <= cap} B_n(t) mu_{n+gamma} / n!` with `mu_s` the exact
/// bilateral monomial integrals (zero for odd s, `2 xi^{s+1}/[s+1]_{P,Q}`
/// for even s >= 0; negative s are rejected).
pub fn toy_partition_series(
    spec: &AlgebraSpec,
    gamma: i64,
    xi: &Rat,
    arity: usize,
    cap: u32,
) -> Result<TSeries> {
    let grid = JacksonGrid::for_spec(spec);
    let table = BellTable::build_padded(cap.min(20), arity)?;
    let mut out = TSeries::zero(arity, Some(cap));
    for n in 0..=cap.min(20) {
        let s = n as i64 + gamma;
        if s < 0 {
            return Err(Error::Divergent(format!(
                "grid moment mu_{s} diverges (negative exponent)"
            )));
        }
        let mu = if s % 2 == 1 {
            Rat::zero()
        } else {
            rat_i(2) * pow_i(xi, s + 1)? / grid.pair_number(s + 1)
        };
        if mu.is_zero() {
            continue;
        }
        let term = table.poly(n).with_cap(Some(cap));
        out = out.add(&term.scale(&(mu / factorial(n))))?;
    }
    Ok(out)
}

/// Exploratory annihilation scan: the l1 norm of `T_m Z` and `I_m Z` on the
/// truncated toy series, per truncation cap. Reported, never asserted.
#[derive(Debug, Clone)]
pub struct AnnihilationRecord {
    pub cap: u32,
    pub t_graded_norm: f64,
    pub t_plain_norm: f64,
    pub i_norm: f64,
    pub z_norm: f64,
}

pub fn annihilation_scan(
    spec: &AlgebraSpec,
    a: u32,
    m: i64,
    gamma: i64,
    xi: &Rat,
    arity: usize,
    caps: &[u32],
) -> Result<Vec<AnnihilationRecord>> {
    let mut out = Vec::new();
    for &cap in caps {
        let z = toy_partition_series(spec, gamma, xi, arity, cap)?;
        let t = build_toy_t(spec, a, m, gamma, arity, cap)?;
        let i = build_toy_i(spec, a, m, gamma, arity, cap)?;
        let ti = t.apply(&z)?;
        let (ii, _) = i.apply(&z)?;
        out.push(AnnihilationRecord {
            cap,
            t_graded_norm: ti.graded.l1_norm_f64(),
            t_plain_norm: ti.plain.l1_norm_f64(),
            i_norm: ii.l1_norm_f64(),
            z_norm: z.l1_norm_f64(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{js, AlgebraKind, AlgebraSpec};
    use crate::scalar::rat;

    fn sp() -> AlgebraSpec {
        let mut s = js(rat(1, 2), rat(1, 3));
        s.tau = rat(1, 2);
        s
    }

    #[test]
    fn toy_i_on_single_variable() {
        // applied to t_{1+m}: single surviving term k=1 with coefficient
        // (eps1^a - eps2^a) (m+1)! tau^{a(m+1+gamma)} t_1
        let s = sp();
        for (a, m, gamma) in [(1u32, 0i64, 0i64), (1, 2, 0), (2, 1, 1)] {
            let arity = 8;
            let op = build_toy_i(&s, a, m, gamma, arity, 6).unwrap();
            let tm1 = TSeries::var(arity, Some(6), (1 + m) as usize);
            let (img, _) = op.apply(&tm1).unwrap();
            let da = pow_i(&s.eps1, a as i64).unwrap() - pow_i(&s.eps2, a as i64).unwrap();
            let coef = da
                * factorial((m + 1) as u32)
                * pow_i(&s.tau, a as i64 * (m + 1 + gamma)).unwrap();
            let mut expect = TSeries::zero(arity, Some(6));
            let mut e = vec![0u32; arity];
            e[0] = 1;
            expect.add_term(e, coef);
            assert_eq!(img, expect, "a={a} m={m} gamma={gamma}");
        }
    }

    #[test]
    fn toy_on_constant_is_zero() {
        let s = sp();
        let one = TSeries::one(8, Some(6));
        let t = build_toy_t(&s, 1, 2, 0, 8, 6).unwrap();
        let img = t.apply(&one).unwrap();
        assert!(img.graded.is_zero());
        assert!(img.plain.is_zero());
        let i = build_toy_i(&s, 1, 2, 0, 8, 6).unwrap();
        let (img, _) = i.apply(&one).unwrap();
        assert!(img.is_zero());
    }

    #[test]
    fn q_case_display_matches_bm_spec() {
        // the symmetric q-number display: same engine with the
        // Biedenharn-Macfarlane spec; coefficients compared term by term
        let q = rat(1, 2);
        let mut s =
            AlgebraSpec::new(AlgebraKind::BiedenharnMacfarlane, None, q.clone(), rat_i(1), None)
                .unwrap();
        s.tau = rat(1, 3);
        let (a, m, gamma, arity, cap) = (1u32, 1i64, 0i64, 6usize, 5u32);
        let t = build_toy_t(&s, a, m, gamma, arity, cap).unwrap();
        // graded coefficient: m! q^{-a m}
        assert_eq!(
            t.graded_coef,
            factorial(m as u32) * pow_i(&q, -(a as i64) * m).unwrap()
        );
        // tail coefficient: K(q^a) q^{-a(m+1+gamma)} / (q^a - q^-a)
        let da = pow_i(&q, a as i64).unwrap() - pow_i(&q, -(a as i64)).unwrap();
        let expect = s.k_factor(a).unwrap()
            * pow_i(&q, -(a as i64) * (m + 1 + gamma)).unwrap()
            / &da;
        assert_eq!(t.tail_coef, expect);
        // and K(q^a) is the symmetric-number gap ratio (q^a - q^-a)/(q - q^-1)
        assert_eq!(
            s.k_factor(a).unwrap(),
            da / (&q - q.recip())
        );
    }

    #[test]
    fn annihilation_scan_runs() {
        let s = sp();
        let recs = annihilation_scan(&s, 1, 1, 0, &rat_i(1), 10, &[4, 6, 8]).unwrap();
        assert_eq!(recs.len(), 3);
        for r in &recs {
            assert!(r.z_norm > 0.0);
            assert!(r.t_plain_norm.is_finite());
            assert!(r.i_norm.is_finite());
        }
    }
}
