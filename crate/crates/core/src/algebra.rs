//! Deformation systems: the five builtin quantum algebras plus a generic
//! two-argument deformation function, with exact deformed numbers,
//! factorials and binomial coefficients.
//!
//! Every builtin carries structure-function data `(eps1, eps2, kappa)` such
//! that `[n] = kappa (eps1^n - eps2^n)/(eps1 - eps2)` reproduces the kind's
//! textbook numbers; `structure_consistency` verifies this on a probe range.

use crate::error::{Error, Result};
use crate::rexpr::{Env, RExpr};
use crate::scalar::{pow_i, rat_i, Rat};
use num::{One, Zero};
use serde::Serialize;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AlgebraKind {
    ArikCoon,
    BiedenharnMacfarlane,
    JagannathanSrinivasa,
    ChakrabartiJagannathan,
    Quesne,
    GenericR,
}

impl AlgebraKind {
    pub fn parse(s: &str) -> Result<AlgebraKind> {
        let norm = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        Ok(match norm.as_str() {
            "arik_coon" | "ac" => AlgebraKind::ArikCoon,
            "biedenharn_macfarlane" | "bm" => AlgebraKind::BiedenharnMacfarlane,
            "jagannathan_srinivasa" | "js" => AlgebraKind::JagannathanSrinivasa,
            "chakrabarti_jagannathan" | "cj" => AlgebraKind::ChakrabartiJagannathan,
            "quesne" => AlgebraKind::Quesne,
            "generic_r" | "generic" => AlgebraKind::GenericR,
            other => return Err(Error::Config(format!("unknown algebra kind: {other}"))),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            AlgebraKind::ArikCoon => "arik_coon",
            AlgebraKind::BiedenharnMacfarlane => "biedenharn_macfarlane",
            AlgebraKind::JagannathanSrinivasa => "jagannathan_srinivasa",
            AlgebraKind::ChakrabartiJagannathan => "chakrabarti_jagannathan",
            AlgebraKind::Quesne => "quesne",
            AlgebraKind::GenericR => "generic_r",
        }
    }

    pub fn is_two_parameter(&self) -> bool {
        matches!(
            self,
            AlgebraKind::JagannathanSrinivasa
                | AlgebraKind::ChakrabartiJagannathan
                | AlgebraKind::Quesne
                | AlgebraKind::GenericR
        )
    }
}

/// A deformation system: kind, exact parameters and derived structure data.
#[derive(Debug, Clone)]
pub struct AlgebraSpec {
    pub kind: AlgebraKind,
    pub p: Rat,
    pub q: Rat,
    pub tau: Rat,
    pub eps1: Rat,
    pub eps2: Rat,
    pub kappa: Rat,
    pub r_expr: Option<RExpr>,
    /// Power `a` relative to the base parameters (1 for a base algebra).
    pub power: u32,
}

/// Range over which GenericR positivity/zero probes run at construction.
const GENERIC_PROBE: i64 = 10;

impl AlgebraSpec {
    pub fn new(
        kind: AlgebraKind,
        p: Option<Rat>,
        q: Rat,
        tau: Rat,
        r_expr: Option<RExpr>,
    ) -> Result<AlgebraSpec> {
        if tau <= Rat::zero() {
            return Err(Error::ParameterDomain(format!("tau must be > 0, got {tau}")));
        }
        let one = Rat::one();
        if q <= Rat::zero() || q >= one {
            return Err(Error::ParameterDomain(format!(
                "q must lie in (0,1), got {q}"
            )));
        }
        if kind.is_two_parameter() {
            let p = p.ok_or_else(|| {
                Error::Config(format!("kind {} requires parameter p", kind.name()))
            })?;
            if p <= Rat::zero() || p >= one {
                return Err(Error::ParameterDomain(format!(
                    "p must lie in (0,1), got {p}"
                )));
            }
            if q >= p {
                return Err(Error::ParameterDomain(format!(
                    "need 0 < q < p < 1, got p={p}, q={q}"
                )));
            }
            let (eps1, eps2, kappa) = match kind {
                AlgebraKind::JagannathanSrinivasa => (p.clone(), q.clone(), one.clone()),
                AlgebraKind::ChakrabartiJagannathan => (p.recip(), q.clone(), one.clone()),
                AlgebraKind::Quesne => (p.clone(), q.recip(), &p / &q),
                AlgebraKind::GenericR => (p.clone(), q.clone(), one.clone()),
                _ => unreachable!(),
            };
            if kind == AlgebraKind::GenericR {
                let expr = r_expr
                    .ok_or_else(|| Error::Config("generic_r requires r_expr".into()))?;
                let spec = AlgebraSpec {
                    kind,
                    p,
                    q,
                    tau,
                    eps1,
                    eps2,
                    kappa,
                    r_expr: Some(expr),
                    power: 1,
                };
                spec.probe_generic()?;
                return Ok(spec);
            }
            if r_expr.is_some() {
                return Err(Error::Config(
                    "builtin kinds do not accept an r_expr".into(),
                ));
            }
            return Ok(AlgebraSpec {
                kind,
                p,
                q,
                tau,
                eps1,
                eps2,
                kappa,
                r_expr: None,
                power: 1,
            });
        }
        // one-parameter kinds
        if r_expr.is_some() {
            return Err(Error::Config(
                "builtin kinds do not accept an r_expr".into(),
            ));
        }
        let (eps1, eps2) = match kind {
            AlgebraKind::ArikCoon => (q.clone(), one.clone()),
            AlgebraKind::BiedenharnMacfarlane => (q.clone(), q.recip()),
            _ => unreachable!(),
        };
        Ok(AlgebraSpec {
            kind,
            p: p.unwrap_or_else(Rat::one),
            q,
            tau,
            eps1,
            eps2,
            kappa: one,
            r_expr: None,
            power: 1,
        })
    }

    fn probe_generic(&self) -> Result<()> {
        let expr = self.r_expr.as_ref().unwrap();
        let one = Rat::one();
        let at_one = expr.eval(&Env {
            x: &one,
            y: &one,
            p: &self.p,
            q: &self.q,
        })?;
        if !at_one.is_zero() {
            return Err(Error::ParameterDomain(format!(
                "generic R must satisfy R(1,1)=0, got {at_one}"
            )));
        }
        for n in 1..=GENERIC_PROBE {
            let v = self.number(n)?;
            if v <= Rat::zero() {
                return Err(Error::ParameterDomain(format!(
                    "generic R must be positive at (p^n,q^n) on the probe range; R(p^{n},q^{n}) = {v}"
                )));
            }
        }
        Ok(())
    }

    /// The same kind at parameters `(p^a, q^a)`, `tau^a`.
    pub fn powered(&self, a: u32) -> Result<AlgebraSpec> {
        if a == 0 {
            return Err(Error::ParameterDomain("power a must be >= 1".into()));
        }
        if a == 1 {
            return Ok(self.clone());
        }
        let pa = pow_i(&self.p, a as i64)?;
        let qa = pow_i(&self.q, a as i64)?;
        let ta = pow_i(&self.tau, a as i64)?;
        let mut s = AlgebraSpec::new(
            self.kind,
            if self.kind.is_two_parameter() {
                Some(pa)
            } else {
                None
            },
            qa,
            ta,
            self.r_expr.clone(),
        )?;
        s.power = self.power * a;
        Ok(s)
    }

    /// Deformed number `[n]`, textbook form per kind; for GenericR the
    /// expression evaluated at `(p^n, q^n)`.
    pub fn number(&self, n: i64) -> Result<Rat> {
        match self.kind {
            AlgebraKind::GenericR => {
                let x = pow_i(&self.p, n)?;
                let y = pow_i(&self.q, n)?;
                self.r_expr
                    .as_ref()
                    .unwrap()
                    .eval(&Env {
                        x: &x,
                        y: &y,
                        p: &self.p,
                        q: &self.q,
                    })
                    .map_err(|e| match e {
                        Error::Pole(m) => {
                            Error::Pole(format!("generic R pole at n={n} ({m})"))
                        }
                        other => other,
                    })
            }
            AlgebraKind::ArikCoon => {
                // (q^n - 1)/(q - 1)
                let qn = pow_i(&self.q, n)?;
                Ok((qn - Rat::one()) / (&self.q - Rat::one()))
            }
            AlgebraKind::BiedenharnMacfarlane => {
                let qn = pow_i(&self.q, n)?;
                let qmn = pow_i(&self.q, -n)?;
                Ok((qn - qmn) / (&self.q - self.q.recip()))
            }
            AlgebraKind::JagannathanSrinivasa => {
                let pn = pow_i(&self.p, n)?;
                let qn = pow_i(&self.q, n)?;
                Ok((pn - qn) / (&self.p - &self.q))
            }
            AlgebraKind::ChakrabartiJagannathan => {
                let pn = pow_i(&self.p, -n)?;
                let qn = pow_i(&self.q, n)?;
                Ok((pn - qn) / (self.p.recip() - &self.q))
            }
            AlgebraKind::Quesne => {
                let pn = pow_i(&self.p, n)?;
                let qn = pow_i(&self.q, -n)?;
                Ok((pn - qn) / (&self.q - self.p.recip()))
            }
        }
    }

    /// `kappa (eps1^n - eps2^n)/(eps1 - eps2)`, the structure-function form.
    pub fn eps_number(&self, n: i64) -> Result<Rat> {
        let e1 = pow_i(&self.eps1, n)?;
        let e2 = pow_i(&self.eps2, n)?;
        Ok(&self.kappa * (e1 - e2) / (&self.eps1 - &self.eps2))
    }

    pub fn factorial(&self, n: i64) -> Result<Rat> {
        if n < 0 {
            return Err(Error::ParameterDomain(format!(
                "factorial requires n >= 0, got {n}"
            )));
        }
        let mut acc = Rat::one();
        for k in 1..=n {
            acc *= self.number(k)?;
        }
        Ok(acc)
    }

    pub fn binomial(&self, m: i64, n: i64) -> Result<Rat> {
        if n < 0 || m < n {
            return Err(Error::ParameterDomain(format!(
                "binomial requires m >= n >= 0, got m={m}, n={n}"
            )));
        }
        Ok(self.factorial(m)? / (self.factorial(n)? * self.factorial(m - n)?))
    }

    /// Checks `[n] == kappa (eps1^n - eps2^n)/(eps1 - eps2)` over a range.
    pub fn structure_consistency(&self, lo: i64, hi: i64) -> Result<Vec<ConsistencyRecord>> {
        if self.kind == AlgebraKind::GenericR {
            return Err(Error::Config(
                "structure_consistency applies to builtin kinds".into(),
            ));
        }
        let mut out = Vec::new();
        for n in lo..=hi {
            let lhs = self.number(n)?;
            let rhs = self.eps_number(n)?;
            out.push(ConsistencyRecord {
                n,
                pass: lhs == rhs,
                value: lhs,
            });
        }
        Ok(out)
    }

    /// The kind's two dilation factors, ordered descending. These are the
    /// scale factors appearing in the kind's own difference-quotient
    /// derivative; the Jackson grid and the central-term prefactor ratio are
    /// built from them. For the master two-parameter case this is `(p, q)`.
    pub fn dilation_pair(&self) -> (Rat, Rat) {
        let (a, b) = match self.kind {
            AlgebraKind::GenericR => (self.p.clone(), self.q.clone()),
            _ => (self.eps1.clone(), self.eps2.clone()),
        };
        if a >= b {
            (a, b)
        } else {
            (b, a)
        }
    }

    /// Convergent grid ratio: smaller dilation factor over larger, `q/p` for
    /// the master two-parameter case. Always in (0,1) for valid specs.
    pub fn grid_ratio(&self) -> Rat {
        let (hi, lo) = self.dilation_pair();
        lo / hi
    }

    /// Exact `[m]/[2m]` as `1/(eps1^m + eps2^m)`, extended to `1/2` at m=0.
    pub fn m_over_2m(&self, m: i64) -> Result<Rat> {
        let e1 = pow_i(&self.eps1, m)?;
        let e2 = pow_i(&self.eps2, m)?;
        Ok((e1 + e2).recip())
    }

    /// `[2m]/[m] = eps1^m + eps2^m` (2 at m=0), the alpha-twist factor.
    pub fn twist_factor(&self, m: i64) -> Result<Rat> {
        let e1 = pow_i(&self.eps1, m)?;
        let e2 = pow_i(&self.eps2, m)?;
        Ok(e1 + e2)
    }

    /// The base deformation function evaluated at the powered dilation pair,
    /// i.e. the number produced by the a-powered derivative before the
    /// powered algebra's own normalization; `k_factor(a) * [n]_(a)` equals it
    /// for every n.
    pub fn k_factor(&self, a: u32) -> Result<Rat> {
        let r_powered = self.r_base_powered(a, 1)?;
        let powered_one = self.powered(a)?.number(1)?;
        Ok(r_powered / powered_one)
    }

    /// The base kind's deformation function at arguments `(p^{an}, q^{an})`
    /// (base denominators, powered arguments).
    pub fn r_base_powered(&self, a: u32, n: i64) -> Result<Rat> {
        let an = a as i64 * n;
        match self.kind {
            AlgebraKind::GenericR => {
                let x = pow_i(&self.p, an)?;
                let y = pow_i(&self.q, an)?;
                self.r_expr.as_ref().unwrap().eval(&Env {
                    x: &x,
                    y: &y,
                    p: &self.p,
                    q: &self.q,
                })
            }
            AlgebraKind::ArikCoon => {
                Ok((pow_i(&self.q, an)? - Rat::one()) / (&self.q - Rat::one()))
            }
            AlgebraKind::BiedenharnMacfarlane => {
                Ok((pow_i(&self.q, an)? - pow_i(&self.q, -an)?) / (&self.q - self.q.recip()))
            }
            AlgebraKind::JagannathanSrinivasa => {
                Ok((pow_i(&self.p, an)? - pow_i(&self.q, an)?) / (&self.p - &self.q))
            }
            AlgebraKind::ChakrabartiJagannathan => {
                Ok((pow_i(&self.p, -an)? - pow_i(&self.q, an)?) / (self.p.recip() - &self.q))
            }
            AlgebraKind::Quesne => {
                Ok((pow_i(&self.p, an)? - pow_i(&self.q, -an)?) / (&self.q - self.p.recip()))
            }
        }
    }

    /// Short digest used in reports.
    pub fn digest(&self) -> String {
        match self.kind {
            AlgebraKind::GenericR => format!(
                "{}(p={}, q={}, tau={}, R={})",
                self.kind.name(),
                self.p,
                self.q,
                self.tau,
                self.r_expr.as_ref().unwrap()
            ),
            k if k.is_two_parameter() => format!(
                "{}(p={}, q={}, tau={})",
                self.kind.name(),
                self.p,
                self.q,
                self.tau
            ),
            _ => format!("{}(q={}, tau={})", self.kind.name(), self.q, self.tau),
        }
    }
}

impl fmt::Display for AlgebraSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.digest())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConsistencyRecord {
    pub n: i64,
    pub pass: bool,
    #[serde(serialize_with = "crate::algebra::ser_rat")]
    pub value: Rat,
}

pub(crate) fn ser_rat<S: serde::Serializer>(r: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&crate::scalar::format_rat(r, None))
}

/// Parses a flat key-value algebra configuration document.
///
/// Recognized keys: `kind`, `p`, `q`, `tau`, `r_expr`. Rationals are written
/// `num/den`. Lines starting with `#` are comments.
pub fn parse_algebra_config(text: &str) -> Result<AlgebraSpec> {
    let mut kind = None;
    let mut p = None;
    let mut q = None;
    let mut tau = Rat::one();
    let mut r_expr = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("line {}: expected `key = value`", lineno + 1))
        })?;
        let key = key.trim();
        let value = value.trim();
        match key {
            "kind" => kind = Some(AlgebraKind::parse(value)?),
            "p" => p = Some(crate::scalar::parse_rat(value)?),
            "q" => q = Some(crate::scalar::parse_rat(value)?),
            "tau" => tau = crate::scalar::parse_rat(value)?,
            "r_expr" => r_expr = Some(RExpr::parse(value)?),
            other => {
                return Err(Error::Config(format!(
                    "line {}: unknown key `{other}`",
                    lineno + 1
                )))
            }
        }
    }
    let kind = kind.ok_or_else(|| Error::Config("missing `kind`".into()))?;
    let q = q.ok_or_else(|| Error::Config("missing `q`".into()))?;
    AlgebraSpec::new(kind, p, q, tau, r_expr)
}

/// Convenience constructors used across tests and the CLI.
pub fn js(p: Rat, q: Rat) -> AlgebraSpec {
    AlgebraSpec::new(AlgebraKind::JagannathanSrinivasa, Some(p), q, rat_i(1), None).unwrap()
}

pub fn all_builtin_specs(p: Rat, q: Rat) -> Vec<AlgebraSpec> {
    vec![
        AlgebraSpec::new(AlgebraKind::ArikCoon, None, q.clone(), rat_i(1), None).unwrap(),
        AlgebraSpec::new(
            AlgebraKind::BiedenharnMacfarlane,
            None,
            q.clone(),
            rat_i(1),
            None,
        )
        .unwrap(),
        AlgebraSpec::new(
            AlgebraKind::JagannathanSrinivasa,
            Some(p.clone()),
            q.clone(),
            rat_i(1),
            None,
        )
        .unwrap(),
        AlgebraSpec::new(
            AlgebraKind::ChakrabartiJagannathan,
            Some(p.clone()),
            q.clone(),
            rat_i(1),
            None,
        )
        .unwrap(),
        AlgebraSpec::new(AlgebraKind::Quesne, Some(p), q, rat_i(1), None).unwrap(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn js_half_third() -> AlgebraSpec {
        js(rat(1, 2), rat(1, 3))
    }

    #[test]
    fn make_algebra_populates_structure_data() {
        let s = js_half_third();
        assert_eq!(s.eps1, rat(1, 2));
        assert_eq!(s.eps2, rat(1, 3));
        assert_eq!(s.kappa, rat_i(1));

        let ac = AlgebraSpec::new(AlgebraKind::ArikCoon, None, rat(1, 2), rat_i(1), None).unwrap();
        assert_eq!(ac.eps1, rat(1, 2));
        assert_eq!(ac.eps2, rat_i(1));
        assert_eq!(ac.kappa, rat_i(1));

        // Quesne at (1/2, 1/3): eps2 = 3, kappa = 3/2, from equating
        // (p^n - q^-n)/(q - p^-1) with kappa (eps1^n - eps2^n)/(eps1 - eps2)
        // at n = 1, 2.
        let qs = AlgebraSpec::new(
            AlgebraKind::Quesne,
            Some(rat(1, 2)),
            rat(1, 3),
            rat_i(1),
            None,
        )
        .unwrap();
        assert_eq!(qs.eps1, rat(1, 2));
        assert_eq!(qs.eps2, rat_i(3));
        assert_eq!(qs.kappa, rat(3, 2));

        let cj = AlgebraSpec::new(
            AlgebraKind::ChakrabartiJagannathan,
            Some(rat(1, 2)),
            rat(1, 3),
            rat_i(1),
            None,
        )
        .unwrap();
        assert_eq!(cj.eps1, rat_i(2));
        assert_eq!(cj.eps2, rat(1, 3));

        let bm = AlgebraSpec::new(
            AlgebraKind::BiedenharnMacfarlane,
            None,
            rat(1, 2),
            rat_i(1),
            None,
        )
        .unwrap();
        assert_eq!(bm.eps1, rat(1, 2));
        assert_eq!(bm.eps2, rat_i(2));
    }

    #[test]
    fn range_violations_rejected() {
        assert!(AlgebraSpec::new(
            AlgebraKind::JagannathanSrinivasa,
            Some(rat(1, 3)),
            rat(1, 2),
            rat_i(1),
            None
        )
        .is_err());
        assert!(
            AlgebraSpec::new(AlgebraKind::ArikCoon, None, rat(3, 2), rat_i(1), None).is_err()
        );
        assert!(AlgebraSpec::new(
            AlgebraKind::GenericR,
            Some(rat(1, 2)),
            rat(1, 3),
            rat_i(1),
            None
        )
        .is_err());
        // builtin with an r_expr is a configuration error
        assert!(AlgebraSpec::new(
            AlgebraKind::ArikCoon,
            None,
            rat(1, 2),
            rat_i(1),
            Some(RExpr::parse("x").unwrap())
        )
        .is_err());
    }

    #[test]
    fn deformed_numbers_match_spec_examples() {
        let s = js_half_third();
        assert_eq!(s.number(2).unwrap(), rat(5, 6)); // p + q
        assert_eq!(s.number(0).unwrap(), rat_i(0));
        let ac = AlgebraSpec::new(AlgebraKind::ArikCoon, None, rat(1, 2), rat_i(1), None).unwrap();
        assert_eq!(ac.number(3).unwrap(), rat(7, 4));
        // [-1] for JS(1/2,1/3) is -1/(pq) = -6
        assert_eq!(s.number(-1).unwrap(), rat_i(-6));
    }

    #[test]
    fn factorial_and_binomial_examples() {
        let ac = AlgebraSpec::new(AlgebraKind::ArikCoon, None, rat(1, 2), rat_i(1), None).unwrap();
        assert_eq!(ac.factorial(0).unwrap(), rat_i(1));
        assert_eq!(ac.factorial(3).unwrap(), rat(21, 8));
        let s = js_half_third();
        assert_eq!(s.factorial(2).unwrap(), rat(5, 6));
        assert_eq!(ac.binomial(4, 2).unwrap(), rat(35, 16));
        assert_eq!(ac.binomial(5, 5).unwrap(), rat_i(1));
        assert_eq!(s.binomial(5, 0).unwrap(), rat_i(1));
        assert!(s.binomial(2, 3).is_err());
        assert!(s.factorial(-1).is_err());
    }

    #[test]
    fn structure_consistency_all_builtins() {
        for spec in all_builtin_specs(rat(1, 2), rat(1, 3)) {
            let recs = spec.structure_consistency(-10, 10).unwrap();
            assert!(recs.iter().all(|r| r.pass), "failed for {}", spec.digest());
        }
    }

    #[test]
    fn negative_index_reflection() {
        // [-n] = -(eps1 eps2)^{-n} [n] for every builtin
        for spec in all_builtin_specs(rat(1, 2), rat(1, 3)) {
            let ee = &spec.eps1 * &spec.eps2;
            for n in -10..=10i64 {
                let lhs = spec.eps_number(-n).unwrap();
                let rhs = -pow_i(&ee, -n).unwrap() * spec.eps_number(n).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn addition_law_kappa_one() {
        // [m+n] = eps1^m [n] + eps2^n [m] for kappa = 1 kinds
        for spec in all_builtin_specs(rat(1, 2), rat(1, 3)) {
            if spec.kappa != rat_i(1) {
                continue;
            }
            for m in -6..=6i64 {
                for n in -6..=6i64 {
                    let lhs = spec.number(m + n).unwrap();
                    let rhs = pow_i(&spec.eps1, m).unwrap() * spec.number(n).unwrap()
                        + pow_i(&spec.eps2, n).unwrap() * spec.number(m).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn generic_r_reproduces_js() {
        let g = AlgebraSpec::new(
            AlgebraKind::GenericR,
            Some(rat(1, 2)),
            rat(1, 3),
            rat_i(1),
            Some(RExpr::parse("(x - y)/(p - q)").unwrap()),
        )
        .unwrap();
        let s = js_half_third();
        for n in -10..=10 {
            assert_eq!(g.number(n).unwrap(), s.number(n).unwrap());
        }
    }

    #[test]
    fn generic_r_pole_names_index() {
        // R with a pole at n = 2 for p=1/2, q=1/3: 1/(x - 1/4) hits x = p^2
        let g = AlgebraSpec::new(
            AlgebraKind::GenericR,
            Some(rat(1, 2)),
            rat(1, 3),
            rat_i(1),
            Some(RExpr::parse("(x - y)/(p - q) + 0/(x - 1/1)").unwrap()),
        );
        // R(1,1) has a pole in the auxiliary term -> construction must fail
        assert!(g.is_err());
    }

    #[test]
    fn dilation_pairs() {
        let s = js_half_third();
        assert_eq!(s.dilation_pair(), (rat(1, 2), rat(1, 3)));
        assert_eq!(s.grid_ratio(), rat(2, 3));
        let ac = AlgebraSpec::new(AlgebraKind::ArikCoon, None, rat(1, 2), rat_i(1), None).unwrap();
        assert_eq!(ac.dilation_pair(), (rat_i(1), rat(1, 2)));
        assert_eq!(ac.grid_ratio(), rat(1, 2));
        let bm = AlgebraSpec::new(
            AlgebraKind::BiedenharnMacfarlane,
            None,
            rat(1, 2),
            rat_i(1),
            None,
        )
        .unwrap();
        assert_eq!(bm.grid_ratio(), rat(1, 4));
    }

    #[test]
    fn powered_numbers_and_k_factor() {
        let s = js_half_third();
        let s2 = s.powered(2).unwrap();
        // [n] under power a follows the kind at powered parameters
        assert_eq!(s2.number(1).unwrap(), rat_i(1));
        assert_eq!(s2.number(2).unwrap(), rat(13, 36)); // p^2 + q^2
        // k_factor(a) * [n]_(a) = base R at powered arguments, all n
        for a in 1..=3u32 {
            let k = s.k_factor(a).unwrap();
            let sa = s.powered(a).unwrap();
            for n in -4..=4i64 {
                assert_eq!(
                    &k * sa.number(n).unwrap(),
                    s.r_base_powered(a, n).unwrap()
                );
            }
        }
        // Quesne: same identity holds with kappa_a = (p/q)^a folded in
        let qs = AlgebraSpec::new(
            AlgebraKind::Quesne,
            Some(rat(1, 2)),
            rat(1, 3),
            rat_i(1),
            None,
        )
        .unwrap();
        for a in 1..=3u32 {
            let k = qs.k_factor(a).unwrap();
            let sa = qs.powered(a).unwrap();
            for n in -4..=4i64 {
                assert_eq!(
                    &k * sa.number(n).unwrap(),
                    qs.r_base_powered(a, n).unwrap()
                );
            }
        }
    }

    #[test]
    fn m_over_2m_rule() {
        let s = js_half_third();
        assert_eq!(s.m_over_2m(0).unwrap(), rat(1, 2));
        for m in 1..=4i64 {
            let direct = s.number(m).unwrap() / s.number(2 * m).unwrap();
            assert_eq!(s.m_over_2m(m).unwrap(), direct);
        }
    }

    #[test]
    fn config_round_trip() {
        let text = "# test algebra\nkind = js\np = 1/2\nq = 1/3\ntau = 1\n";
        let s = parse_algebra_config(text).unwrap();
        assert_eq!(s.kind, AlgebraKind::JagannathanSrinivasa);
        assert_eq!(s.number(2).unwrap(), rat(5, 6));

        let gtext = "kind = generic_r\np = 1/2\nq = 1/3\nr_expr = (x - y)/(p - q)\n";
        let g = parse_algebra_config(gtext).unwrap();
        assert_eq!(g.number(2).unwrap(), rat(5, 6));

        assert!(parse_algebra_config("kind = js\nq = 1/3\n").is_err());
    }
}
