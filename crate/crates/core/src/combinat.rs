//! Complete Bell polynomials and their scaling identities, the Levi-Civita
//! symbol, Newton's-identity determinants and the D_N substitution identity.

use crate::error::{Error, Result};
use crate::scalar::{binomial_int, factorial, pow_i, rat_i, Rat};
use crate::series::TSeries;
use num::{One, Zero};

/// Complete Bell polynomials `B_0..B_L` as exact polynomials in `t_1..t_L`.
#[derive(Debug, Clone)]
pub struct BellTable {
    pub max_order: u32,
    pub polys: Vec<TSeries>,
}

/// Builds the table by the standard recurrence
/// `B_{n+1} = sum_i C(n,i) B_{n-i} t_{i+1}`.
pub fn bell_complete(max_order: u32) -> Result<BellTable> {
    if max_order > 20 {
        return Err(Error::Size(format!(
            "bell table capped at order 20, requested {max_order}"
        )));
    }
    let arity = max_order.max(1) as usize;
    let mut polys = vec![TSeries::one(arity, None)];
    for n in 0..max_order {
        let mut next = TSeries::zero(arity, None);
        for i in 0..=n {
            let ti = TSeries::var(arity, None, i as usize + 1);
            let (prod, _) = polys[(n - i) as usize].mul(&ti)?;
            next = next.add(&prod.scale(&binomial_int(n, i)))?;
        }
        polys.push(next);
    }
    Ok(BellTable { max_order, polys })
}

impl BellTable {
    pub fn poly(&self, l: u32) -> &TSeries {
        &self.polys[l as usize]
    }

    /// `B_l` with `t_k` replaced by `scales[k-1] * t_k`.
    pub fn scaled(&self, l: u32, scales: &[Rat]) -> Result<TSeries> {
        self.polys[l as usize].scale_vars(scales)
    }

    /// `B_l` evaluated at a point.
    pub fn eval(&self, l: u32, point: &[Rat]) -> Result<Rat> {
        self.polys[l as usize].evaluate(point)
    }
}

/// Independent oracle: `B_l` as `l!` times the `x^l` coefficient of
/// `exp(sum_s t_s x^s / s!)`, extracted from the truncated exponential.
pub fn bell_from_exponential(max_order: u32) -> Result<Vec<TSeries>> {
    let arity = max_order.max(1) as usize;
    // series in x with TSeries coefficients: represent as Vec indexed by the
    // x-power, truncated at max_order
    let n = max_order as usize;
    let mut gen: Vec<TSeries> = vec![TSeries::zero(arity, None); n + 1];
    gen[0] = TSeries::one(arity, None);
    // P = sum_s t_s x^s/s! has coefficient t_s/s! at x^s
    let mut pcoeffs: Vec<TSeries> = vec![TSeries::zero(arity, None); n + 1];
    for s in 1..=n {
        pcoeffs[s] = TSeries::var(arity, None, s).scale(&factorial(s as u32).recip());
    }
    // exp(P) = sum P^k/k!
    let mut power: Vec<TSeries> = gen.clone(); // P^0
    for k in 1..=n {
        // power <- power * P (truncate at x^n)
        let mut next: Vec<TSeries> = vec![TSeries::zero(arity, None); n + 1];
        for i in 0..=n {
            if power[i].is_zero() {
                continue;
            }
            for s in 1..=(n - i) {
                if pcoeffs[s].is_zero() {
                    continue;
                }
                let (prod, _) = power[i].mul(&pcoeffs[s])?;
                next[i + s] = next[i + s].add(&prod)?;
            }
        }
        power = next;
        let inv_kfac = factorial(k as u32).recip();
        for i in 0..=n {
            if !power[i].is_zero() {
                gen[i] = gen[i].add(&power[i].scale(&inv_kfac))?;
            }
        }
    }
    Ok((0..=n)
        .map(|l| gen[l].scale(&factorial(l as u32)))
        .collect())
}

#[derive(Debug, Clone)]
pub struct ScaledIdentityRecord {
    pub l: u32,
    pub exact: bool,
}

/// Checks, as exact polynomials, `B_l((q^k - 1) t_k) =
/// sum_nu q^nu C(l,nu) B_nu(t) B_{l-nu}(-t)` for l <= max_order,
/// and the companion truncated-series form
/// `exp(sum t_k (q x)^k / k!) = [sum_k B_k((q^k-1)t) x^k / k!] exp(sum t_l x^l / l!)`.
pub fn bell_scaled_identity(max_order: u32, q: &Rat) -> Result<Vec<ScaledIdentityRecord>> {
    if max_order > 15 {
        return Err(Error::Size("scaled identity capped at order 15".into()));
    }
    let table = bell_complete(max_order)?;
    let arity = max_order.max(1) as usize;
    let scales: Vec<Rat> = (1..=arity)
        .map(|k| pow_i(q, k as i64).map(|v| v - Rat::one()))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for l in 0..=max_order {
        let lhs = table.scaled(l, &scales)?;
        let mut rhs = TSeries::zero(arity, None);
        for nu in 0..=l {
            let b_nu = table.poly(nu);
            let b_rest = table.poly(l - nu).negate_vars();
            let (prod, _) = b_nu.mul(&b_rest)?;
            rhs = rhs.add(&prod.scale(&(pow_i(q, nu as i64)? * binomial_int(l, nu))))?;
        }
        out.push(ScaledIdentityRecord {
            l,
            exact: lhs == rhs,
        });
    }
    Ok(out)
}

/// The truncated-series companion identity, compared coefficient-wise in x
/// up to `order`.
pub fn bell_generating_identity(order: u32, q: &Rat) -> Result<bool> {
    let table = bell_complete(order)?;
    let arity = order.max(1) as usize;
    let n = order as usize;
    // LHS: exp(sum t_k q^k x^k/k!) as x-series of TSeries
    let build_exp = |var_scale: &dyn Fn(usize) -> Rat| -> Result<Vec<TSeries>> {
        let mut gen: Vec<TSeries> = vec![TSeries::zero(arity, None); n + 1];
        gen[0] = TSeries::one(arity, None);
        let mut pc: Vec<TSeries> = vec![TSeries::zero(arity, None); n + 1];
        for s in 1..=n {
            pc[s] = TSeries::var(arity, None, s)
                .scale(&(var_scale(s) * factorial(s as u32).recip()));
        }
        let mut power = gen.clone();
        for k in 1..=n {
            let mut next: Vec<TSeries> = vec![TSeries::zero(arity, None); n + 1];
            for i in 0..=n {
                if power[i].is_zero() {
                    continue;
                }
                for s in 1..=(n - i) {
                    if pc[s].is_zero() {
                        continue;
                    }
                    let (prod, _) = power[i].mul(&pc[s])?;
                    next[i + s] = next[i + s].add(&prod)?;
                }
            }
            power = next;
            let inv = factorial(k as u32).recip();
            for i in 0..=n {
                if !power[i].is_zero() {
                    gen[i] = gen[i].add(&power[i].scale(&inv))?;
                }
            }
        }
        Ok(gen)
    };
    let lhs = build_exp(&|s| pow_i(q, s as i64).unwrap())?;
    let plain = build_exp(&|_| Rat::one())?;
    // RHS: [sum_k B_k(t~) x^k/k!] * exp(sum t x^l/l!)
    let scales: Vec<Rat> = (1..=arity)
        .map(|k| pow_i(q, k as i64).map(|v| v - Rat::one()))
        .collect::<Result<_>>()?;
    let mut bell_part: Vec<TSeries> = Vec::with_capacity(n + 1);
    for k in 0..=order {
        bell_part.push(table.scaled(k, &scales)?.scale(&factorial(k).recip()));
    }
    for i in 0..=n {
        let mut rhs_i = TSeries::zero(arity, None);
        for k in 0..=i {
            let (prod, _) = bell_part[k].mul(&plain[i - k])?;
            rhs_i = rhs_i.add(&prod)?;
        }
        if rhs_i != lhs[i] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Levi-Civita symbol as the determinant of the Kronecker-delta matrix.
pub fn levi_civita(upper: &[usize], lower: &[usize]) -> Result<i64> {
    if upper.len() != lower.len() {
        return Err(Error::Shape("index lists must have equal length".into()));
    }
    if upper.len() > 6 {
        return Err(Error::Size("levi_civita capped at 6 indices".into()));
    }
    let n = upper.len();
    let m: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if upper[i] == lower[j] { 1 } else { 0 })
                .collect()
        })
        .collect();
    Ok(int_det(m))
}

fn int_det(mut m: Vec<Vec<i64>>) -> i64 {
    // Bareiss would be overkill at n <= 6 with 0/1 entries; expand by rows
    let n = m.len();
    if n == 0 {
        return 1;
    }
    if n == 1 {
        return m[0][0];
    }
    let mut det = 0i64;
    let top = m.remove(0);
    for (j, &v) in top.iter().enumerate() {
        if v == 0 {
            continue;
        }
        let minor: Vec<Vec<i64>> = m
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, x)| *x)
                    .collect()
            })
            .collect();
        let sign = if j % 2 == 0 { 1 } else { -1 };
        det += sign * v * int_det(minor);
    }
    det
}

fn rat_det(mut m: Vec<Vec<Rat>>) -> Rat {
    let n = m.len();
    let mut det = Rat::one();
    for col in 0..n {
        let piv = match (col..n).find(|&r| !m[r][col].is_zero()) {
            Some(p) => p,
            None => return Rat::zero(),
        };
        if piv != col {
            m.swap(col, piv);
            det = -det;
        }
        let pv = m[col][col].clone();
        det *= &pv;
        for r in (col + 1)..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &pv;
            for c2 in col..n {
                let v = &m[col][c2] * &f;
                m[r][c2] -= v;
            }
        }
    }
    det
}

/// Power sums `nu_k = sum_i z_i^k`.
fn power_sums(zs: &[Rat], upto: usize) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); upto + 1];
    for k in 1..=upto {
        out[k] = zs.iter().map(|z| pow_i(z, k as i64).unwrap()).sum();
    }
    out
}

/// Newton's-identity matrix: row i (1-indexed) is
/// `[nu_i, nu_{i-1}, ..., nu_1, i]` padded with zeros, the superdiagonal
/// entry `i` omitted on the last row.
fn newton_matrix(nu: &[Rat], n: usize, stretch: usize) -> Vec<Vec<Rat>> {
    // stretch = 1 gives nu_k entries; stretch = 2 gives nu_{2k} (D_N case)
    (1..=n)
        .map(|i| {
            (1..=n)
                .map(|j| {
                    if j <= i {
                        nu[stretch * (i - j + 1)].clone()
                    } else if j == i + 1 {
                        rat_i(i as i64)
                    } else {
                        Rat::zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// Returns `(prod z_i, det(power-sum matrix)/N!)`; the two must be equal.
pub fn newton_product(zs: &[Rat]) -> Result<(Rat, Rat)> {
    let n = zs.len();
    if n == 0 || n > 8 {
        return Err(Error::Size("newton_product supports 1 <= N <= 8".into()));
    }
    let nu = power_sums(zs, n);
    let m = newton_matrix(&nu, n, 1);
    let det = rat_det(m) / factorial(n as u32);
    let prod = zs.iter().fold(Rat::one(), |acc, z| acc * z);
    Ok((prod, det))
}

/// The D_N substitution: `nu_{2k}` replaces `(2k)! d/dt_{2k}` in the
/// determinant (each derivative acting on the exponential multiplies by
/// `nu_{2k}/(2k)!`); returns `(prod z_j^2, substituted determinant)`.
pub fn dn_substitution(zs: &[Rat]) -> Result<(Rat, Rat)> {
    let n = zs.len();
    if n == 0 || n > 6 {
        return Err(Error::Size("dn_substitution supports 1 <= N <= 6".into()));
    }
    let nu = power_sums(zs, 2 * n);
    let m = newton_matrix(&nu, n, 2);
    let det = rat_det(m) / factorial(n as u32);
    let prod = zs
        .iter()
        .fold(Rat::one(), |acc, z| acc * z * z);
    Ok((prod, det))
}
