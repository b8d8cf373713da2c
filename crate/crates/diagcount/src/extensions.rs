//! Combinators that transfer the base count N to related diagonal equations:
//! coprime exponent scaling, mixing in odd semiprimitive exponents, and
//! appending a nondegenerate quadratic form.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith;
use crate::closed_form::{count, ProblemSpec};
use crate::error::{Error, Result};
use crate::field::Field;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeltaSpec {
    /// Diagonal coefficients b_1..b_k as element indices; Delta = product.
    Coefficients(Vec<u64>),
    /// The determinant itself, as an element index.
    Determinant(u64),
}

#[derive(Debug, Clone)]
pub struct MixedSpec {
    pub base: ProblemSpec,
    pub scale: Option<Vec<u64>>,
    pub odd_parts: Option<Vec<(u64, u32)>>,
    pub quad_form: Option<(u32, DeltaSpec)>,
}

impl MixedSpec {
    pub fn new(base: ProblemSpec) -> Self {
        MixedSpec { base, scale: None, odd_parts: None, quad_form: None }
    }

    pub fn with_scale(mut self, h: Vec<u64>) -> Result<Self> {
        validate_scale(&self.base, &h)?;
        self.scale = Some(h);
        Ok(self)
    }

    pub fn with_odd_parts(mut self, parts: Vec<(u64, u32)>) -> Result<Self> {
        validate_odd_parts(&self.base, &parts)?;
        self.odd_parts = Some(parts);
        Ok(self)
    }

    pub fn with_quad_form(mut self, k: u32, delta: DeltaSpec) -> Result<Self> {
        if k == 0 || k % 2 != 0 {
            return Err(Error::OddK(k));
        }
        self.quad_form = Some((k, delta));
        Ok(self)
    }
}

/// Exponent reduction: first d_j <- gcd(d_j, q-1), then
/// w_j = gcd(d_j, lcm of the other exponents).
pub fn reduce_exponents(d: &[u64], q: &BigUint) -> Vec<u64> {
    let q1 = q - 1u32;
    let normalized: Vec<BigUint> = d
        .iter()
        .map(|&dj| BigUint::from(dj).gcd(&q1))
        .collect();
    (0..normalized.len())
        .map(|j| {
            let mut l = BigUint::one();
            for (i, di) in normalized.iter().enumerate() {
                if i != j {
                    l = l.lcm(di);
                }
            }
            normalized[j].gcd(&l).to_u64().unwrap()
        })
        .collect()
}

fn validate_scale(base: &ProblemSpec, h: &[u64]) -> Result<()> {
    if h.is_empty() || h.len() != base.n as usize {
        return Err(Error::InvalidParameter(format!(
            "need exactly n = {} scale factors",
            base.n
        )));
    }
    if h.iter().any(|&x| x == 0) {
        return Err(Error::InvalidParameter("scale factors must be positive".into()));
    }
    for i in 0..h.len() {
        for j in i + 1..h.len() {
            if arith::gcd(h[i], h[j]) != 1 {
                return Err(Error::CoprimalityViolation { a: h[i], b: h[j] });
            }
        }
    }
    let mut prod = BigUint::one() << base.m;
    for &x in h {
        prod *= x;
    }
    if !((&base.q - 1u32) % &prod).is_zero() {
        return Err(Error::DivisibilityViolation(format!(
            "2^m h_1...h_n = {prod} must divide q-1"
        )));
    }
    Ok(())
}

/// N[x_1^(2^m h_1) + ... + x_n^(2^m h_n) = 0] = N for pairwise coprime h_j
/// with 2^m h_1...h_n | q-1.
pub fn count_coprime_scaled(base: &ProblemSpec, h: &[u64]) -> Result<BigUint> {
    validate_scale(base, h)?;
    Ok(count(base)?.value)
}

fn validate_odd_parts(base: &ProblemSpec, parts: &[(u64, u32)]) -> Result<Vec<u32>> {
    if parts.is_empty() {
        return Err(Error::InvalidParameter("need at least one (u, n_j) pair".into()));
    }
    for i in 0..parts.len() {
        let (u, nj) = parts[i];
        if u <= 2 || u % 2 == 0 {
            return Err(Error::InvalidParameter(format!("u = {u} must be odd and > 2")));
        }
        if nj == 0 {
            return Err(Error::InvalidParameter("each n_j must be positive".into()));
        }
        for &(v, _) in &parts[i + 1..] {
            if arith::gcd(u, v) != 1 {
                return Err(Error::CoprimalityViolation { a: u, b: v });
            }
        }
        if !((&base.q - 1u32) % u).is_zero() {
            return Err(Error::DivisibilityViolation(format!("u = {u} must divide q-1")));
        }
    }
    // minimal l with u | p^l + 1; beyond s/2 the 2l | s requirement fails.
    let mut ls = Vec::with_capacity(parts.len());
    for &(u, _) in parts {
        let mut found = None;
        let mut pl = 1u64 % u;
        for l in 1..=base.s / 2 {
            pl = arith::mulmod(pl, base.p % u, u);
            if (pl + 1) % u == 0 {
                found = Some(l);
                break;
            }
        }
        let l = found.ok_or(Error::NotSemiprimitive { u })?;
        if base.s % (2 * l) != 0 {
            return Err(Error::DivisibilityViolation(format!(
                "2 l = {} must divide s = {}",
                2 * l,
                base.s
            )));
        }
        ls.push(l);
    }
    Ok(ls)
}

/// Mix n_j variables of exponent u_j (odd, semiprimitive) into the base
/// equation and count exactly.
pub fn count_with_odd_semiprimitive(base: &ProblemSpec, parts: &[(u64, u32)]) -> Result<BigUint> {
    let ls = validate_odd_parts(base, parts)?;
    let n_base = count(base)?.value;
    let q = BigInt::from(base.q.clone());
    let total_extra: u32 = parts.iter().map(|&(_, nj)| nj).sum();
    let mut sign_exp = 0u64;
    let mut product = BigInt::one();
    for (&(u, nj), &l) in parts.iter().zip(ls.iter()) {
        sign_exp += ((base.s as u64 / l as u64) - 1) * nj as u64;
        let u_big = BigInt::from(u);
        let u_minus_1: BigInt = &u_big - 1;
        let tail: BigInt = if nj % 2 == 0 { u_minus_1.clone() } else { -u_minus_1.clone() };
        let term = (u_minus_1.pow(nj) + tail) / &u_big;
        product *= term;
    }
    let sign = if sign_exp % 2 == 0 { BigInt::one() } else { -BigInt::one() };
    // q^((n_1+...+n_t)/2) = p^(s * total/2); s is even whenever 2l | s.
    let e = base.s as u64 * total_extra as u64 / 2;
    let half_pow = BigInt::from(base.p).pow(e as u32);
    let value = q.pow(base.n + total_extra - 1)
        + sign * (BigInt::from(n_base) - q.pow(base.n - 1)) * half_pow * product;
    value
        .to_biguint()
        .ok_or_else(|| Error::Internal("mixed count must be nonnegative".into()))
}

/// Append a nondegenerate quadratic form in k (even) variables with
/// determinant Delta:
/// N' = q^(n+k-1) + eta((-1)^(k/2) Delta) q^(k/2) (N - q^(n-1)).
pub fn count_with_quadratic_form(
    f: &Field,
    base: &ProblemSpec,
    k: u32,
    delta: &DeltaSpec,
) -> Result<BigUint> {
    if f.p() != base.p || f.s() != base.s {
        return Err(Error::InvalidParameter("field does not match the base instance".into()));
    }
    if k == 0 || k % 2 != 0 {
        return Err(Error::OddK(k));
    }
    let delta_elt = match delta {
        DeltaSpec::Determinant(idx) => f.element(*idx)?,
        DeltaSpec::Coefficients(coeffs) => {
            if coeffs.len() != k as usize {
                return Err(Error::InvalidParameter(format!("need exactly k = {k} coefficients")));
            }
            let mut acc = f.one();
            for &c in coeffs {
                acc = f.mul(acc, f.element(c)?);
            }
            acc
        }
    };
    if delta_elt == f.zero() {
        return Err(Error::DegenerateForm);
    }
    // eta((-1)^(k/2) Delta) by the Euler criterion in the constructed field.
    let mut arg = delta_elt;
    if (k / 2) % 2 == 1 {
        arg = f.neg(arg);
    }
    let euler = f.pow(arg, (f.q() - 1) / 2);
    let eta = if euler == f.one() {
        BigInt::one()
    } else {
        -BigInt::one()
    };
    let n_base = count(base)?.value;
    let q = BigInt::from(base.q.clone());
    let value = q.pow(base.n + k - 1) + eta * q.pow(k / 2) * (BigInt::from(n_base) - q.pow(base.n - 1));
    value
        .to_biguint()
        .ok_or_else(|| Error::Internal("quadratic-form count must be nonnegative".into()))
}
