//! Quadratic partitions p^k = A^2 + 2B^2 and p^k = C^2 + D^2, normalized so
//! the first component is = 3 (mod 4) and not divisible by p. The first
//! component is then unique; the second is reported unsigned since every
//! consumer uses it in sign-symmetric pairs.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoBSquarePartition {
    pub p: u64,
    pub k: u32,
    pub a: BigInt,
    pub abs_b: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoSquarePartition {
    pub p: u64,
    pub k: u32,
    pub c: BigInt,
    pub abs_d: BigUint,
}

/// Tonelli-Shanks square root mod an odd prime; returns the smaller of the
/// two roots.
pub fn sqrt_mod(a: u64, p: u64) -> Result<u64> {
    if p == 2 {
        return Ok(a % 2);
    }
    let a = a % p;
    if a == 0 {
        return Ok(0);
    }
    if arith::powmod(a, (p - 1) / 2, p) != 1 {
        return Err(Error::NonResidue { a, p });
    }
    let r = if p % 4 == 3 {
        arith::powmod(a, (p + 1) / 4, p)
    } else {
        // p = 1 (mod 4): full Tonelli-Shanks with the smallest non-residue.
        let mut z = 2;
        while arith::powmod(z, (p - 1) / 2, p) != p - 1 {
            z += 1;
        }
        let mut m = arith::v2(p - 1);
        let mut d = (p - 1) >> m;
        let mut c = arith::powmod(z, d, p);
        let mut t = arith::powmod(a, d, p);
        d = (d + 1) / 2;
        let mut r = arith::powmod(a, d, p);
        while t != 1 {
            let mut i = 0;
            let mut tt = t;
            while tt != 1 {
                tt = arith::mulmod(tt, tt, p);
                i += 1;
            }
            let b = arith::powmod(c, 1 << (m - i - 1), p);
            r = arith::mulmod(r, b, p);
            c = arith::mulmod(b, b, p);
            t = arith::mulmod(t, c, p);
            m = i;
        }
        r
    };
    Ok(r.min(p - r))
}

/// Lift r with r^2 = a (mod p) to a root of x^2 = a (mod p^k), p odd.
fn hensel_sqrt(a: &BigUint, r0: u64, p: u64, k: u32) -> BigUint {
    let pb = BigUint::from(p);
    let mut modulus = pb.clone();
    let mut r = BigUint::from(r0);
    for _ in 1..k {
        let next = &modulus * &pb;
        // r <- r - (r^2 - a) * (2r)^{-1}, computed mod next
        let r2 = (&r * &r) % &next;
        let a_red = a % &next;
        let diff = if r2 >= a_red { &r2 - &a_red } else { &next - (&a_red - &r2) };
        let two_r = (&r * 2u32) % &next;
        let inv = two_r.modpow(&(&next / &pb * (&pb - 1u32) - 1u32), &next);
        // Euler's theorem needs phi(p^j) = p^(j-1)(p-1); inv = (2r)^(phi-1)
        let corr = (diff * inv) % &next;
        r = if r >= corr { r - corr } else { &next - (corr - r) };
        modulus = next;
    }
    r
}

/// Primitive representation x^2 + d y^2 = m from a square root r0 of -d
/// mod m, by the classical Euclidean descent.
pub fn cornacchia(d: u32, m: &BigUint, r0: &BigUint) -> Result<(BigUint, BigUint)> {
    if m <= &BigUint::one() || m.is_even() {
        return Err(Error::InvalidParameter("cornacchia needs odd M > 1".into()));
    }
    let rr = (r0 * r0 + BigUint::from(d)) % m;
    if !rr.is_zero() {
        return Err(Error::InvalidParameter("r0 is not a square root of -d".into()));
    }
    // take the root in (m/2, m)
    let half = m / 2u32;
    let mut b = if r0 > &half { r0.clone() } else { m - r0 };
    let mut a = m.clone();
    while &b * &b >= *m {
        let r = a % &b;
        a = std::mem::replace(&mut b, r);
    }
    let x = b;
    let rem = m - &x * &x;
    let (quo, remdr) = rem.div_rem(&BigUint::from(d));
    if !remdr.is_zero() {
        return Err(Error::NoRepresentation { d });
    }
    let y = quo.sqrt();
    if &y * &y != quo {
        return Err(Error::NoRepresentation { d });
    }
    Ok((x, y))
}

fn representation(p: u64, k: u32, d: u32) -> Result<(BigUint, BigUint)> {
    let m = BigUint::from(p).pow(k);
    let neg_d = (p - (d as u64) % p) % p;
    let r_p = sqrt_mod(neg_d, p)?;
    let r = hensel_sqrt(&(&m - BigUint::from(d)), r_p, p, k);
    cornacchia(d, &m, &r)
}

/// Flip sign so the value is = 3 (mod 4); the input must be odd.
fn normalize_mod4(x: &BigUint) -> BigInt {
    debug_assert!(x.is_odd());
    let xi = BigInt::from(x.clone());
    if x % 4u32 == BigUint::from(3u32) {
        xi
    } else {
        -xi
    }
}

/// p^k = A^2 + 2B^2 with A = 3 (mod 4), p not dividing A; p = 3 (mod 8).
pub fn partition_2b(p: u64, k: u32) -> Result<TwoBSquarePartition> {
    if p % 8 != 3 {
        return Err(Error::InvalidParameter(format!("p = {p} is not 3 (mod 8)")));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let (x, y) = representation(p, k, 2)?;
    debug_assert!(x.is_odd());
    let a = normalize_mod4(&x);
    if (a.magnitude() % p).is_zero() {
        return Err(Error::Internal("primitive representation divisible by p".into()));
    }
    Ok(TwoBSquarePartition { p, k, a, abs_b: y })
}

/// p^k = C^2 + D^2 with C = 3 (mod 4), p not dividing C; p = 5 (mod 8).
pub fn partition_d(p: u64, k: u32) -> Result<TwoSquarePartition> {
    if p % 8 != 5 {
        return Err(Error::InvalidParameter(format!("p = {p} is not 5 (mod 8)")));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let (x, y) = representation(p, k, 1)?;
    // exactly one of x, y is odd
    let (odd, even) = if x.is_odd() { (x, y) } else { (y, x) };
    let c = normalize_mod4(&odd);
    if (c.magnitude() % p).is_zero() {
        return Err(Error::Internal("primitive representation divisible by p".into()));
    }
    Ok(TwoSquarePartition { p, k, c, abs_d: even })
}

impl TwoBSquarePartition {
    pub fn verify(&self) -> bool {
        let m = BigInt::from(self.p).pow(self.k);
        let b = BigInt::from(self.abs_b.clone());
        &self.a * &self.a + 2 * &b * &b == m
            && self.a.mod_floor(&BigInt::from(4)) == BigInt::from(3)
            && !(&self.a % self.p).is_zero()
    }
}

impl TwoSquarePartition {
    pub fn verify(&self) -> bool {
        let m = BigInt::from(self.p).pow(self.k);
        let d = BigInt::from(self.abs_d.clone());
        &self.c * &self.c + &d * &d == m
            && self.c.mod_floor(&BigInt::from(4)) == BigInt::from(3)
            && !(&self.c % self.p).is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exhaustive-search oracle: all normalized (first, second) with
    /// first^2 + d*second^2 = p^k, first = 3 (mod 4), p not dividing first.
    fn exhaustive(p: u64, k: u32, d: u64) -> Vec<(i64, u64)> {
        let m = (p as i64).pow(k);
        let mut out = Vec::new();
        let mut y = 0i64;
        while d as i64 * y * y <= m {
            let rest = m - d as i64 * y * y;
            let x = (rest as f64).sqrt() as i64;
            for cand in [x - 1, x, x + 1] {
                if cand >= 0 && cand * cand == rest {
                    for signed in [cand, -cand] {
                        if signed.rem_euclid(4) == 3 && signed.rem_euclid(p as i64) != 0 {
                            out.push((signed, y as u64));
                        }
                    }
                }
            }
            y += 1;
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    #[test]
    fn sqrt_mod_examples() {
        assert_eq!(sqrt_mod(1, 7).unwrap(), 1);
        // -2 mod 11 = 9; 3^2 = 9
        assert_eq!(sqrt_mod(9, 11).unwrap(), 3);
        // -1 mod 13 = 12; roots {5, 8}
        assert_eq!(sqrt_mod(12, 13).unwrap(), 5);
        assert!(matches!(sqrt_mod(2, 3), Err(Error::NonResidue { .. })));
    }

    #[test]
    fn partition_2b_matches_exhaustive_oracle() {
        for (p, k) in [(3u64, 1u32), (3, 2), (3, 4), (11, 1), (11, 2), (19, 1), (19, 3)] {
            let oracle = exhaustive(p, k, 2);
            assert_eq!(oracle.len(), 1, "normalized partition must be unique for {p}^{k}");
            let got = partition_2b(p, k).unwrap();
            assert!(got.verify());
            assert_eq!(got.a, BigInt::from(oracle[0].0));
            assert_eq!(got.abs_b, BigUint::from(oracle[0].1));
        }
    }

    #[test]
    fn partition_2b_frozen_values() {
        // 9 = (-1)^2 + 2*2^2
        let x = partition_2b(3, 2).unwrap();
        assert_eq!((x.a.clone(), x.abs_b.clone()), (BigInt::from(-1), BigUint::from(2u32)));
        // 11 = 3^2 + 2*1^2 (3 = 3 mod 4, -3 = 1 mod 4)
        let x = partition_2b(11, 1).unwrap();
        assert_eq!((x.a.clone(), x.abs_b.clone()), (BigInt::from(3), BigUint::from(1u32)));
        // 81 = 7^2 + 2*4^2
        let x = partition_2b(3, 4).unwrap();
        assert_eq!((x.a.clone(), x.abs_b.clone()), (BigInt::from(7), BigUint::from(4u32)));
    }

    #[test]
    fn partition_d_matches_exhaustive_oracle() {
        for (p, k) in [(5u64, 1u32), (5, 2), (5, 3), (13, 1), (13, 2), (29, 1), (29, 2)] {
            let oracle = exhaustive(p, k, 1);
            // oracle lists (C, |D|) and (|D'|... ) both orders; filter odd first
            let oracle: Vec<_> = oracle.into_iter().filter(|(c, _)| c % 2 != 0).collect();
            assert_eq!(oracle.len(), 1, "normalized partition must be unique for {p}^{k}");
            let got = partition_d(p, k).unwrap();
            assert!(got.verify());
            assert_eq!(got.c, BigInt::from(oracle[0].0));
            assert_eq!(got.abs_d, BigUint::from(oracle[0].1));
        }
    }

    #[test]
    fn partition_d_frozen_values() {
        // 5 = (-1)^2 + 2^2
        let x = partition_d(5, 1).unwrap();
        assert_eq!((x.c.clone(), x.abs_d.clone()), (BigInt::from(-1), BigUint::from(2u32)));
        // 25 = 3^2 + 4^2; (5, 0) excluded by p not dividing C
        let x = partition_d(5, 2).unwrap();
        assert_eq!((x.c.clone(), x.abs_d.clone()), (BigInt::from(3), BigUint::from(4u32)));
        // 13 = 3^2 + 2^2
        let x = partition_d(13, 1).unwrap();
        assert_eq!((x.c.clone(), x.abs_d.clone()), (BigInt::from(3), BigUint::from(2u32)));
    }

    #[test]
    fn squaring_coherence_for_odd_k() {
        // For odd k: A at level 2k equals A_k^2 - 2 B_k^2.
        for p in [3u64, 11, 19] {
            for k in [1u32, 3] {
                let lo = partition_2b(p, k).unwrap();
                let hi = partition_2b(p, 2 * k).unwrap();
                let b = BigInt::from(lo.abs_b.clone());
                assert_eq!(hi.a, &lo.a * &lo.a - 2 * &b * &b);
            }
        }
    }

    #[test]
    fn rejects_wrong_residue_class() {
        assert!(partition_2b(5, 1).is_err());
        assert!(partition_d(3, 1).is_err());
    }

    #[test]
    fn large_power_partition_is_exact() {
        // 3^12 = 531441; check big-integer path end to end.
        let x = partition_2b(3, 12).unwrap();
        assert!(x.verify());
        let y = partition_d(5, 8).unwrap();
        assert!(y.verify());
    }
}
