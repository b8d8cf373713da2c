//! Exact arithmetic in the commutative ring spanned by
//! (sqrt2)^e2 (sqrtp)^ep i^ei over Q, e in {0,1}^3. Every closed-formula
//! term lives here; nested radicals never need direct representation because
//! conjugate pairs (u+w)^n + (u-w)^n only involve w^2.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Basis index bits: 1 = sqrt(2), 2 = sqrt(p), 4 = i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OctElement {
    p: u64,
    coords: [BigRational; 8],
}

fn zero_coords() -> [BigRational; 8] {
    std::array::from_fn(|_| BigRational::zero())
}

impl OctElement {
    pub fn zero(p: u64) -> Self {
        OctElement { p, coords: zero_coords() }
    }

    pub fn one(p: u64) -> Self {
        Self::from_int(p, BigInt::one())
    }

    pub fn from_int(p: u64, n: BigInt) -> Self {
        Self::from_rational(p, BigRational::from_integer(n))
    }

    pub fn from_rational(p: u64, r: BigRational) -> Self {
        let mut coords = zero_coords();
        coords[0] = r;
        OctElement { p, coords }
    }

    pub fn sqrt2(p: u64) -> Self {
        let mut coords = zero_coords();
        coords[1] = BigRational::one();
        OctElement { p, coords }
    }

    pub fn sqrt_p(p: u64) -> Self {
        let mut coords = zero_coords();
        coords[2] = BigRational::one();
        OctElement { p, coords }
    }

    pub fn i_unit(p: u64) -> Self {
        let mut coords = zero_coords();
        coords[4] = BigRational::one();
        OctElement { p, coords }
    }

    pub fn ground_prime(&self) -> u64 {
        self.p
    }

    pub fn coord(&self, basis: usize) -> &BigRational {
        &self.coords[basis]
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    fn check_same(&self, rhs: &Self) -> Result<()> {
        if self.p != rhs.p {
            return Err(Error::MixedGroundPrime(self.p, rhs.p));
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_same(rhs)?;
        let mut out = self.clone();
        for (o, r) in out.coords.iter_mut().zip(rhs.coords.iter()) {
            *o += r;
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.coords.iter_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn scalar_mul(&self, r: &BigRational) -> Self {
        let mut out = self.clone();
        for c in out.coords.iter_mut() {
            *c *= r;
        }
        out
    }

    pub fn scalar_mul_int(&self, n: &BigInt) -> Self {
        self.scalar_mul(&BigRational::from_integer(n.clone()))
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.check_same(rhs)?;
        let p = BigRational::from_integer(BigInt::from(self.p));
        let two = BigRational::from_integer(BigInt::from(2));
        let mut coords = zero_coords();
        for a in 0..8 {
            if self.coords[a].is_zero() {
                continue;
            }
            for b in 0..8 {
                if rhs.coords[b].is_zero() {
                    continue;
                }
                let mut term = &self.coords[a] * &rhs.coords[b];
                if a & 1 == 1 && b & 1 == 1 {
                    term *= &two;
                }
                if a & 2 == 2 && b & 2 == 2 {
                    term *= &p;
                }
                if a & 4 == 4 && b & 4 == 4 {
                    term = -term;
                }
                coords[a ^ b] += term;
            }
        }
        Ok(OctElement { p: self.p, coords })
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(self.p);
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same ground prime");
            }
            base = base.mul(&base).expect("same ground prime");
            e >>= 1;
        }
        acc
    }

    /// Succeeds iff the value is a rational integer.
    pub fn extract_integer(&self) -> Result<BigInt> {
        for (i, c) in self.coords.iter().enumerate() {
            if i != 0 && !c.is_zero() {
                return Err(Error::ImpureResult(format!(
                    "nonzero coordinate on basis element {i}"
                )));
            }
        }
        if !self.coords[0].is_integer() {
            return Err(Error::ImpureResult(format!(
                "rational part {} has nontrivial denominator",
                self.coords[0]
            )));
        }
        Ok(self.coords[0].to_integer())
    }
}

/// p^(e/2): an exact integer power for even e, p^((e-1)/2) sqrt(p) for odd e.
pub fn p_half_power(p: u64, e: u64) -> OctElement {
    let whole = BigInt::from(p).pow((e / 2) as u32);
    if e % 2 == 0 {
        OctElement::from_int(p, whole)
    } else {
        OctElement::sqrt_p(p).scalar_mul_int(&whole)
    }
}

/// (u+w)^n + (u-w)^n where only w^2 is known, via the even binomial terms:
/// 2 * sum over even k of C(n,k) u^(n-k) (w^2)^(k/2).
pub fn paired_power(u: &OctElement, w2: &OctElement, n: u32) -> Result<OctElement> {
    if u.ground_prime() != w2.ground_prime() {
        return Err(Error::MixedGroundPrime(u.ground_prime(), w2.ground_prime()));
    }
    let p = u.ground_prime();
    // u^(n), u^(n-2), ... and w2^0, w2^1, ...
    let mut u_pows = Vec::with_capacity(n as usize + 1);
    let mut acc = OctElement::one(p);
    for _ in 0..=n {
        u_pows.push(acc.clone());
        acc = acc.mul(u)?;
    }
    let mut out = OctElement::zero(p);
    let mut binom = BigUint::one();
    let mut w2_pow = OctElement::one(p);
    let mut k = 0u32;
    loop {
        let term = u_pows[(n - k) as usize]
            .mul(&w2_pow)?
            .scalar_mul_int(&BigInt::from(binom.clone()));
        out = out.add(&term)?;
        if k + 2 > n {
            break;
        }
        // C(n, k+2) = C(n, k) (n-k)(n-k-1) / ((k+1)(k+2))
        binom = binom * BigUint::from((n - k) as u64) * BigUint::from((n - k - 1) as u64)
            / (BigUint::from((k + 1) as u64) * BigUint::from((k + 2) as u64));
        w2_pow = w2_pow.mul(w2)?;
        k += 2;
    }
    Ok(out.scalar_mul_int(&BigInt::from(2)))
}

impl std::fmt::Display for OctElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let names = ["1", "r2", "rp", "r2p", "i", "ir2", "irp", "ir2p"];
        let mut first = true;
        for (i, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "{}*{}", c, names[i])?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radical_squares() {
        let p = 3;
        let r2 = OctElement::sqrt2(p);
        assert_eq!(r2.mul(&r2).unwrap(), OctElement::from_int(p, BigInt::from(2)));
        let rp = OctElement::sqrt_p(p);
        assert_eq!(rp.mul(&rp).unwrap(), OctElement::from_int(p, BigInt::from(3)));
        let r2p = r2.mul(&rp).unwrap();
        assert_eq!(r2p.mul(&r2p).unwrap(), OctElement::from_int(p, BigInt::from(6)));
        let i = OctElement::i_unit(p);
        assert_eq!(i.mul(&i).unwrap(), OctElement::from_int(p, BigInt::from(-1)));
    }

    #[test]
    fn mixed_primes_rejected() {
        let a = OctElement::one(3);
        let b = OctElement::one(5);
        assert!(matches!(a.add(&b), Err(Error::MixedGroundPrime(3, 5))));
        assert!(matches!(a.mul(&b), Err(Error::MixedGroundPrime(3, 5))));
    }

    #[test]
    fn p_half_power_cases() {
        assert_eq!(p_half_power(3, 4), OctElement::from_int(3, BigInt::from(9)));
        assert_eq!(p_half_power(3, 1), OctElement::sqrt_p(3));
        assert_eq!(
            p_half_power(5, 3),
            OctElement::sqrt_p(5).scalar_mul_int(&BigInt::from(5))
        );
        assert_eq!(p_half_power(3, 0), OctElement::one(3));
    }

    #[test]
    fn paired_power_examples() {
        let p = 3;
        // (1+0)^3 + (1-0)^3 = 2
        let r = paired_power(&OctElement::one(p), &OctElement::zero(p), 3).unwrap();
        assert_eq!(r.extract_integer().unwrap(), BigInt::from(2));
        // u=9, w^2=576: 33^3 + (-15)^3 = 32562
        let r = paired_power(
            &OctElement::from_int(p, BigInt::from(9)),
            &OctElement::from_int(p, BigInt::from(576)),
            3,
        )
        .unwrap();
        assert_eq!(r.extract_integer().unwrap(), BigInt::from(32562));
        // odd symmetry: u=0 gives 0 for odd n
        let r = paired_power(
            &OctElement::zero(p),
            &OctElement::from_int(p, BigInt::from(7)),
            5,
        )
        .unwrap();
        assert!(r.is_zero());
    }

    #[test]
    fn paired_power_matches_direct_expansion() {
        // When w itself is representable, compare against (u+w)^n + (u-w)^n.
        let p = 5;
        let u = OctElement::from_int(p, BigInt::from(3))
            .add(&OctElement::sqrt_p(p).scalar_mul_int(&BigInt::from(2)))
            .unwrap();
        let w = OctElement::sqrt2(p)
            .mul(&OctElement::sqrt_p(p))
            .unwrap()
            .scalar_mul_int(&BigInt::from(4));
        let w2 = w.mul(&w).unwrap();
        for n in 1..8 {
            let direct = u.add(&w).unwrap().pow(n).add(&u.sub(&w).unwrap().pow(n)).unwrap();
            assert_eq!(paired_power(&u, &w2, n).unwrap(), direct);
        }
    }

    #[test]
    fn extract_integer_purity() {
        let ok = OctElement::from_int(3, BigInt::from(7041));
        assert_eq!(ok.extract_integer().unwrap(), BigInt::from(7041));
        assert!(matches!(
            OctElement::sqrt2(3).extract_integer(),
            Err(Error::ImpureResult(_))
        ));
        let half = OctElement::from_rational(
            3,
            BigRational::new(BigInt::from(3), BigInt::from(2)),
        );
        assert!(matches!(half.extract_integer(), Err(Error::ImpureResult(_))));
    }
}
