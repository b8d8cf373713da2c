//! Explicit construction of F_{p^s} with exp/dlog/trace tables.
//!
//! The modulus is the lexicographically smallest monic irreducible polynomial
//! (coefficients compared from the leading side down, i.e. ascending base-p
//! encoding of the non-leading coefficients), and the generator is the
//! smallest element, in the canonical index order, of multiplicative order
//! q-1. Both choices are deterministic so that every numeric character sum
//! downstream is reproducible run to run.

use crate::arith;
use crate::error::{Error, Result};

pub const DEFAULT_TABLE_BUDGET: u64 = 1 << 24;

/// Polynomial-layer arithmetic over F_p[x], coefficients ascending.
/// Kept table-free so construction-time searches (and tests that need fields
/// beyond the table budget) can use it directly.
pub(crate) mod poly {
    pub fn deg(a: &[u64]) -> Option<usize> {
        a.iter().rposition(|&c| c != 0)
    }

    pub fn mul_mod(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
        let s = modulus.len() - 1;
        let mut res = vec![0u64; a.len() + b.len() - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                if bj != 0 {
                    res[i + j] = (res[i + j] + ai * bj) % p;
                }
            }
        }
        // reduce by the monic modulus
        while res.len() > s {
            let c = res.pop().unwrap();
            if c != 0 {
                let k = res.len() - s;
                for i in 0..s {
                    let sub = (c * modulus[i]) % p;
                    res[k + i] = (res[k + i] + p - sub) % p;
                }
            }
        }
        res.resize(s, 0);
        res
    }

    pub fn pow_mod(a: &[u64], mut e: u64, modulus: &[u64], p: u64) -> Vec<u64> {
        let s = modulus.len() - 1;
        let mut acc = vec![0u64; s];
        acc[0] = 1;
        let mut base = a.to_vec();
        base.resize(s.max(base.len()), 0);
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod(&acc, &base, modulus, p);
            }
            base = mul_mod(&base, &base, modulus, p);
            e >>= 1;
        }
        acc
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        loop {
            let db = match deg(&b) {
                None => {
                    return a;
                }
                Some(d) => d,
            };
            let da = deg(&a);
            if da.is_none() || da.unwrap() < db {
                std::mem::swap(&mut a, &mut b);
                continue;
            }
            let da = da.unwrap();
            let inv = crate::arith::powmod(b[db], p - 2, p);
            let c = (a[da] * inv) % p;
            let shift = da - db;
            for i in 0..=db {
                let sub = (c * b[i]) % p;
                a[i + shift] = (a[i + shift] + p - sub) % p;
            }
        }
    }

    /// Rabin test: x^(p^s) = x and gcd(x^(p^i) - x, f) = 1 for every proper
    /// divisor i of s.
    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let s = f.len() - 1;
        if s == 1 {
            return true;
        }
        let x = {
            let mut v = vec![0u64; s];
            v[1] = 1;
            v
        };
        // Frobenius chain: frob[i] = x^(p^i) mod f
        let mut frob = x.clone();
        let mut chain = Vec::with_capacity(s);
        for _ in 0..s {
            frob = pow_mod(&frob, p, f, p);
            chain.push(frob.clone());
        }
        if chain[s - 1] != x {
            return false;
        }
        for i in 1..s {
            if s % i == 0 {
                let mut diff = chain[i - 1].clone();
                diff[1] = (diff[1] + p - 1) % p;
                let g = gcd(f, &diff, p);
                if deg(&g) != Some(0) {
                    return false;
                }
            }
        }
        true
    }

    /// Lexicographically smallest monic irreducible of degree s over F_p.
    pub fn find_modulus(p: u64, s: u32) -> Vec<u64> {
        let s = s as usize;
        if s == 1 {
            return vec![0, 1]; // the polynomial x
        }
        let total = crate::arith::checked_pow_u128(p, s as u32).unwrap();
        let mut c: u128 = 0;
        while c < total {
            let mut f = Vec::with_capacity(s + 1);
            let mut cc = c;
            for _ in 0..s {
                f.push((cc % p as u128) as u64);
                cc /= p as u128;
            }
            f.push(1);
            if is_irreducible(&f, p) {
                return f;
            }
            c += 1;
        }
        unreachable!("irreducible polynomial of degree {s} over F_{p} exists");
    }

    /// Smallest element (canonical index order) of multiplicative order q-1.
    pub fn find_generator(modulus: &[u64], p: u64, q: u64) -> Vec<u64> {
        let s = modulus.len() - 1;
        let factors = crate::arith::prime_factors(q - 1);
        let one = {
            let mut v = vec![0u64; s];
            v[0] = 1;
            v
        };
        for idx in 1..q {
            let cand = coeffs_of_index(idx, p, s);
            let primitive = factors
                .iter()
                .all(|&l| pow_mod(&cand, (q - 1) / l, modulus, p) != one);
            if primitive {
                return cand;
            }
        }
        unreachable!("F_{q} has a primitive element");
    }

    /// Trace of each power basis element x^i, i < s; the trace of an element
    /// is then the F_p-linear combination of these.
    pub fn basis_traces(modulus: &[u64], p: u64) -> Vec<u64> {
        let s = modulus.len() - 1;
        // frob[j] = x^(p^j) mod f, j = 0..s
        let x = {
            let mut v = vec![0u64; s];
            if s == 1 {
                // modulus is x: the element "x" is 0 in F_p; traces are of 1.
                v[0] = 0;
            } else {
                v[1] = 1;
            }
            v
        };
        let mut frobs = vec![x.clone()];
        for j in 1..s {
            frobs.push(pow_mod(&frobs[j - 1], p, modulus, p));
        }
        let mut traces = Vec::with_capacity(s);
        for i in 0..s {
            let mut acc = vec![0u64; s];
            for fr in &frobs {
                let term = pow_mod(fr, i as u64, modulus, p);
                for (a, t) in acc.iter_mut().zip(term.iter()) {
                    *a = (*a + t) % p;
                }
            }
            assert!(
                acc[1..].iter().all(|&c| c == 0),
                "trace of basis element must lie in the prime field"
            );
            traces.push(acc[0]);
        }
        traces
    }

    pub fn coeffs_of_index(idx: u64, p: u64, s: usize) -> Vec<u64> {
        let mut v = Vec::with_capacity(s);
        let mut i = idx;
        for _ in 0..s {
            v.push(i % p);
            i /= p;
        }
        v
    }

    pub fn index_of_coeffs(coeffs: &[u64], p: u64) -> u64 {
        let mut idx = 0u64;
        for &c in coeffs.iter().rev() {
            idx = idx * p + c;
        }
        idx
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldParams {
    pub p: u64,
    pub s: u32,
    pub q: u64,
    pub table_budget: u64,
}

/// An element, stored as the canonical base-p encoding of its coefficient
/// vector in the power basis 1, x, ..., x^(s-1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(u32);

impl FieldElement {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone)]
pub struct Field {
    params: FieldParams,
    modulus: Vec<u64>,
    generator: FieldElement,
    exp_table: Vec<u32>,
    dlog_table: Vec<u32>,
    trace_table: Vec<u32>,
    pow_p: Vec<u64>,
}

const NO_DLOG: u32 = u32::MAX;

pub fn build_field(p: u64, s: u32) -> Result<Field> {
    build_field_with_budget(p, s, DEFAULT_TABLE_BUDGET)
}

pub fn build_field_with_budget(p: u64, s: u32, table_budget: u64) -> Result<Field> {
    if !arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p == 2 {
        return Err(Error::InvalidParameter("characteristic 2 unsupported".into()));
    }
    if s == 0 {
        return Err(Error::InvalidParameter("s must be positive".into()));
    }
    let q_wide = arith::checked_pow_u128(p, s).unwrap_or(u128::MAX);
    if q_wide > table_budget as u128 {
        return Err(Error::BudgetExceeded { q: q_wide, budget: table_budget });
    }
    let q = q_wide as u64;
    let sd = s as usize;

    let modulus = poly::find_modulus(p, s);
    let gen_poly = poly::find_generator(&modulus, p, q);
    let generator = FieldElement(poly::index_of_coeffs(&gen_poly, p) as u32);

    let mut exp_table = Vec::with_capacity((q - 1) as usize);
    let mut dlog_table = vec![NO_DLOG; q as usize];
    let mut cur = vec![0u64; sd];
    cur[0] = 1;
    for k in 0..q - 1 {
        let idx = poly::index_of_coeffs(&cur, p) as u32;
        exp_table.push(idx);
        debug_assert_eq!(dlog_table[idx as usize], NO_DLOG);
        dlog_table[idx as usize] = k as u32;
        cur = poly::mul_mod(&cur, &gen_poly, &modulus, p);
    }
    assert_eq!(poly::index_of_coeffs(&cur, p), 1, "generator order must be q-1");

    let basis = poly::basis_traces(&modulus, p);
    let mut trace_table = Vec::with_capacity(q as usize);
    for idx in 0..q {
        let coeffs = poly::coeffs_of_index(idx, p, sd);
        let mut t = 0u64;
        for (c, b) in coeffs.iter().zip(basis.iter()) {
            t = (t + c * b) % p;
        }
        trace_table.push(t as u32);
    }

    let mut pow_p = Vec::with_capacity(sd + 1);
    let mut acc = 1u64;
    for _ in 0..=sd {
        pow_p.push(acc);
        acc = acc.saturating_mul(p);
    }

    Ok(Field {
        params: FieldParams { p, s, q, table_budget },
        modulus,
        generator,
        exp_table,
        dlog_table,
        trace_table,
        pow_p,
    })
}

impl Field {
    pub fn params(&self) -> &FieldParams {
        &self.params
    }
    pub fn p(&self) -> u64 {
        self.params.p
    }
    pub fn s(&self) -> u32 {
        self.params.s
    }
    pub fn q(&self) -> u64 {
        self.params.q
    }
    /// Modulus coefficients, ascending, monic.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }
    pub fn generator(&self) -> FieldElement {
        self.generator
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(0)
    }
    pub fn one(&self) -> FieldElement {
        FieldElement(1)
    }

    /// Embed a prime-subfield residue.
    pub fn from_int(&self, c: u64) -> FieldElement {
        FieldElement((c % self.params.p) as u32)
    }

    pub fn element(&self, idx: u64) -> Result<FieldElement> {
        if idx < self.params.q {
            Ok(FieldElement(idx as u32))
        } else {
            Err(Error::InvalidParameter(format!("element index {idx} out of range")))
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.params.q as u32).map(FieldElement)
    }

    pub fn coeffs(&self, x: FieldElement) -> Vec<u64> {
        poly::coeffs_of_index(x.0 as u64, self.params.p, self.params.s as usize)
    }

    pub fn element_from_coeffs(&self, coeffs: &[u64]) -> Result<FieldElement> {
        if coeffs.len() != self.params.s as usize || coeffs.iter().any(|&c| c >= self.params.p) {
            return Err(Error::InvalidParameter("bad coefficient vector".into()));
        }
        Ok(FieldElement(poly::index_of_coeffs(coeffs, self.params.p) as u32))
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let p = self.params.p;
        let mut ia = a.0 as u64;
        let mut ib = b.0 as u64;
        let mut out = 0u64;
        for &pw in &self.pow_p[..self.params.s as usize] {
            let d = (ia % p + ib % p) % p;
            out += d * pw;
            ia /= p;
            ib /= p;
        }
        FieldElement(out as u32)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let p = self.params.p;
        let mut ia = a.0 as u64;
        let mut out = 0u64;
        for &pw in &self.pow_p[..self.params.s as usize] {
            let d = (p - ia % p) % p;
            out += d * pw;
            ia /= p;
        }
        FieldElement(out as u32)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement(0);
        }
        let q1 = self.params.q - 1;
        let k = (self.dlog_table[a.0 as usize] as u64 + self.dlog_table[b.0 as usize] as u64) % q1;
        FieldElement(self.exp_table[k as usize])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.0 == 0 {
            return Err(Error::ZeroHasNoDlog);
        }
        let q1 = self.params.q - 1;
        let k = (q1 - self.dlog_table[a.0 as usize] as u64) % q1;
        Ok(FieldElement(self.exp_table[k as usize]))
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if a.0 == 0 {
            return if e == 0 { FieldElement(1) } else { FieldElement(0) };
        }
        let q1 = self.params.q - 1;
        let k = (self.dlog_table[a.0 as usize] as u128 * e as u128 % q1 as u128) as u64;
        FieldElement(self.exp_table[k as usize])
    }

    /// g^k for any k (reduced mod q-1).
    pub fn exp(&self, k: u64) -> FieldElement {
        FieldElement(self.exp_table[(k % (self.params.q - 1)) as usize])
    }

    pub fn dlog(&self, a: FieldElement) -> Result<u64> {
        if a.0 == 0 {
            return Err(Error::ZeroHasNoDlog);
        }
        Ok(self.dlog_table[a.0 as usize] as u64)
    }

    /// Trace to the prime field, as a residue in [0, p).
    pub fn trace(&self, a: FieldElement) -> u64 {
        self.trace_table[a.0 as usize] as u64
    }

    /// Norm onto the subfield of size p^sub_s: x^((q-1)/(q0-1)).
    pub fn norm_to_subfield(&self, x: FieldElement, sub_s: u32) -> Result<FieldElement> {
        if sub_s == 0 || self.params.s % sub_s != 0 {
            return Err(Error::SubfieldMismatch);
        }
        let q0 = arith::checked_pow_u128(self.params.p, sub_s).unwrap() as u64;
        debug_assert_eq!((self.params.q - 1) % (q0 - 1), 0);
        if x.0 == 0 {
            return Ok(FieldElement(0));
        }
        Ok(self.pow(x, (self.params.q - 1) / (q0 - 1)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_is_plain_residues() {
        let f = build_field(3, 1).unwrap();
        assert_eq!(f.modulus(), &[0, 1]);
        assert_eq!(f.q(), 3);
        assert_eq!(f.add(f.from_int(2), f.from_int(2)), f.from_int(1));
        assert_eq!(f.mul(f.from_int(2), f.from_int(2)), f.from_int(1));
        // s=1: trace(x) = x
        for x in f.elements() {
            assert_eq!(f.trace(x), x.index() as u64);
        }
    }

    #[test]
    fn f81_generator_has_order_80() {
        let f = build_field(3, 4).unwrap();
        let g = f.generator();
        assert_eq!(f.pow(g, 80), f.one());
        assert_ne!(f.pow(g, 40), f.one());
        assert_ne!(f.pow(g, 16), f.one());
    }

    #[test]
    fn f9_uses_x2_plus_1() {
        let f = build_field(3, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 0, 1]);
    }

    #[test]
    fn f9_trace_matches_brute_force() {
        // Over F_9, Tr(x) = x + x^3.
        let f = build_field(3, 2).unwrap();
        for x in f.elements() {
            let cube = f.mul(f.mul(x, x), x);
            let t = f.add(x, cube);
            assert!(t.index() < 3, "trace must land in the prime field");
            assert_eq!(f.trace(x), t.index() as u64);
        }
    }

    #[test]
    fn f25_trace_frobenius_invariant() {
        let f = build_field(5, 2).unwrap();
        for x in f.elements() {
            assert_eq!(f.trace(f.pow(x, 5)), f.trace(x));
        }
    }

    #[test]
    fn dlog_round_trip() {
        let f = build_field(3, 4).unwrap();
        for k in 0..f.q() - 1 {
            assert_eq!(f.dlog(f.exp(k)).unwrap(), k);
        }
        assert!(matches!(f.dlog(f.zero()), Err(Error::ZeroHasNoDlog)));
    }

    #[test]
    fn trace_additivity_exhaustive() {
        for (p, s) in [(3u64, 3u32), (5, 2), (7, 2)] {
            let f = build_field(p, s).unwrap();
            for a in f.elements() {
                for b in f.elements() {
                    let lhs = f.trace(f.add(a, b));
                    let rhs = (f.trace(a) + f.trace(b)) % p;
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn generator_primitivity_checked_per_prime() {
        let f = build_field(5, 2).unwrap();
        let q1 = f.q() - 1;
        for l in crate::arith::prime_factors(q1) {
            assert_ne!(f.pow(f.generator(), q1 / l), f.one());
        }
    }

    #[test]
    fn norm_maps_onto_subfield() {
        let f = build_field(3, 4).unwrap();
        // norm to F_9: values of order dividing 8, surjective on the subfield.
        let mut seen = std::collections::HashSet::new();
        for x in f.elements() {
            let n = f.norm_to_subfield(x, 2).unwrap();
            if x.index() != 0 {
                assert_eq!(f.pow(n, 8), f.one());
                seen.insert(n);
            } else {
                assert_eq!(n, f.zero());
            }
        }
        assert_eq!(seen.len(), 8, "norm must be surjective onto F_9*");
        assert_eq!(f.norm_to_subfield(f.one(), 2).unwrap(), f.one());
        assert!(f.norm_to_subfield(f.one(), 3).is_err());
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(
            build_field_with_budget(3, 4, 80),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(matches!(build_field(9, 1), Err(Error::NotPrime(9))));
    }

    #[test]
    fn mul_agrees_with_poly_layer() {
        let f = build_field(3, 3).unwrap();
        let modulus = f.modulus().to_vec();
        for a in f.elements() {
            for b in f.elements() {
                let pa = f.coeffs(a);
                let pb = f.coeffs(b);
                let prod = poly::mul_mod(&pa, &pb, &modulus, 3);
                let want = poly::index_of_coeffs(&prod, 3) as usize;
                assert_eq!(f.mul(a, b).index(), want);
            }
        }
    }
}
