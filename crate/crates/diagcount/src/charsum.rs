//! Multiplicative characters and error-bounded numeric Gauss/Jacobi sums,
//! plus the audit suite that checks the classical identities on every
//! constructed field.
//!
//! Characters are plain data (a slot j with chi(g^k) = zeta_{q-1}^{jk});
//! evaluation takes the field explicitly. The principal embedding
//! zeta_k = exp(2 pi i / k) is fixed once and used everywhere.

use std::collections::HashMap;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::field::{build_field_with_budget, Field, FieldElement};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexVal {
    pub re: f64,
    pub im: f64,
    /// Absolute error bound; comparisons must allow |delta| <= err + tol.
    pub err: f64,
}

impl ComplexVal {
    pub fn new(re: f64, im: f64, err: f64) -> Self {
        ComplexVal { re, im, err }
    }

    pub fn exact(re: f64, im: f64) -> Self {
        ComplexVal { re, im, err: 0.0 }
    }

    pub fn zero() -> Self {
        Self::exact(0.0, 0.0)
    }

    pub fn add(&self, o: &Self) -> Self {
        ComplexVal::new(self.re + o.re, self.im + o.im, self.err + o.err)
    }

    pub fn sub(&self, o: &Self) -> Self {
        ComplexVal::new(self.re - o.re, self.im - o.im, self.err + o.err)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let re = self.re * o.re - self.im * o.im;
        let im = self.re * o.im + self.im * o.re;
        let err = self.abs() * o.err + o.abs() * self.err + self.err * o.err
            + 4.0 * f64::EPSILON * (re.abs() + im.abs());
        ComplexVal::new(re, im, err)
    }

    pub fn scale(&self, c: f64) -> Self {
        ComplexVal::new(self.re * c, self.im * c, self.err * c.abs())
    }

    pub fn conj(&self) -> Self {
        ComplexVal::new(self.re, -self.im, self.err)
    }

    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn dist(&self, o: &Self) -> f64 {
        (self.re - o.re).hypot(self.im - o.im)
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = Self::exact(1.0, 0.0);
        let mut base = *self;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Precision {
    Double,
    Extended,
}

/// A multiplicative character of F_q, determined by chi(g) = zeta_{q-1}^slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MultChar {
    slot: u64,
    q1: u64,
}

impl MultChar {
    pub fn slot(&self) -> u64 {
        self.slot
    }

    pub fn order(&self) -> u64 {
        self.q1 / arith::gcd(self.slot, self.q1)
    }

    pub fn is_trivial(&self) -> bool {
        self.slot == 0
    }

    pub fn pow(&self, e: u64) -> MultChar {
        MultChar { slot: ((self.slot as u128 * e as u128) % self.q1 as u128) as u64, q1: self.q1 }
    }

    pub fn conj(&self) -> MultChar {
        MultChar { slot: (self.q1 - self.slot) % self.q1, q1: self.q1 }
    }

    pub fn mul_char(&self, o: &MultChar) -> MultChar {
        debug_assert_eq!(self.q1, o.q1);
        MultChar { slot: (self.slot + o.slot) % self.q1, q1: self.q1 }
    }

    /// chi(-1), exactly.
    pub fn at_minus_one(&self) -> i32 {
        if self.q1 % 2 == 0 && (self.slot % 2) == 1 {
            -1
        } else {
            1
        }
    }

    pub fn eval(&self, f: &Field, x: FieldElement) -> ComplexVal {
        debug_assert_eq!(self.q1, f.q() - 1);
        match f.dlog(x) {
            Err(_) => ComplexVal::zero(),
            Ok(k) => {
                let (re, im) = cis_frac((self.slot as u128 * k as u128 % self.q1 as u128) as u64, self.q1);
                ComplexVal::new(re, im, 4.0 * f64::EPSILON)
            }
        }
    }
}

fn cis_frac(num: u64, den: u64) -> (f64, f64) {
    let (s, c) = (TAU * (num as f64) / (den as f64)).sin_cos();
    (c, s)
}

/// The character of order d with chi(g) = zeta_d.
pub fn character(f: &Field, d: u64) -> Result<MultChar> {
    let q1 = f.q() - 1;
    if d == 0 || q1 % d != 0 {
        return Err(Error::OrderDoesNotDivide { d, q1 });
    }
    Ok(MultChar { slot: q1 / d, q1 })
}

pub fn char_from_slot(f: &Field, slot: u64) -> MultChar {
    let q1 = f.q() - 1;
    MultChar { slot: slot % q1, q1 }
}

struct Accum {
    re: f64,
    im: f64,
    c_re: f64,
    c_im: f64,
    extended: bool,
    terms: u64,
}

impl Accum {
    fn new(prec: Precision) -> Self {
        Accum { re: 0.0, im: 0.0, c_re: 0.0, c_im: 0.0, extended: prec == Precision::Extended, terms: 0 }
    }

    #[inline]
    fn push(&mut self, re: f64, im: f64) {
        self.terms += 1;
        if self.extended {
            // Neumaier compensation
            let t = self.re + re;
            self.c_re += if self.re.abs() >= re.abs() { (self.re - t) + re } else { (re - t) + self.re };
            self.re = t;
            let t = self.im + im;
            self.c_im += if self.im.abs() >= im.abs() { (self.im - t) + im } else { (im - t) + self.im };
            self.im = t;
        } else {
            self.re += re;
            self.im += im;
        }
    }

    fn finish(self) -> ComplexVal {
        let re = self.re + self.c_re;
        let im = self.im + self.c_im;
        // Each term carries a few ulps from the angle evaluation; accumulation
        // adds at most one rounding per term in double mode.
        let err = 8.0 * f64::EPSILON * (self.terms as f64 + 1.0);
        ComplexVal::new(re, im, err)
    }
}

/// G(chi) = sum over x of chi(x) zeta_p^Tr(x).
pub fn gauss_sum(f: &Field, chi: &MultChar) -> Result<ComplexVal> {
    gauss_sum_prec(f, chi, Precision::Double)
}

pub fn gauss_sum_prec(f: &Field, chi: &MultChar, prec: Precision) -> Result<ComplexVal> {
    if chi.is_trivial() {
        return Err(Error::TrivialCharacter);
    }
    let q1 = f.q() - 1;
    let p = f.p();
    let mut acc = Accum::new(prec);
    for k in 0..q1 {
        let t = f.trace(f.exp(k));
        let mut frac = ((chi.slot as u128 * k as u128) % q1 as u128) as f64 / q1 as f64
            + t as f64 / p as f64;
        if frac >= 1.0 {
            frac -= 1.0;
        }
        let (s, c) = (TAU * frac).sin_cos();
        acc.push(c, s);
    }
    Ok(acc.finish())
}

/// J(chi) = sum over x of chi(x) chi(1-x).
pub fn jacobi_sum(f: &Field, chi: &MultChar) -> Result<ComplexVal> {
    jacobi_sum_prec(f, chi, Precision::Double)
}

pub fn jacobi_sum_prec(f: &Field, chi: &MultChar, prec: Precision) -> Result<ComplexVal> {
    if chi.is_trivial() {
        return Err(Error::TrivialCharacter);
    }
    let q1 = f.q() - 1;
    let one = f.one();
    let mut acc = Accum::new(prec);
    for x in f.elements() {
        if x == f.zero() || x == one {
            continue;
        }
        let k1 = f.dlog(x).expect("nonzero");
        let k2 = f.dlog(f.sub(one, x)).expect("nonzero");
        let num = (chi.slot as u128 * (k1 as u128 + k2 as u128)) % q1 as u128;
        let (s, c) = (TAU * (num as f64 / q1 as f64)).sin_cos();
        acc.push(c, s);
    }
    Ok(acc.finish())
}

/// Lift chi from `base` into `target` (with target q = base q ^ r) through an
/// explicit subfield embedding, so that chi' = chi o Norm exactly. The
/// embedding sends the base power basis to the smallest-index root of the
/// base modulus inside the target.
pub fn lift_character(base: &Field, chi: &MultChar, target: &Field) -> Result<MultChar> {
    if target.p() != base.p() || target.s() % base.s() != 0 {
        return Err(Error::SubfieldMismatch);
    }
    let q0 = base.q();
    let qt = target.q();
    if (qt - 1) % (q0 - 1) != 0 {
        return Err(Error::SubfieldMismatch);
    }
    let cofactor = (qt - 1) / (q0 - 1);
    if chi.is_trivial() {
        return Ok(MultChar { slot: 0, q1: qt - 1 });
    }

    // Image of the base generator under the embedding.
    let image = if base.s() == 1 {
        target.from_int(base.generator().index() as u64)
    } else {
        let root = embedding_root(base, target)?;
        let coeffs = base.coeffs(base.generator());
        let mut acc = target.zero();
        for &c in coeffs.iter().rev() {
            acc = target.add(target.mul(acc, root), target.from_int(c));
        }
        acc
    };
    let k = target.dlog(image).map_err(|_| Error::Internal("generator image is zero".into()))?;
    if k % cofactor != 0 {
        return Err(Error::Internal("embedding image escapes the subfield".into()));
    }
    let v = k / cofactor;
    debug_assert_eq!(arith::gcd(v, q0 - 1), 1);
    let w = inv_mod(v, q0 - 1)
        .ok_or_else(|| Error::Internal("generator image not primitive in subfield".into()))?;
    let sub_slot = (chi.slot as u128 * w as u128 % (q0 - 1) as u128) as u64;
    Ok(MultChar { slot: sub_slot * cofactor, q1: qt - 1 })
}

/// Smallest-index root of the base modulus among the target's subfield
/// elements of size base.q().
fn embedding_root(base: &Field, target: &Field) -> Result<FieldElement> {
    let q0 = base.q();
    let cofactor = (target.q() - 1) / (q0 - 1);
    let modulus = base.modulus().to_vec();
    let mut candidates: Vec<FieldElement> = (0..q0 - 1).map(|j| target.exp(j * cofactor)).collect();
    candidates.push(target.zero());
    candidates.sort_unstable();
    for z in candidates {
        let mut acc = target.zero();
        for &c in modulus.iter().rev() {
            acc = target.add(target.mul(acc, z), target.from_int(c));
        }
        if acc == target.zero() {
            return Ok(z);
        }
    }
    Err(Error::Internal("base modulus has no root in target".into()))
}

fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, (a % m) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if r != 1 {
        return None;
    }
    Some(((t % m as i128 + m as i128) % m as i128) as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaAudit {
    pub id: String,
    pub applicable: bool,
    pub residual: f64,
    pub tolerance: f64,
    pub checked: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub p: u64,
    pub s: u32,
    pub q: u64,
    pub m: u32,
    pub precision: Precision,
    pub rows: Vec<LemmaAudit>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| !r.applicable || r.residual <= r.tolerance)
    }

    pub fn max_residual(&self) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.applicable)
            .map(|r| r.residual)
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AuditConfig {
    /// Tolerance is tol_scale * sqrt(q).
    pub tol_scale: f64,
    /// Budget for the Davenport-Hasse lift target field F_{q^2}.
    pub lift_budget: u64,
    pub precision: Precision,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig { tol_scale: 1e-6, lift_budget: 1 << 17, precision: Precision::Double }
    }
}

/// Audit the Gauss-sum identities over the full family of characters of
/// 2-power order on f. Inapplicable lemmas are reported with
/// applicable = false.
pub fn audit_lemmas(f: &Field, m: u32, cfg: &AuditConfig) -> Result<AuditReport> {
    let q = f.q();
    let q1 = q - 1;
    let p = f.p();
    let s = f.s();
    let v2 = arith::v2(q1);
    if m == 0 || m > v2 {
        return Err(Error::OrderNotDividing { m, v2 });
    }
    let tol = cfg.tol_scale * (q as f64).sqrt();
    let prec = cfg.precision;

    // All characters of order exactly 2^r, r = 1..v2.
    let mut family: Vec<(u32, MultChar)> = Vec::new();
    for r in 1..=v2 {
        let step = q1 >> r;
        let mut j = 1;
        while j < (1u64 << r) {
            family.push((r, MultChar { slot: j * step, q1 }));
            j += 2;
        }
    }
    let mut gmemo: HashMap<u64, ComplexVal> = HashMap::new();
    let mut g = |f: &Field, chi: &MultChar| -> ComplexVal {
        *gmemo
            .entry(chi.slot)
            .or_insert_with(|| gauss_sum_prec(f, chi, prec).expect("nontrivial"))
    };

    let eta = character(f, 2)?;
    let mut rows = Vec::new();

    // Lemma 2(a): G(chi) G(conj chi) = chi(-1) q.
    {
        let mut worst = 0.0f64;
        for (_, chi) in &family {
            let prod = g(f, chi).mul(&g(f, &chi.conj()));
            let want = ComplexVal::exact(chi.at_minus_one() as f64 * q as f64, 0.0);
            worst = worst.max(prod.dist(&want));
        }
        rows.push(LemmaAudit { id: "L2a".into(), applicable: true, residual: worst, tolerance: tol, checked: family.len() });
    }

    // Lemma 2(b): G(chi) = G(chi^p).
    {
        let mut worst = 0.0f64;
        for (_, chi) in &family {
            let a = g(f, chi);
            let b = g(f, &chi.pow(p));
            worst = worst.max(a.dist(&b));
        }
        rows.push(LemmaAudit { id: "L2b".into(), applicable: true, residual: worst, tolerance: tol, checked: family.len() });
    }

    // Lemma 3: quadratic Gauss sum.
    {
        let sq = (q as f64).sqrt();
        let sign = if s % 2 == 0 { -1.0 } else { 1.0 };
        let want = if p % 4 == 1 {
            ComplexVal::exact(sign * sq, 0.0)
        } else {
            // (-1)^(s-1) i^s sqrt(q)
            let (re, im) = match s % 4 {
                0 => (1.0, 0.0),
                1 => (0.0, 1.0),
                2 => (-1.0, 0.0),
                _ => (0.0, -1.0),
            };
            ComplexVal::exact(sign * re * sq, sign * im * sq)
        };
        let got = g(f, &eta);
        rows.push(LemmaAudit { id: "L3".into(), applicable: true, residual: got.dist(&want), tolerance: tol, checked: 1 });
    }

    // Lemma 4: biquadratic Gauss sum, p = 3 (mod 8), s even.
    {
        let applicable = p % 8 == 3 && s % 2 == 0 && q1 % 4 == 0;
        let mut worst = 0.0f64;
        let mut checked = 0;
        if applicable {
            let want = ComplexVal::exact(-(q as f64).sqrt(), 0.0);
            for (r, chi) in &family {
                if *r == 2 {
                    worst = worst.max(g(f, chi).dist(&want));
                    checked += 1;
                }
            }
        }
        rows.push(LemmaAudit { id: "L4".into(), applicable, residual: worst, tolerance: tol, checked });
    }

    // Lemma 5: G(chi) G(chi eta) = conj(chi)(4) G(chi^2) G(eta).
    {
        let mut worst = 0.0f64;
        let mut checked = 0;
        let four = f.from_int(4);
        for (r, chi) in &family {
            if *r < 2 {
                continue; // chi = eta excluded
            }
            let lhs = g(f, chi).mul(&g(f, &chi.mul_char(&eta)));
            let chi4 = chi.conj().eval(f, four);
            let rhs = chi4.mul(&g(f, &chi.pow(2))).mul(&g(f, &eta));
            worst = worst.max(lhs.dist(&rhs));
            checked += 1;
        }
        rows.push(LemmaAudit { id: "L5".into(), applicable: checked > 0, residual: worst, tolerance: tol, checked });
    }

    // Lemma 6: G(chi)^2 = G(chi^2) J(chi).
    {
        let mut worst = 0.0f64;
        let mut checked = 0;
        for (r, chi) in &family {
            if *r < 2 {
                continue;
            }
            let lhs = g(f, chi).mul(&g(f, chi));
            let rhs = g(f, &chi.pow(2)).mul(&jacobi_sum_prec(f, chi, prec)?);
            worst = worst.max(lhs.dist(&rhs));
            checked += 1;
        }
        rows.push(LemmaAudit { id: "L6".into(), applicable: checked > 0, residual: worst, tolerance: tol, checked });
    }

    // Lemma 8 (Davenport-Hasse): G(chi') = -G(chi)^2 for the lift to F_{q^2}.
    {
        let target = if (q as u128) * (q as u128) <= cfg.lift_budget as u128 {
            build_field_with_budget(p, 2 * s, cfg.lift_budget).ok()
        } else {
            None
        };
        let mut worst = 0.0f64;
        let mut checked = 0;
        if let Some(target) = &target {
            for (_, chi) in &family {
                let lifted = lift_character(f, chi, target)?;
                debug_assert_eq!(lifted.order(), chi.order());
                let lhs = gauss_sum_prec(target, &lifted, prec)?;
                let rhs = g(f, chi).mul(&g(f, chi)).scale(-1.0);
                worst = worst.max(lhs.dist(&rhs));
                checked += 1;
            }
        }
        rows.push(LemmaAudit { id: "L8".into(), applicable: checked > 0, residual: worst, tolerance: tol, checked });
    }

    // Lemma 10: G(chi) = G(chi eta) for order 2^r, r >= 4 (p = 3 mod 8)
    // or r >= 3 (p = 5 mod 8).
    {
        let rmin = if p % 8 == 3 { 4 } else { 3 };
        let mut worst = 0.0f64;
        let mut checked = 0;
        if p % 8 == 3 || p % 8 == 5 {
            for (r, chi) in &family {
                if *r >= rmin {
                    worst = worst.max(g(f, chi).dist(&g(f, &chi.mul_char(&eta))));
                    checked += 1;
                }
            }
        }
        rows.push(LemmaAudit { id: "L10".into(), applicable: checked > 0, residual: worst, tolerance: tol, checked });
    }

    // Lemma 11: chi(4) for order 2^r, r >= 3.
    {
        let mut worst = 0.0f64;
        let mut checked = 0;
        let four = f.from_int(4);
        if p % 8 == 3 || p % 8 == 5 {
            for (r, chi) in &family {
                if *r < 3 {
                    continue;
                }
                let want = if p % 8 == 3 {
                    1.0
                } else {
                    let e = (s as u64) >> (*r - 2);
                    if e % 2 == 0 {
                        1.0
                    } else {
                        -1.0
                    }
                };
                let got = chi.eval(f, four);
                worst = worst.max(got.dist(&ComplexVal::exact(want, 0.0)));
                checked += 1;
            }
        }
        rows.push(LemmaAudit { id: "L11".into(), applicable: checked > 0, residual: worst, tolerance: tol, checked });
    }

    // Lemma 12: p = 3 (mod 8), order 2^r (r >= 3), 2^(r+1) | q-1:
    // G(chi) = q^((2^(r-2)-1)/2^(r-1)) J(octic on the subfield).
    {
        let mut worst = 0.0f64;
        let mut checked = 0;
        if p % 8 == 3 {
            for (r, chi) in &family {
                let r = *r;
                if r < 3 || v2 < r + 1 {
                    continue;
                }
                let sub_s = s / (1 << (r - 2));
                let e = (s as u64) * ((1u64 << (r - 2)) - 1) / (1u64 << (r - 1));
                let scale = (p as f64).powi(e as i32);
                let residual = subfield_jacobi_min_dist(p, sub_s, 8, &g(f, chi), scale, prec)?;
                worst = worst.max(residual);
                checked += 1;
            }
        }
        rows.push(LemmaAudit { id: "L12".into(), applicable: checked > 0, residual: worst, tolerance: tol, checked });
    }

    // Lemma 13: p = 5 (mod 8), order 2^r (r >= 2), 2^(r+1) | q-1:
    // G(chi) = (-1)^(s(r-1)/2^(r-1)) q^((2^(r-1)-1)/2^r) J(biquadratic).
    {
        let mut worst = 0.0f64;
        let mut checked = 0;
        if p % 8 == 5 {
            for (r, chi) in &family {
                let r = *r;
                if r < 2 || v2 < r + 1 {
                    continue;
                }
                let sub_s = s / (1 << (r - 1));
                let e2 = (s as u64) * ((1u64 << (r - 1)) - 1) / (1u64 << (r - 1));
                let scale = (p as f64).powi(e2 as i32).sqrt();
                let sign_e = (s as u64) * (r as u64 - 1) / (1u64 << (r - 1));
                let signed = if sign_e % 2 == 0 { scale } else { -scale };
                let residual = subfield_jacobi_min_dist(p, sub_s, 4, &g(f, chi), signed, prec)?;
                worst = worst.max(residual);
                checked += 1;
            }
        }
        rows.push(LemmaAudit { id: "L13".into(), applicable: checked > 0, residual: worst, tolerance: tol, checked });
    }

    Ok(AuditReport { p, s, q, m, precision: prec, rows })
}

/// min over characters of exact order d on F_{p^sub_s} of
/// |target - scale * J(chi)|.
fn subfield_jacobi_min_dist(
    p: u64,
    sub_s: u32,
    d: u64,
    target: &ComplexVal,
    scale: f64,
    prec: Precision,
) -> Result<f64> {
    let sub = build_field_with_budget(p, sub_s, crate::field::DEFAULT_TABLE_BUDGET)?;
    let q1 = sub.q() - 1;
    if q1 % d != 0 {
        return Err(Error::OrderDoesNotDivide { d, q1 });
    }
    let mut best = f64::INFINITY;
    let mut j = 1;
    while j < d {
        let chi = MultChar { slot: j * (q1 / d), q1 };
        let jv = jacobi_sum_prec(&sub, &chi, prec)?.scale(scale);
        best = best.min(target.dist(&jv));
        j += 2;
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_field;

    #[test]
    fn legendre_symbol_on_f7() {
        let f = build_field(7, 1).unwrap();
        let chi = character(&f, 2).unwrap();
        // Euler criterion oracle: x^3 mod 7
        for x in 1..7u64 {
            let euler = arith::powmod(x, 3, 7);
            let want = if euler == 1 { 1.0 } else { -1.0 };
            let got = chi.eval(&f, f.from_int(x));
            assert!(got.dist(&ComplexVal::exact(want, 0.0)) < 1e-12);
        }
        assert_eq!(chi.eval(&f, f.zero()), ComplexVal::zero());
    }

    #[test]
    fn trivial_character_rejected() {
        let f = build_field(5, 1).unwrap();
        let chi = character(&f, 1).unwrap();
        assert!(chi.is_trivial());
        assert!(matches!(gauss_sum(&f, &chi), Err(Error::TrivialCharacter)));
        assert!(matches!(jacobi_sum(&f, &chi), Err(Error::TrivialCharacter)));
        assert!(matches!(character(&f, 3), Err(Error::OrderDoesNotDivide { .. })));
    }

    #[test]
    fn quadratic_gauss_sum_f3_is_i_sqrt3() {
        let f = build_field(3, 1).unwrap();
        let eta = character(&f, 2).unwrap();
        let got = gauss_sum(&f, &eta).unwrap();
        let want = ComplexVal::exact(0.0, 3.0f64.sqrt());
        assert!(got.dist(&want) < 1e-12);
    }

    #[test]
    fn quadratic_gauss_sum_f9_is_3() {
        let f = build_field(3, 2).unwrap();
        let eta = character(&f, 2).unwrap();
        let got = gauss_sum(&f, &eta).unwrap();
        assert!(got.dist(&ComplexVal::exact(3.0, 0.0)) < 1e-12);
    }

    #[test]
    fn biquadratic_gauss_sum_f81_is_minus_9() {
        let f = build_field(3, 4).unwrap();
        let chi = character(&f, 4).unwrap();
        let got = gauss_sum(&f, &chi).unwrap();
        assert!(got.dist(&ComplexVal::exact(-9.0, 0.0)) < 1e-10);
    }

    #[test]
    fn biquadratic_jacobi_sum_f5() {
        let f = build_field(5, 1).unwrap();
        let chi = character(&f, 4).unwrap();
        let j = jacobi_sum(&f, &chi).unwrap();
        assert!((j.re - (-1.0)).abs() < 1e-12);
        assert!((j.im.abs() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn octic_jacobi_sum_f81() {
        let f = build_field(3, 4).unwrap();
        let chi = character(&f, 8).unwrap();
        let j = jacobi_sum(&f, &chi).unwrap();
        // 7^2 + 2*4^2 = 81: J = 7 +/- 4 sqrt(2) i, |J|^2 = 81
        assert!((j.re - 7.0).abs() < 1e-10);
        assert!((j.im.abs() - 4.0 * 2.0f64.sqrt()).abs() < 1e-10);
        assert!((j.abs().powi(2) - 81.0).abs() < 1e-9);
    }

    #[test]
    fn gauss_magnitude_all_nontrivial_chars() {
        for (p, s) in [(7u64, 1u32), (3, 2), (5, 2)] {
            let f = build_field(p, s).unwrap();
            let q = f.q() as f64;
            for slot in 1..f.q() - 1 {
                let chi = char_from_slot(&f, slot);
                let g = gauss_sum(&f, &chi).unwrap();
                assert!((g.abs().powi(2) - q).abs() < 1e-9, "slot {slot} on F_{}", f.q());
            }
        }
    }

    #[test]
    fn jacobi_magnitude_for_non_eta() {
        let f = build_field(3, 2).unwrap();
        for slot in 1..8u64 {
            let chi = char_from_slot(&f, slot);
            if chi.order() == 2 {
                continue;
            }
            let j = jacobi_sum(&f, &chi).unwrap();
            assert!((j.abs().powi(2) - 9.0).abs() < 1e-10);
        }
    }

    #[test]
    fn lift_of_eta_f3_to_f9_is_quadratic() {
        let base = build_field(3, 1).unwrap();
        let target = build_field(3, 2).unwrap();
        let eta = character(&base, 2).unwrap();
        let lifted = lift_character(&base, &eta, &target).unwrap();
        assert_eq!(lifted.order(), 2);
        // table check: lifted(x) = eta(N(x)) for every x
        for x in target.elements() {
            if x == target.zero() {
                continue;
            }
            let n = target.norm_to_subfield(x, 1).unwrap();
            let want = eta.eval(&base, base.from_int(n.index() as u64));
            let got = lifted.eval(&target, x);
            assert!(got.dist(&want) < 1e-12);
        }
        let triv = character(&base, 1).unwrap();
        assert!(lift_character(&base, &triv, &target).unwrap().is_trivial());
    }

    #[test]
    fn lift_preserves_order_and_norm_compatibility() {
        let base = build_field(3, 2).unwrap();
        let target = build_field(3, 4).unwrap();
        for slot in 0..8u64 {
            let chi = char_from_slot(&base, slot);
            let lifted = lift_character(&base, &chi, &target).unwrap();
            assert_eq!(lifted.order(), chi.order());
            if !chi.is_trivial() {
                // Davenport-Hasse: G(chi') = -G(chi)^2
                let lhs = gauss_sum(&target, &lifted).unwrap();
                let gb = gauss_sum(&base, &chi).unwrap();
                let rhs = gb.mul(&gb).scale(-1.0);
                assert!(lhs.dist(&rhs) < 1e-9, "slot {slot}");
            }
        }
    }

    #[test]
    fn lift_iff_order_divides_base_order() {
        // Lemma 7(b) by exhaustion: the lifts of F_3 characters into F_9 are
        // exactly the characters of order dividing 2.
        let base = build_field(3, 1).unwrap();
        let target = build_field(3, 2).unwrap();
        let mut lifted_slots: Vec<u64> = (0..2)
            .map(|k| {
                let chi = char_from_slot(&base, k);
                lift_character(&base, &chi, &target).unwrap().slot()
            })
            .collect();
        lifted_slots.sort_unstable();
        let mut divisor_slots: Vec<u64> = (0..8)
            .filter(|&slot| 2 % char_from_slot(&target, slot).order() == 0)
            .collect();
        divisor_slots.sort_unstable();
        assert_eq!(lifted_slots, divisor_slots);
    }

    #[test]
    fn audit_f81_m3_and_m4() {
        let f = build_field(3, 4).unwrap();
        for m in [3u32, 4] {
            let rep = audit_lemmas(&f, m, &AuditConfig::default()).unwrap();
            assert!(rep.passed(), "audit failed at m={m}: {:#?}", rep.rows);
            for need in ["L2a", "L2b", "L3", "L4", "L5", "L6", "L10", "L12"] {
                let row = rep.rows.iter().find(|r| r.id == need).unwrap();
                assert!(row.applicable, "{need} should be applicable on F_81");
                assert!(row.residual < 1e-9, "{need} residual {}", row.residual);
            }
        }
    }

    #[test]
    fn audit_f25_lemma13() {
        let f = build_field(5, 2).unwrap();
        let rep = audit_lemmas(&f, 2, &AuditConfig::default()).unwrap();
        assert!(rep.passed(), "{:#?}", rep.rows);
        let l13 = rep.rows.iter().find(|r| r.id == "L13").unwrap();
        assert!(l13.applicable);
        assert!(l13.residual < 1e-9);
    }

    #[test]
    fn error_bound_soundness() {
        // Recomputing at extended precision moves the value by less than err.
        for (p, s) in [(3u64, 4u32), (5, 2), (11, 1)] {
            let f = build_field(p, s).unwrap();
            for d in [2u64, 4, 8] {
                if (f.q() - 1) % d != 0 {
                    continue;
                }
                let chi = character(&f, d).unwrap();
                let a = gauss_sum_prec(&f, &chi, Precision::Double).unwrap();
                let b = gauss_sum_prec(&f, &chi, Precision::Extended).unwrap();
                assert!(a.dist(&b) <= a.err, "p={p} s={s} d={d}: {} vs err {}", a.dist(&b), a.err);
            }
        }
    }

    #[test]
    fn audit_report_serializes_flat() {
        let f = build_field(5, 1).unwrap();
        let rep = audit_lemmas(&f, 2, &AuditConfig::default()).unwrap();
        let json = serde_json::to_string(&rep).unwrap();
        let back: AuditReport = serde_json::from_str(&json).unwrap();
        assert_eq!(rep.rows.len(), back.rows.len());
    }
}
