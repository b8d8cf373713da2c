//! Double-double arithmetic for the escalated numeric counting path.
//!
//! Plain doubles cannot round the Eq-(4)-style counts to the nearest integer
//! once n-th powers amplify the per-term rounding (worst grid cases need
//! absolute accuracy ~1e-17 on quantities ~1e15). A double-double carries
//! ~32 significant digits, which is ample.

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

pub(crate) const DD_ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
// 2*pi and pi/2 split into high/low doubles.
const TWO_PI: Dd = Dd { hi: 6.283185307179586, lo: 2.4492935982947064e-16 };
const PI_2: Dd = Dd { hi: 1.5707963267948966, lo: 6.123233995736766e-17 };

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

impl Dd {
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn from_i64(x: i64) -> Dd {
        // |x| < 2^53 is exact; larger split into two parts.
        let hi = x as f64;
        let lo = (x - hi as i64) as f64;
        Dd { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let e = e + self.lo + o.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + self.hi * o.lo + self.lo * o.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn mul_f64(self, c: f64) -> Dd {
        let (p, e) = two_prod(self.hi, c);
        let e = e + self.lo * c;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul_f64(q1));
        let q2 = r.hi / o.hi;
        let r2 = r.sub(o.mul_f64(q2));
        let q3 = r2.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add(Dd::from_f64(q3))
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            self.neg()
        } else {
            self
        }
    }
}

/// sin and cos of x, |x| <= pi/4 + small, by Taylor series in double-double.
fn sincos_taylor(x: Dd) -> (Dd, Dd) {
    let x2 = x.mul(x);
    // sin
    let mut term = x;
    let mut sin = x;
    let mut k = 1u32;
    loop {
        term = term.mul(x2).mul_f64(-1.0 / ((2 * k) as f64 * (2 * k + 1) as f64));
        sin = sin.add(term);
        k += 1;
        if term.hi.abs() < 1e-35 {
            break;
        }
    }
    // cos
    let mut term = Dd::from_f64(1.0);
    let mut cos = term;
    let mut k = 1u32;
    loop {
        term = term.mul(x2).mul_f64(-1.0 / ((2 * k - 1) as f64 * (2 * k) as f64));
        cos = cos.add(term);
        k += 1;
        if term.hi.abs() < 1e-35 {
            break;
        }
    }
    (sin, cos)
}

/// (cos, sin) of 2*pi*num/den with double-double accuracy.
pub(crate) fn cis_frac_dd(num: u64, den: u64) -> (Dd, Dd) {
    debug_assert!(num < den);
    let frac = Dd::from_i64(num as i64).div(Dd::from_i64(den as i64));
    let theta = frac.mul(TWO_PI);
    // reduce around the nearest multiple of pi/2
    let quadrant = (theta.hi / PI_2.hi).round();
    let x = theta.sub(PI_2.mul_f64(quadrant));
    let (s, c) = sincos_taylor(x);
    match (quadrant as i64).rem_euclid(4) {
        0 => (c, s),
        1 => (s.neg(), c),
        2 => (c.neg(), s.neg()),
        _ => (s, c.neg()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct CDd {
    pub re: Dd,
    pub im: Dd,
}

pub(crate) const CDD_ZERO: CDd = CDd { re: DD_ZERO, im: DD_ZERO };

impl CDd {
    pub fn new(re: Dd, im: Dd) -> CDd {
        CDd { re, im }
    }

    pub fn add(self, o: CDd) -> CDd {
        CDd { re: self.re.add(o.re), im: self.im.add(o.im) }
    }

    pub fn mul(self, o: CDd) -> CDd {
        CDd {
            re: self.re.mul(o.re).sub(self.im.mul(o.im)),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    pub fn mul_dd(self, c: Dd) -> CDd {
        CDd { re: self.re.mul(c), im: self.im.mul(c) }
    }

    pub fn powi(self, n: u32) -> CDd {
        let mut acc = CDd { re: Dd::from_f64(1.0), im: DD_ZERO };
        let mut base = self;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            e >>= 1;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_arithmetic_identities() {
        let a = Dd::from_i64(1).div(Dd::from_i64(3));
        let three = Dd::from_i64(3);
        let one = a.mul(three);
        assert!((one.to_f64() - 1.0).abs() < 1e-30);
        assert!((one.hi - 1.0).abs() < 1e-15);
        assert!(one.sub(Dd::from_f64(1.0)).abs().to_f64() < 1e-30);
    }

    #[test]
    fn exact_integers_survive() {
        let big = 1_234_567_890_123_456_789i64;
        let x = Dd::from_i64(big);
        let back = x.hi as i128 + x.lo as i128;
        assert_eq!(back, big as i128);
    }

    #[test]
    fn cis_matches_f64_everywhere() {
        for den in [8u64, 80, 6560, 97] {
            for num in 0..den.min(200) {
                let (c, s) = cis_frac_dd(num, den);
                let ang = std::f64::consts::TAU * num as f64 / den as f64;
                assert!((c.to_f64() - ang.cos()).abs() < 1e-14, "cos {num}/{den}");
                assert!((s.to_f64() - ang.sin()).abs() < 1e-14, "sin {num}/{den}");
            }
        }
    }

    #[test]
    fn cis_special_angles_are_tight() {
        // 1/8 of a turn: cos = sin = sqrt(2)/2
        let (c, s) = cis_frac_dd(1, 8);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((c.to_f64() - r).abs() < 1e-16);
        assert!((s.to_f64() - r).abs() < 1e-16);
        // half turn: cos = -1, sin = 0 to dd accuracy
        let (c, s) = cis_frac_dd(1, 2);
        assert!((c.to_f64() + 1.0).abs() < 1e-30);
        assert!(s.to_f64().abs() < 1e-30);
        // roots of unity sum to zero with ~1e-30 residue
        for den in [5u64, 16, 24] {
            let mut acc = CDD_ZERO;
            for num in 0..den {
                let (c, s) = cis_frac_dd(num, den);
                acc = acc.add(CDd::new(c, s));
            }
            assert!(acc.re.abs().to_f64() < 1e-29 && acc.im.abs().to_f64() < 1e-29);
        }
    }

    #[test]
    fn complex_powers_track_moduli() {
        let (c, s) = cis_frac_dd(3, 7);
        let z = CDd::new(c, s).powi(14);
        // |z| = 1, z = cis(6 turns) = 1
        assert!((z.re.to_f64() - 1.0).abs() < 1e-28);
        assert!(z.im.to_f64().abs() < 1e-28);
    }
}
