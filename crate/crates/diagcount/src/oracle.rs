//! Independent counters used to validate every closed formula: brute-force
//! enumeration, exact dynamic-programming convolution, and the numeric
//! Gauss-sum count, plus the audit of the W-value machinery.

use num_bigint::{BigInt, BigUint};
use num_traits::{FromPrimitive, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::charsum::{self, ComplexVal, Precision};
use crate::closed_form::ProblemSpec;
use crate::dd::{cis_frac_dd, CDd, Dd, CDD_ZERO};
use crate::error::{Error, Result};
use crate::field::{build_field_with_budget, Field, FieldElement};

pub const DEFAULT_DP_BUDGET: u64 = 1 << 14;
pub const DEFAULT_BRUTE_CAP: u64 = 10_000_000;

/// Preimage counts of x -> coeff * x^d over the whole field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerHistogram {
    pub d: u64,
    pub counts: Vec<u64>,
}

pub fn power_histogram(f: &Field, d: u64) -> PowerHistogram {
    power_histogram_scaled(f, d, f.one())
}

pub fn power_histogram_scaled(f: &Field, d: u64, coeff: FieldElement) -> PowerHistogram {
    let mut counts = vec![0u64; f.q() as usize];
    counts[0] += 1; // 0^d = 0 for d >= 1
    let q1 = f.q() - 1;
    for k in 0..q1 {
        let img = f.mul(coeff, f.exp((d as u128 * k as u128 % q1 as u128) as u64));
        counts[img.index()] += 1;
    }
    PowerHistogram { d, counts }
}

impl PowerHistogram {
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.counts.iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, &c)| (i, c))
    }
}

/// Exact N by full enumeration of q^n tuples.
pub fn brute_force(spec: &ProblemSpec, cap: u64) -> Result<BigUint> {
    let q = spec
        .q
        .to_u64()
        .ok_or(Error::TooLarge { what: "q", size: u128::MAX, cap })?;
    let total = crate::arith::checked_pow_u128(q, spec.n).unwrap_or(u128::MAX);
    if total > cap as u128 {
        return Err(Error::TooLarge { what: "q^n", size: total, cap });
    }
    let f = build_field_with_budget(spec.p, spec.s, q)?;
    let d = 1u64 << spec.m;
    let q1 = q - 1;
    let pw: Vec<FieldElement> = (0..q)
        .map(|i| {
            let x = f.element(i).unwrap();
            match f.dlog(x) {
                Err(_) => f.zero(),
                Ok(k) => f.exp((d as u128 * k as u128 % q1 as u128) as u64),
            }
        })
        .collect();
    let n = spec.n as usize;
    let mut count = 0u64;
    let mut stack_sum = vec![f.zero(); n + 1];
    let mut digit = vec![0u64; n];
    let mut level = 0usize;
    loop {
        if level == n {
            if stack_sum[n] == f.zero() {
                count += 1;
            }
            // backtrack to the deepest incrementable digit
            loop {
                if level == 0 {
                    return Ok(BigUint::from(count));
                }
                level -= 1;
                digit[level] += 1;
                if digit[level] < q {
                    break;
                }
                digit[level] = 0;
            }
        }
        stack_sum[level + 1] = f.add(stack_sum[level], pw[digit[level] as usize]);
        level += 1;
    }
}

fn dp_generic<T>(f: &Field, hists: &[&PowerHistogram]) -> Vec<T>
where
    T: Clone + Zero + FromPrimitive + std::ops::AddAssign + std::ops::Mul<Output = T>,
{
    let q = f.q() as usize;
    let s = f.s() as usize;
    let p = f.p();
    let pow_p: Vec<u64> = (0..s).scan(1u64, |acc, _| {
        let v = *acc;
        *acc *= p;
        Some(v)
    })
    .collect();
    let decompose = |mut idx: u64, out: &mut [u64]| {
        for d in out.iter_mut() {
            *d = idx % p;
            idx /= p;
        }
    };
    let mut state: Vec<T> = vec![T::zero(); q];
    state[0] = T::from_u64(1).unwrap();
    let mut zero_counts = Vec::with_capacity(hists.len());
    let mut da = vec![0u64; s];
    for hist in hists {
        let nz: Vec<(Vec<u64>, u64)> = hist
            .nonzero()
            .map(|(i, c)| {
                let mut db = vec![0u64; s];
                decompose(i as u64, &mut db);
                (db, c)
            })
            .collect();
        let mut next: Vec<T> = vec![T::zero(); q];
        for a in 0..q {
            if state[a].is_zero() {
                continue;
            }
            decompose(a as u64, &mut da);
            for (db, c) in &nz {
                let mut idx = 0u64;
                for i in 0..s {
                    let mut t = da[i] + db[i];
                    if t >= p {
                        t -= p;
                    }
                    idx += t * pow_p[i];
                }
                next[idx as usize] += state[a].clone() * T::from_u64(*c).unwrap();
            }
        }
        state = next;
        zero_counts.push(state[0].clone());
    }
    zero_counts
}

/// Exact count of solutions to sum of the per-variable power terms = 0, one
/// histogram per variable; returns the count after each variable is added.
pub fn dp_count_terms(f: &Field, hists: &[&PowerHistogram]) -> Vec<BigUint> {
    // q^n fits u128 for every desk-scale grid; fall back to big integers
    // beyond that.
    let fits = BigUint::from(f.q())
        .pow(hists.len() as u32)
        .to_u128()
        .is_some();
    if fits {
        dp_generic::<u128>(f, hists).into_iter().map(BigUint::from).collect()
    } else {
        dp_generic::<BigUint>(f, hists)
    }
}

/// N for n = 1..=n_max in one DP run.
pub fn dp_prefix_counts(f: &Field, m: u32, n_max: u32) -> Vec<BigUint> {
    let hist = power_histogram(f, 1u64 << m);
    let hists: Vec<&PowerHistogram> = (0..n_max).map(|_| &hist).collect();
    dp_count_terms(f, &hists)
}

/// Exact N by additive convolution of the power histogram.
pub fn dp_count(spec: &ProblemSpec, budget: u64) -> Result<BigUint> {
    let q = spec.q.to_u64().unwrap_or(u64::MAX);
    if q > budget {
        return Err(Error::TooLarge { what: "q", size: q as u128, cap: budget });
    }
    let f = build_field_with_budget(spec.p, spec.s, q)?;
    Ok(dp_prefix_counts(&f, spec.m, spec.n).pop().unwrap())
}

/// Table of G(lambda^j) for a fixed character lambda of order 2^m.
pub struct GaussTable {
    pub m: u32,
    g: Vec<ComplexVal>,
}

impl GaussTable {
    pub fn build(f: &Field, m: u32, prec: Precision) -> Result<GaussTable> {
        let d = 1u64 << m;
        let lam = charsum::character(f, d)?;
        let mut g = vec![ComplexVal::zero(); d as usize];
        for j in 1..d {
            g[j as usize] = charsum::gauss_sum_prec(f, &lam.pow(j), prec)?;
        }
        Ok(GaussTable { m, g })
    }

    /// G(lambda^j), j nonzero mod 2^m.
    pub fn gauss(&self, j: u64) -> ComplexVal {
        let j = j % (1u64 << self.m);
        debug_assert_ne!(j, 0);
        self.g[j as usize]
    }

    /// W_{r,t}(c0) = sum over odd j0 < 2^r of
    /// G(lambda^(2^(m-r) j0)) zeta_{2^(m-t)}^(2^(m-r) c0 j0).
    pub fn w_value(&self, r: u32, t: u32, c0: u64) -> ComplexVal {
        debug_assert!(r >= 1 && r <= self.m && t <= self.m && c0 % 2 == 1);
        let m = self.m;
        let den = 1u64 << (m - t);
        let mut acc = ComplexVal::zero();
        let mut j0 = 1u64;
        while j0 < (1u64 << r) {
            let j = (1u64 << (m - r)) * j0;
            let num = ((1u128 << (m - r)) * c0 as u128 * j0 as u128 % den as u128) as u64;
            let (c, s) = cis_unit(num, den);
            acc = acc.add(&self.gauss(j).mul(&ComplexVal::new(c, s, 2.0 * f64::EPSILON)));
            j0 += 2;
        }
        acc
    }

    /// Inner sum of the counting identity: sum_j G(lambda^j) zeta_{2^m}^{cj}.
    pub fn inner_sum(&self, c: u64) -> ComplexVal {
        let d = 1u64 << self.m;
        let mut acc = ComplexVal::zero();
        for j in 1..d {
            let num = (c as u128 * j as u128 % d as u128) as u64;
            let (re, im) = cis_unit(num, d);
            acc = acc.add(&self.gauss(j).mul(&ComplexVal::new(re, im, 2.0 * f64::EPSILON)));
        }
        acc
    }

    /// S_t by definition: sum over c with 2^t exactly dividing c of inner^n.
    pub fn s_t_direct(&self, t: u32, n: u32) -> ComplexVal {
        let d = 1u64 << self.m;
        let mut acc = ComplexVal::zero();
        for c in 1..=d {
            if c % (1u64 << t) == 0 && (c >> t) % 2 == 1 {
                acc = acc.add(&self.inner_sum(c % d).powi(n));
            }
        }
        acc
    }

    /// S_t recombined from W values: sum over odd c0 <= 2^(m-t) of
    /// (sum_r W_{r,t}(c0))^n.
    pub fn s_t_from_w(&self, t: u32, n: u32) -> ComplexVal {
        let mut acc = ComplexVal::zero();
        let top = 1u64 << (self.m - t);
        let mut c0 = 1u64;
        while c0 <= top.max(1) {
            let mut w_sum = ComplexVal::zero();
            for r in 1..=self.m {
                w_sum = w_sum.add(&self.w_value(r, t, c0));
            }
            acc = acc.add(&w_sum.powi(n));
            c0 += 2;
            if top == 1 {
                break;
            }
        }
        acc
    }
}

fn cis_unit(num: u64, den: u64) -> (f64, f64) {
    let (s, c) = (std::f64::consts::TAU * num as f64 / den as f64).sin_cos();
    (c, s)
}

/// Convenience wrapper for a single W value.
pub fn w_values(f: &Field, m: u32, r: u32, t: u32, c0: u64) -> Result<ComplexVal> {
    if r < 1 || r > m || t > m || c0 % 2 == 0 {
        return Err(Error::InvalidParameter("need 1 <= r <= m, 0 <= t <= m, odd c0".into()));
    }
    Ok(GaussTable::build(f, m, Precision::Double)?.w_value(r, t, c0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussCount {
    pub value: String,
    pub residual: f64,
    pub escalated: bool,
}

/// Numeric evaluation of the Gauss-sum counting identity; rounds to the
/// nearest integer and reports the rounding residual. Escalates once to
/// double-double arithmetic when plain doubles cannot certify the rounding.
pub fn gauss_count(spec: &ProblemSpec, f: &Field) -> Result<(BigUint, f64, bool)> {
    let q = f.q();
    let m = spec.m;
    let n = spec.n;
    let d = 1u64 << m;
    // fast path: literal evaluation from the Gauss-sum table
    let gt = GaussTable::build(f, m, Precision::Double)?;
    let mut sum = ComplexVal::zero();
    for c in 1..=d {
        sum = sum.add(&gt.inner_sum(c % d).powi(n));
    }
    let pref = (q - 1) as f64 / (d as f64 * q as f64);
    let val = sum.re * pref;
    let rounded = val.round();
    let residual = (val - rounded).abs().max((sum.im * pref).abs());
    if residual < 0.25 && rounded.abs() < 9.0e15 {
        let value = add_correction(spec, rounded as i128)?;
        return Ok((value, residual, false));
    }
    // escalated path: exact bucketing by (dlog mod 2^m, trace), double-double
    let cnt = dlog_trace_histogram(f, m);
    let (value, residual) = eq4_bucketed(&cnt, spec.p, q, &spec.q, m, n)?;
    Ok((value, residual, true))
}

/// Histogram over (k mod 2^m, Tr(g^k)) for k = 0..q-2.
pub(crate) fn dlog_trace_histogram(f: &Field, m: u32) -> Vec<Vec<u64>> {
    let d = 1usize << m;
    let p = f.p() as usize;
    let mut cnt = vec![vec![0u64; p]; d];
    let mask = (d - 1) as u64;
    for k in 0..f.q() - 1 {
        let t = f.trace(f.exp(k));
        cnt[(k & mask) as usize][t as usize] += 1;
    }
    cnt
}

/// Evaluate the counting identity from the (dlog mod 2^m, trace) histogram
/// in double-double arithmetic: the inner sum collapses to
/// 2^m X_a + 1 with X_a = sum_t cnt[a][t] zeta_p^t.
pub(crate) fn eq4_bucketed(
    cnt: &[Vec<u64>],
    p: u64,
    q: u64,
    q_big: &BigUint,
    m: u32,
    n: u32,
) -> Result<(BigUint, f64)> {
    let d = 1u64 << m;
    let roots: Vec<CDd> = (0..p).map(|t| {
        let (c, s) = cis_frac_dd(t, p);
        CDd::new(c, s)
    })
    .collect();
    let one = CDd::new(Dd::from_f64(1.0), Dd::from_f64(0.0));
    let mut total = CDD_ZERO;
    for row in cnt.iter() {
        let mut x = CDD_ZERO;
        for (t, &c) in row.iter().enumerate() {
            if c != 0 {
                x = x.add(roots[t].mul_dd(Dd::from_i64(c as i64)));
            }
        }
        let inner = x.mul_dd(Dd::from_i64(d as i64)).add(one);
        total = total.add(inner.powi(n));
    }
    let pref = Dd::from_i64((q - 1) as i64).div(Dd::from_i64((d * q) as i64));
    let val = total.re.mul(pref);
    let imag = total.im.mul(pref).to_f64().abs();
    if val.hi.abs() >= 9.0e15 {
        return Err(Error::ResidualTooLarge { residual: f64::INFINITY });
    }
    let rounded = val.hi.round();
    let residual = val.sub(Dd::from_f64(rounded)).abs().to_f64().max(imag);
    if residual >= 0.25 {
        return Err(Error::ResidualTooLarge { residual });
    }
    let lead = BigInt::from(q_big.pow(n - 1));
    let value = lead + BigInt::from(rounded as i128);
    value
        .to_biguint()
        .ok_or_else(|| Error::Internal("negative count from numeric path".into()))
        .map(|v| (v, residual))
}

fn add_correction(spec: &ProblemSpec, corr: i128) -> Result<BigUint> {
    let lead = BigInt::from(spec.q.pow(spec.n - 1));
    (lead + BigInt::from(corr))
        .to_biguint()
        .ok_or_else(|| Error::Internal("negative count from numeric path".into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WAuditRow {
    pub r: u32,
    pub t: u32,
    pub c0: u64,
    pub case: String,
    pub residual: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecombinationRow {
    pub what: String,
    pub n: u32,
    pub residual: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma14Report {
    pub p: u64,
    pub q: u64,
    pub m: u32,
    pub w_rows: Vec<WAuditRow>,
    pub recombinations: Vec<RecombinationRow>,
}

impl Lemma14Report {
    pub fn passed(&self) -> bool {
        self.w_rows.iter().all(|r| r.residual <= r.tolerance)
            && self.recombinations.iter().all(|r| r.residual <= r.tolerance)
    }

    pub fn max_w_residual(&self) -> f64 {
        self.w_rows.iter().map(|r| r.residual).fold(0.0, f64::max)
    }
}

/// Audit every W-value case row plus the S-recombination identities.
pub fn audit_lemma14(f: &Field, m: u32) -> Result<Lemma14Report> {
    let p = f.p();
    let q = f.q();
    let pm8 = p % 8;
    if pm8 != 3 && pm8 != 5 {
        return Err(Error::UnsupportedResidue { p, residue: pm8 });
    }
    let min_m = if pm8 == 3 { 3 } else { 2 };
    if m < min_m {
        return Err(Error::InvalidParameter(format!("need m >= {min_m} for p = {pm8} (mod 8)")));
    }
    let v2 = crate::arith::v2(q - 1);
    if m > v2 {
        return Err(Error::OrderNotDividing { m, v2 });
    }
    let gt = GaussTable::build(f, m, Precision::Double)?;
    let tol = 1e-6 * (q as f64).sqrt();
    let g_eta = gt.gauss(1u64 << (m - 1));

    let mut w_rows = Vec::new();
    for r in 1..=m {
        for t in 0..=m {
            let top = (1u64 << (m - t)).max(2) - 1;
            let mut c0 = 1u64;
            let mut seen = 0;
            while c0 <= top && seen < 16 {
                let got = gt.w_value(r, t, c0);
                let (case, want) = expected_w(&gt, &g_eta, pm8, m, r, t, c0);
                w_rows.push(WAuditRow {
                    r,
                    t,
                    c0,
                    case,
                    residual: got.dist(&want),
                    tolerance: tol,
                });
                c0 += 2;
                seen += 1;
            }
        }
    }

    // Recombination identities, checked at small n with relative tolerance.
    let mut recombinations = Vec::new();
    for n in 1..=3u32 {
        // S_{m-1} + S_m = (sum W + W_m)^n + (sum W - W_m)^n at t = m, c0 = 1.
        let mut head = ComplexVal::zero();
        for r in 1..m {
            head = head.add(&gt.w_value(r, m, 1));
        }
        let wm = gt.w_value(m, m, 1);
        let recombined = head.add(&wm).powi(n).add(&head.sub(&wm).powi(n));
        let direct = gt.s_t_direct(m - 1, n).add(&gt.s_t_direct(m, n));
        push_rel(&mut recombinations, "S_(m-1)+S_m", n, &direct, &recombined);

        if pm8 == 3 {
            let mut head = ComplexVal::zero();
            for r in 1..m {
                head = head.add(&gt.w_value(r, m - 2, 1));
            }
            let recombined = head.powi(n).scale(2.0);
            push_rel(&mut recombinations, "S_(m-2)", n, &gt.s_t_direct(m - 2, n), &recombined);
            for t in 0..=m.saturating_sub(3) {
                let mut head = ComplexVal::zero();
                for r in 1..=t + 1 {
                    head = head.add(&gt.w_value(r, t, 1));
                }
                let wx = gt.w_value(t + 3, t, 1);
                let recombined = head
                    .add(&wx)
                    .powi(n)
                    .add(&head.sub(&wx).powi(n))
                    .scale((1u64 << (m - t - 2)) as f64);
                push_rel(&mut recombinations, &format!("S_{t}"), n, &gt.s_t_direct(t, n), &recombined);
            }
        } else {
            for t in 0..=m - 2 {
                let mut head = ComplexVal::zero();
                for r in 1..=t + 1 {
                    head = head.add(&gt.w_value(r, t, 1));
                }
                let wx = gt.w_value(t + 2, t, 1);
                let recombined = head
                    .add(&wx)
                    .powi(n)
                    .add(&head.sub(&wx).powi(n))
                    .scale((1u64 << (m - t - 2)) as f64);
                push_rel(&mut recombinations, &format!("S_{t}"), n, &gt.s_t_direct(t, n), &recombined);
            }
        }

        // Eq-(6) recombination: definition of S_t vs the W-value form, all t.
        for t in 0..=m {
            push_rel(
                &mut recombinations,
                &format!("S_{t} via W"),
                n,
                &gt.s_t_direct(t, n),
                &gt.s_t_from_w(t, n),
            );
        }
    }

    Ok(Lemma14Report { p, q, m, w_rows, recombinations })
}

fn push_rel(rows: &mut Vec<RecombinationRow>, what: &str, n: u32, a: &ComplexVal, b: &ComplexVal) {
    let residual = a.dist(b) / (1.0 + a.abs());
    rows.push(RecombinationRow { what: what.to_string(), n, residual, tolerance: 1e-9 });
}

/// The case table for W_{r,t}(c0), evaluated from the numeric Gauss sums.
fn expected_w(
    gt: &GaussTable,
    g_eta: &ComplexVal,
    pm8: u64,
    m: u32,
    r: u32,
    t: u32,
    c0: u64,
) -> (String, ComplexVal) {
    let i_pow = |e: u64| -> ComplexVal {
        match e % 4 {
            0 => ComplexVal::exact(1.0, 0.0),
            1 => ComplexVal::exact(0.0, 1.0),
            2 => ComplexVal::exact(-1.0, 0.0),
            _ => ComplexVal::exact(0.0, -1.0),
        }
    };
    if r == 1 {
        return if t == 0 {
            ("-G(eta)".into(), g_eta.scale(-1.0))
        } else {
            ("G(eta)".into(), *g_eta)
        };
    }
    let g = gt.gauss(1u64 << (m - r));
    let gbar = gt.gauss((1u64 << m) - (1u64 << (m - r)));
    let sum = g.add(&gbar);
    let diff = g.sub(&gbar);
    if r == 2 {
        return match t {
            0 => ("i^c0 (G - Gbar)".into(), i_pow(c0).mul(&diff)),
            1 => ("-(G + Gbar)".into(), sum.scale(-1.0)),
            _ => ("G + Gbar".into(), sum),
        };
    }
    let coeff = (1u64 << (r - 2)) as f64;
    if r <= t {
        ("2^(r-2) (G + Gbar)".into(), sum.scale(coeff))
    } else if r == t + 1 {
        ("-2^(r-2) (G + Gbar)".into(), sum.scale(-coeff))
    } else if r == t + 2 && pm8 == 5 {
        ("2^(r-2) i^c0 (G - Gbar)".into(), i_pow(c0).mul(&diff).scale(coeff))
    } else if r == t + 3 && pm8 == 3 {
        let sign = if c0 % 8 == 1 || c0 % 8 == 3 { 1.0 } else { -1.0 };
        let factor = ComplexVal::exact(0.0, sign * (1u64 << (r - 3)) as f64 * 2.0f64.sqrt());
        ("+/-2^(r-3) i sqrt2 (G - Gbar)".into(), factor.mul(&diff))
    } else {
        ("0".into(), ComplexVal::zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::classify;
    use crate::field::build_field;
    use num_traits::One;

    #[test]
    fn histogram_structure() {
        // F_5, d = 4: x^4 = 1 for all nonzero x.
        let f = build_field(5, 1).unwrap();
        let h = power_histogram(&f, 4);
        assert_eq!(h.counts[0], 1);
        assert_eq!(h.counts[1], 4);
        assert_eq!(h.counts.iter().sum::<u64>(), 5);
        // F_9, d = 2: four squares hit twice.
        let f = build_field(3, 2).unwrap();
        let h = power_histogram(&f, 2);
        assert_eq!(h.counts[0], 1);
        assert_eq!(h.counts.iter().filter(|&&c| c == 2).count(), 4);
        // d = 1: the identity map.
        let h = power_histogram(&f, 1);
        assert!(h.counts.iter().all(|&c| c == 1));
        // d | q-1 general structure
        let f = build_field(3, 4).unwrap();
        for d in [2u64, 4, 8, 16] {
            let h = power_histogram(&f, d);
            let hits = h.counts.iter().filter(|&&c| c == d).count() as u64;
            assert_eq!(hits, (f.q() - 1) / d);
            assert_eq!(h.counts.iter().sum::<u64>(), f.q());
        }
    }

    #[test]
    fn brute_force_small_cases() {
        let spec = classify(3, 1, 1, 2).unwrap();
        assert_eq!(brute_force(&spec, DEFAULT_BRUTE_CAP).unwrap(), BigUint::from(1u32));
        let spec = classify(5, 1, 2, 3).unwrap();
        assert_eq!(brute_force(&spec, DEFAULT_BRUTE_CAP).unwrap(), BigUint::from(1u32));
        let spec = classify(3, 4, 3, 3).unwrap();
        assert_eq!(brute_force(&spec, DEFAULT_BRUTE_CAP).unwrap(), BigUint::from(7041u32));
        assert!(matches!(
            brute_force(&classify(3, 4, 3, 5).unwrap(), 1000),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn dp_matches_table_rows() {
        let spec = classify(3, 4, 3, 4).unwrap();
        assert_eq!(dp_count(&spec, DEFAULT_DP_BUDGET).unwrap(), BigUint::from(1130241u32));
        let spec = classify(3, 8, 3, 3).unwrap();
        assert_eq!(dp_count(&spec, DEFAULT_DP_BUDGET).unwrap(), BigUint::from(30805761u32));
        let spec = classify(5, 2, 2, 5).unwrap();
        assert_eq!(dp_count(&spec, DEFAULT_DP_BUDGET).unwrap(), BigUint::from(498625u32));
    }

    #[test]
    fn dp_equals_brute_force() {
        for (p, s, m, n) in [(3u64, 2u32, 2u32, 3u32), (3, 2, 3, 2), (5, 1, 2, 4), (13, 1, 2, 3)] {
            let spec = classify(p, s, m, n).unwrap();
            assert_eq!(
                dp_count(&spec, DEFAULT_DP_BUDGET).unwrap(),
                brute_force(&spec, DEFAULT_BRUTE_CAP).unwrap(),
                "({p},{s},{m},{n})"
            );
        }
    }

    #[test]
    fn dp_n1_is_one() {
        let spec = classify(3, 4, 3, 1).unwrap();
        assert_eq!(dp_count(&spec, DEFAULT_DP_BUDGET).unwrap(), BigUint::one());
    }

    #[test]
    fn gauss_count_examples() {
        let spec = classify(3, 4, 3, 3).unwrap();
        let f = build_field(3, 4).unwrap();
        let (n, res, esc) = gauss_count(&spec, &f).unwrap();
        assert_eq!(n, BigUint::from(7041u32));
        assert!(res < 1e-6);
        assert!(!esc);

        let spec = classify(5, 2, 2, 5).unwrap();
        let f = build_field(5, 2).unwrap();
        let (n, res, _) = gauss_count(&spec, &f).unwrap();
        assert_eq!(n, BigUint::from(498625u32));
        assert!(res < 1e-6);

        let spec = classify(5, 1, 2, 3).unwrap();
        let f = build_field(5, 1).unwrap();
        let (n, res, _) = gauss_count(&spec, &f).unwrap();
        assert_eq!(n, BigUint::one());
        assert!(res < 1e-9);
    }

    #[test]
    fn escalated_path_agrees_with_fast_path() {
        // Small enough that both paths certify; they must agree exactly.
        let spec = classify(3, 4, 4, 4).unwrap();
        let f = build_field(3, 4).unwrap();
        let (fast, _, esc) = gauss_count(&spec, &f).unwrap();
        assert!(!esc);
        let cnt = dlog_trace_histogram(&f, 4);
        let (slow, res) = eq4_bucketed(&cnt, 3, 81, &spec.q, 4, 4).unwrap();
        assert_eq!(fast, slow);
        assert!(res < 1e-12);
    }

    #[test]
    fn w_values_f81_m3() {
        // The p = 3 (mod 8) vanishing case: W_{2,0} = 0.
        let f = build_field(3, 4).unwrap();
        let w = w_values(&f, 3, 2, 0, 1).unwrap();
        assert!(w.abs() < 1e-9);
    }

    #[test]
    fn lemma14_audit_f81() {
        let f = build_field(3, 4).unwrap();
        for m in [3u32, 4] {
            let rep = audit_lemma14(&f, m).unwrap();
            assert!(rep.passed(), "m={m}: max W residual {}", rep.max_w_residual());
            // r > t+3 rows are all zero rows for p = 3
            for row in &rep.w_rows {
                if row.r > row.t + 3 {
                    assert_eq!(row.case, "0");
                    assert!(row.residual < 1e-9);
                }
            }
        }
    }

    #[test]
    fn lemma14_audit_f25() {
        let f = build_field(5, 2).unwrap();
        let rep = audit_lemma14(&f, 2).unwrap();
        assert!(rep.passed());
        // W_{2,0}(1) = +/- i (G - Gbar) is the r = t+2 signed row
        let row = rep
            .w_rows
            .iter()
            .find(|r| r.r == 2 && r.t == 0 && r.c0 == 1)
            .unwrap();
        assert!(row.residual < 1e-9);
    }

    #[test]
    fn scaled_histogram_counts_coefficients() {
        let f = build_field(5, 1).unwrap();
        // 2 y^2 over F_5: squares {0,1,4} -> {0,2,3}
        let h = power_histogram_scaled(&f, 2, f.from_int(2));
        assert_eq!(h.counts[0], 1);
        assert_eq!(h.counts[2], 2);
        assert_eq!(h.counts[3], 2);
        assert_eq!(h.counts[1], 0);
    }
}
