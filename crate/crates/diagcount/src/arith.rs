//! Small integer number theory shared across modules.

pub fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, valid for all u64 inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d & 1 == 0 {
        d >>= 1;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Distinct prime factors by trial division, Miller-Rabin on the cofactor.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n && d < 1 << 21 {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        if is_prime(n) {
            out.push(n);
        } else {
            // Cofactor of a u64 after trial division to 2^21 is prime or a
            // semiprime of two large factors; split by Pollard rho.
            let mut stack = vec![n];
            while let Some(m) = stack.pop() {
                if is_prime(m) {
                    if !out.contains(&m) {
                        out.push(m);
                    }
                } else {
                    let f = pollard_rho(m);
                    stack.push(f);
                    stack.push(m / f);
                }
            }
        }
    }
    out.sort_unstable();
    out
}

fn pollard_rho(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        while d == 1 {
            x = (mulmod(x, x, n) + c) % n;
            y = (mulmod(y, y, n) + c) % n;
            y = (mulmod(y, y, n) + c) % n;
            d = gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// 2-adic valuation.
pub fn v2(n: u64) -> u32 {
    debug_assert!(n > 0);
    n.trailing_zeros()
}

pub fn checked_pow_u128(base: u64, exp: u32) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base as u128)?;
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_small() {
        let primes: Vec<u64> = (2..1000).filter(|&n| is_prime(n)).collect();
        // Sieve oracle.
        let mut sieve = vec![true; 1000];
        sieve[0] = false;
        sieve[1] = false;
        for i in 2..1000 {
            if sieve[i] {
                for j in (i * i..1000).step_by(i) {
                    sieve[j] = false;
                }
            }
        }
        let expected: Vec<u64> = (2..1000).filter(|&n| sieve[n as usize]).collect();
        assert_eq!(primes, expected);
    }

    #[test]
    fn factors_of_q_minus_1() {
        assert_eq!(prime_factors(80), vec![2, 5]);
        assert_eq!(prime_factors(6560), vec![2, 5, 41]);
        assert_eq!(prime_factors(1), Vec::<u64>::new());
    }

    #[test]
    fn two_adic() {
        assert_eq!(v2(80), 4);
        assert_eq!(v2(24), 3);
        assert_eq!(v2(5), 0);
    }
}
