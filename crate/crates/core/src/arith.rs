//! Small integer helpers: gcd, integer roots, factorization by trial division.

/// Largest modulus that [`factorize`] is used for.
pub const FACTOR_LIMIT: u64 = 1_000_000_000_000;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// `floor(x^(1/k))` computed without floating-point rounding errors.
pub fn iroot(x: u64, k: u32) -> u64 {
    if x == 0 || k == 1 {
        return x;
    }
    let mut r = (x as f64).powf(1.0 / k as f64).round() as u64;
    // the float guess is within one or two of the answer; fix it up exactly
    while r > 0 && pow_checked(r, k).is_none_or(|v| v > x) {
        r -= 1;
    }
    while pow_checked(r + 1, k).is_some_and(|v| v <= x) {
        r += 1;
    }
    r
}

/// `base^exp`, or `None` on u64 overflow.
pub fn pow_checked(base: u64, exp: u32) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// `x^k mod m` with the intermediate products held in u128.
pub fn pow_mod(x: u64, k: u32, m: u64) -> u64 {
    let m128 = m as u128;
    let x = x as u128 % m128;
    let mut acc = 1u128 % m128;
    for _ in 0..k {
        acc = acc * x % m128;
    }
    acc as u64
}

/// Prime factorization as `(p, h)` pairs with `p` increasing.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    debug_assert!(n <= FACTOR_LIMIT);
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut h = 0;
            while n.is_multiple_of(p) {
                n /= p;
                h += 1;
            }
            out.push((p, h));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let f = factorize(n);
    f.len() == 1 && f[0].1 == 1
}

/// Sieve of Eratosthenes, primes `<= limit`.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    let limit = limit as usize;
    if limit < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// All prime powers `p^h <= limit` with `h >= 1`, as `(p, h, p^h)` sorted by value.
pub fn prime_powers_up_to(limit: u64) -> Vec<(u64, u32, u64)> {
    let mut out = Vec::new();
    for p in primes_up_to(limit) {
        let mut q = p;
        let mut h = 1;
        while q <= limit {
            out.push((p, h, q));
            h += 1;
            match q.checked_mul(p) {
                Some(v) => q = v,
                None => break,
            }
        }
    }
    out.sort_by_key(|t| t.2);
    out
}

/// Smallest-prime-factor table for `0..=limit` (entries 0 and 1 are 0).
pub fn spf_table(limit: usize) -> Vec<u32> {
    let mut spf = vec![0u32; limit + 1];
    for i in 2..=limit {
        if spf[i] == 0 {
            let mut j = i;
            while j <= limit {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

/// Split `q` into its prime-power components using a smallest-prime-factor table.
pub fn prime_power_parts(mut q: usize, spf: &[u32]) -> Vec<usize> {
    let mut parts = Vec::new();
    while q > 1 {
        let p = spf[q] as usize;
        let mut pp = 1;
        while q.is_multiple_of(p) {
            q /= p;
            pp *= p;
        }
        parts.push(pp);
    }
    parts
}
