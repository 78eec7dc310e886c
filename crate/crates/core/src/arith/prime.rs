use crate::{Error, Result};

const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; the first twelve primes as witnesses are
/// sufficient for every `n < 2^64`.
pub fn is_prime(n: u64) -> Result<bool> {
    if n < 2 {
        return Err(Error::domain("primality is defined for n >= 2"));
    }
    for &w in &WITNESSES {
        if n == w {
            return Ok(true);
        }
        if n % w == 0 {
            return Ok(false);
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return Ok(false);
    }
    Ok(true)
}

/// Smallest prime strictly greater than `n`, if one fits in `u64`.
pub fn next_prime_above(n: u64) -> Option<u64> {
    let mut c = n.checked_add(1)?;
    loop {
        if c >= 2 && is_prime(c).unwrap_or(false) {
            return Some(c);
        }
        c = c.checked_add(1)?;
    }
}

/// Largest prime strictly smaller than `n`.
pub fn prev_prime_below(n: u64) -> Option<u64> {
    let mut c = n.checked_sub(1)?;
    while c >= 2 {
        if is_prime(c).unwrap_or(false) {
            return Some(c);
        }
        c -= 1;
    }
    None
}
