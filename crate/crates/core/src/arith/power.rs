use core::cmp::Ordering;

use astro_float::{BigFloat, Consts, RoundingMode};
use num_bigint::BigUint;
use num_traits::{Pow, Zero};

use super::BigNat;

fn bit_len(v: u64) -> u64 {
    u64::from(64 - v.leading_zeros())
}

/// Exact comparison of `p^a` against `q^b` for `p, q ≥ 2`.
///
/// Bit-length intervals decide most inputs. Overlaps go to 256-bit logarithms
/// with an explicit error bound, and only a gap inside that bound pays for
/// full big-integer exponentiation, which then decides.
pub fn cmp_power(p: u64, a: &BigNat, q: u64, b: &BigNat) -> Ordering {
    debug_assert!(p >= 2 && q >= 2);
    match (a.is_zero(), b.is_zero()) {
        (true, true) => return Ordering::Equal,
        (true, false) => return Ordering::Less,
        (false, true) => return Ordering::Greater,
        _ => {}
    }
    if p == q {
        return a.cmp(b);
    }

    // 2^{a(bits-1)} <= p^a < 2^{a*bits}
    let (bp, bq) = (BigUint::from(bit_len(p)), BigUint::from(bit_len(q)));
    let p_lo = a * (&bp - 1u32);
    let p_hi = a * &bp;
    let q_lo = b * (&bq - 1u32);
    let q_hi = b * &bq;
    if p_hi <= q_lo {
        return Ordering::Less;
    }
    if q_hi <= p_lo {
        return Ordering::Greater;
    }

    if let Some(ord) = cmp_by_logs(p, a, q, b) {
        return ord;
    }

    let lhs: BigUint = Pow::pow(BigUint::from(p), a);
    let rhs: BigUint = Pow::pow(BigUint::from(q), b);
    lhs.cmp(&rhs)
}

const LOG_BITS: usize = 256;

/// Sign of `a ln p - b ln q` when it clears the rounding bound, else `None`.
fn cmp_by_logs(p: u64, a: &BigNat, q: u64, b: &BigNat) -> Option<Ordering> {
    if a.bits() > 128 || b.bits() > 128 {
        return None;
    }
    let rm = RoundingMode::ToEven;
    let mut cc = Consts::new().ok()?;
    let big = |v: &BigNat| {
        let d = v.to_u64_digits();
        let lo = BigFloat::from_u64(d.first().copied().unwrap_or(0), LOG_BITS);
        let hi = BigFloat::from_u64(d.get(1).copied().unwrap_or(0), LOG_BITS);
        let mut shifted = hi.clone();
        if !hi.is_zero() {
            shifted.set_exponent(hi.exponent()? + 64);
        }
        Some(shifted.add(&lo, LOG_BITS, rm))
    };
    let lp = BigFloat::from_u64(p, LOG_BITS).ln(LOG_BITS, rm, &mut cc);
    let lq = BigFloat::from_u64(q, LOG_BITS).ln(LOG_BITS, rm, &mut cc);
    let x = big(a)?.mul(&lp, LOG_BITS, rm);
    let y = big(b)?.mul(&lq, LOG_BITS, rm);
    let diff = x.sub(&y, LOG_BITS, rm);
    // a few roundings at 2^-256 relative each; 2^-240 of the larger side is ample
    let mut bound = x.add(&y, LOG_BITS, rm);
    bound.set_exponent(bound.exponent()? - 240);
    if diff.abs().cmp(&bound)? <= 0 {
        return None;
    }
    Some(if diff.is_negative() { Ordering::Less } else { Ordering::Greater })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn small_cases() {
        assert_eq!(cmp_power(2, &big(3), 3, &big(2)), Ordering::Less);
        assert_eq!(cmp_power(3, &big(2), 2, &big(3)), Ordering::Greater);
        assert_eq!(cmp_power(7, &big(5), 7, &big(5)), Ordering::Equal);
        assert_eq!(cmp_power(2, &big(10), 4, &big(5)), Ordering::Equal);
        assert_eq!(cmp_power(5, &big(0), 3, &big(0)), Ordering::Equal);
        assert_eq!(cmp_power(5, &big(0), 3, &big(1)), Ordering::Less);
    }

    #[test]
    fn default_pair_against_full_powers() {
        // oracle: both sides raised in full
        let lhs = big(1879).pow(233u32);
        let rhs = big(198_301).pow(144u32);
        assert_eq!(cmp_power(1879, &big(233), 198_301, &big(144)), lhs.cmp(&rhs));
        assert_eq!(cmp_power(198_301, &big(144), 1879, &big(233)), rhs.cmp(&lhs));
    }

    #[test]
    fn log_tier_agrees_with_exact() {
        let h = crate::FibTable::new(30);
        for i in 1..=24 {
            let (a, b) = (h.fib(i).unwrap(), h.fib(i - 1).unwrap());
            let exact = Pow::pow(big(1879), a).cmp(&Pow::pow(big(198_301), b));
            assert_eq!(cmp_by_logs(1879, a, 198_301, b).unwrap_or(exact), exact, "i = {i}");
            assert_eq!(cmp_power(1879, a, 198_301, b), exact);
        }
        assert_eq!(cmp_by_logs(2, &big(10), 4, &big(5)), None);
    }

    #[test]
    fn bit_length_shortcut_agrees_with_exact() {
        for &(p, a, q, b) in &[(2u64, 100u64, 3u64, 10u64), (3, 7, 2, 40), (1879, 2, 198_301, 1)] {
            let exact = big(p).pow(a as u32).cmp(&big(q).pow(b as u32));
            assert_eq!(cmp_power(p, &big(a), q, &big(b)), exact);
        }
    }
}
