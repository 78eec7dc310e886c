use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use super::BigNat;
use crate::{Error, Result};

/// Largest index whose Fibonacci number fits in a `u64`.
pub const MAX_U64_INDEX: usize = 93;

/// `h_i` as a `u64`, or `None` once it overflows (`i > 93`).
pub const fn fib_u64(i: usize) -> Option<u64> {
    if i > MAX_U64_INDEX {
        return None;
    }
    let (mut a, mut b) = (0u64, 1u64);
    let mut k = 0;
    while k < i {
        let next = a.wrapping_add(b);
        a = b;
        b = next;
        k += 1;
    }
    Some(a)
}

/// Exact Fibonacci numbers `h_0 ..= h_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FibTable {
    values: Vec<BigNat>,
}

impl FibTable {
    /// Builds the table up to `max_index` (at least 2).
    pub fn new(max_index: usize) -> Self {
        let max_index = max_index.max(2);
        let mut values: Vec<BigNat> = Vec::with_capacity(max_index + 1);
        values.push(BigUint::from(0u32));
        values.push(BigUint::from(1u32));
        for i in 2..=max_index {
            let next = &values[i - 1] + &values[i - 2];
            values.push(next);
        }
        Self { values }
    }

    pub fn max_index(&self) -> usize {
        self.values.len() - 1
    }

    pub fn fib(&self, i: usize) -> Result<&BigNat> {
        self.values.get(i).ok_or(Error::OutOfRange {
            index: i,
            max: self.max_index(),
        })
    }

    /// `h_i` narrowed to `u64`; fails past the table or past index 93.
    pub fn fib_u64(&self, i: usize) -> Result<u64> {
        let v = self.fib(i)?;
        v.to_u64().ok_or(Error::OutOfRange {
            index: i,
            max: MAX_U64_INDEX,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_and_known_values() {
        let t = FibTable::new(15);
        assert_eq!(*t.fib(0).unwrap(), BigUint::from(0u32));
        assert_eq!(*t.fib(1).unwrap(), BigUint::from(1u32));
        assert_eq!(*t.fib(12).unwrap(), BigUint::from(144u32));
        assert_eq!(*t.fib(13).unwrap(), BigUint::from(233u32));
    }

    #[test]
    fn out_of_range() {
        let t = FibTable::new(10);
        assert_eq!(t.fib(11).unwrap_err(), Error::OutOfRange { index: 11, max: 10 });
    }

    #[test]
    fn index_30_matches_naive_loop() {
        // naive loop over u128, independent of the table construction
        let mut prev: u128 = 0;
        let mut cur: u128 = 1;
        for _ in 0..29 {
            let n = prev + cur;
            prev = cur;
            cur = n;
        }
        let t = FibTable::new(30);
        assert_eq!(*t.fib(30).unwrap(), BigUint::from(cur));
        assert_eq!(cur, 832_040);
    }

    #[test]
    fn recurrence_holds_exactly() {
        let t = FibTable::new(300);
        for i in 2..=300 {
            assert_eq!(*t.fib(i).unwrap(), t.fib(i - 1).unwrap() + t.fib(i - 2).unwrap());
        }
    }

    #[test]
    fn u64_narrowing() {
        assert_eq!(fib_u64(93), Some(12_200_160_415_121_876_738));
        assert_eq!(fib_u64(94), None);
        let t = FibTable::new(100);
        assert_eq!(t.fib_u64(93).unwrap(), fib_u64(93).unwrap());
        assert!(t.fib_u64(94).is_err());
    }
}
