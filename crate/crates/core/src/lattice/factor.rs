use core::ops::ControlFlow;

use alloc::vec::Vec;

use super::{ExponentVector, FibSystem};
use crate::Result;

/// A multiset of members of `V_1 ∪ … ∪ V_n` summing to `target`.
///
/// Parts are kept in ascending lexicographic order, so permuted sums compare equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Factorization {
    pub parts: Vec<ExponentVector>,
    pub target: ExponentVector,
}

impl Factorization {
    pub fn is_trivial(&self) -> bool {
        self.parts.len() == 1
    }

    /// Every part is a unit `x_i(i+1)`.
    pub fn is_improper(&self) -> bool {
        self.parts.iter().all(|p| p.weight() == 1)
    }

    /// Every part lies in some `S_i`.
    pub fn is_s_type(&self, sys: &FibSystem) -> bool {
        self.parts.iter().all(|p| sys.s_index(p).is_some())
    }

    pub fn sums_to_target(&self) -> bool {
        let mut acc = alloc::vec![0u32; self.target.dim()];
        for p in &self.parts {
            for (a, e) in acc.iter_mut().zip(p.entries()) {
                *a += e;
            }
        }
        acc == self.target.entries()
    }
}

/// Members of `V_1 ∪ … ∪ V_n` dominated by `z` (n = level of `z`), descending.
fn candidates(sys: &FibSystem, z: &ExponentVector) -> Result<Vec<ExponentVector>> {
    let mut out = Vec::new();
    for i in 1..=z.level() {
        let _ = sys.visit_v_capped(i, Some(z.entries()), |e| {
            out.push(ExponentVector::new(e.to_vec(), i));
            ControlFlow::Continue(())
        })?;
    }
    out.sort_unstable_by(|a, b| b.cmp(a));
    Ok(out)
}

fn fits(rem: &[u32], x: &ExponentVector) -> bool {
    rem.iter().zip(x.entries()).all(|(r, e)| e <= r)
}

struct Search<'a, F> {
    cands: &'a [ExponentVector],
    cap: usize,
    parts: Vec<&'a ExponentVector>,
    f: F,
}

impl<'a, F> Search<'a, F>
where
    F: FnMut(&[&ExponentVector]) -> ControlFlow<()>,
{
    fn go(&mut self, start: usize, rem: &mut [u32]) -> ControlFlow<()> {
        if rem.iter().all(|&r| r == 0) {
            return (self.f)(&self.parts);
        }
        if self.parts.len() == self.cap {
            return ControlFlow::Continue(());
        }
        for idx in start..self.cands.len() {
            let x = &self.cands[idx];
            if !fits(rem, x) {
                continue;
            }
            for (r, e) in rem.iter_mut().zip(x.entries()) {
                *r -= e;
            }
            self.parts.push(x);
            let flow = self.go(idx, rem);
            self.parts.pop();
            for (r, e) in rem.iter_mut().zip(x.entries()) {
                *r += e;
            }
            flow?;
        }
        ControlFlow::Continue(())
    }
}

/// Streams every factorization of `z` with at most `cap_parts` parts, parts
/// in non-increasing order. The visitor may stop the search early.
pub fn for_each_factorization<F>(sys: &FibSystem, z: &ExponentVector, cap_parts: Option<usize>, f: F) -> Result<ControlFlow<()>>
where
    F: FnMut(&[&ExponentVector]) -> ControlFlow<()>,
{
    let cands = candidates(sys, z)?;
    let cap = cap_parts.unwrap_or(z.weight() as usize);
    let mut rem = z.entries().to_vec();
    let mut search = Search {
        cands: &cands,
        cap,
        parts: Vec::new(),
        f,
    };
    Ok(search.go(0, &mut rem))
}

/// All factorizations of `z` up to permutation, including the trivial one.
pub fn enumerate_factorizations(sys: &FibSystem, z: &ExponentVector, cap_parts: Option<usize>) -> Result<Vec<Factorization>> {
    let mut out = Vec::new();
    let _ = for_each_factorization(sys, z, cap_parts, |parts| {
        let mut parts: Vec<ExponentVector> = parts.iter().map(|&p| p.clone()).collect();
        parts.sort_unstable();
        out.push(Factorization { parts, target: z.clone() });
        ControlFlow::Continue(())
    })?;
    out.sort_unstable();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(e: &[u32], dim: usize, n: usize) -> ExponentVector {
        let mut v = e.to_vec();
        v.resize(dim, 0);
        ExponentVector::new(v, n)
    }

    #[test]
    fn trivial_element_is_rigid() {
        let sys = FibSystem::new(9).unwrap();
        for n in 1..=9 {
            let z = ExponentVector::unit(n, 9).unwrap();
            let fs = enumerate_factorizations(&sys, &z, None).unwrap();
            assert_eq!(fs.len(), 1);
            assert!(fs[0].is_trivial());
        }
    }

    #[test]
    fn one_zero_zero_four() {
        let sys = FibSystem::new(7).unwrap();
        let z = ev(&[1, 0, 0, 4], 7, 7);
        let fs = enumerate_factorizations(&sys, &z, None).unwrap();
        assert_eq!(fs.len(), 2);
        assert!(fs.iter().any(|f| f.is_trivial()));
        assert!(fs.iter().any(|f| f.is_improper() && f.parts.len() == 5));
    }

    /// Subset-sum style oracle: count multisets over the dominated candidates by
    /// a coefficient table indexed on the remaining vector.
    fn count_multisets(sys: &FibSystem, z: &ExponentVector) -> usize {
        let cands = candidates(sys, z).unwrap();
        fn rec(c: &[ExponentVector], rem: Vec<u32>) -> usize {
            if rem.iter().all(|&r| r == 0) {
                return 1;
            }
            let Some((first, rest)) = c.split_first() else {
                return 0;
            };
            let mut total = rec(rest, rem.clone());
            let mut r = rem;
            loop {
                match r
                    .iter()
                    .zip(first.entries())
                    .map(|(a, b)| a.checked_sub(*b))
                    .collect::<Option<Vec<_>>>()
                {
                    Some(next) => {
                        total += rec(rest, next.clone());
                        r = next;
                    }
                    None => break,
                }
            }
            total
        }
        rec(&cands, z.entries().to_vec())
    }

    #[test]
    fn counts_match_multiset_oracle() {
        let sys = FibSystem::new(7).unwrap();
        for z in [
            ev(&[0, 0, 1, 1], 7, 5),
            ev(&[2, 3], 7, 5),
            ev(&[1, 2, 1], 7, 5),
            ev(&[0, 3, 5], 7, 7),
        ] {
            let fs = enumerate_factorizations(&sys, &z, None).unwrap();
            assert_eq!(fs.len(), count_multisets(&sys, &z), "{z}");
            for f in &fs {
                assert!(f.sums_to_target());
            }
            let mut dedup = fs.clone();
            dedup.dedup();
            assert_eq!(dedup.len(), fs.len());
        }
        let capped = enumerate_factorizations(&sys, &ev(&[2, 3], 7, 5), Some(2)).unwrap();
        assert!(capped.iter().all(|f| f.parts.len() <= 2));
        assert!(capped.len() < enumerate_factorizations(&sys, &ev(&[2, 3], 7, 5), None).unwrap().len());
    }
}
