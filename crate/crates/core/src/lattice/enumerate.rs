//! Depth-first enumeration of `V_n`.
//!
//! Slots are filled from `x_n` down to `x_3`, largest coefficients first, each
//! bounded by both row residuals. The last two slots are then forced:
//! `x_2 = r_2` and `x_1 = r_1 - r_2`. A branch dies as soon as `r_1 < r_2`,
//! because every remaining column has `h_i ≥ h_{i-1}`.

use core::ops::ControlFlow;

use alloc::vec;
use alloc::vec::Vec;

use super::{ExponentVector, FamilyKind, FibSystem, SetFamily};
use crate::Result;

/// A partial assignment of the top slots, used to split the search into
/// independent pieces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    n: usize,
    prefix: Vec<u32>,
    next_slot: usize,
    r1: u64,
    r2: u64,
}

impl Branch {
    pub fn level(&self) -> usize {
        self.n
    }

    /// Entries fixed so far, slot 1 first (unfixed slots are zero).
    pub fn prefix(&self) -> &[u32] {
        &self.prefix
    }
}

impl FibSystem {
    fn root(&self, n: usize) -> Branch {
        Branch {
            n,
            prefix: vec![0; self.dim()],
            next_slot: n,
            r1: self.h(n),
            r2: self.h(n - 1),
        }
    }

    fn slot_bound(&self, slot: usize, r1: u64, r2: u64, cap: Option<&[u32]>) -> u64 {
        let mut bound = (r1 / self.h(slot)).min(r2 / self.h(slot - 1));
        if let Some(c) = cap {
            bound = bound.min(u64::from(c.get(slot - 1).copied().unwrap_or(0)));
        }
        bound
    }

    fn dfs<F>(&self, slot: usize, r1: u64, r2: u64, buf: &mut [u32], cap: Option<&[u32]>, f: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[u32]) -> ControlFlow<()>,
    {
        if r1 < r2 {
            return ControlFlow::Continue(());
        }
        if slot < 3 {
            let (x1, x2) = (r1 - r2, r2);
            let cap1 = cap.map_or(u64::MAX, |c| u64::from(c.first().copied().unwrap_or(0)));
            let cap2 = cap.map_or(u64::MAX, |c| u64::from(c.get(1).copied().unwrap_or(0)));
            if x1 > cap1 || x2 > cap2 || (x2 > 0 && buf.len() < 2) {
                return ControlFlow::Continue(());
            }
            buf[0] = x1 as u32;
            if buf.len() > 1 {
                buf[1] = x2 as u32;
            }
            let flow = f(buf);
            buf[0] = 0;
            if buf.len() > 1 {
                buf[1] = 0;
            }
            return flow;
        }
        let (a, b) = (self.h(slot), self.h(slot - 1));
        let bound = self.slot_bound(slot, r1, r2, cap);
        for x in 0..=bound {
            buf[slot - 1] = x as u32;
            let flow = self.dfs(slot - 1, r1 - x * a, r2 - x * b, buf, cap, f);
            if flow.is_break() {
                buf[slot - 1] = 0;
                return flow;
            }
        }
        buf[slot - 1] = 0;
        ControlFlow::Continue(())
    }

    fn walk<F>(&self, br: &Branch, cap: Option<&[u32]>, f: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[u32]) -> ControlFlow<()>,
    {
        let mut buf = br.prefix.clone();
        self.dfs(br.next_slot, br.r1, br.r2, &mut buf, cap, f)
    }

    /// Streams the entries of every member of `V_n` (in search order, not sorted).
    pub fn visit_v<F>(&self, n: usize, f: F) -> Result<ControlFlow<()>>
    where
        F: FnMut(&[u32]) -> ControlFlow<()>,
    {
        self.visit_v_capped(n, None, f)
    }

    /// As [`visit_v`](Self::visit_v), restricted to members `≤ cap` componentwise.
    pub fn visit_v_capped<F>(&self, n: usize, cap: Option<&[u32]>, mut f: F) -> Result<ControlFlow<()>>
    where
        F: FnMut(&[u32]) -> ControlFlow<()>,
    {
        self.check_level(n)?;
        Ok(self.walk(&self.root(n), cap, &mut f))
    }

    /// Splits the search for `V_n` into disjoint branches by fixing the top
    /// slots until at least `min_branches` exist (or nothing is left to fix).
    pub fn branches(&self, n: usize, min_branches: usize) -> Result<Vec<Branch>> {
        self.check_level(n)?;
        let mut frontier = vec![self.root(n)];
        while frontier.len() < min_branches && frontier.iter().any(|b| b.next_slot >= 3) {
            let mut next = Vec::new();
            for br in frontier {
                if br.next_slot < 3 {
                    next.push(br);
                    continue;
                }
                let slot = br.next_slot;
                let (a, b) = (self.h(slot), self.h(slot - 1));
                for x in 0..=self.slot_bound(slot, br.r1, br.r2, None) {
                    let (r1, r2) = (br.r1 - x * a, br.r2 - x * b);
                    if r1 < r2 {
                        continue;
                    }
                    let mut prefix = br.prefix.clone();
                    prefix[slot - 1] = x as u32;
                    next.push(Branch {
                        n,
                        prefix,
                        next_slot: slot - 1,
                        r1,
                        r2,
                    });
                }
            }
            frontier = next;
        }
        Ok(frontier)
    }

    /// Streams the members of `V_n` inside one branch.
    pub fn visit_branch<F>(&self, br: &Branch, mut f: F) -> ControlFlow<()>
    where
        F: FnMut(&[u32]) -> ControlFlow<()>,
    {
        self.walk(br, None, &mut f)
    }

    /// `#V_n` without materialising the set.
    pub fn count_v(&self, n: usize) -> Result<u64> {
        let mut count = 0u64;
        let _ = self.visit_v(n, |_| {
            count += 1;
            ControlFlow::Continue(())
        })?;
        Ok(count)
    }

    /// All of `V_n`, sorted. Memory grows with `#V_n` (about 1.1·10^7 at `n = 13`).
    pub fn enumerate_v(&self, n: usize) -> Result<SetFamily> {
        let mut members = Vec::new();
        let _ = self.visit_v(n, |e| {
            members.push(ExponentVector::new(e.to_vec(), n));
            ControlFlow::Continue(())
        })?;
        Ok(SetFamily::from_unsorted(FamilyKind::V, n, self.dim(), members))
    }

    /// `C_n`: the almost consecutive-free members of `V_n`.
    pub fn enumerate_c(&self, n: usize) -> Result<SetFamily> {
        let mut members = Vec::new();
        let _ = self.visit_v(n, |e| {
            let x = ExponentVector::new(e.to_vec(), n);
            if x.is_almost_consecutive_free() {
                members.push(x);
            }
            ControlFlow::Continue(())
        })?;
        Ok(SetFamily::from_unsorted(FamilyKind::C, n, self.dim(), members))
    }

    /// `S_n` as a sorted family.
    pub fn build_s(&self, n: usize) -> Result<SetFamily> {
        let gens = self.s_generators(n)?;
        Ok(SetFamily::from_unsorted(FamilyKind::S, n, self.dim(), gens))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use std::collections::BTreeSet;

    /// Nested loops over the box `0 ≤ x_i ≤ h_{n-1}` (plus `x_1 ≤ h_n`).
    fn brute_v(sys: &FibSystem, n: usize) -> BTreeSet<Vec<u32>> {
        let dim = sys.dim();
        let mut out = BTreeSet::new();
        let mut x = vec![0u32; dim];
        fn rec(sys: &FibSystem, n: usize, k: usize, x: &mut Vec<u32>, out: &mut BTreeSet<Vec<u32>>) {
            if k == x.len() {
                if sys.apply(x) == (u128::from(sys.h(n)), u128::from(sys.h(n - 1))) {
                    out.insert(x.clone());
                }
                return;
            }
            let hi = if k == 0 { sys.h(n) } else { sys.h(n.saturating_sub(1)).max(1) };
            for v in 0..=hi {
                x[k] = v as u32;
                rec(sys, n, k + 1, x, out);
            }
            x[k] = 0;
        }
        rec(sys, n, 0, &mut x, &mut out);
        out
    }

    #[test]
    fn matches_box_search() {
        let sys = FibSystem::new(7).unwrap();
        for n in 1..=6 {
            let fam = sys.enumerate_v(n).unwrap();
            let got: BTreeSet<Vec<u32>> = fam.iter().map(|x| x.entries().to_vec()).collect();
            assert_eq!(got, brute_v(&sys, n), "n = {n}");
        }
        let v5 = sys.enumerate_v(5).unwrap();
        assert_eq!(v5.len(), 6);
        let s5 = sys.build_s(5).unwrap();
        let outside: Vec<_> = v5.iter().filter(|x| !s5.contains(x)).map(|x| x.to_string()).collect();
        assert_eq!(outside, ["(1,1,0,1)", "(1,2,1)"]);
    }

    #[test]
    fn small_cardinalities() {
        let sys = FibSystem::new(13).unwrap();
        let want = [1u64, 1, 2, 3, 6, 13, 38, 139, 695, 4699];
        for (k, &w) in want.iter().enumerate() {
            assert_eq!(sys.count_v(k + 1).unwrap(), w, "n = {}", k + 1);
        }
        assert_eq!(sys.enumerate_v(1).unwrap().iter().next().unwrap().trimmed(), [1]);
        assert!(sys.count_v(14).is_err());
    }

    #[test]
    fn branches_partition_the_search() {
        let sys = FibSystem::new(10).unwrap();
        for n in [1, 2, 3, 7, 10] {
            let branches = sys.branches(n, 16).unwrap();
            let mut seen = BTreeSet::new();
            for br in &branches {
                let _ = sys.visit_branch(br, |e| {
                    assert!(seen.insert(e.to_vec()));
                    ControlFlow::Continue(())
                });
            }
            assert_eq!(seen.len() as u64, sys.count_v(n).unwrap());
        }
    }

    #[test]
    fn capped_visit_is_dominated_subset() {
        let sys = FibSystem::new(8).unwrap();
        let cap = [3u32, 2, 1, 1, 1, 0, 0, 0];
        let mut got = BTreeSet::new();
        for n in 1..=8 {
            let _ = sys.visit_v_capped(n, Some(&cap), |e| {
                got.insert(e.to_vec());
                ControlFlow::Continue(())
            });
        }
        let mut want = BTreeSet::new();
        for n in 1..=8 {
            for x in sys.enumerate_v(n).unwrap().iter() {
                if x.entries().iter().zip(cap).all(|(a, b)| *a <= b) {
                    want.insert(x.entries().to_vec());
                }
            }
        }
        assert_eq!(got, want);
    }
}
