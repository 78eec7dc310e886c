//! `R_n` via the dominance criterion, the definition-level check it replaces,
//! and the shifted difference `Δ_n`.

use core::ops::ControlFlow;

use alloc::format;
use alloc::vec::Vec;

use super::{for_each_factorization, ExponentVector, FamilyKind, FibSystem, SetFamily};
use crate::{Error, Result};

/// `R_n = S_n ∪ {z ∈ C_n∖S_n : no x ∈ ∪_{i<n}(R_i∖S_i) with z ≥ x}`.
///
/// `prior[i-1]` must be `R_i` for every `1 ≤ i < n`.
pub fn enumerate_r(sys: &FibSystem, c_n: &SetFamily, prior: &[SetFamily]) -> Result<SetFamily> {
    let n = c_n.n();
    if c_n.kind() != FamilyKind::C {
        return Err(Error::domain(format!("expected C_{n}, got {}_{n}", c_n.kind())));
    }
    for i in 1..n {
        match prior.get(i - 1) {
            Some(r) if r.kind() == FamilyKind::R && r.n() == i => {}
            _ => return Err(Error::Dependency(format!("R_{i} is required before R_{n}"))),
        }
    }
    let mut pool = Vec::new();
    for r in &prior[..n - 1] {
        let s = sys.build_s(r.n())?;
        pool.extend(r.minus(&s));
    }
    let s_n = sys.build_s(n)?;
    let mut members: Vec<ExponentVector> = s_n.members().to_vec();
    for z in c_n {
        if s_n.contains(z) {
            continue;
        }
        if !pool.iter().any(|x| z.dominates(x)) {
            members.push(z.clone());
        }
    }
    Ok(SetFamily::from_unsorted(FamilyKind::R, n, sys.dim(), members))
}

/// Builds `R_1, …, R_{n_max}`, obtaining each `C_n` from `c_of`.
pub fn r_tower(sys: &FibSystem, n_max: usize, mut c_of: impl FnMut(usize) -> Result<SetFamily>) -> Result<Vec<SetFamily>> {
    let mut tower: Vec<SetFamily> = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let c = c_of(n)?;
        let r = enumerate_r(sys, &c, &tower)?;
        tower.push(r);
    }
    Ok(tower)
}

/// `Δ_n = (R_n∖S_n) ∖ λ(R_{n-1}∖S_{n-1})`; `r_prev` is `None` only for `n = 1`.
pub fn delta(sys: &FibSystem, r_n: &SetFamily, r_prev: Option<&SetFamily>) -> Result<Vec<ExponentVector>> {
    let n = r_n.n();
    let fresh = r_n.minus(&sys.build_s(n)?);
    let shifted = match r_prev {
        Some(prev) if prev.n() + 1 == n && prev.kind() == FamilyKind::R => {
            let mut v = Vec::new();
            for x in prev.minus(&sys.build_s(prev.n())?) {
                v.push(x.shift_lambda()?);
            }
            v.sort_unstable();
            v
        }
        None if n == 1 => Vec::new(),
        _ => return Err(Error::Dependency(format!("R_{} is required for Δ_{n}", n - 1))),
    };
    Ok(fresh.into_iter().filter(|z| shifted.binary_search(z).is_err()).collect())
}

/// Literal definition: `z ∈ C_n` and every non-trivial factorization of `z`
/// uses only parts from `S_1 ∪ … ∪ S_n`.
pub fn is_s_restricted_by_definition(sys: &FibSystem, z: &ExponentVector) -> Result<bool> {
    if !z.is_almost_consecutive_free() {
        return Ok(false);
    }
    let flow = for_each_factorization(sys, z, None, |parts| {
        if parts.len() > 1 && parts.iter().any(|p| sys.s_index(p).is_none()) {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    Ok(flow.is_continue())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn tower_through_nine() {
        let sys = FibSystem::new(9).unwrap();
        let tower = r_tower(&sys, 9, |n| sys.enumerate_c(n)).unwrap();
        let sizes: Vec<usize> = tower.iter().map(SetFamily::len).collect();
        assert_eq!(sizes, [1, 1, 2, 3, 4, 5, 7, 8, 10]);
        let d7 = delta(&sys, &tower[6], Some(&tower[5])).unwrap();
        assert_eq!(d7.len(), 1);
        assert_eq!(d7[0].to_string(), "(1,0,0,4)");
        assert!(delta(&sys, &tower[7], Some(&tower[6])).unwrap().is_empty());
        let d9 = delta(&sys, &tower[8], Some(&tower[7])).unwrap();
        assert_eq!(d9.iter().map(|x| x.to_string()).collect::<Vec<_>>(), ["(1,0,0,3,0,3)"]);
    }

    #[test]
    fn missing_prior_is_a_dependency_error() {
        let sys = FibSystem::new(8).unwrap();
        let c = sys.enumerate_c(5).unwrap();
        assert!(matches!(enumerate_r(&sys, &c, &[]), Err(Error::Dependency(_))));
        let r4 = r_tower(&sys, 4, |n| sys.enumerate_c(n)).unwrap();
        assert!(matches!(delta(&sys, &sys.build_s(5).unwrap(), None), Err(Error::Dependency(_))));
        assert!(enumerate_r(&sys, &c, &r4).is_ok());
    }

    #[test]
    fn definition_agrees_on_small_levels() {
        let sys = FibSystem::new(8).unwrap();
        let tower = r_tower(&sys, 8, |n| sys.enumerate_c(n)).unwrap();
        for r in &tower {
            let c = sys.enumerate_c(r.n()).unwrap();
            for z in &c {
                assert_eq!(is_s_restricted_by_definition(&sys, z).unwrap(), r.contains(z), "{z}");
            }
        }
    }
}
