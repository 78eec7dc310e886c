use core::fmt;

use alloc::vec::Vec;

use super::{ExponentVector, FibSystem};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyKind {
    V,
    C,
    R,
    S,
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyKind::V => "V",
            FamilyKind::C => "C",
            FamilyKind::R => "R",
            FamilyKind::S => "S",
        })
    }
}

/// A sorted, duplicate-free set of members of one `V_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetFamily {
    n: usize,
    dim: usize,
    kind: FamilyKind,
    members: Vec<ExponentVector>,
}

impl SetFamily {
    pub fn from_unsorted(kind: FamilyKind, n: usize, dim: usize, mut members: Vec<ExponentVector>) -> Self {
        members.sort_unstable();
        members.dedup();
        Self { n, dim, kind, members }
    }

    /// Rebuilds a family from stored members, checking the system equation,
    /// the dimension and the kind's membership predicate.
    pub fn from_checked(sys: &FibSystem, kind: FamilyKind, n: usize, members: Vec<ExponentVector>) -> Result<Self> {
        sys.check_level(n)?;
        for x in &members {
            if x.level() != n || !sys.check(x) {
                return Err(Error::domain(alloc::format!("{x} is not in V_{n}")));
            }
            let ok = match kind {
                FamilyKind::V => true,
                FamilyKind::C | FamilyKind::R => x.is_almost_consecutive_free(),
                FamilyKind::S => sys.s_index(x).is_some(),
            };
            if !ok {
                return Err(Error::domain(alloc::format!("{x} fails the {kind}_{n} predicate")));
            }
        }
        Ok(Self::from_unsorted(kind, n, sys.dim(), members))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[ExponentVector] {
        &self.members
    }

    pub fn iter(&self) -> core::slice::Iter<'_, ExponentVector> {
        self.members.iter()
    }

    pub fn contains(&self, x: &ExponentVector) -> bool {
        self.members.binary_search(x).is_ok()
    }

    /// Members not in `other`, as a family of this kind.
    pub fn minus(&self, other: &SetFamily) -> Vec<ExponentVector> {
        self.members.iter().filter(|x| !other.contains(x)).cloned().collect()
    }

    pub fn is_subset_of(&self, other: &SetFamily) -> bool {
        self.members.iter().all(|x| other.contains(x))
    }

    /// Keeps the members accepted by `keep`.
    pub fn filtered(&self, kind: FamilyKind, mut keep: impl FnMut(&ExponentVector) -> bool) -> SetFamily {
        SetFamily {
            n: self.n,
            dim: self.dim,
            kind,
            members: self.members.iter().filter(|x| keep(x)).cloned().collect(),
        }
    }
}

impl<'a> IntoIterator for &'a SetFamily {
    type Item = &'a ExponentVector;
    type IntoIter = core::slice::Iter<'a, ExponentVector>;
    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}
