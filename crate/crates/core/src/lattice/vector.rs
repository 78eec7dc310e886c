use core::cmp::Ordering;
use core::fmt;

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// A point of `N_0^N`: `entries[i-1]` counts the factor `p^{h_i}/q^{h_{i-1}}`.
///
/// `level` is the `n` with `A·x = (h_n, h_{n-1})`. Ordering is lexicographic
/// on the entries, so families sort the same way the tables list them.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExponentVector {
    entries: Vec<u32>,
    level: usize,
}

impl ExponentVector {
    /// Wraps raw entries; no membership check (see [`FibSystem::check`](super::FibSystem::check)).
    pub fn new(entries: Vec<u32>, level: usize) -> Self {
        Self { entries, level }
    }

    /// The unit vector in slot `i` (1-based) of dimension `dim`, i.e. `x_i(i+1)`.
    pub fn unit(i: usize, dim: usize) -> Result<Self> {
        if i == 0 || i > dim {
            return Err(Error::OutOfRange { index: i, max: dim });
        }
        let mut entries = vec![0; dim];
        entries[i - 1] = 1;
        Ok(Self { entries, level: i })
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    /// 1-based slot access; zero outside the dimension.
    pub fn get(&self, i: usize) -> u32 {
        if i == 0 {
            return 0;
        }
        self.entries.get(i - 1).copied().unwrap_or(0)
    }

    /// Number of factors in the product representation.
    pub fn weight(&self) -> u64 {
        self.entries.iter().map(|&e| u64::from(e)).sum()
    }

    /// 1-based indices of the non-zero slots.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().enumerate().filter(|(_, &e)| e != 0).map(|(i, _)| i + 1)
    }

    /// Entries with trailing zeros removed.
    pub fn trimmed(&self) -> &[u32] {
        let end = self.entries.iter().rposition(|&e| e != 0).map_or(0, |i| i + 1);
        &self.entries[..end]
    }

    /// `z_j z_{j+1} ≠ 0` forces every entry past `j+1` to vanish.
    pub fn is_almost_consecutive_free(&self) -> bool {
        let first_pair = self.entries.windows(2).position(|w| w[0] != 0 && w[1] != 0);
        match first_pair {
            None => true,
            Some(j) => self.entries[j + 2..].iter().all(|&e| e == 0),
        }
    }

    /// Componentwise `self ≥ other`.
    pub fn dominates(&self, other: &ExponentVector) -> bool {
        let n = self.entries.len().max(other.entries.len());
        (1..=n).all(|i| self.get(i) >= other.get(i))
    }

    /// Componentwise sum; the level is left to the caller.
    pub fn add(&self, other: &ExponentVector, level: usize) -> ExponentVector {
        let n = self.entries.len().max(other.entries.len());
        let entries = (1..=n).map(|i| self.get(i) + other.get(i)).collect();
        ExponentVector { entries, level }
    }

    /// Componentwise difference, `None` if any entry would go negative.
    pub fn checked_sub(&self, other: &ExponentVector) -> Option<Vec<u32>> {
        let n = self.entries.len().max(other.entries.len());
        (1..=n).map(|i| self.get(i).checked_sub(other.get(i))).collect()
    }

    /// `λ(x) = (0, x_1, …, x_{N-1})`, landing in the next level.
    pub fn shift_lambda(&self) -> Result<ExponentVector> {
        let dim = self.entries.len();
        if self.entries.last().is_some_and(|&e| e != 0) {
            return Err(Error::DimensionOverflow { dim });
        }
        let mut entries = Vec::with_capacity(dim);
        entries.push(0);
        entries.extend_from_slice(&self.entries[..dim.saturating_sub(1)]);
        Ok(ExponentVector {
            entries,
            level: self.level + 1,
        })
    }

    /// Same point padded with zeros (or truncated over zeros) to `dim` slots.
    pub fn resized(&self, dim: usize) -> Result<ExponentVector> {
        if self.trimmed().len() > dim {
            return Err(Error::DimensionOverflow { dim });
        }
        let mut entries = self.entries.clone();
        entries.resize(dim, 0);
        Ok(ExponentVector {
            entries,
            level: self.level,
        })
    }
}

impl Ord for ExponentVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.entries.cmp(&other.entries).then(self.level.cmp(&other.level))
    }
}

impl PartialOrd for ExponentVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Zero-trimmed tuple, e.g. `(1,0,0,4)`.
impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        let t = self.trimmed();
        if t.is_empty() {
            f.write_str("0")?;
        }
        for (k, e) in t.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}@V{}", self.level)
    }
}
