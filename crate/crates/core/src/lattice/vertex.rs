//! Exact convex-hull membership by a phase-1 simplex over `BigRational`,
//! with Bland's rule so degenerate pivots cannot cycle.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{ExponentVector, SetFamily};

/// Convex weights over other family members reproducing a point exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub weights: Vec<(ExponentVector, BigRational)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexReport {
    pub vertices: Vec<ExponentVector>,
    pub non_vertices: Vec<(ExponentVector, Witness)>,
}

fn rat(v: u32) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// True when `weights` are non-negative, sum to one, avoid `z` itself and
/// combine to `z` exactly.
pub fn check_witness(z: &ExponentVector, weights: &[(ExponentVector, BigRational)]) -> bool {
    if weights.is_empty() {
        return false;
    }
    let mut total = BigRational::zero();
    let mut acc = vec![BigRational::zero(); z.dim()];
    for (y, w) in weights {
        if w.is_negative() || y == z || y.dim() != z.dim() {
            return false;
        }
        total += w;
        for (a, &e) in acc.iter_mut().zip(y.entries()) {
            *a += w * rat(e);
        }
    }
    total.is_one() && acc.iter().zip(z.entries()).all(|(a, &e)| *a == rat(e))
}

/// Weights `λ ≥ 0`, `Σλ = 1`, `Σλ_j y_j = z` over `others`, if they exist.
pub fn hull_witness(z: &ExponentVector, others: &[ExponentVector]) -> Option<Witness> {
    if others.is_empty() {
        return None;
    }
    let dim = z.dim();
    // drop coordinates that are zero everywhere
    let rows: Vec<usize> = (0..dim)
        .filter(|&r| z.entries()[r] != 0 || others.iter().any(|y| y.entries()[r] != 0))
        .collect();
    let k = others.len();
    let m = rows.len() + 1;
    let width = k + m + 1;
    let rhs = width - 1;

    let mut t: Vec<Vec<BigRational>> = Vec::with_capacity(m);
    for (ri, &r) in rows.iter().enumerate() {
        let mut row = vec![BigRational::zero(); width];
        for (j, y) in others.iter().enumerate() {
            row[j] = rat(y.entries()[r]);
        }
        row[k + ri] = BigRational::one();
        row[rhs] = rat(z.entries()[r]);
        t.push(row);
    }
    let mut last = vec![BigRational::zero(); width];
    for cell in last.iter_mut().take(k) {
        *cell = BigRational::one();
    }
    last[k + m - 1] = BigRational::one();
    last[rhs] = BigRational::one();
    t.push(last);

    let mut basis: Vec<usize> = (k..k + m).collect();
    // reduced costs of the phase-1 objective Σ artificials
    let mut cost = vec![BigRational::zero(); width];
    for row in &t {
        for (c, v) in cost.iter_mut().zip(row) {
            *c -= v;
        }
    }
    for c in cost.iter_mut().skip(k).take(m) {
        *c = BigRational::zero();
    }

    loop {
        let Some(enter) = (0..k + m).find(|&j| cost[j].is_negative()) else {
            break;
        };
        let mut leave: Option<usize> = None;
        let mut best: Option<BigRational> = None;
        for (i, row) in t.iter().enumerate() {
            if !row[enter].is_positive() {
                continue;
            }
            let ratio = &row[rhs] / &row[enter];
            let better = match (&best, leave) {
                (None, _) => true,
                (Some(b), Some(l)) => ratio < *b || (ratio == *b && basis[i] < basis[l]),
                (Some(_), None) => true,
            };
            if better {
                best = Some(ratio);
                leave = Some(i);
            }
        }
        let Some(p) = leave else {
            // unbounded cannot happen for a phase-1 objective bounded below by 0
            return None;
        };
        let pivot = t[p][enter].clone();
        for v in t[p].iter_mut() {
            *v /= &pivot;
        }
        let prow = t[p].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i == p || row[enter].is_zero() {
                continue;
            }
            let f = row[enter].clone();
            for (v, pv) in row.iter_mut().zip(&prow) {
                *v -= &f * pv;
            }
        }
        if !cost[enter].is_zero() {
            let f = cost[enter].clone();
            for (v, pv) in cost.iter_mut().zip(&prow) {
                *v -= &f * pv;
            }
        }
        basis[p] = enter;
    }

    // objective value is -cost[rhs]; feasible iff every artificial is zero
    if !cost[rhs].is_zero() {
        return None;
    }
    let mut weights = Vec::new();
    for (i, &b) in basis.iter().enumerate() {
        if b < k && !t[i][rhs].is_zero() {
            weights.push((others[b].clone(), t[i][rhs].clone()));
        }
    }
    weights.sort_by(|a, b| a.0.cmp(&b.0));
    let w = Witness { weights };
    debug_assert!(check_witness(z, &w.weights));
    Some(w)
}

/// Splits a family into vertices of its convex hull and the rest, each
/// non-vertex carrying an exact witness.
pub fn vertex_filter(family: &SetFamily) -> VertexReport {
    let mut vertices = Vec::new();
    let mut non_vertices = Vec::new();
    for (idx, z) in family.iter().enumerate() {
        let others: Vec<ExponentVector> = family
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != idx)
            .map(|(_, y)| y.clone())
            .collect();
        match hull_witness(z, &others) {
            Some(w) => non_vertices.push((z.clone(), w)),
            None => vertices.push(z.clone()),
        }
    }
    VertexReport { vertices, non_vertices }
}
