//! Gaussian elimination over the field of rational functions.
//!
//! Pivots are picked with a preference for nonzero constants, then entries
//! whose numerator certifies as nowhere zero on the chart, then the simplest
//! remaining entry. The product of pivots is the determinant of the minor
//! they span, which is what rank certification inspects.

use crate::scalar::{unit_certify, Chart, Scalar};

pub type Matrix = Vec<Vec<Scalar>>;

#[derive(Clone, Debug)]
pub struct Rref {
    /// Reduced rows; pivot rows are normalized to 1 in their pivot column.
    pub rows: Matrix,
    /// `(row, column)` of each pivot, in elimination order.
    pub pivots: Vec<(usize, usize)>,
    /// Pivot values before normalization.
    pub pivot_values: Vec<Scalar>,
    pub ncols: usize,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Determinant of the minor on pivot rows and columns, up to sign.
    pub fn minor_det(&self) -> Scalar {
        self.pivot_values.iter().fold(Scalar::one(), |a, p| &a * p)
    }

    pub fn pivot_cols(&self) -> Vec<usize> {
        let mut c: Vec<usize> = self.pivots.iter().map(|p| p.1).collect();
        c.sort();
        c
    }

    /// Basis of the null space `{v : M v = 0}`.
    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        let pivot_of_col: Vec<Option<usize>> = (0..self.ncols)
            .map(|c| self.pivots.iter().find(|p| p.1 == c).map(|p| p.0))
            .collect();
        let mut out = Vec::new();
        for free in 0..self.ncols {
            if pivot_of_col[free].is_some() {
                continue;
            }
            let mut v = vec![Scalar::zero(); self.ncols];
            v[free] = Scalar::one();
            for &(r, c) in &self.pivots {
                v[c] = -&self.rows[r][free];
            }
            out.push(v);
        }
        out
    }
}

fn pivot_score(s: &Scalar, chart: Option<&Chart>) -> (u8, usize) {
    if s.is_constant() {
        return (0, 0);
    }
    if let Some(ch) = chart {
        if unit_certify(s.num(), ch).is_certified() {
            return (1, s.weight());
        }
    }
    (2, s.weight())
}

/// Full-pivoting reduction. Only the first `search_cols` columns may hold
/// pivots (used to keep augmented columns out of the pivot search).
pub fn rref_limited(m: &Matrix, search_cols: usize, chart: Option<&Chart>) -> Rref {
    let ncols = m.first().map_or(0, |r| r.len());
    let mut rows = m.clone();
    let mut used_row = vec![false; rows.len()];
    let mut used_col = vec![false; ncols];
    let mut pivots = Vec::new();
    let mut pivot_values = Vec::new();
    loop {
        let mut best: Option<((u8, usize), usize, usize)> = None;
        for (r, row) in rows.iter().enumerate() {
            if used_row[r] {
                continue;
            }
            for c in 0..search_cols.min(ncols) {
                if used_col[c] || row[c].is_zero() {
                    continue;
                }
                let sc = pivot_score(&row[c], chart);
                if best.as_ref().is_none_or(|b| sc < b.0) {
                    best = Some((sc, r, c));
                }
            }
        }
        let Some((_, r, c)) = best else { break };
        let p = rows[r][c].clone();
        let inv = p.inv().expect("nonzero pivot");
        rows[r] = rows[r].iter().map(|x| x * &inv).collect();
        let prow = rows[r].clone();
        for (k, row) in rows.iter_mut().enumerate() {
            if k == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (j, x) in row.iter_mut().enumerate() {
                if !prow[j].is_zero() {
                    *x = &*x - &(&f * &prow[j]);
                }
            }
        }
        used_row[r] = true;
        used_col[c] = true;
        pivots.push((r, c));
        pivot_values.push(p);
    }
    Rref { rows, pivots, pivot_values, ncols }
}

pub fn rref(m: &Matrix, chart: Option<&Chart>) -> Rref {
    let n = m.first().map_or(0, |r| r.len());
    rref_limited(m, n, chart)
}

pub fn rank(m: &Matrix) -> usize {
    rref(m, None).rank()
}

pub fn kernel(m: &Matrix, ncols: usize) -> Vec<Vec<Scalar>> {
    if m.is_empty() {
        return (0..ncols)
            .map(|i| (0..ncols).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }).collect())
            .collect();
    }
    rref(m, None).kernel()
}

/// One solution of `A x = b` (free variables set to zero), or `None`.
pub fn solve(a: &Matrix, b: &[Scalar], chart: Option<&Chart>) -> Option<Vec<Scalar>> {
    let n = a.first().map_or(0, |r| r.len());
    if a.is_empty() {
        return if b.iter().all(|x| x.is_zero()) { Some(vec![]) } else { None };
    }
    let aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let red = rref_limited(&aug, n, chart);
    let used: Vec<usize> = red.pivots.iter().map(|p| p.0).collect();
    for (r, row) in red.rows.iter().enumerate() {
        if !used.contains(&r) && !row[n].is_zero() {
            return None;
        }
    }
    let mut x = vec![Scalar::zero(); n];
    for &(r, c) in &red.pivots {
        x[c] = red.rows[r][n].clone();
    }
    Some(x)
}

pub fn transpose(m: &Matrix) -> Matrix {
    let ncols = m.first().map_or(0, |r| r.len());
    (0..ncols).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn det(m: &Matrix) -> Scalar {
    let red = rref(m, None);
    if red.rank() < m.len() {
        return Scalar::zero();
    }
    // sign of the pivot permutation
    let mut perm: Vec<usize> = vec![0; m.len()];
    for &(r, c) in &red.pivots {
        perm[r] = c;
    }
    let mut sign = 1;
    let mut seen = vec![false; perm.len()];
    for i in 0..perm.len() {
        if seen[i] {
            continue;
        }
        let mut j = i;
        let mut len = 0;
        while !seen[j] {
            seen[j] = true;
            j = perm[j];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    let d = red.minor_det();
    if sign < 0 {
        -d
    } else {
        d
    }
}
