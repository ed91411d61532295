//! Smith normal form over the integers and abelian invariants of
//! presentations.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::presentations::FinitePresentation;

/// Default bound on intermediate entry magnitudes.
pub const DEFAULT_ENTRY_BOUND: i64 = 1 << 62;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbelianError {
    #[error("intermediate entry exceeded the magnitude bound {0}")]
    OverflowGuard(i64),
    #[error("matrix has {rows}x{cols} shape but {len} entries")]
    Shape { rows: usize, cols: usize, len: usize },
}

/// Dense integer matrix in row-major order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<i64>,
}

impl IntegerMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<i64>) -> Result<Self, AbelianError> {
        if entries.len() != rows * cols {
            return Err(AbelianError::Shape {
                rows,
                cols,
                len: entries.len(),
            });
        }
        Ok(IntegerMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, AbelianError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let entries: Vec<i64> = rows.iter().flatten().copied().collect();
        Self::new(r, c, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    /// Diagonal entries `(0,0), (1,1), ...`.
    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)] == 0))
    }

    /// Exact product in i128; `None` on shape mismatch or i64 overflow.
    pub fn mul(&self, other: &IntegerMatrix) -> Option<IntegerMatrix> {
        if self.cols != other.rows {
            return None;
        }
        let mut out = IntegerMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc: i128 = 0;
                for k in 0..self.cols {
                    acc += i128::from(self[(i, k)]) * i128::from(other[(k, j)]);
                }
                out[(i, j)] = i64::try_from(acc).ok()?;
            }
        }
        Some(out)
    }

    /// Determinant by fraction-free elimination; `None` for non-square input.
    pub fn determinant(&self) -> Option<i128> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(1);
        }
        let mut a: Vec<Vec<i128>> = (0..n)
            .map(|i| (0..n).map(|j| i128::from(self[(i, j)])).collect())
            .collect();
        let mut sign = 1;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&i| a[i][k] != 0) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return Some(0),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
            }
            prev = a[k][k];
        }
        Some(sign * a[n - 1][n - 1])
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.entries.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.entries.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: i64, bound: i64) -> Result<(), AbelianError> {
        for j in 0..self.cols {
            let v = checked_axpy(self[(dst, j)], k, self[(src, j)], bound)?;
            self[(dst, j)] = v;
        }
        Ok(())
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: i64, bound: i64) -> Result<(), AbelianError> {
        for i in 0..self.rows {
            let v = checked_axpy(self[(i, dst)], k, self[(i, src)], bound)?;
            self[(i, dst)] = v;
        }
        Ok(())
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            self[(r, j)] = -self[(r, j)];
        }
    }
}

fn checked_axpy(a: i64, k: i64, b: i64, bound: i64) -> Result<i64, AbelianError> {
    k.checked_mul(b)
        .and_then(|kb| a.checked_add(kb))
        .filter(|v| v.unsigned_abs() <= bound.unsigned_abs())
        .ok_or(AbelianError::OverflowGuard(bound))
}

impl std::ops::Index<(usize, usize)> for IntegerMatrix {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntegerMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Display for IntegerMatrix {
    /// One row per line, entries separated by spaces.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// `U * M * V = S` with `U`, `V` unimodular and `S` in Smith normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub s: IntegerMatrix,
    pub u: IntegerMatrix,
    pub v: IntegerMatrix,
}

impl SmithForm {
    /// Nonzero diagonal entries, in divisibility order.
    pub fn invariant_factors(&self) -> Vec<i64> {
        self.s.diagonal().into_iter().filter(|&d| d != 0).collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

pub fn smith_normal_form(m: &IntegerMatrix) -> Result<SmithForm, AbelianError> {
    smith_normal_form_bounded(m, DEFAULT_ENTRY_BOUND)
}

/// Smith normal form with an explicit magnitude bound on every entry of
/// `S`, `U` and `V` during the computation.
///
/// Pivots are the smallest nonzero absolute value in the remaining block,
/// ties broken by lowest row-major index.
pub fn smith_normal_form_bounded(m: &IntegerMatrix, bound: i64) -> Result<SmithForm, AbelianError> {
    let (s, t) = diagonalize(m, bound, true)?;
    let (u, v) = t.expect("transforms were tracked");
    Ok(SmithForm { s, u, v })
}

/// Nonzero invariant factors of `m`, in divisibility order.
///
/// Same elimination as [`smith_normal_form`] without the transforms, whose
/// entries grow much faster than those of `S`; this succeeds on matrices
/// where the full decomposition hits the bound.
pub fn invariant_factors(m: &IntegerMatrix) -> Result<Vec<i64>, AbelianError> {
    let (s, _) = diagonalize(m, DEFAULT_ENTRY_BOUND, false)?;
    Ok(s.diagonal().into_iter().filter(|&d| d != 0).collect())
}

type Transforms = Option<(IntegerMatrix, IntegerMatrix)>;

/// Shared elimination; `track` also accumulates `U` and `V`.
fn diagonalize(m: &IntegerMatrix, bound: i64, track: bool) -> Result<(IntegerMatrix, Transforms), AbelianError> {
    let (rows, cols) = (m.rows, m.cols);
    if m.entries.iter().any(|e| e.unsigned_abs() > bound.unsigned_abs()) {
        return Err(AbelianError::OverflowGuard(bound));
    }
    let mut s = m.clone();
    let mut uv = track.then(|| (IntegerMatrix::identity(rows), IntegerMatrix::identity(cols)));
    let swap = |s: &mut IntegerMatrix, uv: &mut Transforms, (i, j): (usize, usize), t: usize| {
        s.swap_rows(t, i);
        s.swap_cols(t, j);
        if let Some((u, v)) = uv {
            u.swap_rows(t, i);
            v.swap_cols(t, j);
        }
    };

    for t in 0..rows.min(cols) {
        let Some(first) = min_nonzero(&s, t..rows, t..cols) else {
            break;
        };
        swap(&mut s, &mut uv, first, t);
        loop {
            let p = s[(t, t)];
            for i in t + 1..rows {
                let q = s[(i, t)] / p;
                if q != 0 {
                    s.add_row(i, t, -q, bound)?;
                    if let Some((u, _)) = uv.as_mut() {
                        u.add_row(i, t, -q, bound)?;
                    }
                }
            }
            for j in t + 1..cols {
                let q = s[(t, j)] / p;
                if q != 0 {
                    s.add_col(j, t, -q, bound)?;
                    if let Some((_, v)) = uv.as_mut() {
                        v.add_col(j, t, -q, bound)?;
                    }
                }
            }
            // remainders smaller than the pivot become the next pivot
            let row_min = min_nonzero(&s, t..t + 1, t + 1..cols);
            let col_min = min_nonzero(&s, t + 1..rows, t..t + 1);
            let next = match (col_min, row_min) {
                (Some(a), Some(b)) => {
                    if s[b].abs() < s[a].abs() {
                        Some(b)
                    } else {
                        Some(a)
                    }
                }
                (a, b) => a.or(b),
            };
            if let Some(at) = next {
                swap(&mut s, &mut uv, at, t);
                continue;
            }
            // pivot must divide the remaining block
            let p = s[(t, t)];
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| s[(i, j)] % p != 0));
            match bad {
                Some(i) => {
                    s.add_row(t, i, 1, bound)?;
                    if let Some((u, _)) = uv.as_mut() {
                        u.add_row(t, i, 1, bound)?;
                    }
                }
                None => break,
            }
        }
        if s[(t, t)] < 0 {
            s.negate_row(t);
            if let Some((u, _)) = uv.as_mut() {
                u.negate_row(t);
            }
        }
    }
    Ok((s, uv))
}

fn min_nonzero(
    s: &IntegerMatrix,
    rows: std::ops::Range<usize>,
    cols: std::ops::Range<usize>,
) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in rows {
        for j in cols.clone() {
            let e = s[(i, j)];
            if e != 0 && best.is_none_or(|b| e.unsigned_abs() < s[b].unsigned_abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

/// Free rank plus torsion coefficients `d1 | d2 | ...`, each at least 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct AbelianInvariants {
    pub free_rank: usize,
    pub torsion: Vec<u64>,
}

impl AbelianInvariants {
    pub fn trivial() -> Self {
        AbelianInvariants {
            free_rank: 0,
            torsion: Vec::new(),
        }
    }

    pub fn free(rank: usize) -> Self {
        AbelianInvariants {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    /// `Z/n`, normalized: trivial for `|n| = 1`, `Z` for `n = 0`.
    pub fn cyclic(n: i64) -> Self {
        match n.unsigned_abs() {
            0 => Self::free(1),
            1 => Self::trivial(),
            k => AbelianInvariants {
                free_rank: 0,
                torsion: vec![k],
            },
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Order of the group, `None` when infinite.
    pub fn order(&self) -> Option<u64> {
        if self.free_rank > 0 {
            None
        } else {
            Some(self.torsion.iter().product())
        }
    }
}

impl fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// Relator matrix: one row per relator, one column per generator, entries
/// are exponent sums.
pub fn relator_matrix(p: &FinitePresentation) -> IntegerMatrix {
    let n = p.num_generators();
    let mut m = IntegerMatrix::zeros(p.relators().len(), n);
    for (i, r) in p.relators().iter().enumerate() {
        for l in r.letters() {
            m[(i, l.generator)] += l.sign();
        }
    }
    m
}

pub fn invariants_from_smith(form: &SmithForm, generators: usize) -> AbelianInvariants {
    invariants_from_factors(&form.invariant_factors(), generators)
}

fn invariants_from_factors(factors: &[i64], generators: usize) -> AbelianInvariants {
    AbelianInvariants {
        free_rank: generators - factors.len(),
        torsion: factors
            .iter()
            .copied()
            .filter(|&d| d > 1)
            .map(|d| d as u64)
            .collect(),
    }
}

/// Abelian invariants of the group presented by `p`.
pub fn abelian_invariants(p: &FinitePresentation) -> Result<AbelianInvariants, AbelianError> {
    let factors = invariant_factors(&relator_matrix(p))?;
    Ok(invariants_from_factors(&factors, p.num_generators()))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomToZError {
    #[error("abelianization is {0}, not Z")]
    NotInfiniteCyclicAbelianization(AbelianInvariants),
    #[error(transparent)]
    Abelian(#[from] AbelianError),
}

/// Images of the generators under the abelianization map onto `Z`, when the
/// abelianization is infinite cyclic. The first generator with a nonzero
/// image is sent to a positive integer.
pub fn hom_to_z(p: &FinitePresentation) -> Result<Vec<i64>, HomToZError> {
    let n = p.num_generators();
    let form = smith_normal_form(&relator_matrix(p))?;
    let inv = invariants_from_smith(&form, n);
    if inv.free_rank != 1 || !inv.torsion.is_empty() {
        return Err(HomToZError::NotInfiniteCyclicAbelianization(inv));
    }
    // Z^n / rows(M) ~ Z^n / rows(S) via x -> x V; the free coordinate is
    // the last column.
    let free_col = form.rank();
    let mut images: Vec<i64> = (0..n).map(|g| form.v[(g, free_col)]).collect();
    if images.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
        images.iter_mut().for_each(|x| *x = -*x);
    }
    Ok(images)
}
