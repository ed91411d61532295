//! Independent reference implementations used as test oracles. Nothing here
//! calls into the engines it checks.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{HashSet, VecDeque};

use rand::Rng;

/// Integer determinant by cofactor expansion, exact in i128.
pub fn det_cofactor(m: &[Vec<i128>]) -> i128 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        n => (0..n)
            .filter(|&j| m[0][j] != 0)
            .map(|j| {
                let minor: Vec<Vec<i128>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &v)| v).collect())
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * det_cofactor(&minor)
            })
            .sum(),
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Invariant factors from determinantal divisors: `d_k` is the gcd of all
/// `k x k` minors and the factors are `d_k / d_{k-1}` while `d_k != 0`.
pub fn invariant_factors_by_minors(m: &[Vec<i64>], rows: usize, cols: usize) -> Vec<i64> {
    let mut out = Vec::new();
    let mut prev: i128 = 1;
    for k in 1..=rows.min(cols) {
        let mut d: i128 = 0;
        for rs in subsets(rows, k) {
            for cs in subsets(cols, k) {
                let minor: Vec<Vec<i128>> = rs
                    .iter()
                    .map(|&r| cs.iter().map(|&c| m[r][c] as i128).collect())
                    .collect();
                d = gcd(d, det_cofactor(&minor));
            }
        }
        if d == 0 {
            break;
        }
        out.push((d / prev) as i64);
        prev = d;
    }
    out
}

/// Textbook diagonalization by elementary operations: move the smallest
/// entry to the corner, reduce its row and column by division with
/// remainder, repeat until the corner divides the rest of the block.
pub fn invariant_factors_by_elimination(m: &[Vec<i64>], rows: usize, cols: usize) -> Vec<i64> {
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&v| v as i128).collect()).collect();
    let mut diag = Vec::new();
    for t in 0..rows.min(cols) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                return finish(diag);
            };
            a.swap(t, bi);
            for row in a.iter_mut() {
                row.swap(t, bj);
            }
            let pivot = a[t][t];
            let mut clean = true;
            for i in t + 1..rows {
                let f = a[i][t] / pivot;
                for j in t..cols {
                    a[i][j] -= f * a[t][j];
                }
                clean &= a[i][t] == 0;
            }
            for j in t + 1..cols {
                let f = a[t][j] / pivot;
                for i in t..rows {
                    a[i][j] -= f * a[i][t];
                }
                clean &= a[t][j] == 0;
            }
            if !clean {
                continue;
            }
            // corner must divide the remaining block; otherwise fold a
            // offending row into row t and go again
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| a[i][j] % pivot != 0));
            match bad {
                Some(i) => {
                    for j in t..cols {
                        a[t][j] += a[i][j];
                    }
                }
                None => {
                    diag.push(pivot.abs());
                    break;
                }
            }
        }
    }
    finish(diag)
}

fn finish(diag: Vec<i128>) -> Vec<i64> {
    diag.into_iter().map(|d| d as i64).collect()
}

pub fn random_matrix<R: Rng>(rng: &mut R, max_dim: usize, bound: i64) -> (usize, usize, Vec<Vec<i64>>) {
    let rows = rng.gen_range(1..=max_dim);
    let cols = rng.gen_range(1..=max_dim);
    let m = (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(-bound..=bound)).collect())
        .collect();
    (rows, cols, m)
}

/// Plain product of integer matrices.
pub fn matmul(a: &[Vec<i128>], b: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| (0..cols).map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum()).collect())
        .collect()
}

/// Permutations as image vectors on `0..n`; product `a * b` applies `a` first.
pub type RawPerm = Vec<usize>;

pub fn compose(a: &RawPerm, b: &RawPerm) -> RawPerm {
    a.iter().map(|&i| b[i]).collect()
}

pub fn invert(a: &RawPerm) -> RawPerm {
    let mut out = vec![0; a.len()];
    for (i, &j) in a.iter().enumerate() {
        out[j] = i;
    }
    out
}

/// Every element of the group generated by `gens`, by breadth-first closure
/// under right multiplication.
pub fn closure(gens: &[RawPerm]) -> HashSet<RawPerm> {
    let n = gens.first().map_or(0, Vec::len);
    let id: RawPerm = (0..n).collect();
    let mut seen = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(g) = queue.pop_front() {
        for s in gens {
            let h = compose(&g, s);
            if seen.insert(h.clone()) {
                queue.push_back(h);
            }
        }
    }
    seen
}

/// Evaluates a word given as `(generator, exponent)` syllables.
pub fn evaluate(gens: &[RawPerm], syllables: &[(usize, i64)]) -> RawPerm {
    let n = gens.first().map_or(0, Vec::len);
    let mut acc: RawPerm = (0..n).collect();
    for &(g, e) in syllables {
        let base = if e < 0 { invert(&gens[g]) } else { gens[g].clone() };
        for _ in 0..e.unsigned_abs() {
            acc = compose(&acc, &base);
        }
    }
    acc
}

/// Rotation by one on `n` points.
pub fn cycle(n: usize) -> RawPerm {
    (0..n).map(|i| (i + 1) % n).collect()
}

/// Transposition of `i` and `j` on `n` points.
pub fn transposition(n: usize, i: usize, j: usize) -> RawPerm {
    let mut p: RawPerm = (0..n).collect();
    p.swap(i, j);
    p
}

/// Reflection `i -> -i mod n`.
pub fn reflection(n: usize) -> RawPerm {
    (0..n).map(|i| (n - i) % n).collect()
}
