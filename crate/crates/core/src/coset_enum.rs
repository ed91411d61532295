//! Todd–Coxeter coset enumeration (HLT strategy).
//!
//! Each live coset, in order, has every relator scanned and filled from it;
//! remaining undefined entries of its row are then defined. Coincidences
//! are processed immediately with a union-find forwarding array.

use serde::Serialize;

use crate::presentations::FinitePresentation;
use crate::words::{Alphabet, Letter, Word};

/// Default cap on live cosets.
pub const DEFAULT_MAX_COSETS: usize = 100_000;

/// Total allocated cosets may not exceed this multiple of the live cap.
const ALLOCATION_FACTOR: usize = 32;

const NONE: usize = usize::MAX;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct EnumerationStats {
    /// Cosets defined over the whole run.
    pub cosets_defined: usize,
    /// Cosets killed by coincidences.
    pub collapses: usize,
    /// Largest number of simultaneously live cosets.
    pub max_live: usize,
}

/// A closed coset table: coset 0 is the subgroup, one column per signed
/// generator (`2g` for `g`, `2g+1` for `g^-1`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetTable {
    alphabet: Alphabet,
    rows: Vec<Vec<usize>>,
}

impl CosetTable {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn index(&self) -> usize {
        self.rows.len()
    }

    pub fn entry(&self, coset: usize, letter: Letter) -> usize {
        self.rows[coset][letter.column()]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    /// Coset reached from `start` by reading `w` left to right.
    pub fn trace(&self, start: usize, w: &Word) -> usize {
        w.letters()
            .iter()
            .fold(start, |c, &l| self.rows[c][l.column()])
    }

    /// Every entry is consistent with its inverse and every relator traces
    /// to a loop at every coset.
    pub fn is_closed_under(&self, relators: &[Word]) -> bool {
        let n = self.rows.len();
        let inverse_ok = self.rows.iter().enumerate().all(|(c, row)| {
            row.iter()
                .enumerate()
                .all(|(col, &d)| d < n && self.rows[d][col ^ 1] == c)
        });
        inverse_ok && (0..n).all(|c| relators.iter().all(|r| self.trace(c, r) == c))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EnumerationResult {
    /// The subgroup has this index; the table is closed.
    Completed {
        table: CosetTable,
        stats: EnumerationStats,
    },
    /// The live-coset cap was hit; no claim is made.
    Overflow {
        max_cosets: usize,
        stats: EnumerationStats,
    },
}

impl EnumerationResult {
    pub fn index(&self) -> Option<usize> {
        match self {
            EnumerationResult::Completed { table, .. } => Some(table.index()),
            EnumerationResult::Overflow { .. } => None,
        }
    }

    pub fn stats(&self) -> EnumerationStats {
        match self {
            EnumerationResult::Completed { stats, .. } | EnumerationResult::Overflow { stats, .. } => {
                *stats
            }
        }
    }
}

struct Overflowed;

struct Enumerator {
    cols: usize,
    table: Vec<Vec<usize>>,
    forward: Vec<usize>,
    live: usize,
    max_cosets: usize,
    queue: Vec<usize>,
    stats: EnumerationStats,
}

impl Enumerator {
    fn new(generators: usize, max_cosets: usize) -> Self {
        let cols = 2 * generators;
        Enumerator {
            cols,
            table: vec![vec![NONE; cols]],
            forward: vec![0],
            live: 1,
            max_cosets,
            queue: Vec::new(),
            stats: EnumerationStats {
                cosets_defined: 1,
                collapses: 0,
                max_live: 1,
            },
        }
    }

    fn is_live(&self, c: usize) -> bool {
        self.forward[c] == c
    }

    fn rep(&mut self, c: usize) -> usize {
        let mut root = c;
        while self.forward[root] != root {
            root = self.forward[root];
        }
        let mut k = c;
        while self.forward[k] != root {
            let next = self.forward[k];
            self.forward[k] = root;
            k = next;
        }
        root
    }

    fn define(&mut self, c: usize, col: usize) -> Result<(), Overflowed> {
        if self.live >= self.max_cosets
            || self.table.len() >= self.max_cosets.saturating_mul(ALLOCATION_FACTOR)
        {
            return Err(Overflowed);
        }
        let n = self.table.len();
        self.table.push(vec![NONE; self.cols]);
        self.forward.push(n);
        self.table[c][col] = n;
        self.table[n][col ^ 1] = c;
        self.live += 1;
        self.stats.cosets_defined += 1;
        self.stats.max_live = self.stats.max_live.max(self.live);
        Ok(())
    }

    fn scan_and_fill(&mut self, c: usize, w: &[usize]) -> Result<(), Overflowed> {
        if w.is_empty() {
            return Ok(());
        }
        let (mut f, mut b) = (c, c);
        let (mut i, mut j) = (0usize, w.len() - 1);
        loop {
            while i <= j && self.table[f][w[i]] != NONE {
                f = self.table[f][w[i]];
                if i == j {
                    // forward scan completed the relator
                    if f != b {
                        self.coincidence(f, b);
                    }
                    return Ok(());
                }
                i += 1;
            }
            while j >= i && self.table[b][w[j] ^ 1] != NONE {
                b = self.table[b][w[j] ^ 1];
                if j == i {
                    if f != b {
                        self.coincidence(f, b);
                    }
                    return Ok(());
                }
                j -= 1;
            }
            if i == j {
                // deduction
                self.table[f][w[i]] = b;
                self.table[b][w[i] ^ 1] = f;
                return Ok(());
            }
            self.define(f, w[i])?;
        }
    }

    fn merge(&mut self, k: usize, l: usize) {
        let (a, b) = (self.rep(k), self.rep(l));
        if a != b {
            let (lo, hi) = (a.min(b), a.max(b));
            self.forward[hi] = lo;
            self.queue.push(hi);
            self.live -= 1;
            self.stats.collapses += 1;
        }
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        self.queue.clear();
        self.merge(a, b);
        let mut qi = 0;
        while qi < self.queue.len() {
            let dead = self.queue[qi];
            qi += 1;
            for col in 0..self.cols {
                let d = self.table[dead][col];
                if d == NONE {
                    continue;
                }
                self.table[d][col ^ 1] = NONE;
                let mu = self.rep(dead);
                let nu = self.rep(d);
                if self.table[mu][col] != NONE {
                    let t = self.table[mu][col];
                    self.merge(nu, t);
                } else if self.table[nu][col ^ 1] != NONE {
                    let t = self.table[nu][col ^ 1];
                    self.merge(mu, t);
                } else {
                    self.table[mu][col] = nu;
                    self.table[nu][col ^ 1] = mu;
                }
            }
        }
    }

    fn run(&mut self, relators: &[Vec<usize>], subgroup: &[Vec<usize>]) -> Result<(), Overflowed> {
        for h in subgroup {
            self.scan_and_fill(0, h)?;
        }
        let mut c = 0;
        while c < self.table.len() {
            if self.is_live(c) {
                for r in relators {
                    self.scan_and_fill(c, r)?;
                    if !self.is_live(c) {
                        break;
                    }
                }
                if self.is_live(c) {
                    for col in 0..self.cols {
                        if self.table[c][col] == NONE {
                            self.define(c, col)?;
                        }
                    }
                }
            }
            c += 1;
        }
        Ok(())
    }

    /// Follows `w` from coset 0 while entries are defined.
    fn trace_partial(&mut self, w: &[usize]) -> Option<usize> {
        let mut c = 0;
        for &col in w {
            let d = self.table[c][col];
            if d == NONE {
                return None;
            }
            c = self.rep(d);
        }
        Some(c)
    }

    fn compact(&self, alphabet: Alphabet) -> CosetTable {
        let mut renumber = vec![NONE; self.table.len()];
        let mut next = 0;
        for (c, slot) in renumber.iter_mut().enumerate() {
            if self.is_live(c) {
                *slot = next;
                next += 1;
            }
        }
        let rows = (0..self.table.len())
            .filter(|&c| self.is_live(c))
            .map(|c| self.table[c].iter().map(|&d| renumber[d]).collect())
            .collect();
        CosetTable { alphabet, rows }
    }
}

fn columns(w: &Word) -> Vec<usize> {
    w.letters().iter().map(|l| l.column()).collect()
}

/// Enumerates the cosets of the subgroup generated by `subgroup` in the
/// group presented by `p`, stopping once `max_cosets` cosets would be live.
pub fn enumerate(p: &FinitePresentation, subgroup: &[Word], max_cosets: usize) -> EnumerationResult {
    let (mut e, outcome) = run_enumeration(p, subgroup, max_cosets);
    match outcome {
        Ok(()) => EnumerationResult::Completed {
            table: e.compact(p.alphabet().clone()),
            stats: e.stats,
        },
        Err(Overflowed) => {
            e.queue.clear();
            EnumerationResult::Overflow {
                max_cosets,
                stats: e.stats,
            }
        }
    }
}

fn run_enumeration(
    p: &FinitePresentation,
    subgroup: &[Word],
    max_cosets: usize,
) -> (Enumerator, Result<(), Overflowed>) {
    let relators: Vec<Vec<usize>> = p.relators().iter().map(columns).collect();
    let subgroup: Vec<Vec<usize>> = subgroup.iter().map(columns).collect();
    let mut e = Enumerator::new(p.num_generators(), max_cosets.max(1));
    let outcome = e.run(&relators, &subgroup);
    (e, outcome)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum TrivialityVerdict {
    Trivial,
    /// Enumeration completed with this group order.
    NonTrivial { order: usize },
    /// Enumeration overflowed.
    Unknown,
}

/// Certificate that the group is trivial, via enumeration over the trivial
/// subgroup.
pub fn certify_trivial(p: &FinitePresentation, max_cosets: usize) -> (TrivialityVerdict, EnumerationStats) {
    let result = enumerate(p, &[], max_cosets);
    let verdict = match result.index() {
        Some(1) => TrivialityVerdict::Trivial,
        Some(order) => TrivialityVerdict::NonTrivial { order },
        None => TrivialityVerdict::Unknown,
    };
    (verdict, result.stats())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    InSubgroup,
    NotInSubgroup,
    Unknown,
}

/// Decides whether `candidate` lies in the subgroup generated by
/// `subgroup_gens`.
///
/// A completed enumeration decides the question. After an overflow the
/// partial table still proves membership when the candidate traces from
/// coset 0 back to coset 0, since every entry of the table is a true
/// relation between coset representatives; anything else is `Unknown`.
pub fn subgroup_membership(
    p: &FinitePresentation,
    subgroup_gens: &[Word],
    candidate: &Word,
    max_cosets: usize,
) -> Membership {
    if candidate.is_identity() {
        return Membership::InSubgroup;
    }
    let (mut e, outcome) = run_enumeration(p, subgroup_gens, max_cosets);
    let end = e.trace_partial(&columns(candidate));
    match (outcome, end) {
        (_, Some(0)) => Membership::InSubgroup,
        (Ok(()), _) => Membership::NotInSubgroup,
        (Err(Overflowed), _) => Membership::Unknown,
    }
}
