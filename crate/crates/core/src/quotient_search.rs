//! Finite permutation quotients of finitely presented groups.
//!
//! A homomorphism onto a non-cyclic permutation group shows the group is
//! not infinite cyclic, since every quotient of `Z` is cyclic.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;

use serde::{Serialize, Serializer};

use crate::presentations::FinitePresentation;
use crate::words::{Alphabet, Word};

/// Default largest degree tried by the search.
pub const DEFAULT_MAX_DEGREE: usize = 8;

/// Hard cap on the degree; the search enumerates all of `S_n`.
pub const DEGREE_LIMIT: usize = 8;

/// A permutation of `{0, .., n-1}` stored as its image list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u8>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u8).collect())
    }

    /// From a 0-based image list. Panics if `images` is not a permutation.
    pub fn from_images(images: Vec<u8>) -> Self {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            assert!((i as usize) < images.len() && !seen[i as usize], "not a permutation");
            seen[i as usize] = true;
        }
        Perm(images)
    }

    /// From 1-based cycles, e.g. `&[&[1, 2], &[3, 4]]`.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Self {
        let mut img: Vec<u8> = (0..n as u8).collect();
        for c in cycles {
            for k in 0..c.len() {
                img[c[k] - 1] = (c[(k + 1) % c.len()] - 1) as u8;
            }
        }
        Perm::from_images(img)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[u8] {
        &self.0
    }

    pub fn apply(&self, point: usize) -> usize {
        self.0[point] as usize
    }

    /// Apply `self` first, then `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&i| other.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u8; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j as usize] = i as u8;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j as usize)
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.0.len()];
        let mut out = Vec::new();
        for start in 0..self.0.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut k = self.apply(start);
            while k != start {
                seen[k] = true;
                cycle.push(k);
                k = self.apply(k);
            }
            out.push(cycle);
        }
        out
    }

    pub fn order(&self) -> u64 {
        self.cycles()
            .iter()
            .map(|c| c.len() as u64)
            .fold(1, |a, b| a / gcd(a, b) * b)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl fmt::Display for Perm {
    /// 1-based cycle notation; `()` for the identity.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut any = false;
        for c in self.cycles().into_iter().filter(|c| c.len() > 1) {
            any = true;
            let pts: Vec<String> = c.iter().map(|p| (p + 1).to_string()).collect();
            write!(f, "({})", pts.join(" "))?;
        }
        if !any {
            f.write_str("()")?;
        }
        Ok(())
    }
}

impl Serialize for Perm {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Images of the generators in a symmetric group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationAssignment {
    pub alphabet: Alphabet,
    pub degree: usize,
    pub images: Vec<Perm>,
}

impl PermutationAssignment {
    /// Image of `w`, reading letters left to right.
    pub fn evaluate(&self, w: &Word) -> Perm {
        let inverses: Vec<Perm> = self.images.iter().map(Perm::inverse).collect();
        w.letters().iter().fold(Perm::identity(self.degree), |acc, l| {
            let p = if l.inverse {
                &inverses[l.generator]
            } else {
                &self.images[l.generator]
            };
            acc.then(p)
        })
    }

    /// Every relator of `p` maps to the identity.
    pub fn satisfies(&self, p: &FinitePresentation) -> bool {
        self.alphabet == *p.alphabet()
            && self.images.len() == p.num_generators()
            && p.relators().iter().all(|r| self.evaluate(r).is_identity())
    }

    /// Elements of the image subgroup.
    pub fn image_closure(&self) -> HashSet<Perm> {
        closure(self.degree, &self.images)
    }
}

impl Serialize for PermutationAssignment {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let images: BTreeMap<&str, &Perm> = self
            .alphabet
            .generators()
            .iter()
            .map(|g| g.name())
            .zip(&self.images)
            .collect();
        let mut st = s.serialize_struct("PermutationAssignment", 2)?;
        st.serialize_field("degree", &self.degree)?;
        st.serialize_field("images", &images)?;
        st.end()
    }
}

impl fmt::Display for PermutationAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "degree {}:", self.degree)?;
        for (g, p) in self.alphabet.generators().iter().zip(&self.images) {
            write!(f, " {g} -> {p}")?;
        }
        Ok(())
    }
}

fn closure(degree: usize, gens: &[Perm]) -> HashSet<Perm> {
    let id = Perm::identity(degree);
    let mut seen = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(p) = queue.pop_front() {
        for g in gens {
            let q = p.then(g);
            if seen.insert(q.clone()) {
                queue.push_back(q);
            }
        }
    }
    seen
}

/// True iff the subgroup generated by the images is cyclic: some element's
/// order equals the subgroup order.
pub fn image_is_cyclic(a: &PermutationAssignment) -> bool {
    let group = a.image_closure();
    let n = group.len() as u64;
    group.iter().any(|p| p.order() == n)
}

/// True iff `image(candidate)` is not a power of `image(base)`.
pub fn separates(a: &PermutationAssignment, candidate: &Word, base: &Word) -> bool {
    let target = a.evaluate(candidate);
    let b = a.evaluate(base);
    let mut power = Perm::identity(a.degree);
    loop {
        if power == target {
            return false;
        }
        power = power.then(&b);
        if power.is_identity() {
            return true;
        }
    }
}

/// All permutations of degree `n` in lexicographic order.
fn all_perms(n: usize) -> Vec<Perm> {
    let mut cur: Vec<u8> = (0..n as u8).collect();
    let mut out = vec![Perm(cur.clone())];
    loop {
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(Perm(cur.clone()));
    }
}

/// One permutation per cycle type: consecutive cycles, longest first.
fn class_representatives(n: usize) -> Vec<Perm> {
    fn partitions(n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for k in (1..=max.min(n)).rev() {
            cur.push(k);
            partitions(n - k, k, cur, out);
            cur.pop();
        }
    }
    let mut parts = Vec::new();
    partitions(n, n, &mut Vec::new(), &mut parts);
    let mut reps: Vec<Perm> = parts
        .into_iter()
        .map(|lambda| {
            let mut img = vec![0u8; n];
            let mut start = 0;
            for len in lambda {
                for k in 0..len {
                    img[start + k] = (start + (k + 1) % len) as u8;
                }
                start += len;
            }
            Perm(img)
        })
        .collect();
    reps.sort();
    reps
}

/// Searches degrees `2..=max_degree` for an assignment satisfying every
/// relator and `accept`. Stops at the first hit: lowest degree, then
/// lexicographic order of images.
///
/// The first generator ranges over one representative per conjugacy class,
/// so `accept` must be invariant under simultaneous conjugation. Partial
/// assignments are pruned as soon as a relator's generators are all
/// assigned and it does not evaluate to the identity; the search is
/// otherwise exhaustive.
pub fn find_quotient<F>(p: &FinitePresentation, max_degree: usize, accept: F) -> Option<PermutationAssignment>
where
    F: Fn(&PermutationAssignment) -> bool,
{
    let k = p.num_generators();
    if k == 0 {
        return None;
    }
    // relators grouped by the last generator they mention
    let mut by_last: Vec<Vec<&Word>> = vec![Vec::new(); k];
    for r in p.relators() {
        let last = r.letters().iter().map(|l| l.generator).max().unwrap_or(0);
        by_last[last].push(r);
    }
    for degree in 2..=max_degree.min(DEGREE_LIMIT) {
        let perms = all_perms(degree);
        let reps = class_representatives(degree);
        let mut a = PermutationAssignment {
            alphabet: p.alphabet().clone(),
            degree,
            images: Vec::with_capacity(k),
        };
        if search(&mut a, &by_last, &reps, &perms, &accept) {
            return Some(a);
        }
    }
    None
}

fn search<F>(
    a: &mut PermutationAssignment,
    by_last: &[Vec<&Word>],
    reps: &[Perm],
    perms: &[Perm],
    accept: &F,
) -> bool
where
    F: Fn(&PermutationAssignment) -> bool,
{
    let g = a.images.len();
    if g == by_last.len() {
        return accept(a);
    }
    let choices = if g == 0 { reps } else { perms };
    for p in choices {
        a.images.push(p.clone());
        // unassigned generators are not read by these relators
        let ok = by_last[g].iter().all(|r| evaluate_prefix(a, r).is_identity());
        if ok && search(a, by_last, reps, perms, accept) {
            return true;
        }
        a.images.pop();
    }
    false
}

fn evaluate_prefix(a: &PermutationAssignment, w: &Word) -> Perm {
    w.letters().iter().fold(Perm::identity(a.degree), |acc, l| {
        let p = &a.images[l.generator];
        if l.inverse {
            acc.then(&p.inverse())
        } else {
            acc.then(p)
        }
    })
}

/// A permutation quotient with non-cyclic image, certifying that the group
/// is not infinite cyclic. `None` is inconclusive.
pub fn find_noncyclic_quotient(p: &FinitePresentation, max_degree: usize) -> Option<PermutationAssignment> {
    find_quotient(p, max_degree, |a| !image_is_cyclic(a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentations::parse_presentation;

    fn pres(t: &str) -> FinitePresentation {
        parse_presentation(t).unwrap()
    }

    #[test]
    fn perm_basics() {
        let t = Perm::from_cycles(3, &[&[1, 2]]);
        let c = Perm::from_cycles(3, &[&[1, 2, 3]]);
        assert_eq!(t.to_string(), "(1 2)");
        assert_eq!(c.order(), 3);
        assert!(c.then(&c.inverse()).is_identity());
        assert_eq!(Perm::identity(4).to_string(), "()");
        assert_eq!(all_perms(4).len(), 24);
        assert_eq!(class_representatives(5).len(), 7);
        assert_eq!(class_representatives(8).len(), 22);
    }

    fn assignment(p: &FinitePresentation, images: Vec<Perm>) -> PermutationAssignment {
        PermutationAssignment {
            alphabet: p.alphabet().clone(),
            degree: images[0].degree(),
            images,
        }
    }

    #[test]
    fn cyclicity_of_images() {
        let p = pres("gens: x,y\nrels:");
        let t12 = Perm::from_cycles(3, &[&[1, 2]]);
        let t13 = Perm::from_cycles(3, &[&[1, 3]]);
        assert!(!image_is_cyclic(&assignment(&p, vec![t12.clone(), t13])));
        assert!(image_is_cyclic(&assignment(&p, vec![t12.clone(), t12.clone()])));
        assert!(image_is_cyclic(&assignment(&p, vec![Perm::identity(3), Perm::identity(3)])));
        let q = pres("gens: x\nrels:");
        assert!(image_is_cyclic(&assignment(&q, vec![Perm::from_cycles(4, &[&[1, 2], &[3, 4]])])));
        // Klein four-group is abelian but not cyclic
        let a = Perm::from_cycles(4, &[&[1, 2]]);
        let b = Perm::from_cycles(4, &[&[3, 4]]);
        assert!(!image_is_cyclic(&assignment(&p, vec![a, b])));
    }

    #[test]
    fn trefoil_maps_onto_s3() {
        let p = pres("gens: x,y\nrels: y x^-1 y x y^-1 x");
        let a = find_noncyclic_quotient(&p, 3).expect("degree 3 quotient");
        assert_eq!(a.degree, 3);
        assert!(a.satisfies(&p));
        assert_eq!(a.image_closure().len(), 6);
    }

    #[test]
    fn infinite_cyclic_has_no_witness() {
        let p = pres("gens: x\nrels:");
        assert_eq!(find_noncyclic_quotient(&p, 6), None);
        let p = pres("gens: x,y\nrels: x y^-1");
        assert_eq!(find_noncyclic_quotient(&p, 5), None);
    }

    #[test]
    fn free_group_rank_two() {
        let p = pres("gens: x,y\nrels:");
        let a = find_noncyclic_quotient(&p, 3).unwrap();
        // every subgroup of S2 is cyclic
        assert_eq!(a.degree, 3);
        assert!(!image_is_cyclic(&a));
    }

    #[test]
    fn separation() {
        let p = pres("gens: x,y\nrels:");
        let x = p.word("x").unwrap();
        let y = p.word("y").unwrap();
        let a = assignment(&p, vec![Perm::from_cycles(3, &[&[1, 2]]), Perm::from_cycles(3, &[&[2, 3]])]);
        assert!(separates(&a, &y, &x));
        assert!(!separates(&a, &p.word("x^3").unwrap(), &x));
        assert!(!separates(&a, &p.word("1").unwrap(), &x));
    }
}
