//! Finite presentations, their text format, and Tietze simplification.

use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::words::{parse_word, Alphabet, Letter, Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("missing `{0}:` section")]
    MissingSection(&'static str),
    #[error("line {line}, column {column}")]
    Word {
        line: usize,
        column: usize,
        source: WordError,
    },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Alphabet(#[from] WordError),
}

/// A presentation `< generators | relators >`.
///
/// Relators are stored freely and cyclically reduced, with no two of them
/// equal up to rotation and inversion. Their given rotation is kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinitePresentation {
    alphabet: Alphabet,
    relators: Vec<Word>,
}

impl FinitePresentation {
    pub fn new(alphabet: Alphabet, relators: Vec<Word>) -> Result<Self, WordError> {
        let mut p = FinitePresentation {
            alphabet,
            relators: Vec::with_capacity(relators.len()),
        };
        for r in relators {
            p = p.add_relator(&r)?;
        }
        Ok(p)
    }

    pub fn free(alphabet: Alphabet) -> Self {
        FinitePresentation {
            alphabet,
            relators: Vec::new(),
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn num_generators(&self) -> usize {
        self.alphabet.len()
    }

    pub fn total_length(&self) -> usize {
        self.relators.iter().map(Word::len).sum()
    }

    /// Appends `r` (cyclically reduced) unless it is trivial or already
    /// present up to rotation and inversion.
    pub fn add_relator(&self, r: &Word) -> Result<Self, WordError> {
        if r.alphabet() != &self.alphabet {
            return Err(WordError::AlphabetMismatch);
        }
        let r = r.cyclically_reduce();
        let mut out = self.clone();
        if !r.is_identity() && !out.relators.iter().any(|s| relators_equivalent(s, &r)) {
            out.relators.push(r);
        }
        Ok(out)
    }

    /// Parses a word over this presentation's alphabet.
    pub fn word(&self, text: &str) -> Result<Word, WordError> {
        parse_word(text, &self.alphabet)
    }

    /// Same presentation with generators renamed positionally.
    pub fn rename<S: AsRef<str>>(&self, names: &[S]) -> Result<Self, WordError> {
        let alphabet = Alphabet::from_names(names)?;
        let relators = self
            .relators
            .iter()
            .map(|r| r.with_alphabet(alphabet.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(FinitePresentation { alphabet, relators })
    }

    /// Same presentation with relators in another order.
    pub fn permute_relators(&self, order: &[usize]) -> Self {
        FinitePresentation {
            alphabet: self.alphabet.clone(),
            relators: order.iter().map(|&i| self.relators[i].clone()).collect(),
        }
    }
}

impl fmt::Display for FinitePresentation {
    /// `gens:` line followed by a `rels:` line, relators joined by `; `.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<&str> = self.alphabet.generators().iter().map(|g| g.name()).collect();
        writeln!(f, "gens: {}", gens.join(","))?;
        let rels: Vec<String> = self.relators.iter().map(Word::to_string).collect();
        if rels.is_empty() {
            write!(f, "rels:")
        } else {
            write!(f, "rels: {}", rels.join("; "))
        }
    }
}

impl Serialize for FinitePresentation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let gens: Vec<&str> = self.alphabet.generators().iter().map(|g| g.name()).collect();
        let mut st = s.serialize_struct("FinitePresentation", 2)?;
        st.serialize_field("generators", &gens)?;
        st.serialize_field("relators", &self.relators)?;
        st.end()
    }
}

/// Parses the presentation file format:
///
/// ```text
/// # comment
/// gens: x, y
/// rels: y x^-1 y x y^-1 x; y^2 x
/// ```
///
/// Several `rels:` lines accumulate.
pub fn parse_presentation(text: &str) -> Result<FinitePresentation, PresentationError> {
    let mut alphabet: Option<Alphabet> = None;
    let mut pending: Vec<(usize, usize, &str)> = Vec::new();
    let mut saw_rels = false;
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let trimmed = line.trim_start();
        let indent = line.len() - trimmed.len();
        if let Some(rest) = trimmed.strip_prefix("gens:") {
            if alphabet.is_some() {
                return Err(PresentationError::Syntax {
                    line: line_no,
                    message: "duplicate `gens:` section".into(),
                });
            }
            let names: Vec<&str> = rest
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .collect();
            alphabet = Some(Alphabet::from_names(&names).map_err(|e| {
                PresentationError::Syntax {
                    line: line_no,
                    message: e.to_string(),
                }
            })?);
        } else if let Some(rest) = trimmed.strip_prefix("rels:") {
            saw_rels = true;
            let mut col = indent + "rels:".len();
            for piece in rest.split(';') {
                if !piece.trim().is_empty() {
                    pending.push((line_no, col, piece));
                }
                col += piece.len() + 1;
            }
        } else {
            return Err(PresentationError::Syntax {
                line: line_no,
                message: format!("expected `gens:` or `rels:`, found `{}`", trimmed.trim_end()),
            });
        }
    }
    let alphabet = alphabet.ok_or(PresentationError::MissingSection("gens"))?;
    if !saw_rels {
        return Err(PresentationError::MissingSection("rels"));
    }
    let mut p = FinitePresentation::free(alphabet.clone());
    for (line, col, piece) in pending {
        let r = parse_word(piece, &alphabet).map_err(|source| {
            let offset = match source {
                WordError::MalformedFactor(c) | WordError::ZeroExponent(c) => c,
                _ => 1,
            };
            PresentationError::Word {
                line,
                column: col + offset,
                source,
            }
        })?;
        p = p.add_relator(&r)?;
    }
    Ok(p)
}

/// True iff the cyclic reductions of `a` and `b` are rotations of each
/// other, or of each other's inverse.
pub fn relators_equivalent(a: &Word, b: &Word) -> bool {
    let a = a.cyclically_reduce();
    let b = b.cyclically_reduce();
    if a.len() != b.len() || a.alphabet() != b.alphabet() {
        return false;
    }
    is_rotation(a.letters(), b.letters()) || is_rotation(a.letters(), b.invert().letters())
}

fn is_rotation(a: &[Letter], b: &[Letter]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    (0..a.len()).any(|k| a[k..].iter().chain(&a[..k]).eq(b.iter()))
}

/// Result of [`tietze_simplify`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Simplified {
    pub presentation: FinitePresentation,
    /// Moves applied.
    pub steps: usize,
    /// True when the budget ran out before a fixpoint was reached.
    pub budget_exhausted: bool,
}

/// Shrinks a presentation with length-non-increasing Tietze moves:
/// relator deduplication, elimination of a generator occurring exactly once
/// in some relator, and replacement of more than half of a relator inside
/// another relator by the shorter remainder.
///
/// Moves are tried shortest relator first; ties keep the current relator
/// order. No generator is ever introduced.
pub fn tietze_simplify(p: &FinitePresentation, budget: usize) -> Simplified {
    let mut state = State {
        names: p
            .alphabet()
            .generators()
            .iter()
            .map(|g| g.name().to_string())
            .collect(),
        relators: p.relators().iter().map(|r| r.letters().to_vec()).collect(),
    };
    let mut steps = 0;
    let mut exhausted = false;
    state.normalize();
    loop {
        if steps >= budget {
            exhausted = true;
            break;
        }
        if state.eliminate_generator() || state.rewrite_substring() {
            steps += 1;
            state.normalize();
        } else {
            break;
        }
    }
    // A fixpoint reached on the final step is not an exhaustion.
    if exhausted && !state.clone().eliminate_generator() && !state.clone().rewrite_substring() {
        exhausted = false;
    }
    Simplified {
        presentation: state.into_presentation(),
        steps,
        budget_exhausted: exhausted,
    }
}

#[derive(Clone)]
struct State {
    names: Vec<String>,
    relators: Vec<Vec<Letter>>,
}

fn reduce(letters: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
    for &l in letters {
        if out.last() == Some(&l.inv()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    let (mut i, mut j) = (0, out.len());
    while j - i >= 2 && out[i] == out[j - 1].inv() {
        i += 1;
        j -= 1;
    }
    out[i..j].to_vec()
}

fn invert(letters: &[Letter]) -> Vec<Letter> {
    letters.iter().rev().map(|l| l.inv()).collect()
}

impl State {
    fn normalize(&mut self) {
        let mut kept: Vec<Vec<Letter>> = Vec::new();
        for r in self.relators.drain(..) {
            let r = reduce(&r);
            if r.is_empty() {
                continue;
            }
            let inv = invert(&r);
            if !kept.iter().any(|s| is_rotation(s, &r) || is_rotation(s, &inv)) {
                kept.push(r);
            }
        }
        self.relators = kept;
    }

    /// Relator indices, shortest first, stable.
    fn order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.relators.len()).collect();
        idx.sort_by_key(|&i| self.relators[i].len());
        idx
    }

    fn total(&self) -> usize {
        self.relators.iter().map(Vec::len).sum()
    }

    fn eliminate_generator(&mut self) -> bool {
        let before = self.total();
        for ri in self.order() {
            let r = &self.relators[ri];
            for g in 0..self.names.len() {
                let hits: Vec<usize> = (0..r.len()).filter(|&k| r[k].generator == g).collect();
                if hits.len() != 1 {
                    continue;
                }
                // rotate so g^e leads: g^e w = 1
                let k = hits[0];
                let lead = r[k];
                let rest: Vec<Letter> = r[k + 1..].iter().chain(&r[..k]).copied().collect();
                let image = if lead.inverse { rest.clone() } else { invert(&rest) };
                let image_inv = invert(&image);
                let mut next: Vec<Vec<Letter>> = Vec::with_capacity(self.relators.len() - 1);
                for (si, s) in self.relators.iter().enumerate() {
                    if si == ri {
                        continue;
                    }
                    let mut out = Vec::with_capacity(s.len());
                    for &l in s {
                        if l.generator == g {
                            out.extend_from_slice(if l.inverse { &image_inv } else { &image });
                        } else {
                            out.push(l);
                        }
                    }
                    next.push(reduce(&out));
                }
                let after: usize = next.iter().map(Vec::len).sum();
                if after > before {
                    continue;
                }
                // drop g and shift higher generator indices down
                for s in next.iter_mut() {
                    for l in s.iter_mut() {
                        if l.generator > g {
                            l.generator -= 1;
                        }
                    }
                }
                self.names.remove(g);
                self.relators = next;
                return true;
            }
        }
        false
    }

    fn rewrite_substring(&mut self) -> bool {
        let order = self.order();
        for &ri in &order {
            let r = self.relators[ri].clone();
            let n = r.len();
            let r_inv = invert(&r);
            for &si in order.iter().rev() {
                if si == ri || self.relators[si].len() < n / 2 + 1 {
                    continue;
                }
                let s = &self.relators[si];
                // a piece of r of length k > n/2 equals the inverse of the
                // remaining n-k letters; replace it where it occurs in s
                for k in (n / 2 + 1..=n).rev() {
                    for base in [&r, &r_inv] {
                        for rot in 0..n {
                            let cyc: Vec<Letter> =
                                base[rot..].iter().chain(&base[..rot]).copied().collect();
                            let (piece, rest) = cyc.split_at(k);
                            if let Some(pos) = find_cyclic(s, piece) {
                                let mut rotated: Vec<Letter> =
                                    s[pos..].iter().chain(&s[..pos]).copied().collect();
                                rotated.splice(0..k, invert(rest));
                                let replaced = reduce(&rotated);
                                if replaced.len() < s.len() {
                                    self.relators[si] = replaced;
                                    return true;
                                }
                            }
                        }
                    }
                }
            }
        }
        false
    }

    fn into_presentation(self) -> FinitePresentation {
        let alphabet = Alphabet::from_names(&self.names).expect("names came from an alphabet");
        let relators = self
            .relators
            .into_iter()
            .map(|r| Word::from_letters(alphabet.clone(), r))
            .collect();
        FinitePresentation::new(alphabet, relators).expect("same alphabet")
    }
}

/// Position in cyclic word `s` where `piece` starts, if any.
fn find_cyclic(s: &[Letter], piece: &[Letter]) -> Option<usize> {
    if piece.len() > s.len() || piece.is_empty() {
        return None;
    }
    (0..s.len()).find(|&start| (0..piece.len()).all(|i| s[(start + i) % s.len()] == piece[i]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pres(text: &str) -> FinitePresentation {
        parse_presentation(text).unwrap()
    }

    #[test]
    fn parses_surgery_presentation() {
        let p = pres("gens: x,y\nrels: y x^-1 y x y^-1 x ; y^2 x");
        assert_eq!(p.num_generators(), 2);
        assert_eq!(p.relators().len(), 2);
        assert_eq!(p.to_string(), "gens: x,y\nrels: y x^-1 y x y^-1 x; y^2 x");
    }

    #[test]
    fn parses_free_group_and_comments() {
        let p = pres("# rank one\n\ngens: x\nrels:\n");
        assert_eq!(p.num_generators(), 1);
        assert!(p.relators().is_empty());
        let s3 = pres("gens: a,b\nrels: a^2; b^2\nrels: a b a b a b # braid\n");
        assert_eq!(s3.relators().len(), 3);
    }

    #[test]
    fn parse_errors_carry_positions() {
        assert_eq!(
            parse_presentation("rels: x"),
            Err(PresentationError::MissingSection("gens"))
        );
        assert_eq!(
            parse_presentation("gens: x"),
            Err(PresentationError::MissingSection("rels"))
        );
        match parse_presentation("gens: x\nrels: x; x^0") {
            Err(PresentationError::Word { line, column, source }) => {
                assert_eq!(line, 2);
                assert_eq!(column, 12);
                assert!(matches!(source, WordError::ZeroExponent(_)));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_presentation("gens: x\nrels: z"),
            Err(PresentationError::Word { line: 2, .. })
        ));
        assert!(matches!(
            parse_presentation("gens: x\nfoo"),
            Err(PresentationError::Syntax { line: 2, .. })
        ));
    }

    #[test]
    fn relators_are_cyclically_reduced_and_deduplicated() {
        let p = pres("gens: x,y\nrels: x y x^-1; y; y^-1; x y x^-1 y^-1; y^-1 x y x^-1");
        assert_eq!(p.to_string(), "gens: x,y\nrels: y; x y x^-1 y^-1");
    }

    #[test]
    fn add_relator_examples() {
        let p = pres("gens: x,y\nrels: x^-1 y x y^-1 x y");
        let r = p.word("y^2 x").unwrap();
        let q = p.add_relator(&r).unwrap();
        assert_eq!(q.relators().len(), 2);
        assert_eq!(q.add_relator(&r).unwrap(), q);
        assert_eq!(p.add_relator(&p.word("1").unwrap()).unwrap(), p);
        let other = Alphabet::from_names(&["a"]).unwrap().parse("a").unwrap();
        assert_eq!(p.add_relator(&other), Err(WordError::AlphabetMismatch));
    }

    #[test]
    fn equivalence_examples() {
        let a = Alphabet::from_names(&["x", "y"]).unwrap();
        let w = |s: &str| a.parse(s).unwrap();
        // (yx)^{p-1} y^2 x against y (xy)^p for p = 2
        assert!(relators_equivalent(&w("y x y^2 x"), &w("y x y x y")));
        assert!(relators_equivalent(&w("y x y^2 x"), &w("y x y x y").invert()));
        assert!(relators_equivalent(&w("y x y y x"), &w("y y x y x")));
        assert!(relators_equivalent(&w("x y^-1"), &w("y x^-1")));
        assert!(relators_equivalent(&w("x y"), &w("x y")));
        assert!(!relators_equivalent(&w("x"), &w("y")));
    }

    #[test]
    fn simplify_eliminates_to_trivial() {
        let p = pres("gens: x,y\nrels: y^2 x; y");
        let s = tietze_simplify(&p, 100);
        assert_eq!(s.presentation.num_generators(), 0);
        assert!(s.presentation.relators().is_empty());
        assert!(!s.budget_exhausted);
    }

    #[test]
    fn simplify_leaves_free_group() {
        let p = pres("gens: x\nrels:");
        let s = tietze_simplify(&p, 10);
        assert_eq!(s.presentation, p);
        assert_eq!(s.steps, 0);
    }

    #[test]
    fn simplify_spun_trefoil_surgery() {
        let p = pres("gens: x,y\nrels: y x^-1 y x y^-1 x; y^2 x");
        let s = tietze_simplify(&p, 100);
        assert!(s.presentation.total_length() <= p.total_length());
        assert_eq!(s.presentation.num_generators(), 0);
    }

    #[test]
    fn simplify_substring_rewrite() {
        // a^3 b^2 a^3 with relator a^3: the long relator collapses to b^2
        let p = pres("gens: a,b\nrels: a^3; a^3 b^2 a^3 b^-1 a b");
        let s = tietze_simplify(&p, 100);
        assert!(s.presentation.total_length() < p.total_length());
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let p = pres("gens: x,y,z\nrels: x y; y z; z x^2");
        let s = tietze_simplify(&p, 1);
        assert_eq!(s.steps, 1);
        assert!(s.budget_exhausted);
        let full = tietze_simplify(&p, 100);
        assert!(!full.budget_exhausted);
    }
}
