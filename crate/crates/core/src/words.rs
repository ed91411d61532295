//! Free-group words over a named alphabet.
//!
//! Words are kept freely reduced at all times, so two words denote the same
//! free-group element exactly when they compare equal.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};
use thiserror::Error;

/// Largest exponent magnitude accepted by the parser.
pub const MAX_EXPONENT: i64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("malformed factor at column {0}")]
    MalformedFactor(usize),
    #[error("zero exponent at column {0}")]
    ZeroExponent(usize),
    #[error("words are over different alphabets")]
    AlphabetMismatch,
    #[error("no image given for generator `{0}`")]
    MissingImage(String),
    #[error("invalid generator name `{0}`")]
    InvalidName(String),
    #[error("duplicate generator name `{0}`")]
    DuplicateName(String),
}

/// A named generator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator(String);

impl Generator {
    pub fn new(name: impl Into<String>) -> Result<Self, WordError> {
        let name = name.into();
        if is_valid_name(&name) {
            Ok(Generator(name))
        } else {
            Err(WordError::InvalidName(name))
        }
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Ordered list of distinct generators, shared cheaply between words.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet(Arc<[Generator]>);

impl Alphabet {
    pub fn new(generators: Vec<Generator>) -> Result<Self, WordError> {
        for (i, g) in generators.iter().enumerate() {
            if generators[..i].contains(g) {
                return Err(WordError::DuplicateName(g.0.clone()));
            }
        }
        Ok(Alphabet(generators.into()))
    }

    /// Builds an alphabet from names, validating each one.
    pub fn from_names<S: AsRef<str>>(names: &[S]) -> Result<Self, WordError> {
        let gens = names
            .iter()
            .map(|n| Generator::new(n.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        Alphabet::new(gens)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.0
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|g| g.0 == name)
    }

    pub fn name(&self, index: usize) -> &str {
        &self.0[index].0
    }

    /// The word consisting of the single generator `name`.
    pub fn letter(&self, name: &str) -> Result<Word, WordError> {
        let index = self
            .index_of(name)
            .ok_or_else(|| WordError::UnknownGenerator(name.to_string()))?;
        Ok(Word::from_letters(self.clone(), [Letter::new(index, false)]))
    }

    pub fn identity(&self) -> Word {
        Word::identity(self.clone())
    }

    pub fn parse(&self, text: &str) -> Result<Word, WordError> {
        parse_word(text, self)
    }
}

/// A generator index together with an exponent sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter { generator, inverse }
    }

    pub fn inv(self) -> Self {
        Letter {
            generator: self.generator,
            inverse: !self.inverse,
        }
    }

    pub fn sign(self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    /// Column index in a table with one column per signed generator.
    pub fn column(self) -> usize {
        2 * self.generator + usize::from(self.inverse)
    }
}

/// A freely reduced word.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    alphabet: Alphabet,
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity(alphabet: Alphabet) -> Self {
        Word {
            alphabet,
            letters: Vec::new(),
        }
    }

    /// Builds a word from letters, reducing as it goes.
    pub fn from_letters(alphabet: Alphabet, letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            assert!(l.generator < alphabet.len(), "letter outside alphabet");
            push_reduced(&mut out, l);
        }
        Word {
            alphabet,
            letters: out,
        }
    }

    /// `generator^exponent` for a generator index.
    pub fn power_of(alphabet: Alphabet, generator: usize, exponent: i64) -> Self {
        let letter = Letter::new(generator, exponent < 0);
        let n = exponent.unsigned_abs() as usize;
        Word {
            alphabet,
            letters: vec![letter; n],
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Result<Word, WordError> {
        if self.alphabet != other.alphabet {
            return Err(WordError::AlphabetMismatch);
        }
        let mut letters = self.letters.clone();
        for &l in &other.letters {
            push_reduced(&mut letters, l);
        }
        Ok(Word {
            alphabet: self.alphabet.clone(),
            letters,
        })
    }

    pub fn invert(&self) -> Word {
        Word {
            alphabet: self.alphabet.clone(),
            letters: self.letters.iter().rev().map(|l| l.inv()).collect(),
        }
    }

    /// `self^n`; negative `n` powers the inverse.
    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.invert() } else { self.clone() };
        let mut letters = Vec::with_capacity(base.len() * n.unsigned_abs() as usize);
        for _ in 0..n.unsigned_abs() {
            for &l in &base.letters {
                push_reduced(&mut letters, l);
            }
        }
        Word {
            alphabet: self.alphabet.clone(),
            letters,
        }
    }

    /// Strips matching first/last letters (first equal to inverse of last).
    pub fn cyclically_reduce(&self) -> Word {
        let l = &self.letters;
        let (mut i, mut j) = (0, l.len());
        while j - i >= 2 && l[i] == l[j - 1].inv() {
            i += 1;
            j -= 1;
        }
        Word {
            alphabet: self.alphabet.clone(),
            letters: l[i..j].to_vec(),
        }
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.len() < 2 || self.letters[0] != self.letters[self.len() - 1].inv()
    }

    /// Rotation starting at letter `k`. Only meaningful on cyclically
    /// reduced words, where the result is reduced again.
    pub fn rotate(&self, k: usize) -> Word {
        let mut letters = self.letters.clone();
        if !letters.is_empty() {
            letters.rotate_left(k % self.len());
        }
        Word::from_letters(self.alphabet.clone(), letters)
    }

    pub fn exponent_sum(&self, generator: usize) -> i64 {
        self.letters
            .iter()
            .filter(|l| l.generator == generator)
            .map(|l| l.sign())
            .sum()
    }

    /// Exponent sum of the generator named `name`; zero for unknown names.
    pub fn exponent_sum_of(&self, name: &str) -> i64 {
        self.alphabet
            .index_of(name)
            .map_or(0, |g| self.exponent_sum(g))
    }

    /// Number of occurrences of `generator`, ignoring sign.
    pub fn occurrences(&self, generator: usize) -> usize {
        self.letters
            .iter()
            .filter(|l| l.generator == generator)
            .count()
    }

    /// Replaces each generator by the image at its index.
    pub fn substitute_indexed(&self, images: &[Word]) -> Result<Word, WordError> {
        if images.len() < self.alphabet.len() {
            let missing = self.alphabet.name(images.len()).to_string();
            return Err(WordError::MissingImage(missing));
        }
        let target = match images.first() {
            Some(w) => w.alphabet.clone(),
            None => return Ok(self.clone()),
        };
        if images.iter().any(|w| w.alphabet != target) {
            return Err(WordError::AlphabetMismatch);
        }
        let inverses: Vec<Word> = images.iter().map(Word::invert).collect();
        let mut letters = Vec::new();
        for l in &self.letters {
            let image = if l.inverse {
                &inverses[l.generator]
            } else {
                &images[l.generator]
            };
            for &m in &image.letters {
                push_reduced(&mut letters, m);
            }
        }
        Ok(Word {
            alphabet: target,
            letters,
        })
    }

    /// Replaces generators by named images. Every generator occurring in
    /// the word needs an image; all images share one alphabet.
    pub fn substitute(&self, images: &BTreeMap<String, Word>) -> Result<Word, WordError> {
        let target = match images.values().next() {
            Some(w) => w.alphabet.clone(),
            None if self.is_identity() => return Ok(self.clone()),
            None => {
                let name = self.alphabet.name(self.letters[0].generator);
                return Err(WordError::MissingImage(name.to_string()));
            }
        };
        let mut indexed = Vec::with_capacity(self.alphabet.len());
        for (i, g) in self.alphabet.generators().iter().enumerate() {
            match images.get(g.name()) {
                Some(w) => indexed.push(w.clone()),
                None if self.occurrences(i) == 0 => indexed.push(Word::identity(target.clone())),
                None => return Err(WordError::MissingImage(g.name().to_string())),
            }
        }
        if indexed.is_empty() {
            return Ok(Word::identity(target));
        }
        self.substitute_indexed(&indexed)
    }

    /// Same letters read over another alphabet with the same generator count.
    pub fn with_alphabet(&self, alphabet: Alphabet) -> Result<Word, WordError> {
        if alphabet.len() != self.alphabet.len() {
            return Err(WordError::AlphabetMismatch);
        }
        Ok(Word {
            alphabet,
            letters: self.letters.clone(),
        })
    }

    /// Runs of equal letters as `(generator, exponent)` pairs.
    pub fn syllables(&self) -> Vec<(usize, i64)> {
        let mut out: Vec<(usize, i64)> = Vec::new();
        for l in &self.letters {
            match out.last_mut() {
                Some((g, e)) if *g == l.generator && (*e < 0) == l.inverse => *e += l.sign(),
                _ => out.push((l.generator, l.sign())),
            }
        }
        out
    }
}

fn push_reduced(out: &mut Vec<Letter>, l: Letter) {
    if out.last() == Some(&l.inv()) {
        out.pop();
    } else {
        out.push(l);
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("1");
        }
        for (i, (g, e)) in self.syllables().into_iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(self.alphabet.name(g))?;
            if e != 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Parses `word := "1" | factor (("*" | whitespace) factor)*` with
/// `factor := name ("^" integer)?`. Empty text is the identity.
pub fn parse_word(text: &str, alphabet: &Alphabet) -> Result<Word, WordError> {
    let bytes = text.as_bytes();
    let mut letters = Vec::new();
    let mut pos = 0;
    let mut need_factor = false;
    let skip_sep = |pos: &mut usize| -> bool {
        let mut star = false;
        while *pos < bytes.len() {
            match bytes[*pos] {
                b'*' => star = true,
                b if b.is_ascii_whitespace() => {}
                _ => break,
            }
            *pos += 1;
        }
        star
    };
    // leading whitespace only
    while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
        pos += 1;
    }
    if text.trim() == "1" {
        return Ok(Word::identity(alphabet.clone()));
    }
    while pos < bytes.len() {
        let start = pos;
        if !bytes[pos].is_ascii_alphabetic() {
            return Err(WordError::MalformedFactor(start + 1));
        }
        while pos < bytes.len() && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_') {
            pos += 1;
        }
        let name = &text[start..pos];
        let generator = alphabet
            .index_of(name)
            .ok_or_else(|| WordError::UnknownGenerator(name.to_string()))?;
        let mut exponent: i64 = 1;
        if pos < bytes.len() && bytes[pos] == b'^' {
            pos += 1;
            let num_start = pos;
            if pos < bytes.len() && bytes[pos] == b'-' {
                pos += 1;
            }
            let digits_start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            let digits = &text[digits_start..pos];
            if digits.is_empty() {
                return Err(WordError::MalformedFactor(start + 1));
            }
            if digits == "0" {
                return Err(WordError::ZeroExponent(num_start + 1));
            }
            if digits.starts_with('0') {
                return Err(WordError::MalformedFactor(start + 1));
            }
            exponent = text[num_start..pos]
                .parse::<i64>()
                .ok()
                .filter(|e| e.abs() <= MAX_EXPONENT)
                .ok_or(WordError::MalformedFactor(start + 1))?;
        }
        // a factor must be followed by a separator or the end
        if pos < bytes.len() && !(bytes[pos] == b'*' || bytes[pos].is_ascii_whitespace()) {
            return Err(WordError::MalformedFactor(start + 1));
        }
        let l = Letter::new(generator, exponent < 0);
        for _ in 0..exponent.unsigned_abs() {
            push_reduced(&mut letters, l);
        }
        let sep_at = pos;
        let star = skip_sep(&mut pos);
        need_factor = star;
        if star && pos >= bytes.len() {
            return Err(WordError::MalformedFactor(sep_at + 1));
        }
    }
    if need_factor {
        return Err(WordError::MalformedFactor(text.len()));
    }
    Ok(Word {
        alphabet: alphabet.clone(),
        letters,
    })
}
