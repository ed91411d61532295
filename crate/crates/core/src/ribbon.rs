//! Ribbon 2-knot groups of 1-fusion and n-fusion, presets, and cord
//! classification.
//!
//! A ribbon 2-knot of n-fusion has a group with generators `x1..x{n+1}`
//! (one per disk) and one relator `w x_i w^-1 x_j^-1` per band. A cord in
//! the exterior is classified by its double coset in `<m> \ G / <m>`; the
//! trivial class pulls back to the subgroup `<m>` itself.

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::abelian::hom_to_z;
use crate::coset_enum::{subgroup_membership, Membership};
use crate::presentations::FinitePresentation;
use crate::quotient_search::{find_noncyclic_quotient, find_quotient, image_is_cyclic, separates, PermutationAssignment};
use crate::surgery::{Budgets, PochetteEmbeddingData, SurgeryError};
use crate::words::{parse_word, Alphabet, Letter, Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RibbonError {
    #[error("invalid fusion graph: {0}")]
    InvalidFusionGraph(String),
    #[error("sign must be +1 or -1, got {0}")]
    InvalidSign(i64),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}")]
    Word { line: usize, source: WordError },
    #[error("unknown preset `{0}`; expected `spun-trefoil` or `one-fusion:<word>:<sign>`")]
    UnknownPreset(String),
    #[error(transparent)]
    WordLevel(#[from] WordError),
    #[error(transparent)]
    Surgery(#[from] SurgeryError),
}

/// The alphabet `{x, y}` of 1-fusion groups.
pub fn xy_alphabet() -> Alphabet {
    Alphabet::from_names(&["x", "y"]).expect("valid names")
}

/// `<x, y | w x w^-1 y^sign>`.
pub fn one_fusion_presentation(w: &Word, sign: i64) -> Result<FinitePresentation, RibbonError> {
    if sign != 1 && sign != -1 {
        return Err(RibbonError::InvalidSign(sign));
    }
    let a = xy_alphabet();
    if w.alphabet() != &a {
        return Err(WordError::AlphabetMismatch.into());
    }
    let x = a.letter("x")?;
    let y = Word::power_of(a.clone(), 1, sign);
    let r = w.concat(&x)?.concat(&w.invert())?.concat(&y)?;
    Ok(FinitePresentation::new(a, vec![r])?)
}

/// `<x, y | y x^-1 y x y^-1 x>`, the group of the spun trefoil.
pub fn spun_trefoil() -> FinitePresentation {
    let a = xy_alphabet();
    let r = a.parse("y x^-1 y x y^-1 x").expect("fixed word");
    FinitePresentation::new(a, vec![r]).expect("fixed presentation")
}

/// One band: conjugating word and the (1-based) disks it joins.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Band {
    pub word: Word,
    pub from: usize,
    pub to: usize,
}

/// Bands of an n-fusion ribbon 2-knot over the alphabet `x1..x{n+1}`.
/// The band graph on the disks is a tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FusionData {
    #[serde(skip)]
    alphabet: Alphabet,
    bands: Vec<Band>,
}

/// `x1, .., x{count}`.
pub fn fusion_alphabet(count: usize) -> Alphabet {
    let names: Vec<String> = (1..=count).map(|i| format!("x{i}")).collect();
    Alphabet::from_names(&names).expect("valid names")
}

impl FusionData {
    pub fn new(bands: Vec<Band>) -> Result<Self, RibbonError> {
        let alphabet = fusion_alphabet(bands.len() + 1);
        let vertices = bands.len() + 1;
        let mut parent: Vec<usize> = (0..vertices).collect();
        fn find(parent: &mut [usize], mut v: usize) -> usize {
            while parent[v] != v {
                parent[v] = parent[parent[v]];
                v = parent[v];
            }
            v
        }
        for (k, b) in bands.iter().enumerate() {
            if b.word.alphabet() != &alphabet {
                return Err(WordError::AlphabetMismatch.into());
            }
            if b.from == 0 || b.to == 0 || b.from > vertices || b.to > vertices {
                return Err(RibbonError::InvalidFusionGraph(format!(
                    "band {} joins disks {} and {}, outside 1..={vertices}",
                    k + 1,
                    b.from,
                    b.to
                )));
            }
            if b.from == b.to {
                return Err(RibbonError::InvalidFusionGraph(format!("band {} is a loop", k + 1)));
            }
            let (a, c) = (find(&mut parent, b.from - 1), find(&mut parent, b.to - 1));
            if a == c {
                return Err(RibbonError::InvalidFusionGraph(format!("band {} closes a cycle", k + 1)));
            }
            parent[a] = c;
        }
        // n edges, no cycle, n+1 vertices: connected
        Ok(FusionData { alphabet, bands })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn bands(&self) -> &[Band] {
        &self.bands
    }

    pub fn fusion_count(&self) -> usize {
        self.bands.len()
    }

    /// Band lines in the fusion file format.
    pub fn to_text(&self) -> String {
        let mut s = format!("n: {}\n", self.bands.len());
        for b in &self.bands {
            let w = b.word.to_string().replace(' ', "*");
            s.push_str(&format!("band: {w} {} {}\n", b.from, b.to));
        }
        s
    }
}

/// `<x1..x{n+1} | w_k x_{i_k} w_k^-1 x_{j_k}^-1>`.
pub fn n_fusion_presentation(f: &FusionData) -> FinitePresentation {
    let a = f.alphabet.clone();
    let relators = f
        .bands
        .iter()
        .map(|b| {
            let xi = Word::power_of(a.clone(), b.from - 1, 1);
            let xj_inv = Word::power_of(a.clone(), b.to - 1, -1);
            b.word
                .concat(&xi)
                .and_then(|w| w.concat(&b.word.invert()))
                .and_then(|w| w.concat(&xj_inv))
                .expect("same alphabet")
        })
        .collect();
    FinitePresentation::new(a, relators).expect("same alphabet")
}

/// Parses `n: <int>` followed by `n` lines `band: <word> <i> <j>`. Lines
/// starting with `#` and blank lines are ignored.
pub fn parse_fusion(text: &str) -> Result<FusionData, RibbonError> {
    let mut count: Option<(usize, usize)> = None;
    let mut bands = Vec::new();
    let mut band_lines = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("n:") {
            if count.is_some() {
                return Err(RibbonError::Syntax {
                    line: line_no,
                    message: "duplicate `n:` line".into(),
                });
            }
            let k = rest.trim().parse::<usize>().map_err(|_| RibbonError::Syntax {
                line: line_no,
                message: format!("bad fusion count `{}`", rest.trim()),
            })?;
            count = Some((k, line_no));
        } else if let Some(rest) = line.strip_prefix("band:") {
            band_lines.push((line_no, rest));
        } else {
            return Err(RibbonError::Syntax {
                line: line_no,
                message: format!("expected `n:` or `band:`, found `{line}`"),
            });
        }
    }
    let (k, k_line) = count.ok_or(RibbonError::Syntax {
        line: 1,
        message: "missing `n:` line".into(),
    })?;
    if band_lines.len() != k {
        return Err(RibbonError::Syntax {
            line: k_line,
            message: format!("expected {k} bands, found {}", band_lines.len()),
        });
    }
    let alphabet = fusion_alphabet(k + 1);
    for (line, rest) in band_lines {
        let tokens: Vec<&str> = rest.split_whitespace().collect();
        if tokens.len() < 3 {
            return Err(RibbonError::Syntax {
                line,
                message: "expected `band: <word> <i> <j>`".into(),
            });
        }
        let parse_index = |t: &str| {
            t.parse::<usize>().map_err(|_| RibbonError::Syntax {
                line,
                message: format!("bad disk index `{t}`"),
            })
        };
        let to = parse_index(tokens[tokens.len() - 1])?;
        let from = parse_index(tokens[tokens.len() - 2])?;
        let word_text = tokens[..tokens.len() - 2].join(" ");
        let word = parse_word(&word_text, &alphabet).map_err(|source| RibbonError::Word { line, source })?;
        bands.push(Band { word, from, to });
    }
    FusionData::new(bands)
}

/// Deterministic random fusion data: a random tree on `n + 1` disks with
/// band words of reduced length at most `max_word_len`.
pub fn random_fusion<R: Rng>(n: usize, max_word_len: usize, rng: &mut R) -> FusionData {
    let alphabet = fusion_alphabet(n + 1);
    let bands = (1..=n)
        .map(|v| {
            // attach disk v+1 to an earlier disk, then shuffle orientation
            let parent = rng.gen_range(1..=v);
            let (from, to) = if rng.gen_bool(0.5) { (v + 1, parent) } else { (parent, v + 1) };
            let word = random_word(&alphabet, max_word_len, rng);
            Band { word, from, to }
        })
        .collect();
    FusionData::new(bands).expect("random tree is valid")
}

/// A freely reduced word of length at most `max_len`, uniform in length.
pub fn random_word<R: Rng>(alphabet: &Alphabet, max_len: usize, rng: &mut R) -> Word {
    let len = rng.gen_range(0..=max_len);
    let mut letters: Vec<Letter> = Vec::with_capacity(len);
    while letters.len() < len {
        let l = Letter::new(rng.gen_range(0..alphabet.len()), rng.gen_bool(0.5));
        if letters.last() != Some(&l.inv()) {
            letters.push(l);
        }
    }
    Word::from_letters(alphabet.clone(), letters)
}

/// Every freely reduced word over `alphabet` of length at most `max_len`,
/// shortest first.
pub fn all_reduced_words(alphabet: &Alphabet, max_len: usize) -> Vec<Word> {
    let mut layer: Vec<Vec<Letter>> = vec![Vec::new()];
    let mut out = vec![alphabet.identity()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for g in 0..alphabet.len() {
                for inverse in [false, true] {
                    let l = Letter::new(g, inverse);
                    if w.last() != Some(&l.inv()) {
                        let mut v = w.clone();
                        v.push(l);
                        next.push(v);
                    }
                }
            }
        }
        out.extend(next.iter().map(|v| Word::from_letters(alphabet.clone(), v.clone())));
        layer = next;
    }
    out
}

/// A knot group with default meridian and longitude, from a preset name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Preset {
    pub knot_group: FinitePresentation,
    pub meridian: Word,
    pub longitude: Word,
}

impl Preset {
    pub fn embedding(&self) -> Result<PochetteEmbeddingData, SurgeryError> {
        PochetteEmbeddingData::new(self.knot_group.clone(), self.meridian.clone(), self.longitude.clone())
    }
}

/// `spun-trefoil` (meridian `x`, longitude `y`) or
/// `one-fusion:<word>:<sign>` (meridian `x`, longitude `y^sign`); the word
/// uses `*` or spaces between factors.
pub fn preset(name: &str) -> Result<Preset, RibbonError> {
    let a = xy_alphabet();
    if name == "spun-trefoil" {
        return Ok(Preset {
            knot_group: spun_trefoil(),
            meridian: a.letter("x")?,
            longitude: a.letter("y")?,
        });
    }
    let Some(rest) = name.strip_prefix("one-fusion:") else {
        return Err(RibbonError::UnknownPreset(name.to_string()));
    };
    let Some((word, sign)) = rest.rsplit_once(':') else {
        return Err(RibbonError::UnknownPreset(name.to_string()));
    };
    let sign: i64 = sign
        .trim()
        .trim_start_matches('+')
        .parse()
        .map_err(|_| RibbonError::UnknownPreset(name.to_string()))?;
    let w = parse_word(word, &a)?;
    Ok(Preset {
        knot_group: one_fusion_presentation(&w, sign)?,
        meridian: a.letter("x")?,
        longitude: Word::power_of(a, 1, sign),
    })
}

/// How a nontrivial cord was certified.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CordCertificate {
    /// Enumeration of the cosets of `<m>` completed and the cord is not in it.
    CosetEnumeration,
    /// A permutation quotient where the cord's image is not a power of the
    /// meridian's image.
    PermutationQuotient {
        witness: PermutationAssignment,
        image_noncyclic: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum CordVerdict {
    /// The cord word lies in `<meridian>`: the trivial double coset.
    TrivialCordClass,
    NontrivialCordCertified { certificate: CordCertificate },
    Unknown { reason: String },
}

impl CordVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            CordVerdict::TrivialCordClass => "TrivialCordClass",
            CordVerdict::NontrivialCordCertified { .. } => "NontrivialCordCertified",
            CordVerdict::Unknown { .. } => "Unknown",
        }
    }
}

/// Decides whether a cord with class `cord` lies in the trivial double
/// coset `[[1]]`, whose preimage is `<meridian>`.
///
/// Membership is attempted first with coset enumeration (a partial table
/// already proves membership). Non-membership is certified by a completed
/// enumeration, or by a permutation quotient separating the cord from the
/// meridian's cyclic subgroup; the first candidate tried is a non-cyclic
/// quotient, which separates whenever meridian and cord generate the group.
/// Groups whose abelianization is not `Z` with the meridian a generator are
/// outside the cord classification and yield `Unknown` unless membership is
/// proved.
pub fn cord_triviality(p: &FinitePresentation, meridian: &Word, cord: &Word, budgets: &Budgets) -> CordVerdict {
    match subgroup_membership(p, std::slice::from_ref(meridian), cord, budgets.max_cosets) {
        Membership::InSubgroup => return CordVerdict::TrivialCordClass,
        Membership::NotInSubgroup => {
            return CordVerdict::NontrivialCordCertified {
                certificate: CordCertificate::CosetEnumeration,
            }
        }
        Membership::Unknown => {}
    }
    let knot_like = hom_to_z(p).ok().is_some_and(|images| {
        let m: i64 = meridian.letters().iter().map(|l| l.sign() * images[l.generator]).sum();
        m.abs() == 1
    });
    if !knot_like {
        return CordVerdict::Unknown {
            reason: "abelianization is not Z generated by the meridian".into(),
        };
    }
    let witness = find_noncyclic_quotient(p, budgets.max_degree)
        .filter(|a| separates(a, cord, meridian))
        .or_else(|| find_quotient(p, budgets.max_degree, |a| separates(a, cord, meridian)));
    match witness {
        Some(witness) => CordVerdict::NontrivialCordCertified {
            certificate: CordCertificate::PermutationQuotient {
                image_noncyclic: !image_is_cyclic(&witness),
                witness,
            },
        },
        None => CordVerdict::Unknown {
            reason: format!(
                "no completed enumeration and no separating quotient up to degree {}",
                budgets.max_degree
            ),
        },
    }
}
