//! Surgery relators, surgered fundamental groups, linking numbers, homology
//! and the homotopy 4-sphere verdict.
//!
//! The knot group `<S | R>` of the core sphere exterior, together with words
//! for the meridian `m` and longitude `l`, determines everything computed
//! here. Surgery with slope `p/q` adds the single relator `c_{p,q}(m, l)`,
//! a word with `p` occurrences of `m` whose `l`-exponents are successive
//! differences of `floor(kq/p)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::abelian::{abelian_invariants, hom_to_z, AbelianError, AbelianInvariants, HomToZError};
use crate::coset_enum::{enumerate, EnumerationResult, EnumerationStats, DEFAULT_MAX_COSETS};
use crate::presentations::{tietze_simplify, FinitePresentation};
use crate::quotient_search::DEFAULT_MAX_DEGREE;
use crate::words::{Alphabet, Letter, Word, WordError};

/// Default Tietze step budget.
pub const DEFAULT_TIETZE_STEPS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurgeryError {
    #[error("slope {p}/{q} is not a coprime pair")]
    NotCoprime { p: i64, q: i64 },
    #[error("framing must be 0 or 1, got {0}")]
    InvalidFraming(u8),
    #[error("malformed slope `{0}`; expected p/q")]
    MalformedSlope(String),
    #[error("the floor formula is undefined for p = 0")]
    UndefinedForSlopeZero,
    #[error("knot group abelianization is {0}, not Z")]
    NotKnotGroup(AbelianInvariants),
    #[error("meridian maps to {0} in H1 = Z, not to a generator")]
    MeridianNotGenerator(i64),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Abelian(#[from] AbelianError),
}

/// A slope `p/q` with mod 2 framing `epsilon`, normalized so that
/// `gcd(p, q) = 1`, `p >= 0`, and `q = 1` when `p = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SlopeSpec {
    p: i64,
    q: i64,
    epsilon: u8,
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl SlopeSpec {
    pub fn new(p: i64, q: i64, epsilon: u8) -> Result<Self, SurgeryError> {
        if epsilon > 1 {
            return Err(SurgeryError::InvalidFraming(epsilon));
        }
        if gcd(p, q) != 1 {
            return Err(SurgeryError::NotCoprime { p, q });
        }
        let (p, q) = if p < 0 || (p == 0 && q < 0) { (-p, -q) } else { (p, q) };
        Ok(SlopeSpec { p, q, epsilon })
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn epsilon(&self) -> u8 {
        self.epsilon
    }

    pub fn with_epsilon(self, epsilon: u8) -> Result<Self, SurgeryError> {
        SlopeSpec::new(self.p, self.q, epsilon)
    }

    /// `p + q * linking`.
    pub fn twisted_order(&self, linking: i64) -> i64 {
        self.p + self.q * linking
    }
}

impl fmt::Display for SlopeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for SlopeSpec {
    type Err = SurgeryError;

    /// `p/q`, or a bare integer `p` meaning `p/1`; framing 0.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SurgeryError::MalformedSlope(s.to_string());
        let (p, q) = match s.split_once('/') {
            Some((p, q)) => (p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?),
            None => (s.trim().parse().map_err(|_| bad())?, 1),
        };
        SlopeSpec::new(p, q, 0)
    }
}

/// The two-letter alphabet `{m, l}` on which `c_{p,q}` is written.
pub fn boundary_alphabet() -> Alphabet {
    Alphabet::from_names(&["m", "l"]).expect("valid names")
}

/// `c_{p,q} = l^{a_1} m l^{a_2} m ... l^{a_p} m` with
/// `a_k = floor(kq/p) - floor((k-1)q/p)`.
pub fn c_word(slope: &SlopeSpec) -> Result<Word, SurgeryError> {
    let (p, q) = (slope.p, slope.q);
    if p == 0 {
        return Err(SurgeryError::UndefinedForSlopeZero);
    }
    let alphabet = boundary_alphabet();
    let (m, l) = (0, 1);
    let mut letters = Vec::new();
    let mut prev = 0i64;
    for k in 1..=p {
        let cur = (k * q).div_euclid(p);
        let e = cur - prev;
        prev = cur;
        letters.extend(std::iter::repeat_n(Letter::new(l, e < 0), e.unsigned_abs() as usize));
        letters.push(Letter::new(m, false));
    }
    Ok(Word::from_letters(alphabet, letters))
}

/// Knot group with meridian and longitude words: the algebraic data of an
/// embedded pochette.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PochetteEmbeddingData {
    knot_group: FinitePresentation,
    meridian: Word,
    longitude: Word,
    #[serde(skip)]
    abelianization: Vec<i64>,
}

impl PochetteEmbeddingData {
    /// Validates that the knot group abelianizes to `Z` with the meridian
    /// mapping to a generator.
    pub fn new(knot_group: FinitePresentation, meridian: Word, longitude: Word) -> Result<Self, SurgeryError> {
        if meridian.alphabet() != knot_group.alphabet() || longitude.alphabet() != knot_group.alphabet() {
            return Err(WordError::AlphabetMismatch.into());
        }
        let abelianization = match hom_to_z(&knot_group) {
            Ok(images) => images,
            Err(HomToZError::NotInfiniteCyclicAbelianization(inv)) => {
                return Err(SurgeryError::NotKnotGroup(inv))
            }
            Err(HomToZError::Abelian(e)) => return Err(e.into()),
        };
        let data = PochetteEmbeddingData {
            knot_group,
            meridian,
            longitude,
            abelianization,
        };
        let m = data.image_in_z(&data.meridian);
        if m.abs() != 1 {
            return Err(SurgeryError::MeridianNotGenerator(m));
        }
        Ok(data)
    }

    pub fn knot_group(&self) -> &FinitePresentation {
        &self.knot_group
    }

    pub fn meridian(&self) -> &Word {
        &self.meridian
    }

    pub fn longitude(&self) -> &Word {
        &self.longitude
    }

    /// Image of `w` under the abelianization `G -> Z`.
    pub fn image_in_z(&self, w: &Word) -> i64 {
        w.letters()
            .iter()
            .map(|l| l.sign() * self.abelianization[l.generator])
            .sum()
    }
}

/// The integer `l` with `[longitude] = l [meridian]` in `H1 = Z`.
pub fn linking_number(data: &PochetteEmbeddingData) -> i64 {
    // the meridian maps to +-1, so dividing is multiplying
    data.image_in_z(&data.longitude) * data.image_in_z(&data.meridian)
}

/// The surgery relator written in the knot group: `c_{p,q}` with
/// `m -> meridian`, `l -> longitude`, or the longitude itself when `p = 0`.
pub fn surgery_relator(data: &PochetteEmbeddingData, slope: &SlopeSpec) -> Result<Word, SurgeryError> {
    if slope.p == 0 {
        return Ok(data.longitude.clone());
    }
    let mut images = BTreeMap::new();
    images.insert("m".to_string(), data.meridian.clone());
    images.insert("l".to_string(), data.longitude.clone());
    Ok(c_word(slope)?.substitute(&images)?)
}

/// `<S | R, c_{p,q}>`.
pub fn surgery_pi1(data: &PochetteEmbeddingData, slope: &SlopeSpec) -> Result<FinitePresentation, SurgeryError> {
    let r = surgery_relator(data, slope)?;
    Ok(data.knot_group.add_relator(&r)?)
}

/// `H_0 .. H_4` of the surgered homology 4-sphere. With `n = p + q l`:
/// `H1 = H2 = Z/n`, `H3 = 0` when `n != 0`; `H1 = H3 = Z`, `H2 = Z^2` when
/// `n = 0`.
pub fn surgery_homology(linking: i64, slope: &SlopeSpec) -> [AbelianInvariants; 5] {
    let z = AbelianInvariants::free(1);
    let n = slope.twisted_order(linking);
    if n == 0 {
        [z.clone(), z.clone(), AbelianInvariants::free(2), z.clone(), z]
    } else {
        let t = AbelianInvariants::cyclic(n);
        [z.clone(), t.clone(), t, AbelianInvariants::trivial(), z]
    }
}

/// Work limits for the semi-decision procedures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Budgets {
    pub max_cosets: usize,
    pub tietze_steps: usize,
    pub max_degree: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            max_cosets: DEFAULT_MAX_COSETS,
            tietze_steps: DEFAULT_TIETZE_STEPS,
            max_degree: DEFAULT_MAX_DEGREE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum Verdict {
    /// `|p + q l| != 1`, so the homology is not that of a sphere.
    NotHomotopySphere {
        p_plus_q_ell: i64,
        h1: AbelianInvariants,
        h2: AbelianInvariants,
        h3: AbelianInvariants,
    },
    /// Homology sphere with trivial fundamental group: homeomorphic to S^4.
    HomeoS4Certified,
    /// Coset enumeration found a nontrivial finite fundamental group.
    NontrivialPi1 { order: usize },
    /// Homology sphere, but enumeration did not finish within budget.
    Unknown,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::NotHomotopySphere { .. } => "NotHomotopySphere",
            Verdict::HomeoS4Certified => "HomeoS4Certified",
            Verdict::NontrivialPi1 { .. } => "NontrivialPi1",
            Verdict::Unknown => "Unknown",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::NotHomotopySphere { p_plus_q_ell, h1, h2, h3 } => write!(
                f,
                "NotHomotopySphere (p+q*l = {p_plus_q_ell}; H1 = {h1}, H2 = {h2}, H3 = {h3})"
            ),
            Verdict::NontrivialPi1 { order } => write!(f, "NontrivialPi1 (order {order})"),
            other => f.write_str(other.name()),
        }
    }
}

/// How the fundamental group was enumerated, when it was.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnumerationRecord {
    /// `raw` or `simplified`.
    pub presentation: &'static str,
    /// Group order when enumeration completed.
    pub order: Option<usize>,
    pub stats: EnumerationStats,
}

/// Everything computed for one surgery.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SurgeryInvariants {
    pub slope: SlopeSpec,
    pub linking: i64,
    pub p_plus_q_ell: i64,
    pub surgery_relator: Word,
    pub pi1: FinitePresentation,
    pub homology: [AbelianInvariants; 5],
    pub pi1_abelianization: AbelianInvariants,
    pub verdict: Verdict,
    pub enumeration: Vec<EnumerationRecord>,
}

/// Runs the full pipeline for one slope.
pub fn analyze(data: &PochetteEmbeddingData, slope: &SlopeSpec, budgets: &Budgets) -> Result<SurgeryInvariants, SurgeryError> {
    let linking = linking_number(data);
    let n = slope.twisted_order(linking);
    let relator = surgery_relator(data, slope)?;
    let pi1 = data.knot_group.add_relator(&relator)?;
    let homology = surgery_homology(linking, slope);
    let pi1_abelianization = abelian_invariants(&pi1)?;
    let mut enumeration = Vec::new();
    let verdict = if n.abs() != 1 {
        Verdict::NotHomotopySphere {
            p_plus_q_ell: n,
            h1: homology[1].clone(),
            h2: homology[2].clone(),
            h3: homology[3].clone(),
        }
    } else {
        let mut verdict = Verdict::Unknown;
        let simplified = tietze_simplify(&pi1, budgets.tietze_steps).presentation;
        let attempts = [("raw", &pi1), ("simplified", &simplified)];
        for (label, p) in attempts {
            let result = enumerate(p, &[], budgets.max_cosets);
            enumeration.push(EnumerationRecord {
                presentation: label,
                order: result.index(),
                stats: result.stats(),
            });
            if let EnumerationResult::Completed { table, .. } = result {
                verdict = match table.index() {
                    1 => Verdict::HomeoS4Certified,
                    order => Verdict::NontrivialPi1 { order },
                };
                break;
            }
        }
        verdict
    };
    Ok(SurgeryInvariants {
        slope: *slope,
        linking,
        p_plus_q_ell: n,
        surgery_relator: relator,
        pi1,
        homology,
        pi1_abelianization,
        verdict,
        enumeration,
    })
}

/// The S^4 verdict alone.
pub fn detect_s4(data: &PochetteEmbeddingData, slope: &SlopeSpec, budgets: &Budgets) -> Result<Verdict, SurgeryError> {
    Ok(analyze(data, slope, budgets)?.verdict)
}

/// Normalized coprime slopes with `p` and `q` in the given ranges, deduplicated
/// and sorted by `(p, q)`.
pub fn slope_grid(
    p_range: std::ops::RangeInclusive<i64>,
    q_range: std::ops::RangeInclusive<i64>,
    epsilon: u8,
) -> Vec<SlopeSpec> {
    let mut out: Vec<SlopeSpec> = p_range
        .flat_map(|p| q_range.clone().map(move |q| (p, q)))
        .filter_map(|(p, q)| SlopeSpec::new(p, q, epsilon).ok())
        .collect();
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentations::{parse_presentation, relators_equivalent};

    fn slope(p: i64, q: i64) -> SlopeSpec {
        SlopeSpec::new(p, q, 0).unwrap()
    }

    fn trefoil() -> PochetteEmbeddingData {
        let g = parse_presentation("gens: x,y\nrels: y x^-1 y x y^-1 x").unwrap();
        let m = g.word("x").unwrap();
        let l = g.word("y").unwrap();
        PochetteEmbeddingData::new(g, m, l).unwrap()
    }

    #[test]
    fn slope_normalization() {
        assert_eq!(slope(-2, -3), slope(2, 3));
        assert_eq!(slope(0, -1), slope(0, 1));
        assert_eq!(slope(-1, 4).to_string(), "1/-4");
        assert!(matches!(SlopeSpec::new(0, 0, 0), Err(SurgeryError::NotCoprime { .. })));
        assert!(matches!(SlopeSpec::new(2, 4, 0), Err(SurgeryError::NotCoprime { .. })));
        assert!(matches!(SlopeSpec::new(1, 0, 2), Err(SurgeryError::InvalidFraming(2))));
        assert_eq!("1/2".parse::<SlopeSpec>().unwrap(), slope(1, 2));
        assert_eq!("3".parse::<SlopeSpec>().unwrap(), slope(3, 1));
        assert!("a/b".parse::<SlopeSpec>().is_err());
    }

    #[test]
    fn c_word_examples() {
        assert_eq!(c_word(&slope(1, 0)).unwrap().to_string(), "m");
        assert_eq!(c_word(&slope(2, 1)).unwrap().to_string(), "m l m");
        assert_eq!(c_word(&slope(3, 4)).unwrap().to_string(), "l m l m l^2 m");
        assert_eq!(c_word(&slope(1, 2)).unwrap().to_string(), "l^2 m");
        // floors round toward -infinity: floor(-1/2) = -1, floor(-2/2) = -1
        assert_eq!(c_word(&slope(2, -1)).unwrap().to_string(), "l^-1 m^2");
        assert_eq!(c_word(&slope(0, 1)), Err(SurgeryError::UndefinedForSlopeZero));
    }

    #[test]
    fn c_word_single_meridian_family() {
        let a = boundary_alphabet();
        for q in -6..=6 {
            let expected = Word::power_of(a.clone(), 1, q).concat(&a.letter("m").unwrap()).unwrap();
            assert_eq!(c_word(&slope(1, q)).unwrap(), expected);
        }
    }

    #[test]
    fn trefoil_linking_and_relator() {
        let data = trefoil();
        assert_eq!(linking_number(&data), -1);
        let p = surgery_pi1(&data, &slope(1, 2)).unwrap();
        assert_eq!(p.to_string(), "gens: x,y\nrels: y x^-1 y x y^-1 x; y^2 x");
    }

    #[test]
    fn linking_degenerate_longitudes() {
        let g = parse_presentation("gens: x,y\nrels: y x^-1 y x y^-1 x").unwrap();
        let x = g.word("x").unwrap();
        let d = PochetteEmbeddingData::new(g.clone(), x.clone(), x.clone()).unwrap();
        assert_eq!(linking_number(&d), 1);
        let d = PochetteEmbeddingData::new(g.clone(), x.clone(), g.word("1").unwrap()).unwrap();
        assert_eq!(linking_number(&d), 0);
        // meridian y^-1 is also a generator of H1; orientation flips
        let d = PochetteEmbeddingData::new(g.clone(), g.word("y^-1").unwrap(), g.word("x").unwrap()).unwrap();
        assert_eq!(linking_number(&d), 1);
    }

    #[test]
    fn invalid_embedding_data() {
        let free = parse_presentation("gens: x,y\nrels:").unwrap();
        let x = free.word("x").unwrap();
        assert!(matches!(
            PochetteEmbeddingData::new(free.clone(), x.clone(), x.clone()),
            Err(SurgeryError::NotKnotGroup(_))
        ));
        let g = parse_presentation("gens: x,y\nrels: x^2 y^-1").unwrap();
        let y = g.word("y").unwrap();
        assert_eq!(
            PochetteEmbeddingData::new(g.clone(), y.clone(), y),
            Err(SurgeryError::MeridianNotGenerator(2))
        );
    }

    #[test]
    fn special_slopes() {
        let data = trefoil();
        let p = surgery_pi1(&data, &slope(1, 0)).unwrap();
        assert!(relators_equivalent(&p.relators()[1], &data.meridian));
        let p = surgery_pi1(&data, &slope(0, 1)).unwrap();
        assert!(relators_equivalent(&p.relators()[1], &data.longitude));
    }

    #[test]
    fn homology_table() {
        let h = surgery_homology(-1, &slope(1, 2));
        assert!(h[1].is_trivial() && h[2].is_trivial() && h[3].is_trivial());
        for ell in [-3, 0, 2] {
            let h = surgery_homology(ell, &slope(ell, -1));
            assert_eq!(h[1], AbelianInvariants::free(1));
            assert_eq!(h[2], AbelianInvariants::free(2));
            assert_eq!(h[3], AbelianInvariants::free(1));
        }
        let h = surgery_homology(0, &slope(3, 1));
        assert_eq!(h[1].to_string(), "Z/3");
        assert_eq!(h[2].to_string(), "Z/3");
        assert_eq!(h[0], AbelianInvariants::free(1));
        assert_eq!(h[4], AbelianInvariants::free(1));
    }

    #[test]
    fn verdicts() {
        let data = trefoil();
        let b = Budgets::default();
        assert_eq!(detect_s4(&data, &slope(1, 2), &b).unwrap(), Verdict::HomeoS4Certified);
        match detect_s4(&data, &slope(1, 1), &b).unwrap() {
            Verdict::NotHomotopySphere { p_plus_q_ell, h2, .. } => {
                assert_eq!(p_plus_q_ell, 0);
                assert_eq!(h2, AbelianInvariants::free(2));
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn slope_grid_is_canonical() {
        let g = slope_grid(-2..=2, -2..=2, 0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(g.contains(&slope(0, 1)));
        assert!(g.iter().all(|s| s.p() >= 0));
        assert!(slope_grid(2..=2, 2..=2, 0).is_empty());
    }
}
