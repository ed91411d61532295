//! Fixed workloads shared by the benchmarks.

use pochette::ribbon::{all_reduced_words, xy_alphabet};
use pochette::{one_fusion_presentation, surgery_pi1, FinitePresentation, IntegerMatrix, PochetteEmbeddingData, SlopeSpec, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seeded square matrices with entries in `[-9, 9]`.
pub fn matrices(count: usize, dim: usize, seed: u64) -> Vec<IntegerMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let entries = (0..dim * dim).map(|_| rng.gen_range(-9..=9)).collect();
            IntegerMatrix::new(dim, dim, entries).expect("dimensions match")
        })
        .collect()
}

/// Surgered one-fusion groups at slope `p/(p+1)` for every reduced `w`
/// of length at most `max_len`.
pub fn one_fusion_surgeries(max_len: usize, p: i64) -> Vec<FinitePresentation> {
    let a = xy_alphabet();
    let slope = SlopeSpec::new(p, p + 1, 0).expect("coprime");
    all_reduced_words(&a, max_len)
        .iter()
        .map(|w| {
            let g = one_fusion_presentation(w, 1).expect("valid sign");
            let data = PochetteEmbeddingData::new(g, a.letter("x").expect("x"), Word::power_of(a.clone(), 1, 1))
                .expect("knot-like");
            surgery_pi1(&data, &slope).expect("normalized slope")
        })
        .collect()
}
