//! Algebraic invariants of pochette surgery on homology 4-spheres.
//!
//! Given a presentation of a 2-knot group together with meridian and
//! longitude words, this crate builds the surgered fundamental group for a
//! slope `p/q`, computes the linking number and the homology of the result,
//! and certifies (or honestly fails to certify) that the result is a
//! homotopy 4-sphere. Certificates come from Todd–Coxeter coset enumeration,
//! Smith normal form, and searches for finite permutation quotients.

pub mod abelian;
pub mod coset_enum;
pub mod presentations;
pub mod quotient_search;
pub mod ribbon;
pub mod surgery;
pub mod words;

pub use abelian::{
    abelian_invariants, hom_to_z, invariant_factors, smith_normal_form, AbelianError, AbelianInvariants, HomToZError,
    IntegerMatrix, SmithForm,
};
pub use coset_enum::{
    certify_trivial, enumerate, subgroup_membership, CosetTable, EnumerationResult, EnumerationStats,
    Membership, TrivialityVerdict,
};
pub use presentations::{
    parse_presentation, relators_equivalent, tietze_simplify, FinitePresentation, PresentationError,
    Simplified,
};
pub use quotient_search::{find_noncyclic_quotient, image_is_cyclic, Perm, PermutationAssignment};
pub use ribbon::{
    cord_triviality, n_fusion_presentation, one_fusion_presentation, parse_fusion, preset, spun_trefoil,
    CordCertificate, CordVerdict, FusionData, RibbonError,
};
pub use surgery::{
    analyze, c_word, detect_s4, linking_number, surgery_homology, surgery_pi1, Budgets,
    PochetteEmbeddingData, SlopeSpec, SurgeryError, SurgeryInvariants, Verdict,
};
pub use words::{parse_word, Alphabet, Generator, Letter, Word, WordError};
