//! Exact synthesis and normal forms for the group of unitary matrices with
//! entries in `Z[1/2, i]`.
//!
//! The group `U_n(Z[1/2, i])` is generated by the one- and two-level
//! matrices `X[j,l]`, `K[j,l]` (where `K = (1/(1+i))·[[1,1],[1,-1]]`) and
//! `i[j]`. This crate provides:
//!
//! - exact gamma-adic arithmetic in `Z[i]` and `Z[1/2, i]` ([`ring`]);
//! - exact dense matrices, one-/two-level embeddings, pivot columns, and
//!   the `(p, k, m)` level function ([`matrix`]);
//! - the generator alphabet, word parsing/printing, evaluation, inversion,
//!   and expansion into basic generators ([`words`]);
//! - the synthesis pass producing a canonical normal word for every element,
//!   with its strictly level-decreasing path ([`synth`]);
//! - a finite relation set presenting the group, instantiation and exact
//!   soundness checking, plus a word-rewriting engine with bounded
//!   derivation search ([`relations`]);
//! - the case analysis that completes a square between any basic edge and
//!   the normal edge leaving the same vertex of the Cayley graph, verified
//!   exactly ([`mainlemma`]).
//!
//! ```
//! use digauss::{normal_form, parse_word, print_word};
//!
//! // K · K⁷ cancels, leaving the swap
//! let w = parse_word("K[0,1] K[0,1]^7 X[0,1]", 2).unwrap();
//! let nf = normal_form(&w, 2).unwrap();
//! assert_eq!(print_word(&nf), "X[0,1]");
//! ```

pub mod mainlemma;
pub mod matrix;
pub mod relations;
pub mod ring;
pub mod synth;
pub mod words;

pub use mainlemma::{
    basic_generators, classify_case, complete_diagram, fixture_states, verify_completion, CaseId,
    CompletionReport, DiagramCompletion, DiagramError,
};
pub use matrix::{odd_indices, Level, MatrixError, UMat};
pub use relations::{
    derive, find_rewrites, instantiate, replay, rewrite_once, verify_soundness, DeriveBudget,
    Direction, RelationError, RelationInstance, RelationSet, RewriteStep, SchemaId,
    SoundnessReport,
};
pub use ring::{
    lde_vec, phase_exponent, residue_exponent_gamma3, row_exponent, DyadicGauss, GaussInt,
    RingError,
};
pub use synth::{
    equivalent, normal_form, normal_path, normal_word, syllable_at, NormalPath, NormalStep,
    Syllable, SynthError,
};
pub use words::{
    alphabet, apply_gen, eval_word, expand_basic, invert_word, parse_word, print_word, random_word,
    seeded_word, Generator, Word, WordError,
};
