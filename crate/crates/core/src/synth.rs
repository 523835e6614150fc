//! The exact synthesis pass.
//!
//! For a unitary `U` over `Z[1/2, i]`, repeatedly inspect the pivot column
//! (the rightmost column differing from the identity) and emit a *syllable*
//! that strictly decreases the level `(p, k, m)`:
//!
//! - if the pivot column has denominator exponent `k = 0`, it is a standard
//!   basis vector up to a power of `i`; fix the phase and, if needed, move
//!   the entry to the pivot position (`i[j]^e`, or `X[j,p]·i[j]^e`);
//! - if `k > 0`, the first two odd entries `j < l` admit a unique
//!   `q ∈ {0,1}` such that `K†[j,l]·i[l]^q` strictly lowers their
//!   denominator exponents while leaving other entries unchanged.
//!
//! The concatenation of the syllables (latest leftmost, `K†` rendered as
//! `K^7`) is the *normal word* `w` of `U`; it satisfies `⟦w⟧·U = I`. The
//! *normal form* of an arbitrary word `u` is the normal word of `⟦u⟧⁻¹`,
//! so it evaluates to `⟦u⟧` and depends only on that matrix.

use crate::matrix::{odd_indices, Level, UMat};
use crate::ring::{lde_vec, phase_exponent, row_exponent};
use crate::words::{eval_word, Generator, Word, WordError};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SynthError {
    #[error("matrix is not unitary")]
    NotUnitary,
    #[error("the identity matrix has no syllable")]
    IdentityMatrix,
    #[error(transparent)]
    Word(#[from] WordError),
}

/// One step of the synthesis pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Syllable {
    /// `i[j]^e` with `e ∈ {1,2,3}`; emitted when the pivot column is
    /// `i^(-e)·e_p` with `j = p`.
    PhaseFix { j: usize, e: u8 },
    /// `X[j,p]·i[j]^e` with `e ∈ {0,...,3}`; emitted when the pivot column
    /// is `i^(-e)·e_j` with `j ≠ p`.
    MovePhaseFix { j: usize, p: usize, e: u8 },
    /// `K†[j,l]·i[l]^q` with `q ∈ {0,1}`; emitted when the pivot column has
    /// denominator exponent `k > 0` and first two odd entries `j < l`.
    RowOp { j: usize, l: usize, q: u8 },
}

impl Syllable {
    /// The syllable as a word, with `K†` rendered as `K^7` and `i^0` as
    /// nothing.
    pub fn word(&self) -> Word {
        let mut toks = Vec::new();
        match *self {
            Syllable::PhaseFix { j, e } => {
                toks.extend(std::iter::repeat_n(Generator::Phase(j), (e % 4) as usize));
            }
            Syllable::MovePhaseFix { j, p, e } => {
                let (a, b) = if j < p { (j, p) } else { (p, j) };
                toks.push(Generator::X(a, b));
                toks.extend(std::iter::repeat_n(Generator::Phase(j), (e % 4) as usize));
            }
            Syllable::RowOp { j, l, q } => {
                toks.extend(std::iter::repeat_n(Generator::K(j, l), 7));
                toks.extend(std::iter::repeat_n(Generator::Phase(l), (q % 4) as usize));
            }
        }
        Word::from_vec(toks)
    }

    /// Left multiplication of `m` by the syllable, by row operations.
    pub fn apply(&self, m: &UMat) -> UMat {
        let mut out = m.clone();
        match *self {
            Syllable::PhaseFix { j, e } => out.phase_row(j, e),
            Syllable::MovePhaseFix { j, p, e } => {
                out.phase_row(j, e);
                out.swap_rows(j, p);
            }
            Syllable::RowOp { j, l, q } => {
                out.phase_row(l, q);
                out.kd_rows(j, l);
            }
        }
        out
    }
}

impl fmt::Display for Syllable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.word())
    }
}

/// The syllable the synthesis pass emits at `m`.
pub fn syllable_at(m: &UMat) -> Result<Syllable, SynthError> {
    if !m.is_unitary() {
        return Err(SynthError::NotUnitary);
    }
    if m.is_identity() {
        return Err(SynthError::IdentityMatrix);
    }
    Ok(syllable_unchecked(m))
}

/// Syllable choice for a matrix already known to have a pivot column that
/// is a unit vector. Only the pivot column is inspected.
pub(crate) fn syllable_unchecked(m: &UMat) -> Syllable {
    let p = m.pivot_column().expect("caller must not pass the identity");
    let v = m.column(p);
    let k = lde_vec(&v);
    let odd = odd_indices(&v, k);
    if k == 0 {
        // The pivot column is a unit vector over Z[i]: exactly one nonzero
        // entry, a power of i.
        let j = odd[0];
        let e = phase_exponent(v[j].num()).expect("unit entry");
        if j == p {
            assert!(e > 0, "pivot column must differ from e_p");
            Syllable::PhaseFix { j, e }
        } else {
            Syllable::MovePhaseFix { j, p, e }
        }
    } else {
        let (j, l) = (odd[0], odd[1]);
        let q = row_exponent(v[j].num(), v[l].num()).expect("odd entries");
        Syllable::RowOp { j, l, q }
    }
}

/// One step of a normal path: the state, its level, and the syllable taken.
#[derive(Debug, Clone)]
pub struct NormalStep {
    pub state: UMat,
    pub level: Level,
    pub syllable: Syllable,
}

/// The full instrumented path of normal edges from a state down to the
/// identity; levels strictly decrease along it.
#[derive(Debug, Clone)]
pub struct NormalPath {
    pub steps: Vec<NormalStep>,
    pub final_state: UMat,
}

impl NormalPath {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// The word `w` the synthesis pass outputs for `u`, satisfying
/// `⟦w⟧·u = I`.
pub fn normal_word(u: &UMat) -> Result<Word, SynthError> {
    Ok(path_words(u)?.0)
}

/// The instrumented path of `normal_word`.
pub fn normal_path(u: &UMat) -> Result<NormalPath, SynthError> {
    Ok(path_words(u)?.1)
}

fn path_words(u: &UMat) -> Result<(Word, NormalPath), SynthError> {
    if !u.is_unitary() {
        return Err(SynthError::NotUnitary);
    }
    let mut m = u.clone();
    let mut steps: Vec<NormalStep> = Vec::new();
    let mut level = m.level_unchecked();
    while !m.is_identity() {
        let syllable = syllable_unchecked(&m);
        let next = syllable.apply(&m);
        let next_level = next.level_unchecked();
        debug_assert!(next_level < level, "syllables must decrease the level");
        steps.push(NormalStep {
            state: m,
            level,
            syllable,
        });
        m = next;
        level = next_level;
    }
    let mut word = Word::empty();
    for step in steps.iter().rev() {
        word.extend(&step.syllable.word());
    }
    Ok((
        word,
        NormalPath {
            steps,
            final_state: m,
        },
    ))
}

/// The normal form of a word: the normal word of `⟦w⟧⁻¹`, computed via the
/// conjugate transpose. It evaluates to `⟦w⟧` and depends only on `⟦w⟧`.
pub fn normal_form(w: &Word, n: usize) -> Result<Word, SynthError> {
    let u = eval_word(w, n)?;
    normal_word(&u.dagger())
}

/// Exact semantic equivalence: `⟦w⟧ = ⟦v⟧`.
pub fn equivalent(w: &Word, v: &Word, n: usize) -> Result<bool, WordError> {
    Ok(eval_word(w, n)? == eval_word(v, n)?)
}
