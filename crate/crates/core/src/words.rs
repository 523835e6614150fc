//! The generator alphabet and words over it.
//!
//! The generators are the one- and two-level matrices `X[j,l]`, `K[j,l]`
//! (both requiring `j < l`) and `i[j]`. A word denotes the product of its
//! letters in written order: the leftmost letter is the leftmost matrix
//! factor, hence the one applied *last* to column vectors.
//!
//! Word grammar (whitespace-separated tokens):
//!
//! ```text
//! token := gen ("^" nonneg-int)? ;
//! gen   := "X[" j "," k "]" | "K[" j "," k "]" | "Kd[" j "," k "]" | "i[" j "]" ;
//! ```
//!
//! `Kd[j,k]` is input sugar for `K[j,k]^7` (the inverse of `K`); it is never
//! produced on output. The empty input is the empty word.

use crate::matrix::UMat;
use crate::ring::{DyadicGauss, GaussInt};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("indices not strictly ordered: {0} >= {1}")]
    IndicesNotOrdered(usize, usize),
}

/// A single generator letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    /// `X[j,l]`, the two-level swap, `j < l`.
    X(usize, usize),
    /// `K[j,l]`, the two-level `(1/(1+i))·[[1,1],[1,-1]]`, `j < l`.
    K(usize, usize),
    /// `i[j]`, the one-level phase.
    Phase(usize),
}

impl Generator {
    pub fn x(j: usize, l: usize) -> Result<Self, WordError> {
        if j >= l {
            return Err(WordError::IndicesNotOrdered(j, l));
        }
        Ok(Generator::X(j, l))
    }

    pub fn k(j: usize, l: usize) -> Result<Self, WordError> {
        if j >= l {
            return Err(WordError::IndicesNotOrdered(j, l));
        }
        Ok(Generator::K(j, l))
    }

    pub fn phase(j: usize) -> Self {
        Generator::Phase(j)
    }

    /// Largest row index the generator touches.
    pub fn max_index(&self) -> usize {
        match *self {
            Generator::X(_, l) | Generator::K(_, l) => l,
            Generator::Phase(j) => j,
        }
    }

    pub fn check_dim(&self, n: usize) -> Result<(), WordError> {
        if self.max_index() >= n {
            return Err(WordError::IndexOutOfRange {
                index: self.max_index(),
                n,
            });
        }
        Ok(())
    }

    /// The generator's matrix in dimension `n`.
    pub fn matrix(&self, n: usize) -> Result<UMat, WordError> {
        self.check_dim(n)?;
        let m = match *self {
            Generator::X(j, l) => UMat::two_level(n, &x_block(), j, l),
            Generator::K(j, l) => UMat::two_level(n, &k_block(), j, l),
            Generator::Phase(j) => UMat::one_level(n, j, DyadicGauss::new(GaussInt::i(), 0)),
        };
        Ok(m.expect("indices validated"))
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Generator::X(j, l) => write!(f, "X[{j},{l}]"),
            Generator::K(j, l) => write!(f, "K[{j},{l}]"),
            Generator::Phase(j) => write!(f, "i[{j}]"),
        }
    }
}

/// The 2×2 block of `X`.
pub fn x_block() -> [[DyadicGauss; 2]; 2] {
    [
        [DyadicGauss::zero(), DyadicGauss::one()],
        [DyadicGauss::one(), DyadicGauss::zero()],
    ]
}

/// The 2×2 block of `K = (1/(1+i))·[[1,1],[1,-1]]`.
pub fn k_block() -> [[DyadicGauss; 2]; 2] {
    let g = |a: i64| DyadicGauss::new(GaussInt::new(a, 0), 1);
    [[g(1), g(1)], [g(1), g(-1)]]
}

/// A finite sequence of generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<Generator>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_vec(gens: Vec<Generator>) -> Self {
        Word(gens)
    }

    pub fn tokens(&self) -> &[Generator] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, g: Generator) {
        self.0.push(g);
    }

    pub fn extend(&mut self, other: &Word) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn concat(parts: &[&Word]) -> Word {
        let mut out = Word::empty();
        for p in parts {
            out.extend(p);
        }
        out
    }
}

impl FromIterator<Generator> for Word {
    fn from_iter<T: IntoIterator<Item = Generator>>(iter: T) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", print_word(self))
    }
}

fn parse_index_pair(body: &str, token: &str) -> Result<(usize, usize), WordError> {
    let (j, l) = body
        .split_once(',')
        .ok_or_else(|| WordError::Syntax(format!("expected two indices in '{token}'")))?;
    let j = j
        .trim()
        .parse::<usize>()
        .map_err(|_| WordError::Syntax(format!("bad index in '{token}'")))?;
    let l = l
        .trim()
        .parse::<usize>()
        .map_err(|_| WordError::Syntax(format!("bad index in '{token}'")))?;
    Ok((j, l))
}

/// Parses the word grammar, validating indices against dimension `n` and
/// the `j < l` constraint, and expanding the `^e` and `Kd` sugar.
pub fn parse_word(text: &str, n: usize) -> Result<Word, WordError> {
    let mut out = Vec::new();
    for token in text.split_whitespace() {
        let (head, exp) = match token.split_once('^') {
            Some((head, e)) => {
                let e = e
                    .parse::<usize>()
                    .map_err(|_| WordError::Syntax(format!("bad exponent in '{token}'")))?;
                (head, e)
            }
            None => (token, 1),
        };
        let (name, rest) = head
            .split_once('[')
            .ok_or_else(|| WordError::Syntax(format!("expected '[' in '{token}'")))?;
        let body = rest
            .strip_suffix(']')
            .ok_or_else(|| WordError::Syntax(format!("expected ']' in '{token}'")))?;
        let (gen, copies) = match name {
            "i" => {
                let j = body
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| WordError::Syntax(format!("bad index in '{token}'")))?;
                (Generator::phase(j), 1)
            }
            "X" => {
                let (j, l) = parse_index_pair(body, token)?;
                (Generator::x(j, l)?, 1)
            }
            "K" => {
                let (j, l) = parse_index_pair(body, token)?;
                (Generator::k(j, l)?, 1)
            }
            "Kd" => {
                let (j, l) = parse_index_pair(body, token)?;
                (Generator::k(j, l)?, 7)
            }
            other => {
                return Err(WordError::Syntax(format!("unknown generator '{other}'")));
            }
        };
        gen.check_dim(n)?;
        for _ in 0..exp * copies {
            out.push(gen);
        }
    }
    Ok(Word(out))
}

/// Canonical text with maximal run-length exponent folding. Parsing the
/// result yields the original word.
pub fn print_word(w: &Word) -> String {
    let mut parts: Vec<String> = Vec::new();
    let toks = w.tokens();
    let mut i = 0;
    while i < toks.len() {
        let g = toks[i];
        let mut run = 1;
        while i + run < toks.len() && toks[i + run] == g {
            run += 1;
        }
        if run == 1 {
            parts.push(g.to_string());
        } else {
            parts.push(format!("{g}^{run}"));
        }
        i += run;
    }
    parts.join(" ")
}

/// Left multiplication of `M` by the generator matrix, touching only the
/// affected rows.
pub fn apply_gen(g: Generator, m: &UMat) -> Result<UMat, WordError> {
    g.check_dim(m.n())?;
    let mut out = m.clone();
    match g {
        Generator::X(j, l) => out.swap_rows(j, l),
        Generator::K(j, l) => out.k_rows(j, l),
        Generator::Phase(j) => out.phase_row(j, 1),
    }
    Ok(out)
}

/// The product matrix of a word, built by applying letters right to left.
pub fn eval_word(w: &Word, n: usize) -> Result<UMat, WordError> {
    for g in w.tokens() {
        g.check_dim(n)?;
    }
    let mut m = UMat::identity(n);
    for g in w.tokens().iter().rev() {
        m = apply_gen(*g, &m)?;
    }
    Ok(m)
}

/// The inverse word: reversed, with `X ↦ X`, `i[j] ↦ i[j]³`, `K ↦ K⁷`.
pub fn invert_word(w: &Word) -> Word {
    let mut out = Vec::new();
    for g in w.tokens().iter().rev() {
        match *g {
            Generator::X(_, _) => out.push(*g),
            Generator::Phase(_) => out.extend([*g; 3]),
            Generator::K(_, _) => out.extend([*g; 7]),
        }
    }
    Word(out)
}

fn expand_gen(g: Generator, out: &mut Vec<Generator>) {
    match g {
        Generator::X(j, l) => {
            if l == j + 1 {
                out.push(g);
            } else {
                // X[j,l] = X[j,j+1] X[j+1,l] X[j,j+1]
                out.push(Generator::X(j, j + 1));
                expand_gen(Generator::X(j + 1, l), out);
                out.push(Generator::X(j, j + 1));
            }
        }
        Generator::K(j, l) => {
            if j > 0 {
                // K[j,l] = X[0,j] K[0,l] X[0,j]
                expand_gen(Generator::X(0, j), out);
                expand_gen(Generator::K(0, l), out);
                expand_gen(Generator::X(0, j), out);
            } else if l > 1 {
                // K[0,l] = X[1,l] K[0,1] X[1,l]
                expand_gen(Generator::X(1, l), out);
                out.push(Generator::K(0, 1));
                expand_gen(Generator::X(1, l), out);
            } else {
                out.push(g);
            }
        }
        Generator::Phase(j) => {
            if j == 0 {
                out.push(g);
            } else {
                // i[j] = X[0,j] i[0] X[0,j]
                expand_gen(Generator::X(0, j), out);
                out.push(Generator::Phase(0));
                expand_gen(Generator::X(0, j), out);
            }
        }
    }
}

/// Rewrites a word over the basic generators `X[j,j+1]`, `K[0,1]`, `i[0]`,
/// preserving its product matrix exactly.
pub fn expand_basic(w: &Word) -> Word {
    let mut out = Vec::new();
    for g in w.tokens() {
        expand_gen(*g, &mut out);
    }
    Word(out)
}

/// All generators valid in dimension `n`, in a fixed order.
pub fn alphabet(n: usize) -> Vec<Generator> {
    let mut gens = Vec::new();
    for j in 0..n {
        for l in (j + 1)..n {
            gens.push(Generator::X(j, l));
        }
    }
    for j in 0..n {
        for l in (j + 1)..n {
            gens.push(Generator::K(j, l));
        }
    }
    for j in 0..n {
        gens.push(Generator::Phase(j));
    }
    gens
}

/// A uniformly random word of the given length.
pub fn random_word(n: usize, len: usize, rng: &mut impl Rng) -> Word {
    let gens = alphabet(n);
    Word(
        (0..len)
            .map(|_| gens[rng.gen_range(0..gens.len())])
            .collect(),
    )
}

/// A reproducible random word for a given seed.
pub fn seeded_word(n: usize, len: usize, seed: u64) -> Word {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_word(n, len, &mut rng)
}
