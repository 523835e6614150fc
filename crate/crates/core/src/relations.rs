//! The finite relation set presenting `U_n(Z[1/2, i])`, plus a word
//! rewriting engine over it.
//!
//! The core set has nineteen schemas: the generator orders (`i^4`, `X²`,
//! `K⁸`), commutation of generators with disjoint indices, index swapping
//! through `X`, and a handful of interactions between `K` and the phases.
//! The derived set collects eight further consequences that the diagram
//! completion cases rely on; they are verified sound exactly, and a bounded
//! bidirectional search can look for explicit derivations from the core
//! set (absence of a result within budget is inconclusive, never a
//! refutation).
//!
//! Schemas are instantiated over all injective index assignments that
//! respect the `a < b` constraint of every mentioned subscript pair.
//! Symmetric schemas therefore produce instances that coincide up to
//! renaming; duplicates are kept.

use crate::synth::normal_form;
use crate::words::{eval_word, Generator, Word};
use std::collections::{HashMap, VecDeque};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RelationError {
    #[error("the rewrite source does not match at position {0}")]
    NoMatchAtPosition(usize),
    #[error("derivation search budget exhausted")]
    BudgetExhausted,
}

/// Identifiers for the relation schemas, in a fixed order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[allow(clippy::upper_case_acronyms)]
pub enum SchemaId {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
    R9,
    R10,
    R11,
    R11P,
    R12,
    R12P,
    R13,
    R14,
    R15,
    R16,
    R17,
    D18,
    D19,
    D20,
    D21,
    D22,
    D23,
    D24,
    D25,
}

impl fmt::Display for SchemaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SchemaId::R1 => "R1",
            SchemaId::R2 => "R2",
            SchemaId::R3 => "R3",
            SchemaId::R4 => "R4",
            SchemaId::R5 => "R5",
            SchemaId::R6 => "R6",
            SchemaId::R7 => "R7",
            SchemaId::R8 => "R8",
            SchemaId::R9 => "R9",
            SchemaId::R10 => "R10",
            SchemaId::R11 => "R11",
            SchemaId::R11P => "R11'",
            SchemaId::R12 => "R12",
            SchemaId::R12P => "R12'",
            SchemaId::R13 => "R13",
            SchemaId::R14 => "R14",
            SchemaId::R15 => "R15",
            SchemaId::R16 => "R16",
            SchemaId::R17 => "R17",
            SchemaId::D18 => "D18",
            SchemaId::D19 => "D19",
            SchemaId::D20 => "D20",
            SchemaId::D21 => "D21",
            SchemaId::D22 => "D22",
            SchemaId::D23 => "D23",
            SchemaId::D24 => "D24",
            SchemaId::D25 => "D25",
        };
        write!(f, "{s}")
    }
}

/// Which schema family to instantiate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationSet {
    /// The nineteen presenting schemas R1–R17, R11', R12'.
    Core,
    /// The eight derived schemas D18–D25.
    Derived,
}

impl std::str::FromStr for RelationSet {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "core" => Ok(RelationSet::Core),
            "derived" => Ok(RelationSet::Derived),
            other => Err(format!("unknown relation set '{other}'")),
        }
    }
}

/// A pattern token over formal index variables. `Kd` stands for `K†` and
/// renders as `K^7`; `IQ` is a phase raised to the instance exponent.
#[derive(Debug, Clone, Copy)]
enum Pat {
    X(u8, u8),
    K(u8, u8),
    Kd(u8, u8),
    I(u8),
    IQ(u8),
}

struct Schema {
    id: SchemaId,
    nvars: u8,
    has_exp: bool,
    lhs: &'static [Pat],
    rhs: &'static [Pat],
}

use Pat::{Kd, I, IQ, K, X};

const SCHEMAS: &[Schema] = &[
    Schema {
        id: SchemaId::R1,
        nvars: 1,
        has_exp: false,
        lhs: &[I(0), I(0), I(0), I(0)],
        rhs: &[],
    },
    Schema {
        id: SchemaId::R2,
        nvars: 2,
        has_exp: false,
        lhs: &[X(0, 1), X(0, 1)],
        rhs: &[],
    },
    Schema {
        id: SchemaId::R3,
        nvars: 2,
        has_exp: false,
        lhs: &[
            K(0, 1),
            K(0, 1),
            K(0, 1),
            K(0, 1),
            K(0, 1),
            K(0, 1),
            K(0, 1),
            K(0, 1),
        ],
        rhs: &[],
    },
    Schema {
        id: SchemaId::R4,
        nvars: 2,
        has_exp: false,
        lhs: &[I(0), I(1)],
        rhs: &[I(1), I(0)],
    },
    Schema {
        id: SchemaId::R5,
        nvars: 3,
        has_exp: false,
        lhs: &[I(0), X(1, 2)],
        rhs: &[X(1, 2), I(0)],
    },
    Schema {
        id: SchemaId::R6,
        nvars: 3,
        has_exp: false,
        lhs: &[I(0), K(1, 2)],
        rhs: &[K(1, 2), I(0)],
    },
    Schema {
        id: SchemaId::R7,
        nvars: 4,
        has_exp: false,
        lhs: &[X(0, 1), X(2, 3)],
        rhs: &[X(2, 3), X(0, 1)],
    },
    Schema {
        id: SchemaId::R8,
        nvars: 4,
        has_exp: false,
        lhs: &[X(0, 1), K(2, 3)],
        rhs: &[K(2, 3), X(0, 1)],
    },
    Schema {
        id: SchemaId::R9,
        nvars: 4,
        has_exp: false,
        lhs: &[K(0, 1), K(2, 3)],
        rhs: &[K(2, 3), K(0, 1)],
    },
    Schema {
        id: SchemaId::R10,
        nvars: 2,
        has_exp: false,
        lhs: &[I(1), X(0, 1)],
        rhs: &[X(0, 1), I(0)],
    },
    Schema {
        id: SchemaId::R11,
        nvars: 3,
        has_exp: false,
        lhs: &[X(1, 2), X(0, 1)],
        rhs: &[X(0, 1), X(0, 2)],
    },
    Schema {
        id: SchemaId::R11P,
        nvars: 3,
        has_exp: false,
        lhs: &[X(0, 2), X(1, 2)],
        rhs: &[X(1, 2), X(0, 1)],
    },
    Schema {
        id: SchemaId::R12,
        nvars: 3,
        has_exp: false,
        lhs: &[K(1, 2), X(0, 1)],
        rhs: &[X(0, 1), K(0, 2)],
    },
    Schema {
        id: SchemaId::R12P,
        nvars: 3,
        has_exp: false,
        lhs: &[K(0, 2), X(1, 2)],
        rhs: &[X(1, 2), K(0, 1)],
    },
    Schema {
        id: SchemaId::R13,
        nvars: 2,
        has_exp: false,
        lhs: &[K(0, 1), I(1), I(1)],
        rhs: &[X(0, 1), K(0, 1)],
    },
    Schema {
        id: SchemaId::R14,
        nvars: 2,
        has_exp: false,
        lhs: &[K(0, 1), I(1), I(1), I(1)],
        rhs: &[I(1), K(0, 1), I(1), K(0, 1)],
    },
    Schema {
        id: SchemaId::R15,
        nvars: 2,
        has_exp: false,
        lhs: &[K(0, 1), I(0), I(1)],
        rhs: &[I(0), I(1), K(0, 1)],
    },
    Schema {
        id: SchemaId::R16,
        nvars: 2,
        has_exp: false,
        lhs: &[K(0, 1), K(0, 1), I(0), I(1)],
        rhs: &[],
    },
    Schema {
        id: SchemaId::R17,
        nvars: 4,
        has_exp: false,
        lhs: &[K(0, 1), K(2, 3), K(0, 2), K(1, 3)],
        rhs: &[K(0, 2), K(1, 3), K(0, 1), K(2, 3)],
    },
    Schema {
        id: SchemaId::D18,
        nvars: 2,
        has_exp: false,
        lhs: &[Kd(0, 1), I(0)],
        rhs: &[I(0), I(1), X(0, 1), Kd(0, 1), I(1)],
    },
    Schema {
        id: SchemaId::D19,
        nvars: 2,
        has_exp: false,
        lhs: &[K(0, 1)],
        rhs: &[I(0), I(0), I(0), I(1), I(1), I(1), Kd(0, 1)],
    },
    Schema {
        id: SchemaId::D20,
        nvars: 2,
        has_exp: false,
        lhs: &[Kd(0, 1), I(1), K(0, 1)],
        rhs: &[I(1), I(1), I(1), X(0, 1), Kd(0, 1), I(1)],
    },
    Schema {
        id: SchemaId::D21,
        nvars: 3,
        has_exp: true,
        lhs: &[X(0, 2), IQ(0), X(1, 2)],
        rhs: &[X(0, 1), X(0, 2), IQ(0)],
    },
    Schema {
        id: SchemaId::D22,
        nvars: 3,
        has_exp: true,
        lhs: &[X(1, 2), IQ(1), X(0, 1)],
        rhs: &[X(0, 1), X(0, 2), IQ(0)],
    },
    Schema {
        id: SchemaId::D23,
        nvars: 3,
        has_exp: true,
        lhs: &[K(0, 2), IQ(2), X(1, 2)],
        rhs: &[X(1, 2), K(0, 1), IQ(1)],
    },
    Schema {
        id: SchemaId::D24,
        nvars: 4,
        has_exp: false,
        lhs: &[Kd(1, 3), Kd(0, 2), Kd(2, 3), Kd(0, 1), X(1, 2)],
        rhs: &[X(1, 2), Kd(1, 3), Kd(0, 2), Kd(2, 3), Kd(0, 1)],
    },
    Schema {
        id: SchemaId::D25,
        nvars: 2,
        has_exp: false,
        lhs: &[Kd(0, 1), I(1), X(0, 1)],
        rhs: &[X(0, 1), I(0), I(0), I(0), I(1), Kd(0, 1), I(1)],
    },
];

impl RelationSet {
    fn schemas(self) -> impl Iterator<Item = &'static Schema> {
        SCHEMAS.iter().filter(move |s| match self {
            RelationSet::Core => matches!(
                s.id,
                SchemaId::R1
                    | SchemaId::R2
                    | SchemaId::R3
                    | SchemaId::R4
                    | SchemaId::R5
                    | SchemaId::R6
                    | SchemaId::R7
                    | SchemaId::R8
                    | SchemaId::R9
                    | SchemaId::R10
                    | SchemaId::R11
                    | SchemaId::R11P
                    | SchemaId::R12
                    | SchemaId::R12P
                    | SchemaId::R13
                    | SchemaId::R14
                    | SchemaId::R15
                    | SchemaId::R16
                    | SchemaId::R17
            ),
            RelationSet::Derived => matches!(
                s.id,
                SchemaId::D18
                    | SchemaId::D19
                    | SchemaId::D20
                    | SchemaId::D21
                    | SchemaId::D22
                    | SchemaId::D23
                    | SchemaId::D24
                    | SchemaId::D25
            ),
        })
    }
}

fn render(pats: &[Pat], assign: &[usize], q: u8) -> Word {
    let mut toks = Vec::new();
    for pat in pats {
        match *pat {
            X(a, b) => toks.push(Generator::X(assign[a as usize], assign[b as usize])),
            K(a, b) => toks.push(Generator::K(assign[a as usize], assign[b as usize])),
            Kd(a, b) => {
                let g = Generator::K(assign[a as usize], assign[b as usize]);
                toks.extend([g; 7]);
            }
            I(a) => toks.push(Generator::Phase(assign[a as usize])),
            IQ(a) => toks.extend(std::iter::repeat_n(
                Generator::Phase(assign[a as usize]),
                (q % 4) as usize,
            )),
        }
    }
    Word::from_vec(toks)
}

fn pair_constraints_hold(pats: &[Pat], assign: &[usize]) -> bool {
    pats.iter().all(|pat| match *pat {
        X(a, b) | K(a, b) | Kd(a, b) => assign[a as usize] < assign[b as usize],
        _ => true,
    })
}

/// One relation schema instantiated at concrete, pairwise-distinct indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationInstance {
    pub schema: SchemaId,
    pub indices: Vec<usize>,
    pub exponent: Option<u8>,
    pub lhs: Word,
    pub rhs: Word,
    pub n: usize,
}

impl fmt::Display for RelationInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx = self
            .indices
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(",");
        match self.exponent {
            Some(q) => write!(f, "{}({idx};q={q})", self.schema),
            None => write!(f, "{}({idx})", self.schema),
        }
    }
}

fn injective_assignments(nvars: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(nvars);
    let mut used = vec![false; n];
    fn rec(
        nvars: usize,
        n: usize,
        current: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if current.len() == nvars {
            out.push(current.clone());
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                current.push(v);
                rec(nvars, n, current, used, out);
                current.pop();
                used[v] = false;
            }
        }
    }
    rec(nvars, n, &mut current, &mut used, &mut out);
    out
}

/// All admissible instances of the chosen schema family in dimension `n`,
/// in a fixed deterministic order.
pub fn instantiate(n: usize, set: RelationSet) -> Vec<RelationInstance> {
    let mut out = Vec::new();
    for schema in set.schemas() {
        for assign in injective_assignments(schema.nvars as usize, n) {
            if !pair_constraints_hold(schema.lhs, &assign)
                || !pair_constraints_hold(schema.rhs, &assign)
            {
                continue;
            }
            let exps: &[Option<u8>] = if schema.has_exp {
                &[Some(0), Some(1), Some(2), Some(3)]
            } else {
                &[None]
            };
            for &exp in exps {
                let q = exp.unwrap_or(0);
                out.push(RelationInstance {
                    schema: schema.id,
                    indices: assign.clone(),
                    exponent: exp,
                    lhs: render(schema.lhs, &assign, q),
                    rhs: render(schema.rhs, &assign, q),
                    n,
                });
            }
        }
    }
    out
}

/// Result of checking every instance for exact semantic equality of the
/// two sides.
#[derive(Debug, Clone)]
pub struct SoundnessReport {
    pub n: usize,
    pub set: RelationSet,
    pub checked: usize,
    pub failed: usize,
    pub failures: Vec<String>,
}

/// Checks `⟦lhs⟧ = ⟦rhs⟧` exactly for every instance of the family.
pub fn verify_soundness(n: usize, set: RelationSet) -> SoundnessReport {
    let mut report = SoundnessReport {
        n,
        set,
        checked: 0,
        failed: 0,
        failures: Vec::new(),
    };
    for inst in instantiate(n, set) {
        report.checked += 1;
        let lhs = eval_word(&inst.lhs, n).expect("instance indices are in range");
        let rhs = eval_word(&inst.rhs, n).expect("instance indices are in range");
        if lhs != rhs {
            report.failed += 1;
            report.failures.push(inst.to_string());
        }
    }
    report
}

/// Which side of a relation instance a rewrite consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Direction {
    LhsToRhs,
    RhsToLhs,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::LhsToRhs => Direction::RhsToLhs,
            Direction::RhsToLhs => Direction::LhsToRhs,
        }
    }
}

/// One directed application of a relation instance at a word position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteStep {
    pub instance: RelationInstance,
    pub position: usize,
    pub direction: Direction,
}

impl RewriteStep {
    fn source(&self) -> &Word {
        match self.direction {
            Direction::LhsToRhs => &self.instance.lhs,
            Direction::RhsToLhs => &self.instance.rhs,
        }
    }

    fn target(&self) -> &Word {
        match self.direction {
            Direction::LhsToRhs => &self.instance.rhs,
            Direction::RhsToLhs => &self.instance.lhs,
        }
    }

    /// The step that undoes this one, applied to the rewritten word.
    pub fn inverse(&self) -> RewriteStep {
        RewriteStep {
            instance: self.instance.clone(),
            position: self.position,
            direction: self.direction.flip(),
        }
    }
}

impl fmt::Display for RewriteStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dir = match self.direction {
            Direction::LhsToRhs => "->",
            Direction::RhsToLhs => "<-",
        };
        write!(f, "{} {dir} at {}", self.instance, self.position)
    }
}

/// Replaces the step's source side, which must occur contiguously at the
/// step's position, with the other side.
pub fn rewrite_once(w: &Word, step: &RewriteStep) -> Result<Word, RelationError> {
    let src = step.source().tokens();
    let pos = step.position;
    if pos + src.len() > w.len() || &w.tokens()[pos..pos + src.len()] != src {
        return Err(RelationError::NoMatchAtPosition(pos));
    }
    let mut toks = Vec::with_capacity(w.len() - src.len() + step.target().len());
    toks.extend_from_slice(&w.tokens()[..pos]);
    toks.extend_from_slice(step.target().tokens());
    toks.extend_from_slice(&w.tokens()[pos + src.len()..]);
    Ok(Word::from_vec(toks))
}

/// Replays a sequence of rewrite steps from `w`.
pub fn replay(w: &Word, steps: &[RewriteStep]) -> Result<Word, RelationError> {
    let mut cur = w.clone();
    for step in steps {
        cur = rewrite_once(&cur, step)?;
    }
    Ok(cur)
}

fn find_rewrites_with(instances: &[RelationInstance], w: &Word) -> Vec<RewriteStep> {
    let mut out = Vec::new();
    for pos in 0..=w.len() {
        for inst in instances {
            for direction in [Direction::LhsToRhs, Direction::RhsToLhs] {
                let src = match direction {
                    Direction::LhsToRhs => &inst.lhs,
                    Direction::RhsToLhs => &inst.rhs,
                };
                if pos + src.len() <= w.len() && &w.tokens()[pos..pos + src.len()] == src.tokens() {
                    out.push(RewriteStep {
                        instance: inst.clone(),
                        position: pos,
                        direction,
                    });
                }
            }
        }
    }
    out
}

/// Every core-instance rewrite applicable to `w`, in deterministic
/// (position, schema, indices, direction) order.
pub fn find_rewrites(w: &Word, n: usize) -> Vec<RewriteStep> {
    find_rewrites_with(&instantiate(n, RelationSet::Core), w)
}

/// Budget for the bidirectional derivation search.
#[derive(Debug, Clone, Copy)]
pub struct DeriveBudget {
    /// Maximum number of successor words generated.
    pub max_steps: usize,
    /// Maximum number of words retained across both frontiers.
    pub max_queue: usize,
}

impl Default for DeriveBudget {
    fn default() -> Self {
        DeriveBudget {
            max_steps: 200_000,
            max_queue: 200_000,
        }
    }
}

type ParentMap = HashMap<Word, Option<(Word, RewriteStep)>>;

fn chain_to_root(map: &ParentMap, end: &Word) -> Vec<(Word, RewriteStep)> {
    // steps from the root to `end`, each paired with the word it applies to
    let mut chain = Vec::new();
    let mut cur = end.clone();
    while let Some(Some((parent, step))) = map.get(&cur) {
        chain.push((parent.clone(), step.clone()));
        cur = parent.clone();
    }
    chain.reverse();
    chain
}

/// Searches for a sequence of rewrite steps transforming `w` into `v`
/// token-exactly, by bidirectional breadth-first search over the core
/// relation set. Exhausting the budget is inconclusive.
pub fn derive(
    w: &Word,
    v: &Word,
    n: usize,
    budget: DeriveBudget,
) -> Result<Vec<RewriteStep>, RelationError> {
    let instances = instantiate(n, RelationSet::Core);
    if w == v {
        return Ok(Vec::new());
    }

    let mut fwd: ParentMap = HashMap::new();
    let mut bwd: ParentMap = HashMap::new();
    fwd.insert(w.clone(), None);
    bwd.insert(v.clone(), None);
    let mut fq: VecDeque<Word> = VecDeque::from([w.clone()]);
    let mut bq: VecDeque<Word> = VecDeque::from([v.clone()]);
    let mut generated = 0usize;

    let build = |meet: &Word, fwd: &ParentMap, bwd: &ParentMap| -> Vec<RewriteStep> {
        let mut steps: Vec<RewriteStep> = chain_to_root(fwd, meet)
            .into_iter()
            .map(|(_, s)| s)
            .collect();
        // the backward chain runs v -> meet; undo it in reverse order
        let back = chain_to_root(bwd, meet);
        for (_, step) in back.into_iter().rev() {
            steps.push(step.inverse());
        }
        steps
    };

    while !fq.is_empty() || !bq.is_empty() {
        // expand the smaller nonempty frontier; ties go forward
        let forward = if fq.is_empty() {
            false
        } else if bq.is_empty() {
            true
        } else {
            fq.len() <= bq.len()
        };
        let cur = if forward {
            fq.pop_front()
        } else {
            bq.pop_front()
        };
        let Some(cur) = cur else { continue };
        for step in find_rewrites_with(&instances, &cur) {
            generated += 1;
            if generated > budget.max_steps {
                return Err(RelationError::BudgetExhausted);
            }
            let next = rewrite_once(&cur, &step).expect("step was found on this word");
            let inserted = {
                let this_map = if forward { &mut fwd } else { &mut bwd };
                if this_map.contains_key(&next) {
                    false
                } else {
                    this_map.insert(next.clone(), Some((cur.clone(), step)));
                    true
                }
            };
            if !inserted {
                continue;
            }
            if fwd.len() + bwd.len() > budget.max_queue {
                return Err(RelationError::BudgetExhausted);
            }
            let met = if forward {
                bwd.contains_key(&next)
            } else {
                fwd.contains_key(&next)
            };
            if met {
                return Ok(build(&next, &fwd, &bwd));
            }
            if forward {
                fq.push_back(next);
            } else {
                bq.push_back(next);
            }
        }
    }
    Err(RelationError::BudgetExhausted)
}

/// Normal forms are invariant under sound rewrites; exposed for tests and
/// callers that want the invariant spelled out.
pub fn rewrite_preserves_normal_form(
    w: &Word,
    step: &RewriteStep,
    n: usize,
) -> Result<bool, RelationError> {
    let rewritten = rewrite_once(w, step)?;
    let a = normal_form(w, n).expect("word must be valid for n");
    let b = normal_form(&rewritten, n).expect("word must be valid for n");
    Ok(a == b)
}
