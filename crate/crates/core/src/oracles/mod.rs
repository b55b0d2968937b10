//! Reachability backends with three-valued verdicts, productive sequences,
//! and membership in the limit set of a plain VAS.

use std::fmt;

use thiserror::Error;

use crate::model::ModelError;
use crate::omega::OmegaError;

mod ilp;
mod lim;
mod productive;
pub(crate) mod reach;

pub use ilp::{integer_feasible, Feasibility, Relation, Row};
pub use lim::{lim_member, lim_member_with};
pub use productive::{
    candidate_limit, enumerate_productive, productive_check, ProductiveCandidate, ProductiveEnumerator,
};
pub use reach::{reach_decide, reach_decide_vas, ReachCache};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Omega(#[from] OmegaError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("target {0} must be all-finite")]
    InfiniteTarget(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Answer {
    Yes,
    No,
    Unknown,
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Answer::Yes => "YES",
            Answer::No => "NO",
            Answer::Unknown => "UNKNOWN",
        })
    }
}

/// Why a NO answer is sound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Refutation {
    /// The target lies outside the Karp-Miller cover.
    CoverRefuted,
    /// The state equation has no nonnegative integer solution.
    StateEquationRefuted,
    /// Forward exploration visited the whole (finite) reachable set.
    ExhaustedFiniteSpace,
    /// Backward search from the target ran out without meeting the initial vector.
    BackwardExhausted,
    /// The target is finite where the initial vector is ω.
    FrozenComponent,
    /// The query vector disagrees with the filter on a pinned position.
    FilterMismatch,
}

impl fmt::Display for Refutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Refutation::CoverRefuted => "cover-refuted",
            Refutation::StateEquationRefuted => "state-equation-refuted",
            Refutation::ExhaustedFiniteSpace => "exhausted-finite-space",
            Refutation::BackwardExhausted => "backward-exhausted",
            Refutation::FrozenComponent => "frozen-component",
            Refutation::FilterMismatch => "filter-mismatch",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Evidence {
    /// A firing word from the initial vector.
    Word(Vec<String>),
    /// A productive sequence whose limit is the queried vector.
    Productive(ProductiveCandidate),
    /// A lasso: a word to some configuration, then a repeatable cycle.
    Lasso {
        stem: Vec<String>,
        cycle: Vec<String>,
    },
    Refuted(Refutation),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub answer: Answer,
    pub evidence: Option<Evidence>,
    pub steps_used: u64,
}

impl Verdict {
    pub fn yes(evidence: Evidence, steps_used: u64) -> Self {
        Verdict {
            answer: Answer::Yes,
            evidence: Some(evidence),
            steps_used,
        }
    }

    pub fn no(why: Refutation, steps_used: u64) -> Self {
        Verdict {
            answer: Answer::No,
            evidence: Some(Evidence::Refuted(why)),
            steps_used,
        }
    }

    pub fn unknown(steps_used: u64) -> Self {
        Verdict {
            answer: Answer::Unknown,
            evidence: None,
            steps_used,
        }
    }

    pub fn is_definitive(&self) -> bool {
        self.answer != Answer::Unknown
    }

    /// The witness word of a YES reachability verdict.
    pub fn word(&self) -> Option<&[String]> {
        match &self.evidence {
            Some(Evidence::Word(w)) => Some(w),
            _ => None,
        }
    }

    pub fn refutation(&self) -> Option<Refutation> {
        match &self.evidence {
            Some(Evidence::Refuted(r)) => Some(*r),
            _ => None,
        }
    }
}

fn write_word(f: &mut fmt::Formatter<'_>, w: &[String]) -> fmt::Result {
    if w.is_empty() {
        f.write_str("ε")
    } else {
        f.write_str(&w.join(" "))
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.answer)?;
        match &self.evidence {
            None => Ok(()),
            Some(Evidence::Word(w)) => {
                f.write_str("\nwitness: ")?;
                write_word(f, w)
            }
            Some(Evidence::Productive(c)) => write!(f, "\nwitness: {c}"),
            Some(Evidence::Lasso { stem, cycle }) => {
                f.write_str("\nwitness: ")?;
                write_word(f, stem)?;
                f.write_str(" (")?;
                write_word(f, cycle)?;
                f.write_str(")^ω")
            }
            Some(Evidence::Refuted(r)) => write!(f, "\nrefutation: {r}"),
        }
    }
}

/// Elementary-step allowance shared by every stage of an analysis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Budget {
    max_steps: u64,
    used: u64,
}

impl Budget {
    /// A budget of `max_steps` steps; zero is raised to one.
    pub fn new(max_steps: u64) -> Self {
        Budget {
            max_steps: max_steps.max(1),
            used: 0,
        }
    }

    pub fn unlimited() -> Self {
        Budget::new(u64::MAX)
    }

    pub fn max_steps(&self) -> u64 {
        self.max_steps
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn remaining(&self) -> u64 {
        self.max_steps - self.used
    }

    pub fn is_exhausted(&self) -> bool {
        self.used >= self.max_steps
    }

    /// Takes `n` steps if they are all available.
    pub fn spend(&mut self, n: u64) -> bool {
        if self.remaining() >= n {
            self.used += n;
            true
        } else {
            self.used = self.max_steps;
            false
        }
    }

    /// Records steps consumed elsewhere, saturating at the maximum.
    pub fn charge(&mut self, n: u64) {
        self.used = self.used.saturating_add(n).min(self.max_steps);
    }

    /// A child budget of at most `cap` steps; settle it with [`Budget::charge`].
    pub fn sub(&self, cap: u64) -> Budget {
        Budget::new(self.remaining().min(cap))
    }
}
