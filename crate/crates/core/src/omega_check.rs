//! Repeated control-state reachability and ω-regular model checking.
//!
//! A state `qf` is visited infinitely often iff the doubled system reaches
//! one of its two sink states with every counter emptied; see
//! [`build_repeated_product`]. Model checking against a Büchi automaton for
//! the bad behaviours asks the same question for every accepting state of
//! the synchronized product.

use std::fmt;

use crate::model::{buchi_product, build_repeated_product, encode_vassz, BuchiAutomaton, LabeledVassz, Vassz};
use crate::omega::{Natural, OmegaNat, OmegaVec};
use crate::oracles::{reach_decide, Answer, Budget, Evidence, OracleError, Refutation, Verdict};
use crate::vasz::vassz_cover;

/// Decides whether some infinite run visits `qf` infinitely often.
///
/// YES verdicts carry a lasso: the stem leads to `qf`, the cycle returns to
/// `qf` with counters at least as large (and equal on component 1 when the
/// cycle goes through the zero-test).
pub fn repeated_state<N: Natural>(s: &Vassz<N>, qf: &str, budget: &mut Budget) -> Result<Verdict, OracleError> {
    let start = budget.used();
    let product = build_repeated_product(s, qf)?;
    // A state that is never reached is never visited infinitely often.
    let q = s.state_index(qf)?;
    let mut sub = budget.sub(budget.remaining() / 4);
    let (cover, _) = vassz_cover(s, &mut sub);
    budget.charge(sub.used());
    if let Ok(cover) = cover {
        let c = s.dim() + q + 1;
        if cover.iter().all(|b| *b.get(c) == OmegaNat::zero()) {
            return Ok(Verdict::no(Refutation::CoverRefuted, budget.used() - start));
        }
    }
    // Base states, then two copies, then the two sinks.
    let nq = (product.system.states().len() - 2) / 3;
    let (flat, layout) = encode_vassz(&product.system);
    let zero = OmegaVec::zeros(product.system.dim());
    let mut unknown = false;
    let mut why = None;
    for (k, sink) in [product.r_i, product.r_ii].into_iter().enumerate() {
        let target = layout.encode_state(sink, &zero);
        let share = if k == 0 {
            budget.remaining() / 2
        } else {
            budget.remaining()
        };
        let mut sub = budget.sub(share);
        let v = reach_decide(&flat, &target, &mut sub)?;
        budget.charge(sub.used());
        match v.answer {
            Answer::Yes => {
                let word = v.word().expect("reachability YES carries a word");
                let trans = layout.decode_word(word);
                let evidence = lasso(&product.system, nq, &trans);
                return Ok(Verdict::yes(evidence, budget.used() - start));
            }
            Answer::Unknown => unknown = true,
            Answer::No => {
                why = why.or(v.refutation());
            }
        }
    }
    Ok(match why {
        Some(r) if !unknown => Verdict::no(r, budget.used() - start),
        _ => Verdict::unknown(budget.used() - start),
    })
}

/// Splits a run of the doubled system into the original stem and cycle.
fn lasso<N: Natural>(doubled: &Vassz<N>, nq: usize, trans: &[usize]) -> Evidence {
    let ts = doubled.transitions();
    let original = |name: &str| {
        name.strip_suffix("#ii")
            .or_else(|| name.strip_suffix("#i"))
            .unwrap_or(name)
            .to_string()
    };
    // A split zero-test `z` then `z#post` is the original `z`.
    let keep = |name: &String| !name.ends_with("#post");
    let split = trans.iter().position(|&t| ts[t].to >= nq).unwrap_or(trans.len());
    let stem = trans[..split]
        .iter()
        .map(|&t| ts[t].action.clone())
        .filter(keep)
        .collect();
    let cycle = trans[split..]
        .iter()
        .take_while(|&&t| !ts[t].action.starts_with('#'))
        .map(|&t| original(&ts[t].action))
        .filter(keep)
        .collect();
    Evidence::Lasso { stem, cycle }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckOutcome {
    Holds,
    Violated,
    Unknown,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckOutcome::Holds => "HOLDS",
            CheckOutcome::Violated => "VIOLATED",
            CheckOutcome::Unknown => "UNKNOWN",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub outcome: CheckOutcome,
    /// The product state visited infinitely often, and its lasso.
    pub witness: Option<(String, Evidence)>,
    pub steps_used: u64,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.outcome)?;
        if let Some((state, e)) = &self.witness {
            let v = Verdict::yes(e.clone(), 0);
            let text = v.to_string();
            let lasso = text.split_once('\n').map_or("", |(_, w)| w);
            write!(f, "\naccepting: {state}\n{lasso}")?;
        }
        Ok(())
    }
}

/// Checks `ls` against `bad`, an automaton for the forbidden infinite
/// behaviours: the property holds iff no run of `ls` is accepted by `bad`.
pub fn mc_omega_regular<N: Natural>(
    ls: &LabeledVassz<N>,
    bad: &BuchiAutomaton,
    budget: &mut Budget,
) -> Result<CheckResult, OracleError> {
    let start = budget.used();
    let product = buchi_product(ls, bad)?;
    let sys = product.system.system();
    let mut names: Vec<&str> = product.accepting.iter().map(|&q| sys.states()[q].as_str()).collect();
    names.sort_unstable();
    let mut unknown = false;
    for (k, name) in names.iter().enumerate() {
        let mut sub = budget.sub(budget.remaining() / (names.len() - k) as u64);
        let v = repeated_state(sys, name, &mut sub)?;
        budget.charge(sub.used());
        match v.answer {
            Answer::Yes => {
                return Ok(CheckResult {
                    outcome: CheckOutcome::Violated,
                    witness: v.evidence.map(|e| (name.to_string(), e)),
                    steps_used: budget.used() - start,
                })
            }
            Answer::Unknown => unknown = true,
            Answer::No => {}
        }
    }
    Ok(CheckResult {
        outcome: if unknown {
            CheckOutcome::Unknown
        } else {
            CheckOutcome::Holds
        },
        witness: None,
        steps_used: budget.used() - start,
    })
}
