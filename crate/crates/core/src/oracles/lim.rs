//! Membership in `Lim Post*(V)` for a plain VAS.
//!
//! Two semi-deciders share the budget in rounds of [`QUANTUM`] steps. The
//! YES side enumerates productive candidates of the reduced system; the NO
//! side looks for a refutation of some `y_ℓ` (the query vector with every ω
//! replaced by `ℓ`, approached from above by decrements).

use super::ilp::Feasibility;
use super::productive::{productive_check, EnumStep, ProductiveCandidate, ProductiveEnumerator};
use super::reach::{reduce, Engine, Progress, Query, ReachCache, Reduction};
use super::{Budget, Evidence, OracleError, Refutation, Verdict};
use crate::model::{Vas, Vasz};
use crate::omega::{Natural, OmegaError, OmegaNat, OmegaVec};

/// Steps granted to each side per round.
pub const QUANTUM: u64 = 64;
/// The state equation is tried for `ℓ = 0, 1, 2, 4, …` up to this value.
const MAX_PROBE: u64 = 1 << 20;

/// Decides `x ∈ Lim Post*(v)`.
pub fn lim_member<N: Natural>(v: &Vas<N>, x: &OmegaVec<N>, budget: &mut Budget) -> Result<Verdict, OracleError> {
    lim_member_with(&mut ReachCache::new(), v, x, budget)
}

/// [`lim_member`] sharing explored state with other queries through `cache`.
pub fn lim_member_with<N: Natural>(
    cache: &mut ReachCache<N>,
    v: &Vas<N>,
    x: &OmegaVec<N>,
    budget: &mut Budget,
) -> Result<Verdict, OracleError> {
    let start = budget.used();
    if x.dim() != v.dim() {
        return Err(OmegaError::DimMismatch {
            left: v.dim(),
            right: x.dim(),
        }
        .into());
    }
    let frozen: Vec<usize> = (1..=v.dim()).filter(|&i| v.init().get(i).is_omega()).collect();
    if frozen.iter().any(|&i| x.get(i).is_finite()) {
        return Ok(Verdict::no(Refutation::FrozenComponent, budget.used() - start));
    }
    if frozen.len() == v.dim() {
        let trivial = ProductiveCandidate {
            pi: vec![vec![]],
            v: vec![],
        };
        return Ok(Verdict::yes(Evidence::Productive(trivial), budget.used() - start));
    }
    let sys = Vasz::without_test(v.clone());
    if x.is_finite() {
        return cache.reach(&sys, x, budget);
    }
    let (red, reduced) = reduce(&sys);
    let target = red.project(x);
    let mut yes = ProductiveEnumerator::new(reduced.base(), None);
    let mut no = NoSide::new(&red, &target);
    let engine = cache.engine(&reduced);
    loop {
        for _ in 0..QUANTUM {
            if !budget.spend(1) {
                return Ok(Verdict::unknown(budget.used() - start));
            }
            if let EnumStep::Found(c, limit) = yes.step() {
                if let Some(w) = lift(v, reduced.base(), &red, &target, &c, &limit) {
                    return Ok(Verdict::yes(Evidence::Productive(w), budget.used() - start));
                }
            }
        }
        if let Some(r) = no.advance(engine, budget) {
            return Ok(Verdict::no(r, budget.used() - start));
        }
        if budget.is_exhausted() {
            return Ok(Verdict::unknown(budget.used() - start));
        }
    }
}

/// Turns a reduced candidate whose limit matches `target` into a candidate
/// of `v` whose limit is exactly the query vector, or `None` if it does not match.
///
/// On a component with an absorbed decrement `d`, a finite limit above the
/// target is lowered by trailing `d`s; a pumped component is brought back
/// to a finite value by appending `d^T` to the last segment, `T` being the
/// pumped total there.
fn lift<N: Natural>(
    v: &Vas<N>,
    reduced: &Vas<N>,
    red: &Reduction,
    target: &OmegaVec<N>,
    c: &ProductiveCandidate,
    limit: &OmegaVec<N>,
) -> Option<ProductiveCandidate> {
    let dim = reduced.dim();
    let mut pumped = vec![0i64; dim];
    for name in c.pi.iter().flatten() {
        for (s, d) in pumped.iter_mut().zip(&reduced.action(name)?.delta) {
            *s += d;
        }
    }
    let mut out = c.clone();
    let mut tail: Vec<String> = vec![];
    for i in 0..dim {
        let (l, t) = (&limit.entries()[i], &target.entries()[i]);
        let Some(dec) = &red.lower[i] else {
            if l != t {
                return None;
            }
            continue;
        };
        match (l, t) {
            (OmegaNat::Omega, OmegaNat::Omega) => {}
            (_, OmegaNat::Omega) => return None,
            (OmegaNat::Fin(a), OmegaNat::Fin(b)) => {
                let gap = super::reach::to_bigint(a) - super::reach::to_bigint(b);
                tail.extend(std::iter::repeat_n(dec.clone(), usize::try_from(gap).ok()?));
            }
            (OmegaNat::Omega, OmegaNat::Fin(b)) => {
                // Value after the step word alone, without any pumping.
                let step: i64 = c.v.iter().map(|n| reduced.action(n).map_or(0, |a| a.delta[i])).sum();
                let init = super::reach::to_bigint(reduced.init().entries()[i].finite()?);
                let gap = init + step - super::reach::to_bigint(b);
                let gap = usize::try_from(gap).ok()?;
                let total = usize::try_from(pumped[i]).ok()?;
                out.pi.last_mut()?.extend(std::iter::repeat_n(dec.clone(), total));
                tail.extend(std::iter::repeat_n(dec.clone(), gap));
            }
        }
    }
    for d in tail {
        out.v.push(d);
        out.pi.push(vec![]);
    }
    debug_assert!(productive_check(v, &out).unwrap_or(false));
    Some(out)
}

/// The NO side: cover check on the query itself, state equation for growing
/// `ℓ`, then exploration until the reachable set runs out.
struct NoSide<N> {
    target: OmegaVec<N>,
    lower: Vec<bool>,
    stage: u8,
    probe: u64,
    search: Option<Query<N>>,
}

impl<N: Natural> NoSide<N> {
    fn new(red: &Reduction, target: &OmegaVec<N>) -> Self {
        let lower = red
            .lower
            .iter()
            .zip(target.iter())
            .map(|(d, t)| d.is_some() || t.is_omega())
            .collect();
        NoSide {
            target: target.clone(),
            lower,
            stage: 0,
            probe: 0,
            search: None,
        }
    }

    fn at(&self, l: u64) -> OmegaVec<N> {
        OmegaVec::new(
            self.target
                .iter()
                .map(|e| if e.is_omega() { OmegaNat::from_u64(l) } else { e.clone() })
                .collect(),
        )
    }

    fn advance(&mut self, engine: &mut Engine<N>, budget: &mut Budget) -> Option<Refutation> {
        let mut left = QUANTUM;
        if self.stage == 0 {
            if !budget.spend(1) {
                return None;
            }
            left -= 1;
            if let Some(cover) = engine.cover(budget) {
                if !cover.iter().any(|b| self.target.leq_unchecked(b)) {
                    return Some(Refutation::CoverRefuted);
                }
            }
            self.stage = 1;
        }
        while self.stage == 1 && left > 0 {
            if !budget.spend(1) {
                return None;
            }
            left -= 1;
            if engine.state_equation(&self.at(self.probe), &self.lower) == Feasibility::Infeasible {
                return Some(Refutation::StateEquationRefuted);
            }
            self.probe = if self.probe == 0 { 1 } else { self.probe * 2 };
            if self.probe > MAX_PROBE {
                self.stage = 2;
                self.probe = 0;
            }
        }
        if self.stage == 2 && left > 0 {
            if self.search.is_none() {
                self.search = Some(Query::search_only(self.at(0), self.lower.clone()));
            }
            let q = self.search.as_mut().expect("just set");
            match engine.advance(q, budget, left) {
                Progress::Refuted(r) => return Some(r),
                Progress::Reached(..) => {
                    // y_ℓ is reachable; move on to ℓ + 1, keeping the explored states.
                    self.probe += 1;
                    self.search = Some(Query::search_only(self.at(self.probe), self.lower.clone()));
                }
                Progress::Pending => {}
            }
        }
        None
    }
}
