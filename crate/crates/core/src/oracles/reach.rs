//! Reachability queries: refutation by cover and state equation, and
//! breadth-first search for witnesses.
//!
//! Before searching, a system is reduced: components whose initial value is
//! ω are dropped (they stay ω forever), no-op actions are dropped, and pure
//! unit decrements `-e_i` are absorbed. A decrement commutes to the end of
//! any run, so reaching `t` with decrements available is the same as reaching
//! some `x` with `x(i) ≥ t(i)` on those components, finished by `x(i) - t(i)`
//! decrements. Zero-tests look at component 1, so its decrements are only
//! absorbed when the system has no zero-test.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::ilp::{integer_feasible, Feasibility, Relation, Row};
use super::{Budget, Evidence, OracleError, Refutation, Verdict};
use crate::closed::DownBasis;
use crate::karp_miller::km_tree_bounded;
use crate::model::{Action, Vas, Vasz};
use crate::omega::{Natural, OmegaNat, OmegaVec};

/// Node cap for the Karp-Miller cover used as a refutation.
const COVER_NODE_CAP: u64 = 20_000;
/// Region cap for the backward search; beyond it the search gives up.
const BACKWARD_CAP: usize = 4_096;
/// Branch-and-bound node cap for the state equation.
const ILP_NODE_CAP: usize = 64;

pub(crate) fn to_bigint<N: Natural>(n: &N) -> BigInt {
    match n.to_u64() {
        Some(v) => BigInt::from(v),
        None => n.to_string().parse().expect("naturals print as decimal integers"),
    }
}

/// How an original system maps onto its reduced form.
#[derive(Debug, Clone)]
pub(crate) struct Reduction {
    /// Original 1-based components kept, in order.
    pub keep: Vec<usize>,
    /// Per kept component: the absorbed decrement, if any.
    pub lower: Vec<Option<String>>,
}

impl Reduction {
    pub fn project<N: Natural>(&self, x: &OmegaVec<N>) -> OmegaVec<N> {
        OmegaVec::new(self.keep.iter().map(|&i| x.get(i).clone()).collect())
    }

    pub fn lower_mask(&self) -> Vec<bool> {
        self.lower.iter().map(Option::is_some).collect()
    }

    /// The decrements turning reduced state `s` into `target` on lower components.
    pub fn trailing_decrements<N: Natural>(&self, s: &OmegaVec<N>, target: &OmegaVec<N>) -> Vec<String> {
        let mut out = vec![];
        for (k, name) in self.lower.iter().enumerate() {
            if let Some(name) = name {
                let gap = to_bigint(s.get(k + 1).finite().expect("reduced states are finite"))
                    - to_bigint(target.get(k + 1).finite().expect("targets are finite"));
                let gap = gap.to_usize().expect("matching states dominate the target");
                out.extend(std::iter::repeat_n(name.clone(), gap));
            }
        }
        out
    }
}

fn is_unit_decrement(delta: &[i64]) -> Option<usize> {
    let mut hit = None;
    for (k, &d) in delta.iter().enumerate() {
        match d {
            0 => {}
            -1 if hit.is_none() => hit = Some(k),
            _ => return None,
        }
    }
    hit
}

pub(crate) fn reduce<N: Natural>(sys: &Vasz<N>) -> (Reduction, Vasz<N>) {
    let dim = sys.dim();
    let init = sys.init();
    let keep: Vec<usize> = (1..=dim).filter(|&i| init.get(i).is_finite()).collect();
    let proj = |d: &[i64]| -> Vec<i64> { keep.iter().map(|&i| d[i - 1]).collect() };
    // An ω first component never reads 0, so the zero-tests are dead.
    let tests_live = init.get(1).is_finite() && !sys.ztests().is_empty();
    let mut lower: Vec<Option<String>> = vec![None; keep.len()];
    let mut actions = vec![];
    for a in sys.base().actions() {
        let d = proj(&a.delta);
        if d.iter().all(|&c| c == 0) {
            continue;
        }
        if let Some(k) = is_unit_decrement(&d) {
            if !(tests_live && keep[k] == 1) {
                lower[k].get_or_insert_with(|| a.name.clone());
                continue;
            }
        }
        actions.push(Action::new(a.name.clone(), d));
    }
    let ztests: Vec<Action> = if tests_live {
        sys.ztests()
            .iter()
            .map(|z| Action::new(z.name.clone(), proj(&z.delta)))
            .collect()
    } else {
        vec![]
    };
    let reduced_init = OmegaVec::new(keep.iter().map(|&i| init.get(i).clone()).collect());
    let base = Vas::new(reduced_init, actions).expect("a projection keeps names distinct");
    let vz = Vasz::new(base, ztests).expect("a projection keeps names distinct");
    (Reduction { keep, lower }, vz)
}

/// Breadth-first exploration state, kept across queries on the same system.
#[derive(Debug)]
struct Explorer<N> {
    states: Vec<OmegaVec<N>>,
    parent: Vec<Option<(usize, usize)>>,
    index: HashMap<OmegaVec<N>, usize>,
    frontier: usize,
}

impl<N: Natural> Explorer<N> {
    fn new(init: OmegaVec<N>) -> Self {
        Explorer {
            index: HashMap::from([(init.clone(), 0)]),
            states: vec![init],
            parent: vec![None],
            frontier: 0,
        }
    }

    fn exhausted(&self) -> bool {
        self.frontier == self.states.len()
    }

    fn expand_one(&mut self, actions: &[(Action, bool)]) {
        let x = self.states[self.frontier].clone();
        let zero = *x.get(1) == OmegaNat::zero();
        for (k, (a, test)) in actions.iter().enumerate() {
            if *test && !zero {
                continue;
            }
            if let Some(y) = x.add_delta(&a.delta).expect("dimensions validated") {
                if !self.index.contains_key(&y) {
                    self.index.insert(y.clone(), self.states.len());
                    self.states.push(y);
                    self.parent.push(Some((self.frontier, k)));
                }
            }
        }
        self.frontier += 1;
    }

    fn word(&self, mut n: usize, actions: &[(Action, bool)]) -> Vec<String> {
        let mut out = vec![];
        while let Some((p, k)) = self.parent[n] {
            out.push(actions[k].0.name.clone());
            n = p;
        }
        out.reverse();
        out
    }
}

fn matches<N: Natural>(s: &OmegaVec<N>, t: &OmegaVec<N>, lower: &[bool]) -> bool {
    s.iter()
        .zip(t.iter())
        .zip(lower)
        .all(|((a, b), &lo)| if lo { a >= b } else { a == b })
}

/// A set `{x : x(i) = v(i) on exact components, x(i) ≥ v(i) elsewhere}`.
#[derive(Debug, Clone)]
struct Region {
    vals: Vec<i128>,
    exact: Vec<bool>,
    /// The region this one steps into, and the action doing it.
    next: Option<(usize, usize)>,
}

impl Region {
    fn contains(&self, x: &[i128]) -> bool {
        self.vals
            .iter()
            .zip(&self.exact)
            .zip(x)
            .all(|((v, &e), x)| if e { x == v } else { x >= v })
    }

    /// Whether every vector of `other` lies in `self`.
    fn includes(&self, other: &Region) -> bool {
        (0..self.vals.len()).all(|i| {
            if self.exact[i] {
                other.exact[i] && other.vals[i] == self.vals[i]
            } else {
                other.vals[i] >= self.vals[i]
            }
        })
    }

    /// The vectors from which `delta` fires into this region.
    fn pre(&self, delta: &[i64], test: bool) -> Option<(Vec<i128>, Vec<bool>)> {
        let mut vals = Vec::with_capacity(self.vals.len());
        let mut exact = self.exact.clone();
        for (i, (&v, &d)) in self.vals.iter().zip(delta).enumerate() {
            let raw = v - i128::from(d);
            if self.exact[i] {
                if raw < 0 {
                    return None;
                }
                vals.push(raw);
            } else {
                vals.push(raw.max(0));
            }
            if test && i == 0 {
                if raw > 0 || (self.exact[0] && raw != 0) {
                    return None;
                }
                vals[0] = 0;
                exact[0] = true;
            }
        }
        Some((vals, exact))
    }
}

enum BackStep {
    Working,
    Done,
    Hit(Vec<String>),
}

/// Backward search over regions, pruned by the cover. Predecessors of a
/// region are again regions, so when the search runs out without meeting
/// the initial vector, the target is unreachable.
#[derive(Debug, Clone)]
struct Backward {
    regions: Vec<Region>,
    next: usize,
    /// Cover elements, `None` standing for ω. Empty when no cover is known.
    cover: Option<Vec<Vec<Option<i128>>>>,
    disabled: bool,
}

fn to_i128<N: Natural>(n: &N) -> Option<i128> {
    to_bigint(n).to_i128()
}

impl Backward {
    fn new<N: Natural>(target: &OmegaVec<N>, lower: &[bool], cover: Option<&DownBasis<N>>) -> Self {
        let vals: Option<Vec<i128>> = target.iter().map(|e| e.finite().and_then(to_i128)).collect();
        let cover = cover.and_then(|c| {
            c.iter()
                .map(|b| {
                    b.iter()
                        .map(|e| match e {
                            OmegaNat::Omega => Some(None),
                            OmegaNat::Fin(n) => to_i128(n).map(Some),
                        })
                        .collect::<Option<Vec<_>>>()
                })
                .collect::<Option<Vec<_>>>()
        });
        match vals {
            Some(vals) => Backward {
                regions: vec![Region {
                    vals,
                    exact: lower.iter().map(|l| !l).collect(),
                    next: None,
                }],
                next: 0,
                cover,
                disabled: false,
            },
            None => Backward {
                regions: vec![],
                next: 0,
                cover: None,
                disabled: true,
            },
        }
    }

    fn coverable(&self, vals: &[i128]) -> bool {
        match &self.cover {
            None => true,
            Some(c) => c
                .iter()
                .any(|b| b.iter().zip(vals).all(|(b, v)| b.is_none_or(|b| *v <= b))),
        }
    }

    fn word(&self, mut n: usize, actions: &[(Action, bool)]) -> Vec<String> {
        let mut out = vec![];
        while let Some((m, k)) = self.regions[n].next {
            out.push(actions[k].0.name.clone());
            n = m;
        }
        out
    }

    fn step<N: Natural>(&mut self, actions: &[(Action, bool)], init: &OmegaVec<N>) -> BackStep {
        if self.disabled {
            return BackStep::Working;
        }
        let Some(init) = init
            .iter()
            .map(|e| e.finite().and_then(to_i128))
            .collect::<Option<Vec<_>>>()
        else {
            self.disabled = true;
            return BackStep::Working;
        };
        if self.next == 0 && self.regions[0].contains(&init) {
            return BackStep::Hit(vec![]);
        }
        if self.next == self.regions.len() {
            return BackStep::Done;
        }
        if self.regions.len() > BACKWARD_CAP {
            self.disabled = true;
            return BackStep::Working;
        }
        let n = self.next;
        self.next += 1;
        for (k, (a, test)) in actions.iter().enumerate() {
            let Some((vals, exact)) = self.regions[n].pre(&a.delta, *test) else {
                continue;
            };
            if !self.coverable(&vals) {
                continue;
            }
            let r = Region {
                vals,
                exact,
                next: Some((n, k)),
            };
            if self.regions.iter().any(|s| s.includes(&r)) {
                continue;
            }
            let hit = r.contains(&init);
            self.regions.push(r);
            if hit {
                return BackStep::Hit(self.word(self.regions.len() - 1, actions));
            }
        }
        BackStep::Working
    }
}

/// Cached analysis of one reduced system.
#[derive(Debug)]
pub(crate) struct Engine<N> {
    actions: Vec<(Action, bool)>,
    init: OmegaVec<N>,
    explorer: Explorer<N>,
    /// `None` until computed; `Some(None)` when the tree was too large.
    cover: Option<Option<DownBasis<N>>>,
    /// Per action: whether some cover element enables it. All true until
    /// the cover is known.
    live: Vec<bool>,
}

/// Outcome of advancing a query.
pub(crate) enum Progress<N> {
    /// A witness word and the state it ends in.
    Reached(Vec<String>, OmegaVec<N>),
    Refuted(Refutation),
    Pending,
}

/// Resumable query state.
#[derive(Debug, Clone)]
pub(crate) struct Query<N> {
    pub target: OmegaVec<N>,
    pub lower: Vec<bool>,
    stage: u8,
    scanned: usize,
    backward: Option<Backward>,
}

impl<N: Natural> Query<N> {
    pub fn new(target: OmegaVec<N>, lower: Vec<bool>) -> Self {
        Query {
            target,
            lower,
            stage: 0,
            scanned: 0,
            backward: None,
        }
    }

    /// A query that skips the refutations and only explores.
    pub fn search_only(target: OmegaVec<N>, lower: Vec<bool>) -> Self {
        Query {
            stage: 2,
            ..Query::new(target, lower)
        }
    }
}

impl<N: Natural> Engine<N> {
    fn new(sys: &Vasz<N>) -> Self {
        Engine {
            actions: sys.all_actions().map(|(a, t)| (a.clone(), t)).collect(),
            init: sys.init().clone(),
            explorer: Explorer::new(sys.init().clone()),
            cover: None,
            live: vec![true; sys.all_actions().count()],
        }
    }

    fn fire(&self, word: &[String]) -> OmegaVec<N> {
        let mut x = self.init.clone();
        for name in word {
            let (a, _) = self.actions.iter().find(|(a, _)| &a.name == name).expect("own action");
            x = x
                .add_delta(&a.delta)
                .expect("dimensions validated")
                .expect("witness words fire");
        }
        x
    }

    /// Cover of the system with zero-tests relaxed to ordinary actions.
    pub fn cover(&mut self, budget: &mut Budget) -> Option<&DownBasis<N>> {
        if self.cover.is_none() {
            let relaxed = Vas::new(self.init.clone(), self.actions.iter().map(|(a, _)| a.clone()).collect())
                .expect("names are distinct");
            let cap = budget.remaining().min(COVER_NODE_CAP);
            let tree = km_tree_bounded(&relaxed, cap as usize);
            match tree {
                Some(t) => {
                    budget.charge(t.len() as u64);
                    let basis = t.basis();
                    self.live = self
                        .actions
                        .iter()
                        .map(|(a, _)| basis.iter().any(|b| b.add_delta(&a.delta).ok().flatten().is_some()))
                        .collect();
                    self.cover = Some(Some(basis));
                }
                None => {
                    budget.charge(cap);
                    if cap < COVER_NODE_CAP {
                        // Too little budget to decide; try again on a later query.
                        return None;
                    }
                    self.cover = Some(None);
                }
            }
        }
        self.cover.as_ref().and_then(Option::as_ref)
    }

    /// Whether some nonnegative integer combination of the displacements
    /// takes the initial vector to `target` (with `≥` on lower components).
    /// Actions that no cover element enables are left out.
    pub fn state_equation(&self, target: &OmegaVec<N>, lower: &[bool]) -> Feasibility {
        let dim = self.init.dim();
        let live: Vec<&Action> = self
            .actions
            .iter()
            .zip(&self.live)
            .filter(|(_, &l)| l)
            .map(|((a, _), _)| a)
            .collect();
        let rows: Vec<Row> = (0..dim)
            .map(|i| {
                let rhs = to_bigint(target.entries()[i].finite().expect("finite target"))
                    - to_bigint(self.init.entries()[i].finite().expect("reduced init is finite"));
                Row {
                    coeffs: live.iter().map(|a| BigInt::from(a.delta[i])).collect(),
                    rel: if lower[i] { Relation::Ge } else { Relation::Eq },
                    rhs,
                }
            })
            .collect();
        integer_feasible(&rows, live.len(), ILP_NODE_CAP)
    }

    /// Runs the refutations once, then explores for at most `quantum` steps.
    pub fn advance(&mut self, q: &mut Query<N>, budget: &mut Budget, quantum: u64) -> Progress<N> {
        if q.stage == 0 {
            if !budget.spend(1) {
                return Progress::Pending;
            }
            if let Some(cover) = self.cover(budget) {
                if !cover.iter().any(|b| q.target.leq_unchecked(b)) {
                    return Progress::Refuted(Refutation::CoverRefuted);
                }
            }
            q.stage = 1;
        }
        if q.stage == 1 {
            if !budget.spend(1) {
                return Progress::Pending;
            }
            if self.state_equation(&q.target, &q.lower) == Feasibility::Infeasible {
                return Progress::Refuted(Refutation::StateEquationRefuted);
            }
            q.stage = 2;
        }
        if q.backward.is_none() {
            let cover = self.cover(budget).cloned();
            q.backward = Some(Backward::new(&q.target, &q.lower, cover.as_ref()));
        }
        let mut spent = 0;
        loop {
            let ex = &self.explorer;
            while q.scanned < ex.states.len() {
                let n = q.scanned;
                q.scanned += 1;
                if matches(&ex.states[n], &q.target, &q.lower) {
                    return Progress::Reached(ex.word(n, &self.actions), ex.states[n].clone());
                }
            }
            if ex.exhausted() {
                return Progress::Refuted(Refutation::ExhaustedFiniteSpace);
            }
            if spent >= quantum || !budget.spend(1) {
                return Progress::Pending;
            }
            spent += 1;
            let back = q.backward.as_mut().expect("created above");
            match back.step(&self.actions, &self.init) {
                BackStep::Working => {}
                BackStep::Done => return Progress::Refuted(Refutation::BackwardExhausted),
                BackStep::Hit(word) => {
                    let end = self.fire(&word);
                    return Progress::Reached(word, end);
                }
            }
            if spent >= quantum || !budget.spend(1) {
                return Progress::Pending;
            }
            spent += 1;
            self.explorer.expand_one(&self.actions);
        }
    }
}

/// Engines shared by every query on the same reduced system.
#[derive(Debug, Default)]
pub struct ReachCache<N: Natural> {
    engines: HashMap<Vasz<N>, Engine<N>>,
}

impl<N: Natural> ReachCache<N> {
    pub fn new() -> Self {
        ReachCache {
            engines: HashMap::new(),
        }
    }

    pub(crate) fn engine(&mut self, reduced: &Vasz<N>) -> &mut Engine<N> {
        self.engines
            .entry(reduced.clone())
            .or_insert_with(|| Engine::new(reduced))
    }

    /// Decides whether `target` is reachable in `sys`.
    pub fn reach(&mut self, sys: &Vasz<N>, target: &OmegaVec<N>, budget: &mut Budget) -> Result<Verdict, OracleError> {
        let start = budget.used();
        check_target(sys.dim(), target)?;
        if !sys.init().is_finite() {
            return Ok(Verdict::no(Refutation::FrozenComponent, budget.used() - start));
        }
        let (red, reduced) = reduce(sys);
        let t = red.project(target);
        let mut q = Query::new(t.clone(), red.lower_mask());
        let engine = self.engine(&reduced);
        Ok(match engine.advance(&mut q, budget, u64::MAX) {
            Progress::Reached(mut word, end) => {
                word.extend(red.trailing_decrements(&end, &t));
                Verdict::yes(Evidence::Word(word), budget.used() - start)
            }
            Progress::Refuted(r) => Verdict::no(r, budget.used() - start),
            Progress::Pending => Verdict::unknown(budget.used() - start),
        })
    }
}

pub(crate) fn check_target<N: Natural>(dim: usize, target: &OmegaVec<N>) -> Result<(), OracleError> {
    if target.dim() != dim {
        return Err(crate::omega::OmegaError::DimMismatch {
            left: dim,
            right: target.dim(),
        }
        .into());
    }
    if !target.is_finite() {
        return Err(OracleError::InfiniteTarget(target.to_string()));
    }
    Ok(())
}

/// Reachability in a plain VAS.
pub fn reach_decide_vas<N: Natural>(
    v: &Vas<N>,
    target: &OmegaVec<N>,
    budget: &mut Budget,
) -> Result<Verdict, OracleError> {
    ReachCache::new().reach(&Vasz::without_test(v.clone()), target, budget)
}

/// Reachability in a VAS with zero-test. When the search is inconclusive and
/// the system is normalized, the zero-test cover is tried as a refutation.
pub fn reach_decide<N: Natural>(
    vz: &Vasz<N>,
    target: &OmegaVec<N>,
    budget: &mut Budget,
) -> Result<Verdict, OracleError> {
    let start = budget.used();
    let remaining = budget.remaining();
    let mut first = budget.sub(remaining - remaining / 4);
    let verdict = ReachCache::new().reach(vz, target, &mut first)?;
    budget.charge(first.used());
    if verdict.is_definitive() || vz.ztests().is_empty() || !vz.is_normalized() {
        return Ok(Verdict {
            steps_used: budget.used() - start,
            ..verdict
        });
    }
    let mut rest = budget.sub(budget.remaining());
    let cover = crate::vasz::vasz_cover(vz, &mut rest);
    budget.charge(rest.used());
    if let Ok(cover) = cover {
        if !cover.iter().any(|b| target.leq_unchecked(b)) {
            return Ok(Verdict::no(Refutation::CoverRefuted, budget.used() - start));
        }
    }
    Ok(Verdict::unknown(budget.used() - start))
}
