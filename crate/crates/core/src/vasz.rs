//! Covers of VAS with one zero-test: the filtered tree construction, the
//! cover obtained from it, and the coverability and boundedness queries.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::closed::DownBasis;
use crate::error::AnalysisError;
use crate::filtered::{filtered_member_with, vj_basis};
use crate::karp_miller::{km_tree_bounded, LabeledTree};
use crate::model::{encode_vassz, normalize, normalize_vassz, Vas, Vassz, Vasz};
use crate::omega::{Natural, OmegaError, OmegaNat, OmegaVec};
use crate::oracles::reach::{reduce, Progress, Query};
use crate::oracles::{Answer, Budget, Evidence, OracleError, ReachCache, Refutation, Verdict};

/// How a node of the filtered tree was produced.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Alg1Edge {
    /// Firing the named zero-test.
    ZeroTest(String),
    /// An element of the filtered cover of the parent label.
    Filtered,
}

impl fmt::Display for Alg1Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alg1Edge::ZeroTest(z) => write!(f, "test {z}"),
            Alg1Edge::Filtered => f.write_str("filtered"),
        }
    }
}

pub type Alg1Tree<N> = LabeledTree<N, Alg1Edge>;

/// The filter `(0, ω, …, ω)`.
pub fn zero_filter<N: Natural>(dim: usize) -> OmegaVec<N> {
    let mut f = OmegaVec::omegas(dim);
    f.set(1, OmegaNat::zero());
    f
}

fn exhausted<N: Natural>(budget: &Budget) -> AnalysisError<N> {
    AnalysisError::BudgetExhausted {
        steps: budget.used(),
        partial: None,
    }
}

/// Builds the filtered tree of a normalized system. The tree is returned
/// even when the construction stops early, for diagnostics.
pub fn algorithm1_tree<N: Natural>(
    vz: &Vasz<N>,
    budget: &mut Budget,
) -> (Alg1Tree<N>, Result<DownBasis<N>, AnalysisError<N>>) {
    let mut tree = Alg1Tree::with_root(vz.init().clone());
    if !vz.is_normalized() {
        return (tree, Err(AnalysisError::NotNormalized));
    }
    let stripped = vz.strip_zero_test();
    let f = zero_filter(vz.dim());
    let mut cache = ReachCache::new();
    let mut memo: HashMap<OmegaVec<N>, DownBasis<N>> = HashMap::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(n) = queue.pop_front() {
        if !budget.spend(1) {
            return (tree, Err(exhausted(budget)));
        }
        if !tree.settle(n) {
            continue;
        }
        let x = tree.nodes()[n].label.clone();
        if *x.get(1) == OmegaNat::zero() {
            for z in vz.ztests() {
                if !budget.spend(1) {
                    return (tree, Err(exhausted(budget)));
                }
                if let Some(y) = x.add_delta(&z.delta).expect("dimensions validated") {
                    queue.push_back(tree.push(n, y, Alg1Edge::ZeroTest(z.name.clone())));
                }
            }
        }
        let children = match memo.get(&x) {
            Some(b) => b.clone(),
            None => {
                let from_x = stripped.reinit(x.clone()).expect("same dimension");
                let b = vj_basis(
                    |y, budget| filtered_member_with(&mut cache, &from_x, &f, y, budget),
                    vz.dim(),
                    budget,
                );
                match b {
                    Ok(b) => {
                        memo.insert(x.clone(), b.clone());
                        b
                    }
                    Err(e) => return (tree, Err(e)),
                }
            }
        };
        for b in children.iter() {
            queue.push_back(tree.push(n, b.clone(), Alg1Edge::Filtered));
        }
    }
    let basis = tree.basis();
    (tree, Ok(basis))
}

/// A basis of the filtered cover `Lim ↓_(0,ω,…,ω) Post*(vz)`.
pub fn algorithm1<N: Natural>(vz: &Vasz<N>, budget: &mut Budget) -> Result<DownBasis<N>, AnalysisError<N>> {
    algorithm1_tree(vz, budget).1
}

fn km_budgeted<N: Natural>(v: &Vas<N>, budget: &mut Budget) -> Result<DownBasis<N>, AnalysisError<N>> {
    let cap = usize::try_from(budget.remaining()).unwrap_or(usize::MAX);
    match km_tree_bounded(v, cap) {
        Some(t) => {
            budget.charge(t.len() as u64);
            Ok(t.basis())
        }
        None => {
            budget.charge(budget.remaining());
            Err(exhausted(budget))
        }
    }
}

/// The union of the Karp-Miller covers started from every element of `roots`.
fn covers_from<N: Natural>(
    v: &Vas<N>,
    roots: &DownBasis<N>,
    budget: &mut Budget,
) -> Result<DownBasis<N>, AnalysisError<N>> {
    let mut all = vec![];
    for r in roots.iter() {
        let b = km_budgeted(&v.reinit(r.clone())?, budget)?;
        all.extend(b.iter().cloned());
    }
    Ok(DownBasis::minimize(v.dim(), all)?)
}

/// Zero-tests can only fire when component 1 starts finite.
fn tests_matter<N: Natural>(vz: &Vasz<N>) -> bool {
    !vz.ztests().is_empty() && vz.init().get(1).is_finite()
}

/// Minimal basis of `Cover(vz)`.
pub fn vasz_cover<N: Natural>(vz: &Vasz<N>, budget: &mut Budget) -> Result<DownBasis<N>, AnalysisError<N>> {
    vasz_cover_tree(vz, budget).0
}

/// [`vasz_cover`] together with the filtered tree, when one was built.
/// For a system that is not normalized the tree is that of its normalization.
pub fn vasz_cover_tree<N: Natural>(
    vz: &Vasz<N>,
    budget: &mut Budget,
) -> (Result<DownBasis<N>, AnalysisError<N>>, Option<Alg1Tree<N>>) {
    if !tests_matter(vz) {
        return (km_budgeted(&vz.strip_zero_test(), budget), None);
    }
    if vz.is_normalized() {
        let (tree, roots) = algorithm1_tree(vz, budget);
        let cover = roots.and_then(|r| covers_from(&vz.strip_zero_test(), &r, budget));
        return (cover, Some(tree));
    }
    let normalized = match normalize(vz) {
        Ok(n) => n,
        Err(e) => return (Err(e.into()), None),
    };
    let (cover, tree) = vassz_cover(&normalized, budget);
    let cover = cover.and_then(|c| {
        Ok(DownBasis::minimize(
            vz.dim(),
            c.iter().map(|c| OmegaVec::new(c.entries()[..vz.dim()].to_vec())),
        )?)
    });
    (cover, tree)
}

/// Minimal basis of the cover of a VASS over counters followed by one
/// indicator per state, with the filtered tree when one was built.
pub fn vassz_cover<N: Natural>(
    s: &Vassz<N>,
    budget: &mut Budget,
) -> (Result<DownBasis<N>, AnalysisError<N>>, Option<Alg1Tree<N>>) {
    let visible = s.dim() + s.states().len();
    let cut = |b: &DownBasis<N>| -> Result<DownBasis<N>, AnalysisError<N>> {
        Ok(DownBasis::minimize(
            visible,
            b.iter().map(|c| OmegaVec::new(c.entries()[..visible].to_vec())),
        )?)
    };
    if !tests_matter(s.counters()) {
        let (flat, _) = encode_vassz(s);
        return (km_budgeted(&flat.strip_zero_test(), budget).and_then(|b| cut(&b)), None);
    }
    // Normalization only appends states, so the original indicators stay in place.
    let normalized = match normalize_vassz(s) {
        Ok(n) => n,
        Err(e) => return (Err(e.into()), None),
    };
    let (flat, _) = encode_vassz(&normalized);
    let (tree, roots) = algorithm1_tree(&flat, budget);
    let cover = roots
        .and_then(|r| covers_from(&flat.strip_zero_test(), &r, budget))
        .and_then(|b| cut(&b));
    (cover, Some(tree))
}

/// Searches a word from the initial vector to some vector `≥ x`.
fn covering_word<N: Natural>(vz: &Vasz<N>, x: &OmegaVec<N>, budget: &mut Budget) -> Option<Vec<String>> {
    let (red, reduced) = reduce(vz);
    let target = red.project(x);
    let mut cache = ReachCache::new();
    let engine = cache.engine(&reduced);
    let mut q = Query::search_only(target, vec![true; red.keep.len()]);
    match engine.advance(&mut q, budget, u64::MAX) {
        Progress::Reached(word, _) => Some(word),
        _ => None,
    }
}

fn coverable_with<N: Natural>(
    vz: &Vasz<N>,
    x: &OmegaVec<N>,
    cover: impl FnOnce(&mut Budget) -> Result<DownBasis<N>, AnalysisError<N>>,
    budget: &mut Budget,
) -> Result<Verdict, AnalysisError<N>> {
    let start = budget.used();
    if !x.is_finite() {
        return Err(OracleError::InfiniteTarget(x.to_string()).into());
    }
    // A short search often finds the witness before the cover is needed.
    let mut first = budget.sub(budget.remaining() / 4);
    let early = covering_word(vz, x, &mut first);
    budget.charge(first.used());
    if let Some(w) = early {
        return Ok(Verdict::yes(Evidence::Word(w), budget.used() - start));
    }
    let cover = match cover(budget) {
        Ok(c) => c,
        Err(e) if e.is_budget() => return Ok(Verdict::unknown(budget.used() - start)),
        Err(e) => return Err(e),
    };
    if !cover.contains(x)? {
        return Ok(Verdict::no(Refutation::CoverRefuted, budget.used() - start));
    }
    // The cover guarantees a witness exists; finding it may still run out of budget.
    Ok(match covering_word(vz, x, budget) {
        Some(w) => Verdict::yes(Evidence::Word(w), budget.used() - start),
        None => Verdict::unknown(budget.used() - start),
    })
}

/// Whether some reachable vector is `≥ x`. YES carries a covering word.
pub fn coverable<N: Natural>(vz: &Vasz<N>, x: &OmegaVec<N>, budget: &mut Budget) -> Result<Verdict, AnalysisError<N>> {
    if x.dim() != vz.dim() {
        return Err(OmegaError::DimMismatch {
            left: vz.dim(),
            right: x.dim(),
        }
        .into());
    }
    coverable_with(vz, x, |b| vasz_cover(vz, b), budget)
}

/// Coverability in a VASS of `x` over counters followed by state indicators.
/// The witness word is over the flattened system of [`encode_vassz`].
pub fn coverable_vassz<N: Natural>(
    s: &Vassz<N>,
    x: &OmegaVec<N>,
    budget: &mut Budget,
) -> Result<Verdict, AnalysisError<N>> {
    let (flat, layout) = encode_vassz(s);
    if x.dim() != layout.visible_dim() {
        return Err(OmegaError::DimMismatch {
            left: layout.visible_dim(),
            right: x.dim(),
        }
        .into());
    }
    let mut padded = x.entries().to_vec();
    padded.resize(layout.dim(), OmegaNat::zero());
    coverable_with(
        &flat,
        &OmegaVec::new(padded),
        |b| vassz_cover(s, b).0.map(|c| pad(&c, layout.dim())),
        budget,
    )
}

fn pad<N: Natural>(b: &DownBasis<N>, dim: usize) -> DownBasis<N> {
    DownBasis::minimize(
        dim,
        b.iter().map(|v| {
            let mut e = v.entries().to_vec();
            e.resize(dim, OmegaNat::Omega);
            OmegaVec::new(e)
        }),
    )
    .expect("padding keeps dimensions consistent")
}

/// Whether component `i` is bounded on the reachable set (YES = bounded).
pub fn place_bounded<N: Natural>(vz: &Vasz<N>, i: usize, budget: &mut Budget) -> Result<Verdict, AnalysisError<N>> {
    let start = budget.used();
    if i == 0 || i > vz.dim() {
        return Err(OmegaError::BadPosition { pos: i, dim: vz.dim() }.into());
    }
    Ok(match vasz_cover(vz, budget) {
        Ok(c) => bounded_in(&c, i, budget.used() - start),
        Err(e) if e.is_budget() => Verdict::unknown(budget.used() - start),
        Err(e) => return Err(e),
    })
}

/// Boundedness of component `i` read off a cover basis.
pub fn bounded_in<N: Natural>(cover: &DownBasis<N>, i: usize, steps_used: u64) -> Verdict {
    Verdict {
        answer: if cover.iter().any(|b| b.get(i).is_omega()) {
            Answer::No
        } else {
            Answer::Yes
        },
        evidence: None,
        steps_used,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse::{parse_net, Net};
    use crate::model::Action;
    use std::collections::HashSet;

    type V = OmegaVec<u64>;

    fn v(s: &str) -> V {
        s.parse().unwrap()
    }

    fn basis(dim: usize, elems: &[&str]) -> DownBasis<u64> {
        DownBasis::minimize(dim, elems.iter().map(|e| v(e))).unwrap()
    }

    pub(crate) fn vassz(text: &str) -> Vassz<u64> {
        match parse_net(text).unwrap() {
            Net::Vassz { system, .. } => system,
            _ => panic!("not a VASS"),
        }
    }

    const FIG1_LEFT: &str = "system vass0\ndim 1\nstates p q r\ninit p 0\naction t1 2\naction t2 1\naction t3 -2\nzerotest z 0\ntrans p t1 p\ntrans p t2 q\ntrans q t3 q\ntrans q z r\n";
    const FIG1_RIGHT: &str = "system vass0\ndim 1\nstates p q r\ninit p 0\naction t1 2\naction t2 0\naction t3 -2\nzerotest z 0\ntrans p t1 p\ntrans p t2 q\ntrans q t3 q\ntrans q z r\n";

    #[test]
    fn fig1_covers() {
        let (right, _) = vassz_cover(&vassz(FIG1_RIGHT), &mut Budget::new(1_000_000));
        assert_eq!(right.unwrap(), basis(4, &["w,1,0,0", "w,0,1,0", "0,0,0,1"]));
        let (left, _) = vassz_cover(&vassz(FIG1_LEFT), &mut Budget::new(1_000_000));
        let left = left.unwrap();
        assert_eq!(left, basis(4, &["w,1,0,0", "w,0,1,0"]));
    }

    #[test]
    fn fig1_filtered_roots() {
        let (flat, layout) = encode_vassz(&vassz(FIG1_RIGHT));
        let r = algorithm1(&flat, &mut Budget::new(1_000_000)).unwrap();
        assert_eq!(layout.project_basis(&r), basis(4, &["0,1,0,0", "0,0,1,0", "0,0,0,1"]));
        let (flat, layout) = encode_vassz(&vassz(FIG1_LEFT));
        let r = algorithm1(&flat, &mut Budget::new(1_000_000)).unwrap();
        let r = layout.project_basis(&r);
        assert!(r.iter().all(|b| *b.get(4) == OmegaNat::zero()), "{r}");
        assert!(r.contains(&v("0,1,0,0")).unwrap());
    }

    #[test]
    fn coverability() {
        let mut b = Budget::new(1_000_000);
        let s = vassz(FIG1_RIGHT);
        let r = coverable_vassz(&s, &v("0,0,0,1"), &mut b).unwrap();
        assert_eq!(r.answer, Answer::Yes);
        let (flat, _) = encode_vassz(&s);
        let reached = flat.fire_word(flat.init(), r.word().unwrap()).unwrap().unwrap();
        assert_eq!(*reached.get(4), OmegaNat::Fin(1));
        let r = coverable_vassz(&vassz(FIG1_LEFT), &v("0,0,0,1"), &mut Budget::new(1_000_000)).unwrap();
        assert_eq!(r.answer, Answer::No);
        let r = coverable_vassz(&s, &v("0,0,0,0"), &mut Budget::new(1_000)).unwrap();
        assert_eq!(r.answer, Answer::Yes);
    }

    #[test]
    fn boundedness() {
        let (flat, _) = encode_vassz(&vassz(FIG1_RIGHT));
        let mut b = Budget::new(1_000_000);
        assert_eq!(place_bounded(&flat, 1, &mut b).unwrap().answer, Answer::No);
        assert_eq!(place_bounded(&flat, 4, &mut b).unwrap().answer, Answer::Yes);
        assert!(place_bounded(&flat, 9, &mut b).is_err());
        let down = Vasz::new(
            Vas::new(v("0"), vec![Action::new("a", vec![-1])]).unwrap(),
            vec![Action::new("z", vec![0])],
        )
        .unwrap();
        assert_eq!(place_bounded(&down, 1, &mut b).unwrap().answer, Answer::Yes);
    }

    #[test]
    fn dead_tests_give_the_plain_filtered_cover() {
        // Component 1 only grows, so the zero-test fires from the root alone.
        let base = Vas::new(v("0,0"), vec![Action::new("a", vec![1, 1])]).unwrap();
        let vz = Vasz::new(base.clone(), vec![Action::new("z", vec![0, 0])]).unwrap();
        let r = algorithm1(&vz, &mut Budget::new(100_000)).unwrap();
        assert_eq!(r, basis(2, &["0,0"]));
        assert_eq!(vasz_cover(&vz, &mut Budget::new(100_000)).unwrap(), basis(2, &["w,w"]));
    }

    #[test]
    fn unnormalized_systems() {
        // Starts at 2 on the tested component; the test adds 1 to it.
        let base = Vas::new(v("2,0"), vec![Action::new("a", vec![-1, 1])]).unwrap();
        let vz = Vasz::new(base, vec![Action::new("z", vec![1, 0])]).unwrap();
        assert!(matches!(
            algorithm1(&vz, &mut Budget::new(10)),
            Err(AnalysisError::NotNormalized)
        ));
        let got = vasz_cover(&vz, &mut Budget::new(1_000_000)).unwrap();
        assert_eq!(got, basis(2, &["2,0", "1,w"]));
        assert!(brute_cover(&vz, 30).iter().all(|x| got.contains(x).unwrap()));
    }

    /// Everything reachable within `depth` steps.
    fn brute_cover(vz: &Vasz<u64>, depth: usize) -> DownBasis<u64> {
        let mut seen = HashSet::from([vz.init().clone()]);
        let mut layer = vec![vz.init().clone()];
        for _ in 0..depth {
            let mut next = vec![];
            for x in &layer {
                for (a, _) in vz.all_actions() {
                    if let Some(y) = vz.fire(x, &a.name).unwrap() {
                        if seen.insert(y.clone()) {
                            next.push(y);
                        }
                    }
                }
            }
            layer = next;
        }
        DownBasis::minimize(vz.dim(), seen).unwrap()
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let (flat, _) = encode_vassz(&vassz(FIG1_RIGHT));
        let (tree, r) = algorithm1_tree(&flat, &mut Budget::new(5));
        assert!(r.unwrap_err().is_budget());
        assert!(!tree.is_empty());
        let r = coverable(&flat, &v("0,0,0,1,0,0"), &mut Budget::new(3)).unwrap();
        assert_eq!(r.answer, Answer::Unknown);
    }
}
