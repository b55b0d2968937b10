//! Filtered covers: membership in `↓_f Lim Post*(V)` and the Valk-Jantzen
//! style driver that turns a membership oracle into a finite basis.

use std::collections::HashMap;

use crate::closed::{DownBasis, UpBasis};
use crate::error::AnalysisError;
use crate::model::{build_vas_p, Action, Vas};
use crate::omega::{Natural, OmegaError, OmegaNat, OmegaVec, PositionSet};
use crate::oracles::{lim_member_with, Answer, Budget, Evidence, ProductiveCandidate, ReachCache, Refutation, Verdict};

/// Finite entries pin exact values; ω entries are unconstrained.
pub type Filter<N> = OmegaVec<N>;

fn same_dim(left: usize, right: usize) -> Result<(), OmegaError> {
    if left == right {
        Ok(())
    } else {
        Err(OmegaError::DimMismatch { left, right })
    }
}

/// `f(i) = y(i)` on `positions`, ω elsewhere.
pub fn translate_p_to_f<N: Natural>(positions: &PositionSet, y: &OmegaVec<N>) -> Result<Filter<N>, OmegaError> {
    same_dim(positions.dim(), y.dim())?;
    Ok(OmegaVec::new(
        (1..=y.dim())
            .map(|i| {
                if positions.contains(i) {
                    y.get(i).clone()
                } else {
                    OmegaNat::Omega
                }
            })
            .collect(),
    ))
}

/// The position set `{i : f(i) < ω}` and the vector taking `f` there and
/// `y` elsewhere, or `None` when `y ≰ f`.
pub fn translate_f_to_p<N: Natural>(
    f: &Filter<N>,
    y: &OmegaVec<N>,
) -> Result<Option<(PositionSet, OmegaVec<N>)>, OmegaError> {
    if !y.leq(f)? {
        return Ok(None);
    }
    let positions = PositionSet::new(f.dim(), (1..=f.dim()).filter(|&i| f.get(i).is_finite()))?;
    let z = OmegaVec::new(
        (1..=f.dim())
            .map(|i| {
                if f.get(i).is_finite() {
                    f.get(i).clone()
                } else {
                    y.get(i).clone()
                }
            })
            .collect(),
    );
    Ok(Some((positions, z)))
}

/// Decides `y ∈ ↓_f Lim Post*(v)`.
pub fn filtered_member<N: Natural>(
    v: &Vas<N>,
    f: &Filter<N>,
    y: &OmegaVec<N>,
    budget: &mut Budget,
) -> Result<Verdict, AnalysisError<N>> {
    filtered_member_with(&mut ReachCache::new(), v, f, y, budget)
}

/// Components whose initial value is ω stay ω in every reachable vector:
/// a filter pinning one of them can never match, and otherwise they
/// dominate anything, so they are dropped before the query.
fn drop_frozen<N: Natural>(v: &Vas<N>, f: &Filter<N>, y: &OmegaVec<N>) -> Option<(Vas<N>, Filter<N>, OmegaVec<N>)> {
    let keep: Vec<usize> = (1..=v.dim()).filter(|&i| v.init().get(i).is_finite()).collect();
    if keep.is_empty() {
        return None;
    }
    let pick = |x: &OmegaVec<N>| OmegaVec::new(keep.iter().map(|&i| x.get(i).clone()).collect());
    let actions = v
        .actions()
        .iter()
        .map(|a| Action::new(a.name.clone(), keep.iter().map(|&i| a.delta[i - 1]).collect()))
        .collect();
    let vas = Vas::new(pick(v.init()), actions).expect("projection keeps names distinct");
    Some((vas, pick(f), pick(y)))
}

/// [`filtered_member`] sharing explored state through `cache`.
pub fn filtered_member_with<N: Natural>(
    cache: &mut ReachCache<N>,
    v: &Vas<N>,
    f: &Filter<N>,
    y: &OmegaVec<N>,
    budget: &mut Budget,
) -> Result<Verdict, AnalysisError<N>> {
    let start = budget.used();
    same_dim(v.dim(), f.dim())?;
    same_dim(v.dim(), y.dim())?;
    let frozen_pinned = (1..=v.dim()).any(|i| v.init().get(i).is_omega() && f.get(i).is_finite());
    if frozen_pinned {
        return Ok(Verdict::no(Refutation::FrozenComponent, budget.used() - start));
    }
    let Some((vas, f, y)) = drop_frozen(v, f, y) else {
        let trivial = ProductiveCandidate {
            pi: vec![vec![]],
            v: vec![],
        };
        return Ok(Verdict::yes(Evidence::Productive(trivial), budget.used() - start));
    };
    let Some((positions, z)) = translate_f_to_p(&f, &y)? else {
        return Ok(Verdict::no(Refutation::FilterMismatch, budget.used() - start));
    };
    let vp = build_vas_p(&vas, &positions)?;
    let mut verdict = lim_member_with(cache, &vp, &z, budget)?;
    verdict.steps_used = budget.used() - start;
    Ok(verdict)
}

/// A basis of the limit-closed downward-closed set `D` whose membership
/// `oracle` decides.
///
/// The complement is grown one minimal element at a time: while some
/// element `b` of the current candidate basis is not in `D`, a finite
/// non-member below `b` is found along `b_0, b_1, …` (ω replaced by `ℓ`),
/// shrunk coordinate by coordinate with binary search, and added to the
/// complement.
pub fn vj_basis<N, F>(mut oracle: F, dim: usize, budget: &mut Budget) -> Result<DownBasis<N>, AnalysisError<N>>
where
    N: Natural,
    F: FnMut(&OmegaVec<N>, &mut Budget) -> Result<Verdict, AnalysisError<N>>,
{
    let mut upper = UpBasis::empty(dim);
    let mut answers: HashMap<OmegaVec<N>, bool> = HashMap::new();
    let mut ask = |x: &OmegaVec<N>, budget: &mut Budget, upper: &UpBasis<N>| -> Result<bool, AnalysisError<N>> {
        if let Some(&a) = answers.get(x) {
            return Ok(a);
        }
        let exhausted = |budget: &Budget| AnalysisError::BudgetExhausted {
            steps: budget.used(),
            partial: Some(upper.clone()),
        };
        if !budget.spend(1) {
            return Err(exhausted(budget));
        }
        let member = match oracle(x, budget)?.answer {
            Answer::Yes => true,
            Answer::No => false,
            Answer::Unknown => return Err(exhausted(budget)),
        };
        answers.insert(x.clone(), member);
        Ok(member)
    };
    loop {
        let candidate = upper.complement();
        let mut failing = None;
        for b in candidate.iter() {
            if !ask(b, budget, &upper)? {
                failing = Some(b.clone());
                break;
            }
        }
        let Some(b) = failing else {
            return Ok(candidate);
        };
        let mut w = None;
        for l in 0u64.. {
            let bl = OmegaVec::new(
                b.iter()
                    .map(|e| if e.is_omega() { OmegaNat::from_u64(l) } else { e.clone() })
                    .collect(),
            );
            if !ask(&bl, budget, &upper)? {
                w = Some(bl);
                break;
            }
            if b.is_finite() {
                unreachable!("a finite non-member answered as a member");
            }
        }
        let mut w = w.expect("the loop only exits with a witness");
        for i in 1..=dim {
            let hi = w.get(i).finite().expect("witnesses are finite").to_u64();
            let Some(hi) = hi else { continue };
            // Smallest value at i keeping w outside D.
            let (mut lo, mut hi) = (0u64, hi);
            while lo < hi {
                let mid = lo + (hi - lo) / 2;
                let mut probe = w.clone();
                probe.set(i, OmegaNat::from_u64(mid));
                if ask(&probe, budget, &upper)? {
                    lo = mid + 1;
                } else {
                    hi = mid;
                }
            }
            w.set(i, OmegaNat::from_u64(lo));
        }
        upper.insert(w)?;
    }
}

/// A basis of `Lim ↓_f Post*(v)`.
pub fn filtered_cover_basis<N: Natural>(
    v: &Vas<N>,
    f: &Filter<N>,
    budget: &mut Budget,
) -> Result<DownBasis<N>, AnalysisError<N>> {
    same_dim(v.dim(), f.dim())?;
    let mut cache = ReachCache::new();
    vj_basis(
        |y, budget| filtered_member_with(&mut cache, v, f, y, budget),
        v.dim(),
        budget,
    )
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::karp_miller::km_cover;
    use crate::oracles::reach_decide_vas;
    use rand::{Rng, SeedableRng};
    use std::collections::HashSet;

    type V = OmegaVec<u64>;

    fn v(s: &str) -> V {
        s.parse().unwrap()
    }

    fn vas(init: &str, deltas: &[&[i64]]) -> Vas<u64> {
        Vas::new(
            v(init),
            deltas
                .iter()
                .enumerate()
                .map(|(k, d)| Action::new(format!("a{k}"), d.to_vec()))
                .collect(),
        )
        .unwrap()
    }

    fn basis(dim: usize, elems: &[&str]) -> DownBasis<u64> {
        DownBasis::minimize(dim, elems.iter().map(|e| v(e))).unwrap()
    }

    /// Membership oracle for a known downward-closed set.
    pub(crate) fn planted(d: DownBasis<u64>) -> impl FnMut(&V, &mut Budget) -> Result<Verdict, AnalysisError<u64>> {
        move |x, _| {
            Ok(if d.contains(x).unwrap() {
                Verdict::yes(Evidence::Word(vec![]), 0)
            } else {
                Verdict::no(Refutation::CoverRefuted, 0)
            })
        }
    }

    #[test]
    fn translations() {
        let p = PositionSet::new(2, [1]).unwrap();
        assert_eq!(translate_p_to_f(&p, &v("3,7")).unwrap(), v("3,w"));
        assert_eq!(translate_p_to_f(&PositionSet::empty(2), &v("3,7")).unwrap(), v("w,w"));
        assert_eq!(translate_p_to_f(&PositionSet::full(2), &v("3,7")).unwrap(), v("3,7"));
        assert!(translate_p_to_f(&p, &v("3")).is_err());

        let (p, z) = translate_f_to_p(&v("0,w"), &v("0,3")).unwrap().unwrap();
        assert_eq!((p.iter().collect::<Vec<_>>(), z), (vec![1], v("0,3")));
        assert!(translate_f_to_p(&v("0,w"), &v("1,3")).unwrap().is_none());
        let (p, z) = translate_f_to_p(&v("w,w"), &v("4,w")).unwrap().unwrap();
        assert!(p.is_empty());
        assert_eq!(z, v("4,w"));
    }

    /// Brute-force reachable set, by breadth-first search to a depth.
    fn reachable(s: &Vas<u64>, depth: usize) -> HashSet<V> {
        let mut seen = HashSet::from([s.init().clone()]);
        let mut layer = vec![s.init().clone()];
        for _ in 0..depth {
            let mut next = vec![];
            for x in &layer {
                for a in s.actions() {
                    if let Some(y) = x.add_delta(&a.delta).unwrap() {
                        if seen.insert(y.clone()) {
                            next.push(y);
                        }
                    }
                }
            }
            layer = next;
        }
        seen
    }

    #[test]
    fn p_and_f_memberships_agree() {
        // y ∈ ↓_P M  ⟺  y ∈ ↓_f M with f from translate_p_to_f, over a grid.
        let s = vas("0,1", &[&[1, 2], &[2, -1]]);
        let m = reachable(&s, 6);
        for bits in 0..4u32 {
            let p = PositionSet::new(2, (1..=2).filter(|i| bits & (1 << (i - 1)) != 0)).unwrap();
            for a in 0..=5 {
                for b in 0..=5 {
                    let y = OmegaVec::from_finite(&[a, b]);
                    let f = translate_p_to_f(&p, &y).unwrap();
                    let by_p = m.iter().any(|x| y.leq_on(x, &p).unwrap());
                    let by_f = m.iter().any(|x| {
                        x.leq(&f).unwrap()
                            && y.leq(x).unwrap()
                            && (1..=2).all(|i| f.get(i).is_omega() || x.get(i) == f.get(i))
                    });
                    assert_eq!(by_p, by_f, "{y} under {f}");
                }
            }
        }
    }

    fn member(s: &Vas<u64>, f: &str, y: &str) -> Answer {
        filtered_member(s, &v(f), &v(y), &mut Budget::new(100_000))
            .unwrap()
            .answer
    }

    #[test]
    fn membership_examples() {
        let s = vas("0,0", &[&[1, 1]]);
        assert_eq!(member(&s, "w,w", "2,1"), Answer::Yes);
        assert_eq!(member(&s, "2,w", "2,3"), Answer::No);
        assert_eq!(member(&s, "2,w", "2,1"), Answer::Yes);
        assert_eq!(member(&s, "2,w", "3,1"), Answer::No);
        assert_eq!(member(&s, "w,w", "w,4"), Answer::Yes);
        let frozen = vas("w,0", &[&[0, 1]]);
        assert_eq!(member(&frozen, "w,w", "7,w"), Answer::Yes);
        assert_eq!(member(&frozen, "3,w", "3,1"), Answer::No);
    }

    #[test]
    fn vj_examples() {
        let d = basis(2, &["3,w", "4,3", "5,2", "w,1"]);
        let got = vj_basis(planted(d.clone()), 2, &mut Budget::new(100_000)).unwrap();
        assert_eq!(got, d);
        let got = vj_basis(planted(DownBasis::full(3)), 3, &mut Budget::new(100)).unwrap();
        assert_eq!(got.elems(), [v("w,w,w")]);
        let got = vj_basis(planted(DownBasis::empty(2)), 2, &mut Budget::new(100)).unwrap();
        assert!(got.is_empty());
    }

    #[test]
    fn vj_reports_partial_complement() {
        let d = basis(2, &["3,w", "w,1"]);
        match vj_basis(planted(d), 2, &mut Budget::new(3)) {
            Err(AnalysisError::BudgetExhausted { partial: Some(_), .. }) => {}
            other => panic!("{other:?}"),
        }
        let unknown = |_: &V, _: &mut Budget| Ok(Verdict::unknown(0));
        assert!(vj_basis::<u64, _>(unknown, 1, &mut Budget::new(10))
            .unwrap_err()
            .is_budget());
    }

    /// Every antichain over `{0..=k, ω}^dim`, checked against the oracle:
    /// basis elements must be members and the complement's minimal elements
    /// must not. Only practical for dim ≤ 2 and tiny `k`.
    pub(crate) fn vj_by_enumeration(d: &DownBasis<u64>, dim: usize, k: u64) -> Option<DownBasis<u64>> {
        let values: Vec<OmegaNat<u64>> = (0..=k).map(OmegaNat::Fin).chain([OmegaNat::Omega]).collect();
        let mut points: Vec<V> = vec![];
        let mut idx = vec![0usize; dim];
        loop {
            points.push(OmegaVec::new(idx.iter().map(|&j| values[j].clone()).collect()));
            let mut c = 0;
            loop {
                if c == dim {
                    break;
                }
                idx[c] += 1;
                if idx[c] < values.len() {
                    break;
                }
                idx[c] = 0;
                c += 1;
            }
            if c == dim {
                break;
            }
        }
        let mut found = None;
        let mut stack: Vec<(usize, Vec<V>)> = vec![(0, vec![])];
        while let Some((from, chosen)) = stack.pop() {
            let cand = DownBasis::minimize(dim, chosen.iter().cloned()).unwrap();
            let consistent = cand.iter().all(|b| d.contains(b).unwrap())
                && cand.complement().elems().iter().all(|u| !d.contains(u).unwrap());
            if consistent {
                assert!(found.is_none() || found.as_ref() == Some(&cand), "two consistent bases");
                found = Some(cand);
            }
            for j in from..points.len() {
                let p = &points[j];
                if chosen.iter().all(|c| !c.leq(p).unwrap() && !p.leq(c).unwrap()) && d.contains(p).unwrap() {
                    let mut next = chosen.clone();
                    next.push(p.clone());
                    stack.push((j + 1, next));
                }
            }
        }
        found
    }

    #[test]
    fn guided_driver_matches_enumeration() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let dim = rng.gen_range(1..=2);
            let n = rng.gen_range(0..=3);
            let elems: Vec<V> = (0..n)
                .map(|_| {
                    OmegaVec::new(
                        (0..dim)
                            .map(|_| {
                                if rng.gen_bool(0.3) {
                                    OmegaNat::Omega
                                } else {
                                    OmegaNat::Fin(rng.gen_range(0..=2))
                                }
                            })
                            .collect(),
                    )
                })
                .collect();
            let d = DownBasis::minimize(dim, elems).unwrap();
            let guided = vj_basis(planted(d.clone()), dim, &mut Budget::new(100_000)).unwrap();
            assert_eq!(Some(guided.clone()), vj_by_enumeration(&d, dim, 2));
            assert_eq!(guided, d);
        }
    }

    #[test]
    fn cover_examples() {
        let s = vas("0", &[&[2], &[-2]]);
        let got = filtered_cover_basis(&s, &v("0"), &mut Budget::new(100_000)).unwrap();
        assert_eq!(got, basis(1, &["0"]));
        let s = vas("0,0", &[&[1, 1], &[-1, 0]]);
        let got = filtered_cover_basis(&s, &v("0,w"), &mut Budget::new(100_000)).unwrap();
        assert_eq!(got, basis(2, &["0,w"]));
        let s = vas("1,0", &[&[-1, 1], &[1, 0], &[0, -2]]);
        let got = filtered_cover_basis(&s, &v("w,w"), &mut Budget::new(200_000)).unwrap();
        assert_eq!(got, km_cover(&s));
    }

    #[test]
    fn filtered_covers_against_exploration() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let mut computed = 0;
        for _ in 0..15 {
            let dim = rng.gen_range(1..=2);
            let m = rng.gen_range(1..=3);
            let deltas: Vec<Vec<i64>> = (0..m)
                .map(|_| (0..dim).map(|_| rng.gen_range(-2..=2)).collect())
                .collect();
            let init: Vec<u64> = (0..dim).map(|_| rng.gen_range(0..=2)).collect();
            let s = Vas::new(
                OmegaVec::from_finite(&init),
                deltas
                    .iter()
                    .enumerate()
                    .map(|(k, d)| Action::new(format!("a{k}"), d.clone()))
                    .collect(),
            )
            .unwrap();
            let f = OmegaVec::new(
                (0..dim)
                    .map(|_| {
                        if rng.gen_bool(0.5) {
                            OmegaNat::Omega
                        } else {
                            OmegaNat::Fin(rng.gen_range(0..=3))
                        }
                    })
                    .collect(),
            );
            let got = match filtered_cover_basis(&s, &f, &mut Budget::new(300_000)) {
                Ok(got) => got,
                Err(e) => {
                    eprintln!("skipped {deltas:?} from {init:?} under {f}: {e}");
                    continue;
                }
            };
            computed += 1;
            for x in reachable(&s, 7) {
                let passes = (1..=dim).all(|i| f.get(i).is_omega() || x.get(i) == f.get(i));
                if passes {
                    assert!(got.contains(&x).unwrap(), "{x} missing from {got} for {deltas:?} {f}");
                }
            }
            for b in got.iter().filter(|b| b.is_finite()) {
                let r = reach_decide_vas(&s, b, &mut Budget::new(100_000)).unwrap();
                assert_eq!(r.answer, Answer::Yes, "{b} in {got} for {deltas:?} {f}");
            }
            assert_eq!(got.filter(&f).unwrap(), got);
        }
        assert!(computed >= 12, "only {computed} bases computed");
    }
}
