//! Acceptance suite: one PASS/FAIL line per criterion, each within its time limit.
//!
//! Run with `cargo test --test acceptance`. Every suite is seeded, so a
//! failure reproduces exactly.

use std::collections::{HashSet, VecDeque};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vaszero::filtered::{filtered_cover_basis, vj_basis};
use vaszero::karp_miller::km_cover;
use vaszero::model::parse::{parse_net, Net};
use vaszero::model::{encode_vassz, Action, Transition, Vas, Vassz, Vasz};
use vaszero::omega_check::repeated_state;
use vaszero::oracles::{
    candidate_limit, lim_member, productive_check, reach_decide_vas, Answer, Budget, Evidence, ProductiveCandidate,
    Refutation, Verdict,
};
use vaszero::vasz::{coverable, coverable_vassz, vassz_cover};
use vaszero::{DownBasis, OmegaNat, OmegaVec, UpBasis};

type V = OmegaVec<u64>;

fn v(s: &str) -> V {
    s.parse().unwrap()
}

fn down(dim: usize, elems: &[&str]) -> DownBasis<u64> {
    DownBasis::minimize(dim, elems.iter().map(|e| v(e))).unwrap()
}

/// Tallies for criterion 9, fed by every suite that produces verdicts.
#[derive(Default)]
struct Soundness {
    yes: usize,
    no: usize,
    unknown: usize,
    violations: Vec<String>,
}

impl Soundness {
    fn violation(&mut self, what: String) {
        self.violations.push(what);
    }
}

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn vassz(text: &str) -> Vassz<u64> {
    match parse_net(text).unwrap() {
        Net::Vassz { system, .. } => system,
        _ => panic!("expected a VASS"),
    }
}

fn fixture(name: &str) -> String {
    let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).unwrap()
}

// ---------------------------------------------------------------- generators

fn random_vec(rng: &mut ChaCha8Rng, dim: usize, max: u64, omega: f64) -> V {
    OmegaVec::new(
        (0..dim)
            .map(|_| {
                if rng.gen_bool(omega) {
                    OmegaNat::Omega
                } else {
                    OmegaNat::from_u64(rng.gen_range(0..=max))
                }
            })
            .collect(),
    )
}

fn random_delta(rng: &mut ChaCha8Rng, dim: usize, bound: i64) -> Vec<i64> {
    (0..dim).map(|_| rng.gen_range(-bound..=bound)).collect()
}

fn random_vas(rng: &mut ChaCha8Rng, max_dim: usize, max_actions: usize, init_max: u64) -> Vas<u64> {
    let dim = rng.gen_range(1..=max_dim);
    let n = rng.gen_range(1..=max_actions);
    let actions = (0..n)
        .map(|k| Action::new(format!("a{k}"), random_delta(rng, dim, 2)))
        .collect();
    Vas::new(random_vec(rng, dim, init_max, 0.0), actions).unwrap()
}

// ----------------------------------------------------------- brute force

/// Breadth-first exploration of at most `cap` vectors; `true` when exhausted.
fn explore_vasz(vz: &Vasz<u64>, cap: usize) -> (Vec<V>, bool) {
    let mut seen = HashSet::new();
    let mut order = vec![];
    let mut queue = VecDeque::new();
    seen.insert(vz.init().clone());
    queue.push_back(vz.init().clone());
    while let Some(x) = queue.pop_front() {
        order.push(x.clone());
        for (a, _) in vz.all_actions() {
            if let Some(y) = vz.fire(&x, &a.name).unwrap() {
                if seen.len() >= cap {
                    return (order, false);
                }
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
    }
    (order, true)
}

fn explore(v: &Vas<u64>, cap: usize) -> (Vec<V>, bool) {
    explore_vasz(&Vasz::without_test(v.clone()), cap)
}

fn below_some(b: &DownBasis<u64>, x: &V) -> bool {
    b.contains(x).unwrap()
}

/// Configurations of a VASS reachable with words over the transition indices in `allowed`.
struct Configs {
    seen: HashSet<(usize, V)>,
    exhausted: bool,
}

fn explore_vassz(
    s: &Vassz<u64>,
    from: (usize, V),
    allowed: &dyn Fn(usize) -> bool,
    cap: usize,
    include_start: bool,
) -> Configs {
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    if include_start {
        seen.insert(from.clone());
    }
    queue.push_back(from);
    let mut exhausted = true;
    'outer: while let Some((q, x)) = queue.pop_front() {
        for t in 0..s.transitions().len() {
            if s.transitions()[t].from != q || !allowed(t) {
                continue;
            }
            if let Some(next) = s.fire(q, &x, t).unwrap() {
                if seen.len() >= cap {
                    exhausted = false;
                    break 'outer;
                }
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
    }
    Configs { seen, exhausted }
}

/// Every configuration reached by reading `word` from some configuration in `from`.
fn replay_vassz(s: &Vassz<u64>, from: Vec<(usize, V)>, word: &[String]) -> Vec<(usize, V)> {
    let mut cur: HashSet<(usize, V)> = from.into_iter().collect();
    for a in word {
        let mut next = HashSet::new();
        for (q, x) in &cur {
            for (t, tr) in s.transitions().iter().enumerate() {
                if tr.from == *q && tr.action == *a {
                    if let Some(c) = s.fire(*q, x, t).unwrap() {
                        next.insert(c);
                    }
                }
            }
        }
        cur = next;
    }
    cur.into_iter().collect()
}

// ---------------------------------------------------------------- criteria

fn criterion1(_: &mut Soundness) -> Outcome {
    let b = down(2, &["3,w", "4,3", "5,2", "w,1"]);
    let up = b.complement();
    let want = UpBasis::minimize(2, [v("4,4"), v("5,3"), v("6,2")]).unwrap();
    ensure(up == want, || format!("complement_down gave {up}"))?;
    let back = up.complement();
    ensure(back == b, || format!("complement_up gave {back}"))?;
    Ok("both complements exact".into())
}

fn criterion2(s: &mut Soundness) -> Outcome {
    let right = vassz(&fixture("fig1_right.net"));
    let left = vassz(&fixture("fig1_left.net"));
    let r_ind = v("0,0,0,1");
    let (rc, _) = vassz_cover(&right, &mut Budget::new(1_000_000));
    let rc = rc.map_err(|e| e.to_string())?;
    ensure(below_some(&rc, &r_ind), || format!("right cover {rc} misses r"))?;
    let (lc, _) = vassz_cover(&left, &mut Budget::new(1_000_000));
    let lc = lc.map_err(|e| e.to_string())?;
    ensure(lc.iter().all(|b| *b.get(4) == OmegaNat::zero()), || {
        format!("left cover {lc} reaches r")
    })?;

    let yes = coverable_vassz(&right, &r_ind, &mut Budget::new(1_000_000)).map_err(|e| e.to_string())?;
    ensure(yes.answer == Answer::Yes, || format!("right coverability: {yes}"))?;
    let (flat, layout) = encode_vassz(&right);
    let end = flat.fire_word(flat.init(), yes.word().unwrap()).unwrap();
    let mut padded = r_ind.entries().to_vec();
    padded.resize(layout.dim(), OmegaNat::zero());
    ensure(end.is_some_and(|e| OmegaVec::new(padded).leq(&e).unwrap()), || {
        "witness does not replay".into()
    })?;
    s.yes += 1;

    let no = coverable_vassz(&left, &r_ind, &mut Budget::new(1_000_000)).map_err(|e| e.to_string())?;
    ensure(no.answer == Answer::No, || format!("left coverability: {no}"))?;
    s.no += 1;
    Ok(format!("right cover {} elems, left cover {} elems", rc.len(), lc.len()))
}

/// Counter vectors of the cover at state `q`, over counters then indicators.
fn at_state(b: &DownBasis<u64>, counters: usize, q: usize) -> DownBasis<u64> {
    DownBasis::minimize(
        counters,
        b.iter()
            .filter(|e| *e.get(counters + q + 1) != OmegaNat::zero())
            .map(|e| OmegaVec::new(e.entries()[..counters].to_vec())),
    )
    .unwrap()
}

fn criterion3(_: &mut Soundness) -> Outcome {
    for (file, want) in [("fig2_first.net", "0,0"), ("fig2_second.net", "0,w")] {
        let s = vassz(&fixture(file));
        let (c, _) = vassz_cover(&s, &mut Budget::new(1_000_000));
        let c = c.map_err(|e| format!("{file}: {e}"))?;
        let r = s.state_index("r").unwrap();
        let got = at_state(&c, s.dim(), r);
        ensure(got == down(2, &[want]), || format!("{file}: cover at r is {got}"))?;
    }
    Ok("r-projections (0,0) and (0,w)".into())
}

fn criterion4(_: &mut Soundness) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for case in 0..50 {
        let dim = rng.gen_range(1..=3);
        let n = rng.gen_range(1..=4);
        let planted = DownBasis::minimize(dim, (0..n).map(|_| random_vec(&mut rng, dim, 6, 0.3))).unwrap();
        let set = planted.clone();
        let oracle = move |x: &V, _: &mut Budget| {
            Ok(if set.contains(x).unwrap() {
                Verdict::yes(Evidence::Word(vec![]), 0)
            } else {
                Verdict::no(Refutation::CoverRefuted, 0)
            })
        };
        let got = vj_basis(oracle, dim, &mut Budget::unlimited()).map_err(|e| format!("case {case}: {e}"))?;
        ensure(got == planted, || {
            format!("case {case}: planted {planted}, recovered {got}")
        })?;
    }
    Ok("50/50 bases recovered".into())
}

fn random_word(rng: &mut ChaCha8Rng, v: &Vas<u64>, len: usize) -> Vec<String> {
    (0..len)
        .map(|_| v.actions()[rng.gen_range(0..v.actions().len())].name.clone())
        .collect()
}

fn criterion5(_: &mut Soundness) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut productive = 0;
    for case in 0..200 {
        let sys = random_vas(&mut rng, 3, 4, 3);
        let k = rng.gen_range(0..=2);
        let mut budget = 6 - k;
        let mut pi = vec![];
        for _ in 0..=k {
            let len = rng.gen_range(0..=budget.min(3));
            budget -= len;
            pi.push(random_word(&mut rng, &sys, len));
        }
        let c = ProductiveCandidate {
            pi,
            v: random_word(&mut rng, &sys, k),
        };
        let claimed = productive_check(&sys, &c).unwrap();
        let direct = (1..=25).all(|n| sys.fire_word(sys.init(), &c.unroll(n)).unwrap().is_some());
        ensure(claimed == direct, || {
            format!("case {case}: {c} claimed {claimed}, firing says {direct}")
        })?;
        productive += usize::from(claimed);
    }
    Ok(format!("200 agreements ({productive} productive)"))
}

fn criterion6(_: &mut Soundness) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut finite_elems = 0;
    for case in 0..100 {
        let sys = random_vas(&mut rng, 4, 4, 3);
        let cover = km_cover(&sys);
        let (reached, _) = explore(&sys, 10_000);
        if let Some(x) = reached.iter().find(|x| !below_some(&cover, x)) {
            return Err(format!("case {case}: {x} escapes the cover {cover}"));
        }
        let found: HashSet<&V> = reached.iter().collect();
        for b in cover.iter().filter(|b| b.is_finite()) {
            finite_elems += 1;
            if !found.contains(b) {
                // Beyond the exploration horizon: ask for a replayable word instead.
                let verdict = reach_decide_vas(&sys, b, &mut Budget::new(1_000_000)).unwrap();
                let ok = verdict.answer == Answer::Yes
                    && sys.fire_word(sys.init(), verdict.word().unwrap()).unwrap().as_ref() == Some(b);
                ensure(ok, || {
                    format!("case {case}: basis element {b} not reachable ({verdict})")
                })?;
            }
        }
    }
    Ok(format!("0 violations, {finite_elems} finite elements confirmed"))
}

fn matches_filter(x: &V, f: &V) -> bool {
    x.iter().zip(f.iter()).all(|(a, b)| b.is_omega() || a == b)
}

fn criterion7(s: &mut Soundness) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut unknown = 0;
    let mut checked = 0;
    for case in 0..50 {
        let sys = random_vas(&mut rng, 3, 3, 3);
        let f = random_vec(&mut rng, sys.dim(), 4, 0.5);
        let basis = match filtered_cover_basis(&sys, &f, &mut Budget::new(2_000_000)) {
            Ok(b) => b,
            Err(e) if e.is_budget() => {
                unknown += 1;
                s.unknown += 1;
                continue;
            }
            Err(e) => return Err(format!("case {case}: {e}")),
        };
        let (reached, _) = explore(&sys, 20_000);
        if let Some(x) = reached
            .iter()
            .filter(|x| matches_filter(x, &f))
            .find(|x| !below_some(&basis, x))
        {
            s.violation(format!("filtered cover {case}: {x} missing"));
            return Err(format!("case {case}: filtered state {x} escapes {basis} (filter {f})"));
        }
        for b in basis.iter().filter(|b| b.is_finite()) {
            ensure(matches_filter(b, &f), || {
                format!("case {case}: {b} does not match filter {f}")
            })?;
            let verdict = reach_decide_vas(&sys, b, &mut Budget::new(1_000_000)).unwrap();
            match verdict.answer {
                Answer::Yes => {
                    let end = sys.fire_word(sys.init(), verdict.word().unwrap()).unwrap();
                    ensure(end.as_ref() == Some(b), || {
                        format!("case {case}: witness for {b} does not replay")
                    })?;
                    s.yes += 1;
                }
                Answer::No => {
                    s.violation(format!("filtered cover {case}: basis element {b} refuted"));
                    return Err(format!("case {case}: basis element {b} refuted ({verdict})"));
                }
                Answer::Unknown => {
                    unknown += 1;
                    s.unknown += 1;
                }
            }
            checked += 1;
        }
    }
    ensure(unknown == 0, || format!("{unknown} budget UNKNOWNs"))?;
    Ok(format!("50 systems, {checked} finite elements reached"))
}

/// A random VASS with one zero-test action `z` on up to three states.
fn random_vassz(rng: &mut ChaCha8Rng) -> Vassz<u64> {
    let dim = rng.gen_range(1..=2);
    let nstates = rng.gen_range(1..=3);
    let ntrans = rng.gen_range(2..=5);
    let mut actions = vec![];
    let mut trans = vec![];
    let mut ztest = false;
    for k in 0..ntrans {
        let (from, to) = (rng.gen_range(0..nstates), rng.gen_range(0..nstates));
        let name = if rng.gen_bool(0.25) {
            ztest = true;
            "z".to_string()
        } else {
            actions.push(Action::new(format!("t{k}"), random_delta(rng, dim, 2)));
            format!("t{k}")
        };
        trans.push(Transition { from, action: name, to });
    }
    let mut zdelta = random_delta(rng, dim, 1);
    zdelta[0] = rng.gen_range(0..=1);
    let base = Vas::new(random_vec(rng, dim, 2, 0.0), actions).unwrap();
    let ztests = if ztest { vec![Action::new("z", zdelta)] } else { vec![] };
    let counters = Vasz::new(base, ztests).unwrap();
    let states = (0..nstates).map(|q| format!("q{q}")).collect();
    Vassz::new(counters, states, trans, 0).unwrap()
}

/// Bounded search for a configuration at `qf` that comes back to `qf` larger
/// without the zero-test, or larger and equal on component 1 with it.
fn lasso_search(s: &Vassz<u64>, qf: usize) -> Option<bool> {
    let all = |_: usize| true;
    let reach = explore_vassz(s, (s.init_state(), s.init().clone()), &all, 3_000, true);
    let untested = |t: usize| !s.counters().is_ztest(&s.transitions()[t].action);
    let mut sources: Vec<&(usize, V)> = reach.seen.iter().filter(|(q, _)| *q == qf).collect();
    sources.sort();
    for (q, x) in sources.into_iter().take(60) {
        let plain = explore_vassz(s, (*q, x.clone()), &untested, 600, false);
        if plain.seen.iter().any(|(p, y)| *p == qf && x.leq(y).unwrap()) {
            return Some(true);
        }
        let tested = explore_vassz(s, (*q, x.clone()), &all, 600, false);
        if tested
            .seen
            .iter()
            .any(|(p, y)| *p == qf && x.leq(y).unwrap() && x.get(1) == y.get(1))
        {
            return Some(true);
        }
    }
    // A finite configuration graph has been seen whole, so every source was tried.
    reach.exhausted.then_some(false)
}

fn lasso_replays(s: &Vassz<u64>, qf: usize, stem: &[String], cycle: &[String]) -> bool {
    let tests = cycle.iter().any(|a| s.counters().is_ztest(a));
    let starts = replay_vassz(s, vec![(s.init_state(), s.init().clone())], stem);
    !cycle.is_empty()
        && starts.into_iter().filter(|(q, _)| *q == qf).any(|(q, x)| {
            replay_vassz(s, vec![(q, x.clone())], cycle)
                .iter()
                .any(|(p, y)| *p == qf && x.leq(y).unwrap() && (!tests || x.get(1) == y.get(1)))
        })
}

fn criterion8(s: &mut Soundness) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut agree, mut unknown) = (0, 0);
    for case in 0..100 {
        let sys = random_vassz(&mut rng);
        let qf = rng.gen_range(0..sys.states().len());
        let name = sys.states()[qf].clone();
        let verdict =
            repeated_state(&sys, &name, &mut Budget::new(300_000)).map_err(|e| format!("case {case}: {e}"))?;
        let brute = lasso_search(&sys, qf);
        match verdict.answer {
            Answer::Yes => {
                let Some(Evidence::Lasso { stem, cycle }) = &verdict.evidence else {
                    return Err(format!("case {case}: YES without a lasso"));
                };
                if !lasso_replays(&sys, qf, stem, cycle) {
                    s.violation(format!("repeated {case}: lasso does not replay"));
                    return Err(format!("case {case}: lasso {verdict} does not replay"));
                }
                s.yes += 1;
            }
            Answer::No => s.no += 1,
            Answer::Unknown => {
                unknown += 1;
                s.unknown += 1;
            }
        }
        let contradiction = match (verdict.answer, brute) {
            (Answer::Yes, Some(false)) | (Answer::No, Some(true)) => true,
            (Answer::Unknown, _) | (_, None) => false,
            _ => {
                agree += 1;
                false
            }
        };
        if contradiction {
            s.violation(format!("repeated {case}: {verdict} vs brute force {brute:?}"));
            return Err(format!(
                "case {case}: repeated_state({name}) = {verdict}, lasso search {brute:?}"
            ));
        }
    }
    Ok(format!(
        "0 contradictions, {agree} definitive agreements, {unknown} UNKNOWN"
    ))
}

/// Random reachability, coverability and limit queries checked against exploration.
fn soundness_suite(s: &mut Soundness) {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for case in 0..60 {
        let base = random_vas(&mut rng, 3, 3, 2);
        let dim = base.dim();
        let (reached, _) = explore(&base, 5_000);
        let seen: HashSet<&V> = reached.iter().collect();
        let mut targets: Vec<V> = (0..2).map(|_| random_vec(&mut rng, dim, 4, 0.0)).collect();
        targets.push(reached[rng.gen_range(0..reached.len())].clone());
        for t in &targets {
            let verdict = reach_decide_vas(&base, t, &mut Budget::new(200_000)).unwrap();
            match verdict.answer {
                Answer::Yes => {
                    s.yes += 1;
                    if base.fire_word(base.init(), verdict.word().unwrap()).unwrap().as_ref() != Some(t) {
                        s.violation(format!("reach {case}: witness for {t} does not replay"));
                    }
                }
                Answer::No => {
                    s.no += 1;
                    if seen.contains(t) {
                        s.violation(format!("reach {case}: {t} refuted but reachable"));
                    }
                }
                Answer::Unknown => s.unknown += 1,
            }
        }
        // Limits: the finite targets again, plus some with ω components.
        targets.extend((0..2).map(|_| random_vec(&mut rng, dim, 4, 0.4)));
        for t in &targets {
            let lim = lim_member(&base, t, &mut Budget::new(200_000)).unwrap();
            match (&lim.answer, &lim.evidence) {
                (Answer::Yes, Some(Evidence::Word(w))) => {
                    s.yes += 1;
                    if base.fire_word(base.init(), w).unwrap().as_ref() != Some(t) {
                        s.violation(format!("lim {case}: word for {t} does not replay"));
                    }
                }
                (Answer::Yes, Some(Evidence::Productive(c))) => {
                    s.yes += 1;
                    let ok = productive_check(&base, c).unwrap() && candidate_limit(&base, c).unwrap() == *t;
                    if !ok {
                        s.violation(format!("lim {case}: candidate {c} does not witness {t}"));
                    }
                }
                (Answer::Yes, _) => s.violation(format!("lim {case}: YES without a witness")),
                (Answer::No, _) => {
                    s.no += 1;
                    if seen.contains(t) {
                        s.violation(format!("lim {case}: reachable {t} refuted"));
                    }
                }
                (Answer::Unknown, _) => s.unknown += 1,
            }
        }

        // The same system with a zero-test, for coverability.
        let mut zdelta = random_delta(&mut rng, dim, 1);
        zdelta[0] = rng.gen_range(0..=1);
        let z = Action::new("z", zdelta);
        let vz = Vasz::new(base.clone(), vec![z]).unwrap();
        let (zreached, _) = explore_vasz(&vz, 5_000);
        let t = random_vec(&mut rng, dim, 4, 0.0);
        let verdict = coverable(&vz, &t, &mut Budget::new(300_000)).unwrap();
        match verdict.answer {
            Answer::Yes => {
                s.yes += 1;
                let end = vz.fire_word(vz.init(), verdict.word().unwrap()).unwrap();
                if !end.is_some_and(|e| t.leq(&e).unwrap()) {
                    s.violation(format!("coverable {case}: witness for {t} does not replay"));
                }
            }
            Answer::No => {
                s.no += 1;
                if zreached.iter().any(|x| t.leq(x).unwrap()) {
                    s.violation(format!("coverable {case}: {t} refuted but covered"));
                }
            }
            Answer::Unknown => s.unknown += 1,
        }
    }
}

fn criterion9(s: &mut Soundness) -> Outcome {
    soundness_suite(s);
    if s.violations.is_empty() {
        Ok(format!(
            "{} YES replayed, {} NO unrefuted, {} UNKNOWN",
            s.yes, s.no, s.unknown
        ))
    } else {
        Err(s.violations.join("; "))
    }
}

type Criterion = fn(&mut Soundness) -> Outcome;

fn main() -> ExitCode {
    let criteria: [(&str, Criterion, Option<u64>); 9] = [
        ("complement example", criterion1, Some(1)),
        ("zero-test gating covers", criterion2, Some(30)),
        ("emptied-counter covers", criterion3, Some(60)),
        ("basis recovery", criterion4, Some(60)),
        ("productive sequences", criterion5, Some(60)),
        ("Karp-Miller differential", criterion6, Some(120)),
        ("filtered-cover differential", criterion7, Some(300)),
        ("repeated-state differential", criterion8, Some(300)),
        ("soundness under budget", criterion9, None),
    ];
    let mut soundness = Soundness::default();
    let mut failed = 0;
    for (k, (name, run, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(|| run(&mut soundness))).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let result = match (result, limit) {
            (Ok(_), Some(l)) if took >= Duration::from_secs(l) => Err(format!("took {took:.1?}, limit {l}s")),
            (r, _) => r,
        };
        let bound = limit.map_or(String::new(), |l| format!(" (< {l}s)"));
        match result {
            Ok(detail) => println!("criterion {}: PASS {name}{bound} in {took:.2?}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}{bound} in {took:.2?}: {why}", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
