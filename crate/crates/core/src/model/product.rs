//! The two product constructions behind repeated reachability and
//! ω-regular model checking.

use std::collections::{HashMap, VecDeque};

use super::{Action, BuchiAutomaton, LabeledVassz, ModelError, Transition, Vas, Vassz, Vasz};
use crate::omega::{Natural, OmegaVec};

/// The doubled system whose two reachability targets witness that a state
/// is visited infinitely often.
#[derive(Debug, Clone)]
pub struct RepeatedProduct<N> {
    pub system: Vassz<N>,
    /// Target state for lassos without zero-test.
    pub r_i: usize,
    /// Target state for lassos through the zero-test.
    pub r_ii: usize,
}

/// Rewrites every zero-test with a nonzero displacement as a pure test
/// followed by an ordinary action through a fresh state.
fn pure_zero_tests<N: Natural>(s: &Vassz<N>) -> Result<Vassz<N>, ModelError> {
    let vz = s.counters();
    if vz.ztests().iter().all(|z| z.delta.iter().all(|&c| c == 0)) {
        return Ok(s.clone());
    }
    let mut actions = vz.base().actions().to_vec();
    let mut ztests = Vec::new();
    let mut post_of = HashMap::new();
    for z in vz.ztests() {
        ztests.push(Action::new(z.name.clone(), vec![0; z.delta.len()]));
        if z.delta.iter().any(|&c| c != 0) {
            let mut name = format!("{}#post", z.name);
            while vz.action(&name).is_some() || actions.iter().any(|a| a.name == name) {
                name.push('\'');
            }
            actions.push(Action::new(name.clone(), z.delta.clone()));
            post_of.insert(z.name.clone(), name);
        }
    }
    let mut states = s.states().to_vec();
    let mut trans = Vec::new();
    for t in s.transitions() {
        match post_of.get(&t.action) {
            Some(post) => {
                let mid = states.len();
                states.push(format!("#z{}", trans.len()));
                trans.push(Transition {
                    from: t.from,
                    action: t.action.clone(),
                    to: mid,
                });
                trans.push(Transition {
                    from: mid,
                    action: post.clone(),
                    to: t.to,
                });
            }
            None => trans.push(t.clone()),
        }
    }
    let counters = Vasz::new(Vas::new(s.init().clone(), actions)?, ztests)?;
    Vassz::new(counters, states, trans, s.init_state())
}

fn doubled(delta: &[i64], second: bool) -> Vec<i64> {
    let mut out = delta.to_vec();
    if second {
        out.extend_from_slice(delta);
    } else {
        out.extend(std::iter::repeat_n(0, delta.len()));
    }
    out
}

/// Builds the doubled system for state `qf`.
///
/// Counters are `(y, x)`: `x` is frozen when the run leaves `qf` into one of
/// the copies, `y` keeps moving. From `r_i` the loops can empty both halves
/// exactly when `x ≤ y`; from `r_ii` the first components must additionally
/// be equal, because they are only ever decremented together there.
pub fn build_repeated_product<N: Natural>(s: &Vassz<N>, qf: &str) -> Result<RepeatedProduct<N>, ModelError> {
    let qf = s.state_index(qf)?;
    let s = pure_zero_tests(s)?;
    let d = s.dim();
    let vz = s.counters();
    let nq = s.states().len();

    let mut actions = Vec::new();
    for a in vz.base().actions() {
        actions.push(Action::new(a.name.clone(), doubled(&a.delta, true)));
        actions.push(Action::new(format!("{}#i", a.name), doubled(&a.delta, false)));
        actions.push(Action::new(format!("{}#ii", a.name), doubled(&a.delta, false)));
    }
    actions.push(Action::new("#jump", vec![0; 2 * d]));
    for i in 0..d {
        let mut both = vec![0; 2 * d];
        both[i] = -1;
        both[d + i] = -1;
        actions.push(Action::new(format!("#dec{}", i + 1), both));
        let mut first = vec![0; 2 * d];
        first[i] = -1;
        actions.push(Action::new(format!("#decy{}", i + 1), first));
    }
    let ztests = vz
        .ztests()
        .iter()
        .map(|z| Action::new(z.name.clone(), vec![0; 2 * d]))
        .collect();

    let mut states = s.states().to_vec();
    states.extend(s.states().iter().map(|q| format!("{q}#i")));
    states.extend(s.states().iter().map(|q| format!("{q}#ii")));
    let r_i = states.len();
    states.push("#r.i".into());
    let r_ii = states.len();
    states.push("#r.ii".into());
    let copy_i = |q: usize| nq + q;
    let copy_ii = |q: usize| 2 * nq + q;

    let mut trans: Vec<Transition> = s.transitions().to_vec();
    let tr = |from, action: String, to| Transition { from, action, to };
    for t in s.transitions() {
        let is_test = vz.is_ztest(&t.action);
        if !is_test {
            let a = format!("{}#i", t.action);
            trans.push(tr(copy_i(t.from), a.clone(), copy_i(t.to)));
            if t.from == qf {
                trans.push(tr(qf, a, copy_i(t.to)));
            }
        }
        let a = if is_test {
            t.action.clone()
        } else {
            format!("{}#ii", t.action)
        };
        trans.push(tr(copy_ii(t.from), a.clone(), copy_ii(t.to)));
        if t.from == qf {
            trans.push(tr(qf, a, copy_ii(t.to)));
        }
    }
    trans.push(tr(copy_i(qf), "#jump".into(), r_i));
    trans.push(tr(copy_ii(qf), "#jump".into(), r_ii));
    for i in 1..=d {
        trans.push(tr(r_i, format!("#dec{i}"), r_i));
        trans.push(tr(r_i, format!("#decy{i}"), r_i));
        trans.push(tr(r_ii, format!("#dec{i}"), r_ii));
        if i > 1 {
            trans.push(tr(r_ii, format!("#decy{i}"), r_ii));
        }
    }

    let init = OmegaVec::new([s.init().entries(), s.init().entries()].concat());
    let counters = Vasz::new(Vas::new(init, actions)?, ztests)?;
    let system = Vassz::new(counters, states, trans, s.init_state())?;
    Ok(RepeatedProduct { system, r_i, r_ii })
}

/// The synchronized product of a labeled system with a Büchi automaton.
#[derive(Debug, Clone)]
pub struct BuchiProduct<N> {
    pub system: LabeledVassz<N>,
    /// Product states whose automaton component is accepting, in index order.
    pub accepting: Vec<usize>,
    /// `(system state, automaton state)` of every product state.
    pub pairs: Vec<(usize, usize)>,
}

/// Product restricted to the pairs reachable in the synchronized graph.
pub fn buchi_product<N: Natural>(ls: &LabeledVassz<N>, b: &BuchiAutomaton) -> Result<BuchiProduct<N>, ModelError> {
    b.validate()?;
    if let Some(l) = ls.labels().iter().find(|l| !b.alphabet.contains(l)) {
        return Err(ModelError::AlphabetMismatch(l.clone()));
    }
    let s = ls.system();
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut pairs = Vec::new();
    let mut queue = VecDeque::new();
    let start = (s.init_state(), b.init);
    index.insert(start, 0);
    pairs.push(start);
    queue.push_back(start);
    let mut trans = Vec::new();
    let mut labels = Vec::new();
    while let Some((p, st)) = queue.pop_front() {
        let from = index[&(p, st)];
        for (t, label) in s.transitions().iter().zip(ls.labels()) {
            if t.from != p {
                continue;
            }
            for (_, _, st2) in b.trans.iter().filter(|(a, sym, _)| *a == st && sym == label) {
                let key = (t.to, *st2);
                let to = *index.entry(key).or_insert_with(|| {
                    pairs.push(key);
                    queue.push_back(key);
                    pairs.len() - 1
                });
                trans.push(Transition {
                    from,
                    action: t.action.clone(),
                    to,
                });
                labels.push(label.clone());
            }
        }
    }
    let names = pairs
        .iter()
        .map(|&(p, st)| format!("{}|{}", s.states()[p], b.states[st]))
        .collect();
    let accepting = (0..pairs.len())
        .filter(|&k| b.accepting.contains(&pairs[k].1))
        .collect();
    let system = Vassz::new(s.counters().clone(), names, trans, 0)?;
    Ok(BuchiProduct {
        system: LabeledVassz::new(system, labels)?,
        accepting,
        pairs,
    })
}
