//! Control states as 0/1 counters, and the normalization gadgets.

use std::collections::HashMap;

use super::{Action, ModelError, Transition, Vas, Vassz, Vasz};
use crate::closed::DownBasis;
use crate::omega::{Natural, OmegaError, OmegaNat, OmegaVec};

/// How a VASS was flattened into a VAS with zero-test.
///
/// Components are `1..=counters`, then one indicator per control state,
/// then one auxiliary indicator per state carrying a self-loop. A self-loop
/// `(p,a,p)` cannot be written as `δ(a) - e_p + e_p` without losing the
/// guard on `p`, so it goes through the auxiliary indicator of `p` and back.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    counters: usize,
    states: Vec<String>,
    aux_state: Vec<usize>,
    words: Vec<Vec<String>>,
    by_action: HashMap<String, usize>,
}

impl Layout {
    /// Dimension of the flattened system.
    pub fn dim(&self) -> usize {
        self.counters + self.states.len() + self.aux_state.len()
    }

    /// Dimension after dropping the auxiliary indicators.
    pub fn visible_dim(&self) -> usize {
        self.counters + self.states.len()
    }

    pub fn counters(&self) -> usize {
        self.counters
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    /// 1-based component of the indicator of state `q`.
    pub fn state_component(&self, q: usize) -> usize {
        self.counters + q + 1
    }

    /// The flattened vector of configuration `(q, x)`.
    pub fn encode_state<N: Natural>(&self, q: usize, x: &OmegaVec<N>) -> OmegaVec<N> {
        let mut entries = x.entries().to_vec();
        entries.extend((0..self.states.len() + self.aux_state.len()).map(|k| {
            if k == q {
                OmegaNat::from_u64(1)
            } else {
                OmegaNat::zero()
            }
        }));
        OmegaVec::new(entries)
    }

    /// The configuration of a flattened vector with exactly one indicator set.
    pub fn decode_state<N: Natural>(&self, v: &OmegaVec<N>) -> Option<(usize, OmegaVec<N>)> {
        let one = OmegaNat::from_u64(1);
        let set: Vec<usize> = (0..self.states.len())
            .filter(|&q| *v.get(self.state_component(q)) == one)
            .collect();
        let aux_clear = (self.visible_dim() + 1..=self.dim()).all(|i| *v.get(i) == OmegaNat::zero());
        match set.as_slice() {
            [q] if aux_clear => Some((*q, OmegaVec::new(v.entries()[..self.counters].to_vec()))),
            _ => None,
        }
    }

    /// Drops the auxiliary indicators.
    pub fn project<N: Natural>(&self, v: &OmegaVec<N>) -> OmegaVec<N> {
        OmegaVec::new(v.entries()[..self.visible_dim()].to_vec())
    }

    pub fn project_basis<N: Natural>(&self, b: &DownBasis<N>) -> DownBasis<N> {
        DownBasis::minimize(self.visible_dim(), b.iter().map(|v| self.project(v)))
            .expect("projection keeps dimensions consistent")
    }

    /// Counter parts of the basis elements sitting in state `q`.
    pub fn counters_at<N: Natural>(&self, b: &DownBasis<N>, q: usize) -> DownBasis<N> {
        let c = self.state_component(q);
        DownBasis::minimize(
            self.counters,
            b.iter()
                .filter(|v| *v.get(c) != OmegaNat::zero())
                .map(|v| OmegaVec::new(v.entries()[..self.counters].to_vec())),
        )
        .expect("projection keeps dimensions consistent")
    }

    /// Counter parts of all basis elements, whatever their state.
    pub fn counters_only<N: Natural>(&self, b: &DownBasis<N>) -> DownBasis<N> {
        DownBasis::minimize(
            self.counters,
            b.iter().map(|v| OmegaVec::new(v.entries()[..self.counters].to_vec())),
        )
        .expect("projection keeps dimensions consistent")
    }

    /// The flattened word of a sequence of transitions.
    pub fn encode_word(&self, transitions: &[usize]) -> Vec<String> {
        transitions
            .iter()
            .flat_map(|&t| self.words[t].iter().cloned())
            .collect()
    }

    /// Transition indices of a flattened word; return steps are skipped.
    pub fn decode_word<S: AsRef<str>>(&self, word: &[S]) -> Vec<usize> {
        word.iter()
            .filter_map(|a| self.by_action.get(a.as_ref()).copied())
            .collect()
    }
}

/// Flattens a VASS into a VAS with zero-test over
/// `counters + |Q| + |self-loop states|` components.
pub fn encode_vassz<N: Natural>(s: &Vassz<N>) -> (Vasz<N>, Layout) {
    let d = s.dim();
    let nq = s.states().len();
    let guarded_loops = nq > 1;
    let mut aux_state: Vec<usize> = Vec::new();
    for t in s.transitions() {
        if guarded_loops && t.from == t.to && !aux_state.contains(&t.from) {
            aux_state.push(t.from);
        }
    }
    aux_state.sort_unstable();
    let dim = d + nq + aux_state.len();
    let aux_comp = |q: usize| d + nq + aux_state.iter().position(|&a| a == q).unwrap() + 1;

    let mut actions = Vec::new();
    let mut ztests = Vec::new();
    let mut words = Vec::new();
    let mut by_action = HashMap::new();
    for (k, t) in s.transitions().iter().enumerate() {
        let (a, is_test) = s.counters().action(&t.action).expect("validated transition");
        let mut delta = a.delta.clone();
        delta.resize(dim, 0);
        let name = format!("{}#t{k}", a.name);
        let mut word = vec![name.clone()];
        delta[d + t.from] -= 1;
        if guarded_loops && t.from == t.to {
            let aux = aux_comp(t.from);
            delta[aux - 1] += 1;
            word.push(format!("#ret{aux}"));
        } else {
            delta[d + t.to] += 1;
        }
        by_action.insert(name.clone(), k);
        if is_test {
            ztests.push(Action::new(name, delta));
        } else {
            actions.push(Action::new(name, delta));
        }
        words.push(word);
    }
    for &q in &aux_state {
        let aux = aux_comp(q);
        let mut delta = vec![0; dim];
        delta[aux - 1] = -1;
        delta[d + q] = 1;
        actions.push(Action::new(format!("#ret{aux}"), delta));
    }
    let layout = Layout {
        counters: d,
        states: s.states().to_vec(),
        aux_state,
        words,
        by_action,
    };
    let init = layout.encode_state(s.init_state(), s.init());
    let base = Vas::new(init, actions).expect("fresh names are distinct");
    let vz = Vasz::new(base, ztests).expect("fresh names are distinct");
    (vz, layout)
}

fn on_first(dim: usize, c: i64) -> Vec<i64> {
    let mut d = vec![0; dim];
    d[0] = c;
    d
}

/// Brings a VASS into normalized form: the initial value of component 1 is
/// produced by a start transition, and zero-tests that add to component 1
/// are split into a pure test followed by the addition.
pub fn normalize_vassz<N: Natural>(s: &Vassz<N>) -> Result<Vassz<N>, ModelError> {
    let vz = s.counters();
    if let Some(z) = vz.ztests().iter().find(|z| z.delta[0] < 0) {
        return Err(ModelError::UnnormalizableZeroTest(z.name.clone()));
    }
    let mut actions = vz.base().actions().to_vec();
    let mut ztests = Vec::new();
    let mut states = s.states().to_vec();
    let mut trans = Vec::new();
    let taken = |name: &str, actions: &[Action]| actions.iter().any(|a| a.name == name) || vz.action(name).is_some();
    let mut post_of: HashMap<String, String> = HashMap::new();
    for z in vz.ztests() {
        let c = z.delta[0];
        let mut tested = z.delta.clone();
        tested[0] = 0;
        ztests.push(Action::new(z.name.clone(), tested));
        if c > 0 {
            let mut name = format!("{}#post", z.name);
            while taken(&name, &actions) {
                name.push('\'');
            }
            actions.push(Action::new(name.clone(), on_first(z.delta.len(), c)));
            post_of.insert(z.name.clone(), name);
        }
    }
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
    let mut init = s.init().clone();
    let mut init_state = s.init_state();
    if let OmegaNat::Fin(k) = init.get(1).clone() {
        if !k.is_zero() {
            let k = k.to_i64().ok_or(OmegaError::Overflow)?;
            let mut name = "#start".to_string();
            while taken(&name, &actions) {
                name.push('\'');
            }
            actions.push(Action::new(name.clone(), on_first(vz.dim(), k)));
            let start = states.len();
            states.push("#start".to_string());
            trans.push(Transition {
                from: start,
                action: name,
                to: init_state,
            });
            init_state = start;
            init.set(1, OmegaNat::zero());
        }
    }
    let counters = Vasz::new(Vas::new(init, actions)?, ztests)?;
    Vassz::new(counters, states, trans, init_state)
}

/// Wraps a VAS with zero-test as a one-state VASS and normalizes it.
pub fn normalize<N: Natural>(vz: &Vasz<N>) -> Result<Vassz<N>, ModelError> {
    let trans = vz
        .all_actions()
        .map(|(a, _)| Transition {
            from: 0,
            action: a.name.clone(),
            to: 0,
        })
        .collect();
    let wrapped = Vassz::new(vz.clone(), vec!["#run".to_string()], trans, 0)?;
    normalize_vassz(&wrapped)
}
