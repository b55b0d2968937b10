//! Vector addition systems, their zero-test and control-state extensions,
//! and the derived systems the analyses build from them.

mod encode;
pub mod parse;
mod product;

use std::collections::HashSet;

use thiserror::Error;

use crate::omega::{Natural, OmegaError, OmegaNat, OmegaVec, PositionSet};

pub use encode::{encode_vassz, normalize, normalize_vassz, Layout};
pub use product::{buchi_product, build_repeated_product, BuchiProduct, RepeatedProduct};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("action `{name}` has dimension {got}, expected {expected}")]
    DeltaDim { name: String, expected: usize, got: usize },
    #[error("system is not normalized: {0}")]
    NotNormalized(String),
    #[error("zero-test `{0}` decrements the tested component and cannot be normalized")]
    UnnormalizableZeroTest(String),
    #[error("label `{0}` is not in the automaton alphabet")]
    AlphabetMismatch(String),
    #[error("invalid automaton: {0}")]
    BadAutomaton(String),
    #[error(transparent)]
    Omega(#[from] OmegaError),
}

/// A named action with its integer displacement.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Action {
    pub name: String,
    pub delta: Vec<i64>,
}

impl Action {
    pub fn new(name: impl Into<String>, delta: Vec<i64>) -> Self {
        Action {
            name: name.into(),
            delta,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vas<N> {
    actions: Vec<Action>,
    init: OmegaVec<N>,
}

impl<N: Natural> Vas<N> {
    pub fn new(init: OmegaVec<N>, actions: Vec<Action>) -> Result<Self, ModelError> {
        let dim = init.dim();
        let mut seen = HashSet::new();
        for a in &actions {
            if a.delta.len() != dim {
                return Err(ModelError::DeltaDim {
                    name: a.name.clone(),
                    expected: dim,
                    got: a.delta.len(),
                });
            }
            if !seen.insert(a.name.as_str()) {
                return Err(ModelError::DuplicateName(a.name.clone()));
            }
        }
        Ok(Vas { actions, init })
    }

    pub fn dim(&self) -> usize {
        self.init.dim()
    }

    pub fn init(&self) -> &OmegaVec<N> {
        &self.init
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn action(&self, name: &str) -> Option<&Action> {
        self.actions.iter().find(|a| a.name == name)
    }

    pub fn fire(&self, x: &OmegaVec<N>, name: &str) -> Result<Option<OmegaVec<N>>, ModelError> {
        let a = self
            .action(name)
            .ok_or_else(|| ModelError::UnknownAction(name.into()))?;
        Ok(x.add_delta(&a.delta)?)
    }

    pub fn fire_word<S: AsRef<str>>(&self, x: &OmegaVec<N>, word: &[S]) -> Result<Option<OmegaVec<N>>, ModelError> {
        let mut cur = x.clone();
        for a in word {
            match self.fire(&cur, a.as_ref())? {
                Some(next) => cur = next,
                None => return Ok(None),
            }
        }
        Ok(Some(cur))
    }

    /// The same system started from `x`.
    pub fn reinit(&self, x: OmegaVec<N>) -> Result<Self, ModelError> {
        if x.dim() != self.dim() {
            return Err(OmegaError::DimMismatch {
                left: self.dim(),
                right: x.dim(),
            }
            .into());
        }
        Ok(Vas {
            actions: self.actions.clone(),
            init: x,
        })
    }

    fn fresh_name(&self, base: String) -> String {
        let mut name = base;
        while self.action(&name).is_some() {
            name.push('\'');
        }
        name
    }

    fn with_unit_decrements(&self, decrement: impl Fn(usize) -> bool, tag: &str) -> Self {
        let dim = self.dim();
        let mut actions = self.actions.clone();
        for i in 1..=dim {
            let mut delta = vec![0; dim];
            if decrement(i) {
                delta[i - 1] = -1;
            }
            let name = self.fresh_name(format!("b{i}#{tag}"));
            actions.push(Action::new(name, delta));
        }
        Vas {
            actions,
            init: self.init.clone(),
        }
    }
}

/// The system `V_P`: one extra action per position, a no-op on `P` and a
/// unit decrement elsewhere, so that `Post*(V_P)` is the `≤_P`-cover of `V`.
pub fn build_vas_p<N: Natural>(v: &Vas<N>, positions: &PositionSet) -> Result<Vas<N>, ModelError> {
    if positions.dim() != v.dim() {
        return Err(OmegaError::DimMismatch {
            left: v.dim(),
            right: positions.dim(),
        }
        .into());
    }
    Ok(v.with_unit_decrements(|i| !positions.contains(i), "vasP"))
}

/// The system `V_y` (unit decrements on the ω positions of `y`) together
/// with the sequence `ℓ ↦ y_ℓ`.
pub fn build_vas_y<N: Natural>(
    v: &Vas<N>,
    y: &OmegaVec<N>,
) -> Result<(Vas<N>, impl Fn(u64) -> OmegaVec<N>), ModelError> {
    if y.dim() != v.dim() {
        return Err(OmegaError::DimMismatch {
            left: v.dim(),
            right: y.dim(),
        }
        .into());
    }
    let vy = v.with_unit_decrements(|i| y.get(i).is_omega(), "vasy");
    let y = y.clone();
    let at = move |l: u64| {
        OmegaVec::new(
            y.iter()
                .map(|e| if e.is_omega() { OmegaNat::from_u64(l) } else { e.clone() })
                .collect(),
        )
    };
    Ok((vy, at))
}

/// A VAS whose zero-test actions fire only when component 1 is 0.
///
/// The text format admits exactly one zero-test; several zero-test actions
/// on the same component arise when control states are encoded as counters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vasz<N> {
    base: Vas<N>,
    ztests: Vec<Action>,
}

impl<N: Natural> Vasz<N> {
    pub fn new(base: Vas<N>, ztests: Vec<Action>) -> Result<Self, ModelError> {
        let dim = base.dim();
        for z in &ztests {
            if z.delta.len() != dim {
                return Err(ModelError::DeltaDim {
                    name: z.name.clone(),
                    expected: dim,
                    got: z.delta.len(),
                });
            }
            if base.action(&z.name).is_some() || ztests.iter().filter(|o| o.name == z.name).count() > 1 {
                return Err(ModelError::DuplicateName(z.name.clone()));
            }
        }
        Ok(Vasz { base, ztests })
    }

    /// A plain VAS seen as a system without zero-test.
    pub fn without_test(base: Vas<N>) -> Self {
        Vasz { base, ztests: vec![] }
    }

    pub fn base(&self) -> &Vas<N> {
        &self.base
    }

    pub fn ztests(&self) -> &[Action] {
        &self.ztests
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn init(&self) -> &OmegaVec<N> {
        self.base.init()
    }

    pub fn is_ztest(&self, name: &str) -> bool {
        self.ztests.iter().any(|z| z.name == name)
    }

    /// Every action, ordinary ones first.
    pub fn all_actions(&self) -> impl Iterator<Item = (&Action, bool)> {
        self.base
            .actions
            .iter()
            .map(|a| (a, false))
            .chain(self.ztests.iter().map(|z| (z, true)))
    }

    pub fn action(&self, name: &str) -> Option<(&Action, bool)> {
        self.all_actions().find(|(a, _)| a.name == name)
    }

    /// Normalized form: `init(1) = 0` and every zero-test leaves component 1 alone.
    pub fn is_normalized(&self) -> bool {
        *self.init().get(1) == OmegaNat::zero() && self.ztests.iter().all(|z| z.delta[0] == 0)
    }

    pub fn fire(&self, x: &OmegaVec<N>, name: &str) -> Result<Option<OmegaVec<N>>, ModelError> {
        let (a, test) = self
            .action(name)
            .ok_or_else(|| ModelError::UnknownAction(name.into()))?;
        if test && *x.get(1) != OmegaNat::zero() {
            return Ok(None);
        }
        Ok(x.add_delta(&a.delta)?)
    }

    pub fn fire_word<S: AsRef<str>>(&self, x: &OmegaVec<N>, word: &[S]) -> Result<Option<OmegaVec<N>>, ModelError> {
        let mut cur = x.clone();
        for a in word {
            match self.fire(&cur, a.as_ref())? {
                Some(next) => cur = next,
                None => return Ok(None),
            }
        }
        Ok(Some(cur))
    }

    /// The VAS obtained by deleting the zero-test actions.
    pub fn strip_zero_test(&self) -> Vas<N> {
        self.base.clone()
    }

    pub fn reinit(&self, x: OmegaVec<N>) -> Result<Self, ModelError> {
        Ok(Vasz {
            base: self.base.reinit(x)?,
            ztests: self.ztests.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Transition {
    pub from: usize,
    pub action: String,
    pub to: usize,
}

/// A VASS, possibly with zero-test actions on component 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vassz<N> {
    counters: Vasz<N>,
    states: Vec<String>,
    trans: Vec<Transition>,
    init_state: usize,
}

impl<N: Natural> Vassz<N> {
    pub fn new(
        counters: Vasz<N>,
        states: Vec<String>,
        trans: Vec<Transition>,
        init_state: usize,
    ) -> Result<Self, ModelError> {
        let mut seen = HashSet::new();
        for s in &states {
            if !seen.insert(s.as_str()) {
                return Err(ModelError::DuplicateName(s.clone()));
            }
        }
        if init_state >= states.len() {
            return Err(ModelError::UnknownState(format!("#{init_state}")));
        }
        for t in &trans {
            if t.from >= states.len() || t.to >= states.len() {
                return Err(ModelError::UnknownState(format!("#{}", t.from.max(t.to))));
            }
            if counters.action(&t.action).is_none() {
                return Err(ModelError::UnknownAction(t.action.clone()));
            }
        }
        Ok(Vassz {
            counters,
            states,
            trans,
            init_state,
        })
    }

    pub fn counters(&self) -> &Vasz<N> {
        &self.counters
    }

    pub fn dim(&self) -> usize {
        self.counters.dim()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_index(&self, name: &str) -> Result<usize, ModelError> {
        self.states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| ModelError::UnknownState(name.into()))
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.trans
    }

    pub fn init_state(&self) -> usize {
        self.init_state
    }

    pub fn init(&self) -> &OmegaVec<N> {
        self.counters.init()
    }

    /// Fires transition `t` from `(state, x)`.
    pub fn fire(&self, state: usize, x: &OmegaVec<N>, t: usize) -> Result<Option<(usize, OmegaVec<N>)>, ModelError> {
        let tr = &self.trans[t];
        if tr.from != state {
            return Ok(None);
        }
        Ok(self.counters.fire(x, &tr.action)?.map(|y| (tr.to, y)))
    }

    pub fn with_init(&self, init_state: usize, x: OmegaVec<N>) -> Result<Self, ModelError> {
        Ok(Vassz {
            counters: self.counters.reinit(x)?,
            states: self.states.clone(),
            trans: self.trans.clone(),
            init_state,
        })
    }
}

/// A VASS whose transitions carry symbols of an alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledVassz<N> {
    system: Vassz<N>,
    labels: Vec<String>,
}

impl<N: Natural> LabeledVassz<N> {
    pub fn new(system: Vassz<N>, labels: Vec<String>) -> Result<Self, ModelError> {
        if labels.len() != system.transitions().len() {
            return Err(ModelError::BadAutomaton(format!(
                "{} labels for {} transitions",
                labels.len(),
                system.transitions().len()
            )));
        }
        Ok(LabeledVassz { system, labels })
    }

    pub fn system(&self) -> &Vassz<N> {
        &self.system
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuchiAutomaton {
    pub alphabet: Vec<String>,
    pub states: Vec<String>,
    pub init: usize,
    pub accepting: Vec<usize>,
    pub trans: Vec<(usize, String, usize)>,
}

impl BuchiAutomaton {
    pub fn validate(&self) -> Result<(), ModelError> {
        let n = self.states.len();
        if self.init >= n || self.accepting.iter().any(|&s| s >= n) {
            return Err(ModelError::BadAutomaton("undeclared initial or accepting state".into()));
        }
        for (s, sym, t) in &self.trans {
            if *s >= n || *t >= n {
                return Err(ModelError::BadAutomaton("transition on undeclared state".into()));
            }
            if !self.alphabet.contains(sym) {
                return Err(ModelError::AlphabetMismatch(sym.clone()));
            }
        }
        Ok(())
    }
}
