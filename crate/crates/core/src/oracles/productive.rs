//! Productive sequences `u_0^n a_1 u_1^n … a_k u_k^n` and their limits.

use std::fmt;

use crate::model::{Action, ModelError, Vas};
use crate::omega::{Natural, OmegaNat, OmegaVec};

/// A pair `(π, v)` with `π = (u_0, …, u_k)` and `v = a_1 … a_k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProductiveCandidate {
    pub pi: Vec<Vec<String>>,
    pub v: Vec<String>,
}

impl ProductiveCandidate {
    /// The word `u_0^n a_1 u_1^n … a_k u_k^n`.
    pub fn unroll(&self, n: usize) -> Vec<String> {
        let mut out = Vec::new();
        for (j, u) in self.pi.iter().enumerate() {
            if j > 0 {
                out.push(self.v[j - 1].clone());
            }
            for _ in 0..n {
                out.extend(u.iter().cloned());
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.v.len() + self.pi.iter().map(Vec::len).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl fmt::Display for ProductiveCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, u) in self.pi.iter().enumerate() {
            if j > 0 {
                write!(f, " {} ", self.v[j - 1])?;
            }
            f.write_str("(")?;
            f.write_str(&u.join(" "))?;
            f.write_str(")*")?;
        }
        Ok(())
    }
}

fn lookup<'a, N: Natural>(v: &'a Vas<N>, name: &str) -> Result<&'a Action, ModelError> {
    v.action(name).ok_or_else(|| ModelError::UnknownAction(name.into()))
}

/// Whether the partial sums of `δ(u_j)` stay nonnegative on the finite
/// components of the initial vector and `u_0 a_1 u_1 … a_k u_k` fires.
pub fn productive_check<N: Natural>(v: &Vas<N>, c: &ProductiveCandidate) -> Result<bool, ModelError> {
    for name in c.pi.iter().flatten().chain(&c.v) {
        lookup(v, name)?;
    }
    if c.pi.len() != c.v.len() + 1 {
        return Ok(false);
    }
    let dim = v.dim();
    let mut sum = vec![0i64; dim];
    for u in &c.pi {
        for name in u {
            for (s, d) in sum.iter_mut().zip(&lookup(v, name)?.delta) {
                *s += d;
            }
        }
        let negative = (1..=dim).any(|i| v.init().get(i).is_finite() && sum[i - 1] < 0);
        if negative {
            return Ok(false);
        }
    }
    Ok(v.fire_word(v.init(), &c.unroll(1))?.is_some())
}

/// The limit `ini + δ(v) + ω·δ(π)` of a productive candidate.
pub fn candidate_limit<N: Natural>(v: &Vas<N>, c: &ProductiveCandidate) -> Result<OmegaVec<N>, ModelError> {
    let dim = v.dim();
    let mut pumped = vec![0i64; dim];
    for name in c.pi.iter().flatten() {
        for (s, d) in pumped.iter_mut().zip(&lookup(v, name)?.delta) {
            *s += d;
        }
    }
    let mut step = vec![0i64; dim];
    for name in &c.v {
        for (s, d) in step.iter_mut().zip(&lookup(v, name)?.delta) {
            *s += d;
        }
    }
    let mut out = Vec::with_capacity(dim);
    for i in 0..dim {
        let e = &v.init().entries()[i];
        out.push(if e.is_omega() || pumped[i] > 0 {
            OmegaNat::Omega
        } else {
            e.add_signed(step[i])?
        });
    }
    Ok(OmegaVec::new(out))
}

/// One unit of enumeration work.
pub enum EnumStep<N> {
    Found(ProductiveCandidate, OmegaVec<N>),
    Working,
    Done,
}

/// Depth-first enumeration of productive candidates by increasing total
/// length. Tokens are `pump(a)` (append `a` to the current `u_j`) and
/// `step(a)` (close `u_j`, fire `a`, open `u_{j+1}`); pumps sort before
/// steps, each group by action name. Prefixes that do not fire, or that close
/// a segment with a negative partial sum, are pruned.
pub struct ProductiveEnumerator<N> {
    vas: Vas<N>,
    order: Vec<usize>,
    finite: Vec<bool>,
    max_len: Option<usize>,
    len: usize,
    tokens: Vec<usize>,
    configs: Vec<OmegaVec<N>>,
    segment: Vec<Vec<i64>>,
    closed: Vec<Vec<i64>>,
    next: Vec<usize>,
    done: bool,
}

impl<N: Natural> ProductiveEnumerator<N> {
    pub fn new(vas: &Vas<N>, max_len: Option<usize>) -> Self {
        let mut order: Vec<usize> = (0..vas.actions().len()).collect();
        order.sort_by(|&a, &b| vas.actions()[a].name.cmp(&vas.actions()[b].name));
        let dim = vas.dim();
        ProductiveEnumerator {
            finite: vas.init().iter().map(OmegaNat::is_finite).collect(),
            order,
            max_len,
            len: 0,
            tokens: vec![],
            configs: vec![vas.init().clone()],
            segment: vec![vec![0; dim]],
            closed: vec![vec![0; dim]],
            next: vec![0],
            done: false,
            vas: vas.clone(),
        }
    }

    pub fn vas(&self) -> &Vas<N> {
        &self.vas
    }

    /// Total length currently being enumerated.
    pub fn current_length(&self) -> usize {
        self.len
    }

    fn nonnegative(&self, a: &[i64], b: &[i64]) -> bool {
        a.iter()
            .zip(b)
            .zip(&self.finite)
            .all(|((x, y), &fin)| !fin || x + y >= 0)
    }

    fn candidate(&self) -> ProductiveCandidate {
        let m = self.order.len();
        let mut pi = vec![vec![]];
        let mut v = vec![];
        for &t in &self.tokens {
            let name = self.vas.actions()[self.order[t % m]].name.clone();
            if t < m {
                pi.last_mut().unwrap().push(name);
            } else {
                v.push(name);
                pi.push(vec![]);
            }
        }
        ProductiveCandidate { pi, v }
    }

    fn limit(&self, k: usize) -> OmegaVec<N> {
        let pumped: Vec<i64> = self.closed[k]
            .iter()
            .zip(&self.segment[k])
            .map(|(a, b)| a + b)
            .collect();
        OmegaVec::new(
            self.configs[k]
                .iter()
                .zip(&pumped)
                .map(|(e, &p)| {
                    if p > 0 {
                        OmegaNat::Omega
                    } else {
                        e.add_signed(-p).expect("pumped sum is zero here")
                    }
                })
                .collect(),
        )
    }

    fn pop(&mut self) {
        self.tokens.pop();
        self.configs.pop();
        self.segment.pop();
        self.closed.pop();
        self.next.pop();
    }

    /// Performs one node visit.
    pub fn step(&mut self) -> EnumStep<N> {
        if self.done {
            return EnumStep::Done;
        }
        let k = self.tokens.len();
        if k == self.len {
            let found = if self.nonnegative(&self.closed[k], &self.segment[k]) {
                Some((self.candidate(), self.limit(k)))
            } else {
                None
            };
            self.backtrack();
            return match found {
                Some((c, l)) => EnumStep::Found(c, l),
                None => EnumStep::Working,
            };
        }
        let m = self.order.len();
        let t = self.next[k];
        if t >= 2 * m {
            self.backtrack();
            return EnumStep::Working;
        }
        self.next[k] += 1;
        let delta = &self.vas.actions()[self.order[t % m]].delta;
        let Some(cfg) = self.configs[k].add_delta(delta).expect("dimensions validated") else {
            return EnumStep::Working;
        };
        let (seg, closed) = if t < m {
            let seg = self.segment[k].iter().zip(delta).map(|(a, b)| a + b).collect();
            (seg, self.closed[k].clone())
        } else {
            if !self.nonnegative(&self.closed[k], &self.segment[k]) {
                return EnumStep::Working;
            }
            let closed = self.closed[k]
                .iter()
                .zip(&self.segment[k])
                .map(|(a, b)| a + b)
                .collect();
            (vec![0; delta.len()], closed)
        };
        self.tokens.push(t);
        self.configs.push(cfg);
        self.segment.push(seg);
        self.closed.push(closed);
        self.next.push(0);
        EnumStep::Working
    }

    /// Leaves the current node; at the root, moves on to the next length.
    fn backtrack(&mut self) {
        if self.tokens.is_empty() {
            self.len += 1;
            self.next[0] = 0;
            if self.max_len.is_some_and(|b| self.len > b) {
                self.done = true;
            }
        } else {
            self.pop();
        }
    }
}

impl<N: Natural> Iterator for ProductiveEnumerator<N> {
    type Item = (ProductiveCandidate, OmegaVec<N>);

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            match self.step() {
                EnumStep::Found(c, l) => return Some((c, l)),
                EnumStep::Working => {}
                EnumStep::Done => return None,
            }
        }
    }
}

/// All productive candidates of total length at most `size_bound`, with their limits.
pub fn enumerate_productive<N: Natural>(v: &Vas<N>, size_bound: usize) -> ProductiveEnumerator<N> {
    ProductiveEnumerator::new(v, Some(size_bound))
}
