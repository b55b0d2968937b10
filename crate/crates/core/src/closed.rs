//! Finite bases of downward-closed subsets of ℕ_ω^d and upward-closed subsets of ℕ^d.
//!
//! A [`DownBasis`] `B` stands for `↓B`, an [`UpBasis`] `U` for `↑U`. Both are
//! kept minimal and sorted, so structural equality is set equality.

use std::fmt;

use crate::omega::{Natural, OmegaError, OmegaNat, OmegaVec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Inclusion {
    Subset,
    Superset,
    Equal,
    Incomparable,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DownBasis<N> {
    dim: usize,
    elems: Vec<OmegaVec<N>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UpBasis<N> {
    dim: usize,
    elems: Vec<OmegaVec<N>>,
}

fn check_dims<N: Natural>(dim: usize, vs: &[OmegaVec<N>]) -> Result<(), OmegaError> {
    match vs.iter().find(|v| v.dim() != dim) {
        Some(v) => Err(OmegaError::DimMismatch {
            left: dim,
            right: v.dim(),
        }),
        None => Ok(()),
    }
}

/// Keeps the elements that are maximal (`keep_max`) or minimal for ≤, sorted.
fn extremal<N: Natural>(mut vs: Vec<OmegaVec<N>>, keep_max: bool) -> Vec<OmegaVec<N>> {
    vs.sort();
    vs.dedup();
    let mut keep = vec![true; vs.len()];
    for i in 0..vs.len() {
        for j in 0..vs.len() {
            if i == j || !keep[j] {
                continue;
            }
            let dominated = if keep_max {
                vs[i].leq_unchecked(&vs[j])
            } else {
                vs[j].leq_unchecked(&vs[i])
            };
            if dominated {
                keep[i] = false;
                break;
            }
        }
    }
    vs.into_iter().zip(keep).filter_map(|(v, k)| k.then_some(v)).collect()
}

impl<N: Natural> DownBasis<N> {
    pub fn empty(dim: usize) -> Self {
        DownBasis { dim, elems: vec![] }
    }

    /// The basis `{(ω,…,ω)}` of the whole space.
    pub fn full(dim: usize) -> Self {
        DownBasis {
            dim,
            elems: vec![OmegaVec::omegas(dim)],
        }
    }

    /// The maximal elements of `vs`; `↓result = ↓vs`.
    pub fn minimize(dim: usize, vs: impl IntoIterator<Item = OmegaVec<N>>) -> Result<Self, OmegaError> {
        let vs: Vec<_> = vs.into_iter().collect();
        check_dims(dim, &vs)?;
        Ok(DownBasis {
            dim,
            elems: extremal(vs, true),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elems(&self) -> &[OmegaVec<N>] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, OmegaVec<N>> {
        self.elems.iter()
    }

    /// `v ∈ ↓B`.
    pub fn contains(&self, v: &OmegaVec<N>) -> Result<bool, OmegaError> {
        check_dims(self.dim, std::slice::from_ref(v))?;
        Ok(self.elems.iter().any(|b| v.leq_unchecked(b)))
    }

    fn included_in(&self, other: &Self) -> bool {
        self.elems
            .iter()
            .all(|b| other.elems.iter().any(|c| b.leq_unchecked(c)))
    }

    pub fn compare(&self, other: &Self) -> Result<Inclusion, OmegaError> {
        if self.dim != other.dim {
            return Err(OmegaError::DimMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(match (self.included_in(other), other.included_in(self)) {
            (true, true) => Inclusion::Equal,
            (true, false) => Inclusion::Subset,
            (false, true) => Inclusion::Superset,
            (false, false) => Inclusion::Incomparable,
        })
    }

    pub fn union(&self, other: &Self) -> Result<Self, OmegaError> {
        if self.dim != other.dim {
            return Err(OmegaError::DimMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Self::minimize(self.dim, self.elems.iter().chain(&other.elems).cloned())
    }

    /// Minimal basis of `ℕ^d ∖ ↓B`.
    pub fn complement(&self) -> UpBasis<N> {
        let dim = self.dim;
        let mut gens = vec![OmegaVec::zeros(dim)];
        for b in &self.elems {
            let terms: Vec<OmegaVec<N>> = (1..=dim)
                .filter_map(|i| {
                    let bi = b.get(i).add_signed(1).ok()?;
                    bi.is_finite().then(|| {
                        let mut t = OmegaVec::zeros(dim);
                        t.set(i, bi);
                        t
                    })
                })
                .collect();
            let next: Vec<_> = gens.iter().flat_map(|g| terms.iter().map(move |t| g.join(t))).collect();
            gens = extremal(next, false);
            if gens.is_empty() {
                break;
            }
        }
        UpBasis { dim, elems: gens }
    }

    /// Basis of the filtered set `↓_f(↓B)`: elements of `↓B` that agree with
    /// `f` wherever `f` is finite, closed downward.
    pub fn filter(&self, f: &OmegaVec<N>) -> Result<Self, OmegaError> {
        check_dims(self.dim, std::slice::from_ref(f))?;
        let kept = self.elems.iter().filter_map(|b| {
            let matches = f.iter().zip(b.iter()).all(|(fi, bi)| fi.is_omega() || fi <= bi);
            matches.then(|| {
                OmegaVec::new(
                    f.iter()
                        .zip(b.iter())
                        .map(|(fi, bi)| if fi.is_omega() { bi.clone() } else { fi.clone() })
                        .collect(),
                )
            })
        });
        Self::minimize(self.dim, kept)
    }
}

impl<N: Natural> UpBasis<N> {
    pub fn empty(dim: usize) -> Self {
        UpBasis { dim, elems: vec![] }
    }

    /// The minimal elements of `vs`, which must all be finite.
    pub fn minimize(dim: usize, vs: impl IntoIterator<Item = OmegaVec<N>>) -> Result<Self, OmegaError> {
        let vs: Vec<_> = vs.into_iter().collect();
        check_dims(dim, &vs)?;
        if let Some(v) = vs.iter().find(|v| !v.is_finite()) {
            return Err(OmegaError::InfiniteEntry(v.to_string()));
        }
        Ok(UpBasis {
            dim,
            elems: extremal(vs, false),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elems(&self) -> &[OmegaVec<N>] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    /// `v ∈ ↑U`.
    pub fn contains(&self, v: &OmegaVec<N>) -> Result<bool, OmegaError> {
        check_dims(self.dim, std::slice::from_ref(v))?;
        Ok(self.elems.iter().any(|u| u.leq_unchecked(v)))
    }

    /// Adds one element and re-minimizes.
    pub fn insert(&mut self, v: OmegaVec<N>) -> Result<(), OmegaError> {
        let mut all = std::mem::take(&mut self.elems);
        all.push(v);
        *self = Self::minimize(self.dim, all)?;
        Ok(())
    }

    /// Minimal basis of the limit-closed set `ℕ^d ∖ ↑U`.
    pub fn complement(&self) -> DownBasis<N> {
        let dim = self.dim;
        let mut ideals = vec![OmegaVec::omegas(dim)];
        for u in &self.elems {
            let terms: Vec<OmegaVec<N>> = (1..=dim)
                .filter_map(|i| match u.get(i) {
                    OmegaNat::Fin(n) if !n.is_zero() => {
                        let mut t = OmegaVec::omegas(dim);
                        t.set(i, u.get(i).add_signed(-1).ok()?);
                        Some(t)
                    }
                    _ => None,
                })
                .collect();
            let next: Vec<_> = ideals
                .iter()
                .flat_map(|g| terms.iter().map(move |t| g.meet(t)))
                .collect();
            ideals = extremal(next, true);
            if ideals.is_empty() {
                break;
            }
        }
        DownBasis { dim, elems: ideals }
    }
}

fn write_basis<N: Natural>(f: &mut fmt::Formatter<'_>, elems: &[OmegaVec<N>]) -> fmt::Result {
    writeln!(f, "basis {}", elems.len())?;
    for e in elems {
        writeln!(f, "{e}")?;
    }
    Ok(())
}

impl<N: Natural> fmt::Display for DownBasis<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_basis(f, &self.elems)
    }
}

impl<N: Natural> fmt::Display for UpBasis<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_basis(f, &self.elems)
    }
}
