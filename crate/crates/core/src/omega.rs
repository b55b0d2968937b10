//! Arithmetic and orderings on ℕ∪{ω} and on vectors over it.
//!
//! Everything here is generic over the integer carrier through [`Natural`],
//! so the same order algebra runs on `u32`, `u64`, `u128` or `BigUint`.
//! Components are numbered from 1 in every message and in [`PositionSet`];
//! the storage itself is 0-based.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use num_traits::{CheckedAdd, CheckedMul, CheckedSub, FromPrimitive, ToPrimitive, Unsigned};
use thiserror::Error;

/// Unsigned integer types usable as the finite part of ℕ_ω.
pub trait Natural:
    Clone
    + Ord
    + Hash
    + fmt::Debug
    + fmt::Display
    + FromStr
    + Unsigned
    + CheckedAdd
    + CheckedSub
    + CheckedMul
    + ToPrimitive
    + FromPrimitive
    + Send
    + Sync
    + 'static
{
}

impl<T> Natural for T where
    T: Clone
        + Ord
        + Hash
        + fmt::Debug
        + fmt::Display
        + FromStr
        + Unsigned
        + CheckedAdd
        + CheckedSub
        + CheckedMul
        + ToPrimitive
        + FromPrimitive
        + Send
        + Sync
        + 'static
{
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OmegaError {
    #[error("arithmetic result is negative")]
    NegativeResult,
    #[error("arithmetic overflow in the integer carrier")]
    Overflow,
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("position {pos} is outside 1..{dim}")]
    BadPosition { pos: usize, dim: usize },
    #[error("vectors are not comparable (left is not below right)")]
    NotComparable,
    #[error("upward bases hold finite vectors only, got {0}")]
    InfiniteEntry(String),
    #[error("cannot parse `{text}`: {reason}")]
    Parse { text: String, reason: String },
}

/// An element of ℕ_ω. The derived order puts every finite value below `Omega`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OmegaNat<N> {
    Fin(N),
    Omega,
}

impl<N: Natural> OmegaNat<N> {
    pub fn zero() -> Self {
        OmegaNat::Fin(N::zero())
    }

    pub fn is_omega(&self) -> bool {
        matches!(self, OmegaNat::Omega)
    }

    pub fn is_finite(&self) -> bool {
        !self.is_omega()
    }

    pub fn finite(&self) -> Option<&N> {
        match self {
            OmegaNat::Fin(n) => Some(n),
            OmegaNat::Omega => None,
        }
    }

    pub fn from_u64(v: u64) -> Self {
        OmegaNat::Fin(N::from_u64(v).expect("every carrier holds u64 values"))
    }

    /// `self + delta`, where ω absorbs any integer.
    pub fn add_signed(&self, delta: i64) -> Result<Self, OmegaError> {
        match self {
            OmegaNat::Omega => Ok(OmegaNat::Omega),
            OmegaNat::Fin(n) => add_signed_nat(n, delta).map(OmegaNat::Fin),
        }
    }

    /// Multiplication with ω·0 = 0·ω = 0 and ω·k = k·ω = ω for k ≠ 0.
    pub fn mul(&self, other: &Self) -> Result<Self, OmegaError> {
        match (self, other) {
            (OmegaNat::Fin(a), OmegaNat::Fin(b)) => a.checked_mul(b).map(OmegaNat::Fin).ok_or(OmegaError::Overflow),
            (OmegaNat::Fin(a), OmegaNat::Omega) | (OmegaNat::Omega, OmegaNat::Fin(a)) => {
                if a.is_zero() {
                    Ok(Self::zero())
                } else {
                    Ok(OmegaNat::Omega)
                }
            }
            (OmegaNat::Omega, OmegaNat::Omega) => Ok(OmegaNat::Omega),
        }
    }
}

/// Adds a signed offset to a natural number, failing below zero.
pub fn add_signed_nat<N: Natural>(n: &N, delta: i64) -> Result<N, OmegaError> {
    let magnitude = N::from_u64(delta.unsigned_abs()).ok_or(OmegaError::Overflow)?;
    if delta >= 0 {
        n.checked_add(&magnitude).ok_or(OmegaError::Overflow)
    } else {
        n.checked_sub(&magnitude).ok_or(OmegaError::NegativeResult)
    }
}

impl<N: Natural> fmt::Display for OmegaNat<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OmegaNat::Fin(n) => write!(f, "{n}"),
            OmegaNat::Omega => f.write_str("w"),
        }
    }
}

impl<N: Natural> FromStr for OmegaNat<N> {
    type Err = OmegaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "w" || s == "ω" {
            return Ok(OmegaNat::Omega);
        }
        s.parse::<N>().map(OmegaNat::Fin).map_err(|_| OmegaError::Parse {
            text: s.to_string(),
            reason: "expected a natural number or `w`".into(),
        })
    }
}

/// A vector of ℕ_ω^d with d ≥ 1.
///
/// `Ord` is the lexicographic order (ω greatest) used for canonical display;
/// the pointwise partial order is [`OmegaVec::leq`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OmegaVec<N> {
    entries: Vec<OmegaNat<N>>,
}

impl<N: Natural> OmegaVec<N> {
    /// Panics on an empty vector; dimension 0 is not a meaningful system.
    pub fn new(entries: Vec<OmegaNat<N>>) -> Self {
        assert!(!entries.is_empty(), "vectors have dimension at least 1");
        OmegaVec { entries }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::new(vec![OmegaNat::zero(); dim])
    }

    pub fn omegas(dim: usize) -> Self {
        Self::new(vec![OmegaNat::Omega; dim])
    }

    pub fn from_finite(values: &[u64]) -> Self {
        Self::new(values.iter().map(|&v| OmegaNat::from_u64(v)).collect())
    }

    /// The vector with 1 at `pos` (1-based) and 0 elsewhere.
    pub fn unit(dim: usize, pos: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.entries[pos - 1] = OmegaNat::from_u64(1);
        v
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[OmegaNat<N>] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<OmegaNat<N>> {
        self.entries
    }

    /// Component `pos`, 1-based.
    pub fn get(&self, pos: usize) -> &OmegaNat<N> {
        &self.entries[pos - 1]
    }

    pub fn set(&mut self, pos: usize, value: OmegaNat<N>) {
        self.entries[pos - 1] = value;
    }

    pub fn iter(&self) -> std::slice::Iter<'_, OmegaNat<N>> {
        self.entries.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(OmegaNat::is_finite)
    }

    pub fn omega_positions(&self) -> Vec<usize> {
        (1..=self.dim()).filter(|&i| self.get(i).is_omega()).collect()
    }

    fn check_dim(&self, other: &Self) -> Result<(), OmegaError> {
        if self.dim() == other.dim() {
            Ok(())
        } else {
            Err(OmegaError::DimMismatch {
                left: self.dim(),
                right: other.dim(),
            })
        }
    }

    /// Pointwise order with n ≤ ω.
    pub fn leq(&self, other: &Self) -> Result<bool, OmegaError> {
        self.check_dim(other)?;
        Ok(self.leq_unchecked(other))
    }

    /// [`leq`](Self::leq) for callers that already know the dimensions agree.
    pub fn leq_unchecked(&self, other: &Self) -> bool {
        self.entries.iter().zip(&other.entries).all(|(a, b)| a <= b)
    }

    /// `x ≤_P y`: equality on `positions`, pointwise order elsewhere.
    pub fn leq_on(&self, other: &Self, positions: &PositionSet) -> Result<bool, OmegaError> {
        self.check_dim(other)?;
        positions.check_dim(self.dim())?;
        Ok(self.entries.iter().zip(&other.entries).enumerate().all(|(k, (a, b))| {
            if positions.contains(k + 1) {
                a == b
            } else {
                a <= b
            }
        }))
    }

    /// The acceleration `self ∇ other`: components that grew become ω.
    pub fn widen(&self, other: &Self) -> Result<Self, OmegaError> {
        if !self.leq(other)? {
            return Err(OmegaError::NotComparable);
        }
        Ok(OmegaVec::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| if a < b { OmegaNat::Omega } else { a.clone() })
                .collect(),
        ))
    }

    /// `self + delta` componentwise; `Ok(None)` when some component would go negative.
    pub fn add_delta(&self, delta: &[i64]) -> Result<Option<Self>, OmegaError> {
        if delta.len() != self.dim() {
            return Err(OmegaError::DimMismatch {
                left: self.dim(),
                right: delta.len(),
            });
        }
        let mut out = Vec::with_capacity(self.dim());
        for (x, &d) in self.entries.iter().zip(delta) {
            match x.add_signed(d) {
                Ok(v) => out.push(v),
                Err(OmegaError::NegativeResult) => return Ok(None),
                Err(e) => return Err(e),
            }
        }
        Ok(Some(OmegaVec::new(out)))
    }

    /// Componentwise maximum.
    pub fn join(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        OmegaVec::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.max(b).clone())
                .collect(),
        )
    }

    /// Componentwise minimum.
    pub fn meet(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        OmegaVec::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.min(b).clone())
                .collect(),
        )
    }

    /// Sum of the finite entries, saturating; used to order witness searches.
    pub fn finite_norm(&self) -> u128 {
        self.entries
            .iter()
            .filter_map(|e| e.finite().and_then(|n| n.to_u128()))
            .fold(0u128, u128::saturating_add)
    }
}

impl<N: Natural> fmt::Display for OmegaVec<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, e) in self.entries.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl<N: Natural> FromStr for OmegaVec<N> {
    type Err = OmegaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() {
            return Err(OmegaError::Parse {
                text: s.into(),
                reason: "empty vector".into(),
            });
        }
        let entries = s.split(',').map(str::parse).collect::<Result<Vec<OmegaNat<N>>, _>>()?;
        Ok(OmegaVec::new(entries))
    }
}

/// A set of 1-based positions within a fixed dimension.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PositionSet {
    dim: usize,
    positions: BTreeSet<usize>,
}

impl PositionSet {
    pub fn new(dim: usize, positions: impl IntoIterator<Item = usize>) -> Result<Self, OmegaError> {
        let positions: BTreeSet<usize> = positions.into_iter().collect();
        if let Some(&pos) = positions.iter().find(|&&p| p == 0 || p > dim) {
            return Err(OmegaError::BadPosition { pos, dim });
        }
        Ok(PositionSet { dim, positions })
    }

    pub fn empty(dim: usize) -> Self {
        PositionSet {
            dim,
            positions: BTreeSet::new(),
        }
    }

    pub fn full(dim: usize) -> Self {
        PositionSet {
            dim,
            positions: (1..=dim).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn contains(&self, pos: usize) -> bool {
        self.positions.contains(&pos)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.positions.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    fn check_dim(&self, dim: usize) -> Result<(), OmegaError> {
        if self.dim == dim {
            Ok(())
        } else {
            Err(OmegaError::DimMismatch {
                left: dim,
                right: self.dim,
            })
        }
    }

    /// Parses `1,3` (or the empty string) for a given dimension.
    pub fn parse(text: &str, dim: usize) -> Result<Self, OmegaError> {
        let positions = text
            .split(',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>().map_err(|_| OmegaError::Parse {
                    text: t.into(),
                    reason: "expected a position".into(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(dim, positions)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type V = OmegaVec<u64>;
    type O = OmegaNat<u64>;

    fn v(s: &str) -> V {
        s.parse().unwrap()
    }

    #[test]
    fn omega_absorbs_addition() {
        assert_eq!(O::Omega.add_signed(-5), Ok(O::Omega));
        assert_eq!(O::Fin(3).add_signed(0), Ok(O::Fin(3)));
        assert_eq!(O::Fin(2).add_signed(-3), Err(OmegaError::NegativeResult));
        assert_eq!(O::Fin(u64::MAX).add_signed(1), Err(OmegaError::Overflow));
    }

    #[test]
    fn multiplication_by_zero_kills_omega() {
        assert_eq!(O::Omega.mul(&O::Fin(0)), Ok(O::Fin(0)));
        assert_eq!(O::Fin(0).mul(&O::Omega), Ok(O::Fin(0)));
        assert_eq!(O::Omega.mul(&O::Fin(3)), Ok(O::Omega));
        assert_eq!(O::Fin(2).mul(&O::Fin(3)), Ok(O::Fin(6)));
    }

    #[test]
    fn pointwise_order() {
        assert!(v("3,w").leq(&v("w,w")).unwrap());
        assert!(!v("4,3").leq(&v("4,2")).unwrap());
        assert!(v("4,3").leq(&v("4,3")).unwrap());
        assert_eq!(
            v("1,2").leq(&v("1,2,3")),
            Err(OmegaError::DimMismatch { left: 2, right: 3 })
        );
    }

    #[test]
    fn refined_order() {
        let p1 = PositionSet::new(2, [1]).unwrap();
        assert!(v("1,2").leq_on(&v("1,5"), &p1).unwrap());
        assert!(!v("1,2").leq_on(&v("2,5"), &p1).unwrap());
        assert!(v("1,2").leq_on(&v("2,5"), &PositionSet::empty(2)).unwrap());
        assert!(!v("1,2").leq_on(&v("1,5"), &PositionSet::full(2)).unwrap());
        assert_eq!(
            PositionSet::new(2, [3]),
            Err(OmegaError::BadPosition { pos: 3, dim: 2 })
        );
        assert!(v("1,2").leq_on(&v("1,2"), &PositionSet::empty(3)).is_err());
    }

    #[test]
    fn widening() {
        assert_eq!(v("0,1,2").widen(&v("0,3,2")).unwrap(), v("0,w,2"));
        assert_eq!(v("0,1,2").widen(&v("0,1,2")).unwrap(), v("0,1,2"));
        assert_eq!(v("0,0").widen(&v("0,5")).unwrap(), v("0,w"));
        assert_eq!(v("1,0").widen(&v("0,5")), Err(OmegaError::NotComparable));
    }

    #[test]
    fn text_round_trip() {
        let x = v("0,w,3");
        assert_eq!(x.to_string(), "0,w,3");
        assert!("0,,1".parse::<V>().is_err());
        assert!("".parse::<V>().is_err());
        assert!("0,-1".parse::<V>().is_err());
    }

    #[test]
    fn big_carrier() {
        use num_bigint::BigUint;
        let x: OmegaVec<BigUint> = "18446744073709551615,w".parse().unwrap();
        let y = x.add_delta(&[1, -3]).unwrap().unwrap();
        assert_eq!(y.to_string(), "18446744073709551616,w");
    }

    fn grid(dim: usize, max: u64) -> Vec<V> {
        let values: Vec<O> = (0..=max).map(O::Fin).chain([O::Omega]).collect();
        let mut out = vec![vec![]];
        for _ in 0..dim {
            out = out
                .into_iter()
                .flat_map(|p: Vec<O>| {
                    values.iter().map(move |x| {
                        let mut q = p.clone();
                        q.push(x.clone());
                        q
                    })
                })
                .collect();
        }
        out.into_iter().map(V::new).collect()
    }

    #[test]
    fn order_is_partial_order_on_grid() {
        let g = grid(2, 2);
        for x in &g {
            assert!(x.leq_unchecked(x));
            for y in &g {
                if x.leq_unchecked(y) && y.leq_unchecked(x) {
                    assert_eq!(x, y);
                }
                for z in &g {
                    if x.leq_unchecked(y) && y.leq_unchecked(z) {
                        assert!(x.leq_unchecked(z));
                    }
                }
            }
        }
    }

    #[test]
    fn refined_order_refines_pointwise_and_widen_is_upper_bound() {
        let g = grid(2, 2);
        let sets = [
            PositionSet::empty(2),
            PositionSet::new(2, [1]).unwrap(),
            PositionSet::new(2, [2]).unwrap(),
            PositionSet::full(2),
        ];
        for x in &g {
            for y in &g {
                for p in &sets {
                    if x.leq_on(y, p).unwrap() {
                        assert!(x.leq_unchecked(y));
                    }
                }
                assert_eq!(x.leq_on(y, &sets[0]).unwrap(), x.leq_unchecked(y));
                assert_eq!(x.leq_on(y, &sets[3]).unwrap(), x == y);
                if x.leq_unchecked(y) {
                    let w = x.widen(y).unwrap();
                    assert!(x.leq_unchecked(&w) && y.leq_unchecked(&w));
                }
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn mul_distributes_over_add(k in 0u64..1000, a in 0u64..1000, b in 0u64..1000) {
            let lhs = O::Fin(k).mul(&O::Fin(a).add_signed(b as i64).unwrap()).unwrap();
            let rhs = O::Fin(k).mul(&O::Fin(a)).unwrap().add_signed((k * b) as i64).unwrap();
            proptest::prop_assert_eq!(lhs, rhs);
        }
    }
}
