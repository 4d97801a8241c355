use std::collections::BTreeMap;

use serde::Serialize;

use crate::numerics::Scalar;

/// Finitely supported sub-probability plus the mass that left the tracked window.
/// The true law is `masses + r` for some nonnegative `r` of total `escaped`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SparseDistribution<T> {
    pub masses: BTreeMap<u64, T>,
    pub escaped: T,
}

impl<T: Scalar> SparseDistribution<T> {
    pub fn point(x: u64) -> Self {
        let mut masses = BTreeMap::new();
        masses.insert(x, T::one());
        Self { masses, escaped: T::zero() }
    }

    pub fn mass(&self, j: u64) -> T {
        self.masses.get(&j).cloned().unwrap_or_else(T::zero)
    }

    pub fn tracked(&self) -> T {
        self.masses.values().fold(T::zero(), |a, b| a + b.clone())
    }

    pub fn total(&self) -> T {
        self.tracked() + self.escaped.clone()
    }

    /// Dense vector over `[0, cap]`; atoms above `cap` are dropped.
    pub fn to_dense(&self, cap: u64) -> Vec<T> {
        let mut v = vec![T::zero(); cap as usize + 1];
        for (&j, m) in self.masses.range(..=cap) {
            v[j as usize] = m.clone();
        }
        v
    }

    pub fn from_dense(v: &[T], escaped: T) -> Self {
        let masses = v
            .iter()
            .enumerate()
            .filter(|(_, m)| !m.is_zero())
            .map(|(j, m)| (j as u64, m.clone()))
            .collect();
        Self { masses, escaped }
    }
}

/// Enclosure of a total-variation distance between two laws known only up to
/// their escaped masses.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TvInterval<T> {
    pub lo: T,
    pub hi: T,
    /// `(1/2) sum |d1 - d2|` over the tracked atoms.
    pub tracked_half_l1: T,
    pub escaped_first: T,
    pub escaped_second: T,
}

/// `[A - (e1+e2)/2, A + (e1+e2)/2]` clipped to `[0,1]`, with `A` the tracked half-L1 distance.
pub fn tv_distance<T: Scalar>(d1: &SparseDistribution<T>, d2: &SparseDistribution<T>) -> TvInterval<T> {
    let mut acc = T::zero();
    let mut a = d1.masses.iter().peekable();
    let mut b = d2.masses.iter().peekable();
    loop {
        let diff = match (a.peek(), b.peek()) {
            (None, None) => break,
            (Some((ja, ma)), Some((jb, mb))) if ja == jb => {
                let d = (*ma).clone() - (*mb).clone();
                a.next();
                b.next();
                d
            }
            (Some((ja, ma)), Some((jb, _))) if ja < jb => {
                let d = (*ma).clone();
                a.next();
                d
            }
            (Some((ja, ma)), None) => {
                let _ = ja;
                let d = (*ma).clone();
                a.next();
                d
            }
            (_, Some((_, mb))) => {
                let d = (*mb).clone();
                b.next();
                d
            }
        };
        acc = acc + diff.abs();
    }
    tv_from_parts(acc, d1.escaped.clone(), d2.escaped.clone())
}

pub(crate) fn tv_from_parts<T: Scalar>(l1: T, e1: T, e2: T) -> TvInterval<T> {
    let half = T::from_ratio(1, 2);
    let a = half.clone() * l1;
    let slack = half * (e1.clone() + e2.clone());
    // rounding can push the float half-L1 of disjoint masses just past 1
    let lo = T::min_of(T::one(), T::max_of(T::zero(), a.clone() - slack.clone()));
    let hi = T::min_of(T::one(), a.clone() + slack);
    TvInterval { lo, hi, tracked_half_l1: a, escaped_first: e1, escaped_second: e2 }
}
