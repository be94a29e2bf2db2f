//! Set families over a ground set `[n]`, `n <= 64`, with shattering and
//! VC-dimension queries.
//!
//! A subset `F ⊆ [n]` is stored as a single word: bit `i - 1` is set iff
//! element `i` belongs to `F`. The same word is the characteristic vector of
//! `F` and the support of the square-free monomial `x_F`.

mod combinatorics;
mod io;

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use combinatorics::{
    binomial, binomial_prefix_sum, colex_rank, colex_unrank, extract_bits, low_mask, KSubsets,
};
pub use io::{format_family, parse_family};

use crate::error::{Error, Result};

pub const MAX_GROUND_SET: usize = 64;

pub(crate) fn check_ground_set(n: usize) -> Result<()> {
    if (1..=MAX_GROUND_SET).contains(&n) {
        Ok(())
    } else {
        Err(Error::GroundSetSize(n))
    }
}

/// A subset of `[n]` packed into one word.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct SubsetMask {
    bits: u64,
    n: u8,
}

impl SubsetMask {
    pub fn new(bits: u64, n: usize) -> Result<Self> {
        check_ground_set(n)?;
        if bits & !low_mask(n) != 0 {
            return Err(Error::MaskOutOfRange { bits, n });
        }
        Ok(SubsetMask { bits, n: n as u8 })
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::new(0, n)
    }

    /// Builds a mask from 1-based elements.
    pub fn from_elements(n: usize, elements: &[usize]) -> Result<Self> {
        check_ground_set(n)?;
        let mut bits = 0u64;
        for &e in elements {
            if e == 0 || e > n {
                return Err(Error::ElementOutOfRange { element: e, n });
            }
            bits |= 1 << (e - 1);
        }
        Ok(SubsetMask { bits, n: n as u8 })
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn n(self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn len(self) -> usize {
        self.bits.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    pub fn contains(self, element: usize) -> bool {
        element >= 1 && element <= self.n() && self.bits >> (element - 1) & 1 == 1
    }

    /// 1-based elements in ascending order.
    pub fn elements(self) -> Vec<usize> {
        elements_of(self.bits)
    }

    pub fn sym_diff(self, other: SubsetMask) -> SubsetMask {
        debug_assert_eq!(self.n, other.n);
        SubsetMask {
            bits: self.bits ^ other.bits,
            n: self.n,
        }
    }

    pub fn is_subset_of(self, other: SubsetMask) -> bool {
        self.bits & !other.bits == 0
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.elements().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

pub(crate) fn elements_of(mut bits: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(bits.count_ones() as usize);
    while bits != 0 {
        out.push(bits.trailing_zeros() as usize + 1);
        bits &= bits - 1;
    }
    out
}

/// A deduplicated family of subsets of `[n]`, members kept in ascending
/// integer order of their masks.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct SetFamily {
    n: usize,
    members: Vec<u64>,
    uniform: Option<usize>,
}

impl SetFamily {
    /// Normalizes `masks` (sort + dedupe) into a family over `[n]`.
    pub fn new(n: usize, masks: impl IntoIterator<Item = u64>) -> Result<Self> {
        check_ground_set(n)?;
        let limit = low_mask(n);
        let mut members = Vec::new();
        for bits in masks {
            if bits & !limit != 0 {
                return Err(Error::MaskOutOfRange { bits, n });
            }
            members.push(bits);
        }
        members.sort_unstable();
        members.dedup();
        Ok(Self::from_sorted_unchecked(n, members))
    }

    pub(crate) fn from_sorted_unchecked(n: usize, members: Vec<u64>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        let uniform = uniformity(&members);
        SetFamily {
            n,
            members,
            uniform,
        }
    }

    /// Builds a family from lists of 1-based elements.
    pub fn from_sets<S: AsRef<[usize]>>(n: usize, sets: &[S]) -> Result<Self> {
        let masks = sets
            .iter()
            .map(|s| SubsetMask::from_elements(n, s.as_ref()).map(SubsetMask::bits))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, masks)
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::new(n, std::iter::empty())
    }

    /// All `k`-subsets of `[n]`.
    pub fn complete_uniform(n: usize, k: usize) -> Result<Self> {
        check_ground_set(n)?;
        if k > n {
            return Err(Error::InvalidParameter(format!("k = {k} exceeds n = {n}")));
        }
        let mut members: Vec<u64> = KSubsets::new(n, k).collect();
        members.sort_unstable();
        Ok(Self::from_sorted_unchecked(n, members))
    }

    /// All subsets of `[n]`; requires `n <= 24`.
    pub fn power_set(n: usize) -> Result<Self> {
        check_ground_set(n)?;
        if n > 24 {
            return Err(Error::TooLarge(format!("power set of [{n}]")));
        }
        Ok(Self::from_sorted_unchecked(n, (0..1u64 << n).collect()))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.members.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Raw member masks, ascending.
    #[inline]
    pub fn masks(&self) -> &[u64] {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = SubsetMask> + '_ {
        let n = self.n as u8;
        self.members.iter().map(move |&bits| SubsetMask { bits, n })
    }

    pub fn contains(&self, bits: u64) -> bool {
        self.members.binary_search(&bits).is_ok()
    }

    /// The common cardinality of all members, if there is one.
    pub fn is_uniform(&self) -> Option<usize> {
        self.uniform
    }

    /// `{A Δ B : A ∈ self, B ∈ other}`.
    pub fn sym_diff_family(&self, other: &SetFamily) -> Result<SetFamily> {
        if self.n != other.n {
            return Err(Error::GroundSetMismatch(self.n, other.n));
        }
        let mut out = Vec::with_capacity(self.len() * other.len());
        if std::ptr::eq(self, other) || self.members == other.members {
            for (i, &a) in self.members.iter().enumerate() {
                out.extend(self.members[i..].iter().map(|&b| a ^ b));
            }
        } else {
            for &a in &self.members {
                out.extend(other.members.iter().map(|&b| a ^ b));
            }
        }
        out.sort_unstable();
        out.dedup();
        Ok(Self::from_sorted_unchecked(self.n, out))
    }

    /// `F Δ F`.
    pub fn delta(&self) -> SetFamily {
        self.sym_diff_family(self)
            .expect("a family shares its own ground set")
    }

    /// True iff `{F ∩ M : F ∈ self}` is all of `2^M`.
    pub fn shatters(&self, m: SubsetMask) -> bool {
        shatters_masks(&self.members, m.bits())
    }

    /// All shattered sets of size at most `max_size`, ascending by mask.
    pub fn shattered_sets(&self, max_size: usize) -> Vec<SubsetMask> {
        let n = self.n as u8;
        let mut out: Vec<SubsetMask> = self
            .shattered_levels(Some(max_size))
            .into_iter()
            .flatten()
            .map(|bits| SubsetMask { bits, n })
            .collect();
        out.sort_unstable();
        out
    }

    /// Largest size of a shattered set; `-1` for the empty family.
    pub fn vc_dim(&self) -> i32 {
        self.shattered_levels(None).len() as i32 - 1
    }

    /// A shattered set of maximum size (the first such mask in ascending
    /// order), or `None` for the empty family.
    pub fn vc_witness(&self) -> Option<SubsetMask> {
        let n = self.n as u8;
        self.shattered_levels(None)
            .pop()
            .and_then(|level| level.into_iter().min())
            .map(|bits| SubsetMask { bits, n })
    }

    /// Shattered sets grouped by size, level `m` holding sets of size `m`.
    /// Level `m` candidates are the one-element extensions of level `m - 1`
    /// whose every facet is shattered; the search stops at the first empty
    /// level.
    fn shattered_levels(&self, max_size: Option<usize>) -> Vec<Vec<u64>> {
        let mut levels: Vec<Vec<u64>> = Vec::new();
        if self.members.is_empty() {
            return levels;
        }
        levels.push(vec![0]);
        let cap = max_size.unwrap_or(self.n).min(self.n);
        let size_cap = usize::BITS as usize - 1 - self.len().leading_zeros() as usize;
        let cap = cap.min(size_cap);
        for m in 1..=cap {
            let prev = &levels[m - 1];
            let prev_set: HashSet<u64> = prev.iter().copied().collect();
            let mut next = Vec::new();
            for &s in prev {
                let start = if s == 0 {
                    0
                } else {
                    64 - s.leading_zeros() as usize
                };
                for e in start..self.n {
                    let t = s | 1 << e;
                    let mut facets = t ^ (1 << e);
                    let mut all_facets = true;
                    while facets != 0 {
                        let low = facets & facets.wrapping_neg();
                        if !prev_set.contains(&(t ^ low)) {
                            all_facets = false;
                            break;
                        }
                        facets ^= low;
                    }
                    if all_facets && shatters_masks(&self.members, t) {
                        next.push(t);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            levels.push(next);
        }
        levels
    }
}

fn uniformity(members: &[u64]) -> Option<usize> {
    let first = members.first()?.count_ones();
    members
        .iter()
        .all(|m| m.count_ones() == first)
        .then_some(first as usize)
}

/// Trace-bitset shattering test over raw masks.
pub(crate) fn shatters_masks(members: &[u64], m: u64) -> bool {
    let size = m.count_ones() as usize;
    if members.is_empty() {
        return false;
    }
    if size >= usize::BITS as usize - 1 || (1usize << size) > members.len() {
        return false;
    }
    let needed = 1usize << size;
    let mut seen = vec![0u64; needed.div_ceil(64)];
    let mut count = 0usize;
    for &f in members {
        let t = extract_bits(f, m) as usize;
        let word = &mut seen[t / 64];
        let bit = 1u64 << (t % 64);
        if *word & bit == 0 {
            *word |= bit;
            count += 1;
            if count == needed {
                return true;
            }
        }
    }
    false
}

/// VC dimension by enumerating every `M ⊆ [n]` and collecting traces in a
/// hash set. Independent of the level-wise search; requires `n <= 24`.
pub fn vc_dim_exhaustive(family: &SetFamily) -> Result<i32> {
    let n = family.n();
    if n > 24 {
        return Err(Error::TooLarge(format!(
            "exhaustive VC dimension over 2^{n} subsets"
        )));
    }
    if family.is_empty() {
        return Ok(-1);
    }
    let mut best = 0i32;
    for m in 0u64..1 << n {
        let size = m.count_ones() as i32;
        if size <= best {
            continue;
        }
        let traces: HashSet<u64> = family.masks().iter().map(|&f| f & m).collect();
        if traces.len() as u128 == 1u128 << size {
            best = size;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(n: usize, sets: &[&[usize]]) -> SetFamily {
        SetFamily::from_sets(n, sets).unwrap()
    }

    fn mask(n: usize, e: &[usize]) -> SubsetMask {
        SubsetMask::from_elements(n, e).unwrap()
    }

    #[test]
    fn mask_validation() {
        assert!(SubsetMask::new(0b1000, 3).is_err());
        assert!(SubsetMask::new(0, 0).is_err());
        assert!(SubsetMask::new(u64::MAX, 64).is_ok());
        assert_eq!(
            SubsetMask::from_elements(3, &[4]),
            Err(Error::ElementOutOfRange { element: 4, n: 3 })
        );
        assert_eq!(mask(5, &[1, 3]).len(), 2);
        assert_eq!(mask(5, &[3, 1]).elements(), vec![1, 3]);
        assert_eq!(mask(5, &[1, 3]).to_string(), "{1,3}");
    }

    #[test]
    fn uniformity_examples() {
        assert_eq!(fam(3, &[&[1], &[2], &[3]]).is_uniform(), Some(1));
        assert_eq!(fam(3, &[&[1], &[1, 2]]).is_uniform(), None);
        assert_eq!(SetFamily::complete_uniform(4, 2).unwrap().is_uniform(), Some(2));
        assert_eq!(SetFamily::empty(4).unwrap().is_uniform(), None);
    }

    #[test]
    fn normalization() {
        let f = SetFamily::new(3, [5, 1, 5, 0]).unwrap();
        assert_eq!(f.masks(), &[0, 1, 5]);
        assert!(SetFamily::new(2, [4]).is_err());
    }

    #[test]
    fn sym_diff_examples() {
        let f = fam(2, &[&[1], &[2]]);
        assert_eq!(f.delta(), fam(2, &[&[], &[1, 2]]));
        let e = fam(2, &[&[]]);
        assert_eq!(e.delta(), e);
        let singles = SetFamily::complete_uniform(3, 1).unwrap();
        assert_eq!(singles.delta(), fam(3, &[&[], &[1, 2], &[1, 3], &[2, 3]]));
        let g = SetFamily::complete_uniform(4, 1).unwrap();
        assert_eq!(
            singles.sym_diff_family(&g),
            Err(Error::GroundSetMismatch(3, 4))
        );
    }

    #[test]
    fn sym_diff_asymmetric() {
        let f = fam(3, &[&[1]]);
        let g = fam(3, &[&[1], &[2, 3]]);
        assert_eq!(f.sym_diff_family(&g).unwrap(), fam(3, &[&[], &[1, 2, 3]]));
    }

    #[test]
    fn shatters_examples() {
        let f = fam(2, &[&[1]]);
        assert!(f.shatters(mask(2, &[])));
        assert!(!SetFamily::empty(2).unwrap().shatters(mask(2, &[])));
        let p = SetFamily::power_set(2).unwrap();
        assert!(p.shatters(mask(2, &[1, 2])));
        let g = fam(2, &[&[1], &[2]]);
        assert!(!g.shatters(mask(2, &[1, 2])));
        assert!(g.shatters(mask(2, &[1])));
    }

    #[test]
    fn vc_dim_examples() {
        assert_eq!(SetFamily::power_set(3).unwrap().vc_dim(), 3);
        assert_eq!(fam(3, &[&[1]]).vc_dim(), 0);
        assert_eq!(SetFamily::complete_uniform(4, 2).unwrap().vc_dim(), 2);
        assert_eq!(SetFamily::empty(3).unwrap().vc_dim(), -1);
    }

    #[test]
    fn vc_witness_is_shattered() {
        let f = SetFamily::complete_uniform(5, 2).unwrap();
        let w = f.vc_witness().unwrap();
        assert_eq!(w.len() as i32, f.vc_dim());
        assert!(f.shatters(w));
        assert_eq!(SetFamily::empty(3).unwrap().vc_witness(), None);
    }

    #[test]
    fn shattered_sets_examples() {
        assert_eq!(fam(2, &[&[1]]).shattered_sets(1), vec![mask(2, &[])]);
        let p = SetFamily::power_set(2).unwrap();
        assert_eq!(
            p.shattered_sets(2),
            vec![mask(2, &[]), mask(2, &[1]), mask(2, &[2]), mask(2, &[1, 2])]
        );
        assert_eq!(
            fam(2, &[&[1], &[2]]).shattered_sets(2),
            vec![mask(2, &[]), mask(2, &[1]), mask(2, &[2])]
        );
        assert!(p.shattered_sets(0) == vec![mask(2, &[])]);
    }

    #[test]
    fn exhaustive_matches_levelwise() {
        let fams = [
            SetFamily::complete_uniform(5, 2).unwrap(),
            SetFamily::power_set(4).unwrap(),
            fam(4, &[&[1, 2], &[3], &[1, 4], &[2, 3, 4]]),
            SetFamily::empty(3).unwrap(),
        ];
        for f in &fams {
            assert_eq!(vc_dim_exhaustive(f).unwrap(), f.vc_dim(), "{f:?}");
        }
    }

    #[test]
    fn wide_ground_set() {
        let f = SetFamily::new(64, [0, 1 << 63, u64::MAX]).unwrap();
        assert_eq!(f.vc_dim(), 1);
        assert_eq!(f.delta().len(), 4);
    }
}
