//! Incremental maintenance of `F Δ F` and of the `vc_dim(F Δ F) <= d`
//! constraint under single-member additions and removals.

use std::collections::HashMap;

use crate::error::Result;
use crate::setfam::{binomial, extract_bits, KSubsets, SetFamily};

/// `F` together with the multiset of `a XOR b` over unordered pairs
/// `{a, b}` (including `a = b`), so removals know when a difference
/// disappears from `F Δ F`.
#[derive(Clone, Debug)]
pub struct DeltaTracker {
    n: usize,
    members: Vec<u64>,
    counts: HashMap<u64, u32>,
}

impl DeltaTracker {
    pub fn new(n: usize) -> Self {
        DeltaTracker {
            n,
            members: Vec::new(),
            counts: HashMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, a: u64) -> bool {
        self.members.contains(&a)
    }

    pub fn delta_contains(&self, t: u64) -> bool {
        self.counts.contains_key(&t)
    }

    /// Differences that adding `a` would introduce into `F Δ F`, deduplicated.
    pub fn new_differences(&self, a: u64) -> Vec<u64> {
        let mut out: Vec<u64> = std::iter::once(0)
            .chain(self.members.iter().map(|&b| a ^ b))
            .filter(|t| !self.counts.contains_key(t))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Adds `a` and returns the differences that entered `F Δ F`. No-op for
    /// an existing member.
    pub fn add(&mut self, a: u64) -> Vec<u64> {
        if self.contains(a) {
            return Vec::new();
        }
        let mut fresh = Vec::new();
        for t in std::iter::once(0).chain(self.members.iter().map(|&b| a ^ b)) {
            let c = self.counts.entry(t).or_insert(0);
            if *c == 0 {
                fresh.push(t);
            }
            *c += 1;
        }
        self.members.push(a);
        fresh
    }

    /// Removes `a`; returns the differences that left `F Δ F`.
    pub fn remove(&mut self, a: u64) -> Vec<u64> {
        let Some(pos) = self.members.iter().position(|&m| m == a) else {
            return Vec::new();
        };
        self.members.swap_remove(pos);
        let mut gone = Vec::new();
        for t in std::iter::once(0).chain(self.members.iter().map(|&b| a ^ b)) {
            let c = self.counts.get_mut(&t).expect("tracked difference");
            *c -= 1;
            if *c == 0 {
                self.counts.remove(&t);
                gone.push(t);
            }
        }
        gone
    }

    pub fn delta_masks(&self) -> Vec<u64> {
        let mut out: Vec<u64> = self.counts.keys().copied().collect();
        out.sort_unstable();
        out
    }

    pub fn family(&self) -> Result<SetFamily> {
        SetFamily::new(self.n, self.members.iter().copied())
    }

    pub fn delta_family(&self) -> Result<SetFamily> {
        SetFamily::new(self.n, self.delta_masks())
    }
}

/// Traces of a point set on every `(d+1)`-subset of `[n]`. The point set has
/// VC dimension `<= d` iff no trace table is full.
#[derive(Clone, Debug)]
pub struct ShatterGuard {
    d: usize,
    sets: Vec<u64>,
    words: usize,
    traces: Vec<u64>,
}

/// Trace tables larger than this many bits are not materialized.
const MAX_GUARD_BITS: u128 = 1 << 28;

impl ShatterGuard {
    /// `None` when the tables would be too large; callers then fall back to
    /// recomputing the VC dimension.
    pub fn new(n: usize, d: usize) -> Option<Self> {
        let size = d + 1;
        if size > n {
            return Some(ShatterGuard {
                d,
                sets: Vec::new(),
                words: 0,
                traces: Vec::new(),
            });
        }
        if size >= 64 || binomial(n, size) * (1u128 << size) > MAX_GUARD_BITS {
            return None;
        }
        let sets: Vec<u64> = KSubsets::new(n, size).collect();
        let words = (1usize << size).div_ceil(64);
        let traces = vec![0; sets.len() * words];
        Some(ShatterGuard {
            d,
            sets,
            words,
            traces,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    fn full_words(&self) -> impl Iterator<Item = u64> + '_ {
        let bits = 1usize << (self.d + 1);
        (0..self.words).map(move |w| {
            let remaining = bits - w * 64;
            if remaining >= 64 {
                u64::MAX
            } else {
                (1u64 << remaining) - 1
            }
        })
    }

    fn is_full(&self, table: &[u64]) -> bool {
        table.iter().zip(self.full_words()).all(|(a, b)| a == &b)
    }

    pub fn clear(&mut self) {
        self.traces.iter_mut().for_each(|w| *w = 0);
    }

    pub fn insert(&mut self, points: &[u64]) {
        for (i, &m) in self.sets.iter().enumerate() {
            let table = &mut self.traces[i * self.words..(i + 1) * self.words];
            for &p in points {
                let t = extract_bits(p, m) as usize;
                table[t / 64] |= 1 << (t % 64);
            }
        }
    }

    pub fn rebuild(&mut self, points: &[u64]) {
        self.clear();
        self.insert(points);
    }

    /// Whether some `(d+1)`-set is shattered by the current points.
    pub fn violated(&self) -> bool {
        (0..self.sets.len()).any(|i| self.is_full(&self.traces[i * self.words..(i + 1) * self.words]))
    }

    /// Whether adding `points` would shatter some `(d+1)`-set.
    pub fn would_violate(&self, points: &[u64]) -> bool {
        if points.is_empty() {
            return false;
        }
        let mut scratch = vec![0u64; self.words];
        for (i, &m) in self.sets.iter().enumerate() {
            scratch.copy_from_slice(&self.traces[i * self.words..(i + 1) * self.words]);
            for &p in points {
                let t = extract_bits(p, m) as usize;
                scratch[t / 64] |= 1 << (t % 64);
            }
            if self.is_full(&scratch) {
                return true;
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tracker_add_remove() {
        let mut t = DeltaTracker::new(4);
        assert_eq!(t.add(0b0011), vec![0]);
        let mut fresh = t.add(0b0101);
        fresh.sort_unstable();
        assert_eq!(fresh, vec![0b0110]);
        assert!(t.add(0b0101).is_empty());
        t.add(0b1001);
        assert_eq!(t.delta_family().unwrap(), t.family().unwrap().delta());
        let mut gone = t.remove(0b0011);
        gone.sort_unstable();
        assert_eq!(gone, vec![0b0110, 0b1010]);
        assert_eq!(t.delta_family().unwrap(), t.family().unwrap().delta());
        t.remove(0b0101);
        t.remove(0b1001);
        assert!(t.is_empty() && t.delta_masks().is_empty());
    }

    #[test]
    fn guard_matches_vc_dim() {
        let f = SetFamily::complete_uniform(5, 2).unwrap().delta();
        let vc = f.vc_dim() as usize;
        for d in 0..=5 {
            let mut g = ShatterGuard::new(5, d).unwrap();
            g.rebuild(f.masks());
            assert_eq!(g.violated(), vc > d, "d={d}");
        }
    }

    #[test]
    fn would_violate_is_side_effect_free() {
        let mut g = ShatterGuard::new(3, 1).unwrap();
        g.insert(&[0b000, 0b011]);
        assert!(!g.violated());
        assert!(g.would_violate(&[0b001, 0b010]));
        assert!(!g.violated());
        assert!(!g.would_violate(&[]));
    }
}
