use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bounds::{check_bound, BoundReport, Theorem};
use crate::error::{Error, Result};
use crate::setfam::{binomial, KSubsets, SetFamily};

/// Largest number of `k`-subsets whose subfamilies are enumerated.
pub const MAX_EXHAUSTIVE_UNIVERSE: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub family: SetFamily,
    pub report: BoundReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExhaustiveSummary {
    pub n: usize,
    pub k: usize,
    pub theorem: Theorem,
    pub families_checked: u64,
    pub hypotheses_met: u64,
    /// Largest `size / bound` among families meeting the hypotheses.
    pub max_ratio: f64,
    /// Largest family size for each value of the theorem's `d`.
    pub max_size_by_d: BTreeMap<i64, usize>,
    /// Families meeting the hypotheses that exceed the bound. For proved
    /// theorems this must stay empty; for the conjecture these are findings.
    pub violations: Vec<Violation>,
}

impl ExhaustiveSummary {
    fn empty(n: usize, k: usize, theorem: Theorem) -> Self {
        ExhaustiveSummary {
            n,
            k,
            theorem,
            families_checked: 0,
            hypotheses_met: 0,
            max_ratio: 0.0,
            max_size_by_d: BTreeMap::new(),
            violations: Vec::new(),
        }
    }

    fn record(&mut self, family: SetFamily, report: BoundReport) {
        self.families_checked += 1;
        let best = self.max_size_by_d.entry(report.d).or_insert(0);
        *best = (*best).max(report.size);
        if report.hypotheses_hold {
            self.hypotheses_met += 1;
            self.max_ratio = self.max_ratio.max(report.ratio());
            if !report.pass {
                self.violations.push(Violation { family, report });
            }
        }
    }

    fn merge(&mut self, other: ExhaustiveSummary) {
        self.families_checked += other.families_checked;
        self.hypotheses_met += other.hypotheses_met;
        self.max_ratio = self.max_ratio.max(other.max_ratio);
        for (d, s) in other.max_size_by_d {
            let best = self.max_size_by_d.entry(d).or_insert(0);
            *best = (*best).max(s);
        }
        self.violations.extend(other.violations);
    }

    /// Largest family whose `d` is at most `d_max`.
    pub fn max_size_up_to(&self, d_max: i64) -> usize {
        self.max_size_by_d
            .range(..=d_max)
            .map(|(_, &s)| s)
            .max()
            .unwrap_or(0)
    }
}

/// Checks `theorem` on every nonempty subfamily of the `k`-subsets of `[n]`.
/// Work is split into fixed chunks over the subfamily index range and merged
/// in chunk order, so the summary is deterministic.
pub fn exhaustive_verify(n: usize, k: usize, theorem: Theorem) -> Result<ExhaustiveSummary> {
    crate::setfam::check_ground_set(n)?;
    if k > n {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds n = {n}")));
    }
    let universe_size = binomial(n, k);
    if universe_size > MAX_EXHAUSTIVE_UNIVERSE as u128 {
        return Err(Error::TooLarge(format!(
            "C({n},{k}) = {universe_size} k-subsets, i.e. 2^{universe_size} - 1 subfamilies \
             (limit 2^{MAX_EXHAUSTIVE_UNIVERSE})"
        )));
    }
    let universe: Vec<u64> = KSubsets::new(n, k).collect();
    let total: u64 = 1 << universe.len();
    const CHUNK: u64 = 1 << 12;
    let chunks = total.div_ceil(CHUNK);
    let parts: Vec<Result<ExhaustiveSummary>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut part = ExhaustiveSummary::empty(n, k, theorem);
            let lo = (c * CHUNK).max(1);
            let hi = ((c + 1) * CHUNK).min(total);
            for sel in lo..hi {
                let masks = universe
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| sel >> i & 1 == 1)
                    .map(|(_, &m)| m);
                let family = SetFamily::new(n, masks)?;
                let report = check_bound(&family, theorem)?;
                part.record(family, report);
            }
            Ok(part)
        })
        .collect();
    let mut summary = ExhaustiveSummary::empty(n, k, theorem);
    for part in parts {
        summary.merge(part?);
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_grids() {
        let s = exhaustive_verify(4, 2, Theorem::Main).unwrap();
        assert_eq!(s.families_checked, 63);
        assert!(s.violations.is_empty());
        let s = exhaustive_verify(5, 2, Theorem::Main).unwrap();
        assert_eq!(s.families_checked, 1023);
        assert!(s.violations.is_empty());
        let s = exhaustive_verify(3, 1, Theorem::Dvir).unwrap();
        assert_eq!(s.families_checked, 7);
        assert!(s.violations.is_empty());
    }

    #[test]
    fn too_large() {
        assert!(matches!(
            exhaustive_verify(7, 3, Theorem::Main),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn deterministic() {
        let a = exhaustive_verify(5, 3, Theorem::Kang).unwrap();
        let b = exhaustive_verify(5, 3, Theorem::Kang).unwrap();
        assert_eq!(a, b);
    }
}
