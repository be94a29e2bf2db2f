use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::setfam::{binomial, binomial_prefix_sum, SetFamily, SubsetMask};

/// Which bound a family is checked against.
///
/// * `Sauer`: `|F| <= Σ_{k<=d} C(n,k)`, `d = vc_dim(F)`.
/// * `Dvir`: `|F| <= 2·Σ_{k<=⌊d/2⌋} C(n,k)`, `d = vc_dim(FΔF)`.
/// * `Kang`: `|F| <= 2^r·Σ_{k<=⌊d/2⌋} C(n-r,k)`, `d = vc_dim(FΔF)`, `0 < d < n`.
/// * `Kleitman`: as `Kang` with `d = max |T|` over `T ∈ FΔF`.
/// * `Main`: uniform `F`, `|F| <= 2·C(n,⌊d/2⌋)`, `d = vc_dim(FΔF)`.
/// * `Conjecture`: uniform `F`, `|F| <= 2^r·C(n-r,⌊d/2⌋)`, `0 < d < n`;
///   unproved, so exceeding it is a finding rather than a defect.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Theorem {
    Sauer,
    Dvir,
    Kang,
    Kleitman,
    Main,
    Conjecture,
}

impl Theorem {
    pub const ALL: [Theorem; 6] = [
        Theorem::Sauer,
        Theorem::Dvir,
        Theorem::Kang,
        Theorem::Kleitman,
        Theorem::Main,
        Theorem::Conjecture,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Theorem::Sauer => "sauer",
            Theorem::Dvir => "dvir",
            Theorem::Kang => "kang",
            Theorem::Kleitman => "kleitman",
            Theorem::Main => "main",
            Theorem::Conjecture => "conjecture",
        }
    }

    pub fn is_proved(self) -> bool {
        self != Theorem::Conjecture
    }

    pub fn requires_uniform(self) -> bool {
        matches!(self, Theorem::Main | Theorem::Conjecture)
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown theorem tag `{s}`")))
    }
}

/// Closed-form bound for `theorem` at `(n, d)`; zero for negative `d`.
pub fn bound_value(theorem: Theorem, n: usize, d: i64) -> u128 {
    if d < 0 {
        return 0;
    }
    let half = d / 2;
    let r = (d % 2) as usize;
    match theorem {
        Theorem::Sauer => binomial_prefix_sum(n, d),
        Theorem::Dvir => 2 * binomial_prefix_sum(n, half),
        Theorem::Kang | Theorem::Kleitman => {
            (1u128 << r) * binomial_prefix_sum(n.saturating_sub(r), half)
        }
        Theorem::Main => 2 * binomial(n, half as usize),
        Theorem::Conjecture => (1u128 << r) * binomial(n.saturating_sub(r), half as usize),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem: Theorem,
    pub n: usize,
    /// The `d` the theorem is evaluated at; `-1` when the relevant family is
    /// empty.
    pub d: i64,
    pub r: u8,
    pub size: usize,
    pub bound: u128,
    pub hypotheses_hold: bool,
    pub pass: bool,
    /// A set realizing `d`: a maximum shattered set, or for `kleitman` a
    /// largest member of `FΔF`.
    pub witness: Option<SubsetMask>,
}

impl BoundReport {
    /// A proved bound failing on a family that meets its hypotheses.
    pub fn is_violation(&self) -> bool {
        self.hypotheses_hold && !self.pass
    }

    pub fn ratio(&self) -> f64 {
        if self.bound == 0 {
            if self.size == 0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.size as f64 / self.bound as f64
        }
    }
}

/// Evaluates `theorem` on `family` with that theorem's definition of `d`.
pub fn check_bound(family: &SetFamily, theorem: Theorem) -> Result<BoundReport> {
    let n = family.n();
    if theorem.requires_uniform() {
        if family.is_empty() {
            return Err(Error::EmptyFamily);
        }
        if family.is_uniform().is_none() {
            return Err(Error::NotUniform);
        }
    }
    let (d, witness) = match theorem {
        Theorem::Sauer => (family.vc_dim() as i64, family.vc_witness()),
        Theorem::Kleitman => {
            let delta = family.delta();
            let w = delta.iter().max_by_key(|t| (t.len(), std::cmp::Reverse(t.bits())));
            (w.map_or(-1, |t| t.len() as i64), w)
        }
        _ => {
            let delta = family.delta();
            (delta.vc_dim() as i64, delta.vc_witness())
        }
    };
    let hypotheses_hold = match theorem {
        Theorem::Sauer => true,
        Theorem::Dvir | Theorem::Main => d >= 0 && d as usize <= n,
        Theorem::Kang | Theorem::Kleitman | Theorem::Conjecture => d > 0 && (d as usize) < n,
    };
    let bound = bound_value(theorem, n, d);
    let size = family.len();
    Ok(BoundReport {
        theorem,
        n,
        d,
        r: if d >= 0 { (d % 2) as u8 } else { 0 },
        size,
        bound,
        hypotheses_hold,
        pass: size as u128 <= bound,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert_eq!(bound_value(Theorem::Dvir, 4, 2), 2 * (1 + 4));
        assert_eq!(bound_value(Theorem::Kang, 4, 2), 5);
        assert_eq!(bound_value(Theorem::Kang, 5, 3), 2 * (1 + 4));
        assert_eq!(bound_value(Theorem::Main, 4, 2), 8);
        assert_eq!(bound_value(Theorem::Conjecture, 4, 2), 4);
        assert_eq!(bound_value(Theorem::Conjecture, 6, 3), 2 * 5);
        assert_eq!(bound_value(Theorem::Sauer, 4, 2), 11);
        assert_eq!(bound_value(Theorem::Main, 4, -1), 0);
    }

    #[test]
    fn tags_round_trip() {
        for t in Theorem::ALL {
            assert_eq!(t.as_str().parse::<Theorem>().unwrap(), t);
        }
        assert!("cauchy".parse::<Theorem>().is_err());
    }

    #[test]
    fn hamming_ball_is_tight_for_kleitman() {
        for n in 3..=12 {
            let center = 0b101u64 & ((1 << n) - 1);
            let ball: Vec<u64> = std::iter::once(center)
                .chain((0..n).map(|i| center ^ 1 << i))
                .collect();
            let f = SetFamily::new(n, ball).unwrap();
            let r = check_bound(&f, Theorem::Kleitman).unwrap();
            assert_eq!((r.d, r.r, r.size), (2, 0, n + 1));
            assert_eq!(r.bound, n as u128 + 1);
            assert!(r.pass && r.hypotheses_hold);
        }
    }

    #[test]
    fn complete_uniform_main() {
        let f = SetFamily::complete_uniform(5, 2).unwrap();
        let r = check_bound(&f, Theorem::Main).unwrap();
        assert_eq!(r.d, f.delta().vc_dim() as i64);
        assert!(r.pass && r.hypotheses_hold);
        assert_eq!(r.size, 10);
    }

    #[test]
    fn singleton_dvir() {
        let f = SetFamily::from_sets(3, &[Vec::<usize>::new()]).unwrap();
        let r = check_bound(&f, Theorem::Dvir).unwrap();
        assert_eq!((r.d, r.bound, r.size), (0, 2, 1));
        assert!(r.pass);
    }

    #[test]
    fn main_rejects_non_uniform() {
        let f = SetFamily::from_sets(3, &[vec![1usize], vec![1, 2]]).unwrap();
        assert_eq!(check_bound(&f, Theorem::Main), Err(Error::NotUniform));
        assert_eq!(
            check_bound(&SetFamily::empty(3).unwrap(), Theorem::Main),
            Err(Error::EmptyFamily)
        );
        assert!(check_bound(&f, Theorem::Dvir).unwrap().pass);
    }

    #[test]
    fn kang_needs_d_below_n() {
        // vc(FΔF) = n here and the kang formula would fail; hypotheses gate it.
        let f = SetFamily::power_set(2).unwrap();
        let r = check_bound(&f, Theorem::Kang).unwrap();
        assert_eq!(r.d, 2);
        assert!(!r.hypotheses_hold && !r.pass && !r.is_violation());
    }

    #[test]
    fn bound_ordering() {
        for n in 1..=20 {
            for d in 0..=n as i64 {
                let dv = bound_value(Theorem::Dvir, n, d);
                assert!(bound_value(Theorem::Kang, n, d) <= dv);
                assert!(bound_value(Theorem::Main, n, d) <= dv);
                assert!(bound_value(Theorem::Conjecture, n, d) <= bound_value(Theorem::Main, n, d));
            }
        }
    }
}
