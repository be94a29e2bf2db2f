//! Multilinear polynomials over GF(2), stored by support.
//!
//! Points are 0/1 vectors, so every polynomial is reduced modulo
//! `x_i^2 = x_i`: a monomial is a subset of the variables and products
//! combine monomials by bitwise OR.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::reduce_mod2;
use crate::error::{Error, Result};
use crate::setfam::{check_ground_set, low_mask, SubsetMask};
use crate::stdmon::deglex_cmp_bits;

/// Multilinear polynomial in `x_1..x_n`; the support is the set of
/// monomials with coefficient 1, ascending by mask.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct MlPoly {
    n_vars: usize,
    support: Vec<u64>,
}

impl MlPoly {
    pub fn zero(n_vars: usize) -> Self {
        MlPoly {
            n_vars,
            support: Vec::new(),
        }
    }

    pub fn one(n_vars: usize) -> Self {
        MlPoly {
            n_vars,
            support: vec![0],
        }
    }

    pub fn monomial(n_vars: usize, mask: u64) -> Result<Self> {
        Self::from_monomials(n_vars, [mask])
    }

    /// Sums the given monomials mod 2; repeated monomials cancel in pairs.
    pub fn from_monomials(n_vars: usize, monomials: impl IntoIterator<Item = u64>) -> Result<Self> {
        check_ground_set(n_vars)?;
        let limit = low_mask(n_vars);
        let terms: Vec<u64> = monomials.into_iter().collect();
        if let Some(&bad) = terms.iter().find(|&&m| m & !limit != 0) {
            return Err(Error::MaskOutOfRange {
                bits: bad,
                n: n_vars,
            });
        }
        Ok(MlPoly {
            n_vars,
            support: reduce_mod2(terms),
        })
    }

    #[inline]
    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    /// Monomial masks with coefficient 1, ascending.
    #[inline]
    pub fn support(&self) -> &[u64] {
        &self.support
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.support.iter().map(|m| m.count_ones() as usize).max()
    }

    /// Deglex-largest monomial of the support.
    pub fn leading_monomial(&self) -> Option<u64> {
        self.support.iter().copied().max_by(|&a, &b| deglex_cmp_bits(a, b))
    }

    /// Value at the 0/1 point whose support is `point`.
    pub fn eval(&self, point: u64) -> bool {
        self.support
            .iter()
            .filter(|&&m| m & !point == 0)
            .count()
            % 2
            == 1
    }

    pub fn eval_at(&self, point: SubsetMask) -> bool {
        self.eval(point.bits())
    }

    pub fn add(&self, other: &MlPoly) -> Result<MlPoly> {
        self.check_same(other)?;
        let mut terms = self.support.clone();
        terms.extend_from_slice(&other.support);
        Ok(MlPoly {
            n_vars: self.n_vars,
            support: reduce_mod2(terms),
        })
    }

    pub fn multiply(&self, other: &MlPoly) -> Result<MlPoly> {
        self.check_same(other)?;
        let mut terms = Vec::with_capacity(self.support.len() * other.support.len());
        for &a in &self.support {
            terms.extend(other.support.iter().map(|&b| a | b));
        }
        Ok(MlPoly {
            n_vars: self.n_vars,
            support: reduce_mod2(terms),
        })
    }

    fn check_same(&self, other: &MlPoly) -> Result<()> {
        if self.n_vars == other.n_vars {
            Ok(())
        } else {
            Err(Error::GroundSetMismatch(self.n_vars, other.n_vars))
        }
    }

    /// Parses `x1*x3 + x2 + 1`. `0` denotes the zero polynomial.
    pub fn parse(text: &str, n_vars: usize) -> Result<Self> {
        let terms = parse_terms(text, n_vars)?;
        if terms.iter().any(|&(_, y)| y != 0) {
            return Err(Error::InvalidParameter(
                "y-variables are not allowed in a single-block polynomial".into(),
            ));
        }
        Self::from_monomials(n_vars, terms.into_iter().map(|(x, _)| x))
    }
}

impl fmt::Display for MlPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = self.support.clone();
        terms.sort_by(|&a, &b| deglex_cmp_bits(b, a));
        write_terms(f, terms.into_iter().map(|m| (m, 0)))
    }
}

/// Polynomial in two blocks `x_1..x_n`, `y_1..y_n`; each term is a pair
/// `(x-mask, y-mask)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct PairPoly {
    n: usize,
    support: Vec<(u64, u64)>,
}

impl PairPoly {
    pub fn zero(n: usize) -> Self {
        PairPoly {
            n,
            support: Vec::new(),
        }
    }

    pub fn one(n: usize) -> Self {
        PairPoly {
            n,
            support: vec![(0, 0)],
        }
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (u64, u64)>) -> Result<Self> {
        check_ground_set(n)?;
        let limit = low_mask(n);
        let terms: Vec<(u64, u64)> = terms.into_iter().collect();
        if let Some(&(x, y)) = terms.iter().find(|&&(x, y)| (x | y) & !limit != 0) {
            return Err(Error::MaskOutOfRange { bits: x | y, n });
        }
        Ok(PairPoly {
            n,
            support: reduce_mod2(terms),
        })
    }

    pub(crate) fn from_sorted_unchecked(n: usize, support: Vec<(u64, u64)>) -> Self {
        debug_assert!(support.windows(2).all(|w| w[0] < w[1]));
        PairPoly { n, support }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn support(&self) -> &[(u64, u64)] {
        &self.support
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.support
            .iter()
            .map(|(x, y)| (x.count_ones() + y.count_ones()) as usize)
            .max()
    }

    pub fn eval(&self, x: u64, y: u64) -> bool {
        self.support
            .iter()
            .filter(|&&(a, b)| a & !x == 0 && b & !y == 0)
            .count()
            % 2
            == 1
    }

    pub fn add(&self, other: &PairPoly) -> Result<PairPoly> {
        if self.n != other.n {
            return Err(Error::GroundSetMismatch(self.n, other.n));
        }
        let mut terms = self.support.clone();
        terms.extend_from_slice(&other.support);
        Ok(PairPoly {
            n: self.n,
            support: reduce_mod2(terms),
        })
    }

    /// Parses `x1*y2 + x3 + 1` over blocks of size `n`.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let terms = parse_terms(text, n)?;
        Self::from_terms(n, terms)
    }
}

impl fmt::Display for PairPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = self.support.clone();
        terms.sort_by(|&(ax, ay), &(bx, by)| {
            let da = ax.count_ones() + ay.count_ones();
            let db = bx.count_ones() + by.count_ones();
            db.cmp(&da)
                .then_with(|| deglex_cmp_bits(bx, ax))
                .then_with(|| deglex_cmp_bits(by, ay))
        });
        write_terms(f, terms.into_iter())
    }
}

/// Replaces every `x_i` by `x_i + y_i` and expands.
///
/// A monomial `x_M` becomes `Σ_{A ⊆ M} x_A y_{M∖A}`. Distinct monomials
/// produce disjoint sets of pairs (the pair determines `M = A ∪ B`), so no
/// cancellation happens and the result has `Σ 2^|M|` terms.
pub fn substitute_sum(g: &MlPoly) -> PairPoly {
    let mut terms = Vec::new();
    for &m in g.support() {
        let mut a = m;
        loop {
            terms.push((a, m & !a));
            if a == 0 {
                break;
            }
            a = (a - 1) & m;
        }
    }
    terms.sort_unstable();
    PairPoly::from_sorted_unchecked(g.n_vars(), terms)
}

fn write_terms(f: &mut fmt::Formatter<'_>, terms: impl Iterator<Item = (u64, u64)>) -> fmt::Result {
    let mut any = false;
    for (x, y) in terms {
        if any {
            f.write_str(" + ")?;
        }
        any = true;
        if x == 0 && y == 0 {
            f.write_str("1")?;
            continue;
        }
        let mut first = true;
        for (prefix, mask) in [("x", x), ("y", y)] {
            let mut bits = mask;
            while bits != 0 {
                if !first {
                    f.write_str("*")?;
                }
                first = false;
                write!(f, "{prefix}{}", bits.trailing_zeros() + 1)?;
                bits &= bits - 1;
            }
        }
    }
    if !any {
        f.write_str("0")?;
    }
    Ok(())
}

fn parse_terms(text: &str, n: usize) -> Result<Vec<(u64, u64)>> {
    check_ground_set(n)?;
    let mut out = Vec::new();
    for term in text.split('+') {
        let term = term.trim();
        if term.is_empty() {
            return Err(Error::InvalidParameter(format!("empty term in `{text}`")));
        }
        if term == "0" {
            continue;
        }
        let (mut x, mut y) = (0u64, 0u64);
        for factor in term.split('*') {
            let factor = factor.trim();
            if factor == "1" {
                continue;
            }
            let (block, idx) = factor.split_at(factor.len().min(1));
            let i: usize = idx
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad factor `{factor}`")))?;
            if i == 0 || i > n {
                return Err(Error::ElementOutOfRange { element: i, n });
            }
            match block {
                "x" => x |= 1 << (i - 1),
                "y" => y |= 1 << (i - 1),
                _ => return Err(Error::InvalidParameter(format!("bad factor `{factor}`"))),
            }
        }
        out.push((x, y));
    }
    Ok(out)
}
