//! Deglex order, the `D_{k,n}` families and standard monomials of vanishing
//! ideals of 0/1 point sets.
//!
//! Standard monomials are found by interpolation: square-free monomials are
//! visited in ascending deglex order and a monomial is kept iff its
//! evaluation vector over the points is independent of the vectors kept so
//! far. For the vanishing ideal of a finite point set this yields exactly the
//! deglex standard monomials, and normal forms become linear solves against
//! the evaluation matrix. No Gröbner basis is ever built.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{reduce_mod2, BitMatrix, BitVector, MlPoly, PairPoly};
use crate::setfam::{check_ground_set, low_mask, SetFamily, SubsetMask};

/// Deglex comparison of square-free monomials given as masks: degree first,
/// then the monomial containing the smallest differing variable index is the
/// larger one (`x_n ≺ … ≺ x_1`).
#[inline]
pub fn deglex_cmp_bits(a: u64, b: u64) -> Ordering {
    a.count_ones()
        .cmp(&b.count_ones())
        .then_with(|| a.reverse_bits().cmp(&b.reverse_bits()))
}

pub fn deglex_cmp(a: SubsetMask, b: SubsetMask) -> Ordering {
    debug_assert_eq!(a.n(), b.n());
    deglex_cmp_bits(a.bits(), b.bits())
}

/// Degree-lexicographic order on square-free monomials in `n` variables with
/// `x_n ≺ … ≺ x_1`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DeglexOrder {
    n: usize,
}

impl DeglexOrder {
    pub fn new(n: usize) -> Result<Self> {
        check_ground_set(n)?;
        Ok(DeglexOrder { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cmp(&self, a: u64, b: u64) -> Ordering {
        deglex_cmp_bits(a, b)
    }

    /// All square-free monomials in ascending order; requires `n <= 24`.
    pub fn all_monomials(&self) -> Result<Vec<u64>> {
        if self.n > 24 {
            return Err(Error::TooLarge(format!("2^{} monomials", self.n)));
        }
        let mut all: Vec<u64> = (0..1u64 << self.n).collect();
        all.sort_unstable_by(|&a, &b| deglex_cmp_bits(a, b));
        Ok(all)
    }
}

/// Membership in `D_{k,n}`: at most `k` elements `s_1 < … < s_j` with
/// `s_i >= 2i` (1-based).
pub fn in_d(mask: u64, k: usize) -> bool {
    if mask.count_ones() as usize > k {
        return false;
    }
    let mut bits = mask;
    let mut i = 1;
    while bits != 0 {
        let s = bits.trailing_zeros() as usize + 1;
        if s < 2 * i {
            return false;
        }
        bits &= bits - 1;
        i += 1;
    }
    true
}

/// `D_{k,n}` as raw masks in ascending deglex order.
pub fn enumerate_d_bits(n: usize, k: usize) -> Vec<u64> {
    let mut out = Vec::new();
    for j in 0..=k.min(n / 2) {
        // Within one degree, ascending deglex visits larger s_1 first, then
        // larger s_2, and so on.
        push_d_level(n, j, 1, 0, &mut out);
    }
    out
}

fn push_d_level(n: usize, remaining: usize, i: usize, acc: u64, out: &mut Vec<u64>) {
    if remaining == 0 {
        out.push(acc);
        return;
    }
    let lowest = if acc == 0 {
        2 * i
    } else {
        (2 * i).max(64 - acc.leading_zeros() as usize + 1)
    };
    // leave room for the remaining elements above s_i
    let highest = n + 1 - remaining;
    for s in (lowest..=highest).rev() {
        push_d_level(n, remaining - 1, i + 1, acc | 1 << (s - 1), out);
    }
}

/// `D_{k,n}` as masks in ascending deglex order.
pub fn enumerate_d(n: usize, k: usize) -> Result<Vec<SubsetMask>> {
    check_ground_set(n)?;
    if k > n {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds n = {n}")));
    }
    enumerate_d_bits(n, k)
        .into_iter()
        .map(|b| SubsetMask::new(b, n))
        .collect()
}

/// Standard monomials of the vanishing ideal of a point set together with the
/// evaluation matrix (rows = points, columns = monomials).
#[derive(Clone, Debug)]
pub struct StandardBasis {
    n: usize,
    points: Vec<u64>,
    monomials: Vec<u64>,
    eval_matrix: BitMatrix,
    index: HashMap<u64, usize>,
    inverse: OnceLock<BitMatrix>,
}

/// Evaluation vector of monomial `m` over `points`.
fn eval_vector(m: u64, points: &[u64]) -> BitVector {
    let mut v = BitVector::zeros(points.len());
    for (i, &p) in points.iter().enumerate() {
        if m & !p == 0 {
            v.set(i, true);
        }
    }
    v
}

/// Incremental GF(2) echelon basis; each stored vector is reduced against all
/// earlier ones and pivots on its lowest set bit.
struct Echelon {
    rows: Vec<(usize, BitVector)>,
}

impl Echelon {
    fn insert(&mut self, mut v: BitVector) -> bool {
        for (pivot, row) in &self.rows {
            if v.get(*pivot) {
                v.xor_assign(row);
            }
        }
        let lead = v.ones().next();
        match lead {
            Some(p) => {
                self.rows.push((p, v));
                true
            }
            None => false,
        }
    }
}

impl StandardBasis {
    /// Standard monomials of `I(points)` under deglex.
    ///
    /// Only candidates whose every facet is already standard are tested:
    /// multiples of a non-standard monomial are never standard.
    pub fn new(points: &[SubsetMask], order: DeglexOrder) -> Result<Self> {
        let n = order.n();
        if let Some(p) = points.iter().find(|p| p.n() != n) {
            return Err(Error::GroundSetMismatch(n, p.n()));
        }
        Self::from_bits(n, points.iter().map(|p| p.bits()).collect())
    }

    /// Same as [`StandardBasis::new`] over raw masks.
    pub fn from_bits(n: usize, mut points: Vec<u64>) -> Result<Self> {
        check_ground_set(n)?;
        if points.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        if let Some(&bad) = points.iter().find(|&&p| p & !low_mask(n) != 0) {
            return Err(Error::MaskOutOfRange { bits: bad, n });
        }
        points.sort_unstable();
        let before = points.len();
        points.dedup();
        if points.len() != before {
            return Err(Error::InvalidParameter("points are not distinct".into()));
        }

        let target = points.len();
        let mut echelon = Echelon {
            rows: Vec::with_capacity(target),
        };
        let mut monomials: Vec<u64> = Vec::with_capacity(target);
        let mut prev_level: Vec<u64> = vec![];

        'levels: for degree in 0..=n {
            let candidates = if degree == 0 {
                vec![0u64]
            } else {
                let prev: HashSet<u64> = prev_level.iter().copied().collect();
                let mut c = Vec::new();
                for &s in &prev_level {
                    let start = if s == 0 { 0 } else { 64 - s.leading_zeros() as usize };
                    for e in start..n {
                        let t = s | 1 << e;
                        let mut rest = s;
                        let mut ok = true;
                        while rest != 0 {
                            let low = rest & rest.wrapping_neg();
                            if !prev.contains(&(t ^ low)) {
                                ok = false;
                                break;
                            }
                            rest ^= low;
                        }
                        if ok {
                            c.push(t);
                        }
                    }
                }
                c.sort_unstable_by(|&a, &b| deglex_cmp_bits(a, b));
                c
            };
            let mut level = Vec::new();
            for m in candidates {
                if echelon.insert(eval_vector(m, &points)) {
                    monomials.push(m);
                    level.push(m);
                    if monomials.len() == target {
                        break 'levels;
                    }
                }
            }
            if level.is_empty() {
                break;
            }
            prev_level = level;
        }
        if monomials.len() != target {
            return Err(Error::Invariant(format!(
                "found {} standard monomials for {} points",
                monomials.len(),
                target
            )));
        }

        let mut eval_matrix = BitMatrix::zeros(target, target);
        for (c, &m) in monomials.iter().enumerate() {
            for (r, &p) in points.iter().enumerate() {
                if m & !p == 0 {
                    eval_matrix.set(r, c, true);
                }
            }
        }
        let index = monomials.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        Ok(StandardBasis {
            n,
            points,
            monomials,
            eval_matrix,
            index,
            inverse: OnceLock::new(),
        })
    }

    /// Basis for `V(all k-subsets of [n])`.
    pub fn complete_uniform(n: usize, k: usize) -> Result<Self> {
        let family = SetFamily::complete_uniform(n, k)?;
        Self::for_family(&family)
    }

    /// Basis for `V(F)`.
    pub fn for_family(family: &SetFamily) -> Result<Self> {
        Self::from_bits(family.n(), family.masks().to_vec())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Points, ascending.
    pub fn points(&self) -> &[u64] {
        &self.points
    }

    /// Standard monomials, ascending deglex.
    pub fn monomials(&self) -> &[u64] {
        &self.monomials
    }

    pub fn monomial_masks(&self) -> Vec<SubsetMask> {
        self.monomials
            .iter()
            .map(|&m| SubsetMask::new(m, self.n).expect("monomial within ground set"))
            .collect()
    }

    pub fn eval_matrix(&self) -> &BitMatrix {
        &self.eval_matrix
    }

    pub fn is_standard(&self, m: u64) -> bool {
        self.index.contains_key(&m)
    }

    pub fn max_degree(&self) -> usize {
        self.monomials.last().map_or(0, |m| m.count_ones() as usize)
    }

    fn inverse(&self) -> &BitMatrix {
        self.inverse.get_or_init(|| {
            self.eval_matrix
                .inverse()
                .expect("evaluation matrix of a standard basis is invertible")
        })
    }

    /// The unique combination of standard monomials taking `values[i]` at
    /// point `i`.
    pub fn normal_form(&self, values: &BitVector) -> Result<MlPoly> {
        if values.len() != self.points.len() {
            return Err(Error::Dimension {
                expected: self.points.len(),
                got: values.len(),
            });
        }
        let coeffs = self.inverse().mul_vec(values)?;
        MlPoly::from_monomials(self.n, coeffs.ones().map(|i| self.monomials[i]))
    }

    /// Normal form through a fresh elimination on a copy of the evaluation
    /// matrix rather than the cached inverse.
    pub fn normal_form_by_solve(&self, values: &BitVector) -> Result<MlPoly> {
        let coeffs = self
            .eval_matrix
            .solve(values)?
            .ok_or_else(|| Error::Invariant("evaluation matrix is singular".into()))?;
        MlPoly::from_monomials(self.n, coeffs.ones().map(|i| self.monomials[i]))
    }

    /// Normal form of the function given by a polynomial on the points.
    pub fn reduce(&self, p: &MlPoly) -> Result<MlPoly> {
        if p.n_vars() != self.n {
            return Err(Error::GroundSetMismatch(self.n, p.n_vars()));
        }
        let values = BitVector::from_bools(&self.points.iter().map(|&v| p.eval(v)).collect::<Vec<_>>());
        self.normal_form(&values)
    }

    /// Normal form of a single monomial, as standard-monomial masks.
    fn monomial_normal_form(&self, m: u64) -> Vec<u64> {
        if self.is_standard(m) {
            return vec![m];
        }
        let nf = self
            .normal_form(&eval_vector(m, &self.points))
            .expect("dimensions agree");
        nf.support().to_vec()
    }

    /// Rewrites `f` so every x-block and y-block monomial is standard,
    /// preserving values on all pairs of basis points. The x-block of every
    /// term is reduced first, then the y-block.
    pub fn reduce_pair_poly(&self, f: &PairPoly) -> Result<PairPoly> {
        if f.n() != self.n {
            return Err(Error::GroundSetMismatch(self.n, f.n()));
        }
        let mut cache: HashMap<u64, Vec<u64>> = HashMap::new();
        let mut nf = |m: u64| -> Vec<u64> {
            cache
                .entry(m)
                .or_insert_with(|| self.monomial_normal_form(m))
                .clone()
        };
        let mut stage = Vec::new();
        for &(x, y) in f.support() {
            stage.extend(nf(x).into_iter().map(|x2| (x2, y)));
        }
        let stage = reduce_mod2(stage);
        let mut out = Vec::new();
        for (x, y) in stage {
            out.extend(nf(y).into_iter().map(|y2| (x, y2)));
        }
        PairPoly::from_terms(self.n, out)
    }
}

/// Standard monomials of `V(F)` as masks.
pub fn standard_monomials(points: &[SubsetMask], order: DeglexOrder) -> Result<StandardBasis> {
    StandardBasis::new(points, order)
}

/// Normal form of `values` against `basis`.
pub fn normal_form(basis: &StandardBasis, values: &BitVector) -> Result<MlPoly> {
    basis.normal_form(values)
}

/// See [`StandardBasis::reduce_pair_poly`].
pub fn reduce_pair_poly(f: &PairPoly, basis: &StandardBasis) -> Result<PairPoly> {
    basis.reduce_pair_poly(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setfam::binomial;
    use proptest::prelude::*;

    fn mask(n: usize, e: &[usize]) -> u64 {
        SubsetMask::from_elements(n, e).unwrap().bits()
    }

    /// Greedy interpolation over every square-free monomial, no pruning.
    fn unpruned_standard_monomials(n: usize, points: &[u64]) -> Vec<u64> {
        let mut pts = points.to_vec();
        pts.sort_unstable();
        let mut ech = Echelon { rows: vec![] };
        let mut out = vec![];
        for m in DeglexOrder::new(n).unwrap().all_monomials().unwrap() {
            if ech.insert(eval_vector(m, &pts)) {
                out.push(m);
            }
        }
        out
    }

    #[test]
    fn deglex_examples() {
        let n = 3;
        let sm = |e: &[usize]| SubsetMask::from_elements(n, e).unwrap();
        assert_eq!(deglex_cmp(sm(&[]), sm(&[3])), Ordering::Less);
        assert_eq!(deglex_cmp(sm(&[2]), sm(&[1])), Ordering::Less);
        assert_eq!(deglex_cmp(sm(&[2, 3]), sm(&[1, 3])), Ordering::Less);
        assert_eq!(deglex_cmp(sm(&[1, 2]), sm(&[1, 2])), Ordering::Equal);
        assert_eq!(deglex_cmp(sm(&[1]), sm(&[2, 3])), Ordering::Less);
    }

    #[test]
    fn deglex_is_term_order_on_disjoint_products() {
        let n = 6;
        let all = DeglexOrder::new(n).unwrap().all_monomials().unwrap();
        assert_eq!(all[0], 0);
        for &u in &all {
            for &v in &all {
                let ord = deglex_cmp_bits(u, v);
                for w in 0u64..1 << n {
                    if w & (u | v) == 0 {
                        assert_eq!(deglex_cmp_bits(u | w, v | w), ord);
                    }
                }
            }
        }
    }

    #[test]
    fn d_examples() {
        let d = enumerate_d_bits(4, 2);
        let mut as_sets = d.clone();
        as_sets.sort_unstable();
        let mut expected = vec![
            0,
            mask(4, &[2]),
            mask(4, &[3]),
            mask(4, &[4]),
            mask(4, &[2, 4]),
            mask(4, &[3, 4]),
        ];
        expected.sort_unstable();
        assert_eq!(as_sets, expected);
        assert!(d.windows(2).all(|w| deglex_cmp_bits(w[0], w[1]) == Ordering::Less));
        assert_eq!(enumerate_d_bits(5, 0), vec![0]);
        assert_eq!(enumerate_d_bits(2, 1), vec![0, mask(2, &[2])]);
        assert!(enumerate_d(3, 4).is_err());
    }

    #[test]
    fn d_matches_filter_definition() {
        for n in 1..=10 {
            for k in 0..=n {
                let mut brute: Vec<u64> = (0u64..1 << n).filter(|&m| in_d(m, k)).collect();
                brute.sort_unstable_by(|&a, &b| deglex_cmp_bits(a, b));
                assert_eq!(enumerate_d_bits(n, k), brute, "n={n} k={k}");
                if 2 * k <= n {
                    assert_eq!(brute.len() as u128, binomial(n, k));
                }
            }
        }
    }

    #[test]
    fn standard_monomial_examples() {
        let b = StandardBasis::from_bits(3, vec![0]).unwrap();
        assert_eq!(b.monomials(), &[0]);
        let b = StandardBasis::complete_uniform(4, 2).unwrap();
        assert_eq!(b.monomials(), enumerate_d_bits(4, 2).as_slice());
        let b = StandardBasis::from_bits(2, vec![0, 1, 2, 3]).unwrap();
        assert_eq!(b.monomials(), &[0, 0b10, 0b01, 0b11]);
        assert_eq!(StandardBasis::from_bits(2, vec![]).unwrap_err(), Error::EmptyPointSet);
        assert!(StandardBasis::from_bits(2, vec![1, 1]).is_err());
    }

    #[test]
    fn pruned_matches_unpruned() {
        let cases: Vec<(usize, Vec<u64>)> = vec![
            (4, SetFamily::complete_uniform(4, 2).unwrap().masks().to_vec()),
            (5, vec![0, 3, 5, 6, 24, 31]),
            (6, (0..64).filter(|m: &u64| m.count_ones() % 2 == 0).collect()),
            (5, SetFamily::complete_uniform(5, 2).unwrap().delta().masks().to_vec()),
        ];
        for (n, pts) in cases {
            let b = StandardBasis::from_bits(n, pts.clone()).unwrap();
            assert_eq!(b.monomials(), unpruned_standard_monomials(n, &pts).as_slice());
        }
    }

    #[test]
    fn normal_form_examples() {
        let b = StandardBasis::complete_uniform(3, 1).unwrap();
        assert!(b.normal_form(&BitVector::zeros(3)).unwrap().is_zero());
        let one = StandardBasis::from_bits(3, vec![0]).unwrap();
        assert_eq!(
            one.normal_form(&BitVector::parse("1").unwrap()).unwrap(),
            MlPoly::one(3)
        );
        // points sorted: {1}=001, {2}=010, {3}=100; indicator of {1}
        let values = BitVector::parse("100").unwrap();
        let h = b.normal_form(&values).unwrap();
        assert!(h.degree().unwrap() <= 1);
        for (i, &p) in b.points().iter().enumerate() {
            assert_eq!(h.eval(p), values.get(i));
        }
        assert_eq!(h, b.normal_form_by_solve(&values).unwrap());
        assert!(b.normal_form(&BitVector::zeros(4)).is_err());
    }

    #[test]
    fn reduce_pair_examples() {
        let b = StandardBasis::complete_uniform(3, 1).unwrap();
        assert_eq!(b.monomials(), &[0, 0b100, 0b010]);
        let std_pair = PairPoly::parse("x2*y3 + x3 + 1", 3).unwrap();
        assert_eq!(b.reduce_pair_poly(&std_pair).unwrap(), std_pair);
        let f = PairPoly::parse("x1", 3).unwrap();
        assert_eq!(
            b.reduce_pair_poly(&f).unwrap(),
            PairPoly::parse("1 + x2 + x3", 3).unwrap()
        );
        assert_eq!(b.reduce_pair_poly(&PairPoly::one(3)).unwrap(), PairPoly::one(3));
    }

    #[test]
    fn greedy_rank_drop() {
        let b = StandardBasis::complete_uniform(6, 3).unwrap();
        let m = b.eval_matrix();
        assert_eq!(m.rank(), m.cols());
        let t = m.transpose();
        for skip in 0..t.rows() {
            let mut sub = BitMatrix::zeros(t.rows() - 1, t.cols());
            let mut r = 0;
            for i in (0..t.rows()).filter(|&i| i != skip) {
                sub.set_row(r, &t.row(i));
                r += 1;
            }
            assert_eq!(sub.rank(), m.cols() - 1);
        }
    }

    fn arb_points(n: usize) -> impl Strategy<Value = Vec<u64>> {
        proptest::collection::btree_set(0u64..1 << n, 1..40).prop_map(|s| s.into_iter().collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn standard_sets_are_shattered(pts in arb_points(7)) {
            let fam = SetFamily::new(7, pts.clone()).unwrap();
            let b = StandardBasis::for_family(&fam).unwrap();
            for &m in b.monomials() {
                prop_assert!(fam.shatters(SubsetMask::new(m, 7).unwrap()));
            }
        }

        #[test]
        fn normal_form_replays(pts in arb_points(6), seed in any::<u64>()) {
            let b = StandardBasis::from_bits(6, pts.clone()).unwrap();
            let values = BitVector::from_bools(&(0..pts.len()).map(|i| seed >> (i % 64) & 1 == 1).collect::<Vec<_>>());
            let h = b.normal_form(&values).unwrap();
            for (i, &p) in b.points().iter().enumerate() {
                prop_assert_eq!(h.eval(p), values.get(i));
            }
            prop_assert!(h.degree().unwrap_or(0) <= b.max_degree());
            prop_assert_eq!(h, b.normal_form_by_solve(&values).unwrap());
        }

        #[test]
        fn pair_reduction_preserves_values(
            k in 0usize..=5,
            terms in proptest::collection::vec((0u64..32, 0u64..32), 0..10),
        ) {
            let b = StandardBasis::complete_uniform(5, k).unwrap();
            let f = PairPoly::from_terms(5, terms).unwrap();
            let q = b.reduce_pair_poly(&f).unwrap();
            prop_assert!(q.degree().unwrap_or(0) <= f.degree().unwrap_or(0));
            for &(x, y) in q.support() {
                prop_assert!(b.is_standard(x) && b.is_standard(y));
            }
            for &u in b.points() {
                for &v in b.points() {
                    prop_assert_eq!(q.eval(u, v), f.eval(u, v));
                }
            }
        }
    }
}
