//! The rank argument for uniform families.
//!
//! Pipeline for a family `F`:
//! 1. `Δ = F Δ F` and the standard basis of `V(Δ)`;
//! 2. `g'` = normal form of the indicator of the zero vector on `V(Δ)`;
//!    its degree is at most `vc_dim(Δ)` because standard monomials are
//!    shattered sets;
//! 3. `f(x, y) = g'(x + y)`, whose Gram matrix on `F` is the identity;
//! 4. reduce `f` modulo `I(V(C) × V(C))`, `C` = all `k`-subsets, and group
//!    the terms by whichever block has degree `<= ⌊d/2⌋`. Each group is a
//!    rank-one piece, so `|F| = rank <= #groups <= 2·C(n, ⌊d/2⌋)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{substitute_sum, BitMatrix, BitVector, MlPoly, PairPoly};
use crate::setfam::{binomial, binomial_prefix_sum, SetFamily};
use crate::stdmon::{in_d, StandardBasis};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndicatorResult {
    pub g_prime: MlPoly,
    /// `vc_dim(F Δ F)`.
    pub d_bound: usize,
    pub delta_family: SetFamily,
    pub standard_monomials: Vec<u64>,
}

/// Low-degree polynomial that is 1 at the origin and 0 on every nonzero
/// point of `V(F Δ F)`.
pub fn indicator_poly(family: &SetFamily) -> Result<IndicatorResult> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let delta = family.delta();
    let basis = StandardBasis::for_family(&delta)?;
    // points are ascending, so the origin is point 0
    debug_assert_eq!(basis.points()[0], 0);
    let mut values = BitVector::zeros(delta.len());
    values.set(0, true);
    let g_prime = basis.normal_form(&values)?;
    let d_bound = delta.vc_dim() as usize;
    if let Some(deg) = g_prime.degree() {
        if deg > d_bound {
            return Err(Error::Invariant(format!(
                "indicator degree {deg} exceeds vc_dim(FΔF) = {d_bound}"
            )));
        }
    }
    Ok(IndicatorResult {
        g_prime,
        d_bound,
        standard_monomials: basis.monomials().to_vec(),
        delta_family: delta,
    })
}

/// `M[i][j] = f(v_{F_i}, v_{F_j})` in family order.
pub fn gram_matrix(f: &PairPoly, family: &SetFamily) -> Result<BitMatrix> {
    if f.n() != family.n() {
        return Err(Error::GroundSetMismatch(family.n(), f.n()));
    }
    let members = family.masks();
    let m = members.len();
    let mut gram = BitMatrix::zeros(m, m);
    if m == 0 {
        return Ok(gram);
    }
    // Terms are sorted by x-mask: accumulate, per x-mask, the XOR of the
    // column indicators of its y-masks, then add that row pattern to every
    // row whose member contains the x-mask.
    let support = f.support();
    let mut i = 0;
    while i < support.len() {
        let x = support[i].0;
        let mut cols = BitVector::zeros(m);
        while i < support.len() && support[i].0 == x {
            let y = support[i].1;
            for (j, &g) in members.iter().enumerate() {
                if y & !g == 0 {
                    cols.set(j, !cols.get(j));
                }
            }
            i += 1;
        }
        if cols.is_zero() {
            continue;
        }
        for (r, &row_member) in members.iter().enumerate() {
            if x & !row_member == 0 {
                let mut row = gram.row(r);
                row.xor_assign(&cols);
                gram.set_row(r, &row);
            }
        }
    }
    Ok(gram)
}

/// Grouped decomposition `Q = Σ_M x_M g_M(y) + Σ_J y_J h_J(x)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankCertificate {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    /// The reduced polynomial `Q`.
    pub reduced: PairPoly,
    /// Key `M` → `g_M`, stored as the y-masks of its support.
    pub x_groups: BTreeMap<u64, Vec<u64>>,
    /// Key `J` → `h_J`, stored as the x-masks of its support.
    pub y_groups: BTreeMap<u64, Vec<u64>>,
    pub group_count: usize,
}

impl RankCertificate {
    pub fn half_d(&self) -> usize {
        self.d / 2
    }

    /// `2·C(n, ⌊d/2⌋)`.
    pub fn bound(&self) -> u128 {
        2 * binomial(self.n, self.half_d())
    }

    /// Re-expands the groups into a pair polynomial.
    pub fn replay(&self) -> Result<PairPoly> {
        let mut terms = Vec::new();
        for (&key, ys) in &self.x_groups {
            terms.extend(ys.iter().map(|&y| (key, y)));
        }
        for (&key, xs) in &self.y_groups {
            terms.extend(xs.iter().map(|&x| (x, key)));
        }
        PairPoly::from_terms(self.n, terms)
    }

    /// Checks every structural claim of the certificate independently of
    /// how it was built.
    pub fn check(&self) -> CertificateCheck {
        let half = self.half_d();
        let keys_ok = self
            .x_groups
            .keys()
            .chain(self.y_groups.keys())
            .all(|&key| in_d(key, half));
        let groups_nonempty = self
            .x_groups
            .values()
            .chain(self.y_groups.values())
            .all(|g| !g.is_empty());
        let count_ok = self.group_count == self.x_groups.len() + self.y_groups.len()
            && self.group_count as u128 <= self.bound();
        let replay_ok = self.replay().map(|p| p == self.reduced).unwrap_or(false);
        CertificateCheck {
            keys_in_d: keys_ok,
            groups_nonempty,
            count_within_bound: count_ok,
            replay_matches: replay_ok,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateCheck {
    pub keys_in_d: bool,
    pub groups_nonempty: bool,
    pub count_within_bound: bool,
    pub replay_matches: bool,
}

impl CertificateCheck {
    pub fn ok(&self) -> bool {
        self.keys_in_d && self.groups_nonempty && self.count_within_bound && self.replay_matches
    }
}

/// Reduces `p` against `V(C) × V(C)` for `C` = all `k`-subsets of `[n]` and
/// groups the terms. A term goes to the x-group of its x-mask whenever that
/// mask has at most `⌊d/2⌋` elements, otherwise to the y-group of its y-mask.
pub fn rank_certificate(p: &PairPoly, n: usize, k: usize, d: usize) -> Result<RankCertificate> {
    let basis = StandardBasis::complete_uniform(n, k)?;
    rank_certificate_with_basis(p, &basis, k, d)
}

/// [`rank_certificate`] with a prebuilt basis for the complete `k`-uniform
/// family.
pub fn rank_certificate_with_basis(
    p: &PairPoly,
    basis: &StandardBasis,
    k: usize,
    d: usize,
) -> Result<RankCertificate> {
    let n = basis.n();
    if p.n() != n {
        return Err(Error::GroundSetMismatch(n, p.n()));
    }
    if d > n || k > n {
        return Err(Error::InvalidParameter(format!(
            "need d <= n and k <= n (n = {n}, k = {k}, d = {d})"
        )));
    }
    if let Some(deg) = p.degree() {
        if deg > d {
            return Err(Error::DegreeTooLarge { degree: deg, bound: d });
        }
    }
    let reduced = basis.reduce_pair_poly(p)?;
    let half = d / 2;
    let mut x_groups: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    let mut y_groups: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for &(x, y) in reduced.support() {
        if x.count_ones() as usize <= half {
            x_groups.entry(x).or_default().push(y);
        } else if y.count_ones() as usize <= half {
            y_groups.entry(y).or_default().push(x);
        } else {
            return Err(Error::Invariant(format!(
                "reduced term x-mask {x:#x}, y-mask {y:#x} has both blocks above ⌊d/2⌋ = {half}"
            )));
        }
    }
    let group_count = x_groups.len() + y_groups.len();
    Ok(RankCertificate {
        n,
        k,
        d,
        reduced,
        x_groups,
        y_groups,
        group_count,
    })
}

/// Outcome of checking a family and a separating polynomial against the
/// uniform rank bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniClpReport {
    pub n: usize,
    pub k: usize,
    pub size: usize,
    pub d: usize,
    pub half_d: usize,
    pub bound: u128,
    pub degree: Option<usize>,
    pub degree_ok: bool,
    pub diagonal_nonzero: bool,
    pub off_diagonal_zero: bool,
    pub rank: usize,
    pub rank_equals_size: bool,
    pub group_count: Option<usize>,
    pub certificate_ok: Option<bool>,
    pub rank_within_groups: Option<bool>,
    pub bound_holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<RankCertificate>,
}

impl UniClpReport {
    pub fn hypotheses_hold(&self) -> bool {
        self.degree_ok && self.diagonal_nonzero && self.off_diagonal_zero
    }

    /// False only when the hypotheses hold but a conclusion fails.
    pub fn consistent(&self) -> bool {
        !self.hypotheses_hold()
            || (self.rank_equals_size
                && self.bound_holds
                && self.certificate_ok == Some(true)
                && self.rank_within_groups == Some(true))
    }
}

/// Checks the hypotheses of the uniform rank bound for `(H, P, d)` and, when
/// the degree allows, builds and replays the certificate.
pub fn verify_uniclp(h: &SetFamily, p: &PairPoly, d: usize) -> Result<UniClpReport> {
    let k = h.is_uniform().ok_or(Error::NotUniform)?;
    let n = h.n();
    if d > n {
        return Err(Error::InvalidParameter(format!("d = {d} exceeds n = {n}")));
    }
    let gram = gram_matrix(p, h)?;
    let m = h.len();
    let diagonal_nonzero = (0..m).all(|i| gram.get(i, i));
    let off_diagonal_zero = (0..m).all(|i| (0..m).all(|j| i == j || !gram.get(i, j)));
    let rank = gram.rank();
    let degree = p.degree();
    let degree_ok = degree.is_none_or(|deg| deg <= d);
    let half_d = d / 2;
    let bound = 2 * binomial(n, half_d);

    let certificate = if degree_ok {
        Some(rank_certificate(p, n, k, d)?)
    } else {
        None
    };
    let group_count = certificate.as_ref().map(|c| c.group_count);
    let certificate_ok = certificate.as_ref().map(|c| c.check().ok());
    let rank_within_groups = group_count.map(|g| rank <= g);
    Ok(UniClpReport {
        n,
        k,
        size: m,
        d,
        half_d,
        bound,
        degree,
        degree_ok,
        diagonal_nonzero,
        off_diagonal_zero,
        rank,
        rank_equals_size: rank == m,
        group_count,
        certificate_ok,
        rank_within_groups,
        bound_holds: m as u128 <= bound,
        certificate,
    })
}

/// End-to-end run for a nonempty uniform family: indicator polynomial, lift,
/// and the uniform rank check with `d = vc_dim(F Δ F)`.
pub fn certify_family(family: &SetFamily) -> Result<(IndicatorResult, PairPoly, UniClpReport)> {
    if family.is_uniform().is_none() {
        return Err(if family.is_empty() {
            Error::EmptyFamily
        } else {
            Error::NotUniform
        });
    }
    let ind = indicator_poly(family)?;
    let lifted = substitute_sum(&ind.g_prime);
    let report = verify_uniclp(family, &lifted, ind.d_bound)?;
    Ok((ind, lifted, report))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClpBranch {
    /// Some pair of distinct points does not vanish; nothing to conclude.
    HypothesisFails,
    /// The polynomial is over degree `d`; the lemma does not apply.
    DegreeExceeded,
    VanishesAtZero,
    /// `P(0) != 0`, so `|A|` must be at most the bound.
    SizeBounded,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClpLemmaReport {
    pub n: usize,
    pub d: usize,
    pub size: usize,
    pub degree: Option<usize>,
    pub hypothesis_holds: bool,
    pub value_at_zero: bool,
    /// `2·Σ_{i <= ⌊d/2⌋} C(n, i)`.
    pub bound: u128,
    pub branch: ClpBranch,
    pub consistent: bool,
}

/// Checks the GF(2) instance of the Croot–Lev–Pach lemma for `P` and the
/// point set `A` (differences are XORs).
pub fn clp_lemma_check(p: &MlPoly, points: &[u64], d: usize) -> ClpLemmaReport {
    let n = p.n_vars();
    let degree = p.degree();
    let degree_ok = degree.is_none_or(|deg| deg <= d);
    let hypothesis_holds = points.iter().enumerate().all(|(i, &a)| {
        points[i + 1..]
            .iter()
            .all(|&b| a == b || !p.eval(a ^ b))
    });
    let value_at_zero = p.eval(0);
    let bound = 2 * binomial_prefix_sum(n, (d / 2) as i64);
    let size = points.len();
    let (branch, consistent) = if !degree_ok {
        (ClpBranch::DegreeExceeded, true)
    } else if !hypothesis_holds {
        (ClpBranch::HypothesisFails, true)
    } else if !value_at_zero {
        (ClpBranch::VanishesAtZero, true)
    } else {
        (ClpBranch::SizeBounded, size as u128 <= bound)
    };
    ClpLemmaReport {
        n,
        d,
        size,
        degree,
        hypothesis_holds,
        value_at_zero,
        bound,
        branch,
        consistent,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setfam::SubsetMask;

    fn fam(n: usize, sets: &[&[usize]]) -> SetFamily {
        SetFamily::from_sets(n, sets).unwrap()
    }

    /// Direct `m^2 · terms` evaluation.
    fn naive_gram(f: &PairPoly, family: &SetFamily) -> BitMatrix {
        let ms = family.masks();
        let mut g = BitMatrix::zeros(ms.len(), ms.len());
        for (i, &a) in ms.iter().enumerate() {
            for (j, &b) in ms.iter().enumerate() {
                g.set(i, j, f.eval(a, b));
            }
        }
        g
    }

    #[test]
    fn indicator_examples() {
        let r = indicator_poly(&fam(2, &[&[]])).unwrap();
        assert_eq!(r.g_prime, MlPoly::one(2));
        assert_eq!(r.d_bound, 0);
        assert_eq!(r.delta_family, fam(2, &[&[]]));

        let r = indicator_poly(&fam(2, &[&[1], &[2]])).unwrap();
        assert_eq!(r.delta_family, fam(2, &[&[], &[1, 2]]));
        assert!(r.g_prime.eval(0b00));
        assert!(!r.g_prime.eval(0b11));
        assert_eq!(r.d_bound, 1);
        assert!(r.g_prime.degree().unwrap() <= 1);

        let r = indicator_poly(&SetFamily::complete_uniform(3, 1).unwrap()).unwrap();
        assert!(r.g_prime.eval(0));
        for p in [0b011, 0b101, 0b110] {
            assert!(!r.g_prime.eval(p));
        }
        assert!(r.g_prime.degree().unwrap() <= 2);

        assert_eq!(indicator_poly(&SetFamily::empty(3).unwrap()), Err(Error::EmptyFamily));
    }

    #[test]
    fn gram_examples() {
        let f = SetFamily::complete_uniform(4, 2).unwrap();
        let ones = gram_matrix(&PairPoly::one(4), &f).unwrap();
        assert!((0..6).all(|i| (0..6).all(|j| ones.get(i, j))));
        assert!(gram_matrix(&PairPoly::zero(4), &f).unwrap().is_zero());
        let lifted = substitute_sum(&indicator_poly(&f).unwrap().g_prime);
        assert!(gram_matrix(&lifted, &f).unwrap().is_identity());
    }

    #[test]
    fn gram_matches_naive() {
        let f = fam(5, &[&[1, 2], &[3], &[2, 4, 5], &[], &[1, 5]]);
        let p = PairPoly::parse("x1*y2 + x3 + y5*x2 + 1 + y1*y2*x4", 5).unwrap();
        assert_eq!(gram_matrix(&p, &f).unwrap(), naive_gram(&p, &f));
    }

    #[test]
    fn certificate_examples() {
        let c = rank_certificate(&PairPoly::one(4), 4, 2, 0).unwrap();
        assert_eq!(c.group_count, 1);
        assert_eq!(c.x_groups.get(&0), Some(&vec![0]));
        assert!(c.check().ok());

        let p = PairPoly::parse("x2*y2", 4).unwrap();
        let c = rank_certificate(&p, 4, 2, 2).unwrap();
        assert_eq!(c.group_count, 1);
        assert_eq!(c.x_groups.get(&0b0010), Some(&vec![0b0010]));
        assert!(c.bound() == 8 && c.check().ok());

        let f = SetFamily::complete_uniform(4, 2).unwrap();
        let (ind, lifted, report) = certify_family(&f).unwrap();
        let c = report.certificate.as_ref().unwrap();
        assert_eq!(c.d, ind.d_bound);
        assert!(c.check().ok());
        assert!(c.group_count as u128 <= 2 * binomial(4, ind.d_bound / 2));
        assert_eq!(rank_certificate(&lifted, 4, 2, ind.d_bound).unwrap(), *c);
    }

    #[test]
    fn certificate_rejects_high_degree() {
        let p = PairPoly::parse("x1*y2*y3", 4).unwrap();
        assert_eq!(
            rank_certificate(&p, 4, 2, 2),
            Err(Error::DegreeTooLarge { degree: 3, bound: 2 })
        );
    }

    #[test]
    fn tampered_certificate_fails_replay() {
        let f = SetFamily::complete_uniform(5, 2).unwrap();
        let (_, _, report) = certify_family(&f).unwrap();
        let mut c = report.certificate.unwrap();
        let key = *c.x_groups.keys().next().unwrap();
        c.x_groups.get_mut(&key).unwrap().push(0b11111);
        assert!(!c.check().replay_matches);
    }

    #[test]
    fn uniclp_examples() {
        let h = fam(3, &[&[]]);
        let r = verify_uniclp(&h, &PairPoly::one(3), 0).unwrap();
        assert!(r.hypotheses_hold() && r.consistent() && r.bound_holds);
        assert_eq!((r.size, r.bound), (1, 2));

        let f = SetFamily::complete_uniform(5, 2).unwrap();
        let (_, _, r) = certify_family(&f).unwrap();
        assert!(r.hypotheses_hold() && r.consistent());
        assert_eq!(r.rank, 10);

        let h = fam(3, &[&[1], &[2]]);
        let r = verify_uniclp(&h, &PairPoly::one(3), 0).unwrap();
        assert!(r.diagonal_nonzero && !r.off_diagonal_zero);
        assert!(!r.hypotheses_hold() && r.consistent());

        assert_eq!(
            verify_uniclp(&fam(3, &[&[1], &[1, 2]]), &PairPoly::one(3), 0),
            Err(Error::NotUniform)
        );
    }

    #[test]
    fn clp_examples() {
        let r = clp_lemma_check(&MlPoly::one(3), &[0], 0);
        assert_eq!(r.branch, ClpBranch::SizeBounded);
        assert!(r.consistent && r.hypothesis_holds && r.bound == 2);

        let p = MlPoly::parse("x1 + x2", 3).unwrap();
        let r = clp_lemma_check(&p, &[0, 1, 2, 3, 4, 5, 6, 7], 1);
        assert!(!r.value_at_zero && r.consistent);

        let f = SetFamily::complete_uniform(5, 2).unwrap();
        let ind = indicator_poly(&f).unwrap();
        let r = clp_lemma_check(&ind.g_prime, f.masks(), ind.d_bound);
        assert!(r.hypothesis_holds && r.value_at_zero);
        assert_eq!(r.branch, ClpBranch::SizeBounded);
        assert!(r.consistent);
        assert_eq!(r.bound, 2 * crate::setfam::binomial_prefix_sum(5, (ind.d_bound / 2) as i64));
    }

    #[test]
    fn non_uniform_indicator_still_separates() {
        let f = fam(4, &[&[], &[1], &[1, 2, 3], &[2, 4]]);
        let ind = indicator_poly(&f).unwrap();
        let g = gram_matrix(&substitute_sum(&ind.g_prime), &f).unwrap();
        assert!(g.is_identity());
        for t in ind.delta_family.iter().filter(|t| !t.is_empty()) {
            assert!(!ind.g_prime.eval_at(t));
        }
        assert!(ind.g_prime.eval_at(SubsetMask::empty(4).unwrap()));
    }
}
