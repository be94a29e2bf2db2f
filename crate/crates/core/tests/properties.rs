use deltavc_core::clpcore::{certify_family, clp_lemma_check, gram_matrix, indicator_poly};
use deltavc_core::gf2::substitute_sum;
use deltavc_core::setfam::{binomial_prefix_sum, vc_dim_exhaustive, SetFamily, SubsetMask};
use deltavc_core::stdmon::{enumerate_d_bits, in_d, StandardBasis};
use deltavc_core::verify::{bound_value, check_bound, random_uniform_family, Theorem};
use proptest::prelude::*;

fn arb_family(n: usize, max_len: usize) -> impl Strategy<Value = SetFamily> {
    proptest::collection::vec(0u64..1 << n, 0..max_len)
        .prop_map(move |ms| SetFamily::new(n, ms).unwrap())
}

fn arb_uniform(max_n: usize) -> impl Strategy<Value = SetFamily> {
    (2..=max_n)
        .prop_flat_map(|n| (Just(n), 0..=n, any::<u64>()))
        .prop_flat_map(|(n, k, seed)| {
            let total = deltavc_core::setfam::binomial(n, k) as usize;
            (Just(n), Just(k), 1..=total.min(20), Just(seed))
        })
        .prop_map(|(n, k, m, seed)| random_uniform_family(n, k, m, seed).unwrap())
}

#[test]
fn sauer_shelah_exhaustive_small() {
    // every family over 2^[n] for n <= 4
    for n in 1..=4usize {
        let subsets = 1u64 << n;
        for sel in 0u64..1 << subsets {
            let f = SetFamily::new(n, (0..subsets).filter(|m| sel >> m & 1 == 1)).unwrap();
            let d = f.vc_dim();
            assert!(f.len() as u128 <= binomial_prefix_sum(n, d as i64), "{f:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn vc_dim_monotone(f in arb_family(8, 30), extra in arb_family(8, 10)) {
        let union = SetFamily::new(8, f.masks().iter().chain(extra.masks()).copied()).unwrap();
        prop_assert!(f.vc_dim() <= union.vc_dim());
    }

    #[test]
    fn shattered_sets_downward_closed(f in arb_family(7, 40)) {
        let sh = f.shattered_sets(7);
        let set: std::collections::HashSet<u64> = sh.iter().map(|m| m.bits()).collect();
        for m in &sh {
            let mut bits = m.bits();
            while bits != 0 {
                let low = bits & bits.wrapping_neg();
                prop_assert!(set.contains(&(m.bits() ^ low)));
                bits ^= low;
            }
            prop_assert!(f.shatters(*m));
        }
        prop_assert_eq!(sh.iter().map(|m| m.len() as i32).max().unwrap_or(-1), f.vc_dim());
    }

    #[test]
    fn level_search_agrees_with_exhaustive(f in arb_family(9, 60)) {
        prop_assert_eq!(f.vc_dim(), vc_dim_exhaustive(&f).unwrap());
    }

    #[test]
    fn sauer_shelah_random(f in arb_family(12, 200)) {
        prop_assert!(f.len() as u128 <= binomial_prefix_sum(12, f.vc_dim() as i64));
    }

    #[test]
    fn delta_structure(f in arb_family(10, 25)) {
        let delta = f.delta();
        if !f.is_empty() {
            prop_assert!(delta.contains(0));
        }
        for a in f.iter() {
            for b in f.iter() {
                let t = a.sym_diff(b);
                prop_assert_eq!(t.bits(), a.bits() ^ b.bits());
                prop_assert!(delta.contains(t.bits()));
            }
        }
    }

    #[test]
    fn uniform_delta_has_even_members(f in arb_uniform(10)) {
        for t in f.delta().iter() {
            prop_assert_eq!(t.len() % 2, 0);
        }
    }

    #[test]
    fn pipeline_identity_and_certificate(f in arb_uniform(9)) {
        let (ind, lifted, report) = certify_family(&f).unwrap();
        prop_assert!(gram_matrix(&lifted, &f).unwrap().is_identity());
        prop_assert!(ind.g_prime.degree().unwrap_or(0) <= ind.d_bound);
        prop_assert!(report.hypotheses_hold());
        prop_assert!(report.consistent());
        let cert = report.certificate.as_ref().unwrap();
        let half = ind.d_bound / 2;
        for &key in cert.x_groups.keys().chain(cert.y_groups.keys()) {
            prop_assert!(in_d(key, half));
        }
        prop_assert!(report.rank <= cert.group_count);
    }

    #[test]
    fn indicator_works_for_non_uniform(f in arb_family(7, 12)) {
        prop_assume!(!f.is_empty());
        let ind = indicator_poly(&f).unwrap();
        prop_assert!(gram_matrix(&substitute_sum(&ind.g_prime), &f).unwrap().is_identity());
        let report = clp_lemma_check(&ind.g_prime, f.masks(), ind.d_bound);
        prop_assert!(report.consistent);
        let dvir = check_bound(&f, Theorem::Dvir).unwrap();
        prop_assert!(!dvir.is_violation());
    }

    #[test]
    fn standard_monomials_inside_shattered(f in arb_family(8, 50)) {
        prop_assume!(!f.is_empty());
        let basis = StandardBasis::for_family(&f).unwrap();
        for m in basis.monomial_masks() {
            prop_assert!(f.shatters(m));
        }
    }

    #[test]
    fn bounds_ordered(n in 1usize..40, d in 0i64..40) {
        prop_assume!(d as usize <= n);
        let dv = bound_value(Theorem::Dvir, n, d);
        prop_assert!(bound_value(Theorem::Kang, n, d) <= dv);
        prop_assert!(bound_value(Theorem::Main, n, d) <= dv);
    }
}

#[test]
fn d_sets_are_standard_for_complete_families() {
    for n in 1..=8 {
        for k in 0..=n {
            let b = StandardBasis::complete_uniform(n, k).unwrap();
            assert_eq!(b.monomials(), enumerate_d_bits(n, k.min(n - k)).as_slice());
        }
    }
    let m = SubsetMask::from_elements(4, &[2, 4]).unwrap();
    assert!(in_d(m.bits(), 2));
}
