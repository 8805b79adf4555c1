//! Property tests for the module invariants.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

use rootnum_core::combinatorics::{
    euler_alternating_sum, solve_unitriangular, HalfInt, LaurentPoly, TriangularSystem,
};
use rootnum_core::oldforms::{closed_form_trace, involution_fixed_points, TraceCase};
use rootnum_core::segments::{segment_root_number, Block, Pairing, QuadCharData, SegmentData};
use rootnum_core::shapes::{lambda_bracket_d, InfChar};

fn small_poly() -> impl Strategy<Value = LaurentPoly> {
    proptest::collection::vec((-6i64..=6, -4i64..=4), 0..6).prop_map(|terms| {
        let mut p = LaurentPoly::zero();
        for (e, c) in terms {
            p.add_term(HalfInt::from_doubled(e), BigInt::from(c));
        }
        p
    })
}

proptest! {
    #[test]
    fn laurent_mul_commutes(a in small_poly(), b in small_poly()) {
        prop_assert_eq!(&a * &b, &b * &a);
    }

    #[test]
    fn laurent_mul_distributes(a in small_poly(), b in small_poly(), c in small_poly()) {
        let lhs = &a * &(&b + &c);
        let rhs = &(&a * &b) + &(&a * &c);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn euler_vanishes_below_threshold(b in 0u32..=8, k in 0u32..=8) {
        if k < b + 1 {
            prop_assert_eq!(euler_alternating_sum(b, k), BigInt::zero());
        }
    }

    #[test]
    fn unitriangular_solution_convolves_to_delta(values in proptest::collection::vec(-50i64..=50, 0..20)) {
        let mut t = vec![BigInt::one()];
        t.extend(values.into_iter().map(BigInt::from));
        let sys = TriangularSystem::new(t).unwrap();
        let a = solve_unitriangular(&sys);
        for j in 0..=sys.target() {
            let conv: BigInt = (0..=j).map(|i| &a[i] * sys.value(j - i)).sum();
            let expect = if j == 0 { BigInt::one() } else { BigInt::zero() };
            prop_assert_eq!(conv, expect);
        }
    }

    #[test]
    fn oldform_trace_matches_brute(case in 0usize..3, n in 2u32..=6, k in 0u32..=8) {
        let case = TraceCase::ALL[case];
        prop_assert_eq!(
            involution_fixed_points(case, n, k).unwrap(),
            closed_form_trace(case, n, k)
        );
    }

    #[test]
    fn halfint_roundtrip(doubled in -1000i64..=1000) {
        let h = HalfInt::from_doubled(doubled);
        let parsed: HalfInt = h.to_string().parse().unwrap();
        prop_assert_eq!(parsed, h);
    }

    #[test]
    fn bracket_scales_mass_and_keeps_symmetry(
        exps in proptest::collection::vec(1i64..=9, 1..4),
        d in 1u32..=4,
    ) {
        // symmetric character from positive doubled exponents
        let poly = LaurentPoly::from_exponents(
            exps.iter().flat_map(|&e| [HalfInt::from_doubled(e), HalfInt::from_doubled(-e)]),
        );
        let mass = poly.mass();
        let lam = InfChar::single(poly).unwrap();
        let out = lambda_bracket_d(&lam, d);
        prop_assert_eq!(out.place(0).mass(), mass * BigInt::from(d));
        prop_assert!(out.place(0).is_symmetric());
    }

    #[test]
    fn root_number_invariant_under_repairing(
        conds in proptest::collection::vec((1u32..=4, prop::bool::ANY), 1..3),
        st_sizes in proptest::collection::vec(2u32..=5, 0..3),
    ) {
        // a dual pair's sign lives in the product of its members: moving the
        // sign between members or relabeling tags never changes the total
        let mut blocks_a = Vec::new();
        let mut blocks_b = Vec::new();
        for (i, (c, neg)) in conds.iter().enumerate() {
            let eps = if *neg { -1 } else { 1 };
            let mk = |e: i8, tag: u32| Block::Supercuspidal {
                rank: 1,
                conductor: *c,
                root_number: e,
                ramified: true,
                pairing: Pairing::Partner(tag),
                central: QuadCharData::TRIVIAL,
            };
            // version A: sign on the first member, tags from 0
            blocks_a.push(mk(eps, i as u32));
            blocks_a.push(mk(1, i as u32));
            // version B: sign on the second member, different labels
            blocks_b.push(mk(1, 50 + i as u32));
            blocks_b.push(mk(eps, 50 + i as u32));
        }
        for t in &st_sizes {
            blocks_a.push(Block::Steinberg { size: *t });
            blocks_b.push(Block::Steinberg { size: *t });
        }
        let n: u32 = blocks_a.iter().map(Block::rank).sum();
        let a = SegmentData::new(n, blocks_a).unwrap();
        let b = SegmentData::new(n, blocks_b).unwrap();
        let ra = segment_root_number(&a).unwrap();
        prop_assert_eq!(ra, segment_root_number(&b).unwrap());
        prop_assert_eq!(ra * ra, 1);
    }
}
