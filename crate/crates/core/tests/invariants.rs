use lmhs_heights::analytic::{genus0_regularized_integral, C64};
use lmhs_heights::arith::BigInt;
use lmhs_heights::mhs::random::{random_basis_change, well_conditioned_matrix};
use lmhs_heights::mhs::{change_basis, height, height_matrix_rank_m, RankMBiextensionMatrix};
use lmhs_heights::nonarch::{component_index, phi_pairing, EllipticCurveQ, RationalPoint};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn complex(bound: f64) -> impl Strategy<Value = C64> {
    (-bound..bound, -bound..bound).prop_map(|(re, im)| C64::new(re, im))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn height_ignores_basis(seed in any::<u64>(), k in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = well_conditioned_matrix(k, &mut rng);
        let g = random_basis_change(k, &mut rng);
        let h = height(&p).unwrap();
        prop_assert!((h - height(&change_basis(&p, &g).unwrap()).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn direct_sum_heights_are_diagonal(seed in any::<u64>(), k1 in 1usize..3, k2 in 1usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let parts = [well_conditioned_matrix(k1, &mut rng), well_conditioned_matrix(k2, &mut rng)];
        let (h, total) = height_matrix_rank_m(&RankMBiextensionMatrix::direct_sum(&parts).unwrap()).unwrap();
        for (i, part) in parts.iter().enumerate() {
            prop_assert!((h[(i, i)] - height(part).unwrap()).abs() < 1e-10);
        }
        prop_assert!(h[(0, 1)].abs() < 1e-10 && h[(1, 0)].abs() < 1e-10);
        prop_assert!((total - h.trace()).abs() < 1e-10);
    }

    #[test]
    fn genus0_scales_and_translates(p in complex(3.0), d in complex(3.0), w in complex(5.0), sp in complex(2.0), sq in complex(2.0), c in 0.1f64..10.0) {
        prop_assume!(d.norm() > 1e-3 && sp.norm() > 1e-3 && sq.norm() > 1e-3);
        let q = p + d;
        let base = genus0_regularized_integral(p, q, sp, sq).unwrap();
        let moved = genus0_regularized_integral(p + w, q + w, sp, sq).unwrap();
        prop_assert!((base - moved).abs() < 1e-9 * (1.0 + base.abs()));
        let scaled = genus0_regularized_integral(p, q, sp * c, sq).unwrap();
        prop_assert!((scaled - base + c.ln()).abs() < 1e-12 * (1.0 + base.abs()));
        let swapped = genus0_regularized_integral(q, p, sq, sp).unwrap();
        prop_assert!((swapped - base).abs() < 1e-12 * (1.0 + base.abs()));
    }
}

fn i4() -> (EllipticCurveQ, RationalPoint, BigInt) {
    (EllipticCurveQ::from_ints([0, -1, 1, -5, -16]).unwrap(), RationalPoint::from_ints(4, 3), BigInt::from(2))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn component_index_follows_the_group_law(n in 1i64..7) {
        let (e, p, two) = i4();
        let n_p = e.multiply(&p, n);
        prop_assume!(!n_p.is_infinity());
        let i = component_index(&e, &p, &two).unwrap() as i64;
        let r = (n * i).rem_euclid(4);
        prop_assert_eq!(component_index(&e, &n_p, &two).unwrap() as i64, r.min(4 - r));
    }

    #[test]
    fn phi_pairing_is_symmetric(a in 1i64..5, b in 1i64..5) {
        let (e, p, two) = i4();
        let (x, y) = (e.multiply(&p, a), e.multiply(&p, b));
        prop_assume!(!x.is_infinity() && !y.is_infinity());
        prop_assert_eq!(phi_pairing(&e, &x, &y, &two).unwrap(), phi_pairing(&e, &y, &x, &two).unwrap());
    }
}
