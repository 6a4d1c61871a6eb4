use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rdk_core::zlattice::*;

fn matrix(rows: usize, cols: usize, range: i64) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec(-range..=range, rows * cols)
        .prop_map(move |v| IntMatrix::from_vec(rows, cols, v.into_iter().map(int).collect()))
}

fn any_matrix() -> impl Strategy<Value = IntMatrix> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| matrix(r, c, 6))
}

fn is_unimodular(m: &IntMatrix) -> bool {
    m.det().abs().is_one()
}

/// Size of `Z^n / L` by breadth-first coset enumeration.
fn coset_reps(l: &IntMatrix, n: usize) -> Vec<IntVec> {
    let mut reps: Vec<IntVec> = vec![vec![BigInt::zero(); n]];
    let mut i = 0;
    while i < reps.len() {
        for k in 0..n {
            let mut v = reps[i].clone();
            v[k] += 1;
            if !reps.iter().any(|w| contains(l, &vsub(&v, w))) {
                reps.push(v);
            }
        }
        i += 1;
    }
    reps
}

fn order_mod(l: &IntMatrix, v: &[BigInt]) -> u64 {
    let mut k = 1u64;
    while !contains(l, &vscale(&BigInt::from(k), v)) {
        k += 1;
    }
    k
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn smith_reassembles(m in any_matrix()) {
        let d = smith_normal_form(&m);
        prop_assert_eq!(d.u.mul(&m).mul(&d.v), d.s.clone());
        prop_assert!(is_unimodular(&d.u) && is_unimodular(&d.v));
        prop_assert_eq!(d.u_inv.mul(&d.s).mul(&d.v_inv), m);
        let diag = d.diagonal();
        for w in diag.windows(2) {
            prop_assert!(w[0].is_zero() && w[1].is_zero() || (!w[0].is_zero() && (&w[1] % &w[0]).is_zero()));
        }
    }

    #[test]
    fn adapted_divisors_multiply_to_index(m in matrix(3, 3, 5)) {
        let det = m.det().abs();
        prop_assume!(!det.is_zero());
        let ab = adapted_basis(&m, 3).unwrap();
        let prod: BigInt = ab.divisors.iter().product();
        prop_assert_eq!(&prod, &det);
        prop_assert_eq!(index(&m), Some(det));
        prop_assert!(is_unimodular(&ab.basis));
        let scaled: Vec<IntVec> = (0..3).map(|j| vscale(&ab.divisors[j], &ab.basis.col(j))).collect();
        prop_assert!(same_lattice(&IntMatrix::from_cols(&scaled, 3), &m));
    }

    #[test]
    fn saturation_and_annihilator(a in matrix(3, 2, 5), extra in matrix(3, 1, 5)) {
        let sat = saturation(&a, 3);
        prop_assert!(same_lattice(&saturation(&sat, 3), &sat));
        prop_assert!(contains_all(&sat, &a));
        let b = a.hstack(&extra);
        let (ann_a, ann_b) = (annihilator(&a, 3), annihilator(&b, 3));
        prop_assert!(contains_all(&ann_a, &ann_b));
        let double = annihilator(&ann_a, 3);
        prop_assert!(contains_all(&double, &a));
        prop_assert_eq!(same_lattice(&double, &lattice_basis(&a)), same_lattice(&sat, &lattice_basis(&a)));
    }

    #[test]
    fn fiber_product_index(d in 2i64..8, c1 in prop::collection::vec(-9i64..9, 2), c2 in prop::collection::vec(-9i64..9, 3)) {
        let a = FinAbPresentation::standard(vec![int(d)]);
        let h1 = a.reduce_map(&IntMatrix::from_vec(1, 2, c1.into_iter().map(int).collect()));
        let h2 = a.reduce_map(&IntMatrix::from_vec(1, 3, c2.into_iter().map(int).collect()));
        prop_assume!(a.is_surjective(&h1) && a.is_surjective(&h2));
        let fp = fiber_product(&h1, &h2, &a).unwrap();
        prop_assert_eq!(index(&fp.basis), Some(int(d)));
        prop_assert!(right_inverse(&fp.incl1).is_ok());
        prop_assert!(right_inverse(&fp.incl2).is_ok());
    }

    #[test]
    fn quotient_matches_coset_enumeration(m in (1usize..=3).prop_flat_map(|n| matrix(n, n, 4))) {
        let n = m.rows();
        let det = m.det().abs();
        prop_assume!(!det.is_zero() && det <= int(48));
        let reps = coset_reps(&m, n);
        prop_assert_eq!(BigInt::from(reps.len()), det.clone());
        let q = quotient_presentation(&m, n);
        prop_assert_eq!(q.order(), Some(det.clone()));
        // |A[k]| = ∏ gcd(k, d_i) for every k dividing |A|
        let size = reps.len() as u64;
        for k in (1..=size).filter(|k| size.is_multiple_of(*k)) {
            let brute = reps.iter().filter(|v| k % order_mod(&m, v) == 0).count() as u64;
            let formula: BigInt = q.invariant_factors.iter().map(|d| d.gcd(&BigInt::from(k))).product();
            prop_assert_eq!(BigInt::from(brute), formula);
        }
    }
}
