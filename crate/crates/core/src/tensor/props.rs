use proptest::prelude::*;

use super::*;

fn small_matrix(max: usize) -> impl Strategy<Value = CMatrix> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), r * c)
            .prop_map(move |v| CMatrix::new(r, c, v.into_iter().map(|(a, b)| C64::new(a, b)).collect()).unwrap())
    })
}

/// Small integer entries keep every product exactly representable.
fn integer_matrix(max: usize) -> impl Strategy<Value = CMatrix> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        prop::collection::vec((-9i32..10, -9i32..10), r * c).prop_map(move |v| {
            CMatrix::new(r, c, v.into_iter().map(|(a, b)| C64::new(a as f64, b as f64)).collect()).unwrap()
        })
    })
}

fn random_density(dim: usize, seed: u64) -> CMatrix {
    let u = random_unitary(dim, seed);
    let mut weights: Vec<f64> = (0..dim).map(|k| 1.0 + ((seed as usize + k) % 3) as f64).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    (&(&u * &CMatrix::from_real_diag(&weights)) * &u.dagger()).hermitian_part()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kron_is_associative_exactly_on_gaussian_integers(
        a in integer_matrix(3), b in integer_matrix(3), c in integer_matrix(2)
    ) {
        prop_assert_eq!(a.kron(&b).kron(&c), a.kron(&b.kron(&c)));
    }

    #[test]
    fn kron_is_associative_to_rounding(a in small_matrix(3), b in small_matrix(3), c in small_matrix(2)) {
        let left = a.kron(&b).kron(&c);
        let right = a.kron(&b.kron(&c));
        let scale = a.max_abs() * b.max_abs() * c.max_abs();
        prop_assert!(left.max_abs_diff(&right).unwrap() <= 8.0 * f64::EPSILON * scale.max(1.0));
    }

    #[test]
    fn partial_trace_is_linear_in_mixtures(seed in 0u64..10_000, q in 0.0f64..1.0) {
        let l = Layout::new([("A", 2), ("B", 3)]).unwrap();
        let r1 = random_density(6, seed);
        let r2 = random_density(6, seed + 1);
        let mix = &r1.scale_real(q) + &r2.scale_real(1.0 - q);
        let lhs = l.partial_trace(&mix, &["A"]).unwrap();
        let rhs = &l.partial_trace(&r1, &["A"]).unwrap().scale_real(q)
            + &l.partial_trace(&r2, &["A"]).unwrap().scale_real(1.0 - q);
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-12);
        prop_assert!((lhs.trace() - C64::new(1.0, 0.0)).norm() <= 1e-12);
    }

    #[test]
    fn schmidt_squares_match_both_marginals(seed in 0u64..10_000, da in 2usize..5, db in 2usize..5) {
        let l = Layout::new([("A", da), ("B", db)]).unwrap();
        let psi = random_ket(da * db, seed);
        let sd = schmidt(&psi, &l, &["A"]).unwrap();
        let sum: f64 = sd.coefficients.iter().map(|c| c * c).sum();
        prop_assert!((sum - 1.0).abs() <= 1e-10);
        for side in [["A"], ["B"]] {
            let e = eig_hermitian(&l.reduce_ket(&psi, &side).unwrap()).unwrap();
            for (k, c) in sd.coefficients.iter().enumerate() {
                prop_assert!((c * c - e.values[k]).abs() <= 1e-9);
            }
        }
        for vecs in [&sd.left, &sd.right] {
            for i in 0..vecs.len() {
                for j in 0..vecs.len() {
                    let g = vecs[i].inner(&vecs[j]).unwrap();
                    let want = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((g - C64::new(want, 0.0)).norm() <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn eigenvectors_are_orthonormal(seed in 0u64..10_000, dim in 1usize..8) {
        let h = random_density(dim, seed);
        let e = eig_hermitian(&h).unwrap();
        let gram = &e.vectors.dagger() * &e.vectors;
        prop_assert!(gram.max_abs_diff(&CMatrix::identity(dim)).unwrap() <= 1e-10);
        prop_assert!(e.reconstruct().max_abs_diff(&h).unwrap() <= 1e-9);
    }

    #[test]
    fn haar_sampling_is_reproducible(seed in any::<u64>(), dim in 1usize..6) {
        prop_assert_eq!(random_unitary(dim, seed), random_unitary(dim, seed));
        prop_assert!(is_unitary(&random_unitary(dim, seed), 1e-10));
    }
}
