use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twistcalc_core::exactalg::*;

fn random_matrix(field: Field, rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let entries = (0..rows)
        .map(|_| (0..cols).map(|_| field.random(rng)).collect())
        .collect();
    Matrix::from_rows(field, rows, cols, entries).unwrap()
}

fn all_vectors(field: Field, n: usize) -> Vec<Vec<Scalar>> {
    let els = field.elements().unwrap();
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                els.iter().map(move |e| {
                    let mut w = v.clone();
                    w.push(e.clone());
                    w
                })
            })
            .collect();
    }
    out
}

fn in_span(field: Field, v: &[Scalar], gens: &[Vec<Scalar>]) -> bool {
    let n = v.len();
    let mut m = Matrix::zeros(field, n, gens.len());
    for (c, g) in gens.iter().enumerate() {
        for r in 0..n {
            m.set(r, c, g[r].clone());
        }
    }
    !solve_affine(&m, v).unwrap().is_empty()
}

#[test]
fn solution_set_matches_enumeration_over_f5() {
    let f5 = Field::prime(5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..20 {
        let mut a = random_matrix(f5, 4, 3, &mut rng);
        if trial % 3 == 0 {
            // force rank deficiency so kernels show up
            for c in 0..3 {
                let v = a.get(0, c).clone();
                a.set(1, c, &v + &v);
            }
        }
        let b: Vec<Scalar> = if trial % 2 == 0 {
            let x: Vec<Scalar> = (0..3).map(|_| f5.random(&mut rng)).collect();
            a.mul_vec(&x).unwrap()
        } else {
            (0..4).map(|_| f5.random(&mut rng)).collect()
        };
        let brute: Vec<Vec<Scalar>> = all_vectors(f5, 3)
            .into_iter()
            .filter(|x| a.mul_vec(x).unwrap() == b)
            .collect();
        assert_eq!(all_vectors(f5, 3).len(), 125);
        let sol = solve_affine(&a, &b).unwrap();
        assert_eq!(sol.count().unwrap() as usize, brute.len());
        for i in 0..sol.count().unwrap() {
            let p = sol.point(&sol.coefficients_of(i).unwrap()).unwrap();
            assert!(brute.contains(&p));
        }
    }
}

#[test]
fn cohomology_matches_enumeration_over_f3() {
    let f3 = Field::prime(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..15 {
        // C^-1 -> C^0 -> C^1 with d_out ∘ d_in = 0 built as d_in = K·R for K spanning ker d_out
        let (n_in, n_mid, n_out) = (rng.gen_range(0..3), rng.gen_range(1..4), rng.gen_range(0..3));
        let d_out_m = random_matrix(f3, n_out, n_mid, &mut rng);
        let ker = d_out_m.kernel_basis();
        let mut k = Matrix::zeros(f3, n_mid, ker.len());
        for (c, v) in ker.iter().enumerate() {
            for r in 0..n_mid {
                k.set(r, c, v[r].clone());
            }
        }
        let d_in_m = k.mul(&random_matrix(f3, ker.len(), n_in, &mut rng)).unwrap();
        let s = GradedSpace::new([(-1, n_in)]);
        let m = GradedSpace::new([(0, n_mid)]);
        let t = GradedSpace::new([(1, n_out)]);
        let d_in = GradedMap::from_blocks(f3, &s, &m, 1, [(-1, d_in_m.clone())]).unwrap();
        let d_out = GradedMap::from_blocks(f3, &m, &t, 1, [(0, d_out_m.clone())]).unwrap();
        let h = cohomology_at(&d_in, &d_out, 0).unwrap();

        let cocycles: Vec<Vec<Scalar>> = all_vectors(f3, n_mid)
            .into_iter()
            .filter(|v| d_out_m.mul_vec(v).unwrap().iter().all(Scalar::is_zero))
            .collect();
        let image: Vec<Vec<Scalar>> = (0..n_in).map(|c| d_in_m.column(c)).collect();
        let boundaries = cocycles.iter().filter(|v| in_span(f3, v, &image)).count();
        // |Z| / |B| = 3^dim H
        assert_eq!(cocycles.len(), boundaries * 3usize.pow(h.dimension as u32));
        for r in &h.representatives {
            assert!(cocycles.contains(r));
        }
    }
}

fn small_field() -> impl Strategy<Value = Field> {
    prop_oneof![
        Just(Field::Rational),
        Just(Field::prime(2).unwrap()),
        Just(Field::prime(3).unwrap()),
        Just(Field::prime(7).unwrap()),
    ]
}

proptest! {
    #[test]
    fn rank_nullity(field in small_field(), rows in 0usize..6, cols in 0usize..6, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_matrix(field, rows, cols, &mut rng);
        prop_assert_eq!(m.rank() + m.kernel_basis().len(), cols);
        for v in m.kernel_basis() {
            prop_assert!(m.mul_vec(&v).unwrap().iter().all(Scalar::is_zero));
        }
    }

    #[test]
    fn dense_and_sparse_paths_agree(field in small_field(), rows in 1usize..8, cols in 1usize..8, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = random_matrix(field, rows, cols, &mut rng);
        // sparsify
        for r in 0..rows {
            for c in 0..cols {
                if rng.gen_bool(0.5) {
                    m.set(r, c, field.zero());
                }
            }
        }
        let b: Vec<Scalar> = (0..rows).map(|_| field.random(&mut rng)).collect();
        let dense = solve_affine_with(&SolverConfig { sparse_threshold: usize::MAX }, &m, &b).unwrap();
        let sparse = solve_affine_with(&SolverConfig { sparse_threshold: 0 }, &m, &b).unwrap();
        prop_assert_eq!(&dense, &sparse);
        if let Some(p) = &dense.particular {
            prop_assert_eq!(m.mul_vec(p).unwrap(), b.clone());
            let coeffs: Vec<Scalar> = dense.kernel_basis.iter().map(|_| field.random(&mut rng)).collect();
            prop_assert_eq!(m.mul_vec(&dense.point(&coeffs).unwrap()).unwrap(), b);
        }
    }

    #[test]
    fn cohomology_is_basis_invariant(seed in any::<u64>()) {
        let f = Field::prime(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..5);
        let d_out_m = random_matrix(f, 2, n, &mut rng);
        let ker = d_out_m.kernel_basis();
        let mut d_in_m = Matrix::zeros(f, n, 2);
        if let Some(v) = ker.first() {
            for r in 0..n {
                d_in_m.set(r, 0, v[r].clone());
            }
        }
        let mut p = random_matrix(f, n, n, &mut rng);
        while p.inverse().is_none() {
            p = random_matrix(f, n, n, &mut rng);
        }
        let pinv = p.inverse().unwrap();
        let s = GradedSpace::new([(-1, 2)]);
        let m = GradedSpace::new([(0, n)]);
        let t = GradedSpace::new([(1, 2)]);
        let dim = |a: &Matrix, b: &Matrix| {
            let d_in = GradedMap::from_blocks(f, &s, &m, 1, [(-1, a.clone())]).unwrap();
            let d_out = GradedMap::from_blocks(f, &m, &t, 1, [(0, b.clone())]).unwrap();
            cohomology_at(&d_in, &d_out, 0).unwrap().dimension
        };
        let before = dim(&d_in_m, &d_out_m);
        let after = dim(&p.mul(&d_in_m).unwrap(), &d_out_m.mul(&pinv).unwrap());
        prop_assert_eq!(before, after);
    }
}
