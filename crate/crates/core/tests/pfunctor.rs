use std::sync::Arc;

use proptest::prelude::*;
use twistcalc_core::adjunction::verify_uniqueness;
use twistcalc_core::adjunction::Mode;
use twistcalc_core::dgalg::*;
use twistcalc_core::exactalg::{Field, GradedMap, Matrix, Scalar};
use twistcalc_core::pfunctor::*;
use twistcalc_core::postnikov::Verdict;
use twistcalc_core::twisted::{cohomology_dims, null_homotopy};
use twistcalc_core::Error;

fn fields() -> [Field; 3] {
    [Field::prime(2).unwrap(), Field::prime(3).unwrap(), Field::Rational]
}

/// Adds `s · (u ⊗ v ⊗ …)` to column `q` of `flat`, for vectors on the atoms of `t`.
fn add_pure(t: &TensorProduct, flat: &mut Matrix, q: usize, parts: &[Vec<Scalar>], s: &Scalar) {
    let mut terms: Vec<(Vec<usize>, Scalar)> = vec![(Vec::new(), s.clone())];
    for part in parts {
        let mut next = Vec::new();
        for (idx, c) in &terms {
            for (i, x) in part.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
                let mut idx = idx.clone();
                idx.push(i);
                next.push((idx, c * x));
            }
        }
        terms = next;
    }
    for (idx, c) in terms {
        for (row, v) in t.project(&idx) {
            let e = flat.get(row, q) + &(&c * &v);
            flat.set(row, q, e);
        }
    }
}

/// `x ⊗ u ⊗ y ↦ x ⊗ hy − xh ⊗ y` on `N ⊗ H ⊗ M`.
fn hand_psi(ctx: &Ctx, data: &PnFunctorData) -> BimoduleMap {
    let (m, n, h) = (data.m(), data.n_mod(), data.h());
    let b = &data.adj.b_alg;
    let field = b.field();
    let src = ctx.tensor(&[n.clone(), h.clone(), m.clone()]).unwrap();
    let tgt = ctx.tensor(&[n.clone(), m.clone()]).unwrap();
    let hv = b.basis_vector(b.index_of("h").unwrap());
    let mut flat = Matrix::zeros(field, tgt.module().dim(), src.module().dim());
    for q in 0..src.module().dim() {
        let s = src.section(q);
        let (x, y) = (b.basis_vector(s[0]), b.basis_vector(s[2]));
        add_pure(&tgt, &mut flat, q, &[x.clone(), b.mul(&hv, &y)], &field.one());
        add_pure(&tgt, &mut flat, q, &[b.mul(&x, &hv), y], &field.one().neg());
    }
    let map = GradedMap::from_flat(src.module().space(), tgt.module().space(), 0, &flat).unwrap();
    BimoduleMap::new(src.module().clone(), tgt.module().clone(), map).unwrap()
}

/// `φ ⊗ y ↦ (h·φ) ⊗ u′ ⊗ y − φ ⊗ u′ ⊗ hy` on `L ⊗ M`.
fn hand_psi_prime(ctx: &Ctx, data: &PnFunctorData) -> BimoduleMap {
    let (m, l) = (data.m(), &data.left.as_ref().unwrap().m);
    let hp = &data.ext.h_adj.as_ref().unwrap().m;
    let b = &data.adj.b_alg;
    let field = b.field();
    let src = ctx.tensor(&[l.clone(), m.clone()]).unwrap();
    let tgt = ctx.tensor(&[l.clone(), hp.clone(), m.clone()]).unwrap();
    let hi = b.index_of("h").unwrap();
    let u = hp.basis_vector(0);
    let mut flat = Matrix::zeros(field, tgt.module().dim(), src.module().dim());
    for q in 0..src.module().dim() {
        let s = src.section(q);
        let (phi, y) = (l.basis_vector(s[0]), b.basis_vector(s[1]));
        let h_phi = l.left_action()[hi].apply(&phi).unwrap();
        let hy = b.mul(&b.basis_vector(hi), &y);
        add_pure(&tgt, &mut flat, q, &[h_phi, u.clone(), y], &field.one());
        add_pure(&tgt, &mut flat, q, &[phi, u.clone(), hy], &field.one().neg());
    }
    let map = GradedMap::from_flat(src.module().space(), tgt.module().space(), 0, &flat).unwrap();
    BimoduleMap::new(src.module().clone(), tgt.module().clone(), map).unwrap()
}

/// The coefficient `c` with `γ(u) = c · (1 ⊗ h)` for the degree-2 generator `u` of `Q_n`.
fn gamma_coefficient(ctx: &Ctx, data: &PnFunctorData) -> Scalar {
    let q = data.ext.q(data.ext.n).unwrap();
    let b = &data.adj.b_alg;
    let i = q.basis().iter().position(|e| e.degree == 2).unwrap();
    let image = data.ext.gamma.map().apply(&q.basis_vector(i)).unwrap();
    let t = ctx.tensor(&[data.m().clone(), data.n_mod().clone()]).unwrap();
    let (one, h) = (b.index_of("1").unwrap(), b.index_of("h").unwrap());
    let generator = t.project(&[one, h]);
    let (row, v) = generator.iter().next().unwrap().clone();
    let c = &image[row] * &v.inv().unwrap();
    let mut expected = vec![b.field().zero(); image.len()];
    for (r, x) in &generator {
        expected[*r] = &c * x;
    }
    assert_eq!(image, expected, "γ(u) is not a multiple of 1 ⊗ h");
    c
}

#[test]
fn pn_models_are_cyclic_extensions() {
    for field in fields() {
        for n in 1..=2 {
            let ctx = Ctx::new();
            let data = pn_model(&ctx, field, n).unwrap();
            let report = validate_cyclic_extension(&ctx, &data.ext, &data.adj).unwrap();
            assert!(report.is_ok(), "{report}");
            assert!(report.assumptions.iter().any(|a| a == KERNEL_ASSUMPTION));
        }
    }
}

#[test]
fn wrong_degree_differential_names_its_span() {
    let ctx = Ctx::new();
    let data = p1_model(&ctx, Field::prime(3).unwrap()).unwrap();
    let ext = &data.ext;
    let bad = BimoduleMap::zero(&ext.terms[1], &ext.terms[0], 1);
    let broken = CyclicExtensionData::new(&ext.h, ext.terms.clone(), vec![((1, 0), bad)], ext.term_isos.clone(), Some(&ext.gamma))
        .unwrap()
        .with_inverse(ext.h_adj.clone().unwrap());
    let report = validate_cyclic_extension(&ctx, &broken, &data.adj).unwrap();
    let failed: Vec<_> = report.failures().collect();
    assert_eq!(failed.len(), 1, "{report}");
    assert!(failed[0].detail.contains("span (-1, 0) has degree 1, expected 0"), "{}", failed[0].detail);
}

#[test]
fn zero_gamma_is_not_an_equivalence() {
    let ctx = Ctx::new();
    let mut data = p1_model(&ctx, Field::Rational).unwrap();
    data.ext.gamma = data.ext.gamma.scale(&Field::Rational.zero());
    let report = validate_cyclic_extension(&ctx, &data.ext, &data.adj).unwrap();
    let failed: Vec<_> = report.failures().map(|c| c.name.clone()).collect();
    assert!(failed.contains(&"γ is an equivalence".to_string()), "{report}");
    assert!(failed.contains(&"γ ∘ ι ≃ action".to_string()), "{report}");
}

#[test]
fn missing_inverse_is_reported() {
    let ctx = Ctx::new();
    let mut data = p1_model(&ctx, Field::prime(2).unwrap()).unwrap();
    data.ext.h_adj = None;
    let report = validate_cyclic_extension(&ctx, &data.ext, &data.adj).unwrap();
    assert_eq!(report.failures().next().unwrap().name, "H is invertible");
}

#[test]
fn psi_is_the_hand_formula_scaled_by_gamma() {
    for field in fields() {
        for n in 1..=2 {
            let ctx = Ctx::new();
            let data = pn_model(&ctx, field, n).unwrap();
            let c = gamma_coefficient(&ctx, &data);
            assert!(!c.is_zero());
            let psi = build_psi(&ctx, &data).unwrap();
            assert_eq!(psi.psi, hand_psi(&ctx, &data).scale(&c), "n = {n} over {field:?}");
        }
    }
}

#[test]
fn psi_does_not_depend_on_the_splitting() {
    for field in fields() {
        let ctx = Ctx::new();
        let data = p1_model(&ctx, field).unwrap();
        let s = splittings(&ctx, &data).unwrap();
        assert_eq!(s.dimension, 2);
        let psi = build_psi(&ctx, &data).unwrap();
        let (psi2, h) = psi.alternative.clone().unwrap();
        assert_eq!(h.differential(), psi.psi.sub(&psi2).unwrap());
        for other in &s.others {
            assert_eq!(psi_from_splitting(&ctx, &data, other).unwrap(), psi.psi);
        }
    }
}

#[test]
fn trace_kills_psi() {
    let ctx = Ctx::new();
    let data = pn_model(&ctx, Field::prime(5).unwrap(), 2).unwrap();
    let psi = build_psi(&ctx, &data).unwrap();
    let tr = data.adj.trace.retarget(psi.psi.target(), data.adj.trace.target()).unwrap();
    let composite = tr.compose(&psi.psi).unwrap();
    assert!(composite.is_zero());
    assert_eq!(psi.trace_null.differential(), composite);
}

#[test]
fn unsplit_extension_has_no_splitting() {
    let ctx = Ctx::new();
    let mut data = p1_model(&ctx, Field::prime(3).unwrap()).unwrap();
    data.ext.term_isos[0] = data.ext.term_isos[0].scale(&Field::prime(3).unwrap().zero());
    assert!(matches!(splittings(&ctx, &data), Err(Error::Precondition(_))));
}

#[test]
fn cotwist_of_pn_model_is_a_sum_of_shifts_of_h() {
    for n in 1..=3usize {
        let ctx = Ctx::new();
        let data = pn_model(&ctx, Field::prime(2).unwrap(), n).unwrap();
        let c = cotwist(&ctx, &data.adj).unwrap();
        let expected: Vec<(i32, usize)> = (1..=n as i32).map(|j| (2 * j + 1, 1)).collect();
        assert_eq!(cohomology_dims(&c.c), expected);
        assert_eq!(c.triangle.differential(), c.kappa.compose(&data.adj.action).unwrap());
    }
}

#[test]
fn cotwist_of_the_zero_functor_is_the_identity() {
    let ctx = Ctx::new();
    let f = Field::Rational;
    let k = DGAlgebra::ground(f);
    let b = DGAlgebra::truncated_polynomial(f, 2, 1);
    let m = Arc::new(Bimodule::zero(k.clone(), b.clone()));
    let n = Arc::new(Bimodule::zero(b.clone(), k.clone()));
    let trace = BimoduleMap::zero(&ctx.module(&[n.clone(), m.clone()]).unwrap(), &ctx.diagonal(&b), 0);
    let action = BimoduleMap::zero(&ctx.diagonal(&k), &ctx.module(&[m.clone(), n.clone()]).unwrap(), 0);
    let adj = twistcalc_core::adjunction::AdjunctionData::new(&ctx, &m, &n, &trace, &action).unwrap();
    let c = cotwist(&ctx, &adj).unwrap();
    assert_eq!(cohomology_dims(&c.c), vec![(0, 1)]);
}

#[test]
fn left_dual_of_psi_is_the_hand_formula() {
    for field in fields() {
        let ctx = Ctx::new();
        let data = p1_model(&ctx, field).unwrap();
        let c = gamma_coefficient(&ctx, &data);
        let psi = build_psi(&ctx, &data).unwrap().psi;
        let dual = left_dual_psi(&ctx, &data, &psi).unwrap();
        assert_eq!(dual, hand_psi_prime(&ctx, &data).scale(&c));
    }
}

#[test]
fn pn_models_satisfy_all_three_conditions() {
    for field in fields() {
        for n in 1..=2 {
            let ctx = Ctx::new();
            let data = pn_model(&ctx, field, n).unwrap();
            for check in [
                check_monad_condition(&ctx, &data).unwrap(),
                check_adjoints_condition(&ctx, &data).unwrap(),
                check_highest_degree_condition(&ctx, &data).unwrap(),
            ] {
                assert!(check.holds, "{} fails for n = {n}: {}", check.name, check.detail);
                assert!(check.witness.as_ref().unwrap().verify());
            }
        }
    }
}

#[test]
fn zero_psi_breaks_the_monad_condition() {
    let ctx = Ctx::new();
    let mut data = p1_model(&ctx, Field::prime(3).unwrap()).unwrap();
    let psi = build_psi(&ctx, &data).unwrap().psi;
    data.psi = Some(psi.scale(&Field::prime(3).unwrap().zero()));
    let check = check_monad_condition(&ctx, &data).unwrap();
    assert!(!check.holds);
    assert!(!check.cone_cohomology.is_empty());
}

#[test]
fn zero_mu_breaks_the_adjoints_condition() {
    let ctx = Ctx::new();
    let mut data = p1_model(&ctx, Field::Rational).unwrap();
    data.mu_top = Some(data.ext.mu(1).unwrap().scale(&Field::Rational.zero()));
    let check = check_adjoints_condition(&ctx, &data).unwrap();
    assert!(!check.holds);
    assert!(check.witness.is_none());
}

#[test]
fn zero_psi_prime_breaks_the_highest_degree_condition() {
    let ctx = Ctx::new();
    let mut data = p1_model(&ctx, Field::prime(2).unwrap()).unwrap();
    let psi = build_psi(&ctx, &data).unwrap().psi;
    let dual = left_dual_psi(&ctx, &data, &psi).unwrap();
    data.psi_prime = Some(dual.scale(&Field::prime(2).unwrap().zero()));
    let check = check_highest_degree_condition(&ctx, &data).unwrap();
    assert!(!check.holds);
    assert!(check.detail.starts_with("supplied ψ′ is not homotopic"), "{}", check.detail);
}

#[test]
fn ptwist_of_pn_model_is_b_shifted_by_2n() {
    for n in 1..=2usize {
        let ctx = Ctx::new();
        let data = pn_model(&ctx, Field::prime(3).unwrap(), n).unwrap();
        let t = build_ptwist(&ctx, &data, None).unwrap();
        let expected: Vec<(i32, usize)> = (0..=n as i32).map(|j| (2 * n as i32 + 2 * j, 1)).collect();
        assert_eq!(cohomology_dims(&t.twist), expected);
        assert_eq!(t.twist.dim(), [10, 21][n - 1]);
        assert_eq!(t.uniqueness.verdict, Verdict::SingleClass);
    }
}

#[test]
fn p1_bundle_has_a_nontrivial_lift_space() {
    for field in fields() {
        let ctx = Ctx::new();
        let data = p1_model(&ctx, field).unwrap();
        let psi = build_psi(&ctx, &data).unwrap().psi;
        let s = p1_uniqueness_scenario(&ctx, &data, &psi).unwrap();
        assert!(s.lifts(&ctx).unwrap().dimension().unwrap() >= 1);
        let mode = match field.size() {
            Some(_) => Mode::Exhaustive { limit: 64 },
            None => Mode::Sample { pairs: 4, seed: 7 },
        };
        let report = verify_uniqueness(&ctx, &s, mode).unwrap();
        assert_eq!(report.verdict, Verdict::SingleClass);
        assert!(report.members >= 2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn every_splitting_gives_the_same_psi(p in prop::sample::select(vec![2u64, 3, 5, 7]), a in 0u64..7, b in 0u64..7) {
        let field = Field::prime(p).unwrap();
        let ctx = Ctx::new();
        let data = p1_model(&ctx, field).unwrap();
        let s = splittings(&ctx, &data).unwrap();
        let base = psi_from_splitting(&ctx, &data, &s.particular).unwrap();
        let mut sigma = s.particular.clone();
        for (v, c) in s.others.iter().zip([a, b]) {
            let direction = v.sub(&s.particular).unwrap();
            sigma = sigma.add(&direction.scale(&field.from_i64(c as i64))).unwrap();
        }
        let psi = psi_from_splitting(&ctx, &data, &sigma).unwrap();
        prop_assert!(null_homotopy(&ctx, &psi.sub(&base).unwrap()).unwrap().exists());
    }
}
