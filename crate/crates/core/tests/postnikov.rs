use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use twistcalc_core::dgalg::*;
use twistcalc_core::exactalg::{Field, GradedMap, Matrix};
use twistcalc_core::postnikov::*;
use twistcalc_core::sample;
use twistcalc_core::twisted::*;
use twistcalc_core::Error;

fn complex(k: &Arc<DGAlgebra>, names: &[(&str, i32)], d: &[(usize, usize, i64)]) -> Arc<Bimodule> {
    let f = k.field();
    let n = names.len();
    let mut dm = Matrix::zeros(f, n, n);
    for &(r, c, v) in d {
        dm.set(r, c, f.from_i64(v));
    }
    let basis = names.iter().map(|(s, deg)| BasisElement::new(*s, *deg)).collect();
    Arc::new(Bimodule::new("V", k.clone(), k.clone(), basis, &dm, &[Matrix::identity(f, n)], &[Matrix::identity(f, n)]).unwrap())
}

fn map(s: &Arc<Bimodule>, t: &Arc<Bimodule>, degree: i32, entries: &[(usize, usize, i64)]) -> BimoduleMap {
    let f = s.field();
    let mut m = Matrix::zeros(f, t.dim(), s.dim());
    for &(r, c, v) in entries {
        m.set(r, c, f.from_i64(v));
    }
    BimoduleMap::new(s.clone(), t.clone(), GradedMap::from_flat(s.space(), t.space(), degree, &m).unwrap()).unwrap()
}

/// `a → b → {c1 → c0}`, `g: b ↦ −c0`, `x: a ↦ c1`.
fn sample_complex(field: Field) -> TwistedComplex {
    let k = DGAlgebra::ground(field);
    let a = complex(&k, &[("a", 0)], &[]);
    let b = complex(&k, &[("b", 0)], &[]);
    let c = complex(&k, &[("c1", -1), ("c0", 0)], &[(1, 0, 1)]);
    let f = map(&a, &b, 0, &[(0, 0, 1)]);
    let g = map(&b, &c, 0, &[(1, 0, -1)]);
    let x = map(&a, &c, -1, &[(0, 0, 1)]);
    TwistedComplex::three_term(&a, &b, &c, &f, &g, &x).unwrap()
}

fn random_complex(seed: u64, p: u64) -> TwistedComplex {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = Field::prime(p).unwrap();
    let k = DGAlgebra::ground(f);
    let ctx = Ctx::new();
    let a = Arc::new(sample::random_complex(&k, "A", -2..=2, 2, &mut rng));
    let b = Arc::new(sample::random_complex(&k, "B", -2..=2, 2, &mut rng));
    let c = Arc::new(sample::random_complex(&k, "C", -2..=2, 2, &mut rng));
    sample::random_three_term(&ctx, &a, &b, &c, &mut rng).unwrap()
}

#[test]
fn right_system_with_zero_lift() {
    let t = sample_complex(Field::Rational);
    let t0 = ThreeTermData::of(&t).unwrap();
    let zero = BimoduleMap::zero(&t0.a, &t0.c, -1);
    // a zero lift needs g f = 0; use g = 0
    let base = ThreeTermData::new(t0.f.clone(), BimoduleMap::zero(&t0.b, &t0.c, 0)).unwrap();
    let t = base.complex(&zero).unwrap();
    let s = induced_right_postnikov(&t).unwrap();
    let j = s.lifted_map();
    assert_eq!(j.components().count(), 1);
    assert_eq!(j.component(0, 0), base.f);
    assert!(j.component(0, 1).is_zero());
    let s = induced_left_postnikov(&t).unwrap();
    let m = s.lifted_map();
    assert!(m.component(0, 0).is_zero());
    assert_eq!(m.component(1, 0), base.g);
}

#[test]
fn induced_systems_are_valid() {
    let ctx = Ctx::new();
    let t = sample_complex(Field::Rational);
    for s in [induced_right_postnikov(&t).unwrap(), induced_left_postnikov(&t).unwrap()] {
        let r = validate_postnikov(&ctx, &s).unwrap();
        assert!(r.is_ok(), "{r}");
    }
}

#[test]
fn right_system_convolution_is_the_complex() {
    let t = sample_complex(Field::Rational);
    let s = induced_right_postnikov(&t).unwrap();
    assert_eq!(s.lifted_map().component(0, 1), t.q(0, 2));
    assert_eq!(s.convolution_complex().unwrap(), t);
    assert_eq!(*s.convolution().unwrap(), *t.convolve().unwrap());
}

#[test]
fn left_system_convolution_agrees_up_to_sign() {
    let ctx = Ctx::new();
    let t = sample_complex(Field::Rational);
    let s = induced_left_postnikov(&t).unwrap();
    let tot = s.convolution_complex().unwrap();
    assert_eq!(tot.q(0, 1), t.q(0, 1).neg());
    assert_eq!(tot.q(0, 2), t.q(0, 2).neg());
    assert_eq!(tot.q(1, 2), t.q(1, 2));
    let (lift, phi) = comparison_to_lift(&ctx, &s).unwrap();
    assert_eq!(lift, t);
    assert!(is_homotopy_equivalence(&ctx, &phi).unwrap().unwrap().verify());
}

#[test]
fn lifting_an_induced_system_recovers_the_complex() {
    let ctx = Ctx::new();
    let t = sample_complex(Field::prime(5).unwrap());
    assert_eq!(lift_to_twisted(&ctx, &induced_right_postnikov(&t).unwrap()).unwrap(), t);
    assert_eq!(lift_to_twisted(&ctx, &induced_left_postnikov(&t).unwrap()).unwrap(), t);
}

#[test]
fn boundary_perturbation_of_m_is_corrected() {
    let ctx = Ctx::new();
    let field = Field::Rational;
    let t = sample_complex(field);
    let base = ThreeTermData::of(&t).unwrap();
    let s = induced_left_postnikov(&t).unwrap();
    // W: Y → C with block α: b ↦ c1 (degree −1)
    let alpha = map(&base.b, &base.c, -1, &[(0, 0, 1)]);
    let m = s.lifted_map();
    let w = TwistedMorphism::zero(m.source(), m.target(), -1).with_component(1, 0, alpha.clone()).unwrap();
    let dw = w.differential().unwrap();
    let m2 = TwistedMorphism::from_total(m.source(), m.target(), &m.total().unwrap().add(&dw.total().unwrap()).unwrap()).unwrap();
    assert_ne!(m2.component(1, 0), base.g);
    let mut s2 = s.clone();
    s2.maps[2] = m2.clone();
    assert!(validate_postnikov(&ctx, &s2).unwrap().is_ok());
    let t2 = lift_to_twisted(&ctx, &s2).unwrap();
    assert!(validate_twisted(&t2).is_ok());
    // x = x′ − α′ f with x′ = −(block A → C of m2) and d α′ = g − g′
    let (y, g1) = (m2.component(0, 0), m2.component(1, 0));
    let diff = base.g.sub(&g1).unwrap();
    assert_eq!(alpha.differential().neg(), diff);
    // Hom⁻¹(B, C) has no cycles here, so α′ = −α is forced
    let expected = y.neg().sub(&alpha.neg().compose(&base.f).unwrap()).unwrap();
    assert_eq!(t2.q(0, 2), expected);
    assert_eq!(t2, t);
    let (_, phi) = comparison_to_lift(&ctx, &s2).unwrap();
    assert!(is_homotopy_equivalence(&ctx, &phi).unwrap().is_some());
}

/// `a → b → c` in degree 0 with `f = 0`, `g = id`, `x = 0`.
fn split_complex(field: Field) -> TwistedComplex {
    let k = DGAlgebra::ground(field);
    let a = complex(&k, &[("a", 0)], &[]);
    let b = complex(&k, &[("b", 0)], &[]);
    let c = complex(&k, &[("c", 0)], &[]);
    let g = map(&b, &c, 0, &[(0, 0, 1)]);
    TwistedComplex::three_term(&a, &b, &c, &BimoduleMap::zero(&a, &b, 0), &g, &BimoduleMap::zero(&a, &c, -1)).unwrap()
}

#[test]
fn broken_triangle_is_rejected() {
    let ctx = Ctx::new();
    let t = split_complex(Field::Rational);
    let s = induced_left_postnikov(&t).unwrap();
    let m = s.lifted_map();
    let mut s2 = s.clone();
    s2.maps[2] = TwistedMorphism::zero(m.source(), m.target(), 0);
    let r = validate_postnikov(&ctx, &s2).unwrap();
    assert!(r.failures().any(|c| c.name == "m ∘ k ≃ g"), "{r}");
    assert!(matches!(lift_to_twisted(&ctx, &s2), Err(Error::Precondition(_))));
    assert!(convert_system(&ctx, &s2).is_err());
}

#[test]
fn double_conversion_returns_an_equivalent_system() {
    let ctx = Ctx::new();
    let t = sample_complex(Field::prime(3).unwrap());
    let s = induced_right_postnikov(&t).unwrap();
    let once = certify_conversion(&ctx, &s).unwrap();
    assert_eq!(once.converted.orientation, Orientation::Left);
    assert!(once.verify());
    let twice = certify_conversion(&ctx, &once.converted).unwrap();
    assert_eq!(twice.converted.orientation, Orientation::Right);
    assert!(twice.verify());
    let back = twice.direct.f.compose(&once.direct.f).unwrap();
    assert!(is_homotopy_equivalence(&ctx, &back).unwrap().is_some());
}

#[test]
fn zero_third_term() {
    let ctx = Ctx::new();
    let field = Field::prime(2).unwrap();
    let k = DGAlgebra::ground(field);
    let a = complex(&k, &[("a", 0)], &[]);
    let b = complex(&k, &[("b", 0), ("b1", 1)], &[]);
    let c = Arc::new(Bimodule::zero(k.clone(), k.clone()));
    let f = map(&a, &b, 0, &[(0, 0, 1)]);
    let base = ThreeTermData::new(f.clone(), BimoduleMap::zero(&b, &c, 0)).unwrap();
    let t = base.complex(&BimoduleMap::zero(&a, &c, -1)).unwrap();
    let s = induced_right_postnikov(&t).unwrap();
    // X ≃ B[1]
    assert_eq!(*s.cone_bimodule().unwrap(), b.shift(1));
    let cert = certify_conversion(&ctx, &s).unwrap();
    assert!(cert.verify());
    // both convolutions are cone(f)[1]
    let c1 = Arc::new(cone_of_map(&f).unwrap().convolve().unwrap().shift(1));
    let c2 = cert.converted.convolution().unwrap();
    assert_eq!(cohomology_dims(&c1), cohomology_dims(&c2));
    assert_eq!(cohomology_dims(&c1), cohomology_dims(&s.convolution().unwrap()));
}

#[test]
fn surjectivity_holds_when_hom_minus_one_vanishes() {
    let ctx = Ctx::new();
    let t = sample_complex(Field::prime(2).unwrap());
    // drop c1 so that Hom⁻¹(A, C) = 0
    let base = ThreeTermData::of(&t).unwrap();
    let k = base.a.left().clone();
    let c = complex(&k, &[("c0", 0)], &[]);
    let g = map(&base.b, &c, 0, &[]);
    let base = ThreeTermData::new(base.f.clone(), g).unwrap();
    for side in [Orientation::Left, Orientation::Right] {
        let s = surjectivity_criterion(&ctx, &base, side).unwrap();
        assert!(s.holds);
        assert_eq!(s.target_dim, 0);
    }
}

#[test]
fn surjectivity_witnesses_hit_every_class() {
    let ctx = Ctx::new();
    let field = Field::prime(3).unwrap();
    let k = DGAlgebra::ground(field);
    let a = complex(&k, &[("a", 0)], &[]);
    let b = complex(&k, &[("b", -1)], &[]);
    let c = complex(&k, &[("c", -1)], &[]);
    let f = BimoduleMap::zero(&a, &b, 0);
    let g = map(&b, &c, 0, &[(0, 0, 1)]);
    let base = ThreeTermData::new(f, g.clone()).unwrap();
    let s = surjectivity_criterion(&ctx, &base, Orientation::Right).unwrap();
    assert!(s.holds);
    assert_eq!(s.target_dim, 1);
    let (y, w) = &s.preimages[0];
    assert!(!g.compose(y).unwrap().add(&w.differential()).unwrap().is_zero());
    let s = surjectivity_criterion(&ctx, &base, Orientation::Left).unwrap();
    assert!(!s.holds);
    assert!(s.missed.is_some());
}

#[test]
fn surjectivity_needs_a_complex() {
    let ctx = Ctx::new();
    let k = DGAlgebra::ground(Field::prime(2).unwrap());
    let a = complex(&k, &[("a", 0)], &[]);
    let id = BimoduleMap::identity(&a);
    let base = ThreeTermData::new(id.clone(), id).unwrap();
    assert!(matches!(surjectivity_criterion(&ctx, &base, Orientation::Right), Err(Error::Precondition(_))));
}

fn extension_example() -> (Ctx, LiftSpace) {
    let ctx = Ctx::new();
    let field = Field::prime(2).unwrap();
    let k = DGAlgebra::ground(field);
    let e = DGAlgebra::truncated_polynomial(field, 1, 1);
    let a = Arc::new(sample::free_right_module(&k, &e, "A", &[-2]).unwrap());
    let c = Arc::new(sample::free_right_module(&k, &e, "C", &[0]).unwrap());
    let zero = Arc::new(Bimodule::zero(k.clone(), e.clone()));
    let f = BimoduleMap::zero(&a, &zero, 0);
    let g = BimoduleMap::zero(&zero, &c, 0);
    let lifts = enumerate_lifts(&ctx, &f, &g).unwrap();
    (ctx, lifts)
}

#[test]
fn extensions_are_not_unique_when_the_criterion_fails() {
    let (ctx, lifts) = extension_example();
    let base = ThreeTermData::new(lifts.f.clone(), lifts.g.clone()).unwrap();
    let s = surjectivity_criterion(&ctx, &base, Orientation::Right).unwrap();
    assert!(!s.holds);
    let all = lifts.enumerate(16).unwrap();
    assert_eq!(all.len(), 2);
    let dims: Vec<_> = all.iter().map(|x| cohomology_dims(&lifts.complex(x).unwrap().convolve().unwrap())).collect();
    assert!(dims.contains(&vec![(0, 2), (1, 2)]));
    assert!(dims.contains(&vec![(0, 1), (1, 1)]));
    let report = classify_lifts(&ctx, &lifts, 16).unwrap();
    assert_eq!(report.verdict, Verdict::MultipleClasses);
    assert!(report.invariant.is_some());
}

#[test]
fn unipotent_comparison_within_a_class() {
    let ctx = Ctx::new();
    let field = Field::prime(3).unwrap();
    let k = DGAlgebra::ground(field);
    let a = complex(&k, &[("a", 0)], &[]);
    let b = complex(&k, &[("b", -1)], &[]);
    let c = complex(&k, &[("c", -1)], &[]);
    let f = BimoduleMap::zero(&a, &b, 0);
    let g = map(&b, &c, 0, &[(0, 0, 1)]);
    let base = ThreeTermData::new(f, g).unwrap();
    let t1 = base.complex(&BimoduleMap::zero(&a, &c, -1)).unwrap();
    let t2 = base.complex(&map(&a, &c, -1, &[(0, 0, 2)])).unwrap();
    let w = unipotent_comparison(&ctx, &t1, &t2).unwrap().unwrap();
    assert!(w.verify());
    assert!(!w.f.map().sub(&GradedMap::identity(field, w.f.source().space())).unwrap().is_zero());
    let report = classify_complexes(&ctx, &[t1, t2]).unwrap();
    assert_eq!(report.verdict, Verdict::SingleClass);
    assert_eq!(report.witnesses.len(), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn conversion_preserves_the_convolution(seed in any::<u64>(), left in any::<bool>()) {
        let ctx = Ctx::new();
        let t = random_complex(seed, 2);
        let s = if left { induced_left_postnikov(&t).unwrap() } else { induced_right_postnikov(&t).unwrap() };
        let cert = certify_conversion(&ctx, &s).unwrap();
        prop_assert!(cert.verify());
        prop_assert_eq!(cert.converted.orientation, s.orientation.opposite());
        prop_assert_eq!(cert.lift, t);
    }

    #[test]
    fn conversion_of_perturbed_right_systems(seed in any::<u64>()) {
        let ctx = Ctx::new();
        let t = random_complex(seed, 2);
        let mut s = induced_right_postnikov(&t).unwrap();
        let j = s.lifted_map().clone();
        let (src, tgt) = (j.source().convolve().unwrap(), j.target().convolve().unwrap());
        let space = ctx.hom(&src, &tgt, -1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let coeffs: Vec<_> = (0..space.dim()).map(|_| t.field().random(&mut rng)).collect();
        let bump = space.to_map(&coeffs).differential();
        let total = j.total().unwrap().add(&bump).unwrap();
        s.maps[2] = TwistedMorphism::from_total(j.source(), j.target(), &total).unwrap();
        prop_assert!(validate_postnikov(&ctx, &s).unwrap().is_ok());
        let cert = certify_conversion(&ctx, &s).unwrap();
        prop_assert!(cert.verify());
        let lifted = lift_to_twisted(&ctx, &s).unwrap();
        prop_assert!(validate_twisted(&lifted).is_ok());
    }

    #[test]
    fn all_lifts_agree_when_the_criterion_holds(seed in any::<u64>()) {
        let ctx = Ctx::new();
        let t = random_complex(seed, 2);
        let base = ThreeTermData::of(&t).unwrap();
        let s = surjectivity_criterion(&ctx, &base, Orientation::Right).unwrap();
        let lifts = enumerate_lifts(&ctx, &base.f, &base.g).unwrap();
        if s.holds && lifts.count().unwrap() <= 64 {
            let report = classify_lifts(&ctx, &lifts, 64).unwrap();
            prop_assert_eq!(report.verdict, Verdict::SingleClass);
            prop_assert!(report.witnesses_verify());
        }
    }
}
