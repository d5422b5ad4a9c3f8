use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use twistcalc_core::adjunction::*;
use twistcalc_core::dgalg::*;
use twistcalc_core::exactalg::{DirectSum, Field, GradedMap, Matrix, Scalar};
use twistcalc_core::postnikov::Verdict;
use twistcalc_core::twisted::null_homotopy;
use twistcalc_core::Error;

/// `M = N = k[h]/h²`, `|h| = 2`, with the multiplication trace.
fn p1(ctx: &Ctx, field: Field) -> AdjunctionData {
    let k = DGAlgebra::ground(field);
    let b = DGAlgebra::truncated_polynomial(field, 2, 1);
    free_adjunction(ctx, &k, &b, &[0]).unwrap()
}

/// `N[−2] ⊗ M → N ⊗ M`, `x ⊗ y ↦ x ⊗ hy − xh ⊗ y`, computed on tensor sections.
fn hand_psi(ctx: &Ctx, adj: &AdjunctionData, n2: &Arc<Bimodule>) -> BimoduleMap {
    let (m, n) = (&adj.m, &adj.n);
    let b = &adj.b_alg;
    let field = b.field();
    let src = ctx.tensor(&[n2.clone(), m.clone()]).unwrap();
    let tgt = ctx.tensor(&[n.clone(), m.clone()]).unwrap();
    let h = b.basis_vector(b.index_of("h").unwrap());
    let mut flat = Matrix::zeros(field, tgt.module().dim(), src.module().dim());
    for q in 0..src.module().dim() {
        let s = src.section(q);
        let name = |mm: &Bimodule, i: usize| mm.basis()[i].name.clone();
        let (xi, yj) = (n.index_of(&name(n2, s[0])).unwrap(), s[1]);
        let (x, y) = (b.basis_vector(xi), b.basis_vector(yj));
        let mut add = |u: &[Scalar], v: &[Scalar], sign: i64| {
            for (p, cu) in u.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                for (r, cv) in v.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                    for (row, c) in tgt.project(&[p, r]) {
                        let e = flat.get(row, q) + &(&(&(cu * cv) * &c) * &field.from_i64(sign));
                        flat.set(row, q, e);
                    }
                }
            }
        };
        add(&x, &b.mul(&h, &y), 1);
        add(&b.mul(&x, &h), &y, -1);
    }
    let map = GradedMap::from_flat(src.module().space(), tgt.module().space(), 0, &flat).unwrap();
    BimoduleMap::new(src.module().clone(), tgt.module().clone(), map).unwrap()
}

/// `X = N[−1] ⊕ N[−2]` and `f = (0, ψ)`.
fn p1_bundle(ctx: &Ctx, field: Field) -> UniquenessScenario {
    let adj = p1(ctx, field);
    let n1 = Arc::new(adj.n.shift(-1));
    let n2 = Arc::new(adj.n.shift(-2));
    let x = Arc::new(Bimodule::direct_sum("X", &[n1.clone(), n2.clone()]).unwrap());
    let sum = DirectSum::new(vec![n1.space().clone(), n2.space().clone()]);
    let proj = BimoduleMap::new(x.clone(), n2.clone(), sum.projection(field, 1)).unwrap();
    let proj_m = ctx
        .tensor_maps(&[Segment::map(&[x.clone()], &[n2.clone()], &proj), Segment::Id(adj.m.clone())])
        .unwrap();
    let f = hand_psi(ctx, &adj, &n2).compose(&proj_m).unwrap();
    UniquenessScenario::new(ctx, adj, &x, &f, None).unwrap()
}

fn f2() -> Field {
    Field::prime(2).unwrap()
}

#[test]
fn p1_adjunction_is_strict() {
    let ctx = Ctx::new();
    let adj = p1(&ctx, Field::Rational);
    assert_eq!(adj.triangle_m(&ctx).unwrap(), BimoduleMap::identity(&adj.m));
    assert_eq!(adj.triangle_n(&ctx).unwrap(), BimoduleMap::identity(&adj.n));
    let check = validate_adjunction(&ctx, &adj).unwrap();
    assert!(check.report.is_ok(), "{}", check.report);
    let (zm, zn) = check.data.zetas().unwrap();
    assert!(zm.is_zero() && zn.is_zero());
}

#[test]
fn trace_is_multiplication_in_the_p1_model() {
    let ctx = Ctx::new();
    let adj = p1(&ctx, Field::prime(3).unwrap());
    let b = &adj.b_alg;
    let t = ctx.tensor(&[adj.n.clone(), adj.m.clone()]).unwrap();
    for q in 0..t.module().dim() {
        let s = t.section(q);
        let expected = b.mul(&b.basis_vector(s[0]), &b.basis_vector(s[1]));
        let mut e = vec![b.field().zero(); t.module().dim()];
        e[q] = b.field().one();
        assert_eq!(adj.trace.map().apply(&e).unwrap(), expected);
    }
}

#[test]
fn zero_module_adjunction_is_valid() {
    let ctx = Ctx::new();
    let k = DGAlgebra::ground(f2());
    let b = DGAlgebra::truncated_polynomial(f2(), 2, 1);
    let m = Arc::new(Bimodule::zero(k.clone(), b.clone()));
    let n = Arc::new(Bimodule::zero(b.clone(), k.clone()));
    let nm = ctx.module(&[n.clone(), m.clone()]).unwrap();
    let mn = ctx.module(&[m.clone(), n.clone()]).unwrap();
    let trace = BimoduleMap::zero(&nm, &ctx.diagonal(&b), 0);
    let action = BimoduleMap::zero(&ctx.diagonal(&k), &mn, 0);
    let adj = AdjunctionData::new(&ctx, &m, &n, &trace, &action).unwrap();
    let check = validate_adjunction(&ctx, &adj).unwrap();
    assert!(check.report.is_ok(), "{}", check.report);
}

#[test]
fn zero_trace_has_no_triangle_homotopy() {
    let ctx = Ctx::new();
    let adj = p1(&ctx, Field::Rational);
    let broken = AdjunctionData::new(&ctx, &adj.m, &adj.n, &adj.trace.scale(&Field::Rational.zero()), &adj.action).unwrap();
    let check = validate_adjunction(&ctx, &broken).unwrap();
    assert!(!check.report.is_ok());
    let failed: Vec<_> = check.report.failures().collect();
    assert_eq!(failed.len(), 2);
    assert!(failed[0].detail.contains("nonzero class in degree 0"), "{}", failed[0].detail);
    assert!(check.data.zeta_m.is_none());
    assert!(matches!(broken.with_solved_zeta(&ctx), Err(Error::Precondition(_))));
}

#[test]
fn wrong_homotopy_is_reported() {
    let ctx = Ctx::new();
    let k = DGAlgebra::ground(f2());
    let b = DGAlgebra::truncated_polynomial(f2(), 1, 1);
    let adj = free_adjunction(&ctx, &k, &b, &[0]).unwrap();
    // ζ must be closed here since the triangle is strict; a nonclosed one is rejected
    let hom = ctx.hom(&adj.m, &adj.m, -1);
    let z = (0..hom.dim())
        .map(|i| hom.to_map(&hom.basis().iter().enumerate().map(|(j, _)| if i == j { f2().one() } else { f2().zero() }).collect::<Vec<_>>()))
        .find(|z| !z.is_closed());
    if let Some(z) = z {
        let bad = adj.clone().with_zeta(z, BimoduleMap::zero(&adj.n, &adj.n, -1));
        assert!(!validate_adjunction(&ctx, &bad).unwrap().report.is_ok());
    }
}

#[test]
fn perturbed_trace_has_substituting_homotopies() {
    let ctx = Ctx::new();
    let f = Field::prime(3).unwrap();
    let k = DGAlgebra::ground(f);
    let b = DGAlgebra::resolved_dual_numbers(f);
    assert!(validate_algebra(&b).is_ok());
    let adj = free_adjunction(&ctx, &k, &b, &[0, 1]).unwrap();
    let taus = ctx.hom(adj.trace.source(), adj.trace.target(), -1);
    assert!(taus.dim() > 0);
    let tau = taus.to_map(&vec![f.one(); taus.dim()]);
    let p = perturb_trace(&ctx, &adj, &tau).unwrap();
    assert_ne!(p.trace, adj.trace);
    let (zm, zn) = p.zetas().unwrap();
    let id_m = BimoduleMap::identity(&p.m);
    let id_n = BimoduleMap::identity(&p.n);
    assert_eq!(p.triangle_m(&ctx).unwrap(), id_m.add(&zm.differential()).unwrap());
    assert_eq!(p.triangle_n(&ctx).unwrap(), id_n.add(&zn.differential()).unwrap());
    assert!(!zm.is_zero() || !zn.is_zero());
}

#[test]
fn preimage_of_zero_is_zero() {
    let ctx = Ctx::new();
    let s = p1_bundle(&ctx, f2());
    let zero = BimoduleMap::zero(s.source(), s.adj.trace.target(), -1);
    let p = preimage_under_trace(&ctx, &s, &zero).unwrap();
    assert!(p.psi.is_zero() && p.homotopy.is_zero());
}

#[test]
fn preimage_is_exact_in_the_strict_model() {
    let ctx = Ctx::new();
    let s = p1_bundle(&ctx, Field::Rational);
    let phis = ctx.hom(s.source(), s.adj.trace.target(), -1);
    assert!(phis.dim() > 0);
    for phi in phis.basis() {
        let phi = BimoduleMap::new(s.source().clone(), s.adj.trace.target().clone(), phi.clone()).unwrap();
        let p = preimage_under_trace(&ctx, &s, &phi).unwrap();
        assert_eq!(s.adj.trace.compose(&p.psi).unwrap(), phi);
        assert!(p.homotopy.is_zero());
    }
}

#[test]
fn preimage_over_f3_is_a_section_up_to_homotopy() {
    let ctx = Ctx::new();
    let f = Field::prime(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut nontrivial = 0;
    for _ in 0..12 {
        let s = random_scenario(&ctx, f, &mut rng).unwrap();
        let phi = twistcalc_core::sample::random_closed_map(&ctx, s.source(), s.adj.trace.target(), -1, &mut rng).unwrap();
        let s = UniquenessScenario { adj: s.adj.clone().with_solved_zeta(&ctx).unwrap(), ..s };
        let p = preimage_under_trace(&ctx, &s, &phi).unwrap();
        let defect = s.adj.trace.compose(&p.psi).unwrap().sub(&phi).unwrap();
        assert!(null_homotopy(&ctx, &defect).unwrap().exists());
        assert_eq!(p.homotopy.differential(), defect);
        nontrivial += usize::from(!phi.is_zero());
    }
    assert!(nontrivial > 0);
}

#[test]
fn equal_lifts_give_the_identity() {
    let ctx = Ctx::new();
    let s = p1_bundle(&ctx, f2());
    let h = s.nullness(&ctx).unwrap();
    let e = build_lift_equivalence(&ctx, &s, &h, &h).unwrap();
    assert!(e.xi.is_zero() && e.eta.is_zero() && e.strict);
    assert_eq!(e.forward.total().unwrap(), BimoduleMap::identity(e.forward.total().unwrap().source()));
}

#[test]
fn p1_bundle_has_distinct_equivalent_lifts() {
    let ctx = Ctx::new();
    let s = p1_bundle(&ctx, Field::Rational);
    let lifts = s.lifts(&ctx).unwrap();
    assert!(lifts.dimension().unwrap() >= 1);
    let h1 = lifts.particular().unwrap().clone();
    let h2 = h1.add(&lifts.kernel()[0]).unwrap();
    let e = build_lift_equivalence(&ctx, &s, &h1, &h2).unwrap();
    assert!(e.verify(&s.adj.trace, &h1, &h2));
    assert!(!e.xi.is_zero());
    assert!(e.strict);
    assert!(e.witness.h1.is_zero() && e.witness.h2.is_zero());
    // the complexes themselves differ
    assert_ne!(s.complex(&h1).unwrap(), s.complex(&h2).unwrap());
}

#[test]
fn eta_matches_the_homotopy_from_the_triangle() {
    let ctx = Ctx::new();
    let f = Field::prime(5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 3 {
        let s = random_scenario(&ctx, f, &mut rng).unwrap();
        let lifts = s.lifts(&ctx).unwrap();
        if lifts.kernel().is_empty() {
            continue;
        }
        let adj = s.adj.clone().with_solved_zeta(&ctx).unwrap();
        let s = UniquenessScenario { adj, ..s };
        let h1 = lifts.particular().unwrap().clone();
        let h2 = lifts.sample(&mut rng).unwrap();
        let e = build_lift_equivalence(&ctx, &s, &h1, &h2).unwrap();
        let diff = h1.sub(&h2).unwrap();
        let oracle = preimage_under_trace(&ctx, &s, &diff).unwrap();
        assert_eq!(oracle.psi, e.xi);
        assert_eq!(oracle.homotopy.differential(), e.eta.differential());
        checked += 1;
    }
}

#[test]
fn p1_bundle_is_single_class_over_f2() {
    let ctx = Ctx::new();
    let s = p1_bundle(&ctx, f2());
    let r = verify_uniqueness(&ctx, &s, Mode::Exhaustive { limit: 64 }).unwrap();
    assert_eq!(r.verdict, Verdict::SingleClass);
    assert!(r.members >= 2);
    assert_eq!(r.witnesses.len(), r.members * (r.members - 1) / 2);
    assert!(r.witnesses_verify());
}

#[test]
fn sampled_verification_is_deterministic() {
    let ctx = Ctx::new();
    let s = p1_bundle(&ctx, Field::prime(5).unwrap());
    let a = verify_uniqueness(&ctx, &s, Mode::Sample { pairs: 4, seed: 3 }).unwrap();
    let b = verify_uniqueness(&ctx, &s, Mode::Sample { pairs: 4, seed: 3 }).unwrap();
    assert_eq!(a.witnesses, b.witnesses);
    assert_eq!(a.witnesses.len(), 4);
}

#[test]
fn nonzero_trace_composite_is_an_obstruction() {
    let ctx = Ctx::new();
    let adj = p1(&ctx, f2());
    let x = Arc::new(adj.n.clone().as_ref().clone().renamed("X"));
    let nm = adj.trace.source().clone();
    let xm = ctx.module(&[x.clone(), adj.m.clone()]).unwrap();
    let f = BimoduleMap::identity(&nm).retarget(&xm, &nm).unwrap();
    let s = UniquenessScenario::new(&ctx, adj, &x, &f, None).unwrap();
    let err = verify_uniqueness(&ctx, &s, Mode::Exhaustive { limit: 16 }).unwrap_err();
    match err {
        Error::Precondition(msg) => assert!(msg.contains("obstruction class"), "{msg}"),
        e => panic!("{e}"),
    }
    assert!(!validate_scenario(&ctx, &s).unwrap().is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn random_scenarios_are_single_class(seed in any::<u64>(), p in prop::sample::select(vec![2u64, 3, 5])) {
        let ctx = Ctx::new();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_scenario(&ctx, Field::prime(p).unwrap(), &mut rng).unwrap();
        prop_assert!(validate_scenario(&ctx, &s).unwrap().is_ok());
        let mode = match s.lifts(&ctx).unwrap().count() {
            Some(n) if n <= 16 => Mode::Exhaustive { limit: 16 },
            _ => Mode::Sample { pairs: 6, seed },
        };
        let r = verify_uniqueness(&ctx, &s, mode).unwrap();
        prop_assert_eq!(r.verdict, Verdict::SingleClass);
        prop_assert!(r.witnesses_verify());
    }
}
