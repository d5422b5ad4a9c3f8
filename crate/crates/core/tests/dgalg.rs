use std::sync::Arc;

use proptest::prelude::*;
use twistcalc_core::dgalg::*;
use twistcalc_core::exactalg::{Field, GradedMap, Matrix, Scalar};

fn f2() -> Field {
    Field::prime(2).unwrap()
}

/// `k[h]/h^2` with `|h| = 2`, as k-B and B-k modules.
fn p1_modules(f: Field) -> (Arc<DGAlgebra>, Arc<DGAlgebra>, Arc<Bimodule>, Arc<Bimodule>) {
    let k = DGAlgebra::ground(f);
    let b = DGAlgebra::truncated_polynomial(f, 2, 1);
    let diag = Bimodule::diagonal(&b);
    let m = Arc::new(diag.restrict_left(&k).renamed("M"));
    let n = Arc::new(diag.restrict_right(&k).renamed("N"));
    (k, b, m, n)
}

/// The simple right module `k` over `k[h]/h^2`, h acting by zero.
fn simple_right(k: &Arc<DGAlgebra>, b: &Arc<DGAlgebra>, deg: i32) -> Arc<Bimodule> {
    let f = k.field();
    Arc::new(
        Bimodule::new(
            "S",
            k.clone(),
            b.clone(),
            vec![BasisElement::new("s", deg)],
            &Matrix::zeros(f, 1, 1),
            &[Matrix::identity(f, 1)],
            &[Matrix::identity(f, 1), Matrix::zeros(f, 1, 1)],
        )
        .unwrap(),
    )
}

#[test]
fn truncated_polynomial_is_valid() {
    let b = DGAlgebra::truncated_polynomial(f2(), 2, 1);
    assert!(validate_algebra(&b).is_ok());
}

#[test]
fn contractible_two_generator_algebra_is_valid() {
    // k·e ⊕ k·1 with |e| = -1, e^2 = 0, d(e) = 1
    let q = Field::Rational;
    let basis = vec![BasisElement::new("e", -1), BasisElement::new("1", 0)];
    let v = |a: i64, b: i64| vec![q.from_i64(a), q.from_i64(b)];
    let products = [((1, 0), v(1, 0)), ((0, 1), v(1, 0)), ((1, 1), v(0, 1))];
    let mut d = Matrix::zeros(q, 2, 2);
    d.set(1, 0, q.one());
    let a = DGAlgebra::new("C", q, basis, products, &d, v(0, 1), vec![v(0, 1)]).unwrap();
    let r = validate_algebra(&a);
    assert!(r.is_ok(), "{r}");
}

#[test]
fn broken_associativity_names_the_triple() {
    let f = f2();
    let basis = vec![BasisElement::new("1", 0), BasisElement::new("x", 0)];
    let v = |a: i64, b: i64| vec![f.from_i64(a), f.from_i64(b)];
    // x*x = 1 + x breaks nothing; x*x = 1 with 1*x = 0 breaks associativity on (x, x, 1)
    let products = [((0, 0), v(1, 0)), ((0, 1), v(0, 0)), ((1, 0), v(0, 1)), ((1, 1), v(1, 0))];
    let a = DGAlgebra::new("bad", f, basis, products, &Matrix::zeros(f, 2, 2), v(1, 0), vec![v(1, 0)]).unwrap();
    let r = validate_algebra(&a);
    assert!(!r.is_ok());
    let text = r.to_string();
    assert!(text.contains("x") && text.contains("associat"), "{text}");
}

#[test]
fn unit_tensor_is_the_module() {
    let (_k, _b, m, n) = p1_modules(f2());
    let ctx = Ctx::new();
    for p in [&m, &n] {
        let contract = ctx.contract_unit_left(p).unwrap();
        let insert = ctx.insert_unit_left(p).unwrap();
        assert!(contract.map().is_invertible());
        assert!(contract.is_closed() && contract.is_equivariant());
        assert_eq!(contract.compose(&insert).unwrap(), BimoduleMap::identity(p));
        let contract = ctx.contract_unit_right(p).unwrap();
        assert!(contract.map().is_invertible());
        assert_eq!(
            contract.compose(&ctx.insert_unit_right(p).unwrap()).unwrap(),
            BimoduleMap::identity(p)
        );
    }
}

#[test]
fn b_tensor_b_over_k_has_four_basis_tuples() {
    let (_k, _b, m, n) = p1_modules(f2());
    let ctx = Ctx::new();
    let t = ctx.module(&[n.clone(), m.clone()]).unwrap();
    let dims: Vec<(i32, usize)> = t.space().dims().iter().map(|(d, n)| (*d, *n)).collect();
    assert_eq!(dims, vec![(0, 1), (2, 2), (4, 1)]);
    // over B the product collapses back to B
    let over_b = ctx.module(&[m, n]).unwrap();
    let dims: Vec<(i32, usize)> = over_b.space().dims().iter().map(|(d, n)| (*d, *n)).collect();
    assert_eq!(dims, vec![(0, 1), (2, 1)]);
}

#[test]
fn tensor_with_zero_is_zero() {
    let (k, b, m, _n) = p1_modules(f2());
    let ctx = Ctx::new();
    let zero = Arc::new(Bimodule::zero(b, k));
    assert_eq!(ctx.module(&[m, zero]).unwrap().dim(), 0);
}

#[test]
fn hom_from_free_module_is_the_target() {
    let (k, b, m, n) = p1_modules(Field::prime(3).unwrap());
    let ctx = Ctx::new();
    // Hom_B(B, M) for right modules, degree by degree
    let free = m.clone();
    let s = simple_right(&k, &b, 0);
    for target in [m.clone(), s.clone(), Arc::new(m.shift(-2))] {
        let hc = ctx.hom_complex(&free, &target).unwrap();
        for d in -4..=4 {
            assert_eq!(hc.dim(d), target.space().dim(d), "degree {d}");
        }
    }
    // left-module version
    let hc = ctx.hom_complex(&n, &n).unwrap();
    assert_eq!(hc.dim(0), 1);
    assert_eq!(hc.dim(2), 1);
    assert_eq!(hc.dim(-2), 0);
}

#[test]
fn hom_of_ground_field() {
    let k = DGAlgebra::ground(Field::Rational);
    let ctx = Ctx::new();
    let kk = ctx.diagonal(&k);
    let hc = ctx.hom_complex(&kk, &kk).unwrap();
    assert_eq!(hc.coordinates.total(), 1);
    assert_eq!(hc.dim(0), 1);
    assert_eq!(hc.cohomology(0).unwrap().dimension, 1);
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

fn brute_force_hom_count(source: &Arc<Bimodule>, target: &Arc<Bimodule>, degree: i32) -> usize {
    let f = source.field();
    let template = GradedMap::zero(f, source.space(), target.space(), degree);
    all_vectors(f, template.raw_len())
        .into_iter()
        .filter(|v| {
            BimoduleMap::new(source.clone(), target.clone(), template.with_vec(v))
                .unwrap()
                .is_equivariant()
        })
        .count()
}

#[test]
fn hom_dimension_matches_brute_force_over_f2() {
    let f = f2();
    let (k, b, m, _n) = p1_modules(f);
    let ctx = Ctx::new();
    let s0 = simple_right(&k, &b, 0);
    let s2 = simple_right(&k, &b, 2);
    let sum = Arc::new(Bimodule::direct_sum("S+S", &[s0.clone(), s2.clone()]).unwrap());
    let mm = Arc::new(Bimodule::direct_sum("M+S", &[m.clone(), s2.clone()]).unwrap());
    let modules = [m.clone(), s0, sum, mm, Arc::new(m.shift(2))];
    for src in &modules {
        for tgt in &modules {
            for degree in -4..=4 {
                let raw = GradedMap::zero(f, src.space(), tgt.space(), degree).raw_len();
                if raw > 14 {
                    continue;
                }
                let h = ctx.hom(src, tgt, degree);
                assert_eq!(
                    1usize << h.dim(),
                    brute_force_hom_count(src, tgt, degree),
                    "{} → {} in degree {degree}",
                    src.name(),
                    tgt.name()
                );
            }
        }
    }
}

#[test]
fn differentials_square_to_zero() {
    // dual numbers with |ε| = 1 make signs visible
    let q = Field::Rational;
    let k = DGAlgebra::ground(q);
    let e = DGAlgebra::truncated_polynomial(q, 1, 1);
    let diag = Arc::new(Bimodule::diagonal(&e));
    let ctx = Ctx::new();
    let m = Arc::new(diag.restrict_left(&k));
    let n = Arc::new(diag.restrict_right(&k));
    for word in [
        vec![n.clone(), m.clone()],
        vec![m.clone(), n.clone()],
        vec![diag.clone(), diag.clone(), n.clone()],
        vec![n.clone(), m.clone(), n.clone(), m.clone()],
    ] {
        let t = ctx.module(&word).unwrap();
        assert!(t.differential().compose(t.differential()).unwrap().is_zero());
        let r = validate_bimodule(&t);
        assert!(r.is_ok(), "{r}");
    }
    let hc = ctx.hom_complex(&diag, &diag).unwrap();
    assert!(hc.differential.compose(&hc.differential).unwrap().is_zero());
}

#[test]
fn tensor_is_associative_up_to_dimensions() {
    let (_k, b, m, n) = p1_modules(Field::prime(5).unwrap());
    let ctx = Ctx::new();
    let bb = ctx.diagonal(&b);
    let left = ctx.module(&[ctx.module(&[n.clone(), m.clone()]).unwrap(), bb.clone()]).unwrap();
    let right = ctx.module(&[n.clone(), ctx.module(&[m.clone(), bb.clone()]).unwrap()]).unwrap();
    let flat = ctx.module(&[n, m, bb]).unwrap();
    assert_eq!(left.space(), flat.space());
    assert_eq!(right.space(), flat.space());
}

#[test]
fn tensor_without_semifree_flags_is_rejected() {
    let f = f2();
    let k = DGAlgebra::ground(f);
    let b = DGAlgebra::truncated_polynomial(f, 2, 1);
    let s = simple_right(&k, &b, 0);
    let left_simple = Arc::new(
        Bimodule::new(
            "T",
            b.clone(),
            k.clone(),
            vec![BasisElement::new("t", 0)],
            &Matrix::zeros(f, 1, 1),
            &[Matrix::identity(f, 1), Matrix::zeros(f, 1, 1)],
            &[Matrix::identity(f, 1)],
        )
        .unwrap(),
    );
    let ctx = Ctx::new();
    assert!(matches!(
        ctx.module(&[s, left_simple]),
        Err(twistcalc_core::Error::Precondition(_))
    ));
}

#[test]
fn dual_of_free_module_is_valid() {
    let (_k, _b, m, _n) = p1_modules(Field::prime(3).unwrap());
    let l = m.dual("L").unwrap();
    let r = validate_bimodule(&l);
    assert!(r.is_ok(), "{r}");
    assert_eq!(l.space().dim(-2), 1);
    assert_eq!(l.space().dim(0), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn shifted_sums_stay_valid(shifts in proptest::collection::vec(-3i32..=3, 1..4), p in prop::sample::select(vec![2u64, 3, 5])) {
        let f = Field::prime(p).unwrap();
        let k = DGAlgebra::ground(f);
        let e = DGAlgebra::truncated_polynomial(f, 1, 1);
        let diag = Bimodule::diagonal(&e).restrict_left(&k);
        let parts: Vec<Arc<Bimodule>> = shifts.iter().map(|&s| Arc::new(diag.shift(s))).collect();
        let sum = Arc::new(Bimodule::direct_sum("P", &parts).unwrap());
        prop_assert!(validate_bimodule(&sum).is_ok());
        let ctx = Ctx::new();
        let hc = ctx.hom_complex(&sum, &sum).unwrap();
        prop_assert!(hc.differential.compose(&hc.differential).unwrap().is_zero());
        // free module of rank r: Hom^0 has dimension Σ dim P_{s_j - s_i} ...
        let dual = Arc::new(sum.dual("D").unwrap());
        prop_assert!(validate_bimodule(&dual).is_ok());
        let t = ctx.module(&[sum.clone(), dual]).unwrap();
        prop_assert!(t.differential().compose(t.differential()).unwrap().is_zero());
    }
}
