use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exactalg::{Field, GradedMap, GradedSpace, Matrix, Scalar};
use crate::report::ValidationReport;

/// A named homogeneous basis vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisElement {
    pub name: String,
    pub degree: i32,
}

impl BasisElement {
    pub fn new(name: impl Into<String>, degree: i32) -> BasisElement {
        BasisElement {
            name: name.into(),
            degree,
        }
    }
}

/// Finite-dimensional DG algebra given by structure constants.
///
/// Basis vectors are listed in nondecreasing degree. Elements are dense
/// coefficient vectors in that basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DGAlgebra {
    name: String,
    field: Field,
    basis: Vec<BasisElement>,
    space: GradedSpace,
    table: Vec<Vec<Vec<Scalar>>>,
    d: GradedMap,
    unit: Vec<Scalar>,
    idempotents: Vec<Vec<Scalar>>,
}

fn check_basis_order(basis: &[BasisElement]) -> Result<()> {
    if let Some(w) = basis.windows(2).find(|w| w[0].degree > w[1].degree) {
        return Err(Error::Invalid(format!(
            "basis must be listed by nondecreasing degree: `{}` after `{}`",
            w[1].name, w[0].name
        )));
    }
    Ok(())
}

impl DGAlgebra {
    /// `products` gives `b_i * b_j` for the listed pairs; unlisted products are zero.
    pub fn new(
        name: impl Into<String>,
        field: Field,
        basis: Vec<BasisElement>,
        products: impl IntoIterator<Item = ((usize, usize), Vec<Scalar>)>,
        differential: &Matrix,
        unit: Vec<Scalar>,
        idempotents: Vec<Vec<Scalar>>,
    ) -> Result<DGAlgebra> {
        check_basis_order(&basis)?;
        let n = basis.len();
        let space = GradedSpace::from_degrees(&basis.iter().map(|b| b.degree).collect::<Vec<_>>());
        let mut table = vec![vec![vec![field.zero(); n]; n]; n];
        for ((i, j), v) in products {
            if i >= n || j >= n || v.len() != n {
                return Err(Error::DimensionMismatch(format!("product entry ({i},{j})")));
            }
            let deg = basis[i].degree + basis[j].degree;
            if let Some(k) = (0..n).find(|&k| !v[k].is_zero() && basis[k].degree != deg) {
                return Err(Error::Invalid(format!(
                    "product {}*{} has a component along `{}` of the wrong degree",
                    basis[i].name, basis[j].name, basis[k].name
                )));
            }
            table[i][j] = v;
        }
        let d = GradedMap::from_flat(&space, &space, 1, differential)
            .map_err(|e| Error::Invalid(format!("algebra differential: {e}")))?;
        let homogeneous_deg0 = |v: &[Scalar]| {
            v.len() == n && v.iter().zip(&basis).all(|(s, b)| s.is_zero() || b.degree == 0)
        };
        if !homogeneous_deg0(&unit) {
            return Err(Error::Invalid("unit must be a degree-0 vector".into()));
        }
        if let Some(bad) = idempotents.iter().position(|e| !homogeneous_deg0(e)) {
            return Err(Error::Invalid(format!("idempotent #{bad} must be a degree-0 vector")));
        }
        Ok(DGAlgebra {
            name: name.into(),
            field,
            basis,
            space,
            table,
            d,
            unit,
            idempotents,
        })
    }

    /// The ground field as a one-object DG category.
    pub fn ground(field: Field) -> Arc<DGAlgebra> {
        Arc::new(
            DGAlgebra::new(
                "k",
                field,
                vec![BasisElement::new("1", 0)],
                [((0, 0), vec![field.one()])],
                &Matrix::zeros(field, 1, 1),
                vec![field.one()],
                vec![vec![field.one()]],
            )
            .expect("ground field"),
        )
    }

    /// `k[t, e]/(t², e²)` with `|t| = 0`, `|e| = −1`, `d e = t`; cohomology `k ⊕ k·te[1]`.
    pub fn resolved_dual_numbers(field: Field) -> Arc<DGAlgebra> {
        // basis e, te, 1, t
        let v = |i: usize| {
            let mut out = vec![field.zero(); 4];
            out[i] = field.one();
            out
        };
        let (e, te, one, t) = (0, 1, 2, 3);
        let mut products = Vec::new();
        for i in 0..4 {
            products.push(((one, i), v(i)));
            products.push(((i, one), v(i)));
        }
        products.extend([((t, e), v(te)), ((e, t), v(te))]);
        let mut d = Matrix::zeros(field, 4, 4);
        d.set(t, e, field.one());
        Arc::new(
            DGAlgebra::new(
                "k[t,e]/(t²,e²)",
                field,
                vec![
                    BasisElement::new("e", -1),
                    BasisElement::new("te", -1),
                    BasisElement::new("1", 0),
                    BasisElement::new("t", 0),
                ],
                products,
                &d,
                v(one),
                vec![v(one)],
            )
            .expect("resolved dual numbers"),
        )
    }

    /// `k[h]/h^{top+1}` with `|h| = degree` and zero differential.
    pub fn truncated_polynomial(field: Field, degree: i32, top: usize) -> Arc<DGAlgebra> {
        let n = top + 1;
        let basis = (0..n)
            .map(|i| {
                let name = match i {
                    0 => "1".to_string(),
                    1 => "h".to_string(),
                    _ => format!("h^{i}"),
                };
                BasisElement::new(name, degree * i as i32)
            })
            .collect::<Vec<_>>();
        let mut basis = basis;
        if degree < 0 {
            basis.reverse();
        }
        let index = |i: usize| if degree < 0 { n - 1 - i } else { i };
        let mut products = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i + j < n {
                    let mut v = vec![field.zero(); n];
                    v[index(i + j)] = field.one();
                    products.push(((index(i), index(j)), v));
                }
            }
        }
        let mut unit = vec![field.zero(); n];
        unit[index(0)] = field.one();
        Arc::new(
            DGAlgebra::new(
                format!("k[h]/h^{}", n),
                field,
                basis,
                products,
                &Matrix::zeros(field, n, n),
                unit.clone(),
                vec![unit],
            )
            .expect("truncated polynomial algebra"),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    pub fn differential(&self) -> &GradedMap {
        &self.d
    }

    pub fn unit(&self) -> &[Scalar] {
        &self.unit
    }

    pub fn idempotents(&self) -> &[Vec<Scalar>] {
        &self.idempotents
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.name == name)
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Scalar> {
        let mut v = vec![self.field.zero(); self.dim()];
        v[i] = self.field.one();
        v
    }

    pub fn product_of_basis(&self, i: usize, j: usize) -> &[Scalar] {
        &self.table[i][j]
    }

    pub fn mul(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let n = self.dim();
        let mut out = vec![self.field.zero(); n];
        for (i, a) in x.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in y.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                let ab = a * b;
                for (k, c) in self.table[i][j].iter().enumerate() {
                    if !c.is_zero() {
                        out[k].add_mul(&ab, c);
                    }
                }
            }
        }
        out
    }

    pub fn apply_d(&self, x: &[Scalar]) -> Vec<Scalar> {
        self.d.apply(x).expect("algebra differential shape")
    }

    /// Left multiplication by basis vector `i`, as a map of degree `|b_i|`.
    pub fn left_mult(&self, i: usize) -> GradedMap {
        self.mult_map(i, true)
    }

    /// Right multiplication by basis vector `i`.
    pub fn right_mult(&self, i: usize) -> GradedMap {
        self.mult_map(i, false)
    }

    fn mult_map(&self, i: usize, left: bool) -> GradedMap {
        let n = self.dim();
        let mut flat = Matrix::zeros(self.field, n, n);
        for j in 0..n {
            let col = if left { &self.table[i][j] } else { &self.table[j][i] };
            for (k, c) in col.iter().enumerate() {
                flat.set(k, j, c.clone());
            }
        }
        GradedMap::from_flat(&self.space, &self.space, self.basis[i].degree, &flat)
            .expect("products are homogeneous")
    }

    /// Product of matrix algebras over k: orthogonal idempotents spanning, no differential.
    pub fn is_semisimple(&self) -> bool {
        let ids = &self.idempotents;
        if ids.len() != self.dim() || !self.d.is_zero() {
            return false;
        }
        let mut m = Matrix::zeros(self.field, self.dim(), ids.len());
        for (c, e) in ids.iter().enumerate() {
            for (r, s) in e.iter().enumerate() {
                m.set(r, c, s.clone());
            }
        }
        m.rank() == self.dim()
            && ids.iter().enumerate().all(|(i, e)| {
                ids.iter().enumerate().all(|(j, f)| {
                    let p = self.mul(e, f);
                    if i == j {
                        p == *e
                    } else {
                        p.iter().all(Scalar::is_zero)
                    }
                })
            })
    }

    /// True when this is the ground field with its standard presentation.
    pub fn is_ground(&self) -> bool {
        self.dim() == 1 && self.basis[0].degree == 0 && self.unit[0].is_one()
    }
}

/// Checks every structural invariant; failures name a witness tuple.
pub fn validate_algebra(a: &DGAlgebra) -> ValidationReport {
    let mut report = ValidationReport::new(format!("algebra {}", a.name));
    let n = a.dim();
    let names = |idx: &[usize]| {
        idx.iter()
            .map(|&i| a.basis[i].name.as_str())
            .collect::<Vec<_>>()
            .join(", ")
    };

    let mut assoc = None;
    'outer: for i in 0..n {
        for j in 0..n {
            let ij = a.table[i][j].clone();
            for k in 0..n {
                let left = a.mul(&ij, &a.basis_vector(k));
                let right = a.mul(&a.basis_vector(i), &a.table[j][k]);
                if left != right {
                    assoc = Some([i, j, k]);
                    break 'outer;
                }
            }
        }
    }
    match assoc {
        None => report.pass("associativity"),
        Some(t) => report.fail("associativity", format!("(ab)c ≠ a(bc) on ({})", names(&t))),
    }

    match (0..n).find(|&i| {
        let b = a.basis_vector(i);
        a.mul(&a.unit, &b) != b || a.mul(&b, &a.unit) != b
    }) {
        None => report.pass("unit"),
        Some(i) => report.fail("unit", format!("unit does not fix ({})", names(&[i]))),
    }

    let ids = &a.idempotents;
    let mut orth = None;
    for (i, e) in ids.iter().enumerate() {
        for (j, f) in ids.iter().enumerate() {
            let p = a.mul(e, f);
            let ok = if i == j { p == *e } else { p.iter().all(Scalar::is_zero) };
            if !ok && orth.is_none() {
                orth = Some((i, j));
            }
        }
    }
    match orth {
        None => report.pass("orthogonal idempotents"),
        Some((i, j)) => report.fail("orthogonal idempotents", format!("idempotents #{i}, #{j}")),
    }
    let mut sum = vec![a.field.zero(); n];
    for e in ids {
        for (s, x) in sum.iter_mut().zip(e) {
            *s = &*s + x;
        }
    }
    report.record("idempotents sum to the unit", sum == a.unit, "");

    let dd = a.d.compose(&a.d).expect("square map");
    match (0..n).find(|&i| !a.apply_d(&a.apply_d(&a.basis_vector(i))).iter().all(Scalar::is_zero)) {
        None if dd.is_zero() => report.pass("d^2 = 0"),
        None => report.fail("d^2 = 0", ""),
        Some(i) => report.fail("d^2 = 0", format!("on ({})", names(&[i]))),
    }

    let mut leibniz = None;
    'pairs: for i in 0..n {
        for j in 0..n {
            let (x, y) = (a.basis_vector(i), a.basis_vector(j));
            let lhs = a.apply_d(&a.table[i][j]);
            let t1 = a.mul(&a.apply_d(&x), &y);
            let t2 = a.mul(&x, &a.apply_d(&y));
            let sign = a.field.sign(a.basis[i].degree as i64);
            let rhs: Vec<Scalar> = t1.iter().zip(&t2).map(|(p, q)| p + &(&sign * q)).collect();
            if lhs != rhs {
                leibniz = Some([i, j]);
                break 'pairs;
            }
        }
    }
    match leibniz {
        None => report.pass("Leibniz rule"),
        Some(p) => report.fail("Leibniz rule", format!("on ({})", names(&p))),
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_two_generator_is_valid() {
        let a = DGAlgebra::truncated_polynomial(Field::Rational, 2, 1);
        let r = validate_algebra(&a);
        assert!(r.is_ok(), "{r}");
        assert_eq!(a.space().dims().clone(), [(0, 1), (2, 1)].into_iter().collect());
    }

    #[test]
    fn contractible_summand_is_valid() {
        let q = Field::Rational;
        let basis = vec![BasisElement::new("e", -1), BasisElement::new("1", 0)];
        let d = Matrix::from_i64(q, &[&[0, 0], &[1, 0]]);
        let unit = vec![q.zero(), q.one()];
        let products = vec![
            ((1, 1), unit.clone()),
            ((1, 0), vec![q.one(), q.zero()]),
            ((0, 1), vec![q.one(), q.zero()]),
        ];
        let a = DGAlgebra::new("C", q, basis, products, &d, unit.clone(), vec![unit]).unwrap();
        let r = validate_algebra(&a);
        assert!(r.is_ok(), "{r}");
    }

    #[test]
    fn broken_associativity_names_a_triple() {
        let f = Field::prime(3).unwrap();
        // 1, x, y in degree 0 with x*x = y but x*y = 0 and y*x = x: (xx)x = yx = x, x(xx) = xy = 0
        let basis = vec![BasisElement::new("1", 0), BasisElement::new("x", 0), BasisElement::new("y", 0)];
        let e = |i: usize| {
            let mut v = vec![f.zero(); 3];
            v[i] = f.one();
            v
        };
        let mut products = vec![((1, 1), e(2)), ((2, 1), e(1))];
        for i in 0..3 {
            products.push(((0, i), e(i)));
            products.push(((i, 0), e(i)));
        }
        let a = DGAlgebra::new("bad", f, basis, products, &Matrix::zeros(f, 3, 3), e(0), vec![e(0)]).unwrap();
        let r = validate_algebra(&a);
        let fail = r.failures().find(|c| c.name == "associativity").expect("associativity must fail");
        assert!(fail.detail.contains("x, x, x"), "{}", fail.detail);
    }

    #[test]
    fn unsorted_basis_is_rejected() {
        let q = Field::Rational;
        let basis = vec![BasisElement::new("h", 2), BasisElement::new("1", 0)];
        let r = DGAlgebra::new("x", q, basis, [], &Matrix::zeros(q, 2, 2), vec![q.zero(), q.one()], vec![]);
        assert!(r.is_err());
    }
}
