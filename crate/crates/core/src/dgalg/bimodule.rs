use std::sync::{Arc, OnceLock};

use super::algebra::{BasisElement, DGAlgebra};
use crate::error::{Error, Result};
use crate::exactalg::{DirectSum, Field, GradedMap, GradedSpace, Matrix, Scalar};
use crate::report::ValidationReport;

/// Which action a semi-freeness certificate refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// DG bimodule over `left`-`right` with an explicit homogeneous basis.
///
/// Actions carry no sign of their own: `left_action[i]` is `m ↦ b_i·m`,
/// `right_action[i]` is `m ↦ m·b_i`.
#[derive(Debug)]
pub struct Bimodule {
    name: String,
    left: Arc<DGAlgebra>,
    right: Arc<DGAlgebra>,
    basis: Vec<BasisElement>,
    space: GradedSpace,
    d: GradedMap,
    left_action: Vec<GradedMap>,
    right_action: Vec<GradedMap>,
    semifree_left: Option<Vec<Vec<Scalar>>>,
    semifree_right: Option<Vec<Vec<Scalar>>>,
    flag_check: [OnceLock<bool>; 2],
}

impl Clone for Bimodule {
    fn clone(&self) -> Self {
        Bimodule {
            name: self.name.clone(),
            left: self.left.clone(),
            right: self.right.clone(),
            basis: self.basis.clone(),
            space: self.space.clone(),
            d: self.d.clone(),
            left_action: self.left_action.clone(),
            right_action: self.right_action.clone(),
            semifree_left: self.semifree_left.clone(),
            semifree_right: self.semifree_right.clone(),
            flag_check: Default::default(),
        }
    }
}

/// Structural equality; names and semi-freeness certificates do not take part.
impl PartialEq for Bimodule {
    fn eq(&self, other: &Self) -> bool {
        same_algebra(&self.left, &other.left)
            && same_algebra(&self.right, &other.right)
            && self.space == other.space
            && self.d == other.d
            && self.left_action == other.left_action
            && self.right_action == other.right_action
    }
}

pub fn same_algebra(a: &Arc<DGAlgebra>, b: &Arc<DGAlgebra>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl Bimodule {
    /// Builds a bimodule from flat matrices: `d` and one matrix per basis
    /// vector of each acting algebra.
    pub fn new(
        name: impl Into<String>,
        left: Arc<DGAlgebra>,
        right: Arc<DGAlgebra>,
        basis: Vec<BasisElement>,
        d: &Matrix,
        left_action: &[Matrix],
        right_action: &[Matrix],
    ) -> Result<Bimodule> {
        let name = name.into();
        if let Some(w) = basis.windows(2).find(|w| w[0].degree > w[1].degree) {
            return Err(Error::Invalid(format!(
                "{name}: basis must be listed by nondecreasing degree (`{}` after `{}`)",
                w[1].name, w[0].name
            )));
        }
        let space = GradedSpace::from_degrees(&basis.iter().map(|b| b.degree).collect::<Vec<_>>());
        let d = GradedMap::from_flat(&space, &space, 1, d).map_err(|e| Error::Invalid(format!("{name}: differential: {e}")))?;
        let actions = |alg: &DGAlgebra, mats: &[Matrix], side: &str| -> Result<Vec<GradedMap>> {
            if mats.len() != alg.dim() {
                return Err(Error::DimensionMismatch(format!(
                    "{name}: {side} action needs {} matrices, got {}",
                    alg.dim(),
                    mats.len()
                )));
            }
            mats.iter()
                .zip(alg.basis())
                .map(|(m, b)| {
                    GradedMap::from_flat(&space, &space, b.degree, m)
                        .map_err(|e| Error::Invalid(format!("{name}: {side} action of `{}`: {e}", b.name)))
                })
                .collect()
        };
        let left_action = actions(&left, left_action, "left")?;
        let right_action = actions(&right, right_action, "right")?;
        Ok(Bimodule {
            name,
            left,
            right,
            basis,
            space,
            d,
            left_action,
            right_action,
            semifree_left: None,
            semifree_right: None,
            flag_check: Default::default(),
        })
    }

    /// Assembles a bimodule from already graded structure maps.
    pub fn from_graded(
        name: impl Into<String>,
        left: Arc<DGAlgebra>,
        right: Arc<DGAlgebra>,
        basis: Vec<BasisElement>,
        d: GradedMap,
        left_action: Vec<GradedMap>,
        right_action: Vec<GradedMap>,
    ) -> Bimodule {
        let space = d.source().clone();
        debug_assert_eq!(space.total(), basis.len());
        Bimodule {
            name: name.into(),
            left,
            right,
            basis,
            space,
            d,
            left_action,
            right_action,
            semifree_left: None,
            semifree_right: None,
            flag_check: Default::default(),
        }
    }

    /// Attaches a semi-freeness certificate: homogeneous generators of the
    /// module as a free module on the given side, triangular for `d`.
    pub fn with_semifree(mut self, side: Side, generators: Vec<Vec<Scalar>>) -> Bimodule {
        match side {
            Side::Left => self.semifree_left = Some(generators),
            Side::Right => self.semifree_right = Some(generators),
        }
        self.flag_check = Default::default();
        self
    }

    pub fn zero(left: Arc<DGAlgebra>, right: Arc<DGAlgebra>) -> Bimodule {
        let field = left.field();
        let space = GradedSpace::zero();
        let z = |deg: i32| GradedMap::zero(field, &space, &space, deg);
        let la = left.basis().iter().map(|b| z(b.degree)).collect();
        let ra = right.basis().iter().map(|b| z(b.degree)).collect();
        Bimodule::from_graded("0", left, right, vec![], z(1), la, ra)
            .with_semifree(Side::Left, vec![])
            .with_semifree(Side::Right, vec![])
    }

    /// The algebra as a bimodule over itself, free on each side on the idempotents.
    pub fn diagonal(a: &Arc<DGAlgebra>) -> Bimodule {
        let la = (0..a.dim()).map(|i| a.left_mult(i)).collect();
        let ra = (0..a.dim()).map(|i| a.right_mult(i)).collect();
        Bimodule::from_graded(
            a.name().to_string(),
            a.clone(),
            a.clone(),
            a.basis().to_vec(),
            a.differential().clone(),
            la,
            ra,
        )
        .with_semifree(Side::Left, a.idempotents().to_vec())
        .with_semifree(Side::Right, a.idempotents().to_vec())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Bimodule {
        self.name = name.into();
        self
    }

    pub fn field(&self) -> Field {
        self.left.field()
    }

    pub fn left(&self) -> &Arc<DGAlgebra> {
        &self.left
    }

    pub fn right(&self) -> &Arc<DGAlgebra> {
        &self.right
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    pub fn differential(&self) -> &GradedMap {
        &self.d
    }

    pub fn left_action(&self) -> &[GradedMap] {
        &self.left_action
    }

    pub fn right_action(&self) -> &[GradedMap] {
        &self.right_action
    }

    pub fn semifree(&self, side: Side) -> Option<&Vec<Vec<Scalar>>> {
        match side {
            Side::Left => self.semifree_left.as_ref(),
            Side::Right => self.semifree_right.as_ref(),
        }
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.name == name)
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Scalar> {
        let f = self.field();
        let mut v = vec![f.zero(); self.dim()];
        v[i] = f.one();
        v
    }

    /// Action of an algebra element (coefficient vector, homogeneous of `degree`).
    pub fn action_of(&self, side: Side, element: &[Scalar], degree: i32) -> GradedMap {
        let (maps, alg) = match side {
            Side::Left => (&self.left_action, &self.left),
            Side::Right => (&self.right_action, &self.right),
        };
        let mut out = GradedMap::zero(self.field(), &self.space, &self.space, degree);
        for ((c, m), b) in element.iter().zip(maps).zip(alg.basis()) {
            if !c.is_zero() {
                debug_assert_eq!(b.degree, degree, "inhomogeneous algebra element");
                out = out.add(&m.scale(c)).expect("same shape");
            }
        }
        out
    }

    /// `M[n]`: degrees drop by `n`, `d` and the left action pick up signs.
    pub fn shift(&self, n: i32) -> Bimodule {
        let f = self.field();
        let sign = f.sign(n as i64);
        let la = self
            .left_action
            .iter()
            .zip(self.left.basis())
            .map(|(m, b)| m.reindex(n, n).scale(&f.sign((n * b.degree) as i64)))
            .collect();
        let ra = self.right_action.iter().map(|m| m.reindex(n, n)).collect();
        let basis = self
            .basis
            .iter()
            .map(|b| BasisElement::new(b.name.clone(), b.degree - n))
            .collect();
        let name = if n == 0 { self.name.clone() } else { format!("{}[{}]", self.name, n) };
        let mut out = Bimodule::from_graded(
            name,
            self.left.clone(),
            self.right.clone(),
            basis,
            self.d.reindex(n, n).scale(&sign),
            la,
            ra,
        );
        out.semifree_left = self.semifree_left.clone();
        out.semifree_right = self.semifree_right.clone();
        out
    }

    /// Direct sum; the flat basis interleaves the summands degree by degree.
    pub fn direct_sum(name: impl Into<String>, parts: &[Arc<Bimodule>]) -> Result<Bimodule> {
        let first = parts
            .first()
            .ok_or_else(|| Error::Invalid("empty direct sum".into()))?;
        for p in parts {
            if !same_algebra(&p.left, &first.left) || !same_algebra(&p.right, &first.right) {
                return Err(Error::Invalid(format!(
                    "direct sum of {} and {} over different algebras",
                    first.name, p.name
                )));
            }
        }
        let f = first.field();
        let sum = DirectSum::new(parts.iter().map(|p| p.space.clone()).collect());
        let diag = |pick: &dyn Fn(&Bimodule) -> &GradedMap, degree: i32| -> Result<GradedMap> {
            let comps: Vec<((usize, usize), &GradedMap)> =
                parts.iter().enumerate().map(|(i, p)| ((i, i), pick(p))).collect();
            DirectSum::assemble(f, &sum, &sum, degree, comps)
        };
        let d = diag(&|p| &p.d, 1)?;
        let la = (0..first.left.dim())
            .map(|i| diag(&|p| &p.left_action[i], first.left.basis()[i].degree))
            .collect::<Result<Vec<_>>>()?;
        let ra = (0..first.right.dim())
            .map(|i| diag(&|p| &p.right_action[i], first.right.basis()[i].degree))
            .collect::<Result<Vec<_>>>()?;
        // basis names in flat order
        let mut basis = Vec::with_capacity(sum.space.total());
        for deg in sum.space.degrees() {
            for p in parts {
                basis.extend(p.basis.iter().filter(|b| b.degree == deg).cloned());
            }
        }
        let mut out = Bimodule::from_graded(name, first.left.clone(), first.right.clone(), basis, d, la, ra);
        for side in [Side::Left, Side::Right] {
            let gens: Option<Vec<Vec<Scalar>>> = parts
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let inc = sum.inclusion(f, i);
                    p.semifree(side).map(|g| {
                        g.iter()
                            .map(|v| inc.apply(v).expect("inclusion shape"))
                            .collect::<Vec<_>>()
                    })
                })
                .collect::<Option<Vec<_>>>()
                .map(|v| v.into_iter().flatten().collect());
            if let Some(g) = gens {
                out = out.with_semifree(side, g);
            }
        }
        Ok(out)
    }

    /// Forgets the left action down to the ground field.
    pub fn restrict_left(&self, ground: &Arc<DGAlgebra>) -> Bimodule {
        let f = self.field();
        let mut out = Bimodule::from_graded(
            self.name.clone(),
            ground.clone(),
            self.right.clone(),
            self.basis.clone(),
            self.d.clone(),
            vec![GradedMap::identity(f, &self.space)],
            self.right_action.clone(),
        );
        out.semifree_right = self.semifree_right.clone();
        out
    }

    /// Forgets the right action down to the ground field.
    pub fn restrict_right(&self, ground: &Arc<DGAlgebra>) -> Bimodule {
        let f = self.field();
        let mut out = Bimodule::from_graded(
            self.name.clone(),
            self.left.clone(),
            ground.clone(),
            self.basis.clone(),
            self.d.clone(),
            self.left_action.clone(),
            vec![GradedMap::identity(f, &self.space)],
        );
        out.semifree_left = self.semifree_left.clone();
        out
    }

    /// `M* = Hom_k(M, k)` for a module with ground left algebra, as a left
    /// module over `M.right` via `(a·φ)(m) = φ(m·a)`. Dual basis in reverse order.
    pub fn dual(&self, name: impl Into<String>) -> Result<Bimodule> {
        if !self.left.is_ground() {
            return Err(Error::Precondition(format!("{}: dual needs a ground left algebra", self.name)));
        }
        let f = self.field();
        let n = self.dim();
        // dual basis vector r pairs with basis vector n-1-r
        let basis: Vec<BasisElement> = self
            .basis
            .iter()
            .rev()
            .map(|b| BasisElement::new(format!("{}*", b.name), -b.degree))
            .collect();
        let space = GradedSpace::from_degrees(&basis.iter().map(|b| b.degree).collect::<Vec<_>>());
        let transpose = |m: &GradedMap| -> Matrix {
            let flat = m.to_flat();
            let mut out = Matrix::zeros(f, n, n);
            for r in 0..n {
                for c in 0..n {
                    out.set(n - 1 - c, n - 1 - r, flat.get(r, c).clone());
                }
            }
            out
        };
        // (dφ)(m) = −(−1)^{|φ|} φ(dm)
        let dt = transpose(&self.d);
        let mut dflat = Matrix::zeros(f, n, n);
        for r in 0..n {
            for c in 0..n {
                let v = dt.get(r, c);
                if !v.is_zero() {
                    dflat.set(r, c, (v * &f.sign(basis[c].degree as i64 + 1)).clone());
                }
            }
        }
        let d = GradedMap::from_flat(&space, &space, 1, &dflat)?;
        let la = self
            .right_action
            .iter()
            .zip(self.right.basis())
            .map(|(m, b)| GradedMap::from_flat(&space, &space, b.degree, &transpose(m)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Bimodule::from_graded(
            name,
            self.right.clone(),
            self.left.clone(),
            basis,
            d,
            la,
            vec![GradedMap::identity(f, &space)],
        ))
    }

    /// Uses the cached verdict of [`verify_semifree`].
    pub fn semifree_holds(&self, side: Side) -> bool {
        let slot = match side {
            Side::Left => &self.flag_check[0],
            Side::Right => &self.flag_check[1],
        };
        *slot.get_or_init(|| self.semifree(side).is_some() && verify_semifree(self, side).is_ok())
    }
}

/// Checks a semi-freeness certificate: generators `g = e·g` (resp. `g·e`)
/// for listed idempotents, `⊕ Ae → M` bijective, and an order with each
/// `dg` in the span of earlier generators.
pub fn verify_semifree(m: &Bimodule, side: Side) -> Result<()> {
    let gens = m
        .semifree(side)
        .ok_or_else(|| Error::Precondition(format!("{} carries no {side:?} semi-free certificate", m.name)))?;
    let alg = match side {
        Side::Left => &m.left,
        Side::Right => &m.right,
    };
    let f = m.field();
    let act = |g: &[Scalar], a: &[Scalar], deg: i32| -> Vec<Scalar> { m.action_of(side, a, deg).apply(g).unwrap() };
    let flat_deg = m.space.flat_degrees();
    let alg_deg: Vec<i32> = alg.basis().iter().map(|b| b.degree).collect();
    // For each generator: idempotent and a basis of e·A (left) or A·e (right).
    let mut images: Vec<Vec<Vec<Scalar>>> = Vec::new();
    for (gi, g) in gens.iter().enumerate() {
        if g.len() != m.dim() {
            return Err(Error::Invalid(format!("generator #{gi} has the wrong length")));
        }
        let degs: Vec<i32> = g
            .iter()
            .zip(&flat_deg)
            .filter(|(s, _)| !s.is_zero())
            .map(|(_, d)| *d)
            .collect();
        if degs.windows(2).any(|w| w[0] != w[1]) {
            return Err(Error::Invalid(format!("generator #{gi} is not homogeneous")));
        }
        let e = alg
            .idempotents()
            .iter()
            .find(|e| act(g, e, 0) == *g)
            .ok_or_else(|| Error::Invalid(format!("generator #{gi} is not fixed by any idempotent")))?;
        // the piece of A that acts freely on g
        let n = alg.dim();
        let mut cols = Matrix::zeros(f, n, n);
        for j in 0..n {
            let b = alg.basis_vector(j);
            let v = match side {
                Side::Left => alg.mul(&b, e),
                Side::Right => alg.mul(e, &b),
            };
            for (r, s) in v.iter().enumerate() {
                cols.set(r, j, s.clone());
            }
        }
        let piv = cols.rref().pivots;
        let mut mine = Vec::new();
        for j in piv {
            let v = cols.column(j);
            // split the column into homogeneous parts, each acts with its degree
            let mut out = vec![f.zero(); m.dim()];
            for deg in alg.space().degrees() {
                let part: Vec<Scalar> = v
                    .iter()
                    .zip(&alg_deg)
                    .map(|(s, d)| if *d == deg { s.clone() } else { f.zero() })
                    .collect();
                if part.iter().all(Scalar::is_zero) {
                    continue;
                }
                for (o, x) in out.iter_mut().zip(act(g, &part, deg)) {
                    *o = &*o + &x;
                }
            }
            mine.push(out);
        }
        images.push(mine);
    }
    let all: Vec<&Vec<Scalar>> = images.iter().flatten().collect();
    let mut mat = Matrix::zeros(f, m.dim(), all.len());
    for (c, v) in all.iter().enumerate() {
        for (r, s) in v.iter().enumerate() {
            mat.set(r, c, s.clone());
        }
    }
    if all.len() != m.dim() || mat.rank() != m.dim() {
        return Err(Error::Invalid(format!(
            "{}: generators do not give a basis ({} images, dimension {})",
            m.name,
            all.len(),
            m.dim()
        )));
    }
    // greedy triangular order
    let mut placed = vec![false; gens.len()];
    let mut span: Vec<Vec<Scalar>> = Vec::new();
    for _ in 0..gens.len() {
        let next = (0..gens.len()).find(|&i| !placed[i] && in_span(f, &m.d.apply(&gens[i]).unwrap(), &span));
        match next {
            Some(i) => {
                placed[i] = true;
                span.extend(images[i].iter().cloned());
            }
            None => {
                return Err(Error::Invalid(format!(
                    "{}: no triangular order of the generators for the differential",
                    m.name
                )))
            }
        }
    }
    Ok(())
}

fn in_span(f: Field, v: &[Scalar], span: &[Vec<Scalar>]) -> bool {
    if v.iter().all(Scalar::is_zero) {
        return true;
    }
    let mut mat = Matrix::zeros(f, v.len(), span.len());
    for (c, g) in span.iter().enumerate() {
        for (r, s) in g.iter().enumerate() {
            mat.set(r, c, s.clone());
        }
    }
    !crate::exactalg::solve_affine(&mat, v).expect("shape").is_empty()
}

/// Checks `d² = 0`, associativity, unitality, commuting actions, the
/// Leibniz-type compatibilities, and any semi-freeness certificates.
pub fn validate_bimodule(m: &Bimodule) -> ValidationReport {
    let mut report = ValidationReport::new(format!("bimodule {}", m.name));
    let f = m.field();
    let dd = m.d.compose(&m.d).expect("square");
    report.record("d^2 = 0", dd.is_zero(), "");

    for (side, alg) in [(Side::Left, &m.left), (Side::Right, &m.right)] {
        let label = match side {
            Side::Left => "left",
            Side::Right => "right",
        };
        let act = |v: &[Scalar], deg: i32| m.action_of(side, v, deg);
        let deg = |i: usize| alg.basis()[i].degree;
        let unit_ok = act(alg.unit(), 0) == GradedMap::identity(f, &m.space);
        report.record(format!("{label} action unital"), unit_ok, "");
        let mut bad = None;
        'a: for i in 0..alg.dim() {
            for j in 0..alg.dim() {
                let prod = act(alg.product_of_basis(i, j), deg(i) + deg(j));
                let (ai, aj) = (act(&alg.basis_vector(i), deg(i)), act(&alg.basis_vector(j), deg(j)));
                let composite = match side {
                    Side::Left => ai.compose(&aj).unwrap(),
                    Side::Right => aj.compose(&ai).unwrap(),
                };
                if prod != composite {
                    bad = Some((i, j));
                    break 'a;
                }
            }
        }
        match bad {
            None => report.pass(format!("{label} action associative")),
            Some((i, j)) => report.fail(
                format!("{label} action associative"),
                format!("on ({}, {})", alg.basis()[i].name, alg.basis()[j].name),
            ),
        }
        let mut bad = None;
        for i in 0..alg.dim() {
            let a = act(&alg.basis_vector(i), deg(i));
            let da = act(&alg.apply_d(&alg.basis_vector(i)), deg(i) + 1);
            let lhs = m.d.compose(&a).unwrap();
            let rhs = match side {
                // d(a m) = da m + (-1)^|a| a dm
                Side::Left => da.add(&a.compose(&m.d).unwrap().scale(&f.sign(deg(i) as i64))).unwrap(),
                // d(m b) = dm b + (-1)^|m| m db
                Side::Right => a
                    .compose(&m.d)
                    .unwrap()
                    .add(&da.scale_by_degree(|d| f.sign(d as i64)))
                    .unwrap(),
            };
            if lhs != rhs && bad.is_none() {
                bad = Some(i);
            }
        }
        match bad {
            None => report.pass(format!("{label} action compatible with d")),
            Some(i) => report.fail(
                format!("{label} action compatible with d"),
                format!("on generator {}", alg.basis()[i].name),
            ),
        }
    }
    let mut bad = None;
    'c: for (i, l) in m.left_action.iter().enumerate() {
        for (j, r) in m.right_action.iter().enumerate() {
            if l.compose(r).unwrap() != r.compose(l).unwrap() {
                bad = Some((i, j));
                break 'c;
            }
        }
    }
    match bad {
        None => report.pass("actions commute"),
        Some((i, j)) => report.fail(
            "actions commute",
            format!("on ({}, {})", m.left.basis()[i].name, m.right.basis()[j].name),
        ),
    }
    for side in [Side::Left, Side::Right] {
        if m.semifree(side).is_some() {
            match verify_semifree(m, side) {
                Ok(()) => report.pass(format!("{side:?} semi-free certificate")),
                Err(e) => report.fail(format!("{side:?} semi-free certificate"), e.to_string()),
            }
        }
    }
    report
}
