use std::sync::Arc;

use crate::dgalg::{Bimodule, BimoduleMap, Ctx, DGAlgebra, Segment, Side};
use crate::error::{Error, Result};
use crate::exactalg::{solve_affine, Matrix, Scalar};
use crate::report::ValidationReport;
use crate::sample::{free_left_module, free_right_module};
use crate::twisted::{null_homotopy, NullHomotopy};

/// `M` (𝒜-ℬ), `N` (ℬ-𝒜) with `trace: N ⊗_𝒜 M → ℬ` and `action: 𝒜 → M ⊗_ℬ N`.
///
/// `zeta_m`, `zeta_n` are degree −1 endomorphisms with
/// `triangle_m = id + d(zeta_m)` and `triangle_n = id + d(zeta_n)`.
#[derive(Clone, Debug)]
pub struct AdjunctionData {
    pub a_alg: Arc<DGAlgebra>,
    pub b_alg: Arc<DGAlgebra>,
    pub m: Arc<Bimodule>,
    pub n: Arc<Bimodule>,
    pub trace: BimoduleMap,
    pub action: BimoduleMap,
    pub zeta_m: Option<BimoduleMap>,
    pub zeta_n: Option<BimoduleMap>,
}

impl AdjunctionData {
    /// Reattaches `trace` and `action` to the tensor products and diagonals cached in `ctx`.
    pub fn new(
        ctx: &Ctx,
        m: &Arc<Bimodule>,
        n: &Arc<Bimodule>,
        trace: &BimoduleMap,
        action: &BimoduleMap,
    ) -> Result<AdjunctionData> {
        let (a_alg, b_alg) = (m.left().clone(), m.right().clone());
        if !same(n.left(), &b_alg) || !same(n.right(), &a_alg) {
            return Err(Error::Invalid(format!(
                "{} is not a bimodule over the algebras of {} in the opposite order",
                n.name(),
                m.name()
            )));
        }
        let trace = trace.retarget(&ctx.module(&[n.clone(), m.clone()])?, &ctx.diagonal(&b_alg))?;
        let action = action.retarget(&ctx.diagonal(&a_alg), &ctx.module(&[m.clone(), n.clone()])?)?;
        Ok(AdjunctionData {
            a_alg,
            b_alg,
            m: m.clone(),
            n: n.clone(),
            trace,
            action,
            zeta_m: None,
            zeta_n: None,
        })
    }

    pub fn with_zeta(mut self, zeta_m: BimoduleMap, zeta_n: BimoduleMap) -> AdjunctionData {
        self.zeta_m = Some(zeta_m);
        self.zeta_n = Some(zeta_n);
        self
    }

    /// `ℬ` and `𝒜` as the diagonal atoms used in tensor words.
    pub fn b_diag(&self, ctx: &Ctx) -> Arc<Bimodule> {
        ctx.diagonal(&self.b_alg)
    }

    pub fn a_diag(&self, ctx: &Ctx) -> Arc<Bimodule> {
        ctx.diagonal(&self.a_alg)
    }

    /// `M → 𝒜M → MNM → Mℬ → M`.
    pub fn triangle_m(&self, ctx: &Ctx) -> Result<BimoduleMap> {
        triangle_m_with(ctx, &self.m, &self.n, &self.trace, &self.action)
    }

    /// `N → N𝒜 → NMN → ℬN → N`.
    pub fn triangle_n(&self, ctx: &Ctx) -> Result<BimoduleMap> {
        let (m, n) = (&self.m, &self.n);
        let (a, b) = (self.a_diag(ctx), self.b_diag(ctx));
        let ins = ctx.insert_unit_right(n)?;
        let act = ctx.tensor_maps(&[Segment::Id(n.clone()), Segment::map(&[a], &[m.clone(), n.clone()], &self.action)])?;
        let tr = ctx.tensor_maps(&[
            Segment::map(&[n.clone(), m.clone()], &[b], &self.trace),
            Segment::Id(n.clone()),
        ])?;
        ctx.contract_unit_left(n)?.compose(&tr)?.compose(&act)?.compose(&ins)
    }

    /// Solves for missing homotopies; fails if the data is not an adjunction.
    pub fn with_solved_zeta(self, ctx: &Ctx) -> Result<AdjunctionData> {
        let check = validate_adjunction(ctx, &self)?;
        if !check.report.is_ok() {
            let failed: Vec<String> = check.report.failures().map(|c| format!("{}: {}", c.name, c.detail)).collect();
            return Err(Error::Precondition(format!("invalid adjunction: {}", failed.join("; "))));
        }
        Ok(check.data)
    }

    pub fn zetas(&self) -> Result<(&BimoduleMap, &BimoduleMap)> {
        match (&self.zeta_m, &self.zeta_n) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => Err(Error::Precondition("triangle homotopies have not been solved".into())),
        }
    }
}

fn same(a: &Arc<DGAlgebra>, b: &Arc<DGAlgebra>) -> bool {
    crate::dgalg::same_algebra(a, b)
}

fn triangle_m_with(
    ctx: &Ctx,
    m: &Arc<Bimodule>,
    n: &Arc<Bimodule>,
    trace: &BimoduleMap,
    action: &BimoduleMap,
) -> Result<BimoduleMap> {
    let a = ctx.diagonal(m.left());
    let b = ctx.diagonal(m.right());
    let ins = ctx.insert_unit_left(m)?;
    let act = ctx.tensor_maps(&[Segment::map(&[a], &[m.clone(), n.clone()], action), Segment::Id(m.clone())])?;
    let tr = ctx.tensor_maps(&[Segment::Id(m.clone()), Segment::map(&[n.clone(), m.clone()], &[b], trace)])?;
    ctx.contract_unit_right(m)?.compose(&tr)?.compose(&act)?.compose(&ins)
}

/// Verdict of [`validate_adjunction`], with the homotopies filled in when found.
#[derive(Clone, Debug)]
pub struct AdjunctionCheck {
    pub report: ValidationReport,
    pub data: AdjunctionData,
}

fn describe(n: &NullHomotopy) -> String {
    match n {
        NullHomotopy::Witness(_) => String::new(),
        NullHomotopy::Obstruction { degree, coordinates } => {
            let c: Vec<String> = coordinates.iter().map(ToString::to_string).collect();
            format!("defect is a nonzero class in degree {degree}, coordinates [{}]", c.join(", "))
        }
    }
}

/// Checks both triangle identities up to the given homotopies, solving for
/// any that are missing.
pub fn validate_adjunction(ctx: &Ctx, adj: &AdjunctionData) -> Result<AdjunctionCheck> {
    let mut report = ValidationReport::new(format!("adjunction {} ⊣ {}", adj.m.name(), adj.n.name()));
    let mut data = adj.clone();
    let mut shapes_ok = true;
    for (name, map) in [("trace", &adj.trace), ("action", &adj.action)] {
        if map.degree() != 0 {
            report.fail(format!("{name} has degree 0"), format!("degree {}", map.degree()));
            shapes_ok = false;
            continue;
        }
        report.record(format!("{name} is closed"), map.is_closed(), "d ≠ 0");
        match map.equivariance_defect() {
            None => report.pass(format!("{name} is a bimodule map")),
            Some(d) => report.fail(format!("{name} is a bimodule map"), d),
        }
    }
    if !shapes_ok || !adj.trace.is_closed() || !adj.action.is_closed() {
        return Ok(AdjunctionCheck { report, data });
    }
    let sides = [
        ("M", adj.triangle_m(ctx)?, &adj.zeta_m, &adj.m),
        ("N", adj.triangle_n(ctx)?, &adj.zeta_n, &adj.n),
    ];
    for (label, tri, given, module) in sides {
        let defect = tri.sub(&BimoduleMap::identity(module))?;
        let name = format!("triangle identity on {label}");
        let found = match given {
            Some(z) => {
                let ok = z.degree() == -1 && z.differential().map() == defect.map();
                report.record(&name, ok, "given homotopy does not satisfy d(ζ) = triangle − id");
                ok.then(|| z.clone())
            }
            None => {
                let n = null_homotopy(ctx, &defect)?;
                report.record(&name, n.exists(), describe(&n));
                n.witness().cloned()
            }
        };
        match label {
            "M" => data.zeta_m = found.or(data.zeta_m.take()),
            _ => data.zeta_n = found.or(data.zeta_n.take()),
        }
    }
    Ok(AdjunctionCheck { report, data })
}

/// Coefficients `c` with `Σ c_t images[t] = target`, if any.
pub(crate) fn solve_in_span(images: &[Vec<Scalar>], target: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
    let field = target
        .first()
        .map(Scalar::field)
        .ok_or_else(|| Error::Invalid("empty linear condition".into()))?;
    let mut a = Matrix::zeros(field, target.len(), images.len());
    for (c, img) in images.iter().enumerate() {
        for (r, v) in img.iter().enumerate() {
            a.set(r, c, v.clone());
        }
    }
    Ok(solve_affine(&a, target)?.particular)
}

/// Value of a map on the element `u ⊗ v` of a two-factor tensor product.
fn on_pair(ctx: &Ctx, word: [&Arc<Bimodule>; 2], u: &[Scalar], v: &[Scalar], map: &BimoduleMap) -> Result<Vec<Scalar>> {
    let t = ctx.tensor(&[word[0].clone(), word[1].clone()])?;
    let field = map.field();
    let mut elt = vec![field.zero(); t.module().dim()];
    for (p, cu) in u.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
        for (q, cv) in v.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            let c = cu * cv;
            for (r, x) in t.project(&[p, q]) {
                elt[r].add_mul(&c, &x);
            }
        }
    }
    map.map().apply(&elt)
}

/// The evaluation pairing `N ⊗ M → ℬ`, `e_i* ⊗ e_j ↦ δ_ij`, for semi-free
/// `M` (right) and `N` (left) with matching generator lists.
pub fn pairing_trace(ctx: &Ctx, m: &Arc<Bimodule>, n: &Arc<Bimodule>) -> Result<BimoduleMap> {
    let (gm, gn) = match (m.semifree(Side::Right), n.semifree(Side::Left)) {
        (Some(a), Some(b)) if a.len() == b.len() => (a.clone(), b.clone()),
        _ => return Err(Error::Precondition("pairing needs matching semi-free generators".into())),
    };
    let b = ctx.diagonal(m.right());
    let nm = ctx.module(&[n.clone(), m.clone()])?;
    let hom = ctx.hom(&nm, &b, 0);
    let field = m.field();
    let unit = m.right().unit().to_vec();
    let mut images = vec![Vec::new(); hom.dim()];
    let mut target = Vec::new();
    for (i, e_dual) in gn.iter().enumerate() {
        for (j, e) in gm.iter().enumerate() {
            for (t, img) in images.iter_mut().enumerate() {
                img.extend(on_pair(ctx, [n, m], e_dual, e, &hom.to_map(&unit_vector(field, hom.dim(), t)))?);
            }
            if i == j {
                target.extend(unit.iter().cloned());
            } else {
                target.extend((0..b.dim()).map(|_| field.zero()));
            }
        }
    }
    let c = solve_in_span(&images, &target)?
        .ok_or_else(|| Error::Precondition("no bimodule map realizes the pairing".into()))?;
    Ok(hom.to_map(&c))
}

fn unit_vector(field: crate::exactalg::Field, n: usize, i: usize) -> Vec<Scalar> {
    (0..n).map(|j| if i == j { field.one() } else { field.zero() }).collect()
}

/// The unit `𝒜 → M ⊗ N` making the triangle on `M` hold strictly.
pub fn solve_action(ctx: &Ctx, m: &Arc<Bimodule>, n: &Arc<Bimodule>, trace: &BimoduleMap) -> Result<BimoduleMap> {
    let a = ctx.diagonal(m.left());
    let mn = ctx.module(&[m.clone(), n.clone()])?;
    let hom = ctx.hom(&a, &mn, 0);
    let field = m.field();
    let images = (0..hom.dim())
        .map(|t| {
            let act = hom.to_map(&unit_vector(field, hom.dim(), t));
            Ok(triangle_m_with(ctx, m, n, trace, &act)?.map().to_flat().entries().to_vec())
        })
        .collect::<Result<Vec<_>>>()?;
    let id = BimoduleMap::identity(m).map().to_flat().entries().to_vec();
    if images.is_empty() {
        return if id.iter().all(Scalar::is_zero) {
            Ok(BimoduleMap::zero(&a, &mn, 0))
        } else {
            Err(Error::Precondition("Hom⁰(𝒜, M ⊗ N) is zero".into()))
        };
    }
    let c = solve_in_span(&images, &id)?.ok_or_else(|| Error::Precondition("no unit satisfies the triangle on M".into()))?;
    Ok(hom.to_map(&c))
}

/// `M = ⊕ ℬ[s_i]` over `(𝒜, ℬ)` with ground `𝒜`, `N = ⊕ ℬ[−s_i]`, the
/// evaluation pairing and its unit. Both triangles hold strictly.
pub fn free_adjunction(ctx: &Ctx, a: &Arc<DGAlgebra>, b: &Arc<DGAlgebra>, shifts: &[i32]) -> Result<AdjunctionData> {
    let m = Arc::new(free_right_module(a, b, "M", shifts)?);
    let dual: Vec<i32> = shifts.iter().map(|s| -s).collect();
    let n = Arc::new(free_left_module(a, b, "N", &dual)?);
    free_adjunction_on(ctx, &m, &n)
}

pub fn free_adjunction_on(ctx: &Ctx, m: &Arc<Bimodule>, n: &Arc<Bimodule>) -> Result<AdjunctionData> {
    let trace = pairing_trace(ctx, m, n)?;
    let action = solve_action(ctx, m, n, &trace)?;
    let adj = AdjunctionData::new(ctx, m, n, &trace, &action)?;
    let zm = BimoduleMap::zero(m, m, -1);
    let zn = BimoduleMap::zero(n, n, -1);
    Ok(adj.with_zeta(zm, zn))
}

/// `trace + d(τ)`, with the homotopies re-solved.
pub fn perturb_trace(ctx: &Ctx, adj: &AdjunctionData, tau: &BimoduleMap) -> Result<AdjunctionData> {
    let trace = adj.trace.add(&tau.differential().retarget(adj.trace.source(), adj.trace.target())?)?;
    AdjunctionData::new(ctx, &adj.m, &adj.n, &trace, &adj.action)?.with_solved_zeta(ctx)
}

/// `ev: M ⊗ M* → 𝒜`, `m ⊗ φ ↦ (−1)^{|m||φ|} φ(m)`, for `M` with ground left algebra.
pub fn evaluation_trace(ctx: &Ctx, m: &Arc<Bimodule>, dual: &Arc<Bimodule>) -> Result<BimoduleMap> {
    let a = ctx.diagonal(m.left());
    let ml = ctx.module(&[m.clone(), dual.clone()])?;
    let hom = ctx.hom(&ml, &a, 0);
    let field = m.field();
    let unit = m.left().unit().to_vec();
    let dim = m.dim();
    let mut images = vec![Vec::new(); hom.dim()];
    let mut target = Vec::new();
    for c in 0..dim {
        for r in 0..dual.dim() {
            for (t, img) in images.iter_mut().enumerate() {
                let f = hom.to_map(&unit_vector(field, hom.dim(), t));
                img.extend(on_pair(ctx, [m, dual], &m.basis_vector(c), &dual.basis_vector(r), &f)?);
            }
            if r + c + 1 == dim {
                let s = field.sign(m.basis()[c].degree as i64 * dual.basis()[r].degree as i64);
                target.extend(unit.iter().map(|u| u * &s));
            } else {
                target.extend((0..a.dim()).map(|_| field.zero()));
            }
        }
    }
    if images.is_empty() {
        return Ok(hom.to_map(&[]));
    }
    let c = solve_in_span(&images, &target)?
        .ok_or_else(|| Error::Precondition(format!("evaluation on {} is not a bimodule map", m.name())))?;
    Ok(hom.to_map(&c))
}

/// `L ⊣ F` for `F = – ⊗ M` with `L = M*`, stored with `m = L` and `n = M`.
pub fn dual_left_adjunction(ctx: &Ctx, m: &Arc<Bimodule>, name: &str) -> Result<AdjunctionData> {
    let l = Arc::new(m.dual(name)?);
    let trace = evaluation_trace(ctx, m, &l)?;
    let action = solve_action(ctx, &l, m, &trace)?;
    AdjunctionData::new(ctx, &l, m, &trace, &action)?.with_solved_zeta(ctx)
}
