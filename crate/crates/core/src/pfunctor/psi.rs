use std::sync::Arc;

use super::extension::gamma_inverse;
use super::PnFunctorData;
use crate::adjunction::AdjunctionData;
use crate::dgalg::{Bimodule, BimoduleMap, Ctx, Segment, System};
use crate::error::{Error, Result};
use crate::twisted::{cone_of_map, null_homotopy, TwistedComplex};

/// Closed sections `σ: FHR → FQ₁R` of `FμR` up to homotopy.
#[derive(Clone, Debug)]
pub struct Splittings {
    pub particular: BimoduleMap,
    /// Other splittings, `particular + v` for kernel directions `v`.
    pub others: Vec<BimoduleMap>,
    pub dimension: usize,
}

#[derive(Clone, Debug)]
pub struct PsiResult {
    pub psi: BimoduleMap,
    pub phi: BimoduleMap,
    pub sigma: BimoduleMap,
    /// `ψ` built from a second splitting and a homotopy to the first.
    pub alternative: Option<(BimoduleMap, BimoduleMap)>,
    /// `W` with `d W = trace ∘ ψ`.
    pub trace_null: BimoduleMap,
}

/// `μ₁` followed by the identification of the bottom term with `H`.
fn mu_one(ext: &super::CyclicExtensionData) -> Result<BimoduleMap> {
    let mu = ext.mu(1)?;
    let iso = ext
        .term_isos
        .first()
        .ok_or_else(|| Error::Invalid("the extension has no term H[-1]".into()))?;
    let iso = iso.retarget(mu.target(), &ext.h)?;
    iso.compose(&mu)
}

pub fn splittings(ctx: &Ctx, data: &PnFunctorData) -> Result<Splittings> {
    let (m, n, h) = (data.m(), data.n_mod(), data.h());
    let q1 = data.ext.q(1)?;
    let field = m.field();
    let nhm = ctx.module(&[n.clone(), h.clone(), m.clone()])?;
    let nqm = ctx.module(&[n.clone(), q1.clone(), m.clone()])?;
    let mu1 = mu_one(&data.ext)?;
    let fmu = ctx.tensor_maps(&[Segment::Id(n.clone()), Segment::map(&[q1.clone()], &[h.clone()], &mu1), Segment::Id(m.clone())])?;
    let fmu = fmu.retarget(&nqm, &nhm)?;
    let mut sys = System::new(ctx, field);
    let sigma = sys.unknown(&nhm, &nqm, 0);
    let w = sys.unknown(&nhm, &nhm, -1);
    let closed = sys.equation("d σ = 0", &BimoduleMap::zero(&nhm, &nqm, 1));
    sys.differential_term(closed, field.one(), sigma);
    let section = sys.equation("FμR ∘ σ − d W = id", &BimoduleMap::identity(&nhm));
    sys.term(section, field.one(), Some(&fmu), sigma, None)
        .differential_term(section, field.one().neg(), w);
    let sol = sys.solve()?;
    let particular = sol
        .particular(sigma)
        .ok_or_else(|| Error::Precondition("FμR has no section: F → FRF is not split".into()))?;
    let others = (0..sol.kernel_dim())
        .map(|i| sol.kernel_map(i, sigma))
        .filter(|v| !v.is_zero())
        .map(|v| particular.add(&v))
        .collect::<Result<Vec<_>>>()?;
    Ok(Splittings {
        particular,
        others,
        dimension: sol.kernel_dim(),
    })
}

/// `FγR ∘ F(ι_n ⋯ ι_2)R ∘ σ: FHR → FRFR`.
fn phi(ctx: &Ctx, data: &PnFunctorData, sigma: &BimoduleMap) -> Result<BimoduleMap> {
    let (m, n) = (data.m(), data.n_mod());
    let ext = &data.ext;
    let (q1, qn) = (ext.q(1)?, ext.q(ext.n)?);
    let gamma = ext.gamma.retarget(&qn, data.adj.action.target())?;
    let up = ext.iota_from(1)?.retarget(&q1, &qn)?;
    let g = gamma.compose(&up)?;
    let lift = ctx.tensor_maps(&[
        Segment::Id(n.clone()),
        Segment::map(&[q1.clone()], &[m.clone(), n.clone()], &g),
        Segment::Id(m.clone()),
    ])?;
    lift.retarget(sigma.target(), lift.target())?.compose(sigma)
}

/// `FR trace − trace FR: FRFR → FR`.
pub(crate) fn trace_difference(ctx: &Ctx, adj: &AdjunctionData) -> Result<BimoduleMap> {
    let (m, n) = (&adj.m, &adj.n);
    let b = ctx.diagonal(&adj.b_alg);
    let tr = &adj.trace;
    let nm = [n.clone(), m.clone()];
    let right_contract = ctx.contract_unit_right(m)?;
    let right = ctx
        .tensor_maps(&[Segment::Id(n.clone()), Segment::Id(m.clone()), Segment::map(&nm, &[b.clone()], tr)])?;
    let right = ctx
        .tensor_maps(&[Segment::Id(n.clone()), Segment::map(&[m.clone(), b.clone()], &[m.clone()], &right_contract)])?
        .compose(&right)?;
    let left_contract = ctx.contract_unit_left(n)?;
    let left = ctx.tensor_maps(&[Segment::map(&nm, &[b.clone()], tr), Segment::Id(n.clone()), Segment::Id(m.clone())])?;
    let left = ctx
        .tensor_maps(&[Segment::map(&[b, n.clone()], &[n.clone()], &left_contract), Segment::Id(m.clone())])?
        .compose(&left)?;
    right.sub(&left)
}

/// `ψ` for a given splitting `σ`.
pub fn psi_from_splitting(ctx: &Ctx, data: &PnFunctorData, sigma: &BimoduleMap) -> Result<BimoduleMap> {
    let p = phi(ctx, data, sigma)?;
    let diff = trace_difference(ctx, &data.adj)?;
    diff.retarget(p.target(), diff.target())?.compose(&p)
}

/// `ψ = (FR trace − trace FR) ∘ φ`, with `trace ∘ ψ ≃ 0` certified and a
/// second splitting compared when one exists.
pub fn build_psi(ctx: &Ctx, data: &PnFunctorData) -> Result<PsiResult> {
    data.adj.zetas().map_err(|_| Error::Precondition("the adjunction has no triangle homotopies".into()))?;
    let s = splittings(ctx, data)?;
    let diff = trace_difference(ctx, &data.adj)?;
    let make = |sigma: &BimoduleMap| -> Result<(BimoduleMap, BimoduleMap)> {
        let p = phi(ctx, data, sigma)?;
        Ok((diff.retarget(p.target(), diff.target())?.compose(&p)?, p))
    };
    let (psi, phi) = make(&s.particular)?;
    let tr = data.adj.trace.retarget(psi.target(), data.adj.trace.target())?;
    let trace_null = null_homotopy(ctx, &tr.compose(&psi)?)?
        .witness()
        .cloned()
        .ok_or_else(|| Error::Convention("trace ∘ ψ is not null-homotopic".into()))?;
    let alternative = match s.others.first() {
        None => None,
        Some(other) => {
            let (psi2, _) = make(other)?;
            let h = null_homotopy(ctx, &psi.sub(&psi2)?)?
                .witness()
                .cloned()
                .ok_or_else(|| Error::Convention("ψ depends on the splitting".into()))?;
            Some((psi2, h))
        }
    };
    Ok(PsiResult {
        psi,
        phi,
        sigma: s.particular,
        alternative,
        trace_null,
    })
}

/// The cotwist `C` with `C[1] = cone(action)`.
#[derive(Clone, Debug)]
pub struct Cotwist {
    pub c: Arc<Bimodule>,
    pub cone: Arc<TwistedComplex>,
    /// `κ: RF → C[1]`.
    pub kappa: BimoduleMap,
    /// `W` with `d W = κ ∘ action`.
    pub triangle: BimoduleMap,
}

pub fn cotwist(ctx: &Ctx, adj: &AdjunctionData) -> Result<Cotwist> {
    let cone = Arc::new(cone_of_map(&adj.action)?);
    let total = cone.convolve()?;
    let c = Arc::new(total.shift(-1).renamed("C"));
    let kappa = BimoduleMap::new(adj.action.target().clone(), total, cone.inclusion(1))?;
    let triangle = null_homotopy(ctx, &kappa.compose(&adj.action)?)?
        .witness()
        .cloned()
        .ok_or_else(|| Error::Convention("κ ∘ action is not null-homotopic".into()))?;
    Ok(Cotwist {
        c,
        cone,
        kappa,
        triangle,
    })
}

/// The mate `ψ′: FL → FH′L` of `ψ`, through the units of `L ⊣ F`, `H′ ⊣ H`,
/// `F ⊣ R` and the counits of `L ⊣ F`, `F ⊣ R`.
pub fn left_dual_psi(ctx: &Ctx, data: &PnFunctorData, psi: &BimoduleMap) -> Result<BimoduleMap> {
    let left = data.left.as_ref().ok_or_else(|| Error::Precondition("no left adjoint L ⊣ F".into()))?;
    let hadj = data.ext.h_adj.as_ref().ok_or_else(|| Error::Precondition("no inverse H′ ⊣ H".into()))?;
    let (m, n, h) = (data.m().clone(), data.n_mod().clone(), data.h().clone());
    let (l, hp) = (left.m.clone(), hadj.m.clone());
    let a = ctx.diagonal(&data.adj.a_alg);
    let b = ctx.diagonal(&data.adj.b_alg);
    let id = |x: &Arc<Bimodule>| Segment::Id(x.clone());

    // η_X: ℬ → L H′ M N H M
    let ins_a = ctx.insert_unit_right(&l)?;
    let s1 = ctx.tensor_maps(&[Segment::map(&[l.clone()], &[l.clone(), a.clone()], &ins_a), id(&m)])?;
    let s2 = ctx.tensor_maps(&[id(&l), Segment::map(&[a.clone()], &[hp.clone(), h.clone()], &hadj.action), id(&m)])?;
    let ins_hp = ctx.insert_unit_right(&hp)?;
    let s3 = ctx.tensor_maps(&[id(&l), Segment::map(&[hp.clone()], &[hp.clone(), a.clone()], &ins_hp), id(&h), id(&m)])?;
    let s4 = ctx.tensor_maps(&[
        id(&l),
        id(&hp),
        Segment::map(&[a.clone()], &[m.clone(), n.clone()], &data.adj.action),
        id(&h),
        id(&m),
    ])?;
    let mut eta = left.action.clone();
    for s in [&s1, &s2, &s3, &s4] {
        eta = s.compose(&eta)?;
    }
    let x_word = [l.clone(), hp.clone(), m.clone(), n.clone(), h.clone(), m.clone()];

    // ε_Y: N M L M → ℬ
    let e1 = ctx.tensor_maps(&[id(&n), Segment::map(&[m.clone(), l.clone()], &[a.clone()], &left.trace), id(&m)])?;
    let contract_n = ctx.contract_unit_right(&n)?;
    let e2 = ctx.tensor_maps(&[Segment::map(&[n.clone(), a.clone()], &[n.clone()], &contract_n), id(&m)])?;
    let eps = data.adj.trace.retarget(e2.target(), data.adj.trace.target())?.compose(&e2.compose(&e1)?)?;

    let ins_b = ctx.insert_unit_left(&l)?;
    let t1 = ctx.tensor_maps(&[Segment::map(&[l.clone()], &[b.clone(), l.clone()], &ins_b), id(&m)])?;
    let t2 = ctx.tensor_maps(&[Segment::map(&[b.clone()], &x_word, &eta), id(&l), id(&m)])?;
    let t3 = ctx.tensor_maps(&[
        id(&l),
        id(&hp),
        id(&m),
        Segment::map(&[n.clone(), h.clone(), m.clone()], &[n.clone(), m.clone()], psi),
        id(&l),
        id(&m),
    ])?;
    let t4 = ctx.tensor_maps(&[id(&l), id(&hp), id(&m), Segment::map(&[n.clone(), m.clone(), l.clone(), m.clone()], &[b.clone()], &eps)])?;
    let contract_m = ctx.contract_unit_right(&m)?;
    let t5 = ctx.tensor_maps(&[id(&l), id(&hp), Segment::map(&[m.clone(), b], &[m.clone()], &contract_m)])?;
    let mut out = t1;
    for s in [&t2, &t3, &t4, &t5] {
        out = s.compose(&out)?;
    }
    Ok(out)
}

/// `μ_n ∘ γ⁻¹: RF → H^n`, honouring an override of `μ_n`.
pub(crate) fn mu_over_gamma(ctx: &Ctx, data: &PnFunctorData) -> Result<BimoduleMap> {
    let ext = &data.ext;
    let mu = match &data.mu_top {
        Some(m) => m.clone(),
        None => ext.mu(ext.n)?,
    };
    let g = gamma_inverse(ctx, ext, &data.adj)?.g;
    mu.retarget(g.target(), mu.target())?.compose(&g)
}
