use std::sync::Arc;

use super::psi::{build_psi, cotwist, left_dual_psi, mu_over_gamma};
use super::{candidates, PnFunctorData};
use crate::dgalg::{Bimodule, BimoduleMap, Ctx, Segment, System};
use crate::error::{Error, Result};
use crate::twisted::{cohomology_dims, cone_of_map, is_homotopy_equivalence, null_homotopy, EquivalenceWitness};

/// Outcome of one of the three defining conditions.
#[derive(Clone, Debug)]
pub struct ConditionCheck {
    pub name: &'static str,
    pub holds: bool,
    /// The map that must be invertible.
    pub map: BimoduleMap,
    pub witness: Option<EquivalenceWitness>,
    /// Cohomology of the cone of `map` when it is not invertible.
    pub cone_cohomology: Vec<(i32, usize)>,
    /// Dimension of the space of candidate maps, where one was searched.
    pub solutions: Option<usize>,
    pub detail: String,
}

fn decide(ctx: &Ctx, name: &'static str, map: BimoduleMap) -> Result<ConditionCheck> {
    let witness = is_homotopy_equivalence(ctx, &map)?;
    let cone_cohomology = match witness {
        Some(_) => Vec::new(),
        None => cohomology_dims(cone_of_map(&map)?.convolve()?.as_ref()),
    };
    let detail = match witness {
        Some(_) => "invertible".to_string(),
        None => format!("cone has cohomology {cone_cohomology:?}"),
    };
    Ok(ConditionCheck {
        name,
        holds: witness.is_some(),
        map,
        witness,
        cone_cohomology,
        solutions: None,
        detail,
    })
}

fn psi_of(ctx: &Ctx, data: &PnFunctorData) -> Result<BimoduleMap> {
    match &data.psi {
        Some(p) => {
            let (n, h, m) = (data.n_mod(), data.h(), data.m());
            p.retarget(&ctx.module(&[n.clone(), h.clone(), m.clone()])?, &ctx.module(&[n.clone(), m.clone()])?)
        }
        None => Ok(build_psi(ctx, data)?.psi),
    }
}

/// `γ ∘ ι_n: Q_{n−1} → RF`.
fn gamma_iota(data: &PnFunctorData) -> Result<(Arc<Bimodule>, BimoduleMap)> {
    let ext = &data.ext;
    let (small, qn) = (ext.q(ext.n - 1)?, ext.q(ext.n)?);
    let gamma = ext.gamma.retarget(&qn, data.adj.action.target())?;
    let iota = ext.iota_step(ext.n)?.retarget(&small, &qn)?;
    Ok((small, gamma.compose(&iota)?))
}

/// `FHQ_{n−1} → FHRF → FRF → FC[1]` is invertible.
pub fn check_monad_condition(ctx: &Ctx, data: &PnFunctorData) -> Result<ConditionCheck> {
    let (m, n, h) = (data.m().clone(), data.n_mod().clone(), data.h().clone());
    let psi = psi_of(ctx, data)?;
    let ct = cotwist(ctx, &data.adj)?;
    let (small, gi) = gamma_iota(data)?;
    let cone = ct.kappa.target().clone();
    let s1 = ctx.tensor_maps(&[
        Segment::map(&[small], &[m.clone(), n.clone()], &gi),
        Segment::Id(h.clone()),
        Segment::Id(m.clone()),
    ])?;
    let s2 = ctx.tensor_maps(&[Segment::Id(m.clone()), Segment::map(&[n.clone(), h, m.clone()], &[n.clone(), m.clone()], &psi)])?;
    let s3 = ctx.tensor_maps(&[Segment::map(&[m.clone(), n], &[cone], &ct.kappa), Segment::Id(m)])?;
    decide(ctx, "monad", s3.compose(&s2)?.compose(&s1)?)
}

/// `FR → FRFL → FH^nL` is invertible.
pub fn check_adjoints_condition(ctx: &Ctx, data: &PnFunctorData) -> Result<ConditionCheck> {
    let left = data.left.as_ref().ok_or_else(|| Error::Precondition("no left adjoint L ⊣ F".into()))?;
    let (m, n, l) = (data.m().clone(), data.n_mod().clone(), left.m.clone());
    let b = ctx.diagonal(&data.adj.b_alg);
    let top = mu_over_gamma(ctx, data)?;
    let hn = top.target().clone();
    let ins = ctx.insert_unit_left(&n)?;
    let s1 = ctx.tensor_maps(&[Segment::map(&[n.clone()], &[b.clone(), n.clone()], &ins), Segment::Id(m.clone())])?;
    let s2 = ctx.tensor_maps(&[
        Segment::map(&[b], &[l.clone(), m.clone()], &left.action),
        Segment::Id(n.clone()),
        Segment::Id(m.clone()),
    ])?;
    let s3 = ctx.tensor_maps(&[Segment::Id(l), Segment::map(&[m.clone(), n], &[hn], &top), Segment::Id(m)])?;
    decide(ctx, "adjoints", s3.compose(&s2)?.compose(&s1)?)
}

const CANDIDATES: usize = 64;

/// Searches for an invertible `θ: FH^nL → FH′H^nHL` with
/// `θ ∘ FμL ∘ ψFL ∘ FHιL ≃ FHμH′L ∘ FHRψ′`.
pub fn check_highest_degree_condition(ctx: &Ctx, data: &PnFunctorData) -> Result<ConditionCheck> {
    let left = data.left.as_ref().ok_or_else(|| Error::Precondition("no left adjoint L ⊣ F".into()))?;
    let hadj = data.ext.h_adj.as_ref().ok_or_else(|| Error::Precondition("no inverse H′ ⊣ H".into()))?;
    let (m, n, h) = (data.m().clone(), data.n_mod().clone(), data.h().clone());
    let (l, hp) = (left.m.clone(), hadj.m.clone());
    let field = m.field();
    let psi = psi_of(ctx, data)?;
    let computed = left_dual_psi(ctx, data, &psi)?;
    let mut note = String::new();
    let psi_prime = match &data.psi_prime {
        None => computed.clone(),
        Some(p) => {
            let p = p.retarget(computed.source(), computed.target())?;
            if !null_homotopy(ctx, &p.sub(&computed)?)?.exists() {
                note = "supplied ψ′ is not homotopic to the mate of ψ; ".into();
            }
            p
        }
    };
    let top = mu_over_gamma(ctx, data)?;
    let hn = top.target().clone();
    let (small, gi) = gamma_iota(data)?;
    let id = |x: &Arc<Bimodule>| Segment::Id(x.clone());

    let u1 = ctx.tensor_maps(&[id(&l), Segment::map(&[small], &[m.clone(), n.clone()], &gi), id(&h), id(&m)])?;
    let u2 = ctx.tensor_maps(&[id(&l), id(&m), Segment::map(&[n.clone(), h.clone(), m.clone()], &[n.clone(), m.clone()], &psi)])?;
    let u3 = ctx.tensor_maps(&[id(&l), Segment::map(&[m.clone(), n.clone()], &[hn.clone()], &top), id(&m)])?;
    let upper = u3.compose(&u2)?.compose(&u1)?;

    let v1 = ctx.tensor_maps(&[
        Segment::map(&[l.clone(), m.clone()], &[l.clone(), hp.clone(), m.clone()], &psi_prime),
        id(&n),
        id(&h),
        id(&m),
    ])?;
    let v2 = ctx.tensor_maps(&[id(&l), id(&hp), Segment::map(&[m.clone(), n.clone()], &[hn.clone()], &top), id(&h), id(&m)])?;
    let lower = v2.compose(&v1)?.compose(&u1)?;

    let (src, tgt) = (upper.target().clone(), lower.target().clone());
    let mut sys = System::new(ctx, field);
    let theta = sys.unknown(&src, &tgt, 0);
    let w = sys.unknown(upper.source(), &tgt, -1);
    let closed = sys.equation("d θ = 0", &BimoduleMap::zero(&src, &tgt, 1));
    sys.differential_term(closed, field.one(), theta);
    let square = sys.equation("θ ∘ upper − d W = lower", &lower);
    sys.term(square, field.one(), None, theta, Some(&upper))
        .differential_term(square, field.one().neg(), w);
    let sol = sys.solve()?;
    let dim = sol.kernel_dim();
    let fail = |detail: String, map: BimoduleMap| ConditionCheck {
        name: "highest degree",
        holds: false,
        map,
        witness: None,
        cone_cohomology: Vec::new(),
        solutions: Some(dim),
        detail: format!("{note}{detail}"),
    };
    if sol.is_empty() {
        return Ok(fail("no θ makes the square commute".into(), upper));
    }
    let mut tried = 0;
    for c in candidates(field, dim, CANDIDATES) {
        tried += 1;
        let t = sol.point(&c, theta).expect("nonempty");
        if let Some(wit) = is_homotopy_equivalence(ctx, &t)? {
            return Ok(ConditionCheck {
                name: "highest degree",
                holds: true,
                map: t,
                witness: Some(wit),
                cone_cohomology: Vec::new(),
                solutions: Some(dim),
                detail: format!("{note}invertible θ found among {tried} candidates"),
            });
        }
    }
    Ok(fail(format!("none of {tried} candidate θ is invertible"), upper))
}
