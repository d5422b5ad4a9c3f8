use std::sync::Arc;

use super::extension::CyclicExtensionData;
use super::{candidates, PnFunctorData};
use crate::adjunction::{dual_left_adjunction, free_adjunction, free_adjunction_on, AdjunctionData, UniquenessScenario};
use crate::dgalg::{Bimodule, BimoduleMap, Ctx, DGAlgebra, Segment, System};
use crate::error::{Error, Result};
use crate::exactalg::{DirectSum, Field, GradedMap};
use crate::twisted::{is_homotopy_equivalence, TwistedComplex};

/// A closed `γ: Q_n → M ⊗ N` with `γ ∘ ι = action` that is an equivalence;
/// searched over a fixed list of candidates.
pub fn solve_gamma(ctx: &Ctx, ext: &CyclicExtensionData, adj: &AdjunctionData) -> Result<BimoduleMap> {
    let qn = ext.q(ext.n)?;
    let mn = adj.action.target().clone();
    let field = mn.field();
    let iota = ext.iota()?;
    let mut sys = System::new(ctx, field);
    let g = sys.unknown(&qn, &mn, 0);
    let closed = sys.equation("d γ = 0", &BimoduleMap::zero(&qn, &mn, 1));
    sys.differential_term(closed, field.one(), g);
    let restrict = sys.equation("γ ∘ ι = action", &adj.action.retarget(iota.source(), &mn)?);
    sys.term(restrict, field.one(), None, g, Some(&iota));
    let sol = sys.solve()?;
    if sol.is_empty() {
        return Err(Error::Precondition("action does not extend over Q_n".into()));
    }
    for c in candidates(field, sol.kernel_dim(), 32) {
        let c = sol.point(&c, g).expect("nonempty");
        if is_homotopy_equivalence(ctx, &c)?.is_some() {
            return Ok(c);
        }
    }
    Err(Error::Precondition("no extension of the action over Q_n is an equivalence".into()))
}

/// `F: D(k) → D(k[h]/h^{n+1})`, `|h| = 2`, `F = – ⊗ ℬ`: a ℙⁿ-functor with
/// `H = k[−2]`, `Q_n = ⊕ H^k[−k]` with zero differentials and `L = ℬ*`.
pub fn pn_model(ctx: &Ctx, field: Field, n: usize) -> Result<PnFunctorData> {
    if n == 0 {
        return Err(Error::Invalid("a ℙⁿ model needs n ≥ 1".into()));
    }
    let k = DGAlgebra::ground(field);
    let b = DGAlgebra::truncated_polynomial(field, 2, n);
    let adj = free_adjunction(ctx, &k, &b, &[0])?;
    let diag = ctx.diagonal(&k);
    let h = Arc::new(diag.shift(-2).renamed("H"));
    let hp = Arc::new(diag.shift(2).renamed("H'"));
    let h_adj = free_adjunction_on(ctx, &hp, &h)?;
    let left = dual_left_adjunction(ctx, &adj.m, "L")?;
    let mut terms = vec![diag];
    let mut isos = Vec::new();
    for j in 1..=n {
        let hj = ctx.module(&vec![h.clone(); j])?;
        let term = Arc::new(hj.shift(-(j as i32)).renamed(format!("H^{j}[-{j}]")));
        let conv = TwistedComplex::single(-(j as i32), term.clone()).convolve()?;
        isos.push(BimoduleMap::new(conv, hj.clone(), GradedMap::identity(field, hj.space()))?);
        terms.push(term);
    }
    let mut ext = CyclicExtensionData::new(&h, terms, Vec::new(), isos, None)?.with_inverse(h_adj);
    ext.gamma = solve_gamma(ctx, &ext, &adj)?;
    Ok(PnFunctorData::new(adj, ext).with_left(left))
}

/// [`pn_model`] for `n = 1`.
pub fn p1_model(ctx: &Ctx, field: Field) -> Result<PnFunctorData> {
    pn_model(ctx, field, 1)
}

/// `X = N[−1] ⊕ N ⊗ H` with `f = (0, ψ)`: a nonvacuous uniqueness problem
/// whose convolutions include the ℙ-twist.
pub fn p1_uniqueness_scenario(ctx: &Ctx, data: &PnFunctorData, psi: &BimoduleMap) -> Result<UniquenessScenario> {
    let (m, n, h) = (data.m(), data.n_mod(), data.h());
    let nh = ctx.module(&[n.clone(), h.clone()])?;
    let extra = Arc::new(n.shift(-1).renamed("N[-1]"));
    let x = Arc::new(Bimodule::direct_sum("X", &[extra.clone(), nh.clone()])?);
    let field = m.field();
    let layout = DirectSum::new(vec![extra.space().clone(), nh.space().clone()]);
    let onto = BimoduleMap::new(x.clone(), nh.clone(), layout.projection(field, 1))?;
    let proj = ctx.tensor_maps(&[Segment::map(&[x.clone()], &[nh.clone()], &onto), Segment::Id(m.clone())])?;
    let nhm = proj.target().clone();
    let psi = psi.retarget(&nhm, psi.target())?;
    let f = psi.compose(&proj)?;
    UniquenessScenario::new(ctx, data.adj.clone(), &x, &f, None)
}
