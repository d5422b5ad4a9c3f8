use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use super::data::{free_adjunction, perturb_trace, AdjunctionData};
use super::uniqueness::UniquenessScenario;
use crate::dgalg::{Bimodule, BimoduleMap, Ctx, DGAlgebra, System};
use crate::error::Result;
use crate::exactalg::{Field, Scalar};
use crate::sample::random_complex;

/// A random free adjunction over `(k, ℬ)`, with `ℬ` one of `k`, `k[h]/h²`
/// for `|h| ∈ {1, 2}` and `k[t, e]/(t², e²)` with `d e = t`; the trace is
/// perturbed by a random boundary when possible.
pub fn random_adjunction<R: Rng + ?Sized>(ctx: &Ctx, field: Field, rng: &mut R) -> Result<AdjunctionData> {
    let k = DGAlgebra::ground(field);
    let b = match rng.gen_range(0..4) {
        0 => k.clone(),
        1 => DGAlgebra::truncated_polynomial(field, 1, 1),
        2 => DGAlgebra::truncated_polynomial(field, 2, 1),
        _ => DGAlgebra::resolved_dual_numbers(field),
    };
    let count = rng.gen_range(1..=2);
    let shifts: Vec<i32> = (0..count).map(|_| rng.gen_range(-1..=1)).collect();
    let adj = free_adjunction(ctx, &k, &b, &shifts)?;
    let tau_space = ctx.hom(adj.trace.source(), adj.trace.target(), -1);
    if tau_space.dim() == 0 || rng.gen_bool(0.3) {
        return Ok(adj);
    }
    let c: Vec<Scalar> = (0..tau_space.dim()).map(|_| field.random(rng)).collect();
    perturb_trace(ctx, &adj, &tau_space.to_map(&c))
}

/// `X = ℬ ⊗ V` for a random complex `V`, and a random point `(f, h0)` of
/// `{d f = 0, trace ∘ f + d h0 = 0}`.
pub fn random_scenario<R: Rng + ?Sized>(ctx: &Ctx, field: Field, rng: &mut R) -> Result<UniquenessScenario> {
    let adj = random_adjunction(ctx, field, rng)?;
    let k = adj.a_alg.clone();
    let lo = *[-2, -1].choose(rng).expect("nonempty");
    let v = Arc::new(random_complex(&k, "V", lo..=lo + 2, 2, rng));
    let b_left = Arc::new(Bimodule::diagonal(&adj.b_alg).restrict_right(&k));
    let x = Arc::new(ctx.module(&[b_left, v])?.as_ref().clone().renamed("X"));
    let xm = ctx.module(&[x.clone(), adj.m.clone()])?;
    let (nm, b) = (adj.trace.source().clone(), adj.trace.target().clone());
    let mut sys = System::new(ctx, field);
    let f = sys.unknown(&xm, &nm, 0);
    let h = sys.unknown(&xm, &b, -1);
    let closed = sys.equation("d f = 0", &BimoduleMap::zero(&xm, &nm, 1));
    sys.differential_term(closed, field.one(), f);
    let null = sys.equation("trace f + d h = 0", &BimoduleMap::zero(&xm, &b, 0));
    sys.term(null, field.one(), Some(&adj.trace), f, None)
        .differential_term(null, field.one(), h);
    let sol = sys.solve()?;
    let coeffs: Vec<Scalar> = (0..sol.kernel_dim()).map(|_| field.random(rng)).collect();
    let fm = sol.point(&coeffs, f).expect("homogeneous");
    let hm = sol.point(&coeffs, h).expect("homogeneous");
    UniquenessScenario::new(ctx, adj, &x, &fm, Some(&hm))
}
