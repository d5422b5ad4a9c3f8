use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::data::{validate_adjunction, AdjunctionData};
use crate::dgalg::{Bimodule, BimoduleMap, Ctx, Segment};
use crate::error::{Error, Result};
use crate::postnikov::{EquivalenceReport, Verdict};
use crate::report::ValidationReport;
use crate::twisted::{
    enumerate_lifts, is_homotopy_equivalence, null_homotopy, EquivalenceWitness, LiftSpace, NullHomotopy,
    TwistedComplex, TwistedMorphism,
};

/// The three-term complex `X ⊗ M → N ⊗ M → ℬ` with maps `f` and `trace`.
#[derive(Clone, Debug)]
pub struct UniquenessScenario {
    pub adj: AdjunctionData,
    pub x: Arc<Bimodule>,
    pub f: BimoduleMap,
    /// `trace ∘ f + d h0 = 0`; `None` asks the solver.
    pub h0: Option<BimoduleMap>,
}

impl UniquenessScenario {
    pub fn new(ctx: &Ctx, adj: AdjunctionData, x: &Arc<Bimodule>, f: &BimoduleMap, h0: Option<&BimoduleMap>) -> Result<Self> {
        let xm = ctx.module(&[x.clone(), adj.m.clone()])?;
        let nm = adj.trace.source().clone();
        let f = f.retarget(&xm, &nm)?;
        let h0 = h0.map(|h| h.retarget(&xm, adj.trace.target())).transpose()?;
        Ok(UniquenessScenario {
            adj,
            x: x.clone(),
            f,
            h0,
        })
    }

    /// `X ⊗ M`.
    pub fn source(&self) -> &Arc<Bimodule> {
        self.f.source()
    }

    pub fn lifts(&self, ctx: &Ctx) -> Result<LiftSpace> {
        enumerate_lifts(ctx, &self.f, &self.adj.trace)
    }

    /// The given `h0`, or one found by the solver; a precondition error
    /// carries the class of `trace ∘ f` otherwise.
    pub fn nullness(&self, ctx: &Ctx) -> Result<BimoduleMap> {
        let tf = self.adj.trace.compose(&self.f)?;
        if let Some(h) = &self.h0 {
            if satisfies(&tf, h) {
                return Ok(h.clone());
            }
            return Err(Error::Precondition("given h0 does not satisfy trace ∘ f + d h0 = 0".into()));
        }
        match null_homotopy(ctx, &tf)? {
            NullHomotopy::Witness(h) => Ok(h.neg()),
            NullHomotopy::Obstruction { degree, coordinates } => {
                let c: Vec<String> = coordinates.iter().map(ToString::to_string).collect();
                Err(Error::Precondition(format!(
                    "trace ∘ f is not null-homotopic: obstruction class in H^{degree}Hom(X⊗M, ℬ) with coordinates [{}]",
                    c.join(", ")
                )))
            }
        }
    }

    /// `{X⊗M@−2, N⊗M@−1, ℬ@0}` with `q = (f, trace, h)`.
    pub fn complex(&self, h: &BimoduleMap) -> Result<TwistedComplex> {
        let (a, b, c) = (self.f.source(), self.f.target(), self.adj.trace.target());
        TwistedComplex::three_term(a, b, c, &self.f, &self.adj.trace, &h.retarget(a, c)?)
    }
}

fn satisfies(trace_f: &BimoduleMap, h: &BimoduleMap) -> bool {
    h.degree() == -1 && trace_f.map().add(h.differential().map()).is_ok_and(|m| m.is_zero())
}

pub fn validate_scenario(ctx: &Ctx, s: &UniquenessScenario) -> Result<ValidationReport> {
    let mut report = ValidationReport::new("uniqueness scenario");
    report.absorb(validate_adjunction(ctx, &s.adj)?.report);
    report.record("f has degree 0", s.f.degree() == 0, format!("degree {}", s.f.degree()));
    report.record("f is closed", s.f.is_closed(), "d(f) ≠ 0");
    match s.f.equivariance_defect() {
        None => report.pass("f is a bimodule map"),
        Some(d) => report.fail("f is a bimodule map", d),
    }
    if s.f.degree() == 0 && s.f.is_closed() {
        match s.nullness(ctx) {
            Ok(_) => report.pass("trace ∘ f ≃ 0"),
            Err(Error::Precondition(msg)) => report.fail("trace ∘ f ≃ 0", msg),
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}

/// `(φ ⊗ id_N ⊗ id_M) ∘ (id_X ⊗ action ⊗ id_M)` preceded by the unit
/// insertion `X⊗M → X⊗𝒜⊗M` and followed by `ℬ⊗N⊗M → N⊗M`.
pub fn insert_action(ctx: &Ctx, s: &UniquenessScenario, phi: &BimoduleMap) -> Result<BimoduleMap> {
    let adj = &s.adj;
    let (x, m, n) = (&s.x, &adj.m, &adj.n);
    let (a, b) = (adj.a_diag(ctx), adj.b_diag(ctx));
    let xm = s.source();
    if !(Arc::ptr_eq(phi.source(), xm) || **phi.source() == **xm) || phi.target().space() != b.space() {
        return Err(Error::DimensionMismatch(format!(
            "expected a map X⊗M → ℬ, got {} → {}",
            phi.source().name(),
            phi.target().name()
        )));
    }
    let phi = phi.retarget(xm, &b)?;
    let ins = ctx.insert_unit_right(x)?;
    let step1 = ctx.tensor_maps(&[Segment::map(&[x.clone()], &[x.clone(), a.clone()], &ins), Segment::Id(m.clone())])?;
    let step2 = ctx.tensor_maps(&[
        Segment::Id(x.clone()),
        Segment::map(&[a], &[m.clone(), n.clone()], &adj.action),
        Segment::Id(m.clone()),
    ])?;
    let step3 = ctx.tensor_maps(&[
        Segment::map(&[x.clone(), m.clone()], &[b.clone()], &phi),
        Segment::Id(n.clone()),
        Segment::Id(m.clone()),
    ])?;
    let contract = ctx.contract_unit_left(n)?;
    let step4 = ctx.tensor_maps(&[Segment::map(&[b, n.clone()], &[n.clone()], &contract), Segment::Id(m.clone())])?;
    let out = step4.compose(&step3)?.compose(&step2)?.compose(&step1)?;
    out.retarget(xm, adj.trace.source())
}

/// `ψ` with `trace ∘ ψ ≃ φ`, and `k` with `d k = trace ∘ ψ − φ`.
#[derive(Clone, Debug)]
pub struct Preimage {
    pub psi: BimoduleMap,
    pub homotopy: BimoduleMap,
}

/// Lifts a closed `φ: X⊗M → ℬ` through `trace ∘ (−)`; the homotopy is
/// `−φ ∘ (id_X ⊗ ζ_M)`.
pub fn preimage_under_trace(ctx: &Ctx, s: &UniquenessScenario, phi: &BimoduleMap) -> Result<Preimage> {
    if !phi.is_closed() {
        return Err(Error::NotClosed("φ".into()));
    }
    let adj = if s.adj.zeta_m.is_some() { s.adj.clone() } else { s.adj.clone().with_solved_zeta(ctx)? };
    let psi = insert_action(ctx, s, phi)?;
    let (zeta_m, _) = adj.zetas()?;
    let xm = s.source();
    let id_zeta = ctx
        .tensor_maps(&[Segment::Id(s.x.clone()), Segment::map(&[adj.m.clone()], &[adj.m.clone()], zeta_m)])?
        .retarget(xm, xm)?;
    let phi = phi.retarget(xm, adj.trace.target())?;
    let homotopy = phi.compose(&id_zeta)?.neg();
    let defect = adj.trace.compose(&psi)?.sub(&phi)?;
    if homotopy.differential() != defect {
        return Err(Error::Convention("assembled homotopy for trace ∘ ψ ≃ φ does not substitute".into()));
    }
    Ok(Preimage { psi, homotopy })
}

/// Mutually inverse morphisms between the complexes of two lifts `h1`, `h2`.
#[derive(Clone, Debug)]
pub struct LiftEquivalence {
    pub xi: BimoduleMap,
    /// `d η = trace ∘ ξ − h1 + h2`.
    pub eta: BimoduleMap,
    pub forward: TwistedMorphism,
    pub backward: TwistedMorphism,
    /// On convolutions.
    pub witness: EquivalenceWitness,
    /// Both composites are the identity on the nose.
    pub strict: bool,
}

impl LiftEquivalence {
    /// Re-checks every defining identity by substitution.
    pub fn verify(&self, trace: &BimoduleMap, h1: &BimoduleMap, h2: &BimoduleMap) -> bool {
        let deta = trace
            .compose(&self.xi)
            .and_then(|t| t.sub(h1))
            .and_then(|t| t.add(h2))
            .is_ok_and(|t| t.map() == self.eta.differential().map());
        self.xi.is_closed()
            && deta
            && self.forward.is_closed().unwrap_or(false)
            && self.backward.is_closed().unwrap_or(false)
            && self.witness.verify()
    }
}

pub fn build_lift_equivalence(
    ctx: &Ctx,
    s: &UniquenessScenario,
    h1: &BimoduleMap,
    h2: &BimoduleMap,
) -> Result<LiftEquivalence> {
    let tf = s.adj.trace.compose(&s.f)?;
    let (xm, b) = (s.source(), s.adj.trace.target());
    let h1 = h1.retarget(xm, b)?;
    let h2 = h2.retarget(xm, b)?;
    for (name, h) in [("h1", &h1), ("h2", &h2)] {
        if !satisfies(&tf, h) {
            return Err(Error::Precondition(format!("{name} does not satisfy trace ∘ f + d h = 0")));
        }
    }
    let xi = insert_action(ctx, s, &h1.sub(&h2)?)?;
    if !xi.is_closed() {
        return Err(Error::Convention("d ξ ≠ 0".into()));
    }
    let rhs = s.adj.trace.compose(&xi)?.sub(&h1)?.add(&h2)?;
    let eta = null_homotopy(ctx, &rhs)?
        .witness()
        .cloned()
        .ok_or_else(|| Error::Convention("no η with d η = trace ∘ ξ − h1 + h2".into()))?;
    let t1 = Arc::new(s.complex(&h1)?);
    let t2 = Arc::new(s.complex(&h2)?);
    let forward = unipotent(&t1, &t2, &xi, &eta.neg())?;
    let backward = unipotent(&t2, &t1, &xi.neg(), &eta)?;
    for (name, m) in [("forward", &forward), ("backward", &backward)] {
        if !m.is_closed()? {
            return Err(Error::Convention(format!("{name} morphism of lifts is not closed")));
        }
    }
    let (ft, bt) = (forward.total()?, backward.total()?);
    let strict = bt.compose(&ft)? == BimoduleMap::identity(ft.source())
        && ft.compose(&bt)? == BimoduleMap::identity(ft.target());
    let witness = if strict {
        EquivalenceWitness {
            h1: BimoduleMap::zero(ft.source(), ft.source(), -1),
            h2: BimoduleMap::zero(ft.target(), ft.target(), -1),
            f: ft,
            g: bt,
        }
    } else {
        is_homotopy_equivalence(ctx, &ft)?
            .ok_or_else(|| Error::Convention("morphism of lifts is not an equivalence".into()))?
    };
    Ok(LiftEquivalence {
        xi,
        eta,
        forward,
        backward,
        witness,
        strict,
    })
}

fn unipotent(
    s: &Arc<TwistedComplex>,
    t: &Arc<TwistedComplex>,
    a_to_b: &BimoduleMap,
    a_to_c: &BimoduleMap,
) -> Result<TwistedMorphism> {
    let mut phi = TwistedMorphism::zero(s, t, 0);
    for a in 0..3 {
        phi.set_component(a, a, BimoduleMap::identity(s.module(a)))?;
    }
    phi.with_component(0, 1, a_to_b.clone())?.with_component(0, 2, a_to_c.clone())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Every pair of lifts; errors above `limit` lifts.
    Exhaustive { limit: u128 },
    /// `pairs` random pairs drawn with `seed`.
    Sample { pairs: usize, seed: u64 },
}

/// Builds and re-verifies a lift equivalence for every examined pair.
pub fn verify_uniqueness(ctx: &Ctx, s: &UniquenessScenario, mode: Mode) -> Result<EquivalenceReport> {
    s.nullness(ctx)?;
    let lifts = s.lifts(ctx)?;
    if lifts.is_empty() {
        return Err(Error::Precondition("the lift space is empty".into()));
    }
    let (xs, pairs): (Vec<BimoduleMap>, Vec<(usize, usize)>) = match mode {
        Mode::Exhaustive { limit } => {
            let xs = lifts
                .enumerate(limit)
                .ok_or_else(|| Error::Invalid(format!("more than {limit} lifts to enumerate")))?;
            let pairs = (0..xs.len()).flat_map(|i| (i + 1..xs.len()).map(move |j| (i, j))).collect();
            (xs, pairs)
        }
        Mode::Sample { pairs, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let xs: Vec<BimoduleMap> = (0..2 * pairs)
                .map(|_| sample_lift(&lifts, &mut rng))
                .collect::<Result<_>>()?;
            (xs, (0..pairs).map(|i| (2 * i, 2 * i + 1)).collect())
        }
    };
    let trace = &s.adj.trace;
    let witnesses = pairs
        .par_iter()
        .map(|&(i, j)| {
            let e = build_lift_equivalence(ctx, s, &xs[i], &xs[j])?;
            let (h1, h2) = (xs[i].retarget(s.source(), trace.target())?, xs[j].retarget(s.source(), trace.target())?);
            if !e.verify(trace, &h1, &h2) {
                return Err(Error::Convention(format!("lift equivalence {i} ≃ {j} fails substitution")));
            }
            Ok(e.witness.to_witness(format!("lift {i} ≃ lift {j}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EquivalenceReport {
        verdict: Verdict::SingleClass,
        members: xs.len(),
        witnesses,
        invariant: None,
    })
}

fn sample_lift<R: Rng>(lifts: &LiftSpace, rng: &mut R) -> Result<BimoduleMap> {
    lifts.sample(rng).ok_or_else(|| Error::Precondition("the lift space is empty".into()))
}
