use std::fmt;

use super::system::{Orientation, ThreeTermData};
use crate::dgalg::{BimoduleMap, Ctx, System};
use crate::error::{Error, Result};
use crate::exactalg::{cohomology_at, GradedMap};
use crate::twisted::{cohomology_dims, null_homotopy, EquivalenceWitness, LiftSpace, TwistedComplex, TwistedMorphism};
use crate::witness::Witness;

/// Outcome of the surjectivity test on `H⁻¹Hom`.
#[derive(Clone, Debug)]
pub struct Surjectivity {
    pub side: Orientation,
    pub holds: bool,
    /// `dim H⁻¹Hom(A, C)`.
    pub target_dim: usize,
    /// For each basis class `z`: `(y, w)` with `z = g y + d w` (right) or `z = y f + d w` (left).
    pub preimages: Vec<(BimoduleMap, BimoduleMap)>,
    /// A cocycle whose class is not hit.
    pub missed: Option<BimoduleMap>,
}

/// Decides surjectivity of `g ∘ (−): H⁻¹Hom(A, B) → H⁻¹Hom(A, C)` (right) or
/// `(−) ∘ f: H⁻¹Hom(B, C) → H⁻¹Hom(A, C)` (left).
pub fn surjectivity_criterion(ctx: &Ctx, base: &ThreeTermData, side: Orientation) -> Result<Surjectivity> {
    for (name, m) in [("f", &base.f), ("g", &base.g)] {
        if !m.is_closed() {
            return Err(Error::Precondition(format!("{name} is not closed")));
        }
    }
    if !null_homotopy(ctx, &base.g.compose(&base.f)?)?.exists() {
        return Err(Error::Precondition("g ∘ f is not null-homotopic".into()));
    }
    let field = base.f.field();
    let hc = ctx.hom_complex(&base.a, &base.c)?;
    let classes = cohomology_at(&hc.differential, &hc.differential, -1)?;
    let space = ctx.hom(&base.a, &base.c, -1);
    let mut preimages = Vec::new();
    let mut missed = None;
    for rep in &classes.representatives {
        let z = space.to_map(rep);
        let mut sys = System::new(ctx, field);
        let (y, eq) = match side {
            Orientation::Right => {
                let y = sys.unknown(&base.a, &base.b, -1);
                let eq = sys.equation("g y + d w = z", &z);
                sys.term(eq, field.one(), Some(&base.g), y, None);
                let closed = sys.equation("d y = 0", &BimoduleMap::zero(&base.a, &base.b, 0));
                sys.differential_term(closed, field.one(), y);
                (y, eq)
            }
            Orientation::Left => {
                let y = sys.unknown(&base.b, &base.c, -1);
                let eq = sys.equation("y f + d w = z", &z);
                sys.term(eq, field.one(), None, y, Some(&base.f));
                let closed = sys.equation("d y = 0", &BimoduleMap::zero(&base.b, &base.c, 0));
                sys.differential_term(closed, field.one(), y);
                (y, eq)
            }
        };
        let w = sys.unknown(&base.a, &base.c, -2);
        sys.differential_term(eq, field.one(), w);
        let sol = sys.solve()?;
        match (sol.particular(y), sol.particular(w)) {
            (Some(ym), Some(wm)) => preimages.push((ym, wm)),
            _ => {
                missed = Some(z);
                break;
            }
        }
    }
    Ok(Surjectivity {
        side,
        holds: missed.is_none(),
        target_dim: classes.dimension,
        preimages,
        missed,
    })
}

/// Looks for an isomorphism `T1 → T2` of the form `id + N` with `N` strictly
/// upper triangular: blocks `y1: A → B`, `y2: B → C` (both closed) and
/// `w: A → C` with `x1 − x2 = d w + g y1 − y2 f`.
pub fn unipotent_comparison(ctx: &Ctx, t1: &TwistedComplex, t2: &TwistedComplex) -> Result<Option<EquivalenceWitness>> {
    let (b1, b2) = (ThreeTermData::of(t1)?, ThreeTermData::of(t2)?);
    if b1.f.map() != b2.f.map() || b1.g.map() != b2.g.map() || *b1.a != *b2.a || *b1.b != *b2.b || *b1.c != *b2.c {
        return Err(Error::Invalid("unipotent comparison needs the same A → B → C".into()));
    }
    let base = b1;
    let field = base.f.field();
    let rhs = t1.q(0, 2).sub(&t2.q(0, 2).retarget(&base.a, &base.c)?)?;
    let mut sys = System::new(ctx, field);
    let y1 = sys.unknown(&base.a, &base.b, -1);
    let y2 = sys.unknown(&base.b, &base.c, -1);
    let w = sys.unknown(&base.a, &base.c, -2);
    let e1 = sys.equation("d y1 = 0", &BimoduleMap::zero(&base.a, &base.b, 0));
    sys.differential_term(e1, field.one(), y1);
    let e2 = sys.equation("d y2 = 0", &BimoduleMap::zero(&base.b, &base.c, 0));
    sys.differential_term(e2, field.one(), y2);
    let e3 = sys.equation("d w + g y1 − y2 f = x1 − x2", &rhs);
    sys.differential_term(e3, field.one(), w)
        .term(e3, field.one(), Some(&base.g), y1, None)
        .term(e3, field.one().neg(), None, y2, Some(&base.f));
    let sol = sys.solve()?;
    let (Some(y1), Some(y2), Some(w)) = (sol.particular(y1), sol.particular(y2), sol.particular(w)) else {
        return Ok(None);
    };
    let s = std::sync::Arc::new(t1.clone());
    let t = std::sync::Arc::new(t2.clone());
    let mut phi = TwistedMorphism::zero(&s, &t, 0);
    for a in 0..3 {
        phi.set_component(a, a, BimoduleMap::identity(s.module(a)))?;
    }
    let phi = phi
        .with_component(0, 1, y1)?
        .with_component(1, 2, y2)?
        .with_component(0, 2, w)?;
    let f_tot = phi.total()?;
    if !f_tot.is_closed() {
        return Err(Error::Convention("unipotent comparison is not closed".into()));
    }
    // (id + N)⁻¹ = id − N + N², since N³ = 0
    let src = f_tot.source().clone();
    let id = GradedMap::identity(field, src.space());
    let n = f_tot.map().sub(&id)?;
    let inv = id.sub(&n)?.add(&n.compose(&n)?)?;
    let g = BimoduleMap::new(f_tot.target().clone(), src.clone(), inv)?;
    let w = EquivalenceWitness {
        h1: BimoduleMap::zero(&src, &src, -1),
        h2: BimoduleMap::zero(f_tot.target(), f_tot.target(), -1),
        f: f_tot,
        g,
    };
    if !w.verify() {
        return Err(Error::Convention("unipotent comparison does not invert".into()));
    }
    Ok(Some(w))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    SingleClass,
    MultipleClasses,
    /// Some pair is neither compared by a witness nor separated by cohomology.
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::SingleClass => "single-class",
            Verdict::MultipleClasses => "multiple-classes",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Whether a family of convolutions forms one homotopy class.
#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    pub verdict: Verdict,
    pub members: usize,
    pub witnesses: Vec<Witness>,
    /// Set when two members are told apart by their cohomology dimensions.
    pub invariant: Option<String>,
}

impl EquivalenceReport {
    pub fn witnesses_verify(&self) -> bool {
        self.witnesses.iter().all(Witness::verify)
    }
}

/// Compares the convolution of every lift with that of the first; errors if
/// there are more than `limit` lifts.
pub fn classify_lifts(ctx: &Ctx, lifts: &LiftSpace, limit: u128) -> Result<EquivalenceReport> {
    let xs = lifts
        .enumerate(limit)
        .ok_or_else(|| Error::Invalid("lift space is too large to enumerate".into()))?;
    let complexes: Vec<TwistedComplex> = xs.iter().map(|x| lifts.complex(x)).collect::<Result<_>>()?;
    classify_complexes(ctx, &complexes)
}

pub fn classify_complexes(ctx: &Ctx, complexes: &[TwistedComplex]) -> Result<EquivalenceReport> {
    let mut report = EquivalenceReport {
        verdict: Verdict::SingleClass,
        members: complexes.len(),
        witnesses: Vec::new(),
        invariant: None,
    };
    let Some(first) = complexes.first() else {
        return Ok(report);
    };
    let dims0 = cohomology_dims(&*first.convolve()?);
    for (i, t) in complexes.iter().enumerate().skip(1) {
        let dims = cohomology_dims(&*t.convolve()?);
        if dims != dims0 {
            report.verdict = Verdict::MultipleClasses;
            report.invariant = Some(format!("cohomology dimensions {dims0:?} (lift 0) and {dims:?} (lift {i})"));
            return Ok(report);
        }
        match unipotent_comparison(ctx, first, t)? {
            Some(w) => report.witnesses.push(w.to_witness(format!("lift 0 ≃ lift {i}"))),
            None => report.verdict = Verdict::Inconclusive,
        }
    }
    Ok(report)
}
