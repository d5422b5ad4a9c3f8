use std::collections::BTreeMap;
use std::sync::Arc;

use super::complex::TwistedComplex;
use super::morphism::TwistedMorphism;
use crate::dgalg::{BimoduleMap, Ctx, System};
use crate::error::{Error, Result};
use crate::exactalg::DirectSum;

/// A twisted complex whose terms are twisted complexes; the twisting maps
/// are twisted morphisms `T_p → T_q` of degree `1 + p − q`.
#[derive(Clone, Debug)]
pub struct OuterComplex {
    terms: Vec<(i32, Arc<TwistedComplex>)>,
    q: BTreeMap<(usize, usize), TwistedMorphism>,
}

impl OuterComplex {
    pub fn new(terms: Vec<(i32, Arc<TwistedComplex>)>) -> OuterComplex {
        OuterComplex {
            terms,
            q: BTreeMap::new(),
        }
    }

    pub fn with_q(mut self, a: usize, b: usize, m: TwistedMorphism) -> Result<OuterComplex> {
        let (pa, ta) = &self.terms[a];
        let (pb, tb) = &self.terms[b];
        if pa >= pb {
            return Err(Error::Invalid(format!("outer map ({pa}, {pb}) is not one-sided")));
        }
        if m.degree() != 1 + pa - pb {
            return Err(Error::Invalid(format!(
                "outer map ({pa}, {pb}) has degree {}, expected {}",
                m.degree(),
                1 + pa - pb
            )));
        }
        if **m.source() != **ta || **m.target() != **tb {
            return Err(Error::DimensionMismatch(format!("outer map ({pa}, {pb}) has the wrong ends")));
        }
        self.q.insert((a, b), m);
        Ok(self)
    }

    pub fn terms(&self) -> &[(i32, Arc<TwistedComplex>)] {
        &self.terms
    }

    /// Index in the totalized complex of inner term `i` of outer term `a`.
    pub fn flat_index(&self, a: usize, i: usize) -> usize {
        self.terms[..a].iter().map(|(_, t)| t.len()).sum::<usize>() + i
    }

    /// Inclusion of the convolution of outer term `a`, shifted by `−p_a`, into
    /// the convolution of the totalization.
    pub fn outer_inclusion(&self, a: usize) -> crate::exactalg::GradedMap {
        let sum = DirectSum::new(
            self.terms
                .iter()
                .map(|(p, t)| t.convolve().expect("valid inner term").space().shift(-p))
                .collect(),
        );
        sum.inclusion(self.terms[0].1.field(), a)
    }

    pub fn outer_projection(&self, a: usize) -> crate::exactalg::GradedMap {
        let sum = DirectSum::new(
            self.terms
                .iter()
                .map(|(p, t)| t.convolve().expect("valid inner term").space().shift(-p))
                .collect(),
        );
        sum.projection(self.terms[0].1.field(), a)
    }
}

/// Positions add; inner twisting maps of outer term `p` pick up `(−1)^p` and
/// outer components are copied as they are. Terms are ordered by (outer, inner) index.
pub fn totalize(outer: &OuterComplex) -> Result<TwistedComplex> {
    let first = outer
        .terms
        .first()
        .ok_or_else(|| Error::Invalid("outer complex without terms".into()))?;
    let f = first.1.field();
    let mut terms = Vec::new();
    for (p, t) in &outer.terms {
        for (i, m) in t.terms() {
            terms.push((p + i, m.clone()));
        }
    }
    let mut out = TwistedComplex::new(terms)?;
    for (a, (p, t)) in outer.terms.iter().enumerate() {
        let sign = f.sign(*p as i64);
        for (&(i, j), m) in t.twisting_maps() {
            out.set_q(outer.flat_index(a, i), outer.flat_index(a, j), m.scale(&sign))?;
        }
    }
    for (&(a, b), m) in &outer.q {
        for (&(i, j), c) in m.components() {
            let (s, t) = (outer.flat_index(a, i), outer.flat_index(b, j));
            out.set_q(s, t, c.clone()).map_err(|e| {
                Error::Invalid(format!("outer map ({}, {}): {e}", outer.terms[a].0, outer.terms[b].0))
            })?;
        }
    }
    Ok(out)
}

/// Cone of a closed degree-0 morphism `u: S → T`: `{S@−1, T@0}` totalized.
pub fn cone(u: &TwistedMorphism) -> Result<TwistedComplex> {
    totalize(&cone_outer(u)?)
}

pub fn cone_outer(u: &TwistedMorphism) -> Result<OuterComplex> {
    if u.degree() != 0 {
        return Err(Error::Invalid(format!("cone of a degree {} morphism", u.degree())));
    }
    if !u.is_closed()? {
        return Err(Error::NotClosed("cone of a non-closed morphism".into()));
    }
    OuterComplex::new(vec![(-1, u.source().clone()), (0, u.target().clone())]).with_q(0, 1, u.clone())
}

/// Cone of a closed degree-0 bimodule map, as the two-term complex `{S@−1, T@0}`.
pub fn cone_of_map(u: &BimoduleMap) -> Result<TwistedComplex> {
    if u.degree() != 0 {
        return Err(Error::Invalid(format!("cone of a degree {} map", u.degree())));
    }
    if !u.is_closed() {
        return Err(Error::NotClosed(format!("{} → {}", u.source().name(), u.target().name())));
    }
    TwistedComplex::new(vec![(-1, u.source().clone()), (0, u.target().clone())])?.with_q(0, 1, u.clone())
}

/// Map of cones induced by a square `b ∘ u ≃ u′ ∘ a`; the homotopy
/// `H: S → T′` with `d(H) = b u − u′ a` is found by the solver.
pub fn cone_map(
    ctx: &Ctx,
    u: &TwistedMorphism,
    u2: &TwistedMorphism,
    a: &TwistedMorphism,
    b: &TwistedMorphism,
) -> Result<TwistedMorphism> {
    let (ut, u2t, at, bt) = (u.total()?, u2.total()?, a.total()?, b.total()?);
    let rhs = bt.compose(&ut)?.sub(&u2t.compose(&at)?)?;
    let mut sys = System::new(ctx, rhs.field());
    let h = sys.unknown(ut.source(), u2t.target(), -1);
    let eq = sys.equation("d(H) = b u − u' a", &rhs);
    sys.differential_term(eq, rhs.field().one(), h);
    let sol = sys.solve()?;
    let hmap = sol
        .particular(h)
        .ok_or_else(|| Error::Precondition("the square does not commute up to homotopy".into()))?;
    cone_map_with(u, u2, a, b, &hmap)
}

/// Same, with a given homotopy `H`.
pub fn cone_map_with(
    u: &TwistedMorphism,
    u2: &TwistedMorphism,
    a: &TwistedMorphism,
    b: &TwistedMorphism,
    h: &BimoduleMap,
) -> Result<TwistedMorphism> {
    let (src_outer, tgt_outer) = (cone_outer(u)?, cone_outer(u2)?);
    let src = Arc::new(totalize(&src_outer)?);
    let tgt = Arc::new(totalize(&tgt_outer)?);
    let (at, bt) = (a.total()?, b.total()?);
    let (i0, i1) = (tgt_outer.outer_inclusion(0), tgt_outer.outer_inclusion(1));
    let (p0, p1) = (src_outer.outer_projection(0), src_outer.outer_projection(1));
    // a and H leave the shifted source summand; raw matrices need no sign
    let total = i0
        .compose(&at.map().reindex(1, 1))?
        .compose(&p0)?
        .add(&i1.compose(bt.map())?.compose(&p1)?)?
        .add(&i1.compose(&h.map().reindex(1, 0))?.compose(&p0)?)?;
    let total = BimoduleMap::new(src.convolve()?, tgt.convolve()?, total)?;
    let m = TwistedMorphism::from_total(&src, &tgt, &total)?;
    if !m.is_closed()? {
        return Err(Error::Convention("cone map is not closed".into()));
    }
    Ok(m)
}
