//! Self-checking certificates for homotopy claims.
//!
//! A witness keeps the differentials of its source and target next to its
//! maps, so it re-verifies from matrices alone after a round trip through a file.

use crate::dgalg::{hom_differential, BimoduleMap};
use crate::exactalg::{GradedMap, GradedSpace};

#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    /// `d(h) = f` for maps `S → T`.
    NullHomotopy {
        label: String,
        d_source: GradedMap,
        d_target: GradedMap,
        f: GradedMap,
        h: GradedMap,
    },
    /// `g ∘ f − id = d(h1)` on `S` and `f ∘ g − id = d(h2)` on `T`, with `f`, `g` closed.
    Equivalence {
        label: String,
        d_source: GradedMap,
        d_target: GradedMap,
        f: GradedMap,
        g: GradedMap,
        h1: GradedMap,
        h2: GradedMap,
    },
}

impl Witness {
    pub fn null_homotopy(label: impl Into<String>, f: &BimoduleMap, h: &BimoduleMap) -> Witness {
        Witness::NullHomotopy {
            label: label.into(),
            d_source: f.source().differential().clone(),
            d_target: f.target().differential().clone(),
            f: f.map().clone(),
            h: h.map().clone(),
        }
    }

    pub fn equivalence(
        label: impl Into<String>,
        f: &BimoduleMap,
        g: &BimoduleMap,
        h1: &BimoduleMap,
        h2: &BimoduleMap,
    ) -> Witness {
        Witness::Equivalence {
            label: label.into(),
            d_source: f.source().differential().clone(),
            d_target: f.target().differential().clone(),
            f: f.map().clone(),
            g: g.map().clone(),
            h1: h1.map().clone(),
            h2: h2.map().clone(),
        }
    }

    pub fn label(&self) -> &str {
        match self {
            Witness::NullHomotopy { label, .. } | Witness::Equivalence { label, .. } => label,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Witness::NullHomotopy { .. } => "null-homotopy",
            Witness::Equivalence { .. } => "homotopy-equivalence",
        }
    }

    /// Substitutes the maps back into their defining equations.
    pub fn verify(&self) -> bool {
        let square_zero = |d: &GradedMap| d.compose(d).is_ok_and(|dd| dd.is_zero());
        match self {
            Witness::NullHomotopy {
                d_source,
                d_target,
                f,
                h,
                ..
            } => {
                shapes_fit(h, d_source.source(), d_target.source())
                    && shapes_fit(f, d_source.source(), d_target.source())
                    && h.degree() + 1 == f.degree()
                    && square_zero(d_source)
                    && square_zero(d_target)
                    && hom_differential(d_source, d_target, h) == *f
            }
            Witness::Equivalence {
                d_source,
                d_target,
                f,
                g,
                h1,
                h2,
                ..
            } => {
                let (s, t) = (d_source.source(), d_target.source());
                if !(shapes_fit(f, s, t) && shapes_fit(g, t, s) && shapes_fit(h1, s, s) && shapes_fit(h2, t, t)) {
                    return false;
                }
                if f.degree() != 0 || g.degree() != 0 || h1.degree() != -1 || h2.degree() != -1 {
                    return false;
                }
                if !square_zero(d_source) || !square_zero(d_target) {
                    return false;
                }
                let field = f.field();
                let closed = hom_differential(d_source, d_target, f).is_zero()
                    && hom_differential(d_target, d_source, g).is_zero();
                let gf = g.compose(f).and_then(|m| m.sub(&GradedMap::identity(field, s)));
                let fg = f.compose(g).and_then(|m| m.sub(&GradedMap::identity(field, t)));
                closed
                    && gf.is_ok_and(|m| m == hom_differential(d_source, d_source, h1))
                    && fg.is_ok_and(|m| m == hom_differential(d_target, d_target, h2))
            }
        }
    }
}

fn shapes_fit(m: &GradedMap, source: &GradedSpace, target: &GradedSpace) -> bool {
    m.source() == source && m.target() == target
}
