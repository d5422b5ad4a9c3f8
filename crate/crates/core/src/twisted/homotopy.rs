use std::sync::Arc;

use super::complex::TwistedComplex;
use super::outer::cone_of_map;
use crate::dgalg::{Bimodule, BimoduleMap, Ctx, System};
use crate::error::{Error, Result};
use crate::exactalg::{cohomology_at, GradedMap, Scalar};
use crate::witness::Witness;

/// Outcome of a null-homotopy search.
#[derive(Clone, Debug)]
pub enum NullHomotopy {
    /// `d(h) = f`.
    Witness(BimoduleMap),
    /// `f` represents a nonzero class; coordinates of `f` in the Hom basis.
    Obstruction { degree: i32, coordinates: Vec<Scalar> },
}

impl NullHomotopy {
    pub fn witness(&self) -> Option<&BimoduleMap> {
        match self {
            NullHomotopy::Witness(h) => Some(h),
            NullHomotopy::Obstruction { .. } => None,
        }
    }

    pub fn exists(&self) -> bool {
        self.witness().is_some()
    }
}

/// Finds `h` of degree `|f| − 1` with `d(h) = f`, or certifies that none exists.
pub fn null_homotopy(ctx: &Ctx, f: &BimoduleMap) -> Result<NullHomotopy> {
    if !f.is_closed() {
        return Err(Error::NotClosed(format!(
            "{} → {} of degree {}",
            f.source().name(),
            f.target().name(),
            f.degree()
        )));
    }
    if f.is_zero() {
        return Ok(NullHomotopy::Witness(BimoduleMap::zero(f.source(), f.target(), f.degree() - 1)));
    }
    let mut sys = System::new(ctx, f.field());
    let h = sys.unknown(f.source(), f.target(), f.degree() - 1);
    let eq = sys.equation("d(h) = f", f);
    sys.differential_term(eq, f.field().one(), h);
    let sol = sys.solve()?;
    Ok(match sol.particular(h) {
        Some(h) => NullHomotopy::Witness(h),
        None => NullHomotopy::Obstruction {
            degree: f.degree(),
            coordinates: ctx.hom(f.source(), f.target(), f.degree()).coordinates(f.map()),
        },
    })
}

/// Quasi-inverse and homotopies: `g f − id = d(h1)`, `f g − id = d(h2)`.
#[derive(Clone, Debug)]
pub struct EquivalenceWitness {
    pub f: BimoduleMap,
    pub g: BimoduleMap,
    pub h1: BimoduleMap,
    pub h2: BimoduleMap,
}

impl EquivalenceWitness {
    pub fn verify(&self) -> bool {
        self.to_witness("check").verify()
    }

    pub fn to_witness(&self, label: impl Into<String>) -> Witness {
        Witness::equivalence(label, &self.f, &self.g, &self.h1, &self.h2)
    }

    /// Witness for the quasi-inverse `g`.
    pub fn inverse(&self) -> EquivalenceWitness {
        EquivalenceWitness {
            f: self.g.clone(),
            g: self.f.clone(),
            h1: self.h2.clone(),
            h2: self.h1.clone(),
        }
    }
}

fn check_degree_zero_closed(f: &BimoduleMap) -> Result<()> {
    if f.degree() != 0 {
        return Err(Error::Invalid(format!("equivalence test on a degree {} map", f.degree())));
    }
    if !f.is_closed() {
        return Err(Error::NotClosed(format!("{} → {}", f.source().name(), f.target().name())));
    }
    Ok(())
}

/// Dimensions of the cohomology of the underlying complex, degree by degree.
pub fn cohomology_dims(m: &Bimodule) -> Vec<(i32, usize)> {
    let d: &GradedMap = m.differential();
    m.space()
        .degrees()
        .map(|k| (k, cohomology_at(d, d, k).expect("d² = 0").dimension))
        .filter(|(_, n)| *n > 0)
        .collect()
}

/// Decides whether `f` is a homotopy equivalence by contracting its cone.
///
/// A contraction `H` of `cone(f) = S[1] ⊕ T` yields `g = H_{T→S}`,
/// `h1 = H_{S→S}` and `h2 = −H_{T→T}`.
pub fn is_homotopy_equivalence(ctx: &Ctx, f: &BimoduleMap) -> Result<Option<EquivalenceWitness>> {
    check_degree_zero_closed(f)?;
    // quasi-isomorphism is necessary: cheap rejection first
    if cohomology_dims(f.source()) != cohomology_dims(f.target()) {
        return Ok(None);
    }
    let c: TwistedComplex = cone_of_map(f)?;
    let total = c.convolve()?;
    let id = BimoduleMap::identity(&total);
    let mut sys = System::new(ctx, f.field());
    let h = sys.unknown(&total, &total, -1);
    let eq = sys.equation("DH + HD = id", &id);
    sys.differential_term(eq, f.field().one(), h);
    let sol = sys.solve()?;
    let Some(hmap) = sol.particular(h) else {
        return Ok(None);
    };
    let block = |a: usize, b: usize| -> Result<BimoduleMap> {
        let raw = c
            .projection(b)
            .compose(hmap.map())?
            .compose(&c.inclusion(a))?
            .reindex(c.position(a), c.position(b));
        BimoduleMap::new(c.module(a).clone(), c.module(b).clone(), raw)
    };
    let w = EquivalenceWitness {
        f: f.clone(),
        g: block(1, 0)?,
        h1: block(0, 0)?,
        h2: block(1, 1)?.neg(),
    };
    if !w.verify() {
        return Err(Error::Convention("cone contraction does not give an equivalence".into()));
    }
    Ok(Some(w))
}

/// Second route: solve for `(g, h1, h2)` at once.
pub fn equivalence_by_joint_solve(ctx: &Ctx, f: &BimoduleMap) -> Result<Option<EquivalenceWitness>> {
    check_degree_zero_closed(f)?;
    let field = f.field();
    let (s, t) = (f.source(), f.target());
    let mut sys = System::new(ctx, field);
    let g = sys.unknown(t, s, 0);
    let h1 = sys.unknown(s, s, -1);
    let h2 = sys.unknown(t, t, -1);
    let one = field.one();
    let minus = field.from_i64(-1);
    let closed = sys.equation("d(g) = 0", &BimoduleMap::zero(t, s, 1));
    sys.differential_term(closed, one.clone(), g);
    let left = sys.equation("g f − d(h1) = id", &BimoduleMap::identity(s));
    sys.term(left, one.clone(), None, g, Some(f)).differential_term(left, minus.clone(), h1);
    let right = sys.equation("f g − d(h2) = id", &BimoduleMap::identity(t));
    sys.term(right, one, Some(f), g, None).differential_term(right, minus, h2);
    let sol = sys.solve()?;
    Ok(sol.particular(g).map(|gm| EquivalenceWitness {
        f: f.clone(),
        g: gm,
        h1: sol.particular(h1).expect("same solution"),
        h2: sol.particular(h2).expect("same solution"),
    }))
}

/// Contractibility: the identity is null-homotopic.
pub fn is_contractible(ctx: &Ctx, m: &Arc<Bimodule>) -> Result<Option<BimoduleMap>> {
    Ok(null_homotopy(ctx, &BimoduleMap::identity(m))?.witness().cloned())
}
