use std::fmt;
use std::sync::Arc;

use crate::dgalg::{Bimodule, BimoduleMap, Ctx};
use crate::error::{Error, Result};
use crate::report::ValidationReport;
use crate::twisted::{cone, null_homotopy, EquivalenceWitness, TwistedComplex, TwistedMorphism};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    Left,
    Right,
}

impl Orientation {
    pub fn opposite(self) -> Orientation {
        match self {
            Orientation::Left => Orientation::Right,
            Orientation::Right => Orientation::Left,
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::Left => "left",
            Orientation::Right => "right",
        })
    }
}

/// `A --f--> B --g--> C` with `f`, `g` closed of degree 0.
#[derive(Clone, Debug)]
pub struct ThreeTermData {
    pub a: Arc<Bimodule>,
    pub b: Arc<Bimodule>,
    pub c: Arc<Bimodule>,
    pub f: BimoduleMap,
    pub g: BimoduleMap,
}

impl ThreeTermData {
    pub fn new(f: BimoduleMap, g: BimoduleMap) -> Result<ThreeTermData> {
        if **f.target() != **g.source() {
            return Err(Error::NotComposable("f and g do not meet".into()));
        }
        for (name, m) in [("f", &f), ("g", &g)] {
            if m.degree() != 0 {
                return Err(Error::Invalid(format!("{name} has degree {}", m.degree())));
            }
        }
        let g = g.retarget(f.target(), g.target())?;
        Ok(ThreeTermData {
            a: f.source().clone(),
            b: f.target().clone(),
            c: g.target().clone(),
            f,
            g,
        })
    }

    /// Base data of a complex laid out as `{A@−2, B@−1, C@0}`.
    pub fn of(t: &TwistedComplex) -> Result<ThreeTermData> {
        let positions: Vec<i32> = t.terms().iter().map(|(p, _)| *p).collect();
        if positions != [-2, -1, 0] {
            return Err(Error::Invalid(format!("expected positions [-2, -1, 0], got {positions:?}")));
        }
        ThreeTermData::new(t.q(0, 1), t.q(1, 2))
    }

    pub fn complex(&self, x: &BimoduleMap) -> Result<TwistedComplex> {
        TwistedComplex::three_term(&self.a, &self.b, &self.c, &self.f, &self.g, x)
    }

    /// `{B@−1, C@0}` (right) or `{A@−1, B@0}` (left).
    pub fn standard_cone(&self, orientation: Orientation) -> Result<Arc<TwistedComplex>> {
        let t = match orientation {
            Orientation::Right => {
                TwistedComplex::new(vec![(-1, self.b.clone()), (0, self.c.clone())])?.with_q(0, 1, self.g.clone())?
            }
            Orientation::Left => {
                TwistedComplex::new(vec![(-1, self.a.clone()), (0, self.b.clone())])?.with_q(0, 1, self.f.clone())?
            }
        };
        Ok(Arc::new(t))
    }

    /// One-term complexes carrying the objects the maps of a system touch.
    pub(crate) fn one_term(&self, which: Term) -> Arc<TwistedComplex> {
        Arc::new(match which {
            Term::AShifted => TwistedComplex::single(-1, self.a.clone()),
            Term::BShifted => TwistedComplex::single(-1, self.b.clone()),
            Term::B => TwistedComplex::single(0, self.b.clone()),
            Term::C => TwistedComplex::single(0, self.c.clone()),
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) enum Term {
    /// `A[1]`
    AShifted,
    /// `B[1]`
    BShifted,
    B,
    C,
}

/// A left or right Postnikov system of `A → B → C`.
///
/// Right: `h: C → X`, `i: X → B[1]`, `j: A[1] → X`.
/// Left: `k: B → Y`, `l: Y → A[1]`, `m: Y → C`.
/// The cone object comes with an equivalence from the standard cone
/// (`cone(g)[−1]`, resp. `cone(f)`), which makes the starred triangle exact.
#[derive(Clone, Debug)]
pub struct PostnikovSystem {
    pub orientation: Orientation,
    pub base: ThreeTermData,
    pub cone_object: Arc<TwistedComplex>,
    /// `[h, i, j]` or `[k, l, m]`.
    pub maps: [TwistedMorphism; 3],
    /// From the convolution of the standard cone to that of `cone_object`.
    pub to_standard: EquivalenceWitness,
}

impl PostnikovSystem {
    pub fn new(
        orientation: Orientation,
        base: ThreeTermData,
        cone_object: Arc<TwistedComplex>,
        maps: [TwistedMorphism; 3],
        to_standard: EquivalenceWitness,
    ) -> PostnikovSystem {
        PostnikovSystem {
            orientation,
            base,
            cone_object,
            maps,
            to_standard,
        }
    }

    /// `j` (right) or `m` (left): the map whose cone is the convolution.
    pub fn lifted_map(&self) -> &TwistedMorphism {
        &self.maps[2]
    }

    pub fn cone_bimodule(&self) -> Result<Arc<Bimodule>> {
        self.cone_object.convolve()
    }

    /// The cone of `j` (right) or `m` (left), totalized.
    pub fn convolution_complex(&self) -> Result<TwistedComplex> {
        cone(self.lifted_map())
    }

    pub fn convolution(&self) -> Result<Arc<Bimodule>> {
        Ok(self.convolution_complex()?.convolve()?.clone())
    }
}

fn identity_component(s: &Arc<TwistedComplex>, t: &Arc<TwistedComplex>, a: usize, b: usize) -> Result<TwistedMorphism> {
    TwistedMorphism::zero(s, t, 0).with_component(a, b, BimoduleMap::identity(s.module(a)).retarget(s.module(a), t.module(b))?)
}

/// Standard maps `(h, i)` or `(k, l)` into and out of the standard cone.
pub(crate) fn standard_maps(base: &ThreeTermData, orientation: Orientation) -> Result<(TwistedMorphism, TwistedMorphism)> {
    let std = base.standard_cone(orientation)?;
    Ok(match orientation {
        Orientation::Right => (
            identity_component(&base.one_term(Term::C), &std, 0, 1)?,
            identity_component(&std, &base.one_term(Term::BShifted), 0, 0)?,
        ),
        Orientation::Left => (
            identity_component(&base.one_term(Term::B), &std, 0, 1)?,
            identity_component(&std, &base.one_term(Term::AShifted), 0, 0)?,
        ),
    })
}

fn identity_equivalence(m: &Arc<Bimodule>) -> EquivalenceWitness {
    let id = BimoduleMap::identity(m);
    EquivalenceWitness {
        f: id.clone(),
        g: id,
        h1: BimoduleMap::zero(m, m, -1),
        h2: BimoduleMap::zero(m, m, -1),
    }
}

/// `j = (f, x): A[1] → {B@−1, C@0}`.
pub fn right_lifted_map(base: &ThreeTermData, x: &BimoduleMap) -> Result<TwistedMorphism> {
    let std = base.standard_cone(Orientation::Right)?;
    TwistedMorphism::zero(&base.one_term(Term::AShifted), &std, 0)
        .with_component(0, 0, base.f.clone())?
        .with_component(0, 1, x.clone())
}

/// `m = (−x, g): {A@−1, B@0} → C`. The sign keeps `m` closed; `cone(m)`
/// totalizes to the three-term complex conjugated by `−1` on `A`.
pub fn left_lifted_map(base: &ThreeTermData, x: &BimoduleMap) -> Result<TwistedMorphism> {
    let std = base.standard_cone(Orientation::Left)?;
    TwistedMorphism::zero(&std, &base.one_term(Term::C), 0)
        .with_component(0, 0, x.neg())?
        .with_component(1, 0, base.g.clone())
}

fn induced(t: &TwistedComplex, orientation: Orientation) -> Result<PostnikovSystem> {
    let report = crate::twisted::validate_twisted(t);
    if !report.is_ok() {
        return Err(Error::Invalid(format!("not a twisted complex: {report}")));
    }
    let base = ThreeTermData::of(t)?;
    let x = t.q(0, 2);
    let std = base.standard_cone(orientation)?;
    let (first, second) = standard_maps(&base, orientation)?;
    let lifted = match orientation {
        Orientation::Right => right_lifted_map(&base, &x)?,
        Orientation::Left => left_lifted_map(&base, &x)?,
    };
    let eq = identity_equivalence(&std.convolve()?);
    Ok(PostnikovSystem::new(orientation, base, std, [first, second, lifted], eq))
}

/// The right system of a three-term complex: `X = {B → C}`, `j = (f, x)`.
pub fn induced_right_postnikov(t: &TwistedComplex) -> Result<PostnikovSystem> {
    induced(t, Orientation::Right)
}

/// The left system of a three-term complex: `Y = {A → B}`, `m = (−x, g)`.
pub fn induced_left_postnikov(t: &TwistedComplex) -> Result<PostnikovSystem> {
    induced(t, Orientation::Left)
}

fn homotopic(ctx: &Ctx, report: &mut ValidationReport, name: &str, p: &BimoduleMap, q: &BimoduleMap) -> Result<()> {
    let diff = match p.sub(q) {
        Ok(d) => d,
        Err(e) => {
            report.fail(name, e.to_string());
            return Ok(());
        }
    };
    if !diff.is_closed() {
        report.fail(name, "difference is not closed");
        return Ok(());
    }
    let found = null_homotopy(ctx, &diff)?.exists();
    report.record(name, found, if found { "" } else { "difference is not null-homotopic" });
    Ok(())
}

fn ends(report: &mut ValidationReport, name: &str, m: &TwistedMorphism, s: &TwistedComplex, t: &TwistedComplex) {
    let ok = **m.source() == *s && **m.target() == *t && m.degree() == 0;
    report.record(format!("{name} has the expected ends"), ok, "");
}

/// Checks the system's invariants.
pub fn validate_postnikov(ctx: &Ctx, s: &PostnikovSystem) -> Result<ValidationReport> {
    let mut r = ValidationReport::new(format!("{} Postnikov system", s.orientation));
    let base = &s.base;
    for (name, m) in [("f", &base.f), ("g", &base.g)] {
        r.record(format!("{name} is closed"), m.is_closed(), "");
        r.record(format!("{name} is equivariant"), m.is_equivariant(), "");
    }
    let gf = base.g.compose(&base.f)?;
    if gf.is_closed() {
        let nh = null_homotopy(ctx, &gf)?.exists();
        r.record("g ∘ f ≃ 0", nh, if nh { "" } else { "g ∘ f is not null-homotopic" });
    }
    let names = match s.orientation {
        Orientation::Right => ["h", "i", "j"],
        Orientation::Left => ["k", "l", "m"],
    };
    let x = &s.cone_object;
    let expected: [(Arc<TwistedComplex>, Arc<TwistedComplex>); 3] = match s.orientation {
        Orientation::Right => [
            (base.one_term(Term::C), x.clone()),
            (x.clone(), base.one_term(Term::BShifted)),
            (base.one_term(Term::AShifted), x.clone()),
        ],
        Orientation::Left => [
            (base.one_term(Term::B), x.clone()),
            (x.clone(), base.one_term(Term::AShifted)),
            (x.clone(), base.one_term(Term::C)),
        ],
    };
    for ((name, m), (src, tgt)) in names.iter().zip(&s.maps).zip(&expected) {
        ends(&mut r, name, m, src, tgt);
        r.record(format!("{name} is closed"), m.is_closed()?, "");
    }
    if !r.is_ok() {
        return Ok(r);
    }

    let std = base.standard_cone(s.orientation)?;
    let e = &s.to_standard;
    let ends_ok = *e.f.source().as_ref() == *std.convolve()?.as_ref() && *e.f.target().as_ref() == *x.convolve()?.as_ref();
    r.record("cone comparison has the expected ends", ends_ok, "");
    r.record("cone comparison is an equivalence", e.verify(), "");
    if !r.is_ok() {
        return Ok(r);
    }
    let (first_std, second_std) = standard_maps(base, s.orientation)?;
    let (first, second, third) = (s.maps[0].total()?, s.maps[1].total()?, s.maps[2].total()?);
    let (ef, first_std, second_std) = (&e.f, first_std.total()?, second_std.total()?);
    homotopic(ctx, &mut r, &format!("starred triangle: e ∘ {}₀ ≃ {}", names[0], names[0]), &ef.compose(&first_std)?, &first)?;
    homotopic(ctx, &mut r, &format!("starred triangle: {} ∘ e ≃ {}₀", names[1], names[1]), &second.compose(ef)?, &second_std)?;
    match s.orientation {
        Orientation::Right => {
            let f_tw = TwistedMorphism::zero(&base.one_term(Term::AShifted), &base.one_term(Term::BShifted), 0)
                .with_component(0, 0, base.f.clone())?
                .total()?;
            homotopic(ctx, &mut r, "i ∘ j ≃ f", &second.compose(&third)?, &f_tw)?;
        }
        Orientation::Left => {
            let g_tw = TwistedMorphism::zero(&base.one_term(Term::B), &base.one_term(Term::C), 0)
                .with_component(0, 0, base.g.clone())?
                .total()?;
            homotopic(ctx, &mut r, "m ∘ k ≃ g", &third.compose(&first)?, &g_tw)?;
        }
    }
    Ok(r)
}
