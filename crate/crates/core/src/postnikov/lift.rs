use std::sync::Arc;

use super::system::{
    induced_left_postnikov, induced_right_postnikov, left_lifted_map, right_lifted_map, validate_postnikov,
    Orientation, PostnikovSystem, ThreeTermData,
};
use crate::dgalg::{BimoduleMap, Ctx};
use crate::error::{Error, Result};
use crate::exactalg::GradedMap;
use crate::twisted::{
    cone_map, is_homotopy_equivalence, null_homotopy, EquivalenceWitness, TwistedComplex, TwistedMorphism,
};

fn require_valid(ctx: &Ctx, s: &PostnikovSystem) -> Result<()> {
    let report = validate_postnikov(ctx, s)?;
    if report.is_ok() {
        Ok(())
    } else {
        let failed: Vec<String> = report.failures().map(|c| c.name.clone()).collect();
        Err(Error::Precondition(format!("invalid Postnikov system: {}", failed.join("; "))))
    }
}

fn homotopy(ctx: &Ctx, what: &str, p: &BimoduleMap, q: &BimoduleMap) -> Result<BimoduleMap> {
    null_homotopy(ctx, &p.sub(q)?)?
        .witness()
        .cloned()
        .ok_or_else(|| Error::Precondition(format!("{what} does not hold up to homotopy")))
}

/// What lifting a system produced: the complex, and the lifted map moved onto
/// the standard cone (`(f′, x′)` or `(y, g′)`) before the correction.
struct Lift {
    complex: TwistedComplex,
    standard: TwistedMorphism,
}

fn lift(ctx: &Ctx, s: &PostnikovSystem) -> Result<Lift> {
    let base = &s.base;
    let std = base.standard_cone(s.orientation)?;
    let e = &s.to_standard;
    match s.orientation {
        Orientation::Right => {
            // j_std = e′ ∘ j = (f′, x′); dβ = f − f′; x = x′ − g β
            let j_std = e.g.compose(&s.maps[2].total()?)?;
            let j_std = TwistedMorphism::from_total(s.maps[2].source(), &std, &j_std)?;
            let (f1, x1) = (j_std.component(0, 0), j_std.component(0, 1));
            let beta = homotopy(ctx, "i ∘ j ≃ f", &base.f, &f1)?;
            let x = x1.sub(&base.g.compose(&beta)?)?;
            Ok(Lift {
                complex: base.complex(&x)?,
                standard: j_std,
            })
        }
        Orientation::Left => {
            // m_std = m ∘ e = (y, g′); dα = g − g′; x = −y − α f
            let m_std = s.maps[2].total()?.compose(&e.f)?;
            let m_std = TwistedMorphism::from_total(&std, s.maps[2].target(), &m_std)?;
            let (y, g1) = (m_std.component(0, 0), m_std.component(1, 0));
            let alpha = homotopy(ctx, "m ∘ k ≃ g", &base.g, &g1)?;
            let x = y.neg().sub(&alpha.compose(&base.f)?)?;
            Ok(Lift {
                complex: base.complex(&x)?,
                standard: m_std,
            })
        }
    }
}

/// A three-term complex whose induced system of the same orientation is
/// isomorphic to `s`.
pub fn lift_to_twisted(ctx: &Ctx, s: &PostnikovSystem) -> Result<TwistedComplex> {
    require_valid(ctx, s)?;
    Ok(lift(ctx, s)?.complex)
}

fn twisted(m: &BimoduleMap, s: &Arc<TwistedComplex>, t: &Arc<TwistedComplex>) -> Result<TwistedMorphism> {
    TwistedMorphism::from_total(s, t, m)
}

/// `cone(m_T) → T`: the totalized cone of `(−x, g)` is `T` conjugated by `−1` on `A`.
fn left_sign_map(cone_total: &TwistedComplex, t: &TwistedComplex) -> Result<BimoduleMap> {
    let f = t.field();
    let src = cone_total.convolve()?;
    let tgt = t.convolve()?;
    let mut m = GradedMap::zero(f, src.space(), tgt.space(), 0);
    for a in 0..t.len() {
        let block = cone_total.inclusion(a).compose(&cone_total.projection(a))?;
        m = if a == 0 { m.sub(&block)? } else { m.add(&block)? };
    }
    BimoduleMap::new(src, tgt, m)
}

/// The lift `T` of `s` together with a closed degree-0 map from the
/// convolution of `s` to `convolve(T)`, built from maps of cones.
pub fn comparison_to_lift(ctx: &Ctx, s: &PostnikovSystem) -> Result<(TwistedComplex, BimoduleMap)> {
    require_valid(ctx, s)?;
    let Lift { complex: t, standard } = lift(ctx, s)?;
    let base = ThreeTermData::of(&t)?;
    let x = t.q(0, 2);
    let lifted = s.lifted_map();
    let std = base.standard_cone(s.orientation)?;
    let total = match s.orientation {
        Orientation::Right => {
            let a_id = TwistedMorphism::identity(lifted.source());
            let e_inv = twisted(&s.to_standard.g, &s.cone_object, &std)?;
            let first = cone_map(ctx, lifted, &standard, &a_id, &e_inv)?;
            let j_t = right_lifted_map(&base, &x)?;
            let second = cone_map(ctx, &standard, &j_t, &a_id, &TwistedMorphism::identity(&std))?;
            second.total()?.compose(&first.total()?)?
        }
        Orientation::Left => {
            let c_id = TwistedMorphism::identity(lifted.target());
            let e_inv = twisted(&s.to_standard.g, &s.cone_object, &std)?;
            let first = cone_map(ctx, lifted, &standard, &e_inv, &c_id)?;
            let m_t = left_lifted_map(&base, &x)?;
            let second = cone_map(ctx, &standard, &m_t, &TwistedMorphism::identity(&std), &c_id)?;
            let sign = left_sign_map(second.target(), &t)?;
            sign.compose(&second.total()?)?.compose(&first.total()?)?
        }
    };
    let total = total.retarget(&s.convolution()?, &t.convolve()?)?;
    if !total.is_closed() {
        return Err(Error::Convention("comparison with the lift is not closed".into()));
    }
    Ok((t, total))
}

/// The opposite-orientation system: lift, then re-induce.
pub fn convert_system(ctx: &Ctx, s: &PostnikovSystem) -> Result<PostnikovSystem> {
    let t = lift_to_twisted(ctx, s)?;
    match s.orientation {
        Orientation::Right => induced_left_postnikov(&t),
        Orientation::Left => induced_right_postnikov(&t),
    }
}

/// Conversion together with equivalences from both convolutions to the
/// convolution of the intermediate lift, and a direct one between them.
#[derive(Clone, Debug)]
pub struct ConversionCertificate {
    pub converted: PostnikovSystem,
    pub lift: TwistedComplex,
    pub source_to_lift: EquivalenceWitness,
    pub converted_to_lift: EquivalenceWitness,
    /// `conv(source) → conv(converted)`.
    pub direct: EquivalenceWitness,
}

impl ConversionCertificate {
    pub fn verify(&self) -> bool {
        self.source_to_lift.verify() && self.converted_to_lift.verify() && self.direct.verify()
    }
}

pub fn certify_conversion(ctx: &Ctx, s: &PostnikovSystem) -> Result<ConversionCertificate> {
    let (lift, phi) = comparison_to_lift(ctx, s)?;
    let converted = match s.orientation {
        Orientation::Right => induced_left_postnikov(&lift)?,
        Orientation::Left => induced_right_postnikov(&lift)?,
    };
    let (lift2, psi) = comparison_to_lift(ctx, &converted)?;
    if lift2 != lift {
        return Err(Error::Convention("re-lifting an induced system moved the complex".into()));
    }
    let not_equivalent = || Error::Convention("comparison of convolutions is not an equivalence".into());
    let source_to_lift = is_homotopy_equivalence(ctx, &phi)?.ok_or_else(not_equivalent)?;
    let converted_to_lift = is_homotopy_equivalence(ctx, &psi)?.ok_or_else(not_equivalent)?;
    let direct_map = converted_to_lift.g.compose(&phi)?;
    let direct = is_homotopy_equivalence(ctx, &direct_map)?.ok_or_else(not_equivalent)?;
    Ok(ConversionCertificate {
        converted,
        lift,
        source_to_lift,
        converted_to_lift,
        direct,
    })
}
