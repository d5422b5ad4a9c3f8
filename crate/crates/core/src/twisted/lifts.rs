use std::sync::Arc;

use rand::Rng;

use super::complex::TwistedComplex;
use crate::dgalg::{Bimodule, BimoduleMap, Ctx, System};
use crate::error::{Error, Result};
use crate::exactalg::{AffineSolutionSpace, Scalar};

/// All degree −1 maps `x: A → C` with `dx = −g ∘ f`.
#[derive(Clone, Debug)]
pub struct LiftSpace {
    pub a: Arc<Bimodule>,
    pub b: Arc<Bimodule>,
    pub c: Arc<Bimodule>,
    pub f: BimoduleMap,
    pub g: BimoduleMap,
    pub solutions: AffineSolutionSpace,
    particular: Option<BimoduleMap>,
    kernel: Vec<BimoduleMap>,
    /// Coordinates of `g ∘ f` in `Hom⁰(A, C)` when it is not a boundary.
    pub obstruction: Option<Vec<Scalar>>,
}

impl LiftSpace {
    pub fn is_empty(&self) -> bool {
        self.particular.is_none()
    }

    pub fn dimension(&self) -> Option<usize> {
        self.particular.as_ref().map(|_| self.kernel.len())
    }

    /// Number of lifts over a prime field.
    pub fn count(&self) -> Option<u128> {
        self.solutions.count()
    }

    pub fn particular(&self) -> Option<&BimoduleMap> {
        self.particular.as_ref()
    }

    /// Kernel directions: closed degree −1 maps `A → C`.
    pub fn kernel(&self) -> &[BimoduleMap] {
        &self.kernel
    }

    /// `particular + Σ coeffs[i] kernel[i]`.
    pub fn lift(&self, coeffs: &[Scalar]) -> Option<BimoduleMap> {
        let mut x = self.particular.clone()?;
        assert_eq!(coeffs.len(), self.kernel.len(), "coefficient count");
        for (c, k) in coeffs.iter().zip(&self.kernel) {
            if !c.is_zero() {
                x = x.add(&k.scale(c)).expect("same shape");
            }
        }
        Some(x)
    }

    pub fn complex(&self, x: &BimoduleMap) -> Result<TwistedComplex> {
        TwistedComplex::three_term(&self.a, &self.b, &self.c, &self.f, &self.g, x)
    }

    /// Every lift, in base-`p` order of the coefficients; `None` over ℚ or above `limit`.
    pub fn enumerate(&self, limit: u128) -> Option<Vec<BimoduleMap>> {
        let n = self.count()?;
        if n > limit {
            return None;
        }
        Some(
            (0..n)
                .map(|i| {
                    let coeffs = self.solutions.coefficients_of(i).expect("prime field");
                    self.lift(&coeffs).expect("nonempty")
                })
                .collect(),
        )
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<BimoduleMap> {
        let field = self.f.field();
        let coeffs: Vec<Scalar> = self.kernel.iter().map(|_| field.random(rng)).collect();
        self.lift(&coeffs)
    }
}

/// Solves `dx = −g ∘ f` for the three-term data `A → B → C`.
pub fn enumerate_lifts(ctx: &Ctx, f: &BimoduleMap, g: &BimoduleMap) -> Result<LiftSpace> {
    for (name, m) in [("f", f), ("g", g)] {
        if m.degree() != 0 {
            return Err(Error::Invalid(format!("{name} has degree {}", m.degree())));
        }
        if !m.is_closed() {
            return Err(Error::NotClosed(name.into()));
        }
    }
    let gf = g.compose(f)?;
    let (a, c) = (f.source().clone(), g.target().clone());
    let field = f.field();
    let mut sys = System::new(ctx, field);
    let x = sys.unknown(&a, &c, -1);
    let eq = sys.equation("dx = −g f", &gf.neg());
    sys.differential_term(eq, field.one(), x);
    let sol = sys.solve()?;
    let particular = sol.particular(x);
    let kernel = (0..sol.kernel_dim()).map(|i| sol.kernel_map(i, x)).collect();
    let obstruction = particular
        .is_none()
        .then(|| ctx.hom(&a, &c, 0).coordinates(gf.map()));
    Ok(LiftSpace {
        a,
        b: f.target().clone(),
        c,
        f: f.clone(),
        g: g.clone(),
        solutions: sol.space.clone(),
        particular,
        kernel,
        obstruction,
    })
}
