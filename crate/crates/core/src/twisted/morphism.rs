use std::collections::BTreeMap;
use std::sync::Arc;

use super::complex::TwistedComplex;
use crate::dgalg::BimoduleMap;
use crate::error::{Error, Result};
use crate::exactalg::{DirectSum, GradedMap};

/// A morphism of twisted complexes of degree `k`.
///
/// The component `a → b` is the raw block of the total map: a bimodule map
/// `E_a → E'_b` of degree `k + p_a − p'_b`.
#[derive(Clone, Debug)]
pub struct TwistedMorphism {
    source: Arc<TwistedComplex>,
    target: Arc<TwistedComplex>,
    degree: i32,
    components: BTreeMap<(usize, usize), BimoduleMap>,
}

impl TwistedMorphism {
    pub fn zero(source: &Arc<TwistedComplex>, target: &Arc<TwistedComplex>, degree: i32) -> TwistedMorphism {
        TwistedMorphism {
            source: source.clone(),
            target: target.clone(),
            degree,
            components: BTreeMap::new(),
        }
    }

    pub fn identity(t: &Arc<TwistedComplex>) -> TwistedMorphism {
        let mut out = TwistedMorphism::zero(t, t, 0);
        for a in 0..t.len() {
            out.components.insert((a, a), BimoduleMap::identity(t.module(a)));
        }
        out
    }

    pub fn with_component(mut self, a: usize, b: usize, map: BimoduleMap) -> Result<TwistedMorphism> {
        self.set_component(a, b, map)?;
        Ok(self)
    }

    pub fn set_component(&mut self, a: usize, b: usize, map: BimoduleMap) -> Result<()> {
        if a >= self.source.len() || b >= self.target.len() {
            return Err(Error::Invalid(format!("no component ({a}, {b})")));
        }
        let expected = self.degree + self.source.position(a) - self.target.position(b);
        if map.degree() != expected {
            return Err(Error::Invalid(format!(
                "component ({a}, {b}) has degree {}, expected {expected}",
                map.degree()
            )));
        }
        let map = map.retarget(self.source.module(a), self.target.module(b))?;
        if map.is_zero() {
            self.components.remove(&(a, b));
        } else {
            self.components.insert((a, b), map);
        }
        Ok(())
    }

    pub fn source(&self) -> &Arc<TwistedComplex> {
        &self.source
    }

    pub fn target(&self) -> &Arc<TwistedComplex> {
        &self.target
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn component(&self, a: usize, b: usize) -> BimoduleMap {
        self.components.get(&(a, b)).cloned().unwrap_or_else(|| {
            BimoduleMap::zero(
                self.source.module(a),
                self.target.module(b),
                self.degree + self.source.position(a) - self.target.position(b),
            )
        })
    }

    pub fn components(&self) -> impl Iterator<Item = (&(usize, usize), &BimoduleMap)> {
        self.components.iter()
    }

    /// The map of convolutions.
    pub fn total(&self) -> Result<BimoduleMap> {
        let f = self.source.field();
        let (ls, lt) = (self.source.layout(), self.target.layout());
        let blocks: Vec<((usize, usize), GradedMap)> = self
            .components
            .iter()
            .map(|(&(a, b), m)| {
                (
                    (a, b),
                    m.map().reindex(-self.source.position(a), -self.target.position(b)),
                )
            })
            .collect();
        let total = DirectSum::assemble(f, &ls, &lt, self.degree, blocks.iter().map(|(k, m)| (*k, m)))?;
        BimoduleMap::new(self.source.convolve()?, self.target.convolve()?, total)
    }

    /// Splits a map of convolutions into its components.
    pub fn from_total(
        source: &Arc<TwistedComplex>,
        target: &Arc<TwistedComplex>,
        total: &BimoduleMap,
    ) -> Result<TwistedMorphism> {
        let f = source.field();
        let (ls, lt) = (source.layout(), target.layout());
        let mut out = TwistedMorphism::zero(source, target, total.degree());
        for a in 0..source.len() {
            for b in 0..target.len() {
                let block = DirectSum::component(f, &ls, &lt, total.map(), (a, b))?
                    .reindex(source.position(a), target.position(b));
                if block.is_zero() {
                    continue;
                }
                let m = BimoduleMap::new(source.module(a).clone(), target.module(b).clone(), block)?;
                out.components.insert((a, b), m);
            }
        }
        Ok(out)
    }

    pub fn differential(&self) -> Result<TwistedMorphism> {
        TwistedMorphism::from_total(&self.source, &self.target, &self.total()?.differential())
    }

    pub fn is_closed(&self) -> Result<bool> {
        Ok(self.total()?.is_closed())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &TwistedMorphism) -> Result<TwistedMorphism> {
        let total = self.total()?.compose(&other.total()?)?;
        TwistedMorphism::from_total(&other.source, &self.target, &total)
    }
}
