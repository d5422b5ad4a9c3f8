use std::sync::Arc;

use super::bimodule::{same_algebra, Bimodule};
use crate::error::{Error, Result};
use crate::exactalg::{Field, GradedMap, Scalar};

/// A graded map between bimodules. Equivariance is checked on demand.
///
/// Degree-`k` maps satisfy `f(a·m) = (-1)^{k|a|} a·f(m)` and `f(m·b) = f(m)·b`.
#[derive(Clone, Debug, PartialEq)]
pub struct BimoduleMap {
    source: Arc<Bimodule>,
    target: Arc<Bimodule>,
    map: GradedMap,
}

impl BimoduleMap {
    pub fn new(source: Arc<Bimodule>, target: Arc<Bimodule>, map: GradedMap) -> Result<BimoduleMap> {
        if map.source() != source.space() || map.target() != target.space() {
            return Err(Error::DimensionMismatch(format!(
                "graded map does not fit {} → {}",
                source.name(),
                target.name()
            )));
        }
        if !same_algebra(source.left(), target.left()) || !same_algebra(source.right(), target.right()) {
            return Err(Error::Invalid(format!(
                "{} and {} are bimodules over different algebras",
                source.name(),
                target.name()
            )));
        }
        Ok(BimoduleMap { source, target, map })
    }

    pub fn zero(source: &Arc<Bimodule>, target: &Arc<Bimodule>, degree: i32) -> BimoduleMap {
        let map = GradedMap::zero(source.field(), source.space(), target.space(), degree);
        BimoduleMap {
            source: source.clone(),
            target: target.clone(),
            map,
        }
    }

    pub fn identity(m: &Arc<Bimodule>) -> BimoduleMap {
        BimoduleMap {
            source: m.clone(),
            target: m.clone(),
            map: GradedMap::identity(m.field(), m.space()),
        }
    }

    pub fn source(&self) -> &Arc<Bimodule> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Bimodule> {
        &self.target
    }

    pub fn map(&self) -> &GradedMap {
        &self.map
    }

    pub fn degree(&self) -> i32 {
        self.map.degree()
    }

    pub fn field(&self) -> Field {
        self.map.field()
    }

    pub fn is_zero(&self) -> bool {
        self.map.is_zero()
    }

    /// Same underlying matrices, reattached to other (isomorphic-by-basis) endpoints.
    pub fn retarget(&self, source: &Arc<Bimodule>, target: &Arc<Bimodule>) -> Result<BimoduleMap> {
        BimoduleMap::new(source.clone(), target.clone(), self.map.clone())
    }

    fn with_map(&self, map: GradedMap) -> BimoduleMap {
        BimoduleMap {
            source: self.source.clone(),
            target: self.target.clone(),
            map,
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &BimoduleMap) -> Result<BimoduleMap> {
        if !Arc::ptr_eq(&other.target, &self.source) && *other.target != *self.source {
            return Err(Error::NotComposable(format!(
                "{} → {} after {} → {}",
                self.source.name(),
                self.target.name(),
                other.source.name(),
                other.target.name()
            )));
        }
        Ok(BimoduleMap {
            source: other.source.clone(),
            target: self.target.clone(),
            map: self.map.compose(&other.map)?,
        })
    }

    fn check_parallel(&self, other: &BimoduleMap) -> Result<()> {
        let same = |a: &Arc<Bimodule>, b: &Arc<Bimodule>| Arc::ptr_eq(a, b) || **a == **b;
        if !same(&self.source, &other.source) || !same(&self.target, &other.target) {
            return Err(Error::DimensionMismatch(format!(
                "maps {} → {} and {} → {} are not parallel",
                self.source.name(),
                self.target.name(),
                other.source.name(),
                other.target.name()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &BimoduleMap) -> Result<BimoduleMap> {
        self.check_parallel(other)?;
        Ok(self.with_map(self.map.add(&other.map)?))
    }

    pub fn sub(&self, other: &BimoduleMap) -> Result<BimoduleMap> {
        self.check_parallel(other)?;
        Ok(self.with_map(self.map.sub(&other.map)?))
    }

    pub fn scale(&self, s: &Scalar) -> BimoduleMap {
        self.with_map(self.map.scale(s))
    }

    pub fn neg(&self) -> BimoduleMap {
        self.with_map(self.map.neg())
    }

    /// Hom differential `d_N ∘ f − (−1)^{|f|} f ∘ d_M`.
    pub fn differential(&self) -> BimoduleMap {
        self.with_map(hom_differential(
            self.source.differential(),
            self.target.differential(),
            &self.map,
        ))
    }

    pub fn is_closed(&self) -> bool {
        self.differential().is_zero()
    }

    /// `None` if the map is equivariant, else the first offending generator.
    pub fn equivariance_defect(&self) -> Option<String> {
        let f = self.field();
        let k = self.degree();
        for (i, b) in self.source.left().basis().iter().enumerate() {
            let lhs = self.map.compose(&self.source.left_action()[i]).unwrap();
            let rhs = self.target.left_action()[i]
                .compose(&self.map)
                .unwrap()
                .scale(&f.sign((k * b.degree) as i64));
            if lhs != rhs {
                return Some(format!("left action of `{}`", b.name));
            }
        }
        for (i, b) in self.source.right().basis().iter().enumerate() {
            let lhs = self.map.compose(&self.source.right_action()[i]).unwrap();
            let rhs = self.target.right_action()[i].compose(&self.map).unwrap();
            if lhs != rhs {
                return Some(format!("right action of `{}`", b.name));
            }
        }
        None
    }

    pub fn is_equivariant(&self) -> bool {
        self.equivariance_defect().is_none()
    }

    /// `f[n]: M[n] → N[n]`, equal to `(−1)^{nk} f` on underlying vectors.
    pub fn shift(&self, n: i32, source: &Arc<Bimodule>, target: &Arc<Bimodule>) -> Result<BimoduleMap> {
        let f = self.field();
        let map = self.map.reindex(n, n).scale(&f.sign((n * self.degree()) as i64));
        BimoduleMap::new(source.clone(), target.clone(), map)
    }
}

pub fn hom_differential(d_source: &GradedMap, d_target: &GradedMap, f: &GradedMap) -> GradedMap {
    let field = f.field();
    let a = d_target.compose(f).expect("target differential");
    let b = f.compose(d_source).expect("source differential");
    a.sub(&b.scale(&field.sign(f.degree() as i64))).expect("same shape")
}
