use std::collections::BTreeMap;
use std::sync::Arc;

use super::bimodule::Bimodule;
use super::ctx::Ctx;
use super::hom::HomSpace;
use super::map::BimoduleMap;
use crate::error::{Error, Result};
use crate::exactalg::{self, AffineSolutionSpace, Field, GradedMap, Row, Scalar, SparseMatrix};

/// Handle for an unknown bimodule map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Unknown(usize);

/// Handle for an equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Equation(usize);

struct Term {
    coeff: Scalar,
    left: Option<GradedMap>,
    unknown: usize,
    right: Option<GradedMap>,
}

struct Eq {
    label: String,
    rhs: GradedMap,
    terms: Vec<Term>,
}

/// Linear equations `Σ c · L ∘ u ∘ R = rhs` in unknown bimodule maps `u`,
/// solved in Hom-basis coordinates.
pub struct System<'c> {
    ctx: &'c Ctx,
    field: Field,
    unknowns: Vec<Arc<HomSpace>>,
    equations: Vec<Eq>,
}

impl<'c> System<'c> {
    pub fn new(ctx: &'c Ctx, field: Field) -> System<'c> {
        System {
            ctx,
            field,
            unknowns: Vec::new(),
            equations: Vec::new(),
        }
    }

    pub fn unknown(&mut self, source: &Arc<Bimodule>, target: &Arc<Bimodule>, degree: i32) -> Unknown {
        self.unknowns.push(self.ctx.hom(source, target, degree));
        Unknown(self.unknowns.len() - 1)
    }

    pub fn hom_space(&self, u: Unknown) -> &Arc<HomSpace> {
        &self.unknowns[u.0]
    }

    /// New equation whose value must equal `rhs`.
    pub fn equation(&mut self, label: impl Into<String>, rhs: &BimoduleMap) -> Equation {
        self.equations.push(Eq {
            label: label.into(),
            rhs: rhs.map().clone(),
            terms: Vec::new(),
        });
        Equation(self.equations.len() - 1)
    }

    /// Adds `coeff · left ∘ u ∘ right`; `None` stands for an identity.
    pub fn term(
        &mut self,
        eq: Equation,
        coeff: Scalar,
        left: Option<&BimoduleMap>,
        u: Unknown,
        right: Option<&BimoduleMap>,
    ) -> &mut Self {
        self.equations[eq.0].terms.push(Term {
            coeff,
            left: left.map(|m| m.map().clone()),
            unknown: u.0,
            right: right.map(|m| m.map().clone()),
        });
        self
    }

    /// Adds `coeff · d(u)`.
    pub fn differential_term(&mut self, eq: Equation, coeff: Scalar, u: Unknown) -> &mut Self {
        let h = self.unknowns[u.0].clone();
        let sign = self.field.sign(h.degree() as i64);
        let e = &mut self.equations[eq.0];
        e.terms.push(Term {
            coeff: coeff.clone(),
            left: Some(h.target().differential().clone()),
            unknown: u.0,
            right: None,
        });
        e.terms.push(Term {
            coeff: (&coeff * &sign).neg(),
            left: None,
            unknown: u.0,
            right: Some(h.source().differential().clone()),
        });
        self
    }

    fn evaluate(&self, term: &Term, value: &GradedMap) -> Result<GradedMap> {
        let mut v = value.clone();
        if let Some(r) = &term.right {
            v = v.compose(r)?;
        }
        if let Some(l) = &term.left {
            v = l.compose(&v)?;
        }
        Ok(v.scale(&term.coeff))
    }

    pub fn solve(&self) -> Result<Solution> {
        let f = self.field;
        let mut col_offset = Vec::with_capacity(self.unknowns.len());
        let mut ncols = 0;
        for h in &self.unknowns {
            col_offset.push(ncols);
            ncols += h.dim();
        }
        let mut row_offset = Vec::with_capacity(self.equations.len());
        let mut nrows = 0;
        for e in &self.equations {
            row_offset.push(nrows);
            nrows += e.rhs.raw_len();
        }
        let mut rows: Vec<BTreeMap<usize, Scalar>> = vec![BTreeMap::new(); nrows];
        for (ei, e) in self.equations.iter().enumerate() {
            for (ui, h) in self.unknowns.iter().enumerate() {
                let terms: Vec<&Term> = e.terms.iter().filter(|t| t.unknown == ui).collect();
                if terms.is_empty() {
                    continue;
                }
                for (bi, b) in h.basis().iter().enumerate() {
                    let mut total: Option<GradedMap> = None;
                    for t in &terms {
                        let v = self.evaluate(t, b).map_err(|err| {
                            Error::NotComposable(format!("equation `{}`: {err}", e.label))
                        })?;
                        total = Some(match total {
                            None => v,
                            Some(acc) => acc.add(&v).map_err(|err| {
                                Error::DimensionMismatch(format!("equation `{}`: {err}", e.label))
                            })?,
                        });
                    }
                    let total = total.unwrap();
                    if total.source() != e.rhs.source()
                        || total.target() != e.rhs.target()
                        || total.degree() != e.rhs.degree()
                    {
                        return Err(Error::DimensionMismatch(format!(
                            "equation `{}`: term of degree {} against right-hand side of degree {}",
                            e.label,
                            total.degree(),
                            e.rhs.degree()
                        )));
                    }
                    for (pos, v) in total.to_sparse_vec() {
                        let entry = rows[row_offset[ei] + pos]
                            .entry(col_offset[ui] + bi)
                            .or_insert_with(|| f.zero());
                        *entry = &*entry + &v;
                    }
                }
            }
        }
        let rows: Vec<Row> = rows
            .into_iter()
            .map(|r| r.into_iter().filter(|(_, v)| !v.is_zero()).collect())
            .collect();
        let rhs: Vec<Scalar> = self.equations.iter().flat_map(|e| e.rhs.to_vec()).collect();
        let space = exactalg::solve_sparse(&SparseMatrix { field: f, cols: ncols, rows }, &rhs)?;
        Ok(Solution {
            space,
            unknowns: self.unknowns.clone(),
            offsets: col_offset,
        })
    }
}

/// Solution set of a [`System`], decoded back into maps.
pub struct Solution {
    pub space: AffineSolutionSpace,
    unknowns: Vec<Arc<HomSpace>>,
    offsets: Vec<usize>,
}

impl Solution {
    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    pub fn kernel_dim(&self) -> usize {
        self.space.kernel_basis.len()
    }

    pub fn decode(&self, coords: &[Scalar], u: Unknown) -> BimoduleMap {
        let h = &self.unknowns[u.0];
        let off = self.offsets[u.0];
        h.to_map(&coords[off..off + h.dim()])
    }

    pub fn particular(&self, u: Unknown) -> Option<BimoduleMap> {
        self.space.particular.as_ref().map(|p| self.decode(p, u))
    }

    /// Value of `u` on the `i`-th kernel direction.
    pub fn kernel_map(&self, i: usize, u: Unknown) -> BimoduleMap {
        self.decode(&self.space.kernel_basis[i], u)
    }

    pub fn point(&self, coeffs: &[Scalar], u: Unknown) -> Option<BimoduleMap> {
        self.space.point(coeffs).map(|p| self.decode(&p, u))
    }
}
