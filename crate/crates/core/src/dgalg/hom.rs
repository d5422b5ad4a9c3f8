use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::bimodule::Bimodule;
use super::map::{hom_differential, BimoduleMap};
use crate::error::{Error, Result};
use crate::exactalg::{self, cohomology_at, Cohomology, Field, GradedMap, GradedSpace, Matrix, Row, Scalar};

/// Degree-`k` bimodule maps `source → target`, with the standard kernel basis
/// of the equivariance constraints. Coordinates of an equivariant map are its
/// raw entries at the free columns.
#[derive(Debug)]
pub struct HomSpace {
    source: Arc<Bimodule>,
    target: Arc<Bimodule>,
    degree: i32,
    template: GradedMap,
    basis: Vec<GradedMap>,
    free: Vec<usize>,
}

struct RawIndex {
    source_deg: Vec<i32>,
    target_deg: Vec<i32>,
    block_offset: BTreeMap<i32, usize>,
    s_off: BTreeMap<i32, usize>,
    t_off: BTreeMap<i32, usize>,
    degree: i32,
    target_space: GradedSpace,
    source_space: GradedSpace,
}

impl RawIndex {
    fn new(template: &GradedMap) -> RawIndex {
        let mut block_offset = BTreeMap::new();
        let mut acc = 0;
        for (d, b) in template.blocks() {
            block_offset.insert(*d, acc);
            acc += b.rows() * b.cols();
        }
        let s = template.source();
        let t = template.target();
        RawIndex {
            source_deg: s.flat_degrees(),
            target_deg: t.flat_degrees(),
            block_offset,
            s_off: s.degrees().map(|d| (d, s.offset(d))).collect(),
            t_off: t.degrees().map(|d| (d, t.offset(d))).collect(),
            degree: template.degree(),
            target_space: t.clone(),
            source_space: s.clone(),
        }
    }

    /// Raw index of flat entry `(r, c)`, if that entry is allowed by the degree.
    fn index(&self, r: usize, c: usize) -> Option<usize> {
        let dc = self.source_deg[c];
        if self.target_deg[r] != dc + self.degree {
            return None;
        }
        let ns = self.source_space.dim(dc);
        let rr = r - self.t_off[&(dc + self.degree)];
        let cc = c - self.s_off[&dc];
        Some(self.block_offset[&dc] + rr * ns + cc)
    }

    fn rows_in_degree(&self, d: i32) -> std::ops::Range<usize> {
        let off = self.target_space.offset(d);
        off..off + self.target_space.dim(d)
    }

    fn cols_in_degree(&self, d: i32) -> std::ops::Range<usize> {
        let off = self.source_space.offset(d);
        off..off + self.source_space.dim(d)
    }
}

/// Linear constraints `F·A_s − ε·A_t·F = 0` for each acting generator.
fn equivariance_rows(source: &Bimodule, target: &Bimodule, template: &GradedMap) -> Vec<Row> {
    let f = source.field();
    let k = template.degree();
    let idx = RawIndex::new(template);
    let mut rows: Vec<Row> = Vec::new();
    let identity_s = GradedMap::identity(f, source.space());
    let identity_t = GradedMap::identity(f, target.space());
    let pairs = [
        (source.left(), source.left_action(), target.left_action(), true),
        (source.right(), source.right_action(), target.right_action(), false),
    ];
    for (alg, acts_s, acts_t, is_left) in pairs {
        for (i, b) in alg.basis().iter().enumerate() {
            let (ls, lt) = (&acts_s[i], &acts_t[i]);
            if b.degree == 0 && *ls == identity_s && *lt == identity_t {
                continue;
            }
            let eps = if is_left { f.sign((k * b.degree) as i64) } else { f.one() };
            let ls_flat = ls.to_flat();
            let lt_flat = lt.to_flat();
            let mut acc: HashMap<(usize, usize), BTreeMap<usize, Scalar>> = HashMap::new();
            // (F L_s)[r, c] = Σ_m F[r, m] L_s[m, c]
            for m in 0..ls_flat.rows() {
                for c in 0..ls_flat.cols() {
                    let v = ls_flat.get(m, c);
                    if v.is_zero() {
                        continue;
                    }
                    let dm = idx.source_deg[m];
                    for r in idx.rows_in_degree(dm + k) {
                        let u = idx.index(r, m).unwrap();
                        let e = acc.entry((r, c)).or_default().entry(u).or_insert_with(|| f.zero());
                        *e = &*e + v;
                    }
                }
            }
            // − ε (L_t F)[r, c] = − ε Σ_m L_t[r, m] F[m, c]
            for r in 0..lt_flat.rows() {
                for m in 0..lt_flat.cols() {
                    let v = lt_flat.get(r, m);
                    if v.is_zero() {
                        continue;
                    }
                    let coeff = (&eps * v).neg();
                    let dm = idx.target_deg[m];
                    for c in idx.cols_in_degree(dm - k) {
                        let u = idx.index(m, c).unwrap();
                        let e = acc.entry((r, c)).or_default().entry(u).or_insert_with(|| f.zero());
                        *e = &*e + &coeff;
                    }
                }
            }
            let mut keys: Vec<_> = acc.keys().copied().collect();
            keys.sort_unstable();
            for key in keys {
                let row: Row = acc[&key]
                    .iter()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(c, v)| (*c, v.clone()))
                    .collect();
                if !row.is_empty() {
                    rows.push(row);
                }
            }
        }
    }
    rows
}

impl HomSpace {
    pub fn compute(source: &Arc<Bimodule>, target: &Arc<Bimodule>, degree: i32) -> HomSpace {
        let f = source.field();
        let template = GradedMap::zero(f, source.space(), target.space(), degree);
        let n = template.raw_len();
        let rows = equivariance_rows(source, target, &template);
        let b = vec![f.zero(); rows.len()];
        let kernel = exactalg::solve_sparse(&exactalg::SparseMatrix { field: f, cols: n, rows }, &b)
            .expect("shape")
            .kernel_basis;
        let free = kernel
            .iter()
            .map(|v| v.iter().position(|s| s.is_one()).expect("standard kernel vector"))
            .collect();
        let basis = kernel.iter().map(|v| template.with_vec(v)).collect();
        HomSpace {
            source: source.clone(),
            target: target.clone(),
            degree,
            template,
            basis,
            free,
        }
    }

    pub fn source(&self) -> &Arc<Bimodule> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Bimodule> {
        &self.target
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[GradedMap] {
        &self.basis
    }

    pub fn template(&self) -> &GradedMap {
        &self.template
    }

    /// Coordinates of an equivariant map of this shape.
    pub fn coordinates(&self, f: &GradedMap) -> Vec<Scalar> {
        let raw = f.to_vec();
        self.free.iter().map(|&i| raw[i].clone()).collect()
    }

    pub fn from_coordinates(&self, c: &[Scalar]) -> GradedMap {
        assert_eq!(c.len(), self.dim(), "coordinate count");
        let mut raw = vec![self.source.field().zero(); self.template.raw_len()];
        for (coef, b) in c.iter().zip(&self.basis) {
            if coef.is_zero() {
                continue;
            }
            for (pos, v) in b.to_sparse_vec() {
                raw[pos].add_mul(coef, &v);
            }
        }
        self.template.with_vec(&raw)
    }

    pub fn to_map(&self, c: &[Scalar]) -> BimoduleMap {
        BimoduleMap::new(self.source.clone(), self.target.clone(), self.from_coordinates(c)).expect("shape")
    }

    /// True if `f` lies in this space (checked through its coordinates).
    pub fn contains(&self, f: &GradedMap) -> bool {
        f.degree() == self.degree
            && f.source() == self.template.source()
            && f.target() == self.template.target()
            && self.from_coordinates(&self.coordinates(f)) == *f
    }
}

/// `Hom^•(source, target)` in coordinates: one graded piece per degree.
pub struct HomComplex {
    pub spaces: BTreeMap<i32, Arc<HomSpace>>,
    /// Degree-1 map on the coordinate spaces.
    pub differential: GradedMap,
    pub coordinates: GradedSpace,
}

impl HomComplex {
    pub fn cohomology(&self, degree: i32) -> Result<Cohomology> {
        cohomology_at(&self.differential, &self.differential, degree)
    }

    pub fn dim(&self, degree: i32) -> usize {
        self.coordinates.dim(degree)
    }
}

/// Degrees where `Hom^k` can be nonzero.
pub fn hom_degree_range(source: &Bimodule, target: &Bimodule) -> Option<std::ops::RangeInclusive<i32>> {
    let (smin, smax) = (source.space().min_degree()?, source.space().max_degree()?);
    let (tmin, tmax) = (target.space().min_degree()?, target.space().max_degree()?);
    Some((tmin - smax)..=(tmax - smin))
}

pub fn assemble_hom_complex(
    field: Field,
    spaces: BTreeMap<i32, Arc<HomSpace>>,
) -> Result<HomComplex> {
    let coordinates = GradedSpace::new(spaces.iter().map(|(k, h)| (*k, h.dim())));
    let mut blocks = Vec::new();
    for (k, h) in &spaces {
        let Some(next) = spaces.get(&(k + 1)) else { continue };
        if h.dim() == 0 || next.dim() == 0 {
            continue;
        }
        let d_s = h.source().differential();
        let d_t = h.target().differential();
        let mut m = Matrix::zeros(field, next.dim(), h.dim());
        for (c, b) in h.basis().iter().enumerate() {
            let db = hom_differential(d_s, d_t, b);
            for (r, v) in next.coordinates(&db).into_iter().enumerate() {
                m.set(r, c, v);
            }
        }
        blocks.push((*k, m));
    }
    let differential = GradedMap::from_blocks(field, &coordinates, &coordinates, 1, blocks)
        .map_err(|e| Error::Invalid(format!("hom complex: {e}")))?;
    Ok(HomComplex {
        spaces,
        differential,
        coordinates,
    })
}
