use std::collections::BTreeMap;

use super::matrix::Matrix;
use super::scalar::{Field, Scalar};
use crate::error::{Error, Result};

/// Finite-dimensional graded vector space. Only nonzero degrees are stored.
///
/// The flat basis lists degrees in ascending order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GradedSpace {
    dims: BTreeMap<i32, usize>,
}

impl GradedSpace {
    pub fn new(dims: impl IntoIterator<Item = (i32, usize)>) -> GradedSpace {
        let mut out = BTreeMap::new();
        for (d, n) in dims {
            *out.entry(d).or_insert(0) += n;
        }
        out.retain(|_, n| *n > 0);
        GradedSpace { dims: out }
    }

    /// Space whose flat basis has the given degrees (must be sorted).
    pub fn from_degrees(degrees: &[i32]) -> GradedSpace {
        debug_assert!(degrees.windows(2).all(|w| w[0] <= w[1]));
        GradedSpace::new(degrees.iter().map(|&d| (d, 1)))
    }

    pub fn zero() -> GradedSpace {
        GradedSpace::default()
    }

    pub fn dim(&self, d: i32) -> usize {
        self.dims.get(&d).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.dims.values().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn degrees(&self) -> impl Iterator<Item = i32> + '_ {
        self.dims.keys().copied()
    }

    pub fn dims(&self) -> &BTreeMap<i32, usize> {
        &self.dims
    }

    pub fn min_degree(&self) -> Option<i32> {
        self.dims.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i32> {
        self.dims.keys().next_back().copied()
    }

    /// Flat index of the first basis vector in degree `d`.
    pub fn offset(&self, d: i32) -> usize {
        self.dims.range(..d).map(|(_, n)| n).sum()
    }

    /// Degree of each flat basis vector.
    pub fn flat_degrees(&self) -> Vec<i32> {
        self.dims
            .iter()
            .flat_map(|(&d, &n)| std::iter::repeat(d).take(n))
            .collect()
    }

    /// `M[n]`, with `M[n]^p = M^{p+n}`.
    pub fn shift(&self, n: i32) -> GradedSpace {
        GradedSpace {
            dims: self.dims.iter().map(|(&d, &k)| (d - n, k)).collect(),
        }
    }

    /// Direct sum; within a degree the summands appear in the given order.
    pub fn direct_sum(parts: &[GradedSpace]) -> GradedSpace {
        GradedSpace::new(parts.iter().flat_map(|p| p.dims.iter().map(|(&d, &n)| (d, n))))
    }
}

/// A homogeneous linear map stored as one matrix per source degree.
///
/// `blocks[d]` is `dim(target, d + degree) x dim(source, d)` and is present
/// exactly when both dimensions are nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMap {
    field: Field,
    source: GradedSpace,
    target: GradedSpace,
    degree: i32,
    blocks: BTreeMap<i32, Matrix>,
}

impl GradedMap {
    pub fn zero(field: Field, source: &GradedSpace, target: &GradedSpace, degree: i32) -> GradedMap {
        let blocks = source
            .dims
            .iter()
            .filter_map(|(&d, &ns)| {
                let nt = target.dim(d + degree);
                (nt > 0).then(|| (d, Matrix::zeros(field, nt, ns)))
            })
            .collect();
        GradedMap {
            field,
            source: source.clone(),
            target: target.clone(),
            degree,
            blocks,
        }
    }

    pub fn identity(field: Field, space: &GradedSpace) -> GradedMap {
        let mut m = GradedMap::zero(field, space, space, 0);
        for (d, b) in m.blocks.iter_mut() {
            *b = Matrix::identity(field, space.dim(*d));
        }
        m
    }

    /// Builds a map from explicit blocks; missing blocks are zero.
    pub fn from_blocks(
        field: Field,
        source: &GradedSpace,
        target: &GradedSpace,
        degree: i32,
        blocks: impl IntoIterator<Item = (i32, Matrix)>,
    ) -> Result<GradedMap> {
        let mut m = GradedMap::zero(field, source, target, degree);
        for (d, b) in blocks {
            let (nt, ns) = (target.dim(d + degree), source.dim(d));
            if (b.rows(), b.cols()) != (nt, ns) {
                return Err(Error::DimensionMismatch(format!(
                    "block at degree {d} is {}x{}, expected {nt}x{ns}",
                    b.rows(),
                    b.cols()
                )));
            }
            if b.field() != field {
                return Err(Error::FieldMismatch(format!("block at degree {d}")));
            }
            if nt > 0 && ns > 0 {
                m.blocks.insert(d, b);
            }
        }
        Ok(m)
    }

    /// Interprets a flat `total(target) x total(source)` matrix; entries that
    /// do not respect the degree are an error.
    pub fn from_flat(
        source: &GradedSpace,
        target: &GradedSpace,
        degree: i32,
        flat: &Matrix,
    ) -> Result<GradedMap> {
        let field = flat.field();
        if (flat.rows(), flat.cols()) != (target.total(), source.total()) {
            return Err(Error::DimensionMismatch("flat matrix shape".into()));
        }
        let sd = source.flat_degrees();
        let td = target.flat_degrees();
        for r in 0..flat.rows() {
            for c in 0..flat.cols() {
                if !flat.get(r, c).is_zero() && td[r] != sd[c] + degree {
                    return Err(Error::Invalid(format!(
                        "entry ({r},{c}) maps degree {} to degree {}, not homogeneous of degree {degree}",
                        sd[c], td[r]
                    )));
                }
            }
        }
        let mut m = GradedMap::zero(field, source, target, degree);
        for (d, b) in m.blocks.iter_mut() {
            *b = flat.submatrix(target.offset(d + degree), b.rows(), source.offset(*d), b.cols());
        }
        Ok(m)
    }

    pub fn to_flat(&self) -> Matrix {
        let mut flat = Matrix::zeros(self.field, self.target.total(), self.source.total());
        for (d, b) in &self.blocks {
            flat.set_block(self.target.offset(d + self.degree), self.source.offset(*d), b);
        }
        flat
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn source(&self) -> &GradedSpace {
        &self.source
    }

    pub fn target(&self) -> &GradedSpace {
        &self.target
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn blocks(&self) -> &BTreeMap<i32, Matrix> {
        &self.blocks
    }

    pub fn block(&self, d: i32) -> Option<&Matrix> {
        self.blocks.get(&d)
    }

    /// Entry in flat coordinates.
    pub fn entry(&self, r: usize, c: usize) -> Scalar {
        let sd = self.source.flat_degrees()[c];
        match self.blocks.get(&sd) {
            Some(b) => {
                let td = sd + self.degree;
                let tr = r.checked_sub(self.target.offset(td));
                let sc = c - self.source.offset(sd);
                match tr {
                    Some(tr) if tr < b.rows() => b.get(tr, sc).clone(),
                    _ => self.field.zero(),
                }
            }
            None => self.field.zero(),
        }
    }

    pub fn set_block(&mut self, d: i32, b: Matrix) -> Result<()> {
        match self.blocks.get_mut(&d) {
            Some(old) if (old.rows(), old.cols()) == (b.rows(), b.cols()) => {
                *old = b;
                Ok(())
            }
            Some(_) => Err(Error::DimensionMismatch(format!("block at degree {d}"))),
            None if b.rows() == 0 || b.cols() == 0 => Ok(()),
            None => Err(Error::DimensionMismatch(format!("no block at degree {d}"))),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.values().all(Matrix::is_zero)
    }

    /// Number of scalar unknowns in a general map of this shape.
    pub fn raw_len(&self) -> usize {
        self.blocks.values().map(|b| b.rows() * b.cols()).sum()
    }

    /// Entries of all blocks in ascending degree, each block row-major.
    pub fn to_vec(&self) -> Vec<Scalar> {
        self.blocks.values().flat_map(|b| b.entries().iter().cloned()).collect()
    }

    /// Inverse of [`GradedMap::to_vec`] for a map of this shape.
    pub fn with_vec(&self, v: &[Scalar]) -> GradedMap {
        assert_eq!(v.len(), self.raw_len(), "raw vector length");
        let mut out = self.clone();
        let mut pos = 0;
        for b in out.blocks.values_mut() {
            let (r, c) = (b.rows(), b.cols());
            for i in 0..r {
                for j in 0..c {
                    b.set(i, j, v[pos].clone());
                    pos += 1;
                }
            }
        }
        out
    }

    /// Sparse view of `to_vec`: (index, value) of nonzero entries.
    pub fn to_sparse_vec(&self) -> Vec<(usize, Scalar)> {
        let mut out = Vec::new();
        let mut pos = 0;
        for b in self.blocks.values() {
            for s in b.entries() {
                if !s.is_zero() {
                    out.push((pos, s.clone()));
                }
                pos += 1;
            }
        }
        out
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &GradedMap) -> Result<GradedMap> {
        if other.target != self.source {
            return Err(Error::NotComposable(format!(
                "target {:?} of the inner map differs from source {:?} of the outer map",
                other.target.dims, self.source.dims
            )));
        }
        let mut out = GradedMap::zero(self.field, &other.source, &self.target, self.degree + other.degree);
        for (d, b) in out.blocks.iter_mut() {
            if let (Some(inner), Some(outer)) = (other.blocks.get(d), self.blocks.get(&(d + other.degree))) {
                *b = outer.mul(inner)?;
            }
        }
        Ok(out)
    }

    fn check_same_shape(&self, other: &GradedMap) -> Result<()> {
        if self.source != other.source || self.target != other.target || self.degree != other.degree {
            return Err(Error::DimensionMismatch(format!(
                "maps of degree {} and {} between different spaces",
                self.degree, other.degree
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &GradedMap) -> Result<GradedMap> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (d, b) in out.blocks.iter_mut() {
            *b = b.add(&other.blocks[d])?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &GradedMap) -> Result<GradedMap> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (d, b) in out.blocks.iter_mut() {
            *b = b.sub(&other.blocks[d])?;
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Scalar) -> GradedMap {
        let mut out = self.clone();
        for b in out.blocks.values_mut() {
            *b = b.scale(s);
        }
        out
    }

    pub fn neg(&self) -> GradedMap {
        self.scale(&self.field.from_i64(-1))
    }

    /// Multiplies the block at source degree `d` by `sign(d)`.
    pub fn scale_by_degree(&self, sign: impl Fn(i32) -> Scalar) -> GradedMap {
        let mut out = self.clone();
        for (d, b) in out.blocks.iter_mut() {
            *b = b.scale(&sign(*d));
        }
        out
    }

    /// The same matrices viewed between `source[s]` and `target[t]`; the degree
    /// becomes `degree + s - t`.
    pub fn reindex(&self, s: i32, t: i32) -> GradedMap {
        GradedMap {
            field: self.field,
            source: self.source.shift(s),
            target: self.target.shift(t),
            degree: self.degree + s - t,
            blocks: self.blocks.iter().map(|(d, b)| (d - s, b.clone())).collect(),
        }
    }

    /// Applies the map to a flat vector.
    pub fn apply(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        self.to_flat().mul_vec(v)
    }

    pub fn is_invertible(&self) -> bool {
        self.degree == 0
            && self.source == self.target
            && self.blocks.values().all(|b| b.inverse().is_some())
            && self.source.degrees().all(|d| self.blocks.contains_key(&d))
    }

    pub fn inverse(&self) -> Option<GradedMap> {
        if self.degree != 0 || self.source.dims != self.target.dims {
            return None;
        }
        let mut out = GradedMap::zero(self.field, &self.target, &self.source, 0);
        for (d, b) in out.blocks.iter_mut() {
            *b = self.blocks.get(d)?.inverse()?;
        }
        Some(out)
    }
}

/// Block-diagonal assembly of maps between direct sums.
pub struct DirectSum {
    pub space: GradedSpace,
    parts: Vec<GradedSpace>,
}

impl DirectSum {
    pub fn new(parts: Vec<GradedSpace>) -> DirectSum {
        DirectSum {
            space: GradedSpace::direct_sum(&parts),
            parts,
        }
    }

    pub fn parts(&self) -> &[GradedSpace] {
        &self.parts
    }

    fn part_offset(&self, i: usize, d: i32) -> usize {
        self.parts[..i].iter().map(|p| p.dim(d)).sum()
    }

    pub fn inclusion(&self, field: Field, i: usize) -> GradedMap {
        let mut m = GradedMap::zero(field, &self.parts[i], &self.space, 0);
        for (d, b) in m.blocks.iter_mut() {
            let off = self.part_offset(i, *d);
            for k in 0..b.cols() {
                b.set(off + k, k, field.one());
            }
        }
        m
    }

    pub fn projection(&self, field: Field, i: usize) -> GradedMap {
        let mut m = GradedMap::zero(field, &self.space, &self.parts[i], 0);
        for (d, b) in m.blocks.iter_mut() {
            let off = self.part_offset(i, *d);
            for k in 0..b.rows() {
                b.set(k, off + k, field.one());
            }
        }
        m
    }

    /// Assembles `Σ ι_j ∘ f_{ij} ∘ π_i` from components `f_{ij}: part i → other part j`.
    pub fn assemble<'a>(
        field: Field,
        source: &DirectSum,
        target: &DirectSum,
        degree: i32,
        components: impl IntoIterator<Item = ((usize, usize), &'a GradedMap)>,
    ) -> Result<GradedMap> {
        let mut total = GradedMap::zero(field, &source.space, &target.space, degree);
        for ((i, j), f) in components {
            let piece = target
                .inclusion(field, j)
                .compose(f)?
                .compose(&source.projection(field, i))?;
            total = total.add(&piece)?;
        }
        Ok(total)
    }

    /// Component `part i → other part j` of a total map.
    pub fn component(
        field: Field,
        source: &DirectSum,
        target: &DirectSum,
        total: &GradedMap,
        (i, j): (usize, usize),
    ) -> Result<GradedMap> {
        target
            .projection(field, j)
            .compose(total)?
            .compose(&source.inclusion(field, i))
    }
}
