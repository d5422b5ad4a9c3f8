//! Exact scalars, graded spaces and linear solving.

mod elim;
mod graded;
mod matrix;
mod scalar;

pub use elim::{rref_dense, rref_sparse, Row, Rref};
pub use graded::{DirectSum, GradedMap, GradedSpace};
pub use matrix::{kernel_from_rref, Matrix};
pub use scalar::{Field, Scalar};

use crate::error::{Error, Result};

/// Systems with more than `sparse_threshold` matrix entries are eliminated
/// on sparse rows. The result does not depend on the path taken.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    pub sparse_threshold: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            sparse_threshold: 4096,
        }
    }
}

/// Sparse matrix as a list of rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    pub field: Field,
    pub cols: usize,
    pub rows: Vec<Row>,
}

impl SparseMatrix {
    pub fn new(field: Field, cols: usize) -> SparseMatrix {
        SparseMatrix {
            field,
            cols,
            rows: Vec::new(),
        }
    }

    pub fn from_dense(m: &Matrix) -> SparseMatrix {
        SparseMatrix {
            field: m.field(),
            cols: m.cols(),
            rows: m.to_sparse_rows(),
        }
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.field, self.rows.len(), self.cols);
        for (r, row) in self.rows.iter().enumerate() {
            for (c, v) in row {
                m.set(r, *c, v.clone());
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        self.rows
            .iter()
            .map(|row| {
                let mut acc = self.field.zero();
                for (c, a) in row {
                    acc.add_mul(a, &v[*c]);
                }
                acc
            })
            .collect()
    }
}

/// Solution set `particular + span(kernel_basis)` of a linear system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSolutionSpace {
    pub field: Field,
    pub unknowns: usize,
    pub particular: Option<Vec<Scalar>>,
    pub kernel_basis: Vec<Vec<Scalar>>,
}

impl AffineSolutionSpace {
    pub fn is_empty(&self) -> bool {
        self.particular.is_none()
    }

    pub fn dimension(&self) -> Option<usize> {
        self.particular.as_ref().map(|_| self.kernel_basis.len())
    }

    /// Number of points over a prime field, if it fits.
    pub fn count(&self) -> Option<u128> {
        let p = self.field.size()? as u128;
        match self.dimension() {
            None => Some(0),
            Some(d) => p.checked_pow(d as u32),
        }
    }

    /// `particular + Σ coeffs[i] * kernel_basis[i]`.
    pub fn point(&self, coeffs: &[Scalar]) -> Option<Vec<Scalar>> {
        let mut v = self.particular.clone()?;
        assert_eq!(coeffs.len(), self.kernel_basis.len(), "coefficient count");
        for (c, k) in coeffs.iter().zip(&self.kernel_basis) {
            if c.is_zero() {
                continue;
            }
            for (x, y) in v.iter_mut().zip(k) {
                x.add_mul(c, y);
            }
        }
        Some(v)
    }

    /// Coefficient vector of the `index`-th point in base-`p` order.
    pub fn coefficients_of(&self, mut index: u128) -> Option<Vec<Scalar>> {
        let p = self.field.size()? as u128;
        Some(
            (0..self.kernel_basis.len())
                .map(|_| {
                    let digit = (index % p) as i64;
                    index /= p;
                    self.field.from_i64(digit)
                })
                .collect(),
        )
    }
}

fn solution_from_rref(field: Field, unknowns: usize, rref: &Rref) -> AffineSolutionSpace {
    let consistent = !rref.pivots.contains(&unknowns);
    let mut kernel_rref = Rref {
        cols: unknowns,
        pivots: Vec::new(),
        rows: Vec::new(),
    };
    let mut particular = vec![field.zero(); unknowns];
    for (row, &p) in rref.rows.iter().zip(&rref.pivots) {
        if p == unknowns {
            continue;
        }
        let mut coeffs = Vec::with_capacity(row.len());
        for (c, v) in row {
            if *c == unknowns {
                particular[p] = v.clone();
            } else {
                coeffs.push((*c, v.clone()));
            }
        }
        kernel_rref.pivots.push(p);
        kernel_rref.rows.push(coeffs);
    }
    AffineSolutionSpace {
        field,
        unknowns,
        particular: consistent.then_some(particular),
        kernel_basis: kernel_from_rref(field, &kernel_rref),
    }
}

pub fn solve_affine(a: &Matrix, b: &[Scalar]) -> Result<AffineSolutionSpace> {
    solve_affine_with(&SolverConfig::default(), a, b)
}

pub fn solve_affine_with(config: &SolverConfig, a: &Matrix, b: &[Scalar]) -> Result<AffineSolutionSpace> {
    if a.rows() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} equations but right-hand side has {} entries",
            a.rows(),
            b.len()
        )));
    }
    if a.rows() * (a.cols() + 1) > config.sparse_threshold {
        return solve_sparse(&SparseMatrix::from_dense(a), b);
    }
    let mut aug = Matrix::zeros(a.field(), a.rows(), a.cols() + 1);
    aug.set_block(0, 0, a);
    for (r, v) in b.iter().enumerate() {
        aug.set(r, a.cols(), v.clone());
    }
    Ok(solution_from_rref(a.field(), a.cols(), &aug.rref()))
}

/// Sparse elimination path; always used for systems built from map equations.
pub fn solve_sparse(a: &SparseMatrix, b: &[Scalar]) -> Result<AffineSolutionSpace> {
    if a.rows.len() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} equations but right-hand side has {} entries",
            a.rows.len(),
            b.len()
        )));
    }
    let rows: Vec<Row> = a
        .rows
        .iter()
        .zip(b)
        .map(|(row, v)| {
            let mut r = row.clone();
            if !v.is_zero() {
                r.push((a.cols, v.clone()));
            }
            r
        })
        .collect();
    let rref = elim::rref_sparse(a.field, a.cols + 1, &rows);
    Ok(solution_from_rref(a.field, a.cols, &rref))
}

/// Cohomology of `S --d_in--> M --d_out--> T` at one degree of `M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cohomology {
    pub degree: i32,
    pub dimension: usize,
    /// Cocycles in `M^degree` whose classes form a basis.
    pub representatives: Vec<Vec<Scalar>>,
}

pub fn cohomology_at(d_in: &GradedMap, d_out: &GradedMap, degree: i32) -> Result<Cohomology> {
    if d_in.target() != d_out.source() {
        return Err(Error::NotComposable("d_in lands outside the source of d_out".into()));
    }
    if d_in.degree() != 1 || d_out.degree() != 1 {
        return Err(Error::Invalid("differentials must have degree 1".into()));
    }
    let field = d_in.field();
    let comp = d_out.compose(d_in)?;
    if comp.block(degree - 1).is_some_and(|b| !b.is_zero()) {
        return Err(Error::NotComposable(format!("d_out ∘ d_in is nonzero into degree {degree}")));
    }
    let n = d_out.source().dim(degree);
    let kernel = match d_out.block(degree) {
        Some(b) => b.kernel_basis(),
        None => (0..n)
            .map(|i| (0..n).map(|j| if i == j { field.one() } else { field.zero() }).collect())
            .collect(),
    };
    let image: Vec<Vec<Scalar>> = match d_in.block(degree - 1) {
        Some(b) => (0..b.cols()).map(|c| b.column(c)).collect(),
        None => Vec::new(),
    };
    // Columns [image | kernel]; kernel columns that become pivots are new classes.
    let mut m = Matrix::zeros(field, n, image.len() + kernel.len());
    for (c, v) in image.iter().chain(&kernel).enumerate() {
        for (r, s) in v.iter().enumerate() {
            m.set(r, c, s.clone());
        }
    }
    let rref = m.rref();
    let representatives: Vec<Vec<Scalar>> = rref
        .pivots
        .iter()
        .filter(|&&p| p >= image.len())
        .map(|&p| kernel[p - image.len()].clone())
        .collect();
    Ok(Cohomology {
        degree,
        dimension: representatives.len(),
        representatives,
    })
}
