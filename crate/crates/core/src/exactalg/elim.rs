//! Gauss–Jordan kernels. Both paths pivot on the leftmost nonzero column and
//! return the (unique) reduced row echelon form, so they agree entry for entry.

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::scalar::{Field, Scalar};

/// Sparse row: strictly increasing column indices, nonzero values.
pub type Row = Vec<(usize, Scalar)>;

/// Reduced row echelon form: nonzero rows only, `rows[r]` has its leading 1 at `pivots[r]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub cols: usize,
    pub pivots: Vec<usize>,
    pub rows: Vec<Row>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.cols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.cols).filter(|&c| !is_pivot[c]).collect()
    }
}

trait Arith {
    type E: Clone;
    fn zero(&self) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn sub_mul(&self, acc: &Self::E, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn inv(&self, a: &Self::E) -> Self::E;
    fn lift(&self, s: &Scalar) -> Self::E;
    fn lower(&self, e: &Self::E) -> Scalar;
}

struct Modp(u64);

impl Arith for Modp {
    type E = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn sub_mul(&self, acc: &u64, a: &u64, b: &u64) -> u64 {
        let p = self.0;
        (acc + p - a * b % p) % p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.0
    }
    fn inv(&self, a: &u64) -> u64 {
        let (mut base, mut exp, mut acc) = (*a, self.0 - 2, 1u64);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % self.0;
            }
            base = base * base % self.0;
            exp >>= 1;
        }
        acc
    }
    fn lift(&self, s: &Scalar) -> u64 {
        match s {
            Scalar::Residue { value, modulus } if *modulus == self.0 => *value,
            _ => panic!("mixing fields: {s:?} in mod {}", self.0),
        }
    }
    fn lower(&self, e: &u64) -> Scalar {
        Scalar::Residue {
            value: *e,
            modulus: self.0,
        }
    }
}

struct Rat;

impl Arith for Rat {
    type E = BigRational;
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn sub_mul(&self, acc: &BigRational, a: &BigRational, b: &BigRational) -> BigRational {
        acc - a * b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        BigRational::one() / a
    }
    fn lift(&self, s: &Scalar) -> BigRational {
        match s {
            Scalar::Rational(q) => q.clone(),
            _ => panic!("mixing fields: {s:?} in rational elimination"),
        }
    }
    fn lower(&self, e: &BigRational) -> Scalar {
        Scalar::Rational(e.clone())
    }
}

fn dense<A: Arith>(ar: &A, rows: usize, cols: usize, data: &[Scalar]) -> Rref {
    let mut m: Vec<A::E> = data.iter().map(|s| ar.lift(s)).collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(r) = (rank..rows).find(|&r| !ar.is_zero(&m[r * cols + c])) else {
            continue;
        };
        if r != rank {
            for k in 0..cols {
                m.swap(r * cols + k, rank * cols + k);
            }
        }
        let inv = ar.inv(&m[rank * cols + c]);
        for k in c..cols {
            m[rank * cols + k] = ar.mul(&m[rank * cols + k], &inv);
        }
        let pivot_row: Vec<A::E> = m[rank * cols..(rank + 1) * cols].to_vec();
        for r2 in 0..rows {
            if r2 == rank {
                continue;
            }
            let factor = m[r2 * cols + c].clone();
            if ar.is_zero(&factor) {
                continue;
            }
            for k in c..cols {
                if !ar.is_zero(&pivot_row[k]) {
                    m[r2 * cols + k] = ar.sub_mul(&m[r2 * cols + k], &factor, &pivot_row[k]);
                }
            }
        }
        pivots.push(c);
        rank += 1;
    }
    let rows_out = (0..rank)
        .map(|r| {
            (0..cols)
                .filter(|&k| !ar.is_zero(&m[r * cols + k]))
                .map(|k| (k, ar.lower(&m[r * cols + k])))
                .collect()
        })
        .collect();
    Rref {
        cols,
        pivots,
        rows: rows_out,
    }
}

type SRow<E> = Vec<(usize, E)>;

/// `a - factor * b` on sparse rows.
fn axpy<A: Arith>(ar: &A, a: &SRow<A::E>, factor: &A::E, b: &SRow<A::E>) -> SRow<A::E> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    let zero = ar.zero();
    while i < a.len() || j < b.len() {
        let ca = a.get(i).map(|e| e.0).unwrap_or(usize::MAX);
        let cb = b.get(j).map(|e| e.0).unwrap_or(usize::MAX);
        if ca < cb {
            out.push(a[i].clone());
            i += 1;
        } else if cb < ca {
            let v = ar.sub_mul(&zero, factor, &b[j].1);
            if !ar.is_zero(&v) {
                out.push((cb, v));
            }
            j += 1;
        } else {
            let v = ar.sub_mul(&a[i].1, factor, &b[j].1);
            if !ar.is_zero(&v) {
                out.push((ca, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn sparse<A: Arith>(ar: &A, cols: usize, input: &[Row]) -> Rref {
    // Leading-only echelon form keyed by pivot column.
    let mut echelon: std::collections::BTreeMap<usize, SRow<A::E>> = Default::default();
    for row in input {
        let mut r: SRow<A::E> = row
            .iter()
            .map(|(c, s)| (*c, ar.lift(s)))
            .filter(|(_, e)| !ar.is_zero(e))
            .collect();
        while let Some((lead, val)) = r.first().cloned() {
            match echelon.get(&lead) {
                Some(p) => r = axpy(ar, &r, &val, p),
                None => {
                    let inv = ar.inv(&val);
                    for e in r.iter_mut() {
                        e.1 = ar.mul(&e.1, &inv);
                    }
                    echelon.insert(lead, r);
                    break;
                }
            }
        }
    }
    // Back substitution from the right.
    let keys: Vec<usize> = echelon.keys().copied().collect();
    for &k in keys.iter().rev() {
        let mut r = echelon.remove(&k).unwrap();
        loop {
            let hit = r
                .iter()
                .skip(1)
                .find(|(c, _)| echelon.contains_key(c))
                .map(|(c, v)| (*c, v.clone()));
            match hit {
                Some((c, v)) => r = axpy(ar, &r, &v, &echelon[&c]),
                None => break,
            }
        }
        echelon.insert(k, r);
    }
    let mut pivots = Vec::new();
    let mut rows = Vec::new();
    for (k, r) in echelon {
        pivots.push(k);
        rows.push(r.iter().map(|(c, e)| (*c, ar.lower(e))).collect());
    }
    Rref { cols, pivots, rows }
}

pub fn rref_dense(field: Field, rows: usize, cols: usize, data: &[Scalar]) -> Rref {
    match field {
        Field::Prime(p) => dense(&Modp(p), rows, cols, data),
        Field::Rational => dense(&Rat, rows, cols, data),
    }
}

pub fn rref_sparse(field: Field, cols: usize, rows: &[Row]) -> Rref {
    match field {
        Field::Prime(p) => sparse(&Modp(p), cols, rows),
        Field::Rational => sparse(&Rat, cols, rows),
    }
}
