use std::collections::BTreeMap;
use std::sync::Arc;

use super::algebra::BasisElement;
use super::bimodule::{same_algebra, Bimodule, Side};
use crate::error::{Error, Result};
use crate::exactalg::{rref_sparse, Field, GradedMap, Matrix, Row, Scalar};

/// A tensor word `M_1 ⊗ M_2 ⊗ … ⊗ M_k` of atomic bimodules.
pub type Word = Vec<Arc<Bimodule>>;

pub(crate) type SparseVec = Vec<(usize, Scalar)>;

/// One contraction `P ⊗_A R` in the iterated quotient.
#[derive(Debug)]
struct Stage {
    right_dim: usize,
    /// Class of the pair `(i, j)` at index `i * right_dim + j`.
    pi: Vec<SparseVec>,
}

/// The strict tensor product of a word, with the canonical projection from
/// the tensor product over the ground field and a section on basis tuples.
#[derive(Debug)]
pub struct TensorProduct {
    word: Word,
    module: Arc<Bimodule>,
    stages: Vec<Stage>,
    sections: Vec<Vec<usize>>,
}

fn add_into(f: Field, acc: &mut BTreeMap<usize, Scalar>, coeff: &Scalar, v: &[(usize, Scalar)]) {
    for (i, x) in v {
        let e = acc.entry(*i).or_insert_with(|| f.zero());
        e.add_mul(coeff, x);
    }
}

fn finish(acc: BTreeMap<usize, Scalar>) -> SparseVec {
    acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

/// `P ⊗_A R` with `A = P.right = R.left`.
fn contract(p: &Bimodule, r: &Bimodule) -> Result<(Bimodule, Stage, Vec<(usize, usize)>)> {
    if !same_algebra(p.right(), r.left()) {
        return Err(Error::Invalid(format!(
            "cannot tensor {} over {} with {} over {}",
            p.name(),
            p.right().name(),
            r.name(),
            r.left().name()
        )));
    }
    let f = p.field();
    let alg = p.right().clone();
    let (np, nr) = (p.dim(), r.dim());
    let pd: Vec<i32> = p.basis().iter().map(|b| b.degree).collect();
    let rd: Vec<i32> = r.basis().iter().map(|b| b.degree).collect();

    // pairs grouped by total degree, lexicographic inside a degree
    let mut by_degree: BTreeMap<i32, Vec<(usize, usize)>> = BTreeMap::new();
    for i in 0..np {
        for j in 0..nr {
            by_degree.entry(pd[i] + rd[j]).or_default().push((i, j));
        }
    }
    let mut local: Vec<usize> = vec![0; np * nr];
    for pairs in by_degree.values() {
        for (k, &(i, j)) in pairs.iter().enumerate() {
            local[i * nr + j] = k;
        }
    }

    // relations (m·a) ⊗ n − m ⊗ (a·n), homogeneous
    let mut relations: BTreeMap<i32, Vec<Row>> = BTreeMap::new();
    if !alg.is_ground() {
        for (ai, ab) in alg.basis().iter().enumerate() {
            let ra = p.right_action()[ai].to_flat();
            let la = r.left_action()[ai].to_flat();
            for i in 0..np {
                for j in 0..nr {
                    let deg = pd[i] + rd[j] + ab.degree;
                    let mut acc = BTreeMap::new();
                    for i2 in 0..np {
                        let v = ra.get(i2, i);
                        if !v.is_zero() {
                            add_into(f, &mut acc, &f.one(), &[(local[i2 * nr + j], v.clone())]);
                        }
                    }
                    for j2 in 0..nr {
                        let v = la.get(j2, j);
                        if !v.is_zero() {
                            add_into(f, &mut acc, &f.from_i64(-1), &[(local[i * nr + j2], v.clone())]);
                        }
                    }
                    let row = finish(acc);
                    if !row.is_empty() {
                        relations.entry(deg).or_default().push(row);
                    }
                }
            }
        }
    }

    // quotient basis degree by degree
    let mut pi: Vec<SparseVec> = vec![Vec::new(); np * nr];
    let mut free_pairs: Vec<(usize, usize)> = Vec::new();
    for (deg, pairs) in &by_degree {
        let rows = relations.remove(deg).unwrap_or_default();
        let rref = rref_sparse(f, pairs.len(), &rows);
        let mut is_pivot = vec![None; pairs.len()];
        for (r, &pcol) in rref.pivots.iter().enumerate() {
            is_pivot[pcol] = Some(r);
        }
        let mut q_index = vec![usize::MAX; pairs.len()];
        for (k, &(i, j)) in pairs.iter().enumerate() {
            if is_pivot[k].is_none() {
                q_index[k] = free_pairs.len();
                free_pairs.push((i, j));
            }
        }
        for (k, &(i, j)) in pairs.iter().enumerate() {
            pi[i * nr + j] = match is_pivot[k] {
                None => vec![(q_index[k], f.one())],
                Some(r) => rref.rows[r]
                    .iter()
                    .filter(|(c, _)| *c != k)
                    .map(|(c, v)| (q_index[*c], v.neg()))
                    .collect(),
            };
        }
    }
    let nq = free_pairs.len();
    let basis: Vec<BasisElement> = free_pairs
        .iter()
        .map(|&(i, j)| {
            BasisElement::new(
                format!("{}|{}", p.basis()[i].name, r.basis()[j].name),
                pd[i] + rd[j],
            )
        })
        .collect();
    let space = crate::exactalg::GradedSpace::from_degrees(&basis.iter().map(|b| b.degree).collect::<Vec<_>>());

    let project = |combo: &[(usize, usize, Scalar)]| -> SparseVec {
        let mut acc = BTreeMap::new();
        for (i, j, c) in combo {
            add_into(f, &mut acc, c, &pi[i * nr + j]);
        }
        finish(acc)
    };
    let induced = |image: &dyn Fn(usize, usize) -> Vec<(usize, usize, Scalar)>, degree: i32| -> Result<GradedMap> {
        let mut flat = Matrix::zeros(f, nq, nq);
        for (q, &(i, j)) in free_pairs.iter().enumerate() {
            for (row, v) in project(&image(i, j)) {
                flat.set(row, q, v);
            }
        }
        GradedMap::from_flat(&space, &space, degree, &flat)
    };
    let dp = p.differential().to_flat();
    let dr = r.differential().to_flat();
    let d = induced(
        &|i, j| {
            let mut out = Vec::new();
            for i2 in 0..np {
                if !dp.get(i2, i).is_zero() {
                    out.push((i2, j, dp.get(i2, i).clone()));
                }
            }
            let sign = f.sign(pd[i] as i64);
            for j2 in 0..nr {
                if !dr.get(j2, j).is_zero() {
                    out.push((i, j2, &sign * dr.get(j2, j)));
                }
            }
            out
        },
        1,
    )?;
    let left_action = p
        .left()
        .basis()
        .iter()
        .enumerate()
        .map(|(a, b)| {
            let la = p.left_action()[a].to_flat();
            induced(
                &|i, j| {
                    (0..np)
                        .filter(|&i2| !la.get(i2, i).is_zero())
                        .map(|i2| (i2, j, la.get(i2, i).clone()))
                        .collect()
                },
                b.degree,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let right_action = r
        .right()
        .basis()
        .iter()
        .enumerate()
        .map(|(a, b)| {
            let ra = r.right_action()[a].to_flat();
            induced(
                &|i, j| {
                    (0..nr)
                        .filter(|&j2| !ra.get(j2, j).is_zero())
                        .map(|j2| (i, j2, ra.get(j2, j).clone()))
                        .collect()
                },
                b.degree,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let module = Bimodule::from_graded(
        format!("{}⊗{}", p.name(), r.name()),
        p.left().clone(),
        r.right().clone(),
        basis,
        d,
        left_action,
        right_action,
    );
    Ok((module, Stage { right_dim: nr, pi }, free_pairs))
}

fn junction_ok(p: &Bimodule, r: &Bimodule) -> bool {
    p.right().is_semisimple() || p.semifree_holds(Side::Right) || r.semifree_holds(Side::Left)
}

impl TensorProduct {
    pub fn build(word: &[Arc<Bimodule>]) -> Result<TensorProduct> {
        let first = word
            .first()
            .ok_or_else(|| Error::Invalid("empty tensor word".into()))?;
        let mut module = first.clone();
        let mut sections: Vec<Vec<usize>> = (0..first.dim()).map(|i| vec![i]).collect();
        let mut stages = Vec::new();
        for (t, atom) in word.iter().enumerate().skip(1) {
            if !junction_ok(&word[t - 1], atom) {
                return Err(Error::Precondition(format!(
                    "semi-freeness flag absent on both sides of {} ⊗ {}",
                    word[t - 1].name(),
                    atom.name()
                )));
            }
            let (q, stage, free) = contract(&module, atom)?;
            sections = free
                .iter()
                .map(|&(i, j)| {
                    let mut s = sections[i].clone();
                    s.push(j);
                    s
                })
                .collect();
            module = Arc::new(q);
            stages.push(stage);
        }
        Ok(TensorProduct {
            word: word.to_vec(),
            module,
            stages,
            sections,
        })
    }

    pub fn word(&self) -> &[Arc<Bimodule>] {
        &self.word
    }

    pub fn module(&self) -> &Arc<Bimodule> {
        &self.module
    }

    /// Basis tuple representing basis vector `q` of the quotient.
    pub fn section(&self, q: usize) -> &[usize] {
        &self.sections[q]
    }

    /// Class of a basis tuple of the tensor product over the ground field.
    pub fn project(&self, tuple: &[usize]) -> SparseVec {
        let f = self.module.field();
        assert_eq!(tuple.len(), self.word.len(), "tuple length");
        let mut v: SparseVec = vec![(tuple[0], f.one())];
        for (stage, &j) in self.stages.iter().zip(&tuple[1..]) {
            let mut acc = BTreeMap::new();
            for (i, c) in &v {
                add_into(f, &mut acc, c, &stage.pi[i * stage.right_dim + j]);
            }
            v = finish(acc);
        }
        v
    }

    /// Degree of a basis tuple.
    pub fn tuple_degree(&self, tuple: &[usize]) -> i32 {
        tuple
            .iter()
            .zip(&self.word)
            .map(|(&i, m)| m.basis()[i].degree)
            .sum()
    }
}
