use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use super::algebra::DGAlgebra;
use super::bimodule::Bimodule;
use super::hom::{assemble_hom_complex, hom_degree_range, HomComplex, HomSpace};
use super::map::BimoduleMap;
use super::tensor::{TensorProduct, Word};
use crate::error::{Error, Result};
use crate::exactalg::{GradedMap, Matrix, Scalar, SolverConfig};

/// Caches for tensor products, Hom bases and diagonal bimodules.
///
/// Keys are pointer addresses; every cached value holds the `Arc`s it was
/// built from, so addresses stay valid for the lifetime of the cache.
#[derive(Default)]
pub struct Ctx {
    pub config: SolverConfig,
    tensors: Mutex<HashMap<Vec<usize>, Arc<TensorProduct>>>,
    homs: Mutex<HashMap<(usize, usize, i32), Arc<HomSpace>>>,
    diagonals: Mutex<HashMap<usize, (Arc<DGAlgebra>, Arc<Bimodule>)>>,
}

fn key(m: &Arc<Bimodule>) -> usize {
    Arc::as_ptr(m) as usize
}

/// One factor of a tensor product of maps.
pub enum Segment<'a> {
    /// Identity on a single atom.
    Id(Arc<Bimodule>),
    /// A map between the tensor products of two words.
    Map {
        from: Word,
        to: Word,
        map: &'a GradedMap,
    },
}

impl<'a> Segment<'a> {
    pub fn map(from: &[Arc<Bimodule>], to: &[Arc<Bimodule>], map: &'a BimoduleMap) -> Segment<'a> {
        Segment::Map {
            from: from.to_vec(),
            to: to.to_vec(),
            map: map.map(),
        }
    }

    fn source(&self) -> Word {
        match self {
            Segment::Id(m) => vec![m.clone()],
            Segment::Map { from, .. } => from.clone(),
        }
    }

    fn target(&self) -> Word {
        match self {
            Segment::Id(m) => vec![m.clone()],
            Segment::Map { to, .. } => to.clone(),
        }
    }

    fn degree(&self) -> i32 {
        match self {
            Segment::Id(_) => 0,
            Segment::Map { map, .. } => map.degree(),
        }
    }
}

impl Ctx {
    pub fn new() -> Ctx {
        Ctx::default()
    }

    pub fn with_config(config: SolverConfig) -> Ctx {
        Ctx {
            config,
            ..Default::default()
        }
    }

    /// The canonical diagonal bimodule of `a`; words must use this `Arc`.
    pub fn diagonal(&self, a: &Arc<DGAlgebra>) -> Arc<Bimodule> {
        let k = Arc::as_ptr(a) as usize;
        if let Some((_, m)) = self.diagonals.lock().unwrap().get(&k) {
            return m.clone();
        }
        let m = Arc::new(Bimodule::diagonal(a));
        self.diagonals
            .lock()
            .unwrap()
            .entry(k)
            .or_insert_with(|| (a.clone(), m))
            .1
            .clone()
    }

    pub fn tensor(&self, word: &[Arc<Bimodule>]) -> Result<Arc<TensorProduct>> {
        let k: Vec<usize> = word.iter().map(key).collect();
        if let Some(t) = self.tensors.lock().unwrap().get(&k) {
            return Ok(t.clone());
        }
        let t = Arc::new(TensorProduct::build(word)?);
        Ok(self.tensors.lock().unwrap().entry(k).or_insert(t).clone())
    }

    /// The bimodule `M ⊗_A N`.
    pub fn tensor_over(&self, m: &Arc<Bimodule>, n: &Arc<Bimodule>) -> Result<Arc<Bimodule>> {
        Ok(self.tensor(&[m.clone(), n.clone()])?.module().clone())
    }

    pub fn module(&self, word: &[Arc<Bimodule>]) -> Result<Arc<Bimodule>> {
        Ok(self.tensor(word)?.module().clone())
    }

    pub fn hom(&self, source: &Arc<Bimodule>, target: &Arc<Bimodule>, degree: i32) -> Arc<HomSpace> {
        let k = (key(source), key(target), degree);
        if let Some(h) = self.homs.lock().unwrap().get(&k) {
            return h.clone();
        }
        let h = Arc::new(HomSpace::compute(source, target, degree));
        self.homs.lock().unwrap().entry(k).or_insert(h).clone()
    }

    pub fn hom_complex(&self, source: &Arc<Bimodule>, target: &Arc<Bimodule>) -> Result<HomComplex> {
        let f = source.field();
        if source.left().field() != target.left().field() {
            return Err(Error::FieldMismatch("hom complex".into()));
        }
        let mut spaces = BTreeMap::new();
        if let Some(range) = hom_degree_range(source, target) {
            for k in range {
                spaces.insert(k, self.hom(source, target, k));
            }
        }
        assemble_hom_complex(f, spaces)
    }

    /// `φ_1 ⊗ … ⊗ φ_m` from the tensor of the source words to the tensor of
    /// the target words, with the Koszul sign `(−1)^{Σ_{b<c} |φ_c||x_b|}`.
    pub fn tensor_maps(&self, segments: &[Segment<'_>]) -> Result<BimoduleMap> {
        let f = segments
            .first()
            .ok_or_else(|| Error::Invalid("empty tensor of maps".into()))?
            .source()[0]
            .field();
        let src_word: Word = segments.iter().flat_map(|s| s.source()).collect();
        let tgt_word: Word = segments.iter().flat_map(|s| s.target()).collect();
        let src = self.tensor(&src_word)?;
        let tgt = self.tensor(&tgt_word)?;
        let degree: i32 = segments.iter().map(Segment::degree).sum();
        struct Prepared {
            len: usize,
            degree: i32,
            kind: Option<(Arc<TensorProduct>, Arc<TensorProduct>, Matrix)>,
        }
        let prepared: Vec<Prepared> = segments
            .iter()
            .map(|s| -> Result<Prepared> {
                Ok(match s {
                    Segment::Id(_) => Prepared {
                        len: 1,
                        degree: 0,
                        kind: None,
                    },
                    Segment::Map { from, to, map } => {
                        let a = self.tensor(from)?;
                        let b = self.tensor(to)?;
                        if map.source() != a.module().space() || map.target() != b.module().space() {
                            return Err(Error::DimensionMismatch(format!(
                                "segment map does not fit {} → {}",
                                a.module().name(),
                                b.module().name()
                            )));
                        }
                        Prepared {
                            len: from.len(),
                            degree: map.degree(),
                            kind: Some((a, b, map.to_flat())),
                        }
                    }
                })
            })
            .collect::<Result<_>>()?;

        let mut flat = Matrix::zeros(f, tgt.module().dim(), src.module().dim());
        for q in 0..src.module().dim() {
            let tuple = src.section(q);
            // expand segment by segment: partial target tuples with coefficients
            let mut partial: Vec<(Vec<usize>, Scalar)> = vec![(Vec::new(), f.one())];
            let mut pos = 0;
            let mut degree_before = 0i64;
            for p in &prepared {
                let sub = &tuple[pos..pos + p.len];
                let sub_deg: i32 = sub
                    .iter()
                    .zip(&src_word[pos..pos + p.len])
                    .map(|(&i, m)| m.basis()[i].degree)
                    .sum();
                let sign = f.sign(p.degree as i64 * degree_before);
                let options: Vec<(Vec<usize>, Scalar)> = match &p.kind {
                    None => vec![(sub.to_vec(), sign)],
                    Some((a, b, m)) => {
                        let v = a.project(sub);
                        let mut img: BTreeMap<usize, Scalar> = BTreeMap::new();
                        for (c, x) in &v {
                            for r in 0..m.rows() {
                                let e = m.get(r, *c);
                                if !e.is_zero() {
                                    img.entry(r).or_insert_with(|| f.zero()).add_mul(x, e);
                                }
                            }
                        }
                        img.into_iter()
                            .filter(|(_, x)| !x.is_zero())
                            .map(|(r, x)| (b.section(r).to_vec(), &x * &sign))
                            .collect()
                    }
                };
                let mut next = Vec::with_capacity(partial.len() * options.len());
                for (t, c) in &partial {
                    for (o, oc) in &options {
                        let mut t2 = t.clone();
                        t2.extend_from_slice(o);
                        next.push((t2, c * oc));
                    }
                }
                partial = next;
                pos += p.len;
                degree_before += sub_deg as i64;
            }
            for (t, c) in partial {
                for (r, v) in tgt.project(&t) {
                    let e = flat.get(r, q) + &(&c * &v);
                    flat.set(r, q, e);
                }
            }
        }
        let map = GradedMap::from_flat(src.module().space(), tgt.module().space(), degree, &flat)?;
        BimoduleMap::new(src.module().clone(), tgt.module().clone(), map)
    }

    /// `p ↦ p ⊗ 1`: `P → P ⊗_A A`.
    pub fn insert_unit_right(&self, p: &Arc<Bimodule>) -> Result<BimoduleMap> {
        let a = self.diagonal(p.right());
        let t = self.tensor(&[p.clone(), a.clone()])?;
        let f = p.field();
        let unit = p.right().unit().to_vec();
        let mut flat = Matrix::zeros(f, t.module().dim(), p.dim());
        for i in 0..p.dim() {
            for (u, cu) in unit.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                for (r, v) in t.project(&[i, u]) {
                    let e = flat.get(r, i) + &(cu * &v);
                    flat.set(r, i, e);
                }
            }
        }
        let map = GradedMap::from_flat(p.space(), t.module().space(), 0, &flat)?;
        BimoduleMap::new(p.clone(), t.module().clone(), map)
    }

    /// `p ↦ 1 ⊗ p`: `P → A ⊗_A P`.
    pub fn insert_unit_left(&self, p: &Arc<Bimodule>) -> Result<BimoduleMap> {
        let a = self.diagonal(p.left());
        let t = self.tensor(&[a.clone(), p.clone()])?;
        let f = p.field();
        let unit = p.left().unit().to_vec();
        let mut flat = Matrix::zeros(f, t.module().dim(), p.dim());
        for i in 0..p.dim() {
            for (u, cu) in unit.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                for (r, v) in t.project(&[u, i]) {
                    let e = flat.get(r, i) + &(cu * &v);
                    flat.set(r, i, e);
                }
            }
        }
        let map = GradedMap::from_flat(p.space(), t.module().space(), 0, &flat)?;
        BimoduleMap::new(p.clone(), t.module().clone(), map)
    }

    /// `p ⊗ a ↦ p·a`: `P ⊗_A A → P`.
    pub fn contract_unit_right(&self, p: &Arc<Bimodule>) -> Result<BimoduleMap> {
        let a = self.diagonal(p.right());
        let t = self.tensor(&[p.clone(), a.clone()])?;
        let f = p.field();
        let mut flat = Matrix::zeros(f, p.dim(), t.module().dim());
        for q in 0..t.module().dim() {
            let s = t.section(q);
            let col = p.right_action()[s[1]].apply(&p.basis_vector(s[0]))?;
            for (r, v) in col.into_iter().enumerate() {
                flat.set(r, q, v);
            }
        }
        let map = GradedMap::from_flat(t.module().space(), p.space(), 0, &flat)?;
        BimoduleMap::new(t.module().clone(), p.clone(), map)
    }

    /// `a ⊗ p ↦ a·p`: `A ⊗_A P → P`.
    pub fn contract_unit_left(&self, p: &Arc<Bimodule>) -> Result<BimoduleMap> {
        let a = self.diagonal(p.left());
        let t = self.tensor(&[a.clone(), p.clone()])?;
        let f = p.field();
        let mut flat = Matrix::zeros(f, p.dim(), t.module().dim());
        for q in 0..t.module().dim() {
            let s = t.section(q);
            let col = p.left_action()[s[0]].apply(&p.basis_vector(s[1]))?;
            for (r, v) in col.into_iter().enumerate() {
                flat.set(r, q, v);
            }
        }
        let map = GradedMap::from_flat(t.module().space(), p.space(), 0, &flat)?;
        BimoduleMap::new(t.module().clone(), p.clone(), map)
    }

    /// Drops cached values.
    pub fn clear(&self) {
        self.tensors.lock().unwrap().clear();
        self.homs.lock().unwrap().clear();
    }
}

/// `Σ c_i m_i` for maps of one shape.
pub fn linear_combination(terms: &[(Scalar, &BimoduleMap)]) -> Result<BimoduleMap> {
    let (c0, m0) = terms
        .first()
        .ok_or_else(|| Error::Invalid("empty linear combination".into()))?;
    let mut acc = m0.scale(c0);
    for (c, m) in &terms[1..] {
        acc = acc.add(&m.scale(c))?;
    }
    Ok(acc)
}
