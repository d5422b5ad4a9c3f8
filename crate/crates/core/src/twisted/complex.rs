use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use crate::dgalg::{same_algebra, Bimodule, BimoduleMap, Side};
use crate::error::{Error, Result};
use crate::exactalg::{DirectSum, Field, GradedMap};
use crate::report::ValidationReport;

pub(crate) const LONG_SPAN_ASSUMPTION: &str =
    "Maurer–Cartan identities on spans longer than 2 follow the standard one-sided convention";

/// A one-sided twisted complex: terms `E_a` at positions `p_a` and twisting
/// maps `q_ab: E_a → E_b` of raw degree `1 + p_a − p_b` for `p_a < p_b`.
///
/// Several terms may share a position. Term order is kept as given and fixes
/// the basis order of the convolution `⊕ E_a[−p_a]`, whose differential is
/// `Σ (−1)^{p_a} d_a + Σ q_ab`.
#[derive(Clone, Debug)]
pub struct TwistedComplex {
    terms: Vec<(i32, Arc<Bimodule>)>,
    q: BTreeMap<(usize, usize), BimoduleMap>,
    conv: OnceLock<Arc<Bimodule>>,
}

impl PartialEq for TwistedComplex {
    fn eq(&self, other: &Self) -> bool {
        self.terms.len() == other.terms.len()
            && self
                .terms
                .iter()
                .zip(&other.terms)
                .all(|((p, m), (p2, m2))| p == p2 && (Arc::ptr_eq(m, m2) || **m == **m2))
            && self.q.len() == other.q.len()
            && self
                .q
                .iter()
                .all(|(k, v)| other.q.get(k).is_some_and(|w| w.map() == v.map()))
    }
}

impl TwistedComplex {
    pub fn new(terms: Vec<(i32, Arc<Bimodule>)>) -> Result<TwistedComplex> {
        let first = terms
            .first()
            .ok_or_else(|| Error::Invalid("twisted complex without terms".into()))?;
        for (_, m) in &terms {
            if !same_algebra(m.left(), first.1.left()) || !same_algebra(m.right(), first.1.right()) {
                return Err(Error::Invalid(format!(
                    "terms {} and {} live over different algebras",
                    first.1.name(),
                    m.name()
                )));
            }
        }
        Ok(TwistedComplex {
            terms,
            q: BTreeMap::new(),
            conv: OnceLock::new(),
        })
    }

    pub fn single(position: i32, module: Arc<Bimodule>) -> TwistedComplex {
        TwistedComplex::new(vec![(position, module)]).expect("one term")
    }

    /// `{A@−2, B@−1, C@0}` with `q = f, g, x`.
    pub fn three_term(
        a: &Arc<Bimodule>,
        b: &Arc<Bimodule>,
        c: &Arc<Bimodule>,
        f: &BimoduleMap,
        g: &BimoduleMap,
        x: &BimoduleMap,
    ) -> Result<TwistedComplex> {
        TwistedComplex::new(vec![(-2, a.clone()), (-1, b.clone()), (0, c.clone())])?
            .with_q(0, 1, f.clone())?
            .with_q(1, 2, g.clone())?
            .with_q(0, 2, x.clone())
    }

    pub fn with_q(mut self, a: usize, b: usize, map: BimoduleMap) -> Result<TwistedComplex> {
        self.set_q(a, b, map)?;
        Ok(self)
    }

    pub fn set_q(&mut self, a: usize, b: usize, map: BimoduleMap) -> Result<()> {
        let (pa, ma) = self
            .terms
            .get(a)
            .ok_or_else(|| Error::Invalid(format!("no term #{a}")))?;
        let (pb, mb) = self
            .terms
            .get(b)
            .ok_or_else(|| Error::Invalid(format!("no term #{b}")))?;
        if pa >= pb {
            return Err(Error::Invalid(format!(
                "twisting map from position {pa} to position {pb} is not one-sided"
            )));
        }
        if map.degree() != 1 + pa - pb {
            return Err(Error::Invalid(format!(
                "twisting map ({pa}, {pb}) has degree {}, expected {}",
                map.degree(),
                1 + pa - pb
            )));
        }
        if **map.source() != **ma || **map.target() != **mb {
            return Err(Error::DimensionMismatch(format!(
                "twisting map ({pa}, {pb}) does not go {} → {}",
                ma.name(),
                mb.name()
            )));
        }
        let map = map.retarget(ma, mb)?;
        if map.is_zero() {
            self.q.remove(&(a, b));
        } else {
            self.q.insert((a, b), map);
        }
        self.conv = OnceLock::new();
        Ok(())
    }

    pub fn terms(&self) -> &[(i32, Arc<Bimodule>)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn position(&self, a: usize) -> i32 {
        self.terms[a].0
    }

    pub fn module(&self, a: usize) -> &Arc<Bimodule> {
        &self.terms[a].1
    }

    pub fn field(&self) -> Field {
        self.terms[0].1.field()
    }

    /// `q_ab`, zero when absent.
    pub fn q(&self, a: usize, b: usize) -> BimoduleMap {
        self.q.get(&(a, b)).cloned().unwrap_or_else(|| {
            BimoduleMap::zero(&self.terms[a].1, &self.terms[b].1, 1 + self.terms[a].0 - self.terms[b].0)
        })
    }

    pub fn twisting_maps(&self) -> impl Iterator<Item = (&(usize, usize), &BimoduleMap)> {
        self.q.iter()
    }

    pub(crate) fn layout(&self) -> DirectSum {
        DirectSum::new(self.terms.iter().map(|(p, m)| m.space().shift(-p)).collect())
    }

    /// `q_ab` viewed as a degree-1 map `E_a[−p_a] → E_b[−p_b]`.
    fn shifted_block(&self, a: usize, b: usize, m: &GradedMap) -> GradedMap {
        m.reindex(-self.terms[a].0, -self.terms[b].0)
    }

    /// Total differential, without the `D² = 0` check.
    pub(crate) fn raw_convolution(&self) -> Result<Bimodule> {
        let f = self.field();
        let shifted: Vec<Arc<Bimodule>> = self.terms.iter().map(|(p, m)| Arc::new(m.shift(-p))).collect();
        let name = self
            .terms
            .iter()
            .map(|(p, m)| format!("{}@{p}", m.name()))
            .collect::<Vec<_>>()
            .join(",");
        let sum = Bimodule::direct_sum(format!("{{{name}}}"), &shifted)?;
        let layout = self.layout();
        let blocks: Vec<((usize, usize), GradedMap)> = self
            .q
            .iter()
            .map(|(&(a, b), m)| ((a, b), self.shifted_block(a, b, m.map())))
            .collect();
        let twist = DirectSum::assemble(f, &layout, &layout, 1, blocks.iter().map(|(k, m)| (*k, m)))?;
        let d = sum.differential().add(&twist)?;
        let mut out = Bimodule::from_graded(
            sum.name().to_string(),
            sum.left().clone(),
            sum.right().clone(),
            sum.basis().to_vec(),
            d,
            sum.left_action().to_vec(),
            sum.right_action().to_vec(),
        );
        for side in [Side::Left, Side::Right] {
            if let Some(g) = sum.semifree(side) {
                out = out.with_semifree(side, g.clone());
            }
        }
        Ok(out)
    }

    /// The convolution bimodule. The same `Arc` is returned on every call.
    pub fn convolve(&self) -> Result<Arc<Bimodule>> {
        if let Some(c) = self.conv.get() {
            return Ok(c.clone());
        }
        let report = validate_twisted(self);
        if !report.is_ok() {
            let first = report.failures().next().expect("failed check");
            return Err(Error::Invalid(format!("{}: {}", first.name, first.detail)));
        }
        let c = Arc::new(self.raw_convolution()?);
        Ok(self.conv.get_or_init(|| c).clone())
    }

    /// Inclusion `E_a[−p_a] → Tot` as a raw degree-0 graded map.
    pub fn inclusion(&self, a: usize) -> GradedMap {
        self.layout().inclusion(self.field(), a)
    }

    pub fn projection(&self, a: usize) -> GradedMap {
        self.layout().projection(self.field(), a)
    }

    /// Sub-complex on the terms whose index is in `keep`, in their order.
    pub fn restrict(&self, keep: &[usize]) -> Result<TwistedComplex> {
        let mut out = TwistedComplex::new(keep.iter().map(|&a| self.terms[a].clone()).collect())?;
        for (i, &a) in keep.iter().enumerate() {
            for (j, &b) in keep.iter().enumerate() {
                if let Some(m) = self.q.get(&(a, b)) {
                    out.set_q(i, j, m.clone())?;
                }
            }
        }
        Ok(out)
    }
}

/// Checks equivariance of every twisting map and `D² = 0` block by block.
pub fn validate_twisted(t: &TwistedComplex) -> ValidationReport {
    let mut report = ValidationReport::new("twisted complex");
    let f = t.field();
    for (&(a, b), m) in &t.q {
        let span = format!("({}, {})", t.position(a), t.position(b));
        match m.equivariance_defect() {
            None => report.pass(format!("twisting map {span} is a bimodule map")),
            Some(why) => report.fail(format!("twisting map {span} is a bimodule map"), why),
        }
    }
    for c in 0..t.len() {
        for a in 0..t.len() {
            let (pa, pc) = (t.position(a), t.position(c));
            if pa >= pc {
                continue;
            }
            // (−1)^{p_c} d(q_ac) + Σ_b q_bc q_ab
            let mut total = t.q(a, c).differential().scale(&f.sign(pc as i64));
            for b in 0..t.len() {
                let pb = t.position(b);
                if pa < pb && pb < pc {
                    if let (Some(qab), Some(qbc)) = (t.q.get(&(a, b)), t.q.get(&(b, c))) {
                        total = total.add(&qbc.compose(qab).expect("consecutive")).expect("same shape");
                    }
                }
            }
            let name = format!("Maurer–Cartan identity on span ({pa}, {pc})");
            if total.is_zero() {
                report.pass(name);
            } else {
                report.fail(name, "D² has a nonzero block");
            }
        }
    }
    let positions = t.terms.iter().map(|(p, _)| *p);
    if positions.clone().max().unwrap() - positions.min().unwrap() > 2 {
        report.assume(LONG_SPAN_ASSUMPTION);
    }
    report
}
