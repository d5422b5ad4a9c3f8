use std::sync::Arc;

use crate::adjunction::AdjunctionData;
use crate::dgalg::{Bimodule, BimoduleMap, Ctx};
use crate::error::{Error, Result};
use crate::exactalg::GradedMap;
use crate::report::ValidationReport;
use crate::twisted::{
    cone_of_map, is_homotopy_equivalence, null_homotopy, validate_twisted, EquivalenceWitness, TwistedComplex,
};

pub const KERNEL_ASSUMPTION: &str = "H(ker F) = ker F (declared, not checked)";

/// `Q_n` as the convolution of `H^n[−n] → … → H[−1] → 𝒜`, with `γ: Q_n → M ⊗ N`.
#[derive(Clone, Debug)]
pub struct CyclicExtensionData {
    pub h: Arc<Bimodule>,
    pub n: usize,
    /// `terms[k]` sits at position `−k`; `terms[0]` is the diagonal of `𝒜`.
    pub terms: Vec<Arc<Bimodule>>,
    /// Higher differentials `terms[k] → terms[j]`, `k > j`, keyed by `(k, j)`.
    pub higher: Vec<((usize, usize), BimoduleMap)>,
    /// For `k = 1..=n`: `terms[k][k] → H^{⊗k}`.
    pub term_isos: Vec<BimoduleMap>,
    pub gamma: BimoduleMap,
    /// Differentials of the wrong degree, left out of the realization.
    rejected: Vec<String>,
    realization: Arc<TwistedComplex>,
    /// An `H′` with `H′ ⊣ H`, used to certify that `H` is invertible.
    pub h_adj: Option<AdjunctionData>,
}

fn index(n: usize, k: usize) -> usize {
    n - k
}

impl CyclicExtensionData {
    pub fn new(
        h: &Arc<Bimodule>,
        terms: Vec<Arc<Bimodule>>,
        higher: Vec<((usize, usize), BimoduleMap)>,
        term_isos: Vec<BimoduleMap>,
        gamma: Option<&BimoduleMap>,
    ) -> Result<CyclicExtensionData> {
        if terms.is_empty() {
            return Err(Error::Invalid("a cyclic extension needs the term 𝒜".into()));
        }
        let n = terms.len() - 1;
        let mut t = TwistedComplex::new((0..=n).rev().map(|k| (-(k as i32), terms[k].clone())).collect())?;
        let mut rejected = Vec::new();
        for ((k, j), q) in &higher {
            if k <= j || *k > n {
                return Err(Error::Invalid(format!("differential ({k}, {j}) does not go up the filtration")));
            }
            let expected = 1 + j - k;
            if q.degree() as i64 != expected as i64 {
                rejected.push(format!(
                    "differential on span ({}, {}) has degree {}, expected {expected}",
                    -(*k as i64),
                    -(*j as i64),
                    q.degree()
                ));
                continue;
            }
            t.set_q(index(n, *k), index(n, *j), q.clone())?;
        }
        let realization = Arc::new(t);
        // without γ, the identity of Q_n stands in until one is solved for
        let q = realization.convolve();
        let gamma = match (gamma, q) {
            (Some(g), Ok(q)) if g.source().space() == q.space() => g.retarget(&q, g.target())?,
            (Some(g), _) => g.clone(),
            (None, Ok(q)) => BimoduleMap::identity(&q),
            (None, Err(e)) => return Err(e),
        };
        Ok(CyclicExtensionData {
            h: h.clone(),
            n,
            terms,
            higher,
            term_isos,
            gamma,
            rejected,
            realization,
            h_adj: None,
        })
    }

    pub fn with_inverse(mut self, h_adj: AdjunctionData) -> CyclicExtensionData {
        self.h_adj = Some(h_adj);
        self
    }

    pub fn realization(&self) -> &Arc<TwistedComplex> {
        &self.realization
    }

    /// `Q_k`: the terms at positions `−k, …, 0`.
    pub fn filtration(&self, k: usize) -> Result<Arc<TwistedComplex>> {
        if k == self.n {
            return Ok(self.realization.clone());
        }
        let keep: Vec<usize> = (index(self.n, k)..=self.n).collect();
        Ok(Arc::new(self.realization.restrict(&keep)?))
    }

    pub fn q(&self, k: usize) -> Result<Arc<Bimodule>> {
        self.filtration(k)?.convolve()
    }

    /// `H^k` realized as the single term at position `−k`.
    pub fn power(&self, k: usize) -> Result<Arc<Bimodule>> {
        TwistedComplex::single(-(k as i32), self.terms[k].clone()).convolve()
    }

    /// `ι_k: Q_{k−1} → Q_k` (`k ≥ 1`).
    pub fn iota_step(&self, k: usize) -> Result<BimoduleMap> {
        let (small, big) = (self.filtration(k - 1)?, self.filtration(k)?);
        let f = big.field();
        let mut m = GradedMap::zero(f, small.convolve()?.space(), big.convolve()?.space(), 0);
        // small term i is big term i + 1
        for i in 0..small.len() {
            m = m.add(&big.inclusion(i + 1).compose(&small.projection(i))?)?;
        }
        BimoduleMap::new(small.convolve()?, big.convolve()?, m)
    }

    /// `ι_n ∘ … ∘ ι_{k+1}: Q_k → Q_n`.
    pub fn iota_from(&self, k: usize) -> Result<BimoduleMap> {
        let mut out = BimoduleMap::identity(&self.q(k)?);
        for j in k + 1..=self.n {
            out = self.iota_step(j)?.compose(&out)?;
        }
        Ok(out)
    }

    /// `ι: 𝒜 → Q_n`, the inclusion of the position-0 term.
    pub fn iota(&self) -> Result<BimoduleMap> {
        let t = &self.realization;
        BimoduleMap::new(self.terms[0].clone(), t.convolve()?, t.inclusion(self.n))
    }

    /// `μ_k: Q_k → H^k`, projection onto the bottom term.
    pub fn mu(&self, k: usize) -> Result<BimoduleMap> {
        let t = self.filtration(k)?;
        BimoduleMap::new(t.convolve()?, self.power(k)?, t.projection(0))
    }
}

/// Checks the realization, the terms, invertibility of `H`, `γ` and the filtration triangles.
pub fn validate_cyclic_extension(ctx: &Ctx, ext: &CyclicExtensionData, adj: &AdjunctionData) -> Result<ValidationReport> {
    let mut report = ValidationReport::new(format!("cyclic extension of degree {}", ext.n));
    report.assume(KERNEL_ASSUMPTION);
    for r in &ext.rejected {
        report.fail("higher differentials have the right degree", r.clone());
    }
    let tw = validate_twisted(&ext.realization);
    let realized = tw.is_ok();
    report.absorb(tw);
    let a = adj.a_diag(ctx);
    report.record(
        "position-0 term is the diagonal",
        *ext.terms[0] == *a,
        format!("got {}", ext.terms[0].name()),
    );
    if ext.term_isos.len() != ext.n {
        report.fail("term identifications", format!("{} given for {} terms", ext.term_isos.len(), ext.n));
    }
    for (k, iso) in ext.term_isos.iter().enumerate().map(|(i, m)| (i + 1, m)) {
        let name = format!("term at -{k} is H^{k}[-{k}]");
        let hk = ctx.module(&vec![ext.h.clone(); k])?;
        let fits = ext.power(k).is_ok_and(|p| p.space() == iso.source().space()) && iso.target().space() == hk.space();
        if !fits || iso.degree() != 0 || !iso.is_closed() {
            report.fail(name, "identification is not a closed degree-0 map of the right shape");
            continue;
        }
        let iso = iso.retarget(&ext.power(k)?, &hk)?;
        report.record(&name, is_homotopy_equivalence(ctx, &iso)?.is_some(), "not a homotopy equivalence");
    }
    match &ext.h_adj {
        None => report.fail("H is invertible", "no inverse supplied"),
        Some(h) => {
            let unit = is_homotopy_equivalence(ctx, &h.action)?.is_some();
            let counit = is_homotopy_equivalence(ctx, &h.trace)?.is_some();
            report.record("H is invertible", unit && counit, "unit or counit of H′ ⊣ H is not an equivalence");
        }
    }
    if !realized {
        return Ok(report);
    }
    let mn = adj.action.target();
    let gamma = &ext.gamma;
    let gamma_fits = gamma.source().space() == ext.q(ext.n)?.space() && gamma.target().space() == mn.space();
    if !gamma_fits || gamma.degree() != 0 || !gamma.is_closed() {
        report.fail("γ: Q_n → RF", "γ is not a closed degree-0 map Q_n → M ⊗ N");
    } else {
        let gamma = gamma.retarget(&ext.q(ext.n)?, mn)?;
        report.record("γ is an equivalence", is_homotopy_equivalence(ctx, &gamma)?.is_some(), "cone of γ is not contractible");
        let d = gamma.compose(&ext.iota()?)?.sub(&adj.action.retarget(&ext.terms[0], mn)?)?;
        report.record("γ ∘ ι ≃ action", null_homotopy(ctx, &d)?.exists(), "difference is a nonzero class");
    }
    for k in 1..=ext.n {
        let (iota, mu) = (ext.iota_step(k)?, ext.mu(k)?);
        report.record(format!("μ_{k} ∘ ι_{k} = 0"), mu.compose(&iota)?.is_zero(), "nonzero");
        // cone(ι_k) → H^k, projecting onto the bottom term
        let c = cone_of_map(&iota)?;
        let cone = c.convolve()?;
        let m = mu.map().compose(&c.projection(1))?;
        let induced = BimoduleMap::new(cone, mu.target().clone(), m)?;
        let ok = induced.is_closed() && is_homotopy_equivalence(ctx, &induced)?.is_some();
        report.record(format!("Q_{} → Q_{k} → H^{k} is exact", k - 1), ok, "cone of ι_k is not H^k");
    }
    Ok(report)
}

/// Quasi-inverse of `γ`, from a contraction of its cone.
pub fn gamma_inverse(ctx: &Ctx, ext: &CyclicExtensionData, adj: &AdjunctionData) -> Result<EquivalenceWitness> {
    let gamma = ext.gamma.retarget(&ext.q(ext.n)?, adj.action.target())?;
    is_homotopy_equivalence(ctx, &gamma)?.ok_or_else(|| Error::Precondition("γ is not an equivalence".into()))
}
