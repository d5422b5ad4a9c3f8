//! Turns a parsed scenario into core objects, validating each item as it goes.

use std::path::Path;
use std::sync::Arc;

use twistcalc_core::adjunction::{
    evaluation_trace, free_adjunction_on, pairing_trace, solve_action, validate_adjunction, AdjunctionData,
    UniquenessScenario,
};
use twistcalc_core::dgalg::{validate_algebra, validate_bimodule, BasisElement, Bimodule, BimoduleMap, Ctx, DGAlgebra, Side};
use twistcalc_core::exactalg::{Field, GradedMap, GradedSpace, Matrix};
use twistcalc_core::pfunctor::{solve_gamma, CyclicExtensionData, PnFunctorData};
use twistcalc_core::report::ValidationReport;
use twistcalc_core::twisted::{validate_twisted, TwistedComplex};

use crate::error::{CliError, CliResult};
use crate::scenario::{self, AdjunctionDef, AlgebraDef, BimoduleDef, Block, ItemDef, MapDef, PnDef, ScenarioFile, Word};

/// A scenario with every item built. Lists keep file order.
pub struct Scenario {
    pub ctx: Ctx,
    pub field: Field,
    pub file: ScenarioFile,
    pub algebras: Vec<(String, Arc<DGAlgebra>)>,
    pub bimodules: Vec<(String, Arc<Bimodule>)>,
    pub maps: Vec<(String, BimoduleMap)>,
    pub adjunctions: Vec<(String, AdjunctionData)>,
    pub uniqueness: Vec<(String, UniquenessScenario)>,
    pub complexes: Vec<(String, Arc<TwistedComplex>)>,
    pub pn: Vec<(String, PnFunctorData)>,
    /// Things the loader had to settle, e.g. a `γ` it could not solve for.
    pub notes: Vec<String>,
}

fn lookup<'a, T>(list: &'a [(String, T)], name: &str) -> Option<&'a T> {
    list.iter().find(|(n, _)| n == name).map(|(_, t)| t)
}

pub fn load(path: &Path) -> CliResult<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    from_text(&text)
}

pub fn from_text(text: &str) -> CliResult<Scenario> {
    resolve(scenario::parse(text)?)
}

pub fn resolve(file: ScenarioFile) -> CliResult<Scenario> {
    let mut s = Scenario {
        ctx: Ctx::new(),
        field: file.field,
        file: ScenarioFile::new(file.field),
        algebras: Vec::new(),
        bimodules: Vec::new(),
        maps: Vec::new(),
        adjunctions: Vec::new(),
        uniqueness: Vec::new(),
        complexes: Vec::new(),
        pn: Vec::new(),
        notes: Vec::new(),
    };
    for (i, item) in file.items.iter().enumerate() {
        let locate = |message: String| CliError::Parse {
            line: file.line_of(i),
            block: format!("{} {}", item.kind(), item.name),
            message,
        };
        s.add(&item.name, &item.def).map_err(|e| match e {
            CliError::Parse { message, .. } => locate(message),
            CliError::Core(e) => locate(e.to_string()),
            other => other,
        })?;
    }
    s.file = file;
    Ok(s)
}

fn invalid(message: impl Into<String>) -> CliError {
    CliError::Parse {
        line: 0,
        block: String::new(),
        message: message.into(),
    }
}

fn structural(report: ValidationReport) -> CliResult<()> {
    if report.is_ok() {
        return Ok(());
    }
    let failed: Vec<String> = report
        .failures()
        .map(|c| if c.detail.is_empty() { c.name.clone() } else { format!("{} ({})", c.name, c.detail) })
        .collect();
    Err(invalid(format!("invariant violated: {}", failed.join("; "))))
}

fn graded(field: Field, source: &GradedSpace, target: &GradedSpace, degree: i32, blocks: &[Block]) -> CliResult<GradedMap> {
    let mats = blocks
        .iter()
        .map(|b| Ok((b.degree, Matrix::from_rows(field, b.rows, b.cols, b.entries.clone())?)))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(GradedMap::from_blocks(field, source, target, degree, mats)?)
}

fn basis_elements(basis: &[(String, i32)]) -> Vec<BasisElement> {
    basis.iter().map(|(n, d)| BasisElement::new(n.clone(), *d)).collect()
}

impl Scenario {
    pub fn algebra(&self, name: &str) -> CliResult<&Arc<DGAlgebra>> {
        lookup(&self.algebras, name).ok_or_else(|| invalid(format!("no algebra named `{name}`")))
    }

    /// A bimodule name or `diag(A)`.
    pub fn atom(&self, name: &str) -> CliResult<Arc<Bimodule>> {
        if let Some(inner) = name.strip_prefix("diag(").and_then(|r| r.strip_suffix(')')) {
            return Ok(self.ctx.diagonal(self.algebra(inner)?));
        }
        lookup(&self.bimodules, name)
            .cloned()
            .ok_or_else(|| invalid(format!("no bimodule named `{name}`")))
    }

    pub fn word(&self, w: &Word) -> CliResult<Arc<Bimodule>> {
        let atoms = w.iter().map(|a| self.atom(a)).collect::<CliResult<Vec<_>>>()?;
        match atoms.as_slice() {
            [one] => Ok(one.clone()),
            _ => Ok(self.ctx.module(&atoms)?),
        }
    }

    pub fn map(&self, name: &str) -> CliResult<&BimoduleMap> {
        lookup(&self.maps, name).ok_or_else(|| invalid(format!("no map named `{name}`")))
    }

    pub fn adjunction(&self, name: &str) -> CliResult<&AdjunctionData> {
        lookup(&self.adjunctions, name).ok_or_else(|| invalid(format!("no adjunction named `{name}`")))
    }

    fn add(&mut self, name: &str, def: &ItemDef) -> CliResult<()> {
        match def {
            ItemDef::Algebra(a) => {
                let alg = self.build_algebra(name, a)?;
                structural(validate_algebra(&alg))?;
                self.algebras.push((name.into(), alg));
            }
            ItemDef::Bimodule(b) => {
                let m = self.build_bimodule(name, b)?;
                structural(validate_bimodule(&m))?;
                self.bimodules.push((name.into(), Arc::new(m)));
            }
            ItemDef::Map(m) => {
                let map = self.build_map(m)?;
                if let Some(defect) = map.equivariance_defect() {
                    return Err(invalid(format!("invariant violated: equivariant ({defect})")));
                }
                self.maps.push((name.into(), map));
            }
            ItemDef::Adjunction(a) => {
                let adj = self.build_adjunction(a)?;
                self.adjunctions.push((name.into(), adj));
            }
            ItemDef::Uniqueness { adjunction, x, f, h0 } => {
                let adj = self.adjunction(adjunction)?.clone();
                let x = self.atom(x)?;
                let h0 = h0.as_ref().map(|h| self.map(h)).transpose()?;
                let u = UniquenessScenario::new(&self.ctx, adj, &x, self.map(f)?, h0)?;
                self.uniqueness.push((name.into(), u));
            }
            ItemDef::Complex { terms, q } => {
                let terms = terms
                    .iter()
                    .map(|(p, m)| Ok((*p, self.atom(m)?)))
                    .collect::<CliResult<Vec<_>>>()?;
                let mut t = TwistedComplex::new(terms)?;
                for (a, b, m) in q {
                    t.set_q(*a, *b, self.map(m)?.clone())?;
                }
                structural(validate_twisted(&t))?;
                self.complexes.push((name.into(), Arc::new(t)));
            }
            ItemDef::Pn(p) => {
                let data = self.build_pn(name, p)?;
                self.pn.push((name.into(), data));
            }
        }
        Ok(())
    }

    fn build_algebra(&self, name: &str, a: &AlgebraDef) -> CliResult<Arc<DGAlgebra>> {
        let f = self.field;
        Ok(match a {
            AlgebraDef::Ground => DGAlgebra::ground(f),
            AlgebraDef::TruncatedPolynomial { degree, top } => DGAlgebra::truncated_polynomial(f, *degree, *top),
            AlgebraDef::ResolvedDualNumbers => DGAlgebra::resolved_dual_numbers(f),
            AlgebraDef::Explicit {
                basis,
                unit,
                products,
                idempotents,
                differential,
            } => {
                let index = |b: &str| {
                    basis
                        .iter()
                        .position(|(n, _)| n == b)
                        .ok_or_else(|| invalid(format!("product names unknown basis element `{b}`")))
                };
                let prods = products
                    .iter()
                    .map(|(a, b, v)| Ok(((index(a)?, index(b)?), v.clone())))
                    .collect::<CliResult<Vec<_>>>()?;
                let degrees: Vec<i32> = basis.iter().map(|(_, d)| *d).collect();
                let space = GradedSpace::from_degrees(&degrees);
                let d = graded(f, &space, &space, 1, differential)?;
                Arc::new(DGAlgebra::new(
                    name,
                    f,
                    basis_elements(basis),
                    prods,
                    &d.to_flat(),
                    unit.clone(),
                    idempotents.clone(),
                )?)
            }
        })
    }

    fn build_bimodule(&self, name: &str, b: &BimoduleDef) -> CliResult<Bimodule> {
        use twistcalc_core::sample::{free_left_module, free_right_module};
        let m = match b {
            BimoduleDef::FreeRight { left, right, shifts } => {
                free_right_module(self.algebra(left)?, self.algebra(right)?, name, shifts)?
            }
            // free over the left algebra; the right one is the ground
            BimoduleDef::FreeLeft { left, right, shifts } => {
                free_left_module(self.algebra(right)?, self.algebra(left)?, name, shifts)?
            }
            BimoduleDef::Diagonal(a) => Bimodule::diagonal(self.algebra(a)?),
            BimoduleDef::Zero { left, right } => Bimodule::zero(self.algebra(left)?.clone(), self.algebra(right)?.clone()),
            BimoduleDef::Tensor(w) => self.word(w)?.as_ref().clone(),
            BimoduleDef::Shift { source, by } => self.atom(source)?.shift(*by),
            BimoduleDef::Dual(x) => self.atom(x)?.dual(name)?,
            BimoduleDef::DirectSum(parts) => {
                let parts = parts.iter().map(|p| self.atom(p)).collect::<CliResult<Vec<_>>>()?;
                Bimodule::direct_sum(name, &parts)?
            }
            BimoduleDef::RestrictLeft { source, ground } => self.atom(source)?.restrict_left(self.algebra(ground)?),
            BimoduleDef::RestrictRight { source, ground } => self.atom(source)?.restrict_right(self.algebra(ground)?),
            BimoduleDef::Explicit {
                left,
                right,
                basis,
                differential,
                left_action,
                right_action,
                semifree,
            } => {
                if let Some(w) = basis.windows(2).find(|w| w[0].1 > w[1].1) {
                    return Err(invalid(format!(
                        "basis must be listed by nondecreasing degree (`{}` after `{}`)",
                        w[1].0, w[0].0
                    )));
                }
                let (l, r) = (self.algebra(left)?.clone(), self.algebra(right)?.clone());
                let f = self.field;
                let degrees: Vec<i32> = basis.iter().map(|(_, d)| *d).collect();
                let space = GradedSpace::from_degrees(&degrees);
                let d = graded(f, &space, &space, 1, differential)?;
                let actions = |alg: &DGAlgebra, given: &[(String, Vec<Block>)], side: &str| -> CliResult<Vec<GradedMap>> {
                    if let Some((e, _)) = given.iter().find(|(e, _)| alg.index_of(e).is_none()) {
                        return Err(invalid(format!("{side} action names unknown basis element `{e}`")));
                    }
                    alg.basis()
                        .iter()
                        .map(|b| match given.iter().find(|(e, _)| *e == b.name) {
                            Some((_, blocks)) => graded(f, &space, &space, b.degree, blocks),
                            None => Ok(GradedMap::zero(f, &space, &space, b.degree)),
                        })
                        .collect()
                };
                let la = actions(&l, left_action, "left")?;
                let ra = actions(&r, right_action, "right")?;
                let mut m = Bimodule::from_graded(name, l, r, basis_elements(basis), d, la, ra);
                for (side, gens) in semifree {
                    m = m.with_semifree(*side, gens.clone());
                }
                m
            }
        };
        for side in [Side::Left, Side::Right] {
            if m.semifree(side).is_some() {
                twistcalc_core::dgalg::verify_semifree(&m, side)
                    .map_err(|e| invalid(format!("invariant violated: semi-free ({e})")))?;
            }
        }
        Ok(m.renamed(name))
    }

    fn build_map(&self, m: &MapDef) -> CliResult<BimoduleMap> {
        let ctx = &self.ctx;
        Ok(match m {
            MapDef::Explicit {
                source,
                target,
                degree,
                blocks,
            } => {
                let (s, t) = (self.word(source)?, self.word(target)?);
                let g = graded(self.field, s.space(), t.space(), *degree, blocks)?;
                BimoduleMap::new(s, t, g)?
            }
            MapDef::Identity(w) => BimoduleMap::identity(&self.word(w)?),
            MapDef::Zero { source, target, degree } => BimoduleMap::zero(&self.word(source)?, &self.word(target)?, *degree),
            MapDef::Pairing { m, n } => pairing_trace(ctx, &self.atom(m)?, &self.atom(n)?)?,
            MapDef::SolveAction { m, n, trace } => solve_action(ctx, &self.atom(m)?, &self.atom(n)?, self.map(trace)?)?,
            MapDef::Evaluation { m, dual } => evaluation_trace(ctx, &self.atom(m)?, &self.atom(dual)?)?,
        })
    }

    fn build_adjunction(&self, a: &AdjunctionDef) -> CliResult<AdjunctionData> {
        let ctx = &self.ctx;
        Ok(match a {
            AdjunctionDef::Given {
                m,
                n,
                trace,
                action,
                zeta,
            } => {
                let (m, n) = (self.atom(m)?, self.atom(n)?);
                let adj = AdjunctionData::new(ctx, &m, &n, self.map(trace)?, self.map(action)?)?;
                match zeta {
                    Some((zm, zn)) => {
                        let zm = self.map(zm)?.retarget(&m, &m)?;
                        let zn = self.map(zn)?.retarget(&n, &n)?;
                        adj.with_zeta(zm, zn)
                    }
                    // an invalid adjunction is kept as given, for the checkers to report on
                    None => {
                        let check = validate_adjunction(ctx, &adj)?;
                        if check.report.is_ok() {
                            check.data
                        } else {
                            adj
                        }
                    }
                }
            }
            AdjunctionDef::Free { m, n } => free_adjunction_on(ctx, &self.atom(m)?, &self.atom(n)?)?,
            AdjunctionDef::DualLeft { m, l } => {
                let (m, l) = (self.atom(m)?, self.atom(l)?);
                let trace = evaluation_trace(ctx, &m, &l)?;
                let action = solve_action(ctx, &l, &m, &trace)?;
                AdjunctionData::new(ctx, &l, &m, &trace, &action)?.with_solved_zeta(ctx)?
            }
        })
    }

    fn build_pn(&mut self, name: &str, p: &PnDef) -> CliResult<PnFunctorData> {
        let ctx = &self.ctx;
        let adj = self.adjunction(&p.adjunction)?.clone();
        let h = self.atom(&p.h)?;
        let terms = p.terms.iter().map(|t| self.atom(t)).collect::<CliResult<Vec<_>>>()?;
        let higher = p
            .higher
            .iter()
            .map(|(k, j, m)| Ok(((*k, *j), self.map(m)?.clone())))
            .collect::<CliResult<Vec<_>>>()?;
        let mut isos = Vec::new();
        for (k, term) in terms.iter().enumerate().skip(1) {
            let conv = TwistedComplex::single(-(k as i32), term.clone()).convolve()?;
            let hk = self.word(&vec![p.h.clone(); k])?;
            let iso = match p.isos.iter().find(|(j, _)| *j == k) {
                Some((_, m)) => {
                    let m = self.map(m)?;
                    if m.source().space() != conv.space() || m.target().space() != hk.space() {
                        return Err(invalid(format!("iso {k} does not map the term at -{k} to H^{k}")));
                    }
                    m.retarget(&conv, &hk)?
                }
                None if conv.space() == hk.space() => {
                    BimoduleMap::new(conv.clone(), hk.clone(), GradedMap::identity(self.field, hk.space()))?
                }
                None => return Err(invalid(format!("term {k} needs an `iso {k}` line"))),
            };
            isos.push(iso);
        }
        let gamma = p.gamma.as_ref().map(|g| self.map(g)).transpose()?;
        let mut ext = CyclicExtensionData::new(&h, terms, higher, isos, gamma)?;
        if let Some(inv) = &p.inverse {
            ext = ext.with_inverse(self.adjunction(inv)?.clone());
        }
        if gamma.is_none() {
            match solve_gamma(ctx, &ext, &adj) {
                Ok(g) => ext.gamma = g,
                Err(e) => self.notes.push(format!("{name}: γ left as the identity of Q_n ({e})")),
            }
        }
        let mut data = PnFunctorData::new(adj, ext);
        if let Some(l) = &p.left {
            data = data.with_left(self.adjunction(l)?.clone());
        }
        data.psi = p.psi.as_ref().map(|m| self.map(m).cloned()).transpose()?;
        data.psi_prime = p.psi_prime.as_ref().map(|m| self.map(m).cloned()).transpose()?;
        data.mu_top = p.mu_top.as_ref().map(|m| self.map(m).cloned()).transpose()?;
        Ok(data)
    }
}
