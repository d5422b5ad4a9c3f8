//! The subcommands. Each runs its entries in parallel and assembles the
//! sections in file order.

use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use twistcalc_core::adjunction::{validate_adjunction, validate_scenario, verify_uniqueness, AdjunctionData, Mode, UniquenessScenario};
use twistcalc_core::dgalg::BimoduleMap;
use twistcalc_core::error::Result;
use twistcalc_core::pfunctor::{
    build_psi, build_ptwist, check_adjoints_condition, check_highest_degree_condition, check_monad_condition, cotwist,
    validate_cyclic_extension, ConditionCheck, PnFunctorData,
};
use twistcalc_core::postnikov::{
    certify_conversion, classify_complexes, classify_lifts, induced_left_postnikov, induced_right_postnikov,
    surjectivity_criterion, validate_postnikov, Orientation, ThreeTermData, Verdict,
};
use twistcalc_core::twisted::{cohomology_dims, enumerate_lifts, validate_twisted, LiftSpace, TwistedComplex};
use twistcalc_core::witness::Witness;

use crate::report::{Report, Section};
use crate::resolve::Scenario;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    /// Exhaustive up to [`AUTO_LIMIT`] lifts, sampled above.
    Auto,
    Exhaustive,
    Sample(usize),
}

pub const AUTO_LIMIT: u128 = 64;
pub const EXHAUSTIVE_LIMIT: u128 = 1 << 16;

#[derive(Clone, Copy, Debug)]
pub struct Options {
    pub mode: SearchMode,
    pub seed: u64,
}

impl Default for Options {
    fn default() -> Options {
        Options {
            mode: SearchMode::Auto,
            seed: 0,
        }
    }
}

impl Options {
    fn core_mode(&self, count: Option<u128>) -> Mode {
        match self.mode {
            SearchMode::Exhaustive => Mode::Exhaustive {
                limit: EXHAUSTIVE_LIMIT,
            },
            SearchMode::Sample(pairs) => Mode::Sample { pairs, seed: self.seed },
            SearchMode::Auto => match count {
                Some(c) if c <= AUTO_LIMIT => Mode::Exhaustive { limit: AUTO_LIMIT },
                _ => Mode::Sample { pairs: 8, seed: self.seed },
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Validate,
    CheckAdjunction,
    EnumerateLifts,
    VerifyUniqueness,
    CheckPnConditions,
    BuildPtwist,
    PostnikovRoundtrip,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::CheckAdjunction => "check-adjunction",
            Command::EnumerateLifts => "enumerate-lifts",
            Command::VerifyUniqueness => "verify-uniqueness",
            Command::CheckPnConditions => "check-pn-conditions",
            Command::BuildPtwist => "build-ptwist",
            Command::PostnikovRoundtrip => "postnikov-roundtrip",
        }
    }
}

/// One unit of work: an item of the scenario and what to do with it.
enum Job<'a> {
    Adjunction(&'a str, &'a AdjunctionData),
    Uniqueness(&'a str, &'a UniquenessScenario),
    Complex(&'a str, &'a Arc<TwistedComplex>),
    Pn(&'a str, &'a PnFunctorData),
}

fn jobs<'a>(s: &'a Scenario, cmd: Command) -> Vec<Job<'a>> {
    let adj = || s.adjunctions.iter().map(|(n, a)| Job::Adjunction(n, a));
    let uniq = || s.uniqueness.iter().map(|(n, u)| Job::Uniqueness(n, u));
    let cx = || s.complexes.iter().map(|(n, t)| Job::Complex(n, t));
    let pn = || s.pn.iter().map(|(n, p)| Job::Pn(n, p));
    match cmd {
        Command::Validate => adj().chain(uniq()).chain(cx()).chain(pn()).collect(),
        Command::CheckAdjunction => adj().collect(),
        Command::EnumerateLifts | Command::VerifyUniqueness | Command::PostnikovRoundtrip => uniq().chain(cx()).collect(),
        Command::CheckPnConditions | Command::BuildPtwist => pn().collect(),
    }
}

/// Runs `body`; a core error ends the section as a precondition failure.
fn guarded(subject: String, body: impl FnOnce(&mut Section) -> Result<()>) -> Section {
    let mut s = Section::new(subject);
    if let Err(e) = body(&mut s) {
        s.error = Some(e.to_string());
    }
    s
}

pub fn run(cmd: Command, scenario: &Scenario, label: &str, opts: &Options) -> Report {
    let start = Instant::now();
    let sections: Vec<Section> = jobs(scenario, cmd)
        .par_iter()
        .map(|job| run_job(cmd, scenario, job, opts))
        .collect();
    let mut report = Report::new(cmd.name(), label, scenario.field.to_string(), sections, scenario.notes.clone());
    for a in &scenario.file.assumptions {
        if !report.assumptions.contains(a) {
            report.assumptions.push(a.clone());
        }
    }
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    report
}

fn run_job(cmd: Command, s: &Scenario, job: &Job<'_>, opts: &Options) -> Section {
    let ctx = &s.ctx;
    match (cmd, job) {
        (Command::Validate, Job::Adjunction(n, a)) => guarded(format!("adjunction {n}"), |sec| {
            sec.absorb(&validate_adjunction(ctx, a)?.report);
            Ok(())
        }),
        (Command::Validate, Job::Uniqueness(n, u)) => guarded(format!("uniqueness {n}"), |sec| {
            sec.absorb(&validate_scenario(ctx, u)?);
            Ok(())
        }),
        (Command::Validate, Job::Complex(n, t)) => guarded(format!("complex {n}"), |sec| {
            sec.absorb(&validate_twisted(t));
            Ok(())
        }),
        (Command::Validate, Job::Pn(n, p)) => guarded(format!("pn {n}"), |sec| {
            sec.absorb(&validate_cyclic_extension(ctx, &p.ext, &p.adj)?);
            Ok(())
        }),
        (Command::CheckAdjunction, Job::Adjunction(n, a)) => guarded(format!("adjunction {n}"), |sec| check_adjunction(s, a, sec)),
        (Command::EnumerateLifts, Job::Uniqueness(n, u)) => guarded(format!("uniqueness {n}"), |sec| {
            match u.nullness(ctx) {
                Ok(_) => sec.check("trace ∘ f ≃ 0", true, ""),
                Err(e) => sec.check("trace ∘ f ≃ 0", false, e.to_string()),
            };
            describe_lifts(&u.lifts(ctx)?, sec);
            Ok(())
        }),
        (Command::EnumerateLifts, Job::Complex(n, t)) => guarded(format!("complex {n}"), |sec| {
            let base = ThreeTermData::of(t)?;
            describe_lifts(&enumerate_lifts(ctx, &base.f, &base.g)?, sec);
            Ok(())
        }),
        (Command::VerifyUniqueness, Job::Uniqueness(n, u)) => guarded(format!("uniqueness {n}"), |sec| {
            let lifts = u.lifts(ctx)?;
            let mode = opts.core_mode(lifts.count());
            sec.fact("mode", describe_mode(mode));
            let r = verify_uniqueness(ctx, u, mode)?;
            sec.fact("lifts examined", r.members);
            sec.fact("verdict", r.verdict);
            sec.check("convolutions form one class", r.verdict == Verdict::SingleClass, "");
            sec.check("every witness verifies", r.witnesses_verify(), "");
            for w in r.witnesses {
                sec.witness(w);
            }
            Ok(())
        }),
        (Command::VerifyUniqueness, Job::Complex(n, t)) => {
            guarded(format!("complex {n}"), |sec| verify_complex(s, t, opts, sec))
        }
        (Command::PostnikovRoundtrip, Job::Uniqueness(n, u)) => guarded(format!("uniqueness {n}"), |sec| {
            let h0 = u.nullness(ctx)?;
            roundtrip(s, &u.complex(&h0)?, sec)
        }),
        (Command::PostnikovRoundtrip, Job::Complex(n, t)) => guarded(format!("complex {n}"), |sec| roundtrip(s, t, sec)),
        (Command::CheckPnConditions, Job::Pn(n, p)) => guarded(format!("pn {n}"), |sec| pn_conditions(s, p, sec)),
        (Command::BuildPtwist, Job::Pn(n, p)) => guarded(format!("pn {n}"), |sec| ptwist(s, p, opts, sec)),
        _ => unreachable!("jobs() only schedules supported pairs"),
    }
}

fn describe_mode(m: Mode) -> String {
    match m {
        Mode::Exhaustive { .. } => "exhaustive".into(),
        Mode::Sample { pairs, seed } => format!("sample of {pairs} pairs, seed {seed}"),
    }
}

fn check_adjunction(s: &Scenario, a: &AdjunctionData, sec: &mut Section) -> Result<()> {
    let ctx = &s.ctx;
    sec.fact("M", format!("{} ({}-dimensional)", a.m.name(), a.m.dim()));
    sec.fact("N", format!("{} ({}-dimensional)", a.n.name(), a.n.dim()));
    let check = validate_adjunction(ctx, a)?;
    sec.absorb(&check.report);
    if let (Some(zm), Some(zn)) = (&check.data.zeta_m, &check.data.zeta_n) {
        let tm = check.data.triangle_m(ctx)?;
        let tn = check.data.triangle_n(ctx)?;
        let dm = tm.sub(&BimoduleMap::identity(tm.source()).retarget(tm.source(), tm.target())?)?;
        let dn = tn.sub(&BimoduleMap::identity(tn.source()).retarget(tn.source(), tn.target())?)?;
        sec.witness(Witness::null_homotopy("triangle on M is the identity", &dm, zm));
        sec.witness(Witness::null_homotopy("triangle on N is the identity", &dn, zn));
    }
    Ok(())
}

fn count_text(l: &LiftSpace) -> String {
    match (l.dimension(), l.count(), l.f.field().size()) {
        (Some(d), Some(c), Some(q)) => format!("{c} = {q}^{d}"),
        (Some(_), _, _) => "infinite".into(),
        _ => "0".into(),
    }
}

fn describe_lifts(l: &LiftSpace, sec: &mut Section) {
    match &l.obstruction {
        Some(c) => {
            let c: Vec<String> = c.iter().map(ToString::to_string).collect();
            sec.check("lift space is nonempty", false, format!("g ∘ f is not a boundary, coordinates [{}]", c.join(", ")));
        }
        None => {
            sec.check("lift space is nonempty", true, "");
        }
    }
    if let Some(d) = l.dimension() {
        sec.fact("dimension", d);
    }
    sec.fact("count", count_text(l));
}

fn verify_complex(s: &Scenario, t: &TwistedComplex, opts: &Options, sec: &mut Section) -> Result<()> {
    let ctx = &s.ctx;
    let base = ThreeTermData::of(t)?;
    let lifts = enumerate_lifts(ctx, &base.f, &base.g)?;
    describe_lifts(&lifts, sec);
    if lifts.is_empty() {
        return Ok(());
    }
    let mut surjective = false;
    for side in [Orientation::Right, Orientation::Left] {
        let r = surjectivity_criterion(ctx, &base, side)?;
        surjective |= r.holds;
        sec.fact(format!("surjectivity ({side:?})"), if r.holds { "holds" } else { "fails" });
    }
    let report = match opts.core_mode(lifts.count()) {
        Mode::Exhaustive { limit } => {
            sec.fact("mode", "exhaustive");
            classify_lifts(ctx, &lifts, limit)?
        }
        Mode::Sample { pairs, seed } => {
            sec.fact("mode", format!("sample of {} lifts, seed {seed}", pairs + 1));
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut complexes = vec![lifts.complex(lifts.particular().expect("nonempty"))?];
            for _ in 0..pairs {
                let x = lifts.sample(&mut rng).expect("nonempty");
                complexes.push(lifts.complex(&x)?);
            }
            classify_complexes(ctx, &complexes)?
        }
    };
    sec.fact("convolutions compared", report.members);
    sec.fact("verdict", report.verdict);
    if let Some(inv) = &report.invariant {
        sec.fact("distinguished by", inv);
    }
    sec.check(
        "convolutions form one class",
        report.verdict == Verdict::SingleClass,
        report.invariant.clone().unwrap_or_default(),
    );
    if surjective {
        sec.check(
            "surjectivity implies one class",
            report.verdict == Verdict::SingleClass,
            "surjectivity holds but the classes differ",
        );
    }
    sec.check("every witness verifies", report.witnesses_verify(), "");
    for w in report.witnesses {
        sec.witness(w);
    }
    Ok(())
}

fn roundtrip(s: &Scenario, t: &TwistedComplex, sec: &mut Section) -> Result<()> {
    let ctx = &s.ctx;
    let dims = cohomology_dims(&*t.convolve()?);
    sec.fact("convolution cohomology", format!("{dims:?}"));
    for (side, system) in [
        (Orientation::Right, induced_right_postnikov(t)?),
        (Orientation::Left, induced_left_postnikov(t)?),
    ] {
        let name = format!("{side:?}").to_lowercase();
        let v = validate_postnikov(ctx, &system)?;
        for c in &v.checks {
            sec.check(format!("{name} system: {}", c.name), c.passed, c.detail.clone());
        }
        let side_dims = cohomology_dims(&*system.convolution()?);
        sec.check(
            format!("{name} convolution has the cohomology of the complex"),
            side_dims == dims,
            format!("{side_dims:?}"),
        );
        let cert = certify_conversion(ctx, &system)?;
        sec.check(format!("{name} system converts with verified equivalences"), cert.verify(), "");
        sec.witness(cert.source_to_lift.to_witness(format!("{name} convolution ≃ lift")));
        sec.witness(cert.converted_to_lift.to_witness(format!("converted convolution ≃ lift ({name} start)")));
        sec.witness(cert.direct.to_witness(format!("{name} convolution ≃ converted convolution")));
    }
    Ok(())
}

fn record_condition(sec: &mut Section, c: ConditionCheck) {
    sec.check(c.name, c.holds, if c.holds { String::new() } else { c.detail.clone() });
    if let Some(n) = c.solutions {
        sec.fact(format!("{}: candidate space", c.name), n);
    }
    if let Some(w) = &c.witness {
        sec.witness(w.to_witness(c.name));
    }
}

fn pn_conditions(s: &Scenario, p: &PnFunctorData, sec: &mut Section) -> Result<()> {
    let ctx = &s.ctx;
    sec.absorb(&validate_cyclic_extension(ctx, &p.ext, &p.adj)?);
    sec.fact("n", p.ext.n);
    let psi = build_psi(ctx, p)?;
    sec.check("trace ∘ ψ ≃ 0", true, "");
    let tr = p.adj.trace.retarget(psi.psi.target(), p.adj.trace.target())?;
    sec.witness(Witness::null_homotopy("trace ∘ ψ ≃ 0", &tr.compose(&psi.psi)?, &psi.trace_null));
    match &psi.alternative {
        Some((psi2, h)) => {
            sec.check("ψ does not depend on the splitting", true, "");
            sec.witness(Witness::null_homotopy("ψ − ψ₂ is a boundary", &psi.psi.sub(psi2)?, h));
        }
        None => {
            sec.fact("splittings", "unique");
        }
    }
    let c = cotwist(ctx, &p.adj)?;
    sec.fact("cotwist cohomology", format!("{:?}", cohomology_dims(&c.c)));
    record_condition(sec, check_monad_condition(ctx, p)?);
    record_condition(sec, check_adjoints_condition(ctx, p)?);
    record_condition(sec, check_highest_degree_condition(ctx, p)?);
    Ok(())
}

fn ptwist(s: &Scenario, p: &PnFunctorData, opts: &Options, sec: &mut Section) -> Result<()> {
    let ctx = &s.ctx;
    let mode = match opts.mode {
        SearchMode::Auto => None,
        _ => Some(opts.core_mode(None)),
    };
    let r = build_ptwist(ctx, p, mode)?;
    sec.fact("twist dimension", r.twist.dim());
    sec.fact("twist cohomology", format!("{:?}", cohomology_dims(&r.twist)));
    sec.fact("lifts examined", r.uniqueness.members);
    sec.fact("verdict", r.uniqueness.verdict);
    sec.check("the twist does not depend on the lift", r.uniqueness.verdict == Verdict::SingleClass, "");
    sec.check("every witness verifies", r.uniqueness.witnesses_verify(), "");
    for w in r.uniqueness.witnesses {
        sec.witness(w);
    }
    Ok(())
}
