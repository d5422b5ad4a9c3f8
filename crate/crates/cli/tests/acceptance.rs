//! End-to-end acceptance checks. Each test writes one `[PASS]` or `[FAIL]`
//! line to stderr, outside the test harness's output capture.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use twistcalc::{resolve, run, witness_io, Command, Options, Scenario};
use twistcalc_core::adjunction::{random_scenario, verify_uniqueness, Mode, UniquenessScenario};
use twistcalc_core::dgalg::{Bimodule, BimoduleMap, Ctx, DGAlgebra};
use twistcalc_core::exactalg::{Field, Scalar};
use twistcalc_core::pfunctor::{
    build_psi, check_adjoints_condition, check_highest_degree_condition, check_monad_condition, left_dual_psi,
    psi_from_splitting, splittings, ConditionCheck, PnFunctorData,
};
use twistcalc_core::postnikov::{
    certify_conversion, classify_lifts, induced_left_postnikov, induced_right_postnikov, surjectivity_criterion,
    unipotent_comparison, Orientation, ThreeTermData, Verdict,
};
use twistcalc_core::sample::{random_complex, random_three_term};
use twistcalc_core::twisted::{
    cohomology_dims, enumerate_lifts, is_homotopy_equivalence, null_homotopy, EquivalenceWitness, TwistedComplex,
};
use twistcalc_core::witness::Witness;

fn line(criterion: &str, ok: bool, detail: &str) {
    let mark = if ok { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "[{mark}] {criterion}: {detail}");
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn fixtures() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "scn"))
        .collect();
    v.sort();
    v
}

/// Substitutes into the witness, then again into its reloaded text form.
fn reverified(w: &Witness) -> bool {
    let copy = witness_io::from_text(&witness_io::to_text(w)).unwrap();
    w.verify() && copy == *w && copy.verify()
}

fn primes() -> [Field; 3] {
    [Field::prime(2).unwrap(), Field::prime(3).unwrap(), Field::prime(5).unwrap()]
}

fn within_desk_bounds(m: &Bimodule) -> bool {
    m.space().dims().iter().all(|(&d, &n)| (-4..=4).contains(&d) && n <= 4)
}

fn uniqueness_mode(u: &UniquenessScenario, ctx: &Ctx, seed: u64) -> Mode {
    match u.lifts(ctx).unwrap().count() {
        Some(c) if c <= 256 => Mode::Exhaustive { limit: 256 },
        _ => Mode::Sample { pairs: 8, seed },
    }
}

#[test]
fn random_lift_problems_have_a_single_class_of_convolutions() {
    let start = Instant::now();
    let (mut accepted, mut rejected, mut nontrivial, mut witnesses) = (0, 0, 0, 0);
    let mut failures = Vec::new();
    for field in primes() {
        let mut seed = 0u64;
        let mut here = 0;
        while here < 20 {
            let ctx = Ctx::new();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = random_scenario(&ctx, field, &mut rng).unwrap();
            seed += 1;
            let xm = u.source().clone();
            if ![&u.x, &u.adj.m, &u.adj.n, &xm].iter().all(|m| within_desk_bounds(m)) {
                rejected += 1;
                continue;
            }
            here += 1;
            accepted += 1;
            let r = verify_uniqueness(&ctx, &u, uniqueness_mode(&u, &ctx, seed)).unwrap();
            if r.members >= 2 {
                nontrivial += 1;
            }
            witnesses += r.witnesses.len();
            if r.verdict != Verdict::SingleClass || !r.witnesses.iter().all(reverified) {
                failures.push(format!("{field:?} seed {}: {}", seed - 1, r.verdict));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let ok = failures.is_empty() && accepted >= 50 && secs < 300.0;
    line(
        "random lift problems give one class",
        ok,
        &format!(
            "{accepted} scenarios ({rejected} outside the size bounds skipped), {nontrivial} with several lifts, \
             {witnesses} witnesses, {secs:.1} s, failures {failures:?}"
        ),
    );
    assert!(ok);
}

fn load_uniqueness(name: &str) -> (Scenario, UniquenessScenario) {
    let s = resolve::load(&fixture(name)).unwrap();
    let u = s.uniqueness.first().expect("a lift problem").1.clone();
    (s, u)
}

#[test]
fn p1_object_lift_problem_is_nonvacuous_and_unique() {
    let mut details = Vec::new();
    let mut ok = true;
    for name in ["p1-f2.scn", "p1-f3.scn", "p1-q.scn"] {
        let (s, u) = load_uniqueness(name);
        let b = &s.algebra("B").unwrap();
        let h_degree = b.basis()[b.index_of("h").unwrap()].degree;
        let dim = u.lifts(&s.ctx).unwrap().dimension().unwrap();
        let r = verify_uniqueness(&s.ctx, &u, uniqueness_mode(&u, &s.ctx, 3)).unwrap();
        let good = h_degree == 2
            && b.dim() == 2
            && dim >= 1
            && r.members >= 2
            && r.verdict == Verdict::SingleClass
            && r.witnesses.iter().all(reverified);
        ok &= good;
        details.push(format!("{name}: lift dimension {dim}, {} lifts compared, {}", r.members, r.verdict));
    }
    line("ℙ¹ object has distinct lifts but one convolution", ok, &details.join("; "));
    assert!(ok);
}

/// Random `{A → B → C}` over the ground field, `count` per field.
fn three_term_corpus(count: u64) -> Vec<(Ctx, TwistedComplex)> {
    let mut out = Vec::new();
    for field in [Field::prime(2).unwrap(), Field::prime(3).unwrap(), Field::prime(5).unwrap(), Field::Rational] {
        let k = DGAlgebra::ground(field);
        for seed in 0..count {
            let ctx = Ctx::new();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = Arc::new(random_complex(&k, "A", -2..=1, 2, &mut rng));
            let b = Arc::new(random_complex(&k, "B", -2..=1, 2, &mut rng));
            let c = Arc::new(random_complex(&k, "C", -2..=1, 2, &mut rng));
            let t = random_three_term(&ctx, &a, &b, &c, &mut rng).unwrap();
            out.push((ctx, t));
        }
    }
    out
}

#[test]
fn converting_a_postnikov_system_keeps_its_convolution() {
    let corpus = three_term_corpus(26);
    let (mut passed, mut witnesses, mut nonzero_x) = (0, 0, 0);
    for (ctx, t) in &corpus {
        if !t.q(0, 2).is_zero() {
            nonzero_x += 1;
        }
        let mut good = true;
        for s in [induced_right_postnikov(t).unwrap(), induced_left_postnikov(t).unwrap()] {
            let cert = certify_conversion(ctx, &s).unwrap();
            let ws = [
                cert.source_to_lift.to_witness("source ≃ lift"),
                cert.converted_to_lift.to_witness("converted ≃ lift"),
                cert.direct.to_witness("source ≃ converted"),
            ];
            witnesses += ws.len();
            good &= cert.converted.orientation == s.orientation.opposite()
                && cert.verify()
                && ws.iter().all(reverified);
        }
        if good {
            passed += 1;
        }
    }
    let ok = passed == corpus.len() && corpus.len() >= 100;
    line(
        "conversion between left and right systems",
        ok,
        &format!("{passed}/{} complexes ({nonzero_x} with x ≠ 0), {witnesses} witnesses", corpus.len()),
    );
    assert!(ok);
}

/// A closed equivalence `conv(s) → convolve(t)` for an induced system `s` of `t`.
fn to_convolution(ctx: &Ctx, t: &TwistedComplex, orientation: Orientation) -> EquivalenceWitness {
    let s = match orientation {
        Orientation::Right => induced_right_postnikov(t).unwrap(),
        Orientation::Left => induced_left_postnikov(t).unwrap(),
    };
    let cert = certify_conversion(ctx, &s).unwrap();
    if cert.lift == *t {
        return cert.source_to_lift;
    }
    let back = unipotent_comparison(ctx, &cert.lift, t).unwrap().expect("lift compares with the complex");
    let map = back.f.retarget(cert.source_to_lift.f.target(), &t.convolve().unwrap()).unwrap();
    is_homotopy_equivalence(ctx, &map.compose(&cert.source_to_lift.f).unwrap()).unwrap().unwrap()
}

#[test]
fn both_induced_systems_share_the_convolution_of_the_complex() {
    let corpus = three_term_corpus(26);
    let mut passed = 0;
    for (ctx, t) in &corpus {
        let right = to_convolution(ctx, t, Orientation::Right);
        let left = to_convolution(ctx, t, Orientation::Left);
        let between = left.g.retarget(right.f.target(), left.f.source()).unwrap().compose(&right.f).unwrap();
        let Some(between) = is_homotopy_equivalence(ctx, &between).unwrap() else {
            continue;
        };
        let ws = [
            right.to_witness("right ≃ T"),
            left.to_witness("left ≃ T"),
            between.to_witness("right ≃ left"),
        ];
        if ws.iter().all(reverified) {
            passed += 1;
        }
    }
    let ok = passed == corpus.len();
    line("convolve(T), right and left agree", ok, &format!("{passed}/{} complexes pairwise equivalent", corpus.len()));
    assert!(ok);
}

#[test]
fn surjectivity_forces_a_single_class() {
    let f2 = Field::prime(2).unwrap();
    let k = DGAlgebra::ground(f2);
    let e = DGAlgebra::truncated_polynomial(f2, 1, 1);
    let (mut surjective, mut several, mut failures) = (0, 0, Vec::new());
    let mut examined = 0;
    for seed in 0..120u64 {
        let ctx = Ctx::new();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = if seed % 2 == 0 {
            let a = Arc::new(random_complex(&k, "A", -2..=1, 2, &mut rng));
            let b = Arc::new(random_complex(&k, "B", -2..=1, 2, &mut rng));
            let c = Arc::new(random_complex(&k, "C", -2..=1, 2, &mut rng));
            random_three_term(&ctx, &a, &b, &c, &mut rng).unwrap()
        } else {
            let free = |name: &str, rng: &mut ChaCha8Rng| {
                use rand::Rng;
                let count = rng.gen_range(1..=2);
                let shifts: Vec<i32> = (0..count).map(|_| rng.gen_range(-2..=1)).collect();
                Arc::new(twistcalc_core::sample::free_right_module(&k, &e, name, &shifts).unwrap())
            };
            let (a, b, c) = (free("A", &mut rng), free("B", &mut rng), free("C", &mut rng));
            random_three_term(&ctx, &a, &b, &c, &mut rng).unwrap()
        };
        let base = ThreeTermData::of(&t).unwrap();
        let lifts = enumerate_lifts(&ctx, &base.f, &base.g).unwrap();
        if lifts.count().is_none_or(|c| c > 1 << 12) {
            continue;
        }
        examined += 1;
        if !surjectivity_criterion(&ctx, &base, Orientation::Right).unwrap().holds {
            continue;
        }
        surjective += 1;
        let r = classify_lifts(&ctx, &lifts, 1 << 12).unwrap();
        if r.members >= 2 {
            several += 1;
        }
        if r.verdict != Verdict::SingleClass || !r.witnesses.iter().all(reverified) {
            failures.push(seed);
        }
    }

    let s = resolve::load(&fixture("counterexample.scn")).unwrap();
    let t = &s.complexes[0].1;
    let base = ThreeTermData::of(t).unwrap();
    let criterion_fails = !surjectivity_criterion(&s.ctx, &base, Orientation::Right).unwrap().holds;
    let lifts = enumerate_lifts(&s.ctx, &base.f, &base.g).unwrap();
    let r = classify_lifts(&s.ctx, &lifts, 16).unwrap();
    let dims: Vec<Vec<(i32, usize)>> = lifts
        .enumerate(16)
        .unwrap()
        .iter()
        .map(|x| cohomology_dims(&*lifts.complex(x).unwrap().convolve().unwrap()))
        .collect();
    let separated = r.verdict == Verdict::MultipleClasses && dims.iter().any(|d| *d != dims[0]);

    let ok = failures.is_empty() && surjective > 0 && several > 0 && criterion_fails && separated;
    line(
        "surjectivity gives one class, counterexample gives two",
        ok,
        &format!(
            "{examined} small instances over 𝔽₂, {surjective} surjective ({several} with several lifts), \
             failures {failures:?}; counterexample cohomology {dims:?}"
        ),
    );
    assert!(ok);
}

fn random_splitting(data: &PnFunctorData, ctx: &Ctx, seed: u64) -> BimoduleMap {
    use rand::Rng;
    let s = splittings(ctx, data).unwrap();
    let field = data.m().field();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sigma = s.particular.clone();
    for v in &s.others {
        let c: Scalar = field.from_i64(rng.gen_range(0..7));
        sigma = sigma.add(&v.sub(&s.particular).unwrap().scale(&c)).unwrap();
    }
    sigma
}

#[test]
fn psi_does_not_depend_on_the_splitting() {
    let mut ok = true;
    let mut details = Vec::new();
    for name in ["p1-f2.scn", "p1-f3.scn", "p1-q.scn", "p2-f3.scn"] {
        let s = resolve::load(&fixture(name)).unwrap();
        let data = &s.pn[0].1;
        let dimension = splittings(&s.ctx, data).unwrap().dimension;
        let mut certified = 0;
        for seed in 0..6u64 {
            let psi1 = psi_from_splitting(&s.ctx, data, &random_splitting(data, &s.ctx, 2 * seed)).unwrap();
            let psi2 = psi_from_splitting(&s.ctx, data, &random_splitting(data, &s.ctx, 2 * seed + 1)).unwrap();
            let diff = psi1.sub(&psi2).unwrap();
            if let Some(h) = null_homotopy(&s.ctx, &diff).unwrap().witness() {
                if reverified(&Witness::null_homotopy("ψ₁ − ψ₂", &diff, h)) {
                    certified += 1;
                }
            }
        }
        let psi = build_psi(&s.ctx, data).unwrap();
        let alternative = psi
            .alternative
            .as_ref()
            .is_some_and(|(p2, h)| reverified(&Witness::null_homotopy("ψ − ψ₂", &psi.psi.sub(p2).unwrap(), h)));
        ok &= dimension >= 1 && certified == 6 && alternative;
        details.push(format!("{name}: {dimension} splitting directions, {certified}/6 pairs certified"));
    }
    line("ψ is independent of the splitting", ok, &details.join("; "));
    assert!(ok);
}

fn conditions(ctx: &Ctx, data: &PnFunctorData) -> [ConditionCheck; 3] {
    [
        check_monad_condition(ctx, data).unwrap(),
        check_adjoints_condition(ctx, data).unwrap(),
        check_highest_degree_condition(ctx, data).unwrap(),
    ]
}

#[test]
fn pn_conditions_hold_and_each_defect_is_caught() {
    let mut ok = true;
    let mut details = Vec::new();
    for name in ["p1-f2.scn", "p1-f3.scn", "p1-q.scn"] {
        let s = resolve::load(&fixture(name)).unwrap();
        let (ctx, data) = (&s.ctx, &s.pn[0].1);
        let zero = data.m().field().zero();
        let clean = conditions(ctx, data);
        let clean_ok = clean
            .iter()
            .all(|c| c.holds && c.witness.as_ref().is_some_and(|w| reverified(&w.to_witness(c.name))));

        let psi = build_psi(ctx, data).unwrap().psi;
        let mut no_psi = data.clone();
        no_psi.psi = Some(psi.scale(&zero));
        let mut no_mu = data.clone();
        no_mu.mu_top = Some(data.ext.mu(1).unwrap().scale(&zero));
        let mut no_dual = data.clone();
        no_dual.psi_prime = Some(left_dual_psi(ctx, data, &psi).unwrap().scale(&zero));

        let mut caught = Vec::new();
        for (i, defect) in [no_psi, no_mu, no_dual].iter().enumerate() {
            let checks = conditions(ctx, defect);
            let pattern: Vec<bool> = checks.iter().map(|c| c.holds).collect();
            let only_target = pattern.iter().enumerate().all(|(j, &h)| h != (i == j));
            ok &= only_target;
            caught.push(format!("{} → {:?}", checks[i].name, pattern));
        }
        ok &= clean_ok;
        details.push(format!("{name}: clean {}, defects {}", clean_ok, caught.join(", ")));
    }
    line("ℙⁿ conditions pass and each defect fails its checker", ok, &details.join("; "));
    assert!(ok);
}

#[test]
fn every_emitted_witness_reverifies_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    let commands = [
        Command::Validate,
        Command::CheckAdjunction,
        Command::VerifyUniqueness,
        Command::CheckPnConditions,
        Command::BuildPtwist,
        Command::PostnikovRoundtrip,
    ];
    let (mut total, mut bad) = (0, Vec::new());
    for path in fixtures() {
        let s = resolve::load(&path).unwrap();
        for cmd in commands {
            let mut report = run(cmd, &s, &path.display().to_string(), &Options::default());
            let out = dir.path().join(format!("{}-{}", path.file_stem().unwrap().to_string_lossy(), cmd.name()));
            report.emit_witnesses(&out).unwrap();
            for (entry, w) in report.witnesses.iter().zip(&report.witness_data) {
                total += 1;
                let file = witness_io::read(Path::new(entry.file.as_ref().unwrap())).unwrap();
                if !(entry.verified && file == *w && file.verify()) {
                    bad.push(format!("{} / {}", entry.section, entry.label));
                }
            }
        }
    }
    let ok = bad.is_empty() && total > 0;
    line("every emitted witness re-verifies", ok, &format!("{total} witnesses written and reloaded, failures {bad:?}"));
    assert!(ok);
}
