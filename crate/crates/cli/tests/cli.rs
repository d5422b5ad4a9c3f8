use std::path::{Path, PathBuf};
use std::process::{Command as Process, Output};

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use twistcalc::generate::{self, Kind};
use twistcalc::report::Outcome;
use twistcalc::scenario::{self, ScenarioFile};
use twistcalc::witness_io;
use twistcalc::{resolve, run, CliError, Command, Options, SearchMode};
use twistcalc_core::adjunction::random_scenario;
use twistcalc_core::dgalg::Ctx;
use twistcalc_core::exactalg::Field;
use twistcalc_core::witness::Witness;

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

fn twistcalc(args: &[&str]) -> Output {
    Process::new(env!("CARGO_BIN_EXE_twistcalc")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn every_fixture_parses_resolves_and_prints_back() {
    for path in fixtures() {
        let text = std::fs::read_to_string(&path).unwrap();
        let file = scenario::parse(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let again = scenario::parse(&file.to_string()).unwrap();
        assert_eq!(file, again, "{}", path.display());
        resolve::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}

#[test]
fn generated_kinds_round_trip() {
    let f3 = Field::prime(3).unwrap();
    for kind in [
        Kind::Uniqueness,
        Kind::ThreeTerm,
        Kind::PnObject { n: 1 },
        Kind::PnObject { n: 2 },
        Kind::Counterexample,
    ] {
        let file = generate::generate(kind, f3, 4).unwrap();
        assert_eq!(scenario::parse(&file.to_string()).unwrap(), file, "{kind:?}");
        resolve::resolve(file).unwrap();
    }
}

#[test]
fn generation_is_deterministic() {
    let f5 = Field::prime(5).unwrap();
    let a = generate::generate(Kind::Uniqueness, f5, 11).unwrap().to_string();
    let b = generate::generate(Kind::Uniqueness, f5, 11).unwrap().to_string();
    assert_eq!(a, b);
}

#[test]
fn non_prime_field_is_located() {
    let err = scenario::parse("twistcalc-scenario 1\nfield prime 4\n").unwrap_err();
    assert!(matches!(err, CliError::Parse { line: 2, .. }), "{err}");
    assert!(err.to_string().contains("4 is not prime"));
}

#[test]
fn missing_header_is_rejected() {
    assert!(matches!(scenario::parse("field prime 2\n"), Err(CliError::Parse { line: 1, .. })));
}

#[test]
fn unknown_bimodule_is_located() {
    let text = "twistcalc-scenario 1\nfield prime 2\nalgebra k ground\nbimodule S shift Q 1\n";
    let Err(err) = resolve::from_text(text) else { panic!("resolved") };
    let msg = err.to_string();
    assert!(matches!(err, CliError::Parse { line: 4, .. }), "{msg}");
    assert!(msg.contains('S') && msg.contains('Q'), "{msg}");
}

#[test]
fn duplicate_names_are_rejected() {
    let text = "twistcalc-scenario 1\nfield prime 2\nalgebra k ground\nalgebra k ground\n";
    assert!(scenario::parse(text).is_err());
}

#[test]
fn exit_codes_follow_the_outcome() {
    let p1 = fixture("p1-f2.scn");
    let p1 = p1.to_str().unwrap();
    for cmd in ["validate", "check-adjunction", "check-pn-conditions", "build-ptwist", "verify-uniqueness"] {
        assert_eq!(code(&twistcalc(&[cmd, p1])), 0, "{cmd}");
    }
    let ce = fixture("counterexample.scn");
    assert_eq!(code(&twistcalc(&["verify-uniqueness", ce.to_str().unwrap()])), 1);
    let broken = fixture("broken-trace.scn");
    assert_eq!(code(&twistcalc(&["check-adjunction", broken.to_str().unwrap()])), 1);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.scn");
    std::fs::write(&bad, "twistcalc-scenario 1\nfield prime 4\n").unwrap();
    let out = twistcalc(&["validate", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    assert_eq!(code(&twistcalc(&["validate", "/nonexistent.scn"])), 2);
    assert_eq!(code(&twistcalc(&["validate", p1, "--mode", "sideways"])), 2);
}

#[test]
fn structured_output_is_json_and_deterministic() {
    let path = fixture("uniqueness-f3.scn");
    let s = resolve::load(&path).unwrap();
    let opts = Options {
        mode: SearchMode::Sample(4),
        seed: 9,
    };
    let a = run(Command::VerifyUniqueness, &s, "u", &opts);
    let b = run(Command::VerifyUniqueness, &s, "u", &opts);
    assert_eq!(a.canonical_json(), b.canonical_json());

    let out = twistcalc(&["verify-uniqueness", path.to_str().unwrap(), "--format", "structured", "--mode", "sample", "4", "--seed", "9"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["outcome"], "pass");
    assert_eq!(v["exit_code"], 0);
    assert!(v["sections"].as_array().is_some_and(|s| !s.is_empty()));
}

#[test]
fn emitted_witnesses_verify_and_tampering_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    let p1 = fixture("p1-f3.scn");
    let out = twistcalc(&["check-pn-conditions", p1.to_str().unwrap(), "--emit-witnesses", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    assert!(!files.is_empty());
    let args: Vec<&str> = std::iter::once("verify-witness").chain(files.iter().map(|f| f.to_str().unwrap())).collect();
    assert_eq!(code(&twistcalc(&args)), 0);

    // `d(h) = f` cannot survive a change to one coordinate of `f`.
    let tampered = files
        .iter()
        .find_map(|p| match witness_io::read(p).unwrap() {
            Witness::NullHomotopy { label, d_source, d_target, f, h } if f.raw_len() > 0 => {
                let mut v = f.to_vec();
                v[0] = &v[0] + &f.field().one();
                Some(Witness::NullHomotopy { label, d_source, d_target, f: f.with_vec(&v), h })
            }
            _ => None,
        })
        .expect("a null-homotopy witness");
    let bad = dir.path().join("tampered.wit");
    witness_io::write(&bad, &tampered).unwrap();
    assert_eq!(code(&twistcalc(&["verify-witness", bad.to_str().unwrap()])), 1);
}

#[test]
fn counterexample_report_names_the_invariant() {
    let s = resolve::load(&fixture("counterexample.scn")).unwrap();
    let r = run(Command::VerifyUniqueness, &s, "ce", &Options::default());
    assert_eq!(r.outcome, Outcome::MathematicalFailure);
    let text = r.to_text();
    assert!(text.contains("cohomology dimensions"), "{text}");
}

#[test]
fn generator_cli_writes_a_loadable_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.scn");
    assert_eq!(code(&twistcalc(&["generate", "pn-object", "--n", "2", "--field", "rational", "--out", out.to_str().unwrap()])), 0);
    resolve::load(&out).unwrap();
    assert_eq!(code(&twistcalc(&["generate", "nonsense"])), 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn uniqueness_files_reproduce_the_scenario(seed in 0u64..1000, p in prop::sample::select(vec![2u64, 3, 5])) {
        let field = Field::prime(p).unwrap();
        let ctx = Ctx::new();
        let original = random_scenario(&ctx, field, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let file: ScenarioFile = generate::uniqueness_file(&original);
        let text = file.to_string();
        prop_assert_eq!(&scenario::parse(&text).unwrap(), &file);
        let s = resolve::from_text(&text).unwrap();
        let (_, u) = &s.uniqueness[0];
        prop_assert_eq!(u.adj.m.as_ref(), original.adj.m.as_ref());
        prop_assert_eq!(u.adj.n.as_ref(), original.adj.n.as_ref());
        prop_assert_eq!(u.x.as_ref(), original.x.as_ref());
        prop_assert_eq!(&u.f, &original.f);
        prop_assert_eq!(&u.adj.trace, &original.adj.trace);
    }
}
