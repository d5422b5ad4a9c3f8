//! Scenario generators: random inputs for the checkers and the standard examples.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use twistcalc_core::adjunction::{random_scenario, UniquenessScenario};
use twistcalc_core::dgalg::{same_algebra, Ctx, DGAlgebra};
use twistcalc_core::exactalg::Field;
use twistcalc_core::pfunctor::{build_psi, p1_uniqueness_scenario, pn_model};
use twistcalc_core::sample::{random_complex, random_three_term};
use twistcalc_core::twisted::TwistedComplex;

use crate::error::{CliError, CliResult};
use crate::export;
use crate::scenario::{AdjunctionDef, AlgebraDef, BimoduleDef, ItemDef, MapDef, PnDef, ScenarioFile};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    /// A random adjunction, `X = ℬ ⊗ V` and a map `f` with `trace ∘ f ≃ 0`.
    Uniqueness,
    /// A random three-term twisted complex of complexes of vector spaces.
    ThreeTerm,
    /// `– ⊗ k[h]/h^{n+1}` as a ℙⁿ-functor.
    PnObject { n: usize },
    /// A three-term complex over `k[ε]/ε²` with two inequivalent convolutions.
    Counterexample,
}

impl Kind {
    pub fn parse(name: &str, n: usize) -> CliResult<Kind> {
        Ok(match name {
            "uniqueness" => Kind::Uniqueness,
            "three-term" => Kind::ThreeTerm,
            "p1-object" => Kind::PnObject { n: 1 },
            "pn-object" => Kind::PnObject { n },
            "counterexample" => Kind::Counterexample,
            other => return Err(CliError::Usage(format!("unknown scenario kind `{other}`"))),
        })
    }
}

pub fn generate(kind: Kind, field: Field, seed: u64) -> CliResult<ScenarioFile> {
    match kind {
        Kind::Uniqueness => {
            let ctx = Ctx::new();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok(uniqueness_file(&random_scenario(&ctx, field, &mut rng)?))
        }
        Kind::ThreeTerm => {
            let ctx = Ctx::new();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let k = DGAlgebra::ground(field);
            let a = Arc::new(random_complex(&k, "A", -2..=2, 2, &mut rng));
            let b = Arc::new(random_complex(&k, "B", -2..=2, 2, &mut rng));
            let c = Arc::new(random_complex(&k, "C", -2..=2, 2, &mut rng));
            Ok(three_term_file(field, &random_three_term(&ctx, &a, &b, &c, &mut rng)?))
        }
        Kind::PnObject { n } => pn_file(field, n),
        Kind::Counterexample => Ok(counterexample_file()),
    }
}

fn algebra_item(file: &mut ScenarioFile, name: &str, a: &DGAlgebra) {
    file.push(name, ItemDef::Algebra(export::algebra(a)));
}

/// Explicit definitions of everything in a uniqueness scenario.
pub fn uniqueness_file(s: &UniquenessScenario) -> ScenarioFile {
    let adj = &s.adj;
    let mut file = ScenarioFile::new(adj.m.field());
    let one_algebra = same_algebra(&adj.a_alg, &adj.b_alg);
    let (an, bn) = if one_algebra { ("k", "k") } else { ("k", "B") };
    algebra_item(&mut file, an, &adj.a_alg);
    if !one_algebra {
        algebra_item(&mut file, bn, &adj.b_alg);
    }
    let (da, db) = (format!("diag({an})"), format!("diag({bn})"));
    file.push("M", ItemDef::Bimodule(export::bimodule(&adj.m, an, bn)));
    file.push("N", ItemDef::Bimodule(export::bimodule(&adj.n, bn, an)));
    file.push("trace", ItemDef::Map(export::map(&adj.trace, export::word(&["N", "M"]), vec![db.clone()])));
    file.push("action", ItemDef::Map(export::map(&adj.action, vec![da], export::word(&["M", "N"]))));
    let zeta = match (&adj.zeta_m, &adj.zeta_n) {
        (Some(zm), Some(zn)) => {
            file.push("zetaM", ItemDef::Map(export::map(zm, export::word(&["M"]), export::word(&["M"]))));
            file.push("zetaN", ItemDef::Map(export::map(zn, export::word(&["N"]), export::word(&["N"]))));
            Some(("zetaM".to_string(), "zetaN".to_string()))
        }
        _ => None,
    };
    file.push(
        "F",
        ItemDef::Adjunction(AdjunctionDef::Given {
            m: "M".into(),
            n: "N".into(),
            trace: "trace".into(),
            action: "action".into(),
            zeta,
        }),
    );
    file.push("X", ItemDef::Bimodule(export::bimodule(&s.x, bn, an)));
    file.push("f", ItemDef::Map(export::map(&s.f, export::word(&["X", "M"]), export::word(&["N", "M"]))));
    let h0 = s.h0.as_ref().map(|h| {
        file.push("h0", ItemDef::Map(export::map(h, export::word(&["X", "M"]), vec![db.clone()])));
        "h0".to_string()
    });
    file.push(
        "U",
        ItemDef::Uniqueness {
            adjunction: "F".into(),
            x: "X".into(),
            f: "f".into(),
            h0,
        },
    );
    file
}

/// `A → B → C` over the ground field, every term and map explicit.
pub fn three_term_file(field: Field, t: &TwistedComplex) -> ScenarioFile {
    let mut file = ScenarioFile::new(field);
    file.push("k", ItemDef::Algebra(AlgebraDef::Ground));
    let names = ["A", "B", "C"];
    for (i, n) in names.iter().enumerate() {
        file.push(*n, ItemDef::Bimodule(export::bimodule(t.module(i), "k", "k")));
    }
    let mut q = Vec::new();
    for (a, b, name) in [(0, 1, "f"), (1, 2, "g"), (0, 2, "x")] {
        file.push(name, ItemDef::Map(export::map(&t.q(a, b), vec![names[a].into()], vec![names[b].into()])));
        q.push((a, b, name.to_string()));
    }
    file.push(
        "T",
        ItemDef::Complex {
            terms: (0..3).map(|i| (t.position(i), names[i].to_string())).collect(),
            q,
        },
    );
    file
}

fn bimodule(file: &mut ScenarioFile, name: &str, def: BimoduleDef) {
    file.push(name, ItemDef::Bimodule(def));
}

/// The ℙⁿ-functor `– ⊗ k[h]/h^{n+1}` with `|h| = 2`, built from named pieces,
/// and the lift problem `X = N[−1] ⊕ N ⊗ H`, `f = (0, ψ)` with `X` and `f` explicit.
pub fn pn_file(field: Field, n: usize) -> CliResult<ScenarioFile> {
    if n == 0 {
        return Err(CliError::Usage("a ℙⁿ object needs n ≥ 1".into()));
    }
    let mut file = ScenarioFile::new(field);
    file.push("k", ItemDef::Algebra(AlgebraDef::Ground));
    file.push("B", ItemDef::Algebra(AlgebraDef::TruncatedPolynomial { degree: 2, top: n }));
    let s = |x: &str| x.to_string();
    bimodule(&mut file, "M", BimoduleDef::FreeRight { left: s("k"), right: s("B"), shifts: vec![0] });
    bimodule(&mut file, "N", BimoduleDef::FreeLeft { left: s("B"), right: s("k"), shifts: vec![0] });
    file.push("F", ItemDef::Adjunction(AdjunctionDef::Free { m: s("M"), n: s("N") }));
    bimodule(&mut file, "H", BimoduleDef::Shift { source: s("diag(k)"), by: -2 });
    bimodule(&mut file, "Hinv", BimoduleDef::Shift { source: s("diag(k)"), by: 2 });
    file.push("HA", ItemDef::Adjunction(AdjunctionDef::Free { m: s("Hinv"), n: s("H") }));
    bimodule(&mut file, "L", BimoduleDef::Dual(s("M")));
    file.push("G", ItemDef::Adjunction(AdjunctionDef::DualLeft { m: s("M"), l: s("L") }));
    let mut terms = vec![s("diag(k)")];
    for j in 1..=n {
        let power = if j == 1 {
            s("H")
        } else {
            let name = format!("H{j}");
            bimodule(&mut file, &name, BimoduleDef::Tensor(vec![s("H"); j]));
            name
        };
        let name = format!("T{j}");
        bimodule(&mut file, &name, BimoduleDef::Shift { source: power, by: -(j as i32) });
        terms.push(name);
    }
    file.push(
        "P",
        ItemDef::Pn(PnDef {
            adjunction: s("F"),
            h: s("H"),
            terms,
            left: Some(s("G")),
            inverse: Some(s("HA")),
            ..PnDef::default()
        }),
    );
    let ctx = Ctx::new();
    let data = pn_model(&ctx, field, n)?;
    let psi = build_psi(&ctx, &data)?.psi;
    let u = p1_uniqueness_scenario(&ctx, &data, &psi)?;
    file.push("X", ItemDef::Bimodule(export::bimodule(&u.x, "B", "k")));
    file.push("f", ItemDef::Map(export::map(&u.f, export::word(&["X", "M"]), export::word(&["N", "M"]))));
    file.push(
        "U",
        ItemDef::Uniqueness {
            adjunction: s("F"),
            x: s("X"),
            f: s("f"),
            h0: None,
        },
    );
    Ok(file)
}

/// `A → 0 → C` with `A = ℰ[2]`, `C = ℰ`, `ℰ = k[ε]/ε²`, `|ε| = 1`, over `𝔽₂`.
pub fn counterexample_file() -> ScenarioFile {
    let s = |x: &str| x.to_string();
    let mut file = ScenarioFile::new(Field::prime(2).expect("2 is prime"));
    file.push("k", ItemDef::Algebra(AlgebraDef::Ground));
    file.push("E", ItemDef::Algebra(AlgebraDef::TruncatedPolynomial { degree: 1, top: 1 }));
    bimodule(&mut file, "A", BimoduleDef::FreeRight { left: s("k"), right: s("E"), shifts: vec![-2] });
    bimodule(&mut file, "Z", BimoduleDef::Zero { left: s("k"), right: s("E") });
    bimodule(&mut file, "C", BimoduleDef::FreeRight { left: s("k"), right: s("E"), shifts: vec![0] });
    file.push("f", ItemDef::Map(MapDef::Zero { source: vec![s("A")], target: vec![s("Z")], degree: 0 }));
    file.push("g", ItemDef::Map(MapDef::Zero { source: vec![s("Z")], target: vec![s("C")], degree: 0 }));
    file.push(
        "T",
        ItemDef::Complex {
            terms: vec![(-2, s("A")), (-1, s("Z")), (0, s("C"))],
            q: vec![(0, 1, s("f")), (1, 2, s("g"))],
        },
    );
    file
}
