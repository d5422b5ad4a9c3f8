//! Core objects back into scenario syntax.

use std::sync::Arc;

use twistcalc_core::dgalg::{Bimodule, BimoduleMap, DGAlgebra, Side};
use twistcalc_core::exactalg::GradedMap;

use crate::scenario::{AlgebraDef, BimoduleDef, Block, Blocks, MapDef, Word};

/// Basis names become single tokens.
fn token(name: &str) -> String {
    let t: String = name.chars().map(|c| if c.is_whitespace() || c == '#' { '_' } else { c }).collect();
    if t.is_empty() {
        "_".into()
    } else {
        t
    }
}

pub fn blocks(g: &GradedMap) -> Blocks {
    g.blocks()
        .iter()
        .filter(|(_, m)| !m.is_zero())
        .map(|(d, m)| Block {
            degree: *d,
            rows: m.rows(),
            cols: m.cols(),
            entries: (0..m.rows()).map(|r| m.row(r).to_vec()).collect(),
        })
        .collect()
}

/// Recognises the built-in families before falling back to a multiplication table.
pub fn algebra(a: &DGAlgebra) -> AlgebraDef {
    let f = a.field();
    if *a == *DGAlgebra::ground(f) {
        return AlgebraDef::Ground;
    }
    if *a == *DGAlgebra::resolved_dual_numbers(f) {
        return AlgebraDef::ResolvedDualNumbers;
    }
    for degree in -4..=4 {
        for top in 1..=6 {
            if *a == *DGAlgebra::truncated_polynomial(f, degree, top) {
                return AlgebraDef::TruncatedPolynomial { degree, top };
            }
        }
    }
    let names: Vec<String> = a.basis().iter().map(|b| token(&b.name)).collect();
    let mut products = Vec::new();
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            let v = a.product_of_basis(i, j);
            if v.iter().any(|s| !s.is_zero()) {
                products.push((names[i].clone(), names[j].clone(), v.to_vec()));
            }
        }
    }
    AlgebraDef::Explicit {
        basis: names.iter().cloned().zip(a.basis().iter().map(|b| b.degree)).collect(),
        unit: a.unit().to_vec(),
        products,
        idempotents: a.idempotents().to_vec(),
        differential: blocks(a.differential()),
    }
}

/// An explicit definition, with the acting algebras under the given names.
pub fn bimodule(m: &Bimodule, left: &str, right: &str) -> BimoduleDef {
    let action = |alg: &Arc<DGAlgebra>, maps: &[GradedMap]| -> Vec<(String, Blocks)> {
        alg.basis()
            .iter()
            .zip(maps)
            .map(|(b, g)| (token(&b.name), blocks(g)))
            .filter(|(_, b)| !b.is_empty())
            .collect()
    };
    let semifree = [Side::Left, Side::Right]
        .into_iter()
        .filter_map(|s| m.semifree(s).map(|g| (s, g.clone())))
        .collect();
    BimoduleDef::Explicit {
        left: left.into(),
        right: right.into(),
        basis: m.basis().iter().map(|b| (token(&b.name), b.degree)).collect(),
        differential: blocks(m.differential()),
        left_action: action(m.left(), m.left_action()),
        right_action: action(m.right(), m.right_action()),
        semifree,
    }
}

pub fn map(f: &BimoduleMap, source: Word, target: Word) -> MapDef {
    MapDef::Explicit {
        source,
        target,
        degree: f.degree(),
        blocks: blocks(f.map()),
    }
}

pub fn word(atoms: &[&str]) -> Word {
    atoms.iter().map(|s| s.to_string()).collect()
}
