//! Seeded random instances: small complexes, closed maps, three-term twisted complexes.

use std::ops::RangeInclusive;
use std::sync::Arc;

use rand::Rng;

use crate::dgalg::{BasisElement, Bimodule, BimoduleMap, Ctx, DGAlgebra, Side, System};
use crate::error::Result;
use crate::exactalg::{Field, GradedMap, GradedSpace, Matrix, Scalar};
use crate::twisted::TwistedComplex;

fn random_invertible<R: Rng + ?Sized>(field: Field, n: usize, rng: &mut R) -> Matrix {
    loop {
        let mut m = Matrix::zeros(field, n, n);
        for r in 0..n {
            for c in 0..n {
                m.set(r, c, field.random(rng));
            }
        }
        if m.rank() == n {
            return m;
        }
    }
}

/// A complex of vector spaces (a bimodule over the ground field on both
/// sides) with at most `max_per_degree` basis vectors per degree, built from
/// random cells and scrambled by a random degree-preserving basis change.
pub fn random_complex<R: Rng + ?Sized>(
    k: &Arc<DGAlgebra>,
    name: &str,
    degrees: RangeInclusive<i32>,
    max_per_degree: usize,
    rng: &mut R,
) -> Bimodule {
    let f = k.field();
    let (lo, hi) = (*degrees.start(), *degrees.end());
    let mut dims: std::collections::BTreeMap<i32, usize> = Default::default();
    // (degree of source, is a pair)
    let mut cells: Vec<(i32, bool)> = Vec::new();
    let attempts = rng.gen_range(1..=3);
    for _ in 0..attempts {
        let deg = rng.gen_range(lo..=hi);
        let pair = deg < hi && rng.gen_bool(0.5);
        let fits = dims.get(&deg).copied().unwrap_or(0) < max_per_degree
            && (!pair || dims.get(&(deg + 1)).copied().unwrap_or(0) < max_per_degree);
        if fits {
            *dims.entry(deg).or_default() += 1;
            if pair {
                *dims.entry(deg + 1).or_default() += 1;
            }
            cells.push((deg, pair));
        }
    }
    let space = GradedSpace::new(dims.iter().map(|(d, n)| (*d, *n)));
    let mut fill = std::collections::BTreeMap::<i32, usize>::new();
    let mut d = Matrix::zeros(f, space.total(), space.total());
    for (deg, pair) in cells {
        let i = space.offset(deg) + *fill.entry(deg).or_default();
        *fill.get_mut(&deg).unwrap() += 1;
        if pair {
            let j = space.offset(deg + 1) + *fill.entry(deg + 1).or_default();
            *fill.get_mut(&(deg + 1)).unwrap() += 1;
            d.set(j, i, f.random_nonzero(rng));
        }
    }
    let d = GradedMap::from_flat(&space, &space, 1, &d).expect("homogeneous");
    let p = GradedMap::from_blocks(
        f,
        &space,
        &space,
        0,
        space.dims().iter().map(|(deg, n)| (*deg, random_invertible(f, *n, rng))).collect::<Vec<_>>(),
    )
    .expect("square blocks");
    let d = p.compose(&d).unwrap().compose(&p.inverse().unwrap()).unwrap();
    let basis: Vec<BasisElement> = space
        .flat_degrees()
        .iter()
        .enumerate()
        .map(|(i, deg)| BasisElement::new(format!("{name}{i}"), *deg))
        .collect();
    let id = GradedMap::identity(f, &space);
    Bimodule::from_graded(name, k.clone(), k.clone(), basis, d, vec![id.clone()], vec![id])
}

/// A random closed map of the given degree.
pub fn random_closed_map<R: Rng + ?Sized>(
    ctx: &Ctx,
    source: &Arc<Bimodule>,
    target: &Arc<Bimodule>,
    degree: i32,
    rng: &mut R,
) -> Result<BimoduleMap> {
    let f = source.field();
    let mut sys = System::new(ctx, f);
    let u = sys.unknown(source, target, degree);
    let eq = sys.equation("d(u) = 0", &BimoduleMap::zero(source, target, degree + 1));
    sys.differential_term(eq, f.one(), u);
    let sol = sys.solve()?;
    let coeffs: Vec<Scalar> = (0..sol.kernel_dim()).map(|_| f.random(rng)).collect();
    Ok(sol.point(&coeffs, u).expect("homogeneous system"))
}

/// A random valid `{A@−2, B@−1, C@0}`: `f` random closed, then `(g, x)` a
/// random point of `{dg = 0, g f + dx = 0}`.
pub fn random_three_term<R: Rng + ?Sized>(
    ctx: &Ctx,
    a: &Arc<Bimodule>,
    b: &Arc<Bimodule>,
    c: &Arc<Bimodule>,
    rng: &mut R,
) -> Result<TwistedComplex> {
    let field = a.field();
    let f = random_closed_map(ctx, a, b, 0, rng)?;
    let mut sys = System::new(ctx, field);
    let g = sys.unknown(b, c, 0);
    let x = sys.unknown(a, c, -1);
    let closed = sys.equation("d(g) = 0", &BimoduleMap::zero(b, c, 1));
    sys.differential_term(closed, field.one(), g);
    let mc = sys.equation("g f + dx = 0", &BimoduleMap::zero(a, c, 0));
    sys.term(mc, field.one(), None, g, Some(&f)).differential_term(mc, field.one(), x);
    let sol = sys.solve()?;
    let coeffs: Vec<Scalar> = (0..sol.kernel_dim()).map(|_| field.random(rng)).collect();
    TwistedComplex::three_term(
        a,
        b,
        c,
        &f,
        &sol.point(&coeffs, g).expect("homogeneous"),
        &sol.point(&coeffs, x).expect("homogeneous"),
    )
}

/// `⊕ B[s]` as a module with ground left algebra, free on the right.
pub fn free_right_module(k: &Arc<DGAlgebra>, b: &Arc<DGAlgebra>, name: &str, shifts: &[i32]) -> Result<Bimodule> {
    let diag = Bimodule::diagonal(b).restrict_left(k);
    let parts: Vec<Arc<Bimodule>> = shifts.iter().map(|&s| Arc::new(diag.shift(s))).collect();
    Ok(Bimodule::direct_sum(name, &parts)?.renamed(name))
}

/// `⊕ B[s]` with ground right algebra, free on the left.
pub fn free_left_module(k: &Arc<DGAlgebra>, b: &Arc<DGAlgebra>, name: &str, shifts: &[i32]) -> Result<Bimodule> {
    let diag = Bimodule::diagonal(b).restrict_right(k);
    let parts: Vec<Arc<Bimodule>> = shifts.iter().map(|&s| Arc::new(diag.shift(s))).collect();
    let out = Bimodule::direct_sum(name, &parts)?.renamed(name);
    debug_assert!(out.semifree(Side::Left).is_some());
    Ok(out)
}
