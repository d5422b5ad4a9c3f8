//! ℙⁿ-functors `F = – ⊗ M`: the cyclic extension `Q_n` of the monad, the
//! three defining conditions, the map `ψ: FHR → FR` and the ℙ-twist.

mod conditions;
mod extension;
mod model;
mod psi;
mod ptwist;

use std::sync::Arc;

use crate::adjunction::AdjunctionData;
use crate::dgalg::{Bimodule, BimoduleMap};

pub use conditions::{
    check_adjoints_condition, check_highest_degree_condition, check_monad_condition, ConditionCheck,
};
pub use extension::{gamma_inverse, validate_cyclic_extension, CyclicExtensionData, KERNEL_ASSUMPTION};
pub use model::{p1_model, p1_uniqueness_scenario, pn_model, solve_gamma};
pub use psi::{build_psi, cotwist, left_dual_psi, psi_from_splitting, splittings, Cotwist, PsiResult, Splittings};
pub use ptwist::{build_ptwist, PTwistResult};

/// `F ⊣ R` with `F = – ⊗ M`, a left adjoint `L ⊣ F`, and the cyclic
/// extension of `RF` by `H`.
#[derive(Clone, Debug)]
pub struct PnFunctorData {
    pub adj: AdjunctionData,
    /// `L ⊣ F`, stored with `m = L` and `n = M`.
    pub left: Option<AdjunctionData>,
    pub ext: CyclicExtensionData,
    /// Replaces the computed `ψ`.
    pub psi: Option<BimoduleMap>,
    /// The map `FL → FH′L`; computed from `ψ` when absent.
    pub psi_prime: Option<BimoduleMap>,
    /// Replaces `μ_n: Q_n → H^n`.
    pub mu_top: Option<BimoduleMap>,
}

impl PnFunctorData {
    pub fn new(adj: AdjunctionData, ext: CyclicExtensionData) -> PnFunctorData {
        PnFunctorData {
            adj,
            left: None,
            ext,
            psi: None,
            psi_prime: None,
            mu_top: None,
        }
    }

    pub fn with_left(mut self, left: AdjunctionData) -> PnFunctorData {
        self.left = Some(left);
        self
    }

    pub fn m(&self) -> &Arc<Bimodule> {
        &self.adj.m
    }

    pub fn n_mod(&self) -> &Arc<Bimodule> {
        &self.adj.n
    }

    pub fn h(&self) -> &Arc<Bimodule> {
        &self.ext.h
    }
}

/// Coefficient vectors to try on an affine solution space: zero, all ones,
/// the unit vectors, then seeded random draws.
pub(crate) fn candidates(field: crate::exactalg::Field, dim: usize, count: usize) -> Vec<Vec<crate::exactalg::Scalar>> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    let mut out = vec![vec![field.zero(); dim]];
    if dim > 0 {
        out.push(vec![field.one(); dim]);
        out.extend((0..dim).map(|i| (0..dim).map(|j| if i == j { field.one() } else { field.zero() }).collect()));
    }
    while dim > 0 && out.len() < count {
        out.push((0..dim).map(|_| field.random(&mut rng)).collect());
    }
    out.truncate(count.max(1));
    out
}
