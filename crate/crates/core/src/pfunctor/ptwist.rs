use std::sync::Arc;

use super::psi::build_psi;
use super::PnFunctorData;
use crate::adjunction::{verify_uniqueness, Mode, UniquenessScenario};
use crate::dgalg::{Bimodule, BimoduleMap, Ctx};
use crate::error::{Error, Result};
use crate::postnikov::EquivalenceReport;

const EXHAUSTIVE_LIMIT: u128 = 16;

#[derive(Clone, Debug)]
pub struct PTwistResult {
    /// The convolution of `FHR → FR → id`.
    pub twist: Arc<Bimodule>,
    pub psi: BimoduleMap,
    pub lift_used: BimoduleMap,
    pub scenario: UniquenessScenario,
    pub uniqueness: EquivalenceReport,
}

/// The ℙ-twist as the convolution of `FHR → FR → id` (maps ψ and trace), with the
/// independence of the lift checked exhaustively when there are at most 16
/// lifts and on a fixed sample otherwise.
pub fn build_ptwist(ctx: &Ctx, data: &PnFunctorData, mode: Option<Mode>) -> Result<PTwistResult> {
    let psi = match &data.psi {
        Some(p) => p.clone(),
        None => build_psi(ctx, data)?.psi,
    };
    let x = ctx.module(&[data.n_mod().clone(), data.h().clone()])?;
    let scenario = UniquenessScenario::new(ctx, data.adj.clone(), &x, &psi, None)?;
    let lifts = scenario.lifts(ctx)?;
    let lift_used = lifts
        .particular()
        .cloned()
        .ok_or_else(|| Error::Precondition("trace ∘ ψ is not null-homotopic".into()))?;
    let twist = scenario.complex(&lift_used)?.convolve()?;
    let mode = mode.unwrap_or(match lifts.count() {
        Some(c) if c <= EXHAUSTIVE_LIMIT => Mode::Exhaustive { limit: EXHAUSTIVE_LIMIT },
        _ => Mode::Sample { pairs: 8, seed: 0 },
    });
    let uniqueness = verify_uniqueness(ctx, &scenario, mode)?;
    Ok(PTwistResult {
        twist,
        psi,
        lift_used,
        scenario,
        uniqueness,
    })
}
