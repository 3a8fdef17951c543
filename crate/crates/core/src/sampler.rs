//! Transition-mode sampling: uniform configuration, uniform modes, then projection.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constraint::{max_abs, ConstraintSet, Mode, ModeVector};
use crate::error::Result;
use crate::robot::{Configuration, KinematicChain};

/// Deterministic generator used by samplers and planners.
pub type PlannerRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> PlannerRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Each angle independently uniform on its joint interval.
pub fn sample_uniform_configuration<R: Rng + ?Sized>(
    chain: &KinematicChain,
    rng: &mut R,
) -> Configuration {
    chain
        .joints()
        .iter()
        .map(|j| {
            let [lo, hi] = j.limits;
            if lo < hi {
                rng.gen_range(lo..=hi)
            } else {
                lo
            }
        })
        .collect::<Vec<_>>()
        .into()
}

/// Draws a mode uniformly from {0, 1, 2} for every transition spec and stores it on
/// the set. Sliding specs are untouched. Returns the resulting mode vector.
pub fn sample_transition_modes<R: Rng + ?Sized>(set: &mut ConstraintSet, rng: &mut R) -> ModeVector {
    for i in 0..set.len() {
        if set.specs()[i].is_transition() {
            let m = Mode::ALL[rng.gen_range(0..3)];
            set.set_mode(i, m);
        }
    }
    set.modes()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstrainedSample {
    pub q: Configuration,
    pub modes: ModeVector,
    /// Residuals after projection, one per contact.
    pub residual: DVector<f64>,
    pub success: bool,
}

impl ConstrainedSample {
    pub fn max_residual(&self) -> f64 {
        max_abs(&self.residual)
    }
}

/// Samples a configuration, assigns transition modes, projects and reports the
/// residual. Projection failures come back with `success == false`; the caller decides
/// whether to resample.
pub fn sample_constrained<R: Rng + ?Sized>(
    set: &mut ConstraintSet,
    rng: &mut R,
) -> Result<ConstrainedSample> {
    let q = sample_uniform_configuration(set.chain(), rng);
    let modes = sample_transition_modes(set, rng);
    let projected = set.project(&q)?;
    let residual = set.evaluate(&projected.q)?;
    let success = projected.success
        && max_abs(&residual) <= set.tolerance()
        && set.chain().within_limits(&projected.q);
    Ok(ConstrainedSample {
        q: projected.q,
        modes,
        residual,
        success,
    })
}
