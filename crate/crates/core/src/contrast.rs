//! The same dephasing semigroup realized by two dilations, kicked by
//! `{I, σ_x}`: the collision model keeps dissipating, the randomized
//! Hamiltonian is restored to the identity.

use crate::catalog;
use crate::collision::{convergence_study, ConvergenceStudy};
use crate::decouple::{flip_x_set, DDScheme, Order};
use crate::error::{Error, Result};
use crate::opalg::identity;
use crate::pocket::{cauchy_semigroup, dd_pocket_evolution};
use crate::semigroup::{generator_superop, semigroup_map, Picture, SuperOperator};

/// Extrapolated collision limits closer than this to the identity map count
/// as decoupled.
pub const COLLISION_DECOUPLED_BELOW: f64 = 1e-3;
/// Kicked pocket maps within this of the identity map count as decoupled.
pub const POCKET_DECOUPLED_BELOW: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct ContrastReport {
    pub gamma: f64,
    pub total_time: f64,
    /// Largest distance between the two undriven semigroups over the
    /// sampled times.
    pub semigroup_gap: f64,
    pub collision: ConvergenceStudy,
    pub collision_distance: f64,
    pub collision_decoupled: bool,
    /// Pulses used for the pocket run (even).
    pub pocket_pulses: usize,
    pub pocket_distance: f64,
    pub pocket_decoupled: bool,
}

/// Runs both dilations of dephasing with rate `gamma` up to `total_time`.
/// The collision study uses `taus`; the pocket run uses the smallest of
/// them, rounded to an even number of pulses.
pub fn run_contrast(gamma: f64, total_time: f64, taus: &[f64]) -> Result<ContrastReport> {
    if taus.len() < 2 {
        return Err(Error::InvalidArgument("contrast needs at least two step sizes".into()));
    }
    let markov = catalog::dephasing(gamma);
    let pocket = catalog::shallow_pocket(gamma, identity(2) / crate::opalg::c(2.0, 0.0))?;
    let gen = generator_superop(&markov, Picture::Heisenberg)?;
    let mut semigroup_gap: f64 = 0.0;
    for t in [0.25, 0.5, 1.0, 2.0].map(|f| f * total_time) {
        let a = semigroup_map(&gen, t)?;
        let b = cauchy_semigroup(&pocket, t)?;
        semigroup_gap = semigroup_gap.max(a.max_dist(&b));
    }

    let tau_min = taus.iter().copied().fold(f64::INFINITY, f64::min);
    let scheme = DDScheme::new(flip_x_set(), Order::Cyclic, tau_min)?;
    let collision = convergence_study(&markov, &scheme, total_time, taus)?;
    let collision_distance = collision
        .limit_distance_from_identity()
        .expect("two or more step sizes");

    let pulses = (((total_time / tau_min) / 2.0).round() as usize).max(1) * 2;
    let pocket_scheme = scheme.with_tau(total_time / pulses as f64)?;
    let pocket_map = dd_pocket_evolution(&pocket, &pocket_scheme, pulses)?.map;
    let pocket_distance = pocket_map.max_dist(&SuperOperator::identity(2, Picture::Heisenberg));

    Ok(ContrastReport {
        gamma,
        total_time,
        semigroup_gap,
        collision_decoupled: collision_distance < COLLISION_DECOUPLED_BELOW,
        collision,
        collision_distance,
        pocket_pulses: pulses,
        pocket_distance,
        pocket_decoupled: pocket_distance <= POCKET_DECOUPLED_BELOW,
    })
}
