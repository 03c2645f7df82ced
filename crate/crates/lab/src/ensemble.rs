//! Seeded random instances: one independent ChaCha stream per trial.

use modrec::algebra::{Algebra, InclusionSpec, State};
use modrec::random::{self, TrialRng};
use modrec::Result;
use rand::Rng;

use crate::config::RankPolicy;

/// Condition number of σ above which it is regularized.
pub const CONDITION_LIMIT: f64 = 1e10;

#[derive(Clone, Debug)]
pub struct Instance {
    pub trial: u64,
    pub spec: InclusionSpec,
    pub rho: State,
    pub sigma: State,
    pub regularized: bool,
}

pub fn trial_rng(seed: u64, trial: u64) -> TrialRng {
    random::stream(seed, trial)
}

pub fn draw_rank(n: usize, policy: RankPolicy, rng: &mut TrialRng) -> usize {
    match policy {
        RankPolicy::Full => n,
        RankPolicy::Fixed(k) => k,
        RankPolicy::Random => {
            if n == 1 || rng.random::<f64>() < 0.7 {
                n
            } else {
                rng.random_range(1..n)
            }
        }
    }
}

/// σ Ginibre full rank, ρ by rank policy; σ is replaced by
/// `(1−ε)σ + ε·1/n` when its condition number exceeds [`CONDITION_LIMIT`].
pub fn draw_instance(spec: &InclusionSpec, policy: RankPolicy, eps: f64, seed: u64, trial: u64) -> Result<Instance> {
    let mut rng = trial_rng(seed, trial);
    let n = spec.n();
    let sigma = State::new(random::random_density(n, n, &mut rng)?, Algebra::A)?;
    let rank = draw_rank(n, policy, &mut rng);
    let rho = State::new(random::random_density(n, rank, &mut rng)?, Algebra::A)?;
    let (sigma, regularized) = if sigma.condition_number() > CONDITION_LIMIT {
        (sigma.regularized(eps)?, true)
    } else {
        (sigma, false)
    };
    Ok(Instance {
        trial,
        spec: spec.clone(),
        rho,
        sigma,
        regularized,
    })
}
