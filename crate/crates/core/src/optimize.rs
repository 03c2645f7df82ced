//! Gradient-free multi-start search on the unit sphere of `M_n`.

use crate::linalg::{self, CMat};
use crate::random;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchBudget {
    pub starts: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            starts: 32,
            iterations: 2000,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub best: f64,
    pub argmin: CMat,
    /// Best value seen after each completed start.
    pub best_after_start: Vec<f64>,
    /// The step size of the winning start collapsed below tolerance.
    pub converged: bool,
}

const MIN_STEP: f64 = 1e-10;

/// (1+1) evolution strategy with the one-fifth success rule, run from
/// `budget.starts` random unit matrices.
pub fn sphere_search(dim: usize, budget: SearchBudget, objective: impl Fn(&CMat) -> f64) -> SearchOutcome {
    let mut best = f64::INFINITY;
    let mut argmin = CMat::zeros(dim, dim);
    let mut converged = false;
    let mut history = Vec::with_capacity(budget.starts);
    for s in 0..budget.starts {
        let mut rng = random::stream(budget.seed, s as u64);
        let mut x = random::random_unit_matrix(dim, &mut rng);
        let mut fx = objective(&x);
        let mut step = 0.5;
        let mut done = false;
        for _ in 0..budget.iterations {
            let g = random::random_unit_matrix(dim, &mut rng);
            let y = &x + g.scale(step);
            let y = y.unscale(linalg::frobenius(&y));
            let fy = objective(&y);
            if fy < fx {
                x = y;
                fx = fy;
                step *= 1.5;
            } else {
                step *= 1.5f64.powf(-0.25);
            }
            if step < MIN_STEP {
                done = true;
                break;
            }
        }
        if fx < best {
            best = fx;
            argmin = x;
            converged = done;
        }
        history.push(best);
    }
    SearchOutcome {
        best,
        argmin,
        best_after_start: history,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn finds_largest_overlap() {
        let mut target = CMat::zeros(2, 2);
        target[(0, 1)] = c(1.0, 0.0);
        let out = sphere_search(
            2,
            SearchBudget {
                starts: 4,
                iterations: 1500,
                seed: 3,
            },
            |x| -linalg::hs_inner(&target, x).norm(),
        );
        assert!((out.best + 1.0).abs() < 1e-8);
        assert!(out.best_after_start.windows(2).all(|w| w[1] <= w[0]));
    }
}
