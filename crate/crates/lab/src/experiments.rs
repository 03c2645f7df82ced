//! Per-trial experiment bodies and the parallel trial map.

use std::io::Write;
use std::time::Instant;

use modrec::algebra::{Algebra, InclusionSpec, State};
use modrec::analytic::{
    domination_slack, filter_operator, filtering_entropy_curve_with, first_law_slope, hirschman_check,
    perturbation_family, xi_g, xi_gap, xi_infimum_sequence, ExponentSchedule, FilterFamily, FilterSpec, GammaFamily,
    KernelGrid,
};
use modrec::linalg;
use modrec::optimize::SearchBudget;
use modrec::quadrature::QuadratureSpec;
use modrec::random;
use modrec::recovery::{integral_bound, universal_bound};
use modrec::standard_form::cone_rep;
use modrec::{Error, Result};
use rand::Rng;
use rayon::prelude::*;

use crate::config::{format_blocks, Experiment, ExperimentConfig, OutputFormat, RankPolicy};
use crate::ensemble::{draw_instance, trial_rng};
use crate::record::{
    write_records, FilteringRecord, FirstLawRecord, HirschmanRecord, Record, Summary, TrialRecord, XiRecord,
};

pub const LAMBDA_GRID: [f64; 5] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5];
pub const THETA_GRID: [f64; 5] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5];
pub const HIRSCHMAN_THETAS: [f64; 3] = [0.1, 0.25, 0.4];
pub const GAUSSIAN_SCALES: [f64; 5] = [1.0, 10.0, 100.0, 1e3, 1e4];
pub const BUMP_SCALES: [f64; 3] = [10.0, 100.0, 1e3];
pub const DOMINATION_SCALES: [f64; 4] = [0.5, 1.0, 2.0, 5.0];

/// Thread pool capped by `MRLAB_THREADS` (all cores when unset).
pub fn thread_pool() -> rayon::ThreadPool {
    let threads = std::env::var("MRLAB_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&t| t > 0)
        .unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool")
}

/// Runs `trials` independent trials in parallel, returned in trial order.
pub fn run_trials<R: Record>(trials: usize, timing: bool, f: impl Fn(u64) -> Result<R> + Sync) -> Result<Vec<R>> {
    thread_pool().install(|| {
        (0..trials as u64)
            .into_par_iter()
            .map(|t| {
                let start = Instant::now();
                let mut r = f(t)?;
                r.set_wall_time(timing.then(|| start.elapsed().as_secs_f64()));
                Ok(r)
            })
            .collect()
    })
}

pub fn recovery_trial(
    spec: &InclusionSpec,
    policy: RankPolicy,
    eps: f64,
    quad: &QuadratureSpec,
    seed: u64,
    trial: u64,
    experiment: Experiment,
) -> Result<TrialRecord> {
    let inst = draw_instance(spec, policy, eps, seed, trial)?;
    let t1 = integral_bound(spec, &inst.rho, &inst.sigma, quad)?;
    let t2 = universal_bound(spec, &inst.rho, &inst.sigma, quad)?;
    let pass = match experiment {
        Experiment::Thm2 => t2.holds(),
        _ => t1.holds(),
    };
    Ok(TrialRecord {
        trial,
        seed,
        blocks: format_blocks(spec.blocks()),
        n: spec.n(),
        d: spec.carrier_b(),
        rank_rho: inst.rho.support_rank(),
        rank_sigma: inst.sigma.support_rank(),
        delta_s: t1.delta_s,
        log_fidelity_integral: t1.log_fidelity_integral,
        quad_error: t1.quad_error,
        integral_gap: t1.gap,
        neg_two_log_fidelity: t2.neg_two_log_fidelity,
        eps_bound: t2.eps_bound,
        trace_distance: t2.trace_distance,
        clamped: t1.clamped || t2.clamped,
        regularized: inst.regularized,
        pass,
        wall_time_s: None,
    })
}

fn full_rank_pair(n: usize, seed: u64, trial: u64) -> Result<(State, State, random::TrialRng)> {
    let mut rng = trial_rng(seed, trial);
    let rho = State::new(random::random_density(n, n, &mut rng)?, Algebra::A)?;
    let sigma = State::new(random::random_density(n, n, &mut rng)?, Algebra::A)?;
    Ok((rho, sigma, rng))
}

pub fn first_law_trial(n: usize, seed: u64, trial: u64) -> Result<FirstLawRecord> {
    let (rho, _, mut rng) = full_rank_pair(n, seed, trial)?;
    let psi = cone_rep(&rho);
    let v = random::random_unit_matrix(n, &mut rng);
    let x = rng.random_range(0.1..0.9);
    let p = rng.random_range(1.1..1.9);
    let sched = ExponentSchedule::Constant { x, p };
    let s = first_law_slope(perturbation_family(&psi, &v, 1.0), &LAMBDA_GRID, sched)?;
    let violator_rejected = matches!(
        first_law_slope(perturbation_family(&psi, &v, 0.5), &LAMBDA_GRID, sched),
        Err(Error::NotAdmissible { .. })
    );
    let i = LAMBDA_GRID.iter().position(|&l| l == 1e-4).unwrap();
    let last = LAMBDA_GRID.len() - 1;
    let at = s.magnitude_at(1e-4).unwrap();
    Ok(FirstLawRecord {
        trial,
        seed,
        n,
        x,
        p,
        final_ratio: s.ratios[last],
        petz_slope_1e4: s.petz[i],
        sandwiched_slope_1e4: s.sandwiched[i],
        petz_slope_last: s.petz[last],
        sandwiched_slope_last: s.sandwiched[last],
        monotone: s.monotone(),
        violator_rejected,
        pass: s.monotone() && at <= 1e-2 && violator_rejected,
        wall_time_s: None,
    })
}

/// Instance-independent filters, built once per run.
#[derive(Clone, Debug)]
pub struct FilterBank {
    pub gaussian: Vec<FilterSpec>,
    pub bump: Vec<FilterSpec>,
    pub domination: Vec<FilterSpec>,
}

impl FilterBank {
    pub fn new() -> Result<Self> {
        let build = |fam, scales: &[f64]| scales.iter().map(|&p| FilterSpec::new(fam, p)).collect::<Result<Vec<_>>>();
        Ok(FilterBank {
            gaussian: build(FilterFamily::Gaussian, &GAUSSIAN_SCALES)?,
            bump: build(FilterFamily::CompactBump, &BUMP_SCALES)?,
            domination: build(FilterFamily::Gaussian, &DOMINATION_SCALES)?,
        })
    }
}

pub fn filtering_trial(n: usize, bank: &FilterBank, seed: u64, trial: u64) -> Result<FilteringRecord> {
    let (rho, sigma, _) = full_rank_pair(n, seed, trial)?;
    let g = filtering_entropy_curve_with(&rho, &sigma, &bank.gaussian)?;
    let b = filtering_entropy_curve_with(&rho, &sigma, &bank.bump)?;
    let mut op_slack = f64::INFINITY;
    let mut dom_slack = f64::INFINITY;
    for f in bank.domination.iter().chain(&bank.bump) {
        let a = filter_operator(&rho, &sigma, f)?;
        op_slack = op_slack.min(f.l1_norm() - linalg::op_norm(&a));
        dom_slack = dom_slack.min(domination_slack(&rho, &sigma, f)?);
    }
    let gaussian_offset = g.final_offset();
    Ok(FilteringRecord {
        trial,
        seed,
        n,
        relative_entropy: g.target,
        gaussian_final_entropy: *g.entropies.last().unwrap(),
        gaussian_offset,
        bump_offset: b.final_offset(),
        bump_bound: 2.0 * b.l1_norms.last().unwrap().ln(),
        operator_slack: op_slack,
        domination_slack: dom_slack,
        pass: gaussian_offset.abs() <= 1e-4 && op_slack >= -1e-8 && dom_slack >= -1e-8,
        wall_time_s: None,
    })
}

pub fn hirschman_trial(spec: &InclusionSpec, seed: u64, trial: u64) -> Result<HirschmanRecord> {
    let (rho, sigma, _) = full_rank_pair(spec.n(), seed, trial)?;
    let fam = GammaFamily::new(spec, &rho, &sigma)?;
    let gaps = HIRSCHMAN_THETAS
        .iter()
        .map(|&th| hirschman_check(&fam, th, 1.0, 2.0, KernelGrid::for_theta(th)).map(|r| r.gap))
        .collect::<Result<Vec<_>>>()?;
    let min_gap = gaps.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(HirschmanRecord {
        trial,
        seed,
        n: spec.n(),
        gap_theta_010: gaps[0],
        gap_theta_025: gaps[1],
        gap_theta_040: gaps[2],
        min_gap,
        pass: min_gap >= -1e-6,
        wall_time_s: None,
    })
}

pub fn xi_trial(spec: &InclusionSpec, budget: SearchBudget, seed: u64, trial: u64) -> Result<XiRecord> {
    let (rho, sigma, _) = full_rank_pair(spec.n(), seed, trial)?;
    let gap = xi_gap(spec, &rho, &sigma, &THETA_GRID)?;
    let g = xi_g(spec, &rho, &sigma, 0.1)?;
    let budget = SearchBudget {
        seed: budget.seed ^ trial,
        ..budget
    };
    let seq = xi_infimum_sequence(spec, &rho, &sigma, 0.1, budget)?;
    let monotone = seq.windows(2).all(|w| w[1] <= w[0]);
    let inf = *seq.last().unwrap();
    let r = &gap.residuals;
    Ok(XiRecord {
        trial,
        seed,
        n: spec.n(),
        delta_s: -gap.target,
        residual_1e1: r[0],
        residual_1e2: r[1],
        residual_1e3: r[2],
        residual_1e4: r[3],
        residual_1e5: r[4],
        g_theta_01: g,
        infimum_theta_01: inf,
        infimum_monotone: monotone,
        pass: monotone && r.iter().all(|x| x.is_finite()) && inf >= g - 1e-6,
        wall_time_s: None,
    })
}

pub fn xi_budget() -> SearchBudget {
    SearchBudget {
        starts: 8,
        iterations: 1500,
        seed: 0,
    }
}

/// Records of one experiment run.
#[derive(Clone, Debug)]
pub enum Records {
    Recovery(Vec<TrialRecord>),
    FirstLaw(Vec<FirstLawRecord>),
    Filtering(Vec<FilteringRecord>),
    Hirschman(Vec<HirschmanRecord>),
    Xi(Vec<XiRecord>),
}

impl Records {
    pub fn summary(&self) -> Summary {
        match self {
            Records::Recovery(r) => Summary::of(r),
            Records::FirstLaw(r) => Summary::of(r),
            Records::Filtering(r) => Summary::of(r),
            Records::Hirschman(r) => Summary::of(r),
            Records::Xi(r) => Summary::of(r),
        }
    }

    pub fn write<W: Write>(&self, experiment: &str, format: OutputFormat, out: W) -> std::io::Result<()> {
        match self {
            Records::Recovery(r) => write_records(r, experiment, format, out),
            Records::FirstLaw(r) => write_records(r, experiment, format, out),
            Records::Filtering(r) => write_records(r, experiment, format, out),
            Records::Hirschman(r) => write_records(r, experiment, format, out),
            Records::Xi(r) => write_records(r, experiment, format, out),
        }
    }
}

/// Runs every trial of a non-suite experiment.
pub fn run(cfg: &ExperimentConfig) -> Result<Records> {
    let spec = InclusionSpec::new(cfg.blocks.clone())?;
    let (trials, timing, seed) = (cfg.trials, cfg.timing, cfg.seed);
    Ok(match cfg.experiment {
        Experiment::Thm1 | Experiment::Thm2 => Records::Recovery(run_trials(trials, timing, |t| {
            recovery_trial(&spec, cfg.rank_policy, cfg.eps, &cfg.quadrature, seed, t, cfg.experiment)
        })?),
        Experiment::FirstLaw => Records::FirstLaw(run_trials(trials, timing, |t| first_law_trial(spec.n(), seed, t))?),
        Experiment::Filtering => {
            let bank = FilterBank::new()?;
            Records::Filtering(run_trials(trials, timing, |t| filtering_trial(spec.n(), &bank, seed, t))?)
        }
        Experiment::Hirschman => Records::Hirschman(run_trials(trials, timing, |t| hirschman_trial(&spec, seed, t))?),
        Experiment::Xi => Records::Xi(run_trials(trials, timing, |t| xi_trial(&spec, xi_budget(), seed, t))?),
        Experiment::Suite => return Err(Error::InvalidParameter("the suite is not a trial experiment".into())),
    })
}
