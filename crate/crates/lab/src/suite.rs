//! Acceptance suite: criteria 1 to 11 with their tolerances.

use std::fmt;
use std::sync::OnceLock;

use modrec::algebra::{restrict, Algebra, InclusionSpec, State};
use modrec::analytic::{kernel_normalizations, GammaFamily, KernelGrid};
use modrec::linalg::{self, c, kron};
use modrec::measures::{alt_chain, fidelity, fuchs_vdg_check, lp_norm, lp_norm_variational, projected_norm, LpParams};
use modrec::optimize::SearchBudget;
use modrec::quadrature::{recovery_weight, trapezoid_line, QuadratureSpec};
use modrec::random;
use modrec::recovery::{
    exact_sufficiency_check, nonfaithful_extend, petz_map, rotated_petz, universal_bound, universal_recovery, Channel,
    ProjectedInclusion,
};
use modrec::standard_form::{cone_rep, v_embed, HSVector};
use modrec::{CMat, Error, Result};
use rand::Rng;
use rayon::prelude::*;

use crate::config::{Experiment, RankPolicy};
use crate::ensemble::{draw_instance, trial_rng};
use crate::experiments::{
    filtering_trial, first_law_trial, hirschman_trial, recovery_trial, run_trials, thread_pool, xi_budget, xi_trial,
    FilterBank, HIRSCHMAN_THETAS,
};
use crate::record::{Record, TrialRecord};

pub const SUITE_SEED: u64 = 0x5eed;
pub const RECOVERY_SHAPES: [(usize, usize); 3] = [(2, 2), (2, 3), (3, 3)];
pub const RECOVERY_TRIALS: usize = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "criterion {:>2} {tag} {}: {}", self.id, self.title, self.detail)
    }
}

pub const TITLES: [&str; 11] = [
    "entropy gap vs integrated log fidelity",
    "universal recovery fidelity and distance",
    "saturation witness",
    "exact sufficiency",
    "L_p endpoints and variational oracle",
    "first law",
    "filtering",
    "Hirschman interpolation",
    "ALT and Fuchs-van de Graaf chains",
    "structural invariants",
    "Xi exploration",
];

fn outcome(id: u8, res: Result<(bool, String)>) -> CriterionOutcome {
    let (passed, detail) = res.unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionOutcome {
        id,
        title: TITLES[id as usize - 1],
        passed,
        detail,
    }
}

/// Runs one criterion (1-based).
pub fn criterion(id: u8) -> CriterionOutcome {
    let res = match id {
        1 => c1(),
        2 => c2(),
        3 => c3(),
        4 => c4(),
        5 => c5(),
        6 => c6(),
        7 => c7(),
        8 => c8(),
        9 => c9(),
        10 => c10(),
        11 => c11(),
        _ => Err(Error::InvalidParameter(format!("no criterion {id}"))),
    };
    outcome(id, res)
}

pub fn run_suite() -> Vec<CriterionOutcome> {
    (1..=11).map(criterion).collect()
}

fn recovery_ensembles() -> &'static std::result::Result<Vec<Vec<TrialRecord>>, Error> {
    static CELL: OnceLock<std::result::Result<Vec<Vec<TrialRecord>>, Error>> = OnceLock::new();
    CELL.get_or_init(|| {
        let quad = QuadratureSpec::default();
        RECOVERY_SHAPES
            .iter()
            .enumerate()
            .map(|(i, &(m, k))| {
                let spec = InclusionSpec::single(m, k)?;
                run_trials(RECOVERY_TRIALS, false, |t| {
                    recovery_trial(&spec, RankPolicy::Random, 1e-8, &quad, SUITE_SEED + i as u64, t, Experiment::Thm1)
                })
            })
            .collect()
    })
}

fn ensemble_check(slack: impl Fn(&TrialRecord) -> f64) -> Result<(bool, String)> {
    let sets = recovery_ensembles().as_ref().map_err(|e| e.clone())?;
    let mut parts = Vec::new();
    let mut ok = true;
    for (recs, &(m, k)) in sets.iter().zip(&RECOVERY_SHAPES) {
        let flagged = recs.iter().filter(|r| r.flagged()).count();
        let hard: Vec<_> = recs.iter().filter(|r| !r.flagged()).collect();
        let violations = hard.iter().filter(|r| !(slack(r) >= 0.0)).count();
        let min = hard.iter().map(|r| slack(r)).fold(f64::INFINITY, f64::min);
        let deficient = recs.iter().filter(|r| r.rank_rho < r.n).count();
        ok &= violations == 0;
        parts.push(format!(
            "({m},{k}) {} trials ({deficient} rank-deficient), {violations} violations, {flagged} flagged, min slack {min:.3e}",
            recs.len()
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn c1() -> Result<(bool, String)> {
    ensemble_check(|r| r.integral_gap + 1e-8 + r.quad_error)
}

fn c2() -> Result<(bool, String)> {
    ensemble_check(|r| {
        let fid = r.delta_s + 1e-8 - r.neg_two_log_fidelity;
        let dist = r.eps_bound + 1e-7 - r.trace_distance;
        fid.min(dist)
    })
}

fn c3() -> Result<(bool, String)> {
    let spec = InclusionSpec::single(2, 2)?;
    let sigma = State::maximally_mixed(4, Algebra::A);
    let rho = State::from_diagonal(&[1.0, 0.0, 0.0, 0.0], Algebra::A)?;
    let r = universal_bound(&spec, &rho, &sigma, &QuadratureSpec::default())?;
    let ch = universal_recovery(&spec, &sigma, &QuadratureSpec::default())?;
    let rec = ch.predual(restrict(&spec, &rho)?.matrix());
    let dev = linalg::frobenius(&(rec - linalg::diag_real(&[0.5, 0.5, 0.0, 0.0])));
    let ln2 = 2f64.ln();
    let e1 = (r.delta_s - ln2).abs();
    let e2 = (r.neg_two_log_fidelity - ln2).abs();
    Ok((
        e1 <= 1e-9 && e2 <= 1e-9 && dev <= 1e-9,
        format!("|ΔS − ln2| = {e1:.1e}, |−2lnF − ln2| = {e2:.1e}, F = {:.12}, ‖ρ_rec − diag(½,½,0,0)‖ = {dev:.1e}", r.fidelity),
    ))
}

fn c4() -> Result<(bool, String)> {
    let spec = InclusionSpec::single(2, 2)?;
    let reports = thread_pool().install(|| {
        (0..200u64)
            .into_par_iter()
            .map(|t| {
                let mut rng = trial_rng(SUITE_SEED + 4, t);
                let mut draw = |n| random::random_density(n, n, &mut rng);
                let (rb, sb, sc) = (draw(2)?, draw(2)?, draw(2)?);
                let rho = State::new(kron(&rb, &sc), Algebra::A)?;
                let sigma = State::new(kron(&sb, &sc), Algebra::A)?;
                exact_sufficiency_check(&spec, &rho, &sigma, &[-1.0, 0.0, 0.5])
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let max_ds = reports.iter().map(|r| r.delta_s.abs()).fold(0.0, f64::max);
    let max_dist = reports.iter().map(|r| r.recovery_distance).fold(0.0, f64::max);
    Ok((
        max_ds <= 1e-10 && max_dist <= 1e-9,
        format!("200 tensor-split pairs, max |ΔS| = {max_ds:.1e}, max Petz recovery distance = {max_dist:.1e}"),
    ))
}

fn c5() -> Result<(bool, String)> {
    let endpoint = thread_pool().install(|| {
        (0..500u64)
            .into_par_iter()
            .map(|t| {
                let mut rng = trial_rng(SUITE_SEED + 5, t);
                let ra = if rng.random::<f64>() < 0.7 { 4 } else { rng.random_range(1..4) };
                let rho = State::new(random::random_density(4, ra, &mut rng)?, Algebra::A)?;
                let sigma = State::new(random::random_density(4, 4, &mut rng)?, Algebra::A)?;
                let p1 = lp_norm(&cone_rep(&sigma), &LpParams::new(1.0, rho.clone())?)?;
                let e1 = (p1 - fidelity(&rho, &sigma)?).abs();
                let zeta = HSVector::new(random::random_unit_matrix(4, &mut rng), Algebra::A);
                let p2 = lp_norm(&zeta, &LpParams::new(2.0, rho.clone())?)?;
                let e2 = (p2 - projected_norm(&zeta, &rho)).abs();
                Ok(e1.max(e2))
            })
            .collect::<Result<Vec<f64>>>()
    })?;
    let max_end = endpoint.iter().cloned().fold(0.0, f64::max);
    let variational = thread_pool().install(|| {
        (0..50u64)
            .into_par_iter()
            .map(|t| {
                let mut rng = trial_rng(SUITE_SEED + 55, t);
                let rho = State::new(random::random_density(4, 4, &mut rng)?, Algebra::A)?;
                let zeta = HSVector::new(random::random_unit_matrix(4, &mut rng), Algebra::A);
                let p = rng.random_range(1.1..1.9);
                let params = LpParams::new(p, rho)?;
                let closed = lp_norm(&zeta, &params)?;
                let budget = SearchBudget {
                    seed: t,
                    ..SearchBudget::default()
                };
                let var = lp_norm_variational(&zeta, &params, budget)?;
                Ok((closed - var.value).abs())
            })
            .collect::<Result<Vec<f64>>>()
    })?;
    let max_var = variational.iter().cloned().fold(0.0, f64::max);
    Ok((
        max_end <= 1e-10 && max_var <= 1e-6,
        format!("500 endpoint instances, max error {max_end:.1e}; 50 variational instances (n = 4), max error {max_var:.1e}"),
    ))
}

fn c6() -> Result<(bool, String)> {
    let recs = run_trials(50, false, |t| first_law_trial(4, SUITE_SEED + 6, t))?;
    let failing = recs.iter().filter(|r| !r.pass).count();
    let max = recs
        .iter()
        .map(|r| r.petz_slope_1e4.abs().max(r.sandwiched_slope_1e4.abs()))
        .fold(0.0, f64::max);
    let rejected = recs.iter().filter(|r| r.violator_rejected).count();
    Ok((
        failing == 0,
        format!("50 families, max |slope| at λ = 1e-4: {max:.2e}, non-monotone or failing: {failing}, √λ violators rejected: {rejected}/50"),
    ))
}

fn c7() -> Result<(bool, String)> {
    let bank = FilterBank::new()?;
    let recs = run_trials(50, false, |t| filtering_trial(4, &bank, SUITE_SEED + 7, t))?;
    let max_off = recs.iter().map(|r| r.gaussian_offset.abs()).fold(0.0, f64::max);
    let op = recs.iter().map(|r| r.operator_slack).fold(f64::INFINITY, f64::min);
    let dom = recs.iter().map(|r| r.domination_slack).fold(f64::INFINITY, f64::min);
    let bump_in = recs.iter().filter(|r| r.bump_offset >= 0.0 && r.bump_offset <= r.bump_bound + 1e-6).count();
    Ok((
        recs.iter().all(|r| r.pass),
        format!(
            "50 instances, max |S(ψ_P|η) − S(ψ|η)| at P = 1e4: {max_off:.1e}, min (‖f‖₁ − ‖a_P‖) = {op:.2e}, \
             min domination slack = {dom:.2e}; bump offsets within [0, 2ln‖f‖₁]: {bump_in}/50 (reported)"
        ),
    ))
}

fn c8() -> Result<(bool, String)> {
    let mut norm_err: f64 = 0.0;
    for th in HIRSCHMAN_THETAS {
        let (a, b) = kernel_normalizations(th, KernelGrid::for_theta(th))?;
        norm_err = norm_err.max((a - 1.0).abs()).max((b - 1.0).abs());
    }
    norm_err = norm_err.max((trapezoid_line(recovery_weight, 0.05, 8.0) - 1.0).abs());
    norm_err = norm_err.max((QuadratureSpec::default().integrate(|_| 1.0)? - 1.0).abs());
    let spec = InclusionSpec::single(2, 2)?;
    let recs = run_trials(200, false, |t| hirschman_trial(&spec, SUITE_SEED + 8, t))?;
    let min_gap = recs.iter().map(|r| r.min_gap).fold(f64::INFINITY, f64::min);
    Ok((
        norm_err <= 1e-10 && min_gap >= -1e-6,
        format!("kernel normalization error {norm_err:.1e}; 200 instances × θ ∈ {{0.1, 0.25, 0.4}}, min gap {min_gap:.3e}"),
    ))
}

fn c9() -> Result<(bool, String)> {
    let slacks = thread_pool().install(|| {
        (0..1000u64)
            .into_par_iter()
            .map(|t| {
                let mut rng = trial_rng(SUITE_SEED + 9, t);
                let rank = |rng: &mut random::TrialRng| if rng.random::<f64>() < 0.7 { 4 } else { rng.random_range(1..4) };
                let (ra, sa) = (rank(&mut rng), rank(&mut rng));
                let rho = State::new(random::random_density(4, ra, &mut rng)?, Algebra::A)?;
                let sigma = State::new(random::random_density(4, sa, &mut rng)?, Algebra::A)?;
                let fv = fuchs_vdg_check(&rho, &sigma)?.slack();
                let u = random::random_unitary(4, &mut rng);
                let zeta = HSVector::new(sigma.sqrt() * u, Algebra::A);
                let p = rng.random_range(1.0..=2.0);
                let alt = alt_chain(&cone_rep(&rho), &zeta, p)?.slack();
                Ok((alt, fv))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let alt = slacks.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let fv = slacks.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    Ok((
        alt >= -1e-10 && fv >= -1e-10,
        format!("1000 instances, min ALT slack {alt:.3e}, min Fuchs-van de Graaf slack {fv:.3e}"),
    ))
}

fn channel_defects(ch: &Channel) -> (f64, f64) {
    (ch.unitality_residual(), (-ch.min_choi_eigenvalue()).max(0.0))
}

fn c10() -> Result<(bool, String)> {
    let shapes: Vec<Vec<(usize, usize)>> = vec![vec![(2, 2)], vec![(2, 3)], vec![(3, 3)], vec![(2, 2), (1, 3)]];
    let quad = QuadratureSpec::default();
    let mut unital: f64 = 0.0;
    let mut cp: f64 = 0.0;
    let mut iso: f64 = 0.0;
    let mut count = 0;
    for (i, b) in shapes.iter().enumerate() {
        let spec = InclusionSpec::new(b.clone())?;
        let defects = thread_pool().install(|| {
            (0..20u64)
                .into_par_iter()
                .map(|t| {
                    let inst = draw_instance(&spec, RankPolicy::Full, 1e-8, SUITE_SEED + 100 + i as u64, t)?;
                    let sigma = &inst.sigma;
                    let mut rng = trial_rng(SUITE_SEED + 200 + i as u64, t);
                    let tt = rng.random_range(-3.0..3.0);
                    let chans = [
                        petz_map(&spec, sigma)?,
                        rotated_petz(&spec, sigma, tt)?,
                        universal_recovery(&spec, sigma, &quad)?,
                    ];
                    let d: Vec<_> = chans.iter().map(channel_defects).collect();
                    let v = v_embed(&spec, sigma)?.matrix();
                    let vv = v.adjoint() * &v;
                    let e1 = linalg::frobenius(&(&vv - CMat::identity(vv.nrows(), vv.ncols())));
                    let p = &v * v.adjoint();
                    let e2 = linalg::frobenius(&(&p * &p - &p));
                    Ok((d, e1.max(e2)))
                })
                .collect::<Result<Vec<_>>>()
        })?;
        for (d, e) in defects {
            for (u, c) in d {
                unital = unital.max(u);
                cp = cp.max(c);
                count += 1;
            }
            iso = iso.max(e);
        }
    }
    let spec = InclusionSpec::single(2, 2)?;
    for t in 0..20u64 {
        let sigma = {
            let mut rng = trial_rng(SUITE_SEED + 300, t);
            State::new(random::random_density(4, 1 + (t as usize % 3), &mut rng)?, Algebra::A)?
        };
        let proj = ProjectedInclusion::new(&spec, &sigma)?;
        for inner in [proj.petz(), proj.universal(&quad)?] {
            let (u, c) = channel_defects(&nonfaithful_extend(&spec, &sigma, &inner)?);
            unital = unital.max(u);
            cp = cp.max(c);
            count += 1;
        }
    }
    let (g0, deriv) = gamma_checks()?;
    Ok((
        unital <= 1e-9 && cp <= 1e-9 && iso <= 1e-12 && g0 <= 1e-12 && deriv <= 1e-6,
        format!(
            "{count} channels: max unitality residual {unital:.1e}, max negative Choi eigenvalue {cp:.1e}; \
             V identities {iso:.1e}; Γ(0) error {g0:.1e}; derivative residual {deriv:.1e}"
        ),
    ))
}

fn gamma_checks() -> Result<(f64, f64)> {
    let out = thread_pool().install(|| {
        (0..50u64)
            .into_par_iter()
            .map(|t| {
                let spec = InclusionSpec::single(2, if t % 2 == 0 { 2 } else { 3 })?;
                let inst = draw_instance(&spec, RankPolicy::Full, 1e-8, SUITE_SEED + 400, t)?;
                let fam = GammaFamily::new(&spec, &inst.rho, &inst.sigma)?;
                let g0 = fam.gamma_vector(c(0.0, 0.0))?.sub(&fam.psi()).norm();
                let d = fam.gamma_derivative_at_zero(1e-4)?;
                Ok((g0, d.residual()))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(out.iter().fold((0.0f64, 0.0f64), |acc, x| (acc.0.max(x.0), acc.1.max(x.1))))
}

fn c11() -> Result<(bool, String)> {
    let spec = InclusionSpec::single(2, 2)?;
    let recs = run_trials(50, false, |t| xi_trial(&spec, xi_budget(), SUITE_SEED + 11, t))?;
    let mut last: Vec<f64> = recs.iter().map(|r| r.residual_1e5).collect();
    last.sort_by(|a, b| a.total_cmp(b));
    let monotone = recs.iter().filter(|r| r.infimum_monotone).count();
    let above = recs.iter().filter(|r| r.infimum_theta_01 >= r.g_theta_01 - 1e-6).count();
    let gap = recs.iter().map(|r| r.infimum_theta_01 - r.g_theta_01).fold(0.0, f64::max);
    Ok((
        recs.iter().all(|r| r.pass),
        format!(
            "50 instances emitted; residual at θ = 1e-5: median {:.3e}, range [{:.3e}, {:.3e}]; \
             monotone infimum sequences {monotone}/50, infimum ≥ g(0.1) − 1e-6 in {above}/50, max excess {gap:.1e}",
            last[last.len() / 2],
            last[0],
            last[last.len() - 1]
        ),
    ))
}
