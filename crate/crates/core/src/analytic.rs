//! Interpolating vectors Γ and Ξ, Hirschman interpolation, first-law slopes
//! and spectral filtering.

use std::f64::consts::PI;

use crate::algebra::{restrict, Algebra, InclusionSpec, State};
use crate::error::{shape_err, Error, Result};
use crate::linalg::{self, c, CMat, Cutoff, Spectrum, C64};
use crate::measures::{entropy_difference, fidelity, lp_norm, modular_expectation, relative_entropy, LpParams};
use crate::optimize::{sphere_search, SearchBudget};
use crate::quadrature::{adaptive_simpson, gauss_legendre};
use crate::random;
use crate::recovery::PetzFamily;
use crate::standard_form::{cone_rep, connes_cocycle, EmbeddingIsometry, HSVector, RelativeModular};

const STRIP_TOL: f64 = 1e-14;

/// Data needed to evaluate `Γ_ψ(z) = σ_A^z ι(σ_B^{-z} ρ_B^z) ρ_A^{1/2−z}`.
#[derive(Clone, Debug)]
pub struct GammaFamily {
    spec: InclusionSpec,
    rho: State,
    sigma: State,
    rho_b: State,
    sigma_b: State,
}

impl GammaFamily {
    pub fn new(spec: &InclusionSpec, rho: &State, sigma: &State) -> Result<Self> {
        Ok(GammaFamily {
            spec: spec.clone(),
            rho_b: restrict(spec, rho)?,
            sigma_b: restrict(spec, sigma)?,
            rho: rho.clone(),
            sigma: sigma.clone(),
        })
    }

    pub fn spec(&self) -> &InclusionSpec {
        &self.spec
    }

    pub fn rho(&self) -> &State {
        &self.rho
    }

    pub fn sigma(&self) -> &State {
        &self.sigma
    }

    /// Both states faithful, so Γ extends to every `z`.
    pub fn is_full_rank(&self) -> bool {
        self.rho.is_faithful() && self.sigma.is_faithful()
    }

    fn check_domain(&self, z: C64) -> Result<()> {
        if self.is_full_rank() || (-STRIP_TOL..=0.5 + STRIP_TOL).contains(&z.re) {
            Ok(())
        } else {
            Err(Error::Domain(format!("Re z = {} outside [0, 1/2] for rank-deficient states", z.re)))
        }
    }

    fn require_full_rank(&self) -> Result<()> {
        if self.is_full_rank() {
            Ok(())
        } else {
            Err(Error::Domain("rank-deficient input".into()))
        }
    }

    /// `ψ_A = ρ_A^{1/2}`.
    pub fn psi(&self) -> HSVector {
        cone_rep(&self.rho)
    }

    fn gamma_matrix(&self, z: C64) -> CMat {
        let inner = self.sigma_b.power(-z) * self.rho_b.power(z);
        self.sigma.power(z) * self.spec.embed_matrix(&inner) * self.rho.power(c(0.5, 0.0) - z)
    }

    /// Closed form of `Γ(z)`.
    pub fn gamma_vector(&self, z: C64) -> Result<HSVector> {
        self.check_domain(z)?;
        Ok(HSVector::new(self.gamma_matrix(z), Algebra::A))
    }

    /// `Δ^z_{σ,ρ;A} V_ρ Δ^{-z}_{σ,ρ;B} |ψ_B⟩` from standard-form pieces.
    pub fn gamma_abstract(&self, z: C64) -> Result<HSVector> {
        self.check_domain(z)?;
        let da = RelativeModular::new(self.sigma.clone(), self.rho.clone())?;
        let db = RelativeModular::new(self.sigma_b.clone(), self.rho_b.clone())?;
        let v = EmbeddingIsometry::for_state(&self.spec, &self.rho)?;
        let x = db.apply_power(-z, &cone_rep(&self.rho_b));
        Ok(da.apply_power(z, &v.apply(&x)))
    }

    /// `Γ(it) = (Dσ_A:Dρ_A)_t ρ_A^{it} ι((Dσ_B:Dρ_B)_{−t}) ρ_A^{−it} ψ_A`.
    pub fn gamma_cocycle_form(&self, t: f64) -> Result<HSVector> {
        let ua = connes_cocycle(&self.sigma, &self.rho, t)?;
        let ub = connes_cocycle(&self.sigma_b, &self.rho_b, -t)?;
        let flowed = self.rho.power(c(0.0, t)) * self.spec.embed_matrix(&ub) * self.rho.power(c(0.0, -t));
        Ok(HSVector::new(ua * flowed * self.rho.sqrt(), Algebra::A))
    }

    /// Norms `‖Γ(x + it)‖` on a rectangular grid of the strip.
    pub fn strip_norms(&self, xs: &[f64], ts: &[f64]) -> Result<Vec<Vec<f64>>> {
        xs.iter()
            .map(|&x| ts.iter().map(|&t| self.gamma_vector(c(x, t)).map(|g| g.norm())).collect())
            .collect()
    }

    /// Compares `Γ(1/2+it)Γ(1/2+it)*` with `α^t_*(ρ_B)` for faithful σ.
    pub fn gamma_top_state_check(&self, t: f64, samples: usize, seed: u64) -> Result<TopStateReport> {
        let fam = PetzFamily::new(&self.spec, &self.sigma)?;
        let g = self.gamma_matrix(c(0.5, t));
        let induced = g.clone() * g.adjoint();
        let target = fam.predual(t, self.rho_b.matrix());
        let diff = linalg::hermitian_part(&(&target - &induced));
        let mut rng = random::stream(seed, 0);
        let mut sampled = f64::INFINITY;
        for _ in 0..samples {
            let a = random::random_psd(self.spec.n(), &mut rng);
            let a = a.unscale(linalg::op_norm(&a));
            sampled = sampled.min((&a * &diff).trace().re);
        }
        let l1 = linalg::nuclear_norm(&(self.rho.sqrt() * &g));
        let f = fidelity(&self.rho, &State::new(target, Algebra::A)?)?;
        Ok(TopStateReport {
            min_eigenvalue: linalg::min_eigenvalue(&diff),
            sampled_slack: sampled,
            deviation: linalg::op_norm(&diff),
            l1_norm: l1,
            fidelity: f,
        })
    }

    /// Richardson-extrapolated `d/dx 2 Re⟨ψ|Γ(x)⟩` at `x = 0`.
    pub fn gamma_derivative_at_zero(&self, h: f64) -> Result<DerivativeReport> {
        self.require_full_rank()?;
        if !(h > 0.0) {
            return Err(Error::InvalidParameter(format!("step {h} must be positive")));
        }
        let psi = self.psi();
        let f = |x: f64| 2.0 * psi.inner(&HSVector::new(self.gamma_matrix(c(x, 0.0)), Algebra::A)).re;
        let d = |h: f64| (f(h) - f(-h)) / (2.0 * h);
        let (d1, d2) = (d(h), d(0.5 * h));
        let ds = entropy_difference(&self.spec, &self.rho, &self.sigma)?.value();
        Ok(DerivativeReport {
            value: (4.0 * d2 - d1) / 3.0,
            expected: -2.0 * ds,
            error_estimate: (d1 - d2).abs(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TopStateReport {
    /// `λ_min(α^t_*(ρ_B) − ΓΓ*)`; non-negative means the bound holds for every `a₊ ≥ 0`.
    pub min_eigenvalue: f64,
    /// Smallest `tr(a₊(α^t_*(ρ_B) − ΓΓ*))` over sampled `a₊ ≥ 0`, `‖a₊‖ = 1`.
    pub sampled_slack: f64,
    /// `‖α^t_*(ρ_B) − ΓΓ*‖`, zero for full-rank ρ.
    pub deviation: f64,
    /// `‖Γ(1/2+it)‖_{1,ψ}`.
    pub l1_norm: f64,
    /// `F(ρ, α^t_*(ρ_B))`.
    pub fidelity: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivativeReport {
    pub value: f64,
    /// `−2ΔS`.
    pub expected: f64,
    /// `|D(h) − D(h/2)|`, the size of the leading `h²` term.
    pub error_estimate: f64,
}

impl DerivativeReport {
    pub fn residual(&self) -> f64 {
        (self.value - self.expected).abs()
    }
}

/// Harmonic-measure kernels `(α_θ(t), β_θ(t))` of the strip `0 ≤ Re z ≤ 1/2`.
pub fn hirschman_kernels(theta: f64, t: f64) -> Result<(f64, f64)> {
    if !(theta > 0.0 && theta < 0.5) {
        return Err(Error::InvalidParameter(format!("θ = {theta} outside (0, 1/2)")));
    }
    let s = (2.0 * PI * theta).sin();
    // cosh 2πt ∓ cos 2πθ in half-angle form, exact near t = 0
    let sh = (PI * t).sinh().powi(2);
    let minus = 2.0 * (sh + (PI * theta).sin().powi(2));
    let plus = 2.0 * (sh + (PI * theta).cos().powi(2));
    Ok((s / ((1.0 - 2.0 * theta) * minus), s / (2.0 * theta * plus)))
}

/// Trapezoid grid for kernel integrals: step `h` on `[-t_max, t_max]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelGrid {
    pub step: f64,
    pub t_max: f64,
}

impl KernelGrid {
    /// Step `min(θ, 1/2 − θ)/4`, which resolves the kernel poles at distance
    /// `θ` and `1/2 − θ` from the real axis.
    pub fn for_theta(theta: f64) -> Self {
        KernelGrid {
            step: theta.min(0.5 - theta) / 4.0,
            t_max: 6.0,
        }
    }

    pub fn nodes(&self) -> Vec<(f64, f64)> {
        let n = (2.0 * self.t_max / self.step).ceil() as usize;
        let h = 2.0 * self.t_max / n as f64;
        (0..=n)
            .map(|j| (-self.t_max + j as f64 * h, if j == 0 || j == n { 0.5 * h } else { h }))
            .collect()
    }
}

/// `(∫α_θ, ∫β_θ)` on the grid.
pub fn kernel_normalizations(theta: f64, grid: KernelGrid) -> Result<(f64, f64)> {
    let mut acc = (0.0, 0.0);
    for (t, w) in grid.nodes() {
        let (a, b) = hirschman_kernels(theta, t)?;
        acc.0 += w * a;
        acc.1 += w * b;
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HirschmanReport {
    pub theta: f64,
    pub p_theta: f64,
    /// `ln‖Γ(θ)‖_{p_θ,ψ}`.
    pub lhs: f64,
    /// `∫ (1−2θ)α_θ ln‖Γ(it)‖_{p₀,ψ} + 2θ β_θ ln‖Γ(1/2+it)‖_{p₁,ψ} dt`.
    pub rhs: f64,
    pub gap: f64,
}

/// Hirschman's interpolation inequality for `Γ` with `L_p` norms relative
/// to `ψ` (commutant side).
pub fn hirschman_check(fam: &GammaFamily, theta: f64, p0: f64, p1: f64, grid: KernelGrid) -> Result<HirschmanReport> {
    fam.require_full_rank()?;
    for p in [p0, p1] {
        if !(1.0..=2.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("p = {p} outside [1, 2]")));
        }
    }
    hirschman_kernels(theta, 0.0)?;
    let p_theta = 1.0 / ((1.0 - 2.0 * theta) / p0 + 2.0 * theta / p1);
    let norm = |z: C64, p: f64| -> Result<f64> {
        let g = HSVector::new(fam.gamma_matrix(z), Algebra::A);
        lp_norm(&g, &LpParams::new(p, fam.rho.clone())?)
    };
    let lhs = norm(c(theta, 0.0), p_theta)?.ln();
    let mut rhs = 0.0;
    for (t, w) in grid.nodes() {
        let (a, b) = hirschman_kernels(theta, t)?;
        rhs += w * (1.0 - 2.0 * theta) * a * norm(c(0.0, t), p0)?.ln();
        rhs += w * 2.0 * theta * b * norm(c(0.5, t), p1)?.ln();
    }
    Ok(HirschmanReport {
        theta,
        p_theta,
        lhs,
        rhs,
        gap: rhs - lhs,
    })
}

/// Exponents `x(λ)` for the Petz quantity and `p(λ)` for the `L_p` norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExponentSchedule {
    Constant { x: f64, p: f64 },
    /// `x(λ) = x0 + dx·λ`, `p(λ) = p0 + dp·λ`, clamped to `[0, 1−ε]` and `[1, 2]`.
    Linear { x0: f64, dx: f64, p0: f64, dp: f64, eps: f64 },
}

impl ExponentSchedule {
    pub fn x(&self, lambda: f64) -> f64 {
        match *self {
            ExponentSchedule::Constant { x, .. } => x,
            ExponentSchedule::Linear { x0, dx, eps, .. } => (x0 + dx * lambda).clamp(0.0, 1.0 - eps),
        }
    }

    pub fn p(&self, lambda: f64) -> f64 {
        match *self {
            ExponentSchedule::Constant { p, .. } => p,
            ExponentSchedule::Linear { p0, dp, .. } => (p0 + dp * lambda).clamp(1.0, 2.0),
        }
    }
}

/// `ζ_λ = (ψ + λ^power v)/‖ψ + λ^power v‖`.
pub fn perturbation_family(psi: &HSVector, v: &CMat, power: f64) -> impl Fn(f64) -> HSVector {
    let psi = psi.clone();
    let v = v.clone();
    move |lambda: f64| {
        let m = psi.matrix() + v.scale(lambda.powf(power));
        HSVector::new(m, psi.tag()).normalized()
    }
}

/// Largest admissible `‖ζ_λ − ψ‖²/λ` at the smallest `λ`.
pub const VANISHING_RATIO_TOL: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq)]
pub struct FirstLawSlopes {
    pub lambdas: Vec<f64>,
    /// `‖ζ_λ − ψ‖²/λ`.
    pub ratios: Vec<f64>,
    /// `(1/λ) ln⟨ζ_λ|Δ^{x(λ)}_{ψ,ζ_λ}|ζ_λ⟩`.
    pub petz: Vec<f64>,
    /// `(1/λ) ln‖ζ_λ‖_{p(λ),ψ}`.
    pub sandwiched: Vec<f64>,
}

impl FirstLawSlopes {
    fn decreasing(v: &[f64]) -> bool {
        v.windows(2).all(|w| w[1].abs() <= w[0].abs())
    }

    pub fn monotone(&self) -> bool {
        Self::decreasing(&self.petz) && Self::decreasing(&self.sandwiched)
    }

    /// `|slope|` at `λ` (the larger of the two quantities).
    pub fn magnitude_at(&self, lambda: f64) -> Option<f64> {
        let i = self.lambdas.iter().position(|&l| (l - lambda).abs() <= 1e-12 * lambda)?;
        Some(self.petz[i].abs().max(self.sandwiched[i].abs()))
    }
}

/// Slopes of the Petz and `L_p` first-law quantities along a descending
/// `λ` grid. The family must satisfy `‖ζ_λ − ψ‖² = o(λ)` on the grid.
pub fn first_law_slope(family: impl Fn(f64) -> HSVector, lambda_grid: &[f64], schedule: ExponentSchedule) -> Result<FirstLawSlopes> {
    if lambda_grid.is_empty() || lambda_grid.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::InvalidParameter("λ grid must be non-empty and positive".into()));
    }
    let psi = family(0.0);
    let reference = psi.algebra_state()?;
    let mut ratios = Vec::with_capacity(lambda_grid.len());
    let mut zetas = Vec::with_capacity(lambda_grid.len());
    for &l in lambda_grid {
        let z = family(l);
        if z.dim() != psi.dim() {
            return Err(shape_err(psi.dim(), z.dim()));
        }
        ratios.push(z.sub(&psi).norm().powi(2) / l);
        zetas.push(z);
    }
    let last = *ratios.last().unwrap();
    let shrinking = ratios.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-15);
    if !(last <= VANISHING_RATIO_TOL) || !shrinking {
        return Err(Error::NotAdmissible {
            lambda: *lambda_grid.last().unwrap(),
            ratio: last,
        });
    }
    let mut petz = Vec::with_capacity(zetas.len());
    let mut sandwiched = Vec::with_capacity(zetas.len());
    for (&l, z) in lambda_grid.iter().zip(&zetas) {
        let x = schedule.x(l);
        let e = modular_expectation(&psi, z, c(x, 0.0))?.re;
        petz.push(e.ln() / l);
        let n = lp_norm(z, &LpParams::new(schedule.p(l), reference.clone())?)?;
        sandwiched.push(n.ln() / l);
    }
    Ok(FirstLawSlopes {
        lambdas: lambda_grid.to_vec(),
        ratios,
        petz,
        sandwiched,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FilterFamily {
    /// `f̃(x) = e^{−x²/2}`.
    Gaussian,
    /// `f̃(x) = e^{1 − 1/(1 − x²)}` on `|x| < 1`.
    CompactBump,
}

const BUMP_NODES: usize = 512;
const BUMP_T_MAX: f64 = 600.0;

/// Filter profile `f̃` at scale `P`, with `f_P(t) = P f(tP)` and
/// `∫ f_P(t) e^{iωt} dt = f̃(ω/P)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FilterSpec {
    family: FilterFamily,
    scale: f64,
    amplitude: f64,
    l1_unit: f64,
    log_shifted_l1_unit: f64,
}

fn bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - x * x)).exp()
    }
}

/// `(1/π)∫_0^1 f̃(ω) cos(ω(t + iy)) dω` scaled by `e^{−y}` (`y ≥ 0`).
fn bump_kernel_scaled(t: f64, y: f64, gl: &[(f64, f64)]) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for &(u, w) in gl {
        let om = 0.5 * (u + 1.0);
        let g = 0.5 * w * bump(om);
        let ch = 0.5 * ((om - 1.0) * y).exp() + 0.5 * ((-om - 1.0) * y).exp();
        let sh = 0.5 * ((om - 1.0) * y).exp() - 0.5 * ((-om - 1.0) * y).exp();
        acc += C64::new((om * t).cos() * ch, -(om * t).sin() * sh) * g;
    }
    acc / PI
}

impl FilterSpec {
    pub fn new(family: FilterFamily, scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::InvalidParameter(format!("scale {scale} must be positive")));
        }
        let (l1_unit, log_shifted_l1_unit) = match family {
            FilterFamily::Gaussian => (1.0, scale * scale / 8.0),
            FilterFamily::CompactBump => {
                let gl = gauss_legendre(BUMP_NODES);
                let y = 0.5 * scale;
                let l1 = 2.0 * adaptive_simpson(&|t| bump_kernel_scaled(t, 0.0, &gl).norm(), 0.0, BUMP_T_MAX, 1e-12);
                let sh = 2.0 * adaptive_simpson(&|t| bump_kernel_scaled(t, y, &gl).norm(), 0.0, BUMP_T_MAX, 1e-12);
                (l1, y + sh.ln())
            }
        };
        Ok(FilterSpec {
            family,
            scale,
            amplitude: 1.0,
            l1_unit,
            log_shifted_l1_unit,
        })
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    pub fn family(&self) -> FilterFamily {
        self.family
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// `f̃(x)`.
    pub fn profile(&self, x: f64) -> f64 {
        self.amplitude
            * match self.family {
                FilterFamily::Gaussian => (-0.5 * x * x).exp(),
                FilterFamily::CompactBump => bump(x),
            }
    }

    /// `f̃(ω/P)`.
    pub fn scaled_profile(&self, omega: f64) -> f64 {
        self.profile(omega / self.scale)
    }

    /// `f(t)`.
    pub fn kernel(&self, t: f64) -> f64 {
        self.amplitude
            * match self.family {
                FilterFamily::Gaussian => (-0.5 * t * t).exp() / (2.0 * PI).sqrt(),
                FilterFamily::CompactBump => bump_kernel_scaled(t, 0.0, &gauss_legendre(BUMP_NODES)).re,
            }
    }

    /// `f_P(t) = P f(tP)`.
    pub fn scaled_kernel(&self, t: f64) -> f64 {
        self.scale * self.kernel(t * self.scale)
    }

    /// `‖f‖₁`.
    pub fn l1_norm(&self) -> f64 {
        self.amplitude.abs() * self.l1_unit
    }

    /// `ln‖f(· + iP/2)‖₁`.
    pub fn log_shifted_l1_norm(&self) -> f64 {
        self.amplitude.abs().ln() + self.log_shifted_l1_unit
    }
}

/// `Σ_{ij} f̃((ln s_i − ln r_j)/P) P_i ψ Q_j` for `ψ = ρ^{1/2}`, with
/// `σ = Σ s_i P_i` and `ψ*ψ = Σ r_j Q_j`.
pub fn filter_vector(rho: &State, sigma: &State, filt: &FilterSpec) -> Result<HSVector> {
    if rho.dim() != sigma.dim() {
        return Err(shape_err(sigma.dim(), rho.dim()));
    }
    let psi = cone_rep(rho);
    let ls = sigma.spectrum();
    let rs = rho.spectrum();
    let (us, ur) = (ls.vectors(), rs.vectors());
    let x = us.adjoint() * psi.matrix() * ur;
    let mut y = CMat::zeros(x.nrows(), x.ncols());
    for i in 0..ls.support_rank() {
        for j in 0..rs.support_rank() {
            let om = ls.values()[i].ln() - rs.values()[j].ln();
            y[(i, j)] = x[(i, j)] * filt.scaled_profile(om);
        }
    }
    Ok(HSVector::new(us * y * ur.adjoint(), Algebra::A))
}

/// `a_P = ∫ f_P(t) σ^{it} ρ^{−it} dt` by the trapezoid rule.
pub fn filter_operator(rho: &State, sigma: &State, filt: &FilterSpec) -> Result<CMat> {
    if rho.dim() != sigma.dim() {
        return Err(shape_err(sigma.dim(), rho.dim()));
    }
    let ls = sigma.spectrum();
    let rs = rho.spectrum();
    let spread = |s: &Spectrum| {
        let v = s.support_values();
        v[0].ln() - v[v.len() - 1].ln()
    };
    let omega_max = spread(ls) + spread(rs) + 1.0;
    let p = filt.scale();
    let (h, t_max) = match filt.family() {
        FilterFamily::Gaussian => ((0.25 / p).min(0.5 / omega_max), 12.0 / p),
        FilterFamily::CompactBump => (0.5 * PI / (p + omega_max), BUMP_T_MAX / p),
    };
    let (us, ur) = (ls.vectors(), rs.vectors());
    let cross = us.adjoint() * ur;
    let lns: Vec<Option<f64>> = (0..ls.dim()).map(|i| (i < ls.support_rank()).then(|| ls.values()[i].ln())).collect();
    let lnr: Vec<Option<f64>> = (0..rs.dim()).map(|j| (j < rs.support_rank()).then(|| rs.values()[j].ln())).collect();
    let gl = gauss_legendre(BUMP_NODES);
    let kernel = |t: f64| match filt.family() {
        FilterFamily::Gaussian => filt.scaled_kernel(t),
        FilterFamily::CompactBump => filt.amplitude() * p * bump_kernel_scaled(t * p, 0.0, &gl).re,
    };
    let mut acc = CMat::zeros(ls.dim(), rs.dim());
    let n = (2.0 * t_max / h).ceil() as usize;
    let h = 2.0 * t_max / n as f64;
    for k in 0..=n {
        let t = -t_max + k as f64 * h;
        let w = if k == 0 || k == n { 0.5 * h } else { h } * kernel(t);
        for i in 0..ls.dim() {
            for j in 0..rs.dim() {
                if let (Some(a), Some(b)) = (lns[i], lnr[j]) {
                    acc[(i, j)] += cross[(i, j)] * C64::from_polar(w, t * (a - b));
                }
            }
        }
    }
    Ok(us * acc * ur.adjoint())
}

/// `λ_min(‖f(·+iP/2)‖₁² σ − ψ_P ψ_P*)`; `+∞` when the constant overflows.
pub fn domination_slack(rho: &State, sigma: &State, filt: &FilterSpec) -> Result<f64> {
    let log_c2 = 2.0 * filt.log_shifted_l1_norm();
    if log_c2 > 700.0 {
        return Ok(f64::INFINITY);
    }
    let psi_p = filter_vector(rho, sigma, filt)?;
    let d = sigma.matrix().scale(log_c2.exp()) - psi_p.algebra_density();
    Ok(linalg::min_eigenvalue(&linalg::hermitian_part(&d)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct FilterCurve {
    pub scales: Vec<f64>,
    /// `f̃(0)` chosen so that `‖ψ_P‖ = 1`.
    pub amplitudes: Vec<f64>,
    /// `S(ψ_P|η)`.
    pub entropies: Vec<f64>,
    /// `S(ψ|η)`.
    pub target: f64,
    /// `‖f‖₁` of the tuned filter at each scale.
    pub l1_norms: Vec<f64>,
}

impl FilterCurve {
    /// `S(ψ_P|η) − S(ψ|η)` at the largest scale.
    pub fn final_offset(&self) -> f64 {
        self.entropies.last().copied().unwrap_or(f64::NAN) - self.target
    }
}

pub fn filtering_entropy_curve(rho: &State, sigma: &State, family: FilterFamily, p_grid: &[f64]) -> Result<FilterCurve> {
    let filters = p_grid.iter().map(|&p| FilterSpec::new(family, p)).collect::<Result<Vec<_>>>()?;
    filtering_entropy_curve_with(rho, sigma, &filters)
}

/// Entropy curve for prebuilt filters; amplitudes are retuned per scale.
pub fn filtering_entropy_curve_with(rho: &State, sigma: &State, filters: &[FilterSpec]) -> Result<FilterCurve> {
    let target = relative_entropy(rho, sigma)?.value();
    let mut out = FilterCurve {
        scales: Vec::new(),
        amplitudes: Vec::new(),
        entropies: Vec::new(),
        target,
        l1_norms: Vec::new(),
    };
    for f in filters {
        let unit = f.clone().with_amplitude(1.0);
        let norm = filter_vector(rho, sigma, &unit)?.norm();
        if !(norm > 0.0) {
            return Err(Error::Domain(format!("filtered vector vanishes at P = {}", f.scale())));
        }
        let tuned = unit.with_amplitude(1.0 / norm);
        let psi_p = filter_vector(rho, sigma, &tuned)?;
        let state = State::normalized(psi_p.algebra_density(), Algebra::A)?;
        out.scales.push(f.scale());
        out.amplitudes.push(tuned.amplitude());
        out.entropies.push(relative_entropy(&state, sigma)?.value());
        out.l1_norms.push(tuned.l1_norm());
    }
    Ok(out)
}

fn xi_matrix(spec: &InclusionSpec, rho: &State, sigma: &State, rb: &State, sb: &State, z: C64) -> CMat {
    spec.embed_matrix(&(rb.power(z) * sb.power(-z))) * sigma.power(z) * rho.sqrt()
}

/// `Ξ(z, τ) = ι(ρ_B^z σ_B^{−z}) σ_A^z ρ_A^{1/2} τ^{−z}`.
pub fn xi_vector(spec: &InclusionSpec, rho: &State, sigma: &State, tau: &State, z: C64) -> Result<HSVector> {
    let rb = restrict(spec, rho)?;
    let sb = restrict(spec, sigma)?;
    if tau.dim() != rho.dim() {
        return Err(shape_err(rho.dim(), tau.dim()));
    }
    Ok(HSVector::new(xi_matrix(spec, rho, sigma, &rb, &sb, z) * tau.power(-z), Algebra::A))
}

/// `g(θ) = ‖ι(ρ_B^θ σ_B^{−θ}) σ_A^θ ρ_A^{1/2}‖_{p_θ}`, `p_θ = 2/(2θ+1)`.
pub fn xi_g(spec: &InclusionSpec, rho: &State, sigma: &State, theta: f64) -> Result<f64> {
    let rb = restrict(spec, rho)?;
    let sb = restrict(spec, sigma)?;
    let m = xi_matrix(spec, rho, sigma, &rb, &sb, c(theta, 0.0));
    Ok(linalg::schatten(&m, 2.0 / (2.0 * theta + 1.0)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct XiGap {
    pub thetas: Vec<f64>,
    /// `(1/θ) ln g(θ)`.
    pub values: Vec<f64>,
    /// `−(S_A − S_B)`.
    pub target: f64,
    pub residuals: Vec<f64>,
}

pub fn xi_gap(spec: &InclusionSpec, rho: &State, sigma: &State, theta_grid: &[f64]) -> Result<XiGap> {
    let target = -entropy_difference(spec, rho, sigma)?.value();
    let values = theta_grid
        .iter()
        .map(|&th| xi_g(spec, rho, sigma, th).map(|g| g.ln() / th))
        .collect::<Result<Vec<_>>>()?;
    Ok(XiGap {
        thetas: theta_grid.to_vec(),
        residuals: values.iter().map(|v| v - target).collect(),
        values,
        target,
    })
}

/// Best `‖Ξ(θ, τ)‖` after each start of a search over `τ = χ*χ`,
/// `‖χ‖₂ = 1`. Non-increasing by construction.
pub fn xi_infimum_sequence(spec: &InclusionSpec, rho: &State, sigma: &State, theta: f64, budget: SearchBudget) -> Result<Vec<f64>> {
    let rb = restrict(spec, rho)?;
    let sb = restrict(spec, sigma)?;
    let m = xi_matrix(spec, rho, sigma, &rb, &sb, c(theta, 0.0));
    let cut = Cutoff::default();
    let out = sphere_search(rho.dim(), budget, |chi| {
        let tau = chi.adjoint() * chi;
        let s = Spectrum::of_hermitian(&tau, cut);
        if s.support_rank() < s.dim() {
            return f64::INFINITY;
        }
        linalg::frobenius(&(&m * s.real_power(-theta)))
    });
    Ok(out.best_after_start)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::random_state;
    use crate::linalg::{diag_real, frobenius, kron};

    fn pair(seed: u64) -> (InclusionSpec, State, State) {
        let spec = InclusionSpec::single(2, 2).unwrap();
        (spec, random_state(4, 4, seed).unwrap(), random_state(4, 4, seed + 1000).unwrap())
    }

    #[test]
    fn gamma_at_zero_is_psi() {
        let (spec, rho, sigma) = pair(1);
        let fam = GammaFamily::new(&spec, &rho, &sigma).unwrap();
        let g = fam.gamma_vector(c(0.0, 0.0)).unwrap();
        assert!(g.sub(&fam.psi()).norm() < 1e-12);
    }

    #[test]
    fn gamma_forms_agree() {
        let (spec, rho, sigma) = pair(2);
        let fam = GammaFamily::new(&spec, &rho, &sigma).unwrap();
        for z in [c(0.2, 0.3), c(0.5, -1.0), c(0.0, 0.7)] {
            let a = fam.gamma_vector(z).unwrap();
            let b = fam.gamma_abstract(z).unwrap();
            assert!(a.sub(&b).norm() < 1e-10);
        }
        let a = fam.gamma_vector(c(0.0, 0.9)).unwrap();
        let b = fam.gamma_cocycle_form(0.9).unwrap();
        assert!(a.sub(&b).norm() < 1e-10);
        assert!((a.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn product_states_give_constant_gamma() {
        let spec = InclusionSpec::single(2, 2).unwrap();
        let rb = diag_real(&[0.7, 0.3]);
        let sb = diag_real(&[0.4, 0.6]);
        let sc = diag_real(&[0.25, 0.75]);
        let rho = State::new(kron(&rb, &sc), Algebra::A).unwrap();
        let sigma = State::new(kron(&sb, &sc), Algebra::A).unwrap();
        let fam = GammaFamily::new(&spec, &rho, &sigma).unwrap();
        let g = fam.gamma_vector(c(0.3, 0.4)).unwrap();
        assert!(g.sub(&fam.psi()).norm() < 1e-12);
    }

    #[test]
    fn rank_deficient_domain() {
        let spec = InclusionSpec::single(2, 2).unwrap();
        let rho = random_state(4, 2, 3).unwrap();
        let sigma = random_state(4, 4, 4).unwrap();
        let fam = GammaFamily::new(&spec, &rho, &sigma).unwrap();
        assert!(fam.gamma_vector(c(0.25, 1.0)).is_ok());
        assert!(matches!(fam.gamma_vector(c(0.7, 0.0)), Err(Error::Domain(_))));
        assert!(matches!(fam.gamma_derivative_at_zero(1e-4), Err(Error::Domain(_))));
        let r = fam.gamma_top_state_check(0.3, 20, 1).unwrap();
        assert!(r.min_eigenvalue >= -1e-10);
    }

    #[test]
    fn top_edge_equality_for_full_rank() {
        let (spec, rho, sigma) = pair(5);
        let fam = GammaFamily::new(&spec, &rho, &sigma).unwrap();
        let r = fam.gamma_top_state_check(-0.4, 10, 2).unwrap();
        assert!(r.deviation < 1e-10);
        assert!(r.l1_norm <= r.fidelity + 1e-9);
    }

    #[test]
    fn derivative_matches_entropy_difference() {
        let spec = InclusionSpec::single(2, 2).unwrap();
        let rho = State::new(kron(&diag_real(&[0.7, 0.3]), &diag_real(&[0.6, 0.4])), Algebra::A).unwrap();
        let sigma = State::maximally_mixed(4, Algebra::A);
        let fam = GammaFamily::new(&spec, &rho, &sigma).unwrap();
        let d = fam.gamma_derivative_at_zero(1e-4).unwrap();
        assert!(d.residual() < 1e-6, "{d:?}");
        let fam = GammaFamily::new(&spec, &sigma, &sigma).unwrap();
        assert!(fam.gamma_derivative_at_zero(1e-4).unwrap().value.abs() < 1e-8);
    }

    #[test]
    fn kernels() {
        for th in [0.1, 0.25, 0.4] {
            let (a, b) = kernel_normalizations(th, KernelGrid::for_theta(th)).unwrap();
            assert!((a - 1.0).abs() < 1e-10 && (b - 1.0).abs() < 1e-10, "θ = {th}: {a} {b}");
        }
        for t in [0.0, 0.3, 1.0, 2.5] {
            let (_, b) = hirschman_kernels(1e-6, t).unwrap();
            assert!((b - crate::quadrature::recovery_weight(t)).abs() < 1e-5);
        }
        let (a, b) = hirschman_kernels(0.25, 0.0).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!(hirschman_kernels(0.0, 1.0).is_err());
        assert!(hirschman_kernels(0.5, 1.0).is_err());
    }

    #[test]
    fn hirschman_equal_states_is_flat() {
        let (spec, _, sigma) = pair(6);
        let fam = GammaFamily::new(&spec, &sigma, &sigma).unwrap();
        let r = hirschman_check(&fam, 0.25, 1.0, 2.0, KernelGrid::for_theta(0.25)).unwrap();
        assert!(r.lhs.abs() < 1e-12 && r.rhs.abs() < 1e-12);
    }

    #[test]
    fn hirschman_random_instance() {
        let (spec, rho, sigma) = pair(7);
        let fam = GammaFamily::new(&spec, &rho, &sigma).unwrap();
        let r = hirschman_check(&fam, 0.25, 1.0, 2.0, KernelGrid::for_theta(0.25)).unwrap();
        assert!(r.gap >= -1e-6, "{r:?}");
    }

    #[test]
    fn first_law_families() {
        let (_, rho, _) = pair(8);
        let psi = cone_rep(&rho);
        let mut rng = random::stream(8, 0);
        let v = random::random_unit_matrix(4, &mut rng);
        let grid = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5];
        let sched = ExponentSchedule::Constant { x: 0.4, p: 1.5 };
        let s = first_law_slope(perturbation_family(&psi, &v, 1.0), &grid, sched).unwrap();
        assert!(s.monotone());
        assert!(s.magnitude_at(1e-4).unwrap() < 1e-2);
        let flat = first_law_slope(|_| psi.clone(), &grid, sched).unwrap();
        assert!(flat.petz.iter().chain(&flat.sandwiched).all(|x| x.abs() < 1e-9));
        assert!(matches!(
            first_law_slope(perturbation_family(&psi, &v, 0.5), &grid, sched),
            Err(Error::NotAdmissible { .. })
        ));
    }

    #[test]
    fn gaussian_filter_limits() {
        let (_, rho, sigma) = pair(9);
        let f = FilterSpec::new(FilterFamily::Gaussian, 1e6).unwrap();
        let psi_p = filter_vector(&rho, &sigma, &f).unwrap();
        assert!(psi_p.sub(&cone_rep(&rho)).norm() < 1e-8);
        let g = FilterSpec::new(FilterFamily::Gaussian, 0.7).unwrap();
        let same = filter_vector(&sigma, &sigma, &g).unwrap();
        assert!(same.sub(&cone_rep(&sigma)).norm() < 1e-12);
        assert!(domination_slack(&rho, &sigma, &g).unwrap() >= -1e-8);
    }

    #[test]
    fn filter_operator_reproduces_vector() {
        let (_, rho, sigma) = pair(10);
        for fam in [FilterFamily::Gaussian, FilterFamily::CompactBump] {
            let f = FilterSpec::new(fam, 2.0).unwrap();
            let a = filter_operator(&rho, &sigma, &f).unwrap();
            let v = filter_vector(&rho, &sigma, &f).unwrap();
            assert!(frobenius(&(&a * rho.sqrt() - v.matrix())) < 1e-8, "{fam:?}");
            assert!(linalg::op_norm(&a) <= f.l1_norm() + 1e-8);
            assert!(f.l1_norm() >= f.profile(0.0));
        }
    }

    #[test]
    fn xi_basics() {
        let (spec, rho, sigma) = pair(11);
        let tau = random_state(4, 4, 12).unwrap();
        let x = xi_vector(&spec, &rho, &sigma, &tau, c(0.0, 0.0)).unwrap();
        assert!(x.sub(&cone_rep(&rho)).norm() < 1e-12);
        let th = 0.2;
        let x = xi_vector(&spec, &rho, &sigma, &rho, c(th, 0.0)).unwrap();
        let rb = restrict(&spec, &rho).unwrap();
        let sb = restrict(&spec, &sigma).unwrap();
        let direct = spec.embed_matrix(&(rb.real_power(th) * sb.real_power(-th))) * sigma.real_power(th) * rho.real_power(0.5 - th);
        assert!(frobenius(&(x.matrix() - direct)) < 1e-12);
        let g = xi_g(&spec, &rho, &sigma, th).unwrap();
        assert!(x.norm() >= g - 1e-12);
    }
}
