//! Entropic and distance measures on states and HS vectors.

use crate::algebra::{restrict, InclusionSpec, State};
use crate::error::{shape_err, Error, Result};
use crate::linalg::{self, c, CMat, C64};
use crate::optimize::{sphere_search, SearchBudget};
use crate::standard_form::{HSVector, RelativeModular};

/// A divergence value; `Infinite` marks disjoint supports, never overflow.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Divergence {
    Finite(f64),
    Infinite,
}

impl Divergence {
    pub fn is_finite(&self) -> bool {
        matches!(self, Divergence::Finite(_))
    }

    /// The value, with `Infinite` mapped to `f64::INFINITY`.
    pub fn value(&self) -> f64 {
        match self {
            Divergence::Finite(x) => *x,
            Divergence::Infinite => f64::INFINITY,
        }
    }
}

/// Operator norm of `(1 − π_σ) π_ρ` above which `supp ρ ⊄ supp σ`.
const SUPPORT_LEAK_TOL: f64 = 1e-8;

fn same_shape(rho: &State, sigma: &State) -> Result<()> {
    if rho.dim() != sigma.dim() || rho.tag() != sigma.tag() {
        return Err(shape_err(
            format!("{:?}/{}", rho.tag(), rho.dim()),
            format!("{:?}/{}", sigma.tag(), sigma.dim()),
        ));
    }
    Ok(())
}

/// `S(ρ|σ) = tr ρ (ln ρ − ln σ)`, with logarithms taken on supports.
pub fn relative_entropy(rho: &State, sigma: &State) -> Result<Divergence> {
    same_shape(rho, sigma)?;
    if !sigma.is_faithful() {
        let n = rho.dim();
        let leak = (linalg::identity(n) - sigma.support_projection()) * rho.support_projection();
        if linalg::op_norm(&leak) > SUPPORT_LEAK_TOL {
            return Ok(Divergence::Infinite);
        }
    }
    let plogp: f64 = rho
        .spectrum()
        .support_values()
        .iter()
        .map(|&l| l * l.ln())
        .sum();
    let cross = rho.expect(&sigma.spectrum().log()).re;
    Ok(Divergence::Finite(plogp - cross))
}

/// `S_A(ρ|σ) − S_B(ρ∘ι|σ∘ι)`.
pub fn entropy_difference(spec: &InclusionSpec, rho: &State, sigma: &State) -> Result<Divergence> {
    let sa = relative_entropy(rho, sigma)?;
    let Divergence::Finite(sa) = sa else {
        return Ok(Divergence::Infinite);
    };
    let sb = relative_entropy(&restrict(spec, rho)?, &restrict(spec, sigma)?)?;
    Ok(Divergence::Finite(sa - sb.value()))
}

/// `F(ρ, σ) = ‖√ρ √σ‖₁`.
pub fn fidelity(rho: &State, sigma: &State) -> Result<f64> {
    same_shape(rho, sigma)?;
    Ok(linalg::nuclear_norm(&(rho.sqrt() * sigma.sqrt())))
}

/// Parameters of an Araki–Masuda norm.
#[derive(Clone, Debug)]
pub struct LpParams {
    pub p: f64,
    pub reference: State,
    /// Norm relative to the commutant (the reference density acts on the left).
    pub commutant: bool,
}

impl LpParams {
    pub fn new(p: f64, reference: State) -> Result<Self> {
        Self::with_side(p, reference, true)
    }

    pub fn with_side(p: f64, reference: State, commutant: bool) -> Result<Self> {
        if !(1.0..=2.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("p = {p} outside [1, 2]")));
        }
        Ok(LpParams {
            p,
            reference,
            commutant,
        })
    }
}

/// `(tr|ρ^{1/p−1/2} ζ|^p)^{1/p}` (commutant) or `(tr|ζ ρ^{1/p−1/2}|^p)^{1/p}`.
pub fn lp_norm(zeta: &HSVector, params: &LpParams) -> Result<f64> {
    if !(1.0..=2.0).contains(&params.p) {
        return Err(Error::InvalidParameter(format!("p = {} outside [1, 2]", params.p)));
    }
    if zeta.dim() != params.reference.dim() {
        return Err(shape_err(params.reference.dim(), zeta.dim()));
    }
    let w = params.reference.real_power(1.0 / params.p - 0.5);
    let m = if params.commutant {
        &w * zeta.matrix()
    } else {
        zeta.matrix() * &w
    };
    Ok(linalg::schatten(&m, params.p))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VariationalNorm {
    pub value: f64,
    pub converged: bool,
}

/// Infimum over unit χ of `‖Δ_{χ,ψ}^{1/2−1/p} ζ‖` by sphere search.
/// Intended as a test oracle for small dimensions only.
pub fn lp_norm_variational(zeta: &HSVector, params: &LpParams, budget: SearchBudget) -> Result<VariationalNorm> {
    lp_norm(zeta, params)?;
    let n = zeta.dim();
    if n > 9 {
        return Err(Error::InvalidParameter(format!("dimension {n} too large for the oracle")));
    }
    let w = params.reference.real_power(1.0 / params.p - 0.5);
    let gamma = 0.5 - 1.0 / params.p;
    let base = if params.commutant {
        &w * zeta.matrix()
    } else {
        zeta.matrix() * &w
    };
    let commutant = params.commutant;
    let out = sphere_search(n, budget, |chi| {
        let x = if commutant {
            chi.adjoint() * chi
        } else {
            chi * chi.adjoint()
        };
        let xg = linalg::Spectrum::of_hermitian(&x, linalg::Cutoff::default()).real_power(gamma);
        let m = if commutant { &base * &xg } else { &xg * &base };
        linalg::frobenius(&m)
    });
    Ok(VariationalNorm {
        value: out.best,
        converged: out.converged,
    })
}

/// `(1/(α−1)) ln tr(ρ^α σ^{1−α})` for `α ∈ (0, 1)`.
pub fn petz_renyi(rho: &State, sigma: &State, alpha: f64) -> Result<Divergence> {
    same_shape(rho, sigma)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("α = {alpha} outside (0, 1)")));
    }
    let q = (rho.real_power(alpha) * sigma.real_power(1.0 - alpha)).trace().re;
    if q <= 1e-300 {
        return Ok(Divergence::Infinite);
    }
    Ok(Divergence::Finite(q.ln() / (alpha - 1.0)))
}

/// `(1/(α−1)) ln ‖ρ^{1/2}‖_{2α,σ}^{2α}` for `α ∈ [1/2, 1)`.
pub fn sandwiched_renyi(rho: &State, sigma: &State, alpha: f64) -> Result<Divergence> {
    same_shape(rho, sigma)?;
    if !(0.5..1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!("α = {alpha} outside [1/2, 1)")));
    }
    let p = 2.0 * alpha;
    let nrm = lp_norm(&crate::standard_form::cone_rep(rho), &LpParams::new(p, sigma.clone())?)?;
    if nrm <= 1e-300 {
        return Ok(Divergence::Infinite);
    }
    Ok(Divergence::Finite(p * nrm.ln() / (alpha - 1.0)))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FvdgReport {
    pub lhs: f64,
    pub mid: f64,
    pub rhs: f64,
}

impl FvdgReport {
    pub fn slack(&self) -> f64 {
        (self.mid - self.lhs).min(self.rhs - self.mid)
    }

    pub fn holds(&self) -> bool {
        self.slack() >= -1e-10
    }
}

/// `(1 − F, ‖ρ − σ‖₁/2, √(1 − F²))`.
pub fn fuchs_vdg_check(rho: &State, sigma: &State) -> Result<FvdgReport> {
    let f = fidelity(rho, sigma)?.min(1.0);
    let d = crate::algebra::trace_distance(rho, sigma)?;
    Ok(FvdgReport {
        lhs: 1.0 - f,
        mid: 0.5 * d,
        rhs: (1.0 - f * f).max(0.0).sqrt(),
    })
}

/// `Δ_{ψ,ζ}` for two unit vectors: `l(ψψ*) r((ζ*ζ)^{-1})`.
pub fn vector_modular(psi: &HSVector, zeta: &HSVector) -> Result<RelativeModular> {
    RelativeModular::new(psi.algebra_state()?, zeta.commutant_state()?)
}

/// `⟨ζ|Δ_{ψ,ζ}^z|ζ⟩`.
pub fn modular_expectation(psi: &HSVector, zeta: &HSVector, z: C64) -> Result<C64> {
    Ok(vector_modular(psi, zeta)?.expectation(z, zeta))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AltReport {
    pub lower: f64,
    pub middle: f64,
    pub upper: f64,
}

impl AltReport {
    pub fn slack(&self) -> f64 {
        (self.middle - self.lower).min(self.upper - self.middle)
    }
}

/// `1 − ⟨ζ|Δ^{2/p−1}|ζ⟩ ≤ 1 − ‖ζ‖²_{p,ψ} ≤ 1 − ⟨ζ|Δ^{1−p/2}|ζ⟩^{2/p}`
/// with `Δ = Δ_{ψ,ζ}` and unit vectors ψ, ζ.
pub fn alt_chain(psi: &HSVector, zeta: &HSVector, p: f64) -> Result<AltReport> {
    let dm = vector_modular(psi, zeta)?;
    let lo = dm.expectation(c(2.0 / p - 1.0, 0.0), zeta).re;
    let hi = dm.expectation(c(1.0 - 0.5 * p, 0.0), zeta).re.max(0.0);
    let nrm = lp_norm(zeta, &LpParams::new(p, psi.algebra_state()?)?)?;
    Ok(AltReport {
        lower: 1.0 - lo,
        middle: 1.0 - nrm * nrm,
        upper: 1.0 - hi.powf(2.0 / p),
    })
}

/// `h₂(z) / ‖ψ − ζ‖²` with `h₂(z) = Re(1 − ⟨ζ|Δ_{ψ,ζ}^z|ζ⟩)`.
pub fn harnack_ratio(psi: &HSVector, zeta: &HSVector, z: C64) -> Result<f64> {
    let h2 = 1.0 - modular_expectation(psi, zeta, z)?.re;
    let d = psi.sub(zeta).norm();
    Ok(h2 / (d * d))
}

/// Helper used by tests and the lab: `‖π ζ‖` for the reference support.
pub fn projected_norm(zeta: &HSVector, reference: &State) -> f64 {
    linalg::frobenius(&(reference.support_projection() * zeta.matrix()))
}

/// `|⟨ξ_σ| u' ξ_ρ⟩|` for a commutant unitary `u'` acting as right
/// multiplication by `u`.
pub fn commutant_overlap(rho: &State, sigma: &State, u: &CMat) -> f64 {
    linalg::hs_inner(&sigma.sqrt(), &(rho.sqrt() * u)).norm()
}
