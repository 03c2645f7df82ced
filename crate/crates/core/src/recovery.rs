//! Petz, rotated Petz and universal recovery channels `A → B`.

use crate::algebra::{restrict, trace_distance, Algebra, InclusionSpec, State};
use crate::error::{shape_err, Error, Result};
use crate::linalg::{self, c, CMat, Cutoff, Spectrum, C64};
use crate::measures::{entropy_difference, fidelity, Divergence};
use crate::quadrature::{recovery_weight_transform, QuadratureSpec};
use crate::standard_form::{modular_conjugation, v_embed, EmbeddingIsometry, HSVector, RelativeModular};

/// How a channel was built.
#[derive(Clone, Debug, PartialEq)]
pub enum ChannelKind {
    Petz,
    RotatedPetz { t: f64 },
    Universal { quad: QuadratureSpec },
    UniversalSpectral,
    Extended,
    Custom,
}

/// Unital CP map in the Heisenberg picture, stored through its Choi matrix
/// `C = Σ_{jk} E_{jk} ⊗ α(E_{jk})` (A index outer, B index inner).
#[derive(Clone, Debug)]
pub struct Channel {
    dim_a: usize,
    dim_b: usize,
    choi: CMat,
    kind: ChannelKind,
}

impl Channel {
    pub fn from_heisenberg(dim_a: usize, dim_b: usize, kind: ChannelKind, f: impl Fn(&CMat) -> CMat) -> Channel {
        let mut choi = CMat::zeros(dim_a * dim_b, dim_a * dim_b);
        for j in 0..dim_a {
            for k in 0..dim_a {
                let mut e = CMat::zeros(dim_a, dim_a);
                e[(j, k)] = c(1.0, 0.0);
                let img = f(&e);
                choi.view_mut((j * dim_b, k * dim_b), (dim_b, dim_b)).copy_from(&img);
            }
        }
        Channel {
            dim_a,
            dim_b,
            choi,
            kind,
        }
    }

    /// `Σ w_i α_i` for channels of equal shape.
    pub fn weighted_sum(parts: &[(f64, Channel)], kind: ChannelKind) -> Result<Channel> {
        let (_, first) = parts.first().ok_or_else(|| Error::InvalidParameter("empty sum".into()))?;
        let mut choi = CMat::zeros(first.choi.nrows(), first.choi.ncols());
        for (w, ch) in parts {
            if ch.dim_a != first.dim_a || ch.dim_b != first.dim_b {
                return Err(shape_err(
                    format!("{}→{}", first.dim_a, first.dim_b),
                    format!("{}→{}", ch.dim_a, ch.dim_b),
                ));
            }
            choi += ch.choi.scale(*w);
        }
        Ok(Channel {
            dim_a: first.dim_a,
            dim_b: first.dim_b,
            choi,
            kind,
        })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn choi(&self) -> &CMat {
        &self.choi
    }

    pub fn kind(&self) -> &ChannelKind {
        &self.kind
    }

    /// `α(E_{jk})`.
    pub fn unit_image(&self, j: usize, k: usize) -> CMat {
        let d = self.dim_b;
        self.choi.view((j * d, k * d), (d, d)).into_owned()
    }

    /// `α(a)`.
    pub fn action(&self, a: &CMat) -> CMat {
        let d = self.dim_b;
        let mut out = CMat::zeros(d, d);
        for j in 0..self.dim_a {
            for k in 0..self.dim_a {
                let w = a[(j, k)];
                if w != C64::new(0.0, 0.0) {
                    out += self.choi.view((j * d, k * d), (d, d)) * w;
                }
            }
        }
        out
    }

    /// The predual `α_*`, defined by `tr(α_*(ρ_B) a) = tr(ρ_B α(a))`.
    pub fn predual(&self, rho_b: &CMat) -> CMat {
        let d = self.dim_b;
        let mut out = CMat::zeros(self.dim_a, self.dim_a);
        for j in 0..self.dim_a {
            for k in 0..self.dim_a {
                let blk = self.choi.view((j * d, k * d), (d, d));
                let mut acc = C64::new(0.0, 0.0);
                for r in 0..d {
                    for s in 0..d {
                        acc += rho_b[(s, r)] * blk[(r, s)];
                    }
                }
                out[(k, j)] = acc;
            }
        }
        out
    }

    pub fn predual_state(&self, rho_b: &State) -> Result<State> {
        if rho_b.dim() != self.dim_b {
            return Err(shape_err(self.dim_b, rho_b.dim()));
        }
        State::new(self.predual(rho_b.matrix()), Algebra::A)
    }

    /// `‖α(1) − 1‖` in operator norm.
    pub fn unitality_residual(&self) -> f64 {
        let one = self.action(&linalg::identity(self.dim_a));
        linalg::op_norm(&(one - linalg::identity(self.dim_b)))
    }

    pub fn min_choi_eigenvalue(&self) -> f64 {
        linalg::min_eigenvalue(&self.choi)
    }

    /// Operator-norm distance between Choi matrices.
    pub fn choi_distance(&self, other: &Channel) -> f64 {
        linalg::op_norm(&(&self.choi - &other.choi))
    }
}

/// Spectral data of a faithful σ and its restriction, shared by all
/// rotated Petz maps.
#[derive(Clone, Debug)]
pub struct PetzFamily {
    spec: InclusionSpec,
    sigma_a: State,
    sigma_b: State,
}

impl PetzFamily {
    pub fn new(spec: &InclusionSpec, sigma: &State) -> Result<Self> {
        spec.check_a(sigma.matrix())?;
        if !sigma.is_faithful() {
            return Err(Error::NotFaithful(format!(
                "rank {} of {}",
                sigma.support_rank(),
                sigma.dim()
            )));
        }
        Ok(PetzFamily {
            spec: spec.clone(),
            sigma_a: sigma.clone(),
            sigma_b: restrict(spec, sigma)?,
        })
    }

    pub fn spec(&self) -> &InclusionSpec {
        &self.spec
    }

    pub fn sigma_a(&self) -> &State {
        &self.sigma_a
    }

    pub fn sigma_b(&self) -> &State {
        &self.sigma_b
    }

    /// `σ_B^{-1/2+it} ι⁺(σ_A^{1/2−it} a σ_A^{1/2+it}) σ_B^{-1/2−it}`.
    pub fn heisenberg(&self, t: f64, a: &CMat) -> CMat {
        let l = self.sigma_a.power(c(0.5, -t));
        let r = self.sigma_a.power(c(0.5, t));
        let bl = self.sigma_b.power(c(-0.5, t));
        let br = self.sigma_b.power(c(-0.5, -t));
        bl * self.spec.restrict_matrix(&(l * a * r)) * br
    }

    /// `σ_A^{1/2+it} ι(σ_B^{-1/2−it} ρ_B σ_B^{-1/2+it}) σ_A^{1/2−it}`.
    pub fn predual(&self, t: f64, rho_b: &CMat) -> CMat {
        let l = self.sigma_a.power(c(0.5, t));
        let r = self.sigma_a.power(c(0.5, -t));
        let bl = self.sigma_b.power(c(-0.5, -t));
        let br = self.sigma_b.power(c(-0.5, t));
        l * self.spec.embed_matrix(&(bl * rho_b * br)) * r
    }

    pub fn channel(&self, t: f64) -> Channel {
        let kind = if t == 0.0 { ChannelKind::Petz } else { ChannelKind::RotatedPetz { t } };
        Channel::from_heisenberg(self.spec.n(), self.spec.carrier_b(), kind, |a| self.heisenberg(t, a))
    }

    /// `Σ_j w_j α^{t_j}`.
    pub fn universal(&self, quad: &QuadratureSpec) -> Result<Channel> {
        let nodes = quad.nodes()?;
        let ops: Vec<_> = nodes
            .iter()
            .map(|&(t, w)| {
                (
                    w,
                    self.sigma_a.power(c(0.5, -t)),
                    self.sigma_a.power(c(0.5, t)),
                    self.sigma_b.power(c(-0.5, t)),
                    self.sigma_b.power(c(-0.5, -t)),
                )
            })
            .collect();
        Ok(Channel::from_heisenberg(
            self.spec.n(),
            self.spec.carrier_b(),
            ChannelKind::Universal { quad: *quad },
            |a| {
                let mut acc = CMat::zeros(self.spec.carrier_b(), self.spec.carrier_b());
                for (w, l, r, bl, br) in &ops {
                    acc += (bl * self.spec.restrict_matrix(&(l * a * r)) * br).scale(*w);
                }
                acc
            },
        ))
    }

    /// Predual of the universal channel, `Σ_j w_j α^{t_j}_*(ρ_B)`.
    pub fn universal_predual(&self, quad: &QuadratureSpec, rho_b: &CMat) -> Result<CMat> {
        let mut acc = CMat::zeros(self.spec.n(), self.spec.n());
        for (t, w) in quad.nodes()? {
            acc += self.predual(t, rho_b).scale(w);
        }
        Ok(acc)
    }

    /// The universal channel with the `t`-integral done exactly: every
    /// spectral component picks up `∫ e^{iωt} p(t) dt = (ω/2)/sinh(ω/2)`.
    pub fn universal_spectral(&self) -> Channel {
        let n = self.spec.n();
        let d = self.spec.carrier_b();
        let sa = self.sigma_a.spectrum();
        let sb = self.sigma_b.spectrum();
        let (ua, lam) = (sa.vectors(), sa.values());
        let (ub, mu) = (sb.vectors(), sb.values());
        let mut w = Vec::with_capacity(n * n);
        for a1 in 0..n {
            for a2 in 0..n {
                let outer = ua.column(a1) * ua.column(a2).adjoint();
                w.push(ub.adjoint() * self.spec.restrict_matrix(&outer) * ub);
            }
        }
        Channel::from_heisenberg(n, d, ChannelKind::UniversalSpectral, |a| {
            let at = ua.adjoint() * a * ua;
            let mut r = CMat::zeros(d, d);
            for a1 in 0..n {
                for a2 in 0..n {
                    let x = at[(a1, a2)] * (lam[a1] * lam[a2]).sqrt();
                    if x.norm() == 0.0 {
                        continue;
                    }
                    let wk = &w[a1 * n + a2];
                    for b in 0..d {
                        for b2 in 0..d {
                            let om = mu[b].ln() - mu[b2].ln() - lam[a1].ln() + lam[a2].ln();
                            r[(b, b2)] += x * wk[(b, b2)] * (recovery_weight_transform(om) / (mu[b] * mu[b2]).sqrt());
                        }
                    }
                }
            }
            ub * r * ub.adjoint()
        })
    }
}

/// `α(a) = J_B V* J_A l(a) J_A V J_B` applied to the unit vector of K,
/// which returns the element of B as a matrix.
fn petz_literal(v: &EmbeddingIsometry, a: &CMat) -> CMat {
    let spec = v.spec();
    let one = HSVector::new(linalg::identity(spec.carrier_b()), Algebra::B);
    let x = modular_conjugation(&one);
    let x = v.apply(&x);
    let x = modular_conjugation(&x);
    let x = x.left_mul(a);
    let x = modular_conjugation(&x);
    let x = v.adjoint_apply(&x);
    modular_conjugation(&x).into_matrix()
}

/// The Petz map of a faithful σ, assembled from `J_A`, `J_B` and `V_σ`.
pub fn petz_map(spec: &InclusionSpec, sigma: &State) -> Result<Channel> {
    let v = v_embed(spec, sigma)?;
    Ok(Channel::from_heisenberg(spec.n(), spec.carrier_b(), ChannelKind::Petz, |a| {
        petz_literal(&v, a)
    }))
}

/// Rotated Petz map `α^t` from its closed form.
pub fn rotated_petz(spec: &InclusionSpec, sigma: &State, t: f64) -> Result<Channel> {
    Ok(PetzFamily::new(spec, sigma)?.channel(t))
}

/// Rotated Petz map built from modular flows around the literal Petz map,
/// `α^t = ς^B_t ∘ α ∘ ς^A_{−t}` with `ς_t(x) = σ^{it} x σ^{−it}`.
pub fn rotated_petz_literal(spec: &InclusionSpec, sigma: &State, t: f64) -> Result<Channel> {
    let v = v_embed(spec, sigma)?;
    let sb = restrict(spec, sigma)?;
    let kind = ChannelKind::RotatedPetz { t };
    Ok(Channel::from_heisenberg(spec.n(), spec.carrier_b(), kind, |a| {
        let inner = crate::standard_form::modular_flow(sigma, -t, a);
        crate::standard_form::modular_flow(&sb, t, &petz_literal(&v, &inner))
    }))
}

pub fn universal_recovery(spec: &InclusionSpec, sigma: &State, quad: &QuadratureSpec) -> Result<Channel> {
    PetzFamily::new(spec, sigma)?.universal(quad)
}

pub fn universal_recovery_spectral(spec: &InclusionSpec, sigma: &State) -> Result<Channel> {
    Ok(PetzFamily::new(spec, sigma)?.universal_spectral())
}

/// Compression of an inclusion to the supports of σ on A and on B.
///
/// `W_A` and `W_B` are isometries onto `supp σ_A` and `supp σ_B` (the
/// latter block by block). The compressed map
/// `b' ↦ W_A* ι(W_B b' W_B*) W_A` is unital and CP; it is a `*`-homomorphism
/// whenever `π_A` commutes with `ι(π_B B π_B)`.
#[derive(Clone, Debug)]
pub struct ProjectedInclusion {
    spec: InclusionSpec,
    w_a: CMat,
    w_b: CMat,
    pi_b: CMat,
    sigma_a: State,
    sigma_b: State,
    sigma_functional: CMat,
}

impl ProjectedInclusion {
    pub fn new(spec: &InclusionSpec, sigma: &State) -> Result<Self> {
        spec.check_a(sigma.matrix())?;
        let sb = restrict(spec, sigma)?;
        let w_a = if sigma.is_faithful() {
            linalg::identity(spec.n())
        } else {
            sigma.spectrum().support_vectors()
        };
        let w_b = if sb.is_faithful() {
            linalg::identity(spec.carrier_b())
        } else {
            let mut cols: Vec<nalgebra::DVector<C64>> = Vec::new();
            for (bo, _, m, _) in spec.layout() {
                let blk = sb.matrix().view((bo, bo), (m, m)).into_owned();
                let cut = Cutoff::default();
                let sp = Spectrum::of_hermitian(&blk, cut);
                let thr = cut.threshold(sb.spectrum().lambda_max());
                for (j, &l) in sp.values().iter().enumerate() {
                    if l > thr {
                        let mut v = nalgebra::DVector::zeros(spec.carrier_b());
                        v.rows_mut(bo, m).copy_from(&sp.vectors().column(j));
                        cols.push(v);
                    }
                }
            }
            CMat::from_columns(&cols)
        };
        let pi_b = &w_b * w_b.adjoint();
        let sa_c = w_a.adjoint() * sigma.matrix() * &w_a;
        let sb_c = w_b.adjoint() * sb.matrix() * &w_b;
        Ok(ProjectedInclusion {
            spec: spec.clone(),
            sigma_a: State::normalized(sa_c, Algebra::A)?,
            sigma_b: State::normalized(sb_c, Algebra::B)?,
            w_a,
            w_b,
            pi_b,
            sigma_functional: sigma.matrix().clone(),
        })
    }

    pub fn rank_a(&self) -> usize {
        self.w_a.ncols()
    }

    pub fn rank_b(&self) -> usize {
        self.w_b.ncols()
    }

    pub fn w_a(&self) -> &CMat {
        &self.w_a
    }

    pub fn w_b(&self) -> &CMat {
        &self.w_b
    }

    /// Compressed σ on A (faithful).
    pub fn sigma_a(&self) -> &State {
        &self.sigma_a
    }

    pub fn sigma_b(&self) -> &State {
        &self.sigma_b
    }

    pub fn compress_a(&self, a: &CMat) -> CMat {
        self.w_a.adjoint() * a * &self.w_a
    }

    pub fn lift_a(&self, x: &CMat) -> CMat {
        &self.w_a * x * self.w_a.adjoint()
    }

    pub fn compress_b(&self, b: &CMat) -> CMat {
        self.w_b.adjoint() * b * &self.w_b
    }

    pub fn lift_b(&self, x: &CMat) -> CMat {
        &self.w_b * x * self.w_b.adjoint()
    }

    /// `b' ↦ W_A* ι(W_B b' W_B*) W_A`.
    pub fn embed(&self, b: &CMat) -> CMat {
        self.compress_a(&self.spec.embed_matrix(&self.lift_b(b)))
    }

    /// Hilbert–Schmidt adjoint of [`Self::embed`].
    pub fn restrict(&self, x: &CMat) -> CMat {
        self.compress_b(&self.spec.restrict_matrix(&self.lift_a(x)))
    }

    /// Whether the compressed map is multiplicative (up to `tol`).
    pub fn is_inclusion(&self, tol: f64) -> bool {
        let pa = &self.w_a * self.w_a.adjoint();
        self.spec.b_basis().iter().all(|e| {
            let x = self.spec.embed_matrix(&(&self.pi_b * e * &self.pi_b));
            linalg::op_norm(&(&pa * &x - &x * &pa)) <= tol
        })
    }

    /// `σ_B'^{-1/2+it} ι_π⁺(σ_A'^{1/2−it} a σ_A'^{1/2+it}) σ_B'^{-1/2−it}` on
    /// the compressed algebras.
    pub fn rotated_petz(&self, t: f64) -> Channel {
        let l = self.sigma_a.power(c(0.5, -t));
        let r = self.sigma_a.power(c(0.5, t));
        let bl = self.sigma_b.power(c(-0.5, t));
        let br = self.sigma_b.power(c(-0.5, -t));
        let kind = if t == 0.0 { ChannelKind::Petz } else { ChannelKind::RotatedPetz { t } };
        Channel::from_heisenberg(self.rank_a(), self.rank_b(), kind, |a| {
            &bl * self.restrict(&(&l * a * &r)) * &br
        })
    }

    pub fn petz(&self) -> Channel {
        self.rotated_petz(0.0)
    }

    pub fn universal(&self, quad: &QuadratureSpec) -> Result<Channel> {
        let parts: Vec<_> = quad.nodes()?.into_iter().map(|(t, w)| (w, self.rotated_petz(t))).collect();
        Channel::weighted_sum(&parts, ChannelKind::Universal { quad: *quad })
    }

    /// `W_A ρ'_rec W_A*` computed entirely on the compressed algebras.
    pub fn recover_compressed(&self, inner: &Channel, rho: &State) -> CMat {
        let rho_c = self.compress_a(rho.matrix());
        self.lift_a(&inner.predual(&self.restrict(&rho_c)))
    }
}

/// `α(a) = W_B α_π(W_A* a W_A) W_B* + σ(a)(1 − π_B)`.
pub fn nonfaithful_extend(spec: &InclusionSpec, sigma: &State, inner: &Channel) -> Result<Channel> {
    let proj = ProjectedInclusion::new(spec, sigma)?;
    extend_with(&proj, inner)
}

pub fn extend_with(proj: &ProjectedInclusion, inner: &Channel) -> Result<Channel> {
    if inner.dim_a() != proj.rank_a() || inner.dim_b() != proj.rank_b() {
        return Err(shape_err(
            format!("{}→{}", proj.rank_a(), proj.rank_b()),
            format!("{}→{}", inner.dim_a(), inner.dim_b()),
        ));
    }
    let d = proj.spec.carrier_b();
    let comp = linalg::identity(d) - &proj.pi_b;
    let sig = &proj.sigma_functional;
    Ok(Channel::from_heisenberg(proj.spec.n(), d, ChannelKind::Extended, |a| {
        let mut out = proj.lift_b(&inner.action(&proj.compress_a(a)));
        let sa = (sig * a).trace();
        if sa.norm() != 0.0 {
            out += &comp * sa;
        }
        out
    }))
}

/// Petz map for arbitrary σ: the literal construction when σ is faithful,
/// otherwise the extension of the compressed Petz map.
pub fn petz_general(spec: &InclusionSpec, sigma: &State) -> Result<Channel> {
    if sigma.is_faithful() {
        return petz_map(spec, sigma);
    }
    let proj = ProjectedInclusion::new(spec, sigma)?;
    extend_with(&proj, &proj.petz())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SufficiencyReport {
    pub delta_s: f64,
    /// Max over the `t`-grid of `‖V_ψ* Δ^{it}_{σ_A,ρ_A}|ψ_A⟩ − Δ^{it}_{σ_B,ρ_B}|ψ_B⟩‖`.
    pub intertwining_residual: f64,
    /// `‖ρ − α_*(ρ_B)‖₁` for the Petz map.
    pub recovery_distance: f64,
}

/// Checks the sufficiency identities when `ΔS ≤ 1e-8`; refuses otherwise.
pub fn exact_sufficiency_check(spec: &InclusionSpec, rho: &State, sigma: &State, t_grid: &[f64]) -> Result<SufficiencyReport> {
    let ds = entropy_difference(spec, rho, sigma)?;
    let delta_s = ds.value();
    if !(delta_s <= 1e-8) {
        return Err(Error::NotSufficient { delta_s });
    }
    let rb = restrict(spec, rho)?;
    let sb = restrict(spec, sigma)?;
    let v = EmbeddingIsometry::for_state(spec, rho)?;
    let da = RelativeModular::new(sigma.clone(), rho.clone())?;
    let db = RelativeModular::new(sb, rb.clone())?;
    let psi_a = crate::standard_form::cone_rep(rho);
    let psi_b = crate::standard_form::cone_rep(&rb);
    let mut resid: f64 = 0.0;
    for &t in t_grid {
        let lhs = v.adjoint_apply(&da.apply_power(c(0.0, t), &psi_a));
        let rhs = db.apply_power(c(0.0, t), &psi_b);
        resid = resid.max(lhs.sub(&rhs).norm());
    }
    let petz = petz_general(spec, sigma)?;
    let rec = petz.predual(rb.matrix());
    Ok(SufficiencyReport {
        delta_s,
        intertwining_residual: resid,
        recovery_distance: linalg::nuclear_norm(&(rho.matrix() - rec)),
    })
}

/// Smallest fidelity that is logged without clamping.
pub const FIDELITY_FLOOR: f64 = 1e-300;

#[derive(Clone, Debug, PartialEq)]
pub struct IntegralBoundReport {
    pub delta_s: f64,
    /// `Q[ln F(ρ, α^t_*(ρ_B))]`.
    pub log_fidelity_integral: f64,
    /// `|Q_N − Q_{2N}|`.
    pub quad_error: f64,
    /// `ΔS + 2 Q[ln F]`.
    pub gap: f64,
    pub clamped: bool,
}

impl IntegralBoundReport {
    pub fn tolerance(&self) -> f64 {
        1e-8 + self.quad_error
    }

    pub fn holds(&self) -> bool {
        self.gap >= -self.tolerance()
    }
}

fn log_fidelity_matrix(rho_sqrt: &CMat, other: &CMat) -> (f64, bool) {
    let s = Spectrum::of_hermitian(other, Cutoff::default());
    let f = linalg::nuclear_norm(&(rho_sqrt * s.real_power(0.5)));
    if f < FIDELITY_FLOOR {
        (FIDELITY_FLOOR.ln(), true)
    } else {
        (f.ln(), false)
    }
}

fn log_fidelity_integral(fam: &PetzFamily, rho: &State, rho_b: &CMat, quad: &QuadratureSpec) -> Result<(f64, bool)> {
    let rs = rho.sqrt();
    let mut acc = 0.0;
    let mut clamped = false;
    for (t, w) in quad.nodes()? {
        let (lf, cl) = log_fidelity_matrix(&rs, &fam.predual(t, rho_b));
        acc += w * lf;
        clamped |= cl;
    }
    Ok((acc, clamped))
}

/// `ΔS + 2 ∫ ln F(ρ, α^t_*(ρ_B)) p(t) dt` for faithful σ.
pub fn integral_bound(spec: &InclusionSpec, rho: &State, sigma: &State, quad: &QuadratureSpec) -> Result<IntegralBoundReport> {
    let fam = PetzFamily::new(spec, sigma)?;
    let delta_s = match entropy_difference(spec, rho, sigma)? {
        Divergence::Finite(x) => x,
        Divergence::Infinite => f64::INFINITY,
    };
    let rb = restrict(spec, rho)?;
    let (q, c1) = log_fidelity_integral(&fam, rho, rb.matrix(), quad)?;
    let (q2, c2) = log_fidelity_integral(&fam, rho, rb.matrix(), &quad.refined())?;
    Ok(IntegralBoundReport {
        delta_s,
        log_fidelity_integral: q,
        quad_error: (q - q2).abs(),
        gap: delta_s + 2.0 * q,
        clamped: c1 || c2,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct UniversalBoundReport {
    pub delta_s: f64,
    pub fidelity: f64,
    /// `−2 ln F(ρ, ρ_rec)`.
    pub neg_two_log_fidelity: f64,
    pub trace_distance: f64,
    /// `2 √(1 − e^{−ΔS})`.
    pub eps_bound: f64,
    pub clamped: bool,
}

impl UniversalBoundReport {
    pub fn fidelity_slack(&self) -> f64 {
        self.delta_s + 1e-8 - self.neg_two_log_fidelity
    }

    pub fn distance_slack(&self) -> f64 {
        self.eps_bound + 1e-7 - self.trace_distance
    }

    pub fn holds(&self) -> bool {
        self.fidelity_slack() >= 0.0 && self.distance_slack() >= 0.0
    }
}

/// Recovery by the universal channel and the resulting bounds.
pub fn universal_bound(spec: &InclusionSpec, rho: &State, sigma: &State, quad: &QuadratureSpec) -> Result<UniversalBoundReport> {
    let fam = PetzFamily::new(spec, sigma)?;
    let delta_s = entropy_difference(spec, rho, sigma)?.value();
    let rb = restrict(spec, rho)?;
    let rec = State::new(fam.universal_predual(quad, rb.matrix())?, Algebra::A)?;
    let f = fidelity(rho, &rec)?;
    let clamped = f < FIDELITY_FLOOR;
    let lf = f.max(FIDELITY_FLOOR).ln();
    Ok(UniversalBoundReport {
        delta_s,
        fidelity: f,
        neg_two_log_fidelity: -2.0 * lf,
        trace_distance: trace_distance(rho, &rec)?,
        eps_bound: 2.0 * (-(-delta_s).exp_m1()).max(0.0).sqrt(),
        clamped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::random_state;
    use crate::linalg::frobenius;

    #[test]
    fn petz_of_trace_state_is_partial_trace_adjoint() {
        let spec = InclusionSpec::single(2, 3).unwrap();
        let sigma = State::maximally_mixed(6, Algebra::A);
        let ch = petz_map(&spec, &sigma).unwrap();
        let rb = random_state(2, 2, 4).unwrap();
        let rb = State::new(rb.matrix().clone(), Algebra::B).unwrap();
        let want = linalg::kron(rb.matrix(), &linalg::identity(3).unscale(3.0));
        assert!(frobenius(&(ch.predual(rb.matrix()) - want)) < 1e-14);
        assert!(ch.unitality_residual() < 1e-14);
    }

    #[test]
    fn petz_fixes_reference() {
        let spec = InclusionSpec::new(vec![(2, 2), (1, 3)]).unwrap();
        let sigma = random_state(7, 7, 9).unwrap();
        let ch = petz_map(&spec, &sigma).unwrap();
        let sb = restrict(&spec, &sigma).unwrap();
        assert!(frobenius(&(ch.predual(sb.matrix()) - sigma.matrix())) < 1e-10);
    }

    #[test]
    fn rotated_at_zero_is_petz() {
        let spec = InclusionSpec::single(2, 2).unwrap();
        let sigma = random_state(4, 4, 2).unwrap();
        let a = petz_map(&spec, &sigma).unwrap();
        let b = rotated_petz(&spec, &sigma, 0.0).unwrap();
        assert!(a.choi_distance(&b) < 1e-12);
    }

    #[test]
    fn trace_state_is_flow_invariant() {
        let spec = InclusionSpec::single(2, 2).unwrap();
        let sigma = State::maximally_mixed(4, Algebra::A);
        let a = rotated_petz(&spec, &sigma, 0.7).unwrap();
        let b = rotated_petz(&spec, &sigma, 0.0).unwrap();
        assert!(a.choi_distance(&b) < 1e-12);
        let u = universal_recovery(&spec, &sigma, &QuadratureSpec::default()).unwrap();
        assert!(u.choi_distance(&b) < 1e-12);
    }

    #[test]
    fn non_faithful_rejected() {
        let spec = InclusionSpec::single(2, 2).unwrap();
        let s = State::from_diagonal(&[0.5, 0.5, 0.0, 0.0], Algebra::A).unwrap();
        assert!(matches!(petz_map(&spec, &s), Err(Error::NotFaithful(_))));
        assert!(matches!(universal_recovery(&spec, &s, &QuadratureSpec::default()), Err(Error::NotFaithful(_))));
    }

    #[test]
    fn bad_quadrature_rejected() {
        let spec = InclusionSpec::single(2, 2).unwrap();
        let sigma = random_state(4, 4, 2).unwrap();
        assert!(universal_recovery(&spec, &sigma, &QuadratureSpec::with_nodes(3)).is_err());
    }

    #[test]
    fn saturation_witness() {
        let spec = InclusionSpec::single(2, 2).unwrap();
        let sigma = State::maximally_mixed(4, Algebra::A);
        let rho = State::from_diagonal(&[1.0, 0.0, 0.0, 0.0], Algebra::A).unwrap();
        let r = universal_bound(&spec, &rho, &sigma, &QuadratureSpec::default()).unwrap();
        assert!((r.delta_s - 2f64.ln()).abs() < 1e-12);
        assert!((r.neg_two_log_fidelity - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn sufficiency_refuses_generic_pairs() {
        let spec = InclusionSpec::single(2, 2).unwrap();
        let rho = random_state(4, 4, 1).unwrap();
        let sigma = random_state(4, 4, 2).unwrap();
        assert!(matches!(
            exact_sufficiency_check(&spec, &rho, &sigma, &[0.0, 1.0]),
            Err(Error::NotSufficient { .. })
        ));
        let r = exact_sufficiency_check(&spec, &sigma, &sigma, &[0.0, 0.5, -1.3]).unwrap();
        assert!(r.recovery_distance < 1e-12);
        assert!(r.intertwining_residual < 1e-12);
    }

    #[test]
    fn extension_matches_compressed_recovery() {
        let spec = InclusionSpec::single(2, 2).unwrap();
        let sigma = State::from_diagonal(&[0.5, 0.5, 0.0, 0.0], Algebra::A).unwrap();
        let proj = ProjectedInclusion::new(&spec, &sigma).unwrap();
        assert!(proj.is_inclusion(1e-12));
        assert_eq!((proj.rank_a(), proj.rank_b()), (2, 1));
        let inner = proj.petz();
        let ext = nonfaithful_extend(&spec, &sigma, &inner).unwrap();
        assert!(ext.unitality_residual() < 1e-12);
        let mut m = CMat::zeros(4, 4);
        m[(0, 0)] = c(0.3, 0.0);
        m[(1, 1)] = c(0.7, 0.0);
        m[(0, 1)] = c(0.1, 0.2);
        m[(1, 0)] = c(0.1, -0.2);
        let rho = State::new(m, Algebra::A).unwrap();
        let rb = restrict(&spec, &rho).unwrap();
        let via_ext = ext.predual(rb.matrix());
        let via_comp = proj.recover_compressed(&inner, &rho);
        assert!(linalg::nuclear_norm(&(via_ext - via_comp)) < 1e-10);
        let bad = Channel::from_heisenberg(3, 1, ChannelKind::Custom, |a| CMat::from_element(1, 1, a.trace()));
        assert!(nonfaithful_extend(&spec, &sigma, &bad).is_err());
    }

    #[test]
    fn extension_of_faithful_is_inner() {
        let spec = InclusionSpec::single(2, 2).unwrap();
        let sigma = random_state(4, 4, 8).unwrap();
        let inner = petz_map(&spec, &sigma).unwrap();
        let ext = nonfaithful_extend(&spec, &sigma, &inner).unwrap();
        assert!(ext.choi_distance(&inner) < 1e-14);
    }
}
