//! Hilbert–Schmidt standard form: `H = M_n` with `⟨m₁|m₂⟩ = tr(m₁* m₂)`,
//! `l(a)|m⟩ = |am⟩`, `r(a)|m⟩ = |ma⟩`, `J|m⟩ = |m*⟩`.

use nalgebra::DMatrix;

use crate::algebra::{Algebra, InclusionSpec, State};
use crate::error::{shape_err, Error, Result};
use crate::linalg::{self, c, CMat, C64};

/// A vector `|m⟩` of the standard Hilbert space.
#[derive(Clone, Debug, PartialEq)]
pub struct HSVector {
    tag: Algebra,
    matrix: CMat,
}

impl HSVector {
    pub fn new(matrix: CMat, tag: Algebra) -> Self {
        HSVector { tag, matrix }
    }

    pub fn tag(&self) -> Algebra {
        self.tag
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn inner(&self, other: &HSVector) -> C64 {
        linalg::hs_inner(&self.matrix, &other.matrix)
    }

    pub fn norm(&self) -> f64 {
        linalg::frobenius(&self.matrix)
    }

    pub fn normalized(&self) -> HSVector {
        HSVector::new(self.matrix.unscale(self.norm()), self.tag)
    }

    /// `l(a)|m⟩ = |a m⟩`.
    pub fn left_mul(&self, a: &CMat) -> HSVector {
        HSVector::new(a * &self.matrix, self.tag)
    }

    /// `r(a)|m⟩ = |m a⟩`.
    pub fn right_mul(&self, a: &CMat) -> HSVector {
        HSVector::new(&self.matrix * a, self.tag)
    }

    /// `⟨m| l(a) |m⟩ = tr(m m* a)`.
    pub fn expect_left(&self, a: &CMat) -> C64 {
        linalg::hs_inner(&self.matrix, &(a * &self.matrix))
    }

    /// Density of the functional induced on the algebra, `m m*`.
    pub fn algebra_density(&self) -> CMat {
        &self.matrix * self.matrix.adjoint()
    }

    /// Density of the functional induced on the commutant, `m* m`.
    pub fn commutant_density(&self) -> CMat {
        self.matrix.adjoint() * &self.matrix
    }

    pub fn algebra_state(&self) -> Result<State> {
        State::normalized(self.algebra_density(), self.tag)
    }

    pub fn commutant_state(&self) -> Result<State> {
        State::normalized(self.commutant_density(), self.tag)
    }

    pub fn sub(&self, other: &HSVector) -> HSVector {
        HSVector::new(&self.matrix - &other.matrix, self.tag)
    }

    /// Column-major coordinates in the matrix-unit basis.
    pub fn coords(&self) -> nalgebra::DVector<C64> {
        nalgebra::DVector::from_column_slice(self.matrix.as_slice())
    }
}

/// Natural-cone representative `|ρ^{1/2}⟩`.
pub fn cone_rep(rho: &State) -> HSVector {
    HSVector::new(rho.sqrt(), rho.tag())
}

/// `J|m⟩ = |m*⟩`.
pub fn modular_conjugation(v: &HSVector) -> HSVector {
    HSVector::new(v.matrix.adjoint(), v.tag)
}

/// Which algebra the relative modular operator belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `Δ_{φ,ψ} = l(σ_φ) r(σ_ψ^{-1})`.
    Algebra,
    /// `Δ'_{φ,ψ} = r(σ_φ) l(σ_ψ^{-1})`.
    Commutant,
}

/// Relative modular operator stored as the spectral data of its two slots.
#[derive(Clone, Debug)]
pub struct RelativeModular {
    left: State,
    right: State,
    side: Side,
}

impl RelativeModular {
    pub fn new(left: State, right: State) -> Result<Self> {
        Self::with_side(left, right, Side::Algebra)
    }

    pub fn commutant(left: State, right: State) -> Result<Self> {
        Self::with_side(left, right, Side::Commutant)
    }

    fn with_side(left: State, right: State, side: Side) -> Result<Self> {
        if left.dim() != right.dim() {
            return Err(shape_err(left.dim(), right.dim()));
        }
        Ok(RelativeModular { left, right, side })
    }

    pub fn left(&self) -> &State {
        &self.left
    }

    pub fn right(&self) -> &State {
        &self.right
    }

    /// `Δ^z |v⟩`, zero outside the support.
    pub fn apply_power(&self, z: C64, v: &HSVector) -> HSVector {
        let lp = self.left.power(z);
        let rp = self.right.power(-z);
        let m = match self.side {
            Side::Algebra => &lp * v.matrix() * &rp,
            Side::Commutant => &rp * v.matrix() * &lp,
        };
        HSVector::new(m, v.tag())
    }

    /// `⟨v|Δ^z|v⟩`.
    pub fn expectation(&self, z: C64, v: &HSVector) -> C64 {
        v.inner(&self.apply_power(z, v))
    }
}

pub fn apply_modular_power(dm: &RelativeModular, z: C64, v: &HSVector) -> HSVector {
    dm.apply_power(z, v)
}

/// Modular flow `σ^{it} a σ^{-it}` on the support.
pub fn modular_flow(sigma: &State, t: f64, a: &CMat) -> CMat {
    sigma.power(c(0.0, t)) * a * sigma.power(c(0.0, -t))
}

/// The finite-dimensional Connes cocycle `ψ^{it} φ^{-it}`.
pub fn connes_cocycle(psi: &State, phi: &State, t: f64) -> Result<CMat> {
    if psi.dim() != phi.dim() {
        return Err(shape_err(psi.dim(), phi.dim()));
    }
    Ok(psi.power(c(0.0, t)) * phi.power(c(0.0, -t)))
}

/// `V : K → H`, `V b|ξ_B⟩ = ι(b)|ξ_A⟩` for `ξ = ρ^{1/2}`, i.e.
/// `V(k) = ι(k ρ_B^{-1/2}) ρ_A^{1/2}` and `V*(h) = ι⁺(h ρ_A^{1/2}) ρ_B^{-1/2}`.
#[derive(Clone, Debug)]
pub struct EmbeddingIsometry {
    spec: InclusionSpec,
    a_half: CMat,
    b_inv_half: CMat,
}

impl EmbeddingIsometry {
    /// Isometric on the closure of `B|ξ_B⟩`; inverses are taken on supports.
    pub fn for_state(spec: &InclusionSpec, rho: &State) -> Result<Self> {
        spec.check_a(rho.matrix())?;
        let rb = crate::algebra::restrict(spec, rho)?;
        Ok(EmbeddingIsometry {
            spec: spec.clone(),
            a_half: rho.sqrt(),
            b_inv_half: rb.real_power(-0.5),
        })
    }

    pub fn spec(&self) -> &InclusionSpec {
        &self.spec
    }

    pub fn apply(&self, k: &HSVector) -> HSVector {
        let inner = k.matrix() * &self.b_inv_half;
        HSVector::new(self.spec.embed_matrix(&inner) * &self.a_half, Algebra::A)
    }

    pub fn adjoint_apply(&self, h: &HSVector) -> HSVector {
        let r = self.spec.restrict_matrix(&(h.matrix() * &self.a_half));
        HSVector::new(r * &self.b_inv_half, Algebra::B)
    }

    /// Matrix of `V` from the B basis of K to matrix-unit coordinates of H.
    pub fn matrix(&self) -> DMatrix<C64> {
        let basis = self.spec.b_basis();
        let n2 = self.spec.n() * self.spec.n();
        let mut out = DMatrix::zeros(n2, basis.len());
        for (j, e) in basis.iter().enumerate() {
            let v = self.apply(&HSVector::new(e.clone(), Algebra::B));
            out.set_column(j, &v.coords());
        }
        out
    }
}

/// `V_σ` for a faithful state σ on A.
pub fn v_embed(spec: &InclusionSpec, sigma: &State) -> Result<EmbeddingIsometry> {
    if !sigma.is_faithful() {
        return Err(Error::NotFaithful(format!(
            "rank {} of {}",
            sigma.support_rank(),
            sigma.dim()
        )));
    }
    EmbeddingIsometry::for_state(spec, sigma)
}
