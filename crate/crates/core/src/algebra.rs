//! Finite type-I inclusions `ι: B → A`, restriction and states.

use crate::error::{shape_err, Error, Result};
use crate::linalg::{self, c, CMat, Cutoff, Spectrum, C64};
use crate::random;

/// Operators are plain dense matrices on the carrier space of A or B.
pub type Observable = CMat;

/// Which side of the inclusion an object lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algebra {
    A,
    B,
}

/// Block structure `B = ⊕ M_{m_i}` inside `A = M_n`, `n = Σ m_i k_i`.
///
/// Elements of B are block-diagonal `d × d` matrices with `d = Σ m_i`.
/// Within block `i` the A index is `r·k_i + c` for B index `r` and
/// multiplicity index `c`, so the single-block case is `b ↦ b ⊗ 1_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InclusionSpec {
    blocks: Vec<(usize, usize)>,
    n: usize,
    dim_b: usize,
    carrier_b: usize,
}

impl InclusionSpec {
    pub fn new(blocks: Vec<(usize, usize)>) -> Result<Self> {
        if blocks.is_empty() || blocks.iter().any(|&(m, k)| m == 0 || k == 0) {
            return Err(Error::InvalidParameter(format!(
                "blocks must be a non-empty list of positive (m, k), got {blocks:?}"
            )));
        }
        let n = blocks.iter().map(|&(m, k)| m * k).sum();
        let dim_b = blocks.iter().map(|&(m, _)| m * m).sum();
        let carrier_b = blocks.iter().map(|&(m, _)| m).sum();
        Ok(InclusionSpec {
            blocks,
            n,
            dim_b,
            carrier_b,
        })
    }

    pub fn single(m: usize, k: usize) -> Result<Self> {
        Self::new(vec![(m, k)])
    }

    pub fn blocks(&self) -> &[(usize, usize)] {
        &self.blocks
    }

    /// Dimension of the carrier space of A.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension of B as a vector space, `Σ m_i²`.
    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    /// Dimension of the carrier space of B, `Σ m_i`.
    pub fn carrier_b(&self) -> usize {
        self.carrier_b
    }

    pub fn dim(&self, tag: Algebra) -> usize {
        match tag {
            Algebra::A => self.n,
            Algebra::B => self.carrier_b,
        }
    }

    /// `(b_offset, a_offset, m, k)` for each block.
    pub fn layout(&self) -> Vec<(usize, usize, usize, usize)> {
        let mut out = Vec::with_capacity(self.blocks.len());
        let (mut bo, mut ao) = (0, 0);
        for &(m, k) in &self.blocks {
            out.push((bo, ao, m, k));
            bo += m;
            ao += m * k;
        }
        out
    }

    /// Frobenius norm of the part of `b` outside the diagonal blocks.
    pub fn off_block_norm(&self, b: &CMat) -> f64 {
        let mut mask = vec![usize::MAX; self.carrier_b];
        for (i, (bo, _, m, _)) in self.layout().into_iter().enumerate() {
            mask[bo..bo + m].iter_mut().for_each(|x| *x = i);
        }
        let mut s = 0.0;
        for r in 0..self.carrier_b {
            for col in 0..self.carrier_b {
                if mask[r] != mask[col] {
                    s += b[(r, col)].norm_sqr();
                }
            }
        }
        s.sqrt()
    }

    /// Zeroes everything outside the diagonal blocks (the conditional
    /// expectation onto B for the trace).
    pub fn block_part(&self, b: &CMat) -> CMat {
        let mut out = CMat::zeros(self.carrier_b, self.carrier_b);
        for (bo, _, m, _) in self.layout() {
            out.view_mut((bo, bo), (m, m))
                .copy_from(&b.view((bo, bo), (m, m)));
        }
        out
    }

    pub fn check_b(&self, b: &CMat) -> Result<()> {
        if b.nrows() != self.carrier_b || b.ncols() != self.carrier_b {
            return Err(shape_err(
                format!("{0}x{0}", self.carrier_b),
                format!("{}x{}", b.nrows(), b.ncols()),
            ));
        }
        let off = self.off_block_norm(b);
        if off > 1e-9 * linalg::frobenius(b).max(1.0) {
            return Err(Error::NotBlockDiagonal(off));
        }
        Ok(())
    }

    pub fn check_a(&self, a: &CMat) -> Result<()> {
        if a.nrows() != self.n || a.ncols() != self.n {
            return Err(shape_err(
                format!("{0}x{0}", self.n),
                format!("{}x{}", a.nrows(), a.ncols()),
            ));
        }
        Ok(())
    }

    /// `ι` without the block-diagonal check; off-block entries are ignored.
    pub fn embed_matrix(&self, b: &CMat) -> CMat {
        let mut out = CMat::zeros(self.n, self.n);
        for (bo, ao, m, k) in self.layout() {
            for r in 0..m {
                for s in 0..m {
                    let v = b[(bo + r, bo + s)];
                    if v == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for j in 0..k {
                        out[(ao + r * k + j, ao + s * k + j)] = v;
                    }
                }
            }
        }
        out
    }

    /// `ι⁺`, the Hilbert–Schmidt adjoint of `ι`: block-wise partial trace
    /// over the multiplicity factor, applied to any `n × n` matrix.
    pub fn restrict_matrix(&self, x: &CMat) -> CMat {
        let mut out = CMat::zeros(self.carrier_b, self.carrier_b);
        for (bo, ao, m, k) in self.layout() {
            for r in 0..m {
                for s in 0..m {
                    let mut acc = C64::new(0.0, 0.0);
                    for j in 0..k {
                        acc += x[(ao + r * k + j, ao + s * k + j)];
                    }
                    out[(bo + r, bo + s)] = acc;
                }
            }
        }
        out
    }

    /// Orthonormal basis of B (matrix units inside each block).
    pub fn b_basis(&self) -> Vec<CMat> {
        let mut out = Vec::with_capacity(self.dim_b);
        for (bo, _, m, _) in self.layout() {
            for r in 0..m {
                for s in 0..m {
                    let mut e = CMat::zeros(self.carrier_b, self.carrier_b);
                    e[(bo + r, bo + s)] = c(1.0, 0.0);
                    out.push(e);
                }
            }
        }
        out
    }
}

/// `ι(b) = ⊕ (b_i ⊗ 1_{k_i})`.
pub fn embed(spec: &InclusionSpec, b: &Observable) -> Result<Observable> {
    spec.check_b(b)?;
    Ok(spec.embed_matrix(b))
}

/// `ρ ∘ ι` as a density matrix on B.
pub fn restrict(spec: &InclusionSpec, rho: &State) -> Result<State> {
    if rho.tag() != Algebra::A {
        return Err(Error::InvalidParameter("restrict expects a state on A".into()));
    }
    spec.check_a(rho.matrix())?;
    State::with_cutoff(spec.restrict_matrix(rho.matrix()), Algebra::B, rho.cutoff())
}

/// A density matrix together with its cached spectral data.
#[derive(Clone, Debug)]
pub struct State {
    tag: Algebra,
    matrix: CMat,
    spectrum: Spectrum,
    cutoff: Cutoff,
}

const STATE_TOL: f64 = 1e-12;

impl State {
    pub fn new(matrix: CMat, tag: Algebra) -> Result<Self> {
        Self::with_cutoff(matrix, tag, Cutoff::default())
    }

    pub fn with_cutoff(matrix: CMat, tag: Algebra, cutoff: Cutoff) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(shape_err("non-empty square matrix", format!("{}x{}", matrix.nrows(), matrix.ncols())));
        }
        let n = matrix.nrows() as f64;
        let norm = linalg::frobenius(&matrix).max(1.0);
        let herm = linalg::frobenius(&(&matrix - matrix.adjoint()));
        if herm > STATE_TOL * norm * n {
            return Err(Error::InvalidState(format!("Hermiticity residual {herm:e}")));
        }
        let matrix = linalg::hermitian_part(&matrix);
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > STATE_TOL * n {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let spectrum = Spectrum::of_hermitian(&matrix, cutoff);
        let min = spectrum.values().last().copied().unwrap_or(0.0);
        if min < -STATE_TOL * n {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(State {
            tag,
            matrix,
            spectrum,
            cutoff,
        })
    }

    /// Normalizes a PSD matrix to unit trace first.
    pub fn normalized(matrix: CMat, tag: Algebra) -> Result<Self> {
        let tr = matrix.trace().re;
        if !(tr > 0.0) {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        Self::new(matrix.unscale(tr), tag)
    }

    pub fn maximally_mixed(dim: usize, tag: Algebra) -> Self {
        Self::new(linalg::identity(dim).unscale(dim as f64), tag).unwrap()
    }

    pub fn from_diagonal(d: &[f64], tag: Algebra) -> Result<Self> {
        Self::new(linalg::diag_real(d), tag)
    }

    /// Maximally mixed state of B for a given inclusion.
    pub fn trace_state_b(spec: &InclusionSpec) -> Self {
        Self::maximally_mixed(spec.carrier_b(), Algebra::B)
    }

    pub fn tag(&self) -> Algebra {
        self.tag
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn cutoff(&self) -> Cutoff {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn support_rank(&self) -> usize {
        self.spectrum.support_rank()
    }

    pub fn is_faithful(&self) -> bool {
        self.support_rank() == self.dim()
    }

    /// `ρ^z` on the support, zero on its complement.
    pub fn power(&self, z: C64) -> CMat {
        self.spectrum.power(z)
    }

    pub fn real_power(&self, x: f64) -> CMat {
        self.spectrum.real_power(x)
    }

    pub fn sqrt(&self) -> CMat {
        self.spectrum.real_power(0.5)
    }

    pub fn support_projection(&self) -> CMat {
        self.spectrum.projector()
    }

    /// Expectation `tr(ρ a)`.
    pub fn expect(&self, a: &CMat) -> C64 {
        (&self.matrix * a).trace()
    }

    /// `(1 − ε) ρ + ε · 1/n`.
    pub fn regularized(&self, eps: f64) -> Result<State> {
        let n = self.dim();
        let m = self.matrix.scale(1.0 - eps) + linalg::identity(n).scale(eps / n as f64);
        State::with_cutoff(m, self.tag, self.cutoff)
    }

    /// Condition number `λ_max / λ_min` (infinite if not faithful).
    pub fn condition_number(&self) -> f64 {
        let v = self.spectrum.values();
        let lmin = *v.last().unwrap();
        if !self.is_faithful() || lmin <= 0.0 {
            f64::INFINITY
        } else {
            v[0] / lmin
        }
    }
}

pub fn support_projection(rho: &State) -> Observable {
    rho.support_projection()
}

/// Trace norm `‖ρ − σ‖₁` (between 0 and 2).
pub fn trace_distance(rho: &State, sigma: &State) -> Result<f64> {
    if rho.tag() != sigma.tag() || rho.dim() != sigma.dim() {
        return Err(shape_err(
            format!("{:?} state of dim {}", rho.tag(), rho.dim()),
            format!("{:?} state of dim {}", sigma.tag(), sigma.dim()),
        ));
    }
    Ok(trace_norm_diff(rho.matrix(), sigma.matrix()))
}

pub(crate) fn trace_norm_diff(a: &CMat, b: &CMat) -> f64 {
    linalg::nuclear_norm(&(a - b))
}

/// `G G* / tr(G G*)` for a `dim × rank` complex Gaussian `G` drawn from `seed`.
pub fn random_state(dim: usize, rank: usize, seed: u64) -> Result<State> {
    let mut rng = random::rng_from_seed(seed);
    random::random_density(dim, rank, &mut rng).and_then(|m| State::new(m, Algebra::A))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag_real, frobenius};

    #[test]
    fn single_block_is_kronecker() {
        let spec = InclusionSpec::single(2, 2).unwrap();
        let b = diag_real(&[1.0, 0.0]);
        assert_eq!(embed(&spec, &b).unwrap(), diag_real(&[1.0, 1.0, 0.0, 0.0]));
        let mut g = CMat::zeros(2, 2);
        g[(0, 1)] = c(0.3, -1.2);
        g[(1, 0)] = c(2.0, 0.5);
        let want = linalg::kron(&g, &linalg::identity(2));
        assert_eq!(spec.embed_matrix(&g), want);
    }

    #[test]
    fn multi_block_expansion() {
        let spec = InclusionSpec::new(vec![(1, 2), (2, 1)]).unwrap();
        let mut b = CMat::zeros(3, 3);
        b[(0, 0)] = c(0.7, 0.0);
        b[(1, 1)] = c(1.0, 0.0);
        b[(1, 2)] = c(0.0, 2.0);
        b[(2, 1)] = c(3.0, 0.0);
        b[(2, 2)] = c(4.0, 0.0);
        let a = embed(&spec, &b).unwrap();
        let mut want = CMat::zeros(4, 4);
        want[(0, 0)] = c(0.7, 0.0);
        want[(1, 1)] = c(0.7, 0.0);
        want.view_mut((2, 2), (2, 2)).copy_from(&b.view((1, 1), (2, 2)));
        assert_eq!(a, want);
    }

    #[test]
    fn off_block_input_rejected() {
        let spec = InclusionSpec::new(vec![(1, 2), (1, 1)]).unwrap();
        let b = CMat::from_element(2, 2, c(1.0, 0.0));
        assert!(matches!(embed(&spec, &b), Err(Error::NotBlockDiagonal(_))));
        assert!(matches!(embed(&spec, &CMat::zeros(3, 3)), Err(Error::Dimension { .. })));
    }

    #[test]
    fn restrict_product_projector() {
        let spec = InclusionSpec::single(2, 2).unwrap();
        let rho = State::from_diagonal(&[1.0, 0.0, 0.0, 0.0], Algebra::A).unwrap();
        let rb = restrict(&spec, &rho).unwrap();
        assert!(frobenius(&(rb.matrix() - diag_real(&[1.0, 0.0]))) < 1e-15);
    }

    #[test]
    fn restrict_trace_state() {
        let spec = InclusionSpec::new(vec![(2, 3), (1, 2)]).unwrap();
        let rho = State::maximally_mixed(spec.n(), Algebra::A);
        let rb = restrict(&spec, &rho).unwrap();
        let n = spec.n() as f64;
        let want = diag_real(&[3.0 / n, 3.0 / n, 2.0 / n]);
        assert!(frobenius(&(rb.matrix() - want)) < 1e-15);
    }

    #[test]
    fn support_cutoff_rule() {
        let rho = State::from_diagonal(&[0.5, 0.5, 1e-18, 0.0], Algebra::A).unwrap();
        assert_eq!(rho.support_rank(), 2);
        assert!(frobenius(&(support_projection(&rho) - diag_real(&[1.0, 1.0, 0.0, 0.0]))) < 1e-15);
        let full = State::maximally_mixed(3, Algebra::A);
        assert!(frobenius(&(support_projection(&full) - linalg::identity(3))) < 1e-14);
    }

    #[test]
    fn trace_distance_examples() {
        let a = State::from_diagonal(&[1.0, 0.0], Algebra::A).unwrap();
        let b = State::from_diagonal(&[0.0, 1.0], Algebra::A).unwrap();
        assert!((trace_distance(&a, &b).unwrap() - 2.0).abs() < 1e-14);
        let a = State::from_diagonal(&[0.75, 0.25], Algebra::A).unwrap();
        let b = State::from_diagonal(&[0.25, 0.75], Algebra::A).unwrap();
        assert!((trace_distance(&a, &b).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(trace_distance(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn invalid_states_rejected() {
        assert!(State::from_diagonal(&[0.6, 0.6], Algebra::A).is_err());
        assert!(State::from_diagonal(&[1.1, -0.1], Algebra::A).is_err());
        let mut m = diag_real(&[0.5, 0.5]);
        m[(0, 1)] = c(0.1, 0.0);
        assert!(State::new(m, Algebra::A).is_err());
        assert!(matches!(random_state(2, 3, 0), Err(Error::RankOutOfRange { .. })));
    }

    #[test]
    fn random_state_is_deterministic_and_pure_at_rank_one() {
        let a = random_state(3, 3, 11).unwrap();
        let b = random_state(3, 3, 11).unwrap();
        assert_eq!(a.matrix(), b.matrix());
        let p = random_state(4, 1, 5).unwrap();
        let purity = (p.matrix() * p.matrix()).trace().re;
        assert!((purity - 1.0).abs() < 1e-12);
        assert_eq!(p.support_rank(), 1);
    }
}
