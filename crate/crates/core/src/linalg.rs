//! Dense complex matrix helpers and spectral calculus on supports.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;

/// Relative gap used to group eigenvalues into degenerate clusters.
pub const CLUSTER_GAP: f64 = 1e-10;

/// Support rule: an eigenvalue λ is in the support iff
/// `λ > max(abs_tol, rel_tol · λ_max)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cutoff {
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for Cutoff {
    fn default() -> Self {
        Cutoff {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
        }
    }
}

impl Cutoff {
    pub fn threshold(&self, lambda_max: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * lambda_max)
    }
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(n: usize) -> CMat {
    CMat::zeros(n, n)
}

pub fn adjoint(m: &CMat) -> CMat {
    m.adjoint()
}

pub fn trace(m: &CMat) -> C64 {
    m.trace()
}

/// Hilbert–Schmidt inner product `tr(a* b)`, antilinear in `a`.
pub fn hs_inner(a: &CMat, b: &CMat) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn diag_real(d: &[f64]) -> CMat {
    let n = d.len();
    let mut m = zeros(n);
    for (i, &x) in d.iter().enumerate() {
        m[(i, i)] = c(x, 0.0);
    }
    m
}

pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    m.clone().singular_values().iter().copied().collect()
}

/// Schatten p-norm `(Σ s_i^p)^{1/p}` from a full SVD.
pub fn schatten(m: &CMat, p: f64) -> f64 {
    let s = singular_values(m);
    if p.is_infinite() {
        return s.iter().copied().fold(0.0, f64::max);
    }
    s.iter().map(|x| x.powf(p)).sum::<f64>().powf(1.0 / p)
}

pub fn nuclear_norm(m: &CMat) -> f64 {
    singular_values(m).iter().sum()
}

pub fn op_norm(m: &CMat) -> f64 {
    singular_values(m).iter().copied().fold(0.0, f64::max)
}

/// Eigenvalues of the Hermitian part, ascending.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut v: Vec<f64> = hermitian_part(m).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

pub fn min_eigenvalue(m: &CMat) -> f64 {
    hermitian_eigenvalues(m).first().copied().unwrap_or(0.0)
}

/// Spectral decomposition of a Hermitian matrix, eigenvalues in descending
/// order with degenerate clusters replaced by their mean.
#[derive(Clone, Debug)]
pub struct Spectrum {
    values: Vec<f64>,
    vectors: CMat,
    support: usize,
}

impl Spectrum {
    pub fn of_hermitian(m: &CMat, cutoff: Cutoff) -> Spectrum {
        let n = m.nrows();
        let eig = hermitian_part(m).symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).unwrap());
        let mut values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut vectors = CMat::zeros(n, n);
        for (col, &i) in order.iter().enumerate() {
            vectors.set_column(col, &eig.eigenvectors.column(i));
        }
        let scale = values.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
        let gap = CLUSTER_GAP * scale;
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && values[end - 1] - values[end] <= gap {
                end += 1;
            }
            if end - start > 1 {
                let mean = values[start..end].iter().sum::<f64>() / (end - start) as f64;
                values[start..end].iter_mut().for_each(|x| *x = mean);
            }
            start = end;
        }
        let lmax = values.first().copied().unwrap_or(0.0).max(0.0);
        let thr = cutoff.threshold(lmax);
        let support = values.iter().filter(|&&x| x > thr).count();
        Spectrum {
            values,
            vectors,
            support,
        }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vectors(&self) -> &CMat {
        &self.vectors
    }

    pub fn support_rank(&self) -> usize {
        self.support
    }

    pub fn lambda_max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// Support eigenvalues (descending).
    pub fn support_values(&self) -> &[f64] {
        &self.values[..self.support]
    }

    /// Columns spanning the support.
    pub fn support_vectors(&self) -> CMat {
        self.vectors.columns(0, self.support).into_owned()
    }

    /// `Σ_{λ in support} f(λ) P_λ`; zero on the complement.
    pub fn map_support(&self, f: impl Fn(f64) -> C64) -> CMat {
        let n = self.dim();
        let k = self.support;
        let v = self.vectors.columns(0, k);
        let mut scaled = v.into_owned();
        for j in 0..k {
            let w = f(self.values[j]);
            for i in 0..n {
                scaled[(i, j)] *= w;
            }
        }
        scaled * v.adjoint()
    }

    pub fn power(&self, z: C64) -> CMat {
        self.map_support(|l| (z * l.ln()).exp())
    }

    pub fn real_power(&self, x: f64) -> CMat {
        self.map_support(|l| c(l.powf(x), 0.0))
    }

    pub fn projector(&self) -> CMat {
        self.map_support(|_| c(1.0, 0.0))
    }

    pub fn log(&self) -> CMat {
        self.map_support(|l| c(l.ln(), 0.0))
    }
}

/// Polar isometry `u` with `m = u |m|`, from the SVD; on rank-deficient
/// inputs only the support part is kept.
pub fn polar_isometry(m: &CMat) -> CMat {
    let svd = m.clone().svd(true, true);
    let u = svd.u.unwrap();
    let vt = svd.v_t.unwrap();
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let thr = Cutoff::default().threshold(smax);
    let mut out = CMat::zeros(m.nrows(), m.ncols());
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > thr {
            out += u.column(k) * vt.row(k);
        }
    }
    out
}
