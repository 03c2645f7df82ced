//! Test-side reference implementations, written without the library's
//! spectral helpers.

#![allow(dead_code)]

use modrec::algebra::{Algebra, InclusionSpec, State};
use modrec::random;
use modrec::{CMat, C64};
use nalgebra::SymmetricEigen;

pub fn herm_fn(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let h = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(h);
    let lmax = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let cut = 1e-12f64.max(1e-12 * lmax);
    let mut out = CMat::zeros(m.nrows(), m.ncols());
    for (j, &l) in eig.eigenvalues.iter().enumerate() {
        if l > cut {
            let v = eig.eigenvectors.column(j);
            out += (&v * v.adjoint()).scale(f(l));
        }
    }
    out
}

pub fn sqrtm(m: &CMat) -> CMat {
    herm_fn(m, f64::sqrt)
}

/// Partial trace over each block's multiplicity factor, by index loops.
pub fn ptrace(x: &CMat, blocks: &[(usize, usize)]) -> CMat {
    let d: usize = blocks.iter().map(|b| b.0).sum();
    let mut out = CMat::zeros(d, d);
    let (mut bo, mut ao) = (0, 0);
    for &(m, k) in blocks {
        for r in 0..m {
            for s in 0..m {
                let mut acc = C64::new(0.0, 0.0);
                for c in 0..k {
                    acc += x[(ao + r * k + c, ao + s * k + c)];
                }
                out[(bo + r, bo + s)] = acc;
            }
        }
        bo += m;
        ao += m * k;
    }
    out
}

/// `⊕ b_i ⊗ 1_{k_i}` by index loops.
pub fn embed(b: &CMat, blocks: &[(usize, usize)]) -> CMat {
    let n: usize = blocks.iter().map(|b| b.0 * b.1).sum();
    let mut out = CMat::zeros(n, n);
    let (mut bo, mut ao) = (0, 0);
    for &(m, k) in blocks {
        for r in 0..m {
            for s in 0..m {
                for c in 0..k {
                    out[(ao + r * k + c, ao + s * k + c)] = b[(bo + r, bo + s)];
                }
            }
        }
        bo += m;
        ao += m * k;
    }
    out
}

pub fn rel_entropy(rho: &CMat, sigma: &CMat) -> f64 {
    let a = (rho * herm_fn(rho, f64::ln)).trace().re;
    let b = (rho * herm_fn(sigma, f64::ln)).trace().re;
    a - b
}

pub fn fidelity(rho: &CMat, sigma: &CMat) -> f64 {
    let r = sqrtm(rho);
    sqrtm(&(&r * sigma * &r)).trace().re
}

pub fn trace_norm(m: &CMat) -> f64 {
    m.clone().svd(false, false).singular_values.iter().sum()
}

/// Petz predual `σ^{1/2} ι(σ_B^{-1/2} ρ_B σ_B^{-1/2}) σ^{1/2}`.
pub fn petz_predual(sigma: &CMat, rho_b: &CMat, blocks: &[(usize, usize)]) -> CMat {
    let sb = ptrace(sigma, blocks);
    let sbi = herm_fn(&sb, |x| x.powf(-0.5));
    let s = sqrtm(sigma);
    &s * embed(&(&sbi * rho_b * &sbi), blocks) * &s
}

/// `∫ p(t) α^t_*(ρ_B) dt` by a plain trapezoid on `[-12, 12]`, step `h`.
pub fn universal_predual(sigma: &CMat, rho_b: &CMat, blocks: &[(usize, usize)], h: f64) -> CMat {
    let sb = ptrace(sigma, blocks);
    let ea = SymmetricEigen::new(sigma.clone());
    let eb = SymmetricEigen::new(sb);
    let pow = |e: &SymmetricEigen<C64, nalgebra::Dyn>, re: f64, im: f64| {
        let n = e.eigenvalues.len();
        let mut out = CMat::zeros(n, n);
        for j in 0..n {
            let l = e.eigenvalues[j];
            let v = e.eigenvectors.column(j);
            let w = C64::new(l.ln() * re, l.ln() * im).exp();
            out += (&v * v.adjoint()) * w;
        }
        out
    };
    let n = sigma.nrows();
    let mut acc = CMat::zeros(n, n);
    let steps = (24.0 / h).round() as i64;
    for j in -steps / 2..=steps / 2 {
        let t = j as f64 * h;
        let p = std::f64::consts::PI / ((2.0 * std::f64::consts::PI * t).cosh() + 1.0);
        let inner = pow(&eb, -0.5, -t) * rho_b * pow(&eb, -0.5, t);
        acc += (pow(&ea, 0.5, t) * embed(&inner, blocks) * pow(&ea, 0.5, -t)).scale(p * h);
    }
    acc
}

pub fn spec(blocks: &[(usize, usize)]) -> InclusionSpec {
    InclusionSpec::new(blocks.to_vec()).unwrap()
}

pub fn state(n: usize, rank: usize, seed: u64, index: u64) -> State {
    let mut rng = random::stream(seed, index);
    State::new(random::random_density(n, rank, &mut rng).unwrap(), Algebra::A).unwrap()
}

pub fn b_state(d: usize, seed: u64, index: u64) -> State {
    let mut rng = random::stream(seed, index);
    State::new(random::random_density(d, d, &mut rng).unwrap(), Algebra::B).unwrap()
}

pub fn fro(m: &CMat) -> f64 {
    m.norm()
}
