//! Quadrature against `p(t) = π / (cosh 2πt + 1)` and small 1-D helpers.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// `p(t) = π / (cosh(2πt) + 1)`, written as `(π/2) sech²(πt)` for stability.
pub fn recovery_weight(t: f64) -> f64 {
    let s = 1.0 / (PI * t).cosh();
    0.5 * PI * s * s
}

/// `∫ e^{iωt} p(t) dt = (ω/2) / sinh(ω/2)`.
pub fn recovery_weight_transform(omega: f64) -> f64 {
    let h = 0.5 * omega;
    if h.abs() < 1e-4 {
        1.0 - h * h / 6.0 + 7.0 * h.powi(4) / 360.0
    } else {
        h / h.sinh()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum QuadratureScheme {
    /// Trapezoid rule in `s` with `t = scale · sinh(s)`; exponentially
    /// convergent for the oscillatory rotated-Petz integrand.
    SinhTrapezoid { scale: f64 },
    /// Gauss–Legendre in `u = tanh(πt)`, where `p(t) dt = du / 2`.
    TanhGaussLegendre,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    pub node_count: usize,
    pub t_clamp: f64,
    pub scheme: QuadratureScheme,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            node_count: 48,
            t_clamp: 6.0,
            scheme: QuadratureScheme::SinhTrapezoid { scale: 0.5 },
        }
    }
}

impl QuadratureSpec {
    pub fn with_nodes(node_count: usize) -> Self {
        QuadratureSpec {
            node_count,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.node_count < 8 {
            return Err(Error::InvalidParameter(format!("node_count {} < 8", self.node_count)));
        }
        if !(self.t_clamp >= 4.0) {
            return Err(Error::InvalidParameter(format!("t_clamp {} < 4", self.t_clamp)));
        }
        if let QuadratureScheme::SinhTrapezoid { scale } = self.scheme {
            if !(scale > 0.0) {
                return Err(Error::InvalidParameter(format!("scale {scale} must be positive")));
            }
        }
        Ok(())
    }

    /// Same scheme with twice the nodes, for error estimates.
    pub fn refined(&self) -> Self {
        QuadratureSpec {
            node_count: 2 * self.node_count,
            ..*self
        }
    }

    /// Nodes `t_j` and weights `w_j` with `Σ w_j g(t_j) ≈ ∫ g(t) p(t) dt`.
    pub fn nodes(&self) -> Result<Vec<(f64, f64)>> {
        self.validate()?;
        let n = self.node_count;
        let out = match self.scheme {
            QuadratureScheme::SinhTrapezoid { scale } => {
                let smax = (self.t_clamp / scale).asinh();
                let h = 2.0 * smax / (n - 1) as f64;
                (0..n)
                    .map(|j| {
                        let s = -smax + j as f64 * h;
                        let t = scale * s.sinh();
                        let end = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
                        (t, end * h * scale * s.cosh() * recovery_weight(t))
                    })
                    .collect()
            }
            QuadratureScheme::TanhGaussLegendre => gauss_legendre(n)
                .into_iter()
                .map(|(u, w)| {
                    let t = (u.atanh() / PI).clamp(-self.t_clamp, self.t_clamp);
                    (t, 0.5 * w)
                })
                .collect(),
        };
        Ok(out)
    }

    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> Result<f64> {
        Ok(self.nodes()?.into_iter().map(|(t, w)| w * g(t)).sum())
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, 0.0); n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out[i] = (-x, w);
        out[n - 1 - i] = (x, w);
    }
    out
}

/// Trapezoid rule on `[-t_max, t_max]` with step at most `h`.
pub fn trapezoid_line(g: impl Fn(f64) -> f64, h: f64, t_max: f64) -> f64 {
    let n = (2.0 * t_max / h).ceil() as usize;
    let h = 2.0 * t_max / n as f64;
    (0..=n)
        .map(|j| {
            let w = if j == 0 || j == n { 0.5 } else { 1.0 };
            w * g(-t_max + j as f64 * h)
        })
        .sum::<f64>()
        * h
}

/// Adaptive Simpson on `[a, b]` with absolute tolerance `tol`.
pub fn adaptive_simpson(g: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(g: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (g(lm), g(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            left + right + diff / 15.0
        } else {
            rec(g, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(g, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let (fa, fb, fm) = (g(a), g(b), g(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(g, a, b, fa, fm, fb, whole, tol, 40)
}
