//! Poly-exponential kernels `K(x) = Σ_k β_k |x|^k e^{-|x|}`.
//!
//! Every kernel in this family is a polynomial in `|x|` with non-negative
//! coefficients multiplying the Laplace kernel. Moments have closed forms via
//! `∫ |x|^k e^{-c|x|} dx = 2·k!/c^{k+1}`, so no quadrature is needed at run time.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Highest supported polynomial order. Factorials beyond this lose double precision.
pub const MAX_ORDER: usize = 20;

/// Highest order accepted by [`smooth_kernel`].
pub const MAX_SMOOTH_ORDER: usize = 8;

/// A kernel `K(x) = Σ_k β_k |x|^k e^{-|x|}` with cached derivative coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KernelRepr", into = "KernelRepr")]
pub struct PolyExpKernel {
    beta: Vec<f64>,
    // K'(u) = Σ_k gamma_k u^k e^{-u} for u >= 0
    gamma: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct KernelRepr {
    beta: Vec<f64>,
}

impl TryFrom<KernelRepr> for PolyExpKernel {
    type Error = Error;
    fn try_from(r: KernelRepr) -> Result<Self> {
        PolyExpKernel::new(r.beta)
    }
}

impl From<PolyExpKernel> for KernelRepr {
    fn from(k: PolyExpKernel) -> Self {
        KernelRepr { beta: k.beta }
    }
}

/// Closed-form constants of a kernel.
///
/// `variance` and `roughness` refer to the unit-integral rescaling `K / normalizer`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConstants {
    pub normalizer: f64,
    pub variance: f64,
    pub roughness: f64,
}

impl Default for PolyExpKernel {
    /// The smooth order-one kernel `β = (1/4, 1/4)`, which already has unit integral.
    fn default() -> Self {
        PolyExpKernel::new(vec![0.25, 0.25]).expect("default kernel is valid")
    }
}

impl PolyExpKernel {
    pub fn new(beta: Vec<f64>) -> Result<Self> {
        if beta.is_empty() {
            return Err(Error::InvalidKernel("coefficient sequence is empty".into()));
        }
        if beta.len() > MAX_ORDER + 1 {
            return Err(Error::InvalidKernel(format!(
                "order {} exceeds the maximum of {MAX_ORDER}",
                beta.len() - 1
            )));
        }
        if let Some(b) = beta.iter().find(|b| !b.is_finite() || **b < 0.0) {
            return Err(Error::InvalidKernel(format!(
                "coefficients must be finite and non-negative, got {b}"
            )));
        }
        if beta[0] <= 0.0 {
            return Err(Error::InvalidKernel("leading coefficient must be positive".into()));
        }
        let order = beta.len() - 1;
        let gamma = (0..=order)
            .map(|k| {
                let next = if k < order { (k + 1) as f64 * beta[k + 1] } else { 0.0 };
                next - beta[k]
            })
            .collect();
        Ok(PolyExpKernel { beta, gamma })
    }

    /// Parses a comma-separated coefficient list such as `0.25,0.25`.
    pub fn parse(text: &str) -> Result<Self> {
        let beta = text
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidKernel(format!("cannot parse coefficient {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        PolyExpKernel::new(beta)
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    /// Coefficients of the derivative on the positive half line.
    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn order(&self) -> usize {
        self.beta.len() - 1
    }

    /// `K(0)`.
    pub fn beta0(&self) -> f64 {
        self.beta[0]
    }

    pub fn eval(&self, u: f64) -> f64 {
        let a = u.abs();
        horner(&self.beta, a) * (-a).exp()
    }

    /// `K'(u)`, an odd function. `K'(0)` is taken as zero.
    pub fn eval_derivative(&self, u: f64) -> f64 {
        if u == 0.0 {
            return 0.0;
        }
        let a = u.abs();
        let v = horner(&self.gamma, a) * (-a).exp();
        if u > 0.0 {
            v
        } else {
            -v
        }
    }

    pub fn constants(&self) -> KernelConstants {
        let fact = factorials(2 * MAX_ORDER + 2);
        let normalizer: f64 = self
            .beta
            .iter()
            .enumerate()
            .map(|(k, b)| 2.0 * b * fact[k])
            .sum();
        let scaled: Vec<f64> = self.beta.iter().map(|b| b / normalizer).collect();
        let variance = scaled
            .iter()
            .enumerate()
            .map(|(k, b)| 2.0 * b * fact[k + 2])
            .sum();
        let mut roughness = 0.0;
        for (j, bj) in scaled.iter().enumerate() {
            for (k, bk) in scaled.iter().enumerate() {
                roughness += bj * bk * fact[j + k] / 2f64.powi((j + k) as i32);
            }
        }
        KernelConstants {
            normalizer,
            variance,
            roughness,
        }
    }

    /// The same kernel rescaled to unit integral.
    pub fn normalized(&self) -> PolyExpKernel {
        let c = self.constants().normalizer;
        PolyExpKernel::new(self.beta.iter().map(|b| b / c).collect())
            .expect("rescaling by a positive constant keeps the kernel valid")
    }
}

fn horner(coef: &[f64], x: f64) -> f64 {
    coef.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

pub(crate) fn factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut f = 1.0;
    out.push(f);
    for k in 1..=n {
        f *= k as f64;
        out.push(f);
    }
    out
}

pub fn eval_kernel(kernel: &PolyExpKernel, u: f64) -> f64 {
    kernel.eval(u)
}

pub fn eval_kernel_derivative(kernel: &PolyExpKernel, u: f64) -> f64 {
    kernel.eval_derivative(u)
}

pub fn kernel_constants(kernel: &PolyExpKernel) -> KernelConstants {
    kernel.constants()
}

/// The smooth kernel of the given order, `β_k = 1/k!`.
pub fn smooth_kernel(order: usize) -> Result<PolyExpKernel> {
    if order > MAX_SMOOTH_ORDER {
        return Err(Error::InvalidKernel(format!(
            "smooth kernel order must be in 0..={MAX_SMOOTH_ORDER}, got {order}"
        )));
    }
    let fact = factorials(order);
    PolyExpKernel::new(fact.iter().map(|f| 1.0 / f).collect())
}

/// Samples the kernel as a unit-variance density on `[-5, 5]`.
///
/// With `σ² = variance`, the curve is `σ·K̃(σu)` for the unit-integral kernel `K̃`.
pub fn kernel_curve(kernel: &PolyExpKernel, grid_size: usize) -> Result<Vec<(f64, f64)>> {
    if grid_size < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid size must be at least 2, got {grid_size}"
        )));
    }
    let c = kernel.constants();
    let sigma = c.variance.sqrt();
    let step = 10.0 / (grid_size - 1) as f64;
    Ok((0..grid_size)
        .map(|i| {
            let u = -5.0 + step * i as f64;
            (u, sigma * kernel.eval(sigma * u) / c.normalizer)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    // Adaptive Simpson on [a, b].
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let lm = 0.5 * (a + m);
            let rm = 0.5 * (m + b);
            let flm = f(lm);
            let frm = f(rm);
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            let delta = left + right - whole;
            if depth == 0 || delta.abs() <= 15.0 * tol {
                left + right + delta / 15.0
            } else {
                rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                    + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
            }
        }
        let fa = f(a);
        let fb = f(b);
        let m = 0.5 * (a + b);
        let fm = f(m);
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        rec(f, a, b, fa, fm, fb, whole, tol, 50)
    }

    // The integrand is smooth away from zero, so integrate each half separately.
    fn quad(f: &dyn Fn(f64) -> f64) -> f64 {
        2.0 * simpson(f, 0.0, 60.0, 1e-14)
    }

    fn quadrature_constants(k: &PolyExpKernel) -> (f64, f64, f64) {
        let norm = quad(&|x| k.eval(x));
        let var = quad(&|x| x * x * k.eval(x)) / norm;
        let rough = quad(&|x| k.eval(x).powi(2)) / (norm * norm);
        (norm, var, rough)
    }

    #[test]
    fn eval_examples() {
        let k = PolyExpKernel::default();
        assert_eq!(k.eval(0.0), 0.25);
        assert!((k.eval(1.0) - 0.5 * (-1f64).exp()).abs() < 1e-15);
        assert!((k.eval(1.0) - 0.183_939_720_585_721_2).abs() < 1e-15); // 0.5/e
        for u in [0.1, 1.7, 5.0, 33.0] {
            assert_eq!(k.eval(u), k.eval(-u));
        }
    }

    #[test]
    fn derivative_at_zero_and_oddness() {
        let k = PolyExpKernel::default();
        assert_eq!(k.eval_derivative(0.0), 0.0);
        assert_eq!(k.gamma()[0], 0.0);
        let r = PolyExpKernel::new(vec![0.3, 0.1, 0.7]).unwrap();
        for u in [0.01, 0.5, 2.0, 9.0] {
            assert_eq!(r.eval_derivative(u), -r.eval_derivative(-u));
        }
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let eps = 1e-5;
        for order in 0..=4 {
            let k = smooth_kernel(order).unwrap();
            for i in 0..=400 {
                let u = -10.0 + 0.05 * i as f64;
                if u.abs() < 2.0 * eps {
                    continue;
                }
                let fd = (k.eval(u + eps) - k.eval(u - eps)) / (2.0 * eps);
                assert!((k.eval_derivative(u) - fd).abs() <= 1e-6, "order {order} u {u}");
            }
        }
        let k = PolyExpKernel::default();
        let fd = (k.eval(0.5 + 1e-5) - k.eval(0.5 - 1e-5)) / 2e-5;
        assert!((k.eval_derivative(0.5) - fd).abs() < 1e-8);
    }

    #[test]
    fn constants_closed_form_values() {
        let c = PolyExpKernel::new(vec![1.0]).unwrap().constants();
        assert!((c.normalizer - 2.0).abs() < 1e-15);
        assert!((c.variance - 2.0).abs() < 1e-15);
        assert!((c.roughness - 0.25).abs() < 1e-15);
        let c = PolyExpKernel::default().constants();
        assert!((c.normalizer - 1.0).abs() < 1e-15);
        assert!((c.variance - 4.0).abs() < 1e-15);
        assert!((c.roughness - 0.15625).abs() < 1e-15);
    }

    #[test]
    fn constants_match_quadrature() {
        let mut kernels: Vec<PolyExpKernel> = (0..=4).map(|o| smooth_kernel(o).unwrap()).collect();
        kernels.push(PolyExpKernel::default());
        kernels.push(PolyExpKernel::new(vec![1.0]).unwrap());
        kernels.push(PolyExpKernel::new(vec![0.2, 0.0, 1.3, 0.05, 0.4]).unwrap());
        for k in kernels {
            let c = k.constants();
            let (n, v, r) = quadrature_constants(&k);
            assert!(((c.normalizer - n) / n).abs() < 1e-8, "{:?}", k.beta());
            assert!(((c.variance - v) / v).abs() < 1e-8, "{:?}", k.beta());
            assert!(((c.roughness - r) / r).abs() < 1e-8, "{:?}", k.beta());
        }
    }

    #[test]
    fn constants_scale_invariance() {
        let k = PolyExpKernel::new(vec![0.4, 0.9, 0.3]).unwrap();
        let k3 = PolyExpKernel::new(k.beta().iter().map(|b| 3.0 * b).collect()).unwrap();
        let (a, b) = (k.constants(), k3.constants());
        assert!((b.normalizer - 3.0 * a.normalizer).abs() < 1e-12);
        assert!((a.variance - b.variance).abs() < 1e-12);
        assert!((a.roughness - b.roughness).abs() < 1e-12);
    }

    #[test]
    fn smooth_kernels() {
        assert_eq!(smooth_kernel(0).unwrap().beta(), &[1.0]);
        assert_eq!(smooth_kernel(1).unwrap().beta(), &[1.0, 1.0]);
        let b = smooth_kernel(3).unwrap();
        assert_eq!(b.beta()[..3], [1.0, 1.0, 0.5]);
        assert!((b.beta()[3] - 1.0 / 6.0).abs() < 1e-16);
        assert!(smooth_kernel(9).is_err());
    }

    #[test]
    fn invalid_kernels_rejected() {
        assert!(PolyExpKernel::new(vec![]).is_err());
        assert!(PolyExpKernel::new(vec![0.0, 1.0]).is_err());
        assert!(PolyExpKernel::new(vec![1.0, -0.1]).is_err());
        assert!(PolyExpKernel::new(vec![1.0, f64::NAN]).is_err());
        assert!(PolyExpKernel::new(vec![1.0; 22]).is_err());
        assert!(PolyExpKernel::new(vec![1.0; 21]).is_ok());
        assert!(PolyExpKernel::parse("0.25, 0.25").is_ok());
        assert!(PolyExpKernel::parse("0.25,x").is_err());
    }

    #[test]
    fn curve_is_unit_variance_density() {
        let k = smooth_kernel(1).unwrap();
        let curve = kernel_curve(&k, 500).unwrap();
        assert_eq!(curve.len(), 500);
        assert!(curve.iter().all(|&(_, d)| d > 0.0));
        let mid = kernel_curve(&k, 501).unwrap()[250];
        assert_eq!(mid.0, 0.0);
        assert!((mid.1 - 0.5).abs() < 1e-14);
        let integral: f64 = curve
            .windows(2)
            .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
            .sum();
        assert!((integral - 1.0).abs() < 1e-3, "{integral}");
        assert!(kernel_curve(&k, 1).is_err());
    }

    #[test]
    fn serde_roundtrip_validates() {
        let k = PolyExpKernel::new(vec![0.1, 0.7]).unwrap();
        let s = serde_json::to_string(&k).unwrap();
        assert_eq!(s, r#"{"beta":[0.1,0.7]}"#);
        let back: PolyExpKernel = serde_json::from_str(&s).unwrap();
        assert_eq!(back, k);
        assert!(serde_json::from_str::<PolyExpKernel>(r#"{"beta":[-1.0]}"#).is_err());
    }
}
