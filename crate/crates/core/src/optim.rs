//! Unconstrained minimisers: limited-memory quasi-Newton and bracketed scalar search.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::linalg::dot;

/// Settings for [`qn_minimize`].
#[derive(Debug, Clone, Copy)]
pub struct QnOptions {
    pub max_iter: usize,
    /// Stop once `‖∇f‖∞ < grad_tol·(1 + |f|)`.
    pub grad_tol: f64,
    pub memory: usize,
}

impl Default for QnOptions {
    fn default() -> Self {
        QnOptions {
            max_iter: 100,
            grad_tol: 1e-6,
            memory: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QnStatus {
    Converged,
    MaxIterations,
    /// No step along the search direction gave sufficient decrease.
    LineSearchFailed,
    /// The objective or gradient was non-finite; the best iterate so far is returned.
    NonFinite,
}

#[derive(Debug, Clone)]
pub struct QnResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub status: QnStatus,
}

impl QnResult {
    pub fn degraded(&self) -> bool {
        self.status == QnStatus::NonFinite
    }
}

const ARMIJO: f64 = 1e-4;
const BACKTRACK: f64 = 0.5;
const MAX_BACKTRACKS: usize = 50;

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// L-BFGS with two-loop recursion and Armijo backtracking.
///
/// Update pairs with non-positive curvature are skipped. Accepted iterates are
/// monotone non-increasing in `f`.
pub fn qn_minimize<F>(mut f: F, x0: &[f64], opts: QnOptions) -> QnResult
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let mut x = x0.to_vec();
    let (mut fx, mut g) = f(&x);
    if !fx.is_finite() || g.iter().any(|v| !v.is_finite()) {
        return QnResult {
            x,
            value: fx,
            iterations: 0,
            status: QnStatus::NonFinite,
        };
    }
    let mut mem: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(opts.memory);
    let mut iterations = 0;
    let mut status = QnStatus::MaxIterations;
    while iterations < opts.max_iter {
        if inf_norm(&g) < opts.grad_tol * (1.0 + fx.abs()) {
            status = QnStatus::Converged;
            break;
        }
        iterations += 1;
        let mut d = two_loop(&g, &mem);
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            mem.clear();
            d = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }
        let mut step = if mem.is_empty() {
            (1.0 / inf_norm(&d)).min(1.0)
        } else {
            1.0
        };
        let mut accepted = None;
        let mut saw_non_finite = false;
        for _ in 0..MAX_BACKTRACKS {
            let cand: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + step * b).collect();
            let (fc, gc) = f(&cand);
            if fc.is_finite() && gc.iter().all(|v| v.is_finite()) {
                if fc <= fx + ARMIJO * step * slope {
                    accepted = Some((cand, fc, gc));
                    break;
                }
            } else {
                saw_non_finite = true;
            }
            step *= BACKTRACK;
        }
        let Some((xn, fnew, gn)) = accepted else {
            status = if saw_non_finite {
                QnStatus::NonFinite
            } else {
                QnStatus::LineSearchFailed
            };
            break;
        };
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * norm2(&s) * norm2(&y) && sy > 0.0 {
            if mem.len() == opts.memory {
                mem.pop_front();
            }
            mem.push_back((s, y, 1.0 / sy));
        }
        x = xn;
        fx = fnew;
        g = gn;
    }
    if status == QnStatus::MaxIterations && inf_norm(&g) < opts.grad_tol * (1.0 + fx.abs()) {
        status = QnStatus::Converged;
    }
    QnResult {
        x,
        value: fx,
        iterations,
        status,
    }
}

fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

fn two_loop(g: &[f64], mem: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q = g.to_vec();
    let mut alphas = Vec::with_capacity(mem.len());
    for (s, y, rho) in mem.iter().rev() {
        let a = rho * dot(s, &q);
        q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
        alphas.push(a);
    }
    if let Some((s, y, _)) = mem.back() {
        let gamma = dot(s, y) / dot(y, y);
        q.iter_mut().for_each(|v| *v *= gamma);
    }
    for ((s, y, rho), a) in mem.iter().zip(alphas.iter().rev()) {
        let b = rho * dot(y, &q);
        q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}

/// Brent's bracketed minimisation of a scalar function on `[lo, hi]`.
///
/// Returns `(argmin, min)`. `tol` is the absolute tolerance on the abscissa
/// (scaled by the usual `√ε` relative term). A non-finite function value
/// inside the bracket is an error.
pub fn scalar_minimize<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    if !(lo < hi && lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidArgument(format!("bracket needs lo < hi, got [{lo}, {hi}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let mut f = move |x: f64| -> Result<f64> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Numeric(format!("objective is {v} at {x}")))
        }
    };
    const GOLDEN: f64 = 0.381_966_011_250_105_1;
    let eps = f64::EPSILON.sqrt();
    let (mut a, mut b) = (lo, hi);
    let mut x = a + GOLDEN * (b - a);
    let mut w = x;
    let mut v = x;
    let mut fx = f(x)?;
    let mut fw = fx;
    let mut fv = fx;
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let tol1 = eps * x.abs() + tol / 3.0;
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if p.abs() < (0.5 * q * etemp).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if m >= x { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= m { a - x } else { b - x };
            d = GOLDEN * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else if d > 0.0 {
            x + tol1
        } else {
            x - tol1
        };
        let fu = f(u)?;
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Ok((x, fx))
}

/// Central finite-difference gradient with step `eps`.
pub fn finite_difference_gradient<F>(mut f: F, x: &[f64], eps: f64) -> Vec<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    let mut p = x.to_vec();
    (0..x.len())
        .map(|i| {
            p[i] = x[i] + eps;
            let up = f(&p);
            p[i] = x[i] - eps;
            let down = f(&p);
            p[i] = x[i];
            (up - down) / (2.0 * eps)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convex_quadratic() {
        let target = [1.0, -2.0, 3.5, 0.25];
        let f = |w: &[f64]| {
            let v: f64 = w.iter().zip(&target).map(|(a, b)| (a - b).powi(2)).sum();
            let g = w.iter().zip(&target).map(|(a, b)| 2.0 * (a - b)).collect();
            (v, g)
        };
        let r = qn_minimize(f, &[10.0, 7.0, -3.0, 0.0], QnOptions { max_iter: 30, grad_tol: 1e-10, memory: 10 });
        assert!(r.iterations <= 30);
        for (a, b) in r.x.iter().zip(&target) {
            assert!((a - b).abs() < 1e-6, "{:?}", r);
        }
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| {
            let (a, b) = (x[0], x[1]);
            let v = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
            let g = vec![-2.0 * (1.0 - a) - 400.0 * a * (b - a * a), 200.0 * (b - a * a)];
            (v, g)
        };
        let r = qn_minimize(f, &[-1.2, 1.0], QnOptions { max_iter: 200, grad_tol: 1e-12, memory: 10 });
        assert!(r.value < 1e-8, "{r:?}");
        assert!(r.iterations <= 200);
    }

    #[test]
    fn constant_function_returns_start() {
        let r = qn_minimize(|_| (3.0, vec![0.0, 0.0]), &[0.5, -0.5], QnOptions::default());
        assert_eq!(r.x, vec![0.5, -0.5]);
        assert_eq!(r.status, QnStatus::Converged);
        assert!(r.iterations <= 1);
    }

    #[test]
    fn non_finite_flags_degraded() {
        let r = qn_minimize(|x| (if x[0] > 0.5 { f64::NAN } else { -x[0] }, vec![-1.0]), &[0.0], QnOptions::default());
        assert!(r.value <= 0.0);
        assert!(r.x[0] <= 0.5);
        let r = qn_minimize(|_| (f64::NAN, vec![0.0]), &[0.0], QnOptions::default());
        assert!(r.degraded());
    }

    #[test]
    fn never_worse_than_start() {
        // non-smooth, gradient inconsistent away from the origin
        let f = |x: &[f64]| (x[0].abs() + (5.0 * x[1]).sin(), vec![x[0].signum(), 5.0 * (5.0 * x[1]).cos()]);
        let x0 = [0.7, 0.2];
        let f0 = f(&x0).0;
        let r = qn_minimize(f, &x0, QnOptions::default());
        assert!(r.value <= f0);
    }

    #[test]
    fn brent_finds_parabola_minimum() {
        let (x, fx) = scalar_minimize(|x| (x - 0.3).powi(2) + 1.0, 0.0, 2.0, 1e-10).unwrap();
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 1.0).abs() < 1e-12);
        let (x, _) = scalar_minimize(|x| x, 1.0, 3.0, 1e-8).unwrap();
        assert!((x - 1.0).abs() < 1e-6);
        let (x, _) = scalar_minimize(|x| -x, 1.0, 3.0, 1e-8).unwrap();
        assert!((x - 3.0).abs() < 1e-6);
    }

    #[test]
    fn brent_rejects_bad_input() {
        assert!(scalar_minimize(|x| x, 2.0, 1.0, 1e-8).is_err());
        assert!(scalar_minimize(|x| x, 1.0, 2.0, 0.0).is_err());
        let e = scalar_minimize(|x| if x > 1.2 { f64::NAN } else { x }, 1.0, 2.0, 1e-8).unwrap_err();
        assert!(e.is_numeric());
    }

    #[test]
    fn finite_differences_of_cubic() {
        let g = finite_difference_gradient(|x| x[0].powi(3) + 2.0 * x[1], &[2.0, 1.0], 1e-5);
        assert!((g[0] - 12.0).abs() < 1e-8);
        assert!((g[1] - 2.0).abs() < 1e-8);
    }
}
