//! Projection pursuit regression with Nadaraya-Watson ridge functions,
//! fitted forward stagewise.

use serde::{Deserialize, Serialize};

use super::{chain_to_w, normalize, project};
use crate::error::{invalid, Result};
use crate::fastsum::{fk_sum_loo, SumMode, WeightedSample};
use crate::kernel::PolyExpKernel;
use crate::linalg::{norm, ridge_ols, sym_eig, Matrix};
use crate::optim::{qn_minimize, scalar_minimize, QnOptions};
use crate::smoothers::{loo_sse_presorted, nw_regression, DENSITY_FLOOR};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PprOptions {
    pub kernel: PolyExpKernel,
    pub max_iter: usize,
    pub grad_tol: f64,
    /// Ridge for the least squares starting direction.
    pub ridge: f64,
}

impl Default for PprOptions {
    fn default() -> Self {
        PprOptions {
            kernel: PolyExpKernel::default(),
            max_iter: 50,
            grad_tol: 1e-6,
            ridge: 0.01,
        }
    }
}

/// One ridge function: a unit direction and the Nadaraya-Watson sample
/// (training projections and the residuals they were fitted to).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PprComponent {
    pub w: Vec<f64>,
    pub h: f64,
    pub projections: Vec<f64>,
    pub residuals: Vec<f64>,
}

impl PprComponent {
    /// Ridge function values at the rows of `x`.
    pub fn predict(&self, x: &Matrix, kernel: &PolyExpKernel) -> Result<Vec<f64>> {
        if x.cols() != self.w.len() {
            return invalid(format!("model expects {} columns, got {}", self.w.len(), x.cols()));
        }
        let p = x.mul_vec(&self.w);
        Ok(nw_regression(&self.projections, &self.residuals, self.h, kernel, Some(&p))?.fitted)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PprModel {
    pub mu: f64,
    pub components: Vec<PprComponent>,
    pub kernel: PolyExpKernel,
}

impl PprModel {
    /// Predictions from the mean and the first `terms` components.
    pub fn predict_terms(&self, x: &Matrix, terms: usize) -> Result<Vec<f64>> {
        let mut out = vec![self.mu; x.rows()];
        for c in self.components.iter().take(terms) {
            for (o, f) in out.iter_mut().zip(c.predict(x, &self.kernel)?) {
                *o += f;
            }
        }
        Ok(out)
    }
}

struct Parts {
    value: f64,
    grad: Option<Vec<f64>>,
}

fn check(x: &Matrix, r: &[f64], h: f64) -> Result<()> {
    if r.len() != x.rows() {
        return invalid(format!("{} responses for {} rows", r.len(), x.rows()));
    }
    if r.iter().any(|v| !v.is_finite()) {
        return invalid("responses must be finite");
    }
    if !(h > 0.0 && h.is_finite()) {
        return invalid(format!("bandwidth must be positive, got {h}"));
    }
    if x.rows() < 2 {
        return invalid("need at least two rows");
    }
    Ok(())
}

fn ppr_parts(w: &[f64], x: &Matrix, r: &[f64], h: f64, kn: &PolyExpKernel, want_grad: bool) -> Result<Parts> {
    let (p, nw) = project(x, w)?;
    let ones = WeightedSample::uniform(p.clone())?;
    let mode = if want_grad { SumMode::Both } else { SumMode::Sum };
    let s1 = fk_sum_loo(&ones, h, kn, mode)?;
    let sr = fk_sum_loo(&ones.reweighted(r)?, h, kn, mode)?;
    let den: Vec<f64> = s1.ksum.iter().map(|v| v.max(DENSITY_FLOOR)).collect();
    let fit: Vec<f64> = sr.ksum.iter().zip(&den).map(|(a, b)| a / b).collect();
    let value = r.iter().zip(&fit).map(|(a, b)| (a - b).powi(2)).sum();
    if !want_grad {
        return Ok(Parts { value, grad: None });
    }
    let d1 = s1.dksum.expect("requested");
    let dr = sr.dksum.expect("requested");
    let a: Vec<f64> = fit.iter().zip(r).zip(&den).map(|((f, y), s)| (f - y) / s).collect();
    let fa: Vec<f64> = fit.iter().zip(&a).map(|(f, a)| f * a).collect();
    let t1 = fk_sum_loo(&ones.reweighted(&fa)?, h, kn, SumMode::DSum)?.dksum.expect("requested");
    let da = fk_sum_loo(&ones.reweighted(&a)?, h, kn, SumMode::DSum)?.dksum.expect("requested");
    let gp: Vec<f64> = (0..p.len())
        .map(|i| {
            let t2 = r[i] * da[i];
            let t3 = a[i] * (fit[i] * d1[i] - dr[i]);
            2.0 / h * (t1[i] - t2 + t3)
        })
        .collect();
    Ok(Parts {
        value,
        grad: Some(chain_to_w(x, w, nw, &p, &gp)),
    })
}

/// Leave-one-out squared error of a Nadaraya-Watson fit of `r` on `Xw/‖w‖`.
pub fn ppr_phi(w: &[f64], x: &Matrix, r: &[f64], h: f64, kernel: &PolyExpKernel) -> Result<f64> {
    check(x, r, h)?;
    Ok(ppr_parts(w, x, r, h, &kernel.normalized(), false)?.value)
}

/// Analytic gradient of [`ppr_phi`] in `w`.
pub fn ppr_grad(w: &[f64], x: &Matrix, r: &[f64], h: f64, kernel: &PolyExpKernel) -> Result<Vec<f64>> {
    check(x, r, h)?;
    Ok(ppr_parts(w, x, r, h, &kernel.normalized(), true)?.grad.expect("requested"))
}

/// `√λ_max(cov X) / n^{1/5}`, a deliberately large starting bandwidth.
pub fn pilot_bandwidth(x: &Matrix) -> Result<f64> {
    let eig = sym_eig(&x.covariance())?;
    Ok(eig.values[0].max(0.0).sqrt() / (x.rows() as f64).powf(0.2))
}

/// Fits one ridge function to residuals `r`, optimising the direction at the
/// pilot bandwidth and then choosing the final bandwidth by leave-one-out
/// cross-validation on `[h/50, h]`.
pub fn ppr_fit_component(x: &Matrix, r: &[f64], w0: Option<&[f64]>, opts: &PprOptions) -> Result<PprComponent> {
    if x.rows() < 20 {
        return invalid(format!("need at least 20 rows, got {}", x.rows()));
    }
    let h = pilot_bandwidth(x)?;
    check(x, r, h)?;
    let mut w = match w0 {
        Some(w) => w.to_vec(),
        None => ridge_ols(x, r, opts.ridge)?,
    };
    if !(norm(&w) > 0.0) {
        w = vec![0.0; x.cols()];
        w[0] = 1.0;
    }
    let kn = opts.kernel.normalized();
    let res = qn_minimize(
        |w| match ppr_parts(w, x, r, h, &kn, true) {
            Ok(p) => (p.value, p.grad.expect("requested")),
            Err(_) => (f64::NAN, vec![f64::NAN; w.len()]),
        },
        &w,
        QnOptions {
            max_iter: opts.max_iter,
            grad_tol: opts.grad_tol,
            ..QnOptions::default()
        },
    );
    let w = normalize(&res.x);
    let p = x.mul_vec(&w);
    let ones = WeightedSample::uniform(p.clone())?;
    let rs = ones.reweighted(r)?;
    let (hf, _) = scalar_minimize(|g| loo_sse_presorted(g, &ones, &rs, r, &kn), h / 50.0, h, 1e-6 * h)?;
    Ok(PprComponent {
        w,
        h: hf,
        projections: p,
        residuals: r.to_vec(),
    })
}

/// Forward stagewise fit: each component is fitted to the residuals left by
/// the mean and the components before it.
pub fn ppr_fit(x: &Matrix, y: &[f64], nterms: usize, opts: &PprOptions) -> Result<PprModel> {
    if nterms == 0 {
        return invalid("need at least one term");
    }
    if y.len() != x.rows() || y.is_empty() {
        return invalid(format!("{} responses for {} rows", y.len(), x.rows()));
    }
    let mu = y.iter().sum::<f64>() / y.len() as f64;
    let mut r: Vec<f64> = y.iter().map(|v| v - mu).collect();
    let mut components = Vec::with_capacity(nterms);
    for _ in 0..nterms {
        let c = ppr_fit_component(x, &r, None, opts)?;
        let fitted = nw_regression(&c.projections, &c.residuals, c.h, &opts.kernel, None)?.fitted;
        r.iter_mut().zip(&fitted).for_each(|(a, f)| *a -= f);
        components.push(c);
    }
    Ok(PprModel {
        mu,
        components,
        kernel: opts.kernel.clone(),
    })
}

pub fn ppr_predict(model: &PprModel, x: &Matrix) -> Result<Vec<f64>> {
    model.predict_terms(x, model.components.len())
}
