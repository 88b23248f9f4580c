//! Kernel density estimation, Nadaraya-Watson and local-linear regression,
//! and bandwidth selection.
//!
//! Every estimator here uses the unit-integral rescaling of the caller's
//! kernel. Leave-one-out objectives use [`fk_sum_loo`], which equals
//! `S(x_i) - K(0)·ω_i` without forming the difference.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fastsum::{fk_sum, fk_sum_loo, SumMode, WeightedSample};
use crate::kernel::PolyExpKernel;
use crate::optim::scalar_minimize;

/// Floor applied to leave-one-out densities and regression denominators.
pub const DENSITY_FLOOR: f64 = 1e-20;

const CV_TOL: f64 = 1e-8;

/// How to choose a bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BandwidthSpec {
    Fixed(f64),
    /// Silverman's rule times a multiplier.
    Silverman(f64),
    /// Leave-one-out cross-validation over a bracket, or the default bracket.
    Cv(Option<(f64, f64)>),
}

impl BandwidthSpec {
    fn validate(&self) -> Result<()> {
        match *self {
            BandwidthSpec::Fixed(h) if !(h > 0.0 && h.is_finite()) => {
                invalid(format!("fixed bandwidth must be positive, got {h}"))
            }
            BandwidthSpec::Silverman(m) if !(m > 0.0 && m.is_finite()) => {
                invalid(format!("bandwidth multiplier must be positive, got {m}"))
            }
            BandwidthSpec::Cv(Some((lo, hi))) if !(lo > 0.0 && lo < hi && hi.is_finite()) => {
                invalid(format!("bandwidth bracket must satisfy 0 < lo < hi, got [{lo}, {hi}]"))
            }
            _ => Ok(()),
        }
    }

    /// Bandwidth for density estimation; cross-validation maximises the
    /// leave-one-out pseudo-likelihood.
    pub fn resolve_density(&self, x: &[f64], kernel: &PolyExpKernel) -> Result<f64> {
        self.validate()?;
        match *self {
            BandwidthSpec::Fixed(h) => Ok(h),
            BandwidthSpec::Silverman(m) => Ok(m * silverman_bandwidth(x, kernel)?),
            BandwidthSpec::Cv(bracket) => cv_density_bandwidth(x, kernel, bracket),
        }
    }

    /// Bandwidth for regression; cross-validation minimises leave-one-out squared error.
    pub fn resolve_regression(&self, x: &[f64], y: &[f64], kernel: &PolyExpKernel) -> Result<f64> {
        self.validate()?;
        match *self {
            BandwidthSpec::Fixed(h) => Ok(h),
            BandwidthSpec::Silverman(m) => Ok(m * silverman_bandwidth(x, kernel)?),
            BandwidthSpec::Cv(bracket) => cv_regression_bandwidth(x, y, kernel, bracket),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityEstimate {
    pub eval_points: Vec<f64>,
    pub density: Vec<f64>,
    pub h: f64,
    pub kernel: PolyExpKernel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegressionMethod {
    Nw,
    LocLin,
}

impl std::str::FromStr for RegressionMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nw" => Ok(RegressionMethod::Nw),
            "loclin" => Ok(RegressionMethod::LocLin),
            other => invalid(format!("unknown regression method {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionEstimate {
    pub eval_points: Vec<f64>,
    pub fitted: Vec<f64>,
    pub h: f64,
    pub kernel: PolyExpKernel,
    pub method: RegressionMethod,
}

/// `f̂(x̃) = (1/(nh)) Σ K̃((x_i - x̃)/h)`.
pub fn kde(x: &[f64], h: f64, kernel: &PolyExpKernel, x_eval: Option<&[f64]>) -> Result<DensityEstimate> {
    kde_binned(x, h, kernel, x_eval, None)
}

/// [`kde`] with an optional linear-binning approximation over `nbin` nodes.
pub fn kde_binned(
    x: &[f64],
    h: f64,
    kernel: &PolyExpKernel,
    x_eval: Option<&[f64]>,
    nbin: Option<usize>,
) -> Result<DensityEstimate> {
    let n = x.len();
    let sample = WeightedSample::uniform(x.to_vec())?;
    let k = kernel.normalized();
    let sums = fk_sum(&sample, h, &k, x_eval, SumMode::Sum, nbin)?;
    let scale = 1.0 / (n as f64 * h);
    Ok(DensityEstimate {
        eval_points: x_eval.map_or_else(|| x.to_vec(), <[f64]>::to_vec),
        density: sums.ksum.iter().map(|s| (s * scale).max(0.0)).collect(),
        h,
        kernel: kernel.clone(),
    })
}

/// Sample standard deviation with divisor `n - 1`.
pub fn sample_sd(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    (x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// `(8√π ‖K‖² / (3 σ_K⁴ n))^{1/5} σ̂`.
pub fn silverman_from_constants(n: usize, sd: f64, roughness: f64, variance: f64) -> f64 {
    (8.0 * std::f64::consts::PI.sqrt() * roughness / (3.0 * variance * variance * n as f64)).powf(0.2) * sd
}

pub fn silverman_bandwidth(x: &[f64], kernel: &PolyExpKernel) -> Result<f64> {
    if x.len() < 2 {
        return invalid("Silverman's rule needs at least two points");
    }
    let sd = sample_sd(x);
    if !(sd > 0.0) {
        return Err(Error::Numeric("sample has zero variance".into()));
    }
    let c = kernel.constants();
    Ok(silverman_from_constants(x.len(), sd, c.roughness, c.variance))
}

fn check_h(h: f64) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return invalid(format!("bandwidth must be positive, got {h}"));
    }
    Ok(())
}

/// Negative leave-one-out log pseudo-likelihood, `-Σ log max(f̂_{-i}(x_i), 1e-20)`.
///
/// Passing `x` already sorted skips the sort.
pub fn loo_ml_objective(h: f64, x: &[f64], kernel: &PolyExpKernel) -> Result<f64> {
    check_h(h)?;
    if x.len() < 2 {
        return invalid("leave-one-out needs at least two points");
    }
    let sample = WeightedSample::uniform(x.to_vec())?;
    Ok(loo_ml_sorted(h, &sample, &kernel.normalized()))
}

fn loo_ml_sorted(h: f64, sample: &WeightedSample, kn: &PolyExpKernel) -> f64 {
    let n = sample.len() as f64;
    let sums = fk_sum_loo(sample, h, kn, SumMode::Sum).expect("validated inputs");
    let scale = 1.0 / ((n - 1.0) * h);
    -sums
        .ksum
        .iter()
        .map(|s| ((s * scale).max(DENSITY_FLOOR)).ln())
        .sum::<f64>()
}

/// Default density bracket `σ̂ n^{-1/5} · [1/20, 5]`.
pub fn default_bracket(x: &[f64]) -> (f64, f64) {
    let base = sample_sd(x) / (x.len() as f64).powf(0.2);
    (base / 20.0, 5.0 * base)
}

/// Bandwidth minimising [`loo_ml_objective`] over `bracket`.
pub fn cv_density_bandwidth(x: &[f64], kernel: &PolyExpKernel, bracket: Option<(f64, f64)>) -> Result<f64> {
    if x.len() < 2 {
        return invalid("cross-validation needs at least two points");
    }
    let (lo, hi) = bracket.unwrap_or_else(|| default_bracket(x));
    if !(lo > 0.0 && lo < hi) {
        return Err(Error::Numeric(format!("degenerate bandwidth bracket [{lo}, {hi}]")));
    }
    let sample = WeightedSample::uniform(x.to_vec())?;
    let kn = kernel.normalized();
    let (h, _) = scalar_minimize(|h| loo_ml_sorted(h, &sample, &kn), lo, hi, CV_TOL * (hi - lo))?;
    Ok(h)
}

fn check_xy(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return invalid(format!("{} covariates but {} responses", x.len(), y.len()));
    }
    if x.is_empty() {
        return invalid("regression needs at least one observation");
    }
    if y.iter().any(|v| !v.is_finite()) {
        return invalid("responses must be finite");
    }
    Ok(())
}

/// `f̂(x̃) = Σ K((x_i - x̃)/h) y_i / Σ K((x_i - x̃)/h)`.
pub fn nw_regression(
    x: &[f64],
    y: &[f64],
    h: f64,
    kernel: &PolyExpKernel,
    x_eval: Option<&[f64]>,
) -> Result<RegressionEstimate> {
    check_xy(x, y)?;
    check_h(h)?;
    let kn = kernel.normalized();
    let ones = WeightedSample::uniform(x.to_vec())?;
    let ys = ones.reweighted(y)?;
    let den = fk_sum(&ones, h, &kn, x_eval, SumMode::Sum, None)?.ksum;
    let num = fk_sum(&ys, h, &kn, x_eval, SumMode::Sum, None)?.ksum;
    Ok(RegressionEstimate {
        eval_points: x_eval.map_or_else(|| x.to_vec(), <[f64]>::to_vec),
        fitted: num.iter().zip(&den).map(|(a, b)| a / b.max(DENSITY_FLOOR)).collect(),
        h,
        kernel: kernel.clone(),
        method: RegressionMethod::Nw,
    })
}

/// Local-linear regression from six kernel sums with polynomial weights.
pub fn loclin_regression(
    x: &[f64],
    y: &[f64],
    h: f64,
    kernel: &PolyExpKernel,
    x_eval: Option<&[f64]>,
) -> Result<RegressionEstimate> {
    check_xy(x, y)?;
    check_h(h)?;
    let kn = kernel.normalized();
    // centre to keep the recombined moments well conditioned
    let c = x.iter().sum::<f64>() / x.len() as f64;
    let z: Vec<f64> = x.iter().map(|v| v - c).collect();
    let eval: Vec<f64> = x_eval.map_or_else(|| z.clone(), |e| e.iter().map(|v| v - c).collect());
    let base = WeightedSample::uniform(z.clone())?;
    let sum = |w: Vec<f64>| -> Result<Vec<f64>> {
        Ok(fk_sum(&base.reweighted(&w)?, h, &kn, Some(&eval), SumMode::Sum, None)?.ksum)
    };
    let s0 = sum(vec![1.0; x.len()])?;
    let s1 = sum(z.clone())?;
    let s2 = sum(z.iter().map(|v| v * v).collect())?;
    let t0 = sum(y.to_vec())?;
    let t1 = sum(z.iter().zip(y).map(|(a, b)| a * b).collect())?;
    let fitted = eval
        .iter()
        .enumerate()
        .map(|(j, &e)| {
            let m0 = s0[j];
            let m1 = s1[j] - e * s0[j];
            let m2 = s2[j] - 2.0 * e * s1[j] + e * e * s0[j];
            let b0 = t0[j];
            let b1 = t1[j] - e * t0[j];
            let floor = DENSITY_FLOOR * (m0 * m2).max(1.0);
            let den = (m0 * m2 - m1 * m1).max(floor);
            (m2 * b0 - m1 * b1) / den
        })
        .collect();
    Ok(RegressionEstimate {
        eval_points: x_eval.map_or_else(|| x.to_vec(), <[f64]>::to_vec),
        fitted,
        h,
        kernel: kernel.clone(),
        method: RegressionMethod::LocLin,
    })
}

pub fn regression(
    method: RegressionMethod,
    x: &[f64],
    y: &[f64],
    h: f64,
    kernel: &PolyExpKernel,
    x_eval: Option<&[f64]>,
) -> Result<RegressionEstimate> {
    match method {
        RegressionMethod::Nw => nw_regression(x, y, h, kernel, x_eval),
        RegressionMethod::LocLin => loclin_regression(x, y, h, kernel, x_eval),
    }
}

/// Leave-one-out Nadaraya-Watson squared error `Σ (y_i - ŷ_{-i})²`.
pub fn loo_sse_objective(h: f64, x: &[f64], y: &[f64], kernel: &PolyExpKernel) -> Result<f64> {
    check_xy(x, y)?;
    check_h(h)?;
    if x.len() < 2 {
        return invalid("leave-one-out needs at least two points");
    }
    let ones = WeightedSample::uniform(x.to_vec())?;
    let ys = ones.reweighted(y)?;
    Ok(loo_sse_presorted(h, &ones, &ys, y, &kernel.normalized()))
}

/// `y` in the caller's order, `ones`/`ys` sharing one sort.
pub(crate) fn loo_sse_presorted(
    h: f64,
    ones: &WeightedSample,
    ys: &WeightedSample,
    y: &[f64],
    kn: &PolyExpKernel,
) -> f64 {
    let den = fk_sum_loo(ones, h, kn, SumMode::Sum).expect("validated inputs").ksum;
    let num = fk_sum_loo(ys, h, kn, SumMode::Sum).expect("validated inputs").ksum;
    y.iter()
        .zip(num.iter().zip(&den))
        .map(|(yi, (s, d))| {
            let fit = s / d.max(DENSITY_FLOOR);
            (yi - fit).powi(2)
        })
        .sum()
}

/// Bandwidth minimising [`loo_sse_objective`]; the default bracket is [`default_bracket`] of `x`.
pub fn cv_regression_bandwidth(
    x: &[f64],
    y: &[f64],
    kernel: &PolyExpKernel,
    bracket: Option<(f64, f64)>,
) -> Result<f64> {
    check_xy(x, y)?;
    if x.len() < 2 {
        return invalid("cross-validation needs at least two points");
    }
    let (lo, hi) = bracket.unwrap_or_else(|| default_bracket(x));
    if !(lo > 0.0 && lo < hi) {
        return Err(Error::Numeric(format!("degenerate bandwidth bracket [{lo}, {hi}]")));
    }
    let ones = WeightedSample::uniform(x.to_vec())?;
    let ys = ones.reweighted(y)?;
    let kn = kernel.normalized();
    let (h, _) = scalar_minimize(|h| loo_sse_presorted(h, &ones, &ys, y, &kn), lo, hi, CV_TOL * (hi - lo))?;
    Ok(h)
}
