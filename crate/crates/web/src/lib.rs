//! WebAssembly bindings for the demo page in `www/`.
//!
//! Each exported function is a thin wrapper over a plain Rust function of the
//! same name with an `_impl` suffix, so the numerics can be tested natively.

use fksum::kernel::{kernel_curve, PolyExpKernel};
use fksum::simulate::{simulate, sine_kink, SimKind};
use fksum::smoothers::{kde, loclin_regression, nw_regression, BandwidthSpec};
use fksum::{Error, Result};
use wasm_bindgen::prelude::*;

/// A sampled curve.
#[wasm_bindgen(getter_with_clone)]
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// Density estimate of a simulated bimodal sample against the true density.
#[wasm_bindgen(getter_with_clone)]
#[derive(Debug, Clone, PartialEq)]
pub struct DensityDemo {
    pub grid: Vec<f64>,
    pub estimate: Vec<f64>,
    pub truth: Vec<f64>,
    pub sample: Vec<f64>,
    pub h: f64,
    pub millis: f64,
}

/// Nadaraya-Watson and local linear fits to a simulated sine-with-kink sample.
#[wasm_bindgen(getter_with_clone)]
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionDemo {
    pub grid: Vec<f64>,
    pub nw: Vec<f64>,
    pub loclin: Vec<f64>,
    pub truth: Vec<f64>,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub h: f64,
}

fn js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

/// `rule` is `fixed`, `silverman` or `cv`; `value` is the bandwidth or the
/// multiplier and is ignored for `cv`.
pub fn bandwidth_spec(rule: &str, value: f64) -> Result<BandwidthSpec> {
    match rule {
        "fixed" => Ok(BandwidthSpec::Fixed(value)),
        "silverman" => Ok(BandwidthSpec::Silverman(value)),
        "cv" => Ok(BandwidthSpec::Cv(None)),
        other => Err(Error::InvalidArgument(format!("unknown bandwidth rule {other:?}"))),
    }
}

fn grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("grid needs at least 2 points, got {n}")));
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n).map(|i| lo + step * i as f64).collect())
}

pub fn kernel_curve_impl(beta: &str, n: usize) -> Result<Curve> {
    let (x, y) = kernel_curve(&PolyExpKernel::parse(beta)?, n)?.into_iter().unzip();
    Ok(Curve { x, y })
}

/// `(2/3)·N(0,1) + (1/3)·(1 + Exp(1))`.
pub fn bimodal_density(x: f64) -> f64 {
    let normal = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let shifted = if x > 1.0 { (1.0 - x).exp() } else { 0.0 };
    2.0 / 3.0 * normal + shifted / 3.0
}

pub fn density_demo_impl(n: usize, seed: u64, rule: &str, value: f64, points: usize) -> Result<DensityDemo> {
    let kernel = PolyExpKernel::default();
    let sample = simulate(SimKind::Bimodal, n, 1, seed)?.data.column(0).to_vec();
    let spec = bandwidth_spec(rule, value)?;
    let t = now();
    let h = spec.resolve_density(&sample, &kernel)?;
    let g = grid(-4.0, 7.0, points)?;
    let est = kde(&sample, h, &kernel, Some(&g))?;
    let millis = now() - t;
    Ok(DensityDemo {
        truth: g.iter().map(|&x| bimodal_density(x)).collect(),
        grid: g,
        estimate: est.density,
        sample,
        h,
        millis,
    })
}

pub fn regression_demo_impl(n: usize, seed: u64, rule: &str, value: f64, points: usize) -> Result<RegressionDemo> {
    let kernel = PolyExpKernel::default();
    let data = simulate(SimKind::SineKink, n, 1, seed)?.data;
    let (xs, ys) = (data.column(0).to_vec(), data.column(1).to_vec());
    let h = bandwidth_spec(rule, value)?.resolve_regression(&xs, &ys, &kernel)?;
    let g = grid(0.0, 10.0, points)?;
    let nw = nw_regression(&xs, &ys, h, &kernel, Some(&g))?.fitted;
    let loclin = loclin_regression(&xs, &ys, h, &kernel, Some(&g))?.fitted;
    Ok(RegressionDemo {
        truth: g.iter().map(|&x| sine_kink(x)).collect(),
        grid: g,
        nw,
        loclin,
        xs,
        ys,
        h,
    })
}

#[cfg(target_arch = "wasm32")]
fn now() -> f64 {
    js_sys_now()
}

#[cfg(target_arch = "wasm32")]
#[wasm_bindgen]
extern "C" {
    #[wasm_bindgen(js_namespace = Date, js_name = now)]
    fn js_sys_now() -> f64;
}

#[cfg(not(target_arch = "wasm32"))]
fn now() -> f64 {
    use std::time::{SystemTime, UNIX_EPOCH};
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64() * 1e3)
}

#[wasm_bindgen(js_name = kernelCurve)]
pub fn kernel_curve_js(beta: &str, n: usize) -> std::result::Result<Curve, JsError> {
    kernel_curve_impl(beta, n).map_err(js)
}

#[wasm_bindgen(js_name = densityDemo)]
pub fn density_demo(n: usize, seed: u32, rule: &str, value: f64, points: usize) -> std::result::Result<DensityDemo, JsError> {
    density_demo_impl(n, seed.into(), rule, value, points).map_err(js)
}

#[wasm_bindgen(js_name = regressionDemo)]
pub fn regression_demo(n: usize, seed: u32, rule: &str, value: f64, points: usize) -> std::result::Result<RegressionDemo, JsError> {
    regression_demo_impl(n, seed.into(), rule, value, points).map_err(js)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bimodal_density_integrates_to_one() {
        let step = 1e-3;
        let total: f64 = (0..20_000).map(|i| bimodal_density(-8.0 + step * (i as f64 + 0.5)) * step).sum();
        assert!((total - 1.0).abs() < 1e-3);
    }

    #[test]
    fn rules() {
        assert_eq!(bandwidth_spec("fixed", 0.3).unwrap(), BandwidthSpec::Fixed(0.3));
        assert_eq!(bandwidth_spec("cv", 9.0).unwrap(), BandwidthSpec::Cv(None));
        assert!(bandwidth_spec("plug-in", 1.0).is_err());
    }
}
