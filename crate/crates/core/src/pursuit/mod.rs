//! Projection pursuit: ICA by entropy minimisation, minimum density
//! hyperplanes, and projection pursuit regression.
//!
//! Every index is written as a function of the unit projection `p = Xw/‖w‖`,
//! so gradients in `w` come from a gradient in `p` and one shared Jacobian,
//! `D_w p = X/‖w‖ - p wᵀ/‖w‖²`.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::linalg::{dot, norm, Matrix};

pub mod ica;
pub mod mdh;
pub mod ppr;

pub use ica::{entropy_grad, entropy_index, ica_fit, IcaModel, IcaOptions};
pub use mdh::{mdh_fit, mdh_min_b, mdh_penalized_density, MdhModel, MdhOptions, ProjectedSample};
pub use ppr::{ppr_fit, ppr_fit_component, ppr_grad, ppr_phi, ppr_predict, PprComponent, PprModel, PprOptions};

/// Unit direction and the projections `X w / ‖w‖`.
pub(crate) fn project(x: &Matrix, w: &[f64]) -> Result<(Vec<f64>, f64)> {
    if w.len() != x.cols() {
        return invalid(format!("direction has {} entries for {} columns", w.len(), x.cols()));
    }
    let nw = norm(w);
    if !(nw > 0.0 && nw.is_finite()) {
        return invalid("projection direction must be non-zero and finite");
    }
    let p = x.mul_vec(w).into_iter().map(|v| v / nw).collect();
    Ok((p, nw))
}

/// `(D_w p)ᵀ g = (Xᵀg - (pᵀg) w/‖w‖) / ‖w‖`.
pub(crate) fn chain_to_w(x: &Matrix, w: &[f64], nw: f64, p: &[f64], g: &[f64]) -> Vec<f64> {
    let xg = x.t_mul_vec(g);
    let pg = dot(p, g);
    xg.iter().zip(w).map(|(a, wi)| (a - pg * wi / nw) / nw).collect()
}

pub(crate) fn normalize(v: &[f64]) -> Vec<f64> {
    let n = norm(v);
    v.iter().map(|x| x / n).collect()
}

pub(crate) fn mean_sd(p: &[f64]) -> (f64, f64) {
    let n = p.len() as f64;
    let m = p.iter().sum::<f64>() / n;
    let v = p.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, v.sqrt())
}

/// Writes a model as pretty JSON. Reals use the shortest round-trip form, so
/// [`load_json`] restores them bit for bit.
pub fn save_json<T: Serialize>(path: impl AsRef<Path>, model: &T) -> Result<()> {
    let file = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(file), model)?;
    Ok(())
}

pub fn load_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let file = std::fs::File::open(path)?;
    Ok(serde_json::from_reader(std::io::BufReader::new(file))?)
}
