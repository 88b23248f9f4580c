//! Independent component analysis by minimising the entropy of kernel
//! density estimates of whitened projections, one component at a time.

use serde::{Deserialize, Serialize};

use super::{chain_to_w, project};
use crate::error::{invalid, Result};
use crate::fastsum::{fk_sum, SumMode, WeightedSample};
use crate::kernel::PolyExpKernel;
use crate::linalg::{dot, norm, whiten, Matrix};
use crate::smoothers::{silverman_bandwidth, DENSITY_FLOOR};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IcaOptions {
    /// Multiplier on Silverman's bandwidth for each projection.
    pub hmult: f64,
    /// Optimisation steps per component.
    pub it: usize,
    pub nbin: Option<usize>,
    pub kernel: PolyExpKernel,
}

impl Default for IcaOptions {
    fn default() -> Self {
        IcaOptions {
            hmult: 1.5,
            it: 20,
            nbin: None,
            kernel: PolyExpKernel::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IcaModel {
    /// `d × k` whitening matrix.
    pub whitener: Matrix,
    /// `k × k` orthonormal matrix whose columns are the component directions.
    pub unmixing: Matrix,
    /// `n × k` estimated sources, `(X - center)·whitener·unmixing`.
    pub sources: Matrix,
    pub center: Vec<f64>,
    /// Bandwidth used for each component.
    pub bandwidths: Vec<f64>,
    pub kernel: PolyExpKernel,
}

impl IcaModel {
    /// `d × k` map from centred data to sources.
    pub fn total_unmixing(&self) -> Matrix {
        self.whitener.matmul(&self.unmixing).expect("conforming shapes")
    }

    /// Sources for new rows.
    pub fn transform(&self, x: &Matrix) -> Result<Matrix> {
        if x.cols() != self.center.len() {
            return invalid(format!("model expects {} columns, got {}", self.center.len(), x.cols()));
        }
        x.centered(&self.center).matmul(&self.total_unmixing())
    }
}

fn entropy_parts(
    q: &[f64],
    xw: &Matrix,
    h: f64,
    kn: &PolyExpKernel,
    nbin: Option<usize>,
    want_grad: bool,
) -> Result<(f64, Option<Vec<f64>>)> {
    let (p, nq) = project(xw, q)?;
    let n = p.len() as f64;
    let sample = WeightedSample::uniform(p.clone())?;
    let mode = if want_grad { SumMode::Both } else { SumMode::Sum };
    let sums = fk_sum(&sample, h, kn, None, mode, nbin)?;
    let scale = 1.0 / (n * h);
    let mut value = 0.0;
    // d log f_j / d f_j, and zero where the floor is active
    let mut inv = vec![0.0; p.len()];
    for (j, s) in sums.ksum.iter().enumerate() {
        let f = s * scale;
        if f > DENSITY_FLOOR {
            value -= f.ln();
            inv[j] = 1.0 / f;
        } else {
            value -= DENSITY_FLOOR.ln();
        }
    }
    value /= n;
    if !want_grad {
        return Ok((value, None));
    }
    let d1 = sums.dksum.expect("requested");
    let dw = fk_sum(&sample.reweighted(&inv)?, h, kn, None, SumMode::DSum, nbin)?
        .dksum
        .expect("requested");
    let c = 1.0 / (n * n * h * h);
    let gp: Vec<f64> = (0..p.len()).map(|k| c * (dw[k] + inv[k] * d1[k])).collect();
    Ok((value, Some(chain_to_w(xw, q, nq, &p, &gp))))
}

/// `-(1/n) Σ_j log f̂(p_j)` for `p = X̃q/‖q‖`, with the density estimate
/// including each point's own contribution and floored at 1e-20.
pub fn entropy_index(q: &[f64], xw: &Matrix, h: f64, kernel: &PolyExpKernel) -> Result<f64> {
    check_h(h)?;
    Ok(entropy_parts(q, xw, h, &kernel.normalized(), None, false)?.0)
}

/// Gradient of [`entropy_index`] with respect to `q`.
pub fn entropy_grad(q: &[f64], xw: &Matrix, h: f64, kernel: &PolyExpKernel) -> Result<Vec<f64>> {
    check_h(h)?;
    Ok(entropy_parts(q, xw, h, &kernel.normalized(), None, true)?.1.expect("requested"))
}

fn check_h(h: f64) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return invalid(format!("bandwidth must be positive, got {h}"));
    }
    Ok(())
}

/// Removes the components along `basis` (orthonormal) and rescales to unit length.
fn orthonormalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for b in basis {
            let c = dot(v, b);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
    }
    let n = norm(v);
    v.iter_mut().for_each(|x| *x /= n);
}

/// Whitens `x` to `ncomp` dimensions and extracts components by deflation.
///
/// Component `i` starts from the `i`-th axis and takes `it` projected
/// gradient steps with backtracking on the sphere, orthogonal to the
/// components already found.
pub fn ica_fit(x: &Matrix, ncomp: usize, opts: &IcaOptions) -> Result<IcaModel> {
    if !(opts.hmult > 0.0) {
        return invalid(format!("bandwidth multiplier must be positive, got {}", opts.hmult));
    }
    if x.rows() <= ncomp {
        return invalid(format!("need more rows than components ({} <= {ncomp})", x.rows()));
    }
    let white = whiten(x, ncomp)?;
    let z = &white.whitened;
    let kn = opts.kernel.normalized();
    let k = ncomp;
    let mut found: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut bandwidths = Vec::with_capacity(k);
    for i in 0..k {
        let mut q = vec![0.0; k];
        q[i] = 1.0;
        orthonormalize(&mut q, &found);
        let h = opts.hmult * silverman_bandwidth(&z.mul_vec(&q), &opts.kernel)?;
        let (mut value, mut grad) = entropy_parts(&q, z, h, &kn, opts.nbin, true)?;
        let mut step: f64 = 0.5;
        for _ in 0..opts.it {
            let mut g = grad.take().expect("set by the last accepted step");
            // tangent to the sphere and orthogonal to earlier components
            let mut tangent_basis = found.clone();
            tangent_basis.push(q.clone());
            for b in &tangent_basis {
                let c = dot(&g, b);
                g.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
            let gn = norm(&g);
            if !(gn > 1e-12) {
                break;
            }
            let dir: Vec<f64> = g.iter().map(|v| -v / gn).collect();
            let mut accepted = None;
            for _ in 0..30 {
                let mut cand: Vec<f64> = q.iter().zip(&dir).map(|(a, d)| a + step * d).collect();
                orthonormalize(&mut cand, &found);
                let (v, gr) = entropy_parts(&cand, z, h, &kn, opts.nbin, true)?;
                if v <= value - 1e-4 * step * gn {
                    accepted = Some((cand, v, gr));
                    break;
                }
                step *= 0.5;
            }
            match accepted {
                Some((cand, v, gr)) => {
                    q = cand;
                    value = v;
                    grad = gr;
                    step = (2.0 * step).min(1.0);
                }
                None => break,
            }
        }
        orthonormalize(&mut q, &found);
        found.push(q);
        bandwidths.push(h);
    }
    let cols: Vec<Vec<f64>> = found;
    let unmixing = Matrix::from_columns(&cols)?;
    let sources = z.matmul(&unmixing)?;
    Ok(IcaModel {
        whitener: white.whitener,
        unmixing,
        sources,
        center: white.center,
        bandwidths,
        kernel: opts.kernel.clone(),
    })
}
