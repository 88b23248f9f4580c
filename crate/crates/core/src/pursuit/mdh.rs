//! Minimum density hyperplanes: directions along which a penalised kernel
//! density estimate of the projections has the lowest possible minimum.

use serde::{Deserialize, Serialize};

use super::{chain_to_w, mean_sd, normalize, project};
use crate::error::{invalid, Error, Result};
use crate::fastsum::{fk_sum, SumMode, WeightedSample};
use crate::kernel::PolyExpKernel;
use crate::linalg::{dot, sym_eig, Matrix};
use crate::optim::{qn_minimize, QnOptions};
use crate::smoothers::silverman_bandwidth;

/// Grid resolution for the split point search and the validity check.
pub const GRID_SIZE: usize = 200;
/// Number of linearly spaced penalty widths from 0 to `alphamax`.
pub const ALPHA_STAGES: usize = 11;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdhOptions {
    /// Starting direction; the first principal component when absent.
    pub v0: Option<Vec<f64>>,
    pub hmult: f64,
    pub alphamax: f64,
    /// Penalty constant; `10 · max f̂ / σ²` on the initial projection when absent.
    pub c: Option<f64>,
    pub kernel: PolyExpKernel,
    /// Quasi-Newton iterations per penalty stage.
    pub max_iter: usize,
}

impl Default for MdhOptions {
    fn default() -> Self {
        MdhOptions {
            v0: None,
            hmult: 1.0,
            alphamax: 1.0,
            c: None,
            kernel: PolyExpKernel::default(),
            max_iter: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdhModel {
    /// Unit normal of the hyperplane `{x : vᵀx = b}`.
    pub v: Vec<f64>,
    pub b: f64,
    pub alpha_final: f64,
    /// Unpenalised density of the projections at `b`.
    pub density_at_b: f64,
    /// False when no penalty stage produced a split between two modes; the
    /// α = 0 solution is returned in that case.
    pub separating: bool,
    pub h: f64,
    pub c: f64,
    pub kernel: PolyExpKernel,
}

impl MdhModel {
    /// `true` for rows with `vᵀx > b`.
    pub fn side(&self, x: &Matrix) -> Result<Vec<bool>> {
        if x.cols() != self.v.len() {
            return invalid(format!("model expects {} columns, got {}", self.v.len(), x.cols()));
        }
        Ok(x.mul_vec(&self.v).into_iter().map(|p| p > self.b).collect())
    }
}

/// Projections with their mean and standard deviation.
#[derive(Debug, Clone)]
pub struct ProjectedSample {
    sample: WeightedSample,
    pub mean: f64,
    pub sd: f64,
}

impl ProjectedSample {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.len() < 2 {
            return invalid("need at least two projections");
        }
        let (mean, sd) = mean_sd(&p);
        if !(sd > 0.0) {
            return Err(Error::Numeric("projections have zero variance".into()));
        }
        Ok(ProjectedSample {
            sample: WeightedSample::uniform(p)?,
            mean,
            sd,
        })
    }

    fn density(&self, at: &[f64], h: f64, kn: &PolyExpKernel) -> Result<Vec<f64>> {
        let s = fk_sum(&self.sample, h, kn, Some(at), SumMode::Sum, None)?;
        let scale = 1.0 / (self.sample.len() as f64 * h);
        Ok(s.ksum.into_iter().map(|v| (v * scale).max(0.0)).collect())
    }

    fn window(&self, alpha: f64) -> (f64, f64) {
        (self.mean - (alpha + 1.0) * self.sd, self.mean + (alpha + 1.0) * self.sd)
    }

    fn grid(&self, alpha: f64) -> Vec<f64> {
        let (lo, hi) = self.window(alpha);
        (0..GRID_SIZE).map(|i| lo + (hi - lo) * i as f64 / (GRID_SIZE - 1) as f64).collect()
    }
}

fn interval_distance(b: f64, mean: f64, sd: f64, alpha: f64) -> f64 {
    let (lo, hi) = (mean - alpha * sd, mean + alpha * sd);
    if b > hi {
        b - hi
    } else if b < lo {
        lo - b
    } else {
        0.0
    }
}

fn penalized(proj: &ProjectedSample, at: &[f64], h: f64, kn: &PolyExpKernel, c: f64, alpha: f64) -> Result<Vec<f64>> {
    let f = proj.density(at, h, kn)?;
    Ok(f.into_iter()
        .zip(at)
        .map(|(v, &b)| v + c * interval_distance(b, proj.mean, proj.sd, alpha).powi(2))
        .collect())
}

fn check_params(h: f64, c: f64, alpha: f64) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return invalid(format!("bandwidth must be positive, got {h}"));
    }
    if !(c >= 0.0 && c.is_finite()) {
        return invalid(format!("penalty constant must be non-negative, got {c}"));
    }
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return invalid(format!("alpha must be non-negative, got {alpha}"));
    }
    Ok(())
}

/// `f̂(b) + C · dist(b, [μ - ασ, μ + ασ])²`.
pub fn mdh_penalized_density(
    proj: &ProjectedSample,
    b: f64,
    h: f64,
    kernel: &PolyExpKernel,
    c: f64,
    alpha: f64,
) -> Result<f64> {
    check_params(h, c, alpha)?;
    Ok(penalized(proj, &[b], h, &kernel.normalized(), c, alpha)?[0])
}

fn min_b(proj: &ProjectedSample, h: f64, kn: &PolyExpKernel, c: f64, alpha: f64) -> Result<(f64, f64)> {
    let grid = proj.grid(alpha);
    let step = grid[1] - grid[0];
    let mut cand = grid.clone();
    // the mean is always admissible, so the result never beats f̂(μ) by luck of the grid
    cand.push(proj.mean);
    let vals = penalized(proj, &cand, h, kn, c, alpha)?;
    let best = (0..cand.len()).fold(0, |a, j| if vals[j] < vals[a] { j } else { a });
    let (mut lo, mut hi) = if best < grid.len() {
        (grid[best.saturating_sub(1)], grid[(best + 1).min(grid.len() - 1)])
    } else {
        (proj.mean - step, proj.mean + step)
    };
    let tol = 1e-6 * proj.sd;
    while hi - lo >= tol {
        let a = lo + (hi - lo) / 3.0;
        let b = hi - (hi - lo) / 3.0;
        let v = penalized(proj, &[a, b], h, kn, c, alpha)?;
        if v[0] <= v[1] {
            hi = b;
        } else {
            lo = a;
        }
    }
    let mid = 0.5 * (lo + hi);
    let vm = penalized(proj, &[mid], h, kn, c, alpha)?[0];
    if vm <= vals[best] {
        Ok((mid, vm))
    } else {
        Ok((cand[best], vals[best]))
    }
}

/// Best split point along `v`: a grid search over `[μ - (α+1)σ, μ + (α+1)σ]`
/// followed by ternary refinement inside the winning cell.
pub fn mdh_min_b(v: &[f64], x: &Matrix, h: f64, kernel: &PolyExpKernel, c: f64, alpha: f64) -> Result<(f64, f64)> {
    check_params(h, c, alpha)?;
    let (p, _) = project(x, v)?;
    min_b(&ProjectedSample::new(p)?, h, &kernel.normalized(), c, alpha)
}

/// Whether `b` lies in a valley: some grid local maximum on each side rises above `f̂(b)`.
fn is_separating(proj: &ProjectedSample, b: f64, h: f64, kn: &PolyExpKernel, alpha: f64) -> Result<bool> {
    let grid = proj.grid(alpha);
    let f = proj.density(&grid, h, kn)?;
    let fb = proj.density(&[b], h, kn)?[0];
    let (mut left, mut right) = (false, false);
    for j in 1..grid.len() - 1 {
        if f[j] > f[j - 1] && f[j] >= f[j + 1] && f[j] > fb {
            if grid[j] < b {
                left = true;
            } else if grid[j] > b {
                right = true;
            }
        }
    }
    Ok(left && right)
}

struct Objective<'a> {
    x: &'a Matrix,
    means: Vec<f64>,
    cov: Matrix,
    h: f64,
    kn: PolyExpKernel,
    c: f64,
    alpha: f64,
}

impl Objective<'_> {
    fn value(&self, w: &[f64]) -> Result<f64> {
        let (p, _) = project(self.x, w)?;
        Ok(min_b(&ProjectedSample::new(p)?, self.h, &self.kn, self.c, self.alpha)?.1)
    }

    /// Value and gradient with the split point held at its optimum.
    fn value_grad(&self, w: &[f64]) -> Result<(f64, Vec<f64>)> {
        let (p, nw) = project(self.x, w)?;
        let proj = ProjectedSample::new(p.clone())?;
        let (b, value) = min_b(&proj, self.h, &self.kn, self.c, self.alpha)?;
        let n = p.len() as f64;
        let scale = 1.0 / (n * self.h * self.h);
        let gp: Vec<f64> = p.iter().map(|pi| scale * self.kn.eval_derivative((pi - b) / self.h)).collect();
        let mut g = chain_to_w(self.x, w, nw, &p, &gp);

        let v = normalize(w);
        let (mu, sd, a) = (proj.mean, proj.sd, self.alpha);
        let sv = self.cov.mul_vec(&v);
        let gv: Option<Vec<f64>> = if b > mu + a * sd {
            let k = -2.0 * self.c * (b - mu - a * sd);
            Some(self.means.iter().zip(&sv).map(|(m, s)| k * (m + a * s / sd)).collect())
        } else if b < mu - a * sd {
            let k = 2.0 * self.c * (mu - a * sd - b);
            Some(self.means.iter().zip(&sv).map(|(m, s)| k * (m - a * s / sd)).collect())
        } else {
            None
        };
        if let Some(gv) = gv {
            let radial = dot(&gv, &v);
            g.iter_mut().zip(gv.iter().zip(&v)).for_each(|(gi, (a, vi))| *gi += (a - radial * vi) / nw);
        }
        Ok((value, g))
    }
}

/// Penalised density value at the best split along `w` and its gradient in `w`,
/// with `b` held at its optimum. Exposed for gradient checks.
pub fn mdh_objective(
    w: &[f64],
    x: &Matrix,
    h: f64,
    kernel: &PolyExpKernel,
    c: f64,
    alpha: f64,
) -> Result<(f64, Vec<f64>)> {
    check_params(h, c, alpha)?;
    Objective {
        x,
        means: x.column_means(),
        cov: x.covariance(),
        h,
        kn: kernel.normalized(),
        c,
        alpha,
    }
    .value_grad(w)
}

/// Fits a minimum density hyperplane, widening the admissible interval for
/// `b` over [`ALPHA_STAGES`] stages and keeping the last stage whose split
/// lies between two modes.
pub fn mdh_fit(x: &Matrix, opts: &MdhOptions) -> Result<MdhModel> {
    let (n, d) = (x.rows(), x.cols());
    if n < 10 || d < 2 {
        return invalid(format!("need at least 10 rows and 2 columns, got {n}x{d}"));
    }
    if !(opts.hmult > 0.0) {
        return invalid(format!("bandwidth multiplier must be positive, got {}", opts.hmult));
    }
    if !(opts.alphamax >= 0.0 && opts.alphamax.is_finite()) {
        return invalid(format!("alphamax must be non-negative, got {}", opts.alphamax));
    }
    let cov = x.covariance();
    let v0 = match &opts.v0 {
        Some(v) => normalize(&project(x, v).map(|_| v.clone())?),
        None => {
            let eig = sym_eig(&cov)?;
            eig.vectors.column(0)
        }
    };
    let kn = opts.kernel.normalized();
    let (p0, _) = project(x, &v0)?;
    let h = opts.hmult * silverman_bandwidth(&p0, &opts.kernel)?;
    let proj0 = ProjectedSample::new(p0.clone())?;
    let c = match opts.c {
        Some(c) => c,
        None => {
            let fmax = proj0.density(&p0, h, &kn)?.into_iter().fold(0.0, f64::max);
            10.0 * fmax / (proj0.sd * proj0.sd)
        }
    };
    check_params(h, c, 0.0)?;
    let qn = QnOptions {
        max_iter: opts.max_iter,
        ..QnOptions::default()
    };

    let mut w = v0.clone();
    let mut fallback = None;
    let mut valid = None;
    for s in 0..ALPHA_STAGES {
        let alpha = opts.alphamax * s as f64 / (ALPHA_STAGES - 1) as f64;
        let obj = Objective {
            x,
            means: x.column_means(),
            cov: cov.clone(),
            h,
            kn: kn.clone(),
            c,
            alpha,
        };
        // restart from v0 if the carried direction is worse under this penalty
        if obj.value(&v0)? < obj.value(&w)? {
            w = v0.clone();
        }
        let res = qn_minimize(
            |w| match obj.value_grad(w) {
                Ok(vg) => vg,
                Err(_) => (f64::NAN, vec![f64::NAN; w.len()]),
            },
            &w,
            qn,
        );
        w = normalize(&res.x);
        let (p, _) = project(x, &w)?;
        let proj = ProjectedSample::new(p)?;
        let (b, _) = min_b(&proj, h, &kn, c, alpha)?;
        let model = MdhModel {
            v: w.clone(),
            b,
            alpha_final: alpha,
            density_at_b: proj.density(&[b], h, &kn)?[0],
            separating: is_separating(&proj, b, h, &kn, alpha)?,
            h,
            c,
            kernel: opts.kernel.clone(),
        };
        if s == 0 {
            fallback = Some(model.clone());
        }
        if model.separating {
            valid = Some(model);
        }
    }
    Ok(valid.unwrap_or_else(|| {
        let mut m = fallback.expect("at least one stage");
        m.separating = false;
        m
    }))
}
