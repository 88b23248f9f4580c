//! Exact kernel sums `Σ_i K((x_i - x̃_j)/h) ω_i` and their derivative
//! counterparts in `O((n + m)·α² + n log n + m log m)` time.
//!
//! Both the sample and the evaluation points are visited in ascending order.
//! The left accumulators hold, for the current evaluation point `x̃`,
//!
//! ```text
//! A_k(x̃) = Σ_{x_i ≤ x̃} ω_i ((x̃ - x_i)/h)^k e^{-(x̃ - x_i)/h},   k = 0..α
//! ```
//!
//! Moving from `x̃` to `x̃' = x̃ + δh` needs only the binomial identity
//! `A_k(x̃') = e^{-δ} Σ_{m ≤ k} C(k, m) δ^{k-m} A_m(x̃)` plus the points passed
//! on the way. A mirrored descending pass builds the right accumulators over
//! `x_i > x̃`. Every exponent is non-positive, and each update combines
//! non-negative distances, so the recursion never overflows and does not
//! cancel beyond what the weights themselves imply.

use crate::error::{invalid, Result};
use crate::kernel::PolyExpKernel;

/// Which sum collections to produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SumMode {
    #[default]
    Sum,
    DSum,
    Both,
}

impl SumMode {
    fn wants_derivative(self) -> bool {
        !matches!(self, SumMode::Sum)
    }
}

impl std::str::FromStr for SumMode {
    type Err = crate::error::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sum" | "ksum" => Ok(SumMode::Sum),
            "dsum" | "dksum" => Ok(SumMode::DSum),
            "both" => Ok(SumMode::Both),
            other => invalid(format!("unknown sum mode {other:?}")),
        }
    }
}

/// Sample points with per-point coefficients, held in ascending order of value.
///
/// `order[k]` is the caller's index of the k-th smallest value; `None` means
/// the input was already sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSample {
    values: Vec<f64>,
    weights: Vec<f64>,
    order: Option<Vec<usize>>,
}

impl WeightedSample {
    pub fn new(values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return invalid("sample must contain at least one point");
        }
        if values.len() != weights.len() {
            return invalid(format!(
                "{} values but {} weights",
                values.len(),
                weights.len()
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return invalid("sample values must be finite");
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return invalid("sample weights must be finite");
        }
        Ok(match sort_order(&values) {
            None => WeightedSample {
                values,
                weights,
                order: None,
            },
            Some((sorted, ord)) => WeightedSample {
                weights: ord.iter().map(|&i| weights[i]).collect(),
                values: sorted,
                order: Some(ord),
            },
        })
    }

    /// Sample with every coefficient equal to one.
    pub fn uniform(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return invalid("sample must contain at least one point");
        }
        if values.iter().any(|v| !v.is_finite()) {
            return invalid("sample values must be finite");
        }
        let n = values.len();
        let (values, order) = match sort_order(&values) {
            None => (values, None),
            Some((sorted, ord)) => (sorted, Some(ord)),
        };
        Ok(WeightedSample {
            values,
            weights: vec![1.0; n],
            order,
        })
    }

    /// Same points with new coefficients, given in the caller's original order.
    /// Reuses the existing sort.
    pub fn reweighted(&self, weights: &[f64]) -> Result<Self> {
        if weights.len() != self.len() {
            return invalid(format!(
                "{} weights for a sample of {} points",
                weights.len(),
                self.len()
            ));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return invalid("sample weights must be finite");
        }
        let weights = match &self.order {
            None => weights.to_vec(),
            Some(ord) => ord.iter().map(|&i| weights[i]).collect(),
        };
        Ok(WeightedSample {
            values: self.values.clone(),
            weights,
            order: self.order.clone(),
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Values in ascending order.
    pub fn sorted_values(&self) -> &[f64] {
        &self.values
    }

    /// Weights aligned with [`sorted_values`](Self::sorted_values).
    pub fn sorted_weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn was_sorted(&self) -> bool {
        self.order.is_none()
    }

    /// Values in the caller's original order.
    pub fn values(&self) -> Vec<f64> {
        self.unsort(&self.values)
    }

    /// Weights in the caller's original order.
    pub fn weights(&self) -> Vec<f64> {
        self.unsort(&self.weights)
    }

    /// Maps a vector aligned with the sorted values back to input order.
    pub fn unsort(&self, sorted: &[f64]) -> Vec<f64> {
        match &self.order {
            None => sorted.to_vec(),
            Some(ord) => {
                let mut out = vec![0.0; sorted.len()];
                for (k, &i) in ord.iter().enumerate() {
                    out[i] = sorted[k];
                }
                out
            }
        }
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Sorted copy and permutation, or `None` when already ascending.
fn sort_order(values: &[f64]) -> Option<(Vec<f64>, Vec<usize>)> {
    if values.windows(2).all(|w| w[0] <= w[1]) {
        return None;
    }
    // sorting (value, index) pairs keeps the comparisons on contiguous memory
    let mut pairs: Vec<(f64, usize)> = values.iter().copied().zip(0..).collect();
    pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    Some(pairs.into_iter().unzip())
}

/// Kernel sums and optional derivative sums, in the caller's evaluation order.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSums {
    pub ksum: Vec<f64>,
    pub dksum: Option<Vec<f64>>,
}

fn check_bandwidth(h: f64) -> Result<()> {
    if !(h > 0.0) || !h.is_finite() {
        return invalid(format!("bandwidth must be positive and finite, got {h}"));
    }
    Ok(())
}

fn check_eval(x_eval: &[f64]) -> Result<()> {
    if x_eval.is_empty() {
        return invalid("need at least one evaluation point");
    }
    if x_eval.iter().any(|v| !v.is_finite()) {
        return invalid("evaluation points must be finite");
    }
    Ok(())
}

/// Evaluates both sum collections at `x_eval` (or at the sample itself).
///
/// With `nbin`, the sample is first linearly binned onto `nbin` grid nodes and
/// the exact sum is taken over the nodes.
pub fn fk_sum(
    sample: &WeightedSample,
    h: f64,
    kernel: &PolyExpKernel,
    x_eval: Option<&[f64]>,
    mode: SumMode,
    nbin: Option<usize>,
) -> Result<KernelSums> {
    check_bandwidth(h)?;
    if let Some(nb) = nbin {
        let binned = bin_sample(sample, nb)?;
        let own;
        let xe = match x_eval {
            Some(x) => x,
            None => {
                own = sample.values();
                &own
            }
        };
        return fk_sum(&binned, h, kernel, Some(xe), mode, None);
    }
    let want_d = mode.wants_derivative();
    match x_eval {
        None => {
            let (ks, dks) = sweep(sample.sorted_values(), sample.sorted_weights(), sample.sorted_values(), h, kernel, want_d);
            Ok(KernelSums {
                ksum: sample.unsort(&ks),
                dksum: dks.map(|d| sample.unsort(&d)),
            })
        }
        Some(xe) => {
            check_eval(xe)?;
            match sort_order(xe) {
                None => {
                    let (ksum, dksum) = sweep(sample.sorted_values(), sample.sorted_weights(), xe, h, kernel, want_d);
                    Ok(KernelSums { ksum, dksum })
                }
                Some((sorted, ord)) => {
                    let (ks, dks) = sweep(sample.sorted_values(), sample.sorted_weights(), &sorted, h, kernel, want_d);
                    let scatter = |v: Vec<f64>| {
                        let mut out = vec![0.0; v.len()];
                        for (k, &i) in ord.iter().enumerate() {
                            out[i] = v[k];
                        }
                        out
                    };
                    Ok(KernelSums {
                        ksum: scatter(ks),
                        dksum: dks.map(scatter),
                    })
                }
            }
        }
    }
}

fn binomials(order: usize) -> Vec<Vec<f64>> {
    let mut c = vec![vec![0.0; order + 1]; order + 1];
    for k in 0..=order {
        c[k][0] = 1.0;
        for m in 1..=k {
            c[k][m] = c[k - 1][m - 1] + if m < k { c[k - 1][m] } else { 0.0 };
        }
    }
    c
}

struct Accumulator<'a> {
    acc: Vec<f64>,
    pow: Vec<f64>,
    binom: &'a [Vec<f64>],
}

impl<'a> Accumulator<'a> {
    fn new(order: usize, binom: &'a [Vec<f64>]) -> Self {
        Accumulator {
            acc: vec![0.0; order + 1],
            pow: vec![1.0; order + 1],
            binom,
        }
    }

    /// Re-expresses the accumulators relative to a point `delta` bandwidths further on.
    fn shift(&mut self, delta: f64) {
        if delta == 0.0 {
            return;
        }
        let decay = (-delta).exp();
        if decay == 0.0 {
            self.acc.iter_mut().for_each(|a| *a = 0.0);
            return;
        }
        let order = self.acc.len() - 1;
        for j in 1..=order {
            self.pow[j] = self.pow[j - 1] * delta;
        }
        for k in (0..=order).rev() {
            let row = &self.binom[k];
            let mut s = 0.0;
            for m in 0..=k {
                s += row[m] * self.pow[k - m] * self.acc[m];
            }
            self.acc[k] = decay * s;
        }
    }

    /// Adds a point at `dist` bandwidths from the current position.
    fn add(&mut self, dist: f64, weight: f64) {
        let e = (-dist).exp();
        if e == 0.0 {
            return;
        }
        let mut t = weight * e;
        for a in self.acc.iter_mut() {
            *a += t;
            t *= dist;
        }
    }

    fn dot(&self, coef: &[f64]) -> f64 {
        coef.iter().zip(&self.acc).map(|(c, a)| c * a).sum()
    }
}

/// One ascending and one descending pass over sorted sample and evaluation points.
fn sweep(
    xs: &[f64],
    ws: &[f64],
    evals: &[f64],
    h: f64,
    kernel: &PolyExpKernel,
    want_d: bool,
) -> (Vec<f64>, Option<Vec<f64>>) {
    let n = xs.len();
    let m = evals.len();
    let beta = kernel.beta();
    let gamma = kernel.gamma();
    let binom = binomials(kernel.order());
    let mut ksum = vec![0.0; m];
    let mut dksum = if want_d { vec![0.0; m] } else { Vec::new() };

    // Left pass: sample points with x_i <= x̃, ties included.
    let mut left = Accumulator::new(kernel.order(), &binom);
    let mut i = 0;
    let mut prev: Option<f64> = None;
    let mut tie_value = f64::NAN;
    let mut tie_weight = 0.0;
    for (t, &xe) in evals.iter().enumerate() {
        if let Some(p) = prev {
            left.shift((xe - p) / h);
        }
        prev = Some(xe);
        while i < n && xs[i] <= xe {
            left.add((xe - xs[i]) / h, ws[i]);
            if xs[i] == tie_value {
                tie_weight += ws[i];
            } else {
                tie_value = xs[i];
                tie_weight = ws[i];
            }
            i += 1;
        }
        ksum[t] = left.dot(beta);
        if want_d {
            // K' is odd, so the left side enters with a sign flip. A point
            // coinciding with x̃ sits at K'(0) = 0 and must not contribute -γ₀ω.
            let tie = if tie_value == xe { tie_weight } else { 0.0 };
            dksum[t] = gamma[0] * tie - left.dot(gamma);
        }
    }

    // Right pass: x_i > x̃.
    let mut right = Accumulator::new(kernel.order(), &binom);
    let mut i = n;
    let mut prev: Option<f64> = None;
    for t in (0..m).rev() {
        let xe = evals[t];
        if let Some(p) = prev {
            right.shift((p - xe) / h);
        }
        prev = Some(xe);
        while i > 0 && xs[i - 1] > xe {
            right.add((xs[i - 1] - xe) / h, ws[i - 1]);
            i -= 1;
        }
        ksum[t] += right.dot(beta);
        if want_d {
            dksum[t] += right.dot(gamma);
        }
    }
    (ksum, want_d.then_some(dksum))
}

/// Leave-one-out sums at the sample points, `S(x_i) - K(0)ω_i` and the
/// matching derivative sum, in the sample's original order.
///
/// Point `i` is never added to the accumulators used at its own position, so
/// isolated points do not lose precision to the subtraction.
pub fn fk_sum_loo(sample: &WeightedSample, h: f64, kernel: &PolyExpKernel, mode: SumMode) -> Result<KernelSums> {
    check_bandwidth(h)?;
    let want_d = mode.wants_derivative();
    let (ks, dks) = sweep_loo(sample.sorted_values(), sample.sorted_weights(), h, kernel, want_d);
    Ok(KernelSums {
        ksum: sample.unsort(&ks),
        dksum: dks.map(|d| sample.unsort(&d)),
    })
}

fn sweep_loo(xs: &[f64], ws: &[f64], h: f64, kernel: &PolyExpKernel, want_d: bool) -> (Vec<f64>, Option<Vec<f64>>) {
    let n = xs.len();
    let beta = kernel.beta();
    let gamma = kernel.gamma();
    let binom = binomials(kernel.order());
    let mut ksum = vec![0.0; n];
    let mut dksum = if want_d { vec![0.0; n] } else { Vec::new() };

    // indices below t; earlier ties sit at distance zero and must not add -γ₀ω
    let mut left = Accumulator::new(kernel.order(), &binom);
    let mut tie = 0.0;
    for t in 0..n {
        if t > 0 {
            left.shift((xs[t] - xs[t - 1]) / h);
            if xs[t] != xs[t - 1] {
                tie = 0.0;
            }
        }
        ksum[t] = left.dot(beta);
        if want_d {
            dksum[t] = gamma[0] * tie - left.dot(gamma);
        }
        left.add(0.0, ws[t]);
        tie += ws[t];
    }

    let mut right = Accumulator::new(kernel.order(), &binom);
    let mut tie = 0.0;
    for t in (0..n).rev() {
        if t + 1 < n {
            right.shift((xs[t + 1] - xs[t]) / h);
            if xs[t] != xs[t + 1] {
                tie = 0.0;
            }
        }
        ksum[t] += right.dot(beta);
        if want_d {
            dksum[t] += right.dot(gamma) - gamma[0] * tie;
        }
        right.add(0.0, ws[t]);
        tie += ws[t];
    }
    (ksum, want_d.then_some(dksum))
}

/// Quadratic double loop over all sample and evaluation pairs.
pub fn naive_ksum(
    sample: &WeightedSample,
    h: f64,
    kernel: &PolyExpKernel,
    x_eval: Option<&[f64]>,
    mode: SumMode,
) -> Result<KernelSums> {
    check_bandwidth(h)?;
    let xs = sample.values();
    let ws = sample.weights();
    let own;
    let xe = match x_eval {
        Some(x) => {
            check_eval(x)?;
            x
        }
        None => {
            own = xs.clone();
            &own
        }
    };
    let ksum = xe
        .iter()
        .map(|&e| {
            xs.iter()
                .zip(&ws)
                .map(|(&x, &w)| kernel.eval((x - e) / h) * w)
                .sum()
        })
        .collect();
    let dksum = mode.wants_derivative().then(|| {
        xe.iter()
            .map(|&e| {
                xs.iter()
                    .zip(&ws)
                    .map(|(&x, &w)| kernel.eval_derivative((x - e) / h) * w)
                    .sum()
            })
            .collect()
    });
    Ok(KernelSums { ksum, dksum })
}

/// Linear binning onto `nbin` equally spaced nodes spanning the sample range.
///
/// Each point's weight is split between its two neighbouring nodes in
/// proportion to proximity, preserving total weight and first moment.
pub fn bin_sample(sample: &WeightedSample, nbin: usize) -> Result<WeightedSample> {
    if nbin < 2 {
        return invalid(format!("number of bins must be at least 2, got {nbin}"));
    }
    let xs = sample.sorted_values();
    let ws = sample.sorted_weights();
    let lo = xs[0];
    let hi = xs[xs.len() - 1];
    if hi == lo {
        return WeightedSample::new(vec![lo], vec![sample.total_weight()]);
    }
    let step = (hi - lo) / (nbin - 1) as f64;
    let mut weights = vec![0.0; nbin];
    for (&x, &w) in xs.iter().zip(ws) {
        let pos = (x - lo) / step;
        let j = (pos.floor() as usize).min(nbin - 2);
        let frac = (pos - j as f64).clamp(0.0, 1.0);
        weights[j] += (1.0 - frac) * w;
        weights[j + 1] += frac * w;
    }
    let nodes = (0..nbin)
        .map(|j| if j == nbin - 1 { hi } else { lo + step * j as f64 })
        .collect();
    WeightedSample::new(nodes, weights)
}
