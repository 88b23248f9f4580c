//! Evaluation metrics for the benchmark harness.

use crate::error::{invalid, Result};
use crate::linalg::Matrix;

/// Amari distance between unmixing `a` and the inverse of mixing `b`, on `[0, 1]`.
///
/// With `P = A·B⁻¹`, the row and column "distance from a scaled permutation"
/// sums are averaged and divided by `d - 1`. Zero iff `P` is a scaled
/// permutation.
pub fn amari_distance(a: &Matrix, b: &Matrix) -> Result<f64> {
    if a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows() {
        return invalid(format!(
            "Amari distance needs two square matrices of equal size, got {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        ));
    }
    let d = a.rows();
    if d < 2 {
        return Ok(0.0);
    }
    let p = a.matmul(&b.inverse()?)?;
    let mut rows = 0.0;
    let mut cols = 0.0;
    for i in 0..d {
        let r: Vec<f64> = (0..d).map(|j| p[(i, j)].abs()).collect();
        let c: Vec<f64> = (0..d).map(|j| p[(j, i)].abs()).collect();
        rows += ratio(&r);
        cols += ratio(&c);
    }
    let raw = (rows + cols) / (2.0 * d as f64);
    Ok(raw / (d as f64 - 1.0))
}

fn ratio(v: &[f64]) -> f64 {
    let max = v.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return v.len() as f64 - 1.0;
    }
    v.iter().sum::<f64>() / max - 1.0
}

/// Fraction of rows on the "wrong" side of a split, minimised over both
/// ways of matching the two labels to the two sides. Lies in `[0, 0.5]`.
pub fn separation_error(labels: &[usize], side: &[bool]) -> Result<f64> {
    if labels.len() != side.len() {
        return invalid(format!("{} labels but {} side assignments", labels.len(), side.len()));
    }
    let mut distinct: Vec<usize> = labels.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() != 2 {
        return invalid(format!("separation error needs exactly two labels, found {}", distinct.len()));
    }
    let first = distinct[0];
    let agree = labels.iter().zip(side).filter(|(l, s)| (**l == first) == **s).count();
    let n = labels.len();
    Ok(agree.min(n - agree) as f64 / n as f64)
}

/// Binary labels for a split of multi-cluster data: each cluster joins the
/// side holding most of its points (ties go to `false`).
pub fn majority_side_labels(clusters: &[usize], side: &[bool]) -> Result<Vec<usize>> {
    if clusters.len() != side.len() {
        return invalid(format!("{} labels but {} side assignments", clusters.len(), side.len()));
    }
    let k = clusters.iter().copied().max().map_or(0, |m| m + 1);
    let mut count = vec![(0usize, 0usize); k];
    for (&c, &s) in clusters.iter().zip(side) {
        if s {
            count[c].1 += 1;
        } else {
            count[c].0 += 1;
        }
    }
    Ok(clusters.iter().map(|&c| usize::from(count[c].1 > count[c].0)).collect())
}

/// Separation error of a hyperplane on clustered data. Clusters are mapped
/// to sides by majority, so the value counts points split away from the
/// bulk of their own cluster. If every cluster lands on one side, the
/// smaller side's share is returned instead.
pub fn cluster_separation_error(clusters: &[usize], side: &[bool]) -> Result<f64> {
    let binary = majority_side_labels(clusters, side)?;
    if binary.iter().all(|&b| b == binary[0]) {
        let right = side.iter().filter(|&&s| s).count();
        return Ok(right.min(side.len() - right) as f64 / side.len() as f64);
    }
    separation_error(&binary, side)
}

/// `1 - Σ(y - ŷ)² / Σ(y - ȳ)²`.
pub fn r_squared(y: &[f64], fitted: &[f64]) -> Result<f64> {
    if y.len() != fitted.len() || y.is_empty() {
        return invalid("R² needs equal, non-empty response and prediction vectors");
    }
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let sst: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let sse: f64 = y.iter().zip(fitted).map(|(a, b)| (a - b).powi(2)).sum();
    if sst == 0.0 {
        return invalid("R² undefined for a constant response");
    }
    Ok(1.0 - sse / sst)
}
