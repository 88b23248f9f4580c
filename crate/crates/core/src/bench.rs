//! Benchmark harness: scaling of the fast sum against the quadratic
//! oracle, and seeded desk-scale replicas of the projection pursuit studies.

use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::fastsum::{fk_sum, naive_ksum, SumMode, WeightedSample};
use crate::kernel::PolyExpKernel;
use crate::linalg::Matrix;
use crate::metrics::{amari_distance, cluster_separation_error, r_squared};
use crate::pursuit::{ica_fit, mdh_fit, ppr_fit, IcaOptions, MdhOptions, PprOptions, ProjectedSample};
use crate::simulate::{simulate, Rng, SimKind, Truth};

/// Largest sample size timed with the naive double loop.
pub const NAIVE_CAP: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub method: String,
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    pub wall_time_seconds: f64,
    pub metric: String,
    pub value: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
}

/// Mean metric and mean time over the records sharing method, metric, n and d.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchSummary {
    pub method: String,
    pub metric: String,
    pub n: usize,
    pub d: usize,
    pub cases: usize,
    pub mean_value: f64,
    pub mean_time: f64,
}

impl BenchReport {
    pub fn push(&mut self, method: &str, n: usize, d: usize, seed: u64, secs: f64, metric: &str, value: f64) {
        self.records.push(BenchRecord {
            method: method.into(),
            n,
            d,
            seed,
            wall_time_seconds: secs,
            metric: metric.into(),
            value,
        });
    }

    pub fn values(&self, method: &str, metric: &str) -> Vec<f64> {
        self.select(method, metric).map(|r| r.value).collect()
    }

    pub fn select<'a>(&'a self, method: &'a str, metric: &'a str) -> impl Iterator<Item = &'a BenchRecord> + 'a {
        self.records.iter().filter(move |r| r.method == method && r.metric == metric)
    }

    pub fn summary(&self) -> Vec<BenchSummary> {
        let mut out: Vec<BenchSummary> = Vec::new();
        for r in &self.records {
            let key = |s: &BenchSummary| s.method == r.method && s.metric == r.metric && s.n == r.n && s.d == r.d;
            match out.iter_mut().find(|s| key(s)) {
                Some(s) => {
                    s.cases += 1;
                    s.mean_value += r.value;
                    s.mean_time += r.wall_time_seconds;
                }
                None => out.push(BenchSummary {
                    method: r.method.clone(),
                    metric: r.metric.clone(),
                    n: r.n,
                    d: r.d,
                    cases: 1,
                    mean_value: r.value,
                    mean_time: r.wall_time_seconds,
                }),
            }
        }
        for s in &mut out {
            s.mean_value /= s.cases as f64;
            s.mean_time /= s.cases as f64;
        }
        out
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        if self.records.is_empty() {
            w.write_record(["method", "n", "d", "seed", "wall_time_seconds", "metric", "value"])?;
        }
        for r in &self.records {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Plain-text table of [`summary`](Self::summary).
    pub fn table(&self) -> String {
        let mut s = format!(
            "{:<12} {:<18} {:>8} {:>4} {:>6} {:>14} {:>12}\n",
            "method", "metric", "n", "d", "cases", "mean", "mean time"
        );
        for r in self.summary() {
            s.push_str(&format!(
                "{:<12} {:<18} {:>8} {:>4} {:>6} {:>14.6} {:>11.4}s\n",
                r.method, r.metric, r.n, r.d, r.cases, r.mean_value, r.mean_time
            ));
        }
        s
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let t = Instant::now();
    let v = f()?;
    Ok((v, t.elapsed().as_secs_f64()))
}

/// Times the exact sum at every sample point (sorting included) and, for
/// `n ≤ NAIVE_CAP`, the naive double loop. Each size gets a `seconds` record
/// (median of `repetitions`) and, from the second size on, a `doubling_ratio`
/// record normalised to a doubling of `n`.
///
/// Repetitions are interleaved across sizes after one untimed warm-up pass,
/// so a burst of machine load lands in one repetition of several sizes
/// rather than in every repetition of one size.
pub fn bench_scaling(sizes: &[usize], kernel: &PolyExpKernel, repetitions: usize, seed: u64) -> Result<BenchReport> {
    if sizes.is_empty() || sizes.windows(2).any(|w| w[0] >= w[1]) || sizes[0] == 0 {
        return invalid("sizes must be positive and strictly ascending");
    }
    if repetitions == 0 {
        return invalid("need at least one repetition");
    }
    let data: Vec<(Vec<f64>, f64)> = sizes
        .iter()
        .map(|&n| {
            let mut rng = Rng::new(seed);
            let x: Vec<f64> = (0..n).map(|_| rng.uniform()).collect();
            (x, 0.1 / (n as f64).powf(0.2))
        })
        .collect();
    let methods = ["fast", "naive"];
    let run = |method: &str, x: &[f64], h: f64| -> Result<f64> {
        let (_, t) = timed(|| {
            let s = WeightedSample::uniform(x.to_vec())?;
            let r = if method == "fast" {
                fk_sum(&s, h, kernel, None, SumMode::Sum, None)?
            } else {
                naive_ksum(&s, h, kernel, None, SumMode::Sum)?
            };
            Ok(std::hint::black_box(r))
        })?;
        Ok(t)
    };
    let mut times = vec![vec![Vec::with_capacity(repetitions); methods.len()]; sizes.len()];
    for rep in 0..=repetitions {
        for (i, (x, h)) in data.iter().enumerate() {
            for (m, method) in methods.iter().enumerate() {
                if *method == "naive" && x.len() > NAIVE_CAP {
                    continue;
                }
                let t = run(method, x, *h)?;
                if rep > 0 {
                    times[i][m].push(t);
                }
            }
        }
    }
    let mut report = BenchReport::default();
    for (m, method) in methods.iter().enumerate() {
        let mut last: Option<(usize, f64)> = None;
        for (i, &n) in sizes.iter().enumerate() {
            if times[i][m].is_empty() {
                continue;
            }
            let t = median(times[i][m].clone());
            report.push(method, n, 1, seed, t, "seconds", t);
            if let Some((n0, t0)) = last {
                let ratio = (t / t0).powf(1.0 / (n as f64 / n0 as f64).log2());
                report.push(method, n, 1, seed, t, "doubling_ratio", ratio);
            }
            last = Some((n, t));
        }
    }
    Ok(report)
}

/// ICA on mixed catalog sources: Amari distance of the fitted unmixing to the
/// inverse mixing matrix.
pub fn bench_ica(seeds: &[u64], n: usize, d: usize, opts: &IcaOptions) -> Result<BenchReport> {
    let mut report = BenchReport::default();
    for &seed in seeds {
        let sim = simulate(SimKind::Ica, n, d, seed)?;
        let Truth::Mixing { mixing, .. } = &sim.truth else {
            unreachable!("ICA generator returns its mixing matrix")
        };
        let x = sim.data.to_matrix();
        let (model, t) = timed(|| ica_fit(&x, d, opts))?;
        let amari = amari_distance(&model.total_unmixing().transpose(), &mixing.inverse()?)?;
        report.push("fk_ica", n, d, seed, t, "amari", amari);
    }
    Ok(report)
}

/// Minimum density hyperplanes on ten-cluster mixtures. Records the cluster
/// separation error and `f̂(b) - f̂(μ)` on the final projection.
pub fn bench_mdh(seeds: &[u64], n: usize, d: usize, opts: &MdhOptions) -> Result<BenchReport> {
    let mut report = BenchReport::default();
    for &seed in seeds {
        let sim = simulate(SimKind::Clusters, n, d, seed)?;
        let Truth::Labels(labels) = &sim.truth else {
            unreachable!("cluster generator returns labels")
        };
        let x = sim.data.to_matrix();
        let (model, t) = timed(|| mdh_fit(&x, opts))?;
        let side = model.side(&x)?;
        report.push("fk_mdh", n, d, seed, t, "separation_error", cluster_separation_error(labels, &side)?);
        let proj = ProjectedSample::new(x.mul_vec(&model.v))?;
        let f_mu = crate::pursuit::mdh_penalized_density(&proj, proj.mean, model.h, &model.kernel, 0.0, 0.0)?;
        report.push("fk_mdh", n, d, seed, t, "density_gap", model.density_at_b - f_mu);
        report.push("fk_mdh", n, d, seed, t, "separating", f64::from(u8::from(model.separating)));
    }
    Ok(report)
}

/// Projection pursuit regression on the two-term generator, first half for
/// training and second half held out. Records held-out R² and the training
/// SSE after each number of terms (`train_sse_0` is the mean-only fit).
pub fn bench_ppr(seeds: &[u64], n: usize, d: usize, nterms: usize, opts: &PprOptions) -> Result<BenchReport> {
    if n < 40 {
        return invalid("need at least 40 rows for a train/test split");
    }
    let mut report = BenchReport::default();
    for &seed in seeds {
        let sim = simulate(SimKind::Ppr, n, d, seed)?;
        let all = sim.data.to_matrix();
        let ntr = n / 2;
        let rows = |lo: usize, hi: usize| -> Result<Matrix> {
            Matrix::new(hi - lo, d, (lo..hi).flat_map(|i| all.row(i)[..d].to_vec()).collect())
        };
        let (xtr, xte) = (rows(0, ntr)?, rows(ntr, n)?);
        let y = sim.data.column(d);
        let (ytr, yte) = (&y[..ntr], &y[ntr..]);
        let (model, t) = timed(|| ppr_fit(&xtr, ytr, nterms, opts))?;
        let pred = model.predict_terms(&xte, nterms)?;
        report.push("fk_ppr", n, d, seed, t, "r2_test", r_squared(yte, &pred)?);
        for k in 0..=nterms {
            let f = model.predict_terms(&xtr, k)?;
            let sse = ytr.iter().zip(&f).map(|(a, b)| (a - b).powi(2)).sum();
            report.push("fk_ppr", n, d, seed, t, &format!("train_sse_{k}"), sse);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{read_csv, CsvOptions};

    #[test]
    fn scaling_report_shape_and_csv() {
        let r = bench_scaling(&[500, 1000, 2000], &PolyExpKernel::default(), 3, 1).unwrap();
        assert_eq!(r.values("fast", "seconds").len(), 3);
        assert_eq!(r.values("naive", "doubling_ratio").len(), 2);
        assert!(r.records.iter().all(|x| x.wall_time_seconds >= 0.0));
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let cols: Vec<String> = ["n", "d", "seed", "wall_time_seconds", "value"].iter().map(|s| s.to_string()).collect();
        let ds = read_csv(&buf[..], &CsvOptions { columns: Some(cols) }).unwrap();
        assert_eq!(ds.nrows(), r.records.len());
        for (i, rec) in r.records.iter().enumerate() {
            assert_eq!(ds.column(3)[i], rec.wall_time_seconds);
            assert_eq!(ds.column(4)[i], rec.value);
        }
        assert!(bench_scaling(&[10, 5], &PolyExpKernel::default(), 1, 1).is_err());
    }

    #[test]
    fn seeded_metrics_reproduce() {
        let opts = IcaOptions { it: 3, ..IcaOptions::default() };
        let a = bench_ica(&[3], 300, 2, &opts).unwrap();
        let b = bench_ica(&[3], 300, 2, &opts).unwrap();
        assert_eq!(a.values("fk_ica", "amari"), b.values("fk_ica", "amari"));
        assert!(a.table().contains("amari"));
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
