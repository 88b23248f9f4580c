use std::io::Write;
use std::path::Path;

use fksum::bench::{bench_ica, bench_mdh, bench_ppr, bench_scaling, BenchReport};
use fksum::data::{load_csv, write_csv, CsvOptions, Dataset};
use fksum::fastsum::{fk_sum, SumMode, WeightedSample};
use fksum::kernel::{kernel_curve, PolyExpKernel};
use fksum::linalg::Matrix;
use fksum::pursuit::{
    ica_fit, load_json, mdh_fit, ppr_fit, ppr_predict, save_json, IcaOptions, MdhOptions, PprModel, PprOptions,
};
use fksum::simulate::{simulate, SimKind};
use fksum::smoothers::{kde_binned, regression, BandwidthSpec, RegressionMethod};
use fksum::{Error, Result};

use crate::{BandwidthArgs, BenchCmd, Cli, Command, Format, KernelArg, KernelCmd, PprCmd};

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Kernel(KernelCmd::Curve { kernel, n }) => {
            let curve = kernel_curve(&kernel.parse()?, *n)?;
            let (u, f) = curve.into_iter().unzip();
            emit(cli, &Dataset::new(names(&["u", "density"]), vec![u, f])?)
        }
        Command::Kernel(KernelCmd::Constants { kernel }) => {
            let c = kernel.parse()?.constants();
            let ds = Dataset::new(
                names(&["normalizer", "variance", "roughness"]),
                vec![vec![c.normalizer], vec![c.variance], vec![c.roughness]],
            )?;
            emit(cli, &ds)
        }
        Command::Sum(a) => {
            let data = load(&a.data)?;
            let x = data.column(data.resolve(&a.col)?).to_vec();
            let sample = match &a.weights {
                Some(col) => WeightedSample::new(x.clone(), data.column(data.resolve(col)?).to_vec())?,
                None => WeightedSample::uniform(x.clone())?,
            };
            let mode: SumMode = a.mode.parse()?;
            let xe = match &a.eval {
                Some(path) => load(path)?.column(0).to_vec(),
                None => x,
            };
            let sums = fk_sum(&sample, a.h, &a.kernel.parse()?, Some(&xe), mode, a.nbin)?;
            let mut cols = vec!["x_eval"];
            let mut values = vec![xe];
            if mode != SumMode::DSum {
                cols.push("ksum");
                values.push(sums.ksum);
            }
            if let Some(d) = sums.dksum {
                cols.push("dksum");
                values.push(d);
            }
            emit(cli, &Dataset::new(names(&cols), values)?)
        }
        Command::Density(a) => {
            let data = load(&a.data)?;
            let x = data.column(data.resolve(&a.col)?);
            let kernel = a.kernel.parse()?;
            let h = a.bandwidth.spec()?.resolve_density(x, &kernel)?;
            let (lo, hi) = range(x);
            let grid = linspace(lo - 3.0 * h, hi + 3.0 * h, a.grid)?;
            let est = kde_binned(x, h, &kernel, Some(&grid), a.nbin)?;
            eprintln!("bandwidth {h}");
            emit(cli, &Dataset::new(names(&["x", "density"]), vec![est.eval_points, est.density])?)
        }
        Command::Regress(a) => {
            let data = load(&a.data)?;
            let x = data.column(data.resolve(&a.x)?);
            let y = data.column(data.resolve(&a.y)?);
            let kernel = a.kernel.parse()?;
            let method: RegressionMethod = a.method.parse()?;
            let h = a.bandwidth.spec()?.resolve_regression(x, y, &kernel)?;
            let (lo, hi) = range(x);
            let grid = linspace(lo, hi, a.grid)?;
            let est = regression(method, x, y, h, &kernel, Some(&grid))?;
            eprintln!("bandwidth {h}");
            emit(cli, &Dataset::new(names(&["x", "fitted"]), vec![est.eval_points, est.fitted])?)
        }
        Command::Ica(a) => {
            let x = matrix(&load(&a.data)?, a.cols.as_deref())?;
            let opts = IcaOptions { hmult: a.hmult, it: a.it, nbin: a.nbin, kernel: a.kernel.parse()? };
            let model = ica_fit(&x, a.ncomp, &opts)?;
            let out = cli.out.as_deref().unwrap_or("");
            let mut paths = out.split(',').filter(|p| !p.is_empty());
            match paths.next() {
                Some(p) => save_json(p, &model)?,
                None => print_json(&model)?,
            }
            if let Some(p) = paths.next() {
                let cols = (1..=model.sources.cols()).map(|j| format!("s{j}")).collect();
                let ds = Dataset::from_matrix(cols, &model.sources)?;
                write_csv(std::fs::File::create(p)?, &ds)?;
            }
            Ok(())
        }
        Command::Mdh(a) => {
            let x = matrix(&load(&a.data)?, a.cols.as_deref())?;
            let c = match a.c.as_str() {
                "auto" => None,
                s => Some(parse_f64(s, "--C")?),
            };
            let opts = MdhOptions {
                hmult: a.hmult,
                alphamax: a.alphamax,
                c,
                kernel: a.kernel.parse()?,
                max_iter: a.max_iter,
                ..MdhOptions::default()
            };
            let model = mdh_fit(&x, &opts)?;
            if !model.separating {
                eprintln!("warning: no separating hyperplane found, returning the unpenalised fit");
            }
            write_model(cli, &model)
        }
        Command::Ppr(PprCmd::Fit { data, y, cols, nterms, max_iter, kernel }) => {
            let data = load(data)?;
            let yj = data.resolve(y)?;
            let idx = match cols {
                Some(c) => resolve_all(&data, c)?,
                None => data.without(yj),
            };
            let opts = PprOptions { kernel: kernel.parse()?, max_iter: *max_iter, ..PprOptions::default() };
            let model = ppr_fit(&data.select(&idx), data.column(yj), *nterms, &opts)?;
            write_model(cli, &model)
        }
        Command::Ppr(PprCmd::Predict { model, data, cols }) => {
            let model: PprModel = load_json(model)?;
            let x = matrix(&load(data)?, cols.as_deref())?;
            let pred = ppr_predict(&model, &x)?;
            emit(cli, &Dataset::new(names(&["prediction"]), vec![pred])?)
        }
        Command::Bench(b) => {
            let report = bench(b, cli.seed)?;
            let mut w = sink(cli)?;
            match cli.format {
                Format::Csv => report.write_csv(w)?,
                Format::Table => {
                    w.write_all(report.table().as_bytes())?;
                    w.flush()?;
                }
            }
            Ok(())
        }
        Command::Simulate(a) => {
            let kind: SimKind = a.kind.parse()?;
            emit(cli, &simulate(kind, a.n, a.d, cli.seed)?.data)
        }
    }
}

fn bench(cmd: &BenchCmd, seed: u64) -> Result<BenchReport> {
    let seeds = |k: u64| (seed..seed + k).collect::<Vec<_>>();
    match cmd {
        BenchCmd::Scaling { sizes, repetitions, kernel } => {
            let sizes = sizes
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::InvalidArgument(format!("bad size {s:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            bench_scaling(&sizes, &kernel.parse()?, *repetitions, seed)
        }
        BenchCmd::Ica { seeds: k, n, d } => bench_ica(&seeds(*k), *n, *d, &IcaOptions::default()),
        BenchCmd::Mdh { seeds: k, n, d } => bench_mdh(&seeds(*k), *n, *d, &MdhOptions::default()),
        BenchCmd::Ppr { seeds: k, n, d, nterms } => bench_ppr(&seeds(*k), *n, *d, *nterms, &PprOptions::default()),
    }
}

impl KernelArg {
    fn parse(&self) -> Result<PolyExpKernel> {
        PolyExpKernel::parse(&self.beta)
    }
}

impl BandwidthArgs {
    fn spec(&self) -> Result<BandwidthSpec> {
        if let Some(h) = self.h {
            return Ok(BandwidthSpec::Fixed(h));
        }
        if let Some(m) = self.silverman {
            return Ok(BandwidthSpec::Silverman(m));
        }
        let bracket = match &self.bracket {
            None => None,
            Some(s) => match s.split_once(',') {
                Some((lo, hi)) => Some((parse_f64(lo, "--bracket")?, parse_f64(hi, "--bracket")?)),
                None => return Err(Error::InvalidArgument(format!("--bracket wants lo,hi, got {s:?}"))),
            },
        };
        Ok(BandwidthSpec::Cv(bracket))
    }
}

fn parse_f64(s: &str, flag: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("{flag}: {s:?} is not a number")))
}

fn names(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|s| s.to_string()).collect()
}

fn load(path: &Path) -> Result<Dataset> {
    load_csv(path, &CsvOptions::default())
}

fn resolve_all(data: &Dataset, cols: &str) -> Result<Vec<usize>> {
    cols.split(',').map(|c| data.resolve(c.trim())).collect()
}

fn matrix(data: &Dataset, cols: Option<&str>) -> Result<Matrix> {
    Ok(match cols {
        Some(c) => data.select(&resolve_all(data, c)?),
        None => data.to_matrix(),
    })
}

fn range(x: &[f64]) -> (f64, f64) {
    x.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)))
}

fn linspace(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("grid needs at least 2 points, got {n}")));
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n).map(|i| lo + step * i as f64).collect())
}

fn sink(cli: &Cli) -> Result<Box<dyn Write>> {
    Ok(match &cli.out {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn emit(cli: &Cli, data: &Dataset) -> Result<()> {
    let mut w = sink(cli)?;
    match cli.format {
        Format::Csv => write_csv(w, data),
        Format::Table => {
            let row = |cells: Vec<String>| cells.iter().map(|c| format!("{c:>16}")).collect::<Vec<_>>().join(" ");
            writeln!(w, "{}", row(data.names().to_vec()))?;
            for i in 0..data.nrows() {
                writeln!(w, "{}", row((0..data.ncols()).map(|j| format!("{:.8}", data.column(j)[i])).collect()))?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

fn print_json<T: serde::Serialize>(model: &T) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, model)?;
    writeln!(out)?;
    Ok(())
}

fn write_model<T: serde::Serialize>(cli: &Cli, model: &T) -> Result<()> {
    match &cli.out {
        Some(p) => save_json(p, model),
        None => print_json(model),
    }
}
