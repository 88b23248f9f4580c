//! Seeded synthetic data generators.
//!
//! The random stream is ChaCha8 seeded from a `u64`. Normal variates come from
//! Box-Muller pairs and exponential variates from the inverse CDF, so a seed
//! reproduces every dataset bit for bit on any platform.

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::Dataset;
use crate::error::{invalid, Result};
use crate::linalg::{dot, norm, Matrix};

pub struct Rng {
    inner: ChaCha8Rng,
    spare: Option<f64>,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng {
            inner: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.inner.random::<u64>() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `(0, 1]`.
    fn uniform_positive(&mut self) -> f64 {
        1.0 - self.uniform()
    }

    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let r = (-2.0 * self.uniform_positive().ln()).sqrt();
        let theta = std::f64::consts::TAU * self.uniform();
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }

    pub fn exponential(&mut self, rate: f64) -> f64 {
        -self.uniform_positive().ln() / rate
    }

    pub fn below(&mut self, n: usize) -> usize {
        ((self.uniform() * n as f64) as usize).min(n - 1)
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }

    /// Student t with three degrees of freedom.
    fn student_t3(&mut self) -> f64 {
        let z = self.normal();
        let chi2: f64 = (0..3).map(|_| self.normal().powi(2)).sum();
        z / (chi2 / 3.0).sqrt()
    }

    /// Beta(2, 2), the median of three uniforms.
    fn beta22(&mut self) -> f64 {
        let mut u = [self.uniform(), self.uniform(), self.uniform()];
        u.sort_by(f64::total_cmp);
        u[1]
    }

    /// Index drawn with the given (unnormalised) probabilities.
    fn categorical(&mut self, probs: &[f64]) -> usize {
        let total: f64 = probs.iter().sum();
        let mut u = self.uniform() * total;
        for (i, p) in probs.iter().enumerate() {
            if u < *p {
                return i;
            }
            u -= p;
        }
        probs.len() - 1
    }

    /// Orthogonal matrix from Gram-Schmidt on a Gaussian matrix.
    fn orthogonal(&mut self, d: usize) -> Matrix {
        let mut cols: Vec<Vec<f64>> = Vec::with_capacity(d);
        while cols.len() < d {
            let mut v: Vec<f64> = (0..d).map(|_| self.normal()).collect();
            for _ in 0..2 {
                for c in &cols {
                    let p = dot(&v, c);
                    v.iter_mut().zip(c).for_each(|(a, b)| *a -= p * b);
                }
            }
            let nv = norm(&v);
            if nv > 1e-8 {
                v.iter_mut().for_each(|a| *a /= nv);
                cols.push(v);
            }
        }
        Matrix::from_columns(&cols).expect("square")
    }
}

/// Which generator to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimKind {
    /// `(2/3)·N(0,1) + (1/3)·(1 + Exp(1))`, one column `x`.
    Bimodal,
    /// `x = 10·Beta(2,2)`, `y = 3 sin 2x + 10(x-5)·1{x>5} + T + (G-1)((x-5)² + 3)`.
    SineKink,
    /// Ten-component Gaussian mixture in `d` dimensions with random means and scales.
    Clusters,
    /// Independent sources from a four-law catalog, randomly mixed.
    Ica,
    /// Two-term nonlinear single-index regression in `d` dimensions.
    Ppr,
    /// `n × d` uniform on the unit cube.
    Uniform,
}

impl std::str::FromStr for SimKind {
    type Err = crate::error::Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "bimodal" => SimKind::Bimodal,
            "sine-kink" | "sinekink" => SimKind::SineKink,
            "clusters" | "mdh" => SimKind::Clusters,
            "ica" => SimKind::Ica,
            "ppr" => SimKind::Ppr,
            "uniform" => SimKind::Uniform,
            other => return invalid(format!("unknown simulation kind {other:?}")),
        })
    }
}

/// Ground truth accompanying a simulated dataset.
#[derive(Debug, Clone)]
pub enum Truth {
    None,
    /// Generating mixture component of every row.
    Labels(Vec<usize>),
    /// The data matrix equals `sources · mixingᵀ`.
    Mixing { mixing: Matrix, sources: Matrix },
    /// Generating projection vectors of each term.
    Directions(Vec<Vec<f64>>),
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub data: Dataset,
    pub truth: Truth,
}

pub const CLUSTER_COMPONENTS: usize = 10;

/// Runs a generator. `d` is ignored by the univariate kinds.
///
/// For [`SimKind::Ica`] the observed rows are `x_i = A s_i`, i.e. the data
/// matrix is `S·Aᵀ`, where `A` is the returned mixing matrix. Its singular
/// values are uniform on `[1, 2]`.
pub fn simulate(kind: SimKind, n: usize, d: usize, seed: u64) -> Result<Simulation> {
    if n == 0 {
        return invalid("need at least one row");
    }
    let mut rng = Rng::new(seed);
    let named = |prefix: &str, d: usize| (1..=d).map(|j| format!("{prefix}{j}")).collect::<Vec<_>>();
    match kind {
        SimKind::Bimodal => {
            let x = (0..n)
                .map(|_| {
                    if rng.uniform() < 2.0 / 3.0 {
                        rng.normal()
                    } else {
                        1.0 + rng.exponential(1.0)
                    }
                })
                .collect();
            Ok(Simulation {
                data: Dataset::new(vec!["x".into()], vec![x])?,
                truth: Truth::None,
            })
        }
        SimKind::SineKink => {
            let mut xs = Vec::with_capacity(n);
            let mut ys = Vec::with_capacity(n);
            for _ in 0..n {
                let x = 10.0 * rng.beta22();
                let t = rng.student_t3();
                let g = rng.exponential(2.0) + rng.exponential(2.0);
                ys.push(sine_kink(x) + t + (g - 1.0) * ((x - 5.0).powi(2) + 3.0));
                xs.push(x);
            }
            Ok(Simulation {
                data: Dataset::new(vec!["x".into(), "y".into()], vec![xs, ys])?,
                truth: Truth::None,
            })
        }
        SimKind::Clusters => {
            check_dim(d)?;
            let k = CLUSTER_COMPONENTS;
            let means: Vec<Vec<f64>> = (0..k).map(|_| (0..d).map(|_| rng.uniform()).collect()).collect();
            let sds: Vec<Vec<f64>> = (0..k)
                .map(|_| (0..d).map(|_| rng.exponential(1.0) / 7.0).collect())
                .collect();
            let probs: Vec<f64> = (0..k).map(|_| rng.uniform() + 0.1).collect();
            let mut cols = vec![Vec::with_capacity(n); d];
            let mut labels = Vec::with_capacity(n);
            for _ in 0..n {
                let c = rng.categorical(&probs);
                labels.push(c);
                for j in 0..d {
                    cols[j].push(means[c][j] + sds[c][j] * rng.normal());
                }
            }
            Ok(Simulation {
                data: Dataset::new(named("x", d), cols)?,
                truth: Truth::Labels(labels),
            })
        }
        SimKind::Ica => {
            check_dim(d)?;
            let mut sources = Matrix::zeros(n, d);
            for j in 0..d {
                let law = SourceLaw::CATALOG[j % SourceLaw::CATALOG.len()];
                for i in 0..n {
                    sources[(i, j)] = law.sample(&mut rng);
                }
            }
            let u = rng.orthogonal(d);
            let v = rng.orthogonal(d);
            let mut s = Matrix::zeros(d, d);
            for j in 0..d {
                s[(j, j)] = 1.0 + rng.uniform();
            }
            let mixing = u.matmul(&s)?.matmul(&v.transpose())?;
            let x = sources.matmul(&mixing.transpose())?;
            let cols = (0..d).map(|j| x.column(j)).collect();
            Ok(Simulation {
                data: Dataset::new(named("x", d), cols)?,
                truth: Truth::Mixing { mixing, sources },
            })
        }
        SimKind::Ppr => {
            check_dim(d)?;
            let mut m = Matrix::zeros(d, d);
            for a in 0..d {
                for b in 0..d {
                    m[(a, b)] = 2.0 * rng.uniform() - 1.0;
                }
            }
            let mut z = Matrix::zeros(n, d);
            for i in 0..n {
                for j in 0..d {
                    z[(i, j)] = rng.normal();
                }
            }
            let x = z.matmul(&m)?;
            let w1: Vec<f64> = (0..d).map(|_| rng.normal()).collect();
            let w2: Vec<f64> = (0..d).map(|_| rng.normal()).collect();
            // population sd of x·w is ‖M w‖
            let s1 = norm(&m.mul_vec(&w1));
            let s2 = norm(&m.mul_vec(&w2));
            let p1 = x.mul_vec(&w1);
            let p2 = x.mul_vec(&w2);
            let y: Vec<f64> = (0..n)
                .map(|i| ppr_signal(p1[i] / s1, p2[i] / s2) + PPR_NOISE_SD * rng.normal())
                .collect();
            let mut cols: Vec<Vec<f64>> = (0..d).map(|j| x.column(j)).collect();
            cols.push(y);
            let mut names = named("x", d);
            names.push("y".into());
            Ok(Simulation {
                data: Dataset::new(names, cols)?,
                truth: Truth::Directions(vec![w1, w2]),
            })
        }
        SimKind::Uniform => {
            check_dim(d)?;
            let cols = (0..d).map(|_| (0..n).map(|_| rng.uniform()).collect()).collect();
            Ok(Simulation {
                data: Dataset::new(named("x", d), cols)?,
                truth: Truth::None,
            })
        }
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        return invalid("need at least one dimension");
    }
    Ok(())
}

/// `3 sin 2x + 10 (x - 5)·1{x > 5}`.
pub fn sine_kink(x: f64) -> f64 {
    3.0 * (2.0 * x).sin() + if x > 5.0 { 10.0 * (x - 5.0) } else { 0.0 }
}

pub const PPR_NOISE_SD: f64 = 0.5;

/// Noise-free response of the PPR generator given standardised projections.
pub fn ppr_signal(t1: f64, t2: f64) -> f64 {
    2.0 * t1.tanh() + (0.5 * t2).exp()
}

/// Standardised (zero mean, unit variance) source laws for ICA simulations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceLaw {
    Uniform,
    Laplace,
    /// Equal mixture of `N(±1.5, 0.5²)`.
    Bimodal,
    Exponential,
}

impl SourceLaw {
    pub const CATALOG: [SourceLaw; 4] = [
        SourceLaw::Uniform,
        SourceLaw::Laplace,
        SourceLaw::Bimodal,
        SourceLaw::Exponential,
    ];

    pub fn sample(self, rng: &mut Rng) -> f64 {
        match self {
            SourceLaw::Uniform => (rng.uniform() - 0.5) * 12f64.sqrt(),
            SourceLaw::Laplace => {
                let e = rng.exponential(1.0) / std::f64::consts::SQRT_2;
                if rng.uniform() < 0.5 {
                    -e
                } else {
                    e
                }
            }
            SourceLaw::Bimodal => {
                let c = if rng.uniform() < 0.5 { -1.5 } else { 1.5 };
                (c + 0.5 * rng.normal()) / 2.5f64.sqrt()
            }
            SourceLaw::Exponential => rng.exponential(1.0) - 1.0,
        }
    }
}
