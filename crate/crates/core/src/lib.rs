//! Exact kernel sums for poly-exponential kernels in `O(n log n)` time,
//! and the smoothing and projection pursuit methods built on them.
//!
//! ```
//! use fksum::{fk_sum, PolyExpKernel, SumMode, WeightedSample};
//!
//! let sample = WeightedSample::uniform(vec![0.3, -1.2, 2.0, 0.1]).unwrap();
//! let sums = fk_sum(&sample, 0.5, &PolyExpKernel::default(), Some(&[0.0, 1.0]), SumMode::Both, None).unwrap();
//! assert_eq!(sums.ksum.len(), 2);
//! ```

pub mod bench;
pub mod data;
pub mod error;
pub mod fastsum;
pub mod kernel;
pub mod linalg;
pub mod metrics;
pub mod optim;
pub mod pursuit;
pub mod simulate;
pub mod smoothers;

pub use error::{Error, Result};
pub use fastsum::{fk_sum, naive_ksum, KernelSums, SumMode, WeightedSample};
pub use kernel::{kernel_constants, smooth_kernel, KernelConstants, PolyExpKernel};
pub use smoothers::{BandwidthSpec, DensityEstimate, RegressionEstimate, RegressionMethod};
pub use pursuit::{ica_fit, mdh_fit, ppr_fit, ppr_predict, IcaModel, MdhModel, PprModel};
