//! Measures on partitions with Jack parameter 2 and the Pfaffian
//! correlation kernels of the associated point processes.

pub mod error;
pub mod kernels;
pub mod measures;
pub mod oracle;
pub mod partitions;
pub mod pfaffian;
pub mod scalar;
pub mod special;
pub mod specializations;

pub use error::{Error, Result};
pub use kernels::{
    KernelFamily, KernelSettings, KernelSource, KernelValue, MatrixKernel2x2, Route, ScalarKernel, TabulatedKernel,
};
pub use partitions::Partition;
pub use pfaffian::{AntisymmetricMatrix, CorrelationQuery};
pub use specializations::Specialization;
