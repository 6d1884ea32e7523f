#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod field;
pub mod gmc;
pub mod kernel;
pub mod linalg;
pub mod moments;
pub mod quadrature;
pub mod rng;
pub mod sampler;
pub mod stats;

pub use error::{Error, Result};
pub use rng::SeedStream;
pub use sampler::{Backend, DiskSample, EigenSample};
