//! Randomized low-rank approximation of large real matrices.
//!
//! The crate bundles the pieces a low-rank compression study needs:
//!
//! * dense/sparse kernels and factorizations (`dense`, `sparse`, `qr`,
//!   `svd`, `pinv`, `solve`);
//! * randomized sketching operators with seeded determinism (`sketch`);
//! * approximation schemes built on them (`approx`): randomized SVD,
//!   generalized Nystrom and its stabilized / row-and-column / column
//!   sketching variants, classical Nystrom for SPSD inputs, and a
//!   randomized rank-revealing URV;
//! * closed-form expected-error bounds used as oracles (`bounds`);
//! * synthetic test-matrix generators with known spectra (`testgen`);
//! * Matrix Market ingestion and emission (`mmio`);
//! * a sweep harness for error/runtime experiments (`bench`).

mod dct;

pub mod approx;
pub mod bench;
pub mod bounds;
pub mod dense;
pub mod error;
pub mod mmio;
pub mod pinv;
pub mod qr;
pub mod rng;
pub mod sketch;
pub mod solve;
pub mod sparse;
pub mod svd;
pub mod testgen;

pub use dense::DenseMatrix;
pub use error::{Error, Result};
pub use sparse::{AnyMatrix, SparseMatrix};
