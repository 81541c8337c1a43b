//! Spectral diagnostics for kernel ridge regression.
//!
//! The library decomposes a training kernel once and reuses the eigenpairs
//! for everything else: fitting, reconstruction/generalization error
//! decompositions, target alignment profiles and matrix-perturbation bounds
//! on generalization. A config-driven harness (see [`harness`] and the
//! `kernspec` binary) wires the pieces into reproducible experiments.

pub mod data;
pub mod harness;
pub mod diagnostics;
pub mod kernels;
pub mod krr;
pub mod linalg;
pub mod targets;

pub use kernels::{KernelFamily, KernelMatrix, KernelSpec};
pub use krr::{ErrorMetric, KrrModel};
pub use linalg::{EigenDecomposition, SymMatrix};
pub use targets::TargetSpec;
