//! Frames, semi-frames and frames of subspaces at finite truncation.
//!
//! A family `Ψ = (ψ_k)` is stored as the `d x N` matrix of its columns, which is
//! also its synthesis operator `D`. The analysis operator is `C = D*`, the frame
//! operator `S = D C` and the Gram matrix `G = C D`. Inverses and square roots go
//! through a Hermitian eigendecomposition with a relative rank cutoff, so an
//! unbounded inverse in the infinite-dimensional setting shows up as cut
//! eigenvalues at truncation.

pub mod cli;
pub mod dual_recon;
pub mod error;
pub mod family;
pub mod frame_ops;
pub mod fusion;
pub mod generators;
pub mod report;
pub mod spectral;

pub use error::{FrameError, Result};
pub use family::{FamilyGenerator, FamilyMatrix, TruncationSweep};
pub use frame_ops::{FrameDiagnostics, Verdict};
pub use spectral::{CMatrix, HVector, HermitianMatrix, RankTolerance, C64};
