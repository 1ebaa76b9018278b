//! Spectral geometry of double layer potentials at desk scale.
//!
//! The library discretizes the double layer potential on closed plane curves
//! and on spheres/ellipsoids, computes eigenvalues, singular values and
//! eigenfunctions, and provides the analysis tools (trace identities, decay
//! fits, nodal counts, holomorphic continuation, parameter sweeps) needed to
//! probe the operator's spectral-geometric behaviour numerically.

pub mod analysis;
pub mod config;
pub mod error;
pub mod explorer;
pub mod geometry;
pub mod interp;
pub mod io;
pub mod nodal;
pub mod operators;
pub mod quadrature;
pub mod spectral;
pub mod verify;

pub use error::LayerpotError;
pub use geometry::{Curve2D, Surface3D};
pub use operators::{assemble_dlp_2d, assemble_dlp_3d, OperatorMatrix};

/// Every code snippet in the guide under `book/` runs as a doc-test, so the
/// guide cannot drift from the library.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }
    chapter!(introduction, "../../../book/src/introduction.md");
    chapter!(curves_and_surfaces, "../../../book/src/curves-and-surfaces.md");
    chapter!(discretization, "../../../book/src/discretization.md");
    chapter!(spectra, "../../../book/src/spectra.md");
    chapter!(traces_and_decay, "../../../book/src/traces-and-decay.md");
    chapter!(eigenfunctions, "../../../book/src/eigenfunctions.md");
    chapter!(sweeps, "../../../book/src/sweeps.md");
    chapter!(cli, "../../../book/src/cli.md");
}
