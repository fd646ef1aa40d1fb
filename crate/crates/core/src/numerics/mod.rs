//! Complex-analytic kernels shared by the rest of the crate.

pub mod jet;
pub mod linalg;
pub mod poly;
pub mod quad;

pub type C64 = num_complex::Complex64;

pub use jet::{circle_jet, JetSeries};
pub use linalg::solve_dense;
pub use poly::{ComplexPoly, Root};
pub use quad::{integrate, Contour, Piece, QuadResult};

/// Complex number from real and imaginary parts.
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
