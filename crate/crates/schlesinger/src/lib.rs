//! Schlesinger (Hecke-modification) transformations of rank-2 Fuchsian
//! systems on the Riemann sphere.
//!
//! The library builds, transforms and verifies logarithmic sl(2)/gl(2)
//! connections B(z) dz = sum_i B_i dz/(z - x_i):
//!
//! - lower/upper modifications at eigenlines, the paired operation that
//!   shifts residue eigenvalues by half-integers, and the long one-point
//!   shift ([`modification`]);
//! - the affine Weyl group of type C_n acting on eigenvalue vectors and on
//!   systems, with Coxeter-relation checks ([`weyl`]);
//! - numerical monodromy along keyhole loops and projective comparison of
//!   representations ([`monodromy`]);
//! - Riemann-scheme calculus, Gauss hypergeometric and Heun series with
//!   their contiguous relations and the 24/192 expression lists
//!   ([`scheme`], [`hypergeom`], [`heun`]);
//! - Painleve VI in Hamiltonian and second-order form, the n = 4
//!   Schlesinger flow and the discrete Backlund shift ([`painleve`]).
//!
//! Core arithmetic is generic over the real scalar via `num-traits`;
//! concrete `f64` aliases live at the crate root.

pub mod error;
pub mod fuchsian;
pub mod gauge;
pub mod heun;
pub mod hypergeom;
pub mod io;
pub mod mat2;
pub mod modification;
pub mod monodromy;
pub mod ode;
pub mod painleve;
pub mod sample;
pub mod scalar;
pub mod scheme;
pub mod series;
pub mod weyl;

pub use error::{Error, Result};
pub use fuchsian::{FuchsianSystem, GaugeClass, PoleDivisor, PoleMarking, SpherePoint};
pub use gauge::{GaugeConvention, GaugeMap, RationalConnection};
pub use mat2::{Direction, Mat2};
pub use scalar::{Real, Tolerances};

/// Concrete complex scalar used by the CLI and tests.
pub type C64 = num_complex::Complex<f64>;
/// 2x2 complex matrix over f64.
pub type Mat2f64 = Mat2<f64>;
/// Fuchsian system over f64.
pub type SystemF64 = FuchsianSystem<f64>;
/// Projective direction over f64.
pub type DirectionF64 = Direction<f64>;

/// Single-precision variants (same code paths, looser tolerances).
pub type C32 = num_complex::Complex<f32>;
pub type Mat2f32 = Mat2<f32>;
pub type SystemF32 = FuchsianSystem<f32>;
