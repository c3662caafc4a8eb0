//! Anticoherence measures for spin-j states.
//!
//! A spin-j density matrix can be expanded in the irreducible tensor basis
//! `T_LM`; a state is *t-anticoherent* (t-AC) when all multipole moments of
//! rank `1..=t` vanish, equivalently when its symmetric t-qubit marginal is
//! maximally mixed. For mixed states that isotropy may come from genuine
//! quantum correlations or from classical mixing, and this crate computes
//! the three corresponding families of measures:
//!
//! - **total** measures (reduced purity, Schatten-p distance, fidelity,
//!   cumulative multipoles), non-decreasing under SU(2)-covariant noise;
//! - **quantum** measures, convex-roof extensions of pure-state functionals
//!   tied to bipartite entanglement across the `t | N-t` split of the
//!   symmetric qubit embedding;
//! - **classical** measures, their difference.
//!
//! Alongside the measures the crate provides the supporting machinery:
//! Clebsch-Gordan coefficients in exact rational arithmetic, irreducible
//! tensor operators, Wigner rotations, symmetric-sector partial traces and
//! bipartite embeddings, negativity, SU(2)-covariant channels with Choi
//! complete-positivity checks, extremal purity-vs-order searches, and a
//! catalogue of exactly constructed reference states.
//!
//! All numerics are generic over the real scalar type through [`Scalar`]
//! (`f32` or `f64`); exact paths use arbitrary-precision rationals and
//! convert to floats only at the boundary. Concrete `f64` aliases such as
//! [`SpinState64`] are exported at the crate root.

pub mod apps;
pub mod catalogue;
pub mod cg;
pub mod channel;
pub mod entangle;
pub mod error;
pub mod exact;
pub mod extremal;
pub mod half;
pub mod io;
pub mod measures;
pub mod oracle;
pub mod reduce;
pub mod roof;
pub mod rotation;
pub mod spin;
pub mod tensor;

pub use error::{Error, Result};
pub use half::SpinQuantumNumber;
pub use spin::{PureSpinState, SpinState};

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar type used throughout the numerical core.
///
/// `f32` and `f64` both qualify; all complex linear algebra runs over
/// `Complex<T>`. Exact-rational computations are independent of `T` and
/// convert through [`real`] at the boundary.
pub trait Scalar: RealField + FromPrimitive + ToPrimitive + Copy + Default + Send + Sync {}
impl<T: RealField + FromPrimitive + ToPrimitive + Copy + Default + Send + Sync> Scalar for T {}

/// Convert an `f64` constant into the working scalar type.
#[inline]
pub fn real<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("finite f64 converts to scalar")
}

/// Convert the working scalar back to `f64` (for reporting and I/O).
#[inline]
pub fn to_f64<T: Scalar>(x: T) -> f64 {
    x.to_f64().expect("scalar converts to f64")
}

/// Default absolute tolerance for invariant checks.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Tolerance used when validating states parsed from files.
pub const VALIDATE_TOL: f64 = 1e-8;

/// Complex double-precision scalar.
pub type C64 = num_complex::Complex<f64>;
/// Double-precision spin state.
pub type SpinState64 = SpinState<f64>;
/// Double-precision pure spin state.
pub type PureSpinState64 = PureSpinState<f64>;
/// Single-precision spin state.
pub type SpinState32 = SpinState<f32>;
/// Single-precision pure spin state.
pub type PureSpinState32 = PureSpinState<f32>;
