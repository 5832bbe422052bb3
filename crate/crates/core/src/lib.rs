//! Numerical geometry of BTZ quotients of AdS3 and the non-formal deformation
//! machinery that lives on them.
//!
//! The crate is organized around one chain of structures:
//!
//! * [`lie`] — exact arithmetic in sl(2,R), SL(2,R) and its universal cover,
//!   Iwasawa decompositions and the exterior involution fixing the split
//!   Cartan subgroup.
//! * [`bhtz`] — Killing pairs (mass / angular momentum), the twisted and
//!   modified Iwasawa charts, the anti-de Sitter metric in those charts,
//!   causal classification and horizon / singularity membership.
//! * [`poisson`] — the invariant leafwise symplectic form, the B-field
//!   profile on the twisted fibration and the abelian-action Poisson bracket.
//! * [`torus`] — the oscillatory-integral product for R^d actions evaluated
//!   exactly on trigonometric polynomials (quantum torus calibration).
//! * [`symsym`] — the solvable symplectic symmetric space on R^2: point
//!   symmetries, canonical connection, geodesics, the three-point phase and
//!   amplitude.
//! * [`starprod`] — grid evaluation of the non-formal product built from the
//!   three-point kernel.
//! * [`udf`] — transport of the kernel to the group AN and the universal
//!   deformation formula for AN-actions on BTZ extension domains.
//! * [`spinor`] — deformed spinor modules, the Dirac operator in an invariant
//!   frame and the commutator identity.
//! * [`verify`] — the machine-checkable invariant suites shared by the test
//!   harness and the command line front end.
//!
//! The library is `no_std` compatible (with `alloc`); all floating point
//! transcendentals go through `libm` so results do not depend on the host
//! libm build.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod bhtz;
pub mod grid;
pub mod lie;
pub mod mat2;
pub mod math;
pub mod poisson;
pub mod rng;
pub mod spinor;
pub mod starprod;
pub mod symsym;
pub mod tol;
pub mod torus;
pub mod udf;
pub mod verify;

/// Complex scalar used throughout the deformation kernels.
pub type Cx = num_complex::Complex<f64>;
