//! Spectral simulation and verification kernels for the abstract
//! third-order-in-time evolution equation
//!
//! ```text
//! u_ttt + A u + eta * A^(1/3) u_tt + eta * A^(2/3) u_t = f(u)
//! ```
//!
//! where `A` is realized diagonally by a strictly increasing sequence of
//! positive eigenvalues (the 1-D Dirichlet Laplacian ships as the built-in
//! basis).  Because `A` is diagonal, the first-order systems obtained from
//! the natural unknowns `(u, u_t, u_tt)` and from the reduced unknowns
//! `(u, u_t + A^(1/3) u, ...)` decouple into independent 3x3 (or 2x2)
//! complex blocks per mode, and everything — spectra, inverses, resolvents,
//! propagators, exponential integrators — is evaluated per mode in closed
//! form.
//!
//! The crate is `no_std` (with `alloc`); all floating-point elementary
//! functions are routed through `libm` so results are bit-stable across
//! platforms.  IO, file formats and the command line live in the companion
//! `mgt-cli` crate.
//!
//! Module map:
//! * [`spectral`] — eigenvalue sequences, fractional powers as diagonal
//!   multipliers, fractional-scale norms, spectral states.
//! * [`dst`] — the sine-basis synthesize/analyze transform pair used to
//!   evaluate nonlinearities pointwise.
//! * [`blocks`] — per-mode block operators: closed-form spectra, inverses,
//!   resolvents, regime classification, dissipativity witness.
//! * [`semigroup`] — per-mode propagators `exp(-t B)`, decay/growth rate
//!   measurement, smoothing estimates.
//! * [`nonlinear`] — Nemytskii maps, growth-condition checks, Lipschitz
//!   probes.
//! * [`solver`] — exponential time differencing for the mild-solution
//!   formula, the reduction-of-order solver, blow-up detection.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod blocks;
pub mod dst;
pub mod error;
pub(crate) mod fmath;
pub mod nonlinear;
pub mod semigroup;
pub mod smallmat;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;
