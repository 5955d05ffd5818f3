//! Sine-basis transform pair for the 1-D Dirichlet Laplacian.
//!
//! Basis functions `phi_n(x) = sqrt(2/L) sin(n pi x / L)` are sampled on the
//! interior uniform grid `x_j = j L / (N+1)`, `j = 1..=N`, with one grid
//! point per retained mode.  On that grid the discrete orthogonality
//!
//! ```text
//! sum_{j=1}^{N} sin(n pi j/(N+1)) sin(m pi j/(N+1)) = (N+1)/2 delta_nm
//! ```
//!
//! is exact, so `analyze` inverts `synthesize` to round-off, and the
//! quadrature weight `h = L/(N+1)` makes the discrete Parseval identity
//! exact as well.  Grid size is deliberately tied 1:1 to mode count; the
//! aliasing a cubic nonlinearity commits at desk scale is accepted in
//! exchange for an exactly invertible pair.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fmath;
use crate::spectral::EigenSequence;

/// Real samples of a physical-space field on the interior grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    pub samples: Vec<f64>,
}

impl GridField {
    /// Accept complex samples as a physical (real) field; imaginary parts
    /// above `1e-10` in absolute value are a data error.
    pub fn try_from_complex(samples: &[Complex64]) -> Result<Self> {
        for s in samples {
            if fmath::abs(s.im) > 1e-10 {
                return Err(Error::Data(alloc::format!(
                    "physical field has imaginary part {:.3e} (limit 1e-10)",
                    s.im
                )));
            }
        }
        Ok(GridField {
            samples: samples.iter().map(|s| s.re).collect(),
        })
    }
}

fn dirichlet_length(eigs: &EigenSequence) -> Result<f64> {
    eigs.dirichlet_length().ok_or(Error::UnsupportedBasis)
}

/// Evaluate `sum_n c_n phi_n(x_j)` on the interior grid.
pub fn synthesize(coeffs: &[Complex64], eigs: &EigenSequence) -> Result<Vec<Complex64>> {
    let length = dirichlet_length(eigs)?;
    if coeffs.len() != eigs.len() {
        return Err(Error::ShapeMismatch {
            expected: eigs.len(),
            got: coeffs.len(),
        });
    }
    let n = coeffs.len();
    let scale = fmath::sqrt(2.0 / length);
    let step = core::f64::consts::PI / (n as f64 + 1.0);
    let mut out = Vec::with_capacity(n);
    for j in 1..=n {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in coeffs.iter().enumerate() {
            let angle = (k + 1) as f64 * j as f64 * step;
            acc += c * Complex64::new(scale * fmath::sin(angle), 0.0);
        }
        out.push(acc);
    }
    Ok(out)
}

/// Exact inverse of [`synthesize`]: recover eigencoefficients from grid
/// samples using the discrete sine orthogonality.
pub fn analyze(samples: &[Complex64], eigs: &EigenSequence) -> Result<Vec<Complex64>> {
    let length = dirichlet_length(eigs)?;
    if samples.len() != eigs.len() {
        return Err(Error::ShapeMismatch {
            expected: eigs.len(),
            got: samples.len(),
        });
    }
    let n = samples.len();
    // c_m = sqrt(2 L) / (N+1) * sum_j s_j sin(m pi j/(N+1))
    let weight = fmath::sqrt(2.0 * length) / (n as f64 + 1.0);
    let step = core::f64::consts::PI / (n as f64 + 1.0);
    let mut out = Vec::with_capacity(n);
    for m in 1..=n {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, s) in samples.iter().enumerate() {
            let angle = m as f64 * (j + 1) as f64 * step;
            acc += s * Complex64::new(fmath::sin(angle), 0.0);
        }
        out.push(acc * Complex64::new(weight, 0.0));
    }
    Ok(out)
}

/// Quadrature weight of the interior grid; `h * sum_j |s_j|^2` equals the
/// `L^2` norm squared of the synthesized field exactly on this basis.
pub fn quadrature_weight(eigs: &EigenSequence) -> Result<f64> {
    let length = dirichlet_length(eigs)?;
    Ok(length / (eigs.len() as f64 + 1.0))
}
