//! Diagonal realization of the operator `A`: eigenvalue sequences,
//! fractional powers `A^alpha` as diagonal multipliers, and the
//! fractional-scale norms `||c||_{X^alpha} = (sum_n mu_n^(2 alpha) |c_n|^2)^(1/2)`.
//!
//! All reductions accumulate in ascending mode order so results are
//! bit-stable regardless of how callers parallelize the surrounding maps.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fmath;

/// Where an eigenvalue sequence came from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EigenSource {
    /// `-d^2/dx^2` on `(0, L)` with zero boundary values; `mu_n = (n pi / L)^2`.
    DirichletLaplacian1D { length: f64 },
    /// Anything the caller handed in.
    UserSupplied,
}

/// Strictly increasing positive eigenvalues `mu_1 < mu_2 < ...` of `A`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenSequence {
    values: Vec<f64>,
    source: EigenSource,
}

impl EigenSequence {
    /// Wrap a user-supplied sequence; validates positivity and strict
    /// monotonicity.
    pub fn user_supplied(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("eigenvalue sequence must be nonempty"));
        }
        let mut prev = 0.0f64;
        for &v in &values {
            if !v.is_finite() || v <= prev {
                return Err(Error::InvalidArgument(
                    "eigenvalues must be finite, positive and strictly increasing",
                ));
            }
            prev = v;
        }
        Ok(EigenSequence {
            values,
            source: EigenSource::UserSupplied,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn source(&self) -> EigenSource {
        self.source
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Domain length when the sequence is Dirichlet-sourced.
    pub fn dirichlet_length(&self) -> Option<f64> {
        match self.source {
            EigenSource::DirichletLaplacian1D { length } => Some(length),
            EigenSource::UserSupplied => None,
        }
    }
}

/// Eigenvalues of the 1-D Dirichlet Laplacian on `(0, length)`:
/// `mu_n = (n pi / length)^2`, `n = 1..=n_modes`.
pub fn dirichlet_eigs(n_modes: usize, length: f64) -> Result<EigenSequence> {
    if n_modes == 0 {
        return Err(Error::InvalidArgument("n_modes must be at least 1"));
    }
    if !(length > 0.0) || !length.is_finite() {
        return Err(Error::InvalidArgument("length must be positive and finite"));
    }
    let values = (1..=n_modes)
        .map(|n| {
            let k = n as f64 * core::f64::consts::PI / length;
            k * k
        })
        .collect();
    Ok(EigenSequence {
        values,
        source: EigenSource::DirichletLaplacian1D { length },
    })
}

/// Order of a fractional-scale space `X^alpha`; the artifact exercises
/// `alpha` in `[-1, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaleAlpha(f64);

impl ScaleAlpha {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::InvalidArgument("scale order alpha must be finite"));
        }
        Ok(ScaleAlpha(alpha))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Which first-order system a state's components belong to.
///
/// `Natural`: `(u, u_t, u_tt)`.  `Reduced`: `(u, u_t + A^(1/3) u, d/dt` of
/// the second component`)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coords {
    Natural,
    Reduced,
}

/// Triple of complex coefficient vectors over the eigenbasis.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralState {
    pub u_hat: Vec<Complex64>,
    pub v_hat: Vec<Complex64>,
    pub w_hat: Vec<Complex64>,
    pub coords: Coords,
}

impl SpectralState {
    pub fn new(
        u_hat: Vec<Complex64>,
        v_hat: Vec<Complex64>,
        w_hat: Vec<Complex64>,
        coords: Coords,
    ) -> Result<Self> {
        if u_hat.len() != v_hat.len() || u_hat.len() != w_hat.len() {
            return Err(Error::ShapeMismatch {
                expected: u_hat.len(),
                got: if u_hat.len() != v_hat.len() {
                    v_hat.len()
                } else {
                    w_hat.len()
                },
            });
        }
        Ok(SpectralState {
            u_hat,
            v_hat,
            w_hat,
            coords,
        })
    }

    pub fn zero(n: usize, coords: Coords) -> Self {
        let z = Complex64::new(0.0, 0.0);
        SpectralState {
            u_hat: alloc::vec![z; n],
            v_hat: alloc::vec![z; n],
            w_hat: alloc::vec![z; n],
            coords,
        }
    }

    pub fn len(&self) -> usize {
        self.u_hat.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u_hat.is_empty()
    }

    /// Per-mode 3-vector view.
    pub fn mode(&self, n: usize) -> [Complex64; 3] {
        [self.u_hat[n], self.v_hat[n], self.w_hat[n]]
    }

    pub fn set_mode(&mut self, n: usize, value: [Complex64; 3]) {
        self.u_hat[n] = value[0];
        self.v_hat[n] = value[1];
        self.w_hat[n] = value[2];
    }

    pub fn has_nan(&self) -> bool {
        self.u_hat
            .iter()
            .chain(self.v_hat.iter())
            .chain(self.w_hat.iter())
            .any(|c| c.re.is_nan() || c.im.is_nan())
    }
}

fn check_len(vec_len: usize, eigs: &EigenSequence) -> Result<()> {
    if vec_len != eigs.len() {
        return Err(Error::ShapeMismatch {
            expected: eigs.len(),
            got: vec_len,
        });
    }
    Ok(())
}

/// Apply the diagonal multiplier `mu_n^alpha` componentwise
/// (the fractional power `A^alpha` in the eigenbasis).
pub fn frac_apply(
    alpha: ScaleAlpha,
    coeffs: &[Complex64],
    eigs: &EigenSequence,
) -> Result<Vec<Complex64>> {
    check_len(coeffs.len(), eigs)?;
    let a = alpha.get();
    Ok(coeffs
        .iter()
        .zip(eigs.values())
        .map(|(c, &mu)| c * Complex64::new(fmath::pow(mu, a), 0.0))
        .collect())
}

/// `(sum_n mu_n^(2 alpha) |c_n|^2)^(1/2)`, accumulated in ascending mode
/// order.
pub fn scale_norm(alpha: ScaleAlpha, coeffs: &[Complex64], eigs: &EigenSequence) -> Result<f64> {
    check_len(coeffs.len(), eigs)?;
    let a = alpha.get();
    let mut acc = 0.0f64;
    for (c, &mu) in coeffs.iter().zip(eigs.values()) {
        acc += fmath::pow(mu, 2.0 * a) * c.norm_sqr();
    }
    Ok(fmath::sqrt(acc))
}

/// State-space norm of a triple: components measured in the `2/3`, `1/3`
/// and `0` rungs of the scale.
pub fn z_norm(state: &SpectralState, eigs: &EigenSequence) -> Result<f64> {
    check_len(state.len(), eigs)?;
    let nu = scale_norm(ScaleAlpha::new(2.0 / 3.0)?, &state.u_hat, eigs)?;
    let nv = scale_norm(ScaleAlpha::new(1.0 / 3.0)?, &state.v_hat, eigs)?;
    let nw = scale_norm(ScaleAlpha::new(0.0)?, &state.w_hat, eigs)?;
    Ok(fmath::sqrt(nu * nu + nv * nv + nw * nw))
}
