//! Nemytskii evaluation of the scalar nonlinearity `f(u)`, the growth
//! exponent admissibility check, and a Monte-Carlo probe of the polynomial
//! Lipschitz bound.
//!
//! `f` acts pointwise on the physical field, so evaluating it on spectral
//! data means synthesize -> apply -> analyze on the Dirichlet sine grid.
//! The forcing enters the first-order systems only through the third
//! component: `F([u, v, w]) = [0, 0, f(u)]`.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand_core::RngCore;

use crate::dst::{analyze, synthesize, GridField};
use crate::error::{Error, Result};
use crate::fmath;
use crate::spectral::{scale_norm, EigenSequence, ScaleAlpha};

/// Shape of the scalar nonlinearity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NonlinearityForm {
    /// `f(u) = kappa * u * |u|^(rho - 1)`; the derivative bound
    /// `|f'(s)| <= C (1 + |s|^(rho-1))` holds with `C = kappa * rho`.
    PowerSign,
    /// `f(u) = kappa * u^3` (PowerSign with `rho = 3` on real data, kept
    /// separate because it is the workhorse test case).
    Cubic,
    /// `f = 0`.
    Zero,
}

/// A concrete nonlinearity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NonlinearitySpec {
    pub form: NonlinearityForm,
    pub kappa: f64,
    pub rho: f64,
}

impl NonlinearitySpec {
    pub fn zero() -> Self {
        NonlinearitySpec {
            form: NonlinearityForm::Zero,
            kappa: 0.0,
            rho: 2.0,
        }
    }

    pub fn cubic(kappa: f64) -> Self {
        NonlinearitySpec {
            form: NonlinearityForm::Cubic,
            kappa,
            rho: 3.0,
        }
    }

    pub fn power_sign(kappa: f64, rho: f64) -> Result<Self> {
        if !(rho > 1.0) || !rho.is_finite() {
            return Err(Error::InvalidArgument("rho must exceed 1"));
        }
        Ok(NonlinearitySpec {
            form: NonlinearityForm::PowerSign,
            kappa,
            rho,
        })
    }

    /// Pointwise scalar map.
    pub fn apply_scalar(&self, s: f64) -> f64 {
        match self.form {
            NonlinearityForm::Zero => 0.0,
            NonlinearityForm::Cubic => self.kappa * s * s * s,
            NonlinearityForm::PowerSign => {
                self.kappa * s * fmath::pow(fmath::abs(s), self.rho - 1.0)
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.form, NonlinearityForm::Zero)
    }
}

/// Evaluate `f` on spectral data: synthesize the field, check it is
/// physically real, apply `f` pointwise, analyze back.  The result is the
/// third component of the forcing vector.
pub fn nemytskii(
    f: &NonlinearitySpec,
    u_hat: &[Complex64],
    eigs: &EigenSequence,
) -> Result<Vec<Complex64>> {
    if f.is_zero() {
        if u_hat.len() != eigs.len() {
            return Err(Error::ShapeMismatch {
                expected: eigs.len(),
                got: u_hat.len(),
            });
        }
        return Ok(alloc::vec![Complex64::new(0.0, 0.0); u_hat.len()]);
    }
    let field = synthesize(u_hat, eigs)?;
    let real_field = GridField::try_from_complex(&field)?;
    let mapped: Vec<Complex64> = real_field
        .samples
        .iter()
        .map(|&s| Complex64::new(f.apply_scalar(s), 0.0))
        .collect();
    analyze(&mapped, eigs)
}

/// The admissible growth-exponent range for space dimension `N >= 3`:
/// `1 < rho < (3N + 4) / (3N - 8)` (both bounds strict).
pub fn rho_admissible(space_dim: u32, rho: f64) -> Result<bool> {
    if space_dim < 3 {
        return Err(Error::InvalidArgument(
            "the exponent bound is stated for space dimension at least 3",
        ));
    }
    let n = space_dim as f64;
    let bound = (3.0 * n + 4.0) / (3.0 * n - 8.0);
    Ok(rho > 1.0 && rho < bound)
}

/// Empirical constant of the polynomial Lipschitz bound
///
/// ```text
/// ||f(p1) - f(p2)||_X <= c ||p1 - p2||_{X^(1/3)}
///                          (1 + ||p1||^(rho-1) + ||p2||^(rho-1))
/// ```
///
/// over random real fields with `||.||_{X^(1/3)} <= radius`.  Pairs whose
/// denominator underflows are skipped.  The returned maximum must be finite
/// and stable under sample doubling; it is an estimate, not a proof.
pub fn lipschitz_probe<R: RngCore>(
    f: &NonlinearitySpec,
    radius: f64,
    samples: usize,
    eigs: &EigenSequence,
    rng: &mut R,
) -> Result<f64> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidArgument("radius must be positive"));
    }
    if samples < 2 {
        return Err(Error::InvalidArgument("need at least 2 samples"));
    }
    let third = ScaleAlpha::new(1.0 / 3.0)?;
    let zero = ScaleAlpha::new(0.0)?;
    let n = eigs.len();
    let draw = |rng: &mut R| -> Result<Vec<Complex64>> {
        let mut v: Vec<Complex64> = (0..n)
            .map(|_| {
                let x = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0;
                Complex64::new(x, 0.0)
            })
            .collect();
        let norm = scale_norm(third, &v, eigs)?;
        if norm > 0.0 {
            // scale to a uniformly random fraction of the ball radius
            let frac = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
            let s = radius * frac / norm;
            for c in &mut v {
                *c *= Complex64::new(s, 0.0);
            }
        }
        Ok(v)
    };
    let mut max_ratio = 0.0f64;
    for _ in 0..samples {
        let p1 = draw(rng)?;
        let p2 = draw(rng)?;
        let f1 = nemytskii(f, &p1, eigs)?;
        let f2 = nemytskii(f, &p2, eigs)?;
        let num_vec: Vec<Complex64> = f1.iter().zip(&f2).map(|(a, b)| a - b).collect();
        let num = scale_norm(zero, &num_vec, eigs)?;
        let diff_vec: Vec<Complex64> = p1.iter().zip(&p2).map(|(a, b)| a - b).collect();
        let n1 = scale_norm(third, &p1, eigs)?;
        let n2 = scale_norm(third, &p2, eigs)?;
        let den = scale_norm(third, &diff_vec, eigs)?
            * (1.0 + fmath::pow(n1, f.rho - 1.0) + fmath::pow(n2, f.rho - 1.0));
        if den < 1e-14 {
            continue;
        }
        let ratio = num / den;
        if ratio > max_ratio {
            max_ratio = ratio;
        }
    }
    Ok(max_ratio)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::dirichlet_eigs;
    use approx::assert_relative_eq;
    use rand_core::SeedableRng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn zero_form_returns_zero() {
        let eigs = dirichlet_eigs(6, 1.0).unwrap();
        let u = alloc::vec![c(0.4); 6];
        let out = nemytskii(&NonlinearitySpec::zero(), &u, &eigs).unwrap();
        assert!(out.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn cubic_single_mode_matches_sine_power_expansion() {
        // u = eps * phi_1 with phi_n = sqrt(2/L) sin(n pi x / L):
        // u^3 = eps^3 (2/L) [3 phi_1 - phi_3] / 4 pointwise, exactly.
        let n = 8;
        let length = core::f64::consts::PI;
        let eigs = dirichlet_eigs(n, length).unwrap();
        let eps = 0.37;
        let mut u = alloc::vec![c(0.0); n];
        u[0] = c(eps);
        let out = nemytskii(&NonlinearitySpec::cubic(1.0), &u, &eigs).unwrap();
        let factor = eps * eps * eps * (2.0 / length) / 4.0;
        assert_relative_eq!(out[0].re, 3.0 * factor, max_relative = 1e-12);
        assert_relative_eq!(out[2].re, -factor, max_relative = 1e-12);
        for (k, v) in out.iter().enumerate() {
            if k != 0 && k != 2 {
                assert!(v.norm() < 1e-12, "unexpected coefficient at mode {}", k + 1);
            }
            assert!(v.im.abs() < 1e-14);
        }
        // amplitude scales as eps^3
        let mut u_small = alloc::vec![c(0.0); n];
        u_small[0] = c(eps / 2.0);
        let out_small = nemytskii(&NonlinearitySpec::cubic(1.0), &u_small, &eigs).unwrap();
        assert_relative_eq!(out_small[0].re * 8.0, out[0].re, max_relative = 1e-12);
    }

    #[test]
    fn power_sign_matches_pointwise_oracle() {
        let n = 16;
        let eigs = dirichlet_eigs(n, 2.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        use rand_core::RngCore;
        let u: alloc::vec::Vec<Complex64> = (0..n)
            .map(|_| c((rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 - 0.5))
            .collect();
        let f = NonlinearitySpec::power_sign(0.8, 2.0).unwrap();
        let out = nemytskii(&f, &u, &eigs).unwrap();
        // oracle: explicit synthesize -> pointwise kappa s |s| -> analyze
        let field = crate::dst::synthesize(&u, &eigs).unwrap();
        let mapped: alloc::vec::Vec<Complex64> = field
            .iter()
            .map(|s| c(0.8 * s.re * fmath::abs(s.re)))
            .collect();
        let oracle = crate::dst::analyze(&mapped, &eigs).unwrap();
        for (a, b) in out.iter().zip(&oracle) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn nemytskii_rejects_nonreal_fields_and_wrong_basis() {
        let eigs = dirichlet_eigs(4, 1.0).unwrap();
        let mut u = alloc::vec![c(0.0); 4];
        u[1] = Complex64::new(0.0, 0.5); // strongly imaginary data
        let err = nemytskii(&NonlinearitySpec::cubic(1.0), &u, &eigs).unwrap_err();
        assert!(matches!(err, Error::Data(_)));

        let user = crate::spectral::EigenSequence::user_supplied(alloc::vec![1.0, 2.0]).unwrap();
        let err = nemytskii(&NonlinearitySpec::cubic(1.0), &[c(1.0), c(0.0)], &user).unwrap_err();
        assert!(matches!(err, Error::UnsupportedBasis));
    }

    #[test]
    fn rho_admissible_examples() {
        // N = 3: bound is 13
        assert!(rho_admissible(3, 12.9).unwrap());
        assert!(!rho_admissible(3, 13.0).unwrap());
        // N = 4: bound is 4, strict
        assert!(!rho_admissible(4, 4.0).unwrap());
        assert!(rho_admissible(4, 3.999).unwrap());
        // strict lower bound
        assert!(!rho_admissible(3, 1.0).unwrap());
        assert!(!rho_admissible(7, 1.0).unwrap());
        // domain restriction
        assert!(rho_admissible(2, 2.0).is_err());
    }

    #[test]
    fn lipschitz_probe_zero_and_cubic() {
        let eigs = dirichlet_eigs(64, core::f64::consts::PI).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let zero = lipschitz_probe(&NonlinearitySpec::zero(), 1.0, 32, &eigs, &mut rng).unwrap();
        assert_eq!(zero, 0.0);

        let f = NonlinearitySpec::cubic(1.0);
        let mut rng1 = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        let c1 = lipschitz_probe(&f, 1.0, 64, &eigs, &mut rng1).unwrap();
        let mut rng2 = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        let c2 = lipschitz_probe(&f, 1.0, 128, &eigs, &mut rng2).unwrap();
        assert!(c1.is_finite() && c1 > 0.0);
        assert!(c2.is_finite());
        // stable under sample doubling
        assert!(c2 / c1 <= 2.0 && c1 / c2 <= 2.0, "c1 {c1} c2 {c2}");

        // radius doubling cannot outrun the radius^(rho-1) scaling by more
        // than the allowed slack
        let mut rng3 = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        let c_big = lipschitz_probe(&f, 2.0, 64, &eigs, &mut rng3).unwrap();
        assert!(c_big <= 4.0 * c1 * 4.0, "c1 {c1} c_big {c_big}");
    }
}
