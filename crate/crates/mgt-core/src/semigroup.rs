//! Per-mode propagators `exp(-t * block)` and measurements on them:
//! decay/growth rates, analytic-smoothing constants, and the norm scans
//! used as ill-posedness evidence.
//!
//! Two evaluation strategies back every propagator:
//! * eigendecomposition from the closed-form eigenvalues and the explicit
//!   companion-style eigenvectors, used whenever the minimal eigenvalue gap
//!   exceeds `1e-8` times the spectral radius (the eigenvector matrix
//!   conditioning degrades as the gap closes, e.g. `eta` near 3);
//! * Taylor scaling-and-squaring otherwise (covers the defective double
//!   root at `eta = 3`).
//!
//! Blocks are real, so the exponentials are real in exact arithmetic; the
//! eigendecomposition path drops its imaginary round-off at the end.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::blocks::{
    block_eigenvalues, mode_block, z_weighted_opnorm, BlockKind, Eta,
};
use crate::error::{Error, Result};
use crate::fmath;
use crate::smallmat::{cre, czero, phi_triple2, phi_triple3, Mat2, Mat3};
use crate::spectral::{Coords, EigenSequence, SpectralState};

/// How a propagator matrix was computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PropagatorMethod {
    EigenDecomposition,
    ScalingSquaring,
}

/// `exp(-t * block)` for one mode of a 3x3 kind.
#[derive(Clone, Debug, PartialEq)]
pub struct Propagator {
    pub matrix: Mat3,
    pub t: f64,
    pub eta: f64,
    pub mu: f64,
    pub method: PropagatorMethod,
}

/// `exp(-t * block)` for the 2x2 subsystem.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaPropagator {
    pub matrix: Mat2,
    pub t: f64,
    pub eta: f64,
    pub mu: f64,
    pub method: PropagatorMethod,
}

/// Relative eigenvalue gap below which eigendecomposition is abandoned.
const GAP_THRESHOLD: f64 = 1e-8;

fn check_t(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument("t must be nonnegative and finite"));
    }
    Ok(())
}

/// Minimal pairwise gap and spectral radius of a small eigenvalue list.
fn gap_and_radius(eigs: &[Complex64]) -> (f64, f64) {
    let mut gap = f64::INFINITY;
    let mut radius = 0.0f64;
    for (i, a) in eigs.iter().enumerate() {
        radius = radius.max(a.norm());
        for b in eigs.iter().skip(i + 1) {
            gap = gap.min((a - b).norm());
        }
    }
    (gap, radius)
}

/// Companion-style eigenvector of a 3x3 kind for block eigenvalue `s`.
fn eigenvector3(kind: BlockKind, a: f64, s: Complex64) -> [Complex64; 3] {
    match kind {
        // rows: -v = s u, -w = s v
        BlockKind::Natural => [cre(1.0), -s, s * s],
        // rows: a u - v = s u, -w = s v
        BlockKind::Reduced => {
            let v = cre(a) - s;
            [cre(1.0), v, -s * v]
        }
        BlockKind::Lambda => unreachable!("3x3 eigenvectors only"),
    }
}

fn eigen_path3(kind: BlockKind, eta: Eta, mu: f64, t: f64) -> Option<Mat3> {
    let evs = block_eigenvalues(kind, eta, mu).ok()?;
    let (gap, radius) = gap_and_radius(&evs);
    if gap <= GAP_THRESHOLD * radius {
        return None;
    }
    let a = fmath::cbrt(mu);
    let mut v = Mat3::zero();
    for (j, s) in evs.iter().enumerate() {
        let col = eigenvector3(kind, a, *s);
        for i in 0..3 {
            v.0[i][j] = col[i];
        }
    }
    let vinv = v.inverse()?;
    let mut d = Mat3::zero();
    for (j, s) in evs.iter().enumerate() {
        d.0[j][j] = (-s * cre(t)).exp();
    }
    Some(v.mul(&d).mul(&vinv).re_part())
}

/// Propagator with the strategy chosen automatically.
pub fn mode_propagator(kind: BlockKind, eta: Eta, mu: f64, t: f64) -> Result<Propagator> {
    check_t(t)?;
    if kind == BlockKind::Lambda {
        return Err(Error::InvalidArgument(
            "use lambda_propagator for the 2x2 subsystem",
        ));
    }
    let _ = mode_block(kind, eta, mu)?; // validates mu
    if t == 0.0 {
        return Ok(Propagator {
            matrix: Mat3::identity(),
            t,
            eta: eta.get(),
            mu,
            method: PropagatorMethod::EigenDecomposition,
        });
    }
    if let Some(matrix) = eigen_path3(kind, eta, mu, t) {
        return Ok(Propagator {
            matrix,
            t,
            eta: eta.get(),
            mu,
            method: PropagatorMethod::EigenDecomposition,
        });
    }
    mode_propagator_with(kind, eta, mu, t, PropagatorMethod::ScalingSquaring)
}

/// Propagator with a forced strategy (the dual-route check in the tests
/// compares the two).
pub fn mode_propagator_with(
    kind: BlockKind,
    eta: Eta,
    mu: f64,
    t: f64,
    method: PropagatorMethod,
) -> Result<Propagator> {
    check_t(t)?;
    let block = mode_block(kind, eta, mu)?;
    let m3 = block
        .matrix
        .as_mat3()
        .ok_or(Error::InvalidArgument("expected a 3x3 kind"))?;
    let matrix = match method {
        PropagatorMethod::EigenDecomposition => eigen_path3(kind, eta, mu, t).ok_or(
            Error::NumericalFailure(alloc::format!(
                "eigendecomposition ill-conditioned for eta = {}, mu = {mu}",
                eta.get()
            )),
        )?,
        PropagatorMethod::ScalingSquaring => {
            let (e, _, _) = phi_triple3(&m3.scale(cre(-t)));
            e.re_part()
        }
    };
    Ok(Propagator {
        matrix,
        t,
        eta: eta.get(),
        mu,
        method,
    })
}

/// 2x2 subsystem propagator.
pub fn lambda_propagator(eta: Eta, mu: f64, t: f64) -> Result<LambdaPropagator> {
    check_t(t)?;
    let block = mode_block(BlockKind::Lambda, eta, mu)?;
    let m2 = block.matrix.as_mat2().expect("lambda block is 2x2");
    if t == 0.0 {
        return Ok(LambdaPropagator {
            matrix: Mat2::identity(),
            t,
            eta: eta.get(),
            mu,
            method: PropagatorMethod::EigenDecomposition,
        });
    }
    let evs = block_eigenvalues(BlockKind::Lambda, eta, mu)?;
    let (gap, radius) = gap_and_radius(&evs);
    if gap > GAP_THRESHOLD * radius {
        // eigenvectors (1, -s)
        let v = Mat2::from_rows([[cre(1.0), cre(1.0)], [-evs[0], -evs[1]]]);
        if let Some(vinv) = v.inverse() {
            let d = Mat2::from_rows([
                [(-evs[0] * cre(t)).exp(), czero()],
                [czero(), (-evs[1] * cre(t)).exp()],
            ]);
            return Ok(LambdaPropagator {
                matrix: v.mul(&d).mul(&vinv).re_part(),
                t,
                eta: eta.get(),
                mu,
                method: PropagatorMethod::EigenDecomposition,
            });
        }
    }
    let (e, _, _) = phi_triple2(&m2.scale(cre(-t)));
    Ok(LambdaPropagator {
        matrix: e.re_part(),
        t,
        eta: eta.get(),
        mu,
        method: PropagatorMethod::ScalingSquaring,
    })
}

/// Apply the linear flow for time `t` to a whole state; modes are
/// independent, so this is a per-mode 3-vector multiply.
pub fn propagate_linear(
    state: &SpectralState,
    eta: Eta,
    t: f64,
    eigs: &EigenSequence,
) -> Result<SpectralState> {
    if state.len() != eigs.len() {
        return Err(Error::ShapeMismatch {
            expected: eigs.len(),
            got: state.len(),
        });
    }
    let kind = match state.coords {
        Coords::Natural => BlockKind::Natural,
        Coords::Reduced => BlockKind::Reduced,
    };
    let mut out = state.clone();
    for (n, &mu) in eigs.values().iter().enumerate() {
        let p = mode_propagator(kind, eta, mu, t)?;
        out.set_mode(n, p.matrix.mul_vec(&state.mode(n)));
    }
    Ok(out)
}

/// Least-squares slope of `log ||P(t)||` (state-space metric) over a
/// window, negated: positive values mean decay, negative growth.
/// Converges to `-max Re sigma(-block)` as the window moves right.
///
/// Windows should start past the non-normal transient (`t0 >= 1/||block||`
/// in practice); the complex branches also beat against each other, so
/// short windows carry a periodic remnant of a few percent.
pub fn decay_rate(eta: Eta, mu: f64, t_window: [f64; 2]) -> Result<f64> {
    let [t0, t1] = t_window;
    if !(t0 > 0.0) || !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
        return Err(Error::DegenerateWindow);
    }
    const SAMPLES: usize = 65;
    let mut sum_t = 0.0f64;
    let mut sum_y = 0.0f64;
    let mut sum_tt = 0.0f64;
    let mut sum_ty = 0.0f64;
    for k in 0..SAMPLES {
        let t = t0 + (t1 - t0) * k as f64 / (SAMPLES - 1) as f64;
        let p = mode_propagator(BlockKind::Reduced, eta, mu, t)?;
        let norm = z_weighted_opnorm(&p.matrix, mu);
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::NumericalFailure(alloc::format!(
                "propagator norm degenerate at t = {t}"
            )));
        }
        let y = fmath::ln(norm);
        sum_t += t;
        sum_y += y;
        sum_tt += t * t;
        sum_ty += t * y;
    }
    let n = SAMPLES as f64;
    let slope = (n * sum_ty - sum_t * sum_y) / (n * sum_tt - sum_t * sum_t);
    Ok(-slope)
}

/// Spectral abscissa of the negated per-mode block: the analytic growth
/// rate `max Re sigma(-block)` that [`decay_rate`] measures (negated).
pub fn predicted_growth_rate(eta: Eta, mu: f64) -> f64 {
    let a = fmath::cbrt(mu);
    let e = eta.get();
    // branches: -a and (1 - eta)/2 * a; for eta > 3 the real branches are
    // -c a and -d a with c, d > 0.
    if e <= 3.0 {
        (-a).max((1.0 - e) / 2.0 * a)
    } else {
        let disc = fmath::sqrt(e * e - 2.0 * e - 3.0);
        let d_small = (e - 1.0 - disc) / 2.0;
        (-a).max(-d_small * a)
    }
}

/// Per-mode state-space propagator norms at a fixed time; the ill-posedness
/// evidence is this sequence growing without bound in the mode index when
/// `eta < 1`.
pub fn mode_propagator_norms(eta: Eta, eigs: &EigenSequence, t: f64) -> Result<Vec<f64>> {
    eigs.values()
        .iter()
        .map(|&mu| {
            let p = mode_propagator(BlockKind::Reduced, eta, mu, t)?;
            Ok(z_weighted_opnorm(&p.matrix, mu))
        })
        .collect()
}

/// One row of a rate scan: analytic growth rate vs least-squares measured
/// growth rate (both in the abscissa convention: positive = growth).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateScanRow {
    pub mode_index: usize,
    pub mu: f64,
    pub re_rate_predicted: f64,
    pub re_rate_measured: f64,
    pub abs_error: f64,
}

/// Rate scan over a truncation; `window` as in [`decay_rate`].
pub fn rate_scan(eta: Eta, eigs: &EigenSequence, window: [f64; 2]) -> Result<Vec<RateScanRow>> {
    eigs.values()
        .iter()
        .enumerate()
        .map(|(i, &mu)| {
            let predicted = predicted_growth_rate(eta, mu);
            let measured = -decay_rate(eta, mu, window)?;
            Ok(RateScanRow {
                mode_index: i + 1,
                mu,
                re_rate_predicted: predicted,
                re_rate_measured: measured,
                abs_error: fmath::abs(measured - predicted),
            })
        })
        .collect()
}

/// Analytic-smoothing estimate: `sup_n mu_n^(alpha/3) ||P_n(t)||` in the
/// state-space metric.  In the parabolic regime `t^alpha` times this stays
/// bounded as `t` sweeps toward zero (the `||B^alpha exp(-B t)|| <= C/t^alpha`
/// law); outside it the estimate is not meaningful and the call is a
/// regime error.
pub fn smoothing_constant(eta: Eta, alpha: f64, t: f64, eigs: &EigenSequence) -> Result<f64> {
    if eta.get() <= 1.0 {
        return Err(Error::Regime { eta: eta.get() });
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument("t must be positive and finite"));
    }
    if !alpha.is_finite() || alpha < 0.0 || alpha > 1.0 {
        return Err(Error::InvalidArgument("alpha must lie in [0, 1]"));
    }
    let mut sup = 0.0f64;
    for &mu in eigs.values() {
        let p = mode_propagator(BlockKind::Reduced, eta, mu, t)?;
        let v = fmath::pow(mu, alpha / 3.0) * z_weighted_opnorm(&p.matrix, mu);
        if v > sup {
            sup = v;
        }
    }
    Ok(sup)
}
