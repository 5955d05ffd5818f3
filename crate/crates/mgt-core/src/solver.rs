//! Exponential time differencing for the mild-solution formula, and the
//! reduction-of-order solver that evolves the damped second-order
//! subsystem and recovers `u` by exact integration of `u' + A^(1/3) u = v`.
//!
//! The linear part is diagonal and stiff, so every step applies the exact
//! per-mode propagator together with the `phi1`/`phi2` weights
//!
//! ```text
//! y_{k+1} = E y_k + dt phi1(-B dt) F_k                       (ETD1)
//! a       = E y_k + dt phi1(-B dt) F_k
//! y_{k+1} = a + dt phi2(-B dt) (F(a, t_{k+1}) - F_k)         (ETD2)
//! ```
//!
//! i.e. the forcing is frozen over the step or linearly interpolated
//! between its endpoint evaluations.  Blow-up is a result, not an error:
//! solutions of the underlying problem are local in time, so crossing the
//! threshold terminates the run with a `BlowUp` status and the crossing
//! time.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::blocks::{classify, mode_block, BlockKind, Eta, Regime};
use crate::error::{Error, Result};
use crate::fmath;
use crate::nonlinear::{nemytskii, NonlinearitySpec};
use crate::smallmat::{cre, czero, phi1_scalar, phi2_scalar, phi_triple2, phi_triple3, Mat2, Mat3};
use crate::spectral::{scale_norm, z_norm, Coords, EigenSequence, ScaleAlpha, SpectralState};

/// Time-stepping scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    Etd1,
    Etd2,
}

/// Integrator configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_final: f64,
    pub scheme: Scheme,
    /// State-space norm beyond which the run terminates with `BlowUp`.
    pub blowup_threshold: f64,
    /// Record one state every this many steps (the initial and final states
    /// are always recorded).
    pub record_every: usize,
}

impl SolverConfig {
    pub fn new(dt: f64, t_final: f64, scheme: Scheme) -> Result<Self> {
        let cfg = SolverConfig {
            dt,
            t_final,
            scheme,
            blowup_threshold: 1e8,
            record_every: 1,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_blowup_threshold(mut self, threshold: f64) -> Result<Self> {
        self.blowup_threshold = threshold;
        self.validate()?;
        Ok(self)
    }

    pub fn with_record_every(mut self, every: usize) -> Result<Self> {
        self.record_every = every;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidArgument("dt must be positive and finite"));
        }
        if !(self.t_final > 0.0) || !self.t_final.is_finite() {
            return Err(Error::InvalidArgument("t_final must be positive and finite"));
        }
        if self.dt > self.t_final * (1.0 + 1e-12) {
            return Err(Error::InvalidArgument("dt must not exceed t_final"));
        }
        if !(self.blowup_threshold > 0.0) {
            return Err(Error::InvalidArgument("blowup threshold must be positive"));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidArgument("record_every must be at least 1"));
        }
        Ok(())
    }
}

/// How a run ended.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TrajectoryStatus {
    /// Reached `t_final`.
    Completed,
    /// State-space norm crossed the threshold at the recorded time.
    BlowUp { t_star: f64 },
    /// A linear-algebra kernel hit a spectral point; kept for schema
    /// completeness (the exponential integrators themselves never
    /// evaluate resolvents on the spectrum).
    NearSingular,
}

impl TrajectoryStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            TrajectoryStatus::Completed => "completed",
            TrajectoryStatus::BlowUp { .. } => "blow_up",
            TrajectoryStatus::NearSingular => "near_singular",
        }
    }
}

/// Time-stamped states plus derived scale norms.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<SpectralState>,
    pub z_norms: Vec<f64>,
    /// `||u||` in the `2/3` rung.
    pub u_norms: Vec<f64>,
    /// `||v||` in the `1/3` rung.
    pub v_norms: Vec<f64>,
    /// `||w||` in the base space.
    pub w_norms: Vec<f64>,
    pub status: TrajectoryStatus,
    /// Damping regime of the run; ill-posed runs are flagged here rather
    /// than refused (finite truncations are always well defined).
    pub regime: Regime,
}

impl Trajectory {
    fn new(regime: Regime) -> Self {
        Trajectory {
            times: Vec::new(),
            states: Vec::new(),
            z_norms: Vec::new(),
            u_norms: Vec::new(),
            v_norms: Vec::new(),
            w_norms: Vec::new(),
            status: TrajectoryStatus::Completed,
            regime,
        }
    }

    fn record(&mut self, t: f64, state: &SpectralState, eigs: &EigenSequence) -> Result<()> {
        let zn = z_norm(state, eigs)?;
        self.times.push(t);
        self.z_norms.push(zn);
        self.u_norms
            .push(scale_norm(ScaleAlpha::new(2.0 / 3.0)?, &state.u_hat, eigs)?);
        self.v_norms
            .push(scale_norm(ScaleAlpha::new(1.0 / 3.0)?, &state.v_hat, eigs)?);
        self.w_norms
            .push(scale_norm(ScaleAlpha::new(0.0)?, &state.w_hat, eigs)?);
        self.states.push(state.clone());
        Ok(())
    }
}

/// Optional extra forcing on the third (w-row) component; used for
/// manufactured-solution sources.  Receives the current time, returns one
/// coefficient per mode.
pub type SourceFn<'a> = &'a dyn Fn(f64) -> Vec<Complex64>;

/// Per-mode `(E, dt*phi1, dt*phi2)` weights for a 3x3 kind.
struct Weights3 {
    e: Vec<Mat3>,
    p1: Vec<Mat3>,
    p2: Vec<Mat3>,
}

fn weights3(kind: BlockKind, eta: Eta, eigs: &EigenSequence, dt: f64) -> Result<Weights3> {
    let mut w = Weights3 {
        e: Vec::with_capacity(eigs.len()),
        p1: Vec::with_capacity(eigs.len()),
        p2: Vec::with_capacity(eigs.len()),
    };
    for &mu in eigs.values() {
        let block = mode_block(kind, eta, mu)?;
        let m = block.matrix.as_mat3().expect("3x3 kind").scale(cre(-dt));
        let (e, p1, p2) = phi_triple3(&m);
        w.e.push(e.re_part());
        w.p1.push(p1.re_part().scale(cre(dt)).re_part());
        w.p2.push(p2.re_part().scale(cre(dt)).re_part());
    }
    Ok(w)
}

fn forcing_third(
    f: &NonlinearitySpec,
    u_hat: &[Complex64],
    source: Option<SourceFn<'_>>,
    t: f64,
    eigs: &EigenSequence,
) -> Result<Vec<Complex64>> {
    let mut third = nemytskii(f, u_hat, eigs)?;
    if let Some(src) = source {
        let s = src(t);
        if s.len() != third.len() {
            return Err(Error::ShapeMismatch {
                expected: third.len(),
                got: s.len(),
            });
        }
        for (a, b) in third.iter_mut().zip(&s) {
            *a += b;
        }
    }
    Ok(third)
}

/// Advance the reduced first-order system by exponential time differencing.
/// The initial state must be in reduced coordinates.
pub fn etd_solve(
    initial: &SpectralState,
    eta: Eta,
    f: &NonlinearitySpec,
    cfg: &SolverConfig,
    eigs: &EigenSequence,
) -> Result<Trajectory> {
    etd_solve_forced(initial, eta, f, None, cfg, eigs)
}

/// [`etd_solve`] with an optional manufactured source on the w-row.
pub fn etd_solve_forced(
    initial: &SpectralState,
    eta: Eta,
    f: &NonlinearitySpec,
    source: Option<SourceFn<'_>>,
    cfg: &SolverConfig,
    eigs: &EigenSequence,
) -> Result<Trajectory> {
    cfg.validate()?;
    if initial.coords != Coords::Reduced {
        return Err(Error::InvalidArgument(
            "etd_solve expects reduced coordinates; convert with natural_to_reduced",
        ));
    }
    if initial.len() != eigs.len() {
        return Err(Error::ShapeMismatch {
            expected: eigs.len(),
            got: initial.len(),
        });
    }
    let regime = classify(eta).regime;
    let w = weights3(BlockKind::Reduced, eta, eigs, cfg.dt)?;
    let mut traj = Trajectory::new(regime);
    let mut state = initial.clone();
    traj.record(0.0, &state, eigs)?;

    let n_modes = eigs.len();
    let mut t = 0.0f64;
    let mut step_index = 0usize;
    // weights for a trailing partial step are rebuilt on demand
    let mut partial: Option<(f64, Weights3)> = None;
    loop {
        let remaining = cfg.t_final - t;
        if remaining <= 1e-12 * cfg.t_final {
            traj.status = TrajectoryStatus::Completed;
            break;
        }
        let (dt, weights) = if remaining >= cfg.dt * (1.0 - 1e-12) {
            (cfg.dt, &w)
        } else {
            if partial.as_ref().map(|(h, _)| *h) != Some(remaining) {
                partial = Some((remaining, weights3(BlockKind::Reduced, eta, eigs, remaining)?));
            }
            let (h, ref pw) = *partial.as_ref().unwrap();
            (h, pw)
        };

        let f_k = forcing_third(f, &state.u_hat, source, t, eigs)?;
        let mut next = state.clone();
        // predictor (also the full ETD1 update)
        for n in 0..n_modes {
            let y = state.mode(n);
            let fk = [czero(), czero(), f_k[n]];
            let mut val = weights.e[n].mul_vec(&y);
            let corr = weights.p1[n].mul_vec(&fk);
            for i in 0..3 {
                val[i] += corr[i];
            }
            next.set_mode(n, val);
        }
        if cfg.scheme == Scheme::Etd2 {
            let f_star = forcing_third(f, &next.u_hat, source, t + dt, eigs)?;
            for n in 0..n_modes {
                let df = [czero(), czero(), f_star[n] - f_k[n]];
                let corr = weights.p2[n].mul_vec(&df);
                let mut val = next.mode(n);
                for i in 0..3 {
                    val[i] += corr[i];
                }
                next.set_mode(n, val);
            }
        }

        t += dt;
        step_index += 1;
        state = next;
        if state.has_nan() {
            return Err(Error::NumericalFailure(alloc::format!(
                "state became NaN at t = {t}"
            )));
        }
        let zn = z_norm(&state, eigs)?;
        let at_end = cfg.t_final - t <= 1e-12 * cfg.t_final;
        if zn > cfg.blowup_threshold {
            traj.record(t, &state, eigs)?;
            traj.status = TrajectoryStatus::BlowUp { t_star: t };
            break;
        }
        if step_index % cfg.record_every == 0 || at_end {
            traj.record(t, &state, eigs)?;
        }
        if at_end {
            traj.status = TrajectoryStatus::Completed;
            break;
        }
    }
    Ok(traj)
}

/// Convert natural data `(u, u_t, u_tt)` to the reduced unknowns:
/// `v = u_t + A^(1/3) u`, `w = v_t = u_tt + A^(1/3) u_t`.
pub fn natural_to_reduced(state: &SpectralState, eigs: &EigenSequence) -> Result<SpectralState> {
    if state.coords != Coords::Natural {
        return Err(Error::InvalidArgument("state is not in natural coordinates"));
    }
    if state.len() != eigs.len() {
        return Err(Error::ShapeMismatch {
            expected: eigs.len(),
            got: state.len(),
        });
    }
    let mut out = state.clone();
    out.coords = Coords::Reduced;
    for (n, &mu) in eigs.values().iter().enumerate() {
        let a = cre(fmath::cbrt(mu));
        out.v_hat[n] = state.v_hat[n] + a * state.u_hat[n];
        out.w_hat[n] = state.w_hat[n] + a * state.v_hat[n];
    }
    Ok(out)
}

/// Two-stage solver: evolve the damped 2x2 subsystem in `(v, w)` with
/// forcing `g(v) = f(u)`, and recover `u` per mode by exact integration of
/// `u' + a u = v` against the piecewise-polynomial `v` the scheme produces
/// (piecewise constant for ETD1, piecewise linear for ETD2).
///
/// Input is natural data; the returned trajectory carries the reduced
/// triple `(u, v, w)` so the `u` component can be compared directly against
/// [`etd_solve`].
pub fn reduction_solve(
    u0_hat: &[Complex64],
    v0_hat: &[Complex64],
    w0_hat: &[Complex64],
    eta: Eta,
    f: &NonlinearitySpec,
    cfg: &SolverConfig,
    eigs: &EigenSequence,
) -> Result<Trajectory> {
    cfg.validate()?;
    let natural = SpectralState::new(
        u0_hat.to_vec(),
        v0_hat.to_vec(),
        w0_hat.to_vec(),
        Coords::Natural,
    )?;
    if natural.len() != eigs.len() {
        return Err(Error::ShapeMismatch {
            expected: eigs.len(),
            got: natural.len(),
        });
    }
    let regime = classify(eta).regime;
    let mut state = natural_to_reduced(&natural, eigs)?;
    let n_modes = eigs.len();

    struct LambdaWeights {
        e: Vec<Mat2>,
        p1: Vec<Mat2>,
        p2: Vec<Mat2>,
        // scalar u-recovery weights per mode
        em: Vec<f64>,
        q1: Vec<f64>,
        q2: Vec<f64>,
    }
    let build = |dt: f64| -> Result<LambdaWeights> {
        let mut lw = LambdaWeights {
            e: Vec::with_capacity(n_modes),
            p1: Vec::with_capacity(n_modes),
            p2: Vec::with_capacity(n_modes),
            em: Vec::with_capacity(n_modes),
            q1: Vec::with_capacity(n_modes),
            q2: Vec::with_capacity(n_modes),
        };
        for &mu in eigs.values() {
            let block = mode_block(BlockKind::Lambda, eta, mu)?;
            let m = block.matrix.as_mat2().expect("2x2 kind").scale(cre(-dt));
            let (e, p1, p2) = phi_triple2(&m);
            lw.e.push(e.re_part());
            lw.p1.push(p1.re_part().scale(cre(dt)).re_part());
            lw.p2.push(p2.re_part().scale(cre(dt)).re_part());
            let a = fmath::cbrt(mu);
            let m_scal = -a * dt;
            lw.em.push(fmath::exp(m_scal));
            lw.q1.push(dt * phi1_scalar(m_scal));
            lw.q2.push(dt * phi2_scalar(m_scal));
        }
        Ok(lw)
    };

    let w_full = build(cfg.dt)?;
    let mut traj = Trajectory::new(regime);
    traj.record(0.0, &state, eigs)?;

    let mut t = 0.0f64;
    let mut step_index = 0usize;
    let mut partial: Option<(f64, LambdaWeights)> = None;
    loop {
        let remaining = cfg.t_final - t;
        if remaining <= 1e-12 * cfg.t_final {
            traj.status = TrajectoryStatus::Completed;
            break;
        }
        let (dt, lw) = if remaining >= cfg.dt * (1.0 - 1e-12) {
            (cfg.dt, &w_full)
        } else {
            if partial.as_ref().map(|(h, _)| *h) != Some(remaining) {
                partial = Some((remaining, build(remaining)?));
            }
            let (h, ref pw) = *partial.as_ref().unwrap();
            (h, pw)
        };

        let f_k = nemytskii(f, &state.u_hat, eigs)?;
        let mut next = state.clone();
        // predictor on (v, w) and the u carried with the piecewise-linear v
        for n in 0..n_modes {
            let vw = [state.v_hat[n], state.w_hat[n]];
            let fk = [czero(), f_k[n]];
            let adv = lw.e[n].mul_vec(&vw);
            let corr = lw.p1[n].mul_vec(&fk);
            next.v_hat[n] = adv[0] + corr[0];
            next.w_hat[n] = adv[1] + corr[1];
            next.u_hat[n] = cre(lw.em[n]) * state.u_hat[n]
                + cre(lw.q1[n]) * state.v_hat[n]
                + cre(lw.q2[n]) * (next.v_hat[n] - state.v_hat[n]);
        }
        if cfg.scheme == Scheme::Etd2 {
            let f_star = nemytskii(f, &next.u_hat, eigs)?;
            for n in 0..n_modes {
                let df = [czero(), f_star[n] - f_k[n]];
                let corr = lw.p2[n].mul_vec(&df);
                next.v_hat[n] += corr[0];
                next.w_hat[n] += corr[1];
                // re-integrate u against the corrected endpoint v
                next.u_hat[n] = cre(lw.em[n]) * state.u_hat[n]
                    + cre(lw.q1[n]) * state.v_hat[n]
                    + cre(lw.q2[n]) * (next.v_hat[n] - state.v_hat[n]);
            }
        } else {
            // ETD1 freezes v over the step
            for n in 0..n_modes {
                next.u_hat[n] =
                    cre(lw.em[n]) * state.u_hat[n] + cre(lw.q1[n]) * state.v_hat[n];
            }
        }

        t += dt;
        step_index += 1;
        state = next;
        if state.has_nan() {
            return Err(Error::NumericalFailure(alloc::format!(
                "state became NaN at t = {t}"
            )));
        }
        let zn = z_norm(&state, eigs)?;
        let at_end = cfg.t_final - t <= 1e-12 * cfg.t_final;
        if zn > cfg.blowup_threshold {
            traj.record(t, &state, eigs)?;
            traj.status = TrajectoryStatus::BlowUp { t_star: t };
            break;
        }
        if step_index % cfg.record_every == 0 || at_end {
            traj.record(t, &state, eigs)?;
        }
        if at_end {
            traj.status = TrajectoryStatus::Completed;
            break;
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::propagate_linear;
    use crate::spectral::dirichlet_eigs;
    use approx::assert_relative_eq;

    fn eta(e: f64) -> Eta {
        Eta::new(e).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn single_mode_state(n: usize, amp: f64) -> SpectralState {
        let mut s = SpectralState::zero(n, Coords::Reduced);
        s.u_hat[0] = c(amp);
        s
    }

    #[test]
    fn zero_forcing_matches_linear_propagator() {
        let eigs = dirichlet_eigs(6, core::f64::consts::PI).unwrap();
        let mut init = single_mode_state(6, 0.7);
        init.v_hat[2] = c(-0.4);
        init.w_hat[4] = c(0.2);
        let cfg = SolverConfig::new(1e-2, 1.0, Scheme::Etd2)
            .unwrap()
            .with_record_every(10)
            .unwrap();
        let traj = etd_solve(&init, eta(2.0), &NonlinearitySpec::zero(), &cfg, &eigs).unwrap();
        assert_eq!(traj.status, TrajectoryStatus::Completed);
        assert_eq!(traj.times[0], 0.0);
        for (k, &t) in traj.times.iter().enumerate() {
            let direct = propagate_linear(&init, eta(2.0), t, &eigs).unwrap();
            let mut err = 0.0f64;
            for n in 0..6 {
                for i in 0..3 {
                    err = err.max((traj.states[k].mode(n)[i] - direct.mode(n)[i]).norm());
                }
            }
            assert!(err < 1e-10, "t = {t}: {err}");
        }
    }

    #[test]
    fn zero_forcing_agreement_over_thousand_steps() {
        let eigs = dirichlet_eigs(4, core::f64::consts::PI).unwrap();
        let init = single_mode_state(4, 1.0);
        let cfg = SolverConfig::new(1e-3, 1.0, Scheme::Etd1)
            .unwrap()
            .with_record_every(1000)
            .unwrap();
        let traj = etd_solve(&init, eta(1.0), &NonlinearitySpec::zero(), &cfg, &eigs).unwrap();
        let last = traj.states.last().unwrap();
        let direct = propagate_linear(&init, eta(1.0), 1.0, &eigs).unwrap();
        for n in 0..4 {
            for i in 0..3 {
                assert!((last.mode(n)[i] - direct.mode(n)[i]).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn natural_to_reduced_conversion_identity() {
        // u0 = mode 1, u_t(0) = u_tt(0) = 0 converts to
        // (u0, A^(1/3) u0, 0): the derivative data is zero, so only the
        // v-component picks up the A^(1/3) u0 shift.
        let eigs = dirichlet_eigs(3, core::f64::consts::PI).unwrap();
        let mut nat = SpectralState::zero(3, Coords::Natural);
        nat.u_hat[0] = c(1.0);
        let red = natural_to_reduced(&nat, &eigs).unwrap();
        let a = fmath::cbrt(eigs.values()[0]);
        assert!((red.u_hat[0] - c(1.0)).norm() < 1e-15);
        assert!((red.v_hat[0] - c(a)).norm() < 1e-15);
        assert!(red.w_hat[0].norm() < 1e-15);
        // and with nonzero derivative data both shifts appear
        let mut nat2 = SpectralState::zero(3, Coords::Natural);
        nat2.u_hat[1] = c(0.5);
        nat2.v_hat[1] = c(-0.25);
        nat2.w_hat[1] = c(0.125);
        let red2 = natural_to_reduced(&nat2, &eigs).unwrap();
        let a2 = fmath::cbrt(eigs.values()[1]);
        assert!((red2.v_hat[1] - c(-0.25 + 0.5 * a2)).norm() < 1e-15);
        assert!((red2.w_hat[1] - c(0.125 - 0.25 * a2)).norm() < 1e-15);
    }

    #[test]
    fn reduction_matches_etd_on_linear_single_mode() {
        // the u-recovery integrates the piecewise-linear interpolant of v,
        // so even the linear problem carries an O(dt^2) gap between the two
        // solvers; dt = 2e-4 puts it well under the 1e-8 target
        let eigs = crate::spectral::EigenSequence::user_supplied(alloc::vec![8.0]).unwrap();
        let cfg = SolverConfig::new(2e-4, 1.0, Scheme::Etd2)
            .unwrap()
            .with_record_every(500)
            .unwrap();
        let u0 = [c(1.0)];
        let v0 = [c(0.0)];
        let w0 = [c(0.0)];
        let red = reduction_solve(&u0, &v0, &w0, eta(2.0), &NonlinearitySpec::zero(), &cfg, &eigs)
            .unwrap();
        let nat = SpectralState::new(u0.to_vec(), v0.to_vec(), w0.to_vec(), Coords::Natural)
            .unwrap();
        let init = natural_to_reduced(&nat, &eigs).unwrap();
        let etd = etd_solve(&init, eta(2.0), &NonlinearitySpec::zero(), &cfg, &eigs).unwrap();
        assert_eq!(red.times.len(), etd.times.len());
        for k in 0..red.times.len() {
            let du = (red.states[k].u_hat[0] - etd.states[k].u_hat[0]).norm();
            assert!(du < 1e-8, "t = {}: {du}", red.times[k]);
        }
    }

    #[test]
    fn illposed_growth_identical_in_both_solvers() {
        // linear, eta = 0.5, mu = 1000: both solvers ride the same growing
        // branches, so the measured log-slopes of ||u|| agree tightly.
        let eigs = crate::spectral::EigenSequence::user_supplied(alloc::vec![1000.0]).unwrap();
        let cfg = SolverConfig::new(1e-3, 2.0, Scheme::Etd2)
            .unwrap()
            .with_record_every(500)
            .unwrap()
            .with_blowup_threshold(1e30)
            .unwrap();
        let u0 = [c(1e-3)];
        let v0 = [c(0.0)];
        let w0 = [c(0.0)];
        let red = reduction_solve(&u0, &v0, &w0, eta(0.5), &NonlinearitySpec::zero(), &cfg, &eigs)
            .unwrap();
        let nat = SpectralState::new(u0.to_vec(), v0.to_vec(), w0.to_vec(), Coords::Natural)
            .unwrap();
        let init = natural_to_reduced(&nat, &eigs).unwrap();
        let etd = etd_solve(&init, eta(0.5), &NonlinearitySpec::zero(), &cfg, &eigs).unwrap();
        assert_eq!(red.regime, Regime::IllPosed);
        // slope of log ||u||_{2/3} between t = 1 and t = 2
        let slope = |traj: &Trajectory| {
            let k1 = traj.times.iter().position(|&t| (t - 1.0).abs() < 1e-9).unwrap();
            let k2 = traj.times.iter().position(|&t| (t - 2.0).abs() < 1e-9).unwrap();
            fmath::ln(traj.u_norms[k2] / traj.u_norms[k1]) / (traj.times[k2] - traj.times[k1])
        };
        let s_red = slope(&red);
        let s_etd = slope(&etd);
        assert_relative_eq!(s_red, s_etd, max_relative = 1e-3);
    }

    #[test]
    fn blowup_is_a_status_not_an_error() {
        // growing regime with a deliberately low threshold
        let eigs = crate::spectral::EigenSequence::user_supplied(alloc::vec![1000.0]).unwrap();
        let cfg = SolverConfig::new(1e-2, 10.0, Scheme::Etd1)
            .unwrap()
            .with_blowup_threshold(10.0)
            .unwrap()
            .with_record_every(7)
            .unwrap();
        let mut init = SpectralState::zero(1, Coords::Reduced);
        init.u_hat[0] = c(1.0);
        init.v_hat[0] = c(1.0);
        let traj = etd_solve(&init, eta(0.5), &NonlinearitySpec::zero(), &cfg, &eigs).unwrap();
        match traj.status {
            TrajectoryStatus::BlowUp { t_star } => {
                assert!(t_star > 0.0 && t_star < 10.0);
                assert_relative_eq!(
                    *traj.times.last().unwrap(),
                    t_star,
                    max_relative = 1e-12
                );
                assert!(*traj.z_norms.last().unwrap() > 10.0);
            }
            other => panic!("expected blow-up, got {other:?}"),
        }
        // every recorded norm is finite
        assert!(traj.z_norms.iter().all(|z| z.is_finite()));
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::new(0.0, 1.0, Scheme::Etd1).is_err());
        assert!(SolverConfig::new(2.0, 1.0, Scheme::Etd1).is_err());
        assert!(SolverConfig::new(0.1, 1.0, Scheme::Etd1)
            .unwrap()
            .with_record_every(0)
            .is_err());
        assert!(SolverConfig::new(0.1, 1.0, Scheme::Etd1)
            .unwrap()
            .with_blowup_threshold(-1.0)
            .is_err());
    }

    #[test]
    fn etd_rejects_natural_coordinates() {
        let eigs = dirichlet_eigs(2, 1.0).unwrap();
        let nat = SpectralState::zero(2, Coords::Natural);
        let cfg = SolverConfig::new(0.1, 1.0, Scheme::Etd1).unwrap();
        assert!(etd_solve(&nat, eta(2.0), &NonlinearitySpec::zero(), &cfg, &eigs).is_err());
    }
}
