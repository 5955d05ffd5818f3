//! One function per subcommand; each returns the artifact text so the
//! binary (and the tests) can decide where it goes.

use mgt_core::blocks::{
    classify, closed_form_spectrum, dissipativity_witness, mode_block, sector_sample, BlockKind,
    Eta,
};
use mgt_core::nonlinear::NonlinearitySpec;
use mgt_core::semigroup::{
    decay_rate, predicted_growth_rate, smoothing_constant, RateScanRow,
};
use mgt_core::solver::{
    etd_solve, natural_to_reduced, reduction_solve, Scheme, SolverConfig, Trajectory,
};
use mgt_core::spectral::{dirichlet_eigs, Coords, EigenSequence, SpectralState};
use mgt_core::Complex64;
use nalgebra::DMatrix;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::format::{f17, Csv};
use crate::CliError;

/// Which 3x3 system a spectrum request refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectrumKind {
    Natural,
    Reduced,
}

impl SpectrumKind {
    fn block_kind(self) -> BlockKind {
        match self {
            SpectrumKind::Natural => BlockKind::Natural,
            SpectrumKind::Reduced => BlockKind::Reduced,
        }
    }
}

impl std::str::FromStr for SpectrumKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "natural" => Ok(SpectrumKind::Natural),
            "reduced" => Ok(SpectrumKind::Reduced),
            other => Err(format!("unknown kind '{other}' (expected natural|reduced)")),
        }
    }
}

fn basis(n_modes: usize, length: f64) -> Result<EigenSequence, CliError> {
    Ok(dirichlet_eigs(n_modes, length)?)
}

/// Closed-form and dense-oracle eigenvalues side by side, one row per
/// (mode, branch).
pub fn spectrum_csv(
    eta: f64,
    n_modes: usize,
    length: f64,
    kind: SpectrumKind,
) -> Result<String, CliError> {
    let eta = Eta::new(eta)?;
    let eigs = basis(n_modes, length)?;
    let closed = closed_form_spectrum(kind.block_kind(), eta, &eigs)?;
    let mut csv = Csv::with_header(&[
        "mode",
        "mu",
        "branch",
        "closed_re",
        "closed_im",
        "oracle_re",
        "oracle_im",
    ]);
    for (n, &mu) in eigs.values().iter().enumerate() {
        let block = mode_block(kind.block_kind(), eta, mu)?;
        let m3 = block.matrix.as_mat3().expect("3x3 kind");
        let dense = DMatrix::from_fn(3, 3, |i, j| -m3.0[i][j].re);
        let oracle: Vec<Complex64> = dense.complex_eigenvalues().iter().copied().collect();
        let cf = &closed[3 * n..3 * n + 3];
        let paired = pair_to_closed(cf, &oracle);
        for branch in 0..3 {
            csv.row(&[
                (n + 1).to_string(),
                f17(mu),
                branch.to_string(),
                f17(cf[branch].re),
                f17(cf[branch].im),
                f17(paired[branch].re),
                f17(paired[branch].im),
            ]);
        }
    }
    Ok(csv.finish())
}

/// Assign the three oracle eigenvalues to the closed-form branches by the
/// permutation with the smallest worst-case distance.
fn pair_to_closed(closed: &[Complex64], oracle: &[Complex64]) -> [Complex64; 3] {
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut best = PERMS[0];
    let mut best_err = f64::INFINITY;
    for p in PERMS {
        let err = (0..3)
            .map(|i| (closed[i] - oracle[p[i]]).norm())
            .fold(0.0f64, f64::max);
        if err < best_err {
            best_err = err;
            best = p;
        }
    }
    [oracle[best[0]], oracle[best[1]], oracle[best[2]]]
}

#[derive(Serialize)]
struct RegimeJson {
    eta: f64,
    regime: &'static str,
    z: [f64; 2],
    c: [f64; 2],
    d: [f64; 2],
    growth_abscissa: f64,
    unbounded_flag: bool,
}

/// Regime classification report as JSON.
pub fn regime_json(eta: f64) -> Result<String, CliError> {
    let report = classify(Eta::new(eta)?);
    let m = &report.multipliers;
    let doc = RegimeJson {
        eta: report.eta,
        regime: report.regime.as_str(),
        z: [m.z.re, m.z.im],
        c: [m.c.re, m.c.im],
        d: [m.d.re, m.d.im],
        growth_abscissa: report.growth_abscissa,
        unbounded_flag: report.unbounded_flag,
    };
    serde_json::to_string_pretty(&doc)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| CliError::Numerical(format!("json encoding: {e}")))
}

/// Resolvent scan over rays: one row per (angle, radius) sample with the
/// per-sample supremum of `|lambda| ||(lambda - B)^-1||` over the modes.
pub fn resolvent_scan_csv(
    eta: f64,
    n_modes: usize,
    length: f64,
    angles: &[f64],
    radii: &[f64],
) -> Result<String, CliError> {
    let eta = Eta::new(eta)?;
    let eigs = basis(n_modes, length)?;
    let samples: Vec<(f64, f64)> = angles
        .iter()
        .flat_map(|&a| radii.iter().map(move |&r| (a, r)))
        .collect();
    let rows: Vec<Result<(f64, f64, f64), CliError>> = samples
        .par_iter()
        .map(|&(angle, r)| {
            let lambda = Complex64::new(r * angle.cos(), r * angle.sin());
            let mut m_local = 0.0f64;
            for &mu in eigs.values() {
                let v = sector_sample(lambda, eta, mu)?;
                if v > m_local {
                    m_local = v;
                }
            }
            Ok((angle, r, m_local))
        })
        .collect();
    let mut csv = Csv::with_header(&["arg", "r", "m_local"]);
    for row in rows {
        let (angle, r, m_local) = row?;
        csv.row(&[f17(angle), f17(r), f17(m_local)]);
    }
    Ok(csv.finish())
}

/// Ill-posedness demonstration: per-mode analytic growth rate next to the
/// least-squares measured rate.  `detailed` switches to the full rate-scan
/// layout `(mode_index, mu, re_rate_predicted, re_rate_measured, abs_error)`.
pub fn illposed_demo_csv(
    eta: f64,
    n_modes: usize,
    length: f64,
    window: [f64; 2],
    detailed: bool,
) -> Result<String, CliError> {
    let eta = Eta::new(eta)?;
    let eigs = basis(n_modes, length)?;
    let rows: Vec<Result<RateScanRow, CliError>> = eigs
        .values()
        .par_iter()
        .enumerate()
        .map(|(i, &mu)| {
            let predicted = predicted_growth_rate(eta, mu);
            let measured = -decay_rate(eta, mu, window)?;
            Ok(RateScanRow {
                mode_index: i + 1,
                mu,
                re_rate_predicted: predicted,
                re_rate_measured: measured,
                abs_error: (measured - predicted).abs(),
            })
        })
        .collect();
    let mut csv = if detailed {
        Csv::with_header(&[
            "mode_index",
            "mu",
            "re_rate_predicted",
            "re_rate_measured",
            "abs_error",
        ])
    } else {
        Csv::with_header(&["mode", "predicted_rate", "measured_rate"])
    };
    for row in rows {
        let r = row?;
        if detailed {
            csv.row(&[
                r.mode_index.to_string(),
                f17(r.mu),
                f17(r.re_rate_predicted),
                f17(r.re_rate_measured),
                f17(r.abs_error),
            ]);
        } else {
            csv.row(&[
                r.mode_index.to_string(),
                f17(r.re_rate_predicted),
                f17(r.re_rate_measured),
            ]);
        }
    }
    Ok(csv.finish())
}

/// Smoothing-estimate sweep: `sup_n mu_n^(alpha/3) ||P_n(t)||` per time.
pub fn smoothing_csv(
    eta: f64,
    n_modes: usize,
    length: f64,
    alpha: f64,
    times: &[f64],
) -> Result<String, CliError> {
    let eta = Eta::new(eta)?;
    let eigs = basis(n_modes, length)?;
    let rows: Vec<Result<(f64, f64), CliError>> = times
        .par_iter()
        .map(|&t| Ok((t, smoothing_constant(eta, alpha, t, &eigs)?)))
        .collect();
    let mut csv = Csv::with_header(&["t", "alpha", "weighted_sup"]);
    for row in rows {
        let (t, sup) = row?;
        csv.row(&[f17(t), f17(alpha), f17(sup)]);
    }
    Ok(csv.finish())
}

/// Dissipativity witness at the boundary damping, as a bare JSON number.
pub fn dissipativity_json(mu: f64, u_re: f64, u_im: f64) -> Result<String, CliError> {
    let w = dissipativity_witness(mu, Complex64::new(u_re, u_im))?;
    Ok(format!("{}\n", serde_json::Number::from_f64(w).ok_or_else(
        || CliError::Numerical("witness is not finite".into()),
    )?))
}

/// Initial-data shapes for `evolve`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitialData {
    /// `u(0) = amplitude * phi_1`, zero velocity and acceleration.
    Mode1,
    /// Seeded uniform real coefficients in `[-amplitude, amplitude]` on all
    /// three natural components.
    Random,
}

impl std::str::FromStr for InitialData {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mode1" => Ok(InitialData::Mode1),
            "random" => Ok(InitialData::Random),
            other => Err(format!("unknown initial data '{other}' (expected mode1|random)")),
        }
    }
}

/// Which solver backs `evolve`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvolveMethod {
    Etd,
    Reduction,
}

impl std::str::FromStr for EvolveMethod {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "etd" => Ok(EvolveMethod::Etd),
            "reduction" => Ok(EvolveMethod::Reduction),
            other => Err(format!("unknown method '{other}' (expected etd|reduction)")),
        }
    }
}

pub struct EvolveParams {
    pub eta: f64,
    pub n_modes: usize,
    pub length: f64,
    pub nonlinearity: NonlinearitySpec,
    pub solver: SolverConfig,
    pub method: EvolveMethod,
    pub initial: InitialData,
    pub amplitude: f64,
    pub seed: u64,
}

/// Run the time integration and serialize the trajectory.
pub fn evolve_csv(params: &EvolveParams) -> Result<String, CliError> {
    let eta = Eta::new(params.eta)?;
    let eigs = basis(params.n_modes, params.length)?;
    let n = eigs.len();
    let mut natural = SpectralState::zero(n, Coords::Natural);
    match params.initial {
        InitialData::Mode1 => {
            natural.u_hat[0] = Complex64::new(params.amplitude, 0.0);
        }
        InitialData::Random => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(params.seed);
            let draw = |rng: &mut rand_chacha::ChaCha8Rng| {
                let x = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0;
                Complex64::new(params.amplitude * x, 0.0)
            };
            for k in 0..n {
                natural.u_hat[k] = draw(&mut rng);
                natural.v_hat[k] = draw(&mut rng);
                natural.w_hat[k] = draw(&mut rng);
            }
        }
    }
    let traj = match params.method {
        EvolveMethod::Etd => {
            let initial = natural_to_reduced(&natural, &eigs)?;
            etd_solve(&initial, eta, &params.nonlinearity, &params.solver, &eigs)?
        }
        EvolveMethod::Reduction => reduction_solve(
            &natural.u_hat,
            &natural.v_hat,
            &natural.w_hat,
            eta,
            &params.nonlinearity,
            &params.solver,
            &eigs,
        )?,
    };
    Ok(trajectory_csv(&traj))
}

/// Trajectory rows: `(t, z_norm, x23_norm_u, x13_norm_v, x0_norm_w, status)`.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut csv = Csv::with_header(&[
        "t",
        "z_norm",
        "x23_norm_u",
        "x13_norm_v",
        "x0_norm_w",
        "status",
    ]);
    let status = traj.status.as_str();
    for k in 0..traj.times.len() {
        csv.row(&[
            f17(traj.times[k]),
            f17(traj.z_norms[k]),
            f17(traj.u_norms[k]),
            f17(traj.v_norms[k]),
            f17(traj.w_norms[k]),
            status.to_string(),
        ]);
    }
    csv.finish()
}

/// Shared helper for evolve parameter plumbing.
pub fn build_solver_config(
    dt: f64,
    t_final: f64,
    scheme: Scheme,
    blowup_threshold: f64,
    record_every: usize,
) -> Result<SolverConfig, CliError> {
    Ok(SolverConfig::new(dt, t_final, scheme)?
        .with_blowup_threshold(blowup_threshold)?
        .with_record_every(record_every)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectrum_eta_one_contains_conjugate_pair() {
        let text = spectrum_csv(1.0, 1, core::f64::consts::PI, SpectrumKind::Reduced).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].starts_with("mode,mu,branch"));
        // closed-form and oracle columns agree to 1e-9 on every row
        for line in &lines[1..] {
            let f: Vec<&str> = line.split(',').collect();
            let (cre, cim): (f64, f64) = (f[3].parse().unwrap(), f[4].parse().unwrap());
            let (ore, oim): (f64, f64) = (f[5].parse().unwrap(), f[6].parse().unwrap());
            assert!(((cre - ore).powi(2) + (cim - oim).powi(2)).sqrt() < 1e-9);
        }
        // the branch set is {-1, -i, +i}
        let mut found_real = false;
        let mut found_imag = 0u32;
        for line in &lines[1..] {
            let f: Vec<&str> = line.split(',').collect();
            let (re, im): (f64, f64) = (f[3].parse().unwrap(), f[4].parse().unwrap());
            if (re + 1.0).abs() < 1e-12 && im.abs() < 1e-12 {
                found_real = true;
            }
            if re.abs() < 1e-12 && (im.abs() - 1.0).abs() < 1e-12 {
                found_imag += 1;
            }
        }
        assert!(found_real);
        assert_eq!(found_imag, 2);
    }

    #[test]
    fn regime_json_shape() {
        let text = regime_json(0.5).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(doc["regime"], "IllPosed");
        assert_eq!(doc["unbounded_flag"], true);
        assert!(doc["z"].as_array().unwrap().len() == 2);
        // field order is stable (struct serialization)
        let first_key = text.lines().nth(1).unwrap();
        assert!(first_key.contains("\"eta\""));
    }

    #[test]
    fn dissipativity_json_value() {
        let text = dissipativity_json(8.0, 1.0, 0.0).unwrap();
        let v: f64 = serde_json::from_str(&text).unwrap();
        assert!((v - 32.0).abs() < 1e-10);
    }

    #[test]
    fn evolve_blowup_exits_as_result() {
        let params = EvolveParams {
            eta: 0.5,
            n_modes: 4,
            length: 0.2,
            nonlinearity: NonlinearitySpec::zero(),
            solver: build_solver_config(1e-2, 10.0, Scheme::Etd1, 1e3, 5).unwrap(),
            method: EvolveMethod::Etd,
            initial: InitialData::Mode1,
            amplitude: 1.0,
            seed: 0,
        };
        let text = evolve_csv(&params).unwrap();
        assert!(text.lines().last().unwrap().ends_with("blow_up"));
    }
}
