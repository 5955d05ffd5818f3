//! Per-mode block operators and their closed forms.
//!
//! With `A` diagonal, both first-order systems decouple into one small
//! complex block per eigenvalue `mu` (write `a = mu^(1/3)`):
//!
//! * `Natural` (unknowns `u, u_t, u_tt`):
//!   `[[0, -1, 0], [0, 0, -1], [a^3, eta a^2, eta a]]`
//! * `Reduced` (unknowns `u, u_t + A^(1/3) u, ...`):
//!   `[[a, -1, 0], [0, 0, -1], [0, a^2, (eta-1) a]]`
//! * `Lambda` (the damped second-order subsystem of the reduced form):
//!   `[[0, -1], [a^2, (eta-1) a]]`
//!
//! Both 3x3 blocks share the characteristic polynomial
//! `(s + a)(s^2 + (eta - 1) a s + a^2)` for the negated block, so the
//! spectrum of the negated operator is `{lam, m1 lam, m2 lam}` over
//! `lam = -a`, with mode-independent multipliers `m1, m2`: the conjugate
//! pair `z, z_bar` in natural form and the quadratic roots `c, d` of
//! `r^2 - (eta - 1) r + 1 = 0` in reduced form (the same set).
//!
//! Operator norms of per-mode blocks are always reported in the state-space
//! metric, i.e. after conjugation by `diag(mu^(2/3), mu^(1/3), 1)`; that
//! weighting is fixed as canonical throughout the crate.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fmath;
use crate::smallmat::{cre, csqrt_real, czero, Mat2, Mat3};
use crate::spectral::{dirichlet_eigs, EigenSequence};

/// Damping strength; the single scalar parameter of the equation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Eta(f64);

impl Eta {
    pub fn new(eta: f64) -> Result<Self> {
        if !eta.is_finite() || eta < 0.0 {
            return Err(Error::InvalidArgument("eta must be finite and nonnegative"));
        }
        Ok(Eta(eta))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Which per-mode block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockKind {
    /// 3x3 block of the natural first-order system.
    Natural,
    /// 3x3 block of the reduced (order-lowered) system.
    Reduced,
    /// 2x2 block of the damped second-order subsystem.
    Lambda,
}

/// The mode-independent spectral multipliers.
///
/// `z` and `z_bar` scale the complex branches of the natural form,
/// `c` and `d` are the roots of `r^2 - (eta - 1) r + 1 = 0` scaling the
/// branches of the reduced form.  For `eta < 3` all four are the same
/// conjugate pair; past the double root at `eta = 3` they are real.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralMultipliers {
    pub z: Complex64,
    pub z_bar: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

/// Multipliers for a given damping strength.
pub fn multipliers(eta: Eta) -> SpectralMultipliers {
    let e = eta.get();
    // 3 + 2 eta - eta^2 = -(eta^2 - 2 eta - 3); one square root serves both
    // formulas through the principal branch.
    let disc = e * e - 2.0 * e - 3.0;
    let root = csqrt_real(disc);
    let half = cre(0.5);
    let em1 = cre(e - 1.0);
    SpectralMultipliers {
        z: (em1 - Complex64::new(0.0, 1.0) * csqrt_real(-disc)) * half,
        z_bar: (em1 + Complex64::new(0.0, 1.0) * csqrt_real(-disc)) * half,
        c: (em1 + root) * half,
        d: (em1 - root) * half,
    }
}

/// A dense realization of one per-mode block.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeBlock {
    pub kind: BlockKind,
    pub eta: f64,
    pub mu: f64,
    /// `mu^(1/3)`.
    pub a: f64,
    pub matrix: BlockMatrix,
}

/// 3x3 for the first-order systems, 2x2 for the subsystem.
#[derive(Clone, Debug, PartialEq)]
pub enum BlockMatrix {
    Three(Mat3),
    Two(Mat2),
}

impl BlockMatrix {
    pub fn as_mat3(&self) -> Option<&Mat3> {
        match self {
            BlockMatrix::Three(m) => Some(m),
            BlockMatrix::Two(_) => None,
        }
    }

    pub fn as_mat2(&self) -> Option<&Mat2> {
        match self {
            BlockMatrix::Three(_) => None,
            BlockMatrix::Two(m) => Some(m),
        }
    }
}

fn check_mu(mu: f64) -> Result<f64> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::InvalidArgument("mu must be positive and finite"));
    }
    Ok(fmath::cbrt(mu))
}

/// The per-mode block for eigenvalue `mu` of `A`.
pub fn mode_block(kind: BlockKind, eta: Eta, mu: f64) -> Result<ModeBlock> {
    let a = check_mu(mu)?;
    let e = eta.get();
    let matrix = match kind {
        BlockKind::Natural => BlockMatrix::Three(Mat3::from_real([
            [0.0, -1.0, 0.0],
            [0.0, 0.0, -1.0],
            [mu, e * a * a, e * a],
        ])),
        BlockKind::Reduced => BlockMatrix::Three(Mat3::from_real([
            [a, -1.0, 0.0],
            [0.0, 0.0, -1.0],
            [0.0, a * a, (e - 1.0) * a],
        ])),
        BlockKind::Lambda => BlockMatrix::Two(Mat2::from_rows([
            [czero(), cre(-1.0)],
            [cre(a * a), cre((e - 1.0) * a)],
        ])),
    };
    Ok(ModeBlock {
        kind,
        eta: e,
        mu,
        a,
        matrix,
    })
}

/// Eigenvalues of the (3x3) block itself, in closed form:
/// `a, m1 a, m2 a` with the kind's multipliers.  For the 2x2 subsystem the
/// pair is `c a, d a`.
pub fn block_eigenvalues(kind: BlockKind, eta: Eta, mu: f64) -> Result<Vec<Complex64>> {
    let a = check_mu(mu)?;
    let m = multipliers(eta);
    let ca = cre(a);
    Ok(match kind {
        BlockKind::Natural => alloc::vec![ca, m.z_bar * ca, m.z * ca],
        BlockKind::Reduced => alloc::vec![ca, m.c * ca, m.d * ca],
        BlockKind::Lambda => alloc::vec![m.c * ca, m.d * ca],
    })
}

/// Spectrum of the **negated** operator over the truncated eigenvalue
/// sequence: triples `(lam, m1 lam, m2 lam)` with `lam = -mu_n^(1/3)`,
/// modes ascending, branches in the order `(1, m1, m2)`.
pub fn closed_form_spectrum(
    kind: BlockKind,
    eta: Eta,
    eigs: &EigenSequence,
) -> Result<Vec<Complex64>> {
    if kind == BlockKind::Lambda {
        return Err(Error::InvalidArgument(
            "closed_form_spectrum covers the 3x3 kinds; use block_eigenvalues for the subsystem",
        ));
    }
    let m = multipliers(eta);
    let (m1, m2) = match kind {
        BlockKind::Natural => (m.z, m.z_bar),
        BlockKind::Reduced => (m.c, m.d),
        BlockKind::Lambda => unreachable!(),
    };
    let mut out = Vec::with_capacity(3 * eigs.len());
    for &mu in eigs.values() {
        let lam = cre(-fmath::cbrt(mu));
        out.push(lam);
        out.push(m1 * lam);
        out.push(m2 * lam);
    }
    Ok(out)
}

/// Closed-form inverse of the per-mode block; `block * inverse = I` to
/// round-off.
pub fn closed_form_inverse(kind: BlockKind, eta: Eta, mu: f64) -> Result<ModeBlock> {
    let a = check_mu(mu)?;
    let e = eta.get();
    let ai = 1.0 / a;
    let matrix = match kind {
        BlockKind::Natural => BlockMatrix::Three(Mat3::from_real([
            [e * ai, e * ai * ai, 1.0 / mu],
            [-1.0, 0.0, 0.0],
            [0.0, -1.0, 0.0],
        ])),
        BlockKind::Reduced => BlockMatrix::Three(Mat3::from_real([
            [ai, (e - 1.0) * ai * ai, 1.0 / mu],
            [0.0, (e - 1.0) * ai, ai * ai],
            [0.0, -1.0, 0.0],
        ])),
        BlockKind::Lambda => BlockMatrix::Two(Mat2::from_rows([
            [cre((e - 1.0) * ai), cre(ai * ai)],
            [cre(-1.0), czero()],
        ])),
    };
    Ok(ModeBlock {
        kind,
        eta: e,
        mu,
        a,
        matrix,
    })
}

/// Rejected candidate for the reduced-block inverse that circulates with an
/// extra `eta` weight in the first entry and `(1 - eta)` factors in place of
/// `(eta - 1)`.  Retained so the regression suite can demonstrate that it
/// fails `block * inverse = I` whenever `eta != 1`.
pub fn reduced_inverse_eta_weighted_variant(eta: Eta, mu: f64) -> Result<Mat3> {
    let a = check_mu(mu)?;
    let e = eta.get();
    let ai = 1.0 / a;
    Ok(Mat3::from_real([
        [e * ai, (1.0 - e) * ai * ai, 1.0 / mu],
        [0.0, (1.0 - e) * ai, ai * ai],
        [0.0, -1.0, 0.0],
    ]))
}

/// Scalar denominator of the reduced resolvent:
/// `(lambda - a)(lambda - c a)(lambda - d a)`.
fn resolvent_denominator(lambda: Complex64, eta: Eta, a: f64) -> (Complex64, [Complex64; 3]) {
    let m = multipliers(eta);
    let poles = [cre(a), m.c * cre(a), m.d * cre(a)];
    let d = (lambda - poles[0]) * (lambda - poles[1]) * (lambda - poles[2]);
    (d, poles)
}

/// `(lambda I - B)^-1` for the reduced 3x3 block, assembled from the scalar
/// closed form (never by dense inversion).  Fails with a near-singular
/// error when `lambda` is within `1e-12 * a` of a per-mode spectral point.
pub fn resolvent_reduced(lambda: Complex64, eta: Eta, mu: f64) -> Result<Mat3> {
    let a = check_mu(mu)?;
    let e = eta.get();
    let (den, poles) = resolvent_denominator(lambda, eta, a);
    for p in poles {
        if (lambda - p).norm() < 1e-12 * a {
            return Err(Error::NearSingular {
                spectral_value: p,
                lambda,
            });
        }
    }
    let inv_den = cre(1.0) / den;
    let la = lambda - cre(a);
    let lh = lambda - cre((e - 1.0) * a);
    let a2 = cre(a * a);
    let m = multipliers(eta);
    let r = Mat3::from_rows([
        [
            (lambda - m.c * cre(a)) * (lambda - m.d * cre(a)),
            -lh,
            cre(1.0),
        ],
        [czero(), la * lh, -la],
        [czero(), la * a2, lambda * la],
    ]);
    Ok(r.scale(inv_den))
}

/// State-space weighting for one mode: `diag(mu^(2/3), mu^(1/3), 1)`.
pub fn z_weights(mu: f64) -> [f64; 3] {
    let a = fmath::cbrt(mu);
    [a * a, a, 1.0]
}

/// Operator norm of a per-mode 3x3 matrix in the state-space metric.
pub fn z_weighted_opnorm(m: &Mat3, mu: f64) -> f64 {
    m.weighted(z_weights(mu)).opnorm()
}

/// One sample of the resolvent scan: `|lambda| * ||(lambda - B)^-1||` in
/// the state-space metric, for a single mode.
pub fn sector_sample(lambda: Complex64, eta: Eta, mu: f64) -> Result<f64> {
    let r = resolvent_reduced(lambda, eta, mu)?;
    Ok(lambda.norm() * z_weighted_opnorm(&r, mu))
}

/// Scan `sup |lambda| * ||(lambda - B)^-1||` over rays `arg lambda` in
/// `angles`, sample moduli `radii`, and all modes.  The supremum is folded
/// in ascending (mode, angle, radius) order.  A sample landing on the
/// spectrum propagates the near-singular error.
///
/// The bound is meaningful in the parabolic regime `eta > 1`; other regimes
/// are still scanned so ill-posedness shows up as a failing or growing scan.
pub fn sector_scan(
    eta: Eta,
    eigs: &EigenSequence,
    angles: &[f64],
    radii: &[f64],
) -> Result<f64> {
    let mut sup = 0.0f64;
    for &mu in eigs.values() {
        for &theta in angles {
            for &r in radii {
                let lambda = Complex64::new(r * fmath::cos(theta), r * fmath::sin(theta));
                let v = sector_sample(lambda, eta, mu)?;
                if v > sup {
                    sup = v;
                }
            }
        }
    }
    Ok(sup)
}

/// Largest real part over the closed-form spectrum of the negated natural
/// operator on the truncation, plus a finite-truncation divergence flag:
/// the flag is set when the per-mode maximum is strictly increasing across
/// the trailing quarter of the modes (the analytic rate in the ill-posed
/// regime is `(1 - eta)/2 * mu^(1/3)`, unbounded in the mode index).
pub fn growth_abscissa(eta: Eta, eigs: &EigenSequence) -> (f64, bool) {
    let e = eta.get();
    let per_mode: Vec<f64> = eigs
        .values()
        .iter()
        .map(|&mu| {
            let a = fmath::cbrt(mu);
            // branches: -a and (1 - eta)/2 * a (twice)
            (-a).max((1.0 - e) / 2.0 * a)
        })
        .collect();
    let sup = per_mode
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let n = per_mode.len();
    let unbounded = if n < 2 {
        false
    } else {
        let window = (n.div_ceil(4) + 1).max(2).min(n);
        per_mode[n - window..]
            .windows(2)
            .all(|w| w[1] > w[0])
    };
    (sup, unbounded)
}

/// Witness value `Re < -B z, z >` in the state-space metric at the boundary
/// damping `eta = 1`, for the single-mode state `z = (u, 2 a u, 0)`.
/// Positive for every nonzero `u`, so the operator is not dissipative.
pub fn dissipativity_witness(mu: f64, u_coeff: Complex64) -> Result<f64> {
    let a = check_mu(mu)?;
    let block = mode_block(BlockKind::Reduced, Eta::new(1.0)?, mu)?;
    let m = block.matrix.as_mat3().expect("reduced block is 3x3");
    let z = [u_coeff, cre(2.0 * a) * u_coeff, czero()];
    let bz = m.mul_vec(&z);
    // < x, y >_Z = a^4 x1 conj(y1) + a^2 x2 conj(y2) + x3 conj(y3)
    let w = [a * a * a * a, a * a, 1.0];
    let mut inner = czero();
    for i in 0..3 {
        inner += cre(w[i]) * bz[i] * z[i].conj();
    }
    Ok(-inner.re)
}

/// The three damping regimes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// `0 <= eta < 1`: no strongly continuous semigroup; spectrum reaches
    /// arbitrarily far into the right half plane.
    IllPosed,
    /// `eta = 1` exactly (floating equality; callers wanting fuzz must
    /// pre-round).
    Boundary,
    /// `eta > 1`: sectorial generator, analytic semigroup.
    Parabolic,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::IllPosed => "IllPosed",
            Regime::Boundary => "Boundary",
            Regime::Parabolic => "Parabolic",
        }
    }
}

/// Classification of a damping strength plus the supporting spectral
/// evidence.
#[derive(Clone, Debug, PartialEq)]
pub struct RegimeReport {
    pub eta: f64,
    pub regime: Regime,
    pub multipliers: SpectralMultipliers,
    pub growth_abscissa: f64,
    pub unbounded_flag: bool,
}

/// Default truncation backing the report evidence.
pub const CLASSIFY_DEFAULT_MODES: usize = 64;

/// Classify `eta` and attach multipliers and the truncated growth abscissa
/// over the default 64-mode Dirichlet basis on `(0, pi)`.
pub fn classify(eta: Eta) -> RegimeReport {
    let e = eta.get();
    let regime = if e < 1.0 {
        Regime::IllPosed
    } else if e == 1.0 {
        Regime::Boundary
    } else {
        Regime::Parabolic
    };
    let eigs = dirichlet_eigs(CLASSIFY_DEFAULT_MODES, core::f64::consts::PI)
        .expect("default basis parameters are valid");
    let (sup, unbounded) = growth_abscissa(eta, &eigs);
    RegimeReport {
        eta: e,
        regime,
        multipliers: multipliers(eta),
        growth_abscissa: sup,
        unbounded_flag: unbounded,
    }
}

/// Both published candidates for the eigenvalue pair of the 2x2 subsystem
/// block at one mode: the pair `(c a, d a)` consistent with the block's
/// characteristic polynomial (confirmed by the dense oracle), and the
/// alternate form `(eta +/- sqrt(eta^2 - 1)) a` that circulates for the
/// same operator but does not match the stated block.  Exposed so reports
/// can show both rather than silently picking one.
pub struct LambdaSpectrumPredictions {
    pub from_block: [Complex64; 2],
    pub alternate: [Complex64; 2],
}

pub fn lambda_spectrum_predictions(eta: Eta, mu: f64) -> Result<LambdaSpectrumPredictions> {
    let a = check_mu(mu)?;
    let m = multipliers(eta);
    let e = eta.get();
    let s = csqrt_real(e * e - 1.0);
    Ok(LambdaSpectrumPredictions {
        from_block: [m.c * cre(a), m.d * cre(a)],
        alternate: [(cre(e) + s) * cre(a), (cre(e) - s) * cre(a)],
    })
}

/// Coefficients `(p2, p1, p0)` of `det(s I + M) = s^3 + p2 s^2 + p1 s + p0`
/// computed numerically from a 3x3 block matrix; used to tie the natural
/// and reduced spectra together through the shared factorization
/// `(s + a)(s^2 + (eta - 1) a s + a^2)`.
pub fn negated_charpoly_coeffs(m: &Mat3) -> [Complex64; 3] {
    // det(sI + M) = s^3 + tr(M) s^2 + c2(M) s + det(M),
    // c2 = sum of principal 2x2 minors.
    let e = &m.0;
    let tr = e[0][0] + e[1][1] + e[2][2];
    let c2 = e[0][0] * e[1][1] - e[0][1] * e[1][0] + e[0][0] * e[2][2] - e[0][2] * e[2][0]
        + e[1][1] * e[2][2]
        - e[1][2] * e[2][1];
    [tr, c2, m.det()]
}
