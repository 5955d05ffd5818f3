//! Dense complex 2x2 / 3x3 matrix kernels.
//!
//! Everything the per-mode algebra needs: products, adjugate inverses,
//! operator norms (largest singular value, computed from the closed-form
//! eigenvalues of the 3x3 Hermitian Gram matrix rather than by iteration),
//! the matrix exponential by scaling-and-squaring, and the
//! `(exp(M), phi1(M), phi2(M))` triple used by the exponential integrators,
//! where `phi1(M) = M^-1 (e^M - I)` and `phi2(M) = M^-2 (e^M - I - M)`.

use num_complex::Complex64;

use crate::fmath;

pub type C64 = Complex64;

/// `Complex64` zero.
#[inline]
pub fn czero() -> C64 {
    C64::new(0.0, 0.0)
}

/// `Complex64` from a real.
#[inline]
pub fn cre(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Principal square root of a real number, as a complex value.
/// Negative inputs land on the positive imaginary axis.
#[inline]
pub fn csqrt_real(x: f64) -> C64 {
    if x >= 0.0 {
        C64::new(fmath::sqrt(x), 0.0)
    } else {
        C64::new(0.0, fmath::sqrt(-x))
    }
}

// ---------------------------------------------------------------------------
// 3x3
// ---------------------------------------------------------------------------

/// Dense complex 3x3 matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat3(pub [[C64; 3]; 3]);

impl Mat3 {
    pub fn zero() -> Self {
        Mat3([[czero(); 3]; 3])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            m.0[i][i] = cre(1.0);
        }
        m
    }

    pub fn from_rows(rows: [[C64; 3]; 3]) -> Self {
        Mat3(rows)
    }

    /// Build from real entries.
    pub fn from_real(rows: [[f64; 3]; 3]) -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = cre(rows[i][j]);
            }
        }
        m
    }

    pub fn add(&self, rhs: &Mat3) -> Mat3 {
        let mut m = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[i][j] + rhs.0[i][j];
            }
        }
        m
    }

    pub fn sub(&self, rhs: &Mat3) -> Mat3 {
        let mut m = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[i][j] - rhs.0[i][j];
            }
        }
        m
    }

    pub fn scale(&self, s: C64) -> Mat3 {
        let mut m = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[i][j] * s;
            }
        }
        m
    }

    pub fn mul(&self, rhs: &Mat3) -> Mat3 {
        let mut m = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = czero();
                for k in 0..3 {
                    acc += self.0[i][k] * rhs.0[k][j];
                }
                m.0[i][j] = acc;
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[C64; 3]) -> [C64; 3] {
        let mut out = [czero(); 3];
        for i in 0..3 {
            out[i] = self.0[i][0] * v[0] + self.0[i][1] * v[1] + self.0[i][2] * v[2];
        }
        out
    }

    pub fn det(&self) -> C64 {
        let e = &self.0;
        e[0][0] * (e[1][1] * e[2][2] - e[1][2] * e[2][1])
            - e[0][1] * (e[1][0] * e[2][2] - e[1][2] * e[2][0])
            + e[0][2] * (e[1][0] * e[2][1] - e[1][1] * e[2][0])
    }

    /// Adjugate inverse; `None` when the determinant underflows relative to
    /// the matrix scale.
    pub fn inverse(&self) -> Option<Mat3> {
        let e = &self.0;
        let det = self.det();
        let scale = self.max_abs();
        if det.norm() <= 1e-300 || det.norm() < 1e-14 * scale * scale * scale {
            return None;
        }
        let inv_det = cre(1.0) / det;
        let mut adj = Mat3::zero();
        // adj[j][i] = cofactor(i, j)
        adj.0[0][0] = e[1][1] * e[2][2] - e[1][2] * e[2][1];
        adj.0[1][0] = -(e[1][0] * e[2][2] - e[1][2] * e[2][0]);
        adj.0[2][0] = e[1][0] * e[2][1] - e[1][1] * e[2][0];
        adj.0[0][1] = -(e[0][1] * e[2][2] - e[0][2] * e[2][1]);
        adj.0[1][1] = e[0][0] * e[2][2] - e[0][2] * e[2][0];
        adj.0[2][1] = -(e[0][0] * e[2][1] - e[0][1] * e[2][0]);
        adj.0[0][2] = e[0][1] * e[1][2] - e[0][2] * e[1][1];
        adj.0[1][2] = -(e[0][0] * e[1][2] - e[0][2] * e[1][0]);
        adj.0[2][2] = e[0][0] * e[1][1] - e[0][1] * e[1][0];
        Some(adj.scale(inv_det))
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                let a = self.0[i][j].norm();
                if a > m {
                    m = a;
                }
            }
        }
        m
    }

    /// Infinity norm (max absolute row sum); used to pick the squaring count.
    pub fn norm_inf(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..3 {
            let s = self.0[i][0].norm() + self.0[i][1].norm() + self.0[i][2].norm();
            if s > m {
                m = s;
            }
        }
        m
    }

    /// Operator 2-norm (largest singular value), via the closed-form largest
    /// eigenvalue of the Hermitian Gram matrix `M^H M`.
    pub fn opnorm(&self) -> f64 {
        // Gram matrix G = M^H M (Hermitian positive semidefinite).
        let mut g = [[czero(); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = czero();
                for k in 0..3 {
                    acc += self.0[k][i].conj() * self.0[k][j];
                }
                g[i][j] = acc;
            }
        }
        let lam = herm3_eigmax(&g);
        fmath::sqrt(if lam > 0.0 { lam } else { 0.0 })
    }

    /// Similarity conjugation by a positive diagonal weight:
    /// `diag(w) * M * diag(w)^-1`.
    pub fn weighted(&self, w: [f64; 3]) -> Mat3 {
        let mut m = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[i][j] * cre(w[i] / w[j]);
            }
        }
        m
    }

    /// Drop imaginary round-off; valid when the matrix is known to be real
    /// in exact arithmetic (exponentials of real blocks).
    pub fn re_part(&self) -> Mat3 {
        let mut m = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = cre(self.0[i][j].re);
            }
        }
        m
    }

    /// Matrix exponential by Taylor scaling-and-squaring (shared engine
    /// with the phi functions; see [`phi_triple3`]).
    pub fn expm(&self) -> Mat3 {
        phi_triple3(self).0
    }
}

/// Largest eigenvalue of a 3x3 Hermitian matrix, by the trigonometric
/// closed form for the characteristic cubic.
fn herm3_eigmax(h: &[[C64; 3]; 3]) -> f64 {
    let d0 = h[0][0].re;
    let d1 = h[1][1].re;
    let d2 = h[2][2].re;
    let p1 = h[0][1].norm_sqr() + h[0][2].norm_sqr() + h[1][2].norm_sqr();
    let dmax = fmath::abs(d0).max(fmath::abs(d1)).max(fmath::abs(d2));
    if p1 <= 1e-30 * (1.0 + dmax * dmax) {
        return d0.max(d1).max(d2);
    }
    let q = (d0 + d1 + d2) / 3.0;
    let p2 = (d0 - q) * (d0 - q) + (d1 - q) * (d1 - q) + (d2 - q) * (d2 - q) + 2.0 * p1;
    let p = fmath::sqrt(p2 / 6.0);
    // B = (H - q I) / p
    let mut b = [[czero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let v = if i == j { h[i][j] - cre(q) } else { h[i][j] };
            b[i][j] = v / cre(p);
        }
    }
    let detb = Mat3(b).det().re;
    let r = (detb / 2.0).clamp(-1.0, 1.0);
    let phi = fmath::acos(r) / 3.0;
    q + 2.0 * p * fmath::cos(phi)
}

/// `(exp(M), phi1(M), phi2(M))` evaluated together.
///
/// For small norm the three Taylor series are summed directly; otherwise
/// `M` is scaled by `2^-k` until its infinity norm is at most 0.25, the
/// series are summed, and the scaling is undone with the doubling
/// identities
///
/// ```text
/// exp(2M)  = E^2
/// phi1(2M) = (E + I) phi1 / 2
/// phi2(2M) = (phi1^2 + 2 phi2) / 4
/// ```
///
/// which is the scaling-and-squaring of the augmented exponential and is
/// well defined for defective blocks.
pub fn phi_triple3(m: &Mat3) -> (Mat3, Mat3, Mat3) {
    let norm = m.norm_inf();
    let mut k = 0u32;
    let mut scaled = *m;
    if norm > 0.25 {
        // smallest k with norm / 2^k <= 0.25
        let mut n = norm;
        while n > 0.25 && k < 64 {
            n *= 0.5;
            k += 1;
        }
        scaled = m.scale(cre(fmath::pow(2.0, -(k as f64))));
    }
    let (mut e, mut p1, mut p2) = phi_series3(&scaled);
    for _ in 0..k {
        let p2_new = p1.mul(&p1).add(&p2.scale(cre(2.0))).scale(cre(0.25));
        let p1_new = e.add(&Mat3::identity()).mul(&p1).scale(cre(0.5));
        e = e.mul(&e);
        p1 = p1_new;
        p2 = p2_new;
    }
    (e, p1, p2)
}

/// Direct Taylor sums for `exp`, `phi1`, `phi2`; accurate to well below
/// 1e-15 for `norm_inf <= 0.25`.
fn phi_series3(m: &Mat3) -> (Mat3, Mat3, Mat3) {
    let mut e = Mat3::identity();
    let mut p1 = Mat3::identity();
    let mut p2 = Mat3::identity().scale(cre(0.5));
    let mut term = Mat3::identity();
    let mut fact = 1.0f64;
    for j in 1..=16u64 {
        term = term.mul(m);
        fact *= j as f64;
        e = e.add(&term.scale(cre(1.0 / fact)));
        p1 = p1.add(&term.scale(cre(1.0 / (fact * (j + 1) as f64))));
        p2 = p2.add(&term.scale(cre(1.0 / (fact * ((j + 1) * (j + 2)) as f64))));
    }
    (e, p1, p2)
}

// ---------------------------------------------------------------------------
// 2x2
// ---------------------------------------------------------------------------

/// Dense complex 2x2 matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub fn zero() -> Self {
        Mat2([[czero(); 2]; 2])
    }

    pub fn identity() -> Self {
        Mat2([[cre(1.0), czero()], [czero(), cre(1.0)]])
    }

    pub fn from_rows(rows: [[C64; 2]; 2]) -> Self {
        Mat2(rows)
    }

    pub fn add(&self, rhs: &Mat2) -> Mat2 {
        let mut m = Self::zero();
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] = self.0[i][j] + rhs.0[i][j];
            }
        }
        m
    }

    pub fn scale(&self, s: C64) -> Mat2 {
        let mut m = Self::zero();
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] = self.0[i][j] * s;
            }
        }
        m
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let mut m = Self::zero();
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] = self.0[i][0] * rhs.0[0][j] + self.0[i][1] * rhs.0[1][j];
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[C64; 2]) -> [C64; 2] {
        [
            self.0[0][0] * v[0] + self.0[0][1] * v[1],
            self.0[1][0] * v[0] + self.0[1][1] * v[1],
        ]
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn inverse(&self) -> Option<Mat2> {
        let det = self.det();
        let scale = self.max_abs();
        if det.norm() <= 1e-300 || det.norm() < 1e-14 * scale * scale {
            return None;
        }
        let inv_det = cre(1.0) / det;
        Some(Mat2([
            [self.0[1][1] * inv_det, -self.0[0][1] * inv_det],
            [-self.0[1][0] * inv_det, self.0[0][0] * inv_det],
        ]))
    }

    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                let a = self.0[i][j].norm();
                if a > m {
                    m = a;
                }
            }
        }
        m
    }

    pub fn norm_inf(&self) -> f64 {
        let r0 = self.0[0][0].norm() + self.0[0][1].norm();
        let r1 = self.0[1][0].norm() + self.0[1][1].norm();
        r0.max(r1)
    }

    /// Operator 2-norm from the closed-form singular values.
    pub fn opnorm(&self) -> f64 {
        let f2 = self.0[0][0].norm_sqr()
            + self.0[0][1].norm_sqr()
            + self.0[1][0].norm_sqr()
            + self.0[1][1].norm_sqr();
        let d = self.det().norm();
        let disc = f2 * f2 - 4.0 * d * d;
        let disc = if disc > 0.0 { disc } else { 0.0 };
        fmath::sqrt((f2 + fmath::sqrt(disc)) / 2.0)
    }

    pub fn weighted(&self, w: [f64; 2]) -> Mat2 {
        let mut m = Self::zero();
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] = self.0[i][j] * cre(w[i] / w[j]);
            }
        }
        m
    }

    pub fn re_part(&self) -> Mat2 {
        let mut m = Self::zero();
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] = cre(self.0[i][j].re);
            }
        }
        m
    }
}

/// `(exp(M), phi1(M), phi2(M))` for 2x2 blocks; same scheme as
/// [`phi_triple3`].
pub fn phi_triple2(m: &Mat2) -> (Mat2, Mat2, Mat2) {
    let norm = m.norm_inf();
    let mut k = 0u32;
    let mut scaled = *m;
    if norm > 0.25 {
        let mut n = norm;
        while n > 0.25 && k < 64 {
            n *= 0.5;
            k += 1;
        }
        scaled = m.scale(cre(fmath::pow(2.0, -(k as f64))));
    }
    let (mut e, mut p1, mut p2) = phi_series2(&scaled);
    for _ in 0..k {
        let p2_new = p1.mul(&p1).add(&p2.scale(cre(2.0))).scale(cre(0.25));
        let p1_new = e.add(&Mat2::identity()).mul(&p1).scale(cre(0.5));
        e = e.mul(&e);
        p1 = p1_new;
        p2 = p2_new;
    }
    (e, p1, p2)
}

fn phi_series2(m: &Mat2) -> (Mat2, Mat2, Mat2) {
    let mut e = Mat2::identity();
    let mut p1 = Mat2::identity();
    let mut p2 = Mat2::identity().scale(cre(0.5));
    let mut term = Mat2::identity();
    let mut fact = 1.0f64;
    for j in 1..=16u64 {
        term = term.mul(m);
        fact *= j as f64;
        e = e.add(&term.scale(cre(1.0 / fact)));
        p1 = p1.add(&term.scale(cre(1.0 / (fact * (j + 1) as f64))));
        p2 = p2.add(&term.scale(cre(1.0 / (fact * ((j + 1) * (j + 2)) as f64))));
    }
    (e, p1, p2)
}

// ---------------------------------------------------------------------------
// Scalar phi functions (used by the first-order recovery equation).
// ---------------------------------------------------------------------------

/// Scalar `phi1(m) = (e^m - 1)/m`, evaluated without cancellation.
pub fn phi1_scalar(m: f64) -> f64 {
    if fmath::abs(m) < 1e-300 {
        return 1.0;
    }
    fmath::expm1(m) / m
}

/// Scalar `phi2(m) = (e^m - 1 - m)/m^2`; series below 0.1 to avoid
/// cancellation.
pub fn phi2_scalar(m: f64) -> f64 {
    if fmath::abs(m) <= 0.1 {
        // sum_{k>=0} m^k / (k+2)!
        let mut acc = 0.0f64;
        let mut term = 0.5f64;
        let mut k = 0u64;
        loop {
            acc += term;
            k += 1;
            term *= m / ((k + 2) as f64);
            if fmath::abs(term) < 1e-20 {
                break;
            }
        }
        acc
    } else {
        (fmath::expm1(m) - m) / (m * m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sample() -> Mat3 {
        Mat3::from_rows([
            [C64::new(0.3, -0.1), C64::new(-1.0, 0.4), C64::new(0.2, 0.0)],
            [C64::new(0.0, 0.7), C64::new(0.5, 0.0), C64::new(-0.3, -0.2)],
            [C64::new(1.1, 0.0), C64::new(0.0, -0.9), C64::new(0.4, 0.1)],
        ])
    }

    #[test]
    fn inverse_roundtrip() {
        let m = sample();
        let inv = m.inverse().unwrap();
        let prod = m.mul(&inv);
        let res = prod.sub(&Mat3::identity()).max_abs();
        assert!(res < 1e-14, "residual {res}");
    }

    #[test]
    fn opnorm_matches_definition_on_diagonal() {
        let mut m = Mat3::zero();
        m.0[0][0] = C64::new(0.0, -3.0);
        m.0[1][1] = cre(2.0);
        m.0[2][2] = cre(-0.5);
        assert_relative_eq!(m.opnorm(), 3.0, max_relative = 1e-12);
    }

    #[test]
    fn opnorm_dominates_column_action() {
        let m = sample();
        for j in 0..3 {
            let v = [m.0[0][j], m.0[1][j], m.0[2][j]];
            let norm = fmath::sqrt(v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr());
            assert!(m.opnorm() + 1e-12 >= norm);
        }
    }

    #[test]
    fn phi_triple_satisfies_defining_identities() {
        for scale in [0.05f64, 0.7, 4.0, 40.0] {
            let m = sample().scale(cre(scale));
            let (e, p1, p2) = phi_triple3(&m);
            // M * phi1 = E - I
            let lhs = m.mul(&p1);
            let rhs = e.sub(&Mat3::identity());
            let err = lhs.sub(&rhs).max_abs() / (1.0 + e.max_abs());
            assert!(err < 1e-12, "phi1 identity at scale {scale}: {err}");
            // M^2 * phi2 = E - I - M
            let lhs2 = m.mul(&m).mul(&p2);
            let rhs2 = e.sub(&Mat3::identity()).sub(&m);
            let err2 = lhs2.sub(&rhs2).max_abs() / (1.0 + e.max_abs() + m.max_abs());
            assert!(err2 < 1e-11, "phi2 identity at scale {scale}: {err2}");
        }
    }

    #[test]
    fn phi2x2_identities() {
        let m = Mat2::from_rows([
            [C64::new(0.0, 0.0), cre(-1.0)],
            [cre(9.0), C64::new(3.0, 0.0)],
        ]);
        let (e, p1, p2) = phi_triple2(&m);
        let err = m
            .mul(&p1)
            .add(&Mat2::identity())
            .add(&e.scale(cre(-1.0)))
            .max_abs()
            / (1.0 + e.max_abs());
        assert!(err < 1e-12);
        let lhs2 = m.mul(&m).mul(&p2);
        let mut rhs2 = e;
        rhs2 = rhs2.add(&Mat2::identity().scale(cre(-1.0)));
        rhs2 = rhs2.add(&m.scale(cre(-1.0)));
        let err2 = lhs2.add(&rhs2.scale(cre(-1.0))).max_abs() / (1.0 + e.max_abs());
        assert!(err2 < 1e-11);
    }

    #[test]
    fn scalar_phis_match_series() {
        // the alternating series oracle is trustworthy only for moderate m
        for m in [-2.0, -1.0, -0.05, 0.0, 0.03, 2.0] {
            let p1 = phi1_scalar(m);
            let p2 = phi2_scalar(m);
            let mut s1 = 0.0f64;
            let mut s2 = 0.0f64;
            let mut term = 1.0f64;
            for k in 0..60u64 {
                if k > 0 {
                    term *= m / k as f64;
                }
                s1 += term / (k + 1) as f64;
                s2 += term / ((k + 1) * (k + 2)) as f64;
            }
            assert_relative_eq!(p1, s1, max_relative = 1e-12);
            assert_relative_eq!(p2, s2, max_relative = 1e-12);
        }
        // stiff limit against the closed forms directly
        let m = -20.0;
        assert_relative_eq!(
            phi1_scalar(m),
            (1.0 - fmath::exp(m)) / 20.0,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            phi2_scalar(m),
            (fmath::exp(m) - 1.0 - m) / (m * m),
            max_relative = 1e-13
        );
    }
}
