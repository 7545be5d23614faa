//! Closed-form 2x2 kinematics on GL+(2).
//!
//! Everything a planar deformation gradient needs: singular values, the
//! symmetric polar factor, the principal matrix logarithm, the deviator,
//! the distortion, and the explicit distance/hull formulas for SO(2).
//! All operations are pure; no iteration, no allocation.

use serde::Serialize;

use crate::error::{Error, Result};

/// A real 2x2 matrix, the deformation gradient F.
///
/// Constructors reject non-finite entries, so every `Mat2` in circulation
/// has finite entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mat2 {
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
}

impl Mat2 {
    pub fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Result<Self> {
        for (v, what) in [(a11, "a11"), (a12, "a12"), (a21, "a21"), (a22, "a22")] {
            if !v.is_finite() {
                return Err(Error::NonFinite { what });
            }
        }
        Ok(Self { a11, a12, a21, a22 })
    }

    pub fn identity() -> Self {
        Self {
            a11: 1.0,
            a12: 0.0,
            a21: 0.0,
            a22: 1.0,
        }
    }

    pub fn zero() -> Self {
        Self {
            a11: 0.0,
            a12: 0.0,
            a21: 0.0,
            a22: 0.0,
        }
    }

    pub fn diag(a: f64, b: f64) -> Result<Self> {
        Self::new(a, 0.0, 0.0, b)
    }

    /// Counterclockwise rotation by `alpha` radians.
    pub fn rotation(alpha: f64) -> Result<Self> {
        let (s, c) = alpha.sin_cos();
        Self::new(c, -s, s, c)
    }

    /// Rank-one matrix xi (x) eta.
    pub fn outer(xi: [f64; 2], eta: [f64; 2]) -> Self {
        Self {
            a11: xi[0] * eta[0],
            a12: xi[0] * eta[1],
            a21: xi[1] * eta[0],
            a22: xi[1] * eta[1],
        }
    }

    #[inline]
    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    #[inline]
    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    /// Squared Frobenius norm.
    #[inline]
    pub fn norm_sq(&self) -> f64 {
        self.a11 * self.a11 + self.a12 * self.a12 + self.a21 * self.a21 + self.a22 * self.a22
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn transpose(&self) -> Self {
        Self {
            a11: self.a11,
            a12: self.a21,
            a21: self.a12,
            a22: self.a22,
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return Err(Error::SingularMatrix { det: d });
        }
        Ok(Self {
            a11: self.a22 / d,
            a12: -self.a12 / d,
            a21: -self.a21 / d,
            a22: self.a11 / d,
        })
    }

    /// ||F||^2 + 2 det F, computed as (a11+a22)^2 + (a12-a21)^2.
    ///
    /// This form is exactly non-negative, unlike the naive expression.
    #[inline]
    pub fn norm_sq_plus_2det(&self) -> f64 {
        let p = self.a11 + self.a22;
        let q = self.a12 - self.a21;
        p * p + q * q
    }

    /// ||F||^2 - 2 det F, computed as (a11-a22)^2 + (a12+a21)^2.
    #[inline]
    pub fn norm_sq_minus_2det(&self) -> f64 {
        let p = self.a11 - self.a22;
        let q = self.a12 + self.a21;
        p * p + q * q
    }
}

impl std::ops::Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2 {
            a11: self.a11 + o.a11,
            a12: self.a12 + o.a12,
            a21: self.a21 + o.a21,
            a22: self.a22 + o.a22,
        }
    }
}

impl std::ops::Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2 {
            a11: self.a11 - o.a11,
            a12: self.a12 - o.a12,
            a21: self.a21 - o.a21,
            a22: self.a22 - o.a22,
        }
    }
}

impl std::ops::Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2 {
            a11: self.a11 * o.a11 + self.a12 * o.a21,
            a12: self.a11 * o.a12 + self.a12 * o.a22,
            a21: self.a21 * o.a11 + self.a22 * o.a21,
            a22: self.a21 * o.a12 + self.a22 * o.a22,
        }
    }
}

impl std::ops::Mul<f64> for Mat2 {
    type Output = Mat2;
    fn mul(self, s: f64) -> Mat2 {
        Mat2 {
            a11: self.a11 * s,
            a12: self.a12 * s,
            a21: self.a21 * s,
            a22: self.a22 * s,
        }
    }
}

/// Ordered singular values of F in GL+(2): lambda1 >= lambda2 > 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingularPair {
    pub lambda1: f64,
    pub lambda2: f64,
}

impl SingularPair {
    /// Singular value ratio t = lambda1/lambda2 >= 1.
    #[inline]
    pub fn ratio(&self) -> f64 {
        self.lambda1 / self.lambda2
    }

    /// theta = log^2(lambda1/lambda2).
    #[inline]
    pub fn theta(&self) -> f64 {
        let l = self.ratio().ln();
        l * l
    }

    /// eta = ||dev2 log U||^2 = theta / 2.
    #[inline]
    pub fn eta(&self) -> f64 {
        0.5 * self.theta()
    }

    /// Planar distortion K = (t + 1/t)/2 >= 1.
    #[inline]
    pub fn distortion(&self) -> f64 {
        let t = self.ratio();
        0.5 * (t + 1.0 / t)
    }
}

/// Conformally invariant scalars of F, all derived from the singular value
/// ratio. `eta` is computed from the singular values, never from the matrix
/// logarithm, so it stays well defined arbitrarily close to conformal F.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Invariants2 {
    /// t = lambda1/lambda2 >= 1
    pub ratio: f64,
    /// theta = log^2 t
    pub theta: f64,
    /// eta = theta/2 = ||dev2 log U||^2
    pub eta: f64,
    /// K = (t + 1/t)/2
    pub distortion: f64,
}

/// Singular values by the closed form
/// lambda_{max,min} = ((||F||^2 + 2 det F)^{1/2} +- (||F||^2 - 2 det F)^{1/2}) / 2.
///
/// Both radicands are computed as exact sums of squares. lambda2 is recovered
/// from the product lambda1 * lambda2 = det F, which avoids the cancellation
/// in the difference of the two square roots for strongly anisotropic F.
pub fn svd2(f: &Mat2) -> Result<SingularPair> {
    let d = f.det();
    if d <= 0.0 {
        return Err(Error::NonPositiveDeterminant { det: d });
    }
    let sum = f.norm_sq_plus_2det().sqrt(); // lambda1 + lambda2
    let diff = f.norm_sq_minus_2det().sqrt(); // lambda1 - lambda2
    let lambda1 = 0.5 * (sum + diff);
    let lambda2 = d / lambda1;
    Ok(SingularPair { lambda1, lambda2 })
}

/// All conformal invariants of F at once.
pub fn invariants2(f: &Mat2) -> Result<Invariants2> {
    let sv = svd2(f)?;
    Ok(Invariants2 {
        ratio: sv.ratio(),
        theta: sv.theta(),
        eta: sv.eta(),
        distortion: sv.distortion(),
    })
}

/// Symmetric positive definite polar factor U = sqrt(F^T F) via
/// U = (F^T F + det(F) id) / sqrt(tr(F^T F) + 2 det F).
pub fn polar_u(f: &Mat2) -> Result<Mat2> {
    let d = f.det();
    if d <= 0.0 {
        return Err(Error::NonPositiveDeterminant { det: d });
    }
    let ftf = f.transpose() * *f;
    let denom = f.norm_sq_plus_2det().sqrt(); // tr(F^T F) + 2 det F = (l1+l2)^2
    Ok(Mat2 {
        a11: (ftf.a11 + d) / denom,
        a12: ftf.a12 / denom,
        a21: ftf.a21 / denom,
        a22: (ftf.a22 + d) / denom,
    })
}

/// Eigenvalues and an orthonormal eigenbasis of a symmetric 2x2 matrix
/// [[a, b], [b, c]], eigenvalues descending. The eigenvector is taken from
/// whichever row of (A - lambda id) has the larger norm.
fn sym_eigen(a: f64, b: f64, c: f64) -> ((f64, f64), ([f64; 2], [f64; 2])) {
    let mean = 0.5 * (a + c);
    let half_diff = 0.5 * (a - c);
    let disc = (half_diff * half_diff + b * b).sqrt();
    let l1 = mean + disc;
    let l2 = mean - disc;
    let v1 = {
        let u = [b, l1 - a];
        let w = [l1 - c, b];
        let (nu, nw) = (u[0] * u[0] + u[1] * u[1], w[0] * w[0] + w[1] * w[1]);
        let v = if nu >= nw { u } else { w };
        let n = (v[0] * v[0] + v[1] * v[1]).sqrt();
        if n == 0.0 {
            [1.0, 0.0] // multiple of the identity
        } else {
            [v[0] / n, v[1] / n]
        }
    };
    let v2 = [-v1[1], v1[0]];
    ((l1, l2), (v1, v2))
}

/// Principal matrix logarithm of a symmetric positive definite matrix.
///
/// Symmetry is required up to 1e-12 * ||U|| in Frobenius norm.
pub fn log_spd(u: &Mat2) -> Result<Mat2> {
    let skew = *u - u.transpose();
    let dev = skew.norm();
    let tol = 1e-12 * u.norm();
    if dev > tol {
        return Err(Error::NotSymmetric {
            deviation: dev,
            tol,
        });
    }
    let b = 0.5 * (u.a12 + u.a21);
    let ((l1, l2), (v1, v2)) = sym_eigen(u.a11, b, u.a22);
    if l2 <= 0.0 {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: l2 });
    }
    let (g1, g2) = (l1.ln(), l2.ln());
    Ok(Mat2 {
        a11: g1 * v1[0] * v1[0] + g2 * v2[0] * v2[0],
        a12: g1 * v1[0] * v1[1] + g2 * v2[0] * v2[1],
        a21: g1 * v1[1] * v1[0] + g2 * v2[1] * v2[0],
        a22: g1 * v1[1] * v1[1] + g2 * v2[1] * v2[1],
    })
}

/// Deviatoric part dev2 X = X - (tr X / 2) id. The trace of the result is
/// zero exactly as computed.
pub fn dev2(x: &Mat2) -> Mat2 {
    let half_tr = 0.5 * x.trace();
    Mat2 {
        a11: x.a11 - half_tr,
        a12: x.a12,
        a21: x.a21,
        a22: x.a22 - half_tr,
    }
}

/// Planar distortion K(F) = ||F||^2 / (2 det F) >= 1, with equality exactly
/// on the conformal group CSO(2).
pub fn distortion_k(f: &Mat2) -> Result<f64> {
    let d = f.det();
    if d <= 0.0 {
        return Err(Error::NonPositiveDeterminant { det: d });
    }
    Ok(0.5 * f.norm_sq() / d)
}

/// Squared Euclidean distance of an arbitrary real 2x2 matrix to SO(2):
/// ||F||^2 - 2 sqrt(||F||^2 + 2 det F) + 2.
///
/// For det F > 0 this equals ||U - id||^2 with U the polar factor.
pub fn dist_euclid_sq_so2(f: &Mat2) -> f64 {
    f.norm_sq() - 2.0 * f.norm_sq_plus_2det().sqrt() + 2.0
}

/// Quasiconvex hull of the squared Euclidean distance to SO(2):
/// 1 - 2 det F where ||F||^2 + 2 det F <= 1, and
/// (sqrt(||F||^2 + 2 det F) - 1)^2 + 1 - 2 det F otherwise.
pub fn qc_hull_dist_sq_so2(f: &Mat2) -> f64 {
    let q = f.norm_sq_plus_2det();
    let affine = 1.0 - 2.0 * f.det();
    if q <= 1.0 {
        affine
    } else {
        let s = q.sqrt() - 1.0;
        s * s + affine
    }
}
