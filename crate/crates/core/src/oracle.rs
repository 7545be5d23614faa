//! Brute-force rank-one convexity testing by seeded sampling.
//!
//! Independent of the representation machinery: takes any matrix callable,
//! draws deformation gradients F = Q1 diag(l1, l2) Q2 with log-uniform
//! singular values and uniform rotations, and probes convexity along
//! rank-one lines F + u xi (x) eta, both with a differential second
//! difference and a full segment scan. A sampling oracle can certify only
//! violations, never convexity; the consistent status is named accordingly.

use serde::Serialize;

use rand::RngExt;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::planar::Mat2;

/// Sampling plan. `step_scale` sizes the differential stencil relative to
/// ||F||; `segment_steps` is the resolution of the segment scan.
#[derive(Debug, Clone, Serialize)]
pub struct SampleSpec {
    pub n_points: usize,
    pub seed: u64,
    pub lambda_range: (f64, f64),
    pub segment_steps: usize,
    pub step_scale: f64,
}

impl Default for SampleSpec {
    fn default() -> Self {
        Self {
            n_points: 10_000,
            seed: 42,
            lambda_range: (0.2, 5.0),
            segment_steps: 33,
            step_scale: 1e-3,
        }
    }
}

impl SampleSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_points == 0 {
            return Err(Error::InvalidConfig {
                reason: "n_points must be >= 1".into(),
            });
        }
        let (lo, hi) = self.lambda_range;
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
            return Err(Error::InvalidConfig {
                reason: format!("lambda_range ({lo}, {hi}) must satisfy 0 < lo <= hi < inf"),
            });
        }
        if self.segment_steps < 3 {
            return Err(Error::InvalidConfig {
                reason: "segment_steps must be >= 3".into(),
            });
        }
        if !self.step_scale.is_finite() || self.step_scale <= 0.0 {
            return Err(Error::InvalidConfig {
                reason: "step_scale must be positive".into(),
            });
        }
        Ok(())
    }

    fn rng_for_point(&self, i: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(i as u64 + 1);
        rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OracleStatus {
    ConsistentConvex,
    Violation,
}

#[derive(Debug, Clone, Serialize)]
pub struct ViolationRecord {
    pub sample_index: usize,
    pub f: Mat2,
    pub xi: [f64; 2],
    pub eta: [f64; 2],
    pub second_difference: f64,
    /// Which probe fired: "second-difference" or "segment".
    pub probe: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub status: OracleStatus,
    pub violation: Option<ViolationRecord>,
    pub points_tested: usize,
    pub points_skipped: usize,
}

fn sample_from_rng(rng: &mut ChaCha8Rng, spec: &SampleSpec) -> Mat2 {
    let (lo, hi) = spec.lambda_range;
    let (llo, lhi) = (lo.ln(), hi.ln());
    let draw_lambda = |rng: &mut ChaCha8Rng| {
        if llo == lhi {
            lo
        } else {
            rng.random_range(llo..lhi).exp()
        }
    };
    let l1 = draw_lambda(rng);
    let l2 = draw_lambda(rng);
    let a = rng.random_range(0.0..std::f64::consts::TAU);
    let b = rng.random_range(0.0..std::f64::consts::TAU);
    Mat2::rotation(a).unwrap() * Mat2::diag(l1, l2).unwrap() * Mat2::rotation(b).unwrap()
}

fn unit_direction(rng: &mut ChaCha8Rng) -> [f64; 2] {
    let a = rng.random_range(0.0..std::f64::consts::TAU);
    [a.cos(), a.sin()]
}

/// The i-th sample point of the plan; deterministic in (seed, i) and
/// independent of evaluation order.
pub fn sample_glp2(spec: &SampleSpec, i: usize) -> Mat2 {
    let mut rng = spec.rng_for_point(i);
    sample_from_rng(&mut rng, spec)
}

/// det(F + u P) for rank-one P is affine in u; returns (constant, slope).
fn det_along(f: &Mat2, p: &Mat2) -> (f64, f64) {
    let c0 = f.det();
    let c1 = f.a11 * p.a22 + p.a11 * f.a22 - f.a12 * p.a21 - p.a12 * f.a21;
    (c0, c1)
}

/// Central second difference of W along the rank-one direction xi (x) eta:
/// [W(F + s P) - 2 W(F) + W(F - s P)] / s^2 with s stretched to ||F|| and
/// shrunk up to three times to keep both stencil ends in GL+(2).
pub fn lh_second_difference(
    w: &dyn Fn(&Mat2) -> f64,
    f: &Mat2,
    xi: [f64; 2],
    eta: [f64; 2],
    spec: &SampleSpec,
) -> Result<f64> {
    lh_second_difference_detail(w, f, xi, eta, spec).map(|(v, _)| v)
}

fn lh_second_difference_detail(
    w: &dyn Fn(&Mat2) -> f64,
    f: &Mat2,
    xi: [f64; 2],
    eta: [f64; 2],
    spec: &SampleSpec,
) -> Result<(f64, f64)> {
    let p = Mat2::outer(xi, eta);
    let nxi = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
    let neta = (eta[0] * eta[0] + eta[1] * eta[1]).sqrt();
    let mut s = spec.step_scale * f.norm() / (nxi * neta);
    for _ in 0..=3 {
        let plus = *f + p * s;
        let minus = *f - p * s;
        if plus.det() > 0.0 && minus.det() > 0.0 {
            let (wp, w0, wm) = (w(&plus), w(f), w(&minus));
            let value = (wp - 2.0 * w0 + wm) / (s * s);
            let scale = wp.abs().max(w0.abs()).max(wm.abs());
            let noise = 16.0 * f64::EPSILON * scale / (s * s);
            if !value.is_finite() {
                return Err(Error::Domain {
                    of: "energy along stencil".into(),
                    argument: s,
                });
            }
            return Ok((value, noise));
        }
        s *= 0.5;
    }
    Err(Error::DegenerateStencil)
}

/// Discrete convexity scan along the rank-one segment F + u P, restricted to
/// the open interval where det stays positive. Returns the most negative
/// discrete second difference, normalized by the step squared.
pub fn segment_convexity(
    w: &dyn Fn(&Mat2) -> f64,
    f: &Mat2,
    xi: [f64; 2],
    eta: [f64; 2],
    spec: &SampleSpec,
) -> Result<f64> {
    segment_convexity_detail(w, f, xi, eta, spec).map(|(v, _)| v)
}

fn segment_convexity_detail(
    w: &dyn Fn(&Mat2) -> f64,
    f: &Mat2,
    xi: [f64; 2],
    eta: [f64; 2],
    spec: &SampleSpec,
) -> Result<(f64, f64)> {
    let p = Mat2::outer(xi, eta);
    let nxi = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
    let neta = (eta[0] * eta[0] + eta[1] * eta[1]).sqrt();
    let reach = 0.75 * f.norm() / (nxi * neta);
    let (mut u_lo, mut u_hi) = (-reach, reach);

    // Intersect with { u : det(F + u P) > 0 }, keeping 2% clear of the
    // degeneracy point.
    let (c0, c1) = det_along(f, &p);
    if c1.abs() > 1e-15 * c0.abs().max(1.0) {
        let root = -c0 / c1;
        if c1 > 0.0 {
            u_lo = u_lo.max(root + 0.02 * reach.min((u_hi - root).abs()));
        } else {
            u_hi = u_hi.min(root - 0.02 * reach.min((root - u_lo).abs()));
        }
    }
    if u_hi - u_lo <= 1e-12 * reach {
        return Err(Error::DegenerateStencil);
    }

    let m = spec.segment_steps;
    let du = (u_hi - u_lo) / (m - 1) as f64;
    let mut values = Vec::with_capacity(m);
    let mut scale: f64 = 0.0;
    for j in 0..m {
        let u = u_lo + du * j as f64;
        let fj = *f + p * u;
        debug_assert!(fj.det() > 0.0, "segment left GL+(2)");
        let v = w(&fj);
        if !v.is_finite() {
            return Err(Error::Domain {
                of: "energy along segment".into(),
                argument: u,
            });
        }
        scale = scale.max(v.abs());
        values.push(v);
    }
    let mut worst = f64::INFINITY;
    for j in 1..m - 1 {
        let second = (values[j - 1] - 2.0 * values[j] + values[j + 1]) / (du * du);
        worst = worst.min(second);
    }
    let noise = 16.0 * f64::EPSILON * scale / (du * du);
    Ok((worst, noise))
}

/// Run both probes over the whole sampling plan. Reports the violation with
/// the smallest sample index, or consistency. Stencils that cannot stay in
/// GL+(2) are counted as skipped, not fatal.
pub fn run_oracle(w: &dyn Fn(&Mat2) -> f64, spec: &SampleSpec) -> OracleReport {
    let tol_abs = 1e-7;
    let mut tested = 0usize;
    let mut skipped = 0usize;
    for i in 0..spec.n_points {
        let mut rng = spec.rng_for_point(i);
        let f = sample_from_rng(&mut rng, spec);
        let xi = unit_direction(&mut rng);
        let eta = unit_direction(&mut rng);

        let mut point_ran = false;
        if let Ok((value, noise)) = lh_second_difference_detail(w, &f, xi, eta, spec) {
            point_ran = true;
            if value < -(tol_abs + noise) {
                return OracleReport {
                    status: OracleStatus::Violation,
                    violation: Some(ViolationRecord {
                        sample_index: i,
                        f,
                        xi,
                        eta,
                        second_difference: value,
                        probe: "second-difference",
                    }),
                    points_tested: tested + 1,
                    points_skipped: skipped,
                };
            }
        }
        if let Ok((value, noise)) = segment_convexity_detail(w, &f, xi, eta, spec) {
            point_ran = true;
            if value < -(tol_abs + noise) {
                return OracleReport {
                    status: OracleStatus::Violation,
                    violation: Some(ViolationRecord {
                        sample_index: i,
                        f,
                        xi,
                        eta,
                        second_difference: value,
                        probe: "segment",
                    }),
                    points_tested: tested + 1,
                    points_skipped: skipped,
                };
            }
        }
        if point_ran {
            tested += 1;
        } else {
            skipped += 1;
        }
    }
    OracleReport {
        status: OracleStatus::ConsistentConvex,
        violation: None,
        points_tested: tested,
        points_skipped: skipped,
    }
}
