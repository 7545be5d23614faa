//! Catalog of named planar energies with their known convexity verdicts.
//!
//! Each entry wires the energy in its most natural representation, supplies
//! analytic first and second derivatives where the closed forms are simple,
//! and records the expected outcome so the whole catalog doubles as a
//! regression suite for the criteria and the oracle.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::criteria::{
    check_volumetric_convexity, run_scalar_criteria, CheckConfig, Verdict, Witness,
};
use crate::error::{Error, Result};
use crate::oracle::{run_oracle, OracleReport, OracleStatus, SampleSpec};
use crate::planar::{dist_euclid_sq_so2, svd2, Mat2};
use crate::repr::{Domain, EnergyRep, ScalarFn};

pub type Params = BTreeMap<String, f64>;

/// The verdict an entry is expected to produce.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ExpectedVerdict {
    Polyconvex,
    NotRankOneConvex,
    /// Convex exactly when the stated parameter condition holds; evaluated
    /// at the entry's actual parameters.
    Conditional(String),
    /// Known rank-one convex but outside the isochoric theory: only the
    /// sampling oracle applies, and it can certify consistency only.
    RankOneConsistentOnly,
}

/// A catalog entry: the energy, its parameters, and what should happen.
#[derive(Debug, Clone)]
pub struct ZooEntry {
    pub name: String,
    pub params: Params,
    pub energy: EnergyRep,
    /// Isochoric part when the energy is a volumetric-isochoric sum.
    pub isochoric_part: Option<EnergyRep>,
    /// Volumetric part W_vol(det F) for split energies.
    pub volumetric: Option<ScalarFn>,
    pub expected: ExpectedVerdict,
    /// The analytic fact behind `expected`, in plain words.
    pub note: &'static str,
    /// Whether the ratio form h is C^1 at t = 1 (so h'(1) = 0 must hold).
    pub h_is_c1: bool,
}

pub const CATALOG: &[&str] = &[
    "hencky_iso",
    "exp_hencky_iso",
    "exp_hencky_full",
    "biot",
    "dist_iso_so2",
    "power_k",
    "w_sharp",
    "ex_i",
    "ex_ii",
    "ex_iii",
    "ex_iv",
    "ex_v",
];

fn require(params: &Params, entry: &str, key: &str, default: Option<f64>) -> Result<f64> {
    match (params.get(key), default) {
        (Some(&v), _) => Ok(v),
        (None, Some(d)) => Ok(d),
        (None, None) => Err(Error::ParamOutOfRange {
            energy: entry.into(),
            name: key.into(),
            value: f64::NAN,
            requirement: "parameter is required",
        }),
    }
}

fn check_positive(entry: &str, key: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::ParamOutOfRange {
            energy: entry.into(),
            name: key.into(),
            value: v,
            requirement: "must be finite and > 0",
        })
    }
}

fn reject_unknown(params: &Params, entry: &str, allowed: &[&str]) -> Result<()> {
    for key in params.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(Error::UnknownParam {
                energy: entry.into(),
                name: key.clone(),
            });
        }
    }
    Ok(())
}

fn exp_hencky_ftilde(scale: f64, k: f64) -> ScalarFn {
    ScalarFn::with_derivatives(
        Domain::closed_from(0.0),
        move |eta: f64| scale * (k * eta).exp(),
        move |eta: f64| scale * k * (k * eta).exp(),
        move |eta: f64| scale * k * k * (k * eta).exp(),
    )
    .expect("exponential strain energy is finite")
}

/// Build a catalog entry by name. Missing parameters take the entry's
/// defaults; unknown parameter keys are rejected.
pub fn make(name: &str, params: &Params) -> Result<ZooEntry> {
    match name {
        "hencky_iso" => {
            reject_unknown(params, name, &["mu"])?;
            let mu = check_positive(name, "mu", require(params, name, "mu", Some(1.0))?)?;
            let ft = ScalarFn::with_derivatives(
                Domain::closed_from(0.0),
                move |eta: f64| mu * eta,
                move |_| mu,
                move |_| 0.0,
            )
            .expect("linear strain energy is finite");
            Ok(ZooEntry {
                name: name.into(),
                params: BTreeMap::from([("mu".into(), mu)]),
                energy: EnergyRep::strain_ftilde(name, ft),
                isochoric_part: None,
                volumetric: None,
                expected: ExpectedVerdict::NotRankOneConvex,
                note: "squared isochoric log strain: the ftilde criterion turns negative past eta = 1/2",
                h_is_c1: true,
            })
        }
        "exp_hencky_iso" => {
            reject_unknown(params, name, &["k"])?;
            let k = check_positive(name, "k", require(params, name, "k", Some(0.3))?)?;
            Ok(ZooEntry {
                name: name.into(),
                params: BTreeMap::from([("k".into(), k)]),
                energy: EnergyRep::strain_ftilde(name, exp_hencky_ftilde(1.0, k)),
                isochoric_part: None,
                volumetric: None,
                expected: ExpectedVerdict::Conditional("k >= 1/4".into()),
                note: "exponentiated isochoric log strain: convex exactly when k >= 1/4",
                h_is_c1: true,
            })
        }
        "exp_hencky_full" => {
            reject_unknown(params, name, &["mu", "kappa", "k", "khat"])?;
            let mu = check_positive(name, "mu", require(params, name, "mu", Some(1.0))?)?;
            let kappa = check_positive(name, "kappa", require(params, name, "kappa", Some(1.0))?)?;
            let k = check_positive(name, "k", require(params, name, "k", Some(0.3))?)?;
            let khat = check_positive(name, "khat", require(params, name, "khat", Some(0.2))?)?;
            let iso_scale = mu / k;
            let vol_scale = kappa / (2.0 * khat);
            let full = EnergyRep::matrix(name, false, move |f: &Mat2| match svd2(f) {
                Ok(sv) => {
                    let l = f.det().ln();
                    iso_scale * (k * sv.eta()).exp() + vol_scale * (khat * l * l).exp()
                }
                Err(_) => f64::NAN,
            })?;
            let vol = ScalarFn::with_derivatives(
                Domain::open_from(0.0),
                move |s: f64| vol_scale * (khat * s.ln().powi(2)).exp(),
                move |s: f64| {
                    let l = s.ln();
                    vol_scale * (khat * l * l).exp() * 2.0 * khat * l / s
                },
                move |s: f64| {
                    let l = s.ln();
                    vol_scale * (khat * l * l).exp() * 2.0 * khat / (s * s)
                        * (2.0 * khat * l * l - l + 1.0)
                },
            )
            .expect("volumetric exponential is finite");
            Ok(ZooEntry {
                name: name.into(),
                params: BTreeMap::from([
                    ("mu".into(), mu),
                    ("kappa".into(), kappa),
                    ("k".into(), k),
                    ("khat".into(), khat),
                ]),
                energy: full,
                isochoric_part: Some(EnergyRep::strain_ftilde(
                    "exp_hencky_full|iso",
                    exp_hencky_ftilde(iso_scale, k),
                )),
                volumetric: Some(vol),
                expected: ExpectedVerdict::Conditional("k >= 1/4 and khat >= 1/8".into()),
                note: "volumetric-isochoric sum of exponentiated log strain terms",
                h_is_c1: true,
            })
        }
        "biot" => {
            reject_unknown(params, name, &[])?;
            let w = EnergyRep::matrix(name, false, |f: &Mat2| {
                if f.det() > 0.0 {
                    dist_euclid_sq_so2(f)
                } else {
                    f64::NAN
                }
            })?;
            Ok(ZooEntry {
                name: name.into(),
                params: BTreeMap::new(),
                energy: w,
                isochoric_part: None,
                volumetric: None,
                expected: ExpectedVerdict::NotRankOneConvex,
                note: "squared distance of the stretch tensor to the identity; not isochoric",
                h_is_c1: false,
            })
        }
        "dist_iso_so2" => {
            reject_unknown(params, name, &[])?;
            let z = ScalarFn::with_derivatives(
                Domain::closed_from(1.0),
                |r: f64| {
                    let s = (2.0 * r + 2.0).sqrt() - 1.0;
                    s * s - 1.0
                },
                |r: f64| 2.0 - 2.0 / (2.0 * r + 2.0).sqrt(),
                |r: f64| 2.0 / (2.0 * r + 2.0).powf(1.5),
            )
            .expect("distance energy is finite");
            Ok(ZooEntry {
                name: name.into(),
                params: BTreeMap::new(),
                energy: EnergyRep::distortion_z(name, z),
                isochoric_part: None,
                volumetric: None,
                expected: ExpectedVerdict::Polyconvex,
                note: "squared distance of the volume-normalized gradient to the rotations",
                h_is_c1: true,
            })
        }
        "power_k" => {
            reject_unknown(params, name, &["beta"])?;
            let beta = check_positive(name, "beta", require(params, name, "beta", Some(1.5))?)?;
            let z = ScalarFn::with_derivatives(
                Domain::closed_from(1.0),
                move |r: f64| (2.0 * r).powf(beta),
                move |r: f64| 2.0 * beta * (2.0 * r).powf(beta - 1.0),
                move |r: f64| 4.0 * beta * (beta - 1.0) * (2.0 * r).powf(beta - 2.0),
            )
            .expect("distortion power is finite");
            Ok(ZooEntry {
                name: name.into(),
                params: BTreeMap::from([("beta".into(), beta)]),
                energy: EnergyRep::distortion_z(name, z),
                isochoric_part: None,
                volumetric: None,
                expected: ExpectedVerdict::Conditional("beta >= 1".into()),
                note: "power of twice the distortion: convex exactly when beta >= 1",
                h_is_c1: true,
            })
        }
        "w_sharp" => {
            reject_unknown(params, name, &[])?;
            let w = EnergyRep::matrix(name, false, |f: &Mat2| {
                let plus = f.norm_sq_plus_2det().sqrt();
                let minus = f.norm_sq_minus_2det().sqrt();
                if plus + minus <= 1.0 {
                    -4.0 * f.det()
                } else {
                    2.0 * minus - 1.0
                }
            })?;
            Ok(ZooEntry {
                name: name.into(),
                params: BTreeMap::new(),
                energy: w,
                isochoric_part: None,
                volumetric: None,
                expected: ExpectedVerdict::RankOneConsistentOnly,
                note: "two-branch function of the extreme singular values; convex along rank-one lines",
                h_is_c1: false,
            })
        }
        "ex_i" => {
            reject_unknown(params, name, &[])?;
            let h = ScalarFn::with_derivatives(
                Domain::open_from(0.0),
                |t: f64| 2.0 * (t + 1.0 / t) - 4.0,
                |t: f64| 2.0 * (1.0 - 1.0 / (t * t)),
                |t: f64| 4.0 / (t * t * t),
            )
            .expect("finite on (0, inf)");
            Ok(ZooEntry {
                name: name.into(),
                params: BTreeMap::new(),
                energy: EnergyRep::ratio_h(name, h)?,
                isochoric_part: None,
                volumetric: None,
                expected: ExpectedVerdict::Polyconvex,
                note: "squared difference of the normalized stretch and its inverse",
                h_is_c1: true,
            })
        }
        "ex_ii" => {
            reject_unknown(params, name, &[])?;
            let h = ScalarFn::with_derivatives(
                Domain::open_from(0.0),
                |t: f64| {
                    let l = t.ln();
                    (0.5 * l * l).exp() * (t + 1.0 / t)
                },
                |t: f64| {
                    let l = t.ln();
                    (0.5 * l * l).exp() * (1.0 - 1.0 / (t * t) + l * (1.0 + 1.0 / (t * t)))
                },
                |t: f64| {
                    let l = t.ln();
                    let t2 = t * t;
                    let t3 = t2 * t;
                    (0.5 * l * l).exp()
                        * (1.0 / t
                            + 3.0 / t3
                            + (1.0 / t - 3.0 / t3) * l
                            + (1.0 / t + 1.0 / t3) * l * l)
                },
            )
            .expect("finite on (0, inf)");
            Ok(ZooEntry {
                name: name.into(),
                params: BTreeMap::new(),
                energy: EnergyRep::ratio_h(name, h)?,
                isochoric_part: None,
                volumetric: None,
                expected: ExpectedVerdict::Polyconvex,
                note: "exponentiated log strain times twice the distortion",
                h_is_c1: true,
            })
        }
        "ex_iii" => {
            reject_unknown(params, name, &[])?;
            let ft = ScalarFn::with_derivatives(
                Domain::closed_from(0.0),
                |eta: f64| eta.cosh(),
                |eta: f64| eta.sinh(),
                |eta: f64| eta.cosh(),
            )
            .expect("cosh is finite");
            Ok(ZooEntry {
                name: name.into(),
                params: BTreeMap::new(),
                energy: EnergyRep::strain_ftilde(name, ft),
                isochoric_part: None,
                volumetric: None,
                expected: ExpectedVerdict::Polyconvex,
                note: "hyperbolic cosine of the squared isochoric log strain",
                h_is_c1: true,
            })
        }
        "ex_iv" => {
            reject_unknown(params, name, &["beta"])?;
            let beta = check_positive(name, "beta", require(params, name, "beta", Some(2.0))?)?;
            let alpha = 0.5 * beta;
            let ft = ScalarFn::with_derivatives(
                Domain::closed_from(0.0),
                move |eta: f64| eta.powf(alpha),
                move |eta: f64| alpha * eta.powf(alpha - 1.0),
                move |eta: f64| alpha * (alpha - 1.0) * eta.powf(alpha - 2.0),
            )
            .expect("power of eta is finite");
            Ok(ZooEntry {
                name: name.into(),
                params: BTreeMap::from([("beta".into(), beta)]),
                energy: EnergyRep::strain_ftilde(name, ft),
                isochoric_part: None,
                volumetric: None,
                expected: ExpectedVerdict::NotRankOneConvex,
                note: "any positive power of the isochoric log strain norm fails the criteria",
                h_is_c1: beta > 1.0,
            })
        }
        "ex_v" => {
            reject_unknown(params, name, &[])?;
            let ft = ScalarFn::with_derivatives(
                Domain::closed_from(0.0),
                |eta: f64| (eta + eta.sin()).exp(),
                |eta: f64| (eta + eta.sin()).exp() * (1.0 + eta.cos()),
                |eta: f64| {
                    let c = 1.0 + eta.cos();
                    (eta + eta.sin()).exp() * (c * c - eta.sin())
                },
            )
            .expect("finite everywhere");
            Ok(ZooEntry {
                name: name.into(),
                params: BTreeMap::new(),
                energy: EnergyRep::strain_ftilde(name, ft),
                isochoric_part: None,
                volumetric: None,
                expected: ExpectedVerdict::NotRankOneConvex,
                note: "monotone with exponential growth yet not convex; fails near eta = pi/2",
                h_is_c1: true,
            })
        }
        _ => Err(Error::UnknownEnergy { name: name.into() }),
    }
}

/// Every catalog entry at its default parameters.
pub fn default_catalog() -> Vec<ZooEntry> {
    CATALOG
        .iter()
        .map(|name| make(name, &Params::new()).expect("default catalog entry"))
        .collect()
}

impl ZooEntry {
    /// Whether the parameter condition of a conditional entry holds; `None`
    /// for unconditional entries.
    pub fn condition_holds(&self) -> Option<bool> {
        match self.expected {
            ExpectedVerdict::Conditional(_) => Some(match self.name.as_str() {
                "exp_hencky_iso" => self.params["k"] >= 0.25,
                "exp_hencky_full" => self.params["k"] >= 0.25 && self.params["khat"] >= 0.125,
                "power_k" => self.params["beta"] >= 1.0,
                _ => unreachable!("conditional entries are enumerated"),
            }),
            _ => None,
        }
    }

    /// The representation whose criteria apply: the energy itself when it is
    /// a scalar form, or the isochoric part of a split.
    pub fn criteria_target(&self) -> Option<&EnergyRep> {
        if self.energy.scalar_payload().is_some() {
            Some(&self.energy)
        } else {
            self.isochoric_part.as_ref()
        }
    }
}

/// One entry's regression outcome.
#[derive(Debug, Clone, Serialize)]
pub struct ZooReport {
    pub name: String,
    pub params: Params,
    pub expected: ExpectedVerdict,
    /// For conditional entries, whether the condition holds at these params.
    pub condition_holds: Option<bool>,
    pub checks: Vec<Verdict>,
    pub oracle: OracleReport,
    /// All applicable criteria passed and the oracle saw no violation.
    pub consistent_convex: bool,
    /// The observed outcome matches the expected verdict.
    pub matches_expected: bool,
    /// Earliest grid point at which the natural-representation criterion
    /// failed, in that representation's variable.
    pub witness: Option<Witness>,
}

/// Run all applicable criteria plus the oracle and compare with the entry's
/// expected verdict.
pub fn expected_vs_actual(
    entry: &ZooEntry,
    cfg: &CheckConfig,
    spec: &SampleSpec,
) -> Result<ZooReport> {
    let mut checks = Vec::new();
    if let Some(target) = entry.criteria_target() {
        checks.extend(run_scalar_criteria(target, cfg)?);
    }
    if let Some(vol) = &entry.volumetric {
        checks.push(check_volumetric_convexity(vol, cfg)?);
    }

    let w = entry.energy.as_matrix_fn();
    let oracle = run_oracle(&*w, spec);

    let any_fail = checks.iter().any(|c| c.failed());
    let all_pass = checks.iter().all(|c| c.passed());
    let violation = oracle.status == OracleStatus::Violation;
    let consistent = !any_fail && !violation && (all_pass || checks.is_empty());

    let should_be_convex = match &entry.expected {
        ExpectedVerdict::Polyconvex | ExpectedVerdict::RankOneConsistentOnly => true,
        ExpectedVerdict::NotRankOneConvex => false,
        ExpectedVerdict::Conditional(_) => entry.condition_holds().unwrap(),
    };
    let matches_expected = if should_be_convex {
        !any_fail && !violation
    } else {
        // A failing energy must be caught analytically when criteria apply,
        // and by the oracle either way.
        violation && (checks.is_empty() || any_fail)
    };

    // Witness in the natural representation's variable: its criterion is
    // the one whose grid variable matches the payload kind.
    let natural_var = entry
        .criteria_target()
        .map(|t| match t.kind() {
            crate::repr::ReprKind::RatioH => "t",
            crate::repr::ReprKind::LogSqF => "theta",
            crate::repr::ReprKind::StrainFTilde => "eta",
            crate::repr::ReprKind::DistortionZ => "r",
            _ => "",
        })
        .unwrap_or("");
    let witness = checks
        .iter()
        .filter(|c| c.failed())
        .find(|c| c.grid.variable == natural_var || natural_var.is_empty())
        .or_else(|| checks.iter().find(|c| c.failed()))
        .and_then(|c| c.first_violation);

    Ok(ZooReport {
        name: entry.name.clone(),
        params: entry.params.clone(),
        expected: entry.expected.clone(),
        condition_holds: entry.condition_holds(),
        checks,
        oracle,
        consistent_convex: consistent,
        matches_expected,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repr::scalar_quartet;

    fn params(kv: &[(&str, f64)]) -> Params {
        kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn unknown_name_and_params_are_rejected() {
        assert!(matches!(
            make("nope", &Params::new()),
            Err(Error::UnknownEnergy { .. })
        ));
        assert!(matches!(
            make("hencky_iso", &params(&[("q", 1.0)])),
            Err(Error::UnknownParam { .. })
        ));
        assert!(matches!(
            make("power_k", &params(&[("beta", -2.0)])),
            Err(Error::ParamOutOfRange { .. })
        ));
    }

    #[test]
    fn conditional_evaluation() {
        let e = make("exp_hencky_iso", &params(&[("k", 0.25)])).unwrap();
        assert_eq!(e.condition_holds(), Some(true));
        let e = make("exp_hencky_iso", &params(&[("k", 0.2)])).unwrap();
        assert_eq!(e.condition_holds(), Some(false));
        let e = make("exp_hencky_full", &params(&[("k", 0.3), ("khat", 0.1)])).unwrap();
        assert_eq!(e.condition_holds(), Some(false));
    }

    #[test]
    fn power_k_ratio_form_is_t_plus_inverse() {
        let e = make("power_k", &params(&[("beta", 1.0)])).unwrap();
        let q = scalar_quartet(&e.energy).unwrap();
        assert!((q.h.eval(1.0) - 2.0).abs() < 1e-12);
        for t in [1.5, 3.0, 40.0] {
            assert!((q.h.eval(t) - (t + 1.0 / t)).abs() < 1e-11 * (t + 1.0 / t));
        }
    }

    #[test]
    fn ex_iv_beta_two_is_hencky() {
        let a = make("ex_iv", &params(&[("beta", 2.0)])).unwrap();
        let b = make("hencky_iso", &Params::new()).unwrap();
        for f in [
            Mat2::diag(3.0, 0.5).unwrap(),
            Mat2::new(1.0, 1.0, 0.0, 1.0).unwrap(),
            Mat2::new(0.4, -0.2, 0.3, 0.9).unwrap(),
        ] {
            let (x, y) = (
                a.energy.eval_at_matrix(&f).unwrap(),
                b.energy.eval_at_matrix(&f).unwrap(),
            );
            assert!((x - y).abs() < 1e-13 * y.abs().max(1.0));
        }
    }

    #[test]
    fn ex_i_ratio_form_matches_matrix_evaluation() {
        // The energy ||A - A^{-1}||^2 with A the volume-normalized stretch,
        // assembled through actual matrix operations.
        let e = make("ex_i", &Params::new()).unwrap();
        let direct = |f: &Mat2| {
            let u = crate::planar::polar_u(f).unwrap();
            let a = u * (1.0 / u.det().sqrt());
            (a - a.inverse().unwrap()).norm_sq()
        };
        for f in [
            Mat2::diag(2.0, 1.0).unwrap(),
            Mat2::new(1.4, 0.8, -0.3, 1.1).unwrap(),
            Mat2::new(0.3, 0.1, -0.2, 0.8).unwrap(),
        ] {
            let x = e.energy.eval_at_matrix(&f).unwrap();
            assert!((x - direct(&f)).abs() <= 1e-12 * direct(&f).max(1.0));
        }
    }

    #[test]
    fn ex_ii_convexity_inequality_holds_on_grid() {
        // (3/t^2 - 1) log t <= 1 + 3/t^2 + (1 + 1/t^2) log^2 t  for t > 0.
        let cfg = CheckConfig::default();
        for t in cfg.t_grid() {
            let l = t.ln();
            let lhs = (3.0 / (t * t) - 1.0) * l;
            let rhs = 1.0 + 3.0 / (t * t) + (1.0 + 1.0 / (t * t)) * l * l;
            assert!(lhs <= rhs + 1e-12, "violated at t = {t}");
        }
    }

    #[test]
    fn positive_scaling_preserves_criterion_signs() {
        // mu rescales the hencky energy; statuses must not move.
        let cfg = CheckConfig {
            grid_n: 128,
            ..CheckConfig::default()
        };
        let small = make("hencky_iso", &params(&[("mu", 0.01)])).unwrap();
        let big = make("hencky_iso", &params(&[("mu", 250.0)])).unwrap();
        let a = run_scalar_criteria(&small.energy, &cfg).unwrap();
        let b = run_scalar_criteria(&big.energy, &cfg).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.status, y.status, "{}", x.criterion_id);
        }
    }

    #[test]
    fn w_sharp_matches_singular_value_form() {
        let e = make("w_sharp", &Params::new()).unwrap();
        let w = e.energy.as_matrix_fn();
        for f in [
            Mat2::diag(0.2, 0.1).unwrap(),
            Mat2::diag(3.0, 0.4).unwrap(),
            Mat2::new(0.31, 0.05, -0.04, 0.22).unwrap(),
        ] {
            let sv = svd2(&f).unwrap();
            let expect = if sv.lambda1 <= 0.5 {
                -4.0 * sv.lambda1 * sv.lambda2
            } else {
                2.0 * (sv.lambda1 - sv.lambda2) - 1.0
            };
            assert!((w(&f) - expect).abs() < 1e-12);
        }
    }
}
