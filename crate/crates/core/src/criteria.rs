//! Pointwise convexity criteria on sampled grids.
//!
//! Every check walks a log-spaced master grid in the singular value ratio t
//! and maps it into its own variable (theta = log^2 t, eta = theta/2,
//! r = (t + 1/t)/2), so the four scalar criteria see matched grids and must
//! agree in status for the same energy. A check can only claim PASS on the
//! sampled grid; verdicts always carry the grid bounds.
//!
//! Failure thresholds are tol_abs + tol_rel * local magnitude plus an
//! estimate of the finite difference rounding noise at that point, so a
//! criterion that is analytically tangent to zero is reported INCONCLUSIVE
//! or PASS rather than flipping to FAIL from rounding.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::repr::{scalar_quartet, Domain, EnergyRep, ScalarFn, SymmetricFn2};

/// Grid and tolerance configuration for all criterion checks.
///
/// `grid_min`/`grid_max` bound the master grid in the ratio variable
/// t = lambda1/lambda2 >= 1 with `grid_n` log-spaced points. Finite
/// difference steps follow cbrt(eps) * max(1, |x|) for first derivatives and
/// eps^(1/4) * max(1, |x|) for second derivatives, each with one level of
/// Richardson extrapolation.
#[derive(Debug, Clone, Serialize)]
pub struct CheckConfig {
    pub grid_min: f64,
    pub grid_max: f64,
    pub grid_n: usize,
    pub tol_abs: f64,
    pub tol_rel: f64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            grid_min: 1.0 + 1e-6,
            grid_max: 1e3,
            grid_n: 2048,
            tol_abs: 1e-7,
            tol_rel: 1e-9,
        }
    }
}

impl CheckConfig {
    pub fn validate(&self) -> Result<()> {
        let ordered =
            self.grid_min.is_finite() && self.grid_max.is_finite() && self.grid_min < self.grid_max;
        if !ordered {
            return Err(Error::InvalidConfig {
                reason: format!(
                    "grid bounds [{}, {}] are not ordered",
                    self.grid_min, self.grid_max
                ),
            });
        }
        if self.grid_min < 1.0 {
            return Err(Error::InvalidConfig {
                reason: "grid_min is a singular value ratio and must be >= 1".into(),
            });
        }
        if self.grid_n < 16 {
            return Err(Error::InvalidConfig {
                reason: "grid_n must be at least 16".into(),
            });
        }
        let tols_ok = self.tol_abs.is_finite()
            && self.tol_rel.is_finite()
            && self.tol_abs > 0.0
            && self.tol_rel > 0.0;
        if !tols_ok {
            return Err(Error::InvalidConfig {
                reason: "tolerances must be positive".into(),
            });
        }
        Ok(())
    }

    /// The master grid in t, log-spaced, endpoints exact.
    pub fn t_grid(&self) -> Vec<f64> {
        let n = self.grid_n;
        let (la, lb) = (self.grid_min.ln(), self.grid_max.ln());
        let mut g: Vec<f64> = (0..n)
            .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
            .collect();
        g[0] = self.grid_min;
        g[n - 1] = self.grid_max;
        g
    }

    pub fn fd_step_first(&self, x: f64) -> f64 {
        f64::EPSILON.cbrt() * x.abs().max(1.0)
    }

    pub fn fd_step_second(&self, x: f64) -> f64 {
        f64::EPSILON.powf(0.25) * x.abs().max(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

/// A grid point at which a criterion value was observed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    pub point: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridSummary {
    pub variable: String,
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

/// Outcome of one criterion check.
///
/// `witness` is the most negative criterion value observed on the grid
/// (present whenever any point was evaluated); `first_violation` is the
/// smallest grid coordinate whose value fell below the failure threshold
/// (present exactly on FAIL). Both are in the check's own variable.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub criterion_id: String,
    pub status: Status,
    pub witness: Option<Witness>,
    pub first_violation: Option<Witness>,
    pub min_margin: f64,
    pub grid: GridSummary,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }
}

/// Growth constants c1 = f'(1)/e and c2 = f(0) - c1 for the necessary
/// exponential bound f(theta) >= c1 e^(sqrt theta) + c2.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GrowthBound {
    pub c1: f64,
    pub c2: f64,
}

// ---------------------------------------------------------------------------
// Numeric differentiation
// ---------------------------------------------------------------------------

struct Deriv {
    value: f64,
    /// Estimated rounding noise of the estimate; zero for analytic values.
    noise: f64,
}

/// Fit the step to the domain: full step if the whole stencil fits, one
/// shrink to the available slack otherwise, then error.
fn fit_step(domain: &Domain, x: f64, h: f64) -> Result<f64> {
    let fits = |h: f64| domain.contains(x - h) && domain.contains(x + h);
    if fits(h) {
        return Ok(h);
    }
    let slack = domain.slack_below(x).min(domain.hi - x);
    let shrunk = 0.45 * slack;
    if shrunk > 0.0 && fits(shrunk) {
        return Ok(shrunk);
    }
    Err(Error::StencilOutOfDomain { at: x })
}

fn d1_numeric_raw(
    f: &dyn Fn(f64) -> f64,
    domain: &Domain,
    x: f64,
    cfg: &CheckConfig,
) -> Result<Deriv> {
    let h = fit_step(domain, x, cfg.fd_step_first(x))?;
    let (fp, fm) = (f(x + h), f(x - h));
    let (fp2, fm2) = (f(x + 0.5 * h), f(x - 0.5 * h));
    for v in [fp, fm, fp2, fm2] {
        if !v.is_finite() {
            return Err(Error::Domain {
                of: "numeric derivative".into(),
                argument: x,
            });
        }
    }
    let coarse = (fp - fm) / (2.0 * h);
    let fine = (fp2 - fm2) / h;
    let value = (4.0 * fine - coarse) / 3.0;
    let fmax = fp.abs().max(fm.abs()).max(fp2.abs()).max(fm2.abs());
    Ok(Deriv {
        value,
        noise: 3.0 * f64::EPSILON * fmax / h,
    })
}

fn d2_numeric_raw(
    f: &dyn Fn(f64) -> f64,
    domain: &Domain,
    x: f64,
    cfg: &CheckConfig,
) -> Result<Deriv> {
    let h = fit_step(domain, x, cfg.fd_step_second(x))?;
    let f0 = f(x);
    let (fp, fm) = (f(x + h), f(x - h));
    let (fp2, fm2) = (f(x + 0.5 * h), f(x - 0.5 * h));
    for v in [f0, fp, fm, fp2, fm2] {
        if !v.is_finite() {
            return Err(Error::Domain {
                of: "numeric derivative".into(),
                argument: x,
            });
        }
    }
    let coarse = (fp - 2.0 * f0 + fm) / (h * h);
    let fine = (fp2 - 2.0 * f0 + fm2) / (0.25 * h * h);
    let value = (4.0 * fine - coarse) / 3.0;
    let fmax = f0
        .abs()
        .max(fp.abs())
        .max(fm.abs())
        .max(fp2.abs())
        .max(fm2.abs());
    Ok(Deriv {
        value,
        noise: 23.0 * f64::EPSILON * fmax / (h * h),
    })
}

fn d1_rich(f: &ScalarFn, x: f64, cfg: &CheckConfig) -> Result<Deriv> {
    if let Some(v) = f.analytic_d1(x) {
        return Ok(Deriv {
            value: v,
            noise: 0.0,
        });
    }
    d1_numeric_raw(&|u| f.eval(u), f.domain(), x, cfg)
}

fn d2_rich(f: &ScalarFn, x: f64, cfg: &CheckConfig) -> Result<Deriv> {
    if let Some(v) = f.analytic_d2(x) {
        return Ok(Deriv {
            value: v,
            noise: 0.0,
        });
    }
    d2_numeric_raw(&|u| f.eval(u), f.domain(), x, cfg)
}

/// First derivative: analytic when registered, otherwise a Richardson
/// extrapolated central difference.
pub fn d1_numeric(f: &ScalarFn, x: f64, cfg: &CheckConfig) -> Result<f64> {
    d1_rich(f, x, cfg).map(|d| d.value)
}

/// Second derivative, same policy as [`d1_numeric`].
pub fn d2_numeric(f: &ScalarFn, x: f64, cfg: &CheckConfig) -> Result<f64> {
    d2_rich(f, x, cfg).map(|d| d.value)
}

// ---------------------------------------------------------------------------
// Verdict assembly
// ---------------------------------------------------------------------------

struct PointMargin {
    x: f64,
    value: f64,
    threshold: f64,
}

fn assemble(id: &str, variable: &str, points: Vec<PointMargin>) -> Result<Verdict> {
    if points.is_empty() {
        return Err(Error::InvalidConfig {
            reason: format!("no evaluable grid points for {id}"),
        });
    }
    let mut min_margin = f64::INFINITY;
    let mut argmin: Option<Witness> = None;
    let mut first_violation: Option<Witness> = None;
    let mut any_fail = false;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in &points {
        lo = lo.min(p.x);
        hi = hi.max(p.x);
        if p.value < min_margin {
            min_margin = p.value;
            argmin = Some(Witness {
                point: p.x,
                value: p.value,
            });
        }
        if p.value < -p.threshold {
            any_fail = true;
            if first_violation.is_none() {
                first_violation = Some(Witness {
                    point: p.x,
                    value: p.value,
                });
            }
        }
    }
    let status = if any_fail {
        Status::Fail
    } else if min_margin < 0.0 {
        Status::Inconclusive
    } else {
        Status::Pass
    };
    Ok(Verdict {
        criterion_id: id.to_string(),
        status,
        witness: argmin,
        first_violation,
        min_margin,
        grid: GridSummary {
            variable: variable.to_string(),
            min: lo,
            max: hi,
            points: points.len(),
        },
    })
}

// ---------------------------------------------------------------------------
// The criteria
// ---------------------------------------------------------------------------

/// Convexity and monotonicity of h on (1, grid_max]: h'' >= 0 and h' >= 0.
/// PASS requires both at every grid point.
pub fn check_h_criterion(h: &ScalarFn, cfg: &CheckConfig) -> Result<Verdict> {
    cfg.validate()?;
    let mut points = Vec::with_capacity(2 * cfg.grid_n);
    for t in cfg.t_grid() {
        if t <= 1.0 || !h.domain().contains(t) {
            continue;
        }
        let d2 = d2_rich(h, t, cfg)?;
        let d1 = d1_rich(h, t, cfg)?;
        points.push(PointMargin {
            x: t,
            value: d2.value,
            threshold: cfg.tol_abs + cfg.tol_rel * d2.value.abs() + d2.noise,
        });
        points.push(PointMargin {
            x: t,
            value: d1.value,
            threshold: cfg.tol_abs + cfg.tol_rel * d1.value.abs() + d1.noise,
        });
    }
    assemble("h-convexity", "t", points)
}

/// The monotonicity half of the h criterion on its own: h' >= 0 on
/// (1, grid_max]. For continuously differentiable isochoric h this follows
/// from convexity through h'(1) = 0, so a standalone failure flags either a
/// kink at t = 1 or a convexity failure that [`check_h_criterion`] reports
/// anyway.
pub fn check_h_monotonicity(h: &ScalarFn, cfg: &CheckConfig) -> Result<Verdict> {
    cfg.validate()?;
    let mut points = Vec::with_capacity(cfg.grid_n);
    for t in cfg.t_grid() {
        if t <= 1.0 || !h.domain().contains(t) {
            continue;
        }
        let d1 = d1_rich(h, t, cfg)?;
        points.push(PointMargin {
            x: t,
            value: d1.value,
            threshold: cfg.tol_abs + cfg.tol_rel * d1.value.abs() + d1.noise,
        });
    }
    assemble("h-monotonicity", "t", points)
}

/// 2 theta f''(theta) + (1 - sqrt(theta)) f'(theta) >= 0 on the image of the
/// master grid under theta = log^2 t.
pub fn check_f_criterion(f: &ScalarFn, cfg: &CheckConfig) -> Result<Verdict> {
    cfg.validate()?;
    let mut points = Vec::with_capacity(cfg.grid_n);
    for t in cfg.t_grid() {
        let l = t.ln();
        let theta = l * l;
        if theta == 0.0 || !f.domain().contains(theta) {
            continue;
        }
        let d2 = d2_rich(f, theta, cfg)?;
        let d1 = d1_rich(f, theta, cfg)?;
        let a = 2.0 * theta;
        let b = 1.0 - theta.sqrt();
        let value = a * d2.value + b * d1.value;
        let mag = (a * d2.value).abs() + (b * d1.value).abs();
        let noise = a * d2.noise + b.abs() * d1.noise;
        points.push(PointMargin {
            x: theta,
            value,
            threshold: cfg.tol_abs + cfg.tol_rel * mag + noise,
        });
    }
    assemble("f-criterion", "theta", points)
}

/// 2 eta ftilde''(eta) + (1 - sqrt(2 eta)) ftilde'(eta) >= 0 on the image of
/// the master grid under eta = log^2 t / 2.
pub fn check_ftilde_criterion(ft: &ScalarFn, cfg: &CheckConfig) -> Result<Verdict> {
    cfg.validate()?;
    let mut points = Vec::with_capacity(cfg.grid_n);
    for t in cfg.t_grid() {
        let l = t.ln();
        let eta = 0.5 * l * l;
        if eta == 0.0 || !ft.domain().contains(eta) {
            continue;
        }
        let d2 = d2_rich(ft, eta, cfg)?;
        let d1 = d1_rich(ft, eta, cfg)?;
        let a = 2.0 * eta;
        let b = 1.0 - (2.0 * eta).sqrt();
        let value = a * d2.value + b * d1.value;
        let mag = (a * d2.value).abs() + (b * d1.value).abs();
        let noise = a * d2.noise + b.abs() * d1.noise;
        points.push(PointMargin {
            x: eta,
            value,
            threshold: cfg.tol_abs + cfg.tol_rel * mag + noise,
        });
    }
    assemble("ftilde-criterion", "eta", points)
}

/// (r^2 - 1)(r + sqrt(r^2 - 1)) z''(r) + z'(r) >= 0 on the image of the
/// master grid under r = (t + 1/t)/2.
///
/// Without analytic derivatives, points squeezed against r = 1 closer than
/// the stencil can resolve are skipped; the matching t grid point is still
/// covered by the other three criteria.
pub fn check_z_criterion(z: &ScalarFn, cfg: &CheckConfig) -> Result<Verdict> {
    cfg.validate()?;
    let analytic = z.has_analytic_derivatives();
    let mut points = Vec::with_capacity(cfg.grid_n);
    for t in cfg.t_grid() {
        let r = 0.5 * (t + 1.0 / t);
        if r <= 1.0 || !z.domain().contains(r) {
            continue;
        }
        if !analytic && r - 1.0 < 1e-9 {
            continue;
        }
        let d2 = d2_rich(z, r, cfg)?;
        let d1 = d1_rich(z, r, cfg)?;
        let a = (r * r - 1.0) * (r + (r * r - 1.0).sqrt());
        let value = a * d2.value + d1.value;
        let mag = (a * d2.value).abs() + d1.value.abs();
        let noise = a * d2.noise + d1.noise;
        points.push(PointMargin {
            x: r,
            value,
            threshold: cfg.tol_abs + cfg.tol_rel * mag + noise,
        });
    }
    assemble("z-criterion", "r", points)
}

/// Separate convexity of g in its first argument over a 2-D log grid of
/// singular values; the second argument follows by symmetry. Necessary for
/// rank-one convexity, not sufficient.
pub fn check_separate_convexity(g: &SymmetricFn2, cfg: &CheckConfig) -> Result<Verdict> {
    cfg.validate()?;
    let m = cfg.grid_n.min(48);
    let hi = cfg.grid_max.sqrt();
    let lo = 1.0 / hi;
    let (lla, llb) = (lo.ln(), hi.ln());
    let grid: Vec<f64> = (0..m)
        .map(|i| (lla + (llb - lla) * i as f64 / (m - 1) as f64).exp())
        .collect();
    let domain = Domain::open_from(0.0);
    let mut points = Vec::with_capacity(m * m);
    for &l2 in &grid {
        let slice = |x: f64| g.eval(x, l2);
        for &l1 in &grid {
            let d2 = d2_numeric_raw(&slice, &domain, l1, cfg)?;
            points.push(PointMargin {
                x: l1,
                value: d2.value,
                threshold: cfg.tol_abs + cfg.tol_rel * d2.value.abs() + d2.noise,
            });
        }
    }
    assemble("separate-convexity", "lambda1", points)
}

/// f'(theta) >= 0 on the theta grid; a necessary consequence of
/// polyconvexity.
pub fn check_f_monotone(f: &ScalarFn, cfg: &CheckConfig) -> Result<Verdict> {
    cfg.validate()?;
    let mut points = Vec::with_capacity(cfg.grid_n);
    for t in cfg.t_grid() {
        let l = t.ln();
        let theta = l * l;
        if theta == 0.0 || !f.domain().contains(theta) {
            continue;
        }
        let d1 = d1_rich(f, theta, cfg)?;
        points.push(PointMargin {
            x: theta,
            value: d1.value,
            threshold: cfg.tol_abs + cfg.tol_rel * d1.value.abs() + d1.noise,
        });
    }
    assemble("f-monotonicity", "theta", points)
}

/// The growth constants of the necessary exponential bound.
pub fn growth_bound(f: &ScalarFn, cfg: &CheckConfig) -> Result<GrowthBound> {
    let d1 = d1_rich(f, 1.0, cfg)?;
    let c1 = d1.value / std::f64::consts::E;
    let f0 = f.eval_checked(0.0)?;
    Ok(GrowthBound { c1, c2: f0 - c1 })
}

/// f(theta) >= c1 e^(sqrt theta) + c2 on grid points with theta >= 1.
///
/// The constants are anchored at theta = 1, where the bound is exact for the
/// borderline exponential family; below the anchor the comparison function
/// has unbounded slope in theta and the inequality stops being a valid
/// necessary condition, so those points are not scored.
pub fn check_growth_bound(f: &ScalarFn, cfg: &CheckConfig) -> Result<Verdict> {
    cfg.validate()?;
    let d1 = d1_rich(f, 1.0, cfg)?;
    let bound = growth_bound(f, cfg)?;
    let mut points = Vec::with_capacity(cfg.grid_n);
    for t in cfg.t_grid() {
        let l = t.ln();
        let theta = l * l;
        if theta < 1.0 || !f.domain().contains(theta) {
            continue;
        }
        let e_sq = theta.sqrt().exp();
        let rhs = bound.c1 * e_sq + bound.c2;
        let fv = f.eval(theta);
        let value = fv - rhs;
        let mag = fv.abs() + (bound.c1 * e_sq).abs() + bound.c2.abs();
        let noise = d1.noise / std::f64::consts::E * e_sq;
        points.push(PointMargin {
            x: theta,
            value,
            threshold: cfg.tol_abs + cfg.tol_rel * mag + noise,
        });
    }
    if points.is_empty() {
        return Err(Error::InvalidConfig {
            reason: "growth bound needs grid points with theta >= 1 (grid_max >= e)".into(),
        });
    }
    assemble("growth-bound", "theta", points)
}

/// Convexity of a volumetric part s -> W_vol(s) on R+, checked on the master
/// grid united with its reciprocals so compression states are covered.
pub fn check_volumetric_convexity(wvol: &ScalarFn, cfg: &CheckConfig) -> Result<Verdict> {
    cfg.validate()?;
    let mut grid = cfg.t_grid();
    let recips: Vec<f64> = grid.iter().map(|t| 1.0 / t).collect();
    grid.extend(recips);
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut points = Vec::with_capacity(grid.len());
    for s in grid {
        if !wvol.domain().contains(s) {
            continue;
        }
        let d2 = d2_rich(wvol, s, cfg)?;
        points.push(PointMargin {
            x: s,
            value: d2.value,
            threshold: cfg.tol_abs + cfg.tol_rel * d2.value.abs() + d2.noise,
        });
    }
    assemble("volumetric-convexity", "J", points)
}

/// Run the equivalent scalar criteria (h, f, ftilde, z) plus the
/// f-monotonicity consequence on any isochoric representation.
pub fn run_scalar_criteria(rep: &EnergyRep, cfg: &CheckConfig) -> Result<Vec<Verdict>> {
    let q = scalar_quartet(rep)?;
    Ok(vec![
        check_h_criterion(&q.h, cfg)?,
        check_f_criterion(&q.f, cfg)?,
        check_ftilde_criterion(&q.ftilde, cfg)?,
        check_z_criterion(&q.z, cfg)?,
        check_f_monotone(&q.f, cfg)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repr::Domain;

    fn small_cfg() -> CheckConfig {
        CheckConfig {
            grid_n: 256,
            ..CheckConfig::default()
        }
    }

    #[test]
    fn d_numeric_examples() {
        let cfg = CheckConfig::default();
        let sq = ScalarFn::new(Domain::open_from(-1e9), |x: f64| x * x).unwrap();
        assert!((d2_numeric(&sq, 3.0, &cfg).unwrap() - 2.0).abs() < 1e-5);

        let ex = ScalarFn::new(Domain::open_from(-1e9), |x: f64| x.exp()).unwrap();
        assert!((d1_numeric(&ex, 0.0, &cfg).unwrap() - 1.0).abs() < 1e-8);

        // Analytic derivatives pass through untouched.
        let lin =
            ScalarFn::with_derivatives(Domain::open_from(0.0), |x| x, |_| 1.0, |_| 0.0).unwrap();
        assert_eq!(d1_numeric(&lin, 5.0, &cfg).unwrap(), 1.0);
        assert_eq!(d2_numeric(&lin, 5.0, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn d2_exact_on_cubics() {
        let cfg = CheckConfig::default();
        let cubic = ScalarFn::new(Domain::open_from(-1e9), |x: f64| {
            2.0 * x * x * x - 7.0 * x * x + x - 3.0
        })
        .unwrap();
        for x in [0.5, 1.0, 3.0, 17.0] {
            let want = 12.0 * x - 14.0;
            let got = d2_numeric(&cubic, x, &cfg).unwrap();
            assert!(
                (got - want).abs() <= 1e-6 * want.abs().max(1.0),
                "x={x}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn stencil_domain_error() {
        let cfg = CheckConfig::default();
        // At the closed left end there is no room for any central stencil.
        let f = ScalarFn::new(Domain::closed_from(0.0), |x| x).unwrap();
        assert!(d1_numeric(&f, 0.0, &cfg).is_err());
        assert!(d2_numeric(&f, 0.0, &cfg).is_err());
    }

    #[test]
    fn h_criterion_examples() {
        let cfg = small_cfg();
        // h = 2(t + 1/t) - 4 is convex: h'' = 4/t^3.
        let h = ScalarFn::new(Domain::open_from(0.0), |t: f64| 2.0 * (t + 1.0 / t) - 4.0).unwrap();
        assert_eq!(check_h_criterion(&h, &cfg).unwrap().status, Status::Pass);

        let zero = ScalarFn::new(Domain::open_from(0.0), |_| 0.0).unwrap();
        assert_eq!(check_h_criterion(&zero, &cfg).unwrap().status, Status::Pass);

        // h = log^2 t / 2 has h'' = (1 - log t)/t^2 < 0 past t = e.
        let hencky = ScalarFn::new(Domain::open_from(0.0), |t: f64| 0.5 * t.ln().powi(2)).unwrap();
        let v = check_h_criterion(&hencky, &cfg).unwrap();
        assert_eq!(v.status, Status::Fail);
        assert!(v.witness.unwrap().point > std::f64::consts::E);
        assert!(v.first_violation.unwrap().point > std::f64::consts::E);
        // Yet h is non-decreasing, so the standalone monotonicity report passes.
        assert_eq!(
            check_h_monotonicity(&hencky, &cfg).unwrap().status,
            Status::Pass
        );
        let falling = ScalarFn::new(Domain::open_from(0.0), |t: f64| 1.0 / t).unwrap();
        assert_eq!(
            check_h_monotonicity(&falling, &cfg).unwrap().status,
            Status::Fail
        );
    }

    #[test]
    fn f_criterion_examples() {
        let cfg = small_cfg();
        let half =
            ScalarFn::with_derivatives(Domain::closed_from(0.0), |t| 0.5 * t, |_| 0.5, |_| 0.0)
                .unwrap();
        let v = check_f_criterion(&half, &cfg).unwrap();
        assert_eq!(v.status, Status::Fail);
        assert!(v.witness.unwrap().point > 1.0);

        // Capping the grid at theta = 4 pins the worst value there:
        // (1 - sqrt(4))/2 = -1/2.
        let capped = CheckConfig {
            grid_max: 2.0_f64.exp(),
            grid_n: 64,
            ..CheckConfig::default()
        };
        let v = check_f_criterion(&half, &capped).unwrap();
        let w = v.witness.unwrap();
        assert!((w.point - 4.0).abs() < 1e-9);
        assert!((w.value + 0.5).abs() < 1e-12);

        let c = ScalarFn::new(Domain::closed_from(0.0), |_| 3.0).unwrap();
        assert_eq!(check_f_criterion(&c, &cfg).unwrap().status, Status::Pass);

        // f = e^(theta/8): tangent to zero at theta = 4, positive elsewhere.
        let f = ScalarFn::with_derivatives(
            Domain::closed_from(0.0),
            |t: f64| (t / 8.0).exp(),
            |t: f64| (t / 8.0).exp() / 8.0,
            |t: f64| (t / 8.0).exp() / 64.0,
        )
        .unwrap();
        let v = check_f_criterion(&f, &cfg).unwrap();
        assert_ne!(v.status, Status::Fail);
        assert!(v.min_margin.abs() < 1e-4);
    }

    #[test]
    fn ftilde_criterion_examples() {
        let cfg = small_cfg();
        let id =
            ScalarFn::with_derivatives(Domain::closed_from(0.0), |e| e, |_| 1.0, |_| 0.0).unwrap();
        let v = check_ftilde_criterion(&id, &cfg).unwrap();
        assert_eq!(v.status, Status::Fail);
        assert!(v.first_violation.unwrap().point > 0.5);

        // With the grid capped at eta = 2 the worst value is 1 - sqrt(4) = -1.
        let capped = CheckConfig {
            grid_max: 2.0_f64.exp(),
            grid_n: 64,
            ..CheckConfig::default()
        };
        let v = check_ftilde_criterion(&id, &capped).unwrap();
        let w = v.witness.unwrap();
        assert!((w.point - 2.0).abs() < 1e-9);
        assert!((w.value + 1.0).abs() < 1e-12);

        let exp_k = |k: f64| {
            ScalarFn::with_derivatives(
                Domain::closed_from(0.0),
                move |e: f64| (k * e).exp(),
                move |e: f64| k * (k * e).exp(),
                move |e: f64| k * k * (k * e).exp(),
            )
            .unwrap()
        };
        let v = check_ftilde_criterion(&exp_k(0.25), &cfg).unwrap();
        assert_ne!(v.status, Status::Fail);
        let v = check_ftilde_criterion(&exp_k(0.24), &cfg).unwrap();
        assert_eq!(v.status, Status::Fail);
        let w = v.witness.unwrap();
        assert!(w.point > 1.5 && w.point < 2.5, "witness at {}", w.point);
    }

    #[test]
    fn z_criterion_examples() {
        let cfg = small_cfg();
        let pow = |beta: f64| {
            ScalarFn::with_derivatives(
                Domain::closed_from(1.0),
                move |r: f64| (2.0 * r).powf(beta),
                move |r: f64| 2.0 * beta * (2.0 * r).powf(beta - 1.0),
                move |r: f64| 4.0 * beta * (beta - 1.0) * (2.0 * r).powf(beta - 2.0),
            )
            .unwrap()
        };
        assert_eq!(
            check_z_criterion(&pow(1.0), &cfg).unwrap().status,
            Status::Pass
        );
        let c = ScalarFn::new(Domain::closed_from(1.0), |_| 1.5).unwrap();
        assert_eq!(check_z_criterion(&c, &cfg).unwrap().status, Status::Pass);
        let v = check_z_criterion(&pow(0.9), &cfg).unwrap();
        assert_eq!(v.status, Status::Fail);
        assert!(v.witness.unwrap().point >= 10.0);
    }

    #[test]
    fn separate_convexity_examples() {
        let cfg = small_cfg();
        let g = SymmetricFn2::new(|x: f64, y: f64| x * x + y * y).unwrap();
        assert_eq!(
            check_separate_convexity(&g, &cfg).unwrap().status,
            Status::Pass
        );
        let g = SymmetricFn2::new(|x: f64, y: f64| -(x - y) * (x - y)).unwrap();
        assert_eq!(
            check_separate_convexity(&g, &cfg).unwrap().status,
            Status::Fail
        );
    }

    #[test]
    fn f_monotone_examples() {
        let cfg = small_cfg();
        let up = ScalarFn::new(Domain::closed_from(0.0), |t: f64| (0.5 * t).exp()).unwrap();
        assert_eq!(check_f_monotone(&up, &cfg).unwrap().status, Status::Pass);
        let down = ScalarFn::new(Domain::closed_from(0.0), |t: f64| -t).unwrap();
        assert_eq!(check_f_monotone(&down, &cfg).unwrap().status, Status::Fail);
        // Monotone but not rank-one convex: necessity only.
        let half = ScalarFn::new(Domain::closed_from(0.0), |t: f64| 0.5 * t).unwrap();
        assert_eq!(check_f_monotone(&half, &cfg).unwrap().status, Status::Pass);
    }

    #[test]
    fn growth_examples() {
        let cfg = CheckConfig {
            grid_max: 1e5,
            grid_n: 512,
            ..CheckConfig::default()
        };
        let exp_half = ScalarFn::new(Domain::closed_from(0.0), |t: f64| (0.5 * t).exp()).unwrap();
        assert_eq!(
            check_growth_bound(&exp_half, &cfg).unwrap().status,
            Status::Pass
        );

        let c = ScalarFn::new(Domain::closed_from(0.0), |_| 2.0).unwrap();
        let v = check_growth_bound(&c, &cfg).unwrap();
        assert_eq!(v.status, Status::Pass);

        let half = ScalarFn::new(Domain::closed_from(0.0), |t: f64| 0.5 * t).unwrap();
        assert_eq!(
            check_growth_bound(&half, &cfg).unwrap().status,
            Status::Fail
        );
    }

    #[test]
    fn volumetric_examples() {
        let cfg = small_cfg();
        let vol = |khat: f64| {
            ScalarFn::new(Domain::open_from(0.0), move |s: f64| {
                (0.5 / khat) * (khat * s.ln().powi(2)).exp()
            })
            .unwrap()
        };
        assert_ne!(
            check_volumetric_convexity(&vol(0.125), &cfg)
                .unwrap()
                .status,
            Status::Fail
        );
        let sq = ScalarFn::new(Domain::open_from(0.0), |s: f64| s * s).unwrap();
        assert_eq!(
            check_volumetric_convexity(&sq, &cfg).unwrap().status,
            Status::Pass
        );
        assert_eq!(
            check_volumetric_convexity(&vol(0.05), &cfg).unwrap().status,
            Status::Fail
        );
    }
}
