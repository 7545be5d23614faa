//! The six representations of a conformally invariant planar energy and the
//! exact conversions between them.
//!
//! An objective, isotropic, isochoric W on GL+(2) is equivalently a function
//! of the singular value ratio t = lambda1/lambda2 (form `h`), of
//! theta = log^2 t (form `f`), of eta = theta/2 = ||dev2 log U||^2 (form
//! `ftilde`), or of the distortion K = (t + 1/t)/2 (form `z`). Conversions
//! are lazy closure compositions, never resampled, and propagate analytic
//! first and second derivatives by the chain rule whenever the source
//! carries them.

use std::fmt;
use std::sync::Arc;

use rand::RngExt;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::planar::{svd2, Mat2};

/// Seed for all registration-time sampling checks. Fixed so that a failing
/// registration reproduces bit-identically.
pub const REGISTRATION_SEED: u64 = 0x1505_CAFE;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type RealFn2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type MatrixFn = Arc<dyn Fn(&Mat2) -> f64 + Send + Sync>;

/// Interval domain with an open or closed left end; the right end is open
/// and may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Domain {
    pub lo: f64,
    pub lo_closed: bool,
    pub hi: f64,
}

impl Domain {
    pub const fn open_from(lo: f64) -> Self {
        Self {
            lo,
            lo_closed: false,
            hi: f64::INFINITY,
        }
    }

    pub const fn closed_from(lo: f64) -> Self {
        Self {
            lo,
            lo_closed: true,
            hi: f64::INFINITY,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed {
            x >= self.lo
        } else {
            x > self.lo
        };
        above && x < self.hi
    }

    /// Distance from x to the left boundary (the binding one in practice).
    pub fn slack_below(&self, x: f64) -> f64 {
        x - self.lo
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.lo_closed { '[' } else { '(' };
        write!(f, "{}{}, {})", open, self.lo, self.hi)
    }
}

/// A scalar function with optional analytic first and second derivatives.
#[derive(Clone)]
pub struct ScalarFn {
    eval: RealFn,
    d1: Option<RealFn>,
    d2: Option<RealFn>,
    domain: Domain,
}

impl fmt::Debug for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarFn")
            .field("domain", &self.domain)
            .field("analytic_d1", &self.d1.is_some())
            .field("analytic_d2", &self.d2.is_some())
            .finish()
    }
}

/// Deterministic points used to probe finiteness of a freshly registered
/// function, clipped to its domain. A smoke check over a representative
/// range, not a proof; exponential energies overflow f64 far outside it.
fn probe_points(domain: &Domain) -> Vec<f64> {
    let ladder = [
        1e-6, 1e-3, 0.03, 0.2, 0.5, 0.9, 1.0, 1.2, 2.0, 5.0, 10.0, 25.0, 50.0,
    ];
    ladder
        .iter()
        .map(|&o| {
            if domain.lo_closed {
                domain.lo + o - 1e-6
            } else {
                domain.lo + o
            }
        })
        .filter(|&x| domain.contains(x))
        .collect()
}

impl ScalarFn {
    pub fn new(domain: Domain, eval: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        Self::build(domain, Arc::new(eval), None, None, true)
    }

    pub fn with_derivatives(
        domain: Domain,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        Self::build(
            domain,
            Arc::new(eval),
            Some(Arc::new(d1)),
            Some(Arc::new(d2)),
            true,
        )
    }

    /// Composition constructor: no resampling, the parts were checked when
    /// the source registered.
    pub(crate) fn raw(
        domain: Domain,
        eval: RealFn,
        d1: Option<RealFn>,
        d2: Option<RealFn>,
    ) -> Self {
        Self {
            eval,
            d1,
            d2,
            domain,
        }
    }

    fn build(
        domain: Domain,
        eval: RealFn,
        d1: Option<RealFn>,
        d2: Option<RealFn>,
        check: bool,
    ) -> Result<Self> {
        if check {
            for x in probe_points(&domain) {
                let v = (eval)(x);
                if !v.is_finite() {
                    return Err(Error::NonFiniteSample { at: x });
                }
            }
        }
        Ok(Self {
            eval,
            d1,
            d2,
            domain,
        })
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn eval_checked(&self, x: f64) -> Result<f64> {
        if !self.domain.contains(x) {
            return Err(Error::Domain {
                of: "scalar function".into(),
                argument: x,
            });
        }
        Ok((self.eval)(x))
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn analytic_d1(&self, x: f64) -> Option<f64> {
        self.d1.as_ref().map(|d| d(x))
    }

    pub fn analytic_d2(&self, x: f64) -> Option<f64> {
        self.d2.as_ref().map(|d| d(x))
    }

    pub fn has_analytic_derivatives(&self) -> bool {
        self.d1.is_some() && self.d2.is_some()
    }
}

/// A symmetric function of the two singular values, g(l1, l2) = g(l2, l1).
/// Symmetry is checked on a seeded sample at construction.
#[derive(Clone)]
pub struct SymmetricFn2 {
    eval: RealFn2,
}

impl SymmetricFn2 {
    pub fn new(eval: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        let eval: RealFn2 = Arc::new(eval);
        let mut rng = ChaCha8Rng::seed_from_u64(REGISTRATION_SEED);
        for _ in 0..32 {
            let x = (rng.random_range(-3.0..3.0_f64)).exp();
            let y = (rng.random_range(-3.0..3.0_f64)).exp();
            let (a, b) = (eval(x, y), eval(y, x));
            if !a.is_finite() {
                return Err(Error::NonFiniteSample { at: x });
            }
            let dev = (a - b).abs();
            if dev > 1e-12 * a.abs().max(1.0) {
                return Err(Error::AsymmetricPayload { deviation: dev });
            }
        }
        Ok(Self { eval })
    }

    #[inline]
    pub fn eval(&self, l1: f64, l2: f64) -> f64 {
        (self.eval)(l1, l2)
    }
}

/// Which representation an energy payload is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ReprKind {
    MatrixW,
    SymmetricG,
    RatioH,
    LogSqF,
    StrainFTilde,
    DistortionZ,
}

impl ReprKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ReprKind::MatrixW => "matrix",
            ReprKind::SymmetricG => "g",
            ReprKind::RatioH => "h",
            ReprKind::LogSqF => "f",
            ReprKind::StrainFTilde => "ftilde",
            ReprKind::DistortionZ => "z",
        }
    }
}

#[derive(Clone)]
enum Payload {
    Matrix(MatrixFn),
    Symmetric(SymmetricFn2),
    RatioH(ScalarFn),
    LogSqF(ScalarFn),
    StrainFTilde(ScalarFn),
    DistortionZ(ScalarFn),
}

/// An energy on GL+(2) in one of the six representations.
#[derive(Clone)]
pub struct EnergyRep {
    name: String,
    payload: Payload,
    isochoric_declared: bool,
}

impl fmt::Debug for EnergyRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EnergyRep")
            .field("name", &self.name)
            .field("kind", &self.kind())
            .field("isochoric_declared", &self.isochoric_declared)
            .finish()
    }
}

/// Seeded GL+(2) sample used by registration checks.
fn registration_matrices(n: usize) -> Vec<Mat2> {
    let mut rng = ChaCha8Rng::seed_from_u64(REGISTRATION_SEED ^ 0x9E37_79B9);
    (0..n)
        .map(|_| {
            let l1 = (rng.random_range(-1.6..1.6_f64)).exp();
            let l2 = (rng.random_range(-1.6..1.6_f64)).exp();
            let a = rng.random_range(0.0..std::f64::consts::TAU);
            let b = rng.random_range(0.0..std::f64::consts::TAU);
            let r1 = Mat2::rotation(a).unwrap();
            let r2 = Mat2::rotation(b).unwrap();
            r1 * Mat2::diag(l1, l2).unwrap() * r2
        })
        .collect()
}

impl EnergyRep {
    /// Matrix-form energy. When declared isochoric, W(aF) = W(F) is verified
    /// on a seeded sample for a in {1/7, 1/2, 3, 42} to 1e-9 relative.
    pub fn matrix(
        name: impl Into<String>,
        isochoric_declared: bool,
        w: impl Fn(&Mat2) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let w: MatrixFn = Arc::new(w);
        if isochoric_declared {
            verify_isochoric(&w)?;
        }
        Ok(Self {
            name: name.into(),
            payload: Payload::Matrix(w),
            isochoric_declared,
        })
    }

    pub fn symmetric_g(name: impl Into<String>, g: SymmetricFn2) -> Self {
        Self {
            name: name.into(),
            payload: Payload::Symmetric(g),
            isochoric_declared: false,
        }
    }

    /// Ratio-form energy h(t). The reflection identity h(t) = h(1/t) is
    /// verified on a seeded sample to 1e-10.
    pub fn ratio_h(name: impl Into<String>, h: ScalarFn) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(REGISTRATION_SEED ^ 0x517C_C1B7);
        for _ in 0..32 {
            let t = (rng.random_range(0.0..(1e3_f64).ln())).exp();
            if !h.domain().contains(t) || !h.domain().contains(1.0 / t) {
                continue;
            }
            let (a, b) = (h.eval(t), h.eval(1.0 / t));
            let dev = (a - b).abs();
            if dev > 1e-10 * a.abs().max(1.0) {
                return Err(Error::RatioSymmetryViolation { t, deviation: dev });
            }
        }
        Ok(Self {
            name: name.into(),
            payload: Payload::RatioH(h),
            isochoric_declared: true,
        })
    }

    pub fn log_sq_f(name: impl Into<String>, f: ScalarFn) -> Self {
        Self {
            name: name.into(),
            payload: Payload::LogSqF(f),
            isochoric_declared: true,
        }
    }

    pub fn strain_ftilde(name: impl Into<String>, ft: ScalarFn) -> Self {
        Self {
            name: name.into(),
            payload: Payload::StrainFTilde(ft),
            isochoric_declared: true,
        }
    }

    pub fn distortion_z(name: impl Into<String>, z: ScalarFn) -> Self {
        Self {
            name: name.into(),
            payload: Payload::DistortionZ(z),
            isochoric_declared: true,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> ReprKind {
        match &self.payload {
            Payload::Matrix(_) => ReprKind::MatrixW,
            Payload::Symmetric(_) => ReprKind::SymmetricG,
            Payload::RatioH(_) => ReprKind::RatioH,
            Payload::LogSqF(_) => ReprKind::LogSqF,
            Payload::StrainFTilde(_) => ReprKind::StrainFTilde,
            Payload::DistortionZ(_) => ReprKind::DistortionZ,
        }
    }

    pub fn is_isochoric_declared(&self) -> bool {
        self.isochoric_declared
    }

    /// The scalar payload, when the representation has one.
    pub fn scalar_payload(&self) -> Option<&ScalarFn> {
        match &self.payload {
            Payload::RatioH(s)
            | Payload::LogSqF(s)
            | Payload::StrainFTilde(s)
            | Payload::DistortionZ(s) => Some(s),
            _ => None,
        }
    }

    /// The symmetric two-variable payload, for g-form energies.
    pub fn symmetric_g_payload(&self) -> Option<&SymmetricFn2> {
        match &self.payload {
            Payload::Symmetric(g) => Some(g),
            _ => None,
        }
    }

    /// Evaluate the energy at a matrix argument, dispatching on the
    /// representation through the singular values of F.
    pub fn eval_at_matrix(&self, f: &Mat2) -> Result<f64> {
        let sv = svd2(f)?;
        let val = match &self.payload {
            Payload::Matrix(w) => w(f),
            Payload::Symmetric(g) => g.eval(sv.lambda1, sv.lambda2),
            Payload::RatioH(h) => {
                let t = sv.ratio();
                if !h.domain().contains(t) {
                    return Err(Error::Domain {
                        of: format!("h of {}", self.name),
                        argument: t,
                    });
                }
                h.eval(t)
            }
            Payload::LogSqF(fq) => {
                let theta = sv.theta();
                if !fq.domain().contains(theta) {
                    return Err(Error::Domain {
                        of: format!("f of {}", self.name),
                        argument: theta,
                    });
                }
                fq.eval(theta)
            }
            Payload::StrainFTilde(ft) => {
                let eta = sv.eta();
                if !ft.domain().contains(eta) {
                    return Err(Error::Domain {
                        of: format!("ftilde of {}", self.name),
                        argument: eta,
                    });
                }
                ft.eval(eta)
            }
            Payload::DistortionZ(z) => {
                let k = sv.distortion();
                if !z.domain().contains(k) {
                    return Err(Error::Domain {
                        of: format!("z of {}", self.name),
                        argument: k,
                    });
                }
                z.eval(k)
            }
        };
        Ok(val)
    }

    /// The energy as a plain matrix callable (for the sampling oracle).
    pub fn as_matrix_fn(&self) -> MatrixFn {
        match &self.payload {
            Payload::Matrix(w) => Arc::clone(w),
            _ => {
                let me = self.clone();
                Arc::new(move |f: &Mat2| me.eval_at_matrix(f).unwrap_or(f64::NAN))
            }
        }
    }
}

fn verify_isochoric(w: &MatrixFn) -> Result<()> {
    let sample = registration_matrices(8);
    for f in &sample {
        let base = w(f);
        if !base.is_finite() {
            return Err(Error::NonFiniteSample { at: f.det() });
        }
        for a in [1.0 / 7.0, 0.5, 3.0, 42.0] {
            let scaled = w(&(*f * a));
            let dev = (scaled - base).abs();
            if dev > 1e-9 * base.abs().max(1.0) {
                return Err(Error::NotIsochoric {
                    scale: a,
                    deviation: dev,
                });
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Conversions. Each one is the canonical construction behind the uniqueness
// of the respective representation; derivatives propagate by the chain rule.
// ---------------------------------------------------------------------------

/// h(t) = W(diag(t, 1)) for an isochoric matrix-form energy. Fails with
/// `NotIsochoric` when the scaling identity does not hold on the
/// registration sample.
pub fn h_from_matrix(rep: &EnergyRep) -> Result<EnergyRep> {
    let w = match &rep.payload {
        Payload::Matrix(w) => w,
        _ => {
            return Err(Error::InvalidConfig {
                reason: format!(
                    "h_from_matrix needs a matrix-form energy, got {:?}",
                    rep.kind()
                ),
            })
        }
    };
    verify_isochoric(w)?;
    let w = Arc::clone(w);
    let eval: RealFn = Arc::new(move |t: f64| {
        w(&Mat2 {
            a11: t,
            a12: 0.0,
            a21: 0.0,
            a22: 1.0,
        })
    });
    let h = ScalarFn::raw(Domain::open_from(0.0), eval, None, None);
    EnergyRep::ratio_h(format!("{}|h", rep.name), h)
}

/// h(t) = g(sqrt t, 1/sqrt t): the ratio form of the isochoric reduction
/// of g (restriction to det = 1).
pub fn h_from_g(name: impl Into<String>, g: &SymmetricFn2) -> Result<EnergyRep> {
    let g = g.clone();
    let eval: RealFn = Arc::new(move |t: f64| {
        let s = t.sqrt();
        g.eval(s, 1.0 / s)
    });
    let h = ScalarFn::raw(Domain::open_from(0.0), eval, None, None);
    EnergyRep::ratio_h(name, h)
}

/// f(theta) = h(e^{sqrt theta}) on [0, inf).
pub fn f_from_h(h: &ScalarFn) -> ScalarFn {
    let he = h.clone();
    let eval: RealFn = Arc::new(move |theta: f64| he.eval(theta.sqrt().exp()));
    let (d1, d2) = if h.has_analytic_derivatives() {
        let ha = h.clone();
        let hb = h.clone();
        let d1: RealFn = Arc::new(move |theta: f64| {
            let s = theta.sqrt();
            let u = s.exp();
            ha.analytic_d1(u).unwrap() * u / (2.0 * s)
        });
        let d2: RealFn = Arc::new(move |theta: f64| {
            let s = theta.sqrt();
            let u = s.exp();
            let h1 = hb.analytic_d1(u).unwrap();
            let h2 = hb.analytic_d2(u).unwrap();
            (u / (4.0 * theta)) * (h2 * u + h1 * (1.0 - 1.0 / s))
        });
        (Some(d1), Some(d2))
    } else {
        (None, None)
    };
    ScalarFn::raw(Domain::closed_from(0.0), eval, d1, d2)
}

/// ftilde(eta) = f(2 eta).
pub fn ftilde_from_f(f: &ScalarFn) -> ScalarFn {
    let fe = f.clone();
    let eval: RealFn = Arc::new(move |eta: f64| fe.eval(2.0 * eta));
    let (d1, d2) = if f.has_analytic_derivatives() {
        let fa = f.clone();
        let fb = f.clone();
        let d1: RealFn = Arc::new(move |eta: f64| 2.0 * fa.analytic_d1(2.0 * eta).unwrap());
        let d2: RealFn = Arc::new(move |eta: f64| 4.0 * fb.analytic_d2(2.0 * eta).unwrap());
        (Some(d1), Some(d2))
    } else {
        (None, None)
    };
    ScalarFn::raw(Domain::closed_from(0.0), eval, d1, d2)
}

/// z(r) = h(r + sqrt(r^2 - 1)) on [1, inf); the argument map inverts
/// p(t) = (t + 1/t)/2.
pub fn z_from_h(h: &ScalarFn) -> ScalarFn {
    fn q(r: f64) -> f64 {
        r + (r * r - 1.0).max(0.0).sqrt()
    }
    let he = h.clone();
    let eval: RealFn = Arc::new(move |r: f64| he.eval(q(r)));
    let (d1, d2) = if h.has_analytic_derivatives() {
        let ha = h.clone();
        let hb = h.clone();
        let d1: RealFn = Arc::new(move |r: f64| {
            let root = (r * r - 1.0).max(0.0).sqrt();
            ha.analytic_d1(r + root).unwrap() * (1.0 + r / root)
        });
        let d2: RealFn = Arc::new(move |r: f64| {
            let root = (r * r - 1.0).max(0.0).sqrt();
            let t = r + root;
            let q1 = 1.0 + r / root;
            let q2 = -1.0 / (root * root * root);
            hb.analytic_d2(t).unwrap() * q1 * q1 + hb.analytic_d1(t).unwrap() * q2
        });
        (Some(d1), Some(d2))
    } else {
        (None, None)
    };
    ScalarFn::raw(Domain::closed_from(1.0), eval, d1, d2)
}

/// h(t) = f(log^2 t).
pub fn h_from_f(f: &ScalarFn) -> ScalarFn {
    let fe = f.clone();
    let eval: RealFn = Arc::new(move |t: f64| {
        let l = t.ln();
        fe.eval(l * l)
    });
    let (d1, d2) = if f.has_analytic_derivatives() {
        let fa = f.clone();
        let fb = f.clone();
        let d1: RealFn = Arc::new(move |t: f64| {
            let l = t.ln();
            fa.analytic_d1(l * l).unwrap() * 2.0 * l / t
        });
        let d2: RealFn = Arc::new(move |t: f64| {
            let l = t.ln();
            let f1 = fb.analytic_d1(l * l).unwrap();
            let f2 = fb.analytic_d2(l * l).unwrap();
            (2.0 / (t * t)) * (2.0 * l * l * f2 + (1.0 - l) * f1)
        });
        (Some(d1), Some(d2))
    } else {
        (None, None)
    };
    ScalarFn::raw(Domain::open_from(0.0), eval, d1, d2)
}

/// h(t) = ftilde(log^2 t / 2).
pub fn h_from_ftilde(ft: &ScalarFn) -> ScalarFn {
    let fe = ft.clone();
    let eval: RealFn = Arc::new(move |t: f64| {
        let l = t.ln();
        fe.eval(0.5 * l * l)
    });
    let (d1, d2) = if ft.has_analytic_derivatives() {
        let fa = ft.clone();
        let fb = ft.clone();
        let d1: RealFn = Arc::new(move |t: f64| {
            let l = t.ln();
            fa.analytic_d1(0.5 * l * l).unwrap() * l / t
        });
        let d2: RealFn = Arc::new(move |t: f64| {
            let l = t.ln();
            let eta = 0.5 * l * l;
            let g1 = fb.analytic_d1(eta).unwrap();
            let g2 = fb.analytic_d2(eta).unwrap();
            (g2 * l * l + g1 * (1.0 - l)) / (t * t)
        });
        (Some(d1), Some(d2))
    } else {
        (None, None)
    };
    ScalarFn::raw(Domain::open_from(0.0), eval, d1, d2)
}

/// f(theta) = ftilde(theta / 2).
pub fn f_from_ftilde(ft: &ScalarFn) -> ScalarFn {
    let fe = ft.clone();
    let eval: RealFn = Arc::new(move |theta: f64| fe.eval(0.5 * theta));
    let (d1, d2) = if ft.has_analytic_derivatives() {
        let fa = ft.clone();
        let fb = ft.clone();
        let d1: RealFn = Arc::new(move |theta: f64| 0.5 * fa.analytic_d1(0.5 * theta).unwrap());
        let d2: RealFn = Arc::new(move |theta: f64| 0.25 * fb.analytic_d2(0.5 * theta).unwrap());
        (Some(d1), Some(d2))
    } else {
        (None, None)
    };
    ScalarFn::raw(Domain::closed_from(0.0), eval, d1, d2)
}

/// h(t) = z((t + 1/t)/2).
pub fn h_from_z(z: &ScalarFn) -> ScalarFn {
    let ze = z.clone();
    let eval: RealFn = Arc::new(move |t: f64| ze.eval(0.5 * (t + 1.0 / t)));
    let (d1, d2) = if z.has_analytic_derivatives() {
        let za = z.clone();
        let zb = z.clone();
        let d1: RealFn = Arc::new(move |t: f64| {
            let p = 0.5 * (t + 1.0 / t);
            za.analytic_d1(p).unwrap() * 0.5 * (1.0 - 1.0 / (t * t))
        });
        let d2: RealFn = Arc::new(move |t: f64| {
            let p = 0.5 * (t + 1.0 / t);
            let p1 = 0.5 * (1.0 - 1.0 / (t * t));
            let p2 = 1.0 / (t * t * t);
            zb.analytic_d2(p).unwrap() * p1 * p1 + zb.analytic_d1(p).unwrap() * p2
        });
        (Some(d1), Some(d2))
    } else {
        (None, None)
    };
    ScalarFn::raw(Domain::open_from(0.0), eval, d1, d2)
}

/// All four scalar forms of one isochoric energy.
#[derive(Clone)]
pub struct ScalarQuartet {
    pub h: ScalarFn,
    pub f: ScalarFn,
    pub ftilde: ScalarFn,
    pub z: ScalarFn,
}

/// Derive the full scalar quartet from any representation. Matrix-form
/// energies must pass the isochoric verification; everything else converts
/// exactly.
pub fn scalar_quartet(rep: &EnergyRep) -> Result<ScalarQuartet> {
    let (h, f, ftilde, z);
    match &rep.payload {
        Payload::RatioH(hh) => {
            h = hh.clone();
            f = f_from_h(&h);
            ftilde = ftilde_from_f(&f);
            z = z_from_h(&h);
        }
        Payload::LogSqF(ff) => {
            f = ff.clone();
            h = h_from_f(&f);
            ftilde = ftilde_from_f(&f);
            z = z_from_h(&h);
        }
        Payload::StrainFTilde(ft) => {
            ftilde = ft.clone();
            f = f_from_ftilde(&ftilde);
            h = h_from_ftilde(&ftilde);
            z = z_from_h(&h);
        }
        Payload::DistortionZ(zz) => {
            z = zz.clone();
            h = h_from_z(&z);
            f = f_from_h(&h);
            ftilde = ftilde_from_f(&f);
        }
        Payload::Matrix(_) => {
            let hr = h_from_matrix(rep)?;
            return scalar_quartet(&hr);
        }
        Payload::Symmetric(g) => {
            let hr = h_from_g(format!("{}|h", rep.name), g)?;
            return scalar_quartet(&hr);
        }
    }
    Ok(ScalarQuartet { h, f, ftilde, z })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hencky_h() -> ScalarFn {
        ScalarFn::with_derivatives(
            Domain::open_from(0.0),
            |t: f64| 0.5 * t.ln().powi(2),
            |t: f64| t.ln() / t,
            |t: f64| (1.0 - t.ln()) / (t * t),
        )
        .unwrap()
    }

    #[test]
    fn h_from_matrix_hencky() {
        let w = EnergyRep::matrix("hencky", true, |f: &Mat2| {
            svd2(f).map(|sv| sv.eta()).unwrap_or(f64::NAN)
        })
        .unwrap();
        let h = h_from_matrix(&w).unwrap();
        let got = h.scalar_payload().unwrap().eval(2.0);
        assert!((got - 0.5 * 2.0_f64.ln().powi(2)).abs() < 1e-14); // ~0.240227

        let zero = EnergyRep::matrix("zero", true, |_: &Mat2| 0.0).unwrap();
        let hz = h_from_matrix(&zero).unwrap();
        assert_eq!(hz.scalar_payload().unwrap().eval(7.0), 0.0);

        let k = EnergyRep::matrix("distortion", true, |f: &Mat2| {
            crate::planar::distortion_k(f).unwrap_or(f64::NAN)
        })
        .unwrap();
        let hk = h_from_matrix(&k).unwrap();
        assert!((hk.scalar_payload().unwrap().eval(1.0) - 1.0).abs() < 1e-14);
        let t = 3.7;
        assert!((hk.scalar_payload().unwrap().eval(t) - 0.5 * (t + 1.0 / t)).abs() < 1e-12);
    }

    #[test]
    fn h_from_matrix_rejects_non_isochoric() {
        let biot = EnergyRep::matrix("biot", false, |f: &Mat2| {
            crate::planar::dist_euclid_sq_so2(f)
        })
        .unwrap();
        assert!(matches!(
            h_from_matrix(&biot),
            Err(Error::NotIsochoric { .. })
        ));
    }

    #[test]
    fn declaring_a_non_isochoric_matrix_energy_fails_registration() {
        let result = EnergyRep::matrix("biot", true, |f: &Mat2| {
            crate::planar::dist_euclid_sq_so2(f)
        });
        assert!(matches!(result, Err(Error::NotIsochoric { .. })));
    }

    #[test]
    fn h_from_g_examples() {
        let g = SymmetricFn2::new(|x: f64, y: f64| x / y + y / x).unwrap();
        let h = h_from_g("ratio-sum", &g).unwrap();
        let t = 2.5;
        assert!((h.scalar_payload().unwrap().eval(t) - (t + 1.0 / t)).abs() < 1e-13);

        let g = SymmetricFn2::new(|x: f64, y: f64| (x * y).powi(5)).unwrap();
        let h = h_from_g("volumetric", &g).unwrap();
        assert!((h.scalar_payload().unwrap().eval(9.0) - 1.0).abs() < 1e-12);

        let g = SymmetricFn2::new(|x: f64, y: f64| x.powi(2).max(y.powi(2)) / (x * y)).unwrap();
        let h = h_from_g("spectral", &g).unwrap();
        assert!((h.scalar_payload().unwrap().eval(4.0) - 4.0).abs() < 1e-12);
        assert!((h.scalar_payload().unwrap().eval(0.25) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_g_rejects_antisymmetric() {
        assert!(matches!(
            SymmetricFn2::new(|x: f64, y: f64| x - y),
            Err(Error::AsymmetricPayload { .. })
        ));
    }

    #[test]
    fn ratio_h_rejects_unbalanced() {
        let h = ScalarFn::new(Domain::open_from(0.0), |t: f64| t).unwrap();
        assert!(matches!(
            EnergyRep::ratio_h("linear", h),
            Err(Error::RatioSymmetryViolation { .. })
        ));
    }

    #[test]
    fn f_from_h_examples() {
        let f = f_from_h(&hencky_h());
        assert!((f.eval(3.0) - 1.5).abs() < 1e-13); // theta/2
        assert_eq!(f.eval(0.0), 0.0);

        let c = ScalarFn::new(Domain::open_from(0.0), |_| 4.25).unwrap();
        assert_eq!(f_from_h(&c).eval(11.0), 4.25);

        let k = 0.3_f64;
        let h = ScalarFn::new(Domain::open_from(0.0), move |t: f64| {
            ((k / 2.0) * t.ln().powi(2)).exp()
        })
        .unwrap();
        let f = f_from_h(&h);
        assert!((f.eval(2.0) - (k * 1.0_f64).exp()).abs() < 1e-13); // e^{k theta/2}
    }

    #[test]
    fn f_from_h_chain_derivatives() {
        // h = (1/2) log^2 t gives f = theta/2, so f' = 1/2 and f'' = 0.
        let f = f_from_h(&hencky_h());
        assert!((f.analytic_d1(2.3).unwrap() - 0.5).abs() < 1e-12);
        assert!(f.analytic_d2(2.3).unwrap().abs() < 1e-12);
    }

    #[test]
    fn ftilde_from_f_examples() {
        let half = ScalarFn::with_derivatives(
            Domain::closed_from(0.0),
            |th: f64| 0.5 * th,
            |_| 0.5,
            |_| 0.0,
        )
        .unwrap();
        let ft = ftilde_from_f(&half);
        assert_eq!(ft.eval(1.7), 1.7);
        assert_eq!(ft.analytic_d1(0.4).unwrap(), 1.0);

        let k = 0.25_f64;
        let f = ScalarFn::new(Domain::closed_from(0.0), move |th: f64| {
            (k * th / 2.0).exp()
        })
        .unwrap();
        let ft = ftilde_from_f(&f);
        assert!((ft.eval(2.0) - (2.0 * k).exp()).abs() < 1e-13); // e^{k eta}
    }

    #[test]
    fn z_from_h_examples() {
        let h = ScalarFn::new(Domain::open_from(0.0), |t: f64| t.max(1.0 / t)).unwrap();
        let z = z_from_h(&h);
        assert!((z.eval(1.25) - 2.0).abs() < 1e-13);

        let p = ScalarFn::new(Domain::open_from(0.0), |t: f64| 0.5 * (t + 1.0 / t)).unwrap();
        let z = z_from_h(&p);
        for r in [1.0, 1.5, 4.0, 90.0] {
            assert!((z.eval(r) - r).abs() < 1e-10 * r.max(1.0)); // p(q(r)) = r
        }
    }

    #[test]
    fn eval_at_matrix_dispatch() {
        let h = EnergyRep::ratio_h("hencky", hencky_h()).unwrap();
        let f = Mat2::diag(2.0, 1.0).unwrap();
        let expect = 0.5 * 2.0_f64.ln().powi(2);
        assert!((h.eval_at_matrix(&f).unwrap() - expect).abs() < 1e-14);

        // Conformal arguments land at t = 1.
        let c = Mat2::rotation(1.1).unwrap() * 3.0;
        assert!(h.eval_at_matrix(&c).unwrap().abs() < 1e-12);

        let z = ScalarFn::new(Domain::closed_from(1.0), |r: f64| 2.0 * r).unwrap();
        let e = EnergyRep::distortion_z("2r", z);
        assert!((e.eval_at_matrix(&f).unwrap() - 2.5).abs() < 1e-14);
    }

    #[test]
    fn eval_at_matrix_domain_error() {
        let z = ScalarFn::new(
            Domain {
                lo: 1.0,
                lo_closed: true,
                hi: 1.2,
            },
            |r: f64| r,
        )
        .unwrap();
        let e = EnergyRep::distortion_z("narrow", z);
        let f = Mat2::diag(9.0, 1.0).unwrap();
        assert!(matches!(e.eval_at_matrix(&f), Err(Error::Domain { .. })));
    }

    #[test]
    fn chain_rule_derivatives_match_finite_differences() {
        let ft = ScalarFn::with_derivatives(
            Domain::closed_from(0.0),
            |eta: f64| (0.3 * eta).exp(),
            |eta: f64| 0.3 * (0.3 * eta).exp(),
            |eta: f64| 0.09 * (0.3 * eta).exp(),
        )
        .unwrap();
        let rep = EnergyRep::strain_ftilde("exp", ft);
        let q = scalar_quartet(&rep).unwrap();

        let fd = |f: &ScalarFn, x: f64, h: f64| {
            let d1 = (f.eval(x + h) - f.eval(x - h)) / (2.0 * h);
            let d2 = (f.eval(x + h) - 2.0 * f.eval(x) + f.eval(x - h)) / (h * h);
            (d1, d2)
        };
        // A z-native and an h-native source exercise the remaining
        // conversion directions.
        let z = ScalarFn::with_derivatives(
            Domain::closed_from(1.0),
            |r: f64| (2.0 * r).powf(1.3),
            |r: f64| 2.6 * (2.0 * r).powf(0.3),
            |r: f64| 1.56 * (2.0 * r).powf(-0.7),
        )
        .unwrap();
        let qz = scalar_quartet(&EnergyRep::distortion_z("pow", z)).unwrap();
        let hfn = ScalarFn::with_derivatives(
            Domain::open_from(0.0),
            |t: f64| 2.0 * (t + 1.0 / t) - 4.0,
            |t: f64| 2.0 * (1.0 - 1.0 / (t * t)),
            |t: f64| 4.0 / (t * t * t),
        )
        .unwrap();
        let qh = scalar_quartet(&EnergyRep::ratio_h("sum", hfn).unwrap()).unwrap();

        for q in [&q, &qz, &qh] {
            let cases: [(&ScalarFn, &[f64]); 4] = [
                (&q.h, &[1.3, 2.0, 7.0, 40.0]),
                (&q.f, &[0.4, 1.0, 3.0, 11.0]),
                (&q.ftilde, &[0.2, 0.5, 1.5, 5.5]),
                (&q.z, &[1.05, 1.4, 3.0, 20.0]),
            ];
            for (f, xs) in cases {
                for &x in xs {
                    let h = 1e-5 * x.max(1.0);
                    let (fd1, fd2) = fd(f, x, h);
                    let a1 = f.analytic_d1(x).unwrap();
                    let a2 = f.analytic_d2(x).unwrap();
                    assert!(
                        (a1 - fd1).abs() <= 1e-6 * a1.abs().max(1.0),
                        "d1 at {x}: analytic {a1} vs fd {fd1}"
                    );
                    assert!(
                        (a2 - fd2).abs() <= 2e-4 * a2.abs().max(1.0),
                        "d2 at {x}: analytic {a2} vs fd {fd2}"
                    );
                }
            }
        }
    }

    #[test]
    fn energies_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<Mat2>();
        assert_send_sync::<ScalarFn>();
        assert_send_sync::<SymmetricFn2>();
        assert_send_sync::<EnergyRep>();
    }

    #[test]
    fn quartet_agrees_across_forms() {
        let ft = ScalarFn::with_derivatives(
            Domain::closed_from(0.0),
            |eta: f64| (0.3 * eta).exp(),
            |eta: f64| 0.3 * (0.3 * eta).exp(),
            |eta: f64| 0.09 * (0.3 * eta).exp(),
        )
        .unwrap();
        let rep = EnergyRep::strain_ftilde("exp", ft);
        let q = scalar_quartet(&rep).unwrap();
        for t in [1.0001, 1.8, 5.0, 120.0] {
            let l: f64 = t;
            let theta = l.ln().powi(2);
            let eta = 0.5 * theta;
            let r = 0.5 * (t + 1.0 / t);
            let want = (0.3 * eta).exp();
            assert!((q.h.eval(t) - want).abs() < 1e-12 * want);
            assert!((q.f.eval(theta) - want).abs() < 1e-12 * want);
            assert!((q.ftilde.eval(eta) - want).abs() < 1e-12 * want);
            assert!((q.z.eval(r) - want).abs() < 1e-9 * want);
        }
    }
}
