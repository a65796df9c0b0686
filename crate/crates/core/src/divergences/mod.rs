//! Hellinger, total-variation, symmetric chi-squared and KL distances, and the
//! per-sample sensitivity `Δ(P, Q) = sup |P - Q| / (P + Q)`.
//!
//! Pairs of discrete laws are summed exactly over the union of their atoms.
//! Gaussian pairs use closed forms where one exists. Everything else is
//! integrated with adaptive Simpson over `support_grid(·, 1e-9)`.

use statrs::function::erf::erf;

use crate::distributions::{log_sum_exp, Distribution, Interval, Support};
use crate::error::{Error, Result};

pub mod quadrature;

/// Tail mass left out of the integration domain, per law.
pub const QUADRATURE_TAIL_MASS: f64 = 1e-9;
/// Absolute error target of the quadrature.
pub const QUADRATURE_TOLERANCE: f64 = 1e-8;
/// Maximum integrand evaluations per quadrature.
pub const QUADRATURE_BUDGET: usize = 1 << 20;
/// Tail mass dropped from countably infinite discrete supports.
pub const DISCRETE_TAIL_MASS: f64 = 1e-15;
/// Minimum grid points per support interval when searching for `Δ(P, Q)`.
pub const DELTA_GRID_POINTS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ExactDiscrete,
    Quadrature,
    ClosedForm,
    MonteCarlo,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ExactDiscrete => "exact_discrete",
            Method::Quadrature => "quadrature",
            Method::ClosedForm => "closed_form",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceResult {
    pub value: f64,
    pub method: Method,
    pub abs_error_bound: f64,
}

impl DivergenceResult {
    fn exact(value: f64, method: Method) -> Self {
        Self {
            value,
            method,
            abs_error_bound: 0.0,
        }
    }

    /// KL divergence is `+inf` when `P` puts mass where `Q` has none.
    pub fn is_infinite(&self) -> bool {
        self.value == f64::INFINITY
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Hellinger,
    TotalVariation,
    Chi2Symmetric,
    Kl,
    DeltaMax,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::Hellinger,
        Metric::TotalVariation,
        Metric::Chi2Symmetric,
        Metric::Kl,
        Metric::DeltaMax,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Metric::Hellinger => "hellinger",
            Metric::TotalVariation => "tv",
            Metric::Chi2Symmetric => "chi2",
            Metric::Kl => "kl",
            Metric::DeltaMax => "delta",
        }
    }
}

/// How a continuous pair is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Route {
    /// Closed form when available, quadrature otherwise.
    #[default]
    Auto,
    /// Always integrate numerically, even when a closed form exists.
    Quadrature,
}

/// `(P(x) - Q(x)) / (P(x) + Q(x))` from log densities, as
/// `tanh((log P - log Q) / 2)`.
///
/// The second value is true when both densities vanish; the score is then 0.
pub fn score_from_logs(log_p: f64, log_q: f64) -> (f64, bool) {
    match (log_p == f64::NEG_INFINITY, log_q == f64::NEG_INFINITY) {
        (true, true) => (0.0, true),
        (false, true) => (1.0, false),
        (true, false) => (-1.0, false),
        (false, false) => ((0.5 * (log_p - log_q)).tanh(), false),
    }
}

/// One atom of a discrete pair with both masses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointMass {
    pub atom: f64,
    pub p: f64,
    pub q: f64,
}

/// Masses of two discrete laws over the union of their atoms. Countably
/// infinite supports are cut where each tail drops below `tail_mass`.
pub fn joint_masses(p: &Distribution, q: &Distribution, tail_mass: f64) -> Result<Vec<JointMass>> {
    if !p.is_discrete() || !q.is_discrete() {
        return Err(Error::UnsupportedDistribution {
            operation: "joint_masses",
            detail: format!("{p} and {q} must both be discrete"),
        });
    }
    let support = p.support_grid(tail_mass)?.union(&q.support_grid(tail_mass)?);
    let atoms = support.atoms().expect("discrete supports are atoms");
    Ok(atoms
        .iter()
        .map(|&atom| JointMass {
            atom,
            p: p.density(atom),
            q: q.density(atom),
        })
        .collect())
}

pub fn hellinger(p: &Distribution, q: &Distribution) -> Result<DivergenceResult> {
    compute(Metric::Hellinger, p, q, Route::Auto)
}

pub fn total_variation(p: &Distribution, q: &Distribution) -> Result<DivergenceResult> {
    compute(Metric::TotalVariation, p, q, Route::Auto)
}

pub fn chi2_symmetric(p: &Distribution, q: &Distribution) -> Result<DivergenceResult> {
    compute(Metric::Chi2Symmetric, p, q, Route::Auto)
}

/// `KL(P || Q)`. An infinite value is a valid result, not an error.
pub fn kl(p: &Distribution, q: &Distribution) -> Result<DivergenceResult> {
    compute(Metric::Kl, p, q, Route::Auto)
}

/// `Δ(P, Q)`. Exact for finite supports. Otherwise a grid search whose value
/// is a lower bound on the supremum; `abs_error_bound` is `1 - value`, since
/// the supremum never exceeds 1.
pub fn delta_max(p: &Distribution, q: &Distribution) -> DivergenceResult {
    if p.is_discrete() != q.is_discrete() {
        return DivergenceResult::exact(1.0, Method::ClosedForm);
    }
    if p.has_finite_support() && q.has_finite_support() {
        let support = union_support(p, q, DISCRETE_TAIL_MASS);
        let value = max_abs_score(p, q, support.atoms().expect("finite support").iter().copied());
        return DivergenceResult::exact(value, Method::ExactDiscrete);
    }

    let support = union_support(p, q, QUADRATURE_TAIL_MASS);
    let hull = support.hull().expect("nonempty support");
    let width = hull.width().max(1.0);
    let mut points: Vec<f64> = match &support {
        Support::Atoms(atoms) => atoms.clone(),
        Support::Intervals(parts) => parts
            .iter()
            .flat_map(|iv| {
                let step = iv.width() / (DELTA_GRID_POINTS - 1) as f64;
                (0..DELTA_GRID_POINTS).map(move |i| iv.lo + step * i as f64)
            })
            .collect(),
    };
    // Probe geometrically further out on both sides; a log-ratio that keeps
    // growing shows up as a score saturating at 1.
    for k in 0..64 {
        let offset = width * 2f64.powi(k);
        let (lo, hi) = (hull.lo - offset, hull.hi + offset);
        if !lo.is_finite() || !hi.is_finite() {
            break;
        }
        if p.is_discrete() {
            points.extend([lo.round().max(0.0), hi.round()]);
        } else {
            points.extend([lo, hi]);
        }
    }
    let value = max_abs_score(p, q, points.into_iter());
    DivergenceResult {
        value,
        method: Method::Quadrature,
        abs_error_bound: 1.0 - value,
    }
}

fn max_abs_score(p: &Distribution, q: &Distribution, points: impl Iterator<Item = f64>) -> f64 {
    points
        .map(|x| score_from_logs(p.log_density(x), q.log_density(x)).0.abs())
        .fold(0.0, f64::max)
}

fn union_support(p: &Distribution, q: &Distribution, tail: f64) -> Support {
    p.support_grid(tail)
        .expect("valid tail")
        .union(&q.support_grid(tail).expect("valid tail"))
}

/// Evaluates `metric` for the pair, choosing exact, closed-form, or
/// numerical evaluation per `route`.
pub fn compute(metric: Metric, p: &Distribution, q: &Distribution, route: Route) -> Result<DivergenceResult> {
    if metric == Metric::DeltaMax {
        return Ok(delta_max(p, q));
    }
    if p.is_discrete() != q.is_discrete() {
        // A mass function and a density are mutually singular.
        let value = match metric {
            Metric::Hellinger | Metric::TotalVariation | Metric::DeltaMax => 1.0,
            Metric::Chi2Symmetric => 2.0,
            Metric::Kl => f64::INFINITY,
        };
        return Ok(DivergenceResult::exact(value, Method::ClosedForm));
    }
    if p.is_discrete() {
        if route == Route::Auto {
            if let Some(r) = poisson_closed_form(metric, p, q) {
                return Ok(r);
            }
        }
        return Ok(discrete(metric, p, q));
    }
    if route == Route::Auto {
        if let Some(r) = gaussian_closed_form(metric, p, q) {
            return Ok(r);
        }
    }
    numerical(metric, p, q)
}

#[derive(Default)]
struct Sums {
    h2: f64,
    tv: f64,
    chi2: f64,
    kl: f64,
    mass_p: f64,
    mass_q: f64,
}

fn discrete(metric: Metric, p: &Distribution, q: &Distribution) -> DivergenceResult {
    let masses = joint_masses(p, q, DISCRETE_TAIL_MASS).expect("discrete pair");
    let mut s = Sums::default();
    for JointMass { p: pm, q: qm, .. } in masses {
        s.h2 += 0.5 * (pm.sqrt() - qm.sqrt()).powi(2);
        s.tv += 0.5 * (pm - qm).abs();
        if pm + qm > 0.0 {
            s.chi2 += (pm - qm).powi(2) / (pm + qm);
        }
        if pm > 0.0 {
            s.kl += if qm == 0.0 { f64::INFINITY } else { pm * (pm.ln() - qm.ln()) };
        }
        s.mass_p += pm;
        s.mass_q += qm;
    }
    let finite = p.has_finite_support() && q.has_finite_support();
    let missing = if finite {
        0.0
    } else {
        (1.0 - s.mass_p).max(0.0) + (1.0 - s.mass_q).max(0.0)
    };
    let (value, bound) = match metric {
        Metric::Hellinger => {
            let h2 = s.h2.min(1.0);
            (h2.sqrt(), sqrt_error(h2, 0.5 * missing))
        }
        Metric::TotalVariation => (s.tv.min(1.0), 0.5 * missing),
        Metric::Chi2Symmetric => (s.chi2, missing),
        // The dropped tails of a KL sum have no sign-definite bound.
        Metric::Kl => (s.kl, if finite { 0.0 } else { f64::INFINITY }),
        Metric::DeltaMax => unreachable!("handled by delta_max"),
    };
    DivergenceResult {
        value,
        method: Method::ExactDiscrete,
        abs_error_bound: bound,
    }
}

/// Largest change in `sqrt(x)` when `x` moves by at most `err`.
fn sqrt_error(x: f64, err: f64) -> f64 {
    if err == 0.0 {
        return 0.0;
    }
    (x + err).sqrt() - (x - err).max(0.0).sqrt()
}

fn poisson_closed_form(metric: Metric, p: &Distribution, q: &Distribution) -> Option<DivergenceResult> {
    let (a, b) = (p.as_poisson()?, q.as_poisson()?);
    let value = match metric {
        Metric::Hellinger => {
            let h2 = -(-0.5 * (a.sqrt() - b.sqrt()).powi(2)).exp_m1();
            h2.sqrt()
        }
        Metric::Kl => a * (a / b).ln() + b - a,
        _ => return None,
    };
    Some(DivergenceResult::exact(value, Method::ClosedForm))
}

fn gaussian_closed_form(metric: Metric, p: &Distribution, q: &Distribution) -> Option<DivergenceResult> {
    let ((m1, s1), (m2, s2)) = (p.as_gaussian()?, q.as_gaussian()?);
    let d = m1 - m2;
    let var_sum = s1 * s1 + s2 * s2;
    let value = match metric {
        Metric::Hellinger => {
            let log_bc = 0.5 * (2.0 * s1 * s2 / var_sum).ln() - d * d / (4.0 * var_sum);
            (-log_bc.exp_m1()).sqrt()
        }
        Metric::Kl => (s2 / s1).ln() + (s1 * s1 + d * d) / (2.0 * s2 * s2) - 0.5,
        Metric::TotalVariation if s1 == s2 => erf(d.abs() / (2.0 * std::f64::consts::SQRT_2 * s1)),
        _ => return None,
    };
    Some(DivergenceResult::exact(value, Method::ClosedForm))
}

fn numerical(metric: Metric, p: &Distribution, q: &Distribution) -> Result<DivergenceResult> {
    let support = union_support(p, q, QUADRATURE_TAIL_MASS);
    let intervals: Vec<Interval> = match support {
        Support::Intervals(v) => v,
        Support::Atoms(_) => unreachable!("continuous pair"),
    };
    let integrand = |x: f64| {
        let (lp, lq) = (p.log_density(x), q.log_density(x));
        match metric {
            Metric::Hellinger => 0.5 * ((0.5 * lp).exp() - (0.5 * lq).exp()).powi(2),
            Metric::TotalVariation => 0.5 * (lp.exp() - lq.exp()).abs(),
            Metric::Chi2Symmetric => {
                let (score, both_zero) = score_from_logs(lp, lq);
                if both_zero {
                    0.0
                } else {
                    log_sum_exp([lp, lq].into_iter()).exp() * score * score
                }
            }
            Metric::Kl => {
                if lp == f64::NEG_INFINITY {
                    0.0
                } else {
                    lp.exp() * (lp - lq)
                }
            }
            Metric::DeltaMax => unreachable!("handled by delta_max"),
        }
    };
    let quad = quadrature::integrate(integrand, &intervals, QUADRATURE_TOLERANCE, QUADRATURE_BUDGET);

    // Each law leaves at most 2 * tail outside its own grid.
    let outside = 4.0 * QUADRATURE_TAIL_MASS;
    let (value, bound) = match metric {
        Metric::Hellinger => {
            let h2 = quad.value.clamp(0.0, 1.0);
            let err = quad.error_estimate + 0.5 * outside;
            (h2.sqrt(), sqrt_error(h2, err))
        }
        Metric::TotalVariation => (quad.value.clamp(0.0, 1.0), quad.error_estimate + 0.5 * outside),
        Metric::Chi2Symmetric => (quad.value.max(0.0), quad.error_estimate + outside),
        Metric::Kl => (quad.value.max(0.0), quad.error_estimate),
        Metric::DeltaMax => unreachable!(),
    };
    let result = DivergenceResult {
        value,
        method: Method::Quadrature,
        abs_error_bound: bound,
    };
    if quad.converged {
        Ok(result)
    } else {
        Err(Error::QuadratureNotConverged { best: result })
    }
}
