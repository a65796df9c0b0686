//! Decision procedures for simple hypothesis testing between two known laws:
//! the Hellinger test, the likelihood-ratio (Neyman–Pearson) test, Scheffé's
//! test, and an ε-differentially private Hellinger test.
//!
//! `H0` names `P`, `H1` names `Q`.

use std::fmt;

use rand::distributions::Open01;
use rand::Rng as _;
use rayon::prelude::*;

use crate::distributions::{Distribution, SampleSet};
use crate::divergences::{joint_masses, score_from_logs, DISCRETE_TAIL_MASS};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    /// Samples attributed to `P`.
    H0,
    /// Samples attributed to `Q`.
    H1,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::H0 => "H0_P",
            Verdict::H1 => "H1_Q",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TestKind {
    Hellinger,
    NeymanPearson,
    Scheffe,
    DpHellinger,
}

impl TestKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TestKind::Hellinger => "hellinger",
            TestKind::NeymanPearson => "neyman-pearson",
            TestKind::Scheffe => "scheffe",
            TestKind::DpHellinger => "dp-hellinger",
        }
    }
}

/// Outcome of one test.
///
/// `verdict` is `H0` when `statistic > threshold` and `H1` when
/// `statistic < threshold`; equality is settled by a fair coin and sets
/// `tie_broken`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestDecision {
    pub verdict: Verdict,
    pub statistic: f64,
    pub threshold: f64,
    pub tie_broken: bool,
    /// Observations with zero density under both laws. They score 0.
    pub out_of_support: usize,
}

fn decide(statistic: f64, threshold: f64, tie_seed: u64, out_of_support: usize) -> TestDecision {
    let (verdict, tie_broken) = if statistic > threshold {
        (Verdict::H0, false)
    } else if statistic < threshold {
        (Verdict::H1, false)
    } else {
        let coin = rng_from_seed(tie_seed).gen::<bool>();
        (if coin { Verdict::H0 } else { Verdict::H1 }, true)
    };
    TestDecision {
        verdict,
        statistic,
        threshold,
        tie_broken,
        out_of_support,
    }
}

/// Slackness of γ-robust testing and the matching α of the mean bound.
///
/// The two are tied by `gamma = sqrt(2) / (sqrt(2) * alpha - 1)` with
/// `alpha` in `(1/sqrt(2), 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobustnessParams {
    gamma: f64,
    alpha: f64,
}

impl RobustnessParams {
    /// `sqrt(2) / (sqrt(2) - 1)`: the Hellinger test is γ-robust above this.
    pub const ROBUST_GAMMA: f64 = std::f64::consts::SQRT_2 / (std::f64::consts::SQRT_2 - 1.0);
    /// `1 / (sqrt(2) - 1)`: below this some `R` gives the statistic zero mean.
    pub const ZERO_MEAN_GAMMA: f64 = 1.0 / (std::f64::consts::SQRT_2 - 1.0);

    pub fn from_alpha(alpha: f64) -> Result<Self> {
        let lo = std::f64::consts::FRAC_1_SQRT_2;
        if !(alpha > lo && alpha < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "alpha must lie in (1/sqrt(2), 1), got {alpha}"
            )));
        }
        let s2 = std::f64::consts::SQRT_2;
        Ok(Self {
            gamma: s2 / (s2 * alpha - 1.0),
            alpha,
        })
    }

    /// Inverse of [`from_alpha`](Self::from_alpha); requires
    /// `gamma > ROBUST_GAMMA`.
    pub fn from_gamma(gamma: f64) -> Result<Self> {
        if !(gamma > Self::ROBUST_GAMMA) {
            return Err(Error::InvalidArgument(format!(
                "gamma must exceed sqrt(2)/(sqrt(2)-1) = {:.5}, got {gamma}",
                Self::ROBUST_GAMMA
            )));
        }
        Ok(Self {
            gamma,
            alpha: 1.0 / gamma + std::f64::consts::FRAC_1_SQRT_2,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `2 (1 - alpha^2)`: lower bound on `E[score] / H^2(Q, R)` when `R` is
    /// gamma times Hellinger-closer to `P`.
    pub fn mean_factor(&self) -> f64 {
        2.0 * (1.0 - self.alpha * self.alpha)
    }
}

/// Privacy parameters of [`dp_hellinger_decide`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpParams {
    epsilon: f64,
    delta_pq: Option<f64>,
    pub noise_seed: u64,
}

impl DpParams {
    /// `delta_pq = None` means Δ(P, Q) is unknown; the mechanism then uses 1.
    pub fn new(epsilon: f64, delta_pq: Option<f64>, noise_seed: u64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
        }
        if let Some(d) = delta_pq {
            if !(0.0..=1.0).contains(&d) {
                return Err(Error::InvalidArgument(format!("Δ(P, Q) must lie in [0, 1], got {d}")));
            }
        }
        Ok(Self {
            epsilon,
            delta_pq,
            noise_seed,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta_pq(&self) -> Option<f64> {
        self.delta_pq
    }

    pub fn sensitivity(&self) -> f64 {
        self.delta_pq.unwrap_or(1.0)
    }

    /// Laplace scale `2 Δ / ε` of the noise `Z`; the statistic moves by `Z / n`.
    pub fn noise_scale(&self) -> f64 {
        2.0 * self.sensitivity() / self.epsilon
    }

    pub fn with_noise_seed(self, noise_seed: u64) -> Self {
        Self { noise_seed, ..self }
    }
}

/// `(P(x) - Q(x)) / (P(x) + Q(x))`, in `[-1, 1]`.
pub fn per_sample_score(p: &Distribution, q: &Distribution, x: f64) -> f64 {
    score_from_logs(p.log_density(x), q.log_density(x)).0
}

/// Hellinger statistic with its out-of-support count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Statistic {
    pub value: f64,
    pub out_of_support: usize,
}

pub fn hellinger_statistic_detailed(p: &Distribution, q: &Distribution, xs: &SampleSet) -> Statistic {
    let mut sum = 0.0;
    let mut out_of_support = 0;
    for &x in xs.values() {
        let (score, both_zero) = score_from_logs(p.log_density(x), q.log_density(x));
        sum += score;
        out_of_support += both_zero as usize;
    }
    Statistic {
        value: sum / xs.len() as f64,
        out_of_support,
    }
}

/// Mean per-sample score over `xs`.
pub fn hellinger_statistic(p: &Distribution, q: &Distribution, xs: &SampleSet) -> f64 {
    hellinger_statistic_detailed(p, q, xs).value
}

/// Hellinger test: `H0` when the statistic exceeds `threshold` (0 by default).
pub fn hellinger_decide(
    p: &Distribution,
    q: &Distribution,
    xs: &SampleSet,
    threshold: f64,
    tie_seed: u64,
) -> TestDecision {
    let stat = hellinger_statistic_detailed(p, q, xs);
    decide(stat.value, threshold, tie_seed, stat.out_of_support)
}

/// `sum_i log P(x_i) - log Q(x_i)` in the extended reals. A sample impossible
/// under `P` forces `-inf` regardless of other terms; otherwise a sample
/// impossible under `Q` forces `+inf`. Samples impossible under both
/// contribute 0 and are counted.
pub fn log_likelihood_ratio(p: &Distribution, q: &Distribution, xs: &SampleSet) -> Statistic {
    let (mut sum, mut neg_inf, mut pos_inf, mut out_of_support) = (0.0, false, false, 0);
    for &x in xs.values() {
        let (lp, lq) = (p.log_density(x), q.log_density(x));
        match (lp == f64::NEG_INFINITY, lq == f64::NEG_INFINITY) {
            (true, true) => out_of_support += 1,
            (true, false) => neg_inf = true,
            (false, true) => pos_inf = true,
            (false, false) => sum += lp - lq,
        }
    }
    let value = if neg_inf {
        f64::NEG_INFINITY
    } else if pos_inf {
        f64::INFINITY
    } else {
        sum
    };
    Statistic { value, out_of_support }
}

/// Likelihood-ratio test: `H0` when `log P(xs) - log Q(xs) > log_threshold`,
/// `H1` when below, fair coin on equality.
pub fn neyman_pearson_decide(
    p: &Distribution,
    q: &Distribution,
    xs: &SampleSet,
    log_threshold: f64,
    tie_seed: u64,
) -> TestDecision {
    let stat = log_likelihood_ratio(p, q, xs);
    decide(stat.value, log_threshold, tie_seed, stat.out_of_support)
}

/// The set `S = {x : P(x) >= Q(x)}` of Scheffé's test and its two masses.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheffeSet {
    pub atoms: Vec<f64>,
    pub p_mass: f64,
    pub q_mass: f64,
}

impl ScheffeSet {
    pub fn new(p: &Distribution, q: &Distribution) -> Result<Self> {
        if !(p.has_finite_support() && q.has_finite_support()) {
            return Err(Error::UnsupportedDistribution {
                operation: "scheffe",
                detail: format!("{p} and {q} must have finite support"),
            });
        }
        let masses = joint_masses(p, q, DISCRETE_TAIL_MASS)?;
        let mut set = ScheffeSet {
            atoms: Vec::new(),
            p_mass: 0.0,
            q_mass: 0.0,
        };
        for m in masses.iter().filter(|m| m.p >= m.q) {
            set.atoms.push(m.atom);
            set.p_mass += m.p;
            set.q_mass += m.q;
        }
        Ok(set)
    }

    /// Atoms are sorted, so membership is a binary search.
    pub fn contains(&self, x: f64) -> bool {
        self.atoms.binary_search_by(|a| a.total_cmp(&x)).is_ok()
            || (x == 0.0 && self.atoms.contains(&0.0))
    }
}

/// Scheffé's test: compares the empirical frequency `mu` of `S` with `P(S)`
/// and `Q(S)`. The statistic is `|mu - Q(S)| - |mu - P(S)|`, positive when
/// `mu` is closer to `P(S)`.
pub fn scheffe_decide(p: &Distribution, q: &Distribution, xs: &SampleSet, tie_seed: u64) -> Result<TestDecision> {
    let set = ScheffeSet::new(p, q)?;
    Ok(scheffe_decide_with(&set, xs, tie_seed))
}

pub fn scheffe_decide_with(set: &ScheffeSet, xs: &SampleSet, tie_seed: u64) -> TestDecision {
    let hits = xs.values().iter().filter(|&&x| set.contains(x)).count();
    let mu = hits as f64 / xs.len() as f64;
    let statistic = (mu - set.q_mass).abs() - (mu - set.p_mass).abs();
    decide(statistic, 0.0, tie_seed, 0)
}

/// Laplace draw by inversion from `u` uniform on `(-1/2, 1/2)`.
pub fn laplace_from_uniform(u: f64, scale: f64) -> f64 {
    -scale * u.signum() * (-2.0 * u.abs()).ln_1p()
}

/// One Laplace(0, `scale`) draw, deterministic in `seed`.
pub fn laplace_sample(scale: f64, seed: u64) -> Result<f64> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidArgument(format!("Laplace scale must be positive, got {scale}")));
    }
    let u: f64 = rng_from_seed(seed).sample::<f64, _>(Open01) - 0.5;
    Ok(laplace_from_uniform(u, scale))
}

/// Hellinger test on `T + Z / n` with `Z ~ Laplace(2 Δ / ε)` drawn from
/// `dp.noise_seed`. Changing one observation moves `T` by at most `2 Δ / n`,
/// so the released decision is ε-differentially private.
pub fn dp_hellinger_decide(
    p: &Distribution,
    q: &Distribution,
    xs: &SampleSet,
    dp: &DpParams,
    threshold: f64,
    tie_seed: u64,
) -> TestDecision {
    let stat = hellinger_statistic_detailed(p, q, xs);
    let scale = dp.noise_scale();
    let noise = if scale == 0.0 || !scale.is_finite() {
        0.0
    } else {
        laplace_sample(scale, dp.noise_seed).expect("positive scale")
    };
    decide(stat.value + noise / xs.len() as f64, threshold, tie_seed, stat.out_of_support)
}

/// Statistic of a threshold test without its decision. Used by calibration.
pub fn threshold_statistic(kind: TestKind, p: &Distribution, q: &Distribution, xs: &SampleSet) -> Result<f64> {
    match kind {
        TestKind::Hellinger => Ok(hellinger_statistic(p, q, xs)),
        TestKind::NeymanPearson => Ok(log_likelihood_ratio(p, q, xs).value),
        other => Err(Error::InvalidArgument(format!(
            "threshold calibration supports hellinger and neyman-pearson, not {}",
            other.as_str()
        ))),
    }
}

/// Threshold whose empirical type-I error under `X^n ~ P` is at most
/// `type1_target`.
///
/// With `m` calibration statistics sorted ascending and `k = floor(target * m)`,
/// the threshold is the largest observed value strictly below the
/// `(k+1)`-th smallest, so at most `k` statistics fall at or below it even
/// if every tie went to `H1`. When no observed value qualifies the threshold
/// is placed just below the minimum.
pub fn calibrate_threshold(
    kind: TestKind,
    p: &Distribution,
    q: &Distribution,
    n: usize,
    type1_target: f64,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    if trials < 100 {
        return Err(Error::InvalidArgument(format!("calibration needs at least 100 trials, got {trials}")));
    }
    if !(type1_target > 0.0 && type1_target < 1.0) {
        return Err(Error::InvalidArgument(format!("type-I target must lie in (0, 1), got {type1_target}")));
    }
    if matches!(kind, TestKind::Scheffe | TestKind::DpHellinger) {
        return Err(Error::InvalidArgument(format!(
            "threshold calibration supports hellinger and neyman-pearson, not {}",
            kind.as_str()
        )));
    }
    let mut stats = (0..trials)
        .into_par_iter()
        .map(|t| {
            let xs = p.sample(n, derive_seed(seed, Stream::Calibration, t as u64))?;
            threshold_statistic(kind, p, q, &xs)
        })
        .collect::<Result<Vec<f64>>>()?;
    stats.sort_by(f64::total_cmp);
    conservative_quantile(&stats, type1_target)
}

fn conservative_quantile(sorted: &[f64], target: f64) -> Result<f64> {
    let k = (target * sorted.len() as f64).floor() as usize;
    let cut = sorted[k.min(sorted.len() - 1)];
    if let Some(&below) = sorted[..k].iter().rev().find(|&&s| s < cut) {
        return Ok(below);
    }
    let min = sorted[0];
    if min == f64::NEG_INFINITY {
        return Err(Error::DegenerateCalibration(format!(
            "{} of {} calibration statistics are -inf; no threshold keeps type-I error at {target}",
            sorted.iter().take_while(|s| **s == min).count(),
            sorted.len()
        )));
    }
    Ok(min.next_down())
}

/// Exact mean and variance of the per-sample score when `X ~ R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreMoments {
    pub mean: f64,
    pub variance: f64,
}

/// Exact moments of `per_sample_score(p, q, X)` for `X ~ r`, summed over the
/// atoms of `r`. All three laws must be discrete.
pub fn exact_score_moments(p: &Distribution, q: &Distribution, r: &Distribution) -> Result<ScoreMoments> {
    if !(p.is_discrete() && q.is_discrete()) {
        return Err(Error::UnsupportedDistribution {
            operation: "exact_score_moments",
            detail: format!("{p} and {q} must be discrete"),
        });
    }
    let atoms = joint_masses(r, r, DISCRETE_TAIL_MASS)?;
    let terms: Vec<(f64, f64)> = atoms
        .iter()
        .filter(|m| m.p > 0.0)
        .map(|m| (m.p, per_sample_score(p, q, m.atom)))
        .collect();
    let mean: f64 = terms.iter().map(|(w, s)| w * s).sum();
    let variance: f64 = terms.iter().map(|(w, s)| w * (s - mean).powi(2)).sum();
    Ok(ScoreMoments { mean, variance })
}
