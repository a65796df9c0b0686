//! Monte-Carlo harness: error estimation, sample-complexity search,
//! robustness sweeps and tournament selection.
//!
//! Every trial draws its samples, tie-break coin and privacy noise from seeds
//! derived with [`derive_seed`] from the experiment seed, the trial index and
//! the arm. Trials run in parallel and are reduced by counting, so results do
//! not depend on scheduling or thread count.

pub mod bounds;
pub mod repro;

pub use bounds::{bound_suite, sensitivity_check, BoundReport, BoundRow};
pub use repro::{
    repro_np_counterexample, repro_scheffe_gap, repro_zero_mean, scheffe_gap_pair, NpCounterexampleReport,
    ScheffeGapReport, ZeroMeanRow,
};

use rayon::prelude::*;

use crate::distributions::{Distribution, SampleSet};
use crate::divergences::hellinger;
use crate::error::{Error, Result};
use crate::hypothesis::{
    calibrate_threshold, dp_hellinger_decide, hellinger_decide, hellinger_statistic, neyman_pearson_decide,
    scheffe_decide_with, DpParams, RobustnessParams, ScheffeSet, TestKind, Verdict,
};
use crate::rng::{derive_seed, Stream};

/// Largest sample size [`sample_complexity_search`] will try by default.
pub const DEFAULT_N_CAP: usize = 1 << 20;

/// Half-width multiplier of a two-sided 95% normal interval.
const Z95: f64 = 1.96;

/// Relative gap at which the bisection stage stops.
const BISECTION_RESOLUTION: f64 = 0.1;

/// `|H(P,R) - H(Q,R)|` below this grades either verdict as correct.
pub const GRADING_TIE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdPolicy {
    /// Threshold 0 for the Hellinger statistic and the log-likelihood ratio.
    Zero,
    /// Recalibrate at each `n` so the empirical type-I error under `P` is at
    /// most `type1_target`.
    Calibrated { type1_target: f64, calib_trials: usize },
}

/// Which arm draws from the perturbed source `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arm {
    Null,
    Alt,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub p: Distribution,
    pub q: Distribution,
    /// When set, replaces the source of the arm named by `r_arm`.
    pub r: Option<Distribution>,
    pub r_arm: Arm,
    pub test_kind: TestKind,
    pub n_grid: Vec<usize>,
    pub trials: usize,
    pub threshold_policy: ThresholdPolicy,
    pub seed: u64,
    /// Required for [`TestKind::DpHellinger`]. The noise seed is replaced per
    /// trial.
    pub dp: Option<DpParams>,
    pub robustness: Option<RobustnessParams>,
    pub n_cap: usize,
}

impl ExperimentSpec {
    /// Zero threshold, 1000 trials, seed 0 and `n_grid = [1]`.
    pub fn new(p: Distribution, q: Distribution, test_kind: TestKind) -> Self {
        Self {
            p,
            q,
            r: None,
            r_arm: Arm::Null,
            test_kind,
            n_grid: vec![1],
            trials: 1000,
            threshold_policy: ThresholdPolicy::Zero,
            seed: 0,
            dp: None,
            robustness: None,
            n_cap: DEFAULT_N_CAP,
        }
    }

    pub fn with_n_grid(mut self, n_grid: Vec<usize>) -> Self {
        self.n_grid = n_grid;
        self
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_threshold_policy(mut self, policy: ThresholdPolicy) -> Self {
        self.threshold_policy = policy;
        self
    }

    pub fn with_dp(mut self, dp: DpParams) -> Self {
        self.dp = Some(dp);
        self
    }

    pub fn with_perturbation(mut self, r: Distribution, arm: Arm) -> Self {
        self.r = Some(r);
        self.r_arm = arm;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.n_grid.is_empty() {
            return Err(Error::InvalidArgument("n grid is empty".into()));
        }
        if self.n_grid[0] == 0 || self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!(
                "n grid must be positive and strictly increasing, got {:?}",
                self.n_grid
            )));
        }
        if self.test_kind == TestKind::DpHellinger && self.dp.is_none() {
            return Err(Error::InvalidArgument("dp-hellinger needs privacy parameters".into()));
        }
        if let ThresholdPolicy::Calibrated { type1_target, calib_trials } = self.threshold_policy {
            if matches!(self.test_kind, TestKind::Scheffe | TestKind::DpHellinger) {
                return Err(Error::InvalidArgument(format!(
                    "{} has no calibrated threshold",
                    self.test_kind.as_str()
                )));
            }
            if !(type1_target > 0.0 && type1_target < 1.0) || calib_trials < 100 {
                return Err(Error::InvalidArgument(
                    "calibration needs a target in (0, 1) and at least 100 trials".into(),
                ));
            }
        }
        Ok(())
    }

    fn source(&self, arm: Arm) -> &Distribution {
        match (&self.r, arm) {
            (Some(r), a) if a == self.r_arm => r,
            (_, Arm::Null) => &self.p,
            (_, Arm::Alt) => &self.q,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorEstimate {
    pub n: usize,
    /// Fraction of null-arm trials decided `H1`.
    pub type_i: f64,
    /// Fraction of alternative-arm trials decided `H0`.
    pub type_ii: f64,
    pub max_error: f64,
    pub trials: usize,
    /// 95% normal-approximation half-width of `max_error`.
    pub half_width: f64,
}

fn half_width(rate: f64, trials: usize) -> f64 {
    Z95 * (rate * (1.0 - rate) / trials as f64).sqrt()
}

/// A test with everything that does not depend on the sample precomputed.
enum Decider {
    Hellinger(f64),
    NeymanPearson(f64),
    Scheffe(ScheffeSet),
    Dp(DpParams),
}

impl Decider {
    fn prepare(spec: &ExperimentSpec, n: usize) -> Result<Self> {
        let threshold = match spec.threshold_policy {
            ThresholdPolicy::Zero => 0.0,
            ThresholdPolicy::Calibrated { type1_target, calib_trials } => calibrate_threshold(
                spec.test_kind,
                &spec.p,
                &spec.q,
                n,
                type1_target,
                calib_trials,
                derive_seed(spec.seed, Stream::Calibration, n as u64),
            )?,
        };
        Ok(match spec.test_kind {
            TestKind::Hellinger => Decider::Hellinger(threshold),
            TestKind::NeymanPearson => Decider::NeymanPearson(threshold),
            TestKind::Scheffe => Decider::Scheffe(ScheffeSet::new(&spec.p, &spec.q)?),
            TestKind::DpHellinger => Decider::Dp(spec.dp.expect("validated")),
        })
    }

    fn verdict(&self, p: &Distribution, q: &Distribution, xs: &SampleSet, base: u64, index: u64) -> Verdict {
        let tie_seed = derive_seed(base, Stream::TieBreak, index);
        match self {
            Decider::Hellinger(t) => hellinger_decide(p, q, xs, *t, tie_seed).verdict,
            Decider::NeymanPearson(t) => neyman_pearson_decide(p, q, xs, *t, tie_seed).verdict,
            Decider::Scheffe(set) => scheffe_decide_with(set, xs, tie_seed).verdict,
            Decider::Dp(dp) => {
                let dp = dp.with_noise_seed(derive_seed(base, Stream::Noise, index));
                dp_hellinger_decide(p, q, xs, &dp, 0.0, tie_seed).verdict
            }
        }
    }
}

/// Counts `H0` verdicts over `trials` samples of size `n` drawn from `source`.
fn count_h0(
    spec: &ExperimentSpec,
    decider: &Decider,
    source: &Distribution,
    n: usize,
    trials: usize,
    base: u64,
    stream: Stream,
) -> Result<usize> {
    let arm_bit = (stream == Stream::AltArm) as u64;
    let outcomes = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let xs = source.sample(n, derive_seed(base, stream, t))?;
            Ok(decider.verdict(&spec.p, &spec.q, &xs, base, (t << 1) | arm_bit) == Verdict::H0)
        })
        .collect::<Result<Vec<bool>>>()?;
    Ok(outcomes.into_iter().filter(|&h0| h0).count())
}

/// Type-I and type-II error frequencies at sample size `n`.
pub fn estimate_error(spec: &ExperimentSpec, n: usize) -> Result<ErrorEstimate> {
    estimate_with_trials(spec, n, spec.trials)
}

fn estimate_with_trials(spec: &ExperimentSpec, n: usize, trials: usize) -> Result<ErrorEstimate> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::InvalidArgument("sample size must be at least 1".into()));
    }
    let decider = Decider::prepare(spec, n)?;
    let null_h0 = count_h0(spec, &decider, spec.source(Arm::Null), n, trials, spec.seed, Stream::NullArm)?;
    let alt_h0 = count_h0(spec, &decider, spec.source(Arm::Alt), n, trials, spec.seed, Stream::AltArm)?;
    let type_i = (trials - null_h0) as f64 / trials as f64;
    let type_ii = alt_h0 as f64 / trials as f64;
    let max_error = type_i.max(type_ii);
    Ok(ErrorEstimate {
        n,
        type_i,
        type_ii,
        max_error,
        trials,
        half_width: half_width(max_error, trials),
    })
}

/// [`estimate_error`] at every `n` of the grid.
pub fn error_curve(spec: &ExperimentSpec) -> Result<Vec<ErrorEstimate>> {
    spec.n_grid.iter().map(|&n| estimate_error(spec, n)).collect()
}

/// Trial count at which the 95% half-width at error rate `delta` is at most
/// `delta / 4`.
pub fn trials_for_resolution(delta: f64) -> usize {
    (16.0 * Z95 * Z95 * (1.0 - delta) / delta).ceil() as usize
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleComplexity {
    pub n: usize,
    /// Estimate at `n`.
    pub estimate: ErrorEstimate,
}

/// Smallest `n` found with estimated maximum error at most `target_delta`.
///
/// Doubles `n` from 1 until the target is met, then bisects the last
/// doubling step until the bracket is within 10% of its upper end. Uses at
/// least [`trials_for_resolution`] trials per estimate.
pub fn sample_complexity_search(spec: &ExperimentSpec, target_delta: f64) -> Result<SampleComplexity> {
    if !(target_delta > 0.0 && target_delta < 0.5) {
        return Err(Error::InvalidArgument(format!(
            "target error must lie in (0, 0.5), got {target_delta}"
        )));
    }
    spec.validate()?;
    let trials = spec.trials.max(trials_for_resolution(target_delta));
    let meets = |n: usize| -> Result<Option<ErrorEstimate>> {
        let e = estimate_with_trials(spec, n, trials)?;
        Ok((e.max_error <= target_delta).then_some(e))
    };

    let mut lo = 0;
    let mut n = 1;
    let mut best = loop {
        if n > spec.n_cap {
            return Err(Error::BudgetExceeded { cap: spec.n_cap });
        }
        if let Some(e) = meets(n)? {
            break e;
        }
        lo = n;
        n *= 2;
    };
    let mut hi = n;
    while hi - lo > 1 && (hi - lo) as f64 > BISECTION_RESOLUTION * hi as f64 {
        let mid = lo + (hi - lo) / 2;
        match meets(mid)? {
            Some(e) => {
                hi = mid;
                best = e;
            }
            None => lo = mid,
        }
    }
    Ok(SampleComplexity { n: hi, estimate: best })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub r: Distribution,
    pub n: usize,
    /// `max(H(P,R), H(Q,R)) / min(H(P,R), H(Q,R))`; infinite when `R` equals
    /// one of the hypotheses.
    pub gamma_observed: f64,
    pub h_pr: f64,
    pub h_qr: f64,
    /// Fraction of trials decided `H0`.
    pub h0_rate: f64,
    /// Fraction of trials naming the Hellinger-closer hypothesis.
    pub correct_rate: f64,
    pub trials: usize,
    pub half_width: f64,
}

/// Runs the configured test on samples drawn from each `R` at the largest `n` of
/// the grid. A verdict is correct when it names whichever of `P`, `Q` is
/// closer to `R` in Hellinger distance; near-ties count as correct either way.
pub fn robustness_sweep(spec: &ExperimentSpec, r_family: &[Distribution]) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    if r_family.is_empty() {
        return Err(Error::InvalidArgument("the sweep needs at least one R".into()));
    }
    let n = *spec.n_grid.last().expect("validated");
    let decider = Decider::prepare(spec, n)?;
    r_family
        .iter()
        .enumerate()
        .map(|(j, r)| {
            let h_pr = hellinger(&spec.p, r)?.value;
            let h_qr = hellinger(&spec.q, r)?.value;
            let base = derive_seed(spec.seed, Stream::Sweep, j as u64);
            let h0 = count_h0(spec, &decider, r, n, spec.trials, base, Stream::NullArm)?;
            let h0_rate = h0 as f64 / spec.trials as f64;
            let correct_rate = if (h_pr - h_qr).abs() < GRADING_TIE {
                1.0
            } else if h_pr < h_qr {
                h0_rate
            } else {
                1.0 - h0_rate
            };
            Ok(SweepRow {
                r: r.clone(),
                n,
                gamma_observed: observed_gamma(h_pr, h_qr),
                h_pr,
                h_qr,
                h0_rate,
                correct_rate,
                trials: spec.trials,
                half_width: half_width(correct_rate, spec.trials),
            })
        })
        .collect()
}

fn observed_gamma(a: f64, b: f64) -> f64 {
    let (lo, hi) = (a.min(b), a.max(b));
    if hi == 0.0 {
        1.0
    } else if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Round-robin of Hellinger tests at threshold 0 on a shared sample. Each
/// win scores 1, an exact tie scores 1/2 to both; the highest score wins and
/// equal scores go to the lower index.
pub fn tournament_select(candidates: &[Distribution], xs: &SampleSet) -> Result<usize> {
    if candidates.len() < 2 {
        return Err(Error::InvalidArgument("a tournament needs at least two candidates".into()));
    }
    let mut wins = vec![0.0f64; candidates.len()];
    for i in 0..candidates.len() {
        for j in i + 1..candidates.len() {
            let t = hellinger_statistic(&candidates[i], &candidates[j], xs);
            if t > 0.0 {
                wins[i] += 1.0;
            } else if t < 0.0 {
                wins[j] += 1.0;
            } else {
                wins[i] += 0.5;
                wins[j] += 0.5;
            }
        }
    }
    let mut best = 0;
    for (i, &w) in wins.iter().enumerate() {
        if w > wins[best] {
            best = i;
        }
    }
    Ok(best)
}
