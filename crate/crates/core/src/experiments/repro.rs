//! Constructions on which the likelihood-ratio and Scheffé tests break down
//! while the Hellinger test does not, and the instance where the Hellinger
//! statistic loses its sign.

use rayon::prelude::*;

use super::{sample_complexity_search, ExperimentSpec};
use crate::distributions::Distribution;
use crate::divergences::{hellinger, DISCRETE_TAIL_MASS, joint_masses};
use crate::error::{Error, Result};
use crate::hypothesis::{exact_score_moments, hellinger_decide, neyman_pearson_decide, ScheffeSet, TestKind, Verdict};
use crate::rng::{derive_seed, Stream};

#[derive(Debug, Clone, PartialEq)]
pub struct NpCounterexampleReport {
    pub gamma: f64,
    pub delta: f64,
    pub p: Distribution,
    pub q: Distribution,
    pub r: Distribution,
    pub h_pr: f64,
    pub h_qr: f64,
    /// `1 / (4 gamma)`; `h_pr` must not exceed it.
    pub h_pr_bound: f64,
    /// `1 / 3`; `h_qr` must be at least this.
    pub h_qr_bound: f64,
    pub n: usize,
    pub trials: usize,
    pub np_h1_rate: f64,
    pub hellinger_h0_rate: f64,
}

/// `P = B(0)`, `Q = B(1/2)` and samples from `R = B(1/(16 gamma^2))`, which is
/// gamma times closer to `P`. One observed 1 makes `P(X^n) = 0`, so the
/// likelihood-ratio test answers `Q` whatever its finite threshold.
pub fn repro_np_counterexample(gamma: f64, delta: f64, seed: u64, trials: usize) -> Result<NpCounterexampleReport> {
    if !(gamma > 1.0) {
        return Err(Error::InvalidArgument(format!("gamma must exceed 1, got {gamma}")));
    }
    if !(delta > 0.0 && delta < 1.0) || trials == 0 {
        return Err(Error::InvalidArgument("delta must lie in (0, 1) and trials must be positive".into()));
    }
    let p = Distribution::bernoulli(0.0)?;
    let q = Distribution::bernoulli(0.5)?;
    let r = Distribution::bernoulli(1.0 / (16.0 * gamma * gamma))?;
    let h_pr = hellinger(&p, &r)?.value;
    let h_qr = hellinger(&q, &r)?.value;
    let n = (16.0 * gamma * gamma * (1.0 / delta).ln()).ceil() as usize;

    let verdicts = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let xs = r.sample(n, derive_seed(seed, Stream::NullArm, t))?;
            let tie = derive_seed(seed, Stream::TieBreak, t);
            Ok((
                neyman_pearson_decide(&p, &q, &xs, 0.0, tie).verdict == Verdict::H1,
                hellinger_decide(&p, &q, &xs, 0.0, tie).verdict == Verdict::H0,
            ))
        })
        .collect::<Result<Vec<(bool, bool)>>>()?;
    let np_h1 = verdicts.iter().filter(|v| v.0).count();
    let hellinger_h0 = verdicts.iter().filter(|v| v.1).count();

    Ok(NpCounterexampleReport {
        gamma,
        delta,
        p,
        q,
        r,
        h_pr,
        h_qr,
        h_pr_bound: 1.0 / (4.0 * gamma),
        h_qr_bound: 1.0 / 3.0,
        n,
        trials,
        np_h1_rate: np_h1 as f64 / trials as f64,
        hellinger_h0_rate: hellinger_h0 as f64 / trials as f64,
    })
}

/// The three-symbol pair with `eps = 1/(2k)`:
/// `P = (1/2, 1/2 - eps, eps)` and `Q = (1/2 - eps, 1/2 + eps, 0)`.
pub fn scheffe_gap_pair(k: f64) -> Result<(Distribution, Distribution)> {
    if !(k > 1.0) {
        return Err(Error::InvalidArgument(format!("k must exceed 1, got {k}")));
    }
    let eps = 1.0 / (2.0 * k);
    let atoms = vec![0.0, 1.0, 2.0];
    let p = Distribution::finite_discrete(atoms.clone(), vec![0.5, 0.5 - eps, eps])?;
    let q = Distribution::finite_discrete(atoms, vec![0.5 - eps, 0.5 + eps, 0.0])?;
    Ok((p, q))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheffeGapReport {
    pub k: f64,
    pub epsilon: f64,
    pub p_s: f64,
    pub q_s: f64,
    pub hellinger_sq: f64,
    pub n_scheffe: usize,
    pub n_hellinger: usize,
    /// `n_scheffe / n_hellinger`.
    pub ratio: f64,
}

/// Measured sample complexities of Scheffé's test and the Hellinger test on
/// [`scheffe_gap_pair`]. Scheffé only sees the mass of `{0, 2}`, so it needs
/// order `k` times more samples.
pub fn repro_scheffe_gap(k: f64, delta: f64, seed: u64) -> Result<ScheffeGapReport> {
    let (p, q) = scheffe_gap_pair(k)?;
    let set = ScheffeSet::new(&p, &q)?;
    let h = hellinger(&p, &q)?.value;
    let search = |kind: TestKind| -> Result<usize> {
        let spec = ExperimentSpec::new(p.clone(), q.clone(), kind).with_trials(1).with_seed(seed);
        Ok(sample_complexity_search(&spec, delta)?.n)
    };
    let n_scheffe = search(TestKind::Scheffe)?;
    let n_hellinger = search(TestKind::Hellinger)?;
    Ok(ScheffeGapReport {
        k,
        epsilon: 1.0 / (2.0 * k),
        p_s: set.p_mass,
        q_s: set.q_mass,
        hellinger_sq: h * h,
        n_scheffe,
        n_hellinger,
        ratio: n_scheffe as f64 / n_hellinger as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroMeanRow {
    pub epsilon: f64,
    /// Exact `E[score]` under `R`.
    pub expectation: f64,
    /// `H^2(Q,R) / H^2(P,R)`.
    pub ratio: f64,
    /// `1 / (sqrt(2) - 1)^2`, the limit of `ratio` as `epsilon -> 0`.
    pub limit: f64,
}

fn squared_hellinger(a: &Distribution, b: &Distribution) -> Result<f64> {
    Ok(joint_masses(a, b, DISCRETE_TAIL_MASS)?
        .iter()
        .map(|m| (m.p.sqrt() - m.q.sqrt()).powi(2))
        .sum::<f64>()
        * 0.5)
}

/// `Q = B(0)`, `P = B(2 eps)`, `R = B(eps)`: the Hellinger statistic has
/// mean exactly zero under `R` although `R` is closer to `P`.
pub fn repro_zero_mean(epsilons: &[f64]) -> Result<Vec<ZeroMeanRow>> {
    let limit = 1.0 / (std::f64::consts::SQRT_2 - 1.0).powi(2);
    epsilons
        .iter()
        .map(|&eps| {
            if !(eps > 0.0 && eps < 0.5) {
                return Err(Error::InvalidArgument(format!("epsilon must lie in (0, 1/2), got {eps}")));
            }
            let q = Distribution::bernoulli(0.0)?;
            let p = Distribution::bernoulli(2.0 * eps)?;
            let r = Distribution::bernoulli(eps)?;
            let expectation = exact_score_moments(&p, &q, &r)?.mean;
            let ratio = squared_hellinger(&q, &r)? / squared_hellinger(&p, &r)?;
            Ok(ZeroMeanRow {
                epsilon: eps,
                expectation,
                ratio,
                limit,
            })
        })
        .collect()
}
