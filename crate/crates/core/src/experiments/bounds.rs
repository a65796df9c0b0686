//! Exact checks of the distance inequalities and statistic moments over a
//! seeded corpus of random finite laws.

use rand::Rng as _;
use rand_distr::Exp1;

use crate::distributions::{Distribution, SampleSet};
use crate::divergences::{chi2_symmetric, delta_max, hellinger, joint_masses, kl, total_variation, DISCRETE_TAIL_MASS};
use crate::error::{Error, Result};
use crate::hypothesis::{exact_score_moments, hellinger_statistic, RobustnessParams};
use crate::rng::{derive_seed, rng_from_seed, Rng, Stream};

/// Tolerance for the inequalities between distances.
const INEQUALITY_TOL: f64 = 1e-9;
/// Tolerance for the identities and bounds on statistic moments.
const MOMENT_TOL: f64 = 1e-12;
/// Fraction of corpus draws with one coordinate forced to zero.
const ZEROED_FRACTION: f64 = 0.1;
/// Alpha at which the robust mean bound is checked.
const MEAN_BOUND_ALPHA: f64 = 0.9;
/// Size of the base sample for the one-swap sensitivity check.
const SWAP_SAMPLE_SIZE: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct BoundRow {
    pub inequality: &'static str,
    pub pairs_checked: usize,
    /// Smallest `rhs - lhs` seen (`-|lhs - rhs|` for identities); NaN when
    /// no pair qualified.
    pub worst_slack: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub rows: Vec<BoundRow>,
}

impl BoundReport {
    pub fn row(&self, inequality: &str) -> Option<&BoundRow> {
        self.rows.iter().find(|r| r.inequality == inequality)
    }
}

struct Checker {
    rows: Vec<BoundRow>,
}

impl Checker {
    fn new(names: &[(&'static str, f64)]) -> Self {
        Self {
            rows: names
                .iter()
                .map(|&(inequality, tolerance)| BoundRow {
                    inequality,
                    pairs_checked: 0,
                    worst_slack: f64::NAN,
                    tolerance,
                })
                .collect(),
        }
    }

    fn record(&mut self, inequality: &str, slack: f64, laws: &[&Distribution]) -> Result<()> {
        let row = self
            .rows
            .iter_mut()
            .find(|r| r.inequality == inequality)
            .expect("registered inequality");
        row.pairs_checked += 1;
        if row.worst_slack.is_nan() || slack < row.worst_slack {
            row.worst_slack = slack;
        }
        if slack.is_nan() || slack < -row.tolerance {
            let names: Vec<String> = laws.iter().map(|d| d.to_string()).collect();
            return Err(Error::AssertionFailure {
                inequality: inequality.to_string(),
                detail: format!("slack {slack:e} for [{}]", names.join(", ")),
            });
        }
        Ok(())
    }
}

pub const TV_LOWER: &str = "tv^2/2 <= h^2";
pub const TV_UPPER: &str = "h^2 <= tv";
pub const CHI2_LOWER: &str = "chi2/4 <= h^2";
pub const CHI2_UPPER: &str = "h^2 <= chi2/2";
pub const KL_UPPER: &str = "h^2 <= kl/2";
pub const SYMMETRY: &str = "symmetric distances";
pub const MEAN_UNDER_P: &str = "E_P[score] = chi2/2";
pub const MEAN_UNDER_Q: &str = "E_Q[score] = -chi2/2";
pub const SENSITIVITY: &str = "|T - T'| <= 2 delta / n";
pub const TRIANGLE: &str = "h(p,q) <= h(p,r) + h(r,q)";
pub const VARIANCE: &str = "Var_R[score] <= 55 max h^2";
pub const MEAN_LOWER: &str = "E_R[score] >= 2(1-a^2) h^2(q,r)";

/// Draws `num_pairs` random pairs and triples of finite laws from `seed` and
/// checks every inequality on them, plus fixed identical and disjoint cases.
/// Fails on the first violation.
pub fn bound_suite(num_pairs: usize, max_support: usize, seed: u64) -> Result<BoundReport> {
    if num_pairs == 0 || max_support < 2 {
        return Err(Error::InvalidArgument(
            "the bound suite needs at least one pair and a support of at least 2".into(),
        ));
    }
    let mut checker = Checker::new(&[
        (TV_LOWER, INEQUALITY_TOL),
        (TV_UPPER, INEQUALITY_TOL),
        (CHI2_LOWER, INEQUALITY_TOL),
        (CHI2_UPPER, INEQUALITY_TOL),
        (KL_UPPER, INEQUALITY_TOL),
        (SYMMETRY, 0.0),
        (MEAN_UNDER_P, MOMENT_TOL),
        (MEAN_UNDER_Q, MOMENT_TOL),
        (SENSITIVITY, MOMENT_TOL),
        (TRIANGLE, INEQUALITY_TOL),
        (VARIANCE, MOMENT_TOL),
        (MEAN_LOWER, MOMENT_TOL),
    ]);
    let robust = RobustnessParams::from_alpha(MEAN_BOUND_ALPHA)?;

    let same = Distribution::finite_discrete(vec![0.0, 1.0, 2.0], vec![0.2, 0.3, 0.5])?;
    let (zero, one, half) = (
        Distribution::bernoulli(0.0)?,
        Distribution::bernoulli(1.0)?,
        Distribution::bernoulli(0.5)?,
    );
    let mut triples = vec![
        (same.clone(), same.clone(), same),
        (zero, one, half),
    ];
    for i in 0..num_pairs {
        let mut rng = rng_from_seed(derive_seed(seed, Stream::Corpus, i as u64));
        triples.push(random_triple(&mut rng, max_support)?);
    }

    for (k, (p, q, r)) in triples.iter().enumerate() {
        check_pair(&mut checker, p, q, derive_seed(seed, Stream::Sweep, k as u64))?;
        check_triple(&mut checker, p, q, r, &robust)?;
    }
    Ok(BoundReport { rows: checker.rows })
}

fn check_pair(c: &mut Checker, p: &Distribution, q: &Distribution, sample_seed: u64) -> Result<()> {
    let laws = [p, q];
    let h = hellinger(p, q)?.value;
    let h2 = h * h;
    let tv = total_variation(p, q)?.value;
    let chi2 = chi2_symmetric(p, q)?.value;
    c.record(TV_LOWER, h2 - 0.5 * tv * tv, &laws)?;
    c.record(TV_UPPER, tv - h2, &laws)?;
    c.record(CHI2_LOWER, h2 - 0.25 * chi2, &laws)?;
    c.record(CHI2_UPPER, 0.5 * chi2 - h2, &laws)?;
    let divergence = kl(p, q)?.value;
    if divergence.is_finite() {
        c.record(KL_UPPER, 0.5 * divergence - h2, &laws)?;
    }

    let asymmetry = [
        h - hellinger(q, p)?.value,
        tv - total_variation(q, p)?.value,
        chi2 - chi2_symmetric(q, p)?.value,
        delta_max(p, q).value - delta_max(q, p).value,
    ]
    .iter()
    .fold(0.0f64, |m, d| m.max(d.abs()));
    c.record(SYMMETRY, -asymmetry, &laws)?;

    c.record(MEAN_UNDER_P, -(exact_score_moments(p, q, p)?.mean - 0.5 * chi2).abs(), &laws)?;
    c.record(MEAN_UNDER_Q, -(exact_score_moments(p, q, q)?.mean + 0.5 * chi2).abs(), &laws)?;

    let base = p.sample(SWAP_SAMPLE_SIZE, sample_seed)?;
    c.record(SENSITIVITY, sensitivity_check(p, q, &base)?, &laws)
}

fn check_triple(c: &mut Checker, p: &Distribution, q: &Distribution, r: &Distribution, robust: &RobustnessParams) -> Result<()> {
    let laws = [p, q, r];
    let h_pq = hellinger(p, q)?.value;
    let h_pr = hellinger(p, r)?.value;
    let h_qr = hellinger(q, r)?.value;
    c.record(TRIANGLE, h_pr + h_qr - h_pq, &laws)?;

    let moments = exact_score_moments(p, q, r)?;
    let max_h2 = h_pr.max(h_qr).powi(2);
    c.record(VARIANCE, 55.0 * max_h2 - moments.variance, &laws)?;
    if h_qr >= robust.gamma() * h_pr {
        c.record(MEAN_LOWER, moments.mean - robust.mean_factor() * h_qr * h_qr, &laws)?;
    }
    Ok(())
}

/// Replaces each observation of `base` in turn by every atom of either law,
/// and by one point outside both supports, and returns the smallest
/// `2 delta(P,Q) / n - |T - T'|` seen.
pub fn sensitivity_check(p: &Distribution, q: &Distribution, base: &SampleSet) -> Result<f64> {
    let masses = joint_masses(p, q, DISCRETE_TAIL_MASS)?;
    let mut candidates: Vec<f64> = masses.iter().map(|m| m.atom).collect();
    let outside = candidates.iter().fold(f64::NEG_INFINITY, |m, &a| m.max(a)) + 1.0;
    candidates.push(outside);

    let n = base.len();
    let bound = 2.0 * delta_max(p, q).value / n as f64;
    let t = hellinger_statistic(p, q, base);
    let mut worst = f64::INFINITY;
    for i in 0..n {
        for &x in &candidates {
            let swapped = hellinger_statistic(p, q, &base.with_replaced(i, x));
            worst = worst.min(bound - (t - swapped).abs());
        }
    }
    Ok(worst)
}

/// Dirichlet(1) weights on `0..k` for a random `k` in `2..=max_support`;
/// one draw in ten has a coordinate set to zero.
fn random_weights(rng: &mut Rng, max_support: usize) -> Vec<f64> {
    let k = rng.gen_range(2..=max_support);
    let mut w: Vec<f64> = (0..k).map(|_| rng.sample(Exp1)).collect();
    if rng.gen_bool(ZEROED_FRACTION) {
        let i = rng.gen_range(0..k);
        w[i] = 0.0;
    }
    let total: f64 = w.iter().sum();
    w.iter().map(|x| x / total).collect()
}

fn law(weights: &[f64]) -> Result<Distribution> {
    Distribution::finite_discrete((0..weights.len()).map(|i| i as f64).collect(), weights.to_vec())
}

/// Independent `P` and `Q`. `R` is independent for even draws; odd draws
/// blend `R = (1 - s) P + s W` with `s = u^2`, which puts many triples inside
/// the regime where `R` is much closer to `P`.
fn random_triple(rng: &mut Rng, max_support: usize) -> Result<(Distribution, Distribution, Distribution)> {
    let p = random_weights(rng, max_support);
    let q = random_weights(rng, max_support);
    let w = random_weights(rng, max_support);
    let r = if rng.gen_bool(0.5) {
        w
    } else {
        let s = rng.gen::<f64>().powi(2);
        let len = p.len().max(w.len());
        let at = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
        let blended: Vec<f64> = (0..len).map(|i| (1.0 - s) * at(&p, i) + s * at(&w, i)).collect();
        let total: f64 = blended.iter().sum();
        blended.iter().map(|x| x / total).collect()
    };
    Ok((law(&p)?, law(&q)?, law(&r)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_passes() {
        let report = bound_suite(300, 10, 1).unwrap();
        for row in &report.rows {
            assert!(row.pairs_checked > 0, "{row:?}");
            assert!(row.worst_slack >= -row.tolerance, "{row:?}");
        }
        assert_eq!(report.row(TV_LOWER).unwrap().pairs_checked, 302);
        assert!(report.row(MEAN_LOWER).unwrap().pairs_checked > 10);
    }

    #[test]
    fn identical_pair_has_zero_slack() {
        let report = bound_suite(1, 2, 0).unwrap();
        assert_eq!(report.row(SYMMETRY).unwrap().worst_slack, 0.0);
        assert_eq!(report.row(TV_LOWER).unwrap().worst_slack, 0.0);
    }

    #[test]
    fn corpus_is_deterministic() {
        assert_eq!(bound_suite(50, 6, 9).unwrap(), bound_suite(50, 6, 9).unwrap());
    }

    #[test]
    fn violations_name_the_inequality() {
        let mut c = Checker::new(&[(TV_UPPER, 1e-9)]);
        let p = Distribution::bernoulli(0.5).unwrap();
        let err = c.record(TV_UPPER, -1.0, &[&p, &p]).unwrap_err();
        match err {
            Error::AssertionFailure { inequality, detail } => {
                assert_eq!(inequality, TV_UPPER);
                assert!(detail.contains("bern(0.5)"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sensitivity_is_tight_for_disjoint_laws() {
        let (p, q) = (Distribution::bernoulli(0.0).unwrap(), Distribution::bernoulli(1.0).unwrap());
        let base = SampleSet::from_values(vec![0.0, 0.0, 1.0]).unwrap();
        assert!(sensitivity_check(&p, &q, &base).unwrap().abs() < 1e-15);
    }
}
