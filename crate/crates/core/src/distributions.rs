//! Probability laws used as hypotheses and as sampling sources.
//!
//! Every law is evaluated in log space. Plain densities appear only when a
//! caller exponentiates at the boundary; a Gaussian component centred at 100
//! has densities far below `f64::MIN_POSITIVE` near the origin, and the log
//! form keeps those comparisons exact.

use std::fmt;
use std::str::FromStr;

use rand::distributions::{Distribution as _, WeightedIndex};
use rand::Rng as _;
use rand_distr::{Normal, Poisson};
use statrs::distribution::{ContinuousCDF, Normal as StdNormal};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, Rng};

mod literal;

/// Tolerance for probability vectors summing to one.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Family tag of a [`Distribution`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Bernoulli,
    FiniteDiscrete,
    Gaussian,
    Poisson,
    Mixture,
}

/// A validated probability law.
///
/// Construct through [`Distribution::bernoulli`], [`Distribution::finite_discrete`],
/// [`Distribution::gaussian`], [`Distribution::poisson`], [`Distribution::mixture`],
/// or by parsing a literal such as `mix(0.9*gauss(0,1) + 0.1*gauss(100,1))`.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    law: Law,
}

#[derive(Debug, Clone, PartialEq)]
enum Law {
    Bernoulli {
        p: f64,
    },
    Discrete {
        atoms: Vec<f64>,
        probs: Vec<f64>,
        /// `(atom, prob)` sorted by atom, for lookup.
        sorted: Vec<(f64, f64)>,
    },
    Gaussian {
        mean: f64,
        std: f64,
    },
    Poisson {
        rate: f64,
    },
    Mixture {
        weights: Vec<f64>,
        components: Vec<Distribution>,
    },
}

/// Mass at `x` of a table sorted by atom.
fn atom_mass(sorted: &[(f64, f64)], x: f64) -> f64 {
    match sorted.binary_search_by(|(a, _)| a.total_cmp(&x)) {
        Ok(i) => sorted[i].1,
        // -0.0 and 0.0 compare unequal under total_cmp.
        Err(_) if x == 0.0 => sorted.iter().find(|(a, _)| *a == 0.0).map_or(0.0, |(_, p)| *p),
        Err(_) => 0.0,
    }
}

fn check_probability_vector(what: &str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidDistribution(format!("{what} must be nonempty")));
    }
    if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::InvalidDistribution(format!(
            "{what} must be nonnegative and finite, found {bad}"
        )));
    }
    let total: f64 = values.iter().sum();
    if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::InvalidDistribution(format!(
            "{what} must sum to 1 within {NORMALIZATION_TOLERANCE:e}, sum is {total}"
        )));
    }
    Ok(())
}

impl Distribution {
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidDistribution(format!(
                "Bernoulli parameter must lie in [0, 1], got {p}"
            )));
        }
        Ok(Self { law: Law::Bernoulli { p } })
    }

    pub fn finite_discrete(atoms: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if atoms.len() != probs.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} atoms but {} probabilities",
                atoms.len(),
                probs.len()
            )));
        }
        check_probability_vector("probabilities", &probs)?;
        if let Some(bad) = atoms.iter().find(|a| !a.is_finite()) {
            return Err(Error::InvalidDistribution(format!("atom {bad} is not finite")));
        }
        let mut sorted: Vec<(f64, f64)> = atoms.iter().copied().zip(probs.iter().copied()).collect();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        if let Some(w) = sorted.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidDistribution(format!("atom {} repeated", w[0].0)));
        }
        Ok(Self {
            law: Law::Discrete { atoms, probs, sorted },
        })
    }

    pub fn gaussian(mean: f64, std: f64) -> Result<Self> {
        if !mean.is_finite() || !(std.is_finite() && std > 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "Gaussian needs a finite mean and positive std, got ({mean}, {std})"
            )));
        }
        Ok(Self { law: Law::Gaussian { mean, std } })
    }

    pub fn poisson(rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "Poisson rate must be positive, got {rate}"
            )));
        }
        Ok(Self { law: Law::Poisson { rate } })
    }

    /// Mixture of base laws. Components may not themselves be mixtures, and
    /// discrete and continuous components cannot be combined.
    pub fn mixture(weights: Vec<f64>, components: Vec<Distribution>) -> Result<Self> {
        if weights.len() != components.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} weights but {} components",
                weights.len(),
                components.len()
            )));
        }
        check_probability_vector("mixture weights", &weights)?;
        if components.iter().any(|c| matches!(c.law, Law::Mixture { .. })) {
            return Err(Error::InvalidDistribution(
                "mixture nesting deeper than 2 levels".into(),
            ));
        }
        let discrete = components[0].is_discrete();
        if components.iter().any(|c| c.is_discrete() != discrete) {
            return Err(Error::InvalidDistribution(
                "mixture combines discrete and continuous components".into(),
            ));
        }
        Ok(Self {
            law: Law::Mixture { weights, components },
        })
    }

    pub fn family(&self) -> Family {
        match self.law {
            Law::Bernoulli { .. } => Family::Bernoulli,
            Law::Discrete { .. } => Family::FiniteDiscrete,
            Law::Gaussian { .. } => Family::Gaussian,
            Law::Poisson { .. } => Family::Poisson,
            Law::Mixture { .. } => Family::Mixture,
        }
    }

    /// True for laws with a probability mass function.
    pub fn is_discrete(&self) -> bool {
        match &self.law {
            Law::Bernoulli { .. } | Law::Discrete { .. } | Law::Poisson { .. } => true,
            Law::Gaussian { .. } => false,
            Law::Mixture { components, .. } => components[0].is_discrete(),
        }
    }

    /// True for laws with finitely many atoms (Bernoulli, finite discrete, and
    /// mixtures of those).
    pub fn has_finite_support(&self) -> bool {
        match &self.law {
            Law::Bernoulli { .. } | Law::Discrete { .. } => true,
            Law::Gaussian { .. } | Law::Poisson { .. } => false,
            Law::Mixture { components, .. } => components.iter().all(|c| c.has_finite_support()),
        }
    }

    /// `(mean, std)` when the law is a single Gaussian.
    pub fn as_gaussian(&self) -> Option<(f64, f64)> {
        match self.law {
            Law::Gaussian { mean, std } => Some((mean, std)),
            _ => None,
        }
    }

    pub fn as_poisson(&self) -> Option<f64> {
        match self.law {
            Law::Poisson { rate } => Some(rate),
            _ => None,
        }
    }

    /// Natural log of the density (continuous laws) or mass (discrete laws)
    /// at `x`. Returns `-inf` outside the support and for NaN input.
    pub fn log_density(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NEG_INFINITY;
        }
        match &self.law {
            Law::Bernoulli { p } => {
                if x == 1.0 {
                    p.ln()
                } else if x == 0.0 {
                    (-p).ln_1p()
                } else {
                    f64::NEG_INFINITY
                }
            }
            Law::Discrete { sorted, .. } => atom_mass(sorted, x).ln(),
            Law::Gaussian { mean, std } => {
                let z = (x - mean) / std;
                -0.5 * z * z - std.ln() - HALF_LN_2PI
            }
            Law::Poisson { rate } => poisson_log_mass(*rate, x),
            Law::Mixture { weights, components } => log_sum_exp(
                weights
                    .iter()
                    .zip(components)
                    .filter(|(w, _)| **w > 0.0)
                    .map(|(w, c)| w.ln() + c.log_density(x)),
            ),
        }
    }

    /// `exp(log_density(x))`. Masses of Bernoulli and finite laws are
    /// returned as stored, without the round trip through the log.
    pub fn density(&self, x: f64) -> f64 {
        match &self.law {
            Law::Bernoulli { p } if x == 1.0 => *p,
            Law::Bernoulli { p } if x == 0.0 => 1.0 - p,
            Law::Bernoulli { .. } => 0.0,
            Law::Discrete { sorted, .. } => atom_mass(sorted, x),
            _ => self.log_density(x).exp(),
        }
    }

    /// Draws `n` i.i.d. values with a generator seeded from `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<SampleSet> {
        if n == 0 {
            return Err(Error::InvalidArgument("sample size must be at least 1".into()));
        }
        let sampler = self.sampler();
        let mut rng = rng_from_seed(seed);
        let values = (0..n).map(|_| sampler.draw(&mut rng)).collect();
        SampleSet::new(values, seed, self.to_string())
    }

    /// A reusable sampler with precomputed tables.
    pub fn sampler(&self) -> Sampler {
        match &self.law {
            Law::Bernoulli { p } => Sampler::Bernoulli(*p),
            Law::Discrete { atoms, probs, .. } => Sampler::Discrete {
                index: WeightedIndex::new(probs).expect("validated probabilities"),
                atoms: atoms.clone(),
            },
            Law::Gaussian { mean, std } => {
                Sampler::Gaussian(Normal::new(*mean, *std).expect("validated parameters"))
            }
            Law::Poisson { rate } => {
                Sampler::Poisson(Poisson::new(*rate).expect("validated parameters"))
            }
            Law::Mixture { weights, components } => Sampler::Mixture {
                index: WeightedIndex::new(weights).expect("validated weights"),
                components: components.iter().map(Distribution::sampler).collect(),
            },
        }
    }

    /// Evaluation domain covering all but a small amount of mass.
    ///
    /// Finite laws return their atoms. Poisson laws return the integers
    /// between two cut points with each tail below `tail_mass`. Gaussians
    /// return an interval missing at most `2 * tail_mass`. Mixtures return
    /// the union over components.
    pub fn support_grid(&self, tail_mass: f64) -> Result<Support> {
        if !(tail_mass > 0.0 && tail_mass < 0.5) {
            return Err(Error::InvalidArgument(format!(
                "tail mass must lie in (0, 0.5), got {tail_mass}"
            )));
        }
        Ok(self.support_unchecked(tail_mass))
    }

    fn support_unchecked(&self, tail_mass: f64) -> Support {
        match &self.law {
            Law::Bernoulli { .. } => Support::Atoms(vec![0.0, 1.0]),
            Law::Discrete { sorted, .. } => Support::Atoms(sorted.iter().map(|(a, _)| *a).collect()),
            Law::Gaussian { mean, std } => {
                let z = -StdNormal::standard().inverse_cdf(tail_mass);
                Support::Intervals(vec![Interval::new(mean - z * std, mean + z * std)])
            }
            Law::Poisson { rate } => {
                let (lo, hi) = poisson_range(*rate, tail_mass);
                Support::Atoms((lo..=hi).map(|k| k as f64).collect())
            }
            Law::Mixture { weights, components } => {
                let parts = weights
                    .iter()
                    .zip(components)
                    .filter(|(w, _)| **w > 0.0)
                    .map(|(_, c)| c.support_unchecked(tail_mass));
                parts.fold(Support::empty(self.is_discrete()), |acc, s| acc.union(&s))
            }
        }
    }
}

/// Precomputed sampling state for one [`Distribution`].
#[derive(Debug, Clone)]
pub enum Sampler {
    Bernoulli(f64),
    Discrete { index: WeightedIndex<f64>, atoms: Vec<f64> },
    Gaussian(Normal<f64>),
    Poisson(Poisson<f64>),
    Mixture { index: WeightedIndex<f64>, components: Vec<Sampler> },
}

impl Sampler {
    pub fn draw(&self, rng: &mut Rng) -> f64 {
        match self {
            Sampler::Bernoulli(p) => {
                if rng.gen::<f64>() < *p {
                    1.0
                } else {
                    0.0
                }
            }
            Sampler::Discrete { index, atoms } => atoms[index.sample(rng)],
            Sampler::Gaussian(normal) => normal.sample(rng),
            Sampler::Poisson(poisson) => poisson.sample(rng),
            Sampler::Mixture { index, components } => components[index.sample(rng)].draw(rng),
        }
    }
}

pub(crate) fn log_sum_exp(terms: impl Iterator<Item = f64>) -> f64 {
    let terms: Vec<f64> = terms.collect();
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

fn poisson_log_mass(rate: f64, x: f64) -> f64 {
    if x < 0.0 || x.fract() != 0.0 || !x.is_finite() {
        return f64::NEG_INFINITY;
    }
    x * rate.ln() - rate - ln_gamma(x + 1.0)
}

/// Integer range `[lo, hi]` such that `P(X < lo) < tail` and `P(X > hi) < tail`.
///
/// The tails are bounded by geometric series: below the mode the mass ratio
/// `p(k-1)/p(k) = k/rate` is at most `(k-1)/rate`, above it `p(k+1)/p(k)` is
/// at most `rate/(k+2)`.
fn poisson_range(rate: f64, tail: f64) -> (u64, u64) {
    let mode = rate.floor() as u64;
    let mass = |k: u64| poisson_log_mass(rate, k as f64).exp();

    let mut lo = mode;
    while lo > 0 {
        let next = (lo - 1) as f64;
        let bound = mass(lo - 1) / (1.0 - next / rate);
        if bound < tail {
            break;
        }
        lo -= 1;
    }

    let mut hi = mode;
    loop {
        let ratio = rate / (hi as f64 + 2.0);
        let bound = mass(hi + 1) / (1.0 - ratio);
        if bound < tail {
            break;
        }
        hi += 1;
    }
    (lo, hi)
}

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi);
        Self { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Result of [`Distribution::support_grid`].
#[derive(Debug, Clone, PartialEq)]
pub enum Support {
    /// Sorted, deduplicated atoms.
    Atoms(Vec<f64>),
    /// Sorted, disjoint intervals.
    Intervals(Vec<Interval>),
}

impl Support {
    fn empty(discrete: bool) -> Self {
        if discrete {
            Support::Atoms(Vec::new())
        } else {
            Support::Intervals(Vec::new())
        }
    }

    /// Union of two supports of the same kind. Mixing atoms with intervals
    /// keeps the intervals and appends each atom as a degenerate interval.
    pub fn union(&self, other: &Support) -> Support {
        match (self, other) {
            (Support::Atoms(a), Support::Atoms(b)) => {
                let mut all: Vec<f64> = a.iter().chain(b).copied().collect();
                all.sort_by(f64::total_cmp);
                all.dedup();
                Support::Atoms(all)
            }
            _ => {
                let mut all: Vec<Interval> = self
                    .intervals()
                    .into_iter()
                    .chain(other.intervals())
                    .collect();
                all.sort_by(|a, b| a.lo.total_cmp(&b.lo));
                let mut merged: Vec<Interval> = Vec::with_capacity(all.len());
                for iv in all {
                    match merged.last_mut() {
                        Some(last) if iv.lo <= last.hi => last.hi = last.hi.max(iv.hi),
                        _ => merged.push(iv),
                    }
                }
                Support::Intervals(merged)
            }
        }
    }

    fn intervals(&self) -> Vec<Interval> {
        match self {
            Support::Atoms(a) => a.iter().map(|&x| Interval::new(x, x)).collect(),
            Support::Intervals(v) => v.clone(),
        }
    }

    /// Smallest interval containing the whole support.
    pub fn hull(&self) -> Option<Interval> {
        match self {
            Support::Atoms(a) => Some(Interval::new(*a.first()?, *a.last()?)),
            Support::Intervals(v) => Some(Interval::new(v.first()?.lo, v.last()?.hi)),
        }
    }

    pub fn atoms(&self) -> Option<&[f64]> {
        match self {
            Support::Atoms(a) => Some(a),
            Support::Intervals(_) => None,
        }
    }
}

/// An ordered batch of observations together with the seed that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    values: Vec<f64>,
    seed: u64,
    source_label: String,
}

impl SampleSet {
    pub fn new(values: Vec<f64>, seed: u64, source_label: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("a sample set needs at least one value".into()));
        }
        Ok(Self {
            values,
            seed,
            source_label: source_label.into(),
        })
    }

    /// Hand-written observations with seed 0.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        Self::new(values, 0, "manual")
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; a sample set holds at least one value.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn source_label(&self) -> &str {
        &self.source_label
    }

    /// Copy with the value at `index` replaced.
    pub fn with_replaced(&self, index: usize, value: f64) -> Self {
        let mut values = self.values.clone();
        values[index] = value;
        Self {
            values,
            seed: self.seed,
            source_label: self.source_label.clone(),
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.law {
            Law::Bernoulli { p } => write!(f, "bern({p})"),
            Law::Discrete { atoms, probs, .. } => {
                write!(f, "disc(")?;
                for (i, (a, p)) in atoms.iter().zip(probs).enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}:{p}")?;
                }
                write!(f, ")")
            }
            Law::Gaussian { mean, std } => write!(f, "gauss({mean},{std})"),
            Law::Poisson { rate } => write!(f, "pois({rate})"),
            Law::Mixture { weights, components } => {
                write!(f, "mix(")?;
                for (i, (w, c)) in weights.iter().zip(components).enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{w}*{c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        literal::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bern(p: f64) -> Distribution {
        Distribution::bernoulli(p).unwrap()
    }

    #[test]
    fn log_density_examples() {
        assert!((bern(0.25).log_density(1.0) - 0.25f64.ln()).abs() < 1e-15);
        let g = Distribution::gaussian(0.0, 1.0).unwrap();
        assert!((g.log_density(0.0) + 0.918_939).abs() < 1e-6);
        assert!((g.log_density(0.0) + 0.5 * (2.0 * std::f64::consts::PI).ln()).abs() < 1e-15);
        assert_eq!(bern(0.0).log_density(1.0), f64::NEG_INFINITY);
        assert_eq!(bern(0.5).log_density(0.5), f64::NEG_INFINITY);
        assert_eq!(bern(0.5).log_density(f64::NAN), f64::NEG_INFINITY);
    }

    #[test]
    fn poisson_mass_only_at_nonnegative_integers() {
        let d = Distribution::poisson(3.0).unwrap();
        assert_eq!(d.log_density(1.5), f64::NEG_INFINITY);
        assert_eq!(d.log_density(-1.0), f64::NEG_INFINITY);
        let expected = (3.0f64.powi(2) * (-3.0f64).exp() / 2.0).ln();
        assert!((d.log_density(2.0) - expected).abs() < 1e-12);
    }

    #[test]
    fn mixture_uses_log_sum_exp() {
        let m: Distribution = "mix(0.5*gauss(0,1) + 0.5*gauss(100,1))".parse().unwrap();
        // Far from both components the raw densities underflow but the log does not.
        let x = 50.0;
        let ld = m.log_density(x);
        assert!(ld.is_finite());
        let expected = 0.5f64.ln() + log_sum_exp([-1250.0, -1250.0].into_iter()) - HALF_LN_2PI;
        assert!((ld - expected).abs() < 1e-9);
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(Distribution::bernoulli(1.5).is_err());
        assert!(Distribution::gaussian(0.0, 0.0).is_err());
        assert!(Distribution::poisson(-1.0).is_err());
        assert!(Distribution::finite_discrete(vec![0.0, 0.0], vec![0.5, 0.5]).is_err());
        assert!(Distribution::finite_discrete(vec![0.0, 1.0], vec![0.5, 0.6]).is_err());
        assert!(Distribution::finite_discrete(vec![0.0, 1.0], vec![-0.5, 1.5]).is_err());
    }

    #[test]
    fn mixture_depth_and_kind_checked() {
        let inner: Distribution = "mix(0.5*gauss(0,1) + 0.5*gauss(1,1))".parse().unwrap();
        let g = Distribution::gaussian(0.0, 1.0).unwrap();
        assert!(Distribution::mixture(vec![0.5, 0.5], vec![inner, g.clone()]).is_err());
        assert!(Distribution::mixture(vec![0.5, 0.5], vec![bern(0.5), g]).is_err());
    }

    #[test]
    fn degenerate_samples() {
        assert_eq!(bern(0.0).sample(5, 11).unwrap().values(), &[0.0; 5]);
        let point = Distribution::finite_discrete(vec![7.0], vec![1.0]).unwrap();
        assert_eq!(point.sample(3, 11).unwrap().values(), &[7.0; 3]);
        assert!(bern(0.5).sample(0, 1).is_err());
    }

    #[test]
    fn bernoulli_half_law_of_large_numbers() {
        let s = bern(0.5).sample(100_000, 2024).unwrap();
        let mean = s.values().iter().sum::<f64>() / s.len() as f64;
        assert!((mean - 0.5).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn sampling_is_deterministic() {
        let m: Distribution = "mix(0.9*gauss(0,1) + 0.1*gauss(100,1))".parse().unwrap();
        assert_eq!(m.sample(1000, 5).unwrap(), m.sample(1000, 5).unwrap());
        assert_ne!(m.sample(1000, 5).unwrap(), m.sample(1000, 6).unwrap());
    }

    #[test]
    fn empirical_frequencies_match_probabilities() {
        let probs = vec![0.1, 0.2, 0.3, 0.4];
        let d = Distribution::finite_discrete(vec![0.0, 1.0, 2.0, 3.0], probs.clone()).unwrap();
        let n = 1_000_000;
        let s = d.sample(n, 99).unwrap();
        let mut counts = [0usize; 4];
        for v in s.values() {
            counts[*v as usize] += 1;
        }
        for (c, p) in counts.iter().zip(&probs) {
            let freq = *c as f64 / n as f64;
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((freq - p).abs() < 4.0 * se, "freq {freq} vs {p}");
        }
    }

    #[test]
    fn support_grid_examples() {
        assert_eq!(bern(0.3).support_grid(1e-6).unwrap(), Support::Atoms(vec![0.0, 1.0]));

        let g = Distribution::gaussian(0.0, 1.0).unwrap();
        let hull = g.support_grid(1e-6).unwrap().hull().unwrap();
        assert!(hull.lo <= -4.75 && hull.hi >= 4.75);

        let m: Distribution = "mix(0.9*gauss(0,1) + 0.1*gauss(100,1))".parse().unwrap();
        let Support::Intervals(parts) = m.support_grid(1e-6).unwrap() else {
            panic!("continuous mixture must give intervals");
        };
        assert_eq!(parts.len(), 2);
        assert!(parts[0].lo <= -4.75 && parts[0].hi >= 4.75);
        // z(1e-6) = 4.7534, so the contaminant covers [95.2466, 104.7534].
        assert!(parts[1].lo <= 95.25 && parts[1].hi >= 104.75);
        let hull = Support::Intervals(parts).hull().unwrap();
        assert!(hull.lo <= -4.75 && hull.hi >= 104.75);

        assert!(g.support_grid(0.0).is_err());
        assert!(g.support_grid(0.5).is_err());
    }

    #[test]
    fn poisson_grid_tails_are_small() {
        for rate in [0.5, 3.0, 40.0, 5000.0] {
            let d = Distribution::poisson(rate).unwrap();
            let atoms = d.support_grid(1e-9).unwrap();
            let atoms = atoms.atoms().unwrap();
            let covered: f64 = atoms.iter().map(|&k| d.density(k)).sum();
            assert!(1.0 - covered < 2e-9, "rate {rate}: covered {covered}");
        }
    }

    #[test]
    fn finite_masses_sum_to_one() {
        let d = Distribution::finite_discrete(vec![-1.0, 0.5, 3.0], vec![0.2, 0.3, 0.5]).unwrap();
        for law in [d, bern(0.37)] {
            let total: f64 = law
                .support_grid(1e-6)
                .unwrap()
                .atoms()
                .unwrap()
                .iter()
                .map(|&x| law.density(x))
                .sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sample_set_requires_values() {
        assert!(SampleSet::from_values(vec![]).is_err());
        let s = SampleSet::new(vec![1.0], 3, "x").unwrap();
        assert_eq!((s.seed(), s.source_label(), s.len()), (3, "x", 1));
    }
}
