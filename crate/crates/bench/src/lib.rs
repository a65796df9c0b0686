//! Fixtures shared by the benchmarks.

use robusttest_core::{Distribution, SampleSet};

pub const SEED: u64 = 0x5EED;

pub fn law(literal: &str) -> Distribution {
    literal.parse().expect("fixture literal")
}

/// `(name, P, Q)` pairs covering each evaluation route.
pub fn pairs() -> Vec<(&'static str, Distribution, Distribution)> {
    vec![
        ("bernoulli", law("bern(0.5)"), law("bern(0.6)")),
        ("discrete", law("disc(0:0.5, 1:0.4, 2:0.1)"), law("disc(0:0.4, 1:0.6, 2:0)")),
        ("gaussian", law("gauss(0,1)"), law("gauss(0.2,1)")),
        ("poisson", law("pois(10)"), law("pois(12)")),
        ("contaminated", law("gauss(0,1)"), law("mix(0.995*gauss(0,1) + 0.005*gauss(100,1))")),
    ]
}

pub fn sample(d: &Distribution, n: usize) -> SampleSet {
    d.sample(n, SEED).expect("positive size")
}
