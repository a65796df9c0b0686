use robusttest_core::divergences::{compute, delta_max};
use robusttest_core::experiments::{
    bound_suite, error_curve, repro_np_counterexample, repro_scheffe_gap, repro_zero_mean, robustness_sweep,
    sample_complexity_search, tournament_select,
};
use robusttest_core::hypothesis::{
    dp_hellinger_decide, hellinger_decide, neyman_pearson_decide, scheffe_decide,
};
use robusttest_core::rng::{derive_seed, Stream};
use robusttest_core::{Distribution, DpParams, ExperimentSpec, SampleSet, TestKind, ThresholdPolicy};

use crate::args::*;
use crate::format::{number, Table};
use crate::CliError;

pub fn execute(command: &Command) -> Result<Table, CliError> {
    match command {
        Command::Distance(a) => distance(a),
        Command::Test(a) => test(a),
        Command::Simulate(a) => simulate(a),
        Command::Complexity(a) => complexity(a),
        Command::Sweep(a) => sweep(a),
        Command::Repro(a) => repro(a),
        Command::Bounds(a) => bounds(a),
        Command::Tournament(a) => tournament(a),
    }
}

fn distance(a: &DistanceArgs) -> Result<Table, CliError> {
    let mut t = Table::new(&["metric", "value", "method", "abs_error_bound"]);
    for metric in a.metric.metrics() {
        let r = compute(metric, &a.pair.p, &a.pair.q, a.route.into())?;
        t.push(vec![
            metric.as_str().into(),
            number(r.value),
            r.method.as_str().into(),
            number(r.abs_error_bound),
        ]);
    }
    Ok(t)
}

fn privacy(args: &PrivacyArgs, p: &Distribution, q: &Distribution, test: TestArg) -> Result<Option<DpParams>, CliError> {
    if test != TestArg::DpHellinger {
        return Ok(None);
    }
    let epsilon = args
        .epsilon
        .ok_or_else(|| CliError::Usage("--test dp-hellinger requires --epsilon".into()))?;
    let delta = match args.delta_pq.as_str() {
        "unknown" => None,
        "auto" if p.has_finite_support() && q.has_finite_support() => Some(delta_max(p, q).value),
        "auto" => None,
        other => Some(other.parse::<f64>().map_err(|_| {
            CliError::Usage(format!("--delta-pq expects unknown, auto or a number, got `{other}`"))
        })?),
    };
    Ok(Some(DpParams::new(epsilon, delta, 0)?))
}

fn test(a: &TestArgs) -> Result<Table, CliError> {
    let (p, q) = (&a.pair.p, &a.pair.q);
    let xs = match &a.samples {
        Some(values) => SampleSet::new(values.clone(), a.seed, "manual")?,
        None => a
            .source
            .as_ref()
            .unwrap_or(p)
            .sample(a.n, derive_seed(a.seed, Stream::NullArm, 0))?,
    };
    let tie_seed = derive_seed(a.seed, Stream::TieBreak, 0);
    let decision = match a.test {
        TestArg::Hellinger => hellinger_decide(p, q, &xs, a.threshold, tie_seed),
        TestArg::NeymanPearson => neyman_pearson_decide(p, q, &xs, a.threshold, tie_seed),
        TestArg::Scheffe => scheffe_decide(p, q, &xs, tie_seed)?,
        TestArg::DpHellinger => {
            let dp = privacy(&a.privacy, p, q, a.test)?
                .expect("dp test")
                .with_noise_seed(derive_seed(a.seed, Stream::Noise, 0));
            dp_hellinger_decide(p, q, &xs, &dp, a.threshold, tie_seed)
        }
    };
    let mut t = Table::new(&["test", "verdict", "statistic", "threshold", "tie_broken", "out_of_support", "n"]);
    t.push(vec![
        TestKind::from(a.test).as_str().into(),
        decision.verdict.to_string(),
        number(decision.statistic),
        number(decision.threshold),
        decision.tie_broken.to_string(),
        decision.out_of_support.to_string(),
        xs.len().to_string(),
    ]);
    Ok(t)
}

fn spec(a: &SpecArgs, n_grid: Vec<usize>) -> Result<ExperimentSpec, CliError> {
    let mut spec = ExperimentSpec::new(a.pair.p.clone(), a.pair.q.clone(), a.test.into())
        .with_n_grid(n_grid)
        .with_trials(a.trials)
        .with_seed(a.seed);
    if a.threshold_policy == PolicyArg::Calibrated {
        spec = spec.with_threshold_policy(ThresholdPolicy::Calibrated {
            type1_target: a.type1_target,
            calib_trials: a.calib_trials,
        });
    }
    if let Some(dp) = privacy(&a.privacy, &a.pair.p, &a.pair.q, a.test)? {
        spec = spec.with_dp(dp);
    }
    spec.validate()?;
    Ok(spec)
}

fn simulate(a: &SimulateArgs) -> Result<Table, CliError> {
    let mut spec = spec(&a.spec, a.n.clone())?;
    if let Some(r) = &a.r {
        spec = spec.with_perturbation(r.clone(), a.r_arm.into());
    }
    let mut t = Table::new(&["n", "type_i", "type_ii", "max_error", "trials", "half_width"]);
    for e in error_curve(&spec)? {
        t.push(vec![
            e.n.to_string(),
            number(e.type_i),
            number(e.type_ii),
            number(e.max_error),
            e.trials.to_string(),
            number(e.half_width),
        ]);
    }
    Ok(t)
}

fn complexity(a: &ComplexityArgs) -> Result<Table, CliError> {
    let mut spec = spec(&a.spec, vec![1])?;
    spec.n_cap = a.n_cap;
    let found = sample_complexity_search(&spec, a.delta)?;
    let e = found.estimate;
    let mut t = Table::new(&["test", "target_delta", "n", "type_i", "type_ii", "max_error", "trials", "half_width"]);
    t.push(vec![
        spec.test_kind.as_str().into(),
        number(a.delta),
        found.n.to_string(),
        number(e.type_i),
        number(e.type_ii),
        number(e.max_error),
        e.trials.to_string(),
        number(e.half_width),
    ]);
    Ok(t)
}

fn sweep(a: &SweepArgs) -> Result<Table, CliError> {
    let spec = spec(&a.spec, vec![a.n])?;
    let mut t = Table::new(&["r_literal", "gamma_observed", "correct_rate", "trials"]);
    for row in robustness_sweep(&spec, &a.r_family)? {
        t.push(vec![
            row.r.to_string(),
            number(row.gamma_observed),
            number(row.correct_rate),
            row.trials.to_string(),
        ]);
    }
    Ok(t)
}

fn repro(a: &ReproArgs) -> Result<Table, CliError> {
    match a.which {
        ReproArg::NpCounterexample => {
            let r = repro_np_counterexample(a.gamma, a.delta, a.seed, a.trials)?;
            let mut t = Table::new(&[
                "gamma",
                "delta",
                "n",
                "h_pr",
                "h_pr_bound",
                "h_qr",
                "h_qr_bound",
                "np_h1_rate",
                "hellinger_h0_rate",
                "trials",
            ]);
            t.push(vec![
                number(r.gamma),
                number(r.delta),
                r.n.to_string(),
                number(r.h_pr),
                number(r.h_pr_bound),
                number(r.h_qr),
                number(r.h_qr_bound),
                number(r.np_h1_rate),
                number(r.hellinger_h0_rate),
                r.trials.to_string(),
            ]);
            Ok(t)
        }
        ReproArg::ScheffeGap => {
            let r = repro_scheffe_gap(a.k, a.delta, a.seed)?;
            let mut t = Table::new(&[
                "k",
                "epsilon",
                "p_s",
                "q_s",
                "hellinger_sq",
                "n_scheffe",
                "n_hellinger",
                "ratio",
            ]);
            t.push(vec![
                number(r.k),
                number(r.epsilon),
                number(r.p_s),
                number(r.q_s),
                number(r.hellinger_sq),
                r.n_scheffe.to_string(),
                r.n_hellinger.to_string(),
                number(r.ratio),
            ]);
            Ok(t)
        }
        ReproArg::ZeroMean => {
            let mut t = Table::new(&["epsilon", "expectation", "ratio", "limit"]);
            for row in repro_zero_mean(&a.eps)? {
                t.push(vec![
                    number(row.epsilon),
                    number(row.expectation),
                    number(row.ratio),
                    number(row.limit),
                ]);
            }
            Ok(t)
        }
    }
}

fn bounds(a: &BoundsArgs) -> Result<Table, CliError> {
    let report = bound_suite(a.pairs, a.max_support, a.seed)?;
    let mut t = Table::new(&["inequality", "pairs_checked", "worst_slack"]);
    for row in report.rows {
        t.push(vec![row.inequality.into(), row.pairs_checked.to_string(), number(row.worst_slack)]);
    }
    Ok(t)
}

fn tournament(a: &TournamentArgs) -> Result<Table, CliError> {
    let xs = a.source.sample(a.n, derive_seed(a.seed, Stream::NullArm, 0))?;
    let index = tournament_select(&a.candidates, &xs)?;
    let mut t = Table::new(&["index", "candidate"]);
    t.push(vec![index.to_string(), a.candidates[index].to_string()]);
    Ok(t)
}
