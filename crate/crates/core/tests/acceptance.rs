//! Acceptance suite. Prints one `PASS`/`FAIL` line per criterion and exits
//! non-zero if any fails.
//!
//! The default experiment (four agents, ten instances, 10^5 interactions) is
//! run twice; expect this target to take several minutes.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use bandit_alignment::harness::verify::{
    check_mi_bounds, check_mi_oracle, check_optimal_reward, check_solver, check_ts_uniformity, MI_ORACLE_TOLERANCE,
    SOLVER_TOLERANCE, TS_FREQUENCY_TOLERANCE,
};
use bandit_alignment::harness::{loglog_slope, run_experiment, ExperimentConfig, ExperimentResult};
use bandit_alignment::infotheory::{beta_bernoulli_mi, estimate_optimal_reward};
use bandit_alignment::rng::{stream_rng, Stream};
use bandit_alignment::{AgentSpec, BeliefState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn mi(a: f64, b: f64) -> f64 {
    beta_bernoulli_mi(a, b).expect("positive parameters")
}

fn mi_oracle() -> Outcome {
    let start = Instant::now();
    let check = check_mi_oracle(mi, 100, 1);
    let secs = start.elapsed().as_secs_f64();
    outcome(
        check.passed && secs < 10.0,
        format!(
            "max |closed form - quadrature| = {:.2e} (<= {MI_ORACLE_TOLERANCE:e}); {secs:.2} s (< 10 s)",
            check.measured
        ),
    )
}

fn mi_bounds() -> Outcome {
    let check = check_mi_bounds(mi, 200);
    outcome(
        check.passed,
        format!("integer alpha, beta in [1, 200]: {}", check.detail),
    )
}

fn ts_queries_and_uniformity() -> Outcome {
    let check = check_ts_uniformity(16, 10_000, 10, 2024).expect("simulation runs");
    outcome(
        check.passed,
        format!(
            "{}; max |freq - 1/16| = {:.4} (<= {TS_FREQUENCY_TOLERANCE})",
            check.detail, check.measured
        ),
    )
}

fn ts_linear(default_run: &ExperimentResult) -> Outcome {
    let curve = default_run.curve("ts").expect("ts in default roster");
    let slope = loglog_slope(curve, 1_000, 10_000).expect("slope fits");
    outcome(
        (slope - 1.0).abs() <= 0.05,
        format!("slope over [1e3, 1e4] = {slope:.4} (1.0 +/- 0.05)"),
    )
}

fn explore_then_exploit(default_run: &ExperimentResult) -> Outcome {
    let ids_final = default_run
        .curve("ids")
        .and_then(|c| c.final_point())
        .expect("ids curve");
    let mut passed = true;
    let mut parts = Vec::new();
    for tau in [3200u64, 16_000] {
        let id = AgentSpec::ExploreThenExploit { tau }.id();
        let curve = default_run.curve(&id).expect("ete in default roster");
        let at_tau = curve.mean_at(tau).expect("switch point recorded");
        // Every seed, not just the mean, must have paid at least tau/2 by the switch.
        let worst_seed = default_run
            .episodes_of(&id)
            .map(|e| e.trace.cum_regret_at(tau).expect("switch point recorded"))
            .fold(f64::INFINITY, f64::min);
        let slope = loglog_slope(curve, tau / 4, tau).expect("slope fits");
        let last = curve.final_point().expect("nonempty").mean_cum_regret;
        let ok = worst_seed >= 0.5 * tau as f64 && (slope - 1.0).abs() <= 0.05 && last > ids_final.mean_cum_regret;
        passed &= ok;
        parts.push(format!(
            "tau={tau}: regret(tau) mean {at_tau:.0} min {worst_seed:.0} (>= {}), slope {slope:.4}, final {last:.0}",
            tau / 2
        ));
    }
    parts.push(format!("ids final {:.0}", ids_final.mean_cum_regret));
    outcome(passed, parts.join("; "))
}

fn ids_sublinear(default_run: &ExperimentResult) -> Outcome {
    let curve = default_run.curve("ids").expect("ids in default roster");
    let slope = loglog_slope(curve, 10_000, 100_000).expect("slope fits");
    let final_point = curve.final_point().expect("nonempty");
    let t = final_point.t as f64;
    let envelope = (33.0 * (4.0 * t).ln()).sqrt() * 32f64.powf(0.75) * t.powf(0.75);
    outcome(
        slope <= 0.65 && final_point.mean_cum_regret <= envelope,
        format!(
            "slope over [1e4, 1e5] = {slope:.4} (<= 0.65); final mean {:.0} +/- {:.0} (<= {envelope:.3e})",
            final_point.mean_cum_regret, final_point.stderr
        ),
    )
}

fn solver() -> Outcome {
    let check = check_solver(1000, 2).expect("solver runs");
    outcome(
        check.passed,
        format!(
            "worst excess over grid oracle = {:.2e} (<= {SOLVER_TOLERANCE:e}); {}",
            check.measured, check.detail
        ),
    )
}

/// Brute-force `E[max_a r_a]` under the uniform prior from plain uniform draws.
fn prior_optimal_reward_oracle(arms: usize, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut total = 0.0;
    for _ in 0..samples {
        let mut best = f64::NEG_INFINITY;
        for _ in 0..arms {
            let (phi, theta): (f64, f64) = (rng.random(), rng.random());
            best = best.max(phi * theta + (1.0 - phi) * (1.0 - theta));
        }
        total += best;
    }
    total / samples as f64
}

fn optimal_reward() -> Outcome {
    let single = check_optimal_reward(512, 3).expect("estimate runs");
    let belief = BeliefState::prior(16).expect("arms > 0");
    let estimate = estimate_optimal_reward(&belief, 512, &mut stream_rng(8, Stream::Agent)).expect("samples > 0");
    let oracle = prior_optimal_reward_oracle(16, 1_000_000, 8);
    let gap = (estimate - oracle).abs();
    outcome(
        single.passed && gap <= 0.01,
        format!(
            "N=1: |est - 0.5| = {:.4} (<= {:.4}); N=16: est {estimate:.4} vs 1e6-sample oracle {oracle:.4}, gap {gap:.4} (<= 0.01)",
            single.measured, single.threshold
        ),
    )
}

fn trace_files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir.join("traces"))
        .expect("trace directory exists")
        .map(|entry| {
            let path = entry.expect("readable entry").path();
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            (name, fs::read(&path).expect("readable trace"))
        })
        .collect()
}

fn determinism(first_dir: &Path) -> Outcome {
    let second = tempfile::tempdir().expect("temp dir");
    let cfg = ExperimentConfig {
        output_dir: second.path().to_path_buf(),
        ..Default::default()
    };
    run_experiment(&cfg).expect("second default run");
    let (a, b) = (trace_files(first_dir), trace_files(second.path()));
    let bytes: usize = a.values().map(Vec::len).sum();
    let differing = a.iter().filter(|(name, data)| b.get(*name) != Some(*data)).count();
    outcome(
        !a.is_empty() && a.len() == b.len() && differing == 0,
        format!("{} trace files ({bytes} bytes) per run; {differing} differ", a.len()),
    )
}

fn main() -> ExitCode {
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let mut report = |id: u32, name: &'static str, o: Outcome| {
        println!(
            "criterion {id} [{}] {name}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
        results.push((id, name, o));
    };

    report(1, "mutual information matches quadrature", mi_oracle());
    report(2, "mutual information bounds", mi_bounds());
    report(
        3,
        "thompson sampling never queries, uniform arms",
        ts_queries_and_uniformity(),
    );
    report(7, "ids solver optimality", solver());
    report(8, "monte-carlo optimal reward", optimal_reward());

    let first = tempfile::tempdir().expect("temp dir");
    let cfg = ExperimentConfig {
        output_dir: first.path().to_path_buf(),
        ..Default::default()
    };
    let start = Instant::now();
    let (default_run, _) = run_experiment(&cfg).expect("default run");
    println!("default experiment finished in {:.0} s", start.elapsed().as_secs_f64());

    report(4, "thompson sampling regret is linear", ts_linear(&default_run));
    report(5, "explore-then-exploit", explore_then_exploit(&default_run));
    report(6, "ids regret is sublinear", ids_sublinear(&default_run));
    report(9, "default experiment is deterministic", determinism(first.path()));

    let failed: Vec<u32> = results.iter().filter(|r| !r.2.passed).map(|r| r.0).collect();
    println!(
        "acceptance: {} of {} criteria passed",
        results.len() - failed.len(),
        results.len()
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed: {failed:?}");
        ExitCode::FAILURE
    }
}
