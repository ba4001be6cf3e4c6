//! Acceptance suite: one test per criterion, each printing a pass line with
//! its runtime. Tolerances and limits are pinned in the constants below.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};

use ebse::analysis;
use ebse::model::{NoiseSpec, StepWindow};
use ebse::observer::ObserverGain;
use ebse::scenario::{
    builtin_benchmark, GainsSpec, InputMode, ModelSpec, NoiseSection, ObserverGainSpec, RunSpec,
    Scenario, TriggersSpec, SCENARIO_SCHEMA_VERSION,
};
use ebse::sim::run;
use ebse::trigger::TriggerNorm;

fn finish(criterion: &str, t0: Instant, limit_s: f64) {
    let dt = t0.elapsed().as_secs_f64();
    assert!(dt < limit_s, "{criterion}: took {dt:.2}s, limit {limit_s}s");
    println!("{criterion}: pass ({dt:.2}s < {limit_s}s)");
}

/// Single sensor/estimator pair observing a stable 2-state system through a
/// full-state measurement, Gaussian noise on both channels.
fn single_link_scenario(delta: f64, horizon: usize, master_seed: u64) -> Scenario {
    Scenario {
        schema_version: SCENARIO_SCHEMA_VERSION,
        model: ModelSpec {
            a: vec![vec![0.8, 0.1], vec![0.0, 0.9]],
            b: vec![],
            c: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            sensor_partition: vec![2],
            input_partition: vec![],
            ts: 1.0,
        },
        noise: NoiseSection {
            v: NoiseSpec::Gaussian {
                variances: vec![4e-4, 4e-4],
                seed: 0,
            },
            w: NoiseSpec::Gaussian {
                variances: vec![2.5e-3, 2.5e-3],
                seed: 0,
            },
        },
        gains: GainsSpec {
            observer: ObserverGainSpec::Kalman {
                q_diag: vec![4e-4, 4e-4],
                r_diag: vec![2.5e-3, 2.5e-3],
            },
            controller: None,
        },
        triggers: TriggersSpec {
            delta_est: vec![delta],
            delta_ctrl: vec![],
            norm: TriggerNorm::Two,
        },
        bus: Default::default(),
        agents: vec![],
        injection: Default::default(),
        analysis: Default::default(),
        run: RunSpec {
            horizon,
            reset_period: 0,
            control: false,
            input_mode: InputMode::Periodic,
            x0: None,
            xhat0: None,
            trace_pairs: None,
            rate_window: 100,
            rho: None,
        },
    }
    .with_master_seed(master_seed)
}

fn benchmark_with_horizon(horizon: usize) -> Scenario {
    let mut s = builtin_benchmark();
    s.run.horizon = horizon;
    s
}

/// Criterion 1: with zero thresholds, no drops, no disturbances, and equal
/// initialization, every agent reproduces the centralized estimate to 1e-10
/// over 10^4 steps.
#[test]
fn acceptance_01_emulation_recovery() {
    let t0 = Instant::now();

    // Benchmark scenario, full communication conditions.
    let mut s = benchmark_with_horizon(10_000);
    s.triggers.delta_est = vec![0.0; 4];
    s.bus.drop_prob = 0.0;
    s.run.input_mode = InputMode::Periodic;
    let out = run(&s).unwrap();
    assert!(out.ok());
    for (a, max_e) in out.trace.max_norm_e().iter().enumerate() {
        assert!(*max_e <= 1e-10, "agent {a}: max ||e_i|| = {max_e}");
    }

    // Estimation-only single-link scenario under the same conditions.
    let s2 = single_link_scenario(0.0, 10_000, 7);
    let out2 = run(&s2).unwrap();
    assert!(out2.ok());
    for max_e in out2.trace.max_norm_e() {
        assert!(max_e <= 1e-10);
    }

    finish("criterion 01 (emulation recovery)", t0, 5.0);
}

/// Criterion 2: the single-link difference bound holds for every seed and
/// threshold under Gaussian noise.
#[test]
fn acceptance_02_theorem1_bound() {
    let t0 = Instant::now();
    for &delta in &[0.01, 0.1, 1.0] {
        // The bound depends only on the design, not the seed.
        let compiled = single_link_scenario(delta, 10, 0).build().unwrap();
        let report = analysis::bound_report(&compiled).unwrap();
        let bound = report.theorem1_e_max;
        for seed in 0..20u64 {
            let s = single_link_scenario(delta, 5000, 1000 + seed);
            let out = run(&s).unwrap();
            assert!(out.ok());
            let sup = out.trace.max_norm_e().into_iter().fold(0.0f64, f64::max);
            assert!(
                sup <= bound,
                "delta {delta}, seed {seed}: sup ||e_i|| = {sup} > bound {bound}"
            );
        }
    }
    finish(
        "criterion 02 (theorem 1 bound, 3 thresholds x 20 seeds)",
        t0,
        30.0,
    );
}

/// Criterion 3: the benchmark certificate passes for all 16 subsets with the
/// published P; an open-loop-unstable scalar system fails at the empty set.
#[test]
fn acceptance_03_lemma1_certificate() {
    let t0 = Instant::now();

    let cs = builtin_benchmark().build().unwrap();
    let p = cs.lyapunov_p.clone().unwrap();
    let cert = analysis::check_lemma1(&cs.model, &cs.observer, &p).unwrap();
    assert_eq!(cert.checked_subsets, 16);
    assert!(
        cert.pass,
        "worst eigenvalue {}",
        cert.max_eigenvalue_over_subsets
    );

    let unstable = ebse::model::LtiModel::new(
        DMatrix::from_element(1, 1, 2.0),
        DMatrix::zeros(1, 0),
        DMatrix::identity(1, 1),
        vec![ebse::model::Block { start: 0, len: 1 }],
        vec![],
        1.0,
    )
    .unwrap();
    let gain = ObserverGain::new(&unstable, DMatrix::from_element(1, 1, 0.9)).unwrap();
    let cert2 =
        analysis::check_lemma1(&unstable, &gain, &DMatrix::from_element(1, 1, 5.0)).unwrap();
    assert!(!cert2.pass);
    assert_eq!(
        cert2.worst_subset,
        Vec::<usize>::new(),
        "must fail at the empty subset"
    );

    finish("criterion 03 (subset LMI certificate)", t0, 1.0);
}

/// Criterion 4: the multi-agent bound with the constructive inter-agent
/// constant holds under injected bounded disturbances for all 20 seeds.
#[test]
fn acceptance_04_theorem2_bound() {
    let t0 = Instant::now();
    let d_max = 0.005;

    let make = |seed: u64| {
        let mut s = benchmark_with_horizon(2000);
        s.run.control = false;
        s.run.input_mode = InputMode::Periodic;
        s.bus.drop_prob = 0.0;
        s.noise.v = NoiseSpec::StepSequence {
            dim: 4,
            windows: vec![StepWindow {
                start: 200,
                end: 1500,
                value: vec![0.002, 0.02, 0.0, 0.0],
            }],
        };
        s.injection.random = Some(ebse::agent::RandomDisturbance {
            d_max,
            seed: 0,
            agents: vec![],
        });
        s.analysis.d_max = Some(d_max);
        s.with_master_seed(seed)
    };

    let compiled = make(0).build().unwrap();
    let report = analysis::bound_report(&compiled).unwrap();
    assert!(report.certificate.as_ref().unwrap().pass);
    let bound = report.theorem2_e_max.unwrap();
    let e_max = report.inter_agent.as_ref().unwrap().e_max;
    assert!(e_max > 0.0 && bound.is_finite());

    for seed in 0..20u64 {
        let out = run(&make(seed)).unwrap();
        assert!(out.ok());
        let sup = out.trace.max_norm_e().into_iter().fold(0.0f64, f64::max);
        assert!(
            sup <= bound,
            "seed {seed}: sup ||e_i|| = {sup} > bound {bound}"
        );
        // The injected disturbances must respect their declared bound.
        for r in &out.trace.records {
            for d in &r.d_effective {
                assert!(d.norm() <= d_max + 1e-12);
            }
        }
    }
    finish("criterion 04 (theorem 2 bound, 20 seeds)", t0, 60.0);
}

/// Criterion 5: at every reset step all post-reset estimates are equal and
/// equal the pre-reset mean to 1e-12; for two agents the mean is preserved
/// exactly.
#[test]
fn acceptance_05_reset_correctness() {
    let t0 = Instant::now();

    let mut s = benchmark_with_horizon(200);
    s.run.reset_period = 7;
    s.bus.drop_prob = 0.15;
    s.noise.v = NoiseSpec::StepSequence {
        dim: 4,
        windows: vec![StepWindow {
            start: 10,
            end: 190,
            value: vec![0.002, 0.02, 0.0, 0.0],
        }],
    };
    let out = run(&s).unwrap();
    assert!(out.ok());

    let mut resets = 0;
    for r in &out.trace.records {
        if r.step == 0 || r.step % 7 != 0 {
            continue;
        }
        resets += 1;
        // Pre-reset estimates are the control-time values of the same step.
        let n = r.x_hat[0].len();
        let mut mean = DVector::zeros(n);
        for pre in &r.x_hat_ctrl {
            mean += pre;
        }
        mean /= r.x_hat_ctrl.len() as f64;

        for (a, post) in r.x_hat.iter().enumerate() {
            assert_eq!(
                post, &r.x_hat[0],
                "step {}: post-reset estimates differ",
                r.step
            );
            let err = (post - &mean).norm();
            assert!(
                err <= 1e-12,
                "step {}, agent {a}: |post - mean| = {err}",
                r.step
            );
        }
        // Two agents: the mean is preserved exactly.
        let mean_after = (&r.x_hat[0] + &r.x_hat[1]) / 2.0;
        let mean_before = (&r.x_hat_ctrl[0] + &r.x_hat_ctrl[1]) / 2.0;
        assert_eq!(
            mean_after, mean_before,
            "step {}: mean not preserved",
            r.step
        );
    }
    assert!(resets >= 20);

    // Direct property over randomized estimate sets.
    for case in 0..200u64 {
        let n = 1 + (case % 5) as usize;
        let agents = 2 + (case % 4) as usize;
        let mut estimates: Vec<DVector<f64>> = (0..agents)
            .map(|a| {
                DVector::from_fn(n, |i, _| {
                    ebse::rng::uniform01(case, ebse::rng::Channel::Injection, a, i as u64) * 10.0
                        - 5.0
                })
            })
            .collect();
        let mut mean_before = DVector::zeros(n);
        for e in &estimates {
            mean_before += e;
        }
        mean_before /= agents as f64;
        let assigned = ebse::agent::synchronous_reset(&mut estimates);
        for e in &estimates {
            assert_eq!(e, &assigned);
        }
        assert!((assigned - &mean_before).norm() <= 1e-12 * mean_before.norm().max(1.0));
    }

    finish("criterion 05 (synchronous reset)", t0, 1.0);
}

/// Criterion 6: the inter-agent error recursion, recomputed from the trace
/// with the subset matrices, matches the simulation at every step of a lossy
/// run.
#[test]
fn acceptance_06_inter_agent_recursion() {
    let t0 = Instant::now();

    let mut s = benchmark_with_horizon(1000);
    s.run.control = false;
    s.run.input_mode = InputMode::Periodic;
    s.noise.v = NoiseSpec::StepSequence {
        dim: 4,
        windows: vec![StepWindow {
            start: 50,
            end: 950,
            value: vec![0.002, 0.02, 0.001, 0.01],
        }],
    };
    let cs = s.build().unwrap();
    let out = ebse::sim::run_compiled(&cs).unwrap();
    assert!(out.ok());
    assert!(out.bus_log.dropped > 0, "run must actually lose packets");

    for k in 1..out.trace.records.len() {
        let prev = &out.trace.records[k - 1];
        let cur = &out.trace.records[k];
        let transmitting: Vec<usize> = cur
            .sensor_triggers
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(|(l, _)| l)
            .collect();
        let a_tilde = analysis::subset_matrix(&cs.model, &cs.observer, &transmitting).unwrap();
        let e_prev = &prev.x_hat[0] - &prev.x_hat[1];
        let expected = a_tilde * e_prev + &cur.d_effective[0] - &cur.d_effective[1];
        let actual = &cur.x_hat[0] - &cur.x_hat[1];
        let err = (actual - expected).norm();
        assert!(err <= 1e-10, "step {k}: recursion residual {err}");
    }

    finish(
        "criterion 06 (inter-agent recursion, 10^3 lossy steps)",
        t0,
        5.0,
    );
}

/// Criterion 7: the closed-loop state decomposition holds at every step with
/// control enabled, and the pure stable recursion decays when undisturbed.
#[test]
fn acceptance_07_closed_loop_recursion() {
    let t0 = Instant::now();

    let mut s = benchmark_with_horizon(1000);
    s.noise.v = NoiseSpec::StepSequence {
        dim: 4,
        windows: vec![StepWindow {
            start: 50,
            end: 500,
            value: vec![0.002, 0.02, 0.0, 0.0],
        }],
    };
    let cs = s.build().unwrap();
    let out = ebse::sim::run_compiled(&cs).unwrap();
    assert!(out.ok());
    let report = analysis::closed_loop_check(&cs, &out.trace).unwrap();
    assert!(report.pass, "max residual {}", report.max_residual);
    assert!(report.spectral_radius < 1.0);

    // Perfect-information, noise-free variant from a nonzero state: the
    // state follows the stable closed-loop recursion and decays.
    let mut s2 = benchmark_with_horizon(1500);
    s2.triggers.delta_est = vec![0.0; 4];
    s2.bus.drop_prob = 0.0;
    s2.run.input_mode = InputMode::Periodic;
    s2.noise.v = NoiseSpec::Zero { dim: 4 };
    s2.noise.w = NoiseSpec::Zero { dim: 4 };
    s2.run.x0 = Some(vec![0.05, 0.5, -0.05, -0.5]);
    s2.run.xhat0 = Some(vec![0.05, 0.5, -0.05, -0.5]);
    let cs2 = s2.build().unwrap();
    let out2 = ebse::sim::run_compiled(&cs2).unwrap();
    assert!(out2.ok());
    let report2 = analysis::closed_loop_check(&cs2, &out2.trace).unwrap();
    assert!(report2.pass);
    let final_norm = out2.trace.records.last().unwrap().x.norm();
    assert!(final_norm < 1e-6, "state did not decay: {final_norm}");

    finish("criterion 07 (closed-loop recursion)", t0, 5.0);
}

/// Criterion 8: qualitative reproduction of the benchmark behavior:
/// (a) communication concentrates in disturbance windows, (b) the overall
/// sensor rate stays below one half, (c) drop-induced jumps in the
/// inter-agent error decay within 50 steps, (d) states stay bounded and
/// re-converge after the windows.
#[test]
fn acceptance_08_benchmark_qualitative() {
    let t0 = Instant::now();

    let s = builtin_benchmark();
    let windows = [(1500usize, 2500usize), (4000, 5000), (6500, 7500)];
    let out = run(&s).unwrap();
    assert!(out.ok());

    // (a) mean sensor rate inside windows at least twice the outside rate.
    let in_window = |k: usize| windows.iter().any(|&(a, b)| k >= a && k < b);
    let (mut fires_in, mut steps_in, mut fires_out, mut steps_out) =
        (0usize, 0usize, 0usize, 0usize);
    for r in out.trace.records.iter().skip(1) {
        let fires = r.sensor_triggers.iter().filter(|&&f| f).count();
        if in_window(r.step) {
            fires_in += fires;
            steps_in += r.sensor_triggers.len();
        } else {
            fires_out += fires;
            steps_out += r.sensor_triggers.len();
        }
    }
    let rate_in = fires_in as f64 / steps_in as f64;
    let rate_out = fires_out as f64 / steps_out as f64;
    assert!(
        rate_in >= 2.0 * rate_out,
        "in-window rate {rate_in} not >= 2x outside rate {rate_out}"
    );

    // (b) substantial reduction vs. periodic communication.
    assert!(
        out.rates.sensor_average < 0.5,
        "sensor average {}",
        out.rates.sensor_average
    );

    // (c) jumps at drop steps followed by envelope decay. A drop event
    // qualifies as a jump when the inter-agent error rises by 20% over the
    // previous step and reaches 1.5x the trailing ambient level (median of
    // the previous 100 steps); it decays when the error returns to
    // max(half the post-jump value, 1.2x ambient) within 50 steps.
    let e12: Vec<f64> = out
        .trace
        .records
        .iter()
        .map(|r| r.norm_e_pairs[0])
        .collect();
    let mut drop_steps: Vec<usize> = out
        .bus_log
        .events
        .iter()
        .filter(|e| {
            e.fate == ebse::bus::Fate::Dropped && e.kind == ebse::bus::FrameKind::Measurement
        })
        .map(|e| e.step)
        .collect();
    drop_steps.sort_unstable();
    drop_steps.dedup();

    let median = |window: &[f64]| {
        let mut v = window.to_vec();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v[v.len() / 2]
    };
    let mut jumps = 0usize;
    let mut decayed = 0usize;
    for &k in &drop_steps {
        if k < 101 || k + 50 >= e12.len() {
            continue;
        }
        let ambient = median(&e12[k - 100..k]);
        if e12[k] < 1.2 * e12[k - 1] || e12[k] < 1.5 * ambient {
            continue;
        }
        jumps += 1;
        let target = (0.5 * e12[k]).max(1.2 * ambient);
        let min_after = e12[k + 1..=k + 50]
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_after <= target {
            decayed += 1;
        }
    }
    assert!(
        jumps >= 10,
        "need at least 10 drop-induced jumps, saw {jumps}"
    );
    let frac = decayed as f64 / jumps as f64;
    assert!(
        frac >= 0.9,
        "only {decayed}/{jumps} = {frac:.3} of jumps decayed"
    );

    // (d) bounded states that re-converge after the last window.
    let norms: Vec<f64> = out.trace.records.iter().map(|r| r.x.norm()).collect();
    let peak = norms.iter().copied().fold(0.0f64, f64::max);
    assert!(peak.is_finite() && peak < 10.0, "peak ||x|| = {peak}");
    let tail = &norms[norms.len() - 250..];
    let tail_mean = tail.iter().sum::<f64>() / tail.len() as f64;
    assert!(
        tail_mean < 0.05 * peak,
        "tail mean {tail_mean} vs peak {peak}"
    );

    println!(
        "  rates: in-window {rate_in:.3}, outside {rate_out:.5}, overall {:.3}; \
         jumps {jumps}, decayed {decayed}",
        out.rates.sensor_average
    );
    finish(
        "criterion 08 (benchmark qualitative reproduction)",
        t0,
        60.0,
    );
}

/// Criterion 9: the norm of the Monte-Carlo mean estimation error stays
/// within the stochastic bound plus three standard errors at every step.
#[test]
fn acceptance_09_stochastic_mean_bound() {
    let t0 = Instant::now();
    let horizon = 300;
    let seeds = 500usize;
    let delta = 0.1;

    let compiled = single_link_scenario(delta, 10, 0).build().unwrap();
    let report = analysis::bound_report(&compiled).unwrap();
    let e_i_max = report.theorem1_e_max;

    // eps[k][s] = estimation error of the estimator agent at step k, seed s.
    let mut eps: Vec<Vec<DVector<f64>>> = vec![Vec::with_capacity(seeds); horizon + 1];
    for seed in 0..seeds {
        let s = single_link_scenario(delta, horizon, 40_000 + seed as u64);
        let out = run(&s).unwrap();
        for (k, r) in out.trace.records.iter().enumerate() {
            eps[k].push(&r.x - &r.x_hat[1]);
        }
    }

    for (k, errs) in eps.iter().enumerate() {
        let n = errs[0].len();
        let mut mean = DVector::zeros(n);
        for e in errs {
            mean += e;
        }
        mean /= seeds as f64;
        let var: f64 =
            errs.iter().map(|e| (e - &mean).norm_squared()).sum::<f64>() / (seeds - 1) as f64;
        let tol = 3.0 * var.sqrt() / (seeds as f64).sqrt();
        let norm_mean = mean.norm();
        assert!(
            norm_mean <= e_i_max + tol,
            "step {k}: ||mean eps|| = {norm_mean} > {e_i_max} + {tol}"
        );
    }

    finish("criterion 09 (stochastic mean bound, 500 seeds)", t0, 120.0);
}

/// Criterion 10: repeated runs with identical flags produce byte-identical
/// CSV output.
#[test]
fn acceptance_10_determinism() {
    let t0 = Instant::now();
    let bin = env!("CARGO_BIN_EXE_ebse");

    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [&dir_a, &dir_b] {
        let status = std::process::Command::new(bin)
            .args([
                "benchmark",
                "--seed",
                "42",
                "--horizon",
                "2000",
                "--format",
                "both",
                "--out-dir",
            ])
            .arg(dir.path())
            .status()
            .unwrap();
        assert!(status.success());
    }
    for file in ["trace.csv", "rates.csv", "bus_log.csv", "run_summary.json"] {
        let a = std::fs::read(dir_a.path().join(file)).unwrap();
        let b = std::fs::read(dir_b.path().join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical runs");
    }

    // Different seeds must actually change the realization.
    let dir_c = tempfile::tempdir().unwrap();
    let status = std::process::Command::new(bin)
        .args([
            "benchmark",
            "--seed",
            "43",
            "--horizon",
            "2000",
            "--format",
            "csv",
            "--out-dir",
        ])
        .arg(dir_c.path())
        .status()
        .unwrap();
    assert!(status.success());
    let a = std::fs::read(dir_a.path().join("trace.csv")).unwrap();
    let c = std::fs::read(dir_c.path().join("trace.csv")).unwrap();
    assert_ne!(a, c);

    finish("criterion 10 (byte-identical reruns)", t0, 120.0);
}

/// The deterministic estimation-error bound of the uniform-noise corollary,
/// checked on simulated runs (supporting example for the bound operations).
#[test]
fn corollary_bound_holds_on_uniform_noise_runs() {
    let t0 = Instant::now();
    let mut s = benchmark_with_horizon(2000);
    s.run.control = false;
    s.run.input_mode = InputMode::Periodic;
    s.bus.drop_prob = 0.0;
    s.noise.v = NoiseSpec::Uniform {
        half_widths: vec![1e-3, 1e-2, 1e-3, 1e-2],
        seed: 0,
    };

    let compiled = s.build().unwrap();
    let report = analysis::bound_report(&compiled).unwrap();
    let bound = report.epsilon_bound.unwrap();

    for seed in 0..5u64 {
        let out = run(&s.clone().with_master_seed(seed)).unwrap();
        let sup = out
            .trace
            .max_estimation_error()
            .into_iter()
            .fold(0.0f64, f64::max);
        assert!(sup <= bound, "seed {seed}: sup ||eps_i|| = {sup} > {bound}");
    }
    finish("corollary bound (uniform noise)", t0, 30.0);
}
