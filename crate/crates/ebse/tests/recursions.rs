//! Trace-level oracle for the centralized-difference error decomposition.
//!
//! The difference e_i(k) between the centralized estimate and agent i's
//! estimate must satisfy, step by step,
//!
//! ```text
//! e_i(k) = (I - L C) A e_i(k-1)
//!        + sum over silent channels l of L_l (y_l(k) - C_l x_pred_owner(l))
//!        - d_i(k)
//!        - sum over silent channels l of L_l C_l A e_{i,owner(l)}(k-1)
//! ```
//!
//! Everything on the right is reconstructed from the recorded trace, the
//! deterministic noise streams, and the model alone; the simulator's own
//! internal quantities are not consulted.

use nalgebra::{DMatrix, DVector};

use ebse::model::{sample_noise, NoiseSpec, StepWindow};
use ebse::rng::Channel;
use ebse::scenario::{builtin_benchmark, InputMode};
use ebse::sim::run_compiled;

#[test]
fn centralized_difference_decomposition_holds_on_lossy_run() {
    let mut s = builtin_benchmark();
    s.run.horizon = 800;
    s.run.control = false;
    s.run.input_mode = InputMode::Periodic;
    s.bus.drop_prob = 0.1;
    s.noise.v = NoiseSpec::StepSequence {
        dim: 4,
        windows: vec![StepWindow {
            start: 40,
            end: 760,
            value: vec![0.002, 0.02, 0.001, 0.01],
        }],
    };
    let cs = s.build().unwrap();
    let out = run_compiled(&cs).unwrap();
    assert!(out.ok());
    assert!(out.bus_log.dropped > 0);

    let model = &cs.model;
    let n = model.state_dim();
    let i_lc_a = (DMatrix::identity(n, n) - &cs.observer.l * &model.c) * &model.a;

    // Channel -> owning agent.
    let mut owner = vec![0usize; model.num_sensors()];
    for (a, layout) in cs.agents.iter().enumerate() {
        for &l in &layout.sensors {
            owner[l] = a;
        }
    }

    for k in 1..out.trace.records.len() {
        let prev = &out.trace.records[k - 1];
        let cur = &out.trace.records[k];

        // Reconstruct the measurement and the owners' predictions.
        let w_k = sample_noise(&cs.scenario.noise.w, Channel::MeasurementNoise, k);
        let y = &model.c * &cur.x + w_k;
        let preds: Vec<DVector<f64>> = cs
            .agents
            .iter()
            .enumerate()
            .map(|(a, _)| &model.a * &prev.x_hat[a] + &model.b * &prev.u_applied)
            .collect();

        for (a_idx, _) in cs.agents.iter().enumerate() {
            let e_prev = &prev.x_central - &prev.x_hat[a_idx];
            let mut expected = &i_lc_a * e_prev;
            for (l, &fired) in cur.sensor_triggers.iter().enumerate() {
                if fired {
                    continue;
                }
                let c_l = model.sensor_rows(l);
                let l_l = cs.observer.block(model, l);
                let y_l = model.measurement_of_sensor(&y, l);
                let innovation_at_owner = y_l - &c_l * &preds[owner[l]];
                expected += &l_l * innovation_at_owner;
                let e_pair_prev = &prev.x_hat[a_idx] - &prev.x_hat[owner[l]];
                expected -= l_l * c_l * &model.a * e_pair_prev;
            }
            expected -= &cur.d_effective[a_idx];

            let actual = &cur.x_central - &cur.x_hat[a_idx];
            let err = (&actual - &expected).norm();
            assert!(err <= 1e-10, "step {k}, agent {a_idx}: residual {err}");
        }
    }
}
