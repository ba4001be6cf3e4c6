//! The simulation loop.
//!
//! Each step runs the same phase order:
//!
//! 1. advance the true process and measure;
//! 2. all agents predict (true input or their own input estimate);
//! 3. sensor channels evaluate innovation triggers on the owner's prediction;
//! 4. measurement frames are broadcast over the bus (drops applied);
//! 5. all agents fuse whatever arrived, plus any injected disturbance;
//! 6. estimator agents compute controls; input triggers fire and input
//!    frames are broadcast (consumed by next step's predictions);
//! 7. on reset steps, all estimates are replaced by their joint average.
//!
//! The centralized reference estimator is co-simulated with full measurement
//! access and the true input; it is the comparison baseline and not
//! available to any agent. Internal recursion identities for the
//! centralized-difference and inter-agent errors are re-derived and checked
//! every step; violations are reported as anomalies and fail the run.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::agent::{self, AgentState};
use crate::bus::{self, BusFrame, BusLog, FrameKind};
use crate::model::{measure, sample_noise, step_process};
use crate::observer::{central_predict, central_update, CentralEstimate};
use crate::rng::Channel;
use crate::scenario::{CompiledScenario, InputMode, Scenario};
use crate::trigger::{input_trigger, measurement_trigger, triggered_set};
use crate::Result;

/// Tolerance for the per-step recursion identity checks.
const RECURSION_TOL: f64 = 1e-10;

/// Everything recorded about one time step.
#[derive(Debug, Clone)]
pub struct StepRecord {
    pub step: usize,
    /// True state x(k).
    pub x: DVector<f64>,
    /// Process disturbance v(k-1) applied entering this step (zero at k=0).
    pub v_prev: DVector<f64>,
    /// Input u(k) applied by the agents at this step.
    pub u_applied: DVector<f64>,
    /// Centralized reference estimate (filtered).
    pub x_central: DVector<f64>,
    /// Per-agent predictions x_i(k|k-1).
    pub x_pred: Vec<DVector<f64>>,
    /// Per-agent filtered estimates (after any reset).
    pub x_hat: Vec<DVector<f64>>,
    /// Per-agent estimates at control time (before any reset this step).
    pub x_hat_ctrl: Vec<DVector<f64>>,
    /// Per-channel measurement trigger decisions.
    pub sensor_triggers: Vec<bool>,
    /// Per-group input trigger decisions (event mode).
    pub input_triggers: Vec<bool>,
    /// Effective estimator disturbance d_i per agent: injected plus the
    /// equivalent of dropped frames.
    pub d_effective: Vec<DVector<f64>>,
    /// ||x_central - x_hat_i|| per agent.
    pub norm_e: Vec<f64>,
    /// ||x_hat_i - x_hat_j|| per configured trace pair.
    pub norm_e_pairs: Vec<f64>,
}

/// Time-indexed record of a complete run.
#[derive(Debug, Clone)]
pub struct RunTrace {
    pub records: Vec<StepRecord>,
    pub trace_pairs: Vec<(usize, usize)>,
    pub num_sensors: usize,
    pub num_input_groups: usize,
    pub state_dim: usize,
    pub input_dim: usize,
}

impl RunTrace {
    pub fn horizon(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    /// Largest ||x_central - x_hat_i|| over the whole run, per agent.
    pub fn max_norm_e(&self) -> Vec<f64> {
        let agents = self.records[0].x_hat.len();
        let mut out = vec![0.0f64; agents];
        for r in &self.records {
            for (a, &v) in r.norm_e.iter().enumerate() {
                out[a] = out[a].max(v);
            }
        }
        out
    }

    /// Largest ||x(k) - x_hat_i(k)|| (true estimation error), per agent.
    pub fn max_estimation_error(&self) -> Vec<f64> {
        let agents = self.records[0].x_hat.len();
        let mut out = vec![0.0f64; agents];
        for r in &self.records {
            for (a, slot) in out.iter_mut().enumerate() {
                *slot = slot.max((&r.x - &r.x_hat[a]).norm());
            }
        }
        out
    }
}

/// One violated internal identity.
#[derive(Debug, Clone, Serialize)]
pub struct Anomaly {
    pub step: usize,
    pub what: String,
    pub magnitude: f64,
}

/// Moving-average and overall rate for one communication channel.
#[derive(Debug, Clone, Serialize)]
pub struct ChannelRates {
    pub name: String,
    /// Moving average over the configured window, one value per step.
    pub moving_avg: Vec<f64>,
    /// Total transmissions / steps.
    pub average: f64,
}

/// Communication-rate report: per sensor channel and per input group.
/// Rates count steps 1..=horizon; the step-0 initial record is excluded.
#[derive(Debug, Clone, Serialize)]
pub struct CommRateReport {
    pub window: usize,
    pub steps: usize,
    pub sensors: Vec<ChannelRates>,
    pub inputs: Vec<ChannelRates>,
    /// Mean over sensor channels of their average rates
    /// (= total sensor transmissions / (channels * steps)).
    pub sensor_average: f64,
    /// Mean over input groups (1.0 in periodic mode; empty = 0).
    pub input_average: f64,
    /// Mean over all reported channels.
    pub overall_average: f64,
    /// 1 - overall_average.
    pub reduction: f64,
}

/// Output of one simulation run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub trace: RunTrace,
    pub rates: CommRateReport,
    pub bus_log: BusLog,
    pub anomalies: Vec<Anomaly>,
}

impl RunOutput {
    pub fn ok(&self) -> bool {
        self.anomalies.is_empty()
    }
}

/// Run a scenario end to end.
pub fn run(scenario: &Scenario) -> Result<RunOutput> {
    run_compiled(&scenario.build()?)
}

/// Run an already-compiled scenario.
pub fn run_compiled(cs: &CompiledScenario) -> Result<RunOutput> {
    let model = &cs.model;
    let n = model.state_dim();
    let q = model.input_dim();
    let num_sensors = model.num_sensors();
    let num_groups = model.num_input_groups();
    let num_agents = cs.agents.len();
    let horizon = cs.scenario.run.horizon;
    let control_on = cs.scenario.run.control;
    let event_inputs = cs.scenario.run.input_mode == InputMode::Event;
    let reset_period = cs.scenario.run.reset_period;

    // Channel -> owning agent map.
    let mut channel_owner = vec![0usize; num_sensors];
    for (a, layout) in cs.agents.iter().enumerate() {
        for &s in &layout.sensors {
            channel_owner[s] = a;
        }
    }
    // Input group -> owning agent map.
    let mut group_owner = vec![None::<usize>; num_groups];
    for (a, layout) in cs.agents.iter().enumerate() {
        if let Some(g) = layout.input {
            group_owner[g] = Some(a);
        }
    }

    let i_lc = DMatrix::identity(n, n) - &cs.observer.l * &model.c;

    let mut agents: Vec<AgentState> = cs
        .agents
        .iter()
        .enumerate()
        .map(|(id, layout)| {
            AgentState::new(
                model,
                id,
                layout.role,
                layout.sensors.clone(),
                layout.input,
                &cs.xhat0,
            )
        })
        .collect();
    // Step-0 disturbances shift the initial estimates, which is how unequal
    // initialization is expressed.
    let d_init: Vec<DVector<f64>> = (0..num_agents).map(|a| cs.injection_sample(a, 0)).collect();
    for (a, d0) in agents.iter_mut().zip(&d_init) {
        a.x_filt += d0;
        a.x_pred += d0;
    }
    let mut central = CentralEstimate::new(cs.xhat0.clone());
    let mut x_true = cs.x0.clone();

    let mut bus_log = BusLog::default();
    let mut anomalies: Vec<Anomaly> = Vec::new();
    let mut records: Vec<StepRecord> = Vec::with_capacity(horizon + 1);
    let mut sensor_fires: Vec<Vec<bool>> = vec![Vec::with_capacity(horizon); num_sensors];
    let mut input_fires: Vec<Vec<bool>> = vec![Vec::with_capacity(horizon); num_groups];

    let all_agent_ids: Vec<usize> = (0..num_agents).collect();

    // Step 0: initial condition only. Controls are computed so u(0) exists
    // for the first prediction; no measurement is processed.
    let mut u_applied = DVector::zeros(q);
    let mut step0_input_triggers = vec![false; num_groups];
    if control_on {
        let (u, fires) = control_phase(
            cs,
            &mut agents,
            &group_owner,
            event_inputs,
            0,
            &mut bus_log,
            &all_agent_ids,
        )?;
        u_applied = u;
        step0_input_triggers = fires;
    }

    let x_hat_ctrl0: Vec<DVector<f64>> = agents.iter().map(|a| a.x_filt.clone()).collect();
    records.push(make_record(
        0,
        &x_true,
        DVector::zeros(n),
        u_applied.clone(),
        &central,
        &agents,
        x_hat_ctrl0,
        vec![false; num_sensors],
        step0_input_triggers,
        d_init,
        &cs.trace_pairs,
    ));

    for k in 1..=horizon {
        // Phase 0: process advances with the previously applied input.
        let v_prev = sample_noise(&cs.scenario.noise.v, Channel::ProcessNoise, k - 1);
        x_true = step_process(model, &x_true, &u_applied, &v_prev)?;
        let w_k = sample_noise(&cs.scenario.noise.w, Channel::MeasurementNoise, k);
        let y = measure(model, &x_true, &w_k)?;

        // Errors entering this step (post-reset values of k-1).
        let e_prev: Vec<DVector<f64>> =
            agents.iter().map(|a| &central.x_filt - &a.x_filt).collect();
        let e_pair_prev: Vec<DVector<f64>> = cs
            .trace_pairs
            .iter()
            .map(|&(i, j)| &agents[i].x_filt - &agents[j].x_filt)
            .collect();
        let u_hat_prev: Vec<DVector<f64>> = agents.iter().map(|a| a.u_hat.clone()).collect();

        // Centralized reference: full measurement access, true input.
        central.x_pred = central_predict(model, &central, &u_applied)?;
        central.x_filt = central_update(model, &cs.observer, &central.x_pred, &y)?;

        // Phase 1: agent predictions.
        for a in agents.iter_mut() {
            let u_source = if event_inputs { &a.u_hat } else { &u_applied };
            a.x_pred = agent::agent_predict(model, a, u_source)?;
        }

        // Phase 2: innovation triggers on the owners' local predictions.
        let mut decisions = vec![false; num_sensors];
        let mut innovations: Vec<DVector<f64>> = Vec::with_capacity(num_sensors);
        for l in 0..num_sensors {
            let owner = &agents[channel_owner[l]];
            let y_l = model.measurement_of_sensor(&y, l);
            let y_pred = model.sensor_rows(l) * &owner.x_pred;
            let innov = &y_l - &y_pred;
            decisions[l] = measurement_trigger(
                &y_l,
                &y_pred,
                cs.measurement_triggers.delta_est[l],
                cs.measurement_triggers.norm,
            );
            innovations.push(innov);
        }
        let (transmitting, silent) = triggered_set(&decisions);

        // Non-triggered innovations must sit below their thresholds.
        for &l in &silent {
            let nv = cs.measurement_triggers.norm.eval(&innovations[l]);
            if nv >= cs.measurement_triggers.delta_est[l] {
                anomalies.push(Anomaly {
                    step: k,
                    what: format!("silent channel {l} has innovation {nv} >= threshold"),
                    magnitude: nv,
                });
            }
        }
        for (l, fires) in sensor_fires.iter_mut().enumerate() {
            fires.push(decisions[l]);
        }

        // Phase 3: broadcast measurement frames.
        let frames: Vec<BusFrame> = transmitting
            .iter()
            .map(|&l| BusFrame {
                kind: FrameKind::Measurement,
                sender: channel_owner[l],
                unit: l,
                payload: model.measurement_of_sensor(&y, l),
                step: k,
            })
            .collect();
        if let Some(cap) = cs.capacity {
            bus::capacity_check(frames.len(), cap, k, &mut bus_log);
        }
        let delivered = bus::broadcast(&frames, &all_agent_ids, &cs.drop_model, k, &mut bus_log);

        // Phase 4: fusion updates with the delivered frames.
        let mut d_effective: Vec<DVector<f64>> = Vec::with_capacity(num_agents);
        for (a_idx, a) in agents.iter_mut().enumerate() {
            let got: Vec<(usize, DVector<f64>)> = delivered[a_idx]
                .iter()
                .map(|f| (f.unit, f.payload.clone()))
                .collect();
            let d_inj = cs.injection_sample(a_idx, k);
            // Equivalent disturbance of the frames this agent missed.
            let mut d_drop = DVector::zeros(n);
            let got_units: Vec<usize> = got.iter().map(|(u, _)| *u).collect();
            for &l in &transmitting {
                if !got_units.contains(&l) {
                    let y_l = model.measurement_of_sensor(&y, l);
                    let innov_at_a = y_l - model.sensor_rows(l) * &a.x_pred;
                    d_drop -= cs.observer.block(model, l) * innov_at_a;
                }
            }
            a.x_filt = agent::agent_update(model, &cs.observer, &a.x_pred, &got, &d_inj)?;
            d_effective.push(d_inj + d_drop);
        }

        // Recursion identity: centralized difference, per agent.
        for (a_idx, a) in agents.iter().enumerate() {
            let u_mismatch = if event_inputs {
                &u_applied - &u_hat_prev[a_idx]
            } else {
                DVector::zeros(q)
            };
            let mut expected = &i_lc * (&model.a * &e_prev[a_idx] + &model.b * u_mismatch);
            for &l in &silent {
                let y_l = model.measurement_of_sensor(&y, l);
                let innov_at_a = y_l - model.sensor_rows(l) * &a.x_pred;
                expected += cs.observer.block(model, l) * innov_at_a;
            }
            expected -= &d_effective[a_idx];
            let actual = &central.x_filt - &a.x_filt;
            let err = (&actual - &expected).norm();
            let scale = actual.norm().max(1.0);
            if err > RECURSION_TOL * scale {
                anomalies.push(Anomaly {
                    step: k,
                    what: format!("centralized-difference recursion violated for agent {a_idx}"),
                    magnitude: err,
                });
            }
        }

        // Recursion identity: inter-agent difference, per trace pair.
        let mut lc_sum = DMatrix::zeros(n, n);
        for &l in &transmitting {
            lc_sum += cs.observer.block(model, l) * model.sensor_rows(l);
        }
        let i_lc_active = DMatrix::identity(n, n) - lc_sum;
        let a_tilde_i = &i_lc_active * &model.a;
        for (p_idx, &(i, j)) in cs.trace_pairs.iter().enumerate() {
            let mut expected = &a_tilde_i * &e_pair_prev[p_idx];
            if event_inputs {
                let du = &u_hat_prev[i] - &u_hat_prev[j];
                expected += &i_lc_active * (&model.b * du);
            }
            expected += &d_effective[i] - &d_effective[j];
            let actual = &agents[i].x_filt - &agents[j].x_filt;
            let err = (&actual - &expected).norm();
            let scale = actual.norm().max(1.0);
            if err > RECURSION_TOL * scale {
                anomalies.push(Anomaly {
                    step: k,
                    what: format!("inter-agent recursion violated for pair ({i}, {j})"),
                    magnitude: err,
                });
            }
        }

        // Phases 5 and 6: controls and event-triggered input exchange.
        let mut step_input_triggers = vec![false; num_groups];
        if control_on {
            let (u, fires) = control_phase(
                cs,
                &mut agents,
                &group_owner,
                event_inputs,
                k,
                &mut bus_log,
                &all_agent_ids,
            )?;
            u_applied = u;
            step_input_triggers = fires;
        } else {
            u_applied = DVector::zeros(q);
        }
        for (g, fires) in input_fires.iter_mut().enumerate() {
            fires.push(step_input_triggers[g]);
        }

        // Event-input invariant: while input frames can never be lost, every
        // agent's estimate of each block stays within the trigger threshold.
        if control_on && event_inputs && input_frames_never_lost(cs) {
            for a in &agents {
                for g in 0..num_groups {
                    let blk = model.input_partition[g];
                    let err_block =
                        u_applied.rows(blk.start, blk.len) - a.u_hat.rows(blk.start, blk.len);
                    let nv = cs.input_triggers.norm.eval(&err_block.into_owned());
                    if nv >= cs.input_triggers.delta_ctrl[g] && nv > 0.0 {
                        anomalies.push(Anomaly {
                            step: k,
                            what: format!(
                                "agent {} input-estimate error {nv} for group {g} reached threshold",
                                a.id
                            ),
                            magnitude: nv,
                        });
                    }
                }
            }
        }

        let x_hat_ctrl: Vec<DVector<f64>> = agents.iter().map(|a| a.x_filt.clone()).collect();

        // Phase 7: synchronous reset.
        if reset_period > 0 && k % reset_period == 0 {
            let mut estimates: Vec<DVector<f64>> =
                agents.iter().map(|a| a.x_filt.clone()).collect();
            // Reset frames are never lost; log them for rate accounting.
            let reset_frames: Vec<BusFrame> = agents
                .iter()
                .map(|a| BusFrame {
                    kind: FrameKind::ResetEstimate,
                    sender: a.id,
                    unit: a.id,
                    payload: a.x_filt.clone(),
                    step: k,
                })
                .collect();
            if let Some(cap) = cs.capacity {
                bus::capacity_check(reset_frames.len(), cap, k, &mut bus_log);
            }
            let exempt_all = crate::bus::DropModel {
                drop_prob: 0.0,
                ..cs.drop_model.clone()
            };
            bus::broadcast(&reset_frames, &all_agent_ids, &exempt_all, k, &mut bus_log);
            agent::synchronous_reset(&mut estimates);
            for (a, e) in agents.iter_mut().zip(estimates) {
                a.x_filt = e;
            }
        }

        records.push(make_record(
            k,
            &x_true,
            v_prev,
            u_applied.clone(),
            &central,
            &agents,
            x_hat_ctrl,
            decisions,
            step_input_triggers,
            d_effective,
            &cs.trace_pairs,
        ));
    }

    let trace = RunTrace {
        records,
        trace_pairs: cs.trace_pairs.clone(),
        num_sensors,
        num_input_groups: num_groups,
        state_dim: n,
        input_dim: q,
    };
    let rates = compute_rates(
        &sensor_fires,
        &input_fires,
        control_on,
        event_inputs,
        horizon,
        cs.scenario.run.rate_window,
    );

    Ok(RunOutput {
        trace,
        rates,
        bus_log,
        anomalies,
    })
}

fn input_frames_never_lost(cs: &CompiledScenario) -> bool {
    cs.drop_model.drop_prob == 0.0 || cs.drop_model.exempt_kinds.contains(&FrameKind::Input)
}

/// Phases 5 and 6: compute controls, evaluate input triggers, broadcast
/// input frames, refresh input estimates. Returns the applied input and the
/// per-group trigger decisions.
#[allow(clippy::too_many_arguments)]
fn control_phase(
    cs: &CompiledScenario,
    agents: &mut [AgentState],
    group_owner: &[Option<usize>],
    event_inputs: bool,
    step: usize,
    bus_log: &mut BusLog,
    all_agent_ids: &[usize],
) -> Result<(DVector<f64>, Vec<bool>)> {
    let model = &cs.model;
    let controller = cs
        .controller
        .as_ref()
        .expect("control phase requires a controller");
    let q = model.input_dim();
    let num_groups = model.num_input_groups();

    let mut u_true = DVector::zeros(q);
    let mut own_inputs: Vec<Option<DVector<f64>>> = vec![None; agents.len()];
    let mut fires = vec![false; num_groups];
    let mut frames: Vec<BusFrame> = Vec::new();

    for (g, owner) in group_owner.iter().enumerate() {
        let Some(owner) = *owner else { continue };
        let u_g = agent::compute_control(model, controller, &agents[owner])?;
        let blk = model.input_partition[g];
        u_true.rows_mut(blk.start, blk.len).copy_from(&u_g);

        if event_inputs {
            let u_last = agents[owner]
                .u_last
                .as_ref()
                .expect("owner has an input group");
            if input_trigger(
                &u_g,
                u_last,
                cs.input_triggers.delta_ctrl[g],
                cs.input_triggers.norm,
            ) {
                fires[g] = true;
                agents[owner].u_last = Some(u_g.clone());
                frames.push(BusFrame {
                    kind: FrameKind::Input,
                    sender: owner,
                    unit: g,
                    payload: u_g.clone(),
                    step,
                });
            }
        }
        own_inputs[owner] = Some(u_g);
    }

    if event_inputs {
        let delivered = bus::broadcast(&frames, all_agent_ids, &cs.drop_model, step, bus_log);
        for (a_idx, a) in agents.iter_mut().enumerate() {
            let got: Vec<(usize, DVector<f64>)> = delivered[a_idx]
                .iter()
                .map(|f| (f.unit, f.payload.clone()))
                .collect();
            agent::update_input_estimate(model, a, &got, own_inputs[a_idx].as_ref());
        }
    } else {
        // Periodic exchange: everyone knows the true input.
        for (a_idx, a) in agents.iter_mut().enumerate() {
            a.u_hat.copy_from(&u_true);
            if let Some(u_own) = &own_inputs[a_idx] {
                if let Some(g) = a.input_group {
                    let blk = model.input_partition[g];
                    a.u_hat.rows_mut(blk.start, blk.len).copy_from(u_own);
                }
            }
        }
    }

    Ok((u_true, fires))
}

#[allow(clippy::too_many_arguments)]
fn make_record(
    step: usize,
    x: &DVector<f64>,
    v_prev: DVector<f64>,
    u_applied: DVector<f64>,
    central: &CentralEstimate,
    agents: &[AgentState],
    x_hat_ctrl: Vec<DVector<f64>>,
    sensor_triggers: Vec<bool>,
    input_triggers: Vec<bool>,
    d_effective: Vec<DVector<f64>>,
    trace_pairs: &[(usize, usize)],
) -> StepRecord {
    let norm_e = agents
        .iter()
        .map(|a| (&central.x_filt - &a.x_filt).norm())
        .collect();
    let norm_e_pairs = trace_pairs
        .iter()
        .map(|&(i, j)| (&agents[i].x_filt - &agents[j].x_filt).norm())
        .collect();
    StepRecord {
        step,
        x: x.clone(),
        v_prev,
        u_applied,
        x_central: central.x_filt.clone(),
        x_pred: agents.iter().map(|a| a.x_pred.clone()).collect(),
        x_hat: agents.iter().map(|a| a.x_filt.clone()).collect(),
        x_hat_ctrl,
        sensor_triggers,
        input_triggers,
        d_effective,
        norm_e,
        norm_e_pairs,
    }
}

fn moving_average(fires: &[bool], window: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(fires.len());
    let mut sum = 0usize;
    for (k, &f) in fires.iter().enumerate() {
        sum += f as usize;
        if k >= window {
            sum -= fires[k - window] as usize;
        }
        let span = (k + 1).min(window);
        out.push(sum as f64 / span as f64);
    }
    out
}

fn compute_rates(
    sensor_fires: &[Vec<bool>],
    input_fires: &[Vec<bool>],
    control_on: bool,
    event_inputs: bool,
    steps: usize,
    window: usize,
) -> CommRateReport {
    let sensors: Vec<ChannelRates> = sensor_fires
        .iter()
        .enumerate()
        .map(|(l, fires)| ChannelRates {
            name: format!("y{l}"),
            moving_avg: moving_average(fires, window),
            average: fires.iter().filter(|&&f| f).count() as f64 / steps as f64,
        })
        .collect();

    let inputs: Vec<ChannelRates> = if control_on {
        input_fires
            .iter()
            .enumerate()
            .map(|(g, fires)| {
                if event_inputs {
                    ChannelRates {
                        name: format!("u{g}"),
                        moving_avg: moving_average(fires, window),
                        average: fires.iter().filter(|&&f| f).count() as f64 / steps as f64,
                    }
                } else {
                    ChannelRates {
                        name: format!("u{g}"),
                        moving_avg: vec![1.0; steps],
                        average: 1.0,
                    }
                }
            })
            .collect()
    } else {
        vec![]
    };

    let sensor_total: usize = sensor_fires
        .iter()
        .map(|f| f.iter().filter(|&&x| x).count())
        .sum();
    let sensor_average = sensor_total as f64 / (sensor_fires.len() * steps) as f64;
    let input_average = if inputs.is_empty() {
        0.0
    } else {
        inputs.iter().map(|c| c.average).sum::<f64>() / inputs.len() as f64
    };
    let channel_count = sensors.len() + inputs.len();
    let overall_average = (sensors.iter().map(|c| c.average).sum::<f64>()
        + inputs.iter().map(|c| c.average).sum::<f64>())
        / channel_count as f64;

    CommRateReport {
        window,
        steps,
        sensors,
        inputs,
        sensor_average,
        input_average,
        overall_average,
        reduction: 1.0 - overall_average,
    }
}

impl CompiledScenario {
    fn injection_sample(&self, agent: usize, step: usize) -> DVector<f64> {
        self.scenario
            .injection
            .sample(self.model.state_dim(), agent, step)
    }
}
