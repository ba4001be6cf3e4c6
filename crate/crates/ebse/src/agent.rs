//! One distributed agent: prediction, subset-fusion update, synchronous
//! reset participation, state-feedback control, and input estimation.
//!
//! Every agent (sensor, estimator, or combined) replicates the same observer
//! structure; they differ only in which sensor channels they own and whether
//! they compute an input block. Updates fuse whatever measurement frames the
//! bus delivered:
//!
//! ```text
//! x_filt = x_pred + sum over delivered channels of L_l (y_l - C_l x_pred) + d_i
//! ```
//!
//! so a step with nothing delivered and no disturbance keeps the prediction.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::model::LtiModel;
use crate::observer::{ControllerGain, ObserverGain};
use crate::rng::{self, Channel};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentRole {
    Sensor,
    Estimator,
    Combined,
}

/// Runtime state of one agent.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentState {
    pub id: usize,
    pub role: AgentRole,
    /// Sensor channels this agent owns (indices into the sensor partition).
    pub sensor_channels: Vec<usize>,
    /// Input group this agent computes, if any.
    pub input_group: Option<usize>,
    pub x_pred: DVector<f64>,
    pub x_filt: DVector<f64>,
    /// Estimate of the full input vector u(k).
    pub u_hat: DVector<f64>,
    /// Last input block this agent broadcast (send-on-delta reference).
    pub u_last: Option<DVector<f64>>,
}

impl AgentState {
    pub fn new(
        model: &LtiModel,
        id: usize,
        role: AgentRole,
        sensor_channels: Vec<usize>,
        input_group: Option<usize>,
        x0: &DVector<f64>,
    ) -> Self {
        let u_last = input_group.map(|g| DVector::zeros(model.input_partition[g].len));
        Self {
            id,
            role,
            sensor_channels,
            input_group,
            x_pred: x0.clone(),
            x_filt: x0.clone(),
            u_hat: DVector::zeros(model.input_dim()),
            u_last,
        }
    }
}

/// Prediction step. `u_source` is the true input (known-input operation) or
/// the agent's own input estimate from the previous step (event-triggered
/// input operation).
pub fn agent_predict(
    model: &LtiModel,
    state: &AgentState,
    u_source: &DVector<f64>,
) -> Result<DVector<f64>> {
    if u_source.len() != model.input_dim() {
        return Err(Error::DimensionMismatch {
            context: "agent_predict input",
            expected: model.input_dim().to_string(),
            actual: u_source.len().to_string(),
        });
    }
    Ok(&model.a * &state.x_filt + &model.b * u_source)
}

/// Fusion update with the delivered measurement frames plus the estimator
/// disturbance d_i. `delivered` holds `(channel, y_channel)` pairs.
pub fn agent_update(
    model: &LtiModel,
    gain: &ObserverGain,
    x_pred: &DVector<f64>,
    delivered: &[(usize, DVector<f64>)],
    d_i: &DVector<f64>,
) -> Result<DVector<f64>> {
    if d_i.len() != model.state_dim() {
        return Err(Error::DimensionMismatch {
            context: "agent_update disturbance",
            expected: model.state_dim().to_string(),
            actual: d_i.len().to_string(),
        });
    }
    let mut seen = vec![false; model.num_sensors()];
    let mut x_filt = x_pred + d_i;
    for (channel, y_l) in delivered {
        if *channel >= model.num_sensors() {
            return Err(Error::InvalidScenario(format!(
                "delivered frame names sensor channel {channel} but model has {}",
                model.num_sensors()
            )));
        }
        if seen[*channel] {
            return Err(Error::InvalidScenario(format!(
                "duplicate sensor channel {channel} in delivered set"
            )));
        }
        seen[*channel] = true;
        let l_block = gain.block(model, *channel);
        let c_block = model.sensor_rows(*channel);
        x_filt += l_block * (y_l - c_block * x_pred);
    }
    Ok(x_filt)
}

/// Synchronous averaging reset: replace every estimate by the joint mean.
/// Returns the mean that was assigned.
pub fn synchronous_reset(estimates: &mut [DVector<f64>]) -> DVector<f64> {
    let n = estimates[0].len();
    let mut sum = DVector::zeros(n);
    for e in estimates.iter() {
        sum += e;
    }
    let mean = sum / estimates.len() as f64;
    for e in estimates.iter_mut() {
        e.copy_from(&mean);
    }
    mean
}

/// u_i = F_i x_filt for the agent's input group.
pub fn compute_control(
    model: &LtiModel,
    gain: &ControllerGain,
    state: &AgentState,
) -> Result<DVector<f64>> {
    let group = state.input_group.ok_or_else(|| {
        Error::InvalidScenario(format!(
            "agent {} has no input group (role mismatch)",
            state.id
        ))
    })?;
    let f_block = gain.block(model, group);
    Ok(f_block * &state.x_filt)
}

/// Replace blocks of the agent's input estimate with freshly delivered input
/// frames; the agent's own block is always its own computed input.
pub fn update_input_estimate(
    model: &LtiModel,
    state: &mut AgentState,
    delivered_inputs: &[(usize, DVector<f64>)],
    own_input: Option<&DVector<f64>>,
) {
    for (group, u_j) in delivered_inputs {
        let b = model.input_partition[*group];
        state.u_hat.rows_mut(b.start, b.len).copy_from(u_j);
    }
    if let (Some(group), Some(u_own)) = (state.input_group, own_input) {
        let b = model.input_partition[group];
        state.u_hat.rows_mut(b.start, b.len).copy_from(u_own);
    }
}

/// Estimator disturbance injection: scheduled vectors plus an optional
/// bounded random component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct DisturbanceInjection {
    /// Explicit (step, agent, vector) entries.
    #[serde(default)]
    pub schedule: Vec<ScheduledDisturbance>,
    /// Random per-step disturbance with a guaranteed Euclidean norm bound.
    #[serde(default)]
    pub random: Option<RandomDisturbance>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduledDisturbance {
    pub step: usize,
    pub agent: usize,
    pub value: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomDisturbance {
    /// Bound on the Euclidean norm of every injected vector.
    pub d_max: f64,
    pub seed: u64,
    /// Agents the random injection applies to (empty = all).
    #[serde(default)]
    pub agents: Vec<usize>,
}

impl DisturbanceInjection {
    pub fn is_empty(&self) -> bool {
        self.schedule.is_empty() && self.random.is_none()
    }

    pub fn validate(&self, n: usize, num_agents: usize) -> Result<()> {
        for (i, s) in self.schedule.iter().enumerate() {
            if s.value.len() != n {
                return Err(Error::InvalidScenario(format!(
                    "injection entry {i} has dimension {} but state dimension is {n}",
                    s.value.len()
                )));
            }
            if s.agent >= num_agents {
                return Err(Error::InvalidScenario(format!(
                    "injection entry {i} names agent {} but there are {num_agents} agents",
                    s.agent
                )));
            }
        }
        if let Some(r) = &self.random {
            if !(r.d_max.is_finite() && r.d_max >= 0.0) {
                return Err(Error::InvalidScenario(
                    "random injection bound must be finite and nonnegative".to_string(),
                ));
            }
            if let Some(&a) = r.agents.iter().find(|&&a| a >= num_agents) {
                return Err(Error::InvalidScenario(format!(
                    "random injection names agent {a} but there are {num_agents} agents"
                )));
            }
        }
        Ok(())
    }

    /// d_i(k) for the given agent and step. The random component draws each
    /// element uniformly from ±d_max/sqrt(n), which keeps the Euclidean norm
    /// within d_max.
    pub fn sample(&self, n: usize, agent: usize, step: usize) -> DVector<f64> {
        let mut d = DVector::zeros(n);
        for s in &self.schedule {
            if s.step == step && s.agent == agent {
                for (i, v) in s.value.iter().enumerate() {
                    d[i] += v;
                }
            }
        }
        if let Some(r) = &self.random {
            if r.agents.is_empty() || r.agents.contains(&agent) {
                let half = r.d_max / (n as f64).sqrt();
                for i in 0..n {
                    d[i] += rng::uniform_symmetric(
                        r.seed,
                        Channel::Injection,
                        step,
                        (agent * n + i) as u64,
                        half,
                    );
                }
            }
        }
        d
    }
}
