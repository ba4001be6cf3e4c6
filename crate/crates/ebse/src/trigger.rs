//! Event-trigger predicates.
//!
//! Measurements use an innovation trigger: transmit when the norm of the
//! difference between the local measurement and its prediction reaches the
//! threshold. Inputs use send-on-delta: broadcast when the computed input has
//! moved far enough from the last broadcast value. Both comparisons are
//! closed (`>=`), so a zero threshold fires on every step.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Vector norm used by trigger comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TriggerNorm {
    #[default]
    Two,
    Inf,
}

impl TriggerNorm {
    pub fn eval(self, v: &DVector<f64>) -> f64 {
        match self {
            TriggerNorm::Two => v.norm(),
            TriggerNorm::Inf => v.amax(),
        }
    }
}

/// Per-sensor innovation thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementTriggerConfig {
    /// One threshold per sensor channel; `inf` disables the channel.
    pub delta_est: Vec<f64>,
    #[serde(default)]
    pub norm: TriggerNorm,
}

impl MeasurementTriggerConfig {
    pub fn validate(&self, num_sensors: usize) -> Result<()> {
        if self.delta_est.len() != num_sensors {
            return Err(Error::InvalidScenario(format!(
                "{} measurement thresholds given but model has {num_sensors} sensor channels",
                self.delta_est.len()
            )));
        }
        if self.delta_est.iter().any(|d| d.is_nan() || *d < 0.0) {
            return Err(Error::InvalidScenario(
                "measurement thresholds must be nonnegative".to_string(),
            ));
        }
        Ok(())
    }
}

/// Per-input-group send-on-delta thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputTriggerConfig {
    /// One threshold per input group; `inf` disables broadcasting.
    pub delta_ctrl: Vec<f64>,
    #[serde(default)]
    pub norm: TriggerNorm,
}

impl InputTriggerConfig {
    pub fn validate(&self, num_groups: usize) -> Result<()> {
        if self.delta_ctrl.len() != num_groups {
            return Err(Error::InvalidScenario(format!(
                "{} input thresholds given but model has {num_groups} input groups",
                self.delta_ctrl.len()
            )));
        }
        if self.delta_ctrl.iter().any(|d| d.is_nan() || *d < 0.0) {
            return Err(Error::InvalidScenario(
                "input thresholds must be nonnegative".to_string(),
            ));
        }
        Ok(())
    }
}

/// Innovation trigger: transmit iff ||y_i - y_pred_i|| >= delta_i.
pub fn measurement_trigger(
    y_i: &DVector<f64>,
    y_pred_i: &DVector<f64>,
    delta_i: f64,
    norm: TriggerNorm,
) -> bool {
    norm.eval(&(y_i - y_pred_i)) >= delta_i
}

/// Send-on-delta input trigger: broadcast iff ||u_i - u_last_i|| >= delta.
/// On `true` the caller must record `u_i` as the new last-broadcast value.
pub fn input_trigger(
    u_i: &DVector<f64>,
    u_last_i: &DVector<f64>,
    delta_ctrl_i: f64,
    norm: TriggerNorm,
) -> bool {
    norm.eval(&(u_i - u_last_i)) >= delta_ctrl_i
}

/// Split per-sensor decisions into the transmitting set I and its complement.
/// Indices are zero-based channel indices.
pub fn triggered_set(decisions: &[bool]) -> (Vec<usize>, Vec<usize>) {
    let mut transmitting = Vec::new();
    let mut silent = Vec::new();
    for (i, &d) in decisions.iter().enumerate() {
        if d {
            transmitting.push(i);
        } else {
            silent.push(i);
        }
    }
    (transmitting, silent)
}
