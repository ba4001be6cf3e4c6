//! Common-bus broadcast simulation.
//!
//! Every transmitted frame reaches every agent, except where the drop model
//! says otherwise. A sender always keeps its own frame (local knowledge is
//! never lost), and exempt frame kinds are always delivered. Drop fates are
//! a pure function of `(seed, step, frame identity, receiver)`, so replaying
//! a scenario reproduces the identical loss pattern.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::rng::{self, Channel};

/// What a frame carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameKind {
    Measurement,
    Input,
    ResetEstimate,
}

impl FrameKind {
    fn code(self) -> u64 {
        match self {
            FrameKind::Measurement => 0,
            FrameKind::Input => 1,
            FrameKind::ResetEstimate => 2,
        }
    }
}

/// One broadcast message.
///
/// `unit` identifies the logical channel within the kind: the sensor channel
/// for measurements, the input group for inputs, the sender agent for resets.
#[derive(Debug, Clone, PartialEq)]
pub struct BusFrame {
    pub kind: FrameKind,
    pub sender: usize,
    pub unit: usize,
    pub payload: DVector<f64>,
    pub step: usize,
}

/// Drop process configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DropScope {
    /// Each receiver flips its own coin per frame.
    PerReceiver,
    /// One coin per frame; all remote receivers share the fate.
    PerFrame,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DropModel {
    /// Probability that a non-exempt frame is lost. 0 disables drops.
    pub drop_prob: f64,
    #[serde(default = "default_scope")]
    pub scope: DropScope,
    pub seed: u64,
    /// Frame kinds that are never dropped.
    #[serde(default)]
    pub exempt_kinds: Vec<FrameKind>,
}

fn default_scope() -> DropScope {
    DropScope::PerReceiver
}

impl DropModel {
    pub fn none() -> Self {
        Self {
            drop_prob: 0.0,
            scope: DropScope::PerReceiver,
            seed: 0,
            exempt_kinds: vec![],
        }
    }

    pub fn validate(&self) -> crate::Result<()> {
        if !(0.0..=1.0).contains(&self.drop_prob) {
            return Err(crate::Error::InvalidScenario(format!(
                "drop probability {} outside [0, 1]",
                self.drop_prob
            )));
        }
        Ok(())
    }

    fn is_exempt(&self, kind: FrameKind) -> bool {
        self.exempt_kinds.contains(&kind)
    }

    /// Whether `frame` is dropped at `receiver` on `step`. Deterministic.
    pub fn dropped(&self, frame: &BusFrame, receiver: usize, step: usize) -> bool {
        if self.drop_prob <= 0.0 || self.is_exempt(frame.kind) || receiver == frame.sender {
            return false;
        }
        let key = match self.scope {
            DropScope::PerReceiver => {
                vec![frame.kind.code(), frame.unit as u64, receiver as u64]
            }
            DropScope::PerFrame => vec![frame.kind.code(), frame.unit as u64],
        };
        rng::event_coin(self.seed, Channel::Drop, step, &key, self.drop_prob)
    }
}

/// Delivery fate of one (frame, receiver) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fate {
    Delivered,
    Dropped,
}

/// Record of one (frame, receiver) outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct BusEvent {
    pub step: usize,
    pub kind: FrameKind,
    pub sender: usize,
    pub unit: usize,
    pub receiver: usize,
    pub fate: Fate,
}

/// Cumulative log of all bus activity in a run.
#[derive(Debug, Clone, Default)]
pub struct BusLog {
    pub events: Vec<BusEvent>,
    pub offered: usize,
    pub delivered: usize,
    pub dropped: usize,
    /// Steps where the offered frame count exceeded the configured capacity.
    pub capacity_violations: Vec<CapacityViolation>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityViolation {
    pub step: usize,
    pub offered: usize,
    pub capacity: usize,
}

/// Broadcast `frames` to all `receivers` and log the fates.
/// Returns, per receiver, the frames that arrived (sender included).
pub fn broadcast(
    frames: &[BusFrame],
    receivers: &[usize],
    drop_model: &DropModel,
    step: usize,
    log: &mut BusLog,
) -> Vec<Vec<BusFrame>> {
    let mut delivered: Vec<Vec<BusFrame>> = vec![Vec::new(); receivers.len()];
    for frame in frames {
        log.offered += 1;
        for (slot, &receiver) in receivers.iter().enumerate() {
            let fate = if drop_model.dropped(frame, receiver, step) {
                log.dropped += 1;
                Fate::Dropped
            } else {
                log.delivered += 1;
                delivered[slot].push(frame.clone());
                Fate::Delivered
            };
            log.events.push(BusEvent {
                step,
                kind: frame.kind,
                sender: frame.sender,
                unit: frame.unit,
                receiver,
                fate,
            });
        }
    }
    delivered
}

/// Flag steps where the bus would be oversubscribed. Diagnostic only: the
/// simulation proceeds regardless.
pub fn capacity_check(
    frames_this_step: usize,
    max_per_step: usize,
    step: usize,
    log: &mut BusLog,
) -> bool {
    if frames_this_step > max_per_step {
        log.capacity_violations.push(CapacityViolation {
            step,
            offered: frames_this_step,
            capacity: max_per_step,
        });
        false
    } else {
        true
    }
}
