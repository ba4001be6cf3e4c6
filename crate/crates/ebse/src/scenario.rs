//! Scenario definition, file I/O, and the built-in two-tank benchmark.
//!
//! Scenario files are TOML with matrices written as row lists. The schema is
//! documented in `docs/scenario-format.md`. Loading validates everything
//! eagerly and errors name the offending field.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::agent::{AgentRole, DisturbanceInjection};
use crate::bus::{DropModel, DropScope, FrameKind};
use crate::model::{Block, LtiModel, NoiseSpec, StepWindow};
use crate::observer::{design_kalman_gain, design_lqr_gain, ControllerGain, ObserverGain};
use crate::trigger::{InputTriggerConfig, MeasurementTriggerConfig, TriggerNorm};
use crate::{Error, Result};

pub const SCENARIO_SCHEMA_VERSION: u32 = 1;

/// Matrix literal: list of rows.
pub type MatrixSpec = Vec<Vec<f64>>;

fn to_matrix(spec: &MatrixSpec, what: &str) -> Result<DMatrix<f64>> {
    if spec.is_empty() || spec[0].is_empty() {
        return Err(Error::InvalidScenario(format!(
            "{what} must be a nonempty matrix"
        )));
    }
    let cols = spec[0].len();
    for (i, row) in spec.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::InvalidScenario(format!(
                "{what} row {i} has {} entries, expected {cols}",
                row.len()
            )));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidScenario(format!(
                "{what} row {i} has a non-finite entry"
            )));
        }
    }
    Ok(DMatrix::from_fn(spec.len(), cols, |r, c| spec[r][c]))
}

/// Render a matrix back into the row-list literal form.
pub fn from_matrix(m: &DMatrix<f64>) -> MatrixSpec {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
        .collect()
}

fn blocks_from_sizes(sizes: &[usize]) -> Vec<Block> {
    let mut out = Vec::with_capacity(sizes.len());
    let mut start = 0;
    for &len in sizes {
        out.push(Block { start, len });
        start += len;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub a: MatrixSpec,
    pub b: MatrixSpec,
    pub c: MatrixSpec,
    /// Rows of C per sensor channel.
    pub sensor_partition: Vec<usize>,
    /// Columns of B per input group.
    #[serde(default)]
    pub input_partition: Vec<usize>,
    /// Sampling time in seconds (metadata).
    pub ts: f64,
}

/// Observer gain: supplied verbatim or designed on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObserverGainSpec {
    Supplied { l: MatrixSpec },
    Kalman { q_diag: Vec<f64>, r_diag: Vec<f64> },
}

/// Controller gain: supplied verbatim or designed on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControllerGainSpec {
    Supplied {
        f: MatrixSpec,
    },
    Lqr {
        qx_diag: Vec<f64>,
        ru_diag: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainsSpec {
    pub observer: ObserverGainSpec,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub controller: Option<ControllerGainSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSection {
    pub v: NoiseSpec,
    pub w: NoiseSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BusSpec {
    #[serde(default)]
    pub drop_prob: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_scope")]
    pub scope: DropScope,
    #[serde(default)]
    pub exempt_kinds: Vec<FrameKind>,
    /// Max frames per step before a capacity violation is flagged.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub capacity: Option<usize>,
}

fn default_scope() -> DropScope {
    DropScope::PerReceiver
}

impl Default for BusSpec {
    fn default() -> Self {
        Self {
            drop_prob: 0.0,
            seed: 0,
            scope: DropScope::PerReceiver,
            exempt_kinds: vec![],
            capacity: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentSpec {
    pub role: AgentRole,
    #[serde(default)]
    pub sensors: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub input: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputMode {
    /// Every agent knows the true input each step (periodic exchange).
    #[default]
    Periodic,
    /// Inputs are broadcast via the send-on-delta trigger and estimated.
    Event,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub horizon: usize,
    /// Synchronous reset period K; 0 disables resetting.
    #[serde(default)]
    pub reset_period: usize,
    #[serde(default)]
    pub control: bool,
    #[serde(default)]
    pub input_mode: InputMode,
    /// Initial true state (defaults to zero).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub x0: Option<Vec<f64>>,
    /// Shared initial estimate for all agents and the central reference.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub xhat0: Option<Vec<f64>>,
    /// Agent pairs whose inter-agent error norm is traced.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trace_pairs: Option<Vec<(usize, usize)>>,
    /// Moving-average window for communication rates.
    #[serde(default = "default_rate_window")]
    pub rate_window: usize,
    /// Optional override of the certified decay rate rho.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rho: Option<f64>,
}

fn default_rate_window() -> usize {
    100
}

/// A complete, serializable scenario. `validate` / `build` turn it into the
/// typed objects the simulator consumes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub schema_version: u32,
    pub model: ModelSpec,
    pub noise: NoiseSection,
    pub gains: GainsSpec,
    pub triggers: TriggersSpec,
    #[serde(default)]
    pub bus: BusSpec,
    #[serde(default)]
    pub agents: Vec<AgentSpec>,
    #[serde(default, skip_serializing_if = "DisturbanceInjection::is_empty")]
    pub injection: DisturbanceInjection,
    #[serde(default, skip_serializing_if = "AnalysisSpec::is_empty")]
    pub analysis: AnalysisSpec,
    pub run: RunSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriggersSpec {
    pub delta_est: Vec<f64>,
    #[serde(default)]
    pub delta_ctrl: Vec<f64>,
    #[serde(default)]
    pub norm: TriggerNorm,
}

/// Optional certification inputs carried with a scenario.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AnalysisSpec {
    /// Candidate Lyapunov matrix for the subset certificate.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p: Option<MatrixSpec>,
    /// Known bound on the injected estimator disturbances.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub d_max: Option<f64>,
}

impl AnalysisSpec {
    fn is_empty(&self) -> bool {
        self.p.is_none() && self.d_max.is_none()
    }
}

/// Fully resolved scenario: model, gains, and agent layout constructed and
/// cross-checked.
#[derive(Debug, Clone)]
pub struct CompiledScenario {
    pub scenario: Scenario,
    pub model: LtiModel,
    pub observer: ObserverGain,
    pub controller: Option<ControllerGain>,
    pub measurement_triggers: MeasurementTriggerConfig,
    pub input_triggers: InputTriggerConfig,
    pub drop_model: DropModel,
    pub capacity: Option<usize>,
    pub agents: Vec<AgentLayout>,
    pub x0: DVector<f64>,
    pub xhat0: DVector<f64>,
    pub trace_pairs: Vec<(usize, usize)>,
    /// Candidate Lyapunov matrix for certification, when supplied.
    pub lyapunov_p: Option<DMatrix<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentLayout {
    pub role: AgentRole,
    pub sensors: Vec<usize>,
    pub input: Option<usize>,
}

impl Scenario {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let scenario: Scenario = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        scenario.build()?;
        Ok(scenario)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_toml_string()?)?;
        Ok(())
    }

    /// Derive all component seeds from one master seed, leaving everything
    /// else untouched. Tags keep the derived streams distinct.
    pub fn with_master_seed(mut self, master: u64) -> Self {
        fn derive(master: u64, tag: u64) -> u64 {
            // splitmix64 finalizer
            let mut z = master ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^ (z >> 31)
        }
        match &mut self.noise.v {
            NoiseSpec::Uniform { seed, .. } | NoiseSpec::Gaussian { seed, .. } => {
                *seed = derive(master, 1)
            }
            _ => {}
        }
        match &mut self.noise.w {
            NoiseSpec::Uniform { seed, .. } | NoiseSpec::Gaussian { seed, .. } => {
                *seed = derive(master, 2)
            }
            _ => {}
        }
        self.bus.seed = derive(master, 3);
        if let Some(r) = &mut self.injection.random {
            r.seed = derive(master, 4);
        }
        self
    }

    /// Validate and resolve everything. Errors name the offending field.
    pub fn build(&self) -> Result<CompiledScenario> {
        if self.schema_version != SCENARIO_SCHEMA_VERSION {
            return Err(Error::InvalidScenario(format!(
                "schema_version {} not supported (this build reads {SCENARIO_SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let a = to_matrix(&self.model.a, "model.a")?;
        let b = if self.model.b.is_empty() {
            DMatrix::zeros(a.nrows(), 0)
        } else {
            to_matrix(&self.model.b, "model.b")?
        };
        let c = to_matrix(&self.model.c, "model.c")?;
        let model = LtiModel::new(
            a,
            b,
            c,
            blocks_from_sizes(&self.model.sensor_partition),
            blocks_from_sizes(&self.model.input_partition),
            self.model.ts,
        )?;

        self.noise.v.validate()?;
        self.noise.w.validate()?;
        if self.noise.v.dim() != model.state_dim() {
            return Err(Error::InvalidScenario(format!(
                "noise.v has dimension {} but the state dimension is {}",
                self.noise.v.dim(),
                model.state_dim()
            )));
        }
        if self.noise.w.dim() != model.measurement_dim() {
            return Err(Error::InvalidScenario(format!(
                "noise.w has dimension {} but the measurement dimension is {}",
                self.noise.w.dim(),
                model.measurement_dim()
            )));
        }

        let observer = match &self.gains.observer {
            ObserverGainSpec::Supplied { l } => {
                ObserverGain::new(&model, to_matrix(l, "gains.l")?)?
            }
            ObserverGainSpec::Kalman { q_diag, r_diag } => {
                if q_diag.len() != model.state_dim() || r_diag.len() != model.measurement_dim() {
                    return Err(Error::InvalidScenario(
                        "kalman design diagonals must match state/measurement dimensions".into(),
                    ));
                }
                design_kalman_gain(
                    &model,
                    &DMatrix::from_diagonal(&DVector::from_row_slice(q_diag)),
                    &DMatrix::from_diagonal(&DVector::from_row_slice(r_diag)),
                )?
            }
        };

        let controller = match &self.gains.controller {
            None => None,
            Some(ControllerGainSpec::Supplied { f }) => {
                Some(ControllerGain::new(&model, to_matrix(f, "gains.f")?)?)
            }
            Some(ControllerGainSpec::Lqr { qx_diag, ru_diag }) => {
                if qx_diag.len() != model.state_dim() || ru_diag.len() != model.input_dim() {
                    return Err(Error::InvalidScenario(
                        "lqr design diagonals must match state/input dimensions".into(),
                    ));
                }
                Some(design_lqr_gain(
                    &model,
                    &DMatrix::from_diagonal(&DVector::from_row_slice(qx_diag)),
                    &DMatrix::from_diagonal(&DVector::from_row_slice(ru_diag)),
                )?)
            }
        };

        let measurement_triggers = MeasurementTriggerConfig {
            delta_est: self.triggers.delta_est.clone(),
            norm: self.triggers.norm,
        };
        measurement_triggers.validate(model.num_sensors())?;
        let input_triggers = InputTriggerConfig {
            delta_ctrl: if self.triggers.delta_ctrl.is_empty() && model.num_input_groups() > 0 {
                vec![f64::INFINITY; model.num_input_groups()]
            } else {
                self.triggers.delta_ctrl.clone()
            },
            norm: self.triggers.norm,
        };
        input_triggers.validate(model.num_input_groups())?;

        let drop_model = DropModel {
            drop_prob: self.bus.drop_prob,
            scope: self.bus.scope,
            seed: self.bus.seed,
            exempt_kinds: self.bus.exempt_kinds.clone(),
        };
        drop_model.validate()?;

        let agents = self.resolve_agents(&model)?;

        if self.run.control {
            if controller.is_none() {
                return Err(Error::InvalidScenario(
                    "run.control = true but no controller gain is given".into(),
                ));
            }
            // Every input group needs an owner when control is on.
            for g in 0..model.num_input_groups() {
                if !agents.iter().any(|a| a.input == Some(g)) {
                    return Err(Error::InvalidScenario(format!(
                        "input group {g} has no owning agent but control is enabled"
                    )));
                }
            }
        }

        self.injection.validate(model.state_dim(), agents.len())?;

        if self.run.horizon == 0 {
            return Err(Error::InvalidScenario("run.horizon must be >= 1".into()));
        }

        let x0 = match &self.run.x0 {
            Some(v) => {
                if v.len() != model.state_dim() {
                    return Err(Error::InvalidScenario(format!(
                        "run.x0 has dimension {} but the state dimension is {}",
                        v.len(),
                        model.state_dim()
                    )));
                }
                DVector::from_row_slice(v)
            }
            None => DVector::zeros(model.state_dim()),
        };
        let xhat0 = match &self.run.xhat0 {
            Some(v) => {
                if v.len() != model.state_dim() {
                    return Err(Error::InvalidScenario(format!(
                        "run.xhat0 has dimension {} but the state dimension is {}",
                        v.len(),
                        model.state_dim()
                    )));
                }
                DVector::from_row_slice(v)
            }
            None => DVector::zeros(model.state_dim()),
        };

        let trace_pairs = match &self.run.trace_pairs {
            Some(pairs) => {
                for &(i, j) in pairs {
                    if i >= agents.len() || j >= agents.len() || i == j {
                        return Err(Error::InvalidScenario(format!(
                            "trace pair ({i}, {j}) is not a valid pair of distinct agents"
                        )));
                    }
                }
                pairs.clone()
            }
            None => {
                if agents.len() >= 2 {
                    vec![(0, 1)]
                } else {
                    vec![]
                }
            }
        };

        let lyapunov_p = match &self.analysis.p {
            Some(spec) => {
                let p = to_matrix(spec, "analysis.p")?;
                if p.nrows() != model.state_dim() || p.ncols() != model.state_dim() {
                    return Err(Error::InvalidScenario(format!(
                        "analysis.p must be {n}x{n} where n = {n} is the state dimension",
                        n = model.state_dim()
                    )));
                }
                Some(p)
            }
            None => None,
        };

        Ok(CompiledScenario {
            scenario: self.clone(),
            model,
            observer,
            controller,
            measurement_triggers,
            input_triggers,
            drop_model,
            capacity: self.bus.capacity,
            agents,
            x0,
            xhat0,
            trace_pairs,
            lyapunov_p,
        })
    }

    /// Resolve the agent layout. When none is given, the default is one
    /// sensor agent per channel plus one estimator agent per input group
    /// (or a single monitoring estimator when there are no inputs).
    fn resolve_agents(&self, model: &LtiModel) -> Result<Vec<AgentLayout>> {
        if self.agents.is_empty() {
            let mut agents = Vec::new();
            for s in 0..model.num_sensors() {
                agents.push(AgentLayout {
                    role: AgentRole::Sensor,
                    sensors: vec![s],
                    input: None,
                });
            }
            if model.num_input_groups() > 0 {
                for g in 0..model.num_input_groups() {
                    agents.push(AgentLayout {
                        role: AgentRole::Estimator,
                        sensors: vec![],
                        input: Some(g),
                    });
                }
            } else {
                agents.push(AgentLayout {
                    role: AgentRole::Estimator,
                    sensors: vec![],
                    input: None,
                });
            }
            return Ok(agents);
        }

        let mut sensor_owner = vec![None::<usize>; model.num_sensors()];
        let mut input_owner = vec![None::<usize>; model.num_input_groups()];
        let mut agents = Vec::with_capacity(self.agents.len());
        for (idx, spec) in self.agents.iter().enumerate() {
            match spec.role {
                AgentRole::Sensor => {
                    if spec.sensors.is_empty() {
                        return Err(Error::InvalidScenario(format!(
                            "agent {idx} has role sensor but owns no sensor channels"
                        )));
                    }
                    if spec.input.is_some() {
                        return Err(Error::InvalidScenario(format!(
                            "agent {idx} has role sensor but owns an input group"
                        )));
                    }
                }
                AgentRole::Estimator => {
                    if !spec.sensors.is_empty() {
                        return Err(Error::InvalidScenario(format!(
                            "agent {idx} has role estimator but owns sensor channels"
                        )));
                    }
                }
                AgentRole::Combined => {
                    if spec.sensors.is_empty() || spec.input.is_none() {
                        return Err(Error::InvalidScenario(format!(
                            "agent {idx} has role combined but must own sensors and an input group"
                        )));
                    }
                }
            }
            for &s in &spec.sensors {
                if s >= model.num_sensors() {
                    return Err(Error::InvalidScenario(format!(
                        "agent {idx} names sensor channel {s} but the model has {}",
                        model.num_sensors()
                    )));
                }
                if let Some(prev) = sensor_owner[s] {
                    return Err(Error::InvalidScenario(format!(
                        "sensor channel {s} owned by both agent {prev} and agent {idx}"
                    )));
                }
                sensor_owner[s] = Some(idx);
            }
            if let Some(g) = spec.input {
                if g >= model.num_input_groups() {
                    return Err(Error::InvalidScenario(format!(
                        "agent {idx} names input group {g} but the model has {}",
                        model.num_input_groups()
                    )));
                }
                if let Some(prev) = input_owner[g] {
                    return Err(Error::InvalidScenario(format!(
                        "input group {g} owned by both agent {prev} and agent {idx}"
                    )));
                }
                input_owner[g] = Some(idx);
            }
            agents.push(AgentLayout {
                role: spec.role,
                sensors: spec.sensors.clone(),
                input: spec.input,
            });
        }
        if let Some(unowned) = sensor_owner.iter().position(|o| o.is_none()) {
            return Err(Error::InvalidScenario(format!(
                "sensor channel {unowned} has no owning agent"
            )));
        }
        Ok(agents)
    }
}

/// The built-in two-tank benchmark: 4 states (level and temperature per
/// tank), 4 sensor channels with individual triggering, two combined agents
/// each owning one tank's sensors and actuators.
///
/// The matrices are a surrogate two-tank model chosen in-repo: levels couple
/// through cross-flows and are unaffected by temperatures, temperatures are
/// driven by their own decay, heat exchange, and incoming flows. The numbers
/// are documented in `docs/scenario-format.md`.
pub fn builtin_benchmark() -> Scenario {
    let a = vec![
        vec![0.95, 0.0, 0.02, 0.0],
        vec![0.015, 0.90, 0.005, 0.03],
        vec![0.02, 0.0, 0.95, 0.0],
        vec![0.005, 0.03, 0.015, 0.90],
    ];
    let b = vec![
        vec![0.0015, 0.0, 0.0, 0.0],
        vec![0.0, -0.03, 0.0, 0.0],
        vec![0.0, 0.0, 0.0015, 0.0],
        vec![0.0, 0.0, 0.0, 0.03],
    ];
    let c = vec![
        vec![1.0, 0.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0, 0.0],
        vec![0.0, 0.0, 1.0, 0.0],
        vec![0.0, 0.0, 0.0, 1.0],
    ];

    Scenario {
        schema_version: SCENARIO_SCHEMA_VERSION,
        model: ModelSpec {
            a,
            b,
            c,
            sensor_partition: vec![1, 1, 1, 1],
            input_partition: vec![2, 2],
            ts: 0.2,
        },
        noise: NoiseSection {
            v: NoiseSpec::StepSequence {
                dim: 4,
                windows: vec![
                    StepWindow {
                        start: 1500,
                        end: 2500,
                        value: vec![0.002, 0.0, 0.0, 0.0],
                    },
                    StepWindow {
                        start: 4000,
                        end: 5000,
                        value: vec![0.0, 0.03, 0.0, 0.0],
                    },
                    StepWindow {
                        start: 6500,
                        end: 7500,
                        value: vec![0.0, 0.0, 0.0, 0.02],
                    },
                ],
            },
            w: NoiseSpec::Uniform {
                half_widths: vec![0.002, 0.05, 0.002, 0.05],
                seed: 2,
            },
        },
        gains: GainsSpec {
            observer: ObserverGainSpec::Supplied {
                l: vec![
                    vec![0.1, 0.0, 0.0, 0.0],
                    vec![0.0, 0.05, 0.0, 0.0],
                    vec![0.0, 0.0, 0.1, 0.0],
                    vec![0.0, 0.0, 0.0, 0.05],
                ],
            },
            controller: Some(ControllerGainSpec::Lqr {
                qx_diag: vec![100.0, 1.0, 100.0, 1.0],
                ru_diag: vec![1.0, 1.0, 1.0, 1.0],
            }),
        },
        triggers: TriggersSpec {
            delta_est: vec![0.01, 0.2, 0.01, 0.2],
            delta_ctrl: vec![0.02, 0.02],
            norm: TriggerNorm::Two,
        },
        bus: BusSpec {
            drop_prob: 0.05,
            seed: 3,
            scope: DropScope::PerReceiver,
            exempt_kinds: vec![FrameKind::Input, FrameKind::ResetEstimate],
            capacity: Some(8),
        },
        agents: vec![
            AgentSpec {
                role: AgentRole::Combined,
                sensors: vec![0, 1],
                input: Some(0),
            },
            AgentSpec {
                role: AgentRole::Combined,
                sensors: vec![2, 3],
                input: Some(1),
            },
        ],
        injection: DisturbanceInjection::default(),
        analysis: AnalysisSpec {
            p: Some(vec![
                vec![500.0, 0.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0, 0.0],
                vec![0.0, 0.0, 500.0, 0.0],
                vec![0.0, 0.0, 0.0, 1.0],
            ]),
            d_max: None,
        },
        run: RunSpec {
            horizon: 10_000,
            reset_period: 0,
            control: true,
            input_mode: InputMode::Event,
            x0: None,
            xhat0: None,
            trace_pairs: Some(vec![(0, 1)]),
            rate_window: 100,
            rho: None,
        },
    }
}
