//! Discrete-time LTI process model with per-sensor measurement partitions
//! and per-agent input partitions.
//!
//! The process is
//!
//! ```text
//! x(k) = A x(k-1) + B u(k-1) + v(k-1)
//! y(k) = C x(k) + w(k)
//! ```
//!
//! Rows of `C` are partitioned into sensor channels (the units that make
//! individual transmit decisions) and columns of `B` into input groups (the
//! blocks computed by individual estimator agents).

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::rng::{self, Channel};
use crate::{Error, Result};

/// A contiguous index range `[start, start + len)` into rows of C or
/// columns of B.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub start: usize,
    pub len: usize,
}

impl Block {
    pub fn end(&self) -> usize {
        self.start + self.len
    }
}

/// Discrete-time LTI model. `ts` is metadata only (seconds per step).
#[derive(Debug, Clone, PartialEq)]
pub struct LtiModel {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    /// Row ranges of C per sensor channel.
    pub sensor_partition: Vec<Block>,
    /// Column ranges of B per input group.
    pub input_partition: Vec<Block>,
    pub ts: f64,
}

fn check_partition(blocks: &[Block], total: usize, what: &str) -> Result<()> {
    if blocks.is_empty() {
        return Err(Error::InvalidScenario(format!("{what} partition is empty")));
    }
    let mut next = 0usize;
    for (i, b) in blocks.iter().enumerate() {
        if b.len == 0 {
            return Err(Error::InvalidScenario(format!(
                "{what} partition block {i} is empty"
            )));
        }
        if b.start != next {
            return Err(Error::InvalidScenario(format!(
                "{what} partition block {i} starts at index {} but {} expected \
                 (blocks must be contiguous and disjoint)",
                b.start, next
            )));
        }
        next = b.end();
    }
    if next != total {
        return Err(Error::InvalidScenario(format!(
            "{what} partition covers indices 0..{next} but 0..{total} required"
        )));
    }
    Ok(())
}

impl LtiModel {
    pub fn new(
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        c: DMatrix<f64>,
        sensor_partition: Vec<Block>,
        input_partition: Vec<Block>,
        ts: f64,
    ) -> Result<Self> {
        let n = a.nrows();
        if n == 0 || a.ncols() != n {
            return Err(Error::InvalidScenario(format!(
                "A must be square and nonempty, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        if b.nrows() != n {
            return Err(Error::InvalidScenario(format!(
                "B must have {n} rows, got {}",
                b.nrows()
            )));
        }
        if c.ncols() != n || c.nrows() == 0 {
            return Err(Error::InvalidScenario(format!(
                "C must be p x {n} with p >= 1, got {}x{}",
                c.nrows(),
                c.ncols()
            )));
        }
        check_partition(&sensor_partition, c.nrows(), "sensor")?;
        // Input partition may be empty only when B has no columns.
        if b.ncols() > 0 {
            check_partition(&input_partition, b.ncols(), "input")?;
        } else if !input_partition.is_empty() {
            return Err(Error::InvalidScenario(
                "input partition given but B has no columns".to_string(),
            ));
        }
        Ok(Self {
            a,
            b,
            c,
            sensor_partition,
            input_partition,
            ts,
        })
    }

    pub fn state_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.b.ncols()
    }

    pub fn measurement_dim(&self) -> usize {
        self.c.nrows()
    }

    /// Number of sensor channels (independent trigger units).
    pub fn num_sensors(&self) -> usize {
        self.sensor_partition.len()
    }

    /// Number of input groups.
    pub fn num_input_groups(&self) -> usize {
        self.input_partition.len()
    }

    /// C_i: the measurement rows of sensor channel `i`.
    pub fn sensor_rows(&self, i: usize) -> DMatrix<f64> {
        let b = self.sensor_partition[i];
        self.c.rows(b.start, b.len).into_owned()
    }

    /// B_i: the input columns of group `i`.
    pub fn input_cols(&self, i: usize) -> DMatrix<f64> {
        let b = self.input_partition[i];
        self.b.columns(b.start, b.len).into_owned()
    }

    /// y_i: slice of a full measurement vector for sensor channel `i`.
    pub fn measurement_of_sensor(&self, y: &DVector<f64>, i: usize) -> DVector<f64> {
        let b = self.sensor_partition[i];
        y.rows(b.start, b.len).into_owned()
    }
}

/// One process step: `A x + B u + v`.
pub fn step_process(
    model: &LtiModel,
    x_prev: &DVector<f64>,
    u_prev: &DVector<f64>,
    v_prev: &DVector<f64>,
) -> Result<DVector<f64>> {
    let n = model.state_dim();
    if x_prev.len() != n {
        return Err(Error::DimensionMismatch {
            context: "step_process state",
            expected: n.to_string(),
            actual: x_prev.len().to_string(),
        });
    }
    if u_prev.len() != model.input_dim() {
        return Err(Error::DimensionMismatch {
            context: "step_process input",
            expected: model.input_dim().to_string(),
            actual: u_prev.len().to_string(),
        });
    }
    if v_prev.len() != n {
        return Err(Error::DimensionMismatch {
            context: "step_process disturbance",
            expected: n.to_string(),
            actual: v_prev.len().to_string(),
        });
    }
    Ok(&model.a * x_prev + &model.b * u_prev + v_prev)
}

/// Measurement: `C x + w`.
pub fn measure(model: &LtiModel, x: &DVector<f64>, w: &DVector<f64>) -> Result<DVector<f64>> {
    if x.len() != model.state_dim() {
        return Err(Error::DimensionMismatch {
            context: "measure state",
            expected: model.state_dim().to_string(),
            actual: x.len().to_string(),
        });
    }
    if w.len() != model.measurement_dim() {
        return Err(Error::DimensionMismatch {
            context: "measure noise",
            expected: model.measurement_dim().to_string(),
            actual: w.len().to_string(),
        });
    }
    Ok(&model.c * x + w)
}

/// A disturbance window: constant vector added on steps in `[start, end)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepWindow {
    pub start: usize,
    pub end: usize,
    pub value: Vec<f64>,
}

/// Noise realization recipe for one signal (v or w).
///
/// All kinds are deterministic given `(seed, step)`; draws are counter-based
/// so they do not depend on how many other signals are sampled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseSpec {
    /// Identically zero.
    Zero { dim: usize },
    /// Per-component uniform on [-half_width_i, half_width_i].
    Uniform { half_widths: Vec<f64>, seed: u64 },
    /// Per-component zero-mean Gaussian with the given variances.
    Gaussian { variances: Vec<f64>, seed: u64 },
    /// Sum of constant windows; zero outside every window.
    StepSequence {
        dim: usize,
        windows: Vec<StepWindow>,
    },
}

impl NoiseSpec {
    pub fn dim(&self) -> usize {
        match self {
            NoiseSpec::Zero { dim } => *dim,
            NoiseSpec::Uniform { half_widths, .. } => half_widths.len(),
            NoiseSpec::Gaussian { variances, .. } => variances.len(),
            NoiseSpec::StepSequence { dim, .. } => *dim,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            NoiseSpec::Zero { dim } => {
                if *dim == 0 {
                    return Err(Error::InvalidScenario("noise dimension 0".into()));
                }
            }
            NoiseSpec::Uniform { half_widths, .. } => {
                if half_widths.is_empty() {
                    return Err(Error::InvalidScenario("noise dimension 0".into()));
                }
                if half_widths.iter().any(|h| !h.is_finite() || *h < 0.0) {
                    return Err(Error::InvalidScenario(
                        "uniform noise bounds must be finite and nonnegative".into(),
                    ));
                }
            }
            NoiseSpec::Gaussian { variances, .. } => {
                if variances.is_empty() {
                    return Err(Error::InvalidScenario("noise dimension 0".into()));
                }
                if variances.iter().any(|v| !v.is_finite() || *v < 0.0) {
                    return Err(Error::InvalidScenario(
                        "gaussian variances must be finite and nonnegative".into(),
                    ));
                }
            }
            NoiseSpec::StepSequence { dim, windows } => {
                if *dim == 0 {
                    return Err(Error::InvalidScenario("noise dimension 0".into()));
                }
                for (i, w) in windows.iter().enumerate() {
                    if w.value.len() != *dim {
                        return Err(Error::InvalidScenario(format!(
                            "step window {i} has vector of length {} but dimension {dim} required",
                            w.value.len()
                        )));
                    }
                    if w.start >= w.end {
                        return Err(Error::InvalidScenario(format!(
                            "step window {i} is empty: [{}, {})",
                            w.start, w.end
                        )));
                    }
                }
                // Windows that touch the same component must not overlap in time.
                for c in 0..*dim {
                    let mut active: Vec<(usize, usize)> = windows
                        .iter()
                        .filter(|w| w.value[c] != 0.0)
                        .map(|w| (w.start, w.end))
                        .collect();
                    active.sort_unstable();
                    for pair in active.windows(2) {
                        if pair[1].0 < pair[0].1 {
                            return Err(Error::InvalidScenario(format!(
                                "step windows overlap on component {c}: [{}, {}) and [{}, {})",
                                pair[0].0, pair[0].1, pair[1].0, pair[1].1
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Draw the noise vector at `step`. Deterministic given (spec, step).
pub fn sample_noise(spec: &NoiseSpec, channel: Channel, step: usize) -> DVector<f64> {
    match spec {
        NoiseSpec::Zero { dim } => DVector::zeros(*dim),
        NoiseSpec::Uniform { half_widths, seed } => DVector::from_iterator(
            half_widths.len(),
            half_widths
                .iter()
                .enumerate()
                .map(|(i, &h)| rng::uniform_symmetric(*seed, channel, step, i as u64, h)),
        ),
        NoiseSpec::Gaussian { variances, seed } => DVector::from_iterator(
            variances.len(),
            variances
                .iter()
                .enumerate()
                .map(|(i, &v)| v.sqrt() * rng::standard_normal(*seed, channel, step, i as u64)),
        ),
        NoiseSpec::StepSequence { dim, windows } => {
            let mut out = DVector::zeros(*dim);
            for w in windows {
                if step >= w.start && step < w.end {
                    for (i, &val) in w.value.iter().enumerate() {
                        out[i] += val;
                    }
                }
            }
            out
        }
    }
}

/// A realized open-loop trajectory (used by tests and the oracle checks).
#[derive(Debug, Clone)]
pub struct ProcessTrajectory {
    pub x: Vec<DVector<f64>>,
    pub y: Vec<DVector<f64>>,
    pub v: Vec<DVector<f64>>,
    pub w: Vec<DVector<f64>>,
}

impl ProcessTrajectory {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

/// Simulate the open-loop process for `steps` steps from `x0` under the given
/// input sequence (`u(k)` for k = 0..steps-1) and noise specs.
pub fn simulate_process(
    model: &LtiModel,
    x0: &DVector<f64>,
    inputs: impl Fn(usize) -> DVector<f64>,
    v_spec: &NoiseSpec,
    w_spec: &NoiseSpec,
    steps: usize,
) -> Result<ProcessTrajectory> {
    let mut x = Vec::with_capacity(steps + 1);
    let mut y = Vec::with_capacity(steps + 1);
    let mut v = Vec::with_capacity(steps);
    let mut w = Vec::with_capacity(steps + 1);

    let w0 = sample_noise(w_spec, Channel::MeasurementNoise, 0);
    y.push(measure(model, x0, &w0)?);
    w.push(w0);
    x.push(x0.clone());

    for k in 1..=steps {
        let vk = sample_noise(v_spec, Channel::ProcessNoise, k - 1);
        let xk = step_process(model, &x[k - 1], &inputs(k - 1), &vk)?;
        let wk = sample_noise(w_spec, Channel::MeasurementNoise, k);
        y.push(measure(model, &xk, &wk)?);
        x.push(xk);
        v.push(vk);
        w.push(wk);
    }
    Ok(ProcessTrajectory { x, y, v, w })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn two_state_model() -> LtiModel {
        LtiModel::new(
            DMatrix::identity(2, 2),
            DMatrix::zeros(2, 0),
            DMatrix::identity(2, 2),
            vec![Block { start: 0, len: 2 }],
            vec![],
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn identity_dynamics_keep_state() {
        let m = two_state_model();
        let x = DVector::from_vec(vec![1.0, 2.0]);
        let out = step_process(&m, &x, &DVector::zeros(0), &DVector::zeros(2)).unwrap();
        assert_eq!(out, x);
    }

    #[test]
    fn forced_response_only() {
        let m = LtiModel::new(
            DMatrix::zeros(1, 1),
            DMatrix::identity(1, 1),
            DMatrix::identity(1, 1),
            vec![Block { start: 0, len: 1 }],
            vec![Block { start: 0, len: 1 }],
            1.0,
        )
        .unwrap();
        let out = step_process(
            &m,
            &DVector::from_vec(vec![123.0]),
            &DVector::from_vec(vec![3.0]),
            &DVector::from_vec(vec![1.0]),
        )
        .unwrap();
        assert_eq!(out[0], 4.0);
    }

    #[test]
    fn matrix_vector_oracle_on_basis_vector() {
        // For x = e_j, A x must equal column j of A. Oracle: per-element dot
        // products computed independently of the matrix multiply.
        let a = DMatrix::from_row_slice(3, 3, &[0.9, 0.1, 0.0, 0.05, 0.8, 0.02, 0.0, 0.1, 0.7]);
        let m = LtiModel::new(
            a.clone(),
            DMatrix::zeros(3, 0),
            DMatrix::identity(3, 3),
            vec![Block { start: 0, len: 3 }],
            vec![],
            1.0,
        )
        .unwrap();
        for j in 0..3 {
            let mut e = DVector::zeros(3);
            e[j] = 1.0;
            let got = step_process(&m, &e, &DVector::zeros(0), &DVector::zeros(3)).unwrap();
            for i in 0..3 {
                let dot: f64 = (0..3).map(|k| a[(i, k)] * e[k]).sum();
                assert_eq!(got[i], dot);
                assert_eq!(got[i], a[(i, j)]);
            }
        }
    }

    #[test]
    fn dimension_mismatch_names_operand() {
        let m = two_state_model();
        let err = step_process(
            &m,
            &DVector::zeros(3),
            &DVector::zeros(0),
            &DVector::zeros(2),
        )
        .unwrap_err();
        assert!(err.to_string().contains("state"));
    }

    #[test]
    fn full_state_measurement() {
        let m = two_state_model();
        let x = DVector::from_vec(vec![4.0, -1.0]);
        let y = measure(&m, &x, &DVector::zeros(2)).unwrap();
        assert_eq!(y, x);
    }

    #[test]
    fn single_row_measurement_hand_value() {
        let m = LtiModel::new(
            DMatrix::identity(2, 2),
            DMatrix::zeros(2, 0),
            DMatrix::from_row_slice(1, 2, &[1.0, 0.0]),
            vec![Block { start: 0, len: 1 }],
            vec![],
            1.0,
        )
        .unwrap();
        let y = measure(
            &m,
            &DVector::from_vec(vec![2.0, 5.0]),
            &DVector::from_vec(vec![0.1]),
        )
        .unwrap();
        assert_relative_eq!(y[0], 2.1, epsilon = 1e-15);
    }

    #[test]
    fn sensor_slices_reassemble_full_measurement() {
        let m = LtiModel::new(
            DMatrix::identity(4, 4),
            DMatrix::zeros(4, 0),
            DMatrix::identity(4, 4),
            vec![Block { start: 0, len: 2 }, Block { start: 2, len: 2 }],
            vec![],
            0.2,
        )
        .unwrap();
        let y = DVector::from_vec(vec![1.0, 2.0, 3.0, 4.0]);
        let y1 = m.measurement_of_sensor(&y, 0);
        let y2 = m.measurement_of_sensor(&y, 1);
        assert_eq!(y1.len(), 2);
        let mut cat = Vec::new();
        cat.extend(y1.iter().copied());
        cat.extend(y2.iter().copied());
        assert_eq!(DVector::from_vec(cat), y);
    }

    #[test]
    fn overlapping_partition_rejected_with_indices() {
        let err = LtiModel::new(
            DMatrix::identity(3, 3),
            DMatrix::zeros(3, 0),
            DMatrix::identity(3, 3),
            vec![Block { start: 0, len: 2 }, Block { start: 1, len: 2 }],
            vec![],
            1.0,
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("starts at index 1"), "{msg}");
    }

    #[test]
    fn zero_noise_is_zero() {
        let z = sample_noise(&NoiseSpec::Zero { dim: 3 }, Channel::ProcessNoise, 17);
        assert_eq!(z, DVector::zeros(3));
    }

    #[test]
    fn step_sequence_window_bounds() {
        let spec = NoiseSpec::StepSequence {
            dim: 1,
            windows: vec![StepWindow {
                start: 100,
                end: 200,
                value: vec![0.5],
            }],
        };
        spec.validate().unwrap();
        assert_eq!(sample_noise(&spec, Channel::ProcessNoise, 150)[0], 0.5);
        assert_eq!(sample_noise(&spec, Channel::ProcessNoise, 250)[0], 0.0);
        assert_eq!(sample_noise(&spec, Channel::ProcessNoise, 99)[0], 0.0);
        assert_eq!(sample_noise(&spec, Channel::ProcessNoise, 200)[0], 0.0);
    }

    #[test]
    fn overlapping_windows_same_component_rejected() {
        let spec = NoiseSpec::StepSequence {
            dim: 2,
            windows: vec![
                StepWindow {
                    start: 0,
                    end: 100,
                    value: vec![1.0, 0.0],
                },
                StepWindow {
                    start: 50,
                    end: 150,
                    value: vec![2.0, 0.0],
                },
            ],
        };
        assert!(spec.validate().is_err());
        // Different components may overlap in time.
        let ok = NoiseSpec::StepSequence {
            dim: 2,
            windows: vec![
                StepWindow {
                    start: 0,
                    end: 100,
                    value: vec![1.0, 0.0],
                },
                StepWindow {
                    start: 50,
                    end: 150,
                    value: vec![0.0, 2.0],
                },
            ],
        };
        assert!(ok.validate().is_ok());
    }

    #[test]
    fn uniform_statistical_oracle() {
        // 10^6 samples: max |v| <= delta and mean within 5 sigma of 0,
        // sigma_mean = delta / sqrt(3 n).
        let delta = 0.4;
        let spec = NoiseSpec::Uniform {
            half_widths: vec![delta],
            seed: 31,
        };
        let n = 1_000_000;
        let mut max_abs = 0.0f64;
        let mut sum = 0.0;
        for k in 0..n {
            let v = sample_noise(&spec, Channel::ProcessNoise, k)[0];
            max_abs = max_abs.max(v.abs());
            sum += v;
        }
        let mean = sum / n as f64;
        let sigma_mean = delta / (3.0f64 * n as f64).sqrt();
        assert!(max_abs <= delta);
        assert!(
            mean.abs() <= 5.0 * sigma_mean,
            "mean {mean}, tol {}",
            5.0 * sigma_mean
        );
    }

    #[test]
    fn linearity_of_step() {
        let a = DMatrix::from_row_slice(2, 2, &[0.9, 0.1, -0.2, 0.8]);
        let b = DMatrix::from_row_slice(2, 1, &[1.0, 0.5]);
        let m = LtiModel::new(
            a,
            b,
            DMatrix::identity(2, 2),
            vec![Block { start: 0, len: 2 }],
            vec![Block { start: 0, len: 1 }],
            1.0,
        )
        .unwrap();
        let x1 = DVector::from_vec(vec![1.0, -2.0]);
        let x2 = DVector::from_vec(vec![0.3, 0.7]);
        let u1 = DVector::from_vec(vec![0.5]);
        let u2 = DVector::from_vec(vec![-1.5]);
        let v1 = DVector::from_vec(vec![0.01, 0.02]);
        let v2 = DVector::from_vec(vec![-0.03, 0.04]);
        let lhs = step_process(&m, &(&x1 + &x2), &(&u1 + &u2), &(&v1 + &v2)).unwrap();
        let rhs =
            step_process(&m, &x1, &u1, &v1).unwrap() + step_process(&m, &x2, &u2, &v2).unwrap();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
    }

    #[test]
    fn trajectory_is_deterministic() {
        let m = two_state_model();
        let v = NoiseSpec::Uniform {
            half_widths: vec![0.1, 0.1],
            seed: 5,
        };
        let w = NoiseSpec::Gaussian {
            variances: vec![0.01, 0.01],
            seed: 6,
        };
        let x0 = DVector::zeros(2);
        let t1 = simulate_process(&m, &x0, |_| DVector::zeros(0), &v, &w, 50).unwrap();
        let t2 = simulate_process(&m, &x0, |_| DVector::zeros(0), &v, &w, 50).unwrap();
        for k in 0..=50 {
            assert_eq!(t1.x[k], t2.x[k]);
            assert_eq!(t1.y[k], t2.y[k]);
        }
    }
}
