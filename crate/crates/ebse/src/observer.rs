//! Centralized reference estimator and gain design.
//!
//! The reference design being emulated is a plain linear observer
//!
//! ```text
//! x_pred(k) = A x_filt(k-1) + B u(k-1)
//! x_filt(k) = x_pred(k) + L (y(k) - C x_pred(k))
//! ```
//!
//! with a gain `L` making `(I - L C) A` stable. Steady-state Kalman and LQR
//! gains are provided via fixed-point Riccati iteration; gains may also be
//! supplied verbatim.

use nalgebra::{DMatrix, DVector};

use crate::linalg;
use crate::model::LtiModel;
use crate::{Error, Result};

/// Observer gain L with per-sensor column blocks L_i.
#[derive(Debug, Clone, PartialEq)]
pub struct ObserverGain {
    pub l: DMatrix<f64>,
}

impl ObserverGain {
    pub fn new(model: &LtiModel, l: DMatrix<f64>) -> Result<Self> {
        if l.nrows() != model.state_dim() || l.ncols() != model.measurement_dim() {
            return Err(Error::DimensionMismatch {
                context: "observer gain",
                expected: format!("{}x{}", model.state_dim(), model.measurement_dim()),
                actual: format!("{}x{}", l.nrows(), l.ncols()),
            });
        }
        Ok(Self { l })
    }

    /// L_i: the columns of L matching sensor channel `i`.
    pub fn block(&self, model: &LtiModel, i: usize) -> DMatrix<f64> {
        let b = model.sensor_partition[i];
        self.l.columns(b.start, b.len).into_owned()
    }
}

/// State-feedback gain F with per-group row blocks F_i (u = F x).
#[derive(Debug, Clone, PartialEq)]
pub struct ControllerGain {
    pub f: DMatrix<f64>,
}

impl ControllerGain {
    pub fn new(model: &LtiModel, f: DMatrix<f64>) -> Result<Self> {
        if f.nrows() != model.input_dim() || f.ncols() != model.state_dim() {
            return Err(Error::DimensionMismatch {
                context: "controller gain",
                expected: format!("{}x{}", model.input_dim(), model.state_dim()),
                actual: format!("{}x{}", f.nrows(), f.ncols()),
            });
        }
        Ok(Self { f })
    }

    /// F_i: the rows of F matching input group `i`.
    pub fn block(&self, model: &LtiModel, i: usize) -> DMatrix<f64> {
        let b = model.input_partition[i];
        self.f.rows(b.start, b.len).into_owned()
    }
}

/// Centralized estimate pair (prediction and filtered value).
#[derive(Debug, Clone, PartialEq)]
pub struct CentralEstimate {
    pub x_pred: DVector<f64>,
    pub x_filt: DVector<f64>,
}

impl CentralEstimate {
    pub fn new(x0: DVector<f64>) -> Self {
        Self {
            x_pred: x0.clone(),
            x_filt: x0,
        }
    }
}

/// Prediction step of the centralized observer.
pub fn central_predict(
    model: &LtiModel,
    est_prev: &CentralEstimate,
    u_prev: &DVector<f64>,
) -> Result<DVector<f64>> {
    if u_prev.len() != model.input_dim() {
        return Err(Error::DimensionMismatch {
            context: "central_predict input",
            expected: model.input_dim().to_string(),
            actual: u_prev.len().to_string(),
        });
    }
    Ok(&model.a * &est_prev.x_filt + &model.b * u_prev)
}

/// Measurement update of the centralized observer.
pub fn central_update(
    model: &LtiModel,
    gain: &ObserverGain,
    x_pred: &DVector<f64>,
    y: &DVector<f64>,
) -> Result<DVector<f64>> {
    if y.len() != model.measurement_dim() {
        return Err(Error::DimensionMismatch {
            context: "central_update measurement",
            expected: model.measurement_dim().to_string(),
            actual: y.len().to_string(),
        });
    }
    Ok(x_pred + &gain.l * (y - &model.c * x_pred))
}

/// Exponential-stability constants for the reference error dynamics.
///
/// Returns `(m, rho)` with `|| ((I-LC)A)^k || <= m rho^k` for all k >= 0.
/// `rho` defaults to the midpoint between the spectral radius and 1 (or 0.5
/// when the spectral radius is 0); `m` is the smallest constant valid for
/// that `rho`, found by scanning matrix powers until the ratio sequence
/// provably dominates all later terms.
pub fn stability_constants(
    model: &LtiModel,
    gain: &ObserverGain,
    rho_override: Option<f64>,
) -> Result<(f64, f64)> {
    let m = error_matrix(model, gain);
    stability_constants_of(&m, rho_override)
}

/// `(I - L C) A`: the closed-loop matrix of the reference error recursion.
pub fn error_matrix(model: &LtiModel, gain: &ObserverGain) -> DMatrix<f64> {
    let n = model.state_dim();
    (DMatrix::identity(n, n) - &gain.l * &model.c) * &model.a
}

/// Core of `stability_constants`, usable for any square matrix.
pub fn stability_constants_of(m: &DMatrix<f64>, rho_override: Option<f64>) -> Result<(f64, f64)> {
    let sr = linalg::spectral_radius(m);
    if sr >= 1.0 {
        return Err(Error::Unstable(format!(
            "reference observer unstable: spectral radius {sr:.6} >= 1"
        )));
    }
    let rho = match rho_override {
        Some(r) => {
            if r <= sr || r >= 1.0 {
                return Err(Error::InvalidScenario(format!(
                    "decay rate {r} must lie in ({sr:.6}, 1)"
                )));
            }
            r
        }
        None => {
            if sr == 0.0 {
                0.5
            } else {
                (sr + 1.0) / 2.0
            }
        }
    };

    // Scan n_k = ||M^k|| / rho^k. Once n_k0 < 1 for some k0 >= 1, every k
    // decomposes as a*k0 + r with n_k <= n_k0^a * n_r <= max_{r <= k0} n_r,
    // so the running maximum is the exact supremum.
    let mut power = DMatrix::identity(m.nrows(), m.nrows());
    let mut rho_pow = 1.0;
    let mut m_c: f64 = 1.0; // n_0 = ||I|| = 1
    const MAX_HORIZON: usize = 100_000;
    for _k in 1..=MAX_HORIZON {
        power *= m;
        rho_pow *= rho;
        let nk = linalg::norm2(&power) / rho_pow;
        m_c = m_c.max(nk);
        if nk < 1.0 {
            return Ok((m_c, rho));
        }
    }
    Err(Error::NonConvergence {
        what: "stability constant scan",
        iterations: MAX_HORIZON,
    })
}

fn require_symmetric_psd(m: &DMatrix<f64>, what: &'static str, strict: bool) -> Result<()> {
    if !linalg::is_symmetric(m, 1e-9) {
        return Err(Error::InvalidScenario(format!("{what} must be symmetric")));
    }
    let min = linalg::min_symmetric_eigenvalue(m);
    if strict {
        if min <= 0.0 {
            return Err(Error::InvalidScenario(format!(
                "{what} must be positive definite (min eigenvalue {min:.3e})"
            )));
        }
    } else if min < -1e-9 {
        return Err(Error::InvalidScenario(format!(
            "{what} must be positive semidefinite (min eigenvalue {min:.3e})"
        )));
    }
    Ok(())
}

const RICCATI_TOL: f64 = 1e-10;
const RICCATI_MAX_ITER: usize = 100_000;

/// Steady-state Kalman gain via fixed-point iteration of the filter Riccati
/// recursion on the a-priori covariance:
///
/// ```text
/// P <- A P A' - A P C' (C P C' + R)^-1 C P A' + Q
/// L  = P C' (C P C' + R)^-1
/// ```
pub fn design_kalman_gain(
    model: &LtiModel,
    q: &DMatrix<f64>,
    r: &DMatrix<f64>,
) -> Result<ObserverGain> {
    let n = model.state_dim();
    let p_dim = model.measurement_dim();
    if q.nrows() != n || q.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "kalman Q",
            expected: format!("{n}x{n}"),
            actual: format!("{}x{}", q.nrows(), q.ncols()),
        });
    }
    if r.nrows() != p_dim || r.ncols() != p_dim {
        return Err(Error::DimensionMismatch {
            context: "kalman R",
            expected: format!("{p_dim}x{p_dim}"),
            actual: format!("{}x{}", r.nrows(), r.ncols()),
        });
    }
    require_symmetric_psd(q, "Q", false)?;
    require_symmetric_psd(r, "R", true)?;

    let a = &model.a;
    let c = &model.c;
    let mut p = q.clone();
    for _ in 0..RICCATI_MAX_ITER {
        let s = c * &p * c.transpose() + r;
        let s_inv = s.try_inverse().ok_or_else(|| {
            Error::InvalidScenario("innovation covariance not invertible".to_string())
        })?;
        let apct = a * &p * c.transpose();
        let next = a * &p * a.transpose() - &apct * &s_inv * apct.transpose() + q;
        let diff = (&next - &p).abs().max();
        p = next;
        if diff < RICCATI_TOL {
            let s = c * &p * c.transpose() + r;
            let s_inv = s.try_inverse().ok_or_else(|| {
                Error::InvalidScenario("innovation covariance not invertible".to_string())
            })?;
            let l = &p * c.transpose() * s_inv;
            let gain = ObserverGain::new(model, l)?;
            let sr = linalg::spectral_radius(&error_matrix(model, &gain));
            if sr >= 1.0 {
                return Err(Error::Unstable(format!(
                    "kalman design produced unstable (I-LC)A, spectral radius {sr:.6} \
                     (is (A, C) detectable?)"
                )));
            }
            return Ok(gain);
        }
    }
    Err(Error::NonConvergence {
        what: "kalman Riccati iteration",
        iterations: RICCATI_MAX_ITER,
    })
}

/// LQR state-feedback gain via the dual Riccati recursion. Returned with the
/// sign convention `u = F x`, so the closed loop is `A + B F`.
pub fn design_lqr_gain(
    model: &LtiModel,
    qx: &DMatrix<f64>,
    ru: &DMatrix<f64>,
) -> Result<ControllerGain> {
    let n = model.state_dim();
    let q_dim = model.input_dim();
    if q_dim == 0 {
        return Err(Error::InvalidScenario(
            "LQR design requires at least one input".to_string(),
        ));
    }
    if qx.nrows() != n || qx.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "lqr Qx",
            expected: format!("{n}x{n}"),
            actual: format!("{}x{}", qx.nrows(), qx.ncols()),
        });
    }
    if ru.nrows() != q_dim || ru.ncols() != q_dim {
        return Err(Error::DimensionMismatch {
            context: "lqr Ru",
            expected: format!("{q_dim}x{q_dim}"),
            actual: format!("{}x{}", ru.nrows(), ru.ncols()),
        });
    }
    require_symmetric_psd(qx, "Qx", false)?;
    require_symmetric_psd(ru, "Ru", true)?;

    let a = &model.a;
    let b = &model.b;
    let mut p = qx.clone();
    for _ in 0..RICCATI_MAX_ITER {
        let s = b.transpose() * &p * b + ru;
        let s_inv = s.try_inverse().ok_or_else(|| {
            Error::InvalidScenario("input cost matrix not invertible".to_string())
        })?;
        let atpb = a.transpose() * &p * b;
        let next = a.transpose() * &p * a - &atpb * &s_inv * atpb.transpose() + qx;
        let diff = (&next - &p).abs().max();
        p = next;
        if diff < RICCATI_TOL {
            let s = b.transpose() * &p * b + ru;
            let s_inv = s.try_inverse().ok_or_else(|| {
                Error::InvalidScenario("input cost matrix not invertible".to_string())
            })?;
            let f = -(s_inv * b.transpose() * &p * a);
            let gain = ControllerGain::new(model, f)?;
            let sr = linalg::spectral_radius(&(a + b * &gain.f));
            if sr >= 1.0 {
                return Err(Error::Unstable(format!(
                    "LQR design produced unstable A+BF, spectral radius {sr:.6} \
                     (is (A, B) stabilizable?)"
                )));
            }
            return Ok(gain);
        }
    }
    Err(Error::NonConvergence {
        what: "LQR Riccati iteration",
        iterations: RICCATI_MAX_ITER,
    })
}
