//! Offline certification and bound computation.
//!
//! The switching observer visits closed-loop matrices
//! `A_J = (I - sum over l in J of L_l C_l) A` for transmitting subsets J.
//! A common quadratic Lyapunov certificate over all subsets proves the
//! inter-agent error dynamics stable; from the certificate a constructive
//! inter-agent bound follows, which feeds the worst-case error bounds of the
//! distributed estimator. All matrix norms are the induced 2-norm, vector
//! norms Euclidean.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::linalg;
use crate::model::{LtiModel, NoiseSpec};
use crate::observer::ObserverGain;
use crate::rng::Channel;
use crate::scenario::CompiledScenario;
use crate::sim::RunTrace;
use crate::trigger::TriggerNorm;
use crate::{Error, Result};

/// Negative-definiteness margin for the subset LMI.
pub const LMI_TOL: f64 = 1e-9;

/// Largest sensor count for which exhaustive subset enumeration is allowed.
pub const MAX_ENUMERATED_SENSORS: usize = 20;

/// `A_J = (I - sum_{l in J} L_l C_l) A` for a sensor subset J.
pub fn subset_matrix(
    model: &LtiModel,
    gain: &ObserverGain,
    subset: &[usize],
) -> Result<DMatrix<f64>> {
    let n = model.state_dim();
    let mut lc = DMatrix::zeros(n, n);
    for &l in subset {
        if l >= model.num_sensors() {
            return Err(Error::InvalidScenario(format!(
                "subset names sensor channel {l} but the model has {}",
                model.num_sensors()
            )));
        }
        lc += gain.block(model, l) * model.sensor_rows(l);
    }
    Ok((DMatrix::identity(n, n) - lc) * &model.a)
}

/// Result of the exhaustive subset LMI check.
#[derive(Debug, Clone, Serialize)]
pub struct SubsetLmiCertificate {
    pub checked_subsets: usize,
    /// max over subsets J of the largest eigenvalue of A_J' P A_J - P.
    pub max_eigenvalue_over_subsets: f64,
    /// Subset attaining the maximum.
    pub worst_subset: Vec<usize>,
    pub tol: f64,
    pub pass: bool,
}

/// Check `A_J' P A_J - P < 0` (with margin) for every subset J of sensor
/// channels. P must be symmetric positive definite.
pub fn check_lemma1(
    model: &LtiModel,
    gain: &ObserverGain,
    p: &DMatrix<f64>,
) -> Result<SubsetLmiCertificate> {
    let num = model.num_sensors();
    if num > MAX_ENUMERATED_SENSORS {
        return Err(Error::Refused(format!(
            "{num} sensor channels would need 2^{num} subset checks; \
             certification is limited to {MAX_ENUMERATED_SENSORS} channels"
        )));
    }
    if !linalg::is_symmetric(p, 1e-9) {
        return Err(Error::InvalidScenario("P must be symmetric".to_string()));
    }
    let min_eig = linalg::min_symmetric_eigenvalue(p);
    if min_eig <= 0.0 {
        return Err(Error::InvalidScenario(format!(
            "P must be positive definite (min eigenvalue {min_eig:.3e})"
        )));
    }

    let mut worst = f64::NEG_INFINITY;
    let mut worst_subset = Vec::new();
    let count = 1usize << num;
    for mask in 0..count {
        let subset: Vec<usize> = (0..num).filter(|l| mask & (1 << l) != 0).collect();
        let a_j = subset_matrix(model, gain, &subset)?;
        let m = a_j.transpose() * p * &a_j - p;
        let sym = 0.5 * (&m + m.transpose());
        let max_eig = linalg::max_symmetric_eigenvalue(&sym);
        if max_eig > worst {
            worst = max_eig;
            worst_subset = subset;
        }
    }
    Ok(SubsetLmiCertificate {
        checked_subsets: count,
        max_eigenvalue_over_subsets: worst,
        worst_subset,
        tol: LMI_TOL,
        pass: worst < -LMI_TOL,
    })
}

/// `m_bar = max_j ||L_j C_j A||` over sensor channels.
pub fn m_bar(model: &LtiModel, gain: &ObserverGain) -> f64 {
    (0..model.num_sensors())
        .map(|j| linalg::norm2(&(gain.block(model, j) * model.sensor_rows(j) * &model.a)))
        .fold(0.0, f64::max)
}

fn check_rho(rho_c: f64) -> Result<()> {
    if !(0.0..1.0).contains(&rho_c) {
        return Err(Error::InvalidScenario(format!(
            "decay rate {rho_c} outside [0, 1)"
        )));
    }
    Ok(())
}

/// Single-link worst-case bound on the difference to the centralized
/// estimator:
///
/// ```text
/// e_i_max = m_c ||e_i(0)|| + m_c / (1 - rho_c) * ||L|| * delta_est
/// ```
pub fn theorem1_bound(
    m_c: f64,
    rho_c: f64,
    norm_l: f64,
    delta_est: f64,
    e_i0_norm: f64,
) -> Result<f64> {
    check_rho(rho_c)?;
    Ok(m_c * e_i0_norm + m_c / (1.0 - rho_c) * norm_l * delta_est)
}

/// Multi-agent worst-case bound with estimator disturbances and inter-agent
/// coupling:
///
/// ```text
/// e_i_max = m_c ||e_i(0)||
///         + m_c / (1 - rho_c) * (||L|| ||delta|| + d_max + m_bar N_sen e_max)
/// ```
#[allow(clippy::too_many_arguments)]
pub fn theorem2_bound(
    m_c: f64,
    rho_c: f64,
    norm_l: f64,
    delta_est: &[f64],
    d_i_max: f64,
    m_bar: f64,
    n_sen: usize,
    e_max: f64,
    e_i0_norm: f64,
) -> Result<f64> {
    check_rho(rho_c)?;
    if d_i_max < 0.0 || e_max < 0.0 || delta_est.iter().any(|d| *d < 0.0) {
        return Err(Error::InvalidScenario(
            "bound inputs must be nonnegative".to_string(),
        ));
    }
    let delta_norm = DVector::from_row_slice(delta_est).norm();
    Ok(m_c * e_i0_norm
        + m_c / (1.0 - rho_c) * (norm_l * delta_norm + d_i_max + m_bar * n_sen as f64 * e_max))
}

/// Constructive inter-agent bound derived from a Lemma-1 certificate.
#[derive(Debug, Clone, Serialize)]
pub struct InterAgentBound {
    /// Worst P-weighted contraction over all subsets (must be < 1).
    pub lambda_prime: f64,
    /// Condition number of P.
    pub cond_p: f64,
    /// sup_k ||e_ij(k)|| <= e_max for inputs ||d_i - d_j|| <= 2 d_max.
    pub e_max: f64,
}

/// Construct `e_max` from a certified P by the standard ISS contraction
/// argument in the P-weighted norm:
///
/// ```text
/// e_max = sqrt(cond(P)) * ( ||e_ij(0)|| + 2 d_max / (1 - sqrt(lambda')) )
/// ```
///
/// with `lambda' = max_J lambda_max(P^-1/2 A_J' P A_J P^-1/2)`.
pub fn constructive_e_max(
    model: &LtiModel,
    gain: &ObserverGain,
    p: &DMatrix<f64>,
    d_max: f64,
    e_ij0_norm: f64,
) -> Result<InterAgentBound> {
    let cert = check_lemma1(model, gain, p)?;
    if !cert.pass {
        return Err(Error::Unstable(format!(
            "subset LMI certificate fails (worst eigenvalue {:.3e} at subset {:?})",
            cert.max_eigenvalue_over_subsets, cert.worst_subset
        )));
    }
    let (_, p_inv_sqrt) = linalg::symmetric_sqrt_pair(p)?;

    let num = model.num_sensors();
    let mut lambda_prime = 0.0f64;
    for mask in 0..(1usize << num) {
        let subset: Vec<usize> = (0..num).filter(|l| mask & (1 << l) != 0).collect();
        let a_j = subset_matrix(model, gain, &subset)?;
        let mid = &p_inv_sqrt * a_j.transpose() * p * &a_j * &p_inv_sqrt;
        let sym = 0.5 * (&mid + mid.transpose());
        lambda_prime = lambda_prime.max(linalg::max_symmetric_eigenvalue(&sym));
    }
    if lambda_prime >= 1.0 {
        return Err(Error::Unstable(format!(
            "P-weighted contraction factor {lambda_prime} >= 1"
        )));
    }
    let eigs = linalg::symmetric_eigenvalues(p);
    let cond_p = eigs[eigs.len() - 1] / eigs[0];
    let e_max = cond_p.sqrt() * (e_ij0_norm + 2.0 * d_max / (1.0 - lambda_prime.sqrt()));
    Ok(InterAgentBound {
        lambda_prime,
        cond_p,
        e_max,
    })
}

/// Which estimation-error corollary to evaluate.
#[derive(Debug, Clone, Copy)]
pub enum CorollaryKind {
    /// Bounded disturbances: needs sup-norms of v and w and the initial
    /// centralized error.
    Deterministic {
        v_max: f64,
        w_max: f64,
        eps_c0_norm: f64,
    },
    /// Zero-mean disturbances: bounds the norm of the expected error.
    Stochastic,
}

/// Estimation-error bound from the difference bound `e_i_max`.
///
/// Deterministic: `eps_c_max + e_i_max` with
/// `eps_c_max = m_c ||eps_c(0)|| + m_c/(1-rho_c) (||I-LC|| v_max + ||L|| w_max)`.
/// Stochastic: the expected error is bounded by `e_i_max` alone.
pub fn corollary_bounds(
    kind: CorollaryKind,
    m_c: f64,
    rho_c: f64,
    norm_l: f64,
    norm_i_lc: f64,
    e_i_max: f64,
) -> Result<f64> {
    check_rho(rho_c)?;
    match kind {
        CorollaryKind::Deterministic {
            v_max,
            w_max,
            eps_c0_norm,
        } => {
            if v_max < 0.0 || w_max < 0.0 {
                return Err(Error::InvalidScenario(
                    "noise bounds must be nonnegative".to_string(),
                ));
            }
            let eps_c_max =
                m_c * eps_c0_norm + m_c / (1.0 - rho_c) * (norm_i_lc * v_max + norm_l * w_max);
            Ok(eps_c_max + e_i_max)
        }
        CorollaryKind::Stochastic => Ok(e_i_max),
    }
}

/// Report of the closed-loop recursion check.
#[derive(Debug, Clone, Serialize)]
pub struct ClosedLoopReport {
    pub spectral_radius: f64,
    pub max_norm_x: f64,
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Verify that the simulated state follows the closed-loop decomposition
///
/// ```text
/// x(k) = (A + B F) x(k-1) - sum_g B_g F_g eps_owner(g)(k-1) + v(k-1)
/// ```
///
/// where `eps_owner(g)(k-1)` is the estimation error of the agent whose
/// estimate produced input group g at step k-1, against the recorded trace.
pub fn closed_loop_check(cs: &CompiledScenario, trace: &RunTrace) -> Result<ClosedLoopReport> {
    let model = &cs.model;
    let controller = cs.controller.as_ref().ok_or_else(|| {
        Error::InvalidScenario("closed-loop check requires a controller gain".to_string())
    })?;
    if !cs.scenario.run.control {
        return Err(Error::InvalidScenario(
            "closed-loop check requires a run with control enabled".to_string(),
        ));
    }

    let mut group_owner = vec![0usize; model.num_input_groups()];
    for (a, layout) in cs.agents.iter().enumerate() {
        if let Some(g) = layout.input {
            group_owner[g] = a;
        }
    }

    let a_bf = &model.a + &model.b * &controller.f;
    let spectral_radius = linalg::spectral_radius(&a_bf);

    const TOL: f64 = 1e-10;
    let mut max_residual = 0.0f64;
    let mut max_norm_x = trace.records[0].x.norm();
    for k in 1..trace.records.len() {
        let prev = &trace.records[k - 1];
        let cur = &trace.records[k];
        max_norm_x = max_norm_x.max(cur.x.norm());

        let mut expected = &a_bf * &prev.x + &cur.v_prev;
        for (g, &owner) in group_owner.iter().enumerate() {
            let b_g = model.input_cols(g);
            let f_g = controller.block(model, g);
            let eps_owner = &prev.x - &prev.x_hat_ctrl[owner];
            expected -= b_g * f_g * eps_owner;
        }
        let residual = (&cur.x - &expected).norm();
        let scale = cur.x.norm().max(1.0);
        max_residual = max_residual.max(residual / scale);
    }

    Ok(ClosedLoopReport {
        spectral_radius,
        max_norm_x,
        max_residual,
        tol: TOL,
        pass: max_residual <= TOL && max_norm_x.is_finite(),
    })
}

/// Assembled certification and bound report for a scenario.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub schema_version: u32,
    /// Exponential-stability constants of (I-LC)A.
    pub m_c: f64,
    pub rho_c: f64,
    pub spectral_radius_observer: f64,
    pub norm_l: f64,
    pub norm_i_lc: f64,
    pub m_bar: f64,
    pub num_sensors: usize,
    pub detectable: bool,
    pub stabilizable: bool,
    /// Per-channel thresholds converted to the Euclidean norm.
    pub delta_est_effective: Vec<f64>,
    pub delta_est_norm: f64,
    /// Worst-case bound on ||x_c_hat - x_i_hat|| with zero initial error and
    /// no estimator disturbances (single-link form with the stacked
    /// threshold norm).
    pub theorem1_e_max: f64,
    /// Subset LMI certificate, when a P was supplied.
    pub certificate: Option<SubsetLmiCertificate>,
    /// Constructive inter-agent bound, when the certificate passes and a
    /// disturbance bound is known.
    pub inter_agent: Option<InterAgentBound>,
    pub d_max: f64,
    /// Multi-agent bound (needs the certificate and d_max).
    pub theorem2_e_max: Option<f64>,
    /// sup-norm of v/w when the noise kinds admit one.
    pub v_max: Option<f64>,
    pub w_max: Option<f64>,
    /// Deterministic estimation-error bound (needs v_max, w_max, and a
    /// difference bound).
    pub epsilon_bound: Option<f64>,
    /// Closed loop A+BF spectral radius, when a controller is present.
    pub spectral_radius_closed_loop: Option<f64>,
}

/// Build the full report for a compiled scenario. `d_max` falls back to the
/// scenario's declared analysis value, then to the random-injection bound,
/// then to zero (valid when nothing injects disturbances and nothing drops).
pub fn bound_report(cs: &CompiledScenario) -> Result<BoundReport> {
    let model = &cs.model;
    let gain = &cs.observer;
    let closed = crate::observer::error_matrix(model, gain);
    let (m_c, rho_c) = crate::observer::stability_constants_of(&closed, cs.scenario.run.rho)?;
    let norm_l = linalg::norm2(&gain.l);
    let n = model.state_dim();
    let norm_i_lc = linalg::norm2(&(DMatrix::identity(n, n) - &gain.l * &model.c));
    let mbar = m_bar(model, gain);

    let deltas = effective_deltas(
        model,
        &cs.measurement_triggers.delta_est,
        cs.measurement_triggers.norm,
    );
    let delta_norm = DVector::from_row_slice(&deltas).norm();
    let theorem1_e_max = theorem1_bound(m_c, rho_c, norm_l, delta_norm, 0.0)?;

    let d_max = cs
        .scenario
        .analysis
        .d_max
        .or(cs.scenario.injection.random.as_ref().map(|r| r.d_max))
        .unwrap_or(0.0);

    let certificate = match &cs.lyapunov_p {
        Some(p) => Some(check_lemma1(model, gain, p)?),
        None => None,
    };
    // Step-0 disturbances offset the initial estimates, so the worst-case
    // initial differences are d_max (to the centralized reference) and
    // 2 d_max (between agents).
    let inter_agent = match (&cs.lyapunov_p, &certificate) {
        (Some(p), Some(cert)) if cert.pass => {
            Some(constructive_e_max(model, gain, p, d_max, 2.0 * d_max)?)
        }
        _ => None,
    };
    let theorem2_e_max = inter_agent
        .as_ref()
        .map(|b| {
            theorem2_bound(
                m_c,
                rho_c,
                norm_l,
                &deltas,
                d_max,
                mbar,
                model.num_sensors(),
                b.e_max,
                d_max,
            )
        })
        .transpose()?;

    let horizon = cs.scenario.run.horizon;
    let v_max = noise_sup_norm(&cs.scenario.noise.v, Channel::ProcessNoise, horizon);
    let w_max = noise_sup_norm(&cs.scenario.noise.w, Channel::MeasurementNoise, horizon);
    let difference_bound = theorem2_e_max.unwrap_or(theorem1_e_max);
    let epsilon_bound = match (v_max, w_max) {
        (Some(v), Some(w)) => Some(corollary_bounds(
            CorollaryKind::Deterministic {
                v_max: v,
                w_max: w,
                eps_c0_norm: (&cs.x0 - &cs.xhat0).norm(),
            },
            m_c,
            rho_c,
            norm_l,
            norm_i_lc,
            difference_bound,
        )?),
        _ => None,
    };

    let spectral_radius_closed_loop = cs
        .controller
        .as_ref()
        .map(|c| linalg::spectral_radius(&(&model.a + &model.b * &c.f)));

    Ok(BoundReport {
        schema_version: crate::report::REPORT_SCHEMA_VERSION,
        m_c,
        rho_c,
        spectral_radius_observer: linalg::spectral_radius(&closed),
        norm_l,
        norm_i_lc,
        m_bar: mbar,
        num_sensors: model.num_sensors(),
        detectable: is_detectable(model),
        stabilizable: is_stabilizable(model),
        delta_est_effective: deltas,
        delta_est_norm: delta_norm,
        theorem1_e_max,
        certificate,
        inter_agent,
        d_max,
        theorem2_e_max,
        v_max,
        w_max,
        epsilon_bound,
        spectral_radius_closed_loop,
    })
}

/// PBH detectability test on (A, C).
pub fn is_detectable(model: &LtiModel) -> bool {
    linalg::pbh_full_rank(&model.a.transpose(), &model.c.transpose())
}

/// PBH stabilizability test on (A, B).
pub fn is_stabilizable(model: &LtiModel) -> bool {
    linalg::pbh_full_rank(&model.a, &model.b)
}

/// Effective per-channel thresholds in the Euclidean norm: an inf-norm
/// trigger with threshold d admits innovations up to d * sqrt(dim).
pub fn effective_deltas(model: &LtiModel, delta_est: &[f64], norm: TriggerNorm) -> Vec<f64> {
    delta_est
        .iter()
        .enumerate()
        .map(|(l, &d)| match norm {
            TriggerNorm::Two => d,
            TriggerNorm::Inf => d * (model.sensor_partition[l].len as f64).sqrt(),
        })
        .collect()
}

/// Supremum of ||noise(k)|| over a horizon, when it exists (None for
/// unbounded noise kinds).
pub fn noise_sup_norm(spec: &NoiseSpec, channel: Channel, horizon: usize) -> Option<f64> {
    match spec {
        NoiseSpec::Zero { .. } => Some(0.0),
        NoiseSpec::Uniform { half_widths, .. } => Some(DVector::from_row_slice(half_widths).norm()),
        NoiseSpec::Gaussian { .. } => None,
        NoiseSpec::StepSequence { .. } => {
            let mut sup: f64 = 0.0;
            for k in 0..=horizon {
                sup = sup.max(crate::model::sample_noise(spec, channel, k).norm());
            }
            Some(sup)
        }
    }
}
