//! Entropic constants and capacity bounds for iterated GNS-symmetric channels.
//!
//! Units: capacities and the `log Λ_c` correction are in bits; the decay rates
//! `λ` and `α_c` and the zero-error threshold use natural logarithms.

use serde::Serialize;

use crate::channel::{ChannelDense, DensityMatrix, Tolerances};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, identity};
use crate::pauli::binary_entropy;
use crate::spectral::{gns_hermitian, BlockDims, PeripheralProjection};

#[derive(Debug, Clone, Serialize)]
pub struct EntropicConstants {
    /// `λ`, nats per step; `+∞` when the non-peripheral spectrum vanishes.
    pub lambda_gap: f64,
    /// Pimsner–Popa constant `Λ = ‖σ⁻¹‖_∞`.
    pub lambda_pp: f64,
    /// Upper bound `‖σ⁻¹‖²_∞` on the complete constant `Λ_c`.
    pub lambda_c_ub: f64,
    /// `λ / ln(10 Λ_c)`, a lower bound on `α_c`.
    pub alpha_c_lb: f64,
    #[serde(skip)]
    pub sigma: DensityMatrix,
}

impl EntropicConstants {
    pub fn new(lambda_gap: f64, sigma: DensityMatrix) -> Result<Self> {
        let (lambda_pp, lambda_c_ub) = pimsner_popa(&sigma)?;
        Ok(Self { lambda_gap, lambda_pp, lambda_c_ub, alpha_c_lb: alpha_c_lower(lambda_gap, lambda_c_ub), sigma })
    }
}

/// `e^{−λ} = ‖Φ*(id − P*)‖`: the spectral radius of the non-peripheral part,
/// which for a GNS-symmetric channel is the largest `|eigenvalue|` of the
/// Hermitian representative of `Φ*(id − P*)`.
pub fn lambda_gap(
    c: &ChannelDense,
    projection: &PeripheralProjection,
    sigma: &DensityMatrix,
    tol: &Tolerances,
) -> Result<f64> {
    let report = c.check_gns_symmetric(sigma, tol)?;
    if !report.symmetric {
        return Err(Error::NotGnsSymmetric { deviation: report.deviation });
    }
    let n = c.superop().nrows();
    let heisenberg = c.superop().adjoint();
    let complement = identity(n) - projection.superop.adjoint();
    let restricted = gns_hermitian(&(heisenberg * complement), sigma);
    let (values, _) = hermitian_eigen(&restricted);
    let r = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    Ok(if r <= tol.eq { f64::INFINITY } else { -r.ln() })
}

/// `(Λ, Λ_c upper bound) = (‖σ⁻¹‖_∞, ‖σ⁻¹‖²_∞)`.
pub fn pimsner_popa(sigma: &DensityMatrix) -> Result<(f64, f64)> {
    let min_eigenvalue = sigma.min_eigenvalue();
    if min_eigenvalue <= 0.0 {
        return Err(Error::SigmaNotFullRank { min_eigenvalue });
    }
    let lambda = 1.0 / min_eigenvalue;
    Ok((lambda, lambda * lambda))
}

pub fn alpha_c_lower(lambda_gap: f64, lambda_c_ub: f64) -> f64 {
    if lambda_gap <= 0.0 {
        return 0.0;
    }
    lambda_gap / (10.0 * lambda_c_ub).ln()
}

/// `(χ(P), I_c(P)) = (log₂ Σ d_k, log₂ max d_k)`.
pub fn peripheral_capacities(dims: &BlockDims) -> (f64, f64) {
    ((dims.sum() as f64).log2(), (dims.max() as f64).log2())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeMode {
    /// `t` counts half-iterations: the bound governs `Φ^{2t}`.
    Discrete,
    /// Continuous-time semigroup `T_t`, real `t`.
    Semigroup,
}

/// Placement of the `h(δ)` term in the classical one-shot bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum EntropyPlacement {
    /// `[log Σd + e^{−2α t} log Λ_c + h(δ)] / (1 − δ)`.
    #[default]
    InsideFraction,
    /// `[log Σd + e^{−2α t} log Λ_c] / (1 − δ) + h(δ)`.
    OutsideFraction,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapacityBounds {
    pub t: f64,
    pub classical_ub: f64,
    pub quantum_ub: f64,
    pub classical_lb: f64,
    pub quantum_lb: f64,
    pub delta: Option<f64>,
}

fn check_time(t: f64, mode: TimeMode) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    if mode == TimeMode::Discrete && t.is_finite() && t.fract() != 0.0 {
        return Err(Error::InvalidInput(format!("discrete mode needs integer t, got {t}")));
    }
    Ok(())
}

/// `e^{−2 α_c t} · log₂ Λ_c`, with `α_c = +∞` read as the `t → ∞` limit for
/// every `t > 0`.
pub fn decay_correction(k: &EntropicConstants, t: f64) -> f64 {
    let magnitude = k.lambda_c_ub.log2();
    if t == 0.0 {
        return magnitude;
    }
    if k.alpha_c_lb.is_infinite() || t.is_infinite() {
        return 0.0;
    }
    (-2.0 * k.alpha_c_lb * t).exp() * magnitude
}

pub fn asymptotic_bounds(dims: &BlockDims, k: &EntropicConstants, t: f64, mode: TimeMode) -> Result<CapacityBounds> {
    check_time(t, mode)?;
    let (chi, ic) = peripheral_capacities(dims);
    let correction = decay_correction(k, t);
    Ok(CapacityBounds {
        t,
        classical_ub: chi + correction,
        quantum_ub: ic + correction,
        classical_lb: chi,
        quantum_lb: ic.max(0.0),
        delta: None,
    })
}

pub fn one_shot_bounds(
    dims: &BlockDims,
    k: &EntropicConstants,
    t: f64,
    delta: f64,
    mode: TimeMode,
    placement: EntropyPlacement,
) -> Result<CapacityBounds> {
    check_time(t, mode)?;
    if !(0.0..0.5).contains(&delta) {
        return Err(Error::DeltaOutOfRange(delta));
    }
    let (chi, ic) = peripheral_capacities(dims);
    let correction = decay_correction(k, t);
    let h = binary_entropy(delta);
    let classical_ub = match placement {
        EntropyPlacement::InsideFraction => (chi + correction + h) / (1.0 - delta),
        EntropyPlacement::OutsideFraction => (chi + correction) / (1.0 - delta) + h,
    };
    let quantum_ub = if delta < 0.25 { (ic + correction + 2.0 * h) / (1.0 - 4.0 * delta) } else { f64::INFINITY };
    Ok(CapacityBounds { t, classical_ub, quantum_ub, classical_lb: chi, quantum_lb: ic.max(0.0), delta: Some(delta) })
}

/// `(n ln Λ_c + ln 10) / λ`; beyond it the zero-error capacities of
/// `(Φ^{⊗n})^t` equal those of the peripheral projection.
pub fn zero_error_threshold(k: &EntropicConstants, n_copies: u32) -> Result<f64> {
    if n_copies == 0 {
        return Err(Error::InvalidInput("n_copies must be at least 1".into()));
    }
    if k.lambda_gap == 0.0 {
        return Err(Error::ZeroGap);
    }
    if k.lambda_gap.is_infinite() {
        return Ok(0.0);
    }
    Ok((n_copies as f64 * k.lambda_c_ub.ln() + 10f64.ln()) / k.lambda_gap)
}
