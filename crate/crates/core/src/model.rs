//! Closed-form oscillator model of a weekly price displacement.
//!
//! An asset is described by its inertial coefficient `m` and the elapsed-time
//! unit `t` (one trading week by default). A displacement over one unit is the
//! homogeneous ratio `x = x_B / x_A - 1`. It is the real median of a wave pair
//! `ψ = R(sin φ, cos φ)`, `ψ* = R(sin φ, -cos φ)` whose amplitude `R` bounds
//! the displacement:
//!
//! ```text
//! S            = m x² / (2t)              action
//! S            = (2π sin φ)²              same action, in phase form (t = 1)
//! Pr(|x| ≥ X)  = erfc(X √(m / 2t))²       tail law
//! R            = π √(8t / m)              extreme displacement
//! ```

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::specfun::{self, SpecfunError, FRAC_1_SQRT_PI};

/// Slack allowed when a ratio sits just outside `[-R, R]` from rounding.
pub const PHASE_CLAMP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("inertial coefficient must be finite and positive, got {0}")]
    InvalidInertia(f64),
    #[error("elapsed time must be finite and positive, got {0}")]
    InvalidTime(f64),
    #[error("price must be finite and positive, got {0}")]
    InvalidPrice(f64),
    #[error("amplitude must be finite and positive, got {0}")]
    InvalidAmplitude(f64),
    #[error("phase {0} outside [-π/2, π/2]")]
    InvalidPhase(f64),
    #[error("displacement {x} exceeds the extreme displacement {amplitude}")]
    ExceedsExtreme { x: f64, amplitude: f64 },
    #[error("threshold must be finite and non-negative, got {0}")]
    InvalidThreshold(f64),
    #[error("displacement ratio must be finite and greater than -1, got {0}")]
    InvalidRatio(f64),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
}

/// Inertial coefficient `m` and elapsed-time unit `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorParams {
    m: f64,
    t: f64,
}

impl OscillatorParams {
    pub fn new(m: f64, t: f64) -> Result<Self, ModelError> {
        if !(m.is_finite() && m > 0.0) {
            return Err(ModelError::InvalidInertia(m));
        }
        if !(t.is_finite() && t > 0.0) {
            return Err(ModelError::InvalidTime(t));
        }
        Ok(Self { m, t })
    }

    /// Params at the unit elapsed time `t = 1`.
    pub fn weekly(m: f64) -> Result<Self, ModelError> {
        Self::new(m, 1.0)
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn t(&self) -> f64 {
        self.t
    }
}

/// One elapsed-time slice: opening price, closing price and their ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Displacement {
    pub x_a: f64,
    pub x_b: f64,
    pub ratio: f64,
}

impl Displacement {
    /// Builds a displacement from an opening price and a ratio, keeping the
    /// ratio as given rather than re-deriving it from the rounded close.
    pub fn from_ratio(x_a: f64, ratio: f64) -> Result<Self, ModelError> {
        check_price(x_a)?;
        if !(ratio.is_finite() && ratio > -1.0) {
            return Err(ModelError::InvalidRatio(ratio));
        }
        Ok(Self {
            x_a,
            x_b: x_a * (1.0 + ratio),
            ratio,
        })
    }

    /// Displacement in price units, `x_B - x_A`.
    pub fn points(&self) -> f64 {
        self.x_b - self.x_a
    }
}

fn check_price(p: f64) -> Result<(), ModelError> {
    if p.is_finite() && p > 0.0 {
        Ok(())
    } else {
        Err(ModelError::InvalidPrice(p))
    }
}

/// `x = x_B / x_A - 1`.
pub fn displacement_ratio(x_a: f64, x_b: f64) -> Result<Displacement, ModelError> {
    check_price(x_a)?;
    check_price(x_b)?;
    Ok(Displacement {
        x_a,
        x_b,
        ratio: x_b / x_a - 1.0,
    })
}

/// Principal-branch phase `arcsin(x / R)`.
pub fn phase_from_ratio(x: f64, amplitude: f64) -> Result<f64, ModelError> {
    if !(amplitude.is_finite() && amplitude > 0.0) {
        return Err(ModelError::InvalidAmplitude(amplitude));
    }
    if !x.is_finite() {
        return Err(ModelError::InvalidRatio(x));
    }
    let s = x / amplitude;
    if s.abs() > 1.0 + PHASE_CLAMP_TOLERANCE {
        return Err(ModelError::ExceedsExtreme { x, amplitude });
    }
    Ok(s.clamp(-1.0, 1.0).asin())
}

/// State of `ψ` (or `ψ*`) at the end of a slice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub phi: f64,
    pub amplitude: f64,
    pub psi_re: f64,
    pub psi_im: f64,
}

impl PhaseState {
    pub fn modulus(&self) -> f64 {
        self.psi_re.hypot(self.psi_im)
    }

    /// Mirror across the real axis.
    pub fn conjugate(&self) -> Self {
        Self {
            psi_im: -self.psi_im,
            ..*self
        }
    }

    /// `½(self + other)` as `(re, im)`.
    pub fn median_with(&self, other: &PhaseState) -> (f64, f64) {
        (
            0.5 * (self.psi_re + other.psi_re),
            0.5 * (self.psi_im + other.psi_im),
        )
    }
}

/// The wave pair `(ψ, ψ*)` for phase `phi` and amplitude `R`.
pub fn psi_pair(phi: f64, amplitude: f64) -> Result<(PhaseState, PhaseState), ModelError> {
    if !(phi.is_finite() && phi.abs() <= FRAC_PI_2) {
        return Err(ModelError::InvalidPhase(phi));
    }
    if !(amplitude.is_finite() && amplitude > 0.0) {
        return Err(ModelError::InvalidAmplitude(amplitude));
    }
    let (sin, cos) = phi.sin_cos();
    let psi = PhaseState {
        phi,
        amplitude,
        psi_re: amplitude * sin,
        psi_im: amplitude * cos,
    };
    Ok((psi, psi.conjugate()))
}

/// Restoring constant implied by the phase, `k = m φ² / t²`.
pub fn stiffness(params: &OscillatorParams, phi: f64) -> f64 {
    params.m * phi * phi / (params.t * params.t)
}

/// `S = m x² / (2t)`.
pub fn action(params: &OscillatorParams, x: f64) -> f64 {
    params.m * x * x / (2.0 * params.t)
}

/// First-order series value of the action, `(m x² / 2)(2 - t)`.
pub fn action_first_order(params: &OscillatorParams, x: f64) -> f64 {
    0.5 * params.m * x * x * (2.0 - params.t)
}

/// Action in phase form, `S = u²` with `u = 2π sin φ`.
pub fn action_from_phase(phi: f64) -> f64 {
    let u = TAU * phi.sin();
    u * u
}

/// Slice-average energies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyTerms {
    pub potential: f64,
    pub kinetic: f64,
    pub work: f64,
    pub lagrangian: f64,
}

/// Energies over one slice using the average velocity `x / t`.
///
/// At slice scale the potential at the start equals the kinetic energy at
/// the end and the work done, so all three carry the same value; the
/// Lagrangian is taken at the slice start where the kinetic term vanishes.
pub fn energies(params: &OscillatorParams, x: f64) -> EnergyTerms {
    let velocity = x / params.t;
    let kinetic = 0.5 * params.m * velocity * velocity;
    EnergyTerms {
        potential: kinetic,
        kinetic,
        work: kinetic,
        lagrangian: -kinetic,
    }
}

/// Angular frequency and frequency of a phase advance over `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frequencies {
    pub omega: f64,
    pub nu: f64,
}

pub fn frequencies(phi: f64, t: f64) -> Result<Frequencies, ModelError> {
    if !(t.is_finite() && t > 0.0) {
        return Err(ModelError::InvalidTime(t));
    }
    Ok(Frequencies {
        omega: phi / t,
        nu: phi / (TAU * t),
    })
}

/// Normalization constants `(Q_ψ, Q_x) = (1/√π, √(m / 2πt))`.
pub fn normalization_constants(params: &OscillatorParams) -> (f64, f64) {
    (FRAC_1_SQRT_PI, (params.m / (TAU * params.t)).sqrt())
}

/// Density of the phase, `Q_ψ e^{-φ²}`.
pub fn prob_psi(phi: f64) -> f64 {
    FRAC_1_SQRT_PI * (-phi * phi).exp()
}

/// Density of the displacement, `(Q_x e^{-S})²`. Not re-normalized.
pub fn prob_x(params: &OscillatorParams, x: f64) -> f64 {
    let (_, q_x) = normalization_constants(params);
    let v = q_x * (-action(params, x)).exp();
    v * v
}

/// Tail law `Pr(|x| ≥ X) = erfc(X √(m / 2t))²`.
pub fn prob_at_least(params: &OscillatorParams, threshold: f64) -> Result<f64, ModelError> {
    if !(threshold.is_finite() && threshold >= 0.0) {
        return Err(ModelError::InvalidThreshold(threshold));
    }
    let e = specfun::erfc(threshold * tail_scale(params))?;
    Ok(e * e)
}

/// `√(m / 2t)`, the factor turning a displacement into an erfc argument.
pub(crate) fn tail_scale(params: &OscillatorParams) -> f64 {
    (params.m / (2.0 * params.t)).sqrt()
}

/// Extreme displacement `R = π √(8t / m)`.
pub fn extreme_displacement(params: &OscillatorParams) -> f64 {
    PI * (8.0 * params.t / params.m).sqrt()
}
