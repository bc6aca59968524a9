//! Complementary error function and its inverse.
//!
//! `erfc` is split at |z| = 2:
//!
//! ```text
//! |z| < 2 : erf(z) = (2/√π) z e^{-z²} Σ (2z²)^n / (1·3·…·(2n+1)),  erfc = 1 - erf
//! z  >= 2 : erfc(z) = e^{-z²} / (√π · (z + (1/2)/(z + 1/(z + (3/2)/(z + …)))))
//! z <= -2 : erfc(z) = 2 - erfc(-z)
//! ```
//!
//! The series has only positive terms, so it does not cancel; the continued
//! fraction is evaluated with the modified Lentz algorithm. `erfc_inv` starts
//! from Acklam's rational approximation to the normal quantile and polishes
//! with Halley steps on `erfc`.

use thiserror::Error;

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
/// 1/√π
pub const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_286_948_079_451_560_772_585_844_050_629_329;

const SERIES_CUTOFF: f64 = 2.0;
const MAX_SERIES_TERMS: usize = 200;
const MAX_CF_TERMS: usize = 2000;
const TINY: f64 = 1.0e-300;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SpecfunError {
    #[error("erfc: argument must be finite, got {0}")]
    NonFinite(f64),
    #[error("erfc_inv: argument must lie in (0, 2), got {0}")]
    OutOfDomain(f64),
}

/// How `erfc_inv_with` treats the closed endpoints p = 0 and p = 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Endpoints {
    /// p = 0 and p = 2 are domain errors.
    #[default]
    Reject,
    /// p = 0 maps to +∞ and p = 2 to −∞.
    Infinite,
}

/// Complementary error function `erfc(z) = 1 - erf(z)`.
pub fn erfc(z: f64) -> Result<f64, SpecfunError> {
    if !z.is_finite() {
        return Err(SpecfunError::NonFinite(z));
    }
    Ok(erfc_finite(z))
}

pub(crate) fn erfc_finite(z: f64) -> f64 {
    if z.abs() < SERIES_CUTOFF {
        1.0 - erf_series(z)
    } else if z > 0.0 {
        erfc_continued_fraction(z)
    } else {
        2.0 - erfc_continued_fraction(-z)
    }
}

fn erf_series(z: f64) -> f64 {
    let z2 = z * z;
    let two_z2 = 2.0 * z2;
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 1..MAX_SERIES_TERMS {
        term *= two_z2 / (2 * n + 1) as f64;
        sum += term;
        if term <= sum * f64::EPSILON * 0.5 {
            break;
        }
    }
    FRAC_2_SQRT_PI * z * (-z2).exp() * sum
}

/// Modified Lentz evaluation of `z + a1/(z + a2/(z + …))` with `a_n = n/2`.
fn erfc_continued_fraction(z: f64) -> f64 {
    debug_assert!(z > 0.0);
    let mut f = z;
    let mut c = f;
    let mut d = 0.0;
    for n in 1..MAX_CF_TERMS {
        let a = 0.5 * n as f64;
        d = z + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = z + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() <= f64::EPSILON {
            break;
        }
    }
    (-z * z).exp() * FRAC_1_SQRT_PI / f
}

/// Inverse of [`erfc`] on the open interval (0, 2).
pub fn erfc_inv(p: f64) -> Result<f64, SpecfunError> {
    erfc_inv_with(p, Endpoints::Reject)
}

/// Inverse of [`erfc`], optionally mapping the closed endpoints to ±∞.
pub fn erfc_inv_with(p: f64, endpoints: Endpoints) -> Result<f64, SpecfunError> {
    if !(0.0..=2.0).contains(&p) {
        return Err(SpecfunError::OutOfDomain(p));
    }
    if p == 0.0 || p == 2.0 {
        return match endpoints {
            Endpoints::Reject => Err(SpecfunError::OutOfDomain(p)),
            Endpoints::Infinite if p == 0.0 => Ok(f64::INFINITY),
            Endpoints::Infinite => Ok(f64::NEG_INFINITY),
        };
    }
    if p == 1.0 {
        return Ok(0.0);
    }
    if p > 1.0 {
        // 2 - p is exact for p in [1, 2].
        return Ok(-erfc_inv_lower(2.0 - p));
    }
    Ok(erfc_inv_lower(p))
}

/// erfc_inv for p in (0, 1); the result is positive.
fn erfc_inv_lower(p: f64) -> f64 {
    // erfc(x) = 2 Φ(-x√2), so x = -Φ⁻¹(p/2)/√2.
    let mut x = -normal_quantile_acklam(0.5 * p) * std::f64::consts::FRAC_1_SQRT_2;
    for _ in 0..3 {
        let slope = -FRAC_2_SQRT_PI * (-x * x).exp();
        if slope == 0.0 {
            break;
        }
        let u = (erfc_finite(x) - p) / slope;
        // Halley: erfc'' = -2x erfc'
        let step = u / (1.0 + x * u);
        x -= step;
        if step.abs() <= f64::EPSILON * x.abs() {
            break;
        }
    }
    x
}

/// Acklam's rational approximation to the standard normal quantile,
/// relative error about 1.15e-9 over (0, 1).
fn normal_quantile_acklam(q: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239e0,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838e0,
        -2.549_732_539_343_734e0,
        4.374_664_141_464_968e0,
        2.938_163_982_698_783e0,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996e0,
        3.754_408_661_907_416e0,
    ];
    const Q_LOW: f64 = 0.02425;

    let tail = |r: f64| {
        (((((C[0] * r + C[1]) * r + C[2]) * r + C[3]) * r + C[4]) * r + C[5])
            / ((((D[0] * r + D[1]) * r + D[2]) * r + D[3]) * r + 1.0)
    };
    if q < Q_LOW {
        tail((-2.0 * q.ln()).sqrt())
    } else if q <= 1.0 - Q_LOW {
        let s = q - 0.5;
        let r = s * s;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * s
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -tail((-2.0 * (1.0 - q).ln()).sqrt())
    }
}
