//! Physical parameters and the deterministic geometry / path-loss / fading
//! primitives every other module consumes.
//!
//! Distances are meters, powers are linear watts, densities are per m^2.
//! The path-loss law is `g(d) = beta * (d + 1)^(-alpha)` with `alpha > 2`,
//! where `beta` is the mean power gain at the 1 m reference distance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nominal speed of light used to derive `beta` from a carrier frequency.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

/// Deployment scenario selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scenario {
    /// Typical user beyond a guard distance, served jointly by its nearest BS
    /// and that BS's RIS ring.
    ThroughputEnhancement,
    /// User at the center of a coverage hole at distance `r_H = c_hole /
    /// sqrt(lambda_bs)` from its BS, direct link attenuated by `penalty_k`,
    /// RIS ring centered on the hole.
    CoverageHole,
}

/// Full physical/geometric parameter set.
///
/// `lambda_ris` is the per-cluster ring intensity (RIS per m^2 of ring), not
/// an area-wide density. `penalty_k >= 1` divides the direct-link power in
/// the coverage-hole scenario (`1` means no blockage penalty).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// BS density, per m^2.
    pub lambda_bs: f64,
    /// RIS intensity on each cluster ring, per m^2 of ring.
    pub lambda_ris: f64,
    /// Ring inner radius, m.
    pub r_in: f64,
    /// Ring outer radius, m.
    pub r_out: f64,
    /// Guard-zone radius, m (throughput scenario).
    pub r_guard: f64,
    /// Transmit power, W.
    pub p0: f64,
    /// Noise power, W.
    pub noise_power: f64,
    /// Path-loss exponent, must satisfy `alpha > 2`.
    pub alpha: f64,
    /// Mean power gain at the 1 m reference distance.
    pub beta: f64,
    /// RIS elements per panel.
    pub m_elements: u32,
    /// Mean of the per-element composite fading magnitude `|zeta|`.
    pub zeta_mean: f64,
    /// Variance of `|zeta|`; must be positive.
    pub zeta_var: f64,
    /// Linear direct-link power attenuation (>= 1) in the coverage-hole
    /// scenario; the received direct power is divided by this factor.
    pub penalty_k: f64,
    /// Coverage-hole distance constant `C_H` in `r_H = C_H / sqrt(lambda_bs)`.
    pub c_hole: f64,
    /// Scenario selector.
    pub scenario: Scenario,
}

impl SystemParams {
    /// Reference power gain at 1 m for a given carrier frequency.
    pub fn beta_from_carrier(carrier_hz: f64) -> f64 {
        SPEED_OF_LIGHT / (4.0 * std::f64::consts::PI * carrier_hz)
    }

    /// Checks every model invariant; call once at ingestion or test setup.
    pub fn validate(&self) -> Result<()> {
        fn req(cond: bool, msg: &str) -> Result<()> {
            if cond {
                Ok(())
            } else {
                Err(Error::InvalidParameter(msg.to_string()))
            }
        }
        req(self.alpha > 2.0, "alpha must be > 2")?;
        req(
            self.lambda_bs >= 0.0 && self.lambda_ris >= 0.0,
            "densities must be >= 0",
        )?;
        req(
            self.r_in >= 0.0 && self.r_out > self.r_in,
            "ring radii must satisfy 0 <= r_in < r_out",
        )?;
        req(self.r_guard >= 0.0, "guard radius must be >= 0")?;
        req(self.p0 >= 0.0, "p0 must be >= 0")?;
        req(self.noise_power >= 0.0, "noise power must be >= 0")?;
        req(self.beta > 0.0, "beta must be > 0")?;
        req(self.m_elements >= 1, "m_elements must be >= 1")?;
        req(self.zeta_mean >= 0.0, "zeta_mean must be >= 0")?;
        req(self.zeta_var > 0.0, "zeta_var must be > 0")?;
        req(self.penalty_k >= 1.0, "penalty_k must be >= 1 (linear)")?;
        req(self.c_hole > 0.0, "c_hole must be > 0")?;
        for (name, v) in [
            ("lambda_bs", self.lambda_bs),
            ("lambda_ris", self.lambda_ris),
            ("p0", self.p0),
            ("noise_power", self.noise_power),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("zeta_mean", self.zeta_mean),
            ("zeta_var", self.zeta_var),
            ("penalty_k", self.penalty_k),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} is not finite")));
            }
        }
        Ok(())
    }

    /// The cluster ring of this parameter set.
    pub fn ring(&self) -> ClusterRing {
        ClusterRing::new(self.r_in, self.r_out)
    }

    /// Mean number of RIS per cluster ring.
    pub fn mean_ris_per_cluster(&self) -> f64 {
        self.lambda_ris * self.ring().area()
    }
}

/// Ring annulus carrying one cluster's RIS panels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterRing {
    pub r_in: f64,
    pub r_out: f64,
}

impl ClusterRing {
    pub fn new(r_in: f64, r_out: f64) -> Self {
        Self { r_in, r_out }
    }

    /// Ring area `pi * (r_out^2 - r_in^2)`.
    pub fn area(&self) -> f64 {
        std::f64::consts::PI * (self.r_out * self.r_out - self.r_in * self.r_in)
    }
}

// ---------------------------------------------------------------------------
// Path loss and geometry
// ---------------------------------------------------------------------------

/// Power path gain `g(d) = beta * (d + 1)^(-alpha)` for distance `d >= 0`.
pub fn pathloss(d: f64, params: &SystemParams) -> f64 {
    params.beta * (d + 1.0).powf(-params.alpha)
}

/// Derivative `dg/dd = -alpha * beta * (d + 1)^(-alpha - 1)`; negative for
/// every `d >= 0`.
pub fn pathloss_derivative(d: f64, params: &SystemParams) -> f64 {
    -params.alpha * params.beta * (d + 1.0).powf(-params.alpha - 1.0)
}

/// Two-segment reflected path gain `G(r, y, psi) = g(y) * g(l)` with
/// `l = sqrt(r^2 + y^2 - 2 r y cos(psi))`.
///
/// `r` and `y` are the two anchor distances and `psi` the angle between
/// them at the common vertex; the product is symmetric in which segment is
/// BS-to-RIS and which is RIS-to-user.
pub fn reflected_pathloss(r: f64, y: f64, psi: f64, params: &SystemParams) -> f64 {
    pathloss(y, params) * pathloss(segment_length(r, y, psi), params)
}

/// Third side of the (r, y, psi) triangle.
pub fn segment_length(r: f64, y: f64, psi: f64) -> f64 {
    let l2 = r * r + y * y - 2.0 * r * y * psi.cos();
    l2.max(0.0).sqrt()
}

/// Derivative of `reflected_pathloss` with respect to `r` at fixed (y, psi).
pub fn reflected_pathloss_dr(r: f64, y: f64, psi: f64, params: &SystemParams) -> f64 {
    let l = segment_length(r, y, psi);
    if l == 0.0 {
        return 0.0;
    }
    let dl_dr = (r - y * psi.cos()) / l;
    pathloss(y, params) * pathloss_derivative(l, params) * dl_dr
}

/// Mean hole-to-BS distance `r_H = c_hole / sqrt(lambda_bs)` and its
/// derivative with respect to the BS density,
/// `-c_hole / (2 * lambda_bs^(3/2))`.
pub fn hole_distance(lambda_bs: f64, c_hole: f64) -> Result<(f64, f64)> {
    if !(lambda_bs > 0.0) {
        return Err(Error::InvalidParameter(
            "hole distance requires lambda_bs > 0".into(),
        ));
    }
    if !(c_hole > 0.0) {
        return Err(Error::InvalidParameter(
            "hole distance requires c_hole > 0".into(),
        ));
    }
    let sqrt_l = lambda_bs.sqrt();
    let r_h = c_hole / sqrt_l;
    let dr_h = -c_hole / (2.0 * lambda_bs * sqrt_l);
    Ok((r_h, dr_h))
}

// ---------------------------------------------------------------------------
// Composite fading moments
// ---------------------------------------------------------------------------

/// Moments of the per-element composite fading magnitude `|zeta| = |rho_1| *
/// |rho_2|`, where both hops are Rician with unit mean power and K-factors
/// `k1`, `k2` (linear, >= 0).
///
/// Returns `(E|zeta|, V|zeta|)`. Since `E|rho|^2 = 1` on both hops,
/// `E|zeta|^2 = 1` and `V|zeta| = 1 - (E|zeta|)^2`.
pub fn rician_product_moments(k1: f64, k2: f64) -> Result<(f64, f64)> {
    if k1 < 0.0 || k2 < 0.0 || !k1.is_finite() || !k2.is_finite() {
        return Err(Error::InvalidParameter(
            "Rician K-factors must be finite and >= 0".into(),
        ));
    }
    let mean = rice_magnitude_mean(k1) * rice_magnitude_mean(k2);
    Ok((mean, 1.0 - mean * mean))
}

/// Mean magnitude of a unit-power Rician variable with K-factor `k`:
/// `sqrt(pi / (4 (k+1))) * exp(-k/2) * ((1+k) I0(k/2) + k I1(k/2))`.
fn rice_magnitude_mean(k: f64) -> f64 {
    // Large K: expand around the deterministic limit to avoid exp/Bessel
    // overflow; E|rho| -> 1 - 1/(8k) + O(1/k^2) at unit power.
    if k > 700.0 {
        return 1.0 - 1.0 / (8.0 * k) - 1.0 / (16.0 * k * k);
    }
    let half = 0.5 * k;
    let laguerre = (-half).exp() * ((1.0 + k) * bessel_i0(half) + k * bessel_i1(half));
    (std::f64::consts::PI / (4.0 * (k + 1.0))).sqrt() * laguerre
}

/// Modified Bessel function I0; power series below 15, asymptotic above.
fn bessel_i0(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 15.0 {
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        for m in 1..80 {
            term *= q / ((m * m) as f64);
            sum += term;
            if term < sum * 1e-17 {
                break;
            }
        }
        sum
    } else {
        let inv = 1.0 / ax;
        let series = 1.0
            + inv * (0.125 + inv * (0.0703125 + inv * (0.0732421875 + inv * 0.112152099609375)));
        ax.exp() / (2.0 * std::f64::consts::PI * ax).sqrt() * series
    }
}

/// Modified Bessel function I1; same split as [`bessel_i0`].
fn bessel_i1(x: f64) -> f64 {
    let ax = x.abs();
    let val = if ax < 15.0 {
        let q = 0.25 * x * x;
        let mut term = 0.5 * ax;
        let mut sum = term;
        for m in 1..80 {
            term *= q / ((m * (m + 1)) as f64);
            sum += term;
            if term < sum * 1e-17 {
                break;
            }
        }
        sum
    } else {
        let inv = 1.0 / ax;
        let series = 1.0
            - inv * (0.375 + inv * (0.1171875 + inv * (0.1025390625 + inv * 0.144195556640625)));
        ax.exp() / (2.0 * std::f64::consts::PI * ax).sqrt() * series
    };
    if x < 0.0 {
        -val
    } else {
        val
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
