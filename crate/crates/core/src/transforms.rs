//! Bilateral Laplace / characteristic transforms of the interference field,
//! the reflected-beam signal, and the noise, plus the strip of convergence.
//!
//! With threshold `T`, serving distance `r` and argument `z`, the composite
//! variable `Upsilon = T (I + sigma^2) - S_R` has
//!
//! ```text
//! B_Upsilon(z) = exp(lambda_bs * D_BS(zT))      interference (PPP beyond r)
//!              * exp(lambda_ris * D_RIS(z))     reflected beams (ring)
//!              * exp(-z T sigma^2)              noise
//! ```
//!
//! `D_BS(w) = -2 pi Int_r^inf x * w P0 g(x) / (1 + w P0 g(x)) dx` and
//! `D_RIS(z) = -Int_ring y (1 - L_beam(-z P0 G(r, y, psi))) dpsi dy`, where
//! `L_beam` is the transform of the squared Gaussian beam gain.
//!
//! The same expressions serve the coverage-hole scenario with `r` replaced by
//! the hole distance; callers fold the direct-link penalty into the
//! evaluation point.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{pathloss, pathloss_derivative, segment_length, SystemParams};
use crate::quad::{integrate_finite_multi, integrate_semi_infinite_multi, QuadratureConfig};

/// Complex scalar used throughout transform evaluation.
pub type ComplexValue = Complex64;

/// Strip of convergence `Re(z) in (s_a, s_b)` of the bilateral transform.
/// `s_a` is set by the interference fading pole, `s_b` by the reflected-beam
/// transform; either can be infinite when the corresponding factor is absent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocBounds {
    pub s_a: f64,
    pub s_b: f64,
}

// ---------------------------------------------------------------------------
// Elementary transforms
// ---------------------------------------------------------------------------

/// Transform of the unit-mean exponential direct-fading power: `1 / (1 + z)`.
pub fn lt_direct_fading(z: ComplexValue) -> Result<ComplexValue> {
    let denom = 1.0 + z;
    if denom.norm_sqr() < 1e-280 {
        return Err(Error::TransformPole { re: z.re, im: z.im });
    }
    Ok(denom.inv())
}

/// Beam-gain second moments used by the reflected transform:
/// `a = (M E|zeta|)^2`, `b = 2 M V|zeta|`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BeamMoments {
    pub a: f64,
    pub b: f64,
}

impl BeamMoments {
    pub fn of(params: &SystemParams) -> Self {
        let m = params.m_elements as f64;
        Self {
            a: (m * params.zeta_mean).powi(2),
            b: 2.0 * m * params.zeta_var,
        }
    }
}

/// Transform of the squared Gaussian beam amplitude `X^2`,
/// `X ~ Normal(M E|zeta|, M V|zeta|)`:
///
/// `exp(-s (M E)^2 / (1 + 2 s M V)) / sqrt(1 + 2 s M V)`,
/// valid for `Re(s) > -1 / (2 M V)`.
pub fn lt_beam_power(
    s: ComplexValue,
    m_elements: u32,
    zeta_mean: f64,
    zeta_var: f64,
) -> Result<ComplexValue> {
    let m = m_elements as f64;
    let a = (m * zeta_mean).powi(2);
    let b = 2.0 * m * zeta_var;
    if s.re <= -1.0 / b {
        return Err(Error::OutsideRoc {
            s_eval: s.re,
            s_a: -1.0 / b,
            s_b: f64::INFINITY,
        });
    }
    lt_beam_power_inner(s, &BeamMoments { a, b })
}

#[inline]
fn lt_beam_power_inner(s: ComplexValue, beam: &BeamMoments) -> Result<ComplexValue> {
    let denom = 1.0 + beam.b * s;
    // inside the strip Re(denom) > 0, so the principal square root never
    // crosses the branch cut
    if denom.re <= 0.0 {
        return Err(Error::OutsideRoc {
            s_eval: s.re,
            s_a: -1.0 / beam.b,
            s_b: f64::INFINITY,
        });
    }
    let val = (-s * beam.a / denom).exp() / denom.sqrt();
    if !val.re.is_finite() || !val.im.is_finite() {
        return Err(Error::NonFinite("lt_beam_power"));
    }
    Ok(val)
}

/// `d/dw` of [`lt_beam_power`] at argument `w`, as `L'(w) = -L(w) * (a + b/2 *
/// (1 + b w)) / (1 + b w)^2`.
#[inline]
fn lt_beam_power_prime(w: ComplexValue, beam: &BeamMoments) -> Result<ComplexValue> {
    let denom = 1.0 + beam.b * w;
    let l = lt_beam_power_inner(w, beam)?;
    Ok(-l * (beam.a + 0.5 * beam.b * denom) / (denom * denom))
}

// ---------------------------------------------------------------------------
// Exponent integrals
// ---------------------------------------------------------------------------

/// Interference exponent per unit BS density,
/// `D_BS(sT) = -2 pi Int_{r_min}^inf x * sT P0 g(x) / (1 + sT P0 g(x)) dx`.
pub fn exponent_d_bs(
    s: ComplexValue,
    threshold: f64,
    r_min: f64,
    params: &SystemParams,
    cfg: &QuadratureConfig,
) -> Result<ComplexValue> {
    let (core, _) = d_bs_pass(s * threshold, r_min, params, cfg, false)?;
    Ok(core)
}

/// Shared interference-exponent pass. Argument `w = z * T`. Returns
/// `(D_BS(w), D_BS'(w))`; the derivative (with respect to the full complex
/// argument `z`, at fixed `T`) is only computed when `with_prime` is set.
pub(crate) fn d_bs_pass(
    w: ComplexValue,
    r_min: f64,
    params: &SystemParams,
    cfg: &QuadratureConfig,
    with_prime: bool,
) -> Result<(ComplexValue, ComplexValue)> {
    if w.norm_sqr() == 0.0 {
        return Ok((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)));
    }
    let a0 = params.p0 * pathloss(r_min, params); // largest P0 g on the range
    if w.im == 0.0 && w.re < 0.0 && w.re * a0 <= -1.0 {
        return Err(Error::TransformPole { re: w.re, im: w.im });
    }
    // crossover |w| P0 g(x) ~ 1 sets the integrand scale
    let xstar = (w.norm() * params.p0 * params.beta).powf(1.0 / params.alpha);
    let scale = xstar.max(r_min).max(1.0);
    let p0 = params.p0;
    let integrand = |x: f64| -> [f64; 4] {
        let a = p0 * pathloss(x, params);
        let za = w * a;
        let denom = 1.0 + za;
        let core = x * za / denom;
        if with_prime {
            let prime = x * a / (denom * denom);
            [core.re, core.im, prime.re, prime.im]
        } else {
            [core.re, core.im, 0.0, 0.0]
        }
    };
    let est = integrate_semi_infinite_multi(&integrand, r_min, scale, cfg, false)?;
    let two_pi = 2.0 * std::f64::consts::PI;
    let core = -two_pi * Complex64::new(est.value[0], est.value[1]);
    let prime = -two_pi * Complex64::new(est.value[2], est.value[3]);
    Ok((core, prime))
}

/// Reflected-signal exponent per unit ring intensity,
/// `D_RIS(s) = -Int_0^{2pi} Int_{R_in}^{R_out} y (1 - L_beam(-s P0 G)) dy dpsi`.
pub fn exponent_d_ris(
    s: ComplexValue,
    serve_dist: f64,
    params: &SystemParams,
    cfg: &QuadratureConfig,
) -> Result<ComplexValue> {
    let beam = BeamMoments::of(params);
    let pass = ring_pass(s, serve_dist, params, &beam, cfg, false)?;
    Ok(pass.d_ris)
}

pub(crate) struct RingPass {
    pub d_ris: ComplexValue,
    /// `Int Int y L'(w) dG/dr dpsi dy` (anchor-distance channel core).
    pub grad_r: ComplexValue,
    /// `Int Int y L'(w) G dpsi dy` (argument channel core).
    pub grad_s: ComplexValue,
}

/// Shared ring integral. The angle integral uses doubling trapezoid sums
/// (the integrand is smooth and periodic, and even about psi = pi), the
/// radial integral adaptive Gauss-Kronrod.
pub(crate) fn ring_pass(
    z: ComplexValue,
    anchor: f64,
    params: &SystemParams,
    beam: &BeamMoments,
    cfg: &QuadratureConfig,
    with_channels: bool,
) -> Result<RingPass> {
    if z.norm_sqr() == 0.0 {
        let zero = Complex64::new(0.0, 0.0);
        return Ok(RingPass {
            d_ris: zero,
            grad_r: zero,
            grad_s: zero,
        });
    }
    // strip check against the strongest ring point
    let g_max = ring_gain_max(anchor, params);
    if z.re * params.p0 * g_max * beam.b >= 1.0 {
        return Err(Error::OutsideRoc {
            s_eval: z.re,
            s_a: f64::NEG_INFINITY,
            s_b: 1.0 / (beam.b * params.p0 * g_max),
        });
    }
    let p0 = params.p0;
    let psi_tol = cfg.rel_tol.max(1e-13);

    let radial = |y: f64| -> [f64; 6] {
        let g_y = pathloss(y, params);
        // f(psi) even about pi: integrate [0, pi], double at the end
        let eval = |psi: f64| -> [Complex64; 3] {
            let ell = segment_length(anchor, y, psi);
            let g_total = g_y * pathloss(ell, params);
            let w = -z * (p0 * g_total);
            let denom = 1.0 + beam.b * w;
            debug_assert!(denom.re > 0.0, "beam transform left its strip");
            let l = (-w * beam.a / denom).exp() / denom.sqrt();
            let one_minus = 1.0 - l;
            if !with_channels {
                return [one_minus, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)];
            }
            let lprime = -l * (beam.a + 0.5 * beam.b * denom) / (denom * denom);
            let dg_dr = if ell > 0.0 {
                g_y * pathloss_derivative(ell, params) * (anchor - y * psi.cos()) / ell
            } else {
                0.0
            };
            [one_minus, lprime * dg_dr, lprime * g_total]
        };

        // trapezoid with node reuse: T_2N = T_N / 2 + h' * sum(midpoints)
        let pi = std::f64::consts::PI;
        let mut n = 8usize;
        let ends = eval(0.0);
        let fpi = eval(pi);
        let mut sums = [Complex64::new(0.0, 0.0); 3];
        for (k, s) in sums.iter_mut().enumerate() {
            *s = 0.5 * (ends[k] + fpi[k]);
        }
        for j in 1..n {
            let v = eval(pi * j as f64 / n as f64);
            for (k, s) in sums.iter_mut().enumerate() {
                *s += v[k];
            }
        }
        let mut prev = [Complex64::new(0.0, 0.0); 3];
        for (k, p) in prev.iter_mut().enumerate() {
            *p = sums[k] * (pi / n as f64);
        }
        loop {
            let h = pi / (2 * n) as f64;
            let mut mid = [Complex64::new(0.0, 0.0); 3];
            for j in 0..n {
                let v = eval(pi * (2 * j + 1) as f64 / (2 * n) as f64);
                for (k, m) in mid.iter_mut().enumerate() {
                    *m += v[k];
                }
            }
            let mut cur = [Complex64::new(0.0, 0.0); 3];
            let mut settled = true;
            for k in 0..3 {
                cur[k] = 0.5 * prev[k] + h * mid[k];
                let delta = (cur[k] - prev[k]).norm();
                if delta > psi_tol * (cur[k].norm() + 1e-14) {
                    settled = false;
                }
            }
            n *= 2;
            prev = cur;
            if settled || n >= 2048 {
                break;
            }
        }
        // double for the [pi, 2 pi] half, weight by y
        [
            2.0 * y * prev[0].re,
            2.0 * y * prev[0].im,
            2.0 * y * prev[1].re,
            2.0 * y * prev[1].im,
            2.0 * y * prev[2].re,
            2.0 * y * prev[2].im,
        ]
    };

    let est = integrate_finite_multi(&radial, params.r_in, params.r_out, cfg, false)?;
    Ok(RingPass {
        d_ris: -Complex64::new(est.value[0], est.value[1]),
        grad_r: Complex64::new(est.value[2], est.value[3]),
        grad_s: Complex64::new(est.value[4], est.value[5]),
    })
}

/// Largest two-segment ring gain `max_y g(y) g(|anchor - y|)`; the angular
/// maximizer is always `psi = 0`. Coarse grid plus golden-section refinement.
pub(crate) fn ring_gain_max(anchor: f64, params: &SystemParams) -> f64 {
    let f = |y: f64| pathloss(y, params) * pathloss((anchor - y).abs(), params);
    let n = 64;
    let mut best_y = params.r_in;
    let mut best = f64::MIN;
    for i in 0..=n {
        let y = params.r_in + (params.r_out - params.r_in) * i as f64 / n as f64;
        let v = f(y);
        if v > best {
            best = v;
            best_y = y;
        }
    }
    let span = (params.r_out - params.r_in) / n as f64;
    let (mut lo, mut hi) = (
        (best_y - span).max(params.r_in),
        (best_y + span).min(params.r_out),
    );
    let phi = 0.5 * (3.0 - 5f64.sqrt());
    for _ in 0..60 {
        let d = hi - lo;
        let (x1, x2) = (lo + phi * d, hi - phi * d);
        if f(x1) >= f(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    best.max(f(0.5 * (lo + hi)))
}

// ---------------------------------------------------------------------------
// Composite transform and strip probing
// ---------------------------------------------------------------------------

/// Composite transform `B_Upsilon(s)` at threshold `threshold` and serving
/// distance `serve_dist` (the interference exclusion radius and the ring
/// anchor distance).
pub fn b_upsilon(
    s: ComplexValue,
    threshold: f64,
    serve_dist: f64,
    params: &SystemParams,
    cfg: &QuadratureConfig,
) -> Result<ComplexValue> {
    let ctx = EvalContext::new(params, threshold, serve_dist, cfg.clone());
    Ok(ctx.eval(s, DerivLevel::Base)?.b)
}

/// Analytic strip bounds for the scenario evaluation point.
///
/// `s_b` comes from the reflected-beam transform maximized over the ring,
/// `s_a` from the interference fading pole at the exclusion radius. Errors if
/// the scenario evaluation point (`1/(P0 g(r))`, or `K/(P0 g(r_H))` for the
/// coverage-hole scenario) leaves the strip.
pub fn probe_roc(threshold: f64, serve_dist: f64, params: &SystemParams) -> Result<RocBounds> {
    params.validate()?;
    let beam = BeamMoments::of(params);
    let s_b = if params.lambda_ris > 0.0 {
        1.0 / (beam.b * params.p0 * ring_gain_max(serve_dist, params))
    } else {
        f64::INFINITY
    };
    let s_a = if params.lambda_bs > 0.0 && threshold > 0.0 {
        -1.0 / (threshold * params.p0 * pathloss(serve_dist, params))
    } else {
        f64::NEG_INFINITY
    };
    let s_eval = match params.scenario {
        crate::model::Scenario::ThroughputEnhancement => {
            1.0 / (params.p0 * pathloss(serve_dist, params))
        }
        crate::model::Scenario::CoverageHole => {
            params.penalty_k / (params.p0 * pathloss(serve_dist, params))
        }
    };
    if !(s_a < 0.0 && 0.0 < s_eval && s_eval < s_b) {
        return Err(Error::OutsideRoc { s_eval, s_a, s_b });
    }
    Ok(RocBounds { s_a, s_b })
}

// ---------------------------------------------------------------------------
// Fused evaluation context
// ---------------------------------------------------------------------------

/// How much of the derivative machinery an evaluation needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum DerivLevel {
    /// Transform value only.
    Base,
    /// Value plus the exponent factors (enough for the throughput-scenario
    /// density derivatives, which are linear in the exponents).
    Exponents,
    /// Everything, including the hole-distance and argument channels of the
    /// coverage-hole scenario.
    HoleChannels,
}

/// One evaluation of the composite transform and whatever derivative cores
/// were requested.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TransformEval {
    pub b: ComplexValue,
    /// `D_BS(zT)`.
    pub d_bs: ComplexValue,
    /// `D_RIS(z)`.
    pub d_ris: ComplexValue,
    /// `d/dz D_BS(zT)` at fixed threshold (argument channel core).
    pub d_bs_prime: ComplexValue,
    /// `dD_BS/dr0`, the lower-limit boundary term per unit change of the
    /// exclusion radius: `+2 pi r0 zT P0 g(r0) / (1 + zT P0 g(r0))`.
    pub d_bs_boundary: ComplexValue,
    /// Ring channel cores (see [`RingPass`]).
    pub d_ris_grad_r: ComplexValue,
    pub d_ris_grad_s: ComplexValue,
}

/// Everything fixed across one transform sweep: threshold, geometry, inner
/// quadrature config, beam moments.
pub(crate) struct EvalContext<'a> {
    pub params: &'a SystemParams,
    pub threshold: f64,
    pub serve_dist: f64,
    pub quad: QuadratureConfig,
    pub beam: BeamMoments,
}

impl<'a> EvalContext<'a> {
    pub fn new(
        params: &'a SystemParams,
        threshold: f64,
        serve_dist: f64,
        quad: QuadratureConfig,
    ) -> Self {
        Self {
            params,
            threshold,
            serve_dist,
            quad,
            beam: BeamMoments::of(params),
        }
    }

    /// Evaluates `B_Upsilon(z)` and the requested derivative cores.
    pub fn eval(&self, z: ComplexValue, level: DerivLevel) -> Result<TransformEval> {
        let p = self.params;
        let zero = Complex64::new(0.0, 0.0);
        let mut out = TransformEval {
            b: zero,
            d_bs: zero,
            d_ris: zero,
            d_bs_prime: zero,
            d_bs_boundary: zero,
            d_ris_grad_r: zero,
            d_ris_grad_s: zero,
        };
        let w = z * self.threshold;
        if p.lambda_bs > 0.0 || level != DerivLevel::Base {
            let with_prime = level == DerivLevel::HoleChannels;
            let (core, prime) = d_bs_pass(w, self.serve_dist, p, &self.quad, with_prime)?;
            out.d_bs = core;
            out.d_bs_prime = prime * self.threshold;
            if with_prime {
                let a0 = self.threshold * p.p0 * pathloss(self.serve_dist, p);
                let za = z * a0;
                out.d_bs_boundary =
                    2.0 * std::f64::consts::PI * self.serve_dist * za / (1.0 + za);
            }
        }
        if p.lambda_ris > 0.0 || level != DerivLevel::Base {
            let pass = ring_pass(
                z,
                self.serve_dist,
                p,
                &self.beam,
                &self.quad,
                level == DerivLevel::HoleChannels,
            )?;
            out.d_ris = pass.d_ris;
            out.d_ris_grad_r = pass.grad_r;
            out.d_ris_grad_s = pass.grad_s;
        }
        let exponent =
            p.lambda_bs * out.d_bs + p.lambda_ris * out.d_ris - z * self.threshold * p.noise_power;
        out.b = exponent.exp();
        if !out.b.re.is_finite() || !out.b.im.is_finite() {
            return Err(Error::NonFinite("b_upsilon"));
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Scenario;

    fn params() -> SystemParams {
        SystemParams {
            lambda_bs: 1e-5,
            lambda_ris: 5.0 / (std::f64::consts::PI * 500.0),
            r_in: 20.0,
            r_out: 30.0,
            r_guard: 50.0,
            p0: 1.0,
            noise_power: 1e-13,
            alpha: 3.0,
            beta: 0.1 / (4.0 * std::f64::consts::PI),
            m_elements: 600,
            zeta_mean: std::f64::consts::FRAC_PI_4,
            zeta_var: 1.0 - std::f64::consts::FRAC_PI_4 * std::f64::consts::FRAC_PI_4,
            penalty_k: 1.0,
            c_hole: 0.253,
            scenario: Scenario::ThroughputEnhancement,
        }
    }

    fn tight() -> QuadratureConfig {
        QuadratureConfig {
            rel_tol: 1e-11,
            abs_tol: 1e-13,
            ..Default::default()
        }
    }

    fn cclose(a: ComplexValue, re: f64, im: f64, tol: f64) -> bool {
        let want = Complex64::new(re, im);
        (a - want).norm() <= tol * want.norm().max(1.0)
    }

    #[test]
    fn direct_fading_values() {
        assert_eq!(
            lt_direct_fading(Complex64::new(0.0, 0.0)).unwrap(),
            Complex64::new(1.0, 0.0)
        );
        assert_eq!(
            lt_direct_fading(Complex64::new(1.0, 0.0)).unwrap(),
            Complex64::new(0.5, 0.0)
        );
        let v = lt_direct_fading(Complex64::new(0.0, 1.0)).unwrap();
        assert!(cclose(v, 0.5, -0.5, 1e-15));
        assert!(lt_direct_fading(Complex64::new(-1.0, 0.0)).is_err());
    }

    #[test]
    fn beam_power_normalization_and_range() {
        let v = lt_beam_power(Complex64::new(0.0, 0.0), 600, 0.785, 0.383).unwrap();
        assert!(cclose(v, 1.0, 0.0, 1e-15));
        for s in [1e-7, 1e-6, 1e-5] {
            let v = lt_beam_power(Complex64::new(s, 0.0), 600, 0.785, 0.383).unwrap();
            assert!(v.im == 0.0 && v.re > 0.0 && v.re < 1.0);
        }
    }

    #[test]
    fn beam_power_roc_boundary() {
        let bound = -1.0 / (2.0 * 600.0 * 0.383);
        assert!(lt_beam_power(Complex64::new(bound, 0.0), 600, 0.785, 0.383).is_err());
        assert!(lt_beam_power(Complex64::new(bound * 1.01, 0.0), 600, 0.785, 0.383).is_err());
        assert!(lt_beam_power(Complex64::new(bound * 0.99, 0.0), 600, 0.785, 0.383).is_ok());
    }

    #[test]
    fn beam_power_matches_monte_carlo() {
        // X ~ Normal(M E, sqrt(M V)); E[exp(-s X^2)] via 10^6 draws
        use rand::{Rng, SeedableRng};
        let (m, e, v) = (600u32, std::f64::consts::FRAC_PI_4, 0.38314972493191509);
        let mu = m as f64 * e;
        let sd = (m as f64 * v).sqrt();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        let n = 1_000_000;
        let s = 1e-5;
        let mut acc = 0.0;
        for _ in 0..n {
            let u1: f64 = rng.gen_range(1e-12..1.0);
            let u2: f64 = rng.gen_range(0.0..1.0);
            let x = mu + sd * (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
            acc += (-s * x * x).exp();
        }
        let emp = acc / n as f64;
        let ana = lt_beam_power(Complex64::new(s, 0.0), m, e, v).unwrap().re;
        assert!(
            (emp - ana).abs() / ana < 5e-3,
            "MC {emp:.6} vs analytic {ana:.6}"
        );
    }

    #[test]
    fn d_bs_shortcuts() {
        let p = params();
        let z = Complex64::new(0.0, 0.0);
        assert_eq!(
            exponent_d_bs(z, 1.0, 100.0, &p, &tight()).unwrap(),
            Complex64::new(0.0, 0.0)
        );
        let z = Complex64::new(2.0, 0.0);
        assert_eq!(
            exponent_d_bs(z, 0.0, 100.0, &p, &tight()).unwrap(),
            Complex64::new(0.0, 0.0)
        );
    }

    #[test]
    fn d_bs_reference_values() {
        // frozen mpmath references
        let mut p = params();
        p.beta = 1.0;
        p.alpha = 3.0;
        p.p0 = 1.0;
        let v = exponent_d_bs(Complex64::new(0.5, 0.3), 1.0, 1.0, &p, &tight()).unwrap();
        assert!(
            cclose(v, -1.16865276587998, -0.689936688731751, 1e-9),
            "{v}"
        );

        let mut p = params();
        p.beta = 0.7;
        p.alpha = 2.5;
        p.p0 = 2.0;
        let v = exponent_d_bs(Complex64::new(2.0, 0.0), 1.0, 0.5, &p, &tight()).unwrap();
        assert!(cclose(v, -20.6407108661141, 0.0, 1e-9), "{v}");

        let p = params();
        let v =
            exponent_d_bs(Complex64::new(1.0e6, -2.0e6), 1.0, 100.0, &p, &tight()).unwrap();
        assert!(cclose(v, -495.394970306139, 981.390576241454, 1e-8), "{v}");
    }

    #[test]
    fn d_bs_real_negative_for_positive_s() {
        let p = params();
        for s in [1e5, 1e7, 1e9] {
            let v = exponent_d_bs(Complex64::new(s, 0.0), 1.0, 100.0, &p, &tight()).unwrap();
            assert!(v.im.abs() < 1e-12 * v.re.abs());
            assert!(v.re < 0.0);
        }
    }

    #[test]
    fn d_bs_pole_detection() {
        let p = params();
        let a0 = p.p0 * pathloss(100.0, &p);
        let s = Complex64::new(-2.0 / a0, 0.0);
        assert!(matches!(
            exponent_d_bs(s, 1.0, 100.0, &p, &tight()),
            Err(Error::TransformPole { .. })
        ));
    }

    #[test]
    fn d_ris_reference_values() {
        let p = params();
        let v = exponent_d_ris(Complex64::new(1.0e8, 0.0), 100.0, &p, &tight()).unwrap();
        assert!(cclose(v, 154.971296163154, 0.0, 1e-8), "{v}");
        let v = exponent_d_ris(Complex64::new(1.0e8, -5.0e8), 100.0, &p, &tight()).unwrap();
        assert!(
            cclose(v, -101.940026023654, -755.538381817901, 1e-8),
            "{v}"
        );
    }

    #[test]
    fn d_ris_shortcuts_and_far_anchor() {
        let p = params();
        assert_eq!(
            exponent_d_ris(Complex64::new(0.0, 0.0), 100.0, &p, &tight()).unwrap(),
            Complex64::new(0.0, 0.0)
        );
        // far anchor: gains vanish, transform argument goes to 0
        let v = exponent_d_ris(Complex64::new(1.0e8, 0.0), 1.0e5, &p, &tight()).unwrap();
        assert!(v.norm() < 1e-4, "{v}");
    }

    #[test]
    fn b_upsilon_normalization_and_factor_reduction() {
        let p = params();
        let cfg = tight();
        let v = b_upsilon(Complex64::new(0.0, 0.0), 1.0, 100.0, &p, &cfg).unwrap();
        assert!(cclose(v, 1.0, 0.0, 1e-12));

        // lambda_ris = 0 and sigma^2 = 0 leaves the interference factor alone
        let mut p2 = params();
        p2.lambda_ris = 0.0;
        p2.noise_power = 0.0;
        let s = Complex64::new(1e8, 0.0);
        let b = b_upsilon(s, 1.0, 100.0, &p2, &cfg).unwrap();
        let d = exponent_d_bs(s, 1.0, 100.0, &p2, &cfg).unwrap();
        let expect = (p2.lambda_bs * d).exp();
        assert!((b - expect).norm() < 1e-9 * expect.norm());
        assert!(b.norm() < 1.0);
    }

    #[test]
    fn b_upsilon_characteristic_bound_and_conjugate_symmetry() {
        let p = params();
        let cfg = QuadratureConfig {
            rel_tol: 1e-9,
            abs_tol: 1e-11,
            ..Default::default()
        };
        for k in 0..10 {
            let u = 1e6 * 4f64.powi(k); // log grid
            let v = b_upsilon(Complex64::new(0.0, u), 1.0, 100.0, &p, &cfg).unwrap();
            assert!(v.norm() <= 1.0 + 1e-8, "|B(iu)| = {} at u={u}", v.norm());
        }
        let s = Complex64::new(5e7, -3e8);
        let a = b_upsilon(s, 1.0, 100.0, &p, &cfg).unwrap();
        let b = b_upsilon(s.conj(), 1.0, 100.0, &p, &cfg).unwrap();
        assert!((a.conj() - b).norm() <= 1e-9 * a.norm().max(1e-30));
    }

    #[test]
    fn probe_roc_bounds_and_ordering() {
        let p = params();
        let roc = probe_roc(1.0, 100.0, &p).unwrap();
        assert!(roc.s_a < 0.0 && roc.s_b > 0.0);
        let s_eval = 1.0 / (p.p0 * pathloss(100.0, &p));
        assert!(roc.s_a < 0.0 && 0.0 < s_eval && s_eval < roc.s_b);

        // no reflected constraint without RIS
        let mut p2 = params();
        p2.lambda_ris = 0.0;
        assert_eq!(probe_roc(1.0, 100.0, &p2).unwrap().s_b, f64::INFINITY);

        // smaller beam variance widens the strip
        let mut p3 = params();
        p3.zeta_var = 0.1;
        assert!(probe_roc(1.0, 100.0, &p3).unwrap().s_b > roc.s_b);
    }

    #[test]
    fn probe_roc_rejects_violations() {
        // a gigantic panel pushes s_b below the evaluation point
        let mut p = params();
        p.m_elements = 4_000_000;
        let r = probe_roc(1.0, 100.0, &p);
        assert!(matches!(r, Err(Error::OutsideRoc { .. })), "{r:?}");
    }

    #[test]
    fn ring_gain_max_dominates_samples() {
        let p = params();
        for anchor in [35.0, 80.0, 100.0, 500.0] {
            let gmax = ring_gain_max(anchor, &p);
            for i in 0..50 {
                let y = p.r_in + (p.r_out - p.r_in) * i as f64 / 49.0;
                for j in 0..50 {
                    let psi = 2.0 * std::f64::consts::PI * j as f64 / 49.0;
                    let g = crate::model::reflected_pathloss(anchor, y, psi, &p);
                    assert!(g <= gmax * (1.0 + 1e-9));
                }
            }
        }
    }
}
