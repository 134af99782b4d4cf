//! Radial reduction of the momentum integrals.
//!
//! For a radial integrand F(|k|) the angular integral gives
//!
//! ```text
//! ∫ F(|k|) e^{-ik·x} dk = C ∫_Λ^∞ F(r) r² sinc(r|x|) dr,   C = 4π (or 4π/(2π)³)
//! ```
//!
//! with
//!
//! ```text
//! W:   F = κ² e^{-εr²} e^{-κ²ω|t|} / (2ω)
//! φ:   F = e^{-εr²} e^{-κ²ω|t|} / (2ω) · κ²/(κ²ω + r²/2)
//! ∂φ:  radial derivative, sinc(z) replaced by r·sinc'(z)
//! ```

use alloc::vec::Vec;
use core::f64::consts::PI;
use libm::{ceil, exp, fabs, log, log1p, sincos, sqrt};

use super::params::{Dispersion, FourierNorm, KernelValue, ModelParams, QuadratureSpec};
use crate::error::Error;
use crate::quad::{self, Integral};

pub(crate) const CH_W: usize = 0;
pub(crate) const CH_PHI: usize = 1;
pub(crate) const CH_DPHI: usize = 2;

/// Half-periods integrated panel by panel before switching to the
/// accelerated tail.
const OSC_DIRECT_MAX: f64 = 64.0;
const OSC_HEAD: f64 = 16.0;

/// W, φ and ∂φ/∂|x| at one point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct KernelTriple {
    pub w: f64,
    pub phi: f64,
    pub dphi_dr: f64,
}

/// sinc(z) and its derivative, with series near the origin.
#[inline]
fn sinc_pair(z: f64) -> (f64, f64) {
    if z < 0.05 {
        let z2 = z * z;
        let s0 = 1.0 - z2 / 6.0 * (1.0 - z2 / 20.0 * (1.0 - z2 / 42.0));
        let s1 = -z / 3.0 * (1.0 - z2 / 10.0 * (1.0 - z2 / 28.0));
        (s0, s1)
    } else {
        let (s, c) = sincos(z);
        (s / z, (z * c - s) / (z * z))
    }
}

fn breakpoints(lo: f64, hi: f64, x: f64, rate: f64, eps: f64, osc_frac: f64) -> Vec<f64> {
    let osc = if x > 0.0 { osc_frac * PI / x } else { f64::INFINITY };
    let mut out = alloc::vec![lo];
    let mut r = lo;
    while r < hi {
        let mut h = 0.5 * r.max(0.25);
        if rate > 0.0 {
            h = h.min(2.0 / rate);
        }
        if eps > 0.0 {
            h = h.min(1.0 / (2.0 * eps * r + sqrt(eps)));
        }
        h = h.min(osc);
        let next = r + h;
        if next >= hi || hi - next < 0.25 * h {
            out.push(hi);
            break;
        }
        out.push(next);
        r = next;
    }
    out
}

/// Integrate the requested channels at (|x|, |t|). Callers check for the
/// singular point first.
pub(crate) fn radial_channels(
    p: &ModelParams,
    x: f64,
    t: f64,
    q: &QuadratureSpec,
    mask: [bool; 3],
) -> Result<Integral<3>, Error> {
    let lo = p.lambda;
    let at = fabs(t);
    let k2 = p.kappa * p.kappa;
    let eps = p.eps;
    let pol = q.r_max_policy;
    let span_t = pol.t_cut / (k2 * at.max(pol.delta));
    let span_e = pol.eps_cut / sqrt(eps.max(pol.delta * pol.delta));
    let span = span_t.min(span_e);
    let hi = lo + span;
    let rate = k2 * at;
    let pref = p.radial_prefactor();
    let small = x < q.small_x_threshold;

    let mut integrand = |r: f64| -> [f64; 3] {
        let w = p.omega(r);
        let g = exp(-eps * r * r - k2 * w * at) / (2.0 * w);
        let beta = k2 / (k2 * w + 0.5 * r * r);
        let z = r * x;
        let (s0, s1) = if small { (1.0 - z * z / 6.0, -z / 3.0) } else { sinc_pair(z) };
        let r2 = r * r;
        let base = pref * g * r2;
        [base * k2 * s0, base * beta * s0, base * beta * r * s1]
    };

    let half = if x > 0.0 && !small { PI / x } else { f64::INFINITY };
    let budget = q.max_panels;
    if half.is_finite() && span / half > OSC_DIRECT_MAX {
        let k0 = ceil(lo / half) + OSC_HEAD;
        let r_switch = k0 * half;
        let breaks = breakpoints(lo, r_switch, x, rate, eps, q.oscillation_panel);
        let mut head =
            quad::panels_adaptive(&mut integrand, &breaks, q.rel_tol, mask, breaks.len() + budget)?;
        let floor = head.value.map(|v| q.rel_tol * fabs(v));
        let tail = quad::alternating_tail(
            &mut integrand,
            r_switch,
            half,
            hi,
            q.rel_tol,
            floor,
            mask,
            q.max_tail_terms,
        )?;
        head += &tail;
        Ok(head)
    } else {
        let breaks = breakpoints(lo, hi, x, rate, eps, q.oscillation_panel);
        quad::panels_adaptive(&mut integrand, &breaks, q.rel_tol, mask, breaks.len() + budget)
    }
}

fn singular(p: &ModelParams, x: f64, t: f64, q: &QuadratureSpec) -> bool {
    p.eps == 0.0 && t == 0.0 && x < q.small_x_threshold
}

fn kernel_value(r: &Integral<3>, ch: usize) -> KernelValue {
    KernelValue { value: r.value[ch], est_error: r.error[ch], truncation_radius: r.reach }
}

/// Pair interaction W_ε(x, t).
pub fn eval_w(p: &ModelParams, x_norm: f64, t: f64, q: &QuadratureSpec) -> Result<KernelValue, Error> {
    p.validate()?;
    q.validate()?;
    if singular(p, x_norm, t, q) {
        return Err(Error::SingularPoint);
    }
    let r = radial_channels(p, x_norm, t, q, [true, false, false])?;
    Ok(kernel_value(&r, CH_W))
}

/// φ_ε(x, t), the kernel whose heat-type derivative is −W_ε.
pub fn eval_phi(p: &ModelParams, x_norm: f64, t: f64, q: &QuadratureSpec) -> Result<KernelValue, Error> {
    p.validate_phi()?;
    q.validate()?;
    if singular(p, x_norm, t, q) {
        return Err(Error::SingularPoint);
    }
    let r = radial_channels(p, x_norm, t, q, [false, true, false])?;
    Ok(kernel_value(&r, CH_PHI))
}

/// ∂φ_ε/∂|x| at (|x|, t); zero below the small-|x| threshold.
pub fn eval_dphi_dr(p: &ModelParams, x_norm: f64, t: f64, q: &QuadratureSpec) -> Result<KernelValue, Error> {
    p.validate_phi()?;
    q.validate()?;
    if singular(p, x_norm, t, q) {
        return Err(Error::SingularPoint);
    }
    if x_norm < q.small_x_threshold {
        return Ok(KernelValue { value: 0.0, est_error: 0.0, truncation_radius: p.lambda });
    }
    let r = radial_channels(p, x_norm, t, q, [false, false, true])?;
    Ok(kernel_value(&r, CH_DPHI))
}

/// ∇φ_ε(x, t) = (x/|x|)·∂φ/∂|x|.
pub fn eval_grad_phi(p: &ModelParams, x: [f64; 3], t: f64, q: &QuadratureSpec) -> Result<[f64; 3], Error> {
    let n = sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    let d = eval_dphi_dr(p, n, t, q)?;
    if n < q.small_x_threshold {
        return Ok([0.0; 3]);
    }
    let s = d.value / n;
    Ok([x[0] * s, x[1] * s, x[2] * s])
}

/// All three kernels in one sweep (used to build interpolation tables).
pub fn eval_kernels(p: &ModelParams, x_norm: f64, t: f64, q: &QuadratureSpec) -> Result<KernelTriple, Error> {
    p.validate_phi()?;
    if singular(p, x_norm, t, q) {
        return Err(Error::SingularPoint);
    }
    let r = radial_channels(p, x_norm, t, q, [true, true, x_norm >= q.small_x_threshold])?;
    let dphi = if x_norm < q.small_x_threshold { 0.0 } else { r.value[CH_DPHI] };
    Ok(KernelTriple { w: r.value[CH_W], phi: r.value[CH_PHI], dphi_dr: dphi })
}

/// φ_0(x, t, κ) of the weak-coupling scaling (massive boson, (2π)^{-3}).
pub fn eval_phi_scaled(p: &ModelParams, x_norm: f64, t: f64, q: &QuadratureSpec) -> Result<KernelValue, Error> {
    require_scaled(p)?;
    eval_phi(p, x_norm, t, q)
}

/// ∂φ_0(x, t, κ)/∂|x| of the weak-coupling scaling.
pub fn eval_dphi_dr_scaled(p: &ModelParams, x_norm: f64, t: f64, q: &QuadratureSpec) -> Result<KernelValue, Error> {
    require_scaled(p)?;
    eval_dphi_dr(p, x_norm, t, q)
}

fn require_scaled(p: &ModelParams) -> Result<(), Error> {
    if p.dispersion != Dispersion::Massive || p.fourier_norm != FourierNorm::InverseCube {
        return Err(Error::InvalidParams("scaled kernels need massive dispersion and (2π)^-3 normalization"));
    }
    Ok(())
}

/// Energy renormalization E_ε = −(g²/2) N ∫ e^{-ε|k|²} β(k)/ω(k) dk over |k| ≥ Λ.
///
/// Integrated on its own logarithmic panel grid, independently of the
/// kernel sweep, so that E_ε = −g²Nφ_ε(0,0) is a genuine cross-check.
pub fn eval_e(p: &ModelParams, q: &QuadratureSpec) -> Result<KernelValue, Error> {
    p.validate()?;
    q.validate()?;
    if p.eps == 0.0 {
        return Err(Error::SingularPoint);
    }
    let lo = p.lambda;
    let span = q.r_max_policy.eps_cut / sqrt(p.eps);
    let n = (4.0 * log1p(span)) as usize + 8;
    let top = log1p(span);
    let breaks: Vec<f64> = (0..=n).map(|i| lo + libm::expm1(top * i as f64 / n as f64)).collect();
    let eps = p.eps;
    let mut f = |r: f64| [exp(-eps * r * r) * r * r * p.beta(r) / p.omega(r)];
    let res = quad::panels_adaptive(&mut f, &breaks, q.rel_tol * 0.1, [true], breaks.len() + q.max_panels)?;
    let c = -0.5 * p.g * p.g * p.n_particles as f64 * p.radial_prefactor();
    Ok(KernelValue { value: c * res.value[0], est_error: fabs(c) * res.error[0], truncation_radius: lo + span })
}

/// E_ε(κ) of the weak-coupling scaling.
pub fn eval_e_scaled(p: &ModelParams, q: &QuadratureSpec) -> Result<KernelValue, Error> {
    require_scaled(p)?;
    eval_e(p, q)
}

/// Constant a with |φ_ε(x,0)| ≤ a/|x| uniformly in ε (massless, Λ > 0):
/// a = 2π ∫_Λ^∞ dr/(r + r²/2) = 2π ln(1 + 2/Λ).
pub fn coulomb_bound_constant(lambda: f64) -> f64 {
    2.0 * PI * log(1.0 + 2.0 / lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> QuadratureSpec {
        QuadratureSpec::default().with_rel_tol(1e-11)
    }

    /// Closed form at ε = 0 (massless): W_0 = (2π/x) e^{-Λt}(t sin Λx + x cos Λx)/(t² + x²).
    fn w0_closed(lambda: f64, x: f64, t: f64) -> f64 {
        if x == 0.0 {
            return 2.0 * PI * exp(-lambda * t) * (lambda * t + 1.0) / (t * t);
        }
        let (s, c) = sincos(lambda * x);
        2.0 * PI / x * exp(-lambda * t) * (t * s + x * c) / (t * t + x * x)
    }

    #[test]
    fn w_at_origin_matches_closed_form() {
        let p = ModelParams::massless(0.0, 1.0, 1.0, 1);
        let v = eval_w(&p, 0.0, 1.0, &q()).unwrap().value;
        assert!((v - 4.0 * PI / core::f64::consts::E).abs() < 1e-9, "{v}");
    }

    #[test]
    fn w_eps_zero_closed_form_grid() {
        let p = ModelParams::massless(0.0, 1.0, 1.0, 1);
        for &x in &[0.0, 1e-3, 0.3, 1.0, 2.5, 7.0] {
            for &t in &[1e-3, 0.05, 0.5, 2.0] {
                let v = eval_w(&p, x, t, &q()).unwrap().value;
                let e = w0_closed(1.0, x, t);
                assert!((v - e).abs() <= 1e-8 * e.abs().max(1e-3), "x={x} t={t}: {v} vs {e}");
            }
        }
    }

    #[test]
    fn w_eps_zero_at_equal_time_is_abel_limit() {
        let p = ModelParams::massless(0.0, 0.5, 1.0, 1);
        for &x in &[0.2, 1.0, 3.0] {
            let v = eval_w(&p, x, 0.0, &q()).unwrap().value;
            let e = 2.0 * PI * libm::cos(0.5 * x) / (x * x);
            assert!((v - e).abs() < 1e-7 * e.abs().max(1.0), "x={x}: {v} vs {e}");
        }
    }

    #[test]
    fn phi_eps_zero_equal_time_converges() {
        // φ_0(x,0) = (4π/x)∫_Λ^∞ sin(rx)/(r(2+r)) dr; compare against a
        // brute-force Abel-regularized sum with a tiny damping.
        let p = ModelParams::massless(0.0, 1.0, 1.0, 1);
        let v = eval_phi(&p, 1.3, 0.0, &q()).unwrap().value;
        let damped = eval_phi(&p, 1.3, 1e-7, &q()).unwrap().value;
        assert!((v - damped).abs() < 1e-5 * v.abs(), "{v} {damped}");
    }

    #[test]
    fn small_argument_series_is_continuous() {
        let p = ModelParams::massless(0.3, 1.0, 1.0, 1);
        let a = eval_phi(&p, 0.0, 0.2, &q()).unwrap().value;
        let b = eval_phi(&p, 2e-8, 0.2, &q()).unwrap().value;
        let c = eval_phi(&p, 1e-6, 0.2, &q()).unwrap().value;
        assert!((a - b).abs() < 1e-12 * a && (a - c).abs() < 1e-10 * a);
    }

    #[test]
    fn singular_point_reported() {
        let p = ModelParams::massless(0.0, 1.0, 1.0, 1);
        assert_eq!(eval_phi(&p, 0.0, 0.0, &q()), Err(Error::SingularPoint));
        assert_eq!(eval_w(&p, 0.0, 0.0, &q()), Err(Error::SingularPoint));
        assert_eq!(eval_e(&p, &q()), Err(Error::SingularPoint));
    }

    #[test]
    fn energy_scales_with_particles_and_vanishes_at_zero_coupling() {
        let p1 = ModelParams::massless(0.5, 1.0, 1.3, 1);
        let p3 = ModelParams { n_particles: 3, ..p1 };
        let e1 = eval_e(&p1, &q()).unwrap().value;
        let e3 = eval_e(&p3, &q()).unwrap().value;
        assert!(e1 < 0.0);
        assert!((e3 / e1 - 3.0).abs() < 1e-14);
        let p0 = ModelParams { g: 0.0, ..p1 };
        assert_eq!(eval_e(&p0, &q()).unwrap().value, 0.0);
    }

    #[test]
    fn coulomb_constant_partial_fractions() {
        let l = 0.7;
        let (num, _) = quad::integrate(|u| {
            // r = l/u maps [Λ,∞) to (0,1]
            let r = l / u;
            2.0 * PI / (r + 0.5 * r * r) * l / (u * u)
        }, 0.0, 1.0, 32, 1e-12)
        .unwrap();
        assert!((num - coulomb_bound_constant(l)).abs() < 1e-10);
    }
}
