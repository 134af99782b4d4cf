use alloc::vec::Vec;
use core::f64::consts::PI;
use libm::{exp, fabs, sqrt};

use super::params::{KernelValue, ModelParams, QuadratureSpec};
use crate::error::Error;
use crate::quad;

/// Radial Gaussian charge profile in momentum space,
/// ρ̂(k) = amplitude · e^{-width²|k|²/2}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialProfile {
    pub amplitude: f64,
    pub width: f64,
}

impl RadialProfile {
    pub fn new(amplitude: f64, width: f64) -> Self {
        RadialProfile { amplitude, width }
    }

    #[inline]
    pub fn at(&self, r: f64) -> f64 {
        self.amplitude * exp(-0.5 * self.width * self.width * r * r)
    }

    /// ∫|ρ̂|²/|k| dk must be finite; for a Gaussian that only needs width > 0.
    pub fn check_admissible(&self) -> Result<(), Error> {
        if !self.amplitude.is_finite() || !(self.width > 0.0) || !self.width.is_finite() {
            return Err(Error::ProfileNotAdmissible);
        }
        Ok(())
    }
}

/// ∫_{|k|≥Λ} ρ̂(k)/√ω(k) · e^{-ε|k|²/2} · e^{-s·ω(k)} · e^{-ik·x} dk.
pub fn eval_rho_kernel(
    rho: &RadialProfile,
    p: &ModelParams,
    x_norm: f64,
    s_offset: f64,
    q: &QuadratureSpec,
) -> Result<KernelValue, Error> {
    p.validate()?;
    rho.check_admissible()?;
    if !(s_offset >= 0.0) {
        return Err(Error::InvalidParams("s_offset must be >= 0"));
    }
    let lo = p.lambda;
    if rho.amplitude == 0.0 {
        return Ok(KernelValue { value: 0.0, est_error: 0.0, truncation_radius: lo });
    }
    // Gaussian decay of ρ̂ sets the truncation radius.
    let sigma2 = rho.width * rho.width + p.eps;
    let span = q.r_max_policy.eps_cut * 1.5 / sqrt(sigma2);
    let hi = lo + span;
    let osc = if x_norm > 0.0 { PI / x_norm } else { f64::INFINITY };
    let h = (0.25 / sqrt(sigma2)).min(osc).min(0.5);
    let n = ((hi - lo) / h) as usize + 1;
    let breaks: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let pref = p.radial_prefactor();
    let eps = p.eps;
    let mut f = |r: f64| {
        let w = p.omega(r);
        let z = r * x_norm;
        let sinc = if z < 1e-4 { 1.0 - z * z / 6.0 } else { libm::sin(z) / z };
        [pref * rho.at(r) / sqrt(w) * exp(-0.5 * eps * r * r - s_offset * w) * r * r * sinc]
    };
    let res = quad::panels_adaptive(&mut f, &breaks, q.rel_tol, [true], breaks.len() + q.max_panels)?;
    Ok(KernelValue { value: res.value[0], est_error: fabs(res.error[0]), truncation_radius: hi })
}
