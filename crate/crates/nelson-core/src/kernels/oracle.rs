//! Brute-force 3D momentum integrals, used only to cross-check the radial
//! fast path. Product Gauss–Legendre in |k| and cos θ, trapezoid in the
//! azimuth, with the full vector x (no rotation to the pole).

use alloc::vec::Vec;
use core::f64::consts::PI;
use libm::{cos, exp, fabs, sin, sqrt};

use super::params::{Dispersion, FourierNorm, KernelValue, ModelParams};
use super::rho::RadialProfile;
use crate::error::Error;
use crate::quad::gauss_legendre;

/// Which momentum integral the oracle evaluates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OracleKernel {
    W,
    Phi,
    /// One Cartesian component of ∇φ.
    GradPhi { axis: usize },
    /// The ρ̂/√ω kernel; `t` is read as the time offset s ≥ 0.
    Rho(RadialProfile),
}

const RADIAL_NODES: usize = 16;

/// Evaluate the chosen kernel at (x, t) by direct 3D quadrature, refusing
/// if more than `budget` integrand evaluations would be needed.
pub fn oracle_kernel_3d(
    which: OracleKernel,
    params: &ModelParams,
    x: [f64; 3],
    t: f64,
    budget: usize,
) -> Result<KernelValue, Error> {
    params.validate()?;
    let eps = params.eps;
    let k2 = params.kappa * params.kappa;
    let at = fabs(t);
    let xn = sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    let (gauss_width2, rate) = match which {
        OracleKernel::Rho(rho) => {
            rho.check_admissible()?;
            (rho.width * rho.width + eps, at)
        }
        _ => {
            if !(eps > 0.0) {
                return Err(Error::InvalidParams("the 3D oracle needs eps > 0"));
            }
            (2.0 * eps, k2 * at)
        }
    };
    if let OracleKernel::GradPhi { axis } = which {
        if axis > 2 {
            return Err(Error::InvalidParams("axis must be 0, 1 or 2"));
        }
    }
    // e^{-g r²/2}: below e^{-36} beyond 8.5/√g
    let lo = params.lambda;
    let mut hi = lo + 8.5 / sqrt(gauss_width2);
    if rate > 0.0 {
        hi = hi.min(lo + 40.0 / rate);
    }
    let mut h = 0.5f64.min(0.5 * sqrt(1.0 / gauss_width2));
    if xn > 0.0 {
        h = h.min(0.5 * PI / xn);
    }
    if rate > 0.0 {
        h = h.min(1.0 / rate);
    }
    let n_panels = ((hi - lo) / h) as usize + 1;
    let n_theta = (0.6 * hi * xn) as usize + 24;
    let n_phi = n_theta;
    let needed = n_panels * RADIAL_NODES * n_theta * n_phi;
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }

    let (gx, gw) = gauss_legendre(RADIAL_NODES);
    let (ux, uw) = gauss_legendre(n_theta);
    // unit directions and their angular weights, shared by all radii
    let mut dirs: Vec<([f64; 3], f64)> = Vec::with_capacity(n_theta * n_phi);
    let dphi = 2.0 * PI / n_phi as f64;
    for (cth, wth) in ux.iter().zip(&uw) {
        let sth = sqrt(1.0 - cth * cth);
        for j in 0..n_phi {
            let az = (j as f64 + 0.5) * dphi;
            dirs.push(([sth * cos(az), sth * sin(az), *cth], wth * dphi));
        }
    }

    let norm = match params.fourier_norm {
        FourierNorm::None => 1.0,
        FourierNorm::InverseCube => 1.0 / (8.0 * PI * PI * PI),
    };
    let omega = |r: f64| match params.dispersion {
        Dispersion::Massless => r,
        Dispersion::Massive => sqrt(r * r + params.nu * params.nu),
    };

    let panel = (hi - lo) / n_panels as f64;
    let mut total = 0.0;
    let mut total_abs = 0.0;
    for ip in 0..n_panels {
        let a = lo + ip as f64 * panel;
        for (gxi, gwi) in gx.iter().zip(&gw) {
            let r = a + 0.5 * panel * (gxi + 1.0);
            let wr = 0.5 * panel * gwi * r * r;
            let om = omega(r);
            let radial = match which {
                OracleKernel::W => k2 * exp(-eps * r * r - k2 * om * at) / (2.0 * om),
                OracleKernel::Phi | OracleKernel::GradPhi { .. } => {
                    exp(-eps * r * r - k2 * om * at) / (2.0 * om) * k2 / (k2 * om + 0.5 * r * r)
                }
                OracleKernel::Rho(rho) => rho.at(r) / sqrt(om) * exp(-0.5 * eps * r * r - at * om),
            };
            let mut ang = 0.0;
            for (u, w) in &dirs {
                let phase = r * (u[0] * x[0] + u[1] * x[1] + u[2] * x[2]);
                ang += w
                    * match which {
                        OracleKernel::GradPhi { axis } => -r * u[axis] * sin(phase),
                        _ => cos(phase),
                    };
            }
            total += wr * radial * ang;
            total_abs += fabs(wr * radial) * 4.0 * PI;
        }
    }
    Ok(KernelValue {
        value: norm * total,
        est_error: norm * total_abs * 1e-10,
        truncation_radius: hi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radial_symmetry_of_phi() {
        let p = ModelParams::massless(1.0, 1.0, 1.0, 1);
        let a = oracle_kernel_3d(OracleKernel::Phi, &p, [0.3, -0.2, 0.5], 0.1, 1 << 28).unwrap().value;
        let b = oracle_kernel_3d(OracleKernel::Phi, &p, [-0.3, 0.2, -0.5], 0.1, 1 << 28).unwrap().value;
        assert!((a - b).abs() < 1e-12 * a.abs());
    }

    #[test]
    fn w_at_origin_matches_closed_form() {
        // W_ε(0,0) = 4π ∫_Λ^∞ e^{-εr²} r/2 dr = π e^{-εΛ²}/ε
        let p = ModelParams::massless(0.5, 1.0, 1.0, 1);
        let v = oracle_kernel_3d(OracleKernel::W, &p, [0.0; 3], 0.0, 1 << 28).unwrap().value;
        let exact = PI * libm::exp(-0.5) / 0.5;
        assert!((v - exact).abs() < 1e-9 * exact, "{v} vs {exact}");
    }

    #[test]
    fn budget_is_enforced() {
        let p = ModelParams::massless(1e-3, 1.0, 1.0, 1);
        let e = oracle_kernel_3d(OracleKernel::Phi, &p, [5.0, 0.0, 0.0], 0.0, 1000).unwrap_err();
        assert!(matches!(e, Error::BudgetExceeded { .. }));
    }
}
