//! Monte Carlo Feynman–Kac matrix elements of the renormalized semigroup.
//!
//! For test functions f, h the estimator targets
//!
//! ```text
//! ∫ dx E^x[ f(B_{−T}) h(B_T) e^{−∫V(B_s)ds} e^{(g²/2)S_ren + ξ/4} ]
//! ```
//!
//! with x importance-sampled from the Gaussian matched to |f|. Weights are
//! formed in log space and shifted by their maximum before exponentiation.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;
use libm::{exp, log, sqrt};

use crate::action::{action_renormalized, ActionConfig, Route};
use crate::error::Error;
use crate::exec::Executor;
use crate::kernels::{eval_rho_kernel, KernelTable, ModelParams, QuadratureSpec, RadialProfile};
use crate::paths::{sample_ensemble, Path, PathEnsemble, TimeGrid};
use crate::quad;
use crate::rng::RngSpec;
use crate::stats::batch_means;

/// Below this separation singular potentials are evaluated at the clip value.
pub const SINGULAR_CLIP: f64 = 1e-10;

/// L²-normalized Gaussian packet (πσ²)^{−d/4} e^{−|x−c|²/(2σ²)} on R^{3N}.
#[derive(Clone, Debug, PartialEq)]
pub struct TestFunction {
    pub center: Vec<f64>,
    pub width: f64,
}

impl TestFunction {
    pub fn gaussian(center: Vec<f64>, width: f64) -> Self {
        TestFunction { center, width }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.center.is_empty() || self.center.len() % 3 != 0 {
            return Err(Error::ProposalMismatch);
        }
        if !(self.width > 0.0) || !self.width.is_finite() {
            return Err(Error::ProposalMismatch);
        }
        Ok(())
    }

    pub fn log_value(&self, x: &[f64]) -> f64 {
        let s2 = self.width * self.width;
        let r2: f64 = x.iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum();
        -0.25 * self.dim() as f64 * log(PI * s2) - r2 / (2.0 * s2)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        exp(self.log_value(x))
    }

    /// ln(f/q) for the proposal q = N(c, σ²I); constant in x.
    pub fn log_proposal_ratio(&self) -> f64 {
        let d = self.dim() as f64;
        let s2 = self.width * self.width;
        0.5 * d * log(2.0 * PI * s2) - 0.25 * d * log(PI * s2)
    }

    /// Free matrix element (f, e^{tΔ/2} h) in closed form.
    pub fn free_matrix_element(&self, other: &TestFunction, t: f64) -> f64 {
        let d = self.dim() as f64;
        let (sf, sh) = (self.width * self.width, other.width * other.width);
        let var = sf + sh + t;
        let r2: f64 = self.center.iter().zip(&other.center).map(|(a, b)| (a - b) * (a - b)).sum();
        let log_amp = -0.25 * d * log(PI * sf) - 0.25 * d * log(PI * sh);
        let log_int = 0.5 * d * log(2.0 * PI * sf) + 0.5 * d * log(2.0 * PI * sh);
        let log_gauss = -0.5 * d * log(2.0 * PI * var) - r2 / (2.0 * var);
        exp(log_amp + log_int + log_gauss)
    }
}

/// External potential V on R^{3N}.
#[derive(Clone, Debug, PartialEq)]
pub enum Potential {
    Zero,
    /// −depth · Σ_i e^{−|x_i|²/(2 width²)}
    BoundedWell { depth: f64, width: f64 },
    /// δ Σ_i |x_i|² (unbounded)
    Harmonic { delta: f64 },
    /// −strength · g² Σ_{i<j} e^{−ν r_ij}/r_ij (singular); strength 1/(4π)
    /// is the weak-coupling limit of the field-mediated pair interaction.
    YukawaPairwise { g: f64, nu: f64, strength: f64 },
    /// coupling · Σ_{i≠j} |x_i − x_j|^{−exponent} (singular for exponent > 0)
    PairPower { exponent: f64, coupling: f64 },
}

impl Potential {
    /// The effective pair potential of the weak-coupling limit.
    pub fn yukawa(g: f64, nu: f64) -> Self {
        Potential::YukawaPairwise { g, nu, strength: 1.0 / (4.0 * PI) }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self, Potential::Zero | Potential::BoundedWell { .. })
            || matches!(self, Potential::PairPower { exponent, .. } if *exponent <= 0.0)
    }

    pub fn is_singular(&self) -> bool {
        matches!(self, Potential::YukawaPairwise { .. })
            || matches!(self, Potential::PairPower { exponent, .. } if *exponent > 0.0)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let n = x.len() / 3;
        let pair_r = |i: usize, j: usize| {
            let (a, b) = (&x[3 * i..3 * i + 3], &x[3 * j..3 * j + 3]);
            sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]))
                .max(SINGULAR_CLIP)
        };
        match *self {
            Potential::Zero => 0.0,
            Potential::BoundedWell { depth, width } => {
                let w2 = 2.0 * width * width;
                -depth * x.chunks(3).map(|p| exp(-(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) / w2)).sum::<f64>()
            }
            Potential::Harmonic { delta } => delta * x.iter().map(|v| v * v).sum::<f64>(),
            Potential::YukawaPairwise { g, nu, strength } => {
                let mut s = 0.0;
                for i in 0..n {
                    for j in i + 1..n {
                        let r = pair_r(i, j);
                        s += exp(-nu * r) / r;
                    }
                }
                -strength * g * g * s
            }
            Potential::PairPower { exponent, coupling } => {
                let mut s = 0.0;
                for i in 0..n {
                    for j in i + 1..n {
                        s += libm::pow(pair_r(i, j), -exponent);
                    }
                }
                // ordered pairs i ≠ j
                2.0 * coupling * s
            }
        }
    }

    /// Trapezoid ∫_{−T}^{T} V(B_s) ds along a path.
    pub fn path_integral(&self, path: &Path<'_>) -> f64 {
        if matches!(self, Potential::Zero) {
            return 0.0;
        }
        let m = path.grid.n_steps;
        let dt = path.grid.dt();
        (0..=m).map(|k| if k == 0 || k == m { 0.5 * dt } else { dt } * self.value(path.config(k))).sum()
    }
}

/// Mean with a batch-means standard error and its provenance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub rng: RngSpec,
    /// Filled in by callers that have a clock.
    pub wall_time: Option<f64>,
}

/// Exponential-vector data: profiles ρ₁, ρ₂ and real coefficients α, β.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XiSpec {
    pub rho1: RadialProfile,
    pub rho2: RadialProfile,
    pub alpha: f64,
    pub beta: f64,
}

/// What multiplies e^{(g²/2)S_ren} in the path weight.
#[derive(Clone, Debug)]
pub struct SemigroupSpec {
    pub config: ActionConfig,
    pub potential: Potential,
    /// Keep the counterterm (renormalized weight). When false the weight
    /// uses S_ren + 4NTφ_ε(0,0), i.e. the bare action.
    pub renormalize: bool,
    pub xi: Option<XiSpec>,
    pub n_batches: usize,
}

impl SemigroupSpec {
    pub fn new(config: ActionConfig, potential: Potential) -> Self {
        SemigroupSpec { config, potential, renormalize: true, xi: None, n_batches: 30 }
    }
}

fn starts_stream(rng: RngSpec) -> RngSpec {
    RngSpec::new(rng.seed, rng.stream_id ^ 0x5354_4152_5453_0001)
}

/// Sample start points from N(c, σ²I) and Brownian paths from them.
pub fn sample_weighted_paths(
    f: &TestFunction,
    grid: &TimeGrid,
    n_paths: usize,
    rng: RngSpec,
    exec: &dyn Executor,
) -> Result<PathEnsemble, Error> {
    f.validate()?;
    let d = f.dim();
    let sr = starts_stream(rng);
    let center = f.center.clone();
    let width = f.width;
    let starts: Vec<Vec<f64>> = exec.map(n_paths, &|k: usize| {
        let mut g = sr.substream(k as u64).stream();
        (0..d).map(|c| center[c] + width * g.normal()).collect()
    });
    sample_ensemble(grid, &starts, n_paths, rng, exec)
}

/// Log path weights, one per path in order.
pub fn log_weights(
    f: &TestFunction,
    h: &TestFunction,
    spec: &SemigroupSpec,
    ens: &PathEnsemble,
    exec: &dyn Executor,
) -> Result<Vec<f64>, Error> {
    f.validate()?;
    h.validate()?;
    if h.dim() != f.dim() || f.dim() != 3 * spec.config.params.n_particles {
        return Err(Error::ProposalMismatch);
    }
    let p = spec.config.params;
    let g2 = p.g * p.g;
    let log_ratio = f.log_proposal_ratio();
    let m = ens.grid().n_steps;
    let need_action = g2 != 0.0;
    let out: Vec<Result<f64, Error>> = exec.map(ens.n_paths(), &|k: usize| {
        let path = ens.path(k);
        let mut lw = log_ratio + h.log_value(path.config(m)) - spec.potential.path_integral(&path);
        if need_action {
            let b = action_renormalized(&path, &spec.config)?;
            let s = if spec.renormalize { b.s_ren } else { b.s_ren + b.diag_counterterm.unwrap_or(f64::INFINITY) };
            lw += 0.5 * g2 * s;
        }
        if let Some(xi) = &spec.xi {
            lw += 0.25 * compute_xi(&path, xi, &p, &spec.config.quad)?;
        }
        if !lw.is_finite() {
            let r = ens.rng_spec();
            return Err(Error::NonFiniteWeight { path: k, seed: r.seed, stream: r.substream(k as u64).stream_id });
        }
        Ok(lw)
    });
    out.into_iter().collect()
}

/// Mean of e^{lw} with a batch-means error bar, computed with a max shift.
pub fn exp_mean(log_w: &[f64], n_batches: usize, rng: RngSpec) -> McEstimate {
    let shift = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let vals: Vec<f64> = log_w.iter().map(|l| exp(l - shift)).collect();
    let (m, se) = batch_means(&vals, n_batches);
    let scale = exp(shift);
    McEstimate { mean: m * scale, std_error: se * scale, n_samples: log_w.len(), rng, wall_time: None }
}

/// Monte Carlo estimate of (f, e^{−2T H} h) for the configured action.
pub fn semigroup_element(
    f: &TestFunction,
    h: &TestFunction,
    spec: &SemigroupSpec,
    grid: &TimeGrid,
    n_paths: usize,
    rng: RngSpec,
    exec: &dyn Executor,
) -> Result<McEstimate, Error> {
    spec.config.validate()?;
    let ens = sample_weighted_paths(f, grid, n_paths, rng, exec)?;
    let lw = log_weights(f, h, spec, &ens, exec)?;
    Ok(exp_mean(&lw, spec.n_batches, rng))
}

/// One row of [`ground_energy_proxy`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyProxy {
    pub t_horizon: f64,
    /// −(1/2T) ln(f, e^{−2TH} f)
    pub value: f64,
    /// Propagated from the estimate's SE.
    pub std_error: f64,
    pub estimate: McEstimate,
}

/// −(1/2T)·ln(f, e^{−2TH} f) for each grid.
pub fn ground_energy_proxy(
    f: &TestFunction,
    spec: &SemigroupSpec,
    grids: &[TimeGrid],
    n_paths: usize,
    rng: RngSpec,
    exec: &dyn Executor,
) -> Result<Vec<EnergyProxy>, Error> {
    let mut out = Vec::with_capacity(grids.len());
    for (i, g) in grids.iter().enumerate() {
        let est = semigroup_element(f, f, spec, g, n_paths, rng.substream(0x4750_0000 + i as u64), exec)?;
        if !(est.mean > 0.0) {
            return Err(Error::NonPositiveEstimate);
        }
        let two_t = 2.0 * g.t_horizon;
        out.push(EnergyProxy {
            t_horizon: g.t_horizon,
            value: -log(est.mean) / two_t,
            std_error: est.std_error / (est.mean * two_t),
            estimate: est,
        });
    }
    Ok(out)
}

/// ∫ ρ̂₁ρ̂₂ e^{−τω}/ω dk over all momenta (no infrared cutoff), by radial quadrature.
fn profile_inner(a: &RadialProfile, b: &RadialProfile, p: &ModelParams, tau: f64) -> Result<f64, Error> {
    let w = sqrt(0.5 * (a.width * a.width + b.width * b.width));
    let hi = 12.0 / w;
    let pref = p.radial_prefactor();
    let (v, _) = quad::integrate(|r| if r == 0.0 { 0.0 } else { pref * a.at(r) * b.at(r) * exp(-tau * p.omega(r)) / p.omega(r) * r * r }, 0.0, hi, 32, 1e-11)?;
    Ok(v)
}

/// The exponent ξ of the exponential-vector matrix element, for one path
/// (real α, β).
pub fn compute_xi(path: &Path<'_>, xi: &XiSpec, params: &ModelParams, quad_spec: &QuadratureSpec) -> Result<f64, Error> {
    xi.rho1.check_admissible()?;
    xi.rho2.check_admissible()?;
    let (field, _) = xi_field_terms(xi, params, path.grid.t_horizon)?;
    if params.g == 0.0 || (xi.alpha == 0.0 && xi.beta == 0.0) {
        return Ok(field);
    }
    let grid = path.grid;
    let t = grid.t_horizon;
    let m = grid.n_steps;
    let dt = grid.dt();
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    for k in 0..=m {
        let w = if k == 0 || k == m { 0.5 * dt } else { dt };
        let s = grid.time(k);
        for j in 0..path.n_particles {
            let b = path.pos(k, j);
            let r = sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
            if xi.alpha != 0.0 {
                s1 += w * eval_rho_kernel(&xi.rho1, params, r, (s - t).abs(), quad_spec)?.value;
            }
            if xi.beta != 0.0 {
                s2 += w * eval_rho_kernel(&xi.rho2, params, r, (s + t).abs(), quad_spec)?.value;
            }
        }
    }
    Ok(field + 2.0 * xi.alpha * params.g * s1 + 2.0 * xi.beta * params.g * s2)
}

/// Path-independent part of ξ and the path-uniform bound on |ξ| obtained
/// term by term from |e^{−ik·x}| ≤ 1.
fn xi_field_terms(xi: &XiSpec, p: &ModelParams, t: f64) -> Result<(f64, f64), Error> {
    let n1 = profile_inner(&xi.rho1, &xi.rho1, p, 0.0)?;
    let n2 = profile_inner(&xi.rho2, &xi.rho2, p, 0.0)?;
    let c12 = profile_inner(&xi.rho1, &xi.rho2, p, 2.0 * t)?;
    let field = xi.alpha * xi.alpha * n1 + xi.beta * xi.beta * n2 + 2.0 * xi.alpha * xi.beta * c12;
    let bound = xi.alpha * xi.alpha * n1 + xi.beta * xi.beta * n2 + 2.0 * (xi.alpha * xi.beta).abs() * c12.abs();
    Ok((field, bound))
}

/// Upper bound on |ξ| valid for every path on `grid`: the field terms plus
/// 2|αg|N Σ w_m K₁(0, T − t_m) and the matching ρ₂ sum (the kernel at the
/// origin dominates because the integrand is then positive).
pub fn xi_bound(xi: &XiSpec, params: &ModelParams, grid: &TimeGrid, quad_spec: &QuadratureSpec) -> Result<f64, Error> {
    let (_, field) = xi_field_terms(xi, params, grid.t_horizon)?;
    let t = grid.t_horizon;
    let m = grid.n_steps;
    let dt = grid.dt();
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    for k in 0..=m {
        let w = if k == 0 || k == m { 0.5 * dt } else { dt };
        let s = grid.time(k);
        s1 += w * eval_rho_kernel(&xi.rho1, params, 0.0, (s - t).abs(), quad_spec)?.value.abs();
        s2 += w * eval_rho_kernel(&xi.rho2, params, 0.0, (s + t).abs(), quad_spec)?.value.abs();
    }
    let n = params.n_particles as f64;
    Ok(field + 2.0 * (xi.alpha * params.g).abs() * n * s1 + 2.0 * (xi.beta * params.g).abs() * n * s2)
}

/// One κ of the weak-coupling comparison.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeakCouplingRow {
    pub kappa: f64,
    pub scaled: McEstimate,
    pub reference: McEstimate,
    pub gap: f64,
    /// √(SE_scaled² + SE_reference²), not exploiting the common random numbers.
    pub gap_se: f64,
}

/// Inputs of [`weak_coupling_compare`].
#[derive(Clone, Debug)]
pub struct WeakCouplingSpec {
    /// Massive, (2π)^{-3}-normalized model at ε = 0; κ is overridden per row.
    pub params: ModelParams,
    pub kappas: Vec<f64>,
    pub quad: QuadratureSpec,
    /// Build an interpolation table per κ covering distances up to this radius.
    pub table_radius: Option<f64>,
}

/// Scaled-kernel semigroup elements along a κ ladder against the reference
/// run with the Yukawa pair potential, on one common path ensemble.
pub fn weak_coupling_compare(
    f: &TestFunction,
    h: &TestFunction,
    spec: &WeakCouplingSpec,
    grid: &TimeGrid,
    n_paths: usize,
    rng: RngSpec,
    exec: &dyn Executor,
) -> Result<Vec<WeakCouplingRow>, Error> {
    let p = spec.params;
    if p.dispersion != crate::kernels::Dispersion::Massive {
        return Err(Error::InvalidParams("weak coupling needs a massive boson"));
    }
    let ens = sample_weighted_paths(f, grid, n_paths, rng, exec)?;
    let free = ActionConfig::new(ModelParams { g: 0.0, ..p }, Route::Decomposed);
    let reference_spec = SemigroupSpec::new(free, Potential::yukawa(p.g, p.nu));
    let lw_ref = log_weights(f, h, &reference_spec, &ens, exec)?;
    let reference = exp_mean(&lw_ref, reference_spec.n_batches, rng);
    let mut rows = Vec::with_capacity(spec.kappas.len());
    for &kappa in &spec.kappas {
        let pk = p.with_kappa(kappa);
        let mut cfg = ActionConfig::new(pk, Route::Decomposed).with_quad(spec.quad);
        if let Some(radius) = spec.table_radius {
            let ts = crate::kernels::TableSpec::for_params(&pk, radius, 2.0 * grid.t_horizon);
            cfg = cfg.with_table(Arc::new(KernelTable::build(&pk, &spec.quad, ts, exec)?));
        }
        let s = SemigroupSpec::new(cfg, Potential::Zero);
        let lw = log_weights(f, h, &s, &ens, exec)?;
        let scaled = exp_mean(&lw, s.n_batches, rng);
        rows.push(WeakCouplingRow {
            kappa,
            scaled,
            reference,
            gap: scaled.mean - reference.mean,
            gap_se: sqrt(scaled.std_error * scaled.std_error + reference.std_error * reference.std_error),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;
    use crate::paths::sample_ensemble;
    use alloc::vec;

    #[test]
    fn packet_is_normalized() {
        // ∫ f² factorizes over coordinates; check one axis of a 3D packet
        let g = TestFunction::gaussian(vec![0.0; 3], 0.7);
        let axis = |x: f64| g.value(&[x, 0.0, 0.0]) / g.value(&[0.0; 3]) * libm::pow(PI * 0.49, -0.25);
        let (v, _) = quad::integrate(|x| axis(x) * axis(x), -10.0, 10.0, 40, 1e-12).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn free_element_matches_monte_carlo() {
        let f = TestFunction::gaussian(vec![0.0; 3], 1.0);
        let h = TestFunction::gaussian(vec![0.5, 0.0, 0.0], 1.0);
        let grid = TimeGrid::new(0.5, 4, 0.5).unwrap();
        let cfg = ActionConfig::new(ModelParams::massless(0.1, 1.0, 0.0, 1), Route::Decomposed);
        let spec = SemigroupSpec::new(cfg, Potential::Zero);
        let est = semigroup_element(&f, &h, &spec, &grid, 20_000, RngSpec::new(11, 0), &Sequential).unwrap();
        let exact = f.free_matrix_element(&h, 1.0);
        assert!((est.mean - exact).abs() < 4.0 * est.std_error, "{} ± {} vs {exact}", est.mean, est.std_error);
    }

    #[test]
    fn pair_power_is_permutation_symmetric() {
        let v = Potential::PairPower { exponent: 1.0, coupling: 1.0 };
        let x = [0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0, 0.0];
        let y = [1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 0.0];
        assert!((v.value(&x) - v.value(&y)).abs() < 1e-15);
    }

    #[test]
    fn harmonic_proxy_with_matched_packet() {
        // f equals the oscillator ground state, so the proxy is exact at any T
        let delta = 0.5;
        let f = TestFunction::gaussian(vec![0.0; 3], libm::pow(2.0 * delta, -0.25));
        let grid = TimeGrid::new(0.5, 32, 0.5).unwrap();
        let cfg = ActionConfig::new(ModelParams::massless(0.1, 1.0, 0.0, 1), Route::Decomposed);
        let spec = SemigroupSpec::new(cfg, Potential::Harmonic { delta });
        let rows = ground_energy_proxy(&f, &spec, &[grid], 20_000, RngSpec::new(5, 0), &Sequential).unwrap();
        let exact = 1.5 * sqrt(2.0 * delta);
        // the trapezoid in time leaves an O(Δt²) bias well below the MC error
        assert!((rows[0].value - exact).abs() < 4.0 * rows[0].std_error + 2e-3, "{:?} vs {exact}", rows[0]);
    }

    fn xi_spec() -> XiSpec {
        XiSpec { rho1: RadialProfile::new(1.0, 0.5), rho2: RadialProfile::new(0.5, 1.0), alpha: 0.7, beta: -0.4 }
    }

    #[test]
    fn xi_norms_match_closed_form() {
        // massless, no cutoff: ∫ a² e^{−σ²k²}/|k| dk = 2π a²/σ²
        let p = ModelParams::massless(0.0, 0.0, 0.0, 1);
        let rho = RadialProfile::new(1.3, 0.8);
        let v = profile_inner(&rho, &rho, &p, 0.0).unwrap();
        let exact = 2.0 * PI * 1.69 / 0.64;
        assert!((v - exact).abs() < 1e-9 * exact, "{v} vs {exact}");
    }

    #[test]
    fn xi_without_coupling_is_path_independent() {
        let grid = TimeGrid::new(0.5, 8, 0.5).unwrap();
        let ens = sample_ensemble(&grid, &[vec![0.0; 6]], 3, RngSpec::new(9, 0), &Sequential).unwrap();
        let p = ModelParams::massless(0.0, 0.5, 0.0, 2);
        let q = QuadratureSpec::default();
        let v: Vec<f64> = (0..3).map(|k| compute_xi(&ens.path(k), &xi_spec(), &p, &q).unwrap()).collect();
        assert!(v.iter().all(|x| *x == v[0]));
        let zero = XiSpec { alpha: 0.0, beta: 0.0, ..xi_spec() };
        assert_eq!(compute_xi(&ens.path(0), &zero, &ModelParams { g: 1.0, ..p }, &q).unwrap(), 0.0);
    }

    #[test]
    fn xi_respects_uniform_bound() {
        let grid = TimeGrid::new(0.5, 8, 0.5).unwrap();
        let ens = sample_ensemble(&grid, &[vec![0.0, 0.0, 0.0, 0.3, 0.0, 0.0]], 20, RngSpec::new(10, 0), &Sequential).unwrap();
        let p = ModelParams::massless(0.0, 0.5, 1.5, 2);
        let q = QuadratureSpec::default();
        let bound = xi_bound(&xi_spec(), &p, &grid, &q).unwrap();
        for k in 0..20 {
            let x = compute_xi(&ens.path(k), &xi_spec(), &p, &q).unwrap();
            assert!(x.abs() <= bound * (1.0 + 1e-9), "{x} > {bound}");
        }
    }
}
