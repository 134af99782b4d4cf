//! Kato-class diagnostics for radial potentials V(x) = c|x|^{−s} (or bounded
//! V) in dimension d, and the Monte Carlo checks that go with them.
//!
//! The analytic criterion looks at
//!
//! ```text
//! D(r) = sup_x ∫_{|x−y|<r} |g(x − y) V(y)| dy
//! ```
//!
//! with g the Green-type kernel (1 in d = 1, |ln|x|| in d = 2, |x|^{2−d}
//! otherwise). For radially decreasing |V| the supremum sits at
//! x = 0, which reduces D to a one-dimensional radial integral.

use alloc::vec::Vec;
use core::f64::consts::PI;
use libm::{exp, fabs, log, pow, sqrt};

use crate::error::Error;
use crate::estimator::{Potential, SINGULAR_CLIP};
use crate::exec::Executor;
use crate::quad;
use crate::rng::RngSpec;
use crate::stats::{linear_fit, RunningStats};

/// Radial potential whose Kato-class membership is tested.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RadialPotential {
    /// coupling · |x|^{−exponent}
    Power { exponent: f64, coupling: f64 },
    /// Any potential with |V| ≤ bound; D is evaluated for |V| ≡ bound.
    Bounded { bound: f64 },
}

impl RadialPotential {
    pub fn power(exponent: f64) -> Self {
        RadialPotential::Power { exponent, coupling: 1.0 }
    }

    /// |V| at radius ρ, clipped near a singular origin.
    pub fn abs_at(&self, rho: f64) -> f64 {
        self.abs_unclipped(rho.max(SINGULAR_CLIP))
    }

    fn abs_unclipped(&self, rho: f64) -> f64 {
        match *self {
            RadialPotential::Power { exponent, coupling } => fabs(coupling) * pow(rho, -exponent),
            RadialPotential::Bounded { bound } => fabs(bound),
        }
    }
}

/// Potential and ambient dimension.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KatoSpec {
    pub potential: RadialPotential,
    pub dim: usize,
}

impl KatoSpec {
    pub fn new(potential: RadialPotential, dim: usize) -> Self {
        KatoSpec { potential, dim }
    }

    fn validate(&self) -> Result<(), Error> {
        if self.dim == 0 {
            return Err(Error::InvalidParams("dimension must be >= 1"));
        }
        match self.potential {
            RadialPotential::Power { exponent, coupling } if exponent.is_finite() && coupling.is_finite() => Ok(()),
            RadialPotential::Bounded { bound } if bound.is_finite() => Ok(()),
            _ => Err(Error::InvalidParams("potential constants must be finite")),
        }
    }
}

/// Green-type kernel g as a function of ρ = |x|.
fn green(dim: usize, rho: f64) -> f64 {
    match dim {
        1 => 1.0,
        2 => fabs(log(rho)),
        d => pow(rho, 2.0 - d as f64),
    }
}

/// Area of the unit sphere in R^d.
fn sphere_area(dim: usize) -> f64 {
    let d = dim as f64;
    2.0 * pow(PI, 0.5 * d) / libm::tgamma(0.5 * d)
}

/// Number of four-decade shells [r·10^{−4(j+1)}, r·10^{−4j}] probed below r.
const PROBE_STEPS: usize = 6;
/// Increment ratio at or above which the inner integral is declared divergent.
const DIVERGENCE_RATIO: f64 = 0.99;

/// Value of D(r), or `None` when the inner integral diverges.
fn diagnostic(spec: &KatoSpec, r: f64) -> Result<Option<f64>, Error> {
    let area = sphere_area(spec.dim);
    let d = spec.dim as f64;
    // substitute ρ = e^u so power laws become exponentials in u
    let integrand = |u: f64| {
        let rho = exp(u);
        area * green(spec.dim, rho) * spec.potential.abs_unclipped(rho) * pow(rho, d)
    };
    let mut prev_inc: Option<f64> = None;
    let mut total = 0.0;
    let mut hi = log(r);
    let mut ratio = 0.0;
    for _ in 0..PROBE_STEPS {
        let lo = hi - 4.0 * core::f64::consts::LN_10;
        let (inc, _) = quad::integrate(integrand, lo, hi, 16, 1e-12)?;
        if !inc.is_finite() {
            return Ok(None);
        }
        total += inc;
        if let Some(p) = prev_inc {
            ratio = if p > 0.0 { inc / p } else { 0.0 };
        }
        prev_inc = Some(inc);
        hi = lo;
    }
    if ratio >= DIVERGENCE_RATIO {
        return Ok(None);
    }
    // geometric tail beyond the last probe
    let last = prev_inc.unwrap_or(0.0);
    if ratio > 0.0 {
        total += last * ratio / (1.0 - ratio);
    }
    Ok(Some(total))
}

/// Outcome of [`kato_criterion`].
#[derive(Clone, Debug, PartialEq)]
pub struct KatoVerdict {
    pub pass: bool,
    /// (r, D(r)) with r decreasing; D is infinite where it diverges.
    pub curve: Vec<(f64, f64)>,
    /// Log-log slope of D against r; positive means D → 0.
    pub slope: f64,
}

/// Radii of the diagnostic curve.
pub const KATO_RADII: [f64; 6] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
/// Minimum log-log slope for D(r) → 0 to be accepted.
pub const KATO_MIN_SLOPE: f64 = 1e-3;

/// Numerical Kato-class verdict: pass iff D(r) is finite, decreasing along
/// [`KATO_RADII`], and its log-log slope is positive.
pub fn kato_criterion(spec: &KatoSpec) -> Result<KatoVerdict, Error> {
    spec.validate()?;
    let mut curve = Vec::with_capacity(KATO_RADII.len());
    let mut finite = true;
    for &r in &KATO_RADII {
        match diagnostic(spec, r)? {
            Some(v) => curve.push((r, v)),
            None => {
                finite = false;
                curve.push((r, f64::INFINITY));
            }
        }
    }
    if !finite {
        return Ok(KatoVerdict { pass: false, curve, slope: f64::NAN });
    }
    let xs: Vec<f64> = curve.iter().map(|c| log(c.0)).collect();
    let ys: Vec<f64> = curve.iter().map(|c| log(c.1.max(f64::MIN_POSITIVE))).collect();
    let (slope, _) = linear_fit(&xs, &ys);
    let decreasing = curve.windows(2).all(|w| w[1].1 <= w[0].1);
    Ok(KatoVerdict { pass: decreasing && slope > KATO_MIN_SLOPE, curve, slope })
}

/// Brownian motion in R^d from `start`, sampled at step h for `n` steps.
fn brownian(start: &[f64], h: f64, n: usize, rng: RngSpec) -> Vec<f64> {
    let d = start.len();
    let mut g = rng.stream();
    let sh = sqrt(h);
    let mut out = Vec::with_capacity((n + 1) * d);
    out.extend_from_slice(start);
    for k in 0..n {
        for c in 0..d {
            let prev = out[k * d + c];
            out.push(prev + sh * g.normal());
        }
    }
    out
}

fn norm(x: &[f64]) -> f64 {
    sqrt(x.iter().map(|v| v * v).sum())
}

/// Trapezoid partial integrals ∫_0^{t_k}|V(W_s)|ds at every grid time.
/// A node sitting exactly on the singularity gets weight zero.
fn running_integral(spec: &KatoSpec, path: &[f64], h: f64) -> Vec<f64> {
    let d = spec.dim;
    let n = path.len() / d - 1;
    let val = |k: usize| {
        let rho = norm(&path[k * d..(k + 1) * d]);
        if rho == 0.0 && matches!(spec.potential, RadialPotential::Power { exponent, .. } if exponent > 0.0) {
            0.0
        } else {
            spec.potential.abs_at(rho)
        }
    };
    let mut acc = Vec::with_capacity(n + 1);
    acc.push(0.0);
    let mut prev = val(0);
    let mut s = 0.0;
    for k in 1..=n {
        let cur = val(k);
        s += 0.5 * h * (prev + cur);
        acc.push(s);
        prev = cur;
    }
    acc
}

/// Start points for the sup over x: the origin first, then a deterministic
/// lattice in [−2, 2]^d.
pub fn kato_starts(dim: usize, n_starts: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(n_starts.max(1));
    out.push(alloc::vec![0.0; dim]);
    let mut k = 1usize;
    while out.len() < n_starts {
        // van der Corput style radical inverses, one base per axis
        let bases = [2u64, 3, 5, 7, 11, 13];
        let p: Vec<f64> = (0..dim).map(|c| 4.0 * radical_inverse(k as u64, bases[c % bases.len()]) - 2.0).collect();
        out.push(p);
        k += 1;
    }
    out
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// One Monte Carlo curve of [`kato_mc`].
#[derive(Clone, Debug, PartialEq)]
pub struct KatoCurve {
    /// (t, sup_x mean ∫_0^t|V(W_s^x)|ds, its standard error)
    pub points: Vec<(f64, f64, f64)>,
}

/// Steps per unit time in the Monte Carlo checks.
pub const KATO_STEPS_PER_UNIT: usize = 1024;

/// Estimate t ↦ sup_x E^x ∫_0^t |V(W_s)| ds over `starts`.
pub fn kato_mc(
    spec: &KatoSpec,
    t_list: &[f64],
    n_paths: usize,
    n_starts: usize,
    rng: RngSpec,
    exec: &dyn Executor,
) -> Result<KatoCurve, Error> {
    spec.validate()?;
    let t_max = t_list.iter().copied().fold(0.0, f64::max);
    if !(t_max > 0.0) || t_list.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::InvalidParams("times must be > 0"));
    }
    let n_steps = libm::ceil(t_max * KATO_STEPS_PER_UNIT as f64) as usize;
    let h = t_max / n_steps as f64;
    let idx: Vec<usize> = t_list.iter().map(|t| (libm::round(t / h) as usize).min(n_steps)).collect();
    let starts = kato_starts(spec.dim, n_starts);
    let mut points: Vec<(f64, f64, f64)> = t_list.iter().map(|&t| (t, f64::NEG_INFINITY, 0.0)).collect();
    for (si, x0) in starts.iter().enumerate() {
        let srng = rng.substream(si as u64);
        let per_path: Vec<Vec<f64>> = exec.map(n_paths, &|k: usize| {
            let path = brownian(x0, h, n_steps, srng.substream(k as u64));
            let acc = running_integral(spec, &path, h);
            idx.iter().map(|&i| acc[i]).collect()
        });
        for (j, pt) in points.iter_mut().enumerate() {
            let st: RunningStats = per_path.iter().map(|v| v[j]).collect();
            if st.mean > pt.1 {
                *pt = (pt.0, st.mean, st.std_error());
            }
        }
    }
    Ok(KatoCurve { points })
}

/// One (β, τ) entry of [`exp_bound_mc`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpBoundEntry {
    pub beta: f64,
    pub tau: f64,
    /// sup over starts of the mean of e^{β∫_0^τ|V(W_s)|ds}
    pub value: f64,
    pub std_error: f64,
}

/// Estimate sup_x E^x e^{β∫_0^τ|V(W_s)|ds}. Fails with `PreflightFailed`
/// unless the analytic criterion passes first.
pub fn exp_bound_mc(
    spec: &KatoSpec,
    betas: &[f64],
    taus: &[f64],
    n_paths: usize,
    n_starts: usize,
    rng: RngSpec,
    exec: &dyn Executor,
) -> Result<Vec<ExpBoundEntry>, Error> {
    if !kato_criterion(spec)?.pass {
        return Err(Error::PreflightFailed);
    }
    let t_max = taus.iter().copied().fold(0.0, f64::max);
    if !(t_max > 0.0) || taus.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::InvalidParams("times must be > 0"));
    }
    let n_steps = libm::ceil(t_max * KATO_STEPS_PER_UNIT as f64) as usize;
    let h = t_max / n_steps as f64;
    let idx: Vec<usize> = taus.iter().map(|t| (libm::round(t / h) as usize).min(n_steps)).collect();
    let starts = kato_starts(spec.dim, n_starts);
    let mut out: Vec<ExpBoundEntry> = Vec::new();
    for &beta in betas {
        for &tau in taus {
            out.push(ExpBoundEntry { beta, tau, value: f64::NEG_INFINITY, std_error: 0.0 });
        }
    }
    for (si, x0) in starts.iter().enumerate() {
        let srng = rng.substream(si as u64);
        let per_path: Vec<Vec<f64>> = exec.map(n_paths, &|k: usize| {
            let path = brownian(x0, h, n_steps, srng.substream(k as u64));
            let acc = running_integral(spec, &path, h);
            idx.iter().map(|&i| acc[i]).collect()
        });
        for (bi, &beta) in betas.iter().enumerate() {
            for (ti, _) in taus.iter().enumerate() {
                let st: RunningStats = per_path.iter().map(|v| exp(beta * v[ti])).collect();
                let e = &mut out[bi * taus.len() + ti];
                if st.mean > e.value {
                    e.value = st.mean;
                    e.std_error = st.std_error();
                }
            }
        }
    }
    Ok(out)
}

/// The N-body lift Σ_{i≠j} V(x^i − x^j) of a Kato-class power potential.
pub fn lift_pairwise(spec: &KatoSpec, n_particles: usize) -> Result<Potential, Error> {
    if spec.dim != 3 {
        return Err(Error::InvalidParams("particles live in three dimensions"));
    }
    if n_particles < 2 {
        return Err(Error::InvalidParams("a pair potential needs two particles"));
    }
    if !kato_criterion(spec)?.pass {
        return Err(Error::PreflightFailed);
    }
    match spec.potential {
        RadialPotential::Power { exponent, coupling } => Ok(Potential::PairPower { exponent, coupling }),
        RadialPotential::Bounded { .. } => Err(Error::InvalidParams("only power laws have a pairwise lift")),
    }
}
