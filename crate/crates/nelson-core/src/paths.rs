//! Discretized two-sided Brownian paths for N particles in 3D.
//!
//! Paths start at time −T and run forward to T on a uniform grid. Storage is
//! one flat array indexed (path, time, particle, coordinate).

use alloc::vec::Vec;
use libm::sqrt;

use crate::error::Error;
use crate::exec::Executor;
use crate::rng::RngSpec;

/// Uniform grid t_m = −T + 2T·m/M on [−T, T] with diagonal window τ ∈ (0, 2T].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    pub t_horizon: f64,
    pub n_steps: usize,
    pub tau: f64,
}

impl TimeGrid {
    pub fn new(t_horizon: f64, n_steps: usize, tau: f64) -> Result<Self, Error> {
        let g = TimeGrid { t_horizon, n_steps, tau };
        g.validate()?;
        Ok(g)
    }

    /// Grid whose window covers the whole interval, so that [s + τ]_T = T
    /// for every s and the off-diagonal part of the action vanishes.
    pub fn full_window(t_horizon: f64, n_steps: usize) -> Result<Self, Error> {
        Self::new(t_horizon, n_steps, 2.0 * t_horizon)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.t_horizon > 0.0) || !self.t_horizon.is_finite() {
            return Err(Error::InvalidGrid("horizon T must be > 0"));
        }
        if self.n_steps < 2 || !self.n_steps.is_power_of_two() {
            return Err(Error::InvalidGrid("n_steps must be a power of two >= 2"));
        }
        // τ = 2T is the window spanning the whole interval [−T, T]
        if !(self.tau > 0.0 && self.tau <= 2.0 * self.t_horizon) {
            return Err(Error::InvalidGrid("tau must lie in (0, 2T]"));
        }
        Ok(())
    }

    #[inline]
    pub fn dt(&self) -> f64 {
        2.0 * self.t_horizon / self.n_steps as f64
    }

    #[inline]
    pub fn time(&self, m: usize) -> f64 {
        -self.t_horizon + 2.0 * self.t_horizon * m as f64 / self.n_steps as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.n_steps).map(|m| self.time(m)).collect()
    }

    /// [t]_T = max(−T, min(t, T)).
    #[inline]
    pub fn clamp(&self, t: f64) -> f64 {
        clamp_time(self, t)
    }

    /// The window τ in grid steps, if it is an exact multiple of Δt.
    pub fn tau_steps(&self) -> Option<usize> {
        let k = self.tau / self.dt();
        let r = libm::round(k);
        if r >= 1.0 && (k - r).abs() < 1e-9 * k.max(1.0) { Some(r as usize) } else { None }
    }

    /// The same horizon and window with twice as many steps.
    pub fn refined(&self) -> TimeGrid {
        TimeGrid { n_steps: self.n_steps * 2, ..*self }
    }
}

/// [t]_T = −T ∨ t ∧ T.
pub fn clamp_time(grid: &TimeGrid, t: f64) -> f64 {
    t.clamp(-grid.t_horizon, grid.t_horizon)
}

/// An immutable ensemble of discretized Brownian paths.
#[derive(Clone, Debug, PartialEq)]
pub struct PathEnsemble {
    grid: TimeGrid,
    n_particles: usize,
    n_paths: usize,
    positions: Vec<f64>,
    rng_spec: RngSpec,
    /// Seeds of every refinement applied since sampling, oldest first.
    lineage: Vec<RngSpec>,
}

/// Borrowed view of one path.
#[derive(Clone, Copy, Debug)]
pub struct Path<'a> {
    pub grid: TimeGrid,
    pub n_particles: usize,
    data: &'a [f64],
}

impl<'a> Path<'a> {
    /// Wrap raw positions laid out (time, particle, coordinate).
    pub fn new(grid: TimeGrid, n_particles: usize, data: &'a [f64]) -> Result<Self, Error> {
        if n_particles == 0 || data.len() != (grid.n_steps + 1) * n_particles * 3 {
            return Err(Error::InvalidGrid("position array does not match grid and particle count"));
        }
        Ok(Path { grid, n_particles, data })
    }

    #[inline]
    pub fn pos(&self, m: usize, particle: usize) -> [f64; 3] {
        let o = (m * self.n_particles + particle) * 3;
        [self.data[o], self.data[o + 1], self.data[o + 2]]
    }

    /// All particle coordinates at time index m, as a point of R^{3N}.
    #[inline]
    pub fn config(&self, m: usize) -> &'a [f64] {
        let w = self.n_particles * 3;
        &self.data[m * w..(m + 1) * w]
    }

    pub fn raw(&self) -> &'a [f64] {
        self.data
    }
}

impl PathEnsemble {
    /// Assemble an ensemble from raw positions (path, time, particle, coordinate).
    pub fn from_positions(
        grid: TimeGrid,
        n_particles: usize,
        positions: Vec<f64>,
        rng_spec: RngSpec,
        lineage: Vec<RngSpec>,
    ) -> Result<Self, Error> {
        grid.validate()?;
        let per = (grid.n_steps + 1) * n_particles * 3;
        if n_particles == 0 || positions.is_empty() || positions.len() % per != 0 {
            return Err(Error::InvalidGrid("position array does not match grid and particle count"));
        }
        let n_paths = positions.len() / per;
        Ok(PathEnsemble { grid, n_particles, n_paths, positions, rng_spec, lineage })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    pub fn n_paths(&self) -> usize {
        self.n_paths
    }

    pub fn rng_spec(&self) -> RngSpec {
        self.rng_spec
    }

    pub fn lineage(&self) -> &[RngSpec] {
        &self.lineage
    }

    /// Number of refinements since sampling.
    pub fn depth(&self) -> usize {
        self.lineage.len()
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    fn stride(&self) -> usize {
        (self.grid.n_steps + 1) * self.n_particles * 3
    }

    pub fn path(&self, k: usize) -> Path<'_> {
        let s = self.stride();
        Path { grid: self.grid, n_particles: self.n_particles, data: &self.positions[k * s..(k + 1) * s] }
    }

    /// Keep every `factor`-th time point (undoes `refine` when factor = 2^depth).
    pub fn coarsen(&self, factor: usize) -> Result<PathEnsemble, Error> {
        if factor == 0 || self.grid.n_steps % factor != 0 {
            return Err(Error::InvalidGrid("coarsening factor must divide n_steps"));
        }
        let grid = TimeGrid { n_steps: self.grid.n_steps / factor, ..self.grid };
        grid.validate()?;
        let w = self.n_particles * 3;
        let mut out = Vec::with_capacity(self.n_paths * (grid.n_steps + 1) * w);
        for k in 0..self.n_paths {
            let p = self.path(k);
            for m in 0..=grid.n_steps {
                out.extend_from_slice(p.config(m * factor));
            }
        }
        let keep = self.lineage.len().saturating_sub(factor.trailing_zeros() as usize);
        Ok(PathEnsemble {
            grid,
            n_particles: self.n_particles,
            n_paths: self.n_paths,
            positions: out,
            rng_spec: self.rng_spec,
            lineage: self.lineage[..keep].to_vec(),
        })
    }
}

/// Sample `n_paths` independent discrete Brownian paths from −T.
///
/// Path k starts at `starts[k % starts.len()]` (each a point of R^{3N}) and
/// draws its increments from sub-stream k of `rng`.
pub fn sample_ensemble(
    grid: &TimeGrid,
    starts: &[Vec<f64>],
    n_paths: usize,
    rng: RngSpec,
    exec: &dyn Executor,
) -> Result<PathEnsemble, Error> {
    grid.validate()?;
    if starts.is_empty() || n_paths == 0 {
        return Err(Error::InvalidGrid("need at least one start point and one path"));
    }
    let dim = starts[0].len();
    if dim == 0 || dim % 3 != 0 || starts.iter().any(|s| s.len() != dim) {
        return Err(Error::InvalidGrid("start points must all lie in R^{3N}"));
    }
    let m = grid.n_steps;
    let sd = sqrt(grid.dt());
    let blocks: Vec<Vec<f64>> = exec.map(n_paths, &|k: usize| {
        let mut g = rng.substream(k as u64).stream();
        let mut out = Vec::with_capacity((m + 1) * dim);
        out.extend_from_slice(&starts[k % starts.len()]);
        for step in 0..m {
            let base = step * dim;
            for c in 0..dim {
                let next = out[base + c] + sd * g.normal();
                out.push(next);
            }
        }
        out
    });
    let mut positions = Vec::with_capacity(n_paths * (m + 1) * dim);
    for b in blocks {
        positions.extend(b);
    }
    Ok(PathEnsemble { grid: *grid, n_particles: dim / 3, n_paths, positions, rng_spec: rng, lineage: Vec::new() })
}

/// Halve the step by inserting Brownian-bridge midpoints.
///
/// Given neighbours a and b a step Δt apart, the midpoint is
/// (a + b)/2 + √(Δt/4)·Z. Coarse-time positions are copied unchanged.
pub fn refine(ensemble: &PathEnsemble, rng: RngSpec, exec: &dyn Executor) -> Result<PathEnsemble, Error> {
    let grid = ensemble.grid.refined();
    grid.validate()?;
    let dim = ensemble.n_particles * 3;
    let m = ensemble.grid.n_steps;
    let sd = sqrt(ensemble.grid.dt() / 4.0);
    let blocks: Vec<Vec<f64>> = exec.map(ensemble.n_paths, &|k: usize| {
        let mut g = rng.substream(k as u64).stream();
        let p = ensemble.path(k);
        let mut out = Vec::with_capacity((2 * m + 1) * dim);
        for step in 0..m {
            let a = p.config(step);
            let b = p.config(step + 1);
            out.extend_from_slice(a);
            for c in 0..dim {
                out.push(0.5 * (a[c] + b[c]) + sd * g.normal());
            }
        }
        out.extend_from_slice(p.config(m));
        out
    });
    let mut positions = Vec::with_capacity(ensemble.n_paths * (2 * m + 1) * dim);
    for b in blocks {
        positions.extend(b);
    }
    let mut lineage = ensemble.lineage.clone();
    lineage.push(rng);
    Ok(PathEnsemble {
        grid,
        n_particles: ensemble.n_particles,
        n_paths: ensemble.n_paths,
        positions,
        rng_spec: ensemble.rng_spec,
        lineage,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;
    use alloc::vec;

    fn grid(m: usize) -> TimeGrid {
        TimeGrid::new(1.0, m, 1.0).unwrap()
    }

    #[test]
    fn clamp_examples() {
        let g = grid(4);
        assert_eq!(clamp_time(&g, 2.0), 1.0);
        assert_eq!(clamp_time(&g, -5.0), -1.0);
        assert_eq!(clamp_time(&g, 0.3), 0.3);
    }

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(1.0, 6, 0.5).is_err());
        assert!(TimeGrid::new(1.0, 8, 2.5).is_err());
        assert_eq!(TimeGrid::new(1.0, 8, 0.5).unwrap().tau_steps(), Some(2));
        assert_eq!(TimeGrid::new(1.0, 8, 0.3).unwrap().tau_steps(), None);
    }

    #[test]
    fn two_step_path_is_reproducible() {
        let g = grid(2);
        let starts = vec![vec![0.5, -1.0, 2.0]];
        let a = sample_ensemble(&g, &starts, 1, RngSpec::new(9, 0), &Sequential).unwrap();
        let b = sample_ensemble(&g, &starts, 1, RngSpec::new(9, 0), &Sequential).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.positions().len(), 9);
        assert_eq!(a.path(0).pos(0, 0), [0.5, -1.0, 2.0]);
    }

    #[test]
    fn refine_keeps_coarse_points() {
        let g = grid(8);
        let starts = vec![vec![0.0; 6]];
        let a = sample_ensemble(&g, &starts, 5, RngSpec::new(3, 1), &Sequential).unwrap();
        let r = refine(&a, RngSpec::new(4, 0), &Sequential).unwrap();
        let rr = refine(&r, RngSpec::new(5, 0), &Sequential).unwrap();
        assert_eq!(rr.depth(), 2);
        let back = rr.coarsen(4).unwrap();
        assert_eq!(back.positions(), a.positions());
    }
}
