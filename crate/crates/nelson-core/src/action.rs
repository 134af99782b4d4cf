//! Path actions: the naive double time integral of the pair interaction,
//! its diagonal/off-diagonal split, and the Itô decomposition of the
//! diagonal part into a counterterm plus the finite terms X, Y, Z.
//!
//! All sums run over ordered particle pairs (i, j) including i = j, except
//! X which takes i ≠ j (the i = j part of that term is the counterterm
//! 4NT·φ_ε(0,0)).
//!
//! Discretization on the grid t_m = −T + mΔt, with window τ = kΔt:
//!
//! * outer s-integrals use trapezoid weights w_m;
//! * the inner t-integral of S_dd runs over [t_m, t_{e(m)}], e(m) = min(m+k, M),
//!   by trapezoid, and that of S_od over [t_{e(m)}, T]; the diagonal node
//!   carries w_m², so S_dd + S_od equals the full-square trapezoid exactly;
//! * Z drops the zero-lag self node at s = T (it would sample φ_ε(0,0));
//! * the drift Φ_n integrates over s ∈ [[t_n − τ]_T, t_n) by trapezoid with the
//!   s = t_n node dropped, and Y is its left-point sum against B_{n+1} − B_n.
//!
//! Evaluation is organised by time lag: for each lag ℓ the kernels are
//! reduced to a function of distance once, and every (m, m+ℓ) pair reuses it.

use alloc::sync::Arc;
use alloc::vec::Vec;
use libm::sqrt;

use crate::error::Error;
use crate::exec::Executor;
use crate::kernels::{eval_kernels, eval_phi, KernelTable, KernelTriple, LagSlice, ModelParams, QuadratureSpec};
use crate::paths::{Path, PathEnsemble, TimeGrid};

/// How the renormalized action is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    /// Full double integral minus the counterterm (needs ε > 0).
    Naive,
    /// S_od + X + Y + Z (valid for ε ≥ 0).
    Decomposed,
}

/// Model, route and kernel source for action evaluation. The window τ is
/// taken from the path's [`TimeGrid`].
#[derive(Clone, Debug)]
pub struct ActionConfig {
    pub params: ModelParams,
    pub route: Route,
    pub quad: QuadratureSpec,
    /// Optional interpolation table; points outside it are integrated directly.
    pub table: Option<Arc<KernelTable>>,
}

impl ActionConfig {
    pub fn new(params: ModelParams, route: Route) -> Self {
        ActionConfig { params, route, quad: QuadratureSpec::default(), table: None }
    }

    pub fn with_table(mut self, table: Arc<KernelTable>) -> Self {
        self.table = Some(table);
        self
    }

    pub fn with_quad(mut self, quad: QuadratureSpec) -> Self {
        self.quad = quad;
        self
    }

    pub fn validate(&self) -> Result<(), Error> {
        self.params.validate_phi()?;
        if self.route == Route::Naive && self.params.eps == 0.0 {
            return Err(Error::RouteForbidden("the naive route needs eps > 0"));
        }
        if let Some(t) = &self.table {
            if t.params() != &self.params {
                return Err(Error::InvalidParams("kernel table was built for different parameters"));
            }
        }
        Ok(())
    }
}

/// Every action functional of one path. Terms that the chosen route does
/// not compute are `None`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ActionBreakdown {
    pub s_total: Option<f64>,
    pub s_dd: Option<f64>,
    pub s_od: Option<f64>,
    pub x_term: Option<f64>,
    pub y_term: Option<f64>,
    pub z_term: Option<f64>,
    pub s_ren: f64,
    /// 4NT·φ_ε(0,0); `None` at ε = 0 where it diverges.
    pub diag_counterterm: Option<f64>,
    /// s_dd − (counterterm + X + Y + Z), when all are available.
    pub ito_residual: Option<f64>,
}

/// Which pieces one sweep over the path should accumulate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Terms {
    pub dd: bool,
    pub od: bool,
    pub x: bool,
    pub y: bool,
    pub z: bool,
}

impl Terms {
    pub const ALL: Terms = Terms { dd: true, od: true, x: true, y: true, z: true };
}

/// Raw sums of one sweep.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TermValues {
    pub dd: f64,
    pub od: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

enum LagKernel<'a> {
    Direct { params: &'a ModelParams, quad: &'a QuadratureSpec, t: f64 },
    Slice(LagSlice<'a>),
}

impl LagKernel<'_> {
    #[inline]
    fn eval(&self, r: f64) -> Result<KernelTriple, Error> {
        match self {
            LagKernel::Direct { params, quad, t } => eval_kernels(params, r, *t, quad),
            LagKernel::Slice(s) => s.eval(r),
        }
    }
}

fn lag_kernel<'a>(cfg: &'a ActionConfig, t: f64) -> LagKernel<'a> {
    match &cfg.table {
        Some(tab) => LagKernel::Slice(tab.slice(t)),
        None => LagKernel::Direct { params: &cfg.params, quad: &cfg.quad, t },
    }
}

fn window_steps(grid: &TimeGrid) -> Result<usize, Error> {
    grid.tau_steps().ok_or(Error::InvalidGrid("tau must be a multiple of the time step"))
}

#[inline]
fn trap_weight(grid: &TimeGrid, m: usize) -> f64 {
    if m == 0 || m == grid.n_steps { 0.5 * grid.dt() } else { grid.dt() }
}

#[inline]
fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
fn norm(a: [f64; 3]) -> f64 {
    sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2])
}

/// One pass over (lag, start time, particle pair) accumulating the
/// requested terms.
pub fn sweep(path: &Path<'_>, cfg: &ActionConfig, terms: Terms) -> Result<TermValues, Error> {
    let grid = path.grid;
    let m_max = grid.n_steps;
    let k = window_steps(&grid)?;
    let n = path.n_particles;
    let dt = grid.dt();
    if cfg.params.eps == 0.0 && terms.dd {
        return Err(Error::RouteForbidden("the diagonal part diverges at eps = 0"));
    }
    let thr = cfg.quad.small_x_threshold;
    let max_lag = if terms.od { m_max } else if terms.dd || terms.y || terms.z { k.min(m_max) } else { 0 };

    let mut out = TermValues::default();
    // drift Φ_n^i, flattened (n, i, coordinate)
    let mut drift = if terms.y { alloc::vec![0.0; (m_max + 1) * n * 3] } else { Vec::new() };

    for lag in 0..=max_lag {
        let lk = lag_kernel(cfg, lag as f64 * dt);
        for m in 0..=(m_max - lag) {
            let nn = m + lag;
            let wm = trap_weight(&grid, m);
            let end = (m + k).min(m_max);
            // S_dd / S_od weights of the (m, nn) node
            let w_dd = if !terms.dd || nn > end {
                0.0
            } else if lag == 0 {
                wm * wm
            } else if nn == end {
                wm * dt
            } else {
                2.0 * wm * dt
            };
            let w_od = if !terms.od || nn < m + k || m + k >= m_max {
                0.0
            } else if nn == m + k || nn == m_max {
                wm * dt
            } else {
                2.0 * wm * dt
            };
            let z_here = terms.z && nn == end;
            let x_here = terms.x && lag == 0;
            // drift weight: trapezoid over [[t_nn − τ]_T, t_nn), endpoint t_nn dropped
            let y_w = if terms.y && lag >= 1 && lag <= k.min(nn) {
                if lag == k.min(nn) { 0.5 * dt } else { dt }
            } else {
                0.0
            };
            if w_dd == 0.0 && w_od == 0.0 && !z_here && !x_here && y_w == 0.0 {
                continue;
            }
            for i in 0..n {
                let bi = path.pos(nn, i);
                for j in 0..n {
                    // The zero-lag self node enters Z only at s = T, a single
                    // trapezoid node holding φ_ε(0,0) which diverges as ε → 0.
                    // It gets weight 0 for every ε so the sum stays uniform in ε.
                    let self_node = lag == 0 && i == j;
                    if self_node && !terms.dd {
                        continue;
                    }
                    let d = sub(bi, path.pos(m, j));
                    let r = norm(d);
                    let kv = lk.eval(r)?;
                    out.dd += w_dd * kv.w;
                    out.od += w_od * kv.w;
                    if z_here && !self_node {
                        out.z -= 2.0 * wm * kv.phi;
                    }
                    if x_here && i != j {
                        out.x += 2.0 * wm * kv.phi;
                    }
                    if y_w != 0.0 && r >= thr {
                        let s = 2.0 * y_w * kv.dphi_dr / r;
                        let o = (nn * n + i) * 3;
                        drift[o] += s * d[0];
                        drift[o + 1] += s * d[1];
                        drift[o + 2] += s * d[2];
                    }
                }
            }
        }
    }
    if terms.y {
        // left-point Itô sum: Φ at t_m against the forward increment
        let mut y = 0.0;
        for m in 0..m_max {
            for i in 0..n {
                let db = sub(path.pos(m + 1, i), path.pos(m, i));
                let o = (m * n + i) * 3;
                y += drift[o] * db[0] + drift[o + 1] * db[1] + drift[o + 2] * db[2];
            }
        }
        out.y = y;
    }
    Ok(out)
}

/// The drift process Φ_n^i on the grid, flattened (time, particle, coordinate).
pub fn drift_process(path: &Path<'_>, cfg: &ActionConfig) -> Result<Vec<f64>, Error> {
    // rerun the Y part of the sweep, keeping the buffer
    let grid = path.grid;
    let m_max = grid.n_steps;
    let k = window_steps(&grid)?;
    let n = path.n_particles;
    let dt = grid.dt();
    let thr = cfg.quad.small_x_threshold;
    let mut drift = alloc::vec![0.0; (m_max + 1) * n * 3];
    for lag in 1..=k.min(m_max) {
        let lk = lag_kernel(cfg, lag as f64 * dt);
        for nn in lag..=m_max {
            let m = nn - lag;
            let w = if lag == k.min(nn) { 0.5 * dt } else { dt };
            for i in 0..n {
                let bi = path.pos(nn, i);
                for j in 0..n {
                    let d = sub(bi, path.pos(m, j));
                    let r = norm(d);
                    if r < thr {
                        continue;
                    }
                    let s = 2.0 * w * lk.eval(r)?.dphi_dr / r;
                    let o = (nn * n + i) * 3;
                    drift[o] += s * d[0];
                    drift[o + 1] += s * d[1];
                    drift[o + 2] += s * d[2];
                }
            }
        }
    }
    Ok(drift)
}

/// 4NT·φ_ε(0,0).
pub fn diag_counterterm(params: &ModelParams, grid: &TimeGrid, quad: &QuadratureSpec) -> Result<f64, Error> {
    let phi00 = eval_phi(params, 0.0, 0.0, quad)?.value;
    Ok(4.0 * params.n_particles as f64 * grid.t_horizon * phi00)
}

fn check_particles(path: &Path<'_>, cfg: &ActionConfig) -> Result<(), Error> {
    cfg.validate()?;
    if path.n_particles != cfg.params.n_particles {
        return Err(Error::InvalidParams("path and model disagree on the particle count"));
    }
    Ok(())
}

/// Full-square trapezoid of Σ_{i,j} ∬ W_ε(B_t^i − B_s^j, t − s) ds dt.
pub fn action_naive(path: &Path<'_>, cfg: &ActionConfig) -> Result<f64, Error> {
    check_particles(path, cfg)?;
    if cfg.params.eps == 0.0 {
        return Err(Error::RouteForbidden("the naive action diverges at eps = 0"));
    }
    let v = sweep(path, cfg, Terms { dd: true, od: true, ..Terms::default() })?;
    Ok(v.dd + v.od)
}

/// (S_dd, S_od). At ε = 0 only S_od exists and S_dd is returned as `None`.
pub fn action_split(path: &Path<'_>, cfg: &ActionConfig) -> Result<(Option<f64>, f64), Error> {
    cfg.params.validate_phi()?;
    if path.n_particles != cfg.params.n_particles {
        return Err(Error::InvalidParams("path and model disagree on the particle count"));
    }
    let dd = cfg.params.eps > 0.0;
    let v = sweep(path, cfg, Terms { dd, od: true, ..Terms::default() })?;
    Ok((dd.then_some(v.dd), v.od))
}

/// X = 2 Σ_{i≠j} ∫ φ_ε(B_s^i − B_s^j, 0) ds.
pub fn term_x(path: &Path<'_>, cfg: &ActionConfig) -> Result<f64, Error> {
    check_particles(path, cfg)?;
    if cfg.params.lambda <= 0.0 {
        return Err(Error::InvalidParams("X needs an infrared cutoff lambda > 0"));
    }
    Ok(sweep(path, cfg, Terms { x: true, ..Terms::default() })?.x)
}

/// Y = Σ_i Σ_m Φ_m^i · (B_{m+1}^i − B_m^i).
pub fn term_y(path: &Path<'_>, cfg: &ActionConfig) -> Result<f64, Error> {
    check_particles(path, cfg)?;
    Ok(sweep(path, cfg, Terms { y: true, ..Terms::default() })?.y)
}

/// Z = −2 Σ_{i,j} ∫ φ_ε(B^i_{[s+τ]_T} − B^j_s, [s+τ]_T − s) ds.
pub fn term_z(path: &Path<'_>, cfg: &ActionConfig) -> Result<f64, Error> {
    check_particles(path, cfg)?;
    Ok(sweep(path, cfg, Terms { z: true, ..Terms::default() })?.z)
}

/// Every term the configured route can produce.
pub fn action_renormalized(path: &Path<'_>, cfg: &ActionConfig) -> Result<ActionBreakdown, Error> {
    check_particles(path, cfg)?;
    let eps_pos = cfg.params.eps > 0.0;
    let ct = if eps_pos { Some(diag_counterterm(&cfg.params, &path.grid, &cfg.quad)?) } else { None };
    match cfg.route {
        Route::Naive => {
            let v = sweep(path, cfg, Terms { dd: true, od: true, ..Terms::default() })?;
            let total = v.dd + v.od;
            let ct = ct.unwrap_or(0.0);
            Ok(ActionBreakdown {
                s_total: Some(total),
                s_dd: Some(v.dd),
                s_od: Some(v.od),
                s_ren: total - ct,
                diag_counterterm: Some(ct),
                ..ActionBreakdown::default()
            })
        }
        Route::Decomposed => {
            let v = sweep(path, cfg, Terms { dd: eps_pos, ..Terms::ALL })?;
            let s_ren = v.od + v.x + v.y + v.z;
            let mut b = ActionBreakdown {
                s_od: Some(v.od),
                x_term: Some(v.x),
                y_term: Some(v.y),
                z_term: Some(v.z),
                s_ren,
                diag_counterterm: ct,
                ..ActionBreakdown::default()
            };
            if let Some(ct) = ct {
                b.s_dd = Some(v.dd);
                b.s_total = Some(v.dd + v.od);
                b.ito_residual = Some(v.dd - (ct + v.x + v.y + v.z));
            }
            Ok(b)
        }
    }
}

/// s_dd − (4NT·φ_ε(0,0) + X + Y + Z).
pub fn ito_residual(path: &Path<'_>, cfg: &ActionConfig) -> Result<f64, Error> {
    check_particles(path, cfg)?;
    if cfg.params.eps == 0.0 {
        return Err(Error::RouteForbidden("the Itô residual needs eps > 0"));
    }
    let ct = diag_counterterm(&cfg.params, &path.grid, &cfg.quad)?;
    let v = sweep(path, cfg, Terms { dd: true, x: true, y: true, z: true, od: false })?;
    Ok(v.dd - (ct + v.x + v.y + v.z))
}

/// Apply `f` to every path of an ensemble, in path order.
pub fn map_paths<T: Send + 'static>(
    ens: &PathEnsemble,
    exec: &dyn Executor,
    f: &(dyn Fn(&Path<'_>) -> Result<T, Error> + Sync),
) -> Result<Vec<T>, Error> {
    exec.map(ens.n_paths(), &|k: usize| f(&ens.path(k))).into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;
    use crate::paths::sample_ensemble;
    use crate::quad;
    use crate::rng::RngSpec;
    use alloc::vec;

    fn constant_path(grid: TimeGrid, points: &[[f64; 3]]) -> Vec<f64> {
        let mut v = Vec::new();
        for _ in 0..=grid.n_steps {
            for p in points {
                v.extend_from_slice(p);
            }
        }
        v
    }

    fn cfg(eps: f64, n: usize) -> ActionConfig {
        ActionConfig::new(ModelParams::massless(eps, 1.0, 1.0, n), Route::Decomposed)
            .with_quad(QuadratureSpec::default().with_rel_tol(1e-10))
    }

    #[test]
    fn constant_path_naive_matches_lag_integral() {
        // B ≡ 0, N = 1: 2∫_0^{2T}(2T − u) W_ε(0, u) du
        let grid = TimeGrid::new(0.5, 64, 0.5).unwrap();
        let data = constant_path(grid, &[[0.0; 3]]);
        let path = Path::new(grid, 1, &data).unwrap();
        let c = cfg(0.5, 1);
        let s = action_naive(&path, &c).unwrap();
        let p = c.params;
        let q = c.quad;
        let (exact, _) =
            quad::integrate(|u| 2.0 * (1.0 - u) * eval_kernels(&p, 0.0, u, &q).unwrap().w, 0.0, 1.0, 8, 1e-10).unwrap();
        // trapezoid error O(Δt²)
        assert!((s - exact).abs() < 1e-3 * exact, "{s} vs {exact}");
    }

    #[test]
    fn split_partitions_naive() {
        let grid = TimeGrid::new(1.0, 32, 0.25).unwrap();
        let ens = sample_ensemble(&grid, &[vec![0.0, 0.0, 0.0, 0.5, 0.0, 0.0]], 2, RngSpec::new(1, 0), &Sequential).unwrap();
        let c = cfg(0.3, 2);
        for k in 0..2 {
            let p = ens.path(k);
            let total = action_naive(&p, &c).unwrap();
            let (dd, od) = action_split(&p, &c).unwrap();
            assert!((dd.unwrap() + od - total).abs() < 1e-12 * total.abs());
        }
    }

    #[test]
    fn full_window_has_no_off_diagonal_part() {
        let grid = TimeGrid::full_window(1.0, 16).unwrap();
        let ens = sample_ensemble(&grid, &[vec![0.0; 3]], 1, RngSpec::new(2, 0), &Sequential).unwrap();
        let (_, od) = action_split(&ens.path(0), &cfg(0.3, 1)).unwrap();
        assert_eq!(od, 0.0);
    }

    #[test]
    fn naive_route_subtracts_counterterm_exactly() {
        let grid = TimeGrid::new(0.5, 16, 0.25).unwrap();
        let ens = sample_ensemble(&grid, &[vec![0.0; 3]], 1, RngSpec::new(3, 0), &Sequential).unwrap();
        let mut c = cfg(0.1, 1);
        c.route = Route::Naive;
        let b = action_renormalized(&ens.path(0), &c).unwrap();
        assert_eq!(b.s_total.unwrap() - b.s_ren, b.diag_counterterm.unwrap());
    }

    #[test]
    fn naive_route_forbidden_without_regulator() {
        let grid = TimeGrid::new(0.5, 8, 0.25).unwrap();
        let data = constant_path(grid, &[[0.0; 3]]);
        let path = Path::new(grid, 1, &data).unwrap();
        let mut c = cfg(0.0, 1);
        c.route = Route::Naive;
        assert!(matches!(action_renormalized(&path, &c), Err(Error::RouteForbidden(_))));
        assert!(matches!(ito_residual(&path, &cfg(0.0, 1)), Err(Error::RouteForbidden(_))));
    }

    #[test]
    fn constant_path_terms() {
        let grid = TimeGrid::new(0.5, 16, 0.25).unwrap();
        let data = constant_path(grid, &[[0.0; 3], [0.7, 0.0, 0.0]]);
        let path = Path::new(grid, 2, &data).unwrap();
        let c = cfg(0.2, 2);
        assert_eq!(term_y(&path, &c).unwrap(), 0.0);
        let x = term_x(&path, &c).unwrap();
        let phi = eval_phi(&c.params, 0.7, 0.0, &c.quad).unwrap().value;
        // 2 · (2 ordered pairs) · 2T · φ_ε(d, 0)
        assert!((x - 2.0 * 2.0 * 1.0 * phi).abs() < 1e-12 * x.abs());
    }

    #[test]
    fn single_particle_has_no_x_term() {
        let grid = TimeGrid::new(0.5, 8, 0.25).unwrap();
        let ens = sample_ensemble(&grid, &[vec![0.0; 3]], 1, RngSpec::new(4, 0), &Sequential).unwrap();
        assert_eq!(term_x(&ens.path(0), &cfg(0.2, 1)).unwrap(), 0.0);
    }
}
