//! The named experiments. Each returns its CSV tables plus pass/fail checks;
//! writing files and the manifest is left to [`crate::run`].

use std::f64::consts::PI;
use std::sync::Arc;

use nelson_core::action::{action_renormalized, diag_counterterm, sweep, ActionConfig, Route, Terms};
use nelson_core::estimator::{semigroup_element, weak_coupling_compare, SemigroupSpec, WeakCouplingSpec};
use nelson_core::exec::Executor;
use nelson_core::katoclass::{exp_bound_mc, kato_criterion, kato_mc, KatoSpec, RadialPotential};
use nelson_core::kernels::{
    eval_dphi_dr, eval_phi, eval_phi_scaled, eval_w, Dispersion, KernelTable, ModelParams, QuadratureSpec, TableSpec,
};
use nelson_core::paths::{refine, sample_ensemble, PathEnsemble, TimeGrid};
use nelson_core::rng::RngSpec;
use nelson_core::stats::linear_fit;

use crate::config::{section, LabConfig};
use crate::error::{LabError, Result};
use crate::manifest::CheckRecord;
use crate::output::{num, opt, Table};

/// Subcommands that produce data.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    KernelsTable,
    RenormSweep,
    ItoCheck,
    Semigroup,
    YukawaSweep,
    Kato,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::KernelsTable,
        Experiment::RenormSweep,
        Experiment::ItoCheck,
        Experiment::Semigroup,
        Experiment::YukawaSweep,
        Experiment::Kato,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::KernelsTable => "kernels-table",
            Experiment::RenormSweep => "renorm-sweep",
            Experiment::ItoCheck => "ito-check",
            Experiment::Semigroup => "semigroup",
            Experiment::YukawaSweep => "yukawa-sweep",
            Experiment::Kato => "kato",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == s)
    }
}

/// Tables and checks of one experiment.
#[derive(Clone, Debug, Default)]
pub struct ExperimentOutput {
    pub tables: Vec<Table>,
    pub checks: Vec<CheckRecord>,
}

/// Everything an experiment needs besides its own config section.
pub struct Context<'a> {
    pub config: &'a LabConfig,
    pub seed: u64,
    pub exec: &'a dyn Executor,
}

// stream ids keep the experiments' random numbers apart
const STREAM_RENORM: u64 = 1;
const STREAM_ITO: u64 = 2;
const STREAM_SEMIGROUP: u64 = 3;
const STREAM_YUKAWA: u64 = 4;
const STREAM_KATO: u64 = 5;

pub fn run_experiment(which: Experiment, ctx: &Context<'_>) -> Result<ExperimentOutput> {
    match which {
        Experiment::KernelsTable => kernels_table(ctx),
        Experiment::RenormSweep => renorm_sweep(ctx),
        Experiment::ItoCheck => ito_check(ctx),
        Experiment::Semigroup => semigroup(ctx),
        Experiment::YukawaSweep => yukawa_sweep(ctx),
        Experiment::Kato => kato(ctx),
    }
}

fn check(name: &str, pass: bool, detail: String) -> CheckRecord {
    CheckRecord { name: name.to_string(), pass, detail }
}

fn table_for(p: &ModelParams, q: &QuadratureSpec, radius: Option<f64>, t_max: f64, exec: &dyn Executor) -> Result<Option<Arc<KernelTable>>> {
    match radius {
        None => Ok(None),
        Some(r) => Ok(Some(Arc::new(KernelTable::build(p, q, TableSpec::for_params(p, r, t_max), exec)?))),
    }
}

fn action_config(p: ModelParams, q: QuadratureSpec, table: Option<Arc<KernelTable>>) -> ActionConfig {
    let cfg = ActionConfig::new(p, Route::Decomposed).with_quad(q);
    match table {
        Some(t) => cfg.with_table(t),
        None => cfg,
    }
}

/// Particles one unit apart along the first axis.
fn default_start(n: usize) -> Vec<f64> {
    (0..n).flat_map(|i| [i as f64, 0.0, 0.0]).collect()
}

fn kernels_table(ctx: &Context<'_>) -> Result<ExperimentOutput> {
    let sec = section(&ctx.config.kernels_table, "kernels_table")?;
    let base = ctx.config.model.params()?;
    let q = ctx.config.quadrature.spec()?;
    let mut points = Vec::new();
    for &eps in &sec.eps {
        for &x in &sec.x {
            for &t in &sec.t {
                points.push((eps, x, t));
            }
        }
    }
    let rows: Vec<Vec<String>> = ctx.exec.map(points.len(), &|i: usize| {
        let (eps, x, t) = points[i];
        let p = base.with_eps(eps);
        let head = vec![num(eps), num(p.lambda), num(x), num(t)];
        let vals = eval_w(&p, x, t, &q).and_then(|w| {
            let phi = eval_phi(&p, x, t, &q)?;
            let d = eval_dphi_dr(&p, x, t, &q)?;
            Ok((w, phi, d))
        });
        let tail = match vals {
            Ok((w, phi, d)) => vec![
                num(w.value),
                num(phi.value),
                num(d.value.abs()),
                num(w.est_error.max(phi.est_error).max(d.est_error)),
                String::new(),
            ],
            Err(e) => vec![String::new(), String::new(), String::new(), String::new(), e.code().to_string()],
        };
        head.into_iter().chain(tail).collect()
    });
    let mut t = Table::new("kernels_table.csv", &["eps", "lambda", "x_norm", "t", "W", "phi", "grad_phi_norm", "est_error", "error"]);
    for r in rows {
        t.push(r);
    }
    Ok(ExperimentOutput { tables: vec![t], checks: Vec::new() })
}

fn renorm_sweep(ctx: &Context<'_>) -> Result<ExperimentOutput> {
    let sec = section(&ctx.config.renorm_sweep, "renorm_sweep")?;
    let base = ctx.config.model.params()?;
    let q = ctx.config.quadrature.spec()?;
    let grid = ctx.config.grid()?;
    let start = sec.start.clone().unwrap_or_else(|| default_start(base.n_particles));
    let ens = sample_ensemble(&grid, &[start], sec.n_paths, RngSpec::new(ctx.seed, STREAM_RENORM), ctx.exec)?;
    let mut paths = Table::new(
        "renorm_paths.csv",
        &["eps", "path", "s_total", "s_dd", "s_od", "x_term", "y_term", "z_term", "s_ren", "diag_counterterm", "ito_residual"],
    );
    let mut s_ren_by_eps: Vec<Vec<f64>> = Vec::new();
    let mut mean_total: Vec<(f64, f64)> = Vec::new();
    for &eps in &sec.eps {
        let p = base.with_eps(eps);
        let cfg = action_config(p, q, table_for(&p, &q, sec.table_radius, 2.0 * grid.t_horizon, ctx.exec)?);
        let rows = ens_map(&ens, ctx.exec, &|path| action_renormalized(path, &cfg))?;
        let mut ren = Vec::with_capacity(rows.len());
        let mut tot = 0.0;
        for (k, b) in rows.iter().enumerate() {
            paths.push(vec![
                num(eps),
                k.to_string(),
                opt(b.s_total),
                opt(b.s_dd),
                opt(b.s_od),
                opt(b.x_term),
                opt(b.y_term),
                opt(b.z_term),
                num(b.s_ren),
                opt(b.diag_counterterm),
                opt(b.ito_residual),
            ]);
            ren.push(b.s_ren);
            tot += b.s_total.unwrap_or(f64::NAN);
        }
        if eps > 0.0 {
            mean_total.push((eps, tot / rows.len() as f64));
        }
        s_ren_by_eps.push(ren);
    }
    let mut summary = Table::new("renorm_summary.csv", &["quantity", "eps_a", "eps_b", "value"]);
    if mean_total.len() >= 2 {
        let xs: Vec<f64> = mean_total.iter().map(|(e, _)| (1.0 / e).ln()).collect();
        let ys: Vec<f64> = mean_total.iter().map(|(_, s)| *s).collect();
        let (slope, _) = linear_fit(&xs, &ys);
        let phis: Vec<f64> =
            mean_total.iter().map(|(e, _)| eval_phi(&base.with_eps(*e), 0.0, 0.0, &q).map(|v| v.value)).collect::<std::result::Result<_, _>>()?;
        let (phi_slope, _) = linear_fit(&xs, &phis);
        let four_nt = 4.0 * base.n_particles as f64 * grid.t_horizon;
        let (lo, hi) = (mean_total[0].0, mean_total[mean_total.len() - 1].0);
        summary.push(vec!["s_total_slope".into(), num(lo), num(hi), num(slope)]);
        summary.push(vec!["four_nt_times_phi00_slope".into(), num(lo), num(hi), num(four_nt * phi_slope)]);
        summary.push(vec!["four_nt_times_c_log".into(), num(lo), num(hi), num(four_nt * 2.0 * PI)]);
    }
    for k in 1..sec.eps.len() {
        let (a, b) = (&s_ren_by_eps[k - 1], &s_ren_by_eps[k]);
        let rms = (a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64).sqrt();
        summary.push(vec!["s_ren_cauchy_gap_rms".into(), num(sec.eps[k - 1]), num(sec.eps[k]), num(rms)]);
    }
    Ok(ExperimentOutput { tables: vec![paths, summary], checks: Vec::new() })
}

fn ens_map<T: Send + 'static>(
    ens: &PathEnsemble,
    exec: &dyn Executor,
    f: &(dyn Fn(&nelson_core::paths::Path<'_>) -> std::result::Result<T, nelson_core::Error> + Sync),
) -> Result<Vec<T>> {
    Ok(nelson_core::action::map_paths(ens, exec, f)?)
}

/// RMS Itô residual and RMS diagonal action over an ensemble.
pub fn ito_rms(ens: &PathEnsemble, cfg: &ActionConfig, exec: &dyn Executor) -> Result<(f64, f64)> {
    let ct = diag_counterterm(&cfg.params, ens.grid(), &cfg.quad)?;
    let v = ens_map(ens, exec, &|path| {
        let v = sweep(path, cfg, Terms { dd: true, od: false, x: true, y: true, z: true })?;
        Ok((v.dd - (ct + v.x + v.y + v.z), v.dd))
    })?;
    let n = v.len() as f64;
    let rr = (v.iter().map(|(r, _)| r * r).sum::<f64>() / n).sqrt();
    let dd = (v.iter().map(|(_, d)| d * d).sum::<f64>() / n).sqrt();
    Ok((rr, dd))
}

fn ito_check(ctx: &Context<'_>) -> Result<ExperimentOutput> {
    let sec = section(&ctx.config.ito_check, "ito_check")?;
    let p = ctx.config.model.params()?;
    let q = ctx.config.quadrature.spec()?;
    let g = ctx.config.grid()?;
    if p.eps == 0.0 {
        return Err(nelson_core::Error::RouteForbidden("the Itô residual needs eps > 0").into());
    }
    if sec.min_level > sec.max_level || !(sec.min_level..=sec.max_level).contains(&sec.report_level) {
        return Err(LabError::Config("need min_level <= report_level <= max_level".into()));
    }
    let grid = TimeGrid::new(g.t_horizon, 1usize << sec.min_level, g.tau)?;
    let cfg = action_config(p, q, table_for(&p, &q, sec.table_radius, grid.tau, ctx.exec)?);
    let start = sec.start.clone().unwrap_or_else(|| default_start(p.n_particles));
    let rng = RngSpec::new(ctx.seed, STREAM_ITO);
    let mut ens = sample_ensemble(&grid, &[start], sec.n_paths, rng, ctx.exec)?;
    let mut t = Table::new("ito_check.csv", &["level", "n_steps", "dt", "rms_residual", "rms_s_dd", "ratio"]);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    let mut report_ratio = f64::NAN;
    for level in sec.min_level..=sec.max_level {
        let (rr, dd) = ito_rms(&ens, &cfg, ctx.exec)?;
        let dt = ens.grid().dt();
        t.push(vec![level.to_string(), ens.grid().n_steps.to_string(), num(dt), num(rr), num(dd), num(rr / dd)]);
        xs.push(dt.ln());
        ys.push(rr.ln());
        if level == sec.report_level {
            report_ratio = rr / dd;
        }
        if level < sec.max_level {
            ens = refine(&ens, rng.substream(level as u64), ctx.exec)?;
        }
    }
    let (slope, _) = if xs.len() >= 2 { linear_fit(&xs, &ys) } else { (f64::NAN, 0.0) };
    let mut summary = Table::new("ito_summary.csv", &["quantity", "value"]);
    summary.push(vec!["loglog_slope".into(), num(slope)]);
    summary.push(vec!["report_ratio".into(), num(report_ratio)]);
    let checks = vec![
        check("ito_slope", slope >= sec.slope_min && slope <= sec.slope_max, format!("slope {slope} in [{}, {}]", sec.slope_min, sec.slope_max)),
        check("ito_ratio", report_ratio < sec.ratio_max, format!("ratio {report_ratio} < {}", sec.ratio_max)),
    ];
    Ok(ExperimentOutput { tables: vec![t, summary], checks })
}

fn semigroup(ctx: &Context<'_>) -> Result<ExperimentOutput> {
    let sec = section(&ctx.config.semigroup, "semigroup")?;
    let base = ctx.config.model.params()?;
    let q = ctx.config.quadrature.spec()?;
    let g = ctx.config.grid()?;
    let f = sec.f.function();
    let h = sec.h.as_ref().map(|s| s.function()).unwrap_or_else(|| f.clone());
    let eps_list = sec.eps.clone().unwrap_or_else(|| vec![base.eps]);
    let horizons = sec.t_horizons.clone().unwrap_or_else(|| vec![g.t_horizon]);
    let dt = g.dt();
    let mut grids = Vec::new();
    for &t_h in &horizons {
        let m = (2.0 * t_h / dt).round() as usize;
        let tau = if g.tau >= 2.0 * g.t_horizon { 2.0 * t_h } else { g.tau.min(2.0 * t_h) };
        grids.push(TimeGrid::new(t_h, m, tau)?);
    }
    let t_max = grids.iter().map(|gr| 2.0 * gr.t_horizon).fold(0.0, f64::max);
    let mut t = Table::new(
        "semigroup.csv",
        &["eps", "t_horizon", "n_steps", "renormalized", "mean", "std_error", "n_samples", "log_mean", "energy_proxy", "energy_proxy_se", "seed", "stream"],
    );
    for &eps in &eps_list {
        let p = base.with_eps(eps);
        let cfg = action_config(p, q, table_for(&p, &q, sec.table_radius, t_max, ctx.exec)?);
        let mut spec = SemigroupSpec::new(cfg, sec.potential.potential());
        spec.renormalize = sec.renormalize || eps == 0.0;
        spec.xi = sec.xi.as_ref().map(|x| x.spec());
        for (i, grid) in grids.iter().enumerate() {
            // the same paths for every ε
            let rng = RngSpec::new(ctx.seed, STREAM_SEMIGROUP).substream(i as u64);
            let est = semigroup_element(&f, &h, &spec, grid, sec.n_paths, rng, ctx.exec)?;
            let (proxy, proxy_se) = if f == h && est.mean > 0.0 {
                let two_t = 2.0 * grid.t_horizon;
                (Some(-est.mean.ln() / two_t), Some(est.std_error / (est.mean * two_t)))
            } else {
                (None, None)
            };
            t.push(vec![
                num(eps),
                num(grid.t_horizon),
                grid.n_steps.to_string(),
                spec.renormalize.to_string(),
                num(est.mean),
                num(est.std_error),
                est.n_samples.to_string(),
                if est.mean > 0.0 { num(est.mean.ln()) } else { String::new() },
                opt(proxy),
                opt(proxy_se),
                rng.seed.to_string(),
                rng.stream_id.to_string(),
            ]);
        }
    }
    Ok(ExperimentOutput { tables: vec![t], checks: Vec::new() })
}

/// The screened-Coulomb constant of the κ → ∞ limit of φ_0(x, 0, κ), per
/// unit g and (2π)^{-3} normalization: φ → C_Y e^{−ν|x|}/|x|.
pub const C_YUKAWA: f64 = 1.0 / (8.0 * PI);

fn yukawa_sweep(ctx: &Context<'_>) -> Result<ExperimentOutput> {
    let sec = section(&ctx.config.yukawa_sweep, "yukawa_sweep")?;
    let p = ctx.config.model.params()?;
    let q = ctx.config.quadrature.spec()?;
    let grid = ctx.config.grid()?;
    if p.dispersion != Dispersion::Massive || p.eps != 0.0 {
        return Err(LabError::Config("yukawa_sweep needs a massive model with eps = 0".into()));
    }
    let f = sec.f.function();
    let h = sec.h.as_ref().map(|s| s.function()).unwrap_or_else(|| f.clone());
    let spec = WeakCouplingSpec { params: p, kappas: sec.kappas.clone(), quad: q, table_radius: sec.table_radius };
    let rows = weak_coupling_compare(&f, &h, &spec, &grid, sec.n_paths, RngSpec::new(ctx.seed, STREAM_YUKAWA), ctx.exec)?;
    let mut t = Table::new(
        "yukawa_sweep.csv",
        &["kappa", "lambda", "scaled", "scaled_se", "reference", "reference_se", "gap", "gap_se"],
    );
    for r in &rows {
        t.push(vec![
            num(r.kappa),
            num(p.lambda),
            num(r.scaled.mean),
            num(r.scaled.std_error),
            num(r.reference.mean),
            num(r.reference.std_error),
            num(r.gap),
            num(r.gap_se),
        ]);
    }
    let mut k = Table::new("yukawa_kernel.csv", &["kappa", "x_norm", "phi", "phi_x_exp_nu_x", "c_y_derived", "c_y_stated"]);
    for &kappa in &sec.kappas {
        for &x in &sec.x_check {
            let phi = eval_phi_scaled(&p.with_kappa(kappa), x, 0.0, &q)?.value;
            k.push(vec![
                num(kappa),
                num(x),
                num(phi),
                num(phi * x * (p.nu * x).exp()),
                num(C_YUKAWA),
                num(1.0 / (4.0 * PI)),
            ]);
        }
    }
    Ok(ExperimentOutput { tables: vec![t, k], checks: Vec::new() })
}

fn potential_label(v: &RadialPotential) -> String {
    match v {
        RadialPotential::Power { exponent, .. } => format!("power:{exponent}"),
        RadialPotential::Bounded { bound } => format!("bounded:{bound}"),
    }
}

fn kato(ctx: &Context<'_>) -> Result<ExperimentOutput> {
    let sec = section(&ctx.config.kato, "kato")?;
    let mut crit = Table::new("kato_criterion.csv", &["potential", "dim", "r", "diagnostic", "slope", "verdict"]);
    let mut mc = Table::new("kato_mc.csv", &["potential", "t", "value", "std_error"]);
    let mut expb = Table::new("kato_exp.csv", &["potential", "beta", "tau", "value", "std_error"]);
    let rng = RngSpec::new(ctx.seed, STREAM_KATO);
    for (i, v) in sec.potentials().iter().enumerate() {
        let spec = KatoSpec::new(*v, sec.dim);
        let label = potential_label(v);
        let verdict = kato_criterion(&spec)?;
        for (r, d) in &verdict.curve {
            crit.push(vec![
                label.clone(),
                sec.dim.to_string(),
                num(*r),
                num(*d),
                num(verdict.slope),
                if verdict.pass { "pass" } else { "fail" }.to_string(),
            ]);
        }
        let curve = kato_mc(&spec, &sec.t_list, sec.n_paths, sec.n_starts, rng.substream(2 * i as u64), ctx.exec)?;
        for (t, m, se) in &curve.points {
            mc.push(vec![label.clone(), num(*t), num(*m), num(*se)]);
        }
        if verdict.pass && !sec.betas.is_empty() && !sec.taus.is_empty() {
            let rows = exp_bound_mc(&spec, &sec.betas, &sec.taus, sec.n_paths, sec.n_starts, rng.substream(2 * i as u64 + 1), ctx.exec)?;
            for e in rows {
                expb.push(vec![label.clone(), num(e.beta), num(e.tau), num(e.value), num(e.std_error)]);
            }
        }
    }
    // verdicts are data here, not checks: a fail verdict is a valid result
    Ok(ExperimentOutput { tables: vec![crit, mc, expb], checks: Vec::new() })
}
