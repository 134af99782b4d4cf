//! Itô decomposition on a path that never moves.
//!
//! With no increments Y vanishes and there is no quadratic variation, so the
//! fundamental theorem of calculus applied to W = −(∂_t + ½Δ)φ gives
//!
//!   s_dd − (counterterm + X + Z) = −2 Σ_{i,j} ∫ ds ∫_s^{[s+τ]_T} ½Δφ(x_i − x_j, t − s) dt.
//!
//! The right side is computed here by Gauss–Legendre in time and a central
//! difference Laplacian, sharing nothing with the action sweep.

use std::sync::Arc;

use nelson_core::action::{ito_residual, sweep, ActionConfig, Route, Terms};
use nelson_core::exec::Sequential;
use nelson_core::kernels::{eval_phi, KernelTable, ModelParams, QuadratureSpec, TableSpec};
use nelson_core::paths::{Path, TimeGrid};
use nelson_core::quad::gauss_legendre;

const LAP_STEP: f64 = 1e-3;

fn laplacian(p: &ModelParams, q: &QuadratureSpec, d: [f64; 3], u: f64) -> f64 {
    let phi = |x: [f64; 3]| eval_phi(p, (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt(), u, q).unwrap().value;
    let c = phi(d);
    let h = LAP_STEP;
    (0..3)
        .map(|k| {
            let (mut a, mut b) = (d, d);
            a[k] += h;
            b[k] -= h;
            (phi(a) - 2.0 * c + phi(b)) / (h * h)
        })
        .sum()
}

/// ∫_0^L ½Δφ(d, u) du for L ∈ [0, τ], by composite Gauss–Legendre.
fn lag_integral(p: &ModelParams, q: &QuadratureSpec, d: [f64; 3], len: f64) -> f64 {
    if len == 0.0 {
        return 0.0;
    }
    let (x, w) = gauss_legendre(20);
    let panels = 8;
    let step = len / panels as f64;
    let mut s = 0.0;
    for k in 0..panels {
        let a = k as f64 * step;
        for (xi, wi) in x.iter().zip(&w) {
            s += 0.5 * step * wi * 0.5 * laplacian(p, q, d, a + 0.5 * step * (xi + 1.0));
        }
    }
    s
}

#[test]
fn constant_path_residual_is_the_laplacian_term() {
    let (t_h, tau) = (0.5, 0.25);
    let grid = TimeGrid::new(t_h, 1 << 10, tau).unwrap();
    let points = [[0.0, 0.0, 0.0], [0.7, 0.2, 0.0]];
    let mut data = Vec::new();
    for _ in 0..=grid.n_steps {
        for pt in &points {
            data.extend_from_slice(pt);
        }
    }
    let path = Path::new(grid, 2, &data).unwrap();
    let params = ModelParams::massless(0.2, 1.0, 1.0, 2);
    let table = KernelTable::build(&params, &QuadratureSpec::default(), TableSpec::for_params(&params, 2.0, tau), &Sequential).unwrap();
    let cfg = ActionConfig::new(params, Route::Decomposed).with_table(Arc::new(table));
    let residual = ito_residual(&path, &cfg).unwrap();
    let s_dd = sweep(&path, &cfg, Terms { dd: true, ..Terms::default() }).unwrap().dd;

    // the inner length min(τ, T − s) is piecewise linear in s: split at T − τ
    let q = QuadratureSpec::default().with_rel_tol(1e-13);
    let (gx, gw) = gauss_legendre(16);
    let mut expected = 0.0;
    for a in &points {
        for b in &points {
            let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
            let full = lag_integral(&params, &q, d, tau);
            // s ∈ [−T, T − τ]: full window
            let mut pair = (2.0 * t_h - tau) * full;
            // s ∈ [T − τ, T]: window shrinks to T − s
            for (xi, wi) in gx.iter().zip(&gw) {
                let len = 0.5 * tau * (1.0 - xi);
                pair += 0.5 * tau * wi * lag_integral(&params, &q, d, len);
            }
            expected -= 2.0 * pair;
        }
    }
    // Z skips its i = j node at s = T, where it would sample φ_ε(0,0); the
    // counterterm has no such node, which leaves −N·Δt·φ_ε(0,0) behind
    let phi00 = eval_phi(&params, 0.0, 0.0, &QuadratureSpec::default()).unwrap().value;
    let self_node = -(params.n_particles as f64) * grid.dt() * phi00;
    let err = (residual - expected - self_node).abs() / s_dd.abs();
    assert!(err < 1e-4, "residual {residual} vs {expected} + {self_node}, relative to s_dd {s_dd}: {err:e}");
    // and the residual is not trivially zero
    assert!(expected.abs() > 1e-3 * s_dd.abs());
}
