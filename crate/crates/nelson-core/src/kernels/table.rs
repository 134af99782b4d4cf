//! Interpolation tables for the pair kernels.
//!
//! Nodes are uniform in u = ln(r + a_r) + r/ℓ_r and v = ln(t + a_t) + t/ℓ_t.
//! The logarithm resolves the near-diagonal structure (scale √ε in r, ε in t,
//! or the logarithmic singularity at ε = 0) with a fixed relative step; the
//! linear term caps the absolute spacing far from the diagonal. Values are cubic
//! Lagrange interpolants; points outside the table, and the singular corner
//! at ε = 0, fall back to direct quadrature.

use alloc::vec::Vec;
use libm::{exp, log};

use super::params::{ModelParams, QuadratureSpec};
use super::radial::{eval_kernels, KernelTriple};
use crate::error::Error;
use crate::exec::Executor;

/// Extent and resolution of a kernel table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TableSpec {
    pub r_max: f64,
    pub t_max: f64,
    pub r_offset: f64,
    pub t_offset: f64,
    /// Linear scales ℓ_r, ℓ_t of the node coordinates.
    pub r_scale: f64,
    pub t_scale: f64,
    /// Node spacing in the mapped coordinates.
    pub step: f64,
    /// At ε = 0, points with r < corner·r_offset and t < corner·t_offset
    /// are evaluated directly.
    pub corner: f64,
    /// Which of (W, φ, ∂φ/∂r) to tabulate.
    pub channels: [bool; 3],
}

impl TableSpec {
    /// Offsets scaled to the regulator so that the smallest structure of the
    /// kernel spans many nodes.
    pub fn for_params(p: &ModelParams, r_max: f64, t_max: f64) -> Self {
        let k2 = p.kappa * p.kappa;
        let mut a_r: f64 = 1e-3;
        let mut a_t: f64 = 1e-3 / k2;
        if p.eps > 0.0 {
            a_r = a_r.min(0.05 * libm::sqrt(p.eps));
            a_t = a_t.min(0.05 * p.eps);
        }
        TableSpec {
            r_max,
            t_max,
            r_offset: a_r,
            t_offset: a_t,
            r_scale: 0.5,
            t_scale: 0.25,
            step: 0.06,
            corner: 30.0,
            channels: [true, true, true],
        }
    }

    pub fn with_channels(mut self, channels: [bool; 3]) -> Self {
        self.channels = channels;
        self
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }
}

/// Tabulated W_ε, φ_ε and ∂φ_ε/∂r over [0, r_max] × [0, t_max].
#[derive(Clone, Debug)]
pub struct KernelTable {
    params: ModelParams,
    quad: QuadratureSpec,
    spec: TableSpec,
    nu: usize,
    nv: usize,
    u0: f64,
    v0: f64,
    data: Vec<[f64; 3]>,
}

/// Node coordinate ln(x + a) + x/ℓ.
#[inline]
fn coord(x: f64, a: f64, l: f64) -> f64 {
    log(x + a) + x / l
}

/// Inverse of [`coord`] by bisection (build time only).
fn coord_inv(u: f64, a: f64, l: f64) -> f64 {
    let mut lo = 0.0;
    let mut hi = (exp(u) - a).max(0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if coord(mid, a, l) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Cubic Lagrange stencil: first node index and four weights.
#[inline]
fn stencil(pos: f64, n: usize) -> (usize, [f64; 4]) {
    let i = (pos as usize).saturating_sub(1).min(n - 4);
    let p = pos - i as f64;
    let (a, b, c, d) = (p, p - 1.0, p - 2.0, p - 3.0);
    (i, [-b * c * d / 6.0, a * c * d / 2.0, -a * b * d / 2.0, a * b * c / 6.0])
}

impl KernelTable {
    pub fn build(params: &ModelParams, quad: &QuadratureSpec, spec: TableSpec, exec: &dyn Executor) -> Result<Self, Error> {
        params.validate_phi()?;
        if !(spec.step > 0.0 && spec.r_offset > 0.0 && spec.t_offset > 0.0) {
            return Err(Error::InvalidParams("table offsets and step must be > 0"));
        }
        if !(spec.r_scale > 0.0 && spec.t_scale > 0.0) {
            return Err(Error::InvalidParams("table scales must be > 0"));
        }
        let u0 = log(spec.r_offset);
        let v0 = log(spec.t_offset);
        let nu = (((coord(spec.r_max, spec.r_offset, spec.r_scale) - u0) / spec.step) as usize + 2).max(4);
        let nv = (((coord(spec.t_max, spec.t_offset, spec.t_scale) - v0) / spec.step) as usize + 2).max(4);
        let r_nodes: Vec<f64> =
            (0..nu).map(|i| coord_inv(u0 + i as f64 * spec.step, spec.r_offset, spec.r_scale)).collect();
        let p = *params;
        let q = *quad;
        let rows: Vec<Result<Vec<[f64; 3]>, Error>> = exec.map(nv, &|iv: usize| {
            let t = coord_inv(v0 + iv as f64 * spec.step, spec.t_offset, spec.t_scale);
            let mut row = Vec::with_capacity(nu);
            for &r in &r_nodes {
                let v = match eval_kernels(&p, r, t, &q) {
                    Ok(k) => [k.w, k.phi, k.dphi_dr],
                    Err(Error::SingularPoint) => [f64::NAN; 3],
                    Err(e) => return Err(e),
                };
                row.push(v);
            }
            Ok(row)
        });
        let mut data = Vec::with_capacity(nu * nv);
        for row in rows {
            data.extend(row?);
        }
        Ok(KernelTable { params: p, quad: q, spec, nu, nv, u0, v0, data })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn spec(&self) -> &TableSpec {
        &self.spec
    }

    pub fn node_count(&self) -> usize {
        self.nu * self.nv
    }

    fn in_corner(&self, r: f64, t: f64) -> bool {
        self.params.eps == 0.0 && r < self.spec.corner * self.spec.r_offset && t < self.spec.corner * self.spec.t_offset
    }

    fn direct(&self, r: f64, t: f64) -> Result<KernelTriple, Error> {
        eval_kernels(&self.params, r, t, &self.quad)
    }

    /// Kernels at (r, t); interpolated inside the table, direct outside.
    pub fn eval(&self, r: f64, t: f64) -> Result<KernelTriple, Error> {
        let t = t.abs();
        if r > self.spec.r_max || t > self.spec.t_max || self.in_corner(r, t) {
            return self.direct(r, t);
        }
        let (iu, wu) = stencil((coord(r, self.spec.r_offset, self.spec.r_scale) - self.u0) / self.spec.step, self.nu);
        let (iv, wv) = stencil((coord(t, self.spec.t_offset, self.spec.t_scale) - self.v0) / self.spec.step, self.nv);
        let mut out = [0.0; 3];
        for (a, wa) in wv.iter().enumerate() {
            let row = &self.data[(iv + a) * self.nu + iu..];
            for (b, wb) in wu.iter().enumerate() {
                let w = wa * wb;
                let v = &row[b];
                out[0] += w * v[0];
                out[1] += w * v[1];
                out[2] += w * v[2];
            }
        }
        Ok(KernelTriple { w: out[0], phi: out[1], dphi_dr: out[2] })
    }

    /// One-dimensional slice at fixed lag t, interpolated in t once.
    pub fn slice(&self, t: f64) -> LagSlice<'_> {
        let t = t.abs();
        if t > self.spec.t_max {
            return LagSlice { table: self, t, data: Vec::new(), corner: false, direct_only: true };
        }
        let (iv, wv) = stencil((coord(t, self.spec.t_offset, self.spec.t_scale) - self.v0) / self.spec.step, self.nv);
        let mut data = alloc::vec![[0.0; 3]; self.nu];
        for (a, wa) in wv.iter().enumerate() {
            let row = &self.data[(iv + a) * self.nu..(iv + a + 1) * self.nu];
            for (d, v) in data.iter_mut().zip(row) {
                // skip the undefined singular node; its weight only matters
                // inside the direct-evaluation corner
                if v[0].is_nan() || v[1].is_nan() {
                    continue;
                }
                d[0] += wa * v[0];
                d[1] += wa * v[1];
                d[2] += wa * v[2];
            }
        }
        let corner = self.params.eps == 0.0 && t < self.spec.corner * self.spec.t_offset;
        LagSlice { table: self, t, data, corner, direct_only: false }
    }
}

/// Kernel values at one fixed lag, as a function of distance only.
#[derive(Clone, Debug)]
pub struct LagSlice<'a> {
    table: &'a KernelTable,
    t: f64,
    data: Vec<[f64; 3]>,
    corner: bool,
    direct_only: bool,
}

impl LagSlice<'_> {
    pub fn lag(&self) -> f64 {
        self.t
    }

    #[inline]
    pub fn eval(&self, r: f64) -> Result<KernelTriple, Error> {
        let spec = &self.table.spec;
        if self.direct_only || r > spec.r_max || (self.corner && r < spec.corner * spec.r_offset) {
            return self.table.direct(r, self.t);
        }
        let (iu, wu) = stencil((coord(r, spec.r_offset, spec.r_scale) - self.table.u0) / spec.step, self.table.nu);
        let d = &self.data[iu..iu + 4];
        Ok(KernelTriple {
            w: wu[0] * d[0][0] + wu[1] * d[1][0] + wu[2] * d[2][0] + wu[3] * d[3][0],
            phi: wu[0] * d[0][1] + wu[1] * d[1][1] + wu[2] * d[2][1] + wu[3] * d[3][1],
            dphi_dr: wu[0] * d[0][2] + wu[1] * d[1][2] + wu[2] * d[2][2] + wu[3] * d[3][2],
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;

    #[test]
    fn stencil_reproduces_cubics() {
        for &pos in &[0.0, 0.3, 1.0, 2.7, 5.5, 8.99] {
            let (i, w) = stencil(pos, 10);
            let s: f64 = (0..4).map(|k| w[k] * libm::pow((i + k) as f64, 3.0)).sum();
            assert!((s - pos * pos * pos).abs() < 1e-9, "{pos}");
        }
    }

    #[test]
    fn table_matches_direct_quadrature() {
        let p = ModelParams::massless(0.1, 1.0, 1.0, 2);
        let q = QuadratureSpec::default();
        let spec = TableSpec::for_params(&p, 4.0, 0.6);
        let tab = KernelTable::build(&p, &q, spec, &Sequential).unwrap();
        let mut worst: f64 = 0.0;
        for &(r, t) in &[(0.0, 0.0), (0.013, 0.002), (0.2, 0.05), (0.77, 0.31), (2.2, 0.011), (3.9, 0.58)] {
            let a = tab.eval(r, t).unwrap();
            let b = eval_kernels(&p, r, t, &q).unwrap();
            for (x, y) in [(a.w, b.w), (a.phi, b.phi)] {
                worst = worst.max((x - y).abs() / y.abs().max(1e-2));
            }
            worst = worst.max((a.dphi_dr - b.dphi_dr).abs() / b.dphi_dr.abs().max(1e-1));
            let s = tab.slice(t).eval(r).unwrap();
            assert!((s.phi - a.phi).abs() < 1e-12 * a.phi.abs().max(1.0));
        }
        assert!(worst < 1e-5, "worst relative interpolation error {worst}");
    }
}
