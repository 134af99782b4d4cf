//! One-dimensional quadrature: Gauss–Kronrod panels with bisection,
//! Euler-accelerated alternating tails, and Gauss–Legendre node tables.
//!
//! Integrands are vector valued (`[f64; K]`) so several kernels that share
//! the same expensive factors can be integrated in one sweep.

use alloc::vec::Vec;
use libm::{cos, fabs, pow};

use crate::error::Error;

// 21-point Kronrod abscissae on [-1, 1]; odd indices are the 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const EPMACH: f64 = f64::EPSILON;

/// Result of one Gauss–Kronrod panel.
#[derive(Clone, Copy, Debug)]
pub struct Panel<const K: usize> {
    pub a: f64,
    pub b: f64,
    pub value: [f64; K],
    pub error: [f64; K],
    pub abs: [f64; K],
}

impl<const K: usize> Panel<K> {
    fn worst(&self) -> f64 {
        self.error.iter().fold(0.0, |m, &e| if e > m { e } else { m })
    }
}

/// 21-point Kronrod rule with the embedded 10-point Gauss error estimate
/// (QUADPACK `qk21` error heuristic applied per component).
pub fn gk21<const K: usize, F: FnMut(f64) -> [f64; K]>(f: &mut F, a: f64, b: f64) -> Panel<K> {
    let centr = 0.5 * (a + b);
    let hlgth = 0.5 * (b - a);
    let dhlgth = fabs(hlgth);

    let mut fv = [[0.0; K]; 21];
    fv[20] = f(centr);
    for j in 0..10 {
        let dx = hlgth * XGK[j];
        fv[2 * j] = f(centr - dx);
        fv[2 * j + 1] = f(centr + dx);
    }

    let mut value = [0.0; K];
    let mut error = [0.0; K];
    let mut abs = [0.0; K];
    for c in 0..K {
        let fc = fv[20][c];
        let mut resk = WGK[10] * fc;
        let mut resg = 0.0;
        let mut resabs = fabs(resk);
        for j in 0..10 {
            let (f1, f2) = (fv[2 * j][c], fv[2 * j + 1][c]);
            resk += WGK[j] * (f1 + f2);
            resabs += WGK[j] * (fabs(f1) + fabs(f2));
            if j % 2 == 1 {
                resg += WG[j / 2] * (f1 + f2);
            }
        }
        let reskh = 0.5 * resk;
        let mut resasc = WGK[10] * fabs(fc - reskh);
        for j in 0..10 {
            resasc += WGK[j] * (fabs(fv[2 * j][c] - reskh) + fabs(fv[2 * j + 1][c] - reskh));
        }
        let result = resk * hlgth;
        resabs *= dhlgth;
        resasc *= dhlgth;
        let mut abserr = fabs((resk - resg) * hlgth);
        if resasc != 0.0 && abserr != 0.0 {
            let r = pow(200.0 * abserr / resasc, 1.5);
            abserr = resasc * if r < 1.0 { r } else { 1.0 };
        }
        if resabs > f64::MIN_POSITIVE / (50.0 * EPMACH) {
            let floor = EPMACH * 50.0 * resabs;
            if floor > abserr {
                abserr = floor;
            }
        }
        value[c] = result;
        error[c] = abserr;
        abs[c] = resabs;
    }
    Panel { a, b, value, error, abs }
}

/// Sum of a set of panels, with error bars and the integral of |f|.
#[derive(Clone, Copy, Debug)]
pub struct Integral<const K: usize> {
    pub value: [f64; K],
    pub error: [f64; K],
    pub abs: [f64; K],
    /// Right end of the last panel actually evaluated.
    pub reach: f64,
}

impl<const K: usize> Integral<K> {
    pub fn zero(reach: f64) -> Self {
        Integral { value: [0.0; K], error: [0.0; K], abs: [0.0; K], reach }
    }

    fn add(&mut self, other: &Integral<K>) {
        for c in 0..K {
            self.value[c] += other.value[c];
            self.error[c] += other.error[c];
            self.abs[c] += other.abs[c];
        }
        if other.reach > self.reach {
            self.reach = other.reach;
        }
    }

    /// True when every component selected by `mask` meets the tolerance.
    pub fn converged(&self, rel_tol: f64, mask: [bool; K]) -> bool {
        (0..K).all(|c| !mask[c] || self.error[c] <= tolerance(rel_tol, self.value[c], self.abs[c]))
    }
}

/// Acceptable absolute error for a component: relative to the value, with a
/// floor tied to the integral of |f| so cancelling integrals can succeed.
pub fn tolerance(rel_tol: f64, value: f64, abs: f64) -> f64 {
    rel_tol * fabs(value) + 1e-13 * abs
}

/// Integrate over the given breakpoints, bisecting the worst panels until
/// the masked components meet `rel_tol` or `max_panels` is exhausted.
pub fn panels_adaptive<const K: usize, F: FnMut(f64) -> [f64; K]>(
    f: &mut F,
    breaks: &[f64],
    rel_tol: f64,
    mask: [bool; K],
    max_panels: usize,
) -> Result<Integral<K>, Error> {
    let mut panels: Vec<Panel<K>> = breaks.windows(2).map(|w| gk21(f, w[0], w[1])).collect();
    let reach = breaks.last().copied().unwrap_or(0.0);
    loop {
        let mut total = Integral::zero(reach);
        for p in &panels {
            for c in 0..K {
                total.value[c] += p.value[c];
                total.error[c] += p.error[c];
                total.abs[c] += p.abs[c];
            }
        }
        if total.converged(rel_tol, mask) {
            return Ok(total);
        }
        if panels.len() >= max_panels {
            return Err(Error::QuadratureFailure { reached: reach, panels: panels.len() });
        }
        // bisect the worst masked panel
        let mut worst = 0;
        let mut worst_err = -1.0;
        for (i, p) in panels.iter().enumerate() {
            let e = (0..K).filter(|&c| mask[c]).fold(0.0, |m: f64, c| m.max(p.error[c]));
            if e > worst_err {
                worst_err = e;
                worst = i;
            }
        }
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a && mid < p.b) || p.worst() == 0.0 {
            return Err(Error::QuadratureFailure { reached: reach, panels: panels.len() });
        }
        panels.push(gk21(f, p.a, mid));
        panels.push(gk21(f, mid, p.b));
    }
}

/// Incremental Euler (van Wijngaarden) transform of a series whose terms
/// alternate in sign with smoothly varying magnitude.
#[derive(Clone, Debug)]
struct EulerSum {
    work: Vec<f64>,
    nterm: usize,
    sum: f64,
}

impl EulerSum {
    fn new() -> Self {
        EulerSum { work: Vec::new(), nterm: 0, sum: 0.0 }
    }

    fn push(&mut self, term: f64) -> f64 {
        if self.nterm == 0 {
            self.work.clear();
            self.work.push(term);
            self.nterm = 1;
            self.sum = 0.5 * term;
            return self.sum;
        }
        let n = self.nterm;
        let mut tmp = self.work[0];
        self.work[0] = term;
        for j in 0..n - 1 {
            let dum = self.work[j + 1];
            self.work[j + 1] = 0.5 * (self.work[j] + tmp);
            tmp = dum;
        }
        let next = 0.5 * (self.work[n - 1] + tmp);
        self.work.push(next);
        if fabs(next) <= fabs(self.work[n - 1]) {
            self.nterm += 1;
            self.sum += 0.5 * self.work[n];
        } else {
            self.sum += next;
            self.work.pop();
        }
        self.sum
    }
}

/// Sum half-period panels `[start + kπ/ω_x, start + (k+1)π/ω_x]` with Euler
/// acceleration until every masked component is stable for three
/// consecutive terms. `stop_at` ends the series early once panels lie
/// beyond the truncation radius.
pub fn alternating_tail<const K: usize, F: FnMut(f64) -> [f64; K]>(
    f: &mut F,
    start: f64,
    half_period: f64,
    stop_at: f64,
    rel_tol: f64,
    abs_floor: [f64; K],
    mask: [bool; K],
    max_terms: usize,
) -> Result<Integral<K>, Error> {
    let mut eul: [EulerSum; K] = core::array::from_fn(|_| EulerSum::new());
    let mut last = [0.0; K];
    let mut stable = 0usize;
    let mut out = Integral::zero(start);
    let mut abs = [0.0; K];
    let mut panel_err = [0.0; K];
    for k in 0..max_terms {
        let a = start + k as f64 * half_period;
        let b = a + half_period;
        let p = gk21(f, a, b);
        let mut est = [0.0; K];
        for c in 0..K {
            est[c] = eul[c].push(p.value[c]);
            abs[c] += p.abs[c];
            panel_err[c] += p.error[c];
        }
        out.reach = b;
        let mut ok = k > 0;
        let mut delta = [0.0; K];
        for c in 0..K {
            delta[c] = fabs(est[c] - last[c]);
            if mask[c] && delta[c] > 0.1 * (tolerance(rel_tol, est[c], p.abs[c]) + abs_floor[c]) {
                ok = false;
            }
        }
        last = est;
        if ok {
            stable += 1;
        } else {
            stable = 0;
        }
        if stable >= 3 || a > stop_at {
            for c in 0..K {
                out.value[c] = est[c];
                out.error[c] = delta[c] + panel_err[c];
                out.abs[c] = abs[c];
            }
            return Ok(out);
        }
    }
    Err(Error::QuadratureFailure { reached: out.reach, panels: max_terms })
}

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = alloc::vec![0.0; n];
    let mut w = alloc::vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = cos(core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if fabs(z - z1) < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Integrate a scalar function on [a, b] with adaptive GK21 starting from
/// `n0` equal panels.
pub fn integrate(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    n0: usize,
    rel_tol: f64,
) -> Result<(f64, f64), Error> {
    let n0 = n0.max(1);
    let breaks: Vec<f64> = (0..=n0).map(|i| a + (b - a) * i as f64 / n0 as f64).collect();
    let mut g = |x: f64| [f(x)];
    let r = panels_adaptive(&mut g, &breaks, rel_tol, [true], 4096 + n0)?;
    Ok((r.value[0], r.error[0]))
}

impl<const K: usize> core::ops::AddAssign<&Integral<K>> for Integral<K> {
    fn add_assign(&mut self, rhs: &Integral<K>) {
        self.add(rhs);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_weights_sum_to_two() {
        let s: f64 = 2.0 * WGK[..10].iter().sum::<f64>() + WGK[10];
        assert!((s - 2.0).abs() < 1e-15, "{s}");
        let g: f64 = 2.0 * WG.iter().sum::<f64>();
        assert!((g - 2.0).abs() < 1e-15, "{g}");
    }

    #[test]
    fn polynomial_exactness() {
        for deg in 0..=31 {
            let mut f = |x: f64| [libm::pow(x, deg as f64)];
            let p = gk21(&mut f, 0.0, 1.0);
            let exact = 1.0 / (deg as f64 + 1.0);
            assert!((p.value[0] - exact).abs() < 1e-14, "deg {deg}: {}", p.value[0]);
        }
        // the embedded Gauss rule is exact up to degree 19, so the error
        // estimate collapses to the rounding floor there
        let mut f = |x: f64| [libm::pow(x, 19.0)];
        assert!(gk21(&mut f, 0.0, 1.0).error[0] < 1e-13);
    }

    #[test]
    fn euler_sums_alternating_harmonic() {
        let mut e = EulerSum::new();
        let mut s = 0.0;
        for k in 0..40 {
            let t = if k % 2 == 0 { 1.0 } else { -1.0 } / (k as f64 + 1.0);
            s = e.push(t);
        }
        assert!((s - core::f64::consts::LN_2).abs() < 1e-12, "{s}");
    }

    #[test]
    fn tail_of_sine_over_r() {
        // ∫_0^∞ sin(r)/r dr = π/2
        let mut f = |r: f64| [if r == 0.0 { 1.0 } else { libm::sin(r) / r }];
        let head = panels_adaptive(&mut f, &[0.0, core::f64::consts::PI], 1e-12, [true], 100).unwrap();
        let tail = alternating_tail(&mut f, core::f64::consts::PI, core::f64::consts::PI, f64::INFINITY, 1e-12, [0.0], [true], 200)
            .unwrap();
        let v = head.value[0] + tail.value[0];
        assert!((v - core::f64::consts::FRAC_PI_2).abs() < 1e-11, "{v}");
    }

    #[test]
    fn legendre_nodes_integrate_polynomials() {
        let (x, w) = gauss_legendre(12);
        for deg in 0..24 {
            let s: f64 = x.iter().zip(&w).map(|(x, w)| w * libm::pow(*x, deg as f64)).sum();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((s - exact).abs() < 1e-14, "deg {deg}");
        }
    }
}
