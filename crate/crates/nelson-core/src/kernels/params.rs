use libm::sqrt;

use crate::error::Error;

/// Boson dispersion relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dispersion {
    /// ω(k) = |k|
    Massless,
    /// ω(k) = √(|k|² + ν²)
    Massive,
}

/// Normalization of the momentum integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FourierNorm {
    /// Bare ∫ dk.
    None,
    /// (2π)^{-3} ∫ dk, used by the weak-coupling scaling.
    InverseCube,
}

/// Physical and cutoff constants of the model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    /// UV regulator ε ≥ 0; the charge distribution is e^{-ε|k|²/2}.
    pub eps: f64,
    /// IR cutoff Λ: momenta with |k| < Λ are removed.
    pub lambda: f64,
    /// Coupling constant g.
    pub g: f64,
    pub n_particles: usize,
    /// Boson mass ν (massive dispersion only).
    pub nu: f64,
    /// Weak-coupling scaling κ > 0 (1 means unscaled).
    pub kappa: f64,
    pub dispersion: Dispersion,
    pub fourier_norm: FourierNorm,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            eps: 0.1,
            lambda: 1.0,
            g: 1.0,
            n_particles: 1,
            nu: 0.0,
            kappa: 1.0,
            dispersion: Dispersion::Massless,
            fourier_norm: FourierNorm::None,
        }
    }
}

impl ModelParams {
    /// Massless model with bare normalization.
    pub fn massless(eps: f64, lambda: f64, g: f64, n_particles: usize) -> Self {
        ModelParams { eps, lambda, g, n_particles, ..Default::default() }
    }

    /// Massive, (2π)^{-3}-normalized model used for the weak-coupling limit.
    pub fn weak_coupling(eps: f64, lambda: f64, g: f64, n_particles: usize, nu: f64, kappa: f64) -> Self {
        ModelParams {
            eps,
            lambda,
            g,
            n_particles,
            nu,
            kappa,
            dispersion: Dispersion::Massive,
            fourier_norm: FourierNorm::InverseCube,
        }
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn with_kappa(mut self, kappa: f64) -> Self {
        self.kappa = kappa;
        self
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.eps >= 0.0) || !self.eps.is_finite() {
            return Err(Error::InvalidParams("eps must be finite and >= 0"));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidParams("lambda must be finite and >= 0"));
        }
        if !(self.kappa > 0.0) || !self.kappa.is_finite() {
            return Err(Error::InvalidParams("kappa must be > 0"));
        }
        if !self.g.is_finite() {
            return Err(Error::InvalidParams("g must be finite"));
        }
        if self.n_particles == 0 {
            return Err(Error::InvalidParams("need at least one particle"));
        }
        if !(self.nu >= 0.0) {
            return Err(Error::InvalidParams("nu must be >= 0"));
        }
        if self.dispersion == Dispersion::Massless && self.nu != 0.0 {
            return Err(Error::InvalidParams("massless dispersion forbids nu != 0"));
        }
        Ok(())
    }

    /// φ-type kernels at ε = 0 need an infrared cutoff unless the boson is massive.
    pub fn validate_phi(&self) -> Result<(), Error> {
        self.validate()?;
        if self.eps == 0.0 && self.lambda == 0.0 && self.infrared_mass() == 0.0 {
            return Err(Error::InvalidParams("phi kernels at eps = 0 need lambda > 0"));
        }
        Ok(())
    }

    fn infrared_mass(&self) -> f64 {
        match self.dispersion {
            Dispersion::Massless => 0.0,
            Dispersion::Massive => self.nu,
        }
    }

    #[inline]
    pub fn omega(&self, r: f64) -> f64 {
        match self.dispersion {
            Dispersion::Massless => r,
            Dispersion::Massive => sqrt(r * r + self.nu * self.nu),
        }
    }

    /// κ²/(κ²ω + r²/2); reduces to 1/(ω + r²/2) at κ = 1.
    #[inline]
    pub fn beta(&self, r: f64) -> f64 {
        let k2 = self.kappa * self.kappa;
        k2 / (k2 * self.omega(r) + 0.5 * r * r)
    }

    /// Constant in front of the radial integral after the angular
    /// integration ∫ e^{-ik·x} dΩ = 4π sin(r|x|)/(r|x|).
    pub fn radial_prefactor(&self) -> f64 {
        let four_pi = 4.0 * core::f64::consts::PI;
        match self.fourier_norm {
            FourierNorm::None => four_pi,
            FourierNorm::InverseCube => {
                let pi = core::f64::consts::PI;
                four_pi / (8.0 * pi * pi * pi)
            }
        }
    }
}

/// Truncation radius rule R_max = Λ + min(t_cut/(κ²|t|), eps_cut/√ε).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RMaxPolicy {
    pub t_cut: f64,
    pub eps_cut: f64,
    /// Below this |t| (resp. √ε) the corresponding factor is ignored.
    pub delta: f64,
}

impl Default for RMaxPolicy {
    fn default() -> Self {
        RMaxPolicy { t_cut: 40.0, eps_cut: 8.0, delta: 1e-6 }
    }
}

/// Per-panel rule. Only the 21-point Kronrod rule with embedded 10-point
/// Gauss estimate is implemented.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PanelRule {
    #[default]
    GaussKronrod21,
}

/// Controls for the radial quadrature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub r_max_policy: RMaxPolicy,
    pub panel_rule: PanelRule,
    /// Panel length as a fraction of π/|x| for oscillatory integrands.
    pub oscillation_panel: f64,
    /// Below this |x| the sinc factor is replaced by its two-term series.
    pub small_x_threshold: f64,
    /// Bisection budget for the direct part.
    pub max_panels: usize,
    /// Term budget for the accelerated alternating tail.
    pub max_tail_terms: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-9,
            r_max_policy: RMaxPolicy::default(),
            panel_rule: PanelRule::GaussKronrod21,
            oscillation_panel: 1.0,
            small_x_threshold: 1e-8,
            max_panels: 20_000,
            max_tail_terms: 2_000,
        }
    }
}

impl QuadratureSpec {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidParams("rel_tol must be > 0"));
        }
        if !(self.small_x_threshold > 0.0) {
            return Err(Error::InvalidParams("small_x_threshold must be > 0"));
        }
        if !(self.oscillation_panel > 0.0 && self.oscillation_panel <= 1.0) {
            return Err(Error::InvalidParams("oscillation_panel must lie in (0, 1]"));
        }
        Ok(())
    }
}

/// A quadrature result with its error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelValue {
    pub value: f64,
    pub est_error: f64,
    /// Largest radius actually integrated (the end of the accelerated tail
    /// when one is used).
    pub truncation_radius: f64,
}
