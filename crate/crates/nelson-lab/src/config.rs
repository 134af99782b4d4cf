//! TOML run configuration. Every table rejects unknown keys, so a typo in a
//! sweep is an error instead of a silently ignored setting.

use serde::{Deserialize, Serialize};

use nelson_core::estimator::{Potential, TestFunction, XiSpec};
use nelson_core::katoclass::RadialPotential;
use nelson_core::kernels::{Dispersion, FourierNorm, ModelParams, QuadratureSpec, RadialProfile};
use nelson_core::paths::TimeGrid;

use crate::error::{LabError, Result};

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct LabConfig {
    /// Base seed; `--seed` overrides it.
    #[serde(default)]
    pub seed: u64,
    pub model: ModelSection,
    #[serde(default)]
    pub quadrature: QuadSection,
    pub grid: Option<GridSection>,
    pub kernels_table: Option<KernelsTableSection>,
    pub renorm_sweep: Option<RenormSweepSection>,
    pub ito_check: Option<ItoCheckSection>,
    pub semigroup: Option<SemigroupSection>,
    pub yukawa_sweep: Option<YukawaSweepSection>,
    pub kato: Option<KatoSection>,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum DispersionName {
    Massless,
    Massive,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum FourierNormName {
    None,
    InverseCube,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub eps: f64,
    pub lambda: f64,
    pub g: f64,
    pub n_particles: usize,
    #[serde(default)]
    pub nu: f64,
    #[serde(default = "one")]
    pub kappa: f64,
    #[serde(default = "massless")]
    pub dispersion: DispersionName,
    #[serde(default = "bare")]
    pub fourier_norm: FourierNormName,
}

fn one() -> f64 {
    1.0
}
fn massless() -> DispersionName {
    DispersionName::Massless
}
fn bare() -> FourierNormName {
    FourierNormName::None
}

impl ModelSection {
    pub fn params(&self) -> Result<ModelParams> {
        let p = ModelParams {
            eps: self.eps,
            lambda: self.lambda,
            g: self.g,
            n_particles: self.n_particles,
            nu: self.nu,
            kappa: self.kappa,
            dispersion: match self.dispersion {
                DispersionName::Massless => Dispersion::Massless,
                DispersionName::Massive => Dispersion::Massive,
            },
            fourier_norm: match self.fourier_norm {
                FourierNormName::None => FourierNorm::None,
                FourierNormName::InverseCube => FourierNorm::InverseCube,
            },
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct QuadSection {
    pub rel_tol: Option<f64>,
    pub small_x_threshold: Option<f64>,
}

impl QuadSection {
    pub fn spec(&self) -> Result<QuadratureSpec> {
        let mut q = QuadratureSpec::default();
        if let Some(v) = self.rel_tol {
            q.rel_tol = v;
        }
        if let Some(v) = self.small_x_threshold {
            q.small_x_threshold = v;
        }
        q.validate()?;
        Ok(q)
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub t_horizon: f64,
    pub n_steps: usize,
    /// Defaults to the full window 2T.
    pub tau: Option<f64>,
}

impl GridSection {
    pub fn grid(&self) -> Result<TimeGrid> {
        let tau = self.tau.unwrap_or(2.0 * self.t_horizon);
        Ok(TimeGrid::new(self.t_horizon, self.n_steps, tau)?)
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct KernelsTableSection {
    pub eps: Vec<f64>,
    pub x: Vec<f64>,
    pub t: Vec<f64>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RenormSweepSection {
    pub eps: Vec<f64>,
    pub n_paths: usize,
    /// Start point of every path in R^{3N}; defaults to particles spaced
    /// one unit apart on the first axis.
    pub start: Option<Vec<f64>>,
    /// Radius covered by a per-ε kernel table; omit for direct quadrature.
    pub table_radius: Option<f64>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ItoCheckSection {
    pub n_paths: usize,
    /// Refinement ladder 2^min_level ..= 2^max_level steps.
    pub min_level: u32,
    pub max_level: u32,
    /// Level at which the residual ratio is reported.
    pub report_level: u32,
    pub start: Option<Vec<f64>>,
    pub table_radius: Option<f64>,
    #[serde(default = "slope_min")]
    pub slope_min: f64,
    #[serde(default = "slope_max")]
    pub slope_max: f64,
    #[serde(default = "ratio_max")]
    pub ratio_max: f64,
}

fn slope_min() -> f64 {
    0.4
}
fn slope_max() -> f64 {
    0.6
}
fn ratio_max() -> f64 {
    0.05
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PacketSection {
    pub center: Vec<f64>,
    pub width: f64,
}

impl PacketSection {
    pub fn function(&self) -> TestFunction {
        TestFunction::gaussian(self.center.clone(), self.width)
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSection {
    Zero,
    BoundedWell { depth: f64, width: f64 },
    Harmonic { delta: f64 },
    Yukawa { g: f64, nu: f64 },
    PairPower { exponent: f64, coupling: f64 },
}

impl PotentialSection {
    pub fn potential(&self) -> Potential {
        match *self {
            PotentialSection::Zero => Potential::Zero,
            PotentialSection::BoundedWell { depth, width } => Potential::BoundedWell { depth, width },
            PotentialSection::Harmonic { delta } => Potential::Harmonic { delta },
            PotentialSection::Yukawa { g, nu } => Potential::yukawa(g, nu),
            PotentialSection::PairPower { exponent, coupling } => Potential::PairPower { exponent, coupling },
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProfileSection {
    pub amplitude: f64,
    pub width: f64,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct XiSection {
    pub rho1: ProfileSection,
    pub rho2: ProfileSection,
    pub alpha: f64,
    pub beta: f64,
}

impl XiSection {
    pub fn spec(&self) -> XiSpec {
        XiSpec {
            rho1: RadialProfile::new(self.rho1.amplitude, self.rho1.width),
            rho2: RadialProfile::new(self.rho2.amplitude, self.rho2.width),
            alpha: self.alpha,
            beta: self.beta,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SemigroupSection {
    pub n_paths: usize,
    /// ε values to run; defaults to the model's ε.
    pub eps: Option<Vec<f64>>,
    /// Horizons T; the step Δt of `[grid]` is kept, so M scales with T.
    pub t_horizons: Option<Vec<f64>>,
    #[serde(default = "yes")]
    pub renormalize: bool,
    pub f: PacketSection,
    pub h: Option<PacketSection>,
    #[serde(default = "zero_potential")]
    pub potential: PotentialSection,
    pub xi: Option<XiSection>,
    pub table_radius: Option<f64>,
}

fn yes() -> bool {
    true
}
fn zero_potential() -> PotentialSection {
    PotentialSection::Zero
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct YukawaSweepSection {
    pub kappas: Vec<f64>,
    pub n_paths: usize,
    pub f: PacketSection,
    pub h: Option<PacketSection>,
    pub table_radius: Option<f64>,
    /// Distances for the kernel-level constant check.
    #[serde(default)]
    pub x_check: Vec<f64>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct KatoSection {
    /// Power-law exponents s of |x|^{−s}.
    pub exponents: Vec<f64>,
    /// Also test a bounded potential with this bound.
    pub bounded: Option<f64>,
    #[serde(default = "three")]
    pub dim: usize,
    pub t_list: Vec<f64>,
    pub n_paths: usize,
    pub n_starts: usize,
    #[serde(default)]
    pub betas: Vec<f64>,
    #[serde(default)]
    pub taus: Vec<f64>,
}

fn three() -> usize {
    3
}

impl KatoSection {
    pub fn potentials(&self) -> Vec<RadialPotential> {
        let mut v: Vec<RadialPotential> = self.exponents.iter().map(|&s| RadialPotential::power(s)).collect();
        if let Some(b) = self.bounded {
            v.push(RadialPotential::Bounded { bound: b });
        }
        v
    }
}

impl LabConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| LabError::Config(e.to_string()))
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        self.grid.as_ref().ok_or_else(|| LabError::Config("missing [grid] section".into()))?.grid()
    }
}

/// Fetch a required subcommand section.
pub fn section<'a, T>(s: &'a Option<T>, name: &str) -> Result<&'a T> {
    s.as_ref().ok_or_else(|| LabError::Config(format!("missing [{name}] section")))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
seed = 3
[model]
eps = 0.1
lambda = 1.0
g = 1.0
n_particles = 2
"#;

    #[test]
    fn minimal_config_parses() {
        let c = LabConfig::parse(MINIMAL).unwrap();
        assert_eq!(c.seed, 3);
        assert_eq!(c.model.params().unwrap(), ModelParams::massless(0.1, 1.0, 1.0, 2));
    }

    #[test]
    fn unknown_keys_are_errors() {
        let bad = MINIMAL.replace("lambda = 1.0", "lamda = 1.0");
        assert!(LabConfig::parse(&bad).is_err());
        let bad = format!("{MINIMAL}\n[grid]\nt_horizon = 1.0\nn_steps = 8\nwindow = 1.0\n");
        assert!(LabConfig::parse(&bad).is_err());
    }

    #[test]
    fn potential_tags() {
        let text = format!(
            "{MINIMAL}\n[semigroup]\nn_paths = 10\nf = {{ center = [0,0,0,1,0,0], width = 1.0 }}\npotential = {{ kind = \"harmonic\", delta = 0.5 }}\n"
        );
        let c = LabConfig::parse(&text).unwrap();
        assert_eq!(c.semigroup.unwrap().potential.potential(), Potential::Harmonic { delta: 0.5 });
    }
}
