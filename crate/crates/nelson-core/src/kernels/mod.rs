//! Pair-interaction kernels W_ε, φ_ε, ∇φ_ε and their weak-coupling
//! variants, reduced to radial quadrature.

mod oracle;
mod params;
mod radial;
mod rho;
mod table;

pub use oracle::{oracle_kernel_3d, OracleKernel};
pub use params::{Dispersion, FourierNorm, KernelValue, ModelParams, PanelRule, QuadratureSpec, RMaxPolicy};
pub use radial::{
    coulomb_bound_constant, eval_dphi_dr, eval_dphi_dr_scaled, eval_e, eval_e_scaled, eval_grad_phi, eval_kernels,
    eval_phi, eval_phi_scaled, eval_w, KernelTriple,
};
pub use rho::{eval_rho_kernel, RadialProfile};
pub use table::{KernelTable, LagSlice, TableSpec};
