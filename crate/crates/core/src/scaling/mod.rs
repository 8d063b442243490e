//! The families `∇_{R,ħ,u}`, their conformal limit `∇_{0,ħ,u}` and the oper
//! `∇_{ħ,u}`: assembly, R-sweeps, discrete curvature and holonomy.

pub mod curvature;
pub mod family;
pub mod holonomy;
pub mod sweep;

pub use curvature::{discrete_curvature, CurvatureReport};
pub use family::{
    assemble_family, limit_connection, limit_family_on_mesh, ConnectionForm, FlatFamily, GaugedFamily, LimitFamily,
    MeshFamily, OperFamily,
};
pub use holonomy::{compare_oper, generator_loops, holonomy, HolonomyConfig, HolonomyRecord, OperComparison};
pub use sweep::{loglog_fit, r_grid, sweep_r, SweepResult, SweepRow};
