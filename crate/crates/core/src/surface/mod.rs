//! The genus-two surface: Fuchsian group, metric, mesh and holomorphic
//! differentials.

pub mod bolza;
pub mod differential;
pub mod mesh;
pub mod mesh_io;
pub mod metric;
pub mod mobius;

pub use bolza::{bolza_group, FuchsianSurface};
pub use differential::{poincare_series_differential, DifferentialData, DifferentialSource};
pub use mesh::{build_mesh, build_mesh_subdivided, SurfaceMesh};
pub use mesh_io::{read_mesh, write_mesh};
pub use metric::natural_metric_lambda;
pub use mobius::{transition_alpha, ChartMap, MobiusMap, PolynomialChart};
