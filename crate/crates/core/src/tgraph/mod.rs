//! T-graphs: decompositions `T = Σ γ_i f_i`, the graphs of projections they act on, and the
//! kernel contributions those graphs give.

mod census;
mod decomposition;
mod graph;
mod intertwiner;
mod series;

pub use census::{census_window, component_census, Census, CensusComponent, CensusType};
pub use decomposition::TDecomposition;
pub use graph::{
    build_m, gamma_set, simply_connected, validate_tgraph, Connectivity, Edge, RGraph, SGraph, TGraph,
    ValidationReport, Violation,
};
pub use intertwiner::{fitting_box, intertwiner_check, intertwiner_check_with, IntertwinerReport};
pub use series::{gradient_series, lamplighter_parity_series, series_from_census, Bracket, GradientSeries, GradientTerm};
