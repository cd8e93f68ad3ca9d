pub mod closed_forms;
pub mod cylinder;
pub mod error;
pub mod families;
pub mod folner;
pub mod group;
pub mod linalg;
pub mod presets;
pub mod tgraph;

pub use error::{Error, Result};
pub use folner::{gradient_estimate, FolnerBox};
pub use group::{GroupElement, GroupRingElement, GroupRingMatrix, GroupSpec};
pub use linalg::{Dyadic, ExactMatrix, ExactScalar, FieldSpec};

/// Integral-model elements, with dyadic coefficients.
pub type DyadicElement = GroupRingElement<Dyadic>;
pub type DyadicMatrix = GroupRingMatrix<Dyadic>;
/// Elements after reduction into a coefficient field.
pub type FieldElement = GroupRingElement<ExactScalar>;
pub type FieldMatrix = GroupRingMatrix<ExactScalar>;
