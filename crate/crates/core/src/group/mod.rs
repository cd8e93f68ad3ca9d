//! Groups `Γ ⋉ A`, their group rings, compressions to boxes, and the finite-factor reductions.

mod compress;
mod element;
mod lemmas;
mod parse;
mod ring;
mod spec;

pub use compress::{compression_matrix, compression_matrix_enumerated};
pub use element::GroupElement;
pub use lemmas::{halving_construct, regular_rep_expand};
pub use parse::{parse_element, parse_matrix, parse_word};
pub use ring::{GroupRingElement, GroupRingMatrix};
pub use spec::{FiniteAut, GroupSpec, MAX_FINITE_BITS};
