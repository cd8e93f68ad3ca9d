//! Exact scalars and kernel dimensions of sparse matrices over ℚ and GF(p).

pub mod dyadic;
pub mod elim;
pub mod field;
pub mod matrix;

pub use dyadic::Dyadic;
pub use elim::{joint_kernel_dim, kernel_dim, rank, rank_with, Strategy};
pub use field::{is_prime, pow_mod, reduce_mod, Coefficient, ExactScalar, Field, FieldSpec, PrimeField, Rationals};
pub use matrix::ExactMatrix;
