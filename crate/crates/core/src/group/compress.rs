use std::collections::HashMap;

use rayon::prelude::*;

use super::element::GroupElement;
use super::ring::{same_group, GroupRingMatrix};
use crate::error::{Error, Result};
use crate::folner::FolnerBox;
use crate::linalg::{ExactMatrix, ExactScalar, FieldSpec};

/// The compression `π_B ∘ ρ(T)` as a matrix from `k[B]^b` to `k[B]^a`.
///
/// Column `j·|B| + v` is the basis vector `v` of copy `j`; row `i·|B| + w` likewise. `T` acts by
/// left multiplication, so entry `(i, j)` sends `v` to `Σ c_h · (h v)` for `T_ij = Σ c_h h`.
pub fn compression_matrix(t: &GroupRingMatrix, b: &FolnerBox, field: FieldSpec) -> Result<ExactMatrix> {
    compress_with(t, b, field, |h, v| b.left_mul_index(h, v))
}

/// Same matrix, computed by enumerating the box and multiplying group elements directly.
pub fn compression_matrix_enumerated(t: &GroupRingMatrix, b: &FolnerBox, field: FieldSpec) -> Result<ExactMatrix> {
    let elems: Vec<GroupElement> = b.elements().collect();
    let index: HashMap<&GroupElement, usize> = elems.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let g = b.group().clone();
    compress_with(t, b, field, |h, v| index.get(&g.mul(h, &elems[v])).copied())
}

fn compress_with(
    t: &GroupRingMatrix,
    b: &FolnerBox,
    field: FieldSpec,
    step: impl Fn(&GroupElement, usize) -> Option<usize> + Sync,
) -> Result<ExactMatrix> {
    same_group(t.group(), b.group())?;
    if b.is_empty() {
        return Err(Error::Invalid("empty box".into()));
    }
    let n = b.len();
    let terms: Vec<(usize, usize, &GroupElement, ExactScalar)> = t
        .entries()
        .flat_map(|(i, j, x)| x.terms().map(move |(h, c)| (i, j, h, field.reduce(c))))
        .filter(|e| !e.3.is_zero())
        .collect();
    let triplets: Vec<(usize, usize, ExactScalar)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|v| {
            let step = &step;
            terms.iter().filter_map(move |(i, j, h, c)| {
                step(h, v).map(|w| (i * n + w, j * n + v, c.clone()))
            })
        })
        .collect();
    ExactMatrix::from_triplets(t.rows() * n, t.cols() * n, field, triplets)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::group::{parse_matrix, GroupSpec};
    use crate::linalg::kernel_dim;

    #[test]
    fn identity_compresses_to_identity() {
        let g = Arc::new(GroupSpec::lamplighter());
        let b = FolnerBox::centered(&g, 3, 2).unwrap();
        let f = FieldSpec::prime(3).unwrap();
        let m = compression_matrix(&parse_matrix(&g, "e").unwrap(), &b, f).unwrap();
        assert_eq!(m, ExactMatrix::identity(b.len(), f));
    }

    #[test]
    fn truncated_shift_has_one_kernel_vector() {
        let g = Arc::new(GroupSpec::shifts(1).unwrap());
        let b = FolnerBox::centered(&g, 6, 0).unwrap();
        let m = compression_matrix(&parse_matrix(&g, "t").unwrap(), &b, FieldSpec::rationals()).unwrap();
        assert_eq!(kernel_dim(&m), 1);
    }

    #[test]
    fn both_routes_agree() {
        let g = Arc::new(GroupSpec::with_full_aut(1, 2).unwrap());
        let t = parse_matrix(&g, "[t + 1/2 * u[1] phi2, v[1] t^-1; 3 * phi1 u, -e + u[0,-1]]").unwrap();
        let b = FolnerBox::centered(&g, 3, 2).unwrap();
        for f in [FieldSpec::rationals(), FieldSpec::prime(5).unwrap()] {
            assert_eq!(
                compression_matrix(&t, &b, f).unwrap(),
                compression_matrix_enumerated(&t, &b, f).unwrap()
            );
        }
    }
}
