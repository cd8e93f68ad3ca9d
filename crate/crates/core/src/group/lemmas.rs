use std::sync::Arc;

use super::element::GroupElement;
use super::ring::{GroupRingElement, GroupRingMatrix};
use super::spec::GroupSpec;
use crate::error::{Error, Result};
use crate::linalg::{rank, Dyadic, ExactMatrix, FieldSpec};

/// Rewrites `T` over `k[Λ × Γ]` as a `|Λ|`-times larger matrix over `k[Γ]` using the left-regular
/// representation of the finite factor `Λ = Z_2^r`.
///
/// `Λ` is realized as the top `r` finite bits of `T`'s group (see [`GroupSpec::with_extra_bits`]);
/// `enumeration` lists its elements as `r`-bit masks. Block `(a, b)` of entry `(i, j)` collects
/// the terms `c·λγ` of `T_ij` with `λ λ_b = λ_a`.
pub fn regular_rep_expand(
    t: &GroupRingMatrix,
    base: &Arc<GroupSpec>,
    enumeration: &[u64],
) -> Result<GroupRingMatrix> {
    let r = enumeration.len().trailing_zeros() as usize;
    if !enumeration.len().is_power_of_two() {
        return Err(Error::Invalid(format!("{} elements cannot enumerate Z_2^r", enumeration.len())));
    }
    let mut seen = vec![false; enumeration.len()];
    for &m in enumeration {
        if m as usize >= enumeration.len() || std::mem::replace(&mut seen[m as usize], true) {
            return Err(Error::Invalid(format!("enumeration {enumeration:?} is not a bijection onto Z_2^{r}")));
        }
    }
    let expected = base.with_extra_bits(r)?;
    if **t.group() != expected {
        return Err(Error::GroupMismatch("T must live over the base group times Z_2^r".into()));
    }
    let shift = base.finite_bits();
    let low = (1u64 << shift) - 1;
    let pos: Vec<usize> = {
        let mut p = vec![0; enumeration.len()];
        for (i, &m) in enumeration.iter().enumerate() {
            p[m as usize] = i;
        }
        p
    };
    let size = enumeration.len();
    let mut out = GroupRingMatrix::zeros(base, t.rows() * size, t.cols() * size);
    for (i, j, x) in t.entries() {
        for (b_idx, &lb) in enumeration.iter().enumerate() {
            for (g, c) in x.terms() {
                let lam = g.finite_bits() >> shift;
                let a_idx = pos[(lam ^ lb) as usize];
                let stripped = GroupElement::from_parts(
                    g.shift_vector().to_vec(),
                    g.aut_index(),
                    g.lamps().to_vec(),
                    g.finite_bits() & low,
                );
                let (ri, cj) = (i * size + a_idx, j * size + b_idx);
                let mut cur = out.get(ri, cj);
                cur.add_term(stripped, c.clone());
                out.set(ri, cj, cur)?;
            }
        }
    }
    Ok(out)
}

/// `S = I·diag((1−u)/2) + T·diag((1+u)/2)` over `k[Γ × Z_2]`, where `u` generates the new factor.
///
/// `I` must be an injective scalar matrix with at least as many rows as columns; injectivity is
/// checked over ℚ. Over a field where `I` stays injective, `S` compressed to `B × Z_2` has the same
/// kernel dimension as `T` compressed to `B`.
pub fn halving_construct(t: &GroupRingMatrix, i: &[Vec<Dyadic>]) -> Result<GroupRingMatrix> {
    let (m, n) = (t.rows(), t.cols());
    if i.len() != m || i.iter().any(|r| r.len() != n) {
        return Err(Error::Shape(format!("I must be {m}x{n}")));
    }
    if m < n {
        return Err(Error::Shape(format!("need at least as many rows as columns, got {m}x{n}")));
    }
    let q = FieldSpec::rationals();
    let trip = i
        .iter()
        .enumerate()
        .flat_map(|(r, row)| row.iter().enumerate().map(move |(c, v)| (r, c, v)));
    if rank(&ExactMatrix::from_dyadic_triplets(m, n, q, trip)?) != n {
        return Err(Error::Invalid("I has a nontrivial kernel".into()));
    }
    let base = t.group();
    let g = Arc::new(base.with_extra_bits(1)?);
    let u = GroupElement::finite(&g, 1 << base.finite_bits());
    let half = Dyadic::half();
    let minus = GroupRingElement::from_terms(&g, [(g.identity(), half.clone()), (u.clone(), -half.clone())]);
    let plus = GroupRingElement::from_terms(&g, [(g.identity(), half.clone()), (u, half)]);
    let lifted = t.regroup(&g)?;
    let mut out = GroupRingMatrix::zeros(&g, m, n);
    for r in 0..m {
        for c in 0..n {
            let a = minus.scale(&i[r][c]);
            let b = lifted.get(r, c).mul(&plus)?;
            out.set(r, c, a.add(&b)?)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::folner::FolnerBox;
    use crate::group::{compression_matrix, parse_matrix};
    use crate::linalg::kernel_dim;

    #[test]
    fn regular_rep_of_lamp() {
        let base = Arc::new(GroupSpec::shifts(1).unwrap());
        let g = Arc::new(base.with_extra_bits(1).unwrap());
        let t = parse_matrix(&g, "v[0]").unwrap();
        let l = regular_rep_expand(&t, &base, &[0, 1]).unwrap();
        let one = GroupRingElement::one(&base);
        assert!(l.get(0, 0).is_zero() && l.get(1, 1).is_zero());
        assert_eq!((l.get(0, 1), l.get(1, 0)), (one.clone(), one));

        let t = parse_matrix(&g, "t + v[0]").unwrap();
        let l = regular_rep_expand(&t, &base, &[0, 1]).unwrap();
        assert_eq!(l.get(0, 0), parse_matrix(&base, "t").unwrap().get(0, 0));
        assert_eq!(l.get(0, 1), GroupRingElement::one(&base));
        assert!(regular_rep_expand(&t, &base, &[0, 0]).is_err());
    }

    #[test]
    fn averaged_lamp_has_rank_one() {
        let base = Arc::new(GroupSpec::shifts(1).unwrap());
        let g = Arc::new(base.with_extra_bits(1).unwrap());
        let t = parse_matrix(&g, "1/2 + 1/2 * v[0]").unwrap();
        let l = regular_rep_expand(&t, &base, &[0, 1]).unwrap();
        for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            assert_eq!(l.get(a, b).coefficient(&base.identity()), Some(&Dyadic::half()));
        }
        let bx = FolnerBox::centered(&base, 1, 0).unwrap();
        let m = compression_matrix(&l, &bx, FieldSpec::rationals()).unwrap();
        assert_eq!(kernel_dim(&m), 1);
    }

    #[test]
    fn halving_of_zero_and_identity() {
        let g = Arc::new(GroupSpec::lamplighter());
        let id = vec![vec![Dyadic::from_int(1)]];
        let f = FieldSpec::prime(3).unwrap();
        for (expr, per_box) in [("e", 0usize), ("0", 1)] {
            let t = parse_matrix(&g, expr).unwrap();
            let s = halving_construct(&t, &id).unwrap();
            for (n, m) in [(1, 0), (2, 2), (3, 1)] {
                let b = FolnerBox::centered(&g, n, m).unwrap();
                let bs = FolnerBox::centered(s.group(), n, m).unwrap();
                let k = kernel_dim(&compression_matrix(&s, &bs, f).unwrap());
                assert_eq!(k, per_box * b.len());
            }
        }
        assert!(halving_construct(&parse_matrix(&g, "e").unwrap(), &[vec![Dyadic::from_int(0)]]).is_err());
    }
}
