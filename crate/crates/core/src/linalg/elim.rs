use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use super::field::{inv_mod, mul_mod, ExactScalar, Field, PrimeField};
use super::matrix::ExactMatrix;
use crate::error::{Error, Result};

/// Blocks with at most this many columns are eliminated densely when they are not too sparse.
pub const DENSE_COLUMN_LIMIT: usize = 512;
const DENSE_MIN_FILL: f64 = 0.05;

/// Which elimination routine to use per connected block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Auto,
    Sparse,
    Dense,
}

pub fn rank(m: &ExactMatrix) -> usize {
    rank_with(m, Strategy::Auto)
}

/// Dimension of the right null space.
pub fn kernel_dim(m: &ExactMatrix) -> usize {
    m.cols() - rank(m)
}

/// Dimension of the common right null space of matrices sharing a column count and field.
pub fn joint_kernel_dim(ms: &[ExactMatrix]) -> Result<usize> {
    if ms.is_empty() {
        return Err(Error::Shape("no matrices to stack".into()));
    }
    Ok(kernel_dim(&ExactMatrix::vstack(ms)?))
}

pub fn rank_with(m: &ExactMatrix, strategy: Strategy) -> usize {
    let blocks = split_blocks(m);
    blocks
        .into_par_iter()
        .map(|b| {
            let dense = match strategy {
                Strategy::Dense => true,
                Strategy::Sparse => false,
                Strategy::Auto => {
                    let fill = b.nnz as f64 / (b.ncols as f64 * b.rows.len() as f64);
                    b.ncols <= DENSE_COLUMN_LIMIT && (b.ncols <= 32 || fill >= DENSE_MIN_FILL)
                }
            };
            block_rank(m, &b, dense)
        })
        .sum()
}

struct Block {
    rows: Vec<usize>,
    /// global column -> local column
    colmap: HashMap<usize, usize>,
    ncols: usize,
    nnz: usize,
}

/// Splits the matrix into independent blocks: two columns are linked when a row touches both.
fn split_blocks(m: &ExactMatrix) -> Vec<Block> {
    let mut parent: Vec<usize> = (0..m.cols()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for row in m.raw_rows() {
        let mut it = row.keys();
        if let Some(&first) = it.next() {
            let a = find(&mut parent, first);
            for &c in it {
                let b = find(&mut parent, c);
                if a != b {
                    parent[b] = a;
                }
            }
        }
    }
    let mut index: HashMap<usize, usize> = HashMap::new();
    let mut blocks: Vec<Block> = Vec::new();
    for (r, row) in m.raw_rows().iter().enumerate() {
        let Some(&first) = row.keys().next() else { continue };
        let root = find(&mut parent, first);
        let bi = *index.entry(root).or_insert_with(|| {
            blocks.push(Block { rows: Vec::new(), colmap: HashMap::new(), ncols: 0, nnz: 0 });
            blocks.len() - 1
        });
        let b = &mut blocks[bi];
        b.rows.push(r);
        b.nnz += row.len();
        for &c in row.keys() {
            let next = b.colmap.len();
            b.colmap.entry(c).or_insert(next);
        }
    }
    for b in &mut blocks {
        b.ncols = b.colmap.len();
    }
    blocks
}

fn block_rank(m: &ExactMatrix, b: &Block, dense: bool) -> usize {
    let field = m.field();
    if field.is_rational() {
        let rows: Vec<Vec<(usize, BigInt)>> =
            b.rows.iter().map(|&r| integer_row(m, r, &b.colmap)).collect();
        if dense {
            let mut d = vec![vec![BigInt::zero(); b.ncols]; rows.len()];
            for (i, row) in rows.into_iter().enumerate() {
                for (c, v) in row {
                    d[i][c] = v;
                }
            }
            rank_bareiss(d)
        } else {
            sparse_rank_integer(rows)
        }
    } else {
        let p = field.characteristic();
        let rows: Vec<Vec<(usize, u64)>> = b
            .rows
            .iter()
            .map(|&r| {
                let mut row: Vec<(usize, u64)> = m
                    .row(r)
                    .map(|(c, v)| match v {
                        ExactScalar::Residue { value, .. } => (b.colmap[&c], *value),
                        ExactScalar::Rational(_) => unreachable!("rational entry in GF(p) matrix"),
                    })
                    .collect();
                row.sort_unstable_by_key(|e| e.0);
                row
            })
            .collect();
        if dense {
            let f = PrimeField::new(p).expect("validated field");
            let mut d = vec![vec![0u64; b.ncols]; rows.len()];
            for (i, row) in rows.into_iter().enumerate() {
                for (c, v) in row {
                    d[i][c] = v;
                }
            }
            rank_dense(&f, d)
        } else {
            sparse_rank_mod(rows, p)
        }
    }
}

/// Row of a rational matrix scaled to a primitive integer vector with local column indices.
fn integer_row(m: &ExactMatrix, r: usize, colmap: &HashMap<usize, usize>) -> Vec<(usize, BigInt)> {
    let mut lcm = BigInt::one();
    for (_, v) in m.row(r) {
        if let ExactScalar::Rational(q) = v {
            lcm = lcm.lcm(q.denom());
        }
    }
    let mut row: Vec<(usize, BigInt)> = m
        .row(r)
        .map(|(c, v)| match v {
            ExactScalar::Rational(q) => (colmap[&c], q.numer() * (&lcm / q.denom())),
            ExactScalar::Residue { .. } => unreachable!("residue entry in rational matrix"),
        })
        .collect();
    row.sort_by_key(|e| e.0);
    make_primitive(&mut row);
    row
}

fn make_primitive(row: &mut [(usize, BigInt)]) {
    let mut g = BigInt::zero();
    for (_, v) in row.iter() {
        g = g.gcd(v);
        if g.is_one() {
            break;
        }
    }
    let negative = row.first().is_some_and(|(_, v)| v.is_negative());
    if g.is_zero() {
        return;
    }
    let g = if negative { -g } else { g };
    if !g.is_one() {
        for (_, v) in row.iter_mut() {
            *v = &*v / &g;
        }
    }
}

/// Echelon reduction of sparse rows over `GF(p)`, pivoting on the first nonzero column.
pub(crate) fn sparse_rank_mod(rows: Vec<Vec<(usize, u64)>>, p: u64) -> usize {
    let mut pivots: HashMap<usize, Vec<(usize, u64)>> = HashMap::new();
    for mut row in rows {
        while let Some(&(lead, a)) = row.first() {
            match pivots.get(&lead) {
                Some(piv) => row = axpy_mod(&row, p - a, piv, p),
                None => {
                    let inv = inv_mod(a, p);
                    for e in row.iter_mut() {
                        e.1 = mul_mod(e.1, inv, p);
                    }
                    pivots.insert(lead, row);
                    break;
                }
            }
        }
    }
    pivots.len()
}

/// `x + s*y` for sorted sparse rows mod `p`.
fn axpy_mod(x: &[(usize, u64)], s: u64, y: &[(usize, u64)], p: u64) -> Vec<(usize, u64)> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let take_x = j >= y.len() || (i < x.len() && x[i].0 < y[j].0);
        let take_y = i >= x.len() || (j < y.len() && y[j].0 < x[i].0);
        if take_x {
            out.push(x[i]);
            i += 1;
        } else if take_y {
            out.push((y[j].0, mul_mod(s, y[j].1, p)));
            j += 1;
        } else {
            let v = (x[i].1 + mul_mod(s, y[j].1, p)) % p;
            if v != 0 {
                out.push((x[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Fraction-free echelon reduction of sparse integer rows; rows are kept primitive.
pub(crate) fn sparse_rank_integer(rows: Vec<Vec<(usize, BigInt)>>) -> usize {
    let mut pivots: HashMap<usize, Vec<(usize, BigInt)>> = HashMap::new();
    for mut row in rows {
        while let Some((lead, a)) = row.first().cloned() {
            match pivots.get(&lead) {
                Some(piv) => {
                    let b = &piv[0].1;
                    let g = a.gcd(b);
                    let (ca, cb) = (b / &g, &a / &g);
                    row = combine_integer(&row, &ca, piv, &cb);
                    make_primitive(&mut row);
                }
                None => {
                    pivots.insert(lead, row);
                    break;
                }
            }
        }
    }
    pivots.len()
}

/// `ca*x - cb*y` for sorted sparse integer rows.
fn combine_integer(
    x: &[(usize, BigInt)],
    ca: &BigInt,
    y: &[(usize, BigInt)],
    cb: &BigInt,
) -> Vec<(usize, BigInt)> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        if j >= y.len() || (i < x.len() && x[i].0 < y[j].0) {
            out.push((x[i].0, ca * &x[i].1));
            i += 1;
        } else if i >= x.len() || y[j].0 < x[i].0 {
            out.push((y[j].0, -(cb * &y[j].1)));
            j += 1;
        } else {
            let v = ca * &x[i].1 - cb * &y[j].1;
            if !v.is_zero() {
                out.push((x[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Dense Gaussian elimination over any field with explicit context.
pub fn rank_dense<F: Field>(f: &F, mut a: Vec<Vec<F::Elem>>) -> usize {
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(piv) = (rank..nrows).find(|&r| !f.is_zero(&a[r][col])) else { continue };
        a.swap(rank, piv);
        let inv = f.inv(&a[rank][col]);
        for c in col..ncols {
            a[rank][c] = f.mul(&a[rank][c], &inv);
        }
        let (top, bottom) = a.split_at_mut(rank + 1);
        let prow = &top[rank];
        for row in bottom.iter_mut() {
            if f.is_zero(&row[col]) {
                continue;
            }
            let s = row[col].clone();
            for c in col..ncols {
                row[c] = f.sub(&row[c], &f.mul(&s, &prow[c]));
            }
        }
        rank += 1;
    }
    rank
}

/// Dense Bareiss (fraction-free) elimination over the integers.
pub fn rank_bareiss(mut a: Vec<Vec<BigInt>>) -> usize {
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(piv) = (rank..nrows).find(|&r| !a[r][col].is_zero()) else { continue };
        a.swap(rank, piv);
        let (top, bottom) = a.split_at_mut(rank + 1);
        let prow = &top[rank];
        for row in bottom.iter_mut() {
            for c in (col + 1)..ncols {
                let v = &prow[col] * &row[c] - &row[col] * &prow[c];
                row[c] = v / &prev;
            }
            row[col] = BigInt::zero();
        }
        prev = prow[col].clone();
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::field::{FieldSpec, Rationals};
    use num_rational::BigRational;

    fn q() -> FieldSpec {
        FieldSpec::rationals()
    }

    #[test]
    fn zero_matrix_full_kernel() {
        let m = ExactMatrix::zeros(3, 3, FieldSpec::prime(3).unwrap());
        assert_eq!(kernel_dim(&m), 3);
    }

    #[test]
    fn strategies_agree_on_small_examples() {
        let rows = vec![vec![1, 2, 3, 0], vec![2, 4, 6, 0], vec![0, 1, 1, 5], vec![1, 3, 4, 5]];
        for f in [q(), FieldSpec::prime(5).unwrap(), FieldSpec::prime(7).unwrap()] {
            let m = ExactMatrix::from_ints(f, &rows).unwrap();
            let r = [Strategy::Auto, Strategy::Sparse, Strategy::Dense].map(|s| rank_with(&m, s));
            assert_eq!(r, [2, 2, 2], "{f}");
        }
    }

    #[test]
    fn specialization_drops_rank() {
        // det = 5
        let rows = vec![vec![1, 2], vec![-2, 1]];
        assert_eq!(rank(&ExactMatrix::from_ints(q(), &rows).unwrap()), 2);
        assert_eq!(rank(&ExactMatrix::from_ints(FieldSpec::prime(5).unwrap(), &rows).unwrap()), 1);
    }

    #[test]
    fn joint_kernel_of_identity_and_zero() {
        let f = FieldSpec::prime(3).unwrap();
        let ms = [ExactMatrix::identity(4, f), ExactMatrix::zeros(4, 4, f)];
        assert_eq!(joint_kernel_dim(&ms).unwrap(), 0);
        assert_eq!(joint_kernel_dim(&ms[1..]).unwrap(), 4);
    }

    #[test]
    fn joint_kernel_rejects_mismatch() {
        let ms = [ExactMatrix::identity(2, q()), ExactMatrix::identity(3, q())];
        assert!(joint_kernel_dim(&ms).is_err());
        let ms = [ExactMatrix::identity(2, q()), ExactMatrix::identity(2, FieldSpec::prime(3).unwrap())];
        assert!(joint_kernel_dim(&ms).is_err());
    }

    #[test]
    fn generic_dense_over_rationals() {
        let half = BigRational::new(1.into(), 2.into());
        let one = BigRational::one();
        let a = vec![vec![half.clone(), one.clone()], vec![one.clone(), &one + &one]];
        assert_eq!(rank_dense(&Rationals, a), 1);
    }

    #[test]
    fn rational_entries_are_cleared() {
        let f = q();
        let mut m = ExactMatrix::zeros(2, 2, f);
        let third = ExactScalar::Rational(BigRational::new(1.into(), 3.into()));
        m.set(0, 0, third.clone()).unwrap();
        m.set(0, 1, f.one()).unwrap();
        m.set(1, 0, f.one()).unwrap();
        m.set(1, 1, f.from_int(3)).unwrap();
        assert_eq!(rank_with(&m, Strategy::Sparse), 1);
        assert_eq!(rank_with(&m, Strategy::Dense), 1);
    }
}
