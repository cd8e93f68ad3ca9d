use std::collections::BTreeMap;
use std::fmt;

use super::dyadic::Dyadic;
use super::field::{ExactScalar, FieldSpec};
use crate::error::{Error, Result};

/// Sparse matrix over an exact field, stored row by row. Zero entries are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    field: FieldSpec,
    data: Vec<BTreeMap<usize, ExactScalar>>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize, field: FieldSpec) -> Self {
        ExactMatrix { rows, cols, field, data: vec![BTreeMap::new(); rows] }
    }

    pub fn identity(n: usize, field: FieldSpec) -> Self {
        let mut m = Self::zeros(n, n, field);
        for i in 0..n {
            m.data[i].insert(i, field.one());
        }
        m
    }

    /// Builds from `(row, col, value)` triplets; repeated positions are summed.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        field: FieldSpec,
        triplets: impl IntoIterator<Item = (usize, usize, ExactScalar)>,
    ) -> Result<Self> {
        let mut m = Self::zeros(rows, cols, field);
        for (r, c, v) in triplets {
            m.add_at(r, c, &v)?;
        }
        Ok(m)
    }

    /// Dyadic triplets pushed through the reduction map into `field`.
    pub fn from_dyadic_triplets<'a>(
        rows: usize,
        cols: usize,
        field: FieldSpec,
        triplets: impl IntoIterator<Item = (usize, usize, &'a Dyadic)>,
    ) -> Result<Self> {
        let mut m = Self::zeros(rows, cols, field);
        for (r, c, v) in triplets {
            m.add_at(r, c, &field.reduce(v))?;
        }
        Ok(m)
    }

    /// Dense construction from small integers, mostly for tests and fixtures.
    pub fn from_ints(field: FieldSpec, rows: &[Vec<i64>]) -> Result<Self> {
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::Shape("ragged rows".into()));
        }
        let trip = rows.iter().enumerate().flat_map(|(i, r)| {
            r.iter().enumerate().map(move |(j, &v)| (i, j, field.from_int(v)))
        });
        Self::from_triplets(rows.len(), ncols, field, trip)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(BTreeMap::len).sum()
    }

    fn check_pos(&self, r: usize, c: usize) -> Result<()> {
        if r >= self.rows || c >= self.cols {
            return Err(Error::Shape(format!(
                "entry ({r},{c}) outside {}x{}",
                self.rows, self.cols
            )));
        }
        Ok(())
    }

    fn check_scalar(&self, v: &ExactScalar) -> Result<()> {
        if v.field() != self.field {
            return Err(Error::FieldMismatch(format!("{} entry in a {} matrix", v.field(), self.field)));
        }
        Ok(())
    }

    pub fn get(&self, r: usize, c: usize) -> ExactScalar {
        self.data
            .get(r)
            .and_then(|row| row.get(&c))
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn set(&mut self, r: usize, c: usize, v: ExactScalar) -> Result<()> {
        self.check_pos(r, c)?;
        self.check_scalar(&v)?;
        if v.is_zero() {
            self.data[r].remove(&c);
        } else {
            self.data[r].insert(c, v);
        }
        Ok(())
    }

    pub fn add_at(&mut self, r: usize, c: usize, v: &ExactScalar) -> Result<()> {
        self.check_pos(r, c)?;
        self.check_scalar(v)?;
        if v.is_zero() {
            return Ok(());
        }
        let row = &mut self.data[r];
        match row.get(&c) {
            Some(old) => {
                let s = old.add(v);
                if s.is_zero() {
                    row.remove(&c);
                } else {
                    row.insert(c, s);
                }
            }
            None => {
                row.insert(c, v.clone());
            }
        }
        Ok(())
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, &ExactScalar)> {
        self.data[r].iter().map(|(c, v)| (*c, v))
    }

    /// All stored entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &ExactScalar)> {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, *c, v)))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows, self.field);
        for (r, c, v) in self.entries() {
            t.data[c].insert(r, v.clone());
        }
        t
    }

    /// Stacks matrices with equal column counts on top of each other.
    pub fn vstack(ms: &[ExactMatrix]) -> Result<Self> {
        let first = ms.first().ok_or_else(|| Error::Shape("empty stack".into()))?;
        let mut out = Self::zeros(0, first.cols, first.field);
        for m in ms {
            if m.cols != first.cols {
                return Err(Error::Shape(format!("{} vs {} columns", m.cols, first.cols)));
            }
            if m.field != first.field {
                return Err(Error::FieldMismatch(format!("{} vs {}", m.field, first.field)));
            }
            out.data.extend(m.data.iter().cloned());
            out.rows += m.rows;
        }
        Ok(out)
    }

    /// Block diagonal sum.
    pub fn direct_sum(&self, other: &ExactMatrix) -> Result<Self> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(format!("{} vs {}", self.field, other.field)));
        }
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols, self.field);
        for (r, c, v) in self.entries() {
            out.data[r].insert(c, v.clone());
        }
        for (r, c, v) in other.entries() {
            out.data[self.rows + r].insert(self.cols + c, v.clone());
        }
        Ok(out)
    }

    /// Entrywise image of a rational matrix in `GF(p)` (or the identity if `field` is ℚ).
    pub fn reduce_to(&self, field: FieldSpec) -> Result<Self> {
        if self.field == field {
            return Ok(self.clone());
        }
        if !self.field.is_rational() {
            return Err(Error::FieldMismatch(format!("cannot map {} to {}", self.field, field)));
        }
        let mut out = Self::zeros(self.rows, self.cols, field);
        for (r, c, v) in self.entries() {
            let ExactScalar::Rational(q) = v else { unreachable!() };
            out.set(r, c, field.reduce_rational(q)?)?;
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &[ExactScalar]) -> Result<Vec<ExactScalar>> {
        if x.len() != self.cols {
            return Err(Error::Shape(format!("vector of length {} for {} columns", x.len(), self.cols)));
        }
        Ok(self
            .data
            .iter()
            .map(|row| {
                row.iter()
                    .fold(self.field.zero(), |acc, (c, v)| acc.add(&v.mul(&x[*c])))
            })
            .collect())
    }

    pub fn mul(&self, rhs: &ExactMatrix) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!("{}x{} times {}x{}", self.rows, self.cols, rhs.rows, rhs.cols)));
        }
        if self.field != rhs.field {
            return Err(Error::FieldMismatch(format!("{} vs {}", self.field, rhs.field)));
        }
        let mut out = Self::zeros(self.rows, rhs.cols, self.field);
        for (r, k, a) in self.entries() {
            for (c, b) in rhs.row(k) {
                out.add_at(r, c, &a.mul(b))?;
            }
        }
        Ok(out)
    }

    pub(crate) fn raw_rows(&self) -> &[BTreeMap<usize, ExactScalar>] {
        &self.data
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ExactMatrix {}x{} over {}", self.rows, self.cols, self.field)?;
        if self.rows <= 16 && self.cols <= 16 {
            for r in 0..self.rows {
                let cells: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
                writeln!(f, "  [{}]", cells.join(", "))?;
            }
        } else {
            writeln!(f, "  {} nonzeros", self.nnz())?;
        }
        Ok(())
    }
}
