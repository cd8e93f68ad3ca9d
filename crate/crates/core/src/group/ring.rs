use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::element::GroupElement;
use super::spec::GroupSpec;
use crate::error::{Error, Result};
use crate::linalg::{Coefficient, Dyadic, ExactScalar, FieldSpec};

/// Finitely supported map `Γ ⋉ A → C`. Zero coefficients are never stored.
#[derive(Clone, PartialEq)]
pub struct GroupRingElement<C = Dyadic> {
    group: Arc<GroupSpec>,
    terms: BTreeMap<GroupElement, C>,
}

pub(crate) fn same_group(a: &Arc<GroupSpec>, b: &Arc<GroupSpec>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::GroupMismatch(format!("{a:?} vs {b:?}")))
    }
}

impl<C: Coefficient> GroupRingElement<C> {
    pub fn zero(group: &Arc<GroupSpec>) -> Self {
        GroupRingElement { group: group.clone(), terms: BTreeMap::new() }
    }

    pub fn monomial(group: &Arc<GroupSpec>, g: GroupElement, c: C) -> Self {
        let mut x = Self::zero(group);
        x.add_term(g, c);
        x
    }

    pub fn from_terms(group: &Arc<GroupSpec>, terms: impl IntoIterator<Item = (GroupElement, C)>) -> Self {
        let mut x = Self::zero(group);
        for (g, c) in terms {
            x.add_term(g, c);
        }
        x
    }

    pub fn group(&self) -> &Arc<GroupSpec> {
        &self.group
    }

    pub fn add_term(&mut self, g: GroupElement, c: C) {
        debug_assert!(self.group.contains(&g), "{g:?} not in group");
        if c.is_zero_coeff() {
            return;
        }
        match self.terms.get_mut(&g) {
            Some(old) => {
                let s = old.add_coeff(&c);
                if s.is_zero_coeff() {
                    self.terms.remove(&g);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(g, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, g: &GroupElement) -> Option<&C> {
        self.terms.get(g)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GroupElement, &C)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &GroupElement> {
        self.terms.keys()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Supported in the abelian part `A`.
    pub fn in_a(&self) -> bool {
        self.terms.keys().all(GroupElement::in_a)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        same_group(&self.group, &rhs.group)?;
        let mut out = self.clone();
        for (g, c) in &rhs.terms {
            out.add_term(g.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        GroupRingElement {
            group: self.group.clone(),
            terms: self.terms.iter().map(|(g, c)| (g.clone(), c.neg_coeff())).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.add(&rhs.neg())
    }

    pub fn scale(&self, s: &C) -> Self {
        let mut out = Self::zero(&self.group);
        for (g, c) in &self.terms {
            out.add_term(g.clone(), s.mul_coeff(c));
        }
        out
    }

    /// Product in the group ring: the bilinear extension of the group law.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        same_group(&self.group, &rhs.group)?;
        let mut out = Self::zero(&self.group);
        for (g, a) in &self.terms {
            for (h, b) in &rhs.terms {
                out.add_term(self.group.mul(g, h), a.mul_coeff(b));
            }
        }
        Ok(out)
    }

    /// Left translate `g·x`.
    pub fn left_translate(&self, g: &GroupElement) -> Self {
        let mut out = Self::zero(&self.group);
        for (h, c) in &self.terms {
            out.add_term(self.group.mul(g, h), c.clone());
        }
        out
    }

    /// Conjugate `γ x γ⁻¹`.
    pub fn conjugate(&self, gamma: &GroupElement) -> Self {
        let mut out = Self::zero(&self.group);
        for (h, c) in &self.terms {
            out.add_term(self.group.conjugate(gamma, h), c.clone());
        }
        out
    }

    /// Same coefficients, reinterpreted in another group that contains these elements.
    pub fn regroup(&self, group: &Arc<GroupSpec>) -> Result<Self> {
        if let Some(g) = self.terms.keys().find(|g| !group.contains(g)) {
            return Err(Error::GroupMismatch(format!("{g:?} not in target group")));
        }
        Ok(GroupRingElement { group: group.clone(), terms: self.terms.clone() })
    }
}

impl GroupRingElement<Dyadic> {
    pub fn one(group: &Arc<GroupSpec>) -> Self {
        Self::monomial(group, group.identity(), Dyadic::from_int(1))
    }

    pub fn element(group: &Arc<GroupSpec>, g: GroupElement) -> Self {
        Self::monomial(group, g, Dyadic::from_int(1))
    }

    /// Coefficientwise image under the reduction map into `field`.
    pub fn reduce(&self, field: FieldSpec) -> GroupRingElement<ExactScalar> {
        let mut out = GroupRingElement::zero(&self.group);
        for (g, c) in &self.terms {
            out.add_term(g.clone(), field.reduce(c));
        }
        out
    }
}

impl<C: Coefficient> fmt::Display for GroupRingElement<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (g, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c} * {g}")?;
        }
        Ok(())
    }
}

impl<C: Coefficient> fmt::Debug for GroupRingElement<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupRingElement({self})")
    }
}

/// An `a × b` matrix with group-ring entries.
#[derive(Clone, PartialEq)]
pub struct GroupRingMatrix<C = Dyadic> {
    group: Arc<GroupSpec>,
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), GroupRingElement<C>>,
}

impl<C: Coefficient> GroupRingMatrix<C> {
    pub fn zeros(group: &Arc<GroupSpec>, rows: usize, cols: usize) -> Self {
        GroupRingMatrix { group: group.clone(), rows, cols, entries: BTreeMap::new() }
    }

    pub fn scalar(x: GroupRingElement<C>) -> Self {
        let mut m = Self::zeros(x.group(), 1, 1);
        m.set(0, 0, x).expect("1x1 slot");
        m
    }

    pub fn from_rows(group: &Arc<GroupSpec>, rows: Vec<Vec<GroupRingElement<C>>>) -> Result<Self> {
        let ncols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(group, rows.len(), ncols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != ncols {
                return Err(Error::Shape("ragged group-ring matrix".into()));
            }
            for (j, x) in row.into_iter().enumerate() {
                m.set(i, j, x)?;
            }
        }
        Ok(m)
    }

    pub fn group(&self) -> &Arc<GroupSpec> {
        &self.group
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn set(&mut self, i: usize, j: usize, x: GroupRingElement<C>) -> Result<()> {
        if i >= self.rows || j >= self.cols {
            return Err(Error::Shape(format!("({i},{j}) outside {}x{}", self.rows, self.cols)));
        }
        same_group(&self.group, x.group())?;
        if x.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), x);
        }
        Ok(())
    }

    pub fn get(&self, i: usize, j: usize) -> GroupRingElement<C> {
        self.entries.get(&(i, j)).cloned().unwrap_or_else(|| GroupRingElement::zero(&self.group))
    }

    /// Nonzero entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &GroupRingElement<C>)> {
        self.entries.iter().map(|((i, j), x)| (*i, *j, x))
    }

    /// Union of the supports of all entries.
    pub fn support(&self) -> Vec<GroupElement> {
        let mut s: Vec<GroupElement> =
            self.entries.values().flat_map(|x| x.support().cloned()).collect();
        s.sort();
        s.dedup();
        s
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!("{}x{} times {}x{}", self.rows, self.cols, rhs.rows, rhs.cols)));
        }
        same_group(&self.group, &rhs.group)?;
        let mut out = Self::zeros(&self.group, self.rows, rhs.cols);
        for (&(i, k), a) in &self.entries {
            for j in 0..rhs.cols {
                if let Some(b) = rhs.entries.get(&(k, j)) {
                    let cur = out.get(i, j);
                    out.set(i, j, cur.add(&a.mul(b)?)?)?;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(Error::Shape("addition of differently shaped matrices".into()));
        }
        same_group(&self.group, &rhs.group)?;
        let mut out = self.clone();
        for (&(i, j), b) in &rhs.entries {
            let cur = out.get(i, j);
            out.set(i, j, cur.add(b)?)?;
        }
        Ok(out)
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, rhs: &Self) -> Result<Self> {
        same_group(&self.group, &rhs.group)?;
        let mut out = Self::zeros(&self.group, self.rows + rhs.rows, self.cols + rhs.cols);
        for (i, j, x) in self.entries() {
            out.set(i, j, x.clone())?;
        }
        for (i, j, x) in rhs.entries() {
            out.set(self.rows + i, self.cols + j, x.clone())?;
        }
        Ok(out)
    }

    pub fn regroup(&self, group: &Arc<GroupSpec>) -> Result<Self> {
        let mut out = Self::zeros(group, self.rows, self.cols);
        for (i, j, x) in self.entries() {
            out.set(i, j, x.regroup(group)?)?;
        }
        Ok(out)
    }
}

impl GroupRingMatrix<Dyadic> {
    pub fn identity(group: &Arc<GroupSpec>, n: usize) -> Self {
        let mut m = Self::zeros(group, n, n);
        for i in 0..n {
            m.set(i, i, GroupRingElement::one(group)).expect("diagonal slot");
        }
        m
    }

    /// Matrix with scalar (identity-supported) entries.
    pub fn from_scalars(group: &Arc<GroupSpec>, rows: &[Vec<Dyadic>]) -> Result<Self> {
        let grid = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|c| GroupRingElement::monomial(group, group.identity(), c.clone()))
                    .collect()
            })
            .collect();
        Self::from_rows(group, grid)
    }
}

impl<C: Coefficient> fmt::Display for GroupRingMatrix<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

impl<C: Coefficient> fmt::Debug for GroupRingMatrix<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupRingMatrix{}x{}({self})", self.rows, self.cols)
    }
}
