use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::census::Census;
use crate::error::{Error, Result};
use crate::linalg::{Dyadic, FieldSpec};

/// A closed interval with exact rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bracket {
    pub lower: BigRational,
    pub upper: BigRational,
}

impl Bracket {
    pub fn exact(x: BigRational) -> Self {
        Bracket { lower: x.clone(), upper: x }
    }

    pub fn width(&self) -> BigRational {
        &self.upper - &self.lower
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lower <= x && x <= &self.upper
    }

    pub fn contains_bracket(&self, inner: &Bracket) -> bool {
        self.lower <= inner.lower && inner.upper <= self.upper
    }

    /// True when the width is below `2^-bits`.
    pub fn narrower_than_pow2(&self, bits: u32) -> bool {
        self.width() < BigRational::new(BigInt::one(), BigInt::one() << bits)
    }

    pub fn midpoint_f64(&self) -> f64 {
        ((&self.lower + &self.upper) / BigInt::from(2)).to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Bracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lower, self.upper)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradientTerm {
    pub measure: Dyadic,
    pub size: usize,
    pub kernel_dim: usize,
}

/// Terms `μ(supp G_i)/|G_i| · dim ker M(G_i)` plus a bound on the measure not covered by them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradientSeries {
    pub terms: Vec<GradientTerm>,
    pub tail: Dyadic,
    /// columns of the operator; bounds `dim ker M / |G|`
    pub max_columns: usize,
}

impl GradientSeries {
    pub fn new(terms: Vec<GradientTerm>, tail: Dyadic, max_columns: usize) -> Self {
        GradientSeries { terms, tail, max_columns }
    }

    pub fn covered_measure(&self) -> Dyadic {
        self.terms.iter().map(|t| &t.measure).sum()
    }
}

pub fn gradient_series(s: &GradientSeries) -> Result<Bracket> {
    let covered = s.covered_measure();
    let one = Dyadic::from_int(1);
    if covered > one {
        return Err(Error::InconsistentTail(format!("listed measures sum to {covered} > 1")));
    }
    if s.tail.numerator().is_negative() || &s.tail + &covered < one {
        return Err(Error::InconsistentTail(format!("tail {} is below 1 - {covered}", s.tail)));
    }
    let mut lower = BigRational::zero();
    for t in &s.terms {
        if !t.measure.numerator().is_positive() || t.size == 0 {
            return Err(Error::InconsistentTail("terms need positive measure and size".into()));
        }
        if t.kernel_dim > 0 {
            lower += t.measure.to_rational() * BigRational::new(BigInt::from(t.kernel_dim), BigInt::from(t.size));
        }
    }
    let upper = &lower + s.tail.to_rational() * BigInt::from(s.max_columns);
    Ok(Bracket { lower, upper })
}

/// The path components of the lamplighter operator: `k` vertices, measure `k/2^{k+1}`, kernel
/// dimension `k mod 2`.
pub fn lamplighter_parity_series(kmax: usize) -> GradientSeries {
    let terms: Vec<GradientTerm> = (1..=kmax)
        .map(|k| GradientTerm { measure: Dyadic::new(k as i64, (k + 1) as u32), size: k, kernel_dim: k % 2 })
        .collect();
    let tail = Dyadic::new((kmax + 2) as i64, (kmax + 1) as u32);
    GradientSeries::new(terms, tail, 1)
}

/// One term per interior census component, with the boundary mass as tail.
pub fn series_from_census(c: &Census, field: FieldSpec) -> Result<GradientSeries> {
    let dims = c.kernel_dims(field)?;
    let terms = c
        .types
        .iter()
        .zip(dims)
        .map(|(t, kernel_dim)| GradientTerm { measure: t.measure.clone(), size: t.vertices, kernel_dim })
        .collect();
    Ok(GradientSeries::new(terms, c.boundary_measure.clone(), 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn third() -> BigRational {
        BigRational::new(1.into(), 3.into())
    }

    #[test]
    fn empty_series() {
        let b = gradient_series(&GradientSeries::new(Vec::new(), Dyadic::from_int(0), 1));
        assert!(b.is_err());
        let b = gradient_series(&GradientSeries::new(Vec::new(), Dyadic::from_int(1), 0)).unwrap();
        assert_eq!(b, Bracket::exact(BigRational::zero()));
    }

    #[test]
    fn parity_series_brackets_one_third() {
        let mut prev: Option<Bracket> = None;
        for k in [10, 20, 40] {
            let b = gradient_series(&lamplighter_parity_series(k)).unwrap();
            assert!(b.contains(&third()));
            if let Some(p) = prev {
                assert!(p.contains_bracket(&b));
            }
            prev = Some(b);
        }
        assert!(prev.unwrap().narrower_than_pow2(35));
    }

    #[test]
    fn inconsistent_tail() {
        let mut s = lamplighter_parity_series(5);
        s.tail = Dyadic::pow2_inv(10);
        assert!(matches!(gradient_series(&s), Err(Error::InconsistentTail(_))));
    }
}
