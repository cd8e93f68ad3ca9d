//! Exact closed-form values and the truncated series they come from.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::families::{family_kernel_dim, FamilyParams};
use crate::linalg::{is_prime, Dyadic, FieldSpec};
use crate::tgraph::{gradient_series, Bracket, GradientSeries, GradientTerm};

/// Powers of 2 modulo an odd prime `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharData {
    pub p: u64,
    /// multiplicative order of 2
    pub ord2: u64,
    /// representatives in `{2, …, p+1}` of the residues that are powers of 2
    pub l: BTreeSet<u64>,
    /// least `e ≥ 0` with `2^e ≡ x`
    pub r: BTreeMap<u64, u64>,
}

impl CharData {
    /// `Σ_{x ∈ L} 2^{-(x + r(x))}`.
    pub fn weight_sum(&self) -> Dyadic {
        self.l.iter().map(|x| Dyadic::pow2_inv((x + self.r[x]) as u32)).sum()
    }
}

fn check_odd_prime(p: u64) -> Result<()> {
    if p == 2 {
        return Err(Error::CharacteristicTwo);
    }
    if !is_prime(p) {
        return Err(Error::BadCharacteristic(p));
    }
    Ok(())
}

pub fn char_data(p: u64) -> Result<CharData> {
    check_odd_prime(p)?;
    let mut r = BTreeMap::new();
    let mut l = BTreeSet::new();
    let mut x = 1u64;
    let mut e = 0u64;
    loop {
        // the representative of residue x in {2, …, p+1}
        let rep = if x < 2 { x + p } else { x };
        l.insert(rep);
        r.insert(rep, e);
        x = x * 2 % p;
        e += 1;
        if x == 1 {
            break;
        }
    }
    Ok(CharData { p, ord2: e, l, r })
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn pow2(e: u64) -> BigInt {
    BigInt::one() << e
}

/// `47/64 + 1/(128(2^o − 1)) + (1/64)·2^p/(2^p − 1)·2^o/(2^o − 1)·Σ_{x∈L} 2^{-(x+r(x))}`, times
/// 1344 if asked.
pub fn eval_thm13(p: u64, with_1344: bool) -> Result<BigRational> {
    let c = char_data(p)?;
    let one = BigInt::one();
    let o = pow2(c.ord2);
    let pp = pow2(p);
    let middle = BigRational::new(one.clone(), BigInt::from(128) * (&o - &one));
    let last = BigRational::new(&pp * &o, BigInt::from(64) * (&pp - &one) * (&o - &one)) * c.weight_sum().to_rational();
    let v = rat(47, 64) + middle + last;
    Ok(if with_1344 { v * BigInt::from(1344) } else { v })
}

/// `1/64 − (1/8) Σ_{k=1}^{K} 2^{-(k²+4k+6)}`, bracketed from below by the first omitted term
/// doubled.
pub fn eval_thm12_partial(k_max: u64) -> Bracket {
    let s: Dyadic = (1..=k_max).map(|k| Dyadic::pow2_inv((k * k + 4 * k + 6) as u32)).sum();
    let upper = (&Dyadic::pow2_inv(6) - &(&s * &Dyadic::pow2_inv(3))).to_rational();
    let k = k_max + 1;
    let tail = Dyadic::pow2_inv((3 + k * k + 4 * k + 5) as u32).to_rational();
    Bracket { lower: &upper - tail, upper }
}

/// `1/64 − (2/8³) Σ_{i∈Σ} 2^{-i}`.
pub fn eval_sigma(sigma: &BTreeSet<u32>) -> Dyadic {
    let s: Dyadic = sigma.iter().map(|&i| Dyadic::pow2_inv(i)).sum();
    &Dyadic::pow2_inv(6) - &(&s * &Dyadic::pow2_inv(8))
}

/// `47/64 + (1/64) Σ_{k=1}^{K} 2^{-(k+2^k)}` with the doubled first omitted term as tail.
pub fn eval_q_gradient_partial(k_max: u32) -> Result<Bracket> {
    if k_max > 30 {
        return Err(Error::Invalid("truncation above 30 has exponents beyond 2^31".into()));
    }
    let s: Dyadic = (1..=k_max).map(|k| Dyadic::pow2_inv(k + (1u32 << k))).sum();
    let lower = (&Dyadic::new(47, 6) + &(&s * &Dyadic::pow2_inv(6))).to_rational();
    let k = k_max + 1;
    let tail = Dyadic::pow2_inv(6 + k + (1u32 << k) - 1).to_rational();
    Ok(Bracket { upper: &lower + tail, lower })
}

/// Which normalization of the `G3(k,l)` support measure to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum G3Measure {
    /// `(2k+2l+2)/2^{k+l}`, as printed in the list of measures
    Verbatim,
    /// `(2k+2l+2)/(64·2^{k+l})`, consistent with the normalized series
    Corrected,
}

pub fn g1_measure(k: u64) -> Dyadic {
    Dyadic::new(2 * k as i64, 6 + k as u32)
}

pub fn g2_measure(l: u64) -> Dyadic {
    Dyadic::new(2 * l as i64 + 1, 6 + l as u32)
}

pub fn g3_measure(k: u64, l: u64, which: G3Measure) -> Dyadic {
    let shift = match which {
        G3Measure::Verbatim => 0,
        G3Measure::Corrected => 6,
    };
    Dyadic::new((2 * k + 2 * l + 2) as i64, shift + (k + l) as u32)
}

pub fn u_measure() -> Dyadic {
    Dyadic::new(45, 6)
}

/// `μ(U) + Σ_k μ(G1(k)) + Σ_l μ(G2(l)) + Σ_{k,l} μ(G3(k,l))` over the cutoffs.
pub fn thm58_total_measure(kmax: u64, lmax: u64, which: G3Measure) -> Dyadic {
    let mut total = u_measure();
    total = &total + &(1..=kmax).map(g1_measure).sum::<Dyadic>();
    total = &total + &(1..=lmax).map(g2_measure).sum::<Dyadic>();
    for k in 1..=kmax {
        total = &total + &(1..=lmax).map(|l| g3_measure(k, l, which)).sum::<Dyadic>();
    }
    total
}

/// Terms of the three-family series over `GF(p)`: `U` is counted with full kernel, then every
/// `G1(k)`, `G2(l)`, `G3(k,l)` within the cutoffs with its closed-form kernel dimension.
pub fn thm58_series(p: u64, kmax: u64, lmax: u64, which: G3Measure) -> Result<GradientSeries> {
    check_odd_prime(p)?;
    let field = FieldSpec::prime(p)?;
    let mut terms = vec![GradientTerm { measure: u_measure(), size: 1, kernel_dim: 1 }];
    for k in 1..=kmax {
        let fam = FamilyParams::G1 { k: k as usize };
        terms.push(GradientTerm { measure: g1_measure(k), size: fam.vertex_count(), kernel_dim: family_kernel_dim(fam, field) });
    }
    for l in 1..=lmax {
        let fam = FamilyParams::G2 { l: l as usize };
        terms.push(GradientTerm { measure: g2_measure(l), size: fam.vertex_count(), kernel_dim: family_kernel_dim(fam, field) });
    }
    for k in 1..=kmax {
        for l in 1..=lmax {
            let fam = FamilyParams::G3 { k: k as usize, l: l as usize };
            terms.push(GradientTerm {
                measure: g3_measure(k, l, which),
                size: fam.vertex_count(),
                kernel_dim: family_kernel_dim(fam, field),
            });
        }
    }
    let covered: Dyadic = terms.iter().map(|t| &t.measure).sum();
    let tail = if covered > Dyadic::from_int(1) { Dyadic::zero() } else { &Dyadic::from_int(1) - &covered };
    Ok(GradientSeries::new(terms, tail, 1))
}

/// The truncated three-family series with the corrected measures; the width is the uncovered
/// measure.
pub fn eval_thm58_series(p: u64, kmax: u64, lmax: u64) -> Result<Bracket> {
    gradient_series(&thm58_series(p, kmax, lmax, G3Measure::Corrected)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn char_data_examples() {
        let c = char_data(3).unwrap();
        assert_eq!(c.ord2, 2);
        assert_eq!(c.l, BTreeSet::from([2, 4]));
        assert_eq!((c.r[&2], c.r[&4]), (1, 0));
        assert_eq!(char_data(7).unwrap().ord2, 3);
        let c = char_data(5).unwrap();
        assert_eq!(c.l, BTreeSet::from([2, 3, 4, 6]));
        assert_eq!(c.r, BTreeMap::from([(2, 1), (3, 3), (4, 2), (6, 0)]));
        assert_eq!(c.weight_sum(), Dyadic::new(11, 6));
        assert!(char_data(2).is_err());
        assert!(char_data(9).is_err());
    }

    #[test]
    fn thm13_at_three() {
        assert_eq!(eval_thm13(3, false).unwrap(), rat(47, 64) + rat(1, 384) + rat(1, 224));
        assert_eq!(eval_thm13(3, true).unwrap(), (rat(47, 64) + rat(1, 384) + rat(1, 224)) * BigInt::from(1344));
    }

    #[test]
    fn thm12_brackets() {
        let b0 = eval_thm12_partial(0);
        assert_eq!(b0.upper, rat(1, 64));
        let b1 = eval_thm12_partial(1);
        assert_eq!(b1.upper, rat(1, 64) - rat(1, 8) * rat(1, 2048));
        assert!(b0.contains_bracket(&b1));
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(eval_sigma(&BTreeSet::new()), Dyadic::pow2_inv(6));
        assert_eq!(eval_sigma(&BTreeSet::from([0])), Dyadic::new(3, 8));
        assert_eq!(eval_sigma(&BTreeSet::from([1, 2])), &Dyadic::pow2_inv(6) - &Dyadic::new(3, 10));
    }

    #[test]
    fn q_gradient() {
        let b = eval_q_gradient_partial(1).unwrap();
        assert_eq!(b.lower, rat(47, 64) + rat(1, 64) * rat(1, 8));
        assert!(b.contains_bracket(&eval_q_gradient_partial(2).unwrap()));
    }

    #[test]
    fn single_series() {
        // first series alone for p = 3 is 1/384
        let field = FieldSpec::prime(3).unwrap();
        let s: BigRational = (1..=60u64)
            .map(|k| {
                let d = family_kernel_dim(FamilyParams::G1 { k: k as usize }, field);
                g1_measure(k).to_rational() * rat(d as i64, 2 * k as i64)
            })
            .sum();
        assert!((s - rat(1, 384)) < rat(1, 1 << 50));
    }

    #[test]
    fn series_matches_closed_form() {
        for p in [3, 5, 7] {
            let b = eval_thm58_series(p, 40, 40).unwrap();
            assert!(b.contains(&eval_thm13(p, false).unwrap()), "p = {p}: {b}");
        }
    }
}
