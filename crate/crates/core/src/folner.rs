//! Følner boxes `Φ·F` in `Γ ⋉ A` and the brute-force kernel-gradient estimator.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::{compression_matrix, GroupElement, GroupRingMatrix, GroupSpec};
use crate::linalg::{kernel_dim, FieldSpec};

/// Boxes larger than this are refused.
pub const MAX_BOX_SIZE: usize = 1 << 22;

/// The set `Φ·F ⊂ Γ ⋉ A` where `Φ` is a product of shift intervals times the whole automorphism
/// group and `F ⊂ A` holds the lamp configurations supported in the per-track windows together
/// with the whole finite part.
///
/// Intervals and windows are half-open `[lo, hi)`.
#[derive(Clone, PartialEq, Eq)]
pub struct FolnerBox {
    group: Arc<GroupSpec>,
    intervals: Vec<(i64, i64)>,
    windows: Vec<(i64, i64)>,
    label: String,
    // derived
    window_offsets: Vec<u32>,
    lamp_bits: u32,
    size: usize,
}

fn centered(n: usize) -> (i64, i64) {
    let lo = -((n / 2) as i64);
    (lo, lo + n as i64)
}

impl FolnerBox {
    pub fn new(group: &Arc<GroupSpec>, intervals: Vec<(i64, i64)>, windows: Vec<(i64, i64)>) -> Result<Self> {
        let d = group.shift_rank();
        if intervals.len() != d || windows.len() != d {
            return Err(Error::Shape(format!("box needs {d} intervals and {d} windows")));
        }
        if intervals.iter().any(|(lo, hi)| hi <= lo) {
            return Err(Error::Invalid("empty shift interval".into()));
        }
        if windows.iter().any(|(lo, hi)| hi < lo) {
            return Err(Error::Invalid("negative lamp window".into()));
        }
        let mut window_offsets = Vec::with_capacity(d);
        let mut lamp_bits = 0u32;
        for (lo, hi) in &windows {
            window_offsets.push(lamp_bits);
            lamp_bits += (hi - lo) as u32;
        }
        let finite = group.finite_bits() as u32;
        if lamp_bits + finite > 40 {
            return Err(Error::WindowCap { size: (lamp_bits + finite) as usize, cap: 40 });
        }
        let mut size: usize = group.aut().order() << (lamp_bits + finite);
        for (lo, hi) in &intervals {
            size = size.saturating_mul((hi - lo) as usize);
        }
        if size > MAX_BOX_SIZE {
            return Err(Error::Invalid(format!("box of {size} elements exceeds {MAX_BOX_SIZE}")));
        }
        let iv: Vec<String> = intervals.iter().map(|(a, b)| format!("[{a},{b})")).collect();
        let wv: Vec<String> = windows.iter().map(|(a, b)| format!("[{a},{b})")).collect();
        let label = format!("{}x{}", iv.join("x"), wv.join("x"));
        Ok(FolnerBox { group: group.clone(), intervals, windows, label, window_offsets, lamp_bits, size })
    }

    /// Intervals of length `n` and windows of length `m` around the origin, in every coordinate.
    /// The descriptor is `n:m`.
    pub fn centered(group: &Arc<GroupSpec>, n: usize, m: usize) -> Result<Self> {
        let d = group.shift_rank();
        let mut b = Self::new(group, vec![centered(n); d], vec![centered(m); d])?;
        b.label = format!("{n}:{m}");
        Ok(b)
    }

    /// Parses `n:m` into a centered box.
    pub fn parse(group: &Arc<GroupSpec>, s: &str) -> Result<Self> {
        let (n, m) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("box {s:?} is not of the form n:m")))?;
        let n: usize = n.trim().parse().map_err(|_| Error::Parse(format!("bad interval length in {s:?}")))?;
        let m: usize = m.trim().parse().map_err(|_| Error::Parse(format!("bad window length in {s:?}")))?;
        if n == 0 {
            return Err(Error::Invalid("interval length must be positive".into()));
        }
        Self::centered(group, n, m)
    }

    pub fn group(&self) -> &Arc<GroupSpec> {
        &self.group
    }

    pub fn intervals(&self) -> &[(i64, i64)] {
        &self.intervals
    }

    pub fn windows(&self) -> &[(i64, i64)] {
        &self.windows
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    fn aut_order(&self) -> usize {
        self.group.aut().order()
    }

    fn fin_bits(&self) -> u32 {
        self.group.finite_bits() as u32
    }

    /// Index of the shift vector within the product of intervals, lexicographic.
    fn shift_index(&self, s: &[i64]) -> Option<usize> {
        let mut idx = 0usize;
        for (x, (lo, hi)) in s.iter().zip(&self.intervals) {
            if x < lo || x >= hi {
                return None;
            }
            idx = idx * (hi - lo) as usize + (x - lo) as usize;
        }
        Some(idx)
    }

    fn shift_of_index(&self, mut idx: usize) -> Vec<i64> {
        let mut s = vec![0; self.intervals.len()];
        for (k, (lo, hi)) in self.intervals.iter().enumerate().rev() {
            let len = (hi - lo) as usize;
            s[k] = lo + (idx % len) as i64;
            idx /= len;
        }
        s
    }

    /// Basis order: shift vector, automorphism, lamp configuration, finite part.
    fn pack(&self, shift_idx: usize, aut: usize, lamp_mask: u64, fin: u64) -> usize {
        (((shift_idx * self.aut_order() + aut) << self.lamp_bits | lamp_mask as usize) << self.fin_bits())
            | fin as usize
    }

    fn unpack(&self, i: usize) -> (usize, usize, u64, u64) {
        let fin = (i & ((1 << self.fin_bits()) - 1)) as u64;
        let rest = i >> self.fin_bits();
        let mask = (rest & ((1usize << self.lamp_bits) - 1)) as u64;
        let rest = rest >> self.lamp_bits;
        (rest / self.aut_order(), rest % self.aut_order(), mask, fin)
    }

    fn mask_of(&self, lamps: &[BTreeSet<i64>], shift: &[i64]) -> Option<u64> {
        let mut mask = 0u64;
        for (k, sites) in lamps.iter().enumerate() {
            let (lo, hi) = self.windows[k];
            for &x in sites {
                let y = x - shift[k];
                if y < lo || y >= hi {
                    return None;
                }
                mask |= 1 << (self.window_offsets[k] + (y - lo) as u32);
            }
        }
        Some(mask)
    }

    /// The `i`-th element `φ·a`, returned in normal form `(φ.a) φ`.
    pub fn element(&self, i: usize) -> GroupElement {
        let (si, aut, mask, fin) = self.unpack(i);
        let shift = self.shift_of_index(si);
        let mut lamps = vec![BTreeSet::new(); self.windows.len()];
        for (k, (lo, hi)) in self.windows.iter().enumerate() {
            for j in 0..(hi - lo) {
                if mask >> (self.window_offsets[k] + j as u32) & 1 == 1 {
                    lamps[k].insert(lo + j + shift[k]);
                }
            }
        }
        let finite = self.group.aut().apply(aut, fin);
        GroupElement::from_parts(shift, aut, lamps, finite)
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.size).map(|i| self.element(i))
    }

    /// Position of `x` in the basis order, if `x` lies in the box.
    pub fn index_of(&self, x: &GroupElement) -> Option<usize> {
        let si = self.shift_index(x.shift_vector())?;
        let aut = x.aut_index();
        let mask = self.mask_of(x.lamps(), x.shift_vector())?;
        let aut_g = self.group.aut();
        let fin = aut_g.apply(aut_g.inv(aut), x.finite_bits());
        Some(self.pack(si, aut, mask, fin))
    }

    /// Index of `h·x` where `x` is the `i`-th element, computed in box coordinates.
    ///
    /// With `x = φ·a` and `h = c·γ`, the product is `φ'·(a + φ'⁻¹.c)` where `φ' = γφ`.
    pub fn left_mul_index(&self, h: &GroupElement, i: usize) -> Option<usize> {
        let (si, aut, mask, fin) = self.unpack(i);
        let shift = self.shift_of_index(si);
        let new_shift: Vec<i64> = shift.iter().zip(h.shift_vector()).map(|(a, b)| a + b).collect();
        let new_si = self.shift_index(&new_shift)?;
        let aut_g = self.group.aut();
        let new_aut = aut_g.mul(h.aut_index(), aut);
        let delta = self.mask_of(h.lamps(), &new_shift)?;
        let dfin = aut_g.apply(aut_g.inv(new_aut), h.finite_bits());
        Some(self.pack(new_si, new_aut, mask ^ delta, fin ^ dfin))
    }
}

impl fmt::Debug for FolnerBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FolnerBox({}, {} elements)", self.label, self.size)
    }
}

impl fmt::Display for FolnerBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)
    }
}

/// Parses `n1:m1,n2:m2,...`.
pub fn parse_schedule(group: &Arc<GroupSpec>, s: &str) -> Result<Vec<FolnerBox>> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(|p| FolnerBox::parse(group, p)).collect()
}

/// `|Σ·B \ B| / |B|`.
pub fn boundary_ratio(b: &FolnerBox, sigma: &[GroupElement]) -> BigRational {
    let outside: HashSet<GroupElement> = (0..b.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            sigma
                .iter()
                .filter(move |h| b.left_mul_index(h, i).is_none())
                .map(move |h| b.group().mul(h, &b.element(i)))
        })
        .collect();
    BigRational::new(BigInt::from(outside.len()), BigInt::from(b.len()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimateRow {
    pub label: String,
    pub size: usize,
    pub kernel_dim: usize,
    pub estimate: BigRational,
    /// boundary ratio of the box with respect to the support of the operator
    pub epsilon: BigRational,
}

impl EstimateRow {
    pub fn estimate_f64(&self) -> f64 {
        self.estimate.to_f64().unwrap_or(f64::NAN)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimateTrace {
    pub rows: Vec<EstimateRow>,
}

impl EstimateTrace {
    pub fn last(&self) -> Option<&EstimateRow> {
        self.rows.last()
    }

    /// Largest pairwise difference among the last `k` estimates.
    pub fn spread_of_last(&self, k: usize) -> Option<f64> {
        if self.rows.len() < k || k == 0 {
            return None;
        }
        let tail: Vec<f64> = self.rows[self.rows.len() - k..].iter().map(EstimateRow::estimate_f64).collect();
        let max = tail.iter().cloned().fold(f64::MIN, f64::max);
        let min = tail.iter().cloned().fold(f64::MAX, f64::min);
        Some(max - min)
    }
}

/// `dim ker T_B / |B|` for every box of the schedule, evaluated in parallel.
pub fn gradient_estimate(t: &GroupRingMatrix, schedule: &[FolnerBox], field: FieldSpec) -> Result<EstimateTrace> {
    if schedule.is_empty() {
        return Err(Error::Invalid("empty box schedule".into()));
    }
    let support = t.support();
    let rows = schedule
        .par_iter()
        .map(|b| {
            let m = compression_matrix(t, b, field)?;
            let dim = kernel_dim(&m);
            Ok(EstimateRow {
                label: b.label().to_string(),
                size: b.len(),
                kernel_dim: dim,
                estimate: BigRational::new(BigInt::from(dim), BigInt::from(b.len())),
                epsilon: boundary_ratio(b, &support),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EstimateTrace { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_roundtrip() {
        let g = Arc::new(GroupSpec::with_full_aut(1, 2).unwrap());
        let b = FolnerBox::centered(&g, 3, 2).unwrap();
        assert_eq!(b.len(), 3 * 6 * 4 * 4);
        for i in 0..b.len() {
            assert_eq!(b.index_of(&b.element(i)), Some(i));
        }
    }

    #[test]
    fn fast_left_multiplication_matches_group_law() {
        let g = Arc::new(GroupSpec::with_full_aut(1, 2).unwrap());
        let b = FolnerBox::centered(&g, 4, 3).unwrap();
        let hs = [
            GroupElement::shift(&g, 0, 1),
            GroupElement::lamp(&g, 0, 1),
            GroupElement::finite(&g, 0b10),
            GroupElement::aut(&g, 3),
            g.mul(&GroupElement::lamp(&g, 0, -1), &g.mul(&GroupElement::shift(&g, 0, -2), &GroupElement::aut(&g, 4))),
        ];
        for h in &hs {
            for i in 0..b.len() {
                let direct = b.index_of(&g.mul(h, &b.element(i)));
                assert_eq!(b.left_mul_index(h, i), direct, "{h:?} at {i}");
            }
        }
    }

    #[test]
    fn interval_boundary() {
        let g = Arc::new(GroupSpec::shifts(1).unwrap());
        let b = FolnerBox::centered(&g, 7, 0).unwrap();
        assert_eq!(boundary_ratio(&b, &[g.identity()]), BigRational::from_integer(0.into()));
        let t = GroupElement::shift(&g, 0, 1);
        assert_eq!(boundary_ratio(&b, &[t]), BigRational::new(1.into(), 7.into()));
    }

    #[test]
    fn small_lamplighter_estimates() {
        let t = crate::presets::lamplighter();
        let sched = parse_schedule(t.group(), "4:4,6:6").unwrap();
        let trace = gradient_estimate(&t, &sched, FieldSpec::prime(5).unwrap()).unwrap();
        assert_eq!(trace.rows[0].estimate, BigRational::new(1.into(), 4.into()));
        assert_eq!(trace.rows[1].estimate, BigRational::new(7.into(), 24.into()));
    }

    #[test]
    fn schedule_parsing() {
        let g = Arc::new(GroupSpec::lamplighter());
        let s = parse_schedule(&g, "2:2, 4:3").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[1].len(), 4 * 8);
        assert!(parse_schedule(&g, "4").is_err());
        assert!(parse_schedule(&g, "0:2").is_err());
    }
}
