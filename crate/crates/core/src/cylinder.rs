//! Cylinder functions on the dual of `A`, projections in `Z_2[A]`, and the dual `Γ`-action.
//!
//! A configuration on a window is a bit vector: bit `i` is the value of `window[i]`. The
//! character of `a ∈ A` evaluates to `(−1)^{x·a}`, so `u_s ↦ 1 − 2x_s`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupRingElement, GroupSpec};
use crate::linalg::{Dyadic, ExactScalar, FieldSpec};

/// Default cap on window size; tables have `2^w` entries.
pub const DEFAULT_WINDOW_CAP: usize = 24;

/// One coordinate of the dual: a lamp site on some track, or a bit of the finite part.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coord {
    Lamp { track: usize, pos: i64 },
    Finite(usize),
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coord::Lamp { track: 0, pos } => write!(f, "{pos}"),
            Coord::Lamp { track, pos } => write!(f, "{track}@{pos}"),
            Coord::Finite(b) => write!(f, "f{b}"),
        }
    }
}

/// Coordinates of `a ∈ A` that are nonzero.
fn coords_of(a: &GroupElement) -> Vec<Coord> {
    let mut out: Vec<Coord> = a
        .lamps()
        .iter()
        .enumerate()
        .flat_map(|(k, s)| s.iter().map(move |&pos| Coord::Lamp { track: k, pos }))
        .collect();
    out.extend((0..64).filter(|b| a.finite_bits() >> b & 1 == 1).map(Coord::Finite));
    out
}

fn check_cap(w: usize) -> Result<()> {
    if w > DEFAULT_WINDOW_CAP {
        return Err(Error::WindowCap { size: w, cap: DEFAULT_WINDOW_CAP });
    }
    Ok(())
}

/// Maps configurations on `small` (a subset of `big`) into positions of `big`.
fn embedding(small: &[Coord], big: &[Coord]) -> Vec<usize> {
    small.iter().map(|c| big.binary_search(c).expect("window is a subset")).collect()
}

fn restrict_index(x: usize, positions: &[usize]) -> usize {
    positions.iter().enumerate().fold(0, |acc, (i, &p)| acc | ((x >> p) & 1) << i)
}

fn union(a: &[Coord], b: &[Coord]) -> Vec<Coord> {
    let s: BTreeSet<Coord> = a.iter().chain(b).copied().collect();
    s.into_iter().collect()
}

/// A function `{0,1}^window → Z[1/2]`.
#[derive(Clone, PartialEq, Eq)]
pub struct CylinderFunction {
    window: Vec<Coord>,
    values: Vec<Dyadic>,
}

impl CylinderFunction {
    pub fn constant(c: Dyadic) -> Self {
        CylinderFunction { window: Vec::new(), values: vec![c] }
    }

    pub fn new(window: Vec<Coord>, values: Vec<Dyadic>) -> Result<Self> {
        let mut w = window.clone();
        w.sort();
        w.dedup();
        if w != window {
            return Err(Error::Invalid("window must be sorted and duplicate-free".into()));
        }
        check_cap(window.len())?;
        if values.len() != 1 << window.len() {
            return Err(Error::Shape(format!("{} values for a window of {}", values.len(), window.len())));
        }
        Ok(CylinderFunction { window, values })
    }

    pub fn window(&self) -> &[Coord] {
        &self.window
    }

    pub fn values(&self) -> &[Dyadic] {
        &self.values
    }

    /// Value at a configuration given as a map from coordinates to bits (missing means 0).
    pub fn eval(&self, x: &BTreeMap<Coord, bool>) -> Dyadic {
        let idx = self
            .window
            .iter()
            .enumerate()
            .fold(0usize, |acc, (i, c)| acc | (x.get(c).copied().unwrap_or(false) as usize) << i);
        self.values[idx].clone()
    }

    pub fn extend_to(&self, window: &[Coord]) -> Result<Self> {
        check_cap(window.len())?;
        let pos = embedding(&self.window, window);
        let values = (0..1usize << window.len()).map(|x| self.values[restrict_index(x, &pos)].clone()).collect();
        Ok(CylinderFunction { window: window.to_vec(), values })
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        let w = union(&self.window, &rhs.window);
        let (a, b) = (self.extend_to(&w)?, rhs.extend_to(&w)?);
        let values = a.values.iter().zip(&b.values).map(|(x, y)| x * y).collect();
        Ok(CylinderFunction { window: w, values })
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        let w = union(&self.window, &rhs.window);
        let (a, b) = (self.extend_to(&w)?, rhs.extend_to(&w)?);
        let values = a.values.iter().zip(&b.values).map(|(x, y)| x + y).collect();
        Ok(CylinderFunction { window: w, values })
    }

    /// Equality as functions on the whole dual.
    pub fn same_function(&self, rhs: &Self) -> Result<bool> {
        let w = union(&self.window, &rhs.window);
        Ok(self.extend_to(&w)?.values == rhs.extend_to(&w)?.values)
    }

    pub fn is_projection(&self) -> bool {
        self.values.iter().all(|v| v.is_zero_value() || *v == Dyadic::from_int(1))
    }

    pub fn to_projection(&self) -> Result<Projection> {
        if !self.is_projection() {
            return Err(Error::Invalid("cylinder function is not {0,1}-valued".into()));
        }
        let bits = self.values.iter().map(|v| !v.is_zero_value()).collect();
        Ok(Projection::from_bools(self.window.clone(), bits))
    }

    /// The element of `Z[1/2][A]` whose dual is this function (inverse Walsh–Hadamard transform).
    pub fn to_element(&self, group: &Arc<GroupSpec>) -> Result<GroupRingElement> {
        let w = self.window.len();
        let mut coeffs = self.values.clone();
        walsh_hadamard(&mut coeffs);
        let mut out = GroupRingElement::zero(group);
        for (a, c) in coeffs.into_iter().enumerate() {
            if c.is_zero_value() {
                continue;
            }
            out.add_term(element_of_mask(group, &self.window, a)?, c.scale_pow2(-(w as i64)));
        }
        Ok(out)
    }
}

impl fmt::Debug for CylinderFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w: Vec<String> = self.window.iter().map(Coord::to_string).collect();
        write!(f, "CylinderFunction[{}]{:?}", w.join(","), self.values)
    }
}

trait IsZeroValue {
    fn is_zero_value(&self) -> bool;
}

impl IsZeroValue for Dyadic {
    fn is_zero_value(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
}

/// Unnormalized in-place transform `v_a ← Σ_x v_x (−1)^{x·a}`.
fn walsh_hadamard(v: &mut [Dyadic]) {
    let mut h = 1;
    while h < v.len() {
        for i in (0..v.len()).step_by(2 * h) {
            for j in i..i + h {
                let (a, b) = (v[j].clone(), v[j + h].clone());
                v[j] = &a + &b;
                v[j + h] = &a - &b;
            }
        }
        h *= 2;
    }
}

fn element_of_mask(group: &GroupSpec, window: &[Coord], mask: usize) -> Result<GroupElement> {
    let mut lamps = vec![BTreeSet::new(); group.shift_rank()];
    let mut finite = 0u64;
    for (i, c) in window.iter().enumerate() {
        if mask >> i & 1 == 0 {
            continue;
        }
        match *c {
            Coord::Lamp { track, pos } => {
                if track >= group.shift_rank() {
                    return Err(Error::GroupMismatch(format!("track {track} not in group")));
                }
                lamps[track].insert(pos);
            }
            Coord::Finite(b) => {
                if b >= group.finite_bits() {
                    return Err(Error::GroupMismatch(format!("finite bit {b} not in group")));
                }
                finite |= 1 << b;
            }
        }
    }
    Ok(GroupElement::from_parts(vec![0; group.shift_rank()], 0, lamps, finite))
}

/// Dual of an element supported in `A`: `x ↦ Σ_a f_a (−1)^{x·a}` on the window of its support.
pub fn hat(f: &GroupRingElement) -> Result<CylinderFunction> {
    if !f.in_a() {
        return Err(Error::NotInA);
    }
    let window: Vec<Coord> = {
        let s: BTreeSet<Coord> = f.support().flat_map(coords_of).collect();
        s.into_iter().collect()
    };
    check_cap(window.len())?;
    let mut values = vec![Dyadic::from_int(0); 1 << window.len()];
    for (a, c) in f.terms() {
        let mask = coords_of(a).iter().fold(0usize, |acc, c| acc | 1 << window.binary_search(c).expect("in window"));
        values[mask] = &values[mask] + c;
    }
    walsh_hadamard(&mut values);
    Ok(CylinderFunction { window, values })
}

/// Dual of an element with field coefficients, computed directly over the field.
pub fn hat_in_field(f: &GroupRingElement<ExactScalar>, field: FieldSpec) -> Result<(Vec<Coord>, Vec<ExactScalar>)> {
    if !f.support().all(GroupElement::in_a) {
        return Err(Error::NotInA);
    }
    let s: BTreeSet<Coord> = f.support().flat_map(coords_of).collect();
    let window: Vec<Coord> = s.into_iter().collect();
    check_cap(window.len())?;
    let masks: Vec<(usize, &ExactScalar)> = f
        .terms()
        .map(|(a, c)| {
            let m = coords_of(a).iter().fold(0usize, |acc, x| acc | 1 << window.binary_search(x).expect("in window"));
            (m, c)
        })
        .collect();
    let values = (0..1usize << window.len())
        .map(|x| {
            masks.iter().fold(field.zero(), |acc, (a, c)| {
                if (x & a).count_ones() % 2 == 0 {
                    acc.add(c)
                } else {
                    acc.sub(c)
                }
            })
        })
        .collect();
    Ok((window, values))
}

/// Relation between two projections.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// disjoint supports
    Orthogonal,
    /// support of the first contained in that of the second
    Subordinate,
    Neither,
}

/// A `{0,1}`-valued cylinder function, stored as a bitset over its window.
///
/// Always kept on the smallest window it depends on, so structural equality is equality of
/// functions.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Projection {
    window: Vec<Coord>,
    bits: Vec<u64>,
}

fn bitset_len(w: usize) -> usize {
    ((1usize << w) + 63) / 64
}

fn get_bit(bits: &[u64], i: usize) -> bool {
    bits[i / 64] >> (i % 64) & 1 == 1
}

fn set_bit(bits: &mut [u64], i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

impl Projection {
    /// The constant function 1.
    pub fn one() -> Self {
        Projection { window: Vec::new(), bits: vec![1] }
    }

    pub fn zero() -> Self {
        Projection { window: Vec::new(), bits: vec![0] }
    }

    /// Indicator of the single configuration `x` on `window`.
    pub fn atom(window: Vec<Coord>, x: usize) -> Self {
        let mut bits = vec![0; bitset_len(window.len())];
        set_bit(&mut bits, x);
        Projection { window, bits }.canonical()
    }

    /// Indicator of the cylinder fixing the given coordinates.
    pub fn cylinder(fixed: &[(Coord, bool)]) -> Result<Self> {
        let mut m: BTreeMap<Coord, bool> = BTreeMap::new();
        for &(c, v) in fixed {
            if m.insert(c, v).is_some_and(|old| old != v) {
                return Ok(Projection::zero());
            }
        }
        let window: Vec<Coord> = m.keys().copied().collect();
        check_cap(window.len())?;
        let x = m.values().enumerate().fold(0usize, |acc, (i, &v)| acc | (v as usize) << i);
        Ok(Projection::atom(window, x))
    }

    pub fn from_bools(window: Vec<Coord>, values: Vec<bool>) -> Self {
        let mut bits = vec![0; bitset_len(window.len())];
        for (i, v) in values.into_iter().enumerate() {
            if v {
                set_bit(&mut bits, i);
            }
        }
        Projection { window, bits }.canonical()
    }

    pub fn window(&self) -> &[Coord] {
        &self.window
    }

    pub fn contains(&self, x: usize) -> bool {
        get_bit(&self.bits, x)
    }

    /// Configurations on the window where the indicator is 1.
    pub fn support_points(&self) -> impl Iterator<Item = usize> + '_ {
        (0..1usize << self.window.len()).filter(|&x| self.contains(x))
    }

    pub fn count(&self) -> u64 {
        self.bits.iter().map(|b| b.count_ones() as u64).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }

    /// Haar measure of the support.
    pub fn measure(&self) -> Dyadic {
        Dyadic::new(self.count(), self.window.len() as u32)
    }

    /// Drops coordinates the indicator does not depend on.
    fn canonical(self) -> Self {
        let w = self.window.len();
        let mut keep = Vec::new();
        for i in 0..w {
            let depends = (0..1usize << w)
                .any(|x| x >> i & 1 == 0 && get_bit(&self.bits, x) != get_bit(&self.bits, x | 1 << i));
            if depends {
                keep.push(i);
            }
        }
        if keep.len() == w {
            return self;
        }
        let window: Vec<Coord> = keep.iter().map(|&i| self.window[i]).collect();
        let mut bits = vec![0; bitset_len(window.len())];
        for y in 0..1usize << window.len() {
            let x = keep.iter().enumerate().fold(0usize, |acc, (j, &i)| acc | ((y >> j) & 1) << i);
            if get_bit(&self.bits, x) {
                set_bit(&mut bits, y);
            }
        }
        Projection { window, bits }
    }

    /// Indicator table on a larger window.
    pub fn extend_to(&self, window: &[Coord]) -> Result<Vec<bool>> {
        check_cap(window.len())?;
        let pos = embedding(&self.window, window);
        Ok((0..1usize << window.len()).map(|x| self.contains(restrict_index(x, &pos))).collect())
    }

    fn combine(&self, rhs: &Self, op: impl Fn(bool, bool) -> bool) -> Result<Self> {
        let w = union(&self.window, &rhs.window);
        let (a, b) = (self.extend_to(&w)?, rhs.extend_to(&w)?);
        Ok(Projection::from_bools(w, a.iter().zip(&b).map(|(x, y)| op(*x, *y)).collect()))
    }

    /// Product `p·q` (intersection of supports).
    pub fn and(&self, rhs: &Self) -> Result<Self> {
        self.combine(rhs, |a, b| a && b)
    }

    /// `p + q − pq` (union of supports).
    pub fn or(&self, rhs: &Self) -> Result<Self> {
        self.combine(rhs, |a, b| a || b)
    }

    /// `1 − p`.
    pub fn complement(&self) -> Self {
        let vals = (0..1usize << self.window.len()).map(|x| !self.contains(x)).collect();
        Projection::from_bools(self.window.clone(), vals)
    }

    pub fn to_cylinder_function(&self) -> CylinderFunction {
        let values = (0..1usize << self.window.len())
            .map(|x| Dyadic::from_int(self.contains(x) as i64))
            .collect();
        CylinderFunction { window: self.window.clone(), values }
    }

    pub fn to_element(&self, group: &Arc<GroupSpec>) -> Result<GroupRingElement> {
        self.to_cylinder_function().to_element(group)
    }

    /// Text form in the cylinder literal grammar.
    pub fn to_literal(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .support_points()
            .map(|x| {
                let fixed: Vec<String> =
                    self.window.iter().enumerate().map(|(i, c)| format!("{c}:{}", x >> i & 1)).collect();
                format!("{{{}}}", fixed.join(", "))
            })
            .collect();
        parts.join(" | ")
    }
}

impl fmt::Debug for Projection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Projection({})", self.to_literal())
    }
}

impl fmt::Display for Projection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_literal())
    }
}

pub fn measure(p: &Projection) -> Dyadic {
    p.measure()
}

/// Orthogonal if the supports are disjoint, subordinate if the first support lies in the second.
pub fn proj_relate(p: &Projection, q: &Projection) -> Result<Relation> {
    let w = union(&p.window, &q.window);
    let (a, b) = (p.extend_to(&w)?, q.extend_to(&w)?);
    if a.iter().zip(&b).all(|(x, y)| !(x & y)) {
        Ok(Relation::Orthogonal)
    } else if a.iter().zip(&b).all(|(x, y)| !x || *y) {
        Ok(Relation::Subordinate)
    } else {
        Ok(Relation::Neither)
    }
}

/// The dual action of `Γ` on cylinder data, determined by the group.
///
/// `γ = (s, α)` sends the dual of `f` to the dual of `γ f γ⁻¹`: track-`k` coordinates move from
/// site `j` to `j + s_k`, and finite coordinates are pulled back along `αᵀ`.
#[derive(Clone, Debug)]
pub struct ActionSpec {
    group: Arc<GroupSpec>,
}

impl ActionSpec {
    pub fn new(group: &Arc<GroupSpec>) -> Self {
        ActionSpec { group: group.clone() }
    }

    pub fn group(&self) -> &Arc<GroupSpec> {
        &self.group
    }

    fn move_coord(&self, c: Coord, shift: &[i64]) -> Coord {
        match c {
            Coord::Lamp { track, pos } => Coord::Lamp { track, pos: pos + shift[track] },
            f => f,
        }
    }

    pub fn act(&self, gamma: &GroupElement, p: &Projection) -> Result<Projection> {
        if !gamma.in_gamma() {
            return Err(Error::Invalid(format!("{gamma} is not in Γ")));
        }
        let shift = gamma.shift_vector();
        let aut = gamma.aut_index();
        if aut == 0 {
            let window: Vec<Coord> = p.window.iter().map(|&c| self.move_coord(c, shift)).collect();
            return Ok(Projection { window, bits: p.bits.clone() });
        }
        // nontrivial automorphism: work on the window with every finite bit present
        let m = self.group.finite_bits();
        let lamp_coords: Vec<Coord> =
            p.window.iter().copied().filter(|c| matches!(c, Coord::Lamp { .. })).collect();
        let full: Vec<Coord> = union(&lamp_coords, &(0..m).map(Coord::Finite).collect::<Vec<_>>());
        let table = p.extend_to(&full)?;
        let nl = lamp_coords.len();
        let out_window: Vec<Coord> = full.iter().map(|&c| self.move_coord(c, shift)).collect();
        let a = self.group.aut();
        let vals = (0..1usize << full.len())
            .map(|x| {
                let lamp_bits = x & ((1 << nl) - 1);
                let fin = (x >> nl) as u64;
                let pulled = a.apply_transpose(aut, fin);
                table[lamp_bits | (pulled as usize) << nl]
            })
            .collect();
        Ok(Projection::from_bools(out_window, vals))
    }
}

pub fn act(gamma: &GroupElement, p: &Projection, action: &ActionSpec) -> Result<Projection> {
    action.act(gamma, p)
}

/// Refines `{1}` until every `φ.p` is subordinate or orthogonal to every member of `g`.
///
/// With `G⁺ = G ∪ {1 − ΣG}`, each `φ ∈ phi` replaces the current partition `K` by
/// `{p·φ⁻¹.q : p ∈ K, q ∈ G⁺}`, dropping zeros.
pub fn refine_partition(g: &[Projection], phi: &[GroupElement], action: &ActionSpec) -> Result<Vec<Projection>> {
    for (i, p) in g.iter().enumerate() {
        for q in &g[i + 1..] {
            if proj_relate(p, q)? != Relation::Orthogonal {
                return Err(Error::Invalid(format!("{p:?} and {q:?} are not orthogonal")));
            }
        }
    }
    let mut plus: Vec<Projection> = g.iter().filter(|p| !p.is_zero()).cloned().collect();
    let rest = plus.iter().try_fold(Projection::zero(), |acc, p| acc.or(p))?.complement();
    if !rest.is_zero() {
        plus.push(rest);
    }
    let group = action.group();
    let mut k = vec![Projection::one()];
    for f in phi {
        let pulled: Vec<Projection> =
            plus.iter().map(|q| action.act(&group.inv(f), q)).collect::<Result<_>>()?;
        let mut next = Vec::new();
        for p in &k {
            for q in &pulled {
                let r = p.and(q)?;
                if !r.is_zero() {
                    next.push(r);
                }
            }
        }
        k = next;
    }
    k.sort();
    k.dedup();
    Ok(k)
}

/// Parses the cylinder literal grammar: a union (`|`) of cylinders `{coord:bit, ...}` where
/// `coord` is a site `j` on track 0, `k@j` on track `k`, or `fb` for finite bit `b`.
/// `{}` is the constant 1 and `0` the zero projection.
pub fn parse_cylinder(s: &str) -> Result<Projection> {
    let bad = |m: &str| Error::Parse(format!("{m} in cylinder literal {s:?}"));
    let s = s.trim();
    if s == "0" {
        return Ok(Projection::zero());
    }
    let mut acc = Projection::zero();
    for part in s.split('|') {
        let part = part.trim();
        let inner = part
            .strip_prefix('{')
            .and_then(|p| p.strip_suffix('}'))
            .ok_or_else(|| bad("expected braces"))?;
        let mut fixed = Vec::new();
        for item in inner.split(',').map(str::trim).filter(|i| !i.is_empty()) {
            let (c, v) = item.split_once(':').ok_or_else(|| bad("expected coord:bit"))?;
            let v = match v.trim() {
                "0" => false,
                "1" => true,
                _ => return Err(bad("bit must be 0 or 1")),
            };
            let c = c.trim();
            let coord = if let Some(b) = c.strip_prefix('f') {
                Coord::Finite(b.parse().map_err(|_| bad("bad finite bit"))?)
            } else if let Some((k, j)) = c.split_once('@') {
                Coord::Lamp {
                    track: k.trim().parse().map_err(|_| bad("bad track"))?,
                    pos: j.trim().parse().map_err(|_| bad("bad site"))?,
                }
            } else {
                Coord::Lamp { track: 0, pos: c.parse().map_err(|_| bad("bad site"))? }
            };
            fixed.push((coord, v));
        }
        acc = acc.or(&Projection::cylinder(&fixed)?)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::parse_element;

    fn lamp() -> Arc<GroupSpec> {
        Arc::new(GroupSpec::lamplighter())
    }

    fn site(j: i64) -> Coord {
        Coord::Lamp { track: 0, pos: j }
    }

    #[test]
    fn hat_examples() {
        let g = lamp();
        let e = hat(&parse_element(&g, "e").unwrap()).unwrap();
        assert!(e.same_function(&CylinderFunction::constant(Dyadic::from_int(1))).unwrap());
        let u = hat(&parse_element(&g, "u").unwrap()).unwrap();
        assert_eq!(u.values(), &[Dyadic::from_int(1), Dyadic::from_int(-1)]);
        let p = hat(&parse_element(&g, "1/2 + 1/2 * u").unwrap()).unwrap().to_projection().unwrap();
        assert_eq!(p, parse_cylinder("{0:0}").unwrap());
        assert!(hat(&parse_element(&g, "t").unwrap()).is_err());
    }

    #[test]
    fn measures() {
        assert_eq!(Projection::one().measure(), Dyadic::from_int(1));
        assert_eq!(parse_cylinder("{0:0}").unwrap().measure(), Dyadic::half());
        assert_eq!(parse_cylinder("{0:0, 1:1}").unwrap().measure(), Dyadic::pow2_inv(2));
        assert_eq!(parse_cylinder("{0:0} | {0:1, 3:1}").unwrap().measure(), "3/4".parse().unwrap());
    }

    #[test]
    fn relations() {
        let p0 = parse_cylinder("{0:0}").unwrap();
        let p1 = parse_cylinder("{0:1}").unwrap();
        let p01 = parse_cylinder("{0:0, 1:0}").unwrap();
        let q = parse_cylinder("{1:0}").unwrap();
        assert_eq!(proj_relate(&p0, &p1).unwrap(), Relation::Orthogonal);
        assert_eq!(proj_relate(&p01, &p0).unwrap(), Relation::Subordinate);
        assert_eq!(proj_relate(&p0, &q).unwrap(), Relation::Neither);
    }

    #[test]
    fn shift_moves_cylinders_up() {
        let g = lamp();
        let a = ActionSpec::new(&g);
        let t = GroupElement::shift(&g, 0, 1);
        let p = parse_cylinder("{0:0}").unwrap();
        assert_eq!(a.act(&t, &p).unwrap(), parse_cylinder("{1:0}").unwrap());
        assert_eq!(a.act(&g.identity(), &p).unwrap(), p);
    }

    #[test]
    fn refine_examples() {
        let g = lamp();
        let a = ActionSpec::new(&g);
        assert_eq!(refine_partition(&[], &[g.identity()], &a).unwrap(), vec![Projection::one()]);
        let p = parse_cylinder("{0:0}").unwrap();
        let k = refine_partition(&[p.clone()], &[g.identity()], &a).unwrap();
        assert_eq!(k.len(), 2);
        assert!(k.contains(&p) && k.contains(&p.complement()));
        let tinv = GroupElement::shift(&g, 0, -1);
        let k = refine_partition(&[p], &[g.identity(), tinv], &a).unwrap();
        assert_eq!(k.len(), 4);
        assert!(k.iter().all(|q| q.window() == [site(0), site(1)]));
    }

    #[test]
    fn literal_roundtrip() {
        for s in ["{0:0}", "{1@3:0, f2:1}", "{-1:1, 2:0} | {5:1}", "{}", "0"] {
            let p = parse_cylinder(s).unwrap();
            assert_eq!(parse_cylinder(&p.to_literal()).unwrap(), p, "{s}");
        }
        assert!(parse_cylinder("{0:2}").is_err());
        assert!(parse_cylinder("0:1").is_err());
    }

    #[test]
    fn transform_roundtrip() {
        let g = lamp();
        let f = parse_element(&g, "3/4 * u[0,2] - 1/2 * u[1] + 5").unwrap();
        assert_eq!(hat(&f).unwrap().to_element(&g).unwrap(), f);
    }
}
