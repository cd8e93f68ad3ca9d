use std::collections::BTreeSet;
use std::fmt;

use super::spec::GroupSpec;

/// An element `a·γ` of `Γ ⋉ A` in normal form: lamp part `a ∈ A` on the left, `γ = (shift, aut)` on the right.
///
/// Conjugation is `γ a γ⁻¹ = γ.a`; the shift `t_k` moves track-`k` lamps one site up,
/// so `t u_j t⁻¹ = u_{j+1}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    pub(crate) shift: Vec<i64>,
    pub(crate) aut: usize,
    /// lit sites per track
    pub(crate) lamps: Vec<BTreeSet<i64>>,
    pub(crate) finite: u64,
}

impl GroupElement {
    pub fn identity(g: &GroupSpec) -> Self {
        GroupElement {
            shift: vec![0; g.shift_rank()],
            aut: 0,
            lamps: vec![BTreeSet::new(); g.shift_rank()],
            finite: 0,
        }
    }

    /// `t_k^j`.
    pub fn shift(g: &GroupSpec, k: usize, j: i64) -> Self {
        let mut e = Self::identity(g);
        e.shift[k] = j;
        e
    }

    /// Lamp `u_{k,site}` on track `k`.
    pub fn lamp(g: &GroupSpec, k: usize, site: i64) -> Self {
        let mut e = Self::identity(g);
        e.lamps[k].insert(site);
        e
    }

    /// Element of the finite part `Z_2^m` given as a bit mask.
    pub fn finite(g: &GroupSpec, bits: u64) -> Self {
        let mut e = Self::identity(g);
        e.finite = bits;
        e
    }

    /// Automorphism with the given index in the enumeration of the finite automorphism group.
    pub fn aut(g: &GroupSpec, index: usize) -> Self {
        let mut e = Self::identity(g);
        e.aut = index;
        e
    }

    pub fn from_parts(shift: Vec<i64>, aut: usize, lamps: Vec<BTreeSet<i64>>, finite: u64) -> Self {
        GroupElement { shift, aut, lamps, finite }
    }

    pub fn shift_vector(&self) -> &[i64] {
        &self.shift
    }

    pub fn aut_index(&self) -> usize {
        self.aut
    }

    pub fn lamps(&self) -> &[BTreeSet<i64>] {
        &self.lamps
    }

    pub fn finite_bits(&self) -> u64 {
        self.finite
    }

    pub fn is_identity(&self) -> bool {
        self.in_gamma() && self.in_a()
    }

    /// Lies in the abelian normal subgroup `A`.
    pub fn in_a(&self) -> bool {
        self.aut == 0 && self.shift.iter().all(|&s| s == 0)
    }

    /// Lies in the complement `Γ`.
    pub fn in_gamma(&self) -> bool {
        self.finite == 0 && self.lamps.iter().all(BTreeSet::is_empty)
    }

    /// The `Γ` component `γ` of `a·γ`.
    pub fn gamma_part(&self) -> Self {
        GroupElement {
            shift: self.shift.clone(),
            aut: self.aut,
            lamps: vec![BTreeSet::new(); self.lamps.len()],
            finite: 0,
        }
    }

    /// The `A` component `a` of `a·γ`.
    pub fn lamp_part(&self) -> Self {
        GroupElement {
            shift: vec![0; self.shift.len()],
            aut: 0,
            lamps: self.lamps.clone(),
            finite: self.finite,
        }
    }
}

impl GroupSpec {
    pub fn identity(&self) -> GroupElement {
        GroupElement::identity(self)
    }

    /// `γ.a` for `γ = (shift, aut)` acting on a lamp configuration.
    pub(crate) fn act_lamps(
        &self,
        shift: &[i64],
        aut: usize,
        lamps: &[BTreeSet<i64>],
        finite: u64,
    ) -> (Vec<BTreeSet<i64>>, u64) {
        let moved = lamps
            .iter()
            .zip(shift)
            .map(|(sites, s)| sites.iter().map(|x| x + s).collect())
            .collect();
        (moved, self.aut().apply(aut, finite))
    }

    /// `(a1 γ1)(a2 γ2) = (a1 + γ1.a2)(γ1 γ2)`.
    pub fn mul(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        let (moved, fin) = self.act_lamps(&x.shift, x.aut, &y.lamps, y.finite);
        let lamps = x
            .lamps
            .iter()
            .zip(moved)
            .map(|(a, b)| a.symmetric_difference(&b).copied().collect())
            .collect();
        GroupElement {
            shift: x.shift.iter().zip(&y.shift).map(|(a, b)| a + b).collect(),
            aut: self.aut().mul(x.aut, y.aut),
            lamps,
            finite: x.finite ^ fin,
        }
    }

    /// `(aγ)⁻¹ = (γ⁻¹.a) γ⁻¹`.
    pub fn inv(&self, x: &GroupElement) -> GroupElement {
        let shift: Vec<i64> = x.shift.iter().map(|s| -s).collect();
        let aut = self.aut().inv(x.aut);
        let (lamps, finite) = self.act_lamps(&shift, aut, &x.lamps, x.finite);
        GroupElement { shift, aut, lamps, finite }
    }

    /// Conjugation `γ x γ⁻¹`.
    pub fn conjugate(&self, gamma: &GroupElement, x: &GroupElement) -> GroupElement {
        self.mul(&self.mul(gamma, x), &self.inv(gamma))
    }

    pub fn pow(&self, x: &GroupElement, n: i64) -> GroupElement {
        let base = if n < 0 { self.inv(x) } else { x.clone() };
        let mut acc = self.identity();
        for _ in 0..n.unsigned_abs() {
            acc = self.mul(&acc, &base);
        }
        acc
    }

    pub fn contains(&self, x: &GroupElement) -> bool {
        x.shift.len() == self.shift_rank()
            && x.lamps.len() == self.shift_rank()
            && x.aut < self.aut().order()
            && (self.finite_bits() == 64 || x.finite >> self.finite_bits() == 0)
    }
}

fn write_sites(f: &mut fmt::Formatter<'_>, sites: &BTreeSet<i64>) -> fmt::Result {
    let list: Vec<String> = sites.iter().map(i64::to_string).collect();
    write!(f, "[{}]", list.join(","))
}

/// Word in the text grammar: lamp factors, then finite bits, then shifts, then the automorphism.
impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = 0;
        let mut sep = |f: &mut fmt::Formatter<'_>| -> fmt::Result {
            parts += 1;
            if parts > 1 {
                write!(f, " ")
            } else {
                Ok(())
            }
        };
        let single_track = self.lamps.len() == 1;
        for (k, sites) in self.lamps.iter().enumerate() {
            if sites.is_empty() {
                continue;
            }
            sep(f)?;
            if single_track {
                write!(f, "u")?;
            } else {
                write!(f, "u_{k}")?;
            }
            write_sites(f, sites)?;
        }
        if self.finite != 0 {
            sep(f)?;
            let bits: Vec<String> =
                (0..64).filter(|b| self.finite >> b & 1 == 1).map(|b: u32| b.to_string()).collect();
            write!(f, "v[{}]", bits.join(","))?;
        }
        for (k, &s) in self.shift.iter().enumerate() {
            if s == 0 {
                continue;
            }
            sep(f)?;
            if self.shift.len() == 1 {
                write!(f, "t")?;
            } else {
                write!(f, "t_{k}")?;
            }
            if s != 1 {
                write!(f, "^{s}")?;
            }
        }
        if self.aut != 0 {
            sep(f)?;
            write!(f, "phi{}", self.aut)?;
        }
        if parts == 0 {
            write!(f, "e")?;
        }
        Ok(())
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{self}>")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_conjugates_lamps_up() {
        let g = GroupSpec::lamplighter();
        let t = GroupElement::shift(&g, 0, 1);
        let u = GroupElement::lamp(&g, 0, 0);
        assert_eq!(g.conjugate(&t, &u), GroupElement::lamp(&g, 0, 1));
        assert!(g.mul(&t, &g.inv(&t)).is_identity());
        assert!(g.mul(&u, &u).is_identity());
    }

    #[test]
    fn display_words() {
        let g = GroupSpec::lamplighter();
        let t = GroupElement::shift(&g, 0, 1);
        let u = GroupElement::lamp(&g, 0, 0);
        assert_eq!(g.mul(&t, &u).to_string(), "u[1] t");
        assert_eq!(g.mul(&u, &g.inv(&t)).to_string(), "u[0] t^-1");
        assert_eq!(g.identity().to_string(), "e");
    }
}
