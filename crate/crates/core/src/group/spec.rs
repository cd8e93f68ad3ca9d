use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Largest finite part supported, in bits.
pub const MAX_FINITE_BITS: usize = 16;

/// A finite group of automorphisms of `Z_2^m`, given as GF(2) matrices and enumerated once.
///
/// Matrices are stored by columns: `cols[j]` is the image of the basis vector `e_j`.
/// Index 0 is always the identity.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteAut {
    bits: usize,
    elems: Vec<Vec<u64>>,
    lookup: HashMap<Vec<u64>, usize>,
    inverse: Vec<usize>,
}

fn identity_cols(m: usize) -> Vec<u64> {
    (0..m).map(|j| 1u64 << j).collect()
}

fn apply_cols(cols: &[u64], v: u64) -> u64 {
    let mut out = 0;
    for (j, c) in cols.iter().enumerate() {
        if v >> j & 1 == 1 {
            out ^= c;
        }
    }
    out
}

fn compose(a: &[u64], b: &[u64]) -> Vec<u64> {
    b.iter().map(|&c| apply_cols(a, c)).collect()
}

fn gf2_rank(cols: &[u64]) -> usize {
    let mut basis: Vec<u64> = Vec::new();
    for &c in cols {
        let mut v = c;
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

impl FiniteAut {
    pub fn trivial(bits: usize) -> Self {
        Self::generated(bits, &[]).expect("identity is invertible")
    }

    /// Closure of the given generator matrices (column form) under composition.
    pub fn generated(bits: usize, gens: &[Vec<u64>]) -> Result<Self> {
        if bits > MAX_FINITE_BITS {
            return Err(Error::Invalid(format!("finite part of {bits} bits exceeds {MAX_FINITE_BITS}")));
        }
        let mask = if bits == 0 { 0 } else { (1u64 << bits) - 1 };
        for g in gens {
            if g.len() != bits || g.iter().any(|c| c & !mask != 0) {
                return Err(Error::Invalid(format!("generator {g:?} is not a {bits}x{bits} matrix")));
            }
            if gf2_rank(g) != bits {
                return Err(Error::Invalid(format!("generator {g:?} is not invertible")));
            }
        }
        let id = identity_cols(bits);
        let mut elems = vec![id.clone()];
        let mut lookup = HashMap::from([(id, 0usize)]);
        let mut i = 0;
        while i < elems.len() {
            for g in gens {
                let next = compose(g, &elems[i]);
                if !lookup.contains_key(&next) {
                    lookup.insert(next.clone(), elems.len());
                    elems.push(next);
                }
            }
            i += 1;
        }
        let id = identity_cols(bits);
        let inverse = elems
            .iter()
            .map(|a| {
                // a has finite order, so a^(k-1) is the inverse for the first k with a^k = 1
                let mut prev = id.clone();
                let mut cur = a.clone();
                while cur != id {
                    prev = cur.clone();
                    cur = compose(a, &cur);
                }
                lookup[&prev]
            })
            .collect();
        Ok(FiniteAut { bits, elems, lookup, inverse })
    }

    /// All of `GL(m, 2)`, generated by elementary transvections.
    pub fn general_linear(bits: usize) -> Result<Self> {
        let mut gens = Vec::new();
        for i in 0..bits {
            for j in 0..bits {
                if i != j {
                    let mut g = identity_cols(bits);
                    g[j] |= 1 << i;
                    gens.push(g);
                }
            }
        }
        Self::generated(bits, &gens)
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn order(&self) -> usize {
        self.elems.len()
    }

    pub fn matrix(&self, i: usize) -> &[u64] {
        &self.elems[i]
    }

    pub fn index_of(&self, cols: &[u64]) -> Option<usize> {
        self.lookup.get(cols).copied()
    }

    /// Index of `a ∘ b` (apply `b` first).
    pub fn mul(&self, a: usize, b: usize) -> usize {
        if a == 0 {
            return b;
        }
        if b == 0 {
            return a;
        }
        self.lookup[&compose(&self.elems[a], &self.elems[b])]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn apply(&self, a: usize, v: u64) -> u64 {
        if a == 0 {
            v
        } else {
            apply_cols(&self.elems[a], v)
        }
    }

    /// Transposed matrix applied to `x`; this is how automorphisms act on dual configurations.
    pub fn apply_transpose(&self, a: usize, x: u64) -> u64 {
        if a == 0 {
            return x;
        }
        let mut out = 0;
        for (j, c) in self.elems[a].iter().enumerate() {
            if (c & x).count_ones() % 2 == 1 {
                out |= 1 << j;
            }
        }
        out
    }

    /// Block-diagonal extension fixing `extra` new bits placed above the existing ones.
    /// Element indices are preserved.
    pub fn extended(&self, extra: usize) -> Result<Self> {
        let bits = self.bits + extra;
        if bits > MAX_FINITE_BITS {
            return Err(Error::Invalid(format!("finite part of {bits} bits exceeds {MAX_FINITE_BITS}")));
        }
        let elems: Vec<Vec<u64>> = self
            .elems
            .iter()
            .map(|cols| {
                let mut c = cols.clone();
                c.extend((self.bits..bits).map(|j| 1u64 << j));
                c
            })
            .collect();
        let lookup = elems.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        Ok(FiniteAut { bits, elems, lookup, inverse: self.inverse.clone() })
    }
}

impl fmt::Debug for FiniteAut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteAut(bits={}, order={})", self.bits, self.order())
    }
}

/// The group `Γ ⋉ A` with `Γ = Z^d × Aut` and `A = (⊕_Z Z_2)^d × Z_2^m`.
///
/// Shift coordinate `k` moves lamp track `k`; the automorphism part acts on the finite bits.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GroupSpec {
    shift_rank: usize,
    aut: FiniteAut,
}

impl GroupSpec {
    pub fn new(shift_rank: usize, aut: FiniteAut) -> Result<Self> {
        if shift_rank + aut.bits() == 0 {
            return Err(Error::Invalid("group needs a shift or a finite part".into()));
        }
        Ok(GroupSpec { shift_rank, aut })
    }

    /// `Z_2 ≀ Z`.
    pub fn lamplighter() -> Self {
        GroupSpec { shift_rank: 1, aut: FiniteAut::trivial(0) }
    }

    /// Lamplighter-type group with `d` shifts and a trivial finite part.
    pub fn shifts(d: usize) -> Result<Self> {
        Self::new(d, FiniteAut::trivial(0))
    }

    /// `Z^d × GL(m,2)` acting on `(⊕_Z Z_2)^d × Z_2^m`.
    pub fn with_full_aut(d: usize, m: usize) -> Result<Self> {
        Self::new(d, FiniteAut::general_linear(m)?)
    }

    /// Direct product with `Z_2^extra`, realized as new finite bits fixed by every automorphism.
    pub fn with_extra_bits(&self, extra: usize) -> Result<Self> {
        Self::new(self.shift_rank, self.aut.extended(extra)?)
    }

    pub fn shift_rank(&self) -> usize {
        self.shift_rank
    }

    pub fn finite_bits(&self) -> usize {
        self.aut.bits()
    }

    pub fn aut(&self) -> &FiniteAut {
        &self.aut
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl32_has_168_elements() {
        let g = FiniteAut::general_linear(3).unwrap();
        assert_eq!(g.order(), 168);
        // |Z_2^3 ⋊ GL(3,2)|
        assert_eq!(8 * g.order(), 1344);
        for a in 0..g.order() {
            assert_eq!(g.mul(a, g.inv(a)), 0);
        }
    }

    #[test]
    fn transpose_action_is_adjoint() {
        let g = FiniteAut::general_linear(3).unwrap();
        for a in 0..g.order() {
            for v in 0..8u64 {
                for x in 0..8u64 {
                    let lhs = (g.apply(a, v) & x).count_ones() % 2;
                    let rhs = (v & g.apply_transpose(a, x)).count_ones() % 2;
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn singular_generator_rejected() {
        assert!(FiniteAut::generated(2, &[vec![1, 1]]).is_err());
    }

    #[test]
    fn extension_fixes_new_bits() {
        let g = FiniteAut::general_linear(2).unwrap();
        let e = g.extended(1).unwrap();
        assert_eq!(e.order(), 6);
        for a in 0..e.order() {
            assert_eq!(e.apply(a, 0b100), 0b100);
        }
    }
}
