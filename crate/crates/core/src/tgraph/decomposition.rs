use std::collections::BTreeMap;
use std::sync::Arc;

use crate::cylinder::{hat, ActionSpec, CylinderFunction};
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupRingElement, GroupRingMatrix, GroupSpec};

/// `T = Σ γ_i f_i` with `γ_i ∈ Γ` pairwise distinct and `f_i` supported in `A`.
#[derive(Clone, Debug)]
pub struct TDecomposition {
    group: Arc<GroupSpec>,
    gammas: Vec<GroupElement>,
    fs: Vec<GroupRingElement>,
    duals: Vec<CylinderFunction>,
}

impl TDecomposition {
    pub fn new(group: &Arc<GroupSpec>, terms: Vec<(GroupElement, GroupRingElement)>) -> Result<Self> {
        let mut gammas = Vec::new();
        let mut fs = Vec::new();
        let mut duals = Vec::new();
        for (g, f) in terms {
            if !g.in_gamma() {
                return Err(Error::Invalid(format!("{g} is not in Γ")));
            }
            if gammas.contains(&g) {
                return Err(Error::Invalid(format!("{g} appears twice in the decomposition")));
            }
            duals.push(hat(&f)?);
            gammas.push(g);
            fs.push(f);
        }
        Ok(TDecomposition { group: group.clone(), gammas, fs, duals })
    }

    /// Groups the terms of `T` by their `Γ` part: `aγ = γ·(γ⁻¹.a)`.
    pub fn from_element(t: &GroupRingElement) -> Result<Self> {
        let g = t.group();
        let mut by_gamma: BTreeMap<GroupElement, GroupRingElement> = BTreeMap::new();
        for (x, c) in t.terms() {
            let gamma = x.gamma_part();
            let a = g.conjugate(&g.inv(&gamma), &x.lamp_part());
            by_gamma.entry(gamma).or_insert_with(|| GroupRingElement::zero(g)).add_term(a, c.clone());
        }
        Self::new(g, by_gamma.into_iter().filter(|(_, f)| !f.is_zero()).collect())
    }

    /// Same, for a 1x1 operator matrix.
    pub fn from_matrix(t: &GroupRingMatrix) -> Result<Self> {
        if (t.rows(), t.cols()) != (1, 1) {
            return Err(Error::Shape("T-graph decompositions need a 1x1 operator".into()));
        }
        Self::from_element(&t.get(0, 0))
    }

    pub fn group(&self) -> &Arc<GroupSpec> {
        &self.group
    }

    pub fn action(&self) -> ActionSpec {
        ActionSpec::new(&self.group)
    }

    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }

    pub fn gamma(&self, k: usize) -> &GroupElement {
        &self.gammas[k]
    }

    pub fn f(&self, k: usize) -> &GroupRingElement {
        &self.fs[k]
    }

    pub fn dual(&self, k: usize) -> &CylinderFunction {
        &self.duals[k]
    }

    /// The operator `Σ γ_i f_i` itself.
    pub fn operator(&self) -> Result<GroupRingElement> {
        let mut out = GroupRingElement::zero(&self.group);
        for (g, f) in self.gammas.iter().zip(&self.fs) {
            out = out.add(&GroupRingElement::element(&self.group, g.clone()).mul(f)?)?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::parse_element;

    #[test]
    fn lamplighter_groups_into_two_terms() {
        let t = crate::presets::lamplighter();
        let d = TDecomposition::from_matrix(&t).unwrap();
        assert_eq!(d.len(), 2);
        let g = d.group().clone();
        let tinv = GroupElement::shift(&g, 0, -1);
        let k = (0..2).find(|&k| d.gamma(k) == &tinv).unwrap();
        assert_eq!(d.f(k), &parse_element(&g, "1 + u[1]").unwrap());
        assert_eq!(d.f(1 - k), &parse_element(&g, "1 + u[0]").unwrap());
        assert_eq!(d.operator().unwrap(), t.get(0, 0));
    }

    #[test]
    fn repeated_gamma_rejected() {
        let g = Arc::new(GroupSpec::lamplighter());
        let one = GroupRingElement::one(&g);
        let t = GroupElement::shift(&g, 0, 1);
        assert!(TDecomposition::new(&g, vec![(t.clone(), one.clone()), (t, one)]).is_err());
    }
}
