use std::collections::BTreeMap;

use super::graph::{build_m, simply_connected, validate_tgraph, RGraph, TGraph};
use crate::cylinder::{proj_relate, Projection, Relation};
use crate::error::{Error, Result};
use crate::folner::FolnerBox;
use crate::group::{GroupElement, GroupRingElement};
use crate::linalg::{rank, ExactMatrix, ExactScalar, FieldSpec};

/// Outcome of checking that `W = span{γ_v·q′·a}` is `ρ(T)`-invariant with matrix `M(G,T;𝕜)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntertwinerReport {
    pub dimension: usize,
    /// the `w_v` are linearly independent
    pub independent: bool,
    /// `ρ(T)·w_v = Σ_w M[w][v]·w_w` for every `v`
    pub matches_m: bool,
    /// the compression of `T` to the box computes the same products
    pub matches_compression: bool,
}

impl IntertwinerReport {
    pub fn holds(&self) -> bool {
        self.independent && self.matches_m && self.matches_compression
    }
}

/// Smallest box holding every `γ_v·p_0` and its image under `T`, where `p_0` is the first
/// projection and `γ_v` its offsets.
pub fn fitting_box(g: &TGraph) -> Result<FolnerBox> {
    let d = &g.decomposition;
    let group = d.group().clone();
    let report = validate_tgraph(&g.projections, d)?;
    let conn = simply_connected(&RGraph::of(g, &report), &group);
    if !conn.connected {
        return Err(Error::NotSimplyConnected("graph is disconnected".into()));
    }
    let base = g.projections.first().ok_or_else(|| Error::Invalid("empty T-graph".into()))?.to_element(&group)?;
    let t = d.operator()?;
    let rank = group.shift_rank();
    let mut shifts = vec![(i64::MAX, i64::MIN); rank];
    let mut lamps = vec![(0i64, 0i64); rank];
    for o in conn.offsets.iter().flatten() {
        let w = base.left_translate(o);
        for x in w.support().chain(t.mul(&w)?.support()) {
            for k in 0..rank {
                let s = x.shift_vector()[k];
                shifts[k] = (shifts[k].0.min(s), shifts[k].1.max(s + 1));
                for &p in &x.lamps()[k] {
                    lamps[k] = (lamps[k].0.min(p - s), lamps[k].1.max(p - s + 1));
                }
            }
        }
    }
    FolnerBox::new(&group, shifts, lamps)
}

/// Runs the check with `q′` the first projection of `g` and `a = e`.
pub fn intertwiner_check(g: &TGraph, field: FieldSpec, b: &FolnerBox) -> Result<IntertwinerReport> {
    let group = g.decomposition.group().clone();
    let base = g.projections.first().ok_or_else(|| Error::Invalid("empty T-graph".into()))?.clone();
    intertwiner_check_with(g, field, b, &base, &group.identity())
}

/// Runs the check for `w_v = γ_v·q′·a` where `q′ ≺` the first projection and `a ∈ A`.
pub fn intertwiner_check_with(
    g: &TGraph,
    field: FieldSpec,
    b: &FolnerBox,
    sub: &Projection,
    a: &GroupElement,
) -> Result<IntertwinerReport> {
    let d = &g.decomposition;
    let group = d.group().clone();
    if !a.in_a() {
        return Err(Error::NotInA);
    }
    if sub.is_zero() || proj_relate(sub, &g.projections[0])? != Relation::Subordinate {
        return Err(Error::Invalid("q′ must be a nonzero projection below the base vertex".into()));
    }
    let report = validate_tgraph(&g.projections, d)?;
    let conn = simply_connected(&RGraph::of(g, &report), &group);
    if !conn.simply_connected() {
        return Err(Error::NotSimplyConnected("intertwiner check needs a simply connected T-graph".into()));
    }
    let (_, m) = build_m(&report, g.projections.len(), field)?;

    let t = d.operator()?.reduce(field);
    let qa = sub.to_element(&group)?.mul(&GroupRingElement::element(&group, a.clone()))?.reduce(field);
    let ws: Vec<GroupRingElement<ExactScalar>> = conn
        .offsets
        .iter()
        .map(|o| qa.left_translate(o.as_ref().expect("connected")))
        .collect();

    // vectors of 𝕜[box] are kept sparse, keyed by basis index
    let to_vec = |x: &GroupRingElement<ExactScalar>| -> Result<BTreeMap<usize, ExactScalar>> {
        let mut v = BTreeMap::new();
        for (g, c) in x.terms().filter(|(_, c)| !c.is_zero()) {
            let i = b.index_of(g).ok_or_else(|| Error::BoxTooSmall(format!("{g} lies outside box {}", b.label())))?;
            v.insert(i, c.clone());
        }
        Ok(v)
    };

    let n = ws.len();
    let vecs: Vec<BTreeMap<usize, ExactScalar>> = ws.iter().map(to_vec).collect::<Result<_>>()?;
    let span = ExactMatrix::from_triplets(
        n,
        b.len(),
        field,
        vecs.iter().enumerate().flat_map(|(r, v)| v.iter().map(move |(i, c)| (r, *i, c.clone()))),
    )?;
    let independent = rank(&span) == n;

    // the compression applied column by column through the box's own index arithmetic
    let t_terms: Vec<(GroupElement, ExactScalar)> = t.terms().map(|(h, c)| (h.clone(), c.clone())).collect();
    let compressed = |x: &BTreeMap<usize, ExactScalar>| -> BTreeMap<usize, ExactScalar> {
        let mut out: BTreeMap<usize, ExactScalar> = BTreeMap::new();
        for (&i, c) in x {
            for (h, d) in &t_terms {
                if let Some(j) = b.left_mul_index(h, i) {
                    let e = out.entry(j).or_insert_with(|| field.zero());
                    *e = e.add(&d.mul(c));
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    };
    let mut matches_m = true;
    let mut matches_compression = true;
    for (v, w) in ws.iter().enumerate() {
        let tw = t.mul(w)?;
        let mut expected = GroupRingElement::zero(&group);
        for (u, wu) in ws.iter().enumerate() {
            let c = m.get(u, v);
            if !c.is_zero() {
                expected = expected.add(&wu.scale(&c))?;
            }
        }
        if tw.sub(&expected)?.terms().any(|(_, c)| !c.is_zero()) {
            matches_m = false;
        }
        if compressed(&vecs[v]) != to_vec(&tw)? {
            matches_compression = false;
        }
    }
    Ok(IntertwinerReport { dimension: n, independent, matches_m, matches_compression })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::cylinder::parse_cylinder;
    use crate::group::GroupSpec;
    use crate::tgraph::{component_census, TDecomposition};

    #[test]
    fn singleton_is_invariant() {
        let g = Arc::new(GroupSpec::lamplighter());
        let d = Arc::new(TDecomposition::new(&g, vec![(g.identity(), GroupRingElement::one(&g))]).unwrap());
        let tg = TGraph { decomposition: d, projections: vec![Projection::one()] };
        let b = FolnerBox::centered(&g, 1, 1).unwrap();
        let r = intertwiner_check(&tg, FieldSpec::prime(3).unwrap(), &b).unwrap();
        assert!(r.holds());
        assert_eq!(r.dimension, 1);
    }

    #[test]
    fn lamplighter_three_component() {
        let d = Arc::new(TDecomposition::from_matrix(&crate::presets::lamplighter()).unwrap());
        let census = component_census(&d, 8).unwrap();
        let c = census.components.iter().find(|c| c.size() == 3).unwrap();
        let g = d.group().clone();
        let field = FieldSpec::prime(5).unwrap();
        let b = FolnerBox::centered(&g, 12, 14).unwrap();
        assert!(intertwiner_check(&c.tgraph, field, &b).unwrap().holds());
        let sub = c.base().and(&parse_cylinder("{-5:1}").unwrap()).unwrap();
        let a = GroupElement::lamp(&g, 0, 2);
        assert!(intertwiner_check_with(&c.tgraph, field, &b, &sub, &a).unwrap().holds());
        let small = FolnerBox::centered(&g, 2, 2).unwrap();
        assert!(matches!(intertwiner_check(&c.tgraph, field, &small), Err(Error::BoxTooSmall(_))));
    }

    #[test]
    fn every_lamplighter_component_fits() {
        let d = Arc::new(TDecomposition::from_matrix(&crate::presets::lamplighter()).unwrap());
        let census = component_census(&d, 8).unwrap();
        for c in &census.components {
            let b = fitting_box(&c.tgraph).unwrap();
            let r = intertwiner_check(&c.tgraph, FieldSpec::prime(7).unwrap(), &b).unwrap();
            assert!(r.holds(), "{} vertices in {}", c.size(), b.label());
        }
    }
}
