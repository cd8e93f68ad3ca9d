use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use super::decomposition::TDecomposition;
use crate::cylinder::{proj_relate, Coord, Projection, Relation};
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec};
use crate::linalg::{Dyadic, ExactMatrix, ExactScalar, FieldSpec};

/// A finite set of projections together with the decomposition it is taken relative to.
#[derive(Clone, Debug)]
pub struct TGraph {
    pub decomposition: Arc<TDecomposition>,
    pub projections: Vec<Projection>,
}

/// Transition `from → to` along term `term`, with the constant value of `f̂_term` on `supp from`.
#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub term: usize,
    pub weight: Dyadic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    /// 1: orthogonality or nonzeroness, 2: support neither inside nor disjoint, 3: transition
    /// leaves the set or the coefficient is not constant
    pub condition: u8,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub violation: Option<Violation>,
    pub edges: Vec<Edge>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violation.is_none()
    }
}

fn union(a: &[Coord], b: &[Coord]) -> Vec<Coord> {
    let mut w: Vec<Coord> = a.iter().chain(b).copied().collect();
    w.sort();
    w.dedup();
    w
}

/// Values `f̂_k` takes on the support of `p`.
fn values_on(d: &TDecomposition, k: usize, p: &Projection) -> Result<Vec<Dyadic>> {
    let f = d.dual(k);
    let w = union(p.window(), f.window());
    let pv = p.extend_to(&w)?;
    let fv = f.extend_to(&w)?;
    let mut vals: Vec<Dyadic> = pv
        .iter()
        .zip(fv.values())
        .filter(|(inside, _)| **inside)
        .map(|(_, v)| v.clone())
        .collect();
    vals.sort();
    vals.dedup();
    Ok(vals)
}

/// Checks the three T-graph conditions and lists the transitions.
pub fn validate_tgraph(g: &[Projection], d: &TDecomposition) -> Result<ValidationReport> {
    let fail = |condition: u8, detail: String| {
        Ok(ValidationReport { violation: Some(Violation { condition, detail }), edges: Vec::new() })
    };
    for (i, p) in g.iter().enumerate() {
        if p.is_zero() {
            return fail(1, format!("projection {i} is zero"));
        }
        for (j, q) in g.iter().enumerate().skip(i + 1) {
            if proj_relate(p, q)? != Relation::Orthogonal {
                return fail(1, format!("projections {i} and {j} are not orthogonal"));
            }
        }
    }
    let index: HashMap<&Projection, usize> = g.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let action = d.action();
    let mut edges = Vec::new();
    for (i, p) in g.iter().enumerate() {
        for k in 0..d.len() {
            let vals = values_on(d, k, p)?;
            let zero = Dyadic::from_int(0);
            if vals == [zero.clone()] {
                continue;
            }
            if vals.contains(&zero) {
                return fail(2, format!("support of projection {i} meets but is not inside supp f̂_{k}"));
            }
            if vals.len() > 1 {
                return fail(3, format!("f̂_{k} is not constant on projection {i}"));
            }
            let moved = action.act(d.gamma(k), p)?;
            match index.get(&moved) {
                Some(&j) => edges.push(Edge { from: i, to: j, term: k, weight: vals[0].clone() }),
                None => return fail(3, format!("γ_{k} moves projection {i} outside the set")),
            }
        }
    }
    Ok(ValidationReport { violation: None, edges })
}

/// Directed graph with edges labeled by elements of `Γ`.
#[derive(Clone, Debug)]
pub struct RGraph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize, GroupElement)>,
}

impl RGraph {
    pub fn of(g: &TGraph, report: &ValidationReport) -> Self {
        RGraph {
            vertices: g.projections.len(),
            edges: report
                .edges
                .iter()
                .map(|e| (e.from, e.to, g.decomposition.gamma(e.term).clone()))
                .collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Connectivity {
    pub connected: bool,
    /// `g(v)` with `g(root) = e` and `g(to) = label · g(from)` along tree edges
    pub offsets: Vec<Option<GroupElement>>,
    /// an edge whose loop label is nontrivial, with that label
    pub witness: Option<(usize, GroupElement)>,
}

impl Connectivity {
    pub fn simply_connected(&self) -> bool {
        self.connected && self.witness.is_none()
    }
}

/// Spanning-tree test: every edge `v → w` labeled `γ` must satisfy `g(w) = γ g(v)`.
pub fn simply_connected(r: &RGraph, group: &GroupSpec) -> Connectivity {
    let mut offsets: Vec<Option<GroupElement>> = vec![None; r.vertices];
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); r.vertices];
    for (i, (a, b, _)) in r.edges.iter().enumerate() {
        adj[*a].push(i);
        adj[*b].push(i);
    }
    if r.vertices == 0 {
        return Connectivity { connected: false, offsets, witness: None };
    }
    offsets[0] = Some(group.identity());
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        let gv = offsets[v].clone().expect("visited");
        for &ei in &adj[v] {
            let (a, b, label) = &r.edges[ei];
            let (w, gw) = if *a == v {
                (*b, group.mul(label, &gv))
            } else {
                (*a, group.mul(&group.inv(label), &gv))
            };
            if offsets[w].is_none() {
                offsets[w] = Some(gw);
                queue.push_back(w);
            }
        }
    }
    let connected = offsets.iter().all(Option::is_some);
    let mut witness = None;
    for (i, (a, b, label)) in r.edges.iter().enumerate() {
        if let (Some(ga), Some(gb)) = (&offsets[*a], &offsets[*b]) {
            let loop_label = group.mul(&group.inv(gb), &group.mul(label, ga));
            if !loop_label.is_identity() {
                witness = Some((i, loop_label));
                break;
            }
        }
    }
    Connectivity { connected, offsets, witness }
}

/// `Γ(p)`: labels of paths starting at vertex `p`, so that `γ.p` runs over the whole graph.
pub fn gamma_set(r: &RGraph, group: &GroupSpec, p: usize) -> Result<Vec<GroupElement>> {
    let c = simply_connected(r, group);
    if !c.simply_connected() {
        return Err(Error::NotSimplyConnected(match &c.witness {
            Some((e, l)) => format!("edge {e} closes a loop labeled {l}"),
            None => "graph is disconnected".into(),
        }));
    }
    let gp_inv = group.inv(c.offsets[p].as_ref().expect("connected"));
    Ok(c.offsets.iter().map(|o| group.mul(o.as_ref().expect("connected"), &gp_inv)).collect())
}

/// Adjacency with field labels.
#[derive(Clone, Debug)]
pub struct SGraph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize, ExactScalar)>,
}

/// `M(G,T;k)` in the convention `M[w][v] = Σ ρ(weight)` over edges `v → w`.
///
/// With `w_v = γ_v·p·ξ` this is the matrix of `ρ(T)` on the span of the `w_v`, so the kernel
/// equation at `w` sums over incoming edges.
pub fn build_m(report: &ValidationReport, vertices: usize, field: FieldSpec) -> Result<(SGraph, ExactMatrix)> {
    if let Some(v) = &report.violation {
        return Err(Error::Invalid(format!("not a T-graph: {}", v.detail)));
    }
    let edges: Vec<(usize, usize, ExactScalar)> =
        report.edges.iter().map(|e| (e.from, e.to, field.reduce(&e.weight))).collect();
    let m = ExactMatrix::from_triplets(vertices, vertices, field, edges.iter().map(|(a, b, c)| (*b, *a, c.clone())))?;
    Ok((SGraph { vertices, edges }, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cylinder::parse_cylinder;
    use crate::group::GroupRingElement;

    fn lamp() -> Arc<GroupSpec> {
        Arc::new(GroupSpec::lamplighter())
    }

    #[test]
    fn trivial_tgraph() {
        let g = lamp();
        let d = TDecomposition::new(&g, vec![(g.identity(), GroupRingElement::one(&g))]).unwrap();
        let rep = validate_tgraph(&[Projection::one()], &d).unwrap();
        assert!(rep.is_valid());
        assert_eq!(rep.edges.len(), 1);
        let (_, m) = build_m(&rep, 1, FieldSpec::rationals()).unwrap();
        assert_eq!(m, ExactMatrix::identity(1, FieldSpec::rationals()));
    }

    #[test]
    fn overlapping_projections_fail_first_condition() {
        let g = lamp();
        let d = TDecomposition::new(&g, vec![(g.identity(), GroupRingElement::one(&g))]).unwrap();
        let ps = [parse_cylinder("{0:0}").unwrap(), parse_cylinder("{1:0}").unwrap()];
        let rep = validate_tgraph(&ps, &d).unwrap();
        assert_eq!(rep.violation.unwrap().condition, 1);
    }

    #[test]
    fn loops_and_paths() {
        let g = lamp();
        let t = GroupElement::shift(&g, 0, 1);
        let single = RGraph { vertices: 1, edges: vec![(0, 0, g.identity())] };
        assert!(simply_connected(&single, &g).simply_connected());
        let pair = RGraph { vertices: 2, edges: vec![(0, 1, t.clone())] };
        assert!(simply_connected(&pair, &g).simply_connected());
        let bad = RGraph { vertices: 1, edges: vec![(0, 0, t.clone())] };
        let c = simply_connected(&bad, &g);
        assert!(!c.simply_connected());
        assert_eq!(c.witness.unwrap().1, t);
        let path = RGraph { vertices: 3, edges: vec![(0, 1, t.clone()), (1, 2, t.clone())] };
        let gs = gamma_set(&path, &g, 0).unwrap();
        assert_eq!(gs, vec![g.identity(), t.clone(), g.pow(&t, 2)]);
        assert!(gamma_set(&bad, &g, 0).is_err());
    }
}
