//! Enumerates the finite components of the transition dynamics visible inside a window.
//!
//! For each full configuration `x` of the window, the component of `x` is explored over `Γ`:
//! vertex `γ` stands for the point `γ.x`, term `k` is active there when `f̂_k(γ.x) ≠ 0`, and then
//! `γ → γ_k γ`. Every coordinate read along the way must lie in the window, otherwise the
//! component escapes and its mass is left to the boundary. The coordinates read form a set `S`;
//! the cylinder `p` fixing `x` on `S` is the base of the component `{γ.p}`.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::Arc;

use rayon::prelude::*;

use super::decomposition::TDecomposition;
use super::graph::{build_m, simply_connected, validate_tgraph, RGraph, TGraph, ValidationReport};
use crate::cylinder::{Coord, Projection, DEFAULT_WINDOW_CAP};
use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::linalg::{kernel_dim, Dyadic, FieldSpec};

#[derive(Clone, Debug)]
pub struct CensusComponent {
    pub tgraph: TGraph,
    pub report: ValidationReport,
    /// `γ_v` with vertex `v` equal to `γ_v.p`; vertex 0 is `p` itself
    pub offsets: Vec<GroupElement>,
    pub measure: Dyadic,
    pub type_key: String,
}

impl CensusComponent {
    pub fn base(&self) -> &Projection {
        &self.tgraph.projections[0]
    }

    pub fn size(&self) -> usize {
        self.tgraph.projections.len()
    }

    pub fn kernel_dim(&self, field: FieldSpec) -> Result<usize> {
        let (_, m) = build_m(&self.report, self.size(), field)?;
        Ok(kernel_dim(&m))
    }
}

/// Isomorphism class of censused components with their total measure.
#[derive(Clone, Debug)]
pub struct CensusType {
    pub type_id: String,
    pub canonical: String,
    pub vertices: usize,
    pub components: usize,
    pub measure: Dyadic,
    /// index of a representative in `Census::components`
    pub representative: usize,
}

#[derive(Clone, Debug)]
pub struct Census {
    pub window: Vec<Coord>,
    pub components: Vec<CensusComponent>,
    pub types: Vec<CensusType>,
    pub interior_measure: Dyadic,
    /// measure of the points not covered by any interior component, counted independently
    pub boundary_measure: Dyadic,
    /// closed components discarded because they failed validation or simple connectivity
    pub rejected: usize,
}

impl Census {
    pub fn kernel_dims(&self, field: FieldSpec) -> Result<Vec<usize>> {
        self.types.iter().map(|t| self.components[t.representative].kernel_dim(field)).collect()
    }
}

fn centered(n: usize) -> (i64, i64) {
    let lo = -((n / 2) as i64);
    (lo, lo + n as i64)
}

/// Window of `size` sites around 0 on every track, plus the whole finite part.
pub fn census_window(d: &TDecomposition, size: usize) -> Vec<Coord> {
    let g = d.group();
    let (lo, hi) = centered(size);
    let mut w: Vec<Coord> = (0..g.shift_rank())
        .flat_map(|track| (lo..hi).map(move |pos| Coord::Lamp { track, pos }))
        .collect();
    w.extend((0..g.finite_bits()).map(Coord::Finite));
    w.sort();
    w
}

struct Explorer<'a> {
    d: &'a TDecomposition,
    pos: HashMap<Coord, usize>,
    shift_bound: i64,
}

enum Outcome {
    Escaped,
    Closed { vertices: Vec<GroupElement>, read: BTreeMap<Coord, bool> },
}

impl Explorer<'_> {
    /// `f̂_k(γ.x)`, recording the coordinates of `x` read; `None` if one lies outside the window.
    fn eval(&self, k: usize, gamma: &GroupElement, x: u64, read: &mut BTreeMap<Coord, bool>) -> Option<Dyadic> {
        let g = self.d.group();
        let f = self.d.dual(k);
        let shift = gamma.shift_vector();
        let aut = g.aut();
        // finite part of γ.x is (αᵀ)⁻¹ applied to that of x
        let mut fin_x = 0u64;
        let needs_fin = f.window().iter().any(|c| matches!(c, Coord::Finite(_)));
        if needs_fin {
            for b in 0..g.finite_bits() {
                let c = Coord::Finite(b);
                let bit = x >> self.pos[&c] & 1 == 1;
                read.insert(c, bit);
                fin_x |= (bit as u64) << b;
            }
        }
        let fin_gx = aut.apply_transpose(aut.inv(gamma.aut_index()), fin_x);
        let mut idx = 0usize;
        for (i, c) in f.window().iter().enumerate() {
            let bit = match *c {
                Coord::Lamp { track, pos } => {
                    let src = Coord::Lamp { track, pos: pos - shift[track] };
                    let p = *self.pos.get(&src)?;
                    let bit = x >> p & 1 == 1;
                    read.insert(src, bit);
                    bit
                }
                Coord::Finite(b) => fin_gx >> b & 1 == 1,
            };
            idx |= (bit as usize) << i;
        }
        Some(f.values()[idx].clone())
    }

    fn explore(&self, x: u64) -> Outcome {
        let g = self.d.group();
        let mut read = BTreeMap::new();
        let mut index: HashMap<GroupElement, usize> = HashMap::new();
        let mut vertices = vec![g.identity()];
        index.insert(g.identity(), 0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            let gamma = vertices[v].clone();
            for k in 0..self.d.len() {
                let gk = self.d.gamma(k);
                let mut candidates = Vec::with_capacity(2);
                // outgoing: active at γ
                match self.eval(k, &gamma, x, &mut read) {
                    None => return Outcome::Escaped,
                    Some(c) if !num_traits::Zero::is_zero(&c) => candidates.push(g.mul(gk, &gamma)),
                    _ => {}
                }
                // incoming: active at γ_k⁻¹ γ
                let prev = g.mul(&g.inv(gk), &gamma);
                match self.eval(k, &prev, x, &mut read) {
                    None => return Outcome::Escaped,
                    Some(c) if !num_traits::Zero::is_zero(&c) => candidates.push(prev),
                    _ => {}
                }
                for w in candidates {
                    if w.shift_vector().iter().any(|s| s.abs() > self.shift_bound) {
                        return Outcome::Escaped;
                    }
                    if !index.contains_key(&w) {
                        index.insert(w.clone(), vertices.len());
                        vertices.push(w);
                        queue.push_back(vertices.len() - 1);
                    }
                }
            }
        }
        Outcome::Closed { vertices, read }
    }
}

/// Encoding of the labeled graph seen from `root`, following edges in a fixed order.
fn encode_from(report: &ValidationReport, n: usize, root: usize) -> String {
    let mut adj: Vec<Vec<(u8, usize, String, usize)>> = vec![Vec::new(); n];
    for e in &report.edges {
        adj[e.from].push((0, e.term, e.weight.to_string(), e.to));
        adj[e.to].push((1, e.term, e.weight.to_string(), e.from));
    }
    for a in &mut adj {
        a.sort();
    }
    let mut order = vec![usize::MAX; n];
    order[root] = 0;
    let mut seq = vec![root];
    let mut i = 0;
    let mut out = String::new();
    while i < seq.len() {
        let v = seq[i];
        out.push('(');
        for (dir, term, w, u) in &adj[v] {
            if order[*u] == usize::MAX {
                order[*u] = seq.len();
                seq.push(*u);
            }
            out.push_str(&format!("{}{}:{}>{};", if *dir == 0 { '+' } else { '-' }, term, w, order[*u]));
        }
        out.push(')');
        i += 1;
    }
    out
}

fn canonical_form(report: &ValidationReport, n: usize) -> String {
    (0..n).map(|r| encode_from(report, n, r)).min().unwrap_or_default()
}

fn fnv(s: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

pub fn component_census(d: &Arc<TDecomposition>, window_size: usize) -> Result<Census> {
    let window = census_window(d, window_size);
    if window.len() > DEFAULT_WINDOW_CAP {
        return Err(Error::WindowCap { size: window.len(), cap: DEFAULT_WINDOW_CAP });
    }
    let max_term_shift = (0..d.len())
        .flat_map(|k| d.gamma(k).shift_vector().iter().map(|s| s.abs()))
        .max()
        .unwrap_or(0);
    let explorer = Explorer {
        d,
        pos: window.iter().enumerate().map(|(i, c)| (*c, i)).collect(),
        shift_bound: window_size as i64 + 2 * max_term_shift,
    };
    let action = d.action();

    let found: Vec<(Vec<Projection>, Vec<GroupElement>)> = (0..1u64 << window.len())
        .into_par_iter()
        .filter_map(|x| match explorer.explore(x) {
            Outcome::Escaped => None,
            Outcome::Closed { vertices, read } => {
                let fixed: Vec<(Coord, bool)> = read.into_iter().collect();
                let base = Projection::cylinder(&fixed).ok()?;
                let ps: Vec<Projection> =
                    vertices.iter().map(|g| action.act(g, &base)).collect::<Result<_>>().ok()?;
                Some((ps, vertices))
            }
        })
        .collect();

    // deduplicate by vertex set; the first seed in enumeration order fixes the base vertex
    let mut seen: HashMap<Vec<Projection>, ()> = HashMap::new();
    let mut unique = Vec::new();
    for (ps, offsets) in found {
        let mut key = ps.clone();
        key.sort();
        if seen.insert(key, ()).is_none() {
            unique.push((ps, offsets));
        }
    }

    let mut components = Vec::new();
    let mut rejected = 0;
    for (ps, offsets) in unique {
        let report = validate_tgraph(&ps, d)?;
        let tgraph = TGraph { decomposition: d.clone(), projections: ps };
        if !report.is_valid() || !simply_connected(&RGraph::of(&tgraph, &report), d.group()).simply_connected() {
            rejected += 1;
            continue;
        }
        let n = tgraph.projections.len();
        let measure = &tgraph.projections[0].measure() * &Dyadic::from_int(n as i64);
        let type_key = canonical_form(&report, n);
        components.push(CensusComponent { tgraph, report, offsets, measure, type_key });
    }
    components.sort_by(|a, b| {
        (a.size(), &a.type_key, &a.tgraph.projections).cmp(&(b.size(), &b.type_key, &b.tgraph.projections))
    });

    let mut types: Vec<CensusType> = Vec::new();
    for (i, c) in components.iter().enumerate() {
        match types.iter_mut().find(|t| t.canonical == c.type_key) {
            Some(t) => {
                t.components += 1;
                t.measure = &t.measure + &c.measure;
            }
            None => types.push(CensusType {
                type_id: format!("t{}-{:08x}", c.size(), fnv(&c.type_key) as u32),
                canonical: c.type_key.clone(),
                vertices: c.size(),
                components: 1,
                measure: c.measure.clone(),
                representative: i,
            }),
        }
    }
    let interior_measure: Dyadic = components.iter().map(|c| &c.measure).sum();
    let boundary_measure = uncovered_measure(&window, &components)?;
    Ok(Census { window, components, types, interior_measure, boundary_measure, rejected })
}

/// Measure of the complement of all component vertices, counted atom by atom on a common window.
fn uncovered_measure(window: &[Coord], components: &[CensusComponent]) -> Result<Dyadic> {
    let mut all: Vec<Coord> = window.to_vec();
    for c in components {
        for p in &c.tgraph.projections {
            all.extend_from_slice(p.window());
        }
    }
    all.sort();
    all.dedup();
    if all.len() > DEFAULT_WINDOW_CAP {
        return Err(Error::WindowCap { size: all.len(), cap: DEFAULT_WINDOW_CAP });
    }
    let mut covered = vec![false; 1 << all.len()];
    for c in components {
        for p in &c.tgraph.projections {
            for (i, inside) in p.extend_to(&all)?.into_iter().enumerate() {
                if inside {
                    if covered[i] {
                        return Err(Error::Invalid("census components overlap".into()));
                    }
                    covered[i] = true;
                }
            }
        }
    }
    let free = covered.iter().filter(|c| !**c).count();
    Ok(Dyadic::new(free, all.len() as u32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{GroupRingElement, GroupSpec};

    #[test]
    fn identity_operator_has_one_type() {
        let g = Arc::new(GroupSpec::lamplighter());
        let d = Arc::new(TDecomposition::new(&g, vec![(g.identity(), GroupRingElement::one(&g))]).unwrap());
        let c = component_census(&d, 2).unwrap();
        assert_eq!(c.types.len(), 1);
        assert_eq!(c.types[0].vertices, 1);
        assert_eq!(c.types[0].measure, Dyadic::from_int(1));
        assert_eq!(c.boundary_measure, Dyadic::from_int(0));
    }

    #[test]
    fn lamplighter_paths() {
        let d = Arc::new(TDecomposition::from_matrix(&crate::presets::lamplighter()).unwrap());
        let c = component_census(&d, 8).unwrap();
        assert_eq!(c.rejected, 0);
        for (k, t) in (1..).zip(&c.types) {
            assert_eq!(t.vertices, k);
            assert_eq!(t.components, 1);
            assert_eq!(t.measure, Dyadic::new(k as i64, (k + 1) as u32));
        }
        assert!(c.types.len() >= 6);
        let dims = c.kernel_dims(FieldSpec::prime(3).unwrap()).unwrap();
        for (k, dim) in (1..).zip(dims) {
            assert_eq!(dim, k % 2, "path with {k} vertices");
        }
        assert_eq!(&c.interior_measure + &c.boundary_measure, Dyadic::from_int(1));
    }
}
