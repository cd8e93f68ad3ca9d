//! Labeled graph families with known kernel dimensions: paths, loop-trees with their `α`/`β`
//! labelings, and the three families `G1(k)`, `G2(l)`, `G3(k,l)`.
//!
//! All adjacency matrices use `M[w][v] = label(v → w)`, so the kernel equation at `w` reads
//! `Σ_{v → w} label·f(v) = 0`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{joint_kernel_dim, kernel_dim, pow_mod, rank, Dyadic, ExactMatrix, ExactScalar, FieldSpec};

/// Directed graph with at most one dyadic label per ordered pair of vertices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LabeledGraph {
    vertices: usize,
    edges: BTreeMap<(usize, usize), Dyadic>,
}

impl LabeledGraph {
    pub fn new(vertices: usize) -> Self {
        LabeledGraph { vertices, edges: BTreeMap::new() }
    }

    /// Adds `from → to`; a second label on the same pair is an error, as is a zero label.
    pub fn add_edge(&mut self, from: usize, to: usize, label: impl Into<Dyadic>) -> Result<()> {
        let label = label.into();
        if from >= self.vertices || to >= self.vertices {
            return Err(Error::Invalid(format!("edge {from} -> {to} outside {} vertices", self.vertices)));
        }
        if num_traits::Zero::is_zero(&label) {
            return Err(Error::Invalid("edge labels must be nonzero".into()));
        }
        if self.edges.insert((from, to), label).is_some() {
            return Err(Error::Invalid(format!("edge {from} -> {to} labeled twice")));
        }
        Ok(())
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, &Dyadic)> {
        self.edges.iter().map(|(&(a, b), l)| (a, b, l))
    }

    pub fn matrix(&self, field: FieldSpec) -> ExactMatrix {
        ExactMatrix::from_dyadic_triplets(self.vertices, self.vertices, field, self.edges().map(|(a, b, l)| (b, a, l)))
            .expect("edges are in range")
    }
}

/// A rooted tree (root 0, edges towards the root) with self-loops at internal vertices, at
/// leaves flagged `external_loop`, and at the root when `root_loop`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopTreeSpec {
    parent: Vec<Option<usize>>,
    external_loop: Vec<bool>,
    root_loop: bool,
}

impl LoopTreeSpec {
    /// `parent[0]` must be `None` and every other vertex needs a parent with a smaller index.
    /// Loop flags on non-leaves are ignored.
    pub fn new(parent: Vec<Option<usize>>, external_loop: Vec<bool>, root_loop: bool) -> Result<Self> {
        if parent.is_empty() || parent[0].is_some() {
            return Err(Error::Invalid("vertex 0 must be the root".into()));
        }
        if external_loop.len() != parent.len() {
            return Err(Error::Shape("one loop flag per vertex".into()));
        }
        for (v, p) in parent.iter().enumerate().skip(1) {
            match p {
                Some(p) if *p < v => {}
                _ => return Err(Error::Invalid(format!("vertex {v} needs a parent with smaller index"))),
            }
        }
        let spec = LoopTreeSpec { parent, external_loop, root_loop };
        if spec.a() < spec.b() || spec.a() == 0 {
            return Err(Error::Invalid(format!("type ({}, {}) needs a ≥ max(b, 1)", spec.a(), spec.b())));
        }
        Ok(spec)
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    fn has_children(&self) -> Vec<bool> {
        let mut c = vec![false; self.len()];
        for p in self.parent.iter().flatten() {
            c[*p] = true;
        }
        c
    }

    /// Vertices without incoming tree edges.
    pub fn leaves(&self) -> Vec<usize> {
        let c = self.has_children();
        (0..self.len()).filter(|&v| !c[v]).collect()
    }

    /// Leaves without an external loop; a lone root counts as one.
    pub fn open_leaves(&self) -> Vec<usize> {
        self.leaves().into_iter().filter(|&v| v == 0 || !self.external_loop[v]).collect()
    }

    pub fn a(&self) -> usize {
        self.open_leaves().len()
    }

    pub fn b(&self) -> usize {
        self.root_loop as usize
    }

    fn has_loop(&self, v: usize, children: &[bool]) -> bool {
        if v == 0 {
            self.root_loop
        } else if children[v] {
            true
        } else {
            self.external_loop[v]
        }
    }

    /// The underlying graph with every edge labeled 1.
    pub fn graph(&self) -> LabeledGraph {
        let children = self.has_children();
        let mut g = LabeledGraph::new(self.len());
        for v in 0..self.len() {
            if let Some(p) = self.parent[v] {
                g.add_edge(v, p, 1).expect("tree edge");
            }
            if self.has_loop(v, &children) {
                g.add_edge(v, v, 1).expect("loop");
            }
        }
        g
    }

    /// `v − n(v) + n²(v) − … ± r`.
    pub fn xi(&self, v: usize) -> Vec<Dyadic> {
        let mut out = vec![Dyadic::from_int(0); self.len()];
        let mut sign = 1;
        let mut cur = Some(v);
        while let Some(u) = cur {
            out[u] = Dyadic::from_int(sign);
            sign = -sign;
            cur = self.parent[u];
        }
        out
    }
}

impl fmt::Display for LoopTreeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "loop-tree({} vertices, type ({}, {}))", self.len(), self.a(), self.b())
    }
}

/// `(M(α), M(β))`: `α` is the graph with labels 1; `β` is zero unless the root has a loop, in
/// which case only the root loop survives, labeled 1.
pub fn build_loop_tree_pair(spec: &LoopTreeSpec, field: FieldSpec) -> (ExactMatrix, ExactMatrix) {
    let alpha = spec.graph().matrix(field);
    let mut beta = ExactMatrix::zeros(spec.len(), spec.len(), field);
    if spec.root_loop {
        beta.set(0, 0, field.one()).expect("in range");
    }
    (alpha, beta)
}

/// Vectors that should span `ker M(α)`: `ξ(v)` over open leaves when the root has a loop;
/// otherwise the root indicator and differences `±ξ(v) ∓ ξ(v₀)`, signed to agree at the root.
pub fn loop_tree_kernel_basis(spec: &LoopTreeSpec) -> Vec<Vec<Dyadic>> {
    let leaves = spec.open_leaves();
    if spec.len() == 1 {
        return if spec.root_loop { Vec::new() } else { vec![vec![Dyadic::from_int(1)]] };
    }
    if spec.root_loop {
        return leaves.iter().map(|&v| spec.xi(v)).collect();
    }
    let mut root = vec![Dyadic::from_int(0); spec.len()];
    root[0] = Dyadic::from_int(1);
    // sign so the root entry is +1; otherwise the root's children do not cancel
    let rooted = |v: usize| {
        let x = spec.xi(v);
        let s = x[0].clone();
        x.iter().map(|c| c * &s).collect::<Vec<_>>()
    };
    let x0 = rooted(leaves[0]);
    let mut out = vec![root];
    out.extend(leaves[1..].iter().map(|&v| rooted(v).iter().zip(&x0).map(|(a, b)| a - b).collect::<Vec<_>>()));
    out
}

/// Joint kernel dimension of `M(α)` and `M(β)`, after checking that the explicit basis lies in
/// `ker M(α)`, is independent, and has the size of that kernel.
pub fn loop_tree_joint_kernel(spec: &LoopTreeSpec, field: FieldSpec) -> Result<usize> {
    let (alpha, beta) = build_loop_tree_pair(spec, field);
    let basis = loop_tree_kernel_basis(spec);
    let reduced: Vec<Vec<ExactScalar>> =
        basis.iter().map(|v| v.iter().map(|x| field.reduce(x)).collect()).collect();
    for v in &reduced {
        if alpha.apply(v)?.iter().any(|x| !x.is_zero()) {
            return Err(Error::Invalid(format!("basis vector outside ker M(α) for {spec}")));
        }
    }
    let stacked = ExactMatrix::from_triplets(
        reduced.len(),
        spec.len(),
        field,
        reduced.iter().enumerate().flat_map(|(r, v)| {
            v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(move |(c, x)| (r, c, x.clone()))
        }),
    )?;
    let alpha_kernel = kernel_dim(&alpha);
    if rank(&stacked) != reduced.len() || reduced.len() != alpha_kernel {
        return Err(Error::Invalid(format!("basis does not span ker M(α) for {spec}")));
    }
    joint_kernel_dim(&[alpha, beta])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyParams {
    G1 { k: usize },
    G2 { l: usize },
    G3 { k: usize, l: usize },
    Path { k: usize },
}

impl FamilyParams {
    pub fn vertex_count(&self) -> usize {
        match *self {
            FamilyParams::G1 { k } => 2 * k,
            FamilyParams::G2 { l } => 2 * l + 1,
            FamilyParams::G3 { k, l } => 2 * k + 2 * l + 2,
            FamilyParams::Path { k } => k,
        }
    }

    fn check(&self) -> Result<()> {
        let ok = match *self {
            FamilyParams::G1 { k } | FamilyParams::Path { k } => k > 0,
            FamilyParams::G2 { l } => l > 0,
            FamilyParams::G3 { k, l } => k > 0 && l > 0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Invalid(format!("{self}: parameters must be positive")))
        }
    }
}

impl fmt::Display for FamilyParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyParams::G1 { k } => write!(f, "G1({k})"),
            FamilyParams::G2 { l } => write!(f, "G2({l})"),
            FamilyParams::G3 { k, l } => write!(f, "G3({k},{l})"),
            FamilyParams::Path { k } => write!(f, "Path({k})"),
        }
    }
}

impl std::str::FromStr for FamilyParams {
    type Err = Error;

    /// `G1:k`, `G2:l`, `G3:k:l` or `Path:k`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |i: usize| -> Result<usize> {
            parts
                .get(i)
                .and_then(|x| x.trim().parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad family parameters in {s:?}")))
        };
        let p = match (parts[0].to_ascii_lowercase().as_str(), parts.len()) {
            ("g1", 2) => FamilyParams::G1 { k: num(1)? },
            ("g2", 2) => FamilyParams::G2 { l: num(1)? },
            ("g3", 3) => FamilyParams::G3 { k: num(1)?, l: num(2)? },
            ("path", 2) => FamilyParams::Path { k: num(1)? },
            _ => return Err(Error::Parse(format!("unknown family {s:?}"))),
        };
        p.check()?;
        Ok(p)
    }
}

/// Vertex names in index order, matching `build_family_graph`.
pub fn family_vertex_names(p: FamilyParams) -> Vec<String> {
    let seq = |name: &str, n: usize| (1..=n).map(move |i| format!("{name}{i}")).collect::<Vec<_>>();
    match p {
        FamilyParams::G1 { k } => [seq("A", k), seq("B", k)].concat(),
        FamilyParams::G2 { l } => [seq("C", l), seq("D", l), vec!["F".into()]].concat(),
        FamilyParams::G3 { k, l } => {
            [seq("A", k), seq("B", k), vec!["I".into()], seq("C", l), seq("D", l), vec!["F".into()]].concat()
        }
        FamilyParams::Path { k } => seq("P", k),
    }
}

/// The doubling cycle `A_1 → … → A_k → B_1 → … → B_k → A_1`, self-loops everywhere. Vertices
/// `A_i = i − 1`, `B_i = k + i − 1`.
fn doubling_cycle(g: &mut LabeledGraph, k: usize, closing: i64) -> Result<()> {
    for i in 0..k {
        if i + 1 < k {
            g.add_edge(i, i + 1, -2)?;
            g.add_edge(k + i, k + i + 1, -1)?;
        }
    }
    g.add_edge(k - 1, k, -1)?;
    g.add_edge(2 * k - 1, 0, closing)?;
    for v in 0..2 * k {
        g.add_edge(v, v, 1)?;
    }
    Ok(())
}

/// The tail `C_1..C_l`, `D_1..D_l`, `F` starting at vertex `c0`; `C_1` is fed by `feed` if given.
fn countdown_tail(g: &mut LabeledGraph, c0: usize, l: usize, feed: Option<usize>) -> Result<()> {
    let c = |i: usize| c0 + i;
    let d = |i: usize| c0 + l + i;
    let f = c0 + 2 * l;
    if let Some(src) = feed {
        g.add_edge(src, c(0), -1)?;
    }
    g.add_edge(c(0), d(0), 1)?;
    for i in 0..l - 1 {
        g.add_edge(c(i), c(i + 1), -1)?;
        g.add_edge(d(i), d(i + 1), -1)?;
        g.add_edge(c(i + 1), d(i + 1), 1)?;
    }
    g.add_edge(d(l - 1), f, 1)?;
    for v in c0..f {
        g.add_edge(v, v, 1)?;
    }
    Ok(())
}

pub fn build_family_graph(p: FamilyParams) -> Result<LabeledGraph> {
    p.check()?;
    let mut g = LabeledGraph::new(p.vertex_count());
    match p {
        FamilyParams::Path { k } => {
            for i in 0..k.saturating_sub(1) {
                g.add_edge(i, i + 1, 1)?;
                g.add_edge(i + 1, i, 1)?;
            }
        }
        // with k = 1 there is no doubling step and a closing label -1 would leave a kernel
        FamilyParams::G1 { k } => doubling_cycle(&mut g, k, if k == 1 { 1 } else { -1 })?,
        FamilyParams::G2 { l } => countdown_tail(&mut g, 0, l, None)?,
        FamilyParams::G3 { k, l } => {
            doubling_cycle(&mut g, k, -1)?;
            let i = 2 * k;
            g.add_edge(i, 0, 1)?;
            g.add_edge(i, i + 1 + l, -1)?;
            countdown_tail(&mut g, i + 1, l, Some(0))?;
        }
    }
    Ok(g)
}

pub fn build_family(p: FamilyParams, field: FieldSpec) -> Result<ExactMatrix> {
    Ok(build_family_graph(p)?.matrix(field))
}

/// `2^e` in the field, compared with `x`.
fn pow2_equals(e: usize, x: i64, field: FieldSpec) -> bool {
    if field.is_rational() {
        return e < 63 && (1i64 << e) == x;
    }
    let p = field.characteristic();
    let lhs = pow_mod(2, e as u64, p);
    lhs == x.rem_euclid(p as i64) as u64
}

/// Kernel dimension from the closed-form case analysis.
pub fn family_kernel_dim(p: FamilyParams, field: FieldSpec) -> usize {
    match p {
        FamilyParams::Path { k } => k % 2,
        FamilyParams::G1 { k } => (k > 1 && pow2_equals(k - 1, 1, field)) as usize,
        FamilyParams::G2 { .. } => 1,
        FamilyParams::G3 { k, l } => {
            // l = 2^{k-1} - 1  ⟺  2^{k-1} = l + 1
            if field.is_rational() {
                1 + (k - 1 < 63 && (1u64 << (k - 1)) == l as u64 + 1) as usize
            } else {
                1 + pow2_equals(k - 1, l as i64 + 1, field) as usize
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64) -> FieldSpec {
        FieldSpec::prime(p).unwrap()
    }

    #[test]
    fn single_root() {
        let s = LoopTreeSpec::new(vec![None], vec![false], false).unwrap();
        let (a, b) = build_loop_tree_pair(&s, FieldSpec::rationals());
        assert_eq!(a.nnz() + b.nnz(), 0);
        assert_eq!(loop_tree_joint_kernel(&s, FieldSpec::rationals()).unwrap(), 1);
    }

    #[test]
    fn star_and_broom() {
        // root with one open leaf and a root loop
        let star = LoopTreeSpec::new(vec![None, Some(0)], vec![false; 2], true).unwrap();
        assert_eq!((star.a(), star.b()), (1, 1));
        assert_eq!(loop_tree_joint_kernel(&star, gf(3)).unwrap(), 0);
        // a handle 0 <- 1 with three open leaves on vertex 1
        let broom = LoopTreeSpec::new(vec![None, Some(0), Some(1), Some(1), Some(1)], vec![false; 5], false).unwrap();
        assert_eq!(broom.a(), 3);
        for f in [FieldSpec::rationals(), gf(3), gf(5), gf(7)] {
            assert_eq!(loop_tree_joint_kernel(&broom, f).unwrap(), 3);
        }
    }

    #[test]
    fn type_two_one() {
        let s = LoopTreeSpec::new(vec![None, Some(0), Some(1), Some(1), Some(0)], vec![false, false, false, false, true], true)
            .unwrap();
        assert_eq!((s.a(), s.b()), (2, 1));
        assert_eq!(loop_tree_joint_kernel(&s, gf(5)).unwrap(), 1);
    }

    #[test]
    fn family_examples() {
        let dim = |p: FamilyParams, f: FieldSpec| kernel_dim(&build_family(p, f).unwrap());
        assert_eq!(dim(FamilyParams::Path { k: 5 }, gf(7)), 1);
        assert_eq!(dim(FamilyParams::G1 { k: 3 }, gf(3)), 1);
        assert_eq!(dim(FamilyParams::G1 { k: 1 }, gf(3)), 0);
        assert_eq!(dim(FamilyParams::G3 { k: 4, l: 7 }, FieldSpec::rationals()), 2);
        assert_eq!(dim(FamilyParams::G3 { k: 4, l: 2 }, gf(5)), 2);
        assert_eq!(family_kernel_dim(FamilyParams::G3 { k: 5, l: 15 }, FieldSpec::rationals()), 2);
        assert_eq!(dim(FamilyParams::G3 { k: 5, l: 15 }, FieldSpec::rationals()), 2);
        for l in 1..6 {
            assert_eq!(dim(FamilyParams::G2 { l }, gf(3)), 1);
        }
    }

    #[test]
    fn vertex_counts() {
        for p in [FamilyParams::G1 { k: 4 }, FamilyParams::G2 { l: 3 }, FamilyParams::G3 { k: 2, l: 5 }, FamilyParams::Path { k: 6 }] {
            assert_eq!(build_family_graph(p).unwrap().vertices(), p.vertex_count());
            assert_eq!(family_vertex_names(p).len(), p.vertex_count());
        }
    }
}
