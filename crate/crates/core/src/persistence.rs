//! Extended persistence diagrams of node-weighted graphs.
//!
//! The diagram is computed from one boundary-matrix reduction over GF(2) of
//! the extended filtration: the ascending lower-star part (vertices and
//! edges of the graph), then the descending relative part realized by
//! coning the superlevel sets. A rank-based oracle recovers the same
//! diagram from persistent Betti numbers for small graphs.

use crate::error::{input_err, Error, Result};

/// A multigraph with one real value per vertex. Parallel edges are allowed,
/// self-loops are not.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    values: Vec<f64>,
    edges: Vec<(usize, usize)>,
}

impl WeightedGraph {
    pub fn new(values: Vec<f64>, edges: Vec<(usize, usize)>) -> Result<Self> {
        if values.is_empty() {
            return input_err("weighted graph needs at least one vertex");
        }
        if values.iter().any(|v| !v.is_finite()) {
            return input_err("vertex values must be finite");
        }
        let n = values.len();
        let mut normalized = Vec::with_capacity(edges.len());
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return input_err(format!("edge ({u},{v}) out of range"));
            }
            if u == v {
                return input_err(format!("self-loop at vertex {u}"));
            }
            normalized.push((u.min(v), u.max(v)));
        }
        Ok(Self {
            values,
            edges: normalized,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn component_count(&self) -> usize {
        let mut uf = crate::geometry::UnionFind::new(self.len());
        let mut merges = 0;
        for &(u, v) in &self.edges {
            if uf.union(u, v) {
                merges += 1;
            }
        }
        self.len() - merges
    }

    /// |E| - |V| + number of components.
    pub fn betti_one(&self) -> usize {
        self.edges.len() + self.component_count() - self.len()
    }
}

/// Where a diagram point lives in the extended filtration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PointType {
    /// Downward branches; birth < death.
    Ord0,
    /// Upward branches; birth > death.
    Rel1,
    /// Trunks (connected components); birth <= death.
    Ext0,
    /// Holes; birth >= death.
    Ext1,
}

impl PointType {
    pub const ALL: [PointType; 4] = [
        PointType::Ord0,
        PointType::Rel1,
        PointType::Ext0,
        PointType::Ext1,
    ];

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "Ord0" => Ok(Self::Ord0),
            "Rel1" => Ok(Self::Rel1),
            "Ext0" => Ok(Self::Ext0),
            "Ext1" => Ok(Self::Ext1),
            _ => input_err(format!("unknown point type '{s}'")),
        }
    }
}

impl std::fmt::Display for PointType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::Ord0 => "Ord0",
            Self::Rel1 => "Rel1",
            Self::Ext0 => "Ext0",
            Self::Ext1 => "Ext1",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagramPoint {
    pub ptype: PointType,
    pub birth: f64,
    pub death: f64,
}

impl DiagramPoint {
    pub fn new(ptype: PointType, birth: f64, death: f64) -> Self {
        Self {
            ptype,
            birth,
            death,
        }
    }

    /// Vertical distance to the diagonal in the sup norm.
    pub fn diagonal_gap(&self) -> f64 {
        (self.birth - self.death).abs() / 2.0
    }

    pub fn persistence(&self) -> f64 {
        (self.birth - self.death).abs()
    }
}

/// Multiset of typed diagram points, kept in a canonical order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExtendedDiagram {
    pub points: Vec<DiagramPoint>,
}

impl ExtendedDiagram {
    pub fn new(mut points: Vec<DiagramPoint>) -> Self {
        sort_points(&mut points);
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn of_type(&self, t: PointType) -> impl Iterator<Item = &DiagramPoint> {
        self.points.iter().filter(move |p| p.ptype == t)
    }

    pub fn count(&self, t: PointType) -> usize {
        self.of_type(t).count()
    }
}

fn sort_points(points: &mut [DiagramPoint]) {
    points.sort_by(|a, b| {
        a.ptype
            .cmp(&b.ptype)
            .then(a.birth.total_cmp(&b.birth))
            .then(a.death.total_cmp(&b.death))
    });
}

/// Zero-persistence handling. The default drops birth = death points except
/// Ext0 (a component concentrated at one level is a real feature); keeping
/// them is exposed for sensitivity checks.
#[derive(Debug, Clone, Copy)]
pub struct DiagramOptions {
    pub keep_zero_persistence: bool,
}

impl Default for DiagramOptions {
    fn default() -> Self {
        Self {
            keep_zero_persistence: false,
        }
    }
}

// ---------------------------------------------------------------------------
// Extended filtration of the cone complex.
//
// Position 0 holds the cone apex, which realizes the reduced-homology
// convention: the one essential class of the (contractible) full cone is
// carried by the apex and discarded. Ascending part: vertices in (value,
// index) order, each edge right after its later endpoint. Relative part:
// apex-to-vertex edges in descending vertex order, each coned edge right
// after its lower endpoint's cone edge.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Simplex {
    Apex,
    Vertex(usize),
    Edge(usize),
    ConeEdge(usize),
    ConeTriangle(usize),
}

struct Filtration {
    simplices: Vec<Simplex>,
    /// Boundary of each simplex as sorted row positions.
    boundaries: Vec<Vec<usize>>,
    /// Filtration value of each simplex (apex carries the global max).
    values: Vec<f64>,
}

impl Filtration {
    fn dim(&self, pos: usize) -> usize {
        match self.simplices[pos] {
            Simplex::Apex | Simplex::Vertex(_) => 0,
            Simplex::Edge(_) | Simplex::ConeEdge(_) => 1,
            Simplex::ConeTriangle(_) => 2,
        }
    }

    fn len(&self) -> usize {
        self.simplices.len()
    }
}

fn build_filtration(g: &WeightedGraph) -> Filtration {
    let n = g.len();
    let f = g.values();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| f[a].total_cmp(&f[b]).then(a.cmp(&b)));
    let mut rank = vec![0usize; n];
    for (r, &v) in order.iter().enumerate() {
        rank[v] = r;
    }

    let edge_ranks: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .map(|&(u, v)| {
            let (ru, rv) = (rank[u], rank[v]);
            (ru.min(rv), ru.max(rv))
        })
        .collect();

    // edges grouped by the rank of their later endpoint / earlier endpoint
    let mut asc_at = vec![Vec::new(); n];
    let mut desc_at = vec![Vec::new(); n];
    for (e, &(lo, hi)) in edge_ranks.iter().enumerate() {
        asc_at[hi].push((lo, e));
        desc_at[lo].push((hi, e));
    }
    for group in &mut asc_at {
        group.sort_unstable();
    }
    for group in &mut desc_at {
        group.sort_unstable_by(|a, b| b.cmp(a));
    }

    let total = 1 + 2 * (n + g.edges().len());
    let mut simplices = Vec::with_capacity(total);
    simplices.push(Simplex::Apex);
    for r in 0..n {
        simplices.push(Simplex::Vertex(order[r]));
        for &(_, e) in &asc_at[r] {
            simplices.push(Simplex::Edge(e));
        }
    }
    for r in (0..n).rev() {
        simplices.push(Simplex::ConeEdge(order[r]));
        for &(_, e) in &desc_at[r] {
            simplices.push(Simplex::ConeTriangle(e));
        }
    }
    debug_assert_eq!(simplices.len(), total);

    let mut vertex_pos = vec![0usize; n];
    let mut edge_pos = vec![0usize; g.edges().len()];
    let mut cone_edge_pos = vec![0usize; n];
    for (pos, s) in simplices.iter().enumerate() {
        match *s {
            Simplex::Vertex(v) => vertex_pos[v] = pos,
            Simplex::Edge(e) => edge_pos[e] = pos,
            Simplex::ConeEdge(v) => cone_edge_pos[v] = pos,
            _ => {}
        }
    }

    let mut boundaries = Vec::with_capacity(total);
    let mut values = Vec::with_capacity(total);
    for s in &simplices {
        let (bd, val) = match *s {
            Simplex::Apex => (Vec::new(), f[order[n - 1]]),
            Simplex::Vertex(v) => (Vec::new(), f[v]),
            Simplex::Edge(e) => {
                let (u, v) = g.edges()[e];
                let mut bd = vec![vertex_pos[u], vertex_pos[v]];
                bd.sort_unstable();
                (bd, f[u].max(f[v]))
            }
            Simplex::ConeEdge(v) => (vec![0, vertex_pos[v]], f[v]),
            Simplex::ConeTriangle(e) => {
                let (u, v) = g.edges()[e];
                let mut bd = vec![edge_pos[e], cone_edge_pos[u], cone_edge_pos[v]];
                bd.sort_unstable();
                (bd, f[u].min(f[v]))
            }
        };
        boundaries.push(bd);
        values.push(val);
    }

    Filtration {
        simplices,
        boundaries,
        values,
    }
}

fn xor_merge(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn classify(filt: &Filtration, birth: usize, death: usize) -> Result<PointType> {
    match (filt.simplices[birth], filt.simplices[death]) {
        (Simplex::Vertex(_), Simplex::Edge(_)) => Ok(PointType::Ord0),
        (Simplex::Vertex(_), Simplex::ConeEdge(_)) => Ok(PointType::Ext0),
        (Simplex::Edge(_), Simplex::ConeTriangle(_)) => Ok(PointType::Ext1),
        (Simplex::ConeEdge(_), Simplex::ConeTriangle(_)) => Ok(PointType::Rel1),
        (b, d) => Err(Error::Internal(format!(
            "impossible persistence pair {b:?} -> {d:?}"
        ))),
    }
}

fn pairs_to_diagram(
    filt: &Filtration,
    pairs: &[(usize, usize)],
    opts: DiagramOptions,
) -> Result<ExtendedDiagram> {
    let mut points = Vec::new();
    for &(i, j) in pairs {
        let ptype = classify(filt, i, j)?;
        let (birth, death) = (filt.values[i], filt.values[j]);
        if !opts.keep_zero_persistence && birth == death && ptype != PointType::Ext0 {
            continue;
        }
        points.push(DiagramPoint::new(ptype, birth, death));
    }
    Ok(ExtendedDiagram::new(points))
}

/// Extended persistence diagram of `g` (default zero-persistence policy).
pub fn extended_diagram(g: &WeightedGraph) -> Result<ExtendedDiagram> {
    extended_diagram_with(g, DiagramOptions::default())
}

/// Extended persistence diagram via the standard left-to-right column
/// reduction of the cone filtration's boundary matrix over GF(2).
pub fn extended_diagram_with(g: &WeightedGraph, opts: DiagramOptions) -> Result<ExtendedDiagram> {
    let filt = build_filtration(g);
    let m = filt.len();
    let mut pivot_owner: Vec<Option<usize>> = vec![None; m];
    let mut reduced: Vec<Vec<usize>> = Vec::with_capacity(m);
    let mut pairs = Vec::new();
    for j in 0..m {
        let mut col = filt.boundaries[j].clone();
        loop {
            let Some(&pivot) = col.last() else { break };
            match pivot_owner[pivot] {
                Some(k) => col = xor_merge(&col, &reduced[k]),
                None => {
                    pivot_owner[pivot] = Some(j);
                    pairs.push((pivot, j));
                    break;
                }
            }
        }
        reduced.push(col);
    }
    pairs_to_diagram(&filt, &pairs, opts)
}

// ---------------------------------------------------------------------------
// Rank oracle: diagram multiplicities from persistent Betti numbers
// mu^{i,j} = (beta^{i,j-1} - beta^{i,j}) - (beta^{i-1,j-1} - beta^{i-1,j})
// computed by GF(2) Gaussian elimination at every filtration prefix pair.
// ---------------------------------------------------------------------------

const ORACLE_MAX: usize = 24;

/// Incremental GF(2) rank of masked bit-columns.
struct Gf2Basis {
    by_lead: [u64; 64],
    rank: u16,
}

impl Gf2Basis {
    fn new() -> Self {
        Self {
            by_lead: [0; 64],
            rank: 0,
        }
    }

    fn insert(&mut self, mut col: u64) {
        while col != 0 {
            let lead = 63 - col.leading_zeros() as usize;
            if self.by_lead[lead] == 0 {
                self.by_lead[lead] = col;
                self.rank += 1;
                return;
            }
            col ^= self.by_lead[lead];
        }
    }
}

/// Independent verification oracle for [`extended_diagram`], limited to
/// graphs with at most 24 cells.
pub fn diagram_oracle(g: &WeightedGraph) -> Result<ExtendedDiagram> {
    diagram_oracle_with(g, DiagramOptions::default())
}

pub fn diagram_oracle_with(g: &WeightedGraph, opts: DiagramOptions) -> Result<ExtendedDiagram> {
    if g.len() + g.edges().len() > ORACLE_MAX {
        return input_err(format!(
            "oracle size guard: {} vertices + {} edges > {ORACLE_MAX}",
            g.len(),
            g.edges().len()
        ));
    }
    let filt = build_filtration(g);
    let m = filt.len();
    debug_assert!(m <= 64);

    let masks: Vec<u64> = (0..m)
        .map(|pos| {
            filt.boundaries[pos]
                .iter()
                .fold(0u64, |acc, &row| acc | (1u64 << row))
        })
        .collect();

    // prefix counts of cells by dimension
    let mut vcount = vec![0u16; m + 1];
    let mut ecount = vec![0u16; m + 1];
    for pos in 0..m {
        vcount[pos + 1] = vcount[pos] + (filt.dim(pos) == 0) as u16;
        ecount[pos + 1] = ecount[pos] + (filt.dim(pos) == 1) as u16;
    }

    // rank_d[d][i][j]: rank of the dim-(d+1) boundary columns of the first j
    // simplices, rows restricted to positions >= i. i = 0 gives the plain rank.
    let rank_table = |dim: usize| -> Vec<Vec<u16>> {
        (0..=m)
            .map(|i| {
                let mask = if i == 0 { u64::MAX } else { u64::MAX << i };
                let mut basis = Gf2Basis::new();
                let mut row = Vec::with_capacity(m + 1);
                row.push(0u16);
                for pos in 0..m {
                    if filt.dim(pos) == dim {
                        basis.insert(masks[pos] & mask);
                    }
                    row.push(basis.rank);
                }
                row
            })
            .collect()
    };
    let r1 = rank_table(1);
    let r2 = rank_table(2);

    // beta_p^{i,j} = dim Z_p(K_i) - dim(B_p(K_j) intersected with C_p(K_i))
    let beta0 = |i: usize, j: usize| -> i32 {
        vcount[i] as i32 - (r1[0][j] as i32 - r1[i][j] as i32)
    };
    let beta1 = |i: usize, j: usize| -> i32 {
        (ecount[i] as i32 - r1[0][i] as i32) - (r2[0][j] as i32 - r2[i][j] as i32)
    };

    let mut pairs = Vec::new();
    for i in 1..m {
        for j in (i + 1)..=m {
            for (p, beta) in [(0usize, &beta0 as &dyn Fn(usize, usize) -> i32), (1, &beta1)] {
                let mult =
                    (beta(i, j - 1) - beta(i, j)) - (beta(i - 1, j - 1) - beta(i - 1, j));
                if mult < 0 || mult > 1 {
                    return Err(Error::Internal(format!(
                        "pair multiplicity {mult} at ({i},{j}) dim {p}"
                    )));
                }
                if mult == 1 {
                    pairs.push((i - 1, j - 1));
                }
            }
        }
    }
    pairs_to_diagram(&filt, &pairs, opts)
}

// ---------------------------------------------------------------------------
// Topological dictionary
// ---------------------------------------------------------------------------

/// Feature counts and vertical spans read off a diagram: trunks are Ext0
/// points, downward branches Ord0, upward branches Rel1, holes Ext1.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureSummary {
    pub trunks: usize,
    pub downward_branches: usize,
    pub upward_branches: usize,
    pub holes: usize,
    pub trunk_spans: Vec<(f64, f64)>,
    pub downward_branch_spans: Vec<(f64, f64)>,
    pub upward_branch_spans: Vec<(f64, f64)>,
    pub hole_spans: Vec<(f64, f64)>,
}

pub fn dictionary(d: &ExtendedDiagram) -> FeatureSummary {
    let spans = |t: PointType| -> Vec<(f64, f64)> {
        d.of_type(t).map(|p| (p.birth, p.death)).collect()
    };
    let (trunk_spans, downward_branch_spans, upward_branch_spans, hole_spans) = (
        spans(PointType::Ext0),
        spans(PointType::Ord0),
        spans(PointType::Rel1),
        spans(PointType::Ext1),
    );
    FeatureSummary {
        trunks: trunk_spans.len(),
        downward_branches: downward_branch_spans.len(),
        upward_branches: upward_branch_spans.len(),
        holes: hole_spans.len(),
        trunk_spans,
        downward_branch_spans,
        upward_branch_spans,
        hole_spans,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(values: &[f64], edges: &[(usize, usize)]) -> WeightedGraph {
        WeightedGraph::new(values.to_vec(), edges.to_vec()).unwrap()
    }

    fn point(t: PointType, b: f64, d: f64) -> DiagramPoint {
        DiagramPoint::new(t, b, d)
    }

    #[test]
    fn path_has_single_trunk() {
        let d = extended_diagram(&graph(&[0.0, 1.0], &[(0, 1)])).unwrap();
        assert_eq!(d.points, vec![point(PointType::Ext0, 0.0, 1.0)]);
    }

    #[test]
    fn v_graph_has_trunk_and_branch() {
        let d = extended_diagram(&graph(&[0.0, 1.0, 0.0], &[(0, 1), (2, 1)])).unwrap();
        assert_eq!(
            d.points,
            vec![
                point(PointType::Ord0, 0.0, 1.0),
                point(PointType::Ext0, 0.0, 1.0),
            ]
        );
    }

    #[test]
    fn four_cycle_has_trunk_and_hole() {
        let d = extended_diagram(&graph(
            &[0.0, 1.0, 1.0, 2.0],
            &[(0, 1), (1, 2), (2, 3), (3, 0)],
        ))
        .unwrap();
        assert_eq!(
            d.points,
            vec![
                point(PointType::Ext0, 0.0, 2.0),
                point(PointType::Ext1, 2.0, 0.0),
            ]
        );
    }

    #[test]
    fn oracle_small_cases() {
        let d = diagram_oracle(&graph(&[3.0], &[])).unwrap();
        assert_eq!(d.points, vec![point(PointType::Ext0, 3.0, 3.0)]);
        let d = diagram_oracle(&graph(&[0.0, 1.0], &[])).unwrap();
        assert_eq!(
            d.points,
            vec![
                point(PointType::Ext0, 0.0, 0.0),
                point(PointType::Ext0, 1.0, 1.0),
            ]
        );
    }

    #[test]
    fn oracle_guard() {
        let values: Vec<f64> = (0..30).map(|i| i as f64).collect();
        let g = WeightedGraph::new(values, vec![]).unwrap();
        assert!(diagram_oracle(&g).is_err());
    }

    #[test]
    fn oracle_matches_reduction_on_named_graphs() {
        let cases: Vec<WeightedGraph> = vec![
            graph(&[0.0, 1.0], &[(0, 1)]),
            graph(&[0.0, 1.0, 0.0], &[(0, 1), (2, 1)]),
            graph(&[0.0, 1.0, 1.0, 2.0], &[(0, 1), (1, 2), (2, 3), (3, 0)]),
            // parallel edges: a horizontal-ish hole
            graph(&[0.0, 1.0], &[(0, 1), (0, 1)]),
            // two components, one with a loop
            graph(
                &[0.0, 2.0, 1.0, 5.0, 4.0],
                &[(0, 1), (1, 2), (2, 0), (3, 4)],
            ),
            // repeated values everywhere
            graph(&[1.0, 1.0, 1.0], &[(0, 1), (1, 2)]),
        ];
        for g in &cases {
            let fast = extended_diagram(g).unwrap();
            let oracle = diagram_oracle(g).unwrap();
            assert_eq!(fast.points, oracle.points, "graph {g:?}");
            assert_eq!(fast.count(PointType::Ext0), g.component_count());
            assert_eq!(fast.count(PointType::Ext1), g.betti_one());
        }
    }

    #[test]
    fn zero_persistence_flag() {
        let g = graph(&[1.0, 1.0, 1.0], &[(0, 1), (1, 2)]);
        let dropped = extended_diagram(&g).unwrap();
        assert_eq!(dropped.len(), 1); // only the Ext0 trunk at (1,1)
        let kept = extended_diagram_with(
            &g,
            DiagramOptions {
                keep_zero_persistence: true,
            },
        )
        .unwrap();
        assert_eq!(kept.count(PointType::Ord0), 2);
        assert_eq!(kept.count(PointType::Ext0), 1);
    }

    #[test]
    fn classification_invariants() {
        let g = graph(
            &[0.3, -1.0, 2.0, 0.7, 0.7, -0.2],
            &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2), (1, 5)],
        );
        let d = extended_diagram(&g).unwrap();
        for p in &d.points {
            match p.ptype {
                PointType::Ord0 => assert!(p.birth < p.death),
                PointType::Rel1 => assert!(p.birth > p.death),
                PointType::Ext0 => assert!(p.birth <= p.death),
                PointType::Ext1 => assert!(p.birth >= p.death),
            }
            assert!(g.values().contains(&p.birth));
            assert!(g.values().contains(&p.death));
        }
    }

    #[test]
    fn dictionary_counts() {
        let d = ExtendedDiagram::new(vec![
            point(PointType::Ext0, 0.0, 2.0),
            point(PointType::Ext1, 2.0, 0.0),
        ]);
        let s = dictionary(&d);
        assert_eq!((s.trunks, s.holes, s.downward_branches + s.upward_branches), (1, 1, 0));

        let empty = dictionary(&ExtendedDiagram::default());
        assert_eq!(empty, FeatureSummary::default());

        let d = ExtendedDiagram::new(vec![
            point(PointType::Ext0, 0.0, 1.0),
            point(PointType::Ord0, 0.0, 1.0),
        ]);
        let s = dictionary(&d);
        assert_eq!((s.trunks, s.downward_branches), (1, 1));
    }

    #[test]
    fn graph_validation() {
        assert!(WeightedGraph::new(vec![], vec![]).is_err());
        assert!(WeightedGraph::new(vec![f64::NAN], vec![]).is_err());
        assert!(WeightedGraph::new(vec![0.0, 1.0], vec![(0, 2)]).is_err());
        assert!(WeightedGraph::new(vec![0.0, 1.0], vec![(1, 1)]).is_err());
    }
}
