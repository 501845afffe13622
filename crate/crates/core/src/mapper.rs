//! The Mapper graph: nerve of the connected pullback cover of a
//! neighborhood graph under a filter, with the reduced-midpoint node
//! function.

use crate::cover::IntervalCover;
use crate::error::{input_err, Error, Result};
use crate::filters::FilterValues;
use crate::geometry::{connected_components, NeighborhoodGraph};
use crate::persistence::WeightedGraph;

/// Which nerve is built from the pullback cover.
///
/// `Nerve` puts one edge per pair of clusters sharing a point.
/// `EdgeMultinerve` puts one edge per connected component of the shared
/// point set in the induced neighborhood subgraph, so parallel edges can
/// appear; it supports the finer resolution rule that drops the 1/g factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Nerve,
    EdgeMultinerve,
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Variant::Nerve => write!(f, "nerve"),
            Variant::EdgeMultinerve => write!(f, "multinerve"),
        }
    }
}

/// One cluster: a connected component of a cover interval's pre-image.
#[derive(Debug, Clone)]
pub struct MapperNode {
    pub id: usize,
    /// Index of the cover interval this cluster lives in.
    pub interval: usize,
    /// Sorted member point indices.
    pub members: Vec<usize>,
    pub size: usize,
    /// Reduced midpoint of the interval.
    pub fvalue: f64,
}

#[derive(Debug, Clone)]
pub struct MapperGraph {
    pub nodes: Vec<MapperNode>,
    /// Unordered node pairs (u < v); repeated entries encode multiplicity.
    pub edges: Vec<(usize, usize)>,
    pub variant: Variant,
}

impl MapperGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn component_count(&self) -> usize {
        let mut uf = crate::geometry::UnionFind::new(self.nodes.len());
        let mut merges = 0;
        for &(u, v) in &self.edges {
            if uf.union(u, v) {
                merges += 1;
            }
        }
        self.nodes.len() - merges
    }

    /// First Betti number: |E| - |V| + components.
    pub fn betti_one(&self) -> usize {
        self.edges.len() + self.component_count() - self.nodes.len()
    }

    /// The node-weighted graph whose extended persistence summarizes this
    /// Mapper.
    pub fn weighted_graph(&self) -> WeightedGraph {
        WeightedGraph::new(
            self.nodes.iter().map(|n| n.fvalue).collect(),
            self.edges.clone(),
        )
        .expect("mapper graph is a valid weighted graph")
    }
}

/// Edges whose open filter-value span contains an entire overlap zone of
/// consecutive cover intervals. Their absence is what makes the Mapper
/// agree with the nerve of the continuous pullback.
pub fn intersection_crossing_edges(
    g: &NeighborhoodGraph,
    fv: &FilterValues,
    cover: &IntervalCover,
) -> Result<Vec<(usize, usize)>> {
    if fv.len() != g.len() {
        return input_err("filter and graph sizes differ");
    }
    let zones: Vec<(f64, f64)> = (0..cover.len().saturating_sub(1))
        .map(|s| cover.overlap_zone(s))
        .collect();
    let mut out = Vec::new();
    for &(i, j) in g.edges() {
        let lo = fv.value(i).min(fv.value(j));
        let hi = fv.value(i).max(fv.value(j));
        if zones.iter().any(|&(zlo, zhi)| lo <= zlo && zhi <= hi) {
            out.push((i, j));
        }
    }
    Ok(out)
}

/// Builds the Mapper graph of `g` under `fv` with the given cover.
///
/// Nodes are the connected components of each interval's pre-image, labeled
/// in (interval, smallest member) order; the node function is the interval's
/// reduced midpoint. Output is canonical: identical inputs give identical
/// node and edge orderings.
pub fn build_mapper(
    g: &NeighborhoodGraph,
    fv: &FilterValues,
    cover: &IntervalCover,
    variant: Variant,
) -> Result<MapperGraph> {
    if fv.len() != g.len() {
        return input_err("filter and graph sizes differ");
    }
    let n = g.len();
    let s_count = cover.len();
    let mut preimages: Vec<Vec<usize>> = vec![Vec::new(); s_count];
    for i in 0..n {
        let hits = cover.covering(fv.value(i));
        if hits.is_empty() {
            return Err(Error::Internal(format!(
                "filter value {} of point {i} not covered",
                fv.value(i)
            )));
        }
        for s in hits {
            preimages[s].push(i);
        }
    }
    let mids = cover.reduced_midpoints();
    let mut nodes: Vec<MapperNode> = Vec::new();
    let mut clusters_by_interval: Vec<Vec<usize>> = vec![Vec::new(); s_count];
    for (s, pre) in preimages.iter().enumerate() {
        // components come back ordered by smallest member
        for block in connected_components(g, pre)? {
            let id = nodes.len();
            clusters_by_interval[s].push(id);
            nodes.push(MapperNode {
                id,
                interval: s,
                size: block.len(),
                fvalue: mids[s],
                members: block,
            });
        }
    }
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for s in 0..s_count.saturating_sub(1) {
        for &u in &clusters_by_interval[s] {
            for &v in &clusters_by_interval[s + 1] {
                let shared = sorted_intersection(&nodes[u].members, &nodes[v].members);
                if shared.is_empty() {
                    continue;
                }
                match variant {
                    Variant::Nerve => edges.push((u, v)),
                    Variant::EdgeMultinerve => {
                        let mult = connected_components(g, &shared)?.len();
                        for _ in 0..mult {
                            edges.push((u, v));
                        }
                    }
                }
            }
        }
    }
    edges.sort_unstable();
    Ok(MapperGraph {
        nodes,
        edges,
        variant,
    })
}

fn sorted_intersection(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}
