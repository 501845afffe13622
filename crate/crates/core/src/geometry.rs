//! Point clouds, pairwise distances, Hausdorff distance, neighborhood
//! graphs, connected components and subsampling.

use crate::error::{input_err, Result};
use crate::exec;
use rand::Rng as _;

/// A finite point cloud in `R^dim`. Immutable after construction.
#[derive(Debug, Clone)]
pub struct PointCloud {
    points: Vec<Vec<f64>>,
    dim: usize,
}

impl PointCloud {
    /// Validates that the cloud is nonempty, every point has the same
    /// dimension and every coordinate is finite.
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        if points.is_empty() {
            return input_err("point cloud must contain at least one point");
        }
        let dim = points[0].len();
        if dim == 0 {
            return input_err("points must have at least one coordinate");
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return input_err(format!(
                    "point {i} has {} coordinates, expected {dim}",
                    p.len()
                ));
            }
            if p.iter().any(|c| !c.is_finite()) {
                return input_err(format!("point {i} has a non-finite coordinate"));
            }
        }
        Ok(Self { points, dim })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false // n >= 1 by construction
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    /// The cloud restricted to `indices` (order preserved, repeats allowed).
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return input_err("cannot select an empty point set");
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.len()) {
            return input_err(format!("point index {bad} out of range"));
        }
        Ok(Self {
            points: indices.iter().map(|&i| self.points[i].clone()).collect(),
            dim: self.dim,
        })
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Dense symmetric matrix of pairwise distances with zero diagonal.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    n: usize,
    // row-major n*n
    d: Vec<f64>,
}

impl DistanceMatrix {
    /// Wraps a precomputed matrix, validating symmetry, zero diagonal and
    /// nonnegativity. Covers non-Euclidean metrics implicitly.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return input_err("distance matrix must be nonempty");
        }
        let mut d = vec![0.0; n * n];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return input_err(format!("row {i} has length {}, expected {n}", row.len()));
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() || v < 0.0 {
                    return input_err(format!("d[{i}][{j}] = {v} is not a nonnegative real"));
                }
                d[i * n + j] = v;
            }
        }
        for i in 0..n {
            if d[i * n + i] != 0.0 {
                return input_err(format!("nonzero diagonal entry at {i}"));
            }
            for j in (i + 1)..n {
                if d[i * n + j] != d[j * n + i] {
                    return input_err(format!("asymmetry at ({i},{j})"));
                }
            }
        }
        Ok(Self { n, d })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn max_distance(&self) -> f64 {
        self.d.iter().cloned().fold(0.0, f64::max)
    }

    /// Submatrix over `indices` (repeats allowed, as in bootstrap resamples).
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return input_err("cannot select an empty index set");
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.n) {
            return input_err(format!("index {bad} out of range"));
        }
        let m = indices.len();
        let mut d = vec![0.0; m * m];
        for (a, &i) in indices.iter().enumerate() {
            for (b, &j) in indices.iter().enumerate() {
                d[a * m + b] = self.get(i, j);
            }
        }
        Ok(Self { n: m, d })
    }

    fn from_rows(n: usize, rows: Vec<Vec<f64>>) -> Self {
        let mut d = vec![0.0; n * n];
        for (i, row) in rows.into_iter().enumerate() {
            d[i * n..(i + 1) * n].copy_from_slice(&row);
        }
        Self { n, d }
    }
}

/// Euclidean pairwise distances. Rows are filled independently (in parallel
/// when the `parallel` feature is on), so the result does not depend on
/// scheduling.
pub fn pairwise_distances(pc: &PointCloud) -> DistanceMatrix {
    let n = pc.len();
    let rows = exec::map_indexed(n, |i| {
        (0..n)
            .map(|j| {
                if i == j {
                    0.0
                } else {
                    euclidean(pc.point(i), pc.point(j))
                }
            })
            .collect::<Vec<f64>>()
    });
    DistanceMatrix::from_rows(n, rows)
}

/// Sequential variant of [`pairwise_distances`]; reference kernel for the
/// benches and the non-parallel build.
pub fn pairwise_distances_seq(pc: &PointCloud) -> DistanceMatrix {
    let n = pc.len();
    let rows = exec::map_indexed_seq(n, |i| {
        (0..n)
            .map(|j| {
                if i == j {
                    0.0
                } else {
                    euclidean(pc.point(i), pc.point(j))
                }
            })
            .collect::<Vec<f64>>()
    });
    DistanceMatrix::from_rows(n, rows)
}

/// Hausdorff distance between two index sets of the same cloud:
/// max of the two directed max-min distances.
pub fn hausdorff(a: &[usize], b: &[usize], dm: &DistanceMatrix) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return input_err("hausdorff distance requires nonempty sets");
    }
    if let Some(&bad) = a.iter().chain(b).find(|&&i| i >= dm.len()) {
        return input_err(format!("index {bad} out of range"));
    }
    Ok(directed_hausdorff(a, b, dm).max(directed_hausdorff(b, a, dm)))
}

fn directed_hausdorff(from: &[usize], to: &[usize], dm: &DistanceMatrix) -> f64 {
    let mut worst = 0.0f64;
    for &i in from {
        let mut best = f64::INFINITY;
        for &j in to {
            let d = dm.get(i, j);
            if d < best {
                best = d;
            }
        }
        if best > worst {
            worst = best;
        }
    }
    worst
}

/// The delta-neighborhood graph: 1-skeleton of the Rips complex.
#[derive(Debug, Clone)]
pub struct NeighborhoodGraph {
    n: usize,
    delta: f64,
    /// Unordered pairs (i, j) with i < j, sorted.
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl NeighborhoodGraph {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }
}

/// Edge (i, j) present iff d[i][j] <= delta and i != j (closed ball rule).
pub fn rips_graph(dm: &DistanceMatrix, delta: f64) -> Result<NeighborhoodGraph> {
    if !delta.is_finite() || delta < 0.0 {
        return input_err(format!("rips scale must be nonnegative, got {delta}"));
    }
    let n = dm.len();
    let mut edges = Vec::new();
    let mut adjacency = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if dm.get(i, j) <= delta {
                edges.push((i, j));
                adjacency[i].push(j);
                adjacency[j].push(i);
            }
        }
    }
    Ok(NeighborhoodGraph {
        n,
        delta,
        edges,
        adjacency,
    })
}

/// Union-find with path halving; shared by clustering and Betti counts.
#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.rank[ra] < self.rank[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        if self.rank[ra] == self.rank[rb] {
            self.rank[ra] += 1;
        }
        true
    }
}

/// Connected components of the subgraph induced by `subset`.
///
/// Returns a partition: blocks ordered by smallest member, members sorted.
/// An empty subset yields an empty partition.
pub fn connected_components(g: &NeighborhoodGraph, subset: &[usize]) -> Result<Vec<Vec<usize>>> {
    if let Some(&bad) = subset.iter().find(|&&v| v >= g.len()) {
        return input_err(format!("vertex {bad} out of range"));
    }
    let mut members: Vec<usize> = subset.to_vec();
    members.sort_unstable();
    members.dedup();
    if members.is_empty() {
        return Ok(Vec::new());
    }
    let mut local = vec![usize::MAX; g.len()];
    for (k, &v) in members.iter().enumerate() {
        local[v] = k;
    }
    let mut uf = UnionFind::new(members.len());
    for &v in &members {
        for &w in g.neighbors(v) {
            if local[w] != usize::MAX {
                uf.union(local[v], local[w]);
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); members.len()];
    for &v in &members {
        blocks[uf.find(local[v])].push(v);
    }
    // members were scanned in ascending order, so each block is sorted and
    // blocks keyed by their root's first occurrence are ordered by minimum
    let mut out: Vec<Vec<usize>> = blocks.into_iter().filter(|b| !b.is_empty()).collect();
    out.sort_by_key(|b| b[0]);
    Ok(out)
}

/// Draws `m` distinct indices uniformly without replacement.
///
/// Partial Fisher-Yates over 0..n; output sorted. Deterministic given the
/// generator state.
pub fn subsample(n: usize, m: usize, rng: &mut crate::seeds::Rng) -> Result<Vec<usize>> {
    if m < 1 || m > n {
        return input_err(format!("subsample size {m} outside 1..={n}"));
    }
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..m {
        let j = rng.random_range(i..n);
        pool.swap(i, j);
    }
    let mut picked = pool[..m].to_vec();
    picked.sort_unstable();
    Ok(picked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::seeds::rng_from_seed;

    fn cloud(points: &[&[f64]]) -> PointCloud {
        PointCloud::new(points.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    fn line_cloud(xs: &[f64]) -> PointCloud {
        PointCloud::new(xs.iter().map(|&x| vec![x]).collect()).unwrap()
    }

    #[test]
    fn pairwise_three_four_five() {
        let dm = pairwise_distances(&cloud(&[&[0.0, 0.0], &[3.0, 4.0]]));
        assert_eq!(dm.get(0, 1), 5.0);
        assert_eq!(dm.get(1, 0), 5.0);
        assert_eq!(dm.get(0, 0), 0.0);
    }

    #[test]
    fn pairwise_single_point() {
        let dm = pairwise_distances(&cloud(&[&[2.0]]));
        assert_eq!(dm.len(), 1);
        assert_eq!(dm.get(0, 0), 0.0);
    }

    #[test]
    fn pairwise_line() {
        let dm = pairwise_distances(&line_cloud(&[0.0, 1.0, 3.0]));
        assert_eq!(dm.get(0, 2), 3.0);
        assert_eq!(dm.get(1, 2), 2.0);
    }

    #[test]
    fn pairwise_matches_seq() {
        let pts: Vec<Vec<f64>> = (0..40)
            .map(|i| vec![(i as f64).sin(), (i as f64).cos(), i as f64 * 0.1])
            .collect();
        let pc = PointCloud::new(pts).unwrap();
        let a = pairwise_distances(&pc);
        let b = pairwise_distances_seq(&pc);
        for i in 0..pc.len() {
            for j in 0..pc.len() {
                assert_eq!(a.get(i, j).to_bits(), b.get(i, j).to_bits());
            }
        }
    }

    #[test]
    fn cloud_rejects_non_finite() {
        assert!(PointCloud::new(vec![vec![0.0, f64::NAN]]).is_err());
        assert!(PointCloud::new(vec![vec![0.0], vec![f64::INFINITY]]).is_err());
        assert!(PointCloud::new(vec![vec![0.0], vec![1.0, 2.0]]).is_err());
        assert!(PointCloud::new(Vec::new()).is_err());
    }

    #[test]
    fn distance_matrix_validation() {
        assert!(DistanceMatrix::new(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(DistanceMatrix::new(vec![vec![1.0]]).is_err());
        assert!(DistanceMatrix::new(vec![vec![0.0, -1.0], vec![-1.0, 0.0]]).is_err());
        assert!(DistanceMatrix::new(vec![vec![0.0, 2.0], vec![2.0, 0.0]]).is_ok());
    }

    #[test]
    fn hausdorff_identity_and_pairs() {
        let dm = pairwise_distances(&line_cloud(&[0.0, 1.0, 10.0]));
        assert_eq!(hausdorff(&[0, 1, 2], &[0, 1, 2], &dm).unwrap(), 0.0);
        assert_eq!(hausdorff(&[0], &[1], &dm).unwrap(), 1.0);
        assert_eq!(hausdorff(&[0, 2], &[0], &dm).unwrap(), 10.0);
        assert!(hausdorff(&[], &[0], &dm).is_err());
    }

    #[test]
    fn rips_edge_rule() {
        let dm = pairwise_distances(&line_cloud(&[0.0, 1.0, 3.0]));
        assert!(rips_graph(&dm, 0.0).unwrap().edges().is_empty());
        assert_eq!(rips_graph(&dm, 3.0).unwrap().edges().len(), 3);
        let g = rips_graph(&dm, 1.5).unwrap();
        assert_eq!(g.edges(), &[(0, 1)]);
        assert!(rips_graph(&dm, -0.1).is_err());
    }

    #[test]
    fn components_partition() {
        let dm = pairwise_distances(&line_cloud(&[0.0, 1.0, 2.0, 10.0]));
        let g = rips_graph(&dm, 1.0).unwrap();
        let parts = connected_components(&g, &[0, 1, 2, 3]).unwrap();
        assert_eq!(parts, vec![vec![0, 1, 2], vec![3]]);
        // no induced edge between opposite corners of a square cycle
        let sq = cloud(&[&[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0], &[0.0, 1.0]]);
        let g = rips_graph(&pairwise_distances(&sq), 1.0).unwrap();
        let parts = connected_components(&g, &[0, 2]).unwrap();
        assert_eq!(parts.len(), 2);
        assert!(connected_components(&g, &[]).unwrap().is_empty());
    }

    #[test]
    fn subsample_contract() {
        let mut rng = rng_from_seed(7);
        assert_eq!(subsample(4, 4, &mut rng).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(subsample(1, 1, &mut rng).unwrap(), vec![0]);
        let a = subsample(50, 10, &mut rng_from_seed(42)).unwrap();
        let b = subsample(50, 10, &mut rng_from_seed(42)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 10);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert!(subsample(3, 0, &mut rng).is_err());
        assert!(subsample(3, 4, &mut rng).is_err());
    }

    #[test]
    fn select_with_repeats() {
        let dm = pairwise_distances(&line_cloud(&[0.0, 2.0]));
        let sub = dm.select(&[1, 1, 0]).unwrap();
        assert_eq!(sub.get(0, 1), 0.0);
        assert_eq!(sub.get(0, 2), 2.0);
        assert!(dm.select(&[]).is_err());
    }

    #[test]
    fn error_taxonomy() {
        match PointCloud::new(Vec::new()) {
            Err(Error::Input(_)) => {}
            other => panic!("expected input error, got {other:?}"),
        }
    }
}
