//! Filter functions on a point cloud and the empirical variation statistic
//! used to tune the cover resolution.

use crate::error::{input_err, Error, Result};
use crate::exec;
use crate::geometry::{DistanceMatrix, PointCloud};

/// One real value per point, plus what is known about the filter.
///
/// `lipschitz_bound` declares a modulus of continuity of the form
/// `w(x) = c * x`; it feeds the inferred-filter resolution rule and the
/// subsampling confidence bound. `inferred` marks filters that are estimated
/// from the data (PCA, eccentricity, DTM) rather than evaluated exactly
/// (coordinates).
#[derive(Debug, Clone)]
pub struct FilterValues {
    values: Vec<f64>,
    name: String,
    lipschitz_bound: Option<f64>,
    inferred: bool,
}

impl FilterValues {
    pub fn new(
        values: Vec<f64>,
        name: impl Into<String>,
        lipschitz_bound: Option<f64>,
        inferred: bool,
    ) -> Result<Self> {
        if values.is_empty() {
            return input_err("filter values must be nonempty");
        }
        if values.iter().any(|v| !v.is_finite()) {
            return input_err("filter values must be finite");
        }
        if let Some(c) = lipschitz_bound {
            if !(c > 0.0) || !c.is_finite() {
                return input_err(format!("lipschitz bound must be positive, got {c}"));
            }
        }
        Ok(Self {
            values,
            name: name.into(),
            lipschitz_bound,
            inferred,
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

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lipschitz_bound(&self) -> Option<f64> {
        self.lipschitz_bound
    }

    pub fn inferred(&self) -> bool {
        self.inferred
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Values restricted to `indices` (repeats allowed); keeps metadata.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return input_err("cannot select an empty value set");
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.len()) {
            return input_err(format!("index {bad} out of range"));
        }
        Ok(Self {
            values: indices.iter().map(|&i| self.values[i]).collect(),
            name: self.name.clone(),
            lipschitz_bound: self.lipschitz_bound,
            inferred: self.inferred,
        })
    }
}

/// Projection on a coordinate axis. 1-Lipschitz, exact.
pub fn coordinate_filter(pc: &PointCloud, axis: usize) -> Result<FilterValues> {
    if axis >= pc.dim() {
        return input_err(format!(
            "axis {axis} out of range for dimension {}",
            pc.dim()
        ));
    }
    let values = (0..pc.len()).map(|i| pc.point(i)[axis]).collect();
    FilterValues::new(values, format!("coord:{axis}"), Some(1.0), false)
}

/// Eccentricity: distance to the farthest sample point. 1-Lipschitz with
/// respect to the metric; estimated from the sample.
pub fn eccentricity_filter(dm: &DistanceMatrix) -> Result<FilterValues> {
    let n = dm.len();
    let values = exec::map_indexed(n, |i| (0..n).map(|j| dm.get(i, j)).fold(0.0, f64::max));
    FilterValues::new(values, "ecc", Some(1.0), true)
}

/// Projection onto the `component`-th principal axis (1-based), centered at
/// the empirical mean.
///
/// The eigenvector sign is fixed so its largest-magnitude coordinate is
/// positive (ties broken by lowest coordinate index), keeping the output
/// reproducible.
pub fn pca_filter(pc: &PointCloud, component: usize) -> Result<FilterValues> {
    let (n, d) = (pc.len(), pc.dim());
    if component < 1 || component > d {
        return input_err(format!("component {component} outside 1..={d}"));
    }
    if n < 2 {
        return input_err("pca filter needs at least two points");
    }
    let mut mean = vec![0.0; d];
    for i in 0..n {
        for (m, &c) in mean.iter_mut().zip(pc.point(i)) {
            *m += c;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let mut cov = nalgebra::DMatrix::<f64>::zeros(d, d);
    for i in 0..n {
        let p = pc.point(i);
        for a in 0..d {
            let da = p[a] - mean[a];
            for b in a..d {
                cov[(a, b)] += da * (p[b] - mean[b]);
            }
        }
    }
    for a in 0..d {
        for b in a..d {
            cov[(a, b)] /= n as f64;
            cov[(b, a)] = cov[(a, b)];
        }
    }
    if cov.trace() <= 0.0 {
        return Err(Error::Degenerate(
            "zero covariance: all points identical".into(),
        ));
    }
    let eig = nalgebra::SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    let col = eig.eigenvectors.column(order[component - 1]);
    let mut v: Vec<f64> = col.iter().cloned().collect();
    fix_sign(&mut v);
    let values = (0..n)
        .map(|i| {
            pc.point(i)
                .iter()
                .zip(&mean)
                .zip(&v)
                .map(|((x, m), e)| (x - m) * e)
                .sum()
        })
        .collect();
    FilterValues::new(values, format!("pca:{component}"), Some(1.0), true)
}

/// Flips `v` so its largest-magnitude coordinate is positive; ties broken by
/// lowest index.
pub(crate) fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, &c) in v.iter().enumerate() {
        if c.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        for c in v.iter_mut() {
            *c = -*c;
        }
    }
}

/// Empirical distance-to-measure: root mean square distance to the `k`
/// nearest other points.
///
/// The query point is excluded from its own neighbors; users comparing with
/// mass-parameter DTM definitions can convert via m = k/n.
pub fn dtm(dm: &DistanceMatrix, k: usize) -> Result<FilterValues> {
    let n = dm.len();
    if k < 1 || k > n - 1 {
        return input_err(format!("neighbor count {k} outside 1..={}", n - 1));
    }
    let values = exec::map_indexed(n, |i| {
        let mut row: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| dm.get(i, j)).collect();
        row.select_nth_unstable_by(k - 1, |a, b| a.partial_cmp(b).unwrap());
        let sum_sq: f64 = row[..k].iter().map(|d| d * d).sum();
        (sum_sq / k as f64).sqrt()
    });
    FilterValues::new(values, format!("dtm:{k}"), Some(1.0), true)
}

/// Largest filter gap over point pairs at distance at most `delta`.
///
/// Pairs i = j contribute 0, so the result is 0 when no distinct pair
/// qualifies.
pub fn modulus_of_variation(dm: &DistanceMatrix, fv: &FilterValues, delta: f64) -> Result<f64> {
    if fv.len() != dm.len() {
        return input_err("filter and distance matrix sizes differ");
    }
    if !delta.is_finite() || delta < 0.0 {
        return input_err(format!("scale must be nonnegative, got {delta}"));
    }
    let n = dm.len();
    let row_max = exec::map_indexed(n, |i| {
        let mut best = 0.0f64;
        for j in (i + 1)..n {
            if dm.get(i, j) <= delta {
                let gap = (fv.value(i) - fv.value(j)).abs();
                if gap > best {
                    best = gap;
                }
            }
        }
        best
    });
    Ok(row_max.into_iter().fold(0.0, f64::max))
}

/// A filter selected by name string: `coord:<axis>`, `ecc`, `pca:<k>`,
/// `dtm:<k>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FilterSpec {
    Coordinate(usize),
    Eccentricity,
    Pca(usize),
    Dtm(usize),
}

impl FilterSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let head = parts.next().unwrap_or("");
        let arg = parts.next();
        if parts.next().is_some() {
            return input_err(format!("malformed filter spec '{s}'"));
        }
        let parse_arg = |what: &str| -> Result<usize> {
            arg.ok_or_else(|| Error::Input(format!("filter '{head}' needs a {what} argument")))?
                .parse::<usize>()
                .map_err(|_| Error::Input(format!("malformed filter spec '{s}'")))
        };
        match head {
            "coord" => Ok(Self::Coordinate(parse_arg("axis")?)),
            "ecc" => {
                if arg.is_some() {
                    return input_err("filter 'ecc' takes no argument");
                }
                Ok(Self::Eccentricity)
            }
            "pca" => Ok(Self::Pca(parse_arg("component")?)),
            "dtm" => Ok(Self::Dtm(parse_arg("neighbor count")?)),
            _ => input_err(format!("unknown filter '{s}'")),
        }
    }

    pub fn apply(&self, pc: &PointCloud, dm: &DistanceMatrix) -> Result<FilterValues> {
        match *self {
            Self::Coordinate(axis) => coordinate_filter(pc, axis),
            Self::Eccentricity => eccentricity_filter(dm),
            Self::Pca(k) => pca_filter(pc, k),
            Self::Dtm(k) => dtm(dm, k),
        }
    }
}

impl std::fmt::Display for FilterSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Coordinate(a) => write!(f, "coord:{a}"),
            Self::Eccentricity => write!(f, "ecc"),
            Self::Pca(k) => write!(f, "pca:{k}"),
            Self::Dtm(k) => write!(f, "dtm:{k}"),
        }
    }
}
