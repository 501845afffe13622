//! Confidence regions for Mapper features: bottleneck bootstrap,
//! subsampling tail bounds, the known-model bound, and significance flags.

use crate::bottleneck::bottleneck;
use crate::cover::build_cover;
use crate::error::{input_err, Result};
use crate::exec;
use crate::filters::FilterValues;
use crate::geometry::{hausdorff, rips_graph, subsample, DistanceMatrix};
use crate::mapper::build_mapper;
use crate::persistence::{extended_diagram, DiagramPoint, ExtendedDiagram};
use crate::seeds::{derive_base, rng_stream, Rng};
use crate::tuning::{subsample_size, MapperParams};
use rand::Rng as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfidenceMethod {
    Bootstrap,
    Subsampling,
    KnownModel,
}

impl std::fmt::Display for ConfidenceMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::Bootstrap => "bootstrap",
            Self::Subsampling => "subsampling",
            Self::KnownModel => "known",
        };
        write!(f, "{s}")
    }
}

/// Squares of half-width `eta` around each diagram point at level `alpha`;
/// a point is significant when its square misses the diagonal.
#[derive(Debug, Clone)]
pub struct ConfidenceRegion {
    pub eta: f64,
    pub alpha: f64,
    pub method: ConfidenceMethod,
    pub per_point: Vec<(DiagramPoint, bool)>,
}

/// Builds the Mapper diagram of (a resample of) the data under fixed
/// params; the cover is rebuilt from the sample's own filter range.
pub(crate) fn diagram_under_params(
    dm: &DistanceMatrix,
    fv: &FilterValues,
    params: &MapperParams,
) -> Result<ExtendedDiagram> {
    let graph = rips_graph(dm, params.delta)?;
    let cover = build_cover(fv.min(), fv.max(), params.r, params.g)?;
    let m = build_mapper(&graph, fv, &cover, params.variant)?;
    extended_diagram(&m.weighted_graph())
}

/// Bottleneck bootstrap half-width: resample the data with replacement `b`
/// times (points paired with their filter values), rebuild the Mapper with
/// the same params, and take the ceil((1-alpha) b) order statistic of the
/// bottleneck distances to the base diagram.
pub fn bootstrap_eta(
    dm: &DistanceMatrix,
    fv: &FilterValues,
    params: &MapperParams,
    b: usize,
    alpha: f64,
    rng: &mut Rng,
) -> Result<f64> {
    bootstrap_eta_impl(dm, fv, params, b, alpha, rng, true)
}

/// Sequential variant of [`bootstrap_eta`] (benches and the non-parallel
/// build).
pub fn bootstrap_eta_seq(
    dm: &DistanceMatrix,
    fv: &FilterValues,
    params: &MapperParams,
    b: usize,
    alpha: f64,
    rng: &mut Rng,
) -> Result<f64> {
    bootstrap_eta_impl(dm, fv, params, b, alpha, rng, false)
}

fn bootstrap_eta_impl(
    dm: &DistanceMatrix,
    fv: &FilterValues,
    params: &MapperParams,
    b: usize,
    alpha: f64,
    rng: &mut Rng,
    parallel: bool,
) -> Result<f64> {
    if b < 1 {
        return input_err("need at least one bootstrap replicate");
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return input_err(format!("alpha must lie in (0, 1], got {alpha}"));
    }
    if fv.len() != dm.len() {
        return input_err("filter and distance matrix sizes differ");
    }
    let n = dm.len();
    let base_diagram = diagram_under_params(dm, fv, params)?;
    let base_seed = derive_base(rng);
    let work = |k: usize| -> Result<f64> {
        let mut rep_rng = rng_stream(base_seed, k as u64);
        let idx: Vec<usize> = (0..n).map(|_| rep_rng.random_range(0..n)).collect();
        let sub_dm = dm.select(&idx)?;
        let sub_fv = fv.select(&idx)?;
        let d = diagram_under_params(&sub_dm, &sub_fv, params)?;
        Ok(bottleneck(&d, &base_diagram))
    };
    let dists = if parallel {
        exec::map_indexed(b, |k| work(k))
    } else {
        exec::map_indexed_seq(b, |k| work(k))
    };
    let mut ds = Vec::with_capacity(b);
    for d in dists {
        ds.push(d?);
    }
    ds.sort_by(f64::total_cmp);
    let rank = (((1.0 - alpha) * b as f64).ceil() as usize).max(1);
    Ok(ds[rank - 1])
}

/// Fraction of `draws` random size-`s` subsamples whose Hausdorff distance
/// to the full cloud exceeds `t`.
pub fn subsample_tail_full(
    dm: &DistanceMatrix,
    t: f64,
    draws: usize,
    s: usize,
    rng: &mut Rng,
) -> Result<f64> {
    let dists = tail_distances_full(dm, draws, s, rng)?;
    Ok(tail_fraction(&dists, t))
}

/// Fraction of `draws` random size-`s2` subsamples of the full cloud whose
/// Hausdorff distance to one fixed seeded size-`s` subsample exceeds `t`.
pub fn subsample_tail_nested(
    dm: &DistanceMatrix,
    t: f64,
    draws: usize,
    s: usize,
    s2: usize,
    rng: &mut Rng,
) -> Result<f64> {
    let dists = tail_distances_nested(dm, draws, s, s2, rng)?;
    Ok(tail_fraction(&dists, t))
}

fn tail_fraction(dists: &[f64], t: f64) -> f64 {
    dists.iter().filter(|&&d| d > t).count() as f64 / dists.len() as f64
}

fn tail_distances_full(
    dm: &DistanceMatrix,
    draws: usize,
    s: usize,
    rng: &mut Rng,
) -> Result<Vec<f64>> {
    let n = dm.len();
    if s < 1 || s > n {
        return input_err(format!("subsample size {s} outside 1..={n}"));
    }
    if draws < 1 {
        return input_err("need at least one draw");
    }
    let all: Vec<usize> = (0..n).collect();
    let base = derive_base(rng);
    let out = exec::map_indexed(draws, |k| -> Result<f64> {
        let mut draw_rng = rng_stream(base, k as u64);
        let sub = subsample(n, s, &mut draw_rng)?;
        hausdorff(&sub, &all, dm)
    });
    out.into_iter().collect()
}

fn tail_distances_nested(
    dm: &DistanceMatrix,
    draws: usize,
    s: usize,
    s2: usize,
    rng: &mut Rng,
) -> Result<Vec<f64>> {
    let n = dm.len();
    if s < 1 || s > n || s2 < 1 || s2 > s {
        return input_err(format!("subsample sizes ({s2} <= {s} <= {n}) violated"));
    }
    if draws < 1 {
        return input_err("need at least one draw");
    }
    let anchor = subsample(n, s, rng)?;
    let base = derive_base(rng);
    let out = exec::map_indexed(draws, |k| -> Result<f64> {
        let mut draw_rng = rng_stream(base, k as u64);
        let sub = subsample(n, s2, &mut draw_rng)?;
        hausdorff(&sub, &anchor, dm)
    });
    out.into_iter().collect()
}

/// The scale 0.25 * w^{-1}(g eta / (1 + 2g)) at which the subsampling tails
/// are evaluated, for a linear modulus w(x) = c x.
pub fn quarter_inverse_modulus(eta: f64, g: f64, c: f64) -> f64 {
    0.25 * (g * eta / (1.0 + 2.0 * g)) / c
}

/// Precomputed tail samples so bound evaluations share one set of draws;
/// this keeps the bound exactly monotone in eta, which the bisection in
/// [`conf_eta_for_alpha`] relies on.
struct SubsamplingTails {
    dists_full: Vec<f64>,
    dists_nested: Vec<f64>,
}

impl SubsamplingTails {
    fn build(dm: &DistanceMatrix, beta: f64, draws: usize, rng: &mut Rng) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return input_err(format!("beta must be positive, got {beta}"));
        }
        let n = dm.len();
        let s = subsample_size(n, beta);
        let s2 = subsample_size(s, beta);
        Ok(Self {
            dists_full: tail_distances_full(dm, draws, s, rng)?,
            dists_nested: tail_distances_nested(dm, draws, s, s2, rng)?,
        })
    }

    fn bound(&self, q: f64) -> f64 {
        let b = tail_fraction(&self.dists_full, q) + tail_fraction(&self.dists_nested, q);
        b.clamp(0.0, 1.0)
    }
}

/// Subsampling confidence bound on the probability that the Mapper sits
/// farther than `eta` from its target, for a filter with declared modulus
/// w(x) = c x. The asymptotically negligible remainder term is excluded
/// from the numeric value; [`subsampling_remainder_scale`] reports its
/// scale.
pub fn conf_bound_subsampling(
    dm: &DistanceMatrix,
    eta: f64,
    g: f64,
    c_lipschitz: f64,
    beta: f64,
    draws: usize,
    rng: &mut Rng,
) -> Result<f64> {
    validate_bound_args(eta, g, c_lipschitz)?;
    let tails = SubsamplingTails::build(dm, beta, draws, rng)?;
    Ok(tails.bound(quarter_inverse_modulus(eta, g, c_lipschitz)))
}

fn validate_bound_args(eta: f64, g: f64, c: f64) -> Result<()> {
    if !(g > 0.0 && g < 0.5) {
        return input_err(format!("gain must lie in (0, 1/2), got {g}"));
    }
    if !(c > 0.0) || !c.is_finite() {
        return input_err(format!(
            "filter must declare a positive modulus slope, got {c}"
        ));
    }
    if !(eta >= 0.0) || !eta.is_finite() {
        return input_err(format!("eta must be nonnegative, got {eta}"));
    }
    Ok(())
}

/// Scale of the remainder term omitted from the subsampling bound.
pub fn subsampling_remainder_scale(n: usize, beta: f64) -> f64 {
    (subsample_size(n, beta) as f64 / n as f64).powf(0.25)
}

/// Smallest eta in [0, filter_range] whose subsampling bound is at most
/// alpha (bisection to relative 1e-6); +infinity when no eta in the bracket
/// is informative.
pub fn conf_eta_for_alpha(
    dm: &DistanceMatrix,
    alpha: f64,
    g: f64,
    c_lipschitz: f64,
    beta: f64,
    draws: usize,
    filter_range: f64,
    rng: &mut Rng,
) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return input_err(format!("alpha must lie in (0, 1], got {alpha}"));
    }
    validate_bound_args(0.0, g, c_lipschitz)?;
    if !(filter_range >= 0.0) || !filter_range.is_finite() {
        return input_err(format!("filter range must be nonnegative, got {filter_range}"));
    }
    let tails = SubsamplingTails::build(dm, beta, draws, rng)?;
    let bound_at = |eta: f64| tails.bound(quarter_inverse_modulus(eta, g, c_lipschitz));
    if bound_at(0.0) <= alpha {
        return Ok(0.0);
    }
    if bound_at(filter_range) > alpha {
        return Ok(f64::INFINITY);
    }
    let (mut lo, mut hi) = (0.0f64, filter_range);
    while hi - lo > 1e-6 * hi {
        let mid = 0.5 * (lo + hi);
        if bound_at(mid) <= alpha {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Known-model bound: an indicator which fires when the modulus at delta_n
/// is too large relative to eta, plus the tail min{1, 2^b / (2 ln(n) n)},
/// clamped to [0, 1].
///
/// `a` and `v_at_delta` are validated for symmetry with the tuning rules
/// but do not enter the displayed value (delta_n already encodes them).
pub fn conf_bound_known_model(
    n: f64,
    a: f64,
    b: f64,
    delta_n: f64,
    v_at_delta: f64,
    g: f64,
    eta: f64,
    c_lipschitz: f64,
) -> Result<f64> {
    if !(n > 1.0) || !n.is_finite() {
        return input_err(format!("sample size must exceed 1, got {n}"));
    }
    if !(a > 0.0) || !a.is_finite() {
        return input_err(format!("mass constant must be positive, got {a}"));
    }
    if !(b >= 1.0) || !b.is_finite() {
        return input_err(format!("dimension exponent must be >= 1, got {b}"));
    }
    if !(v_at_delta >= 0.0) || !v_at_delta.is_finite() {
        return input_err(format!("variation must be nonnegative, got {v_at_delta}"));
    }
    if !(delta_n >= 0.0) || !delta_n.is_finite() {
        return input_err(format!("delta must be nonnegative, got {delta_n}"));
    }
    validate_bound_args(eta, g, c_lipschitz)?;
    let indicator = if c_lipschitz * delta_n >= g * eta / (1.0 + 2.0 * g) {
        1.0
    } else {
        0.0
    };
    let tail = (2.0f64.powf(b) / (2.0 * n.ln() * n)).min(1.0);
    Ok((indicator + tail).clamp(0.0, 1.0))
}

/// Closed-form inversion of the known-model bound: the smallest eta that
/// silences the indicator, or +infinity when the tail alone exceeds alpha.
pub fn conf_eta_known_model(
    n: f64,
    a: f64,
    b: f64,
    delta_n: f64,
    g: f64,
    alpha: f64,
    c_lipschitz: f64,
) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return input_err(format!("alpha must lie in (0, 1], got {alpha}"));
    }
    let eta = c_lipschitz * delta_n * (1.0 + 2.0 * g) / g * (1.0 + 1e-9);
    let bound = conf_bound_known_model(n, a, b, delta_n, 0.0, g, eta, c_lipschitz)?;
    if bound > alpha {
        return Ok(f64::INFINITY);
    }
    Ok(eta)
}

/// Flags each diagram point significant iff its square of half-width eta
/// misses the diagonal, i.e. |birth - death| > 2 eta.
pub fn significant_features(
    d: &ExtendedDiagram,
    eta: f64,
    alpha: f64,
    method: ConfidenceMethod,
) -> Result<ConfidenceRegion> {
    if !(eta >= 0.0) {
        return input_err(format!("eta must be nonnegative, got {eta}"));
    }
    let per_point = d
        .points
        .iter()
        .map(|&p| (p, p.persistence() > 2.0 * eta))
        .collect();
    Ok(ConfidenceRegion {
        eta,
        alpha,
        method,
        per_point,
    })
}
