//! Automatic selection of the Rips scale, resolution and gain, plus checks
//! of the hypotheses under which the Mapper provably tracks the Reeb graph.

use crate::error::{input_err, Result};
use crate::exec;
use crate::filters::{modulus_of_variation, FilterValues};
use crate::geometry::{hausdorff, rips_graph, subsample, DistanceMatrix};
use crate::mapper::{intersection_crossing_edges, Variant};
use crate::seeds::{derive_base, rng_stream, Rng};

/// Relative bump realizing "strictly larger but arbitrarily close".
pub const RESOLUTION_BUMP: f64 = 1.0 + 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamProvenance {
    KnownModel,
    Subsampling,
    Manual,
}

impl std::fmt::Display for ParamProvenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::KnownModel => "known-model rule",
            Self::Subsampling => "subsampling rule",
            Self::Manual => "manual",
        };
        write!(f, "{s}")
    }
}

/// A full Mapper parametrization and which rule produced it.
#[derive(Debug, Clone, Copy)]
pub struct MapperParams {
    pub delta: f64,
    pub r: f64,
    pub g: f64,
    pub variant: Variant,
    pub provenance: ParamProvenance,
}

/// Subsample size n / (ln n)^(1+beta), clamped to [1, n].
pub fn subsample_size(n: usize, beta: f64) -> usize {
    if n <= 2 {
        return n;
    }
    let s = (n as f64 / (n as f64).ln().powf(1.0 + beta)).floor() as usize;
    s.clamp(1, n)
}

/// Rips scale for a known (a, b)-standard model: 8 (2 ln n / (a n))^(1/b).
pub fn tune_delta_known(n: usize, a: f64, b: f64) -> Result<f64> {
    if n < 2 {
        return input_err(format!("need at least 2 points, got {n}"));
    }
    if !(a > 0.0) || !a.is_finite() {
        return input_err(format!("mass constant must be positive, got {a}"));
    }
    if !(b >= 1.0) || !b.is_finite() {
        return input_err(format!("dimension exponent must be >= 1, got {b}"));
    }
    let n = n as f64;
    Ok(8.0 * (2.0 * n.ln() / (a * n)).powf(1.0 / b))
}

/// Rips scale without model knowledge: the Hausdorff distance between a
/// size-s_n subsample and the full cloud, averaged over `draws` independent
/// subsamples.
///
/// Each draw runs on its own generator stream, so the (index-ordered) mean
/// does not depend on scheduling. `draws = 1` recovers the single-subsample
/// rule.
pub fn tune_delta_subsample(
    dm: &DistanceMatrix,
    beta: f64,
    draws: usize,
    rng: &mut Rng,
) -> Result<f64> {
    tune_delta_subsample_impl(dm, beta, draws, rng, true)
}

/// Sequential variant of [`tune_delta_subsample`] (benches and the
/// non-parallel build).
pub fn tune_delta_subsample_seq(
    dm: &DistanceMatrix,
    beta: f64,
    draws: usize,
    rng: &mut Rng,
) -> Result<f64> {
    tune_delta_subsample_impl(dm, beta, draws, rng, false)
}

fn tune_delta_subsample_impl(
    dm: &DistanceMatrix,
    beta: f64,
    draws: usize,
    rng: &mut Rng,
    parallel: bool,
) -> Result<f64> {
    let n = dm.len();
    if n < 3 {
        return input_err(format!("subsampling rule needs at least 3 points, got {n}"));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return input_err(format!("beta must be positive, got {beta}"));
    }
    if draws < 1 {
        return input_err("need at least one subsample draw");
    }
    let s = subsample_size(n, beta);
    let all: Vec<usize> = (0..n).collect();
    let base = derive_base(rng);
    let work = |k: usize| -> Result<f64> {
        let mut draw_rng = rng_stream(base, k as u64);
        let sub = subsample(n, s, &mut draw_rng)?;
        hausdorff(&sub, &all, dm)
    };
    let dists = if parallel {
        exec::map_indexed(draws, |k| work(k))
    } else {
        exec::map_indexed_seq(draws, |k| work(k))
    };
    let mut sum = 0.0;
    for d in dists {
        sum += d?;
    }
    Ok(sum / draws as f64)
}

fn resolution_fallback(fmin: f64, fmax: f64, n: usize) -> f64 {
    ((fmax - fmin) / n.max(2) as f64).max(1e-9)
}

/// Resolution from the variation statistic: V+/g for the nerve, V+ for the
/// edge multinerve. A constant filter at scale delta (V = 0) falls back to a
/// thin but nonzero resolution so the cover stays nondegenerate.
pub fn tune_resolution(
    v: f64,
    g: f64,
    fmin: f64,
    fmax: f64,
    n: usize,
    variant: Variant,
) -> Result<f64> {
    if !(g > 0.0 && g < 0.5) {
        return input_err(format!("gain must lie in (0, 1/2), got {g}"));
    }
    if !(v >= 0.0) || !v.is_finite() {
        return input_err(format!("variation must be nonnegative, got {v}"));
    }
    if v == 0.0 {
        return Ok(resolution_fallback(fmin, fmax, n));
    }
    Ok(match variant {
        Variant::Nerve => v * RESOLUTION_BUMP / g,
        Variant::EdgeMultinerve => v * RESOLUTION_BUMP,
    })
}

/// Resolution for an estimated filter with declared modulus w(x) = c x:
/// max{w(delta), V+}/g (or without the 1/g for the multinerve).
pub fn tune_resolution_inferred(
    omega_at_delta: f64,
    v_hat: f64,
    g: f64,
    fmin: f64,
    fmax: f64,
    n: usize,
    variant: Variant,
) -> Result<f64> {
    if !(omega_at_delta >= 0.0) || !omega_at_delta.is_finite() {
        return input_err(format!(
            "modulus value must be nonnegative, got {omega_at_delta}"
        ));
    }
    tune_resolution(omega_at_delta.max(v_hat), g, fmin, fmax, n, variant)
}

/// Everything [`tune`] needs besides the data.
#[derive(Debug, Clone, Copy)]
pub struct TuneConfig {
    pub gain: f64,
    pub beta: f64,
    pub subsample_draws: usize,
    pub variant: Variant,
    /// When set, the (a, b) known-model rule replaces the subsampling rule.
    pub known_model: Option<(f64, f64)>,
}

impl Default for TuneConfig {
    fn default() -> Self {
        Self {
            gain: 0.4,
            beta: 0.001,
            subsample_draws: 100,
            variant: Variant::Nerve,
            known_model: None,
        }
    }
}

/// Tunes (delta, r, g) for the given data and filter.
///
/// delta comes from the subsampling rule (or the known-model formula when
/// (a, b) are supplied); r comes from the variation statistic at delta,
/// switching to the inferred-filter rule when the filter is estimated and
/// carries a declared modulus.
pub fn tune(
    dm: &DistanceMatrix,
    fv: &FilterValues,
    cfg: &TuneConfig,
    rng: &mut Rng,
) -> Result<MapperParams> {
    if fv.len() != dm.len() {
        return input_err("filter and distance matrix sizes differ");
    }
    let (delta, provenance) = match cfg.known_model {
        Some((a, b)) => (tune_delta_known(dm.len(), a, b)?, ParamProvenance::KnownModel),
        None => {
            // below 3 points the subsampling rule is undefined; a zero scale
            // keeps degenerate pipelines (single-point inputs) running
            let delta = if dm.len() < 3 {
                0.0
            } else {
                tune_delta_subsample(dm, cfg.beta, cfg.subsample_draws, rng)?
            };
            (delta, ParamProvenance::Subsampling)
        }
    };
    let v = modulus_of_variation(dm, fv, delta)?;
    let (fmin, fmax) = (fv.min(), fv.max());
    let r = match (fv.inferred(), fv.lipschitz_bound()) {
        (true, Some(c)) => tune_resolution_inferred(
            c * delta,
            v,
            cfg.gain,
            fmin,
            fmax,
            dm.len(),
            cfg.variant,
        )?,
        _ => tune_resolution(v, cfg.gain, fmin, fmax, dm.len(), cfg.variant)?,
    };
    Ok(MapperParams {
        delta,
        r,
        g: cfg.gain,
        variant: cfg.variant,
        provenance,
    })
}

/// Empirical status of the approximation hypotheses for a parametrization.
#[derive(Debug, Clone)]
pub struct HypothesisReport {
    pub variation_at_delta: f64,
    /// g*r for the nerve, r for the edge multinerve.
    pub variation_threshold: f64,
    pub variation_ok: bool,
    pub crossing_edge_count: usize,
    pub delta: f64,
    /// Mean Hausdorff distance from a half-size subsample to the full cloud;
    /// a conservative stand-in for the unobservable sample-to-support gap.
    pub hausdorff_proxy: f64,
    pub hausdorff_ok: bool,
    pub reach_note: &'static str,
}

impl std::fmt::Display for HypothesisReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "variation V(delta) = {} < {} (threshold): {}",
            self.variation_at_delta, self.variation_threshold, self.variation_ok
        )?;
        writeln!(f, "intersection-crossing edges: {}", self.crossing_edge_count)?;
        writeln!(
            f,
            "4 * hausdorff proxy = {} <= delta = {}: {} (proxy: half-sample fill distance, conservative)",
            4.0 * self.hausdorff_proxy,
            self.delta,
            self.hausdorff_ok
        )?;
        write!(f, "reach/convexity-radius bound: {}", self.reach_note)
    }
}

const PROXY_DRAWS: usize = 20;
const PROXY_SEED: u64 = 0x9e37_79b9_7f4a_7c15;

/// Checks the testable hypotheses for `params` on the given data.
///
/// The deterministic proxy draws make the report reproducible without a
/// caller-supplied generator.
pub fn check_hypotheses(
    dm: &DistanceMatrix,
    fv: &FilterValues,
    params: &MapperParams,
    cover: &crate::cover::IntervalCover,
) -> Result<HypothesisReport> {
    let v = modulus_of_variation(dm, fv, params.delta)?;
    let threshold = match params.variant {
        Variant::Nerve => params.g * params.r,
        Variant::EdgeMultinerve => params.r,
    };
    let graph = rips_graph(dm, params.delta)?;
    let crossing = intersection_crossing_edges(&graph, fv, cover)?.len();

    let n = dm.len();
    let all: Vec<usize> = (0..n).collect();
    let half = n.div_ceil(2);
    let dists = exec::map_indexed(PROXY_DRAWS, |k| -> Result<f64> {
        let mut rng = rng_stream(PROXY_SEED, k as u64);
        let sub = subsample(n, half, &mut rng)?;
        hausdorff(&sub, &all, dm)
    });
    let mut proxy = 0.0;
    for d in dists {
        proxy += d?;
    }
    proxy /= PROXY_DRAWS as f64;

    Ok(HypothesisReport {
        variation_at_delta: v,
        variation_threshold: threshold,
        variation_ok: v < threshold,
        crossing_edge_count: crossing,
        delta: params.delta,
        hausdorff_proxy: proxy,
        hausdorff_ok: 4.0 * proxy <= params.delta,
        reach_note: "unverifiable without user-supplied bounds",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::build_cover;
    use crate::filters::coordinate_filter;
    use crate::geometry::{pairwise_distances, PointCloud};
    use crate::seeds::rng_from_seed;

    #[test]
    fn delta_known_anchor() {
        let got = tune_delta_known(10_000, 1.0, 2.0).unwrap();
        let want = 8.0 * (2.0 * (10_000.0f64).ln() / 10_000.0).sqrt();
        assert!((got - want).abs() < 1e-6, "{got} vs {want}");

        let got = tune_delta_known(100, 2.0, 1.0).unwrap();
        let want = 8.0 * (100.0f64).ln() / 100.0;
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn delta_known_monotone_in_n() {
        for n in [3usize, 10, 100, 5000] {
            let a = tune_delta_known(n, 1.0, 2.0).unwrap();
            let b = tune_delta_known(2 * n, 1.0, 2.0).unwrap();
            assert!(b < a, "n={n}");
        }
        assert!(tune_delta_known(1, 1.0, 2.0).is_err());
        assert!(tune_delta_known(10, 0.0, 2.0).is_err());
        assert!(tune_delta_known(10, 1.0, 0.5).is_err());
    }

    #[test]
    fn subsample_sizes() {
        assert_eq!(subsample_size(1, 0.001), 1);
        assert_eq!(subsample_size(2, 0.001), 2);
        assert_eq!(subsample_size(3, 0.001), 2);
        let s = subsample_size(1000, 0.001);
        assert!((140..150).contains(&s), "{s}");
    }

    fn coincident(n: usize) -> DistanceMatrix {
        DistanceMatrix::new(vec![vec![0.0; n]; n]).unwrap()
    }

    #[test]
    fn delta_subsample_degenerate_cases() {
        let mut rng = rng_from_seed(1);
        assert_eq!(
            tune_delta_subsample(&coincident(10), 0.001, 5, &mut rng).unwrap(),
            0.0
        );
        // s_n = n for tiny n: every subsample is the whole cloud
        let pc = PointCloud::new(vec![vec![0.0], vec![1.0]]).unwrap();
        let dm = pairwise_distances(&pc);
        assert!(tune_delta_subsample(&dm, 0.001, 5, &mut rng).is_err());
    }

    #[test]
    fn delta_subsample_reproducible() {
        let pts: Vec<Vec<f64>> = (0..100)
            .map(|i| {
                let t = i as f64 / 100.0 * std::f64::consts::TAU;
                vec![t.cos(), t.sin()]
            })
            .collect();
        let dm = pairwise_distances(&PointCloud::new(pts).unwrap());
        let a = tune_delta_subsample(&dm, 0.001, 40, &mut rng_from_seed(5)).unwrap();
        let b = tune_delta_subsample(&dm, 0.001, 40, &mut rng_from_seed(5)).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        let seq = tune_delta_subsample_seq(&dm, 0.001, 40, &mut rng_from_seed(5)).unwrap();
        assert_eq!(a.to_bits(), seq.to_bits());
        // doubling the draw count moves the mean by less than its spread
        let c = tune_delta_subsample(&dm, 0.001, 80, &mut rng_from_seed(5)).unwrap();
        assert!((a - c).abs() < 0.5 * a, "{a} vs {c}");
    }

    #[test]
    fn resolution_rules() {
        let r = tune_resolution(0.5, 0.4, 0.0, 1.0, 10, Variant::Nerve).unwrap();
        assert!((r - 0.5 * RESOLUTION_BUMP / 0.4).abs() < 1e-15);
        let r = tune_resolution(0.5, 0.4, 0.0, 1.0, 10, Variant::EdgeMultinerve).unwrap();
        assert!((r - 0.5 * RESOLUTION_BUMP).abs() < 1e-15);
        let r = tune_resolution(0.0, 0.4, 0.0, 1.0, 10, Variant::Nerve).unwrap();
        assert!((r - 0.1).abs() < 1e-15);
        assert!(tune_resolution(0.5, 0.6, 0.0, 1.0, 10, Variant::Nerve).is_err());
    }

    #[test]
    fn resolution_inferred_rules() {
        let r =
            tune_resolution_inferred(0.2, 0.1, 0.4, 0.0, 1.0, 10, Variant::Nerve).unwrap();
        assert!((r - 0.5 * RESOLUTION_BUMP).abs() < 1e-12);
        let a = tune_resolution_inferred(0.3, 0.3, 0.4, 0.0, 1.0, 10, Variant::Nerve).unwrap();
        let b = tune_resolution(0.3, 0.4, 0.0, 1.0, 10, Variant::Nerve).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        let r =
            tune_resolution_inferred(0.3, 0.0, 0.4, 0.0, 1.0, 10, Variant::Nerve).unwrap();
        assert!((r - 0.75 * RESOLUTION_BUMP).abs() < 1e-12);
    }

    #[test]
    fn tune_dispatches_known_model() {
        let pts: Vec<Vec<f64>> = (0..50).map(|i| vec![i as f64 / 50.0, 0.0]).collect();
        let pc = PointCloud::new(pts).unwrap();
        let dm = pairwise_distances(&pc);
        let fv = coordinate_filter(&pc, 0).unwrap();
        let cfg = TuneConfig {
            known_model: Some((1.0, 2.0)),
            ..TuneConfig::default()
        };
        let params = tune(&dm, &fv, &cfg, &mut rng_from_seed(3)).unwrap();
        assert_eq!(params.provenance, ParamProvenance::KnownModel);
        assert_eq!(params.delta, tune_delta_known(50, 1.0, 2.0).unwrap());
        let params = tune(&dm, &fv, &TuneConfig::default(), &mut rng_from_seed(3)).unwrap();
        assert_eq!(params.provenance, ParamProvenance::Subsampling);
    }

    #[test]
    fn tune_coincident_cloud() {
        let dm = coincident(10);
        let fv = FilterValues::new(vec![1.0; 10], "const", Some(1.0), false).unwrap();
        let params = tune(&dm, &fv, &TuneConfig::default(), &mut rng_from_seed(9)).unwrap();
        assert_eq!(params.delta, 0.0);
        assert!((params.r - 1e-9).abs() < 1e-18);
        let cover = build_cover(fv.min(), fv.max(), params.r, params.g).unwrap();
        assert_eq!(cover.len(), 1);
        let report = check_hypotheses(&dm, &fv, &params, &cover).unwrap();
        assert!(report.variation_ok);
        assert_eq!(report.crossing_edge_count, 0);
        assert!(report.hausdorff_ok);
    }

    #[test]
    fn hypothesis_check_flags_bad_resolution() {
        let pts: Vec<Vec<f64>> = (0..120)
            .map(|i| {
                let t = i as f64 / 120.0 * std::f64::consts::TAU;
                vec![t.cos(), t.sin()]
            })
            .collect();
        let pc = PointCloud::new(pts).unwrap();
        let dm = pairwise_distances(&pc);
        let fv = coordinate_filter(&pc, 0).unwrap();
        let good = tune(&dm, &fv, &TuneConfig::default(), &mut rng_from_seed(2)).unwrap();
        let cover = build_cover(fv.min(), fv.max(), good.r, good.g).unwrap();
        let report = check_hypotheses(&dm, &fv, &good, &cover).unwrap();
        assert!(report.variation_ok);
        assert_eq!(report.crossing_edge_count, 0);

        let bad = MapperParams {
            r: good.r / 10.0,
            ..good
        };
        let bad_cover = build_cover(fv.min(), fv.max(), bad.r, bad.g).unwrap();
        let report = check_hypotheses(&dm, &fv, &bad, &bad_cover).unwrap();
        assert!(!report.variation_ok);
        assert!(report.crossing_edge_count > 0);
    }
}
