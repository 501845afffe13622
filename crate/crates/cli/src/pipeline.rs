//! The end-to-end pipeline behind the CLI subcommands, and the convergence
//! experiment harness.

use crate::io::{self, DenoiseSpec};
use crate::synth::{synth_shape, Shape};
use reebmap_core::bottleneck::bottleneck;
use reebmap_core::confidence::{
    bootstrap_eta, conf_eta_for_alpha, conf_eta_known_model, significant_features,
    ConfidenceMethod, ConfidenceRegion,
};
use reebmap_core::cover::{build_cover, IntervalCover};
use reebmap_core::error::{input_err, Error, Result};
use reebmap_core::filters::{FilterSpec, FilterValues};
use reebmap_core::geometry::{pairwise_distances, rips_graph, PointCloud};
use reebmap_core::mapper::{build_mapper, MapperGraph, Variant};
use reebmap_core::persistence::{
    extended_diagram, DiagramPoint, ExtendedDiagram, PointType,
};
use reebmap_core::seeds::{rng_from_seed, rng_stream, Rng};
use reebmap_core::tuning::{check_hypotheses, tune, HypothesisReport, MapperParams, TuneConfig};
use std::path::{Path, PathBuf};

/// Monte Carlo draw count for the subsampling tail functions.
const TAIL_DRAWS: usize = 1000;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub filter: FilterSpec,
    pub gain: f64,
    pub beta: f64,
    pub subsample_draws: usize,
    pub variant: Variant,
    pub bootstrap: usize,
    pub alpha: f64,
    pub seed: u64,
    pub denoise: Option<DenoiseSpec>,
    pub known_model: Option<(f64, f64)>,
    pub confidence_method: ConfidenceMethod,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            filter: FilterSpec::Coordinate(0),
            gain: 0.4,
            beta: 0.001,
            subsample_draws: 100,
            variant: Variant::Nerve,
            bootstrap: 100,
            alpha: 0.15,
            seed: 0,
            denoise: None,
            known_model: None,
            confidence_method: ConfidenceMethod::Bootstrap,
        }
    }
}

impl RunConfig {
    fn tune_config(&self) -> TuneConfig {
        TuneConfig {
            gain: self.gain,
            beta: self.beta,
            subsample_draws: self.subsample_draws,
            variant: self.variant,
            known_model: self.known_model,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return input_err(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if self.bootstrap < 1 {
            return input_err("need at least one bootstrap replicate");
        }
        Ok(())
    }
}

/// Everything the pipeline computes in memory.
#[derive(Debug)]
pub struct PipelineOutput {
    pub cloud: PointCloud,
    pub kept: Vec<usize>,
    pub filter: FilterValues,
    pub params: MapperParams,
    pub cover: IntervalCover,
    pub mapper: MapperGraph,
    pub diagram: ExtendedDiagram,
    pub report: HypothesisReport,
    pub region: ConfidenceRegion,
}

/// Runs tune -> Mapper -> diagram -> confidence on an in-memory cloud.
pub fn run_on_cloud(pc: &PointCloud, cfg: &RunConfig) -> Result<PipelineOutput> {
    cfg.validate()?;
    let mut rng = rng_from_seed(cfg.seed);
    let full_dm = pairwise_distances(pc);
    let (cloud, kept, dm) = match cfg.denoise {
        Some(spec) => {
            let kept = reebmap_core::denoise::dtm_filter(&full_dm, spec.k, spec.tau_frac, spec.mode)?;
            let cloud = pc.select(&kept)?;
            let dm = full_dm.select(&kept)?;
            (cloud, kept, dm)
        }
        None => (pc.clone(), (0..pc.len()).collect(), full_dm),
    };
    let filter = cfg.filter.apply(&cloud, &dm)?;
    let params = tune(&dm, &filter, &cfg.tune_config(), &mut rng)?;
    let cover = build_cover(filter.min(), filter.max(), params.r, params.g)?;
    let graph = rips_graph(&dm, params.delta)?;
    let mapper = build_mapper(&graph, &filter, &cover, params.variant)?;
    let diagram = extended_diagram(&mapper.weighted_graph())?;
    let report = check_hypotheses(&dm, &filter, &params, &cover)?;
    let eta = match cfg.confidence_method {
        ConfidenceMethod::Bootstrap => bootstrap_eta(
            &dm,
            &filter,
            &params,
            cfg.bootstrap,
            cfg.alpha,
            &mut rng,
        )?,
        ConfidenceMethod::Subsampling => {
            let c = declared_modulus(&filter)?;
            conf_eta_for_alpha(
                &dm,
                cfg.alpha,
                params.g,
                c,
                cfg.beta,
                TAIL_DRAWS,
                filter.max() - filter.min(),
                &mut rng,
            )?
        }
        ConfidenceMethod::KnownModel => {
            let (a, b) = cfg.known_model.ok_or_else(|| {
                Error::Input("known-model confidence needs --a and --b".into())
            })?;
            let c = declared_modulus(&filter)?;
            conf_eta_known_model(
                dm.len() as f64,
                a,
                b,
                params.delta,
                params.g,
                cfg.alpha,
                c,
            )?
        }
    };
    let region = significant_features(&diagram, eta, cfg.alpha, cfg.confidence_method)?;
    Ok(PipelineOutput {
        cloud,
        kept,
        filter,
        params,
        cover,
        mapper,
        diagram,
        report,
        region,
    })
}

fn declared_modulus(fv: &FilterValues) -> Result<f64> {
    fv.lipschitz_bound().ok_or_else(|| {
        Error::Input(format!(
            "filter '{}' declares no modulus of continuity",
            fv.name()
        ))
    })
}

/// Runs the pipeline on a CSV input and writes mapper.dot, diagram.csv,
/// confidence.csv, diagram.svg and params.txt into `outdir`.
pub fn run_pipeline(input: &Path, cfg: &RunConfig, outdir: &Path) -> Result<PipelineOutput> {
    let pc = io::load_points(input)?;
    let out = run_on_cloud(&pc, cfg)?;
    std::fs::create_dir_all(outdir)
        .map_err(|e| Error::Input(format!("cannot create {}: {e}", outdir.display())))?;
    io::write_file(&outdir.join("mapper.dot"), &io::dot_string(&out.mapper))?;
    io::write_file(&outdir.join("diagram.csv"), &io::diagram_csv(&out.diagram))?;
    io::write_file(
        &outdir.join("confidence.csv"),
        &io::confidence_csv(&out.region),
    )?;
    io::write_file(
        &outdir.join("diagram.svg"),
        &io::diagram_svg(&out.diagram, out.region.eta),
    )?;
    io::write_file(
        &outdir.join("params.txt"),
        &io::params_txt(
            &out.params,
            &out.cover,
            &out.report,
            cfg.seed,
            &cfg.filter.to_string(),
        ),
    )?;
    Ok(out)
}

/// Analytic target diagram for a shape/filter pair, when one is known.
pub fn ground_truth_diagram(shape: Shape, filter: &FilterSpec) -> Result<ExtendedDiagram> {
    match (shape, filter) {
        (Shape::Circle, FilterSpec::Coordinate(axis)) if *axis < 2 => {
            Ok(ExtendedDiagram::new(vec![
                DiagramPoint::new(PointType::Ext0, -1.0, 1.0),
                DiagramPoint::new(PointType::Ext1, 1.0, -1.0),
            ]))
        }
        _ => input_err(format!(
            "no analytic reference diagram for shape '{shape}' with filter '{filter}'"
        )),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
}

pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from("n,mean,sd\n");
    for r in rows {
        out.push_str(&format!("{},{},{}\n", r.n, r.mean, r.sd));
    }
    out
}

/// For each sample size, draws `reps` independent clouds, runs the tuned
/// pipeline, and records mean and sd of the bottleneck distance between the
/// Mapper diagram and the analytic reference.
pub fn convergence_study(
    shape: Shape,
    n_list: &[usize],
    reps: usize,
    noise_sd: f64,
    cfg: &RunConfig,
) -> Result<Vec<ConvergenceRow>> {
    if n_list.is_empty() || reps == 0 {
        return input_err("need at least one sample size and one repetition");
    }
    let truth = ground_truth_diagram(shape, &cfg.filter)?;
    let mut rows = Vec::with_capacity(n_list.len());
    for (ni, &n) in n_list.iter().enumerate() {
        let mut dists = Vec::with_capacity(reps);
        for rep in 0..reps {
            let cell = (ni * reps + rep) as u64;
            let mut rng = rng_stream(cfg.seed, cell);
            let d = convergence_cell(shape, n, noise_sd, cfg, &mut rng, &truth)?;
            dists.push(d);
        }
        let mean = dists.iter().sum::<f64>() / reps as f64;
        let sd = if reps > 1 {
            let var =
                dists.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (reps - 1) as f64;
            var.sqrt()
        } else {
            0.0
        };
        rows.push(ConvergenceRow { n, mean, sd });
    }
    Ok(rows)
}

fn convergence_cell(
    shape: Shape,
    n: usize,
    noise_sd: f64,
    cfg: &RunConfig,
    rng: &mut Rng,
    truth: &ExtendedDiagram,
) -> Result<f64> {
    let pc = synth_shape(shape, n, noise_sd, false, rng)?;
    let dm = pairwise_distances(&pc);
    let fv = cfg.filter.apply(&pc, &dm)?;
    let params = tune(&dm, &fv, &cfg.tune_config(), rng)?;
    let cover = build_cover(fv.min(), fv.max(), params.r, params.g)?;
    let graph = rips_graph(&dm, params.delta)?;
    let mapper = build_mapper(&graph, &fv, &cover, params.variant)?;
    let diagram = extended_diagram(&mapper.weighted_graph())?;
    Ok(bottleneck(&diagram, truth))
}

/// Parses "200,400,800" into sample sizes.
pub fn parse_n_list(s: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in s.split(',') {
        out.push(
            part.trim()
                .parse::<usize>()
                .map_err(|_| Error::Input(format!("bad sample size '{part}'")))?,
        );
    }
    Ok(out)
}

/// Exit code for an error, per the documented taxonomy.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Input(_) => 2,
        Error::Degenerate(_) => 3,
        Error::Internal(_) => 4,
    }
}

/// Output directory helper: `<base>` must be creatable.
pub fn ensure_dir(path: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(path)
        .map_err(|e| Error::Input(format!("cannot create {}: {e}", path.display())))?;
    Ok(path.to_path_buf())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truth_diagram_gate() {
        assert!(ground_truth_diagram(Shape::Circle, &FilterSpec::Coordinate(0)).is_ok());
        assert!(ground_truth_diagram(Shape::Circle, &FilterSpec::Eccentricity).is_err());
        assert!(ground_truth_diagram(Shape::Torus, &FilterSpec::Coordinate(0)).is_err());
    }

    #[test]
    fn truth_against_itself_is_zero() {
        let truth = ground_truth_diagram(Shape::Circle, &FilterSpec::Coordinate(0)).unwrap();
        assert_eq!(bottleneck(&truth, &truth), 0.0);
    }

    #[test]
    fn n_list_parsing() {
        assert_eq!(parse_n_list("200, 400,800").unwrap(), vec![200, 400, 800]);
        assert!(parse_n_list("200,x").is_err());
    }

    #[test]
    fn single_rep_has_zero_sd() {
        let cfg = RunConfig {
            subsample_draws: 20,
            ..RunConfig::default()
        };
        let rows = convergence_study(Shape::Circle, &[120], 1, 0.0, &cfg).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].sd, 0.0);
        assert!(rows[0].mean < 1.0);
    }
}
