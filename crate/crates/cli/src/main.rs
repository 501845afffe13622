use clap::{Args, Parser, Subcommand};
use reebmap::io::{self, DenoiseSpec};
use reebmap::pipeline::{
    self, convergence_csv, convergence_study, exit_code, parse_n_list, run_pipeline, RunConfig,
};
use reebmap::synth::{synth_shape, Shape};
use reebmap_core::confidence::ConfidenceMethod;
use reebmap_core::error::{Error, Result};
use reebmap_core::filters::FilterSpec;
use reebmap_core::mapper::Variant;
use reebmap_core::seeds::rng_from_seed;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "reebmap",
    version,
    about = "Mapper graphs with statistically tuned parameters and confidence regions"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct CommonArgs {
    /// Filter: coord:<axis>, ecc, pca:<k>, dtm:<k>
    #[arg(long, default_value = "coord:0")]
    filter: String,
    /// Cover gain in (0, 1/2)
    #[arg(long, default_value_t = 0.4)]
    gain: f64,
    /// Exponent offset in the subsample size n / (ln n)^(1+beta)
    #[arg(long, default_value_t = 0.001)]
    beta: f64,
    /// Subsample draws averaged into the scale estimate
    #[arg(long = "subsamples", default_value_t = 100)]
    subsamples: usize,
    /// Mapper variant: nerve or multinerve
    #[arg(long, default_value = "nerve")]
    variant: String,
    /// Mass constant of a known (a, b)-standard model
    #[arg(long)]
    a: Option<f64>,
    /// Dimension exponent of a known (a, b)-standard model
    #[arg(long)]
    b: Option<f64>,
    /// Seed for all stochastic steps
    #[arg(long, env = "REEBMAP_SEED", default_value_t = 0)]
    seed: u64,
}

impl CommonArgs {
    fn to_config(&self) -> Result<RunConfig> {
        let variant = match self.variant.as_str() {
            "nerve" => Variant::Nerve,
            "multinerve" => Variant::EdgeMultinerve,
            other => {
                return Err(Error::Input(format!(
                    "unknown variant '{other}' (nerve or multinerve)"
                )))
            }
        };
        let known_model = match (self.a, self.b) {
            (Some(a), Some(b)) => Some((a, b)),
            (None, None) => None,
            _ => {
                return Err(Error::Input(
                    "--a and --b must be supplied together".into(),
                ))
            }
        };
        Ok(RunConfig {
            filter: FilterSpec::parse(&self.filter)?,
            gain: self.gain,
            beta: self.beta,
            subsample_draws: self.subsamples,
            variant,
            seed: self.seed,
            known_model,
            ..RunConfig::default()
        })
    }
}

#[derive(Args)]
struct ConfidenceArgs {
    /// Bootstrap replicates
    #[arg(long, default_value_t = 100)]
    bootstrap: usize,
    /// Confidence level is 1 - alpha
    #[arg(long, default_value_t = 0.15)]
    alpha: f64,
    /// Method: bootstrap, subsampling, or known
    #[arg(long = "confidence-method", default_value = "bootstrap")]
    method: String,
}

impl ConfidenceArgs {
    fn apply(&self, cfg: &mut RunConfig) -> Result<()> {
        cfg.bootstrap = self.bootstrap;
        cfg.alpha = self.alpha;
        cfg.confidence_method = match self.method.as_str() {
            "bootstrap" => ConfidenceMethod::Bootstrap,
            "subsampling" => ConfidenceMethod::Subsampling,
            "known" => ConfidenceMethod::KnownModel,
            other => {
                return Err(Error::Input(format!(
                    "unknown confidence method '{other}'"
                )))
            }
        };
        Ok(())
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Full pipeline: tune, build, summarize, attach confidence regions
    Run {
        /// CSV point cloud, one point per row
        #[arg(long)]
        input: PathBuf,
        /// Output directory for mapper.dot, diagram.csv, confidence.csv,
        /// diagram.svg and params.txt
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Pre-filter: dtm:<k>:<tau_frac>[:low|high]
        #[arg(long)]
        denoise: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        confidence: ConfidenceArgs,
    },
    /// Tune parameters and print the hypothesis report
    Tune {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        denoise: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Bootstrap half-width for the tuned Mapper
    Bootstrap {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        denoise: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        confidence: ConfidenceArgs,
    },
    /// DTM outlier removal; writes the kept points
    Denoise {
        #[arg(long)]
        input: PathBuf,
        /// dtm:<k>:<tau_frac>[:low|high]
        #[arg(long)]
        denoise: String,
        #[arg(long)]
        output: PathBuf,
    },
    /// Sample a synthetic shape to CSV
    Synth {
        /// circle, figure_eight, torus, klein4 or crater
        #[arg(long)]
        shape: String,
        #[arg(long)]
        n: usize,
        /// Gaussian jitter standard deviation
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        /// Evenly spaced parameters instead of uniform draws
        #[arg(long, default_value_t = false)]
        stratified: bool,
        #[arg(long, env = "REEBMAP_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Mean bottleneck distance to the analytic reference across sample sizes
    Convergence {
        #[arg(long, default_value = "circle")]
        shape: String,
        /// Comma-separated sample sizes
        #[arg(long = "n-list", default_value = "200,400,800")]
        n_list: String,
        #[arg(long, default_value_t = 10)]
        reps: usize,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn dispatch(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Run {
            input,
            out,
            denoise,
            common,
            confidence,
        } => {
            let mut cfg = common.to_config()?;
            confidence.apply(&mut cfg)?;
            cfg.denoise = denoise.as_deref().map(DenoiseSpec::parse).transpose()?;
            let result = run_pipeline(&input, &cfg, &out)?;
            let significant = result
                .region
                .per_point
                .iter()
                .filter(|&&(_, s)| s)
                .count();
            println!(
                "mapper: {} nodes, {} edges, {} components, first betti {}",
                result.mapper.node_count(),
                result.mapper.edge_count(),
                result.mapper.component_count(),
                result.mapper.betti_one()
            );
            println!(
                "diagram: {} points ({} significant at alpha {}, eta {})",
                result.diagram.len(),
                significant,
                cfg.alpha,
                result.region.eta
            );
            println!("artifacts written to {}", out.display());
            Ok(())
        }
        Cmd::Tune {
            input,
            denoise,
            common,
        } => {
            let mut cfg = common.to_config()?;
            cfg.denoise = denoise.as_deref().map(DenoiseSpec::parse).transpose()?;
            let pc = io::load_points(&input)?;
            let out = pipeline::run_on_cloud(&pc, &cfg)?;
            print!(
                "{}",
                io::params_txt(
                    &out.params,
                    &out.cover,
                    &out.report,
                    cfg.seed,
                    &cfg.filter.to_string()
                )
            );
            Ok(())
        }
        Cmd::Bootstrap {
            input,
            denoise,
            common,
            confidence,
        } => {
            let mut cfg = common.to_config()?;
            confidence.apply(&mut cfg)?;
            cfg.denoise = denoise.as_deref().map(DenoiseSpec::parse).transpose()?;
            let pc = io::load_points(&input)?;
            let out = pipeline::run_on_cloud(&pc, &cfg)?;
            println!("eta: {}", out.region.eta);
            for (p, significant) in &out.region.per_point {
                println!(
                    "{} ({}, {}): {}",
                    p.ptype,
                    p.birth,
                    p.death,
                    if *significant {
                        "significant"
                    } else {
                        "not significant"
                    }
                );
            }
            Ok(())
        }
        Cmd::Denoise {
            input,
            denoise,
            output,
        } => {
            let spec = DenoiseSpec::parse(&denoise)?;
            let pc = io::load_points(&input)?;
            let dm = reebmap_core::pairwise_distances(&pc);
            let kept = reebmap_core::dtm_filter(&dm, spec.k, spec.tau_frac, spec.mode)?;
            let filtered = pc.select(&kept)?;
            io::save_points(&filtered, &output)?;
            println!(
                "kept {} of {} points -> {}",
                kept.len(),
                pc.len(),
                output.display()
            );
            Ok(())
        }
        Cmd::Synth {
            shape,
            n,
            noise,
            stratified,
            seed,
            output,
        } => {
            let shape = Shape::parse(&shape)?;
            let pc = synth_shape(shape, n, noise, stratified, &mut rng_from_seed(seed))?;
            io::save_points(&pc, &output)?;
            println!("wrote {n} points on '{shape}' to {}", output.display());
            Ok(())
        }
        Cmd::Convergence {
            shape,
            n_list,
            reps,
            noise,
            output,
            common,
        } => {
            let cfg = common.to_config()?;
            let shape = Shape::parse(&shape)?;
            let sizes = parse_n_list(&n_list)?;
            let rows = convergence_study(shape, &sizes, reps, noise, &cfg)?;
            io::write_file(&output, &convergence_csv(&rows))?;
            for r in &rows {
                println!("n = {}: mean {} sd {}", r.n, r.mean, r.sd);
            }
            Ok(())
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = dispatch(cli.cmd) {
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}
