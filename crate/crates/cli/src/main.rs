//! proximet command line: generate point samples, build and perturb
//! neighborhood graphs, Jaccard-filter them, evaluate metric recovery, run
//! parameter-bound calculators, and drive whole sweeps.
//!
//! Exit codes: 0 on success, 2 on parameter errors, 3 on I/O errors.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use proximet::{
    build_r_graph, classify_extra_edges, compare_metric_pairs, compare_metrics, emit_plots,
    feasibility_report, hop_distances, hop_distances_pairs, metrics, perturb, perturbation_stats,
    run_realnet_experiment, run_synthetic_sweep, sample_pairs, sample_points, suggest_radius,
    tau_filter, write_edge_scores, Error, FeasibilityReport, FilterConfig, Graph, GraphLabel,
    PairsMode, PerturbationParams, PointSample, RegimeParams, Result, SpaceSpec, SweepConfig,
};

#[derive(Parser)]
#[command(
    name = "proximet",
    version,
    about = "Proximity-graph noise and Jaccard-filtering toolkit",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample points from a model space and write a point cloud file
    Generate(GenerateArgs),
    /// Build the r-neighborhood graph of a point cloud
    Graph(GraphArgs),
    /// Apply random edge deletion (p) and insertion (q) to a graph
    Perturb(PerturbArgs),
    /// Jaccard-filter a graph at threshold tau
    Filter(FilterArgs),
    /// Compare the shortest-path metrics of a test graph against a reference
    Evaluate(EvaluateArgs),
    /// Evaluate the closed-form parameter bounds for a regime
    Bounds(BoundsArgs),
    /// Run a synthetic ground-truth sweep from a TOML config
    Sweep(SweepArgs),
    /// Run the real-network insertion sweep on an edge list
    Realnet(RealnetArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Space kind: circle | unit-square | unit-cube | hyperboloid |
    /// sphere-nonuniform | pointcloud-file
    #[arg(long)]
    space: String,
    /// Space parameters as key=value (circumference=, z_max=, alpha=,
    /// path=, known_doubling=)
    #[arg(long, num_args = 0.., value_name = "KEY=VALUE")]
    params: Vec<String>,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GraphArgs {
    /// Point cloud file (written by `generate`, or any whitespace-separated
    /// coordinate file)
    #[arg(long)]
    points: PathBuf,
    /// Neighborhood radius
    #[arg(long)]
    r: Option<f64>,
    /// Radius as a multiple of the mean k-th nearest neighbor distance
    #[arg(long)]
    knn_mult: Option<f64>,
    /// k for --knn-mult
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PerturbArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Deletion probability
    #[arg(long)]
    p: f64,
    /// Insertion probability
    #[arg(long)]
    q: f64,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FilterArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Jaccard threshold (edges with index >= tau survive)
    #[arg(long)]
    tau: f64,
    #[arg(long)]
    out: PathBuf,
    /// Also dump per-edge scores (u,v,intersection,union,jaccard) here
    #[arg(long)]
    scores: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Reference graph edge list
    #[arg(long)]
    truth: PathBuf,
    /// Graph under evaluation
    #[arg(long)]
    test: PathBuf,
    /// `all` or a sampled pair count
    #[arg(long, default_value = "all")]
    pairs: String,
    /// Seed for the sampled pair set
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV (one header + one row)
    #[arg(long)]
    out: PathBuf,
    /// Optionally dump both hop matrices as CSV into this directory
    #[arg(long)]
    dump_hops: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    n: usize,
    /// Ball-mass lower bound s in (0, 1]
    #[arg(long)]
    s: f64,
    /// Doubling constant L >= 1
    #[arg(long = "L", value_name = "L")]
    l: f64,
    /// Insertion budget ratio (q <= c*s)
    #[arg(long)]
    c: f64,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    q: f64,
    #[arg(long, value_enum, default_value_t = BoundsFormat::Text)]
    format: BoundsFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundsFormat {
    Text,
    Csv,
}

#[derive(Args)]
struct SweepArgs {
    /// TOML config mirroring the SweepConfig fields
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct RealnetArgs {
    /// Network edge list
    #[arg(long)]
    edges: PathBuf,
    /// Comma-separated ascending insertion probabilities
    #[arg(long)]
    q_grid: String,
    #[arg(long)]
    tau: f64,
    #[arg(long, default_value_t = 3)]
    trials: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
    /// `auto` (all pairs up to 20000 vertices, a 10^6-pair sample beyond),
    /// `all`, or an explicit sampled pair count
    #[arg(long, default_value = "auto")]
    pairs: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Generate(args) => generate(args),
        Command::Graph(args) => graph(args),
        Command::Perturb(args) => perturb_cmd(args),
        Command::Filter(args) => filter_cmd(args),
        Command::Evaluate(args) => evaluate(args),
        Command::Bounds(args) => bounds(args),
        Command::Sweep(args) => sweep(args),
        Command::Realnet(args) => realnet(args),
    }
}

fn parse_space(kind: &str, params: &[String]) -> Result<SpaceSpec> {
    let mut map = BTreeMap::new();
    for item in params {
        let (k, v) = item.split_once('=').ok_or_else(|| {
            Error::parameter(format!("bad --params item `{item}`; expected key=value"))
        })?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    let mut take_f64 = |key: &str, default: Option<f64>| -> Result<f64> {
        match map.remove(key) {
            Some(v) => v
                .parse()
                .map_err(|_| Error::parameter(format!("parameter `{key}` is not a number: {v}"))),
            None => default.ok_or_else(|| Error::parameter(format!("space `{kind}` needs {key}=<value>"))),
        }
    };
    let mut spec = match kind {
        "circle" => SpaceSpec::circle(take_f64("circumference", Some(1.0))?),
        "unit-square" => SpaceSpec::unit_square(),
        "unit-cube" => SpaceSpec::unit_cube(),
        "hyperboloid" => SpaceSpec::hyperboloid(take_f64("z_max", Some(1.5))?),
        "sphere-nonuniform" => SpaceSpec::sphere_nonuniform(take_f64("alpha", Some(0.0))?),
        "pointcloud-file" => {
            let path = map
                .remove("path")
                .ok_or_else(|| Error::parameter("space `pointcloud-file` needs path=<file>"))?;
            SpaceSpec::pointcloud(path)
        }
        other => {
            return Err(Error::parameter(format!(
                "unknown space kind `{other}` (expected circle, unit-square, unit-cube, \
hyperboloid, sphere-nonuniform, pointcloud-file)"
            )))
        }
    };
    if map.contains_key("known_doubling") {
        let l = map.remove("known_doubling").unwrap();
        spec.known_doubling = Some(l.parse().map_err(|_| {
            Error::parameter(format!("parameter `known_doubling` is not a number: {l}"))
        })?);
    }
    if let Some(extra) = map.keys().next() {
        return Err(Error::parameter(format!(
            "unknown parameter `{extra}` for space `{kind}`"
        )));
    }
    spec.validate()?;
    Ok(spec)
}

fn generate(args: GenerateArgs) -> Result<()> {
    let space = parse_space(&args.space, &args.params)?;
    let sample = sample_points(&space, args.n, args.seed)?;
    sample.write_points_file(&args.out)?;
    println!(
        "wrote {} {}-d points ({}) to {}",
        sample.len(),
        sample.dim(),
        args.space,
        args.out.display()
    );
    Ok(())
}

fn graph(args: GraphArgs) -> Result<()> {
    let sample = PointSample::from_file(&args.points)?;
    let r = match (args.r, args.knn_mult, args.k) {
        (Some(r), None, None) => r,
        (None, Some(mult), Some(k)) => suggest_radius(&sample, mult, k)?,
        _ => {
            return Err(Error::parameter(
                "pass either --r <radius> or both --knn-mult <mult> and --k <k>",
            ))
        }
    };
    let g = build_r_graph(&sample, r)?;
    g.write_edge_list(&args.out)?;
    println!(
        "r = {r}: {} vertices, {} edges -> {}",
        g.n(),
        g.edge_count(),
        args.out.display()
    );
    Ok(())
}

fn perturb_cmd(args: PerturbArgs) -> Result<()> {
    let g = Graph::read_edge_list(&args.graph, GraphLabel::TrueGraph)?;
    let observed = perturb(&g, &PerturbationParams { p: args.p, q: args.q, seed: args.seed })?;
    let stats = perturbation_stats(&g, &observed)?;
    observed.write_edge_list(&args.out)?;
    println!(
        "retained {} deleted {} inserted {} -> {}",
        stats.retained,
        stats.deleted,
        stats.inserted,
        args.out.display()
    );
    Ok(())
}

fn filter_cmd(args: FilterArgs) -> Result<()> {
    let g = Graph::read_edge_list(&args.graph, GraphLabel::Observed)?;
    if let Some(scores) = &args.scores {
        write_edge_scores(&g, scores)?;
    }
    let filtered = tau_filter(&g, &FilterConfig { tau: args.tau })?;
    filtered.write_edge_list(&args.out)?;
    println!(
        "tau = {}: kept {} of {} edges -> {}",
        args.tau,
        filtered.edge_count(),
        g.edge_count(),
        args.out.display()
    );
    Ok(())
}

fn evaluate(args: EvaluateArgs) -> Result<()> {
    let truth = Graph::read_edge_list(&args.truth, GraphLabel::TrueGraph)?;
    let test = Graph::read_edge_list(&args.test, GraphLabel::External)?;
    if truth.n() != test.n() {
        return Err(Error::parameter(format!(
            "vertex count mismatch: {} in {} vs {} in {}",
            truth.n(),
            args.truth.display(),
            test.n(),
            args.test.display()
        )));
    }
    let pairs_mode: PairsMode = args.pairs.parse()?;
    let (comparison, n_pairs) = match pairs_mode {
        PairsMode::All => {
            let d_truth = hop_distances(&truth);
            let d_test = hop_distances(&test);
            if let Some(dir) = &args.dump_hops {
                std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
                d_truth.write_csv(dir.join("truth_hops.csv"))?;
                d_test.write_csv(dir.join("test_hops.csv"))?;
            }
            let n_pairs = truth.n() as u64 * (truth.n() as u64 - 1) / 2;
            (compare_metrics(&d_truth, &d_test)?, n_pairs)
        }
        PairsMode::Sampled(count) => {
            if args.dump_hops.is_some() {
                return Err(Error::parameter(
                    "--dump-hops needs --pairs all (full matrices)",
                ));
            }
            let pairs = sample_pairs(truth.n(), count, args.seed);
            let d_truth = hop_distances_pairs(&truth, &pairs)?;
            let d_test = hop_distances_pairs(&test, &pairs)?;
            let n_pairs = pairs.len() as u64;
            (compare_metric_pairs(&d_truth, &d_test)?, n_pairs)
        }
    };
    let mut out = String::from(metrics::METRIC_COMPARISON_CSV_HEADER);
    out.push('\n');
    out.push_str(&comparison.csv_row(n_pairs, &pairs_mode.to_string()));
    out.push('\n');
    std::fs::write(&args.out, out).map_err(|e| Error::io(&args.out, e))?;
    println!(
        "r2approx = {:.6}, delta_n = {}, good pairs = {} -> {}",
        comparison.r2approx,
        comparison
            .delta_n
            .map_or("undefined".to_string(), |v| format!("{v:.6}")),
        comparison.good_index_count,
        args.out.display()
    );

    // extra-edge breakdown is cheap and often what one actually wants to see
    let classification = classify_extra_edges(&test, &truth)?;
    println!(
        "edges vs reference: {} shared, {} extra with a shared neighbor, {} extra without",
        classification.good, classification.benign_extra, classification.realbad
    );
    Ok(())
}

fn bounds(args: BoundsArgs) -> Result<()> {
    let params = RegimeParams {
        n: args.n,
        s: args.s,
        l: args.l,
        c: args.c,
        p: args.p,
        q: args.q,
    };
    let report = feasibility_report(&params)?;
    match args.format {
        BoundsFormat::Text => print!("{report}"),
        BoundsFormat::Csv => {
            println!("{}", FeasibilityReport::CSV_HEADER);
            println!("{}", report.csv_row());
        }
    }
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<()> {
    let cfg = SweepConfig::from_toml_file(&args.config)?;
    let report = run_synthetic_sweep(&cfg)?;
    for warning in &report.meta.warnings {
        eprintln!("warning: {warning}");
    }
    let files = emit_plots(&report, &args.out_dir)?;
    println!(
        "sweep done: {} rows (tau = {}, r = {:?}, s_hat = {:?})",
        report.rows.len(),
        report.meta.tau,
        report.meta.r_used,
        report.meta.s_hat
    );
    for f in files {
        println!("  {}", f.display());
    }
    Ok(())
}

fn realnet(args: RealnetArgs) -> Result<()> {
    let q_grid: Vec<f64> = args
        .q_grid
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::parameter(format!("bad q value `{s}` in --q-grid")))
        })
        .collect::<Result<_>>()?;
    let pairs_mode: Option<PairsMode> = if args.pairs == "auto" {
        None
    } else {
        Some(args.pairs.parse()?)
    };
    let report = run_realnet_experiment(
        &args.edges,
        &q_grid,
        args.tau,
        args.trials,
        args.seed,
        pairs_mode,
    )?;
    let files = emit_plots(&report, &args.out_dir)?;
    println!(
        "realnet done: {} rows over {} q values x {} trials (pairs: {})",
        report.rows.len(),
        q_grid.len(),
        args.trials,
        report.meta.pairs_mode
    );
    for f in files {
        println!("  {}", f.display());
    }
    Ok(())
}
