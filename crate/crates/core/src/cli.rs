//! Command-line front end: `analyze`, `generate`, `simulate` and `oracle`.
//!
//! Every report is a pure function of its inputs and flags, so two runs with
//! the same seed write byte-identical files. Wall-clock timing is only added
//! on request (`--timing`) because it would break that property.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::datasets;
use crate::error::{Error, Result};
use crate::graph::{parse_edge_list_with_nodes, Graph, ParseOptions};
use crate::inference::{
    classify_structure, coassignment_matrix, density_summary, exact_structure_posterior,
    group_size_posterior, membership_probabilities, DensitySummary, Structure, StructureVerdict,
    DEFAULT_BINS, DEFAULT_QUADRATURE_POINTS,
};
use crate::model::{BetaPrior, BlockProbs, Hyperparameters};
use crate::sampler::{run_chain, ChainConfig, Init, PosteriorSamples};
use crate::synth::{generate_sbm, grid, run_sweep, GeneratorSpec, SweepSpec};

/// Bumped whenever a key is renamed, removed or re-nested.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "mesosbm",
    version,
    about = "Posterior probabilities of assortative, disassortative and core-periphery structure"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the sampler on a graph and report structure, labels and densities.
    Analyze(AnalyzeArgs),
    /// Draw a two-block SBM graph and its planted labels.
    Generate(GenerateArgs),
    /// Average structure probabilities over synthetic graphs along a p12 grid.
    Simulate(SimulateArgs),
    /// Exact structure posterior by enumeration (at most 14 nodes).
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Whitespace-separated edge list, one edge per line.
    #[arg(value_name = "EDGES", required_unless_present = "dataset")]
    pub path: Option<PathBuf>,

    /// Bundled dataset instead of a file.
    #[arg(long, conflicts_with = "path")]
    pub dataset: Option<String>,

    /// Node-list sidecar; its first column names nodes, including ones
    /// without edges.
    #[arg(long, value_name = "FILE", conflicts_with = "dataset")]
    pub nodes: Option<PathBuf>,

    /// Keep sidecar nodes that have no edges.
    #[arg(long, requires = "nodes")]
    pub allow_isolated: bool,
}

#[derive(Debug, Clone, Args)]
pub struct PriorArgs {
    /// Beta shape `a` shared by all three block probabilities.
    #[arg(long, default_value_t = 1.0)]
    pub a0: f64,
    /// Beta shape `b` shared by all three block probabilities.
    #[arg(long, default_value_t = 1.0)]
    pub b0: f64,
    #[arg(long = "a0-11")]
    pub a0_11: Option<f64>,
    #[arg(long = "b0-11")]
    pub b0_11: Option<f64>,
    #[arg(long = "a0-12")]
    pub a0_12: Option<f64>,
    #[arg(long = "b0-12")]
    pub b0_12: Option<f64>,
    #[arg(long = "a0-22")]
    pub a0_22: Option<f64>,
    #[arg(long = "b0-22")]
    pub b0_22: Option<f64>,
    /// Prior probability that a node belongs to group 1.
    #[arg(long, default_value_t = 0.5)]
    pub pi: f64,
}

impl PriorArgs {
    pub fn hyperparameters(&self, n: usize) -> Result<Hyperparameters> {
        let block = |a: Option<f64>, b: Option<f64>| BetaPrior {
            a: a.unwrap_or(self.a0),
            b: b.unwrap_or(self.b0),
        };
        Hyperparameters::new(
            [
                block(self.a0_11, self.b0_11),
                block(self.a0_12, self.b0_12),
                block(self.a0_22, self.b0_22),
            ],
            vec![self.pi; n],
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitArg {
    Random,
    Degree,
}

impl From<InitArg> for Init {
    fn from(arg: InitArg) -> Self {
        match arg {
            InitArg::Random => Init::RandomLabels,
            InitArg::Degree => Init::DegreeSplit,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct ChainArgs {
    /// Total iterations per chain, burn-in included.
    #[arg(long, default_value_t = 15_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 5_000)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 1)]
    pub thin: usize,
    #[arg(long, default_value_t = 1)]
    pub chains: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = InitArg::Random)]
    pub init: InitArg,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub prior: PriorArgs,
    #[command(flatten)]
    pub chain: ChainArgs,

    /// Tally pairwise co-assignment and include the matrix in the report.
    #[arg(long)]
    pub coassign: bool,
    /// Keep every retained label vector and include them in the report.
    #[arg(long)]
    pub store_labels: bool,
    /// Histogram bins on [0, 1] for the density summary.
    #[arg(long, default_value_t = DEFAULT_BINS)]
    pub bins: usize,

    /// Report destination; standard output when omitted.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write per-draw (p11, p12, p22) traces as CSV.
    #[arg(long, value_name = "FILE")]
    pub emit_traces: Option<PathBuf>,
    /// Write the posterior density histograms as CSV.
    #[arg(long, value_name = "FILE")]
    pub emit_densities: Option<PathBuf>,
    /// Record wall-clock duration in the report (breaks byte-identical output).
    #[arg(long)]
    pub timing: bool,
}

impl AnalyzeArgs {
    pub fn chain_config(&self) -> ChainConfig {
        ChainConfig {
            total_samples: self.chain.samples,
            burn_in: self.chain.burn_in,
            thin: self.chain.thin,
            seed: self.chain.seed,
            init: self.chain.init.into(),
            chains: self.chain.chains,
            coassign: self.coassign,
            store_labels: self.store_labels,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub n: usize,
    /// Fraction of nodes in block 1 (rounded to the nearest node).
    #[arg(long, conflicts_with = "sizes", required_unless_present = "sizes")]
    pub frac: Option<f64>,
    /// Explicit block sizes `N1,N2`; must sum to `--n`.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    #[arg(long)]
    pub p11: f64,
    #[arg(long)]
    pub p12: f64,
    #[arg(long)]
    pub p22: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Edge-list destination.
    #[arg(long, short)]
    pub out: PathBuf,
    /// Node/label destination; defaults to the edge-list path plus `.labels`.
    #[arg(long)]
    pub labels: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 0.4)]
    pub frac: f64,
    #[arg(long, default_value_t = 0.20)]
    pub p11: f64,
    #[arg(long, default_value_t = 0.10)]
    pub p22: f64,
    #[arg(long, default_value_t = 0.05)]
    pub p12_start: f64,
    #[arg(long, default_value_t = 0.25)]
    pub p12_stop: f64,
    #[arg(long, default_value_t = 0.025)]
    pub p12_step: f64,
    #[arg(long, default_value_t = 100)]
    pub replicates: usize,
    #[arg(long, default_value_t = 1_500)]
    pub samples: usize,
    #[arg(long, default_value_t = 500)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 1)]
    pub thin: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Sweep table destination; standard output when omitted.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Also write one row per replicate.
    #[arg(long, value_name = "FILE")]
    pub raw: Option<PathBuf>,
}

impl SimulateArgs {
    pub fn sweep_spec(&self) -> Result<SweepSpec> {
        let (start, stop, step) = (self.p12_start, self.p12_stop, self.p12_step);
        if ![start, stop, step].iter().all(|v| v.is_finite()) || step <= 0.0 || start > stop {
            return Err(Error::InvalidGenerator(format!(
                "p12 grid needs finite start <= stop and a positive step, got {start}..{stop} by {step}"
            )));
        }
        let chain = ChainConfig {
            thin: self.thin,
            ..ChainConfig::new(self.samples, self.burn_in, self.seed)
        };
        let spec = SweepSpec {
            n: self.n,
            block1_fraction: self.frac,
            p11: self.p11,
            p22: self.p22,
            p12_grid: grid(start, stop, step),
            replicates: self.replicates,
            chain,
            seed: self.seed,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub prior: PriorArgs,
    /// Odd number of Simpson quadrature points on [0, 1].
    #[arg(long, default_value_t = DEFAULT_QUADRATURE_POINTS)]
    pub points: usize,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

/// Exit status for an error: 1 for usage and configuration problems, 2 for
/// unreadable or malformed data, 3 for numerical failures.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidConfig(_)
        | Error::InvalidHyperparameters(_)
        | Error::InvalidProbability { .. }
        | Error::InvalidGenerator(_)
        | Error::CoassignmentDisabled
        | Error::LabelsNotStored
        | Error::TooManyNodes { .. }
        | Error::UnknownDataset(_)
        | Error::LengthMismatch { .. } => 1,
        Error::SelfLoop { .. }
        | Error::TokenCount { .. }
        | Error::IsolatedNode { .. }
        | Error::NodeOutOfRange { .. }
        | Error::DatasetUnavailable { .. }
        | Error::Io(_)
        | Error::Json(_) => 2,
        Error::Numerical(_) | Error::EmptySamples => 3,
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Analyze(args) => cmd_analyze(&args),
        Command::Generate(args) => cmd_generate(&args),
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Oracle(args) => cmd_oracle(&args),
    }
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(path) => fs::write(path, text)
            .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display())))),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputMetadata {
    pub source: String,
    pub n: usize,
    pub m: usize,
    /// SHA-256 of the canonical (name-sorted) edge list.
    pub canonical_sha256: String,
    pub isolated_nodes: usize,
    pub duplicate_edges: usize,
}

pub fn load_input(input: &InputArgs) -> Result<(Graph, InputMetadata)> {
    let (graph, source, diagnostics) = match (&input.dataset, &input.path) {
        (Some(name), _) => {
            let graph = datasets::load(name)?;
            (graph, format!("dataset:{name}"), Default::default())
        }
        (None, Some(path)) => {
            let text = read_file(path)?;
            let sidecar = input.nodes.as_deref().map(read_file).transpose()?;
            let options = ParseOptions {
                allow_isolated: input.allow_isolated,
                ..ParseOptions::default()
            };
            let (graph, diagnostics) =
                parse_edge_list_with_nodes(&text, sidecar.as_deref(), &options)?;
            (graph, path.display().to_string(), diagnostics)
        }
        (None, None) => {
            return Err(Error::InvalidConfig(
                "give an edge-list path or --dataset".into(),
            ))
        }
    };
    if diagnostics.duplicate_edges > 0 {
        log::warn!("{} duplicate edges collapsed", diagnostics.duplicate_edges);
    }
    let meta = InputMetadata {
        source,
        n: graph.n(),
        m: graph.m(),
        canonical_sha256: graph.canonical_hash(),
        isolated_nodes: diagnostics.isolated_nodes,
        duplicate_edges: diagnostics.duplicate_edges,
    };
    Ok((graph, meta))
}

/// Values keyed by node name, serialized as a JSON object in node-id order.
#[derive(Debug, Clone, PartialEq)]
pub struct ByNode(pub Vec<(String, f64)>);

impl Serialize for ByNode {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (name, value) in &self.0 {
            map.serialize_entry(name, value)?;
        }
        map.end()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub hyperparameters: Hyperparameters,
    pub chain: ChainConfig,
    pub bins: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coassignment {
    /// Row and column order of `matrix`.
    pub nodes: Vec<String>,
    pub matrix: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub input: InputMetadata,
    pub config: ConfigEcho,
    pub verdict: StructureVerdict,
    pub most_probable: Structure,
    /// Posterior probability of membership in group 1 (the denser block).
    pub membership: ByNode,
    /// Posterior of the group-1 size, indexed 0..=n.
    pub group_size: Vec<f64>,
    pub densities: DensitySummary,
    pub swap_acceptance_rate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coassignment: Option<Coassignment>,
    /// Retained label vectors as strings of `1`/`2` in node-id order.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label_draws: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_seconds: Option<f64>,
}

impl AnalysisReport {
    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }

    /// Long-format `section,key,value` table of the scalar results and
    /// per-node memberships.
    pub fn to_csv(&self) -> Result<String> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        let mut rows: Vec<(&str, String, String)> = vec![
            (
                "meta",
                "schema_version".into(),
                self.schema_version.to_string(),
            ),
            ("input", "source".into(), self.input.source.clone()),
            ("input", "n".into(), self.input.n.to_string()),
            ("input", "m".into(), self.input.m.to_string()),
            (
                "input",
                "canonical_sha256".into(),
                self.input.canonical_sha256.clone(),
            ),
            ("config", "seed".into(), self.config.chain.seed.to_string()),
            (
                "config",
                "samples".into(),
                self.config.chain.total_samples.to_string(),
            ),
            (
                "config",
                "burn_in".into(),
                self.config.chain.burn_in.to_string(),
            ),
            ("config", "thin".into(), self.config.chain.thin.to_string()),
            (
                "config",
                "chains".into(),
                self.config.chain.chains.to_string(),
            ),
        ];
        let v = &self.verdict;
        let e = &self.densities.exceedance;
        for (key, value) in [
            ("p_assortative", v.p_assortative),
            ("p_core_periphery", v.p_core_periphery),
            ("p_disassortative", v.p_disassortative),
        ] {
            rows.push(("verdict", key.into(), value.to_string()));
        }
        for (key, value) in [
            ("p11_gt_p12", e.p11_gt_p12),
            ("p12_gt_p22", e.p12_gt_p22),
            ("p11_gt_p22", e.p11_gt_p22),
        ] {
            rows.push(("exceedance", key.into(), value.to_string()));
        }
        for (key, m) in [
            ("p11", &self.densities.p11),
            ("p12", &self.densities.p12),
            ("p22", &self.densities.p22),
        ] {
            rows.push(("density", format!("{key}_mean"), m.mean.to_string()));
            rows.push(("density", format!("{key}_sd"), m.sd.to_string()));
        }
        rows.push((
            "chain",
            "swap_acceptance_rate".into(),
            self.swap_acceptance_rate.to_string(),
        ));
        for (name, p) in &self.membership.0 {
            rows.push(("membership", name.clone(), p.to_string()));
        }
        for (size, p) in self.group_size.iter().enumerate() {
            rows.push(("group_size", size.to_string(), p.to_string()));
        }

        writer
            .write_record(["section", "key", "value"])
            .map_err(csv_error)?;
        for (section, key, value) in rows {
            writer
                .write_record([section, key.as_str(), value.as_str()])
                .map_err(csv_error)?;
        }
        let bytes = writer
            .into_inner()
            .map_err(|e| Error::Io(io::Error::other(e.to_string())))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(io::Error::other(e))
}

/// Result of [`analyze`]: the report plus the draws it summarizes.
pub struct Analysis {
    pub report: AnalysisReport,
    pub samples: PosteriorSamples,
}

pub fn analyze(args: &AnalyzeArgs) -> Result<Analysis> {
    let cfg = args.chain_config();
    cfg.validate()?;
    let (graph, input) = load_input(&args.input)?;
    let h = args.prior.hyperparameters(graph.n())?;

    let started = Instant::now();
    let samples = run_chain(&graph, &h, &cfg)?;
    let elapsed = started.elapsed().as_secs_f64();
    log::info!(
        "{} retained draws from {} chain(s) in {elapsed:.2}s",
        samples.retained,
        cfg.chains
    );

    let verdict = classify_structure(&samples)?;
    let membership = membership_probabilities(&samples)?;
    let densities = density_summary(&samples, args.bins)?;
    let coassignment = if cfg.coassign {
        Some(Coassignment {
            nodes: graph.names().to_vec(),
            matrix: coassignment_matrix(&samples)?,
        })
    } else {
        None
    };
    let label_draws = samples.labels.as_ref().map(|draws| {
        draws
            .iter()
            .map(|c| c.codes().iter().map(|&k| char::from(b'0' + k)).collect())
            .collect()
    });
    let report = AnalysisReport {
        schema_version: SCHEMA_VERSION,
        input,
        config: ConfigEcho {
            hyperparameters: h,
            chain: cfg,
            bins: args.bins,
        },
        most_probable: verdict.most_probable(),
        verdict,
        membership: ByNode(graph.names().iter().cloned().zip(membership).collect()),
        group_size: group_size_posterior(&samples)?,
        densities,
        swap_acceptance_rate: samples.swap_acceptance_rate(),
        coassignment,
        label_draws,
        wall_clock_seconds: args.timing.then_some(elapsed),
    };
    check_finite(&report)?;
    Ok(Analysis { report, samples })
}

fn check_finite(report: &AnalysisReport) -> Result<()> {
    let d = &report.densities;
    let mut values = report.verdict.as_array().to_vec();
    values.extend(report.membership.0.iter().map(|(_, p)| *p));
    values.extend(&report.group_size);
    for m in [&d.p11, &d.p12, &d.p22] {
        values.extend([
            m.mean,
            m.sd,
            m.quantiles.q025,
            m.quantiles.q500,
            m.quantiles.q975,
        ]);
        values.extend(&m.mass);
    }
    values.push(report.swap_acceptance_rate);
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Numerical(
            "non-finite value in analysis report".into(),
        ))
    }
}

/// Per-draw traces: `chain,draw,p11,p12,p22,log_likelihood`.
pub fn traces_csv(samples: &PosteriorSamples) -> Result<String> {
    let mut out = String::from("chain,draw,p11,p12,p22,log_likelihood\n");
    let mut offset = 0;
    let chains: Vec<(usize, usize)> = if samples.chains.is_empty() {
        vec![(0, samples.draws.len())]
    } else {
        samples
            .chains
            .iter()
            .map(|c| (c.chain_index, c.retained))
            .collect()
    };
    for (chain, retained) in chains {
        for k in 0..retained {
            let p = &samples.draws[offset + k];
            let ll = samples.log_lik[offset + k];
            let _ = writeln!(out, "{chain},{k},{},{},{},{ll}", p.p11, p.p12, p.p22);
        }
        offset += retained;
    }
    Ok(out)
}

/// Density histograms: `bin_lower,bin_upper,p11,p12,p22` (probability mass).
pub fn densities_csv(d: &DensitySummary) -> String {
    let mut out = String::from("bin_lower,bin_upper,p11,p12,p22\n");
    for (k, w) in d.bin_edges.windows(2).enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            w[0], w[1], d.p11.mass[k], d.p12.mass[k], d.p22.mass[k]
        );
    }
    out
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<()> {
    let Analysis { report, samples } = analyze(args)?;
    let text = match args.format {
        Format::Json => report.to_json()?,
        Format::Csv => report.to_csv()?,
    };
    if let Some(path) = &args.emit_traces {
        write_output(Some(path), &traces_csv(&samples)?)?;
    }
    if let Some(path) = &args.emit_densities {
        write_output(Some(path), &densities_csv(&report.densities))?;
    }
    write_output(args.out.as_deref(), &text)
}

impl GenerateArgs {
    pub fn generator_spec(&self) -> Result<GeneratorSpec> {
        let probs = BlockProbs::new(self.p11, self.p12, self.p22)?;
        match (&self.sizes, self.frac) {
            (Some(sizes), _) => {
                let &[n1, n2] = sizes.as_slice() else {
                    return Err(Error::InvalidGenerator(format!(
                        "--sizes takes exactly two values, got {}",
                        sizes.len()
                    )));
                };
                if n1 + n2 != self.n {
                    return Err(Error::InvalidGenerator(format!(
                        "block sizes {n1} + {n2} do not sum to n = {}",
                        self.n
                    )));
                }
                Ok(GeneratorSpec {
                    sizes: (n1, n2),
                    probs,
                    seed: self.seed,
                })
            }
            (None, Some(frac)) => GeneratorSpec::from_fraction(self.n, frac, probs, self.seed),
            (None, None) => Err(Error::InvalidGenerator(
                "give either --frac or --sizes".into(),
            )),
        }
    }
}

fn cmd_generate(args: &GenerateArgs) -> Result<()> {
    let spec = args.generator_spec()?;
    let synthetic = generate_sbm(&spec)?;
    let labels_path = args.labels.clone().unwrap_or_else(|| {
        let mut name = args.out.clone().into_os_string();
        name.push(".labels");
        PathBuf::from(name)
    });
    let mut labels = String::new();
    for (i, group) in synthetic.truth.as_slice().iter().enumerate() {
        let _ = writeln!(labels, "{} {}", synthetic.graph.name(i), group.code());
    }
    write_output(Some(&args.out), &synthetic.graph.canonical_edge_list())?;
    write_output(Some(&labels_path), &labels)?;
    log::info!(
        "wrote {} edges to {} and labels to {}",
        synthetic.graph.m(),
        args.out.display(),
        labels_path.display()
    );
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let spec = args.sweep_spec()?;
    let table = run_sweep(&spec)?;
    if let Some(path) = &args.raw {
        write_output(Some(path), &table.raw_to_csv()?)?;
    }
    write_output(args.out.as_deref(), &table.to_csv()?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub schema_version: u32,
    pub input: InputMetadata,
    pub hyperparameters: Hyperparameters,
    pub quadrature_points: usize,
    pub verdict: StructureVerdict,
}

pub fn oracle(args: &OracleArgs) -> Result<OracleReport> {
    let (graph, input) = load_input(&args.input)?;
    let h = args.prior.hyperparameters(graph.n())?;
    let verdict = exact_structure_posterior(&graph, &h, args.points)?;
    Ok(OracleReport {
        schema_version: SCHEMA_VERSION,
        input,
        hyperparameters: h,
        quadrature_points: args.points,
        verdict,
    })
}

fn cmd_oracle(args: &OracleArgs) -> Result<()> {
    let report = oracle(args)?;
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    write_output(args.out.as_deref(), &text)
}
