//! Command-line interface: argument parsing, the JSON configuration
//! document, the five commands, and their deterministic reports.
//!
//! Exit codes: 0 on success, 2 for configuration problems, 3 when a
//! reference value fails to reproduce (or an internal cross-check trips),
//! and 4 when a probabilistic rank stays inconclusive.

use std::collections::BTreeSet;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use num::{BigInt, BigRational};
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::critpoints::{
    cnn_exposedness_dimension, cnn_fiber_witness, cnn_singularity_classify, critical_witness,
    embedded_point, exposedness_dimension, family_weight_sample, gradient_of_loss,
    CnnFiberWitness, CnnSingularityReport, CriticalWitness, ExposednessReport,
    ExposednessVerdict, QuadricLoss,
};
use crate::error::NgError;
use crate::fibers::{
    degree_bound, fiber_scaling_count, scaling_rigidity_check, sparse_decomposition_check,
    RigidityReport, ScalingCountReport, ScalingFamily, SparseActivationSpec,
    SparseDecompositionReport,
};
use crate::fixtures;
use crate::geometry::{
    generic_rank, implicitize, implicitize_map, plane_curve_singular_points, symbolic_jacobian,
    tangent_excess_test, univar, JacobianOracle, RankOptions, RankReport, TangentReport,
};
use crate::netparam::{
    apply_subnetwork, embed, mlp_forward, sample_nonzero_ints, AmbientBasis, CnnSpec, MlpSpec,
    SubnetCnnSpec, SubnetMlpSpec, SubnetMode,
};
use crate::polyalg::{rational_from_str, rational_to_string, Activation, MultiPoly, PolyMap};
use crate::report::{emit, Report, ReportOptions};

/// Exact geometry of polynomial neural networks.
#[derive(Debug, Parser)]
#[command(name = "neurogeo", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Path to the JSON configuration document.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Seed driving every randomized step; reports embed it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Trials per probabilistic rank computation.
    #[arg(long, global = true)]
    pub trials: Option<usize>,

    /// Fixed first prime for modular rank probes (a second random prime is
    /// still drawn for confirmation).
    #[arg(long, global = true)]
    pub prime: Option<u64>,

    /// Highest degree tried during implicitization.
    #[arg(long, global = true)]
    pub degree_cap: Option<u32>,

    /// Write the report to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Indent the JSON output.
    #[arg(long, global = true)]
    pub pretty: bool,

    /// In-memory configuration text; takes precedence over `--config`.
    /// Not a command-line flag — embedders (the C bindings) fill it in.
    #[arg(skip)]
    pub config_inline: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generic rank of the parametrization Jacobian versus the parameter
    /// count.
    Dim,
    /// Singularity tests for a configured subnetwork family.
    Singular,
    /// Exposedness dimension count for a family, with a critical-target
    /// witness for MLPs.
    Exposed,
    /// Fiber structure: scaling counts, sparse-activation decomposition,
    /// and scaling rigidity.
    Fibers,
    /// Re-derives the stored reference values and diffs every item.
    Reproduce {
        /// One of D1, D2, or cubics.
        target: String,
    },
}

/// Rendered report text plus the process exit code.
#[derive(Debug)]
pub struct Outcome {
    pub text: String,
    pub code: i32,
}

/// Maps an error to the documented exit code.
pub fn exit_code(err: &NgError) -> i32 {
    match err {
        NgError::Config(_)
        | NgError::Shape(_)
        | NgError::BadPrime(_)
        | NgError::Budget { .. }
        | NgError::Io(_)
        | NgError::Json(_) => 2,
        NgError::TheoremMismatch(_) | NgError::Internal(_) => 3,
        NgError::Inconclusive(_) => 4,
    }
}

/// Runs one command and returns its rendered report.
pub fn run(cli: &Cli) -> Result<Outcome, NgError> {
    match &cli.command {
        Command::Dim => cmd_dim(cli),
        Command::Singular => cmd_singular(cli),
        Command::Exposed => cmd_exposed(cli),
        Command::Fibers => cmd_fibers(cli),
        Command::Reproduce { target } => cmd_reproduce(cli, target),
    }
}

/// Runs one command, emits its report, and returns the exit code; errors
/// go to stderr.
pub fn execute(cli: &Cli) -> i32 {
    match run(cli) {
        Ok(outcome) => match emit(&outcome.text, cli.out.as_deref()) {
            Ok(()) => outcome.code,
            Err(err) => {
                eprintln!("error: {err}");
                exit_code(&err)
            }
        },
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

// ---------------------------------------------------------------------------
// Configuration document
// ---------------------------------------------------------------------------

/// A rational config value: a JSON integer or a `num/den` string.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RatSpec {
    Int(i64),
    Text(String),
}

impl RatSpec {
    fn to_rational(&self) -> Result<BigRational, NgError> {
        match self {
            RatSpec::Int(v) => Ok(BigRational::from_integer(BigInt::from(*v))),
            RatSpec::Text(s) => rational_from_str(s),
        }
    }
}

fn rationals(specs: &[RatSpec]) -> Result<Vec<BigRational>, NgError> {
    specs.iter().map(RatSpec::to_rational).collect()
}

/// Architecture section; activation coefficients are listed from the
/// constant term upward.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "camelCase")]
enum ArchConfig {
    Mlp { widths: Vec<usize>, activation: Vec<RatSpec> },
    Cnn { filters: Vec<usize>, strides: Vec<usize>, dims: Vec<usize>, activation: Vec<RatSpec> },
}

enum Arch {
    Mlp(MlpSpec),
    Cnn(CnnSpec),
}

impl ArchConfig {
    /// Rebuilds the architecture through the validating constructors, so a
    /// config that deserializes but violates a shape invariant still fails.
    fn build(&self) -> Result<Arch, NgError> {
        match self {
            ArchConfig::Mlp { widths, activation } => {
                let act = Activation::new(rationals(activation)?)?;
                Ok(Arch::Mlp(MlpSpec::new(widths.clone(), act)?))
            }
            ArchConfig::Cnn { filters, strides, dims, activation } => {
                let act = Activation::new(rationals(activation)?)?;
                Ok(Arch::Cnn(CnnSpec::new(
                    filters.clone(),
                    strides.clone(),
                    dims.clone(),
                    act,
                )?))
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct SparseSection {
    widths: Vec<usize>,
    exponents: Vec<u32>,
    #[serde(default)]
    budget: Option<u128>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct RigiditySection {
    factors: Vec<RatSpec>,
}

/// The whole configuration document; every section is optional and each
/// command checks for the ones it needs.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
struct FileConfig {
    arch: Option<ArchConfig>,
    subnet: Option<serde_json::Value>,
    columns: Option<Vec<usize>>,
    weights: Option<Vec<RatSpec>>,
    fiber_samples: Option<usize>,
    exponents: Option<Vec<u32>>,
    sparse: Option<SparseSection>,
    rigidity: Option<RigiditySection>,
}

struct LoadedConfig {
    /// Raw document echoed into the report.
    raw: serde_json::Value,
    file: FileConfig,
}

fn load_config(cli: &Cli) -> Result<LoadedConfig, NgError> {
    let text = match (&cli.config_inline, &cli.config) {
        (Some(inline), _) => Some(inline.clone()),
        (None, Some(path)) => Some(std::fs::read_to_string(path)?),
        (None, None) => None,
    };
    match text {
        None => Ok(LoadedConfig { raw: serde_json::Value::Null, file: FileConfig::default() }),
        Some(text) => {
            let raw: serde_json::Value = serde_json::from_str(&text)?;
            let file: FileConfig = serde_json::from_value(raw.clone())?;
            Ok(LoadedConfig { raw, file })
        }
    }
}

fn require_arch(loaded: &LoadedConfig) -> Result<Arch, NgError> {
    loaded
        .file
        .arch
        .as_ref()
        .ok_or_else(|| {
            NgError::Config("this command needs an \"arch\" section; pass --config".into())
        })?
        .build()
}

fn mlp_subnet(loaded: &LoadedConfig, spec: &MlpSpec) -> Result<SubnetMlpSpec, NgError> {
    let value = loaded
        .file
        .subnet
        .clone()
        .ok_or_else(|| NgError::Config("this command needs a \"subnet\" section".into()))?;
    let subnet: SubnetMlpSpec = serde_json::from_value(value)?;
    subnet.validate(spec)?;
    Ok(subnet)
}

fn cnn_subnet(loaded: &LoadedConfig, spec: &CnnSpec) -> Result<SubnetCnnSpec, NgError> {
    let value = loaded
        .file
        .subnet
        .clone()
        .ok_or_else(|| NgError::Config("this command needs a \"subnet\" section".into()))?;
    let subnet: SubnetCnnSpec = serde_json::from_value(value)?;
    subnet.validate(spec)?;
    Ok(subnet)
}

fn rank_options(cli: &Cli) -> Result<RankOptions, NgError> {
    let mut opts = RankOptions::new(cli.seed);
    if let Some(trials) = cli.trials {
        if trials == 0 {
            return Err(NgError::Config("--trials must be at least 1".into()));
        }
        opts.trials = trials;
    }
    opts.prime = cli.prime;
    Ok(opts)
}

fn finish<T: Serialize>(
    cli: &Cli,
    command: &str,
    config: serde_json::Value,
    opts: &RankOptions,
    result: T,
    code: i32,
) -> Result<Outcome, NgError> {
    let options =
        ReportOptions { trials: opts.trials, prime: cli.prime, degree_cap: cli.degree_cap };
    let report = Report::new(command, cli.seed, options, config, result);
    Ok(Outcome { text: report.render(cli.pretty)?, code })
}

// ---------------------------------------------------------------------------
// dim
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct DimResult {
    architecture: &'static str,
    ambient_dim: usize,
    param_count: usize,
    rank: RankReport,
    rank_equals_params: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    degree_bound: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bound_met: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    notes: Vec<String>,
}

fn cmd_dim(cli: &Cli) -> Result<Outcome, NgError> {
    let loaded = load_config(cli)?;
    let arch = require_arch(&loaded)?;
    let opts = rank_options(cli)?;
    let result = match &arch {
        Arch::Mlp(spec) => {
            let oracle = JacobianOracle::for_mlp(spec)?;
            let rank = generic_rank(&oracle, &opts)?;
            let params = spec.num_weights();
            let bound = degree_bound(&spec.widths)?;
            let bound_met = BigInt::from(spec.activation.degree()) > bound;
            let mut notes = Vec::new();
            if spec.activation.support().len() == 1 {
                notes.push(
                    "monomial activation: diagonal rescalings of consecutive layers preserve \
                     the function, so the rank can fall below the parameter count"
                        .to_string(),
                );
            }
            if !bound_met {
                notes.push(format!(
                    "activation degree {} does not exceed the generic-position bound {}; the \
                     rank still certifies the dimension at this activation",
                    spec.activation.degree(),
                    bound
                ));
            }
            DimResult {
                architecture: "mlp",
                ambient_dim: oracle.rows(),
                param_count: params,
                rank_equals_params: rank.rank == params,
                rank,
                degree_bound: Some(bound.to_string()),
                bound_met: Some(bound_met),
                notes,
            }
        }
        Arch::Cnn(spec) => {
            let oracle = JacobianOracle::for_cnn(spec)?;
            let rank = generic_rank(&oracle, &opts)?;
            let params = spec.num_weights();
            DimResult {
                architecture: "cnn",
                ambient_dim: oracle.rows(),
                param_count: params,
                rank_equals_params: rank.rank == params,
                rank,
                degree_bound: None,
                bound_met: None,
                notes: Vec::new(),
            }
        }
    };
    let code = if result.rank.conclusive { 0 } else { 4 };
    finish(cli, "dim", loaded.raw, &opts, result, code)
}

// ---------------------------------------------------------------------------
// singular
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct MlpSingularResult {
    architecture: &'static str,
    tangent: TangentReport,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct CnnSingularResult {
    architecture: &'static str,
    classification: CnnSingularityReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<CnnFiberWitness>,
}

fn cmd_singular(cli: &Cli) -> Result<Outcome, NgError> {
    let loaded = load_config(cli)?;
    let arch = require_arch(&loaded)?;
    let opts = rank_options(cli)?;
    match &arch {
        Arch::Mlp(spec) => {
            let subnet = mlp_subnet(&loaded, spec)?;
            if loaded.file.fiber_samples == Some(0) {
                return Err(NgError::Config("\"fiberSamples\" must be at least 1".into()));
            }
            let tangent =
                tangent_excess_test(spec, &subnet, loaded.file.fiber_samples, &opts)?;
            let result = MlpSingularResult { architecture: "mlp", tangent };
            finish(cli, "singular", loaded.raw, &opts, result, 0)
        }
        Arch::Cnn(spec) => {
            let subnet = cnn_subnet(&loaded, spec)?;
            let classification = cnn_singularity_classify(spec, &subnet)?;
            let witness = if classification.singular || !subnet.is_proper() {
                let weights = match &loaded.file.weights {
                    Some(w) => spec.constant_weights(&rationals(w)?)?,
                    None => spec.symbolic_weights(),
                };
                Some(cnn_fiber_witness(spec, &weights, &subnet)?)
            } else {
                None
            };
            let result = CnnSingularResult { architecture: "cnn", classification, witness };
            finish(cli, "singular", loaded.raw, &opts, result, 0)
        }
    }
}

// ---------------------------------------------------------------------------
// exposed
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct MlpExposedResult {
    architecture: &'static str,
    exposedness: ExposednessReport,
    /// The family point the witness was built at.
    #[serde(with = "crate::polyalg::ratio_serde::vec")]
    witness_weights: Vec<BigRational>,
    witness: CriticalWitness,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct CnnExposedResult {
    architecture: &'static str,
    exposedness: ExposednessReport,
}

fn verdict_code(verdict: ExposednessVerdict) -> i32 {
    if verdict == ExposednessVerdict::Inconclusive {
        4
    } else {
        0
    }
}

fn cmd_exposed(cli: &Cli) -> Result<Outcome, NgError> {
    let loaded = load_config(cli)?;
    let arch = require_arch(&loaded)?;
    let opts = rank_options(cli)?;
    match &arch {
        Arch::Mlp(spec) => {
            let subnet = mlp_subnet(&loaded, spec)?;
            let exposedness =
                exposedness_dimension(spec, &subnet, loaded.file.columns.as_deref(), &opts)?;
            let weights = match &loaded.file.weights {
                Some(w) => {
                    let w = rationals(w)?;
                    if w.len() != spec.num_weights() {
                        return Err(NgError::Config(format!(
                            "{} weights supplied for {} parameters",
                            w.len(),
                            spec.num_weights()
                        )));
                    }
                    w
                }
                None => family_weight_sample(spec, &subnet, cli.seed, opts.bound)?,
            };
            let witness = critical_witness(spec, &weights, cli.seed)?;
            let code = verdict_code(exposedness.verdict);
            let result = MlpExposedResult {
                architecture: "mlp",
                exposedness,
                witness_weights: weights,
                witness,
            };
            finish(cli, "exposed", loaded.raw, &opts, result, code)
        }
        Arch::Cnn(spec) => {
            let subnet = cnn_subnet(&loaded, spec)?;
            let exposedness = cnn_exposedness_dimension(spec, &subnet, &opts)?;
            let code = verdict_code(exposedness.verdict);
            let result = CnnExposedResult { architecture: "cnn", exposedness };
            finish(cli, "exposed", loaded.raw, &opts, result, code)
        }
    }
}

// ---------------------------------------------------------------------------
// fibers
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct FibersResult {
    #[serde(skip_serializing_if = "Option::is_none")]
    scaling: Option<ScalingCountReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sparse: Option<SparseDecompositionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rigidity: Option<RigidityReport>,
}

fn cmd_fibers(cli: &Cli) -> Result<Outcome, NgError> {
    let loaded = load_config(cli)?;
    let opts = rank_options(cli)?;

    let scaling = match &loaded.file.exponents {
        Some(exponents) => Some(fiber_scaling_count(exponents)?),
        None => None,
    };
    let sparse = match &loaded.file.sparse {
        Some(section) => {
            let spec = SparseActivationSpec::new(section.exponents.clone())?;
            Some(sparse_decomposition_check(&section.widths, &spec, cli.seed, section.budget)?)
        }
        None => None,
    };
    let rigidity = match &loaded.file.rigidity {
        Some(section) => {
            let Arch::Cnn(spec) = require_arch(&loaded)? else {
                return Err(NgError::Config(
                    "the \"rigidity\" section needs a cnn architecture".into(),
                ));
            };
            let family = ScalingFamily::new(rationals(&section.factors)?)?;
            let flat = match &loaded.file.weights {
                Some(w) => rationals(w)?,
                None => {
                    let mut rng = ChaCha20Rng::seed_from_u64(cli.seed);
                    spec.sample_weights(&mut rng, 9)
                }
            };
            let weights = spec.constant_weights(&flat)?;
            Some(scaling_rigidity_check(&spec, &weights, &family)?)
        }
        None => None,
    };

    if scaling.is_none() && sparse.is_none() && rigidity.is_none() {
        return Err(NgError::Config(
            "the fibers command needs at least one of \"exponents\", \"sparse\", or \
             \"rigidity\" in the configuration"
                .into(),
        ));
    }
    let result = FibersResult { scaling, sparse, rigidity };
    finish(cli, "fibers", loaded.raw, &opts, result, 0)
}

// ---------------------------------------------------------------------------
// reproduce
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct CheckItem {
    name: String,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    expected: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    got: Option<String>,
}

impl CheckItem {
    fn compare(name: impl Into<String>, expected: impl Into<String>, got: impl Into<String>) -> Self {
        let (expected, got) = (expected.into(), got.into());
        CheckItem { name: name.into(), pass: expected == got, expected: Some(expected), got: Some(got) }
    }

    fn of(
        name: impl Into<String>,
        expected: impl Into<String>,
        got: impl Into<String>,
        pass: bool,
    ) -> Self {
        CheckItem { name: name.into(), pass, expected: Some(expected.into()), got: Some(got.into()) }
    }
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct ReproduceResult {
    target: String,
    all_pass: bool,
    items: Vec<CheckItem>,
}

fn cmd_reproduce(cli: &Cli, target: &str) -> Result<Outcome, NgError> {
    let loaded = load_config(cli)?;
    let opts = rank_options(cli)?;
    let (label, items) = match fixtures::reproduce_target(target)? {
        fixtures::ReproduceTarget::D1 => ("D1", reproduce_d1(cli, &opts)?),
        fixtures::ReproduceTarget::D2 => ("D2", reproduce_d2(&opts)?),
        fixtures::ReproduceTarget::Cubics => ("cubics", reproduce_cubics(cli)?),
    };
    let all_pass = items.iter().all(|item| item.pass);
    let result = ReproduceResult { target: label.to_string(), all_pass, items };
    let code = if all_pass { 0 } else { 3 };
    finish(cli, "reproduce", loaded.raw, &opts, result, code)
}

/// `Some(lambda)` when `a == lambda * b` for a nonzero rational `lambda`.
fn scalar_multiple(a: &MultiPoly, b: &MultiPoly) -> Option<BigRational> {
    match (a.leading_term(), b.leading_term()) {
        (None, None) => Some(BigRational::one()),
        (Some((ma, ca)), Some((mb, cb))) => {
            if ma != mb {
                return None;
            }
            let lambda = ca / cb;
            if b.scale(&lambda) == *a {
                Some(lambda)
            } else {
                None
            }
        }
        _ => None,
    }
}

fn verdict_label(verdict: ExposednessVerdict) -> &'static str {
    match verdict {
        ExposednessVerdict::Exposed => "exposed",
        ExposednessVerdict::NotExposed => "notExposed",
        ExposednessVerdict::Inconclusive => "inconclusive",
    }
}

fn dim_count(report: &ExposednessReport) -> String {
    format!(
        "{} + {} = {} ({})",
        report.family_dim,
        report.normal_dim,
        report.total_dim,
        verdict_label(report.verdict)
    )
}

fn reproduce_d1(cli: &Cli, opts: &RankOptions) -> Result<Vec<CheckItem>, NgError> {
    let spec = fixtures::mlp_d1();
    let basis = AmbientBasis::for_mlp(&spec);
    let mut items = Vec::new();

    // Expansion of the network function in the ambient basis.
    let family = mlp_forward(&spec, &spec.symbolic_weights())?;
    let coords = embed(&family, &basis)?.coords;
    let canon = |polys: &[MultiPoly]| {
        polys.iter().map(MultiPoly::canonical_string).collect::<Vec<_>>().join("; ")
    };
    items.push(CheckItem::compare(
        "expansion-coefficients",
        canon(&fixtures::d1_coefficients()),
        canon(&coords),
    ));

    // Implicit cubic, up to a nonzero rational scale.
    let cubic = fixtures::d1_implicit_cubic();
    let surface = implicitize(&spec, cli.degree_cap.unwrap_or(3), None, cli.seed)?;
    items.push(match scalar_multiple(&surface.polynomial, &cubic) {
        Some(lambda) => CheckItem::of(
            "implicit-cubic",
            "reference cubic up to a nonzero rational scale",
            format!("matched with scale {}", rational_to_string(&lambda)),
            true,
        ),
        None => CheckItem::of(
            "implicit-cubic",
            cubic.canonical_string(),
            surface.polynomial.canonical_string(),
            false,
        ),
    });

    // The reference cubic annihilates the parametrized family identically.
    let composed = cubic.substitute(&coords)?;
    items.push(CheckItem::compare("cubic-annihilates-family", "0/1", composed.canonical_string()));

    // The nine generators vanish along each constrained weight family.
    let generators = fixtures::d1_singular_generators();
    let mut rng = ChaCha20Rng::seed_from_u64(cli.seed);
    type Constrain = fn(&mut Vec<BigRational>);
    let families: [(&str, Constrain); 3] = [
        ("generators-e-zero", |w| w[4] = BigRational::zero()),
        ("generators-f-zero", |w| w[5] = BigRational::zero()),
        ("generators-equal-rows", |w| {
            w[2] = w[0].clone();
            w[3] = w[1].clone();
        }),
    ];
    for (name, constrain) in families {
        let mut failures = Vec::new();
        for s in 0..10 {
            let mut w = sample_nonzero_ints(&mut rng, spec.num_weights(), 9);
            constrain(&mut w);
            let point = embedded_point(&spec, &w)?;
            for (gi, g) in generators.iter().enumerate() {
                let value = g.eval_rational(&point)?;
                if !value.is_zero() {
                    failures.push(format!(
                        "generator {} at sample {}: {}",
                        gi + 1,
                        s + 1,
                        rational_to_string(&value)
                    ));
                }
            }
        }
        let summary = "all 9 generators vanish at 10 samples".to_string();
        let got = if failures.is_empty() { summary.clone() } else { failures.join("; ") };
        let pass = failures.is_empty();
        items.push(CheckItem::of(name, summary, got, pass));
    }

    // Exposedness of the strict family removing hidden neuron 2.
    let strict =
        SubnetMlpSpec { index_sets: vec![vec![2]], mode: SubnetMode::Strict, sources: Vec::new() };
    let strict_report = exposedness_dimension(&spec, &strict, None, opts)?;
    items.push(CheckItem::compare(
        "exposedness-strict",
        "3 + 4 = 7 (exposed)",
        dim_count(&strict_report),
    ));

    // The displayed variant: outgoing weight zeroed, ranks restricted to
    // the (a, b, e) columns; the full-Jacobian count is reported alongside.
    let plain =
        SubnetMlpSpec { index_sets: vec![vec![2]], mode: SubnetMode::Plain, sources: Vec::new() };
    let displayed = exposedness_dimension(&spec, &plain, Some(&[0, 1, 4]), opts)?;
    let displayed_normal = displayed.ambient_dim - displayed.family_dim;
    items.push(CheckItem::of(
        "exposedness-displayed",
        "3 + 4 = 7 restricted to the (a, b, e) columns",
        format!(
            "{} + {} = {} restricted to the (a, b, e) columns; full-Jacobian count {}",
            displayed.family_dim,
            displayed_normal,
            displayed.family_dim + displayed_normal,
            dim_count(&displayed),
        ),
        displayed.family_dim == 3 && displayed.family_dim + displayed_normal == 7,
    ));

    // The certifying 3x3 minor of the restricted Jacobian.
    let constrained = apply_subnetwork(&spec, &spec.symbolic_weights(), &strict)?;
    let strict_coords = embed(&mlp_forward(&spec, &constrained)?, &basis)?;
    let jacobian = symbolic_jacobian(&strict_coords);
    let minor = jacobian.submatrix(&[0, 1, 2], &[0, 1, 4]).det()?;
    items.push(CheckItem::compare(
        "exposedness-minor",
        fixtures::d1_exposedness_minor().canonical_string(),
        minor.canonical_string(),
    ));

    // A moved critical target at a strict family point.
    let weights: Vec<BigRational> =
        [1, 2, 0, 0, 1, 0].iter().map(|&v| BigRational::from_integer(v.into())).collect();
    let witness = critical_witness(&spec, &weights, cli.seed)?;
    let phi = embedded_point(&spec, &weights)?;
    let loss = QuadricLoss::identity_centered(witness.target.clone());
    let gradient = gradient_of_loss(&spec, &weights, &loss)?;
    let gradient_zero = gradient.iter().all(Zero::is_zero);
    items.push(CheckItem::of(
        "critical-witness",
        "target distinct from the image with an exactly zero gradient",
        format!(
            "kernel dimension {}, moved {}, gradient zero {}",
            witness.kernel_dim,
            witness.moved && witness.target != phi,
            gradient_zero
        ),
        witness.moved && witness.target != phi && gradient_zero,
    ));

    Ok(items)
}

fn reproduce_d2(opts: &RankOptions) -> Result<Vec<CheckItem>, NgError> {
    let spec = fixtures::cnn_d2();
    let mut items = Vec::new();

    // Generic rank over at least two distinct primes.
    let oracle = JacobianOracle::for_cnn(&spec)?;
    let rank = generic_rank(&oracle, opts)?;
    let distinct: BTreeSet<u64> = rank.primes.iter().copied().collect();
    items.push(CheckItem::of(
        "generic-rank",
        "rank 5, conclusive, over at least two distinct primes",
        format!(
            "rank {}, conclusive {}, over {} distinct primes",
            rank.rank,
            rank.conclusive,
            distinct.len()
        ),
        rank.rank == 5 && rank.conclusive && distinct.len() >= 2,
    ));

    // The accumulated padding profiles and their classifications.
    let fmt_row = |paddings: &[i64], profile: &[String], singular: bool| {
        format!(
            "t = ({}): profile ({}), singular {}",
            paddings.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "),
            profile.join(", "),
            singular
        )
    };
    let mut expected_rows = Vec::new();
    let mut got_rows = Vec::new();
    for (paddings, profile, singular) in fixtures::d2_padding_table() {
        let subnet = SubnetCnnSpec { signed_paddings: paddings.clone() };
        let class = cnn_singularity_classify(&spec, &subnet)?;
        let want: Vec<String> = profile.iter().map(ToString::to_string).collect();
        let got: Vec<String> = class.profile.tail().iter().map(ToString::to_string).collect();
        expected_rows.push(fmt_row(&paddings, &want, singular));
        got_rows.push(fmt_row(&paddings, &got, class.singular));
    }
    items.push(CheckItem::compare(
        "padding-table",
        expected_rows.join("; "),
        got_rows.join("; "),
    ));

    // The shifted filters compute the identical function, symbolically.
    let subnet = SubnetCnnSpec { signed_paddings: vec![2, -1] };
    let witness = cnn_fiber_witness(&spec, &spec.symbolic_weights(), &subnet)?;
    items.push(CheckItem::of(
        "shift-equality",
        "shifted filters embed to the same point",
        format!("equal {}", witness.equal),
        witness.equal,
    ));

    Ok(items)
}

fn reproduce_cubics(cli: &Cli) -> Result<Vec<CheckItem>, NgError> {
    let mut items = Vec::new();
    let cap = cli.degree_cap.unwrap_or(3);
    let curves = [
        ("node", fixtures::node_curve(), fixtures::node_implicit()),
        ("cusp", fixtures::cusp_curve(), fixtures::cusp_implicit()),
    ];
    for (name, curve, reference) in &curves {
        let surface = implicitize_map(curve, cap, None, cli.seed)?;
        let multiple = scalar_multiple(&surface.polynomial, reference);
        let sign_match = matches!(&multiple, Some(lambda) if lambda.abs().is_one());
        items.push(match (&multiple, sign_match) {
            (Some(lambda), true) => CheckItem::of(
                format!("{name}-implicit"),
                "reference equation up to sign",
                format!("matched with scale {}", rational_to_string(lambda)),
                true,
            ),
            _ => CheckItem::of(
                format!("{name}-implicit"),
                reference.canonical_string(),
                surface.polynomial.canonical_string(),
                false,
            ),
        });

        let locus = plane_curve_singular_points(&surface.polynomial)?;
        let origin = [String::from("0"), String::from("0")];
        let origin_only = locus.points == vec![origin] && locus.exhaustive;
        items.push(CheckItem::of(
            format!("{name}-singular-locus"),
            "exactly the origin, exhaustively over the complex numbers",
            format!(
                "points [{}], exhaustive {}",
                locus
                    .points
                    .iter()
                    .map(|[x, y]| format!("({x}, {y})"))
                    .collect::<Vec<_>>()
                    .join(", "),
                locus.exhaustive
            ),
            origin_only,
        ));
    }

    // Common roots of the component derivatives of each parametrization:
    // the gcd pins them down exactly, over the complex numbers.
    let derivative_gcd = |curve: &PolyMap| -> Result<Vec<BigRational>, NgError> {
        let parts: Vec<univar::Univar> = curve
            .components
            .iter()
            .map(|c| univar::univar_in(&c.partial(0), 0))
            .collect::<Result<_, _>>()?;
        let gcd = parts.iter().skip(1).fold(parts[0].clone(), |acc, p| univar::gcd(&acc, p));
        if gcd.is_empty() {
            return Err(NgError::Internal("derivative gcd vanished identically".into()));
        }
        Ok(gcd)
    };
    let cusp_gcd = derivative_gcd(&curves[1].1)?;
    let cusp_roots = univar::rational_roots(&cusp_gcd)?.0;
    let cusp_ok = cusp_gcd.len() == 2 && cusp_roots == vec![BigRational::zero()];
    items.push(CheckItem::of(
        "cusp-derivative-vanishes-at-zero",
        "single common derivative root at t = 0",
        format!(
            "gcd degree {}, rational roots [{}]",
            cusp_gcd.len().saturating_sub(1),
            cusp_roots.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
        ),
        cusp_ok,
    ));
    let node_gcd = derivative_gcd(&curves[0].1)?;
    items.push(CheckItem::of(
        "node-derivative-never-vanishes",
        "no common derivative root over the complex numbers",
        format!("gcd degree {}", node_gcd.len().saturating_sub(1)),
        node_gcd.len() == 1,
    ));

    Ok(items)
}
