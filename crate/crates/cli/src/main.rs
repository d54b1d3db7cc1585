//! `fiedler`: algebraic connectivity, Dirichlet eigenvalues and extremal
//! tree searches from the command line.
//!
//! Reports go to stdout (or `--out`) as JSON, the partition explorer as
//! CSV; diagnostics go to stderr.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use fiedler_core::nodal::{self, NodalError, DEFAULT_TAU_REL};
use fiedler_core::perturb::DEFAULT_STRICT_MARGIN;
use fiedler_core::search::{
    self, rounded_json, SearchError, SearchOptions, Suite, VerifyConfig, DEFAULT_CAP,
    DEFAULT_TIE_REL,
};
use fiedler_core::spectral::{self, SpectralError};
use fiedler_core::tree::io::{parse_edge_list, EdgeListError};
use fiedler_core::tree::{DegreeSequence, RootedBoundaryTree, Tree, TreeError, Vertex};

const EXIT_FAILURE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_NOT_A_TREE: u8 = 3;
const EXIT_BOUNDARY_WEIGHT: u8 = 4;
const EXIT_VERIFY_FAILED: u8 = 5;
const EXIT_CAP: u8 = 6;

#[derive(Parser, Debug)]
#[command(name = "fiedler", version, about = "Spectral extremal problems on trees")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Worker threads for exhaustive searches.
    #[arg(long, global = true, env = "FIEDLER_JOBS", value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Relative zero threshold for eigenvector entries.
    #[arg(long, global = true, default_value_t = DEFAULT_TAU_REL, value_parser = positive)]
    tau_zero: f64,
    /// Relative margin for strict decreases.
    #[arg(long, global = true, default_value_t = DEFAULT_STRICT_MARGIN, value_parser = positive)]
    strict_margin: f64,
    /// Maximum number of labeled trees decoded by a search.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    cap: u128,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    rng_seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Algebraic connectivity, Fiedler vector and characteristic set.
    Alpha { file: PathBuf },
    /// First Dirichlet eigenvalue with the given root as boundary.
    Nu {
        file: PathBuf,
        #[arg(long)]
        root: Vertex,
        /// Weight of the boundary edge.
        #[arg(long, default_value_t = 1.0)]
        w0: f64,
        /// Root neighbor whose edge carries `w0` (default: along a longest
        /// path from the root).
        #[arg(long)]
        boundary_neighbor: Option<Vertex>,
    },
    /// Split at the characteristic set into two rooted trees.
    Split { file: PathBuf },
    /// Exact α-minimizers over all trees with a degree sequence.
    MinTree(SeqArg),
    /// α-minimizers over caterpillars with a degree sequence.
    MinCat(SeqArg),
    /// ν-minimizers over rooted trees with a degree sequence.
    MinRooted {
        #[command(flatten)]
        seq: SeqArg,
        #[arg(long, default_value_t = 1.0)]
        w0: f64,
    },
    /// CSV of every spine arrangement with its side partition.
    Explore(SeqArg),
    /// Run property suites; exit 5 if any check fails.
    Verify {
        #[arg(long, default_value = "all", value_parser = |s: &str| s.parse::<Suite>())]
        suite: Suite,
        #[arg(long, default_value_t = 8)]
        nmax: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
}

#[derive(Args, Debug)]
struct SeqArg {
    /// Degree sequence, e.g. `3,2,2,2,1,1,1`.
    #[arg(long)]
    seq: String,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() && x > 0.0 => Ok(x),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<TreeError> for Failure {
    fn from(e: TreeError) -> Self {
        let code = match e {
            TreeError::InvalidSequence(_) | TreeError::SequenceParse(_) => EXIT_INPUT,
            TreeError::BoundaryWeight(_) => EXIT_BOUNDARY_WEIGHT,
            TreeError::VertexOutOfRange { .. } | TreeError::InvalidRooted(_) => EXIT_INPUT,
            TreeError::TooSmall(_)
            | TreeError::SelfLoop(..)
            | TreeError::ParallelEdge(..)
            | TreeError::EdgeCount { .. }
            | TreeError::Disconnected => EXIT_NOT_A_TREE,
            _ => EXIT_FAILURE,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<EdgeListError> for Failure {
    fn from(e: EdgeListError) -> Self {
        match e {
            EdgeListError::NotATree(t) => Failure::new(EXIT_NOT_A_TREE, format!("not a tree: {t}")),
            other => Failure::new(EXIT_INPUT, other.to_string()),
        }
    }
}

impl From<SpectralError> for Failure {
    fn from(e: SpectralError) -> Self {
        Failure::new(EXIT_FAILURE, e.to_string())
    }
}

impl From<NodalError> for Failure {
    fn from(e: NodalError) -> Self {
        match e {
            NodalError::Tree(t) => t.into(),
            other => Failure::new(EXIT_FAILURE, other.to_string()),
        }
    }
}

impl From<SearchError> for Failure {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::CapExceeded { .. } => Failure::new(EXIT_CAP, e.to_string()),
            SearchError::NoCaterpillar(_) => Failure::new(EXIT_INPUT, e.to_string()),
            SearchError::Tree(t) => t.into(),
            SearchError::Spectral(s) => s.into(),
            SearchError::Nodal(n) => n.into(),
        }
    }
}

fn read_tree(path: &Path) -> Result<Tree, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_INPUT, format!("{}: {e}", path.display())))?;
    Ok(parse_edge_list(&text)?)
}

fn read_seq(arg: &SeqArg) -> Result<DegreeSequence, Failure> {
    Ok(arg.seq.parse::<DegreeSequence>()?.validated()?)
}

fn check_w0(w0: f64) -> Result<(), Failure> {
    if w0.is_finite() && w0 >= 1.0 {
        Ok(())
    } else {
        Err(TreeError::BoundaryWeight(w0).into())
    }
}

fn edges_value(t: &Tree) -> Value {
    Value::Array(
        t.edges()
            .into_iter()
            .map(|(u, v, w)| if w == 1.0 { json!([u, v]) } else { json!([u, v, w]) })
            .collect(),
    )
}

enum Output {
    Json(Value),
    Csv(String),
}

struct Outcome {
    output: Output,
    code: u8,
}

impl From<Value> for Outcome {
    fn from(v: Value) -> Self {
        Outcome {
            output: Output::Json(v),
            code: 0,
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let g = &cli.global;
    let opts = SearchOptions {
        jobs: g.jobs.map_or_else(|| SearchOptions::default().jobs, |j| j as usize),
        cap: g.cap,
        tie_rel: DEFAULT_TIE_REL,
        tau_rel: g.tau_zero,
    };
    match &cli.command {
        Command::Alpha { file } => {
            let t = read_tree(file)?;
            let analysis = nodal::analyze(&t, g.tau_zero)?;
            let mut v = rounded_json(&analysis);
            v["n"] = json!(t.n());
            Ok(v.into())
        }
        Command::Nu {
            file,
            root,
            w0,
            boundary_neighbor,
        } => {
            check_w0(*w0)?;
            let t = read_tree(file)?;
            let rbt = match boundary_neighbor {
                Some(nbr) => RootedBoundaryTree::with_boundary_weight(t, *root, *nbr, *w0)?,
                None => RootedBoundaryTree::with_trunk_boundary(t, *root, *w0)?,
            };
            let pair = spectral::dirichlet_nu(&rbt)?;
            let monotone = nodal::check_monotone_paths(&rbt, &pair.vector, g.tau_zero);
            Ok(rounded_json(&json!({
                "nu": pair.value,
                "root": rbt.root(),
                "w0": rbt.boundary_weight(),
                "boundary_neighbor": rbt.boundary_edge(),
                "vector": spectral::with_root_zero(&rbt, &pair.vector),
                "residual": pair.residual,
                "monotone_paths": monotone,
            }))
            .into())
        }
        Command::Split { file } => {
            let t = read_tree(file)?;
            let analysis = nodal::analyze(&t, g.tau_zero)?;
            let split = nodal::geometric_split(&t, &analysis)?;
            let (r1, r2) = nodal::verify_split(&split, analysis.alpha)?;
            let side = |s: &nodal::SplitSide| -> Result<Value, Failure> {
                Ok(json!({
                    "nu": spectral::dirichlet_nu(&s.rooted)?.value,
                    "root": s.rooted.root(),
                    "edges": edges_value(s.rooted.tree()),
                    "origin": s.origin,
                }))
            };
            Ok(rounded_json(&json!({
                "alpha": analysis.alpha,
                "characteristic": analysis.charset,
                "t1": side(&split.t1)?,
                "t2": side(&split.t2)?,
                "w1": split.w1,
                "w2": split.w2,
                "residuals": [r1, r2],
            }))
            .into())
        }
        Command::MinTree(arg) => Ok(rounded_json(&search::min_alpha_tree(&read_seq(arg)?, &opts)?).into()),
        Command::MinCat(arg) => {
            Ok(rounded_json(&search::min_alpha_caterpillar(&read_seq(arg)?, &opts)?).into())
        }
        Command::MinRooted { seq, w0 } => {
            check_w0(*w0)?;
            Ok(rounded_json(&search::min_nu_rooted(&read_seq(seq)?, *w0, &opts)?).into())
        }
        Command::Explore(arg) => {
            let rows = search::explore_partitions(&read_seq(arg)?, &opts)?;
            Ok(Outcome {
                output: Output::Csv(search::partitions_csv(&rows)),
                code: 0,
            })
        }
        Command::Verify {
            suite,
            nmax,
            samples,
        } => {
            let cfg = VerifyConfig {
                nmax: *nmax,
                samples: *samples,
                rng_seed: g.rng_seed,
                strict_margin: g.strict_margin,
                opts,
            };
            let report = search::verify_suite(*suite, &cfg);
            for c in report.checks.iter().filter(|c| !c.passed) {
                eprintln!("check {} failed on {} of {} cases", c.name, c.failures, c.cases);
            }
            Ok(Outcome {
                code: if report.passed { 0 } else { EXIT_VERIFY_FAILED },
                output: Output::Json(rounded_json(&report)),
            })
        }
    }
}

fn emit(out: Option<&Path>, output: &Output) -> std::io::Result<()> {
    let text = match output {
        Output::Json(v) => {
            let mut s = serde_json::to_string_pretty(v).expect("JSON value");
            s.push('\n');
            s
        }
        Output::Csv(s) => s.clone(),
    };
    match out {
        Some(path) => fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            if let Err(e) = emit(cli.global.out.as_deref(), &outcome.output) {
                eprintln!("error: writing report: {e}");
                return ExitCode::from(EXIT_FAILURE);
            }
            ExitCode::from(outcome.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
