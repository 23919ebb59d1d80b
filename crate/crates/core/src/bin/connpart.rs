//! `connpart` command-line interface.
//!
//! Exit codes: 0 success, 2 usage, 3 parse, 4 precondition, 5 enumeration
//! budget exceeded, 6 statistical rejection.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Value};

use connpart::format::{
    decimal_string, graph_json, load_graph, multigraph_json, parse_partition, partition_json,
    rational_string, to_f64, GraphFormat, SCHEMA_VERSION,
};
use connpart::montecarlo::{compare, exact_law, run_trials};
use connpart::oracle::{enumerate_connected_partitions, enumerate_spanning_trees, exact_randmst_tree_distribution};
use connpart::prob::{check_block_count, probability_breakdown, validate_partition};
use connpart::{EnumerationBudget, Error, ErrorKind, Graph, Probability, RngState, TreeMode};

/// Set to a non-empty value other than `0` to require `--seed` on every
/// randomized subcommand.
const CI_ENV: &str = "CONNPART_CI";

const EXIT_USAGE: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_PRECONDITION: u8 = 4;
const EXIT_BUDGET: u8 = 5;
const EXIT_REJECTED: u8 = 6;

#[derive(Parser)]
#[command(name = "connpart", version, about = "Sample connected K-partitions and compute their exact probabilities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw connected k-partitions, one JSON object per line.
    Sample(SampleArgs),
    /// Exact probability of a partition, with every factor of the formula.
    Prob(ProbArgs),
    /// Every connected k-partition with its exact probability.
    Enumerate(EnumerateArgs),
    /// Monte Carlo check of sampled frequencies against the exact law.
    Verify(VerifyArgs),
    /// Exact spanning-tree count.
    Trees(TreesArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    EdgeList,
    AdjacencyMatrix,
}

impl From<FormatArg> for GraphFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::EdgeList => GraphFormat::EdgeList,
            FormatArg::AdjacencyMatrix => GraphFormat::AdjacencyMatrix,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    UniformTree,
    RandmstTree,
}

impl From<ModeArg> for TreeMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::UniformTree => TreeMode::UniformTree,
            ModeArg::RandmstTree => TreeMode::RandMstTree,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputArg {
    Json,
    Tsv,
    Human,
}

#[derive(Args)]
struct GraphArgs {
    /// Graph file.
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum, default_value = "edge-list")]
    format: FormatArg,
    #[arg(long, value_enum, default_value = "json")]
    output: OutputArg,
    /// Fractional digits for rendered decimals.
    #[arg(long, default_value_t = 4)]
    digits: usize,
}

#[derive(Args)]
struct BudgetArgs {
    #[arg(long)]
    max_nodes: Option<usize>,
    #[arg(long)]
    max_trees: Option<u64>,
    #[arg(long)]
    max_set_partitions: Option<u64>,
}

impl BudgetArgs {
    fn budget(&self) -> EnumerationBudget {
        let d = EnumerationBudget::default();
        EnumerationBudget {
            max_nodes: self.max_nodes.unwrap_or(d.max_nodes),
            max_trees: self.max_trees.unwrap_or(d.max_trees),
            max_set_partitions: self.max_set_partitions.unwrap_or(d.max_set_partitions),
        }
    }
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    k: usize,
    /// Number of partitions to draw.
    #[arg(long, default_value_t = 1)]
    count: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "uniform-tree")]
    mode: ModeArg,
}

#[derive(Args)]
struct ProbArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Partition file: one block per line.
    #[arg(long)]
    partition: PathBuf,
    /// Expected number of blocks; an error if the partition disagrees.
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args)]
struct EnumerateArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    k: usize,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "uniform-tree")]
    mode: ModeArg,
    /// Significance level of the chi-square test.
    #[arg(long, default_value_t = 0.001)]
    alpha: f64,
    /// Largest allowed |z| per partition; defaults to a Bonferroni bound at
    /// `alpha`.
    #[arg(long)]
    z_bound: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    min_samples: u64,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Args)]
struct TreesArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// List every spanning tree (within budget).
    #[arg(long)]
    enumerate: bool,
    /// Exact law of the random-weight MST over spanning trees.
    #[arg(long)]
    randmst_law: bool,
    #[command(flatten)]
    budget: BudgetArgs,
}

enum Failure {
    Usage(String),
    Lib(Error),
    Rejected(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CliResult = Result<String, Failure>;

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Parse {
        line: 0,
        msg: format!("{}: {e}", path.display()),
    })
}

fn load(args: &GraphArgs) -> Result<Graph, Error> {
    load_graph(&read(&args.graph)?, args.format.into())
}

fn require_connected(g: &Graph) -> Result<(), Error> {
    if g.is_connected() {
        Ok(())
    } else {
        Err(Error::Disconnected)
    }
}

fn check_k(g: &Graph, k: usize) -> Result<(), Error> {
    let n = g.node_count();
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    Ok(())
}

fn resolve_seed(seed: Option<u64>) -> Result<u64, Failure> {
    match seed {
        Some(s) => Ok(s),
        None if std::env::var(CI_ENV).is_ok_and(|v| !v.is_empty() && v != "0") => {
            Err(Failure::Usage(format!("--seed is required when {CI_ENV} is set")))
        }
        None => Ok(rand::random()),
    }
}

/// Integer as an exact JSON number.
fn big(n: &BigUint) -> Value {
    serde_json::from_str(&n.to_string()).expect("decimal digits are valid JSON")
}

/// Decimal rendering as a JSON number that keeps its trailing zeros.
fn decimal(p: &Probability, digits: usize) -> Value {
    serde_json::from_str(&decimal_string(p, digits)).expect("decimal is valid JSON")
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn cmd_sample(args: SampleArgs) -> CliResult {
    let g = load(&args.graph)?;
    require_connected(&g)?;
    check_k(&g, args.k)?;
    let seed = resolve_seed(args.seed)?;
    let mode: TreeMode = args.mode.into();
    let mut rng = RngState::new(seed);
    let mut out = String::new();
    for index in 0..args.count {
        let p = connpart::sample_connected_partition(&g, args.k, mode, &mut rng)?;
        let line = match args.graph.output {
            OutputArg::Json => serde_json::to_string(&json!({
                "schema_version": SCHEMA_VERSION,
                "index": index,
                "seed": seed,
                "k": args.k,
                "mode": mode.as_str(),
                "blocks": partition_json(&p),
            }))
            .expect("serializable"),
            _ => p.to_string(),
        };
        out.push_str(&line);
        out.push('\n');
    }
    Ok(out)
}

fn cmd_prob(args: ProbArgs) -> CliResult {
    let g = load(&args.graph)?;
    require_connected(&g)?;
    let c = parse_partition(&read(&args.partition)?, g.node_count())?;
    if let Some(k) = args.k {
        check_block_count(&c, k)?;
    }
    let b = probability_breakdown(&g, &c)?;
    let digits = args.graph.digits;
    let valid = validate_partition(&g, &c, c.block_count())?;
    Ok(match args.graph.output {
        OutputArg::Json => pretty(&json!({
            "schema_version": SCHEMA_VERSION,
            "partition": partition_json(&c),
            "k": c.block_count(),
            "connected_blocks": valid,
            "rational": rational_string(&b.probability),
            "float": decimal(&b.probability, digits),
            "t_G": big(&b.graph_trees),
            "t_blocks": b.block_trees.iter().map(big).collect::<Vec<_>>(),
            "t_M": big(&b.contracted_trees),
            "binom": big(&b.binomial),
            "compatible_trees": big(&b.compatible_trees),
            "contracted": multigraph_json(&g.contract(&c)?),
        })) + "\n",
        OutputArg::Tsv => format!(
            "partition\trational\tfloat\n{c}\t{}\t{}\n",
            rational_string(&b.probability),
            decimal_string(&b.probability, digits)
        ),
        OutputArg::Human => format!(
            "P({c}) = {} ~ {}\n  t(G) = {}, t(blocks) = [{}], t(M) = {}, binom = {}\n",
            rational_string(&b.probability),
            decimal_string(&b.probability, digits),
            b.graph_trees,
            b.block_trees.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "),
            b.contracted_trees,
            b.binomial
        ),
    })
}

fn cmd_enumerate(args: EnumerateArgs) -> CliResult {
    let g = load(&args.graph)?;
    require_connected(&g)?;
    check_k(&g, args.k)?;
    let budget = args.budget.budget();
    let digits = args.graph.digits;
    let law = exact_law(&g, args.k, TreeMode::UniformTree, &budget)?;
    // enumeration order, not map order
    let order = enumerate_connected_partitions(&g, args.k, &budget)?;
    let sum: Probability = law.values().cloned().sum();
    let one = Probability::from_integer(BigUint::from(1u32));
    Ok(match args.graph.output {
        OutputArg::Json => {
            let rows: Vec<Value> = order
                .iter()
                .map(|c| {
                    let p = &law[c];
                    json!({
                        "partition": partition_json(c),
                        "probability": rational_string(p),
                        "float": decimal(p, digits),
                    })
                })
                .collect();
            pretty(&json!({
                "schema_version": SCHEMA_VERSION,
                "graph": graph_json(&g),
                "k": args.k,
                "count": rows.len(),
                "rows": rows,
                "sum": rational_string(&sum),
                "sum_is_one": sum == one,
            })) + "\n"
        }
        OutputArg::Tsv | OutputArg::Human => {
            let mut out = String::from("partition\tprobability\tfloat\n");
            for c in &order {
                let p = &law[c];
                out.push_str(&format!("{c}\t{}\t{}\n", rational_string(p), decimal_string(p, digits)));
            }
            out.push_str(&format!(
                "# sum\t{}\t{}\n",
                rational_string(&sum),
                if sum == one { "exact" } else { "MISMATCH" }
            ));
            out
        }
    })
}

fn cmd_verify(args: VerifyArgs) -> CliResult {
    let g = load(&args.graph)?;
    require_connected(&g)?;
    check_k(&g, args.k)?;
    if args.samples < args.min_samples {
        return Err(Failure::Lib(Error::TooFewSamples {
            samples: args.samples,
            min: args.min_samples,
        }));
    }
    let seed = resolve_seed(args.seed)?;
    let mode: TreeMode = args.mode.into();
    let budget = args.budget.budget();
    let law = exact_law(&g, args.k, mode, &budget)?;
    let tally = run_trials(&g, args.k, args.samples, seed, mode)?;
    let mut report = compare(&tally, &law, args.samples)?;
    report.seed = Some(seed);
    report.mode = Some(mode);
    let mut doc = report.to_json(args.graph.digits, args.alpha, args.z_bound);
    doc["k"] = json!(args.k);
    doc["reference"] = json!(match mode {
        TreeMode::UniformTree => "closed-form",
        TreeMode::RandMstTree => "randmst-permutation-oracle",
    });
    let text = match args.graph.output {
        OutputArg::Json => pretty(&doc) + "\n",
        _ => {
            let mut out = format!(
                "samples {} seed {seed} mode {}\nchi-square {:.4} df {} p {:.4}  max|z| {:.3} (bound {:.3})\n",
                args.samples,
                mode.as_str(),
                report.chi_square,
                report.degrees_of_freedom,
                report.p_value,
                report.max_abs_z(),
                doc["z_bound"].as_f64().unwrap_or(f64::NAN),
            );
            for r in &report.rows {
                out.push_str(&format!(
                    "{}\t{}\t{}\t{:.6}\t{:+.2}\n",
                    r.partition,
                    rational_string(&r.expected),
                    r.observed,
                    r.frequency,
                    r.z
                ));
            }
            out
        }
    };
    if report.passes(args.alpha, args.z_bound) {
        Ok(text)
    } else {
        Err(Failure::Rejected(text))
    }
}

fn cmd_trees(args: TreesArgs) -> CliResult {
    let g = load(&args.graph)?;
    let t = g.tree_count();
    let budget = args.budget.budget();
    if args.graph.output != OutputArg::Json {
        let mut out = format!("{t}\n");
        if args.enumerate {
            for tree in enumerate_spanning_trees(&g, &budget)? {
                out.push_str(&format!("{tree}\n"));
            }
        }
        if args.randmst_law {
            for (tree, p) in exact_randmst_tree_distribution(&g, &budget)? {
                out.push_str(&format!("{tree}\t{}\n", rational_string(&p)));
            }
        }
        return Ok(out);
    }
    let mut doc = json!({ "schema_version": SCHEMA_VERSION, "t_G": big(t) });
    let edges = |tree: &connpart::SpanningTree| -> Vec<[usize; 2]> {
        tree.edges().iter().map(|&(u, v)| [u + 1, v + 1]).collect()
    };
    if args.enumerate {
        let trees: Vec<_> = enumerate_spanning_trees(&g, &budget)?.iter().map(edges).collect();
        doc["trees"] = json!(trees);
    }
    if args.randmst_law {
        let law = exact_randmst_tree_distribution(&g, &budget)?;
        let uniform = Probability::new(BigUint::from(1u32), t.clone());
        let is_uniform = law.len() as u64 == t.try_into().unwrap_or(u64::MAX) && law.values().all(|p| *p == uniform);
        let rows: Vec<Value> = law
            .iter()
            .map(|(tree, p)| {
                json!({
                    "tree": edges(tree),
                    "probability": rational_string(p),
                    "float": to_f64(p),
                    "uniform": rational_string(&uniform),
                })
            })
            .collect();
        doc["randmst_law"] = json!(rows);
        doc["randmst_law_is_uniform"] = json!(is_uniform);
    }
    Ok(pretty(&doc) + "\n")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sample(a) => cmd_sample(a),
        Command::Prob(a) => cmd_prob(a),
        Command::Enumerate(a) => cmd_enumerate(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Trees(a) => cmd_trees(a),
    };
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Rejected(out)) => {
            print!("{out}");
            eprintln!("error: statistical check rejected the sampler");
            ExitCode::from(EXIT_REJECTED)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.kind() {
                ErrorKind::Parse => EXIT_PARSE,
                ErrorKind::Precondition => EXIT_PRECONDITION,
                ErrorKind::Budget => EXIT_BUDGET,
            })
        }
    }
}
