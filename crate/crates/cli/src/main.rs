use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use roadnet::graph::ComponentNotion;
use roadnet::spatial::FunctionKind;
use roadnet::IndexKind;
use roadnet_cli::config::{InputConfig, StrategyName};
use roadnet_cli::{ingest_check, replay, run, Failure, RunConfig, Stage};

#[derive(Parser, Debug)]
#[command(name = "roadnet", version, about = "Road network centrality, spatial statistics and robustness")]
struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Root seed for every stochastic stage.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker thread cap.
    #[arg(long, global = true, env = "ROADNET_THREADS")]
    threads: Option<usize>,
    #[arg(long, global = true)]
    bandwidth_m: Option<f64>,
    #[arg(long, global = true)]
    cell_m: Option<f64>,
    #[arg(long, global = true)]
    n_sims: Option<usize>,
    #[arg(long, global = true)]
    replicates: Option<usize>,
    #[arg(long, global = true)]
    grid_step: Option<f64>,
    /// Component notion for attacks: weak or strong.
    #[arg(long, global = true)]
    component: Option<ComponentNotion>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct InputArgs {
    /// Nodes CSV (`id,x,y`).
    #[arg(long)]
    nodes: Option<PathBuf>,
    /// Edges CSV (`source,target,length[,edge_id]`).
    #[arg(long)]
    edges: Option<PathBuf>,
    /// Bus routes CSV (`route_id,seq,node_id`).
    #[arg(long)]
    routes: Option<PathBuf>,
    /// Zone polygons, `.json` or plain text.
    #[arg(long)]
    zones: Option<PathBuf>,
    /// Treat edges as two-way streets.
    #[arg(long)]
    undirected: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate input tables and print network summaries.
    IngestCheck(InputArgs),
    /// Write the per-node centrality tables.
    Centrality(InputArgs),
    /// Kernel density rasters weighted by centrality indices.
    Kde {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long = "index")]
        indices: Vec<IndexKind>,
    },
    /// Complete spatial randomness envelope tests on node locations.
    Csr {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long = "kind")]
        kinds: Vec<FunctionKind>,
    },
    /// Node removal attacks.
    Attack {
        #[command(flatten)]
        input: InputArgs,
        /// Index name, `random` or `list:<name>`; repeatable.
        #[arg(long = "strategy")]
        strategies: Vec<StrategyName>,
        /// Named removal order, `NAME=PATH`; repeatable.
        #[arg(long = "node-list", value_parser = parse_node_list)]
        node_lists: Vec<(String, PathBuf)>,
    },
    /// Summary table, Kendall tau matrices and zone comparisons.
    Stats {
        #[command(flatten)]
        input: InputArgs,
        /// Two zone names to compare; repeatable.
        #[arg(long, num_args = 2, value_names = ["ZONE_A", "ZONE_B"], action = clap::ArgAction::Append)]
        compare: Vec<String>,
    },
    /// Every stage requested by the config.
    Run(InputArgs),
    /// Full pipeline on a synthetic elongated network.
    Demo {
        #[arg(long)]
        cols: Option<usize>,
        #[arg(long)]
        rows: Option<usize>,
        #[arg(long)]
        corridors: Option<usize>,
    },
    /// Re-run a manifest and check every output is byte-identical.
    Replay {
        #[arg(long)]
        manifest: PathBuf,
    },
}

fn parse_node_list(s: &str) -> Result<(String, PathBuf), String> {
    let (name, path) = s.split_once('=').ok_or_else(|| format!("expected NAME=PATH, got '{s}'"))?;
    Ok((name.to_string(), PathBuf::from(path)))
}

fn cwd() -> PathBuf {
    std::env::current_dir().unwrap_or_else(|_| PathBuf::from("."))
}

fn absolute(p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        cwd().join(p)
    }
}

fn apply_input(input: &mut InputConfig, args: &InputArgs) {
    let set = |slot: &mut Option<PathBuf>, v: &Option<PathBuf>| {
        if let Some(v) = v {
            *slot = Some(absolute(v));
        }
    };
    set(&mut input.nodes, &args.nodes);
    set(&mut input.edges, &args.edges);
    set(&mut input.routes, &args.routes);
    set(&mut input.zones, &args.zones);
    input.undirected |= args.undirected;
}

fn build_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => {
            let mut c = RunConfig::default();
            c.resolve_paths(&cwd());
            c
        }
    };
    if let Some(v) = &cli.output {
        cfg.output_dir = absolute(v);
    }
    if let Some(v) = cli.seed {
        cfg.seed = v;
    }
    if let Some(v) = cli.bandwidth_m {
        cfg.kde.bandwidth_m = v;
    }
    if let Some(v) = cli.cell_m {
        cfg.kde.cell_m = v;
    }
    if let Some(v) = cli.n_sims {
        cfg.csr.n_sims = v;
    }
    if let Some(v) = cli.replicates {
        cfg.attack.replicates = v;
    }
    if let Some(v) = cli.grid_step {
        cfg.attack.grid_step = v;
    }
    if let Some(v) = cli.component {
        cfg.attack.component = v;
    }
    match &cli.command {
        Command::IngestCheck(input) | Command::Run(input) => apply_input(&mut cfg.input, input),
        Command::Centrality(input) => {
            apply_input(&mut cfg.input, input);
            cfg.stages = vec![Stage::Centrality];
        }
        Command::Kde { input, indices } => {
            apply_input(&mut cfg.input, input);
            cfg.stages = vec![Stage::Kde];
            if !indices.is_empty() {
                cfg.kde.weight_indices = indices.clone();
            }
        }
        Command::Csr { input, kinds } => {
            apply_input(&mut cfg.input, input);
            cfg.stages = vec![Stage::Csr];
            if !kinds.is_empty() {
                cfg.csr.kinds = kinds.clone();
            }
        }
        Command::Attack {
            input,
            strategies,
            node_lists,
        } => {
            apply_input(&mut cfg.input, input);
            cfg.stages = vec![Stage::Attack];
            if !strategies.is_empty() {
                cfg.attack.strategies = strategies.clone();
            }
            for (name, path) in node_lists {
                cfg.attack.node_lists.insert(name.clone(), absolute(path));
            }
        }
        Command::Stats { input, compare } => {
            apply_input(&mut cfg.input, input);
            cfg.stages = vec![Stage::Stats];
            if !compare.is_empty() {
                cfg.stats.compare = compare.chunks(2).map(|p| (p[0].clone(), p[1].clone())).collect();
            }
        }
        Command::Demo { cols, rows, corridors } => {
            let mut demo = cfg.demo.clone().unwrap_or_default();
            demo.cols = cols.unwrap_or(demo.cols);
            demo.rows = rows.unwrap_or(demo.rows);
            demo.corridors = corridors.unwrap_or(demo.corridors);
            cfg.demo = Some(demo);
            if cli.config.is_none() {
                cfg.stages = Stage::ALL.to_vec();
            }
        }
        Command::Replay { .. } => {}
    }
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::validation("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::runtime("setup", e))?;
    }
    match &cli.command {
        Command::Replay { manifest } => {
            let report = replay(manifest, cli.output.as_deref().map(absolute).as_deref())?;
            if report.identical() {
                println!("replay: {} outputs identical in {}", report.matched, report.output_dir.display());
                Ok(())
            } else {
                for p in &report.mismatched {
                    eprintln!("differs: {p}");
                }
                Err(Failure::runtime(
                    "replay",
                    anyhow::anyhow!("{} of {} outputs differ", report.mismatched.len(), report.mismatched.len() + report.matched),
                ))
            }
        }
        Command::IngestCheck(_) => {
            let cfg = build_config(cli)?;
            if cfg.input.nodes.is_none() || cfg.input.edges.is_none() {
                return Err(Failure::validation("--nodes and --edges are required"));
            }
            for (label, p) in cfg.input_files() {
                if !p.is_file() {
                    return Err(Failure::validation(format!("{label} file not found: {}", p.display())));
                }
            }
            print!("{}", ingest_check(&cfg.input)?);
            Ok(())
        }
        _ => {
            let cfg = build_config(cli)?;
            let report = run(&cfg)?;
            print!("{}", report.summary);
            println!("outputs: {} files in {}", report.outputs.len(), report.output_dir.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
