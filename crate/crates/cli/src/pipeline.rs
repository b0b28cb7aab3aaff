//! Stage execution. Stages run in a fixed order over the whole network and
//! then every zone; all randomness is derived from the root seed.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use log::info;

use roadnet::centrality::{all_centralities, write_wide_csv, CentralityOptions};
use roadnet::graph::{
    extract_zone, ingest_network, read_node_list, read_routes, read_zones, read_zones_json, write_network, BusRouteSet, NodeId,
    Point2D, RoadNetwork, ZonePolygon,
};
use roadnet::robustness::{
    attack, corridor_routes, fraction_grid, synthetic_network, AttackCurve, AttackStrategy, SyntheticKind,
};
use roadnet::seed::{derive_seed, stage_seed};
use roadnet::spatial::{csr_test, hotspot_cells, kde_raster, CsrOptions, EnvelopeResult, StudyWindow};
use roadnet::stats::{self, format_sci, summary_table, tau_matrix, zone_comparison, ZoneInput};
use roadnet::CentralityTable;

use crate::config::{InputConfig, RunConfig, Stage, StrategyName};
use crate::manifest::{sha256_bytes, sha256_file, InputRecord, Manifest, ToolInfo, MANIFEST_FILE};
use crate::Failure;

/// Result of a successful run.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub output_dir: PathBuf,
    /// Relative output path to sha256, manifest excluded.
    pub outputs: BTreeMap<String, String>,
    pub timing_ms: BTreeMap<String, u64>,
    /// Human-readable digest, also written to `summary.txt`.
    pub summary: String,
}

/// Files written under the output directory.
struct Outputs {
    root: PathBuf,
    written: Vec<String>,
}

impl Outputs {
    fn new(root: &Path) -> anyhow::Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(Outputs {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn write(&mut self, rel: &str, f: impl FnOnce(&mut BufWriter<File>) -> anyhow::Result<()>) -> anyhow::Result<()> {
        let path = self.root.join(rel);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        let mut w = BufWriter::new(file);
        f(&mut w).with_context(|| format!("writing {}", path.display()))?;
        w.flush().with_context(|| format!("writing {}", path.display()))?;
        self.written.push(rel.to_string());
        Ok(())
    }

    fn hashes(&self) -> anyhow::Result<BTreeMap<String, String>> {
        self.written
            .iter()
            .map(|rel| {
                let path = self.root.join(rel);
                let h = sha256_file(&path).with_context(|| format!("hashing {}", path.display()))?;
                Ok((rel.clone(), h))
            })
            .collect()
    }
}

/// File-name friendly form of a zone or strategy name.
fn slug(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

struct Zone {
    name: String,
    net: RoadNetwork,
    window: StudyWindow,
    routes: BusRouteSet,
}

struct Loaded {
    network: RoadNetwork,
    routes: Option<BusRouteSet>,
    polygons: Vec<ZonePolygon>,
}

fn demo_zones(net: &RoadNetwork) -> anyhow::Result<Vec<ZonePolygon>> {
    let (mut lo, mut hi) = (Point2D::new(f64::MAX, f64::MAX), Point2D::new(f64::MIN, f64::MIN));
    for p in net.positions() {
        lo = Point2D::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point2D::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let pad = 1.0;
    let mid = (lo.x + hi.x) / 2.0;
    Ok(vec![
        ZonePolygon::rectangle("West", Point2D::new(lo.x - pad, lo.y - pad), Point2D::new(mid, hi.y + pad))?,
        ZonePolygon::rectangle("East", Point2D::new(mid + 1e-6, lo.y - pad), Point2D::new(hi.x + pad, hi.y + pad))?,
    ])
}

fn write_routes<W: Write>(routes: &BusRouteSet, out: &mut W) -> std::io::Result<()> {
    writeln!(out, "route_id,seq,node_id")?;
    for r in routes.routes() {
        for (seq, id) in r.nodes.iter().enumerate() {
            writeln!(out, "{},{},{}", r.route_id, seq, id)?;
        }
    }
    Ok(())
}

fn write_zones<W: Write>(zones: &[ZonePolygon], out: &mut W) -> std::io::Result<()> {
    for (i, z) in zones.iter().enumerate() {
        if i > 0 {
            writeln!(out)?;
        }
        writeln!(out, "{}", z.name)?;
        for p in z.ring() {
            writeln!(out, "{} {}", p.x, p.y)?;
        }
    }
    Ok(())
}

fn load_inputs(input: &InputConfig) -> Result<Loaded, Failure> {
    let invalid = |e: roadnet::Error| Failure::validation(e.to_string());
    let nodes = input.nodes.as_ref().ok_or_else(|| Failure::validation("input.nodes is required"))?;
    let edges = input.edges.as_ref().ok_or_else(|| Failure::validation("input.edges is required"))?;
    let mut network = ingest_network(nodes, edges)
        .map_err(invalid)?
        .with_name(input.name.as_deref().unwrap_or("network"));
    if input.undirected {
        network = RoadNetwork::new_undirected(network.name().to_string(), network.nodes(), network.edges().to_vec())
            .map_err(invalid)?;
    }
    let routes = match &input.routes {
        Some(p) => {
            let r = read_routes(p).map_err(invalid)?;
            r.validate_against(&network).map_err(|e| Failure::validation(format!("{}: {e}", p.display())))?;
            Some(r)
        }
        None => None,
    };
    let polygons = match &input.zones {
        Some(p) if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) => {
            read_zones_json(p).map_err(invalid)?
        }
        Some(p) => read_zones(p).map_err(invalid)?,
        None => Vec::new(),
    };
    Ok(Loaded {
        network,
        routes,
        polygons,
    })
}

/// Loads and validates the inputs, returning a one-paragraph description.
pub fn ingest_check(input: &InputConfig) -> Result<String, Failure> {
    let loaded = load_inputs(input)?;
    let mut out = format!("{}\n", loaded.network.summary());
    if let Some(r) = &loaded.routes {
        let _ = writeln!(out, "{} bus routes", r.len());
    }
    for poly in &loaded.polygons {
        let z = extract_zone(&loaded.network, poly).map_err(|e| Failure::validation(e.to_string()))?;
        let _ = writeln!(out, "zone {}", z.summary());
    }
    Ok(out)
}

fn network_fingerprint(net: &RoadNetwork) -> String {
    let mut text = String::new();
    for (id, p) in net.nodes() {
        let _ = writeln!(text, "{id},{},{}", p.x, p.y);
    }
    for e in net.edges() {
        let _ = writeln!(text, "{},{},{}", e.source, e.target, e.length);
    }
    sha256_bytes(text.as_bytes())
}

struct Timer {
    timing: BTreeMap<String, u64>,
}

impl Timer {
    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> Result<T, Failure>) -> Result<T, Failure> {
        let start = Instant::now();
        info!("stage {stage}: start");
        let out = f()?;
        let ms = start.elapsed().as_millis() as u64;
        info!("stage {stage}: done in {ms} ms");
        self.timing.insert(stage.to_string(), ms);
        Ok(out)
    }
}

/// Executes the configured stages and writes every artifact plus the
/// manifest under `config.output_dir`.
pub fn run(config: &RunConfig) -> Result<RunReport, Failure> {
    config.validate()?;
    let mut timer = Timer {
        timing: BTreeMap::new(),
    };
    let mut out = Outputs::new(&config.output_dir).map_err(|e| Failure::runtime("setup", e))?;
    let mut summary = String::new();

    // ingest
    let loaded = timer.time("ingest", || match &config.demo {
        Some(d) => {
            let kind = SyntheticKind::ElongatedGrid {
                cols: d.cols,
                rows: d.rows,
                spacing: d.spacing_m,
                corridors: d.corridors,
                corridor_factor: d.corridor_factor,
                jitter: d.jitter,
            };
            let net = synthetic_network(&kind, stage_seed(config.seed, "demo"))
                .map_err(|e| Failure::validation(format!("demo: {e}")))?
                .with_name("demo");
            let routes = corridor_routes(d.cols, d.rows, d.corridors).map_err(|e| Failure::runtime("ingest", e))?;
            let polygons = demo_zones(&net).map_err(|e| Failure::runtime("ingest", e))?;
            let stage = |e: anyhow::Error| Failure::runtime("ingest", e);
            let (nodes_path, edges_path) = (out.root.join("input/nodes.csv"), out.root.join("input/edges.csv"));
            fs::create_dir_all(out.root.join("input")).map_err(|e| stage(e.into()))?;
            write_network(&net, &nodes_path, &edges_path).map_err(|e| stage(e.into()))?;
            out.written.push("input/nodes.csv".into());
            out.written.push("input/edges.csv".into());
            out.write("input/routes.csv", |w| Ok(write_routes(&routes, w)?)).map_err(stage)?;
            out.write("input/zones.txt", |w| Ok(write_zones(&polygons, w)?)).map_err(stage)?;
            Ok(Loaded {
                network: net,
                routes: Some(routes),
                polygons,
            })
        }
        None => load_inputs(&config.input),
    })?;

    let net = &loaded.network;
    let _ = writeln!(summary, "network {}", net.summary());
    let all_routes = loaded.routes.clone().unwrap_or_else(BusRouteSet::empty);
    let mut zones = vec![Zone {
        name: net.name().to_string(),
        window: StudyWindow::bounding_box(net.positions()).map_err(|e| Failure::validation(e.to_string()))?,
        routes: all_routes.clone(),
        net: net.clone(),
    }];
    for poly in &loaded.polygons {
        if zones.iter().any(|z| z.name == poly.name) {
            return Err(Failure::validation(format!("duplicate zone name '{}'", poly.name)));
        }
        let zn = extract_zone(net, poly).map_err(|e| Failure::validation(e.to_string()))?;
        let _ = writeln!(summary, "zone {}", zn.summary());
        zones.push(Zone {
            name: poly.name.clone(),
            window: StudyWindow::polygon(poly.clone()).map_err(|e| Failure::validation(e.to_string()))?,
            routes: all_routes.restricted_to(&zn),
            net: zn,
        });
    }

    // centralities feed every stage except csr
    let needs_tables = [Stage::Centrality, Stage::Kde, Stage::Stats, Stage::Attack]
        .iter()
        .any(|s| config.has_stage(*s));
    let mut tables: Vec<Vec<CentralityTable>> = Vec::new();
    if needs_tables {
        let opts = CentralityOptions {
            closeness_direction: config.centrality.closeness_direction,
            normalize_degree: config.centrality.normalize_degree,
            normalize_closeness: config.centrality.normalize_closeness,
            normalize_betweenness: config.centrality.normalize_betweenness,
            normalize_load: config.centrality.normalize_load,
        };
        tables = timer.time("centrality", || {
            let mut all = Vec::with_capacity(zones.len());
            for z in &zones {
                info!("centrality: zone {} ({} nodes)", z.name, z.net.node_count());
                let t = all_centralities(&z.net, Some(&z.routes), &opts)
                    .map_err(|e| Failure::runtime("centrality", anyhow::anyhow!("zone {}: {e}", z.name)))?;
                if config.has_stage(Stage::Centrality) {
                    out.write(&format!("centrality/{}.csv", slug(&z.name)), |w| Ok(write_wide_csv(&t, w)?))
                        .map_err(|e| Failure::runtime("centrality", e))?;
                }
                all.push(t);
            }
            Ok(all)
        })?;
    }

    if config.has_stage(Stage::Kde) {
        timer.time("kde", || {
            let fail = |e: anyhow::Error| Failure::runtime("kde", e);
            let mut rows = vec!["zone,index,percentile,threshold,cells".to_string()];
            for (z, zt) in zones.iter().zip(&tables) {
                for kind in &config.kde.weight_indices {
                    let t = zt.iter().find(|t| t.kind() == *kind).expect("every index is computed");
                    let pts: Vec<(Point2D, f64)> = z.net.positions().iter().copied().zip(t.values().iter().copied()).collect();
                    let raster = kde_raster(&pts, &z.window, config.kde.bandwidth_m, config.kde.cell_m, config.kde.mode)
                        .map_err(|e| fail(anyhow::anyhow!("zone {} {kind}: {e}", z.name)))?
                        .with_label(kind.as_str());
                    let stem = format!("kde/{}_{}", slug(&z.name), kind);
                    out.write(&format!("{stem}.asc"), |w| Ok(raster.write_ascii_grid(w)?)).map_err(fail)?;
                    out.write(&format!("{stem}.csv"), |w| Ok(raster.write_csv(w)?)).map_err(fail)?;
                    match hotspot_cells(&raster, config.kde.hotspot_percentile) {
                        Ok(h) => {
                            out.write(&format!("{stem}_hotspots.csv"), |w| {
                                writeln!(w, "col,row,x_center,y_center,value")?;
                                for &(c, r) in &h.cells {
                                    let p = raster.cell_center(c, r);
                                    writeln!(w, "{c},{r},{},{},{}", p.x, p.y, raster.value(c, r))?;
                                }
                                Ok(())
                            })
                            .map_err(fail)?;
                            rows.push(format!("{},{kind},{},{},{}", z.name, h.percentile, h.threshold, h.cells.len()));
                        }
                        Err(roadnet::Error::Degenerate(msg)) => {
                            log::warn!("kde: zone {} {kind}: no hotspots ({msg})", z.name);
                            rows.push(format!("{},{kind},{},,0", z.name, config.kde.hotspot_percentile));
                        }
                        Err(e) => return Err(fail(e.into())),
                    }
                }
            }
            out.write("kde/hotspots.csv", |w| Ok(writeln!(w, "{}", rows.join("\n"))?)).map_err(fail)
        })?;
    }

    if config.has_stage(Stage::Csr) {
        let root = stage_seed(config.seed, "csr");
        let results = timer.time("csr", || {
            let fail = |e: anyhow::Error| Failure::runtime("csr", e);
            let mut results: Vec<(String, EnvelopeResult)> = Vec::new();
            for (zi, z) in zones.iter().enumerate() {
                for (ki, kind) in config.csr.kinds.iter().enumerate() {
                    let lambda = z.window.intensity(z.net.node_count());
                    let r_grid = config.csr.r_max_m.map(|r_max| {
                        (1..=config.csr.r_steps)
                            .map(|i| r_max * i as f64 / config.csr.r_steps as f64)
                            .collect::<Vec<f64>>()
                    });
                    let opts = CsrOptions {
                        n_sims: config.csr.n_sims,
                        seed: derive_seed(root, (zi * 16 + ki) as u64),
                        r_grid,
                        r_steps: config.csr.r_steps,
                        m_reference: config.csr.m_reference,
                        inside_threshold: config.csr.inside_threshold,
                    };
                    info!("csr: zone {} {kind} (lambda {lambda:.3e})", z.name);
                    let res = csr_test(z.net.positions(), &z.window, *kind, &opts)
                        .map_err(|e| fail(anyhow::anyhow!("zone {} {kind}: {e}", z.name)))?;
                    out.write(&format!("csr/{}_{kind}.csv", slug(&z.name)), |w| Ok(res.write_csv(w)?))
                        .map_err(fail)?;
                    results.push((z.name.clone(), res));
                }
            }
            out.write("csr/verdicts.csv", |w| {
                writeln!(w, "zone,kind,n_points,lambda,n_sims,seed,fraction_inside,fraction_above,fraction_below,rejected")?;
                for (name, r) in &results {
                    let v = &r.verdict;
                    writeln!(
                        w,
                        "{name},{},{},{},{},{},{},{},{},{}",
                        r.kind, r.n_points, r.lambda, r.n_simulations, r.seed, v.fraction_inside, v.fraction_above, v.fraction_below, v.rejected
                    )?;
                }
                Ok(())
            })
            .map_err(fail)?;
            Ok(results)
        })?;
        for (name, r) in &results {
            let _ = writeln!(summary, "csr {name} {}: {}", r.kind, r.verdict);
        }
    }

    if config.has_stage(Stage::Stats) {
        let lines = timer.time("stats", || {
            let fail = |e: anyhow::Error| Failure::runtime("stats", e);
            let inputs: Vec<ZoneInput> = zones
                .iter()
                .zip(&tables)
                .map(|(z, t)| ZoneInput {
                    name: z.name.clone(),
                    nodes: z.net.node_count(),
                    edges: z.net.edge_count(),
                    tables: t.clone(),
                })
                .collect();
            let table = summary_table(&inputs).map_err(|e| fail(e.into()))?;
            out.write("stats/summary.csv", |w| Ok(table.write_csv(w)?)).map_err(fail)?;
            let mut lines = Vec::new();
            for input in &inputs {
                let m = tau_matrix(&input.tables).map_err(|e| fail(e.into()))?;
                let s = slug(&input.name);
                out.write(&format!("stats/tau_{s}.csv"), |w| Ok(m.write_csv(w)?)).map_err(fail)?;
                out.write(&format!("stats/tau_{s}_pairs.csv"), |w| Ok(m.write_pairs_csv(w)?)).map_err(fail)?;
            }
            let index_of = |name: &str| {
                inputs
                    .iter()
                    .position(|z| z.name == name)
                    .ok_or_else(|| Failure::validation(format!("stats.compare names unknown zone '{name}'")))
            };
            let pairs: Vec<(usize, usize)> = if config.stats.compare.is_empty() {
                (1..inputs.len()).flat_map(|a| (a + 1..inputs.len()).map(move |b| (a, b))).collect()
            } else {
                config
                    .stats
                    .compare
                    .iter()
                    .map(|(a, b)| Ok((index_of(a)?, index_of(b)?)))
                    .collect::<Result<_, Failure>>()?
            };
            if !pairs.is_empty() {
                let cmp = zone_comparison(&inputs, &pairs, config.stats.mw_mode).map_err(|e| fail(e.into()))?;
                out.write("stats/zone_comparison.csv", |w| Ok(cmp.write_csv(w)?)).map_err(fail)?;
                for (i, index) in cmp.indices.iter().enumerate() {
                    for (j, label) in cmp.comparisons.iter().enumerate() {
                        if let Some(r) = &cmp.results[i][j] {
                            let mark = if r.is_significant(stats::SIGNIFICANCE_LEVEL) { " *" } else { "" };
                            lines.push(format!("mann-whitney {index} {label}: p = {}{mark}", format_sci(r.p_value)));
                        }
                    }
                }
            }
            Ok(lines)
        })?;
        for l in lines {
            let _ = writeln!(summary, "{l}");
        }
    }

    if config.has_stage(Stage::Attack) {
        let lines = timer.time("attack", || {
            let fail = |e: anyhow::Error| Failure::runtime("attack", e);
            let grid = fraction_grid(config.attack.grid_step).map_err(|e| Failure::validation(e.to_string()))?;
            let mut lists = BTreeMap::new();
            for (name, path) in &config.attack.node_lists {
                lists.insert(name.clone(), read_node_list(path).map_err(|e| Failure::validation(e.to_string()))?);
            }
            let root = stage_seed(config.seed, "attack");
            let mut suite = String::new();
            let mut auc_rows = vec!["zone,strategy,auc,lcc_at_10pct".to_string()];
            let mut lines = Vec::new();
            for (zi, (z, zt)) in zones.iter().zip(&tables).enumerate() {
                let random_seed = derive_seed(root, zi as u64);
                let strategies: Vec<AttackStrategy> = config
                    .attack
                    .strategies
                    .iter()
                    .map(|s| match s {
                        StrategyName::Index(k) => {
                            AttackStrategy::Ranked(zt.iter().find(|t| t.kind() == *k).expect("every index is computed").clone())
                        }
                        StrategyName::Random => AttackStrategy::Random {
                            replicates: config.attack.replicates,
                            seed: random_seed,
                        },
                        StrategyName::List(name) => {
                            let present: HashSet<NodeId> = z.net.node_ids().iter().copied().collect();
                            AttackStrategy::NodeList {
                                label: format!("list:{name}"),
                                nodes: lists[name].iter().copied().filter(|id| present.contains(id)).collect(),
                            }
                        }
                    })
                    .collect();
                let curves: Vec<AttackCurve> = strategies
                    .iter()
                    .map(|s| attack(&z.net, s, &grid, config.attack.component))
                    .collect::<roadnet::Result<_>>()
                    .map_err(|e| fail(anyhow::anyhow!("zone {}: {e}", z.name)))?;
                out.write(&format!("attack/{}.csv", slug(&z.name)), |w| {
                    Ok(roadnet::robustness::write_curves_csv(&curves, w)?)
                })
                .map_err(fail)?;
                let _ = writeln!(
                    suite,
                    "[{:?}]\nnodes = {}\nedges = {}\nnetwork_sha256 = \"{}\"\ncomponent = \"{}\"\nstrategies = [{}]\nrandom_seed = {}\nreplicates = {}\ngrid_step = {}\n",
                    z.name,
                    z.net.node_count(),
                    z.net.edge_count(),
                    network_fingerprint(&z.net),
                    config.attack.component,
                    curves.iter().map(|c| format!("{:?}", c.strategy)).collect::<Vec<_>>().join(", "),
                    random_seed,
                    config.attack.replicates,
                    config.attack.grid_step
                );
                for c in &curves {
                    let at10 = c.value_at(0.1).unwrap_or(f64::NAN);
                    auc_rows.push(format!("{},{},{},{}", z.name, c.strategy, c.auc(), at10));
                    lines.push(format!("attack {} {}: auc {:.4}, lcc at 10% {:.4}", z.name, c.strategy, c.auc(), at10));
                }
            }
            out.write("attack/suite.toml", |w| Ok(w.write_all(suite.as_bytes())?)).map_err(fail)?;
            out.write("attack/auc.csv", |w| Ok(writeln!(w, "{}", auc_rows.join("\n"))?)).map_err(fail)?;
            Ok(lines)
        })?;
        for l in lines {
            let _ = writeln!(summary, "{l}");
        }
    }

    out.write("summary.txt", |w| Ok(w.write_all(summary.as_bytes())?))
        .map_err(|e| Failure::runtime("report", e))?;
    let outputs = out.hashes().map_err(|e| Failure::runtime("report", e))?;

    let mut inputs = BTreeMap::new();
    for (label, path) in config.input_files() {
        let sha256 = sha256_file(&path).map_err(|e| Failure::runtime("report", anyhow::anyhow!("{}: {e}", path.display())))?;
        inputs.insert(label, InputRecord { path, sha256 });
    }
    let manifest = Manifest {
        tool: ToolInfo::current(),
        threads: rayon::current_num_threads(),
        inputs,
        outputs: outputs.clone(),
        timing_ms: timer.timing.clone(),
        config: config.clone(),
    };
    fs::write(config.output_dir.join(MANIFEST_FILE), manifest.to_toml())
        .map_err(|e| Failure::runtime("report", anyhow::anyhow!("writing manifest: {e}")))?;

    Ok(RunReport {
        output_dir: config.output_dir.clone(),
        outputs,
        timing_ms: timer.timing,
        summary,
    })
}
