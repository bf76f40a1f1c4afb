//! `flowtopo` command-line front end.

use std::fs::{self, File};
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use flowtopo::autoencoder::ScaledAutoencoder;
use flowtopo::config::RunConfig;
use flowtopo::detector::{self, features_from_csv, features_to_csv, reports_to_jsonl, summarize_windows, FeatureVector};
use flowtopo::flow::{pair_bidirectional, parse_flows, parse_windows, serialize_flows, serialize_windows, window};
use flowtopo::hypergraph::build_hypergraph;
use flowtopo::persistence::{barcode, vietoris_rips};
use flowtopo::synth::{generate_normal, inject_scan, ScanSpec, TrafficProfile};
use flowtopo::topology::{betti, build_ecp, hasse, order_complex_skeleton};
use flowtopo::{par, Execution, TimeWindow};

#[derive(Parser)]
#[command(name = "flowtopo", version, about = "Topological anomaly detection for netflow logs")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// `key = value` configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    window_width: Option<f64>,
    #[arg(long, global = true)]
    max_eps: Option<f64>,
    #[arg(long, global = true)]
    capacity: Option<usize>,
    #[arg(long, global = true)]
    quantile: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; standard output when omitted
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic flow CSV, optionally with port scans
    Synth {
        /// Window index to inject the default 100-port scan into (repeatable)
        #[arg(long = "scan-window")]
        scan_windows: Vec<usize>,
        /// Number of windows to generate
        #[arg(long, default_value_t = 60)]
        windows: usize,
        #[arg(long, default_value_t = 20)]
        clients: usize,
        #[arg(long, default_value_t = 4)]
        servers: usize,
        /// Poisson mean of conversations per client per window
        #[arg(long, default_value_t = 3.0)]
        mean_flows: f64,
    },
    /// Pair flow records into sessions and assign them to windows
    Ingest { input: PathBuf },
    /// Per-window feature vectors from a session CSV
    Features { input: PathBuf },
    /// Per-window hypergraph, ECP and RBS statistics from a session CSV
    Topo { input: PathBuf },
    /// Persistence diagram of a point-cloud CSV
    Ph {
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        max_dim: usize,
    },
    /// Score feature vectors against the sliding baseline
    Detect {
        input: PathBuf,
        /// Denoise vectors with this autoencoder model first
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Train an autoencoder on a feature CSV
    TrainAe {
        input: PathBuf,
        /// Train on the first N rows only
        #[arg(long)]
        rows: Option<usize>,
    },
    /// Pass feature vectors through a trained autoencoder
    Denoise {
        input: PathBuf,
        #[arg(long)]
        model: PathBuf,
    },
}

fn load_config(g: &Global) -> Result<RunConfig> {
    let mut cfg = match &g.config {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
            RunConfig::parse(&text).with_context(|| format!("config {}", p.display()))?
        }
        None => RunConfig::default(),
    };
    if let Some(w) = g.window_width {
        cfg.window_width = w;
    }
    if let Some(e) = g.max_eps {
        cfg.detector.max_eps = e;
    }
    if let Some(c) = g.capacity {
        cfg.detector.capacity = c;
    }
    if let Some(q) = g.quantile {
        cfg.detector.quantile = q;
    }
    if let Some(s) = g.seed {
        cfg.seed = s;
        cfg.train.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(BufReader::new(f))
}

/// Writes to a temporary file next to the target and renames it into place,
/// so a failed run never leaves a partial file.
fn emit(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(content.as_bytes())?;
            stdout.flush()?;
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)
                .with_context(|| format!("creating temporary file in {}", dir.display()))?;
            tmp.write_all(content.as_bytes())?;
            tmp.flush()?;
            tmp.persist(path)
                .with_context(|| format!("writing {}", path.display()))?;
        }
    }
    Ok(())
}

fn read_windows(path: &Path, cfg: &RunConfig) -> Result<Vec<TimeWindow>> {
    parse_windows(open(path)?, cfg.window_width).with_context(|| format!("reading sessions {}", path.display()))
}

fn read_features(path: &Path) -> Result<(Vec<String>, Vec<FeatureVector>)> {
    features_from_csv(open(path)?).with_context(|| format!("reading features {}", path.display()))
}

fn read_model(path: &Path) -> Result<ScaledAutoencoder> {
    let text = fs::read_to_string(path).with_context(|| format!("reading model {}", path.display()))?;
    ScaledAutoencoder::from_text(&text).with_context(|| format!("model {}", path.display()))
}

fn denoise_all(model: &ScaledAutoencoder, vectors: &[FeatureVector]) -> Result<Vec<FeatureVector>> {
    vectors
        .iter()
        .map(|v| {
            let y = model.denoise(&v.values)?;
            Ok(FeatureVector::new(v.window_start, y)?)
        })
        .collect()
}

/// Comma-separated numeric rows; a non-numeric first line is a header.
fn parse_points(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row: Result<Vec<f64>, _> = line.split(',').map(|s| s.trim().parse::<f64>()).collect();
        match row {
            Ok(r) => points.push(r),
            Err(_) if i == 0 => continue,
            Err(e) => bail!("line {}: {e}", i + 1),
        }
    }
    Ok(points)
}

fn topo_csv(windows: &[TimeWindow]) -> String {
    let rows = par::map(Execution::default(), windows, |w| {
        let h = build_hypergraph(w);
        let ecp = build_ecp(&h);
        let rbs = order_complex_skeleton(&ecp, 2);
        let b = betti(&rbs, 1);
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            w.start,
            w.sessions.len(),
            h.n_vertices(),
            h.n_edges(),
            ecp.arcs().len(),
            hasse(&ecp).arcs().len(),
            ecp.max_in_degree(),
            ecp.max_out_degree(),
            rbs.total(),
            b.get(0),
            b.get(1)
        )
    });
    let mut out = String::from(
        "window_start,n_sessions,n_vertices,n_edges,ecp_arcs,hasse_arcs,max_in_degree,max_out_degree,rbs_simplices,beta0,beta1\n",
    );
    out.extend(rows);
    out
}

fn run(cli: Cli) -> Result<()> {
    let cfg = load_config(&cli.global)?;
    let out = cli.global.out.as_deref();
    match cli.command {
        Command::Synth {
            scan_windows,
            windows,
            clients,
            servers,
            mean_flows,
        } => {
            let p = TrafficProfile {
                n_clients: clients,
                n_servers: servers,
                mean_flows,
                duration: windows as f64 * cfg.window_width,
                window_width: cfg.window_width,
                seed: cfg.seed,
                ..TrafficProfile::default()
            };
            let mut flows = generate_normal(&p)?;
            for w in scan_windows {
                flows = inject_scan(&flows, &p, &ScanSpec::default_at(w))?;
            }
            emit(out, &serialize_flows(&flows))
        }
        Command::Ingest { input } => {
            let flows = parse_flows(open(&input)?).with_context(|| format!("reading flows {}", input.display()))?;
            let windows = window(&pair_bidirectional(&flows), cfg.window_width, cfg.window_origin)?;
            emit(out, &serialize_windows(&windows))
        }
        Command::Features { input } => {
            let windows = read_windows(&input, &cfg)?;
            let vectors = summarize_windows(&windows, &cfg.features, Execution::default());
            emit(out, &features_to_csv(&cfg.features.names(), &vectors))
        }
        Command::Topo { input } => {
            let windows = read_windows(&input, &cfg)?;
            emit(out, &topo_csv(&windows))
        }
        Command::Ph { input, max_dim } => {
            let text = fs::read_to_string(&input).with_context(|| format!("reading {}", input.display()))?;
            let points = parse_points(&text).with_context(|| format!("points {}", input.display()))?;
            let f = vietoris_rips(&points, cfg.detector.max_eps, max_dim)?;
            emit(out, &barcode(&f)?.restricted(max_dim).to_csv())
        }
        Command::Detect { input, model } => {
            let (names, mut vectors) = read_features(&input)?;
            let model = match model {
                Some(p) => Some(read_model(&p)?),
                None if cfg.autoencoder => bail!("autoencoder is on but no --model was given"),
                None => None,
            };
            if let Some(m) = &model {
                vectors = denoise_all(m, &vectors)?;
            }
            let run = detector::run(&vectors, &names, &cfg.detector)?;
            emit(out, &reports_to_jsonl(&run.reports))
        }
        Command::TrainAe { input, rows } => {
            let (names, vectors) = read_features(&input)?;
            let n = rows.unwrap_or(vectors.len()).min(vectors.len());
            let data: Vec<Vec<f64>> = vectors[..n].iter().map(|v| v.values.clone()).collect();
            if cfg.ae_bottleneck >= names.len() {
                bail!("bottleneck {} must be smaller than the {} features", cfg.ae_bottleneck, names.len());
            }
            let (model, _) = ScaledAutoencoder::fit(&data, cfg.ae_hidden, cfg.ae_bottleneck, &cfg.train)?;
            emit(out, &model.to_text())
        }
        Command::Denoise { input, model } => {
            let (names, vectors) = read_features(&input)?;
            let model = read_model(&model)?;
            emit(out, &features_to_csv(&names, &denoise_all(&model, &vectors)?))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
