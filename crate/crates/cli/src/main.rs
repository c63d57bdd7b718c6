//! `monogenic`: classify, integrate and expand maps described by a JSON job
//! file.

mod config;
mod output;

use std::io::{self, Write};
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use monogenic::integration::{self, morera_battery, MoreraStats};
use monogenic::monogenic::{classify, eval_taylor};
use monogenic::{ClassificationReport, GMap, Order, Path, Point3, Point64, Quat64, Side};
use serde::Serialize;

use config::{Job, LoadedMap};
use output::{fmt6, fmt_quat};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("evaluation error: {0}")]
    Eval(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl CliError {
    fn config(e: monogenic::Error) -> Self {
        CliError::Config(e.to_string())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Eval(_) => 3,
            CliError::Unsupported(_) => 4,
        }
    }
}

impl From<monogenic::Error> for CliError {
    fn from(e: monogenic::Error) -> Self {
        match e {
            monogenic::Error::Parse(_) | monogenic::Error::Frame(_) => CliError::Config(e.to_string()),
            _ => CliError::Eval(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "monogenic", version, about = "Monogenic maps with values in complex quaternions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone)]
struct Common {
    /// Write the JSON report to PATH (`-` prints only JSON on stdout)
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Seed for sample points and random triangles
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Classifier tolerance on scaled residuals
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Number of sample points
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Gauss-Legendre nodes per segment
    #[arg(long, global = true)]
    nodes: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the map and run the Morera battery
    Classify {
        config: PathBuf,
        /// Random triangles per side in the Morera battery
        #[arg(long, default_value_t = 20)]
        triangles: usize,
    },
    /// Integrate the map along a polyline
    Integrate {
        config: PathBuf,
        /// Vertex array `[[x,y,z],...]`, `{"vertices":[...],"closed":true}`, or a file holding either
        #[arg(long)]
        path: String,
        #[arg(long, value_enum, default_value_t = OrderArg::Left)]
        order: OrderArg,
        /// Close the polyline back to its first vertex
        #[arg(long)]
        closed: bool,
    },
    /// Taylor coefficients and truncation errors of a G-monogenic map
    Taylor {
        config: PathBuf,
        #[arg(long, value_parser = parse_point)]
        center: Point64,
        #[arg(long, default_value_t = 8)]
        order: usize,
        /// Point where truncation errors are measured (defaults to the center)
        #[arg(long, value_parser = parse_point)]
        probe: Option<Point64>,
    },
    /// Check the frame and print the degeneracy lines
    VerifyFrame { config: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    /// dζ·Φ
    Left,
    /// Φ·dζ
    Right,
}

fn parse_point(s: &str) -> Result<Point64, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [x, y, z] => Ok(Point3::new(x, y, z)),
        _ => Err(format!("expected x,y,z, got {s:?}")),
    }
}

/// Human text and JSON value produced by a command.
struct Output {
    human: String,
    json: serde_json::Value,
}

fn to_value<S: Serialize>(v: &S) -> serde_json::Value {
    serde_json::to_value(v).expect("report types serialize")
}

#[derive(Serialize)]
struct MoreraSummary {
    side: Side,
    triangles: usize,
    zero_count: usize,
    max_ratio: f64,
    min_ratio: f64,
    nodes_per_edge: usize,
}

impl MoreraSummary {
    fn new(s: &MoreraStats<f64>, nodes: usize) -> Self {
        Self {
            side: s.side,
            triangles: s.triangles,
            zero_count: s.zero_count,
            max_ratio: s.max_ratio,
            min_ratio: s.min_ratio,
            nodes_per_edge: nodes,
        }
    }
}

#[derive(Serialize)]
struct TaylorTable {
    center: Point64,
    probe: Point64,
    coefficients: Vec<Quat64>,
    errors: Vec<f64>,
}

fn taylor_table<M: GMap<f64>>(m: &M, center: Point64, probe: Point64, order: usize) -> Result<TaylorTable, CliError> {
    let coefficients = m.taylor_expand(center, order)?;
    let exact = m.value(probe)?;
    let errors = (0..=order)
        .map(|n| (eval_taylor(&coefficients[..=n], m.frame(), center, probe, m.side()) - exact).norm())
        .collect();
    Ok(TaylorTable { center, probe, coefficients, errors })
}

fn g_map_taylor(map: &LoadedMap, center: Point64, probe: Point64, order: usize) -> Result<TaylorTable, CliError> {
    match map {
        LoadedMap::Right(m) => taylor_table(m, center, probe, order),
        LoadedMap::Left(m) => taylor_table(m, center, probe, order),
        LoadedMap::Components(_) => Err(CliError::Unsupported(
            "Taylor expansion needs a right_g or left_g map, got components".into(),
        )),
    }
}

fn cmd_classify(job: &Job, common: &Common, triangles: usize) -> Result<Output, CliError> {
    let tol = common.tol.or(job.config.tolerances.classify).unwrap_or(1e-9);
    let seed = common.seed.or(job.config.seed).unwrap_or(0);
    let samples = common.samples.or(job.config.samples).unwrap_or(200);
    let nodes = common.nodes.unwrap_or(integration::DEFAULT_NODES);
    let cm = job.map.component_map();
    let report: ClassificationReport<f64> = classify(&cm, &job.domain, samples, tol, seed)?;
    let morera = [Side::Right, Side::Left]
        .into_iter()
        .map(|side| {
            morera_battery(&cm, &job.domain, side, triangles, nodes, seed).map(|s| MoreraSummary::new(&s, nodes))
        })
        .collect::<monogenic::Result<Vec<_>>>()?;
    let taylor = match job.map {
        LoadedMap::Components(_) => None,
        _ => {
            let center = job.domain.center();
            let step = 0.25 * job.domain.distance_to_boundary(center) / 3f64.sqrt();
            let probe = center + Point3::new(step, step, step);
            Some(g_map_taylor(&job.map, center, probe, 16)?)
        }
    };

    let validation = job.config.frame.validate();
    let mut h = String::new();
    h += &format!("map: {} over [{:?}, {:?}]\n", job.map.kind(), job.config.domain.min, job.config.domain.max);
    if !validation.is_valid() {
        h += &format!(
            "warning: frame independent={} surjective={}\n",
            validation.independent, validation.surjective
        );
    }
    h += &format!("classification ({} points, tol {})\n", report.points_tested, fmt6(tol));
    let r = &report.residuals;
    let rows = [
        ("right_G", report.right_g, r.right_cr, "Cauchy-Riemann"),
        ("left_G", report.left_g, r.left_cr, "Cauchy-Riemann"),
        ("H", report.h, r.h_span, "span"),
        ("right_H", report.right_h, r.right_h, "dPhi = dzeta Phi'"),
        ("left_H", report.left_h, r.left_h, "dPhi = Phi' dzeta"),
    ];
    for (name, verdict, res, what) in rows {
        h += &format!("  {name:<8} {verdict:<5}  max {what} residual {}\n", fmt6(res));
    }
    h += &format!("morera ({triangles} triangles, {nodes} nodes/edge)\n");
    for m in &morera {
        h += &format!(
            "  {:<5} {}/{} vanish, residual/scale in [{}, {}]\n",
            format!("{:?}", m.side).to_lowercase(),
            m.zero_count,
            m.triangles,
            fmt6(m.min_ratio),
            fmt6(m.max_ratio)
        );
    }
    if let Some(t) = &taylor {
        h += &format!("taylor truncation error at {}\n", fmt_point(t.probe));
        for (n, e) in t.errors.iter().enumerate() {
            h += &format!("  n={n:<3} {}\n", fmt6(*e));
        }
    }
    let json = serde_json::json!({
        "config": to_value(&job.config),
        "frame": to_value(&validation),
        "classification": to_value(&report),
        "morera": to_value(&morera),
        "taylor": to_value(&taylor),
    });
    Ok(Output { human: h, json })
}

fn fmt_point(p: Point64) -> String {
    format!("({}, {}, {})", fmt6(p.x), fmt6(p.y), fmt6(p.z))
}

fn read_path_spec(spec: &str, closed: bool) -> Result<Path<f64>, CliError> {
    let trimmed = spec.trim_start();
    let text = if trimmed.starts_with('[') || trimmed.starts_with('{') {
        spec.to_string()
    } else {
        std::fs::read_to_string(spec).map_err(|e| CliError::Config(format!("cannot read path file {spec}: {e}")))?
    };
    let path = Path::from_json(&text).map_err(|e| CliError::Config(e.to_string()))?;
    match path {
        Path::Polyline { vertices, closed: c } => Ok(Path::Polyline { vertices, closed: c || closed }),
        other => Ok(other),
    }
}

fn cmd_integrate(job: &Job, common: &Common, spec: &str, order: OrderArg, closed: bool) -> Result<Output, CliError> {
    let nodes = common.nodes.unwrap_or(integration::DEFAULT_NODES);
    if nodes == 0 {
        return Err(CliError::Config("--nodes must be positive".into()));
    }
    let path = read_path_spec(spec, closed)?;
    let order = match order {
        OrderArg::Left => Order::Left,
        OrderArg::Right => Order::Right,
    };
    let value = integration::integral(&path, |p| job.map.value(p), &job.config.frame, order, nodes)?;
    let form = match order {
        Order::Left => "dzeta * Phi",
        Order::Right => "Phi * dzeta",
    };
    let segments = path.segments();
    let human = format!(
        "integral of {form} along {} segment(s){}, {nodes} nodes/segment\n  {}\n  norm {}\n",
        segments.len(),
        if path.is_closed() { ", closed" } else { "" },
        fmt_quat(&value),
        fmt6(value.norm())
    );
    let vertices: Vec<Point64> = match &path {
        Path::Polyline { vertices, .. } => vertices.clone(),
        _ => Vec::new(),
    };
    let json = serde_json::json!({
        "config": to_value(&job.config),
        "order": to_value(&order),
        "nodes": nodes,
        "closed": path.is_closed(),
        "path": to_value(&vertices),
        "value": to_value(&value),
        "norm": value.norm(),
    });
    Ok(Output { human, json })
}

fn cmd_taylor(job: &Job, center: Point64, order: usize, probe: Option<Point64>) -> Result<Output, CliError> {
    let probe = probe.unwrap_or(center);
    let table = g_map_taylor(&job.map, center, probe, order)?;
    let mut h = format!(
        "{} map, center {}, probe {}\n",
        job.map.kind(),
        fmt_point(center),
        fmt_point(probe)
    );
    for (n, (p, e)) in table.coefficients.iter().zip(&table.errors).enumerate() {
        h += &format!("  n={n:<3} |Phi - S_n| {:<12}  p_n = {}\n", fmt6(*e), fmt_quat(p));
    }
    let json = serde_json::json!({
        "config": to_value(&job.config),
        "taylor": to_value(&table),
    });
    Ok(Output { human: h, json })
}

#[derive(Serialize)]
struct LineOut {
    anchor: Point64,
    direction: Point64,
}

fn cmd_verify_frame(job: &Job) -> Result<Output, CliError> {
    let frame = &job.config.frame;
    let report = frame.validate();
    let lines = frame.degeneracy_lines();
    let mut h = format!(
        "independent {}\nsurjective  {}\nrank        {}\n",
        report.independent, report.surjective, report.rank
    );
    let (l1, l2, pencil) = match &lines {
        Ok((a, b)) => (
            Some(LineOut { anchor: a.anchor, direction: a.direction }),
            Some(LineOut { anchor: b.anchor, direction: b.direction }),
            None,
        ),
        Err(e) => (None, None, Some(e.to_string())),
    };
    for (name, l) in [("L1", &l1), ("L2", &l2)] {
        match l {
            Some(l) => h += &format!("{name}: t -> {} + t*{}\n", fmt_point(l.anchor), fmt_point(l.direction)),
            None => h += &format!("{name}: none ({})\n", pencil.as_deref().unwrap_or("")),
        }
    }
    let json = serde_json::json!({
        "config": to_value(&job.config),
        "independent": report.independent,
        "surjective": report.surjective,
        "rank": report.rank,
        "valid": report.is_valid(),
        "L1": to_value(&l1),
        "L2": to_value(&l2),
        "pencil_error": pencil,
    });
    Ok(Output { human: h, json })
}

fn emit(out: &Output, json_path: Option<&FsPath>, elapsed: f64) -> Result<(), CliError> {
    let text = monogenic::json::to_string_17(&out.json).map_err(|e| CliError::Eval(e.to_string()))?;
    let stdout_text = match json_path {
        Some(p) if p.as_os_str() == "-" => text + "\n",
        Some(p) => {
            std::fs::write(p, text + "\n")
                .map_err(|e| CliError::Config(format!("cannot write {}: {e}", p.display())))?;
            format!("{}time {elapsed:.3} s\n", out.human)
        }
        None => format!("{}time {elapsed:.3} s\n", out.human),
    };
    let mut stdout = io::stdout().lock();
    match stdout.write_all(stdout_text.as_bytes()).and_then(|()| stdout.flush()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(CliError::Eval(format!("cannot write output: {e}"))),
        _ => Ok(()),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let start = Instant::now();
    let common = &cli.common;
    let out = match &cli.command {
        Command::Classify { config, triangles } => cmd_classify(&Job::load(config)?, common, *triangles)?,
        Command::Integrate { config, path, order, closed } => {
            cmd_integrate(&Job::load(config)?, common, path, *order, *closed)?
        }
        Command::Taylor { config, center, order, probe } => cmd_taylor(&Job::load(config)?, *center, *order, *probe)?,
        Command::VerifyFrame { config } => cmd_verify_frame(&Job::load(config)?)?,
    };
    emit(&out, common.json.as_deref(), start.elapsed().as_secs_f64())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
