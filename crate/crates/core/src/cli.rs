//! Command-line front end: `spectrum`, `zeta`, `dims`, `dixmier`,
//! `geodesic`, `measure`, `tree` and `graph` subcommands with CSV/JSON
//! outputs. Outputs are deterministic for a fixed invocation; exit codes
//! are 0 (success), 2 (usage error) and 3 (numeric-domain error).

use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

use crate::dimension::{
    complex_dimensions, dixmier_partial_sums, dixmier_residue, metric_dimension_analytic,
    metric_dimension_empirical, Window,
};
use crate::gasket::{self, PlanePoint};
use crate::graph::WeightedGraph;
use crate::spectrum::SpectrumSpec;
use crate::tree::Tree;
use crate::zeta::{
    gasket_zeta, odd_zeta_factor, riemann_zeta, truncated_spectral_zeta, GeometricLengthFamily,
    MeromorphicForm,
};
use crate::Error;

/// Environment variable naming the default output directory for relative
/// `--output` paths.
pub const OUTDIR_ENV: &str = "FRACTAL_SPECTRA_OUTDIR";

#[derive(Parser, Debug)]
#[command(
    name = "fractal-spectra",
    version,
    about = "Dirac spectra, zeta functions, dimensions and geodesics of fractal sets built on curves"
)]
pub struct Cli {
    /// Output file (defaults to stdout); relative paths resolve against
    /// $FRACTAL_SPECTRA_OUTDIR when it is set.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads for grid evaluations.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Seed for sampled subroutines; listed outputs are deterministic.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Emit spectral lines as CSV (magnitude, multiplicity, cumulative count).
    Spectrum {
        /// gasket | tree:f2 | tree:FILE | graph:FILE | edge:LEN | circle:R[:translated]
        #[arg(long)]
        shape: String,
        /// Number of lines to emit (ignored when --max-magnitude is given).
        #[arg(long, default_value_t = 100)]
        lines: usize,
        /// Emit all lines with magnitude at most this value.
        #[arg(long)]
        max_magnitude: Option<f64>,
    },
    /// Evaluate the spectral zeta function at a point or on a grid (JSON).
    Zeta {
        #[arg(long)]
        shape: String,
        /// Single evaluation point "re,im".
        #[arg(long)]
        z: Option<String>,
        /// Rectangular grid "re_min,re_max,im_min,im_max" (needs --steps).
        #[arg(long)]
        grid: Option<String>,
        /// Grid resolution "n_re,n_im".
        #[arg(long)]
        steps: Option<String>,
        /// Certified tail accuracy for the truncated sum.
        #[arg(long, default_value_t = 1e-8)]
        target: f64,
        /// truncated | closed
        #[arg(long, default_value = "truncated")]
        method: String,
    },
    /// Complex-dimension pole tables (CSV) or empirical dimension fits (JSON).
    Dims {
        #[arg(long)]
        shape: String,
        /// Pole window "re_min,re_max,im_min,im_max".
        #[arg(long)]
        window: Option<String>,
        /// Fit the counting-function slope instead of listing poles.
        #[arg(long)]
        empirical: bool,
        #[arg(long, default_value_t = 1e2)]
        lambda_min: f64,
        #[arg(long, default_value_t = 1e4)]
        lambda_max: f64,
    },
    /// Dixmier-type trace: residue value and logarithmic partial sums (JSON).
    Dixmier {
        #[arg(long)]
        shape: String,
        /// Exponent; defaults to the metric dimension of the shape.
        #[arg(long)]
        d: Option<f64>,
        /// Partial-sum lengths, comma separated.
        #[arg(long, default_value = "10,100,1000,10000,100000")]
        n_list: String,
    },
    /// Geodesic distance between two gasket points (JSON).
    Geodesic {
        /// Point "x,y".
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
        /// exact | graph
        #[arg(long, default_value = "exact")]
        method: String,
        /// Approximation level for the graph method.
        #[arg(long, default_value_t = 10)]
        level: u32,
        /// Snap radius: inputs this close to the level-10 vertex set are
        /// moved onto it before measuring.
        #[arg(long, default_value_t = 1e-3)]
        snap: f64,
    },
    /// Measure-state averages over the gasket (JSON).
    Measure {
        #[arg(long, default_value_t = 8)]
        level: u32,
        /// one | x | y | affine:A,B,C | bump:CX,CY,R
        #[arg(long)]
        function: String,
        /// midpoint | vertex
        #[arg(long, default_value = "midpoint")]
        state: String,
    },
    /// Tree tables (CSV) and point distances (JSON).
    Tree {
        #[arg(long, default_value = "tree:f2")]
        shape: String,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        /// vertices | edges: emit a CSV table instead of the summary.
        #[arg(long)]
        table: Option<String>,
        /// Point "edge,offset" for distance queries (with --q).
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        q: Option<String>,
        /// Exponent of the sequence-space metric.
        #[arg(long, default_value_t = 2.0)]
        exponent: f64,
    },
    /// Load, validate and query a weighted graph from an edge-list file.
    Graph {
        #[arg(long)]
        file: PathBuf,
        /// Point "edge,offset" for distance queries (with --q).
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        q: Option<String>,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
    Io(std::io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Core(e) => {
                if e.is_numeric_domain() {
                    3
                } else {
                    2
                }
            }
        }
    }
}

/// Parsed shape selector.
pub enum Shape {
    Gasket,
    TreeF2,
    TreeFile(PathBuf),
    GraphFile(PathBuf),
    Edge(f64),
    Circle { radius: f64, translated: bool },
}

pub fn parse_shape(s: &str) -> Result<Shape, CliError> {
    if s == "gasket" {
        return Ok(Shape::Gasket);
    }
    if let Some(rest) = s.strip_prefix("tree:") {
        if rest == "f2" {
            return Ok(Shape::TreeF2);
        }
        return Ok(Shape::TreeFile(PathBuf::from(rest)));
    }
    if let Some(rest) = s.strip_prefix("graph:") {
        return Ok(Shape::GraphFile(PathBuf::from(rest)));
    }
    if let Some(rest) = s.strip_prefix("edge:") {
        let len: f64 = rest
            .parse()
            .ok()
            .filter(|&l| l > 0.0)
            .ok_or_else(|| CliError::Usage(format!("invalid edge length `{rest}`")))?;
        return Ok(Shape::Edge(len));
    }
    if let Some(rest) = s.strip_prefix("circle:") {
        let (r_str, translated) = match rest.strip_suffix(":translated") {
            Some(r) => (r, true),
            None => (rest, false),
        };
        let radius: f64 = r_str
            .parse()
            .ok()
            .filter(|&r| r > 0.0)
            .ok_or_else(|| CliError::Usage(format!("invalid circle radius `{r_str}`")))?;
        return Ok(Shape::Circle { radius, translated });
    }
    Err(CliError::Usage(format!(
        "unknown shape `{s}` (expected gasket, tree:f2, tree:FILE, graph:FILE, edge:LEN or circle:R)"
    )))
}

/// Loads a graph file and verifies the unique-path property, returning the
/// rooted tree.
pub fn load_tree_file(path: &Path) -> Result<Tree, CliError> {
    let text = std::fs::read_to_string(path)?;
    let graph = WeightedGraph::from_edge_list_text(&text)?;
    Ok(Tree::from_graph(graph, 0)?)
}

pub fn load_graph_file(path: &Path) -> Result<WeightedGraph, CliError> {
    let text = std::fs::read_to_string(path)?;
    Ok(WeightedGraph::from_edge_list_text(&text)?)
}

/// Spectrum description for a parsed shape selector.
pub fn shape_spectrum_spec(shape: &Shape) -> Result<SpectrumSpec, CliError> {
    Ok(match shape {
        Shape::Gasket => SpectrumSpec::Gasket,
        Shape::TreeF2 => SpectrumSpec::TreeFamily(GeometricLengthFamily::f2()),
        Shape::Edge(len) => SpectrumSpec::Edge { len: *len },
        Shape::Circle { radius, translated } => SpectrumSpec::Circle {
            radius: *radius,
            translated: *translated,
        },
        Shape::TreeFile(path) => {
            let tree = load_tree_file(path)?;
            SpectrumSpec::GraphEdges(tree.graph().edges().iter().map(|e| e.len).collect())
        }
        Shape::GraphFile(path) => {
            let graph = load_graph_file(path)?;
            SpectrumSpec::GraphEdges(graph.edges().iter().map(|e| e.len).collect())
        }
    })
}

fn parse_pair(s: &str, what: &str) -> Result<(f64, f64), CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(CliError::Usage(format!("{what} must be `a,b`, got `{s}`")));
    }
    let a = parts[0]
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("invalid {what} component `{}`", parts[0])))?;
    let b = parts[1]
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("invalid {what} component `{}`", parts[1])))?;
    Ok((a, b))
}

fn parse_quad(s: &str, what: &str) -> Result<(f64, f64, f64, f64), CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(CliError::Usage(format!("{what} must be `a,b,c,d`, got `{s}`")));
    }
    let mut vals = [0.0; 4];
    for (i, p) in parts.iter().enumerate() {
        vals[i] = p
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("invalid {what} component `{p}`")))?;
    }
    Ok((vals[0], vals[1], vals[2], vals[3]))
}

/// Named plane functions for the measure and trace commands.
pub fn plane_function(
    spec: &str,
) -> Result<Box<dyn Fn(PlanePoint) -> f64 + Send + Sync>, CliError> {
    if spec == "one" {
        return Ok(Box::new(|_| 1.0));
    }
    if spec == "x" {
        return Ok(Box::new(|p| p.x));
    }
    if spec == "y" {
        return Ok(Box::new(|p| p.y));
    }
    if let Some(rest) = spec.strip_prefix("affine:") {
        let parts: Vec<f64> = rest
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| CliError::Usage(format!("invalid affine parameters `{rest}`")))?;
        if parts.len() != 3 {
            return Err(CliError::Usage("affine needs A,B,C".into()));
        }
        let (a, b, c) = (parts[0], parts[1], parts[2]);
        return Ok(Box::new(move |p| a * p.x + b * p.y + c));
    }
    if let Some(rest) = spec.strip_prefix("bump:") {
        let parts: Vec<f64> = rest
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| CliError::Usage(format!("invalid bump parameters `{rest}`")))?;
        if parts.len() != 3 || parts[2] <= 0.0 {
            return Err(CliError::Usage("bump needs CX,CY,R with R > 0".into()));
        }
        let (cx, cy, r) = (parts[0], parts[1], parts[2]);
        return Ok(Box::new(move |p| {
            let t = ((p.x - cx).powi(2) + (p.y - cy).powi(2)) / (r * r);
            if t >= 1.0 {
                0.0
            } else {
                (1.0 - t).powi(2)
            }
        }));
    }
    Err(CliError::Usage(format!(
        "unknown function `{spec}` (expected one, x, y, affine:A,B,C or bump:CX,CY,R)"
    )))
}

/// Deterministic fan-out: items are processed in contiguous chunks and the
/// results concatenated in input order.
pub fn parallel_map<T, R, F>(items: Vec<T>, threads: usize, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync,
{
    let threads = threads.max(1);
    if threads == 1 || items.len() <= 1 {
        return items.into_iter().map(f).collect();
    }
    let chunk = items.len().div_ceil(threads);
    let mut chunks: Vec<Vec<T>> = Vec::new();
    let mut iter = items.into_iter();
    loop {
        let c: Vec<T> = iter.by_ref().take(chunk).collect();
        if c.is_empty() {
            break;
        }
        chunks.push(c);
    }
    let f = &f;
    let mut results: Vec<Vec<R>> = Vec::with_capacity(chunks.len());
    std::thread::scope(|scope| {
        let handles: Vec<_> = chunks
            .into_iter()
            .map(|c| scope.spawn(move || c.into_iter().map(f).collect::<Vec<R>>()))
            .collect();
        for h in handles {
            results.push(h.join().expect("worker panicked"));
        }
    });
    results.into_iter().flatten().collect()
}

#[derive(Serialize)]
struct ZetaRecord {
    z_re: f64,
    z_im: f64,
    value_re: f64,
    value_im: f64,
    tail_bound: f64,
}

fn closed_zeta(shape: &Shape, z: Complex64) -> Result<Complex64, CliError> {
    Ok(match shape {
        Shape::Gasket => gasket_zeta(z)?,
        Shape::TreeF2 => crate::zeta::tree_zeta(&GeometricLengthFamily::f2(), z)?,
        Shape::Edge(len) => {
            // sum 2 ((2k+1) pi / (2 len))^(-z)
            2.0 * ((2.0 * len / std::f64::consts::PI).ln() * z).exp() * odd_zeta_factor(z)?
        }
        Shape::Circle { radius, translated } => {
            if *translated {
                2.0 * ((2.0 * radius).ln() * z).exp() * odd_zeta_factor(z)?
            } else {
                2.0 * (radius.ln() * z).exp() * riemann_zeta(z)?
            }
        }
        _ => {
            return Err(CliError::Usage(
                "closed-form zeta is available for gasket, tree:f2, edge and circle shapes".into(),
            ))
        }
    })
}

fn zeta_record(
    shape: &Shape,
    spec: &SpectrumSpec,
    method: &str,
    z: Complex64,
    target: f64,
) -> Result<ZetaRecord, CliError> {
    let (value, tail) = match method {
        "truncated" => truncated_spectral_zeta(spec, z, target)?,
        "closed" => (closed_zeta(shape, z)?, 0.0),
        other => {
            return Err(CliError::Usage(format!(
                "unknown method `{other}` (expected truncated or closed)"
            )))
        }
    };
    Ok(ZetaRecord {
        z_re: z.re,
        z_im: z.im,
        value_re: value.re,
        value_im: value.im,
        tail_bound: tail,
    })
}

fn meromorphic_form(shape: &Shape) -> Result<MeromorphicForm, CliError> {
    Ok(match shape {
        Shape::Gasket => MeromorphicForm::gasket(),
        Shape::TreeF2 => MeromorphicForm::tree(&GeometricLengthFamily::f2())?,
        _ => {
            return Err(CliError::Usage(
                "pole analysis needs a closed meromorphic form (gasket or tree:f2)".into(),
            ))
        }
    })
}

fn snap_gasket_point(p: PlanePoint, snap: f64) -> Result<PlanePoint, CliError> {
    if gasket::on_gasket(p) {
        return Ok(p);
    }
    let approx = gasket::gasket_approx(10)?;
    let mut best = None;
    let mut best_d = f64::INFINITY;
    for c in &approx.coords {
        let d = c.dist(&p);
        if d < best_d {
            best_d = d;
            best = Some(*c);
        }
    }
    match best {
        Some(c) if best_d <= snap => Ok(c),
        _ => Err(CliError::Core(Error::NotOnGasket(p.x, p.y))),
    }
}

fn json_string<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| CliError::Usage(format!("serialization failed: {e}")))
}

/// Executes a parsed invocation and returns the output payload.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Spectrum {
            shape,
            lines,
            max_magnitude,
        } => {
            let spec = shape_spectrum_spec(&parse_shape(shape)?)?;
            let stream = spec.stream()?;
            let mut out = String::from("magnitude,multiplicity,cumulative_count\n");
            let mut cumulative = 0u64;
            match max_magnitude {
                Some(cap) => {
                    for line in stream {
                        if line.magnitude > *cap {
                            break;
                        }
                        cumulative += line.multiplicity;
                        out.push_str(&format!(
                            "{},{},{}\n",
                            line.magnitude, line.multiplicity, cumulative
                        ));
                    }
                }
                None => {
                    for line in stream.take(*lines) {
                        cumulative += line.multiplicity;
                        out.push_str(&format!(
                            "{},{},{}\n",
                            line.magnitude, line.multiplicity, cumulative
                        ));
                    }
                }
            }
            Ok(out)
        }
        Command::Zeta {
            shape,
            z,
            grid,
            steps,
            target,
            method,
        } => {
            let parsed = parse_shape(shape)?;
            let spec = shape_spectrum_spec(&parsed)?;
            match (z, grid) {
                (Some(zs), None) => {
                    let (re, im) = parse_pair(zs, "z")?;
                    let rec = zeta_record(&parsed, &spec, method, Complex64::new(re, im), *target)?;
                    #[derive(Serialize)]
                    struct Single {
                        schema: u32,
                        #[serde(flatten)]
                        record: ZetaRecord,
                    }
                    json_string(&Single { schema: 1, record: rec })
                }
                (None, Some(gs)) => {
                    let steps = steps.as_ref().ok_or_else(|| {
                        CliError::Usage("--grid needs --steps n_re,n_im".into())
                    })?;
                    let (re_min, re_max, im_min, im_max) = parse_quad(gs, "grid")?;
                    let (nr, ni) = parse_pair(steps, "steps")?;
                    let (nr, ni) = (nr as usize, ni as usize);
                    if nr < 1 || ni < 1 {
                        return Err(CliError::Usage("grid steps must be positive".into()));
                    }
                    let mut points = Vec::with_capacity(nr * ni);
                    for i in 0..nr {
                        for j in 0..ni {
                            let re = if nr == 1 {
                                re_min
                            } else {
                                re_min + (re_max - re_min) * i as f64 / (nr - 1) as f64
                            };
                            let im = if ni == 1 {
                                im_min
                            } else {
                                im_min + (im_max - im_min) * j as f64 / (ni - 1) as f64
                            };
                            points.push(Complex64::new(re, im));
                        }
                    }
                    let records: Result<Vec<ZetaRecord>, CliError> =
                        parallel_map(points, cli.threads, |z| {
                            zeta_record(&parsed, &spec, method, z, *target)
                        })
                        .into_iter()
                        .collect();
                    #[derive(Serialize)]
                    struct Grid {
                        schema: u32,
                        records: Vec<ZetaRecord>,
                    }
                    json_string(&Grid {
                        schema: 1,
                        records: records?,
                    })
                }
                _ => Err(CliError::Usage("give exactly one of --z or --grid".into())),
            }
        }
        Command::Dims {
            shape,
            window,
            empirical,
            lambda_min,
            lambda_max,
        } => {
            let parsed = parse_shape(shape)?;
            if *empirical {
                let spec = shape_spectrum_spec(&parsed)?;
                let fit = metric_dimension_empirical(spec.stream()?, *lambda_min, *lambda_max)?;
                #[derive(Serialize)]
                struct Fit {
                    schema: u32,
                    slope: f64,
                    band: f64,
                    points: usize,
                    lambda_min: f64,
                    lambda_max: f64,
                }
                return json_string(&Fit {
                    schema: 1,
                    slope: fit.slope,
                    band: fit.band,
                    points: fit.points,
                    lambda_min: *lambda_min,
                    lambda_max: *lambda_max,
                });
            }
            let window_str = window
                .as_ref()
                .ok_or_else(|| CliError::Usage("pole listing needs --window".into()))?;
            let (re_min, re_max, im_min, im_max) = parse_quad(window_str, "window")?;
            let form = meromorphic_form(&parsed)?;
            let poles = complex_dimensions(&form, &Window::new(re_min, re_max, im_min, im_max)?)?;
            let mut out = String::from("re,im,order,res_re,res_im\n");
            for p in poles {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    p.location.re, p.location.im, p.order, p.residue.re, p.residue.im
                ));
            }
            Ok(out)
        }
        Command::Dixmier { shape, d, n_list } => {
            let parsed = parse_shape(shape)?;
            let form = meromorphic_form(&parsed)?;
            let spec = shape_spectrum_spec(&parsed)?;
            let default_d = match &parsed {
                Shape::Gasket => gasket::gasket_dimension(),
                Shape::TreeF2 => metric_dimension_analytic(&GeometricLengthFamily::f2()),
                _ => unreachable!("meromorphic_form already restricted the shape"),
            };
            let d = d.unwrap_or(default_d);
            let ns: Vec<u64> = n_list
                .split(',')
                .map(|t| t.trim().parse::<u64>())
                .collect::<Result<_, _>>()
                .map_err(|_| CliError::Usage(format!("invalid N list `{n_list}`")))?;
            let residue_value = dixmier_residue(&form, d)?;
            let sums = dixmier_partial_sums(spec.stream()?, d, &ns)?;
            #[derive(Serialize)]
            struct Entry {
                n: u64,
                value: f64,
            }
            #[derive(Serialize)]
            struct Out {
                schema: u32,
                d: f64,
                residue_value: f64,
                partial_sums: Vec<Entry>,
            }
            json_string(&Out {
                schema: 1,
                d,
                residue_value,
                partial_sums: ns
                    .into_iter()
                    .zip(sums)
                    .map(|(n, value)| Entry { n, value })
                    .collect(),
            })
        }
        Command::Geodesic {
            p,
            q,
            method,
            level,
            snap,
        } => {
            let (px, py) = parse_pair(p, "p")?;
            let (qx, qy) = parse_pair(q, "q")?;
            let p = snap_gasket_point(PlanePoint::new(px, py), *snap)?;
            let q = snap_gasket_point(PlanePoint::new(qx, qy), *snap)?;
            let distance = match method.as_str() {
                "exact" => gasket::geodesic(p, q)?,
                "graph" => gasket::geodesic_graph(p, q, *level)?,
                other => {
                    return Err(CliError::Usage(format!(
                        "unknown method `{other}` (expected exact or graph)"
                    )))
                }
            };
            #[derive(Serialize)]
            struct Out {
                schema: u32,
                p: [f64; 2],
                q: [f64; 2],
                method: String,
                level: Option<u32>,
                distance: f64,
            }
            json_string(&Out {
                schema: 1,
                p: [p.x, p.y],
                q: [q.x, q.y],
                method: method.clone(),
                level: (method == "graph").then_some(*level),
                distance,
            })
        }
        Command::Measure {
            level,
            function,
            state,
        } => {
            let f = plane_function(function)?;
            let value = match state.as_str() {
                "midpoint" => gasket::midpoint_state(&f, *level),
                "vertex" => gasket::vertex_state(&f, *level),
                other => {
                    return Err(CliError::Usage(format!(
                        "unknown state `{other}` (expected midpoint or vertex)"
                    )))
                }
            };
            #[derive(Serialize)]
            struct Out {
                schema: u32,
                level: u32,
                state: String,
                function: String,
                value: f64,
            }
            json_string(&Out {
                schema: 1,
                level: *level,
                state: state.clone(),
                function: function.clone(),
                value,
            })
        }
        Command::Tree {
            shape,
            depth,
            table,
            p,
            q,
            exponent,
        } => {
            let tree = match parse_shape(shape)? {
                Shape::TreeF2 => Tree::cayley_f2(*depth)?,
                Shape::TreeFile(path) => load_tree_file(&path)?,
                _ => {
                    return Err(CliError::Usage(
                        "tree command needs shape tree:f2 or tree:FILE".into(),
                    ))
                }
            };
            if let Some(kind) = table {
                return match kind.as_str() {
                    "vertices" => {
                        let mut out = String::from("id,word,depth,x,y\n");
                        for v in 0..tree.graph().vertex_count() {
                            let word = tree.vertex_word(v).unwrap_or_else(|_| v.to_string());
                            let (x, y) = tree
                                .plane_coords()
                                .map(|c| c[v])
                                .unwrap_or((f64::NAN, f64::NAN));
                            out.push_str(&format!(
                                "{},{},{},{},{}\n",
                                v,
                                word,
                                tree.depth_of(v)?,
                                x,
                                y
                            ));
                        }
                        Ok(out)
                    }
                    "edges" => {
                        let mut out = String::from("id,u,v,level,length\n");
                        for (id, e) in tree.graph().edges().iter().enumerate() {
                            out.push_str(&format!(
                                "{},{},{},{},{}\n",
                                id,
                                e.u,
                                e.v,
                                tree.edge_level(id)?,
                                e.len
                            ));
                        }
                        Ok(out)
                    }
                    other => Err(CliError::Usage(format!(
                        "unknown table `{other}` (expected vertices or edges)"
                    ))),
                };
            }
            if let (Some(ps), Some(qs)) = (p, q) {
                let (pe, po) = parse_pair(ps, "p")?;
                let (qe, qo) = parse_pair(qs, "q")?;
                let x = tree.point(pe as usize, po)?;
                let y = tree.point(qe as usize, qo)?;
                #[derive(Serialize)]
                struct Out {
                    schema: u32,
                    exponent: f64,
                    dp: f64,
                    dinf: f64,
                    geodesic: f64,
                }
                return json_string(&Out {
                    schema: 1,
                    exponent: *exponent,
                    dp: tree.dp_distance(x, y, *exponent)?,
                    dinf: tree.dinf_distance(x, y)?,
                    geodesic: tree.geodesic_distance(x, y)?,
                });
            }
            #[derive(Serialize)]
            struct Census {
                level: u32,
                count: usize,
            }
            #[derive(Serialize)]
            struct Out {
                schema: u32,
                vertices: usize,
                edges: usize,
                census: Vec<Census>,
            }
            json_string(&Out {
                schema: 1,
                vertices: tree.graph().vertex_count(),
                edges: tree.graph().edge_count(),
                census: tree
                    .edge_census()
                    .into_iter()
                    .map(|(level, count)| Census { level, count })
                    .collect(),
            })
        }
        Command::Graph { file, p, q } => {
            let graph = load_graph_file(file)?;
            if let (Some(ps), Some(qs)) = (p, q) {
                let (pe, po) = parse_pair(ps, "p")?;
                let (qe, qo) = parse_pair(qs, "q")?;
                let x = graph.point(pe as usize, po)?;
                let y = graph.point(qe as usize, qo)?;
                let geo = graph.geodesic_distance(x, y)?;
                let connected = geo.is_finite();
                #[derive(Serialize)]
                struct Out {
                    schema: u32,
                    connected: bool,
                    geodesic: Option<f64>,
                    lipschitz_dual: Option<f64>,
                }
                return json_string(&Out {
                    schema: 1,
                    connected,
                    geodesic: connected.then_some(geo),
                    lipschitz_dual: connected
                        .then(|| graph.lipschitz_sup_distance(x, y))
                        .transpose()?,
                });
            }
            #[derive(Serialize)]
            struct Out {
                schema: u32,
                vertices: usize,
                edges: usize,
                total_length: f64,
            }
            json_string(&Out {
                schema: 1,
                vertices: graph.vertex_count(),
                edges: graph.edge_count(),
                total_length: graph.total_length(),
            })
        }
    }
}

/// Parses arguments, runs the command, writes the payload, and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(payload) => {
            if let Some(path) = &cli.output {
                let resolved = match (path.is_relative(), std::env::var_os(OUTDIR_ENV)) {
                    (true, Some(dir)) => Path::new(&dir).join(path),
                    _ => path.clone(),
                };
                if let Err(e) = std::fs::write(&resolved, payload) {
                    eprintln!("fractal-spectra: cannot write {}: {e}", resolved.display());
                    return 2;
                }
            } else {
                print!("{payload}");
            }
            0
        }
        Err(e) => {
            eprintln!("fractal-spectra: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> Result<String, CliError> {
        let cli = Cli::try_parse_from(args).expect("arguments parse");
        execute(&cli)
    }

    #[test]
    fn spectrum_csv_shape() {
        let out = run_capture(&[
            "fractal-spectra",
            "spectrum",
            "--shape",
            "gasket",
            "--lines",
            "3",
        ])
        .unwrap();
        let mut lines = out.lines();
        assert_eq!(lines.next().unwrap(), "magnitude,multiplicity,cumulative_count");
        assert_eq!(lines.next().unwrap(), "0.5,2,2");
        assert_eq!(lines.next().unwrap(), "1,6,8");
    }

    #[test]
    fn zeta_single_point() {
        let out = run_capture(&[
            "fractal-spectra",
            "zeta",
            "--shape",
            "gasket",
            "--z",
            "2,0",
        ])
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["schema"], 1);
        let re = v["value_re"].as_f64().unwrap();
        assert!((re - 39.4784176).abs() < 1e-5);
    }

    #[test]
    fn dims_pole_table_contains_abscissa() {
        let out = run_capture(&[
            "fractal-spectra",
            "dims",
            "--shape",
            "gasket",
            "--window",
            "0.5,2,-30,30",
        ])
        .unwrap();
        assert!(out.starts_with("re,im,order,res_re,res_im\n"));
        assert!(out.contains("1.584962500721156"), "{out}");
    }

    #[test]
    fn geodesic_side_with_snapping() {
        let out = run_capture(&[
            "fractal-spectra",
            "geodesic",
            "--p",
            "0,0",
            "--q",
            "2.0944,0",
            "--method",
            "exact",
        ])
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let d = v["distance"].as_f64().unwrap();
        assert!((d - 2.0943951).abs() < 1e-6, "{d}");
    }

    #[test]
    fn measure_constant_function() {
        let out = run_capture(&[
            "fractal-spectra",
            "measure",
            "--level",
            "4",
            "--function",
            "one",
        ])
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["value"].as_f64().unwrap(), 1.0);
    }

    #[test]
    fn tree_summary_census() {
        let out = run_capture(&[
            "fractal-spectra",
            "tree",
            "--shape",
            "tree:f2",
            "--depth",
            "3",
        ])
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["census"][0]["count"], 4);
        assert_eq!(v["census"][1]["count"], 12);
        assert_eq!(v["census"][2]["count"], 36);
    }

    #[test]
    fn unknown_shape_is_usage_error() {
        let err = run_capture(&[
            "fractal-spectra",
            "spectrum",
            "--shape",
            "moebius",
        ])
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn below_abscissa_is_domain_error() {
        let err = run_capture(&[
            "fractal-spectra",
            "zeta",
            "--shape",
            "gasket",
            "--z",
            "1.2,0",
        ])
        .unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn parallel_map_preserves_order() {
        let items: Vec<u64> = (0..101).collect();
        let out = parallel_map(items.clone(), 4, |x| x * x);
        let expect: Vec<u64> = items.iter().map(|x| x * x).collect();
        assert_eq!(out, expect);
    }
}
