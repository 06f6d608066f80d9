//! `logmetric`: run the finite-metric and log-metric experiments from the
//! command line.
//!
//! Results go to `--output` (or standard output) as a CSV or JSON table.
//! When an output file is given, each row is also summarized on standard
//! output. Exit status: 0 on success, 1 on bad input or usage, 2 when a
//! size guard refuses to run.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use logmetric::ball_geometry::EccReport;
use logmetric::io as fmt_io;
use logmetric::quasigeodesic::{DEFAULT_PROBE_SPACING, DEFAULT_REFINE_TOL, TAME_TOLERANCE};
use logmetric::table::{grid_table, lens_table, line_table};
use logmetric::*;

#[derive(Parser, Debug)]
#[command(name = "logmetric", version, about = "Hyperbolicity experiments on finite metric spaces and the ln(1+d) transform")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    global: Global,
}

#[derive(Args, Debug)]
struct Global {
    /// Point cloud CSV (header `x0,x1,...`).
    #[arg(long, global = true, conflicts_with = "matrix")]
    points: Option<PathBuf>,

    /// Distance matrix CSV (no header), validated on load.
    #[arg(long, global = true)]
    matrix: Option<PathBuf>,

    /// Distance used for point clouds: `euclidean` or `log` (ln(1 + |x - y|)).
    #[arg(long, global = true, default_value = "euclidean")]
    metric: MetricMode,

    /// Apply d' = ln(1 + d) to the loaded space.
    #[arg(long, global = true)]
    log: bool,

    /// Write the result table here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[arg(long, global = true, default_value = "csv")]
    format: Format,

    /// Worker threads. Results do not depend on it.
    #[arg(long, global = true, env = "LOGMETRIC_THREADS", value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
}

#[derive(Args, Debug)]
struct RegionArgs {
    /// Region file, one point index per line.
    #[arg(long, conflicts_with_all = ["ball1", "ball2"])]
    region: Option<PathBuf>,

    /// First ball `center,radius`; the region is its intersection with `--ball2`.
    #[arg(long, requires = "ball2", value_parser = parse_ball)]
    ball1: Option<BallSpec>,

    #[arg(long, requires = "ball1", value_parser = parse_ball)]
    ball2: Option<BallSpec>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the metric axioms.
    Validate,
    /// Emit the d' = ln(1 + d) distance matrix.
    Transform,
    /// 4-point defect.
    Delta {
        /// Pin the basepoint (cubic scan).
        #[arg(long)]
        base: Option<usize>,
        /// Run the full scan beyond the size guard.
        #[arg(long)]
        force: bool,
    },
    /// Ultrametric defect.
    Ultra,
    /// Eccentricity of a region.
    Ecc(RegionArgs),
    /// Hausdorff distance from a region to the nearest ball.
    Quasiball(RegionArgs),
    /// Weak eccentricity `B(z, r) ⊆ S ⊆ B(z', lambda r + delta)`.
    Weakecc {
        #[command(flatten)]
        region: RegionArgs,
        #[arg(long)]
        lambda: f64,
    },
    /// Eccentricity growth of sampled lenses.
    Lens {
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<u32>,
        /// Lattice spacing, snapped to 1/round(1/h).
        #[arg(long, default_value_t = 0.05)]
        h: f64,
        /// Also report weak eccentricity with this factor.
        #[arg(long)]
        lambda: Option<f64>,
    },
    /// 4-point defect of square grids in d and d'.
    Grid {
        #[arg(long, value_delimiter = ',', required = true)]
        sides: Vec<usize>,
        #[arg(long, default_value_t = 1.0)]
        spacing: f64,
        /// `auto`, `full` or `fixed-base`.
        #[arg(long, default_value = "auto", value_parser = parse_scan)]
        scan: GridScan,
    },
    /// Ultrametric defect of {0, 1, ..., N} under d'.
    Lineultra {
        #[arg(long = "N", value_delimiter = ',', required = true)]
        n: Vec<usize>,
    },
    /// Distance beyond which no (L, C)-quasi-geodesic survives the transform.
    Horizon {
        #[arg(long = "L")]
        l: f64,
        #[arg(long = "C")]
        c: f64,
    },
    /// Tame sampled plane quasi-geodesic and check the four conclusions.
    Tame {
        /// Path CSV with rows `t,x,y`.
        #[arg(long)]
        input: PathBuf,
        #[arg(long = "L")]
        l: f64,
        #[arg(long = "C")]
        c: f64,
        #[arg(long, default_value_t = DEFAULT_PROBE_SPACING)]
        probe_spacing: f64,
        #[arg(long, default_value_t = TAME_TOLERANCE)]
        tol: f64,
        /// Write the tamed path here.
        #[arg(long)]
        path_output: Option<PathBuf>,
    },
    /// Lengths of a plane polyline in d and d'.
    Lengths {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_REFINE_TOL)]
        refine_tol: f64,
    },
}

fn parse_ball(s: &str) -> std::result::Result<BallSpec, String> {
    let (c, r) = s.split_once(',').ok_or("expected `center,radius`")?;
    let c = c.trim().parse().map_err(|_| format!("bad center `{c}`"))?;
    let r: f64 = r.trim().parse().map_err(|_| format!("bad radius `{r}`"))?;
    BallSpec::new(c, r).map_err(|e| e.to_string())
}

fn parse_scan(s: &str) -> std::result::Result<GridScan, String> {
    match s {
        "auto" => Ok(GridScan::Auto),
        "full" => Ok(GridScan::Full),
        "fixed-base" => Ok(GridScan::FixedBase),
        other => Err(format!("unknown scan `{other}`")),
    }
}

/// A failed run: the short kind printed as `error[kind]` and the exit code.
struct Failure {
    kind: &'static str,
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (kind, code) = match &e {
            Error::GuardExceeded { .. } => ("guard", 2),
            Error::Parse { .. } | Error::Csv(_) | Error::NotSquare { .. } | Error::NonFinite { .. } => ("parse", 1),
            Error::Io(_) => ("io", 1),
            Error::InvalidMetric(_) => ("metric", 1),
            _ => ("input", 1),
        };
        Failure {
            kind,
            code,
            msg: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Error::Io(e).into()
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        kind: "usage",
        code: 1,
        msg: msg.into(),
    }
}

type Run<T> = std::result::Result<T, Failure>;

fn load_space(g: &Global) -> Run<FiniteMetricSpace> {
    let space = match (&g.points, &g.matrix) {
        (Some(p), None) => FiniteMetricSpace::from_cloud(fmt_io::read_point_cloud(fmt_io::open(p)?)?.with_mode(g.metric)),
        (None, Some(m)) => fmt_io::read_matrix(fmt_io::open(m)?)?,
        _ => return Err(usage("this command needs --points or --matrix")),
    };
    Ok(if g.log { space.log_transform() } else { space })
}

fn load_region(space: &FiniteMetricSpace, args: &RegionArgs) -> Run<Region> {
    match (&args.region, args.ball1, args.ball2) {
        (Some(path), _, _) => Ok(fmt_io::read_region(fmt_io::open(path)?, space.len())?),
        (None, Some(b1), Some(b2)) => Ok(intersect_balls(space, b1, b2)?),
        _ => Err(usage("give --region or both --ball1 and --ball2")),
    }
}

fn opt<T: Into<Cell>>(v: Option<T>) -> Cell {
    v.into()
}

fn ecc_row(t: &mut Table, s: &Region, e: &EccReport) {
    t.push(vec![
        s.len().into(),
        e.ecc.into(),
        opt(e.inner.map(|b| b.center)),
        opt(e.inner.map(|b| b.radius)),
        opt(e.outer.map(|b| b.center)),
        opt(e.outer.map(|b| b.radius)),
    ])
    .expect("row matches header");
}

/// A result table, or a distance matrix written in the matrix input format
/// when the output is CSV.
enum Output {
    Table(Table),
    Matrix(FiniteMetricSpace),
}

fn run(cli: &Cli) -> Run<Output> {
    let g = &cli.global;
    let table = match &cli.command {
        Command::Validate => {
            let space = match (&g.points, &g.matrix) {
                (None, Some(m)) => fmt_io::read_raw_matrix(fmt_io::open(m)?)?,
                _ => load_space(g)?,
            };
            let space = if g.log && g.matrix.is_some() { space.log_transform() } else { space };
            let r = validate_metric(&space);
            let mut t = Table::new(["points", "valid", "pseudometric", "coincident_pairs", "violation"]);
            t.push(vec![
                space.len().into(),
                r.is_valid().into(),
                r.is_pseudometric().into(),
                r.coincident_pairs.into(),
                opt(r.violation.as_ref().map(|v| v.to_string())),
            ])
            .expect("row matches header");
            if let Some(v) = r.violation {
                emit(g, &Output::Table(t))?;
                return Err(Error::InvalidMetric(v).into());
            }
            t
        }
        Command::Transform => return Ok(Output::Matrix(load_space(g)?.log_transform())),
        Command::Delta { base, force } => {
            let space = load_space(g)?;
            let n = space.len();
            let r = match base {
                Some(p) => {
                    space.check_index(*p)?;
                    hyperbolicity::four_point_delta_fixed_base(&space, *p)
                }
                None if n > FULL_SCAN_CAP && !force => {
                    return Err(Error::GuardExceeded {
                        points: n,
                        cap: FULL_SCAN_CAP,
                    }
                    .into())
                }
                None => four_point_delta(&space),
            };
            let mut t = Table::new(["points", "method", "delta", "p", "x", "y", "z", "quadruples"]);
            let w = r.witness;
            t.push(vec![
                n.into(),
                if base.is_some() { "fixed-base" } else { "full" }.into(),
                r.delta.into(),
                opt(w.map(|w| w[0])),
                opt(w.map(|w| w[1])),
                opt(w.map(|w| w[2])),
                opt(w.map(|w| w[3])),
                Cell::Text(r.quadruples_scanned.to_string()),
            ])
            .expect("row matches header");
            t
        }
        Command::Ultra => {
            let space = load_space(g)?;
            let r = ultrametric_delta(&space);
            let w = r.witness;
            let mut t = Table::new(["points", "delta_u", "x", "y", "z"]);
            t.push(vec![
                space.len().into(),
                r.delta_u.into(),
                opt(w.map(|w| w[0])),
                opt(w.map(|w| w[1])),
                opt(w.map(|w| w[2])),
            ])
            .expect("row matches header");
            t
        }
        Command::Ecc(args) => {
            let space = load_space(g)?;
            let s = load_region(&space, args)?;
            let e = eccentricity(&space, &s)?;
            let mut t = Table::new(["region_points", "ecc", "inner_center", "inner_radius", "outer_center", "outer_radius"]);
            ecc_row(&mut t, &s, &e);
            t
        }
        Command::Quasiball(args) => {
            let space = load_space(g)?;
            let s = load_region(&space, args)?;
            let q = quasi_ball_defect(&space, &s)?;
            let mut t = Table::new(["region_points", "defect", "center", "radius"]);
            t.push(vec![s.len().into(), q.defect.into(), q.best.center.into(), q.best.radius.into()])
                .expect("row matches header");
            t
        }
        Command::Weakecc { region, lambda } => {
            let space = load_space(g)?;
            let s = load_region(&space, region)?;
            let w = weak_ecc_defect(&space, &s, *lambda)?;
            let mut t = Table::new(["region_points", "lambda", "weak_ecc"]);
            t.push(vec![s.len().into(), (*lambda).into(), w.into()])
                .expect("row matches header");
            t
        }
        Command::Lens { n_list, h, lambda } => lens_table(&ecc_growth_experiment(n_list, *h, *lambda)?),
        Command::Grid { sides, spacing, scan } => grid_table(&grid_experiment(sides, *spacing, *scan)?),
        Command::Lineultra { n } => {
            let rows = n
                .iter()
                .map(|&n| line_ultrametric_experiment(n))
                .collect::<Result<Vec<_>>>()?;
            line_table(&rows)
        }
        Command::Horizon { l, c } => {
            let p = QgParams::new(*l, *c)?;
            let k = p.tame_constants();
            let mut t = Table::new(["L", "C", "c_prime", "k1", "k2", "d_star"]);
            t.push(vec![(*l).into(), (*c).into(), k.c_prime.into(), k.k1.into(), k.k2.into(), horizon(p).into()])
                .expect("row matches header");
            t
        }
        Command::Tame {
            input,
            l,
            c,
            probe_spacing,
            tol,
            path_output,
        } => {
            let samples = fmt_io::read_path(fmt_io::open(input)?)?;
            let tamed = tame(&samples, QgParams::new(*l, *c)?, *probe_spacing, *tol)?;
            if let Some(p) = path_output {
                let mut w = BufWriter::new(File::create(p)?);
                fmt_io::write_path(&tamed.path, &mut w)?;
                w.flush()?;
            }
            let r = &tamed.report;
            let mut t = Table::new([
                "L",
                "C",
                "c_prime",
                "k1",
                "k2",
                "probe_spacing",
                "probes",
                "endpoints_preserved",
                "qg_defect",
                "qg_ok",
                "arc_excess",
                "arc_ok",
                "arc_excess_d",
                "hausdorff",
                "hausdorff_ok",
                "passed",
            ]);
            t.push(vec![
                (*l).into(),
                (*c).into(),
                r.constants.c_prime.into(),
                r.constants.k1.into(),
                r.constants.k2.into(),
                r.probe_spacing.into(),
                r.probes.into(),
                r.endpoints_preserved.into(),
                r.qg_defect.into(),
                r.qg_ok.into(),
                r.arc_excess.into(),
                r.arc_ok.into(),
                r.arc_excess_d.into(),
                r.hausdorff.into(),
                r.hausdorff_ok.into(),
                r.passed().into(),
            ])
            .expect("row matches header");
            t
        }
        Command::Lengths { input, refine_tol } => {
            if refine_tol.is_nan() || *refine_tol <= 0.0 {
                return Err(usage("--refine-tol must be positive"));
            }
            let path = fmt_io::read_path(fmt_io::open(input)?)?;
            let pts = path.points();
            let chord = cloud::euclidean(&pts[0], &pts[pts.len() - 1]);
            let mut t = Table::new(["segments", "length_d", "length_dprime", "chord_d", "chord_dprime"]);
            t.push(vec![
                (pts.len() - 1).into(),
                pl_length(&path, MetricMode::Euclidean, *refine_tol).into(),
                pl_length(&path, MetricMode::LogEuclidean, *refine_tol).into(),
                chord.into(),
                chord.ln_1p().into(),
            ])
            .expect("row matches header");
            t
        }
    };
    Ok(Output::Table(table))
}

fn matrix_table(space: &FiniteMetricSpace) -> Table {
    let n = space.len();
    let mut t = Table::new((0..n).map(|j| format!("p{j}")));
    for i in 0..n {
        t.push((0..n).map(|j| space.dist(i, j).into()).collect())
            .expect("row matches header");
    }
    t
}

fn write_output<W: Write>(g: &Global, output: &Output, out: W) -> Run<()> {
    match (output, g.format) {
        (Output::Table(t), f) => t.write(f, out)?,
        (Output::Matrix(m), Format::Csv) => fmt_io::write_matrix(m, out)?,
        (Output::Matrix(m), f) => matrix_table(m).write(f, out)?,
    }
    Ok(())
}

fn emit(g: &Global, output: &Output) -> Run<()> {
    let Some(path) = &g.output else {
        return write_output(g, output, io::stdout().lock());
    };
    let mut w = BufWriter::new(File::create(path)?);
    write_output(g, output, &mut w)?;
    w.flush()?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match output {
        Output::Table(table) => {
            for row in table.rows() {
                let fields: Vec<String> = table
                    .columns()
                    .iter()
                    .zip(row)
                    .map(|(c, v)| format!("{c}={v}"))
                    .collect();
                writeln!(out, "{}", fields.join(" "))?;
            }
        }
        Output::Matrix(m) => writeln!(out, "points={} written={}", m.len(), path.display())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let text = e.to_string();
            let line = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("error[usage]: {}", line.trim_start_matches("error: "));
            return ExitCode::from(1);
        }
    };
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.into()).build_global() {
            eprintln!("error[usage]: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli).and_then(|t| emit(&cli.global, &t)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error[{}]: {}", f.kind, f.msg.replace('\n', " "));
            ExitCode::from(f.code)
        }
    }
}
