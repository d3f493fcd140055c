//! Command-line front end: loads configuration files, dispatches
//! subcommands, and emits CSV or structured text.
//!
//! Exit codes: 0 on success, 1 when a requested check fails, 2 on usage,
//! configuration, or expression errors. Outputs are byte-identical for
//! identical inputs and seed, whatever the thread count.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex;

use localmath::calculus::{scaled_derivative, scaled_integral, transported_difference_quotient};
use localmath::config;
use localmath::dirac::{gauge_transform, lagrangian_density, GammaSet, GaugeConfig};
use localmath::expr::ComplexExpr;
use localmath::field::{check_local_restriction, Axis, MetricTag, COORD_VARS};
use localmath::geometry::{path_length, solve_geodesic};
use localmath::natural_value_table;
use localmath::selftest::{run_all, SelftestOptions};
use localmath::Point;

#[derive(Parser)]
#[command(
    name = "localmath",
    version,
    about = "Scaled number structures and the calculus they induce",
    propagate_version = true
)]
struct RunConfig {
    /// Worker threads for grid sweeps (0 = library default); the
    /// LOCALMATH_THREADS environment variable is the fallback. The thread
    /// count never changes any output byte.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the values a natural number takes across the scaled copies of
    /// the naturals, one CSV row per divisor.
    #[command(after_help = "EXAMPLES:\n    localmath value-table 30")]
    ValueTable {
        /// Natural number to tabulate; must be at least 1.
        n: u64,
    },

    /// Integrate a section over the grid from the field file and report the
    /// result in the structure at a reference point.
    #[command(after_help = "EXAMPLES:\n    localmath integrate --field field.toml \
                            --psi \"sin(y1)\" --ref \"0,0,0,0\"")]
    Integrate {
        /// Field file: the exponent expression plus the grid.
        #[arg(long, value_name = "FILE")]
        field: PathBuf,
        /// Real part of the section, in the expression grammar.
        #[arg(long, value_name = "EXPR")]
        psi: String,
        /// Imaginary part of the section.
        #[arg(long, value_name = "EXPR", default_value = "0")]
        psi_im: String,
        /// Reference point "y0,y1,y2,y3" whose structure holds the result.
        #[arg(long = "ref", value_name = "POINT")]
        reference: String,
    },

    /// Compare the exact scaled derivative against transported difference
    /// quotients and print the table as CSV.
    #[command(after_help = "EXAMPLES:\n    localmath derivative-check --field field.toml \
                            --psi \"cos(y0) + y1*y2\" --point \"0.3,-0.4,0.7,0.2\"")]
    DerivativeCheck {
        /// Field file: the exponent expression plus the grid.
        #[arg(long, value_name = "FILE")]
        field: PathBuf,
        /// Real part of the section, in the expression grammar.
        #[arg(long, value_name = "EXPR")]
        psi: String,
        /// Imaginary part of the section.
        #[arg(long, value_name = "EXPR", default_value = "0")]
        psi_im: String,
        /// Evaluation point "y0,y1,y2,y3".
        #[arg(long, value_name = "POINT")]
        point: String,
        /// Comma-separated step sizes for the quotients.
        #[arg(long, value_name = "LIST", default_value = "1e-2,1e-3,1e-4")]
        hs: String,
    },

    /// Evaluate the Lagrangian density on the grid from the field file and
    /// emit per-site CSV; optionally verify gauge invariance.
    #[command(after_help = "EXAMPLES:\n    localmath lagrangian --field field.toml \
                            --psi spinor.toml --gauge gauge.toml --out density.csv")]
    Lagrangian {
        /// Field file: the exponent expression plus the grid.
        #[arg(long, value_name = "FILE")]
        field: PathBuf,
        /// Spinor file: four expression components.
        #[arg(long, value_name = "FILE")]
        psi: PathBuf,
        /// Gauge file: couplings, mass, conjugation convention, B field.
        #[arg(long, value_name = "FILE")]
        gauge: PathBuf,
        /// Output CSV path; stdout when omitted.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Phase file with a gauge function; prints the largest density
        /// change under the induced transformation instead of failing
        /// silently somewhere downstream.
        #[arg(long, value_name = "FILE")]
        gauge_check: Option<PathBuf>,
    },

    /// Integrate the geodesic equation from a start point and velocity and
    /// emit the trajectory as CSV.
    #[command(after_help = "EXAMPLES:\n    localmath geodesic --field field.toml \
                            --start \"0,0,0,0\" --velocity \"1,0.3,0,0\" --tau 1 --steps 1000")]
    Geodesic {
        /// Field file; the grid part is ignored here.
        #[arg(long, value_name = "FILE")]
        field: PathBuf,
        /// Start point "y0,y1,y2,y3".
        #[arg(long, value_name = "POINT")]
        start: String,
        /// Initial velocity "v0,v1,v2,v3".
        #[arg(long, value_name = "VECTOR")]
        velocity: String,
        /// Parameter span to integrate over.
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        /// Number of fixed-size integration steps.
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        /// Metric signature for raising indices.
        #[arg(long, value_enum, default_value_t = MetricArg::Minkowski)]
        metric: MetricArg,
        /// Output CSV path; stdout when omitted.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },

    /// Measure the scaled length of a path and report it in the structure
    /// at a reference point.
    #[command(after_help = "EXAMPLES:\n    localmath path-length --field field.toml \
                            --path path.toml --ref \"0,0,0,0\"")]
    PathLength {
        /// Field file; the grid part is ignored here.
        #[arg(long, value_name = "FILE")]
        field: PathBuf,
        /// Path file: analytic components or polyline knots.
        #[arg(long, value_name = "FILE")]
        path: PathBuf,
        /// Reference point "y0,y1,y2,y3" whose structure holds the result.
        #[arg(long = "ref", value_name = "POINT")]
        reference: String,
        /// Metric signature for segment lengths.
        #[arg(long, value_enum, default_value_t = MetricArg::Minkowski)]
        metric: MetricArg,
        /// Quadrature subdivisions along the parameter.
        #[arg(long, default_value_t = 10_000)]
        resolution: usize,
    },

    /// Check how far the field strays from local flatness on its grid;
    /// exits 1 when the deviation exceeds epsilon.
    #[command(after_help = "EXAMPLES:\n    localmath restrict-check --field field.toml \
                            --epsilon 1e-9")]
    RestrictCheck {
        /// Field file: the exponent expression plus the grid.
        #[arg(long, value_name = "FILE")]
        field: PathBuf,
        /// Largest acceptable gradient norm.
        #[arg(long)]
        epsilon: f64,
    },

    /// Run the full acceptance suite and print one verdict per line; exits
    /// 1 when any check fails.
    #[command(after_help = "EXAMPLES:\n    localmath selftest --seed 7")]
    Selftest {
        /// Seed for the randomized checks; verdicts do not depend on it.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print per-check wall-clock times (off keeps output byte-stable).
        #[arg(long)]
        timings: bool,
        /// Corrupt one gamma-matrix entry so the algebra check must fail.
        #[arg(long, hide = true)]
        inject_gamma_fault: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Minkowski,
    Euclidean,
}

impl From<MetricArg> for MetricTag {
    fn from(arg: MetricArg) -> Self {
        match arg {
            MetricArg::Minkowski => MetricTag::Minkowski,
            MetricArg::Euclidean => MetricTag::Euclidean,
        }
    }
}

fn main() -> ExitCode {
    let cfg = RunConfig::parse();
    match run(cfg) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn run(cfg: RunConfig) -> Result<ExitCode> {
    if let Some(n) = thread_count(cfg.threads)? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| anyhow!("initializing the thread pool: {e}"))?;
    }
    match cfg.command {
        Command::ValueTable { n } => value_table(n),
        Command::Integrate {
            field,
            psi,
            psi_im,
            reference,
        } => integrate(&field, &psi, &psi_im, &reference),
        Command::DerivativeCheck {
            field,
            psi,
            psi_im,
            point,
            hs,
        } => derivative_check(&field, &psi, &psi_im, &point, &hs),
        Command::Lagrangian {
            field,
            psi,
            gauge,
            out,
            gauge_check,
        } => lagrangian(&field, &psi, &gauge, out.as_deref(), gauge_check.as_deref()),
        Command::Geodesic {
            field,
            start,
            velocity,
            tau,
            steps,
            metric,
            out,
        } => geodesic(&field, &start, &velocity, tau, steps, metric.into(), out.as_deref()),
        Command::PathLength {
            field,
            path,
            reference,
            metric,
            resolution,
        } => length_of_path(&field, &path, &reference, metric.into(), resolution),
        Command::RestrictCheck { field, epsilon } => restrict_check(&field, epsilon),
        Command::Selftest {
            seed,
            timings,
            inject_gamma_fault,
        } => selftest(seed, timings, inject_gamma_fault),
    }
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("LOCALMATH_THREADS") {
        Ok(raw) => {
            let n = raw
                .trim()
                .parse::<usize>()
                .map_err(|_| anyhow!("LOCALMATH_THREADS must be a thread count, got `{raw}`"))?;
            Ok(Some(n))
        }
        Err(_) => Ok(None),
    }
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn value_table(n: u64) -> Result<ExitCode> {
    if n == 0 {
        bail!("0 has value 0 in every scaled subset; the table needs n >= 1");
    }
    let mut text = String::from("value,subset\n");
    for row in natural_value_table(n)? {
        writeln!(text, "{},{}", row.value, row.subset_index)?;
    }
    write_stdout(&text)?;
    Ok(ExitCode::SUCCESS)
}

fn integrate(field: &std::path::Path, psi: &str, psi_im: &str, reference: &str) -> Result<ExitCode> {
    let (spec, grid) = config::load_field(field)?;
    let section = parse_section(psi, psi_im)?;
    let x = parse_point(reference, "--ref")?;

    let fine = scaled_integral(&spec, &section, &grid, &x)?;
    let coarse = scaled_integral(&spec, &section, &grid.coarsened(), &x)?;
    // Midpoint sums converge at second order, so the Richardson gap
    // overestimates the fine-grid error by roughly a factor of three.
    let estimated = (fine.value() - coarse.value()).norm() / 3.0;

    let mut text = String::new();
    writeln!(text, "value: {}", fmt_complex(fine.value()))?;
    writeln!(text, "scale: {}", fine.tag().scale().re)?;
    writeln!(text, "spacing: {}", spacing_summary(&grid))?;
    writeln!(text, "estimated error: {estimated:e}")?;
    write_stdout(&text)?;
    Ok(ExitCode::SUCCESS)
}

fn derivative_check(
    field: &std::path::Path,
    psi: &str,
    psi_im: &str,
    point: &str,
    hs: &str,
) -> Result<ExitCode> {
    let (spec, _) = config::load_field(field)?;
    let section = parse_section(psi, psi_im)?;
    let y = parse_point(point, "--point")?;
    let steps = parse_list(hs, "--hs")?;
    if steps.is_empty() {
        bail!("--hs needs at least one step size");
    }
    for &h in &steps {
        if !(h > 0.0) || !h.is_finite() {
            bail!("--hs entries must be positive, got {h}");
        }
    }

    let mut text = String::from("mu,h,quotient_re,quotient_im,derivative_re,derivative_im,abs_err\n");
    for mu in Axis::ALL {
        let exact = scaled_derivative(&spec, &section, &y, mu).value;
        for &h in &steps {
            let quotient = transported_difference_quotient(&spec, &section, &y, mu, h);
            writeln!(
                text,
                "{},{},{},{},{},{},{:e}",
                mu.label(),
                h,
                quotient.re,
                quotient.im,
                exact.re,
                exact.im,
                (quotient - exact).norm()
            )?;
        }
    }
    write_stdout(&text)?;
    Ok(ExitCode::SUCCESS)
}

fn lagrangian(
    field: &std::path::Path,
    psi: &std::path::Path,
    gauge: &std::path::Path,
    out: Option<&std::path::Path>,
    gauge_check: Option<&std::path::Path>,
) -> Result<ExitCode> {
    let (spec, grid) = config::load_field(field)?;
    let spinor = config::load_spinor(psi)?;
    let gauge = config::load_gauge(gauge)?;
    let gammas = GammaSet::dirac();

    let mut text = String::from("y0,y1,y2,y3,re_L,im_L\n");
    for site in grid.sample_points() {
        let density = lagrangian_density(&spec, &gauge, &gammas, &spinor, &site);
        let c = site.coords();
        writeln!(
            text,
            "{},{},{},{},{},{}",
            c[0], c[1], c[2], c[3], density.value.re, density.value.im
        )?;
    }
    emit(out, &text)?;

    if let Some(theta_path) = gauge_check {
        let theta = config::load_theta(theta_path)?;
        let (rotated, moved_b) = gauge_transform(&spinor, &gauge, &theta)?;
        let gauge2 = GaugeConfig {
            b_field: moved_b,
            ..gauge.clone()
        };
        let mut max_delta = 0.0f64;
        for site in grid.sample_points() {
            let before = lagrangian_density(&spec, &gauge, &gammas, &spinor, &site);
            let after = lagrangian_density(&spec, &gauge2, &gammas, &rotated, &site);
            max_delta = max_delta.max((after.value - before.value).norm());
        }
        write_stdout(&format!("max |delta L| = {max_delta:e}\n"))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn geodesic(
    field: &std::path::Path,
    start: &str,
    velocity: &str,
    tau: f64,
    steps: usize,
    metric: MetricTag,
    out: Option<&std::path::Path>,
) -> Result<ExitCode> {
    let (spec, _) = config::load_field(field)?;
    let y0 = parse_point(start, "--start")?;
    let v0 = parse_quad(velocity, "--velocity")?;

    let trajectory = solve_geodesic(&spec, &y0, v0, tau, steps, metric)?;
    let mut text = String::from("tau,p0,p1,p2,p3,v0,v1,v2,v3\n");
    for ((t, p), v) in trajectory
        .tau
        .iter()
        .zip(&trajectory.positions)
        .zip(&trajectory.velocities)
    {
        let c = p.coords();
        writeln!(
            text,
            "{},{},{},{},{},{},{},{},{}",
            t, c[0], c[1], c[2], c[3], v[0], v[1], v[2], v[3]
        )?;
    }
    emit(out, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn length_of_path(
    field: &std::path::Path,
    path: &std::path::Path,
    reference: &str,
    metric: MetricTag,
    resolution: usize,
) -> Result<ExitCode> {
    let (spec, _) = config::load_field(field)?;
    let route = config::load_path(path)?;
    let x = parse_point(reference, "--ref")?;

    let length = path_length(&spec, &route, &x, metric, resolution)?;
    let mut text = String::new();
    writeln!(text, "length: {}", length.value())?;
    writeln!(text, "scale: {}", length.tag().scale())?;
    writeln!(text, "resolution: {resolution}")?;
    write_stdout(&text)?;
    Ok(ExitCode::SUCCESS)
}

fn restrict_check(field: &std::path::Path, epsilon: f64) -> Result<ExitCode> {
    let (spec, grid) = config::load_field(field)?;
    let report = check_local_restriction(&spec, &grid, epsilon)?;
    let mut text = String::new();
    writeln!(text, "max |A| = {} at {}", report.max_norm, report.argmax)?;
    writeln!(text, "epsilon = {}", report.epsilon)?;
    writeln!(text, "{}", if report.pass { "PASS" } else { "FAIL" })?;
    write_stdout(&text)?;
    Ok(if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn selftest(seed: u64, timings: bool, inject_gamma_fault: bool) -> Result<ExitCode> {
    let opts = SelftestOptions {
        seed,
        inject_gamma_fault,
    };
    let results = run_all(&opts);
    let mut text = String::new();
    let mut failed = 0usize;
    for check in &results {
        let verdict = if check.passed { "PASS" } else { "FAIL" };
        if timings {
            writeln!(
                text,
                "[{verdict}] {}: {} ({:.2} s)",
                check.name, check.detail, check.seconds
            )?;
        } else {
            writeln!(text, "[{verdict}] {}: {}", check.name, check.detail)?;
        }
        if !check.passed {
            failed += 1;
        }
    }
    if failed == 0 {
        writeln!(text, "all {} checks passed", results.len())?;
    } else {
        writeln!(text, "{failed} of {} checks failed", results.len())?;
    }
    write_stdout(&text)?;
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

fn parse_section(re: &str, im: &str) -> Result<ComplexExpr<f64>> {
    ComplexExpr::parse(re, im, &COORD_VARS).map_err(|e| anyhow!("--psi: {e}"))
}

fn parse_quad(raw: &str, arg: &str) -> Result<[f64; 4]> {
    let parts: Vec<&str> = raw.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        bail!("{arg} needs four comma-separated numbers, got `{raw}`");
    }
    let mut quad = [0.0f64; 4];
    for (slot, part) in quad.iter_mut().zip(&parts) {
        *slot = part
            .parse()
            .map_err(|_| anyhow!("{arg}: `{part}` is not a number"))?;
    }
    Ok(quad)
}

fn parse_point(raw: &str, arg: &str) -> Result<Point<f64>> {
    Ok(Point::new(parse_quad(raw, arg)?)?)
}

fn parse_list(raw: &str, arg: &str) -> Result<Vec<f64>> {
    raw.split(',')
        .map(str::trim)
        .filter(|part| !part.is_empty())
        .map(|part| {
            part.parse()
                .map_err(|_| anyhow!("{arg}: `{part}` is not a number"))
        })
        .collect()
}

fn spacing_summary(grid: &localmath::Grid<f64>) -> String {
    let mut parts = Vec::new();
    for axis in Axis::ALL {
        if grid.is_integrated(axis) {
            parts.push(format!("{} {}", axis.label(), grid.spacing(axis)));
        }
    }
    if parts.is_empty() {
        "all axes pinned".into()
    } else {
        parts.join(", ")
    }
}

fn fmt_complex(z: Complex<f64>) -> String {
    if z.im.is_sign_negative() {
        format!("{} - {}i", z.re, -z.im)
    } else {
        format!("{} + {}i", z.re, z.im)
    }
}

fn emit(out: Option<&std::path::Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| anyhow!("writing {}: {e}", path.display())),
        None => write_stdout(text),
    }
}

/// Writes to stdout, treating a closed pipe as a normal early stop instead
/// of a panic or an error.
fn write_stdout(text: &str) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => other.map_err(|e| anyhow!("writing to stdout: {e}")),
    }
}
