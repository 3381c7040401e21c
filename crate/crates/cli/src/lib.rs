//! Command-line front end: scenario handling, the five commands and report
//! rendering. `main.rs` only forwards the process arguments to [`run`].

pub mod scenario;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use flexcurv::catalog::{format_domain, parse_domain, FlexSpec, ResolvedFlex, SurfaceSpec};
use flexcurv::flex::{sample_flex, triviality_score_of, FLEX_SAMPLES_PER_AXIS, FLEX_TOLERANCE};
use flexcurv::surface::total_gauss_curvature_of;
use flexcurv::variation::{fit_polynomial, invariant_sweep, variation_report, SweepRow};
use flexcurv::{
    check_flex, construct_flex_numeric, BoundaryQuadratureSpec, FdSpec, Grid, MongePatch,
    QuadratureSpec, VariationSpec,
};
use serde::Serialize;

pub use scenario::{Format, Scenario, ScenarioError};

/// Process exit codes.
pub mod exit {
    pub const PASS: u8 = 0;
    pub const DISAGREEMENT: u8 = 1;
    pub const VALIDATION: u8 = 2;
    pub const NUMERICAL: u8 = 3;
}

#[derive(Debug, Parser)]
#[command(
    name = "flexcurv",
    version,
    about = "Total mean curvature and its variation under infinitesimal flexes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Total mean curvature, area and pointwise curvature samples.
    Curvature,
    /// Residuals of the flex equations and their derivatives.
    FlexCheck,
    /// The variation of total mean curvature, three ways.
    Variation,
    /// Invariants of the deformed surface over a list of t values.
    Sweep,
    /// Build a nontrivial discrete flex from the grid nullspace.
    ConstructFlex,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Curvature => "curvature",
            Command::FlexCheck => "flex-check",
            Command::Variation => "variation",
            Command::Sweep => "sweep",
            Command::ConstructFlex => "construct-flex",
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// Scenario file, or a report whose embedded scenario should be re-run.
    #[arg(long, global = true, value_name = "PATH")]
    pub scenario: Option<PathBuf>,
    /// Catalog name (plane, paraboloid, saddle, cap-R-r, dome-R-r) or height expression.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub surface: Option<String>,
    /// square, rect:u0,u1,v0,v1 or disk:cu,cv,r.
    #[arg(long, global = true)]
    pub domain: Option<String>,
    /// xi,eta,zeta expressions, a catalog flex, terms joined by |, or construct:NUxNV.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub flex: Option<String>,
    /// Gauss nodes per axis for area integrals.
    #[arg(long, global = true)]
    pub nodes: Option<usize>,
    /// Gauss nodes along the boundary.
    #[arg(long, global = true)]
    pub boundary_nodes: Option<usize>,
    /// Finite-difference step in t.
    #[arg(long, global = true)]
    pub fd_step: Option<f64>,
    /// Use the plain central difference instead of one Richardson step.
    #[arg(long, global = true)]
    pub no_richardson: bool,
    /// Comma-separated t values for sweep.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub t_list: Option<String>,
    /// Grid for construct-flex and triviality scores, e.g. 12x12.
    #[arg(long, global = true)]
    pub grid: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Also evaluate the sign-flipped reduced boundary integrand.
    #[arg(long, global = true)]
    pub erratum_probe: bool,
    /// Write the report here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Sweep only: also write whitespace-separated columns for plotting.
    #[arg(long, global = true, value_name = "PATH")]
    pub data: Option<PathBuf>,
}

/// A failed run: exit code and message for standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn validation(message: impl Into<String>) -> Self {
        Failure {
            code: exit::VALIDATION,
            message: message.into(),
        }
    }
}

impl From<flexcurv::Error> for Failure {
    fn from(e: flexcurv::Error) -> Self {
        Failure {
            code: if e.is_numerical() {
                exit::NUMERICAL
            } else {
                exit::VALIDATION
            },
            message: e.to_string(),
        }
    }
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        Failure::validation(format!("scenario: {e}"))
    }
}

/// A rendered report and the exit code it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: u8,
    pub report: String,
    /// The report went to `--out` rather than standard output.
    pub written: bool,
}

/// Merge the scenario file (if any) with command-line overrides.
pub fn resolve_scenario(options: &Options) -> Result<Scenario, Failure> {
    let mut s = match &options.scenario {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::validation(format!("cannot read {}: {e}", path.display())))?;
            Scenario::load(&text)?
        }
        None => Scenario::default(),
    };
    if let Some(v) = &options.surface {
        s.surface = Some(v.clone());
    }
    if let Some(v) = &options.domain {
        s.domain = Some(v.clone());
    }
    if let Some(v) = &options.flex {
        s.flex = Some(v.clone());
    }
    if let Some(v) = options.nodes {
        s.nodes = v;
    }
    if let Some(v) = options.boundary_nodes {
        s.boundary_nodes = v;
    }
    if let Some(v) = options.fd_step {
        s.fd_step = v;
    }
    if options.no_richardson {
        s.richardson = false;
    }
    if let Some(v) = &options.t_list {
        s.t_list = Some(scenario::parse_t_list(v)?);
    }
    if let Some(v) = &options.grid {
        s.grid = scenario::parse_grid(v)?;
    }
    if options.erratum_probe {
        s.erratum_probe = true;
    }
    if let Some(v) = options.format {
        s.format = v;
    }
    Ok(s)
}

/// Validated inputs of a run.
struct Setup {
    scenario: Scenario,
    patch: MongePatch,
    spec: VariationSpec,
}

fn setup(mut scenario: Scenario) -> Result<Setup, Failure> {
    let surface_text = scenario
        .surface
        .clone()
        .ok_or_else(|| Failure::validation("scenario: field `surface` is required"))?;
    let surface = SurfaceSpec::parse(&surface_text)?;
    let domain = match &scenario.domain {
        Some(d) => parse_domain(d)?,
        None => surface.default_domain(),
    };
    scenario.domain = Some(format_domain(&domain));
    let patch = surface.patch(Some(domain));
    let spec = VariationSpec {
        quadrature: QuadratureSpec::new(scenario.nodes)?,
        boundary: BoundaryQuadratureSpec::new(scenario.boundary_nodes)?,
        fd: FdSpec::new(scenario.fd_step, scenario.richardson)?,
        erratum_probe: scenario.erratum_probe,
        ..VariationSpec::default()
    };
    Ok(Setup {
        scenario,
        patch,
        spec,
    })
}

fn flex_of(setup: &Setup) -> Result<ResolvedFlex, Failure> {
    let text = setup
        .scenario
        .flex
        .as_deref()
        .ok_or_else(|| Failure::validation("scenario: field `flex` is required"))?;
    Ok(FlexSpec::parse(text)?.resolve(&setup.patch)?)
}

/// Parse arguments and run; errors are already mapped to exit codes.
pub fn execute<I, T>(args: I) -> Result<Outcome, Failure>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Failure {
        code: if e.use_stderr() {
            exit::VALIDATION
        } else {
            exit::PASS
        },
        message: e.to_string(),
    })?;
    let scenario = resolve_scenario(&cli.options)?;
    let mut outcome = run_command(cli.command, scenario, cli.options.data.as_ref())?;
    if let Some(path) = &cli.options.out {
        outcome.written = true;
        std::fs::write(path, &outcome.report)
            .map_err(|e| Failure::validation(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(outcome)
}

/// Run one command on a resolved scenario.
pub fn run_command(
    command: Command,
    scenario: Scenario,
    data: Option<&PathBuf>,
) -> Result<Outcome, Failure> {
    let setup = setup(scenario)?;
    match command {
        Command::Curvature => curvature(&setup),
        Command::FlexCheck => flex_check(&setup),
        Command::Variation => variation(&setup),
        Command::Sweep => sweep(&setup, data),
        Command::ConstructFlex => construct(&setup),
    }
}

/// Entry point for the binary: prints the report or the error message and
/// returns the exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match execute(args) {
        Ok(o) => {
            if !o.written {
                print!("{}", o.report);
            }
            o.code
        }
        // --help and --version arrive here with code 0
        Err(f) if f.code == exit::PASS => {
            print!("{}", f.message);
            f.code
        }
        Err(f) => {
            eprintln!("flexcurv: {}", f.message.trim_end());
            f.code
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    command: &'static str,
    scenario: String,
    pass: bool,
    result: &'a T,
}

fn render<T: Serialize>(
    command: Command,
    setup: &Setup,
    pass: bool,
    result: &T,
    csv_rows: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> Result<(), csv::Error>,
    text: impl FnOnce(&mut String),
) -> Result<String, Failure> {
    let scenario = setup.scenario.to_text();
    let embedded: String = scenario.lines().map(|l| format!("#! {l}\n")).collect();
    match setup.scenario.format {
        Format::Json => {
            let env = Envelope {
                command: command.name(),
                scenario,
                pass,
                result,
            };
            let mut s = serde_json::to_string_pretty(&env)
                .map_err(|e| Failure::validation(format!("cannot serialize report: {e}")))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            csv_rows(&mut w).map_err(|e| Failure::validation(format!("cannot write CSV: {e}")))?;
            let body = w
                .into_inner()
                .map_err(|e| Failure::validation(format!("cannot write CSV: {e}")))?;
            Ok(format!("{embedded}{}", String::from_utf8_lossy(&body)))
        }
        Format::Text => {
            let mut out = format!("{}\n", command.name());
            text(&mut out);
            let _ = writeln!(out, "{}", if pass { "PASS" } else { "FAIL" });
            out.push_str(&embedded);
            Ok(out)
        }
    }
}

#[derive(Serialize)]
struct CurvatureSample {
    u: f64,
    v: f64,
    mean_curvature: f64,
    k1: f64,
    k2: f64,
}

#[derive(Serialize)]
struct CurvatureResult {
    total_mean_curvature: f64,
    area: f64,
    total_gauss_curvature: f64,
    samples: Vec<CurvatureSample>,
}

fn curvature(setup: &Setup) -> Result<Outcome, Failure> {
    let p = &setup.patch;
    let q = &setup.spec.quadrature;
    let mut samples = Vec::new();
    for (u, v) in p.domain.sample_points(5) {
        let (k1, k2) = p.principal_curvatures(u, v)?;
        samples.push(CurvatureSample {
            u,
            v,
            mean_curvature: p.mean_curvature(u, v)?,
            k1,
            k2,
        });
    }
    let r = CurvatureResult {
        total_mean_curvature: p.total_mean_curvature(q)?,
        area: p.area(q)?,
        total_gauss_curvature: total_gauss_curvature_of(p, q)?,
        samples,
    };
    let report = render(
        Command::Curvature,
        setup,
        true,
        &r,
        |w| {
            w.write_record(["u", "v", "mean_curvature", "k1", "k2"])?;
            for s in &r.samples {
                w.serialize((s.u, s.v, s.mean_curvature, s.k1, s.k2))?;
            }
            Ok(())
        },
        |out| {
            let _ = writeln!(
                out,
                "  total_mean_curvature  {:.15e}",
                r.total_mean_curvature
            );
            let _ = writeln!(out, "  area                  {:.15e}", r.area);
            let _ = writeln!(
                out,
                "  total_gauss_curvature {:.15e}",
                r.total_gauss_curvature
            );
        },
    )?;
    Ok(Outcome {
        code: exit::PASS,
        report,
        written: false,
    })
}

#[derive(Serialize)]
struct FlexCheckResult {
    first_order: f64,
    first_order_at: (f64, f64),
    second_order: f64,
    second_order_at: (f64, f64),
    samples: usize,
    tolerance: f64,
    /// Absent on disk domains, where no grid is laid down.
    triviality_score: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual_norm: Option<f64>,
}

fn triviality_on_grid(setup: &Setup, resolved: &ResolvedFlex) -> Result<Option<f64>, Failure> {
    if let Some(d) = &resolved.discrete {
        return Ok(Some(d.triviality_score));
    }
    let (nu, nv) = setup.scenario.grid;
    let grid = match Grid::new(setup.patch.domain, nu, nv) {
        Ok(g) => g,
        Err(_) => return Ok(None),
    };
    let values = sample_flex(&resolved.field, &grid)?;
    if values.iter().flatten().all(|x| *x == 0.0) {
        return Ok(None);
    }
    Ok(Some(triviality_score_of(&setup.patch, &grid, &values)?))
}

fn flex_check(setup: &Setup) -> Result<Outcome, Failure> {
    let resolved = flex_of(setup)?;
    let c = check_flex(&setup.patch, &resolved.field, FLEX_SAMPLES_PER_AXIS)?;
    let pass = c.passes(FLEX_TOLERANCE);
    let r = FlexCheckResult {
        first_order: c.first_order,
        first_order_at: c.first_order_at,
        second_order: c.second_order,
        second_order_at: c.second_order_at,
        samples: c.samples,
        tolerance: FLEX_TOLERANCE,
        triviality_score: triviality_on_grid(setup, &resolved)?,
        residual_norm: resolved.discrete.as_ref().map(|d| d.residual_norm),
    };
    let report = render(
        Command::FlexCheck,
        setup,
        pass,
        &r,
        |w| {
            w.write_record([
                "first_order",
                "second_order",
                "samples",
                "triviality_score",
                "pass",
            ])?;
            w.serialize((
                r.first_order,
                r.second_order,
                r.samples,
                r.triviality_score,
                pass,
            ))
        },
        |out| {
            let _ = writeln!(
                out,
                "  first_order   {:.3e} at ({}, {})",
                r.first_order, r.first_order_at.0, r.first_order_at.1
            );
            let _ = writeln!(
                out,
                "  second_order  {:.3e} at ({}, {})",
                r.second_order, r.second_order_at.0, r.second_order_at.1
            );
            if let Some(t) = r.triviality_score {
                let _ = writeln!(out, "  triviality    {t:.6}");
            }
        },
    )?;
    Ok(Outcome {
        code: if pass { exit::PASS } else { exit::DISAGREEMENT },
        report,
        written: false,
    })
}

#[derive(Serialize)]
struct VariationCsv {
    h_surface: f64,
    h_line: f64,
    h_fd: f64,
    disc_sl: f64,
    disc_sf: f64,
    disc_lf: f64,
    pass: bool,
    h_line_printed: Option<f64>,
    disc_printed_fd: Option<f64>,
}

fn variation(setup: &Setup) -> Result<Outcome, Failure> {
    let resolved = flex_of(setup)?;
    let r = variation_report(&setup.patch, &resolved.field, &setup.spec)?;
    let report = render(
        Command::Variation,
        setup,
        r.pass,
        &r,
        |w| {
            w.serialize(VariationCsv {
                h_surface: r.h_surface,
                h_line: r.h_line,
                h_fd: r.h_fd,
                disc_sl: r.disc_sl,
                disc_sf: r.disc_sf,
                disc_lf: r.disc_lf,
                pass: r.pass,
                h_line_printed: r.erratum.map(|e| e.h_line_printed),
                disc_printed_fd: r.erratum.map(|e| e.disc_printed_fd),
            })
        },
        |out| {
            for (k, v) in [
                ("h_surface", r.h_surface),
                ("h_line", r.h_line),
                ("h_fd", r.h_fd),
                ("disc_sl", r.disc_sl),
                ("disc_sf", r.disc_sf),
                ("disc_lf", r.disc_lf),
            ] {
                let _ = writeln!(out, "  {k:<15} {v:.15e}");
            }
            if let Some(e) = r.erratum {
                let _ = writeln!(out, "  {:<15} {:.15e}", "h_line_printed", e.h_line_printed);
                let _ = writeln!(
                    out,
                    "  {:<15} {:.15e}",
                    "disc_printed_fd", e.disc_printed_fd
                );
            }
            let _ = writeln!(
                out,
                "  tolerances      analytic {:e}, finite difference {:e}",
                r.tol_analytic, r.tol_fd
            );
        },
    )?;
    Ok(Outcome {
        code: if r.pass {
            exit::PASS
        } else {
            exit::DISAGREEMENT
        },
        report,
        written: false,
    })
}

#[derive(Serialize)]
struct SweepResult {
    rows: Vec<SweepRow>,
    /// Linear coefficient of a least-squares polynomial fit of total mean
    /// curvature in t (degree min(3, rows − 1)), over rows without error.
    fitted_slope: Option<f64>,
    fit_degree: Option<usize>,
}

fn sweep(setup: &Setup, data: Option<&PathBuf>) -> Result<Outcome, Failure> {
    let ts = setup
        .scenario
        .t_list
        .clone()
        .ok_or_else(|| Failure::validation("scenario: field `t_list` is required for sweep"))?;
    if ts.is_empty() {
        return Err(Failure::validation("scenario: field `t_list` is empty"));
    }
    if ts.iter().any(|t| !t.is_finite()) {
        return Err(Failure::validation(
            "scenario: field `t_list` has a non-finite value",
        ));
    }
    let resolved = flex_of(setup)?;
    flexcurv::flex::require_flex(&setup.patch, &resolved.field, FLEX_TOLERANCE)?;
    let rows = invariant_sweep(&setup.patch, &resolved.field, &ts, &setup.spec.quadrature);
    let good: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.total_mean_curvature.map(|h| (r.t, h)))
        .collect();
    let (fitted_slope, fit_degree) = if good.len() >= 2 {
        let degree = (good.len() - 1).min(3);
        let (x, y): (Vec<f64>, Vec<f64>) = good.iter().copied().unzip();
        (Some(fit_polynomial(&x, &y, degree)?[1]), Some(degree))
    } else {
        (None, None)
    };
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    let r = SweepResult {
        rows,
        fitted_slope,
        fit_degree,
    };
    if let Some(path) = data {
        let mut out = String::from("# t total_mean_curvature area volume total_gauss_curvature\n");
        for row in &r.rows {
            let f = |x: Option<f64>| x.map_or("nan".to_string(), |x| format!("{x:.17e}"));
            let _ = writeln!(
                out,
                "{:e} {} {} {} {}",
                row.t,
                f(row.total_mean_curvature),
                f(row.area),
                f(row.volume),
                f(row.total_gauss_curvature)
            );
        }
        std::fs::write(path, out)
            .map_err(|e| Failure::validation(format!("cannot write {}: {e}", path.display())))?;
    }
    let report = render(
        Command::Sweep,
        setup,
        failed == 0,
        &r,
        |w| {
            w.write_record([
                "t",
                "total_mean_curvature",
                "area",
                "volume",
                "total_gauss_curvature",
                "error",
            ])?;
            for row in &r.rows {
                w.serialize((
                    row.t,
                    row.total_mean_curvature,
                    row.area,
                    row.volume,
                    row.total_gauss_curvature,
                    row.error.as_deref().unwrap_or(""),
                ))?;
            }
            Ok(())
        },
        |out| {
            let _ = writeln!(
                out,
                "  {:>12} {:>22} {:>22}",
                "t", "total_mean_curvature", "area"
            );
            for row in &r.rows {
                match (&row.error, row.total_mean_curvature, row.area) {
                    (None, Some(h), Some(a)) => {
                        let _ = writeln!(out, "  {:>12e} {h:>22.15e} {a:>22.15e}", row.t);
                    }
                    (e, ..) => {
                        let _ = writeln!(out, "  {:>12e} {}", row.t, e.as_deref().unwrap_or("?"));
                    }
                }
            }
            if let Some(s) = r.fitted_slope {
                let _ = writeln!(out, "  fitted slope {s:.9}");
            }
        },
    )?;
    // rows that could not be evaluated are reported, then signalled
    Ok(Outcome {
        code: if failed == 0 {
            exit::PASS
        } else {
            exit::NUMERICAL
        },
        report,
        written: false,
    })
}

fn construct(setup: &Setup) -> Result<Outcome, Failure> {
    let (nu, nv) = match setup.scenario.flex.as_deref().map(FlexSpec::parse) {
        Some(Ok(FlexSpec {
            kind: flexcurv::catalog::FlexKind::Construct { n_u, n_v },
            ..
        })) => (n_u, n_v),
        Some(Err(e)) => return Err(e.into()),
        Some(Ok(_)) => {
            return Err(Failure::validation(
                "scenario: field `flex` must be construct:NUxNV (or absent) for construct-flex",
            ))
        }
        None => setup.scenario.grid,
    };
    let d = construct_flex_numeric(&setup.patch, nu, nv)?;
    // the same document `DiscreteFlex::from_json` reads back
    let r: serde_json::Value = serde_json::from_str(&d.to_json()?)
        .map_err(|e| Failure::validation(format!("cannot serialize flex: {e}")))?;
    let report = render(
        Command::ConstructFlex,
        setup,
        true,
        &r,
        |w| {
            w.write_record(["u", "v", "xi", "eta", "zeta"])?;
            for ((u, v), x) in d.grid.nodes().zip(&d.values) {
                w.serialize((u, v, x[0], x[1], x[2]))?;
            }
            Ok(())
        },
        |out| {
            let _ = writeln!(out, "  grid            {nu}x{nv}");
            let _ = writeln!(out, "  kernel_dim      {}", d.kernel_dim);
            let _ = writeln!(out, "  rank            {}", d.rank);
            let _ = writeln!(out, "  residual_norm   {:.3e}", d.residual_norm);
            let _ = writeln!(out, "  triviality      {:.6}", d.triviality_score);
            let _ = writeln!(out, "  outcome         {:?}", d.outcome);
        },
    )?;
    Ok(Outcome {
        code: exit::PASS,
        report,
        written: false,
    })
}
