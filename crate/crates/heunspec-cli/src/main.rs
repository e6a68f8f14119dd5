//! Command-line front end: preset mass tables, energy levels, parameter
//! scans, thermodynamic tables, and the validation/audit report, all as
//! deterministic CSV.
//!
//! Exit codes: 0 success, 1 failed self-check, 2 invalid input,
//! 3 numerical non-convergence.

mod config;
mod output;

use clap::{Args, Parser, Subcommand};
use config::ParamSet;
use heunspec::model::Species;
use heunspec::oracle::{validate_quasi_exact, OracleReport, RadialGrid};
use heunspec::spectrum::{self, reference, ScanAxis};
use heunspec::thermo::{self, AuditEntry, ExactOptions, Ladder, Method, ThermoPoint};
use output::{sci, Csv};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "heunspec",
    about = "Quasi-exact spectra and thermodynamics of the Cornell-plus-harmonic potential in magnetic and AB flux fields",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct Common {
    /// Base parameter preset (charmonium or bottomonium).
    #[arg(long, default_value = "charmonium")]
    preset: String,
    /// `key = value` parameter file; flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Reduced mass (GeV).
    #[arg(long)]
    mu: Option<f64>,
    /// Quadratic potential strength.
    #[arg(long)]
    a: Option<f64>,
    /// Linear potential strength.
    #[arg(long)]
    b: Option<f64>,
    /// Coulomb strength.
    #[arg(long)]
    g: Option<f64>,
    /// Magnetic field (natural units).
    #[arg(long = "B")]
    b_field: Option<f64>,
    /// Aharonov-Bohm flux ratio.
    #[arg(long, allow_negative_numbers = true)]
    nu: Option<f64>,
    /// Principal quantum number (>= 1).
    #[arg(long)]
    n: Option<u32>,
    /// Magnetic quantum number.
    #[arg(long, allow_negative_numbers = true)]
    m: Option<i32>,
    /// Constituent quark mass (GeV).
    #[arg(long)]
    quark_mass: Option<f64>,
    /// Output path (standard output when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn params(&self) -> Result<ParamSet, CliFailure> {
        let species: Species =
            self.preset.parse().map_err(|e: heunspec::Error| invalid(e.to_string()))?;
        let mut set = ParamSet::defaults(species);
        if let Some(path) = &self.config {
            config::apply_file(&mut set, path).map_err(|e| invalid(e.to_string()))?;
        }
        if let Some(x) = self.mu {
            set.mu = x;
        }
        if let Some(x) = self.a {
            set.a = x;
        }
        if let Some(x) = self.b {
            set.b = x;
        }
        if let Some(x) = self.g {
            set.g = x;
        }
        if let Some(x) = self.b_field {
            set.b_field = x;
        }
        if let Some(x) = self.nu {
            set.nu = x;
        }
        if let Some(x) = self.n {
            set.n = x;
        }
        if let Some(x) = self.m {
            set.m = x;
        }
        if let Some(x) = self.quark_mass {
            set.quark_mass = Some(x);
        }
        Ok(set)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// The nine-row preset mass table (charmonium at B in {2, 4},
    /// bottomonium at B = 2).
    MassTable {
        #[command(flatten)]
        common: Common,
        /// Emit only one species.
        #[arg(long)]
        species: Option<String>,
        /// Verify the table against the embedded reference values
        /// (1e-6 relative) and exit nonzero on any mismatch.
        #[arg(long)]
        check: bool,
    },
    /// One closed-form level energy.
    Energy {
        #[command(flatten)]
        common: Common,
    },
    /// Sweep the closed-form energy along one parameter axis.
    Scan {
        #[command(flatten)]
        common: Common,
        /// Axis to vary: a, b, B, or nu.
        #[arg(long)]
        axis: String,
        /// Range as lo:hi:steps.
        #[arg(long, allow_hyphen_values = true)]
        range: String,
        /// Verify the scanned column is affine (zero second differences)
        /// and exit nonzero otherwise; meant for nu scans.
        #[arg(long)]
        check_affine: bool,
    },
    /// Thermodynamic functions on a temperature grid.
    Thermo {
        #[command(flatten)]
        common: Common,
        /// exact, closed, limit, or all.
        #[arg(long, default_value = "exact")]
        method: String,
        /// Temperature: a single value or lo:hi:steps.
        #[arg(long = "T", default_value = "1.0", allow_hyphen_values = true)]
        t_spec: String,
        /// Ladder step scale; bypasses the physical parameters.
        #[arg(long)]
        theta: Option<f64>,
        /// Ladder offset, used with --theta (default 1).
        #[arg(long)]
        xi: Option<f64>,
    },
    /// Validation and audit report: closed forms against the discrete
    /// spectrum and against their defining derivatives. Findings are data,
    /// not failures.
    Validate {
        #[command(flatten)]
        common: Common,
        /// Radial grid points for the discrete spectrum.
        #[arg(long, default_value_t = 3000)]
        grid_n: usize,
        #[arg(long, default_value_t = 1e-4)]
        r_min: f64,
        #[arg(long, default_value_t = 16.0)]
        r_max: f64,
    },
}

/// Failure carrying the process exit code.
struct CliFailure {
    code: u8,
    message: String,
}

fn invalid(message: impl Into<String>) -> CliFailure {
    CliFailure { code: 2, message: message.into() }
}

fn from_lib(e: heunspec::Error) -> CliFailure {
    let code = match e {
        heunspec::Error::NonConvergent(_) | heunspec::Error::GridTooCoarse { .. } => 3,
        _ => 2,
    };
    CliFailure { code, message: e.to_string() }
}

fn io_fail(e: std::io::Error) -> CliFailure {
    CliFailure { code: 2, message: format!("i/o error: {e}") }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliFailure> {
    match cli.cmd {
        Cmd::MassTable { common, species, check } => cmd_mass_table(common, species, check),
        Cmd::Energy { common } => cmd_energy(common),
        Cmd::Scan { common, axis, range, check_affine } => {
            cmd_scan(common, &axis, &range, check_affine)
        }
        Cmd::Thermo { common, method, t_spec, theta, xi } => {
            cmd_thermo(common, &method, &t_spec, theta, xi)
        }
        Cmd::Validate { common, grid_n, r_min, r_max } => {
            cmd_validate(common, grid_n, r_min, r_max)
        }
    }
}

fn cmd_mass_table(
    common: Common,
    species: Option<String>,
    check: bool,
) -> Result<ExitCode, CliFailure> {
    let filter = match species {
        Some(s) => {
            Some(s.parse::<Species>().map_err(|e: heunspec::Error| invalid(e.to_string()))?)
        }
        None => None,
    };
    let rows = spectrum::mass_table(filter);
    let mut csv = Csv::new("species,n,m,B,nu,g,E,M");
    for r in &rows {
        csv.row(&[
            r.species.name().to_string(),
            r.n.to_string(),
            r.m.to_string(),
            sci(r.b_field),
            sci(r.nu),
            sci(r.g),
            sci(r.energy),
            sci(r.mass),
        ]);
    }
    csv.emit(common.out.as_deref()).map_err(io_fail)?;
    if check {
        let mut worst = 0.0f64;
        for r in &rows {
            let want = reference::expected_mass(r.species, r.n, r.m, r.b_field)
                .ok_or_else(|| invalid("missing reference row"))?;
            worst = worst.max((r.mass - want).abs() / want);
            let want_g = reference::expected_g(r.species, r.n, r.m)
                .ok_or_else(|| invalid("missing reference strength"))?;
            worst = worst.max((r.g - want_g).abs() / want_g);
        }
        if worst > 1e-6 {
            eprintln!("check failed: worst relative gap {worst:.3e} > 1e-6");
            return Ok(ExitCode::from(1));
        }
        eprintln!("check passed: worst relative gap {worst:.3e}");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_energy(common: Common) -> Result<ExitCode, CliFailure> {
    let set = common.params()?;
    let params = set.phys_params().map_err(|e| invalid(e.to_string()))?;
    let fields = set.field_config().map_err(|e| invalid(e.to_string()))?;
    let level = spectrum::energy(&params, &fields, set.n, set.m).map_err(from_lib)?;
    let mut csv = Csv::new("n,m,E");
    csv.row(&[set.n.to_string(), set.m.to_string(), sci(level.energy)]);
    csv.emit(common.out.as_deref()).map_err(io_fail)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_scan(
    common: Common,
    axis: &str,
    range: &str,
    check_affine: bool,
) -> Result<ExitCode, CliFailure> {
    let set = common.params()?;
    let params = set.phys_params().map_err(|e| invalid(e.to_string()))?;
    let fields = set.field_config().map_err(|e| invalid(e.to_string()))?;
    let axis: ScanAxis = axis.parse().map_err(|e: heunspec::Error| invalid(e.to_string()))?;
    let (lo, hi, steps) = config::parse_range(range).map_err(|e| invalid(e.to_string()))?;
    let points = spectrum::scan_energy(&params, &fields, set.n, set.m, axis, lo, hi, steps)
        .map_err(from_lib)?;
    let mut csv = Csv::new("x,E");
    for p in &points {
        match p.energy {
            Some(e) => csv.row(&[sci(p.x), sci(e)]),
            None => {
                eprintln!("warning: invalid point at {} = {}", axis.name(), p.x);
                csv.row(&[sci(p.x), "nan".to_string()]);
            }
        }
    }
    csv.emit(common.out.as_deref()).map_err(io_fail)?;
    if check_affine {
        let es: Vec<f64> = points.iter().filter_map(|p| p.energy).collect();
        if es.len() != points.len() {
            eprintln!("affine check failed: scan contains invalid rows");
            return Ok(ExitCode::from(1));
        }
        let scale = es.iter().fold(0.0f64, |m, e| m.max(e.abs())).max(1.0);
        let worst = es
            .windows(3)
            .map(|w| (w[2] - 2.0 * w[1] + w[0]).abs())
            .fold(0.0f64, f64::max);
        if worst > 1e-10 * scale {
            eprintln!("affine check failed: worst second difference {worst:.3e}");
            return Ok(ExitCode::from(1));
        }
        eprintln!("affine check passed: worst second difference {worst:.3e}");
    }
    Ok(ExitCode::SUCCESS)
}

fn thermo_row(csv: &mut Csv, p: &ThermoPoint) {
    csv.row(&[
        sci(p.t),
        sci(p.g),
        sci(p.u),
        sci(p.c_v),
        sci(p.f),
        sci(p.s),
        sci(p.i),
        sci(p.m),
        p.method.as_str().to_string(),
    ]);
}

fn nan_row(csv: &mut Csv, t: f64, method: Method) {
    let nan = "nan".to_string();
    csv.row(&[
        sci(t),
        nan.clone(),
        nan.clone(),
        nan.clone(),
        nan.clone(),
        nan.clone(),
        nan.clone(),
        nan,
        method.as_str().to_string(),
    ]);
}

fn cmd_thermo(
    common: Common,
    method: &str,
    t_spec: &str,
    theta: Option<f64>,
    xi: Option<f64>,
) -> Result<ExitCode, CliFailure> {
    let set = common.params()?;
    let methods: Vec<Method> = match method {
        "exact" => vec![Method::Exact],
        "closed" => vec![Method::Closed],
        "limit" => vec![Method::Limit],
        "all" => vec![Method::Exact, Method::Closed, Method::Limit],
        other => {
            return Err(invalid(format!(
                "method `{other}` (expected exact, closed, limit, or all)"
            )))
        }
    };
    let temperatures = config::parse_temperatures(t_spec).map_err(|e| invalid(e.to_string()))?;
    let opts = ExactOptions::default();

    // A bare (theta, xi) ladder bypasses the physical parameters; field
    // derivatives are then unavailable and stay NaN.
    let theta = theta.or(set.theta);
    let xi = xi.or(set.xi);
    let (ladder, phys) = if let Some(th) = theta {
        (Ladder::new(th, xi.unwrap_or(1.0)).map_err(from_lib)?, None)
    } else {
        let params = set.phys_params().map_err(|e| invalid(e.to_string()))?;
        let fields = set.field_config().map_err(|e| invalid(e.to_string()))?;
        let scales = heunspec::derive_scales(&params, &fields, set.m).map_err(from_lib)?;
        (Ladder::from_scales(&scales).map_err(from_lib)?, Some((params, fields)))
    };

    let mut csv = Csv::new("T,G,U,Cv,F,S,I,M,method");
    for &t in &temperatures {
        for &method in &methods {
            let point: Result<ThermoPoint, heunspec::Error> = match (method, &phys) {
                (Method::Exact, None) => thermo::thermo_exact_ladder(&ladder, t, &opts),
                (Method::Exact, Some((params, fields))) => {
                    thermo::thermo_exact(params, fields, set.m, t, &opts)
                }
                (Method::Closed, None) => {
                    Ok(thermo::thermo_closed_ladder(ladder.theta, ladder.xi, t))
                }
                (Method::Closed, Some((params, fields))) => {
                    thermo::thermo_closed(params, fields, set.m, t)
                }
                (Method::Limit, _) => Ok(thermo::thermo_limit(ladder.theta, t)),
            };
            match point {
                Ok(p) => thermo_row(&mut csv, &p),
                Err(heunspec::Error::NonConvergent(msg)) => {
                    eprintln!("warning: T = {t}, method {}: {msg}", method.as_str());
                    nan_row(&mut csv, t, method);
                }
                Err(e) => return Err(from_lib(e)),
            }
        }
    }
    csv.emit(common.out.as_deref()).map_err(io_fail)?;
    Ok(ExitCode::SUCCESS)
}

fn print_oracle_report(set: &ParamSet, rep: &OracleReport) {
    println!("validation report");
    println!(
        "  parameters: mu={} a={} b={} B={} nu={} n={} m={}",
        set.mu, set.a, set.b, set.b_field, set.nu, rep.n, rep.m
    );
    println!("  closed-form energy: {}", sci(rep.closed_form_energy));
    println!(
        "  degree condition: R/2 = {} (radical bookkeeping), {} (canonical; offset {})",
        sci(rep.radical_half_r),
        sci(rep.canonical_half_r),
        sci(rep.degree_offset)
    );
    println!(
        "  level spacing: closed-form step = 2 x thermodynamic ladder step (factor 2 by construction)"
    );
    let c = &rep.closure;
    println!("  strength-relation branch: g = {}", sci(c.g));
    println!("    termination residual |C(n+1)| = {}", sci(c.termination_residual));
    println!(
        "    nearest numeric level {} (abs gap {}, rel gap {}, Richardson est {})",
        sci(c.nearest_numeric_energy),
        sci(c.abs_gap),
        sci(c.rel_gap),
        sci(c.error_estimate)
    );
    println!("    numeric nodes = {}", c.numeric_nodes);
    match &rep.termination {
        Some(t) => {
            println!("  termination branch: degree {} at g = {}", t.degree, sci(t.g));
            println!("    analytic-wave residual = {}", sci(t.ode_residual));
            println!(
                "    nearest numeric level {} (abs gap {}, extrapolated gap {}, est {})",
                sci(t.nearest_numeric_energy),
                sci(t.abs_gap),
                sci(t.extrapolated_gap),
                sci(t.error_estimate)
            );
            println!("    nodes analytic/numeric = {}/{}", t.analytic_nodes, t.numeric_nodes);
        }
        None => println!(
            "  termination branch: none (canonical degree condition off an integer by {})",
            sci(rep.degree_offset)
        ),
    }
    let roots: Vec<String> = rep.radical_root_strengths.iter().map(|g| sci(*g)).collect();
    println!("  termination-strength roots (radical bookkeeping): [{}]", roots.join(", "));
}

fn print_audit(entries: &[AuditEntry]) {
    println!("audit (stated value vs defining reference; disagreement is a finding)");
    for e in entries {
        println!(
            "  {:<32} stated {} reference {} abs_gap {} rel_gap {}",
            e.id,
            sci(e.value_stated),
            sci(e.value_reference),
            sci(e.abs_gap),
            sci(e.rel_gap)
        );
    }
}

fn cmd_validate(
    common: Common,
    grid_n: usize,
    r_min: f64,
    r_max: f64,
) -> Result<ExitCode, CliFailure> {
    let set = common.params()?;
    let params = set.phys_params().map_err(|e| invalid(e.to_string()))?;
    let fields = set.field_config().map_err(|e| invalid(e.to_string()))?;
    let grid = RadialGrid::new(r_min, r_max, grid_n).map_err(from_lib)?;
    let rep = validate_quasi_exact(&params, &fields, set.n, set.m, &grid).map_err(from_lib)?;
    let audit = thermo::audit(&params, &fields, set.m, 1.0, &[0.05, 0.1, 0.2]).map_err(from_lib)?;

    print_oracle_report(&set, &rep);
    print_audit(&audit);

    if let Some(path) = &common.out {
        let mut csv = Csv::new("section,id,stated,reference,abs_gap,rel_gap");
        csv.row(&[
            "oracle".into(),
            "closed-form-vs-numeric-relation-g".into(),
            sci(rep.closed_form_energy),
            sci(rep.closure.nearest_numeric_energy),
            sci(rep.closure.abs_gap),
            sci(rep.closure.rel_gap),
        ]);
        if let Some(t) = &rep.termination {
            csv.row(&[
                "oracle".into(),
                "closed-form-vs-numeric-termination-g".into(),
                sci(rep.closed_form_energy),
                sci(t.nearest_numeric_energy),
                sci(t.abs_gap),
                sci(t.rel_gap),
            ]);
            csv.row(&[
                "oracle".into(),
                "analytic-wave-residual".into(),
                sci(t.ode_residual),
                sci(0.0),
                sci(t.ode_residual),
                sci(t.ode_residual),
            ]);
        }
        csv.row(&[
            "oracle".into(),
            "relation-g-termination-residual".into(),
            sci(rep.closure.termination_residual),
            sci(0.0),
            sci(rep.closure.termination_residual),
            sci(1.0),
        ]);
        for e in &audit {
            csv.row(&[
                "thermo".into(),
                e.id.into(),
                sci(e.value_stated),
                sci(e.value_reference),
                sci(e.abs_gap),
                sci(e.rel_gap),
            ]);
        }
        csv.emit(Some(path)).map_err(io_fail)?;
    }
    Ok(ExitCode::SUCCESS)
}
