use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use qlorentz::algebras::AlgebraKind;
use qlorentz::exprlang::{parse, render};
use qlorentz::identities::{verify_pair, Registry, Status};
use qlorentz::kinematics::{
    compton_wavelength, spacelike_window, tunnel_probability, Constants, Event, KinematicsError,
    TunnelOutcome,
};
use qlorentz::opalg::{normalize, NormalizeError};
use qlorentz::packet_oracle::{
    convergence_sweep, gaussian_packet, Derivative, MomentumGrid, Oracle, OracleError,
};
use qlorentz::waveguide::{
    dispersion, effective_quantities, format_float as fmt_f, guided_tunnel_probability, scan,
    write_csv, DispersionInput, ScanRange, WaveguideError, WaveguideParams,
};

const EQ9_TOL_SPECTRAL: f64 = 1e-6;
const EQ9_TOL_FD: f64 = 1e-4;
const EHRENFEST_TOL: f64 = 1e-8;

#[derive(Parser, Debug)]
#[command(
    name = "qlorentz",
    version,
    about = "Operator identities and spacelike-window numerics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the canonical form of an expression.
    Normalize {
        #[arg(long, default_value = "rel")]
        algebra: AlgebraKind,
        expr: String,
    },
    /// Verify registered identities.
    Verify {
        #[arg(conflicts_with = "all")]
        name: Option<String>,
        #[arg(long)]
        all: bool,
        #[arg(long)]
        algebra: Option<AlgebraKind>,
    },
    /// Check that two expressions are equal in an algebra.
    VerifyExpr {
        #[arg(long, default_value = "rel")]
        algebra: AlgebraKind,
        lhs: String,
        rhs: String,
    },
    /// Compton window and tunneling probability of a massive particle.
    Particle {
        /// Rest mass in kg (SI units), or `natural` / `natural:<m>`.
        #[arg(long, value_parser = parse_mass, allow_hyphen_values = true)]
        mass: MassArg,
        /// Time of the event (s in SI units).
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        t: f64,
        /// Position of the event (m in SI units).
        #[arg(long, allow_negative_numbers = true)]
        x: Option<f64>,
        #[arg(value_enum)]
        mode: Option<ParticleMode>,
    },
    /// Effective mass, dispersion and tunneling in a hollow waveguide (SI).
    #[command(group(ArgGroup::new("guide").required(true).args(["cutoff_ghz", "width_mm"])))]
    Waveguide {
        #[arg(long)]
        cutoff_ghz: Option<f64>,
        #[arg(long)]
        width_mm: Option<f64>,
        #[arg(long)]
        freq_ghz: Option<f64>,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        t: f64,
        /// Single event position in metres.
        #[arg(long, allow_negative_numbers = true)]
        x: Option<f64>,
        /// Positions `x0:x1:step` in metres.
        #[arg(long, value_parser = parse_scan, allow_hyphen_values = true)]
        scan: Option<(f64, f64, f64)>,
        #[arg(long, requires = "scan")]
        csv: Option<PathBuf>,
    },
    /// Wave-packet oracle in natural units.
    Packet {
        #[arg(long, default_value_t = 4096)]
        n: usize,
        #[arg(long, default_value_t = 20.0)]
        pmax: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        p0: f64,
        #[arg(long, default_value_t = 0.5)]
        sigma: f64,
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        #[arg(long, default_value_t = 0.3, allow_negative_numbers = true)]
        t: f64,
        /// Fourth-order finite differences instead of spectral derivatives.
        #[arg(long)]
        fd: bool,
        /// Write residuals for grid sizes 64..=n to this CSV file.
        #[arg(long)]
        sweep: Option<PathBuf>,
        #[arg(value_enum)]
        check: PacketCheck,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ParticleMode {
    Window,
    Prob,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PacketCheck {
    CheckEq9,
    Ehrenfest,
}

#[derive(Clone, Copy, Debug)]
struct MassArg {
    value: f64,
    natural: bool,
}

fn parse_mass(s: &str) -> Result<MassArg, String> {
    let (natural, num) = match s {
        "natural" => {
            return Ok(MassArg {
                value: 1.0,
                natural: true,
            })
        }
        _ => match s.strip_prefix("natural:") {
            Some(rest) => (true, rest),
            None => (false, s),
        },
    };
    num.parse::<f64>()
        .map(|value| MassArg { value, natural })
        .map_err(|e| format!("mass {s:?}: {e}"))
}

fn parse_scan(s: &str) -> Result<(f64, f64, f64), String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, c] = parts.as_slice() else {
        return Err(format!("expected x0:x1:step, got {s:?}"));
    };
    let num = |t: &str| t.parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    Ok((num(a)?, num(b)?, num(c)?))
}

enum CliError {
    /// A check ran and failed; its report was already written.
    Failed,
    Usage(String),
    Precondition(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Failed => 1,
            CliError::Usage(_) => 2,
            CliError::Precondition(_) => 3,
        }
    }
}

impl From<NormalizeError> for CliError {
    fn from(e: NormalizeError) -> Self {
        match e {
            NormalizeError::Algebra(_) => CliError::Usage(e.to_string()),
            _ => CliError::Precondition(e.to_string()),
        }
    }
}

impl From<KinematicsError> for CliError {
    fn from(e: KinematicsError) -> Self {
        CliError::Precondition(e.to_string())
    }
}

impl From<WaveguideError> for CliError {
    fn from(e: WaveguideError) -> Self {
        match e {
            WaveguideError::Io(_) | WaveguideError::Csv(_) => CliError::Usage(e.to_string()),
            _ => CliError::Precondition(e.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Factor(_) => CliError::Usage(e.to_string()),
            _ => CliError::Precondition(e.to_string()),
        }
    }
}

type Outcome = Result<bool, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut out = String::new();
    let result = run(cli.command, &mut out);
    if result.is_ok() {
        let mut lock = io::stdout().lock();
        if lock
            .write_all(out.as_bytes())
            .and_then(|_| lock.flush())
            .is_err()
        {
            return ExitCode::from(2);
        }
    }
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(CliError::Failed.code()),
        Err(e) => {
            match &e {
                CliError::Usage(m) | CliError::Precondition(m) => eprintln!("error: {m}"),
                CliError::Failed => {}
            }
            ExitCode::from(e.code())
        }
    }
}

fn run(cmd: Command, out: &mut String) -> Outcome {
    match cmd {
        Command::Normalize { algebra, expr } => run_normalize(algebra, &expr, out),
        Command::Verify {
            name,
            all: _,
            algebra,
        } => run_verify(name.as_deref(), algebra, out),
        Command::VerifyExpr { algebra, lhs, rhs } => run_verify_expr(algebra, &lhs, &rhs, out),
        Command::Particle { mass, t, x, mode } => run_particle(mass, t, x, mode, out),
        Command::Waveguide {
            cutoff_ghz,
            width_mm,
            freq_ghz,
            t,
            x,
            scan,
            csv,
        } => run_waveguide(cutoff_ghz, width_mm, freq_ghz, t, x, scan, csv, out),
        Command::Packet {
            n,
            pmax,
            p0,
            sigma,
            mass,
            t,
            fd,
            sweep,
            check,
        } => {
            let scheme = if fd {
                Derivative::FiniteDifference4
            } else {
                Derivative::Spectral
            };
            run_packet(n, pmax, p0, sigma, mass, t, scheme, sweep, check, out)
        }
    }
}

fn parse_in(algebra: AlgebraKind, text: &str) -> Result<qlorentz::opalg::OpExpr, CliError> {
    parse(text, &algebra.spec()).map_err(|e| CliError::Usage(format!("{text:?} {e}")))
}

fn run_normalize(algebra: AlgebraKind, text: &str, out: &mut String) -> Outcome {
    let e = parse_in(algebra, text)?;
    let n = normalize(&e, &algebra.spec())?;
    writeln!(out, "{}", render(&n)).unwrap();
    Ok(true)
}

fn run_verify(name: Option<&str>, filter: Option<AlgebraKind>, out: &mut String) -> Outcome {
    let reg = Registry::new();
    let reports = match name {
        Some(n) => {
            let id = reg
                .get(n)
                .ok_or_else(|| CliError::Usage(format!("unknown identity {n:?}")))?;
            if filter.is_some_and(|k| k != id.algebra) {
                return Err(CliError::Usage(format!(
                    "identity {n:?} belongs to algebra {}",
                    id.algebra
                )));
            }
            vec![reg.verify(id)?]
        }
        None => reg
            .identities()
            .iter()
            .filter(|id| filter.is_none_or(|k| id.algebra == k))
            .map(|id| reg.verify(id))
            .collect::<Result<_, _>>()?,
    };
    for r in &reports {
        writeln!(out, "{r}").unwrap();
    }
    Ok(reports.iter().all(|r| r.status == Status::Pass))
}

fn run_verify_expr(algebra: AlgebraKind, lhs: &str, rhs: &str, out: &mut String) -> Outcome {
    let (l, r) = (parse_in(algebra, lhs)?, parse_in(algebra, rhs)?);
    let report = verify_pair("expr", algebra, &l, &r, &algebra.spec())?;
    writeln!(
        out,
        "{} algebra={} steps={} residual={}",
        report.status, report.algebra, report.steps, report.residual
    )
    .unwrap();
    Ok(report.status == Status::Pass)
}

fn write_outcome(out: &mut String, o: &TunnelOutcome) {
    writeln!(out, "interval={}", fmt_f(o.interval)).unwrap();
    writeln!(out, "classification={}", o.classification).unwrap();
    if let Some(s) = o.s {
        writeln!(out, "s={}", fmt_f(s)).unwrap();
    }
    if let (Some(a), Some(p)) = (o.amplitude, o.probability) {
        writeln!(out, "amplitude={}", fmt_f(a)).unwrap();
        writeln!(out, "probability={}", fmt_f(p)).unwrap();
    }
}

fn run_particle(
    mass: MassArg,
    t: f64,
    x: Option<f64>,
    mode: Option<ParticleMode>,
    out: &mut String,
) -> Outcome {
    let k = if mass.natural {
        Constants::NATURAL
    } else {
        Constants::SI
    };
    let m = mass.value;
    writeln!(out, "units={}", if mass.natural { "natural" } else { "si" }).unwrap();
    writeln!(out, "mass={}", fmt_f(m)).unwrap();
    if matches!(mode, None | Some(ParticleMode::Window)) {
        writeln!(
            out,
            "compton_wavelength={}",
            fmt_f(compton_wavelength(m, &k)?)
        )
        .unwrap();
        writeln!(out, "window_half_width={}", fmt_f(spacelike_window(m, &k)?)).unwrap();
    }
    if matches!(mode, None | Some(ParticleMode::Prob)) {
        let Some(x) = x else {
            if mode.is_some() {
                return Err(CliError::Usage("prob needs --x".into()));
            }
            return Ok(true);
        };
        let o = tunnel_probability(Event::new(t, x), m, &k)?;
        writeln!(out, "t={}", fmt_f(t)).unwrap();
        writeln!(out, "x={}", fmt_f(x)).unwrap();
        write_outcome(out, &o);
    }
    Ok(true)
}

#[allow(clippy::too_many_arguments)]
fn run_waveguide(
    cutoff_ghz: Option<f64>,
    width_mm: Option<f64>,
    freq_ghz: Option<f64>,
    t: f64,
    x: Option<f64>,
    range: Option<(f64, f64, f64)>,
    csv: Option<PathBuf>,
    out: &mut String,
) -> Outcome {
    let k = Constants::SI;
    let tau = 2.0 * std::f64::consts::PI;
    let w = match (cutoff_ghz, width_mm) {
        (Some(f), None) => WaveguideParams::from_cutoff(tau * f * 1e9)?,
        (None, Some(a)) => WaveguideParams::from_width(a * 1e-3, &k)?,
        _ => unreachable!("clap enforces exactly one guide flag"),
    };
    let q = effective_quantities(&w, &k);
    if let Some(a) = w.width() {
        writeln!(out, "width={}", fmt_f(a)).unwrap();
    }
    writeln!(out, "omega_c={}", fmt_f(w.omega_c())).unwrap();
    writeln!(out, "cutoff_ghz={}", fmt_f(w.omega_c() / tau / 1e9)).unwrap();
    writeln!(out, "m_eff={}", fmt_f(q.m_eff)).unwrap();
    writeln!(out, "lambda_c={}", fmt_f(q.lambda_c)).unwrap();
    writeln!(out, "window_half_width={}", fmt_f(q.lambda_c / 2.0)).unwrap();
    if let Some(f) = freq_ghz {
        let s = dispersion(DispersionInput::Omega(tau * f * 1e9), &w, &k)?;
        writeln!(out, "omega={}", fmt_f(s.omega)).unwrap();
        match (s.k_x, s.kappa, s.group_velocity) {
            (Some(k_x), _, Some(v)) => {
                writeln!(out, "regime=propagating").unwrap();
                writeln!(out, "k_x={}", fmt_f(k_x)).unwrap();
                writeln!(out, "group_velocity={}", fmt_f(v)).unwrap();
            }
            (_, Some(kappa), _) => {
                writeln!(out, "regime=evanescent").unwrap();
                writeln!(out, "kappa={}", fmt_f(kappa)).unwrap();
            }
            _ => unreachable!("dispersion returns one regime"),
        }
    }
    if let Some(x) = x {
        let o = guided_tunnel_probability(Event::new(t, x), &w, &k)?;
        writeln!(out, "t={}", fmt_f(t)).unwrap();
        writeln!(out, "x={}", fmt_f(x)).unwrap();
        write_outcome(out, &o);
    }
    if let Some((x0, x1, step)) = range {
        let rows = scan(&w, &k, t, &ScanRange::new(x0, x1, step)?)?;
        writeln!(out, "scan_t={}", fmt_f(t)).unwrap();
        writeln!(out, "rows={}", rows.len()).unwrap();
        match csv {
            Some(path) => {
                let file = File::create(&path)
                    .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
                write_csv(&rows, BufWriter::new(file))?;
                writeln!(out, "csv={}", path.display()).unwrap();
            }
            None => {
                let mut buf = Vec::new();
                write_csv(&rows, &mut buf)?;
                out.push_str(&String::from_utf8(buf).expect("csv output is utf-8"));
            }
        }
    }
    Ok(true)
}

#[allow(clippy::too_many_arguments)]
fn run_packet(
    n: usize,
    p_max: f64,
    p0: f64,
    sigma: f64,
    mass: f64,
    t: f64,
    scheme: Derivative,
    sweep: Option<PathBuf>,
    check: PacketCheck,
    out: &mut String,
) -> Outcome {
    let grid = MomentumGrid::new(p_max, n)?;
    let oracle = Oracle::new(gaussian_packet(p0, sigma, mass, grid)?, scheme);
    writeln!(out, "scheme={scheme}").unwrap();
    writeln!(out, "n={n}").unwrap();
    writeln!(out, "p_max={}", fmt_f(p_max)).unwrap();
    writeln!(out, "p0={}", fmt_f(p0)).unwrap();
    writeln!(out, "sigma={}", fmt_f(sigma)).unwrap();
    writeln!(out, "mass={}", fmt_f(mass)).unwrap();
    let pass = match check {
        PacketCheck::CheckEq9 => {
            let r = oracle.check_interval_identity(t)?;
            let tol = match scheme {
                Derivative::Spectral => EQ9_TOL_SPECTRAL,
                Derivative::FiniteDifference4 => EQ9_TOL_FD,
            };
            writeln!(out, "t={}", fmt_f(t)).unwrap();
            writeln!(out, "lhs={} {}", fmt_f(r.lhs.re), fmt_f(r.lhs.im)).unwrap();
            writeln!(out, "rhs={} {}", fmt_f(r.rhs.re), fmt_f(r.rhs.im)).unwrap();
            writeln!(out, "residual={:e}", r.residual).unwrap();
            writeln!(out, "tolerance={tol:e}").unwrap();
            writeln!(out, "contained={}", r.contained).unwrap();
            r.residual < tol
        }
        PacketCheck::Ehrenfest => {
            let r = oracle.ehrenfest_check()?;
            let slope_err = (r.slope_measured - r.slope_predicted).abs();
            let vel_err = (r.velocity_commutator - r.velocity_direct).norm();
            writeln!(out, "slope_measured={}", fmt_f(r.slope_measured)).unwrap();
            writeln!(out, "slope_predicted={}", fmt_f(r.slope_predicted)).unwrap();
            writeln!(out, "slope_error={slope_err:e}").unwrap();
            writeln!(
                out,
                "velocity_commutator={} {}",
                fmt_f(r.velocity_commutator.re),
                fmt_f(r.velocity_commutator.im)
            )
            .unwrap();
            writeln!(
                out,
                "velocity_direct={} {}",
                fmt_f(r.velocity_direct.re),
                fmt_f(r.velocity_direct.im)
            )
            .unwrap();
            writeln!(out, "velocity_error={vel_err:e}").unwrap();
            writeln!(out, "tolerance={EHRENFEST_TOL:e}").unwrap();
            writeln!(out, "contained={}", r.contained).unwrap();
            slope_err < EHRENFEST_TOL && vel_err < EHRENFEST_TOL
        }
    };
    if let Some(path) = sweep {
        let sizes: Vec<usize> = std::iter::successors(Some(64usize), |s| Some(s * 2))
            .take_while(|&s| s <= n)
            .collect();
        let rows = convergence_sweep(p0, sigma, mass, p_max, t, &sizes, scheme)?;
        let io_err = |e: io::Error| CliError::Usage(format!("{}: {e}", path.display()));
        let mut f = BufWriter::new(File::create(&path).map_err(io_err)?);
        writeln!(f, "n,residual").map_err(io_err)?;
        for (size, res) in rows {
            writeln!(f, "{size},{}", fmt_f(res)).map_err(io_err)?;
        }
        f.flush().map_err(io_err)?;
        writeln!(out, "sweep={}", path.display()).unwrap();
    }
    writeln!(
        out,
        "status={}",
        if pass { Status::Pass } else { Status::Fail }
    )
    .unwrap();
    Ok(pass)
}
