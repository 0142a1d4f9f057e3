//! The `so3kin` command line.
//!
//! Exit codes: 0 success, 1 validation or verification failure, 2 I/O or
//! parse error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::algebra::{compose_fixed, exp_so3_with, hat, log_so3, AxisAngle};
use crate::differential::{finite_difference_residual, ResidualReport};
use crate::io::{
    fmt_f64, read_matrix, read_profile_csv, read_trajectory_csv, write_trajectory_csv, FormatError,
    Report,
};
use crate::linalg::{Mat3, Vec3};
use crate::propagator::{drift_report, propagate, Interpolation, Method, RateProfile, Trajectory};
use crate::so3::{validate_rotation, RotationMatrix, ToleranceConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_IO: i32 = 2;

/// Minimum estimated order accepted by `verify`.
pub const VERIFY_MIN_ORDER: f64 = 1.8;

/// `verify` accepts a step size `h` when the largest residual is at most
/// `VERIFY_RESIDUAL_COEFF * h^2 * (1 + w_max)^3`, `w_max` being the largest
/// rate in the profile. For an exact trajectory at constant rate the
/// central-difference error is about `h^2 / 6 * |S(w)^3|_F`.
pub const VERIFY_RESIDUAL_COEFF: f64 = 1.0;

#[derive(Debug, Parser)]
#[command(name = "so3kin", version, about = "Rotation kinematics on SO(3)")]
struct Cli {
    /// Orthogonality tolerance |R^T R - I|_F for SO(3) validation.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol_ortho: f64,

    /// Determinant tolerance |det R - 1| for SO(3) validation.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol_det: f64,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Treat angle and rate inputs as degrees (deg, deg/s).
    #[arg(long, global = true)]
    degrees: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Exp,
    Euler,
    EulerRenorm,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InterpArg {
    Linear,
    Zoh,
}

impl From<InterpArg> for Interpolation {
    fn from(a: InterpArg) -> Self {
        match a {
            InterpArg::Linear => Interpolation::Linear,
            InterpArg::Zoh => Interpolation::ZeroOrderHold,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate dR/dt = S(w) R over a rate profile.
    Propagate {
        /// Rate profile CSV (t,wx,wy,wz).
        #[arg(long)]
        input: PathBuf,
        /// Trajectory CSV to write. With `--method all`, one file per method
        /// is written as `<stem>.<method>.<ext>`.
        #[arg(long)]
        output: PathBuf,
        /// Step size in seconds.
        #[arg(long)]
        dt: f64,
        #[arg(long, value_enum, default_value_t = MethodArg::Exp)]
        method: MethodArg,
        #[arg(long, value_enum, default_value_t = InterpArg::Linear)]
        interp: InterpArg,
        /// Initial attitude matrix file (defaults to identity).
        #[arg(long)]
        initial: Option<PathBuf>,
        /// Also write the report to this file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Check a trajectory against a rate profile by central differences.
    Verify {
        #[arg(long)]
        trajectory: PathBuf,
        #[arg(long)]
        profile: PathBuf,
        /// Comma-separated step sizes in seconds, each a whole multiple of
        /// the trajectory spacing. Defaults to 1, 2 and 4 times the spacing.
        #[arg(long, value_delimiter = ',')]
        steps: Option<Vec<f64>>,
        #[arg(long, value_enum, default_value_t = InterpArg::Linear)]
        interp: InterpArg,
    },
    /// Print the skew matrix of a vector "x,y,z".
    Hat {
        #[arg(allow_hyphen_values = true)]
        vector: String,
    },
    /// Print the vector of a skew matrix given as nine row-major entries.
    Vee {
        #[arg(allow_hyphen_values = true)]
        matrix: String,
    },
    /// Print second * first for two rotation matrix files.
    Compose { first: PathBuf, second: PathBuf },
    /// Print exp(hat(phi)) for a rotation vector "x,y,z".
    Exp {
        #[arg(allow_hyphen_values = true)]
        vector: String,
    },
    /// Print the rotation vector of a rotation matrix file.
    Log { matrix: PathBuf },
}

/// Failure carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }

    fn io(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_IO,
            message: message.into(),
        }
    }

    fn from_format(path: &Path, e: FormatError) -> Self {
        let message = format!("{}: {e}", path.display());
        match e {
            FormatError::Invalid(_) => Failure::invalid(message),
            FormatError::Io(_) | FormatError::Parse { .. } => Failure::io(message),
        }
    }
}

impl From<crate::Error> for Failure {
    fn from(e: crate::Error) -> Self {
        Failure::invalid(e.to_string())
    }
}

type CmdResult = Result<i32, Failure>;

/// Runs the CLI with `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INVALID,
            };
            let sink: &mut dyn Write = if code == EXIT_OK { out } else { err };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> CmdResult {
    let tol = ToleranceConfig::new(
        cli.tol_ortho,
        cli.tol_det,
        ToleranceConfig::default().small_angle_tol,
    )
    .map_err(|e| Failure::invalid(format!("--tol-ortho/--tol-det: {e}")))?;
    match &cli.command {
        Command::Propagate {
            input,
            output,
            dt,
            method,
            interp,
            initial,
            report,
        } => cmd_propagate(
            cli,
            &tol,
            PropagateArgs {
                input,
                output,
                dt: *dt,
                method: *method,
                interp: (*interp).into(),
                initial: initial.as_deref(),
                report: report.as_deref(),
            },
            out,
        ),
        Command::Verify {
            trajectory,
            profile,
            steps,
            interp,
        } => cmd_verify(
            cli,
            trajectory,
            profile,
            steps.as_deref(),
            (*interp).into(),
            out,
        ),
        Command::Hat { vector } => {
            let v = parse_vector(vector)?;
            let s = hat(v)?;
            print_matrix(cli.format, &s.matrix(), out)
        }
        Command::Vee { matrix } => cmd_vee(cli.format, &tol, matrix, out),
        Command::Compose { first, second } => {
            let a = read_rotation(first, &tol)?;
            let b = read_rotation(second, &tol)?;
            let r = compose_fixed(&a, &b)?;
            print_matrix(cli.format, r.matrix(), out)
        }
        Command::Exp { vector } => {
            let mut v = parse_vector(vector)?;
            if cli.degrees {
                v = v.scale(std::f64::consts::PI / 180.0);
            }
            let r = exp_so3_with(&AxisAngle::from(v), &tol)?;
            print_matrix(cli.format, r.matrix(), out)
        }
        Command::Log { matrix } => {
            let r = read_rotation(matrix, &tol)?;
            print_vector(cli.format, &log_so3(&r).phi, out)
        }
    }
}

struct PropagateArgs<'a> {
    input: &'a Path,
    output: &'a Path,
    dt: f64,
    method: MethodArg,
    interp: Interpolation,
    initial: Option<&'a Path>,
    report: Option<&'a Path>,
}

fn cmd_propagate(
    cli: &Cli,
    tol: &ToleranceConfig,
    args: PropagateArgs<'_>,
    out: &mut dyn Write,
) -> CmdResult {
    if !(args.dt > 0.0 && args.dt.is_finite()) {
        return Err(Failure::invalid(format!(
            "--dt must be a positive finite number of seconds, got {}",
            args.dt
        )));
    }
    if args.output.as_os_str().is_empty() {
        return Err(Failure::invalid("--output must not be empty"));
    }
    let profile = load_profile(args.input, args.interp, cli.degrees)?;
    let r0 = match args.initial {
        Some(p) => read_rotation(p, tol)?,
        None => validate_rotation(Mat3::IDENTITY, tol)?,
    };

    let methods: Vec<Method> = match args.method {
        MethodArg::Exp => vec![Method::Exponential],
        MethodArg::Euler => vec![Method::Euler],
        MethodArg::EulerRenorm => vec![Method::EulerRenorm],
        MethodArg::All => {
            let mut all = Method::ALL.to_vec();
            all.sort_by_key(|m| m.name());
            all
        }
    };

    // Methods are independent; run them side by side and keep results in
    // method-name order.
    let results: Vec<Result<Trajectory, crate::Error>> = std::thread::scope(|scope| {
        let handles: Vec<_> = methods
            .iter()
            .map(|&m| {
                let (r0, profile) = (&r0, &profile);
                scope.spawn(move || propagate(r0, profile, args.dt, m))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("propagation thread panicked"))
            .collect()
    });
    let trajectories = results.into_iter().collect::<Result<Vec<_>, _>>()?;

    let mut extra = Vec::new();
    if cli.degrees {
        extra.push(("input_units", "deg/s".to_string()));
    }
    let mut reports = Vec::with_capacity(trajectories.len());
    for (traj, method) in trajectories.iter().zip(&methods) {
        let path = if methods.len() == 1 {
            args.output.to_path_buf()
        } else {
            per_method_path(args.output, *method)
        };
        write_file(&path, |w| write_trajectory_csv(w, traj, &extra))?;
        reports.push(Report::from_trajectory(traj, &drift_report(traj)));
    }

    let rendered = render_reports(cli.format, &reports);
    if let Some(path) = args.report {
        write_file(path, |w| w.write_all(rendered.as_bytes()))?;
    }
    out.write_all(rendered.as_bytes())
        .map_err(|e| Failure::io(e.to_string()))?;
    Ok(EXIT_OK)
}

fn per_method_path(output: &Path, method: Method) -> PathBuf {
    let stem = output
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "trajectory".into());
    let name = match output.extension() {
        Some(ext) => format!("{stem}.{}.{}", method.name(), ext.to_string_lossy()),
        None => format!("{stem}.{}", method.name()),
    };
    output.with_file_name(name)
}

fn render_reports(format: Format, reports: &[Report]) -> String {
    match (format, reports) {
        (Format::Json, [single]) => single.to_json() + "\n",
        (Format::Json, many) => {
            serde_json::to_string_pretty(many).expect("reports serialize") + "\n"
        }
        (Format::Text, many) => many
            .iter()
            .map(Report::to_text)
            .collect::<Vec<_>>()
            .join("\n"),
    }
}

fn cmd_verify(
    cli: &Cli,
    traj_path: &Path,
    profile_path: &Path,
    steps: Option<&[f64]>,
    interp: Interpolation,
    out: &mut dyn Write,
) -> CmdResult {
    let traj = File::open(traj_path)
        .map_err(FormatError::from)
        .and_then(read_trajectory_csv)
        .map_err(|e| Failure::from_format(traj_path, e))?;
    let profile = load_profile(profile_path, interp, cli.degrees)?;

    let (t_first, t_last) = (traj.first().t, traj.last().t);
    let slack = 1e-9 * t_first.abs().max(t_last.abs()).max(traj.spacing());
    if t_first < profile.start() - slack || t_last > profile.end() + slack {
        return Err(Failure::invalid(format!(
            "time range mismatch: trajectory covers [{t_first}, {t_last}] but the profile covers [{}, {}]",
            profile.start(),
            profile.end()
        )));
    }

    let spacing = traj.spacing();
    let strides: Vec<usize> = match steps {
        // drop default strides that leave fewer than 3 samples
        None => [1, 2, 4]
            .into_iter()
            .filter(|s| (traj.len() - 1) / s >= 2)
            .collect(),
        Some(list) => list
            .iter()
            .map(|&h| stride_for(h, spacing))
            .collect::<Result<_, _>>()?,
    };

    if strides.is_empty() {
        return Err(Failure::invalid(format!(
            "trajectory has {} samples; central differences need at least 3",
            traj.len()
        )));
    }
    let mut levels = Vec::with_capacity(strides.len());
    for &stride in &strides {
        let sub = traj.subsample(stride)?;
        levels.push(finite_difference_residual(&sub, &profile)?);
    }
    let combined = ResidualReport::combine(&levels)?;

    let w_max = profile.max_rate();
    let mut failures = Vec::new();
    for (&h, &max) in combined.step_sizes.iter().zip(&combined.level_max) {
        let bound = VERIFY_RESIDUAL_COEFF * h * h * (1.0 + w_max).powi(3);
        if !(max <= bound) {
            failures.push(format!(
                "step {}: max residual {} exceeds bound {}",
                fmt_f64(h),
                fmt_f64(max),
                fmt_f64(bound)
            ));
        }
    }
    match combined.estimated_order {
        Some(order) if order >= VERIFY_MIN_ORDER => {}
        Some(order) => failures.push(format!(
            "estimated order {order} is below {VERIFY_MIN_ORDER}"
        )),
        None => failures.push("need at least two step sizes to estimate the order".into()),
    }

    let mut report = Report::from_trajectory(&traj, &drift_report(&traj));
    report.max_residual = Some(combined.max_residual);
    report.estimated_order = combined.estimated_order;
    let rendered = render_reports(cli.format, std::slice::from_ref(&report));
    out.write_all(rendered.as_bytes())
        .map_err(|e| Failure::io(e.to_string()))?;

    if failures.is_empty() {
        Ok(EXIT_OK)
    } else {
        Err(Failure::invalid(format!(
            "verification failed: {}",
            failures.join("; ")
        )))
    }
}

fn stride_for(h: f64, spacing: f64) -> Result<usize, Failure> {
    let q = h / spacing;
    let n = q.round();
    if !(h > 0.0) || n < 1.0 || (q - n).abs() > 1e-9 * n {
        return Err(Failure::invalid(format!(
            "--steps: {h} is not a positive whole multiple of the trajectory spacing {spacing}"
        )));
    }
    Ok(n as usize)
}

fn cmd_vee(format: Format, tol: &ToleranceConfig, literal: &str, out: &mut dyn Write) -> CmdResult {
    let e = parse_numbers::<9>(literal)?;
    let m = Mat3::from_row_major(e);
    let asym = (m + m.transpose()).frobenius_norm();
    if asym > tol.ortho_tol {
        return Err(Failure::invalid(format!(
            "matrix is not skew-symmetric: |M + M^T|_F = {asym:e} exceeds {:e}",
            tol.ortho_tol
        )));
    }
    let v = Vec3::new(
        0.5 * (m[(2, 1)] - m[(1, 2)]),
        0.5 * (m[(0, 2)] - m[(2, 0)]),
        0.5 * (m[(1, 0)] - m[(0, 1)]),
    );
    print_vector(format, &v, out)
}

fn load_profile(path: &Path, interp: Interpolation, degrees: bool) -> Result<RateProfile, Failure> {
    File::open(path)
        .map_err(FormatError::from)
        .and_then(|f| read_profile_csv(f, interp, degrees))
        .map_err(|e| Failure::from_format(path, e))
}

fn read_rotation(path: &Path, tol: &ToleranceConfig) -> Result<RotationMatrix, Failure> {
    let m = File::open(path)
        .map_err(FormatError::from)
        .and_then(read_matrix)
        .map_err(|e| Failure::from_format(path, e))?;
    validate_rotation(m, tol).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))
}

fn write_file(
    path: &Path,
    body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<(), Failure> {
    let io_err = |e: std::io::Error| Failure::io(format!("{}: {e}", path.display()));
    let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
    body(&mut w).map_err(io_err)?;
    w.flush().map_err(io_err)
}

fn parse_numbers<const N: usize>(literal: &str) -> Result<[f64; N], Failure> {
    let fields: Vec<&str> = literal.split(',').map(str::trim).collect();
    if fields.len() != N {
        return Err(Failure::invalid(format!(
            "expected {N} comma-separated numbers, got {} in '{literal}'",
            fields.len()
        )));
    }
    let mut out = [0.0; N];
    for (slot, f) in out.iter_mut().zip(&fields) {
        let v: f64 = f
            .parse()
            .map_err(|_| Failure::invalid(format!("'{f}' is not a number")))?;
        if !v.is_finite() {
            return Err(Failure::invalid(format!("'{f}' is not finite")));
        }
        *slot = v;
    }
    Ok(out)
}

fn parse_vector(literal: &str) -> Result<Vec3, Failure> {
    parse_numbers::<3>(literal).map(Vec3::from_array)
}

// -0.0 prints as "-0"; normalize so zero entries read as 0.
fn clean(v: f64) -> f64 {
    v + 0.0
}

/// Shortest round-trip text, in exponent form for very small or large values.
fn num(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-5..1e15).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

fn print_matrix(format: Format, m: &Mat3, out: &mut dyn Write) -> CmdResult {
    let rows = m.rows().map(|r| r.map(clean));
    let text = match format {
        Format::Json => serde_json::json!({ "matrix": rows }).to_string() + "\n",
        Format::Text => rows
            .iter()
            .map(|r| format!("{}, {}, {}\n", num(r[0]), num(r[1]), num(r[2])))
            .collect(),
    };
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::io(e.to_string()))?;
    Ok(EXIT_OK)
}

fn print_vector(format: Format, v: &Vec3, out: &mut dyn Write) -> CmdResult {
    let a = v.to_array().map(clean);
    let text = match format {
        Format::Json => serde_json::json!({ "vector": a }).to_string() + "\n",
        Format::Text => format!("{}, {}, {}\n", num(a[0]), num(a[1]), num(a[2])),
    };
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::io(e.to_string()))?;
    Ok(EXIT_OK)
}
