use std::fs::File;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use tnnball_core::amplituhedron::{build_spec, cyclic_polytope_oracle, AmpFlow, AmplituhedronPoint};
use tnnball_core::cyclic::{ChartPoint, GrChartFlow, TauEigensystem};
use tnnball_core::electrical::{a_sigma, enumerate_nc, h_subspace, response_matrix, xn_search, NoncrossingPartition};
use tnnball_core::flow::{extend_from_ball, retract_to_ball, ContractiveFlow};
use tnnball_core::grassmann::{classify_positivity, plucker_raw, Normalization, PluckerVector, PositivityClass};
use tnnball_core::io::{matrix_to_json, plucker_from_json, plucker_to_json};
use tnnball_core::unipotent::{a_flow, b_coords, classify_u_positivity, UnipotentFlow, UnipotentMatrix};
use tnnball_core::{Matrix, Rational, Scalar};
use tnnball_cli::input::{matrix_value, parse_grid, read_floats, read_json, read_matrix, read_network};
use tnnball_cli::trajectory::{amp_trajectory, gr_trajectory, u_trajectory, Space, Table};
use tnnball_cli::verify::{run_verify_suite, Suite, VerifyConfig};
use tnnball_cli::CliError;

/// Totally nonnegative spaces as balls: flows, ball maps and checks.
///
/// JSON arguments may be inline, a file path, or `-` for stdin.
#[derive(Parser)]
#[command(name = "tnnball", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plücker coordinates of a k x n matrix.
    Plucker {
        #[arg(long)]
        matrix: String,
        #[arg(long, value_enum, default_value_t = Norm::Default)]
        normalize: Norm,
        /// Exact rational arithmetic.
        #[arg(long)]
        exact: bool,
    },
    /// Positivity class of a matrix or Plücker vector.
    Classify {
        #[arg(long, conflicts_with = "plucker", required_unless_present = "plucker")]
        matrix: Option<String>,
        #[arg(long)]
        plucker: Option<String>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        exact: bool,
    },
    /// Evaluates a flow at one time.
    #[command(subcommand)]
    Flow(FlowCommand),
    /// The ball maps: retraction to the sphere of radius r, or its inverse.
    Ballmap(BallmapArgs),
    /// Runs a verification suite and prints a JSON report.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Size cap for exhaustive loops.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Noncrossing partitions.
    #[command(subcommand)]
    Nc(NcCommand),
    /// Electrical networks.
    #[command(subcommand)]
    Elec(ElecCommand),
    /// Amplituhedron projections and hulls.
    #[command(subcommand)]
    Amp(AmpCommand),
    /// Samples a flow over a time grid and writes CSV.
    Trajectory(TrajectoryArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Norm {
    Default,
    MaxAbs,
    FirstNonzero,
    Raw,
}

#[derive(Subcommand)]
enum FlowCommand {
    /// `f(t, A)` on the chart of Gr(k, n).
    Gr {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        /// k x (n-k) chart point, flat or as rows.
        #[arg(long)]
        point: String,
    },
    /// `a(t) . x` on unipotent matrices.
    U {
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        /// Full matrix, or the flat list x12, x13, .., x23, ..
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 2.0)]
        c: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// `f_0(t, A')` on the amplituhedron chart.
    Amp {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        /// k x m point, flat or as rows.
        #[arg(long)]
        point: String,
    },
}

#[derive(Args)]
struct BallmapArgs {
    #[arg(long, value_enum)]
    flow: Space,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 2.0)]
    c: f64,
    #[arg(long)]
    point: String,
    #[arg(long, default_value_t = 0.5)]
    r: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Apply the extension from the ball instead of the retraction.
    #[arg(long)]
    inverse: bool,
}

#[derive(Subcommand)]
enum NcCommand {
    /// Every noncrossing partition of the odd labels of [2n].
    List {
        #[arg(long)]
        n: usize,
    },
    /// The vector `A_sigma`.
    Asigma {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        sigma: String,
    },
}

#[derive(Subcommand)]
enum ElecCommand {
    /// Response matrix of a network.
    Response {
        #[arg(long)]
        graph: String,
        /// Floating point conductances.
        #[arg(long)]
        float: bool,
    },
    /// A totally nonnegative point of X_n.
    Xn {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
}

#[derive(Subcommand)]
enum AmpCommand {
    /// Projects a chart point, or a Grassmann matrix through Z0.
    Project {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, conflicts_with = "matrix", required_unless_present = "matrix")]
        point: Option<String>,
        #[arg(long)]
        matrix: Option<String>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Facets of the cyclic polytope (k = 1).
    Hull {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

#[derive(Args)]
struct TrajectoryArgs {
    #[arg(long, value_enum)]
    space: Space,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 2.0)]
    c: f64,
    /// Chart point (gr, amp).
    #[arg(long)]
    point: Option<String>,
    /// Grassmann matrix (gr) or unipotent matrix (u).
    #[arg(long)]
    matrix: Option<String>,
    /// Comma-separated times.
    #[arg(long, allow_hyphen_values = true)]
    t: String,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<String>,
}

type Out = Result<Value, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| usage(format!("--{flag} is required here")))
}

fn normalization<T: Scalar>(n: Norm) -> Normalization {
    match n {
        Norm::Default => Normalization::default_for::<T>(),
        Norm::MaxAbs => Normalization::MaxAbs,
        Norm::FirstNonzero => Normalization::FirstNonzero,
        Norm::Raw => Normalization::Raw,
    }
}

fn is_rational(v: &Value) -> bool {
    v.get("scalar").and_then(Value::as_str) == Some("rational")
}

fn plucker_cmd<T: Scalar>(v: &Value, norm: Norm) -> Out {
    let m: Matrix<T> = matrix_value(v)?;
    let p = plucker_raw(&m)?.normalized(normalization::<T>(norm));
    Ok(plucker_to_json(&p))
}

fn class_json(c: &PositivityClass) -> Value {
    let key = |s: &[usize]| s.iter().map(|x| (x + 1).to_string()).collect::<Vec<_>>().join(",");
    match c {
        PositivityClass::TotallyPositive { weakest } => json!({"class": c.label(), "weakest": key(weakest)}),
        PositivityClass::Boundary { zero_at } => json!({"class": c.label(), "zero_at": key(zero_at)}),
        PositivityClass::NotTnn { positive_at, negative_at } => {
            json!({"class": c.label(), "positive_at": key(positive_at), "negative_at": key(negative_at)})
        }
    }
}

fn classify_cmd<T: Scalar>(matrix: Option<&Value>, pl: Option<&Value>, tol: f64) -> Out {
    let p: PluckerVector<T> = match (matrix, pl) {
        (Some(m), _) => plucker_raw(&matrix_value::<T>(m)?)?,
        (None, Some(p)) => plucker_from_json(p)?,
        (None, None) => return Err(usage("give --matrix or --plucker")),
    };
    let p = p.normalized(Normalization::MaxAbs);
    Ok(class_json(&classify_positivity(&p, tol)))
}

fn chart_point(k: usize, cols: usize, arg: &str) -> Result<ChartPoint, CliError> {
    let flat = read_floats(arg)?;
    if flat.len() != k * cols {
        return Err(usage(format!("point needs {} entries, got {}", k * cols, flat.len())));
    }
    Ok(ChartPoint::from_flat(k, cols + k, &flat)?)
}

fn unipotent_arg(arg: &str, n: Option<usize>) -> Result<UnipotentMatrix<f64>, CliError> {
    let v = read_json(arg)?;
    let nested = matches!(&v, Value::Object(_)) || v.as_array().is_some_and(|a| a.iter().any(Value::is_array));
    if nested {
        return Ok(UnipotentMatrix::new(matrix_value(&v)?)?);
    }
    let flat = read_floats(arg)?;
    let n = match n {
        Some(n) => n,
        None => (2..64)
            .find(|n| n * (n - 1) / 2 == flat.len())
            .ok_or_else(|| usage(format!("{} entries is not n(n-1)/2", flat.len())))?,
    };
    Ok(UnipotentMatrix::from_upper(n, &flat)?)
}

fn flow_cmd(cmd: FlowCommand) -> Out {
    match cmd {
        FlowCommand::Gr { k, n, t, point } => {
            let eig = TauEigensystem::new(k, n)?;
            let a = chart_point(k, n.saturating_sub(k), &point)?;
            let at = eig.flow_chart(t, &a)?;
            let p = plucker_raw(&eig.chart_embed(&at)?)?.normalized(Normalization::MaxAbs);
            Ok(json!({
                "t": t,
                "point": at.a.to_rows(),
                "norm": at.norm(),
                "plucker": plucker_to_json(&p),
                "class": class_json(&classify_positivity(&p, 1e-9)),
            }))
        }
        FlowCommand::U { t, matrix, n, c, tol } => {
            let x = unipotent_arg(&matrix, n)?;
            let xt = a_flow(&t, &x)?;
            let b = b_coords(&xt, &c)?;
            let class = classify_u_positivity(&xt, tol);
            Ok(json!({
                "t": t,
                "matrix": xt.matrix().to_rows(),
                "b": b.values,
                "norm": b.norm_inf(),
                "class": class.label(),
                "witness": class,
            }))
        }
        FlowCommand::Amp { k, m, n, t, point } => {
            let spec = build_spec(k, m, n)?;
            let flat = read_floats(&point)?;
            if flat.len() != k * m {
                return Err(usage(format!("point needs {} entries, got {}", k * m, flat.len())));
            }
            let p = AmplituhedronPoint { a: Matrix::new(k, m, flat)? };
            let q = spec.flow_m(t, &p)?;
            Ok(json!({"t": t, "point": q.a.to_rows()}))
        }
    }
}

fn ballmap<F: ContractiveFlow + ?Sized>(f: &F, args: &BallmapArgs) -> Out {
    let p = read_floats(&args.point)?;
    if p.len() != f.dim() {
        return Err(usage(format!("point needs {} entries, got {}", f.dim(), p.len())));
    }
    let res = if args.inverse {
        extend_from_ball(f, &p, args.r, args.tol)?
    } else {
        retract_to_ball(f, &p, args.r, args.tol)?
    };
    Ok(json!({
        "map": if args.inverse { "extend" } else { "retract" },
        "membership": f.membership(&p, args.tol),
        "result": res,
    }))
}

fn ballmap_cmd(args: &BallmapArgs) -> Out {
    match args.flow {
        Space::Gr => {
            let k = need(args.k, "k")?;
            ballmap(&GrChartFlow::new(TauEigensystem::new(k, args.n)?), args)
        }
        Space::U => ballmap(&UnipotentFlow::new(args.n, args.c)?, args),
        Space::Amp => {
            let k = args.k.unwrap_or(1);
            if k != 1 {
                return Err(usage("ball maps on the amplituhedron need k = 1"));
            }
            let spec = build_spec(1, need(args.m, "m")?, args.n)?;
            ballmap(&AmpFlow::new(spec, 1e-9)?, args)
        }
    }
}

fn nc_cmd(cmd: NcCommand) -> Out {
    match cmd {
        NcCommand::List { n } => {
            let all: Vec<String> = enumerate_nc(n)?.iter().map(|s| s.to_string()).collect();
            Ok(json!({"n": n, "count": all.len(), "partitions": all}))
        }
        NcCommand::Asigma { n, sigma } => {
            let s = NoncrossingPartition::parse(n, &sigma).map_err(|e| usage(e.to_string()))?;
            let support: serde_json::Map<String, Value> =
                a_sigma(&s).support().into_iter().map(|(k, c)| (k, json!(c))).collect();
            Ok(json!({"n": n, "sigma": s.to_string(), "kreweras": s.kreweras(), "coords": support}))
        }
    }
}

fn response_json<T: Scalar>(graph: &str) -> Out {
    let net = read_network::<T>(graph)?;
    let lam = response_matrix(&net)?;
    Ok(json!({
        "boundary": net.boundary(),
        "response": matrix_to_json(&lam.matrix),
        "symmetric": lam.is_symmetric(1e-9),
        "row_sums_vanish": lam.row_sums_vanish(1e-9),
    }))
}

fn elec_cmd(cmd: ElecCommand) -> Out {
    match cmd {
        ElecCommand::Response { graph, float } => {
            if float {
                response_json::<f64>(&graph)
            } else {
                response_json::<Rational>(&graph)
            }
        }
        ElecCommand::Xn { n, seed, tol } => {
            let h = h_subspace(n)?;
            let res = xn_search(&h, seed, tol)?;
            let v = json!({"h_rank": h.rank, "result": res});
            if res.converged {
                Ok(v)
            } else {
                println!("{}", serde_json::to_string_pretty(&v).expect("json"));
                Err(CliError::Failure(format!("no point of X_{n} found to tolerance {tol}")))
            }
        }
    }
}

fn amp_cmd(cmd: AmpCommand) -> Out {
    match cmd {
        AmpCommand::Project { k, m, n, point, matrix, tol } => {
            let spec = build_spec(k, m, n)?;
            let q = match (point, matrix) {
                (Some(p), _) => spec.chart_project(&chart_point(k, n.saturating_sub(k), &p)?)?,
                (None, Some(mx)) => spec.amplituhedron_map(&read_matrix::<f64>(&mx)?, tol)?,
                (None, None) => return Err(usage("give --point or --matrix")),
            };
            let mut out = json!({"k": k, "m": m, "n": n, "point": q.a.to_rows()});
            if k == 1 {
                let hull = cyclic_polytope_oracle(&spec, tol)?;
                out["membership"] = json!(hull.classify(&q.flat(), tol)?);
            }
            Ok(out)
        }
        AmpCommand::Hull { k, m, n, tol } => {
            if k != 1 {
                return Err(usage(format!("hull needs k = 1, got k = {k}")));
            }
            let spec = build_spec(k, m, n)?;
            let hull = cyclic_polytope_oracle(&spec, tol)?;
            Ok(json!({"k": k, "m": m, "n": n, "vertices": spec.vertex_images()?, "hull": hull}))
        }
    }
}

fn trajectory_table(args: &TrajectoryArgs) -> Result<Table, CliError> {
    let ts = parse_grid(&args.t)?;
    match args.space {
        Space::Gr => {
            let (k, n) = (need(args.k, "k")?, need(args.n, "n")?);
            let eig = TauEigensystem::new(k, n)?;
            let a = match (&args.point, &args.matrix) {
                (Some(p), _) => chart_point(k, n.saturating_sub(k), p)?,
                (None, Some(m)) => eig.chart_invert(&read_matrix::<f64>(m)?)?,
                (None, None) => ChartPoint::zeros(k, n),
            };
            Ok(gr_trajectory(&eig, &a, &ts)?)
        }
        Space::U => {
            let x = unipotent_arg(&need(args.matrix.clone(), "matrix")?, args.n)?;
            Ok(u_trajectory(&x, args.c, &ts)?)
        }
        Space::Amp => {
            let (k, m, n) = (args.k.unwrap_or(1), need(args.m, "m")?, need(args.n, "n")?);
            let spec = build_spec(k, m, n)?;
            let a = match &args.point {
                Some(p) => chart_point(k, n.saturating_sub(k), p)?,
                None => ChartPoint::zeros(k, n),
            };
            Ok(amp_trajectory(&spec, &a, &ts)?)
        }
    }
}

fn trajectory_cmd(args: &TrajectoryArgs) -> Result<(), CliError> {
    let table = trajectory_table(args)?;
    match &args.out {
        Some(path) => table.write_csv(File::create(path)?)?,
        None => table.write_csv(io::stdout().lock())?,
    }
    Ok(())
}

fn emit(v: &Value) {
    let mut out = io::stdout().lock();
    let _ = writeln!(out, "{}", serde_json::to_string_pretty(v).expect("json"));
}

fn run(cli: Cli) -> Result<(), CliError> {
    let value = match cli.command {
        Command::Plucker { matrix, normalize, exact } => {
            let v = read_json(&matrix)?;
            if exact || is_rational(&v) {
                plucker_cmd::<Rational>(&v, normalize)?
            } else {
                plucker_cmd::<f64>(&v, normalize)?
            }
        }
        Command::Classify { matrix, plucker, tol, exact } => {
            let m = matrix.as_deref().map(read_json).transpose()?;
            let p = plucker.as_deref().map(read_json).transpose()?;
            if exact || m.as_ref().is_some_and(is_rational) {
                classify_cmd::<Rational>(m.as_ref(), p.as_ref(), tol)?
            } else {
                classify_cmd::<f64>(m.as_ref(), p.as_ref(), tol)?
            }
        }
        Command::Flow(cmd) => flow_cmd(cmd)?,
        Command::Ballmap(args) => ballmap_cmd(&args)?,
        Command::Verify { suite, n, seed, tol } => {
            let report = run_verify_suite(suite, &VerifyConfig { seed, tol, n });
            emit(&json!(report));
            if !report.pass() {
                return Err(CliError::Failure(format!("{} case(s) failed", report.failures.len())));
            }
            return Ok(());
        }
        Command::Nc(cmd) => nc_cmd(cmd)?,
        Command::Elec(cmd) => elec_cmd(cmd)?,
        Command::Amp(cmd) => amp_cmd(cmd)?,
        Command::Trajectory(args) => return trajectory_cmd(&args),
    };
    emit(&value);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code() as u8)
        }
    }
}
