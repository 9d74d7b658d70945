use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lowent::expanders::{
    cone_extract, convergence_rate_fit, solve_expander_curve, solve_expander_curve_for_slope, solve_expander_profile,
    ScaledFamily,
};
use lowent::gaussian::{entropy_sup, gaussian_tail, truncation_radius, EntropyBranch, SearchConfig};
use lowent::geom::Surface;
use lowent::mcf::{curvature_at_samples, flow, FlowConfig};
use lowent::reifenberg::{default_p_samples, dyadic_radii, planar_distance};
use lowent::spec::SurfaceSpec;
use lowent::table::{emit_csv, format_real, Cell, Table};
use lowent::verify::{run_verify, Suite};

#[derive(Parser, Debug)]
#[command(name = "lowent", version, about = "Gaussian entropy, flatness, flows and expanders of sampled submanifolds")]
struct Cli {
    /// Write the command's table to this CSV file.
    #[arg(long, global = true, value_name = "PATH")]
    csv: Option<PathBuf>,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true, value_name = "N", value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
    /// Seed for randomized scenarios; recorded in the verify report.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Entropy estimate of a surface.
    Entropy(EntropyArgs),
    /// Run mean curvature flow and record the track.
    Flow(FlowArgs),
    /// Reifenberg planar scores over sample points and dyadic scales.
    Reifenberg(ReifenbergArgs),
    /// Solve a graphical self-expander and its cone.
    Expander(ExpanderArgs),
    /// Run the acceptance scenarios.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct EntropyArgs {
    /// Surface description file.
    #[arg(long, value_name = "FILE")]
    surface: PathBuf,
    /// Gaussian tail tolerance for the truncation radius.
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    /// Entropy bound used for the truncation radius (defaults to the estimate).
    #[arg(long, value_name = "B")]
    declare_lambda: Option<f64>,
    /// Treat the surface as complete and noncompact.
    #[arg(long)]
    noncompact: bool,
    #[arg(long)]
    points_per_axis: Option<usize>,
}

#[derive(Args, Debug)]
struct FlowArgs {
    /// Surface description file.
    #[arg(long, value_name = "FILE")]
    surface: PathBuf,
    /// End time.
    #[arg(long = "T", value_name = "T")]
    end_time: f64,
    /// Recording cadence.
    #[arg(long, default_value_t = 0.01)]
    record: f64,
    /// Target edge length for polyline remeshing.
    #[arg(long)]
    h_min: Option<f64>,
    /// Fixed time step; must respect the explicit stability bound.
    #[arg(long)]
    dt: Option<f64>,
}

#[derive(Args, Debug)]
struct ReifenbergArgs {
    /// Surface description file.
    #[arg(long, value_name = "FILE")]
    surface: PathBuf,
    /// Largest scale; smaller scales halve down to four sample spacings.
    #[arg(long)]
    rmax: f64,
    /// Use every `stride`-th sample as a base point.
    #[arg(long, default_value_t = 1)]
    stride: usize,
}

#[derive(Args, Debug)]
struct ExpanderArgs {
    /// Asymptotic cone slope (solves for the height).
    #[arg(long, conflicts_with = "height", required_unless_present = "height")]
    slope: Option<f64>,
    /// Height at the axis (curves only).
    #[arg(long)]
    height: Option<f64>,
    /// Dimension of the expander.
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Half-length of the solved interval.
    #[arg(long = "L", value_name = "L", default_value_t = 20.0)]
    length: f64,
    /// Integration step.
    #[arg(long, default_value_t = 1e-3)]
    h: f64,
    /// Extract the cone and fit the convergence rate.
    #[arg(long)]
    rate_fit: bool,
    #[arg(long, default_value_t = 5.0)]
    radius: f64,
    #[arg(long, default_value_t = 1e-4)]
    t_min: f64,
    #[arg(long, default_value_t = 1e-1)]
    t_max: f64,
    #[arg(long, default_value_t = 10)]
    t_count: usize,
    /// Sample spacing of the rescaled surfaces (defaults to 5e-4 for curves, 1e-2 otherwise).
    #[arg(long)]
    spacing: Option<f64>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value = "all")]
    suite: Suite,
}

/// Failure classes mapped to exit codes.
enum Failure {
    Usage(String),
    Run(String),
}

impl From<lowent::Error> for Failure {
    fn from(e: lowent::Error) -> Self {
        Failure::Run(e.to_string())
    }
}

fn load_surface(path: &Path) -> Result<Surface, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let spec = SurfaceSpec::parse(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Ok(spec.build()?)
}

fn write_table(csv: &Option<PathBuf>, table: &Table) -> Result<(), Failure> {
    if let Some(path) = csv {
        emit_csv(table, path)?;
    }
    Ok(())
}

fn numbered(prefix: &str, count: usize) -> Vec<String> {
    (0..count).map(|i| format!("{prefix}{i}")).collect()
}

fn entropy(cli: &Cli, a: &EntropyArgs) -> Result<(), Failure> {
    let s = load_surface(&a.surface)?.to_sampled();
    let cfg = SearchConfig {
        points_per_axis: a.points_per_axis,
        noncompact_eps: a.noncompact.then_some(a.eps),
        ..SearchConfig::default()
    };
    let est = entropy_sup(&s, &cfg)?;
    let lambda = a.declare_lambda.unwrap_or(est.value.max(1.0));
    let radius = truncation_radius(s.dims(), lambda, a.eps)?;
    let tail = gaussian_tail(&s, &est.argmax, radius)?;
    let branch = match est.branch {
        EntropyBranch::Attained => "attained",
        EntropyBranch::PlanarLimit => "planar-limit",
    };
    println!("entropy {}", format_real(est.value));
    let x0: Vec<String> = est.argmax.x0.iter().map(|x| format_real(*x)).collect();
    println!("argmax x0 = ({}), t0 = {}", x0.join(", "), format_real(est.argmax.t0));
    println!("truncation radius {} (lambda {}), tail {}", format_real(radius), format_real(lambda), format_real(tail));

    let d = s.ambient();
    let mut header = vec!["value".to_string(), "t0".into()];
    header.extend(numbered("x0_", d));
    header
        .extend(["lambda", "truncation_radius", "tail", "grid_value", "probes", "refined", "branch"].map(String::from));
    header.extend(numbered("resolution_", d));
    header.push("resolution_log_t0".into());
    let mut row: Vec<Cell> = vec![est.value.into(), est.argmax.t0.into()];
    row.extend(est.argmax.x0.iter().map(|&x| Cell::Real(x)));
    row.extend([
        lambda.into(),
        radius.into(),
        tail.into(),
        est.grid_value.into(),
        est.probes.into(),
        est.refined.into(),
        branch.into(),
    ]);
    row.extend(est.grid_resolution.iter().map(|&x| Cell::Real(x)));
    let mut t = Table::new(header);
    t.push(row);
    write_table(&cli.csv, &t)
}

fn run_flow(cli: &Cli, a: &FlowArgs) -> Result<(), Failure> {
    let surface = load_surface(&a.surface)?;
    let cfg = FlowConfig { h_min: a.h_min, dt: a.dt, ..FlowConfig::new(a.end_time, a.record) };
    let track = flow(&surface, &cfg)?;
    let ev = track.events();
    println!(
        "recorded {} states on [{}, {}]",
        track.len(),
        format_real(track.start_time()),
        format_real(track.end_time())
    );
    println!("stop: {:?}", ev.stop);
    if let Some(t) = ev.extinction {
        println!("extinction at {}", format_real(t));
    }
    if cli.csv.is_none() {
        return Ok(());
    }
    let d = track.dims().ambient();
    let mut header = vec!["time".to_string(), "sample".into()];
    header.extend(numbered("x", d));
    header.extend(["weight".to_string(), "abs_a".into()]);
    let mut t = Table::new(header);
    for (i, &time) in track.times().iter().enumerate() {
        let s = track.sampled(i);
        let a = match track.state(i) {
            Surface::Sampled(_) => vec![f64::NAN; s.len()],
            state => curvature_at_samples(state, s)?,
        };
        for (j, (p, w)) in s.iter().enumerate() {
            let mut row: Vec<Cell> = vec![time.into(), j.into()];
            row.extend(p.iter().map(|&x| Cell::Real(x)));
            row.extend([w.into(), a[j].into()]);
            t.push(row);
        }
    }
    write_table(&cli.csv, &t)
}

fn reifenberg(cli: &Cli, a: &ReifenbergArgs) -> Result<(), Failure> {
    if a.rmax.is_nan() || a.rmax <= 0.0 {
        return Err(Failure::Usage("--rmax must be positive".into()));
    }
    let s = load_surface(&a.surface)?.to_sampled();
    let radii = dyadic_radii(s.spacing(), a.rmax);
    if radii.is_empty() {
        return Err(Failure::Usage(format!("--rmax below four sample spacings ({})", format_real(4.0 * s.spacing()))));
    }
    let pd = planar_distance(&s, &default_p_samples(&s, a.stride), &radii)?;
    println!("planar distance {}", format_real(pd.estimate));
    let at: Vec<String> = pd.worst.p.iter().map(|x| format_real(*x)).collect();
    println!("worst cell: p = ({}) at R = {}", at.join(", "), format_real(pd.worst.radius));
    if !pd.skipped.is_empty() {
        eprintln!("{} cells skipped", pd.skipped.len());
    }
    let dims = s.dims();
    let d = dims.ambient();
    let mut header = numbered("p", d);
    header.extend(["radius", "score", "pca_score"].map(String::from));
    header.extend(numbered("base_", d));
    for i in 0..dims.n {
        header.extend(numbered(&format!("frame{i}_"), d));
    }
    let mut t = Table::new(header);
    for c in &pd.scores {
        let mut row: Vec<Cell> = c.p.iter().map(|&x| Cell::Real(x)).collect();
        row.extend([c.radius.into(), c.score.into(), c.pca_score.into()]);
        row.extend(c.plane.base().iter().map(|&x| Cell::Real(x)));
        row.extend(c.plane.frame().iter().map(|&x| Cell::Real(x)));
        t.push(row);
    }
    write_table(&cli.csv, &t)
}

fn log_times(hi: f64, lo: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| hi * (lo / hi).powf(i as f64 / (count - 1) as f64)).collect()
}

fn rate_table(cli: &Cli, a: &ExpanderArgs, sigma: &impl ScaledFamily, spacing: f64) -> Result<(), Failure> {
    if a.t_count < 6 || !(a.t_min > 0.0 && a.t_min < a.t_max && a.t_max <= 1.0) {
        return Err(Failure::Usage("need --t-count >= 6 and 0 < --t-min < --t-max <= 1".into()));
    }
    let t = log_times(a.t_max, a.t_min, a.t_count);
    let tail = &t[t.len().saturating_sub(5)..];
    let ex = cone_extract(sigma, tail, a.radius, spacing)?;
    let fit = convergence_rate_fit(sigma, &ex.cone, a.radius, &t, spacing)?;
    println!("cone link: {} directions", ex.cone.len());
    match (fit.exponent, fit.coefficient) {
        (Some(p), Some(c)) => println!("rate p = {}, C_fit = {}", format_real(p), format_real(c)),
        _ => println!("every distance below the resolution floor {}", format_real(fit.floor)),
    }
    let mut table = Table::new(["t", "dist", "p", "c_fit"]);
    let (p, c) = (fit.exponent.unwrap_or(f64::NAN), fit.coefficient.unwrap_or(f64::NAN));
    for (&(ti, di), _) in fit.samples.iter().zip(&fit.kept).filter(|(_, k)| **k) {
        table.push(vec![ti.into(), di.into(), p.into(), c.into()]);
    }
    write_table(&cli.csv, &table)
}

fn expander(cli: &Cli, a: &ExpanderArgs) -> Result<(), Failure> {
    match a.n {
        1 => {
            let curve = match (a.slope, a.height) {
                (Some(m), _) => solve_expander_curve_for_slope(m, a.length, a.h)?,
                (None, Some(b)) => solve_expander_curve(b, a.length, a.h)?,
                (None, None) => unreachable!("clap requires one of --slope, --height"),
            };
            println!("height {}", format_real(curve.height()));
            println!("asymptotic slope {}", format_real(curve.asymptotic_slopes().1));
            println!("residual {}", format_real(curve.residual()));
            if a.rate_fit {
                rate_table(cli, a, &curve, a.spacing.unwrap_or(5e-4))?;
            } else {
                let mut t = Table::new(["x", "u", "du"]);
                let p = curve.to_polyline(1);
                for v in p.vertices().chunks(2) {
                    t.push(vec![v[0].into(), v[1].into(), curve.eval(v[0]).1.into()]);
                }
                write_table(&cli.csv, &t)?;
            }
        }
        n => {
            let Some(m) = a.slope else {
                return Err(Failure::Usage("profile expanders (n >= 2) are specified by --slope".into()));
            };
            let profile = solve_expander_profile(n, m, a.length, a.h)?;
            println!("height {}", format_real(profile.height()));
            println!("achieved slope {}", format_real(profile.achieved_slope()));
            println!("residual {}", format_real(profile.residual()));
            if a.rate_fit {
                rate_table(cli, a, &profile, a.spacing.unwrap_or(1e-2))?;
            } else {
                let mut t = Table::new(["r", "f", "df"]);
                let count = (a.length / a.h).round() as usize;
                for i in 0..=count {
                    let r = a.length * i as f64 / count as f64;
                    let (f, df) = profile.eval(r);
                    t.push(vec![r.into(), f.into(), df.into()]);
                }
                write_table(&cli.csv, &t)?;
            }
        }
    }
    Ok(())
}

fn verify(cli: &Cli, a: &VerifyArgs) -> Result<bool, Failure> {
    let report = run_verify(a.suite, cli.seed);
    print!("{}", report.render_text());
    write_table(&cli.csv, &report.to_table())?;
    Ok(report.overall())
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    match &cli.command {
        Command::Entropy(a) => entropy(cli, a).map(|_| true),
        Command::Flow(a) => run_flow(cli, a).map(|_| true),
        Command::Reifenberg(a) => reifenberg(cli, a).map(|_| true),
        Command::Expander(a) => expander(cli, a).map(|_| true),
        Command::Verify(a) => verify(cli, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
