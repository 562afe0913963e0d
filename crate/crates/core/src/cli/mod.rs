//! Command-line front end. Every command prints a JSON [`Report`] (or writes
//! it to `--out`); `lift`, `abnormal` and `jet lift` write their primary
//! artifact to `--out` instead and print the report.

pub mod report;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::annih::{integrate_characteristic, restricted_kernel, CovectorPoint};
use crate::dist::{lie_flag, Distribution, GrowthVector};
use crate::endpoint::{
    classify_curve, deform_fixed_endpoints, endpoint, lift_curve, reduced_endpoint, Bump, ClassifyOptions,
    CurveDocument, DEFAULT_STEP,
};
use crate::error::{Error, Result};
use crate::jets::{
    dimension_audit, ehresmann_jet_lift, is_characteristic_jet, is_horizontal_jet, kernel_rank_at_base,
    lift_parametrization_rank, microregularity, CurveJet, JetAmbient, JetDocument,
};
use crate::linalg::{LinearScalar, DEFAULT_RANK_TOL};
use crate::scalar::Rational;
use crate::strata::{minors, partition_grid, partition_grid_float, Ambient, FunctionMatrix, Grid, StratumDocument, StratumSpec};
use crate::symca::{vars_from, MultiPoly};

use report::{
    format_trajectory, load_model, parse_json, parse_vector, read_file, write_atomic, Exactness, InputLog,
    LoadedModel, Report,
};

#[derive(Debug, Parser)]
#[command(name = "microreg", version, about = "Horizontal curves of polynomial distributions")]
pub struct Cli {
    /// Exact rational arithmetic where the command supports both modes.
    #[arg(long, global = true, conflicts_with = "float")]
    pub exact: bool,
    /// Floating-point arithmetic where the command supports both modes.
    #[arg(long, global = true)]
    pub float: bool,
    /// Output file (the trajectory or jet for `lift`, `abnormal`, `jet lift`;
    /// the report otherwise).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Distribution summaries.
    #[command(subcommand)]
    Dist(DistCommand),
    /// Lift a control curve to a horizontal path.
    Lift(CurveArgs),
    /// Regular / singular / inconclusive verdict for a curve.
    Classify(ClassifyArgs),
    /// Deform a regular curve by a bump keeping both endpoints fixed.
    Deform(DeformArgs),
    /// Integrate the characteristic line field on a stratum of Z1.
    Abnormal(AbnormalArgs),
    /// Jet lifts and tests.
    #[command(subcommand)]
    Jet(JetCommand),
    /// Dimension and codimension audit over a range of jet orders.
    Audit(AuditArgs),
    /// Rank partition of a polynomial matrix over a rational grid.
    Strata(StrataArgs),
}

#[derive(Debug, Subcommand)]
pub enum DistCommand {
    Info {
        model: String,
        /// Comma-separated base point.
        #[arg(long)]
        point: Option<String>,
    },
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    model: String,
    /// Curve document `{basepoint, controls}`.
    #[arg(long)]
    curve: PathBuf,
    #[arg(long, default_value_t = DEFAULT_STEP)]
    step: f64,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    curve: CurveArgs,
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    #[arg(long, default_value_t = 1e-8)]
    tol_low: f64,
    /// Number of bump directions (default 6(m − l)).
    #[arg(long)]
    directions: Option<usize>,
    #[arg(long, default_value_t = 1e-5)]
    h_fd: f64,
}

impl ClassifyArgs {
    fn options(&self) -> ClassifyOptions {
        ClassifyOptions {
            directions: self.directions,
            h_fd: self.h_fd,
            tol: self.tol,
            tol_low: self.tol_low,
            step: self.curve.step,
        }
    }
}

#[derive(Debug, Args)]
pub struct DeformArgs {
    #[command(flatten)]
    classify: ClassifyArgs,
    /// Control channel of the bump (0-based).
    #[arg(long, default_value_t = 0)]
    channel: usize,
    #[arg(long, default_value_t = 1.0)]
    frequency: f64,
    #[arg(long, default_value_t = 0.1)]
    amplitude: f64,
    /// Number of deformation steps S.
    #[arg(long, default_value_t = 10)]
    steps: usize,
}

#[derive(Debug, Args)]
pub struct AbnormalArgs {
    model: String,
    /// `base;fiber`, e.g. `0,0,0;1`, or a covector document `{base, fiber}`.
    #[arg(long)]
    covector: String,
    /// Stratum name in the model, or a stratum document.
    #[arg(long)]
    stratum: String,
    #[arg(long, default_value_t = 1.0)]
    time: f64,
    #[arg(long, default_value_t = DEFAULT_STEP)]
    step: f64,
}

#[derive(Debug, Subcommand)]
pub enum JetCommand {
    /// Formal Ehresmann lift of polynomial controls.
    Lift {
        model: String,
        /// Comma-separated polynomials in `t`, one per control channel.
        #[arg(long)]
        controls: String,
        #[arg(long)]
        order: usize,
        /// Comma-separated vertical base point (default zero).
        #[arg(long)]
        vertical: Option<String>,
    },
    /// Horizontality and stratum-family membership of an M-jet.
    Check {
        model: String,
        /// Jet document, or a report whose results contain `jet`.
        #[arg(long)]
        jet: PathBuf,
    },
    /// Characteristic test for a Z1-jet.
    Characteristic {
        model: String,
        #[arg(long)]
        jet: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    model: String,
    /// Inclusive range `a..b`.
    #[arg(long, default_value = "2..12")]
    orders: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixKind {
    Flag,
    Custom,
}

#[derive(Debug, Args)]
pub struct StrataArgs {
    model: String,
    #[arg(long, value_enum, default_value_t = MatrixKind::Flag)]
    matrix: MatrixKind,
    /// Matrix document `{rows: [[poly]]}` over the model coordinates.
    #[arg(long)]
    matrix_file: Option<PathBuf>,
    /// Flag level (default: the first level reaching full rank on the grid).
    #[arg(long)]
    level: Option<usize>,
    /// `v=a:b:n; v=c; v={c1,c2}`; unlisted coordinates are held at 0.
    #[arg(long)]
    grid: String,
    /// Also list all k×k minors.
    #[arg(long)]
    minors: Option<usize>,
}

/// Runs the binary: parses `std::env::args`, prints to stdout and returns the
/// exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let mut stdout = std::io::stdout().lock();
    match run(&cli, &mut stdout) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    let report = match &cli.command {
        Command::Dist(DistCommand::Info { model, point }) => dist_info(cli, model, point.as_deref())?,
        Command::Lift(args) => lift(cli, args)?,
        Command::Classify(args) => classify(cli, args)?,
        Command::Deform(args) => deform(cli, args)?,
        Command::Abnormal(args) => abnormal(cli, args)?,
        Command::Jet(JetCommand::Lift { model, controls, order, vertical }) => {
            jet_lift(cli, model, controls, *order, vertical.as_deref())?
        }
        Command::Jet(JetCommand::Check { model, jet }) => jet_check(cli, model, jet)?,
        Command::Jet(JetCommand::Characteristic { model, jet }) => jet_characteristic(cli, model, jet)?,
        Command::Audit(args) => audit(cli, args)?,
        Command::Strata(args) => strata(cli, args)?,
    };
    let mut text = serde_json::to_string_pretty(&report).map_err(|e| Error::Invariant(e.to_string()))?;
    text.push('\n');
    let report_to_file = matches!(cli.command, Command::Dist(_) | Command::Classify(_) | Command::Deform(_))
        || matches!(cli.command, Command::Jet(JetCommand::Check { .. } | JetCommand::Characteristic { .. }))
        || matches!(cli.command, Command::Audit(_) | Command::Strata(_));
    match (&cli.out, report_to_file) {
        (Some(path), true) => write_atomic(path, text.as_bytes()),
        _ => out.write_all(text.as_bytes()).map_err(Error::from),
    }
}

/// Mode for commands offering both; `None` marks a single-mode command.
fn exactness(cli: &Cli, supported: Option<Exactness>, warnings: &mut Vec<String>) -> Exactness {
    match supported {
        None => {
            if cli.float {
                Exactness::Float
            } else {
                Exactness::Exact
            }
        }
        Some(only) => {
            let asked = if cli.float { Some(Exactness::Float) } else if cli.exact { Some(Exactness::Exact) } else { None };
            if asked.is_some_and(|a| a != only) {
                let name = if only == Exactness::Exact { "exact" } else { "float" };
                warnings.push(format!("this command only runs in {name} mode; the mode flag was ignored"));
            }
            only
        }
    }
}

fn point_or_origin(dist: &Distribution, point: Option<&str>) -> Result<Vec<Rational>> {
    match point {
        None => Ok(vec![Rational::zero(); dist.dim()]),
        Some(p) => {
            let v = parse_vector(p)?;
            crate::error::check_len(dist.dim(), v.len())?;
            Ok(v)
        }
    }
}

/// Growth vector from matrix ranks computed in the requested mode.
fn growth(dist: &Distribution, point: &[Rational], mode: Exactness) -> Result<GrowthVector> {
    let m = dist.dim();
    let flag = lie_flag(dist, m)?;
    let mut ranks = Vec::new();
    for n in 1..=flag.depth() {
        let r = match mode {
            Exactness::Exact => Rational::rank(&flag.level_matrix_at(n, point)?, 0.0),
            Exactness::Float => {
                let p: Vec<f64> = point.iter().map(Rational::to_f64).collect();
                f64::rank(&flag.level_matrix_at(n, &p)?, DEFAULT_RANK_TOL)
            }
        };
        ranks.push(r);
        if r == m {
            break;
        }
    }
    Ok(GrowthVector(ranks))
}

fn dist_info(cli: &Cli, model_arg: &str, point: Option<&str>) -> Result<Report> {
    let loaded = load_model(model_arg)?;
    let dist = &loaded.model.dist;
    let mut warnings = Vec::new();
    let mode = exactness(cli, None, &mut warnings);
    let p = point_or_origin(dist, point)?;
    let mut log = InputLog::new(&loaded);
    log.option("point", &p);
    let g = growth(dist, &p, mode)?;
    // Ranks are lower semicontinuous, so the componentwise maximum over a few
    // generic perturbations of the point is the generic growth vector.
    let offsets = [Rational::new(1, 3), Rational::new(2, 7), Rational::new(3, 11), Rational::new(5, 13)];
    let mut generic = g.0.clone();
    for k in 1..=3i64 {
        let probe: Vec<Rational> = p
            .iter()
            .enumerate()
            .map(|(i, x)| x + &(&offsets[i % offsets.len()] * &Rational::integer(k * (1 + i as i64))))
            .collect();
        let pg = growth(dist, &probe, mode)?;
        generic.resize(generic.len().max(pg.0.len()), 0);
        for (i, r) in pg.0.iter().enumerate() {
            generic[i] = generic[i].max(*r);
        }
    }
    if let Some(i) = generic.iter().position(|&r| r == dist.dim()) {
        generic.truncate(i + 1);
    }
    let generic = GrowthVector(generic);
    let results = json!({
        "name": dist.name(),
        "dim": dist.dim(),
        "rank": dist.rank(),
        "corank": dist.corank(),
        "coords": &dist.coords()[..],
        "frame": dist.frame().iter().map(|f| f.to_string()).collect::<Vec<_>>(),
        "coframe": dist.coframe().iter().map(|a| a.to_string()).collect::<Vec<_>>(),
        "point": p,
        "growth_vector": g.0,
        "step": g.step(dist.dim()),
        "generic_growth_vector": generic.0,
        "regular_at_point": g == generic,
        "strata": loaded.model.strata.iter().map(|s| s.name.clone()).collect::<Vec<_>>(),
    });
    log.finish("dist info", mode, results, warnings)
}

fn load_curve(args: &CurveArgs, log: &mut InputLog) -> Result<CurveDocument> {
    let text = read_file(&args.curve)?;
    log.file("curve", &args.curve, &text);
    log.option("step", args.step);
    parse_json(&text, "curve document")
}

fn lift(cli: &Cli, args: &CurveArgs) -> Result<Report> {
    let loaded = load_model(&args.model)?;
    let dist = &loaded.model.dist;
    let mut warnings = Vec::new();
    let mode = exactness(cli, Some(Exactness::Float), &mut warnings);
    let mut log = InputLog::new(&loaded);
    let doc = load_curve(args, &mut log)?;
    let (control, base) = doc.to_curve()?;
    let path = lift_curve(dist, &control, &base, args.step)?;
    if let Some(out) = &cli.out {
        let header = [
            ("model", dist.name().to_string()),
            ("basepoint", format!("{base:?}")),
            ("step", args.step.to_string()),
            ("max_residual", format!("{:e}", path.max_residual_overall())),
        ];
        let mut columns = vec!["t".to_string()];
        columns.extend(dist.coords().iter().cloned());
        let rows: Vec<Vec<f64>> =
            path.times.iter().zip(&path.states).map(|(t, s)| std::iter::once(*t).chain(s.iter().copied()).collect()).collect();
        write_atomic(out, format_trajectory(&header, &columns, &rows).as_bytes())?;
    }
    let results = json!({
        "endpoint": endpoint(&path),
        "reduced_endpoint": reduced_endpoint(dist, &path),
        "max_residual": path.max_residual,
        "samples": path.times.len(),
        "trajectory": cli.out.as_ref().map(|p| p.display().to_string()),
    });
    log.finish("lift", mode, results, warnings)
}

fn classify(cli: &Cli, args: &ClassifyArgs) -> Result<Report> {
    let loaded = load_model(&args.curve.model)?;
    let mut warnings = Vec::new();
    let mode = exactness(cli, Some(Exactness::Float), &mut warnings);
    let mut log = InputLog::new(&loaded);
    let doc = load_curve(&args.curve, &mut log)?;
    let opts = args.options();
    log.option("classify", opts);
    let (control, base) = doc.to_curve()?;
    let report = classify_curve(&loaded.model.dist, &control, &base, &opts)?;
    log.finish("classify", mode, report, warnings)
}

fn deform(cli: &Cli, args: &DeformArgs) -> Result<Report> {
    let loaded = load_model(&args.classify.curve.model)?;
    let mut warnings = Vec::new();
    let mode = exactness(cli, Some(Exactness::Float), &mut warnings);
    let mut log = InputLog::new(&loaded);
    let doc = load_curve(&args.classify.curve, &mut log)?;
    let opts = args.classify.options();
    let bump = Bump { channel: args.channel, frequency: args.frequency };
    log.option("classify", opts);
    log.option("bump", bump);
    log.option("amplitude", args.amplitude);
    log.option("steps", args.steps);
    let (control, base) = doc.to_curve()?;
    let d = deform_fixed_endpoints(&loaded.model.dist, &control, &base, bump, args.amplitude, args.steps, &opts)?;
    let results = json!({
        "s": d.s,
        "parameters": d.parameters,
        "endpoints": d.paths.iter().map(endpoint).collect::<Vec<_>>(),
        "max_residuals": d.paths.iter().map(|p| p.max_residual_overall()).collect::<Vec<_>>(),
        "endpoint_drift": d.endpoint_drift,
    });
    log.finish("deform", mode, results, warnings)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CovectorDocument {
    base: Vec<Rational>,
    fiber: Vec<Rational>,
}

fn parse_covector(arg: &str, log: &mut InputLog) -> Result<CovectorPoint> {
    let doc = if Path::new(arg).is_file() {
        let text = read_file(Path::new(arg))?;
        log.file("covector", Path::new(arg), &text);
        parse_json::<CovectorDocument>(&text, "covector document")?
    } else {
        let (b, f) = arg
            .split_once(';')
            .ok_or_else(|| Error::InvalidArgument(format!("covector `{arg}` must look like `base;fiber`")))?;
        log.option("covector", arg);
        CovectorDocument { base: parse_vector(b)?, fiber: parse_vector(f)? }
    };
    Ok(CovectorPoint::new(doc.base, doc.fiber))
}

fn parse_stratum(arg: &str, loaded: &LoadedModel, log: &mut InputLog) -> Result<StratumSpec> {
    if let Ok(s) = loaded.model.stratum(arg) {
        log.option("stratum", arg);
        return Ok(s.clone());
    }
    let path = Path::new(arg);
    if !path.is_file() {
        return loaded.model.stratum(arg).cloned();
    }
    let text = read_file(path)?;
    log.file("stratum", path, &text);
    StratumSpec::from_document(&parse_json::<StratumDocument>(&text, "stratum document")?, &loaded.model.dist)
}

fn abnormal(cli: &Cli, args: &AbnormalArgs) -> Result<Report> {
    let loaded = load_model(&args.model)?;
    let dist = &loaded.model.dist;
    let mut warnings = Vec::new();
    let mode = exactness(cli, Some(Exactness::Float), &mut warnings);
    let mut log = InputLog::new(&loaded);
    let cp = parse_covector(&args.covector, &mut log)?;
    let stratum = parse_stratum(&args.stratum, &loaded, &mut log)?;
    log.option("time", args.time);
    log.option("step", args.step);
    if stratum.ambient == Ambient::Z1 {
        warnings.push("invariance of the stratum under fiber dilations is assumed, not verified".into());
    }
    let initial = restricted_kernel(dist, &cp, &stratum)?;
    let traj = integrate_characteristic(dist, &cp, &stratum, args.time, args.step)?;
    if let Some(reason) = &traj.halt_reason {
        warnings.push(format!("integration halted early: {reason}"));
    }
    if let Some(out) = &cli.out {
        let header = [
            ("model", dist.name().to_string()),
            ("cp0", args.covector.clone()),
            ("T", args.time.to_string()),
            ("h", args.step.to_string()),
            ("stratum", stratum.name.clone()),
        ];
        let mut columns = vec!["t".to_string()];
        columns.extend(dist.z1_coords().iter().cloned());
        columns.extend(["kernel_rank".to_string(), "residual".to_string()]);
        let rows: Vec<Vec<f64>> = (0..traj.times.len())
            .map(|i| {
                let mut r = vec![traj.times[i]];
                r.extend(&traj.states[i]);
                r.push(traj.kernel_ranks[i] as f64);
                r.push(traj.residuals[i]);
                r
            })
            .collect();
        write_atomic(out, format_trajectory(&header, &columns, &rows).as_bytes())?;
    }
    let m = dist.dim();
    let results = json!({
        "initial_kernel": initial,
        "samples": traj.times.len(),
        "completed": traj.completed(),
        "final_time": traj.times.last(),
        "final_state": traj.states.last(),
        "projected_endpoint": traj.states.last().map(|s| s[..m].to_vec()),
        "max_residual": traj.residuals.iter().copied().fold(0.0, f64::max),
        "halt_reason": traj.halt_reason,
        "trajectory": cli.out.as_ref().map(|p| p.display().to_string()),
    });
    log.finish("abnormal", mode, results, warnings)
}

/// Control jet of polynomial controls at `t = 0`, truncated at `order`.
fn control_jet(dist: &Distribution, controls: &str, order: usize) -> Result<CurveJet> {
    let vars = vars_from(&["t"]);
    let polys = controls.split(',').map(|c| MultiPoly::parse(c, &vars)).collect::<Result<Vec<_>>>()?;
    crate::error::check_len(dist.rank(), polys.len())?;
    let base = polys.iter().map(|p| p.coeff(&[0])).collect();
    let taylor = (1..=order).map(|k| polys.iter().map(|p| p.coeff(&[k as u32])).collect()).collect();
    CurveJet::new(JetAmbient::Controls, base, taylor)
}

fn coordinate_table(names: &[String], jet: &CurveJet) -> BTreeMap<String, Vec<Rational>> {
    names.iter().enumerate().map(|(k, n)| (n.clone(), jet.coordinate_series(k).coeffs().to_vec())).collect()
}

fn jet_lift(cli: &Cli, model_arg: &str, controls: &str, order: usize, vertical: Option<&str>) -> Result<Report> {
    let loaded = load_model(model_arg)?;
    let dist = &loaded.model.dist;
    let mut warnings = Vec::new();
    let mode = exactness(cli, Some(Exactness::Exact), &mut warnings);
    let mut log = InputLog::new(&loaded);
    log.option("controls", controls);
    log.option("order", order);
    let vbase = match vertical {
        Some(v) => parse_vector(v)?,
        None => vec![Rational::zero(); dist.corank()],
    };
    log.option("vertical", &vbase);
    let control = control_jet(dist, controls, order)?;
    let jet = ehresmann_jet_lift(dist, &control, &vbase)?;
    let doc = JetDocument::from(&jet);
    if let Some(out) = &cli.out {
        let text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Invariant(e.to_string()))? + "\n";
        write_atomic(out, text.as_bytes())?;
    }
    let check = is_horizontal_jet(dist, &jet)?;
    let results = json!({
        "jet": doc,
        "coordinate_series": coordinate_table(&dist.coords()[..], &jet),
        "horizontal": check.horizontal,
        "parametrization": lift_parametrization_rank(dist, &control, &vbase)?,
    });
    log.finish("jet lift", mode, results, warnings)
}

fn load_jet(path: &Path, log: &mut InputLog) -> Result<CurveJet> {
    let text = read_file(path)?;
    log.file("jet", path, &text);
    let value: Value = parse_json(&text, "jet document")?;
    let doc_value = match value.get("results").and_then(|r| r.get("jet")) {
        Some(j) => j.clone(),
        None => value,
    };
    let doc: JetDocument = serde_json::from_value(doc_value).map_err(|e| Error::Schema(format!("jet document: {e}")))?;
    CurveJet::try_from(&doc)
}

fn jet_check(cli: &Cli, model_arg: &str, path: &Path) -> Result<Report> {
    let loaded = load_model(model_arg)?;
    let mut warnings = Vec::new();
    let mode = exactness(cli, Some(Exactness::Exact), &mut warnings);
    let mut log = InputLog::new(&loaded);
    let jet = load_jet(path, &mut log)?;
    let check = is_horizontal_jet(&loaded.model.dist, &jet)?;
    let micro = microregularity(&loaded.model, &jet)?;
    if !loaded.model.strata.is_empty() {
        warnings.push("membership is tested against the declared strata only".into());
    }
    let results = json!({
        "order": jet.order(),
        "horizontal": check.horizontal,
        "residuals": check.residuals,
        "memberships": micro.memberships,
        "microregular": micro.microregular,
    });
    log.finish("jet check", mode, results, warnings)
}

fn jet_characteristic(cli: &Cli, model_arg: &str, path: &Path) -> Result<Report> {
    let loaded = load_model(model_arg)?;
    let dist = &loaded.model.dist;
    let mut warnings = Vec::new();
    let mode = exactness(cli, Some(Exactness::Exact), &mut warnings);
    let mut log = InputLog::new(&loaded);
    let jet = load_jet(path, &mut log)?;
    let check = is_characteristic_jet(dist, &jet)?;
    if check.constant {
        warnings.push("constant jet: the characteristic test holds trivially".into());
    }
    let results = json!({
        "order": jet.order(),
        "characteristic": check.characteristic,
        "projection_horizontal": check.projection_horizontal,
        "constant": check.constant,
        "kernel_rank_at_base": kernel_rank_at_base(dist, &jet)?,
        "residuals": check.residuals,
    });
    log.finish("jet characteristic", mode, results, warnings)
}

fn parse_orders(text: &str) -> Result<(usize, usize)> {
    let bad = || Error::InvalidArgument(format!("orders `{text}` must look like `a..b` with 1 ≤ a ≤ b"));
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if a == 0 || a > b {
        return Err(bad());
    }
    Ok((a, b))
}

fn audit(cli: &Cli, args: &AuditArgs) -> Result<Report> {
    let loaded = load_model(&args.model)?;
    let mut warnings = Vec::new();
    let mode = exactness(cli, Some(Exactness::Exact), &mut warnings);
    let mut log = InputLog::new(&loaded);
    let (a, b) = parse_orders(&args.orders)?;
    log.option("orders", [a, b]);
    let rows = dimension_audit(&loaded.model, a, b)?;
    warnings.push("family dimensions count jets over the declared strata; closures of images are not computed".into());
    log.finish("audit", mode, json!({ "rows": rows }), warnings)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixDocument {
    rows: Vec<Vec<String>>,
}

fn strata(cli: &Cli, args: &StrataArgs) -> Result<Report> {
    let loaded = load_model(&args.model)?;
    let dist = &loaded.model.dist;
    let mut warnings = Vec::new();
    let mode = exactness(cli, None, &mut warnings);
    let mut log = InputLog::new(&loaded);
    log.option("matrix", args.matrix);
    log.option("grid", &args.grid);
    let grid = Grid::parse(&args.grid, dist.coords())?;
    let partition = |fm: &FunctionMatrix| match mode {
        Exactness::Exact => partition_grid(fm, &grid),
        Exactness::Float => partition_grid_float(fm, &grid, DEFAULT_RANK_TOL),
    };
    let (fm, description) = match args.matrix {
        MatrixKind::Custom => {
            let path = args
                .matrix_file
                .as_ref()
                .ok_or_else(|| Error::InvalidArgument("--matrix custom needs --matrix-file".into()))?;
            let text = read_file(path)?;
            log.file("matrix_file", path, &text);
            let doc: MatrixDocument = parse_json(&text, "matrix document")?;
            (FunctionMatrix::parse(&doc.rows, dist.coords())?, json!({ "kind": "custom" }))
        }
        MatrixKind::Flag => {
            if args.matrix_file.is_some() {
                return Err(Error::InvalidArgument("--matrix-file applies to --matrix custom".into()));
            }
            let flag = lie_flag(dist, dist.dim())?;
            let level = match args.level {
                Some(n) => n,
                None => {
                    let mut chosen = flag.depth();
                    for n in 1..=flag.depth() {
                        if partition(&FunctionMatrix::flag_level(&flag, n)?)?.grid_maximal_rank == dist.dim() {
                            chosen = n;
                            break;
                        }
                    }
                    chosen
                }
            };
            log.option("level", level);
            let fm = FunctionMatrix::flag_level(&flag, level)?;
            let words: Vec<&str> = flag.level(level).iter().map(|g| g.word.as_str()).collect();
            (fm, json!({ "kind": "flag", "level": level, "columns": words }))
        }
    };
    let report = partition(&fm)?;
    let minor_list = match args.minors {
        Some(k) => {
            log.option("minors", k);
            Some(minors(&fm, k)?.iter().map(ToString::to_string).collect::<Vec<_>>())
        }
        None => None,
    };
    let entries: Vec<Vec<String>> =
        (0..fm.rows()).map(|i| (0..fm.cols()).map(|j| fm.get(i, j).to_string()).collect()).collect();
    let results = json!({
        "matrix": description,
        "entries": entries,
        "partition": report,
        "minors": minor_list,
    });
    log.finish("strata", mode, results, warnings)
}
