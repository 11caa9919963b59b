//! Command-line front end: file formats, subcommands and fixed-precision output.
//!
//! Exit codes are 0 on success, 1 for I/O, parse and parameter errors, and 2
//! when the request is well formed but mathematically undefined.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::eraser::{fringe_scan, EraserConfig, ExtractionMode, DEFAULT_GRID};
use crate::error::Error;
use crate::geomphase::{bargmann, canonicalize_triple, NULL_THRESHOLD};
use crate::majorana::{points_to_state, state_to_points, MajoranaSet, CONVENTION};
use crate::statekit::{inner_product, random_pure_state, BlochPoint, PureState};
use crate::sweepfamily::sweep_alpha;

/// Parsed states may be off unit norm by this much and are then normalized.
pub const PARSE_NORM_TOLERANCE: f64 = 1e-6;
/// Looser bound accepted with `--renormalize`.
pub const RENORMALIZE_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Parser)]
#[command(name = "gphase", version, about = "Three-vertex geometric phases on the Bloch sphere")]
pub struct Cli {
    /// Emit machine-readable JSON on stdout
    #[arg(long, global = true)]
    json: bool,
    /// Seed for `--random` inputs
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Threshold below which a Bargmann invariant counts as zero
    #[arg(long, global = true, default_value_t = NULL_THRESHOLD)]
    tolerance: f64,
    /// Accept states whose norm is within 1e-3 of one and normalize them
    #[arg(long, global = true)]
    renormalize: bool,
    /// Show angles in degrees on the terminal (files stay in radians)
    #[arg(long, global = true)]
    degrees: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Three-vertex phase, Bargmann invariant and pairwise overlaps
    Phase(TripleInput),
    /// Majorana points of a state, or the state of a set of points
    Majorana(MajoranaArgs),
    /// Unitary that brings a triple into symmetric/product/product form
    Canonicalize(TripleInput),
    /// Interferometric read-out of the phase
    Eraser(EraserArgs),
    /// Sweep alpha over a full turn for the qutrit family
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
struct TripleInput {
    /// Triple file (JSON with psi1, psi2, psi3); `-` reads stdin
    #[arg(required_unless_present = "random")]
    triple: Option<PathBuf>,
    /// Use a seeded random triple of this dimension instead of a file
    #[arg(long, value_name = "DIM", conflicts_with = "triple")]
    random: Option<usize>,
}

#[derive(Debug, Args)]
struct MajoranaArgs {
    /// State file (JSON with dim, amplitudes); `-` reads stdin
    #[arg(required_unless_present_any = ["points", "random"])]
    state: Option<PathBuf>,
    /// Rebuild the state from a points file as written by `majorana --json`
    #[arg(long, value_name = "FILE", conflicts_with_all = ["state", "random"])]
    points: Option<PathBuf>,
    /// Use a seeded random state of this dimension
    #[arg(long, value_name = "DIM", conflicts_with = "state")]
    random: Option<usize>,
}

#[derive(Debug, Args)]
struct EraserArgs {
    #[command(flatten)]
    input: TripleInput,
    /// Number of fringe samples over one period
    #[arg(long, default_value_t = DEFAULT_GRID)]
    grid: usize,
    /// Write the projected fringe as CSV (delta,probability)
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Tilt angle, e.g. `0.5236`, `pi/6`, `-pi/6`
    #[arg(long, allow_hyphen_values = true, value_parser = parse_angle)]
    theta: f64,
    /// Half separation of the two rotating points, e.g. `pi/4`
    #[arg(long, allow_hyphen_values = true, value_parser = parse_angle)]
    phi: f64,
    /// Number of alpha intervals over one turn
    #[arg(long, default_value_t = 1000)]
    steps: usize,
    /// Output CSV
    #[arg(long)]
    out: PathBuf,
    /// Sidecar JSON; defaults to the CSV path with a `.json` extension
    #[arg(long)]
    sidecar: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dim: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripleFile {
    pub psi1: StateFile,
    pub psi2: StateFile,
    pub psi3: StateFile,
}

/// `[polar, azimuth]` pairs; the convention tag is informational.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointsFile {
    #[serde(default)]
    pub convention: Option<String>,
    pub points: Vec<[f64; 2]>,
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    /// Mathematically undefined request with a custom diagnostic.
    Undefined(String),
    Math(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Undefined(_) => 2,
            CliError::Math(e) if e.is_undefined() => 2,
            CliError::Math(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(msg) | CliError::Undefined(msg) => f.write_str(msg),
            CliError::Math(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Math(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// `%.12g`: twelve significant digits, trailing zeros dropped, lowercase
/// exponent outside `[1e-5, 1e12)`.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exponent) = sci.split_once('e').expect("exponent form");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if !(-5..12).contains(&exponent) {
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        return format!("{mantissa}e{exponent}");
    }
    let fixed = format!("{x:.*}", (11 - exponent) as usize);
    if fixed.contains('.') {
        fixed.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        fixed
    }
}

/// The value that [`format_number`] prints, as a JSON number.
fn num(x: f64) -> Value {
    let rounded: f64 = format_number(x).parse().expect("formatted number parses");
    json!(rounded)
}

fn complex_json(z: Complex64) -> Value {
    json!([num(z.re), num(z.im)])
}

fn state_json(s: &PureState) -> Value {
    json!({
        "dim": s.dim(),
        "amplitudes": s.amplitudes().iter().map(|z| complex_json(*z)).collect::<Vec<_>>(),
    })
}

/// Parses `1.5`, `pi`, `-pi/6`, `3pi/4`, `3*pi/4`, `2.5e-1`.
pub fn parse_angle(text: &str) -> std::result::Result<f64, String> {
    let t = text.trim().to_ascii_lowercase();
    let bad = || format!("cannot parse angle `{text}`");
    let (numerator, denominator) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim().parse::<f64>().map_err(|_| bad())?)),
        None => (t.as_str(), None),
    };
    let value = match numerator.strip_suffix("pi") {
        Some(coefficient) => {
            let coefficient = coefficient.trim().trim_end_matches('*').trim();
            let c = match coefficient {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().map_err(|_| bad())?,
            };
            c * std::f64::consts::PI
        }
        None => numerator.parse::<f64>().map_err(|_| bad())?,
    };
    let value = match denominator {
        Some(d) => value / d,
        None => value,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

struct Context {
    json: bool,
    seed: u64,
    tolerance: f64,
    renormalize: bool,
    degrees: bool,
}

impl Context {
    fn angle(&self, x: f64) -> String {
        if self.degrees {
            format_number(x.to_degrees())
        } else {
            format_number(x)
        }
    }

    fn state_from_file(&self, file: &StateFile, label: &str) -> CliResult<PureState> {
        if file.amplitudes.len() != file.dim {
            return Err(CliError::Input(format!(
                "{label}: dim is {} but {} amplitudes were given",
                file.dim,
                file.amplitudes.len()
            )));
        }
        let amplitudes: Vec<Complex64> = file
            .amplitudes
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect();
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let limit = if self.renormalize {
            RENORMALIZE_TOLERANCE
        } else {
            PARSE_NORM_TOLERANCE
        };
        if !norm.is_finite() || (norm - 1.0).abs() > limit {
            let hint = if self.renormalize {
                ""
            } else {
                " (use --renormalize to accept up to 1e-3)"
            };
            return Err(CliError::Input(format!(
                "{label}: norm {} is not within {limit:e} of 1{hint}",
                format_number(norm)
            )));
        }
        Ok(PureState::normalized(amplitudes)?)
    }

    fn triple(&self, input: &TripleInput) -> CliResult<[PureState; 3]> {
        if let Some(dim) = input.random {
            return Ok([
                random_pure_state(dim, self.seed)?,
                random_pure_state(dim, self.seed.wrapping_add(1))?,
                random_pure_state(dim, self.seed.wrapping_add(2))?,
            ]);
        }
        let path = input.triple.as_deref().expect("clap requires a triple");
        let file: TripleFile = read_json(path)?;
        let states = [
            self.state_from_file(&file.psi1, "psi1")?,
            self.state_from_file(&file.psi2, "psi2")?,
            self.state_from_file(&file.psi3, "psi3")?,
        ];
        if states.iter().any(|s| s.dim() != states[0].dim()) {
            return Err(CliError::Input(format!(
                "triple dimensions differ: {}, {}, {}",
                states[0].dim(),
                states[1].dim(),
                states[2].dim()
            )));
        }
        Ok(states)
    }
}

fn read_input(path: &Path) -> CliResult<String> {
    let mut text = String::new();
    if path.as_os_str() == "-" {
        io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| CliError::Input(format!("reading stdin: {e}")))?;
    } else {
        text = fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("reading {}: {e}", path.display())))?;
    }
    Ok(text)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = read_input(path)?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("parsing {}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents)
        .map_err(|e| CliError::Input(format!("writing {}: {e}", path.display())))
}

fn emit_json(out: &mut String, value: &Value) {
    out.push_str(&serde_json::to_string_pretty(value).expect("JSON values serialize"));
    out.push('\n');
}

fn cmd_phase(ctx: &Context, input: &TripleInput) -> CliResult<String> {
    let [s1, s2, s3] = ctx.triple(input)?;
    let pairs = [("12", &s1, &s2), ("23", &s2, &s3), ("31", &s3, &s1)];
    let overlaps: Vec<(&str, Complex64)> = pairs
        .iter()
        .map(|(name, a, b)| Ok((*name, inner_product(a, b)?)))
        .collect::<CliResult<_>>()?;
    let b = bargmann(&s1, &s2, &s3)?;
    if b.norm() <= ctx.tolerance {
        let (name, _) = overlaps
            .iter()
            .min_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
            .expect("three overlaps");
        return Err(CliError::Undefined(format!(
            "undefined phase: overlap <psi{}|psi{}> vanishes (|B| = {:e})",
            &name[..1],
            &name[1..],
            b.norm()
        )));
    }
    let gamma = b.arg();
    let mut out = String::new();
    if ctx.json {
        let mut map = serde_json::Map::new();
        for (name, z) in &overlaps {
            map.insert(
                name.to_string(),
                json!({ "modulus": num(z.norm()), "value": complex_json(*z) }),
            );
        }
        emit_json(
            &mut out,
            &json!({
                "dim": s1.dim(),
                "gamma": num(gamma),
                "bargmann": { "modulus": num(b.norm()), "value": complex_json(b) },
                "overlaps": map,
            }),
        );
    } else {
        let _ = writeln!(out, "dim        {}", s1.dim());
        let _ = writeln!(out, "gamma      {}", ctx.angle(gamma));
        let _ = writeln!(out, "|bargmann| {}", format_number(b.norm()));
        for (name, z) in &overlaps {
            let _ = writeln!(
                out,
                "|<psi{}|psi{}>| {}",
                &name[..1],
                &name[1..],
                format_number(z.norm())
            );
        }
    }
    Ok(out)
}

fn points_report(ctx: &Context, set: &MajoranaSet) -> String {
    let sorted = set.sorted();
    let mut out = String::new();
    if ctx.json {
        emit_json(
            &mut out,
            &json!({
                "convention": CONVENTION,
                "points": sorted.iter().map(|p| json!([num(p.polar()), num(p.azimuth())])).collect::<Vec<_>>(),
            }),
        );
    } else {
        let _ = writeln!(out, "# polar azimuth");
        for p in &sorted {
            let _ = writeln!(out, "{} {}", ctx.angle(p.polar()), ctx.angle(p.azimuth()));
        }
    }
    out
}

fn cmd_majorana(ctx: &Context, args: &MajoranaArgs) -> CliResult<String> {
    if let Some(path) = &args.points {
        let file: PointsFile = read_json(path)?;
        let points = file
            .points
            .iter()
            .map(|[polar, azimuth]| BlochPoint::new(*polar, *azimuth))
            .collect::<crate::Result<Vec<_>>>()?;
        let state = points_to_state(&MajoranaSet::new(points)?);
        let mut out = String::new();
        if ctx.json {
            emit_json(&mut out, &state_json(&state));
        } else {
            let _ = writeln!(out, "# re im");
            for z in state.amplitudes() {
                let _ = writeln!(out, "{} {}", format_number(z.re), format_number(z.im));
            }
        }
        return Ok(out);
    }
    let state = match args.random {
        Some(dim) => random_pure_state(dim, ctx.seed)?,
        None => {
            let path = args.state.as_deref().expect("clap requires a state");
            ctx.state_from_file(&read_json(path)?, "state")?
        }
    };
    Ok(points_report(ctx, &state_to_points(&state)?))
}

fn cmd_canonicalize(ctx: &Context, input: &TripleInput) -> CliResult<String> {
    let [s1, s2, s3] = ctx.triple(input)?;
    let c = canonicalize_triple(&s1, &s2, &s3)?;
    let check = c.check()?;
    let gram_max = check
        .gram_deltas
        .iter()
        .flatten()
        .fold(0.0f64, |m, d| m.max(*d));
    let dim = c.transform.dim();
    let mut out = String::new();
    if ctx.json {
        emit_json(
            &mut out,
            &json!({
                "psi1": state_json(&c.psi1),
                "psi2": state_json(&c.psi2),
                "psi3": state_json(&c.psi3),
                "qubits": { "psi2": state_json(&c.psi2_qubit), "psi3": state_json(&c.psi3_qubit) },
                "unitary": {
                    "dim": dim,
                    "entries": c.transform.entries().iter().map(|z| complex_json(*z)).collect::<Vec<_>>(),
                },
                "degenerate_frame": c.degenerate_frame,
                "verification": {
                    "gram_max_delta": num(gram_max),
                    "bargmann_delta": num(check.bargmann_delta),
                    "overlap_delta": num(check.overlap_delta),
                    "phase_delta": check.phase_delta.map(num),
                    "mapping_delta": num(check.mapping_delta),
                },
            }),
        );
        return Ok(out);
    }
    let state_line = |s: &PureState| {
        s.amplitudes()
            .iter()
            .map(|z| format!("({}, {})", format_number(z.re), format_number(z.im)))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let _ = writeln!(out, "psi1 {}", state_line(&c.psi1));
    let _ = writeln!(out, "psi2 {}", state_line(&c.psi2));
    let _ = writeln!(out, "psi3 {}", state_line(&c.psi3));
    let _ = writeln!(out, "qubit2 {}", state_line(&c.psi2_qubit));
    let _ = writeln!(out, "qubit3 {}", state_line(&c.psi3_qubit));
    let _ = writeln!(out, "unitary ({dim}x{dim}, row-major)");
    for row in c.transform.entries().chunks(dim) {
        let cells: Vec<String> = row
            .iter()
            .map(|z| format!("({}, {})", format_number(z.re), format_number(z.im)))
            .collect();
        let _ = writeln!(out, "  {}", cells.join(" "));
    }
    if c.degenerate_frame {
        let _ = writeln!(out, "note: psi2 and psi3 are parallel; degenerate frame");
    }
    let _ = writeln!(out, "gram_max_delta {}", format_number(gram_max));
    let _ = writeln!(out, "bargmann_delta {}", format_number(check.bargmann_delta));
    let _ = writeln!(out, "overlap_delta  {}", format_number(check.overlap_delta));
    let _ = writeln!(
        out,
        "phase_delta    {}",
        check
            .phase_delta
            .map_or("undefined".to_string(), format_number)
    );
    let _ = writeln!(out, "mapping_delta  {}", format_number(check.mapping_delta));
    Ok(out)
}

fn cmd_eraser(ctx: &Context, args: &EraserArgs) -> CliResult<String> {
    let [s1, s2, s3] = ctx.triple(&args.input)?;
    let cfg = EraserConfig::new(args.grid, ExtractionMode::Both)?;
    let scan = fringe_scan(&s1, &s2, Some(&s3), &cfg)?;
    let grid = scan.grid.as_ref().expect("both modes sample the grid");
    let (delta_f, gamma) = (
        scan.delta_f.expect("projected scan has delta_f"),
        scan.gamma.expect("projected scan has gamma"),
    );
    let (grid_f, grid_gamma) = (
        grid.delta_f.expect("projected scan has delta_f"),
        grid.gamma.expect("projected scan has gamma"),
    );
    if let Some(path) = &args.csv {
        let mut csv = String::from("delta,probability\n");
        for (d, p) in scan.deltas.iter().zip(&scan.probabilities) {
            let _ = writeln!(csv, "{},{}", format_number(*d), format_number(*p));
        }
        write_file(path, &csv)?;
    }
    let mut out = String::new();
    if ctx.json {
        emit_json(
            &mut out,
            &json!({
                "grid": args.grid,
                "delta_f": num(delta_f),
                "delta_m": num(scan.delta_m),
                "gamma": num(gamma),
                "visibility": num(scan.visibility),
                "grid_argmax": {
                    "delta_f": num(grid_f),
                    "delta_m": num(grid.delta_m),
                    "gamma": num(grid_gamma),
                },
            }),
        );
    } else {
        let _ = writeln!(out, "delta_f      {}", ctx.angle(delta_f));
        let _ = writeln!(out, "delta_m      {}", ctx.angle(scan.delta_m));
        let _ = writeln!(out, "gamma        {}", ctx.angle(gamma));
        let _ = writeln!(out, "visibility   {}", format_number(scan.visibility));
        let _ = writeln!(out, "gamma_grid   {} (grid {})", ctx.angle(grid_gamma), args.grid);
    }
    Ok(out)
}

fn cmd_sweep(ctx: &Context, args: &SweepArgs) -> CliResult<String> {
    let sweep = sweep_alpha(args.theta, args.phi, args.steps)?;
    let mut csv = String::from("alpha,gamma1,gamma2,gamma_wrapped,gamma_unwrapped\n");
    for k in 0..sweep.alphas.len() {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            format_number(sweep.alphas[k]),
            format_number(sweep.gamma1[k]),
            format_number(sweep.gamma2[k]),
            format_number(sweep.gamma_wrapped[k]),
            format_number(sweep.gamma_total[k]),
        );
    }
    write_file(&args.out, &csv)?;
    let sidecar_path = args
        .sidecar
        .clone()
        .unwrap_or_else(|| args.out.with_extension("json"));
    let sidecar = json!({
        "singular_alphas": sweep.singular_alphas.iter().map(|a| num(*a)).collect::<Vec<_>>(),
        "winding": num(sweep.winding),
    });
    let mut sidecar_text = serde_json::to_string_pretty(&sidecar).expect("JSON values serialize");
    sidecar_text.push('\n');
    write_file(&sidecar_path, &sidecar_text)?;

    let mut out = String::new();
    if ctx.json {
        emit_json(
            &mut out,
            &json!({
                "csv": args.out.display().to_string(),
                "sidecar": sidecar_path.display().to_string(),
                "rows": sweep.alphas.len(),
                "singular_alphas": sidecar["singular_alphas"],
                "winding": sidecar["winding"],
                "dual_path_deviation": num(sweep.dual_path_deviation()),
            }),
        );
    } else {
        let singular: Vec<String> = sweep.singular_alphas.iter().map(|a| ctx.angle(*a)).collect();
        let _ = writeln!(out, "rows            {}", sweep.alphas.len());
        let _ = writeln!(out, "winding         {}", ctx.angle(sweep.winding));
        let _ = writeln!(out, "singular_alphas {}", singular.join(" "));
        let _ = writeln!(out, "wrote {} and {}", args.out.display(), sidecar_path.display());
    }
    Ok(out)
}

fn dispatch(cli: &Cli) -> CliResult<String> {
    let ctx = Context {
        json: cli.json,
        seed: cli.seed,
        tolerance: cli.tolerance,
        renormalize: cli.renormalize,
        degrees: cli.degrees,
    };
    match &cli.command {
        Command::Phase(input) => cmd_phase(&ctx, input),
        Command::Majorana(args) => cmd_majorana(&ctx, args),
        Command::Canonicalize(input) => cmd_canonicalize(&ctx, input),
        Command::Eraser(args) => cmd_eraser(&ctx, args),
        Command::Sweep(args) => cmd_sweep(&ctx, args),
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(rendered.as_bytes())
            } else {
                stderr.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(text) => match stdout.write_all(text.as_bytes()) {
            Ok(()) => 0,
            Err(_) => 1,
        },
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if let CliError::Math(Error::GridTooCoarse { .. }) = e {
                let _ = writeln!(stderr, "hint: increase --steps or move theta away from 0");
            }
            e.exit_code()
        }
    }
}
