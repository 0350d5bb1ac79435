//! `pressform` — generate targets and test forms, separate colors, fit
//! scanner models, evaluate measurements and validate job specifications.
//!
//! Exit codes: 0 success, 1 validation findings, 2 usage error,
//! 3 I/O or parse error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pressform_core::cgats;
use pressform_core::chart::{build_target, ChartParams};
use pressform_core::color::Rgb8;
use pressform_core::form::{build_form, gray_balance_report, render_comparison};
use pressform_core::gamut::{GamutBoundary, IntentKind};
use pressform_core::jobspec;
use pressform_core::raster::Raster;
use pressform_core::report::{build_report, EvalReport, ReferenceRow};
use pressform_core::scanner::{fit_scanner, samples_from_measurements, score_model, Basis};
use pressform_core::separation::{separate, SeparationParams};

#[derive(Parser)]
#[command(
    name = "pressform",
    version,
    about = "Prepress color management: targets, separations, gamuts, characterization"
)]
struct Cli {
    /// Read separation defaults from a job-spec file (OUTPUT_PROFILE section)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scanner-target operations
    Chart {
        #[command(subcommand)]
        command: ChartCommand,
    },
    /// Digital test-form operations
    Form {
        #[command(subcommand)]
        command: FormCommand,
    },
    /// Convert RGB colors to CMYK with the configured separation
    Separate(SeparateArgs),
    /// Fit a scanner model from measured target scans
    Fit(FitArgs),
    /// Evaluate measurements against a reference file
    Evaluate(EvaluateArgs),
    /// Job-specification documents
    Spec {
        #[command(subcommand)]
        command: SpecCommand,
    },
}

#[derive(Subcommand)]
enum ChartCommand {
    /// Write the 264-patch target: raster, reference file and boundary table
    Gen(ChartGenArgs),
}

#[derive(Args)]
struct ChartGenArgs {
    /// Output directory
    #[arg(short, long, value_name = "DIR", default_value = ".")]
    out_dir: PathBuf,
    /// Chart title recorded in the reference file
    #[arg(long, default_value = "pressform scanner target")]
    title: String,
    /// Free-form date string recorded in the chart parameters
    #[arg(long, default_value = "")]
    date: String,
    /// Pixels per patch cell
    #[arg(long, default_value_t = 24)]
    patch_px: usize,
    /// Margin around the patch grid, in pixels
    #[arg(long, default_value_t = 16)]
    margin: usize,
    /// Gamut boundary table to build against (defaults to built-in sRGB)
    #[arg(long, value_name = "FILE")]
    boundary: Option<PathBuf>,
}

#[derive(Subcommand)]
enum FormCommand {
    /// Write the test form: paired rasters, patch table and gray-balance report
    Gen(FormGenArgs),
}

#[derive(Args)]
struct FormGenArgs {
    /// Output directory
    #[arg(short, long, value_name = "DIR", default_value = ".")]
    out_dir: PathBuf,
    /// Rendering intent for the converted half
    #[arg(long, value_enum, default_value_t = IntentArg::Relative)]
    intent: IntentArg,
    /// Gamut boundary table (defaults to built-in sRGB)
    #[arg(long, value_name = "FILE")]
    boundary: Option<PathBuf>,
    #[command(flatten)]
    separation: SeparationArgs,
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["input", "raster"])))]
struct SeparateArgs {
    /// Text file of RGB triplets, one `r g b` per line (`-` for stdin)
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
    /// Binary PPM raster to separate pixel by pixel
    #[arg(long, value_name = "FILE")]
    raster: Option<PathBuf>,
    /// Output file (stdout when omitted)
    #[arg(short, long, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(flatten)]
    separation: SeparationArgs,
}

#[derive(Args)]
struct FitArgs {
    /// Measurement file with RGB_R RGB_G RGB_B scan values
    #[arg(long, value_name = "FILE")]
    meas: PathBuf,
    /// Polynomial basis for the fit
    #[arg(long, value_enum, default_value_t = BasisArg::Quadratic)]
    basis: BasisArg,
    /// Output directory for the model table and fit report
    #[arg(short, long, value_name = "DIR", default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Reference file (e.g. chart_ref.txt)
    #[arg(long = "ref", value_name = "FILE")]
    reference: PathBuf,
    /// Measurement file to evaluate
    #[arg(long, value_name = "FILE")]
    meas: PathBuf,
    /// Report output file (stdout when omitted)
    #[arg(short, long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Gamut boundary table for out-of-gamut flags
    #[arg(long, value_name = "FILE")]
    boundary: Option<PathBuf>,
    /// Job specification to validate and embed in the report
    #[arg(long, value_name = "FILE")]
    spec: Option<PathBuf>,
}

#[derive(Subcommand)]
enum SpecCommand {
    /// Check the five required sections and their fields
    Validate {
        /// Job-spec document to validate
        path: PathBuf,
    },
}

#[derive(Args)]
struct SeparationArgs {
    /// Gray level where black ink begins [0..1]
    #[arg(long, value_name = "X")]
    black_start: Option<f64>,
    /// Gray span over which black ramps to its maximum (0..1]
    #[arg(long, value_name = "X")]
    black_width: Option<f64>,
    /// Maximum black ink [0..1]
    #[arg(long, value_name = "X")]
    max_black: Option<f64>,
    /// Gray-component replacement strength [0..1]
    #[arg(long = "gcr", value_name = "X")]
    gcr_strength: Option<f64>,
    /// Under-color removal weight near neutrals [0..1]
    #[arg(long = "ucr", value_name = "X")]
    ucr_weight: Option<f64>,
    /// Total ink coverage limit (0..4]
    #[arg(long = "tic", value_name = "X")]
    tic_limit: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum IntentArg {
    Relative,
    Perceptual,
    Saturation,
}

impl From<IntentArg> for IntentKind {
    fn from(v: IntentArg) -> Self {
        match v {
            IntentArg::Relative => IntentKind::RelativeColorimetric,
            IntentArg::Perceptual => IntentKind::Perceptual,
            IntentArg::Saturation => IntentKind::Saturation,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BasisArg {
    Linear,
    Quadratic,
}

enum CliError {
    /// Validation findings: the run worked, the document did not.
    Findings,
    /// I/O or parse failure.
    Fault(String),
}

impl CliError {
    fn fault(context: &str, err: impl std::fmt::Display) -> Self {
        CliError::Fault(format!("{context}: {err}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Findings) => ExitCode::from(1),
        Err(CliError::Fault(msg)) => {
            eprintln!("pressform: {msg}");
            ExitCode::from(3)
        }
    }
}

/// Separation defaults come from, in order: explicit flags, the config
/// file's OUTPUT_PROFILE section, the built-in defaults.
fn resolve_separation(
    args: &SeparationArgs,
    config: Option<&jobspec::JobSpec>,
) -> Result<SeparationParams, CliError> {
    let base = SeparationParams::default();
    let from_config = |key: &str| -> Result<Option<f64>, CliError> {
        match config.and_then(|c| c.get("OUTPUT_PROFILE", key)) {
            Some(text) => text
                .parse::<f64>()
                .map(Some)
                .map_err(|_| CliError::Fault(format!("config: {key} is not a number: '{text}'"))),
            None => Ok(None),
        }
    };
    let pick = |flag: Option<f64>, key: &str, fallback: f64| -> Result<f64, CliError> {
        Ok(flag.or(from_config(key)?).unwrap_or(fallback))
    };
    Ok(SeparationParams::new(
        pick(args.black_start, "black_start", base.black_start)?,
        pick(args.black_width, "black_width", base.black_width)?,
        pick(args.max_black, "max_black", base.max_black)?,
        pick(args.gcr_strength, "gcr_strength", base.gcr_strength)?,
        pick(args.ucr_weight, "ucr_weight", base.ucr_weight)?,
        pick(args.tic_limit, "tic_limit", base.tic_limit)?,
    ))
}

fn load_config(path: Option<&Path>) -> Result<Option<jobspec::JobSpec>, CliError> {
    match path {
        None => Ok(None),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| CliError::fault(&format!("config {}", p.display()), e))?;
            let spec = jobspec::parse_jobspec(&text)
                .map_err(|e| CliError::fault(&format!("config {}", p.display()), e))?;
            Ok(Some(spec))
        }
    }
}

fn load_boundary(path: Option<&Path>) -> Result<GamutBoundary, CliError> {
    match path {
        None => Ok(GamutBoundary::srgb_default()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| CliError::fault(&format!("boundary {}", p.display()), e))?;
            GamutBoundary::parse_table(&text)
                .map_err(|e| CliError::fault(&format!("boundary {}", p.display()), e))
        }
    }
}

fn write_out(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::fault(&path.display().to_string(), e))
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Chart { command: ChartCommand::Gen(args) } => chart_gen(args),
        Command::Form { command: FormCommand::Gen(args) } => form_gen(args, config.as_ref()),
        Command::Separate(args) => separate_cmd(args, config.as_ref()),
        Command::Fit(args) => fit_cmd(args),
        Command::Evaluate(args) => evaluate_cmd(args),
        Command::Spec { command: SpecCommand::Validate { path } } => spec_validate(&path),
    }
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::fault(&dir.display().to_string(), e))
}

fn chart_gen(args: ChartGenArgs) -> Result<(), CliError> {
    ensure_dir(&args.out_dir)?;
    let boundary = load_boundary(args.boundary.as_deref())?;
    let params = ChartParams { name: args.title, date: args.date, ..ChartParams::default() };
    let chart = build_target(&boundary, params);

    let raster = chart.render(args.patch_px, args.margin);
    raster
        .write_ppm_file(&args.out_dir.join("chart.ppm"))
        .map_err(|e| CliError::fault("chart.ppm", e))?;
    write_out(&args.out_dir.join("chart_ref.txt"), chart.reference_document().as_bytes())?;
    write_out(&args.out_dir.join("chart_boundary.txt"), boundary.write_table().as_bytes())?;
    println!(
        "wrote chart.ppm ({}x{}), chart_ref.txt ({} patches), chart_boundary.txt",
        raster.width(),
        raster.height(),
        chart.patches.len()
    );
    Ok(())
}

fn form_gen(args: FormGenArgs, config: Option<&jobspec::JobSpec>) -> Result<(), CliError> {
    ensure_dir(&args.out_dir)?;
    let separation = resolve_separation(&args.separation, config)?;
    let boundary = load_boundary(args.boundary.as_deref())?;
    let form = build_form(separation, boundary, args.intent.into());
    let render = render_comparison(&form);

    render
        .reference
        .write_ppm_file(&args.out_dir.join("form_ref.ppm"))
        .map_err(|e| CliError::fault("form_ref.ppm", e))?;
    render
        .converted
        .write_ppm_file(&args.out_dir.join("form_conv.ppm"))
        .map_err(|e| CliError::fault("form_conv.ppm", e))?;
    render
        .pair
        .write_ppm_file(&args.out_dir.join("form_pair.ppm"))
        .map_err(|e| CliError::fault("form_pair.ppm", e))?;

    let report = EvalReport::from_rows(
        render.table,
        Vec::new(),
        1.0,
        Some(form.separation.tic_limit),
    );
    write_out(&args.out_dir.join("form_patches.json"), report.to_json().as_bytes())?;
    write_out(&args.out_dir.join("form_patches.txt"), report.write_text_table().as_bytes())?;

    let gray = gray_balance_report(&form, None).map_err(|e| CliError::fault("gray balance", e))?;
    write_out(&args.out_dir.join("form_gray_balance.txt"), gray.write_text().as_bytes())?;
    println!(
        "wrote form_ref.ppm, form_conv.ppm, form_pair.ppm, form_patches.json, form_patches.txt, form_gray_balance.txt ({} patches)",
        report.per_patch.len()
    );
    Ok(())
}

fn parse_triplets(text: &str) -> Result<Vec<Rgb8>, CliError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(CliError::Fault(format!(
                "triplets line {}: expected 'r g b', got '{line}'",
                n + 1
            )));
        }
        let chan = |s: &str| -> Result<u8, CliError> {
            s.parse()
                .map_err(|_| CliError::Fault(format!("triplets line {}: bad value '{s}'", n + 1)))
        };
        out.push(Rgb8::new(chan(parts[0])?, chan(parts[1])?, chan(parts[2])?));
    }
    Ok(out)
}

fn separate_cmd(args: SeparateArgs, config: Option<&jobspec::JobSpec>) -> Result<(), CliError> {
    let params = resolve_separation(&args.separation, config)?;
    let colors: Vec<(String, Rgb8)> = if let Some(raster_path) = &args.raster {
        let raster = Raster::read_ppm_file(raster_path)
            .map_err(|e| CliError::fault(&raster_path.display().to_string(), e))?;
        let mut v = Vec::with_capacity(raster.width() * raster.height());
        for y in 0..raster.height() {
            for x in 0..raster.width() {
                v.push((format!("x{x}y{y}"), raster.get(x, y)));
            }
        }
        v
    } else {
        let path = args.input.as_deref().expect("clap requires one source");
        let text = if path == Path::new("-") {
            use std::io::Read;
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| CliError::fault("stdin", e))?;
            buf
        } else {
            fs::read_to_string(path).map_err(|e| CliError::fault(&path.display().to_string(), e))?
        };
        parse_triplets(&text)?
            .into_iter()
            .enumerate()
            .map(|(i, rgb)| ((i + 1).to_string(), rgb))
            .collect()
    };

    let mut out = String::new();
    out.push_str(&format!(
        "# separation: black_start={} black_width={} max_black={} gcr={} ucr={} tic={}\n",
        params.black_start,
        params.black_width,
        params.max_black,
        params.gcr_strength,
        params.ucr_weight,
        params.tic_limit
    ));
    out.push_str("BEGIN_DATA_FORMAT\nSAMPLE_ID RGB_R RGB_G RGB_B CMYK_C CMYK_M CMYK_Y CMYK_K TIC\nEND_DATA_FORMAT\nBEGIN_DATA\n");
    for (id, rgb) in &colors {
        let r = separate(*rgb, &params);
        out.push_str(&format!(
            "{id} {} {} {} {} {} {} {} {}\n",
            rgb.r, rgb.g, rgb.b, r.cmyk.c, r.cmyk.m, r.cmyk.y, r.cmyk.k, r.tic
        ));
    }
    out.push_str("END_DATA\n");
    match &args.out {
        Some(path) => write_out(path, out.as_bytes())?,
        None => print!("{out}"),
    }
    Ok(())
}

fn fit_cmd(args: FitArgs) -> Result<(), CliError> {
    ensure_dir(&args.out_dir)?;
    let text = fs::read_to_string(&args.meas)
        .map_err(|e| CliError::fault(&args.meas.display().to_string(), e))?;
    let set = cgats::parse_measurements(&text)
        .map_err(|e| CliError::fault(&args.meas.display().to_string(), e))?;
    let samples = samples_from_measurements(&set).map_err(|e| CliError::fault("fit", e))?;
    let basis = match args.basis {
        BasisArg::Linear => Basis::Linear,
        BasisArg::Quadratic => Basis::Quadratic,
    };
    let model = fit_scanner(&samples, basis).map_err(|e| CliError::fault("fit", e))?;
    let report = score_model(&model, &samples).map_err(|e| CliError::fault("fit", e))?;

    write_out(&args.out_dir.join("scanner_model.txt"), model.write_table().as_bytes())?;
    write_out(&args.out_dir.join("fit_report.json"), report.to_json().as_bytes())?;
    println!(
        "fitted {} samples: mean dE {:.4}, max dE {:.4}, p95 dE {:.4}",
        samples.len(),
        report.mean_delta_e,
        report.max_delta_e,
        report.p95_delta_e
    );
    Ok(())
}

fn evaluate_cmd(args: EvaluateArgs) -> Result<(), CliError> {
    let ref_text = fs::read_to_string(&args.reference)
        .map_err(|e| CliError::fault(&args.reference.display().to_string(), e))?;
    let ref_set = cgats::parse_measurements(&ref_text)
        .map_err(|e| CliError::fault(&args.reference.display().to_string(), e))?;
    let reference: Vec<ReferenceRow> = ref_set
        .rows
        .iter()
        .map(|r| ReferenceRow { id: r.id.clone(), lab: r.lab })
        .collect();

    let meas_text = fs::read_to_string(&args.meas)
        .map_err(|e| CliError::fault(&args.meas.display().to_string(), e))?;
    let measured = cgats::parse_measurements(&meas_text)
        .map_err(|e| CliError::fault(&args.meas.display().to_string(), e))?;

    let boundary = match args.boundary.as_deref() {
        Some(p) => Some(load_boundary(Some(p))?),
        None => None,
    };
    let mut report = build_report(&reference, &measured, boundary.as_ref())
        .map_err(|e| CliError::fault("evaluate", e))?;

    let mut spec_findings = false;
    if let Some(spec_path) = &args.spec {
        let spec_text = fs::read_to_string(spec_path)
            .map_err(|e| CliError::fault(&spec_path.display().to_string(), e))?;
        let spec = jobspec::parse_jobspec(&spec_text)
            .map_err(|e| CliError::fault(&spec_path.display().to_string(), e))?;
        let outcome = jobspec::validate_jobspec(&spec);
        if outcome.is_valid() {
            report.job_spec = Some(spec_text);
        } else {
            spec_findings = true;
            for finding in &outcome.findings {
                report.warnings.push(format!("job spec: {finding}"));
                eprintln!("job spec: {finding}");
            }
        }
    }

    let json = report.to_json();
    match &args.out {
        Some(path) => {
            write_out(path, json.as_bytes())?;
            println!(
                "evaluated {} patches: mean dE {:.4}, max dE {:.4}",
                report.summary.patch_count, report.summary.mean_delta_e, report.summary.max_delta_e
            );
        }
        None => println!("{json}"),
    }
    for d in &report.diagnostics {
        eprintln!("diagnostic: {d}");
    }
    if !report.diagnostics.is_empty() || spec_findings {
        return Err(CliError::Findings);
    }
    Ok(())
}

fn spec_validate(path: &Path) -> Result<(), CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::fault(&path.display().to_string(), e))?;
    let spec =
        jobspec::parse_jobspec(&text).map_err(|e| CliError::fault(&path.display().to_string(), e))?;
    let outcome = jobspec::validate_jobspec(&spec);
    if outcome.is_valid() {
        println!("{}: valid, zero findings", path.display());
        Ok(())
    } else {
        for finding in &outcome.findings {
            println!("{finding}");
        }
        Err(CliError::Findings)
    }
}
