//! End-to-end behavior of every subcommand: outputs, exit codes, config
//! precedence and the golden help texts.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use pressform_core::cgats::{write_measurements, MeasurementRow, MeasurementSet};
use pressform_core::chart::{build_target, ChartParams};
use pressform_core::color::rgb_to_lab;
use pressform_core::gamut::GamutBoundary;
use pressform_core::jobspec::{write_jobspec, JobSpec};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pressform"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn help_matches_golden_files() {
    let cases = [
        (vec!["--help"], "help.txt"),
        (vec!["chart", "--help"], "chart.txt"),
        (vec!["form", "--help"], "form.txt"),
        (vec!["spec", "--help"], "spec.txt"),
        (vec!["chart", "gen", "--help"], "chart_gen.txt"),
        (vec!["form", "gen", "--help"], "form_gen.txt"),
        (vec!["separate", "--help"], "separate.txt"),
        (vec!["fit", "--help"], "fit.txt"),
        (vec!["evaluate", "--help"], "evaluate.txt"),
        (vec!["spec", "validate", "--help"], "spec_validate.txt"),
    ];
    for (args, golden) in cases {
        let out = run(&args);
        assert!(out.status.success());
        let want = fs::read_to_string(
            Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(golden),
        )
        .unwrap_or_else(|_| panic!("missing golden file {golden}"));
        assert_eq!(stdout(&out), want, "help text drifted for {args:?}");
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["separate", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(run(&["chart"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
    // the input source is required and mutually exclusive
    assert_eq!(run(&["separate"]).status.code(), Some(2));
    assert_eq!(
        run(&["separate", "--input", "a.txt", "--raster", "b.ppm"]).status.code(),
        Some(2)
    );
}

#[test]
fn io_and_parse_errors_exit_three() {
    assert_eq!(run(&["fit", "--meas", "/no/such/file"]).status.code(), Some(3));
    assert_eq!(run(&["spec", "validate", "/no/such/file"]).status.code(), Some(3));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "this is not a measurement file\n").unwrap();
    let bad_s = bad.to_str().unwrap();
    assert_eq!(run(&["evaluate", "--ref", bad_s, "--meas", bad_s]).status.code(), Some(3));
    let badspec = dir.path().join("bad.spec");
    fs::write(&badspec, "no section header\n").unwrap();
    assert_eq!(run(&["spec", "validate", badspec.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn chart_gen_respects_layout_flags_and_writes_only_its_dir() {
    let cwd = tempfile::tempdir().unwrap();
    let before: Vec<_> = fs::read_dir(cwd.path()).unwrap().collect();
    assert!(before.is_empty());
    let out = bin()
        .current_dir(cwd.path())
        .args(["chart", "gen", "-o", "target_out", "--patch-px", "10", "--margin", "5"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let entries: Vec<String> = fs::read_dir(cwd.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert_eq!(entries, vec!["target_out".to_string()], "stray writes: {entries:?}");

    let ppm = fs::read(cwd.path().join("target_out/chart.ppm")).unwrap();
    let header = format!("P6\n{} {}\n255\n", 22 * 10 + 10, 12 * 10 + 10);
    assert!(ppm.starts_with(header.as_bytes()));
}

#[test]
fn chart_reference_has_264_data_rows() {
    let dir = tempfile::tempdir().unwrap();
    assert!(bin().args(["chart", "gen", "-o"]).arg(dir.path()).status().unwrap().success());
    let text = fs::read_to_string(dir.path().join("chart_ref.txt")).unwrap();
    let set = pressform_core::cgats::parse_measurements(&text).unwrap();
    assert_eq!(set.rows.len(), 264);
    assert_eq!(set.rows[0].id, "A1");
}

#[test]
fn separate_triplets_and_raster() {
    let dir = tempfile::tempdir().unwrap();
    let trips = dir.path().join("rgb.txt");
    fs::write(&trips, "255 255 255\n0 0 0\n# comment\n10 200 30\n").unwrap();
    let out = run(&["separate", "--input", trips.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("1 255 255 255 0 0 0 0 0\n"), "white must separate to nothing:\n{text}");
    let data_rows = text
        .lines()
        .skip_while(|l| *l != "BEGIN_DATA")
        .skip(1)
        .take_while(|l| *l != "END_DATA")
        .count();
    assert_eq!(data_rows, 3);

    // bad triplet line is a parse fault
    fs::write(&trips, "1 2\n").unwrap();
    assert_eq!(run(&["separate", "--input", trips.to_str().unwrap()]).status.code(), Some(3));

    // raster path: a 2x1 ppm
    let ppm = dir.path().join("tiny.ppm");
    fs::write(&ppm, b"P6\n2 1\n255\n\xff\xff\xff\x00\x00\x00").unwrap();
    let out_file = dir.path().join("sep.txt");
    let out = run(&[
        "separate",
        "--raster",
        ppm.to_str().unwrap(),
        "-o",
        out_file.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = fs::read_to_string(&out_file).unwrap();
    assert!(text.contains("x0y0 255 255 255"));
    assert!(text.contains("x1y0 0 0 0"));
}

#[test]
fn separation_flags_override_config_which_overrides_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("house.spec");
    let mut spec = JobSpec::example();
    spec.sections
        .iter_mut()
        .find(|s| s.name == "OUTPUT_PROFILE")
        .unwrap()
        .entries
        .iter_mut()
        .find(|(k, _)| k == "tic_limit")
        .unwrap()
        .1 = "2.5".to_string();
    fs::write(&config, write_jobspec(&spec)).unwrap();
    let trips = dir.path().join("rgb.txt");
    fs::write(&trips, "0 0 0\n").unwrap();

    // config value wins over the built-in default
    let out = run(&[
        "--config",
        config.to_str().unwrap(),
        "separate",
        "--input",
        trips.to_str().unwrap(),
    ]);
    assert!(stdout(&out).contains("tic=2.5"), "{}", stdout(&out));

    // explicit flag wins over the config
    let out = run(&[
        "--config",
        config.to_str().unwrap(),
        "separate",
        "--input",
        trips.to_str().unwrap(),
        "--tic",
        "1.8",
    ]);
    assert!(stdout(&out).contains("tic=1.8"), "{}", stdout(&out));

    // broken config is a fault
    fs::write(&config, "[OUTPUT_PROFILE]\ntic_limit = not-a-number\n").unwrap();
    let out = run(&[
        "--config",
        config.to_str().unwrap(),
        "separate",
        "--input",
        trips.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

/// A measurement file for an identity scanner reading the chart: scan RGB
/// equals the chart rendering, Lab is what that rendering measures as.
fn identity_scan_file(path: &Path) {
    let boundary = GamutBoundary::srgb_default();
    let chart = build_target(&boundary, ChartParams::default());
    let set = MeasurementSet {
        header: vec![("ORIGINATOR".into(), "\"identity scanner\"".into())],
        extra_fields: vec![],
        rows: chart
            .patches
            .iter()
            .map(|p| MeasurementRow {
                id: p.id(),
                lab: rgb_to_lab(p.reference_rgb),
                rgb: Some(p.reference_rgb),
            })
            .collect(),
    };
    fs::write(path, write_measurements(&set)).unwrap();
}

#[test]
fn fit_writes_model_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let scan = dir.path().join("scan.txt");
    identity_scan_file(&scan);
    let out = bin()
        .args(["fit", "--meas"])
        .arg(&scan)
        .arg("-o")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let model_text = fs::read_to_string(dir.path().join("scanner_model.txt")).unwrap();
    let model = pressform_core::scanner::ScannerModel::parse_table(&model_text).unwrap();
    assert!(model.stats.mean_delta_e < 0.5);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("fit_report.json")).unwrap())
            .unwrap();
    assert_eq!(report["per_patch"].as_array().unwrap().len(), 264);

    // linear basis also accepted
    let out = bin()
        .args(["fit", "--basis", "linear", "--meas"])
        .arg(&scan)
        .arg("-o")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());

    // measurements without RGB columns cannot be fitted
    let no_rgb = dir.path().join("norgb.txt");
    let chart = build_target(&GamutBoundary::srgb_default(), ChartParams::default());
    fs::write(&no_rgb, chart.reference_document()).unwrap();
    let out = bin().args(["fit", "--meas"]).arg(&no_rgb).arg("-o").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn evaluate_flags_diagnostics_and_embeds_specs() {
    let dir = tempfile::tempdir().unwrap();
    assert!(bin().args(["chart", "gen", "-o"]).arg(dir.path()).status().unwrap().success());
    let reference = dir.path().join("chart_ref.txt");

    // shift every measured L by 8: calibration diagnostic, exit 1
    let text = fs::read_to_string(&reference).unwrap();
    let mut set = pressform_core::cgats::parse_measurements(&text).unwrap();
    for row in &mut set.rows {
        row.lab.l += 8.0;
    }
    let shifted = dir.path().join("shifted.txt");
    fs::write(&shifted, write_measurements(&set)).unwrap();
    let report_path = dir.path().join("report.json");
    let out = bin()
        .arg("evaluate")
        .arg("--ref")
        .arg(&reference)
        .arg("--meas")
        .arg(&shifted)
        .arg("-o")
        .arg(&report_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report_path).unwrap()).unwrap();
    assert!(report["diagnostics"]
        .as_array()
        .unwrap()
        .iter()
        .any(|d| d == "Device calibration"));

    // a valid spec is embedded verbatim
    let spec_path = dir.path().join("job.spec");
    let spec_text = write_jobspec(&JobSpec::example());
    fs::write(&spec_path, &spec_text).unwrap();
    let out = bin()
        .arg("evaluate")
        .arg("--ref")
        .arg(&reference)
        .arg("--meas")
        .arg(&reference)
        .arg("--spec")
        .arg(&spec_path)
        .arg("-o")
        .arg(&report_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["job_spec"].as_str().unwrap(), spec_text);

    // an invalid spec is findings: exit 1, not embedded
    fs::write(&spec_path, "[GENERAL]\nobjective = x\n").unwrap();
    let out = bin()
        .arg("evaluate")
        .arg("--ref")
        .arg(&reference)
        .arg("--meas")
        .arg(&reference)
        .arg("--spec")
        .arg(&spec_path)
        .arg("-o")
        .arg(&report_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report_path).unwrap()).unwrap();
    assert!(report["job_spec"].is_null());
}

#[test]
fn spec_validate_exit_codes_and_findings() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("job.spec");

    fs::write(&path, write_jobspec(&JobSpec::example())).unwrap();
    let out = run(&["spec", "validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("valid"));

    let mut spec = JobSpec::example();
    spec.sections.retain(|s| s.name != "RIP");
    fs::write(&path, write_jobspec(&spec)).unwrap();
    let out = run(&["spec", "validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("rip_spec: section absent"));
}

#[test]
fn form_gen_outputs_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        assert!(bin()
            .args(["form", "gen", "--intent", "perceptual", "-o"])
            .arg(dir.path())
            .status()
            .unwrap()
            .success());
    }
    for name in [
        "form_ref.ppm",
        "form_conv.ppm",
        "form_pair.ppm",
        "form_patches.json",
        "form_patches.txt",
        "form_gray_balance.txt",
    ] {
        let x = fs::read(a.path().join(name)).unwrap();
        let y = fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name} differs between runs");
    }
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(a.path().join("form_patches.json")).unwrap())
            .unwrap();
    assert_eq!(report["per_patch"].as_array().unwrap().len(), 199);
}
