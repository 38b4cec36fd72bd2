//! `lambda-mixer` command-line front end.
//!
//! Exit codes: 0 success, 1 invalid input or domain error, 2 numerical
//! failure (including any flagged sweep point), 3 I/O failure, 4 design
//! check failed.

mod svg;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use lambda_mixer_core::design::{full_report, DesignReport};
use lambda_mixer_core::propagation::{n_fwm, noise_suppression_ratio};
use lambda_mixer_core::record::{NoiseSummary, Payload, RunRecord};
use lambda_mixer_core::scan::{sweep_absorber_depth, sweep_detuning, Axis, SpectrumRecord, SweepOutput, SweepSpec};
use lambda_mixer_core::scenario::{shipped_source, StokesNorm};
use lambda_mixer_core::{Error, Scenario};

use svg::{Panel, Series};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_DESIGN: i32 = 4;

pub const ENV_SCENARIO_DIR: &str = "LAMBDA_MIXER_SCENARIO_DIR";

pub const DETUNING_HEADER: &str = "delta_mhz,probe_transmission,stokes_output,absorber_profile,eit_reference";
pub const DEPTH_HEADER: &str = "d_abs,probe_peak,stokes_peak,eit_reference";

#[derive(Debug, Parser)]
#[command(name = "lambda-mixer", version, about = "Four-wave-mixing gain suppression in EIT media")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Probe and Stokes spectra versus two-photon detuning.
    ScanDetuning(Common),
    /// Peak outputs versus absorber optical depth.
    ScanDabs(Common),
    /// Evaluate the design checks for a scenario.
    Design(Common),
    /// Noise-photon numbers with and without the absorber.
    Noise(Common),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum NormArg {
    Input,
    CurveMax,
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario file, or the name of a shipped scenario.
    #[arg(long)]
    scenario: String,
    /// Output CSV path (scans write to stdout without it).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write a JSON run record (scans) or print JSON (design, noise).
    #[arg(long)]
    json: bool,
    /// Write an SVG plot next to the CSV.
    #[arg(long)]
    svg: bool,
    /// Sweep worker threads; 0 uses every available core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Override the scenario's Stokes normalization.
    #[arg(long, value_enum)]
    stokes_norm: Option<NormArg>,
}

/// Failure carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }

    fn io(path: &Path, err: std::io::Error) -> Self {
        Failure::new(EXIT_IO, format!("{}: {err}", path.display()))
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Validation(_) | Error::Domain(_) | Error::Infeasible(_) => EXIT_INPUT,
            Error::Singular { .. } | Error::Integration { .. } => EXIT_NUMERICAL,
        };
        Failure::new(code, e.to_string())
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::ScanDetuning(c) => scan(c, Axis::TwoPhotonDetuning),
        Command::ScanDabs(c) => scan(c, Axis::AbsorberDepth),
        Command::Design(c) => design(c),
        Command::Noise(c) => noise(c),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

/// Resolves `arg` as a path, then as `<name>.toml` under
/// `$LAMBDA_MIXER_SCENARIO_DIR`, then as a shipped scenario name.
fn load_scenario(arg: &str) -> Result<Scenario, Failure> {
    let path = PathBuf::from(arg);
    let source = if path.is_file() {
        fs::read_to_string(&path).map_err(|e| Failure::io(&path, e))?
    } else {
        let name = arg.strip_suffix(".toml").unwrap_or(arg);
        let in_dir = std::env::var_os(ENV_SCENARIO_DIR)
            .map(|dir| Path::new(&dir).join(format!("{name}.toml")))
            .filter(|p| p.is_file());
        match (in_dir, shipped_source(name)) {
            (Some(p), _) => fs::read_to_string(&p).map_err(|e| Failure::io(&p, e))?,
            (None, Some(s)) => s.to_string(),
            (None, None) => {
                return Err(Failure::new(EXIT_IO, format!("{}: no such file or shipped scenario", path.display())))
            }
        }
    };
    Scenario::from_toml_str(&source).map_err(|e| Failure::new(EXIT_INPUT, format!("invalid scenario {arg}:\n{e}")))
}

fn apply_flags(scenario: &mut Scenario, c: &Common) {
    if let Some(n) = c.stokes_norm {
        scenario.options.stokes_normalization = match n {
            NormArg::Input => StokesNorm::Input,
            NormArg::CurveMax => StokesNorm::CurveMax,
        };
    }
}

fn sweep_for(scenario: &Scenario, axis: Axis) -> SweepSpec {
    match &scenario.sweep {
        Some(s) if s.axis == axis => *s,
        _ => match axis {
            Axis::TwoPhotonDetuning => SweepSpec::default_detuning(&scenario.eit),
            Axis::AbsorberDepth => SweepSpec::default_depth(&scenario.eit),
        },
    }
}

fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:e}")
    }
}

/// CSV text for a sweep; flagged rows carry `nan` outputs.
pub fn to_csv(axis: Axis, records: &[SpectrumRecord]) -> String {
    let mut out = String::new();
    let header = match axis {
        Axis::TwoPhotonDetuning => DETUNING_HEADER,
        Axis::AbsorberDepth => DEPTH_HEADER,
    };
    out.push_str(header);
    out.push('\n');
    for r in records {
        let v = |x: f64| if r.flagged { f64::NAN } else { x };
        let _ = match axis {
            Axis::TwoPhotonDetuning => writeln!(
                out,
                "{},{},{},{},{}",
                num(r.x),
                num(v(r.probe_transmission)),
                num(v(r.stokes_output)),
                num(v(r.absorber_profile)),
                num(v(r.eit_reference))
            ),
            Axis::AbsorberDepth => writeln!(
                out,
                "{},{},{},{}",
                num(r.x),
                num(v(r.probe_transmission)),
                num(v(r.stokes_output)),
                num(v(r.eit_reference))
            ),
        };
    }
    out
}

fn plot(axis: Axis, records: &[SpectrumRecord]) -> String {
    let xs: Vec<f64> = records.iter().map(|r| r.x).collect();
    let col = |f: fn(&SpectrumRecord) -> f64| -> Vec<f64> {
        records.iter().map(|r| if r.flagged { f64::NAN } else { f(r) }).collect()
    };
    let probe = col(|r| r.probe_transmission);
    let stokes = col(|r| r.stokes_output);
    let eit = col(|r| r.eit_reference);
    match axis {
        Axis::TwoPhotonDetuning => {
            let profile = col(|r| r.absorber_profile);
            // Absorber shape is scaled onto each panel's own range.
            let scaled = |ys: &[f64]| {
                let top = ys.iter().copied().filter(|y| y.is_finite()).fold(0.0, f64::max);
                profile.iter().map(|p| p * top).collect::<Vec<_>>()
            };
            svg::render(&[
                Panel {
                    title: "Probe transmission",
                    x_label: "two-photon detuning (MHz)",
                    y_label: "|T_S|^2",
                    log_x: false,
                    series: vec![
                        Series { label: "probe", xs: &xs, ys: probe.clone(), color: "#1f4e9c", dash: None },
                        Series { label: "EIT only", xs: &xs, ys: eit.clone(), color: "#7a7a7a", dash: None },
                        Series {
                            label: "absorber shape",
                            xs: &xs,
                            ys: scaled(&probe),
                            color: "#c0392b",
                            dash: Some("6 4"),
                        },
                    ],
                },
                Panel {
                    title: "Stokes output",
                    x_label: "two-photon detuning (MHz)",
                    y_label: "Stokes intensity (arb.)",
                    log_x: false,
                    series: vec![
                        Series { label: "Stokes", xs: &xs, ys: stokes.clone(), color: "#1e8449", dash: None },
                        Series {
                            label: "absorber shape",
                            xs: &xs,
                            ys: scaled(&stokes),
                            color: "#c0392b",
                            dash: Some("6 4"),
                        },
                    ],
                },
            ])
        }
        Axis::AbsorberDepth => svg::render(&[
            Panel {
                title: "Probe peak",
                x_label: "absorber optical depth D_abs",
                y_label: "peak |T_S|^2",
                log_x: true,
                series: vec![
                    Series { label: "probe peak", xs: &xs, ys: probe, color: "#1f4e9c", dash: None },
                    Series { label: "EIT only", xs: &xs, ys: eit, color: "#7a7a7a", dash: Some("6 4") },
                ],
            },
            Panel {
                title: "Stokes peak",
                x_label: "absorber optical depth D_abs",
                y_label: "Stokes intensity (arb.)",
                log_x: true,
                series: vec![Series { label: "Stokes peak", xs: &xs, ys: stokes, color: "#1e8449", dash: None }],
            },
        ]),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::io(path, e))
}

fn record(scenario: Scenario, results: Payload, flagged: Vec<lambda_mixer_core::scan::FlaggedPoint>) -> RunRecord {
    RunRecord {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        timestamp: chrono::Utc::now().to_rfc3339(),
        scenario,
        results,
        flagged,
    }
}

fn scan(c: &Common, axis: Axis) -> Result<i32, Failure> {
    if (c.json || c.svg) && c.out.is_none() {
        return Err(Failure::new(EXIT_INPUT, "--json and --svg need --out for scans"));
    }
    let mut scenario = load_scenario(&c.scenario)?;
    apply_flags(&mut scenario, c);
    let spec = sweep_for(&scenario, axis);
    let SweepOutput { records, flagged, .. } = match axis {
        Axis::TwoPhotonDetuning => sweep_detuning(&scenario, &spec, c.workers)?,
        Axis::AbsorberDepth => sweep_absorber_depth(&scenario, &spec, c.workers)?,
    };
    let csv = to_csv(axis, &records);
    match &c.out {
        None => print!("{csv}"),
        Some(out) => {
            write_file(out, &csv)?;
            if c.svg {
                write_file(&out.with_extension("svg"), &plot(axis, &records))?;
            }
            if c.json {
                let payload = match axis {
                    Axis::TwoPhotonDetuning => Payload::DetuningScan { records },
                    Axis::AbsorberDepth => Payload::DepthScan { records },
                };
                let json = record(scenario, payload, flagged.clone())
                    .to_json()
                    .map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;
                write_file(&out.with_extension("json"), &json)?;
            }
        }
    }
    if flagged.is_empty() {
        Ok(EXIT_OK)
    } else {
        for p in &flagged {
            eprintln!("flagged point {} at x = {}: {}", p.index, p.x, p.reason);
        }
        Ok(EXIT_NUMERICAL)
    }
}

fn verdict(passed: bool) -> &'static str {
    if passed {
        "pass"
    } else {
        "FAIL"
    }
}

/// Human-readable design table.
pub fn design_table(r: &DesignReport) -> String {
    let mut t = String::new();
    let w = &r.rabi_window;
    let _ = writeln!(t, "{:<18} {:>12}  {:<6} criterion", "check", "value", "result");
    let _ = writeln!(t, "{:<18} {:>12.4}  {:<6} {}", "rabi_window", w.omega_c, verdict(w.passed), w.criterion);
    let _ = writeln!(t, "{:<18} {:>12.4}", "fwm_strength", r.fwm_strength);
    let _ = writeln!(t, "{:<18} {:>12.4e}", "n_fwm", r.n_fwm);
    let d = &r.d_abs_required;
    let omega = d.omega_a.map_or("-".to_string(), |v| format!("{v:.4}"));
    let _ = writeln!(
        t,
        "{:<18} {:>12.4}  {:<6} omega_a = {omega} MHz{}",
        "d_abs_required",
        d.target_d_abs,
        verdict(d.feasible),
        d.note.as_deref().map(|n| format!(" ({n})")).unwrap_or_default()
    );
    let b = &r.bandwidth;
    let _ = writeln!(t, "{:<18} {:>12.4}  {:<6} {}", "bandwidth", b.lhs, verdict(b.passed), b.criterion);
    let _ = writeln!(t, "{:<18} {:>12.4e}", "noise_ratio", r.noise_ratio);
    let x = &r.raman_scatter;
    let _ = writeln!(t, "{:<18} {:>12.4}  {:<6} {}", "raman_scatter x", x.x, verdict(x.passed), x.criterion);
    let _ = writeln!(t, "overall: {}", verdict(r.passed));
    if !r.passed {
        let _ = writeln!(t, "failed: {}", r.failures().join(", "));
    }
    t
}

fn design(c: &Common) -> Result<i32, Failure> {
    let mut scenario = load_scenario(&c.scenario)?;
    apply_flags(&mut scenario, c);
    let report = full_report(&scenario)?;
    if c.json {
        let json = serde_json::to_string_pretty(&report).map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;
        println!("{json}");
    } else {
        print!("{}", design_table(&report));
    }
    Ok(if report.passed { EXIT_OK } else { EXIT_DESIGN })
}

/// Noise figures; the absorber depth is `options.d_abs` when given,
/// otherwise `target_depth_ratio · D`.
pub fn noise_summary(scenario: &Scenario) -> lambda_mixer_core::Result<NoiseSummary> {
    let eit = &scenario.eit;
    let d_abs = scenario.options.d_abs.unwrap_or(scenario.options.target_depth_ratio * eit.depth);
    let n = n_fwm(eit);
    let ratio = noise_suppression_ratio(eit, d_abs)?;
    Ok(NoiseSummary { n_fwm: n, d_abs, ratio, n_abs: ratio * n })
}

fn noise(c: &Common) -> Result<i32, Failure> {
    let scenario = load_scenario(&c.scenario)?;
    let s = noise_summary(&scenario)?;
    if c.json {
        let json = serde_json::to_string_pretty(&s).map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;
        println!("{json}");
    } else {
        println!("n_fwm       {:e}", s.n_fwm);
        println!("d_abs       {:e}", s.d_abs);
        println!("ratio       {:e}", s.ratio);
        println!("n_abs       {:e}", s.n_abs);
    }
    Ok(EXIT_OK)
}
