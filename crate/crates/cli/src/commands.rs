use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use ioncat::engine::{
    resonant_duration, run_protocol, CarrierMode, MotionalStateFile, ProtocolKind, ProtocolReport, ProtocolResult,
    VibronicState,
};
use ioncat::motional::MotionalState;
use ioncat::oracle::{
    dispersive_fidelity, entangled_cat_full_space, run_suite, FullSpaceState, SuiteOptions, MAX_FULL_SPACE_IONS,
};
use ioncat::wigner::{suggest_axes, wigner, Axis, WignerGrid};
use ioncat::C64;

use crate::config::{self, OutputFormat, RunConfig, SweepAxis, SweepConfig};
use crate::CliError;

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    text
}

fn cell(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| format!("{x:e}"))
}

#[derive(Serialize)]
struct WignerMetadata {
    protocol: String,
    n_ions: usize,
    alpha_target: [f64; 2],
    alpha_abs: f64,
    branch: String,
    probability: f64,
}

#[derive(Serialize)]
struct WignerEnvelope<'a> {
    metadata: WignerMetadata,
    grid: &'a WignerGrid,
}

pub struct SimulateArgs {
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub seed: Option<u64>,
}

fn branch_table(report: &ProtocolReport) -> String {
    let mut out = String::from("outcome,probability,norm,mean_n,parity\n");
    for b in &report.branches {
        let _ = writeln!(out, "{},{:e},{:e},{:e},{:e}", b.outcome, b.probability, b.state.norm, b.state.mean_n, b.state.parity);
    }
    out
}

pub fn simulate(args: SimulateArgs) -> Result<(), CliError> {
    let mut cfg: RunConfig = config::parse(&read(&args.config)?, "config")?;
    if let Some(dir) = args.out {
        cfg.output_dir = dir;
    }
    if let Some(format) = args.format {
        cfg.format = format;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    let result = run_protocol(cfg.protocol, cfg.n_ions, cfg.alpha(), &cfg.protocol_options()?)?;
    let report = result.to_report();
    ensure_dir(&cfg.output_dir)?;
    match cfg.format {
        OutputFormat::Json => write(&cfg.output_dir.join("result.json"), &to_json(&report))?,
        OutputFormat::Csv => write(&cfg.output_dir.join("result.csv"), &branch_table(&report))?,
    }
    for b in &report.branches {
        println!("{:<12} probability {:.12}", b.outcome, b.probability);
    }
    if let Some(grid_cfg) = &cfg.wigner {
        let branch = result.branch(&grid_cfg.branch).ok_or_else(|| {
            let names: Vec<&str> = result.branches.iter().map(|b| b.outcome.as_str()).collect();
            CliError::Config(format!("no branch {:?}; available: {}", grid_cfg.branch, names.join(", ")))
        })?;
        let grid = wigner(&branch.state, grid_cfg.x.clone(), grid_cfg.p.clone())?;
        write(&cfg.output_dir.join("wigner.csv"), &grid.to_csv())?;
        let envelope = WignerEnvelope {
            metadata: WignerMetadata {
                protocol: cfg.protocol.as_str().to_string(),
                n_ions: cfg.n_ions,
                alpha_target: cfg.alpha_target,
                alpha_abs: cfg.alpha().norm(),
                branch: branch.outcome.clone(),
                probability: branch.probability,
            },
            grid: &grid,
        };
        write(&cfg.output_dir.join("wigner.json"), &to_json(&envelope))?;
        println!("wigner grid {}x{} written, min W {:.6}", grid_cfg.x.points, grid_cfg.p.points, grid.min());
    }
    Ok(())
}

pub struct ValidateArgs {
    pub quick: bool,
    pub negative_control: bool,
    pub seed: Option<u64>,
}

pub fn validate(args: ValidateArgs) -> Result<(), CliError> {
    let mut options = if args.quick { SuiteOptions::quick() } else { SuiteOptions::default() };
    options.negative_control = args.negative_control;
    if let Some(seed) = args.seed {
        options.seed = seed;
    }
    let report = run_suite(&options)?;
    println!("{:>3} {:>2} {:>4} {:>22} {:>10}  result", "N", "k", "draw", "1 - fidelity", "residual");
    for c in &report.checks {
        println!(
            "{:>3} {:>2} {:>4} {:>22.6e} {:>10.2e}  {}",
            c.n_ions,
            c.order,
            c.draw,
            1.0 - c.fidelity,
            c.symmetric_residual,
            if c.passed { "PASS" } else { "FAIL" }
        );
    }
    println!("worst fidelity {:.15}", report.worst_fidelity());
    if report.passed() {
        println!("all {} checks passed", report.checks.len());
        Ok(())
    } else {
        let failed = report.checks.iter().filter(|c| !c.passed).count();
        Err(CliError::Failed(format!(
            "{failed} of {} checks below {}; worst fidelity {:.15}",
            report.checks.len(),
            report.threshold,
            report.worst_fidelity()
        )))
    }
}

#[derive(Clone, Debug, Serialize)]
struct SweepRow {
    axis: &'static str,
    value: f64,
    n_ions: usize,
    alpha_abs: f64,
    p_all_excited: Option<f64>,
    p_all_ground: Option<f64>,
    p_scaled: Option<f64>,
    p_oracle: Option<f64>,
    fidelity: Option<f64>,
}

/// Joint state of the same protocol on the full register, where one exists.
fn oracle_state(cfg: &RunConfig, result: &ProtocolResult) -> Result<Option<FullSpaceState>, CliError> {
    let n = result.engine.n_ions();
    if n > MAX_FULL_SPACE_IONS {
        return Ok(None);
    }
    let rate = cfg.pulse.dispersive.rate()?;
    let chi = match cfg.protocol {
        ProtocolKind::MultiCat => 0.0,
        ProtocolKind::EntangledCat | ProtocolKind::CatPostselect => {
            std::f64::consts::FRAC_PI_2 * rate.lambda().signum()
        }
        _ => return Ok(None),
    };
    let carrier = chi != 0.0
        && match cfg.carrier {
            CarrierMode::Auto => n % 2 == 0,
            CarrierMode::Always => true,
            CarrierMode::Never => false,
        };
    let tau = cfg
        .resonant_duration
        .unwrap_or_else(|| resonant_duration(result.alpha_target.norm(), cfg.pulse.rabi, cfg.pulse.eta));
    let ground = FullSpaceState::embed(&VibronicState::ground(n, result.engine.space())?)?;
    Ok(Some(entangled_cat_full_space(&ground, chi, carrier, cfg.pulse.rabi, cfg.pulse.eta, tau)?))
}

fn sweep_point(cfg: &SweepConfig, value: f64) -> Result<SweepRow, CliError> {
    let mut run = cfg.run.clone();
    let axis = cfg.sweep.axis;
    match axis {
        SweepAxis::NIons => run.n_ions = value as usize,
        SweepAxis::Alpha => {
            let base = run.alpha();
            let dir = if base.norm() > 0.0 { base / base.norm() } else { C64::new(0.0, 1.0) };
            let a = dir * value;
            run.alpha_target = [a.re, a.im];
        }
        SweepAxis::Eta => run.pulse.dispersive.eta = Some(value),
        SweepAxis::Delta => run.pulse.dispersive.detuning = Some(value),
    }
    let mut row = SweepRow {
        axis: axis.as_str(),
        value,
        n_ions: run.n_ions,
        alpha_abs: run.alpha().norm(),
        p_all_excited: None,
        p_all_ground: None,
        p_scaled: None,
        p_oracle: None,
        fidelity: None,
    };
    match axis {
        SweepAxis::NIons | SweepAxis::Alpha => {
            let result = run_protocol(run.protocol, run.n_ions, run.alpha(), &run.protocol_options()?)?;
            let p = |name: &str| result.branch(name).map_or(0.0, |b| b.probability);
            row.p_all_excited = Some(p("all_excited"));
            row.p_all_ground = Some(p("all_ground"));
            row.p_scaled = Some(p("all_excited") * 2f64.powi(run.n_ions as i32));
            if let Some(full) = oracle_state(&run, &result)? {
                row.p_oracle = Some(full.uniform_probability(true));
                row.fidelity = Some(full.fidelity(&FullSpaceState::embed(&result.final_state)?));
            }
        }
        SweepAxis::Eta | SweepAxis::Delta => {
            let d = &run.pulse.dispersive;
            let (rabi, eta, delta) = (d.rabi.unwrap_or(0.0), d.eta.unwrap_or(0.0), d.detuning.unwrap_or(0.0));
            row.fidelity = Some(dispersive_fidelity(run.n_ions, rabi, eta, delta, run.n_max.unwrap_or(24))?);
        }
    }
    Ok(row)
}

pub struct SweepArgs {
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub format: Option<OutputFormat>,
    pub seed: Option<u64>,
}

pub fn sweep(args: SweepArgs) -> Result<(), CliError> {
    let mut cfg: SweepConfig = config::parse(&read(&args.config)?, "sweep config")?;
    if let Some(dir) = args.out {
        cfg.run.output_dir = dir;
    }
    if let Some(format) = args.format {
        cfg.run.format = format;
    }
    if let Some(seed) = args.seed {
        cfg.run.seed = seed;
    }
    cfg.validate()?;
    let jobs = args.jobs.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Failed(format!("thread pool: {e}")))?;
    let rows: Vec<SweepRow> = pool.install(|| {
        cfg.sweep.values.par_iter().map(|v| sweep_point(&cfg, *v)).collect::<Result<Vec<_>, _>>()
    })?;
    ensure_dir(&cfg.run.output_dir)?;
    match cfg.run.format {
        OutputFormat::Csv => {
            let mut out = String::from("axis,value,n_ions,alpha_abs,p_all_excited,p_all_ground,p_scaled,p_oracle,fidelity\n");
            for r in &rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    r.axis,
                    r.value,
                    r.n_ions,
                    r.alpha_abs,
                    cell(r.p_all_excited),
                    cell(r.p_all_ground),
                    cell(r.p_scaled),
                    cell(r.p_oracle),
                    cell(r.fidelity)
                );
            }
            write(&cfg.run.output_dir.join("sweep.csv"), &out)?;
        }
        OutputFormat::Json => write(&cfg.run.output_dir.join("sweep.json"), &to_json(&rows))?,
    }
    for r in &rows {
        println!(
            "{}={} p_all_excited={} fidelity={}",
            r.axis,
            r.value,
            cell(r.p_all_excited),
            cell(r.fidelity)
        );
    }
    Ok(())
}

pub struct WignerArgs {
    pub state: PathBuf,
    pub branch: String,
    pub x: Option<Vec<f64>>,
    pub p: Option<Vec<f64>>,
    pub points: usize,
    pub out: PathBuf,
    pub format: OutputFormat,
}

fn axis_from(values: &[f64], name: &str) -> Result<Axis, CliError> {
    let points = values[2];
    if points.fract() != 0.0 || points < 1.0 {
        return Err(CliError::Config(format!("--{name}: point count must be a positive integer")));
    }
    Ok(Axis::new(values[0], values[1], points as usize)?)
}

/// Accepts a saved protocol report (branch selected by name) or a bare motional state file.
fn load_motional(path: &Path, branch: &str) -> Result<MotionalState, CliError> {
    let text = read(path)?;
    if let Ok(report) = serde_json::from_str::<ProtocolReport>(&text) {
        let b = report.branch(branch).ok_or_else(|| {
            let names: Vec<&str> = report.branches.iter().map(|b| b.outcome.as_str()).collect();
            CliError::Config(format!("no branch {branch:?} in {}; available: {}", path.display(), names.join(", ")))
        })?;
        return Ok(b.state.to_state()?);
    }
    let file: MotionalStateFile = config::parse(&text, "state file")?;
    Ok(file.to_state()?)
}

pub fn wigner_cmd(args: WignerArgs) -> Result<(), CliError> {
    let state = load_motional(&args.state, &args.branch)?;
    let (auto_x, auto_p) = suggest_axes(&state, args.points)?;
    let xs = match &args.x {
        Some(v) => axis_from(v, "x")?,
        None => auto_x,
    };
    let ps = match &args.p {
        Some(v) => axis_from(v, "p")?,
        None => auto_p,
    };
    let grid = wigner(&state, xs, ps)?;
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(parent)?;
    }
    match args.format {
        OutputFormat::Csv => write(&args.out, &grid.to_csv())?,
        OutputFormat::Json => write(&args.out, &grid.to_json())?,
    }
    println!("grid {}x{}, integral {:.6}, min W {:.6}", grid.x_axis.points, grid.p_axis.points, grid.integral(), grid.min());
    Ok(())
}
