mod config;
mod report;
mod scenarios;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use qubit_capacity::{
    divergence_radius_check, find_crossing, optimize_global, optimize_horizontal,
    optimize_shannon_with, optimize_vertical, CapacityResult, ChannelSpec, ChoiMatrix, Error,
    QubitChannel, SearchConfig, SqueezedShift, CP_TOL,
};

use config::{Cli, Format, RunConfig, Task};
use report::{csv_string, num, Report};

const DIVERGENCE_GRID: usize = 10_000;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Channel(#[from] Error),
    #[error(transparent)]
    Io(#[from] anyhow::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            // a map that is not even positive is in particular not CP
            CliError::Channel(Error::NotCompletelyPositive { .. } | Error::NotPositive { .. }) => 3,
            CliError::Channel(Error::NoSignChange { .. }) => 4,
            CliError::Channel(Error::Domain(_) | Error::InvalidEnsemble(_)) => 2,
            CliError::Channel(_) | CliError::Io(_) => 1,
        }
    }
}

/// Emitted text plus the exit status it carries.
struct Outcome {
    text: String,
    code: u8,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, code: 0 }
    }
}

fn search_config(cfg: &RunConfig) -> SearchConfig {
    let mut s = SearchConfig::with_seed(cfg.seed);
    if let Some(n) = cfg.budget.max_evals {
        s.simplex.max_evals = n;
    }
    if let Some(n) = cfg.budget.random_starts {
        s.random_starts = n;
    }
    s
}

fn ensemble_rows(channel: &QubitChannel, r: &CapacityResult) -> Vec<Vec<String>> {
    r.ensemble
        .members()
        .iter()
        .map(|m| {
            let o = channel.apply(m.w);
            [m.p, m.w.x, m.w.y, m.w.z, o.x, o.y, o.z]
                .iter()
                .map(|v| num(*v))
                .collect()
        })
        .collect()
}

const ENSEMBLE_HEADER: [&str; 7] = ["p", "x", "y", "z", "out_x", "out_y", "out_z"];

fn capacity_like(
    cfg: &RunConfig,
    channel: &QubitChannel,
    mut report: Report,
    r: &CapacityResult,
) -> anyhow::Result<String> {
    match cfg.format() {
        Format::Json => {
            report.set("channel", channel).merge(r);
            Ok(report.to_json())
        }
        Format::Csv => csv_string(&ENSEMBLE_HEADER, &ensemble_rows(channel, r)),
    }
}

fn run_capacity(cfg: &RunConfig, channel: &QubitChannel) -> Result<Outcome, CliError> {
    let g = optimize_global(channel, &search_config(cfg));
    let mut report = Report::new("capacity");
    report
        .set("seed", cfg.seed)
        .set("by_size", &g.by_size)
        .set("needs_three_states", g.needs_three_states)
        .set(
            "divergence_excess",
            divergence_radius_check(channel, &g.best, DIVERGENCE_GRID),
        );
    Ok(Outcome::ok(capacity_like(cfg, channel, report, &g.best)?))
}

fn run_shannon(cfg: &RunConfig, channel: &QubitChannel) -> Result<Outcome, CliError> {
    let r = optimize_shannon_with(channel, cfg.shannon_mode, cfg.seed);
    let mut report = Report::new("shannon");
    report
        .set("seed", cfg.seed)
        .set("mode", cfg.shannon_mode)
        .set("measurement_axis", r.measurement_axis);
    Ok(Outcome::ok(capacity_like(cfg, channel, report, &r.result)?))
}

fn run_crossing(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let spec = cfg.crossing.as_ref().expect("validated");
    let family = spec.family();
    let (lo, hi) = spec.bracket();
    let x = find_crossing(|p| family.at(p), lo, hi, spec.tol)?;
    let text = match cfg.format() {
        Format::Json => {
            let mut report = Report::new("crossing");
            report
                .set("family", spec)
                .set("channel", family.at(x.param)?)
                .merge(&x);
            report.to_json()
        }
        Format::Csv => csv_string(
            &[
                "param",
                "vertical",
                "horizontal",
                "vertical_avg_z",
                "horizontal_avg_z",
            ],
            &[[
                x.param,
                x.vertical.value,
                x.horizontal.value,
                x.vertical.avg_output.z,
                x.horizontal.avg_output.z,
            ]
            .iter()
            .map(|v| num(*v))
            .collect()],
        )?,
    };
    Ok(Outcome::ok(text))
}

fn run_ellipse(cfg: &RunConfig, channel: &QubitChannel) -> Result<Outcome, CliError> {
    let samples = cfg.samples.unwrap_or(64);
    let best = optimize_global(channel, &search_config(cfg)).best;
    let mut points: Vec<(f64, f64, &str)> = (0..samples)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / samples as f64;
            let o = channel.apply(qubit_capacity::BlochVector::in_xz_plane(theta));
            (o.x, o.z, "boundary")
        })
        .collect();
    for m in best.ensemble.members() {
        let o = channel.apply(m.w);
        points.push((o.x, o.z, "ensemble"));
    }
    let text = match cfg.format() {
        Format::Csv => {
            let rows: Vec<Vec<String>> = points
                .iter()
                .map(|(x, z, role)| vec![num(*x), num(*z), role.to_string()])
                .collect();
            csv_string(&["x", "z", "role"], &rows)?
        }
        Format::Json => {
            let pts: Vec<_> = points
                .iter()
                .map(|(x, z, role)| serde_json::json!({"x": x, "z": z, "role": role}))
                .collect();
            let mut report = Report::new("ellipse");
            report
                .set("channel", channel)
                .set("samples", samples)
                .set("points", pts);
            report.to_json()
        }
    };
    Ok(Outcome::ok(text))
}

fn run_check_cp(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (channel, eigenvalues) = match cfg.channel_spec()? {
        ChannelSpec::Raw { lambda, shift } => {
            let ch = QubitChannel::new_unchecked(*lambda, *shift);
            (ch, Some(ChoiMatrix::of(&ch).eigenvalues()))
        }
        spec => match spec.build() {
            Ok(ch) => (ch, Some(ChoiMatrix::of(&ch).eigenvalues())),
            Err(Error::NotCompletelyPositive { min_eigenvalue }) => {
                return cp_report(cfg, None, None, min_eigenvalue);
            }
            Err(e) => return Err(e.into()),
        },
    };
    let eig = eigenvalues.expect("computed above");
    cp_report(cfg, Some(&channel), Some(eig), eig[0])
}

fn cp_report(
    cfg: &RunConfig,
    channel: Option<&QubitChannel>,
    eigenvalues: Option<[f64; 4]>,
    min_eigenvalue: f64,
) -> Result<Outcome, CliError> {
    let cp = min_eigenvalue >= -CP_TOL;
    let text = match cfg.format() {
        Format::Json => {
            let mut report = Report::new("check-cp");
            match channel {
                Some(ch) if cp => {
                    report.set("channel", ch);
                }
                Some(ch) => {
                    report.set("lambda", ch.lambda()).set("shift", ch.shift());
                }
                None => {}
            }
            report
                .set("completely_positive", cp)
                .set("min_eigenvalue", min_eigenvalue)
                .set("tolerance", CP_TOL);
            if let Some(e) = eigenvalues {
                report.set("eigenvalues", e);
            }
            report.to_json()
        }
        Format::Csv => csv_string(
            &["min_eigenvalue", "completely_positive"],
            &[vec![num(min_eigenvalue), cp.to_string()]],
        )?,
    };
    if !cp {
        eprintln!(
            "qcap: channel is not completely positive (min Choi eigenvalue {min_eigenvalue:.3e})"
        );
    }
    Ok(Outcome {
        text,
        code: if cp { 0 } else { 3 },
    })
}

fn run_reproduce(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let rows = scenarios::run(&scenarios::table(), search_config(cfg), &cfg.tolerances)?;
    let failed = rows.iter().filter(|r| !r.pass).count();
    let alternative = match QubitChannel::squeezed_with(0.5, 0.435, SqueezedShift::NorthPoleFixed) {
        Ok(_) => "completely positive".to_string(),
        Err(e) => e.to_string(),
    };
    let text = match cfg.format() {
        Format::Json => {
            let mut report = Report::new("reproduce");
            report
                .set("seed", cfg.seed)
                .set("tolerances", cfg.tolerances)
                .set(
                    "squeezed_shift_convention",
                    serde_json::json!({
                        "used": SqueezedShift::OneMinusMu,
                        "alternative": SqueezedShift::NorthPoleFixed,
                        "alternative_status": alternative,
                    }),
                )
                .set("rows", &rows)
                .set("passed", rows.len() - failed)
                .set("failed", failed);
            report.to_json()
        }
        Format::Csv => {
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.scenario.clone(),
                        serde_json::to_value(r.quantity)
                            .unwrap()
                            .as_str()
                            .unwrap_or_default()
                            .to_string(),
                        num(r.observed),
                        num(r.expected),
                        num(r.tolerance),
                        if r.pass { "PASS" } else { "FAIL" }.to_string(),
                    ]
                })
                .collect();
            csv_string(
                &[
                    "scenario",
                    "quantity",
                    "observed",
                    "expected",
                    "tolerance",
                    "status",
                ],
                &body,
            )?
        }
    };
    for r in rows.iter().filter(|r| !r.pass) {
        eprintln!(
            "qcap: FAIL {} / {:?}: observed {} expected {} ± {}",
            r.scenario,
            r.quantity,
            num(r.observed),
            r.expected,
            r.tolerance
        );
    }
    eprintln!(
        "qcap: {} of {} rows passed",
        rows.len() - failed,
        rows.len()
    );
    Ok(Outcome {
        text,
        code: if failed == 0 { 0 } else { 1 },
    })
}

fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.task {
        Task::Crossing => run_crossing(cfg),
        Task::Reproduce => run_reproduce(cfg),
        Task::CheckCp => run_check_cp(cfg),
        task => {
            let channel = cfg.channel_spec()?.build()?;
            match task {
                Task::Capacity => run_capacity(cfg, &channel),
                Task::Vertical => {
                    let r = optimize_vertical(&channel);
                    Ok(Outcome::ok(capacity_like(
                        cfg,
                        &channel,
                        Report::new("vertical"),
                        &r,
                    )?))
                }
                Task::Horizontal => {
                    let r = optimize_horizontal(&channel);
                    Ok(Outcome::ok(capacity_like(
                        cfg,
                        &channel,
                        Report::new("horizontal"),
                        &r,
                    )?))
                }
                Task::Shannon => run_shannon(cfg, &channel),
                Task::Ellipse => run_ellipse(cfg, &channel),
                _ => unreachable!("handled above"),
            }
        }
    }
}

fn emit(cfg: &RunConfig, text: &str) -> anyhow::Result<()> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cfg = match Cli::parse().into_config() {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("qcap: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    match run(&cfg) {
        Ok(out) => {
            if let Err(e) = emit(&cfg, &out.text) {
                eprintln!("qcap: {e}");
                return ExitCode::from(1);
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("qcap: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
