//! Sweep subcommands. Each returns the CSV document as a string.

use std::fmt::Write as _;

use rayon::prelude::*;
use udwi_core::classical::{
    classical_probability_closed, envelope_visibility, fringe_visibility, DEFAULT_THETA_SAMPLES,
};
use udwi_core::ensemble::{regime, EnsemblePattern};
use udwi_core::goldenrule::{
    inter_package_modulation, naive_golden_rule_probability, on_shell_wavenumber,
};
use udwi_core::system::{povm_probabilities, system_state_with_mode};
use udwi_core::udw::{base_amplitude, k_star, udw_probability};
use udwi_core::Port;

use crate::config::{Scenario, ScenarioConfig};
use crate::error::{CliError, CliResult};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "UDWI_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Classical,
    Udw,
    Ensemble,
    Povm,
    Goldenrule,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Classical => "classical",
            Command::Udw => "udw",
            Command::Ensemble => "ensemble",
            Command::Povm => "povm",
            Command::Goldenrule => "goldenrule",
        }
    }

    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Command::Classical => &["sweep_value", "p_d1", "p_d2", "visibility_envelope"],
            Command::Udw => &[
                "sweep_value",
                "k_star",
                "a0_sq",
                "p_d1",
                "p_d2",
                "sum_rule_residual",
            ],
            Command::Ensemble => &[
                "sweep_value",
                "p_d1",
                "p_d2",
                "visibility",
                "k_medstar",
                "regime",
            ],
            Command::Povm => &[
                "sweep_value",
                "p_i",
                "p_ii",
                "p_iii",
                "completeness_residual",
            ],
            Command::Goldenrule => &[
                "sweep_value",
                "naive_d1",
                "naive_d2",
                "quantum_d1",
                "classical_d1",
                "modulation_factor",
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Cell {
    Num(f64),
    Label(&'static str),
}

/// CSV text plus any warnings raised while computing it.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub csv: String,
    pub warnings: Vec<String>,
}

struct Row {
    cells: Vec<Cell>,
    warning: Option<String>,
}

impl Row {
    fn numbers(values: &[f64]) -> Self {
        Row {
            cells: values.iter().copied().map(Cell::Num).collect(),
            warning: None,
        }
    }
}

/// Number format: 17 significant digits, locale-independent.
pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

/// Thread pool honouring [`THREADS_ENV`].
pub fn thread_pool() -> CliResult<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        match raw.trim().parse::<usize>() {
            Ok(n) if n >= 1 => builder = builder.num_threads(n),
            _ => {
                return Err(CliError::Validation(format!(
                    "{THREADS_ENV}: expected a positive integer, got {raw:?}"
                )))
            }
        }
    }
    builder
        .build()
        .map_err(|e| CliError::Numeric(format!("cannot start worker threads: {e}")))
}

pub fn run(command: Command, cfg: &ScenarioConfig) -> CliResult<RunOutput> {
    cfg.validate()?;
    if command == Command::Ensemble && cfg.scenario()?.det.gaussian_window().is_none() {
        return Err(CliError::Validation(
            "detector.switching.kind: ensemble runs need \"gaussian\" switching".into(),
        ));
    }
    let values = cfg.sweep_values();
    let pool = thread_pool()?;
    let rows: Vec<CliResult<Row>> = pool.install(|| {
        values
            .par_iter()
            .map(|&v| {
                let s = cfg.at(v)?;
                let mut row = compute_row(command, &s)?;
                row.cells.insert(0, Cell::Num(v));
                Ok(row)
            })
            .collect()
    });

    let mut csv = String::new();
    writeln!(
        csv,
        "# udwi {} config_sha256={} mode={}",
        command.name(),
        cfg.digest(),
        cfg.effective_mode()
    )
    .unwrap();
    csv.push_str(&command.columns().join(","));
    csv.push('\n');
    let mut warnings = Vec::new();
    for (row, v) in rows.into_iter().zip(&values) {
        let row = row?;
        if let Some(w) = row.warning {
            warnings.push(format!("sweep_value {}: {w}", format_number(*v)));
        }
        let fields: Vec<String> = row
            .cells
            .iter()
            .map(|c| match c {
                Cell::Num(x) if !x.is_finite() => Err(CliError::Numeric(format!(
                    "non-finite result at sweep_value {}",
                    format_number(*v)
                ))),
                Cell::Num(x) => Ok(format_number(*x)),
                Cell::Label(s) => Ok((*s).to_string()),
            })
            .collect::<CliResult<_>>()?;
        csv.push_str(&fields.join(","));
        csv.push('\n');
    }
    Ok(RunOutput { csv, warnings })
}

fn model(e: udwi_core::Error) -> CliError {
    CliError::from_model(e, "scenario")
}

fn compute_row(command: Command, s: &Scenario) -> CliResult<Row> {
    match command {
        Command::Classical => {
            let c = classical_probability_closed(&s.pulse, &s.ifm, Port::D1);
            Ok(Row::numbers(&[
                c.probability,
                c.at(Port::D2, s.ifm.theta()),
                envelope_visibility(&s.pulse, s.ifm.delta_l()),
            ]))
        }
        Command::Udw => {
            let d1 = udw_probability(&s.pulse, &s.ifm, &s.det, Port::D1).map_err(model)?;
            let d2 = d1.at(Port::D2, s.ifm.theta());
            let a0 = base_amplitude(&s.pulse, &s.det).map_err(model)?;
            let a0_sq = a0 * a0;
            let mut row = Row::numbers(&[
                k_star(&s.pulse, &s.det),
                a0_sq,
                d1.probability,
                d2,
                d1.probability + d2 - a0_sq,
            ]);
            if d1.perturbativity_warning {
                row.warning = Some(format!("|A0| = {a0:e} is not perturbative"));
            }
            Ok(row)
        }
        Command::Ensemble => {
            let pattern = EnsemblePattern::new(&s.pulse, &s.ifm, &s.det, s.mode).map_err(model)?;
            let theta = s.ifm.theta();
            let visibility = fringe_visibility(
                |th| pattern.probability(Port::D1, th),
                DEFAULT_THETA_SAMPLES,
            )
            .map_err(model)?;
            let label = regime(&s.pulse, &s.ifm, &s.det).map_err(model)?;
            let mut row = Row::numbers(&[
                pattern.probability(Port::D1, theta),
                pattern.probability(Port::D2, theta),
                visibility,
                pattern.k_medstar,
            ]);
            row.cells.push(Cell::Label(label.as_str()));
            Ok(row)
        }
        Command::Povm => {
            let state =
                system_state_with_mode(&s.pulse, &s.ifm, &s.det, &s.det, s.mode).map_err(model)?;
            let p = povm_probabilities(&state);
            Ok(Row::numbers(&[p.p_i, p.p_ii, p.p_iii, p.total() - 1.0]))
        }
        Command::Goldenrule => {
            let (gap, mass, theta) = (s.det.energy_gap(), s.pulse.mass(), s.ifm.theta());
            let naive = naive_golden_rule_probability(&s.ifm, gap, mass, Port::D1)
                .map_err(|e| CliError::from_model(e, "detector.energy_gap"))?;
            let k = on_shell_wavenumber(gap, mass).map_err(model)?;
            // The quantum pattern divided by its mean, to share the naive scale.
            let q = udw_probability(&s.pulse, &s.ifm, &s.det, Port::D1).map_err(model)?;
            let quantum = if q.mean > 0.0 {
                0.5 * q.probability / q.mean
            } else {
                0.0
            };
            let classical = classical_probability_closed(&s.pulse, &s.ifm, Port::D1).probability;
            Ok(Row::numbers(&[
                naive.probability,
                naive.at(Port::D2, theta),
                quantum,
                classical,
                inter_package_modulation(theta, s.ifm.delta_l(), k),
            ]))
        }
    }
}
