use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use ffem_core::fem1d::{assemble_1d, ThetaStepper, TransientState};
use ffem_core::fem2d::{solve_plate, TemperatureField};
use ffem_core::mesh::Mesh2D;
use ffem_core::uq::{
    compare_scenarios, propagate_model, sensitivity, FuzzyTemperatureField, ParameterKind,
    PlateModel, ScenarioComparison, SensitivityReport,
};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::number::fmt9;

/// Which parameters a sweep treats as fuzzy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum)]
pub enum ScenarioSelector {
    HOnly,
    QOnly,
    TinfOnly,
    All,
    /// The flags in the `[fuzzy]` section.
    Custom,
}

impl ScenarioSelector {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioSelector::HOnly => "h-only",
            ScenarioSelector::QOnly => "q-only",
            ScenarioSelector::TinfOnly => "tinf-only",
            ScenarioSelector::All => "all",
            ScenarioSelector::Custom => "custom",
        }
    }

    pub fn kinds(self, cfg: &RunConfig) -> Vec<ParameterKind> {
        use ParameterKind::*;
        match self {
            ScenarioSelector::HOnly => vec![H],
            ScenarioSelector::QOnly => vec![Q],
            ScenarioSelector::TinfOnly => vec![TInf],
            ScenarioSelector::All => vec![H, Q, TInf],
            ScenarioSelector::Custom => cfg.fuzzy.enabled(),
        }
    }
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn write_csv<I>(path: &Path, header: &[String], rows: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::csv(path, e))?;
    w.write_record(header).map_err(|e| CliError::csv(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| CliError::csv(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

fn header(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

pub fn write_nodes(path: &Path, mesh: &Mesh2D<f64>) -> Result<(), CliError> {
    let rows = mesh
        .nodes()
        .iter()
        .map(|n| vec![n.id.to_string(), fmt9(n.x), fmt9(n.y)]);
    write_csv(path, &header(&["node_id", "x_cm", "y_cm"]), rows)
}

pub fn write_temperature(path: &Path, field: &TemperatureField<f64>) -> Result<(), CliError> {
    let rows = field
        .values
        .iter()
        .enumerate()
        .map(|(i, &t)| vec![i.to_string(), fmt9(t)]);
    write_csv(path, &header(&["node_id", "T"]), rows)
}

/// Rows ordered by alpha level, then node.
pub fn write_envelope(path: &Path, field: &FuzzyTemperatureField<f64>) -> Result<(), CliError> {
    let rows = field.alphas().iter().enumerate().flat_map(|(li, &alpha)| {
        field
            .envelope(li)
            .iter()
            .enumerate()
            .map(move |(node, iv)| {
                vec![node.to_string(), fmt9(alpha), fmt9(iv.lo()), fmt9(iv.hi())]
            })
    });
    write_csv(path, &header(&["node_id", "alpha", "lower", "upper"]), rows)
}

pub fn write_sensitivity(path: &Path, report: &SensitivityReport<f64>) -> Result<(), CliError> {
    let label = &report.label;
    let rows = report
        .widths
        .iter()
        .enumerate()
        .map(|(i, &w)| vec![label.clone(), i.to_string(), fmt9(w)])
        .chain([
            vec![
                label.clone(),
                "average_width".into(),
                fmt9(report.average_width),
            ],
            vec![
                label.clone(),
                "variance".into(),
                fmt9(report.variance_of_widths),
            ],
        ]);
    write_csv(path, &header(&["scenario", "node_id", "width"]), rows)
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub mesh: Mesh2D<f64>,
    pub field: TemperatureField<f64>,
    pub files: Vec<PathBuf>,
}

/// Crisp plate solve; writes `nodes.csv`, `temperature.csv` and optionally `mesh.txt`.
pub fn solve(cfg: &RunConfig, out: &Path, dump_mesh: bool) -> Result<SolveOutcome, CliError> {
    let mesh = cfg.mesh()?;
    let field = solve_plate(&mesh, &cfg.plate_parameters(), &cfg.boundary_conditions())?;
    create_dir(out)?;
    let mut files = vec![out.join("nodes.csv"), out.join("temperature.csv")];
    write_nodes(&files[0], &mesh)?;
    write_temperature(&files[1], &field)?;
    if dump_mesh {
        let path = out.join("mesh.txt");
        fs::write(&path, mesh.dump()).map_err(|e| CliError::io(&path, e))?;
        files.push(path);
    }
    Ok(SolveOutcome { mesh, field, files })
}

#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub selector: ScenarioSelector,
    pub dir: PathBuf,
    pub field: FuzzyTemperatureField<f64>,
    pub report: SensitivityReport<f64>,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub runs: Vec<ScenarioRun>,
    /// Every pair of runs, in selection order.
    pub comparisons: Vec<ScenarioComparison<f64>>,
}

/// Fuzzy alpha sweep for each selected scenario.
///
/// A single scenario writes `envelope.csv` and `sensitivity.csv` into `out`;
/// several write into `out/<scenario>/`.
pub fn fuzzy_sweep(
    cfg: &RunConfig,
    out: &Path,
    selectors: &[ScenarioSelector],
    workers: Option<usize>,
) -> Result<SweepOutcome, CliError> {
    let selectors = if selectors.is_empty() {
        &[ScenarioSelector::Custom][..]
    } else {
        selectors
    };
    for (i, s) in selectors.iter().enumerate() {
        if selectors[..i].contains(s) {
            return Err(CliError::Scenario(format!(
                "scenario {} selected more than once",
                s.name()
            )));
        }
        if s.kinds(cfg).is_empty() {
            return Err(CliError::Scenario(format!(
                "scenario {} has no fuzzy parameter; enable h, q or t_inf in [fuzzy] \
                 or pick h-only, q-only, tinf-only or all",
                s.name()
            )));
        }
    }
    if workers == Some(0) {
        return Err(CliError::Config("--workers must be at least 1".into()));
    }

    let mesh = cfg.mesh()?;
    let model = PlateModel::new(&mesh, cfg.plate_parameters(), cfg.boundary_conditions());
    let mut runs = Vec::with_capacity(selectors.len());
    for &selector in selectors {
        let scenario = cfg.scenario(&selector.kinds(cfg))?;
        let field = propagate_model(&model, &scenario, workers)?;
        let report = sensitivity(&field, selector.name())?;
        let dir = if selectors.len() > 1 {
            out.join(selector.name())
        } else {
            out.to_path_buf()
        };
        create_dir(&dir)?;
        write_envelope(&dir.join("envelope.csv"), &field)?;
        write_sensitivity(&dir.join("sensitivity.csv"), &report)?;
        runs.push(ScenarioRun {
            selector,
            dir,
            field,
            report,
        });
    }

    let mut comparisons = Vec::new();
    for (i, a) in runs.iter().enumerate() {
        for b in &runs[i + 1..] {
            comparisons.push(compare_scenarios(&a.report, &b.report)?);
        }
    }
    Ok(SweepOutcome { runs, comparisons })
}

#[derive(Debug, Clone)]
pub struct RodOutcome {
    pub history: Vec<TransientState<f64>>,
    pub courant: f64,
    pub cell_peclet: f64,
    /// Initial and final front location when a front is configured.
    pub front: Option<(f64, f64)>,
    pub file: PathBuf,
}

/// Transient rod run; writes `rod_timeseries.csv` with one row per step.
pub fn rod(cfg: &RunConfig, out: &Path) -> Result<RodOutcome, CliError> {
    let rc = &cfg.rod;
    let rod = rc.rod();
    let sys = assemble_1d(&rod)?;
    let stepper = ThetaStepper::new(&sys, rc.dt, rc.theta, rc.ends())?;
    let history = stepper.run(rc.initial_state(), rc.steps)?;

    create_dir(out)?;
    let file = out.join("rod_timeseries.csv");
    let mut head = vec!["time".to_string()];
    head.extend((0..rod.node_count()).map(|i| format!("node_{i}")));
    let rows = history.iter().map(|s| {
        std::iter::once(fmt9(s.time))
            .chain(s.values.iter().map(|&v| fmt9(v)))
            .collect()
    });
    write_csv(&file, &head, rows)?;

    let front = rc.front().map(|f| {
        let at = |s: &TransientState<f64>| f.locate(sys.integral(&s.values), rod.length);
        (
            at(&history[0]),
            at(history.last().expect("initial state present")),
        )
    });
    Ok(RodOutcome {
        courant: rod.courant(rc.dt),
        cell_peclet: rod.cell_peclet(),
        history,
        front,
        file,
    })
}
