//! Fuzzy uncertainty propagation through the plate solver.
//!
//! Each uncertain parameter is a triangular fuzzy number. For every alpha level
//! the parameters are cut to intervals and the crisp model is evaluated at every
//! corner of the resulting parameter box (the vertex method). A node's envelope
//! at that level is the min/max over those corner solves. This is exact when
//! every nodal temperature is monotone in each parameter over the box, which
//! holds for the linear plate problem; the tests check it against dense
//! sampling rather than assuming it.
//!
//! Sensitivity is measured by the envelope widths at `alpha = 0`.

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::fem2d::{solve_plate, BoundaryConditionSet, FemError, PlateParameters};
use crate::fuzzy::{AlphaLevels, FuzzyError, Interval, TriangularFuzzyNumber};
use crate::mesh::Mesh2D;
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UqError {
    #[error("crisp solve failed at alpha = {alpha} for vertex ({vertex}): {source}")]
    VertexSolve {
        alpha: f64,
        vertex: String,
        source: FemError,
    },
    #[error("model returned {got} values, expected {expected}")]
    ModelOutput { expected: usize, got: usize },
    #[error(transparent)]
    Fuzzy(#[from] FuzzyError),
    #[error("scenario has no fuzzy parameter")]
    NoFuzzyParameter,
    #[error("field has no alpha = 0 level")]
    MissingZeroLevel,
    #[error("reports cover different node counts ({0} vs {1})")]
    NodeCountMismatch(usize, usize),
    #[error("could not start worker pool: {0}")]
    WorkerPool(String),
}

/// The parameters that may carry uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParameterKind {
    H,
    Q,
    TInf,
}

impl ParameterKind {
    pub const ALL: [ParameterKind; 3] = [ParameterKind::H, ParameterKind::Q, ParameterKind::TInf];

    pub fn name(self) -> &'static str {
        match self {
            ParameterKind::H => "h",
            ParameterKind::Q => "q",
            ParameterKind::TInf => "t_inf",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FuzzyParameter<T> {
    Crisp(T),
    Fuzzy(TriangularFuzzyNumber<T>),
}

impl<T: Scalar> FuzzyParameter<T> {
    pub fn modal(&self) -> T {
        match self {
            FuzzyParameter::Crisp(v) => *v,
            FuzzyParameter::Fuzzy(t) => t.modal(),
        }
    }

    pub fn is_fuzzy(&self) -> bool {
        matches!(self, FuzzyParameter::Fuzzy(_))
    }

    pub fn cut(&self, alpha: T) -> Result<Interval<T>, FuzzyError> {
        match self {
            FuzzyParameter::Crisp(v) => Ok(Interval::point(*v)),
            FuzzyParameter::Fuzzy(t) => t.alpha_cut(alpha),
        }
    }
}

/// Values of the uncertain parameters for one crisp solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterPoint<T> {
    pub h: T,
    pub q: T,
    pub t_inf: T,
}

impl<T: Scalar> ParameterPoint<T> {
    pub fn get(&self, kind: ParameterKind) -> T {
        match kind {
            ParameterKind::H => self.h,
            ParameterKind::Q => self.q,
            ParameterKind::TInf => self.t_inf,
        }
    }

    pub fn set(&mut self, kind: ParameterKind, v: T) {
        match kind {
            ParameterKind::H => self.h = v,
            ParameterKind::Q => self.q = v,
            ParameterKind::TInf => self.t_inf = v,
        }
    }
}

impl<T: Scalar> fmt::Display for ParameterPoint<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "h = {}, q = {}, t_inf = {}", self.h, self.q, self.t_inf)
    }
}

/// Crisp or fuzzy value for each of `h`, `q`, `t_inf`, plus the alpha grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyScenario<T> {
    pub h: FuzzyParameter<T>,
    pub q: FuzzyParameter<T>,
    pub t_inf: FuzzyParameter<T>,
    pub alpha_levels: AlphaLevels<T>,
}

impl<T: Scalar> FuzzyScenario<T> {
    /// All parameters crisp at the values in `base`.
    pub fn crisp(base: &PlateParameters<T>, alpha_levels: AlphaLevels<T>) -> Self {
        Self {
            h: FuzzyParameter::Crisp(base.h),
            q: FuzzyParameter::Crisp(base.q),
            t_inf: FuzzyParameter::Crisp(base.t_inf),
            alpha_levels,
        }
    }

    /// Makes `kinds` fuzzy as `value ± pct·|value|` around their values in `base`.
    pub fn with_tolerance(
        base: &PlateParameters<T>,
        kinds: &[ParameterKind],
        pct: T,
        alpha_levels: AlphaLevels<T>,
    ) -> Result<Self, FuzzyError> {
        let mut s = Self::crisp(base, alpha_levels);
        for &kind in kinds {
            let v = s.get(kind).modal();
            s.set(
                kind,
                FuzzyParameter::Fuzzy(TriangularFuzzyNumber::from_tolerance(v, pct)?),
            );
        }
        Ok(s)
    }

    pub fn get(&self, kind: ParameterKind) -> FuzzyParameter<T> {
        match kind {
            ParameterKind::H => self.h,
            ParameterKind::Q => self.q,
            ParameterKind::TInf => self.t_inf,
        }
    }

    pub fn set(&mut self, kind: ParameterKind, p: FuzzyParameter<T>) {
        match kind {
            ParameterKind::H => self.h = p,
            ParameterKind::Q => self.q = p,
            ParameterKind::TInf => self.t_inf = p,
        }
    }

    pub fn fuzzy_kinds(&self) -> Vec<ParameterKind> {
        ParameterKind::ALL
            .into_iter()
            .filter(|&k| self.get(k).is_fuzzy())
            .collect()
    }

    /// A fuzzy sweep needs at least one fuzzy parameter.
    pub fn validate_for_sweep(&self) -> Result<(), UqError> {
        if self.fuzzy_kinds().is_empty() {
            Err(UqError::NoFuzzyParameter)
        } else {
            Ok(())
        }
    }

    pub fn modal_point(&self) -> ParameterPoint<T> {
        ParameterPoint {
            h: self.h.modal(),
            q: self.q.modal(),
            t_inf: self.t_inf.modal(),
        }
    }

    /// Corners of the alpha-cut box, in a fixed order (the first fuzzy
    /// parameter varies slowest). A single point when every cut is degenerate.
    pub fn vertices(&self, alpha: T) -> Result<Vec<ParameterPoint<T>>, FuzzyError> {
        let mut cuts = Vec::new();
        for kind in ParameterKind::ALL {
            let cut = self.get(kind).cut(alpha)?;
            if !cut.is_degenerate() {
                cuts.push((kind, cut));
            }
        }
        if cuts.is_empty() || alpha == T::one() {
            return Ok(vec![self.modal_point()]);
        }
        let base = self.modal_point();
        let m = cuts.len();
        Ok((0..1usize << m)
            .map(|mask| {
                let mut p = base;
                for (bit, (kind, cut)) in cuts.iter().enumerate() {
                    let upper = mask & (1 << (m - 1 - bit)) != 0;
                    p.set(*kind, if upper { cut.hi() } else { cut.lo() });
                }
                p
            })
            .collect())
    }
}

/// Deterministic map from parameter values to nodal temperatures.
pub trait CrispModel<T>: Sync {
    fn node_count(&self) -> usize;
    fn evaluate(&self, point: &ParameterPoint<T>) -> Result<Vec<T>, FemError>;
}

/// The plate problem with `h`, `q` and `t_inf` taken from the parameter point.
#[derive(Debug, Clone, Copy)]
pub struct PlateModel<'a, T> {
    pub mesh: &'a Mesh2D<T>,
    pub base: PlateParameters<T>,
    pub bc: BoundaryConditionSet,
}

impl<'a, T: Scalar> PlateModel<'a, T> {
    pub fn new(mesh: &'a Mesh2D<T>, base: PlateParameters<T>, bc: BoundaryConditionSet) -> Self {
        Self { mesh, base, bc }
    }

    pub fn parameters_at(&self, point: &ParameterPoint<T>) -> PlateParameters<T> {
        PlateParameters {
            h: point.h,
            q: point.q,
            t_inf: point.t_inf,
            ..self.base
        }
    }
}

impl<T: Scalar> CrispModel<T> for PlateModel<'_, T> {
    fn node_count(&self) -> usize {
        self.mesh.node_count()
    }

    fn evaluate(&self, point: &ParameterPoint<T>) -> Result<Vec<T>, FemError> {
        Ok(solve_plate(self.mesh, &self.parameters_at(point), &self.bc)?.values)
    }
}

/// Per-level, per-node temperature intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyTemperatureField<T> {
    alphas: Vec<T>,
    envelopes: Vec<Vec<Interval<T>>>,
    crisp: Vec<T>,
}

impl<T: Scalar> FuzzyTemperatureField<T> {
    pub fn alphas(&self) -> &[T] {
        &self.alphas
    }

    pub fn node_count(&self) -> usize {
        self.crisp.len()
    }

    /// Envelope at the `i`-th alpha level.
    pub fn envelope(&self, i: usize) -> &[Interval<T>] {
        &self.envelopes[i]
    }

    pub fn envelope_at(&self, alpha: T) -> Option<&[Interval<T>]> {
        self.alphas
            .iter()
            .position(|&a| a == alpha)
            .map(|i| self.envelopes[i].as_slice())
    }

    /// The modal (alpha = 1) solve.
    pub fn crisp(&self) -> &[T] {
        &self.crisp
    }

    /// Whether every node's interval shrinks (within `tol`) as alpha increases.
    pub fn is_nested(&self, tol: T) -> bool {
        self.envelopes.windows(2).all(|pair| {
            pair[1]
                .iter()
                .zip(&pair[0])
                .all(|(inner, outer)| inner.is_within(outer, tol))
        })
    }
}

fn vertex_error<T: Scalar>(alpha: T, p: &ParameterPoint<T>, source: FemError) -> UqError {
    UqError::VertexSolve {
        alpha: alpha.to_f64().unwrap_or(f64::NAN),
        vertex: p.to_string(),
        source,
    }
}

/// Runs the alpha sweep over `model`.
///
/// Solves run on `workers` threads (the global pool when `None`); results are
/// reduced in a fixed order so the output does not depend on the worker count.
pub fn propagate_model<T: Scalar, M: CrispModel<T>>(
    model: &M,
    scenario: &FuzzyScenario<T>,
    workers: Option<usize>,
) -> Result<FuzzyTemperatureField<T>, UqError> {
    let n = model.node_count();
    let modal = scenario.modal_point();
    let alphas: Vec<T> = scenario.alpha_levels.iter().collect();

    // (level, vertex) jobs; degenerate levels reuse the modal solve.
    let mut jobs = Vec::new();
    let mut level_jobs = Vec::with_capacity(alphas.len());
    for (li, &alpha) in alphas.iter().enumerate() {
        let vertices = scenario.vertices(alpha)?;
        if vertices.len() == 1 && vertices[0] == modal {
            level_jobs.push(None);
        } else {
            let start = jobs.len();
            jobs.extend(vertices.into_iter().map(|v| (li, v)));
            level_jobs.push(Some(start..jobs.len()));
        }
    }

    let eval = |alpha: T, p: &ParameterPoint<T>| -> Result<Vec<T>, UqError> {
        let values = model.evaluate(p).map_err(|e| vertex_error(alpha, p, e))?;
        if values.len() != n {
            return Err(UqError::ModelOutput {
                expected: n,
                got: values.len(),
            });
        }
        Ok(values)
    };

    let crisp = eval(T::one(), &modal)?;
    let run = || -> Vec<Result<Vec<T>, UqError>> {
        jobs.par_iter()
            .map(|(li, p)| eval(alphas[*li], p))
            .collect()
    };
    let results = match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| UqError::WorkerPool(e.to_string()))?
            .install(run),
        None => run(),
    };
    let results: Vec<Vec<T>> = results.into_iter().collect::<Result<_, _>>()?;

    let envelopes = level_jobs
        .into_iter()
        .map(|range| match range {
            None => crisp.iter().map(|&v| Interval::point(v)).collect(),
            Some(range) => {
                let mut env: Vec<Interval<T>> = results[range.start]
                    .iter()
                    .map(|&v| Interval::point(v))
                    .collect();
                for solve in &results[range.start + 1..range.end] {
                    for (iv, &v) in env.iter_mut().zip(solve) {
                        *iv = iv.include(v);
                    }
                }
                env
            }
        })
        .collect();

    Ok(FuzzyTemperatureField {
        alphas,
        envelopes,
        crisp,
    })
}

/// Alpha sweep of the plate problem on the global worker pool.
pub fn propagate<T: Scalar>(
    mesh: &Mesh2D<T>,
    base: &PlateParameters<T>,
    bc: &BoundaryConditionSet,
    scenario: &FuzzyScenario<T>,
) -> Result<FuzzyTemperatureField<T>, UqError> {
    propagate_model(&PlateModel::new(mesh, *base, *bc), scenario, None)
}

/// How the spread of the widths is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VarianceEstimator {
    /// Divide by `n`: the nodes are the whole population.
    #[default]
    Population,
    /// Divide by `n - 1`.
    Sample,
}

/// Envelope widths at `alpha = 0` and their summary statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityReport<T> {
    pub label: String,
    pub widths: Vec<T>,
    pub average_width: T,
    pub variance_of_widths: T,
    pub estimator: VarianceEstimator,
}

/// Population-variance sensitivity report of `field`.
pub fn sensitivity<T: Scalar>(
    field: &FuzzyTemperatureField<T>,
    label: &str,
) -> Result<SensitivityReport<T>, UqError> {
    sensitivity_with(field, label, VarianceEstimator::Population)
}

pub fn sensitivity_with<T: Scalar>(
    field: &FuzzyTemperatureField<T>,
    label: &str,
    estimator: VarianceEstimator,
) -> Result<SensitivityReport<T>, UqError> {
    let support = field
        .envelope_at(T::zero())
        .ok_or(UqError::MissingZeroLevel)?;
    let widths: Vec<T> = support.iter().map(|iv| iv.width()).collect();
    let (average_width, variance_of_widths) = width_statistics(&widths, estimator);
    Ok(SensitivityReport {
        label: label.to_string(),
        widths,
        average_width,
        variance_of_widths,
        estimator,
    })
}

/// Mean and variance of `widths`.
pub fn width_statistics<T: Scalar>(widths: &[T], estimator: VarianceEstimator) -> (T, T) {
    let n = widths.len();
    if n == 0 {
        return (T::zero(), T::zero());
    }
    let mean = widths.iter().copied().sum::<T>() / T::from_count(n);
    let ss: T = widths.iter().map(|&w| (w - mean) * (w - mean)).sum();
    let denom = match estimator {
        VarianceEstimator::Population => n,
        VarianceEstimator::Sample if n > 1 => n - 1,
        VarianceEstimator::Sample => return (mean, T::zero()),
    };
    (mean, ss / T::from_count(denom))
}

/// Which of two scenarios scores higher on a metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    First,
    Second,
    Tie,
}

impl Verdict {
    fn of<T: Scalar>(a: T, b: T) -> Self {
        match a.partial_cmp(&b) {
            Some(Ordering::Greater) => Verdict::First,
            Some(Ordering::Less) => Verdict::Second,
            _ => Verdict::Tie,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioComparison<T> {
    pub first: String,
    pub second: String,
    pub average: (T, T),
    pub variance: (T, T),
    pub by_average: Verdict,
    pub by_variance: Verdict,
}

impl<T: Scalar> ScenarioComparison<T> {
    fn name(&self, v: Verdict) -> Option<&str> {
        match v {
            Verdict::First => Some(&self.first),
            Verdict::Second => Some(&self.second),
            Verdict::Tie => None,
        }
    }

    /// The more sensitive scenario when both metrics agree.
    pub fn more_sensitive(&self) -> Option<&str> {
        if self.by_average == self.by_variance {
            self.name(self.by_average)
        } else {
            None
        }
    }

    /// One-line human-readable verdict.
    pub fn summary(&self) -> String {
        let (first, second) = (&self.first, &self.second);
        let figures = format!(
            "average width {first} = {}, {second} = {}; variance {first} = {}, {second} = {}",
            self.average.0, self.average.1, self.variance.0, self.variance.1
        );
        let larger = |what: &str, v: Verdict| match self.name(v) {
            Some(name) => format!("{name} is more sensitive by {what}"),
            None => format!("tie by {what}"),
        };
        match (self.more_sensitive(), self.by_average == self.by_variance) {
            (Some(name), _) => format!("{name} is more sensitive ({figures})"),
            (None, true) => format!("no difference in sensitivity ({figures})"),
            (None, false) => format!(
                "mixed verdict: {}, {} ({figures})",
                larger("average width", self.by_average),
                larger("variance", self.by_variance)
            ),
        }
    }
}

/// Compares two reports over the same mesh metric by metric.
pub fn compare_scenarios<T: Scalar>(
    a: &SensitivityReport<T>,
    b: &SensitivityReport<T>,
) -> Result<ScenarioComparison<T>, UqError> {
    if a.widths.len() != b.widths.len() {
        return Err(UqError::NodeCountMismatch(a.widths.len(), b.widths.len()));
    }
    Ok(ScenarioComparison {
        first: a.label.clone(),
        second: b.label.clone(),
        average: (a.average_width, b.average_width),
        variance: (a.variance_of_widths, b.variance_of_widths),
        by_average: Verdict::of(a.average_width, b.average_width),
        by_variance: Verdict::of(a.variance_of_widths, b.variance_of_widths),
    })
}
