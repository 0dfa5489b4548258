//! TOML run configuration.
//!
//! Every section and key is optional; missing values fall back to the
//! defaults below. Unknown keys are rejected.
//!
//! ```toml
//! [plate]
//! width_cm = 20.0
//! height_cm = 10.0
//! nx = 5
//! ny = 5
//!
//! [material]
//! k = 1.5
//! source = 0.0
//!
//! [boundary]
//! left = "flux"
//! right = "fixed"
//! top = "convection"
//! bottom = "adiabatic"
//!
//! [parameters]
//! h = 1.2
//! q = 2.0
//! t_inf = 25.0
//! t_fixed = 100.0
//!
//! [fuzzy]
//! h = true
//! q = true
//! t_inf = false
//! h_tolerance = 0.05
//! q_tolerance = 0.05
//! t_inf_tolerance = 0.05
//! alpha_levels = 11
//!
//! [output]
//! dir = "out"
//!
//! [rod]
//! length = 1.0
//! n_elems = 20
//! k = 1.0
//! u1 = 0.0
//! q_src = 0.0
//! dt = 0.01
//! steps = 100
//! theta = 1.0
//! initial = 0.0
//! # left_temperature = 0.0
//! # right_temperature = 1.0
//! # front_position = 0.2
//! # front_width = 0.02
//! # front_upstream = 1.0
//! ```

use std::path::{Path, PathBuf};

use ffem_core::fem1d::{EndConditions, Rod1D, TransientState};
use ffem_core::fem2d::{BoundaryConditionSet, PlateParameters, WallCondition};
use ffem_core::fuzzy::{AlphaLevels, TriangularFuzzyNumber};
use ffem_core::mesh::Mesh2D;
use ffem_core::uq::{FuzzyParameter, FuzzyScenario, ParameterKind};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlateSection {
    pub width_cm: f64,
    pub height_cm: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Default for PlateSection {
    fn default() -> Self {
        Self {
            width_cm: 20.0,
            height_cm: 10.0,
            nx: 5,
            ny: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MaterialSection {
    pub k: f64,
    pub source: f64,
}

impl Default for MaterialSection {
    fn default() -> Self {
        let p = PlateParameters::default();
        Self {
            k: p.k,
            source: p.source,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WallKind {
    Flux,
    Fixed,
    Convection,
    Adiabatic,
}

impl From<WallKind> for WallCondition {
    fn from(k: WallKind) -> Self {
        match k {
            WallKind::Flux => WallCondition::Flux,
            WallKind::Fixed => WallCondition::FixedTemperature,
            WallKind::Convection => WallCondition::Convection,
            WallKind::Adiabatic => WallCondition::Adiabatic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundarySection {
    pub left: WallKind,
    pub right: WallKind,
    pub top: WallKind,
    pub bottom: WallKind,
}

impl Default for BoundarySection {
    fn default() -> Self {
        Self {
            left: WallKind::Flux,
            right: WallKind::Fixed,
            top: WallKind::Convection,
            bottom: WallKind::Adiabatic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParameterSection {
    pub h: f64,
    pub q: f64,
    pub t_inf: f64,
    pub t_fixed: f64,
}

impl Default for ParameterSection {
    fn default() -> Self {
        let p = PlateParameters::default();
        Self {
            h: p.h,
            q: p.q,
            t_inf: p.t_inf,
            t_fixed: p.t_fixed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FuzzySection {
    pub h: bool,
    pub q: bool,
    pub t_inf: bool,
    pub h_tolerance: f64,
    pub q_tolerance: f64,
    pub t_inf_tolerance: f64,
    pub alpha_levels: usize,
}

impl Default for FuzzySection {
    fn default() -> Self {
        Self {
            h: true,
            q: true,
            t_inf: false,
            h_tolerance: 0.05,
            q_tolerance: 0.05,
            t_inf_tolerance: 0.05,
            alpha_levels: 11,
        }
    }
}

impl FuzzySection {
    pub fn tolerance(&self, kind: ParameterKind) -> f64 {
        match kind {
            ParameterKind::H => self.h_tolerance,
            ParameterKind::Q => self.q_tolerance,
            ParameterKind::TInf => self.t_inf_tolerance,
        }
    }

    pub fn enabled(&self) -> Vec<ParameterKind> {
        [
            (ParameterKind::H, self.h),
            (ParameterKind::Q, self.q),
            (ParameterKind::TInf, self.t_inf),
        ]
        .into_iter()
        .filter_map(|(k, on)| on.then_some(k))
        .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: "out".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RodSection {
    pub length: f64,
    pub n_elems: usize,
    pub k: f64,
    pub u1: f64,
    pub q_src: f64,
    pub dt: f64,
    pub steps: usize,
    pub theta: f64,
    pub initial: f64,
    pub left_temperature: Option<f64>,
    pub right_temperature: Option<f64>,
    pub front_position: Option<f64>,
    pub front_width: Option<f64>,
    pub front_upstream: Option<f64>,
}

impl Default for RodSection {
    fn default() -> Self {
        Self {
            length: 1.0,
            n_elems: 20,
            k: 1.0,
            u1: 0.0,
            q_src: 0.0,
            dt: 0.01,
            steps: 100,
            theta: 1.0,
            initial: 0.0,
            left_temperature: None,
            right_temperature: None,
            front_position: None,
            front_width: None,
            front_upstream: None,
        }
    }
}

/// A smooth step from `upstream` to `downstream` centred at `position`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Front {
    pub position: f64,
    pub width: f64,
    pub upstream: f64,
    pub downstream: f64,
    /// Upstream side is at `x = 0` when true.
    pub upstream_left: bool,
}

impl Front {
    pub fn value(&self, x: f64) -> f64 {
        let s = (x - self.position) / self.width;
        let s = if self.upstream_left { s } else { -s };
        self.downstream + (self.upstream - self.downstream) * 0.5 * (1.0 - s.tanh())
    }

    /// Front location recovered from the integral of the field over a rod
    /// of `length`.
    pub fn locate(&self, integral: f64, length: f64) -> f64 {
        let x = (integral - self.downstream * length) / (self.upstream - self.downstream);
        if self.upstream_left {
            x
        } else {
            length - x
        }
    }
}

impl RodSection {
    pub fn rod(&self) -> Rod1D<f64> {
        Rod1D {
            length: self.length,
            n_elems: self.n_elems,
            k: self.k,
            u1: self.u1,
            q_src: self.q_src,
        }
    }

    pub fn ends(&self) -> EndConditions<f64> {
        EndConditions {
            left: self.left_temperature,
            right: self.right_temperature,
        }
    }

    pub fn front(&self) -> Option<Front> {
        self.front_position.map(|position| Front {
            position,
            width: self
                .front_width
                .unwrap_or(2.0 * self.length / self.n_elems.max(1) as f64),
            upstream: self.front_upstream.unwrap_or(1.0),
            downstream: self.initial,
            upstream_left: self.u1 >= 0.0,
        })
    }

    pub fn initial_state(&self) -> TransientState<f64> {
        let rod = self.rod();
        match self.front() {
            Some(front) => TransientState::from_fn(&rod, |x| front.value(x)),
            None => TransientState::uniform(&rod, self.initial),
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(format!("[rod] {msg}")));
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("dt must be positive (got {})", self.dt));
        }
        if !(0.0..=1.0).contains(&self.theta) {
            return bad(format!("theta must lie in [0, 1] (got {})", self.theta));
        }
        if let Some(front) = self.front() {
            if front.width.is_nan() || front.width <= 0.0 {
                return bad(format!(
                    "front_width must be positive (got {})",
                    front.width
                ));
            }
            if front.upstream == front.downstream {
                return bad("front_upstream must differ from initial".to_string());
            }
        } else if self.front_width.is_some() || self.front_upstream.is_some() {
            return bad("front_width/front_upstream need front_position".to_string());
        }
        self.rod().validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub plate: PlateSection,
    pub material: MaterialSection,
    pub boundary: BoundarySection,
    pub parameters: ParameterSection,
    pub fuzzy: FuzzySection,
    pub output: OutputSection,
    pub rod: RodSection,
}

impl RunConfig {
    /// Reads and validates a config file.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Parse { message, .. } => CliError::Parse {
                path: path.to_path_buf(),
                message,
            },
            other => other,
        })
    }

    /// Parses and validates config text.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Parse {
            path: PathBuf::from("<config>"),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.mesh()?;
        self.plate_parameters().validate()?;
        let f = &self.fuzzy;
        if f.alpha_levels < 2 {
            return Err(CliError::Config(format!(
                "[fuzzy] alpha_levels must be at least 2 so that 0 and 1 are included (got {})",
                f.alpha_levels
            )));
        }
        for kind in [ParameterKind::H, ParameterKind::Q, ParameterKind::TInf] {
            let t = f.tolerance(kind);
            if !(t.is_finite() && t >= 0.0) {
                return Err(CliError::Config(format!(
                    "[fuzzy] {}_tolerance must be a non-negative number (got {t})",
                    kind.name()
                )));
            }
        }
        self.rod.validate()
    }

    pub fn mesh(&self) -> Result<Mesh2D<f64>, CliError> {
        let p = &self.plate;
        Ok(Mesh2D::structured(p.width_cm, p.height_cm, p.nx, p.ny)?)
    }

    pub fn plate_parameters(&self) -> PlateParameters<f64> {
        PlateParameters {
            k: self.material.k,
            source: self.material.source,
            h: self.parameters.h,
            q: self.parameters.q,
            t_inf: self.parameters.t_inf,
            t_fixed: self.parameters.t_fixed,
        }
    }

    pub fn boundary_conditions(&self) -> BoundaryConditionSet {
        let b = &self.boundary;
        BoundaryConditionSet {
            left: b.left.into(),
            right: b.right.into(),
            top: b.top.into(),
            bottom: b.bottom.into(),
        }
    }

    pub fn alpha_levels(&self) -> Result<AlphaLevels<f64>, CliError> {
        AlphaLevels::uniform(self.fuzzy.alpha_levels)
            .map_err(|e| CliError::Config(format!("[fuzzy] {e}")))
    }

    /// Scenario with `kinds` fuzzy at their configured tolerances.
    pub fn scenario(&self, kinds: &[ParameterKind]) -> Result<FuzzyScenario<f64>, CliError> {
        let mut s = FuzzyScenario::crisp(&self.plate_parameters(), self.alpha_levels()?);
        for &kind in kinds {
            let tfn = TriangularFuzzyNumber::from_tolerance(
                s.get(kind).modal(),
                self.fuzzy.tolerance(kind),
            )
            .map_err(|e| CliError::Config(format!("[fuzzy] {}: {e}", kind.name())))?;
            s.set(kind, FuzzyParameter::Fuzzy(tfn));
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Category;

    #[test]
    fn empty_config_uses_defaults() {
        let cfg = RunConfig::parse("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.mesh().unwrap().elements().len(), 50);
        assert_eq!(cfg.plate_parameters(), PlateParameters::default());
        assert_eq!(cfg.boundary_conditions(), BoundaryConditionSet::default());
    }

    #[test]
    fn minimal_override() {
        let cfg = RunConfig::parse("[parameters]\nh = 1.2\nq = 2.0\n").unwrap();
        assert_eq!(cfg.mesh().unwrap().elements().len(), 50);
        assert_eq!(cfg.fuzzy.alpha_levels, 11);
        assert_eq!(cfg.fuzzy.h_tolerance, 0.05);
    }

    #[test]
    fn rejects_single_alpha_level() {
        let e = RunConfig::parse("[fuzzy]\nalpha_levels = 1\n").unwrap_err();
        assert_eq!(e.category(), Category::Config);
        assert!(e.to_string().contains("alpha_levels"));
    }

    #[test]
    fn rejects_negative_conductivity() {
        let e = RunConfig::parse("[material]\nk = -1.0\n").unwrap_err();
        assert_eq!(e.category(), Category::Config);
    }

    #[test]
    fn rejects_unknown_key_by_name() {
        let e = RunConfig::parse("[plate]\nwidth = 3.0\n").unwrap_err();
        assert_eq!(e.category(), Category::Config);
        assert!(e.to_string().contains("width"), "{e}");
        let e = RunConfig::parse("[nonsense]\n").unwrap_err();
        assert!(e.to_string().contains("nonsense"), "{e}");
    }

    #[test]
    fn rejects_duplicate_wall_assignment() {
        let e = RunConfig::parse("[boundary]\nleft = \"fixed\"\nleft = \"flux\"\n").unwrap_err();
        assert_eq!(e.category(), Category::Config);
        assert!(e.to_string().contains("left"), "{e}");
    }

    #[test]
    fn rejects_unknown_wall_kind() {
        let e = RunConfig::parse("[boundary]\ntop = \"radiation\"\n").unwrap_err();
        assert!(e.to_string().contains("radiation"), "{e}");
    }

    #[test]
    fn scenario_uses_per_parameter_tolerance() {
        let cfg = RunConfig::parse("[fuzzy]\nq_tolerance = 0.1\n").unwrap();
        let s = cfg.scenario(&[ParameterKind::H, ParameterKind::Q]).unwrap();
        let q = s.q.cut(0.0).unwrap();
        assert!((q.lo() - 1.8).abs() < 1e-12 && (q.hi() - 2.2).abs() < 1e-12);
        let h = s.h.cut(0.0).unwrap();
        assert!((h.lo() - 1.14).abs() < 1e-12 && (h.hi() - 1.26).abs() < 1e-12);
        assert!(!s.t_inf.is_fuzzy());
    }

    #[test]
    fn front_profile_and_location() {
        let cfg = RunConfig::parse(
            "[rod]\nk = 0.0\nu1 = 1.0\nfront_position = 0.3\nfront_width = 0.01\nn_elems = 100\n",
        )
        .unwrap();
        let front = cfg.rod.front().unwrap();
        assert!((front.value(0.0) - 1.0).abs() < 1e-12);
        assert!(front.value(1.0).abs() < 1e-12);
        assert!((front.locate(0.3, 1.0) - 0.3).abs() < 1e-12);
        let flipped = Front {
            upstream_left: false,
            ..front
        };
        assert!((flipped.value(1.0) - 1.0).abs() < 1e-12);
        assert!((flipped.locate(0.7, 1.0) - 0.3).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_rod() {
        for text in [
            "[rod]\ndt = 0.0\n",
            "[rod]\ntheta = 1.5\n",
            "[rod]\nk = 0.0\n",
            "[rod]\nfront_width = 0.1\n",
        ] {
            let e = RunConfig::parse(text).unwrap_err();
            assert_eq!(e.category(), Category::Config, "{text}: {e}");
        }
    }
}
