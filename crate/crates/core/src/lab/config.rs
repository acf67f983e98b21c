//! Experiment configuration files.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::stats::{lin_grid, log_grid};
use super::LabError;
use crate::exactfield::{FieldSpec, NumberField};
use crate::gridalg::{canonical_presentation, GridJson, Mark, Presentation, PresentationJson};
use crate::homspace::Region;

pub const SCHEMA_VERSION: u32 = 1;
pub const POINTS_PER_DECADE: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Analyze,
    Simulate,
    LimitTail,
    Flight,
    SiegelCheck,
    Compare,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Lin,
    Log,
}

/// Grid of ξ values; `count` defaults to 16 points per decade for log spacing.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XiGridSpec {
    pub lo: f64,
    pub hi: f64,
    pub spacing: Spacing,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
}

impl XiGridSpec {
    pub fn values(&self) -> Result<Vec<f64>, LabError> {
        let ok = self.lo.is_finite() && self.hi.is_finite() && self.lo > 0.0 && self.hi >= self.lo;
        if !ok {
            return Err(LabError::Invalid(format!("bad xi range {}..{}", self.lo, self.hi)));
        }
        let count = match (self.count, self.spacing) {
            (Some(0), _) => return Err(LabError::Invalid("xi grid needs at least one point".into())),
            (Some(c), _) => c,
            (None, Spacing::Log) => ((self.hi / self.lo).log10() * POINTS_PER_DECADE as f64).round() as usize + 1,
            (None, Spacing::Lin) => 2 * POINTS_PER_DECADE,
        };
        let mut v = match self.spacing {
            Spacing::Log => log_grid(self.lo, self.hi, count),
            Spacing::Lin => lin_grid(self.lo, self.hi, count),
        };
        v.dedup();
        Ok(v)
    }
}

impl FromStr for XiGridSpec {
    type Err = LabError;

    /// `lo:hi:log`, `lo:hi:lin` or either with a trailing `:count`.
    fn from_str(s: &str) -> Result<Self, LabError> {
        let bad = || LabError::Invalid(format!("xi grid '{s}' is not lo:hi:(lin|log)[:count]"));
        let parts: Vec<&str> = s.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(bad());
        }
        let lo = parts[0].trim().parse().map_err(|_| bad())?;
        let hi = parts[1].trim().parse().map_err(|_| bad())?;
        let spacing = match parts[2].trim() {
            "log" => Spacing::Log,
            "lin" => Spacing::Lin,
            _ => return Err(bad()),
        };
        let count = match parts.get(3) {
            Some(c) => Some(c.trim().parse().map_err(|_| bad())?),
            None => None,
        };
        let spec = XiGridSpec { lo, hi, spacing, count };
        spec.values()?;
        Ok(spec)
    }
}

/// Sampling mode: generic, or conditioned on leaving grid ψ = (j, i)
/// (1-based) at transverse offset `shift`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields, rename_all = "snake_case")]
pub enum ModeSpec {
    Generic,
    Mark {
        mark: [usize; 2],
        #[serde(default)]
        shift: f64,
    },
}

impl ModeSpec {
    pub fn mark(&self) -> Option<Mark> {
        match self {
            ModeSpec::Generic => None,
            ModeSpec::Mark { mark, .. } => Some(Mark::new(mark[0].wrapping_sub(1), mark[1].wrapping_sub(1))),
        }
    }

    pub fn shift(&self) -> f64 {
        match self {
            ModeSpec::Generic => 0.0,
            ModeSpec::Mark { shift, .. } => *shift,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
}

/// A complete experiment description. Either `grids` (with `field`) or
/// `presentation` defines the scatterer set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub grids: Vec<GridJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub presentation: Option<PresentationJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ExperimentKind>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rho: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<XiGridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub events: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectories: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<Region>,
    #[serde(default)]
    pub outputs: OutputSpec,
}

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

impl ExperimentConfig {
    /// Config with only a presentation; everything else at defaults.
    pub fn for_presentation(p: &Presentation) -> Self {
        ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            field: None,
            grids: Vec::new(),
            presentation: Some(p.to_json()),
            experiment: None,
            rho: Vec::new(),
            xi: None,
            samples: None,
            seed: None,
            workers: None,
            xi_max: None,
            mode: None,
            events: None,
            trajectories: None,
            region: None,
            outputs: OutputSpec::default(),
        }
    }

    fn validate(&self) -> Result<(), LabError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(LabError::Invalid(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        match (&self.presentation, self.grids.is_empty()) {
            (Some(_), false) => return Err(LabError::Invalid("give either grids or presentation, not both".into())),
            (None, true) => return Err(LabError::Invalid("no grids or presentation given".into())),
            (None, false) if self.field.is_none() => return Err(LabError::Invalid("grids need a field".into())),
            _ => {}
        }
        if self.rho.iter().any(|r| !(r.is_finite() && *r > 0.0 && *r < 0.5)) {
            return Err(LabError::Invalid("rho values must lie in (0, 1/2)".into()));
        }
        if let Some(x) = self.xi_max {
            if !(x.is_finite() && x > 0.0) {
                return Err(LabError::Invalid("xi_max must be positive and finite".into()));
            }
        }
        if self.workers == Some(0) {
            return Err(LabError::Invalid("workers must be at least 1".into()));
        }
        if let Some(ModeSpec::Mark { mark, shift }) = self.mode {
            if mark.contains(&0) || !(shift.abs() < 1.0) {
                return Err(LabError::Invalid("mark indices are 1-based and |shift| < 1".into()));
            }
        }
        if let Some(xi) = &self.xi {
            xi.values()?;
        }
        if let Some(r) = &self.region {
            r.validate().map_err(|e| LabError::Invalid(e.to_string()))?;
        }
        Ok(())
    }

    /// The presentation as written (not yet made admissible).
    pub fn presentation(&self) -> Result<Presentation, LabError> {
        if let Some(p) = &self.presentation {
            return Ok(p.build()?);
        }
        let spec = self.field.clone().ok_or_else(|| LabError::Invalid("grids need a field".into()))?;
        let field = NumberField::new(spec).map_err(crate::gridalg::GridError::from)?;
        let grids = self
            .grids
            .iter()
            .map(|g| g.to_grid(&field))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(canonical_presentation(&grids)?)
    }
}

/// Parses and validates a configuration; syntax and schema errors carry the
/// line and column of the offending input.
pub fn parse_config_str(text: &str, origin: &str) -> Result<ExperimentConfig, LabError> {
    let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| LabError::Parse {
        path: origin.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_config(path: &Path) -> Result<ExperimentConfig, LabError> {
    let text = std::fs::read_to_string(path).map_err(|e| LabError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    parse_config_str(&text, &path.display().to_string())
}
