use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::presets::{
    degenerate_polarizability, ladder_frequencies, random_polarizability,
    three_level_polarizability,
};
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::propagators::{Method, RelaxationModel};
use crate::splitting::{FieldSignal, StepPlan};
use crate::system::LevelSystem;

/// Periods used by the timing experiments unless `--full` is given.
pub const TIMING_PERIODS: usize = 200;
/// Periods of the full-length timing runs.
pub const FULL_PERIODS: usize = 2000;

/// Timed repeats per row of the scaling experiment; the fastest is kept.
pub const SCALING_REPEATS: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    ThreeLevel,
    Degenerate,
    Scaling,
    Convergence,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolarizabilityPreset {
    ThreeLevel,
    Degenerate,
    /// Seeded random matrix, one per level count.
    Random,
}

/// Either a named preset or explicit real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolarizabilitySpec {
    Preset(PolarizabilityPreset),
    Explicit {
        re: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        im: Option<Vec<Vec<f64>>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub method: Method,
    pub n_p: usize,
    pub periods: usize,
    /// Level counts of the scaling run; the first entry sizes random presets.
    pub levels: Vec<usize>,
    /// Level frequencies; `ω_j = jπ` when absent.
    pub omega: Option<Vec<f64>>,
    pub p_matrix: PolarizabilitySpec,
    pub relaxation: RelaxationModel,
    pub field: FieldSignal,
    /// Initial diagonal state; the ground state when absent.
    pub initial_populations: Option<Vec<f64>>,
    pub output_path: Option<PathBuf>,
    pub record_stride: usize,
    pub seed: u64,
    /// Steps per period compared by the method table.
    pub table_np: Vec<usize>,
    /// Timed repetitions per benchmark row; the fastest is kept.
    pub timing_repeats: usize,
    pub parallel: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: ExperimentKind::ThreeLevel,
            method: Method::Exponential,
            n_p: 20,
            periods: 20,
            levels: vec![2, 3, 4, 5, 10],
            omega: None,
            p_matrix: PolarizabilitySpec::Preset(PolarizabilityPreset::ThreeLevel),
            relaxation: RelaxationModel::None,
            field: FieldSignal::unit_sine(),
            initial_populations: None,
            output_path: None,
            record_stride: 1,
            seed: 0,
            table_np: vec![5, 10, 20, 100],
            timing_repeats: 3,
            parallel: false,
        }
    }
}

impl ExperimentConfig {
    /// Defaults for one experiment.
    pub fn preset(kind: ExperimentKind) -> Self {
        let base = Self {
            experiment: kind,
            ..Self::default()
        };
        match kind {
            ExperimentKind::Degenerate => Self {
                p_matrix: PolarizabilitySpec::Preset(PolarizabilityPreset::Degenerate),
                ..base
            },
            ExperimentKind::Scaling => Self {
                periods: TIMING_PERIODS,
                p_matrix: PolarizabilitySpec::Preset(PolarizabilityPreset::Random),
                timing_repeats: SCALING_REPEATS,
                ..base
            },
            ExperimentKind::Convergence => Self { periods: 1, ..base },
            ExperimentKind::ThreeLevel | ExperimentKind::Custom => base,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_p < 2 {
            return Err(Error::Config(format!(
                "n_p must be at least 2, got {}",
                self.n_p
            )));
        }
        if self.periods < 1 {
            return Err(Error::Config("periods must be at least 1".into()));
        }
        if self.record_stride < 1 {
            return Err(Error::Config("record_stride must be at least 1".into()));
        }
        if self.timing_repeats < 1 {
            return Err(Error::Config("timing_repeats must be at least 1".into()));
        }
        if self.levels.is_empty() || self.levels.iter().any(|&n| n < 2) {
            return Err(Error::Config(
                "levels must list level counts of at least 2".into(),
            ));
        }
        if self.table_np.iter().any(|&n| n < 2) {
            return Err(Error::Config("table_np entries must be at least 2".into()));
        }
        if self.experiment != ExperimentKind::Scaling {
            let n = self.n_levels()?;
            if let Some(omega) = &self.omega {
                if omega.len() != n {
                    return Err(Error::Config(format!(
                        "omega has {} entries but p is {n}x{n}",
                        omega.len()
                    )));
                }
            }
            if let Some(pops) = &self.initial_populations {
                if pops.len() != n {
                    return Err(Error::Config(format!(
                        "initial_populations has {} entries but p is {n}x{n}",
                        pops.len()
                    )));
                }
            }
            self.relaxation.validate(n)?;
        }
        Ok(())
    }

    /// Level count implied by `p_matrix` (random presets use `levels[0]`).
    pub fn n_levels(&self) -> Result<usize> {
        match &self.p_matrix {
            PolarizabilitySpec::Preset(PolarizabilityPreset::Random) => self
                .levels
                .first()
                .copied()
                .ok_or_else(|| Error::Config("levels is empty".into())),
            PolarizabilitySpec::Preset(_) => Ok(3),
            PolarizabilitySpec::Explicit { re, .. } => Ok(re.len()),
        }
    }

    /// Polarizability for `n` levels; `n` only matters for random presets.
    pub fn polarizability_for(&self, n: usize) -> Result<ComplexMatrix> {
        match &self.p_matrix {
            PolarizabilitySpec::Preset(PolarizabilityPreset::ThreeLevel) => {
                Ok(three_level_polarizability())
            }
            PolarizabilitySpec::Preset(PolarizabilityPreset::Degenerate) => {
                Ok(degenerate_polarizability())
            }
            PolarizabilitySpec::Preset(PolarizabilityPreset::Random) => {
                random_polarizability(n, self.seed.wrapping_add(n as u64))
            }
            PolarizabilitySpec::Explicit { re, im } => {
                let dim = re.len();
                let rows: Vec<Vec<Complex64>> = (0..dim)
                    .map(|j| {
                        (0..re[j].len())
                            .map(|k| {
                                let imag = im.as_ref().and_then(|m| m.get(j)?.get(k)).copied();
                                Complex64::new(re[j][k], imag.unwrap_or(0.0))
                            })
                            .collect()
                    })
                    .collect();
                if let Some(m) = im {
                    if m.len() != dim || m.iter().zip(re).any(|(a, b)| a.len() != b.len()) {
                        return Err(Error::Config("p_matrix.im must match p_matrix.re".into()));
                    }
                }
                ComplexMatrix::from_rows(&rows)
            }
        }
    }

    pub fn system_for(&self, n: usize) -> Result<LevelSystem> {
        let p = self.polarizability_for(n)?;
        let n = p.dim();
        let omega = self.omega.clone().unwrap_or_else(|| ladder_frequencies(n));
        LevelSystem::new(omega, p, self.relaxation.clone())
    }

    pub fn system(&self) -> Result<LevelSystem> {
        self.system_for(self.n_levels()?)
    }

    pub fn initial_state(&self, n: usize) -> Result<DensityMatrix> {
        match &self.initial_populations {
            Some(pops) => DensityMatrix::from_populations(pops),
            None => DensityMatrix::pure_level(n, 0),
        }
    }

    pub fn plan(&self) -> Result<StepPlan> {
        StepPlan::periodic(self.n_p, self.periods)
    }
}
