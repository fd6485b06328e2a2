//! Experiment configuration: a flat TOML file with dotted keys
//! (`disc.width = 8`), validated up front with field-level diagnostics.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use genbound::classes::{ActivationKind, ClassSpec};
use genbound::dist::{SourceKind, SourceSpec};
use genbound::objective::PhiKind;
use genbound::optim::{GapMode, OptConfig};

use crate::CliError;

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub output_dir: PathBuf,
    pub seeds: Vec<u64>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_holdout")]
    pub holdout: usize,
    #[serde(default = "default_tau_draws")]
    pub tau_draws: usize,
    #[serde(default = "default_mc_samples")]
    pub mc_samples: usize,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub disc: Option<ClassSection>,
    #[serde(default)]
    pub gen: Option<ClassSection>,
    #[serde(default)]
    pub px: Option<SourceSection>,
    #[serde(default)]
    pub pz: Option<SourceSection>,
    #[serde(default)]
    pub opt: OptSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub bounds: Option<BoundsSection>,
}

fn default_delta() -> f64 {
    0.05
}
fn default_holdout() -> usize {
    100_000
}
fn default_tau_draws() -> usize {
    24
}
fn default_mc_samples() -> usize {
    1024
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Rademacher,
    Bounds,
    GapSweep,
    Train,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Joint,
    DiscOnly,
}

impl Mode {
    pub fn gap_mode(self) -> GapMode {
        match self {
            Mode::Joint => GapMode::JointEmpirical,
            Mode::DiscOnly => GapMode::DiscriminatorOnly,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ClassSection {
    pub input_dim: usize,
    pub width: usize,
    pub activation: Activation,
    pub budget_v: f64,
    #[serde(default)]
    pub output_dim: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Clamp01,
    Logistic,
}

impl Activation {
    pub fn kind(self) -> ActivationKind {
        match self {
            Activation::Clamp01 => ActivationKind::Clamp01,
            Activation::Logistic => ActivationKind::Logistic,
        }
    }
}

impl ClassSection {
    pub fn class_spec(&self, what: &str) -> Result<ClassSpec, CliError> {
        let spec = ClassSpec {
            input_dim: self.input_dim,
            width: self.width,
            activation: self.activation.kind(),
            budget_v: self.budget_v,
            output_dim: self.output_dim.unwrap_or(1),
        };
        spec.validate()
            .map_err(|e| CliError::config(format!("{what}: {e}")))?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSection {
    pub kind: SourceKindName,
    pub dim: usize,
    pub seed: u64,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKindName {
    UniformCube,
    Beta,
    Dataset,
}

impl SourceSection {
    pub fn source_spec(&self, what: &str) -> Result<SourceSpec, CliError> {
        if self.dim == 0 {
            return Err(CliError::config(format!("{what}.dim must be >= 1")));
        }
        let kind = match self.kind {
            SourceKindName::UniformCube => SourceKind::UniformCube,
            SourceKindName::Beta => {
                let alpha = self.alpha.ok_or_else(|| {
                    CliError::config(format!("{what}.alpha is required for kind = \"beta\""))
                })?;
                let beta = self.beta.ok_or_else(|| {
                    CliError::config(format!("{what}.beta is required for kind = \"beta\""))
                })?;
                SourceKind::IndependentBeta { alpha, beta }
            }
            SourceKindName::Dataset => {
                let path = self.path.clone().ok_or_else(|| {
                    CliError::config(format!("{what}.path is required for kind = \"dataset\""))
                })?;
                SourceKind::FixedDataset { path }
            }
        };
        Ok(SourceSpec {
            kind,
            dim: self.dim,
            seed: self.seed,
        })
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OptSection {
    pub step_size: f64,
    pub steps: usize,
    pub restarts: usize,
    pub inner_disc_steps: usize,
    pub init_scale: f64,
}

impl Default for OptSection {
    fn default() -> Self {
        OptSection {
            step_size: 0.1,
            steps: 120,
            restarts: 4,
            inner_disc_steps: 3,
            init_scale: 0.5,
        }
    }
}

impl OptSection {
    pub fn opt_config(&self, seed: u64) -> OptConfig {
        OptConfig {
            step_size: self.step_size,
            steps: self.steps,
            restarts: self.restarts,
            inner_disc_steps: self.inner_disc_steps,
            seed,
            init_scale: self.init_scale,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default)]
    pub n: Vec<usize>,
    /// Generator sample sizes; empty means paired with `n`.
    #[serde(default)]
    pub m: Vec<usize>,
    #[serde(default)]
    pub v: Vec<f64>,
    #[serde(default)]
    pub lambda: Vec<f64>,
    #[serde(default)]
    pub grid_levels: Vec<usize>,
}

/// Inputs for the `bounds` experiment roster.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSection {
    pub v: f64,
    pub n: usize,
    pub m: usize,
    pub card_d: usize,
    pub card_g: usize,
    pub lambda: f64,
    pub q_x: f64,
    pub q_z: f64,
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default = "default_c")]
    pub c1: f64,
    #[serde(default)]
    pub t: Option<f64>,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default)]
    pub rn_d: f64,
    #[serde(default)]
    pub rmn_dg: f64,
    #[serde(default)]
    pub rm_g: f64,
    #[serde(default = "default_grid")]
    pub delta_grid: usize,
}

fn default_c() -> f64 {
    1.0
}
fn default_eps() -> f64 {
    0.5
}
fn default_grid() -> usize {
    64
}

/// The measuring function used by objective-level evaluation in the CLI
/// experiments (the gap machinery itself is identity-phi).
pub fn phi() -> PhiKind {
    PhiKind::Identity
}

impl ExperimentConfig {
    pub fn load(path: &PathBuf) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::config(format!("cannot read config {}: {e}", path.display()))
        })?;
        let cfg: ExperimentConfig = toml::from_str(&text)
            .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.seeds.is_empty() {
            return Err(CliError::config("seeds must be non-empty"));
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.seeds.len() {
            return Err(CliError::config("seeds must be distinct"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(CliError::config("delta must lie in (0, 1)"));
        }
        match self.experiment {
            Experiment::Rademacher => {
                self.require_disc()?;
                self.require_px()?;
                self.non_empty("sweep.n", &self.sweep.n)?;
                self.non_empty("sweep.v", &self.sweep.v)?;
                self.non_empty("sweep.grid_levels", &self.sweep.grid_levels)?;
            }
            Experiment::Bounds => {
                if self.bounds.is_none() {
                    return Err(CliError::config(
                        "the bounds experiment requires a [bounds] section",
                    ));
                }
            }
            Experiment::GapSweep | Experiment::Train => {
                self.require_disc()?;
                self.require_gen()?;
                self.require_px()?;
                self.require_pz()?;
                self.non_empty("sweep.n", &self.sweep.n)?;
                self.non_empty("sweep.v", &self.sweep.v)?;
                self.non_empty("sweep.lambda", &self.sweep.lambda)?;
                if !self.sweep.m.is_empty() && self.sweep.m.len() != self.sweep.n.len() {
                    return Err(CliError::config(
                        "sweep.m must be empty (paired with n) or match sweep.n in length",
                    ));
                }
                let d = self.disc.as_ref().unwrap();
                let g = self.gen.as_ref().unwrap();
                if g.output_dim.unwrap_or(1) != d.input_dim {
                    return Err(CliError::config(
                        "gen.output_dim must equal disc.input_dim",
                    ));
                }
            }
        }
        Ok(())
    }

    fn non_empty<T>(&self, name: &str, list: &[T]) -> Result<(), CliError> {
        if list.is_empty() {
            Err(CliError::config(format!("{name} must be non-empty")))
        } else {
            Ok(())
        }
    }

    fn require_disc(&self) -> Result<&ClassSection, CliError> {
        self.disc
            .as_ref()
            .ok_or_else(|| CliError::config("a [disc] section is required"))
    }

    fn require_gen(&self) -> Result<&ClassSection, CliError> {
        self.gen
            .as_ref()
            .ok_or_else(|| CliError::config("a [gen] section is required"))
    }

    fn require_px(&self) -> Result<&SourceSection, CliError> {
        self.px
            .as_ref()
            .ok_or_else(|| CliError::config("a [px] section is required"))
    }

    fn require_pz(&self) -> Result<&SourceSection, CliError> {
        self.pz
            .as_ref()
            .ok_or_else(|| CliError::config("a [pz] section is required"))
    }

    /// Paired (n, m) lists: `m` defaults to `n`.
    pub fn size_pairs(&self) -> Vec<(usize, usize)> {
        self.sweep
            .n
            .iter()
            .enumerate()
            .map(|(i, &n)| (n, self.sweep.m.get(i).copied().unwrap_or(n)))
            .collect()
    }
}
