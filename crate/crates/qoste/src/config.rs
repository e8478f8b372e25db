//! Experiment configuration.
//!
//! Landau-Zener parameters are given in units of the coupling `ω`, which is
//! fixed to 1: energies as multiples of `ω`, durations as `ω·t`.

use std::path::{Path, PathBuf};

use qoste_core::{lz_protocol, EtaLayout, GrapeOptions, Protocol, ScalingResolution, TimeGrid};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProtocolSpec {
    /// `H0 = Δ(t)σz + ωσx` with `Δ(t) = Δ0 + Δd·t/t_f`.
    LandauZener {
        delta0_per_omega: f64,
        delta_d_per_omega: f64,
        omega_t_f: f64,
    },
    /// CSV with columns `t,c0,cx,cy,cz`; a relative path is resolved against
    /// the config file's directory.
    Tabulated { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleSpec {
    pub epsilon: f64,
    pub n_eta: usize,
    pub layout: EtaLayout,
}

impl Default for EnsembleSpec {
    fn default() -> Self {
        Self {
            epsilon: 0.15,
            n_eta: 7,
            layout: EtaLayout::CellCenters,
        }
    }
}

/// Energy budget for one frontier point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostTarget {
    /// Multiple of the analytic minimum cost.
    RelativeToQoste(f64),
    /// Multiple of the counterdiabatic cost.
    RelativeToCd(f64),
    Absolute(f64),
}

impl CostTarget {
    pub fn value(&self) -> f64 {
        match *self {
            CostTarget::RelativeToQoste(x) | CostTarget::RelativeToCd(x) | CostTarget::Absolute(x) => x,
        }
    }

    pub fn resolve(&self, c_qoste: f64, c_cd: f64) -> f64 {
        match *self {
            CostTarget::RelativeToQoste(x) => x * c_qoste,
            CostTarget::RelativeToCd(x) => x * c_cd,
            CostTarget::Absolute(x) => x,
        }
    }
}

pub fn default_cost_targets() -> Vec<CostTarget> {
    vec![
        CostTarget::RelativeToQoste(1.0),
        CostTarget::RelativeToQoste(2.71),
        CostTarget::RelativeToQoste(3.87),
        CostTarget::RelativeToCd(1.0),
        CostTarget::RelativeToQoste(8.0),
    ]
}

/// Durations for the cost-ratio sweep (Landau-Zener only).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalingSpec {
    pub omega_t_f: Vec<f64>,
    /// Steps per unit of `ω·t`.
    pub steps_per_time: f64,
    pub min_steps: usize,
}

impl Default for ScalingSpec {
    fn default() -> Self {
        let r = ScalingResolution::default();
        Self {
            omega_t_f: vec![20.0, 40.0, 80.0, 160.0],
            steps_per_time: r.steps_per_time,
            min_steps: r.min_steps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub protocol: ProtocolSpec,
    #[serde(default = "default_n_steps")]
    pub n_steps: usize,
    #[serde(default)]
    pub ensemble: EnsembleSpec,
    #[serde(default = "default_cost_targets")]
    pub cost_targets: Vec<CostTarget>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    /// `seed` here must be left unset; the top-level seed drives the optimizer.
    #[serde(default)]
    pub grape: GrapeOptions,
    #[serde(default)]
    pub scaling: ScalingSpec,
    /// Points of the fine `η` scan over `[−ε, ε]` (odd).
    #[serde(default = "default_scan_points")]
    pub scan_points: usize,
}

fn default_n_steps() -> usize {
    100_000
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_scan_points() -> usize {
    201
}

/// Command-line overrides of scalar fields.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub n_steps: Option<usize>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
}

/// A validated config together with the objects it describes.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub protocol: Protocol,
    pub grid: TimeGrid,
}

impl Experiment {
    pub fn grape_options(&self) -> GrapeOptions {
        GrapeOptions {
            seed: self.config.seed,
            ..self.config.grape.clone()
        }
    }

    pub fn scaling_resolution(&self) -> ScalingResolution {
        ScalingResolution {
            steps_per_time: self.config.scaling.steps_per_time,
            min_steps: self.config.scaling.min_steps,
        }
    }
}

fn finite(errs: &mut Vec<String>, field: &str, x: f64) -> bool {
    if x.is_finite() {
        true
    } else {
        errs.push(format!("{field}: must be finite, got {x}"));
        false
    }
}

fn positive(errs: &mut Vec<String>, field: &str, x: f64) {
    if finite(errs, field, x) && x <= 0.0 {
        errs.push(format!("{field}: must be positive, got {x}"));
    }
}

fn nonnegative(errs: &mut Vec<String>, field: &str, x: f64) {
    if finite(errs, field, x) && x < 0.0 {
        errs.push(format!("{field}: must be nonnegative, got {x}"));
    }
}

impl ExperimentConfig {
    pub fn apply(&mut self, o: &Overrides) {
        if let Some(n) = o.n_steps {
            self.n_steps = n;
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(d) = &o.output_dir {
            self.output_dir = d.clone();
        }
    }

    /// Every problem with the config, one message per field.
    pub fn validate(&self) -> Vec<String> {
        let mut e = Vec::new();
        if let ProtocolSpec::LandauZener {
            delta0_per_omega,
            delta_d_per_omega,
            omega_t_f,
        } = self.protocol
        {
            finite(&mut e, "protocol.delta0_per_omega", delta0_per_omega);
            finite(&mut e, "protocol.delta_d_per_omega", delta_d_per_omega);
            positive(&mut e, "protocol.omega_t_f", omega_t_f);
        }
        if self.n_steps == 0 {
            e.push("n_steps: must be at least 1".into());
        }
        nonnegative(&mut e, "ensemble.epsilon", self.ensemble.epsilon);
        if self.ensemble.n_eta.is_multiple_of(2) {
            e.push(format!("ensemble.n_eta: must be odd, got {}", self.ensemble.n_eta));
        }
        for (i, c) in self.cost_targets.iter().enumerate() {
            nonnegative(&mut e, &format!("cost_targets[{i}]"), c.value());
        }
        let g = &self.grape;
        nonnegative(&mut e, "grape.tol_f", g.tol_f);
        positive(&mut e, "grape.initial_step", g.initial_step);
        positive(&mut e, "grape.max_step", g.max_step);
        nonnegative(&mut e, "grape.init_noise", g.init_noise);
        if finite(&mut e, "grape.step_growth", g.step_growth) && g.step_growth < 1.0 {
            e.push(format!("grape.step_growth: must be at least 1, got {}", g.step_growth));
        }
        if g.initial_step > g.max_step {
            e.push("grape.initial_step: must not exceed grape.max_step".into());
        }
        if g.seed != 0 {
            e.push("grape.seed: not allowed here; set the top-level `seed`".into());
        }
        let s = &self.scaling;
        if s.omega_t_f.len() < 2 {
            e.push("scaling.omega_t_f: need at least two durations".into());
        }
        for (i, &t) in s.omega_t_f.iter().enumerate() {
            positive(&mut e, &format!("scaling.omega_t_f[{i}]"), t);
        }
        if s.omega_t_f
            .windows(2)
            .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater))
        {
            e.push("scaling.omega_t_f: must be strictly increasing".into());
        }
        positive(&mut e, "scaling.steps_per_time", s.steps_per_time);
        if s.min_steps == 0 {
            e.push("scaling.min_steps: must be at least 1".into());
        }
        if self.scan_points.is_multiple_of(2) {
            e.push(format!("scan_points: must be odd, got {}", self.scan_points));
        }
        e
    }

    /// Validates and builds the protocol; `base` resolves relative table paths.
    pub fn into_experiment(self, base: &Path) -> Result<Experiment> {
        let errs = self.validate();
        if !errs.is_empty() {
            return Err(Error::Config(errs));
        }
        let protocol = match &self.protocol {
            ProtocolSpec::LandauZener {
                delta0_per_omega,
                delta_d_per_omega,
                omega_t_f,
            } => lz_protocol(*delta0_per_omega, *delta_d_per_omega, 1.0, *omega_t_f)
                .map_err(|err| Error::Config(vec![format!("protocol: {err}")]))?,
            ProtocolSpec::Tabulated { path } => crate::io::read_protocol_csv(&base.join(path))?,
        };
        let grid = TimeGrid::new(protocol.t_f(), self.n_steps)
            .map_err(|err| Error::Config(vec![format!("n_steps: {err}")]))?;
        Ok(Experiment {
            config: self,
            protocol,
            grid,
        })
    }
}

/// Reads, overrides and validates a config file.
pub fn load(path: &Path, overrides: &Overrides) -> Result<Experiment> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::input(path, None, e.to_string()))?;
    let mut config: ExperimentConfig = serde_json::from_str(&text)
        .map_err(|e| Error::Config(vec![format!("{}:{}: {e}", path.display(), e.line())]))?;
    config.apply(overrides);
    let base = path.parent().unwrap_or(Path::new("."));
    config.into_experiment(base)
}
