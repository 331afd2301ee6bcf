use std::path::{Path, PathBuf};

use polaron_core::bounds::SuiteConfig;
use polaron_core::fock::{ModelSpec, DEFAULT_DIMENSION_CAP};
use polaron_core::landau_pekar::{LpStepperConfig, PhiInit, Scheme};
use polaron_core::spectral::BoxLattice;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Lp,
    Fock,
    Bounds,
    Sweep,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Lp => "lp",
            Mode::Fock => "fock",
            Mode::Bounds => "bounds",
            Mode::Sweep => "sweep",
        }
    }
}

/// Periodic box: side `L`, `n` points per axis, `dim` ∈ {1, 3}.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeParams {
    #[serde(rename = "L")]
    pub l: f64,
    pub n: usize,
    pub dim: usize,
}

impl LatticeParams {
    pub fn build(&self) -> Result<BoxLattice, CliError> {
        BoxLattice::new(self.l, self.n, self.dim).map_err(CliError::invalid)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LpParams {
    pub alpha: f64,
    #[serde(default = "default_phi_init")]
    pub phi_init: PhiInit,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "one")]
    pub record_every: usize,
}

fn default_phi_init() -> PhiInit {
    PhiInit::Zero
}

fn one() -> usize {
    1
}

impl LpParams {
    pub fn stepper(&self) -> LpStepperConfig {
        LpStepperConfig {
            dt: self.dt,
            t_end: self.t_end,
            scheme: Scheme::Strang,
            record_every: self.record_every,
        }
    }
}

/// Many-body model. Modes come from `modes` (integer momentum labels) or
/// `shells` (`±1..±shells` along the first axis); neither keeps the first
/// shell.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub lattice: LatticeParams,
    #[serde(default = "one")]
    pub n_particles: usize,
    #[serde(default)]
    pub modes: Option<Vec<[i64; 3]>>,
    #[serde(default)]
    pub shells: Option<i64>,
    pub phonon_cutoff: usize,
    pub alpha: f64,
    #[serde(rename = "K")]
    pub cutoff: f64,
    #[serde(default)]
    pub dimension_cap: Option<usize>,
}

impl ModelParams {
    pub fn spec(&self) -> Result<ModelSpec, CliError> {
        let modes = match (&self.modes, self.shells) {
            (Some(_), Some(_)) => return Err(CliError::Config("model: give either `modes` or `shells`, not both".into())),
            (Some(m), None) => Some(m.clone()),
            (None, Some(s)) if s >= 1 => Some((1..=s).flat_map(|k| [[k, 0, 0], [-k, 0, 0]]).collect()),
            (None, Some(s)) => return Err(CliError::Config(format!("model.shells: must be >= 1, got {s}"))),
            (None, None) => None,
        };
        let spec = ModelSpec {
            sites: self.lattice.build()?,
            n_particles: self.n_particles,
            modes,
            phonon_cutoff: self.phonon_cutoff,
            alpha: self.alpha,
            cutoff: self.cutoff,
            dimension_cap: self.dimension_cap.unwrap_or(DEFAULT_DIMENSION_CAP),
        };
        spec.validate().map_err(CliError::invalid)?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// `ψ^{⊗N} ⊗ W(√Nφ)Ω`
    Pekar,
    /// `U_K†(ψ^{⊗N} ⊗ W(√Nφ)Ω)`
    GrossDressedPekar,
}

/// Many-body run from a Pekar-type state built on the modulated profile and
/// its stationary field, compared with the lattice mean-field flow.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FockParams {
    pub t_end: f64,
    pub intervals: usize,
    pub initial: InitialState,
    pub profile_amplitude: f64,
    pub leakage_tol: f64,
    pub krylov_tol: f64,
    pub mean_field_dt: f64,
}

impl Default for FockParams {
    fn default() -> Self {
        Self {
            t_end: 1.0,
            intervals: 10,
            initial: InitialState::GrossDressedPekar,
            profile_amplitude: 0.3,
            leakage_tol: 0.2,
            krylov_tol: 1e-10,
            mean_field_dt: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepParams {
    #[serde(rename = "N_list")]
    pub n_list: Vec<usize>,
    #[serde(rename = "K_list")]
    pub k_list: Vec<f64>,
    #[serde(rename = "alpha_list")]
    pub alpha_list: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// output directory, relative to the working directory
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub lattice: Option<LatticeParams>,
    #[serde(default)]
    pub lp: Option<LpParams>,
    #[serde(default)]
    pub model: Option<ModelParams>,
    #[serde(default)]
    pub fock: FockParams,
    #[serde(default)]
    pub sweep: Option<SweepParams>,
    #[serde(default)]
    pub bounds: Option<SuiteConfig>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let de = toml::Deserializer::new(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            let msg = inner.message().trim().to_string();
            if path == "." || path.is_empty() {
                CliError::Config(msg)
            } else {
                CliError::Config(format!("{path}: {msg}"))
            }
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Applies command-line overrides and checks everything the chosen mode
    /// reads, before any computation.
    pub fn resolve(mut self, mode: Mode, seed: Option<u64>, out: Option<PathBuf>) -> Result<Self, CliError> {
        if let Some(m) = self.mode {
            if m != mode {
                return Err(CliError::Config(format!(
                    "mode: config says `{}` but the `{}` subcommand was given",
                    m.name(),
                    mode.name()
                )));
            }
        }
        self.mode = Some(mode);
        if seed.is_some() {
            self.seed = seed;
        }
        if out.is_some() {
            self.output = out;
        }
        if self.output.is_none() {
            return Err(CliError::Config("output: missing (set `output` or pass --out)".into()));
        }
        let need = |present: bool, key: &str| {
            if present {
                Ok(())
            } else {
                Err(CliError::Config(format!("{key}: required for mode `{}`", mode.name())))
            }
        };
        match mode {
            Mode::Lp => {
                need(self.lattice.is_some(), "lattice")?;
                need(self.lp.is_some(), "lp")?;
                self.lattice.as_ref().expect("checked").build()?;
                self.lp.as_ref().expect("checked").stepper().validate().map_err(CliError::invalid)?;
            }
            Mode::Fock | Mode::Sweep => {
                need(self.model.is_some(), "model")?;
                self.model.as_ref().expect("checked").spec()?;
                self.check_fock()?;
                if mode == Mode::Sweep {
                    need(self.sweep.is_some(), "sweep")?;
                    let s = self.sweep.as_ref().expect("checked");
                    for (key, empty) in [
                        ("sweep.N_list", s.n_list.is_empty()),
                        ("sweep.K_list", s.k_list.is_empty()),
                        ("sweep.alpha_list", s.alpha_list.is_empty()),
                    ] {
                        if empty {
                            return Err(CliError::Config(format!("{key}: must not be empty")));
                        }
                    }
                    if s.n_list.contains(&0) || s.k_list.iter().chain(&s.alpha_list).any(|v| !v.is_finite() || *v < 0.0) {
                        return Err(CliError::Config("sweep: N must be ≥ 1 and K, α finite and ≥ 0".into()));
                    }
                }
            }
            Mode::Bounds => {
                let seed = self
                    .seed
                    .ok_or_else(|| CliError::Config("seed: required for the randomized bounds checks".into()))?;
                let mut suite = self.bounds.take().unwrap_or_default();
                suite.seed = seed;
                for spec in [
                    &suite.operator_model,
                    &suite.chain_model,
                    &suite.representation_model,
                    &suite.scaling_model,
                ] {
                    spec.validate().map_err(CliError::invalid)?;
                }
                self.bounds = Some(suite);
            }
        }
        Ok(self)
    }

    fn check_fock(&self) -> Result<(), CliError> {
        let f = &self.fock;
        if !(f.t_end >= 0.0 && f.t_end.is_finite()) {
            return Err(CliError::Config(format!("fock.t_end: must be finite and ≥ 0, got {}", f.t_end)));
        }
        if f.intervals == 0 {
            return Err(CliError::Config("fock.intervals: must be ≥ 1".into()));
        }
        for (key, v) in [
            ("fock.leakage_tol", f.leakage_tol),
            ("fock.krylov_tol", f.krylov_tol),
            ("fock.mean_field_dt", f.mean_field_dt),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!("{key}: must be > 0, got {v}")));
            }
        }
        Ok(())
    }
}
