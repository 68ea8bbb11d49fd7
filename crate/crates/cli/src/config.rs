use std::path::{Path, PathBuf};

use clap::ValueEnum;
use num_complex::Complex64;
use objectivity::qmat::{ComplexMatrix, DensityOperator};
use objectivity::scatter::{BoxMode, PhotonSource, ShellCoupling, SpectralMeasure, SphereModel};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Decoherence,
    PhaseDiagram,
    MixedEnv,
    Counterexample,
    PfBroadcast,
    OracleCheck,
    BoundCheck,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Decoherence => "decoherence",
            ExperimentKind::PhaseDiagram => "phase-diagram",
            ExperimentKind::MixedEnv => "mixed-env",
            ExperimentKind::Counterexample => "counterexample",
            ExperimentKind::PfBroadcast => "pf-broadcast",
            ExperimentKind::OracleCheck => "oracle-check",
            ExperimentKind::BoundCheck => "bound-check",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ModeSpec {
    FiniteBox,
    Thermodynamic,
}

impl From<ModeSpec> for BoxMode {
    fn from(m: ModeSpec) -> Self {
        match m {
            ModeSpec::FiniteBox => BoxMode::FiniteBox,
            ModeSpec::Thermodynamic => BoxMode::Thermodynamic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CouplingSpec {
    Dipole { fill: f64 },
    Uniform { coupling: f64 },
    Disabled,
}

impl From<CouplingSpec> for ShellCoupling {
    fn from(c: CouplingSpec) -> Self {
        match c {
            CouplingSpec::Dipole { fill } => ShellCoupling::Dipole { fill },
            CouplingSpec::Uniform { coupling } => ShellCoupling::Uniform { coupling },
            CouplingSpec::Disabled => ShellCoupling::Disabled,
        }
    }
}

impl From<ShellCoupling> for CouplingSpec {
    fn from(c: ShellCoupling) -> Self {
        match c {
            ShellCoupling::Dipole { fill } => CouplingSpec::Dipole { fill },
            ShellCoupling::Uniform { coupling } => CouplingSpec::Uniform { coupling },
            ShellCoupling::Disabled => CouplingSpec::Disabled,
        }
    }
}

/// Sphere and photon-bath parameters, SI units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSpec {
    pub radius: f64,
    pub permittivity: f64,
    pub separation: f64,
    pub theta: f64,
    pub k0: f64,
    pub box_edge: f64,
    pub photon_density: f64,
    pub light_speed: f64,
    pub soft_threshold: f64,
    pub dipole_threshold: f64,
    pub shell_coupling: CouplingSpec,
}

impl Default for ModelSpec {
    fn default() -> Self {
        let m = SphereModel::default();
        Self {
            radius: m.radius,
            permittivity: m.permittivity,
            separation: m.separation,
            theta: m.theta,
            k0: m.k0,
            box_edge: m.box_edge,
            photon_density: m.photon_density,
            light_speed: m.light_speed,
            soft_threshold: m.soft_threshold,
            dipole_threshold: m.dipole_threshold,
            shell_coupling: m.shell_coupling.into(),
        }
    }
}

impl ModelSpec {
    pub fn build(&self) -> SphereModel {
        SphereModel {
            radius: self.radius,
            permittivity: self.permittivity,
            separation: self.separation,
            theta: self.theta,
            k0: self.k0,
            box_edge: self.box_edge,
            photon_density: self.photon_density,
            light_speed: self.light_speed,
            soft_threshold: self.soft_threshold,
            dipole_threshold: self.dipole_threshold,
            shell_coupling: self.shell_coupling.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeEntry {
    pub k: [f64; 3],
    pub weight: f64,
}

/// Photon spectral measure. Absent means the monochromatic mode k₀.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureSpec {
    Single { k: [f64; 3] },
    /// Fibonacci directions on the |k| shell, equal weights. `k` defaults to k₀.
    Isotropic { points: usize, k: Option<f64> },
    /// Weights are normalized.
    Inline { modes: Vec<ModeEntry> },
}

impl MeasureSpec {
    pub fn build(&self, model: &SphereModel) -> objectivity::Result<SpectralMeasure> {
        match self {
            MeasureSpec::Single { k } => SpectralMeasure::single(*k),
            MeasureSpec::Isotropic { points, k } => SpectralMeasure::isotropic(*points, k.unwrap_or(model.k0)),
            MeasureSpec::Inline { modes } => {
                let total: f64 = modes.iter().map(|m| m.weight).sum();
                SpectralMeasure::new(modes.iter().map(|m| (m.k, m.weight / total)).collect())
            }
        }
    }
}

/// Initial system state in the pointer basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Bloch { r: [f64; 3] },
    /// Row-major entries as [re, im] pairs.
    Matrix { entries: [[f64; 2]; 4] },
}

impl Default for StateSpec {
    fn default() -> Self {
        StateSpec::Bloch { r: [1.0, 0.0, 0.0] }
    }
}

impl StateSpec {
    pub fn build(&self) -> objectivity::Result<DensityOperator> {
        match self {
            StateSpec::Bloch { r } => DensityOperator::qubit_from_bloch(*r),
            StateSpec::Matrix { entries } => {
                let m = ComplexMatrix::from_row_major(2, 2, entries.iter().map(|e| Complex64::new(e[0], e[1])).collect())?;
                DensityOperator::new(m, vec![2])
            }
        }
    }
}

/// Qubit basis φ₀ = (cos θ/2, e^{iφ} sin θ/2), φ₁ orthogonal to it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisSpec {
    pub theta: f64,
    pub phi: f64,
}

impl Default for BasisSpec {
    fn default() -> Self {
        Self {
            theta: std::f64::consts::FRAC_PI_3,
            phi: 0.0,
        }
    }
}

impl BasisSpec {
    pub fn vectors(&self) -> [[Complex64; 2]; 2] {
        let (c, s) = ((self.theta / 2.0).cos(), (self.theta / 2.0).sin());
        let e = Complex64::from_polar(1.0, self.phi);
        [
            [Complex64::new(c, 0.0), e * s],
            [-e.conj() * s, Complex64::new(c, 0.0)],
        ]
    }
}

/// Everything a run needs. Empty grids and absent fields take the
/// experiment's defaults in [`ExperimentConfig::resolve`].
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<ExperimentKind>,
    pub model: ModelSpec,
    pub measure: Option<MeasureSpec>,
    pub rho0: StateSpec,
    pub f: Vec<f64>,
    pub m: Vec<f64>,
    /// Times in units of τ_D (τ̄_D for mixed-env).
    pub t_over_tau_d: Vec<f64>,
    pub micro_counts: Vec<usize>,
    pub mode: Option<ModeSpec>,
    pub tolerance: Option<f64>,
    pub output: Option<PathBuf>,
    pub p: Vec<f64>,
    pub lambda: Vec<f64>,
    pub basis: Option<BasisSpec>,
    pub n_t: Option<usize>,
    pub configs: Option<usize>,
    pub seed: Option<u64>,
}

pub fn load(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse(text: &str) -> Result<ExperimentConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        CliError::Config(format!("field `{path}`: {inner}"))
    })
}

fn range(from: f64, to: f64, step: f64) -> Vec<f64> {
    let n = ((to - from) / step).round() as usize;
    (0..=n).map(|k| from + k as f64 * step).collect()
}

fn default_if_empty<T: Clone>(v: &mut Vec<T>, d: &[T]) {
    if v.is_empty() {
        *v = d.to_vec();
    }
}

fn bad(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("field `{field}`: {msg}"))
}

/// Largest photon count the dense oracle can hold with a pure source.
pub const MAX_ORACLE_PHOTONS: usize = 10;

impl ExperimentConfig {
    /// Fills defaults for `kind` and re-validates every model precondition.
    pub fn resolve(mut self, kind: ExperimentKind) -> Result<Resolved, CliError> {
        if let Some(k) = self.experiment {
            if k != kind {
                return Err(bad("experiment", format!("config is for `{}`, not `{}`", k.name(), kind.name())));
            }
        }
        self.experiment = Some(kind);
        use ExperimentKind::*;
        match kind {
            Decoherence => {
                default_if_empty(&mut self.t_over_tau_d, &range(0.0, 10.0, 0.5));
                default_if_empty(&mut self.f, &[0.0]);
                default_if_empty(&mut self.m, &[0.5]);
            }
            PhaseDiagram => {
                default_if_empty(&mut self.t_over_tau_d, &[30.0]);
                default_if_empty(&mut self.f, &range(0.0, 1.0, 0.1));
                default_if_empty(&mut self.micro_counts, &[3]);
            }
            MixedEnv => {
                default_if_empty(&mut self.t_over_tau_d, &range(0.0, 10.0, 0.5));
                default_if_empty(&mut self.m, &[0.25, 0.5, 1.0]);
                if self.measure.is_none() {
                    self.measure = Some(MeasureSpec::Isotropic { points: 32, k: None });
                }
            }
            Counterexample => default_if_empty(&mut self.p, &[0.1, 0.2, 0.3, 0.4, 0.45]),
            PfBroadcast => {
                default_if_empty(&mut self.t_over_tau_d, &[30.0]);
                default_if_empty(&mut self.f, &[0.5]);
                default_if_empty(&mut self.m, &[0.5]);
                default_if_empty(&mut self.lambda, &[0.1, 0.3, 0.5, 0.7, 0.9]);
                self.basis.get_or_insert_with(BasisSpec::default);
                self.tolerance.get_or_insert(1e-10);
            }
            OracleCheck => {
                self.n_t.get_or_insert(8);
                self.tolerance.get_or_insert(1e-9);
            }
            BoundCheck => {
                self.configs.get_or_insert(100);
                self.seed.get_or_insert(77);
                self.tolerance.get_or_insert(1e-12);
            }
        }
        self.mode.get_or_insert(match kind {
            Decoherence | MixedEnv => ModeSpec::FiniteBox,
            _ => ModeSpec::Thermodynamic,
        });
        self.output
            .get_or_insert_with(|| PathBuf::from(format!("{}.csv", kind.name())));
        self.validate(kind)
    }

    fn validate(self, kind: ExperimentKind) -> Result<Resolved, CliError> {
        use ExperimentKind::*;
        let model = self.model.build();
        model.validate().map_err(|e| bad("model", e))?;
        let source = match &self.measure {
            Some(m) => PhotonSource::Spectral(m.build(&model).map_err(|e| bad("measure", e))?),
            None => PhotonSource::Monochromatic,
        };
        let rho0 = self.rho0.build().map_err(|e| bad("rho0", e))?;

        for (i, &t) in self.t_over_tau_d.iter().enumerate() {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(bad(&format!("t_over_tau_d[{i}]"), format!("{t} must be non-negative")));
            }
        }
        for (i, &f) in self.f.iter().enumerate() {
            if !(0.0..=1.0).contains(&f) {
                return Err(bad(&format!("f[{i}]"), format!("{f} outside [0, 1]")));
            }
        }
        for (i, &m) in self.m.iter().enumerate() {
            if !(m > 0.0 && m <= 1.0) {
                return Err(bad(&format!("m[{i}]"), format!("{m} outside (0, 1]")));
            }
        }
        if let Some(tol) = self.tolerance {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(bad("tolerance", format!("{tol} must be positive")));
            }
        }
        match kind {
            Decoherence => {
                if self.f.len() != 1 || self.m.len() != 1 {
                    return Err(bad("f", "decoherence takes a single f and a single m"));
                }
                objectivity::broadcast::Partition::new(self.f[0], self.m[0]).map_err(|e| bad("f", e))?;
            }
            PfBroadcast => {
                if self.f.len() != 1 || self.m.len() != 1 || self.t_over_tau_d.len() != 1 {
                    return Err(bad("f", "pf-broadcast takes a single f, m and t_over_tau_d"));
                }
                objectivity::broadcast::Partition::new(self.f[0], self.m[0]).map_err(|e| bad("f", e))?;
                for (i, &l) in self.lambda.iter().enumerate() {
                    if !(0.0..=1.0).contains(&l) {
                        return Err(bad(&format!("lambda[{i}]"), format!("{l} outside [0, 1]")));
                    }
                }
                objectivity::phases::pf_matrix(&self.basis.unwrap_or_default().vectors()).map_err(|e| bad("basis", e))?;
            }
            Counterexample => {
                for (i, &p) in self.p.iter().enumerate() {
                    if !(0.0..=1.0).contains(&p) {
                        return Err(bad(&format!("p[{i}]"), format!("{p} outside [0, 1]")));
                    }
                }
            }
            OracleCheck => {
                let n = self.n_t.unwrap_or(0);
                if n == 0 || n > MAX_ORACLE_PHOTONS {
                    return Err(bad("n_t", format!("{n} outside 1..={MAX_ORACLE_PHOTONS}")));
                }
            }
            MixedEnv => {
                if source.is_pure() {
                    return Err(bad("measure", "mixed-env needs at least two modes"));
                }
            }
            PhaseDiagram | BoundCheck => {}
        }
        Ok(Resolved {
            kind,
            model,
            source,
            rho0,
            config: self,
        })
    }
}

/// A validated configuration together with the objects built from it.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub kind: ExperimentKind,
    pub model: SphereModel,
    pub source: PhotonSource,
    pub rho0: DensityOperator,
    pub config: ExperimentConfig,
}

impl Resolved {
    pub fn mode(&self) -> BoxMode {
        self.config.mode.unwrap_or(ModeSpec::Thermodynamic).into()
    }

    pub fn output(&self) -> &Path {
        self.config.output.as_deref().unwrap_or(Path::new("out.csv"))
    }

    pub fn tolerance(&self) -> f64 {
        self.config.tolerance.unwrap_or(0.0)
    }
}
