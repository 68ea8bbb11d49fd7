use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{self, ExperimentConfig, ExperimentKind, ModeSpec, Resolved};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "objectivity", version = crate::VERSION, about = "Spectrum-broadcast experiments on the illuminated sphere")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coherence and macro-fraction overlap against t/τ_D.
    Decoherence(Overrides),
    /// I(S:fE) over observed fractions, with phase labels.
    PhaseDiagram(Overrides),
    /// Macro-fraction overlaps for a spectral photon measure.
    MixedEnv(Overrides),
    /// Two-qubit state that meets I = S(B) while entangled.
    Counterexample(Overrides),
    /// Broadcasting in a rotated basis and its stationary spectrum.
    PfBroadcast(Overrides),
    /// Factored against dense states for every partition up to N_t.
    OracleCheck(Overrides),
    /// Measured gap against the convergence bound on random instances.
    BoundCheck(Overrides),
}

impl Command {
    pub fn split(&self) -> (ExperimentKind, &Overrides) {
        use Command::*;
        match self {
            Decoherence(o) => (ExperimentKind::Decoherence, o),
            PhaseDiagram(o) => (ExperimentKind::PhaseDiagram, o),
            MixedEnv(o) => (ExperimentKind::MixedEnv, o),
            Counterexample(o) => (ExperimentKind::Counterexample, o),
            PfBroadcast(o) => (ExperimentKind::PfBroadcast, o),
            OracleCheck(o) => (ExperimentKind::OracleCheck, o),
            BoundCheck(o) => (ExperimentKind::BoundCheck, o),
        }
    }
}

/// Flags override the matching config fields. Lists are comma-separated.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// JSON configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// CSV output path; the sidecar gets the same stem with `.json`.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeSpec>,
    /// Observed fractions.
    #[arg(long, value_delimiter = ',')]
    pub f: Vec<f64>,
    /// Macro-fraction sizes.
    #[arg(long, value_delimiter = ',')]
    pub m: Vec<f64>,
    /// Times in units of τ_D.
    #[arg(long = "t", value_delimiter = ',')]
    pub t_over_tau_d: Vec<f64>,
    /// Microscopic photon counts for the phase diagram.
    #[arg(long, value_delimiter = ',')]
    pub micro: Vec<usize>,
    /// Counterexample mixing parameters.
    #[arg(long, value_delimiter = ',')]
    pub p: Vec<f64>,
    /// First input eigenvalue for pf-broadcast.
    #[arg(long, value_delimiter = ',')]
    pub lambda: Vec<f64>,
    /// Largest photon count for oracle-check.
    #[arg(long)]
    pub nt: Option<usize>,
    /// Number of random instances for bound-check.
    #[arg(long)]
    pub configs: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Sphere radius (m).
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub permittivity: Option<f64>,
    /// Separation of the two positions (m).
    #[arg(long)]
    pub separation: Option<f64>,
    /// Angle between k₀ and the separation (rad).
    #[arg(long)]
    pub theta: Option<f64>,
    /// Photon wave number (1/m).
    #[arg(long)]
    pub k0: Option<f64>,
    /// Box edge L (m).
    #[arg(long)]
    pub box_edge: Option<f64>,
    /// Photon number density N/V (1/m³).
    #[arg(long)]
    pub photon_density: Option<f64>,
}

fn set<T: Clone>(target: &mut T, v: &Option<T>) {
    if let Some(v) = v {
        *target = v.clone();
    }
}

fn set_list<T: Clone>(target: &mut Vec<T>, v: &[T]) {
    if !v.is_empty() {
        *target = v.to_vec();
    }
}

impl Overrides {
    pub fn apply(&self, c: &mut ExperimentConfig) {
        if self.output.is_some() {
            c.output = self.output.clone();
        }
        if self.mode.is_some() {
            c.mode = self.mode;
        }
        set_list(&mut c.f, &self.f);
        set_list(&mut c.m, &self.m);
        set_list(&mut c.t_over_tau_d, &self.t_over_tau_d);
        set_list(&mut c.micro_counts, &self.micro);
        set_list(&mut c.p, &self.p);
        set_list(&mut c.lambda, &self.lambda);
        for (slot, v) in [(&mut c.n_t, self.nt), (&mut c.configs, self.configs)] {
            if v.is_some() {
                *slot = v;
            }
        }
        if self.seed.is_some() {
            c.seed = self.seed;
        }
        if self.tolerance.is_some() {
            c.tolerance = self.tolerance;
        }
        let m = &mut c.model;
        set(&mut m.radius, &self.radius);
        set(&mut m.permittivity, &self.permittivity);
        set(&mut m.separation, &self.separation);
        set(&mut m.theta, &self.theta);
        set(&mut m.k0, &self.k0);
        set(&mut m.box_edge, &self.box_edge);
        set(&mut m.photon_density, &self.photon_density);
    }

    /// Loads the config file if given, applies the flags and validates.
    pub fn resolve(&self, kind: ExperimentKind) -> Result<Resolved, CliError> {
        let mut c = match &self.config {
            Some(path) => config::load(path)?,
            None => ExperimentConfig::default(),
        };
        self.apply(&mut c);
        c.resolve(kind)
    }
}
