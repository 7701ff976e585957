use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::constitutive::{StressForm, StressLaw};
use crate::field::{Boundary, Grid};
use crate::nfunc::NFunctionModel;
use crate::oscillation::FamilySpec;
use crate::solver::SolverSettings;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    NfuncVerify,
    HammerSweep,
    Convergence,
    Decay,
    MainEstimate,
    HolderTransfer,
    NavierStokes,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::NfuncVerify,
        Experiment::HammerSweep,
        Experiment::Convergence,
        Experiment::Decay,
        Experiment::MainEstimate,
        Experiment::HolderTransfer,
        Experiment::NavierStokes,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::NfuncVerify => "nfunc-verify",
            Experiment::HammerSweep => "hammer-sweep",
            Experiment::Convergence => "convergence",
            Experiment::Decay => "decay",
            Experiment::MainEstimate => "main-estimate",
            Experiment::HolderTransfer => "holder-transfer",
            Experiment::NavierStokes => "navier-stokes",
        }
    }
}

/// Right-hand sides `G` for the estimate experiments, symmetric by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GRecipe {
    /// Trigonometric tensor.
    Smooth,
    /// `|x - x0|^(1/2) M`.
    Holder,
    /// `log |x - x0| M`: in BMO but unbounded.
    Log,
}

impl GRecipe {
    pub fn name(self) -> &'static str {
        match self {
            GRecipe::Smooth => "smooth",
            GRecipe::Holder => "holder",
            GRecipe::Log => "log",
        }
    }
}

/// Model families for the N-function verification sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    PowerLawAdditive,
    PowerLawQuadratic,
    Carreau,
    ArcSinh,
}

impl ModelKind {
    /// The family member with unit coefficients at `(p, kappa)`.
    pub fn model(self, p: f64, kappa: f64) -> Result<NFunctionModel> {
        match self {
            ModelKind::PowerLawAdditive => NFunctionModel::power_law(1.0, kappa, p),
            ModelKind::PowerLawQuadratic => NFunctionModel::power_law_quadratic(1.0, kappa, p),
            ModelKind::Carreau => NFunctionModel::carreau(1.0, 1.0, kappa, p),
            ModelKind::ArcSinh => NFunctionModel::arcsinh(1.0, 1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub n: usize,
    pub length: f64,
    pub boundary: Boundary,
    pub law: NFunctionModel,
    pub form: StressForm,
    pub newton_tol: f64,
    pub max_newton: usize,
    pub kappa_floor: f64,
    pub uzawa_rho: f64,
    pub convective: bool,
}

impl Default for SolverSection {
    fn default() -> Self {
        let s = SolverSettings::default();
        SolverSection {
            n: 64,
            length: 2.0,
            boundary: Boundary::Dirichlet,
            law: NFunctionModel::PowerLawAdditive { nu: 1.0, kappa: 0.0, p: 2.0 },
            form: StressForm::FullNorm,
            newton_tol: s.newton_tol,
            max_newton: s.max_newton,
            kappa_floor: s.kappa_floor,
            uzawa_rho: s.uzawa_rho,
            convective: false,
        }
    }
}

impl SolverSection {
    pub fn settings(&self) -> SolverSettings {
        SolverSettings {
            newton_tol: self.newton_tol,
            max_newton: self.max_newton,
            kappa_floor: self.kappa_floor,
            uzawa_rho: self.uzawa_rho,
        }
    }

    /// The configured law with `p` and `kappa` replaced.
    pub fn law_at(&self, p: f64, kappa: f64) -> Result<StressLaw> {
        StressLaw::new(self.law.with_exponent(p).with_kappa(kappa), self.form)
    }

    /// Grid with `n` cells per side: the box `[-L/2, L/2]^2` (Dirichlet) or
    /// `[0, L]^2` (periodic).
    pub fn grid(&self, n: usize) -> Result<Grid> {
        match self.boundary {
            Boundary::Periodic => Grid::periodic(n, self.length),
            Boundary::Dirichlet => Grid::dirichlet(n, self.length, [-0.5 * self.length; 2]),
        }
    }

    /// Center of the computational box.
    pub fn center(&self) -> [f64; 2] {
        match self.boundary {
            Boundary::Periodic => [0.5 * self.length; 2],
            Boundary::Dirichlet => [0.0; 2],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub p: Vec<f64>,
    pub kappa: Vec<f64>,
    pub beta: Vec<f64>,
    pub meshes: Vec<usize>,
    pub models: Vec<ModelKind>,
    pub recipes: Vec<GRecipe>,
    /// Random pairs per parameter set (hammer sweep).
    pub samples: usize,
    /// Random divergence-free perturbations (convergence).
    pub perturbations: usize,
    /// Amplitude applied to the right-hand side.
    pub amplitude: f64,
    /// Radius of the ball `B` (decay and estimate experiments).
    pub ball_radius: f64,
    pub lambdas: Vec<f64>,
    /// Write one CSV row per random pair in the hammer sweep.
    pub write_pairs: bool,
}

impl Default for Sweep {
    fn default() -> Self {
        Sweep {
            p: vec![1.5, 2.0, 3.0],
            kappa: vec![0.0, 1.0],
            beta: vec![0.0, 0.25, 0.5],
            meshes: vec![32, 64],
            models: vec![ModelKind::PowerLawAdditive, ModelKind::PowerLawQuadratic, ModelKind::Carreau, ModelKind::ArcSinh],
            recipes: vec![GRecipe::Smooth, GRecipe::Holder, GRecipe::Log],
            samples: 10_000,
            perturbations: 50,
            amplitude: 1.0,
            ball_radius: 0.4,
            lambdas: vec![1.0, 0.5, 0.25, 0.125, 0.0625],
            write_pairs: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub solver: SolverSection,
    pub family: FamilySpec,
    pub sweep: Sweep,
}

impl ExperimentConfig {
    /// The defaults of one experiment: these reproduce the acceptance runs.
    pub fn defaults(experiment: Experiment) -> ExperimentConfig {
        let mut c = ExperimentConfig {
            experiment,
            seed: 20_240_601,
            output_dir: PathBuf::from("out").join(experiment.name()),
            solver: SolverSection::default(),
            family: FamilySpec { top_fraction: 1.0, max_levels: 6 },
            sweep: Sweep::default(),
        };
        let s = &mut c.sweep;
        match experiment {
            Experiment::NfuncVerify | Experiment::HammerSweep => {}
            Experiment::Convergence => {
                c.solver.boundary = Boundary::Periodic;
                c.solver.length = 2.0 * std::f64::consts::PI;
                s.p = vec![2.0, 3.0];
                s.kappa = vec![1.0];
                s.meshes = vec![16, 32, 64, 128];
            }
            Experiment::Decay => {
                c.solver.n = 128;
                s.kappa = vec![0.0];
                s.ball_radius = 0.5;
            }
            Experiment::MainEstimate => {
                s.p = vec![2.0, 3.0];
                s.kappa = vec![0.0];
            }
            Experiment::HolderTransfer => {
                s.p = vec![3.0];
                s.kappa = vec![0.0];
                s.beta = vec![0.25, 0.5];
            }
            Experiment::NavierStokes => {
                s.p = vec![1.4, 2.0, 3.0];
                s.kappa = vec![1.0];
                s.meshes = vec![32];
                s.beta = vec![0.25];
                s.amplitude = 0.5;
            }
        }
        c
    }

    /// Parses a TOML document over the defaults of `experiment` (or of the
    /// experiment named in the document). Tables merge key by key.
    pub fn from_toml(text: &str, experiment: Option<Experiment>) -> Result<ExperimentConfig> {
        let user: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        let named = match user.get("experiment") {
            Some(v) => Some(
                v.clone()
                    .try_into::<Experiment>()
                    .map_err(|e| Error::Config(format!("experiment: {e}")))?,
            ),
            None => None,
        };
        let exp = match (experiment, named) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::Config(format!(
                    "config is for {} but {} was requested",
                    b.name(),
                    a.name()
                )))
            }
            (Some(a), _) | (None, Some(a)) => a,
            (None, None) => return Err(Error::Config("no experiment given".into())),
        };
        let mut base = toml::Table::try_from(Self::defaults(exp)).map_err(|e| Error::Config(e.to_string()))?;
        merge(&mut base, user);
        let cfg: ExperimentConfig = base.try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, experiment: Option<Experiment>) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text, experiment)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.solver.settings().validate()?;
        self.solver.law.validate()?;
        let s = &self.sweep;
        let bad = |what: &str| Err(Error::Config(format!("sweep: {what}")));
        if s.p.iter().any(|p| !(*p > 1.0 && p.is_finite())) {
            return bad("every p must lie in (1, inf)");
        }
        if s.kappa.iter().any(|k| !(*k >= 0.0 && k.is_finite())) {
            return bad("every kappa must be finite and >= 0");
        }
        if s.beta.iter().any(|b| !(0.0..=1.0).contains(b)) {
            return bad("every beta must lie in [0, 1]");
        }
        if s.meshes.iter().any(|n| *n < 8) || self.solver.n < 8 {
            return bad("meshes need at least 8 cells per side");
        }
        if s.lambdas.iter().any(|l| !(*l > 0.0 && *l <= 1.0)) {
            return bad("lambdas must lie in (0, 1]");
        }
        if !(s.ball_radius > 0.0 && s.ball_radius < 0.5 * self.solver.length) {
            return bad("ball_radius must be positive and inside the box");
        }
        if !(s.amplitude.is_finite() && s.amplitude >= 0.0) {
            return bad("amplitude must be finite and >= 0");
        }
        if !(self.family.top_fraction > 0.0 && self.family.top_fraction <= 1.0) || self.family.max_levels == 0 {
            return Err(Error::Config("family: top_fraction in (0, 1] and max_levels >= 1".into()));
        }
        if !(self.solver.length > 0.0 && self.solver.length.is_finite()) {
            return Err(Error::Config("solver.length must be positive".into()));
        }
        Ok(())
    }

    /// `(p, kappa)` points of the sweep.
    pub fn law_points(&self) -> Vec<(f64, f64)> {
        let mut v = Vec::new();
        for &p in &self.sweep.p {
            for &k in &self.sweep.kappa {
                v.push((p, k));
            }
        }
        v
    }
}

fn merge(base: &mut toml::Table, user: toml::Table) {
    for (k, v) in user {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(u)) if k != "law" => merge(b, u),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}
