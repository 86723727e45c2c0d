//! Experiment description read from a TOML file.
//!
//! ```toml
//! seed = 7
//! output = "runs/disk"
//!
//! [domain]
//! kind = "disk"          # interval | disk | annulus
//! radius = 1.0
//! radial = 32
//! angular = 64
//!
//! [run]
//! alpha = 1.0
//! beta = 1.0
//! dt = 5e-3
//! t_end = 0.5
//! window = [0.5, 2.0]
//!
//! [initial]
//! kind = "cosine"        # constant | cosine | spike | csv | exact
//! base = 1.0
//! amplitude = 0.3
//! wavenumber = 3.0
//!
//! [forcing]
//! kind = "zero"          # zero | sinusoidal | samples | manufactured | singular
//!
//! [dataprep]
//! strategy = "none"      # none | smooth | energy
//!
//! [diagnostics]
//! lp = [1.0, 2.0, 4.0]
//! tau = [0.1]
//! snapshots = [0.0, 0.5]
//! ```
//!
//! An optional `[sweep]` section turns the file into a parameter study, see
//! [`SweepConfig`]. Relative paths are resolved against the directory of the
//! config file.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use vfd_core::dataprep::{ForcingDescriptor, ForcingKind, Strategy};
use vfd_core::oracle::{make_manufactured, ExactSolution, ManufacturedProfile};
use vfd_core::{BoundaryMode, DiscreteDomain, RegularizedGamma, RunConfig};

/// Invalid or unreadable configuration. The binary exits with status 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    pub domain: DomainConfig,
    #[serde(default)]
    pub run: RunSection,
    pub initial: InitialConfig,
    #[serde(default)]
    pub perturbation: Option<Perturbation>,
    #[serde(default)]
    pub forcing: ForcingConfig,
    #[serde(default)]
    pub dataprep: DataprepConfig,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DomainConfig {
    Interval {
        #[serde(default = "one")]
        length: f64,
        nodes: usize,
    },
    /// `radial` rings of cells around the pole, `angular` vertices per ring.
    Disk {
        #[serde(default = "one")]
        radius: f64,
        radial: usize,
        angular: usize,
    },
    Annulus {
        inner: f64,
        outer: f64,
        nodes: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryConfig {
    Dynamic,
    Neumann,
    DirichletOracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default = "one")]
    pub alpha: f64,
    #[serde(default)]
    pub beta: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "one")]
    pub t_end: f64,
    #[serde(default = "default_newton_tol")]
    pub newton_tol: f64,
    #[serde(default = "default_newton_max_iter")]
    pub newton_max_iter: usize,
    #[serde(default = "default_dt_min")]
    pub dt_min: f64,
    /// Defaults to `neumann` when `alpha = beta = 0` and `dynamic` otherwise.
    #[serde(default)]
    pub boundary: Option<BoundaryConfig>,
    #[serde(default = "default_window")]
    pub window: [f64; 2],
    /// Boundary mass `1/penalty` for the `alpha = 0, beta > 0` study.
    #[serde(default)]
    pub penalty: Option<f64>,
}

impl Default for RunSection {
    fn default() -> Self {
        let d = RunConfig::default();
        Self {
            alpha: d.alpha,
            beta: d.beta,
            dt: d.dt,
            t_end: d.t_end,
            newton_tol: d.newton_tol,
            newton_max_iter: d.newton_max_iter,
            dt_min: d.dt_min,
            boundary: None,
            window: [d.window.0, d.window.1],
            penalty: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialConfig {
    Constant {
        value: f64,
    },
    /// `base + amplitude cos(k x) cos(k y)`.
    Cosine {
        base: f64,
        amplitude: f64,
        wavenumber: f64,
    },
    /// Smooth dip `background - (background - depth) (1 - s^2)^2` with
    /// `s = |x - center| / width`.
    Spike {
        depth: f64,
        width: f64,
        center: [f64; 2],
        #[serde(default = "one")]
        background: f64,
    },
    /// One value per node, in the column `theta` (or the first column).
    Csv {
        path: PathBuf,
    },
    /// The exact solution of the `manufactured` or `singular` forcing at `t = 0`.
    Exact,
}

/// Multiplies the initial data by `1 + amplitude * U(-1, 1)`, seeded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Perturbation {
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ForcingConfig {
    #[default]
    Zero,
    /// `amplitude sin(omega t) cos(wavenumber x)`, projected to zero mean.
    Sinusoidal {
        amplitude: f64,
        omega: f64,
        wavenumber: f64,
        #[serde(default = "half")]
        epsilon: f64,
    },
    /// CSV rows `t, f_0, f_1, ...`, linearly interpolated in time and
    /// projected to zero mean.
    Samples {
        path: PathBuf,
        #[serde(default = "half")]
        epsilon: f64,
    },
    /// Manufactured solution with the matching bulk and boundary sources.
    Manufactured {
        #[serde(default)]
        profile: ProfileConfig,
    },
    /// Explicit radial solution `2 sqrt(T - t) / r`, imposed on the boundary;
    /// requires `boundary = "dirichlet-oracle"`.
    Singular {
        #[serde(default = "one")]
        extinction: f64,
    },
}

impl ForcingConfig {
    pub fn epsilon(&self) -> Option<f64> {
        match self {
            ForcingConfig::Sinusoidal { epsilon, .. } | ForcingConfig::Samples { epsilon, .. } => {
                Some(*epsilon)
            }
            _ => None,
        }
    }

    fn set_epsilon(&mut self, value: f64) -> Result<(), ConfigError> {
        match self {
            ForcingConfig::Sinusoidal { epsilon, .. } | ForcingConfig::Samples { epsilon, .. } => {
                *epsilon = value;
                Ok(())
            }
            _ => invalid("sweep.epsilon needs a sinusoidal or samples forcing"),
        }
    }
}

/// `base + amplitude sin(omega t + phase) cos(kx x) cos(ky y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub base: f64,
    pub amplitude: f64,
    pub omega: f64,
    pub kx: f64,
    pub ky: f64,
    pub phase: f64,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        let p = ManufacturedProfile::shipped();
        Self {
            base: p.base,
            amplitude: p.amplitude,
            omega: p.omega,
            kx: p.kx,
            ky: p.ky,
            phase: p.phase,
        }
    }
}

impl From<&ProfileConfig> for ManufacturedProfile {
    fn from(p: &ProfileConfig) -> Self {
        ManufacturedProfile {
            base: p.base,
            amplitude: p.amplitude,
            omega: p.omega,
            kx: p.kx,
            ky: p.ky,
            phase: p.phase,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyConfig {
    #[default]
    None,
    Smooth,
    Energy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataprepConfig {
    #[serde(default)]
    pub strategy: StrategyConfig,
    #[serde(default = "default_n")]
    pub n: u32,
}

impl Default for DataprepConfig {
    fn default() -> Self {
        Self {
            strategy: StrategyConfig::None,
            n: default_n(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsConfig {
    #[serde(default = "default_lp")]
    pub lp: Vec<f64>,
    /// Waiting times of the regularisation probe.
    #[serde(default)]
    pub tau: Vec<f64>,
    /// Times at which `fields_*.csv` snapshots are written.
    #[serde(default)]
    pub snapshots: Vec<f64>,
    /// Relative mass drift allowed under mean-free forcing.
    #[serde(default = "default_mass_tol")]
    pub mass_tol: f64,
    #[serde(default = "default_energy_tol")]
    pub energy_tol: f64,
    #[serde(default = "default_step_tol")]
    pub step_tol: f64,
    /// Per-step growth allowed for the L1 distance in contraction pairs.
    #[serde(default = "default_contraction_tol")]
    pub contraction_tol: f64,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self {
            lp: default_lp(),
            tau: Vec::new(),
            snapshots: Vec::new(),
            mass_tol: default_mass_tol(),
            energy_tol: default_energy_tol(),
            step_tol: default_step_tol(),
            contraction_tol: default_contraction_tol(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepMode {
    /// Every combination of the listed values.
    #[default]
    Grid,
    /// Every grid point runs twice, from `initial` and from `partner`.
    ContractionPair,
    /// `alpha = 0` with boundary mass `1/n` for each entry of `penalties`.
    Penalized,
}

/// Parameter lists; an empty list keeps the base value.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default)]
    pub mode: SweepMode,
    #[serde(default)]
    pub alpha: Vec<f64>,
    #[serde(default)]
    pub beta: Vec<f64>,
    #[serde(default)]
    pub dt: Vec<f64>,
    /// Grid resolution: `nodes` for intervals and annuli, `radial` for disks
    /// (the angular count scales along).
    #[serde(default)]
    pub nodes: Vec<usize>,
    /// Data-preparation level.
    #[serde(default)]
    pub n: Vec<u32>,
    /// Minimum of a `spike` initial datum.
    #[serde(default)]
    pub depth: Vec<f64>,
    #[serde(default)]
    pub epsilon: Vec<f64>,
    #[serde(default)]
    pub penalties: Vec<f64>,
    #[serde(default)]
    pub partner: Option<InitialConfig>,
}

/// Values of one sweep point; `None` keeps the base configuration.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct SweepPoint {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub dt: Option<f64>,
    pub nodes: Option<usize>,
    pub n: Option<u32>,
    pub depth: Option<f64>,
    pub epsilon: Option<f64>,
    pub penalty: Option<f64>,
}

fn one() -> f64 {
    1.0
}
fn half() -> f64 {
    0.5
}
fn default_dt() -> f64 {
    RunConfig::default().dt
}
fn default_newton_tol() -> f64 {
    RunConfig::default().newton_tol
}
fn default_newton_max_iter() -> usize {
    RunConfig::default().newton_max_iter
}
fn default_dt_min() -> f64 {
    RunConfig::default().dt_min
}
fn default_window() -> [f64; 2] {
    let w = RunConfig::default().window;
    [w.0, w.1]
}
fn default_n() -> u32 {
    10
}
fn default_lp() -> Vec<f64> {
    RunConfig::default().lp_exponents
}
fn default_mass_tol() -> f64 {
    1e-10
}
fn default_energy_tol() -> f64 {
    1e-8
}
fn default_step_tol() -> f64 {
    1e-10
}
fn default_contraction_tol() -> f64 {
    1e-9
}

/// Reads and validates a config file. Relative paths inside it are made
/// absolute with respect to the file's directory.
pub fn load(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read config file {}: {e}", path.display())))?;
    let mut cfg = parse(&text).map_err(|e| ConfigError(format!("{}: {}", path.display(), e.0)))?;
    let base = path.parent().unwrap_or(Path::new("."));
    cfg.resolve_paths(base);
    Ok(cfg)
}

pub fn parse(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| ConfigError(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

impl ExperimentConfig {
    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let InitialConfig::Csv { path } = &mut self.initial {
            fix(path);
        }
        if let ForcingConfig::Samples { path, .. } = &mut self.forcing {
            fix(path);
        }
        if let Some(Some(InitialConfig::Csv { path })) =
            self.sweep.as_mut().map(|s| s.partner.as_mut())
        {
            fix(path);
        }
        if let Some(out) = &mut self.output {
            fix(out);
        }
    }

    /// Checks everything that can be checked without touching the grid.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.run_config().map(|_| ())?;
        let [lo, hi] = self.run.window;
        RegularizedGamma::new(lo, hi).map_err(|e| ConfigError(format!("run.window: {e}")))?;
        if let Some(eps) = self.forcing.epsilon() {
            if !(eps > 0.0 && eps < 1.0) {
                return invalid(format!("forcing.epsilon must lie in (0, 1), got {eps}"));
            }
        }
        let dirichlet = self.boundary_mode() == BoundaryMode::DirichletOracle;
        if matches!(self.forcing, ForcingConfig::Singular { .. }) != dirichlet {
            return invalid("run.boundary = \"dirichlet-oracle\" goes together with forcing.kind = \"singular\"");
        }
        if matches!(self.initial, InitialConfig::Exact)
            && !matches!(
                self.forcing,
                ForcingConfig::Manufactured { .. } | ForcingConfig::Singular { .. }
            )
        {
            return invalid("initial.kind = \"exact\" needs a manufactured or singular forcing");
        }
        check_initial("initial", &self.initial)?;
        if self.dataprep.n == 0 {
            return invalid("dataprep.n must be at least 1");
        }
        if self.diagnostics.lp.iter().any(|&p| !(p >= 1.0)) {
            return invalid("diagnostics.lp entries must be >= 1");
        }
        if let Some(p) = &self.perturbation {
            if !(p.amplitude >= 0.0 && p.amplitude < 1.0) {
                return invalid(format!(
                    "perturbation.amplitude must lie in [0, 1), got {}",
                    p.amplitude
                ));
            }
        }
        if let Some(sweep) = &self.sweep {
            self.validate_sweep(sweep)?;
        }
        Ok(())
    }

    fn validate_sweep(&self, sweep: &SweepConfig) -> Result<(), ConfigError> {
        match sweep.mode {
            SweepMode::Penalized => {
                let others = sweep.alpha.len()
                    + sweep.beta.len()
                    + sweep.dt.len()
                    + sweep.nodes.len()
                    + sweep.n.len()
                    + sweep.depth.len()
                    + sweep.epsilon.len();
                if others > 0 || sweep.penalties.is_empty() {
                    return invalid("sweep.mode = \"penalized\" takes a non-empty sweep.penalties list and nothing else");
                }
                if !(self.run.beta > 0.0) {
                    return invalid("the penalized study needs run.beta > 0");
                }
                if sweep.penalties.iter().any(|&n| !(n >= 1.0)) {
                    return invalid("sweep.penalties entries must be >= 1");
                }
            }
            SweepMode::ContractionPair => match &sweep.partner {
                Some(p) => check_initial("sweep.partner", p)?,
                None => {
                    return invalid(
                        "sweep.mode = \"contraction-pair\" needs a sweep.partner initial datum",
                    )
                }
            },
            SweepMode::Grid => {
                if !sweep.penalties.is_empty() {
                    return invalid("sweep.penalties is only used with mode = \"penalized\"");
                }
            }
        }
        if !sweep.depth.is_empty() && !matches!(self.initial, InitialConfig::Spike { .. }) {
            return invalid("sweep.depth needs a spike initial datum");
        }
        if !sweep.epsilon.is_empty() && self.forcing.epsilon().is_none() {
            return invalid("sweep.epsilon needs a sinusoidal or samples forcing");
        }
        for point in self.sweep_points() {
            self.at(&point)?;
        }
        Ok(())
    }

    pub fn boundary_mode(&self) -> BoundaryMode {
        match self.run.boundary {
            Some(BoundaryConfig::Dynamic) => BoundaryMode::Dynamic,
            Some(BoundaryConfig::Neumann) => BoundaryMode::Neumann,
            Some(BoundaryConfig::DirichletOracle) => BoundaryMode::DirichletOracle,
            None if self.run.alpha == 0.0 && self.run.beta == 0.0 => BoundaryMode::Neumann,
            None => BoundaryMode::Dynamic,
        }
    }

    pub fn run_config(&self) -> Result<RunConfig, ConfigError> {
        let r = &self.run;
        let cfg = RunConfig {
            alpha: r.alpha,
            beta: r.beta,
            dt: r.dt,
            t_end: r.t_end,
            newton_tol: r.newton_tol,
            newton_max_iter: r.newton_max_iter,
            dt_min: r.dt_min,
            bc_mode: self.boundary_mode(),
            window: (r.window[0], r.window[1]),
            boundary_penalty: r.penalty,
            lp_exponents: self.diagnostics.lp.clone(),
        };
        cfg.validate()
            .map_err(|e| ConfigError(format!("run: {e}")))?;
        Ok(cfg)
    }

    pub fn gamma(&self) -> Result<RegularizedGamma, ConfigError> {
        RegularizedGamma::new(self.run.window[0], self.run.window[1])
            .map_err(|e| ConfigError(format!("run.window: {e}")))
    }

    pub fn build_domain(&self) -> Result<DiscreteDomain, ConfigError> {
        let d = match self.domain {
            DomainConfig::Interval { length, nodes } => DiscreteDomain::interval(length, nodes),
            DomainConfig::Disk {
                radius,
                radial,
                angular,
            } => DiscreteDomain::disk(radius, radial, angular),
            DomainConfig::Annulus {
                inner,
                outer,
                nodes,
            } => DiscreteDomain::annulus(inner, outer, nodes),
        };
        d.map_err(|e| ConfigError(format!("domain: {e}")))
    }

    /// The exact solution behind a `manufactured` or `singular` forcing.
    pub fn exact_solution(
        &self,
        domain: &DiscreteDomain,
    ) -> Result<Option<ExactSolution>, ConfigError> {
        match &self.forcing {
            ForcingConfig::Manufactured { profile } => {
                make_manufactured(profile.into(), domain, self.run.alpha, self.run.beta)
                    .map(Some)
                    .map_err(|e| ConfigError(format!("forcing: {e}")))
            }
            ForcingConfig::Singular { extinction } => Ok(Some(ExactSolution::SingularRadial {
                extinction: *extinction,
            })),
            _ => Ok(None),
        }
    }

    pub fn build_forcing(&self, domain: &DiscreteDomain) -> Result<ForcingDescriptor, ConfigError> {
        let wrap = |e: vfd_core::Error| ConfigError(format!("forcing: {e}"));
        match &self.forcing {
            ForcingConfig::Zero => Ok(ForcingDescriptor::zero()),
            ForcingConfig::Sinusoidal {
                amplitude,
                omega,
                wavenumber,
                epsilon,
            } => ForcingDescriptor::new(
                ForcingKind::Sinusoidal {
                    amplitude: *amplitude,
                    omega: *omega,
                    wavenumber: *wavenumber,
                },
                *epsilon,
                domain,
            )
            .map_err(wrap),
            ForcingConfig::Samples { path, epsilon } => {
                let (times, slices) = crate::output::read_samples(path, domain.len())?;
                ForcingDescriptor::new(ForcingKind::GridSamples { times, slices }, *epsilon, domain)
                    .map_err(wrap)
            }
            ForcingConfig::Manufactured { .. } | ForcingConfig::Singular { .. } => {
                let exact = self.exact_solution(domain)?.expect("exact forcing");
                ForcingDescriptor::new(ForcingKind::Manufactured(exact), 0.5, domain).map_err(wrap)
            }
        }
    }

    pub fn strategy(&self) -> Option<Strategy> {
        match self.dataprep.strategy {
            StrategyConfig::None => None,
            StrategyConfig::Smooth => Some(Strategy::Smooth),
            StrategyConfig::Energy => Some(Strategy::Energy),
        }
    }

    /// Expands the sweep section; a config without one is a single point.
    pub fn sweep_points(&self) -> Vec<SweepPoint> {
        let Some(s) = &self.sweep else {
            return vec![SweepPoint::default()];
        };
        if s.mode == SweepMode::Penalized {
            return s
                .penalties
                .iter()
                .map(|&n| SweepPoint {
                    alpha: Some(0.0),
                    penalty: Some(n),
                    ..SweepPoint::default()
                })
                .collect();
        }
        fn axis<T: Copy>(values: &[T]) -> Vec<Option<T>> {
            if values.is_empty() {
                vec![None]
            } else {
                values.iter().copied().map(Some).collect()
            }
        }
        let mut points = Vec::new();
        for alpha in axis(&s.alpha) {
            for beta in axis(&s.beta) {
                for dt in axis(&s.dt) {
                    for nodes in axis(&s.nodes) {
                        for n in axis(&s.n) {
                            for depth in axis(&s.depth) {
                                for epsilon in axis(&s.epsilon) {
                                    points.push(SweepPoint {
                                        alpha,
                                        beta,
                                        dt,
                                        nodes,
                                        n,
                                        depth,
                                        epsilon,
                                        penalty: None,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        points
    }

    /// The single-run configuration of one sweep point.
    pub fn at(&self, point: &SweepPoint) -> Result<ExperimentConfig, ConfigError> {
        let mut c = self.clone();
        c.sweep = None;
        if let Some(a) = point.alpha {
            c.run.alpha = a;
        }
        if let Some(b) = point.beta {
            c.run.beta = b;
        }
        if let Some(dt) = point.dt {
            c.run.dt = dt;
        }
        if let Some(n) = point.penalty {
            c.run.penalty = Some(n);
            c.run.boundary = Some(BoundaryConfig::Dynamic);
        }
        if point.alpha.is_some() || point.beta.is_some() {
            // let the mode follow the new coefficients unless pinned to the oracle
            if c.run.boundary != Some(BoundaryConfig::DirichletOracle) && point.penalty.is_none() {
                c.run.boundary = None;
            }
        }
        if let Some(nodes) = point.nodes {
            match &mut c.domain {
                DomainConfig::Interval { nodes: m, .. }
                | DomainConfig::Annulus { nodes: m, .. } => *m = nodes,
                DomainConfig::Disk {
                    radial, angular, ..
                } => {
                    *angular = (*angular * nodes).div_ceil(*radial).max(3);
                    *radial = nodes;
                }
            }
        }
        if let Some(n) = point.n {
            c.dataprep.n = n;
        }
        if let Some(d) = point.depth {
            if let InitialConfig::Spike { depth, .. } = &mut c.initial {
                *depth = d;
            }
        }
        if let Some(e) = point.epsilon {
            c.forcing.set_epsilon(e)?;
        }
        c.validate()?;
        Ok(c)
    }
}

fn check_initial(key: &str, init: &InitialConfig) -> Result<(), ConfigError> {
    match *init {
        InitialConfig::Spike {
            depth,
            width,
            background,
            ..
        } if !(depth > 0.0 && depth < background && width > 0.0) => invalid(format!(
            "{key}: a spike needs 0 < depth < background and width > 0"
        )),
        _ => Ok(()),
    }
}
