//! Experiment configuration: JSON, unknown keys rejected.

use std::path::{Path, PathBuf};

use relhel_core::calculus::{GridBox, IdentityKind};
use relhel_core::core4::{FourVector, ThreeVector};
use relhel_core::filaments::{shapes, Clock, LoopPolyline};
use relhel_core::scenarios::{
    boost_scenario, default_slab, make_charged_rest, make_kinematic_flow, make_screw_rotor, make_uniform,
    with_scaled_theta, KinematicSpec, Scenario,
};
use serde::{Deserialize, Serialize};

use crate::polyline;
use crate::RunError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub loops: Vec<LoopConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transport: Option<TransportConfig>,
    #[serde(default)]
    pub volume: VolumeConfig,
    /// Identity labels for `verify`, observable names for `helicity`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub constructor: Constructor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boost: Option<[f64; 3]>,
    /// Multiplies θ after construction; anything but 1 breaks the solution.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_scale: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Constructor {
    Uniform { velocity: [f64; 3], h0: f64 },
    ScrewRotor { omega0: f64, w0: f64, r0: f64, h0: f64 },
    ChargedRest { charge: f64, phi0: f64, b0: f64, h0: f64 },
    Static {},
    RigidRotation { omega: f64 },
    Swirl { omega0: f64, omega1: f64, kappa0: f64, kappa1: f64, frequency: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GridConfig {
    /// `points³` slab around the scenario axis at `t = 0`; the difference
    /// step defaults to the sample spacing.
    Slab {
        points: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        h: Option<f64>,
    },
    Box {
        origin: [f64; 4],
        extents: [f64; 4],
        samples: [usize; 4],
        h: f64,
        #[serde(default)]
        periodic: [bool; 3],
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LoopConfig {
    Circle { center: [f64; 3], radius: f64, e1: [f64; 3], e2: [f64; 3], nodes: usize },
    Hopf { nodes: usize },
    Separated { nodes: usize, distance: f64 },
    TorusLink { nodes: usize, twists: u32 },
    Whitehead { nodes: usize },
    File { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClockConfig {
    #[default]
    Proper,
    Reference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransportConfig {
    pub ds: f64,
    pub steps: usize,
    /// Steps between recorded samples.
    #[serde(default = "one")]
    pub every: usize,
    #[serde(default)]
    pub clock: ClockConfig,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VolumeConfig {
    /// Half-width in units of the scenario support radius.
    pub factor: f64,
    pub cells: usize,
}

impl Default for VolumeConfig {
    fn default() -> Self {
        Self { factor: 1.5, cells: 32 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("relhel-out") }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Overrides the per-scenario identity tolerance when set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub identity: Option<f64>,
    pub circulation: f64,
    pub helicity_drift: f64,
    /// Relative to `|𝔠(0)|`.
    pub boundary: f64,
    pub drift_forms: f64,
    /// Relative to the dominant helicity scale.
    pub drift_match: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            identity: None,
            circulation: 1e-6,
            helicity_drift: 1e-3,
            boundary: 1e-6,
            drift_forms: 1e-4,
            drift_match: 1e-2,
        }
    }
}

/// Observables `helicity` understands.
pub const HELICITY_OBSERVABLES: [&str; 4] = ["density", "mesh", "boundary", "drift"];

/// Values given on the command line that replace config fields.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub output: Option<PathBuf>,
    pub ds: Option<f64>,
    pub steps: Option<usize>,
    pub cells: Option<usize>,
    pub nodes: Option<usize>,
}

fn config_error(msg: impl Into<String>) -> RunError {
    RunError::Config(msg.into())
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, RunError> {
        let c: Self = serde_json::from_str(text).map_err(|e| config_error(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    /// Reads `path`; relative loop files resolve against its directory.
    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
        let mut c = Self::from_json(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for l in &mut c.loops {
            if let LoopConfig::File { path } = l {
                if path.is_relative() {
                    *path = base.join(&*path);
                }
            }
        }
        Ok(c)
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<(), RunError> {
        if let Some(dir) = &o.output {
            self.output.dir = dir.clone();
        }
        if o.ds.is_some() || o.steps.is_some() {
            let t = self.transport.get_or_insert(TransportConfig {
                ds: 1e-2,
                steps: 100,
                every: 1,
                clock: ClockConfig::Proper,
            });
            t.ds = o.ds.unwrap_or(t.ds);
            t.steps = o.steps.unwrap_or(t.steps);
        }
        if let Some(n) = o.cells {
            self.volume.cells = n;
        }
        if let Some(n) = o.nodes {
            for l in &mut self.loops {
                l.set_nodes(n);
            }
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<(), RunError> {
        let t = &self.tolerances;
        let all =
            [t.identity.unwrap_or(1.0), t.circulation, t.helicity_drift, t.boundary, t.drift_forms, t.drift_match];
        if all.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(config_error("tolerances must be positive and finite"));
        }
        if let Some(tr) = &self.transport {
            if !(tr.ds > 0.0 && tr.ds.is_finite()) || tr.steps == 0 || tr.every == 0 {
                return Err(config_error("transport needs ds > 0, steps > 0 and every > 0"));
            }
        }
        if !(self.volume.factor > 0.0 && self.volume.factor.is_finite()) || self.volume.cells < 2 {
            return Err(config_error("volume needs factor > 0 and at least 2 cells"));
        }
        for d in &self.diagnostics {
            if d.parse::<IdentityKind>().is_err() && !HELICITY_OBSERVABLES.contains(&d.as_str()) {
                return Err(config_error(format!("unknown diagnostic `{d}`")));
            }
        }
        Ok(())
    }

    /// Canonical JSON of the effective configuration.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("configuration serializes")
    }

    pub fn build_scenario(&self) -> Result<Scenario, RunError> {
        let sc = self.scenario.as_ref().ok_or_else(|| config_error("this command needs a `scenario`"))?;
        let mut s = sc.constructor.build().map_err(|e| config_error(e.to_string()))?;
        if let Some(f) = sc.theta_scale {
            s = with_scaled_theta(&s, f);
        }
        if let Some(b) = sc.boost {
            s = boost_scenario(&s, ThreeVector(b)).map_err(|e| config_error(e.to_string()))?;
        }
        Ok(s)
    }

    pub fn build_grid(&self, s: &Scenario) -> Result<GridBox, RunError> {
        let g = match self.grid.as_ref().ok_or_else(|| config_error("this command needs a `grid`"))? {
            GridConfig::Slab { points, h } => default_slab(s, *points).map(|g| GridBox { h: h.unwrap_or(g.h), ..g }),
            GridConfig::Box { origin, extents, samples, h, periodic } => {
                GridBox::new(FourVector::contravariant(*origin), *extents, *samples, *h, *periodic)
            }
        };
        g.map_err(|e| config_error(e.to_string()))
    }

    /// Every configured loop, in order; pair constructors contribute two.
    pub fn build_loops(&self) -> Result<Vec<LoopPolyline>, RunError> {
        let mut out = Vec::new();
        for l in &self.loops {
            out.extend(l.build()?);
        }
        Ok(out)
    }

    pub fn identity_kinds(&self) -> Vec<IdentityKind> {
        self.diagnostics.iter().filter_map(|d| d.parse().ok()).collect()
    }

    pub fn observables(&self) -> Vec<&str> {
        let chosen: Vec<&str> =
            self.diagnostics.iter().map(String::as_str).filter(|d| HELICITY_OBSERVABLES.contains(d)).collect();
        if chosen.is_empty() {
            HELICITY_OBSERVABLES.to_vec()
        } else {
            chosen
        }
    }
}

impl Constructor {
    pub fn build(&self) -> relhel_core::Result<Scenario> {
        match *self {
            Constructor::Uniform { velocity, h0 } => make_uniform(ThreeVector(velocity), h0),
            Constructor::ScrewRotor { omega0, w0, r0, h0 } => make_screw_rotor(omega0, w0, r0, h0),
            Constructor::ChargedRest { charge, phi0, b0, h0 } => make_charged_rest(charge, phi0, b0, h0),
            Constructor::Static {} => make_kinematic_flow(KinematicSpec::Static),
            Constructor::RigidRotation { omega } => make_kinematic_flow(KinematicSpec::RigidRotation { omega }),
            Constructor::Swirl { omega0, omega1, kappa0, kappa1, frequency } => {
                make_kinematic_flow(KinematicSpec::Swirl { omega0, omega1, kappa0, kappa1, frequency })
            }
        }
    }
}

impl LoopConfig {
    pub fn nodes(&self) -> Option<usize> {
        match *self {
            LoopConfig::Circle { nodes, .. }
            | LoopConfig::Hopf { nodes }
            | LoopConfig::Separated { nodes, .. }
            | LoopConfig::TorusLink { nodes, .. }
            | LoopConfig::Whitehead { nodes } => Some(nodes),
            LoopConfig::File { .. } => None,
        }
    }

    pub fn set_nodes(&mut self, n: usize) {
        match self {
            LoopConfig::Circle { nodes, .. }
            | LoopConfig::Hopf { nodes }
            | LoopConfig::Separated { nodes, .. }
            | LoopConfig::TorusLink { nodes, .. }
            | LoopConfig::Whitehead { nodes } => *nodes = n,
            LoopConfig::File { .. } => {}
        }
    }

    pub fn build(&self) -> Result<Vec<LoopPolyline>, RunError> {
        let pair = |r: relhel_core::Result<(LoopPolyline, LoopPolyline)>| r.map(|(a, b)| vec![a, b]);
        let r = match self {
            LoopConfig::Circle { center, radius, e1, e2, nodes } => {
                shapes::circle(ThreeVector(*center), *radius, ThreeVector(*e1), ThreeVector(*e2), *nodes, 0.0)
                    .map(|l| vec![l])
            }
            LoopConfig::Hopf { nodes } => pair(shapes::hopf_pair(*nodes)),
            LoopConfig::Separated { nodes, distance } => pair(shapes::separated_pair(*nodes, *distance)),
            LoopConfig::TorusLink { nodes, twists } => pair(shapes::torus_link_pair(*nodes, *twists)),
            LoopConfig::Whitehead { nodes } => pair(shapes::whitehead_pair(*nodes)),
            LoopConfig::File { path } => return polyline::read_file(path),
        };
        r.map_err(|e| config_error(e.to_string()))
    }
}

impl From<ClockConfig> for Clock {
    fn from(c: ClockConfig) -> Self {
        match c {
            ClockConfig::Proper => Clock::Proper,
            ClockConfig::Reference => Clock::Reference,
        }
    }
}
