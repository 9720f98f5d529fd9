//! Scene files: a finite Dirac operator, named product states, a sampling
//! grid and optimizer settings, stored as JSON.
//!
//! Complex numbers are `[re, im]` pairs and angles are in radians.

use std::collections::HashSet;
use std::path::Path;

use nccausal_core::finite_geometry::{make_state, FiniteError};
use nccausal_core::spacetime::SpacetimeError;
use nccausal_core::{Event, EventGrid, FiniteDirac, OptimizerOptions, ProductState};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("cannot read scene file: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed scene JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid Dirac operator: {0}")]
    Dirac(FiniteError),
    #[error("state `{name}`: {source}")]
    State { name: String, source: FiniteError },
    #[error("state `{name}`: {source}")]
    Event { name: String, source: SpacetimeError },
    #[error("invalid grid: {0}")]
    Grid(SpacetimeError),
    #[error("duplicate state name `{0}`")]
    DuplicateName(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("invalid optimizer settings: {0}")]
    Optimizer(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedState {
    pub name: String,
    pub state: ProductState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub dirac: FiniteDirac,
    pub states: Vec<NamedState>,
    pub grid: EventGrid,
    pub optimizer: OptimizerOptions,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneFile {
    dirac: DiracFile,
    states: Vec<StateFile>,
    #[serde(default = "default_grid")]
    grid: GridFile,
    #[serde(default)]
    optimizer: OptimizerFile,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiracFile {
    d1: f64,
    d2: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    name: String,
    event: EventFile,
    internal: [[f64; 2]; 2],
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EventFile {
    t: f64,
    x: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridFile {
    t_min: f64,
    t_max: f64,
    x_min: f64,
    x_max: f64,
    nt: usize,
    nx: usize,
}

fn default_grid() -> GridFile {
    GridFile {
        t_min: -1.0,
        t_max: 4.0,
        x_min: -3.0,
        x_max: 3.0,
        nt: 101,
        nx: 101,
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct OptimizerFile {
    seed: u64,
    starts: usize,
    step: f64,
    max_iter: usize,
    tol: f64,
    diag_bound: f64,
}

impl Default for OptimizerFile {
    fn default() -> Self {
        let o = OptimizerOptions::default();
        Self {
            seed: DEFAULT_SEED,
            starts: o.starts,
            step: o.step,
            max_iter: o.max_iter,
            tol: o.tol,
            diag_bound: o.diag_bound,
        }
    }
}

impl Scene {
    pub fn from_json(text: &str) -> Result<Self, SceneError> {
        let file: SceneFile = serde_json::from_str(text)?;
        let dirac = FiniteDirac::new(file.dirac.d1, file.dirac.d2).map_err(SceneError::Dirac)?;

        let mut seen = HashSet::new();
        let mut states = Vec::with_capacity(file.states.len());
        for s in file.states {
            if !seen.insert(s.name.clone()) {
                return Err(SceneError::DuplicateName(s.name));
            }
            let event = Event::try_new(s.event.t, s.event.x).map_err(|source| SceneError::Event {
                name: s.name.clone(),
                source,
            })?;
            let [[r1, i1], [r2, i2]] = s.internal;
            let internal = make_state([Complex64::new(r1, i1), Complex64::new(r2, i2)]).map_err(|source| {
                SceneError::State {
                    name: s.name.clone(),
                    source,
                }
            })?;
            states.push(NamedState {
                name: s.name,
                state: ProductState::new(event, internal),
            });
        }

        let g = file.grid;
        let grid = EventGrid::new((g.t_min, g.t_max), (g.x_min, g.x_max), g.nt, g.nx).map_err(SceneError::Grid)?;

        let o = file.optimizer;
        if o.starts == 0 || o.max_iter == 0 || !(o.step > 0.0) || !(o.tol > 0.0) || !(o.diag_bound > 0.0) {
            return Err(SceneError::Optimizer(
                "starts, max_iter, step, tol and diag_bound must be positive".into(),
            ));
        }
        let optimizer = OptimizerOptions {
            seed: o.seed,
            starts: o.starts,
            step: o.step,
            max_iter: o.max_iter,
            tol: o.tol,
            diag_bound: o.diag_bound,
        };
        Ok(Self {
            dirac,
            states,
            grid,
            optimizer,
        })
    }

    pub fn load(path: &Path) -> Result<Self, SceneError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        let file = SceneFile {
            dirac: DiracFile {
                d1: self.dirac.d1(),
                d2: self.dirac.d2(),
            },
            states: self
                .states
                .iter()
                .map(|s| {
                    let [a, b] = s.state.internal.components();
                    StateFile {
                        name: s.name.clone(),
                        event: EventFile {
                            t: s.state.event.t,
                            x: s.state.event.x,
                        },
                        internal: [[a.re, a.im], [b.re, b.im]],
                    }
                })
                .collect(),
            grid: GridFile {
                t_min: self.grid.t_min,
                t_max: self.grid.t_max,
                x_min: self.grid.x_min,
                x_max: self.grid.x_max,
                nt: self.grid.nt,
                nx: self.grid.nx,
            },
            optimizer: OptimizerFile {
                seed: self.optimizer.seed,
                starts: self.optimizer.starts,
                step: self.optimizer.step,
                max_iter: self.optimizer.max_iter,
                tol: self.optimizer.tol,
                diag_bound: self.optimizer.diag_bound,
            },
        };
        serde_json::to_string_pretty(&file).expect("scene serializes")
    }

    pub fn state(&self, name: &str) -> Result<&ProductState, SceneError> {
        self.states
            .iter()
            .find(|s| s.name == name)
            .map(|s| &s.state)
            .ok_or_else(|| SceneError::UnknownState(name.to_string()))
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.optimizer.seed = seed;
        self
    }

    /// Built-in scene used when no file is given.
    pub fn reference() -> Self {
        Self::from_json(REFERENCE_SCENE).expect("reference scene is valid")
    }
}

/// `d = (0, 1)`; equator states at several events plus a pole and an
/// off-equator state.
pub const REFERENCE_SCENE: &str = r#"{
  "dirac": { "d1": 0.0, "d2": 1.0 },
  "states": [
    { "name": "origin",   "event": { "t": 0.0, "x": 0.0 },  "internal": [[0.7071067811865476, 0.0], [0.7071067811865476, 0.0]] },
    { "name": "later",    "event": { "t": 2.0, "x": 0.5 },  "internal": [[0.7071067811865476, 0.0], [0.3820514243700898, 0.595009839529386]] },
    { "name": "fast",     "event": { "t": 1.0, "x": 0.0 },  "internal": [[0.7071067811865476, 0.0], [-0.5664940832575452, 0.4231837114471604]] },
    { "name": "elsewhere","event": { "t": 0.5, "x": 3.0 },  "internal": [[0.7071067811865476, 0.0], [0.7071067811865476, 0.0]] },
    { "name": "tilted",   "event": { "t": 3.0, "x": 0.0 },  "internal": [[0.8660254037844386, 0.0], [0.5, 0.0]] },
    { "name": "north",    "event": { "t": 0.0, "x": 0.0 },  "internal": [[1.0, 0.0], [0.0, 0.0]] },
    { "name": "north_later", "event": { "t": 1.0, "x": 1.0 }, "internal": [[1.0, 0.0], [0.0, 0.0]] }
  ],
  "grid": { "t_min": -1.0, "t_max": 4.0, "x_min": -3.0, "x_max": 3.0, "nt": 41, "nx": 41 },
  "optimizer": { "seed": 42, "starts": 32, "step": 0.1, "max_iter": 10000, "tol": 1e-10, "diag_bound": 1000000.0 }
}"#;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_scene_parses() {
        let scene = Scene::reference();
        assert_eq!(scene.states.len(), 7);
        assert_eq!(scene.optimizer.seed, 42);
        assert!(scene.state("origin").is_ok());
        assert!(matches!(scene.state("nobody"), Err(SceneError::UnknownState(_))));
    }

    #[test]
    fn round_trip_is_exact() {
        let scene = Scene::reference();
        let again = Scene::from_json(&scene.to_json()).unwrap();
        assert_eq!(scene, again);
        assert_eq!(scene.to_json(), again.to_json());
    }

    #[test]
    fn non_normalized_input_is_canonicalized_once() {
        let text = r#"{"dirac":{"d1":1,"d2":2},"states":[{"name":"a","event":{"t":0,"x":0},"internal":[[0,3],[4,0]]}]}"#;
        let scene = Scene::from_json(text).unwrap();
        let [a, b] = scene.states[0].state.internal.components();
        assert!(a.im == 0.0 && (a.re - 0.6).abs() < 1e-15);
        assert!((b.norm() - 0.8).abs() < 1e-15);
        assert_eq!(Scene::from_json(&scene.to_json()).unwrap(), scene);
    }

    #[test]
    fn degenerate_dirac_is_rejected_at_parse_time() {
        let text = r#"{"dirac":{"d1":1,"d2":1},"states":[]}"#;
        assert!(matches!(Scene::from_json(text), Err(SceneError::Dirac(_))));
    }

    #[test]
    fn duplicate_names_and_zero_vectors_are_rejected() {
        let dup = r#"{"dirac":{"d1":0,"d2":1},"states":[
            {"name":"a","event":{"t":0,"x":0},"internal":[[1,0],[0,0]]},
            {"name":"a","event":{"t":1,"x":0},"internal":[[1,0],[0,0]]}]}"#;
        assert!(matches!(Scene::from_json(dup), Err(SceneError::DuplicateName(_))));
        let zero = r#"{"dirac":{"d1":0,"d2":1},"states":[{"name":"a","event":{"t":0,"x":0},"internal":[[0,0],[0,0]]}]}"#;
        assert!(matches!(Scene::from_json(zero), Err(SceneError::State { .. })));
        let extra = r#"{"dirac":{"d1":0,"d2":1},"states":[],"colour":"red"}"#;
        assert!(matches!(Scene::from_json(extra), Err(SceneError::Json(_))));
    }
}
