//! Command implementations. Each returns a human-readable report and, where
//! relevant, CSV text; the binary decides where they go.

use std::fmt::Write as _;

use nccausal_core::finite_geometry::{latitude, longitude};
use nccausal_core::product_causality::{causal_report, reachable_longitudes, speed_bound, ArcSet, ProductError};
use nccausal_core::spacetime::{default_boost_grid, lorentz_distance_functional, SpacetimeError};
use nccausal_core::{lorentzian_distance, spectral_distance, CausalVerdict, DistanceResult, Event, EventGrid};
use thiserror::Error;

use crate::csv::{self, number};
use crate::scene::{Scene, SceneError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NOT_RELATED: i32 = 10;

#[derive(Debug, Error)]
pub enum CommandError {
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error("{0}")]
    Usage(String),
    #[error("source state: {0}")]
    Product(#[from] ProductError),
    #[error(transparent)]
    Spacetime(#[from] SpacetimeError),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Io(_) => EXIT_INTERNAL,
            _ => EXIT_USAGE,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub code: i32,
    pub report: String,
    pub csv: Option<String>,
}

impl Output {
    fn report(code: i32, report: String) -> Self {
        Self { code, report, csv: None }
    }
}

pub fn check(scene: &Scene, name1: &str, name2: &str) -> Result<Output, CommandError> {
    let w1 = scene.state(name1)?;
    let w2 = scene.state(name2)?;
    let r = causal_report(w1, w2, &scene.dirac);

    let mut out = String::new();
    match r.verdict {
        CausalVerdict::Related => writeln!(out, "verdict: related ({name1} ⪯ {name2})").unwrap(),
        CausalVerdict::NotRelated(reason) => {
            writeln!(out, "verdict: not related ({name1} ⋠ {name2})").unwrap();
            writeln!(out, "reason: {}", reason.label()).unwrap();
        }
    }
    writeln!(out, "base_causal: {}", r.base_causal).unwrap();
    writeln!(out, "lorentzian_distance: {}", r.lorentzian_distance).unwrap();
    let (z1, z2) = r.latitudes;
    writeln!(out, "latitudes: {z1} {z2} (|dz| = {})", (z1 - z2).abs()).unwrap();
    match (r.angular_gap, r.speed_margin) {
        (Some(gap), Some(margin)) => {
            writeln!(out, "delta_theta_min: {gap}").unwrap();
            writeln!(out, "bound: {}", r.angular_budget).unwrap();
            let sign = if margin >= 0.0 { "≥" } else { "<" };
            writeln!(out, "speed_margin: {margin} (speed_margin {sign} 0)").unwrap();
        }
        _ => {
            writeln!(out, "delta_theta_min: undefined (pole state)").unwrap();
            writeln!(out, "bound: {}", r.angular_budget).unwrap();
            writeln!(out, "speed_margin: vacuous at a pole").unwrap();
        }
    }
    let code = if r.verdict.is_related() { EXIT_OK } else { EXIT_NOT_RELATED };
    Ok(Output::report(code, out))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceKind {
    Internal,
    Lorentzian,
    Functional,
}

impl DistanceKind {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Internal => "internal",
            Self::Lorentzian => "lorentzian",
            Self::Functional => "functional",
        }
    }
}

fn display(v: DistanceResult) -> String {
    match v {
        DistanceResult::Finite(d) => d.to_string(),
        DistanceResult::Infinite => "infinite".to_string(),
    }
}

fn csv_value(v: DistanceResult) -> String {
    match v {
        DistanceResult::Finite(d) => number(d),
        DistanceResult::Infinite => "inf".to_string(),
    }
}

fn pair_distance(scene: &Scene, kind: DistanceKind, a: &str, b: &str) -> Result<DistanceResult, CommandError> {
    let w1 = scene.state(a)?;
    let w2 = scene.state(b)?;
    Ok(match kind {
        DistanceKind::Internal => spectral_distance(&scene.dirac, &w1.internal, &w2.internal, &scene.optimizer),
        DistanceKind::Lorentzian => DistanceResult::Finite(lorentzian_distance(&w1.event, &w2.event)),
        DistanceKind::Functional => {
            DistanceResult::Finite(lorentz_distance_functional(&w1.event, &w2.event, &default_boost_grid())?)
        }
    })
}

/// Distance between two named states.
pub fn distance(scene: &Scene, kind: DistanceKind, a: &str, b: &str) -> Result<Output, CommandError> {
    let value = pair_distance(scene, kind, a, b)?;
    let mut out = format!("{}: {}\n", kind.label(), display(value));
    if kind == DistanceKind::Functional {
        let (w1, w2) = (scene.state(a)?, scene.state(b)?);
        append_functional_gap(&mut out, value, lorentzian_distance(&w1.event, &w2.event));
    }
    Ok(Output::report(EXIT_OK, out))
}

/// Lorentzian distance or its functional form between raw events.
pub fn event_distance(kind: DistanceKind, p: Event, q: Event) -> Result<Output, CommandError> {
    let analytic = lorentzian_distance(&p, &q);
    let out = match kind {
        DistanceKind::Internal => {
            return Err(CommandError::Usage("internal distances need two state names".into()));
        }
        DistanceKind::Lorentzian => format!("lorentzian: {analytic}\n"),
        DistanceKind::Functional => {
            let value = DistanceResult::Finite(lorentz_distance_functional(&p, &q, &default_boost_grid())?);
            let mut out = format!("functional: {}\n", display(value));
            append_functional_gap(&mut out, value, analytic);
            out
        }
    };
    Ok(Output::report(EXIT_OK, out))
}

fn append_functional_gap(out: &mut String, value: DistanceResult, analytic: f64) {
    writeln!(out, "lorentzian: {analytic}").unwrap();
    if let DistanceResult::Finite(v) = value {
        writeln!(out, "gap: {}", (v - analytic).abs()).unwrap();
    }
}

/// Table over all ordered pairs of distinct states, `name1,name2,kind,value`.
pub fn distance_table(scene: &Scene, kind: DistanceKind) -> Result<Output, CommandError> {
    let mut table = String::from("name1,name2,kind,value\n");
    let mut infinite = 0;
    let mut rows = 0;
    for a in &scene.states {
        for b in &scene.states {
            if a.name == b.name {
                continue;
            }
            let v = pair_distance(scene, kind, &a.name, &b.name)?;
            infinite += usize::from(v.is_infinite());
            rows += 1;
            writeln!(table, "{},{},{},{}", csv::field(&a.name), csv::field(&b.name), kind.label(), csv_value(v)).unwrap();
        }
    }
    let report = format!("{} distances over {rows} ordered pairs ({infinite} infinite)\n", kind.label());
    Ok(Output {
        code: EXIT_OK,
        report,
        csv: Some(table),
    })
}

fn describe(arc: &ArcSet) -> String {
    match arc {
        ArcSet::Empty => "empty (not in the causal future)".to_string(),
        ArcSet::Full => "full circle".to_string(),
        ArcSet::Arc { center, half_width } => {
            format!("[{}, {}] (center {center}, half-width {half_width})", center - half_width, center + half_width)
        }
    }
}

pub fn reachable(scene: &Scene, source: &str, target: Event) -> Result<Output, CommandError> {
    let w = scene.state(source)?;
    let arc = reachable_longitudes(w, &target, &scene.dirac)?;
    let z = latitude(&w.internal);
    let theta = longitude(&w.internal).map_err(|_| ProductError::PoleState(z))?;
    let out = format!(
        "source: {source} at (t = {}, x = {}), latitude {z}, longitude {theta}\ntarget: (t = {}, x = {})\nspeed bound: {}\nreachable longitudes: {}\n",
        w.event.t,
        w.event.x,
        target.t,
        target.x,
        speed_bound(&scene.dirac),
        describe(&arc)
    );
    Ok(Output::report(EXIT_OK, out))
}

/// Flag column of the scan CSV.
pub fn reachable_flag(arc: &ArcSet) -> u8 {
    match arc {
        ArcSet::Empty => 0,
        ArcSet::Arc { .. } => 1,
        ArcSet::Full => 2,
    }
}

/// Reachable longitudes from `source` over `grid`, rows `t,x,theta_min,theta_max,reachable`
/// in row-major order with `t` outer.
pub fn scan(scene: &Scene, source: &str, grid: &EventGrid) -> Result<Output, CommandError> {
    if grid.nt < 2 || grid.nx < 2 {
        return Err(CommandError::Usage("scan resolution must be at least 2 per axis".into()));
    }
    grid.validate()?;
    let w = scene.state(source)?;
    let mut table = String::from("t,x,theta_min,theta_max,reachable\n");
    let mut counts = [0usize; 3];
    for e in grid.points() {
        let arc = reachable_longitudes(w, &e, &scene.dirac)?;
        let (lo, hi) = match arc {
            ArcSet::Empty => (f64::NAN, f64::NAN),
            ArcSet::Arc { center, half_width } => (center - half_width, center + half_width),
            ArcSet::Full => (-std::f64::consts::PI, std::f64::consts::PI),
        };
        let flag = reachable_flag(&arc);
        counts[usize::from(flag)] += 1;
        writeln!(table, "{},{},{},{},{flag}", number(e.t), number(e.x), number(lo), number(hi)).unwrap();
    }
    let report = format!(
        "scanned {} points from {source}: {} unreachable, {} partial arcs, {} full circles\n",
        grid.len(),
        counts[0],
        counts[1],
        counts[2]
    );
    Ok(Output {
        code: EXIT_OK,
        report,
        csv: Some(table),
    })
}
