//! Seeded generators for events, internal states and product-state pairs.

use std::f64::consts::PI;

use nccausal_core::finite_geometry::{latitude, longitude};
use nccausal_core::product_causality::speed_bound;
use nccausal_core::{lorentzian_distance, Event, FiniteDirac, InternalState, ProductState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Independent stream for a named consumer, so filtering one suite does not
/// shift the samples of another.
pub fn stream(seed: u64, label: &str) -> ChaCha8Rng {
    let salt = label
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325_u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3));
    ChaCha8Rng::seed_from_u64(seed ^ salt)
}

pub fn event<R: Rng>(rng: &mut R, half_width: f64) -> Event {
    Event::new(rng.gen_range(-half_width..half_width), rng.gen_range(-half_width..half_width))
}

/// Event on the dyadic lattice `{k/4}`, so null separations and
/// coincidences are exact.
pub fn lattice_event<R: Rng>(rng: &mut R, half_steps: i32) -> Event {
    let t = f64::from(rng.gen_range(-half_steps..=half_steps)) / 4.0;
    let x = f64::from(rng.gen_range(-half_steps..=half_steps)) / 4.0;
    Event::new(t, x)
}

/// `q` in the causal future of `p`, timelike with probability 1.
pub fn future_event<R: Rng>(rng: &mut R, p: &Event, max_dt: f64) -> Event {
    let dt = rng.gen_range(0.05..max_dt);
    let dx = rng.gen_range(-0.98..0.98) * dt;
    Event::new(p.t + dt, p.x + dx)
}

/// `q` spacelike to `p`.
pub fn spacelike_event<R: Rng>(rng: &mut R, p: &Event, max_dx: f64) -> Event {
    let dx = rng.gen_range(0.1..max_dx) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let dt = rng.gen_range(-0.9..0.9) * dx.abs();
    Event::new(p.t + dt, p.x + dx)
}

pub fn latitude_value<R: Rng>(rng: &mut R) -> f64 {
    rng.gen_range(-0.9..0.9)
}

pub fn internal<R: Rng>(rng: &mut R) -> InternalState {
    let z = latitude_value(rng);
    on_parallel(rng, z)
}

pub fn on_parallel<R: Rng>(rng: &mut R, z: f64) -> InternalState {
    InternalState::from_latitude_longitude(z, rng.gen_range(-PI..PI)).expect("z in (-1, 1)")
}

pub fn at(z: f64, theta: f64) -> InternalState {
    InternalState::from_latitude_longitude(z, theta).expect("z in [-1, 1]")
}

pub fn dirac<R: Rng>(rng: &mut R) -> FiniteDirac {
    let d1 = rng.gen_range(-2.0..2.0);
    let gap = rng.gen_range(0.25..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    FiniteDirac::new(d1, d1 + gap).expect("gap is nonzero")
}

/// Same-parallel state at the given signed fraction of the reachable
/// half-width from `w`, measured at `q`.
pub fn state_at_budget_fraction(w: &ProductState, q: &Event, df: &FiniteDirac, fraction: f64) -> InternalState {
    let z = latitude(&w.internal);
    let theta = longitude(&w.internal).unwrap_or(0.0);
    let budget = speed_bound(df) * lorentzian_distance(&w.event, q);
    at(z, theta + fraction * budget.min(PI))
}

/// Pair drawn from a mixture covering every verdict: spacelike or past
/// bases, latitude changes, and same-parallel targets on both sides of the
/// speed limit.
pub fn mixed_pair<R: Rng>(rng: &mut R, df: &FiniteDirac) -> (ProductState, ProductState) {
    let p = event(rng, 2.0);
    let w1 = ProductState::new(p, internal(rng));
    let roll: f64 = rng.gen();
    if roll < 0.15 {
        let q = spacelike_event(rng, &p, 3.0);
        let internal2 = state_at_budget_fraction(&w1, &p, df, 0.0);
        return (w1, ProductState::new(q, internal2));
    }
    let q = future_event(rng, &p, 2.0);
    if roll < 0.3 {
        let z = latitude(&w1.internal);
        let shifted = (z + rng.gen_range(0.05..0.5) * if z > 0.0 { -1.0 } else { 1.0 }).clamp(-0.95, 0.95);
        return (w1, ProductState::new(q, on_parallel(rng, shifted)));
    }
    let fraction = rng.gen_range(-2.0..2.0);
    (w1, ProductState::new(q, state_at_budget_fraction(&w1, &q, df, fraction)))
}
