//! Causal relations, spectral distances and Lorentzian distance functionals
//! for 2D Minkowski space-time coupled to the finite noncommutative space
//! `M₂(ℂ)`.
//!
//! * [`clifford`]: gamma matrices, fundamental symmetry and the pointwise
//!   operator symbols of the causal and steep conditions.
//! * [`finite_geometry`]: pure states of `M₂(ℂ)` and the spectral distance
//!   under a finite Dirac operator.
//! * [`spacetime`]: Minkowski causal order, Lorentzian distance, proper time
//!   of piecewise-linear curves and function predicates.
//! * [`product_causality`]: the causal order on product states, reachable
//!   longitudes, a curve oracle and a separating-element search.

pub mod clifford;
mod eigen;
pub mod finite_geometry;
pub mod product_causality;
pub mod spacetime;

pub use clifford::{causal_symbol, is_nsd, standard_basis, steep_symbol, CliffordBasis, Herm2, Herm4};
pub use finite_geometry::{
    make_state, spectral_distance, DistanceResult, FiniteDirac, InternalState, OptimizerOptions,
};
pub use product_causality::{causally_related, CausalVerdict, NotRelatedReason, ProductState};
pub use spacetime::{causally_precedes, lorentzian_distance, Event, EventGrid};
