//! The finite spectral triple `(M₂(ℂ), ℂ², D_F)`.
//!
//! Pure states of `M₂(ℂ)` are unit vectors of `ℂ²` modulo phase, identified
//! with points of the Bloch sphere. The spectral distance between two states
//! is the supremum of `|ω₁(a) − ω₂(a)|` over Hermitian `a` with
//! `‖[D_F, a]‖ ≤ 1`. Only the off-diagonal part of `a` (in the eigenbasis of
//! `D_F`) is constrained, so states on different parallels of latitude sit at
//! infinite distance.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::clifford::{Herm2, ONE, ZERO};
use crate::eigen;

/// Vectors shorter than this cannot be normalized.
pub const ZERO_VECTOR_TOL: f64 = 1e-12;
/// Minimal gap between the two eigenvalues of a finite Dirac operator.
pub const DEGENERACY_TOL: f64 = 1e-12;
/// Latitudes closer than this are treated as equal by the distance.
pub const LATITUDE_TOL: f64 = 1e-9;
/// Distance from `|z| = 1` below which a state counts as a pole.
pub const POLE_TOL: f64 = 1e-12;
pub const UNITARY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FiniteError {
    #[error("cannot build a state from a vector of norm {0:e}")]
    ZeroVector(f64),
    #[error("finite Dirac operator has degenerate eigenvalues ({0}, {1})")]
    DegenerateDirac(f64, f64),
    #[error("longitude is undefined at a pole (latitude {0})")]
    PoleState(f64),
    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),
}

/// `D_F = diag(d₁, d₂)` with `d₁ ≠ d₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteDirac {
    d1: f64,
    d2: f64,
}

impl FiniteDirac {
    pub fn new(d1: f64, d2: f64) -> Result<Self, FiniteError> {
        if !d1.is_finite() || !d2.is_finite() || (d1 - d2).abs() <= DEGENERACY_TOL {
            return Err(FiniteError::DegenerateDirac(d1, d2));
        }
        Ok(Self { d1, d2 })
    }

    pub fn d1(&self) -> f64 {
        self.d1
    }

    pub fn d2(&self) -> f64 {
        self.d2
    }

    /// `|d₁ − d₂|`, the bound on internal angular speed per unit proper time.
    pub fn gap(&self) -> f64 {
        (self.d1 - self.d2).abs()
    }

    pub fn matrix(&self) -> Herm2 {
        Herm2::diag(self.d1, self.d2)
    }
}

/// A normalized, phase-fixed vector of `ℂ²` with cached Bloch coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InternalState {
    xi: [Complex64; 2],
    bloch: [f64; 3],
}

/// Normalizes `v` and fixes its phase so that the first component with
/// modulus above [`ZERO_VECTOR_TOL`] is real and nonnegative.
///
/// Already-canonical input is returned bit-for-bit unchanged.
pub fn make_state(v: [Complex64; 2]) -> Result<InternalState, FiniteError> {
    let norm_sqr = v[0].norm_sqr() + v[1].norm_sqr();
    let norm = norm_sqr.sqrt();
    if !norm.is_finite() || norm <= ZERO_VECTOR_TOL {
        return Err(FiniteError::ZeroVector(norm));
    }
    let mut xi = v;
    if (norm_sqr - 1.0).abs() > 4.0 * f64::EPSILON {
        xi = [xi[0] / norm, xi[1] / norm];
    }
    if let Some(k) = xi.iter().position(|z| z.norm() > ZERO_VECTOR_TOL) {
        if xi[k].im != 0.0 || xi[k].re < 0.0 {
            let modulus = xi[k].norm();
            let rotation = xi[k].conj() / modulus;
            xi = [xi[0] * rotation, xi[1] * rotation];
            xi[k] = Complex64::new(modulus, 0.0);
        }
    }
    let cross = xi[0].conj() * xi[1];
    let bloch = [
        2.0 * cross.re,
        2.0 * cross.im,
        xi[0].norm_sqr() - xi[1].norm_sqr(),
    ];
    Ok(InternalState { xi, bloch })
}

impl InternalState {
    /// State on latitude `z` at longitude `theta`:
    /// `ξ = (sqrt((1+z)/2), sqrt((1−z)/2)·e^{iθ})`.
    pub fn from_latitude_longitude(z: f64, theta: f64) -> Result<Self, FiniteError> {
        let z = z.clamp(-1.0, 1.0);
        let north = ((1.0 + z) / 2.0).sqrt();
        let south = ((1.0 - z) / 2.0).sqrt();
        make_state([
            Complex64::new(north, 0.0),
            Complex64::from_polar(south, theta),
        ])
    }

    pub fn components(&self) -> [Complex64; 2] {
        self.xi
    }

    /// `(x_ξ, y_ξ, z_ξ)` on the unit sphere.
    pub fn bloch(&self) -> [f64; 3] {
        self.bloch
    }

    pub fn is_pole(&self) -> bool {
        self.bloch[2].abs() >= 1.0 - POLE_TOL
    }

    /// Maps the state by a 2×2 matrix (assumed unitary) and re-canonicalizes.
    pub fn transformed(&self, u: &Matrix2<Complex64>) -> Result<Self, FiniteError> {
        let v = u * nalgebra::Vector2::new(self.xi[0], self.xi[1]);
        make_state([v[0], v[1]])
    }
}

/// `z_ξ = |ξ₁|² − |ξ₂|²`.
pub fn latitude(s: &InternalState) -> f64 {
    s.bloch[2]
}

/// `θ_ξ = atan2(y_ξ, x_ξ)` in `(−π, π]`.
pub fn longitude(s: &InternalState) -> Result<f64, FiniteError> {
    let z = latitude(s);
    if z.abs() >= 1.0 - POLE_TOL {
        return Err(FiniteError::PoleState(z));
    }
    let theta = s.bloch[1].atan2(s.bloch[0]);
    Ok(if theta <= -PI { PI } else { theta })
}

/// `ξ* a ξ`.
pub fn state_eval(s: &InternalState, a: &Herm2) -> f64 {
    let m = a.matrix();
    let [x1, x2] = s.xi;
    let value = x1.conj() * (m[(0, 0)] * x1 + m[(0, 1)] * x2)
        + x2.conj() * (m[(1, 0)] * x1 + m[(1, 1)] * x2);
    value.re
}

/// Operator norm of `[D, a]`.
fn commutator_norm_with(dirac: &Herm2, a: &Herm2) -> f64 {
    let c = dirac.matrix() * a.matrix() - a.matrix() * dirac.matrix();
    // [D, a] is anti-Hermitian, so its singular values are the moduli of the
    // eigenvalues of the Hermitian matrix −i[D, a].
    let h = c * Complex64::new(0.0, -1.0);
    let [lo, hi] = eigen::eigvals2(&h);
    lo.abs().max(hi.abs())
}

/// Largest singular value of `[D_F, a]`.
pub fn commutator_norm(df: &FiniteDirac, a: &Herm2) -> f64 {
    commutator_norm_with(&df.matrix(), a)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistanceResult {
    Finite(f64),
    Infinite,
}

impl DistanceResult {
    pub fn finite(&self) -> Option<f64> {
        match self {
            Self::Finite(v) => Some(*v),
            Self::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Self::Infinite)
    }
}

impl std::fmt::Display for DistanceResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Finite(v) => write!(f, "{v}"),
            Self::Infinite => write!(f, "infinite"),
        }
    }
}

/// Settings for the projected ascent behind [`spectral_distance`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerOptions {
    pub seed: u64,
    pub starts: usize,
    pub step: f64,
    pub max_iter: usize,
    pub tol: f64,
    /// Box bound on the coordinates of `a` along the commutant of `D`.
    pub diag_bound: f64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            seed: 42,
            starts: 32,
            step: 0.1,
            max_iter: 10_000,
            tol: 1e-10,
            diag_bound: 1e6,
        }
    }
}

/// Hilbert–Schmidt geometry of Hermitian 2×2 matrices relative to a Dirac
/// operator: an orthonormal basis `{e0, e1}` of its commutant (`span{I, D}`)
/// and the projection onto the unit ball of the commutator norm.
struct DiracSplit {
    dirac: Herm2,
    e0: Matrix2<Complex64>,
    e1: Matrix2<Complex64>,
    /// `(D − tr(D)/2) / (spectral gap / 2)`: eigenvalues ±1.
    polarity: Herm2,
}

fn hs_inner(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> f64 {
    (a * b).trace().re
}

impl DiracSplit {
    fn new(dirac: Herm2) -> Result<Self, FiniteError> {
        let [lo, hi] = eigen::eigvals2(dirac.matrix());
        if hi - lo <= DEGENERACY_TOL {
            return Err(FiniteError::DegenerateDirac(lo, hi));
        }
        let m = *dirac.matrix();
        let traceless = m - Matrix2::identity() * (m.trace() * 0.5);
        let e0 = Matrix2::identity() * Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let e1 = traceless / Complex64::new(traceless.norm(), 0.0);
        let polarity = Herm2::new(traceless * Complex64::new(2.0 / (hi - lo), 0.0))
            .expect("traceless part of a Hermitian matrix is Hermitian");
        Ok(Self {
            dirac,
            e0,
            e1,
            polarity,
        })
    }

    fn latitude(&self, s: &InternalState) -> f64 {
        state_eval(s, &self.polarity)
    }

    fn gap(&self) -> f64 {
        let [lo, hi] = eigen::eigvals2(self.dirac.matrix());
        hi - lo
    }

    fn project(&self, a: &Matrix2<Complex64>, diag_bound: Option<f64>) -> Matrix2<Complex64> {
        let mut c0 = hs_inner(a, &self.e0);
        let mut c1 = hs_inner(a, &self.e1);
        let orth = a - self.e0 * Complex64::new(c0, 0.0) - self.e1 * Complex64::new(c1, 0.0);
        if let Some(bound) = diag_bound {
            c0 = c0.clamp(-bound, bound);
            c1 = c1.clamp(-bound, bound);
        }
        let orth_h = Herm2::new(orth).expect("difference of Hermitian matrices");
        // On the complement of the commutant the commutator norm is a multiple
        // of the Frobenius norm, so radial scaling is the exact projection.
        let n = commutator_norm_with(&self.dirac, &orth_h);
        let orth = if n > 1.0 { orth / Complex64::new(n, 0.0) } else { orth };
        self.e0 * Complex64::new(c0, 0.0) + self.e1 * Complex64::new(c1, 0.0) + orth
    }
}

fn density_difference(s1: &InternalState, s2: &InternalState) -> Matrix2<Complex64> {
    let outer = |s: &InternalState| {
        let [a, b] = s.xi;
        Matrix2::new(a * a.conj(), a * b.conj(), b * a.conj(), b * b.conj())
    };
    outer(s1) - outer(s2)
}

fn random_start(rng: &mut ChaCha8Rng, split: &DiracSplit) -> Matrix2<Complex64> {
    let a11 = rng.gen_range(-1.0..1.0);
    let a22 = rng.gen_range(-1.0..1.0);
    let radius = rng.gen_range(0.0..1.0) / split.gap();
    let angle = rng.gen_range(-PI..PI);
    let raw = Matrix2::new(
        Complex64::new(a11, 0.0),
        Complex64::from_polar(radius, angle),
        Complex64::from_polar(radius, -angle),
        Complex64::new(a22, 0.0),
    );
    split.project(&raw, None)
}

/// Projected gradient ascent of `|tr(a ρ)|` from one start; returns the final
/// objective.
fn ascend(
    split: &DiracSplit,
    rho: &Matrix2<Complex64>,
    start: Matrix2<Complex64>,
    opts: &OptimizerOptions,
) -> f64 {
    let scale = rho.norm();
    if scale == 0.0 {
        return 0.0;
    }
    // Unit-length gradient, so the iteration count does not depend on how
    // close the two states are.
    let unit = rho / Complex64::new(scale, 0.0);
    let mut a = start;
    for _ in 0..opts.max_iter {
        let g = hs_inner(&a, rho);
        let direction = if g >= 0.0 { 1.0 } else { -1.0 };
        let next = split.project(
            &(a + unit * Complex64::new(opts.step * direction, 0.0)),
            Some(opts.diag_bound),
        );
        let moved = (next - a).norm();
        a = next;
        if moved < opts.tol {
            break;
        }
    }
    hs_inner(&a, rho).abs()
}

fn distance_with_split(
    split: &DiracSplit,
    s1: &InternalState,
    s2: &InternalState,
    opts: &OptimizerOptions,
) -> DistanceResult {
    if (split.latitude(s1) - split.latitude(s2)).abs() > LATITUDE_TOL {
        return DistanceResult::Infinite;
    }
    let rho = density_difference(s1, s2);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: f64 = 0.0;
    for _ in 0..opts.starts.max(1) {
        let start = random_start(&mut rng, split);
        best = best.max(ascend(split, &rho, start, opts));
    }
    DistanceResult::Finite(best)
}

/// Spectral distance between two pure states of `M₂(ℂ)` under `D_F`.
///
/// States on different parallels (latitudes differing by more than
/// [`LATITUDE_TOL`]) are reported as [`DistanceResult::Infinite`] without
/// running the optimizer.
pub fn spectral_distance(
    df: &FiniteDirac,
    s1: &InternalState,
    s2: &InternalState,
    opts: &OptimizerOptions,
) -> DistanceResult {
    let split = DiracSplit::new(df.matrix()).expect("FiniteDirac is nondegenerate");
    distance_with_split(&split, s1, s2, opts)
}

/// Same as [`spectral_distance`] for an arbitrary Hermitian Dirac operator with
/// distinct eigenvalues. Latitudes are measured along the eigenbasis of `dirac`.
pub fn spectral_distance_general(
    dirac: &Herm2,
    s1: &InternalState,
    s2: &InternalState,
    opts: &OptimizerOptions,
) -> Result<DistanceResult, FiniteError> {
    let split = DiracSplit::new(*dirac)?;
    Ok(distance_with_split(&split, s1, s2, opts))
}

/// Closed-form same-latitude distance `2·sqrt(1−z²)·|sin(Δθ/2)| / |d₁−d₂|`.
///
/// Returns `None` for states on different parallels.
pub fn same_latitude_closed_form(
    df: &FiniteDirac,
    s1: &InternalState,
    s2: &InternalState,
) -> Option<f64> {
    let (z1, z2) = (latitude(s1), latitude(s2));
    if (z1 - z2).abs() > LATITUDE_TOL {
        return None;
    }
    let (Ok(t1), Ok(t2)) = (longitude(s1), longitude(s2)) else {
        return Some(0.0);
    };
    let z = 0.5 * (z1 + z2);
    Some(2.0 * (1.0 - z * z).max(0.0).sqrt() * (0.5 * (t1 - t2)).sin().abs() / df.gap())
}

/// Outcome of an unclipped ascent used as evidence of unboundedness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceWitness {
    pub objective: f64,
    pub iterations: usize,
}

/// Runs the ascent with no bound on the commutant directions and a step that
/// doubles every iteration, stopping once the objective passes `threshold` or
/// after `opts.max_iter` iterations.
///
/// For states on different parallels the objective grows without bound. On a
/// common parallel (within [`LATITUDE_TOL`]) `a` is kept off the commutant
/// and the objective stays at the finite distance.
pub fn divergence_witness(
    df: &FiniteDirac,
    s1: &InternalState,
    s2: &InternalState,
    threshold: f64,
    opts: &OptimizerOptions,
) -> DivergenceWitness {
    let split = DiracSplit::new(df.matrix()).expect("FiniteDirac is nondegenerate");
    let rho = density_difference(s1, s2);
    // Same parallel: the commutant part of ρ is rounding noise that a doubling
    // step would amplify without bound, so `a` is kept off the commutant.
    let commutant_bound = ((split.latitude(s1) - split.latitude(s2)).abs() <= LATITUDE_TOL).then_some(0.0);
    let mut a = Matrix2::<Complex64>::zeros();
    let mut step = opts.step;
    let mut objective = 0.0;
    for iteration in 1..=opts.max_iter {
        let g = hs_inner(&a, &rho);
        let direction = if g >= 0.0 { 1.0 } else { -1.0 };
        a = split.project(&(a + rho * Complex64::new(step * direction, 0.0)), commutant_bound);
        objective = hs_inner(&a, &rho).abs();
        if objective > threshold {
            return DivergenceWitness {
                objective,
                iterations: iteration,
            };
        }
        step = (step * 2.0).min(1e100);
    }
    DivergenceWitness {
        objective,
        iterations: opts.max_iter,
    }
}

/// `u D_F u*` together with the induced state map `ξ ↦ uξ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjugatedDirac {
    pub dirac: Herm2,
    pub unitary: Matrix2<Complex64>,
}

impl ConjugatedDirac {
    pub fn map_state(&self, s: &InternalState) -> InternalState {
        s.transformed(&self.unitary)
            .expect("unitary maps unit vectors to unit vectors")
    }

    pub fn distance(
        &self,
        s1: &InternalState,
        s2: &InternalState,
        opts: &OptimizerOptions,
    ) -> DistanceResult {
        spectral_distance_general(&self.dirac, s1, s2, opts)
            .expect("conjugation preserves the spectrum")
    }
}

pub fn unitary_conjugate(
    df: &FiniteDirac,
    u: &Matrix2<Complex64>,
) -> Result<ConjugatedDirac, FiniteError> {
    let deviation = (u.adjoint() * u - Matrix2::identity())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if !deviation.is_finite() || deviation > UNITARY_TOL {
        return Err(FiniteError::NotUnitary(deviation));
    }
    let rotated = u * df.matrix().matrix() * u.adjoint();
    let dirac = Herm2::new(rotated).map_err(|_| FiniteError::NotUnitary(deviation))?;
    Ok(ConjugatedDirac { dirac, unitary: *u })
}

/// Random SU(2) element times a random phase.
pub fn random_unitary<R: Rng>(rng: &mut R) -> Matrix2<Complex64> {
    let q: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
    let n = q.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-6);
    let a = Complex64::new(q[0] / n, q[1] / n);
    let b = Complex64::new(q[2] / n, q[3] / n);
    let phase = Complex64::from_polar(1.0, rng.gen_range(-PI..PI));
    let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
    let (a, b) = (a / norm, b / norm);
    Matrix2::new(a, -b.conj(), b, a.conj()) * phase
}

/// Permutation `[[0,1],[1,0]]`, swapping the roles of `d₁` and `d₂`.
pub fn swap_unitary() -> Matrix2<Complex64> {
    Matrix2::new(ZERO, ONE, ONE, ZERO)
}
