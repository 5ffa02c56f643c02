//! PDE models: fluxes, Jacobians, eigen-structure, numerical fluxes and
//! invariant domains.

mod euler;
mod scalar;

pub use euler::{Euler, EulerDomain};
pub use scalar::{ScalarDomain, ScalarModel, VelocityField};

use std::fmt::Debug;

use crate::error::{Error, Result};
use crate::{Mat, Point, State};

pub trait Model<const M: usize>: Clone + Debug + Send + Sync + 'static {
    type Domain: Clone + Debug + Send + Sync;

    /// Component groups measured jointly when computing global deviations
    /// (vector quantities are grouped so that their norm is rotation
    /// invariant).
    const GROUPS: &'static [&'static [usize]];

    /// Names of the two monitored quantities returned by `report_fields`.
    const REPORT_NAMES: [&'static str; 2] = ["u", "u"];

    fn name(&self) -> &'static str;

    /// Quantities tracked in step reports (e.g. density and pressure).
    fn report_fields(&self, u: &State<M>) -> [f64; 2] {
        [u[0], u[0]]
    }

    /// Cartesian flux components (f_x, f_y).
    fn flux(&self, u: &State<M>, x: Point) -> [State<M>; 2];

    #[inline]
    fn flux_n(&self, u: &State<M>, x: Point, n: Point) -> State<M> {
        let f = self.flux(u, x);
        f[0] * n[0] + f[1] * n[1]
    }

    fn jacobian_n(&self, u: &State<M>, x: Point, n: Point) -> Mat<M>;

    /// Bound on the spectral radius of J(u)·n; scales with |n|.
    fn wave_bound(&self, u: &State<M>, x: Point, n: Point) -> f64;

    /// Magnitude used to decide when an eigenvalue counts as zero.
    fn speed_scale(&self, u: &State<M>, x: Point) -> f64;

    /// Eigenvalues and right/left eigenvectors of J(u)·n for unit `n`,
    /// with `L = R⁻¹`.
    fn eigen(&self, u: &State<M>, x: Point, n: Point) -> (State<M>, Mat<M>, Mat<M>);

    /// Whether `u` is a state where the flux and eigen-structure exist.
    fn hyperbolic(&self, u: &State<M>) -> bool;

    fn in_domain(&self, u: &State<M>, d: &Self::Domain) -> bool;

    /// Largest η ∈ [0, 1] with base + η (target − base) ∈ 𝒟.
    fn max_blend(&self, base: &State<M>, target: &State<M>, d: &Self::Domain) -> f64;

    /// Wall ghost state.
    fn mirror(&self, u: &State<M>, n: Point) -> State<M>;

    /// Components that are invariant under rotations, in the frame of `n`.
    fn invariant_components(&self, u: &State<M>, n: Point) -> State<M>;

    /// Sub-triangle divergence term ½ Σ_j (flux of u_j)·N_j with scaled
    /// inward normals N_j.
    fn lo_divergence(&self, u: &[State<M>; 3], x: &[Point; 3], n: &[Point; 3]) -> State<M>;

    /// Far-field boundary flux between the interior trace and the
    /// prescribed state.
    fn far_field_flux(&self, u: &State<M>, ub: &State<M>, x: Point, n: Point) -> State<M> {
        let (p, _) = steger_warming_split(self, u, x, n);
        let (_, m) = steger_warming_split(self, ub, x, n);
        p + m
    }
}

fn sign_with(lambda: f64, tol: f64) -> f64 {
    if lambda.abs() < tol {
        0.0
    } else {
        lambda.signum()
    }
}

fn spectral<const M: usize, Mo: Model<M>>(
    model: &Mo,
    u: &State<M>,
    x: Point,
    n: Point,
    g: impl Fn(f64, f64) -> f64,
) -> Mat<M> {
    let (lam, r, l) = model.eigen(u, x, n);
    let tol = 1e-12 * model.speed_scale(u, x);
    let mut rl = r;
    for i in 0..M {
        let s = g(lam[i], tol);
        for row in 0..M {
            rl[(row, i)] *= s;
        }
    }
    rl * l
}

/// Matrix sign R sign(Λ) L of J(u)·n.
pub fn sign_matrix<const M: usize, Mo: Model<M>>(model: &Mo, u: &State<M>, x: Point, n: Point) -> Result<Mat<M>> {
    if !model.hyperbolic(u) {
        return Err(Error::InvalidState(format!("{} state {:?} is not hyperbolic", model.name(), u.as_slice())));
    }
    Ok(spectral(model, u, x, n, sign_with))
}

/// Projector R 1[Λ > 0] L onto the outgoing characteristic fields,
/// i.e. (S + S²)/2 for the sign matrix S.
pub fn positive_indicator<const M: usize, Mo: Model<M>>(model: &Mo, u: &State<M>, x: Point, n: Point) -> Mat<M> {
    spectral(model, u, x, n, |l, tol| if sign_with(l, tol) > 0.0 { 1.0 } else { 0.0 })
}

/// Steger–Warming split (f⁺·n, f⁻·n) = (A⁺u, A⁻u).
pub fn steger_warming_split<const M: usize, Mo: Model<M>>(
    model: &Mo,
    u: &State<M>,
    x: Point,
    n: Point,
) -> (State<M>, State<M>) {
    let (lam, r, l) = model.eigen(u, x, n);
    let w = l * u;
    let mut p = State::<M>::zeros();
    let mut m = State::<M>::zeros();
    for i in 0..M {
        let col = r.column(i) * w[i];
        if lam[i] > 0.0 {
            p += col * lam[i];
        } else {
            m += col * lam[i];
        }
    }
    (p, m)
}

/// Local Lax–Friedrichs flux through a face with normal `n`.
#[inline]
pub fn llf_flux<const M: usize, Mo: Model<M>>(
    model: &Mo,
    ui: &State<M>,
    uo: &State<M>,
    x: Point,
    n: Point,
) -> State<M> {
    let a = model.wave_bound(ui, x, n).max(model.wave_bound(uo, x, n));
    (model.flux_n(ui, x, n) + model.flux_n(uo, x, n)) * 0.5 - (uo - ui) * (0.5 * a)
}

/// Checked flux evaluation.
pub fn flux<const M: usize, Mo: Model<M>>(model: &Mo, u: &State<M>, x: Point) -> Result<[State<M>; 2]> {
    if !model.hyperbolic(u) {
        return Err(Error::InvalidState(format!("{} state {:?} is outside the flux domain", model.name(), u.as_slice())));
    }
    Ok(model.flux(u, x))
}

pub fn in_domain<const M: usize, Mo: Model<M>>(model: &Mo, u: &State<M>, d: &Mo::Domain) -> bool {
    model.in_domain(u, d)
}

pub fn max_blend_to_domain<const M: usize, Mo: Model<M>>(
    model: &Mo,
    base: &State<M>,
    target: &State<M>,
    d: &Mo::Domain,
) -> f64 {
    model.max_blend(base, target, d)
}

/// Largest admissible η found by bisection on the domain predicate.
pub fn bisect_blend<const M: usize, Mo: Model<M>>(
    model: &Mo,
    base: &State<M>,
    target: &State<M>,
    d: &Mo::Domain,
    iters: usize,
) -> f64 {
    let at = |eta: f64| base + (target - base) * eta;
    if !model.in_domain(base, d) {
        return 0.0;
    }
    if model.in_domain(target, d) {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..iters {
        let mid = 0.5 * (lo + hi);
        if model.in_domain(&at(mid), d) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Shrinks a candidate η until the blended state passes the predicate.
/// Guards closed-form roots against round-off.
pub(crate) fn secure_blend<const M: usize, Mo: Model<M>>(
    model: &Mo,
    base: &State<M>,
    target: &State<M>,
    d: &Mo::Domain,
    eta: f64,
) -> f64 {
    let eta = eta.clamp(0.0, 1.0);
    if eta == 0.0 {
        return 0.0;
    }
    let at = |e: f64| base + (target - base) * e;
    if model.in_domain(&at(eta), d) {
        return eta;
    }
    let mut e = eta * (1.0 - 1e-13);
    for _ in 0..8 {
        if model.in_domain(&at(e), d) {
            return e;
        }
        e *= 1.0 - 1e-10;
    }
    let b = bisect_blend(model, base, &at(eta), d, 60);
    b * eta
}
