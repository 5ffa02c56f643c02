//! Weak boundary conditions: ghost states, boundary fluxes, the element
//! vector corrections they induce, and the quadrature-point scaling limiter.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::basis::{eval_basis, EdgeRule};
use crate::mesh::Mesh;
use crate::models::{llf_flux, Model};
use crate::{Point, State};

pub type FieldFn<const M: usize> = Arc<dyn Fn(Point, f64) -> State<M> + Send + Sync>;

#[derive(Clone)]
pub enum FarField<const M: usize> {
    Constant(State<M>),
    /// Data depending on position and time.
    Function(FieldFn<M>),
}

impl<const M: usize> FarField<M> {
    #[inline]
    pub fn at(&self, x: Point, t: f64) -> State<M> {
        match self {
            FarField::Constant(u) => *u,
            FarField::Function(f) => f(x, t),
        }
    }
}

#[derive(Clone)]
pub enum BcKind<const M: usize> {
    /// Inflow/outflow through a prescribed exterior state.
    FarField(FarField<M>),
    /// Ghost state equal to the interior trace.
    Outflow,
    /// Mirror state: momentum reflected, density and energy kept.
    Wall,
}

impl<const M: usize> fmt::Debug for BcKind<M> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BcKind::FarField(FarField::Constant(u)) => write!(f, "FarField({:?})", u.as_slice()),
            BcKind::FarField(FarField::Function(_)) => write!(f, "FarField(<fn>)"),
            BcKind::Outflow => write!(f, "Outflow"),
            BcKind::Wall => write!(f, "Wall"),
        }
    }
}

pub type Locator<const M: usize> = Arc<dyn Fn(Point) -> Option<BcKind<M>> + Send + Sync>;

/// Assignment of boundary conditions to boundary edges: explicit tags
/// first, then a geometric locator, then the default.
#[derive(Clone)]
pub struct BoundarySpec<const M: usize> {
    pub by_tag: BTreeMap<i32, BcKind<M>>,
    pub locate: Option<Locator<M>>,
    pub default: BcKind<M>,
}

impl<const M: usize> fmt::Debug for BoundarySpec<M> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundarySpec")
            .field("by_tag", &self.by_tag)
            .field("locate", &self.locate.is_some())
            .field("default", &self.default)
            .finish()
    }
}

impl<const M: usize> BoundarySpec<M> {
    pub fn uniform(kind: BcKind<M>) -> Self {
        BoundarySpec { by_tag: BTreeMap::new(), locate: None, default: kind }
    }

    pub fn kind_for(&self, tag: i32, midpoint: Point) -> BcKind<M> {
        if let Some(k) = self.by_tag.get(&tag) {
            return k.clone();
        }
        if let Some(k) = self.locate.as_ref().and_then(|f| f(midpoint)) {
            return k;
        }
        self.default.clone()
    }

    /// Kind of every edge (`None` for interior edges).
    pub fn resolve(&self, mesh: &Mesh) -> Vec<Option<BcKind<M>>> {
        mesh.edges
            .iter()
            .map(|e| {
                e.is_boundary().then(|| {
                    let (a, b) = (mesh.vertices[e.v[0]], mesh.vertices[e.v[1]]);
                    self.kind_for(e.tag, [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])])
                })
            })
            .collect()
    }
}

/// Exterior state seen by the trace `u` at `x` with outward normal `n`.
#[inline]
pub fn ghost_state<const M: usize, Mo: Model<M>>(
    model: &Mo,
    kind: &BcKind<M>,
    u: &State<M>,
    x: Point,
    n: Point,
    t: f64,
) -> State<M> {
    match kind {
        BcKind::FarField(f) => f.at(x, t),
        BcKind::Outflow => *u,
        BcKind::Wall => model.mirror(u, n),
    }
}

/// Numerical flux through a boundary face.
#[inline]
pub fn boundary_flux<const M: usize, Mo: Model<M>>(
    model: &Mo,
    kind: &BcKind<M>,
    u: &State<M>,
    ghost: &State<M>,
    x: Point,
    n: Point,
) -> State<M> {
    match kind {
        BcKind::FarField(_) => model.far_field_flux(u, ghost, x, n),
        BcKind::Outflow => model.flux_n(u, x, n),
        BcKind::Wall => llf_flux(model, u, ghost, x, n),
    }
}

/// Additions ∫_e φ_j (f̂ − f(u_h)·n) dℓ to the element vector for local
/// edge `local` (vertices `local`, `local + 1`), given trace values and
/// boundary fluxes at the points of `rule`.
pub fn boundary_corrections<const M: usize, Mo: Model<M>>(
    model: &Mo,
    local: usize,
    x: [Point; 2],
    n: Point,
    traces: &[State<M>],
    fhat: &[State<M>],
    rule: &EdgeRule,
) -> [State<M>; 7] {
    let len = ((x[1][0] - x[0][0]).powi(2) + (x[1][1] - x[0][1]).powi(2)).sqrt();
    let mut out = [State::<M>::zeros(); 7];
    for (q, (&t, &w)) in rule.points.iter().zip(&rule.weights).enumerate() {
        let mut l = [0.0; 3];
        l[local] = 1.0 - t;
        l[(local + 1) % 3] = t;
        let xq = [(1.0 - t) * x[0][0] + t * x[1][0], (1.0 - t) * x[0][1] + t * x[1][1]];
        let d = (fhat[q] - model.flux_n(&traces[q], xq, n)) * (w * len);
        let phi = eval_basis(l);
        for j in 0..7 {
            out[j] += d * phi[j];
        }
    }
    out
}

/// Scales `values` toward `avg` by the largest common factor keeping all
/// of them in 𝒟. Returns the factor.
pub fn scaling_limiter<const M: usize, Mo: Model<M>>(
    model: &Mo,
    values: &mut [State<M>],
    avg: &State<M>,
    dom: &Mo::Domain,
) -> f64 {
    let s = values.iter().map(|v| model.max_blend(avg, v, dom)).fold(1.0, f64::min);
    if s < 1.0 {
        for v in values.iter_mut() {
            *v = avg + (*v - avg) * s;
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{steger_warming_split, Euler, EulerDomain};

    #[test]
    fn wall_ghost() {
        let e = Euler::default();
        let n = [0.0, 1.0];
        let w = State::<4>::new(1.0, 0.0, 2.0, 5.0);
        let g = ghost_state(&e, &BcKind::Wall, &w, [0.0, 0.0], n, 0.0);
        assert_eq!(g.as_slice(), &[1.0, 0.0, -2.0, 5.0]);
        let w = State::<4>::new(1.0, 3.0, 0.0, 5.0);
        assert_eq!(ghost_state(&e, &BcKind::Wall, &w, [0.0, 0.0], n, 0.0), w);
        let f = boundary_flux(&e, &BcKind::Wall, &w, &e.mirror(&w, n), [0.0, 0.0], n);
        assert!(f[0].abs() < 1e-15 && f[3].abs() < 1e-15);
    }

    #[test]
    fn far_field_fluxes() {
        let e = Euler::default();
        let ub = e.conserved(8.0, 8.25, 0.0, 116.5);
        let kind = BcKind::FarField(FarField::Constant(ub));
        let x = [0.0, 0.0];
        // Inflow through the left side: outward normal (-1, 0), all waves enter.
        let n = [-1.0, 0.0];
        let u = e.conserved(1.4, 0.0, 0.0, 1.0);
        let f = boundary_flux(&e, &kind, &u, &ub, x, n);
        let (pu, _) = steger_warming_split(&e, &u, x, n);
        assert!(((f - pu) - e.flux_n(&ub, x, n)).abs().max() < 1e-10);
        // Consistency when the ghost equals the trace.
        let f = boundary_flux(&e, &kind, &u, &u, x, n);
        assert!((f - e.flux_n(&u, x, n)).abs().max() < 1e-12);
    }

    #[test]
    fn corrections_vanish_for_consistent_flux() {
        let e = Euler::default();
        let rule = EdgeRule::new(5).unwrap();
        let u: Vec<_> = (0..rule.len()).map(|q| e.conserved(1.0 + q as f64, 0.1, 0.2, 1.0)).collect();
        let x = [[0.0, 0.0], [1.0, 0.0]];
        let n = [0.0, -1.0];
        let f: Vec<_> = u.iter().map(|w| e.flux_n(w, [0.0, 0.0], n)).collect();
        let c = boundary_corrections(&e, 0, x, n, &u, &f, &rule);
        assert!(c.iter().all(|v| v.abs().max() < 1e-14));
    }

    #[test]
    fn scaling_limiter_cases() {
        let e = Euler::default();
        let d = EulerDomain::default();
        let avg = e.conserved(1.0, 0.0, 0.0, 1.0);
        let mut v = vec![e.conserved(1.1, 0.1, 0.0, 1.0), e.conserved(0.9, 0.0, 0.0, 0.8)];
        let orig = v.clone();
        assert_eq!(scaling_limiter(&e, &mut v, &avg, &d), 1.0);
        assert_eq!(v, orig);
        let mut v = vec![e.conserved(1.0, 0.0, 0.0, 1.0), State::<4>::new(1.0, 3.0, 0.0, 1.0)];
        let s = scaling_limiter(&e, &mut v, &avg, &d);
        assert!(s < 1.0 && v.iter().all(|w| e.in_domain(w, &d)));
        let floor = State::<4>::new(1.0, 0.0, 0.0, 1e-10 / 0.4);
        let mut v = vec![State::<4>::new(1.0, 1.0, 0.0, 0.2)];
        assert_eq!(scaling_limiter(&e, &mut v, &floor, &d), 0.0);
        assert_eq!(v[0], floor);
    }
}
