//! Blending parameters: bound-preserving limits for edge fluxes and point
//! residuals, and the oscillation-eliminating factor θ_K built from
//! derivative jumps across edges.

use crate::mesh::ElementGeometry;
use crate::models::Model;
use crate::spatial_ho::Tables;
use crate::{Point, State};

/// Global references for the damping terms: domain mean and L∞ deviation
/// of each component (vector groups measured with the Euclidean norm).
#[derive(Clone, Debug)]
pub struct OeGlobals<const M: usize> {
    pub mean: State<M>,
    pub dev: State<M>,
    /// Components that are not globally constant up to round-off.
    pub active: [bool; M],
}

pub fn oe_globals<const M: usize, Mo: Model<M>>(
    _model: &Mo,
    points: &[State<M>],
    averages: &[State<M>],
    areas: &[f64],
) -> OeGlobals<M> {
    let total: f64 = areas.iter().sum();
    let mean = averages.iter().zip(areas).fold(State::<M>::zeros(), |acc, (u, a)| acc + u * *a) / total;
    let mut dev = State::<M>::zeros();
    let mut active = [false; M];
    for group in Mo::GROUPS {
        let norm = |u: &State<M>| group.iter().map(|&c| (u[c] - mean[c]).powi(2)).sum::<f64>().sqrt();
        let d = points.iter().chain(averages).map(norm).fold(0.0, f64::max);
        let m = group.iter().map(|&c| mean[c] * mean[c]).sum::<f64>().sqrt();
        for &c in *group {
            dev[c] = d;
            active[c] = d > 1e-12 * m.max(1.0);
        }
    }
    OeGlobals { mean, dev, active }
}

/// Edge averages of the absolute jumps of first (∂n, ∂t) and second
/// (∂nn, ∂nt, ∂tt) derivatives of the rotation-invariant components.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeJumps<const M: usize> {
    pub first: State<M>,
    pub second: State<M>,
}

/// Coefficients of ∂n, ∂t, ∂nn, ∂nt, ∂tt on the seven basis functions of
/// each side (left, right) at one edge quadrature point.
pub type JumpStencil = [[[f64; 7]; 5]; 2];

fn directional(g: &ElementGeometry, d1: &[[f64; 3]; 7], d2: &[[[f64; 3]; 3]; 7], n: Point) -> [[f64; 7]; 5] {
    let t = [-n[1], n[0]];
    let gl = &g.grad_lambda;
    let mut out = [[0.0; 7]; 5];
    for j in 0..7 {
        let (mut gx, mut gy) = (0.0, 0.0);
        let mut h = [0.0; 3];
        for a in 0..3 {
            gx += d1[j][a] * gl[a][0];
            gy += d1[j][a] * gl[a][1];
            for b in 0..3 {
                let c = d2[j][a][b];
                h[0] += c * gl[a][0] * gl[b][0];
                h[1] += c * gl[a][0] * gl[b][1];
                h[2] += c * gl[a][1] * gl[b][1];
            }
        }
        let dir2 = |a: Point, b: Point| h[0] * (a[0] * b[0]) + h[1] * (a[0] * b[1] + a[1] * b[0]) + h[2] * (a[1] * b[1]);
        out[0][j] = gx * n[0] + gy * n[1];
        out[1][j] = gx * t[0] + gy * t[1];
        out[2][j] = dir2(n, n);
        out[3][j] = dir2(n, t);
        out[4][j] = dir2(t, t);
    }
    out
}

/// Stencils of an interior edge with unit normal `n` (outward of the left
/// element), one per edge quadrature point. They depend on geometry only.
pub fn jump_stencils(
    tab: &Tables,
    gl: &ElementGeometry,
    left_local: usize,
    gr: &ElementGeometry,
    right_local: usize,
    n: Point,
) -> Vec<JumpStencil> {
    (0..tab.edge.len())
        .map(|q| {
            [
                directional(gl, &tab.edge_dphi[0][left_local][q], &tab.edge_d2phi[0][left_local][q], n),
                directional(gr, &tab.edge_dphi[1][right_local][q], &tab.edge_d2phi[1][right_local][q], n),
            ]
        })
        .collect()
}

/// Jumps from precomputed stencils; `weights` are the edge quadrature
/// weights.
pub fn edge_jumps_with<const M: usize, Mo: Model<M>>(
    model: &Mo,
    stencils: &[JumpStencil],
    weights: &[f64],
    cl: &[State<M>; 7],
    cr: &[State<M>; 7],
    n: Point,
) -> EdgeJumps<M> {
    let mut first = State::<M>::zeros();
    let mut second = State::<M>::zeros();
    for (st, &w) in stencils.iter().zip(weights) {
        let mut d = [State::<M>::zeros(); 5];
        for (k, dk) in d.iter_mut().enumerate() {
            for j in 0..7 {
                *dk += cl[j] * st[0][k][j] - cr[j] * st[1][k][j];
            }
        }
        let ri = |v: State<M>| model.invariant_components(&v, n).abs();
        first += (ri(d[0]) + ri(d[1])) * w;
        second += (ri(d[2]) + ri(d[3]) + ri(d[4])) * w;
    }
    EdgeJumps { first, second }
}

/// Jumps across an interior edge with unit normal `n` (outward of the
/// left element). `local` gives each side's local edge index.
#[allow(clippy::too_many_arguments)]
pub fn edge_jumps<const M: usize, Mo: Model<M>>(
    model: &Mo,
    tab: &Tables,
    gl: &ElementGeometry,
    cl: &[State<M>; 7],
    left_local: usize,
    gr: &ElementGeometry,
    cr: &[State<M>; 7],
    right_local: usize,
    n: Point,
) -> EdgeJumps<M> {
    let st = jump_stencils(tab, gl, left_local, gr, right_local, n);
    edge_jumps_with(model, &st, &tab.edge.weights, cl, cr, n)
}

/// σ_{e,K}: maximum over components of the scaled, normalised jumps.
pub fn damping_sigma<const M: usize>(j: &EdgeJumps<M>, ell: f64, c_kappa: [f64; 2], gl: &OeGlobals<M>) -> f64 {
    (0..M)
        .filter(|&c| gl.active[c])
        .map(|c| (c_kappa[0] * ell * j.first[c] + c_kappa[1] * ell * ell * j.second[c]) / gl.dev[c])
        .fold(0.0, f64::max)
}

/// θ_K from (α_e, σ_{e,K}, ℓ_{e,K}) over the element's interior edges.
pub fn oe_theta(terms: &[(f64, f64, f64)], dt: f64) -> f64 {
    if terms.is_empty() {
        return 1.0;
    }
    let s: f64 = terms.iter().map(|&(alpha, sigma, ell)| alpha * dt / ell * sigma).sum();
    (-s / terms.len() as f64).exp()
}

/// Bound-preserving limit for one side of an edge. `sign` is +1 when the
/// edge normal points out of the element; `g` is the side's share of the
/// flux of its own average.
#[allow(clippy::too_many_arguments)]
pub fn bp_edge_parameter<const M: usize, Mo: Model<M>>(
    model: &Mo,
    ubar: &State<M>,
    sign: f64,
    f_lo: &State<M>,
    f_ho: &State<M>,
    g: &State<M>,
    dt: f64,
    area: f64,
    dom: &Mo::Domain,
) -> f64 {
    let lam = 3.0 * dt / area;
    let partial = ubar - (f_lo * sign - g) * lam;
    let target = partial - (f_ho - f_lo) * (sign * lam);
    model.max_blend(&partial, &target, dom)
}

/// Bound-preserving limit for an element's contribution to a point DoF
/// shared by `n_inc` elements, from the low-order update `u_lo`.
pub fn bp_point_parameter<const M: usize, Mo: Model<M>>(
    model: &Mo,
    u_lo: &State<M>,
    n_inc: usize,
    dt: f64,
    dphi: &State<M>,
    dom: &Mo::Domain,
) -> f64 {
    let target = u_lo - dphi * (n_inc as f64 * dt);
    model.max_blend(u_lo, &target, dom)
}

/// Final parameter: the smallest of the ingredients.
pub fn final_blend(eta: f64, thetas: &[f64]) -> f64 {
    thetas.iter().fold(eta, |a, &b| a.min(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{bisect_blend, ScalarDomain, ScalarModel};

    #[test]
    fn theta_cases() {
        assert_eq!(oe_theta(&[], 0.1), 1.0);
        assert_eq!(oe_theta(&[(1.0, 0.0, 1.0)], 0.1), 1.0);
        let a = oe_theta(&[(2.0, 0.5, 0.25)], 0.1);
        assert!((a - (-0.4f64).exp()).abs() < 1e-15);
        let b = oe_theta(&[(2.0, 0.5, 0.25), (1.0, 1.0, 0.5)], 0.1);
        assert!((b - (-(0.4 + 0.2) / 2.0f64).exp()).abs() < 1e-15);
        assert!(oe_theta(&[(2.0, 1.0, 0.25)], 0.1) < a);
        assert_eq!(final_blend(1.0, &[1.0]), 1.0);
        assert_eq!(final_blend(0.3, &[0.7]), 0.3);
    }

    #[test]
    fn edge_parameter_scalar() {
        let m = ScalarModel::Kpp;
        let d = ScalarDomain { min: 0.0, max: 1.0 };
        let u = State::<1>::new(0.5);
        let z = State::<1>::zeros();
        assert_eq!(bp_edge_parameter(&m, &u, 1.0, &z, &z, &z, 0.1, 1.0, &d), 1.0);
        // Partial state 0.5, high order pushes to 1.5.
        let f_ho = State::<1>::new(-1.0 / 0.3);
        let eta = bp_edge_parameter(&m, &u, 1.0, &z, &f_ho, &z, 0.1, 1.0, &d);
        assert!((eta - 0.5).abs() < 1e-12);
        let full = |e: f64| State::<1>::new(0.5 - 0.3 * e * f_ho[0]);
        let b = bisect_blend(&m, &full(0.0), &full(1.0), &d, 80);
        assert!((eta - b).abs() < 1e-10);
    }

    #[test]
    fn point_parameter_scalar() {
        let m = ScalarModel::Kpp;
        let d = ScalarDomain { min: 0.0, max: 1.0 };
        let u = State::<1>::new(0.9);
        assert_eq!(bp_point_parameter(&m, &u, 3, 0.1, &State::<1>::zeros(), &d), 1.0);
        let dphi = State::<1>::new(-1.0);
        let eta = bp_point_parameter(&m, &u, 2, 0.1, &dphi, &d);
        let b = bisect_blend(&m, &u, &State::<1>::new(1.1), &d, 80);
        assert!((eta - b).abs() < 1e-10 && (eta - 0.5).abs() < 1e-12);
    }
}
