//! High-order operators: DG element vectors, their projection to point
//! residuals, and the upwind weights that recombine them at shared DoFs.

use crate::basis::{basis_d2lambda, basis_dlambda, eval_basis, EdgeRule, TriangleRule, PROJECTION};
use crate::error::Result;
use crate::mesh::ElementGeometry;
use crate::models::{positive_indicator, Model};
use crate::{Mat, Point, State};

/// Basis data tabulated at the quadrature points.
#[derive(Clone, Debug)]
pub struct Tables {
    pub vol: TriangleRule,
    pub edge: EdgeRule,
    pub vol_phi: Vec<[f64; 7]>,
    pub vol_dphi: Vec<[[f64; 3]; 7]>,
    /// Quadratic edge shapes (start vertex, end vertex, midpoint).
    pub edge_shape: Vec<[f64; 3]>,
    /// `[reversed][local edge][q]`: ∂φ/∂λ at the edge points.
    pub edge_dphi: [[Vec<[[f64; 3]; 7]>; 3]; 2],
    #[allow(clippy::type_complexity)]
    pub edge_d2phi: [[Vec<[[[f64; 3]; 3]; 7]>; 3]; 2],
}

/// Barycentric coordinates of the point at parameter `t` along local edge
/// `i`, measured from vertex `i` (or from vertex `i + 1` when `reversed`).
#[inline]
pub fn edge_bary(i: usize, t: f64, reversed: bool) -> [f64; 3] {
    let s = if reversed { 1.0 - t } else { t };
    let mut l = [0.0; 3];
    l[i] = 1.0 - s;
    l[(i + 1) % 3] = s;
    l
}

impl Tables {
    pub fn new(vol_degree: usize, edge_degree: usize) -> Result<Self> {
        let vol = TriangleRule::new(vol_degree)?;
        let edge = EdgeRule::new(edge_degree)?;
        let vol_phi = vol.points.iter().map(|&p| eval_basis(p)).collect();
        let vol_dphi = vol.points.iter().map(|&p| basis_dlambda(p)).collect();
        let edge_shape = edge
            .points
            .iter()
            .map(|&t| [(1.0 - t) * (1.0 - 2.0 * t), t * (2.0 * t - 1.0), 4.0 * t * (1.0 - t)])
            .collect();
        let mk1 = |r: bool, i: usize| edge.points.iter().map(|&t| basis_dlambda(edge_bary(i, t, r))).collect();
        let mk2 = |r: bool, i: usize| edge.points.iter().map(|&t| basis_d2lambda(edge_bary(i, t, r))).collect();
        let edge_dphi = [[mk1(false, 0), mk1(false, 1), mk1(false, 2)], [mk1(true, 0), mk1(true, 1), mk1(true, 2)]];
        let edge_d2phi = [[mk2(false, 0), mk2(false, 1), mk2(false, 2)], [mk2(true, 0), mk2(true, 1), mk2(true, 2)]];
        Ok(Tables { vol, edge, vol_phi, vol_dphi, edge_shape, edge_dphi, edge_d2phi })
    }
}

impl Default for Tables {
    fn default() -> Self {
        Tables::new(6, 5).expect("default rules exist")
    }
}

/// Volume part −∫_K ∇φ_j · f(u_h) of the element vector. `None` if u_h
/// is not a valid state at some quadrature point.
pub fn volume_term<const M: usize, Mo: Model<M>>(
    model: &Mo,
    g: &ElementGeometry,
    coef: &[State<M>; 7],
    tab: &Tables,
) -> Option<[State<M>; 7]> {
    let mut out = [State::<M>::zeros(); 7];
    let gl = &g.grad_lambda;
    for q in 0..tab.vol.len() {
        let phi = &tab.vol_phi[q];
        let mut u = coef[0] * phi[0];
        for j in 1..7 {
            u += coef[j] * phi[j];
        }
        if !model.hyperbolic(&u) {
            return None;
        }
        let x = g.point(tab.vol.points[q]);
        let f = model.flux(&u, x);
        let w = -tab.vol.weights[q] * g.area;
        let gk = [
            (f[0] * gl[0][0] + f[1] * gl[0][1]) * w,
            (f[0] * gl[1][0] + f[1] * gl[1][1]) * w,
            (f[0] * gl[2][0] + f[1] * gl[2][1]) * w,
        ];
        let d = &tab.vol_dphi[q];
        for j in 0..7 {
            out[j] += gk[0] * d[j][0] + gk[1] * d[j][1] + gk[2] * d[j][2];
        }
    }
    Some(out)
}

/// Trace of u_h at the edge points from (start, end, midpoint) values.
#[inline]
pub fn edge_traces<const M: usize>(tab: &Tables, ua: &State<M>, ub: &State<M>, um: &State<M>) -> Vec<State<M>> {
    tab.edge_shape.iter().map(|s| ua * s[0] + ub * s[1] + um * s[2]).collect()
}

/// Moments |e| Σ_q w_q ψ_k(t_q) g_q of edge integrand samples against the
/// start, end and midpoint shapes. Their sum is ∫_e g.
#[inline]
pub fn edge_moments<const M: usize>(tab: &Tables, len: f64, g: &[State<M>]) -> [State<M>; 3] {
    let mut out = [State::<M>::zeros(); 3];
    for (q, gq) in g.iter().enumerate() {
        let w = tab.edge.weights[q] * len;
        for k in 0..3 {
            out[k] += gq * (w * tab.edge_shape[q][k]);
        }
    }
    out
}

/// Full element vector F_K with interior traces on all edges.
pub fn element_vector<const M: usize, Mo: Model<M>>(
    model: &Mo,
    g: &ElementGeometry,
    coef: &[State<M>; 7],
    tab: &Tables,
) -> Result<[State<M>; 7]> {
    let mut f = volume_term(model, g, coef, tab)
        .ok_or_else(|| crate::Error::InvalidState("invalid state at a volume quadrature point".into()))?;
    for i in 0..3 {
        let j = (i + 1) % 3;
        let (xa, xb) = (g.x[i], g.x[j]);
        let tr = edge_traces(tab, &coef[i], &coef[j], &coef[3 + i]);
        let mut fl = Vec::with_capacity(tr.len());
        for (q, u) in tr.iter().enumerate() {
            if !model.hyperbolic(u) {
                return Err(crate::Error::InvalidState("invalid edge trace".into()));
            }
            let t = tab.edge.points[q];
            let x = [(1.0 - t) * xa[0] + t * xb[0], (1.0 - t) * xa[1] + t * xb[1]];
            fl.push(model.flux_n(u, x, g.edge_normal[i]));
        }
        let m = edge_moments(tab, g.edge_len[i], &fl);
        f[i] += m[0];
        f[j] += m[1];
        f[3 + i] += m[2];
    }
    Ok(f)
}

/// Φ = 𝒫 F / |K|: six point residuals and the average rate (row 7).
#[inline]
pub fn ho_residuals<const M: usize>(f: &[State<M>; 7], area: f64) -> ([State<M>; 6], State<M>) {
    let mut phi = [State::<M>::zeros(); 6];
    let inv = 1.0 / area;
    for (i, p) in phi.iter_mut().enumerate() {
        let row = &PROJECTION[i];
        let mut s = f[0] * row[0];
        for j in 1..7 {
            s += f[j] * row[j];
        }
        *p = s * inv;
    }
    let mut avg = f[0];
    for v in &f[1..] {
        avg += v;
    }
    (phi, avg * inv)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EpsPolicy {
    Zero,
    HalfArea,
}

impl EpsPolicy {
    pub fn value(self, area: f64) -> f64 {
        match self {
            EpsPolicy::Zero => 0.0,
            EpsPolicy::HalfArea => 0.5 * area,
        }
    }
}

/// Weights larger than this (∞-norm) amplify residuals at points where the
/// upwind sum is nearly singular; those points use arithmetic weights.
pub const WEIGHT_NORM_MAX: f64 = 5.0;

/// Upwind projection weights at one point DoF with state `u` at `x`.
/// `incident` lists (DoF normal, ε) for each element containing it.
/// Returns the weights and whether the arithmetic fallback was used.
pub fn upwind_weights<const M: usize, Mo: Model<M>>(
    model: &Mo,
    u: &State<M>,
    x: Point,
    incident: &[(Point, f64)],
) -> (Vec<Mat<M>>, bool) {
    let id = Mat::<M>::identity();
    let a: Vec<Mat<M>> =
        incident.iter().map(|&(n, eps)| positive_indicator(model, u, x, n) + id * eps).collect();
    let mut w = Vec::with_capacity(a.len());
    let sum: Mat<M> = a.iter().sum();
    let inv = sum.try_inverse().filter(|inv| {
        let cond = sum.abs().row_sum().max() * inv.abs().row_sum().max();
        cond.is_finite() && cond <= 1e8
    });
    if let Some(inv) = inv {
        for ak in &a {
            w.push(inv * ak);
        }
    }
    let fallback = w.is_empty() || w.iter().any(|m| m.abs().row_sum().max() > WEIGHT_NORM_MAX);
    if fallback {
        w.clear();
        w.extend(std::iter::repeat_n(id / incident.len() as f64, incident.len()));
    }
    // Close the partition of unity exactly.
    if let Some((last, rest)) = w.split_last_mut() {
        *last = rest.iter().fold(id, |acc, m| acc - m);
    }
    (w, fallback)
}

/// du_σ/dt = −Σ_K ω_{K,σ} Φ_{K,σ}, accumulated in the given order.
pub fn point_update_gather<const M: usize>(weights: &[Mat<M>], residuals: &[State<M>]) -> State<M> {
    weights.iter().zip(residuals).fold(State::<M>::zeros(), |acc, (w, r)| acc - w * r)
}
