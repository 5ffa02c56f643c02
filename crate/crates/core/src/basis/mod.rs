//! Local approximation space: quadratic Lagrange functions at the vertices
//! and edge midpoints plus the cubic bubble carrying the cell average.
//!
//! Local ordering: vertices σ1..σ3, midpoints σ4..σ6 (σ_{3+i} on the edge
//! [σ_i, σ_{i+1}]), and the average last.

mod quadrature;

pub use quadrature::{moment, EdgeRule, TriangleRule};

use crate::error::Result;
use crate::mesh::ElementGeometry;

pub const NDOF: usize = 7;

/// Rational entries (numerator, denominator) of `|K| M_K^{-1}`.
pub const PROJECTION_RATIONAL: [[(i64, i64); 7]; 7] = [
    [(140, 3), (50, 3), (50, 3), (-65, 6), (-10, 3), (-65, 6), (1, 1)],
    [(50, 3), (140, 3), (50, 3), (-65, 6), (-65, 6), (-10, 3), (1, 1)],
    [(50, 3), (50, 3), (140, 3), (-10, 3), (-65, 6), (-65, 6), (1, 1)],
    [(-65, 6), (-65, 6), (-10, 3), (215, 12), (115, 24), (115, 24), (1, 1)],
    [(-10, 3), (-65, 6), (-65, 6), (115, 24), (215, 12), (115, 24), (1, 1)],
    [(-65, 6), (-10, 3), (-65, 6), (115, 24), (115, 24), (215, 12), (1, 1)],
    [(1, 1); 7],
];

const fn rat(r: (i64, i64)) -> f64 {
    r.0 as f64 / r.1 as f64
}

const fn build_projection() -> [[f64; 7]; 7] {
    let mut p = [[0.0; 7]; 7];
    let mut i = 0;
    while i < 7 {
        let mut j = 0;
        while j < 7 {
            p[i][j] = rat(PROJECTION_RATIONAL[i][j]);
            j += 1;
        }
        i += 1;
    }
    p
}

/// The element-independent matrix `𝒫 = |K| M_K^{-1}`.
pub const PROJECTION: [[f64; 7]; 7] = build_projection();

pub fn projection_matrix() -> [[f64; 7]; 7] {
    PROJECTION
}

/// Values of (φ1..φ6, φ̄) at a barycentric point.
#[inline]
pub fn eval_basis(l: [f64; 3]) -> [f64; 7] {
    let bubble = 60.0 * l[0] * l[1] * l[2];
    [
        l[0] * (2.0 * l[0] - 1.0),
        l[1] * (2.0 * l[1] - 1.0),
        l[2] * (2.0 * l[2] - 1.0),
        4.0 * l[0] * l[1] - bubble / 3.0,
        4.0 * l[1] * l[2] - bubble / 3.0,
        4.0 * l[2] * l[0] - bubble / 3.0,
        bubble,
    ]
}

/// Partial derivatives ∂φ_j/∂λ_k, treating the λ as independent.
#[inline]
pub fn basis_dlambda(l: [f64; 3]) -> [[f64; 3]; 7] {
    let db = [60.0 * l[1] * l[2], 60.0 * l[0] * l[2], 60.0 * l[0] * l[1]];
    let mut d = [[0.0; 3]; 7];
    for i in 0..3 {
        d[i][i] = 4.0 * l[i] - 1.0;
        let j = (i + 1) % 3;
        for k in 0..3 {
            d[3 + i][k] = -db[k] / 3.0;
        }
        d[3 + i][i] += 4.0 * l[j];
        d[3 + i][j] += 4.0 * l[i];
    }
    d[6] = db;
    d
}

/// Second partials ∂²φ_j/∂λ_k∂λ_m.
#[inline]
pub fn basis_d2lambda(l: [f64; 3]) -> [[[f64; 3]; 3]; 7] {
    let mut hb = [[0.0; 3]; 3];
    hb[0][1] = 60.0 * l[2];
    hb[1][0] = hb[0][1];
    hb[0][2] = 60.0 * l[1];
    hb[2][0] = hb[0][2];
    hb[1][2] = 60.0 * l[0];
    hb[2][1] = hb[1][2];
    let mut d = [[[0.0; 3]; 3]; 7];
    for i in 0..3 {
        d[i][i][i] = 4.0;
        let j = (i + 1) % 3;
        for a in 0..3 {
            for b in 0..3 {
                d[3 + i][a][b] = -hb[a][b] / 3.0;
            }
        }
        d[3 + i][i][j] += 4.0;
        d[3 + i][j][i] += 4.0;
    }
    d[6] = hb;
    d
}

/// Physical gradients of the seven basis functions.
pub fn eval_basis_gradients(l: [f64; 3], g: &ElementGeometry) -> [[f64; 2]; 7] {
    let d = basis_dlambda(l);
    let gl = &g.grad_lambda;
    let mut out = [[0.0; 2]; 7];
    for j in 0..7 {
        for k in 0..3 {
            out[j][0] += d[j][k] * gl[k][0];
            out[j][1] += d[j][k] * gl[k][1];
        }
    }
    out
}

/// Physical second derivatives (xx, xy, yy) of the basis functions.
pub fn eval_basis_hessians(l: [f64; 3], g: &ElementGeometry) -> [[f64; 3]; 7] {
    let d = basis_d2lambda(l);
    let gl = &g.grad_lambda;
    let mut out = [[0.0; 3]; 7];
    for j in 0..7 {
        for a in 0..3 {
            for b in 0..3 {
                let c = d[j][a][b];
                if c != 0.0 {
                    out[j][0] += c * gl[a][0] * gl[b][0];
                    out[j][1] += c * gl[a][0] * gl[b][1];
                    out[j][2] += c * gl[a][1] * gl[b][1];
                }
            }
        }
    }
    out
}

/// Dual basis (θ_σ1..θ_σ6, θ_μ) = 𝒫 φ(λ).
pub fn dual_basis_eval(l: [f64; 3]) -> [f64; 7] {
    let phi = eval_basis(l);
    let mut out = [0.0; 7];
    for i in 0..7 {
        out[i] = (0..7).map(|j| PROJECTION[i][j] * phi[j]).sum();
    }
    out
}

/// Weights relating the average and the centroid value to the DoFs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AverageWeights {
    /// ū_K = Σ β_j v_j with v = (six point values, centroid value).
    pub beta: [f64; 7],
    /// u_h(x_K) = Σ θ_j u_j with u = (six point values, average).
    pub theta: [f64; 7],
}

pub fn average_weights() -> AverageWeights {
    AverageWeights {
        beta: [
            1.0 / 20.0,
            1.0 / 20.0,
            1.0 / 20.0,
            2.0 / 15.0,
            2.0 / 15.0,
            2.0 / 15.0,
            9.0 / 20.0,
        ],
        theta: eval_basis([1.0 / 3.0; 3]),
    }
}

/// Normalised mass matrix (1/|K|)∫_K φ_i φ_j, the same on every triangle.
pub fn normalized_mass(rule: &TriangleRule) -> [[f64; 7]; 7] {
    let mut m = [[0.0; 7]; 7];
    for (p, w) in rule.points.iter().zip(&rule.weights) {
        let phi = eval_basis(*p);
        for i in 0..7 {
            for j in 0..7 {
                m[i][j] += w * phi[i] * phi[j];
            }
        }
    }
    m
}

/// Residuals of the basis identities on a given triangle: ‖𝒫 M_K/|K| − I‖,
/// duality ‖(1/|K|)∫θ_i φ_j − δ_ij‖ and the β/θ average weights.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasisCheck {
    pub projection: f64,
    pub duality: f64,
    pub average_weights: f64,
}

pub fn check_basis(x: &[crate::Point; 3]) -> Result<BasisCheck> {
    let rule = TriangleRule::new(6)?;
    let area = 0.5 * ((x[1][0] - x[0][0]) * (x[2][1] - x[0][1]) - (x[1][1] - x[0][1]) * (x[2][0] - x[0][0])).abs();
    // Physical mass matrix by quadrature in physical coordinates.
    let mut mk = [[0.0; 7]; 7];
    let mut dual = [[0.0; 7]; 7];
    for (p, w) in rule.points.iter().zip(&rule.weights) {
        let phi = eval_basis(*p);
        let th = dual_basis_eval(*p);
        for i in 0..7 {
            for j in 0..7 {
                mk[i][j] += w * area * phi[i] * phi[j];
                dual[i][j] += w * th[i] * phi[j];
            }
        }
    }
    let mut projection: f64 = 0.0;
    let mut duality: f64 = 0.0;
    for i in 0..7 {
        for j in 0..7 {
            let pm: f64 = (0..7).map(|k| PROJECTION[i][k] * mk[k][j] / area).sum();
            let d = if i == j { 1.0 } else { 0.0 };
            projection = projection.max((pm - d).abs());
            duality = duality.max((dual[i][j] - d).abs());
        }
    }
    // β must integrate every quadratic exactly (and cubics, by symmetry);
    // θ must reproduce the centroid value.
    let aw = average_weights();
    let c = [1.0 / 3.0; 3];
    let mut weights: f64 = 0.0;
    for j in 0..7 {
        let mut v = [0.0; 7];
        for (l, vl) in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5], c]
            .iter()
            .zip(v.iter_mut())
        {
            *vl = eval_basis(*l)[j];
        }
        let avg: f64 = rule.points.iter().zip(&rule.weights).map(|(p, w)| w * eval_basis(*p)[j]).sum();
        let via_beta: f64 = (0..7).map(|k| aw.beta[k] * v[k]).sum();
        weights = weights.max((via_beta - avg).abs());
        let mut dof = [0.0; 7];
        dof[..6].copy_from_slice(&v[..6]);
        dof[6] = avg;
        let via_theta: f64 = (0..7).map(|k| aw.theta[k] * dof[k]).sum();
        weights = weights.max((via_theta - v[6]).abs());
    }
    Ok(BasisCheck { projection, duality, average_weights: weights })
}
