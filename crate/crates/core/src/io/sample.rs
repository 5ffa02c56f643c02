//! Initial-condition sampling and error norms.

use rayon::prelude::*;

use crate::basis::TriangleRule;
use crate::error::{Error, Result};
use crate::mesh::ElementGeometry;
use crate::models::Model;
use crate::timeloop::{Solution, Solver};
use crate::{Point, State};

/// Barycentric points and weights (summing to one) of the degree-6 rule
/// applied on each of the 4^`levels` congruent sub-triangles.
pub fn composite_rule(levels: usize) -> Vec<([f64; 3], f64)> {
    let base = TriangleRule::new(6).expect("degree-6 rule");
    let mut tris = vec![[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]];
    for _ in 0..levels {
        let mut next = Vec::with_capacity(tris.len() * 4);
        for t in &tris {
            let m = |a: [f64; 3], b: [f64; 3]| [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])];
            let (ab, bc, ca) = (m(t[0], t[1]), m(t[1], t[2]), m(t[2], t[0]));
            next.extend([[t[0], ab, ca], [ab, t[1], bc], [ca, bc, t[2]], [ab, bc, ca]]);
        }
        tris = next;
    }
    let w0 = 1.0 / tris.len() as f64;
    let mut out = Vec::with_capacity(tris.len() * base.weights.len());
    for t in &tris {
        for (p, w) in base.points.iter().zip(&base.weights) {
            let l: [f64; 3] = std::array::from_fn(|i| p[0] * t[0][i] + p[1] * t[1][i] + p[2] * t[2][i]);
            out.push((l, w * w0));
        }
    }
    out
}

/// Cell averages of `f` with the composite rule.
pub fn cell_averages<const M: usize>(
    geo: &[ElementGeometry],
    rule: &[([f64; 3], f64)],
    f: &(dyn Fn(Point) -> State<M> + Sync),
) -> Vec<State<M>> {
    geo.par_iter()
        .map(|g| rule.iter().fold(State::<M>::zeros(), |acc, (l, w)| acc + f(g.point(*l)) * *w))
        .collect()
}

/// Point values by evaluation; averages by degree-6 quadrature on 16
/// sub-triangles per element (discontinuous data are integrated well).
pub fn sample_initial_condition<Mo: Model<M>, const M: usize>(
    solver: &Solver<Mo, M>,
    f: &(dyn Fn(Point) -> State<M> + Sync),
) -> Result<Solution<M>> {
    let points: Vec<State<M>> = solver.point_pos.par_iter().map(|&x| f(x)).collect();
    let averages = cell_averages(&solver.geo, &composite_rule(2), f);
    for (p, u) in points.iter().enumerate() {
        if !solver.model.in_domain(u, &solver.domain) {
            return Err(Error::Config(format!(
                "initial value {:?} at {:?} is outside the invariant domain",
                u.as_slice(),
                solver.point_pos[p]
            )));
        }
    }
    for (k, u) in averages.iter().enumerate() {
        if !solver.model.in_domain(u, &solver.domain) {
            return Err(Error::Config(format!(
                "initial average {:?} of element {k} is outside the invariant domain",
                u.as_slice()
            )));
        }
    }
    Ok(Solution { points, averages })
}

/// L1, L2 and L∞ errors of one family of DoFs.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Norms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

impl Norms {
    fn from_weighted(e: &[(f64, f64)]) -> Norms {
        let l1 = e.iter().map(|(d, w)| d.abs() * w).sum();
        let l2 = e.iter().map(|(d, w)| d * d * w).sum::<f64>().sqrt();
        let linf = e.iter().map(|(d, _)| d.abs()).fold(0.0, f64::max);
        Norms { l1, l2, linf }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.l1, self.l2, self.linf]
    }
}

/// Errors of the averages ("internal" DoFs, weights |K|) and of the
/// point values ("boundary" DoFs, weights from the dual cells scaled to
/// tile the domain), measured on component `comp`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ErrorNorms {
    pub internal: Norms,
    pub boundary: Norms,
}

pub fn error_norms<Mo: Model<M>, const M: usize>(
    solver: &Solver<Mo, M>,
    u: &Solution<M>,
    exact: &(dyn Fn(Point) -> State<M> + Sync),
    comp: usize,
) -> ErrorNorms {
    let ex = cell_averages(&solver.geo, &composite_rule(0), exact);
    let internal: Vec<(f64, f64)> =
        u.averages.iter().zip(&ex).zip(&solver.geo).map(|((a, b), g)| (a[comp] - b[comp], g.area)).collect();
    let w = solver.sub.norm_weights();
    let boundary: Vec<(f64, f64)> = u
        .points
        .par_iter()
        .zip(&solver.point_pos)
        .zip(&w)
        .map(|((v, &x), &w)| (v[comp] - exact(x)[comp], w))
        .collect();
    ErrorNorms { internal: Norms::from_weighted(&internal), boundary: Norms::from_weighted(&boundary) }
}
