//! Low-order scheme: Lax–Friedrichs fluxes between cell averages and
//! Lax–Friedrichs residuals on the six sub-triangles of every element.

use crate::basis::average_weights;
use crate::mesh::{sub_positions, ElementGeometry, SUB_TRIANGLES};
use crate::models::{llf_flux, Model};
use crate::{Point, State};

/// |e| times the LLF flux between two averages across an edge.
#[inline]
pub fn lo_average_flux<const M: usize, Mo: Model<M>>(
    model: &Mo,
    uk: &State<M>,
    uo: &State<M>,
    x: Point,
    n: Point,
    len: f64,
) -> State<M> {
    llf_flux(model, uk, uo, x, n) * len
}

/// u_h at the centroid from the DoFs. With `dom`, the value is pulled
/// toward the average until every component lies within the range of the
/// element's DoFs and the state is in 𝒟. Without the first clip the
/// sub-triangle update loses its local maximum principle whenever 𝒟 is
/// much wider than the data.
pub fn centroid_value<const M: usize, Mo: Model<M>>(
    model: &Mo,
    coef: &[State<M>; 7],
    dom: Option<&Mo::Domain>,
) -> State<M> {
    let th = average_weights().theta;
    let mut uc = coef[0] * th[0];
    for j in 1..7 {
        uc += coef[j] * th[j];
    }
    if let Some(d) = dom {
        let avg = coef[6];
        let mut s: f64 = 1.0;
        for c in 0..M {
            let (lo, hi) = coef.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v[c]), b.max(v[c])));
            let dev = uc[c] - avg[c];
            if uc[c] > hi {
                s = s.min((hi - avg[c]) / dev);
            } else if uc[c] < lo {
                s = s.min((lo - avg[c]) / dev);
            }
        }
        if s < 1.0 {
            uc = avg + (uc - avg) * s.max(0.0);
        }
        if !model.in_domain(&uc, d) {
            let s = model.max_blend(&coef[6], &uc, d);
            uc = coef[6] + (uc - coef[6]) * s;
        }
    }
    uc
}

/// Low-order residuals of the six point DoFs of one element, already
/// divided by the dual volumes `dual`. Also returns Σ_{T∋σ} α_T.
pub fn lo_point_residuals<const M: usize, Mo: Model<M>>(
    model: &Mo,
    g: &ElementGeometry,
    normals: &[[Point; 3]; 6],
    coef: &[State<M>; 7],
    uc: &State<M>,
    dual: &[f64; 6],
    safety: f64,
) -> ([State<M>; 6], [f64; 6]) {
    let pos = sub_positions(g);
    let val = |l: usize| if l == 6 { *uc } else { coef[l] };
    let mut phi = [State::<M>::zeros(); 6];
    let mut asum = [0.0; 6];
    for (s, tri) in SUB_TRIANGLES.iter().enumerate() {
        let u = [val(tri[0]), val(tri[1]), val(tri[2])];
        let x = [pos[tri[0]], pos[tri[1]], pos[tri[2]]];
        let n = &normals[s];
        let div = model.lo_divergence(&u, &x, n) / 3.0;
        let mut alpha: f64 = 0.0;
        for k in 0..3 {
            for nj in n {
                alpha = alpha.max(model.wave_bound(&u[k], x[k], *nj));
            }
        }
        alpha *= 0.5 * safety;
        let ubar = (u[0] + u[1] + u[2]) / 3.0;
        for (k, &l) in tri.iter().enumerate() {
            if l < 6 {
                phi[l] += div + (u[k] - ubar) * alpha;
                asum[l] += alpha;
            }
        }
    }
    for l in 0..6 {
        phi[l] /= dual[l];
    }
    (phi, asum)
}

/// Residual of a single DoF.
#[allow(clippy::too_many_arguments)]
pub fn lo_point_residual<const M: usize, Mo: Model<M>>(
    model: &Mo,
    g: &ElementGeometry,
    normals: &[[Point; 3]; 6],
    coef: &[State<M>; 7],
    uc: &State<M>,
    dual: f64,
    sigma: usize,
    safety: f64,
) -> State<M> {
    let mut d = [1.0; 6];
    d[sigma] = dual;
    lo_point_residuals(model, g, normals, coef, uc, &d, safety).0[sigma]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_dof_map, scaled_inward_normals, sub_triangulate, Mesh, SUBS_OF_DOF};
    use crate::models::{Euler, ScalarModel, VelocityField};

    fn setup() -> (Mesh, Vec<ElementGeometry>) {
        let m = Mesh::from_triangles(vec![[0.0, 0.0], [1.0, 0.1], [0.3, 0.9]], vec![[0, 1, 2]], &[]).unwrap();
        let g = m.geometry().unwrap();
        (m, g)
    }

    #[test]
    fn constant_state_has_zero_residual() {
        let (m, g) = setup();
        let st = sub_triangulate(&g, &build_dof_map(&m));
        let e = Euler::default();
        let c = [e.conserved(1.0, 0.5, 0.2, 1.0); 7];
        let uc = centroid_value(&e, &c, None);
        let dual: [f64; 6] = std::array::from_fn(|l| st.dual[build_dof_map(&m).elem[0][l]]);
        let (phi, _) = lo_point_residuals(&e, &g[0], &st.normals[0], &c, &uc, &dual, 1.0);
        assert!(phi.iter().all(|p| p.abs().max() < 1e-13));
    }

    #[test]
    fn centroid_clipped_to_local_range() {
        use crate::models::ScalarDomain;
        let model = ScalarModel::Kpp;
        let wide = ScalarDomain { min: -1.0, max: 100.0 };
        // A jump through the element: the raw reconstruction overshoots.
        let mut c = [State::<1>::new(11.0); 7];
        c[1] = State::<1>::new(0.8);
        c[4] = State::<1>::new(0.8);
        c[6] = State::<1>::new(10.0);
        let raw = centroid_value(&model, &c, None)[0];
        assert!(raw > 11.0);
        let uc = centroid_value(&model, &c, Some(&wide))[0];
        assert!((uc - 11.0).abs() < 1e-12);
        // Smooth data inside the range is left alone.
        let c: [State<1>; 7] = std::array::from_fn(|j| State::<1>::new([1.0, 2.0, 3.0, 1.5, 2.5, 2.0, 2.0][j]));
        assert_eq!(centroid_value(&model, &c, Some(&wide)), centroid_value(&model, &c, None));
    }

    #[test]
    fn brute_force_linear_residual() {
        let (m, g) = setup();
        let g = &g[0];
        let d = build_dof_map(&m);
        let st = sub_triangulate(std::slice::from_ref(g), &d);
        let a = [0.8, -0.5];
        let model = ScalarModel::Linear(VelocityField::Constant(a));
        let grad = [1.5, -2.0];
        let lin = |x: Point| 0.3 + grad[0] * x[0] + grad[1] * x[1];
        let mut c = [State::<1>::zeros(); 7];
        for j in 0..6 {
            c[j] = State::<1>::new(lin(g.dof_pos[j]));
        }
        c[6] = State::<1>::new(lin(g.centroid));
        let uc = centroid_value(&model, &c, None);
        assert!((uc[0] - lin(g.centroid)).abs() < 1e-14);
        let pos = sub_positions(g);
        let alpha_for = |s: usize| {
            let t = SUB_TRIANGLES[s];
            let q = [pos[t[0]], pos[t[1]], pos[t[2]]];
            let n = scaled_inward_normals(&q);
            0.5 * n.iter().map(|n| (a[0] * n[0] + a[1] * n[1]).abs()).fold(0.0, f64::max)
        };
        for sigma in 0..6 {
            let mut expect = 0.0;
            for s in SUBS_OF_DOF[sigma] {
                let t = SUB_TRIANGLES[s];
                let area = st.area[0][s];
                let ubar = t.iter().map(|&l| lin(pos[l])).sum::<f64>() / 3.0;
                expect += area / 3.0 * (a[0] * grad[0] + a[1] * grad[1]) + alpha_for(s) * (lin(pos[sigma]) - ubar);
            }
            expect /= st.dual[d.elem[0][sigma]];
            let got = lo_point_residual(&model, g, &st.normals[0], &c, &uc, st.dual[d.elem[0][sigma]], sigma, 1.0);
            assert!((got[0] - expect).abs() < 1e-12, "{sigma}: {} {}", got[0], expect);
        }
    }

    #[test]
    fn average_flux_examples() {
        let model = ScalarModel::Linear(VelocityField::Constant([1.0, 0.0]));
        let one = State::<1>::new(1.0);
        let zero = State::<1>::new(0.0);
        assert_eq!(lo_average_flux(&model, &one, &zero, [0.0, 0.0], [1.0, 0.0], 1.0)[0], 1.0);
        let e = Euler::default();
        let (u, v) = (e.conserved(1.0, 0.2, 0.1, 1.0), e.conserved(0.5, -0.3, 0.4, 0.3));
        let f = lo_average_flux(&e, &u, &v, [0.0, 0.0], [0.6, 0.8], 2.0);
        let b = lo_average_flux(&e, &v, &u, [0.0, 0.0], [-0.6, -0.8], 2.0);
        assert!((f + b).abs().max() < 1e-14);
    }
}
