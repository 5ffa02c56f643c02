//! The solver: one forward-Euler stage of the blended scheme, SSP-RK3 on
//! top of it, and the adaptive time loop.

mod rk;

pub use rk::StepReport;

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary::{boundary_flux, ghost_state, BcKind, BoundarySpec};
use crate::error::{Error, Result};
use crate::limiting::{
    bp_edge_parameter, bp_point_parameter, damping_sigma, edge_jumps_with, jump_stencils, oe_globals, oe_theta, EdgeJumps, JumpStencil, OeGlobals,
};
use crate::mesh::{build_dof_map, sub_triangulate, DofMap, ElementGeometry, Mesh, SubTriangulation};
use crate::models::{llf_flux, Model};
use crate::spatial_ho::{edge_moments, ho_residuals, upwind_weights, volume_term, EpsPolicy, Tables};
use crate::spatial_lo::{centroid_value, lo_point_residuals};
use crate::{Point, State};

/// Which parts of the scheme are active.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Unlimited high-order scheme.
    Ho,
    /// First-order invariant-domain-preserving scheme.
    Lo,
    /// Bound-preserving blend.
    Bp,
    /// Bound-preserving blend with oscillation elimination.
    BpOe,
}

impl Mode {
    fn blends(self) -> bool {
        matches!(self, Mode::Bp | Mode::BpOe)
    }

    fn uses_lo(self) -> bool {
        self != Mode::Ho
    }

    fn uses_ho(self) -> bool {
        self != Mode::Lo
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub mode: Mode,
    pub cfl: f64,
    pub eps: EpsPolicy,
    pub c_kappa: [f64; 2],
    /// Multiplier on the sub-triangle Lax–Friedrichs coefficient.
    pub alpha_safety: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { mode: Mode::BpOe, cfl: 0.2, eps: EpsPolicy::HalfArea, c_kappa: [1.0, 1.0], alpha_safety: 1.0 }
    }
}

/// Point values (vertices then edge midpoints) and cell averages.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution<const M: usize> {
    pub points: Vec<State<M>>,
    pub averages: Vec<State<M>>,
}

impl<const M: usize> Solution<M> {
    pub fn constant(dofs: &DofMap, u: State<M>) -> Self {
        Solution { points: vec![u; dofs.n_points()], averages: vec![u; dofs.n_elements] }
    }

    /// Local coefficients (σ1..σ6, average) of element `k`.
    #[inline]
    pub fn coef(&self, dofs: &DofMap, k: usize) -> [State<M>; 7] {
        let d = &dofs.elem[k];
        [
            self.points[d[0]],
            self.points[d[1]],
            self.points[d[2]],
            self.points[d[3]],
            self.points[d[4]],
            self.points[d[5]],
            self.averages[k],
        ]
    }

    /// a·self + b·other.
    pub fn combine(&self, a: f64, other: &Solution<M>, b: f64) -> Solution<M> {
        let f = |x: &[State<M>], y: &[State<M>]| x.iter().zip(y).map(|(u, v)| u * a + v * b).collect();
        Solution { points: f(&self.points, &other.points), averages: f(&self.averages, &other.averages) }
    }

    pub fn iter(&self) -> impl Iterator<Item = &State<M>> {
        self.points.iter().chain(&self.averages)
    }

    /// Σ |K| ū_K.
    pub fn mass(&self, geo: &[ElementGeometry]) -> State<M> {
        self.averages.iter().zip(geo).fold(State::<M>::zeros(), |acc, (u, g)| acc + u * g.area)
    }
}

/// Limiter activity of one forward-Euler stage.
#[derive(Clone, Debug, Default)]
pub struct StageDiag {
    pub theta: Vec<f64>,
    pub eta_edge: Vec<f64>,
    pub eta_point: Vec<f64>,
    /// DoFs where the upwind weights fell back to arithmetic weights.
    pub weight_fallbacks: usize,
    /// Point DoFs reset to the low-order update after round-off left 𝒟.
    pub resets: usize,
    /// Elements whose high-order states were not admissible.
    pub invalid_elements: usize,
    /// Admissible step bound of the low-order scheme for this stage.
    pub cap: f64,
    /// Net flux out of the domain per component (rate of mass loss).
    pub boundary_flux: Vec<f64>,
}

struct EdgeData<const M: usize> {
    mom: [State<M>; 3],
    f_ho: State<M>,
    f_lo: State<M>,
    alpha_lo: f64,
    alpha_oe: f64,
    valid: bool,
    jumps: Option<EdgeJumps<M>>,
}

struct PointOut<const M: usize> {
    u: State<M>,
    eta: f64,
    fallback: bool,
    reset: bool,
}

struct ElemData<const M: usize> {
    phi_ho: [State<M>; 6],
    phi_lo: [State<M>; 6],
    asum: [f64; 6],
    g: [State<M>; 3],
    theta: f64,
    valid: bool,
}

pub struct Solver<Mo: Model<M>, const M: usize> {
    pub model: Mo,
    pub domain: Mo::Domain,
    pub mesh: Mesh,
    pub dofs: DofMap,
    pub geo: Vec<ElementGeometry>,
    pub sub: SubTriangulation,
    pub tab: Tables,
    pub bc: Vec<Option<BcKind<M>>>,
    pub opts: SolverOptions,
    /// Position of every point DoF.
    pub point_pos: Vec<Point>,
    areas: Vec<f64>,
    /// Derivative-jump stencils of the interior edges, built on first use.
    stencils: OnceLock<Vec<Vec<JumpStencil>>>,
}

#[inline]
fn lerp(a: Point, b: Point, t: f64) -> Point {
    [(1.0 - t) * a[0] + t * b[0], (1.0 - t) * a[1] + t * b[1]]
}

impl<Mo: Model<M>, const M: usize> Solver<Mo, M> {
    pub fn new(model: Mo, domain: Mo::Domain, mesh: Mesh, bcs: &BoundarySpec<M>, opts: SolverOptions) -> Result<Self> {
        if !(opts.cfl > 0.0 && opts.cfl <= 1.0) {
            return Err(Error::Config(format!("CFL must lie in (0, 1], got {}", opts.cfl)));
        }
        let geo = mesh.geometry()?;
        let dofs = build_dof_map(&mesh);
        let sub = sub_triangulate(&geo, &dofs);
        let bc = bcs.resolve(&mesh);
        let mut point_pos = vec![[0.0; 2]; dofs.n_points()];
        for (k, g) in geo.iter().enumerate() {
            for l in 0..6 {
                point_pos[dofs.elem[k][l]] = g.dof_pos[l];
            }
        }
        let areas = geo.iter().map(|g| g.area).collect();
        Ok(Solver { model, domain, mesh, dofs, geo, sub, tab: Tables::default(), bc, opts, point_pos, areas, stencils: OnceLock::new() })
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }

    /// CFL · min_K (2|K|/perimeter) / λ_K, with λ_K the largest wave
    /// speed over the element's DoF states and unit edge normals.
    pub fn compute_dt(&self, u: &Solution<M>) -> Result<f64> {
        let per: Vec<f64> = (0..self.geo.len())
            .into_par_iter()
            .map(|k| {
                let g = &self.geo[k];
                let c = u.coef(&self.dofs, k);
                let mut lam: f64 = 0.0;
                for (j, cj) in c.iter().enumerate() {
                    let x = if j < 6 { g.dof_pos[j] } else { g.centroid };
                    for n in &g.edge_normal {
                        lam = lam.max(self.model.wave_bound(cj, x, *n));
                    }
                }
                if !lam.is_finite() {
                    return Err(Error::NonFiniteWaveSpeed(k));
                }
                Ok(2.0 * g.area / g.perimeter / lam)
            })
            .collect::<Result<_>>()?;
        Ok(self.opts.cfl * per.into_iter().fold(f64::INFINITY, f64::min))
    }

    fn trace_points(&self, e: usize) -> (Point, Point, f64, Point) {
        let edge = &self.mesh.edges[e];
        let g = &self.geo[edge.left];
        let i = edge.left_local;
        (self.mesh.vertices[edge.v[0]], self.mesh.vertices[edge.v[1]], g.edge_len[i], g.edge_normal[i])
    }

    fn traces(&self, u: &Solution<M>, e: usize) -> Vec<State<M>> {
        let edge = &self.mesh.edges[e];
        let um = u.points[self.dofs.n_vertices + e];
        crate::spatial_ho::edge_traces(&self.tab, &u.points[edge.v[0]], &u.points[edge.v[1]], &um)
    }

    /// Common scaling factor of the boundary traces of element `k` toward
    /// its average.
    fn boundary_scale(&self, u: &Solution<M>, k: usize) -> f64 {
        let avg = &u.averages[k];
        let mut s: f64 = 1.0;
        for &e in &self.mesh.tri_edges[k] {
            if self.mesh.edges[e].is_boundary() {
                for v in self.traces(u, e) {
                    s = s.min(self.model.max_blend(avg, &v, &self.domain));
                }
            }
        }
        s
    }

    fn stencils(&self) -> &[Vec<JumpStencil>] {
        self.stencils.get_or_init(|| {
            (0..self.mesh.n_edges())
                .into_par_iter()
                .map(|e| {
                    let edge = &self.mesh.edges[e];
                    let Some(r) = edge.right else { return Vec::new() };
                    let n = self.trace_points(e).3;
                    jump_stencils(&self.tab, &self.geo[edge.left], edge.left_local, &self.geo[r], edge.right_local, n)
                })
                .collect()
        })
    }

    fn edge_pass(&self, u: &Solution<M>, e: usize, t: f64, gl: Option<&OeGlobals<M>>) -> Result<EdgeData<M>> {
        let edge = &self.mesh.edges[e];
        let (xa, xb, len, n) = self.trace_points(e);
        let xm = lerp(xa, xb, 0.5);
        let mode = self.opts.mode;
        let ul = &u.averages[edge.left];
        let mut valid = true;
        let mut mom = [State::<M>::zeros(); 3];
        let mut alpha_oe: f64 = 0.0;
        let mut jumps = None;
        let (f_lo, alpha_lo);
        match edge.right {
            Some(r) => {
                let ur = &u.averages[r];
                f_lo = llf_flux(&self.model, ul, ur, xm, n) * len;
                alpha_lo = self.model.wave_bound(ul, xm, n).max(self.model.wave_bound(ur, xm, n));
                if mode.uses_ho() {
                    let tr = self.traces(u, e);
                    let mut fl = Vec::with_capacity(tr.len());
                    for (q, uq) in tr.iter().enumerate() {
                        if !self.model.hyperbolic(uq) {
                            valid = false;
                            break;
                        }
                        let x = lerp(xa, xb, self.tab.edge.points[q]);
                        fl.push(self.model.flux_n(uq, x, n));
                        alpha_oe = alpha_oe.max(self.model.wave_bound(uq, x, n));
                    }
                    if valid {
                        mom = edge_moments(&self.tab, len, &fl);
                    }
                    if let (Some(_), true) = (gl, valid) {
                        let (cl, cr) = (u.coef(&self.dofs, edge.left), u.coef(&self.dofs, r));
                        let st = &self.stencils()[e];
                        jumps = Some(edge_jumps_with(&self.model, st, &self.tab.edge.weights, &cl, &cr, n));
                    }
                }
            }
            None => {
                let kind = self.bc[e].as_ref().expect("boundary edge has a condition");
                let ghost = ghost_state(&self.model, kind, ul, xm, n, t);
                if !self.model.hyperbolic(&ghost) {
                    return Err(Error::InvalidState(format!("boundary state at edge {e} is not admissible")));
                }
                f_lo = llf_flux(&self.model, ul, &ghost, xm, n) * len;
                alpha_lo = self.model.wave_bound(ul, xm, n).max(self.model.wave_bound(&ghost, xm, n));
                if mode.uses_ho() {
                    let mut tr = self.traces(u, e);
                    if mode.blends() {
                        let s = self.boundary_scale(u, edge.left);
                        if s < 1.0 {
                            for v in tr.iter_mut() {
                                *v = ul + (*v - ul) * s;
                            }
                        }
                    }
                    let mut fl = Vec::with_capacity(tr.len());
                    for (q, uq) in tr.iter().enumerate() {
                        if !self.model.hyperbolic(uq) {
                            return Err(Error::InvalidState(format!("boundary trace at edge {e} is not admissible")));
                        }
                        let x = lerp(xa, xb, self.tab.edge.points[q]);
                        let g = ghost_state(&self.model, kind, uq, x, n, t);
                        fl.push(boundary_flux(&self.model, kind, uq, &g, x, n));
                    }
                    mom = edge_moments(&self.tab, len, &fl);
                }
            }
        }
        let f_ho = mom[0] + mom[1] + mom[2];
        Ok(EdgeData { mom, f_ho, f_lo, alpha_lo, alpha_oe, valid, jumps })
    }

    fn elem_pass(
        &self,
        u: &Solution<M>,
        k: usize,
        edges: &[EdgeData<M>],
        dt: f64,
        gl: Option<&OeGlobals<M>>,
    ) -> Result<ElemData<M>> {
        let g = &self.geo[k];
        let coef = u.coef(&self.dofs, k);
        let mode = self.opts.mode;
        let mut phi_ho = [State::<M>::zeros(); 6];
        let mut valid = true;
        if mode.uses_ho() {
            match volume_term(&self.model, g, &coef, &self.tab) {
                Some(mut f) => {
                    for i in 0..3 {
                        let e = self.mesh.tri_edges[k][i];
                        let ed = &edges[e];
                        valid &= ed.valid;
                        let j = (i + 1) % 3;
                        if self.mesh.edges[e].left == k {
                            f[i] += ed.mom[0];
                            f[j] += ed.mom[1];
                            f[3 + i] += ed.mom[2];
                        } else {
                            f[i] -= ed.mom[1];
                            f[j] -= ed.mom[0];
                            f[3 + i] -= ed.mom[2];
                        }
                    }
                    if valid {
                        phi_ho = ho_residuals(&f, g.area).0;
                    }
                }
                None => valid = false,
            }
            if !valid && mode == Mode::Ho {
                return Err(Error::InvalidState(format!("high-order states of element {k} are not admissible")));
            }
        }
        let mut phi_lo = [State::<M>::zeros(); 6];
        let mut asum = [0.0; 6];
        let mut gk = [State::<M>::zeros(); 3];
        if mode.uses_lo() {
            let uc = centroid_value(&self.model, &coef, Some(&self.domain));
            let dual: [f64; 6] = std::array::from_fn(|l| self.sub.dual[self.dofs.elem[k][l]]);
            (phi_lo, asum) =
                lo_point_residuals(&self.model, g, &self.sub.normals[k], &coef, &uc, &dual, self.opts.alpha_safety);
            if mode.blends() {
                for i in 0..3 {
                    let xm = g.dof_pos[3 + i];
                    gk[i] = self.model.flux_n(&coef[6], xm, g.edge_normal[i]) * g.edge_len[i];
                }
                let mean = (gk[0] + gk[1] + gk[2]) / 3.0;
                for v in gk.iter_mut() {
                    *v -= mean;
                }
            }
        }
        let theta = match (mode, gl) {
            (Mode::BpOe, Some(gl)) if valid => {
                let mut terms = Vec::with_capacity(3);
                for i in 0..3 {
                    let e = self.mesh.tri_edges[k][i];
                    if let Some(j) = &edges[e].jumps {
                        let ell = g.height[i];
                        terms.push((edges[e].alpha_oe, damping_sigma(j, ell, self.opts.c_kappa, gl), ell));
                    }
                }
                oe_theta(&terms, dt)
            }
            _ if mode.blends() && !valid => 0.0,
            _ => 1.0,
        };
        Ok(ElemData { phi_ho, phi_lo, asum, g: gk, theta, valid })
    }

    fn stage_cap(&self, edges: &[EdgeData<M>], elems: &[ElemData<M>]) -> f64 {
        let pcap = (0..self.dofs.n_points())
            .into_par_iter()
            .map(|p| {
                let a: f64 = self.dofs.incident(p).iter().map(|&(k, l)| elems[k].asum[l]).sum();
                if a > 0.0 {
                    0.75 * self.sub.dual[p] / a
                } else {
                    f64::INFINITY
                }
            })
            .reduce(|| f64::INFINITY, f64::min);
        let ecap = (0..edges.len())
            .into_par_iter()
            .map(|e| {
                let edge = &self.mesh.edges[e];
                let (_, _, len, _) = self.trace_points(e);
                let a = edges[e].alpha_lo * len * 3.0;
                let mut area = self.geo[edge.left].area;
                if let Some(r) = edge.right {
                    area = area.min(self.geo[r].area);
                }
                if a > 0.0 {
                    area / a
                } else {
                    f64::INFINITY
                }
            })
            .reduce(|| f64::INFINITY, f64::min);
        pcap.min(ecap)
    }

    /// One forward-Euler step of the blended scheme at time `t`.
    pub fn forward_euler_step(&self, u: &Solution<M>, t: f64, dt: f64) -> Result<(Solution<M>, StageDiag)> {
        let mode = self.opts.mode;
        let gl = (mode == Mode::BpOe).then(|| oe_globals(&self.model, &u.points, &u.averages, &self.areas));
        let edges: Vec<EdgeData<M>> =
            (0..self.mesh.n_edges()).into_par_iter().map(|e| self.edge_pass(u, e, t, gl.as_ref())).collect::<Result<_>>()?;
        let elems: Vec<ElemData<M>> = (0..self.mesh.n_triangles())
            .into_par_iter()
            .map(|k| self.elem_pass(u, k, &edges, dt, gl.as_ref()))
            .collect::<Result<_>>()?;
        let cap = if mode.uses_lo() { self.stage_cap(&edges, &elems) } else { f64::INFINITY };
        if dt > cap * (1.0 + 1e-12) {
            return Err(Error::StepTooLarge { dt, cap });
        }

        let points: Vec<PointOut<M>> =
            (0..self.dofs.n_points()).into_par_iter().map(|p| self.point_update(u, p, &elems, dt)).collect::<Result<_>>()?;

        let eta_edge: Vec<f64> = (0..edges.len()).into_par_iter().map(|e| self.edge_eta(u, e, &edges, &elems, dt)).collect();
        let flux = |e: usize| {
            let (ed, eta) = (&edges[e], eta_edge[e]);
            if eta > 0.0 {
                ed.f_lo + (ed.f_ho - ed.f_lo) * eta
            } else {
                ed.f_lo
            }
        };
        let averages: Vec<State<M>> = (0..self.geo.len())
            .into_par_iter()
            .map(|k| {
                let mut acc = State::<M>::zeros();
                for &e in &self.mesh.tri_edges[k] {
                    let f = flux(e);
                    if self.mesh.edges[e].left == k {
                        acc += f;
                    } else {
                        acc -= f;
                    }
                }
                u.averages[k] - acc * (dt / self.geo[k].area)
            })
            .collect();

        let boundary_flux = self
            .mesh
            .edges
            .iter()
            .enumerate()
            .filter(|(_, ed)| ed.is_boundary())
            .fold(State::<M>::zeros(), |a, (e, _)| a + flux(e))
            .as_slice()
            .to_vec();
        let diag = StageDiag {
            theta: elems.iter().map(|e| e.theta).collect(),
            eta_edge,
            eta_point: points.iter().map(|p| p.eta).collect(),
            weight_fallbacks: points.iter().filter(|p| p.fallback).count(),
            resets: points.iter().filter(|p| p.reset).count(),
            invalid_elements: elems.iter().filter(|e| !e.valid).count(),
            cap,
            boundary_flux,
        };
        let next = Solution { points: points.into_iter().map(|p| p.u).collect(), averages };
        self.check_state(&next)?;
        Ok((next, diag))
    }

    fn point_update(&self, u: &Solution<M>, p: usize, elems: &[ElemData<M>], dt: f64) -> Result<PointOut<M>> {
        let inc = self.dofs.incident(p);
        let up = u.points[p];
        let mode = self.opts.mode;
        let mut fallback = false;
        let weights = if mode.uses_ho() {
            let normals: Vec<(Point, f64)> = inc
                .iter()
                .map(|&(k, l)| (self.geo[k].dof_normal[l], self.opts.eps.value(self.geo[k].area)))
                .collect();
            let (w, fb) = upwind_weights(&self.model, &up, self.point_pos[p], &normals);
            fallback = fb;
            w
        } else {
            Vec::new()
        };
        match mode {
            Mode::Ho => {
                let mut r = up;
                for (i, &(k, l)) in inc.iter().enumerate() {
                    r -= weights[i] * elems[k].phi_ho[l] * dt;
                }
                Ok(PointOut { u: r, eta: 1.0, fallback, reset: false })
            }
            Mode::Lo => {
                let r = inc.iter().fold(up, |acc, &(k, l)| acc - elems[k].phi_lo[l] * dt);
                Ok(PointOut { u: r, eta: 0.0, fallback: false, reset: false })
            }
            Mode::Bp | Mode::BpOe => {
                let u_lo = inc.iter().fold(up, |acc, &(k, l)| acc - elems[k].phi_lo[l] * dt);
                if !self.model.in_domain(&u_lo, &self.domain) {
                    return Err(Error::DomainViolation(format!(
                        "low-order update of point DoF {p} at {:?}: {:?}",
                        self.point_pos[p],
                        u_lo.as_slice()
                    )));
                }
                let nk = inc.len();
                let mut r = u_lo;
                let mut eta_min: f64 = 1.0;
                for (i, &(k, l)) in inc.iter().enumerate() {
                    let el = &elems[k];
                    let eta = if el.theta > 0.0 {
                        let dphi = weights[i] * el.phi_ho[l] - el.phi_lo[l];
                        let eta = bp_point_parameter(&self.model, &u_lo, nk, dt, &dphi, &self.domain).min(el.theta);
                        if eta > 0.0 {
                            r -= dphi * (eta * dt);
                        }
                        eta
                    } else {
                        0.0
                    };
                    eta_min = eta_min.min(eta);
                }
                if !self.model.in_domain(&r, &self.domain) {
                    // Round-off in the convex combination.
                    return Ok(PointOut { u: u_lo, eta: 0.0, fallback, reset: true });
                }
                Ok(PointOut { u: r, eta: eta_min, fallback, reset: false })
            }
        }
    }

    fn edge_eta(&self, u: &Solution<M>, e: usize, edges: &[EdgeData<M>], elems: &[ElemData<M>], dt: f64) -> f64 {
        match self.opts.mode {
            Mode::Ho => return 1.0,
            Mode::Lo => return 0.0,
            _ => {}
        }
        let edge = &self.mesh.edges[e];
        let ed = &edges[e];
        let l = edge.left;
        if !ed.valid || elems[l].theta == 0.0 {
            return 0.0;
        }
        let side = |k: usize, sign: f64, local: usize| {
            bp_edge_parameter(
                &self.model,
                &u.averages[k],
                sign,
                &ed.f_lo,
                &ed.f_ho,
                &elems[k].g[local],
                dt,
                self.geo[k].area,
                &self.domain,
            )
        };
        let mut eta = side(l, 1.0, edge.left_local).min(elems[l].theta);
        if let Some(r) = edge.right {
            if elems[r].theta == 0.0 {
                return 0.0;
            }
            eta = eta.min(elems[r].theta).min(side(r, -1.0, edge.right_local));
        }
        eta
    }

    /// Checks every DoF: membership in 𝒟 for limited and low-order runs,
    /// hyperbolicity for the unlimited scheme.
    pub fn check_state(&self, u: &Solution<M>) -> Result<()> {
        let strict = self.opts.mode.uses_lo();
        let bad = |v: &State<M>| if strict { !self.model.in_domain(v, &self.domain) } else { !self.model.hyperbolic(v) };
        if let Some(p) = u.points.iter().position(bad) {
            return Err(Error::DomainViolation(format!(
                "point DoF {p} at {:?}: {:?}",
                self.point_pos[p],
                u.points[p].as_slice()
            )));
        }
        if let Some(k) = u.averages.iter().position(bad) {
            return Err(Error::DomainViolation(format!(
                "average of element {k} at {:?}: {:?}",
                self.geo[k].centroid,
                u.averages[k].as_slice()
            )));
        }
        Ok(())
    }

    /// Upwind weights at every point DoF, for inspection.
    pub fn weights(&self, u: &Solution<M>, eps: EpsPolicy) -> (Vec<Vec<crate::Mat<M>>>, usize) {
        let all: Vec<(Vec<crate::Mat<M>>, bool)> = (0..self.dofs.n_points())
            .into_par_iter()
            .map(|p| {
                let normals: Vec<(Point, f64)> = self
                    .dofs
                    .incident(p)
                    .iter()
                    .map(|&(k, l)| (self.geo[k].dof_normal[l], eps.value(self.geo[k].area)))
                    .collect();
                upwind_weights(&self.model, &u.points[p], self.point_pos[p], &normals)
            })
            .collect();
        let fb = all.iter().filter(|a| a.1).count();
        (all.into_iter().map(|a| a.0).collect(), fb)
    }
}
