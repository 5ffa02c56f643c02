//! Problem setup from a configuration, the run driver and the
//! convergence study.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use super::config::{BoundaryKind, CustomModel, RunConfig};
use super::output::{limited_edge_clustering, write_diagnostics, write_vtk, Journal, OutputFields};
use super::problems::{builtin, Geometry, Problem, ProblemDef};
use super::sample::{error_norms, sample_initial_condition, ErrorNorms};
use crate::boundary::{BcKind, BoundarySpec, FarField};
use crate::error::{Error, Result};
use crate::mesh::{load_gmsh, Mesh};
use crate::meshgen::{polygon, refine_times};
use crate::models::{Euler, EulerDomain, Model, ScalarDomain, ScalarModel, VelocityField};
use crate::timeloop::{Solution, Solver, StageDiag, StepReport};
use crate::State;

/// Builds the problem named in the configuration, with its overrides
/// (final time, invariant domain, boundary tags) applied.
pub fn resolve_problem(cfg: &RunConfig) -> Result<Problem> {
    let mut p = if cfg.problem.id == "custom" { custom(cfg)? } else { builtin(&cfg.problem.id, cfg.solver.gamma)? };
    let tags = cfg.boundary_tags()?;
    let d = &cfg.domain;
    match &mut p {
        Problem::Scalar(def) => {
            if let Some(t) = cfg.problem.t_end {
                def.t_end = t;
            }
            def.domain.min = d.min.unwrap_or(def.domain.min);
            def.domain.max = d.max.unwrap_or(def.domain.max);
            apply_tags(&mut def.bc, &def.far_field, &tags);
        }
        Problem::Euler(def) => {
            if let Some(t) = cfg.problem.t_end {
                def.t_end = t;
            }
            def.domain.rho_min = d.rho_min.unwrap_or(def.domain.rho_min);
            def.domain.p_min = d.p_min.unwrap_or(def.domain.p_min);
            def.domain.upper = d.upper.unwrap_or(def.domain.upper);
            apply_tags(&mut def.bc, &def.far_field, &tags);
        }
    }
    Ok(p)
}

fn apply_tags<const M: usize>(
    bc: &mut BoundarySpec<M>,
    far: &FarField<M>,
    tags: &std::collections::BTreeMap<i32, BoundaryKind>,
) {
    for (&t, &k) in tags {
        let kind = match k {
            BoundaryKind::FarField => BcKind::FarField(far.clone()),
            BoundaryKind::Outflow => BcKind::Outflow,
            BoundaryKind::Wall => BcKind::Wall,
        };
        bc.by_tag.insert(t, kind);
    }
}

fn custom(cfg: &RunConfig) -> Result<Problem> {
    let p = &cfg.problem;
    let model = p.model.ok_or_else(|| Error::Config("custom problems need `model`".into()))?;
    let state = p.state.clone().unwrap_or_default();
    let corners: Vec<[f64; 2]> = p.corners.clone().unwrap_or_default();
    let diam = corners
        .iter()
        .flat_map(|a| corners.iter().map(move |b| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()))
        .fold(0.0, f64::max);
    let geometry = Geometry { corners, h: if diam > 0.0 { diam / 20.0 } else { 1.0 } };
    let t_end = p.t_end.unwrap_or(1.0);
    Ok(match model {
        CustomModel::Linear | CustomModel::Kpp => {
            let m = if model == CustomModel::Kpp {
                ScalarModel::Kpp
            } else {
                ScalarModel::Linear(VelocityField::Constant(p.velocity.unwrap_or([1.0, 0.0])))
            };
            let u = State::<1>::new(state[0]);
            let far = FarField::Constant(u);
            Problem::Scalar(ProblemDef {
                name: "custom".into(),
                model: m,
                domain: ScalarDomain { min: state[0] - 1.0, max: state[0] + 1.0 },
                initial: Arc::new(move |_| u),
                exact: Some(Arc::new(move |_, _| u)),
                bc: BoundarySpec::uniform(BcKind::FarField(far.clone())),
                far_field: far,
                t_end,
                geometry,
            })
        }
        CustomModel::Euler => {
            let e = Euler::new(cfg.solver.gamma);
            let u = e.conserved(state[0], state[1], state[2], state[3]);
            let far = FarField::Constant(u);
            Problem::Euler(ProblemDef {
                name: "custom".into(),
                model: e,
                domain: EulerDomain::default(),
                initial: Arc::new(move |_| u),
                exact: Some(Arc::new(move |_, _| u)),
                bc: BoundarySpec::uniform(BcKind::FarField(far.clone())),
                far_field: far,
                t_end,
                geometry,
            })
        }
    })
}

/// Loads the configured mesh file or generates one for `geometry`.
pub fn build_mesh(cfg: &RunConfig, geometry: &Geometry) -> Result<Mesh> {
    let m = &cfg.mesh;
    let base = match &m.path {
        Some(p) => load_gmsh(p)?,
        None => polygon(&geometry.corners, m.h.unwrap_or(geometry.h), m.jitter.unwrap_or(0.25), m.seed.unwrap_or(1))?,
    };
    refine_times(&base, m.refine.unwrap_or(0))
}

/// Outcome of a run.
#[derive(Clone, Debug)]
pub struct RunSummary {
    pub problem: String,
    pub elements: usize,
    pub points: usize,
    pub h: f64,
    pub steps: usize,
    pub t: f64,
    /// Largest relative change of Σ|K|ū over the components.
    pub mass_drift: f64,
    pub min: [f64; 2],
    pub max: [f64; 2],
    pub field_names: [&'static str; 2],
    pub rejections: usize,
    pub errors: Option<ErrorNorms>,
    /// Limited edges in the last stage and the fraction of them next to
    /// another limited edge.
    pub limited_edges: (usize, f64),
    /// Same for edges with η < 0.5.
    pub strong_edges: (usize, f64),
    pub outputs: Vec<PathBuf>,
    pub seconds: f64,
}

impl RunSummary {
    pub fn describe(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "problem       {}", self.problem);
        let _ = writeln!(s, "mesh          {} elements, {} point DoFs, h = {:.4e}", self.elements, self.points, self.h);
        let _ = writeln!(s, "time          t = {} after {} steps ({} rejected), {:.2} s", self.t, self.steps, self.rejections, self.seconds);
        for c in 0..2 {
            if c == 1 && self.field_names[1] == self.field_names[0] {
                break;
            }
            let _ = writeln!(s, "range {:<7} [{:.6e}, {:.6e}]", self.field_names[c], self.min[c], self.max[c]);
        }
        let _ = writeln!(s, "mass drift    {:.3e}", self.mass_drift);
        let _ = writeln!(s, "limited edges {} ({:.1}% clustered)", self.limited_edges.0, 100.0 * self.limited_edges.1);
        let _ = writeln!(s, "  eta < 0.5   {} ({:.1}% clustered)", self.strong_edges.0, 100.0 * self.strong_edges.1);
        if let Some(e) = &self.errors {
            let _ = writeln!(s, "errors (avg)  L1 {:.4e}  L2 {:.4e}  Linf {:.4e}", e.internal.l1, e.internal.l2, e.internal.linf);
            let _ = writeln!(s, "errors (pts)  L1 {:.4e}  L2 {:.4e}  Linf {:.4e}", e.boundary.l1, e.boundary.l2, e.boundary.linf);
        }
        s
    }
}

/// Final state of a run together with its solver.
pub struct RunResult<Mo: Model<M>, const M: usize> {
    pub solver: Solver<Mo, M>,
    pub solution: Solution<M>,
    pub reports: Vec<StepReport>,
    pub last_stage: Option<StageDiag>,
    pub summary: RunSummary,
}

fn relative_mass_drift<const M: usize>(geo: &[crate::ElementGeometry], a: &Solution<M>, b: &Solution<M>) -> f64 {
    let (ma, mb) = (a.mass(geo), b.mass(geo));
    (0..M)
        .map(|c| {
            let scale: f64 = a.averages.iter().zip(geo).map(|(u, g)| u[c].abs() * g.area).sum();
            if scale > 0.0 {
                (mb[c] - ma[c]).abs() / scale
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max)
}

/// Runs one problem definition on `mesh`. Output files go to `out` when
/// given.
pub fn run_definition<Mo: OutputFields<M>, const M: usize>(
    def: &ProblemDef<Mo, M>,
    mesh: Mesh,
    cfg: &RunConfig,
    out: Option<&Path>,
) -> Result<RunResult<Mo, M>> {
    let start = Instant::now();
    let solver = Solver::new(def.model.clone(), def.domain.clone(), mesh, &def.bc, cfg.solver.options())?;
    let u0 = sample_initial_condition(&solver, &*def.initial)?;
    let mut outputs = Vec::new();
    let mut journal = None;
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        if cfg.output.journal {
            let p = dir.join("journal.csv");
            journal = Some(Journal::create(&p, Mo::REPORT_NAMES)?);
            outputs.push(p);
        }
    }
    let name = def.name.clone();
    let mut io_err: Option<Error> = None;
    let mut last_stage = None;
    let log_every = cfg.output.log_every;
    let every = cfg.output.every;
    let (u, reports) = solver.run(u0.clone(), def.t_end, |r, u, d| {
        if log_every > 0 && r.step % log_every == 0 {
            println!(
                "step {:>6}  t {:.6e}  dt {:.3e}  {} [{:.4e}, {:.4e}]  damped {}  limited edges {}  points {}",
                r.step, r.t, r.dt, Mo::REPORT_NAMES[0], r.min[0], r.max[0], r.damped_elements, r.limited_edges, r.limited_points
            );
        }
        if let Some(j) = journal.as_mut() {
            if let Err(e) = j.record(r) {
                io_err.get_or_insert(e);
            }
        }
        if let (Some(dir), true) = (out, every > 0 && cfg.output.vtk && r.step % every == 0) {
            match write_vtk(&solver.model, &solver.mesh, &solver.dofs, &solver.point_pos, u, &dir.join(format!("{name}_{:06}", r.step))) {
                Ok(p) => outputs.extend(p),
                Err(e) => {
                    io_err.get_or_insert(e);
                }
            }
        }
        last_stage = Some(d.clone());
    })?;
    if let Some(e) = io_err {
        return Err(e);
    }
    let errors = def.exact.as_ref().map(|ex| error_norms(&solver, &u, &|x| ex(x, def.t_end), 0));
    let clustering = |below| last_stage.as_ref().map_or((0, 1.0), |d| limited_edge_clustering(&solver.mesh, &d.eta_edge, below));
    let (limited_edges, strong_edges) = (clustering(1.0), clustering(0.5));
    if let Some(dir) = out {
        if cfg.output.vtk {
            outputs.extend(write_vtk(&solver.model, &solver.mesh, &solver.dofs, &solver.point_pos, &u, &dir.join(format!("{name}_final")))?);
        }
        if let (true, Some(d)) = (cfg.output.diagnostics, &last_stage) {
            let c: Vec<_> = solver.geo.iter().map(|g| g.centroid).collect();
            write_diagnostics(dir, &solver.mesh, &solver.point_pos, &c, d)?;
            outputs.extend(["eta_edges.csv", "eta_points.csv", "theta.csv"].map(|f| dir.join(f)));
        }
    }
    let (min, max) = solver.field_range(&u);
    let summary = RunSummary {
        problem: name,
        elements: solver.mesh.n_triangles(),
        points: solver.dofs.n_points(),
        h: solver.mesh.h_max(),
        steps: reports.len(),
        t: reports.last().map_or(0.0, |r| r.t),
        mass_drift: relative_mass_drift(&solver.geo, &u0, &u),
        min,
        max,
        field_names: Mo::REPORT_NAMES,
        rejections: reports.iter().map(|r| r.rejections).sum(),
        errors,
        limited_edges,
        strong_edges,
        outputs,
        seconds: start.elapsed().as_secs_f64(),
    };
    Ok(RunResult { solver, solution: u, reports, last_stage, summary })
}

/// Runs the configured problem, writing outputs to the configured
/// directory.
pub fn run(cfg: &RunConfig) -> Result<RunSummary> {
    let p = resolve_problem(cfg)?;
    let mesh = build_mesh(cfg, p.geometry())?;
    let dir = cfg.output_dir();
    Ok(match &p {
        Problem::Scalar(d) => run_definition(d, mesh, cfg, Some(&dir))?.summary,
        Problem::Euler(d) => run_definition(d, mesh, cfg, Some(&dir))?.summary,
    })
}

/// Errors on a sequence of meshes and the observed orders.
#[derive(Clone, Debug, Default)]
pub struct ConvergenceTable {
    pub h: Vec<f64>,
    pub elements: Vec<usize>,
    pub errors: Vec<ErrorNorms>,
}

/// Column order of [`ConvergenceTable::errors_flat`].
pub const CONVERGENCE_COLUMNS: [&str; 6] =
    ["L1_internal", "L1_boundary", "L2_internal", "L2_boundary", "Linf_internal", "Linf_boundary"];

impl ConvergenceTable {
    pub fn errors_flat(&self, i: usize) -> [f64; 6] {
        let e = &self.errors[i];
        [e.internal.l1, e.boundary.l1, e.internal.l2, e.boundary.l2, e.internal.linf, e.boundary.linf]
    }

    /// Order between levels `i` and `i + 1`; `None` when undefined.
    pub fn orders(&self, i: usize) -> [Option<f64>; 6] {
        let (a, b) = (self.errors_flat(i), self.errors_flat(i + 1));
        let r = (self.h[i] / self.h[i + 1]).ln();
        std::array::from_fn(|c| {
            let o = (a[c] / b[c]).ln() / r;
            (a[c] > 0.0 && b[c] > 0.0 && o.is_finite()).then_some(o)
        })
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("h,elements");
        for c in CONVERGENCE_COLUMNS {
            let _ = write!(s, ",{c},{c}_rate");
        }
        s.push('\n');
        for i in 0..self.h.len() {
            let _ = write!(s, "{:.6e},{}", self.h[i], self.elements[i]);
            let e = self.errors_flat(i);
            let o = if i == 0 { [None; 6] } else { self.orders(i - 1) };
            for c in 0..6 {
                let rate = o[c].map_or("NA".to_string(), |v| format!("{v:.4}"));
                let _ = write!(s, ",{:.6e},{}", e[c], rate);
            }
            s.push('\n');
        }
        s
    }
}

/// Runs the configured problem on each mesh and measures the errors
/// against its exact solution.
pub fn convergence(cfg: &RunConfig, meshes: Vec<Mesh>) -> Result<ConvergenceTable> {
    if meshes.len() < 3 {
        return Err(Error::Config(format!("a convergence study needs at least 3 meshes, got {}", meshes.len())));
    }
    let p = resolve_problem(cfg)?;
    let mut t = ConvergenceTable::default();
    for mesh in meshes {
        t.h.push(mesh.h_max());
        t.elements.push(mesh.n_triangles());
        let e = match &p {
            Problem::Scalar(d) => run_definition(d, mesh, cfg, None)?.summary.errors,
            Problem::Euler(d) => run_definition(d, mesh, cfg, None)?.summary.errors,
        };
        t.errors.push(e.ok_or_else(|| Error::Config(format!("problem `{}` has no exact solution", p.name())))?);
    }
    Ok(t)
}
