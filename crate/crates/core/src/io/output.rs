//! Legacy ASCII VTK and CSV output.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::mesh::{DofMap, Mesh};
use crate::models::{Euler, Model, ScalarModel};
use crate::timeloop::{Solution, StageDiag, StepReport};
use crate::{Point, State};

/// Named scalar fields written for every DoF.
pub trait OutputFields<const M: usize>: Model<M> {
    fn field_names(&self) -> Vec<&'static str>;
    fn field_values(&self, u: &State<M>) -> Vec<f64>;
}

impl OutputFields<1> for ScalarModel {
    fn field_names(&self) -> Vec<&'static str> {
        vec!["u"]
    }

    fn field_values(&self, u: &State<1>) -> Vec<f64> {
        vec![u[0]]
    }
}

impl OutputFields<4> for Euler {
    fn field_names(&self) -> Vec<&'static str> {
        vec!["rho", "momentum_x", "momentum_y", "energy", "pressure", "speed", "mach"]
    }

    fn field_values(&self, u: &State<4>) -> Vec<f64> {
        let [rho, vx, vy, p] = self.primitive(u);
        let speed = (vx * vx + vy * vy).sqrt();
        vec![u[0], u[1], u[2], u[3], p, speed, speed / (self.gamma * p / rho).sqrt()]
    }
}

fn header(out: &mut String, title: &str, pts: &[Point]) {
    out.push_str("# vtk DataFile Version 3.0\n");
    out.push_str(title);
    out.push_str("\nASCII\nDATASET UNSTRUCTURED_GRID\n");
    let _ = writeln!(out, "POINTS {} double", pts.len());
    for p in pts {
        let _ = writeln!(out, "{:.16e} {:.16e} 0", p[0], p[1]);
    }
}

fn data_block(out: &mut String, names: &[&str], rows: &[Vec<f64>]) {
    for (c, name) in names.iter().enumerate() {
        let _ = writeln!(out, "SCALARS {name} double 1\nLOOKUP_TABLE default");
        for r in rows {
            let _ = writeln!(out, "{:.16e}", r[c]);
        }
    }
}

/// Linear triangles carrying the averages as cell data.
pub fn vtk_averages<Mo: OutputFields<M>, const M: usize>(model: &Mo, mesh: &Mesh, u: &Solution<M>) -> String {
    let mut s = String::new();
    header(&mut s, "pampa cell averages", &mesh.vertices);
    let nt = mesh.n_triangles();
    let _ = writeln!(s, "CELLS {} {}", nt, 4 * nt);
    for t in &mesh.triangles {
        let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
    }
    let _ = writeln!(s, "CELL_TYPES {nt}");
    for _ in 0..nt {
        s.push_str("5\n");
    }
    let _ = writeln!(s, "CELL_DATA {nt}");
    let rows: Vec<Vec<f64>> = u.averages.iter().map(|v| model.field_values(v)).collect();
    data_block(&mut s, &model.field_names(), &rows);
    s
}

/// Six-node quadratic triangles carrying the point values.
pub fn vtk_points<Mo: OutputFields<M>, const M: usize>(
    model: &Mo,
    dofs: &DofMap,
    pos: &[Point],
    u: &Solution<M>,
) -> String {
    let mut s = String::new();
    header(&mut s, "pampa point values", pos);
    let nt = dofs.n_elements;
    let _ = writeln!(s, "CELLS {} {}", nt, 7 * nt);
    for d in &dofs.elem {
        let _ = writeln!(s, "6 {} {} {} {} {} {}", d[0], d[1], d[2], d[3], d[4], d[5]);
    }
    let _ = writeln!(s, "CELL_TYPES {nt}");
    for _ in 0..nt {
        s.push_str("22\n");
    }
    let _ = writeln!(s, "POINT_DATA {}", pos.len());
    let rows: Vec<Vec<f64>> = u.points.iter().map(|v| model.field_values(v)).collect();
    data_block(&mut s, &model.field_names(), &rows);
    s
}

/// Writes `<stem>_avg.vtk` and `<stem>_pts.vtk`.
pub fn write_vtk<Mo: OutputFields<M>, const M: usize>(
    model: &Mo,
    mesh: &Mesh,
    dofs: &DofMap,
    pos: &[Point],
    u: &Solution<M>,
    stem: &Path,
) -> Result<[PathBuf; 2]> {
    let name = stem.file_name().and_then(|n| n.to_str()).unwrap_or("solution");
    let a = stem.with_file_name(format!("{name}_avg.vtk"));
    let p = stem.with_file_name(format!("{name}_pts.vtk"));
    fs::write(&a, vtk_averages(model, mesh, u))?;
    fs::write(&p, vtk_points(model, dofs, pos, u))?;
    Ok([a, p])
}

/// Data arrays of a legacy ASCII file written by this module, by name.
pub fn read_vtk_arrays(text: &str) -> Result<BTreeMap<String, Vec<f64>>> {
    let mut out = BTreeMap::new();
    let mut lines = text.lines().enumerate();
    let mut count = 0usize;
    while let Some((_, l)) = lines.next() {
        let w: Vec<&str> = l.split_whitespace().collect();
        match w.first() {
            Some(&"CELL_DATA") | Some(&"POINT_DATA") => {
                count = w.get(1).and_then(|c| c.parse().ok()).unwrap_or(0);
            }
            Some(&"SCALARS") => {
                let name = w.get(1).copied().unwrap_or_default().to_string();
                lines.next();
                let mut v = Vec::with_capacity(count);
                for _ in 0..count {
                    let (i, l) = lines.next().ok_or(Error::Parse { line: 0, msg: "truncated data".into() })?;
                    v.push(l.trim().parse().map_err(|_| Error::Parse { line: i + 1, msg: format!("bad value `{l}`") })?);
                }
                out.insert(name, v);
            }
            _ => {}
        }
    }
    Ok(out)
}

/// Step-by-step CSV journal.
pub struct Journal {
    file: fs::File,
}

impl Journal {
    pub fn create(path: &Path, names: [&str; 2]) -> Result<Self> {
        let mut file = fs::File::create(path)?;
        writeln!(
            file,
            "step,t,dt,min_{0},max_{0},min_{1},max_{1},damped_elements,limited_edges,limited_points,weight_fallbacks,resets,rejections,outflow_{0}",
            names[0], names[1]
        )?;
        Ok(Journal { file })
    }

    pub fn record(&mut self, r: &StepReport) -> Result<()> {
        writeln!(
            self.file,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{},{},{},{},{},{:.16e}",
            r.step,
            r.t,
            r.dt,
            r.min[0],
            r.max[0],
            r.min[1],
            r.max[1],
            r.damped_elements,
            r.limited_edges,
            r.limited_points,
            r.weight_fallbacks,
            r.resets,
            r.rejections,
            r.outflow[0]
        )?;
        Ok(())
    }
}

/// Limiter fields of one stage: η per edge (at midpoints), η per point
/// DoF and θ per element (at centroids).
pub fn write_diagnostics(dir: &Path, mesh: &Mesh, pos: &[Point], centroids: &[Point], d: &StageDiag) -> Result<()> {
    let mut s = String::from("x,y,eta\n");
    for (e, eta) in mesh.edges.iter().zip(&d.eta_edge) {
        let (a, b) = (mesh.vertices[e.v[0]], mesh.vertices[e.v[1]]);
        let _ = writeln!(s, "{:.10e},{:.10e},{:.16e}", 0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), eta);
    }
    fs::write(dir.join("eta_edges.csv"), s)?;
    let mut s = String::from("x,y,eta\n");
    for (p, eta) in pos.iter().zip(&d.eta_point) {
        let _ = writeln!(s, "{:.10e},{:.10e},{:.16e}", p[0], p[1], eta);
    }
    fs::write(dir.join("eta_points.csv"), s)?;
    let mut s = String::from("x,y,theta\n");
    for (c, th) in centroids.iter().zip(&d.theta) {
        let _ = writeln!(s, "{:.10e},{:.10e},{:.16e}", c[0], c[1], th);
    }
    fs::write(dir.join("theta.csv"), s)?;
    Ok(())
}

/// Number of edges with η < `below` and the fraction of them that share an
/// element with another such edge.
pub fn limited_edge_clustering(mesh: &Mesh, eta_edge: &[f64], below: f64) -> (usize, f64) {
    let limited = |e: usize| eta_edge[e] < below;
    let mut n = 0;
    let mut clustered = 0;
    for (e, edge) in mesh.edges.iter().enumerate() {
        if !limited(e) {
            continue;
        }
        n += 1;
        let near = std::iter::once(edge.left)
            .chain(edge.right)
            .flat_map(|k| mesh.tri_edges[k])
            .any(|o| o != e && limited(o));
        if near {
            clustered += 1;
        }
    }
    (n, if n == 0 { 1.0 } else { clustered as f64 / n as f64 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_dof_map;

    fn one() -> (Mesh, DofMap, Vec<Point>) {
        let m = Mesh::from_triangles(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0, 1, 2]], &[]).unwrap();
        let d = build_dof_map(&m);
        let g = m.geometry().unwrap();
        let mut pos = vec![[0.0; 2]; d.n_points()];
        for l in 0..6 {
            pos[d.elem[0][l]] = g[0].dof_pos[l];
        }
        (m, d, pos)
    }

    #[test]
    fn golden_single_element() {
        let (m, d, _) = one();
        let u = Solution { points: vec![State::<1>::new(0.5); 6], averages: vec![State::<1>::new(0.25)] };
        let s = vtk_averages(&ScalarModel::Kpp, &m, &u);
        let want = "# vtk DataFile Version 3.0\npampa cell averages\nASCII\nDATASET UNSTRUCTURED_GRID\n\
POINTS 3 double\n0.0000000000000000e0 0.0000000000000000e0 0\n1.0000000000000000e0 0.0000000000000000e0 0\n\
0.0000000000000000e0 1.0000000000000000e0 0\nCELLS 1 4\n3 0 1 2\nCELL_TYPES 1\n5\nCELL_DATA 1\n\
SCALARS u double 1\nLOOKUP_TABLE default\n2.5000000000000000e-1\n";
        assert_eq!(s, want);
        assert_eq!(d.elem[0], [0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn point_file_round_trip() {
        let (_, d, pos) = one();
        let e = Euler::default();
        let pts: Vec<State<4>> =
            (0..6).map(|i| e.conserved(1.0 + 0.1 * i as f64, 0.3, -0.2 / 3.0, 1.0 / 7.0)).collect();
        let u = Solution { points: pts.clone(), averages: vec![pts[0]] };
        let text = vtk_points(&e, &d, &pos, &u);
        assert!(text.contains("CELL_TYPES 1\n22\n"));
        let arr = read_vtk_arrays(&text).unwrap();
        for (i, p) in pts.iter().enumerate() {
            assert_eq!(arr["rho"][i], p[0]);
            assert_eq!(arr["energy"][i], p[3]);
            assert_eq!(arr["pressure"][i], e.pressure(p));
        }
    }

    #[test]
    fn constant_field_gives_constant_arrays() {
        let (m, d, pos) = one();
        let u = Solution { points: vec![State::<1>::new(2.0); 6], averages: vec![State::<1>::new(2.0)] };
        let a = read_vtk_arrays(&vtk_averages(&ScalarModel::Kpp, &m, &u)).unwrap();
        let p = read_vtk_arrays(&vtk_points(&ScalarModel::Kpp, &d, &pos, &u)).unwrap();
        assert!(a["u"].iter().chain(&p["u"]).all(|&v| v == 2.0));
        assert_eq!(p["u"].len(), 6);
    }
}
