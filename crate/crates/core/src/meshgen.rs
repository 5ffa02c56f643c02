//! Simple mesh generators for tests, benchmarks and the `gen-mesh`
//! command: Delaunay triangulations of polygons seeded with a jittered
//! hexagonal lattice, and nested refinement by edge-midpoint splitting.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spade::{ConstrainedDelaunayTriangulation, Point2, Triangulation};

use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::Point;

fn inside(poly: &[Point], p: Point) -> bool {
    let mut c = false;
    let n = poly.len();
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        if (a[1] > p[1]) != (b[1] > p[1]) && p[0] < a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]) {
            c = !c;
        }
    }
    c
}

fn seg_dist(a: Point, b: Point, p: Point) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let l2 = d[0] * d[0] + d[1] * d[1];
    let t = (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / l2).clamp(0.0, 1.0);
    ((p[0] - a[0] - t * d[0]).powi(2) + (p[1] - a[1] - t * d[1]).powi(2)).sqrt()
}

/// Triangulates the simple polygon `corners` (counterclockwise or not)
/// with target edge length `h`. Interior nodes sit on a hexagonal lattice
/// moved by up to `jitter·h`. Boundary side `i` (from corner `i` to
/// `i + 1`) is tagged `i + 1`.
pub fn polygon(corners: &[Point], h: f64, jitter: f64, seed: u64) -> Result<Mesh> {
    if corners.len() < 3 || !(h > 0.0) || !(0.0..0.5).contains(&jitter) {
        return Err(Error::Config("polygon needs three corners, h > 0 and jitter in [0, 0.5)".into()));
    }
    let mut pts: Vec<Point> = Vec::new();
    let mut cons: Vec<[usize; 2]> = Vec::new();
    let mut tags: Vec<i32> = Vec::new();
    let n = corners.len();
    for i in 0..n {
        let (a, b) = (corners[i], corners[(i + 1) % n]);
        let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
        let m = (len / h).ceil().max(1.0) as usize;
        for j in 0..m {
            let t = j as f64 / m as f64;
            pts.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    let nb = pts.len();
    let mut side = 0;
    for i in 0..nb {
        if side + 1 < n && pts[i] == corners[side + 1] {
            side += 1;
        }
        cons.push([i, (i + 1) % nb]);
        tags.push(side as i32 + 1);
    }

    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in corners {
        for d in 0..2 {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dy = h * 3f64.sqrt() / 2.0;
    let ny = ((hi[1] - lo[1]) / dy).ceil() as usize + 1;
    let nx = ((hi[0] - lo[0]) / h).ceil() as usize + 2;
    for j in 0..ny {
        let y = lo[1] + j as f64 * dy;
        let off = if j % 2 == 1 { 0.5 * h } else { 0.0 };
        for i in 0..nx {
            let mut p = [lo[0] + off + i as f64 * h, y];
            if jitter > 0.0 {
                p[0] += rng.gen_range(-jitter..jitter) * h;
                p[1] += rng.gen_range(-jitter..jitter) * h;
            }
            if !inside(corners, p) {
                continue;
            }
            let d = (0..n).map(|s| seg_dist(corners[s], corners[(s + 1) % n], p)).fold(f64::INFINITY, f64::min);
            if d > 0.6 * h {
                pts.push(p);
            }
        }
    }

    let verts: Vec<Point2<f64>> = pts.iter().map(|p| Point2::new(p[0], p[1])).collect();
    let cdt = ConstrainedDelaunayTriangulation::<Point2<f64>>::bulk_load_cdt(verts, cons.clone())
        .map_err(|e| Error::InvalidMesh(format!("triangulation failed: {e:?}")))?;
    if cdt.num_vertices() != pts.len() {
        return Err(Error::InvalidMesh("duplicate mesh nodes".into()));
    }
    let mut tris = Vec::new();
    for f in cdt.inner_faces() {
        let v = f.vertices().map(|v| v.fix().index());
        let c = [
            (pts[v[0]][0] + pts[v[1]][0] + pts[v[2]][0]) / 3.0,
            (pts[v[0]][1] + pts[v[1]][1] + pts[v[2]][1]) / 3.0,
        ];
        if inside(corners, c) {
            tris.push(v);
        }
    }
    let mut lines: Vec<([usize; 2], i32)> = cons.into_iter().zip(tags).collect();
    // Three consecutive boundary nodes on a slanted side are collinear only
    // up to round-off and may enclose a sliver; drop it and tag the chord.
    let area = |t: &[usize; 3]| {
        let (a, b, c) = (pts[t[0]], pts[t[1]], pts[t[2]]);
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])).abs()
    };
    let mut kept = Vec::with_capacity(tris.len());
    for t in tris {
        if area(&t) > 1e-10 * h * h {
            kept.push(t);
            continue;
        }
        if let Some(m) = t.iter().position(|&v| v < nb && t.iter().all(|&w| w < nb && (w == v || w == (v + 1) % nb || (w + 1) % nb == v))) {
            lines.push(([t[(m + 1) % 3], t[(m + 2) % 3]], lines[t[m]].1));
        }
    }
    compact(pts, kept, lines)
}

/// Drops unused vertices and builds the mesh.
fn compact(pts: Vec<Point>, tris: Vec<[usize; 3]>, lines: Vec<([usize; 2], i32)>) -> Result<Mesh> {
    let mut map = vec![usize::MAX; pts.len()];
    let mut verts = Vec::new();
    for t in &tris {
        for &v in t {
            if map[v] == usize::MAX {
                map[v] = verts.len();
                verts.push(pts[v]);
            }
        }
    }
    let tris = tris.iter().map(|t| t.map(|v| map[v])).collect();
    let lines: Vec<_> = lines
        .into_iter()
        .filter(|(l, _)| map[l[0]] != usize::MAX && map[l[1]] != usize::MAX)
        .map(|(l, t)| ([map[l[0]], map[l[1]]], t))
        .collect();
    Mesh::from_triangles(verts, tris, &lines)
}

/// Rectangle [x0, x1] × [y0, y1]. Tags: 1 bottom, 2 right, 3 top, 4 left.
pub fn rectangle(x: [f64; 2], y: [f64; 2], h: f64, jitter: f64, seed: u64) -> Result<Mesh> {
    polygon(&[[x[0], y[0]], [x[1], y[0]], [x[1], y[1]], [x[0], y[1]]], h, jitter, seed)
}

/// Splits every triangle into four through its edge midpoints. Boundary
/// tags are inherited.
pub fn refine(mesh: &Mesh) -> Result<Mesh> {
    let nv = mesh.n_vertices();
    let mut verts = mesh.vertices.clone();
    let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
    for e in &mesh.edges {
        let (a, b) = (mesh.vertices[e.v[0]], mesh.vertices[e.v[1]]);
        mid.insert((e.v[0].min(e.v[1]), e.v[0].max(e.v[1])), verts.len());
        verts.push([0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]);
    }
    let m = |a: usize, b: usize| mid[&(a.min(b), a.max(b))];
    let mut tris = Vec::with_capacity(4 * mesh.n_triangles());
    for t in &mesh.triangles {
        let (a, b, c) = (t[0], t[1], t[2]);
        let (ab, bc, ca) = (m(a, b), m(b, c), m(c, a));
        tris.extend([[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
    }
    let mut lines = Vec::new();
    for e in mesh.edges.iter().filter(|e| e.is_boundary()) {
        let c = m(e.v[0], e.v[1]);
        lines.push(([e.v[0], c], e.tag));
        lines.push(([c, e.v[1]], e.tag));
    }
    debug_assert!(verts.len() >= nv);
    Mesh::from_triangles(verts, tris, &lines)
}

/// Repeated refinement.
pub fn refine_times(mesh: &Mesh, times: usize) -> Result<Mesh> {
    let mut m = mesh.clone();
    for _ in 0..times {
        m = refine(&m)?;
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_covers_domain() {
        let m = rectangle([0.0, 2.0], [0.0, 1.0], 0.1, 0.2, 1).unwrap();
        assert!((m.area() - 2.0).abs() < 1e-12);
        assert_eq!(m.reoriented, 0);
        let g = m.boundary_groups();
        assert_eq!(g.keys().copied().collect::<Vec<_>>(), vec![1, 2, 3, 4]);
        let len: f64 = g[&2].iter().map(|&e| {
            let e = &m.edges[e];
            let (a, b) = (m.vertices[e.v[0]], m.vertices[e.v[1]]);
            ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
        }).sum();
        assert!((len - 1.0).abs() < 1e-12);
        // Quality: no sliver triangles.
        for gk in m.geometry().unwrap() {
            assert!(gk.height.iter().cloned().fold(f64::INFINITY, f64::min) > 0.02);
        }
    }

    #[test]
    fn nonconvex_polygon_and_refinement() {
        let l = [[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]];
        let m = polygon(&l, 0.2, 0.1, 3).unwrap();
        assert!((m.area() - 3.0).abs() < 1e-12);
        let r = refine(&m).unwrap();
        assert_eq!(r.n_triangles(), 4 * m.n_triangles());
        assert!((r.area() - 3.0).abs() < 1e-12);
        assert_eq!(r.n_boundary_edges(), 2 * m.n_boundary_edges());
        assert_eq!(r.boundary_groups().len(), 6);
        assert!((r.h_max() - 0.5 * m.h_max()).abs() < 1e-12);
    }

    #[test]
    fn deterministic() {
        let a = rectangle([0.0, 1.0], [0.0, 1.0], 0.1, 0.3, 7).unwrap();
        let b = rectangle([0.0, 1.0], [0.0, 1.0], 0.1, 0.3, 7).unwrap();
        assert_eq!(a.vertices, b.vertices);
        assert_eq!(a.triangles, b.triangles);
    }
}
