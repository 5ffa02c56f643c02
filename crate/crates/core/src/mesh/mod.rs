//! Triangular meshes, global DoF numbering, element geometry and the
//! six-triangle sub-division used by the low-order scheme.

mod gmsh;

pub use gmsh::{load_gmsh, parse_gmsh, write_msh22};

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::Point;

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    /// End points in the local order of the left element.
    pub v: [usize; 2],
    pub left: usize,
    pub left_local: usize,
    pub right: Option<usize>,
    pub right_local: usize,
    /// Physical tag; 0 for untagged or interior edges.
    pub tag: i32,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.right.is_none()
    }
}

#[derive(Clone, Debug)]
pub struct Mesh {
    pub vertices: Vec<Point>,
    /// Counterclockwise vertex triplets.
    pub triangles: Vec<[usize; 3]>,
    pub edges: Vec<Edge>,
    /// Local edge `i` of a triangle joins its vertices `i` and `i + 1`.
    pub tri_edges: Vec<[usize; 3]>,
    /// Number of triangles that were given clockwise and flipped.
    pub reoriented: usize,
}

fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
}

impl Mesh {
    /// Builds a mesh from vertex coordinates, triangles and tagged boundary
    /// segments. Clockwise triangles are flipped.
    pub fn from_triangles(
        vertices: Vec<Point>,
        mut triangles: Vec<[usize; 3]>,
        lines: &[([usize; 2], i32)],
    ) -> Result<Mesh> {
        let nv = vertices.len();
        if triangles.is_empty() {
            return Err(Error::InvalidMesh("no triangles".into()));
        }
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in &vertices {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        let bbox = (hi[0] - lo[0]) * (hi[1] - lo[1]);
        let mut reoriented = 0;
        for (k, t) in triangles.iter_mut().enumerate() {
            if t.iter().any(|&v| v >= nv) {
                return Err(Error::Index(format!("triangle {k} references a missing vertex")));
            }
            let a = signed_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
            if !(a.abs() >= 1e-14 * bbox) {
                return Err(Error::DegenerateElement(k));
            }
            if a < 0.0 {
                t.swap(1, 2);
                reoriented += 1;
            }
        }
        let mut map: HashMap<(usize, usize), usize> = HashMap::with_capacity(triangles.len() * 2);
        let mut edges: Vec<Edge> = Vec::with_capacity(triangles.len() * 2);
        let mut tri_edges = vec![[0usize; 3]; triangles.len()];
        for (k, t) in triangles.iter().enumerate() {
            for i in 0..3 {
                let (a, b) = (t[i], t[(i + 1) % 3]);
                let key = (a.min(b), a.max(b));
                match map.get(&key) {
                    None => {
                        map.insert(key, edges.len());
                        tri_edges[k][i] = edges.len();
                        edges.push(Edge { v: [a, b], left: k, left_local: i, right: None, right_local: 0, tag: 0 });
                    }
                    Some(&e) => {
                        let edge = &mut edges[e];
                        if edge.right.is_some() || edge.v != [b, a] {
                            return Err(Error::InvalidMesh(format!("edge ({a}, {b}) is not shared consistently")));
                        }
                        edge.right = Some(k);
                        edge.right_local = i;
                        tri_edges[k][i] = e;
                    }
                }
            }
        }
        for &(l, tag) in lines {
            if l[0] >= nv || l[1] >= nv {
                return Err(Error::Index("boundary line references a missing vertex".into()));
            }
            if let Some(&e) = map.get(&(l[0].min(l[1]), l[0].max(l[1]))) {
                if edges[e].right.is_none() {
                    edges[e].tag = tag;
                }
            }
        }
        Ok(Mesh { vertices, triangles, edges, tri_edges, reoriented })
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_boundary_edges(&self) -> usize {
        self.edges.iter().filter(|e| e.is_boundary()).count()
    }

    /// Boundary edges grouped by tag.
    pub fn boundary_groups(&self) -> BTreeMap<i32, Vec<usize>> {
        let mut g: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
        for (i, e) in self.edges.iter().enumerate().filter(|(_, e)| e.is_boundary()) {
            g.entry(e.tag).or_default().push(i);
        }
        g
    }

    pub fn geometry(&self) -> Result<Vec<ElementGeometry>> {
        (0..self.n_triangles()).map(|k| element_geometry(self, k)).collect()
    }

    pub fn area(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| signed_area(self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]]))
            .sum()
    }

    /// Longest edge length.
    pub fn h_max(&self) -> f64 {
        self.edges
            .iter()
            .map(|e| dist(self.vertices[e.v[0]], self.vertices[e.v[1]]))
            .fold(0.0, f64::max)
    }

    /// Applies `f` to every vertex (e.g. a rigid motion). Orientation is
    /// assumed to be preserved.
    pub fn map_vertices(&self, f: impl Fn(Point) -> Point) -> Mesh {
        let mut m = self.clone();
        for p in &mut m.vertices {
            *p = f(*p);
        }
        m
    }
}

fn dist(a: Point, b: Point) -> f64 {
    ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ElementGeometry {
    pub area: f64,
    pub centroid: Point,
    pub perimeter: f64,
    /// Vertex coordinates.
    pub x: [Point; 3],
    /// Positions of the six point DoFs.
    pub dof_pos: [Point; 6],
    /// Length of local edge `i` (vertices `i`, `i + 1`).
    pub edge_len: [f64; 3],
    /// Outward unit normal of local edge `i`.
    pub edge_normal: [Point; 3],
    /// Distance from local edge `i` to the opposite vertex.
    pub height: [f64; 3],
    /// Vertex DoFs: inward unit normal of the opposite edge; midpoints:
    /// outward unit normal of their edge.
    pub dof_normal: [Point; 6],
    pub grad_lambda: [Point; 3],
}

impl ElementGeometry {
    /// Maps barycentric coordinates to physical space.
    #[inline]
    pub fn point(&self, l: [f64; 3]) -> Point {
        [
            l[0] * self.x[0][0] + l[1] * self.x[1][0] + l[2] * self.x[2][0],
            l[0] * self.x[0][1] + l[1] * self.x[1][1] + l[2] * self.x[2][1],
        ]
    }
}

pub fn element_geometry(mesh: &Mesh, k: usize) -> Result<ElementGeometry> {
    let t = mesh.triangles.get(k).ok_or_else(|| Error::Index(format!("element {k}")))?;
    let x = [mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]];
    let area = signed_area(x[0], x[1], x[2]);
    if !(area > 0.0) {
        return Err(Error::DegenerateElement(k));
    }
    let centroid = [(x[0][0] + x[1][0] + x[2][0]) / 3.0, (x[0][1] + x[1][1] + x[2][1]) / 3.0];
    let mut edge_len = [0.0; 3];
    let mut edge_normal = [[0.0; 2]; 3];
    let mut height = [0.0; 3];
    let mut dof_pos = [[0.0; 2]; 6];
    for i in 0..3 {
        let (a, b) = (x[i], x[(i + 1) % 3]);
        let l = dist(a, b);
        if !(l > 0.0) {
            return Err(Error::DegenerateElement(k));
        }
        edge_len[i] = l;
        edge_normal[i] = [(b[1] - a[1]) / l, -(b[0] - a[0]) / l];
        height[i] = 2.0 * area / l;
        dof_pos[i] = x[i];
        dof_pos[3 + i] = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
    }
    let mut dof_normal = [[0.0; 2]; 6];
    let mut grad_lambda = [[0.0; 2]; 3];
    for i in 0..3 {
        let o = (i + 1) % 3;
        dof_normal[i] = [-edge_normal[o][0], -edge_normal[o][1]];
        dof_normal[3 + i] = edge_normal[i];
        grad_lambda[i] = [dof_normal[i][0] / height[o], dof_normal[i][1] / height[o]];
    }
    Ok(ElementGeometry {
        area,
        centroid,
        perimeter: edge_len.iter().sum(),
        x,
        dof_pos,
        edge_len,
        edge_normal,
        height,
        dof_normal,
        grad_lambda,
    })
}

/// Global numbering of point DoFs: vertex `v` → `v`, midpoint of edge `e`
/// → `n_vertices + e`. Averages are numbered by element.
#[derive(Clone, Debug)]
pub struct DofMap {
    pub n_vertices: usize,
    pub n_edges: usize,
    pub n_elements: usize,
    /// Local → global point DoF table (σ1..σ6).
    pub elem: Vec<[usize; 6]>,
    inc_offsets: Vec<usize>,
    inc: Vec<(usize, usize)>,
}

impl DofMap {
    pub fn n_points(&self) -> usize {
        self.n_vertices + self.n_edges
    }

    /// Elements containing point DoF `p`, as (element, local index),
    /// sorted by element index.
    pub fn incident(&self, p: usize) -> &[(usize, usize)] {
        &self.inc[self.inc_offsets[p]..self.inc_offsets[p + 1]]
    }
}

pub fn build_dof_map(mesh: &Mesh) -> DofMap {
    let nv = mesh.n_vertices();
    let elem: Vec<[usize; 6]> = mesh
        .triangles
        .iter()
        .zip(&mesh.tri_edges)
        .map(|(t, e)| [t[0], t[1], t[2], nv + e[0], nv + e[1], nv + e[2]])
        .collect();
    let np = nv + mesh.n_edges();
    let mut count = vec![0usize; np + 1];
    for d in &elem {
        for &p in d {
            count[p + 1] += 1;
        }
    }
    for i in 0..np {
        count[i + 1] += count[i];
    }
    let mut fill = count.clone();
    let mut inc = vec![(0, 0); count[np]];
    for (k, d) in elem.iter().enumerate() {
        for (l, &p) in d.iter().enumerate() {
            inc[fill[p]] = (k, l);
            fill[p] += 1;
        }
    }
    DofMap { n_vertices: nv, n_edges: mesh.n_edges(), n_elements: mesh.n_triangles(), elem, inc_offsets: count, inc }
}

/// Sub-triangles as local indices: 0..5 are point DoFs, 6 the centroid.
pub const SUB_TRIANGLES: [[usize; 3]; 6] = [[0, 6, 3], [3, 6, 1], [1, 6, 4], [4, 6, 2], [2, 6, 5], [5, 6, 0]];

/// The two sub-triangles containing each local point DoF.
pub const SUBS_OF_DOF: [[usize; 2]; 6] = [[0, 5], [1, 2], [3, 4], [0, 1], [2, 3], [4, 5]];

#[derive(Clone, Debug)]
pub struct SubTriangulation {
    /// Per element and sub-triangle: area.
    pub area: Vec<[f64; 6]>,
    /// Per element and sub-triangle: inward normal opposite each vertex,
    /// scaled by the length of that side.
    pub normals: Vec<[[Point; 3]; 6]>,
    /// Dual volume |C_σ| per point DoF.
    pub dual: Vec<f64>,
}

impl SubTriangulation {
    /// Dual volumes rescaled to tile the domain, used as norm weights.
    pub fn norm_weights(&self) -> Vec<f64> {
        self.dual.iter().map(|c| 1.5 * c).collect()
    }
}

/// Scaled inward normals of a triangle, opposite each vertex.
pub fn scaled_inward_normals(p: &[Point; 3]) -> [Point; 3] {
    let mut n = [[0.0; 2]; 3];
    for j in 0..3 {
        let (a, b) = (p[(j + 1) % 3], p[(j + 2) % 3]);
        let mut v = [b[1] - a[1], -(b[0] - a[0])];
        if v[0] * (p[j][0] - a[0]) + v[1] * (p[j][1] - a[1]) < 0.0 {
            v = [-v[0], -v[1]];
        }
        n[j] = v;
    }
    n
}

pub fn sub_positions(g: &ElementGeometry) -> [Point; 7] {
    let mut p = [[0.0; 2]; 7];
    p[..6].copy_from_slice(&g.dof_pos);
    p[6] = g.centroid;
    p
}

pub fn sub_triangulate(geo: &[ElementGeometry], dofs: &DofMap) -> SubTriangulation {
    let mut area = Vec::with_capacity(geo.len());
    let mut normals = Vec::with_capacity(geo.len());
    let mut dual = vec![0.0; dofs.n_points()];
    for (k, g) in geo.iter().enumerate() {
        let p = sub_positions(g);
        let mut a = [0.0; 6];
        let mut n = [[[0.0; 2]; 3]; 6];
        for (s, tri) in SUB_TRIANGLES.iter().enumerate() {
            let q = [p[tri[0]], p[tri[1]], p[tri[2]]];
            a[s] = signed_area(q[0], q[1], q[2]).abs();
            n[s] = scaled_inward_normals(&q);
            for &l in tri {
                if l < 6 {
                    dual[dofs.elem[k][l]] += a[s] / 3.0;
                }
            }
        }
        area.push(a);
        normals.push(n);
    }
    SubTriangulation { area, normals, dual }
}
