//! ASCII Gmsh reader (formats 2.2 and 4.1) and a 2.2 writer.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::Mesh;
use crate::error::{Error, Result};

struct Lines<'a> {
    it: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Option<&'a str> {
        for (i, l) in self.it.by_ref() {
            self.line = i + 1;
            let t = l.trim();
            if !t.is_empty() {
                return Some(t);
            }
        }
        None
    }

    fn expect(&mut self) -> Result<&'a str> {
        let line = self.line;
        self.next().ok_or(Error::Parse { line, msg: "unexpected end of file".into() })
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { line: self.line, msg: msg.into() }
    }

    fn nums<T: std::str::FromStr>(&mut self) -> Result<Vec<T>> {
        let l = self.expect()?;
        l.split_whitespace()
            .map(|w| w.parse::<T>().map_err(|_| self.err(format!("bad number '{w}'"))))
            .collect()
    }

    fn skip_to_end(&mut self, section: &str) -> Result<()> {
        let end = format!("$End{section}");
        loop {
            if self.expect()? == end {
                return Ok(());
            }
        }
    }

    fn end(&mut self, section: &str) -> Result<()> {
        let l = self.expect()?;
        if l != format!("$End{section}") {
            return Err(self.err(format!("expected $End{section}, found '{l}'")));
        }
        Ok(())
    }
}

pub fn load_gmsh(path: impl AsRef<Path>) -> Result<Mesh> {
    parse_gmsh(&std::fs::read_to_string(path)?)
}

struct Raw {
    nodes: HashMap<u64, usize>,
    coords: Vec<[f64; 2]>,
    tris: Vec<([u64; 3], usize)>,
    lines: Vec<([u64; 2], i32, usize)>,
}

pub fn parse_gmsh(text: &str) -> Result<Mesh> {
    let mut r = Lines { it: text.lines().enumerate(), line: 0 };
    let mut version = None;
    let mut raw = Raw { nodes: HashMap::new(), coords: Vec::new(), tris: Vec::new(), lines: Vec::new() };
    let mut curve_phys: HashMap<i64, i32> = HashMap::new();
    while let Some(l) = r.next() {
        match l {
            "$MeshFormat" => {
                let h = r.expect()?;
                let w: Vec<&str> = h.split_whitespace().collect();
                if w.len() < 3 {
                    return Err(r.err("malformed $MeshFormat header"));
                }
                if w[1] != "0" {
                    return Err(r.err("binary MSH files are not supported"));
                }
                version = match w[0] {
                    "2.2" | "2.1" | "2" => Some(2),
                    "4.1" => Some(4),
                    v => return Err(r.err(format!("unsupported MSH version {v}"))),
                };
                r.end("MeshFormat")?;
            }
            "$Entities" if version == Some(4) => {
                let c: Vec<usize> = r.nums()?;
                if c.len() < 4 {
                    return Err(r.err("malformed $Entities counts"));
                }
                for _ in 0..c[0] {
                    r.expect()?;
                }
                for _ in 0..c[1] {
                    let w: Vec<f64> = r.nums()?;
                    if w.len() < 8 {
                        return Err(r.err("malformed curve entity"));
                    }
                    let np = w[7] as usize;
                    if np > 0 && w.len() > 8 {
                        curve_phys.insert(w[0] as i64, w[8] as i32);
                    }
                }
                r.skip_to_end("Entities")?;
            }
            "$Nodes" => match version {
                Some(2) => nodes_v2(&mut r, &mut raw)?,
                Some(4) => nodes_v4(&mut r, &mut raw)?,
                _ => return Err(r.err("$Nodes before $MeshFormat")),
            },
            "$Elements" => match version {
                Some(2) => elements_v2(&mut r, &mut raw)?,
                Some(4) => elements_v4(&mut r, &mut raw, &curve_phys)?,
                _ => return Err(r.err("$Elements before $MeshFormat")),
            },
            s if s.starts_with("$End") => return Err(r.err(format!("unexpected '{s}'"))),
            s if s.starts_with('$') => {
                let name = s[1..].to_string();
                r.skip_to_end(&name)?;
            }
            s => return Err(r.err(format!("unexpected content '{s}'"))),
        }
    }
    if version.is_none() {
        return Err(Error::Parse { line: r.line, msg: "missing $MeshFormat".into() });
    }
    let node = |id: u64, line: usize| {
        raw.nodes
            .get(&id)
            .copied()
            .ok_or_else(|| Error::Index(format!("element at line {line} references missing node {id}")))
    };
    let mut tris = Vec::with_capacity(raw.tris.len());
    for (t, line) in &raw.tris {
        tris.push([node(t[0], *line)?, node(t[1], *line)?, node(t[2], *line)?]);
    }
    let mut lines = Vec::with_capacity(raw.lines.len());
    for (l, tag, line) in &raw.lines {
        lines.push(([node(l[0], *line)?, node(l[1], *line)?], *tag));
    }
    Mesh::from_triangles(raw.coords, tris, &lines)
}

fn push_node(r: &Lines, raw: &mut Raw, id: u64, x: f64, y: f64) -> Result<()> {
    if raw.nodes.insert(id, raw.coords.len()).is_some() {
        return Err(r.err(format!("duplicate node {id}")));
    }
    raw.coords.push([x, y]);
    Ok(())
}

fn nodes_v2(r: &mut Lines, raw: &mut Raw) -> Result<()> {
    let n: Vec<usize> = r.nums()?;
    let n = *n.first().ok_or_else(|| r.err("missing node count"))?;
    for _ in 0..n {
        let w: Vec<f64> = r.nums()?;
        if w.len() < 3 {
            return Err(r.err("malformed node line"));
        }
        push_node(r, raw, w[0] as u64, w[1], w[2])?;
    }
    r.end("Nodes")
}

fn nodes_v4(r: &mut Lines, raw: &mut Raw) -> Result<()> {
    let h: Vec<usize> = r.nums()?;
    if h.len() < 4 {
        return Err(r.err("malformed $Nodes header"));
    }
    for _ in 0..h[0] {
        let b: Vec<i64> = r.nums()?;
        if b.len() < 4 {
            return Err(r.err("malformed node block header"));
        }
        let n = b[3] as usize;
        let mut ids = Vec::with_capacity(n);
        for _ in 0..n {
            let w: Vec<u64> = r.nums()?;
            ids.push(*w.first().ok_or_else(|| r.err("missing node tag"))?);
        }
        for id in ids {
            let w: Vec<f64> = r.nums()?;
            if w.len() < 2 {
                return Err(r.err("malformed node coordinates"));
            }
            push_node(r, raw, id, w[0], w[1])?;
        }
    }
    r.end("Nodes")
}

fn element(r: &Lines, raw: &mut Raw, kind: i64, nodes: &[u64], tag: i32) -> Result<()> {
    match kind {
        1 if nodes.len() >= 2 => raw.lines.push(([nodes[0], nodes[1]], tag, r.line)),
        2 if nodes.len() >= 3 => raw.tris.push(([nodes[0], nodes[1], nodes[2]], r.line)),
        1 | 2 => return Err(r.err("element has too few nodes")),
        15 => {}
        k => return Err(Error::UnsupportedElement { kind: k, line: r.line }),
    }
    Ok(())
}

fn elements_v2(r: &mut Lines, raw: &mut Raw) -> Result<()> {
    let n: Vec<usize> = r.nums()?;
    let n = *n.first().ok_or_else(|| r.err("missing element count"))?;
    for _ in 0..n {
        let w: Vec<i64> = r.nums()?;
        if w.len() < 3 || w.len() < 3 + w[2] as usize {
            return Err(r.err("malformed element line"));
        }
        let nt = w[2] as usize;
        let tag = if nt > 0 { w[3] as i32 } else { 0 };
        let nodes: Vec<u64> = w[3 + nt..].iter().map(|&v| v as u64).collect();
        element(r, raw, w[1], &nodes, tag)?;
    }
    r.end("Elements")
}

fn elements_v4(r: &mut Lines, raw: &mut Raw, curve_phys: &HashMap<i64, i32>) -> Result<()> {
    let h: Vec<usize> = r.nums()?;
    if h.len() < 4 {
        return Err(r.err("malformed $Elements header"));
    }
    for _ in 0..h[0] {
        let b: Vec<i64> = r.nums()?;
        if b.len() < 4 {
            return Err(r.err("malformed element block header"));
        }
        let (dim, ent, kind, n) = (b[0], b[1], b[2], b[3] as usize);
        let tag = if dim == 1 { curve_phys.get(&ent).copied().unwrap_or(ent as i32) } else { 0 };
        for _ in 0..n {
            let w: Vec<u64> = r.nums()?;
            if w.is_empty() {
                return Err(r.err("empty element line"));
            }
            element(r, raw, kind, &w[1..], tag)?;
        }
    }
    r.end("Elements")
}

/// Serialises a mesh in MSH 2.2 with boundary edges as tagged lines.
pub fn to_msh22(mesh: &Mesh) -> String {
    let mut s = String::from("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n");
    let _ = writeln!(s, "{}", mesh.n_vertices());
    for (i, p) in mesh.vertices.iter().enumerate() {
        let _ = writeln!(s, "{} {:.17e} {:.17e} 0", i + 1, p[0], p[1]);
    }
    s.push_str("$EndNodes\n$Elements\n");
    let nb = mesh.n_boundary_edges();
    let _ = writeln!(s, "{}", nb + mesh.n_triangles());
    let mut id = 1;
    for e in mesh.edges.iter().filter(|e| e.is_boundary()) {
        let _ = writeln!(s, "{id} 1 2 {} {} {} {}", e.tag, e.tag, e.v[0] + 1, e.v[1] + 1);
        id += 1;
    }
    for t in &mesh.triangles {
        let _ = writeln!(s, "{id} 2 2 0 0 {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
        id += 1;
    }
    s.push_str("$EndElements\n");
    s
}

pub fn write_msh22(mesh: &Mesh, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_msh22(mesh))?;
    Ok(())
}
