//! Mesh text format.
//!
//! One record per line: `v <x> <y>` declares a vertex (0-indexed by order of
//! appearance), `t <i> <j> <k>` a triangle, `b <i> <j>` a boundary edge.
//! Everything after `#` is a comment. Triangle orientation is repaired on
//! load; boundary records are validated against the triangle topology.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use super::{derive_boundary, signed_area, Mesh};
use crate::error::{Error, Result};

pub fn load_mesh(path: &Path) -> Result<Mesh> {
    let text = std::fs::read_to_string(path)?;
    parse_mesh(&text)
}

pub fn parse_mesh(text: &str) -> Result<Mesh> {
    let mut vertices: Vec<[f64; 2]> = Vec::new();
    let mut triangles: Vec<([usize; 3], usize)> = Vec::new();
    let mut listed_boundary: Vec<([usize; 2], usize)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let tag = tokens.next().unwrap();
        let rest: Vec<&str> = tokens.collect();
        match tag {
            "v" => {
                if rest.len() != 2 {
                    return Err(Error::MeshParse {
                        line,
                        msg: format!("vertex record needs 2 coordinates, got {}", rest.len()),
                    });
                }
                let x = parse_f64(rest[0], line)?;
                let y = parse_f64(rest[1], line)?;
                vertices.push([x, y]);
            }
            "t" => {
                if rest.len() != 3 {
                    return Err(Error::MeshParse {
                        line,
                        msg: format!("triangle record needs 3 indices, got {}", rest.len()),
                    });
                }
                let i = parse_index(rest[0], line)?;
                let j = parse_index(rest[1], line)?;
                let k = parse_index(rest[2], line)?;
                triangles.push(([i, j, k], line));
            }
            "b" => {
                if rest.len() != 2 {
                    return Err(Error::MeshParse {
                        line,
                        msg: format!("boundary record needs 2 indices, got {}", rest.len()),
                    });
                }
                let i = parse_index(rest[0], line)?;
                let j = parse_index(rest[1], line)?;
                listed_boundary.push(([i, j], line));
            }
            other => {
                return Err(Error::MeshParse {
                    line,
                    msg: format!("unknown record tag '{other}'"),
                });
            }
        }
    }

    let nv = vertices.len();
    let mut cells = Vec::with_capacity(triangles.len());
    for (mut tri, line) in triangles {
        for &idx in tri.iter() {
            if idx >= nv {
                return Err(Error::DanglingIndex { line, index: idx });
            }
        }
        if signed_area(&vertices, tri) < 0.0 {
            tri.swap(1, 2);
        }
        cells.push(tri);
    }
    for &(edge, line) in &listed_boundary {
        for &idx in edge.iter() {
            if idx >= nv {
                return Err(Error::DanglingIndex { line, index: idx });
            }
        }
    }
    if cells.is_empty() {
        return Err(Error::InvalidMesh("mesh file declares no triangles".into()));
    }

    let boundary_edges = derive_boundary(&vertices, &cells)?;

    // Listed boundary records, when present, must match the topological
    // boundary exactly; a missing edge means the loop never closes.
    if !listed_boundary.is_empty() {
        let topo: HashSet<(usize, usize)> = boundary_edges
            .iter()
            .map(|e| ordered(e.v[0], e.v[1]))
            .collect();
        let mut seen: HashSet<(usize, usize)> = HashSet::new();
        for &(edge, line) in &listed_boundary {
            let key = ordered(edge[0], edge[1]);
            if !topo.contains(&key) {
                return Err(Error::MeshParse {
                    line,
                    msg: format!(
                        "edge ({}, {}) is not a boundary edge of the triangulation",
                        edge[0], edge[1]
                    ),
                });
            }
            seen.insert(key);
        }
        if seen.len() != topo.len() {
            return Err(Error::OpenBoundaryLoop);
        }
    }

    let mesh = Mesh { vertices, triangles: cells, boundary_edges, analytic_boundary: None };
    mesh.validate()?;
    Ok(mesh)
}

pub fn format_mesh(mesh: &Mesh) -> String {
    let mut out = String::new();
    for v in &mesh.vertices {
        let _ = writeln!(out, "v {} {}", v[0], v[1]);
    }
    for t in &mesh.triangles {
        let _ = writeln!(out, "t {} {} {}", t[0], t[1], t[2]);
    }
    for e in &mesh.boundary_edges {
        let _ = writeln!(out, "b {} {}", e.v[0], e.v[1]);
    }
    out
}

pub fn write_mesh(mesh: &Mesh, path: &Path) -> Result<()> {
    std::fs::write(path, format_mesh(mesh))?;
    Ok(())
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn parse_f64(token: &str, line: usize) -> Result<f64> {
    token.parse::<f64>().map_err(|_| Error::MeshParse {
        line,
        msg: format!("cannot parse '{token}' as a number"),
    })
}

fn parse_index(token: &str, line: usize) -> Result<usize> {
    token.parse::<usize>().map_err(|_| Error::MeshParse {
        line,
        msg: format!("cannot parse '{token}' as an index"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const UNIT_SQUARE: &str = "\
# unit square, two triangles
v 0 0
v 1 0
v 1 1
v 0 1
t 0 1 2
t 0 2 3
b 0 1
b 1 2
b 2 3
b 3 0
";

    #[test]
    fn parses_unit_square() {
        let mesh = parse_mesh(UNIT_SQUARE).unwrap();
        assert_eq!(mesh.vertex_count(), 4);
        assert_eq!(mesh.triangle_count(), 2);
        assert!((mesh.total_area() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dangling_index_reports_line() {
        let text = "v 0 0\nv 1 0\nv 0 1\nv 1 1\nt 0 1 99\n";
        match parse_mesh(text).unwrap_err() {
            Error::DanglingIndex { line, index } => {
                assert_eq!(line, 5);
                assert_eq!(index, 99);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn clockwise_triangle_is_repaired() {
        let text = "v 0 0\nv 1 0\nv 0 1\nt 0 2 1\n";
        let mesh = parse_mesh(text).unwrap();
        assert!(mesh.triangle_area(0) > 0.0);
    }

    #[test]
    fn incomplete_boundary_is_an_open_loop() {
        let text = "v 0 0\nv 1 0\nv 0 1\nt 0 1 2\nb 0 1\nb 1 2\n";
        assert!(matches!(parse_mesh(text).unwrap_err(), Error::OpenBoundaryLoop));
    }

    #[test]
    fn parse_error_reports_line() {
        let text = "v 0 0\nv 1 0\nv zero 1\nt 0 1 2\n";
        match parse_mesh(text).unwrap_err() {
            Error::MeshParse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn roundtrip_preserves_mesh() {
        let mesh = parse_mesh(UNIT_SQUARE).unwrap();
        let again = parse_mesh(&format_mesh(&mesh)).unwrap();
        assert_eq!(mesh.vertices, again.vertices);
        assert_eq!(mesh.triangles, again.triangles);
    }
}
