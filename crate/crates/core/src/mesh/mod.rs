//! Planar triangulations of the computational domains.
//!
//! A [`Mesh`] stores vertices, positively oriented triangles and the boundary
//! edges with their outward unit normals. Meshes are immutable after
//! construction and may be shared read-only across threads.

mod generate;
mod io;
mod stats;

pub use generate::generate_mesh;
pub use io::{format_mesh, load_mesh, parse_mesh, write_mesh};
pub use stats::{geometry_stats, GeometryStats};

use std::collections::HashMap;
use std::path::PathBuf;

use crate::error::{Error, Result};

pub(crate) fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

pub(crate) fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub(crate) fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

pub(crate) fn norm(a: [f64; 2]) -> f64 {
    a[0].hypot(a[1])
}

pub(crate) fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    norm(sub(a, b))
}

/// Shape of a domain to be meshed.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainKind {
    Disk { radius: f64 },
    Square { side: f64 },
    Rectangle { width: f64, height: f64 },
    Ellipse { a: f64, b: f64 },
    Polygon { vertices: Vec<[f64; 2]> },
    File { path: PathBuf },
}

/// A domain together with the requested mesh resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    pub kind: DomainKind,
    /// Requested maximum triangle edge length. Generated meshes satisfy
    /// `max edge <= 1.5 * target_h`.
    pub target_h: f64,
}

impl DomainSpec {
    pub fn disk(radius: f64, target_h: f64) -> Self {
        Self { kind: DomainKind::Disk { radius }, target_h }
    }

    pub fn square(side: f64, target_h: f64) -> Self {
        Self { kind: DomainKind::Square { side }, target_h }
    }

    pub fn rectangle(width: f64, height: f64, target_h: f64) -> Self {
        Self { kind: DomainKind::Rectangle { width, height }, target_h }
    }

    pub fn ellipse(a: f64, b: f64, target_h: f64) -> Self {
        Self { kind: DomainKind::Ellipse { a, b }, target_h }
    }

    pub fn polygon(vertices: Vec<[f64; 2]>, target_h: f64) -> Self {
        Self { kind: DomainKind::Polygon { vertices }, target_h }
    }

    /// Regular polygon with `sides` sides inscribed in a circle of the given
    /// radius, first vertex on the positive x-axis.
    pub fn regular_polygon(sides: usize, radius: f64, target_h: f64) -> Self {
        let vertices = (0..sides)
            .map(|k| {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / sides as f64;
                [radius * theta.cos(), radius * theta.sin()]
            })
            .collect();
        Self::polygon(vertices, target_h)
    }
}

/// Analytic description of a curved boundary, used to project refined
/// boundary vertices back onto the true curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnalyticBoundary {
    Circle { radius: f64 },
    Ellipse { a: f64, b: f64 },
}

impl AnalyticBoundary {
    /// Closest-parameter projection of a point near the curve onto the curve.
    pub fn project(&self, point: [f64; 2]) -> [f64; 2] {
        match *self {
            AnalyticBoundary::Circle { radius } => {
                let r = norm(point);
                if r == 0.0 {
                    [radius, 0.0]
                } else {
                    [point[0] * radius / r, point[1] * radius / r]
                }
            }
            AnalyticBoundary::Ellipse { a, b } => {
                let theta = (point[1] / b).atan2(point[0] / a);
                [a * theta.cos(), b * theta.sin()]
            }
        }
    }
}

/// A boundary edge, oriented so the domain lies on its left, with the
/// outward unit normal of the adjacent triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryEdge {
    pub v: [usize; 2],
    pub normal: [f64; 2],
}

/// Planar triangulation with oriented boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
    pub analytic_boundary: Option<AnalyticBoundary>,
}

impl Mesh {
    /// Builds a mesh from vertices and triangles, fixing triangle orientation
    /// and deriving boundary edges and normals from the topology.
    pub fn from_cells(
        vertices: Vec<[f64; 2]>,
        triangles: Vec<[usize; 3]>,
        analytic_boundary: Option<AnalyticBoundary>,
    ) -> Result<Mesh> {
        let nv = vertices.len();
        let mut triangles = triangles;
        for tri in &mut triangles {
            for &i in tri.iter() {
                if i >= nv {
                    return Err(Error::InvalidMesh(format!(
                        "triangle references vertex {i} of {nv}"
                    )));
                }
            }
            let area = signed_area(&vertices, *tri);
            if area == 0.0 {
                return Err(Error::InvalidMesh(format!("zero-area triangle {tri:?}")));
            }
            if area < 0.0 {
                tri.swap(1, 2);
            }
        }
        let boundary_edges = derive_boundary(&vertices, &triangles)?;
        let mesh = Mesh { vertices, triangles, boundary_edges, analytic_boundary };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        signed_area(&self.vertices, self.triangles[t])
    }

    pub fn triangle_centroid(&self, t: usize) -> [f64; 2] {
        let [a, b, c] = self.triangles[t];
        let (pa, pb, pc) = (self.vertices[a], self.vertices[b], self.vertices[c]);
        [(pa[0] + pb[0] + pc[0]) / 3.0, (pa[1] + pb[1] + pc[1]) / 3.0]
    }

    pub fn edge_length(&self, e: &BoundaryEdge) -> f64 {
        dist(self.vertices[e.v[0]], self.vertices[e.v[1]])
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    pub fn perimeter(&self) -> f64 {
        self.boundary_edges.iter().map(|e| self.edge_length(e)).sum()
    }

    /// Longest edge in the triangulation; the mesh size h.
    pub fn max_edge_length(&self) -> f64 {
        let mut h: f64 = 0.0;
        for &[a, b, c] in &self.triangles {
            h = h.max(dist(self.vertices[a], self.vertices[b]));
            h = h.max(dist(self.vertices[b], self.vertices[c]));
            h = h.max(dist(self.vertices[c], self.vertices[a]));
        }
        h
    }

    /// Indices of the boundary vertices, ascending, deduplicated.
    pub fn boundary_vertices(&self) -> Vec<usize> {
        let mut ids: Vec<usize> =
            self.boundary_edges.iter().flat_map(|e| e.v.iter().copied()).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    /// Marks per vertex: true when the vertex lies on the boundary.
    pub fn boundary_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.vertices.len()];
        for e in &self.boundary_edges {
            mask[e.v[0]] = true;
            mask[e.v[1]] = true;
        }
        mask
    }

    /// For each boundary edge, the index of its unique adjacent triangle,
    /// parallel to `boundary_edges`.
    pub fn boundary_edge_owners(&self) -> Vec<usize> {
        let usage = edge_usage(&self.triangles);
        self.boundary_edges
            .iter()
            .map(|e| usage[&undirected(e.v[0], e.v[1])][0])
            .collect()
    }

    /// Boundary loops as ordered vertex cycles (counterclockwise).
    /// Fails with `OpenBoundaryLoop` if the directed boundary edges do not
    /// close up into disjoint cycles.
    pub fn boundary_loops(&self) -> Result<Vec<Vec<usize>>> {
        let mut succ: HashMap<usize, usize> = HashMap::new();
        for e in &self.boundary_edges {
            if succ.insert(e.v[0], e.v[1]).is_some() {
                return Err(Error::OpenBoundaryLoop);
            }
        }
        let mut starts: Vec<usize> = succ.keys().copied().collect();
        starts.sort_unstable();
        let mut visited: HashMap<usize, bool> = HashMap::new();
        let mut loops = Vec::new();
        for &start in &starts {
            if visited.get(&start).copied().unwrap_or(false) {
                continue;
            }
            let mut cycle = vec![start];
            visited.insert(start, true);
            let mut cur = start;
            loop {
                let Some(&next) = succ.get(&cur) else {
                    return Err(Error::OpenBoundaryLoop);
                };
                if next == start {
                    break;
                }
                if visited.get(&next).copied().unwrap_or(false) {
                    return Err(Error::OpenBoundaryLoop);
                }
                visited.insert(next, true);
                cycle.push(next);
                cur = next;
            }
            loops.push(cycle);
        }
        if loops.iter().map(|l| l.len()).sum::<usize>() != succ.len() {
            return Err(Error::OpenBoundaryLoop);
        }
        Ok(loops)
    }

    /// Checks every structural invariant; generated, loaded and refined
    /// meshes all pass through here.
    pub fn validate(&self) -> Result<()> {
        if self.triangles.is_empty() {
            return Err(Error::InvalidMesh("mesh has no triangles".into()));
        }
        let nv = self.vertices.len();
        for (i, v) in self.vertices.iter().enumerate() {
            if !v[0].is_finite() || !v[1].is_finite() {
                return Err(Error::InvalidMesh(format!("non-finite vertex {i}")));
            }
        }
        let mut total = 0.0;
        for (t, tri) in self.triangles.iter().enumerate() {
            for &i in tri.iter() {
                if i >= nv {
                    return Err(Error::InvalidMesh(format!(
                        "triangle {t} references vertex {i} of {nv}"
                    )));
                }
            }
            let area = signed_area(&self.vertices, *tri);
            if area <= 0.0 {
                return Err(Error::InvalidMesh(format!(
                    "triangle {t} has non-positive area {area:e}"
                )));
            }
            total += area;
        }
        if total <= 0.0 {
            return Err(Error::InvalidMesh("total area is not positive".into()));
        }

        // Boundary edges must each belong to exactly one triangle and their
        // normals must be unit, tangent-orthogonal and outward.
        let edge_use = edge_usage(&self.triangles);
        let scale = total.sqrt();
        for e in &self.boundary_edges {
            let key = undirected(e.v[0], e.v[1]);
            let Some(owners) = edge_use.get(&key) else {
                return Err(Error::InvalidMesh(format!(
                    "boundary edge {:?} is not an edge of any triangle",
                    e.v
                )));
            };
            if owners.len() != 1 {
                return Err(Error::InvalidMesh(format!(
                    "boundary edge {:?} belongs to {} triangles",
                    e.v,
                    owners.len()
                )));
            }
            let a = self.vertices[e.v[0]];
            let b = self.vertices[e.v[1]];
            let tangent = sub(b, a);
            let n = e.normal;
            if (norm(n) - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidMesh(format!("normal {n:?} is not unit length")));
            }
            if dot(n, tangent).abs() > 1e-12 * scale {
                return Err(Error::InvalidMesh(format!(
                    "normal {n:?} is not orthogonal to edge {:?}",
                    e.v
                )));
            }
            let centroid = self.triangle_centroid(owners[0]);
            let mid = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
            if dot(n, sub(mid, centroid)) <= 0.0 {
                return Err(Error::InvalidMesh(format!("normal {n:?} points inward")));
            }
        }

        // Every triangle edge used once must be listed as a boundary edge.
        let listed: HashMap<(usize, usize), ()> = self
            .boundary_edges
            .iter()
            .map(|e| (undirected(e.v[0], e.v[1]), ()))
            .collect();
        for (key, owners) in &edge_use {
            if owners.len() == 1 && !listed.contains_key(key) {
                return Err(Error::OpenBoundaryLoop);
            }
            if owners.len() > 2 {
                return Err(Error::InvalidMesh(format!(
                    "edge {key:?} is shared by {} triangles",
                    owners.len()
                )));
            }
        }
        self.boundary_loops()?;
        Ok(())
    }

    /// Uniform refinement: every triangle is split into four by its edge
    /// midpoints. Midpoints of boundary edges are projected onto the analytic
    /// boundary curve when one is attached.
    pub fn refine(&self) -> Mesh {
        let mut vertices = self.vertices.clone();
        let boundary_set: HashMap<(usize, usize), ()> = self
            .boundary_edges
            .iter()
            .map(|e| (undirected(e.v[0], e.v[1]), ()))
            .collect();
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<[f64; 2]>| -> usize {
            let key = undirected(a, b);
            if let Some(&m) = midpoints.get(&key) {
                return m;
            }
            let pa = vertices[a];
            let pb = vertices[b];
            let mut pm = [(pa[0] + pb[0]) / 2.0, (pa[1] + pb[1]) / 2.0];
            if boundary_set.contains_key(&key) {
                if let Some(curve) = &self.analytic_boundary {
                    pm = curve.project(pm);
                }
            }
            let idx = vertices.len();
            vertices.push(pm);
            midpoints.insert(key, idx);
            idx
        };

        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for &[a, b, c] in &self.triangles {
            let mab = midpoint(a, b, &mut vertices);
            let mbc = midpoint(b, c, &mut vertices);
            let mca = midpoint(c, a, &mut vertices);
            triangles.push([a, mab, mca]);
            triangles.push([mab, b, mbc]);
            triangles.push([mca, mbc, c]);
            triangles.push([mab, mbc, mca]);
        }
        let boundary_edges = derive_boundary(&vertices, &triangles)
            .expect("refinement preserves a valid boundary");
        Mesh {
            vertices,
            triangles,
            boundary_edges,
            analytic_boundary: self.analytic_boundary,
        }
    }

    /// Mesh scaled by `s` about the origin (used by scaling-law tests).
    pub fn scaled(&self, s: f64) -> Mesh {
        let vertices: Vec<[f64; 2]> =
            self.vertices.iter().map(|v| [v[0] * s, v[1] * s]).collect();
        let analytic_boundary = self.analytic_boundary.map(|ab| match ab {
            AnalyticBoundary::Circle { radius } => AnalyticBoundary::Circle { radius: radius * s },
            AnalyticBoundary::Ellipse { a, b } => AnalyticBoundary::Ellipse { a: a * s, b: b * s },
        });
        let boundary_edges = derive_boundary(&vertices, &self.triangles)
            .expect("scaling preserves a valid boundary");
        Mesh {
            vertices,
            triangles: self.triangles.clone(),
            boundary_edges,
            analytic_boundary,
        }
    }
}

pub(crate) fn signed_area(vertices: &[[f64; 2]], tri: [usize; 3]) -> f64 {
    let a = vertices[tri[0]];
    let b = vertices[tri[1]];
    let c = vertices[tri[2]];
    0.5 * cross(sub(b, a), sub(c, a))
}

fn undirected(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn edge_usage(triangles: &[[usize; 3]]) -> HashMap<(usize, usize), Vec<usize>> {
    let mut map: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (t, &[a, b, c]) in triangles.iter().enumerate() {
        for (u, v) in [(a, b), (b, c), (c, a)] {
            map.entry(undirected(u, v)).or_default().push(t);
        }
    }
    map
}

/// Derives boundary edges (edges used by exactly one triangle) with their
/// outward unit normals, oriented so the domain lies on the left.
pub(crate) fn derive_boundary(
    vertices: &[[f64; 2]],
    triangles: &[[usize; 3]],
) -> Result<Vec<BoundaryEdge>> {
    let usage = edge_usage(triangles);
    let mut edges = Vec::new();
    // Walk triangles in order so the output ordering is deterministic.
    for (t, &[a, b, c]) in triangles.iter().enumerate() {
        for (u, v) in [(a, b), (b, c), (c, a)] {
            let owners = &usage[&undirected(u, v)];
            if owners.len() == 1 && owners[0] == t {
                let pu = vertices[u];
                let pv = vertices[v];
                let tangent = sub(pv, pu);
                let len = norm(tangent);
                if len == 0.0 {
                    return Err(Error::InvalidMesh("zero-length boundary edge".into()));
                }
                // For a CCW triangle the directed edge (u, v) has the domain
                // on its left; rotating the tangent by -90 degrees points out.
                let normal = [tangent[1] / len, -tangent[0] / len];
                edges.push(BoundaryEdge { v: [u, v], normal });
            }
        }
    }
    if edges.is_empty() {
        return Err(Error::InvalidMesh("mesh has no boundary".into()));
    }
    Ok(edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square_two_triangles() -> Mesh {
        let vertices = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let triangles = vec![[0, 1, 2], [0, 2, 3]];
        Mesh::from_cells(vertices, triangles, None).unwrap()
    }

    #[test]
    fn orientation_is_repaired() {
        let vertices = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        // Clockwise input triangle.
        let mesh = Mesh::from_cells(vertices, vec![[0, 2, 1]], None).unwrap();
        assert!(mesh.triangle_area(0) > 0.0);
    }

    #[test]
    fn unit_square_mesh_area_and_perimeter() {
        let mesh = unit_square_two_triangles();
        assert_eq!(mesh.total_area(), 1.0);
        assert_eq!(mesh.perimeter(), 4.0);
        assert_eq!(mesh.boundary_edges.len(), 4);
        mesh.validate().unwrap();
    }

    #[test]
    fn refine_splits_each_triangle_into_four() {
        let mesh = unit_square_two_triangles();
        let fine = mesh.refine();
        assert_eq!(fine.triangle_count(), 8);
        assert!((fine.total_area() - 1.0).abs() < 1e-15);
        let finer = fine.refine();
        assert_eq!(finer.triangle_count(), 16 * mesh.triangle_count());
        finer.validate().unwrap();
    }

    #[test]
    fn normals_are_orthogonal_and_outward() {
        let mesh = unit_square_two_triangles().refine();
        for e in &mesh.boundary_edges {
            let a = mesh.vertices[e.v[0]];
            let b = mesh.vertices[e.v[1]];
            assert!(dot(e.normal, sub(b, a)).abs() < 1e-12);
            assert!((norm(e.normal) - 1.0).abs() < 1e-12);
        }
        mesh.validate().unwrap();
    }

    #[test]
    fn boundary_loops_close() {
        let mesh = unit_square_two_triangles();
        let loops = mesh.boundary_loops().unwrap();
        assert_eq!(loops.len(), 1);
        assert_eq!(loops[0].len(), 4);
    }
}
