//! Geometric measurements: area, perimeter, inradius, convexity.

use super::{cross, dist, dot, norm, sub, Mesh};
use crate::error::Result;

/// Scalar geometry of a meshed domain.
///
/// The inradius is approximated by sampling vertices, triangle incenters and
/// the domain centroid against the boundary edges; the error is O(h).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryStats {
    pub area: f64,
    pub perimeter: f64,
    pub inradius: f64,
    pub is_convex: bool,
}

pub fn geometry_stats(mesh: &Mesh) -> Result<GeometryStats> {
    let area = mesh.total_area();
    let perimeter = mesh.perimeter();

    let segments: Vec<([f64; 2], [f64; 2])> = mesh
        .boundary_edges
        .iter()
        .map(|e| (mesh.vertices[e.v[0]], mesh.vertices[e.v[1]]))
        .collect();
    let dist_to_boundary = |p: [f64; 2]| -> f64 {
        segments
            .iter()
            .map(|&(a, b)| point_segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    };

    let mut inradius: f64 = 0.0;
    for &v in &mesh.vertices {
        inradius = inradius.max(dist_to_boundary(v));
    }
    let mut centroid = [0.0, 0.0];
    for t in 0..mesh.triangle_count() {
        let a = mesh.triangle_area(t);
        let c = mesh.triangle_centroid(t);
        centroid[0] += a * c[0];
        centroid[1] += a * c[1];
        inradius = inradius.max(dist_to_boundary(incenter(mesh, t)));
    }
    centroid[0] /= area;
    centroid[1] /= area;
    inradius = inradius.max(dist_to_boundary(centroid));

    let is_convex = convexity(mesh)?;
    Ok(GeometryStats { area, perimeter, inradius, is_convex })
}

fn incenter(mesh: &Mesh, t: usize) -> [f64; 2] {
    let [i, j, k] = mesh.triangles[t];
    let (a, b, c) = (mesh.vertices[i], mesh.vertices[j], mesh.vertices[k]);
    // side lengths opposite to each vertex
    let la = dist(b, c);
    let lb = dist(c, a);
    let lc = dist(a, b);
    let s = la + lb + lc;
    [
        (la * a[0] + lb * b[0] + lc * c[0]) / s,
        (la * a[1] + lb * b[1] + lc * c[1]) / s,
    ]
}

fn point_segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = sub(b, a);
    let len2 = dot(ab, ab);
    if len2 == 0.0 {
        return dist(p, a);
    }
    let t = (dot(sub(p, a), ab) / len2).clamp(0.0, 1.0);
    dist(p, [a[0] + t * ab[0], a[1] + t * ab[1]])
}

/// Cross-product test along each boundary loop; multiple loops mean holes,
/// which are never convex.
fn convexity(mesh: &Mesh) -> Result<bool> {
    let loops = mesh.boundary_loops()?;
    if loops.len() != 1 {
        return Ok(false);
    }
    let cycle = &loops[0];
    let n = cycle.len();
    for i in 0..n {
        let a = mesh.vertices[cycle[i]];
        let b = mesh.vertices[cycle[(i + 1) % n]];
        let c = mesh.vertices[cycle[(i + 2) % n]];
        let e1 = sub(b, a);
        let e2 = sub(c, b);
        if cross(e1, e2) < -1e-12 * norm(e1) * norm(e2) {
            return Ok(false);
        }
    }
    Ok(true)
}
