//! Deterministic mesh generators for the supported domain shapes.

use std::f64::consts::PI;

use super::{cross, dist, sub, AnalyticBoundary, DomainKind, DomainSpec, Mesh};
use crate::error::{Error, Result};

/// Builds a triangulation of the domain with maximum edge length at most
/// `1.5 * target_h`. Curved boundaries carry their analytic description so
/// refinement can project new boundary vertices back onto the curve.
pub fn generate_mesh(spec: &DomainSpec) -> Result<Mesh> {
    if !(spec.target_h > 0.0) || !spec.target_h.is_finite() {
        return Err(Error::InvalidDomain(format!("target_h must be positive, got {}", spec.target_h)));
    }
    let h = spec.target_h;
    match &spec.kind {
        DomainKind::Disk { radius } => {
            let r = *radius;
            require_positive(r, "radius")?;
            check_target_h(h, 2.0 * r)?;
            let n = (r / h).ceil().max(1.0) as usize;
            let mesh = disk_rings(r, n, |x| x);
            Ok(Mesh {
                analytic_boundary: Some(AnalyticBoundary::Circle { radius: r }),
                ..mesh
            })
        }
        DomainKind::Ellipse { a, b } => {
            let (a, b) = (*a, *b);
            require_positive(a, "a")?;
            require_positive(b, "b")?;
            check_target_h(h, 2.0 * a.max(b))?;
            let n = (a.max(b) / h).ceil().max(1.0) as usize;
            let mesh = disk_rings(1.0, n, |p| [a * p[0], b * p[1]]);
            Ok(Mesh {
                analytic_boundary: Some(AnalyticBoundary::Ellipse { a, b }),
                ..mesh
            })
        }
        DomainKind::Square { side } => {
            let s = *side;
            require_positive(s, "side")?;
            check_target_h(h, std::f64::consts::SQRT_2 * s)?;
            rect_grid(s, s, h)
        }
        DomainKind::Rectangle { width, height } => {
            let (w, d) = (*width, *height);
            require_positive(w, "width")?;
            require_positive(d, "height")?;
            check_target_h(h, w.hypot(d))?;
            rect_grid(w, d, h)
        }
        DomainKind::Polygon { vertices } => polygon_mesh(vertices, h),
        DomainKind::File { path } => super::load_mesh(path),
    }
}

fn require_positive(x: f64, name: &str) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidDomain(format!("{name} must be positive, got {x}")))
    }
}

fn check_target_h(h: f64, diameter: f64) -> Result<()> {
    if h > diameter {
        Err(Error::TargetHTooLarge { target_h: h, diameter })
    } else {
        Ok(())
    }
}

/// Concentric-ring triangulation of a disk of radius `r` with `n` rings;
/// ring k carries 6k nodes. `map` post-transforms every vertex (identity for
/// the disk, axis scaling for the ellipse).
fn disk_rings(r: f64, n: usize, map: impl Fn([f64; 2]) -> [f64; 2]) -> Mesh {
    let ring_start = |k: usize| -> usize {
        // center + sum of 6j for j < k
        if k == 0 {
            0
        } else {
            1 + 3 * k * (k - 1)
        }
    };
    let ring_node = |k: usize, t: usize| -> usize {
        if k == 0 {
            0
        } else {
            ring_start(k) + t % (6 * k)
        }
    };

    let mut vertices = vec![map([0.0, 0.0])];
    for k in 1..=n {
        let rk = r * k as f64 / n as f64;
        for t in 0..6 * k {
            let theta = 2.0 * PI * t as f64 / (6 * k) as f64;
            vertices.push(map([rk * theta.cos(), rk * theta.sin()]));
        }
    }

    let mut triangles = Vec::with_capacity(6 * n * n);
    for k in 1..=n {
        for s in 0..6 {
            let outer = |i: usize| ring_node(k, s * k + i);
            let inner = |i: usize| ring_node(k - 1, s * (k - 1) + i);
            for i in 0..k {
                triangles.push([outer(i), outer(i + 1), inner(i.min(k.saturating_sub(1)))]);
            }
            for i in 0..k.saturating_sub(1) {
                triangles.push([inner(i + 1), inner(i), outer(i + 1)]);
            }
        }
    }

    Mesh::from_cells(vertices, triangles, None).expect("ring construction is valid")
}

/// Structured grid of a `w x d` rectangle anchored at the origin.
fn rect_grid(w: f64, d: f64, h: f64) -> Result<Mesh> {
    let nx = (w / h).ceil().max(1.0) as usize;
    let ny = (d / h).ceil().max(1.0) as usize;
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            vertices.push([w * i as f64 / nx as f64, d * j as f64 / ny as f64]);
        }
    }
    let at = |i: usize, j: usize| j * (nx + 1) + i;
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            triangles.push([at(i, j), at(i + 1, j), at(i + 1, j + 1)]);
            triangles.push([at(i, j), at(i + 1, j + 1), at(i, j + 1)]);
        }
    }
    Mesh::from_cells(vertices, triangles, None)
}

fn polygon_mesh(poly: &[[f64; 2]], h: f64) -> Result<Mesh> {
    if poly.len() < 3 {
        return Err(Error::DegeneratePolygon(format!(
            "need at least 3 vertices, got {}",
            poly.len()
        )));
    }
    let mut poly: Vec<[f64; 2]> = poly.to_vec();
    let area2: f64 = polygon_signed_area2(&poly);
    let diameter = polygon_diameter(&poly);
    if area2.abs() < 1e-14 * diameter * diameter {
        return Err(Error::DegeneratePolygon("polygon has zero area".into()));
    }
    if area2 < 0.0 {
        poly.reverse();
    }
    if self_intersects(&poly) {
        return Err(Error::DegeneratePolygon("polygon is self-intersecting".into()));
    }
    check_target_h(h, diameter)?;

    let triangles = if is_convex_polygon(&poly) {
        fan_triangulation(&mut poly)
    } else {
        ear_clip(&poly)?
    };
    let mut mesh = Mesh::from_cells(poly, triangles, None)?;
    // Uniform splits until the requested resolution is met. Polygon area is
    // preserved exactly by midpoint refinement.
    let mut passes = 0;
    while mesh.max_edge_length() > 1.45 * h {
        mesh = mesh.refine();
        passes += 1;
        if passes > 16 {
            return Err(Error::InvalidDomain(
                "polygon refinement failed to reach target_h".into(),
            ));
        }
    }
    Ok(mesh)
}

/// Fan about the centroid; only valid for convex polygons. Appends the
/// centroid as an extra vertex and returns the triangle list.
fn fan_triangulation(poly: &mut Vec<[f64; 2]>) -> Vec<[usize; 3]> {
    let n = poly.len();
    let mut cx = 0.0;
    let mut cy = 0.0;
    let mut a2 = 0.0;
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let w = cross(p, q);
        cx += (p[0] + q[0]) * w;
        cy += (p[1] + q[1]) * w;
        a2 += w;
    }
    poly.push([cx / (3.0 * a2), cy / (3.0 * a2)]);
    (0..n).map(|i| [n, i, (i + 1) % n]).collect()
}

/// O(n^2) ear clipping for simple, counterclockwise polygons.
fn ear_clip(poly: &[[f64; 2]]) -> Result<Vec<[usize; 3]>> {
    let n = poly.len();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut triangles = Vec::with_capacity(n - 2);
    let mut guard = 0;
    while remaining.len() > 3 {
        let m = remaining.len();
        let mut clipped = false;
        for k in 0..m {
            let ia = remaining[(k + m - 1) % m];
            let ib = remaining[k];
            let ic = remaining[(k + 1) % m];
            let (a, b, c) = (poly[ia], poly[ib], poly[ic]);
            if cross(sub(b, a), sub(c, b)) <= 0.0 {
                continue; // reflex corner
            }
            let mut contains = false;
            for &j in &remaining {
                if j == ia || j == ib || j == ic {
                    continue;
                }
                if point_in_triangle(poly[j], a, b, c) {
                    contains = true;
                    break;
                }
            }
            if contains {
                continue;
            }
            triangles.push([ia, ib, ic]);
            remaining.remove(k);
            clipped = true;
            break;
        }
        if !clipped {
            return Err(Error::DegeneratePolygon("ear clipping failed".into()));
        }
        guard += 1;
        if guard > 4 * n {
            return Err(Error::DegeneratePolygon("ear clipping did not terminate".into()));
        }
    }
    triangles.push([remaining[0], remaining[1], remaining[2]]);
    Ok(triangles)
}

fn point_in_triangle(p: [f64; 2], a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> bool {
    let d1 = cross(sub(b, a), sub(p, a));
    let d2 = cross(sub(c, b), sub(p, b));
    let d3 = cross(sub(a, c), sub(p, c));
    d1 >= 0.0 && d2 >= 0.0 && d3 >= 0.0
}

fn polygon_signed_area2(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    (0..n).map(|i| cross(poly[i], poly[(i + 1) % n])).sum()
}

fn polygon_diameter(poly: &[[f64; 2]]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..poly.len() {
        for j in i + 1..poly.len() {
            d = d.max(dist(poly[i], poly[j]));
        }
    }
    d
}

fn is_convex_polygon(poly: &[[f64; 2]]) -> bool {
    let n = poly.len();
    (0..n).all(|i| {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let c = poly[(i + 2) % n];
        cross(sub(b, a), sub(c, b)) >= -1e-14 * dist(a, b) * dist(b, c)
    })
}

/// Segment intersection test over non-adjacent polygon edges.
fn self_intersects(poly: &[[f64; 2]]) -> bool {
    let n = poly.len();
    for i in 0..n {
        let (a1, a2) = (poly[i], poly[(i + 1) % n]);
        for j in i + 1..n {
            // skip adjacent edges (shared endpoints)
            if j == i || (j + 1) % n == i || (i + 1) % n == j {
                continue;
            }
            let (b1, b2) = (poly[j], poly[(j + 1) % n]);
            if segments_intersect(a1, a2, b1, b2) {
                return true;
            }
        }
    }
    false
}

fn segments_intersect(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2]) -> bool {
    let d1 = cross(sub(p2, p1), sub(q1, p1));
    let d2 = cross(sub(p2, p1), sub(q2, p1));
    let d3 = cross(sub(q2, q1), sub(p1, q1));
    let d4 = cross(sub(q2, q1), sub(p2, q1));
    (d1 * d2 < 0.0) && (d3 * d4 < 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn square_mesh_has_exact_area() {
        let mesh = generate_mesh(&DomainSpec::square(1.0, 0.5)).unwrap();
        assert!((mesh.total_area() - 1.0).abs() < 1e-14);
        assert!(mesh.max_edge_length() <= 1.5 * 0.5);
        mesh.validate().unwrap();
    }

    #[test]
    fn disk_mesh_area_converges_to_pi() {
        let mesh = generate_mesh(&DomainSpec::disk(1.0, 0.1)).unwrap();
        let area = mesh.total_area();
        assert!((area - PI).abs() / PI < 0.01, "area {area}");
        assert!(mesh.max_edge_length() <= 0.15);
        let finer = mesh.refine();
        assert!((finer.total_area() - PI).abs() < (area - PI).abs());
        mesh.validate().unwrap();
    }

    #[test]
    fn disk_refinement_monotone_over_three_passes() {
        let mut mesh = generate_mesh(&DomainSpec::disk(1.0, 0.25)).unwrap();
        let mut err = (mesh.total_area() - PI).abs();
        for _ in 0..3 {
            mesh = mesh.refine();
            let next = (mesh.total_area() - PI).abs();
            assert!(next < err);
            err = next;
        }
    }

    #[test]
    fn degenerate_polygon_is_rejected() {
        let err = generate_mesh(&DomainSpec::polygon(vec![[0.0, 0.0], [1.0, 0.0]], 0.1))
            .unwrap_err();
        assert!(err.to_string().contains("degenerate polygon"));
    }

    #[test]
    fn self_intersecting_polygon_is_rejected() {
        // Bowtie
        let poly = vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]];
        let err = generate_mesh(&DomainSpec::polygon(poly, 0.2)).unwrap_err();
        assert!(err.to_string().contains("degenerate polygon"));
    }

    #[test]
    fn target_h_larger_than_diameter_is_rejected() {
        let err = generate_mesh(&DomainSpec::disk(1.0, 3.0)).unwrap_err();
        assert!(matches!(err, Error::TargetHTooLarge { .. }));
    }

    #[test]
    fn nonconvex_polygon_meshes() {
        // L-shape
        let poly = vec![
            [0.0, 0.0],
            [2.0, 0.0],
            [2.0, 1.0],
            [1.0, 1.0],
            [1.0, 2.0],
            [0.0, 2.0],
        ];
        let mesh = generate_mesh(&DomainSpec::polygon(poly, 0.3)).unwrap();
        assert!((mesh.total_area() - 3.0).abs() < 1e-12);
        mesh.validate().unwrap();
    }

    #[test]
    fn ellipse_mesh_area_close_to_analytic() {
        let mesh = generate_mesh(&DomainSpec::ellipse(2.0, 1.0, 0.1)).unwrap();
        assert!((mesh.total_area() - 2.0 * PI).abs() / (2.0 * PI) < 0.01);
        mesh.validate().unwrap();
    }

    #[test]
    fn boundary_vertices_lie_on_curve() {
        let mesh = generate_mesh(&DomainSpec::disk(1.0, 0.2)).unwrap().refine();
        for &i in &mesh.boundary_vertices() {
            let r = mesh.vertices[i][0].hypot(mesh.vertices[i][1]);
            assert!((r - 1.0).abs() < 1e-12 * 2.0);
        }
    }

    #[test]
    fn rectangle_grid_counts() {
        let mesh = generate_mesh(&DomainSpec::rectangle(2.0, 1.0, 0.5)).unwrap();
        assert!((mesh.total_area() - 2.0).abs() < 1e-14);
        assert_eq!(mesh.triangle_count(), 2 * 4 * 2);
    }
}
