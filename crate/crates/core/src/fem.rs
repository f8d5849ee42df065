//! Discrete energies, norms and quotients on P1 (piecewise linear) fields.
//!
//! Gradients of P1 fields are constant per triangle, so the p-Dirichlet
//! energy is integrated exactly. Boundary integrals use a 3-point Gauss rule
//! per edge, volume integrals of |u|^q a 6-point degree-4 rule per triangle.
//! Summation order is fixed (triangle/edge index order) so results are
//! bit-reproducible run to run.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mesh::Mesh;

/// Supported exponent range; outside it the regularized solvers degrade.
pub const P_MIN: f64 = 1.1;
pub const P_MAX: f64 = 10.0;

pub fn check_exponent(p: f64) -> Result<()> {
    if (P_MIN..=P_MAX).contains(&p) {
        Ok(())
    } else {
        Err(Error::ExponentRange(p))
    }
}

/// Conjugate exponent p' = p / (p - 1).
pub fn conjugate(p: f64) -> f64 {
    p / (p - 1.0)
}

/// 3-point Gauss-Legendre rule on [0, 1]: positions and weights.
pub const EDGE_GAUSS: [(f64, f64); 3] = [
    (0.11270166537925831, 0.2777777777777778),
    (0.5, 0.4444444444444444),
    (0.8872983346207417, 0.2777777777777778),
];

/// 6-point degree-4 rule on the reference triangle, barycentric coordinates
/// and weights normalized to sum to 1.
pub const TRI_QUAD: [([f64; 3], f64); 6] = [
    ([0.108103018168070, 0.445948490915965, 0.445948490915965], 0.223381589678011),
    ([0.445948490915965, 0.108103018168070, 0.445948490915965], 0.223381589678011),
    ([0.445948490915965, 0.445948490915965, 0.108103018168070], 0.223381589678011),
    ([0.816847572980459, 0.091576213509771, 0.091576213509771], 0.109951743655322),
    ([0.091576213509771, 0.816847572980459, 0.091576213509771], 0.109951743655322),
    ([0.091576213509771, 0.091576213509771, 0.816847572980459], 0.109951743655322),
];

/// One value per mesh vertex; the nodal interpolant of a scalar field.
#[derive(Debug, Clone)]
pub struct ScalarField {
    pub mesh: Arc<Mesh>,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn new(mesh: Arc<Mesh>, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.vertex_count() {
            return Err(Error::FieldLength {
                got: values.len(),
                expected: mesh.vertex_count(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteField(i));
        }
        Ok(Self { mesh, values })
    }

    pub fn constant(mesh: Arc<Mesh>, value: f64) -> Self {
        let n = mesh.vertex_count();
        Self { mesh, values: vec![value; n] }
    }

    /// Nodal interpolant of a function of position.
    pub fn from_fn(mesh: Arc<Mesh>, f: impl Fn([f64; 2]) -> f64) -> Result<Self> {
        let values = mesh.vertices.iter().map(|&v| f(v)).collect();
        Self::new(mesh, values)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            mesh: self.mesh.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }
}

/// One 2D vector per triangle; piecewise constant.
#[derive(Debug, Clone)]
pub struct VectorField {
    pub mesh: Arc<Mesh>,
    pub vectors: Vec<[f64; 2]>,
}

impl VectorField {
    pub fn new(mesh: Arc<Mesh>, vectors: Vec<[f64; 2]>) -> Result<Self> {
        if vectors.len() != mesh.triangle_count() {
            return Err(Error::FieldLength {
                got: vectors.len(),
                expected: mesh.triangle_count(),
            });
        }
        if let Some(i) = vectors
            .iter()
            .position(|v| !v[0].is_finite() || !v[1].is_finite())
        {
            return Err(Error::NonFiniteField(i));
        }
        Ok(Self { mesh, vectors })
    }
}

/// Constant gradient of the P1 field on triangle `t`.
pub fn triangle_gradient(mesh: &Mesh, values: &[f64], t: usize) -> [f64; 2] {
    let [i, j, k] = mesh.triangles[t];
    let (a, b, c) = (mesh.vertices[i], mesh.vertices[j], mesh.vertices[k]);
    let area2 = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    let (ui, uj, uk) = (values[i], values[j], values[k]);
    // grad = sum_i u_i * grad(phi_i), with grad(phi_i) from the edge normals
    let gx = (ui * (b[1] - c[1]) + uj * (c[1] - a[1]) + uk * (a[1] - b[1])) / area2;
    let gy = (ui * (c[0] - b[0]) + uj * (a[0] - c[0]) + uk * (b[0] - a[0])) / area2;
    [gx, gy]
}

/// Piecewise-constant gradient of a P1 field.
pub fn gradient(u: &ScalarField) -> VectorField {
    let mesh = &u.mesh;
    let vectors = (0..mesh.triangle_count())
        .map(|t| triangle_gradient(mesh, &u.values, t))
        .collect();
    VectorField { mesh: u.mesh.clone(), vectors }
}

/// Integral of |grad u|^p over the domain; exact for P1 fields.
pub fn p_dirichlet_energy(u: &ScalarField, p: f64) -> Result<f64> {
    check_exponent(p)?;
    let mesh = &u.mesh;
    let mut total = 0.0;
    for t in 0..mesh.triangle_count() {
        let g = triangle_gradient(mesh, &u.values, t);
        let g2 = g[0] * g[0] + g[1] * g[1];
        if g2 > 0.0 {
            total += mesh.triangle_area(t) * g2.powf(p / 2.0);
        }
    }
    Ok(total)
}

/// Integral of |u|^p over the boundary, 3-point Gauss per edge on the
/// linear edge restriction.
pub fn boundary_p_norm(u: &ScalarField, p: f64) -> Result<f64> {
    if p <= 1.0 {
        return Err(Error::ExponentTooSmall(p, 1.0));
    }
    let mesh = &u.mesh;
    let mut total = 0.0;
    for e in &mesh.boundary_edges {
        let len = mesh.edge_length(e);
        let (ua, ub) = (u.values[e.v[0]], u.values[e.v[1]]);
        let mut acc = 0.0;
        for (s, w) in EDGE_GAUSS {
            let val = ua + (ub - ua) * s;
            acc += w * val.abs().powf(p);
        }
        total += len * acc;
    }
    Ok(total)
}

/// Integral of |u|^q over the domain via the per-triangle quadrature rule.
pub fn volume_q_integral(u: &ScalarField, q: f64) -> f64 {
    let mesh = &u.mesh;
    let mut total = 0.0;
    for (t, &[i, j, k]) in mesh.triangles.iter().enumerate() {
        let area = mesh.triangle_area(t);
        let (ui, uj, uk) = (u.values[i], u.values[j], u.values[k]);
        let mut acc = 0.0;
        for (bary, w) in TRI_QUAD {
            let val = bary[0] * ui + bary[1] * uj + bary[2] * uk;
            acc += w * val.abs().powf(q);
        }
        total += area * acc;
    }
    total
}

/// L^q norm over the domain.
pub fn lp_norm(u: &ScalarField, q: f64) -> Result<f64> {
    if q < 1.0 {
        return Err(Error::ExponentTooSmall(q, 1.0));
    }
    Ok(volume_q_integral(u, q).powf(1.0 / q))
}

/// Exact integral of the product of two P1 fields (degree 2 <= rule degree).
pub fn volume_product_integral(u: &ScalarField, v: &ScalarField) -> f64 {
    let mesh = &u.mesh;
    let mut total = 0.0;
    for (t, &[i, j, k]) in mesh.triangles.iter().enumerate() {
        let area = mesh.triangle_area(t);
        let su = u.values[i] + u.values[j] + u.values[k];
        let sv = v.values[i] + v.values[j] + v.values[k];
        let prod =
            u.values[i] * v.values[i] + u.values[j] * v.values[j] + u.values[k] * v.values[k];
        // consistent P1 mass: area/12 * (su*sv + sum_i u_i v_i * ... )
        total += area / 12.0 * (su * sv + prod);
    }
    total
}

/// Integral of a P1 field over the domain.
pub fn volume_integral(u: &ScalarField) -> f64 {
    let mesh = &u.mesh;
    let mut total = 0.0;
    for (t, &[i, j, k]) in mesh.triangles.iter().enumerate() {
        total += mesh.triangle_area(t) / 3.0 * (u.values[i] + u.values[j] + u.values[k]);
    }
    total
}

/// Integral of a P1 field over the boundary (exact, trapezoid per edge).
pub fn boundary_integral(u: &ScalarField) -> f64 {
    let mesh = &u.mesh;
    let mut total = 0.0;
    for e in &mesh.boundary_edges {
        total += mesh.edge_length(e) * 0.5 * (u.values[e.v[0]] + u.values[e.v[1]]);
    }
    total
}

/// The Robin Rayleigh quotient
/// (int |grad u|^p + beta int_boundary |u|^p) / int |u|^p.
pub fn rayleigh_quotient(u: &ScalarField, p: f64, beta: f64) -> Result<f64> {
    if u.is_zero() {
        return Err(Error::ZeroField);
    }
    let num = p_dirichlet_energy(u, p)? + beta * boundary_p_norm(u, p)?;
    let den = volume_q_integral(u, p);
    if den == 0.0 {
        return Err(Error::ZeroField);
    }
    Ok(num / den)
}
