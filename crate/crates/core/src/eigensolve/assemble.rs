//! Matrix and operator assembly on P1 triangulations.
//!
//! The linear (p = 2) forms are assembled exactly. The nonlinear p-energy
//! uses the regularized weight (|grad u|^2 + eps^2)^((p-2)/2) on triangles
//! and the matching 3-point Gauss rule on boundary edges, identical to the
//! quadratures in [`crate::fem`], so discrete identities close exactly.

use crate::fem::EDGE_GAUSS;
use crate::linalg::Csr;
use crate::mesh::Mesh;

/// Gradients of the three P1 basis functions on triangle `t`, with the area.
pub fn basis_gradients(mesh: &Mesh, t: usize) -> ([[f64; 2]; 3], f64) {
    let [i, j, k] = mesh.triangles[t];
    let (a, b, c) = (mesh.vertices[i], mesh.vertices[j], mesh.vertices[k]);
    let area2 = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    let g = [
        [(b[1] - c[1]) / area2, (c[0] - b[0]) / area2],
        [(c[1] - a[1]) / area2, (a[0] - c[0]) / area2],
        [(a[1] - b[1]) / area2, (b[0] - a[0]) / area2],
    ];
    (g, area2 / 2.0)
}

/// P1 stiffness matrix (int grad phi_i . grad phi_j).
pub fn stiffness(mesh: &Mesh) -> Csr {
    let n = mesh.vertex_count();
    let mut trip = Vec::with_capacity(9 * mesh.triangle_count());
    for t in 0..mesh.triangle_count() {
        let (g, area) = basis_gradients(mesh, t);
        let idx = mesh.triangles[t];
        for a in 0..3 {
            for b in 0..3 {
                trip.push((idx[a], idx[b], area * (g[a][0] * g[b][0] + g[a][1] * g[b][1])));
            }
        }
    }
    Csr::from_triplets(n, &mut trip)
}

/// Consistent P1 mass matrix (int phi_i phi_j).
pub fn volume_mass(mesh: &Mesh) -> Csr {
    let n = mesh.vertex_count();
    let mut trip = Vec::with_capacity(9 * mesh.triangle_count());
    for t in 0..mesh.triangle_count() {
        let area = mesh.triangle_area(t);
        let idx = mesh.triangles[t];
        for a in 0..3 {
            for b in 0..3 {
                let w = if a == b { area / 6.0 } else { area / 12.0 };
                trip.push((idx[a], idx[b], w));
            }
        }
    }
    Csr::from_triplets(n, &mut trip)
}

/// Boundary edge mass matrix (int_boundary phi_i phi_j).
pub fn boundary_mass(mesh: &Mesh) -> Csr {
    let n = mesh.vertex_count();
    let mut trip = Vec::with_capacity(4 * mesh.boundary_edges.len());
    for e in &mesh.boundary_edges {
        let len = mesh.edge_length(e);
        let [i, j] = e.v;
        trip.push((i, i, len / 3.0));
        trip.push((j, j, len / 3.0));
        trip.push((i, j, len / 6.0));
        trip.push((j, i, len / 6.0));
    }
    Csr::from_triplets(n, &mut trip)
}

/// Nodal load vector of a P1 density: load_i = int f phi_i (exact).
pub fn mass_load(mesh: &Mesh, f: &[f64]) -> Vec<f64> {
    let mut load = vec![0.0; mesh.vertex_count()];
    for (t, &[i, j, k]) in mesh.triangles.iter().enumerate() {
        let area = mesh.triangle_area(t);
        let s = f[i] + f[j] + f[k];
        load[i] += area / 12.0 * (s + f[i]);
        load[j] += area / 12.0 * (s + f[j]);
        load[k] += area / 12.0 * (s + f[k]);
    }
    load
}

/// Boundary load of the constant density 1: int_boundary phi_i.
pub fn boundary_unit_load(mesh: &Mesh) -> Vec<f64> {
    let mut load = vec![0.0; mesh.vertex_count()];
    for e in &mesh.boundary_edges {
        let half = mesh.edge_length(e) / 2.0;
        load[e.v[0]] += half;
        load[e.v[1]] += half;
    }
    load
}

/// Parameters of the regularized p-energy
/// (1/p) int (|grad u|^2 + eps^2)^(p/2) + (beta/p) int_b (u^2 + eps^2)^(p/2).
#[derive(Debug, Clone, Copy)]
pub struct PEnergy {
    pub p: f64,
    pub beta: f64,
    pub eps: f64,
}

impl PEnergy {
    fn vol_weight(&self, grad2: f64) -> f64 {
        (grad2 + self.eps * self.eps).powf((self.p - 2.0) / 2.0)
    }
}

/// Value of the regularized energy (without any load term).
pub fn p_energy(mesh: &Mesh, u: &[f64], par: &PEnergy) -> f64 {
    let eps2 = par.eps * par.eps;
    let mut total = 0.0;
    for t in 0..mesh.triangle_count() {
        let (g, area) = basis_gradients(mesh, t);
        let idx = mesh.triangles[t];
        let mut gx = 0.0;
        let mut gy = 0.0;
        for a in 0..3 {
            gx += u[idx[a]] * g[a][0];
            gy += u[idx[a]] * g[a][1];
        }
        total += area * (gx * gx + gy * gy + eps2).powf(par.p / 2.0) / par.p;
    }
    if par.beta != 0.0 {
        let mut btotal = 0.0;
        for e in &mesh.boundary_edges {
            let len = mesh.edge_length(e);
            let (ua, ub) = (u[e.v[0]], u[e.v[1]]);
            let mut acc = 0.0;
            for (s, w) in EDGE_GAUSS {
                let val = ua + (ub - ua) * s;
                acc += w * (val * val + eps2).powf(par.p / 2.0);
            }
            btotal += len * acc;
        }
        total += par.beta * btotal / par.p;
    }
    total
}

/// Gradient of the regularized energy, written into `out`.
pub fn p_gradient(mesh: &Mesh, u: &[f64], par: &PEnergy, out: &mut [f64]) {
    out.fill(0.0);
    for t in 0..mesh.triangle_count() {
        let (g, area) = basis_gradients(mesh, t);
        let idx = mesh.triangles[t];
        let mut gx = 0.0;
        let mut gy = 0.0;
        for a in 0..3 {
            gx += u[idx[a]] * g[a][0];
            gy += u[idx[a]] * g[a][1];
        }
        let w = par.vol_weight(gx * gx + gy * gy);
        for a in 0..3 {
            out[idx[a]] += area * w * (gx * g[a][0] + gy * g[a][1]);
        }
    }
    if par.beta != 0.0 {
        let eps2 = par.eps * par.eps;
        for e in &mesh.boundary_edges {
            let len = mesh.edge_length(e);
            let (ua, ub) = (u[e.v[0]], u[e.v[1]]);
            for (s, w) in EDGE_GAUSS {
                let val = ua + (ub - ua) * s;
                let wt = par.beta * len * w * (val * val + eps2).powf((par.p - 2.0) / 2.0) * val;
                out[e.v[0]] += wt * (1.0 - s);
                out[e.v[1]] += wt * s;
            }
        }
    }
}

/// Hessian triplets of the regularized energy at `u`. Symmetric positive
/// definite for p > 1 and beta >= 0 (semidefinite when beta = 0).
///
/// The Hessian uses its own regularization floors, relative to the current
/// gradient and trace scales: where |grad u| degenerates the exact Hessian
/// is nearly singular (p > 2) or blows up (p < 2), which starves the inner
/// CG solves. The floored Hessian stays symmetric positive definite and
/// still yields descent directions; the gradient keeps the exact epsilon.
pub fn p_hessian_triplets(
    mesh: &Mesh,
    u: &[f64],
    par: &PEnergy,
    condition_cap: f64,
) -> Vec<(usize, usize, f64)> {
    let mut gscale: f64 = 0.0;
    for t in 0..mesh.triangle_count() {
        let (g, _) = basis_gradients(mesh, t);
        let idx = mesh.triangles[t];
        let mut gx = 0.0;
        let mut gy = 0.0;
        for a in 0..3 {
            gx += u[idx[a]] * g[a][0];
            gy += u[idx[a]] * g[a][1];
        }
        gscale = gscale.max(gx * gx + gy * gy);
    }
    // The weight contrast between degenerate and typical gradients is
    // (scale^2 / eps^2)^{|p-2|/2}; choose the floor so it stays below the
    // condition cap regardless of p.
    let floor_ratio = condition_cap.powf(-2.0 / (par.p - 2.0).abs().max(1e-6));
    let eps2 = (par.eps * par.eps).max(gscale * floor_ratio);

    let mut trip =
        Vec::with_capacity(9 * mesh.triangle_count() + 12 * mesh.boundary_edges.len());
    for t in 0..mesh.triangle_count() {
        let (g, area) = basis_gradients(mesh, t);
        let idx = mesh.triangles[t];
        let mut gx = 0.0;
        let mut gy = 0.0;
        for a in 0..3 {
            gx += u[idx[a]] * g[a][0];
            gy += u[idx[a]] * g[a][1];
        }
        let grad2 = gx * gx + gy * gy;
        let w = (grad2 + eps2).powf((par.p - 2.0) / 2.0);
        let curv = w * (par.p - 2.0) / (grad2 + eps2);
        for a in 0..3 {
            let da = gx * g[a][0] + gy * g[a][1];
            for b in 0..3 {
                let db = gx * g[b][0] + gy * g[b][1];
                let val = area * (w * (g[a][0] * g[b][0] + g[a][1] * g[b][1]) + curv * da * db);
                trip.push((idx[a], idx[b], val));
            }
        }
    }
    if par.beta != 0.0 {
        let mut uscale: f64 = 0.0;
        for e in &mesh.boundary_edges {
            uscale = uscale.max(u[e.v[0]].abs()).max(u[e.v[1]].abs());
        }
        let beps2 = (par.eps * par.eps).max(uscale * uscale * floor_ratio);
        for e in &mesh.boundary_edges {
            let len = mesh.edge_length(e);
            let (ua, ub) = (u[e.v[0]], u[e.v[1]]);
            for (s, w) in EDGE_GAUSS {
                let val = ua + (ub - ua) * s;
                let v2 = val * val;
                let hw = par.beta
                    * len
                    * w
                    * (v2 + beps2).powf((par.p - 4.0) / 2.0)
                    * ((par.p - 1.0) * v2 + beps2);
                let phi = [1.0 - s, s];
                for a in 0..2 {
                    for b in 0..2 {
                        trip.push((e.v[a], e.v[b], hw * phi[a] * phi[b]));
                    }
                }
            }
        }
    }
    trip
}

/// Unregularized weak operator: r_i = int |grad u|^{p-2} grad u . grad phi_i
/// + beta int_b |u|^{p-2} u phi_i. Used for residual checks.
pub fn weak_operator(mesh: &Mesh, u: &[f64], p: f64, beta: f64) -> Vec<f64> {
    let mut out = vec![0.0; mesh.vertex_count()];
    let par = PEnergy { p, beta, eps: 0.0 };
    p_gradient(mesh, u, &par, &mut out);
    out
}

/// Applies homogeneous Dirichlet elimination to Hessian triplets in place:
/// constrained rows and columns are dropped and replaced by a unit diagonal.
pub fn eliminate_dirichlet(
    trip: &mut Vec<(usize, usize, f64)>,
    constrained: &[bool],
) {
    trip.retain(|&(r, c, _)| !constrained[r] && !constrained[c]);
    for (i, &fixed) in constrained.iter().enumerate() {
        if fixed {
            trip.push((i, i, 1.0));
        }
    }
}
