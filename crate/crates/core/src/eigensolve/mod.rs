//! Solvers for the first Robin/Dirichlet eigenvalue of the p-Laplacian, the
//! Robin source problem, the torsion problem and the constant-flux limit
//! problem.
//!
//! For p = 2 the eigenvalue is computed by inverse power iteration on the
//! generalized symmetric pencil (stiffness + beta * boundary mass, volume
//! mass). For p != 2 an inverse-power-type fixed point is used: each outer
//! step solves a strictly convex problem by damped Newton on the regularized
//! energy, renormalizes, and updates the eigenvalue from the Rayleigh
//! quotient.

pub(crate) mod assemble;
mod newton;
mod source;

pub use source::{
    apply_mass, neumann_flux_solve, robin_source_solve, source_weak_residual, torsion,
    NeumannFluxResult, RobinSolveResult, TorsionResult,
};

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fem::{self, ScalarField};
use crate::linalg::{cg_solve, dot, norm, Csr};
use crate::mesh::Mesh;

/// Deterministic pseudo-random stream for seeded initial-guess perturbations.
pub(crate) struct SplitMix64(u64);

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [-1, 1).
    pub fn next_sym(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (2.0 / 9007199254740992.0) - 1.0
    }
}

/// Iteration controls shared by all solvers.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Relative eigenvalue tolerance.
    pub tol: f64,
    /// Outer iteration cap.
    pub max_outer: usize,
    /// Inner (conjugate gradient) iteration cap.
    pub max_inner: usize,
    /// Gradient regularization floor for p != 2.
    pub epsilon_reg: f64,
    /// Seed for the initial-guess perturbation.
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-9, max_outer: 400, max_inner: 20_000, epsilon_reg: 1e-10, seed: 42 }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidOptions("tol must be positive".into()));
        }
        if self.max_outer == 0 || self.max_inner == 0 {
            return Err(Error::InvalidOptions("iteration caps must be at least 1".into()));
        }
        if self.epsilon_reg < 0.0 {
            return Err(Error::InvalidOptions("epsilon_reg must be nonnegative".into()));
        }
        Ok(())
    }

    fn residual_tol(&self) -> f64 {
        (self.tol * 1e3).clamp(1e-12, 1e-6)
    }
}

/// Converged eigenpair with diagnostics. The eigenfunction is nonnegative
/// and normalized so that int |u|^p dx = 1.
#[derive(Debug, Clone)]
pub struct EigenResult {
    pub lambda: f64,
    pub eigenfunction: ScalarField,
    /// Relative norm of the discrete weak residual.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Eigenvalue estimate per outer iteration.
    pub trace: Vec<f64>,
}

/// First eigenvalue of the p-Laplacian with Robin parameter `beta`.
pub fn robin_eigenvalue(
    mesh: &Arc<Mesh>,
    p: f64,
    beta: f64,
    opts: &SolverOptions,
) -> Result<EigenResult> {
    fem::check_exponent(p)?;
    opts.validate()?;
    if beta == 0.0 {
        return Ok(constant_eigenpair(mesh, p));
    }
    if (p - 2.0).abs() < 1e-14 {
        eigen_linear(mesh, beta, false, opts)
    } else {
        if beta < 0.0 {
            // The inner problems lose convexity; only the linear theory is
            // verified for negative beta.
            return Err(Error::IndefiniteForm { beta });
        }
        eigen_fixed_point(mesh, p, beta, false, opts)
    }
}

/// First Dirichlet eigenvalue of the p-Laplacian (boundary values pinned
/// to zero).
pub fn dirichlet_eigenvalue(mesh: &Arc<Mesh>, p: f64, opts: &SolverOptions) -> Result<EigenResult> {
    fem::check_exponent(p)?;
    opts.validate()?;
    if (p - 2.0).abs() < 1e-14 {
        eigen_linear(mesh, 0.0, true, opts)
    } else {
        eigen_fixed_point(mesh, p, 0.0, true, opts)
    }
}

fn constant_eigenpair(mesh: &Arc<Mesh>, p: f64) -> EigenResult {
    let area = mesh.total_area();
    let c = area.powf(-1.0 / p);
    let eigenfunction = ScalarField::constant(mesh.clone(), c);
    EigenResult {
        lambda: 0.0,
        eigenfunction,
        residual: 0.0,
        iterations: 0,
        converged: true,
        trace: vec![0.0],
    }
}

fn initial_guess(mesh: &Mesh, seed: u64, constrained: Option<&[bool]>) -> Vec<f64> {
    let n = mesh.vertex_count();
    let mut rng = SplitMix64::new(seed);
    let mut u: Vec<f64> = (0..n).map(|_| 1.0 + 1e-3 * rng.next_sym()).collect();
    if let Some(mask) = constrained {
        for (ui, &fixed) in u.iter_mut().zip(mask) {
            if fixed {
                *ui = 0.0;
            }
        }
    }
    u
}

/// Inverse power iteration for the symmetric pencil (K + beta*B, M), with a
/// negative shift when beta < 0 so the shifted matrix stays positive
/// definite.
fn eigen_linear(
    mesh: &Arc<Mesh>,
    beta: f64,
    dirichlet: bool,
    opts: &SolverOptions,
) -> Result<EigenResult> {
    let n = mesh.vertex_count();
    let stiff = assemble::stiffness(mesh);
    let mass = assemble::volume_mass(mesh);
    let mask = dirichlet.then(|| mesh.boundary_mask());

    let mut a_trip: Vec<(usize, usize, f64)> = csr_triplets(&stiff);
    if beta != 0.0 && !dirichlet {
        let bmass = assemble::boundary_mass(mesh);
        for (r, c, v) in csr_triplets(&bmass) {
            a_trip.push((r, c, beta * v));
        }
    }
    let mut m_trip = csr_triplets(&mass);
    if let Some(mask) = &mask {
        assemble::eliminate_dirichlet(&mut a_trip, mask);
        m_trip.retain(|&(r, c, _)| !mask[r] && !mask[c]);
    }
    let a = Csr::from_triplets(n, &mut a_trip);
    let m = Csr::from_triplets(n, &mut m_trip);

    // Lower shifts keep A - sigma*M positive definite for negative beta.
    let mut sigma = if beta >= 0.0 {
        0.0
    } else {
        2.0 * beta * mesh.perimeter() / mesh.total_area() - 1.0
    };

    let mut attempt = 0;
    loop {
        let beta_render = if dirichlet { 0.0 } else { beta };
        match inverse_iteration(mesh, &a, &m, sigma, mask.as_deref(), beta_render, opts) {
            Ok(result) => {
                if result.lambda < -1e9 {
                    return Err(Error::IndefiniteForm { beta });
                }
                return Ok(result);
            }
            Err(Error::IndefiniteForm { .. }) if attempt < 8 && beta < 0.0 => {
                sigma = 2.0 * sigma - 1.0;
                attempt += 1;
            }
            Err(e) => return Err(e),
        }
    }
}

fn csr_triplets(a: &Csr) -> Vec<(usize, usize, f64)> {
    let mut trip = Vec::with_capacity(a.vals.len());
    for r in 0..a.n {
        for k in a.row_ptr[r]..a.row_ptr[r + 1] {
            trip.push((r, a.col_idx[k], a.vals[k]));
        }
    }
    trip
}

#[allow(clippy::too_many_arguments)]
fn inverse_iteration(
    mesh: &Arc<Mesh>,
    a: &Csr,
    m: &Csr,
    sigma: f64,
    mask: Option<&[bool]>,
    beta: f64,
    opts: &SolverOptions,
) -> Result<EigenResult> {
    let n = a.n;
    let shifted = if sigma == 0.0 {
        None
    } else {
        let mut trip = csr_triplets(a);
        for (r, c, v) in csr_triplets(m) {
            trip.push((r, c, -sigma * v));
        }
        Some(Csr::from_triplets(n, &mut trip))
    };
    let op = shifted.as_ref().unwrap_or(a);

    let mut u = initial_guess(mesh, opts.seed, mask);
    let mut mu = vec![0.0; n];
    m.matvec(&u, &mut mu);
    let mnorm = dot(&u, &mu).sqrt();
    for ui in u.iter_mut() {
        *ui /= mnorm;
    }

    let mut au = vec![0.0; n];
    a.matvec(&u, &mut au);
    m.matvec(&u, &mut mu);
    let mut lambda = dot(&u, &au) / dot(&u, &mu);
    let mut trace = vec![lambda];
    let mut residual = f64::INFINITY;
    let res_tol = opts.residual_tol();

    for it in 1..=opts.max_outer {
        m.matvec(&u, &mut mu);
        let mut x = u.clone();
        let out = cg_solve(op, &mu, &mut x, 1e-12, opts.max_inner, false);
        if out.indefinite {
            return Err(Error::IndefiniteForm { beta: sigma });
        }
        m.matvec(&x, &mut mu);
        let mnorm = dot(&x, &mu).sqrt();
        if !(mnorm > 0.0) {
            return Err(Error::NonConvergence { iterations: it, residual });
        }
        for xi in x.iter_mut() {
            *xi /= mnorm;
        }
        if mu.iter().sum::<f64>() / mnorm < 0.0 {
            for xi in x.iter_mut() {
                *xi = -*xi;
            }
        }
        a.matvec(&x, &mut au);
        m.matvec(&x, &mut mu);
        let lambda_new = dot(&x, &au) / dot(&x, &mu);
        let mut rnorm2 = 0.0;
        let mut scale2 = 0.0;
        for i in 0..n {
            let r = au[i] - lambda_new * mu[i];
            rnorm2 += r * r;
            scale2 += au[i] * au[i];
        }
        residual = (rnorm2 / scale2.max(1e-300)).sqrt();
        let dl = (lambda_new - lambda).abs();
        lambda = lambda_new;
        u = x;
        trace.push(lambda);
        if dl <= opts.tol * lambda.abs().max(1.0) && residual <= res_tol {
            return Ok(finalize_eigen(mesh, u, 2.0, beta, residual, it, true, trace));
        }
    }
    let its = opts.max_outer;
    Ok(finalize_eigen(mesh, u, 2.0, beta, residual, its, false, trace))
}

/// Inverse-power fixed point for p != 2: given u_k, minimize
/// (1/p) E_beta(u) - lambda_k <|u_k|^{p-2} u_k, u>, renormalize, update
/// lambda from the Rayleigh quotient.
fn eigen_fixed_point(
    mesh: &Arc<Mesh>,
    p: f64,
    beta: f64,
    dirichlet: bool,
    opts: &SolverOptions,
) -> Result<EigenResult> {
    let mask = dirichlet.then(|| mesh.boundary_mask());
    let beta_eff = if dirichlet { 0.0 } else { beta };

    let mut u = initial_guess(mesh, opts.seed, mask.as_deref());
    normalize_p(mesh, &mut u, p);
    let mut lambda = rayleigh_raw(mesh, &u, p, beta_eff)?;
    let mut trace = vec![lambda];
    let mut residual = f64::INFINITY;
    let res_tol = opts.residual_tol().max(1e-9);
    let mut full_continuation = true;
    let mut best_residual = f64::INFINITY;
    let mut stagnant = 0usize;

    for it in 1..=opts.max_outer {
        let g: Vec<f64> = u.iter().map(|&v| signed_power(v, p)).collect();
        let mut load = assemble::mass_load(mesh, &g);
        let scale = lambda.max(1.0);
        for l in load.iter_mut() {
            *l *= scale;
        }
        let prob = newton::ConvexProblem {
            mesh,
            p,
            beta: beta_eff,
            load: &load,
            constrained: mask.as_deref(),
            project_constants: false,
        };
        let (mut w, stats) = newton::solve_convex(&prob, u.clone(), opts, full_continuation)?;
        full_continuation = !stats.converged;
        normalize_p(mesh, &mut w, p);
        if volume_integral_raw(mesh, &w) < 0.0 {
            for wi in w.iter_mut() {
                *wi = -*wi;
            }
        }
        let lambda_new = rayleigh_raw(mesh, &w, p, beta_eff)?;
        residual = eigen_residual(mesh, &w, p, beta_eff, mask.as_deref());
        let dl = (lambda_new - lambda).abs();
        lambda = lambda_new;
        u = w;
        trace.push(lambda);
        let lambda_stable = dl <= opts.tol * lambda.abs().max(1.0);
        if lambda_stable && residual <= res_tol {
            return Ok(finalize_eigen(mesh, u, p, beta_eff, residual, it, true, trace));
        }
        if residual < 0.98 * best_residual {
            best_residual = residual;
            stagnant = 0;
        } else {
            stagnant += 1;
        }
        // Near the exponent range limits the inner solves hit their f64
        // floor above res_tol; once both the eigenvalue and the residual
        // have stopped moving, further outer iterations cannot help.
        if lambda_stable && stagnant >= 8 {
            return Ok(finalize_eigen(
                mesh,
                u,
                p,
                beta_eff,
                residual,
                it,
                residual <= res_tol,
                trace,
            ));
        }
    }
    let its = opts.max_outer;
    Ok(finalize_eigen(mesh, u, p, beta_eff, residual, its, false, trace))
}

fn signed_power(v: f64, p: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v.abs().powf(p - 2.0) * v
    }
}

fn normalize_p(mesh: &Mesh, u: &mut [f64], p: f64) {
    let np = volume_q_raw(mesh, u, p);
    let scale = np.powf(-1.0 / p);
    for ui in u.iter_mut() {
        *ui *= scale;
    }
}

fn volume_q_raw(mesh: &Mesh, u: &[f64], q: f64) -> f64 {
    let mut total = 0.0;
    for (t, &[i, j, k]) in mesh.triangles.iter().enumerate() {
        let area = mesh.triangle_area(t);
        let mut acc = 0.0;
        for (bary, w) in fem::TRI_QUAD {
            let val = bary[0] * u[i] + bary[1] * u[j] + bary[2] * u[k];
            acc += w * val.abs().powf(q);
        }
        total += area * acc;
    }
    total
}

fn volume_integral_raw(mesh: &Mesh, u: &[f64]) -> f64 {
    let mut total = 0.0;
    for (t, &[i, j, k]) in mesh.triangles.iter().enumerate() {
        total += mesh.triangle_area(t) / 3.0 * (u[i] + u[j] + u[k]);
    }
    total
}

fn rayleigh_raw(mesh: &Arc<Mesh>, u: &[f64], p: f64, beta: f64) -> Result<f64> {
    let field = ScalarField { mesh: mesh.clone(), values: u.to_vec() };
    fem::rayleigh_quotient(&field, p, beta)
}

/// Relative weak residual || A_p(u) + beta B_p'(u) - c M g(u) || with the
/// self-consistent multiplier c.
fn eigen_residual(mesh: &Mesh, u: &[f64], p: f64, beta: f64, mask: Option<&[bool]>) -> f64 {
    let mut avec = assemble::weak_operator(mesh, u, p, beta);
    let g: Vec<f64> = u.iter().map(|&v| signed_power(v, p)).collect();
    let mut mg = assemble::mass_load(mesh, &g);
    let c = dot(&avec, u) / dot(&mg, u).max(1e-300);
    for i in 0..avec.len() {
        avec[i] -= c * mg[i];
    }
    if let Some(mask) = mask {
        // Constrained rows hold the reaction terms of the pinned values,
        // not equations of the eigenpair.
        for ((ai, mi), &fixed) in avec.iter_mut().zip(mg.iter_mut()).zip(mask) {
            if fixed {
                *ai = 0.0;
                *mi = 0.0;
            }
        }
    }
    let scale: f64 = c * norm(&mg);
    norm(&avec) / scale.abs().max(1e-300)
}

#[allow(clippy::too_many_arguments)]
fn finalize_eigen(
    mesh: &Arc<Mesh>,
    mut u: Vec<f64>,
    p: f64,
    beta: f64,
    residual: f64,
    iterations: usize,
    converged: bool,
    mut trace: Vec<f64>,
) -> EigenResult {
    let maxabs = u.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    // First eigenfunctions are one-signed; clamp stray negatives at
    // round-off scale and renormalize.
    for ui in u.iter_mut() {
        if *ui < 0.0 && *ui >= -1e-12 * maxabs {
            *ui = 0.0;
        }
    }
    normalize_p(mesh, &mut u, p);
    let eigenfunction = ScalarField { mesh: mesh.clone(), values: u };
    let lambda = fem::rayleigh_quotient(&eigenfunction, p, beta)
        .expect("finalized eigenfunction is nonzero");
    if let Some(last) = trace.last_mut() {
        *last = lambda;
    }
    EigenResult { lambda, eigenfunction, residual, iterations, converged, trace }
}
