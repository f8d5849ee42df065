//! Damped Newton solver for the strictly convex inner problems
//! min (1/p) E_beta^eps(u) - <load, u>, with epsilon-continuation from 1e-2
//! down to the configured regularization floor.

use super::assemble::{eliminate_dirichlet, p_energy, p_gradient, p_hessian_triplets, PEnergy};
use super::SolverOptions;
use crate::error::{Error, Result};
use crate::linalg::{cg_solve, dot, norm, Csr};
use crate::mesh::Mesh;

pub struct ConvexProblem<'a> {
    pub mesh: &'a Mesh,
    pub p: f64,
    pub beta: f64,
    pub load: &'a [f64],
    /// Vertices pinned to zero (homogeneous Dirichlet), if any.
    pub constrained: Option<&'a [bool]>,
    /// Pure-Neumann mode: the Hessian null space is spanned by constants and
    /// the load is compatible; CG projects the constant component away.
    pub project_constants: bool,
}

impl ConvexProblem<'_> {
    /// Gradient of the objective at `u`, with constrained components zeroed
    /// and the constant component projected out in pure-Neumann mode.
    fn gradient(&self, u: &[f64], par: &PEnergy, out: &mut [f64]) {
        p_gradient(self.mesh, u, par, out);
        for (gi, li) in out.iter_mut().zip(self.load) {
            *gi -= li;
        }
        if let Some(mask) = self.constrained {
            for (gi, &fixed) in out.iter_mut().zip(mask) {
                if fixed {
                    *gi = 0.0;
                }
            }
        }
        if self.project_constants {
            let mean = out.iter().sum::<f64>() / out.len() as f64;
            for gi in out.iter_mut() {
                *gi -= mean;
            }
        }
    }

    fn objective(&self, u: &[f64], par: &PEnergy) -> f64 {
        p_energy(self.mesh, u, par) - dot(self.load, u)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct NewtonStats {
    pub newton_steps: usize,
    pub cg_iterations: usize,
    pub converged: bool,
    pub grad_norm: f64,
}

const EPS_START: f64 = 1e-2;
const ARMIJO: f64 = 1e-4;
const MAX_NEWTON_PER_STAGE: usize = 40;

/// Cap on the weight contrast of the assembled Hessian.
fn hessian_condition_cap(_p: f64) -> f64 {
    1e4
}

/// Geometric epsilon schedule from `start` down to `floor`.
fn schedule(start: f64, floor: f64) -> Vec<f64> {
    let mut eps = start.max(floor);
    let mut stages = vec![eps];
    while eps > floor * 1.0001 {
        eps = (eps * 0.1).max(floor);
        stages.push(eps);
    }
    stages
}

pub fn solve_convex(
    prob: &ConvexProblem<'_>,
    start: Vec<f64>,
    opts: &SolverOptions,
    full_continuation: bool,
) -> Result<(Vec<f64>, NewtonStats)> {
    let n = prob.mesh.vertex_count();
    assert_eq!(start.len(), n);
    let floor = opts.epsilon_reg.max(1e-14);
    let stages = if (prob.p - 2.0).abs() < 1e-14 {
        vec![0.0]
    } else if full_continuation {
        schedule(EPS_START, floor)
    } else {
        vec![floor]
    };

    let load_norm = norm(prob.load).max(1e-300);
    let gtol = load_norm * (opts.tol * 0.1).clamp(1e-11, 1e-8);

    let mut u = start;
    if let Some(mask) = prob.constrained {
        for (ui, &fixed) in u.iter_mut().zip(mask) {
            if fixed {
                *ui = 0.0;
            }
        }
    }

    let mut stats = NewtonStats::default();
    let mut grad = vec![0.0; n];
    let mut dir = vec![0.0; n];
    let mut gtrial = vec![0.0; n];

    for (si, &eps) in stages.iter().enumerate() {
        let par = PEnergy { p: prob.p, beta: prob.beta, eps };
        let last_stage = si + 1 == stages.len();
        // Intermediate stages only need a loose solve; the last stage is tight.
        let stage_tol = if last_stage { gtol } else { (gtol * 1e3).max(load_norm * 1e-8) };

        let mut stalls = 0;
        for _ in 0..MAX_NEWTON_PER_STAGE {
            prob.gradient(&u, &par, &mut grad);
            let gnorm = norm(&grad);
            stats.grad_norm = gnorm;
            if gnorm <= stage_tol {
                break;
            }

            let mut trip =
                p_hessian_triplets(prob.mesh, &u, &par, hessian_condition_cap(prob.p));
            if let Some(mask) = prob.constrained {
                eliminate_dirichlet(&mut trip, mask);
            }
            let hess = Csr::from_triplets(n, &mut trip);
            dir.fill(0.0);
            let rhs: Vec<f64> = grad.iter().map(|g| -g).collect();
            // Inexact Newton: a loose direction is enough, the gradient test
            // below decides convergence.
            let out = cg_solve(
                &hess,
                &rhs,
                &mut dir,
                1e-6,
                opts.max_inner.min(5000),
                prob.project_constants,
            );
            stats.cg_iterations += out.iterations;
            if out.indefinite {
                return Err(Error::IndefiniteForm { beta: prob.beta });
            }
            let mut slope = dot(&grad, &dir);
            if !slope.is_finite() || slope >= 0.0 {
                // CG returned a non-descent direction; fall back to steepest
                // descent scaled into the same magnitude.
                let scale = norm(&dir).max(1e-30) / gnorm.max(1e-30);
                for (di, gi) in dir.iter_mut().zip(&grad) {
                    *di = -gi * scale;
                }
                slope = dot(&grad, &dir);
            }

            let e0 = prob.objective(&u, &par);
            if slope >= -1e-15 * (e0.abs() + 1.0) {
                // The objective can no longer resolve the predicted decrease
                // in f64. Near the minimum the full step of a positive
                // definite model is safe; keep it while the gradient shrinks.
                let trial: Vec<f64> =
                    u.iter().zip(&dir).map(|(ui, di)| ui + di).collect();
                prob.gradient(&trial, &par, &mut gtrial);
                if norm(&gtrial) < 0.9 * gnorm {
                    u = trial;
                    stats.newton_steps += 1;
                    continue;
                }
                break;
            }
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..40 {
                let trial: Vec<f64> =
                    u.iter().zip(&dir).map(|(ui, di)| ui + t * di).collect();
                let e1 = prob.objective(&trial, &par);
                if e1 <= e0 + ARMIJO * t * slope {
                    u = trial;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            stats.newton_steps += 1;
            if !accepted {
                // Line search stalled: the iterate is at the numerical floor
                // of this stage; move on to the next epsilon.
                break;
            }
            if t < 1e-6 {
                stalls += 1;
                if stalls >= 2 {
                    break;
                }
            } else {
                stalls = 0;
            }
        }
    }

    // Final gradient check at the last stage.
    let par = PEnergy { p: prob.p, beta: prob.beta, eps: *stages.last().unwrap() };
    prob.gradient(&u, &par, &mut grad);
    stats.grad_norm = norm(&grad);
    // The energy-difference line search bottoms out near 1e-8 relative in
    // f64; treat anything at that floor as converged.
    stats.converged = stats.grad_norm <= load_norm * (opts.tol * 100.0).clamp(1e-8, 1e-6);
    Ok((u, stats))
}
