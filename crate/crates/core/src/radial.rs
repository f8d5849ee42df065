//! Semi-analytic radial machinery: pi_p, first Dirichlet eigenpairs of the
//! p-Laplacian on N-balls by shooting, reverse Hölder constants, and the
//! Hersch-type lower bound.
//!
//! The radial eigenfunction solves
//!   -(r^{N-1} |v'|^{p-2} v')' = lambda r^{N-1} |v|^{p-2} v,  v(0)=1, v'(0)=0,
//! integrated as the first-order system in (v, m) with the flux variable
//! m = r^{N-1}|v'|^{p-2}v'. The origin is singular, so integration starts at
//! delta = 1e-6 R from the series v ~ 1 - c r^{p'} with c balancing the ODE
//! at leading order; lambda is bisected until the first zero of v lands at R.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// The generalized pi: 2 pi / (p sin(pi / p)), for p > 1.
pub fn pi_p(p: f64) -> f64 {
    2.0 * PI / (p * (PI / p).sin())
}

/// Hersch-type lower bound for mean convex domains:
/// (p-1) (pi_p/2)^p / (R + (pi_p/2) beta^{-1/(p-1)})^p with R the inradius.
pub fn hersch_lower_bound(p: f64, beta: f64, inradius: f64) -> f64 {
    let half_pip = pi_p(p) / 2.0;
    let denom = inradius + half_pip * beta.powf(-1.0 / (p - 1.0));
    (p - 1.0) * half_pip.powf(p) / denom.powf(p)
}

/// First Dirichlet eigenpair of the p-Laplacian on the N-ball of radius R.
#[derive(Debug, Clone)]
pub struct RadialEigen {
    pub dimension: u32,
    pub p: f64,
    pub radius: f64,
    pub lambda: f64,
    /// v sampled on the uniform grid r_i = i * radius / (len - 1),
    /// normalized so v(0) = 1.
    pub profile: Vec<f64>,
    /// (q, ||v||_q over the N-ball) for q in {1, p-1, p}.
    pub norms: Vec<(f64, f64)>,
}

impl RadialEigen {
    pub fn grid_step(&self) -> f64 {
        self.radius / (self.profile.len() - 1) as f64
    }

    /// L^q norm of the profile over the N-ball, computed by composite
    /// Simpson quadrature of |v|^q r^{N-1} on the stored grid.
    pub fn lp_norm(&self, q: f64) -> f64 {
        let m = self.profile.len() - 1;
        let dr = self.grid_step();
        let integrand = |i: usize| -> f64 {
            let r = i as f64 * dr;
            self.profile[i].abs().powf(q) * r.powi(self.dimension as i32 - 1)
        };
        let mut acc = integrand(0) + integrand(m);
        for i in 1..m {
            acc += integrand(i) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let radial = acc * dr / 3.0;
        (sphere_area(self.dimension) * radial).powf(1.0 / q)
    }
}

/// Surface area of the unit (N-1)-sphere: 2 pi^{N/2} / Gamma(N/2).
pub fn sphere_area(n_dim: u32) -> f64 {
    2.0 * PI.powf(n_dim as f64 / 2.0) / gamma_half(n_dim)
}

/// Gamma(n/2) for positive integer n.
fn gamma_half(n: u32) -> f64 {
    if n % 2 == 0 {
        // Gamma(k) = (k-1)!
        let k = n / 2;
        (1..k).map(|i| i as f64).product()
    } else {
        // Gamma(1/2 + m) = (2m)! sqrt(pi) / (4^m m!)
        let m = (n - 1) / 2;
        let mut val = PI.sqrt();
        for i in 0..m {
            val *= 0.5 + i as f64;
        }
        val
    }
}

struct RadialOde {
    p: f64,
    n_dim: f64,
    lambda: f64,
}

impl RadialOde {
    /// y = (v, m); v' = sgn(m) |m / r^{N-1}|^{1/(p-1)},
    /// m' = -lambda r^{N-1} |v|^{p-2} v.
    fn rhs(&self, r: f64, y: [f64; 2]) -> [f64; 2] {
        let rn = r.powf(self.n_dim - 1.0);
        let s = y[1] / rn;
        let vprime = sgn_pow(s, 1.0 / (self.p - 1.0));
        let mprime = -self.lambda * rn * sgn_pow(y[0], self.p - 1.0);
        [vprime, mprime]
    }

    /// Series start at radius delta.
    fn series_start(&self, delta: f64) -> [f64; 2] {
        let pprime = self.p / (self.p - 1.0);
        let c = (self.lambda / self.n_dim).powf(1.0 / (self.p - 1.0)) / pprime;
        let v = 1.0 - c * delta.powf(pprime);
        let m = -self.lambda / self.n_dim * delta.powf(self.n_dim);
        [v, m]
    }
}

fn sgn_pow(s: f64, e: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else {
        s.signum() * s.abs().powf(e)
    }
}

fn rk4_step(ode: &RadialOde, r: f64, y: [f64; 2], h: f64) -> [f64; 2] {
    let k1 = ode.rhs(r, y);
    let k2 = ode.rhs(r + h / 2.0, [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]]);
    let k3 = ode.rhs(r + h / 2.0, [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]]);
    let k4 = ode.rhs(r + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
    [
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

/// Integrates from the series start and returns the radius of the first zero
/// of v, or None if v stays positive up to `r_cap`. Fixed fine steps with an
/// embedded halved-step error check would be slower than simply using a
/// conservative resolution; the grids here are 1D and cheap.
fn first_zero(ode: &RadialOde, r_scale: f64, r_cap: f64, steps_per_unit: usize) -> Option<f64> {
    let delta = 1e-6 * r_scale;
    let h = r_scale / steps_per_unit as f64;
    let mut r = delta;
    let mut y = ode.series_start(delta);
    while r < r_cap {
        let ynew = rk4_step(ode, r, y, h);
        if ynew[0] <= 0.0 {
            // refine the crossing inside [r, r+h] by bisection on the step
            // length, re-taking a single RK4 substep from (r, y)
            let mut lo = 0.0;
            let mut hi = h;
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let ymid = rk4_step(ode, r, y, mid);
                if ymid[0] <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Some(r + 0.5 * (lo + hi));
        }
        y = ynew;
        r += h;
    }
    None
}

/// First Dirichlet eigenvalue and radial profile on the N-ball of radius R,
/// found by bisecting lambda until the first zero of v lands at R.
pub fn ball_dirichlet_eigen(p: f64, n_dim: u32, radius: f64) -> Result<RadialEigen> {
    if !(1.1..=10.0).contains(&p) {
        return Err(Error::ExponentRange(p));
    }
    if n_dim < 1 {
        return Err(Error::InvalidOptions("dimension must be at least 1".into()));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidOptions(format!("radius must be positive, got {radius}")));
    }

    let nd = n_dim as f64;
    let r_cap = 1.5 * radius;
    let steps = 4000;
    let zero_of = |lambda: f64| -> Option<f64> {
        let ode = RadialOde { p, n_dim: nd, lambda };
        first_zero(&ode, radius, r_cap, steps)
    };

    // Bracket: small lambda pushes the zero beyond R, large lambda pulls it in.
    let mut lo = (p - 1.0) * (pi_p(p) / (2.0 * radius)).powf(p);
    let mut expand = 0;
    while matches!(zero_of(lo), Some(z) if z < radius) {
        lo *= 0.5;
        expand += 1;
        if expand > 200 {
            return Err(Error::BracketFailure("no lower bracket for lambda".into()));
        }
    }
    let mut hi = lo.max(1e-12);
    expand = 0;
    while !matches!(zero_of(hi), Some(z) if z < radius) {
        hi *= 2.0;
        expand += 1;
        if expand > 200 {
            return Err(Error::BracketFailure("no upper bracket for lambda".into()));
        }
    }

    let mut lambda = 0.5 * (lo + hi);
    for _ in 0..200 {
        lambda = 0.5 * (lo + hi);
        match zero_of(lambda) {
            Some(z) if (z - radius).abs() <= 1e-11 * radius => break,
            Some(z) if z < radius => hi = lambda,
            _ => lo = lambda,
        }
        if (hi - lo) <= 1e-14 * hi {
            lambda = 0.5 * (lo + hi);
            break;
        }
    }

    // Dense profile at the converged lambda on a uniform grid.
    let grid_len = 2001;
    let ode = RadialOde { p, n_dim: nd, lambda };
    let delta = 1e-6 * radius;
    let dr = radius / (grid_len - 1) as f64;
    let substeps = 8;
    let mut profile = Vec::with_capacity(grid_len);
    profile.push(1.0);
    let mut y = ode.series_start(delta);
    let mut r = delta;
    for i in 1..grid_len {
        let target = i as f64 * dr;
        let h = (target - r) / substeps as f64;
        for _ in 0..substeps {
            y = rk4_step(&ode, r, y, h);
            r += h;
        }
        profile.push(y[0].max(0.0));
    }
    // The zero lands at R by construction of lambda.
    profile[grid_len - 1] = 0.0;

    let mut eigen = RadialEigen {
        dimension: n_dim,
        p,
        radius,
        lambda,
        profile,
        norms: Vec::new(),
    };
    for q in [1.0, p - 1.0, p] {
        let val = eigen.lp_norm(q);
        eigen.norms.push((q, val));
    }
    Ok(eigen)
}

/// Reverse Hölder constant K~(N, p, q, r, lambda): the ratio ||v||_r / ||v||_q
/// for the first Dirichlet eigenfunction v of the ball whose eigenvalue
/// matches `lambda_target`.
pub fn reverse_holder_constant(
    p: f64,
    q: f64,
    r: f64,
    lambda_target: f64,
    n_dim: u32,
) -> Result<f64> {
    if !(q > 0.0) || q > r {
        return Err(Error::ExponentOrder { q, r });
    }
    if q == r {
        return Ok(1.0);
    }
    if !(lambda_target > 0.0) {
        return Err(Error::InvalidOptions(format!(
            "lambda_target must be positive, got {lambda_target}"
        )));
    }
    let unit = ball_dirichlet_eigen(p, n_dim, 1.0)?;
    let radius = (unit.lambda / lambda_target).powf(1.0 / p);
    let eigen = ball_dirichlet_eigen(p, n_dim, radius)?;
    Ok(eigen.lp_norm(r) / eigen.lp_norm(q))
}

/// K-bar of the Dirichlet-eigenvalue upper bound:
/// (||v||_{p-1} / ||v||_p)^p for the eigenvalue-matched ball.
///
/// This is 1/K~^p with K~ the reverse Hölder constant for (r, q) = (p, p-1):
/// the bound rests on (int v^{p-1})^{p'} >= int v^p / K~^p, so the
/// reciprocal power is the constant that enters. It is sharp for balls as
/// beta grows; the direct K~^p form fails on squares.
pub fn kbar(p: f64, lambda_target: f64, n_dim: u32) -> Result<f64> {
    Ok(reverse_holder_constant(p, p - 1.0, p, lambda_target, n_dim)?.powf(-p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_p_values() {
        assert!((pi_p(2.0) - PI).abs() < 1e-14);
        assert!((pi_p(4.0) - 2.0 * PI / (4.0 * (PI / 4.0).sin())).abs() < 1e-14);
        assert!((pi_p(4.0) - 2.221441469079183).abs() < 1e-12);
        assert!((pi_p(1.5) - 4.836798304624581).abs() < 1e-12);
    }

    #[test]
    fn hersch_bound_values() {
        // p=2, R=1, beta=1: (pi^2/4) / (1 + pi/2)^2
        let expected = (PI * PI / 4.0) / (1.0 + PI / 2.0).powi(2);
        assert!((hersch_lower_bound(2.0, 1.0, 1.0) - expected).abs() < 1e-14);
        assert!((expected - 0.3733).abs() < 1e-4);
        // beta -> infinity limit: (pi/2)^2 / R^2
        let limit = (PI / 2.0f64).powi(2);
        let near = hersch_lower_bound(2.0, 1e12, 1.0);
        assert!((near - limit).abs() / limit < 1e-5);
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(1) - 2.0).abs() < 1e-14);
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn ball_eigen_n3_is_pi_squared() {
        let eig = ball_dirichlet_eigen(2.0, 3, 1.0).unwrap();
        assert!(
            (eig.lambda - PI * PI).abs() < 1e-6,
            "lambda {} vs {}",
            eig.lambda,
            PI * PI
        );
    }

    #[test]
    fn profile_is_decreasing_and_normalized() {
        let eig = ball_dirichlet_eigen(2.0, 2, 1.0).unwrap();
        assert_eq!(eig.profile[0], 1.0);
        assert_eq!(*eig.profile.last().unwrap(), 0.0);
        for w in eig.profile.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
    }

    #[test]
    fn eigenvalue_scales_like_inverse_radius_power() {
        let unit = ball_dirichlet_eigen(2.0, 2, 1.0).unwrap();
        let double = ball_dirichlet_eigen(2.0, 2, 2.0).unwrap();
        assert!((double.lambda - unit.lambda / 4.0).abs() < 1e-9 * unit.lambda);
    }

    #[test]
    fn reverse_holder_equal_exponents_is_one() {
        assert_eq!(reverse_holder_constant(2.0, 2.0, 2.0, 5.0, 2).unwrap(), 1.0);
    }

    #[test]
    fn reverse_holder_rejects_bad_order() {
        assert!(matches!(
            reverse_holder_constant(2.0, 3.0, 2.0, 5.0, 2).unwrap_err(),
            Error::ExponentOrder { .. }
        ));
    }
}
