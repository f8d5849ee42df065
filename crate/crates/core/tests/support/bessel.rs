#![allow(dead_code)]

//! Bessel oracles built from power series and bisection, independent of the
//! library's shooting and FEM paths.
//!
//! J0(x) = sum_k (-x^2/4)^k / (k!)^2,
//! J1(x) = (x/2) sum_k (-x^2/4)^k / (k! (k+1)!).
//! The series are used only for |x| <= 12, where they converge to full f64
//! precision long before the term cap.

pub fn j0(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..=60 {
        term *= q / ((k * k) as f64);
        sum += term;
        if term.abs() < 1e-300 {
            break;
        }
    }
    sum
}

pub fn j1(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..=60 {
        term *= q / ((k * (k + 1)) as f64);
        sum += term;
        if term.abs() < 1e-300 {
            break;
        }
    }
    0.5 * x * sum
}

/// First positive zero of J0, by bisection on [2, 3].
pub fn j0_first_zero() -> f64 {
    bisect(&|x| j0(x), 2.0, 3.0)
}

/// Dirichlet eigenvalue of the unit disk for p = 2: j01^2.
pub fn disk_dirichlet_lambda() -> f64 {
    let z = j0_first_zero();
    z * z
}

/// Robin eigenvalue of the unit disk for p = 2: the root k of
/// k J1(k) = beta J0(k) in (0, j01), squared.
pub fn disk_robin_lambda(beta: f64) -> f64 {
    assert!(beta > 0.0);
    let hi = j0_first_zero() - 1e-12;
    let g = |k: f64| k * j1(k) - beta * j0(k);
    let k = bisect(&g, 1e-9, hi);
    k * k
}

fn bisect(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    assert!(
        flo * f(hi) < 0.0,
        "bisection bracket does not straddle a root: f({lo}), f({hi})"
    );
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 * hi.abs() {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// int_0^1 J0(j01 r)^2 r dr = J1(j01)^2 / 2 and
/// int_0^1 J0(j01 r) r dr = J1(j01)/j01; combined they give the closed-form
/// K-bar of the unit disk: j01^2 / (4 pi).
pub fn disk_kbar_p2() -> f64 {
    disk_dirichlet_lambda() / (4.0 * std::f64::consts::PI)
}
