//! Acceptance suite. Each test prints one PASS/FAIL line (run with
//! `cargo test --test acceptance -- --nocapture` to see them live) and
//! asserts its criterion at the stated tolerance.

mod support;

use robineig::bounds::{
    self, bump_sources, convexity_check, default_suite, dual_objective, flux_field,
    lower_bound_certificate, nu_p_estimate, run_suite, BoundaryFlux, BoundsReport,
};
use robineig::eigensolve::{
    dirichlet_eigenvalue, robin_eigenvalue, robin_source_solve, torsion, SolverOptions,
};
use robineig::fem::ScalarField;
use robineig::mesh::{generate_mesh, geometry_stats, DomainSpec, Mesh};
use robineig::radial;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};
use std::time::Instant;
use support::{bessel, rel_err, TestRng};

const SUITE_H: f64 = 0.06;

fn suite_reports() -> &'static [BoundsReport] {
    static SUITE: OnceLock<Vec<BoundsReport>> = OnceLock::new();
    SUITE.get_or_init(|| {
        let cfg = default_suite(SUITE_H);
        run_suite(&cfg).expect("default suite runs")
    })
}

fn verdict(n: usize, desc: &str, ok: bool, detail: &str) {
    let tag = if ok { "PASS" } else { "FAIL" };
    println!("ACCEPTANCE {n:02} {tag}: {desc} [{detail}]");
    assert!(ok, "criterion {n} failed: {detail}");
}

fn disk_mesh(h: f64) -> Arc<Mesh> {
    Arc::new(generate_mesh(&DomainSpec::disk(1.0, h)).unwrap())
}

#[test]
fn criterion_01_dirichlet_oracle_square() {
    let start = Instant::now();
    let mesh = Arc::new(
        generate_mesh(&DomainSpec::square(1.0, 0.1)).unwrap().refine().refine(),
    );
    let eig = dirichlet_eigenvalue(&mesh, 2.0, &SolverOptions::default()).unwrap();
    let exact = 2.0 * PI * PI;
    let err = rel_err(eig.lambda, exact);
    let elapsed = start.elapsed();
    let ok = err < 0.01 && eig.converged && elapsed.as_secs() < 60;
    verdict(
        1,
        "Dirichlet eigenvalue of the unit square within 1% of 2 pi^2",
        ok,
        &format!("lambda={:.6}, rel err={err:.2e}, {elapsed:?}", eig.lambda),
    );
}

#[test]
fn criterion_02_robin_oracle_disk() {
    let mesh = disk_mesh(0.05);
    let opts = SolverOptions::default();
    let mut detail = String::new();
    let mut ok = true;
    for beta in [0.5, 1.0, 5.0] {
        let start = Instant::now();
        let oracle = bessel::disk_robin_lambda(beta);
        let eig = robin_eigenvalue(&mesh, 2.0, beta, &opts).unwrap();
        let elapsed = start.elapsed();
        let err = rel_err(eig.lambda, oracle);
        ok &= err < 0.01 && eig.converged && elapsed.as_secs() < 60;
        detail.push_str(&format!("beta={beta}: err={err:.2e} in {elapsed:?}; "));
    }
    verdict(2, "Robin disk eigenvalues within 1% of Bessel-series roots", ok, &detail);
}

#[test]
fn criterion_03_radial_cross_checks() {
    let n3 = radial::ball_dirichlet_eigen(2.0, 3, 1.0).unwrap();
    let ok_n3 = (n3.lambda - PI * PI).abs() < 1e-6;

    let n2 = radial::ball_dirichlet_eigen(2.0, 2, 1.0).unwrap();
    let oracle = bessel::disk_dirichlet_lambda();
    let ok_n2 = rel_err(n2.lambda, oracle) < 1e-8;

    let mesh = disk_mesh(0.05);
    let fem_p3 = dirichlet_eigenvalue(&mesh, 3.0, &SolverOptions::default()).unwrap();
    let shoot_p3 = radial::ball_dirichlet_eigen(3.0, 2, 1.0).unwrap();
    let ok_p3 = rel_err(fem_p3.lambda, shoot_p3.lambda) < 0.02;

    verdict(
        3,
        "radial shooting matches pi^2 (N=3), Bessel (N=2) and FEM (p=3)",
        ok_n3 && ok_n2 && ok_p3,
        &format!(
            "N=3: {:.8} vs {:.8}; N=2 err={:.2e}; p=3 fem {:.4} vs shoot {:.4}",
            n3.lambda,
            PI * PI,
            rel_err(n2.lambda, oracle),
            fem_p3.lambda,
            shoot_p3.lambda
        ),
    );
}

#[test]
fn criterion_04_torsion_closed_forms() {
    let opts = SolverOptions::default();
    let mesh = disk_mesh(0.05);
    let t2 = torsion(&mesh, 2.0, &opts).unwrap();
    let t3 = torsion(&mesh, 3.0, &opts).unwrap();
    let big = Arc::new(mesh.scaled(2.0));
    let t2_big = torsion(&big, 2.0, &opts).unwrap();

    let e2 = rel_err(t2.value, PI / 8.0);
    let e3 = rel_err(t3.value, PI * 2f64.sqrt() / 7.0);
    let ed = rel_err(t2_big.value, 16.0 * t2.value);
    let ok = e2 < 0.01 && e3 < 0.01 && ed < 0.01;
    verdict(
        4,
        "torsion closed forms pi/8 (p=2), pi sqrt(2)/7 (p=3), dilation x16",
        ok,
        &format!("errors {e2:.2e}, {e3:.2e}, {ed:.2e}"),
    );
}

#[test]
fn criterion_05_torsion_bound_near_tightness_on_disk() {
    let mesh = disk_mesh(0.04);
    let stats = geometry_stats(&mesh).unwrap();
    let opts = SolverOptions::default();
    let eig = robin_eigenvalue(&mesh, 2.0, 1.0, &opts).unwrap();
    let dir = dirichlet_eigenvalue(&mesh, 2.0, &opts).unwrap();
    let tors = torsion(&mesh, 2.0, &opts).unwrap();
    let report =
        bounds::evaluate_upper_bounds(&mesh, 2.0, 1.0, &eig, &dir, tors.value, &stats)
            .unwrap();
    let rec = report.bounds.upper_torsion;
    let ok = rec.satisfied
        && rec.margin > 0.0
        && rec.margin < 0.03
        && rel_err(rec.value, 1.6) < 0.01;
    verdict(
        5,
        "torsion bound on the unit disk is near-tight (lambda <= 1.6, margin in (0,3%))",
        ok,
        &format!("bound={:.5}, lambda={:.5}, margin={:.3}%", rec.value, eig.lambda, 100.0 * rec.margin),
    );
}

#[test]
fn criterion_06_dirichlet_upper_bound_on_full_suite() {
    let reports = suite_reports();
    let mut worst: f64 = f64::INFINITY;
    let mut worst_at = String::new();
    for r in reports {
        if r.bounds.upper_dirichlet.margin < worst {
            worst = r.bounds.upper_dirichlet.margin;
            worst_at = format!("{} p={} beta={}", r.domain, r.p, r.beta);
        }
    }
    let ok = reports.len() == 48 && worst >= -0.02;
    verdict(
        6,
        "Dirichlet-eigenvalue upper bound satisfied on the full suite (2% slack)",
        ok,
        &format!("{} records, worst margin {worst:+.4e} at {worst_at}", reports.len()),
    );
}

#[test]
fn criterion_07_polya_and_hersch_on_full_suite() {
    let reports = suite_reports();
    let mut worst: f64 = f64::INFINITY;
    let mut disk_hersch = f64::NAN;
    let mut disk_lambda = f64::NAN;
    for r in reports {
        if let Some(rec) = r.bounds.polya_p2 {
            worst = worst.min(rec.margin);
        }
        if let Some(rec) = r.bounds.hersch {
            worst = worst.min(rec.margin);
            if r.domain == "disk:1" && r.p == 2.0 && r.beta == 1.0 {
                disk_hersch = rec.value;
                disk_lambda = r.lambda_robin;
            }
        }
    }
    let ok = worst >= -0.02
        && rel_err(disk_hersch, 0.3733) < 0.01
        && disk_hersch <= disk_lambda;
    verdict(
        7,
        "Polya (p=2) and Hersch (convex) bounds satisfied on the suite",
        ok,
        &format!(
            "worst margin {worst:+.4e}; disk beta=1 hersch {disk_hersch:.4} <= lambda {disk_lambda:.4}"
        ),
    );
}

#[test]
fn criterion_08_thompson_duality() {
    let opts = SolverOptions::default();
    let beta = 1.0;
    let mut ok = true;
    let mut detail = String::new();

    for spec in [
        DomainSpec::disk(1.0, 0.08),
        DomainSpec::square(1.0, 0.08),
        DomainSpec::regular_polygon(6, 1.0, 0.12),
    ] {
        let mesh = Arc::new(generate_mesh(&spec).unwrap());
        let f = ScalarField::from_fn(mesh.clone(), |v| 1.0 + 0.3 * v[0]).unwrap();
        let rs = robin_source_solve(&mesh, 2.0, beta, &f, &opts).unwrap();
        let field = flux_field(&rs.u_f, 2.0);
        let flux = BoundaryFlux::RobinTrace { trace: rs.u_f.clone(), coeff: beta };
        let dual = dual_objective(2.0, beta, &field, &flux).unwrap();
        let gap = rel_err(dual, rs.j_value);
        ok &= gap <= 1e-8;
        detail.push_str(&format!("strong gap {gap:.2e}; "));

        let mut weak_ok = true;
        let mut rng = TestRng::new(17);
        for _ in 0..20 {
            let alpha = rng.log_range(0.05, 20.0);
            let at_alpha = robin_source_solve(&mesh, 2.0, alpha, &f, &opts).unwrap();
            let field = flux_field(&at_alpha.u_f, 2.0);
            let flux =
                BoundaryFlux::RobinTrace { trace: at_alpha.u_f.clone(), coeff: alpha };
            let dual = dual_objective(2.0, beta, &field, &flux).unwrap();
            weak_ok &= dual >= rs.j_value * (1.0 - 1e-8);
        }
        ok &= weak_ok;
        detail.push_str(if weak_ok { "20 weak ok; " } else { "weak violated; " });
    }
    verdict(8, "Thompson duality: strong at 1e-8 (p=2, 3 meshes), weak for 20 cross-beta fields", ok, &detail);
}

#[test]
fn criterion_09_convexity_of_j() {
    let opts = SolverOptions::default();
    let mut ok = true;
    let mut worst: f64 = f64::INFINITY;
    let mut rng = TestRng::new(4242);
    for spec in [DomainSpec::disk(1.0, 0.1), DomainSpec::square(1.0, 0.1)] {
        let mesh = Arc::new(generate_mesh(&spec).unwrap());
        for _ in 0..15 {
            let alpha = rng.log_range(0.05, 20.0);
            let beta = rng.log_range(0.05, 20.0);
            let a = rng.range(0.1, 2.0);
            let b = rng.range(0.0, 3.0);
            let f = ScalarField::from_fn(mesh.clone(), |v| {
                a + (b * v[0]).sin().powi(2) + 0.5 * (b * v[1] + 1.0).cos().powi(2)
            })
            .unwrap();
            let check = convexity_check(&mesh, 2.0, &f, alpha, beta, &opts).unwrap();
            let rel = check.slack / check.lhs.abs().max(1.0);
            worst = worst.min(rel);
            ok &= rel >= -1e-6;
        }
    }

    // exact equality in the radial f = 1 case
    let mesh = disk_mesh(0.025);
    let f = ScalarField::constant(mesh.clone(), 1.0);
    let check = convexity_check(&mesh, 2.0, &f, 2.0, 1.0, &opts).unwrap();
    let eq = (check.slack / check.lhs).abs();
    ok &= eq <= 1e-3;
    verdict(
        9,
        "J_f convexity: slack >= -1e-6 on 30 random triples, radial disk equality to 1e-3",
        ok,
        &format!("worst random slack {worst:+.2e}, disk equality gap {eq:.2e}"),
    );
}

#[test]
fn criterion_10_beta_limits() {
    let opts = SolverOptions::default();
    let mut ok = true;
    let mut detail = String::new();
    for (spec, target) in [
        (DomainSpec::disk(1.0, 0.05), 2.0),
        (DomainSpec::square(1.0, 0.05), 4.0),
    ] {
        let mesh = Arc::new(generate_mesh(&spec).unwrap());
        for sign in [1.0, -1.0] {
            let beta = 1e-3 * sign;
            let lam = robin_eigenvalue(&mesh, 2.0, beta, &opts).unwrap().lambda;
            let slope = lam / beta;
            let err = rel_err(slope, target);
            ok &= err < 0.02;
            detail.push_str(&format!("slope({beta:+.0e})={slope:.4}; "));
        }
    }

    let mesh = disk_mesh(0.05);
    let gap = bounds::beta_infinity_gap(&mesh, 2.0, &[1.0, 10.0, 100.0, 1e4], &opts).unwrap();
    let positive = gap.points.iter().all(|pt| pt.gap > 0.0);
    ok &= gap.monotone && positive;
    detail.push_str(&format!(
        "gaps {:?} monotone={}",
        gap.points.iter().map(|pt| pt.gap).collect::<Vec<_>>(),
        gap.monotone
    ));
    verdict(
        10,
        "lambda/beta -> P/|Omega| by beta=1e-3 from both signs; Dirichlet gap decreasing",
        ok,
        &detail,
    );
}

#[test]
fn criterion_11_lower_bound_certificates() {
    let opts = SolverOptions::default();
    let mut ok = true;
    let mut worst: f64 = f64::INFINITY;
    for (_, spec) in bounds::default_suite_domains(SUITE_H) {
        let mesh = Arc::new(generate_mesh(&spec).unwrap());
        let stats = geometry_stats(&mesh).unwrap();
        let mut sources =
            vec![("const:1".to_string(), ScalarField::constant(mesh.clone(), 1.0))];
        sources.extend(bump_sources(&mesh, &stats));
        for (id, f) in &sources {
            let cert = lower_bound_certificate(&mesh, 2.0, 1.0, f, id, &opts).unwrap();
            let rel = cert.slack / cert.j_value.abs();
            worst = worst.min(rel);
            ok &= cert.slack >= -1e-3 * cert.j_value.abs();
        }
    }

    // exact equality on the disk with f = 1
    let mesh = disk_mesh(0.025);
    let one = ScalarField::constant(mesh.clone(), 1.0);
    let cert = lower_bound_certificate(&mesh, 2.0, 1.0, &one, "const:1", &opts).unwrap();
    let eq = (cert.slack / cert.j_value).abs();
    ok &= eq <= 1e-3;

    // nu_p family estimate on the disk
    let est = nu_p_estimate(&mesh, 2.0, &[one], &opts).unwrap();
    let est_err = rel_err(est, 8.0);
    ok &= est_err < 0.01;

    // The first nontrivial Neumann eigenvalue of the disk, (j'_11)^2, is a
    // reference point for nu_2 on symmetric domains; logged, not asserted.
    let disk_neumann = 1.8411837813406593f64.powi(2);
    verdict(
        11,
        "certificates: slack >= -1e-3 J for f=1 and bumps; disk equality; nu_p(disk)=8",
        ok,
        &format!(
            "worst slack {worst:+.2e}, disk equality {eq:.2e}, nu_p err {est_err:.2e};              family bound {est:.4} vs disk Neumann reference {disk_neumann:.4}"
        ),
    );
}

#[test]
fn criterion_12_faber_krahn_property() {
    let opts = SolverOptions::default();
    let square = Arc::new(generate_mesh(&DomainSpec::square(1.0, SUITE_H)).unwrap());
    let radius = (1.0 / PI).sqrt();
    let disk = Arc::new(generate_mesh(&DomainSpec::disk(radius, SUITE_H * radius)).unwrap());
    let mut ok = true;
    let mut worst = f64::INFINITY;
    for p in [1.5, 2.0, 3.0] {
        for beta in [0.1, 1.0, 10.0, 100.0] {
            let ls = robin_eigenvalue(&square, p, beta, &opts).unwrap().lambda;
            let ld = robin_eigenvalue(&disk, p, beta, &opts).unwrap().lambda;
            let ratio = ls / ld;
            worst = worst.min(ratio);
            ok &= ls >= ld * (1.0 - 0.01);
        }
    }
    verdict(
        12,
        "Faber-Krahn: lambda(square) >= lambda(equal-area disk) on the full grid (1% slack)",
        ok,
        &format!("worst ratio {worst:.4}"),
    );
}
