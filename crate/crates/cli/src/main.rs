//! Batch driver: mesh generation, eigenvalue solves, torsion, beta sweeps
//! and the bound verification suite, with JSON/CSV reports.
//!
//! Exit codes: 0 success, 2 configuration/parse error, 3 solver
//! non-convergence (partial results are still written), 4 bound violated
//! beyond slack (verify).

mod config;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use config::{
    atomic_write, parse_beta_grid, parse_domain, read_config_file, ConfigError, OutputFormat,
    RunConfig,
};
use robineig::bounds::{self, SuiteConfig};
use robineig::eigensolve::{
    dirichlet_eigenvalue, robin_eigenvalue, torsion, SolverOptions,
};
use robineig::mesh::{generate_mesh, geometry_stats, write_mesh, DomainSpec, Mesh};

#[derive(Parser)]
#[command(
    name = "robineig",
    version,
    about = "First Robin eigenvalues of the p-Laplacian on planar domains, with bound verification"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a mesh and write it in the text format
    Mesh(CommonArgs),
    /// Compute first Robin eigenvalues for each (domain, p, beta)
    Eig(CommonArgs),
    /// Compute the p-torsional rigidity for each (domain, p)
    Torsion(CommonArgs),
    /// Sweep beta: slope toward beta = 0 and the Dirichlet gap
    Sweep(CommonArgs),
    /// Evaluate every spectral bound and report satisfaction
    Verify(CommonArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Domain descriptor kind:params; repeatable. Kinds: disk:r, square:s,
    /// rectangle:w,h, ellipse:a,b, hexagon:side, polygon:x0,y0,..., file:path
    #[arg(long = "domain")]
    domains: Vec<String>,

    /// Exponent(s) p in [1.1, 10], comma separated or repeated
    #[arg(long = "p", value_delimiter = ',')]
    ps: Vec<f64>,

    /// Robin parameter(s) beta, comma separated or repeated
    #[arg(long = "beta", value_delimiter = ',', allow_negative_numbers = true)]
    betas: Vec<f64>,

    /// Beta grid `lo:hi[:n]:log|lin` (used by sweep)
    #[arg(long = "beta-grid")]
    beta_grid: Option<String>,

    /// Requested mesh size (max triangle edge ~ 1.5 h)
    #[arg(long)]
    h: Option<f64>,

    /// Uniform refinement passes applied after generation
    #[arg(long)]
    refine: Option<usize>,

    /// Relative eigenvalue tolerance
    #[arg(long)]
    tol: Option<f64>,

    /// Outer iteration cap
    #[arg(long = "max-iter")]
    max_iter: Option<usize>,

    /// Seed for the initial-guess perturbation
    #[arg(long)]
    seed: Option<u64>,

    /// Output directory for report files
    #[arg(long)]
    out: Option<PathBuf>,

    /// Report file format
    #[arg(long, value_parser = ["json", "csv"])]
    format: Option<String>,

    /// Named suite: 'default' = {disk, square, 2:1 rectangle, hexagon}
    /// x p in {1.5, 2, 3} x beta in {0.1, 1, 10, 100}
    #[arg(long)]
    suite: Option<String>,

    /// Flat key = value file mirroring the flags; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, default_h) = match &cli.cmd {
        Cmd::Verify(a) => (a.clone(), 0.08),
        Cmd::Mesh(a) | Cmd::Eig(a) | Cmd::Torsion(a) | Cmd::Sweep(a) => (a.clone(), 0.05),
    };
    let cfg = match resolve(args, default_h) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let result = match cli.cmd {
        Cmd::Mesh(_) => cmd_mesh(&cfg),
        Cmd::Eig(_) => cmd_eig(&cfg),
        Cmd::Torsion(_) => cmd_torsion(&cfg),
        Cmd::Sweep(_) => cmd_sweep(&cfg),
        Cmd::Verify(_) => cmd_verify(&cfg),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Merges flags over the config file and fills defaults.
fn resolve(args: CommonArgs, default_h: f64) -> Result<RunConfig, ConfigError> {
    let file = match &args.config {
        Some(path) => read_config_file(path)?,
        None => Default::default(),
    };
    let lookup = |key: &str| file.get(key).cloned();

    let target_h = match args.h {
        Some(h) => h,
        None => match lookup("h") {
            Some(tok) => tok
                .parse()
                .map_err(|_| ConfigError(format!("config h: bad number '{tok}'")))?,
            None => default_h,
        },
    };
    if !(target_h > 0.0) {
        return Err(ConfigError(format!("h must be positive, got {target_h}")));
    }

    let mut domain_texts = args.domains;
    if domain_texts.is_empty() {
        if let Some(tok) = lookup("domain") {
            domain_texts = tok.split(';').map(|s| s.trim().to_string()).collect();
        }
    }
    let mut domains = Vec::new();
    for text in &domain_texts {
        domains.push(parse_domain(text, target_h)?);
    }

    let parse_list = |tok: &str, what: &str| -> Result<Vec<f64>, ConfigError> {
        tok.split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| ConfigError(format!("config {what}: bad number '{t}'")))
            })
            .collect()
    };
    let mut ps = args.ps;
    if ps.is_empty() {
        if let Some(tok) = lookup("p") {
            ps = parse_list(&tok, "p")?;
        }
    }
    let mut betas = args.betas;
    if betas.is_empty() {
        if let Some(tok) = lookup("beta") {
            betas = parse_list(&tok, "beta")?;
        }
    }
    betas.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let beta_grid = match args.beta_grid.or_else(|| lookup("beta-grid")) {
        Some(tok) => Some(parse_beta_grid(&tok)?),
        None => None,
    };

    let defaults = SolverOptions::default();
    let tol = match args.tol.map(Ok).or_else(|| lookup("tol").map(|t| t.parse::<f64>())) {
        Some(Ok(v)) => v,
        Some(Err(_)) => return Err(ConfigError("config tol: bad number".into())),
        None => defaults.tol,
    };
    let max_outer = match args
        .max_iter
        .map(Ok)
        .or_else(|| lookup("max-iter").map(|t| t.parse::<usize>()))
    {
        Some(Ok(v)) => v,
        Some(Err(_)) => return Err(ConfigError("config max-iter: bad number".into())),
        None => defaults.max_outer,
    };
    let seed = match args.seed.map(Ok).or_else(|| lookup("seed").map(|t| t.parse::<u64>())) {
        Some(Ok(v)) => v,
        Some(Err(_)) => return Err(ConfigError("config seed: bad number".into())),
        None => defaults.seed,
    };
    let refine = match args
        .refine
        .map(Ok)
        .or_else(|| lookup("refine").map(|t| t.parse::<usize>()))
    {
        Some(Ok(v)) => v,
        Some(Err(_)) => return Err(ConfigError("config refine: bad number".into())),
        None => 0,
    };
    let format = match args.format.or_else(|| lookup("format")).as_deref() {
        None | Some("json") => OutputFormat::Json,
        Some("csv") => OutputFormat::Csv,
        Some(other) => return Err(ConfigError(format!("format must be json or csv, got '{other}'"))),
    };
    let out_dir = args
        .out
        .or_else(|| lookup("out").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let suite = args.suite.or_else(|| lookup("suite"));

    let opts = SolverOptions { tol, max_outer, seed, ..defaults };
    Ok(RunConfig {
        domains,
        ps,
        betas,
        beta_grid,
        target_h,
        refine,
        opts,
        out_dir,
        format,
        suite,
    })
}

fn build_mesh(spec: &DomainSpec, refine: usize) -> Result<Arc<Mesh>, robineig::Error> {
    let mut mesh = generate_mesh(spec)?;
    for _ in 0..refine {
        mesh = mesh.refine();
    }
    Ok(Arc::new(mesh))
}

fn sanitize(id: &str) -> String {
    id.replace([':', ',', '/', '\\'], "_")
}

fn cmd_mesh(cfg: &RunConfig) -> Result<ExitCode, ConfigError> {
    if cfg.domains.is_empty() {
        return Err(ConfigError("at least one --domain is required".into()));
    }
    cfg.ensure_out_dir()?;
    for (id, spec) in &cfg.domains {
        let mesh = build_mesh(spec, cfg.refine)
            .map_err(|e| ConfigError(format!("{id}: {e}")))?;
        let stats = geometry_stats(&mesh).map_err(|e| ConfigError(e.to_string()))?;
        let path = cfg.out_dir.join(format!("mesh_{}.txt", sanitize(id)));
        write_mesh(&mesh, &path).map_err(|e| ConfigError(e.to_string()))?;
        println!(
            "{id}: {} vertices, {} triangles, h={:.6}, area={:.12}, perimeter={:.12} -> {}",
            mesh.vertex_count(),
            mesh.triangle_count(),
            mesh.max_edge_length(),
            stats.area,
            stats.perimeter,
            path.display()
        );
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct EigRecord {
    domain: String,
    p: f64,
    beta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<f64>,
    iterations: usize,
    converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eigenfunction: Option<Vec<f64>>,
}

fn cmd_eig(cfg: &RunConfig) -> Result<ExitCode, ConfigError> {
    cfg.validate_for_solves()?;
    if cfg.betas.is_empty() {
        return Err(ConfigError("at least one --beta is required".into()));
    }
    cfg.ensure_out_dir()?;
    let mut records = Vec::new();
    let mut all_converged = true;
    for (id, spec) in &cfg.domains {
        let mesh = build_mesh(spec, cfg.refine).map_err(|e| ConfigError(format!("{id}: {e}")))?;
        for &p in &cfg.ps {
            for &beta in &cfg.betas {
                match robin_eigenvalue(&mesh, p, beta, &cfg.opts) {
                    Ok(eig) => {
                        all_converged &= eig.converged;
                        println!(
                            "{id} p={p} beta={beta}: lambda={:.10} residual={:.3e} iters={} converged={}",
                            eig.lambda, eig.residual, eig.iterations, eig.converged
                        );
                        records.push(EigRecord {
                            domain: id.clone(),
                            p,
                            beta,
                            lambda: Some(eig.lambda),
                            residual: Some(eig.residual),
                            iterations: eig.iterations,
                            converged: eig.converged,
                            error: None,
                            eigenfunction: matches!(cfg.format, OutputFormat::Json)
                                .then(|| eig.eigenfunction.values.clone()),
                        });
                    }
                    Err(e) => {
                        all_converged = false;
                        println!("{id} p={p} beta={beta}: solver error: {e}");
                        records.push(EigRecord {
                            domain: id.clone(),
                            p,
                            beta,
                            lambda: None,
                            residual: None,
                            iterations: 0,
                            converged: false,
                            error: Some(e.to_string()),
                            eigenfunction: None,
                        });
                    }
                }
            }
        }
    }
    match cfg.format {
        OutputFormat::Json => {
            let path = cfg.out_dir.join("eig_report.json");
            let body = serde_json::to_string_pretty(&records).expect("records serialize");
            atomic_write(&path, &body).map_err(|e| ConfigError(e.to_string()))?;
        }
        OutputFormat::Csv => {
            let mut body = String::from("domain,p,beta,lambda,residual,iterations,converged\n");
            for r in &records {
                let _ = writeln!(
                    body,
                    "{},{},{},{},{},{},{}",
                    r.domain,
                    r.p,
                    r.beta,
                    r.lambda.map(|v| v.to_string()).unwrap_or_default(),
                    r.residual.map(|v| v.to_string()).unwrap_or_default(),
                    r.iterations,
                    r.converged
                );
            }
            let path = cfg.out_dir.join("eig_report.csv");
            atomic_write(&path, &body).map_err(|e| ConfigError(e.to_string()))?;
        }
    }
    Ok(if all_converged { ExitCode::SUCCESS } else { ExitCode::from(3) })
}

#[derive(Serialize)]
struct TorsionRecord {
    domain: String,
    p: f64,
    value: f64,
    gradient_energy: f64,
    consistency_gap: f64,
    converged: bool,
}

fn cmd_torsion(cfg: &RunConfig) -> Result<ExitCode, ConfigError> {
    cfg.validate_for_solves()?;
    cfg.ensure_out_dir()?;
    let mut records = Vec::new();
    let mut ok = true;
    for (id, spec) in &cfg.domains {
        let mesh = build_mesh(spec, cfg.refine).map_err(|e| ConfigError(format!("{id}: {e}")))?;
        for &p in &cfg.ps {
            let t = torsion(&mesh, p, &cfg.opts).map_err(|e| ConfigError(e.to_string()))?;
            ok &= t.converged;
            println!(
                "{id} p={p}: T_p={:.10} energy={:.10} gap={:.3e} converged={}",
                t.value, t.gradient_energy, t.consistency_gap, t.converged
            );
            records.push(TorsionRecord {
                domain: id.clone(),
                p,
                value: t.value,
                gradient_energy: t.gradient_energy,
                consistency_gap: t.consistency_gap,
                converged: t.converged,
            });
        }
    }
    match cfg.format {
        OutputFormat::Json => {
            let body = serde_json::to_string_pretty(&records).expect("records serialize");
            atomic_write(&cfg.out_dir.join("torsion_report.json"), &body)
                .map_err(|e| ConfigError(e.to_string()))?;
        }
        OutputFormat::Csv => {
            let mut body =
                String::from("domain,p,value,gradient_energy,consistency_gap,converged\n");
            for r in &records {
                let _ = writeln!(
                    body,
                    "{},{},{},{},{},{}",
                    r.domain, r.p, r.value, r.gradient_energy, r.consistency_gap, r.converged
                );
            }
            atomic_write(&cfg.out_dir.join("torsion_report.csv"), &body)
                .map_err(|e| ConfigError(e.to_string()))?;
        }
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(3) })
}

fn cmd_sweep(cfg: &RunConfig) -> Result<ExitCode, ConfigError> {
    cfg.validate_for_solves()?;
    let Some(grid) = &cfg.beta_grid else {
        return Err(ConfigError("sweep requires --beta-grid lo:hi[:n]:log|lin".into()));
    };
    if grid.is_empty() {
        return Err(ConfigError("beta grid is empty".into()));
    }
    cfg.ensure_out_dir()?;

    let mut body = String::from("domain,p,beta,lambda,slope,gap,note\n");
    let mut all_converged = true;
    for (id, spec) in &cfg.domains {
        let mesh = build_mesh(spec, cfg.refine).map_err(|e| ConfigError(format!("{id}: {e}")))?;
        let stats = geometry_stats(&mesh).map_err(|e| ConfigError(e.to_string()))?;
        for &p in &cfg.ps {
            let dirichlet = match dirichlet_eigenvalue(&mesh, p, &cfg.opts) {
                Ok(eig) => {
                    all_converged &= eig.converged;
                    eig.lambda
                }
                Err(e) => {
                    println!("{id} p={p}: Dirichlet solve failed: {e}");
                    all_converged = false;
                    f64::NAN
                }
            };
            let mut rows = Vec::new();
            for &beta in grid {
                match robin_eigenvalue(&mesh, p, beta, &cfg.opts) {
                    Ok(eig) => {
                        all_converged &= eig.converged;
                        rows.push((beta, eig.lambda));
                        let _ = writeln!(
                            body,
                            "{id},{p},{beta},{},{},{},",
                            eig.lambda,
                            eig.lambda / beta,
                            dirichlet - eig.lambda
                        );
                    }
                    Err(e) => {
                        all_converged = false;
                        let _ = writeln!(body, "{id},{p},{beta},,,,solver_error: {e}");
                    }
                }
            }
            // Richardson extrapolation of lambda/beta from the two smallest
            // grid points toward beta = 0.
            if rows.len() >= 2 {
                let (b1, l1) = rows[1];
                let (b0, l0) = rows[0];
                let (s0, s1) = (l0 / b0, l1 / b1);
                let slope_limit = s0 + (s0 - s1) * b0 / (b1 - b0);
                let _ = writeln!(body, "{id},{p},,,{slope_limit},,slope_limit");
                let _ = writeln!(
                    body,
                    "{id},{p},,,{},,slope_target",
                    stats.perimeter / stats.area
                );
                let (bn, ln) = rows[rows.len() - 1];
                let _ = writeln!(body, "{id},{p},{bn},,,{},final_gap", dirichlet - ln);
                println!(
                    "{id} p={p}: slope limit {slope_limit:.6} (target {:.6}), final gap {:.6}",
                    stats.perimeter / stats.area,
                    dirichlet - ln
                );
            }
        }
    }
    atomic_write(&cfg.out_dir.join("sweep.csv"), &body)
        .map_err(|e| ConfigError(e.to_string()))?;
    Ok(if all_converged { ExitCode::SUCCESS } else { ExitCode::from(3) })
}

fn cmd_verify(cfg: &RunConfig) -> Result<ExitCode, ConfigError> {
    let suite = match cfg.suite.as_deref() {
        Some("default") => SuiteConfig {
            domains: bounds::default_suite_domains(cfg.target_h),
            ps: if cfg.ps.is_empty() { vec![1.5, 2.0, 3.0] } else { cfg.ps.clone() },
            betas: if cfg.betas.is_empty() {
                vec![0.1, 1.0, 10.0, 100.0]
            } else {
                cfg.betas.clone()
            },
            opts: cfg.opts,
            certificates: true,
        },
        Some(other) => return Err(ConfigError(format!("unknown suite '{other}'"))),
        None => {
            cfg.validate_for_solves()?;
            if cfg.betas.is_empty() {
                return Err(ConfigError("verify needs --beta values or --suite default".into()));
            }
            SuiteConfig {
                domains: cfg.domains.clone(),
                ps: cfg.ps.clone(),
                betas: cfg.betas.clone(),
                opts: cfg.opts,
                certificates: true,
            }
        }
    };
    cfg.ensure_out_dir()?;

    let reports = match bounds::run_suite(&suite) {
        Ok(reports) => reports,
        Err(e) => {
            eprintln!("solver failure: {e}");
            return Ok(ExitCode::from(3));
        }
    };
    let mut all_ok = true;
    for r in &reports {
        let ok = r.all_satisfied();
        all_ok &= ok;
        println!(
            "{} p={} beta={}: lambda={:.8} dirichlet={:.8} torsion={:.8} satisfied={}",
            r.domain, r.p, r.beta, r.lambda_robin, r.lambda_dirichlet, r.torsion_value, ok
        );
    }
    atomic_write(&cfg.out_dir.join("verify_report.json"), &bounds::reports_json(&reports))
        .map_err(|e| ConfigError(e.to_string()))?;
    atomic_write(&cfg.out_dir.join("verify_report.csv"), &bounds::reports_csv(&reports))
        .map_err(|e| ConfigError(e.to_string()))?;
    println!(
        "{} records; {}",
        reports.len(),
        if all_ok { "all bounds satisfied" } else { "VIOLATIONS FOUND" }
    );
    Ok(if all_ok { ExitCode::SUCCESS } else { ExitCode::from(4) })
}
