//! Run configuration: domain descriptors, beta grids, and the flat
//! key-value config file that mirrors every flag (flags override file).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use robineig::eigensolve::SolverOptions;
use robineig::mesh::DomainSpec;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

/// Parses `kind:params` domain descriptors.
///
/// Kinds: `disk:r`, `square:s`, `rectangle:w,h`, `ellipse:a,b`,
/// `hexagon:side`, `polygon:x0,y0,x1,y1,...`, `file:path`.
pub fn parse_domain(text: &str, target_h: f64) -> Result<(String, DomainSpec), ConfigError> {
    let (kind, params) = text
        .split_once(':')
        .ok_or_else(|| ConfigError(format!("domain '{text}' must look like kind:params")))?;
    let nums = || -> Result<Vec<f64>, ConfigError> {
        params
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|_| ConfigError(format!("bad number '{tok}' in domain '{text}'")))
            })
            .collect()
    };
    let spec = match kind {
        "disk" => {
            let v = nums()?;
            if v.len() != 1 {
                return err(format!("disk takes one radius, got '{params}'"));
            }
            DomainSpec::disk(v[0], target_h)
        }
        "square" => {
            let v = nums()?;
            if v.len() != 1 {
                return err(format!("square takes one side, got '{params}'"));
            }
            DomainSpec::square(v[0], target_h)
        }
        "rectangle" | "rect" => {
            let v = nums()?;
            if v.len() != 2 {
                return err(format!("rectangle takes width,height, got '{params}'"));
            }
            DomainSpec::rectangle(v[0], v[1], target_h)
        }
        "ellipse" => {
            let v = nums()?;
            if v.len() != 2 {
                return err(format!("ellipse takes a,b, got '{params}'"));
            }
            DomainSpec::ellipse(v[0], v[1], target_h)
        }
        "hexagon" => {
            let v = nums()?;
            if v.len() != 1 {
                return err(format!("hexagon takes one side, got '{params}'"));
            }
            DomainSpec::regular_polygon(6, v[0], target_h)
        }
        "polygon" => {
            let v = nums()?;
            if v.len() < 6 || v.len() % 2 != 0 {
                return err("polygon needs an even list of at least 6 coordinates");
            }
            let vertices = v.chunks(2).map(|c| [c[0], c[1]]).collect();
            DomainSpec::polygon(vertices, target_h)
        }
        "file" => DomainSpec {
            kind: robineig::mesh::DomainKind::File { path: PathBuf::from(params) },
            target_h,
        },
        other => return err(format!("unknown domain kind '{other}'")),
    };
    Ok((text.to_string(), spec))
}

/// Parses `lo:hi[:n]:log|lin` beta grids; `log` defaults to one point per
/// decade, `lin` to 11 points.
pub fn parse_beta_grid(text: &str) -> Result<Vec<f64>, ConfigError> {
    let parts: Vec<&str> = text.split(':').collect();
    let (lo_s, hi_s, n_s, scale) = match parts.as_slice() {
        [lo, hi, scale] => (*lo, *hi, None, *scale),
        [lo, hi, n, scale] => (*lo, *hi, Some(*n), *scale),
        _ => return err(format!("beta grid '{text}' must be lo:hi[:n]:log|lin")),
    };
    let lo: f64 = lo_s.parse().map_err(|_| ConfigError(format!("bad grid bound '{lo_s}'")))?;
    let hi: f64 = hi_s.parse().map_err(|_| ConfigError(format!("bad grid bound '{hi_s}'")))?;
    if !(lo < hi) {
        return err(format!("beta grid needs lo < hi, got {lo} >= {hi}"));
    }
    let n = match n_s {
        Some(tok) => tok
            .parse::<usize>()
            .map_err(|_| ConfigError(format!("bad grid count '{tok}'")))?,
        None => match scale {
            "log" => ((hi / lo).log10().round() as usize) + 1,
            _ => 11,
        },
    };
    if n < 2 {
        return err("beta grid needs at least 2 points");
    }
    let mut grid: Vec<f64> = match scale {
        "log" => {
            if !(lo > 0.0) {
                return err("log grid needs positive bounds");
            }
            let (llo, lhi) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| (llo + (lhi - llo) * i as f64 / (n - 1) as f64).exp())
                .collect()
        }
        "lin" => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
        other => return err(format!("grid scale must be log or lin, got '{other}'")),
    };
    grid[0] = lo;
    grid[n - 1] = hi;
    Ok(grid)
}

/// Flat key = value file mirroring the flags; `#` starts a comment.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return err(format!(
                "config {}:{}: expected key = value",
                path.display(),
                lineno + 1
            ));
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Fully resolved run configuration shared by the subcommands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub domains: Vec<(String, DomainSpec)>,
    pub ps: Vec<f64>,
    pub betas: Vec<f64>,
    pub beta_grid: Option<Vec<f64>>,
    pub target_h: f64,
    pub refine: usize,
    pub opts: SolverOptions,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
    pub suite: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

impl RunConfig {
    pub fn validate_for_solves(&self) -> Result<(), ConfigError> {
        if self.domains.is_empty() {
            return err("at least one --domain is required");
        }
        if self.ps.is_empty() {
            return err("at least one --p value is required");
        }
        for &p in &self.ps {
            if !(1.1..=10.0).contains(&p) {
                return err(format!("p={p} outside the supported range [1.1, 10]"));
            }
        }
        if !self.betas.windows(2).all(|w| w[0] <= w[1]) {
            return err("beta list must be sorted ascending");
        }
        Ok(())
    }

    pub fn ensure_out_dir(&self) -> Result<(), ConfigError> {
        std::fs::create_dir_all(&self.out_dir)
            .map_err(|e| ConfigError(format!("cannot create output directory: {e}")))?;
        let probe = self.out_dir.join(".robineig_write_probe");
        std::fs::write(&probe, b"ok")
            .map_err(|e| ConfigError(format!("output directory not writable: {e}")))?;
        let _ = std::fs::remove_file(&probe);
        Ok(())
    }
}

/// Writes a report atomically: to a temp file in the same directory, then
/// renamed over the destination.
pub fn atomic_write(path: &Path, contents: &str) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}
