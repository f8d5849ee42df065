//! Minimal sparse linear algebra: CSR matrices assembled from triplets and a
//! Jacobi-preconditioned conjugate gradient solver. Everything is
//! deterministic for a fixed assembly order.

#[derive(Debug, Clone)]
pub struct Csr {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub vals: Vec<f64>,
}

impl Csr {
    /// Assembles a square matrix from (row, col, value) triplets, summing
    /// duplicates.
    pub fn from_triplets(n: usize, triplets: &mut Vec<(usize, usize, f64)>) -> Csr {
        triplets.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut col_idx: Vec<usize> = Vec::with_capacity(triplets.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut rows: Vec<usize> = Vec::with_capacity(triplets.len());
        for &(r, c, v) in triplets.iter() {
            if let (Some(&lr), Some(&lc)) = (rows.last(), col_idx.last()) {
                if lr == r && lc == c {
                    *vals.last_mut().unwrap() += v;
                    continue;
                }
            }
            rows.push(r);
            col_idx.push(c);
            vals.push(v);
        }
        let mut row_ptr = vec![0usize; n + 1];
        for &r in &rows {
            row_ptr[r + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Csr { n, row_ptr, col_idx, vals }
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for r in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.col_idx[k]];
            }
            y[r] = acc;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.col_idx[k] == r {
                    d[r] += self.vals[k];
                }
            }
        }
        d
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Debug, Clone, Copy)]
pub struct CgOutcome {
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
    /// Set when a search direction with non-positive curvature was met;
    /// the matrix is not positive definite.
    pub indefinite: bool,
}

/// Preconditioned conjugate gradients for `A x = b` with Jacobi scaling.
///
/// When `project_constants` is set, the constant component is removed from
/// the iterates and residuals; this solves consistent singular systems whose
/// null space is spanned by the constant vector.
pub fn cg_solve(
    a: &Csr,
    b: &[f64],
    x: &mut [f64],
    rtol: f64,
    max_iter: usize,
    project_constants: bool,
) -> CgOutcome {
    let n = a.n;
    let mut diag = a.diagonal();
    for d in diag.iter_mut() {
        if *d <= 0.0 || !d.is_finite() {
            *d = 1.0;
        }
    }
    let remove_mean = |v: &mut [f64]| {
        let mean = v.iter().sum::<f64>() / n as f64;
        for vi in v.iter_mut() {
            *vi -= mean;
        }
    };

    let mut r = vec![0.0; n];
    a.matvec(x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    if project_constants {
        remove_mean(&mut r);
        remove_mean(x);
    }
    let bnorm = norm(b).max(f64::MIN_POSITIVE);
    let target = rtol * bnorm;

    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(ri, di)| ri / di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let mut rnorm = norm(&r);

    for it in 0..max_iter {
        if rnorm <= target {
            return CgOutcome { iterations: it, residual: rnorm, converged: true, indefinite: false };
        }
        a.matvec(&p, &mut ap);
        if project_constants {
            remove_mean(&mut ap);
        }
        let pap = dot(&p, &ap);
        if pap <= 0.0 || !pap.is_finite() {
            return CgOutcome { iterations: it, residual: rnorm, converged: false, indefinite: true };
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if project_constants && it % 50 == 49 {
            remove_mean(&mut r);
            remove_mean(x);
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        rnorm = norm(&r);
    }
    CgOutcome {
        iterations: max_iter,
        residual: rnorm,
        converged: rnorm <= target,
        indefinite: false,
    }
}
