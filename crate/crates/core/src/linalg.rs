//! Dense linear algebra used across the crate: pivoted Cholesky for
//! covariance sampling, plain Cholesky and LU solves, and a Jacobi
//! eigenvalue routine for small symmetric matrices.

use ndarray::{Array1, Array2, ArrayView2};

use crate::error::{Error, Result};

const PSD_TOLERANCE: f64 = 1e-8;
const SYMMETRY_TOLERANCE: f64 = 1e-10;

/// Pivoted Cholesky factor of a positive semidefinite matrix.
#[derive(Clone, Debug)]
pub struct PsdFactor {
    /// `p x rank`, rows in the caller's original order, so `F F' = A`.
    factor: Array2<f64>,
    /// `perm[k]` is the original index of the k-th pivot.
    perm: Vec<usize>,
    rank: usize,
}

impl PsdFactor {
    pub fn dim(&self) -> usize {
        self.factor.nrows()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn pivots(&self) -> &[usize] {
        &self.perm
    }

    /// Factor in original row order (`p x rank`).
    pub fn factor(&self) -> ArrayView2<'_, f64> {
        self.factor.view()
    }

    /// Lower-trapezoidal factor in pivoted order: row k is original row `perm[k]`.
    pub fn lower(&self) -> Array2<f64> {
        let mut out = Array2::zeros((self.dim(), self.rank));
        for (k, &orig) in self.perm.iter().enumerate() {
            out.row_mut(k).assign(&self.factor.row(orig));
        }
        out
    }

    pub fn reconstruct(&self) -> Array2<f64> {
        self.factor.dot(&self.factor.t())
    }

    /// Writes `F g` into `out`, where `g` has length `rank`.
    pub fn apply(&self, g: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let row = self.factor.row(i);
            *o = row.iter().zip(g).map(|(a, b)| a * b).sum();
        }
    }
}

/// Pivoted (diagonal pivoting) Cholesky factorization.
///
/// Pivots at or below `1e-8 * max diag` end the factorization; the matrix is
/// rejected as [`Error::NotPsd`] if any remaining diagonal is below
/// `-1e-8 * max diag`.
pub fn psd_factor(matrix: ArrayView2<'_, f64>) -> Result<PsdFactor> {
    let p = matrix.nrows();
    if p == 0 {
        return Err(Error::EmptyInput("psd_factor"));
    }
    if matrix.ncols() != p {
        return Err(Error::DimensionMismatch {
            context: "psd_factor (square matrix)",
            expected: p,
            found: matrix.ncols(),
        });
    }
    let mut max_diag: f64 = 0.0;
    for i in 0..p {
        max_diag = max_diag.max(matrix[[i, i]].abs());
        for j in 0..i {
            let (a, b) = (matrix[[i, j]], matrix[[j, i]]);
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::InvalidInput("non-finite matrix entry".into()));
            }
            if (a - b).abs() > SYMMETRY_TOLERANCE * (1.0 + a.abs().max(b.abs())) {
                return Err(Error::InvalidInput(format!(
                    "matrix is not symmetric at ({i},{j})"
                )));
            }
        }
    }
    let tol = PSD_TOLERANCE * max_diag;

    // Work on a permuted copy; `lower` accumulates columns in pivoted order.
    let mut work = matrix.to_owned();
    let mut perm: Vec<usize> = (0..p).collect();
    let mut lower = Array2::<f64>::zeros((p, p));
    let mut diag: Vec<f64> = (0..p).map(|i| work[[i, i]]).collect();
    let mut rank = 0;
    for k in 0..p {
        let (best, &best_val) = diag[k..]
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, v)| (i + k, v))
            .expect("nonempty");
        if best_val <= tol {
            break;
        }
        if best != k {
            perm.swap(k, best);
            diag.swap(k, best);
            swap_sym(&mut work, k, best);
            for c in 0..k {
                lower.swap([k, c], [best, c]);
            }
        }
        let pivot = diag[k].sqrt();
        lower[[k, k]] = pivot;
        for i in (k + 1)..p {
            let mut s = work[[i, k]];
            for c in 0..k {
                s -= lower[[i, c]] * lower[[k, c]];
            }
            let v = s / pivot;
            lower[[i, k]] = v;
            diag[i] -= v * v;
        }
        rank += 1;
    }
    if let Some((i, &d)) = diag[rank..]
        .iter()
        .enumerate()
        .find(|(_, &d)| d < -tol)
    {
        return Err(Error::NotPsd {
            pivot: d,
            index: perm[rank + i],
        });
    }

    let mut factor = Array2::zeros((p, rank));
    for (k, &orig) in perm.iter().enumerate() {
        for c in 0..rank.min(k + 1) {
            factor[[orig, c]] = lower[[k, c]];
        }
    }
    Ok(PsdFactor { factor, perm, rank })
}

fn swap_sym(a: &mut Array2<f64>, i: usize, j: usize) {
    let n = a.nrows();
    for c in 0..n {
        a.swap([i, c], [j, c]);
    }
    for r in 0..n {
        a.swap([r, i], [r, j]);
    }
}

/// Cholesky factor of a symmetric positive definite matrix; fails when a
/// pivot is not above `rel_tol * max diag`.
pub fn cholesky(a: ArrayView2<'_, f64>, rel_tol: f64) -> Result<Array2<f64>> {
    let n = a.nrows();
    let max_diag = (0..n).map(|i| a[[i, i]].abs()).fold(0.0, f64::max);
    let mut l = Array2::<f64>::zeros((n, n));
    for j in 0..n {
        let mut d = a[[j, j]];
        for k in 0..j {
            d -= l[[j, k]] * l[[j, k]];
        }
        if !(d > rel_tol * max_diag) || d <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "matrix is singular or not positive definite (pivot {d:e} at {j})"
            )));
        }
        let ljj = d.sqrt();
        l[[j, j]] = ljj;
        for i in (j + 1)..n {
            let mut s = a[[i, j]];
            for k in 0..j {
                s -= l[[i, k]] * l[[j, k]];
            }
            l[[i, j]] = s / ljj;
        }
    }
    Ok(l)
}

/// Solves `L L' x = b` given the Cholesky factor `L`.
pub fn cholesky_solve(l: &Array2<f64>, b: &[f64]) -> Vec<f64> {
    let n = l.nrows();
    let mut y = b.to_vec();
    for i in 0..n {
        let mut s = y[i];
        for k in 0..i {
            s -= l[[i, k]] * y[k];
        }
        y[i] = s / l[[i, i]];
    }
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in (i + 1)..n {
            s -= l[[k, i]] * y[k];
        }
        y[i] = s / l[[i, i]];
    }
    y
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: Array2<f64>,
    perm: Vec<usize>,
}

impl Lu {
    pub fn factor(a: ArrayView2<'_, f64>) -> Result<Self> {
        let n = a.nrows();
        let mut lu = a.to_owned();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = lu.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        for k in 0..n {
            let (piv, piv_val) = (k..n)
                .map(|i| (i, lu[[i, k]].abs()))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .expect("nonempty");
            if piv_val <= 1e-14 * scale {
                return Err(Error::Solver(format!("singular basis at column {k}")));
            }
            if piv != k {
                perm.swap(k, piv);
                for c in 0..n {
                    lu.swap([k, c], [piv, c]);
                }
            }
            let d = lu[[k, k]];
            for i in (k + 1)..n {
                let f = lu[[i, k]] / d;
                lu[[i, k]] = f;
                if f != 0.0 {
                    for c in (k + 1)..n {
                        lu[[i, c]] -= f * lu[[k, c]];
                    }
                }
            }
        }
        Ok(Self { lu, perm })
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.nrows();
        let mut x: Vec<f64> = self.perm.iter().map(|&i| b[i]).collect();
        for i in 0..n {
            let mut s = x[i];
            for k in 0..i {
                s -= self.lu[[i, k]] * x[k];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in (i + 1)..n {
                s -= self.lu[[i, k]] * x[k];
            }
            x[i] = s / self.lu[[i, i]];
        }
        x
    }

    /// Solves `A' y = c`.
    pub fn solve_transpose(&self, c: &[f64]) -> Vec<f64> {
        let n = self.lu.nrows();
        let mut z = c.to_vec();
        for i in 0..n {
            let mut s = z[i];
            for k in 0..i {
                s -= self.lu[[k, i]] * z[k];
            }
            z[i] = s / self.lu[[i, i]];
        }
        for i in (0..n).rev() {
            let mut s = z[i];
            for k in (i + 1)..n {
                s -= self.lu[[k, i]] * z[k];
            }
            z[i] = s;
        }
        let mut y = vec![0.0; n];
        for (k, &orig) in self.perm.iter().enumerate() {
            y[orig] = z[k];
        }
        y
    }
}

/// Eigenvalues of a small symmetric matrix (cyclic Jacobi), ascending.
pub fn symmetric_eigenvalues(a: ArrayView2<'_, f64>) -> Vec<f64> {
    let n = a.nrows();
    let mut m = a.to_owned();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[[i, j]] * m[[i, j]])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[[p, q]];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (m[[q, q]] - m[[p, p]]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[[k, p]];
                    let mkq = m[[k, q]];
                    m[[k, p]] = c * mkp - s * mkq;
                    m[[k, q]] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[[p, k]];
                    let mqk = m[[q, k]];
                    m[[p, k]] = c * mpk - s * mqk;
                    m[[q, k]] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[[i, i]]).collect();
    eig.sort_by(|a, b| a.total_cmp(b));
    eig
}

/// `X' X / n` for an `n x p` matrix.
pub fn gram(x: ArrayView2<'_, f64>) -> Array2<f64> {
    let n = x.nrows() as f64;
    x.t().dot(&x) / n
}

/// `X' v / n`.
pub fn cross_moment(x: ArrayView2<'_, f64>, v: &[f64]) -> Array1<f64> {
    let n = x.nrows() as f64;
    x.t().dot(&Array1::from(v.to_vec())) / n
}
