//! Dense complex helpers: pivoted LU with a 1-norm condition estimate,
//! sorted singular values and the two-sided SVD truncation shared by the
//! first- and second-order Loewner constructions.

use nalgebra::{DMatrix, DVector, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Condition estimates above this are treated as singular.
pub const SINGULAR_CONDITION: f64 = 1.0 / f64::EPSILON;

/// Default relative tolerance for numerical rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
}

impl Lu {
    /// Returns `None` when an exactly zero pivot is met.
    pub fn factor(a: &CMatrix) -> Option<Self> {
        let n = a.nrows();
        assert_eq!(n, a.ncols(), "LU needs a square matrix");
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (mut p, mut best) = (k, lu[(k, k)].norm());
            for i in (k + 1)..n {
                let v = lu[(i, k)].norm();
                if v > best {
                    p = i;
                    best = v;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return None;
            }
            if p != k {
                lu.swap_rows(p, k);
                perm.swap(p, k);
            }
            let pivot = lu[(k, k)];
            for i in (k + 1)..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                if factor != ZERO {
                    for j in (k + 1)..n {
                        let u = lu[(k, j)];
                        lu[(i, j)] -= factor * u;
                    }
                }
            }
        }
        Some(Self { lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn solve(&self, b: &CVector) -> CVector {
        let n = self.dim();
        let mut x = CVector::from_fn(n, |i, _| b[self.perm[i]]);
        for i in 0..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.lu[(i, j)] * x[j];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in (i + 1)..n {
                acc -= self.lu[(i, j)] * x[j];
            }
            x[i] = acc / self.lu[(i, i)];
        }
        x
    }

    /// Solves `A^H x = b`.
    pub fn solve_adjoint(&self, b: &CVector) -> CVector {
        let n = self.dim();
        // A^H = U^H L^H P
        let mut z = b.clone();
        for i in 0..n {
            let mut acc = z[i];
            for j in 0..i {
                acc -= self.lu[(j, i)].conj() * z[j];
            }
            z[i] = acc / self.lu[(i, i)].conj();
        }
        for i in (0..n).rev() {
            let mut acc = z[i];
            for j in (i + 1)..n {
                acc -= self.lu[(j, i)].conj() * z[j];
            }
            z[i] = acc;
        }
        let mut x = CVector::zeros(n);
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = z[i];
        }
        x
    }

    /// Hager/Higham lower estimate of `||A^{-1}||_1`.
    pub fn inverse_norm1_estimate(&self) -> f64 {
        let n = self.dim();
        if n == 0 {
            return 0.0;
        }
        let mut x = CVector::from_element(n, Complex64::new(1.0 / n as f64, 0.0));
        let mut est = 0.0_f64;
        let mut last_j = usize::MAX;
        for iter in 0..5 {
            let y = self.solve(&x);
            let norm_y = norm1_vec(&y);
            if iter > 0 && norm_y <= est {
                break;
            }
            est = norm_y;
            let xi = y.map(|v| if v.norm() == 0.0 { ONE } else { v / v.norm() });
            let z = self.solve_adjoint(&xi);
            let (j, zmax) = z
                .iter()
                .enumerate()
                .map(|(i, v)| (i, v.norm()))
                .fold((0, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
            let zx = z.dotc(&x).re;
            if iter > 0 && (zmax <= zx || j == last_j) {
                break;
            }
            last_j = j;
            x = CVector::zeros(n);
            x[j] = ONE;
        }
        // Alternating test vector catches cases the power iteration misses.
        let alt = CVector::from_fn(n, |i, _| {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            let mag = if n > 1 { 1.0 + i as f64 / (n - 1) as f64 } else { 1.0 };
            Complex64::new(sign * mag, 0.0)
        });
        let alt_est = 2.0 * norm1_vec(&self.solve(&alt)) / (3.0 * n as f64);
        est.max(alt_est)
    }
}

fn norm1_vec(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm()).sum()
}

/// Maximum absolute column sum.
pub fn norm1(a: &CMatrix) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn frobenius(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Factors `a` and rejects it when the 1-norm condition estimate exceeds
/// [`SINGULAR_CONDITION`]. `point` only labels the error.
pub fn factor_checked(a: &CMatrix, point: Complex64) -> Result<Lu> {
    let lu = Lu::factor(a).ok_or(Error::SingularPencil {
        point,
        condition: f64::INFINITY,
    })?;
    let condition = norm1(a) * lu.inverse_norm1_estimate();
    if !condition.is_finite() || condition > SINGULAR_CONDITION {
        return Err(Error::SingularPencil { point, condition });
    }
    Ok(lu)
}

/// Singular values in descending order.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.clone().singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Number of singular values strictly above `tau * sigma_1`.
pub fn rank_from_sigmas(sigmas: &[f64], tau: f64) -> usize {
    match sigmas.first() {
        Some(&s1) if s1 > 0.0 => sigmas.iter().filter(|&&s| s > tau * s1).count(),
        _ => 0,
    }
}

pub fn numerical_rank(a: &CMatrix, tau: f64) -> usize {
    rank_from_sigmas(&singular_values(a), tau)
}

/// `sigma_k / sigma_1`, or all zeros when `sigma_1 = 0`.
pub fn relative_sigmas(sigmas: &[f64]) -> Vec<f64> {
    match sigmas.first() {
        Some(&s1) if s1 > 0.0 => sigmas.iter().map(|s| s / s1).collect(),
        _ => vec![0.0; sigmas.len()],
    }
}

/// Truncation order selector for the SVD-based reduction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation {
    Order(usize),
    Tolerance(f64),
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation::Tolerance(DEFAULT_RANK_TOL)
    }
}

/// Projection bases from the compact SVDs of `[L Ls]` (rows) and
/// `[L; Ls]` (columns). `sigmas_row`/`sigmas_col` hold the full spectra.
#[derive(Debug, Clone)]
pub struct SvdTruncation {
    pub y: CMatrix,
    pub x: CMatrix,
    pub sigmas_row: Vec<f64>,
    pub sigmas_col: Vec<f64>,
    pub r: usize,
    /// `(row_rank, col_rank)` when they disagree at the requested tolerance.
    pub rank_mismatch: Option<(usize, usize)>,
}

/// Sorted SVD factors: returns (U, sigma, V) with V (not V^H).
fn sorted_svd(a: &CMatrix) -> (CMatrix, Vec<f64>, CMatrix) {
    let svd = SVD::new(a.clone(), true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sig = idx.iter().map(|&i| svd.singular_values[i]).collect();
    let u_sorted = CMatrix::from_fn(u.nrows(), idx.len(), |r, c| u[(r, idx[c])]);
    let v_sorted = CMatrix::from_fn(v_t.ncols(), idx.len(), |r, c| v_t[(idx[c], r)].conj());
    (u_sorted, sig, v_sorted)
}

/// Left basis `Y` of `[L Ls]` and right basis `X` of `[L; Ls]`, truncated.
pub fn truncate_pencil(l: &CMatrix, ls: &CMatrix, mode: Truncation) -> Result<SvdTruncation> {
    let n_rows = l.nrows();
    let n_cols = l.ncols();
    if ls.shape() != l.shape() {
        return Err(Error::Dimension(format!(
            "pencil shapes differ: {:?} vs {:?}",
            l.shape(),
            ls.shape()
        )));
    }
    let mut wide = CMatrix::zeros(n_rows, 2 * n_cols);
    wide.view_mut((0, 0), (n_rows, n_cols)).copy_from(l);
    wide.view_mut((0, n_cols), (n_rows, n_cols)).copy_from(ls);
    let mut tall = CMatrix::zeros(2 * n_rows, n_cols);
    tall.view_mut((0, 0), (n_rows, n_cols)).copy_from(l);
    tall.view_mut((n_rows, 0), (n_rows, n_cols)).copy_from(ls);

    let (u_row, sigmas_row, _) = sorted_svd(&wide);
    let (_, sigmas_col, v_col) = sorted_svd(&tall);
    let max = n_rows.min(n_cols);

    let (r, rank_mismatch) = match mode {
        Truncation::Order(r) => {
            if r == 0 || r > max {
                return Err(Error::InvalidOrder { r, max });
            }
            (r, None)
        }
        Truncation::Tolerance(tau) => {
            if !(tau > 0.0 && tau < 1.0) {
                return Err(Error::InvalidTolerance(tau));
            }
            let rr = rank_from_sigmas(&sigmas_row, tau);
            let rc = rank_from_sigmas(&sigmas_col, tau);
            let r = rr.min(rc);
            if r == 0 {
                return Err(Error::InvalidOrder { r: 0, max });
            }
            (r, (rr != rc).then_some((rr, rc)))
        }
    };
    Ok(SvdTruncation {
        y: u_row.columns(0, r).into_owned(),
        x: v_col.columns(0, r).into_owned(),
        sigmas_row,
        sigmas_col,
        r,
        rank_mismatch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn lu_solves_and_adjoint_solves() {
        let a = CMatrix::from_row_slice(
            3,
            3,
            &[c(0.0, 1.0), c(2.0, 0.0), c(1.0, -1.0), c(4.0, 0.5), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 1.0), c(-3.0, 0.0), c(2.0, 2.0)],
        );
        let b = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0), c(-2.0, 0.5)]);
        let lu = Lu::factor(&a).unwrap();
        let x = lu.solve(&b);
        assert!((&a * &x - &b).norm() < 1e-13);
        let xa = lu.solve_adjoint(&b);
        assert!((a.adjoint() * &xa - &b).norm() < 1e-13);
    }

    #[test]
    fn condition_estimate_close_to_exact_for_diagonal() {
        let a = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0, 0.0), c(1e-3, 0.0), c(10.0, 0.0)]));
        let lu = Lu::factor(&a).unwrap();
        let cond = norm1(&a) * lu.inverse_norm1_estimate();
        assert!((cond - 1e4).abs() < 1e-6);
    }

    #[test]
    fn singular_matrix_rejected() {
        let a = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)]);
        assert!(matches!(
            factor_checked(&a, c(0.0, 0.0)),
            Err(Error::SingularPencil { .. })
        ));
        let z = CMatrix::zeros(2, 2);
        assert!(factor_checked(&z, c(0.0, 0.0)).is_err());
    }

    #[test]
    fn rank_thresholding() {
        let a = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0, 0.0), c(1e-3, 0.0), c(1e-15, 0.0)]));
        assert_eq!(numerical_rank(&a, 1e-10), 2);
        assert_eq!(numerical_rank(&CMatrix::zeros(3, 3), 1e-10), 0);
    }

    #[test]
    fn truncation_bases_are_orthonormal() {
        let l = CMatrix::from_fn(4, 4, |i, j| c((i + 2 * j) as f64, (i as f64 - j as f64) * 0.5));
        let ls = CMatrix::from_fn(4, 4, |i, j| c(1.0 / (1.0 + i as f64 + j as f64), 0.1 * j as f64));
        let t = truncate_pencil(&l, &ls, Truncation::Order(3)).unwrap();
        let ident = CMatrix::identity(3, 3);
        assert!((t.y.adjoint() * &t.y - &ident).norm() < 1e-12);
        assert!((t.x.adjoint() * &t.x - &ident).norm() < 1e-12);
        assert!(matches!(
            truncate_pencil(&l, &ls, Truncation::Order(5)),
            Err(Error::InvalidOrder { r: 5, max: 4 })
        ));
        assert!(truncate_pencil(&l, &ls, Truncation::Order(0)).is_err());
    }
}
