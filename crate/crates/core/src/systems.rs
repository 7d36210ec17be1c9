//! First- and second-order realizations and their transfer functions.
//!
//! A second-order system is `(M, D, K, B, C)` with transfer function
//! `H(s) = C (s^2 M + s D + K)^{-1} B`; a first-order one is `(E, A, B, C)`
//! with `H(s) = C (s E - A)^{-1} B`. Everything is complex; real models are
//! stored with zero imaginary parts.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{factor_checked, frobenius, numerical_rank, CMatrix, CVector};

/// Rayleigh damping coefficients: `D = alpha M + beta K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampingParams {
    pub alpha: f64,
    pub beta: f64,
}

impl DampingParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if alpha.is_finite() && beta.is_finite() && alpha >= 0.0 && beta >= 0.0 {
            Ok(Self { alpha, beta })
        } else {
            Err(Error::InvalidDamping { alpha, beta })
        }
    }

    /// No damping at all; the SO Loewner pencil then reduces to the
    /// classical one on squared points.
    pub const fn undamped() -> Self {
        Self {
            alpha: 0.0,
            beta: 0.0,
        }
    }
}

/// `alpha M + beta K`, entrywise.
pub fn rayleigh_damping(m: &CMatrix, k: &CMatrix, params: DampingParams) -> Result<CMatrix> {
    if !m.is_square() || m.shape() != k.shape() {
        return Err(Error::Dimension(format!(
            "M {:?} and K {:?} must be square and equal-sized",
            m.shape(),
            k.shape()
        )));
    }
    Ok(m.zip_map(k, |mij, kij| mij * params.alpha + kij * params.beta))
}

/// Anything with a scalar transfer function.
pub trait TransferFunction {
    fn order(&self) -> usize;
    fn transfer(&self, s: Complex64) -> Result<Complex64>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct SecondOrderSystem {
    m: CMatrix,
    d: CMatrix,
    k: CMatrix,
    b: CVector,
    c: CVector,
    rayleigh: Option<DampingParams>,
}

impl SecondOrderSystem {
    /// Checks dimensions, and the Rayleigh relation when `rayleigh` is given.
    pub fn new(
        m: CMatrix,
        d: CMatrix,
        k: CMatrix,
        b: CVector,
        c: CVector,
        rayleigh: Option<DampingParams>,
    ) -> Result<Self> {
        let n = m.nrows();
        if n == 0
            || m.shape() != (n, n)
            || d.shape() != (n, n)
            || k.shape() != (n, n)
            || b.len() != n
            || c.len() != n
        {
            return Err(Error::Dimension(format!(
                "inconsistent SO realization: M {:?}, D {:?}, K {:?}, B {}, C {}",
                m.shape(),
                d.shape(),
                k.shape(),
                b.len(),
                c.len()
            )));
        }
        let sys = Self {
            m,
            d,
            k,
            b,
            c,
            rayleigh,
        };
        if let Some(p) = rayleigh {
            let gap = sys.rayleigh_gap(p);
            if gap > 1e-12 * (frobenius(&sys.d) + 1.0) {
                return Err(Error::Dimension(format!(
                    "D differs from alpha M + beta K by {gap:e} (alpha={}, beta={})",
                    p.alpha, p.beta
                )));
            }
        }
        Ok(sys)
    }

    /// Builds `D = alpha M + beta K` and records the parameters.
    pub fn with_rayleigh(
        m: CMatrix,
        k: CMatrix,
        b: CVector,
        c: CVector,
        params: DampingParams,
    ) -> Result<Self> {
        let d = rayleigh_damping(&m, &k, params)?;
        Self::new(m, d, k, b, c, Some(params))
    }

    pub fn m(&self) -> &CMatrix {
        &self.m
    }
    pub fn d(&self) -> &CMatrix {
        &self.d
    }
    pub fn k(&self) -> &CMatrix {
        &self.k
    }
    pub fn b(&self) -> &CVector {
        &self.b
    }
    /// Output row, stored as a column vector.
    pub fn c(&self) -> &CVector {
        &self.c
    }
    pub fn rayleigh(&self) -> Option<DampingParams> {
        self.rayleigh
    }

    /// `||D - alpha M - beta K||_F`.
    pub fn rayleigh_gap(&self, p: DampingParams) -> f64 {
        let target = self.m.zip_map(&self.k, |mij, kij| mij * p.alpha + kij * p.beta);
        frobenius(&(&self.d - target))
    }

    pub fn pencil_at(&self, s: Complex64) -> CMatrix {
        let s2 = s * s;
        CMatrix::from_fn(self.order(), self.order(), |i, j| {
            s2 * self.m[(i, j)] + s * self.d[(i, j)] + self.k[(i, j)]
        })
    }

    /// Block embedding `E = [[I, 0], [0, M]]`, `A = [[0, I], [-K, -D]]`,
    /// `B = [0; B]`, `C = [C, 0]`.
    pub fn to_first_order(&self) -> FirstOrderSystem {
        let n = self.order();
        let one = Complex64::new(1.0, 0.0);
        let mut e = CMatrix::zeros(2 * n, 2 * n);
        let mut a = CMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            e[(i, i)] = one;
            a[(i, n + i)] = one;
        }
        e.view_mut((n, n), (n, n)).copy_from(&self.m);
        a.view_mut((n, 0), (n, n)).copy_from(&(-&self.k));
        a.view_mut((n, n), (n, n)).copy_from(&(-&self.d));
        let mut b = CVector::zeros(2 * n);
        b.rows_mut(n, n).copy_from(&self.b);
        let mut c = CVector::zeros(2 * n);
        c.rows_mut(0, n).copy_from(&self.c);
        FirstOrderSystem { e, a, b, c }
    }

    /// Largest `|Im|` over all entries relative to the largest modulus.
    pub fn max_relative_imag(&self) -> f64 {
        let mats = [&self.m, &self.d, &self.k];
        let scale = mats
            .iter()
            .flat_map(|m| m.iter())
            .chain(self.b.iter())
            .chain(self.c.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        let imag = mats
            .iter()
            .flat_map(|m| m.iter())
            .chain(self.b.iter())
            .chain(self.c.iter())
            .map(|z| z.im.abs())
            .fold(0.0, f64::max);
        if scale == 0.0 {
            0.0
        } else {
            imag / scale
        }
    }

    /// Drops imaginary parts, refusing when any exceeds `tol` relative.
    pub fn into_real(self, tol: f64) -> Result<Self> {
        let rel = self.max_relative_imag();
        if rel > tol {
            return Err(Error::ResidualImaginary(rel));
        }
        let re_m = |m: &CMatrix| m.map(|z| Complex64::new(z.re, 0.0));
        let re_v = |v: &CVector| v.map(|z| Complex64::new(z.re, 0.0));
        let m = re_m(&self.m);
        let k = re_m(&self.k);
        // Recompute D from the rounded M, K so the Rayleigh relation stays exact.
        let d = match self.rayleigh {
            Some(p) => rayleigh_damping(&m, &k, p)?,
            None => re_m(&self.d),
        };
        Self::new(m, d, k, re_v(&self.b), re_v(&self.c), self.rayleigh)
    }
}

impl TransferFunction for SecondOrderSystem {
    fn order(&self) -> usize {
        self.m.nrows()
    }

    fn transfer(&self, s: Complex64) -> Result<Complex64> {
        let lu = factor_checked(&self.pencil_at(s), s)?;
        let x = lu.solve(&self.b);
        Ok(self.c.dot(&x))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FirstOrderSystem {
    e: CMatrix,
    a: CMatrix,
    b: CVector,
    c: CVector,
}

impl FirstOrderSystem {
    pub fn new(e: CMatrix, a: CMatrix, b: CVector, c: CVector) -> Result<Self> {
        let n = e.nrows();
        if n == 0 || e.shape() != (n, n) || a.shape() != (n, n) || b.len() != n || c.len() != n {
            return Err(Error::Dimension(format!(
                "inconsistent FO realization: E {:?}, A {:?}, B {}, C {}",
                e.shape(),
                a.shape(),
                b.len(),
                c.len()
            )));
        }
        Ok(Self { e, a, b, c })
    }

    pub fn e(&self) -> &CMatrix {
        &self.e
    }
    pub fn a(&self) -> &CMatrix {
        &self.a
    }
    pub fn b(&self) -> &CVector {
        &self.b
    }
    pub fn c(&self) -> &CVector {
        &self.c
    }
}

impl TransferFunction for FirstOrderSystem {
    fn order(&self) -> usize {
        self.e.nrows()
    }

    fn transfer(&self, s: Complex64) -> Result<Complex64> {
        let pencil = self.e.map(|z| z * s) - &self.a;
        let lu = factor_checked(&pencil, s)?;
        Ok(self.c.dot(&lu.solve(&self.b)))
    }
}

/// Two-sided interpolation bases of the intrusive projection.
#[derive(Debug, Clone)]
pub struct ProjectionBasis {
    /// Columns `(lambda_i^2 M + lambda_i D + K)^{-1} B`.
    pub v: CMatrix,
    /// Columns `(mu_j^2 M + mu_j D + K)^{-T} C^T`.
    pub w: CMatrix,
    /// Set when `V` or `W` lost column rank at 1e-12.
    pub rank_deficient: bool,
}

/// Structure-preserving Petrov-Galerkin reduction `(W^T M V, W^T D V,
/// W^T K V, W^T B, C V)`. The reduced transfer function matches the full
/// one at every `lambdas[i]` and `mus[j]`.
pub fn structure_preserving_project(
    sys: &SecondOrderSystem,
    lambdas: &[Complex64],
    mus: &[Complex64],
) -> Result<(SecondOrderSystem, ProjectionBasis)> {
    if lambdas.len() != mus.len() || lambdas.is_empty() {
        return Err(Error::Dimension(format!(
            "need equally many right ({}) and left ({}) points, at least one",
            lambdas.len(),
            mus.len()
        )));
    }
    let n = sys.order();
    let l = lambdas.len();
    let mut v = CMatrix::zeros(n, l);
    for (j, &lam) in lambdas.iter().enumerate() {
        let lu = factor_checked(&sys.pencil_at(lam), lam)?;
        v.set_column(j, &lu.solve(sys.b()));
    }
    let mut w = CMatrix::zeros(n, l);
    for (j, &mu) in mus.iter().enumerate() {
        // Solve P(mu)^T w = C^T via the conjugate of P(mu)^H.
        let pt = sys.pencil_at(mu).transpose();
        let lu = factor_checked(&pt, mu)?;
        w.set_column(j, &lu.solve(sys.c()));
    }
    let rank_deficient = numerical_rank(&v, 1e-12) < l || numerical_rank(&w, 1e-12) < l;

    let wt = w.transpose();
    let m_hat = &wt * sys.m() * &v;
    let d_hat = &wt * sys.d() * &v;
    let k_hat = &wt * sys.k() * &v;
    let b_hat = &wt * sys.b();
    let c_hat = v.transpose() * sys.c();
    let rayleigh = sys.rayleigh().filter(|p| {
        let target = m_hat.zip_map(&k_hat, |mij, kij| mij * p.alpha + kij * p.beta);
        frobenius(&(&d_hat - target)) <= 1e-12 * (frobenius(&d_hat) + 1.0)
    });
    let reduced = SecondOrderSystem::new(m_hat, d_hat, k_hat, b_hat, c_hat, rayleigh)?;
    Ok((
        reduced,
        ProjectionBasis {
            v,
            w,
            rank_deficient,
        },
    ))
}
