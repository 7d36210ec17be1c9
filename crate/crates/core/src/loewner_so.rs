//! Second-order Loewner framework for Rayleigh-damped systems.
//!
//! With known `(alpha, beta)` the divided differences of the classical
//! pencil are taken in the variable `f(s) = n(s) / d(s)`, where
//! `d(s) = 1 + beta s` and `n(s) = s^2 + alpha s`:
//!
//! ```text
//! Lso [i, j] = (d(mu_i) v_i - d(lambda_j) w_j) / (f(mu_i) - f(lambda_j))
//! Lso_s[i, j] = (n(mu_i) v_i - n(lambda_j) w_j) / (f(mu_i) - f(lambda_j))
//! Bso = (I + beta M) H(M),   Cso = H(Lambda)^T (I + beta Lambda)
//! ```
//!
//! The realization `(-Lso, -alpha Lso + beta Lso_s, Lso_s, Bso, Cso)`
//! interpolates the data, and `rank(Lso)` is the order of the minimal
//! Rayleigh-damped interpolant. Because `f` is two-to-one, distinct points
//! can still give `f(mu_i) = f(lambda_j)`; such data is rejected.

use nalgebra::allocator::Allocator;
use nalgebra::{DefaultAllocator, Dim, OMatrix};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    factor_checked, frobenius, numerical_rank, truncate_pencil, CMatrix, CVector, SvdTruncation,
    Truncation,
};
use crate::sampling::{FrequencySample, PartitionedData};
use crate::systems::{DampingParams, SecondOrderSystem, TransferFunction};

/// Relative threshold under which `f(mu_i)` and `f(lambda_j)` collide.
pub const F_COLLISION_TOL: f64 = 1e-12;

/// Relative imaginary residue accepted (and dropped) by realification.
pub const REALIFY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarMaps {
    pub d: Complex64,
    pub n: Complex64,
    pub f: Complex64,
}

/// `d = 1 + beta s`, `n = s^2 + alpha s`, `f = n / d`.
pub fn scalar_maps(params: DampingParams, s: Complex64) -> Result<ScalarMaps> {
    let d = 1.0 + params.beta * s;
    let n = s * s + params.alpha * s;
    if d.norm() <= 4.0 * f64::EPSILON * (1.0 + params.beta * s.norm()) {
        return Err(Error::PoleOfF(s));
    }
    Ok(ScalarMaps { d, n, f: n / d })
}

/// Access to a second-order Loewner pencil, whether in the coordinates of
/// the data or after a realifying change of basis.
pub trait SoPencil {
    fn l(&self) -> &CMatrix;
    fn ls(&self) -> &CMatrix;
    fn bso(&self) -> &CVector;
    fn cso(&self) -> &CVector;
    fn params(&self) -> DampingParams;
}

#[derive(Debug, Clone)]
pub struct SoLoewnerData {
    pub l: CMatrix,
    pub ls: CMatrix,
    pub bso: CVector,
    /// Output row, stored as a column vector.
    pub cso: CVector,
    pub params: DampingParams,
    pub data: PartitionedData,
}

impl SoPencil for SoLoewnerData {
    fn l(&self) -> &CMatrix {
        &self.l
    }
    fn ls(&self) -> &CMatrix {
        &self.ls
    }
    fn bso(&self) -> &CVector {
        &self.bso
    }
    fn cso(&self) -> &CVector {
        &self.cso
    }
    fn params(&self) -> DampingParams {
        self.params
    }
}

/// A pencil with real entries obtained from conjugate-closed data.
#[derive(Debug, Clone)]
pub struct RealPencil {
    pub l: CMatrix,
    pub ls: CMatrix,
    pub bso: CVector,
    pub cso: CVector,
    pub params: DampingParams,
}

impl SoPencil for RealPencil {
    fn l(&self) -> &CMatrix {
        &self.l
    }
    fn ls(&self) -> &CMatrix {
        &self.ls
    }
    fn bso(&self) -> &CVector {
        &self.bso
    }
    fn cso(&self) -> &CVector {
        &self.cso
    }
    fn params(&self) -> DampingParams {
        self.params
    }
}

pub fn build_so_loewner(data: &PartitionedData, params: DampingParams) -> Result<SoLoewnerData> {
    let right = data
        .lambdas()
        .into_iter()
        .map(|s| scalar_maps(params, s))
        .collect::<Result<Vec<_>>>()?;
    let left = data
        .mus()
        .into_iter()
        .map(|s| scalar_maps(params, s))
        .collect::<Result<Vec<_>>>()?;
    let w = data.h_lambda();
    let v = data.h_mu();
    let n = data.len();
    let mut l = CMatrix::zeros(n, n);
    let mut ls = CMatrix::zeros(n, n);
    for (i, mi) in left.iter().enumerate() {
        for (j, lj) in right.iter().enumerate() {
            let den = mi.f - lj.f;
            if den.norm() <= F_COLLISION_TOL * (1.0 + mi.f.norm()) {
                return Err(Error::FCollision { row: i, col: j });
            }
            l[(i, j)] = (mi.d * v[i] - lj.d * w[j]) / den;
            ls[(i, j)] = (mi.n * v[i] - lj.n * w[j]) / den;
        }
    }
    let bso = CVector::from_iterator(n, left.iter().zip(v.iter()).map(|(m, vi)| m.d * vi));
    let cso = CVector::from_iterator(n, right.iter().zip(w.iter()).map(|(m, wj)| m.d * wj));
    Ok(SoLoewnerData {
        l,
        ls,
        bso,
        cso,
        params,
        data: data.clone(),
    })
}

/// Relative Frobenius residuals of
/// `L F(Lambda) - F(M) L = 1 H(Lambda)^T D(Lambda) - D(M) H(M) 1^T` and the
/// same with `Ls` and `N` in place of `L` and `D`, each over `||rhs|| + 1`.
pub fn so_sylvester_residuals(sd: &SoLoewnerData) -> Result<(f64, f64)> {
    let right = sd
        .data
        .lambdas()
        .into_iter()
        .map(|s| scalar_maps(sd.params, s))
        .collect::<Result<Vec<_>>>()?;
    let left = sd
        .data
        .mus()
        .into_iter()
        .map(|s| scalar_maps(sd.params, s))
        .collect::<Result<Vec<_>>>()?;
    let w = sd.data.h_lambda();
    let v = sd.data.h_mu();
    let n = w.len();
    let rhs_l = CMatrix::from_fn(n, n, |i, j| w[j] * right[j].d - left[i].d * v[i]);
    let rhs_ls = CMatrix::from_fn(n, n, |i, j| w[j] * right[j].n - left[i].n * v[i]);
    let res_l = CMatrix::from_fn(n, n, |i, j| {
        sd.l[(i, j)] * right[j].f - left[i].f * sd.l[(i, j)] - rhs_l[(i, j)]
    });
    let res_ls = CMatrix::from_fn(n, n, |i, j| {
        sd.ls[(i, j)] * right[j].f - left[i].f * sd.ls[(i, j)] - rhs_ls[(i, j)]
    });
    Ok((
        frobenius(&res_l) / (frobenius(&rhs_l) + 1.0),
        frobenius(&res_ls) / (frobenius(&rhs_ls) + 1.0),
    ))
}

/// `(-Lso, alpha M + beta K, Lso_s, Bso, Cso)` without truncation. Fails if
/// `(1 + beta s) Lso_s - (s^2 + alpha s) Lso` is singular at a data point.
pub fn identify_so_exact(sd: &SoLoewnerData) -> Result<SecondOrderSystem> {
    for s in sd.data.lambdas().into_iter().chain(sd.data.mus()) {
        let maps = scalar_maps(sd.params, s)?;
        let pencil = sd.ls.map(|z| z * maps.d) - sd.l.map(|z| z * maps.n);
        factor_checked(&pencil, s)?;
    }
    SecondOrderSystem::with_rayleigh(
        -&sd.l,
        sd.ls.clone(),
        sd.bso.clone(),
        sd.cso.clone(),
        sd.params,
    )
}

/// Projects the pencil onto the leading `r` left singular vectors `Y` of
/// `[Lso Lso_s]` and right singular vectors `X` of `[Lso; Lso_s]`:
/// `M = -Y^H Lso X`, `K = Y^H Lso_s X`, `D = alpha M + beta K`,
/// `B = Y^H Bso`, `C = Cso X`.
pub fn identify_so_reduced<P: SoPencil + ?Sized>(
    pencil: &P,
    mode: Truncation,
) -> Result<(SecondOrderSystem, SvdTruncation)> {
    let trunc = truncate_pencil(pencil.l(), pencil.ls(), mode)?;
    let yh = trunc.y.adjoint();
    let m = -(&yh * pencil.l() * &trunc.x);
    let k = &yh * pencil.ls() * &trunc.x;
    let b = &yh * pencil.bso();
    let c = trunc.x.transpose() * pencil.cso();
    let sys = SecondOrderSystem::with_rayleigh(m, k, b, c, pencil.params())?;
    Ok((sys, trunc))
}

/// Numerical rank of `Lso`: the order of the Rayleigh-damped interpolant.
pub fn estimate_order(sd: &SoLoewnerData, tau: f64) -> usize {
    numerical_rank(&sd.l, tau)
}

/// Unitary map of one side's coordinates: each conjugate pair `(x, conj x)`
/// goes to `(sqrt2 Re x, sqrt2 Im x)`, real points are left alone.
fn conjugate_pair_transform(side: &[FrequencySample]) -> Result<CMatrix> {
    let pairs = PartitionedData::conjugate_pairs(side)?;
    let n = side.len();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut q = CMatrix::zeros(n, n);
    for (j, partner) in pairs.iter().enumerate() {
        match *partner {
            None => q[(j, j)] = Complex64::new(1.0, 0.0),
            Some(p) if j < p => {
                q[(j, j)] = Complex64::new(h, 0.0);
                q[(p, j)] = Complex64::new(h, 0.0);
                q[(j, p)] = Complex64::new(0.0, -h);
                q[(p, p)] = Complex64::new(0.0, h);
            }
            Some(_) => {}
        }
    }
    Ok(q)
}

fn transforms(data: &PartitionedData) -> Result<(CMatrix, CMatrix)> {
    let q = conjugate_pair_transform(data.right())?;
    let p = conjugate_pair_transform(data.left())?.transpose();
    Ok((p, q))
}

fn drop_imag_matrix<R: Dim, C: Dim>(
    a: OMatrix<Complex64, R, C>,
    scale: f64,
) -> Result<OMatrix<Complex64, R, C>>
where
    DefaultAllocator: Allocator<R, C>,
{
    let worst = a.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if worst > REALIFY_TOL * scale {
        return Err(Error::ResidualImaginary(worst / scale.max(f64::MIN_POSITIVE)));
    }
    Ok(a.map(|z| Complex64::new(z.re, 0.0)))
}

impl SoLoewnerData {
    /// The pencil in real coordinates. Requires conjugate-closed data with
    /// each pair on one side; SVD truncation of the result yields a real
    /// reduced model.
    pub fn realified(&self) -> Result<RealPencil> {
        let (p, q) = transforms(&self.data)?;
        let l = &p * &self.l * &q;
        let ls = &p * &self.ls * &q;
        let bso = &p * &self.bso;
        let cso = q.transpose() * &self.cso;
        let scale = [frobenius(&l), frobenius(&ls)]
            .into_iter()
            .chain([bso.norm(), cso.norm()])
            .fold(0.0, f64::max);
        Ok(RealPencil {
            l: drop_imag_matrix(l, scale)?,
            ls: drop_imag_matrix(ls, scale)?,
            bso: drop_imag_matrix(bso, scale)?,
            cso: drop_imag_matrix(cso, scale)?,
            params: self.params,
        })
    }
}

/// Real realization of a model in Loewner coordinates (order `ell`), via
/// `(P M Q, P D Q, P K Q, P B, C Q)` with the conjugate-pair transforms of
/// the left (`P`) and right (`Q`) data.
pub fn realify(sys: &SecondOrderSystem, data: &PartitionedData) -> Result<SecondOrderSystem> {
    if sys.order() != data.len() {
        return Err(Error::Dimension(format!(
            "model order {} does not match the {} interpolation points per side",
            sys.order(),
            data.len()
        )));
    }
    let (p, q) = transforms(data)?;
    let m = &p * sys.m() * &q;
    let d = &p * sys.d() * &q;
    let k = &p * sys.k() * &q;
    let b = &p * sys.b();
    let c = q.transpose() * sys.c();
    SecondOrderSystem::new(m, d, k, b, c, None)
        .and_then(|t| t.into_real(REALIFY_TOL))
        .and_then(|t| match sys.rayleigh() {
            Some(params) => SecondOrderSystem::with_rayleigh(
                t.m().clone(),
                t.k().clone(),
                t.b().clone(),
                t.c().clone(),
                params,
            ),
            None => Ok(t),
        })
}
