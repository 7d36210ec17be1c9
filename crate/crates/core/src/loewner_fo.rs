//! Classical (first-order) Loewner framework.
//!
//! Row `i` of every pencil matrix belongs to the left point `mu_i`, column
//! `j` to the right point `lambda_j`:
//!
//! ```text
//! L [i, j]  = (v_i - w_j) / (mu_i - lambda_j)
//! Ls[i, j]  = (mu_i v_i - lambda_j w_j) / (mu_i - lambda_j)
//! ```

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    factor_checked, frobenius, numerical_rank, truncate_pencil, CMatrix, CVector, Truncation,
};
use crate::sampling::PartitionedData;
use crate::systems::FirstOrderSystem;

#[derive(Debug, Clone)]
pub struct LoewnerPair {
    pub l: CMatrix,
    pub ls: CMatrix,
    /// `H(M)`, the left values; becomes the input vector.
    pub v: CVector,
    /// `H(Lambda)`, the right values; becomes the output row.
    pub w: CVector,
    pub data: PartitionedData,
}

pub fn build_fo_loewner(data: &PartitionedData) -> Result<LoewnerPair> {
    let lam = data.lambdas();
    let mu = data.mus();
    let w = data.h_lambda();
    let v = data.h_mu();
    let n = data.len();
    let mut l = CMatrix::zeros(n, n);
    let mut ls = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let den = mu[i] - lam[j];
            if den == Complex64::new(0.0, 0.0) {
                return Err(Error::CoincidentPoints { row: i, col: j });
            }
            l[(i, j)] = (v[i] - w[j]) / den;
            ls[(i, j)] = (mu[i] * v[i] - lam[j] * w[j]) / den;
        }
    }
    Ok(LoewnerPair {
        l,
        ls,
        v,
        w,
        data: data.clone(),
    })
}

/// Relative Frobenius residuals of the two Sylvester equations
/// `M L - L Lambda = v 1^T - 1 w^T` and
/// `M Ls - Ls Lambda = M v 1^T - 1 w^T Lambda`, each divided by
/// `||rhs||_F + 1`.
pub fn fo_sylvester_residuals(pair: &LoewnerPair) -> (f64, f64) {
    let lam = pair.data.lambdas();
    let mu = pair.data.mus();
    let n = lam.len();
    let res_l = CMatrix::from_fn(n, n, |i, j| {
        mu[i] * pair.l[(i, j)] - pair.l[(i, j)] * lam[j] - (pair.v[i] - pair.w[j])
    });
    let rhs_l = CMatrix::from_fn(n, n, |i, j| pair.v[i] - pair.w[j]);
    let res_ls = CMatrix::from_fn(n, n, |i, j| {
        mu[i] * pair.ls[(i, j)] - pair.ls[(i, j)] * lam[j] - (mu[i] * pair.v[i] - pair.w[j] * lam[j])
    });
    let rhs_ls = CMatrix::from_fn(n, n, |i, j| mu[i] * pair.v[i] - pair.w[j] * lam[j]);
    (
        frobenius(&res_l) / (frobenius(&rhs_l) + 1.0),
        frobenius(&res_ls) / (frobenius(&rhs_ls) + 1.0),
    )
}

/// Half the numerical rank of `L`; an odd rank cannot come from a
/// second-order system.
pub fn estimate_so_order(pair: &LoewnerPair, tau: f64) -> Result<usize> {
    let rank = numerical_rank(&pair.l, tau);
    if rank % 2 == 1 {
        return Err(Error::OddRank(rank));
    }
    Ok(rank / 2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FoMode {
    /// Full pencil, `(E, A, B, C) = (-L, -Ls, v, w^T)`.
    Exact,
    Reduced(Truncation),
}

pub fn identify_fo(pair: &LoewnerPair, mode: FoMode) -> Result<FirstOrderSystem> {
    match mode {
        FoMode::Exact => {
            // s E - A = Ls - s L must be invertible at every data point.
            for s in pair.data.lambdas().into_iter().chain(pair.data.mus()) {
                let pencil = &pair.ls - pair.l.map(|z| z * s);
                factor_checked(&pencil, s)?;
            }
            FirstOrderSystem::new(-&pair.l, -&pair.ls, pair.v.clone(), pair.w.clone())
        }
        FoMode::Reduced(t) => {
            let trunc = truncate_pencil(&pair.l, &pair.ls, t)?;
            let yh = trunc.y.adjoint();
            FirstOrderSystem::new(
                -(&yh * &pair.l * &trunc.x),
                -(&yh * &pair.ls * &trunc.x),
                &yh * &pair.v,
                trunc.x.transpose() * &pair.w,
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::FrequencySample;
    use crate::systems::TransferFunction;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn scalar_data() -> PartitionedData {
        PartitionedData::new(
            vec![FrequencySample::new(c(1.0, 0.0), c(2.0, 0.0))],
            vec![FrequencySample::new(c(2.0, 0.0), c(3.0, 0.0))],
        )
        .unwrap()
    }

    #[test]
    fn scalar_pencil() {
        let pair = build_fo_loewner(&scalar_data()).unwrap();
        assert_eq!(pair.l[(0, 0)], c(1.0, 0.0));
        assert_eq!(pair.ls[(0, 0)], c(4.0, 0.0));
        let (r1, r2) = fo_sylvester_residuals(&pair);
        assert!(r1 < 1e-16 && r2 < 1e-16);

        let sys = identify_fo(&pair, FoMode::Exact).unwrap();
        assert_eq!(sys.e()[(0, 0)], c(-1.0, 0.0));
        assert_eq!(sys.a()[(0, 0)], c(-4.0, 0.0));
        assert_eq!(sys.b()[0], c(3.0, 0.0));
        assert_eq!(sys.c()[0], c(2.0, 0.0));
        assert!((sys.transfer(c(1.0, 0.0)).unwrap() - c(2.0, 0.0)).norm() < 1e-15);
        assert!((sys.transfer(c(2.0, 0.0)).unwrap() - c(3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn perturbed_pencil_shows_residual() {
        let mut pair = build_fo_loewner(&scalar_data()).unwrap();
        pair.l[(0, 0)] += c(1e-3, 0.0);
        let (r1, _) = fo_sylvester_residuals(&pair);
        // |mu - lambda| * 1e-3 / (|v - w| + 1) = 1e-3 / 2
        assert!((r1 - 5e-4).abs() < 1e-12);
        assert!(r1 >= 1e-6);
    }

    #[test]
    fn coincident_points_rejected() {
        // A PartitionedData cannot hold lambda = mu; build the pair data by
        // hand to reach the guard.
        let data = PartitionedData::unchecked(
            vec![FrequencySample::new(c(1.0, 0.0), c(2.0, 0.0))],
            vec![FrequencySample::new(c(1.0, 0.0), c(3.0, 0.0))],
        );
        assert_eq!(
            build_fo_loewner(&data).unwrap_err(),
            Error::CoincidentPoints { row: 0, col: 0 }
        );
    }

    #[test]
    fn odd_rank_and_zero_rank() {
        let mut pair = build_fo_loewner(&scalar_data()).unwrap();
        assert_eq!(estimate_so_order(&pair, 1e-10), Err(Error::OddRank(1)));
        pair.l[(0, 0)] = c(0.0, 0.0);
        assert_eq!(estimate_so_order(&pair, 1e-10), Ok(0));
    }
}
