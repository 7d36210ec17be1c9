#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use soloewner::benchgen::{random_rayleigh_system, GeneratorSpec};
use soloewner::sampling::{log_imaginary_points, sample_transfer};
use soloewner::*;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rel_err(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

pub fn demo_samples(n: usize) -> SampleSet {
    sample_transfer(&benchgen::demo_system(), &log_imaginary_points(0.1, 10.0, n)).unwrap()
}

/// Random Rayleigh system with modes inside roughly [0.3, 3] rad/s, the
/// range where `i[0.1, 10]` sampling sees every mode clearly.
pub fn random_system(n: usize, seed: u64) -> SecondOrderSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let params = DampingParams::new(rng.random_range(0.01..0.2), rng.random_range(0.001..0.05)).unwrap();
    let spec = GeneratorSpec {
        stiffness_range: (0.2, 15.0),
        ..GeneratorSpec::new(n, params, seed)
    };
    random_rayleigh_system(&spec).unwrap()
}

/// Max relative deviation between two transfer functions over `points`.
pub fn max_rel_diff<A, B>(a: &A, b: &B, points: &[Complex64]) -> f64
where
    A: TransferFunction + ?Sized,
    B: TransferFunction + ?Sized,
{
    points
        .iter()
        .map(|&s| rel_err(a.transfer(s).unwrap(), b.transfer(s).unwrap()))
        .fold(0.0, f64::max)
}

/// Worst relative interpolation error over the samples of `data`.
pub fn max_interp_err<T: TransferFunction + ?Sized>(model: &T, data: &PartitionedData) -> f64 {
    data.flatten()
        .iter()
        .map(|x| rel_err(model.transfer(x.point).unwrap(), x.value))
        .fold(0.0, f64::max)
}

/// Off-axis points `sigma + i omega` away from the sampling grid.
pub fn random_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| c(rng.random_range(0.05..1.0), rng.random_range(0.1..10.0)))
        .collect()
}

/// `n` random complex numbers with magnitude in [1e-3, 1e3].
pub fn well_scaled(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| {
            let r = 10f64.powf(rng.random_range(-3.0..3.0));
            Complex64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU))
        })
        .collect()
}
