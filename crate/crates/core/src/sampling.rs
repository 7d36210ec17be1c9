//! Frequency samples, left/right partitioning and train/test splitting.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::CVector;
use crate::systems::TransferFunction;

/// Relative mismatch tolerated between `H(conj s)` and `conj H(s)`.
pub const CONJUGATE_TOL: f64 = 1e-10;

/// One interpolation pair `(s, H(s))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencySample {
    pub point: Complex64,
    pub value: Complex64,
}

impl FrequencySample {
    pub fn new(point: Complex64, value: Complex64) -> Self {
        Self { point, value }
    }

    fn is_finite(&self) -> bool {
        self.point.is_finite() && self.value.is_finite()
    }

    fn conj(&self) -> Self {
        Self::new(self.point.conj(), self.value.conj())
    }
}

fn check_samples(samples: &[FrequencySample]) -> Result<()> {
    if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    let mut pts: Vec<(f64, f64)> = samples.iter().map(|s| (s.point.re, s.point.im)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    if let Some(w) = pts.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicatePoint(Complex64::new(w[0].0, w[0].1)));
    }
    Ok(())
}

/// Ordered samples with finite, pairwise distinct points.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SampleSet {
    samples: Vec<FrequencySample>,
}

impl SampleSet {
    pub fn new(samples: Vec<FrequencySample>) -> Result<Self> {
        check_samples(&samples)?;
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[FrequencySample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn points(&self) -> Vec<Complex64> {
        self.samples.iter().map(|s| s.point).collect()
    }

    /// Every sample value multiplied by `c`.
    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            samples: self
                .samples
                .iter()
                .map(|s| FrequencySample::new(s.point, s.value * c))
                .collect(),
        }
    }

    fn partner_of(&self, i: usize) -> Option<usize> {
        let target = self.samples[i].point.conj();
        self.samples.iter().position(|s| s.point == target)
    }

    /// True when the set contains a non-real point and every non-real point
    /// has its conjugate partner with a consistent value.
    pub fn is_conjugate_closed(&self) -> bool {
        let mut any_complex = false;
        for (i, s) in self.samples.iter().enumerate() {
            if s.point.im == 0.0 {
                continue;
            }
            any_complex = true;
            match self.partner_of(i) {
                Some(j) if values_conjugate(s.value, self.samples[j].value) => {}
                _ => return false,
            }
        }
        any_complex
    }
}

fn values_conjugate(v: Complex64, partner: Complex64) -> bool {
    let scale = v.norm().max(partner.norm());
    (partner - v.conj()).norm() <= CONJUGATE_TOL * scale
}

/// Appends `(conj s, conj H(s))` for every non-real sample lacking a partner.
pub fn conjugate_close(data: &SampleSet) -> Result<SampleSet> {
    let mut out = data.samples.clone();
    for (i, s) in data.samples.iter().enumerate() {
        if s.point.im == 0.0 {
            continue;
        }
        match data.partner_of(i) {
            Some(j) => {
                if !values_conjugate(s.value, data.samples[j].value) {
                    return Err(Error::ConjugateInconsistency { point: s.point });
                }
            }
            None => out.push(s.conj()),
        }
    }
    SampleSet::new(out)
}

/// How samples are dealt into the right (lambda) and left (mu) sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PartitionStrategy {
    /// 1st, 3rd, ... sample to the right set; 2nd, 4th, ... to the left.
    #[default]
    Interleave,
    /// First half right, second half left.
    FirstHalfRight,
}

impl std::str::FromStr for PartitionStrategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "interleave" => Ok(Self::Interleave),
            "half" | "first-half-right" => Ok(Self::FirstHalfRight),
            other => Err(Error::Parse(format!("unknown partition strategy '{other}'"))),
        }
    }
}

/// Right data `(lambda_j, w_j)` and left data `(mu_i, v_i)` of equal size.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionedData {
    right: Vec<FrequencySample>,
    left: Vec<FrequencySample>,
}

impl PartitionedData {
    /// Rejects unequal sizes, duplicates within a side and any `lambda_j = mu_i`.
    pub fn new(right: Vec<FrequencySample>, left: Vec<FrequencySample>) -> Result<Self> {
        if right.len() != left.len() {
            return Err(Error::Dimension(format!(
                "right set has {} samples, left set {}",
                right.len(),
                left.len()
            )));
        }
        let all: Vec<FrequencySample> = right.iter().chain(left.iter()).copied().collect();
        check_samples(&all)?;
        Ok(Self { right, left })
    }

    /// Skips validation; lets tests reach the guards in the pencil builders.
    #[cfg(test)]
    pub(crate) fn unchecked(right: Vec<FrequencySample>, left: Vec<FrequencySample>) -> Self {
        Self { right, left }
    }

    /// `ell`, the size of each side.
    pub fn len(&self) -> usize {
        self.right.len()
    }

    pub fn is_empty(&self) -> bool {
        self.right.is_empty()
    }

    pub fn right(&self) -> &[FrequencySample] {
        &self.right
    }

    pub fn left(&self) -> &[FrequencySample] {
        &self.left
    }

    /// Diagonal of Lambda.
    pub fn lambdas(&self) -> Vec<Complex64> {
        self.right.iter().map(|s| s.point).collect()
    }

    /// Diagonal of the left point matrix.
    pub fn mus(&self) -> Vec<Complex64> {
        self.left.iter().map(|s| s.point).collect()
    }

    /// `H(Lambda)`, the right values `w`.
    pub fn h_lambda(&self) -> CVector {
        CVector::from_iterator(self.len(), self.right.iter().map(|s| s.value))
    }

    /// `H(M)`, the left values `v`.
    pub fn h_mu(&self) -> CVector {
        CVector::from_iterator(self.len(), self.left.iter().map(|s| s.value))
    }

    /// Right samples followed by left samples.
    pub fn flatten(&self) -> Vec<FrequencySample> {
        self.right.iter().chain(self.left.iter()).copied().collect()
    }

    /// Positions of conjugate partners within one side; `None` for real
    /// points. Fails if a non-real point's partner is not on the same side.
    pub(crate) fn conjugate_pairs(side: &[FrequencySample]) -> Result<Vec<Option<usize>>> {
        side.iter()
            .map(|s| {
                if s.point.im == 0.0 {
                    return Ok(None);
                }
                side.iter()
                    .position(|t| t.point == s.point.conj() && values_conjugate(s.value, t.value))
                    .map(Some)
                    .ok_or(Error::NotConjugateClosed)
            })
            .collect()
    }
}

/// Splits `data` into right and left sets. Conjugate-closed data keeps each
/// conjugate pair on one side.
pub fn partition(data: &SampleSet, strategy: PartitionStrategy) -> Result<PartitionedData> {
    let rho = data.len();
    if !rho.is_multiple_of(2) {
        return Err(Error::OddSampleCount(rho));
    }
    check_samples(&data.samples)?;

    let units: Vec<Vec<usize>> = if data.is_conjugate_closed() {
        let mut used = vec![false; rho];
        let mut units = Vec::new();
        for i in 0..rho {
            if used[i] {
                continue;
            }
            used[i] = true;
            match data.partner_of(i).filter(|_| data.samples[i].point.im != 0.0) {
                Some(j) => {
                    used[j] = true;
                    units.push(vec![i, j]);
                }
                None => units.push(vec![i]),
            }
        }
        units
    } else {
        (0..rho).map(|i| vec![i]).collect()
    };

    let half = rho / 2;
    let (mut right, mut left) = (Vec::with_capacity(half), Vec::with_capacity(half));
    match strategy {
        PartitionStrategy::Interleave => {
            for unit in &units {
                // Smaller side first; ties go right, so singletons alternate.
                let side = if right.len() <= left.len() { &mut right } else { &mut left };
                side.extend(unit.iter().map(|&i| data.samples[i]));
            }
        }
        PartitionStrategy::FirstHalfRight => {
            for unit in &units {
                let side = if right.len() < half { &mut right } else { &mut left };
                side.extend(unit.iter().map(|&i| data.samples[i]));
            }
        }
    }
    if right.len() != left.len() {
        return Err(Error::UnbalancedConjugatePartition);
    }
    PartitionedData::new(right, left)
}

/// Seeded split into `(train, test)`. The test share is `round(rho * f)`;
/// an odd training count takes one sample back from the test set. Both
/// outputs keep the input order.
pub fn train_test_split(
    data: &SampleSet,
    test_fraction: f64,
    seed: u64,
) -> Result<(SampleSet, SampleSet)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidFraction(test_fraction));
    }
    let rho = data.len();
    if rho < 4 {
        return Err(Error::TooFewSamples { got: rho, need: 4 });
    }
    let mut n_test = ((rho as f64) * test_fraction).round() as usize;
    n_test = n_test.clamp(1, rho - 2);
    if (rho - n_test) % 2 == 1 {
        n_test -= 1;
    }
    let mut idx: Vec<usize> = (0..rho).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut is_test = vec![false; rho];
    for &i in &idx[..n_test] {
        is_test[i] = true;
    }
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (i, s) in data.samples.iter().enumerate() {
        if is_test[i] {
            test.push(*s);
        } else {
            train.push(*s);
        }
    }
    Ok((SampleSet { samples: train }, SampleSet { samples: test }))
}

/// `(s, H(s))` for each point, in order.
pub fn sample_transfer<T: TransferFunction + ?Sized>(
    sys: &T,
    points: &[Complex64],
) -> Result<SampleSet> {
    let samples = points
        .iter()
        .map(|&s| Ok(FrequencySample::new(s, sys.transfer(s)?)))
        .collect::<Result<Vec<_>>>()?;
    SampleSet::new(samples)
}

/// `n` points `i w` with `w` log-spaced over `[wmin, wmax]`.
pub fn log_imaginary_points(wmin: f64, wmax: f64, n: usize) -> Vec<Complex64> {
    logspace(wmin, wmax, n)
        .into_iter()
        .map(|w| Complex64::new(0.0, w))
        .collect()
}

/// `n` log-spaced values from `a` to `b` inclusive.
pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let (la, lb) = (a.log10(), b.log10());
            (0..n)
                .map(|k| {
                    if k == 0 {
                        a
                    } else if k == n - 1 {
                        b
                    } else {
                        10f64.powf(la + (lb - la) * k as f64 / (n - 1) as f64)
                    }
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchgen::demo_system;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample(p: Complex64, v: Complex64) -> FrequencySample {
        FrequencySample::new(p, v)
    }

    fn numbered(n: usize) -> SampleSet {
        SampleSet::new(
            (1..=n)
                .map(|k| sample(c(0.0, k as f64), c(k as f64, 0.0)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn interleave_and_half() {
        let d = partition(&numbered(4), PartitionStrategy::Interleave).unwrap();
        assert_eq!(d.lambdas(), vec![c(0.0, 1.0), c(0.0, 3.0)]);
        assert_eq!(d.mus(), vec![c(0.0, 2.0), c(0.0, 4.0)]);
        let d = partition(&numbered(2), PartitionStrategy::FirstHalfRight).unwrap();
        assert_eq!(d.lambdas(), vec![c(0.0, 1.0)]);
        assert_eq!(d.mus(), vec![c(0.0, 2.0)]);
        assert_eq!(
            partition(&numbered(3), PartitionStrategy::Interleave),
            Err(Error::OddSampleCount(3))
        );
    }

    #[test]
    fn duplicates_rejected() {
        let dup = vec![sample(c(0.0, 1.0), c(1.0, 0.0)), sample(c(0.0, 1.0), c(2.0, 0.0))];
        assert!(matches!(SampleSet::new(dup.clone()), Err(Error::DuplicatePoint(_))));
        assert!(PartitionedData::new(vec![dup[0]], vec![dup[1]]).is_err());
        assert!(matches!(
            SampleSet::new(vec![sample(c(f64::NAN, 0.0), c(0.0, 0.0))]),
            Err(Error::NonFinite(0))
        ));
    }

    #[test]
    fn conjugate_closure_examples() {
        let one = SampleSet::new(vec![sample(c(0.0, 1.0), c(1.0, 2.0))]).unwrap();
        let closed = conjugate_close(&one).unwrap();
        assert_eq!(
            closed.samples(),
            &[sample(c(0.0, 1.0), c(1.0, 2.0)), sample(c(0.0, -1.0), c(1.0, -2.0))]
        );
        assert_eq!(conjugate_close(&closed).unwrap(), closed);

        let real = SampleSet::new(vec![sample(c(1.0, 0.0), c(3.0, 0.0))]).unwrap();
        assert_eq!(conjugate_close(&real).unwrap(), real);
        assert!(!real.is_conjugate_closed());

        let bad = SampleSet::new(vec![
            sample(c(0.0, 1.0), c(1.0, 0.0)),
            sample(c(0.0, -1.0), c(5.0, 0.0)),
        ])
        .unwrap();
        assert!(matches!(
            conjugate_close(&bad),
            Err(Error::ConjugateInconsistency { .. })
        ));
    }

    #[test]
    fn conjugate_pairs_stay_together() {
        let closed = conjugate_close(&numbered(4)).unwrap();
        for strategy in [PartitionStrategy::Interleave, PartitionStrategy::FirstHalfRight] {
            let d = partition(&closed, strategy).unwrap();
            assert_eq!(d.len(), 4);
            assert!(PartitionedData::conjugate_pairs(d.right()).is_ok());
            assert!(PartitionedData::conjugate_pairs(d.left()).is_ok());
        }
        // Three pairs cannot be dealt evenly.
        let odd = conjugate_close(&numbered(3)).unwrap();
        assert_eq!(
            partition(&odd, PartitionStrategy::Interleave),
            Err(Error::UnbalancedConjugatePartition)
        );
    }

    #[test]
    fn split_sizes_and_determinism() {
        let (tr, te) = train_test_split(&numbered(20), 0.2, 0).unwrap();
        assert_eq!((tr.len(), te.len()), (16, 4));
        let (tr, te) = train_test_split(&numbered(10), 0.3, 0).unwrap();
        assert_eq!((tr.len(), te.len()), (8, 2));
        let a = train_test_split(&numbered(30), 0.2, 11).unwrap();
        let b = train_test_split(&numbered(30), 0.2, 11).unwrap();
        assert_eq!(a, b);
        let c_ = train_test_split(&numbered(30), 0.2, 12).unwrap();
        assert_ne!(a, c_);
        assert!(matches!(train_test_split(&numbered(20), 1.0, 0), Err(Error::InvalidFraction(_))));
        assert!(matches!(train_test_split(&numbered(20), 0.0, 0), Err(Error::InvalidFraction(_))));
        assert!(matches!(train_test_split(&numbered(3), 0.5, 0), Err(Error::TooFewSamples { .. })));
    }

    #[test]
    fn sampling_the_demo() {
        let demo = demo_system();
        let s = sample_transfer(&demo, &[c(0.0, 0.0)]).unwrap();
        assert!((s.samples()[0].value - c(8.5, 0.0)).norm() < 1e-14);
        let pts = log_imaginary_points(0.1, 10.0, 20);
        assert_eq!(pts.len(), 20);
        assert_eq!(pts[0], c(0.0, 0.1));
        assert_eq!(pts[19], c(0.0, 10.0));
        let s = sample_transfer(&demo, &pts).unwrap();
        assert_eq!(s.len(), 20);
        assert!(s.samples().iter().all(|x| x.value.is_finite()));
        assert!(sample_transfer(&demo, &[]).unwrap().is_empty());
    }
}
