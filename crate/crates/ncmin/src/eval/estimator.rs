//! Adaptive sampling with a Student-t stopping rule: keep drawing trials
//! until the confidence half-width of the running mean falls within the
//! requested tolerance, or a trial budget runs out.

use statrs::distribution::{ContinuousCDF, StudentsT};

/// Running mean and variance in one pass (Welford's update), plus the
/// stopping rule parameters.
#[derive(Debug, Clone)]
pub struct FitnessEstimator {
    n: u64,
    mean: f64,
    m2: f64,
    confidence: f64,
    tolerance: f64,
}

/// Outcome of an adaptive estimation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub trials: u64,
    /// True when the trial budget was exhausted before the half-width
    /// dropped below tolerance; the mean is then less certain than asked.
    pub hit_max: bool,
}

impl FitnessEstimator {
    /// `confidence` is the two-sided level (e.g. 0.95), `tolerance` the
    /// largest acceptable half-width of the confidence interval.
    pub fn new(confidence: f64, tolerance: f64) -> FitnessEstimator {
        assert!(confidence > 0.0 && confidence < 1.0, "confidence must be in (0, 1)");
        assert!(tolerance > 0.0, "tolerance must be positive");
        FitnessEstimator { n: 0, mean: 0.0, m2: 0.0, confidence, tolerance }
    }

    pub fn add(&mut self, sample: f64) {
        self.n += 1;
        let delta = sample - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (sample - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; zero until two samples exist.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    /// Half-width of the confidence interval around the current mean,
    /// `t_{n-1} * s / sqrt(n)`. Infinite until two samples exist.
    pub fn half_width(&self) -> f64 {
        if self.n < 2 {
            return f64::INFINITY;
        }
        let df = (self.n - 1) as f64;
        let t = StudentsT::new(0.0, 1.0, df)
            .expect("valid t distribution")
            .inverse_cdf(1.0 - (1.0 - self.confidence) / 2.0);
        t * self.variance().sqrt() / (self.n as f64).sqrt()
    }

    /// The mean is settled once at least two samples exist and the
    /// half-width is within tolerance.
    pub fn is_settled(&self) -> bool {
        self.n >= 2 && self.half_width() <= self.tolerance
    }
}

/// Draws samples from `sampler` (called with the 0-based trial index) until
/// the mean settles or `max_trials` is reached.
pub fn estimate_fitness(
    mut sampler: impl FnMut(u64) -> f64,
    confidence: f64,
    tolerance: f64,
    max_trials: u64,
) -> Estimate {
    assert!(max_trials >= 2, "need at least two trials for a variance");
    let mut est = FitnessEstimator::new(confidence, tolerance);
    while est.count() < max_trials {
        est.add(sampler(est.count()));
        if est.is_settled() {
            return Estimate { mean: est.mean(), trials: est.count(), hit_max: false };
        }
    }
    Estimate { mean: est.mean(), trials: est.count(), hit_max: true }
}
