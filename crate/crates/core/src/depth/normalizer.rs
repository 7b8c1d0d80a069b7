use super::DepthError;
use crate::signal::CHANNELS;
use serde::{Deserialize, Serialize};

/// Per-channel standardization of filtered whisker signals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub mu: [f64; CHANNELS],
    pub sigma: [f64; CHANNELS],
}

impl Default for Normalizer {
    fn default() -> Self {
        Self::identity()
    }
}

impl Normalizer {
    pub fn new(mu: [f64; CHANNELS], sigma: [f64; CHANNELS]) -> Result<Self, DepthError> {
        if let Some(i) = sigma.iter().position(|s| !(*s > 0.0 && s.is_finite())) {
            return Err(DepthError::ZeroSigma(i));
        }
        Ok(Self { mu, sigma })
    }

    pub fn identity() -> Self {
        Self {
            mu: [0.0; CHANNELS],
            sigma: [1.0; CHANNELS],
        }
    }

    /// Mean and population standard deviation of each channel.
    pub fn fit(samples: &[[f64; CHANNELS]]) -> Result<Self, DepthError> {
        if samples.is_empty() {
            return Err(DepthError::EmptyDataset);
        }
        let n = samples.len() as f64;
        let mut mu = [0.0; CHANNELS];
        let mut sigma = [0.0; CHANNELS];
        for c in 0..CHANNELS {
            mu[c] = samples.iter().map(|s| s[c]).sum::<f64>() / n;
            let var = samples.iter().map(|s| (s[c] - mu[c]).powi(2)).sum::<f64>() / n;
            sigma[c] = var.sqrt();
        }
        Self::new(mu, sigma)
    }

    pub fn normalize(&self, s_p: &[f64; CHANNELS]) -> [f64; CHANNELS] {
        std::array::from_fn(|c| (s_p[c] - self.mu[c]) / self.sigma[c])
    }

    pub fn denormalize(&self, s_n: &[f64; CHANNELS]) -> [f64; CHANNELS] {
        std::array::from_fn(|c| s_n[c] * self.sigma[c] + self.mu[c])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn mean_maps_to_zero_and_sigma_to_one() {
        let n = Normalizer::new([1.0, -2.0, 5.0], [2.0, 0.5, 10.0]).unwrap();
        assert_eq!(n.normalize(&[1.0, -2.0, 5.0]), [0.0; 3]);
        assert_eq!(n.normalize(&[3.0, -1.5, 15.0]), [1.0; 3]);
    }

    #[test]
    fn zero_sigma_rejected() {
        assert_eq!(
            Normalizer::new([0.0; 3], [1.0, 0.0, 1.0]),
            Err(DepthError::ZeroSigma(1))
        );
        assert_eq!(
            Normalizer::fit(&[[1.0, 2.0, 3.0], [1.0, 5.0, 3.0]]),
            Err(DepthError::ZeroSigma(0))
        );
    }

    proptest! {
        #[test]
        fn round_trip(v in proptest::array::uniform3(-1e3..1e3f64),
                      mu in proptest::array::uniform3(-1e2..1e2f64),
                      sigma in proptest::array::uniform3(1e-2..1e2f64)) {
            let n = Normalizer::new(mu, sigma).unwrap();
            let back = n.denormalize(&n.normalize(&v));
            for c in 0..3 {
                prop_assert!((back[c] - v[c]).abs() < 1e-12 * (1.0 + v[c].abs()));
            }
        }

        #[test]
        fn identity_is_idempotent(v in proptest::array::uniform3(-1e3..1e3f64)) {
            let n = Normalizer::identity();
            prop_assert_eq!(n.normalize(&n.normalize(&v)), v);
        }
    }
}
