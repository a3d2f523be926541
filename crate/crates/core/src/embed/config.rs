use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::EmbedError;
use crate::util::hex;

/// SGNS hyperparameters. Defaults are the tuned community-embedding values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub dim: usize,
    pub negative: usize,
    /// Downsampling threshold; 0 disables downsampling.
    pub sample: f64,
    pub alpha: f64,
    /// Final learning rate; `None` means `1e-4 * alpha`.
    pub min_alpha: Option<f64>,
    pub shuffled: bool,
    pub epochs: usize,
    pub seed: u64,
    pub workers: usize,
    /// Keep the user (context) vectors in the trained embedding.
    pub keep_context: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 150,
            negative: 35,
            sample: 0.0043,
            alpha: 0.18,
            min_alpha: None,
            shuffled: true,
            epochs: 1,
            seed: 1,
            workers: 1,
            keep_context: false,
        }
    }
}

impl TrainConfig {
    pub fn min_alpha(&self) -> f64 {
        self.min_alpha.unwrap_or(1e-4 * self.alpha)
    }

    /// Every violated constraint, not just the first.
    pub fn issues(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.dim == 0 {
            out.push("dim must be at least 1".to_string());
        }
        if self.negative == 0 {
            out.push("negative must be at least 1".to_string());
        }
        if !(0.0..=1.0).contains(&self.sample) {
            out.push(format!("sample must lie in [0, 1], got {}", self.sample));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            out.push(format!("alpha must be positive, got {}", self.alpha));
        }
        let min = self.min_alpha();
        if !(min >= 0.0 && min < self.alpha) {
            out.push(format!(
                "min_alpha must satisfy 0 <= min_alpha < alpha, got {min}"
            ));
        }
        if self.epochs == 0 {
            out.push("epochs must be at least 1".to_string());
        }
        if self.workers == 0 {
            out.push("workers must be at least 1".to_string());
        }
        out
    }

    pub fn validate(&self) -> Result<(), EmbedError> {
        let issues = self.issues();
        if issues.is_empty() {
            Ok(())
        } else {
            Err(EmbedError::InvalidConfig(issues))
        }
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex(&Sha256::digest(json))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = TrainConfig::default();
        assert!(c.validate().is_ok());
        assert_eq!(
            (c.dim, c.negative, c.sample, c.alpha, c.shuffled),
            (150, 35, 0.0043, 0.18, true)
        );
        assert!((c.min_alpha() - 0.000018).abs() < 1e-15);
    }

    #[test]
    fn zero_negative_is_rejected() {
        let c = TrainConfig {
            negative: 0,
            ..Default::default()
        };
        assert!(matches!(c.validate(), Err(EmbedError::InvalidConfig(v)) if v.len() == 1));
    }

    #[test]
    fn all_issues_are_listed() {
        let c = TrainConfig {
            dim: 0,
            negative: 0,
            sample: 2.0,
            min_alpha: Some(1.0),
            ..Default::default()
        };
        assert_eq!(c.issues().len(), 4);
    }
}
