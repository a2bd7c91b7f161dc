//! Synthetic heterogeneous dataset generation.
//!
//! Rows are drawn from a single splitmix64 chain seeded by the config. Each
//! row consumes a fixed, documented number of draws, so a dataset is a pure
//! function of its [`GenConfig`]:
//!
//! * [`sample_features`] - 4 draws, in order: phi, pixel, grad, betw.
//! * [`apply_label_noise`] - 2 draws for the jitter normals (Box-Muller,
//!   always consumed, even at zero jitter), 1 draw for the flip decision,
//!   and 1 more draw to pick the replacement label when a flip fires.
//!
//! Labels come from a deterministic rule set evaluated on a jittered copy of
//! the features; the stored features are never jittered. Class overlap is
//! controlled entirely by the jitter standard deviations and the flip
//! probability.

use crate::data::{Dataset, FeatureVector, GenConfig, Label, Provenance};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// Pixel threshold separating NC_Vugs from Solid when the cross-section is
/// closed. Any value in (138, 155] reproduces the reference sample; 150 is
/// the round choice inside that window.
pub const PIXEL_SOLID_THRESHOLD: f64 = 150.0;

/// Gradient threshold separating Pore from Solid when the cross-section is
/// open and the row is not between two amplifications. Any value in
/// (66, 84] reproduces the reference sample; 80 is the round choice.
pub const GRAD_PORE_THRESHOLD: f64 = 80.0;

/// The deterministic expert rule on real-valued pixel/grad inputs.
///
/// Total over all inputs, including pixel values beyond 255.
fn rule(phi: u8, pixel: f64, grad: f64, betw: u8) -> Label {
    if phi == 0 {
        if pixel < PIXEL_SOLID_THRESHOLD {
            Label::NcVugs
        } else {
            Label::Solid
        }
    } else if betw == 1 {
        Label::Throat
    } else if grad >= GRAD_PORE_THRESHOLD {
        Label::Pore
    } else {
        Label::Solid
    }
}

/// Labels a feature vector with the expert rule set.
pub fn label_rule(f: &FeatureVector) -> Label {
    rule(
        f.phi_x_sect_contin,
        f.pixel_color as f64,
        f.neighb_color_grad as f64,
        f.betw2_amplify,
    )
}

/// Draws one feature vector. Consumes exactly 4 draws in the order
/// phi, pixel, grad, betw.
pub fn sample_features(rng: &mut SplitMix64, config: &GenConfig) -> FeatureVector {
    let phi = rng.bernoulli(config.p_phi_one);
    let pixel = rng.uniform_int(0, 255);
    let grad = rng.uniform_int(10, 90);
    let betw = rng.bernoulli(config.p_betw_one);
    FeatureVector::new(phi, pixel, grad, betw)
}

/// Labels a row under the configured noise model.
///
/// The rule is evaluated on a jittered copy of the continuous features
/// (binary fields are never jittered); with probability `p_flip` the result
/// is replaced by a uniform draw over the other three labels.
pub fn apply_label_noise(rng: &mut SplitMix64, f: &FeatureVector, config: &GenConfig) -> Label {
    let (z_pixel, z_grad) = rng.normal_pair();
    let jittered_pixel = f.pixel_color as f64 + z_pixel * config.jitter_pixel_sd;
    let jittered_grad = f.neighb_color_grad as f64 + z_grad * config.jitter_grad_sd;
    let base = rule(f.phi_x_sect_contin, jittered_pixel, jittered_grad, f.betw2_amplify);
    if rng.next_f64() < config.p_flip {
        let others: Vec<Label> = Label::ALL.iter().copied().filter(|&l| l != base).collect();
        others[rng.uniform_int(0, 2) as usize]
    } else {
        base
    }
}

/// Generates `config.n_samples` rows from a single PRNG chain seeded with
/// `config.seed`.
pub fn generate_dataset(config: &GenConfig) -> Result<Dataset> {
    config.validate()?;
    if config.n_samples == 0 {
        return Err(Error::Validation("n_samples must be at least 1".into()));
    }
    let mut rng = SplitMix64::new(config.seed);
    let mut pairs = Vec::with_capacity(config.n_samples);
    for _ in 0..config.n_samples {
        let features = sample_features(&mut rng, config);
        let label = apply_label_noise(&mut rng, &features, config);
        pairs.push((features, label));
    }
    Ok(Dataset::from_rows(pairs, Provenance::Generated(config.clone())))
}

/// The 20-row hand-labeled reference sample.
///
/// Tuples are (phi, pixel, grad, betw, label). Row 16 carries a pixel value
/// of 260, above the generated range; the rule set is total there too.
pub const REFERENCE_SAMPLE: [(u8, i64, i64, u8, Label); 20] = [
    (0, 251, 64, 0, Label::Solid),
    (1, 78, 19, 1, Label::Throat),
    (0, 138, 29, 0, Label::NcVugs),
    (0, 133, 35, 1, Label::NcVugs),
    (1, 185, 45, 0, Label::Solid),
    (1, 96, 84, 0, Label::Pore),
    (0, 238, 43, 1, Label::Solid),
    (0, 155, 51, 1, Label::Solid),
    (0, 213, 67, 1, Label::Solid),
    (1, 185, 67, 1, Label::Throat),
    (0, 65, 81, 0, Label::NcVugs),
    (0, 129, 30, 0, Label::NcVugs),
    (1, 176, 66, 0, Label::Solid),
    (0, 10, 47, 0, Label::NcVugs),
    (0, 137, 45, 1, Label::NcVugs),
    (0, 85, 12, 0, Label::NcVugs),
    (0, 260, 26, 1, Label::Solid),
    (1, 155, 22, 0, Label::Solid),
    (1, 206, 53, 0, Label::Solid),
    (1, 187, 51, 1, Label::Throat),
];

/// The reference sample as a dataset.
pub fn reference_dataset() -> Dataset {
    let pairs = REFERENCE_SAMPLE
        .iter()
        .map(|&(phi, pixel, grad, betw, label)| (FeatureVector::new(phi, pixel, grad, betw), label))
        .collect();
    Dataset::from_rows(pairs, Provenance::External)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_reproduces_all_reference_rows() {
        for (i, &(phi, pixel, grad, betw, expected)) in REFERENCE_SAMPLE.iter().enumerate() {
            let f = FeatureVector::new(phi, pixel, grad, betw);
            assert_eq!(label_rule(&f), expected, "reference row {i}");
        }
    }

    // Every threshold inside the stated windows matches the reference
    // sample, and the chosen constants sit inside those windows.
    #[test]
    fn threshold_windows_are_consistent() {
        assert!(PIXEL_SOLID_THRESHOLD > 138.0 && PIXEL_SOLID_THRESHOLD <= 155.0);
        assert!(GRAD_PORE_THRESHOLD > 66.0 && GRAD_PORE_THRESHOLD <= 84.0);
        for t_pixel in [139.0, 145.0, 155.0] {
            for t_grad in [67.0, 75.0, 84.0] {
                for &(phi, pixel, grad, betw, expected) in REFERENCE_SAMPLE.iter() {
                    let got = if phi == 0 {
                        if (pixel as f64) < t_pixel { Label::NcVugs } else { Label::Solid }
                    } else if betw == 1 {
                        Label::Throat
                    } else if grad as f64 >= t_grad {
                        Label::Pore
                    } else {
                        Label::Solid
                    };
                    assert_eq!(got, expected, "window ({t_pixel}, {t_grad})");
                }
            }
        }
    }

    // Golden row frozen from an independent reference evaluation of the
    // documented draw chain.
    #[test]
    fn first_row_at_seed_3_matches_reference_evaluation() {
        let cfg = GenConfig::default();
        let mut rng = SplitMix64::new(3);
        let f = sample_features(&mut rng, &cfg);
        assert_eq!(f, FeatureVector::new(1, 179, 59, 1));

        let data = generate_dataset(&cfg).unwrap();
        let row0 = data.rows()[0];
        assert_eq!(row0.features, FeatureVector::new(1, 179, 59, 1));
        assert_eq!(row0.label, Label::Throat);
    }

    #[test]
    fn sample_features_is_deterministic() {
        let cfg = GenConfig::default();
        let mut a = SplitMix64::new(17);
        let mut b = SplitMix64::new(17);
        for _ in 0..100 {
            assert_eq!(sample_features(&mut a, &cfg), sample_features(&mut b, &cfg));
        }
    }

    #[test]
    fn zero_noise_labels_equal_rule_labels() {
        let cfg = GenConfig {
            seed: 3,
            n_samples: 500,
            jitter_pixel_sd: 0.0,
            jitter_grad_sd: 0.0,
            p_flip: 0.0,
            ..GenConfig::default()
        };
        let data = generate_dataset(&cfg).unwrap();
        for row in data.rows() {
            assert_eq!(row.label, label_rule(&row.features), "row {}", row.index);
        }
    }

    #[test]
    fn forced_flip_always_changes_the_label() {
        let cfg = GenConfig {
            seed: 11,
            n_samples: 2_000,
            jitter_pixel_sd: 0.0,
            jitter_grad_sd: 0.0,
            p_flip: 1.0,
            ..GenConfig::default()
        };
        let data = generate_dataset(&cfg).unwrap();
        for row in data.rows() {
            assert_ne!(row.label, label_rule(&row.features), "row {}", row.index);
        }
    }

    #[test]
    fn flip_rate_within_three_sigma() {
        let cfg = GenConfig {
            seed: 7,
            n_samples: 100_000,
            jitter_pixel_sd: 0.0,
            jitter_grad_sd: 0.0,
            p_flip: 0.02,
            ..GenConfig::default()
        };
        let data = generate_dataset(&cfg).unwrap();
        let flipped = data
            .rows()
            .iter()
            .filter(|r| r.label != label_rule(&r.features))
            .count();
        let rate = flipped as f64 / cfg.n_samples as f64;
        let sigma = (0.02 * 0.98 / cfg.n_samples as f64).sqrt();
        assert!(
            (rate - 0.02).abs() <= 3.0 * sigma,
            "flip rate {rate} outside 0.02 +/- {}",
            3.0 * sigma
        );
    }

    #[test]
    fn default_config_produces_every_class() {
        let data = generate_dataset(&GenConfig::default()).unwrap();
        let mut counts = [0usize; 4];
        for row in data.rows() {
            counts[row.label.index()] += 1;
        }
        for (label, &count) in Label::ALL.iter().zip(counts.iter()) {
            let freq = count as f64 / data.len() as f64;
            assert!(freq >= 0.02, "{label} relative frequency {freq} below 0.02");
        }
    }

    #[test]
    fn generation_is_pure_in_the_config() {
        let cfg = GenConfig { n_samples: 1_000, ..GenConfig::default() };
        assert_eq!(generate_dataset(&cfg).unwrap(), generate_dataset(&cfg).unwrap());
    }

    #[test]
    fn zero_rows_rejected() {
        let cfg = GenConfig { n_samples: 0, ..GenConfig::default() };
        assert!(generate_dataset(&cfg).is_err());
    }
}
