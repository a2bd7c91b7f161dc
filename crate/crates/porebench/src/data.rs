//! Core data model: feature vectors, labels, generation config, datasets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of features per observation.
pub const N_FEATURES: usize = 4;

/// Number of label classes.
pub const N_CLASSES: usize = 4;

/// One synthetic pixel observation.
///
/// `pixel_color` and `neighb_color_grad` are `i64` so that external files
/// with values outside the generated ranges (e.g. a pixel of 260) still
/// parse; the generator itself only emits in-range rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureVector {
    /// Pore cross-section continuity, 0 or 1.
    pub phi_x_sect_contin: u8,
    /// Pixel intensity, generated in [0, 255].
    pub pixel_color: i64,
    /// Neighboring pixel color gradient, generated in [10, 90].
    pub neighb_color_grad: i64,
    /// Between-two-amplifications locality flag, 0 or 1.
    pub betw2_amplify: u8,
}

impl FeatureVector {
    pub fn new(phi: u8, pixel: i64, grad: i64, betw: u8) -> Self {
        Self {
            phi_x_sect_contin: phi,
            pixel_color: pixel,
            neighb_color_grad: grad,
            betw2_amplify: betw,
        }
    }

    /// The features as an f64 array in column order (phi, pixel, grad, betw).
    pub fn as_f64(&self) -> [f64; N_FEATURES] {
        [
            f64::from(self.phi_x_sect_contin),
            self.pixel_color as f64,
            self.neighb_color_grad as f64,
            f64::from(self.betw2_amplify),
        ]
    }

    /// True when every field is inside the generated ranges.
    pub fn in_generated_ranges(&self) -> bool {
        (0..=255).contains(&self.pixel_color)
            && (10..=90).contains(&self.neighb_color_grad)
            && self.phi_x_sect_contin <= 1
            && self.betw2_amplify <= 1
    }
}

/// The four target classes, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Solid,
    Throat,
    Pore,
    #[serde(rename = "NC_Vugs")]
    NcVugs,
}

impl Label {
    /// All labels in canonical order (Solid, Throat, Pore, NC_Vugs).
    pub const ALL: [Label; N_CLASSES] = [Label::Solid, Label::Throat, Label::Pore, Label::NcVugs];

    /// Position in the canonical order.
    pub fn index(self) -> usize {
        match self {
            Label::Solid => 0,
            Label::Throat => 1,
            Label::Pore => 2,
            Label::NcVugs => 3,
        }
    }

    /// Canonical file spelling.
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Solid => "Solid",
            Label::Throat => "Throat",
            Label::Pore => "Pore",
            Label::NcVugs => "NC_Vugs",
        }
    }

    /// Parses a label, accepting the alias spellings that appear in
    /// hand-built sample files ("thraot", "NC-Vugs", "NCVugs", any case).
    pub fn parse(text: &str) -> Result<Label> {
        match text.trim().to_ascii_lowercase().as_str() {
            "solid" => Ok(Label::Solid),
            "throat" | "thraot" => Ok(Label::Throat),
            "pore" => Ok(Label::Pore),
            "nc_vugs" | "nc-vugs" | "ncvugs" => Ok(Label::NcVugs),
            other => Err(Error::Validation(format!("unknown label value {other:?}"))),
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Configuration for the synthetic data generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenConfig {
    /// Master PRNG seed.
    pub seed: u64,
    /// Row count.
    pub n_samples: usize,
    /// Probability that phi_x_sect_contin is 1.
    pub p_phi_one: f64,
    /// Probability that betw2_amplify is 1.
    pub p_betw_one: f64,
    /// Std. dev. of the Gaussian jitter applied to pixel_color at labeling time.
    pub jitter_pixel_sd: f64,
    /// Std. dev. of the Gaussian jitter applied to neighb_color_grad at labeling time.
    pub jitter_grad_sd: f64,
    /// Probability that the rule label is replaced by a uniform other label.
    pub p_flip: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            seed: 3,
            n_samples: 10_000,
            p_phi_one: 0.5,
            p_betw_one: 0.5,
            jitter_pixel_sd: 15.0,
            jitter_grad_sd: 8.0,
            p_flip: 0.02,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::Validation("n_samples must be at least 1".into()));
        }
        for (name, p) in [
            ("p_phi_one", self.p_phi_one),
            ("p_betw_one", self.p_betw_one),
            ("p_flip", self.p_flip),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Validation(format!("{name} must be in [0, 1], got {p}")));
            }
        }
        for (name, sd) in [
            ("jitter_pixel_sd", self.jitter_pixel_sd),
            ("jitter_grad_sd", self.jitter_grad_sd),
        ] {
            if !sd.is_finite() || sd < 0.0 {
                return Err(Error::Validation(format!(
                    "{name} must be a nonnegative real, got {sd}"
                )));
            }
        }
        Ok(())
    }
}

/// Where a dataset's rows came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Generated(GenConfig),
    External,
}

/// One labeled row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Row {
    pub index: usize,
    pub features: FeatureVector,
    pub label: Label,
}

/// An ordered, immutable sequence of labeled rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    rows: Vec<Row>,
    provenance: Provenance,
}

impl Dataset {
    /// Builds a dataset from `(features, label)` pairs, indexing rows 0..n-1.
    pub fn from_rows(pairs: Vec<(FeatureVector, Label)>, provenance: Provenance) -> Self {
        let rows = pairs
            .into_iter()
            .enumerate()
            .map(|(index, (features, label))| Row { index, features, label })
            .collect();
        Self { rows, provenance }
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// New dataset holding the rows at `indices`, reindexed 0..k-1 in the
    /// given order. Provenance is carried over.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let pairs = indices
            .iter()
            .map(|&i| (self.rows[i].features, self.rows[i].label))
            .collect();
        Dataset::from_rows(pairs, self.provenance.clone())
    }

    /// Feature matrix as f64 rows.
    pub fn feature_matrix(&self) -> Vec<[f64; N_FEATURES]> {
        self.rows.iter().map(|r| r.features.as_f64()).collect()
    }

    pub fn labels(&self) -> Vec<Label> {
        self.rows.iter().map(|r| r.label).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_aliases_map_to_canonical() {
        assert_eq!(Label::parse("thraot").unwrap(), Label::Throat);
        assert_eq!(Label::parse("Throat").unwrap(), Label::Throat);
        assert_eq!(Label::parse("NC-Vugs").unwrap(), Label::NcVugs);
        assert_eq!(Label::parse("NCVugs").unwrap(), Label::NcVugs);
        assert_eq!(Label::parse("NC_Vugs").unwrap(), Label::NcVugs);
        assert_eq!(Label::parse("solid").unwrap(), Label::Solid);
        assert!(Label::parse("granite").is_err());
    }

    #[test]
    fn canonical_spellings() {
        let spellings: Vec<&str> = Label::ALL.iter().map(|l| l.as_str()).collect();
        assert_eq!(spellings, ["Solid", "Throat", "Pore", "NC_Vugs"]);
    }

    #[test]
    fn gen_config_rejects_bad_values() {
        let mut cfg = GenConfig::default();
        cfg.n_samples = 0;
        assert!(cfg.validate().is_err());

        let mut cfg = GenConfig::default();
        cfg.p_flip = 1.5;
        assert!(cfg.validate().is_err());

        let mut cfg = GenConfig::default();
        cfg.jitter_grad_sd = -1.0;
        assert!(cfg.validate().is_err());

        assert!(GenConfig::default().validate().is_ok());
    }

    #[test]
    fn subset_reindexes() {
        let pairs = vec![
            (FeatureVector::new(0, 10, 20, 0), Label::Solid),
            (FeatureVector::new(1, 30, 40, 1), Label::Pore),
            (FeatureVector::new(0, 50, 60, 0), Label::Throat),
        ];
        let d = Dataset::from_rows(pairs, Provenance::External);
        let s = d.subset(&[2, 0]);
        assert_eq!(s.len(), 2);
        assert_eq!(s.rows()[0].index, 0);
        assert_eq!(s.rows()[0].label, Label::Throat);
        assert_eq!(s.rows()[1].label, Label::Solid);
    }
}
