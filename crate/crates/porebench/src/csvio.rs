//! Dataset CSV reading and writing.
//!
//! Output is canonical: the exact header below, comma separators, LF line
//! endings, integer binary columns, and canonical label spellings. Input is
//! tolerant: tab- or comma-separated, the "Lable" header and "thraot" /
//! "NC-Vugs" / "NCVugs" label spellings are accepted, the label column may
//! be missing, and out-of-range feature values parse with a warning. This
//! lets hand-transcribed sample tables load verbatim.

use crate::data::{Dataset, FeatureVector, Label, Provenance};
use crate::error::{Error, Result};

/// Canonical output header.
pub const HEADER: &str = "Index,PhiXSectContin,PixelColor,NeighbColorGrad,Betw2Amplify,Label";

/// Serializes a dataset in the canonical form.
pub fn write_dataset(data: &Dataset) -> String {
    let mut out = String::with_capacity(32 * (data.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for row in data.rows() {
        let f = &row.features;
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.index,
            f.phi_x_sect_contin,
            f.pixel_color,
            f.neighb_color_grad,
            f.betw2_amplify,
            row.label
        ));
    }
    out
}

/// A parsed file: rows (labels optional) plus any range warnings.
#[derive(Debug)]
pub struct ParsedCsv {
    pub rows: Vec<(FeatureVector, Option<Label>)>,
    pub warnings: Vec<String>,
}

impl ParsedCsv {
    /// Converts into a dataset, requiring a label on every row.
    pub fn into_labeled(self) -> Result<Dataset> {
        let mut pairs = Vec::with_capacity(self.rows.len());
        for (i, (features, label)) in self.rows.into_iter().enumerate() {
            let Some(label) = label else {
                return Err(Error::Parse {
                    line: i + 2,
                    message: "row has no label value".into(),
                });
            };
            pairs.push((features, label));
        }
        Ok(Dataset::from_rows(pairs, Provenance::External))
    }
}

#[derive(Clone, Copy)]
struct ColumnMap {
    phi: usize,
    pixel: usize,
    grad: usize,
    betw: usize,
    label: Option<usize>,
}

fn map_header(fields: &[&str]) -> Result<ColumnMap> {
    let mut phi = None;
    let mut pixel = None;
    let mut grad = None;
    let mut betw = None;
    let mut label = None;
    let assign = |slot: &mut Option<usize>, name: &str, pos: usize| -> Result<()> {
        if slot.replace(pos).is_some() {
            return Err(Error::Parse { line: 1, message: format!("duplicate column {name:?}") });
        }
        Ok(())
    };
    for (pos, raw) in fields.iter().enumerate() {
        let name = raw.trim();
        match name.to_ascii_lowercase().as_str() {
            // An unnamed leading column is the index, as in pasted tables.
            "index" => {}
            "" if pos == 0 => {}
            "phixsectcontin" => assign(&mut phi, name, pos)?,
            "pixelcolor" => assign(&mut pixel, name, pos)?,
            "neighbcolorgrad" => assign(&mut grad, name, pos)?,
            "betw2amplify" => assign(&mut betw, name, pos)?,
            "label" | "lable" => assign(&mut label, name, pos)?,
            _ => {
                return Err(Error::Parse {
                    line: 1,
                    message: format!("unknown column {name:?}"),
                })
            }
        }
    }
    let need = |slot: Option<usize>, name: &str| {
        slot.ok_or_else(|| Error::Parse { line: 1, message: format!("missing column {name}") })
    };
    Ok(ColumnMap {
        phi: need(phi, "PhiXSectContin")?,
        pixel: need(pixel, "PixelColor")?,
        grad: need(grad, "NeighbColorGrad")?,
        betw: need(betw, "Betw2Amplify")?,
        label,
    })
}

fn parse_int(field: &str, name: &str, line: usize) -> Result<i64> {
    let t = field.trim();
    // Binary columns sometimes carry a decimal point ("0.00", "1.0").
    if let Ok(v) = t.parse::<i64>() {
        return Ok(v);
    }
    if let Ok(v) = t.parse::<f64>() {
        if v.fract() == 0.0 && v.abs() < 9e15 {
            return Ok(v as i64);
        }
    }
    Err(Error::Parse { line, message: format!("{name} value {t:?} is not an integer") })
}

fn parse_binary(field: &str, name: &str, line: usize) -> Result<u8> {
    match parse_int(field, name, line)? {
        0 => Ok(0),
        1 => Ok(1),
        other => Err(Error::Parse {
            line,
            message: format!("{name} must be 0 or 1, got {other}"),
        }),
    }
}

/// Parses dataset text (comma- or tab-separated, sniffed from the header
/// line). Errors carry 1-based line numbers; out-of-range pixel or
/// gradient values are accepted and reported in `warnings`.
pub fn parse_dataset(text: &str) -> Result<ParsedCsv> {
    let first_line = text.lines().next().unwrap_or("");
    let delimiter = if first_line.contains('\t') { b'\t' } else { b',' };
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .flexible(true)
        .from_reader(text.as_bytes());

    let header = reader
        .headers()
        .map_err(|e| Error::Parse { line: 1, message: e.to_string() })?
        .clone();
    let fields: Vec<&str> = header.iter().collect();
    let columns = map_header(&fields)?;

    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record
            .position()
            .map(|p| p.line() as usize)
            .unwrap_or(rows.len() + 2);
        let get = |pos: usize, name: &str| -> Result<&str> {
            record.get(pos).ok_or_else(|| Error::Parse {
                line,
                message: format!("missing {name} field"),
            })
        };
        let phi = parse_binary(get(columns.phi, "PhiXSectContin")?, "PhiXSectContin", line)?;
        let pixel = parse_int(get(columns.pixel, "PixelColor")?, "PixelColor", line)?;
        let grad = parse_int(get(columns.grad, "NeighbColorGrad")?, "NeighbColorGrad", line)?;
        let betw = parse_binary(get(columns.betw, "Betw2Amplify")?, "Betw2Amplify", line)?;
        let features = FeatureVector::new(phi, pixel, grad, betw);
        if !(0..=255).contains(&pixel) {
            warnings.push(format!("line {line}: PixelColor {pixel} outside [0, 255]"));
        }
        if !(10..=90).contains(&grad) {
            warnings.push(format!("line {line}: NeighbColorGrad {grad} outside [10, 90]"));
        }
        let label = match columns.label {
            Some(pos) => match record.get(pos) {
                Some(text) if !text.trim().is_empty() => Some(
                    Label::parse(text)
                        .map_err(|e| Error::Parse { line, message: e.to_string() })?,
                ),
                _ => None,
            },
            None => None,
        };
        rows.push((features, label));
    }
    if rows.is_empty() {
        return Err(Error::Parse { line: 2, message: "no data rows".into() });
    }
    Ok(ParsedCsv { rows, warnings })
}

/// Rewrites every label with the expert rule, keeping the features.
/// Returns the canonical CSV text and any parse warnings.
pub fn relabel(text: &str) -> Result<(String, Vec<String>)> {
    let parsed = parse_dataset(text)?;
    let warnings = parsed.warnings;
    let pairs = parsed
        .rows
        .into_iter()
        .map(|(features, _)| {
            let label = crate::datagen::label_rule(&features);
            (features, label)
        })
        .collect();
    let data = Dataset::from_rows(pairs, Provenance::External);
    Ok((write_dataset(&data), warnings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::GenConfig;
    use crate::datagen::{generate_dataset, REFERENCE_SAMPLE};

    #[test]
    fn round_trip_is_field_exact() {
        for seed in [0u64, 3, 99] {
            let data = generate_dataset(&GenConfig {
                seed,
                n_samples: 200,
                ..GenConfig::default()
            })
            .unwrap();
            let text = write_dataset(&data);
            let back = parse_dataset(&text).unwrap();
            assert!(back.warnings.is_empty());
            let labeled = back.into_labeled().unwrap();
            assert_eq!(labeled.rows().len(), data.rows().len());
            for (a, b) in labeled.rows().iter().zip(data.rows()) {
                assert_eq!(a.index, b.index);
                assert_eq!(a.features, b.features);
                assert_eq!(a.label, b.label);
            }
        }
    }

    #[test]
    fn header_is_canonical() {
        let data = generate_dataset(&GenConfig { n_samples: 1, ..GenConfig::default() }).unwrap();
        let text = write_dataset(&data);
        assert!(text.starts_with("Index,PhiXSectContin,PixelColor,NeighbColorGrad,Betw2Amplify,Label\n"));
        assert!(!text.contains('\r'));
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn accepts_tab_separated_pasted_table_with_alias_spellings() {
        let mut text = String::from("\tPhiXSectContin\tPixelColor\tNeighbColorGrad\tBetw2Amplify\tLable\n");
        for (i, &(phi, pixel, grad, betw, label)) in REFERENCE_SAMPLE.iter().enumerate() {
            let spelled = match label {
                Label::Throat => "thraot".to_string(),
                other => other.to_string(),
            };
            text.push_str(&format!("{i}\t{phi}\t{pixel}\t{grad}\t{betw}\t{spelled}\n"));
        }
        let parsed = parse_dataset(&text).unwrap();
        // Row 16 carries the out-of-range pixel 260.
        assert_eq!(parsed.warnings.len(), 1);
        assert!(parsed.warnings[0].contains("260"));
        let labeled = parsed.into_labeled().unwrap();
        for (row, &(_, _, _, _, expected)) in labeled.rows().iter().zip(REFERENCE_SAMPLE.iter()) {
            assert_eq!(row.label, expected);
        }
        // Re-emission is canonical.
        let out = write_dataset(&labeled);
        assert!(out.contains("Throat"));
        assert!(!out.contains("thraot"));
        assert!(out.contains("NC_Vugs"));
    }

    #[test]
    fn malformed_rows_name_their_line() {
        let text = "Index,PhiXSectContin,PixelColor,NeighbColorGrad,Betw2Amplify,Label\n\
                    0,0,100,50,0,Solid\n\
                    1,2,100,50,0,Solid\n";
        let err = parse_dataset(text).unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");

        let text = "Index,PhiXSectContin,PixelColor,NeighbColorGrad,Betw2Amplify,Label\n\
                    0,0,acorn,50,0,Solid\n";
        let err = parse_dataset(text).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn unknown_label_spelling_is_an_error() {
        let text = "Index,PhiXSectContin,PixelColor,NeighbColorGrad,Betw2Amplify,Label\n\
                    0,0,100,50,0,Basalt\n";
        assert!(parse_dataset(text).is_err());
    }

    #[test]
    fn unknown_column_is_an_error() {
        let text = "Index,PhiXSectContin,PixelColor,NeighbColorGrad,Betw2Amplify,Porosity\n\
                    0,0,100,50,0,0.3\n";
        let err = parse_dataset(text).unwrap_err();
        assert!(err.to_string().contains("Porosity"), "{err}");
    }

    #[test]
    fn empty_data_section_is_an_error() {
        let text = "Index,PhiXSectContin,PixelColor,NeighbColorGrad,Betw2Amplify,Label\n";
        assert!(parse_dataset(text).is_err());
    }

    #[test]
    fn missing_label_column_parses_for_relabeling() {
        let text = "Index,PhiXSectContin,PixelColor,NeighbColorGrad,Betw2Amplify\n\
                    0,0,251,64,0\n\
                    1,1,78,19,1\n";
        let (out, warnings) = relabel(text).unwrap();
        assert!(warnings.is_empty());
        assert!(out.contains("0,0,251,64,0,Solid"));
        assert!(out.contains("1,1,78,19,1,Throat"));
    }

    #[test]
    fn relabel_reproduces_reference_labels() {
        let data = crate::datagen::reference_dataset();
        let (out, warnings) = relabel(&write_dataset(&data)).unwrap();
        assert_eq!(warnings.len(), 1);
        let back = parse_dataset(&out).unwrap().into_labeled().unwrap();
        for (row, &(_, _, _, _, expected)) in back.rows().iter().zip(REFERENCE_SAMPLE.iter()) {
            assert_eq!(row.label, expected, "row {}", row.index);
        }
    }
}
