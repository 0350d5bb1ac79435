//! CGATS-style measurement and reference files.
//!
//! Plain text, LF endings: header key/value lines, a
//! `BEGIN_DATA_FORMAT .. END_DATA_FORMAT` block declaring the column names,
//! then `BEGIN_DATA .. END_DATA` rows. `#` lines are comments. Lab columns
//! are required on every row; RGB columns are optional and all-or-nothing.
//! Unknown columns are tolerated and their names preserved in metadata.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::color::{LabColor, Rgb8};

pub const FIELD_SAMPLE_ID: &str = "SAMPLE_ID";
pub const LAB_FIELDS: [&str; 3] = ["LAB_L", "LAB_A", "LAB_B"];
pub const RGB_FIELDS: [&str; 3] = ["RGB_R", "RGB_G", "RGB_B"];

#[derive(Debug, Error, PartialEq)]
pub enum CgatsError {
    #[error("line {line}: missing {marker} marker")]
    MissingMarker { line: usize, marker: &'static str },
    #[error("line {line}: expected {expected} fields, got {got}")]
    FieldCount { line: usize, expected: usize, got: usize },
    #[error("line {line}: duplicate sample id '{id}'")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: non-numeric value '{token}' for field {field}")]
    NonNumeric { line: usize, field: String, token: String },
    #[error("data format is missing required field {0}")]
    MissingField(&'static str),
    #[error("line {line}: {message}")]
    Other { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRow {
    pub id: String,
    pub lab: LabColor,
    pub rgb: Option<Rgb8>,
}

/// A parsed measurement (or reference) file.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MeasurementSet {
    /// Header key/value lines in file order.
    pub header: Vec<(String, String)>,
    /// Declared data fields this parser does not interpret.
    pub extra_fields: Vec<String>,
    pub rows: Vec<MeasurementRow>,
}

impl MeasurementSet {
    pub fn find(&self, id: &str) -> Option<&MeasurementRow> {
        self.rows.iter().find(|r| r.id == id)
    }
}

pub fn parse_measurements(text: &str) -> Result<MeasurementSet, CgatsError> {
    let mut set = MeasurementSet::default();
    let mut lines = text.lines().enumerate().peekable();

    // header section runs until BEGIN_DATA_FORMAT
    let mut format_line = None;
    for (n, raw) in lines.by_ref() {
        let line = raw.trim_end_matches('\r').trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line == "BEGIN_DATA_FORMAT" {
            format_line = Some(n + 1);
            break;
        }
        match line.split_once(char::is_whitespace) {
            Some((key, value)) => set.header.push((key.to_string(), value.trim().to_string())),
            None => set.header.push((line.to_string(), String::new())),
        }
    }
    let format_line = format_line.ok_or(CgatsError::MissingMarker {
        line: text.lines().count(),
        marker: "BEGIN_DATA_FORMAT",
    })?;

    // declared field names
    let mut fields: Vec<String> = Vec::new();
    let mut ended_format = false;
    for (n, raw) in lines.by_ref() {
        let line = raw.trim_end_matches('\r').trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line == "END_DATA_FORMAT" {
            ended_format = true;
            break;
        }
        if line == "BEGIN_DATA" {
            return Err(CgatsError::MissingMarker { line: n + 1, marker: "END_DATA_FORMAT" });
        }
        fields.extend(line.split_whitespace().map(str::to_string));
    }
    if !ended_format {
        return Err(CgatsError::MissingMarker { line: format_line, marker: "END_DATA_FORMAT" });
    }

    let col = |name: &'static str| fields.iter().position(|f| f == name);
    let id_col = col(FIELD_SAMPLE_ID).ok_or(CgatsError::MissingField(FIELD_SAMPLE_ID))?;
    let lab_cols = [
        col("LAB_L").ok_or(CgatsError::MissingField("LAB_L"))?,
        col("LAB_A").ok_or(CgatsError::MissingField("LAB_A"))?,
        col("LAB_B").ok_or(CgatsError::MissingField("LAB_B"))?,
    ];
    let rgb_cols = match (col("RGB_R"), col("RGB_G"), col("RGB_B")) {
        (Some(r), Some(g), Some(b)) => Some([r, g, b]),
        (None, None, None) => None,
        _ => return Err(CgatsError::MissingField("RGB_R RGB_G RGB_B (all three or none)")),
    };
    set.extra_fields = fields
        .iter()
        .filter(|f| {
            f.as_str() != FIELD_SAMPLE_ID
                && !LAB_FIELDS.contains(&f.as_str())
                && !RGB_FIELDS.contains(&f.as_str())
        })
        .cloned()
        .collect();

    // data rows
    let mut in_data = false;
    let mut data_done = false;
    for (n, raw) in lines {
        let line = raw.trim_end_matches('\r').trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !in_data {
            if line == "BEGIN_DATA" {
                in_data = true;
                continue;
            }
            return Err(CgatsError::MissingMarker { line: n + 1, marker: "BEGIN_DATA" });
        }
        if line == "END_DATA" {
            data_done = true;
            continue;
        }
        if data_done {
            return Err(CgatsError::Other {
                line: n + 1,
                message: "content after END_DATA".to_string(),
            });
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != fields.len() {
            return Err(CgatsError::FieldCount {
                line: n + 1,
                expected: fields.len(),
                got: tokens.len(),
            });
        }
        let id = tokens[id_col].to_string();
        if set.rows.iter().any(|r| r.id == id) {
            return Err(CgatsError::DuplicateId { line: n + 1, id });
        }
        let num = |ci: usize| -> Result<f64, CgatsError> {
            tokens[ci].parse().map_err(|_| CgatsError::NonNumeric {
                line: n + 1,
                field: fields[ci].clone(),
                token: tokens[ci].to_string(),
            })
        };
        let lab = LabColor::new(num(lab_cols[0])?, num(lab_cols[1])?, num(lab_cols[2])?);
        let rgb = match rgb_cols {
            Some([r, g, b]) => {
                let chan = |ci: usize| -> Result<u8, CgatsError> {
                    let v = num(ci)?;
                    Ok(v.round().clamp(0.0, 255.0) as u8)
                };
                Some(Rgb8::new(chan(r)?, chan(g)?, chan(b)?))
            }
            None => None,
        };
        set.rows.push(MeasurementRow { id, lab, rgb });
    }
    if !in_data {
        return Err(CgatsError::MissingMarker {
            line: text.lines().count(),
            marker: "BEGIN_DATA",
        });
    }
    if !data_done {
        return Err(CgatsError::MissingMarker {
            line: text.lines().count(),
            marker: "END_DATA",
        });
    }
    Ok(set)
}

/// Writes a set back out. RGB columns are included only when every row
/// carries them, so `parse(write(set)) == set` for anything a parse
/// produced.
pub fn write_measurements(set: &MeasurementSet) -> String {
    let with_rgb = !set.rows.is_empty() && set.rows.iter().all(|r| r.rgb.is_some());
    let mut out = String::new();
    for (k, v) in &set.header {
        if v.is_empty() {
            out.push_str(k);
        } else {
            out.push_str(&format!("{k} {v}"));
        }
        out.push('\n');
    }
    out.push_str("BEGIN_DATA_FORMAT\n");
    let mut cols = vec![FIELD_SAMPLE_ID.to_string()];
    cols.extend(LAB_FIELDS.iter().map(|s| s.to_string()));
    if with_rgb {
        cols.extend(RGB_FIELDS.iter().map(|s| s.to_string()));
    }
    out.push_str(&cols.join(" "));
    out.push_str("\nEND_DATA_FORMAT\nBEGIN_DATA\n");
    for row in &set.rows {
        out.push_str(&format!("{} {} {} {}", row.id, row.lab.l, row.lab.a, row.lab.b));
        if with_rgb {
            let rgb = row.rgb.expect("checked above");
            out.push_str(&format!(" {} {} {}", rgb.r, rgb.g, rgb.b));
        }
        out.push('\n');
    }
    out.push_str("END_DATA\n");
    out
}

/// A reference document for a patch list: id plus Lab per row. `date` is
/// a free-form string recorded verbatim; empty means no CREATED line.
pub fn write_reference<'a, I>(title: &str, date: &str, rows: I) -> String
where
    I: IntoIterator<Item = (&'a str, LabColor)>,
{
    let rows: Vec<(&str, LabColor)> = rows.into_iter().collect();
    let mut header = vec![
        ("ORIGINATOR".to_string(), "\"pressform\"".to_string()),
        ("DESCRIPTOR".to_string(), format!("\"{title}\"")),
    ];
    if !date.is_empty() {
        header.push(("CREATED".to_string(), format!("\"{date}\"")));
    }
    header.push(("NUMBER_OF_SETS".to_string(), rows.len().to_string()));
    let mut set = MeasurementSet { header, extra_fields: Vec::new(), rows: Vec::new() };
    for (id, lab) in rows {
        set.rows.push(MeasurementRow { id: id.to_string(), lab, rgb: None });
    }
    write_measurements(&set)
}
