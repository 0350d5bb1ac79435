//! The five-section job specification that travels with a profiling job.
//!
//! A flat INI-style text document, deliberately plain so production staff
//! can read and edit it: `[SECTION]` headers, `key = value` lines, `#`
//! comments. Validation checks that the five required sections exist and
//! that each carries its required fields; findings are results, not errors.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// (section header, finding name, required fields)
pub const SECTIONS: [(&str, &str, &[&str]); 5] = [
    ("GENERAL", "general_demands", &["objective", "responsible_party", "process_instructions_ref"]),
    ("TEST_FORM", "test_form_spec", &["form_version", "responsibility"]),
    ("RIP", "rip_spec", &["linearization_date", "resolution", "screening"]),
    (
        "OUTPUT_PROFILE",
        "output_profile_spec",
        &[
            "black_start",
            "black_width",
            "max_black",
            "gcr_strength",
            "ucr_weight",
            "tic_limit",
            "responsibility",
        ],
    ),
    ("PRINTING", "printing_spec", &["stock", "standard_ref", "density_targets"]),
];

#[derive(Debug, Error, PartialEq)]
pub enum JobSpecError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobSection {
    pub name: String,
    /// Entries in document order; unknown keys are kept.
    pub entries: Vec<(String, String)>,
}

impl JobSection {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct JobSpec {
    pub sections: Vec<JobSection>,
}

impl JobSpec {
    pub fn section(&self, name: &str) -> Option<&JobSection> {
        self.sections.iter().find(|s| s.name == name)
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.section(section)?.get(key)
    }

    /// A complete example document, used in tests and as a starting point.
    pub fn example() -> JobSpec {
        let s = |name: &str, entries: &[(&str, &str)]| JobSection {
            name: name.to_string(),
            entries: entries.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
        };
        JobSpec {
            sections: vec![
                s(
                    "GENERAL",
                    &[
                        ("objective", "bring separation settings in house"),
                        ("responsible_party", "prepress lead"),
                        ("process_instructions_ref", "QA-7 rev 3"),
                    ],
                ),
                s("TEST_FORM", &[("form_version", "1"), ("responsibility", "prepress")]),
                s(
                    "RIP",
                    &[
                        ("linearization_date", "2024-03-01"),
                        ("resolution", "2400dpi"),
                        ("screening", "AM 150lpi"),
                    ],
                ),
                s(
                    "OUTPUT_PROFILE",
                    &[
                        ("black_start", "0.25"),
                        ("black_width", "0.75"),
                        ("max_black", "0.95"),
                        ("gcr_strength", "0.6"),
                        ("ucr_weight", "0.2"),
                        ("tic_limit", "3.2"),
                        ("responsibility", "external consultant"),
                    ],
                ),
                s(
                    "PRINTING",
                    &[
                        ("stock", "coated 115gsm"),
                        ("standard_ref", "sheet-fed offset, house standard"),
                        ("density_targets", "C 1.55 M 1.50 Y 1.45 K 1.85"),
                    ],
                ),
            ],
        }
    }
}

pub fn parse_jobspec(text: &str) -> Result<JobSpec, JobSpecError> {
    let mut spec = JobSpec::default();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r').trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            spec.sections.push(JobSection { name: name.trim().to_string(), entries: Vec::new() });
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| JobSpecError::Parse {
            line: n + 1,
            message: format!("expected 'key = value', got '{line}'"),
        })?;
        let section = spec.sections.last_mut().ok_or_else(|| JobSpecError::Parse {
            line: n + 1,
            message: "entry before any [SECTION] header".to_string(),
        })?;
        section.entries.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(spec)
}

pub fn write_jobspec(spec: &JobSpec) -> String {
    let mut out = String::new();
    for (i, section) in spec.sections.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&format!("[{}]\n", section.name));
        for (k, v) in &section.entries {
            out.push_str(&format!("{k} = {v}\n"));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Finding {
    SectionAbsent { section: String },
    MissingField { section: String, field: String },
    EmptyField { section: String, field: String },
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finding::SectionAbsent { section } => write!(f, "{section}: section absent"),
            Finding::MissingField { section, field } => {
                write!(f, "{section}: missing field '{field}'")
            }
            Finding::EmptyField { section, field } => {
                write!(f, "{section}: empty field '{field}'")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidationOutcome {
    pub findings: Vec<Finding>,
}

impl ValidationOutcome {
    pub fn is_valid(&self) -> bool {
        self.findings.is_empty()
    }
}

/// Checks the five required sections and their required fields.
pub fn validate_jobspec(spec: &JobSpec) -> ValidationOutcome {
    let mut findings = Vec::new();
    for (header, finding_name, fields) in SECTIONS {
        match spec.section(header) {
            None => findings.push(Finding::SectionAbsent { section: finding_name.to_string() }),
            Some(section) => {
                for field in fields {
                    match section.get(field) {
                        None => findings.push(Finding::MissingField {
                            section: finding_name.to_string(),
                            field: field.to_string(),
                        }),
                        Some("") => findings.push(Finding::EmptyField {
                            section: finding_name.to_string(),
                            field: field.to_string(),
                        }),
                        Some(_) => {}
                    }
                }
            }
        }
    }
    ValidationOutcome { findings }
}
