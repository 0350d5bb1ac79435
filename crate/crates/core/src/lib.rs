//! Prepress color-management toolkit: scanner-target generation, GCR/UCR
//! separation, gamut evaluation, scanner characterization and the file
//! formats that tie a profiling workflow together.
//!
//! The crate is organized around the workflow:
//!
//! - [`color`] — value types and CIELAB/LCh conversion math (D50).
//! - [`gamut`] — boundary tables, gamut tests and rendering intents.
//! - [`separation`] — RGB to CMYK with black generation and ink limits.
//! - [`chart`] — the 264-patch scanner target.
//! - [`scanner`] — characterization fits from measured targets.
//! - [`form`] — the digital test form and its comparison rendering.
//! - [`cgats`], [`raster`], [`report`], [`jobspec`] — the file surfaces.

pub mod cgats;
pub mod chart;
pub mod color;
pub mod form;
pub mod gamut;
pub mod jobspec;
pub mod raster;
pub mod report;
pub mod scanner;
pub mod separation;

pub use cgats::{MeasurementRow, MeasurementSet};
pub use chart::{build_target, Chart, ChartParams, Patch, PatchRole};
pub use color::{Cmyk, LabColor, LchColor, Rgb8, RgbLinear, WhitePoint, XyzColor};
pub use form::{build_form, render_comparison, ElementKind, FormElement, TestForm};
pub use gamut::{GamutBoundary, IntentKind, IntentMapping};
pub use jobspec::{parse_jobspec, validate_jobspec, write_jobspec, JobSpec};
pub use raster::Raster;
pub use report::{build_report, EvalReport, ReferenceRow, ReportRow};
pub use scanner::{apply_model, fit_scanner, score_model, Basis, ScannerModel, ScannerSample};
pub use separation::{separate, SeparationParams, SeparationResult};
