//! Demographic participation analytics for degree-completion data.
//!
//! Counts of bachelor's degrees by institution, year, field, gender and race
//! are aggregated into [`table::CountTable`]s and examined through four
//! lenses: standard shares, cohort shares, program-versus-university
//! opportunity gaps, and entropy summaries (Shannon evenness and
//! Jensen-Shannon distance).

pub mod analysis;
pub mod api;
pub mod chart;
pub mod cli;
pub mod error;
pub mod ingest;
pub mod metrics;
pub mod report;
pub mod scheme;
pub mod store;
pub mod table;

pub use error::{Error, Result};
