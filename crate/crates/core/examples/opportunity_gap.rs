//! Program vs university composition at a Hispanic-serving institution,
//! largest deficit first.
//!
//! `cargo run --example opportunity_gap`

use cohortlens::analysis::{gap_report, Population};
use cohortlens::ingest::load_canonical;
use cohortlens::store::IngestOptions;
use cohortlens::table::FieldScope;

fn main() -> cohortlens::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/hsi_2021.csv");
    let ds = load_canonical(path, &IngestOptions::default())?;
    let report = gap_report(
        &ds,
        &Population::institutions(["HSI-CA"]),
        2021,
        &FieldScope::ComputingCip11,
        &FieldScope::AllDegrees,
    )?;
    println!(
        "{:<8} {:<42} {:>8} {:>10} {:>7}",
        "gender", "race", "program", "university", "gap"
    );
    for row in &report.rows {
        println!(
            "{:<8} {:<42} {:>8.1} {:>10.1} {:>+7.1}",
            row.cell.gender, row.cell.race, row.program_share, row.university_share, row.gap
        );
    }
    Ok(())
}
