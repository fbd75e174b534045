//! Race evenness of one institution over a decade, plus a one-year
//! gender/race/intersectional comparison across all institutions.
//!
//! `cargo run --example evenness`

use cohortlens::analysis::{evenness_comparison, evenness_series};
use cohortlens::ingest::load_canonical;
use cohortlens::scheme::Axis;
use cohortlens::store::IngestOptions;
use cohortlens::table::{AwardLevel, FieldScope, YearRange};

fn main() -> cohortlens::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/north_carolina.csv");
    let ds = load_canonical(path, &IngestOptions::default())?;
    let bachelors = Some(AwardLevel::Bachelors);

    let years = YearRange::new(2010, 2019)?;
    let series = evenness_series(
        &ds,
        "Univ-11",
        Axis::Race,
        &FieldScope::ComputingCip11,
        years,
        bachelors,
    )?;
    println!("Univ-11 race evenness (k = {}):", series.k);
    for p in &series.points {
        println!("  {} {:5.1}%", p.year, p.value);
    }

    let ids: Vec<String> = ds.institution_ids().map(String::from).collect();
    let cmp = evenness_comparison(&ds, &ids, 2020, &FieldScope::AllDegrees, bachelors)?;
    println!("\n{:<10} {:>7} {:>7} {:>7}", "2020", "gender", "race", "inter");
    for r in &cmp.rows {
        println!(
            "{:<10} {:>7.1} {:>7.1} {:>7.1}",
            r.institution_id, r.gender, r.race, r.intersectional
        );
    }
    Ok(())
}
