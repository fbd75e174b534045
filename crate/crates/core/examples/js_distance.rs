//! Ranks institutions by how far their computing graduates' intersectional
//! mix sits from their own all-degrees mix, then breaks down the top one.
//!
//! `cargo run --example js_distance`

use cohortlens::analysis::{distribution_pair, js_distance_report};
use cohortlens::ingest::load_canonical;
use cohortlens::store::IngestOptions;
use cohortlens::table::{AwardLevel, FieldScope};

fn main() -> cohortlens::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/north_carolina.csv");
    let ds = load_canonical(path, &IngestOptions::default())?;
    let ids: Vec<String> = ds.institution_ids().map(String::from).collect();
    let (program, reference) = (FieldScope::ComputingCip11, FieldScope::AllDegrees);
    let bachelors = Some(AwardLevel::Bachelors);

    let ranking = js_distance_report(&ds, &ids, 2020, &program, &reference, bachelors)?;
    for row in &ranking.rows {
        println!("{:<8} {:.4}", row.institution_id, row.distance);
    }

    let top = &ranking.rows[0].institution_id;
    let pair = distribution_pair(&ds, top, 2020, &program, &reference, bachelors)?;
    println!("\n{top}: distance {:.4}", pair.distance);
    println!("{}", cohortlens::report::Report::Distributions(pair).to_csv()?);
    Ok(())
}
