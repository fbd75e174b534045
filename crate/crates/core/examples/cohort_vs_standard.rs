//! Standard share vs cohort share for the same groups at two institutions.
//!
//! `cargo run --example cohort_vs_standard`

use cohortlens::analysis::{share, Metric, Population};
use cohortlens::ingest::load_canonical;
use cohortlens::store::IngestOptions;
use cohortlens::table::FieldScope;

fn main() -> cohortlens::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/two_institutions.csv");
    let ds = load_canonical(path, &IngestOptions::default())?;
    println!("{:<16} {:>6} {:>9} {:>7}", "group", "inst", "standard", "cohort");
    for label in ["Hispanic", "Hispanic,Women", "Hispanic,Men"] {
        let group = ds.scheme().parse_group(label)?;
        for inst in ["INST1", "INST2"] {
            let population = Population::institutions([inst]);
            let run = |metric| share(&ds, metric, &group, &population, &FieldScope::ComputingCip11, 2020);
            let standard = run(Metric::StandardShare)?;
            let cohort = run(Metric::CohortShare)?;
            println!("{label:<16} {inst:>6} {:>9.1} {:>7.1}", standard.value, cohort.value);
        }
    }
    Ok(())
}
