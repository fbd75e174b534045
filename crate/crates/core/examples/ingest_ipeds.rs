//! Ingests a raw wide-format IPEDS completions extract into a dataset
//! directory, re-ingests it (a no-op), and prints the stored totals.
//!
//! `cargo run --example ingest_ipeds [-- DATASET_DIR]`

use std::collections::BTreeMap;

use cohortlens::ingest::{ingest_raw, ColumnMap};
use cohortlens::store::{Dataset, IngestOptions};

fn main() -> cohortlens::Result<()> {
    let src = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/ipeds_c2021_a_sample.csv");
    let dir = std::env::args()
        .nth(1)
        .map(std::path::PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("cohortlens-ipeds-example"));
    let options = IngestOptions {
        year: Some(2021),
        ..IngestOptions::default()
    };
    let map = ColumnMap::ipeds_completions();

    let first = ingest_raw(&dir, src, &map, &options)?;
    println!(
        "read {} rows, kept {}, {} graduates outside the scheme excluded",
        first.rows_read, first.rows_kept, first.excluded_extras
    );
    let again = ingest_raw(&dir, src, &map, &options)?;
    println!("second ingest already ingested: {}", again.already_ingested);

    let ds = Dataset::open(&dir)?;
    let mut totals = BTreeMap::<&str, u64>::new();
    for r in ds.records() {
        *totals.entry(r.institution_id.as_str()).or_default() += r.count;
    }
    for (id, n) in totals {
        println!("{id:>8} {n:>7}");
    }
    println!("digest {}", ds.digest());
    Ok(())
}
