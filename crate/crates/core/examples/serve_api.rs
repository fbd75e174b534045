//! Serves the two-institution fixture over the JSON API.
//!
//! `cargo run --example serve_api` then e.g.
//! `curl 'http://127.0.0.1:8080/api/cohort?group=Hispanic&institution=INST1'`

use cohortlens::ingest::load_canonical;
use cohortlens::store::IngestOptions;

fn main() -> cohortlens::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/two_institutions.csv");
    let ds = load_canonical(path, &IngestOptions::default())?;
    let addr = std::env::var("COHORTLENS_ADDR").unwrap_or_else(|_| "127.0.0.1:8080".into());
    let addr = addr
        .parse()
        .map_err(|_| cohortlens::Error::invalid("addr", format!("`{addr}` is not a socket address")))?;
    println!("serving on http://{addr}/api/ (Ctrl-C to stop)");
    cohortlens::api::serve(ds, addr, Some("*".into()))
}
