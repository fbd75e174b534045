//! Renders each chart kind from analysis results: a cohort-share line
//! chart, an evenness dumbbell, and a gap grouped-bar chart, as SVG files.
//!
//! `cargo run --example charts [-- OUT_DIR]`

use cohortlens::analysis::{evenness_comparison, gap_report, series, Metric, Population};
use cohortlens::chart::{emit_chart, ChartFormat, ChartKind, ChartPayload, ChartSpec};
use cohortlens::ingest::load_canonical;
use cohortlens::store::IngestOptions;
use cohortlens::table::{AwardLevel, FieldScope, YearRange};

fn main() -> cohortlens::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(std::path::PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);
    let fixture = |name: &str| format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    let national = load_canonical(fixture("national.csv"), &IngestOptions::default())?;
    let nc = load_canonical(fixture("north_carolina.csv"), &IngestOptions::default())?;

    let group = national.scheme().parse_group("Hispanic,Women")?;
    let years = YearRange::new(2010, 2021)?;
    let line = series(
        &national,
        Metric::CohortShare,
        &group,
        &Population::default(),
        &FieldScope::ComputingCip11,
        years,
    )?;

    let ids: Vec<String> = nc.institution_ids().map(String::from).collect();
    let triples = evenness_comparison(&nc, &ids, 2020, &FieldScope::AllDegrees, Some(AwardLevel::Bachelors))?;

    let gaps = gap_report(
        &national,
        &Population::default(),
        2021,
        &FieldScope::ComputingCip11,
        &FieldScope::AllDegrees,
    )?;

    let charts = [
        (
            "line.svg",
            ChartKind::Line,
            "Hispanic women, cohort share",
            ChartPayload::Series(line.points),
        ),
        (
            "dumbbell.svg",
            ChartKind::Dumbbell,
            "Evenness by institution, 2020",
            ChartPayload::Triples(triples.rows),
        ),
        (
            "gaps.svg",
            ChartKind::GroupedBar,
            "Program vs university, 2021",
            ChartPayload::Gaps(gaps.rows),
        ),
    ];
    for (file, kind, title, payload) in charts {
        let svg = emit_chart(&ChartSpec::new(kind, title, payload, ChartFormat::Svg))?;
        let path = out.join(file);
        std::fs::write(&path, svg)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
