mod common;

use common::{cli, fixture, Fixture};

use cohortlens::analysis::{self, Metric, Population};
use cohortlens::table::{FieldScope, YearRange};

#[test]
fn cohort_share_prints_one_decimal() {
    let fx = Fixture::canonical("two_institutions.csv");
    let out = fx.cli(&[
        "cohort",
        "--group",
        "Hispanic,Women",
        "--institution",
        "INST1",
        "--year",
        "2020",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(out.stdout.lines().last().unwrap().trim(), "0.9");
}

#[test]
fn evenness_series_csv_has_ten_rows_ending_at_67_3() {
    let fx = Fixture::canonical("north_carolina.csv");
    let out = fx.cli(&[
        "evenness",
        "--axis",
        "race",
        "--institution",
        "Univ-11",
        "--years",
        "2010-2019",
        "--format",
        "csv",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let rows: Vec<&str> = out.stdout.lines().skip(1).collect();
    assert_eq!(rows.len(), 10);
    let last: Vec<&str> = rows[9].split(',').collect();
    assert_eq!(last[1], "2019");
    assert_eq!(format!("{:.1}", last[2].parse::<f64>().unwrap()), "67.3");
}

#[test]
fn proportional_program_has_all_zero_gaps() {
    let tmp = tempfile::TempDir::new().unwrap();
    let src = tmp.path().join("proportional.csv");
    let mut body = String::from("institution_id,year,cip_family,award_level,gender,race,count\n");
    for (g, r, n) in [
        ("Men", "White", 40),
        ("Women", "White", 30),
        ("Women", "Asian", 20),
        ("Men", "Hispanic or Latino", 10),
    ] {
        body.push_str(&format!("P,2020,11,bachelors,{g},{r},{n}\n"));
        body.push_str(&format!("P,2020,24,bachelors,{g},{r},{}\n", n * 9));
    }
    std::fs::write(&src, body).unwrap();
    let dir = tmp.path().join("ds");
    let dir = dir.to_str().unwrap();
    assert_eq!(
        cli(&["cohortlens", "--dataset", dir, "ingest", src.to_str().unwrap()]).code,
        0
    );
    let out = cli(&["cohortlens", "--dataset", dir, "gap", "--format", "csv"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let gaps: Vec<f64> = out
        .stdout
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(gaps.len(), 14);
    assert!(gaps.iter().all(|g| g.abs() < 1e-12), "{gaps:?}");
}

#[test]
fn cli_json_equals_analysis_result() {
    let fx = Fixture::canonical("national.csv");
    let out = fx.cli(&[
        "series",
        "--metric",
        "cohort",
        "--group",
        "Black,Women",
        "--years",
        "2010-2021",
        "--format",
        "json",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let json: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    let ds = fx.dataset();
    let group = ds.scheme().parse_group("Black,Women").unwrap();
    let direct = analysis::series(
        &ds,
        Metric::CohortShare,
        &group,
        &Population::default(),
        &FieldScope::ComputingCip11,
        YearRange::new(2010, 2021).unwrap(),
    )
    .unwrap();
    let points = json["points"].as_array().unwrap();
    assert_eq!(points.len(), direct.points.len());
    for (p, d) in points.iter().zip(&direct.points) {
        assert_eq!(p["value"].as_f64().unwrap().to_bits(), d.value.to_bits());
        assert_eq!(p["year"].as_i64().unwrap(), d.year as i64);
    }
    assert_eq!(json["report"], "series");
    assert_eq!(json["dataset_digest"].as_str().unwrap(), ds.digest());
}

#[test]
fn usage_errors_exit_1_with_help() {
    let fx = Fixture::canonical("two_institutions.csv");
    let out = fx.cli(&["cohort", "--year", "2020"]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("--group"));

    let out = fx.cli(&[
        "series",
        "--metric",
        "cohort",
        "--group",
        "Women",
        "--years",
        "2020-2010",
    ]);
    assert_eq!(out.code, 1);

    let out = fx.cli(&["series", "--metric", "median", "--group", "Women"]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("Usage: series"), "{}", out.stderr);

    assert_eq!(cli(&["cohortlens", "frobnicate"]).code, 1);
    assert_eq!(
        cli(&["cohortlens", "cohort", "--group", "Women"]).code,
        1,
        "missing --dataset"
    );
}

#[test]
fn data_errors_exit_2_with_error_name() {
    let fx = Fixture::canonical("two_institutions.csv");
    let out = fx.cli(&["cohort", "--group", "Hispanic", "--institution", "NOPE"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("unknown_institution"), "{}", out.stderr);

    let out = fx.cli(&["standard", "--group", "Women", "--year", "1999"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("zero_population"), "{}", out.stderr);

    let missing = fx.tmp.path().join("nowhere");
    let out = cli(&["cohortlens", "--dataset", missing.to_str().unwrap(), "gap"]);
    assert_eq!(out.code, 2);
}

#[test]
fn help_exits_zero() {
    let out = cli(&["cohortlens", "--help"]);
    assert_eq!(out.code, 0);
    for sub in [
        "ingest",
        "standard",
        "cohort",
        "series",
        "gap",
        "evenness",
        "jsdistance",
        "compare",
        "export-chart",
        "serve",
    ] {
        assert!(out.stdout.contains(sub), "help lists {sub}");
    }
}

#[test]
fn compare_prints_metric_by_institution_table() {
    let fx = Fixture::canonical("two_institutions.csv");
    let out = fx.cli(&[
        "compare",
        "--metric",
        "standard:Hispanic",
        "--metric",
        "cohort:Hispanic,Men",
        "--institution",
        "INST1",
        "--institution",
        "INST2",
        "--year",
        "2020",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert!(lines[0].contains("INST1") && lines[0].contains("INST2"));
    let cells: Vec<&str> = lines[1].split_whitespace().rev().take(2).collect();
    assert_eq!(cells, vec!["4.0", "90.2"]);
    let cells: Vec<&str> = lines[2].split_whitespace().rev().take(2).collect();
    assert_eq!(cells, vec!["4.3", "6.4"]);
}

#[test]
fn format_outputs_write_files() {
    let fx = Fixture::canonical("north_carolina.csv");
    let path = fx.tmp.path().join("dumbbell.svg");
    let out = fx.cli(&[
        "evenness",
        "--year",
        "2020",
        "--scope",
        "all",
        "--format",
        "svg",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.is_empty());
    let svg = std::fs::read_to_string(&path).unwrap();
    assert_eq!(svg.matches("<g class=\"row\"").count(), 12);

    let out = fx.cli(&["standard", "--group", "Women", "--format", "svg"]);
    assert_eq!(out.code, 1, "scalar reports have no chart");
}

#[test]
fn export_chart_subcommand() {
    let fx = Fixture::canonical("national.csv");
    let path = fx.tmp.path().join("line.json");
    let out = fx.cli(&[
        "export-chart",
        "series",
        "--metric",
        "cohort",
        "--group",
        "Black,Men",
        "--years",
        "2019-2020",
        "--format",
        "json",
        "--title",
        "Black men",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let payload = cohortlens::chart::ChartPayload::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    match payload {
        cohortlens::chart::ChartPayload::Series(points) => assert_eq!(points.len(), 2),
        other => panic!("unexpected payload {other:?}"),
    }

    let out = fx.cli(&["export-chart", "gap", "--kind", "dumbbell"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("kind_mismatch"), "{}", out.stderr);
}

#[test]
fn ingest_reports_and_is_idempotent() {
    let tmp = tempfile::TempDir::new().unwrap();
    let dir = tmp.path().join("ipeds");
    let dir = dir.to_str().unwrap();
    let src = fixture("ipeds_c2021_a_sample.csv");
    let first = cli(&[
        "cohortlens",
        "--dataset",
        dir,
        "ingest",
        "--year",
        "2021",
        src.to_str().unwrap(),
    ]);
    assert_eq!(first.code, 0, "{}", first.stderr);
    assert!(first.stderr.contains("excluded categories"), "{}", first.stderr);
    let manifest_before = std::fs::read_to_string(tmp.path().join("ipeds/manifest.json")).unwrap();
    let second = cli(&[
        "cohortlens",
        "--dataset",
        dir,
        "ingest",
        "--year",
        "2021",
        src.to_str().unwrap(),
    ]);
    assert_eq!(second.code, 0);
    assert!(second.stdout.contains("already ingested"));
    let manifest_after = std::fs::read_to_string(tmp.path().join("ipeds/manifest.json")).unwrap();
    assert_eq!(manifest_before, manifest_after);
}

#[test]
fn raw_ingest_without_year_is_a_usage_error() {
    let tmp = tempfile::TempDir::new().unwrap();
    let dir = tmp.path().join("ipeds");
    let src = fixture("ipeds_c2021_a_sample.csv");
    let out = cli(&[
        "cohortlens",
        "--dataset",
        dir.to_str().unwrap(),
        "ingest",
        src.to_str().unwrap(),
    ]);
    assert_eq!(out.code, 1, "{}", out.stderr);
    assert!(out.stderr.contains("year"));
}
