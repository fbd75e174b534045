//! Acceptance criteria, one test each. Every test writes a single
//! `PASS`/`FAIL` line to stderr (bypassing libtest's capture) so a plain
//! `cargo test` run shows the full checklist.

mod common;

use std::collections::BTreeMap;
use std::f64::consts::LN_2;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use axum::http::StatusCode;
use cohortlens::analysis::{self, cohort_share, standard_share, Metric, Population};
use cohortlens::ingest::{ingest_raw, ColumnMap};
use cohortlens::metrics::{equitability, jensen_shannon_divergence, js_distance, shannon_entropy, MAX_JS_DISTANCE};
use cohortlens::scheme::{Axis, CategoryScheme, Cell, Group, MEN, WHITE, WOMEN};
use cohortlens::store::{Dataset, IngestOptions};
use cohortlens::table::{AwardLevel, CountTable, DegreeRecord, Distribution, FieldScope, YearRange};
use common::{enc, fixture, Fixture};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use tempfile::TempDir;

/// Runs one criterion, prints its verdict line, and fails the test on error.
fn criterion(name: &str, check: impl FnOnce() -> Result<String, String>) {
    let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|panic| {
        let msg = panic
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panicked".into());
        Err(msg)
    });
    let line = match &outcome {
        Ok(detail) => format!("PASS  {name}: {detail}\n"),
        Err(reason) => format!("FAIL  {name}: {reason}\n"),
    };
    let _ = std::io::stderr().write_all(line.as_bytes());
    if let Err(reason) = outcome {
        panic!("{name}: {reason}");
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(actual: f64, expected: f64, tol: f64, what: &str) -> Result<(), String> {
    ensure((actual - expected).abs() <= tol, || {
        format!("{what}: {actual} not within {tol} of {expected}")
    })
}

fn dist(p: Vec<f64>) -> Distribution {
    Distribution::from_probabilities(p).unwrap()
}

#[test]
fn equitability_extremes() {
    criterion("equitability extremes for k in {2, 7, 14}", || {
        let start = Instant::now();
        for k in [2usize, 7, 14] {
            let uniform = equitability(&dist(vec![1.0 / k as f64; k]), k).unwrap().value;
            within(uniform, 1.0, 1e-12, &format!("uniform k={k}"))?;
            for hot in 0..k {
                let mut p = vec![0.0; k];
                p[hot] = 1.0;
                let e = equitability(&dist(p), k).unwrap().value;
                ensure(e == 0.0, || format!("degenerate k={k} gave {e}"))?;
            }
        }
        // A 50/50 gender split (through the table pipeline) reports 100%.
        let scheme = CategoryScheme::default();
        let half = [(Cell::new(MEN, WHITE), 50u64), (Cell::new(WOMEN, WHITE), 50u64)];
        let table = CountTable::from_cells(scheme, half.iter().map(|(c, n)| (c, *n))).unwrap();
        let gender = table.marginalize(Axis::Gender).unwrap().normalize().unwrap();
        let pct = equitability(&gender, 2).unwrap().percent();
        ensure(pct == 100.0, || format!("50/50 split gave {pct}%"))?;
        let elapsed = start.elapsed();
        ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
        Ok(format!("uniform = 1, degenerate = 0, 50/50 = 100%, {elapsed:?}"))
    });
}

/// `H = ln N - (1/N) sum c ln c`, computed from raw counts.
fn entropy_from_counts(counts: &[u64]) -> f64 {
    let n: u64 = counts.iter().sum();
    let n = n as f64;
    let s: f64 = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| c as f64 * (c as f64).ln())
        .sum();
    n.ln() - s / n
}

#[test]
fn entropy_matches_direct_summation_oracle() {
    criterion("entropy oracle equivalence (10^4 random count vectors)", || {
        let mut rng = StdRng::seed_from_u64(0x5eed_0001);
        let mut worst = 0.0f64;
        for _ in 0..10_000 {
            let k = rng.random_range(1..=14);
            let mut counts: Vec<u64> = (0..k)
                .map(|_| {
                    if rng.random_bool(0.2) {
                        0
                    } else {
                        rng.random_range(0..1_000_000)
                    }
                })
                .collect();
            if counts.iter().all(|&c| c == 0) {
                counts[0] = 1;
            }
            let total: u64 = counts.iter().sum();
            let p = counts.iter().map(|&c| c as f64 / total as f64).collect();
            let h = shannon_entropy(&dist(p)).value();
            let oracle = entropy_from_counts(&counts);
            worst = worst.max((h - oracle).abs());
        }
        ensure(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
        Ok(format!("max |H - oracle| = {worst:.2e} nats"))
    });
}

fn random_distribution(rng: &mut StdRng, k: usize) -> Distribution {
    let mut w: Vec<f64> = (0..k)
        .map(|_| {
            if rng.random_bool(0.15) {
                0.0
            } else {
                rng.random::<f64>()
            }
        })
        .collect();
    if w.iter().all(|&x| x == 0.0) {
        w[rng.random_range(0..k)] = 1.0;
    }
    let s: f64 = w.iter().sum();
    dist(w.into_iter().map(|x| x / s).collect())
}

#[test]
fn js_metric_properties() {
    criterion(
        "JS identity, symmetry, bound, triangle inequality (10^4 triples)",
        || {
            let start = Instant::now();
            let mut rng = StdRng::seed_from_u64(0x5eed_0002);
            for i in 0..10_000 {
                let k = rng.random_range(2..=14);
                let (p, q, r) = (
                    random_distribution(&mut rng, k),
                    random_distribution(&mut rng, k),
                    random_distribution(&mut rng, k),
                );
                let pp = jensen_shannon_divergence(&p, &p).unwrap().value();
                ensure(pp.abs() <= 1e-15, || format!("trial {i}: JSD(P,P) = {pp}"))?;
                let pq = jensen_shannon_divergence(&p, &q).unwrap().value();
                let qp = jensen_shannon_divergence(&q, &p).unwrap().value();
                ensure(pq == qp, || format!("trial {i}: asymmetric {pq} vs {qp}"))?;
                ensure((0.0..=LN_2).contains(&pq), || {
                    format!("trial {i}: JSD {pq} outside [0, ln 2]")
                })?;
                let (dpq, dqr, dpr) = (
                    js_distance(&p, &q).unwrap(),
                    js_distance(&q, &r).unwrap(),
                    js_distance(&p, &r).unwrap(),
                );
                ensure(dpr <= dpq + dqr + 1e-12, || {
                    format!("trial {i}: triangle {dpr} > {dpq} + {dqr}")
                })?;
            }
            let a = dist(vec![0.5, 0.5, 0.0, 0.0]);
            let b = dist(vec![0.0, 0.0, 0.25, 0.75]);
            let d = js_distance(&a, &b).unwrap();
            within(d, LN_2.sqrt(), 1e-12, "disjoint-support distance")?;
            let elapsed = start.elapsed();
            ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
            Ok(format!("disjoint pair = {d:.15}, {elapsed:?}"))
        },
    );
}

#[test]
fn two_institution_cohort_shares_via_cli_and_api() {
    criterion("two-institution cohort shares via CLI and API (±0.05)", || {
        let fx = Fixture::canonical("two_institutions.csv");
        let published = [
            ("Hispanic", "INST1", 3.2),
            ("Hispanic", "INST2", 3.4),
            ("Hispanic,Women", "INST1", 0.9),
            ("Hispanic,Women", "INST2", 2.7),
            ("Hispanic,Men", "INST1", 6.4),
            ("Hispanic,Men", "INST2", 4.3),
        ];
        let mut shown = Vec::new();
        for (group, inst, expected) in published {
            let cli = fx.cli(&[
                "cohort",
                "--group",
                group,
                "--institution",
                inst,
                "--year",
                "2020",
                "--format",
                "json",
            ]);
            ensure(cli.code == 0, || format!("CLI exit {}: {}", cli.code, cli.stderr))?;
            let cli_json: serde_json::Value = serde_json::from_str(&cli.stdout).map_err(|e| e.to_string())?;
            let cli_value = cli_json["value"].as_f64().unwrap();
            within(cli_value, expected, 0.05, &format!("CLI {group} {inst}"))?;
            let text = fx.cli(&["cohort", "--group", group, "--institution", inst, "--year", "2020"]);
            let printed = text.stdout.lines().last().unwrap_or("").trim().to_string();
            ensure(printed == format!("{expected:.1}"), || {
                format!("CLI printed {printed} for {group} {inst}")
            })?;
            let (status, body, _) = fx.api(&format!(
                "/api/cohort?group={}&institution={inst}&year=2020",
                enc(group)
            ));
            ensure(status == StatusCode::OK, || format!("API status {status}"))?;
            let api_value = body["value"].as_f64().unwrap();
            ensure(api_value.to_bits() == cli_value.to_bits(), || {
                format!("API {api_value} != CLI {cli_value}")
            })?;
            shown.push(format!("{api_value:.2}"));
        }
        Ok(format!("cohort shares {}", shown.join("/")))
    });
}

#[test]
fn national_2021_gap_rows() {
    criterion(
        "national 2021 gaps: Hispanic men +2.0, Hispanic women -7.0 (±0.1)",
        || {
            let fx = Fixture::canonical("national.csv");
            let (status, body, raw) = fx.api("/api/gap?institution=US&year=2021&scope=cip11&reference=all");
            ensure(status == StatusCode::OK, || raw.clone())?;
            let rows = body["rows"].as_array().unwrap();
            let gap = |gender: &str| -> f64 {
                rows.iter()
                    .find(|r| r["cell"]["gender"] == gender && r["cell"]["race"] == "Hispanic or Latino")
                    .unwrap()["gap"]
                    .as_f64()
                    .unwrap()
            };
            let (men, women) = (gap("Men"), gap("Women"));
            within(men, 2.0, 0.1, "Hispanic men gap")?;
            within(women, -7.0, 0.1, "Hispanic women gap")?;
            let ds = fx.dataset();
            let direct = analysis::gap_report(
                &ds,
                &Population::institutions(["US"]),
                2021,
                &FieldScope::ComputingCip11,
                &FieldScope::AllDegrees,
            )
            .unwrap();
            ensure(direct.rows.windows(2).all(|w| w[0].gap <= w[1].gap), || {
                "rows not deficit-first".into()
            })?;
            Ok(format!("men {men:+.3}, women {women:+.3}"))
        },
    );
}

fn random_table(rng: &mut StdRng, scheme: &CategoryScheme) -> (Vec<u64>, Vec<u64>) {
    let all: Vec<u64> = (0..scheme.cell_count()).map(|_| rng.random_range(1..5_000)).collect();
    let field = all.iter().map(|&a| rng.random_range(0..=a)).collect();
    (field, all)
}

#[test]
fn cohort_share_is_local_to_its_group() {
    criterion("cohort locality (10^3 randomized perturbations)", || {
        let scheme = CategoryScheme::default();
        let mut rng = StdRng::seed_from_u64(0x5eed_0003);
        let cells: Vec<Cell> = scheme.cells().collect();
        let mut standard_changed = 0;
        for trial in 0..1_000 {
            let (mut field, mut all) = random_table(&mut rng, &scheme);
            let target = match rng.random_range(0..3) {
                0 => Group::Cell(cells[rng.random_range(0..cells.len())].clone()),
                1 => Group::Gender(scheme.genders()[rng.random_range(0..2)].clone()),
                _ => Group::Race(scheme.races()[rng.random_range(0..scheme.races().len())].clone()),
            };
            // Make sure the target has program graduates.
            for (i, c) in cells.iter().enumerate() {
                if target.contains(c) {
                    field[i] = field[i].max(1);
                }
            }
            let outside: Vec<usize> = (0..cells.len()).filter(|&i| !target.contains(&cells[i])).collect();
            let mk = |f: &[u64], a: &[u64]| {
                (
                    CountTable::from_counts(scheme.clone(), Axis::Intersectional, f.to_vec()).unwrap(),
                    CountTable::from_counts(scheme.clone(), Axis::Intersectional, a.to_vec()).unwrap(),
                )
            };
            let (f0, a0) = mk(&field, &all);
            let cohort_before = cohort_share(&f0, &a0, &target).unwrap();
            let standard_before = standard_share(&f0, &target).unwrap();

            let i = outside[rng.random_range(0..outside.len())];
            let delta = rng.random_range(1..500u64);
            if rng.random_bool(0.5) || field[i] < delta {
                field[i] += delta;
                all[i] += delta + rng.random_range(0..100);
            } else {
                field[i] -= delta;
                all[i] -= rng.random_range(0..=delta);
            }
            let (f1, a1) = mk(&field, &all);
            let cohort_after = cohort_share(&f1, &a1, &target).unwrap();
            let standard_after = standard_share(&f1, &target).unwrap();
            ensure(cohort_after.to_bits() == cohort_before.to_bits(), || {
                format!("trial {trial}: cohort share moved {cohort_before} -> {cohort_after}")
            })?;
            if f1.total() != f0.total() {
                ensure(standard_after != standard_before, || {
                    format!("trial {trial}: standard share did not move")
                })?;
                standard_changed += 1;
            }
        }
        Ok(format!(
            "cohort bit-identical in 1000/1000, standard moved in {standard_changed}/1000"
        ))
    });
}

#[test]
fn standard_and_cohort_diverge_over_ten_years() {
    criterion("standard-vs-cohort divergence over 10 synthetic years", || {
        // Women: 100 of 1000 graduates in the field every year (cohort 10%).
        // Men: field graduates grow 100 -> 280 out of a constant 1000.
        let mut records = Vec::new();
        let rec = |year, cip: &str, gender: &str, count| DegreeRecord {
            institution_id: "SYN".into(),
            year,
            cip: cip.into(),
            award_level: AwardLevel::Bachelors,
            cell: Cell::new(gender, WHITE),
            count,
        };
        for (i, year) in (2010..2020).enumerate() {
            let men = 100 + 20 * i as u64;
            records.push(rec(year, "11", WOMEN, 100));
            records.push(rec(year, "24", WOMEN, 900));
            records.push(rec(year, "11", MEN, men));
            records.push(rec(year, "24", MEN, 1000 - men));
        }
        let ds = Dataset::from_records("synthetic", CategoryScheme::default(), records);
        let women = Group::Gender(WOMEN.into());
        let years = YearRange::new(2010, 2019).unwrap();
        let run = |metric| {
            analysis::series(
                &ds,
                metric,
                &women,
                &Population::default(),
                &FieldScope::ComputingCip11,
                years,
            )
            .unwrap()
        };
        let standard = run(Metric::StandardShare);
        let cohort = run(Metric::CohortShare);
        ensure(standard.points.len() == 10 && cohort.points.len() == 10, || {
            "missing years".into()
        })?;
        for (i, p) in standard.points.iter().enumerate() {
            // Oracle: 100 / (100 + men) * 100.
            let oracle = 100.0 * 100.0 / (200.0 + 20.0 * i as f64);
            within(p.value, oracle, 1e-12, &format!("standard {}", p.year))?;
        }
        ensure(standard.points.windows(2).all(|w| w[1].value < w[0].value), || {
            "standard not decreasing".into()
        })?;
        ensure(cohort.points.iter().all(|p| p.value == 10.0), || {
            "cohort not flat at 10%".into()
        })?;
        Ok(format!(
            "standard {:.1} -> {:.1}, cohort flat at {:.1}",
            standard.points[0].value, standard.points[9].value, cohort.points[0].value
        ))
    });
}

#[test]
fn univ5_ranks_highest_js_distance() {
    criterion("Univ-5 ranks highest by JS distance in a 5-institution set", || {
        let fx = Fixture::canonical("north_carolina.csv");
        let ds = fx.dataset();
        // Fixture shape: 62% of Univ-5's degrees go to Black women, none in CIP 11.
        let bw = Group::Cell(Cell::new(WOMEN, "Black or African American"));
        let share = analysis::share(
            &ds,
            Metric::StandardShare,
            &bw,
            &Population::institutions(["Univ-5"]),
            &FieldScope::AllDegrees,
            2020,
        )
        .unwrap();
        within(share.value, 62.0, 0.5, "Univ-5 Black women share of all degrees")?;
        let in_cs = analysis::share(
            &ds,
            Metric::StandardShare,
            &bw,
            &Population::institutions(["Univ-5"]),
            &FieldScope::ComputingCip11,
            2020,
        )
        .unwrap();
        ensure(in_cs.numerator == 0, || {
            format!("{} Black women in CIP 11", in_cs.numerator)
        })?;

        let set: Vec<String> = ["Univ-1", "Univ-2", "Univ-3", "Univ-4", "Univ-5"]
            .map(String::from)
            .to_vec();
        let report = analysis::js_distance_report(
            &ds,
            &set,
            2020,
            &FieldScope::ComputingCip11,
            &FieldScope::AllDegrees,
            Some(AwardLevel::Bachelors),
        )
        .unwrap();
        ensure(report.rows.len() == 5, || format!("{} rows", report.rows.len()))?;
        let top = &report.rows[0];
        ensure(top.institution_id == "Univ-5", || {
            format!("top is {}", top.institution_id)
        })?;
        ensure(top.distance.is_finite() && top.distance <= MAX_JS_DISTANCE, || {
            format!("distance {}", top.distance)
        })?;
        let (status, body, _) = fx.api("/api/jsdistance?year=2020&institution=Univ-1&institution=Univ-2&institution=Univ-3&institution=Univ-4&institution=Univ-5");
        ensure(
            status == StatusCode::OK && body["rows"][0]["institution_id"] == "Univ-5",
            || "API ranking differs".into(),
        )?;
        Ok(format!(
            "Univ-5 distance {:.4} (next {:.4})",
            top.distance, report.rows[1].distance
        ))
    });
}

/// Per-institution totals straight from raw IPEDS columns (first-major
/// bachelor's rows, CIP 99 totals skipped, nonresident/unknown excluded).
fn raw_oracle(path: &std::path::Path) -> BTreeMap<String, u64> {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let headers = reader.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let mut totals = BTreeMap::new();
    for row in reader.records() {
        let row = row.unwrap();
        if &row[col("CIPCODE")] == "99" || &row[col("MAJORNUM")] != "1" || &row[col("AWLEVEL")] != "5" {
            continue;
        }
        let n = |name: &str| -> u64 { row[col(name)].parse().unwrap() };
        *totals.entry(row[col("UNITID")].to_string()).or_default() += n("CTOTALT") - n("CNRALT") - n("CUNKNT");
    }
    totals
}

#[test]
fn ingest_conserves_and_is_idempotent() {
    criterion("ingest conservation + idempotence on raw IPEDS sample", || {
        let tmp = TempDir::new().unwrap();
        let src = fixture("ipeds_c2021_a_sample.csv");
        let options = IngestOptions {
            year: Some(2021),
            ..IngestOptions::default()
        };
        let map = ColumnMap::ipeds_completions();
        ingest_raw(tmp.path(), &src, &map, &options).map_err(|e| e.to_string())?;
        let ds = Dataset::open(tmp.path()).map_err(|e| e.to_string())?;
        let mut stored = BTreeMap::new();
        for r in ds.records() {
            *stored.entry(r.institution_id.clone()).or_insert(0u64) += r.count;
        }
        let oracle = raw_oracle(&src);
        ensure(stored == oracle, || format!("stored {stored:?} vs raw {oracle:?}"))?;
        let before = (
            std::fs::read(tmp.path().join("records.csv")).unwrap(),
            std::fs::read(tmp.path().join("manifest.json")).unwrap(),
        );
        let again = ingest_raw(tmp.path(), &src, &map, &options).map_err(|e| e.to_string())?;
        let after = (
            std::fs::read(tmp.path().join("records.csv")).unwrap(),
            std::fs::read(tmp.path().join("manifest.json")).unwrap(),
        );
        ensure(again.already_ingested && before == after, || {
            "second ingest changed the dataset".into()
        })?;
        Ok(format!(
            "{} graduates over {} institutions match raw column sums; re-ingest is a no-op",
            oracle.values().sum::<u64>(),
            oracle.len()
        ))
    });
}

#[test]
fn single_year_ipeds_pipeline() {
    criterion(
        "national multi-decade curves substituted by single-year IPEDS pipeline",
        || {
            // The multi-decade national curves need the full IPEDS corpus; here
            // every share lens runs end to end on a single-year raw sample and
            // is checked against raw-column arithmetic.
            let tmp = TempDir::new().unwrap();
            let dir = tmp.path().join("ipeds");
            let src = fixture("ipeds_c2021_a_sample.csv");
            let out = common::cli(&[
                "cohortlens",
                "--dataset",
                dir.to_str().unwrap(),
                "ingest",
                "--year",
                "2021",
                src.to_str().unwrap(),
            ]);
            ensure(out.code == 0, || out.stderr.clone())?;

            // Oracle: pooled Hispanic women, CIP 11 vs all fields, from raw columns.
            let mut reader = csv::Reader::from_path(&src).unwrap();
            let headers = reader.headers().unwrap().clone();
            let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
            let (mut field, mut cohort, mut field_total) = (0u64, 0u64, 0u64);
            for row in reader.records() {
                let row = row.unwrap();
                let cip = &row[col("CIPCODE")];
                if cip == "99" || &row[col("MAJORNUM")] != "1" || &row[col("AWLEVEL")] != "5" {
                    continue;
                }
                let n = |name: &str| -> u64 { row[col(name)].parse().unwrap() };
                cohort += n("CHISPW");
                if cip.starts_with("11.") {
                    field += n("CHISPW");
                    field_total += n("CTOTALT") - n("CNRALT") - n("CUNKNT");
                }
            }
            let expected_cohort = 100.0 * field as f64 / cohort as f64;
            let expected_standard = 100.0 * field as f64 / field_total as f64;
            let json = |args: &[&str]| -> Result<f64, String> {
                let mut argv = vec!["cohortlens", "--dataset", dir.to_str().unwrap()];
                argv.extend_from_slice(args);
                argv.extend_from_slice(&["--format", "json"]);
                let out = common::cli(&argv);
                ensure(out.code == 0, || out.stderr.clone())?;
                let v: serde_json::Value = serde_json::from_str(&out.stdout).map_err(|e| e.to_string())?;
                Ok(v["value"].as_f64().unwrap())
            };
            let c = json(&["cohort", "--group", "Hispanic,Women", "--year", "2021"])?;
            let s = json(&["standard", "--group", "Hispanic,Women", "--year", "2021"])?;
            within(c, expected_cohort, 1e-9, "cohort share")?;
            within(s, expected_standard, 1e-9, "standard share")?;
            for args in [
                vec!["gap", "--year", "2021"],
                vec!["evenness", "--year", "2021"],
                vec!["jsdistance", "--year", "2021"],
                vec!["series", "--metric", "cohort", "--group", "Women"],
            ] {
                let mut argv = vec!["cohortlens", "--dataset", dir.to_str().unwrap()];
                argv.extend(args.iter().copied());
                let out = common::cli(&argv);
                ensure(out.code == 0, || format!("{args:?}: {}", out.stderr))?;
            }
            Ok(format!(
                "cohort {c:.3}%, standard {s:.3}% match raw arithmetic; all lenses run"
            ))
        },
    );
}
