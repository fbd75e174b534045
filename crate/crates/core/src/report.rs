//! Named analysis requests and their JSON/CSV/text renderings.
//!
//! The CLI and the HTTP API both reduce their inputs to the same
//! `(name, value)` parameter pairs, build an [`AnalysisRequest`] from them
//! and [`execute`] it against a [`Dataset`]. The resulting [`Response`] is
//! serialized identically by both front ends, so a CLI JSON export and an
//! API body for the same parameters are byte-for-byte the same.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::analysis::{
    self, ComparisonReport, DistributionPair, EvennessComparison, EvennessReport, GapReport, JsDistanceReport, Metric,
    MetricSpec, Population, SeriesReport, ShareReport, Warning,
};
use crate::error::{Error, Result};
use crate::scheme::{Axis, CategoryScheme};
use crate::store::{Dataset, InstitutionInfo};
use crate::table::{AwardLevel, FieldScope, YearRange};

/// The analyses reachable from both the CLI and the API.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Endpoint {
    Standard,
    Cohort,
    Series,
    Gap,
    Evenness,
    JsDistance,
    Compare,
}

impl Endpoint {
    pub const ALL: [Endpoint; 7] = [
        Endpoint::Standard,
        Endpoint::Cohort,
        Endpoint::Series,
        Endpoint::Gap,
        Endpoint::Evenness,
        Endpoint::JsDistance,
        Endpoint::Compare,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Endpoint::Standard => "standard",
            Endpoint::Cohort => "cohort",
            Endpoint::Series => "series",
            Endpoint::Gap => "gap",
            Endpoint::Evenness => "evenness",
            Endpoint::JsDistance => "jsdistance",
            Endpoint::Compare => "compare",
        }
    }

    /// Parameter names accepted by this analysis.
    pub fn parameters(&self) -> &'static [&'static str] {
        match self {
            Endpoint::Standard | Endpoint::Cohort => &["group", "institution", "year", "scope", "award"],
            Endpoint::Series => &["metric", "group", "institution", "years", "scope", "award"],
            Endpoint::Gap => &["institution", "year", "scope", "reference", "award"],
            Endpoint::Evenness => &["axis", "institution", "year", "years", "scope", "award"],
            Endpoint::JsDistance => &["institution", "year", "scope", "reference", "award", "breakdown"],
            Endpoint::Compare => &["metric", "institution", "year", "scope", "award"],
        }
    }
}

/// Validated query parameters: every name is known to the endpoint and
/// single-valued names appear at most once.
pub struct Params<'a> {
    endpoint: Endpoint,
    pairs: &'a [(String, String)],
}

const REPEATABLE: &[&str] = &["institution", "metric"];

impl<'a> Params<'a> {
    pub fn new(endpoint: Endpoint, pairs: &'a [(String, String)]) -> Result<Self> {
        for (name, _) in pairs {
            if !endpoint.parameters().contains(&name.as_str()) {
                return Err(Error::invalid(
                    name.clone(),
                    format!(
                        "unknown parameter for {} (accepted: {})",
                        endpoint.name(),
                        endpoint.parameters().join(", ")
                    ),
                ));
            }
            let repeated = pairs.iter().filter(|(n, _)| n == name).count() > 1;
            if repeated && !REPEATABLE.contains(&name.as_str()) {
                return Err(Error::invalid(name.clone(), "given more than once"));
            }
        }
        Ok(Self { endpoint, pairs })
    }

    fn one(&self, name: &str) -> Option<&'a str> {
        self.pairs.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_str())
    }

    fn all(&self, name: &str) -> Vec<String> {
        self.pairs
            .iter()
            .filter(|(n, _)| n == name)
            .flat_map(|(_, v)| v.split(';'))
            .map(|v| v.trim().to_string())
            .filter(|v| !v.is_empty())
            .collect()
    }

    fn required(&self, name: &str) -> Result<&'a str> {
        self.one(name)
            .ok_or_else(|| Error::invalid(name, format!("required by {}", self.endpoint.name())))
    }

    fn scope(&self, name: &str, default: FieldScope) -> Result<FieldScope> {
        match self.one(name) {
            Some(v) => FieldScope::parse(v).map_err(|e| rename_parameter(e, name)),
            None => Ok(default),
        }
    }

    fn year(&self) -> Result<Option<i32>> {
        self.one("year")
            .map(|v| {
                v.trim()
                    .parse()
                    .map_err(|_| Error::invalid("year", format!("`{v}` is not a year")))
            })
            .transpose()
    }

    fn years(&self) -> Result<Option<YearRange>> {
        self.one("years").map(YearRange::parse).transpose()
    }

    fn award(&self) -> Result<Option<AwardLevel>> {
        match self.one("award") {
            None => Ok(Some(AwardLevel::Bachelors)),
            Some(v) if v.trim().eq_ignore_ascii_case("all") => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|e| rename_parameter(e, "award")),
        }
    }

    fn population(&self) -> Result<Population> {
        Ok(Population {
            institutions: self.all("institution"),
            award_level: self.award()?,
        })
    }
}

fn rename_parameter(err: Error, name: &str) -> Error {
    match err {
        Error::InvalidParameter { reason, .. } => Error::invalid(name, reason),
        other => other,
    }
}

/// A fully parsed analysis. Group labels are resolved against the dataset's
/// scheme at execution time; absent years default to the dataset's span.
#[derive(Clone, Debug, PartialEq)]
pub enum AnalysisRequest {
    Share {
        metric: Metric,
        group: String,
        population: Population,
        year: Option<i32>,
        scope: FieldScope,
    },
    Series {
        metric: Metric,
        group: String,
        population: Population,
        years: Option<YearRange>,
        scope: FieldScope,
    },
    Gap {
        population: Population,
        year: Option<i32>,
        program_scope: FieldScope,
        reference_scope: FieldScope,
    },
    EvennessSeries {
        institution: String,
        axis: Axis,
        years: Option<YearRange>,
        scope: FieldScope,
        award_level: Option<AwardLevel>,
    },
    EvennessComparison {
        institutions: Vec<String>,
        year: Option<i32>,
        scope: FieldScope,
        award_level: Option<AwardLevel>,
    },
    JsDistance {
        institutions: Vec<String>,
        year: Option<i32>,
        program_scope: FieldScope,
        reference_scope: FieldScope,
        award_level: Option<AwardLevel>,
    },
    Distributions {
        institution: String,
        year: Option<i32>,
        program_scope: FieldScope,
        reference_scope: FieldScope,
        award_level: Option<AwardLevel>,
    },
    Compare {
        institutions: Vec<String>,
        year: Option<i32>,
        scope: FieldScope,
        metrics: Vec<String>,
        award_level: Option<AwardLevel>,
    },
}

impl AnalysisRequest {
    pub fn from_params(endpoint: Endpoint, pairs: &[(String, String)]) -> Result<Self> {
        let p = Params::new(endpoint, pairs)?;
        let scope = p.scope("scope", FieldScope::ComputingCip11)?;
        Ok(match endpoint {
            Endpoint::Standard | Endpoint::Cohort => AnalysisRequest::Share {
                metric: if endpoint == Endpoint::Standard {
                    Metric::StandardShare
                } else {
                    Metric::CohortShare
                },
                group: p.required("group")?.to_string(),
                population: p.population()?,
                year: p.year()?,
                scope,
            },
            Endpoint::Series => AnalysisRequest::Series {
                metric: Metric::parse(p.required("metric")?)?,
                group: p.required("group")?.to_string(),
                population: p.population()?,
                years: p.years()?,
                scope,
            },
            Endpoint::Gap => AnalysisRequest::Gap {
                population: p.population()?,
                year: p.year()?,
                program_scope: scope,
                reference_scope: p.scope("reference", FieldScope::AllDegrees)?,
            },
            Endpoint::Evenness => {
                let axis = p.one("axis").map(Axis::parse).transpose()?;
                let institutions = p.all("institution");
                match (p.one("years"), p.one("year")) {
                    (Some(_), Some(_)) => return Err(Error::invalid("year", "give either year or years, not both")),
                    (Some(_), None) => {
                        let [institution] = institutions.as_slice() else {
                            return Err(Error::invalid(
                                "institution",
                                "an evenness series needs exactly one institution",
                            ));
                        };
                        AnalysisRequest::EvennessSeries {
                            institution: institution.clone(),
                            axis: axis.ok_or_else(|| Error::invalid("axis", "required for an evenness series"))?,
                            years: p.years()?,
                            scope,
                            award_level: p.award()?,
                        }
                    }
                    (None, _) if institutions.len() == 1 && axis.is_some() => AnalysisRequest::EvennessSeries {
                        institution: institutions[0].clone(),
                        axis: axis.unwrap_or(Axis::Intersectional),
                        years: p.year()?.map(YearRange::single),
                        scope,
                        award_level: p.award()?,
                    },
                    (None, _) => AnalysisRequest::EvennessComparison {
                        institutions,
                        year: p.year()?,
                        scope,
                        award_level: p.award()?,
                    },
                }
            }
            Endpoint::JsDistance => {
                let reference_scope = p.scope("reference", FieldScope::AllDegrees)?;
                match p.one("breakdown") {
                    Some(institution) => AnalysisRequest::Distributions {
                        institution: institution.trim().to_string(),
                        year: p.year()?,
                        program_scope: scope,
                        reference_scope,
                        award_level: p.award()?,
                    },
                    None => AnalysisRequest::JsDistance {
                        institutions: p.all("institution"),
                        year: p.year()?,
                        program_scope: scope,
                        reference_scope,
                        award_level: p.award()?,
                    },
                }
            }
            Endpoint::Compare => {
                let metrics = p
                    .pairs
                    .iter()
                    .filter(|(n, _)| n == "metric")
                    .map(|(_, v)| v.clone())
                    .collect::<Vec<_>>();
                if metrics.is_empty() {
                    return Err(Error::invalid("metric", "compare needs at least one metric:group"));
                }
                AnalysisRequest::Compare {
                    institutions: p.all("institution"),
                    year: p.year()?,
                    scope,
                    metrics,
                    award_level: p.award()?,
                }
            }
        })
    }
}

/// Parses `cohort:Hispanic,Women` into a comparison metric.
pub fn parse_metric_spec(scheme: &CategoryScheme, spec: &str) -> Result<MetricSpec> {
    let (metric, group) = spec.split_once(':').ok_or_else(|| {
        Error::invalid(
            "metric",
            format!("`{spec}` (expected metric:group, e.g. cohort:Hispanic,Women)"),
        )
    })?;
    Ok(MetricSpec {
        metric: Metric::parse(metric)?,
        group: scheme.parse_group(group)?,
    })
}

/// Every analysis result, tagged by kind.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "report", rename_all = "snake_case")]
pub enum Report {
    Share(ShareReport),
    Series(SeriesReport),
    Gap(GapReport),
    EvennessSeries(EvennessReport),
    EvennessComparison(EvennessComparison),
    JsDistance(JsDistanceReport),
    Distributions(DistributionPair),
    Comparison(ComparisonReport),
    Institutions(InstitutionList),
    Scheme(SchemeSummary),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstitutionList {
    pub institutions: Vec<InstitutionInfo>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeSummary {
    pub genders: Vec<String>,
    pub races: Vec<String>,
    pub cells: Vec<String>,
    pub k_gender: usize,
    pub k_race: usize,
    pub k_intersectional: usize,
}

impl SchemeSummary {
    pub fn of(scheme: &CategoryScheme) -> Self {
        Self {
            genders: scheme.genders().to_vec(),
            races: scheme.races().to_vec(),
            cells: scheme.labels(Axis::Intersectional),
            k_gender: scheme.category_count(Axis::Gender),
            k_race: scheme.category_count(Axis::Race),
            k_intersectional: scheme.category_count(Axis::Intersectional),
        }
    }
}

/// A report stamped with the digest of the dataset snapshot it came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Response {
    pub dataset_digest: String,
    #[serde(flatten)]
    pub report: Report,
}

impl Response {
    pub fn new(ds: &Dataset, report: Report) -> Self {
        Self {
            dataset_digest: ds.digest().to_string(),
            report,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize to JSON")
    }
}

fn latest_year(ds: &Dataset) -> Result<i32> {
    ds.records()
        .iter()
        .map(|r| r.year)
        .max()
        .ok_or_else(|| Error::zero_population("dataset has no records"))
}

fn full_span(ds: &Dataset) -> Result<YearRange> {
    let end = latest_year(ds)?;
    let start = ds.records().iter().map(|r| r.year).min().unwrap_or(end);
    YearRange::new(start, end)
}

fn all_or(ds: &Dataset, institutions: &[String]) -> Vec<String> {
    if institutions.is_empty() {
        ds.institution_ids().map(String::from).collect()
    } else {
        institutions.to_vec()
    }
}

fn check_institutions(ds: &Dataset, ids: &[String]) -> Result<()> {
    match ids.iter().find(|id| !ds.has_institution(id)) {
        Some(id) => Err(Error::UnknownInstitution { id: id.clone() }),
        None => Ok(()),
    }
}

fn year_or_latest(ds: &Dataset, year: Option<i32>) -> Result<i32> {
    year.map(Ok).unwrap_or_else(|| latest_year(ds))
}

/// Runs a request against one dataset snapshot.
pub fn execute(ds: &Dataset, request: &AnalysisRequest) -> Result<Response> {
    let scheme = ds.scheme();
    let report = match request {
        AnalysisRequest::Share {
            metric,
            group,
            population,
            year,
            scope,
        } => {
            let group = scheme.parse_group(group)?;
            let year = year_or_latest(ds, *year)?;
            Report::Share(analysis::share(ds, *metric, &group, population, scope, year)?)
        }
        AnalysisRequest::Series {
            metric,
            group,
            population,
            years,
            scope,
        } => {
            let group = scheme.parse_group(group)?;
            let years = years.map(Ok).unwrap_or_else(|| full_span(ds))?;
            Report::Series(analysis::series(ds, *metric, &group, population, scope, years)?)
        }
        AnalysisRequest::Gap {
            population,
            year,
            program_scope,
            reference_scope,
        } => {
            let year = year_or_latest(ds, *year)?;
            Report::Gap(analysis::gap_report(
                ds,
                population,
                year,
                program_scope,
                reference_scope,
            )?)
        }
        AnalysisRequest::EvennessSeries {
            institution,
            axis,
            years,
            scope,
            award_level,
        } => {
            let years = years.map(Ok).unwrap_or_else(|| full_span(ds))?;
            Report::EvennessSeries(analysis::evenness_series(
                ds,
                institution,
                *axis,
                scope,
                years,
                *award_level,
            )?)
        }
        AnalysisRequest::EvennessComparison {
            institutions,
            year,
            scope,
            award_level,
        } => {
            let ids = all_or(ds, institutions);
            check_institutions(ds, &ids)?;
            let year = year_or_latest(ds, *year)?;
            Report::EvennessComparison(analysis::evenness_comparison(ds, &ids, year, scope, *award_level)?)
        }
        AnalysisRequest::JsDistance {
            institutions,
            year,
            program_scope,
            reference_scope,
            award_level,
        } => {
            let ids = all_or(ds, institutions);
            check_institutions(ds, &ids)?;
            let year = year_or_latest(ds, *year)?;
            Report::JsDistance(analysis::js_distance_report(
                ds,
                &ids,
                year,
                program_scope,
                reference_scope,
                *award_level,
            )?)
        }
        AnalysisRequest::Distributions {
            institution,
            year,
            program_scope,
            reference_scope,
            award_level,
        } => {
            let year = year_or_latest(ds, *year)?;
            Report::Distributions(analysis::distribution_pair(
                ds,
                institution,
                year,
                program_scope,
                reference_scope,
                *award_level,
            )?)
        }
        AnalysisRequest::Compare {
            institutions,
            year,
            scope,
            metrics,
            award_level,
        } => {
            let ids = all_or(ds, institutions);
            let year = year_or_latest(ds, *year)?;
            let specs = metrics
                .iter()
                .map(|m| parse_metric_spec(scheme, m))
                .collect::<Result<Vec<_>>>()?;
            Report::Comparison(analysis::compare_institutions(
                ds,
                &ids,
                year,
                scope,
                &specs,
                *award_level,
            )?)
        }
    };
    Ok(Response::new(ds, report))
}

pub fn institutions(ds: &Dataset) -> Response {
    Response::new(
        ds,
        Report::Institutions(InstitutionList {
            institutions: ds.institutions(),
        }),
    )
}

pub fn scheme(ds: &Dataset) -> Response {
    Response::new(ds, Report::Scheme(SchemeSummary::of(ds.scheme())))
}

/// One decimal place, the precision used for human-facing tables.
pub fn one_decimal(value: f64) -> String {
    format!("{value:.1}")
}

fn aligned(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, cells: &mut dyn Iterator<Item = &str>| {
        let parts: Vec<String> = cells
            .zip(&widths)
            .enumerate()
            .map(|(i, (c, &w))| {
                let numeric = i > 0 && c.parse::<f64>().is_ok();
                if numeric {
                    format!("{c:>w$}")
                } else {
                    format!("{c:<w$}")
                }
            })
            .collect();
        out.push_str(parts.join("  ").trim_end());
        out.push('\n');
    };
    line(&mut out, &mut header.iter().copied());
    for row in rows {
        line(&mut out, &mut row.iter().map(String::as_str));
    }
    out
}

fn warnings_text(out: &mut String, warnings: &[Warning]) {
    for w in warnings {
        let at = match (&w.institution, w.year) {
            (Some(i), Some(y)) => format!("{i} {y}: "),
            (Some(i), None) => format!("{i}: "),
            (None, Some(y)) => format!("{y}: "),
            (None, None) => String::new(),
        };
        let _ = writeln!(out, "warning: {at}{} ({})", w.reason, w.message);
    }
}

impl Report {
    /// Aligned plain-text table with one-decimal percentages.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match self {
            Report::Share(r) => {
                let who = if r.institutions.is_empty() {
                    "all institutions".to_string()
                } else {
                    r.institutions.join("+")
                };
                let _ = writeln!(
                    out,
                    "{} of {} at {} in {} ({}):",
                    r.metric, r.group, who, r.year, r.scope
                );
                let _ = writeln!(out, "{}", one_decimal(r.value));
            }
            Report::Series(r) => {
                let rows: Vec<_> = r
                    .points
                    .iter()
                    .map(|p| vec![p.year.to_string(), one_decimal(p.value)])
                    .collect();
                let _ = writeln!(out, "{} of {} ({}):", r.metric, r.group, r.scope);
                out.push_str(&aligned(&["year", "percent"], &rows));
                warnings_text(&mut out, &r.warnings);
            }
            Report::Gap(r) => {
                let rows: Vec<_> = r
                    .rows
                    .iter()
                    .map(|g| {
                        vec![
                            g.cell.to_string(),
                            one_decimal(g.program_share),
                            one_decimal(g.university_share),
                            one_decimal(g.gap),
                        ]
                    })
                    .collect();
                out.push_str(&aligned(&["cell", "program", "university", "gap"], &rows));
            }
            Report::EvennessSeries(r) => {
                let _ = writeln!(
                    out,
                    "{} evenness at {} (k = {}, {}):",
                    r.axis, r.institution, r.k, r.scope
                );
                let rows: Vec<_> = r
                    .points
                    .iter()
                    .map(|p| vec![p.year.to_string(), one_decimal(p.value)])
                    .collect();
                out.push_str(&aligned(&["year", "evenness"], &rows));
                warnings_text(&mut out, &r.warnings);
            }
            Report::EvennessComparison(r) => {
                let rows: Vec<_> = r
                    .rows
                    .iter()
                    .map(|t| {
                        vec![
                            t.institution_id.clone(),
                            one_decimal(t.gender),
                            one_decimal(t.race),
                            one_decimal(t.intersectional),
                        ]
                    })
                    .collect();
                out.push_str(&aligned(&["institution", "gender", "race", "intersectional"], &rows));
                warnings_text(&mut out, &r.warnings);
            }
            Report::JsDistance(r) => {
                let rows: Vec<_> = r
                    .rows
                    .iter()
                    .map(|j| vec![j.institution_id.clone(), format!("{:.4}", j.distance)])
                    .collect();
                out.push_str(&aligned(&["institution", "js_distance"], &rows));
                warnings_text(&mut out, &r.warnings);
            }
            Report::Distributions(r) => {
                let _ = writeln!(out, "{} {} (js distance {:.4}):", r.institution, r.year, r.distance);
                let rows: Vec<_> = r
                    .program
                    .labels()
                    .iter()
                    .zip(r.program.probabilities().iter().zip(r.reference.probabilities()))
                    .map(|(l, (p, q))| vec![l.clone(), one_decimal(100.0 * p), one_decimal(100.0 * q)])
                    .collect();
                out.push_str(&aligned(&["cell", "program", "reference"], &rows));
            }
            Report::Comparison(r) => {
                let mut header = vec!["metric"];
                header.extend(r.institutions.iter().map(String::as_str));
                let rows: Vec<_> = r
                    .metrics
                    .iter()
                    .map(|m| {
                        let mut row = vec![m.clone()];
                        for id in &r.institutions {
                            let cell = r.rows.iter().find(|c| &c.metric == m && &c.institution_id == id);
                            row.push(match cell {
                                Some(c) => c
                                    .value
                                    .map(one_decimal)
                                    .unwrap_or_else(|| c.error.clone().unwrap_or_else(|| "-".into())),
                                None => "-".into(),
                            });
                        }
                        row
                    })
                    .collect();
                out.push_str(&aligned(&header, &rows));
            }
            Report::Institutions(r) => {
                let rows: Vec<_> = r
                    .institutions
                    .iter()
                    .map(|i| vec![i.id.clone(), i.name.clone().unwrap_or_default(), i.years.to_string()])
                    .collect();
                out.push_str(&aligned(&["id", "name", "years"], &rows));
            }
            Report::Scheme(s) => {
                let _ = writeln!(out, "genders ({}): {}", s.k_gender, s.genders.join(", "));
                let _ = writeln!(out, "races ({}): {}", s.k_race, s.races.join(", "));
                let _ = writeln!(out, "cells: {}", s.k_intersectional);
            }
        }
        out
    }

    /// Flat CSV with full-precision numbers.
    pub fn to_csv(&self) -> Result<String> {
        if let Some(payload) = crate::chart::ChartPayload::from_report(self) {
            return payload.to_csv();
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        match self {
            Report::Share(r) => {
                w.write_record(["metric", "group", "year", "scope", "value", "numerator", "denominator"])?;
                w.write_record([
                    r.metric.to_string(),
                    r.group.clone(),
                    r.year.to_string(),
                    r.scope.clone(),
                    r.value.to_string(),
                    r.numerator.to_string(),
                    r.denominator.to_string(),
                ])?;
            }
            Report::JsDistance(r) => {
                w.write_record(["institution_id", "distance", "divergence"])?;
                for j in &r.rows {
                    w.write_record([
                        j.institution_id.clone(),
                        j.distance.to_string(),
                        j.divergence.to_string(),
                    ])?;
                }
            }
            Report::Comparison(r) => {
                w.write_record(["metric", "institution_id", "value", "error"])?;
                for c in &r.rows {
                    w.write_record([
                        c.metric.clone(),
                        c.institution_id.clone(),
                        c.value.map(|v| v.to_string()).unwrap_or_default(),
                        c.error.clone().unwrap_or_default(),
                    ])?;
                }
            }
            Report::Institutions(r) => {
                w.write_record(["id", "name", "first_year", "last_year"])?;
                for i in &r.institutions {
                    w.write_record([
                        i.id.clone(),
                        i.name.clone().unwrap_or_default(),
                        i.years.start.to_string(),
                        i.years.end.to_string(),
                    ])?;
                }
            }
            Report::Scheme(s) => {
                w.write_record(["axis", "label"])?;
                for g in &s.genders {
                    w.write_record(["gender", g])?;
                }
                for r in &s.races {
                    w.write_record(["race", r])?;
                }
            }
            _ => unreachable!("chartable reports are handled above"),
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv writer emits UTF-8"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(items: &[(&str, &str)]) -> Vec<(String, String)> {
        items.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    #[test]
    fn unknown_and_duplicate_parameters_rejected() {
        let err =
            AnalysisRequest::from_params(Endpoint::Cohort, &pairs(&[("group", "Women"), ("colour", "x")])).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { ref parameter, .. } if parameter == "colour"));
        let err = AnalysisRequest::from_params(
            Endpoint::Cohort,
            &pairs(&[("group", "Women"), ("year", "1"), ("year", "2")]),
        )
        .unwrap_err();
        assert_eq!(err.name(), "invalid_parameter");
    }

    #[test]
    fn missing_group_is_reported_by_name() {
        let err = AnalysisRequest::from_params(Endpoint::Standard, &[]).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { ref parameter, .. } if parameter == "group"));
    }

    #[test]
    fn scope_errors_name_the_parameter() {
        let err = AnalysisRequest::from_params(Endpoint::Gap, &pairs(&[("reference", "bogus")])).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { ref parameter, .. } if parameter == "reference"));
    }

    #[test]
    fn evenness_shapes() {
        let series = AnalysisRequest::from_params(
            Endpoint::Evenness,
            &pairs(&[("axis", "race"), ("institution", "U"), ("years", "2010-2019")]),
        )
        .unwrap();
        assert!(matches!(
            series,
            AnalysisRequest::EvennessSeries { axis: Axis::Race, .. }
        ));
        let cmp = AnalysisRequest::from_params(Endpoint::Evenness, &pairs(&[("year", "2020")])).unwrap();
        assert!(matches!(
            cmp,
            AnalysisRequest::EvennessComparison { year: Some(2020), .. }
        ));
        let err = AnalysisRequest::from_params(
            Endpoint::Evenness,
            &pairs(&[
                ("axis", "race"),
                ("institution", "A"),
                ("institution", "B"),
                ("years", "2010-2011"),
            ]),
        )
        .unwrap_err();
        assert_eq!(err.name(), "invalid_parameter");
    }

    #[test]
    fn award_parameter() {
        let r = AnalysisRequest::from_params(Endpoint::Gap, &pairs(&[("award", "all")])).unwrap();
        assert!(matches!(
            r,
            AnalysisRequest::Gap {
                population: Population { award_level: None, .. },
                ..
            }
        ));
        assert!(AnalysisRequest::from_params(Endpoint::Gap, &pairs(&[("award", "nope")])).is_err());
    }

    #[test]
    fn metric_specs() {
        let scheme = CategoryScheme::default();
        let spec = parse_metric_spec(&scheme, "cohort:Hispanic,Women").unwrap();
        assert_eq!(spec.metric, Metric::CohortShare);
        assert!(parse_metric_spec(&scheme, "cohort").is_err());
        assert_eq!(
            parse_metric_spec(&scheme, "cohort:Martians").unwrap_err().name(),
            "unknown_group"
        );
    }

    #[test]
    fn aligned_text_pads_columns() {
        let text = aligned(
            &["a", "value"],
            &[vec!["long name".into(), "1.5".into()], vec!["x".into(), "10.0".into()]],
        );
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[1], "long name    1.5");
        assert_eq!(lines[2], "x           10.0");
    }
}
