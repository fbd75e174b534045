//! The four views on participation: standard shares, cohort shares,
//! program-versus-university opportunity gaps, and entropy summaries
//! (evenness and Jensen-Shannon distance).
//!
//! Table-level operations ([`standard_share`], [`cohort_share`],
//! [`opportunity_gap`]) are pure functions of count tables. Dataset-level
//! operations select and aggregate records first and return report types
//! that carry their own warnings: years or institutions that could not be
//! computed are omitted and listed, never zero-filled.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{equitability, jensen_shannon_divergence};
use crate::scheme::{Axis, Cell, Group};
use crate::store::Dataset;
use crate::table::{AwardLevel, CountTable, Distribution, FieldScope, Selection, YearRange};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    StandardShare,
    CohortShare,
    Evenness,
    JsDistance,
}

impl Metric {
    pub fn as_str(&self) -> &'static str {
        match self {
            Metric::StandardShare => "standard_share",
            Metric::CohortShare => "cohort_share",
            Metric::Evenness => "evenness",
            Metric::JsDistance => "js_distance",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_lowercase().as_str() {
            "standard" | "standard_share" => Ok(Metric::StandardShare),
            "cohort" | "cohort_share" => Ok(Metric::CohortShare),
            "evenness" => Ok(Metric::Evenness),
            "jsdistance" | "js_distance" => Ok(Metric::JsDistance),
            other => Err(Error::invalid(
                "metric",
                format!("`{other}` (expected standard, cohort, evenness or jsdistance)"),
            )),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A skipped year or institution, with the error that caused the skip.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Warning {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub year: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub institution: Option<String>,
    pub reason: String,
    pub message: String,
}

impl Warning {
    fn from_error(year: Option<i32>, institution: Option<&str>, err: &Error) -> Self {
        Self {
            year,
            institution: institution.map(String::from),
            reason: err.name().to_string(),
            message: err.to_string(),
        }
    }
}

/// One chart-ready observation. Shares and evenness are percents; JS
/// distance points carry the raw distance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub year: i32,
    pub value: f64,
    pub group: String,
    pub metric: Metric,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub cell: Cell,
    /// Percent of program degrees.
    pub program_share: f64,
    /// Percent of all university degrees.
    pub university_share: f64,
    /// `program_share - university_share`, in percentage points.
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub institution_id: String,
    pub metric: String,
    pub value: Option<f64>,
    /// Error name when the value could not be computed (e.g. `empty_cohort`).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

/// Gender, race and intersectional evenness (percent) for one institution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvennessTriple {
    pub institution_id: String,
    pub gender: f64,
    pub race: f64,
    pub intersectional: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsDistanceRow {
    pub institution_id: String,
    pub distance: f64,
    pub divergence: f64,
}

/// Which graduates an analysis looks at, beyond field scope and years.
/// An empty institution list pools every institution in the dataset.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Population {
    pub institutions: Vec<String>,
    pub award_level: Option<AwardLevel>,
}

impl Default for Population {
    fn default() -> Self {
        Self {
            institutions: Vec::new(),
            award_level: Some(AwardLevel::Bachelors),
        }
    }
}

impl Population {
    pub fn institutions<I, S>(ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            institutions: ids.into_iter().map(Into::into).collect(),
            ..Self::default()
        }
    }

    pub fn selection(&self, scope: &FieldScope, years: YearRange) -> Selection {
        Selection::new(scope.clone())
            .institutions(self.institutions.iter().cloned())
            .years(years)
            .award_level(self.award_level)
    }

    fn check(&self, ds: &Dataset) -> Result<()> {
        match self.institutions.iter().find(|id| !ds.has_institution(id)) {
            Some(id) => Err(Error::UnknownInstitution { id: id.clone() }),
            None => Ok(()),
        }
    }
}

fn percent(part: u64, whole: u64) -> f64 {
    100.0 * part as f64 / whole as f64
}

/// Group's share of the field's degrees, in percent.
pub fn standard_share(field_table: &CountTable, group: &Group) -> Result<f64> {
    if field_table.total() == 0 {
        return Err(Error::zero_population(format!("no field degrees for `{group}`")));
    }
    Ok(percent(field_table.group_count(group)?, field_table.total()))
}

/// Group's field degrees as a percent of the group's degrees in all fields.
///
/// Depends only on the group's own two counts.
pub fn cohort_share(field_table: &CountTable, all_table: &CountTable, group: &Group) -> Result<f64> {
    let cohort = all_table.group_count(group)?;
    if cohort == 0 {
        return Err(Error::EmptyCohort {
            group: group.to_string(),
            context: String::new(),
        });
    }
    let field = field_table.group_count(group)?;
    if field > cohort {
        return Err(Error::invalid(
            "scope",
            format!("`{group}` has {field} field degrees but only {cohort} degrees overall"),
        ));
    }
    Ok(percent(field, cohort))
}

/// One row per intersectional cell, largest deficit first.
pub fn opportunity_gap(program_table: &CountTable, university_table: &CountTable) -> Result<Vec<GapRow>> {
    if program_table.total() == 0 {
        return Err(Error::zero_population("program table"));
    }
    if university_table.total() == 0 {
        return Err(Error::zero_population("university table"));
    }
    if program_table.scheme() != university_table.scheme()
        || program_table.axis() != Axis::Intersectional
        || university_table.axis() != Axis::Intersectional
    {
        return Err(Error::CategoryMismatch {
            reason: "gap tables must be intersectional over one scheme".into(),
        });
    }
    let mut rows: Vec<GapRow> = program_table
        .scheme()
        .cells()
        .zip(program_table.counts().iter().zip(university_table.counts()))
        .map(|(cell, (&p, &u))| {
            let program_share = percent(p, program_table.total());
            let university_share = percent(u, university_table.total());
            GapRow {
                cell,
                program_share,
                university_share,
                gap: program_share - university_share,
            }
        })
        .collect();
    rows.sort_by(|a, b| a.gap.partial_cmp(&b.gap).unwrap_or(Ordering::Equal));
    Ok(rows)
}

/// A single standard or cohort share.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShareReport {
    pub metric: Metric,
    pub group: String,
    pub institutions: Vec<String>,
    pub year: i32,
    pub scope: String,
    pub value: f64,
    pub numerator: u64,
    pub denominator: u64,
}

pub fn share(
    ds: &Dataset,
    metric: Metric,
    group: &Group,
    population: &Population,
    scope: &FieldScope,
    year: i32,
) -> Result<ShareReport> {
    population.check(ds)?;
    let years = YearRange::single(year);
    let field = ds.table(&population.selection(scope, years))?;
    let (value, denominator) = match metric {
        Metric::StandardShare => (standard_share(&field, group)?, field.total()),
        Metric::CohortShare => {
            let all = ds.table(&population.selection(&FieldScope::AllDegrees, years))?;
            (cohort_share(&field, &all, group)?, all.group_count(group)?)
        }
        other => return Err(Error::invalid("metric", format!("{other} is not a share metric"))),
    };
    Ok(ShareReport {
        metric,
        group: group.to_string(),
        institutions: population.institutions.clone(),
        year,
        scope: scope.to_string(),
        value,
        numerator: field.group_count(group)?,
        denominator,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub metric: Metric,
    pub group: String,
    pub institutions: Vec<String>,
    pub scope: String,
    pub years: YearRange,
    pub points: Vec<SeriesPoint>,
    pub warnings: Vec<Warning>,
}

/// Yearly standard or cohort shares for one group.
pub fn series(
    ds: &Dataset,
    metric: Metric,
    group: &Group,
    population: &Population,
    scope: &FieldScope,
    years: YearRange,
) -> Result<SeriesReport> {
    population.check(ds)?;
    if !matches!(metric, Metric::StandardShare | Metric::CohortShare) {
        return Err(Error::invalid(
            "metric",
            format!("{metric} series are produced by the evenness and jsdistance analyses"),
        ));
    }
    let mut points = Vec::new();
    let mut warnings = Vec::new();
    for year in years.years() {
        let y = YearRange::single(year);
        let field = ds.table(&population.selection(scope, y))?;
        let value = match metric {
            Metric::StandardShare => standard_share(&field, group),
            _ => ds
                .table(&population.selection(&FieldScope::AllDegrees, y))
                .and_then(|all| cohort_share(&field, &all, group)),
        };
        match value {
            Ok(value) => points.push(SeriesPoint {
                year,
                value,
                group: group.to_string(),
                metric,
            }),
            Err(e @ (Error::ZeroPopulation { .. } | Error::EmptyCohort { .. })) => {
                warnings.push(Warning::from_error(Some(year), None, &e))
            }
            Err(e) => return Err(e),
        }
    }
    Ok(SeriesReport {
        metric,
        group: group.to_string(),
        institutions: population.institutions.clone(),
        scope: scope.to_string(),
        years,
        points,
        warnings,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub institutions: Vec<String>,
    pub year: i32,
    pub program_scope: String,
    pub reference_scope: String,
    pub rows: Vec<GapRow>,
}

pub fn gap_report(
    ds: &Dataset,
    population: &Population,
    year: i32,
    program_scope: &FieldScope,
    reference_scope: &FieldScope,
) -> Result<GapReport> {
    population.check(ds)?;
    let y = YearRange::single(year);
    let program = ds.table(&population.selection(program_scope, y))?;
    let reference = ds.table(&population.selection(reference_scope, y))?;
    Ok(GapReport {
        institutions: population.institutions.clone(),
        year,
        program_scope: program_scope.to_string(),
        reference_scope: reference_scope.to_string(),
        rows: opportunity_gap(&program, &reference)?,
    })
}

fn evenness_of(table: &CountTable, axis: Axis) -> Result<f64> {
    let k = table.scheme().category_count(axis);
    let dist = table.marginalize(axis)?.normalize()?;
    Ok(equitability(&dist, k)?.percent())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvennessReport {
    pub institution: String,
    pub axis: Axis,
    pub k: usize,
    pub scope: String,
    pub years: YearRange,
    pub points: Vec<SeriesPoint>,
    pub warnings: Vec<Warning>,
}

/// Yearly Shannon Equitability (percent) for one institution along one
/// axis. `k` is fixed by the scheme: 2, 7 or 14 by default.
pub fn evenness_series(
    ds: &Dataset,
    institution: &str,
    axis: Axis,
    scope: &FieldScope,
    years: YearRange,
    award_level: Option<AwardLevel>,
) -> Result<EvennessReport> {
    let population = Population {
        award_level,
        ..Population::institutions([institution])
    };
    population.check(ds)?;
    let k = ds.scheme().category_count(axis);
    let mut points = Vec::new();
    let mut warnings = Vec::new();
    for year in years.years() {
        let table = ds.table(&population.selection(scope, YearRange::single(year)))?;
        match evenness_of(&table, axis) {
            Ok(value) => points.push(SeriesPoint {
                year,
                value,
                group: axis.to_string(),
                metric: Metric::Evenness,
            }),
            Err(e @ Error::ZeroPopulation { .. }) => warnings.push(Warning::from_error(Some(year), None, &e)),
            Err(e) => return Err(e),
        }
    }
    Ok(EvennessReport {
        institution: institution.to_string(),
        axis,
        k,
        scope: scope.to_string(),
        years,
        points,
        warnings,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvennessComparison {
    pub year: i32,
    pub scope: String,
    pub rows: Vec<EvennessTriple>,
    pub warnings: Vec<Warning>,
}

/// Evenness along all three axes for several institutions in one year, in
/// the order given.
pub fn evenness_comparison(
    ds: &Dataset,
    institutions: &[String],
    year: i32,
    scope: &FieldScope,
    award_level: Option<AwardLevel>,
) -> Result<EvennessComparison> {
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for id in institutions {
        let population = Population {
            award_level,
            ..Population::institutions([id.as_str()])
        };
        population.check(ds)?;
        let table = ds.table(&population.selection(scope, YearRange::single(year)))?;
        let triple = (|| -> Result<EvennessTriple> {
            Ok(EvennessTriple {
                institution_id: id.clone(),
                gender: evenness_of(&table, Axis::Gender)?,
                race: evenness_of(&table, Axis::Race)?,
                intersectional: evenness_of(&table, Axis::Intersectional)?,
            })
        })();
        match triple {
            Ok(t) => rows.push(t),
            Err(e @ Error::ZeroPopulation { .. }) => warnings.push(Warning::from_error(Some(year), Some(id), &e)),
            Err(e) => return Err(e),
        }
    }
    Ok(EvennessComparison {
        year,
        scope: scope.to_string(),
        rows,
        warnings,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsDistanceReport {
    pub year: i32,
    pub program_scope: String,
    pub reference_scope: String,
    /// Largest distance first.
    pub rows: Vec<JsDistanceRow>,
    pub warnings: Vec<Warning>,
}

fn intersectional_pair(
    ds: &Dataset,
    institution: &str,
    year: i32,
    program_scope: &FieldScope,
    reference_scope: &FieldScope,
    award_level: Option<AwardLevel>,
) -> Result<(Distribution, Distribution)> {
    let population = Population {
        award_level,
        ..Population::institutions([institution])
    };
    let y = YearRange::single(year);
    let program = ds.table(&population.selection(program_scope, y))?;
    let reference = ds.table(&population.selection(reference_scope, y))?;
    Ok((program.normalize()?, reference.normalize()?))
}

/// Jensen-Shannon distance between each institution's program and
/// reference intersectional distributions, ranked from largest to smallest.
/// Institutions with an empty program or reference are skipped with a
/// warning.
pub fn js_distance_report(
    ds: &Dataset,
    institutions: &[String],
    year: i32,
    program_scope: &FieldScope,
    reference_scope: &FieldScope,
    award_level: Option<AwardLevel>,
) -> Result<JsDistanceReport> {
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for id in institutions {
        if !ds.has_institution(id) {
            warnings.push(Warning::from_error(
                Some(year),
                Some(id),
                &Error::UnknownInstitution { id: id.clone() },
            ));
            continue;
        }
        let divergence = intersectional_pair(ds, id, year, program_scope, reference_scope, award_level)
            .and_then(|(p, q)| jensen_shannon_divergence(&p, &q));
        match divergence {
            Ok(jsd) => rows.push(JsDistanceRow {
                institution_id: id.clone(),
                distance: jsd.value().sqrt(),
                divergence: jsd.value(),
            }),
            Err(e @ Error::ZeroPopulation { .. }) => warnings.push(Warning::from_error(Some(year), Some(id), &e)),
            Err(e) => return Err(e),
        }
    }
    rows.sort_by(|a, b| {
        b.distance
            .partial_cmp(&a.distance)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.institution_id.cmp(&b.institution_id))
    });
    Ok(JsDistanceReport {
        year,
        program_scope: program_scope.to_string(),
        reference_scope: reference_scope.to_string(),
        rows,
        warnings,
    })
}

/// Program and reference distributions side by side, for breaking a JS
/// distance down by cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionPair {
    pub institution: String,
    pub year: i32,
    pub program_scope: String,
    pub reference_scope: String,
    pub program: Distribution,
    pub reference: Distribution,
    pub distance: f64,
}

pub fn distribution_pair(
    ds: &Dataset,
    institution: &str,
    year: i32,
    program_scope: &FieldScope,
    reference_scope: &FieldScope,
    award_level: Option<AwardLevel>,
) -> Result<DistributionPair> {
    Population::institutions([institution]).check(ds)?;
    let (program, reference) = intersectional_pair(ds, institution, year, program_scope, reference_scope, award_level)?;
    let distance = jensen_shannon_divergence(&program, &reference)?.value().sqrt();
    Ok(DistributionPair {
        institution: institution.to_string(),
        year,
        program_scope: program_scope.to_string(),
        reference_scope: reference_scope.to_string(),
        program,
        reference,
        distance,
    })
}

/// One requested cell of an institution comparison table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricSpec {
    pub metric: Metric,
    pub group: Group,
}

impl MetricSpec {
    pub fn label(&self) -> String {
        format!("{} {}", self.metric, self.group)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub year: i32,
    pub scope: String,
    pub institutions: Vec<String>,
    pub metrics: Vec<String>,
    /// Metric-major: all institutions for the first metric, then the next.
    pub rows: Vec<ComparisonRow>,
}

/// Side-by-side standard/cohort shares, shaped like a metrics-by-institution
/// table. Cells that cannot be computed carry an error name instead of a
/// value.
pub fn compare_institutions(
    ds: &Dataset,
    institutions: &[String],
    year: i32,
    scope: &FieldScope,
    specs: &[MetricSpec],
    award_level: Option<AwardLevel>,
) -> Result<ComparisonReport> {
    Population::institutions(institutions.iter().cloned()).check(ds)?;
    let mut rows = Vec::new();
    for spec in specs {
        if !matches!(spec.metric, Metric::StandardShare | Metric::CohortShare) {
            return Err(Error::invalid("metric", format!("{} cannot be compared", spec.metric)));
        }
        for id in institutions {
            let population = Population {
                award_level,
                ..Population::institutions([id.as_str()])
            };
            let (value, error) = match share(ds, spec.metric, &spec.group, &population, scope, year) {
                Ok(r) => (Some(r.value), None),
                Err(e @ (Error::ZeroPopulation { .. } | Error::EmptyCohort { .. })) => {
                    (None, Some(e.name().to_string()))
                }
                Err(e) => return Err(e),
            };
            rows.push(ComparisonRow {
                institution_id: id.clone(),
                metric: spec.label(),
                value,
                error,
            });
        }
    }
    Ok(ComparisonReport {
        year,
        scope: scope.to_string(),
        institutions: institutions.to_vec(),
        metrics: specs.iter().map(MetricSpec::label).collect(),
        rows,
    })
}
