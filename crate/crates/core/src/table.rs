//! Degree records, selections over them, and the count tables and
//! distributions every analysis is built from.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scheme::{Axis, CategoryScheme, Cell, Group};

/// Tolerance on the probability sum of a [`Distribution`].
pub const PROBABILITY_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AwardLevel {
    Certificate,
    Associates,
    #[default]
    Bachelors,
    Masters,
    Doctoral,
    Other,
}

impl AwardLevel {
    pub fn as_str(&self) -> &'static str {
        match self {
            AwardLevel::Certificate => "certificate",
            AwardLevel::Associates => "associates",
            AwardLevel::Bachelors => "bachelors",
            AwardLevel::Masters => "masters",
            AwardLevel::Doctoral => "doctoral",
            AwardLevel::Other => "other",
        }
    }

    /// Maps an IPEDS `AWLEVEL` code.
    pub fn from_ipeds_code(code: u32) -> Self {
        match code {
            1 | 2 | 4 | 6 | 8 | 20 | 21 => AwardLevel::Certificate,
            3 => AwardLevel::Associates,
            5 => AwardLevel::Bachelors,
            7 => AwardLevel::Masters,
            17..=19 => AwardLevel::Doctoral,
            _ => AwardLevel::Other,
        }
    }
}

impl FromStr for AwardLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_lowercase().as_str() {
            "certificate" => AwardLevel::Certificate,
            "associates" | "associate" => AwardLevel::Associates,
            "bachelors" | "bachelor" | "ba" | "bs" => AwardLevel::Bachelors,
            "masters" | "master" => AwardLevel::Masters,
            "doctoral" | "doctorate" => AwardLevel::Doctoral,
            "other" => AwardLevel::Other,
            other => return Err(Error::invalid("award_level", format!("unknown award level `{other}`"))),
        })
    }
}

impl fmt::Display for AwardLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// CIP family prefixes, e.g. `["11"]` for computing or `["11.07"]` for
/// computer science proper.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CipFilter {
    prefixes: Vec<String>,
}

impl Default for CipFilter {
    fn default() -> Self {
        Self::computing()
    }
}

impl CipFilter {
    pub fn computing() -> Self {
        Self {
            prefixes: vec!["11".to_string()],
        }
    }

    pub fn new<I, S>(prefixes: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let prefixes: Vec<String> = prefixes.into_iter().map(|p| p.into().trim().to_string()).collect();
        if prefixes.is_empty() {
            return Err(Error::invalid("scope", "empty CIP prefix list"));
        }
        for p in &prefixes {
            let digits = p.chars().filter(char::is_ascii_digit).count();
            let well_formed = p.chars().all(|c| c.is_ascii_digit() || c == '.')
                && p.chars().take(2).all(|c| c.is_ascii_digit())
                && digits >= 2;
            if !well_formed {
                return Err(Error::invalid("scope", format!("`{p}` is not a CIP prefix")));
            }
        }
        Ok(Self { prefixes })
    }

    pub fn prefixes(&self) -> &[String] {
        &self.prefixes
    }

    pub fn matches(&self, cip: &str) -> bool {
        self.prefixes.iter().any(|p| cip_has_prefix(cip, p))
    }
}

/// Prefix match on CIP structure: `11` matches `11` and `11.0701` but not `110`.
fn cip_has_prefix(cip: &str, prefix: &str) -> bool {
    match cip.strip_prefix(prefix) {
        Some("") => true,
        Some(rest) => prefix.contains('.') || rest.starts_with('.'),
        None => false,
    }
}

/// Which degrees count as "the field".
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldScope {
    #[default]
    ComputingCip11,
    AllDegrees,
    OtherField(CipFilter),
}

impl FieldScope {
    pub fn matches(&self, cip: &str) -> bool {
        match self {
            FieldScope::ComputingCip11 => cip_has_prefix(cip, "11"),
            FieldScope::AllDegrees => true,
            FieldScope::OtherField(filter) => filter.matches(cip),
        }
    }

    /// Parses `cip11`, `all`, or `cip:<prefix>[,<prefix>...]`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.to_lowercase().as_str() {
            "cip11" | "computing" | "cs" => return Ok(FieldScope::ComputingCip11),
            "all" | "all-degrees" | "alldegrees" => return Ok(FieldScope::AllDegrees),
            _ => {}
        }
        match s.strip_prefix("cip:") {
            Some(list) => Ok(FieldScope::OtherField(CipFilter::new(list.split(','))?)),
            None => Err(Error::invalid(
                "scope",
                format!("`{s}` (expected cip11, all, or cip:<prefixes>)"),
            )),
        }
    }
}

impl fmt::Display for FieldScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldScope::ComputingCip11 => f.write_str("cip11"),
            FieldScope::AllDegrees => f.write_str("all"),
            FieldScope::OtherField(filter) => write!(f, "cip:{}", filter.prefixes().join(",")),
        }
    }
}

/// Inclusive span of completion years.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct YearRange {
    pub start: i32,
    pub end: i32,
}

impl YearRange {
    pub fn new(start: i32, end: i32) -> Result<Self> {
        if start > end {
            return Err(Error::EmptyRange { start, end });
        }
        Ok(Self { start, end })
    }

    pub fn single(year: i32) -> Self {
        Self { start: year, end: year }
    }

    pub fn contains(&self, year: i32) -> bool {
        (self.start..=self.end).contains(&year)
    }

    pub fn years(&self) -> impl Iterator<Item = i32> {
        self.start..=self.end
    }

    /// Parses `2010-2019` or a single `2020`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::invalid("years", format!("`{s}` (expected YYYY or YYYY-YYYY)"));
        let (a, b) = match s.trim().split_once('-') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (s.trim(), s.trim()),
        };
        let start = a.parse().map_err(|_| bad())?;
        let end = b.parse().map_err(|_| bad())?;
        Self::new(start, end)
    }
}

impl fmt::Display for YearRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.start == self.end {
            write!(f, "{}", self.start)
        } else {
            write!(f, "{}-{}", self.start, self.end)
        }
    }
}

/// One aggregate observation: graduates of one cell, at one institution,
/// in one CIP program, award level and year.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DegreeRecord {
    pub institution_id: String,
    pub year: i32,
    pub cip: String,
    pub award_level: AwardLevel,
    pub cell: Cell,
    pub count: u64,
}

impl DegreeRecord {
    /// Two-digit CIP family, e.g. `11` for `11.0701`.
    pub fn cip_family(&self) -> &str {
        self.cip.split('.').next().unwrap_or(&self.cip)
    }

    pub fn is_computing(&self) -> bool {
        FieldScope::ComputingCip11.matches(&self.cip)
    }
}

/// Record filter. `None` fields match everything.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Selection {
    pub institutions: Option<BTreeSet<String>>,
    pub years: Option<YearRange>,
    pub scope: FieldScope,
    pub award_level: Option<AwardLevel>,
}

impl Selection {
    /// Bachelor's degrees in `scope`, all institutions, all years.
    pub fn new(scope: FieldScope) -> Self {
        Self {
            scope,
            award_level: Some(AwardLevel::Bachelors),
            ..Self::default()
        }
    }

    pub fn everything() -> Self {
        Self {
            scope: FieldScope::AllDegrees,
            ..Self::default()
        }
    }

    pub fn institution(mut self, id: impl Into<String>) -> Self {
        self.institutions = Some(BTreeSet::from([id.into()]));
        self
    }

    pub fn institutions<I, S>(mut self, ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = ids.into_iter().map(Into::into).collect();
        self.institutions = if set.is_empty() { None } else { Some(set) };
        self
    }

    pub fn year(mut self, year: i32) -> Self {
        self.years = Some(YearRange::single(year));
        self
    }

    pub fn years(mut self, years: YearRange) -> Self {
        self.years = Some(years);
        self
    }

    pub fn scope(mut self, scope: FieldScope) -> Self {
        self.scope = scope;
        self
    }

    pub fn award_level(mut self, level: Option<AwardLevel>) -> Self {
        self.award_level = level;
        self
    }

    pub fn matches(&self, record: &DegreeRecord) -> bool {
        self.institutions
            .as_ref()
            .is_none_or(|set| set.contains(&record.institution_id))
            && self.years.is_none_or(|y| y.contains(record.year))
            && self.award_level.is_none_or(|a| a == record.award_level)
            && self.scope.matches(&record.cip)
    }
}

/// Graduate counts over the categories of one axis of a scheme.
///
/// Intersectional tables hold one count per cell in [`CategoryScheme::cells`]
/// order; marginal tables hold one count per gender or race label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountTable {
    scheme: CategoryScheme,
    axis: Axis,
    counts: Vec<u64>,
    total: u64,
}

impl CountTable {
    pub fn zeros(scheme: CategoryScheme, axis: Axis) -> Self {
        let n = scheme.category_count(axis);
        Self {
            scheme,
            axis,
            counts: vec![0; n],
            total: 0,
        }
    }

    /// Table from counts in the axis's label order.
    pub fn from_counts(scheme: CategoryScheme, axis: Axis, counts: Vec<u64>) -> Result<Self> {
        let expected = scheme.category_count(axis);
        if counts.len() != expected {
            return Err(Error::CategoryMismatch {
                reason: format!("{} counts for {expected} {axis} categories", counts.len()),
            });
        }
        let total = counts.iter().sum();
        Ok(Self {
            scheme,
            axis,
            counts,
            total,
        })
    }

    /// Intersectional table from `(cell, count)` pairs; unnamed cells are zero.
    pub fn from_cells<'a, I>(scheme: CategoryScheme, cells: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a Cell, u64)>,
    {
        let mut table = Self::zeros(scheme, Axis::Intersectional);
        for (cell, count) in cells {
            table.add(cell, count)?;
        }
        Ok(table)
    }

    fn add(&mut self, cell: &Cell, count: u64) -> Result<()> {
        let idx = match self.scheme.cell_index(&cell.gender, &cell.race) {
            Some(idx) => idx,
            None if self.scheme.gender_index(&cell.gender).is_none() => {
                return Err(Error::SchemeMismatch {
                    label: cell.gender.clone(),
                    axis: "gender",
                })
            }
            None => {
                return Err(Error::SchemeMismatch {
                    label: cell.race.clone(),
                    axis: "race",
                })
            }
        };
        self.counts[idx] += count;
        self.total += count;
        Ok(())
    }

    pub fn scheme(&self) -> &CategoryScheme {
        &self.scheme
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn labels(&self) -> Vec<String> {
        self.scheme.labels(self.axis)
    }

    /// `(label, count)` pairs in table order.
    pub fn entries(&self) -> impl Iterator<Item = (String, u64)> + '_ {
        self.labels().into_iter().zip(self.counts.iter().copied())
    }

    /// Collapses an intersectional table onto one axis.
    ///
    /// A marginal table can only be "marginalized" onto its own axis (a
    /// no-op); asking a gender table for race totals is a category mismatch.
    pub fn marginalize(&self, axis: Axis) -> Result<CountTable> {
        if axis == self.axis {
            return Ok(self.clone());
        }
        if self.axis != Axis::Intersectional {
            return Err(Error::CategoryMismatch {
                reason: format!("cannot derive {axis} totals from a {} table", self.axis),
            });
        }
        let n_races = self.scheme.races().len();
        let mut counts = vec![0u64; self.scheme.category_count(axis)];
        for (i, &c) in self.counts.iter().enumerate() {
            let target = match axis {
                Axis::Gender => i / n_races,
                Axis::Race => i % n_races,
                Axis::Intersectional => unreachable!("handled above"),
            };
            counts[target] += c;
        }
        Ok(CountTable {
            scheme: self.scheme.clone(),
            axis,
            counts,
            total: self.total,
        })
    }

    /// Graduates belonging to `group`. Axis-level groups on an intersectional
    /// table are summed over the matching cells.
    pub fn group_count(&self, group: &Group) -> Result<u64> {
        let missing = |label: &str, axis: &'static str| Error::SchemeMismatch {
            label: label.to_string(),
            axis,
        };
        match (self.axis, group) {
            (Axis::Intersectional, Group::Cell(cell)) => {
                let idx = self
                    .scheme
                    .cell_index(&cell.gender, &cell.race)
                    .ok_or_else(|| missing(&cell.to_string(), "cell"))?;
                Ok(self.counts[idx])
            }
            (Axis::Intersectional, _) => self.marginalize(group.axis())?.group_count(group),
            (Axis::Gender, Group::Gender(g)) => {
                let idx = self.scheme.gender_index(g).ok_or_else(|| missing(g, "gender"))?;
                Ok(self.counts[idx])
            }
            (Axis::Race, Group::Race(r)) => {
                let idx = self.scheme.race_index(r).ok_or_else(|| missing(r, "race"))?;
                Ok(self.counts[idx])
            }
            (axis, group) => Err(Error::CategoryMismatch {
                reason: format!("group `{group}` cannot be read from a {axis} table"),
            }),
        }
    }

    /// Normalizes counts to a probability distribution: `p_k = N_k / N`.
    pub fn normalize(&self) -> Result<Distribution> {
        normalize(self)
    }
}

/// Free-function form of [`CountTable::marginalize`].
pub fn marginalize(table: &CountTable, axis: Axis) -> Result<CountTable> {
    table.marginalize(axis)
}

pub fn normalize(table: &CountTable) -> Result<Distribution> {
    if table.total == 0 {
        return Err(Error::zero_population(format!("{} table", table.axis)));
    }
    let n = table.total as f64;
    Ok(Distribution {
        axis: table.axis,
        labels: table.labels(),
        probabilities: table.counts.iter().map(|&c| c as f64 / n).collect(),
    })
}

/// Probability vector over the labelled categories of one axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    axis: Axis,
    labels: Vec<String>,
    probabilities: Vec<f64>,
}

impl Distribution {
    pub fn new(axis: Axis, labels: Vec<String>, probabilities: Vec<f64>) -> Result<Self> {
        if labels.len() != probabilities.len() {
            return Err(Error::CategoryMismatch {
                reason: format!("{} labels for {} probabilities", labels.len(), probabilities.len()),
            });
        }
        if let Some(p) = probabilities.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::invalid(
                "distribution",
                format!("probability {p} outside [0, 1]"),
            ));
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
            return Err(Error::invalid("distribution", format!("probabilities sum to {sum}")));
        }
        Ok(Self {
            axis,
            labels,
            probabilities,
        })
    }

    /// Unlabelled distribution, categories named `0..n`. Convenient for tests
    /// and raw vectors.
    pub fn from_probabilities(probabilities: Vec<f64>) -> Result<Self> {
        let labels = (0..probabilities.len()).map(|i| i.to_string()).collect();
        Self::new(Axis::Intersectional, labels, probabilities)
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.probabilities[i])
    }
}

/// Sums the records matching `selection` into an intersectional table.
pub fn aggregate<'a, I>(records: I, selection: &Selection, scheme: &CategoryScheme) -> Result<CountTable>
where
    I: IntoIterator<Item = &'a DegreeRecord>,
{
    let mut table = CountTable::zeros(scheme.clone(), Axis::Intersectional);
    for record in records.into_iter().filter(|r| selection.matches(r)) {
        table.add(&record.cell, record.count)?;
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::{HISPANIC, MEN, WHITE, WOMEN};
    use proptest::prelude::*;

    fn scheme() -> CategoryScheme {
        CategoryScheme::default()
    }

    fn record(inst: &str, year: i32, cip: &str, g: &str, r: &str, count: u64) -> DegreeRecord {
        DegreeRecord {
            institution_id: inst.into(),
            year,
            cip: cip.into(),
            award_level: AwardLevel::Bachelors,
            cell: Cell::new(g, r),
            count,
        }
    }

    #[test]
    fn uniform_ones_marginalize_to_seven_each() {
        let t = CountTable::from_counts(scheme(), Axis::Intersectional, vec![1; 14]).unwrap();
        let g = t.marginalize(Axis::Gender).unwrap();
        assert_eq!(g.labels(), vec![MEN, WOMEN]);
        assert_eq!(g.counts(), &[7, 7]);
        assert_eq!(g.total(), 14);
    }

    #[test]
    fn single_race_marginal() {
        let men_white = Cell::new(MEN, WHITE);
        let women_white = Cell::new(WOMEN, WHITE);
        let t = CountTable::from_cells(scheme(), [(&men_white, 3), (&women_white, 5)]).unwrap();
        let r = t.marginalize(Axis::Race).unwrap();
        assert_eq!(r.group_count(&Group::Race(WHITE.into())).unwrap(), 8);
        assert_eq!(r.total(), 8);
        assert_eq!(r.counts().iter().filter(|&&c| c > 0).count(), 1);
    }

    #[test]
    fn zero_table_marginalizes_to_zero() {
        let t = CountTable::zeros(scheme(), Axis::Intersectional);
        assert_eq!(t.marginalize(Axis::Race).unwrap().total(), 0);
        assert_eq!(t.normalize().unwrap_err().name(), "zero_population");
    }

    #[test]
    fn marginal_table_cannot_switch_axis() {
        let t = CountTable::zeros(scheme(), Axis::Gender);
        assert!(t.marginalize(Axis::Gender).is_ok());
        assert_eq!(t.marginalize(Axis::Race).unwrap_err().name(), "category_mismatch");
    }

    #[test]
    fn normalize_examples() {
        let two = CategoryScheme::new(vec!["A".into(), "B".into()], vec!["x".into()], Default::default()).unwrap();
        let d = CountTable::from_counts(two.clone(), Axis::Gender, vec![1, 1])
            .unwrap()
            .normalize()
            .unwrap();
        assert_eq!(d.probabilities(), &[0.5, 0.5]);
        let d = CountTable::from_counts(two.clone(), Axis::Gender, vec![112, 0])
            .unwrap()
            .normalize()
            .unwrap();
        assert_eq!(d.probabilities(), &[1.0, 0.0]);
        let d = CountTable::from_counts(two, Axis::Gender, vec![81, 19])
            .unwrap()
            .normalize()
            .unwrap();
        assert_eq!(d.get("A"), Some(81.0 / 100.0));
        assert_eq!(d.get("B"), Some(19.0 / 100.0));
    }

    #[test]
    fn distribution_validation() {
        assert!(Distribution::from_probabilities(vec![0.5, 0.5]).is_ok());
        assert!(Distribution::from_probabilities(vec![0.5, 0.6]).is_err());
        assert!(Distribution::from_probabilities(vec![1.5, -0.5]).is_err());
        assert!(Distribution::new(Axis::Gender, vec!["a".into()], vec![0.5, 0.5]).is_err());
    }

    #[test]
    fn aggregate_sums_and_filters() {
        let s = scheme();
        assert_eq!(aggregate(&[], &Selection::everything(), &s).unwrap().total(), 0);
        let recs = vec![
            record("A", 2020, "11.0701", WOMEN, HISPANIC, 3),
            record("A", 2020, "11.0101", WOMEN, HISPANIC, 4),
            record("A", 2020, "27.0101", WOMEN, HISPANIC, 10),
            record("B", 2020, "11.0701", MEN, WHITE, 2),
            record("A", 2019, "11.0701", MEN, WHITE, 100),
        ];
        let sel = Selection::new(FieldScope::ComputingCip11).institution("A").year(2020);
        let t = aggregate(&recs, &sel, &s).unwrap();
        assert_eq!(t.group_count(&Group::Cell(Cell::new(WOMEN, HISPANIC))).unwrap(), 7);
        assert_eq!(t.total(), 7);
        let all = aggregate(&recs, &Selection::new(FieldScope::AllDegrees), &s).unwrap();
        assert_eq!(all.total(), 119);
    }

    #[test]
    fn aggregate_rejects_foreign_labels() {
        let recs = vec![record("A", 2020, "11", "Men", "Martian", 1)];
        let err = aggregate(&recs, &Selection::everything(), &scheme()).unwrap_err();
        assert_eq!(err.name(), "scheme_mismatch");
    }

    #[test]
    fn cip_prefix_matching() {
        let f = CipFilter::computing();
        assert!(f.matches("11"));
        assert!(f.matches("11.0701"));
        assert!(!f.matches("110"));
        assert!(!f.matches("27.0101"));
        let sub = CipFilter::new(["11.07"]).unwrap();
        assert!(sub.matches("11.0701"));
        assert!(!sub.matches("11.0101"));
        assert!(CipFilter::new(["1"]).is_err());
        assert!(CipFilter::new(["ab"]).is_err());
        assert!(CipFilter::new(Vec::<String>::new()).is_err());
    }

    #[test]
    fn parse_scope_and_years() {
        assert_eq!(FieldScope::parse("cip11").unwrap(), FieldScope::ComputingCip11);
        assert_eq!(FieldScope::parse("all").unwrap(), FieldScope::AllDegrees);
        let s = FieldScope::parse("cip:27,11.07").unwrap();
        assert!(s.matches("27.0101") && s.matches("11.0701") && !s.matches("11.0101"));
        assert_eq!(s.to_string(), "cip:27,11.07");
        assert!(FieldScope::parse("math").is_err());
        assert_eq!(
            YearRange::parse("2010-2019").unwrap(),
            YearRange { start: 2010, end: 2019 }
        );
        assert_eq!(YearRange::parse("2020").unwrap(), YearRange::single(2020));
        assert_eq!(YearRange::parse("2020-2010").unwrap_err().name(), "empty_range");
        assert!(YearRange::parse("twenty").is_err());
    }

    #[test]
    fn award_levels_from_ipeds_codes() {
        assert_eq!(AwardLevel::from_ipeds_code(5), AwardLevel::Bachelors);
        assert_eq!(AwardLevel::from_ipeds_code(3), AwardLevel::Associates);
        assert_eq!(AwardLevel::from_ipeds_code(7), AwardLevel::Masters);
        assert_eq!(AwardLevel::from_ipeds_code(17), AwardLevel::Doctoral);
        assert_eq!("Bachelors".parse::<AwardLevel>().unwrap(), AwardLevel::Bachelors);
    }

    fn counts_strategy() -> impl Strategy<Value = Vec<u64>> {
        prop::collection::vec(0u64..5_000, 14)
    }

    proptest! {
        #[test]
        fn race_marginal_matches_direct_summation(counts in counts_strategy()) {
            let s = scheme();
            let t = CountTable::from_counts(s.clone(), Axis::Intersectional, counts.clone()).unwrap();
            let races = t.marginalize(Axis::Race).unwrap();
            // Oracle: walk cells by label and sum per race.
            for (r_idx, race) in s.races().iter().enumerate() {
                let mut expected = 0u64;
                for (i, cell) in s.cells().enumerate() {
                    if &cell.race == race {
                        expected += counts[i];
                    }
                }
                prop_assert_eq!(races.counts()[r_idx], expected);
            }
        }

        #[test]
        fn marginals_conserve_total(counts in counts_strategy()) {
            let t = CountTable::from_counts(scheme(), Axis::Intersectional, counts).unwrap();
            let g: u64 = t.marginalize(Axis::Gender).unwrap().counts().iter().sum();
            let r: u64 = t.marginalize(Axis::Race).unwrap().counts().iter().sum();
            prop_assert_eq!(g, t.total());
            prop_assert_eq!(r, t.total());
        }

        #[test]
        fn normalization_round_trips(counts in counts_strategy()) {
            let t = CountTable::from_counts(scheme(), Axis::Intersectional, counts.clone()).unwrap();
            prop_assume!(t.total() > 0);
            let d = t.normalize().unwrap();
            let sum: f64 = d.probabilities().iter().sum();
            prop_assert!((sum - 1.0).abs() <= 1e-9);
            for (p, &c) in d.probabilities().iter().zip(&counts) {
                let back = p * t.total() as f64;
                if c == 0 {
                    prop_assert_eq!(back, 0.0);
                } else {
                    prop_assert!(((back - c as f64) / c as f64).abs() <= 1e-9);
                }
            }
        }

        #[test]
        fn aggregation_is_order_independent(
            counts in prop::collection::vec((0usize..14, 0u64..50), 0..60),
            seed in any::<u64>(),
        ) {
            let s = scheme();
            let cells: Vec<Cell> = s.cells().collect();
            let mut recs: Vec<DegreeRecord> = counts
                .iter()
                .map(|&(i, c)| record("A", 2020, "11", &cells[i].gender, &cells[i].race, c))
                .collect();
            let before = aggregate(&recs, &Selection::everything(), &s).unwrap();
            // Deterministic Fisher-Yates driven by the seed.
            let mut state = seed | 1;
            for i in (1..recs.len()).rev() {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                recs.swap(i, (state % (i as u64 + 1)) as usize);
            }
            let after = aggregate(&recs, &Selection::everything(), &s).unwrap();
            prop_assert_eq!(before, after);
        }
    }
}
