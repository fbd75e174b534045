//! Demographic category schemes: the gender and race/ethnicity axes, the
//! intersectional cells built from them, and group descriptors.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MEN: &str = "Men";
pub const WOMEN: &str = "Women";

pub const AMERICAN_INDIAN: &str = "American Indian or Alaska Native";
pub const ASIAN: &str = "Asian";
pub const BLACK: &str = "Black or African American";
pub const HISPANIC: &str = "Hispanic or Latino";
pub const PACIFIC_ISLANDER: &str = "Native Hawaiian or Other Pacific Islander";
pub const WHITE: &str = "White";
pub const TWO_OR_MORE: &str = "Two or more races";

/// IPEDS reporting categories that sit outside the seven race/ethnicity groups.
pub const NONRESIDENT: &str = "Nonresident";
pub const UNKNOWN: &str = "Unknown";

pub const DEFAULT_RACES: [&str; 7] = [
    AMERICAN_INDIAN,
    ASIAN,
    BLACK,
    HISPANIC,
    PACIFIC_ISLANDER,
    WHITE,
    TWO_OR_MORE,
];

const ALIASES: &[(&str, &[&str])] = &[
    (MEN, &["man", "male", "m"]),
    (WOMEN, &["woman", "female", "f", "w"]),
    (AMERICAN_INDIAN, &["american indian", "aian", "native american"]),
    (BLACK, &["black", "african american"]),
    (HISPANIC, &["hispanic", "latino", "latina", "latinx"]),
    (PACIFIC_ISLANDER, &["nhpi", "pacific islander", "native hawaiian"]),
    (TWO_OR_MORE, &["two or more", "multiracial"]),
    (NONRESIDENT, &["nonresident alien", "u.s. nonresident"]),
    (UNKNOWN, &["race/ethnicity unknown", "unknown race"]),
];

/// Which of the non-race IPEDS categories are counted as race categories.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extras {
    pub nonresident: bool,
    pub unknown: bool,
}

impl Extras {
    pub const NONE: Extras = Extras {
        nonresident: false,
        unknown: false,
    };
    pub const ALL: Extras = Extras {
        nonresident: true,
        unknown: true,
    };
}

/// Ordered category labels for both demographic axes.
///
/// The default scheme is binary gender crossed with the seven IPEDS
/// race/ethnicity groups, giving 14 intersectional cells. Extras, when
/// enabled, are appended to the race axis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryScheme {
    genders: Vec<String>,
    races: Vec<String>,
    extras: Extras,
}

impl Default for CategoryScheme {
    fn default() -> Self {
        Self::with_extras(Extras::NONE)
    }
}

impl CategoryScheme {
    pub fn with_extras(extras: Extras) -> Self {
        let genders = vec![MEN.to_string(), WOMEN.to_string()];
        let races = DEFAULT_RACES.iter().map(|s| s.to_string()).collect();
        Self::new(genders, races, extras).expect("default scheme is valid")
    }

    /// Builds a scheme from explicit label lists. Extras are appended to the
    /// race axis and must not already be present.
    pub fn new(genders: Vec<String>, races: Vec<String>, extras: Extras) -> Result<Self> {
        let mut races = races;
        if extras.nonresident {
            races.push(NONRESIDENT.to_string());
        }
        if extras.unknown {
            races.push(UNKNOWN.to_string());
        }
        for (axis, labels) in [("gender", &genders), ("race", &races)] {
            if labels.is_empty() {
                return Err(Error::invalid("scheme", format!("{axis} axis has no categories")));
            }
            for (i, label) in labels.iter().enumerate() {
                if label.trim().is_empty() || labels[..i].contains(label) {
                    return Err(Error::invalid(
                        "scheme",
                        format!("{axis} label `{label}` is empty or repeated"),
                    ));
                }
            }
        }
        Ok(Self { genders, races, extras })
    }

    /// Default scheme with additional gender labels appended after Men/Women.
    pub fn with_genders(extra_genders: &[String], extras: Extras) -> Result<Self> {
        let mut genders = vec![MEN.to_string(), WOMEN.to_string()];
        for g in extra_genders {
            if !genders.contains(g) {
                genders.push(g.clone());
            }
        }
        let races = DEFAULT_RACES.iter().map(|s| s.to_string()).collect();
        Self::new(genders, races, extras)
    }

    pub fn genders(&self) -> &[String] {
        &self.genders
    }

    pub fn races(&self) -> &[String] {
        &self.races
    }

    pub fn extras(&self) -> Extras {
        self.extras
    }

    pub fn cell_count(&self) -> usize {
        self.genders.len() * self.races.len()
    }

    /// Cells in gender-major order: all races for the first gender, then the next.
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.genders
            .iter()
            .flat_map(move |g| self.races.iter().map(move |r| Cell::new(g.as_str(), r.as_str())))
    }

    pub fn gender_index(&self, label: &str) -> Option<usize> {
        self.genders.iter().position(|g| g == label)
    }

    pub fn race_index(&self, label: &str) -> Option<usize> {
        self.races.iter().position(|r| r == label)
    }

    /// Position of a cell in [`CategoryScheme::cells`] order.
    pub fn cell_index(&self, gender: &str, race: &str) -> Option<usize> {
        Some(self.gender_index(gender)? * self.races.len() + self.race_index(race)?)
    }

    pub fn category_count(&self, axis: Axis) -> usize {
        match axis {
            Axis::Gender => self.genders.len(),
            Axis::Race => self.races.len(),
            Axis::Intersectional => self.cell_count(),
        }
    }

    /// Category labels for one axis. Intersectional labels read `Race, Gender`.
    pub fn labels(&self, axis: Axis) -> Vec<String> {
        match axis {
            Axis::Gender => self.genders.clone(),
            Axis::Race => self.races.clone(),
            Axis::Intersectional => self.cells().map(|c| c.to_string()).collect(),
        }
    }

    /// Resolves a gender label or alias (case-insensitive) to its canonical label.
    pub fn resolve_gender(&self, input: &str) -> Option<&str> {
        resolve(&self.genders, input)
    }

    /// Resolves a race label or alias (case-insensitive) to its canonical label.
    pub fn resolve_race(&self, input: &str) -> Option<&str> {
        resolve(&self.races, input)
    }

    /// True when `label` is one of the IPEDS extras that this scheme leaves out.
    pub fn is_excluded_extra(&self, label: &str) -> bool {
        let canonical = canonical_extra(label);
        match canonical {
            Some(NONRESIDENT) => !self.extras.nonresident,
            Some(UNKNOWN) => !self.extras.unknown,
            _ => false,
        }
    }

    /// Parses a group descriptor: a single gender or race label, or a cell
    /// written as two comma-separated labels in either order
    /// (`"Hispanic,Women"` or `"Women,Hispanic"`).
    pub fn parse_group(&self, descriptor: &str) -> Result<Group> {
        let unknown = || Error::UnknownGroup {
            descriptor: descriptor.to_string(),
        };
        let parts: Vec<&str> = descriptor.split(',').map(str::trim).collect();
        match parts.as_slice() {
            [one] => {
                if let Some(r) = self.resolve_race(one) {
                    Ok(Group::Race(r.to_string()))
                } else if let Some(g) = self.resolve_gender(one) {
                    Ok(Group::Gender(g.to_string()))
                } else {
                    Err(unknown())
                }
            }
            [a, b] => {
                let cell = match (self.resolve_race(a), self.resolve_gender(b)) {
                    (Some(r), Some(g)) => Cell::new(g, r),
                    _ => match (self.resolve_gender(a), self.resolve_race(b)) {
                        (Some(g), Some(r)) => Cell::new(g, r),
                        _ => return Err(unknown()),
                    },
                };
                Ok(Group::Cell(cell))
            }
            _ => Err(unknown()),
        }
    }

    /// Human-readable summary, stored in dataset manifests.
    pub fn describe(&self) -> String {
        format!(
            "{} gender x {} race/ethnicity = {} cells",
            self.genders.len(),
            self.races.len(),
            self.cell_count()
        )
    }
}

fn resolve<'a>(labels: &'a [String], input: &str) -> Option<&'a str> {
    let needle = input.trim();
    if let Some(l) = labels.iter().find(|l| l.as_str() == needle) {
        return Some(l);
    }
    let lower = needle.to_lowercase();
    if let Some(l) = labels.iter().find(|l| l.to_lowercase() == lower) {
        return Some(l);
    }
    ALIASES
        .iter()
        .filter(|(_, aliases)| aliases.contains(&lower.as_str()))
        .find_map(|(canonical, _)| labels.iter().find(|l| l.as_str() == *canonical))
        .map(String::as_str)
}

fn canonical_extra(label: &str) -> Option<&'static str> {
    let lower = label.trim().to_lowercase();
    for extra in [NONRESIDENT, UNKNOWN] {
        if extra.to_lowercase() == lower {
            return Some(extra);
        }
        let aliases = ALIASES.iter().find(|(c, _)| *c == extra).map(|(_, a)| *a);
        if aliases.is_some_and(|a| a.contains(&lower.as_str())) {
            return Some(extra);
        }
    }
    None
}

/// The three ways to slice a population.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Gender,
    Race,
    Intersectional,
}

impl Axis {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_lowercase().as_str() {
            "gender" => Ok(Axis::Gender),
            "race" | "race/ethnicity" | "ethnicity" => Ok(Axis::Race),
            "intersectional" | "intersection" | "cell" => Ok(Axis::Intersectional),
            other => Err(Error::invalid(
                "axis",
                format!("`{other}` (expected gender, race or intersectional)"),
            )),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Axis::Gender => "gender",
            Axis::Race => "race",
            Axis::Intersectional => "intersectional",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One (gender, race/ethnicity) combination.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub gender: String,
    pub race: String,
}

impl Cell {
    pub fn new(gender: impl Into<String>, race: impl Into<String>) -> Self {
        Self {
            gender: gender.into(),
            race: race.into(),
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}, {}", self.race, self.gender)
    }
}

/// A population subgroup: one cell, or everyone sharing a gender or race label.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    Cell(Cell),
    Gender(String),
    Race(String),
}

impl Group {
    pub fn axis(&self) -> Axis {
        match self {
            Group::Cell(_) => Axis::Intersectional,
            Group::Gender(_) => Axis::Gender,
            Group::Race(_) => Axis::Race,
        }
    }

    pub fn contains(&self, cell: &Cell) -> bool {
        match self {
            Group::Cell(c) => c == cell,
            Group::Gender(g) => &cell.gender == g,
            Group::Race(r) => &cell.race == r,
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Group::Cell(c) => c.fmt(f),
            Group::Gender(g) => f.write_str(g),
            Group::Race(r) => f.write_str(r),
        }
    }
}
