//! Turning source files into dataset snapshots.
//!
//! Two inputs are supported: raw IPEDS-style completions files (one wide
//! row per institution, CIP code, major number and award level, one column
//! per gender/race cell) read through a [`ColumnMap`], and the canonical
//! long format the store itself uses.
//!
//! Ingest is all-or-nothing per file: the whole source is parsed and
//! validated before anything on disk changes. A source whose SHA-256 is
//! already listed in the manifest is skipped, so re-running an ingest is a
//! no-op.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scheme::{CategoryScheme, Cell};
use crate::store::{
    read_names, sha256_hex, Dataset, DatasetManifest, IngestOptions, SourceEntry, SourceKind, CANONICAL_HEADER,
};
use crate::table::{AwardLevel, DegreeRecord};

/// Maps raw source columns to canonical fields and to scheme cells.
///
/// Text format, one `key = value` per line, `#` comments:
///
/// ```text
/// institution  = UNITID
/// cip          = CIPCODE
/// award_level  = AWLEVEL
/// major_number = MAJORNUM
/// cell.Men.Hispanic or Latino   = CHISPM
/// cell.Women.Hispanic or Latino = CHISPW
/// ignore = XCTOTALT, CTOTALT
/// ```
///
/// `year` is optional (IPEDS files carry the year in the file name, so it is
/// usually passed as an ingest option). Columns listed under `ignore` are not
/// reported as unmapped.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ColumnMap {
    pub institution: String,
    pub cip: String,
    pub award_level: Option<String>,
    pub major_number: Option<String>,
    pub year: Option<String>,
    pub cells: Vec<(Cell, String)>,
    pub ignore: BTreeSet<String>,
}

/// A scheme cell bound to its raw column: (cell index, cell, column name).
type CellColumn = (usize, Cell, String);

impl ColumnMap {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = ColumnMap::default();
        let mut institution = None;
        let mut cip = None;
        for (i, raw_line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |reason: String| Error::ColumnMap { line: line_no, reason };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err("expected `key = value`".into()))?;
            let (key, value) = (key.trim(), value.trim().to_string());
            if value.is_empty() && key != "ignore" {
                return Err(err(format!("`{key}` has no column")));
            }
            match key {
                "institution" => institution = Some(value),
                "cip" => cip = Some(value),
                "award_level" => map.award_level = Some(value),
                "major_number" => map.major_number = Some(value),
                "year" => map.year = Some(value),
                "ignore" => map.ignore.extend(
                    value
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(String::from),
                ),
                _ => {
                    let rest = key
                        .strip_prefix("cell.")
                        .ok_or_else(|| err(format!("unknown key `{key}`")))?;
                    let (gender, race) = rest
                        .split_once('.')
                        .ok_or_else(|| err(format!("`{key}` should read cell.<gender>.<race>")))?;
                    let cell = Cell::new(gender.trim(), race.trim());
                    if map.cells.iter().any(|(c, _)| c == &cell) {
                        return Err(err(format!("cell `{cell}` mapped twice")));
                    }
                    if map.cells.iter().any(|(_, col)| col == &value) {
                        return Err(err(format!("column `{value}` mapped to two cells")));
                    }
                    map.cells.push((cell, value));
                }
            }
        }
        map.institution = institution.ok_or(Error::ColumnMap {
            line: 0,
            reason: "missing `institution`".into(),
        })?;
        map.cip = cip.ok_or(Error::ColumnMap {
            line: 0,
            reason: "missing `cip`".into(),
        })?;
        Ok(map)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    /// Template for IPEDS completions files from the 2011 survey year on.
    pub fn ipeds_completions() -> Self {
        Self::parse(include_str!("../column_maps/ipeds_completions.map")).expect("bundled template parses")
    }

    /// Cell columns that apply under `scheme`. Every scheme cell must be
    /// mapped exactly once; mapped cells outside the scheme (typically the
    /// excluded Nonresident/Unknown columns) are returned separately.
    fn resolve(&self, scheme: &CategoryScheme) -> Result<(Vec<CellColumn>, Vec<String>)> {
        let mut active = Vec::new();
        let mut inactive = Vec::new();
        for (cell, column) in &self.cells {
            let resolved = scheme
                .resolve_gender(&cell.gender)
                .zip(scheme.resolve_race(&cell.race))
                .map(|(g, r)| Cell::new(g, r));
            match resolved {
                Some(c) => {
                    let idx = scheme.cell_index(&c.gender, &c.race).expect("resolved labels");
                    if active.iter().any(|(i, _, _)| *i == idx) {
                        return Err(Error::ColumnMap {
                            line: 0,
                            reason: format!("cell `{c}` mapped twice"),
                        });
                    }
                    active.push((idx, c, column.clone()));
                }
                None if scheme.is_excluded_extra(&cell.race) => inactive.push(column.clone()),
                None => {
                    return Err(Error::SchemeMismatch {
                        label: cell.to_string(),
                        axis: "cell",
                    })
                }
            }
        }
        if let Some(missing) = scheme.cells().find(|c| {
            scheme
                .cell_index(&c.gender, &c.race)
                .is_some_and(|idx| !active.iter().any(|(i, _, _)| *i == idx))
        }) {
            return Err(Error::ColumnMap {
                line: 0,
                reason: format!("no column mapped for cell `{missing}`"),
            });
        }
        active.sort_by_key(|(i, _, _)| *i);
        Ok((active, inactive))
    }
}

/// Outcome of one ingest call.
#[derive(Clone, Debug, Serialize)]
pub struct IngestReport {
    pub manifest: DatasetManifest,
    pub source: SourceEntry,
    /// The source had been ingested before; nothing changed.
    pub already_ingested: bool,
    pub rows_read: u64,
    pub rows_kept: u64,
    pub records_added: u64,
    /// Raw columns neither mapped nor ignored.
    pub unmapped_columns: Vec<String>,
    /// Graduates dropped because their category is outside the scheme.
    pub excluded_extras: u64,
    pub warnings: Vec<String>,
}

type RecordKey = (String, i32, String, AwardLevel, Cell);

struct Parsed {
    records: BTreeMap<RecordKey, u64>,
    rows_read: u64,
    rows_kept: u64,
    unmapped_columns: Vec<String>,
    excluded_extras: u64,
    warnings: Vec<String>,
}

fn line_of(rec: &csv::StringRecord) -> u64 {
    rec.position().map(|p| p.line()).unwrap_or(0)
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    match e.kind() {
        csv::ErrorKind::Io(_) => Error::Csv(e),
        _ => Error::MalformedRow {
            line,
            reason: e.to_string(),
        },
    }
}

fn parse_count(field: &str, line: u64, column: &str) -> Result<u64> {
    let field = field.trim();
    if field.is_empty() || field == "." {
        return Ok(0);
    }
    let value: i64 = field.parse().map_err(|_| Error::MalformedRow {
        line,
        reason: format!("`{field}` in column `{column}` is not an integer count"),
    })?;
    u64::try_from(value).map_err(|_| Error::NegativeCount {
        line,
        column: column.to_string(),
        value,
    })
}

fn parse_raw(bytes: &[u8], map: &ColumnMap, options: &IngestOptions, scheme: &CategoryScheme) -> Result<Parsed> {
    let (cells, inactive) = map.resolve(scheme)?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(bytes);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn {
                column: name.to_string(),
            })
    };
    let inst_col = col(&map.institution)?;
    let cip_col = col(&map.cip)?;
    let award_col = map.award_level.as_deref().map(col).transpose()?;
    let major_col = map.major_number.as_deref().map(col).transpose()?;
    let year_col = map.year.as_deref().map(col).transpose()?;
    let cell_cols: Vec<(Cell, usize, &str)> = cells
        .iter()
        .map(|(_, cell, name)| Ok((cell.clone(), col(name)?, name.as_str())))
        .collect::<Result<_>>()?;
    let extra_cols: Vec<(usize, &str)> = inactive
        .iter()
        .filter_map(|name| headers.iter().position(|h| h == name).map(|i| (i, name.as_str())))
        .collect();
    if year_col.is_none() && options.year.is_none() {
        return Err(Error::invalid(
            "year",
            "source has no year column; pass the completion year",
        ));
    }

    let mut used: BTreeSet<&str> = [map.institution.as_str(), map.cip.as_str()].into_iter().collect();
    used.extend(map.award_level.as_deref());
    used.extend(map.major_number.as_deref());
    used.extend(map.year.as_deref());
    used.extend(map.cells.iter().map(|(_, c)| c.as_str()));
    let unmapped_columns = headers
        .iter()
        .filter(|h| !used.contains(h) && !map.ignore.contains(*h))
        .map(String::from)
        .collect();

    let mut parsed = Parsed {
        records: BTreeMap::new(),
        rows_read: 0,
        rows_kept: 0,
        unmapped_columns,
        excluded_extras: 0,
        warnings: Vec::new(),
    };
    for row in rdr.records() {
        let row = row.map_err(csv_error)?;
        let line = line_of(&row);
        parsed.rows_read += 1;
        let field = |i: usize| row.get(i).unwrap_or("");
        // Counts are validated on every row, including rows filtered out
        // below: a negative count anywhere means the file is corrupt.
        let counts: Vec<u64> = cell_cols
            .iter()
            .map(|(_, idx, name)| parse_count(field(*idx), line, name))
            .collect::<Result<_>>()?;
        let extras: u64 = extra_cols
            .iter()
            .map(|(idx, name)| parse_count(field(*idx), line, name))
            .sum::<Result<u64>>()?;
        let cip = field(cip_col).to_string();
        if cip.is_empty() {
            return Err(Error::MalformedRow {
                line,
                reason: "empty CIP code".into(),
            });
        }
        if options.skip_cip.contains(&cip) {
            continue;
        }
        if let Some(c) = major_col {
            let major: u32 = field(c).parse().map_err(|_| Error::MalformedRow {
                line,
                reason: format!("bad major number `{}`", field(c)),
            })?;
            if major != 1 && !options.include_second_majors {
                continue;
            }
        }
        let award = match award_col {
            Some(c) => {
                let raw = field(c);
                match raw.parse::<u32>() {
                    Ok(code) => AwardLevel::from_ipeds_code(code),
                    Err(_) => raw.parse::<AwardLevel>().map_err(|_| Error::MalformedRow {
                        line,
                        reason: format!("bad award level `{raw}`"),
                    })?,
                }
            }
            None => AwardLevel::Bachelors,
        };
        if options.award_level.is_some_and(|a| a != award) {
            continue;
        }
        let year = match year_col {
            Some(c) => field(c).parse().map_err(|_| Error::MalformedRow {
                line,
                reason: format!("bad year `{}`", field(c)),
            })?,
            None => options.year.expect("checked above"),
        };
        let institution = field(inst_col).to_string();
        if institution.is_empty() {
            return Err(Error::MalformedRow {
                line,
                reason: "empty institution id".into(),
            });
        }
        parsed.rows_kept += 1;
        for ((cell, _, _), &count) in cell_cols.iter().zip(&counts) {
            if count > 0 {
                *parsed
                    .records
                    .entry((institution.clone(), year, cip.clone(), award, cell.clone()))
                    .or_default() += count;
            }
        }
        parsed.excluded_extras += extras;
    }
    Ok(parsed)
}

fn parse_canonical(bytes: &[u8], scheme: &CategoryScheme, strict: bool) -> Result<Parsed> {
    let mut rdr = csv::ReaderBuilder::new().from_reader(bytes);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    let header: Vec<&str> = headers.iter().collect();
    if header != CANONICAL_HEADER {
        if let Some(missing) = CANONICAL_HEADER.iter().find(|h| !header.contains(h)) {
            return Err(Error::MissingColumn {
                column: missing.to_string(),
            });
        }
        return Err(Error::MalformedRow {
            line: 1,
            reason: format!("header must be exactly `{}`", CANONICAL_HEADER.join(",")),
        });
    }
    let mut parsed = Parsed {
        records: BTreeMap::new(),
        rows_read: 0,
        rows_kept: 0,
        unmapped_columns: Vec::new(),
        excluded_extras: 0,
        warnings: Vec::new(),
    };
    for row in rdr.records() {
        let row = row.map_err(csv_error)?;
        let line = line_of(&row);
        parsed.rows_read += 1;
        let malformed = |reason: String| Error::MalformedRow { line, reason };
        let institution = row[0].trim();
        if institution.is_empty() {
            return Err(malformed("empty institution_id".into()));
        }
        let year: i32 = row[1]
            .trim()
            .parse()
            .map_err(|_| malformed(format!("bad year `{}`", &row[1])))?;
        let cip = row[2].trim();
        if cip.is_empty() {
            return Err(malformed("empty cip_family".into()));
        }
        let award: AwardLevel = row[3]
            .parse()
            .map_err(|_| malformed(format!("bad award_level `{}`", &row[3])))?;
        let count = parse_count(&row[6], line, "count")?;
        let (gender_raw, race_raw) = (row[4].trim(), row[5].trim());
        let (gender, race) = if strict {
            (
                scheme.gender_index(gender_raw).map(|_| gender_raw),
                scheme.race_index(race_raw).map(|_| race_raw),
            )
        } else {
            (scheme.resolve_gender(gender_raw), scheme.resolve_race(race_raw))
        };
        let Some(gender) = gender else {
            return Err(Error::SchemeMismatch {
                label: gender_raw.to_string(),
                axis: "gender",
            });
        };
        let race = match race {
            Some(r) => r,
            None if !strict && scheme.is_excluded_extra(race_raw) => {
                parsed.excluded_extras += count;
                continue;
            }
            None => {
                return Err(Error::SchemeMismatch {
                    label: race_raw.to_string(),
                    axis: "race",
                })
            }
        };
        parsed.rows_kept += 1;
        let key = (
            institution.to_string(),
            year,
            cip.to_string(),
            award,
            Cell::new(gender, race),
        );
        if let Some(existing) = parsed.records.get_mut(&key) {
            parsed.warnings.push(format!(
                "line {line}: duplicate key ({institution}, {year}, {cip}, {award}, {}); counts summed",
                key.4
            ));
            *existing += count;
        } else {
            parsed.records.insert(key, count);
        }
    }
    Ok(parsed)
}

/// Reads the store's own `records.csv`; labels must match the scheme exactly.
pub(crate) fn parse_stored_records(bytes: &[u8], scheme: &CategoryScheme) -> Result<Vec<DegreeRecord>> {
    let parsed = parse_canonical(bytes, scheme, true)?;
    Ok(into_records(parsed.records))
}

fn into_records(map: BTreeMap<RecordKey, u64>) -> Vec<DegreeRecord> {
    map.into_iter()
        .map(|((institution_id, year, cip, award_level, cell), count)| DegreeRecord {
            institution_id,
            year,
            cip,
            award_level,
            cell,
            count,
        })
        .collect()
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn commit(
    dataset_dir: &Path,
    source: &Path,
    kind: SourceKind,
    options: &IngestOptions,
    bytes: &[u8],
    parse: impl FnOnce(&CategoryScheme) -> Result<Parsed>,
) -> Result<IngestReport> {
    let scheme = options.scheme()?;
    let existing = Dataset::open_existing(dataset_dir)?;
    if let Some(ds) = &existing {
        if ds.scheme() != &scheme {
            return Err(Error::SchemeMismatch {
                label: scheme.describe(),
                axis: "dataset scheme",
            });
        }
    }
    let digest = sha256_hex(bytes);
    if let Some(ds) = &existing {
        if let Some(entry) = ds.manifest().sources.iter().find(|s| s.sha256 == digest) {
            return Ok(IngestReport {
                manifest: ds.manifest().clone(),
                source: entry.clone(),
                already_ingested: true,
                rows_read: 0,
                rows_kept: 0,
                records_added: 0,
                unmapped_columns: Vec::new(),
                excluded_extras: 0,
                warnings: vec![format!("{} already ingested; nothing changed", file_name(source))],
            });
        }
    }

    let parsed = parse(&scheme)?;
    let entry = SourceEntry {
        file_name: file_name(source),
        sha256: digest,
        kind,
        options: options.clone(),
        rows_read: parsed.rows_read,
        records: parsed.records.len() as u64,
        total_count: parsed.records.values().sum(),
    };

    let mut merged: BTreeMap<RecordKey, u64> = BTreeMap::new();
    let mut warnings = parsed.warnings;
    let (name, mut sources, names) = match existing {
        Some(ds) => {
            for r in ds.records() {
                merged.insert(
                    (
                        r.institution_id.clone(),
                        r.year,
                        r.cip.clone(),
                        r.award_level,
                        r.cell.clone(),
                    ),
                    r.count,
                );
            }
            (
                ds.manifest().name.clone(),
                ds.manifest().sources.clone(),
                ds.names().clone(),
            )
        }
        None => (
            file_name(dataset_dir),
            Vec::new(),
            read_names(&dataset_dir.join(crate::store::NAMES_FILE))?,
        ),
    };
    let records_added = parsed.records.len() as u64;
    let mut overlaps = 0usize;
    for (key, count) in parsed.records {
        let slot = merged.entry(key).or_default();
        if *slot > 0 {
            overlaps += 1;
        }
        *slot += count;
    }
    if overlaps > 0 {
        warnings.push(format!("{overlaps} records overlapped earlier sources; counts summed"));
    }
    sources.push(entry.clone());
    let ds = Dataset::with_update(dataset_dir, name, scheme, into_records(merged), sources, names);
    ds.save(dataset_dir)?;
    Ok(IngestReport {
        manifest: ds.manifest().clone(),
        source: entry,
        already_ingested: false,
        rows_read: parsed.rows_read,
        rows_kept: parsed.rows_kept,
        records_added,
        unmapped_columns: parsed.unmapped_columns,
        excluded_extras: parsed.excluded_extras,
        warnings,
    })
}

/// Ingests a raw wide-format completions file into `dataset_dir`.
pub fn ingest_raw(
    dataset_dir: impl AsRef<Path>,
    source: impl AsRef<Path>,
    column_map: &ColumnMap,
    options: &IngestOptions,
) -> Result<IngestReport> {
    let source = source.as_ref();
    let bytes = fs::read(source)?;
    commit(
        dataset_dir.as_ref(),
        source,
        SourceKind::Raw,
        options,
        &bytes,
        |scheme| parse_raw(&bytes, column_map, options, scheme),
    )
}

/// Ingests a canonical long-format CSV into `dataset_dir`. Duplicate keys
/// are summed with a warning.
pub fn ingest_canonical(
    dataset_dir: impl AsRef<Path>,
    source: impl AsRef<Path>,
    options: &IngestOptions,
) -> Result<IngestReport> {
    let source = source.as_ref();
    let bytes = fs::read(source)?;
    commit(
        dataset_dir.as_ref(),
        source,
        SourceKind::Canonical,
        options,
        &bytes,
        |scheme| parse_canonical(&bytes, scheme, false),
    )
}

/// Loads a canonical CSV straight into an in-memory snapshot.
pub fn load_canonical(path: impl AsRef<Path>, options: &IngestOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let scheme = options.scheme()?;
    let parsed = parse_canonical(&fs::read(path)?, &scheme, false)?;
    Ok(Dataset::from_records(
        file_name(path),
        scheme,
        into_records(parsed.records),
    ))
}
