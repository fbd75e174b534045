//! Dataset snapshots: a canonical long-format CSV plus a JSON manifest in
//! one directory, loaded into memory as an immutable record set.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::scheme::{CategoryScheme, Extras};
use crate::table::{aggregate, AwardLevel, CountTable, DegreeRecord, Selection, YearRange};

pub const RECORDS_FILE: &str = "records.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const NAMES_FILE: &str = "institutions.csv";
pub const CANONICAL_HEADER: [&str; 7] = [
    "institution_id",
    "year",
    "cip_family",
    "award_level",
    "gender",
    "race",
    "count",
];
const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    Raw,
    Canonical,
}

/// Options that shaped how a source file was turned into records.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestOptions {
    /// Completion year for sources that carry no year column.
    pub year: Option<i32>,
    /// Keep only this award level; `None` keeps every level.
    pub award_level: Option<AwardLevel>,
    /// Count second majors as well as first majors.
    pub include_second_majors: bool,
    pub extras: Extras,
    /// Gender labels accepted beyond Men/Women.
    pub extra_genders: Vec<String>,
    /// CIP codes dropped on ingest; IPEDS uses `99` for grand-total rows.
    pub skip_cip: Vec<String>,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self {
            year: None,
            award_level: Some(AwardLevel::Bachelors),
            include_second_majors: false,
            extras: Extras::NONE,
            extra_genders: Vec::new(),
            skip_cip: vec!["99".to_string()],
        }
    }
}

impl IngestOptions {
    pub fn scheme(&self) -> Result<CategoryScheme> {
        CategoryScheme::with_genders(&self.extra_genders, self.extras)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceEntry {
    pub file_name: String,
    pub sha256: String,
    pub kind: SourceKind,
    pub options: IngestOptions,
    pub rows_read: u64,
    pub records: u64,
    pub total_count: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub format_version: u32,
    pub name: String,
    pub years: Option<YearRange>,
    pub institutions: usize,
    pub record_count: usize,
    pub total_count: u64,
    pub scheme_description: String,
    pub scheme: CategoryScheme,
    pub sources: Vec<SourceEntry>,
    /// SHA-256 of `records.csv`.
    pub data_digest: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstitutionInfo {
    pub id: String,
    pub name: Option<String>,
    pub years: YearRange,
}

/// Records returned by [`Dataset::query`], plus non-fatal notes such as
/// unknown institution ids.
#[derive(Debug)]
pub struct QueryResult<'a> {
    pub records: Vec<&'a DegreeRecord>,
    pub warnings: Vec<String>,
}

/// An immutable, fully loaded dataset.
#[derive(Clone, Debug)]
pub struct Dataset {
    dir: Option<PathBuf>,
    manifest: DatasetManifest,
    records: Vec<DegreeRecord>,
    names: BTreeMap<String, String>,
    by_institution: BTreeMap<String, Vec<usize>>,
}

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn record_order(scheme: &CategoryScheme, r: &DegreeRecord) -> impl Ord {
    (
        r.institution_id.clone(),
        r.year,
        r.cip.clone(),
        r.award_level,
        scheme.gender_index(&r.cell.gender),
        scheme.race_index(&r.cell.race),
    )
}

/// Serializes records in canonical CSV form (LF line endings).
pub fn write_canonical<W: Write>(records: &[DegreeRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CANONICAL_HEADER)?;
    for r in records {
        w.write_record([
            r.institution_id.as_str(),
            &r.year.to_string(),
            r.cip.as_str(),
            r.award_level.as_str(),
            r.cell.gender.as_str(),
            r.cell.race.as_str(),
            &r.count.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

impl Dataset {
    /// Builds an in-memory snapshot. Records are sorted into canonical order;
    /// the digest is that of their canonical CSV form.
    pub fn from_records(name: impl Into<String>, scheme: CategoryScheme, records: Vec<DegreeRecord>) -> Self {
        Self::assemble(None, name.into(), scheme, records, Vec::new(), BTreeMap::new())
    }

    fn assemble(
        dir: Option<PathBuf>,
        name: String,
        scheme: CategoryScheme,
        mut records: Vec<DegreeRecord>,
        sources: Vec<SourceEntry>,
        names: BTreeMap<String, String>,
    ) -> Self {
        records.sort_by_key(|r| record_order(&scheme, r));
        let mut bytes = Vec::new();
        write_canonical(&records, &mut bytes).expect("writing to memory cannot fail");
        let manifest = build_manifest(name, scheme, &records, sources, sha256_hex(&bytes));
        let by_institution = index(&records);
        Self {
            dir,
            manifest,
            records,
            names,
            by_institution,
        }
    }

    /// Loads a dataset directory, refusing it if the stored records do not
    /// match the manifest digest.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let corrupt = |reason: String| Error::ManifestCorrupt {
            path: dir.to_path_buf(),
            reason,
        };
        let manifest_text = fs::read_to_string(dir.join(MANIFEST_FILE))
            .map_err(|e| corrupt(format!("cannot read {MANIFEST_FILE}: {e}")))?;
        let manifest: DatasetManifest =
            serde_json::from_str(&manifest_text).map_err(|e| corrupt(format!("bad manifest: {e}")))?;
        if manifest.format_version != FORMAT_VERSION {
            return Err(corrupt(format!(
                "unsupported format version {}",
                manifest.format_version
            )));
        }
        let mut bytes = Vec::new();
        fs::File::open(dir.join(RECORDS_FILE))
            .and_then(|mut f| f.read_to_end(&mut bytes))
            .map_err(|e| corrupt(format!("cannot read {RECORDS_FILE}: {e}")))?;
        let digest = sha256_hex(&bytes);
        if digest != manifest.data_digest {
            return Err(corrupt(format!(
                "records digest {digest} does not match manifest {}",
                manifest.data_digest
            )));
        }
        let records = crate::ingest::parse_stored_records(&bytes, &manifest.scheme)
            .map_err(|e| corrupt(format!("stored records unreadable: {e}")))?;
        let names = read_names(&dir.join(NAMES_FILE))?;
        let by_institution = index(&records);
        Ok(Self {
            dir: Some(dir.to_path_buf()),
            manifest,
            records,
            names,
            by_institution,
        })
    }

    /// Opens `dir` if it holds a dataset, otherwise `None`.
    pub(crate) fn open_existing(dir: &Path) -> Result<Option<Self>> {
        if dir.join(MANIFEST_FILE).exists() {
            Self::open(dir).map(Some)
        } else {
            Ok(None)
        }
    }

    pub(crate) fn with_update(
        dir: &Path,
        name: String,
        scheme: CategoryScheme,
        records: Vec<DegreeRecord>,
        sources: Vec<SourceEntry>,
        names: BTreeMap<String, String>,
    ) -> Self {
        Self::assemble(Some(dir.to_path_buf()), name, scheme, records, sources, names)
    }

    /// Writes `records.csv`, `manifest.json` and the optional name lookup.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        let mut bytes = Vec::new();
        write_canonical(&self.records, &mut bytes)?;
        write_atomic(&dir.join(RECORDS_FILE), &bytes)?;
        if !self.names.is_empty() {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            w.write_record(["institution_id", "name"])?;
            for (id, name) in &self.names {
                w.write_record([id, name])?;
            }
            let data = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
            write_atomic(&dir.join(NAMES_FILE), &data)?;
        }
        let manifest = serde_json::to_vec_pretty(&self.manifest)?;
        write_atomic(&dir.join(MANIFEST_FILE), &manifest)?;
        Ok(())
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn manifest(&self) -> &DatasetManifest {
        &self.manifest
    }

    pub fn digest(&self) -> &str {
        &self.manifest.data_digest
    }

    pub fn scheme(&self) -> &CategoryScheme {
        &self.manifest.scheme
    }

    pub fn records(&self) -> &[DegreeRecord] {
        &self.records
    }

    pub fn names(&self) -> &BTreeMap<String, String> {
        &self.names
    }

    pub fn set_names(&mut self, names: BTreeMap<String, String>) {
        self.names = names;
    }

    pub fn has_institution(&self, id: &str) -> bool {
        self.by_institution.contains_key(id)
    }

    pub fn institution_ids(&self) -> impl Iterator<Item = &str> {
        self.by_institution.keys().map(String::as_str)
    }

    pub fn institutions(&self) -> Vec<InstitutionInfo> {
        self.by_institution
            .iter()
            .map(|(id, idx)| {
                let (lo, hi) = idx.iter().fold((i32::MAX, i32::MIN), |(lo, hi), &i| {
                    let y = self.records[i].year;
                    (lo.min(y), hi.max(y))
                });
                InstitutionInfo {
                    id: id.clone(),
                    name: self.names.get(id).cloned(),
                    years: YearRange { start: lo, end: hi },
                }
            })
            .collect()
    }

    /// Every record matching `selection`. Unknown institution ids produce
    /// a warning and contribute nothing.
    pub fn query(&self, selection: &Selection) -> QueryResult<'_> {
        let mut warnings = Vec::new();
        let records = match &selection.institutions {
            Some(ids) => {
                let mut out = Vec::new();
                for id in ids {
                    match self.by_institution.get(id) {
                        Some(idx) => out.extend(idx.iter().map(|&i| &self.records[i]).filter(|r| selection.matches(r))),
                        None => warnings.push(format!("unknown_institution: `{id}`")),
                    }
                }
                out
            }
            None => self.records.iter().filter(|r| selection.matches(r)).collect(),
        };
        QueryResult { records, warnings }
    }

    /// Intersectional count table for a selection.
    pub fn table(&self, selection: &Selection) -> Result<CountTable> {
        aggregate(self.query(selection).records, selection, self.scheme())
    }

    /// Years that have at least one record for the selection's institutions.
    pub fn years_present(&self, selection: &Selection) -> BTreeSet<i32> {
        self.query(&Selection {
            years: None,
            ..selection.clone()
        })
        .records
        .iter()
        .map(|r| r.year)
        .collect()
    }

    pub fn export_canonical(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut bytes = Vec::new();
        write_canonical(&self.records, &mut bytes)?;
        fs::write(path, bytes)?;
        Ok(())
    }
}

fn index(records: &[DegreeRecord]) -> BTreeMap<String, Vec<usize>> {
    let mut map: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        map.entry(r.institution_id.clone()).or_default().push(i);
    }
    map
}

fn build_manifest(
    name: String,
    scheme: CategoryScheme,
    records: &[DegreeRecord],
    sources: Vec<SourceEntry>,
    data_digest: String,
) -> DatasetManifest {
    let years = records
        .iter()
        .map(|r| r.year)
        .fold(None, |acc: Option<YearRange>, y| match acc {
            None => Some(YearRange::single(y)),
            Some(r) => Some(YearRange {
                start: r.start.min(y),
                end: r.end.max(y),
            }),
        });
    let institutions = records.iter().map(|r| &r.institution_id).collect::<BTreeSet<_>>().len();
    DatasetManifest {
        format_version: FORMAT_VERSION,
        name,
        years,
        institutions,
        record_count: records.len(),
        total_count: records.iter().map(|r| r.count).sum(),
        scheme_description: scheme.describe(),
        scheme,
        sources,
        data_digest,
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Reads an optional `institution_id,name` lookup file.
pub fn read_names(path: &Path) -> Result<BTreeMap<String, String>> {
    if !path.exists() {
        return Ok(BTreeMap::new());
    }
    let mut rdr = csv::Reader::from_path(path)?;
    let mut names = BTreeMap::new();
    for row in rdr.records() {
        let row = row?;
        if let (Some(id), Some(name)) = (row.get(0), row.get(1)) {
            names.insert(id.trim().to_string(), name.trim().to_string());
        }
    }
    Ok(names)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::{Cell, HISPANIC, MEN, WHITE, WOMEN};
    use crate::table::FieldScope;

    fn rec(inst: &str, year: i32, cip: &str, g: &str, r: &str, count: u64) -> DegreeRecord {
        DegreeRecord {
            institution_id: inst.into(),
            year,
            cip: cip.into(),
            award_level: AwardLevel::Bachelors,
            cell: Cell::new(g, r),
            count,
        }
    }

    fn sample() -> Dataset {
        Dataset::from_records(
            "t",
            CategoryScheme::default(),
            vec![
                rec("B", 2020, "27.0101", WOMEN, HISPANIC, 4),
                rec("A", 2020, "11.0701", MEN, WHITE, 3),
                rec("A", 2019, "11.0701", WOMEN, HISPANIC, 2),
                rec("A", 2020, "52.0201", WOMEN, HISPANIC, 9),
            ],
        )
    }

    #[test]
    fn manifest_summarizes_records() {
        let ds = sample();
        let m = ds.manifest();
        assert_eq!(m.record_count, 4);
        assert_eq!(m.total_count, 18);
        assert_eq!(m.institutions, 2);
        assert_eq!(m.years, Some(YearRange { start: 2019, end: 2020 }));
        assert_eq!(ds.records()[0].institution_id, "A");
        assert_eq!(ds.records()[0].year, 2019);
    }

    #[test]
    fn query_filters() {
        let ds = sample();
        assert!(ds
            .query(&Selection::everything().years(YearRange::single(1999)))
            .records
            .is_empty());
        let cs = ds.query(&Selection::new(FieldScope::ComputingCip11));
        assert_eq!(cs.records.len(), 2);
        assert!(cs.records.iter().all(|r| r.is_computing()));
        assert_eq!(ds.query(&Selection::everything()).records.len(), 4);
        let q = ds.query(&Selection::everything().institution("nope"));
        assert!(q.records.is_empty());
        assert_eq!(q.warnings.len(), 1);
    }

    #[test]
    fn disjoint_filters_partition_records() {
        let ds = sample();
        let a = ds.query(&Selection::everything().institution("A")).records.len();
        let b = ds.query(&Selection::everything().institution("B")).records.len();
        assert_eq!(a + b, ds.records().len());
    }

    #[test]
    fn save_and_open_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let ds = sample();
        ds.save(dir.path()).unwrap();
        let back = Dataset::open(dir.path()).unwrap();
        assert_eq!(back.records(), ds.records());
        assert_eq!(back.digest(), ds.digest());
    }

    #[test]
    fn tampered_records_are_refused() {
        let dir = tempfile::tempdir().unwrap();
        sample().save(dir.path()).unwrap();
        let path = dir.path().join(RECORDS_FILE);
        let text = fs::read_to_string(&path).unwrap().replace(",3\n", ",30\n");
        fs::write(&path, text).unwrap();
        assert_eq!(Dataset::open(dir.path()).unwrap_err().name(), "manifest_corrupt");
    }

    #[test]
    fn institution_listing() {
        let mut ds = sample();
        ds.set_names(BTreeMap::from([("A".to_string(), "Alpha U".to_string())]));
        let list = ds.institutions();
        assert_eq!(list.len(), 2);
        assert_eq!(list[0].name.as_deref(), Some("Alpha U"));
        assert_eq!(list[0].years, YearRange { start: 2019, end: 2020 });
        assert_eq!(list[1].name, None);
    }
}
