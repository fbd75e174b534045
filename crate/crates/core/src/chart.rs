//! Chart exports: flat CSV and JSON data dumps, and minimal static SVG.
//!
//! Each [`ChartKind`] accepts exactly one payload shape. CSV and JSON
//! exports parse back into the same payload ([`ChartPayload::from_csv`],
//! [`ChartPayload::from_json`]); SVG embeds every plotted value as a text
//! element so charts can be checked by string search.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analysis::{DistributionPair, EvennessTriple, GapRow, Metric, SeriesPoint};
use crate::error::{Error, Result};
use crate::report::Report;
use crate::scheme::{Axis, Cell};
use crate::table::Distribution;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartKind {
    Line,
    Dumbbell,
    GroupedBar,
    DistributionPair,
}

impl ChartKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ChartKind::Line => "line",
            ChartKind::Dumbbell => "dumbbell",
            ChartKind::GroupedBar => "grouped_bar",
            ChartKind::DistributionPair => "distribution_pair",
        }
    }
}

impl FromStr for ChartKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_lowercase().replace('-', "_").as_str() {
            "line" => Ok(ChartKind::Line),
            "dumbbell" => Ok(ChartKind::Dumbbell),
            "grouped_bar" | "bar" => Ok(ChartKind::GroupedBar),
            "distribution_pair" | "pair" => Ok(ChartKind::DistributionPair),
            other => Err(Error::invalid(
                "kind",
                format!("`{other}` (expected line, dumbbell, grouped-bar or distribution-pair)"),
            )),
        }
    }
}

impl fmt::Display for ChartKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartFormat {
    Csv,
    Json,
    Svg,
}

impl FromStr for ChartFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_lowercase().as_str() {
            "csv" => Ok(ChartFormat::Csv),
            "json" => Ok(ChartFormat::Json),
            "svg" => Ok(ChartFormat::Svg),
            other => Err(Error::invalid(
                "format",
                format!("`{other}` (expected csv, json or svg)"),
            )),
        }
    }
}

/// The data behind a chart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", content = "data", rename_all = "snake_case")]
pub enum ChartPayload {
    Series(Vec<SeriesPoint>),
    Triples(Vec<EvennessTriple>),
    Gaps(Vec<GapRow>),
    Distributions(Box<DistributionPair>),
}

impl ChartPayload {
    fn shape(&self) -> &'static str {
        match self {
            ChartPayload::Series(_) => "series",
            ChartPayload::Triples(_) => "triples",
            ChartPayload::Gaps(_) => "gaps",
            ChartPayload::Distributions(_) => "distributions",
        }
    }

    /// The chart kind that fits this payload.
    pub fn natural_kind(&self) -> ChartKind {
        match self {
            ChartPayload::Series(_) => ChartKind::Line,
            ChartPayload::Triples(_) => ChartKind::Dumbbell,
            ChartPayload::Gaps(_) => ChartKind::GroupedBar,
            ChartPayload::Distributions(_) => ChartKind::DistributionPair,
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            ChartPayload::Series(v) => v.is_empty(),
            ChartPayload::Triples(v) => v.is_empty(),
            ChartPayload::Gaps(v) => v.is_empty(),
            ChartPayload::Distributions(d) => d.program.is_empty(),
        }
    }

    /// Chart data for reports that have a natural chart; `None` for scalar
    /// and tabular reports.
    pub fn from_report(report: &Report) -> Option<Self> {
        match report {
            Report::Series(r) => Some(ChartPayload::Series(r.points.clone())),
            Report::EvennessSeries(r) => Some(ChartPayload::Series(r.points.clone())),
            Report::EvennessComparison(r) => Some(ChartPayload::Triples(r.rows.clone())),
            Report::Gap(r) => Some(ChartPayload::Gaps(r.rows.clone())),
            Report::Distributions(r) => Some(ChartPayload::Distributions(Box::new(r.clone()))),
            _ => None,
        }
    }

    /// Flat CSV with full-precision numbers.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        match self {
            ChartPayload::Series(points) => {
                w.write_record(["group", "year", "value", "metric"])?;
                for p in points {
                    w.write_record([
                        p.group.clone(),
                        p.year.to_string(),
                        p.value.to_string(),
                        p.metric.to_string(),
                    ])?;
                }
            }
            ChartPayload::Triples(rows) => {
                w.write_record(["institution_id", "gender", "race", "intersectional"])?;
                for t in rows {
                    w.write_record([
                        t.institution_id.clone(),
                        t.gender.to_string(),
                        t.race.to_string(),
                        t.intersectional.to_string(),
                    ])?;
                }
            }
            ChartPayload::Gaps(rows) => {
                w.write_record(["gender", "race", "program_share", "university_share", "gap"])?;
                for g in rows {
                    w.write_record([
                        g.cell.gender.clone(),
                        g.cell.race.clone(),
                        g.program_share.to_string(),
                        g.university_share.to_string(),
                        g.gap.to_string(),
                    ])?;
                }
            }
            ChartPayload::Distributions(d) => {
                w.write_record(["institution", "year", "program_scope", "reference_scope", "distance"])?;
                w.write_record([
                    d.institution.clone(),
                    d.year.to_string(),
                    d.program_scope.clone(),
                    d.reference_scope.clone(),
                    d.distance.to_string(),
                ])?;
                // Second block: per-category probabilities.
                w.write_record(["category", "program", "reference", "", ""])?;
                for ((label, p), q) in d
                    .program
                    .labels()
                    .iter()
                    .zip(d.program.probabilities())
                    .zip(d.reference.probabilities())
                {
                    w.write_record([
                        label.clone(),
                        p.to_string(),
                        q.to_string(),
                        String::new(),
                        String::new(),
                    ])?;
                }
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv writer emits UTF-8"))
    }

    /// Parses the output of [`ChartPayload::to_csv`] for the given kind.
    pub fn from_csv(kind: ChartKind, text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let rows: Vec<csv::StringRecord> = reader.records().collect::<std::result::Result<_, _>>()?;
        let bad = |line: usize, reason: &str| Error::MalformedRow {
            line: line as u64 + 2,
            reason: reason.to_string(),
        };
        let num = |line: usize, s: &str| -> Result<f64> { s.parse().map_err(|_| bad(line, "expected a number")) };
        Ok(match kind {
            ChartKind::Line => ChartPayload::Series(
                rows.iter()
                    .enumerate()
                    .map(|(i, r)| {
                        Ok(SeriesPoint {
                            group: r[0].to_string(),
                            year: r[1].parse().map_err(|_| bad(i, "expected a year"))?,
                            value: num(i, &r[2])?,
                            metric: Metric::parse(&r[3])?,
                        })
                    })
                    .collect::<Result<_>>()?,
            ),
            ChartKind::Dumbbell => ChartPayload::Triples(
                rows.iter()
                    .enumerate()
                    .map(|(i, r)| {
                        Ok(EvennessTriple {
                            institution_id: r[0].to_string(),
                            gender: num(i, &r[1])?,
                            race: num(i, &r[2])?,
                            intersectional: num(i, &r[3])?,
                        })
                    })
                    .collect::<Result<_>>()?,
            ),
            ChartKind::GroupedBar => ChartPayload::Gaps(
                rows.iter()
                    .enumerate()
                    .map(|(i, r)| {
                        Ok(GapRow {
                            cell: Cell::new(&r[0], &r[1]),
                            program_share: num(i, &r[2])?,
                            university_share: num(i, &r[3])?,
                            gap: num(i, &r[4])?,
                        })
                    })
                    .collect::<Result<_>>()?,
            ),
            ChartKind::DistributionPair => {
                let (head, cats) = rows.split_first().ok_or_else(|| bad(0, "missing summary row"))?;
                let cats = cats.get(1..).unwrap_or_default();
                let labels: Vec<String> = cats.iter().map(|r| r[0].to_string()).collect();
                let column = |c: usize| -> Result<Vec<f64>> {
                    cats.iter().enumerate().map(|(i, r)| num(i + 2, &r[c])).collect()
                };
                ChartPayload::Distributions(Box::new(DistributionPair {
                    institution: head[0].to_string(),
                    year: head[1].parse().map_err(|_| bad(0, "expected a year"))?,
                    program_scope: head[2].to_string(),
                    reference_scope: head[3].to_string(),
                    distance: num(0, &head[4])?,
                    program: Distribution::new(Axis::Intersectional, labels.clone(), column(1)?)?,
                    reference: Distribution::new(Axis::Intersectional, labels, column(2)?)?,
                }))
            }
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ChartDocument = serde_json::from_str(text)?;
        Ok(doc.payload)
    }
}

/// A chart to emit: what to draw, from which data, in which format.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartSpec {
    pub kind: ChartKind,
    pub title: String,
    pub payload: ChartPayload,
    pub format: ChartFormat,
}

impl ChartSpec {
    pub fn new(kind: ChartKind, title: impl Into<String>, payload: ChartPayload, format: ChartFormat) -> Self {
        Self {
            kind,
            title: title.into(),
            payload,
            format,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.payload.natural_kind() != self.kind {
            return Err(Error::KindMismatch {
                kind: self.kind.to_string(),
                payload: self.payload.shape().to_string(),
            });
        }
        if self.payload.is_empty() {
            return Err(Error::EmptyPayload);
        }
        Ok(())
    }
}

/// JSON chart export layout.
#[derive(Serialize, Deserialize)]
struct ChartDocument {
    kind: ChartKind,
    title: String,
    #[serde(flatten)]
    payload: ChartPayload,
}

/// Renders a chart to text in the requested format.
pub fn emit_chart(spec: &ChartSpec) -> Result<String> {
    spec.validate()?;
    match spec.format {
        ChartFormat::Csv => spec.payload.to_csv(),
        ChartFormat::Json => {
            let doc = ChartDocument {
                kind: spec.kind,
                title: spec.title.clone(),
                payload: spec.payload.clone(),
            };
            Ok(serde_json::to_string_pretty(&doc)?)
        }
        ChartFormat::Svg => Ok(render_svg(spec)),
    }
}

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn num1(v: f64) -> String {
    format!("{v:.1}")
}

struct Svg {
    out: String,
}

impl Svg {
    fn new(title: &str, height: f64) -> Self {
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="11">"#
        );
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text class="title" x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            WIDTH / 2.0,
            escape(title)
        );
        Self { out }
    }

    fn text(&mut self, class: &str, x: f64, y: f64, anchor: &str, s: &str) {
        let _ = writeln!(
            self.out,
            r#"<text class="{class}" x="{x:.1}" y="{y:.1}" text-anchor="{anchor}">{}</text>"#,
            escape(s)
        );
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str) {
        let _ = writeln!(
            self.out,
            r#"<line x1="{x1:.1}" y1="{y1:.1}" x2="{x2:.1}" y2="{y2:.1}" stroke="{stroke}"/>"#
        );
    }

    fn legend(&mut self, entries: &[(String, &str, Marker)]) {
        let x = WIDTH - RIGHT + 20.0;
        self.out.push_str("<g class=\"legend\">\n");
        for (i, (label, color, marker)) in entries.iter().enumerate() {
            let y = TOP + 10.0 + 18.0 * i as f64;
            marker.draw(&mut self.out, x, y, color);
            self.text("legend-label", x + 12.0, y + 4.0, "start", label);
        }
        self.out.push_str("</g>\n");
    }

    fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }
}

#[derive(Clone, Copy)]
enum Marker {
    Circle,
    Triangle,
    Diamond,
    Square,
}

impl Marker {
    fn draw(&self, out: &mut String, x: f64, y: f64, color: &str) {
        let _ = match self {
            Marker::Circle => writeln!(
                out,
                r#"<circle class="marker circle" cx="{x:.1}" cy="{y:.1}" r="5" fill="{color}"/>"#
            ),
            Marker::Triangle => writeln!(
                out,
                r#"<polygon class="marker triangle" points="{:.1},{:.1} {:.1},{:.1} {:.1},{:.1}" fill="{color}"/>"#,
                x,
                y - 6.0,
                x - 5.5,
                y + 4.5,
                x + 5.5,
                y + 4.5
            ),
            Marker::Diamond => writeln!(
                out,
                r#"<polygon class="marker diamond" points="{:.1},{:.1} {:.1},{:.1} {:.1},{:.1} {:.1},{:.1}" fill="{color}"/>"#,
                x,
                y - 6.0,
                x + 6.0,
                y,
                x,
                y + 6.0,
                x - 6.0,
                y
            ),
            Marker::Square => writeln!(
                out,
                r#"<rect class="marker square" x="{:.1}" y="{:.1}" width="10" height="10" fill="{color}"/>"#,
                x - 5.0,
                y - 5.0
            ),
        };
    }
}

/// Linear map from `[lo, hi]` onto `[a, b]`.
fn scale(lo: f64, hi: f64, a: f64, b: f64) -> impl Fn(f64) -> f64 {
    move |v| {
        if hi > lo {
            a + (v - lo) / (hi - lo) * (b - a)
        } else {
            (a + b) / 2.0
        }
    }
}

fn value_bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let lo = lo.min(0.0);
    let hi = if hi <= lo { lo + 1.0 } else { hi };
    (lo, hi)
}

fn y_axis(svg: &mut Svg, lo: f64, hi: f64, y: &dyn Fn(f64) -> f64, label: &str) {
    let right = WIDTH - RIGHT;
    svg.line(LEFT, TOP, LEFT, HEIGHT - BOTTOM, "black");
    for i in 0..=4 {
        let v = lo + (hi - lo) * i as f64 / 4.0;
        svg.line(LEFT - 4.0, y(v), right, y(v), "#dddddd");
        svg.text("tick", LEFT - 6.0, y(v) + 4.0, "end", &num1(v));
    }
    let _ = writeln!(
        svg.out,
        r#"<text class="axis-label" transform="translate(16,{:.1}) rotate(-90)" text-anchor="middle">{}</text>"#,
        (TOP + HEIGHT - BOTTOM) / 2.0,
        escape(label)
    );
}

fn render_line(spec: &ChartSpec, points: &[SeriesPoint]) -> String {
    let mut groups: Vec<&str> = Vec::new();
    for p in points {
        if !groups.contains(&p.group.as_str()) {
            groups.push(&p.group);
        }
    }
    let (y0, y1) = (
        points.iter().map(|p| p.year).min().unwrap_or(0),
        points.iter().map(|p| p.year).max().unwrap_or(0),
    );
    let (lo, hi) = value_bounds(points.iter().map(|p| p.value));
    let x = scale(y0 as f64, y1 as f64, LEFT + 20.0, WIDTH - RIGHT - 20.0);
    let y = scale(lo, hi, HEIGHT - BOTTOM, TOP);
    let mut svg = Svg::new(&spec.title, HEIGHT);
    let metric = points.first().map(|p| p.metric).unwrap_or(Metric::StandardShare);
    y_axis(
        &mut svg,
        lo,
        hi,
        &y,
        if metric == Metric::JsDistance {
            "distance"
        } else {
            "percent"
        },
    );
    svg.line(LEFT, HEIGHT - BOTTOM, WIDTH - RIGHT, HEIGHT - BOTTOM, "black");
    for year in y0..=y1 {
        svg.text(
            "year",
            x(year as f64),
            HEIGHT - BOTTOM + 16.0,
            "middle",
            &year.to_string(),
        );
    }
    svg.text(
        "axis-label",
        (LEFT + WIDTH - RIGHT) / 2.0,
        HEIGHT - 16.0,
        "middle",
        "year",
    );
    let mut legend = Vec::new();
    for (i, group) in groups.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let series: Vec<&SeriesPoint> = points.iter().filter(|p| p.group == *group).collect();
        let path: Vec<String> = series
            .iter()
            .map(|p| format!("{:.1},{:.1}", x(p.year as f64), y(p.value)))
            .collect();
        let _ = writeln!(svg.out, r#"<g class="series" data-group="{}">"#, escape(group));
        let _ = writeln!(
            svg.out,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            path.join(" ")
        );
        for p in series {
            Marker::Circle.draw(&mut svg.out, x(p.year as f64), y(p.value), color);
            svg.text("value", x(p.year as f64), y(p.value) - 8.0, "middle", &num1(p.value));
        }
        svg.out.push_str("</g>\n");
        legend.push((group.to_string(), color, Marker::Circle));
    }
    svg.legend(&legend);
    svg.finish()
}

fn render_dumbbell(spec: &ChartSpec, rows: &[EvennessTriple]) -> String {
    let row_height = 28.0;
    let height = TOP + BOTTOM + row_height * rows.len() as f64;
    let x = scale(0.0, 100.0, LEFT + 60.0, WIDTH - RIGHT);
    let mut svg = Svg::new(&spec.title, height);
    let axis_y = height - BOTTOM + 8.0;
    svg.line(x(0.0), axis_y, x(100.0), axis_y, "black");
    for v in [0.0, 25.0, 50.0, 75.0, 100.0] {
        svg.line(x(v), TOP, x(v), axis_y, "#eeeeee");
        svg.text("tick", x(v), axis_y + 14.0, "middle", &num1(v));
    }
    svg.text("axis-label", x(50.0), height - 14.0, "middle", "evenness (percent)");
    let markers = [
        ("gender", PALETTE[0], Marker::Circle),
        ("race", PALETTE[1], Marker::Triangle),
        ("intersectional", PALETTE[2], Marker::Diamond),
    ];
    for (i, t) in rows.iter().enumerate() {
        let cy = TOP + row_height * (i as f64 + 0.5);
        let values = [t.gender, t.race, t.intersectional];
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let _ = writeln!(
            svg.out,
            r#"<g class="row" data-institution="{}">"#,
            escape(&t.institution_id)
        );
        svg.text("institution", LEFT + 50.0, cy + 4.0, "end", &t.institution_id);
        svg.line(x(lo), cy, x(hi), cy, "#888888");
        for ((name, color, marker), v) in markers.iter().zip(values) {
            marker.draw(&mut svg.out, x(v), cy, color);
            let _ = writeln!(
                svg.out,
                r#"<text class="value {name}" x="{:.1}" y="{:.1}" text-anchor="middle" font-size="9">{}</text>"#,
                x(v),
                cy - 8.0,
                num1(v)
            );
        }
        svg.out.push_str("</g>\n");
    }
    svg.legend(&markers.map(|(n, c, m)| (n.to_string(), c, m)));
    svg.finish()
}

/// Vertical grouped bars: one group per category, one bar per series.
fn render_bars(spec: &ChartSpec, categories: &[String], series: &[(&str, Vec<f64>)], y_label: &str) -> String {
    let (lo, hi) = value_bounds(series.iter().flat_map(|(_, v)| v.iter().copied()));
    let y = scale(lo, hi, HEIGHT - BOTTOM, TOP);
    let mut svg = Svg::new(&spec.title, HEIGHT + 80.0);
    y_axis(&mut svg, lo, hi, &y, y_label);
    svg.line(LEFT, y(0.0), WIDTH - RIGHT, y(0.0), "black");
    let slot = (WIDTH - RIGHT - LEFT) / categories.len().max(1) as f64;
    let bar = (slot * 0.8) / series.len().max(1) as f64;
    for (c, category) in categories.iter().enumerate() {
        let x0 = LEFT + slot * c as f64 + slot * 0.1;
        let _ = writeln!(svg.out, r#"<g class="row" data-category="{}">"#, escape(category));
        for (s, (name, values)) in series.iter().enumerate() {
            let v = values[c];
            let (top, bottom) = (y(v.max(0.0)), y(v.min(0.0)));
            let bx = x0 + bar * s as f64;
            let _ = writeln!(
                svg.out,
                r#"<rect class="bar {}" x="{bx:.1}" y="{top:.1}" width="{:.1}" height="{:.1}" fill="{}"/>"#,
                escape(name),
                bar * 0.95,
                (bottom - top).max(0.5),
                PALETTE[s % PALETTE.len()]
            );
            svg.text("value", bx + bar / 2.0, top - 3.0, "middle", &num1(v));
        }
        let lx = x0 + slot * 0.4;
        let ly = HEIGHT - BOTTOM + 12.0;
        let _ = writeln!(
            svg.out,
            r#"<text class="category" transform="translate({lx:.1},{ly:.1}) rotate(40)" text-anchor="start">{}</text>"#,
            escape(category)
        );
        svg.out.push_str("</g>\n");
    }
    let legend: Vec<_> = series
        .iter()
        .enumerate()
        .map(|(i, (n, _))| (n.to_string(), PALETTE[i % PALETTE.len()], Marker::Square))
        .collect();
    svg.legend(&legend);
    svg.finish()
}

fn render_svg(spec: &ChartSpec) -> String {
    match &spec.payload {
        ChartPayload::Series(points) => render_line(spec, points),
        ChartPayload::Triples(rows) => render_dumbbell(spec, rows),
        ChartPayload::Gaps(rows) => {
            let categories: Vec<String> = rows.iter().map(|g| g.cell.to_string()).collect();
            let series = [
                ("program", rows.iter().map(|g| g.program_share).collect()),
                ("university", rows.iter().map(|g| g.university_share).collect()),
            ];
            render_bars(spec, &categories, &series, "percent of degrees")
        }
        ChartPayload::Distributions(d) => {
            let series = [
                (
                    d.program_scope.as_str(),
                    d.program.probabilities().iter().map(|p| 100.0 * p).collect(),
                ),
                (
                    d.reference_scope.as_str(),
                    d.reference.probabilities().iter().map(|p| 100.0 * p).collect(),
                ),
            ];
            let mut svg = render_bars(spec, d.program.labels(), &series, "percent of degrees");
            let note = format!(
                "<text class=\"distance\" x=\"{:.1}\" y=\"40\" text-anchor=\"middle\">JS distance {:.4}</text>\n</svg>\n",
                WIDTH / 2.0,
                d.distance
            );
            svg.truncate(svg.len() - "</svg>\n".len());
            svg.push_str(&note);
            svg
        }
    }
}
