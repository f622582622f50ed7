//! Closed-form upper and lower bounds for `D(⟦-m,m⟧^d)` and `D(B_m^(d))`,
//! joined with construction lengths and enumerated `D^(3)` values, and
//! emitted as CSV / JSON tables.

use std::f64::consts::PI;
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constructions::ConstructionKind;
use crate::lattice::GroundSet;
use crate::primes;
use crate::support::{davenport_support_dp1, Dp1Options};
use crate::zerosum::{davenport_exact, davenport_support_k_small, SearchBudget};

pub const SCHEMA: &str = "davenport-bounds/1";
pub const CSV_HEADER: &str = "shape,d,m,bound_name,kind,exactness,value";

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("unknown shape {0:?}")]
    Shape(String),
    #[error("bad csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("bad csv header {0:?}")]
    Header(String),
    #[error("dimension must be positive")]
    Dimension,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Box,
    Ball,
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Shape::Box => "box",
            Shape::Ball => "ball",
        })
    }
}

impl FromStr for Shape {
    type Err = BoundsError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "box" => Ok(Shape::Box),
            "ball" | "disk" => Ok(Shape::Ball),
            _ => Err(BoundsError::Shape(s.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Lower,
    Upper,
    /// An exactly computed value (for `D^(d+1)`, or `D` when known).
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Exactness {
    /// A pointwise valid statement.
    Exact,
    /// Leading term of an asymptotic statement; never compared pointwise.
    Asymptotic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundEntry {
    pub name: String,
    pub kind: Kind,
    pub exactness: Exactness,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub shape: Shape,
    pub d: usize,
    pub m: i64,
    pub entries: Vec<BoundEntry>,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl BoundRow {
    fn push(&mut self, name: &str, kind: Kind, exactness: Exactness, value: f64) {
        self.entries.push(BoundEntry { name: name.to_string(), kind, exactness, value });
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries.iter().find(|e| e.name == name).map(|e| e.value)
    }

    fn pointwise(&self, kind: Kind) -> impl Iterator<Item = &BoundEntry> {
        self.entries.iter().filter(move |e| e.kind == kind && e.exactness == Exactness::Exact)
    }

    pub fn best_lower(&self) -> Option<f64> {
        self.pointwise(Kind::Lower).map(|e| e.value).reduce(f64::max)
    }

    pub fn best_upper(&self) -> Option<f64> {
        self.pointwise(Kind::Upper).map(|e| e.value).reduce(f64::min)
    }

    /// Pointwise lower bounds and computed values do not exceed any pointwise upper bound.
    pub fn consistent(&self) -> bool {
        let Some(up) = self.best_upper() else { return true };
        self.pointwise(Kind::Lower)
            .chain(self.pointwise(Kind::Exact))
            .all(|e| e.value <= up * (1.0 + 1e-12))
    }
}

#[derive(Clone, Debug)]
pub struct BoundsOptions {
    /// Attach the enumerated `D^(3)` for planar shapes.
    pub enumerate: bool,
    pub dp1: Dp1Options,
    /// Attach construction lengths (verifying each construction).
    pub constructions: bool,
}

impl Default for BoundsOptions {
    fn default() -> Self {
        BoundsOptions { enumerate: true, dp1: Dp1Options::default(), constructions: true }
    }
}

/// `#{x ∈ Z^d : den·|x|² ≤ num}`.
pub fn count_scaled_ball(d: usize, num: i128, den: i128) -> u64 {
    if num < 0 {
        return 0;
    }
    if d == 0 {
        return 1;
    }
    let r = (num / den).isqrt();
    (-r..=r).map(|x| count_scaled_ball(d - 1, num - den * x * x, den)).sum()
}

/// Integer part of `m/√d`.
fn floor_div_sqrt(m: i64, d: usize) -> i64 {
    (m * m / d as i64).isqrt()
}

/// `⌈√2·m⌉`.
fn ceil_sqrt2(m: i64) -> i64 {
    let r = (2 * m * m).isqrt();
    if r * r < 2 * m * m {
        r + 1
    } else {
        r
    }
}

/// Integer points of the planar disc of radius `√5/2·r`, i.e. `4|x|² ≤ 5r²`.
pub fn steinitz_disk_count(r: i64) -> u64 {
    count_scaled_ball(2, 5 * (r as i128).pow(2), 4)
}

/// Integer points of the 3-ball of radius `7/3·r`, i.e. `9|x|² ≤ 49r²`.
pub fn steinitz_ball3_count(r: i64) -> u64 {
    count_scaled_ball(3, 49 * (r as i128).pow(2), 9)
}

fn construction_kinds(shape: Shape, d: usize) -> &'static [ConstructionKind] {
    match (shape, d) {
        (Shape::Box, 2) => &[ConstructionKind::Box2],
        (Shape::Box, 3) => &[ConstructionKind::Box3],
        (Shape::Ball, 2) => &[ConstructionKind::DiskS1, ConstructionKind::DiskS2],
        (Shape::Ball, 3) => &[ConstructionKind::Ball3],
        _ => &[],
    }
}

pub fn evaluate_row(shape: Shape, d: usize, m: i64, opts: &BoundsOptions) -> BoundRow {
    use Exactness::{Asymptotic, Exact};
    use Kind::{Lower, Upper};
    let mut row = BoundRow { shape, d, m, entries: Vec::new(), notes: Vec::new() };
    let mf = m as f64;
    let di = d as i32;
    // (2(d + 1/d - 1)m + 1)^d for the box, inherited by the ball.
    let old_upper = if d == 2 {
        ((2 * m + 1) * (4 * m + 1)) as f64
    } else {
        (2.0 * (d as f64 + 1.0 / d as f64 - 1.0) * mf + 1.0).powi(di)
    };

    match shape {
        Shape::Box => {
            if m >= 2 {
                row.push("pt-lower", Lower, Exact, ((2 * m - 1) as f64).powi(di));
                row.push("pt-upper", Upper, Exact, old_upper);
            }
            if d == 1 && m >= 2 {
                row.push("line-exact", Kind::Exact, Exact, (2 * m - 1) as f64);
            }
            if d == 2 && m >= 2 {
                let q = primes::q_of(m as u64).expect("m within prime cache") as i64;
                row.push("4m2-q", Lower, Exact, (4 * m * m - q) as f64);
                let r = ceil_sqrt2(m);
                let count = steinitz_disk_count(r) as f64;
                row.push("ball-route-count", Upper, Exact, count);
                let area = PI * (5f64.sqrt() * r as f64 / 2.0 + 2.0).powi(2);
                row.push("ball-route-area", Upper, Exact, area);
                row.push("4m2-leading", Lower, Asymptotic, 4.0 * mf * mf);
                row.push("5pi/2-leading", Upper, Asymptotic, 2.5 * PI * mf * mf);
                for (name, v) in [("ball-route-count", count), ("ball-route-area", area)] {
                    if old_upper < v {
                        row.notes.push(format!("pt-upper tighter than {name}"));
                    }
                }
            }
            if d == 3 {
                row.push("16m3-leading", Lower, Asymptotic, 16.0 * mf.powi(3));
            }
        }
        Shape::Ball => {
            let side = floor_div_sqrt(m, d);
            if side >= 1 {
                row.push("inscribed-box-lower", Lower, Exact, ((2 * side - 1) as f64).powi(di));
            }
            if m == 1 {
                row.push("unit-ball-exact", Kind::Exact, Exact, 2.0);
            }
            if m >= 2 {
                row.push("box-upper", Upper, Exact, old_upper);
            }
            if d == 2 {
                row.push("steinitz-count", Upper, Exact, steinitz_disk_count(m) as f64);
                row.push("steinitz-area", Upper, Exact, PI * (5f64.sqrt() * mf / 2.0 + 2.0).powi(2));
                if m >= 5 {
                    row.push("64/25-explicit", Lower, Exact, 64.0 / 25.0 * mf * mf - 23.0 * mf + 51.0);
                    let mp = (m - m % 5) as f64;
                    row.push("64/25-reduced", Lower, Exact, 64.0 / 25.0 * mp * mp - 12.0 / 5.0 * mp + 1.0);
                }
                row.push("3sqrt3/2-leading", Lower, Asymptotic, 1.5 * 3f64.sqrt() * mf * mf);
                row.push("5pi/4-leading", Upper, Asymptotic, 1.25 * PI * mf * mf);
            }
            if d == 3 {
                row.push("steinitz-count", Upper, Exact, steinitz_ball3_count(m) as f64);
                row.push("16/3sqrt3-leading", Lower, Asymptotic, 16.0 / (3.0 * 3f64.sqrt()) * mf.powi(3));
                row.push("1372pi/81-leading", Upper, Asymptotic, 4.0 / 3.0 * PI * (7.0 * mf / 3.0).powi(3));
            }
        }
    }

    if opts.constructions {
        for kind in construction_kinds(shape, d) {
            match kind.build(m) {
                Ok(c) if c.is_valid() => row.push(kind.name(), Lower, Exact, c.sequence.len() as f64),
                Ok(c) => row.notes.push(format!("{} invalid: {}", kind.name(), c.failed_conditions().join(", "))),
                Err(_) => {}
            }
        }
    }

    if opts.enumerate && d == 2 {
        let g = match shape {
            Shape::Box => GroundSet::cube(m, 2),
            Shape::Ball => GroundSet::ball(m, 2),
        };
        match davenport_support_dp1(&g, &opts.dp1) {
            Ok(r) if !r.truncated && r.certified => row.push("support-dp1", Kind::Exact, Exact, r.value as f64),
            Ok(_) => row.notes.push("support-dp1 not certified".into()),
            Err(e) => row.notes.push(format!("support-dp1: {e}")),
        }
    }
    row
}

/// One row per `m`, in increasing order.
pub fn evaluate_bounds(shape: Shape, d: usize, ms: RangeInclusive<i64>, opts: &BoundsOptions) -> Result<Vec<BoundRow>, BoundsError> {
    if d == 0 {
        return Err(BoundsError::Dimension);
    }
    let ms: Vec<i64> = ms.filter(|&m| m >= 1).collect();
    Ok(ms.into_par_iter().map(|m| evaluate_row(shape, d, m, opts)).collect())
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
struct CsvRecord {
    shape: Shape,
    d: usize,
    m: i64,
    bound_name: String,
    kind: Kind,
    exactness: Exactness,
    value: f64,
}

pub fn to_csv(rows: &[BoundRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        for e in &row.entries {
            w.serialize(CsvRecord {
                shape: row.shape,
                d: row.d,
                m: row.m,
                bound_name: e.name.clone(),
                kind: e.kind,
                exactness: e.exactness,
                value: e.value,
            })
            .expect("write to memory");
        }
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 csv")
}

/// Inverse of [`to_csv`]; notes are not carried by the CSV form.
pub fn parse_csv(text: &str) -> Result<Vec<BoundRow>, BoundsError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers()?.iter().collect::<Vec<_>>().join(",");
    if header != CSV_HEADER {
        return Err(BoundsError::Header(header));
    }
    let mut rows: Vec<BoundRow> = Vec::new();
    for rec in r.deserialize() {
        let rec: CsvRecord = rec?;
        let entry = BoundEntry { name: rec.bound_name, kind: rec.kind, exactness: rec.exactness, value: rec.value };
        match rows.last_mut() {
            Some(last) if last.shape == rec.shape && last.d == rec.d && last.m == rec.m => last.entries.push(entry),
            _ => rows.push(BoundRow { shape: rec.shape, d: rec.d, m: rec.m, entries: vec![entry], notes: Vec::new() }),
        }
    }
    Ok(rows)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BoundsDocument {
    pub schema: String,
    pub rows: Vec<BoundRow>,
}

pub fn to_json(rows: &[BoundRow]) -> serde_json::Value {
    serde_json::to_value(BoundsDocument { schema: SCHEMA.to_string(), rows: rows.to_vec() }).expect("serializable rows")
}

#[derive(Clone, Debug, Serialize)]
pub struct Box2Evidence {
    pub m: i64,
    /// `D` by exhaustive search, tiny `m` only.
    pub dfs_d: Option<u64>,
    /// `D^(3)` by exhaustive search, tiny `m` only.
    pub dfs_d3: Option<u64>,
    pub dp1: Option<u64>,
    pub formula: Option<u64>,
    pub matches: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiskEvidence {
    pub m: i64,
    pub dp1: u64,
    pub ratio: f64,
    pub nondecreasing: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct EvidenceReport {
    pub box2: Vec<Box2Evidence>,
    pub disk: Vec<DiskEvidence>,
    pub disk_asymptote: f64,
    /// Statements the tables support but do not prove.
    pub conjectural: Vec<&'static str>,
}

/// Compares exhaustive search, support enumeration and the closed form
/// `4m² - q(m)` on `⟦-m,m⟧²`, and tracks `D^(3)(B_m^(2))/m²`.
pub fn conjecture_evidence(max_m_box2: i64, max_m_disk: i64, budget: &SearchBudget) -> EvidenceReport {
    let opts = Dp1Options::default();
    let box2 = (1..=max_m_box2)
        .into_par_iter()
        .map(|m| {
            let g = GroundSet::cube(m, 2);
            let dfs_d = (m == 1).then(|| davenport_exact(&g, budget).ok().map(|r| r.value)).flatten();
            let dfs_d3 = (m <= 2).then(|| davenport_support_k_small(&g, 3, budget).ok().map(|r| r.value)).flatten();
            let dp1 = davenport_support_dp1(&g, &opts).ok().filter(|r| r.certified).map(|r| r.value);
            let formula = (m >= 2).then(|| 4 * (m * m) as u64 - primes::q_of(m as u64).expect("small m"));
            let matches = match (dp1, formula) {
                (Some(a), Some(b)) => a == b && dfs_d3.is_none_or(|x| x == a),
                _ => dfs_d == Some(4),
            };
            Box2Evidence { m, dfs_d, dfs_d3, dp1, formula, matches }
        })
        .collect();
    let values: Vec<(i64, u64)> = (5..=max_m_disk)
        .into_par_iter()
        .filter_map(|m| {
            davenport_support_dp1(&GroundSet::ball(m, 2), &opts)
                .ok()
                .filter(|r| r.certified)
                .map(|r| (m, r.value))
        })
        .collect();
    let disk = values
        .iter()
        .enumerate()
        .map(|(i, &(m, v))| DiskEvidence {
            m,
            dp1: v,
            ratio: v as f64 / (m * m) as f64,
            nondecreasing: i == 0 || values[i - 1].1 <= v,
        })
        .collect();
    EvidenceReport {
        box2,
        disk,
        disk_asymptote: 1.5 * 3f64.sqrt(),
        conjectural: vec![
            "D(box(m,2)) = 4m^2 - q(m)",
            "D(ball(m,d)) = D^(d+1)(ball(m,d))",
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> BoundsOptions {
        BoundsOptions { enumerate: false, ..Default::default() }
    }

    #[test]
    fn disk_count() {
        assert_eq!(steinitz_disk_count(2), 21);
        assert_eq!(count_scaled_ball(2, 5, 1), 21);
        assert_eq!(count_scaled_ball(3, 1, 1), 7);
        assert_eq!(count_scaled_ball(1, 4, 1), 5);
    }

    #[test]
    fn rounding_helpers() {
        assert_eq!(ceil_sqrt2(4), 6);
        assert_eq!(ceil_sqrt2(5), 8);
        assert_eq!(floor_div_sqrt(10, 2), 7);
        assert_eq!(floor_div_sqrt(3, 3), 1);
    }

    #[test]
    fn box2_m4() {
        let row = evaluate_row(Shape::Box, 2, 4, &quick());
        assert_eq!(row.get("4m2-q"), Some(61.0));
        assert_eq!(row.get("box2"), Some(61.0));
        assert_eq!(row.get("pt-upper"), Some(153.0));
        assert!((row.get("ball-route-area").unwrap() - 238.2).abs() < 0.1);
        assert_eq!(row.notes, vec!["pt-upper tighter than ball-route-area".to_string()]);
        assert!(row.consistent());
    }

    #[test]
    fn disk_m2() {
        let row = evaluate_row(Shape::Ball, 2, 2, &BoundsOptions::default());
        assert_eq!(row.get("steinitz-count"), Some(21.0));
        assert!(row.consistent());
    }

    #[test]
    fn ball3_m30() {
        let row = evaluate_row(Shape::Ball, 3, 30, &BoundsOptions::default());
        assert_eq!(row.get("ball3"), Some(47952.0));
        assert!((row.get("1372pi/81-leading").unwrap() - 1.4368e6).abs() < 1e3);
        assert!(row.consistent());
    }

    #[test]
    fn csv_roundtrip() {
        let rows = evaluate_bounds(Shape::Ball, 2, 1..=12, &quick()).unwrap();
        let text = to_csv(&rows);
        assert!(text.starts_with(CSV_HEADER));
        let back = parse_csv(&text).unwrap();
        assert_eq!(to_csv(&back), text);
        assert_eq!(back.len(), rows.len());
        assert!(parse_csv("a,b\n1,2\n").is_err());
    }

    #[test]
    fn json_schema() {
        let rows = evaluate_bounds(Shape::Box, 3, 2..=3, &quick()).unwrap();
        let v = to_json(&rows);
        assert_eq!(v["schema"], SCHEMA);
        assert_eq!(v["rows"][1]["m"], 3);
    }

    #[test]
    fn generic_dimension() {
        let rows = evaluate_bounds(Shape::Ball, 5, 3..=6, &quick()).unwrap();
        assert!(rows.iter().all(|r| r.consistent() && r.best_upper().is_some()));
        assert!(evaluate_bounds(Shape::Ball, 0, 1..=2, &quick()).is_err());
    }
}
