//! Dataset representation, ingestion, validation, sample generation,
//! descriptive statistics and export.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DataError {
    #[error("input is not valid UTF-8")]
    NotUtf8,
    #[error("dataset is empty")]
    Empty,
    #[error("row {row}: expected 3 columns, found {found}")]
    ColumnCount { row: usize, found: usize },
    #[error("row {row}, column {column}: `{cell}` is not a number")]
    NotNumeric {
        row: usize,
        column: usize,
        cell: String,
    },
    #[error("row {row}: value is not finite")]
    NonFinite { row: usize },
    #[error("malformed CSV: {0}")]
    Csv(String),
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("expected 3 axes, found {0}")]
    AxisCount(usize),
    #[error("unknown dataset kind `{0}`")]
    UnknownKind(String),
    #[error("data is not gridded: {0}")]
    NotGridded(String),
    #[error("statistics need at least one value")]
    NoValues,
    #[error("sample resolution must be at least 2 per domain axis")]
    Resolution,
}

pub type Result<T, E = DataError> = std::result::Result<T, E>;

/// One of the three data axes. `X` and `Z` span the domain plane, `Y` is the
/// dependent value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Axis::X => 'X',
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        }
    }

    /// Navigation cycle order: Y, Z, X, then back to Y.
    pub fn next_in_cycle(self) -> Axis {
        match self {
            Axis::Y => Axis::Z,
            Axis::Z => Axis::X,
            Axis::X => Axis::Y,
        }
    }

    /// The remaining two axes, lower letter first.
    pub fn orthogonal(self) -> (Axis, Axis) {
        match self {
            Axis::X => (Axis::Y, Axis::Z),
            Axis::Y => (Axis::X, Axis::Z),
            Axis::Z => (Axis::X, Axis::Y),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    pub fn get(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.x,
            Axis::Y => self.y,
            Axis::Z => self.z,
        }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl From<[f64; 3]> for Point3 {
    fn from(v: [f64; 3]) -> Self {
        Point3::new(v[0], v[1], v[2])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxisMeta {
    pub name: String,
    pub unit: String,
    pub min: f64,
    pub max: f64,
}

/// Name and unit of an axis, without extrema.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxisLabel {
    pub name: String,
    #[serde(default)]
    pub unit: String,
}

impl AxisLabel {
    pub fn new(name: impl Into<String>, unit: impl Into<String>) -> Self {
        AxisLabel {
            name: name.into(),
            unit: unit.into(),
        }
    }

    pub fn default_for(column: usize) -> Self {
        let name = match column {
            0 => "X".to_string(),
            1 => "Y".to_string(),
            2 => "Z".to_string(),
            n => format!("Column {}", n + 1),
        };
        AxisLabel::new(name, "")
    }

    pub fn defaults() -> [AxisLabel; 3] {
        [0, 1, 2].map(AxisLabel::default_for)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetKind {
    Point,
    Surface,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KindHint {
    Point,
    Surface,
    Auto,
}

impl From<DatasetKind> for KindHint {
    fn from(kind: DatasetKind) -> Self {
        match kind {
            DatasetKind::Point => KindHint::Point,
            DatasetKind::Surface => KindHint::Surface,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// A complete rectangular lattice over the X-Z plane.
///
/// `heights` is stored row-major with `x` as the outer index, so the height at
/// `(xs[i], zs[j])` lives at `heights[i * zs.len() + j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceGrid {
    pub xs: Vec<f64>,
    pub zs: Vec<f64>,
    pub heights: Vec<f64>,
}

impl SurfaceGrid {
    pub fn height(&self, ix: usize, iz: usize) -> f64 {
        self.heights[ix * self.zs.len() + iz]
    }

    /// Wireframe cells along x and z.
    pub fn cell_dims(&self) -> (usize, usize) {
        (
            self.xs.len().saturating_sub(1),
            self.zs.len().saturating_sub(1),
        )
    }

    pub fn cell_count(&self) -> usize {
        let (cx, cz) = self.cell_dims();
        cx * cz
    }

    /// The four corner vertices of cell `(ix, iz)`.
    pub fn cell_corners(&self, ix: usize, iz: usize) -> [Point3; 4] {
        [(ix, iz), (ix + 1, iz), (ix, iz + 1), (ix + 1, iz + 1)]
            .map(|(i, j)| Point3::new(self.xs[i], self.height(i, j), self.zs[j]))
    }

    /// Mean of the four corner vertices of cell `(ix, iz)`.
    pub fn cell_center(&self, ix: usize, iz: usize) -> Point3 {
        let c = self.cell_corners(ix, iz);
        let mean = |f: fn(&Point3) -> f64| c.iter().map(f).sum::<f64>() / 4.0;
        Point3::new(mean(|p| p.x), mean(|p| p.y), mean(|p| p.z))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub kind: DatasetKind,
    pub points: Vec<Point3>,
    pub grid: Option<SurfaceGrid>,
    pub axes: [AxisMeta; 3],
    pub source_name: String,
}

impl Dataset {
    /// Builds a dataset, computing axis extrema from the points. Surface kind
    /// requires the points to form a complete lattice.
    pub fn from_points(
        kind: DatasetKind,
        points: Vec<Point3>,
        labels: [AxisLabel; 3],
        source_name: impl Into<String>,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(DataError::Empty);
        }
        if let Some(row) = points.iter().position(|p| !p.is_finite()) {
            return Err(DataError::NonFinite { row });
        }
        let grid = match kind {
            DatasetKind::Surface => Some(build_surface_grid(&points)?),
            DatasetKind::Point => None,
        };
        let axes = axis_extrema(&points, labels);
        Ok(Dataset {
            kind,
            points,
            grid,
            axes,
            source_name: source_name.into(),
        })
    }

    pub fn labels(&self) -> [AxisLabel; 3] {
        self.axes.clone().map(|a| AxisLabel::new(a.name, a.unit))
    }

    pub fn axis(&self, axis: Axis) -> &AxisMeta {
        &self.axes[axis.index()]
    }

    pub fn values(&self, axis: Axis) -> Vec<f64> {
        self.points.iter().map(|p| p.get(axis)).collect()
    }

    /// Equality over everything the data formats carry except the source name.
    pub fn canonical_eq(&self, other: &Dataset) -> bool {
        self.kind == other.kind
            && self.points.len() == other.points.len()
            && self
                .points
                .iter()
                .zip(&other.points)
                .all(|(a, b)| a.to_array().map(f64::to_bits) == b.to_array().map(f64::to_bits))
            && self.axes == other.axes
            && self.grid == other.grid
    }
}

fn axis_extrema(points: &[Point3], labels: [AxisLabel; 3]) -> [AxisMeta; 3] {
    let mut i = 0;
    labels.map(|label| {
        let axis = Axis::ALL[i];
        i += 1;
        let (min, max) = points
            .iter()
            .map(|p| p.get(axis))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            });
        AxisMeta {
            name: label.name,
            unit: label.unit,
            min,
            max,
        }
    })
}

fn parse_number(cell: &str) -> Option<f64> {
    cell.trim().parse::<f64>().ok()
}

/// Splits `Name (unit)` into its parts. Only a trailing parenthesized token
/// counts as a unit.
pub fn parse_label(cell: &str) -> AxisLabel {
    let cell = cell.trim();
    if let Some(stripped) = cell.strip_suffix(')') {
        if let Some(open) = stripped.rfind('(') {
            let name = stripped[..open].trim();
            let unit = stripped[open + 1..].trim();
            if !name.is_empty() && !unit.contains('(') {
                return AxisLabel::new(name, unit);
            }
        }
    }
    AxisLabel::new(cell, "")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeaderDetection {
    pub is_header: bool,
    pub labels: Vec<AxisLabel>,
}

/// A record is a header iff at least one of its cells does not parse as a
/// number. Numeric or blank cells in a header get the default label for
/// their column.
pub fn detect_header(first_record: &[&str]) -> HeaderDetection {
    let is_header = first_record.iter().any(|c| parse_number(c).is_none());
    let labels = first_record
        .iter()
        .enumerate()
        .map(|(i, cell)| {
            if !is_header || parse_number(cell).is_some() || cell.trim().is_empty() {
                AxisLabel::default_for(i)
            } else {
                parse_label(cell)
            }
        })
        .collect();
    HeaderDetection { is_header, labels }
}

/// Lattice construction over the distinct x and z values.
///
/// Repeated `(x, z)` pairs with the same height are merged; conflicting
/// heights or a missing lattice vertex are rejected.
pub fn build_surface_grid(points: &[Point3]) -> Result<SurfaceGrid> {
    if points.len() < 4 {
        return Err(DataError::NotGridded(format!(
            "{} points cannot form a lattice",
            points.len()
        )));
    }
    let key = |v: f64| (v + 0.0).to_bits();
    let mut cells: HashMap<(u64, u64), f64> = HashMap::with_capacity(points.len());
    for (row, p) in points.iter().enumerate() {
        if !p.is_finite() {
            return Err(DataError::NonFinite { row });
        }
        match cells.insert((key(p.x), key(p.z)), p.y) {
            Some(prev) if prev != p.y => {
                return Err(DataError::NotGridded(format!(
                    "row {row}: conflicting heights at x = {}, z = {}",
                    p.x, p.z
                )))
            }
            _ => {}
        }
    }
    let distinct = |f: fn(&Point3) -> f64| {
        let mut v: Vec<f64> = points.iter().map(f).map(|v| v + 0.0).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    };
    let xs = distinct(|p| p.x);
    let zs = distinct(|p| p.z);
    if xs.len() < 2 || zs.len() < 2 {
        return Err(DataError::NotGridded(
            "need at least two distinct values along x and z".into(),
        ));
    }
    if cells.len() != xs.len() * zs.len() {
        return Err(DataError::NotGridded(format!(
            "{} distinct vertices but a {}x{} lattice needs {}",
            cells.len(),
            xs.len(),
            zs.len(),
            xs.len() * zs.len()
        )));
    }
    let mut heights = Vec::with_capacity(cells.len());
    for &x in &xs {
        for &z in &zs {
            // every key is present: the count matches and keys are drawn from xs × zs
            heights.push(cells[&(key(x), key(z))]);
        }
    }
    Ok(SurfaceGrid { xs, zs, heights })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Issue {
    pub row_index: Option<usize>,
    pub description: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntegrityStatus {
    Valid,
    Invalid,
}

impl fmt::Display for IntegrityStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IntegrityStatus::Valid => "Valid",
            IntegrityStatus::Invalid => "Invalid",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrityReport {
    pub status: IntegrityStatus,
    pub issues: Vec<Issue>,
}

impl IntegrityReport {
    fn from_issues(issues: Vec<Issue>) -> Self {
        let status = if issues.is_empty() {
            IntegrityStatus::Valid
        } else {
            IntegrityStatus::Invalid
        };
        IntegrityReport { status, issues }
    }

    pub fn is_valid(&self) -> bool {
        self.status == IntegrityStatus::Valid
    }
}

pub fn validate(dataset: &Dataset) -> IntegrityReport {
    let mut issues = Vec::new();
    if dataset.points.is_empty() {
        issues.push(Issue {
            row_index: None,
            description: "dataset has no points".into(),
        });
    }
    for (row, p) in dataset.points.iter().enumerate() {
        if !p.is_finite() {
            issues.push(Issue {
                row_index: Some(row),
                description: format!("row {row} has a non-finite component"),
            });
        }
    }
    for axis in Axis::ALL {
        let meta = dataset.axis(axis);
        if meta.name.trim().is_empty() {
            issues.push(Issue {
                row_index: None,
                description: format!("axis {axis} has an empty name"),
            });
        }
        let values = dataset.values(axis);
        // non-finite rows are already reported above
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            continue;
        }
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if meta.min != lo || meta.max != hi {
            issues.push(Issue {
                row_index: None,
                description: format!(
                    "axis {axis} extrema [{}, {}] do not match the data [{lo}, {hi}]",
                    meta.min, meta.max
                ),
            });
        }
    }
    match (dataset.kind, &dataset.grid) {
        (DatasetKind::Surface, None) => issues.push(Issue {
            row_index: None,
            description: "surface dataset has no grid".into(),
        }),
        (DatasetKind::Surface, Some(grid)) => check_grid(dataset, grid, &mut issues),
        (DatasetKind::Point, Some(_)) => issues.push(Issue {
            row_index: None,
            description: "point dataset carries a surface grid".into(),
        }),
        (DatasetKind::Point, None) => {}
    }
    IntegrityReport::from_issues(issues)
}

fn check_grid(dataset: &Dataset, grid: &SurfaceGrid, issues: &mut Vec<Issue>) {
    let increasing = |v: &[f64]| v.windows(2).all(|w| w[0] < w[1]);
    if grid.xs.len() < 2 || grid.zs.len() < 2 {
        issues.push(Issue {
            row_index: None,
            description: "surface grid needs at least 2 values along x and z".into(),
        });
        return;
    }
    if !increasing(&grid.xs) || !increasing(&grid.zs) {
        issues.push(Issue {
            row_index: None,
            description: "surface grid coordinates are not strictly increasing".into(),
        });
        return;
    }
    if grid.heights.len() != grid.xs.len() * grid.zs.len() {
        issues.push(Issue {
            row_index: None,
            description: "surface grid height matrix is incomplete".into(),
        });
        return;
    }
    let mut seen = vec![false; grid.heights.len()];
    for (row, p) in dataset.points.iter().enumerate() {
        let ix = grid.xs.binary_search_by(|v| v.total_cmp(&(p.x + 0.0)));
        let iz = grid.zs.binary_search_by(|v| v.total_cmp(&(p.z + 0.0)));
        match (ix, iz) {
            (Ok(i), Ok(j)) if grid.height(i, j) == p.y => seen[i * grid.zs.len() + j] = true,
            _ => issues.push(Issue {
                row_index: Some(row),
                description: format!("row {row} does not lie on the surface grid"),
            }),
        }
    }
    let missing = seen.iter().filter(|s| !**s).count();
    if missing > 0 {
        issues.push(Issue {
            row_index: None,
            description: format!("{missing} grid vertices have no matching point"),
        });
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionStats {
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub median: f64,
    pub mode: Option<f64>,
    pub std_dev: f64,
    pub variance: f64,
    pub range: f64,
    pub skewness: Option<f64>,
    pub kurtosis: Option<f64>,
}

/// Neumaier-compensated sum.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Sample variance (divisor n - 1), population-moment skewness `g1` and
/// excess kurtosis `g2`.
pub fn compute_stats(values: &[f64]) -> Result<DimensionStats> {
    if values.is_empty() {
        return Err(DataError::NoValues);
    }
    let n = values.len();
    let nf = n as f64;
    let mean = compensated_sum(values.iter().copied()) / nf;
    // residual of the rounded mean, folded back into each deviation
    let shift = compensated_sum(values.iter().map(|v| v - mean)) / nf;
    let moment = |k: i32| compensated_sum(values.iter().map(|v| ((v - mean) - shift).powi(k))) / nf;
    let m2 = moment(2);
    let variance = if n >= 2 { m2 * nf / (nf - 1.0) } else { 0.0 };
    let (skewness, kurtosis) = if m2 > 0.0 {
        (
            Some(moment(3) / m2.powf(1.5)),
            Some(moment(4) / (m2 * m2) - 3.0),
        )
    } else {
        (None, None)
    };

    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    };
    let (min, max) = (sorted[0], sorted[n - 1]);

    // runs over the sorted values; strict `>` keeps the smallest value on ties
    let mut mode = None;
    let mut best = 1usize;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && sorted[j] == sorted[i] {
            j += 1;
        }
        if j - i > best {
            best = j - i;
            mode = Some(sorted[i]);
        }
        i = j;
    }

    Ok(DimensionStats {
        count: n,
        min,
        max,
        mean,
        median,
        mode,
        std_dev: variance.sqrt(),
        variance,
        range: max - min,
        skewness,
        kurtosis,
    })
}

pub fn dataset_stats(dataset: &Dataset) -> Result<[DimensionStats; 3]> {
    Ok([
        compute_stats(&dataset.values(Axis::X))?,
        compute_stats(&dataset.values(Axis::Y))?,
        compute_stats(&dataset.values(Axis::Z))?,
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleKind {
    Sinusoidal,
    Spectral,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleConfig {
    pub nx: usize,
    pub nz: usize,
    pub amplitude: f64,
}

impl SampleConfig {
    pub fn sinusoidal() -> Self {
        SampleConfig {
            nx: 32,
            nz: 32,
            amplitude: 1.0,
        }
    }

    /// 82 × 38 = 3,116 points.
    pub fn spectral() -> Self {
        SampleConfig {
            nx: 82,
            nz: 38,
            amplitude: 1.0,
        }
    }

    pub fn default_for(kind: SampleKind) -> Self {
        match kind {
            SampleKind::Sinusoidal => Self::sinusoidal(),
            SampleKind::Spectral => Self::spectral(),
        }
    }
}

/// Gaussian peaks of the spectral generator: (wavelength nm, time min,
/// height, wavelength width, time width).
const SPECTRAL_PEAKS: [(f64, f64, f64, f64, f64); 4] = [
    (150.0, 2.0, 1.0, 18.0, 1.2),
    (185.0, 4.6, 0.7, 12.0, 0.9),
    (230.0, 3.2, 0.45, 25.0, 1.8),
    (262.0, 6.2, 0.3, 10.0, 1.0),
];

/// Synthetic surfaces on a complete lattice.
///
/// `Sinusoidal`: `y = A sin(2πx/5) cos(2πz/5)` over `[0, 10]²`.
/// `Spectral`: a sum of Gaussian peaks over wavelength 120 nm (2 nm steps) and
/// time 0 min (0.2 min steps), scaled by the amplitude.
pub fn generate_sample(kind: SampleKind, config: &SampleConfig) -> Result<Dataset> {
    if config.nx < 2 || config.nz < 2 || !config.amplitude.is_finite() {
        return Err(DataError::Resolution);
    }
    let (nx, nz, amp) = (config.nx, config.nz, config.amplitude);
    let mut points = Vec::with_capacity(nx * nz);
    let (labels, name) = match kind {
        SampleKind::Sinusoidal => {
            let wavelength = 5.0;
            for i in 0..nx {
                let x = 10.0 * i as f64 / (nx - 1) as f64;
                for j in 0..nz {
                    let z = 10.0 * j as f64 / (nz - 1) as f64;
                    let y =
                        amp * (2.0 * PI * x / wavelength).sin() * (2.0 * PI * z / wavelength).cos();
                    points.push(Point3::new(x, y + 0.0, z));
                }
            }
            (AxisLabel::defaults(), "sinusoidal")
        }
        SampleKind::Spectral => {
            for i in 0..nx {
                let x = 120.0 + 2.0 * i as f64;
                for j in 0..nz {
                    let z = (j as f64 * 0.2 * 100.0).round() / 100.0;
                    let y: f64 = SPECTRAL_PEAKS
                        .iter()
                        .map(|&(px, pz, h, wx, wz)| {
                            h * (-((x - px) / wx).powi(2) / 2.0 - ((z - pz) / wz).powi(2) / 2.0)
                                .exp()
                        })
                        .sum();
                    points.push(Point3::new(x, amp * (0.02 + y), z));
                }
            }
            (
                [
                    AxisLabel::new("Wavelength", "nm"),
                    AxisLabel::new("Intensity", "AU"),
                    AxisLabel::new("Time", "min"),
                ],
                "spectral",
            )
        }
    };
    Dataset::from_points(DatasetKind::Surface, points, labels, name)
}

fn parse_rows(rows: impl Iterator<Item = (usize, Vec<String>)>) -> Result<Vec<Point3>> {
    let mut points = Vec::new();
    for (row, cells) in rows {
        if cells.len() != 3 {
            return Err(DataError::ColumnCount {
                row,
                found: cells.len(),
            });
        }
        let mut v = [0.0; 3];
        for (column, cell) in cells.iter().enumerate() {
            v[column] = parse_number(cell).ok_or_else(|| DataError::NotNumeric {
                row,
                column,
                cell: cell.clone(),
            })?;
        }
        let p = Point3::from(v);
        if !p.is_finite() {
            return Err(DataError::NonFinite { row });
        }
        points.push(p);
    }
    Ok(points)
}

fn finish(
    points: Vec<Point3>,
    labels: [AxisLabel; 3],
    hint: KindHint,
    source_name: String,
) -> Result<Dataset> {
    match hint {
        KindHint::Point => Dataset::from_points(DatasetKind::Point, points, labels, source_name),
        KindHint::Surface => {
            Dataset::from_points(DatasetKind::Surface, points, labels, source_name)
        }
        KindHint::Auto => {
            let kind = if points.is_empty() || build_surface_grid(&points).is_err() {
                DatasetKind::Point
            } else {
                DatasetKind::Surface
            };
            Dataset::from_points(kind, points, labels, source_name)
        }
    }
}

fn parse_csv(text: &str, hint: KindHint) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| DataError::Csv(e.to_string()))?;
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        records.push(record.iter().map(str::to_string).collect::<Vec<_>>());
    }
    let Some(first) = records.first() else {
        return Err(DataError::Empty);
    };
    let first_cells: Vec<&str> = first.iter().map(String::as_str).collect();
    let detection = detect_header(&first_cells);
    let mut labels = AxisLabel::defaults();
    let skip = if detection.is_header {
        if detection.labels.len() != 3 {
            return Err(DataError::ColumnCount {
                row: 0,
                found: detection.labels.len(),
            });
        }
        for (slot, label) in labels.iter_mut().zip(detection.labels) {
            *slot = label;
        }
        1
    } else {
        0
    };
    let points = parse_rows(records.into_iter().enumerate().skip(skip))?;
    finish(points, labels, hint, String::new())
}

#[derive(Deserialize)]
struct JsonDataset {
    #[serde(default)]
    axes: Vec<AxisLabel>,
    #[serde(default)]
    points: Vec<Vec<serde_json::Value>>,
    #[serde(default)]
    kind: Option<String>,
    #[serde(default)]
    source_name: Option<String>,
}

#[derive(Serialize)]
struct JsonDatasetOut<'a> {
    axes: [AxisLabel; 3],
    points: Vec<[f64; 3]>,
    kind: DatasetKind,
    source_name: &'a str,
}

fn parse_json(text: &str, hint: KindHint) -> Result<Dataset> {
    let doc: JsonDataset =
        serde_json::from_str(text).map_err(|e| DataError::Json(e.to_string()))?;
    let labels: [AxisLabel; 3] = match doc.axes.len() {
        0 => AxisLabel::defaults(),
        3 => {
            let mut it = doc.axes.into_iter().enumerate().map(|(i, a)| {
                if a.name.trim().is_empty() {
                    AxisLabel::new(AxisLabel::default_for(i).name, a.unit)
                } else {
                    a
                }
            });
            [(); 3].map(|_| it.next().expect("three axes"))
        }
        n => return Err(DataError::AxisCount(n)),
    };
    let rows = doc.points.into_iter().enumerate().map(|(row, cells)| {
        let cells = cells
            .into_iter()
            .map(|c| match c {
                serde_json::Value::Number(n) => n.to_string(),
                other => other.to_string(),
            })
            .collect();
        (row, cells)
    });
    let points = parse_rows(rows)?;
    let hint = match (hint, doc.kind.as_deref()) {
        (KindHint::Auto, Some("point")) => KindHint::Point,
        (KindHint::Auto, Some("surface")) => KindHint::Surface,
        (KindHint::Auto, Some(other)) => return Err(DataError::UnknownKind(other.to_string())),
        (h, _) => h,
    };
    finish(points, labels, hint, doc.source_name.unwrap_or_default())
}

pub fn parse_dataset(bytes: &[u8], format: Format, hint: KindHint) -> Result<Dataset> {
    let text = std::str::from_utf8(bytes).map_err(|_| DataError::NotUtf8)?;
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    match format {
        Format::Csv => parse_csv(text, hint),
        Format::Json => parse_json(text, hint),
    }
}

/// Shortest decimal text that parses back to the same `f64`.
pub fn format_number(v: f64) -> String {
    format!("{v:?}")
}

fn csv_header_cell(label: &AxisLabel) -> String {
    let cell = if label.unit.is_empty() {
        label.name.clone()
    } else {
        format!("{} ({})", label.name, label.unit)
    };
    if cell.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell
    }
}

pub fn export(dataset: &Dataset, format: Format) -> Vec<u8> {
    match format {
        Format::Csv => {
            let mut out = String::new();
            let header: Vec<String> = dataset.labels().iter().map(csv_header_cell).collect();
            out.push_str(&header.join(","));
            out.push('\n');
            for p in &dataset.points {
                out.push_str(&format!(
                    "{},{},{}\n",
                    format_number(p.x),
                    format_number(p.y),
                    format_number(p.z)
                ));
            }
            out.into_bytes()
        }
        Format::Json => {
            let doc = JsonDatasetOut {
                axes: dataset.labels(),
                points: dataset.points.iter().map(|p| p.to_array()).collect(),
                kind: dataset.kind,
                source_name: &dataset.source_name,
            };
            serde_json::to_vec(&doc).expect("dataset serialization is infallible")
        }
    }
}
