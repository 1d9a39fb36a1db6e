//! Per-axis segmentation and the part-to-whole navigation state machine.
//!
//! Members of a segment are ordered by the two orthogonal axes (lower letter
//! first) and grouped into runs sharing the first key. Arrow keys walk that
//! layout; segments change only through [`jump_segment`] and [`cycle_axis`].

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::plotdata::{Axis, Dataset, Point3};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NavError {
    #[error("surface navigation needs a gridded dataset")]
    NoGrid,
    #[error("element {0:?} is not part of this index")]
    UnknownElement(Element),
    #[error("segment index is empty")]
    EmptyIndex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NavMode {
    Point,
    Surface,
}

/// A navigable element: a point by index, or a wireframe cell by its lower
/// lattice corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Element {
    Point(usize),
    Cell([usize; 2]),
}

impl Element {
    pub fn cell(ix: usize, iz: usize) -> Self {
        Element::Cell([ix, iz])
    }
}

/// Position of an element: the point itself, or the mean of a cell's corners.
pub fn element_position(dataset: &Dataset, element: Element) -> Point3 {
    match element {
        Element::Point(i) => dataset.points[i],
        Element::Cell([ix, iz]) => dataset
            .grid
            .as_ref()
            .expect("cell elements require a grid")
            .cell_center(ix, iz),
    }
}

/// All elements of a mode, in input order.
pub fn elements(dataset: &Dataset, mode: NavMode) -> Result<Vec<Element>, NavError> {
    match mode {
        NavMode::Point => Ok((0..dataset.points.len()).map(Element::Point).collect()),
        NavMode::Surface => {
            let grid = dataset.grid.as_ref().ok_or(NavError::NoGrid)?;
            let (cx, cz) = grid.cell_dims();
            if cx == 0 || cz == 0 {
                return Err(NavError::NoGrid);
            }
            Ok((0..cx)
                .flat_map(|ix| (0..cz).map(move |iz| Element::cell(ix, iz)))
                .collect())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
    Left,
    Right,
}

impl Direction {
    pub fn opposite(self) -> Self {
        match self {
            Direction::Up => Direction::Down,
            Direction::Down => Direction::Up,
            Direction::Left => Direction::Right,
            Direction::Right => Direction::Left,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Segment {
    pub axis: Axis,
    pub index: usize,
    pub lo: f64,
    pub hi: f64,
    pub members: Vec<Element>,
    /// Start ordinal of each first-key run, followed by `members.len()`.
    #[serde(skip)]
    runs: Vec<usize>,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    fn run_count(&self) -> usize {
        self.runs.len() - 1
    }

    /// (run, rank within run) of an ordinal.
    fn locate(&self, ordinal: usize) -> (usize, usize) {
        let run = self.runs.partition_point(|&s| s <= ordinal) - 1;
        (run, ordinal - self.runs[run])
    }

    fn ordinal_at(&self, run: usize, rank: usize) -> Option<usize> {
        let start = self.runs[run];
        (start + rank < self.runs[run + 1]).then_some(start + rank)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NavConfig {
    pub default_bins: usize,
}

impl Default for NavConfig {
    fn default() -> Self {
        NavConfig { default_bins: 12 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentIndex {
    pub axis: Axis,
    pub mode: NavMode,
    pub bin_count: usize,
    pub segments: Vec<Segment>,
    locator: HashMap<Element, (usize, usize)>,
}

impl SegmentIndex {
    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn element_count(&self) -> usize {
        self.locator.len()
    }

    pub fn member(&self, segment: usize, ordinal: usize) -> Element {
        self.segments[segment].members[ordinal]
    }
}

/// Segments along `axis`.
///
/// With at most `default_bins` distinct coordinates there is one segment per
/// value; otherwise values fall into `default_bins` equal-width bins with the
/// top edge inclusive in the last bin. Empty bins are dropped.
pub fn build_segment_index(
    dataset: &Dataset,
    mode: NavMode,
    axis: Axis,
    config: &NavConfig,
) -> Result<SegmentIndex, NavError> {
    let bins = config.default_bins.max(1);
    let elems = elements(dataset, mode)?;
    if elems.is_empty() {
        return Err(NavError::EmptyIndex);
    }
    let positions: Vec<Point3> = elems
        .iter()
        .map(|&e| element_position(dataset, e))
        .collect();
    let coord: Vec<f64> = positions.iter().map(|p| p.get(axis)).collect();

    let mut distinct = coord.clone();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();

    // (bin, lo, hi) per element
    let (assign, edges): (Vec<usize>, Vec<(f64, f64)>) = if distinct.len() <= bins {
        let assign = coord
            .iter()
            .map(|v| distinct.partition_point(|d| d < v))
            .collect();
        (assign, distinct.iter().map(|&d| (d, d)).collect())
    } else {
        let (min, max) = (distinct[0], distinct[distinct.len() - 1]);
        let range = max - min;
        let edge = |k: usize| {
            if k == bins {
                max
            } else {
                min + range * k as f64 / bins as f64
            }
        };
        // the floor guess can be off by one ulp-wide sliver; settle it against the edges
        let assign = coord
            .iter()
            .map(|&v| {
                let mut b = (((bins as f64) * (v - min) / range).floor() as usize).min(bins - 1);
                while b > 0 && v < edge(b) {
                    b -= 1;
                }
                while b + 1 < bins && v >= edge(b + 1) {
                    b += 1;
                }
                b
            })
            .collect();
        let edges = (0..bins).map(|k| (edge(k), edge(k + 1))).collect();
        (assign, edges)
    };

    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); edges.len()];
    for (i, &b) in assign.iter().enumerate() {
        buckets[b].push(i);
    }

    let (first, second) = axis.orthogonal();
    let mut segments = Vec::new();
    let mut locator = HashMap::with_capacity(elems.len());
    for (bucket, (lo, hi)) in buckets.into_iter().zip(edges) {
        if bucket.is_empty() {
            continue;
        }
        let mut order = bucket;
        // stable: ties keep input order
        order.sort_by(|&a, &b| {
            positions[a]
                .get(first)
                .total_cmp(&positions[b].get(first))
                .then(
                    positions[a]
                        .get(second)
                        .total_cmp(&positions[b].get(second)),
                )
        });
        let mut runs = vec![0];
        for w in 1..order.len() {
            if positions[order[w]].get(first) != positions[order[w - 1]].get(first) {
                runs.push(w);
            }
        }
        runs.push(order.len());
        let index = segments.len();
        let members: Vec<Element> = order.iter().map(|&i| elems[i]).collect();
        for (ordinal, &m) in members.iter().enumerate() {
            locator.insert(m, (index, ordinal));
        }
        segments.push(Segment {
            axis,
            index,
            lo,
            hi,
            members,
            runs,
        });
    }

    Ok(SegmentIndex {
        axis,
        mode,
        bin_count: bins,
        segments,
        locator,
    })
}

/// Containing segment and ordinal of an element.
pub fn segment_of(index: &SegmentIndex, element: Element) -> Result<(usize, usize), NavError> {
    index
        .locator
        .get(&element)
        .copied()
        .ok_or(NavError::UnknownElement(element))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NavState {
    pub mode: NavMode,
    pub active_axis: Axis,
    pub segment_index: usize,
    pub cursor: usize,
    pub focus: Element,
}

impl NavState {
    /// First member of the first segment.
    pub fn initial(index: &SegmentIndex) -> Self {
        NavState {
            mode: index.mode,
            active_axis: index.axis,
            segment_index: 0,
            cursor: 0,
            focus: index.member(0, 0),
        }
    }

    fn at(&self, index: &SegmentIndex, segment_index: usize, cursor: usize) -> Self {
        NavState {
            segment_index,
            cursor,
            focus: index.member(segment_index, cursor),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NavEvent {
    FocusChanged,
    SegmentChanged,
    AxisChanged(Axis),
    BoundaryHit(Direction),
}

fn boundary(state: &NavState, dir: Direction) -> (NavState, Vec<NavEvent>) {
    (state.clone(), vec![NavEvent::BoundaryHit(dir)])
}

/// One arrow-key step inside the current segment.
///
/// Surface mode walks the segment as rows of equal first key: Left/Right
/// change row keeping the rank, Up/Down step the rank within the row. Point
/// mode walks the sorted member list with Left/Right and changes row with
/// Up/Down, keeping the rank. A step with no target is a boundary.
pub fn step(state: &NavState, dir: Direction, index: &SegmentIndex) -> (NavState, Vec<NavEvent>) {
    let seg = &index.segments[state.segment_index];
    let (run, rank) = seg.locate(state.cursor);
    let offset = |d: Direction| -> isize {
        match d {
            Direction::Right | Direction::Up => 1,
            Direction::Left | Direction::Down => -1,
        }
    };
    let change_run = |delta: isize| -> Option<usize> {
        let target = run
            .checked_add_signed(delta)
            .filter(|&r| r < seg.run_count())?;
        seg.ordinal_at(target, rank)
    };
    let target = match (state.mode, dir) {
        (NavMode::Point, Direction::Left | Direction::Right) => state
            .cursor
            .checked_add_signed(offset(dir))
            .filter(|&c| c < seg.len()),
        (NavMode::Point, Direction::Up | Direction::Down) => change_run(offset(dir)),
        (NavMode::Surface, Direction::Left | Direction::Right) => change_run(offset(dir)),
        (NavMode::Surface, Direction::Up | Direction::Down) => rank
            .checked_add_signed(offset(dir))
            .and_then(|r| seg.ordinal_at(run, r)),
    };
    match target {
        Some(cursor) => (
            state.at(index, state.segment_index, cursor),
            vec![NavEvent::FocusChanged],
        ),
        None => boundary(state, dir),
    }
}

/// Moves to the neighbouring segment (`delta` is +1 or -1), cursor at the
/// first member.
pub fn jump_segment(
    state: &NavState,
    delta: isize,
    index: &SegmentIndex,
) -> (NavState, Vec<NavEvent>) {
    let dir = if delta >= 0 {
        Direction::Up
    } else {
        Direction::Down
    };
    match state
        .segment_index
        .checked_add_signed(delta)
        .filter(|&s| s < index.len())
    {
        Some(s) => (
            state.at(index, s, 0),
            vec![NavEvent::SegmentChanged, NavEvent::FocusChanged],
        ),
        None => boundary(state, dir),
    }
}

/// Advances the active axis (Y, Z, X) and rebuilds the index, keeping the
/// focused element focused.
pub fn cycle_axis(
    state: &NavState,
    dataset: &Dataset,
    config: &NavConfig,
) -> Result<(NavState, SegmentIndex, Vec<NavEvent>), NavError> {
    let axis = state.active_axis.next_in_cycle();
    let index = build_segment_index(dataset, state.mode, axis, config)?;
    let (segment_index, cursor) = segment_of(&index, state.focus)?;
    let next = NavState {
        mode: state.mode,
        active_axis: axis,
        segment_index,
        cursor,
        focus: state.focus,
    };
    Ok((next, index, vec![NavEvent::AxisChanged(axis)]))
}
