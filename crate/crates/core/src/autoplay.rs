//! Whole-to-part traversal driven by host-injected time.

use crate::navgrid::{Element, NavMode, SegmentIndex};
use crate::plotdata::SurfaceGrid;

#[derive(Debug, Clone, PartialEq)]
pub struct AutoplayConfig {
    /// Elements per second in point mode.
    pub point_rate: f64,
    /// Cells per second in surface mode.
    pub surface_rate: f64,
    pub intelligent_multiplier_range: (f64, f64),
}

impl Default for AutoplayConfig {
    fn default() -> Self {
        AutoplayConfig {
            point_rate: 8.0,
            surface_rate: 4.0,
            intelligent_multiplier_range: (0.5, 2.0),
        }
    }
}

impl AutoplayConfig {
    pub fn base_interval_ms(&self, mode: NavMode) -> f64 {
        let rate = match mode {
            NavMode::Point => self.point_rate,
            NavMode::Surface => self.surface_rate,
        };
        1000.0 / rate
    }
}

/// Every element of the index, segment by segment, each segment in its
/// member order.
pub fn plan_traversal(index: &SegmentIndex) -> Vec<Element> {
    index
        .segments
        .iter()
        .flat_map(|s| s.members.iter().copied())
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureProfile {
    cells_z: usize,
    pub scores: Vec<f64>,
}

impl FeatureProfile {
    pub fn score(&self, element: Element) -> f64 {
        match element {
            Element::Cell([ix, iz]) => self.scores[ix * self.cells_z + iz],
            Element::Point(_) => 0.0,
        }
    }
}

/// Second derivative of `h` at `i` over non-uniform coordinates `at`,
/// using the nearest interior stencil at the borders.
fn second_difference(at: &[f64], h: impl Fn(usize) -> f64, i: usize) -> f64 {
    let n = at.len();
    if n < 3 {
        return 0.0;
    }
    let c = i.clamp(1, n - 2);
    let (x0, x1, x2) = (at[c - 1], at[c], at[c + 1]);
    let slope_hi = (h(c + 1) - h(c)) / (x2 - x1);
    let slope_lo = (h(c) - h(c - 1)) / (x1 - x0);
    2.0 * (slope_hi - slope_lo) / (x2 - x0)
}

/// Per-cell feature strength: mean |Laplacian| over the cell's corners,
/// normalized to [0, 1] by the maximum.
pub fn feature_score(grid: &SurfaceGrid) -> FeatureProfile {
    let (nx, nz) = (grid.xs.len(), grid.zs.len());
    let mut laplacian = vec![0.0; nx * nz];
    for i in 0..nx {
        for j in 0..nz {
            let dxx = second_difference(&grid.xs, |k| grid.height(k, j), i);
            let dzz = second_difference(&grid.zs, |k| grid.height(i, k), j);
            laplacian[i * nz + j] = (dxx + dzz).abs();
        }
    }
    let (cx, cz) = grid.cell_dims();
    let mut scores: Vec<f64> = (0..cx)
        .flat_map(|i| (0..cz).map(move |j| (i, j)))
        .map(|(i, j)| {
            (laplacian[i * nz + j]
                + laplacian[(i + 1) * nz + j]
                + laplacian[i * nz + j + 1]
                + laplacian[(i + 1) * nz + j + 1])
                / 4.0
        })
        .collect();
    let max = scores.iter().copied().fold(0.0, f64::max);
    if max > 0.0 {
        for s in &mut scores {
            *s /= max;
        }
    } else {
        scores.iter_mut().for_each(|s| *s = 0.0);
    }
    FeatureProfile {
        cells_z: cz,
        scores,
    }
}

/// `base * (lo + (hi - lo) * score)`; with the default range, flat regions
/// play twice as fast and the strongest features at half speed.
pub fn intelligent_interval(base_ms: f64, score: f64, config: &AutoplayConfig) -> f64 {
    let (lo, hi) = config.intelligent_multiplier_range;
    base_ms * (lo + (hi - lo) * score.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AutoplayState {
    pub active: bool,
    pub intelligent: bool,
    pub mode: NavMode,
    pub plan: Vec<Element>,
    pub position: usize,
    /// Milliseconds injected since the tour started.
    pub elapsed_ms: u64,
    last_step_ms: f64,
    next_due_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AutoplayEvent {
    Step {
        element: Element,
        position: usize,
        /// Scheduled time of the step relative to the tour start.
        at_ms: f64,
        interval_ms: f64,
    },
    Finished,
}

impl AutoplayState {
    pub fn idle(mode: NavMode) -> Self {
        AutoplayState {
            active: false,
            intelligent: false,
            mode,
            plan: Vec::new(),
            position: 0,
            elapsed_ms: 0,
            last_step_ms: 0.0,
            next_due_ms: 0.0,
        }
    }

    pub fn start(
        plan: Vec<Element>,
        mode: NavMode,
        intelligent: bool,
        config: &AutoplayConfig,
        profile: Option<&FeatureProfile>,
    ) -> Self {
        let mut state = AutoplayState {
            active: !plan.is_empty(),
            intelligent,
            plan,
            ..AutoplayState::idle(mode)
        };
        state.next_due_ms = state.current_interval(config, profile);
        state
    }

    /// Time accumulated toward the next step.
    pub fn accumulator_ms(&self) -> f64 {
        self.elapsed_ms as f64 - self.last_step_ms
    }

    fn current_interval(&self, config: &AutoplayConfig, profile: Option<&FeatureProfile>) -> f64 {
        let base = config.base_interval_ms(self.mode);
        match (self.intelligent, profile, self.plan.get(self.position)) {
            (true, Some(p), Some(&next)) => intelligent_interval(base, p.score(next), config),
            _ => base,
        }
    }

    /// Switches the adaptive pacing; the pending step is rescheduled from
    /// the last one.
    pub fn set_intelligent(
        &mut self,
        on: bool,
        config: &AutoplayConfig,
        profile: Option<&FeatureProfile>,
    ) {
        self.intelligent = on;
        self.next_due_ms = self.last_step_ms + self.current_interval(config, profile);
    }

    pub fn stop(&mut self) {
        self.active = false;
    }

    /// Injects `dt_ms` of time and emits every step that falls due.
    ///
    /// Due times are accumulated from intervals alone, so the emitted steps
    /// depend only on the cumulative time, never on how it was split.
    pub fn tick(
        &mut self,
        dt_ms: u64,
        config: &AutoplayConfig,
        profile: Option<&FeatureProfile>,
    ) -> Vec<AutoplayEvent> {
        let mut events = Vec::new();
        if !self.active {
            return events;
        }
        self.elapsed_ms += dt_ms;
        let now = self.elapsed_ms as f64;
        while self.active && self.next_due_ms <= now {
            let at_ms = self.next_due_ms;
            events.push(AutoplayEvent::Step {
                element: self.plan[self.position],
                position: self.position,
                at_ms,
                interval_ms: at_ms - self.last_step_ms,
            });
            self.position += 1;
            self.last_step_ms = at_ms;
            if self.position == self.plan.len() {
                self.active = false;
                events.push(AutoplayEvent::Finished);
            } else {
                self.next_due_ms = at_ms + self.current_interval(config, profile);
            }
        }
        events
    }
}
