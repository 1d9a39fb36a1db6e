//! Command dispatch, review mode, and the serialized event boundary.
//!
//! A [`Session`] processes one [`Command`] at a time and answers with an
//! ordered list of [`Event`]s. Time only advances through
//! [`Command::AdvanceTime`], so a dataset plus a command sequence fully
//! determines the transcript.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::autoplay::{
    feature_score, plan_traversal, AutoplayConfig, AutoplayEvent, AutoplayState, FeatureProfile,
};
use crate::narrate::{describe_axis, describe_focus, SpeechRateIndex, Verbosity};
use crate::navgrid::{
    build_segment_index, cycle_axis, element_position, jump_segment, segment_of, step, Direction,
    Element, NavConfig, NavError, NavEvent, NavMode, NavState, SegmentIndex,
};
use crate::plotdata::{
    export, generate_sample, parse_dataset, Axis, DataError, Dataset, DatasetKind, Format,
    KindHint, SampleConfig, SampleKind,
};
use crate::sonify::{fixed_cue, map_cue, CueKind, CueSchedule, SonifyConfig};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SessionError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Nav(#[from] NavError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum DatasetRef {
    Sample { kind: SampleKind },
    Inline { format: Format, content: String },
}

impl DatasetRef {
    pub fn resolve(&self) -> Result<Dataset, DataError> {
        match self {
            DatasetRef::Sample { kind } => {
                generate_sample(*kind, &SampleConfig::default_for(*kind))
            }
            DatasetRef::Inline { format, content } => {
                parse_dataset(content.as_bytes(), *format, KindHint::Auto)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "type",
    content = "payload",
    rename_all = "camelCase",
    rename_all_fields = "camelCase"
)]
pub enum Command {
    MoveUp,
    MoveDown,
    MoveLeft,
    MoveRight,
    JumpSegmentUp,
    JumpSegmentDown,
    CycleAxis,
    Announce,
    ToggleAutoplay,
    IntelligentAutoplay,
    ToggleSonification,
    CycleVerbosity,
    CycleSpeechRate,
    InterruptSpeech,
    ToggleReview,
    ToggleAxes,
    ToggleHelp,
    AnnounceAxis { axis: Axis },
    AdvanceTime { dt_ms: u64 },
    LoadDataset { source: DatasetRef },
    SetMode { mode: NavMode },
    ExportData { format: Format },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentRef {
    pub index: usize,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "type",
    content = "payload",
    rename_all = "camelCase",
    rename_all_fields = "camelCase"
)]
pub enum Event {
    FocusChanged {
        point: [f64; 3],
        segment: SegmentRef,
        ordinal: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cell: Option<[usize; 2]>,
    },
    SegmentChanged {
        axis: Axis,
        segment: SegmentRef,
        lo: f64,
        hi: f64,
        members: Vec<Element>,
    },
    AxisChanged {
        axis: Axis,
        segment: SegmentRef,
        ordinal: usize,
    },
    BoundaryHit {
        direction: Direction,
    },
    CueRequested {
        schedule: CueSchedule,
    },
    Announcement {
        text: String,
        verbosity: Verbosity,
        interrupting: bool,
    },
    AutoplayStarted {
        intelligent: bool,
        position: usize,
        total: usize,
    },
    AutoplayStep {
        position: usize,
        total: usize,
        /// Scheduled session time of the step.
        at_ms: f64,
    },
    AutoplayFinished {
        completed: bool,
    },
    ReviewEntered {
        log: String,
    },
    ReviewExited {},
    SonificationToggled {
        on: bool,
    },
    AxesToggled {
        on: bool,
    },
    HelpToggled {
        on: bool,
    },
    SpeechRateChanged {
        rate: f64,
    },
    ModeChanged {
        mode: NavMode,
        segments: usize,
    },
    DatasetLoaded {
        name: String,
        kind: DatasetKind,
        points: usize,
    },
    DataExported {
        format: Format,
        content: String,
    },
    Error {
        message: String,
    },
}

pub fn serialize_event(event: &Event) -> String {
    serde_json::to_string(event).expect("events always serialize")
}

pub fn parse_command(text: &str) -> Result<Command, serde_json::Error> {
    serde_json::from_str(text)
}

pub fn deserialize_event(text: &str) -> Result<Event, serde_json::Error> {
    serde_json::from_str(text)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionConfig {
    pub nav: NavConfig,
    pub sonify: SonifyConfig,
    pub autoplay: AutoplayConfig,
    pub initial_axis: Axis,
    pub initial_mode: NavMode,
    /// Speak the focus after manual moves and jumps.
    pub announce_focus: bool,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            nav: NavConfig::default(),
            sonify: SonifyConfig::default(),
            autoplay: AutoplayConfig::default(),
            initial_axis: Axis::Y,
            initial_mode: NavMode::Point,
            announce_focus: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionState {
    pub dataset: Dataset,
    pub nav: NavState,
    pub index: SegmentIndex,
    pub autoplay: AutoplayState,
    /// Session time at which the running tour started.
    pub autoplay_origin_ms: u64,
    pub profile: Option<FeatureProfile>,
    pub sonification_on: bool,
    pub verbosity: Verbosity,
    pub rate_index: SpeechRateIndex,
    pub review_active: bool,
    pub saved_nav: Option<(NavState, SegmentIndex)>,
    pub review_log: Vec<String>,
    pub axes_visible: bool,
    pub help_open: bool,
    pub clock_ms: u64,
}

impl SessionState {
    fn new(dataset: Dataset, config: &SessionConfig) -> Result<Self, SessionError> {
        let index = build_segment_index(
            &dataset,
            config.initial_mode,
            config.initial_axis,
            &config.nav,
        )?;
        let profile = dataset.grid.as_ref().map(feature_score);
        Ok(SessionState {
            nav: NavState::initial(&index),
            index,
            autoplay: AutoplayState::idle(config.initial_mode),
            autoplay_origin_ms: 0,
            profile,
            sonification_on: true,
            verbosity: Verbosity::Verbose,
            rate_index: SpeechRateIndex::default(),
            review_active: false,
            saved_nav: None,
            review_log: Vec::new(),
            axes_visible: true,
            help_open: false,
            clock_ms: 0,
            dataset,
        })
    }

    fn segment_ref(&self) -> SegmentRef {
        SegmentRef {
            index: self.nav.segment_index,
            count: self.index.len(),
        }
    }

    fn announcement(&self, text: String) -> Event {
        Event::Announcement {
            text,
            verbosity: self.verbosity,
            interrupting: false,
        }
    }

    fn focus_text(&self) -> String {
        describe_focus(self.nav.focus, &self.dataset, self.verbosity)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Session {
    config: SessionConfig,
    state: Option<SessionState>,
    transcript: Vec<String>,
}

type Outcome = Result<Vec<Event>, String>;

impl Session {
    /// A session with no dataset; only `LoadDataset` is accepted.
    pub fn empty(config: SessionConfig) -> Self {
        Session {
            config,
            state: None,
            transcript: Vec::new(),
        }
    }

    pub fn new(dataset: Dataset, config: SessionConfig) -> Result<Self, SessionError> {
        let state = SessionState::new(dataset, &config)?;
        Ok(Session {
            config,
            state: Some(state),
            transcript: Vec::new(),
        })
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn state(&self) -> Option<&SessionState> {
        self.state.as_ref()
    }

    /// Serialized events since the last load, one per line.
    pub fn transcript(&self) -> String {
        self.transcript.join("\n")
    }

    pub fn transcript_lines(&self) -> &[String] {
        &self.transcript
    }

    pub fn review_log(&self) -> &[String] {
        self.state.as_ref().map_or(&[], |s| &s.review_log)
    }

    pub fn dispatch(&mut self, cmd: Command) -> Vec<Event> {
        let loading = matches!(cmd, Command::LoadDataset { .. });
        let events = match self.apply(cmd) {
            Ok(events) => events,
            Err(message) => vec![Event::Error { message }],
        };
        if loading && !matches!(events.first(), Some(Event::Error { .. })) {
            self.transcript.clear();
        }
        self.transcript.extend(events.iter().map(serialize_event));
        events
    }

    pub fn advance_time(&mut self, dt_ms: u64) -> Vec<Event> {
        self.dispatch(Command::AdvanceTime { dt_ms })
    }

    pub fn toggle_review(&mut self) -> Vec<Event> {
        self.dispatch(Command::ToggleReview)
    }

    fn apply(&mut self, cmd: Command) -> Outcome {
        if let Command::LoadDataset { source } = &cmd {
            if self.state.as_ref().is_some_and(|s| s.review_active) {
                return Err(review_locked());
            }
            let dataset = source.resolve().map_err(|e| e.to_string())?;
            let state = SessionState::new(dataset, &self.config).map_err(|e| e.to_string())?;
            let loaded = Event::DatasetLoaded {
                name: state.dataset.source_name.clone(),
                kind: state.dataset.kind,
                points: state.dataset.points.len(),
            };
            self.state = Some(state);
            return Ok(vec![loaded]);
        }
        let config = &self.config;
        let st = self
            .state
            .as_mut()
            .ok_or_else(|| "no dataset loaded".to_string())?;
        if st.review_active {
            match cmd {
                Command::ToggleReview | Command::InterruptSpeech => {}
                // host clock keeps running; the tour is frozen while reviewing
                Command::AdvanceTime { .. } => return Ok(Vec::new()),
                _ => return Err(review_locked()),
            }
        }
        match cmd {
            Command::MoveUp => Ok(on_move(st, config, Direction::Up)),
            Command::MoveDown => Ok(on_move(st, config, Direction::Down)),
            Command::MoveLeft => Ok(on_move(st, config, Direction::Left)),
            Command::MoveRight => Ok(on_move(st, config, Direction::Right)),
            Command::JumpSegmentUp => Ok(on_jump(st, config, 1)),
            Command::JumpSegmentDown => Ok(on_jump(st, config, -1)),
            Command::CycleAxis => on_cycle_axis(st, config),
            Command::Announce => Ok(vec![st.announcement(st.focus_text())]),
            Command::ToggleAutoplay => Ok(on_toggle_autoplay(st, config)),
            Command::IntelligentAutoplay => on_intelligent(st, config),
            Command::ToggleSonification => {
                st.sonification_on = !st.sonification_on;
                Ok(vec![Event::SonificationToggled {
                    on: st.sonification_on,
                }])
            }
            Command::CycleVerbosity => {
                st.verbosity = st.verbosity.next();
                Ok(vec![st.announcement(format!(
                    "Verbosity: {}",
                    st.verbosity.label()
                ))])
            }
            Command::CycleSpeechRate => {
                st.rate_index = st.rate_index.next();
                Ok(vec![Event::SpeechRateChanged {
                    rate: st.rate_index.multiplier(),
                }])
            }
            Command::InterruptSpeech => Ok(vec![Event::Announcement {
                text: String::new(),
                verbosity: st.verbosity,
                interrupting: true,
            }]),
            Command::ToggleReview => Ok(on_toggle_review(st)),
            Command::ToggleAxes => {
                st.axes_visible = !st.axes_visible;
                Ok(vec![Event::AxesToggled {
                    on: st.axes_visible,
                }])
            }
            Command::ToggleHelp => {
                st.help_open = !st.help_open;
                Ok(vec![Event::HelpToggled { on: st.help_open }])
            }
            Command::AnnounceAxis { axis } => Ok(vec![
                st.announcement(describe_axis(axis, st.dataset.axis(axis)))
            ]),
            Command::AdvanceTime { dt_ms } => Ok(on_advance(st, config, dt_ms)),
            Command::SetMode { mode } => on_set_mode(st, config, mode),
            Command::ExportData { format } => {
                let content =
                    String::from_utf8(export(&st.dataset, format)).expect("exports are UTF-8");
                Ok(vec![Event::DataExported { format, content }])
            }
            Command::LoadDataset { .. } => unreachable!("handled above"),
        }
    }
}

fn review_locked() -> String {
    "review mode is active; toggle review to return to the plot".to_string()
}

/// FocusChanged for the current focus, logging it and requesting its tone.
fn focus_changed(st: &mut SessionState, config: &SessionConfig, out: &mut Vec<Event>) {
    let p = element_position(&st.dataset, st.nav.focus);
    st.review_log.push(describe_focus(
        st.nav.focus,
        &st.dataset,
        Verbosity::Verbose,
    ));
    out.push(Event::FocusChanged {
        point: p.to_array(),
        segment: st.segment_ref(),
        ordinal: st.nav.cursor,
        cell: match st.nav.focus {
            Element::Cell(c) => Some(c),
            Element::Point(_) => None,
        },
    });
    if st.sonification_on {
        let cue =
            map_cue(&p, &st.dataset.axes, &config.sonify).expect("validated datasets are finite");
        out.push(Event::CueRequested {
            schedule: CueSchedule::single(cue),
        });
    }
}

fn segment_changed(st: &SessionState) -> Event {
    let seg = &st.index.segments[st.nav.segment_index];
    Event::SegmentChanged {
        axis: st.index.axis,
        segment: st.segment_ref(),
        lo: seg.lo,
        hi: seg.hi,
        members: seg.members.clone(),
    }
}

fn boundary_hit(direction: Direction, out: &mut Vec<Event>) {
    out.push(Event::BoundaryHit { direction });
    out.push(Event::CueRequested {
        schedule: fixed_cue(CueKind::Boundary),
    });
}

fn nav_events(
    st: &mut SessionState,
    config: &SessionConfig,
    nav: Vec<NavEvent>,
    prefix: Option<String>,
) -> Vec<Event> {
    let mut out = Vec::new();
    let mut focused = false;
    for e in nav {
        match e {
            NavEvent::FocusChanged => {
                focus_changed(st, config, &mut out);
                focused = true;
            }
            NavEvent::SegmentChanged => out.push(segment_changed(st)),
            NavEvent::BoundaryHit(d) => boundary_hit(d, &mut out),
            NavEvent::AxisChanged(axis) => out.push(Event::AxisChanged {
                axis,
                segment: st.segment_ref(),
                ordinal: st.nav.cursor,
            }),
        }
    }
    if focused && config.announce_focus {
        let text = match prefix {
            Some(p) => format!("{p}. {}", st.focus_text()),
            None => st.focus_text(),
        };
        out.push(st.announcement(text));
    }
    out
}

fn on_move(st: &mut SessionState, config: &SessionConfig, dir: Direction) -> Vec<Event> {
    let (next, nav) = step(&st.nav, dir, &st.index);
    st.nav = next;
    nav_events(st, config, nav, None)
}

fn on_jump(st: &mut SessionState, config: &SessionConfig, delta: isize) -> Vec<Event> {
    let (next, nav) = jump_segment(&st.nav, delta, &st.index);
    st.nav = next;
    let prefix = format!("Segment {} of {}", st.nav.segment_index + 1, st.index.len());
    nav_events(st, config, nav, Some(prefix))
}

fn on_cycle_axis(st: &mut SessionState, config: &SessionConfig) -> Outcome {
    let (nav, index, events) =
        cycle_axis(&st.nav, &st.dataset, &config.nav).map_err(|e| e.to_string())?;
    st.nav = nav;
    st.index = index;
    let mut out = nav_events(st, config, events, None);
    let axis = st.nav.active_axis;
    out.push(st.announcement(format!(
        "Navigating {}, segment {} of {}",
        describe_axis(axis, st.dataset.axis(axis)),
        st.nav.segment_index + 1,
        st.index.len()
    )));
    Ok(out)
}

fn start_autoplay(st: &mut SessionState, config: &SessionConfig, intelligent: bool) -> Vec<Event> {
    let plan = plan_traversal(&st.index);
    let total = plan.len();
    st.autoplay = AutoplayState::start(
        plan,
        st.nav.mode,
        intelligent,
        &config.autoplay,
        st.profile.as_ref(),
    );
    st.autoplay_origin_ms = st.clock_ms;
    vec![Event::AutoplayStarted {
        intelligent,
        position: 0,
        total,
    }]
}

fn on_toggle_autoplay(st: &mut SessionState, config: &SessionConfig) -> Vec<Event> {
    if st.autoplay.active {
        st.autoplay.stop();
        vec![Event::AutoplayFinished { completed: false }]
    } else {
        start_autoplay(st, config, false)
    }
}

fn on_intelligent(st: &mut SessionState, config: &SessionConfig) -> Outcome {
    if st.nav.mode != NavMode::Surface {
        return Err("intelligent autoplay is available in surface mode only".into());
    }
    if !st.autoplay.active {
        return Ok(start_autoplay(st, config, true));
    }
    let on = !st.autoplay.intelligent;
    st.autoplay
        .set_intelligent(on, &config.autoplay, st.profile.as_ref());
    Ok(vec![Event::AutoplayStarted {
        intelligent: on,
        position: st.autoplay.position,
        total: st.autoplay.plan.len(),
    }])
}

fn on_advance(st: &mut SessionState, config: &SessionConfig, dt_ms: u64) -> Vec<Event> {
    st.clock_ms += dt_ms;
    let mut out = Vec::new();
    if !st.autoplay.active {
        return out;
    }
    let total = st.autoplay.plan.len();
    let steps = st
        .autoplay
        .tick(dt_ms, &config.autoplay, st.profile.as_ref());
    for e in steps {
        match e {
            AutoplayEvent::Step {
                element,
                position,
                at_ms,
                ..
            } => {
                out.push(Event::AutoplayStep {
                    position,
                    total,
                    at_ms: st.autoplay_origin_ms as f64 + at_ms,
                });
                let (segment_index, cursor) =
                    segment_of(&st.index, element).expect("plans come from the index");
                let changed = segment_index != st.nav.segment_index;
                st.nav = NavState {
                    segment_index,
                    cursor,
                    focus: element,
                    ..st.nav.clone()
                };
                if changed {
                    out.push(segment_changed(st));
                }
                focus_changed(st, config, &mut out);
            }
            AutoplayEvent::Finished => out.push(Event::AutoplayFinished { completed: true }),
        }
    }
    out
}

fn on_toggle_review(st: &mut SessionState) -> Vec<Event> {
    if st.review_active {
        if let Some((nav, index)) = st.saved_nav.take() {
            st.nav = nav;
            st.index = index;
        }
        st.review_active = false;
        vec![
            Event::ReviewExited {},
            Event::CueRequested {
                schedule: fixed_cue(CueKind::ReviewExit),
            },
        ]
    } else {
        st.saved_nav = Some((st.nav.clone(), st.index.clone()));
        st.review_active = true;
        vec![
            Event::ReviewEntered {
                log: st.review_log.join("\n"),
            },
            Event::CueRequested {
                schedule: fixed_cue(CueKind::ReviewEnter),
            },
        ]
    }
}

fn on_set_mode(st: &mut SessionState, config: &SessionConfig, mode: NavMode) -> Outcome {
    let index = build_segment_index(&st.dataset, mode, st.nav.active_axis, &config.nav)
        .map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    if st.autoplay.active {
        st.autoplay.stop();
        out.push(Event::AutoplayFinished { completed: false });
    }
    st.autoplay = AutoplayState::idle(mode);
    st.nav = NavState::initial(&index);
    st.index = index;
    out.push(Event::ModeChanged {
        mode,
        segments: st.index.len(),
    });
    focus_changed(st, config, &mut out);
    Ok(out)
}
