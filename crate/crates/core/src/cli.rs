//! Headless driver behind the `surfacenav` binary.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Parser, ValueEnum};

use crate::narrate::describe_stats;
use crate::navgrid::{NavConfig, NavMode};
use crate::plotdata::{
    dataset_stats, export, generate_sample, parse_dataset, Axis, Dataset, Format, KindHint,
    SampleConfig, SampleKind,
};
use crate::script::parse_script;
use crate::session::{Command, Event, Session, SessionConfig};
use crate::sonify::{encode_wav, render_pcm, CueSchedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SampleArg {
    Sinusoidal,
    Spectral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Point,
    Surface,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "surfacenav",
    version,
    about = "Headless sonification and navigation of 3D datasets"
)]
#[command(group(ArgGroup::new("data").required(true).args(["input", "sample"])))]
pub struct Args {
    /// CSV or JSON dataset (format chosen by extension).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Built-in sample dataset.
    #[arg(long, value_enum)]
    pub sample: Option<SampleArg>,
    #[arg(long, value_enum, default_value = "point")]
    pub mode: ModeArg,
    /// Initial navigation axis.
    #[arg(long, value_enum, default_value = "y")]
    pub axis: AxisArg,
    #[arg(long, default_value_t = 12)]
    pub bins: usize,
    /// Command script, one directive per line.
    #[arg(long)]
    pub script: Option<PathBuf>,
    /// Run a full autoplay tour (the default when no script is given).
    #[arg(long)]
    pub autoplay: bool,
    /// Use feature-adaptive pacing for the tour (surface mode only).
    #[arg(long)]
    pub intelligent: bool,
    #[arg(long)]
    pub transcript: Option<PathBuf>,
    #[arg(long)]
    pub wav: Option<PathBuf>,
    /// Print per-dimension statistics.
    #[arg(long)]
    pub stats: bool,
    /// Export the dataset: `--export csv|json <path>`.
    #[arg(long, num_args = 2, value_names = ["FORMAT", "PATH"])]
    pub export: Option<Vec<String>>,
    #[arg(long, default_value_t = 44100)]
    pub sample_rate: u32,
}

fn format_for(path: &Path) -> Format {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
        _ => Format::Csv,
    }
}

pub fn load_dataset(args: &Args) -> Result<Dataset> {
    if let Some(path) = &args.input {
        let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
        let mut dataset = parse_dataset(&bytes, format_for(path), KindHint::Auto)
            .with_context(|| format!("cannot parse {}", path.display()))?;
        if dataset.source_name.is_empty() {
            dataset.source_name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
        }
        return Ok(dataset);
    }
    let kind = match args.sample {
        Some(SampleArg::Sinusoidal) => SampleKind::Sinusoidal,
        Some(SampleArg::Spectral) => SampleKind::Spectral,
        None => bail!("either --input or --sample is required"),
    };
    Ok(generate_sample(kind, &SampleConfig::default_for(kind))?)
}

/// Collects the cues of an event stream onto the session timeline.
#[derive(Debug, Default)]
pub struct CueTimeline {
    pub schedule: CueSchedule,
    now_ms: f64,
}

impl CueTimeline {
    pub fn observe(&mut self, clock_ms: u64, events: &[Event]) {
        self.now_ms = clock_ms as f64;
        for e in events {
            match e {
                Event::AutoplayStep { at_ms, .. } => self.now_ms = *at_ms,
                Event::CueRequested { schedule } => {
                    self.schedule.extend_at(self.now_ms / 1000.0, schedule)
                }
                _ => {}
            }
        }
    }
}

fn clock(session: &Session) -> u64 {
    session.state().map_or(0, |s| s.clock_ms)
}

fn drive(session: &mut Session, timeline: &mut CueTimeline, cmd: Command) -> Vec<Event> {
    let before = clock(session);
    let events = session.dispatch(cmd);
    timeline.observe(before, &events);
    events
}

fn run_tour(session: &mut Session, timeline: &mut CueTimeline, intelligent: bool) -> Result<()> {
    let start = if intelligent {
        Command::IntelligentAutoplay
    } else {
        Command::ToggleAutoplay
    };
    if let Some(Event::Error { message }) = drive(session, timeline, start).first() {
        bail!("cannot start autoplay: {message}");
    }
    while session.state().is_some_and(|s| s.autoplay.active) {
        drive(session, timeline, Command::AdvanceTime { dt_ms: 1000 });
    }
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}

pub fn run(args: &Args, stdout: &mut dyn Write) -> Result<()> {
    let dataset = load_dataset(args)?;
    let script = match &args.script {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            Some(
                parse_script(&text)
                    .with_context(|| format!("invalid script {}", path.display()))?,
            )
        }
        None => None,
    };
    let export_target = match args.export.as_deref() {
        Some([fmt, path]) => {
            let format = match fmt.to_ascii_lowercase().as_str() {
                "csv" => Format::Csv,
                "json" => Format::Json,
                other => bail!("unknown export format `{other}` (expected csv or json)"),
            };
            Some((format, PathBuf::from(path)))
        }
        Some(_) => bail!("--export takes a format and a path"),
        None => None,
    };
    if args.bins == 0 {
        bail!("--bins must be at least 1");
    }

    if args.stats {
        let stats = dataset_stats(&dataset)?;
        writeln!(stdout, "{}", describe_stats(&dataset, &stats))?;
    }
    if let Some((format, path)) = &export_target {
        write_file(path, &export(&dataset, *format))?;
    }

    let config = SessionConfig {
        nav: NavConfig {
            default_bins: args.bins,
        },
        initial_axis: match args.axis {
            AxisArg::X => Axis::X,
            AxisArg::Y => Axis::Y,
            AxisArg::Z => Axis::Z,
        },
        initial_mode: match args.mode {
            ModeArg::Point => NavMode::Point,
            ModeArg::Surface => NavMode::Surface,
        },
        ..SessionConfig::default()
    };
    let mut session = Session::new(dataset, config)?;
    let mut timeline = CueTimeline::default();

    if let Some(commands) = script.clone() {
        for cmd in commands {
            drive(&mut session, &mut timeline, cmd);
        }
    }
    if args.autoplay || args.intelligent || script.is_none() {
        run_tour(&mut session, &mut timeline, args.intelligent)?;
    }

    if let Some(path) = &args.transcript {
        write_file(path, session.transcript().as_bytes())?;
    }
    if let Some(path) = &args.wav {
        let buffer = render_pcm(&timeline.schedule, args.sample_rate)?;
        write_file(path, &encode_wav(&buffer)?)?;
    }
    Ok(())
}
