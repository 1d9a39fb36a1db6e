//! Data-to-sound mapping, fixed signal cues, and offline stereo rendering.

use std::f64::consts::{FRAC_PI_4, TAU};
use std::io::Cursor;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::plotdata::{Axis, AxisMeta, Point3};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SonifyError {
    #[error("cannot sonify a non-finite point")]
    NonFinite,
    #[error("sample rate {0} Hz is below the 8000 Hz minimum")]
    SampleRate(u32),
    #[error("wav encoding failed: {0}")]
    Wav(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Waveform {
    Sine,
    Square,
    Sawtooth,
    Triangle,
}

impl Waveform {
    /// One period sampled at `phase` in cycles.
    pub fn sample(self, phase: f64) -> f64 {
        let frac = phase - phase.floor();
        match self {
            Waveform::Sine => (TAU * phase).sin(),
            Waveform::Square => {
                if frac < 0.5 {
                    1.0
                } else {
                    -1.0
                }
            }
            Waveform::Sawtooth => 2.0 * frac - 1.0,
            Waveform::Triangle => {
                if frac < 0.5 {
                    4.0 * frac - 1.0
                } else {
                    3.0 - 4.0 * frac
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SonifyConfig {
    pub f_min: f64,
    pub f_max: f64,
    pub pan_range: (f64, f64),
    pub duration_range: (f64, f64),
    pub gain_range: (f64, f64),
    pub oscillators: [Waveform; 4],
}

impl Default for SonifyConfig {
    fn default() -> Self {
        SonifyConfig {
            f_min: 200.0,
            f_max: 1200.0,
            pan_range: (-1.0, 1.0),
            duration_range: (0.12, 0.36),
            gain_range: (0.35, 0.85),
            oscillators: [
                Waveform::Sine,
                Waveform::Square,
                Waveform::Sawtooth,
                Waveform::Triangle,
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum CueKind {
    DataTone,
    Boundary,
    ReviewEnter,
    ReviewExit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AudioCue {
    pub kind: CueKind,
    pub frequency: f64,
    pub pan: f64,
    pub oscillator: Waveform,
    pub duration: f64,
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduledCue {
    pub onset: f64,
    pub cue: AudioCue,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CueSchedule {
    pub entries: Vec<ScheduledCue>,
}

impl CueSchedule {
    pub fn single(cue: AudioCue) -> Self {
        CueSchedule {
            entries: vec![ScheduledCue { onset: 0.0, cue }],
        }
    }

    /// Inserts a cue after every entry with an onset at or before `onset`.
    pub fn push(&mut self, onset: f64, cue: AudioCue) {
        let at = self.entries.partition_point(|e| e.onset <= onset);
        self.entries.insert(at, ScheduledCue { onset, cue });
    }

    /// Appends every entry of `other`, shifted by `offset` seconds.
    pub fn extend_at(&mut self, offset: f64, other: &CueSchedule) {
        for e in &other.entries {
            self.push(offset + e.onset, e.cue.clone());
        }
    }

    /// Latest cue end time in seconds.
    pub fn extent(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.onset + e.cue.duration)
            .fold(0.0, f64::max)
    }
}

fn unit(v: f64, meta: &AxisMeta) -> f64 {
    if meta.max > meta.min {
        ((v - meta.min) / (meta.max - meta.min)).clamp(0.0, 1.0)
    } else {
        0.5
    }
}

fn lerp((a, b): (f64, f64), t: f64) -> f64 {
    a + (b - a) * t
}

/// Y drives pitch, X drives pan and oscillator (stepped by quartile), Z drives
/// duration and gain. Flat axes map to the middle of each range.
pub fn map_cue(
    point: &Point3,
    bounds: &[AxisMeta; 3],
    config: &SonifyConfig,
) -> Result<AudioCue, SonifyError> {
    if !point.is_finite() {
        return Err(SonifyError::NonFinite);
    }
    let tx = unit(point.x, &bounds[Axis::X.index()]);
    let ty = unit(point.y, &bounds[Axis::Y.index()]);
    let tz = unit(point.z, &bounds[Axis::Z.index()]);
    let quartile = ((4.0 * tx).floor() as usize).min(3);
    Ok(AudioCue {
        kind: CueKind::DataTone,
        frequency: config.f_min + ty * (config.f_max - config.f_min),
        pan: lerp(config.pan_range, tx),
        oscillator: config.oscillators[quartile],
        duration: lerp(config.duration_range, tz),
        gain: lerp(config.gain_range, tz),
    })
}

const SIGNAL_TONE: f64 = 0.08;
const REVIEW_STEPS: [f64; 3] = [330.0, 440.0, 550.0];

/// Boundary is a single 150 Hz square blip, below the data pitch floor.
/// Review enter/exit are three back-to-back sine tones, ascending or
/// descending.
pub fn fixed_cue(kind: CueKind) -> CueSchedule {
    let tone = |kind, frequency, oscillator, gain| AudioCue {
        kind,
        frequency,
        pan: 0.0,
        oscillator,
        duration: SIGNAL_TONE,
        gain,
    };
    let mut schedule = CueSchedule::default();
    match kind {
        CueKind::Boundary | CueKind::DataTone => {
            schedule.push(0.0, tone(CueKind::Boundary, 150.0, Waveform::Square, 0.5));
        }
        CueKind::ReviewEnter | CueKind::ReviewExit => {
            let mut freqs = REVIEW_STEPS;
            if kind == CueKind::ReviewExit {
                freqs.reverse();
            }
            for (i, f) in freqs.into_iter().enumerate() {
                schedule.push(i as f64 * SIGNAL_TONE, tone(kind, f, Waveform::Sine, 0.5));
            }
        }
    }
    schedule
}

/// Equal-power channel gains for `pan` in [-1, 1].
pub fn pan_gains(pan: f64, gain: f64) -> (f64, f64) {
    let theta = (pan.clamp(-1.0, 1.0) + 1.0) * FRAC_PI_4;
    (gain * theta.cos(), gain * theta.sin())
}

#[derive(Debug, Clone, PartialEq)]
pub struct StereoBuffer {
    pub sample_rate: u32,
    pub left: Vec<f32>,
    pub right: Vec<f32>,
}

impl StereoBuffer {
    pub fn len(&self) -> usize {
        self.left.len()
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.len() as f64 / self.sample_rate as f64
    }
}

const FADE_SECONDS: f64 = 0.005;
// absorbs float noise when onset + duration lands on a whole sample
const SAMPLE_EPS: f64 = 1e-9;

fn whole_samples(seconds: f64, rate: f64) -> usize {
    (seconds * rate - SAMPLE_EPS).ceil().max(0.0) as usize
}

/// Mixes a schedule into a stereo buffer: per-cue 5 ms linear fades,
/// equal-power panning, sum, then hard clip.
pub fn render_pcm(schedule: &CueSchedule, sample_rate: u32) -> Result<StereoBuffer, SonifyError> {
    if sample_rate < 8000 {
        return Err(SonifyError::SampleRate(sample_rate));
    }
    let rate = sample_rate as f64;
    let len = whole_samples(schedule.extent(), rate);
    let mut left = vec![0.0f64; len];
    let mut right = vec![0.0f64; len];
    let fade = (FADE_SECONDS * rate).max(1.0);
    for entry in &schedule.entries {
        let cue = &entry.cue;
        let start = (entry.onset * rate).round() as usize;
        let end = whole_samples(entry.onset + cue.duration, rate).min(len);
        let count = end.saturating_sub(start);
        let (gl, gr) = pan_gains(cue.pan, cue.gain);
        for n in 0..count {
            let t = n as f64 / rate;
            let envelope = (n as f64 / fade)
                .min((count - 1 - n) as f64 / fade)
                .min(1.0);
            let s = cue.oscillator.sample(cue.frequency * t) * envelope;
            left[start + n] += gl * s;
            right[start + n] += gr * s;
        }
    }
    let clip = |v: Vec<f64>| v.into_iter().map(|s| s.clamp(-1.0, 1.0) as f32).collect();
    Ok(StereoBuffer {
        sample_rate,
        left: clip(left),
        right: clip(right),
    })
}

/// RIFF/WAVE, 16-bit signed little-endian, two interleaved channels.
pub fn encode_wav(buffer: &StereoBuffer) -> Result<Vec<u8>, SonifyError> {
    let spec = hound::WavSpec {
        channels: 2,
        sample_rate: buffer.sample_rate,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut out = Cursor::new(Vec::new());
    let err = |e: hound::Error| SonifyError::Wav(e.to_string());
    {
        let mut writer = hound::WavWriter::new(&mut out, spec).map_err(err)?;
        let quantize = |s: f32| (s.clamp(-1.0, 1.0) * i16::MAX as f32).round() as i16;
        for (&l, &r) in buffer.left.iter().zip(&buffer.right) {
            writer.write_sample(quantize(l)).map_err(err)?;
            writer.write_sample(quantize(r)).map_err(err)?;
        }
        writer.finalize().map_err(err)?;
    }
    Ok(out.into_inner())
}
