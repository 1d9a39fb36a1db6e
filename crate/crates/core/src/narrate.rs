//! Announcement text and number formatting.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::navgrid::{element_position, Element};
use crate::plotdata::{validate, Axis, AxisMeta, Dataset, DatasetKind, DimensionStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Verbosity {
    Verbose,
    Terse,
    SuperTerse,
}

impl Verbosity {
    pub fn next(self) -> Self {
        match self {
            Verbosity::Verbose => Verbosity::Terse,
            Verbosity::Terse => Verbosity::SuperTerse,
            Verbosity::SuperTerse => Verbosity::Verbose,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Verbosity::Verbose => "Verbose",
            Verbosity::Terse => "Terse",
            Verbosity::SuperTerse => "Super-terse",
        }
    }
}

pub const SPEECH_RATES: [f64; 5] = [0.75, 1.0, 1.25, 1.5, 2.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpeechRateIndex(pub usize);

impl Default for SpeechRateIndex {
    fn default() -> Self {
        SpeechRateIndex(1)
    }
}

impl SpeechRateIndex {
    pub fn next(self) -> Self {
        SpeechRateIndex((self.0 + 1) % SPEECH_RATES.len())
    }

    pub fn multiplier(self) -> f64 {
        SPEECH_RATES[self.0 % SPEECH_RATES.len()]
    }
}

/// Three significant digits, always with at least one fractional digit:
/// `120.0`, `0.101`, `6.20`, `1230.0`.
pub fn format_value(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v.is_finite() {
            "0.00".into()
        } else {
            v.to_string()
        };
    }
    // exact decimal rounding to 3 significant digits
    let sci = format!("{v:.2e}");
    let exponent: i32 = sci[sci.find('e').expect("exponent") + 1..]
        .parse()
        .expect("integer exponent");
    let rounded: f64 = sci.parse().expect("scientific literal");
    let decimals = (2 - exponent).max(1) as usize;
    format!("{rounded:.decimals$}")
}

fn value_with_unit(v: f64, unit: &str) -> String {
    if unit.is_empty() {
        format_value(v)
    } else {
        format!("{} {unit}", format_value(v))
    }
}

pub fn describe_focus(focus: Element, dataset: &Dataset, verbosity: Verbosity) -> String {
    let p = element_position(dataset, focus);
    let body = match verbosity {
        Verbosity::Verbose => Axis::ALL
            .iter()
            .map(|&a| {
                let meta = dataset.axis(a);
                format!("{} = {}", meta.name, value_with_unit(p.get(a), &meta.unit))
            })
            .collect::<Vec<_>>()
            .join(", "),
        Verbosity::Terse => Axis::ALL
            .iter()
            .map(|&a| format_value(p.get(a)))
            .collect::<Vec<_>>()
            .join(", "),
        Verbosity::SuperTerse => format_value(p.y),
    };
    match focus {
        Element::Cell(_) => format!("Cell: {body}"),
        Element::Point(_) => body,
    }
}

pub fn describe_axis(axis: Axis, meta: &AxisMeta) -> String {
    if meta.unit.is_empty() {
        format!("{axis}: {}", meta.name)
    } else {
        format!("{axis}: {} ({})", meta.name, meta.unit)
    }
}

/// The statistics panel: one block per dimension, then a footer with the
/// point count and integrity status.
pub fn describe_stats(dataset: &Dataset, stats: &[DimensionStats; 3]) -> String {
    let kind = match dataset.kind {
        DatasetKind::Point => "point",
        DatasetKind::Surface => "surface",
    };
    let mut out = String::new();
    if dataset.source_name.is_empty() {
        let _ = writeln!(out, "Dataset ({kind})");
    } else {
        let _ = writeln!(out, "Dataset: {} ({kind})", dataset.source_name);
    }
    for (axis, s) in Axis::ALL.iter().zip(stats) {
        let meta = dataset.axis(*axis);
        let _ = writeln!(out, "{}", describe_axis(*axis, meta));
        let _ = writeln!(
            out,
            "  range = {} ({} to {})",
            format_value(s.range),
            format_value(s.min),
            format_value(s.max)
        );
        let _ = writeln!(out, "  mean = {}", format_value(s.mean));
        let _ = writeln!(out, "  median = {}", format_value(s.median));
        let _ = writeln!(out, "  std dev = {}", format_value(s.std_dev));
    }
    let _ = write!(
        out,
        "{} points, integrity: {}",
        dataset.points.len(),
        validate(dataset).status
    );
    out
}
