//! Line-oriented command scripts for headless replay.
//!
//! One directive per line; blank lines and `#` comments are skipped.

use thiserror::Error;

use crate::navgrid::NavMode;
use crate::plotdata::{Axis, Format};
use crate::session::Command;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ScriptError {
    pub line: usize,
    pub message: String,
}

pub fn parse_directive(text: &str) -> Result<Option<Command>, String> {
    let text = text.split('#').next().unwrap_or("").trim();
    if text.is_empty() {
        return Ok(None);
    }
    let words: Vec<&str> = text.split_whitespace().collect();
    let cmd = match words.as_slice() {
        ["move", "up"] => Command::MoveUp,
        ["move", "down"] => Command::MoveDown,
        ["move", "left"] => Command::MoveLeft,
        ["move", "right"] => Command::MoveRight,
        ["jump", "+"] => Command::JumpSegmentUp,
        ["jump", "-"] => Command::JumpSegmentDown,
        ["axis"] => Command::CycleAxis,
        ["announce"] => Command::Announce,
        ["autoplay"] => Command::ToggleAutoplay,
        ["intelligent"] => Command::IntelligentAutoplay,
        ["sonify"] => Command::ToggleSonification,
        ["verbosity"] => Command::CycleVerbosity,
        ["rate"] => Command::CycleSpeechRate,
        ["interrupt"] => Command::InterruptSpeech,
        ["review"] => Command::ToggleReview,
        ["axes"] => Command::ToggleAxes,
        ["help"] => Command::ToggleHelp,
        ["label", a] => Command::AnnounceAxis {
            axis: match *a {
                "x" => Axis::X,
                "y" => Axis::Y,
                "z" => Axis::Z,
                other => return Err(format!("unknown axis `{other}`")),
            },
        },
        ["tick", ms] => Command::AdvanceTime {
            dt_ms: ms
                .parse()
                .map_err(|_| format!("`{ms}` is not a whole number of milliseconds"))?,
        },
        ["mode", "point"] => Command::SetMode {
            mode: NavMode::Point,
        },
        ["mode", "surface"] => Command::SetMode {
            mode: NavMode::Surface,
        },
        ["export", "csv"] => Command::ExportData {
            format: Format::Csv,
        },
        ["export", "json"] => Command::ExportData {
            format: Format::Json,
        },
        _ => return Err(format!("unknown directive `{text}`")),
    };
    Ok(Some(cmd))
}

pub fn parse_script(text: &str) -> Result<Vec<Command>, ScriptError> {
    let mut commands = Vec::new();
    for (i, line) in text.lines().enumerate() {
        match parse_directive(line) {
            Ok(Some(cmd)) => commands.push(cmd),
            Ok(None) => {}
            Err(message) => {
                return Err(ScriptError {
                    line: i + 1,
                    message,
                })
            }
        }
    }
    Ok(commands)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_directive() {
        let script = "move up\nmove down\nmove left\nmove right\njump +\njump -\naxis\nannounce\n\
                      autoplay\nintelligent\nsonify\nverbosity\nrate\nreview\ntick 125\nmode point\nmode surface\n\
                      # comment\n\ninterrupt\naxes\nhelp\nlabel z\nexport json\n";
        let cmds = parse_script(script).unwrap();
        assert_eq!(cmds.len(), 22);
        assert_eq!(cmds[14], Command::AdvanceTime { dt_ms: 125 });
        assert_eq!(cmds[20], Command::AnnounceAxis { axis: Axis::Z });
    }

    #[test]
    fn unknown_directive_reports_line() {
        let err = parse_script("axis\n\nfly away\n").unwrap_err();
        assert_eq!(err.line, 3);
        assert!(parse_script("tick -5").is_err());
        assert!(parse_script("move sideways").is_err());
    }
}
