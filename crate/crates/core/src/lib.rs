//! Deterministic engine for non-visual exploration of 3D surface and point
//! datasets: segmented tri-axis navigation, sonification, timed autoplay
//! tours, narration, and a review log, all behind a serialized event
//! boundary.

pub mod autoplay;
pub mod cli;
pub mod narrate;
pub mod navgrid;
pub mod plotdata;
pub mod script;
pub mod session;
pub mod sonify;

pub use navgrid::{Direction, Element, NavMode};
pub use plotdata::{Axis, Dataset, DatasetKind, Format, KindHint, Point3};
pub use session::{Command, Event, Session, SessionConfig};
