#![forbid(unsafe_code)]

//! Shortest Reeds-Shepp (forward/backward, bounded-curvature) paths through
//! waypoints with field-of-view constraints.
//!
//! The crate solves four nested problems:
//!
//! * [`point`] — exact shortest path between two fully specified poses, with
//!   an independent lattice-search oracle;
//! * [`interval`] — shortest path between two positioned waypoints whose
//!   headings are constrained to closed intervals;
//! * [`seq`] — fixed-sequence planning through `n` waypoints: a layered-graph
//!   relaxation gives a certified lower bound, a repair step gives a feasible
//!   path, and an a-priori gap formula certifies the difference;
//! * [`tour`] — the sequence-free variant as a one-in-a-set TSP, exact at
//!   small sizes and heuristic at benchmark scale.
//!
//! [`instance`] generates and serializes benchmark instances.

pub mod angle;
pub mod error;
pub mod geom;
pub mod instance;
pub mod interval;
pub mod point;
pub mod seq;
pub mod tour;

pub use angle::{normalize_angle, AngleInterval};
pub use error::{Error, Result};
pub use geom::{integrate_path, to_local_frame, Gear, Point, Pose, RsPath, Segment, Steer};
