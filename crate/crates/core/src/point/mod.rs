//! Exact shortest Reeds-Shepp path between two fully specified poses.
//!
//! The solver exhaustively evaluates the sufficient word family (closed-form
//! inversion of each type under the reflection / time-reversal / gear-flip
//! symmetry group) and keeps the shortest verified candidate. An independent
//! lattice-search oracle lives in [`lattice`] for validation.

mod lattice;
mod words;

pub use lattice::{lattice_oracle, LatticeResolution};
pub use words::{WordKind, WordParams, EPS_GOAL};

use crate::error::{Error, Result};
use crate::geom::{to_local_frame, Pose, RsPath, Segment, Steer};
use std::sync::atomic::{AtomicU64, Ordering};

/// A solved word of the sufficient family, in the canonical (start-at-origin,
/// unit-radius) frame.
#[derive(Debug, Clone)]
pub struct CandidateWord {
    /// Which of the seven structural types this word instantiates.
    pub kind: WordKind,
    /// Arc angles (radians) and straight length (unit-radius frame).
    pub params: WordParams,
    /// Concrete segments realizing the word.
    pub segments: Vec<Segment>,
}

/// Counts how often the limited family failed to produce any candidate and
/// the solver fell back to the raw symmetry closure. Never observed in
/// testing; exposed so long-running callers can audit it.
static FALLBACK_COUNT: AtomicU64 = AtomicU64::new(0);

pub fn fallback_count() -> u64 {
    FALLBACK_COUNT.load(Ordering::Relaxed)
}

/// Enumerate every verified candidate word reaching `goal_local` (expressed
/// in the canonical start frame with unit turning radius), with its length.
pub fn enumerate_candidates(goal_local: Pose) -> Vec<(CandidateWord, f64)> {
    let mut out = Vec::new();
    words::for_each_candidate(
        goal_local.x,
        goal_local.y,
        goal_local.theta,
        true,
        &mut |w| {
            out.push((
                CandidateWord {
                    kind: w.kind,
                    params: w.params,
                    segments: w.segments().to_vec(),
                },
                w.len,
            ));
        },
    );
    out
}

/// Shortest word for a canonical goal; falls back to the raw closure if the
/// limited family comes up empty (diagnostic counter incremented).
pub(crate) fn best_raw(x: f64, y: f64, phi: f64) -> words::RawWord {
    if let Some(w) = words::best_word(x, y, phi, true) {
        return w;
    }
    FALLBACK_COUNT.fetch_add(1, Ordering::Relaxed);
    log::debug!("limited word family empty at goal ({x}, {y}, {phi}); using raw closure");
    words::best_word(x, y, phi, false)
        .expect("raw Reeds-Shepp closure cannot be empty for a finite goal")
}

/// Length of the shortest Reeds-Shepp path between two poses at turning
/// radius `rho`, without materializing the path.
pub fn p2p_length(start: Pose, goal: Pose, rho: f64) -> Result<f64> {
    let local = to_local_frame(start, goal, rho)?;
    Ok(best_raw(local.x, local.y, local.theta).len * rho)
}

/// Shortest Reeds-Shepp path between two poses at turning radius `rho`.
///
/// Ties between equal-length words break deterministically: fewest segments,
/// then fewest cusps, then lexicographic word order.
pub fn solve_p2p(start: Pose, goal: Pose, rho: f64) -> Result<RsPath> {
    let local = to_local_frame(start, goal, rho)?;
    let w = best_raw(local.x, local.y, local.theta);
    let segments = w
        .segments()
        .iter()
        .map(|s| match s.steer {
            // Straight magnitudes are lengths: scale back to world units.
            Steer::Straight => Segment::new(s.steer, s.gear, s.magnitude * rho),
            _ => *s,
        })
        .collect();
    Ok(RsPath::new(segments, rho))
}

/// Feasible-path bound for a pure heading change of `delta_theta`:
/// `2ρΔθ + 2ρ sin(Δθ/2)`, which never exceeds `3ρΔθ`.
pub fn reconfiguration_bound(delta_theta: f64, rho: f64) -> Result<f64> {
    if !(0.0..=std::f64::consts::PI).contains(&delta_theta) {
        return Err(Error::invalid(format!(
            "delta_theta must lie in [0, π], got {delta_theta}"
        )));
    }
    if !(rho > 0.0) {
        return Err(Error::invalid(format!("rho must be > 0, got {rho}")));
    }
    Ok(2.0 * rho * delta_theta + 2.0 * rho * (0.5 * delta_theta).sin())
}
