//! Poses, path segments, and Reeds-Shepp word representation.
//!
//! A path is a word: an ordered list of typed segments (left/right arc or
//! straight, each driven forward or backward). Arc magnitudes are in radians
//! of turn; straight magnitudes are in length units. Cusps are implicit
//! wherever the gear flips between consecutive segments.

use crate::angle::wrap_tau;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Planar point in length units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    #[inline]
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Planar configuration: position plus heading normalized to `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Pose {
    /// Create a pose, normalizing the heading to `[0, 2π)`.
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        debug_assert!(x.is_finite() && y.is_finite() && theta.is_finite());
        Self {
            x,
            y,
            theta: wrap_tau(theta),
        }
    }

    #[inline]
    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

/// Steering direction of a segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Steer {
    Left,
    Right,
    Straight,
}

/// Drive direction of a segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Gear {
    Forward,
    Backward,
}

impl Gear {
    #[inline]
    pub fn flip(self) -> Gear {
        match self {
            Gear::Forward => Gear::Backward,
            Gear::Backward => Gear::Forward,
        }
    }

    #[inline]
    fn sign(self) -> f64 {
        match self {
            Gear::Forward => 1.0,
            Gear::Backward => -1.0,
        }
    }
}

impl Steer {
    #[inline]
    pub fn flip(self) -> Steer {
        match self {
            Steer::Left => Steer::Right,
            Steer::Right => Steer::Left,
            Steer::Straight => Steer::Straight,
        }
    }
}

/// One piece of a Reeds-Shepp word.
///
/// `magnitude` is radians of turn for arcs (≤ 2π) and length units for
/// straights; it is never negative. Direction of travel is carried by `gear`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub steer: Steer,
    pub gear: Gear,
    pub magnitude: f64,
}

impl Segment {
    pub fn new(steer: Steer, gear: Gear, magnitude: f64) -> Self {
        debug_assert!(magnitude >= 0.0, "segment magnitude must be >= 0");
        Self {
            steer,
            gear,
            magnitude,
        }
    }

    /// Signed parameter: arc angle or straight length, negative when driving
    /// backward.
    #[inline]
    pub(crate) fn signed(&self) -> f64 {
        self.gear.sign() * self.magnitude
    }

    /// Arc length contributed by this segment for turning radius `rho`
    /// (arcs scale by `rho`; straights do not).
    #[inline]
    pub fn arc_length(&self, rho: f64) -> f64 {
        match self.steer {
            Steer::Straight => self.magnitude,
            _ => self.magnitude * rho,
        }
    }

    /// Segment with the gear flipped (used when reversing a word).
    #[inline]
    pub fn gear_flipped(&self) -> Segment {
        Segment::new(self.steer, self.gear.flip(), self.magnitude)
    }
}

/// Advance `pose` by one segment at turning radius `rho`, by the signed
/// fraction `part` of its magnitude (`part = signed magnitude` traverses the
/// whole segment).
#[inline]
pub(crate) fn advance(pose: Pose, steer: Steer, rho: f64, signed_amount: f64) -> Pose {
    let (x, y, th) = (pose.x, pose.y, pose.theta);
    match steer {
        Steer::Straight => {
            let (s, c) = th.sin_cos();
            Pose::new(x + signed_amount * c, y + signed_amount * s, th)
        }
        Steer::Left => {
            let nt = th + signed_amount;
            let (s0, c0) = th.sin_cos();
            let (s1, c1) = nt.sin_cos();
            Pose::new(x + rho * (s1 - s0), y + rho * (c0 - c1), nt)
        }
        Steer::Right => {
            let nt = th - signed_amount;
            let (s0, c0) = th.sin_cos();
            let (s1, c1) = nt.sin_cos();
            Pose::new(x + rho * (s0 - s1), y + rho * (c1 - c0), nt)
        }
    }
}

/// Endpoint of one whole segment applied to `pose`.
#[inline]
pub(crate) fn apply_segment(pose: Pose, seg: &Segment, rho: f64) -> Pose {
    advance(pose, seg.steer, rho, seg.signed())
}

/// A Reeds-Shepp path: a word with concrete magnitudes, its turning radius,
/// and its total arc length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RsPath {
    pub segments: Vec<Segment>,
    pub rho: f64,
    pub length: f64,
}

impl RsPath {
    /// Build a path from segments; the length is the sum of per-segment arc
    /// lengths at radius `rho`.
    pub fn new(segments: Vec<Segment>, rho: f64) -> Self {
        debug_assert!(rho > 0.0);
        debug_assert!(segments.len() <= 5, "Reeds-Shepp words have at most 5 pieces");
        let length = segments.iter().map(|s| s.arc_length(rho)).sum();
        Self {
            segments,
            rho,
            length,
        }
    }

    pub fn empty(rho: f64) -> Self {
        Self::new(Vec::new(), rho)
    }

    /// Number of gear flips between consecutive segments.
    pub fn cusp_count(&self) -> usize {
        self.segments
            .windows(2)
            .filter(|w| w[0].gear != w[1].gear)
            .count()
    }

    /// Analytic endpoint of the word applied from `start`.
    pub fn endpoint(&self, start: Pose) -> Pose {
        self.segments
            .iter()
            .fold(start, |p, s| apply_segment(p, s, self.rho))
    }

    /// The same geometric path traversed goal-to-start: segment order
    /// reversed, every gear flipped.
    pub fn reversed(&self) -> RsPath {
        let segs = self
            .segments
            .iter()
            .rev()
            .map(Segment::gear_flipped)
            .collect();
        RsPath::new(segs, self.rho)
    }
}

/// Express `goal` in the frame of `start` with unit turning radius: `start`
/// maps to the origin pose and coordinates are divided by `rho`. Path lengths
/// computed in this frame multiply back by `rho`.
pub fn to_local_frame(start: Pose, goal: Pose, rho: f64) -> Result<Pose> {
    if !(rho > 0.0) {
        return Err(Error::invalid(format!("rho must be > 0, got {rho}")));
    }
    let dx = goal.x - start.x;
    let dy = goal.y - start.y;
    let (s, c) = start.theta.sin_cos();
    Ok(Pose::new(
        (dx * c + dy * s) / rho,
        (-dx * s + dy * c) / rho,
        goal.theta - start.theta,
    ))
}

/// Inverse of [`to_local_frame`]: map a unit-radius local pose back to the
/// world frame of `start`.
pub fn from_local_frame(start: Pose, local: Pose, rho: f64) -> Result<Pose> {
    if !(rho > 0.0) {
        return Err(Error::invalid(format!("rho must be > 0, got {rho}")));
    }
    let (s, c) = start.theta.sin_cos();
    let x = local.x * rho;
    let y = local.y * rho;
    Ok(Pose::new(
        start.x + x * c - y * s,
        start.y + x * s + y * c,
        start.theta + local.theta,
    ))
}

/// Sample the path as a polyline of poses, `samples_per_segment ≥ 2` per
/// segment (first sample is `start`; the last equals the analytic endpoint).
pub fn integrate_path(path: &RsPath, start: Pose, samples_per_segment: usize) -> Vec<Pose> {
    assert!(samples_per_segment >= 2, "need at least 2 samples per segment");
    let mut out = Vec::with_capacity(1 + path.segments.len() * (samples_per_segment - 1));
    out.push(start);
    let mut pose = start;
    for seg in &path.segments {
        let total = seg.signed();
        for i in 1..=samples_per_segment - 1 {
            let frac = i as f64 / (samples_per_segment - 1) as f64;
            out.push(advance(pose, seg.steer, path.rho, total * frac));
        }
        pose = advance(pose, seg.steer, path.rho, total);
        // Replace the last interpolated sample with the exact segment endpoint.
        *out.last_mut().unwrap() = pose;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn local_frame_identity() {
        let g = to_local_frame(Pose::new(0.0, 0.0, 0.0), Pose::new(2.0, 0.0, 0.0), 1.0).unwrap();
        assert_abs_diff_eq!(g.x, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.y, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.theta, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn local_frame_rotation() {
        let g = to_local_frame(
            Pose::new(1.0, 1.0, FRAC_PI_2),
            Pose::new(1.0, 3.0, FRAC_PI_2),
            1.0,
        )
        .unwrap();
        assert_abs_diff_eq!(g.x, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g.y, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g.theta, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn local_frame_scaling() {
        let g = to_local_frame(Pose::new(0.0, 0.0, 0.0), Pose::new(200.0, 0.0, 0.0), 100.0)
            .unwrap();
        assert_abs_diff_eq!(g.x, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn local_frame_rejects_bad_rho() {
        assert!(to_local_frame(Pose::new(0.0, 0.0, 0.0), Pose::new(1.0, 0.0, 0.0), 0.0).is_err());
        assert!(to_local_frame(Pose::new(0.0, 0.0, 0.0), Pose::new(1.0, 0.0, 0.0), -1.0).is_err());
    }

    #[test]
    fn local_frame_round_trip() {
        let starts = [
            Pose::new(3.0, -2.0, 1.1),
            Pose::new(-7.5, 0.25, 5.9),
            Pose::new(0.0, 0.0, PI),
        ];
        let goals = [
            Pose::new(10.0, 4.0, 0.3),
            Pose::new(-1.0, -1.0, 2.2),
            Pose::new(5.0, 5.0, 6.0),
        ];
        for s in starts {
            for g in goals {
                let local = to_local_frame(s, g, 3.0).unwrap();
                let back = from_local_frame(s, local, 3.0).unwrap();
                assert_abs_diff_eq!(back.x, g.x, epsilon = 1e-12 * (1.0 + g.x.abs()));
                assert_abs_diff_eq!(back.y, g.y, epsilon = 1e-12 * (1.0 + g.y.abs()));
                assert_abs_diff_eq!(back.theta, g.theta, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn integrate_straight() {
        let p = RsPath::new(
            vec![Segment::new(Steer::Straight, Gear::Forward, 5.0)],
            1.0,
        );
        let line = integrate_path(&p, Pose::new(0.0, 0.0, 0.0), 8);
        let end = line.last().unwrap();
        assert_abs_diff_eq!(end.x, 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(end.y, 0.0, epsilon = 1e-12);
        assert_eq!(line.len(), 8);
    }

    #[test]
    fn integrate_quarter_left_arc() {
        let p = RsPath::new(vec![Segment::new(Steer::Left, Gear::Forward, FRAC_PI_2)], 1.0);
        let end = *integrate_path(&p, Pose::new(0.0, 0.0, 0.0), 16).last().unwrap();
        assert_abs_diff_eq!(end.x, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(end.y, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(end.theta, FRAC_PI_2, epsilon = 1e-12);
        // Arc samples stay on the circle of radius 1 about (0, 1).
        for q in integrate_path(&p, Pose::new(0.0, 0.0, 0.0), 16) {
            assert_abs_diff_eq!(q.x.hypot(q.y - 1.0), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn integrate_retraced_arc_returns_home() {
        let p = RsPath::new(
            vec![
                Segment::new(Steer::Left, Gear::Forward, FRAC_PI_2),
                Segment::new(Steer::Left, Gear::Backward, FRAC_PI_2),
            ],
            1.0,
        );
        let end = *integrate_path(&p, Pose::new(0.0, 0.0, 0.0), 16).last().unwrap();
        assert_abs_diff_eq!(end.x, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(end.y, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(end.theta, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn endpoint_matches_integration() {
        let p = RsPath::new(
            vec![
                Segment::new(Steer::Left, Gear::Forward, 0.7),
                Segment::new(Steer::Right, Gear::Backward, 1.2),
                Segment::new(Steer::Straight, Gear::Backward, 2.5),
                Segment::new(Steer::Right, Gear::Forward, 0.4),
            ],
            2.0,
        );
        let start = Pose::new(1.0, -3.0, 0.9);
        let a = p.endpoint(start);
        let b = *integrate_path(&p, start, 32).last().unwrap();
        assert_abs_diff_eq!(a.x, b.x, epsilon = 1e-9);
        assert_abs_diff_eq!(a.y, b.y, epsilon = 1e-9);
        assert_abs_diff_eq!(a.theta, b.theta, epsilon = 1e-9);
    }

    #[test]
    fn reversed_path_swaps_endpoints() {
        let p = RsPath::new(
            vec![
                Segment::new(Steer::Left, Gear::Forward, 0.8),
                Segment::new(Steer::Straight, Gear::Forward, 1.5),
                Segment::new(Steer::Right, Gear::Backward, 0.3),
            ],
            1.5,
        );
        let start = Pose::new(0.2, 0.4, 1.0);
        let end = p.endpoint(start);
        let back = p.reversed().endpoint(end);
        assert_abs_diff_eq!(back.x, start.x, epsilon = 1e-10);
        assert_abs_diff_eq!(back.y, start.y, epsilon = 1e-10);
        assert_abs_diff_eq!(back.theta, start.theta, epsilon = 1e-10);
        assert_abs_diff_eq!(p.reversed().length, p.length, epsilon = 1e-12);
    }
}
