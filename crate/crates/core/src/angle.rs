//! Angle arithmetic and heading intervals.
//!
//! Headings are stored normalized to `[0, 2π)`. Intervals are stored
//! un-normalized (`theta_max` may exceed `2π`) and membership is tested by
//! modular representative, so a window like `[3π/2, 2π + π/4]` behaves as
//! expected.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Wrap an angle into `[0, 2π)`. Infallible companion of [`normalize_angle`];
/// callers must pass finite values.
#[inline]
pub(crate) fn wrap_tau(a: f64) -> f64 {
    debug_assert!(a.is_finite());
    let r = a % TAU;
    if r < 0.0 {
        // r ∈ (-2π, 0); adding 2π can round back up to 2π for tiny |r|.
        let w = r + TAU;
        if w >= TAU {
            0.0
        } else {
            w
        }
    } else {
        r
    }
}

/// Normalize an angle to `[0, 2π)`.
///
/// Returns an error for non-finite input.
pub fn normalize_angle(a: f64) -> Result<f64> {
    if !a.is_finite() {
        return Err(Error::invalid(format!("angle must be finite, got {a}")));
    }
    Ok(wrap_tau(a))
}

/// Closed heading window `[theta_min, theta_max]` at a waypoint.
///
/// `theta_min == theta_max` is a degenerate, fully-fixed heading. Width may
/// not exceed `2π`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleInterval {
    pub theta_min: f64,
    pub theta_max: f64,
}

impl AngleInterval {
    /// Create an interval; `theta_min ≤ theta_max` and width ≤ 2π required.
    pub fn new(theta_min: f64, theta_max: f64) -> Self {
        assert!(
            theta_min.is_finite() && theta_max.is_finite(),
            "interval bounds must be finite"
        );
        assert!(
            theta_min <= theta_max,
            "theta_min ({theta_min}) must not exceed theta_max ({theta_max})"
        );
        assert!(
            theta_max - theta_min <= TAU + 1e-12,
            "interval width must not exceed 2π"
        );
        Self {
            theta_min,
            theta_max,
        }
    }

    #[inline]
    pub fn width(&self) -> f64 {
        self.theta_max - self.theta_min
    }

    /// Degenerate interval pinning the heading exactly.
    pub fn fixed(theta: f64) -> Self {
        Self::new(theta, theta)
    }

    /// True iff the interval pins a single heading.
    #[inline]
    pub fn is_degenerate(&self) -> bool {
        self.theta_min == self.theta_max
    }

    /// Membership by modular representative: true iff some `a + 2πm` lies in
    /// `[theta_min, theta_max]`.
    pub fn contains(&self, a: f64) -> bool {
        self.contains_with_tol(a, 0.0)
    }

    /// Membership with an absolute slack on both bounds.
    pub fn contains_with_tol(&self, a: f64, tol: f64) -> bool {
        if self.width() >= TAU {
            return true;
        }
        let r = self.theta_min + wrap_tau(a - self.theta_min);
        r <= self.theta_max + tol || r >= self.theta_min + TAU - tol
    }

    /// Representative of `a` in `[theta_min, theta_min + 2π)`; useful for
    /// clamping results into the interval's native branch.
    pub fn representative(&self, a: f64) -> f64 {
        self.theta_min + wrap_tau(a - self.theta_min)
    }

    /// Strict-interior membership with boundary tolerance `tol`: the
    /// representative must be at least `tol` away from both bounds.
    pub fn contains_interior(&self, a: f64, tol: f64) -> bool {
        if self.width() >= TAU {
            return true;
        }
        let r = self.representative(a);
        r > self.theta_min + tol && r < self.theta_max - tol
    }
}

/// Shortest absolute angular difference between two headings, in `[0, π]`.
#[inline]
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let d = wrap_tau(a - b);
    d.min(TAU - d)
}
