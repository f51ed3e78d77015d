//! Word machinery for the heading-interval problem.
//!
//! The endpoint-case analysis leaves five case families with at least one
//! free heading; their candidate words are short (at most four pieces) and
//! reduce to circle intersections or to one scalar alignment equation in one
//! unknown. Those alignment residuals are exact sinusoids of the unknown
//! angle (`A sin θ + B cos θ + C`), so the roots come from three samples in
//! closed form. Length-minimizing one-parameter families are refined by
//! golden-section search over a coarse sweep.
//!
//! All geometry here is in world units at turning radius `rho`.

use crate::angle::{wrap_tau, AngleInterval};
use crate::geom::{advance, apply_segment, Gear, Point, Pose, Segment, Steer};
use std::f64::consts::{FRAC_PI_2, TAU};

/// Golden-section brackets shrink to this width.
pub(crate) const GOLDEN_TOL: f64 = 1e-10;

/// A solved interval-word candidate: concrete segments plus both headings.
#[derive(Debug, Clone)]
pub(crate) struct WordCandidate {
    pub theta_dep: f64,
    pub theta_arr: f64,
    pub length: f64,
    pub segments: Vec<Segment>,
    pub shape: Shape,
}

/// Structural shape of an interval-case word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Shape {
    /// Straight only.
    Straight,
    /// One arc then a straight (`rS`-type).
    ArcStraight,
    /// Two arcs separated by a cusp (`r|r`-type).
    TwoArcCusp,
    /// Two arcs without a cusp (degenerate member of the `rl|l` family).
    TwoArcSmooth,
    /// Three arcs, cusp before the last (`rl|l`-type).
    ThreeArc,
    /// Arc, quarter-arc across a cusp, straight (`r|r_{π/2}S`-type).
    ArcQuarterStraight,
    /// Quarter-arc, cusp, quarter-arc, straight (`l_{π/2}|l_{π/2}S`-type).
    QuarterQuarterStraight,
}

/// Heading-rotation letter of a segment: `l` when the heading increases along
/// the drive (left-forward or right-backward), `r` when it decreases, `s`
/// for straights.
#[inline]
pub(crate) fn rotation_letter(steer: Steer, gear: Gear) -> char {
    match (steer, gear) {
        (Steer::Straight, _) => 's',
        (Steer::Left, Gear::Forward) | (Steer::Right, Gear::Backward) => 'l',
        _ => 'r',
    }
}

#[inline]
fn gear_sign(gear: Gear) -> f64 {
    match gear {
        Gear::Forward => 1.0,
        Gear::Backward => -1.0,
    }
}

#[inline]
fn circle_center(p: &Pose, steer: Steer, rho: f64) -> Point {
    let (s, c) = p.theta.sin_cos();
    match steer {
        Steer::Left => Point::new(p.x - rho * s, p.y + rho * c),
        Steer::Right => Point::new(p.x + rho * s, p.y - rho * c),
        Steer::Straight => unreachable!("straights have no circle"),
    }
}

#[inline]
fn psi_of(center: Point, p: Point) -> f64 {
    (p.y - center.y).atan2(p.x - center.x)
}

#[inline]
fn heading_on(steer: Steer, psi: f64) -> f64 {
    match steer {
        Steer::Left => psi + FRAC_PI_2,
        Steer::Right => psi - FRAC_PI_2,
        Steer::Straight => unreachable!(),
    }
}

/// Sign of the position-angle rate along the drive (`l` is counterclockwise).
#[inline]
fn arc_sign(steer: Steer, gear: Gear) -> f64 {
    if rotation_letter(steer, gear) == 'l' {
        1.0
    } else {
        -1.0
    }
}

/// Intersection points of two circles, when they exist.
fn circle_circle(c1: Point, r1: f64, c2: Point, r2: f64, out: &mut Vec<Point>) {
    out.clear();
    let dx = c2.x - c1.x;
    let dy = c2.y - c1.y;
    let d = dx.hypot(dy);
    if d < 1e-14 {
        return;
    }
    let a = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
    let h2 = r1 * r1 - a * a;
    if h2 < -1e-9 * r1 * r1 {
        return;
    }
    let h = h2.max(0.0).sqrt();
    let mx = c1.x + a * dx / d;
    let my = c1.y + a * dy / d;
    if h <= 1e-12 {
        out.push(Point::new(mx, my));
    } else {
        let ox = -dy / d * h;
        let oy = dx / d * h;
        out.push(Point::new(mx + ox, my + oy));
        out.push(Point::new(mx - ox, my - oy));
    }
}

fn verified(
    start: Pose,
    target: Point,
    theta_arr: f64,
    segments: Vec<Segment>,
    rho: f64,
    shape: Shape,
) -> Option<WordCandidate> {
    let end = segments
        .iter()
        .fold(start, |p, s| apply_segment(p, s, rho));
    let tol = 1e-7 * rho;
    if (end.x - target.x).abs() > tol || (end.y - target.y).abs() > tol {
        return None;
    }
    if crate::angle::angular_distance(end.theta, theta_arr) > 1e-7 {
        return None;
    }
    let length = segments.iter().map(|s| s.arc_length(rho)).sum();
    Some(WordCandidate {
        theta_dep: start.theta,
        theta_arr: wrap_tau(theta_arr),
        length,
        segments,
        shape,
    })
}

fn push_seg(segs: &mut Vec<Segment>, steer: Steer, gear: Gear, mag: f64) {
    if mag > 1e-12 {
        segs.push(Segment::new(steer, gear, mag));
    }
}

/// Roots of `f(θ) = A sin θ + B cos θ + C` on `[0, 2π)`, recovered from the
/// three samples `f(0), f(π/2), f(π)`. The alignment residuals of every
/// arc-then-straight shape have exactly this form.
fn sinusoid_roots(f: &dyn Fn(f64) -> f64, out: &mut Vec<f64>) {
    out.clear();
    let f0 = f(0.0);
    let f1 = f(FRAC_PI_2);
    let f2 = f(std::f64::consts::PI);
    let c = 0.5 * (f0 + f2);
    let b = 0.5 * (f0 - f2);
    let a = f1 - c;
    let amp = a.hypot(b);
    if amp < 1e-14 {
        return;
    }
    // A sin θ + B cos θ = amp · sin(θ + φ) with φ = atan2(B, A).
    let phi = b.atan2(a);
    let s = (-c / amp).clamp(-1.0, 1.0);
    if (-c).abs() > amp * (1.0 + 1e-12) {
        return;
    }
    let r1 = s.asin() - phi;
    let r2 = std::f64::consts::PI - s.asin() - phi;
    out.push(wrap_tau(r1));
    if (wrap_tau(r2) - wrap_tau(r1)).abs() > 1e-12 {
        out.push(wrap_tau(r2));
    }
}

/// Golden-section minimization on `[lo, hi]` to [`GOLDEN_TOL`].
pub(crate) fn golden_min(lo: f64, hi: f64, f: &dyn Fn(f64) -> f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > GOLDEN_TOL {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Two-arc words from a fixed start pose to a target point. `cusp` selects
/// whether the gear flips at the junction. Closed form: the second circle
/// center lies on the intersection of the radius-`2ρ` circle about the first
/// center with the radius-`ρ` circle about the target.
fn two_arc(
    start: Pose,
    steer1: Steer,
    gear1: Gear,
    cusp: bool,
    target: Point,
    rho: f64,
    scratch: &mut Vec<Point>,
    out: &mut Vec<WordCandidate>,
) {
    let steer2 = steer1.flip();
    let gear2 = if cusp { gear1.flip() } else { gear1 };
    let c1 = circle_center(&start, steer1, rho);
    let shape = if cusp {
        Shape::TwoArcCusp
    } else {
        Shape::TwoArcSmooth
    };
    circle_circle(c1, 2.0 * rho, target, rho, scratch);
    for idx in 0..scratch.len() {
        let c2 = scratch[idx];
        let j = Point::new(0.5 * (c1.x + c2.x), 0.5 * (c1.y + c2.y));
        let psi_p = psi_of(c1, start.position());
        let psi_j1 = psi_of(c1, j);
        let m1 = wrap_tau(arc_sign(steer1, gear1) * (psi_j1 - psi_p));
        let psi_j2 = psi_of(c2, j);
        let psi_t = psi_of(c2, target);
        let m2 = wrap_tau(arc_sign(steer2, gear2) * (psi_t - psi_j2));
        let theta_arr = heading_on(steer2, psi_t);
        let mut segs = Vec::with_capacity(2);
        push_seg(&mut segs, steer1, gear1, m1);
        push_seg(&mut segs, steer2, gear2, m2);
        if let Some(c) = verified(start, target, theta_arr, segs, rho, shape) {
            out.push(c);
        }
    }
    // Target on the first circle: the word degenerates to a single arc.
    if !cusp {
        let r_t = ((target.x - c1.x).hypot(target.y - c1.y) - rho).abs();
        if r_t <= 1e-9 * rho {
            let psi_p = psi_of(c1, start.position());
            let psi_t = psi_of(c1, target);
            let m = wrap_tau(arc_sign(steer1, gear1) * (psi_t - psi_p));
            let theta_arr = heading_on(steer1, psi_t);
            let mut segs = Vec::with_capacity(1);
            push_seg(&mut segs, steer1, gear1, m);
            if let Some(c) = verified(start, target, theta_arr, segs, rho, shape) {
                out.push(c);
            }
        }
    }
}

/// Arc-then-straight words (`rS`-type) from a fixed start pose: tangent-line
/// closed form.
fn arc_straight(
    start: Pose,
    steer: Steer,
    gear: Gear,
    target: Point,
    rho: f64,
    out: &mut Vec<WordCandidate>,
) {
    let gsign = gear_sign(gear);
    let c = circle_center(&start, steer, rho);
    let tc = (target.x - c.x, target.y - c.y);
    let dist2 = tc.0 * tc.0 + tc.1 * tc.1;
    if dist2 < rho * rho {
        return;
    }
    let d = (dist2 - rho * rho).sqrt();
    let base = tc.1.atan2(tc.0);
    let off = (gsign * d).atan2(rho);
    let psi = match steer {
        Steer::Left => base - off,
        Steer::Right => base + off,
        Steer::Straight => unreachable!(),
    };
    let psi_p = psi_of(c, start.position());
    let a = wrap_tau(arc_sign(steer, gear) * (psi - psi_p));
    let h = heading_on(steer, psi);
    let mut segs = Vec::with_capacity(2);
    push_seg(&mut segs, steer, gear, a);
    push_seg(&mut segs, Steer::Straight, gear, d);
    if let Some(cand) = verified(start, target, h, segs, rho, Shape::ArcStraight) {
        out.push(cand);
    }
}

/// Arc, cusp, quarter-arc, straight (`r|r_{π/2}S`-type) from a fixed pose.
/// The alignment residual over the first arc angle is a sinusoid.
fn arc_quarter_straight(
    start: Pose,
    steer: Steer,
    gear: Gear,
    target: Point,
    rho: f64,
    roots: &mut Vec<f64>,
    out: &mut Vec<WordCandidate>,
) {
    let steer2 = steer.flip();
    let gear2 = gear.flip();
    let g2 = gear_sign(gear2);
    let g1 = -g2;
    let after_arcs = |a: f64| -> Pose {
        let p1 = advance(start, steer, rho, g1 * a);
        advance(p1, steer2, rho, g2 * FRAC_PI_2)
    };
    let residual = |a: f64| -> f64 {
        let q = after_arcs(a);
        let (s, c) = q.theta.sin_cos();
        (target.x - q.x) * (g2 * s) - (target.y - q.y) * (g2 * c)
    };
    sinusoid_roots(&residual, roots);
    for idx in 0..roots.len() {
        let a = roots[idx];
        let q = after_arcs(a);
        let (s, c) = q.theta.sin_cos();
        let d = (target.x - q.x) * (g2 * c) + (target.y - q.y) * (g2 * s);
        if d < -1e-9 * rho {
            continue;
        }
        let mut segs = Vec::with_capacity(3);
        push_seg(&mut segs, steer, gear, a);
        push_seg(&mut segs, steer2, gear2, FRAC_PI_2);
        push_seg(&mut segs, Steer::Straight, gear2, d.max(0.0));
        if let Some(cand) = verified(start, target, q.theta, segs, rho, Shape::ArcQuarterStraight)
        {
            out.push(cand);
        }
    }
}

/// Three alternating arcs with a final cusp (`rl|l`-type) from a fixed pose:
/// a one-parameter family minimized over the first arc angle, with the
/// trailing two arcs solved in closed form.
fn three_arc(
    start: Pose,
    steer: Steer,
    gear: Gear,
    target: Point,
    rho: f64,
    out: &mut Vec<WordCandidate>,
) {
    const OUTER: usize = 48;
    let g1 = gear_sign(gear);
    let tail_best = |a: f64| -> Option<WordCandidate> {
        let p1 = advance(start, steer, rho, g1 * a);
        let mut tail = Vec::new();
        let mut scratch = Vec::new();
        two_arc(
            p1,
            steer.flip(),
            gear,
            true,
            target,
            rho,
            &mut scratch,
            &mut tail,
        );
        tail.into_iter()
            .min_by(|x, y| x.length.total_cmp(&y.length))
    };
    let total = |a: f64| -> f64 {
        tail_best(a).map_or(f64::INFINITY, |t| a * rho + t.length)
    };
    let step = TAU / OUTER as f64;
    let vals: Vec<f64> = (0..=OUTER).map(|i| total(i as f64 * step)).collect();
    for i in 0..=OUTER {
        let here = vals[i];
        if !here.is_finite() {
            continue;
        }
        let prev = if i > 0 { vals[i - 1] } else { f64::INFINITY };
        let next = if i < OUTER { vals[i + 1] } else { f64::INFINITY };
        if here <= prev && here <= next {
            let lo = (i as f64 - 1.0).max(0.0) * step;
            let hi = ((i + 1) as f64).min(OUTER as f64) * step;
            let (a, v) = golden_min(lo, hi, &total);
            if !v.is_finite() {
                continue;
            }
            if let Some(tail) = tail_best(a) {
                let mut segs = Vec::with_capacity(3);
                push_seg(&mut segs, steer, gear, a);
                segs.extend(tail.segments.iter().copied());
                if segs.len() <= 5 {
                    if let Some(cand) =
                        verified(start, target, tail.theta_arr, segs, rho, Shape::ThreeArc)
                    {
                        out.push(cand);
                    }
                }
            }
        }
    }
}

/// Pure straight drive from a pinned pose (degenerate arc-straight), valid
/// when the pinned heading already points along (or away from) the target.
fn straight_only(start: Pose, gear: Gear, target: Point, rho: f64, out: &mut Vec<WordCandidate>) {
    let g = gear_sign(gear);
    let (s, c) = start.theta.sin_cos();
    let dx = target.x - start.x;
    let dy = target.y - start.y;
    let cross = dx * (g * s) - dy * (g * c);
    let dot = dx * (g * c) + dy * (g * s);
    if cross.abs() <= 1e-9 * rho && dot >= -1e-9 * rho {
        let mut segs = Vec::new();
        push_seg(&mut segs, Steer::Straight, gear, dot.max(0.0));
        if let Some(cand) = verified(start, target, start.theta, segs, rho, Shape::Straight) {
            out.push(cand);
        }
    }
}

const STEERS: [Steer; 2] = [Steer::Left, Steer::Right];
const GEARS: [Gear; 2] = [Gear::Forward, Gear::Backward];

/// All edge-case words from the pinned departure pose to the target point.
/// `with_three_arc` gates the costly one-parameter family (its reachable set
/// is bounded, so callers skip it for distant targets).
pub(crate) fn edge_words(
    start: Pose,
    target: Point,
    rho: f64,
    with_three_arc: bool,
    out: &mut Vec<WordCandidate>,
) {
    let mut scratch = Vec::new();
    let mut roots = Vec::new();
    for steer in STEERS {
        for gear in GEARS {
            arc_straight(start, steer, gear, target, rho, out);
            two_arc(start, steer, gear, true, target, rho, &mut scratch, out);
            two_arc(start, steer, gear, false, target, rho, &mut scratch, out);
            arc_quarter_straight(start, steer, gear, target, rho, &mut roots, out);
            if with_three_arc {
                three_arc(start, steer, gear, target, rho, out);
            }
        }
    }
    for gear in GEARS {
        straight_only(start, gear, target, rho, out);
    }
}

/// Interior-interior words: both headings free. The departure heading is
/// swept over `i1`; arrivals are filtered by the caller.
pub(crate) fn interior_words(
    p1: Point,
    i1: &AngleInterval,
    p2: Point,
    rho: f64,
    out: &mut Vec<WordCandidate>,
) {
    let d = p1.distance(&p2);
    // Straight word along the chord, driven forward or backward.
    if d > 1e-12 {
        let az = (p2.y - p1.y).atan2(p2.x - p1.x);
        for (gear, heading) in [
            (Gear::Forward, az),
            (Gear::Backward, az + std::f64::consts::PI),
        ] {
            let start = Pose::new(p1.x, p1.y, heading);
            let segs = vec![Segment::new(Steer::Straight, gear, d)];
            if let Some(cand) = verified(start, p2, heading, segs, rho, Shape::Straight) {
                out.push(cand);
            }
        }
    }

    // Two-arc family: minimize total arc length over the free departure
    // heading; the trailing geometry is closed-form per heading.
    if d <= 4.0 * rho + 1e-9 {
        let samples = two_arc_sweep_samples(i1.width());
        for steer in STEERS {
            for gear in GEARS {
                for cusp in [true, false] {
                    let best_at = |th: f64| -> Option<WordCandidate> {
                        let mut v = Vec::new();
                        let mut scratch = Vec::new();
                        two_arc(
                            Pose::new(p1.x, p1.y, th),
                            steer,
                            gear,
                            cusp,
                            p2,
                            rho,
                            &mut scratch,
                            &mut v,
                        );
                        v.into_iter().min_by(|a, b| a.length.total_cmp(&b.length))
                    };
                    let f = |th: f64| best_at(th).map_or(f64::INFINITY, |c| c.length);
                    minimize_over_interval(i1, samples, &f, &mut |th| {
                        if let Some(c) = best_at(th) {
                            out.push(c);
                        }
                    });
                }
            }
        }
    }

    // Quarter-quarter-straight family: the alignment residual over the free
    // departure heading is a sinusoid.
    let mut roots = Vec::new();
    for steer in STEERS {
        for gear in GEARS {
            let steer2 = steer.flip();
            let gear2 = gear.flip();
            let g2 = gear_sign(gear2);
            let g1 = -g2;
            let after_arcs = |th: f64| -> Pose {
                let p = advance(Pose::new(p1.x, p1.y, th), steer, rho, g1 * FRAC_PI_2);
                advance(p, steer2, rho, g2 * FRAC_PI_2)
            };
            let residual = |th: f64| -> f64 {
                let q = after_arcs(th);
                let (s, c) = q.theta.sin_cos();
                (p2.x - q.x) * (g2 * s) - (p2.y - q.y) * (g2 * c)
            };
            sinusoid_roots(&residual, &mut roots);
            for idx in 0..roots.len() {
                let th = i1.representative(roots[idx]);
                if th > i1.theta_max + 1e-9 {
                    continue;
                }
                let q = after_arcs(th);
                let (s, c) = q.theta.sin_cos();
                let dist = (p2.x - q.x) * (g2 * c) + (p2.y - q.y) * (g2 * s);
                if dist < -1e-9 * rho {
                    continue;
                }
                let start = Pose::new(p1.x, p1.y, th);
                let mut segs = Vec::with_capacity(3);
                push_seg(&mut segs, steer, gear, FRAC_PI_2);
                push_seg(&mut segs, steer2, gear2, FRAC_PI_2);
                push_seg(&mut segs, Steer::Straight, gear2, dist.max(0.0));
                if let Some(cand) = verified(
                    start,
                    p2,
                    q.theta,
                    segs,
                    rho,
                    Shape::QuarterQuarterStraight,
                ) {
                    out.push(cand);
                }
            }
        }
    }
}

/// Sweep density for the two-arc interior family, adapted to interval width.
fn two_arc_sweep_samples(width: f64) -> usize {
    ((width / 0.02).ceil() as usize).clamp(8, 96)
}

/// Sweep a one-parameter family over an interval and refine each local
/// minimum by golden-section, reporting the refined parameter values.
fn minimize_over_interval(
    interval: &AngleInterval,
    n: usize,
    f: &dyn Fn(f64) -> f64,
    report: &mut dyn FnMut(f64),
) {
    let lo = interval.theta_min;
    let hi = interval.theta_max;
    if hi - lo <= 1e-12 {
        if f(lo).is_finite() {
            report(lo);
        }
        return;
    }
    let step = (hi - lo) / n as f64;
    let vals: Vec<f64> = (0..=n).map(|i| f(lo + i as f64 * step)).collect();
    for i in 0..=n {
        let here = vals[i];
        if !here.is_finite() {
            continue;
        }
        let prev = if i > 0 { vals[i - 1] } else { f64::INFINITY };
        let next = if i < n { vals[i + 1] } else { f64::INFINITY };
        if here <= prev && here <= next {
            let a = lo + (i as f64 - 1.0).max(0.0) * step;
            let b = lo + ((i + 1) as f64).min(n as f64) * step;
            let (x, v) = golden_min(a, b, f);
            if v.is_finite() {
                report(x.clamp(lo, hi));
            }
        }
    }
}
