//! Self-contained result documents: everything a renderer or auditor needs
//! to reconstruct a plan without re-solving.

use rsfov_core::error::{Error, Result};
use rsfov_core::geom::{Gear, RsPath, Segment, Steer};
use rsfov_core::instance::Instance;
use rsfov_core::interval::IntervalSolution;
use rsfov_core::seq::PlanResult;
use rsfov_core::tour::TourResult;
use serde::{Deserialize, Serialize};

pub const RESULT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SegmentDoc {
    /// `"L"`, `"R"`, or `"S"`.
    pub steer: String,
    /// `"F"` or `"B"`.
    pub gear: String,
    /// Radians for arcs, length units for straights.
    pub magnitude: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LegDoc {
    pub from: u32,
    pub to: u32,
    pub theta_dep: f64,
    pub theta_arr: f64,
    pub length: f64,
    pub segments: Vec<SegmentDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WaypointDoc {
    pub id: u32,
    pub x: f64,
    pub y: f64,
    pub theta_min: f64,
    pub theta_max: f64,
}

/// A solved plan in portable form.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultDoc {
    pub schema_version: u32,
    /// `"seq"` or `"tour"`.
    pub variant: String,
    pub k: usize,
    /// `"exact"` or `"heuristic"` (tour); `"exact"` for the sequenced variant.
    pub mode: String,
    pub rho: f64,
    /// Relaxation value; a certified lower bound iff `certified`.
    pub lower_bound: f64,
    pub certified: bool,
    pub feasible_length: f64,
    pub deviation_pct: f64,
    pub theoretical_deviation_pct: f64,
    /// Visiting order; a closed cycle when `closed`.
    pub sequence: Vec<u32>,
    pub closed: bool,
    pub chosen_headings: Vec<f64>,
    pub waypoints: Vec<WaypointDoc>,
    /// Feasible legs at the chosen headings.
    pub legs: Vec<LegDoc>,
    /// Relaxed legs (headings may disagree at waypoints).
    pub lb_legs: Vec<LegDoc>,
}

fn seg_doc(s: &Segment) -> SegmentDoc {
    SegmentDoc {
        steer: match s.steer {
            Steer::Left => "L",
            Steer::Right => "R",
            Steer::Straight => "S",
        }
        .into(),
        gear: match s.gear {
            Gear::Forward => "F",
            Gear::Backward => "B",
        }
        .into(),
        magnitude: s.magnitude,
    }
}

pub fn seg_from_doc(d: &SegmentDoc) -> Result<Segment> {
    let steer = match d.steer.as_str() {
        "L" => Steer::Left,
        "R" => Steer::Right,
        "S" => Steer::Straight,
        other => return Err(Error::Parse(format!("unknown steer {other:?}"))),
    };
    let gear = match d.gear.as_str() {
        "F" => Gear::Forward,
        "B" => Gear::Backward,
        other => return Err(Error::Parse(format!("unknown gear {other:?}"))),
    };
    if !(d.magnitude >= 0.0) {
        return Err(Error::Parse(format!(
            "segment magnitude must be >= 0, got {}",
            d.magnitude
        )));
    }
    Ok(Segment::new(steer, gear, d.magnitude))
}

fn leg_doc(from: u32, to: u32, dep: f64, arr: f64, path: &RsPath) -> LegDoc {
    LegDoc {
        from,
        to,
        theta_dep: dep,
        theta_arr: arr,
        length: path.length,
        segments: path.segments.iter().map(seg_doc).collect(),
    }
}

fn waypoint_docs(inst: &Instance) -> Vec<WaypointDoc> {
    inst.waypoints
        .iter()
        .map(|w| WaypointDoc {
            id: w.id,
            x: w.x,
            y: w.y,
            theta_min: w.interval.theta_min,
            theta_max: w.interval.theta_max,
        })
        .collect()
}

fn lb_leg_docs(sequence: &[u32], lb_legs: &[IntervalSolution], closed: bool) -> Vec<LegDoc> {
    let n = sequence.len();
    lb_legs
        .iter()
        .enumerate()
        .map(|(i, sol)| {
            let from = sequence[i];
            let to = sequence[if closed { (i + 1) % n } else { i + 1 }];
            leg_doc(from, to, sol.theta_dep, sol.theta_arr, &sol.path)
        })
        .collect()
}

pub fn from_plan(inst: &Instance, plan: &PlanResult, k: usize) -> ResultDoc {
    let n = plan.sequence.len();
    ResultDoc {
        schema_version: RESULT_SCHEMA_VERSION,
        variant: "seq".into(),
        k,
        mode: "exact".into(),
        rho: inst.rho,
        lower_bound: plan.lower_bound,
        certified: true,
        feasible_length: plan.feasible_length,
        deviation_pct: plan.deviation_pct,
        theoretical_deviation_pct: plan.theoretical_deviation_pct,
        sequence: plan.sequence.clone(),
        closed: false,
        chosen_headings: plan.chosen_headings.clone(),
        waypoints: waypoint_docs(inst),
        legs: (0..n - 1)
            .map(|i| {
                leg_doc(
                    plan.sequence[i],
                    plan.sequence[i + 1],
                    plan.chosen_headings[i],
                    plan.chosen_headings[i + 1],
                    &plan.legs[i],
                )
            })
            .collect(),
        lb_legs: lb_leg_docs(&plan.sequence, &plan.lb_legs, false),
    }
}

pub fn from_tour(inst: &Instance, tour: &TourResult, k: usize, mode: &str) -> ResultDoc {
    let n = tour.sequence.len();
    ResultDoc {
        schema_version: RESULT_SCHEMA_VERSION,
        variant: "tour".into(),
        k,
        mode: mode.into(),
        rho: inst.rho,
        lower_bound: tour.lower_bound,
        certified: tour.certified,
        feasible_length: tour.feasible_length,
        deviation_pct: tour.deviation_pct,
        theoretical_deviation_pct: tour.theoretical_deviation_pct,
        sequence: tour.sequence.clone(),
        closed: true,
        chosen_headings: tour.chosen_headings.clone(),
        waypoints: waypoint_docs(inst),
        legs: (0..n)
            .map(|t| {
                let u = (t + 1) % n;
                leg_doc(
                    tour.sequence[t],
                    tour.sequence[u],
                    tour.chosen_headings[t],
                    tour.chosen_headings[u],
                    &tour.legs[t],
                )
            })
            .collect(),
        lb_legs: lb_leg_docs(&tour.sequence, &tour.lb_legs, true),
    }
}

pub fn to_string(doc: &ResultDoc) -> String {
    toml::to_string(doc).expect("result serialization cannot fail")
}

pub fn from_str(s: &str) -> Result<ResultDoc> {
    let doc: ResultDoc = toml::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    if doc.schema_version != RESULT_SCHEMA_VERSION {
        return Err(Error::Version {
            found: doc.schema_version,
            expected: RESULT_SCHEMA_VERSION,
        });
    }
    Ok(doc)
}
