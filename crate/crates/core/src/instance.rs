//! Benchmark instance generation, Euclidean tour sequencing, and instance
//! serialization.
//!
//! Instances follow the standard protocol: `n` waypoints sampled uniformly
//! from a square area, a turning radius of one tenth of the side length, and
//! a fixed-width field of view at every waypoint whose lower edge is drawn
//! uniformly from `[0, 3π/2]`. Generation is driven by ChaCha8 keyed with the
//! config seed, so instances reproduce exactly across platforms.

use crate::angle::AngleInterval;
use crate::error::{Error, Result};
use crate::geom::Point;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;

/// Instance file schema version.
pub const SCHEMA_VERSION: u32 = 1;

/// A positioned waypoint with its admissible heading window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    pub id: u32,
    pub x: f64,
    pub y: f64,
    pub interval: AngleInterval,
}

impl Waypoint {
    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

/// A planning instance: waypoints plus the vehicle turning radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub waypoints: Vec<Waypoint>,
    pub rho: f64,
}

impl Instance {
    pub fn new(waypoints: Vec<Waypoint>, rho: f64) -> Self {
        assert!(waypoints.len() >= 2, "an instance needs at least 2 waypoints");
        assert!(rho > 0.0, "rho must be positive");
        let mut ids: Vec<u32> = waypoints.iter().map(|w| w.id).collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), waypoints.len(), "waypoint ids must be unique");
        Self { waypoints, rho }
    }

    pub fn n(&self) -> usize {
        self.waypoints.len()
    }

    /// Waypoint lookup by id.
    pub fn by_id(&self, id: u32) -> Option<&Waypoint> {
        self.waypoints.iter().find(|w| w.id == id)
    }
}

/// Parameters of the random-instance protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationConfig {
    pub n: usize,
    pub area_side: f64,
    pub rho: f64,
    pub fov_width: f64,
    pub theta_min_range: f64,
    pub seed: u64,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        Self {
            n: 20,
            area_side: 1000.0,
            rho: 100.0,
            fov_width: FRAC_PI_2,
            theta_min_range: 1.5 * PI,
            seed: 1,
        }
    }
}

/// Draw an instance: positions uniform over the square, `θ_min` uniform over
/// `[0, theta_min_range]`, `θ_max = θ_min + fov_width`. Per waypoint the
/// draw order is `x`, `y`, `θ_min`. Deterministic for a given seed.
pub fn generate_instance(cfg: &GenerationConfig) -> Instance {
    assert!(cfg.n >= 2 && cfg.area_side > 0.0 && cfg.rho > 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let waypoints = (0..cfg.n)
        .map(|i| {
            let x = rng.gen_range(0.0..cfg.area_side);
            let y = rng.gen_range(0.0..cfg.area_side);
            let theta_min = rng.gen_range(0.0..cfg.theta_min_range);
            Waypoint {
                id: i as u32,
                x,
                y,
                interval: AngleInterval::new(theta_min, theta_min + cfg.fov_width),
            }
        })
        .collect();
    Instance::new(waypoints, cfg.rho)
}

#[cfg(test)]
fn tour_len(order: &[usize], pts: &[Point]) -> f64 {
    let n = order.len();
    (0..n)
        .map(|i| pts[order[i]].distance(&pts[order[(i + 1) % n]]))
        .sum()
}

/// Euclidean tour over the waypoint positions (nearest-neighbor construction
/// plus 2-opt to local optimality), opened into a visiting sequence of ids.
///
/// Canonical form: starts at the lowest id and proceeds toward the lower-id
/// neighbor of the two tour neighbors.
pub fn euclidean_tsp_sequence(inst: &Instance) -> Vec<u32> {
    let n = inst.n();
    let pts: Vec<Point> = inst.waypoints.iter().map(|w| w.position()).collect();
    if n == 2 {
        let mut ids: Vec<u32> = inst.waypoints.iter().map(|w| w.id).collect();
        ids.sort_unstable();
        return ids;
    }

    // Nearest-neighbor construction from the lexicographically smallest
    // position (an extreme point, so degenerate collinear layouts sweep).
    let start_idx = (0..n)
        .min_by(|&a, &b| {
            (pts[a].x, pts[a].y)
                .partial_cmp(&(pts[b].x, pts[b].y))
                .unwrap()
                .then(a.cmp(&b))
        })
        .unwrap();
    let mut order = Vec::with_capacity(n);
    let mut used = vec![false; n];
    order.push(start_idx);
    used[start_idx] = true;
    for _ in 1..n {
        let cur = *order.last().unwrap();
        let next = (0..n)
            .filter(|&j| !used[j])
            .min_by(|&a, &b| {
                pts[cur]
                    .distance(&pts[a])
                    .total_cmp(&pts[cur].distance(&pts[b]))
                    .then(a.cmp(&b))
            })
            .unwrap();
        order.push(next);
        used[next] = true;
    }

    // 2-opt: repeat best-improvement exchanges until locally optimal.
    loop {
        let mut best_delta = -1e-12;
        let mut best: Option<(usize, usize)> = None;
        for i in 0..n - 1 {
            for j in i + 1..n {
                let (a, b) = (order[i], order[(i + n - 1) % n]);
                let (c, d) = (order[j], order[(j + 1) % n]);
                if (i + n - 1) % n == j || (j + 1) % n == i {
                    continue;
                }
                let delta = pts[b].distance(&pts[c]) + pts[a].distance(&pts[d])
                    - pts[b].distance(&pts[a])
                    - pts[c].distance(&pts[d]);
                if delta < best_delta {
                    best_delta = delta;
                    best = Some((i, j));
                }
            }
        }
        match best {
            Some((i, j)) => order[i..=j].reverse(),
            None => break,
        }
    }

    // Canonicalize: rotate to the lowest id, direction toward the lower-id
    // neighbor, then open the cycle there.
    let ids: Vec<u32> = inst.waypoints.iter().map(|w| w.id).collect();
    let start = (0..n).min_by_key(|&i| ids[order[i]]).unwrap();
    let prev = ids[order[(start + n - 1) % n]];
    let next = ids[order[(start + 1) % n]];
    if next <= prev {
        (0..n).map(|t| ids[order[(start + t) % n]]).collect()
    } else {
        (0..n).map(|t| ids[order[(start + n - t) % n]]).collect()
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct WaypointDoc {
    id: u32,
    x: f64,
    y: f64,
    theta_min: f64,
    theta_max: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct InstanceDoc {
    schema_version: u32,
    rho: f64,
    waypoints: Vec<WaypointDoc>,
}

/// Serialize an instance to its document form.
pub fn instance_to_string(inst: &Instance) -> String {
    let doc = InstanceDoc {
        schema_version: SCHEMA_VERSION,
        rho: inst.rho,
        waypoints: inst
            .waypoints
            .iter()
            .map(|w| WaypointDoc {
                id: w.id,
                x: w.x,
                y: w.y,
                theta_min: w.interval.theta_min,
                theta_max: w.interval.theta_max,
            })
            .collect(),
    };
    toml::to_string(&doc).expect("instance serialization cannot fail")
}

/// Parse an instance from its document form.
pub fn instance_from_str(s: &str) -> Result<Instance> {
    let doc: InstanceDoc = toml::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(Error::Version {
            found: doc.schema_version,
            expected: SCHEMA_VERSION,
        });
    }
    if !(doc.rho > 0.0) {
        return Err(Error::Parse(format!("rho must be positive, got {}", doc.rho)));
    }
    if doc.waypoints.len() < 2 {
        return Err(Error::Parse(format!(
            "instance needs at least 2 waypoints, got {}",
            doc.waypoints.len()
        )));
    }
    let mut ids = std::collections::HashSet::new();
    let mut waypoints = Vec::with_capacity(doc.waypoints.len());
    for w in doc.waypoints {
        if !ids.insert(w.id) {
            return Err(Error::Parse(format!("duplicate waypoint id {}", w.id)));
        }
        if !(w.theta_min.is_finite() && w.theta_max.is_finite()) || w.theta_min > w.theta_max {
            return Err(Error::Parse(format!(
                "waypoint {}: invalid interval [{}, {}]",
                w.id, w.theta_min, w.theta_max
            )));
        }
        waypoints.push(Waypoint {
            id: w.id,
            x: w.x,
            y: w.y,
            interval: AngleInterval::new(w.theta_min, w.theta_max),
        });
    }
    Ok(Instance::new(waypoints, doc.rho))
}

/// Write an instance document to `destination`.
pub fn save_instance(inst: &Instance, destination: &Path) -> Result<()> {
    std::fs::write(destination, instance_to_string(inst))?;
    Ok(())
}

/// Read an instance document from `source`.
pub fn load_instance(source: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(source)?;
    instance_from_str(&text)
}
