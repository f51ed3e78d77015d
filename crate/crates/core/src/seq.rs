//! Fixed-sequence planner: sector partitioning, layered-graph lower bound,
//! repair to a feasible path, and the a-priori gap certificate.
//!
//! The relaxation drops the requirement that the arrival and departure
//! headings at a waypoint coincide, but confines both to one of `k` equal
//! sectors of the waypoint's window. Minimizing over the resulting layered
//! graph lower-bounds the true optimum; re-pinning one heading per waypoint
//! (chosen by a chain shortest path over the two candidates each) restores
//! feasibility at a certified extra cost of at most `3ρ·width/k` per interior
//! waypoint.

use crate::angle::AngleInterval;
use crate::error::{Error, Result};
use crate::geom::{Pose, RsPath};
use crate::instance::Instance;
use crate::interval::{solve_interval, IntervalQuery, IntervalSolution};
use crate::point::{p2p_length, solve_p2p};
use rayon::prelude::*;

/// Split an interval into `k` equal sectors tiling it exactly.
pub fn partition_interval(i: &AngleInterval, k: usize) -> Result<Vec<AngleInterval>> {
    if k == 0 {
        return Err(Error::invalid("sector count k must be at least 1"));
    }
    let lo = i.theta_min;
    let w = i.width();
    Ok((0..k)
        .map(|j| {
            AngleInterval::new(
                lo + w * j as f64 / k as f64,
                lo + w * (j + 1) as f64 / k as f64,
            )
        })
        .collect())
}

/// Layered relaxation graph: `n` layers of `k` sector nodes, with interval
/// shortest-path costs between consecutive layers.
#[derive(Debug, Clone)]
pub struct LayeredGraph {
    /// Visiting order (waypoint ids).
    pub sequence: Vec<u32>,
    pub k: usize,
    /// Per layer, the `k` sector windows of that waypoint.
    pub sectors: Vec<Vec<AngleInterval>>,
    /// `edges[leg][m][l]`: interval solution from sector `m` of layer `leg`
    /// to sector `l` of layer `leg + 1`.
    pub edges: Vec<Vec<Vec<IntervalSolution>>>,
}

fn resolve_sequence<'a>(inst: &'a Instance, sequence: &[u32]) -> Result<Vec<&'a crate::instance::Waypoint>> {
    if sequence.len() != inst.n() {
        return Err(Error::invalid(format!(
            "sequence length {} does not match instance size {}",
            sequence.len(),
            inst.n()
        )));
    }
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::with_capacity(sequence.len());
    for id in sequence {
        if !seen.insert(*id) {
            return Err(Error::invalid(format!("sequence repeats waypoint id {id}")));
        }
        out.push(
            inst.by_id(*id)
                .ok_or_else(|| Error::invalid(format!("unknown waypoint id {id}")))?,
        );
    }
    Ok(out)
}

/// Build the relaxation graph for a visiting sequence: `(n−1)·k²` interval
/// solves, evaluated concurrently and assembled in deterministic order.
pub fn build_layered_graph(inst: &Instance, sequence: &[u32], k: usize) -> Result<LayeredGraph> {
    if k == 0 {
        return Err(Error::invalid("sector count k must be at least 1"));
    }
    let wps = resolve_sequence(inst, sequence)?;
    let sectors: Vec<Vec<AngleInterval>> = wps
        .iter()
        .map(|w| partition_interval(&w.interval, k))
        .collect::<Result<_>>()?;

    let legs: Vec<(usize, usize, usize)> = (0..wps.len() - 1)
        .flat_map(|leg| (0..k).flat_map(move |m| (0..k).map(move |l| (leg, m, l))))
        .collect();
    let solved: Vec<IntervalSolution> = legs
        .par_iter()
        .map(|&(leg, m, l)| {
            let q = IntervalQuery::new(
                wps[leg].position(),
                sectors[leg][m],
                wps[leg + 1].position(),
                sectors[leg + 1][l],
                inst.rho,
            );
            solve_interval(&q)
        })
        .collect();
    let mut edges = vec![vec![Vec::with_capacity(k); k]; wps.len() - 1];
    for ((leg, m, _l), sol) in legs.into_iter().zip(solved) {
        edges[leg][m].push(sol);
    }
    Ok(LayeredGraph {
        sequence: sequence.to_vec(),
        k,
        sectors,
        edges,
    })
}

/// Output of the relaxation: the certified lower bound, the chosen sector per
/// waypoint, and the per-leg interval solutions realizing it.
#[derive(Debug, Clone)]
pub struct LowerBound {
    pub cost_lb: f64,
    pub sectors: Vec<usize>,
    pub legs: Vec<IntervalSolution>,
}

/// Shortest layer-respecting path through the relaxation graph. Ties break
/// toward lexicographically smallest sector indices.
pub fn lower_bound_seq(g: &LayeredGraph) -> LowerBound {
    let n = g.sectors.len();
    let k = g.k;
    // dist_to_end[i][m]: cheapest completion from node (i, m) to the last layer.
    let mut dist_to_end = vec![vec![0.0f64; k]; n];
    for i in (0..n - 1).rev() {
        for m in 0..k {
            dist_to_end[i][m] = (0..k)
                .map(|l| g.edges[i][m][l].length + dist_to_end[i + 1][l])
                .fold(f64::INFINITY, f64::min);
        }
    }
    let cost_lb = dist_to_end[0].iter().copied().fold(f64::INFINITY, f64::min);
    // Walk forward choosing the smallest sector index consistent with an
    // optimal completion (tolerating re-association rounding).
    let tol = 1e-9 * (1.0 + cost_lb.abs());
    let mut sectors = Vec::with_capacity(n);
    let mut legs = Vec::with_capacity(n - 1);
    let first = (0..k)
        .find(|&m| dist_to_end[0][m] <= cost_lb + tol)
        .expect("some start sector realizes the minimum");
    sectors.push(first);
    for i in 0..n - 1 {
        let m = *sectors.last().unwrap();
        let target = dist_to_end[i][m];
        let l = (0..k)
            .find(|&l| {
                g.edges[i][m][l].length + dist_to_end[i + 1][l] <= target + tol
            })
            .expect("some sector continues the optimal path");
        legs.push(g.edges[i][m][l].clone());
        sectors.push(l);
    }
    let cost_lb = legs.iter().map(|s| s.length).sum();
    LowerBound {
        cost_lb,
        sectors,
        legs,
    }
}

/// A feasible plan with its certificate data.
#[derive(Debug, Clone)]
pub struct PlanResult {
    /// Visiting order (waypoint ids).
    pub sequence: Vec<u32>,
    /// Certified lower bound on the optimum (`Cost_lb`).
    pub lower_bound: f64,
    /// Length of the repaired feasible path (`Cost_f`).
    pub feasible_length: f64,
    /// One heading per waypoint, in sequence order.
    pub chosen_headings: Vec<f64>,
    /// Feasible path legs at the chosen headings.
    pub legs: Vec<RsPath>,
    /// Relaxed legs (arrival and departure headings may differ), kept for
    /// rendering and audits.
    pub lb_legs: Vec<IntervalSolution>,
    /// Chosen sector index per waypoint.
    pub sectors: Vec<usize>,
    /// `100 · (Cost_f − Cost_lb) / Cost_lb`.
    pub deviation_pct: f64,
    /// `100 · gap / Cost_lb` with the a-priori gap of [`theoretical_gap_seq`].
    pub theoretical_deviation_pct: f64,
}

/// Convert a relaxed solution into a feasible one: at each interior waypoint
/// choose the cheaper of its relaxed arrival and departure headings by a
/// chain shortest path; endpoints keep their single relaxed heading.
pub fn repair_to_feasible(
    inst: &Instance,
    sequence: &[u32],
    lb: &LowerBound,
    k: usize,
) -> Result<PlanResult> {
    let wps = resolve_sequence(inst, sequence)?;
    let n = wps.len();
    assert_eq!(lb.legs.len(), n - 1, "lower bound does not match sequence");

    // Candidate headings per waypoint: s₁ keeps its departure, s_n its
    // arrival, interior waypoints choose between arrival and departure.
    let choices: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            if i == 0 {
                vec![lb.legs[0].theta_dep]
            } else if i == n - 1 {
                vec![lb.legs[n - 2].theta_arr]
            } else {
                vec![lb.legs[i - 1].theta_arr, lb.legs[i].theta_dep]
            }
        })
        .collect();

    // Chain DP over the choice graph.
    let mut cost = vec![vec![f64::INFINITY; 2]; n];
    let mut parent = vec![vec![0usize; 2]; n];
    for c in 0..choices[0].len() {
        cost[0][c] = 0.0;
    }
    for i in 1..n {
        for (ci, &hi) in choices[i].iter().enumerate() {
            for (cp, &hp) in choices[i - 1].iter().enumerate() {
                if !cost[i - 1][cp].is_finite() {
                    continue;
                }
                let leg = p2p_length(
                    Pose::new(wps[i - 1].x, wps[i - 1].y, hp),
                    Pose::new(wps[i].x, wps[i].y, hi),
                    inst.rho,
                )?;
                let total = cost[i - 1][cp] + leg;
                if total < cost[i][ci] {
                    cost[i][ci] = total;
                    parent[i][ci] = cp;
                }
            }
        }
    }
    let mut best_last = 0usize;
    for c in 1..choices[n - 1].len() {
        if cost[n - 1][c] < cost[n - 1][best_last] {
            best_last = c;
        }
    }
    let mut pick = vec![0usize; n];
    pick[n - 1] = best_last;
    for i in (1..n).rev() {
        pick[i - 1] = parent[i][pick[i]];
    }
    let chosen_headings: Vec<f64> = (0..n).map(|i| choices[i][pick[i]]).collect();

    let legs: Vec<RsPath> = (0..n - 1)
        .map(|i| {
            solve_p2p(
                Pose::new(wps[i].x, wps[i].y, chosen_headings[i]),
                Pose::new(wps[i + 1].x, wps[i + 1].y, chosen_headings[i + 1]),
                inst.rho,
            )
        })
        .collect::<Result<_>>()?;
    let feasible_length: f64 = legs.iter().map(|p| p.length).sum();
    let lower_bound = lb.cost_lb;
    let gap = theoretical_gap_seq(inst, sequence, k)?;
    Ok(PlanResult {
        sequence: sequence.to_vec(),
        lower_bound,
        feasible_length,
        chosen_headings,
        legs,
        lb_legs: lb.legs.clone(),
        sectors: lb.sectors.clone(),
        deviation_pct: 100.0 * (feasible_length - lower_bound) / lower_bound,
        theoretical_deviation_pct: 100.0 * gap / lower_bound,
    })
}

/// A-priori gap of the repair step: `3ρ Σ width(s_i)/k` over the interior
/// waypoints `s₂ … s_{n−1}` of the sequence.
pub fn theoretical_gap_seq(inst: &Instance, sequence: &[u32], k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::invalid("sector count k must be at least 1"));
    }
    let wps = resolve_sequence(inst, sequence)?;
    let n = wps.len();
    Ok(3.0 * inst.rho / k as f64
        * wps[1..n - 1]
            .iter()
            .map(|w| w.interval.width())
            .sum::<f64>())
}

/// Full pipeline: build the relaxation graph, extract the lower bound, and
/// repair to a feasible plan.
pub fn plan_sequence(inst: &Instance, sequence: &[u32], k: usize) -> Result<PlanResult> {
    let g = build_layered_graph(inst, sequence, k)?;
    let lb = lower_bound_seq(&g);
    repair_to_feasible(inst, sequence, &lb, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate_instance, GenerationConfig, Waypoint};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn small_instance(seed: u64, n: usize) -> Instance {
        generate_instance(&GenerationConfig {
            n,
            seed,
            ..Default::default()
        })
    }

    #[test]
    fn partition_identity() {
        let i = AngleInterval::new(0.0, FRAC_PI_2);
        let p = partition_interval(&i, 1).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0], i);
    }

    #[test]
    fn partition_quarters() {
        let i = AngleInterval::new(0.0, FRAC_PI_2);
        let p = partition_interval(&i, 4).unwrap();
        let expect = [
            (0.0, PI / 8.0),
            (PI / 8.0, PI / 4.0),
            (PI / 4.0, 3.0 * PI / 8.0),
            (3.0 * PI / 8.0, FRAC_PI_2),
        ];
        for (s, (lo, hi)) in p.iter().zip(expect) {
            assert_abs_diff_eq!(s.theta_min, lo, epsilon = 1e-12);
            assert_abs_diff_eq!(s.theta_max, hi, epsilon = 1e-12);
        }
        // Sectors tile the interval exactly.
        for w in p.windows(2) {
            assert_eq!(w[0].theta_max, w[1].theta_min);
        }
    }

    #[test]
    fn partition_degenerate() {
        let p = partition_interval(&AngleInterval::fixed(PI), 4).unwrap();
        assert_eq!(p.len(), 4);
        assert!(p.iter().all(|s| s.is_degenerate() && s.theta_min == PI));
    }

    #[test]
    fn partition_rejects_zero() {
        assert!(partition_interval(&AngleInterval::new(0.0, 1.0), 0).is_err());
    }

    #[test]
    fn graph_shape() {
        let inst = small_instance(3, 3);
        let seq: Vec<u32> = vec![0, 1, 2];
        let g = build_layered_graph(&inst, &seq, 4).unwrap();
        assert_eq!(g.sectors.len(), 3);
        assert_eq!(g.edges.len(), 2);
        let edge_count: usize = g
            .edges
            .iter()
            .map(|layer| layer.iter().map(Vec::len).sum::<usize>())
            .sum();
        assert_eq!(edge_count, 32);
        // Metric lower bound on every edge cost.
        for (leg, layer) in g.edges.iter().enumerate() {
            let d = inst.waypoints[leg]
                .position()
                .distance(&inst.waypoints[leg + 1].position());
            for row in layer {
                for sol in row {
                    assert!(sol.length >= d - 1e-9);
                }
            }
        }
    }

    #[test]
    fn graph_rejects_bad_sequences() {
        let inst = small_instance(3, 3);
        assert!(build_layered_graph(&inst, &[0, 1], 2).is_err());
        assert!(build_layered_graph(&inst, &[0, 1, 1], 2).is_err());
        assert!(build_layered_graph(&inst, &[0, 1, 9], 2).is_err());
    }

    #[test]
    fn n2_lower_bound_is_single_edge_min() {
        let inst = small_instance(5, 2);
        let seq = vec![0, 1];
        let g = build_layered_graph(&inst, &seq, 3).unwrap();
        let lb = lower_bound_seq(&g);
        let min_edge = g.edges[0]
            .iter()
            .flatten()
            .map(|s| s.length)
            .fold(f64::INFINITY, f64::min);
        assert_abs_diff_eq!(lb.cost_lb, min_edge, epsilon = 1e-12);
    }

    #[test]
    fn k1_lower_bound_is_full_interval_sum() {
        let inst = small_instance(8, 4);
        let seq: Vec<u32> = (0..4).collect();
        let g = build_layered_graph(&inst, &seq, 1).unwrap();
        let lb = lower_bound_seq(&g);
        let direct: f64 = (0..3)
            .map(|i| {
                solve_interval(&IntervalQuery::new(
                    inst.waypoints[i].position(),
                    inst.waypoints[i].interval,
                    inst.waypoints[i + 1].position(),
                    inst.waypoints[i + 1].interval,
                    inst.rho,
                ))
                .length
            })
            .sum();
        assert_abs_diff_eq!(lb.cost_lb, direct, epsilon = 1e-9);
    }

    #[test]
    fn sandwich_and_feasibility_small() {
        let inst = small_instance(11, 5);
        let seq = crate::instance::euclidean_tsp_sequence(&inst);
        for k in [1usize, 2, 4] {
            let plan = plan_sequence(&inst, &seq, k).unwrap();
            let gap = theoretical_gap_seq(&inst, &seq, k).unwrap();
            assert!(plan.lower_bound <= plan.feasible_length + 1e-9);
            assert!(
                plan.feasible_length <= plan.lower_bound + gap + 1e-9,
                "k={k}: feasible {} lb {} gap {}",
                plan.feasible_length,
                plan.lower_bound,
                gap
            );
            // Headings feasible and legs chain exactly.
            for (i, id) in plan.sequence.iter().enumerate() {
                let w = inst.by_id(*id).unwrap();
                assert!(w.interval.contains_with_tol(plan.chosen_headings[i], 1e-9));
            }
            for (i, leg) in plan.legs.iter().enumerate() {
                let a = inst.by_id(plan.sequence[i]).unwrap();
                let b = inst.by_id(plan.sequence[i + 1]).unwrap();
                let end = leg.endpoint(Pose::new(a.x, a.y, plan.chosen_headings[i]));
                assert!(end.position().distance(&b.position()) <= 1e-6 * inst.rho);
                assert!(
                    crate::angle::angular_distance(end.theta, plan.chosen_headings[i + 1])
                        <= 1e-6
                );
            }
        }
    }

    #[test]
    fn n2_feasible_equals_lower_bound() {
        let inst = small_instance(2, 2);
        let plan = plan_sequence(&inst, &[0, 1], 4).unwrap();
        assert_abs_diff_eq!(plan.feasible_length, plan.lower_bound, epsilon = 1e-9);
        assert_eq!(theoretical_gap_seq(&inst, &[0, 1], 4).unwrap(), 0.0);
    }

    #[test]
    fn monotone_refinement() {
        let inst = small_instance(4, 4);
        let seq: Vec<u32> = (0..4).collect();
        let mut prev = f64::NEG_INFINITY;
        for k in [1usize, 2, 4, 8] {
            let g = build_layered_graph(&inst, &seq, k).unwrap();
            let lb = lower_bound_seq(&g);
            assert!(
                lb.cost_lb >= prev - 1e-9,
                "k={k}: lb {} dropped below {}",
                lb.cost_lb,
                prev
            );
            prev = lb.cost_lb;
        }
    }

    #[test]
    fn gap_formula_and_halving() {
        let inst = generate_instance(&GenerationConfig::default());
        let seq: Vec<u32> = (0..20).collect();
        let g16 = theoretical_gap_seq(&inst, &seq, 16).unwrap();
        assert_abs_diff_eq!(g16, 3.0 * 100.0 * 18.0 * FRAC_PI_2 / 16.0, epsilon = 1e-9);
        for k in [1usize, 2, 4, 8] {
            let a = theoretical_gap_seq(&inst, &seq, k).unwrap();
            let b = theoretical_gap_seq(&inst, &seq, 2 * k).unwrap();
            assert_abs_diff_eq!(a, 2.0 * b, epsilon = 1e-9);
        }
    }

    /// Desk-scale check of lower-bound validity: dense heading-grid brute
    /// force over a 4-waypoint chain brackets the relaxation.
    #[test]
    fn lower_bound_below_brute_force() {
        let inst = Instance::new(
            vec![
                Waypoint {
                    id: 0,
                    x: 0.0,
                    y: 0.0,
                    interval: AngleInterval::new(0.3, 0.3 + FRAC_PI_2),
                },
                Waypoint {
                    id: 1,
                    x: 260.0,
                    y: 80.0,
                    interval: AngleInterval::new(4.0, 4.0 + FRAC_PI_2),
                },
                Waypoint {
                    id: 2,
                    x: 420.0,
                    y: 330.0,
                    interval: AngleInterval::new(2.1, 2.1 + FRAC_PI_2),
                },
            ],
            100.0,
        );
        let seq = vec![0, 1, 2];
        // Brute force over a dense heading grid with per-leg exact solves.
        let m = 121;
        let grids: Vec<Vec<f64>> = inst
            .waypoints
            .iter()
            .map(|w| {
                (0..m)
                    .map(|i| {
                        w.interval.theta_min + w.interval.width() * i as f64 / (m - 1) as f64
                    })
                    .collect()
            })
            .collect();
        let mut best = vec![0.0f64; m];
        for leg in 0..2 {
            let mut next = vec![f64::INFINITY; m];
            let a = &inst.waypoints[leg];
            let b = &inst.waypoints[leg + 1];
            for (i, &ha) in grids[leg].iter().enumerate() {
                for (j, &hb) in grids[leg + 1].iter().enumerate() {
                    let c = best[i]
                        + p2p_length(
                            Pose::new(a.x, a.y, ha),
                            Pose::new(b.x, b.y, hb),
                            inst.rho,
                        )
                        .unwrap();
                    if c < next[j] {
                        next[j] = c;
                    }
                }
            }
            best = next;
        }
        let brute = best.iter().copied().fold(f64::INFINITY, f64::min);
        let grid_err = 2.0 * 3.0 * inst.rho * (FRAC_PI_2 / (m - 1) as f64);
        for k in [1usize, 2, 4] {
            let g = build_layered_graph(&inst, &seq, k).unwrap();
            let lb = lower_bound_seq(&g);
            assert!(
                lb.cost_lb <= brute + 1e-6,
                "k={k}: lb {} exceeds brute force {}",
                lb.cost_lb,
                brute
            );
            let plan = repair_to_feasible(&inst, &seq, &lb, k).unwrap();
            assert!(plan.feasible_length >= brute - grid_err - 1e-6);
        }
    }
}
