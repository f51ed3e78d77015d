//! Sequence-free tour planner: one-in-a-set TSP relaxation over
//! (waypoint, sector) nodes, exact at small sizes, heuristic at benchmark
//! scale, with the cyclic repair and its a-priori gap certificate.

use crate::error::{Error, Result};
use crate::geom::{Pose, RsPath};
use crate::instance::Instance;
use crate::interval::{solve_interval, IntervalQuery, IntervalSolution};
use crate::point::{p2p_length, solve_p2p};
use crate::seq::partition_interval;
use crate::angle::AngleInterval;
use rayon::prelude::*;

/// One directed relaxed leg between two (waypoint, sector) nodes.
#[derive(Debug, Clone, Copy)]
pub struct GtspLeg {
    pub length: f64,
    pub theta_dep: f64,
    pub theta_arr: f64,
}

/// One-in-a-set TSP instance over `n` sets of `k` sector nodes.
#[derive(Debug, Clone)]
pub struct GtspInstance {
    pub n: usize,
    pub k: usize,
    pub rho: f64,
    /// Waypoint ids in instance order; node `(i, m)` refers to `ids[i]`.
    pub ids: Vec<u32>,
    pub positions: Vec<crate::geom::Point>,
    pub sectors: Vec<Vec<AngleInterval>>,
    legs: Vec<GtspLeg>,
}

impl GtspInstance {
    #[inline]
    fn idx(&self, i: usize, m: usize, j: usize, l: usize) -> usize {
        ((i * self.k + m) * self.n + j) * self.k + l
    }

    /// Directed relaxed-leg cost from node `(i, m)` to node `(j, l)`.
    pub fn cost(&self, i: usize, m: usize, j: usize, l: usize) -> f64 {
        self.legs[self.idx(i, m, j, l)].length
    }

    pub fn leg(&self, i: usize, m: usize, j: usize, l: usize) -> GtspLeg {
        self.legs[self.idx(i, m, j, l)]
    }
}

/// Build the relaxation cost structure: `n(n−1)k²` directed legs from the
/// interval solver. Each unordered pair is solved once; the opposite
/// direction is its exact reversal, so the cost matrix is symmetric under
/// `(i,m) ↔ (j,l)` by construction.
pub fn build_gtsp(inst: &Instance, k: usize) -> Result<GtspInstance> {
    if inst.n() < 3 {
        return Err(Error::invalid(format!(
            "a tour needs at least 3 waypoints, got {}",
            inst.n()
        )));
    }
    if k == 0 {
        return Err(Error::invalid("sector count k must be at least 1"));
    }
    let n = inst.n();
    let sectors: Vec<Vec<AngleInterval>> = inst
        .waypoints
        .iter()
        .map(|w| partition_interval(&w.interval, k))
        .collect::<Result<_>>()?;
    let pairs: Vec<(usize, usize, usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .flat_map(|(i, j)| (0..k).flat_map(move |m| (0..k).map(move |l| (i, m, j, l))))
        .collect();
    let solved: Vec<IntervalSolution> = pairs
        .par_iter()
        .map(|&(i, m, j, l)| {
            solve_interval(&IntervalQuery::new(
                inst.waypoints[i].position(),
                sectors[i][m],
                inst.waypoints[j].position(),
                sectors[j][l],
                inst.rho,
            ))
        })
        .collect();
    let mut g = GtspInstance {
        n,
        k,
        rho: inst.rho,
        ids: inst.waypoints.iter().map(|w| w.id).collect(),
        positions: inst.waypoints.iter().map(|w| w.position()).collect(),
        sectors,
        legs: vec![
            GtspLeg {
                length: f64::INFINITY,
                theta_dep: 0.0,
                theta_arr: 0.0
            };
            (n * k) * (n * k)
        ],
    };
    for (&(i, m, j, l), sol) in pairs.iter().zip(&solved) {
        let fwd = g.idx(i, m, j, l);
        g.legs[fwd] = GtspLeg {
            length: sol.length,
            theta_dep: sol.theta_dep,
            theta_arr: sol.theta_arr,
        };
        let rev = g.idx(j, l, i, m);
        g.legs[rev] = GtspLeg {
            length: sol.length,
            theta_dep: sol.theta_arr,
            theta_arr: sol.theta_dep,
        };
    }
    Ok(g)
}

/// The standard one-in-a-set-TSP-to-ATSP transformation: zero-cost directed
/// cycles inside each set, inter-set arcs shifted to the cyclic predecessor
/// (an arc leaving node `(i, m)` carries the original cost out of
/// `(i, m+1 mod k)`), and every inter-set cost offset by `M` larger than the
/// total cost mass. An optimal ATSP tour then traverses each set's cycle in
/// full and maps back to an optimal selection with value `ATSP − n·M`.
#[derive(Debug, Clone)]
pub struct NoonBeanAtsp {
    pub n: usize,
    pub k: usize,
    pub offset: f64,
    /// `cost[a][b]` over flattened nodes `a = i·k + m`.
    pub cost: Vec<Vec<f64>>,
}

pub fn noon_bean_transform(g: &GtspInstance) -> NoonBeanAtsp {
    let (n, k) = (g.n, g.k);
    let total: f64 = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| {
            (0..k)
                .flat_map(|m| (0..k).map(move |l| (m, l)))
                .map(|(m, l)| g.cost(i, m, j, l))
                .sum::<f64>()
        })
        .sum();
    let offset = total + 1.0;
    let nk = n * k;
    let mut cost = vec![vec![f64::INFINITY; nk]; nk];
    for i in 0..n {
        for m in 0..k {
            let a = i * k + m;
            if k > 1 {
                cost[a][i * k + (m + 1) % k] = 0.0;
            }
            for j in 0..n {
                if j == i {
                    continue;
                }
                for l in 0..k {
                    cost[a][j * k + l] = g.cost(i, (m + 1) % k, j, l) + offset;
                }
            }
        }
    }
    NoonBeanAtsp { n, k, offset, cost }
}

/// How the relaxation is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TourMode {
    /// Dynamic program over waypoint subsets with sector states; returns the
    /// true optimum of the relaxation (a certified lower bound on the tour
    /// problem). Refuses instances above the documented size limit
    /// (`n ≤ 14` and `n·k ≤ 24`).
    Exact,
    /// Nearest-neighbor over sets plus set-aware 2-opt / or-opt / sector
    /// reassignment. Returns a feasible selection of the relaxation, which
    /// upper-bounds the relaxation optimum and is NOT a certified lower
    /// bound for the tour problem.
    Heuristic,
}

/// A solved relaxation: visiting order, chosen sectors, and the relaxed legs
/// (closing leg included).
#[derive(Debug, Clone)]
pub struct TourRelaxation {
    pub value: f64,
    /// True when `value` is the exact relaxation optimum (a valid lower
    /// bound); false for heuristic values.
    pub certified: bool,
    /// Waypoint indices (into the instance order) of the cyclic visit.
    pub order: Vec<usize>,
    pub sectors: Vec<usize>,
}

const EXACT_MAX_N: usize = 14;
const EXACT_MAX_NK: usize = 24;

/// Solve the relaxation in the requested mode.
pub fn solve_tour_lb(g: &GtspInstance, mode: TourMode) -> Result<TourRelaxation> {
    match mode {
        TourMode::Exact => {
            if g.n > EXACT_MAX_N || g.n * g.k > EXACT_MAX_NK {
                return Err(Error::SizeLimit(format!(
                    "exact tour mode handles n ≤ {EXACT_MAX_N} and n·k ≤ {EXACT_MAX_NK}; \
                     got n = {}, n·k = {}",
                    g.n,
                    g.n * g.k
                )));
            }
            Ok(exact_tour(g))
        }
        TourMode::Heuristic => Ok(heuristic_tour(g)),
    }
}

/// Held-Karp over waypoint subsets with sector states, one pass per sector of
/// the fixed start waypoint 0.
fn exact_tour(g: &GtspInstance) -> TourRelaxation {
    let (n, k) = (g.n, g.k);
    let rest = n - 1; // waypoints 1..n
    let nodes = rest * k; // node = (j - 1) * k + l
    let full: usize = (1 << rest) - 1;

    let mut best: Option<(f64, Vec<usize>, Vec<usize>)> = None;
    for m0 in 0..k {
        let mut dp = vec![vec![f64::INFINITY; nodes]; 1 << rest];
        let mut parent = vec![vec![usize::MAX; nodes]; 1 << rest];
        for j in 1..n {
            for l in 0..k {
                let node = (j - 1) * k + l;
                dp[1 << (j - 1)][node] = g.cost(0, m0, j, l);
            }
        }
        for mask in 1..=full {
            for j in 1..n {
                if mask & (1 << (j - 1)) == 0 {
                    continue;
                }
                let sub = mask ^ (1 << (j - 1));
                if sub == 0 {
                    continue;
                }
                for l in 0..k {
                    let node = (j - 1) * k + l;
                    let mut bestv = f64::INFINITY;
                    let mut bestp = usize::MAX;
                    for p in 1..n {
                        if sub & (1 << (p - 1)) == 0 {
                            continue;
                        }
                        for pm in 0..k {
                            let pnode = (p - 1) * k + pm;
                            let v = dp[sub][pnode];
                            if !v.is_finite() {
                                continue;
                            }
                            let c = v + g.cost(p, pm, j, l);
                            if c < bestv {
                                bestv = c;
                                bestp = pnode;
                            }
                        }
                    }
                    if bestv < dp[mask][node] {
                        dp[mask][node] = bestv;
                        parent[mask][node] = bestp;
                    }
                }
            }
        }
        for j in 1..n {
            for l in 0..k {
                let node = (j - 1) * k + l;
                let v = dp[full][node];
                if !v.is_finite() {
                    continue;
                }
                let total = v + g.cost(j, l, 0, m0);
                if best.as_ref().map_or(true, |(bv, _, _)| total < *bv) {
                    // Reconstruct the visiting order backwards.
                    let mut order = vec![0usize];
                    let mut sectors = vec![m0];
                    let mut chain = Vec::new();
                    let mut mask = full;
                    let mut cur = node;
                    while cur != usize::MAX {
                        let j = cur / k + 1;
                        chain.push((j, cur % k));
                        let p = parent[mask][cur];
                        mask ^= 1 << (j - 1);
                        cur = p;
                    }
                    chain.reverse();
                    for (j, l) in chain {
                        order.push(j);
                        sectors.push(l);
                    }
                    best = Some((total, order, sectors));
                }
            }
        }
    }
    let (value, mut order, mut sectors) = best.expect("n ≥ 3 always admits a tour");
    canonicalize_orientation(g, &mut order, &mut sectors);
    TourRelaxation {
        value,
        certified: true,
        order,
        sectors,
    }
}

/// With symmetric costs both orientations tie; prefer the one whose second
/// waypoint id is smaller.
fn canonicalize_orientation(g: &GtspInstance, order: &mut [usize], sectors: &mut [usize]) {
    let n = order.len();
    if n >= 3 && g.ids[order[1]] > g.ids[order[n - 1]] {
        order[1..].reverse();
        sectors[1..].reverse();
    }
}

fn tour_value(g: &GtspInstance, order: &[usize], sectors: &[usize]) -> f64 {
    let n = order.len();
    (0..n)
        .map(|t| {
            let u = (t + 1) % n;
            g.cost(order[t], sectors[t], order[u], sectors[u])
        })
        .sum()
}

/// Nearest-neighbor over sets followed by best-improvement local search
/// (segment reversal, single-waypoint relocation, sector reassignment).
fn heuristic_tour(g: &GtspInstance) -> TourRelaxation {
    let (n, k) = (g.n, g.k);
    let mut best: Option<(f64, Vec<usize>, Vec<usize>)> = None;
    for start in 0..n {
        for m0 in 0..k {
            let mut order = vec![start];
            let mut sectors = vec![m0];
            let mut used = vec![false; n];
            used[start] = true;
            while order.len() < n {
                let (ci, cm) = (*order.last().unwrap(), *sectors.last().unwrap());
                let mut pick = None;
                let mut pickv = f64::INFINITY;
                for j in 0..n {
                    if used[j] {
                        continue;
                    }
                    for l in 0..k {
                        let c = g.cost(ci, cm, j, l);
                        if c < pickv {
                            pickv = c;
                            pick = Some((j, l));
                        }
                    }
                }
                let (j, l) = pick.expect("unvisited waypoint exists");
                used[j] = true;
                order.push(j);
                sectors.push(l);
            }
            let v = tour_value(g, &order, &sectors);
            if best.as_ref().map_or(true, |(bv, _, _)| v < *bv) {
                best = Some((v, order, sectors));
            }
        }
    }
    let (_, mut order, mut sectors) = best.expect("n ≥ 3");

    // Local search to a combined local optimum.
    let mut value = tour_value(g, &order, &sectors);
    for _pass in 0..500 {
        let mut improved = false;

        // Sector reassignment: coordinate descent over positions.
        for t in 0..n {
            let prev = (t + n - 1) % n;
            let next = (t + 1) % n;
            let mut bl = sectors[t];
            let mut bv = g.cost(order[prev], sectors[prev], order[t], sectors[t])
                + g.cost(order[t], sectors[t], order[next], sectors[next]);
            for l in 0..k {
                let v = g.cost(order[prev], sectors[prev], order[t], l)
                    + g.cost(order[t], l, order[next], sectors[next]);
                if v < bv - 1e-12 {
                    bv = v;
                    bl = l;
                }
            }
            if bl != sectors[t] {
                sectors[t] = bl;
                improved = true;
            }
        }

        // 2-opt segment reversal (internal legs keep their symmetric costs).
        let mut best_move: Option<(usize, usize, f64)> = None;
        for i in 1..n - 1 {
            for j in i + 1..n {
                if (j + 1) % n == i {
                    continue;
                }
                let (a, b) = (order[i - 1], order[i]);
                let (c, d) = (order[j], order[(j + 1) % n]);
                let (sa, sb) = (sectors[i - 1], sectors[i]);
                let (sc, sd) = (sectors[j], sectors[(j + 1) % n]);
                let delta = g.cost(a, sa, c, sc) + g.cost(b, sb, d, sd)
                    - g.cost(a, sa, b, sb)
                    - g.cost(c, sc, d, sd);
                if delta < best_move.map_or(-1e-9, |(_, _, d0)| d0) {
                    best_move = Some((i, j, delta));
                }
            }
        }
        if let Some((i, j, _)) = best_move {
            order[i..=j].reverse();
            sectors[i..=j].reverse();
            improved = true;
        }

        // Or-opt: relocate one waypoint after another, re-choosing its sector.
        let mut best_move: Option<(usize, usize, usize, f64)> = None;
        for t in 1..n {
            let prev = (t + n - 1) % n;
            let next = (t + 1) % n;
            let removal = g.cost(order[prev], sectors[prev], order[t], sectors[t])
                + g.cost(order[t], sectors[t], order[next], sectors[next])
                - g.cost(order[prev], sectors[prev], order[next], sectors[next]);
            for u in 0..n {
                let un = (u + 1) % n;
                if u == t || un == t {
                    continue;
                }
                for l in 0..k {
                    let insertion = g.cost(order[u], sectors[u], order[t], l)
                        + g.cost(order[t], l, order[un], sectors[un])
                        - g.cost(order[u], sectors[u], order[un], sectors[un]);
                    let delta = insertion - removal;
                    if delta < best_move.map_or(-1e-9, |(_, _, _, d0)| d0) {
                        best_move = Some((t, u, l, delta));
                    }
                }
            }
        }
        if let Some((t, u, l, _)) = best_move {
            let after_wp = order[u];
            let wp = order.remove(t);
            sectors.remove(t);
            let p = order.iter().position(|&x| x == after_wp).unwrap() + 1;
            order.insert(p, wp);
            sectors.insert(p, l);
            improved = true;
        }

        let v = tour_value(g, &order, &sectors);
        if v < value - 1e-12 {
            value = v;
        }
        if !improved {
            break;
        }
    }

    // Rotate so waypoint index with the smallest id leads, then orient.
    let lead = (0..n)
        .min_by_key(|&t| g.ids[order[t]])
        .expect("non-empty tour");
    order.rotate_left(lead);
    sectors.rotate_left(lead);
    canonicalize_orientation(g, &mut order, &mut sectors);
    let value = tour_value(g, &order, &sectors);
    TourRelaxation {
        value,
        certified: false,
        order,
        sectors,
    }
}

/// A feasible closed tour with its certificate data.
#[derive(Debug, Clone)]
pub struct TourResult {
    /// Waypoint ids in cyclic visiting order.
    pub sequence: Vec<u32>,
    /// Relaxation value: the certified lower bound `Cost_lb` in exact mode,
    /// otherwise the heuristic relaxation value (not a lower bound).
    pub lower_bound: f64,
    pub certified: bool,
    pub feasible_length: f64,
    pub chosen_headings: Vec<f64>,
    /// `n` feasible legs, closing leg last.
    pub legs: Vec<RsPath>,
    /// Relaxed legs (closing leg last), for rendering and audits.
    pub lb_legs: Vec<IntervalSolution>,
    pub sectors: Vec<usize>,
    pub deviation_pct: f64,
    pub theoretical_deviation_pct: f64,
}

/// Cyclic repair: every waypoint owns both an arrival and a departure
/// heading from the relaxation; a chain shortest path picks one per
/// waypoint, run once per choice at the first waypoint, keeping the cheaper
/// closure (ties prefer its departure heading).
pub fn repair_tour(inst: &Instance, g: &GtspInstance, relax: &TourRelaxation) -> Result<TourResult> {
    let n = relax.order.len();
    assert!(n == inst.n(), "relaxation does not match instance");
    // Relaxed legs around the cycle.
    let lb_legs: Vec<IntervalSolution> = (0..n)
        .map(|t| {
            let u = (t + 1) % n;
            let (i, m) = (relax.order[t], relax.sectors[t]);
            let (j, l) = (relax.order[u], relax.sectors[u]);
            solve_interval(&IntervalQuery::new(
                g.positions[i],
                g.sectors[i][m],
                g.positions[j],
                g.sectors[j][l],
                g.rho,
            ))
        })
        .collect();

    // Choices per position: arrival of the inbound leg or departure of the
    // outbound leg.
    let choices: Vec<[f64; 2]> = (0..n)
        .map(|t| {
            let inbound = (t + n - 1) % n;
            [lb_legs[inbound].theta_arr, lb_legs[t].theta_dep]
        })
        .collect();
    let pos = |t: usize| g.positions[relax.order[t]];

    let mut best: Option<(f64, Vec<usize>)> = None;
    // Fix the first waypoint's choice: departure first so equal totals keep it.
    for c0 in [1usize, 0] {
        let mut cost = vec![[f64::INFINITY; 2]; n];
        let mut parent = vec![[0usize; 2]; n];
        cost[0][c0] = 0.0;
        for t in 1..n {
            for ct in 0..2 {
                for cp in 0..2 {
                    if !cost[t - 1][cp].is_finite() {
                        continue;
                    }
                    let leg = p2p_length(
                        Pose::new(pos(t - 1).x, pos(t - 1).y, choices[t - 1][cp]),
                        Pose::new(pos(t).x, pos(t).y, choices[t][ct]),
                        inst.rho,
                    )?;
                    let v = cost[t - 1][cp] + leg;
                    if v < cost[t][ct] {
                        cost[t][ct] = v;
                        parent[t][ct] = cp;
                    }
                }
            }
        }
        for cl in 0..2 {
            if !cost[n - 1][cl].is_finite() {
                continue;
            }
            let closing = p2p_length(
                Pose::new(pos(n - 1).x, pos(n - 1).y, choices[n - 1][cl]),
                Pose::new(pos(0).x, pos(0).y, choices[0][c0]),
                inst.rho,
            )?;
            let total = cost[n - 1][cl] + closing;
            if best.as_ref().map_or(true, |(bv, _)| total < *bv) {
                let mut picks = vec![0usize; n];
                picks[0] = c0;
                picks[n - 1] = cl;
                for t in (2..n).rev() {
                    picks[t - 1] = parent[t][picks[t]];
                }
                best = Some((total, picks));
            }
        }
    }
    let (_, picks) = best.expect("repair always feasible");
    let chosen_headings: Vec<f64> = (0..n).map(|t| choices[t][picks[t]]).collect();
    let legs: Vec<RsPath> = (0..n)
        .map(|t| {
            let u = (t + 1) % n;
            solve_p2p(
                Pose::new(pos(t).x, pos(t).y, chosen_headings[t]),
                Pose::new(pos(u).x, pos(u).y, chosen_headings[u]),
                inst.rho,
            )
        })
        .collect::<Result<_>>()?;
    let feasible_length: f64 = legs.iter().map(|p| p.length).sum();
    let gap = theoretical_gap_tour(inst, g.k)?;
    Ok(TourResult {
        sequence: relax.order.iter().map(|&t| g.ids[t]).collect(),
        lower_bound: relax.value,
        certified: relax.certified,
        feasible_length,
        chosen_headings,
        legs,
        lb_legs,
        sectors: relax.sectors.clone(),
        deviation_pct: 100.0 * (feasible_length - relax.value) / relax.value,
        theoretical_deviation_pct: 100.0 * gap / relax.value,
    })
}

/// A-priori gap of the cyclic repair: `3ρ Σ width_i / k` over all `n`
/// waypoints (the tour repairs at every waypoint, the first included).
pub fn theoretical_gap_tour(inst: &Instance, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::invalid("sector count k must be at least 1"));
    }
    Ok(3.0 * inst.rho / k as f64
        * inst
            .waypoints
            .iter()
            .map(|w| w.interval.width())
            .sum::<f64>())
}

/// Exhaustive relaxation optimum for tiny instances: all cyclic sequences
/// (first waypoint fixed, orientations deduplicated) times all sector
/// tuples. Test oracle; exponential.
pub fn brute_force_relaxation(g: &GtspInstance) -> f64 {
    fn permutations(rest: &mut Vec<usize>, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(acc.clone());
            return;
        }
        for i in 0..rest.len() {
            let v = rest.remove(i);
            acc.push(v);
            permutations(rest, acc, out);
            acc.pop();
            rest.insert(i, v);
        }
    }
    let n = g.n;
    let mut seqs = Vec::new();
    permutations(&mut (1..n).collect(), &mut vec![0], &mut seqs);
    // Symmetric costs: keep one orientation per cyclic sequence.
    seqs.retain(|s| s[1] <= s[n - 1]);
    let mut best = f64::INFINITY;
    let k = g.k;
    for seq in &seqs {
        let mut sectors = vec![0usize; n];
        loop {
            let v = tour_value(g, seq, &sectors);
            if v < best {
                best = v;
            }
            // Odometer over sector tuples.
            let mut pos = 0;
            loop {
                if pos == n {
                    break;
                }
                sectors[pos] += 1;
                if sectors[pos] < k {
                    break;
                }
                sectors[pos] = 0;
                pos += 1;
            }
            if pos == n {
                break;
            }
        }
    }
    best
}
