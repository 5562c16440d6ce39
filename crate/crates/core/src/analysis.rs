//! Structural checks on computed fields: clearance monotonicity along
//! trajectories, optimality of witness chains, shelf/cliff classification of
//! the obstacle boundary, hypotheses H1/H2, envelope generators, persistent
//! reachable-set boundaries, and uniform directional penetration.
//!
//! Every check returns a structured report rather than panicking; exactness
//! claims compare tick sums with zero tolerance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cost::{self, INF};
use crate::error::{Error, Result};
use crate::clearance::{ClearanceField, EnvelopeMap};
use crate::reach::{self, CostField, PrimitiveGraph};
use crate::scene::{Lattice, NodeClass};
use crate::space;
use crate::systems::{
    compute_certificate, min_hamiltonian, ControlSystem, DirectionalityCertificate, RkScratch,
    Trajectory, DEFAULT_CERT_SAMPLES,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundaryLabel {
    Shelf,
    Cliff,
}

/// Shelf/cliff partition of the BOUNDARY nodes by capped inflow cost.
#[derive(Debug, Clone, Serialize)]
pub struct BoundaryClassification {
    pub rho_probe: f64,
    /// Per lattice node; `None` off the boundary.
    pub label: Vec<Option<BoundaryLabel>>,
    /// min over FREE nodes n of d_c(n, y), in ticks, capped by the probe.
    pub inflow_ticks: Vec<u64>,
}

impl BoundaryClassification {
    pub fn is_shelf(&self, node: usize) -> bool {
        self.label[node] == Some(BoundaryLabel::Shelf)
    }
}

/// Default probe radius for shelf/cliff classification.
pub fn default_rho_probe(graph: &PrimitiveGraph, lattice: &Lattice) -> f64 {
    let sys = &graph.system;
    let mut v = vec![0.0; sys.state_dim];
    let center: Vec<f64> = lattice
        .scene
        .bounds
        .iter()
        .map(|&(lo, hi)| 0.5 * (lo + hi))
        .collect();
    let mut psi_max = 0.0f64;
    for u in &sys.control_samples {
        sys.velocity(&center, u, &mut v);
        psi_max = psi_max.max(sys.running_cost(&center, &v));
    }
    let h = lattice.spacing.iter().cloned().fold(0.0f64, f64::max);
    10.0 * h * psi_max
}

/// SHELF iff no FREE node reaches the boundary node within `rho_probe`.
pub fn classify_boundary(
    graph: &PrimitiveGraph,
    lattice: &Lattice,
    rho_probe: f64,
) -> BoundaryClassification {
    let seeds: Vec<usize> = (0..lattice.node_count())
        .filter(|&n| lattice.class(n) == NodeClass::Free)
        .collect();
    let inflow = reach::multi_source_forward(graph, lattice.node_count(), &seeds);
    let probe_ticks = cost::to_ticks(rho_probe);
    let label: Vec<Option<BoundaryLabel>> = (0..lattice.node_count())
        .map(|n| {
            if lattice.class(n) != NodeClass::Boundary {
                None
            } else if inflow[n] >= probe_ticks {
                Some(BoundaryLabel::Shelf)
            } else {
                Some(BoundaryLabel::Cliff)
            }
        })
        .collect();
    BoundaryClassification {
        rho_probe,
        label,
        inflow_ticks: inflow,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClearanceAlongReport {
    pub steps: usize,
    /// States where the clearance rose by more than the jump threshold.
    pub upward_jumps: Vec<Vec<f64>>,
    /// Steps where clearance dropped by more than the edge cost (must stay 0).
    pub downward_violations: usize,
    pub pass: bool,
}

/// Check one-sided clearance monotonicity along a trajectory: for consecutive
/// nodes a -> b, clr(a) - clr(b) <= edge cost exactly; upward jumps above
/// `kappa` are reported (they are the allowed discontinuities).
pub fn check_clearance_along(
    cf: &ClearanceField,
    traj: &Trajectory,
    graph: &PrimitiveGraph,
    lattice: &Lattice,
    kappa: f64,
) -> Result<ClearanceAlongReport> {
    let mut nodes: Vec<usize> = Vec::new();
    for s in &traj.samples {
        let n = lattice.snap(&s.state);
        if lattice.class(n) == NodeClass::ObstacleInterior {
            return Err(Error::InadmissibleTrajectory(format!(
                "state {:?} snaps into the obstacle interior",
                s.state
            )));
        }
        if nodes.last() != Some(&n) {
            nodes.push(n);
        }
    }
    let kappa_ticks = cost::to_ticks(kappa);
    let mut upward = Vec::new();
    let mut down = 0usize;
    for w in nodes.windows(2) {
        let (a, b) = (w[0], w[1]);
        let Some(edge) = graph.out[a].iter().find(|e| e.target as usize == b) else {
            return Err(Error::InadmissibleTrajectory(format!(
                "consecutive nodes {a} -> {b} are not connected by a primitive"
            )));
        };
        let (ca, cb) = (cf.clr_ticks(a), cf.clr_ticks(b));
        match (ca, cb) {
            (INF, _) | (_, INF) => {
                if cb == INF && ca < INF {
                    upward.push(lattice.coords(b));
                }
            }
            (ca, cb) if ca > cb => {
                if ca - cb > edge.cost_ticks {
                    down += 1;
                }
            }
            (ca, cb) => {
                if cb - ca > kappa_ticks {
                    upward.push(lattice.coords(b));
                }
            }
        }
    }
    Ok(ClearanceAlongReport {
        steps: nodes.len().saturating_sub(1),
        upward_jumps: upward,
        downward_violations: down,
        pass: down == 0,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimalityReport {
    pub applicable: bool,
    pub chain_len: usize,
    /// clr(x) - clr(chain node) equals the prefix cost at every node, exactly.
    pub exact: bool,
}

/// Principle of optimality along the witness chain from `x`.
pub fn check_optimality_principle(cf: &ClearanceField, x: usize) -> Result<OptimalityReport> {
    if cf.clr_ticks(x) == INF {
        return Ok(OptimalityReport {
            applicable: false,
            chain_len: 0,
            exact: true,
        });
    }
    let chain = reach::node_chain(&cf.field, x)?;
    let total = cf.clr_ticks(x);
    let mut exact = true;
    let mut prefix = 0u64;
    for (i, &(node, _, ticks)) in chain.iter().enumerate() {
        // Clearance drops by exactly the cost spent so far.
        if total - cf.clr_ticks(node) != prefix || ticks != cf.clr_ticks(node) {
            exact = false;
        }
        if i + 1 < chain.len() {
            prefix += cf.clr_ticks(node) - cf.clr_ticks(chain[i + 1].0);
        }
    }
    Ok(OptimalityReport {
        applicable: true,
        chain_len: chain.len(),
        exact,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EnvelopePropagationReport {
    pub applicable: bool,
    pub interior_nodes: usize,
    pub flagged: usize,
    pub fraction: f64,
    pub pass: bool,
}

/// The witness trajectory of an envelope point should itself travel along the
/// envelope: at least 80% of its interior nodes carry an envelope or
/// boundary-adjacent flag.
pub fn check_envelope_propagation(
    cf: &ClearanceField,
    em: &EnvelopeMap,
    x: usize,
) -> Result<EnvelopePropagationReport> {
    if cf.clr_ticks(x) == INF {
        return Ok(EnvelopePropagationReport {
            applicable: false,
            interior_nodes: 0,
            flagged: 0,
            fraction: 1.0,
            pass: true,
        });
    }
    let chain = reach::node_chain(&cf.field, x)?;
    let interior: Vec<usize> = chain[1..chain.len().saturating_sub(1)]
        .iter()
        .map(|&(n, _, _)| n)
        .collect();
    let flagged = interior
        .iter()
        .filter(|&&n| em.envelope[n] || em.boundary_adjacent[n])
        .count();
    let fraction = if interior.is_empty() {
        1.0
    } else {
        flagged as f64 / interior.len() as f64
    };
    Ok(EnvelopePropagationReport {
        applicable: true,
        interior_nodes: interior.len(),
        flagged,
        fraction,
        pass: fraction >= 0.8,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct H1Result {
    pub direction: Vec<f64>,
    pub hamiltonian_value: f64,
    pub a_holds: bool,
    pub b_holds: bool,
    /// Non-shelf boundary nodes found inside the target ball.
    pub violations: Vec<usize>,
    pub certificate: Option<DirectionalityCertificate>,
    pub holds: bool,
}

pub const H1_FAN_DIRECTIONS: usize = 64;

/// Check hypothesis H1 at a boundary node: (a) positive minimal Hamiltonian
/// along `xi` (auto-searched over a direction fan when not supplied), and
/// (b) every boundary node in the open ball of radius `r_star` around the
/// target point is a shelf point.
#[allow(clippy::too_many_arguments)]
pub fn check_h1(
    system: &ControlSystem,
    lattice: &Lattice,
    bc: &BoundaryClassification,
    y0: usize,
    xi: Option<&[f64]>,
    r_star: f64,
    seed: u64,
) -> H1Result {
    let y = lattice.coords(y0);
    let direction: Vec<f64> = match xi {
        Some(v) => v.to_vec(),
        None => space::direction_fan(system.state_dim, H1_FAN_DIRECTIONS)
            .into_iter()
            .max_by(|a, b| {
                min_hamiltonian(system, &y, a)
                    .partial_cmp(&min_hamiltonian(system, &y, b))
                    .unwrap()
            })
            .expect("nonempty fan"),
    };
    let h = min_hamiltonian(system, &y, &direction);
    // Strict positivity up to float noise: fan directions hit axis-aligned
    // cases like (6e-17, 1.0) where the true minimum is zero.
    let a_holds = h > 1e-9 * space::norm(&direction).max(1.0);

    let norm = space::norm(&direction);
    let target: Vec<f64> = y
        .iter()
        .zip(&direction)
        .map(|(&c, &d)| c + r_star / norm * d)
        .collect();
    // The ball is shaved by a hair so nodes at distance exactly r_star (like
    // y0 itself when xi is a unit offset) are robustly excluded.
    let mut violations = Vec::new();
    for n in 0..lattice.node_count() {
        if lattice.class(n) != NodeClass::Boundary {
            continue;
        }
        let d = space::distance(&lattice.axis_topology, &lattice.coords(n), &target);
        if d < r_star - 1e-9 && !bc.is_shelf(n) {
            violations.push(n);
        }
    }
    let b_holds = violations.is_empty();
    let certificate = if a_holds {
        compute_certificate(system, &y, &direction, r_star, DEFAULT_CERT_SAMPLES, seed).ok()
    } else {
        None
    };
    H1Result {
        direction,
        hamiltonian_value: h,
        a_holds,
        b_holds,
        violations,
        certificate,
        holds: a_holds && b_holds,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct H2Result {
    pub radii: Vec<f64>,
    pub counts: Vec<usize>,
    /// Some radius contained no free node at all (vacuous H2).
    pub isolated: bool,
    pub holds: bool,
}

/// Check hypothesis H2: exactly one free component in every listed ball.
pub fn check_h2(lattice: &Lattice, y0: usize, radii: &[f64]) -> H2Result {
    let y = lattice.coords(y0);
    let counts: Vec<usize> = radii
        .iter()
        .map(|&r| crate::scene::free_component_count(lattice, &y, r))
        .collect();
    let isolated = counts.iter().any(|&c| c == 0);
    let holds = counts.iter().all(|&c| c == 1);
    H2Result {
        radii: radii.to_vec(),
        counts,
        isolated,
        holds,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EnvGenReport {
    pub candidate: usize,
    pub radii: Vec<f64>,
    pub thresholds: Vec<f64>,
    /// Per level: an envelope node inside the ball with small clearance.
    pub hits: Vec<Option<usize>>,
    pub verdict: bool,
    pub h1: Option<H1Result>,
    pub h2: Option<H2Result>,
}

/// Default nested (radius, threshold) levels from the envelope threshold.
pub fn default_envgen_levels(kappa: f64) -> (Vec<f64>, Vec<f64>) {
    let levels: Vec<f64> = [8.0, 4.0, 2.0].iter().map(|m| m * kappa).collect();
    (levels.clone(), levels)
}

/// Search nested balls around a boundary node for envelope-flagged nodes of
/// ever smaller clearance. Boundary-adjacent flags count as hits: near the
/// candidate every envelope node is necessarily close to the boundary.
pub fn detect_envelope_generator(
    cf: &ClearanceField,
    em: &EnvelopeMap,
    lattice: &Lattice,
    y0: usize,
    radii: &[f64],
    thresholds: &[f64],
) -> Result<EnvGenReport> {
    if radii.len() != thresholds.len() || radii.is_empty() {
        return Err(Error::Config(
            "radii and thresholds must be nonempty lists of equal length".into(),
        ));
    }
    let h = lattice.spacing.iter().cloned().fold(0.0f64, f64::max);
    let smallest = radii.iter().cloned().fold(f64::INFINITY, f64::min);
    if smallest < 3.0 * h {
        return Err(Error::Resolution(smallest));
    }
    let y = lattice.coords(y0);
    let mut hits = Vec::with_capacity(radii.len());
    for (&r, &rho) in radii.iter().zip(thresholds) {
        let rho_ticks = cost::to_ticks(rho);
        let hit = (0..lattice.node_count()).find(|&n| {
            (em.envelope[n] || em.boundary_adjacent[n])
                && cf.clr_ticks(n) < rho_ticks
                && space::distance(&lattice.axis_topology, &lattice.coords(n), &y) <= r
        });
        hits.push(hit);
    }
    let verdict = hits.iter().all(Option::is_some);
    Ok(EnvGenReport {
        candidate: y0,
        radii: radii.to_vec(),
        thresholds: thresholds.to_vec(),
        hits,
        verdict,
        h1: None,
        h2: None,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PersistentBoundaryReport {
    pub applicable: bool,
    /// A node persisting on the discrete boundary of every reverse set.
    pub reverse_witness: Option<usize>,
    /// Same for the forward sets.
    pub forward_witness: Option<usize>,
    pub degenerate_radius: bool,
    pub pass: bool,
}

/// Look for a nearby node that stays on the boundary of the reverse (and
/// forward) reachable sets across all listed radii.
pub fn check_persistent_boundary(
    graph: &PrimitiveGraph,
    lattice: &Lattice,
    x: usize,
    r: f64,
    rho_list: &[f64],
) -> Result<PersistentBoundaryReport> {
    let xc = lattice.coords(x);
    // A directionality certificate must be available at x.
    let feasible = space::direction_fan(graph.system.state_dim, H1_FAN_DIRECTIONS)
        .iter()
        .any(|xi| min_hamiltonian(&graph.system, &xc, xi) > 0.0);
    if !feasible {
        return Ok(PersistentBoundaryReport {
            applicable: false,
            reverse_witness: None,
            forward_witness: None,
            degenerate_radius: false,
            pass: false,
        });
    }

    let ball: Vec<usize> = (0..lattice.node_count())
        .filter(|&n| {
            n != x && space::distance(&lattice.axis_topology, &lattice.coords(n), &xc) <= r
        })
        .collect();

    let persistent = |field: &CostField| -> (Option<usize>, bool) {
        let mut degenerate = false;
        let mut candidates: Option<Vec<usize>> = None;
        for &rho in rho_list {
            // Closed sublevel sets: the cone *sides* at exactly cost rho are
            // the persistent boundary of interest.
            let bound = cost::to_ticks(rho);
            let set: Vec<usize> = (0..field.ticks.len())
                .filter(|&n| field.ticks[n] <= bound)
                .collect();
            if set.len() <= 1 {
                degenerate = true;
            }
            let mut member = vec![false; lattice.node_count()];
            for &n in &set {
                member[n] = true;
            }
            let on_boundary = |n: usize| {
                member[n]
                    && lattice
                        .face_neighbors(n)
                        .iter()
                        .any(|&nb| !member[nb])
            };
            let next: Vec<usize> = match &candidates {
                None => ball.iter().cloned().filter(|&n| on_boundary(n)).collect(),
                Some(prev) => prev.iter().cloned().filter(|&n| on_boundary(n)).collect(),
            };
            candidates = Some(next);
        }
        (
            candidates.and_then(|c| c.first().cloned()),
            degenerate,
        )
    };

    let rev_field = reach::cost_to(graph, lattice, &[x])?;
    let (reverse_witness, deg_r) = persistent(&rev_field);
    let fwd_field = reach::cost_from(graph, lattice, &xc)?;
    let (forward_witness, deg_f) = persistent(&fwd_field);

    Ok(PersistentBoundaryReport {
        applicable: true,
        reverse_witness,
        forward_witness,
        degenerate_radius: deg_r || deg_f,
        pass: reverse_witness.is_some() && forward_witness.is_some(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PenetrationReport {
    pub samples: usize,
    /// Endpoints outside the shrunken ball around the target point.
    pub ball_failures: usize,
    /// Endpoints violating the non-small-time-local-reachability bound.
    pub stlnr_failures: usize,
    /// Samples where the distance to the target increased beyond tolerance.
    pub monotone_violations: usize,
    pub pass: bool,
}

/// Drive `n_samples` random piecewise-constant schedules from the anchor for
/// the certificate horizon and verify that every endpoint penetrates toward
/// the target ball, approaches monotonically, and respects the lower distance
/// bound implied by the accumulated cost.
pub fn check_uniform_penetration(
    system: &ControlSystem,
    cert: &DirectionalityCertificate,
    n_samples: usize,
    seed: u64,
) -> PenetrationReport {
    let t_star = cert.horizon;
    let step = t_star / 64.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scratch = RkScratch::new(system.state_dim);
    let radius_bound = cert.eta_star(t_star) * cert.target_radius;
    let mono_tol = 10.0 * step * cert.velocity_bound;

    let mut ball_failures = 0;
    let mut stlnr_failures = 0;
    let mut monotone_violations = 0;
    for _ in 0..n_samples {
        let segments = rng.gen_range(1..=4usize);
        let mut cuts: Vec<f64> = (0..segments - 1).map(|_| rng.gen_range(0.0..1.0)).collect();
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.insert(0, 0.0);
        cuts.push(1.0);
        let mut x = cert.anchor.clone();
        let mut c = 0.0;
        let mut last_dist = space::distance(&system.axis_topology, &x, &cert.target_point);
        let mut monotone_ok = true;
        for w in cuts.windows(2) {
            let dur = (w[1] - w[0]) * t_star;
            if dur <= 0.0 {
                continue;
            }
            let u = system.control_samples[rng.gen_range(0..system.control_samples.len())].clone();
            let n = (dur / step).ceil().max(1.0) as usize;
            let dt = dur / n as f64;
            for _ in 0..n {
                system.step_rk4_with(&mut x, &u, dt, &mut c, &mut scratch);
                let d = space::distance(&system.axis_topology, &x, &cert.target_point);
                if d > last_dist + mono_tol {
                    monotone_ok = false;
                }
                last_dist = d;
            }
        }
        if !monotone_ok {
            monotone_violations += 1;
        }
        let end_dist = space::distance(&system.axis_topology, &x, &cert.target_point);
        if end_dist >= radius_bound {
            ball_failures += 1;
        }
        let anchor_dist = space::distance(&system.axis_topology, &x, &cert.anchor);
        let t_of_cost = (c / cert.cost_bound).min(t_star);
        let lower = cert.target_radius - cert.eta_star(t_of_cost) * cert.target_radius;
        if anchor_dist < lower {
            stlnr_failures += 1;
        }
    }
    PenetrationReport {
        samples: n_samples,
        ball_failures,
        stlnr_failures,
        monotone_violations,
        pass: ball_failures == 0 && stlnr_failures == 0 && monotone_violations == 0,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExactSuiteReport {
    pub triples_checked: usize,
    pub triangle_violations: usize,
    pub chains_checked: usize,
    pub bellman_violations: usize,
    pub rho_min_mismatches: usize,
    pub nesting_pairs_checked: usize,
    pub nesting_violations: usize,
    pub walks_checked: usize,
    pub downward_jump_violations: usize,
    pub pass: bool,
}

/// Exact structural invariants of the primitive graph and its fields, all
/// compared as integer tick sums with zero tolerance: quasi-metric triangle
/// inequality on random node triples, prefix optimality along witness chains,
/// rho_min against clearance on FREE nodes, wave nesting, and one-sided
/// clearance monotonicity along random edge walks.
pub fn run_exact_suite(
    graph: &PrimitiveGraph,
    lattice: &Lattice,
    cf: &ClearanceField,
    em: &EnvelopeMap,
    seed: u64,
) -> ExactSuiteReport {
    let n = lattice.node_count();
    let free: Vec<usize> = (0..n)
        .filter(|&i| lattice.class(i) == NodeClass::Free)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Quasi-metric triangle inequality. Endpoints a, b are drawn from a small
    // pool so one forward sweep per pool member covers all 100 triples.
    let pool: Vec<usize> = (0..20.min(free.len()))
        .map(|_| free[rng.gen_range(0..free.len())])
        .collect();
    let fields: Vec<Vec<u64>> = pool
        .iter()
        .map(|&s| reach::multi_source_forward(graph, n, &[s]))
        .collect();
    let mut triangle_violations = 0;
    let triples = 100;
    for _ in 0..triples {
        let ai = rng.gen_range(0..pool.len());
        let bi = rng.gen_range(0..pool.len());
        let c = free[rng.gen_range(0..free.len())];
        let d_ab = fields[ai][pool[bi]];
        let d_bc = fields[bi][c];
        let d_ac = fields[ai][c];
        if d_ab != INF && d_bc != INF && d_ac > d_ab + d_bc {
            triangle_violations += 1;
        }
    }

    // Prefix optimality along witness chains: each entry's residual cost must
    // equal its outgoing edge cost plus the next entry's residual.
    let reachable: Vec<usize> = free
        .iter()
        .copied()
        .filter(|&i| cf.clr_ticks(i) != INF && cf.clr_ticks(i) > 0)
        .collect();
    let mut bellman_violations = 0;
    let chains = 50.min(reachable.len());
    for _ in 0..chains {
        let start = reachable[rng.gen_range(0..reachable.len())];
        let chain = reach::node_chain(&cf.field, start).expect("finite clearance");
        let mut ok = chain.last().map(|&(_, _, t)| t) == Some(0);
        for w in chain.windows(2) {
            let (a, control, ta) = w[0];
            let (b, _, tb) = w[1];
            let edge = control.and_then(|c| {
                graph.out[a]
                    .iter()
                    .find(|e| e.control == c && e.target as usize == b)
            });
            match edge {
                Some(e) if ta == e.cost_ticks + tb => {}
                _ => ok = false,
            }
        }
        if !ok {
            bellman_violations += 1;
        }
    }

    let rho_min_mismatches = free
        .iter()
        .filter(|&&i| em.rho_min[i] != cf.clr_ticks(i))
        .count();

    // Wave nesting: for rho < mu, W_rho must be contained in W_mu.
    let finite_max = free
        .iter()
        .map(|&i| cf.clr_ticks(i))
        .filter(|&t| t != INF)
        .max()
        .unwrap_or(0);
    let mut nesting_violations = 0;
    let nesting_pairs = 5;
    for _ in 0..nesting_pairs {
        let a = rng.gen_range(1..=finite_max.max(1));
        let b = rng.gen_range(1..=finite_max.max(1));
        let (rho, mu) = (a.min(b), a.max(b).max(a.min(b) + 1));
        let inner = crate::clearance::wave(cf, lattice, cost::to_cost(rho));
        let outer = crate::clearance::wave(cf, lattice, cost::to_cost(mu));
        let mut in_outer = vec![false; n];
        for i in outer {
            in_outer[i] = true;
        }
        if inner.iter().any(|&i| !in_outer[i]) {
            nesting_violations += 1;
        }
    }

    // Random edge walks: clearance may rise freely but can only drop by at
    // most the edge cost.
    let mut downward_jump_violations = 0;
    let walks = 50;
    for _ in 0..walks {
        let mut node = free[rng.gen_range(0..free.len())];
        for _ in 0..30 {
            if graph.out[node].is_empty() {
                break;
            }
            let e = &graph.out[node][rng.gen_range(0..graph.out[node].len())];
            let next = e.target as usize;
            if cf.clr_ticks(node) > e.cost_ticks.saturating_add(cf.clr_ticks(next)) {
                downward_jump_violations += 1;
            }
            node = next;
        }
    }

    ExactSuiteReport {
        triples_checked: triples,
        triangle_violations,
        chains_checked: chains,
        bellman_violations,
        rho_min_mismatches,
        nesting_pairs_checked: nesting_pairs,
        nesting_violations,
        walks_checked: walks,
        downward_jump_violations,
        pass: triangle_violations == 0
            && bellman_violations == 0
            && rho_min_mismatches == 0
            && nesting_violations == 0
            && downward_jump_violations == 0,
    }
}
