//! Motion-primitive graph and cost-distance fields.
//!
//! Each graph edge is one control held for the primitive duration, integrated
//! from a lattice node and snapped to the nearest node. Edge costs are stored
//! in integer ticks, so shortest-path values are exact sums and the
//! quasi-metric/Bellman properties can be asserted with zero tolerance.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::cost::{self, INF};
use crate::error::{Error, Result};
use crate::scene::{Lattice, NodeClass};
use crate::space;
use crate::systems::{ControlSystem, RkScratch, Trajectory, TrajectorySample};

pub const COLLISION_SUBSTEPS: usize = 8;

#[derive(Debug, Clone, Copy)]
pub struct Edge {
    pub target: u32,
    pub control: u16,
    pub cost_ticks: u64,
}

/// In-edge stored in the reverse adjacency: `source --control--> this node`.
#[derive(Debug, Clone, Copy)]
pub struct InEdge {
    pub source: u32,
    pub control: u16,
    pub cost_ticks: u64,
}

#[derive(Debug)]
pub struct PrimitiveGraph {
    pub system: ControlSystem,
    pub primitive_duration: f64,
    pub collision_substeps: usize,
    /// Outgoing edges per lattice node id (empty for obstacle-interior nodes).
    pub out: Vec<Vec<Edge>>,
    /// Incoming edges per lattice node id.
    pub rin: Vec<Vec<InEdge>>,
}

impl PrimitiveGraph {
    pub fn edge_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }
}

/// Which shortest-path problem a [`CostField`] answers.
#[derive(Debug, Clone)]
pub enum SourceSpec {
    /// Single-source forward field: value(n) = d_c(source, n).
    Forward(usize),
    /// Multi-target reverse field: value(n) = min over targets of d_c(n, t).
    Reverse(Vec<usize>),
}

/// Shortest-path values in ticks with backpointers.
///
/// For forward fields the backpointer at `n` is the edge *into* `n` on an
/// optimal path from the source; for reverse fields it is the edge *out of*
/// `n` toward the nearest target.
#[derive(Debug, Clone)]
pub struct CostField {
    pub source: SourceSpec,
    pub ticks: Vec<u64>,
    pub backpointer: Vec<Option<(u32, u16, u64)>>,
}

impl CostField {
    pub fn value(&self, node: usize) -> f64 {
        cost::to_cost(self.ticks[node])
    }
}

/// Default primitive duration: long enough for the slowest sampled motion to
/// escape a cell, capped at three cells for the fastest.
pub fn default_tau(system: &ControlSystem, lattice: &Lattice) -> f64 {
    let center: Vec<f64> = lattice
        .scene
        .bounds
        .iter()
        .map(|&(lo, hi)| 0.5 * (lo + hi))
        .collect();
    let mut v = vec![0.0; system.state_dim];
    let mut vmin = f64::INFINITY;
    let mut vmax: f64 = 0.0;
    for u in &system.control_samples {
        system.velocity(&center, u, &mut v);
        let n = space::norm(&v);
        if n > 1e-9 {
            vmin = vmin.min(n);
        }
        vmax = vmax.max(n);
    }
    let h = lattice.spacing.iter().cloned().fold(0.0f64, f64::max);
    if !vmin.is_finite() || vmax == 0.0 {
        return h;
    }
    (h / (0.8 * vmin)).clamp(h / vmax, 3.0 * h / vmax)
}

/// Result of integrating one motion primitive.
struct PrimitiveOutcome {
    end: Vec<f64>,
    cost: f64,
    /// First obstacle-contact point and the cost accumulated up to it,
    /// present when a sub-sample entered the obstacle interior. The primitive
    /// is then truncated at the contact: the discrete boundary sits up to one
    /// cell inside the obstacle, so stopping on it means grazing the interior
    /// by O(h), while continuing to the endpoint could carry the state past
    /// the contact face. Callers must redirect the edge to the contact point
    /// and accept it only when that point snaps to a BOUNDARY node.
    contact: Option<(Vec<f64>, f64)>,
    /// True when every sub-sample from the first obstacle contact onward
    /// stayed in the obstacle (no free-space gap before the interior entry).
    contact_suffix: bool,
}

/// Integrate one primitive with collision sub-sampling. Returns `None` when
/// the path re-emerges into free space after entering the obstacle interior
/// (tunneling). Grazing the obstacle without entering its interior (sliding
/// along a face) is admissible and keeps the full endpoint.
fn integrate_primitive(
    system: &ControlSystem,
    lattice: &Lattice,
    x0: &[f64],
    u: &[f64],
    tau: f64,
    substeps: usize,
    scratch: &mut RkScratch,
) -> Option<PrimitiveOutcome> {
    let mut x = x0.to_vec();
    let mut c = 0.0;
    let dt = tau / substeps as f64;
    let mut first_member: Option<(Vec<f64>, f64)> = None;
    let mut interior = false;
    let mut gap = false;
    for _ in 0..substeps {
        system.step_rk4_with(&mut x, u, dt, &mut c, scratch);
        let member = lattice.scene.obstacle_member(&x);
        if interior && !member {
            return None;
        }
        match (member, &first_member) {
            (true, None) => first_member = Some((x.clone(), c)),
            (false, Some(_)) => gap = true,
            _ => {}
        }
        if lattice.scene.obstacle_interior(&x) {
            interior = true;
        }
    }
    Some(PrimitiveOutcome {
        end: x,
        cost: c,
        contact: if interior { first_member } else { None },
        contact_suffix: interior && !gap,
    })
}

/// Build the primitive graph: integrate every control from every free or
/// boundary node for duration `tau`, snap, and keep collision-free edges to
/// distinct endpoints (cheapest control per endpoint).
pub fn build_graph(system: &ControlSystem, lattice: &Lattice, tau: f64) -> Result<PrimitiveGraph> {
    if tau <= 0.0 {
        return Err(Error::Config("primitive duration must be positive".into()));
    }
    let n = lattice.node_count();
    let out: Vec<Vec<Edge>> = (0..n)
        .into_par_iter()
        .map_init(
            || RkScratch::new(system.state_dim),
            |scratch, id| {
                if lattice.class(id) == NodeClass::ObstacleInterior {
                    return Vec::new();
                }
                let x0 = lattice.coords(id);
                let mut edges: Vec<Edge> = Vec::new();
                for (ci, u) in system.control_samples.iter().enumerate() {
                    let Some(prim) = integrate_primitive(
                        system,
                        lattice,
                        &x0,
                        u,
                        tau,
                        COLLISION_SUBSTEPS,
                        scratch,
                    ) else {
                        continue;
                    };
                    // Contact primitives stop at the first obstacle contact
                    // and are only taken from free nodes: from a node already
                    // on the boundary they would chain into crust-sliding
                    // paths with no continuous analogue.
                    let (target, c) = match &prim.contact {
                        None => (lattice.snap(&prim.end), prim.cost),
                        Some((point, cost)) => {
                            if lattice.class(id) != NodeClass::Free {
                                continue;
                            }
                            let t = lattice.snap(point);
                            if lattice.class(t) == NodeClass::Boundary && t != id {
                                (t, *cost)
                            } else if prim.contact_suffix {
                                // The contact point has no usable node (it
                                // snaps to the source or a free node, which
                                // happens when the obstacle face runs through
                                // grid nodes). Fall back to the endpoint if
                                // the path stayed in the obstacle and ends on
                                // the discrete boundary.
                                let t = lattice.snap(&prim.end);
                                if lattice.class(t) != NodeClass::Boundary {
                                    continue;
                                }
                                (t, prim.cost)
                            } else {
                                continue;
                            }
                        }
                    };
                    if target == id || lattice.class(target) == NodeClass::ObstacleInterior {
                        continue;
                    }
                    let cost_ticks = cost::to_ticks(c).max(1);
                    match edges.iter_mut().find(|e| e.target as usize == target) {
                        Some(e) if cost_ticks < e.cost_ticks => {
                            e.control = ci as u16;
                            e.cost_ticks = cost_ticks;
                        }
                        Some(_) => {}
                        None => edges.push(Edge {
                            target: target as u32,
                            control: ci as u16,
                            cost_ticks,
                        }),
                    }
                }
                edges
            },
        )
        .collect();

    if out.iter().all(Vec::is_empty) {
        return Err(Error::DegenerateGraph(
            "no primitives survived; duration too small or scene fully blocked".into(),
        ));
    }

    let mut rin: Vec<Vec<InEdge>> = vec![Vec::new(); n];
    for (src, edges) in out.iter().enumerate() {
        for e in edges {
            rin[e.target as usize].push(InEdge {
                source: src as u32,
                control: e.control,
                cost_ticks: e.cost_ticks,
            });
        }
    }

    Ok(PrimitiveGraph {
        system: system.clone(),
        primitive_duration: tau,
        collision_substeps: COLLISION_SUBSTEPS,
        out,
        rin,
    })
}

/// Sequential Dijkstra with ties broken by node id. `seeds` get value 0;
/// `neighbors` yields (neighbor, edge payload) pairs for relaxation.
fn dijkstra<F>(n: usize, seeds: &[usize], mut neighbors: F) -> (Vec<u64>, Vec<Option<(u32, u16, u64)>>)
where
    F: FnMut(usize, &mut dyn FnMut(usize, u16, u64)),
{
    let mut ticks = vec![INF; n];
    let mut bp: Vec<Option<(u32, u16, u64)>> = vec![None; n];
    let mut heap = BinaryHeap::new();
    for &s in seeds {
        ticks[s] = 0;
        heap.push(Reverse((0u64, s)));
    }
    while let Some(Reverse((d, node))) = heap.pop() {
        if d > ticks[node] {
            continue;
        }
        neighbors(node, &mut |nb, control, cost| {
            let cand = d + cost;
            if cand < ticks[nb] {
                ticks[nb] = cand;
                bp[nb] = Some((node as u32, control, cost));
                heap.push(Reverse((cand, nb)));
            }
        });
    }
    (ticks, bp)
}

/// Multi-source forward distances: min over seeds s of d_c(s, n), in ticks.
pub fn multi_source_forward(graph: &PrimitiveGraph, n: usize, seeds: &[usize]) -> Vec<u64> {
    let (ticks, _) = dijkstra(n, seeds, |node, relax| {
        for e in &graph.out[node] {
            relax(e.target as usize, e.control, e.cost_ticks);
        }
    });
    ticks
}

/// Forward cost field from a state: value(n) = discrete d_c(x, n).
pub fn cost_from(graph: &PrimitiveGraph, lattice: &Lattice, x: &[f64]) -> Result<CostField> {
    let src = lattice.snap(x);
    if lattice.class(src) == NodeClass::ObstacleInterior {
        return Err(Error::InvalidSource(format!(
            "state snaps to obstacle-interior node {src}"
        )));
    }
    let (ticks, bp) = dijkstra(lattice.node_count(), &[src], |node, relax| {
        for e in &graph.out[node] {
            relax(e.target as usize, e.control, e.cost_ticks);
        }
    });
    Ok(CostField {
        source: SourceSpec::Forward(src),
        ticks,
        backpointer: bp,
    })
}

/// Reverse cost field: value(n) = min over targets of discrete d_c(n, t).
pub fn cost_to(graph: &PrimitiveGraph, lattice: &Lattice, targets: &[usize]) -> Result<CostField> {
    if targets.is_empty() {
        return Err(Error::InvalidTarget("empty target set".into()));
    }
    let (ticks, bp) = dijkstra(lattice.node_count(), targets, |node, relax| {
        for e in &graph.rin[node] {
            relax(e.source as usize, e.control, e.cost_ticks);
        }
    });
    Ok(CostField {
        source: SourceSpec::Reverse(targets.to_vec()),
        ticks,
        backpointer: bp,
    })
}

/// Strict sublevel set `{n : value(n) < rho}`.
pub fn reachable_set(field: &CostField, rho: f64) -> Vec<usize> {
    let bound = cost::to_ticks(rho);
    (0..field.ticks.len())
        .filter(|&n| field.ticks[n] < bound)
        .collect()
}

/// Node chain of the optimal path through `endpoint`: source → endpoint for
/// forward fields, endpoint → target for reverse fields. Entries are
/// (node, control-into-or-out, cumulative ticks at that node).
pub fn node_chain(field: &CostField, endpoint: usize) -> Result<Vec<(usize, Option<u16>, u64)>> {
    if field.ticks[endpoint] == INF {
        return Err(Error::NoPath);
    }
    match &field.source {
        SourceSpec::Forward(_) => {
            let mut chain = Vec::new();
            let mut node = endpoint;
            let mut control = None;
            loop {
                chain.push((node, control, field.ticks[node]));
                match field.backpointer[node] {
                    Some((prev, c, _)) => {
                        control = Some(c);
                        node = prev as usize;
                    }
                    None => break,
                }
            }
            // Each entry's control labels the edge leaving that node; the
            // endpoint keeps `None`.
            chain.reverse();
            Ok(chain)
        }
        SourceSpec::Reverse(_) => {
            let mut chain = Vec::new();
            let mut node = endpoint;
            loop {
                match field.backpointer[node] {
                    Some((next, c, _)) => {
                        chain.push((node, Some(c), field.ticks[node]));
                        node = next as usize;
                    }
                    None => {
                        chain.push((node, None, field.ticks[node]));
                        break;
                    }
                }
            }
            Ok(chain)
        }
    }
}

/// Convert the optimal path through `endpoint` into a trajectory whose cost
/// equals the field value exactly (in ticks).
pub fn extract_trajectory(
    field: &CostField,
    graph: &PrimitiveGraph,
    lattice: &Lattice,
    endpoint: usize,
) -> Result<Trajectory> {
    let chain = node_chain(field, endpoint)?;
    let tau = graph.primitive_duration;
    let total_ticks = field.ticks[endpoint];
    let zero_control = vec![0.0; graph.system.control_samples[0].len()];
    let samples: Vec<TrajectorySample> = chain
        .iter()
        .enumerate()
        .map(|(k, &(node, control, _))| TrajectorySample {
            time: k as f64 * tau,
            state: lattice.coords(node),
            control: control
                .map(|c| graph.system.control_samples[c as usize].clone())
                .unwrap_or_else(|| zero_control.clone()),
        })
        .collect();
    let duration = (samples.len() - 1) as f64 * tau;
    Ok(Trajectory {
        samples,
        total_cost: cost::to_cost(total_ticks),
        duration,
        cost_ticks: Some(total_ticks),
    })
}

/// Symmetric Hausdorff distance between two node sets in the state metric.
pub fn hausdorff_distance(lattice: &Lattice, a: &[usize], b: &[usize]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    let coords = |set: &[usize]| -> Vec<Vec<f64>> {
        set.iter().map(|&n| lattice.coords(n)).collect()
    };
    let ca = coords(a);
    let cb = coords(b);
    let directed = |from: &[Vec<f64>], to: &[Vec<f64>]| -> f64 {
        from.par_iter()
            .map(|p| {
                to.iter()
                    .map(|q| space::distance(&lattice.axis_topology, p, q))
                    .fold(f64::INFINITY, f64::min)
            })
            .reduce(|| 0.0, f64::max)
    };
    Ok(directed(&ca, &cb).max(directed(&cb, &ca)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{build_lattice, builtin_scene};
    use crate::systems::builtin_system;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn corner_setup() -> (ControlSystem, Lattice, PrimitiveGraph) {
        let sys = builtin_system("galaga").unwrap();
        let scene = builtin_scene("galaga-corner").unwrap();
        let lat = build_lattice(&scene, &[0.05, 0.05]).unwrap();
        let graph = build_graph(&sys, &lat, 0.05).unwrap();
        (sys, lat, graph)
    }

    #[test]
    fn straight_up_edge_exists() {
        let (_, lat, graph) = corner_setup();
        let a = lat.snap(&[-0.5, -1.0]);
        let b = lat.snap(&[-0.5, -0.95]);
        let e = graph.out[a].iter().find(|e| e.target as usize == b).unwrap();
        assert!((cost::to_cost(e.cost_ticks) - 0.05).abs() < 1e-9);
    }

    #[test]
    fn edges_are_distinct_snapped_endpoints() {
        let (_, lat, graph) = corner_setup();
        let deep = lat.snap(&[-0.5, -1.0]);
        let mut targets: Vec<u32> = graph.out[deep].iter().map(|e| e.target).collect();
        targets.sort_unstable();
        targets.dedup();
        assert_eq!(targets.len(), graph.out[deep].len());
        assert!(!graph.out[deep].is_empty());
    }

    #[test]
    fn no_edge_enters_left_wall() {
        let (_, lat, graph) = corner_setup();
        let near_wall = lat.snap(&[-0.98, -0.5]);
        for e in &graph.out[near_wall] {
            let c = lat.coords(e.target as usize);
            assert!(!(c[0] < -1.0 && c[1] < 0.0), "edge into wall at {c:?}");
        }
    }

    #[test]
    fn forward_field_basics() {
        let (_, lat, graph) = corner_setup();
        let field = cost_from(&graph, &lat, &[-0.5, -1.0]).unwrap();
        let src = lat.snap(&[-0.5, -1.0]);
        assert_eq!(field.ticks[src], 0);
        let z = lat.snap(&[-0.5, 0.0]);
        assert!((field.value(z) - 1.0).abs() < 0.1);
    }

    #[test]
    fn asymmetry_witnessed() {
        let (_, lat, graph) = corner_setup();
        let up = cost_from(&graph, &lat, &[-0.5, -1.0]).unwrap();
        let down = cost_from(&graph, &lat, &[-0.5, 0.0]).unwrap();
        assert!(up.ticks[lat.snap(&[-0.5, 0.0])] < INF);
        assert_eq!(down.ticks[lat.snap(&[-0.5, -1.0])], INF);
    }

    #[test]
    fn invalid_source_in_obstacle() {
        let (_, lat, graph) = corner_setup();
        assert!(matches!(
            cost_from(&graph, &lat, &[-3.0, -1.0]),
            Err(Error::InvalidSource(_))
        ));
        assert!(matches!(
            cost_to(&graph, &lat, &[]),
            Err(Error::InvalidTarget(_))
        ));
    }

    /// Independent oracle: enumerate all control schedules of up to three
    /// primitives by direct integration + snapping, and compare with the
    /// Dijkstra sublevel set at rho = 0.2 (paths cost 0.05 per primitive, so
    /// cost < 0.2 means at most three primitives).
    #[test]
    fn forward_set_matches_schedule_enumeration() {
        let (sys, lat, graph) = corner_setup();
        let field = cost_from(&graph, &lat, &[-0.5, -1.0]).unwrap();
        let got = reachable_set(&field, 0.2);

        let mut expect = std::collections::BTreeSet::new();
        let src = lat.snap(&[-0.5, -1.0]);
        let mut scratch = RkScratch::new(2);
        let mut frontier = vec![src];
        expect.insert(src);
        for _depth in 0..3 {
            let mut next = Vec::new();
            for &node in &frontier {
                let x0 = lat.coords(node);
                for u in &sys.control_samples {
    if let Some(prim) = integrate_primitive(
                        &sys, &lat, &x0, u, 0.05, COLLISION_SUBSTEPS, &mut scratch,
                    ) {
                        let t = match &prim.contact {
                            None => lat.snap(&prim.end),
                            Some((point, _)) => {
                                if lat.class(node) != NodeClass::Free {
                                    continue;
                                }
                                let t1 = lat.snap(point);
                                if lat.class(t1) == NodeClass::Boundary && t1 != node {
                                    t1
                                } else if prim.contact_suffix
                                    && lat.class(lat.snap(&prim.end)) == NodeClass::Boundary
                                {
                                    lat.snap(&prim.end)
                                } else {
                                    continue;
                                }
                            }
                        };
                        if t != node
                            && lat.class(t) != NodeClass::ObstacleInterior
                            && expect.insert(t)
                        {
                            next.push(t);
                        }
                    }
                }
            }
            frontier = next;
        }
        let got: std::collections::BTreeSet<usize> = got.into_iter().collect();
        assert_eq!(got, expect);

        // Triangle geometry of the forward cone.
        for &n in &got {
            let c = lat.coords(n);
            assert!(c[1] >= -1.0 - 1e-9 && c[1] < -0.8 + 0.06);
            assert!((c[0] + 0.5).abs() <= (c[1] + 1.0) + 0.06);
        }
    }

    #[test]
    fn tiny_radius_reaches_only_source() {
        let (_, lat, graph) = corner_setup();
        let field = cost_from(&graph, &lat, &[-0.5, -1.0]).unwrap();
        let set = reachable_set(&field, 0.04);
        assert_eq!(set, vec![lat.snap(&[-0.5, -1.0])]);
    }

    #[test]
    fn nesting() {
        let (_, lat, graph) = corner_setup();
        let field = cost_from(&graph, &lat, &[-0.5, -1.0]).unwrap();
        let small: std::collections::BTreeSet<_> =
            reachable_set(&field, 0.1).into_iter().collect();
        let large: std::collections::BTreeSet<_> =
            reachable_set(&field, 0.2).into_iter().collect();
        assert!(small.is_subset(&large));
    }

    #[test]
    fn reverse_field_clearance_values() {
        let (_, lat, graph) = corner_setup();
        let targets = lat.boundary_nodes();
        let field = cost_to(&graph, &lat, &targets).unwrap();
        assert!((field.value(lat.snap(&[-0.5, -1.0])) - 0.5).abs() < 0.1);
        assert_eq!(field.ticks[targets[0]], 0);
    }

    #[test]
    fn extracted_prefixes_are_optimal() {
        let (_, lat, graph) = corner_setup();
        let field = cost_from(&graph, &lat, &[-0.5, -1.0]).unwrap();
        let end = lat.snap(&[-0.5, 0.0]);
        let chain = node_chain(&field, end).unwrap();
        // Cumulative ticks at every chain node must equal the field value
        // exactly (Bellman prefix optimality).
        let mut acc = 0u64;
        for (i, &(node, _, t)) in chain.iter().enumerate() {
            assert_eq!(t, field.ticks[node]);
            assert_eq!(t, acc);
            if i + 1 < chain.len() {
                let (next, control, _) = chain[i + 1];
                let edge = graph.out[node]
                    .iter()
                    .find(|e| e.target as usize == next)
                    .unwrap();
                let _ = control;
                acc += edge.cost_ticks;
            }
        }
        let traj = extract_trajectory(&field, &graph, &lat, end).unwrap();
        assert_eq!(traj.cost_ticks, Some(field.ticks[end]));
        let src_traj = extract_trajectory(&field, &graph, &lat, lat.snap(&[-0.5, -1.0])).unwrap();
        assert_eq!(src_traj.duration, 0.0);
    }

    #[test]
    fn quasi_metric_axioms_random_triples() {
        let (_, lat, graph) = corner_setup();
        let free: Vec<usize> = (0..lat.node_count())
            .filter(|&n| lat.class(n) == NodeClass::Free)
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let a = free[rng.gen_range(0..free.len())];
            let fa = cost_from(&graph, &lat, &lat.coords(a)).unwrap();
            let b = free[rng.gen_range(0..free.len())];
            let c = free[rng.gen_range(0..free.len())];
            let fb = cost_from(&graph, &lat, &lat.coords(b)).unwrap();
            if fa.ticks[b] < INF && fb.ticks[c] < INF {
                assert!(fa.ticks[c] <= fa.ticks[b] + fb.ticks[c]);
            }
        }
    }

    #[test]
    fn hausdorff_basics() {
        let (_, lat, _) = corner_setup();
        let a = lat.snap(&[0.0, 0.0]);
        let b = lat.snap(&[0.0, 1.0]);
        assert_eq!(hausdorff_distance(&lat, &[a, b], &[a, b]).unwrap(), 0.0);
        let d = hausdorff_distance(&lat, &[a], &[a, b]).unwrap();
        assert!((d - 1.0).abs() < 1e-9);
        assert!(matches!(hausdorff_distance(&lat, &[], &[a]), Err(Error::EmptySet)));
    }

    #[test]
    fn forward_sets_contract_in_delta() {
        let (_, lat, graph) = corner_setup();
        let field = cost_from(&graph, &lat, &[-0.5, -1.0]).unwrap();
        let base = reachable_set(&field, 0.4);
        let mut last = f64::INFINITY;
        for delta in [0.2, 0.1, 0.05] {
            let grown = reachable_set(&field, 0.4 + delta);
            let d = hausdorff_distance(&lat, &base, &grown).unwrap();
            assert!(d <= last + 1e-9);
            last = d;
        }
    }

    #[test]
    fn default_tau_sane() {
        let sys = builtin_system("galaga").unwrap();
        let scene = builtin_scene("galaga-corner").unwrap();
        let lat = build_lattice(&scene, &[0.05, 0.05]).unwrap();
        let tau = default_tau(&sys, &lat);
        assert!(tau > 0.0 && tau <= 3.0 * 0.05 / 1.0 + 1e-9);
    }
}
