//! Clearance field, witness map, propagating waves, and the envelope map.
//!
//! Clearance is the multi-source reverse cost field to the discrete obstacle
//! boundary. The envelope map compares each free node's clearance with the
//! max over its free face-neighbors; a jump above the threshold kappa marks
//! the node as an envelope (clearance-discontinuity) candidate.

use rayon::prelude::*;

use crate::cost::{self, INF};
use crate::error::{Error, Result};
use crate::reach::{self, CostField, PrimitiveGraph};
use crate::scene::{Lattice, NodeClass};
use crate::space;
use crate::systems::min_hamiltonian;

#[derive(Debug, Clone)]
pub struct ClearanceField {
    /// Reverse cost field to all BOUNDARY nodes.
    pub field: CostField,
    /// Terminal boundary node of each backpointer chain.
    pub witness: Vec<Option<u32>>,
}

impl ClearanceField {
    pub fn clr_ticks(&self, node: usize) -> u64 {
        self.field.ticks[node]
    }

    pub fn clr(&self, node: usize) -> f64 {
        self.field.value(node)
    }
}

#[derive(Debug, Clone)]
pub struct EnvelopeMap {
    pub kappa: f64,
    /// First wave arrival: clearance, in ticks.
    pub rho_min: Vec<u64>,
    /// Last arrival proxy: max clearance over the node and its free
    /// face-neighbors, in ticks (infinity propagates).
    pub rho_max: Vec<u64>,
    /// Local clearance oscillation rho_max - rho_min (diagnostic).
    pub jump: Vec<u64>,
    /// Envelope flag: free, not boundary-adjacent, jump above kappa.
    pub envelope: Vec<bool>,
    /// Free nodes touching BOUNDARY whose jump exceeds kappa; the stencil
    /// mixes obstacle and free-space discontinuities there, so membership is
    /// reported separately rather than decided.
    pub boundary_adjacent: Vec<bool>,
}

/// Clearance of every node: reverse shortest path to the BOUNDARY node set,
/// with witnesses read off the backpointer chains.
pub fn clearance_field(graph: &PrimitiveGraph, lattice: &Lattice) -> Result<ClearanceField> {
    let targets = lattice.boundary_nodes();
    if targets.is_empty() {
        return Err(Error::NoObstacle);
    }
    let field = reach::cost_to(graph, lattice, &targets)?;

    // Propagate witnesses in order of increasing value so each node can copy
    // from its successor.
    let mut witness: Vec<Option<u32>> = vec![None; lattice.node_count()];
    let mut order: Vec<usize> = (0..lattice.node_count())
        .filter(|&n| field.ticks[n] < INF)
        .collect();
    order.sort_unstable_by_key(|&n| (field.ticks[n], n));
    for &n in &order {
        witness[n] = match field.backpointer[n] {
            Some((next, _, _)) => witness[next as usize],
            None => Some(n as u32),
        };
    }
    Ok(ClearanceField { field, witness })
}

/// Propagating wave: free nodes with clearance strictly below rho.
pub fn wave(cf: &ClearanceField, lattice: &Lattice, rho: f64) -> Vec<usize> {
    let bound = cost::to_ticks(rho);
    (0..lattice.node_count())
        .filter(|&n| lattice.class(n) == NodeClass::Free && cf.field.ticks[n] < bound)
        .collect()
}

/// Default jump threshold: 4 h psi_max M_max / h0_est, where the constants
/// are sampled over free nodes and a direction fan. Separates the O(h) local
/// oscillation of a Lipschitz clearance from resolution-persistent jumps.
pub fn default_kappa(graph: &PrimitiveGraph, lattice: &Lattice) -> f64 {
    let sys = &graph.system;
    let free: Vec<usize> = (0..lattice.node_count())
        .filter(|&n| lattice.class(n) == NodeClass::Free)
        .collect();
    let stride = (free.len() / 50).max(1);
    let mut v = vec![0.0; sys.state_dim];
    let mut psi_max = 0.0f64;
    let mut m_max = 0.0f64;
    for &n in free.iter().step_by(stride) {
        let x = lattice.coords(n);
        for u in &sys.control_samples {
            sys.velocity(&x, u, &mut v);
            m_max = m_max.max(space::norm(&v));
            psi_max = psi_max.max(sys.running_cost(&x, &v));
        }
    }
    let center: Vec<f64> = lattice
        .scene
        .bounds
        .iter()
        .map(|&(lo, hi)| 0.5 * (lo + hi))
        .collect();
    let h0_est = space::direction_fan(sys.state_dim, 64)
        .iter()
        .map(|xi| min_hamiltonian(sys, &center, xi))
        .fold(0.0f64, f64::max)
        .max(0.1 * m_max);
    let h = lattice.spacing.iter().cloned().fold(0.0f64, f64::max);
    4.0 * h * psi_max * m_max / h0_est
}

/// Envelope extraction: one-ring max stencil on the clearance field.
pub fn envelope(cf: &ClearanceField, lattice: &Lattice, kappa: f64) -> EnvelopeMap {
    let kappa_ticks = cost::to_ticks(kappa);
    let n = lattice.node_count();
    let rho_min: Vec<u64> = cf.field.ticks.clone();
    let per_node: Vec<(u64, bool)> = (0..n)
        .into_par_iter()
        .map(|id| {
            if lattice.class(id) != NodeClass::Free {
                return (rho_min[id], false);
            }
            let mut hi = rho_min[id];
            let mut touches_boundary = false;
            for nb in lattice.face_neighbors(id) {
                match lattice.class(nb) {
                    NodeClass::Free => hi = hi.max(cf.field.ticks[nb]),
                    NodeClass::Boundary => touches_boundary = true,
                    NodeClass::ObstacleInterior => {}
                }
            }
            (hi, touches_boundary)
        })
        .collect();
    let rho_max: Vec<u64> = per_node.iter().map(|&(hi, _)| hi).collect();
    let jump: Vec<u64> = (0..n)
        .map(|id| {
            if rho_max[id] == INF && rho_min[id] < INF {
                INF
            } else if rho_max[id] == INF {
                0
            } else {
                rho_max[id] - rho_min[id]
            }
        })
        .collect();
    let mut envelope = vec![false; n];
    let mut boundary_adjacent = vec![false; n];
    for id in 0..n {
        if lattice.class(id) != NodeClass::Free || rho_min[id] == INF {
            continue;
        }
        let flagged = jump[id] > kappa_ticks;
        if flagged {
            if per_node[id].1 {
                boundary_adjacent[id] = true;
            } else {
                envelope[id] = true;
            }
        }
    }
    EnvelopeMap {
        kappa,
        rho_min,
        rho_max,
        jump,
        envelope,
        boundary_adjacent,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reach::{build_graph, cost_from};
    use crate::scene::{build_lattice, builtin_scene, Region, Scene};
    use crate::space::Axis;
    use crate::systems::builtin_system;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn corner() -> (Lattice, PrimitiveGraph, ClearanceField) {
        let sys = builtin_system("galaga").unwrap();
        let scene = builtin_scene("galaga-corner").unwrap();
        let lat = build_lattice(&scene, &[0.05, 0.05]).unwrap();
        let graph = build_graph(&sys, &lat, 0.05).unwrap();
        let cf = clearance_field(&graph, &lat).unwrap();
        (lat, graph, cf)
    }

    #[test]
    fn corner_clearances_and_witnesses() {
        let (lat, _, cf) = corner();
        let x = lat.snap(&[-0.5, -1.0]);
        assert!((cf.clr(x) - 0.5).abs() < 0.1);
        let wx = lat.coords(cf.witness[x].unwrap() as usize);
        assert!(space::distance(&lat.axis_topology, &wx, &[-1.0, -0.5]) <= 0.1 + 1e-9);

        let z = lat.snap(&[-0.5, 0.0]);
        assert!((cf.clr(z) - 2.5).abs() < 0.15);
        let wz = lat.coords(cf.witness[z].unwrap() as usize);
        assert!(space::distance(&lat.axis_topology, &wz, &[2.0, 2.5]) <= 0.1 + 1e-9);
    }

    #[test]
    fn clr_zero_exactly_on_boundary_targets() {
        let (lat, _, cf) = corner();
        for &b in &lat.boundary_nodes() {
            assert_eq!(cf.clr_ticks(b), 0);
            assert_eq!(cf.witness[b], Some(b as u32));
        }
    }

    #[test]
    fn slant_clearance_closed_form() {
        // Closed form for the slanted wall: from z = (-1/2, 2) the nearest
        // obstacle contact is the slant line 2 x1 + x2 = -2, reached by the
        // full-left control in time 3 at (-3.5, 5); descent being impossible,
        // no cheaper contact exists.
        let sys = builtin_system("galaga").unwrap();
        let scene = builtin_scene("galaga-slant").unwrap();
        let lat = build_lattice(&scene, &[0.05, 0.05]).unwrap();
        let graph = build_graph(&sys, &lat, 0.05).unwrap();
        let cf = clearance_field(&graph, &lat).unwrap();
        let z = lat.snap(&[-0.5, 2.0]);
        assert!((cf.clr(z) - 3.0).abs() < 0.15, "clr = {}", cf.clr(z));
        let w = lat.coords(cf.witness[z].unwrap() as usize);
        assert!(space::distance(&lat.axis_topology, &w, &[-3.5, 5.0]) <= 0.15);
        let x = lat.snap(&[-0.5, -1.0]);
        assert!((cf.clr(x) - 0.5).abs() < 0.1);
    }

    #[test]
    fn wave_membership_and_nesting() {
        let (lat, _, cf) = corner();
        let w = wave(&cf, &lat, 0.25);
        assert!(w.contains(&lat.snap(&[-0.9, -1.0])));
        assert!(!w.contains(&lat.snap(&[-0.5, -1.0])));
        let w2 = wave(&cf, &lat, 0.6);
        let small: std::collections::BTreeSet<_> = w.into_iter().collect();
        let large: std::collections::BTreeSet<_> = w2.into_iter().collect();
        assert!(small.is_subset(&large));
        // Below the cheapest positive clearance the wave is empty.
        assert!(wave(&cf, &lat, 0.04).is_empty());
    }

    #[test]
    fn wave_equals_sublevel_set() {
        let (lat, _, cf) = corner();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let rho = rng.gen_range(0.05..3.0);
            let w: Vec<usize> = wave(&cf, &lat, rho);
            for &n in &w {
                assert!(cf.clr_ticks(n) < cost::to_ticks(rho));
            }
            let count = (0..lat.node_count())
                .filter(|&n| {
                    lat.class(n) == NodeClass::Free && cf.clr_ticks(n) < cost::to_ticks(rho)
                })
                .count();
            assert_eq!(w.len(), count);
        }
    }

    #[test]
    fn rho_min_is_clearance_exactly() {
        let (lat, graph, cf) = corner();
        let em = envelope(&cf, &lat, default_kappa(&graph, &lat));
        for n in 0..lat.node_count() {
            if lat.class(n) == NodeClass::Free {
                assert_eq!(em.rho_min[n], cf.clr_ticks(n));
            }
        }
    }

    #[test]
    fn envelope_on_corner_segment() {
        let (lat, graph, cf) = corner();
        let kappa = default_kappa(&graph, &lat);
        assert!((kappa - 0.283).abs() < 0.02, "kappa = {kappa}");
        let em = envelope(&cf, &lat, kappa);
        assert!(em.envelope[lat.snap(&[-0.5, -0.5])]);
        // Low-clearance flags concentrate on the diagonal segment
        // x1 + x2 = -1, -1 <= x1 <= 1/2.
        let h = 0.05;
        for n in 0..lat.node_count() {
            if em.envelope[n] && cf.clr(n) < 1.4 {
                let c = lat.coords(n);
                let on_seg = (c[0] + c[1] + 1.0).abs() <= 2.0 * h + 1e-9
                    && c[0] >= -1.0 - 2.0 * h
                    && c[0] <= 0.5 + 2.0 * h;
                assert!(on_seg, "off-segment envelope node at {c:?}");
            }
        }
        // Deep free-space nodes with locally Lipschitz clearance stay clear.
        assert!(!em.envelope[lat.snap(&[1.0, -2.0])]);
    }

    #[test]
    fn envelope_symmetric_for_symmetric_scene() {
        // Two walls at x1 <= -1 and x1 >= 1 below x2 = 0, symmetric in x1.
        let dim = 2;
        let free = Region::Union(vec![
            Region::Inter(vec![
                Region::above(0, dim, -1.0, true),
                Region::below(0, dim, 1.0, true),
                Region::below(1, dim, 0.0, false),
            ]),
            Region::Inter(vec![
                Region::above(0, dim, -3.0, true),
                Region::below(0, dim, 3.0, true),
                Region::above(1, dim, 0.0, true),
            ]),
        ]);
        let scene = Scene {
            name: "two-wall".into(),
            bounds: vec![(-4.0, 4.0), (-2.0, 2.0)],
            axis_topology: vec![Axis::Line; 2],
            obstacle: Arc::new(Region::Complement(Box::new(free))),
        };
        let sys = builtin_system("galaga").unwrap();
        let lat = build_lattice(&scene, &[0.05, 0.05]).unwrap();
        let graph = build_graph(&sys, &lat, 0.05).unwrap();
        let cf = clearance_field(&graph, &lat).unwrap();
        let em = envelope(&cf, &lat, default_kappa(&graph, &lat));
        for n in 0..lat.node_count() {
            if !em.envelope[n] {
                continue;
            }
            let c = lat.coords(n);
            let mirrored = lat.snap(&[-c[0], c[1]]);
            assert!(
                em.envelope[mirrored],
                "envelope not mirror-symmetric at {c:?}"
            );
        }
    }

    #[test]
    fn clearance_distance_bound() {
        let (lat, graph, cf) = corner();
        let free: Vec<usize> = (0..lat.node_count())
            .filter(|&n| lat.class(n) == NodeClass::Free)
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let a = free[rng.gen_range(0..free.len())];
            let fa = cost_from(&graph, &lat, &lat.coords(a)).unwrap();
            for _ in 0..10 {
                let b = free[rng.gen_range(0..free.len())];
                if fa.ticks[b] < INF && cf.clr_ticks(b) < INF && cf.clr_ticks(a) < INF {
                    // Reaching the obstacle through b bounds clearance at a.
                    assert!(cf.clr_ticks(a) <= fa.ticks[b] + cf.clr_ticks(b));
                }
            }
        }
    }

    #[test]
    fn no_boundary_means_no_obstacle_error() {
        let scene = Scene {
            name: "empty".into(),
            bounds: vec![(-1.0, 1.0), (-1.0, 1.0)],
            axis_topology: vec![Axis::Line; 2],
            obstacle: Arc::new(Region::Inter(vec![
                Region::below(0, 2, -10.0, false),
            ])),
        };
        let sys = builtin_system("galaga").unwrap();
        let lat = build_lattice(&scene, &[0.1, 0.1]).unwrap();
        let graph = build_graph(&sys, &lat, 0.1).unwrap();
        assert!(matches!(
            clearance_field(&graph, &lat),
            Err(Error::NoObstacle)
        ));
    }
}
