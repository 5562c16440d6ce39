//! Obstacle scenes and gridded lattices.
//!
//! A [`Scene`] describes the obstacle set through a small region algebra
//! (half-spaces combined by union/intersection/complement) that can be
//! evaluated as the set itself, its closure, or its interior. A [`Lattice`]
//! grids the scene box and classifies every node as free, obstacle interior,
//! or boundary (obstacle node with a free face-neighbor).

use std::collections::VecDeque;
use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{self, Axis};

/// Environment variable bounding the lattice node count.
pub const MAX_NODES_ENV: &str = "CLEARFIELD_MAX_NODES";
const DEFAULT_MAX_NODES: usize = 4_000_000;

/// A region of state space, closed under the usual set algebra.
///
/// `Halfspace` is `{x : <normal, x> <= offset}` (strict: `<`). Closure and
/// interior are computed structurally: exact for half-spaces and
/// intersections/complements, and for the finite unions in generic position
/// used by the built-in scenes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Region {
    Halfspace {
        normal: Vec<f64>,
        offset: f64,
        strict: bool,
    },
    Union(Vec<Region>),
    Inter(Vec<Region>),
    Complement(Box<Region>),
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Member,
    Closure,
    Interior,
}

impl Region {
    pub fn eval(&self, x: &[f64], mode: Mode) -> bool {
        self.eval_with(x, mode, 0.0)
    }

    /// Evaluate with a tolerance that grows closures and shrinks interiors by
    /// `eps`. Collision checks use a tiny margin so trajectories grazing an
    /// obstacle face that passes exactly through grid points are not lost to
    /// floating-point noise.
    pub fn eval_with(&self, x: &[f64], mode: Mode, eps: f64) -> bool {
        match self {
            Region::Halfspace {
                normal,
                offset,
                strict,
            } => {
                let v = space::dot(normal, x);
                match mode {
                    Mode::Member => {
                        if *strict {
                            v < *offset
                        } else {
                            v <= *offset
                        }
                    }
                    Mode::Closure => v <= *offset + eps,
                    Mode::Interior => v < *offset - eps,
                }
            }
            Region::Union(rs) => rs.iter().any(|r| r.eval_with(x, mode, eps)),
            Region::Inter(rs) => rs.iter().all(|r| r.eval_with(x, mode, eps)),
            Region::Complement(r) => {
                let inner = match mode {
                    Mode::Member => Mode::Member,
                    Mode::Closure => Mode::Interior,
                    Mode::Interior => Mode::Closure,
                };
                !r.eval_with(x, inner, eps)
            }
        }
    }

    /// `{x : x_axis <= c}` (or `<` when strict).
    pub fn below(axis: usize, dim: usize, c: f64, strict: bool) -> Region {
        let mut normal = vec![0.0; dim];
        normal[axis] = 1.0;
        Region::Halfspace {
            normal,
            offset: c,
            strict,
        }
    }

    /// `{x : x_axis >= c}` (or `>` when strict).
    pub fn above(axis: usize, dim: usize, c: f64, strict: bool) -> Region {
        let mut normal = vec![0.0; dim];
        normal[axis] = -1.0;
        Region::Halfspace {
            normal,
            offset: -c,
            strict,
        }
    }
}

/// Obstacle geometry plus the bounding box and per-axis topology used for
/// gridding. The obstacle set is closed; membership is evaluated in closure
/// mode and the open free space is its complement.
#[derive(Debug, Clone)]
pub struct Scene {
    pub name: String,
    pub bounds: Vec<(f64, f64)>,
    pub axis_topology: Vec<Axis>,
    pub obstacle: Arc<Region>,
}

impl Scene {
    // Membership is evaluated in `Member` mode, which is exact; the obstacle
    // set is closed as written. (`Closure` mode is structural and would
    // over-approximate at shared faces of free-space unions.)
    pub fn obstacle_member(&self, x: &[f64]) -> bool {
        self.obstacle.eval(x, Mode::Member)
    }

    pub fn obstacle_interior(&self, x: &[f64]) -> bool {
        self.obstacle.eval_with(x, Mode::Interior, 1e-9)
    }
}

/// Build one of the named example scenes.
pub fn builtin_scene(name: &str) -> Result<Scene> {
    // Obstacles are expressed as the complement of the free set so the
    // strictness of each face matches the free-space definitions.
    let free_to_obstacle = |free: Region| Arc::new(Region::Complement(Box::new(free)));
    match name {
        "galaga-corner" => {
            // Free: (-1,2) x (-inf,0]  U  (-5,2) x (0,inf).
            let free = Region::Union(vec![
                Region::Inter(vec![
                    Region::above(0, 2, -1.0, true),
                    Region::below(0, 2, 2.0, true),
                    Region::below(1, 2, 0.0, false),
                ]),
                Region::Inter(vec![
                    Region::above(0, 2, -5.0, true),
                    Region::below(0, 2, 2.0, true),
                    Region::above(1, 2, 0.0, true),
                ]),
            ]);
            Ok(Scene {
                name: name.into(),
                bounds: vec![(-6.0, 3.0), (-3.0, 4.0)],
                axis_topology: vec![Axis::Line; 2],
                obstacle: free_to_obstacle(free),
            })
        }
        "galaga-slant" => {
            // Free: (-1,inf) x (-inf,0]  U  {x2 > -2 x1 - 2 and x2 > 0}.
            let free = Region::Union(vec![
                Region::Inter(vec![
                    Region::above(0, 2, -1.0, true),
                    Region::below(1, 2, 0.0, false),
                ]),
                Region::Inter(vec![
                    Region::Halfspace {
                        normal: vec![-2.0, -1.0],
                        offset: 2.0,
                        strict: true,
                    },
                    Region::above(1, 2, 0.0, true),
                ]),
            ]);
            Ok(Scene {
                name: name.into(),
                bounds: vec![(-6.0, 4.0), (-3.0, 7.0)],
                axis_topology: vec![Axis::Line; 2],
                obstacle: free_to_obstacle(free),
            })
        }
        "gen-galaga" => {
            // The corner-passage free set extended by a free x3 axis.
            let free = Region::Union(vec![
                Region::Inter(vec![
                    Region::above(0, 3, -1.0, true),
                    Region::below(0, 3, 2.0, true),
                    Region::below(1, 3, 0.0, false),
                ]),
                Region::Inter(vec![
                    Region::above(0, 3, -5.0, true),
                    Region::below(0, 3, 2.0, true),
                    Region::above(1, 3, 0.0, true),
                ]),
            ]);
            Ok(Scene {
                name: name.into(),
                bounds: vec![(-6.0, 3.0), (-3.0, 4.0), (-2.0, 2.0)],
                axis_topology: vec![Axis::Line; 3],
                obstacle: free_to_obstacle(free),
            })
        }
        "dubins-corner" => {
            // Obstacle: (-inf,0] x (-inf,0] x T, stated directly.
            let obstacle = Region::Inter(vec![
                Region::below(0, 3, 0.0, false),
                Region::below(1, 3, 0.0, false),
            ]);
            Ok(Scene {
                name: name.into(),
                bounds: vec![(-1.5, 1.5), (-1.5, 1.5), (-PI, PI)],
                axis_topology: vec![Axis::Line, Axis::Line, Axis::Circle { period: 2.0 * PI }],
                obstacle: Arc::new(obstacle),
            })
        }
        "horiz-corner" => {
            let obstacle = Region::Inter(vec![
                Region::below(0, 2, 0.0, false),
                Region::below(1, 2, 0.0, false),
            ]);
            Ok(Scene {
                name: name.into(),
                bounds: vec![(-1.0, 2.5), (-1.25, 1.25)],
                axis_topology: vec![Axis::Line; 2],
                obstacle: Arc::new(obstacle),
            })
        }
        other => Err(Error::Config(format!("unknown scene `{other}`"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeClass {
    Free,
    ObstacleInterior,
    Boundary,
}

/// Gridded scene with per-node classification.
#[derive(Debug, Clone)]
pub struct Lattice {
    pub scene: Scene,
    pub spacing: Vec<f64>,
    pub shape: Vec<usize>,
    pub node_class: Vec<NodeClass>,
    pub axis_topology: Vec<Axis>,
    strides: Vec<usize>,
}

impl Lattice {
    pub fn node_count(&self) -> usize {
        self.node_class.len()
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn id_of(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.strides)
            .map(|(&i, &s)| i * s)
            .sum()
    }

    pub fn index_of(&self, id: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        let mut rem = id;
        for a in 0..self.dim() {
            idx[a] = rem / self.strides[a];
            rem %= self.strides[a];
        }
        idx
    }

    pub fn coord_axis(&self, axis: usize, i: usize) -> f64 {
        let (lo, hi) = self.scene.bounds[axis];
        if matches!(self.axis_topology[axis], Axis::Line) && i == self.shape[axis] - 1 {
            hi
        } else {
            lo + i as f64 * self.spacing[axis]
        }
    }

    pub fn coords(&self, id: usize) -> Vec<f64> {
        self.index_of(id)
            .iter()
            .enumerate()
            .map(|(a, &i)| self.coord_axis(a, i))
            .collect()
    }

    /// Face-neighbor along `axis` in direction `dir` (−1 or +1); circle axes
    /// wrap, line axes return `None` at box faces.
    pub fn neighbor(&self, id: usize, axis: usize, dir: isize) -> Option<usize> {
        let mut idx = self.index_of(id);
        let n = self.shape[axis];
        match self.axis_topology[axis] {
            Axis::Line => {
                let ni = idx[axis] as isize + dir;
                if ni < 0 || ni >= n as isize {
                    return None;
                }
                idx[axis] = ni as usize;
            }
            Axis::Circle { .. } => {
                idx[axis] = (idx[axis] + n).wrapping_add_signed(dir) % n;
            }
        }
        Some(self.id_of(&idx))
    }

    pub fn face_neighbors(&self, id: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(2 * self.dim());
        for a in 0..self.dim() {
            for dir in [-1, 1] {
                if let Some(nb) = self.neighbor(id, a, dir) {
                    out.push(nb);
                }
            }
        }
        out
    }

    /// Nearest node to a state (circle axes wrapped first).
    pub fn snap(&self, x: &[f64]) -> usize {
        let mut idx = vec![0; self.dim()];
        for a in 0..self.dim() {
            let (lo, _hi) = self.scene.bounds[a];
            let xa = self.axis_topology[a].wrap(x[a], lo);
            let i = ((xa - lo) / self.spacing[a]).round() as isize;
            let n = self.shape[a] as isize;
            idx[a] = match self.axis_topology[a] {
                Axis::Line => i.clamp(0, n - 1) as usize,
                Axis::Circle { .. } => (i.rem_euclid(n)) as usize,
            };
        }
        self.id_of(&idx)
    }

    pub fn class(&self, id: usize) -> NodeClass {
        self.node_class[id]
    }

    pub fn boundary_nodes(&self) -> Vec<usize> {
        (0..self.node_count())
            .filter(|&n| self.node_class[n] == NodeClass::Boundary)
            .collect()
    }
}

/// Grid the scene box at the given spacing and classify every node. The node
/// count is capped by the `CLEARFIELD_MAX_NODES` environment variable.
pub fn build_lattice(scene: &Scene, spacing: &[f64]) -> Result<Lattice> {
    let cap = std::env::var(MAX_NODES_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MAX_NODES);
    build_lattice_capped(scene, spacing, cap)
}

pub fn build_lattice_capped(scene: &Scene, spacing: &[f64], cap: usize) -> Result<Lattice> {
    let dim = scene.bounds.len();
    if spacing.len() != dim || spacing.iter().any(|&h| h <= 0.0) {
        return Err(Error::Config("spacing must be positive per axis".into()));
    }
    let mut shape = Vec::with_capacity(dim);
    for a in 0..dim {
        let (lo, hi) = scene.bounds[a];
        let h = spacing[a];
        match scene.axis_topology[a] {
            Axis::Line => {
                let n = ((hi - lo) / h).round() as usize + 1;
                shape.push(n.max(2));
            }
            Axis::Circle { period } => {
                let n = (period / h).round();
                if ((period / h) - n).abs() > 1e-9 {
                    return Err(Error::Config(format!(
                        "period {period} is not an integer multiple of spacing {h}"
                    )));
                }
                shape.push(n as usize);
            }
        }
    }
    let count: usize = shape.iter().product();
    if count > cap {
        return Err(Error::Resource(format!(
            "lattice needs {count} nodes, cap is {cap} (set {MAX_NODES_ENV})"
        )));
    }

    let mut strides = vec![1usize; dim];
    for a in (0..dim - 1).rev() {
        strides[a] = strides[a + 1] * shape[a + 1];
    }

    let mut lat = Lattice {
        scene: scene.clone(),
        spacing: spacing.to_vec(),
        shape,
        node_class: Vec::new(),
        axis_topology: scene.axis_topology.clone(),
        strides,
    };

    // Pure per-node obstacle membership, then one neighbor pass for the
    // discrete boundary.
    let member: Vec<bool> = (0..count)
        .into_par_iter()
        .map(|id| lat.scene.obstacle_member(&lat.coords(id)))
        .collect();
    lat.node_class = (0..count)
        .into_par_iter()
        .map(|id| {
            if !member[id] {
                NodeClass::Free
            } else if lat.face_neighbors(id).iter().any(|&nb| !member[nb]) {
                NodeClass::Boundary
            } else {
                NodeClass::ObstacleInterior
            }
        })
        .collect();
    Ok(lat)
}

/// Number of face-connected FREE components within the metric ball of the
/// given radius around `center`.
pub fn free_component_count(lattice: &Lattice, center: &[f64], radius: f64) -> usize {
    let in_ball: Vec<usize> = (0..lattice.node_count())
        .filter(|&n| {
            lattice.node_class[n] == NodeClass::Free
                && space::distance(&lattice.axis_topology, &lattice.coords(n), center) <= radius
        })
        .collect();
    let mut seen = vec![false; lattice.node_count()];
    let mut member = vec![false; lattice.node_count()];
    for &n in &in_ball {
        member[n] = true;
    }
    let mut components = 0;
    for &start in &in_ball {
        if seen[start] {
            continue;
        }
        components += 1;
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(n) = queue.pop_front() {
            for nb in lattice.face_neighbors(n) {
                if member[nb] && !seen[nb] {
                    seen[nb] = true;
                    queue.push_back(nb);
                }
            }
        }
    }
    components
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corner_lattice() -> Lattice {
        let scene = builtin_scene("galaga-corner").unwrap();
        build_lattice(&scene, &[0.05, 0.05]).unwrap()
    }

    #[test]
    fn builtin_names() {
        for n in [
            "galaga-corner",
            "galaga-slant",
            "gen-galaga",
            "dubins-corner",
            "horiz-corner",
        ] {
            assert!(builtin_scene(n).is_ok(), "{n}");
        }
        assert!(builtin_scene("maze").is_err());
    }

    #[test]
    fn corner_membership() {
        let scene = builtin_scene("galaga-corner").unwrap();
        // Passage slice at x2 = 0 is free, walls are obstacle.
        assert!(!scene.obstacle_member(&[-0.5, 0.0]));
        assert!(!scene.obstacle_member(&[-0.5, -1.0]));
        assert!(scene.obstacle_member(&[-1.0, -0.5]));
        assert!(scene.obstacle_member(&[-2.0, -1.0]));
        assert!(scene.obstacle_interior(&[-2.0, -1.0]));
        assert!(!scene.obstacle_interior(&[-1.0, -0.5]));
    }

    #[test]
    fn corner_classification() {
        let lat = corner_lattice();
        let id = |x: f64, y: f64| lat.snap(&[x, y]);
        assert_eq!(lat.class(id(-1.0, -0.5)), NodeClass::Boundary);
        assert_eq!(lat.class(id(-0.5, -1.0)), NodeClass::Free);
        assert_eq!(lat.class(id(-2.0, -1.0)), NodeClass::ObstacleInterior);
        // Shelf above the narrow passage.
        assert_eq!(lat.class(id(-2.0, 0.0)), NodeClass::Boundary);
    }

    #[test]
    fn bounds_reproduced_exactly() {
        let lat = corner_lattice();
        let last = lat.shape[0] - 1;
        assert_eq!(lat.coord_axis(0, 0), -6.0);
        assert_eq!(lat.coord_axis(0, last), 3.0);
    }

    #[test]
    fn boundary_union_interior_is_obstacle_truth_set() {
        let lat = corner_lattice();
        for id in 0..lat.node_count() {
            let member = lat.scene.obstacle_member(&lat.coords(id));
            let class_obstacle = lat.class(id) != NodeClass::Free;
            assert_eq!(member, class_obstacle);
        }
    }

    #[test]
    fn refinement_keeps_obstacle_nodes_obstacle() {
        let scene = builtin_scene("galaga-corner").unwrap();
        let coarse = build_lattice(&scene, &[0.1, 0.1]).unwrap();
        let fine = build_lattice(&scene, &[0.05, 0.05]).unwrap();
        for id in 0..coarse.node_count() {
            if coarse.class(id) == NodeClass::ObstacleInterior {
                let c = coarse.coords(id);
                assert_ne!(fine.class(fine.snap(&c)), NodeClass::Free);
            }
        }
    }

    #[test]
    fn dubins_theta_axis_wraps() {
        let scene = builtin_scene("dubins-corner").unwrap();
        let h = 2.0 * PI / 64.0;
        let lat = build_lattice(&scene, &[0.05, 0.05, h]).unwrap();
        assert_eq!(lat.shape[2], 64);
        let idx = lat.index_of(lat.snap(&[1.0, 1.0, -PI]));
        let id = lat.id_of(&idx);
        let wrapped = lat.neighbor(id, 2, -1).unwrap();
        assert_eq!(lat.index_of(wrapped)[2], 63);
    }

    #[test]
    fn component_counts() {
        let lat = corner_lattice();
        assert_eq!(free_component_count(&lat, &[-1.0, 0.0], 0.3), 1);
        assert_eq!(free_component_count(&lat, &[-3.0, -1.0], 0.2), 0);
        let horiz = builtin_scene("horiz-corner").unwrap();
        let hlat = build_lattice(&horiz, &[0.05, 0.05]).unwrap();
        assert_eq!(free_component_count(&hlat, &[0.0, 0.0], 0.3), 1);
    }

    #[test]
    fn slit_scene_splits_components() {
        // Two free half-planes joined only far away: a wall x1 in [-0.1, 0.1]
        // except a notch high up.
        let obstacle = Region::Inter(vec![
            Region::above(0, 2, -0.1, false),
            Region::below(0, 2, 0.1, false),
            Region::below(1, 2, 5.0, false),
        ]);
        let scene = Scene {
            name: "wall".into(),
            bounds: vec![(-1.0, 1.0), (-1.0, 1.0)],
            axis_topology: vec![Axis::Line; 2],
            obstacle: Arc::new(obstacle),
        };
        let lat = build_lattice(&scene, &[0.05, 0.05]).unwrap();
        assert_eq!(free_component_count(&lat, &[0.0, 0.0], 0.4), 2);
    }

    #[test]
    fn node_cap_respected() {
        let scene = builtin_scene("galaga-corner").unwrap();
        let err = build_lattice_capped(&scene, &[0.05, 0.05], 100);
        assert!(matches!(err, Err(Error::Resource(_))));
    }
}
