//! Control systems as sampled velocity multifunctions with running costs.
//!
//! A [`ControlSystem`] carries the dynamics `f(x, u)`, a finite sample of the
//! control set, a strictly positive running cost, and per-axis topology.
//! On top of it this module evaluates the minimal Hamiltonian, integrates
//! trajectories with a fixed-step fourth-order scheme, and constructs
//! directionality certificates (velocity bound, Lipschitz bound, penetration
//! horizon) by dense sampling.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::space::{self, Axis};

type VelocityFn = dyn Fn(&[f64], &[f64], &mut [f64]) + Send + Sync;
type CostFn = dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync;

/// Default number of control samples per control dimension.
pub const DEFAULT_CONTROLS_PER_AXIS: usize = 32;

/// Default integration step for trajectory integration (seconds).
pub const DEFAULT_STEP: f64 = 0.01;

/// Default number of random samples for certificate constant estimation.
pub const DEFAULT_CERT_SAMPLES: usize = 10_000;

#[derive(Clone)]
pub struct ControlSystem {
    pub name: String,
    pub state_dim: usize,
    pub axis_topology: Vec<Axis>,
    /// Finite control samples approximating the control set.
    pub control_samples: Vec<Vec<f64>>,
    /// Global state box; trajectories leaving it raise a domain-exit error.
    pub domain: Vec<(f64, f64)>,
    velocity: Arc<VelocityFn>,
    running_cost: Arc<CostFn>,
}

impl fmt::Debug for ControlSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ControlSystem")
            .field("name", &self.name)
            .field("state_dim", &self.state_dim)
            .field("controls", &self.control_samples.len())
            .finish()
    }
}

impl ControlSystem {
    /// Evaluate the dynamics `f(x, u)` into `out`.
    pub fn velocity(&self, x: &[f64], u: &[f64], out: &mut [f64]) {
        (self.velocity)(x, u, out)
    }

    /// Running cost `psi(x, v)`; strictly positive by construction.
    pub fn running_cost(&self, x: &[f64], v: &[f64]) -> f64 {
        (self.running_cost)(x, v)
    }

    /// One fourth-order step of the cost-augmented dynamics under constant
    /// control `u`. Advances `x` in place, accumulates running cost into
    /// `cost`, and wraps circle axes.
    pub fn step_rk4(&self, x: &mut [f64], u: &[f64], dt: f64, cost: &mut f64) {
        let mut scratch = RkScratch::new(self.state_dim);
        self.step_rk4_with(x, u, dt, cost, &mut scratch);
    }

    /// Allocation-free variant of [`Self::step_rk4`] for hot loops.
    pub fn step_rk4_with(
        &self,
        x: &mut [f64],
        u: &[f64],
        dt: f64,
        cost: &mut f64,
        scratch: &mut RkScratch,
    ) {
        let n = self.state_dim;
        let RkScratch {
            k1,
            k2,
            k3,
            k4,
            tmp,
        } = scratch;

        self.velocity(x, u, k1);
        let c1 = self.running_cost(x, k1);

        for i in 0..n {
            tmp[i] = x[i] + 0.5 * dt * k1[i];
        }
        self.velocity(tmp, u, k2);
        let c2 = self.running_cost(tmp, k2);

        for i in 0..n {
            tmp[i] = x[i] + 0.5 * dt * k2[i];
        }
        self.velocity(tmp, u, k3);
        let c3 = self.running_cost(tmp, k3);

        for i in 0..n {
            tmp[i] = x[i] + dt * k3[i];
        }
        self.velocity(tmp, u, k4);
        let c4 = self.running_cost(tmp, k4);

        for i in 0..n {
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            x[i] = self.axis_topology[i].wrap(x[i], self.domain[i].0);
        }
        *cost += dt / 6.0 * (c1 + 2.0 * c2 + 2.0 * c3 + c4);
    }

    fn in_domain(&self, x: &[f64]) -> bool {
        x.iter().zip(&self.domain).zip(&self.axis_topology).all(
            |((&xi, &(lo, hi)), axis)| match axis {
                Axis::Line => xi >= lo && xi <= hi,
                Axis::Circle { .. } => true,
            },
        )
    }
}

/// Reusable RK4 stage buffers.
pub struct RkScratch {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl RkScratch {
    pub fn new(dim: usize) -> Self {
        RkScratch {
            k1: vec![0.0; dim],
            k2: vec![0.0; dim],
            k3: vec![0.0; dim],
            k4: vec![0.0; dim],
            tmp: vec![0.0; dim],
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrajectorySample {
    pub time: f64,
    pub state: Vec<f64>,
    pub control: Vec<f64>,
}

/// An integrated (or graph-extracted) trajectory with its accumulated cost.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub total_cost: f64,
    pub duration: f64,
    /// Exact tick cost when the trajectory was extracted from a graph.
    pub cost_ticks: Option<u64>,
}

impl Trajectory {
    pub fn endpoint(&self) -> Option<&[f64]> {
        self.samples.last().map(|s| s.state.as_slice())
    }
}

/// Build one of the four built-in systems with the default control sampling.
pub fn builtin_system(name: &str) -> Result<ControlSystem> {
    builtin_system_with(name, DEFAULT_CONTROLS_PER_AXIS)
}

/// Build a built-in system with `per_axis` control samples per control
/// dimension (uniform, endpoints included).
pub fn builtin_system_with(name: &str, per_axis: usize) -> Result<ControlSystem> {
    if per_axis < 2 {
        return Err(Error::Config("need at least 2 control samples per axis".into()));
    }
    let unit_psi: Arc<CostFn> = Arc::new(|_x: &[f64], _v: &[f64]| 1.0);
    let line_box = |dim: usize| vec![(-50.0, 50.0); dim];
    match name {
        "galaga" => Ok(ControlSystem {
            name: name.into(),
            state_dim: 2,
            axis_topology: vec![Axis::Line; 2],
            control_samples: linspace(-1.0, 1.0, per_axis).map(|u| vec![u]).collect(),
            domain: line_box(2),
            velocity: Arc::new(|_x, u, out| {
                out[0] = u[0];
                out[1] = 1.0;
            }),
            running_cost: unit_psi,
        }),
        "gen-galaga" => {
            let us: Vec<f64> = linspace(-1.0, 1.0, per_axis).collect();
            let mut controls = Vec::with_capacity(per_axis * per_axis);
            for &u1 in &us {
                for &u2 in &us {
                    controls.push(vec![u1, u2]);
                }
            }
            Ok(ControlSystem {
                name: name.into(),
                state_dim: 3,
                axis_topology: vec![Axis::Line; 3],
                control_samples: controls,
                domain: line_box(3),
                velocity: Arc::new(|x, u, out| {
                    out[0] = u[0];
                    out[1] = x[2];
                    out[2] = u[1];
                }),
                running_cost: unit_psi,
            })
        }
        "dubins" => Ok(ControlSystem {
            name: name.into(),
            state_dim: 3,
            axis_topology: vec![Axis::Line, Axis::Line, Axis::Circle { period: 2.0 * PI }],
            control_samples: linspace(-1.0, 1.0, per_axis).map(|u| vec![u]).collect(),
            domain: vec![(-50.0, 50.0), (-50.0, 50.0), (-PI, PI)],
            velocity: Arc::new(|x, u, out| {
                out[0] = x[2].cos();
                out[1] = x[2].sin();
                out[2] = u[0];
            }),
            running_cost: unit_psi,
        }),
        "horizontal" => Ok(ControlSystem {
            name: name.into(),
            state_dim: 2,
            axis_topology: vec![Axis::Line; 2],
            control_samples: linspace(0.0, PI, per_axis).map(|u| vec![u]).collect(),
            domain: line_box(2),
            velocity: Arc::new(|_x, u, out| {
                out[0] = u[0].cos();
                out[1] = u[0].sin();
            }),
            running_cost: unit_psi,
        }),
        other => Err(Error::Config(format!("unknown system `{other}`"))),
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(move |i| if i == n - 1 { hi } else { lo + i as f64 * step })
}

/// Minimal (lower) Hamiltonian: `min_u <f(x,u), xi>` over the control samples.
pub fn min_hamiltonian(system: &ControlSystem, x: &[f64], xi: &[f64]) -> f64 {
    let mut v = vec![0.0; system.state_dim];
    let mut best = f64::INFINITY;
    for u in &system.control_samples {
        system.velocity(x, u, &mut v);
        let h = space::dot(&v, xi);
        if h < best {
            best = h;
        }
    }
    best
}

/// Integrate `xdot = f(x, u)` per schedule segment with fixed-step RK4; the
/// running cost is accumulated with the same nodes.
pub fn integrate_trajectory(
    system: &ControlSystem,
    x0: &[f64],
    schedule: &[(Vec<f64>, f64)],
    step: f64,
) -> Result<Trajectory> {
    if step <= 0.0 {
        return Err(Error::Config("integration step must be positive".into()));
    }
    let mut x = x0.to_vec();
    let mut t = 0.0;
    let mut cost = 0.0;
    let first_control = schedule
        .first()
        .map(|(u, _)| u.clone())
        .unwrap_or_else(|| vec![0.0; system.control_samples[0].len()]);
    let mut samples = vec![TrajectorySample {
        time: 0.0,
        state: x.clone(),
        control: first_control,
    }];

    for (u, duration) in schedule {
        if *duration <= 0.0 {
            return Err(Error::Config("schedule durations must be positive".into()));
        }
        let n = (duration / step).ceil() as usize;
        let dt = duration / n as f64;
        for _ in 0..n {
            system.step_rk4(&mut x, u, dt, &mut cost);
            t += dt;
            samples.push(TrajectorySample {
                time: t,
                state: x.clone(),
                control: u.clone(),
            });
            if !system.in_domain(&x) {
                let partial = Trajectory {
                    samples,
                    total_cost: cost,
                    duration: t,
                    cost_ticks: None,
                };
                return Err(Error::DomainExit { time: t, partial });
            }
        }
    }
    Ok(Trajectory {
        samples,
        total_cost: cost,
        duration: t,
        cost_ticks: None,
    })
}

/// Numerically estimated constants realizing the directional-propagation
/// statements at an anchor state with positive minimal Hamiltonian.
#[derive(Debug, Clone, serde::Serialize)]
pub struct DirectionalityCertificate {
    pub anchor: Vec<f64>,
    pub direction: Vec<f64>,
    pub target_radius: f64,
    pub target_point: Vec<f64>,
    /// h0 = h_F(x, x* - x).
    pub hamiltonian_value: f64,
    /// M: max velocity norm over the sampled ball of radius 2 r*.
    pub velocity_bound: f64,
    /// K: sampled one-sided Lipschitz estimate of the velocity multifunction.
    pub lipschitz_bound: f64,
    /// R: radius on which the Hamiltonian stays above h0 / 2.
    pub neighborhood_radius: f64,
    /// t*: penetration horizon.
    pub horizon: f64,
    /// psi*: max running cost over the sampled R-ball.
    pub cost_bound: f64,
}

impl DirectionalityCertificate {
    /// Shrink factor eta*(t): midpoint of (sqrt(1 - t h0 / r*^2), 1).
    pub fn eta_star(&self, t: f64) -> f64 {
        let b = (1.0 - t * self.hamiltonian_value / (self.target_radius * self.target_radius))
            .clamp(0.0, 1.0)
            .sqrt();
        0.5 * (b + 1.0)
    }
}

/// Estimate the certificate constants by dense sampling over the ball of
/// radius `2 r*` around `x`. Estimates are reported values, not proven bounds.
pub fn compute_certificate(
    system: &ControlSystem,
    x: &[f64],
    xi: &[f64],
    r_star: f64,
    sample_count: usize,
    seed: u64,
) -> Result<DirectionalityCertificate> {
    if r_star <= 0.0 {
        return Err(Error::Config("r* must be positive".into()));
    }
    let xi_norm = space::norm(xi);
    if xi_norm == 0.0 {
        return Err(Error::Config("direction must be nonzero".into()));
    }
    let target: Vec<f64> = x
        .iter()
        .zip(xi)
        .map(|(&xc, &d)| xc + r_star / xi_norm * d)
        .collect();
    let offset: Vec<f64> = target.iter().zip(x).map(|(&t, &xc)| t - xc).collect();
    let h0 = min_hamiltonian(system, x, &offset);
    if h0 <= 0.0 {
        return Err(Error::CertificateInfeasible(format!(
            "minimal Hamiltonian {h0:.6} not positive at the anchor"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = vec![0.0; system.state_dim];

    // M over the 2 r* ball.
    let mut m = 0.0f64;
    let states: Vec<Vec<f64>> = (0..sample_count)
        .map(|_| sample_in_ball(&mut rng, x, 2.0 * r_star))
        .collect();
    for y in &states {
        for u in &system.control_samples {
            system.velocity(y, u, &mut v);
            m = m.max(space::norm(&v));
        }
    }

    // One-sided Lipschitz estimate over random pairs.
    let pairs = (sample_count / 50).clamp(50, 500);
    let mut k_est = 0.0f64;
    let mut va = vec![0.0; system.state_dim];
    let mut vb = vec![0.0; system.state_dim];
    for _ in 0..pairs {
        let a = sample_in_ball(&mut rng, x, 2.0 * r_star);
        let b = sample_in_ball(&mut rng, x, 2.0 * r_star);
        let dist = space::distance(&system.axis_topology, &a, &b);
        if dist < 1e-9 {
            continue;
        }
        let mut worst = 0.0f64;
        for ua in &system.control_samples {
            system.velocity(&a, ua, &mut va);
            let mut best = f64::INFINITY;
            for ub in &system.control_samples {
                system.velocity(&b, ub, &mut vb);
                let d: f64 = va
                    .iter()
                    .zip(&vb)
                    .map(|(&p, &q)| (p - q) * (p - q))
                    .sum::<f64>()
                    .sqrt();
                if d < best {
                    best = d;
                }
            }
            worst = worst.max(best);
        }
        k_est = k_est.max(worst / dist);
    }

    // Safety factor 0.9 keeps the strict inequalities of the propagation
    // estimates strict.
    let r = 0.9 * h0 / (2.0 * (m + 3.0 * r_star * k_est));
    let r = r.min(0.9 * r_star);
    let t_star = 0.9 * r / m;

    // psi* over the R ball.
    let mut psi_star = 0.0f64;
    for _ in 0..sample_count.min(2000) {
        let y = sample_in_ball(&mut rng, x, r);
        for u in &system.control_samples {
            system.velocity(&y, u, &mut v);
            psi_star = psi_star.max(system.running_cost(&y, &v));
        }
    }

    Ok(DirectionalityCertificate {
        anchor: x.to_vec(),
        direction: xi.to_vec(),
        target_radius: r_star,
        target_point: target,
        hamiltonian_value: h0,
        velocity_bound: m,
        lipschitz_bound: k_est,
        neighborhood_radius: r,
        horizon: t_star,
        cost_bound: psi_star,
    })
}

fn sample_in_ball(rng: &mut ChaCha8Rng, center: &[f64], radius: f64) -> Vec<f64> {
    // Rejection sampling from the bounding cube.
    loop {
        let y: Vec<f64> = center
            .iter()
            .map(|&c| c + rng.gen_range(-radius..=radius))
            .collect();
        let d2: f64 = y
            .iter()
            .zip(center)
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum();
        if d2 <= radius * radius {
            return y;
        }
    }
}
