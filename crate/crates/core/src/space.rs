//! State-space geometry: per-axis topology, wrapping, and the state metric.

use serde::{Deserialize, Serialize};

/// Topology of one state axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Axis {
    Line,
    /// Periodic axis with the given period; coordinates are identified mod period.
    Circle { period: f64 },
}

impl Axis {
    /// Signed difference `a - b` respecting topology (shortest representative
    /// on circle axes).
    pub fn diff(&self, a: f64, b: f64) -> f64 {
        match *self {
            Axis::Line => a - b,
            Axis::Circle { period } => {
                let mut d = (a - b) % period;
                if d > period / 2.0 {
                    d -= period;
                } else if d < -period / 2.0 {
                    d += period;
                }
                d
            }
        }
    }

    /// Wrap a coordinate into `[low, low + period)` for circle axes; identity
    /// for line axes.
    pub fn wrap(&self, x: f64, low: f64) -> f64 {
        match *self {
            Axis::Line => x,
            Axis::Circle { period } => {
                let mut w = (x - low) % period;
                if w < 0.0 {
                    w += period;
                }
                low + w
            }
        }
    }
}

/// Euclidean state distance respecting circle axes.
pub fn distance(axes: &[Axis], a: &[f64], b: &[f64]) -> f64 {
    axes.iter()
        .zip(a.iter().zip(b.iter()))
        .map(|(axis, (&x, &y))| {
            let d = axis.diff(x, y);
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Deterministic fan of `count` unit directions: uniform angles in 2D, a
/// Fibonacci sphere in 3D, seeded Gaussian directions in higher dimensions.
pub fn direction_fan(dim: usize, count: usize) -> Vec<Vec<f64>> {
    use std::f64::consts::PI;
    match dim {
        0 => Vec::new(),
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / count as f64;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        3 => {
            let golden = PI * (3.0 - 5.0f64.sqrt());
            (0..count)
                .map(|k| {
                    let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let a = golden * k as f64;
                    vec![r * a.cos(), r * a.sin(), z]
                })
                .collect()
        }
        _ => {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xD1EC);
            (0..count)
                .map(|_| {
                    loop {
                        // Box-Muller pairs give an isotropic direction.
                        let v: Vec<f64> = (0..dim)
                            .map(|_| {
                                let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
                                let u2: f64 = rng.gen_range(0.0..2.0 * PI);
                                (-2.0 * u1.ln()).sqrt() * u2.cos()
                            })
                            .collect();
                        let n = norm(&v);
                        if n > 1e-9 {
                            return v.iter().map(|&x| x / n).collect();
                        }
                    }
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn circle_diff_takes_short_way() {
        let axis = Axis::Circle { period: 2.0 * PI };
        let d = axis.diff(PI - 0.1, -PI + 0.1);
        assert!((d.abs() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn wrap_into_period() {
        let axis = Axis::Circle { period: 2.0 * PI };
        let w = axis.wrap(3.0 * PI + 0.5, -PI);
        assert!((-PI..PI).contains(&w));
        assert!((axis.diff(w, 3.0 * PI + 0.5)).abs() < 1e-12);
    }

    #[test]
    fn mixed_distance() {
        let axes = [Axis::Line, Axis::Circle { period: 2.0 * PI }];
        let d = distance(&axes, &[0.0, PI - 0.05], &[3.0, -PI + 0.05]);
        assert!((d - (9.0f64 + 0.01).sqrt()).abs() < 1e-12);
    }
}
