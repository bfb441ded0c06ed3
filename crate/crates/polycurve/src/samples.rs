//! Seeded random curves and fields for property checks and verification.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curve::{DiscreteCurve, TangentField};
use crate::error::Result;
use crate::spaceform::SpaceForm;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random trigonometric polynomial of the given degree in every ambient
/// coordinate, sampled at `n` uniform parameters.
fn trig_samples(r: &mut ChaCha8Rng, n: usize, dim: usize, degree: usize, amp: f64) -> Vec<f64> {
    let coef: Vec<(f64, f64)> = (0..dim * degree).map(|_| (r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect();
    let mut out = vec![0.0; n * dim];
    for i in 0..n {
        let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
        for a in 0..dim {
            out[i * dim + a] = (1..=degree)
                .map(|j| {
                    let (c, s) = coef[a * degree + j - 1];
                    amp * (c * (j as f64 * t).cos() + s * (j as f64 * t).sin()) / (j * j) as f64
                })
                .sum::<f64>();
        }
    }
    out
}

/// Smooth closed curve near a tilted great circle of `space`, a sphere.
pub fn random_sphere_curve(space: &SpaceForm, n: usize, seed: u64) -> Result<DiscreteCurve> {
    let mut r = rng(seed);
    let d = space.ambient_dim();
    let radius = space.radius().unwrap_or(1.0);
    let mut pts = trig_samples(&mut r, n, d, 3, 0.35 * radius);
    for i in 0..n {
        let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
        let p = &mut pts[i * d..(i + 1) * d];
        p[0] += radius * t.cos();
        p[1] += radius * t.sin();
        space.project_point_in_place(p)?;
    }
    DiscreteCurve::from_points(space.clone(), pts, true)
}

/// Smooth random tangent field built from low Fourier modes.
pub fn smooth_field(c: &DiscreteCurve, seed: u64) -> TangentField {
    let mut r = rng(seed);
    let data = trig_samples(&mut r, c.len(), c.ambient_dim(), 4, 1.0);
    c.field_from_ambient(data).expect("matching size")
}

/// Independent uniform entries at every node, projected.
pub fn rough_field(c: &DiscreteCurve, seed: u64) -> TangentField {
    let mut r = rng(seed);
    let data = (0..c.points().len()).map(|_| r.gen_range(-1.0..1.0)).collect();
    c.field_from_ambient(data).expect("matching size")
}
