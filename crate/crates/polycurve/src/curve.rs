//! Discrete curves, tangent fields along them, and first-order covariant
//! calculus by projected central differences.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};
use crate::spaceform::{dot, norm, SpaceForm};

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

fn fresh_id() -> u64 {
    NEXT_ID.fetch_add(1, Ordering::Relaxed)
}

/// Smallest admissible sample count.
pub const MIN_POINTS: usize = 16;

/// Required samples per order of differentiation.
pub const STENCIL_HEADROOM: usize = 16;

/// An immutable snapshot of N samples on a target, uniformly spaced in the
/// curve parameter with step `h`.
#[derive(Debug, Clone)]
pub struct DiscreteCurve {
    id: u64,
    space: SpaceForm,
    points: Vec<f64>,
    n: usize,
    closed: bool,
    h: f64,
}

/// One tangent vector per curve sample, tied to a curve snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentField {
    curve: u64,
    dim: usize,
    data: Vec<f64>,
}

impl TangentField {
    pub fn curve_id(&self) -> u64 {
        self.curve
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim.max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn vector(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn vectors(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    /// Largest pointwise Euclidean norm.
    pub fn inf_norm(&self) -> f64 {
        self.vectors().map(norm).fold(0.0, f64::max)
    }

    pub fn scaled(&self, s: f64) -> TangentField {
        self.map(|x| s * x)
    }

    pub fn add(&self, other: &TangentField) -> TangentField {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &TangentField) -> TangentField {
        self.zip(other, |a, b| a - b)
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &TangentField) -> TangentField {
        self.zip(other, |a, b| a + s * b)
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> TangentField {
        TangentField { curve: self.curve, dim: self.dim, data: self.data.iter().map(|&x| f(x)).collect() }
    }

    fn zip(&self, other: &TangentField, f: impl Fn(f64, f64) -> f64) -> TangentField {
        assert_eq!(self.curve, other.curve, "fields on different curve snapshots");
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        TangentField { curve: self.curve, dim: self.dim, data }
    }

    pub(crate) fn raw(curve: u64, dim: usize, data: Vec<f64>) -> Self {
        TangentField { curve, dim, data }
    }
}

impl DiscreteCurve {
    /// Builds a curve from flat row-major coordinates and an explicit step.
    /// Points must already pass the membership test.
    pub fn new(space: SpaceForm, points: Vec<f64>, closed: bool, h: f64) -> Result<Self> {
        let d = space.ambient_dim();
        if points.len() % d != 0 {
            return Err(Error::InvalidArgument(format!(
                "coordinate count {} is not a multiple of ambient dimension {d}",
                points.len()
            )));
        }
        let n = points.len() / d;
        if n < MIN_POINTS {
            return Err(Error::InvalidArgument(format!("point count ≥ {MIN_POINTS} required, got {n}")));
        }
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidArgument(format!("step h must be positive, got {h}")));
        }
        for (i, p) in points.chunks_exact(d).enumerate() {
            let defect = space.membership_defect(p);
            if !(defect <= crate::spaceform::MEMBERSHIP_TOL) {
                return Err(Error::OffManifold { index: i, defect });
            }
        }
        Ok(DiscreteCurve { id: fresh_id(), space, points, n, closed, h })
    }

    /// Builds a curve whose step is the mean geodesic gap between samples.
    pub fn from_points(space: SpaceForm, points: Vec<f64>, closed: bool) -> Result<Self> {
        let mut c = Self::new(space, points, closed, 1.0)?;
        let len = c.length();
        if len < 1e-8 {
            return Err(Error::DegenerateCurve(len));
        }
        c.h = len / c.segment_count() as f64;
        Ok(c)
    }

    /// Same points and step, new snapshot identity.
    pub(crate) fn with_points(&self, points: Vec<f64>) -> Self {
        DiscreteCurve { id: fresh_id(), space: self.space.clone(), points, n: self.n, closed: self.closed, h: self.h }
    }

    /// Same points, a different parameter step.
    pub fn with_step(&self, h: f64) -> Result<Self> {
        Self::new(self.space.clone(), self.points.clone(), self.closed, h)
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn space(&self) -> &SpaceForm {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn ambient_dim(&self) -> usize {
        self.space.ambient_dim()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        let d = self.ambient_dim();
        &self.points[i * d..(i + 1) * d]
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    fn segment_count(&self) -> usize {
        if self.closed { self.n } else { self.n - 1 }
    }

    /// Geodesic polygon length.
    pub fn length(&self) -> f64 {
        (0..self.segment_count()).map(|i| self.space.distance(self.point(i), self.point((i + 1) % self.n))).sum()
    }

    /// Radius of the round circle of equal length; the natural length scale.
    pub fn length_scale(&self) -> f64 {
        self.length() / (2.0 * std::f64::consts::PI)
    }

    pub fn require_closed(&self) -> Result<()> {
        if self.closed { Ok(()) } else { Err(Error::OpenCurveUnsupported) }
    }

    /// Enforces N >= 16 * level.
    pub fn require_stencil(&self, level: usize) -> Result<()> {
        let required = STENCIL_HEADROOM * level.max(1);
        if self.n < required { Err(Error::StencilTooCoarse { n: self.n, required }) } else { Ok(()) }
    }

    pub fn check_field(&self, f: &TangentField) -> Result<()> {
        if f.curve != self.id {
            return Err(Error::FieldCurveMismatch { field: f.curve, curve: self.id });
        }
        Ok(())
    }

    pub fn zero_field(&self) -> TangentField {
        TangentField::raw(self.id, self.ambient_dim(), vec![0.0; self.points.len()])
    }

    /// Projects arbitrary ambient vectors onto the tangent spaces.
    pub fn field_from_ambient(&self, mut data: Vec<f64>) -> Result<TangentField> {
        if data.len() != self.points.len() {
            return Err(Error::InvalidArgument(format!(
                "field has {} coordinates, curve has {}",
                data.len(),
                self.points.len()
            )));
        }
        let d = self.ambient_dim();
        for (p, v) in self.points.chunks_exact(d).zip(data.chunks_exact_mut(d)) {
            self.space.project_tangent_in_place(p, v);
        }
        Ok(TangentField::raw(self.id, d, data))
    }

    /// Field whose value at node i is `f(i, point_i)`, then projected.
    pub fn field_from_fn(&self, f: impl Fn(usize, &[f64]) -> Vec<f64>) -> TangentField {
        let data: Vec<f64> = (0..self.n).flat_map(|i| f(i, self.point(i))).collect();
        self.field_from_ambient(data).expect("closure returned wrong dimension")
    }

    /// Projected central difference of raw nodal data. Open curves use
    /// one-sided second-order stencils at the ends.
    pub(crate) fn diff_raw(&self, f: &[f64], out: &mut [f64]) {
        let d = self.ambient_dim();
        let n = self.n;
        let inv = 1.0 / (2.0 * self.h);
        for i in 0..n {
            let o = &mut out[i * d..(i + 1) * d];
            let at = |j: usize| &f[j * d..(j + 1) * d];
            if self.closed || (i > 0 && i + 1 < n) {
                let (a, b) = (at((i + 1) % n), at((i + n - 1) % n));
                for c in 0..d {
                    o[c] = (a[c] - b[c]) * inv;
                }
            } else if i == 0 {
                let (f0, f1, f2) = (at(0), at(1), at(2));
                for c in 0..d {
                    o[c] = (-3.0 * f0[c] + 4.0 * f1[c] - f2[c]) * inv;
                }
            } else {
                let (f0, f1, f2) = (at(n - 1), at(n - 2), at(n - 3));
                for c in 0..d {
                    o[c] = (3.0 * f0[c] - 4.0 * f1[c] + f2[c]) * inv;
                }
            }
            self.space.project_tangent_in_place(self.point(i), o);
        }
    }

    pub(crate) fn diff_field(&self, f: &TangentField) -> TangentField {
        let mut out = vec![0.0; self.points.len()];
        self.diff_raw(&f.data, &mut out);
        TangentField::raw(self.id, self.ambient_dim(), out)
    }

    /// -D(D f); D is skew-adjoint on tangent fields, so this is D*D.
    pub(crate) fn lap_field(&self, f: &TangentField) -> TangentField {
        self.diff_field(&self.diff_field(f)).scaled(-1.0)
    }

    /// Projected central difference of the sample points.
    pub fn velocity(&self) -> TangentField {
        let mut out = vec![0.0; self.points.len()];
        self.diff_raw(&self.points, &mut out);
        TangentField::raw(self.id, self.ambient_dim(), out)
    }

    pub fn covariant_derivative(&self, f: &TangentField) -> Result<TangentField> {
        self.check_field(f)?;
        Ok(self.diff_field(f))
    }

    pub fn tension(&self) -> TangentField {
        self.diff_field(&self.velocity())
    }

    /// Rough Laplacian as the exact discrete adjoint of the covariant
    /// derivative composed with itself.
    pub fn rough_laplacian(&self, f: &TangentField) -> Result<TangentField> {
        self.require_closed()?;
        self.check_field(f)?;
        Ok(self.lap_field(f))
    }

    /// Rectangle-rule L² pairing.
    pub fn l2_inner(&self, f: &TangentField, g: &TangentField) -> Result<f64> {
        self.check_field(f)?;
        self.check_field(g)?;
        Ok(self.l2_raw(f, g))
    }

    pub(crate) fn l2_raw(&self, f: &TangentField, g: &TangentField) -> f64 {
        self.h * dot(&f.data, &g.data)
    }

    /// Pointwise curvature term R(X, Y)Z accumulated with a scale.
    pub(crate) fn curv_add(&self, s: f64, x: &TangentField, y: &TangentField, z: &TangentField, out: &mut TangentField) {
        let d = self.ambient_dim();
        for i in 0..self.n {
            let r = i * d..(i + 1) * d;
            self.space.curvature_op_add(
                self.point(i),
                s,
                &x.data[r.clone()],
                &y.data[r.clone()],
                &z.data[r.clone()],
                &mut out.data[r],
            );
        }
    }

    /// Consecutive geodesic gaps, wrapping for closed curves.
    pub fn gaps(&self) -> Vec<f64> {
        (0..self.segment_count()).map(|i| self.space.distance(self.point(i), self.point((i + 1) % self.n))).collect()
    }

    /// Redistributes samples to equal geodesic spacing along the curve.
    ///
    /// Each pass places points at equal arclength along the geodesic polygon;
    /// the chord spacing then differs from uniform only by the variation in
    /// corner cutting, which shrinks geometrically over a few passes.
    pub fn resample_arclength(&self) -> Result<DiscreteCurve> {
        self.require_closed()?;
        let d = self.ambient_dim();
        let n = self.n;
        let mut pts = self.points.clone();
        for _ in 0..32 {
            let at = |p: &Vec<f64>, i: usize| p[i * d..(i + 1) * d].to_vec();
            let gaps: Vec<f64> = (0..n).map(|i| self.space.distance(&at(&pts, i), &at(&pts, (i + 1) % n))).collect();
            let total: f64 = gaps.iter().sum();
            if !(total >= 1e-8) {
                return Err(Error::DegenerateCurve(total));
            }
            let mean = total / n as f64;
            let spread = gaps.iter().map(|g| (g - mean).abs()).fold(0.0, f64::max) / mean;
            if spread <= 1e-12 {
                break;
            }
            let mut next = Vec::with_capacity(pts.len());
            next.extend_from_slice(&pts[..d]);
            let (mut seg, mut acc) = (0usize, 0.0);
            for m in 1..n {
                let target = m as f64 * mean;
                while seg + 1 < n && acc + gaps[seg] < target {
                    acc += gaps[seg];
                    seg += 1;
                }
                let t = if gaps[seg] > 0.0 { ((target - acc) / gaps[seg]).clamp(0.0, 1.0) } else { 0.0 };
                let q = self.space.geodesic_interp(&at(&pts, seg), &at(&pts, (seg + 1) % n), t);
                next.extend_from_slice(&q);
            }
            pts = next;
        }
        DiscreteCurve::from_points(self.space.clone(), pts, true)
    }

    /// Caches Δ̄^t τ and ∇Δ̄^t τ for t = 0..=depth.
    pub fn build_stack(&self, depth: usize) -> Result<DerivativeStack> {
        self.require_closed()?;
        self.require_stencil(depth + 1)?;
        Ok(self.stack_unchecked(depth))
    }

    pub(crate) fn stack_unchecked(&self, depth: usize) -> DerivativeStack {
        let velocity = self.velocity();
        let tau = self.diff_field(&velocity);
        let mut lap = vec![tau];
        let mut grad = Vec::with_capacity(depth + 1);
        for t in 0..=depth {
            let g = self.diff_field(&lap[t]);
            if t < depth {
                lap.push(self.diff_field(&g).scaled(-1.0));
            }
            grad.push(g);
        }
        DerivativeStack { curve: self.id, velocity, lap_tau: lap, grad_lap_tau: grad }
    }
}

/// The tower {Δ̄^t τ, ∇Δ̄^t τ} for one curve snapshot.
#[derive(Debug, Clone)]
pub struct DerivativeStack {
    curve: u64,
    velocity: TangentField,
    lap_tau: Vec<TangentField>,
    grad_lap_tau: Vec<TangentField>,
}

impl DerivativeStack {
    pub fn curve_id(&self) -> u64 {
        self.curve
    }

    pub fn depth(&self) -> usize {
        self.lap_tau.len() - 1
    }

    pub fn velocity(&self) -> &TangentField {
        &self.velocity
    }

    pub fn tau(&self) -> &TangentField {
        &self.lap_tau[0]
    }

    /// Δ̄^t τ.
    pub fn lap_tau(&self, t: usize) -> &TangentField {
        &self.lap_tau[t]
    }

    /// ∇Δ̄^t τ.
    pub fn grad_lap_tau(&self, t: usize) -> &TangentField {
        &self.grad_lap_tau[t]
    }

    /// Δ̄^t τ with Δ̄^{-1} τ = 0.
    pub(crate) fn a(&self, t: isize) -> Option<&TangentField> {
        if t < 0 { None } else { Some(&self.lap_tau[t as usize]) }
    }

    pub(crate) fn b(&self, t: isize) -> Option<&TangentField> {
        if t < 0 { None } else { Some(&self.grad_lap_tau[t as usize]) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn great_circle(n: usize) -> DiscreteCurve {
        let pts = (0..n)
            .flat_map(|i| {
                let t = 2.0 * PI * i as f64 / n as f64;
                [t.cos(), t.sin(), 0.0]
            })
            .collect();
        DiscreteCurve::from_points(SpaceForm::unit_sphere(2), pts, true).unwrap()
    }

    #[test]
    fn straight_line_velocity_is_exact() {
        let h = 0.1;
        let pts = (0..20).flat_map(|i| [i as f64 * h, 0.0]).collect();
        let c = DiscreteCurve::new(SpaceForm::flat(2).unwrap(), pts, false, h).unwrap();
        for v in c.velocity().vectors() {
            assert!((v[0] - 1.0).abs() < 1e-13 && v[1] == 0.0);
        }
        assert!(c.tension().inf_norm() < 1e-12);
        assert_eq!(c.rough_laplacian(&c.velocity()), Err(Error::OpenCurveUnsupported));
    }

    #[test]
    fn too_few_points_rejected() {
        let pts = (0..12).flat_map(|i| [i as f64, 0.0]).collect();
        assert!(DiscreteCurve::new(SpaceForm::flat(2).unwrap(), pts, false, 1.0).is_err());
    }

    #[test]
    fn stale_field_rejected() {
        let c = great_circle(32);
        let d = great_circle(32);
        let v = c.velocity();
        assert!(matches!(d.covariant_derivative(&v), Err(Error::FieldCurveMismatch { .. })));
    }

    #[test]
    fn stack_depth_zero_is_tension() {
        let c = great_circle(64);
        let s = c.build_stack(0).unwrap();
        assert_eq!(s.tau(), &c.tension());
        assert!(matches!(c.build_stack(4), Err(Error::StencilTooCoarse { .. })));
    }

    #[test]
    fn resample_is_fixed_point_on_uniform_circle() {
        let c = great_circle(64);
        let r = c.resample_arclength().unwrap();
        let dev = c.points().iter().zip(r.points()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(dev < 1e-10, "{dev}");
        assert!((r.length() - 2.0 * PI).abs() < 1e-2);
    }
}
