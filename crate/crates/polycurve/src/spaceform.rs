//! Constant-curvature targets realized in a Euclidean ambient space.
//!
//! Spheres live in R^{dim+1}, flat spaces in R^dim, and products concatenate
//! the ambient coordinates of their two factors.

use crate::error::{Error, Result};

/// Relative membership tolerance for sphere points.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

/// A sphere, a flat space, or a product of two such targets.
#[derive(Debug, Clone, PartialEq)]
pub enum SpaceForm {
    Sphere { dim: usize, radius: f64 },
    Flat { dim: usize },
    Product(Box<SpaceForm>, Box<SpaceForm>),
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

impl SpaceForm {
    pub fn sphere(dim: usize, radius: f64) -> Result<Self> {
        if dim == 0 || !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "sphere needs dim >= 1 and radius > 0, got dim {dim}, radius {radius}"
            )));
        }
        Ok(SpaceForm::Sphere { dim, radius })
    }

    pub fn unit_sphere(dim: usize) -> Self {
        SpaceForm::Sphere { dim, radius: 1.0 }
    }

    pub fn flat(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("flat space needs dim >= 1".into()));
        }
        Ok(SpaceForm::Flat { dim })
    }

    pub fn product(a: SpaceForm, b: SpaceForm) -> Self {
        SpaceForm::Product(Box::new(a), Box::new(b))
    }

    pub fn intrinsic_dim(&self) -> usize {
        match self {
            SpaceForm::Sphere { dim, .. } | SpaceForm::Flat { dim } => *dim,
            SpaceForm::Product(a, b) => a.intrinsic_dim() + b.intrinsic_dim(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            SpaceForm::Sphere { dim, .. } => dim + 1,
            SpaceForm::Flat { dim } => *dim,
            SpaceForm::Product(a, b) => a.ambient_dim() + b.ambient_dim(),
        }
    }

    /// Sectional curvature; `None` for products, which are not space forms.
    pub fn curvature(&self) -> Option<f64> {
        match self {
            SpaceForm::Sphere { radius, .. } => Some(1.0 / (radius * radius)),
            SpaceForm::Flat { .. } => Some(0.0),
            SpaceForm::Product(..) => None,
        }
    }

    pub fn radius(&self) -> Option<f64> {
        match self {
            SpaceForm::Sphere { radius, .. } => Some(*radius),
            _ => None,
        }
    }

    pub fn is_space_form(&self) -> bool {
        self.curvature().is_some()
    }

    /// Every variant has a parallel curvature tensor.
    pub fn has_parallel_curvature(&self) -> bool {
        match self {
            SpaceForm::Sphere { .. } | SpaceForm::Flat { .. } => true,
            SpaceForm::Product(a, b) => a.has_parallel_curvature() && b.has_parallel_curvature(),
        }
    }

    /// Largest deviation of `x` from the target, relative to the radius.
    pub fn membership_defect(&self, x: &[f64]) -> f64 {
        match self {
            SpaceForm::Sphere { radius, .. } => (norm(x) - radius).abs() / radius,
            SpaceForm::Flat { .. } => 0.0,
            SpaceForm::Product(a, b) => {
                let (xa, xb) = x.split_at(a.ambient_dim());
                a.membership_defect(xa).max(b.membership_defect(xb))
            }
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.ambient_dim() && self.membership_defect(x) <= MEMBERSHIP_TOL
    }

    pub fn project_point(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = x.to_vec();
        self.project_point_in_place(&mut out)?;
        Ok(out)
    }

    pub fn project_point_in_place(&self, x: &mut [f64]) -> Result<()> {
        match self {
            SpaceForm::Sphere { radius, .. } => {
                let n = norm(x);
                if n <= 1e-300 {
                    return Err(Error::ZeroVector);
                }
                let s = radius / n;
                x.iter_mut().for_each(|c| *c *= s);
                Ok(())
            }
            SpaceForm::Flat { .. } => Ok(()),
            SpaceForm::Product(a, b) => {
                let (xa, xb) = x.split_at_mut(a.ambient_dim());
                a.project_point_in_place(xa)?;
                b.project_point_in_place(xb)
            }
        }
    }

    pub fn project_tangent(&self, p: &[f64], v: &[f64]) -> Vec<f64> {
        let mut out = v.to_vec();
        self.project_tangent_in_place(p, &mut out);
        out
    }

    pub fn project_tangent_in_place(&self, p: &[f64], v: &mut [f64]) {
        match self {
            SpaceForm::Sphere { radius, .. } => {
                let c = dot(v, p) / (radius * radius);
                v.iter_mut().zip(p).for_each(|(vi, pi)| *vi -= c * pi);
            }
            SpaceForm::Flat { .. } => {}
            SpaceForm::Product(a, b) => {
                let m = a.ambient_dim();
                let (pa, pb) = p.split_at(m);
                let (va, vb) = v.split_at_mut(m);
                a.project_tangent_in_place(pa, va);
                b.project_tangent_in_place(pb, vb);
            }
        }
    }

    /// R(V,W)Z for tangent vectors at `p`.
    pub fn curvature_op(&self, p: &[f64], v: &[f64], w: &[f64], z: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        self.curvature_op_add(p, 1.0, v, w, z, &mut out);
        out
    }

    /// Accumulates `scale * R(V,W)Z` into `out`.
    pub(crate) fn curvature_op_add(
        &self,
        p: &[f64],
        scale: f64,
        v: &[f64],
        w: &[f64],
        z: &[f64],
        out: &mut [f64],
    ) {
        match self {
            SpaceForm::Sphere { radius, .. } => {
                let k = scale / (radius * radius);
                let a = k * dot(w, z);
                let b = k * dot(z, v);
                for i in 0..out.len() {
                    out[i] += a * v[i] - b * w[i];
                }
            }
            SpaceForm::Flat { .. } => {}
            SpaceForm::Product(fa, fb) => {
                let m = fa.ambient_dim();
                let (oa, ob) = out.split_at_mut(m);
                fa.curvature_op_add(&p[..m], scale, &v[..m], &w[..m], &z[..m], oa);
                fb.curvature_op_add(&p[m..], scale, &v[m..], &w[m..], &z[m..], ob);
            }
        }
    }

    pub fn exp_map(&self, p: &[f64], v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; p.len()];
        self.exp_map_into(p, v, &mut out);
        out
    }

    pub(crate) fn exp_map_into(&self, p: &[f64], v: &[f64], out: &mut [f64]) {
        match self {
            SpaceForm::Sphere { radius, .. } => {
                let nv = norm(v);
                if nv <= 1e-14 {
                    out.copy_from_slice(p);
                    return;
                }
                let th = nv / radius;
                let (c, s) = (th.cos(), radius * th.sin() / nv);
                for i in 0..out.len() {
                    out[i] = c * p[i] + s * v[i];
                }
                // Re-normalize so the result passes membership exactly.
                let r = radius / norm(out);
                out.iter_mut().for_each(|x| *x *= r);
            }
            SpaceForm::Flat { .. } => {
                for i in 0..out.len() {
                    out[i] = p[i] + v[i];
                }
            }
            SpaceForm::Product(a, b) => {
                let m = a.ambient_dim();
                let (oa, ob) = out.split_at_mut(m);
                a.exp_map_into(&p[..m], &v[..m], oa);
                b.exp_map_into(&p[m..], &v[m..], ob);
            }
        }
    }

    /// Geodesic distance between two points of the target.
    pub fn distance(&self, p: &[f64], q: &[f64]) -> f64 {
        match self {
            SpaceForm::Sphere { radius, .. } => {
                let c = dot(p, q);
                let mut cross = 0.0;
                for i in 0..p.len() {
                    for j in (i + 1)..p.len() {
                        let w = p[i] * q[j] - p[j] * q[i];
                        cross += w * w;
                    }
                }
                radius * cross.sqrt().atan2(c)
            }
            SpaceForm::Flat { .. } => p.iter().zip(q).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt(),
            SpaceForm::Product(a, b) => {
                let m = a.ambient_dim();
                let da = a.distance(&p[..m], &q[..m]);
                let db = b.distance(&p[m..], &q[m..]);
                da.hypot(db)
            }
        }
    }

    /// Point at fraction `t` along the minimizing geodesic from `p` to `q`.
    pub fn geodesic_interp(&self, p: &[f64], q: &[f64], t: f64) -> Vec<f64> {
        let mut out = vec![0.0; p.len()];
        self.geodesic_interp_into(p, q, t, &mut out);
        out
    }

    fn geodesic_interp_into(&self, p: &[f64], q: &[f64], t: f64, out: &mut [f64]) {
        match self {
            SpaceForm::Sphere { radius, .. } => {
                let th = self.distance(p, q) / radius;
                if th < 1e-12 {
                    for i in 0..out.len() {
                        out[i] = p[i] + t * (q[i] - p[i]);
                    }
                } else {
                    let s = th.sin();
                    let a = ((1.0 - t) * th).sin() / s;
                    let b = (t * th).sin() / s;
                    for i in 0..out.len() {
                        out[i] = a * p[i] + b * q[i];
                    }
                }
                let r = radius / norm(out);
                out.iter_mut().for_each(|x| *x *= r);
            }
            SpaceForm::Flat { .. } => {
                for i in 0..out.len() {
                    out[i] = p[i] + t * (q[i] - p[i]);
                }
            }
            SpaceForm::Product(a, b) => {
                let m = a.ambient_dim();
                let (oa, ob) = out.split_at_mut(m);
                a.geodesic_interp_into(&p[..m], &q[..m], t, oa);
                b.geodesic_interp_into(&p[m..], &q[m..], t, ob);
            }
        }
    }

    /// Orthonormal basis of the tangent space at `p`, built by projecting the
    /// ambient coordinate axes and orthonormalizing.
    pub fn tangent_basis(&self, p: &[f64]) -> Vec<Vec<f64>> {
        match self {
            SpaceForm::Product(a, b) => {
                let m = a.ambient_dim();
                let n = self.ambient_dim();
                let mut out = Vec::with_capacity(self.intrinsic_dim());
                for e in a.tangent_basis(&p[..m]) {
                    let mut v = e;
                    v.resize(n, 0.0);
                    out.push(v);
                }
                for e in b.tangent_basis(&p[m..]) {
                    let mut v = vec![0.0; m];
                    v.extend(e);
                    out.push(v);
                }
                out
            }
            _ => {
                let n = self.ambient_dim();
                let want = self.intrinsic_dim();
                // Axes least aligned with p first, for a well conditioned sweep.
                let mut axes: Vec<usize> = (0..n).collect();
                axes.sort_by(|&i, &j| p[i].abs().total_cmp(&p[j].abs()));
                let mut out: Vec<Vec<f64>> = Vec::with_capacity(want);
                for ax in axes {
                    if out.len() == want {
                        break;
                    }
                    let mut v = vec![0.0; n];
                    v[ax] = 1.0;
                    self.project_tangent_in_place(p, &mut v);
                    for _ in 0..2 {
                        for e in &out {
                            let c = dot(&v, e);
                            v.iter_mut().zip(e).for_each(|(a, b)| *a -= c * b);
                        }
                    }
                    let nv = norm(&v);
                    if nv > 1e-6 {
                        v.iter_mut().for_each(|a| *a /= nv);
                        out.push(v);
                    }
                }
                out
            }
        }
    }
}
