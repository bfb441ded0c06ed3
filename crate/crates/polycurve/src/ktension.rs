//! k-tension fields, the constant-curvature circle families and their ODE
//! residuals.

use crate::curve::{DerivativeStack, DiscreteCurve, TangentField};
use crate::error::{Error, Result};
use crate::spaceform::{dot, norm, SpaceForm};

/// Largest supported order.
pub const MAX_ORDER: usize = 6;

/// Which formula produced a k-tension field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TensionPath {
    General,
    SpaceForm,
}

impl TensionPath {
    pub fn as_str(self) -> &'static str {
        match self {
            TensionPath::General => "general",
            TensionPath::SpaceForm => "spaceform",
        }
    }
}

#[derive(Debug, Clone)]
pub struct KTensionResult {
    pub field: TangentField,
    pub l2_norm: f64,
    pub inf_norm: f64,
    pub k: usize,
    pub path: TensionPath,
}

impl KTensionResult {
    fn new(c: &DiscreteCurve, field: TangentField, k: usize, path: TensionPath) -> Self {
        let l2_norm = c.l2_raw(&field, &field).sqrt();
        let inf_norm = field.inf_norm();
        KTensionResult { field, l2_norm, inf_norm, k, path }
    }
}

pub(crate) fn check_order(k: usize, max: usize) -> Result<()> {
    if k == 0 || k > max { Err(Error::InvalidOrder(k, 1, max)) } else { Ok(()) }
}

/// Validates (closed, headroom, order) and builds the stack τ_k needs.
pub(crate) fn stack_for(c: &DiscreteCurve, k: usize) -> Result<DerivativeStack> {
    check_order(k, MAX_ORDER)?;
    c.require_closed()?;
    c.require_stencil(k)?;
    Ok(c.stack_unchecked(k.saturating_sub(1)))
}

/// τ_k assembled from the stack with the abstract curvature operator.
pub(crate) fn assemble_general(c: &DiscreteCurve, st: &DerivativeStack, k: usize) -> TangentField {
    let v = st.velocity();
    let s = (k / 2) as isize;
    let mut out = c.zero_field();
    let mut curv = |sign: f64, x: Option<&TangentField>, y: Option<&TangentField>, z: &TangentField| {
        if let (Some(x), Some(y)) = (x, y) {
            c.curv_add(sign, x, y, z, &mut out);
        }
    };
    if k % 2 == 0 {
        curv(1.0, st.a(2 * s - 2), Some(v), v);
        for l in 1..s {
            curv(1.0, st.b(s + l - 2), st.a(s - l - 1), v);
            curv(-1.0, st.a(s + l - 2), st.b(s - l - 1), v);
        }
        out.axpy(-1.0, st.a(2 * s - 1).unwrap())
    } else {
        curv(1.0, st.a(2 * s - 1), Some(v), v);
        for l in 1..s {
            curv(1.0, st.b(s + l - 1), st.a(s - l - 1), v);
            curv(-1.0, st.a(s + l - 1), st.b(s - l - 1), v);
        }
        curv(1.0, st.b(s - 1), st.a(s - 1), v);
        out.axpy(-1.0, st.a(2 * s).unwrap())
    }
}

/// τ_k from the general even/odd formulas; valid on products too.
pub fn tension_k_general(c: &DiscreteCurve, k: usize) -> Result<KTensionResult> {
    let st = stack_for(c, k)?;
    let f = assemble_general(c, &st, k);
    Ok(KTensionResult::new(c, f, k, TensionPath::General))
}

/// τ_k from the space-form closed forms written in terms of (∇∇)^t τ.
///
/// The metric factor ⟨γ′,γ′⟩ is kept pointwise instead of being replaced by
/// 1, so this agrees with [`tension_k_general`] to round-off.
pub fn tension_k_spaceform(c: &DiscreteCurve, k: usize) -> Result<KTensionResult> {
    let kk = c.space().curvature().ok_or(Error::NotASpaceForm)?;
    let st = stack_for(c, k)?;
    let d = c.ambient_dim();
    let n = c.len();
    let s = k / 2;
    // (∇∇)^t τ = (-1)^t Δ̄^t τ, and likewise for its derivative.
    let sgn = |t: usize| if t % 2 == 0 { 1.0 } else { -1.0 };
    let mut out = vec![0.0; n * d];
    for i in 0..n {
        let r = i * d..(i + 1) * d;
        let v = &st.velocity().as_slice()[r.clone()];
        let vv = dot(v, v);
        let aa = |t: usize| (sgn(t), &st.lap_tau(t).as_slice()[r.clone()]);
        let bb = |t: usize| (sgn(t), &st.grad_lap_tau(t).as_slice()[r.clone()]);
        let o = &mut out[r.clone()];
        let mut add = |c: f64, x: &[f64]| o.iter_mut().zip(x).for_each(|(a, b)| *a += c * b);
        // K{X - ⟨γ′,X⟩γ′} with the metric factor on the first term.
        let frame = |c: f64, (sx, x): (f64, &[f64]), add: &mut dyn FnMut(f64, &[f64])| {
            add(c * kk * sx * vv, x);
            add(-c * kk * sx * dot(v, x), v);
        };
        // K{⟨A_b,γ′⟩∇A_a − ⟨γ′,∇A_a⟩A_b − ⟨∇A_b,γ′⟩A_a + ⟨γ′,A_a⟩∇A_b}
        let cross = |c: f64, a: usize, b: usize, add: &mut dyn FnMut(f64, &[f64])| {
            let ((sa, xa), (sga, ga)) = (aa(a), bb(a));
            let ((sb, xb), (sgb, gb)) = (aa(b), bb(b));
            add(c * kk * sb * dot(xb, v) * sga, ga);
            add(-c * kk * sga * dot(v, ga) * sb, xb);
            add(-c * kk * sgb * dot(gb, v) * sa, xa);
            add(c * kk * sa * dot(v, xa) * sgb, gb);
        };
        if k % 2 == 0 {
            let (s0, top) = aa(2 * s - 1);
            add(s0, top);
            if s >= 1 && 2 * s >= 2 {
                frame(1.0, aa(2 * s - 2), &mut add);
            }
            for l in 1..s {
                cross(-1.0, s + l - 2, s - l - 1, &mut add);
            }
        } else {
            let (s0, top) = aa(2 * s);
            add(-s0, top);
            if s >= 1 {
                frame(-1.0, aa(2 * s - 1), &mut add);
                for l in 1..s {
                    cross(1.0, s + l - 1, s - l - 1, &mut add);
                }
                let ((sa, xa), (sg, ga)) = (aa(s - 1), bb(s - 1));
                add(kk * sa * dot(xa, v) * sg, ga);
                add(-kk * sg * dot(v, ga) * sa, xa);
            }
        }
    }
    let field = TangentField::raw(c.id(), d, out);
    Ok(KTensionResult::new(c, field, k, TensionPath::SpaceForm))
}

/// Constant geodesic curvature of the k-harmonic circles in curvature K.
pub fn constant_curvature_kappa(k: usize, curvature: f64) -> Option<f64> {
    if k == 0 || curvature < 0.0 {
        return None;
    }
    if k == 1 {
        return Some(0.0);
    }
    let s = (k / 2) as f64;
    let kappa = if k % 2 == 0 { ((2.0 * s - 1.0) * curvature).sqrt() } else { (2.0 * s * curvature).sqrt() };
    if kappa == 0.0 { None } else { Some(kappa) }
}

/// Latitude circle of geodesic curvature `kappa`, uniformly sampled.
///
/// The axis is the last ambient coordinate; the circle runs counterclockwise
/// about it, so its curvature vector points towards the north pole.
pub fn circle_curve(space: &SpaceForm, kappa: f64, n: usize) -> Result<DiscreteCurve> {
    let (dim, r) = match space {
        SpaceForm::Sphere { dim, radius } if *dim >= 2 => (*dim, *radius),
        _ => return Err(Error::NotASphere),
    };
    if n < 32 {
        return Err(Error::StencilTooCoarse { n, required: 32 });
    }
    if !(kappa >= 0.0) || !kappa.is_finite() {
        return Err(Error::InvalidArgument(format!("kappa must be finite and >= 0, got {kappa}")));
    }
    let kk = 1.0 / (r * r);
    let z0 = r * kappa / (kk + kappa * kappa).sqrt();
    let rho = r / (1.0 + (r * kappa).powi(2)).sqrt();
    let d = dim + 1;
    let mut pts = vec![0.0; n * d];
    for i in 0..n {
        let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
        let p = &mut pts[i * d..(i + 1) * d];
        p[0] = rho * t.cos();
        p[1] = rho * t.sin();
        p[d - 1] = z0;
        space.project_point_in_place(p)?;
    }
    DiscreteCurve::from_points(space.clone(), pts, true)
}

/// Rotation by +π/2 in the oriented tangent plane of a 2-dim target.
fn rotate(space: &SpaceForm, p: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    match space {
        SpaceForm::Sphere { dim: 2, radius } => Ok(vec![
            (p[1] * v[2] - p[2] * v[1]) / radius,
            (p[2] * v[0] - p[0] * v[2]) / radius,
            (p[0] * v[1] - p[1] * v[0]) / radius,
        ]),
        SpaceForm::Flat { dim: 2 } => Ok(vec![-v[1], v[0]]),
        other => Err(Error::WrongDimension(other.intrinsic_dim())),
    }
}

/// Signed normal component of τ against the oriented unit normal.
pub fn kappa_profile(c: &DiscreteCurve) -> Result<Vec<f64>> {
    c.require_closed()?;
    let v = c.velocity();
    let tau = c.diff_field(&v);
    (0..c.len())
        .map(|i| {
            let nrm = rotate(c.space(), c.point(i), v.vector(i))?;
            let len = norm(&nrm);
            Ok(if len > 0.0 { dot(tau.vector(i), &nrm) / len } else { 0.0 })
        })
        .collect()
}

/// Curvature of the discrete curve in its own parametrization,
/// ⟨τ, N⟩ / ‖γ′‖², which is exact on uniformly sampled circles.
pub fn geodesic_curvature(c: &DiscreteCurve) -> Result<Vec<f64>> {
    let prof = kappa_profile(c)?;
    let v = c.velocity();
    Ok(prof.iter().zip(v.vectors()).map(|(k, v)| k / dot(v, v)).collect())
}

fn periodic_diff(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    (0..n).map(|i| (f[(i + 1) % n] - f[(i + n - 1) % n]) / (2.0 * h)).collect()
}

/// Normal and tangent residuals of the intrinsic 3-harmonic equations in a
/// surface, evaluated exactly as
///
/// normal: κ⁗ − 12(κ′)² − 10κ²κ″ + κ⁵ − 3κ(κ′)² + K(κ″ − 2κ³)
/// tangent: κκ‴ − 2κ³κ′ + 2κ′κ″
pub fn frenet_residual_3(kappa: &[f64], h: f64, curvature: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if kappa.len() < 64 {
        return Err(Error::StencilTooCoarse { n: kappa.len(), required: 64 });
    }
    let k1 = periodic_diff(kappa, h);
    let k2 = periodic_diff(&k1, h);
    let k3 = periodic_diff(&k2, h);
    let k4 = periodic_diff(&k3, h);
    let mut normal = Vec::with_capacity(kappa.len());
    let mut tangent = Vec::with_capacity(kappa.len());
    for i in 0..kappa.len() {
        let (k, d1, d2, d3, d4) = (kappa[i], k1[i], k2[i], k3[i], k4[i]);
        normal.push(
            d4 - 12.0 * d1 * d1 - 10.0 * k * k * d2 + k.powi(5) - 3.0 * k * d1 * d1
                + curvature * (d2 - 2.0 * k.powi(3)),
        );
        tangent.push(k * d3 - 2.0 * k.powi(3) * d1 + 2.0 * d1 * d2);
    }
    Ok((normal, tangent))
}

/// Extrinsic sixth-order residual on the unit sphere, with its tangential
/// projection.
#[derive(Debug, Clone)]
pub struct ExtrinsicResidual {
    /// Ambient residual vectors, row-major.
    pub ambient: Vec<f64>,
    pub tangential: TangentField,
    pub dim: usize,
}

impl ExtrinsicResidual {
    pub fn ambient_inf(&self) -> f64 {
        self.ambient.chunks_exact(self.dim).map(norm).fold(0.0, f64::max)
    }

    pub fn tangential_inf(&self) -> f64 {
        self.tangential.inf_norm()
    }
}

/// Evaluates −γ⁽⁶⁾ − 2γ⁽⁴⁾ − (2g₁₃+3)γ″ + 4g₂₃γ′ + (1 + 9g₂₄ + 8g₃₃)γ with
/// g_ij = ⟨γ⁽ⁱ⁾, γ⁽ʲ⁾⟩, all derivatives by iterated periodic central
/// differences of the ambient samples.
pub fn extrinsic_residual_3(c: &DiscreteCurve) -> Result<ExtrinsicResidual> {
    match c.space() {
        SpaceForm::Sphere { radius, .. } if (radius - 1.0).abs() <= 1e-12 => {}
        _ => return Err(Error::NotUnitSphere),
    }
    c.require_closed()?;
    if c.len() < 128 {
        return Err(Error::StencilTooCoarse { n: c.len(), required: 128 });
    }
    let d = c.ambient_dim();
    let n = c.len();
    let h = c.h();
    let diff = |f: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; f.len()];
        for i in 0..n {
            for a in 0..d {
                out[i * d + a] = (f[((i + 1) % n) * d + a] - f[((i + n - 1) % n) * d + a]) / (2.0 * h);
            }
        }
        out
    };
    let mut ders = vec![c.points().to_vec()];
    for j in 0..6 {
        let next = diff(&ders[j]);
        ders.push(next);
    }
    let mut ambient = vec![0.0; n * d];
    for i in 0..n {
        let r = i * d..(i + 1) * d;
        let g = |a: usize, b: usize| dot(&ders[a][r.clone()], &ders[b][r.clone()]);
        let (g13, g23, g24, g33) = (g(1, 3), g(2, 3), g(2, 4), g(3, 3));
        for a in 0..d {
            let at = |m: usize| ders[m][i * d + a];
            ambient[i * d + a] = -at(6) - 2.0 * at(4) - (2.0 * g13 + 3.0) * at(2)
                + 4.0 * g23 * at(1)
                + (1.0 + 9.0 * g24 + 8.0 * g33) * at(0);
        }
    }
    let tangential = c.field_from_ambient(ambient.clone())?;
    Ok(ExtrinsicResidual { ambient, tangential, dim: d })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_values() {
        assert_eq!(constant_curvature_kappa(2, 1.0), Some(1.0));
        assert_eq!(constant_curvature_kappa(3, 1.0), Some(2f64.sqrt()));
        assert_eq!(constant_curvature_kappa(1, 7.0), Some(0.0));
        assert!((constant_curvature_kappa(4, 4.0).unwrap() - 2.0 * 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(constant_curvature_kappa(2, 0.0), None);
    }

    #[test]
    fn circle_heights() {
        let s = SpaceForm::unit_sphere(2);
        let c = circle_curve(&s, 2f64.sqrt(), 64).unwrap();
        assert!((c.point(0)[2] - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        let c = circle_curve(&s, 1.0, 64).unwrap();
        assert!((c.point(5)[2] - 0.5f64.sqrt()).abs() < 1e-15);
        let c = circle_curve(&s, 0.0, 64).unwrap();
        assert_eq!(c.point(3)[2], 0.0);
        assert_eq!(circle_curve(&SpaceForm::flat(2).unwrap(), 1.0, 64).unwrap_err(), Error::NotASphere);
    }

    #[test]
    fn frenet_constant_profiles() {
        let (nr, tr) = frenet_residual_3(&[0.0; 64], 0.1, 1.0).unwrap();
        assert!(nr.iter().chain(&tr).all(|&x| x == 0.0));
        let (nr, _) = frenet_residual_3(&[1.0; 64], 0.1, 1.0).unwrap();
        assert!(nr.iter().all(|&x| x == -1.0));
        let r2 = 2f64.sqrt();
        let (nr, tr) = frenet_residual_3(&[r2; 64], 0.1, 1.0).unwrap();
        assert!(nr.iter().all(|x| x.abs() < 1e-12));
        assert!(tr.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn orientation_flips_sign() {
        let s = SpaceForm::unit_sphere(2);
        let c = circle_curve(&s, 1.0, 64).unwrap();
        let k = geodesic_curvature(&c).unwrap();
        assert!(k.iter().all(|x| (x - 1.0).abs() < 1e-10), "{k:?}");
        let mut rev = Vec::new();
        for i in (0..64).rev() {
            rev.extend_from_slice(c.point(i));
        }
        let r = DiscreteCurve::from_points(s, rev, true).unwrap();
        assert!(geodesic_curvature(&r).unwrap().iter().all(|x| (x + 1.0).abs() < 1e-10));
    }
}
