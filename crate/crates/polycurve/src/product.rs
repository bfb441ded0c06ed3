//! Curves into products of space forms and the splitting of τ_k.

use crate::curve::DiscreteCurve;
use crate::error::{Error, Result};
use crate::ktension::tension_k_general;
use crate::spaceform::{norm, SpaceForm};

fn same_domain(c1: &DiscreteCurve, c2: &DiscreteCurve) -> bool {
    c1.len() == c2.len() && c1.is_closed() == c2.is_closed() && (c1.h() - c2.h()).abs() <= 1e-12 * c1.h()
}

/// The map x ↦ (c1(x), c2(x)) into the product target.
pub fn product_curve(c1: &DiscreteCurve, c2: &DiscreteCurve) -> Result<DiscreteCurve> {
    if !same_domain(c1, c2) {
        return Err(Error::DomainMismatch);
    }
    let mut pts = Vec::with_capacity(c1.points().len() + c2.points().len());
    for i in 0..c1.len() {
        pts.extend_from_slice(c1.point(i));
        pts.extend_from_slice(c2.point(i));
    }
    DiscreteCurve::new(SpaceForm::product(c1.space().clone(), c2.space().clone()), pts, c1.is_closed(), c1.h())
}

/// Largest pointwise gap between τ_k of the product and the concatenation
/// of the factors' τ_k.
pub fn split_tension_check(c1: &DiscreteCurve, c2: &DiscreteCurve, k: usize) -> Result<f64> {
    let p = product_curve(c1, c2)?;
    let tp = tension_k_general(&p, k)?;
    let t1 = tension_k_general(c1, k)?;
    let t2 = tension_k_general(c2, k)?;
    let m = c1.ambient_dim();
    let mut worst = 0.0f64;
    let mut gap = Vec::with_capacity(p.ambient_dim());
    for i in 0..p.len() {
        let v = tp.field.vector(i);
        gap.clear();
        gap.extend(v[..m].iter().zip(t1.field.vector(i)).map(|(a, b)| a - b));
        gap.extend(v[m..].iter().zip(t2.field.vector(i)).map(|(a, b)| a - b));
        worst = worst.max(norm(&gap));
    }
    Ok(worst)
}

/// The graph x ↦ (x, ψ(x)) with the domain realized as a round circle
/// traversed at unit speed.
pub fn graph_curve(psi: &DiscreteCurve, domain_circle: &SpaceForm) -> Result<DiscreteCurve> {
    let radius = match domain_circle {
        SpaceForm::Sphere { dim: 1, radius } => *radius,
        _ => return Err(Error::InvalidArgument("graph domain must be a 1-sphere".into())),
    };
    psi.require_closed()?;
    let param = psi.len() as f64 * psi.h();
    let circle = 2.0 * std::f64::consts::PI * radius;
    if (circle - param).abs() > 1e-9 * param {
        return Err(Error::LengthMismatch { circle, param });
    }
    let mut pts = Vec::with_capacity(psi.len() * 2);
    for i in 0..psi.len() {
        let t = 2.0 * std::f64::consts::PI * i as f64 / psi.len() as f64;
        let mut p = [radius * t.cos(), radius * t.sin()];
        domain_circle.project_point_in_place(&mut p)?;
        pts.extend_from_slice(&p);
    }
    let domain = DiscreteCurve::new(domain_circle.clone(), pts, true, psi.h())?;
    product_curve(&domain, psi)
}
