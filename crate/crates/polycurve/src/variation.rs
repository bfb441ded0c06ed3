//! Second variation: the linearized k-tension (Jacobi operator) on
//! parallel-curvature targets, a finite-difference Hessian, and spectra.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curve::{DerivativeStack, DiscreteCurve, TangentField};
use crate::energy::{energy_unchecked, perturb_raw, scaled_residual};
use crate::error::{Error, Result};
use crate::exec::{map_indices, Execution};
use crate::ktension::{self, check_order};
use crate::spaceform::dot;

/// Largest order for which the Jacobi operator is assembled.
pub const MAX_JACOBI_ORDER: usize = 4;

/// The Jacobi operator J_k of one curve snapshot, i.e. the derivative of
/// τ_k along a variation W. Curvature-derivative terms are absent because
/// every supported target has parallel curvature.
#[derive(Debug, Clone)]
pub struct JacobiOperator<'a> {
    curve: &'a DiscreteCurve,
    stack: DerivativeStack,
    k: usize,
}

impl<'a> JacobiOperator<'a> {
    pub fn new(c: &'a DiscreteCurve, k: usize) -> Result<Self> {
        check_order(k, MAX_JACOBI_ORDER)?;
        if !c.space().has_parallel_curvature() {
            return Err(Error::NotParallelCurvature);
        }
        c.require_closed()?;
        c.require_stencil(k + 1)?;
        Ok(JacobiOperator { curve: c, stack: c.stack_unchecked(k.saturating_sub(1)), k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn apply(&self, w: &TangentField) -> Result<TangentField> {
        self.curve.check_field(w)?;
        Ok(self.apply_unchecked(w))
    }

    fn apply_unchecked(&self, w: &TangentField) -> TangentField {
        let c = self.curve;
        let st = &self.stack;
        let v = st.velocity();
        let k = self.k;
        let top = k - 1;
        let rw = |x: &TangentField| {
            let mut out = c.zero_field();
            c.curv_add(1.0, w, v, x, &mut out);
            out
        };
        let dv = c.diff_field(w);

        // δτ = −Δ̄W + R(W,γ′)γ′, then δ(Δ̄ω) = Δ̄δω − ∇(R(W,γ′)ω) − R(W,γ′)∇ω.
        let mut da = vec![c.lap_field(w).scaled(-1.0).add(&rw(v))];
        for a in 1..=top {
            let prev = st.lap_tau(a - 1);
            let next = c.lap_field(&da[a - 1]).sub(&c.diff_field(&rw(prev))).sub(&rw(st.grad_lap_tau(a - 1)));
            da.push(next);
        }
        // δ(∇ω) = ∇δω + R(W,γ′)ω.
        let db: Vec<TangentField> =
            (0..top).map(|a| c.diff_field(&da[a]).add(&rw(st.lap_tau(a)))).collect();

        let a = |t: isize| (t >= 0).then(|| (st.lap_tau(t as usize), &da[t as usize]));
        let b = |t: isize| (t >= 0).then(|| (st.grad_lap_tau(t as usize), &db[t as usize]));
        let vel = Some((v, &dv));
        let mut out = c.zero_field();
        // δ[R(X,Y)γ′] = R(δX,Y)γ′ + R(X,δY)γ′ + R(X,Y)δγ′.
        let mut dr = |sign: f64, x: Option<(&TangentField, &TangentField)>, y: Option<(&TangentField, &TangentField)>| {
            if let (Some((x, dx)), Some((y, dy))) = (x, y) {
                c.curv_add(sign, dx, y, v, &mut out);
                c.curv_add(sign, x, dy, v, &mut out);
                c.curv_add(sign, x, y, &dv, &mut out);
            }
        };
        let s = (k / 2) as isize;
        let lead = if k % 2 == 0 {
            dr(1.0, a(2 * s - 2), vel);
            for l in 1..s {
                dr(1.0, b(s + l - 2), a(s - l - 1));
                dr(-1.0, a(s + l - 2), b(s - l - 1));
            }
            &da[(2 * s - 1) as usize]
        } else {
            dr(1.0, a(2 * s - 1), vel);
            for l in 1..s {
                dr(1.0, b(s + l - 1), a(s - l - 1));
                dr(-1.0, a(s + l - 1), b(s - l - 1));
            }
            dr(1.0, b(s - 1), a(s - 1));
            &da[(2 * s) as usize]
        };
        out.axpy(-1.0, lead)
    }
}

/// J_k(W) for a single variation.
pub fn jacobi_apply(c: &DiscreteCurve, k: usize, w: &TangentField) -> Result<TangentField> {
    JacobiOperator::new(c, k)?.apply(w)
}

/// The classical Jacobi operator L(W) = −Δ̄W + R(W,γ′)γ′.
pub fn classical_jacobi(c: &DiscreteCurve, w: &TangentField) -> Result<TangentField> {
    c.check_field(w)?;
    let v = c.velocity();
    let mut out = c.lap_field(w).scaled(-1.0);
    c.curv_add(1.0, w, &v, &v, &mut out);
    Ok(out)
}

fn is_critical(c: &DiscreteCurve, k: usize) -> Result<bool> {
    let tk = ktension::tension_k_general(c, k)?;
    Ok(scaled_residual(c, k, tk.inf_norm) <= 1e-3)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HessianProbe {
    pub value: f64,
    /// False when the curve is not numerically k-harmonic, where the
    /// Hessian is not intrinsically defined.
    pub critical: bool,
}

fn mixed_difference(c: &DiscreteCurve, k: usize, v: &[f64], w: &[f64], step: f64) -> f64 {
    let comb = |a: f64, b: f64| -> f64 {
        let dir: Vec<f64> = v.iter().zip(w).map(|(x, y)| a * x + b * y).collect();
        energy_unchecked(&perturb_raw(c, &dir, 1.0), k)
    };
    let pp = comb(step, step);
    let pm = comb(step, -step);
    let mp = comb(-step, step);
    let mm = comb(-step, -step);
    ((pp + mm) - (pm + mp)) / (4.0 * step * step)
}

/// Mixed central difference of E_k over (t, r) ↦ exp(p, tV + rW).
pub fn hessian_fd(c: &DiscreteCurve, k: usize, v: &TangentField, w: &TangentField, step: f64) -> Result<HessianProbe> {
    c.check_field(v)?;
    c.check_field(w)?;
    if !(1e-5..=1e-2).contains(&step) {
        return Err(Error::InvalidArgument(format!("step must lie in [1e-5, 1e-2], got {step}")));
    }
    let critical = is_critical(c, k)?;
    if !critical {
        log::warn!("Hessian requested away from a critical curve (k = {k})");
    }
    Ok(HessianProbe { value: mixed_difference(c, k, v.as_slice(), w.as_slice(), step), critical })
}

/// Tangent-orthonormal basis of the space of tangent fields: one frame per
/// node, optionally rotated by a random orthogonal matrix per node.
#[derive(Debug, Clone)]
pub struct FieldBasis {
    curve: u64,
    dim: usize,
    per_node: usize,
    frames: Vec<Vec<Vec<f64>>>,
}

impl FieldBasis {
    pub fn canonical(c: &DiscreteCurve) -> Self {
        let frames: Vec<_> = (0..c.len()).map(|i| c.space().tangent_basis(c.point(i))).collect();
        FieldBasis { curve: c.id(), dim: c.ambient_dim(), per_node: c.space().intrinsic_dim(), frames }
    }

    pub fn rotated(c: &DiscreteCurve, seed: u64) -> Self {
        let mut b = Self::canonical(c);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = b.per_node;
        for frame in &mut b.frames {
            let g = DMatrix::from_fn(m, m, |_, _| rng.gen_range(-1.0..1.0));
            let q = g.qr().q();
            let old = frame.clone();
            for (j, e) in frame.iter_mut().enumerate() {
                for (a, x) in e.iter_mut().enumerate() {
                    *x = (0..m).map(|r| q[(r, j)] * old[r][a]).sum();
                }
            }
        }
        b
    }

    pub fn len(&self) -> usize {
        self.frames.len() * self.per_node
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    fn node_of(&self, idx: usize) -> (usize, &[f64]) {
        let node = idx / self.per_node;
        (node, &self.frames[node][idx % self.per_node])
    }

    pub fn field(&self, idx: usize) -> TangentField {
        let (node, e) = self.node_of(idx);
        let mut data = vec![0.0; self.frames.len() * self.dim];
        data[node * self.dim..(node + 1) * self.dim].copy_from_slice(e);
        TangentField::raw(self.curve, self.dim, data)
    }

    /// Coefficient of a field along basis element `idx`.
    pub fn coefficient(&self, f: &TangentField, idx: usize) -> f64 {
        let (node, e) = self.node_of(idx);
        dot(f.vector(node), e)
    }

    /// Matrix of a linear field operator: M[a][b] = ⟨e_a, op(e_b)⟩.
    pub fn operator_matrix<F>(&self, exec: Execution, op: F) -> DMatrix<f64>
    where
        F: Fn(&TangentField) -> TangentField + Sync + Send,
    {
        let n = self.len();
        let cols = map_indices(exec, n, |b| {
            let img = op(&self.field(b));
            (0..n).map(|a| self.coefficient(&img, a)).collect::<Vec<f64>>()
        });
        DMatrix::from_fn(n, n, |a, b| cols[b][a])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HessianMode {
    Fd,
    Jacobi,
}

impl HessianMode {
    pub fn as_str(self) -> &'static str {
        match self {
            HessianMode::Fd => "fd",
            HessianMode::Jacobi => "jacobi",
        }
    }
}

#[derive(Debug, Clone)]
pub struct HessianMatrix {
    /// Symmetrized Hessian in the field basis.
    pub matrix: DMatrix<f64>,
    /// ‖H − Hᵀ‖₂ / ‖H‖₂ before symmetrization.
    pub asymmetry: f64,
    pub critical: bool,
    pub mode: HessianMode,
}

/// Step used for finite-difference Hessian entries.
pub const FD_STEP: f64 = 1e-4;

pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    m.clone().singular_values().iter().cloned().fold(0.0, f64::max)
}

pub fn hessian_matrix(c: &DiscreteCurve, k: usize, mode: HessianMode, exec: Execution) -> Result<HessianMatrix> {
    hessian_matrix_in(c, k, mode, &FieldBasis::canonical(c), exec)
}

pub fn hessian_matrix_in(
    c: &DiscreteCurve,
    k: usize,
    mode: HessianMode,
    basis: &FieldBasis,
    exec: Execution,
) -> Result<HessianMatrix> {
    let critical = is_critical(c, k)?;
    if !critical {
        log::warn!("Hessian assembled away from a critical curve (k = {k})");
    }
    let n = basis.len();
    match mode {
        HessianMode::Jacobi => {
            let op = JacobiOperator::new(c, k)?;
            let h = c.h();
            let raw = basis.operator_matrix(exec, |w| op.apply_unchecked(w)) * h;
            let skew = &raw - raw.transpose();
            let norm = spectral_norm(&raw);
            let asymmetry = if norm > 0.0 { spectral_norm(&skew) / norm } else { 0.0 };
            let matrix = (&raw + raw.transpose()) * 0.5;
            Ok(HessianMatrix { matrix, asymmetry, critical, mode })
        }
        HessianMode::Fd => {
            check_order(k, ktension::MAX_ORDER)?;
            c.require_closed()?;
            c.require_stencil(k)?;
            let fields: Vec<Vec<f64>> = (0..n).map(|a| basis.field(a).as_slice().to_vec()).collect();
            let cols = map_indices(exec, n, |b| {
                (0..=b).map(|a| mixed_difference(c, k, &fields[a], &fields[b], FD_STEP)).collect::<Vec<f64>>()
            });
            let matrix = DMatrix::from_fn(n, n, |a, b| if a <= b { cols[b][a] } else { cols[a][b] });
            Ok(HessianMatrix { matrix, asymmetry: 0.0, critical, mode })
        }
    }
}

/// Eigenvalues with index and nullity counts.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<f64>,
    pub index: usize,
    pub nullity: usize,
    pub epsilon: f64,
    pub basis_dim: usize,
    pub k: usize,
}

/// Default relative zero tolerance for eigenvalue counting.
pub const DEFAULT_RELATIVE_EPSILON: f64 = 1e-6;

/// Full symmetric eigendecomposition; ε defaults to 1e−6·max|λ|.
pub fn index_nullity(h: &DMatrix<f64>, k: usize, epsilon: Option<f64>) -> Result<SpectrumReport> {
    if !h.is_square() {
        return Err(Error::InvalidArgument("Hessian must be square".into()));
    }
    let sym = (h + h.transpose()) * 0.5;
    let mut eigenvalues: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().cloned().collect();
    eigenvalues.sort_by(f64::total_cmp);
    let max = eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let epsilon = match epsilon {
        Some(e) if e > 0.0 => e,
        Some(e) => return Err(Error::InvalidArgument(format!("epsilon must be positive, got {e}"))),
        None => DEFAULT_RELATIVE_EPSILON * max,
    };
    let index = eigenvalues.iter().filter(|&&l| l < -epsilon).count();
    let nullity = eigenvalues.iter().filter(|&&l| l.abs() <= epsilon).count();
    Ok(SpectrumReport { basis_dim: eigenvalues.len(), eigenvalues, index, nullity, epsilon, k })
}

/// Kernel dimensions of J_k and of L∘Δ̄^{k−2}∘L on a harmonic curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullityCheck {
    pub dim_ker_jk: usize,
    pub dim_ker_composite: usize,
    /// Relative singular-value threshold applied to both matrices.
    pub epsilon: f64,
}

/// Number of singular values at or below `rel * max σ`.
pub fn kernel_dim(m: &DMatrix<f64>, rel: f64) -> usize {
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s <= rel * max).count()
}

pub fn nullity_characterization_check(c: &DiscreteCurve, k: usize, epsilon: f64, exec: Execution) -> Result<NullityCheck> {
    if k < 2 {
        return Err(Error::InvalidOrder(k, 2, MAX_JACOBI_ORDER));
    }
    let tau = c.tension().inf_norm() * c.length_scale();
    if tau > 1e-6 {
        return Err(Error::NotHarmonic(tau));
    }
    let op = JacobiOperator::new(c, k)?;
    let basis = FieldBasis::canonical(c);
    let jk = basis.operator_matrix(exec, |w| op.apply_unchecked(w));
    let l = basis.operator_matrix(exec, |w| classical_jacobi(c, w).expect("same curve"));
    let lap = basis.operator_matrix(exec, |w| c.lap_field(w));
    let mut comp = l.clone();
    for _ in 0..k - 2 {
        comp = &lap * comp;
    }
    comp = &l * comp;
    Ok(NullityCheck { dim_ker_jk: kernel_dim(&jk, epsilon), dim_ker_composite: kernel_dim(&comp, epsilon), epsilon })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ktension::circle_curve;
    use crate::SpaceForm;

    #[test]
    fn identity_spectrum() {
        let r = index_nullity(&DMatrix::identity(5, 5), 1, None).unwrap();
        assert_eq!((r.index, r.nullity, r.basis_dim), (0, 0, 5));
    }

    #[test]
    fn zero_variation_maps_to_zero() {
        let c = circle_curve(&SpaceForm::unit_sphere(2), 1.0, 64).unwrap();
        for k in 1..=3 {
            assert_eq!(jacobi_apply(&c, k, &c.zero_field()).unwrap().inf_norm(), 0.0);
        }
    }

    #[test]
    fn first_order_operator_is_negative_classical_jacobi() {
        let c = circle_curve(&SpaceForm::unit_sphere(2), 0.4, 64).unwrap();
        let w = c.field_from_fn(|i, _| vec![(i as f64 * 0.3).sin(), 0.2, (i as f64 * 0.1).cos()]);
        let a = jacobi_apply(&c, 1, &w).unwrap();
        let b = classical_jacobi(&c, &w).unwrap();
        assert!(a.add(&b).inf_norm() < 1e-12 * b.inf_norm());
    }

    #[test]
    fn fd_probe_is_symmetric() {
        let c = circle_curve(&SpaceForm::unit_sphere(2), 1.0, 64).unwrap();
        let v = c.field_from_fn(|i, _| vec![(i as f64).sin(), 1.0, 0.5]);
        let w = c.field_from_fn(|i, _| vec![0.3, (i as f64 * 0.2).cos(), -1.0]);
        let a = hessian_fd(&c, 2, &v, &w, 1e-4).unwrap();
        let b = hessian_fd(&c, 2, &w, &v, 1e-4).unwrap();
        assert_eq!(a.value, b.value);
        assert!(a.critical);
        assert_eq!(hessian_fd(&c, 2, &c.zero_field(), &w, 1e-4).unwrap().value, 0.0);
    }
}
