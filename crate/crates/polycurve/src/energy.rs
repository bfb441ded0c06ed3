//! k-energies, the first-variation check and steepest-descent flows.

use std::io::Write;
use std::sync::OnceLock;

use crate::curve::{DiscreteCurve, TangentField};
use crate::error::{Error, Result};
use crate::ktension::{self, circle_curve, check_order, MAX_ORDER};
use crate::spaceform::SpaceForm;

/// E_k: ½∫‖γ′‖² for k = 1, ½‖Δ̄^{s−1}τ‖² for k = 2s, ½‖∇Δ̄^{s−1}τ‖² for
/// k = 2s+1.
pub fn energy_k(c: &DiscreteCurve, k: usize) -> Result<f64> {
    check_order(k, MAX_ORDER)?;
    c.require_closed()?;
    c.require_stencil(k)?;
    Ok(energy_unchecked(c, k))
}

pub(crate) fn energy_unchecked(c: &DiscreteCurve, k: usize) -> f64 {
    if k == 1 {
        let v = c.velocity();
        return 0.5 * c.l2_raw(&v, &v);
    }
    let s = k / 2;
    let st = c.stack_unchecked(s - 1);
    let f = if k % 2 == 0 { st.lap_tau(s - 1) } else { st.grad_lap_tau(s - 1) };
    0.5 * c.l2_raw(f, f)
}

/// Moves every sample along `dir` by `t` without resampling.
pub fn perturb(c: &DiscreteCurve, dir: &TangentField, t: f64) -> Result<DiscreteCurve> {
    c.check_field(dir)?;
    Ok(perturb_raw(c, dir.as_slice(), t))
}

pub(crate) fn perturb_raw(c: &DiscreteCurve, dir: &[f64], t: f64) -> DiscreteCurve {
    let d = c.ambient_dim();
    let mut pts = vec![0.0; c.points().len()];
    let mut step = vec![0.0; d];
    for i in 0..c.len() {
        let r = i * d..(i + 1) * d;
        step.iter_mut().zip(&dir[r.clone()]).for_each(|(s, v)| *s = t * v);
        c.space().exp_map_into(c.point(i), &step, &mut pts[r]);
    }
    c.with_points(pts)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstVariation {
    pub analytic: f64,
    pub numeric: f64,
    pub rel_err: f64,
}

/// Compares ⟨⟨τ_k, V⟩⟩ with a central difference of E_k along exp(±tV).
pub fn first_variation_check(c: &DiscreteCurve, k: usize, v: &TangentField, t: f64) -> Result<FirstVariation> {
    c.check_field(v)?;
    if !(1e-7..=1e-3).contains(&t) {
        return Err(Error::InvalidArgument(format!("t_step must lie in [1e-7, 1e-3], got {t}")));
    }
    let tk = ktension::tension_k_general(c, k)?;
    let analytic = c.l2_raw(&tk.field, v);
    let ep = energy_unchecked(&perturb_raw(c, v.as_slice(), t), k);
    let em = energy_unchecked(&perturb_raw(c, v.as_slice(), -t), k);
    let numeric = (ep - em) / (2.0 * t);
    let rel_err = (analytic - numeric).abs() / numeric.abs().max(1e-12);
    Ok(FirstVariation { analytic, numeric, rel_err })
}

static PROBES: [OnceLock<f64>; MAX_ORDER + 1] = [const { OnceLock::new() }; MAX_ORDER + 1];

/// Sign of dE_k/dt along +τ_k, measured once per k by finite differences
/// on a non-critical circle. Steepest descent moves along −sign·τ_k.
pub fn descent_sign(k: usize) -> Result<f64> {
    check_order(k, MAX_ORDER)?;
    Ok(*PROBES[k].get_or_init(|| {
        let s = SpaceForm::unit_sphere(2);
        let c = circle_curve(&s, 0.5, 64.max(16 * k)).expect("probe circle");
        let tk = ktension::tension_k_general(&c, k).expect("probe tension");
        let fv = first_variation_check(&c, k, &tk.field, 1e-5).expect("probe variation");
        assert!(fv.analytic > 0.0, "k-tension pairing with itself must be positive");
        fv.numeric.signum()
    }))
}

fn descent_direction(tau_k: &TangentField, k: usize) -> Result<TangentField> {
    let sign = descent_sign(k)?;
    assert!(sign > 0.0, "finite-difference probe disagrees with the k-tension sign");
    Ok(tau_k.scaled(-1.0))
}

fn step_along(c: &DiscreteCurve, dir: &TangentField, eta: f64) -> Result<DiscreteCurve> {
    perturb(c, dir, eta)?.resample_arclength()
}

/// One steepest-descent step p_i ← exp(p_i, −η τ_k), then resampling.
/// η = 0 returns the resampled curve.
pub fn flow_step(c: &DiscreteCurve, k: usize, eta: f64) -> Result<DiscreteCurve> {
    if eta == 0.0 {
        return c.resample_arclength();
    }
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::InvalidArgument(format!("step must be positive, got {eta}")));
    }
    if eta < 1e-14 {
        return Err(Error::StepUnderflow(eta));
    }
    let tk = ktension::tension_k_general(c, k)?;
    let dir = descent_direction(&tk.field, k)?;
    step_along(c, &dir, eta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Terminal {
    Converged,
    MaxIters,
    StepUnderflow,
}

impl Terminal {
    pub fn as_str(self) -> &'static str {
        match self {
            Terminal::Converged => "converged",
            Terminal::MaxIters => "max-iters",
            Terminal::StepUnderflow => "step-underflow",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowRow {
    pub iter: usize,
    pub energy: f64,
    pub residual_inf: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowTrace {
    pub rows: Vec<FlowRow>,
    pub terminal: Terminal,
}

impl FlowTrace {
    /// True when energies never increase along the accepted rows.
    pub fn is_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].energy <= w[0].energy)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "iter,energy,residual_inf,step")?;
        for r in &self.rows {
            writeln!(w, "{},{:?},{:?},{:?}", r.iter, r.energy, r.residual_inf, r.step)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowOptions {
    /// Initial step; `None` means 1e−2·h².
    pub eta0: Option<f64>,
    /// Bound on ‖τ_k‖∞ · ℓ^{2k−1}, ℓ the length scale of the curve.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions { eta0: None, tol: 1e-4, max_iters: 200_000 }
    }
}

/// Scale-free size of τ_k.
pub fn scaled_residual(c: &DiscreteCurve, k: usize, inf: f64) -> f64 {
    inf * c.length_scale().powi(2 * k as i32 - 1)
}

/// Backtracking descent until the scaled k-tension drops below `tol`.
pub fn flow_to_critical(c: &DiscreteCurve, k: usize, opts: &FlowOptions) -> Result<(DiscreteCurve, FlowTrace)> {
    let mut cur = c.clone();
    let mut tk = ktension::tension_k_general(&cur, k)?;
    let mut energy = energy_unchecked(&cur, k);
    let mut eta = opts.eta0.unwrap_or(1e-2 * c.h() * c.h());
    if !(eta > 0.0) {
        return Err(Error::InvalidArgument(format!("eta0 must be positive, got {eta}")));
    }
    let mut rows = vec![FlowRow { iter: 0, energy, residual_inf: tk.inf_norm, step: eta }];
    let mut streak = 0;
    let mut terminal = Terminal::MaxIters;
    let mut iter = 0;
    loop {
        if scaled_residual(&cur, k, tk.inf_norm) <= opts.tol {
            terminal = Terminal::Converged;
            break;
        }
        if iter >= opts.max_iters {
            break;
        }
        iter += 1;
        let dir = descent_direction(&tk.field, k)?;
        let trial = step_along(&cur, &dir, eta)?;
        let e = energy_unchecked(&trial, k);
        if e <= energy {
            cur = trial;
            energy = e;
            tk = ktension::tension_k_general(&cur, k)?;
            rows.push(FlowRow { iter, energy, residual_inf: tk.inf_norm, step: eta });
            streak += 1;
            if streak == 10 {
                eta *= 1.2;
                streak = 0;
            }
        } else {
            eta *= 0.5;
            streak = 0;
            if eta < 1e-14 {
                terminal = Terminal::StepUnderflow;
                break;
            }
        }
    }
    Ok((cur, FlowTrace { rows, terminal }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descent_is_against_tension() {
        for k in 1..=4 {
            assert_eq!(descent_sign(k).unwrap(), 1.0, "k = {k}");
        }
    }

    #[test]
    fn zero_step_is_resample() {
        let c = circle_curve(&SpaceForm::unit_sphere(2), 0.7, 64).unwrap();
        let d = flow_step(&c, 2, 0.0).unwrap();
        let dev = c.points().iter().zip(d.points()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(dev < 1e-10);
        assert_eq!(flow_step(&c, 2, 1e-15).unwrap_err(), Error::StepUnderflow(1e-15));
    }

    #[test]
    fn csv_header() {
        let t = FlowTrace { rows: vec![FlowRow { iter: 0, energy: 1.5, residual_inf: 0.1, step: 1e-3 }], terminal: Terminal::Converged };
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "iter,energy,residual_inf,step\n0,1.5,0.1,0.001\n");
    }
}
