//! Self-check suites behind `polycurve verify`.

use polycurve::energy::first_variation_check;
use polycurve::ktension::{circle_curve, frenet_residual_3, tension_k_general};
use polycurve::product::split_tension_check;
use polycurve::samples::{random_sphere_curve, rough_field, smooth_field};
use polycurve::variation::{hessian_matrix, spectral_norm, HessianMode};
use polycurve::{Execution, SpaceForm};

use crate::failure::{CmdResult, Failure};

pub const SUITES: [&str; 6] = ["first-variation", "hessian-oracle", "kernel-chain", "ode3", "product", "sbp"];

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub suite: &'static str,
    pub status: &'static str,
    pub detail: String,
}

impl Row {
    fn judged(suite: &'static str, ok: bool, detail: String) -> Self {
        Row { suite, status: if ok { "PASS" } else { "FAIL" }, detail }
    }

    pub fn failed(&self) -> bool {
        matches!(self.status, "FAIL" | "INCONSISTENT")
    }
}

fn s2() -> SpaceForm {
    SpaceForm::unit_sphere(2)
}

fn first_variation(seed: u64) -> CmdResult<Row> {
    let c = random_sphere_curve(&s2(), 128, seed)?;
    let v = smooth_field(&c, seed.wrapping_add(1));
    let mut worst = 0.0f64;
    for k in 1..=3 {
        worst = worst.max(first_variation_check(&c, k, &v, 1e-5)?.rel_err);
    }
    Ok(Row::judged("first-variation", worst <= 1e-2, format!("max rel err {worst:.2e} over k = 1..3 (tol 1e-2)")))
}

fn sbp(seed: u64) -> CmdResult<Row> {
    let mut worst = 0.0f64;
    for i in 0..5 {
        let c = random_sphere_curve(&s2(), 64, seed.wrapping_add(i))?;
        let f = rough_field(&c, seed.wrapping_add(100 + i));
        let g = rough_field(&c, seed.wrapping_add(200 + i));
        let (df, dg) = (c.covariant_derivative(&f)?, c.covariant_derivative(&g)?);
        let lhs = c.l2_inner(&c.rough_laplacian(&f)?, &g)?;
        let rhs = c.l2_inner(&df, &dg)?;
        let scale = (c.l2_inner(&df, &df)? * c.l2_inner(&dg, &dg)?).sqrt();
        worst = worst.max((lhs - rhs).abs() / scale);
    }
    Ok(Row::judged("sbp", worst <= 1e-12, format!("max rel defect {worst:.1e} on 5 curves (tol 1e-12)")))
}

fn kernel_chain(seed: u64) -> CmdResult<Row> {
    let c = random_sphere_curve(&s2(), 64, seed)?;
    let st = c.build_stack(3)?;
    let mut worst = 0.0f64;
    for l in 1..=3 {
        let a = c.l2_inner(st.lap_tau(l), st.lap_tau(l - 1))?;
        let b = c.l2_inner(st.grad_lap_tau(l - 1), st.grad_lap_tau(l - 1))?;
        worst = worst.max((a - b).abs() / b.abs());
    }
    Ok(Row::judged("kernel-chain", worst <= 1e-12, format!("max rel defect {worst:.1e} for l = 1..3 (tol 1e-12)")))
}

fn product(seed: u64) -> CmdResult<Row> {
    let a = random_sphere_curve(&s2(), 64, seed)?;
    let b = random_sphere_curve(&SpaceForm::sphere(2, 2.0)?, 64, seed.wrapping_add(1))?.with_step(a.h())?;
    let mut worst = 0.0f64;
    for k in 1..=4 {
        let scale = tension_k_general(&a, k)?.inf_norm.max(tension_k_general(&b, k)?.inf_norm).max(1.0);
        worst = worst.max(split_tension_check(&a, &b, k)? / scale);
    }
    Ok(Row::judged("product", worst <= 1e-12, format!("max split deviation {worst:.1e} for k = 1..4 (tol 1e-12)")))
}

fn ode3(_seed: u64) -> CmdResult<Row> {
    let mut consistent = true;
    let mut parts = Vec::new();
    for kappa in [1.0, 2f64.sqrt()] {
        let c = circle_curve(&s2(), kappa, 256)?;
        let (normal, _) = frenet_residual_3(&vec![kappa; c.len()], c.h(), 1.0)?;
        let res = normal[0];
        let tau = tension_k_general(&c, 3)?.inf_norm;
        consistent &= (res.abs() <= 1e-9) == (tau <= 1e-2);
        parts.push(format!("kappa {kappa:.4}: constant-kappa residual {res:.3e}, |tau_3| {tau:.3e}"));
    }
    Ok(Row { suite: "ode3", status: if consistent { "CONSISTENT" } else { "INCONSISTENT" }, detail: parts.join("; ") })
}

fn hessian_oracle(_seed: u64) -> CmdResult<Row> {
    let c = circle_curve(&s2(), 1.0, 128)?;
    let hj = hessian_matrix(&c, 2, HessianMode::Jacobi, Execution::default())?;
    let hf = hessian_matrix(&c, 2, HessianMode::Fd, Execution::default())?;
    let gap = spectral_norm(&(&hj.matrix - &hf.matrix)) / spectral_norm(&hj.matrix);
    Ok(Row::judged(
        "hessian-oracle",
        gap <= 1e-2 && hj.asymmetry <= 1e-2,
        format!("fd vs jacobi {gap:.2e}, asymmetry {:.1e} (tol 1e-2, k = 2, N = 128)", hj.asymmetry),
    ))
}

fn run_one(name: &str, seed: u64) -> CmdResult<Row> {
    match name {
        "first-variation" => first_variation(seed),
        "hessian-oracle" => hessian_oracle(seed),
        "kernel-chain" => kernel_chain(seed),
        "ode3" => ode3(seed),
        "product" => product(seed),
        "sbp" => sbp(seed),
        _ => Err(Failure::usage(format!("unknown suite {name:?}; expected one of {} or all", SUITES.join(", ")))),
    }
}

/// Runs the named suites concurrently; rows come back sorted by suite name.
pub fn run(names: &[String], seed: u64) -> CmdResult<Vec<Row>> {
    let mut wanted: Vec<&str> = if names.iter().any(|n| n == "all") {
        SUITES.to_vec()
    } else {
        names.iter().map(String::as_str).collect()
    };
    wanted.sort_unstable();
    wanted.dedup();
    let results: Vec<CmdResult<Row>> = std::thread::scope(|s| {
        let handles: Vec<_> = wanted.iter().map(|n| s.spawn(move || run_one(n, seed))).collect();
        handles.into_iter().map(|h| h.join().expect("suite thread panicked")).collect()
    });
    results.into_iter().collect()
}

pub fn render(rows: &[Row]) -> String {
    let mut out = format!("{:<16} {:<12} {}\n", "suite", "status", "detail");
    for r in rows {
        out.push_str(&format!("{:<16} {:<12} {}\n", r.suite, r.status, r.detail));
    }
    out
}
