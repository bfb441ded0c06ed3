use std::path::{Path, PathBuf};

use polycurve::energy::{flow_to_critical, FlowOptions, Terminal};
use polycurve::ktension::{circle_curve, constant_curvature_kappa, tension_k_general, tension_k_spaceform};
use polycurve::variation::{hessian_matrix, index_nullity, HessianMode};
use polycurve::{Execution, SpaceForm, TensionPath};
use serde::Serialize;

use crate::curvefile;
use crate::failure::{CmdResult, Failure};

/// Writes `text` to `out`, or to stdout when no path is given.
pub fn emit(text: &str, out: Option<&Path>) -> CmdResult<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn pretty(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct ResidualReport {
    k: usize,
    l2: f64,
    inf: f64,
    path: &'static str,
}

pub fn residual(file: &Path, k: usize, path: TensionPath, out: Option<&Path>) -> CmdResult<()> {
    let c = curvefile::load(file)?;
    let r = match path {
        TensionPath::General => tension_k_general(&c, k)?,
        TensionPath::SpaceForm => tension_k_spaceform(&c, k)?,
    };
    let report = ResidualReport { k, l2: r.l2_norm, inf: r.inf_norm, path: path.as_str() };
    emit(&pretty(&report), out)
}

pub enum CircleSpec {
    Kappa(f64),
    Family(usize),
}

pub fn circle(curvature: f64, spec: CircleSpec, n: usize, out: Option<&Path>) -> CmdResult<()> {
    if !(curvature > 0.0) || !curvature.is_finite() {
        return Err(Failure::usage(format!("circle families need a sphere target, got curvature {curvature}")));
    }
    let kappa = match spec {
        CircleSpec::Kappa(x) => x,
        CircleSpec::Family(k) => {
            if k == 0 || k > polycurve::ktension::MAX_ORDER {
                return Err(polycurve::Error::InvalidOrder(k, 1, polycurve::ktension::MAX_ORDER).into());
            }
            constant_curvature_kappa(k, curvature).expect("positive curvature has a circle family")
        }
    };
    if !(kappa >= 0.0) || !kappa.is_finite() {
        return Err(Failure::usage(format!("kappa must be finite and non-negative, got {kappa}")));
    }
    let space = SpaceForm::sphere(2, 1.0 / curvature.sqrt())?;
    let c = circle_curve(&space, kappa, n)?;
    emit(&curvefile::to_json(&c), out)
}

pub struct FlowArgs<'a> {
    pub file: &'a Path,
    pub k: usize,
    pub eta0: Option<f64>,
    pub tol: f64,
    pub max_iters: usize,
    pub out: &'a Path,
    pub trace: Option<PathBuf>,
}

#[derive(Serialize)]
struct FlowSummary {
    terminal: &'static str,
    iterations: usize,
    energy: f64,
    residual_inf: f64,
    trace: String,
}

pub fn flow(a: FlowArgs<'_>) -> CmdResult<()> {
    if !(a.tol > 0.0) {
        return Err(Failure::usage(format!("tol must be positive, got {}", a.tol)));
    }
    let c = curvefile::load(a.file)?;
    let opts = FlowOptions { eta0: a.eta0, tol: a.tol, max_iters: a.max_iters };
    let (fin, trace) = flow_to_critical(&c, a.k, &opts)?;
    curvefile::save(&fin, a.out)?;
    let trace_path = a.trace.unwrap_or_else(|| a.out.with_extension("csv"));
    let mut csv = Vec::new();
    trace.write_csv(&mut csv)?;
    std::fs::write(&trace_path, csv)?;
    let last = trace.rows.last().expect("trace has the initial row");
    let summary = FlowSummary {
        terminal: trace.terminal.as_str(),
        iterations: last.iter,
        energy: last.energy,
        residual_inf: last.residual_inf,
        trace: trace_path.display().to_string(),
    };
    emit(&pretty(&summary), None)?;
    match trace.terminal {
        Terminal::Converged => Ok(()),
        t => Err(Failure::Numerical(format!("flow stopped without converging ({})", t.as_str()))),
    }
}

#[derive(Serialize)]
struct SpectrumJson {
    k: usize,
    epsilon: f64,
    index: usize,
    nullity: usize,
    eigenvalues: Vec<f64>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    not_critical: bool,
}

pub fn spectrum(file: &Path, k: usize, mode: HessianMode, epsilon: Option<f64>, out: Option<&Path>) -> CmdResult<()> {
    let c = curvefile::load(file)?;
    let h = hessian_matrix(&c, k, mode, Execution::default())?;
    let r = index_nullity(&h.matrix, k, epsilon)?;
    let report = SpectrumJson {
        k: r.k,
        epsilon: r.epsilon,
        index: r.index,
        nullity: r.nullity,
        eigenvalues: r.eigenvalues,
        not_critical: !h.critical,
    };
    emit(&pretty(&report), out)
}
