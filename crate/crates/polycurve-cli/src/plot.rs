//! Minimal SVG output for curves and flow traces.

use std::fmt::Write;
use std::path::Path;

use crate::curvefile::CurveFile;
use crate::failure::{CmdResult, Failure};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 40.0;

pub enum PlotInput {
    /// Ambient points projected to their first two coordinates.
    Curve { xy: Vec<(f64, f64)>, closed: bool },
    /// (iteration, energy) pairs.
    Trace(Vec<(f64, f64)>),
}

pub const TRACE_HEADER: &str = "iter,energy,residual_inf,step";

pub fn parse(text: &str) -> CmdResult<PlotInput> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let file: CurveFile = serde_json::from_str(text)?;
        let closed = file.closed;
        let c = file.into_curve()?;
        if c.ambient_dim() < 2 {
            return Err(Failure::usage("curve needs at least two ambient coordinates to plot"));
        }
        let xy = (0..c.len()).map(|i| (c.point(i)[0], c.point(i)[1])).collect();
        return Ok(PlotInput::Curve { xy, closed });
    }
    let mut lines = trimmed.lines();
    if lines.next().map(str::trim) != Some(TRACE_HEADER) {
        return Err(Failure::usage("input is neither a curve file nor a flow trace"));
    }
    let mut rows = Vec::new();
    for (n, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let cols: Vec<&str> = line.split(',').collect();
        let parsed: Option<(f64, f64)> = match cols.as_slice() {
            [i, e, _, _] => i.trim().parse().ok().zip(e.trim().parse().ok()),
            _ => None,
        };
        rows.push(parsed.ok_or_else(|| Failure::usage(format!("malformed trace row {}", n + 2)))?);
    }
    if rows.is_empty() {
        return Err(Failure::usage("trace has no rows"));
    }
    Ok(PlotInput::Trace(rows))
}

fn bounds(pts: &[(f64, f64)]) -> (f64, f64, f64, f64) {
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    // Degenerate spans get a unit window so the mapping stays finite.
    if x1 - x0 <= 0.0 {
        (x0, x1) = (x0 - 0.5, x0 + 0.5);
    }
    if y1 - y0 <= 0.0 {
        (y0, y1) = (y0 - 0.5, y0 + 0.5);
    }
    (x0, x1, y0, y1)
}

fn polyline(pts: &[(f64, f64)], closed: bool, equal_aspect: bool) -> String {
    let (x0, x1, y0, y1) = bounds(pts);
    let (mut sx, mut sy) = ((WIDTH - 2.0 * MARGIN) / (x1 - x0), (HEIGHT - 2.0 * MARGIN) / (y1 - y0));
    if equal_aspect {
        sx = sx.min(sy);
        sy = sx;
    }
    let mut coords = String::new();
    for &(x, y) in pts {
        let px = MARGIN + (x - x0) * sx;
        let py = HEIGHT - MARGIN - (y - y0) * sy;
        let _ = write!(coords, "{px:.2},{py:.2} ");
    }
    let tag = if closed { "polygon" } else { "polyline" };
    format!(
        "<{tag} fill=\"none\" stroke=\"#1f4e79\" stroke-width=\"1.5\" points=\"{}\"/>",
        coords.trim_end()
    )
}

pub fn render(input: &PlotInput) -> String {
    let (body, caption) = match input {
        PlotInput::Curve { xy, closed } => (polyline(xy, *closed, true), "orthographic projection (x, y)".to_string()),
        PlotInput::Trace(rows) => {
            let pts: Vec<(f64, f64)> = rows.iter().map(|&(i, e)| (i, e.max(f64::MIN_POSITIVE).log10())).collect();
            (polyline(&pts, false, false), "log10 energy vs iteration".to_string())
        }
    };
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         {body}\n\
         <text x=\"{MARGIN}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">{caption}</text>\n\
         </svg>\n"
    )
}

pub fn plot(input: &Path, out: &Path) -> CmdResult<()> {
    let text = std::fs::read_to_string(input).map_err(|e| Failure::usage(format!("{}: {e}", input.display())))?;
    let svg = render(&parse(&text)?);
    std::fs::write(out, svg)?;
    Ok(())
}
