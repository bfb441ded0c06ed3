//! Curve files: `{"space":{…},"closed":true,"points":[[…],…]}`.

use std::path::Path;

use polycurve::{DiscreteCurve, SpaceForm};
use serde::{Deserialize, Serialize};

use crate::failure::{CmdResult, Failure};

/// Relative membership slack accepted on load before re-projection.
pub const LOAD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SpaceDesc {
    Sphere { dim: usize, radius: f64 },
    Flat { dim: usize },
    Product { factors: Vec<SpaceDesc> },
}

impl SpaceDesc {
    pub fn to_space(&self) -> CmdResult<SpaceForm> {
        Ok(match self {
            SpaceDesc::Sphere { dim, radius } => SpaceForm::sphere(*dim, *radius)?,
            SpaceDesc::Flat { dim } => SpaceForm::flat(*dim)?,
            SpaceDesc::Product { factors } => match factors.as_slice() {
                [a, b] => SpaceForm::product(a.to_space()?, b.to_space()?),
                _ => return Err(Failure::usage("product space needs exactly two factors")),
            },
        })
    }

    pub fn from_space(s: &SpaceForm) -> Self {
        match s {
            SpaceForm::Sphere { dim, radius } => SpaceDesc::Sphere { dim: *dim, radius: *radius },
            SpaceForm::Flat { dim } => SpaceDesc::Flat { dim: *dim },
            SpaceForm::Product(a, b) => SpaceDesc::Product { factors: vec![Self::from_space(a), Self::from_space(b)] },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveFile {
    pub space: SpaceDesc,
    pub closed: bool,
    pub points: Vec<Vec<f64>>,
}

impl CurveFile {
    pub fn from_curve(c: &DiscreteCurve) -> Self {
        let d = c.ambient_dim();
        CurveFile {
            space: SpaceDesc::from_space(c.space()),
            closed: c.is_closed(),
            points: c.points().chunks_exact(d).map(<[f64]>::to_vec).collect(),
        }
    }

    /// Validates membership within [`LOAD_TOL`], re-projects points that
    /// sit between that and the library tolerance, and derives h from the
    /// mean geodesic gap.
    pub fn into_curve(self) -> CmdResult<DiscreteCurve> {
        let space = self.space.to_space()?;
        let d = space.ambient_dim();
        let mut flat = Vec::with_capacity(self.points.len() * d);
        for (i, p) in self.points.iter().enumerate() {
            if p.len() != d {
                return Err(Failure::usage(format!("point {i} has {} coordinates, expected {d}", p.len())));
            }
            let defect = space.membership_defect(p);
            if !(defect <= LOAD_TOL) {
                return Err(Failure::usage(format!("point {i} is off the target (defect {defect:e})")));
            }
            let mut q = p.clone();
            if defect > polycurve::spaceform::MEMBERSHIP_TOL {
                space.project_point_in_place(&mut q)?;
            }
            flat.extend(q);
        }
        Ok(DiscreteCurve::from_points(space, flat, self.closed)?)
    }
}

pub fn load(path: &Path) -> CmdResult<DiscreteCurve> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let file: CurveFile = serde_json::from_str(&text)?;
    file.into_curve()
}

pub fn to_json(c: &DiscreteCurve) -> String {
    let mut s = serde_json::to_string(&CurveFile::from_curve(c)).expect("curve serializes");
    s.push('\n');
    s
}

pub fn save(c: &DiscreteCurve, path: &Path) -> CmdResult<()> {
    std::fs::write(path, to_json(c))?;
    Ok(())
}
