//! Parameter sweeps over a JSON state template.

use std::str::FromStr;

use rayon::prelude::*;
use serde_json::Value;

use crate::correlators::{correlator_value, pcc_observables, CorrelatorKind};
use crate::error::{Error, Result};
use crate::figures::{linspace, Cell, Table};
use crate::measurement::{joint_distribution, make_observable, MeasurementSetting, ObservableLabel};
use crate::states::StateFamily;

/// `name:start:stop:steps`
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let [name, start, stop, steps] = parts.as_slice() else {
            return Err(format!("axis `{s}` is not name:start:stop:steps"));
        };
        let num = |x: &str| {
            x.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("`{x}` in axis `{s}` is not a finite number"))
        };
        let steps: usize = steps
            .parse()
            .map_err(|_| format!("`{steps}` in axis `{s}` is not a step count"))?;
        if steps < 2 {
            return Err(format!("axis `{s}` needs at least 2 steps"));
        }
        if name.is_empty() {
            return Err(format!("axis `{s}` has an empty parameter name"));
        }
        Ok(SweepAxis {
            name: name.to_string(),
            start: num(start)?,
            stop: num(stop)?,
            steps,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// State descriptor whose swept fields are overwritten at every point.
    pub template: Value,
    /// One or two axes; the first varies slowest.
    pub axes: Vec<SweepAxis>,
    pub settings: Vec<MeasurementSetting>,
    pub correlators: Vec<CorrelatorKind>,
}

fn setting_tag(s: MeasurementSetting) -> String {
    match s {
        MeasurementSetting::ZZ => "ZZ".into(),
        MeasurementSetting::ZX => "ZX".into(),
        MeasurementSetting::XX => "XX".into(),
        MeasurementSetting::WW => "WW".into(),
        MeasurementSetting::ZShift(k) => format!("Zshift{k}"),
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::Unsupported(format!(
                "sweeps take one or two axes, got {}",
                self.axes.len()
            )));
        }
        let Some(obj) = self.template.as_object() else {
            return Err(Error::InvalidState("template must be a JSON object".into()));
        };
        for axis in &self.axes {
            if axis.steps < 2 {
                return Err(Error::Unsupported(format!("axis `{}` needs at least 2 steps", axis.name)));
            }
            if axis.name == "family" || !obj.contains_key(&axis.name) {
                return Err(Error::InvalidState(format!(
                    "swept parameter `{}` is not a numeric field of the template",
                    axis.name
                )));
            }
        }
        if self.settings.is_empty() || self.correlators.is_empty() {
            return Err(Error::Unsupported(
                "a sweep needs at least one basis pair and one correlator".into(),
            ));
        }
        Ok(())
    }

    /// Every grid point as (axis values, state).
    pub fn points(&self) -> Result<Vec<(Vec<f64>, StateFamily)>> {
        self.validate()?;
        let grids: Vec<Vec<f64>> = self
            .axes
            .iter()
            .map(|a| linspace(a.start, a.stop, a.steps))
            .collect();
        let mut coords: Vec<Vec<f64>> = grids[0].iter().map(|&x| vec![x]).collect();
        if let Some(inner) = grids.get(1) {
            coords = coords
                .into_iter()
                .flat_map(|c| inner.iter().map(move |&y| vec![c[0], y]))
                .collect();
        }
        coords
            .into_iter()
            .map(|c| {
                let family = self.state_at(&c)?;
                Ok((c, family))
            })
            .collect()
    }

    fn state_at(&self, coords: &[f64]) -> Result<StateFamily> {
        let mut v = self.template.clone();
        let obj = v.as_object_mut().expect("validated template is an object");
        for (axis, &x) in self.axes.iter().zip(coords) {
            let slot = obj.get_mut(&axis.name).expect("validated field exists");
            // integral points keep integer fields integral; a fractional `d` is then
            // rejected by the descriptor itself
            *slot = if (slot.is_u64() || slot.is_i64()) && x.fract() == 0.0 && x >= 0.0 {
                Value::from(x as u64)
            } else {
                Value::from(x)
            };
        }
        let family: StateFamily =
            serde_json::from_value(v).map_err(|e| Error::InvalidState(e.to_string()))?;
        family.validate()?;
        Ok(family)
    }

    pub fn run(&self) -> Result<Table> {
        let points = self.points()?;
        let mut header: Vec<String> = self.axes.iter().map(|a| a.name.clone()).collect();
        header.push("negativity".into());
        header.push("negativity_closed_form".into());
        for &s in &self.settings {
            for &k in &self.correlators {
                header.push(format!("{k}_{}", setting_tag(s)));
            }
        }
        let rows = points
            .par_iter()
            .map(|(coords, family)| -> Result<Vec<Cell>> {
                let rho = family.build()?;
                let mut row: Vec<Cell> = coords.iter().map(|&x| Cell::Num(x)).collect();
                row.push(rho.negativity()?.into());
                row.push(family.closed_form_negativity()?.into());
                for &s in &self.settings {
                    let (ba, bb) = s.bases(rho.dim_a())?;
                    let jd = joint_distribution(&rho, &ba, &bb)?;
                    for &k in &self.correlators {
                        let value = match (s, k) {
                            // W is degenerate: PCC from the observable, not from an eigenbasis
                            (MeasurementSetting::WW, CorrelatorKind::Pcc) => {
                                let w = make_observable(rho.dim_a(), ObservableLabel::W, None)?;
                                pcc_observables(&rho, &w, &w)?
                                    .ok_or_else(|| Error::Undefined("W has zero variance".into()))
                            }
                            _ => correlator_value(&jd, k),
                        };
                        row.push(match value {
                            Ok(v) => Cell::Num(v),
                            Err(Error::Undefined(_)) => Cell::Empty,
                            Err(e) => return Err(e),
                        });
                    }
                }
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Table { header, rows })
    }
}
