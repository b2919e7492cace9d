//! Mutual predictability, mutual information and Pearson correlation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::measurement::{
    expectation, joint_distribution, make_observable, observable_squared, JointDistribution,
    MeasurementSetting, Observable, ObservableLabel,
};

/// Below this a marginal variance counts as zero and PCC is undefined.
pub const VARIANCE_FLOOR: f64 = 1e-14;
/// Joint probabilities below this are treated as exact zeros in the MI sum.
pub const MI_ZERO: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelatorKind {
    Mp,
    Mi,
    Pcc,
}

impl fmt::Display for CorrelatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CorrelatorKind::Mp => "mp",
            CorrelatorKind::Mi => "mi",
            CorrelatorKind::Pcc => "pcc",
        })
    }
}

impl FromStr for CorrelatorKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mp" => Ok(CorrelatorKind::Mp),
            "mi" => Ok(CorrelatorKind::Mi),
            "pcc" => Ok(CorrelatorKind::Pcc),
            other => Err(format!("unknown correlator `{other}` (expected mp, mi or pcc)")),
        }
    }
}

/// Σᵢ p(i, i ⊕ k).
pub fn mutual_predictability(jd: &JointDistribution, k: i64) -> Result<f64> {
    let (da, db) = jd.dims();
    if da != db {
        return Err(Error::DimensionMismatch(format!(
            "mutual predictability needs a square table, got {da}x{db}"
        )));
    }
    let shift = k.rem_euclid(da as i64) as usize;
    Ok((0..da).map(|i| jd.p(i, (i + shift) % da)).sum())
}

/// Shannon mutual information of the table, in bits.
pub fn mutual_information(jd: &JointDistribution) -> f64 {
    let (da, db) = jd.dims();
    let (pa, pb) = (jd.marginal_a(), jd.marginal_b());
    let mut mi = 0.0;
    for i in 0..da {
        for j in 0..db {
            let p = jd.p(i, j);
            if p < MI_ZERO {
                continue;
            }
            mi += p * (p / (pa[i] * pb[j])).log2();
        }
    }
    mi.max(0.0)
}

/// Pearson correlation of the outcome values; `None` when a marginal has zero variance.
pub fn pcc_distribution(jd: &JointDistribution) -> Option<f64> {
    let (da, db) = jd.dims();
    let (xa, xb) = (jd.values_a(), jd.values_b());
    let moments = |marg: &[f64], x: &[f64]| {
        let mean: f64 = marg.iter().zip(x).map(|(p, v)| p * v).sum();
        let second: f64 = marg.iter().zip(x).map(|(p, v)| p * v * v).sum();
        (mean, second - mean * mean)
    };
    let (mean_a, var_a) = moments(jd.marginal_a(), xa);
    let (mean_b, var_b) = moments(jd.marginal_b(), xb);
    if var_a < VARIANCE_FLOOR || var_b < VARIANCE_FLOOR {
        return None;
    }
    let mut cross = 0.0;
    for i in 0..da {
        for j in 0..db {
            cross += jd.p(i, j) * xa[i] * xb[j];
        }
    }
    Some((cross - mean_a * mean_b) / (var_a.sqrt() * var_b.sqrt()))
}

/// PCC of two observables from the five expectations
/// ⟨A⊗B⟩, ⟨A⊗𝟙⟩, ⟨𝟙⊗B⟩, ⟨A²⊗𝟙⟩, ⟨𝟙⊗B²⟩.
pub fn pcc_observables(
    rho: &DensityMatrix,
    op_a: &Observable,
    op_b: &Observable,
) -> Result<Option<f64>> {
    let ab = expectation(rho, Some(op_a), Some(op_b))?;
    let a = expectation(rho, Some(op_a), None)?;
    let b = expectation(rho, None, Some(op_b))?;
    let a2 = expectation(rho, Some(&observable_squared(op_a)), None)?;
    let b2 = expectation(rho, None, Some(&observable_squared(op_b)))?;
    let (var_a, var_b) = (a2 - a * a, b2 - b * b);
    if var_a < VARIANCE_FLOOR || var_b < VARIANCE_FLOOR {
        return Ok(None);
    }
    Ok(Some((ab - a * b) / (var_a.sqrt() * var_b.sqrt())))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelatorReport {
    pub bases: String,
    pub mp: f64,
    /// Bits.
    pub mi: f64,
    /// `None` when either marginal is deterministic.
    pub pcc: Option<f64>,
}

/// Measures `rho` in the given setting and collects MP (k = 0), MI and PCC.
///
/// PCC for the `W,W` setting comes from the expectation form, since W is degenerate.
pub fn correlator_report(
    rho: &DensityMatrix,
    setting: MeasurementSetting,
) -> Result<CorrelatorReport> {
    let d = rho.dim_a();
    if rho.dim_b() != d {
        return Err(Error::DimensionMismatch(format!(
            "measurement settings need equal local dimensions, got {:?}",
            rho.dims()
        )));
    }
    let (ba, bb) = setting.bases(d)?;
    let jd = joint_distribution(rho, &ba, &bb)?;
    let pcc = match setting {
        MeasurementSetting::WW => {
            let w = make_observable(d, ObservableLabel::W, None)?;
            pcc_observables(rho, &w, &w)?
        }
        _ => pcc_distribution(&jd),
    };
    Ok(CorrelatorReport {
        bases: setting.to_string(),
        mp: mutual_predictability(&jd, 0)?,
        mi: mutual_information(&jd),
        pcc,
    })
}

/// Value of one correlator on a table; PCC must be defined.
pub fn correlator_value(jd: &JointDistribution, kind: CorrelatorKind) -> Result<f64> {
    match kind {
        CorrelatorKind::Mp => mutual_predictability(jd, 0),
        CorrelatorKind::Mi => Ok(mutual_information(jd)),
        CorrelatorKind::Pcc => pcc_distribution(jd)
            .ok_or_else(|| Error::Undefined("PCC with a zero-variance marginal".into())),
    }
}
