use std::fmt;

use serde::Serialize;

use super::relations::{
    noisy_bell_x_correlator, noisy_bell_z_correlator, oph_correlator, werner_x_correlator,
    werner_z_correlator,
};
use crate::correlators::{pcc_observables, CorrelatorKind};
use crate::error::{Error, Result};
use crate::measurement::{make_observable, ObservableLabel};
use crate::states::{FamilyKind, StateFamily};

/// A bound counts as violated only when the left-hand side exceeds it by more than this.
pub const BOUND_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundKind {
    SpenglerMp,
    MacconeMi,
    MacconePcc,
    StateDependent,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundKind::SpenglerMp => "spengler-mp",
            BoundKind::MacconeMi => "maccone-mi",
            BoundKind::MacconePcc => "maccone-pcc",
            BoundKind::StateDependent => "state-dependent",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundVerdict {
    pub lhs: f64,
    pub threshold: f64,
    pub violated: bool,
    pub bound_kind: BoundKind,
}

impl BoundVerdict {
    fn new(lhs: f64, threshold: f64, bound_kind: BoundKind) -> Self {
        BoundVerdict {
            lhs,
            threshold,
            violated: lhs > threshold + BOUND_SLACK,
            bound_kind,
        }
    }
}

/// Σ Pᵢ ≤ 1 + (m − 1)/d over m mutually unbiased bases. An empty list is treated as m = 1
/// with a zero sum.
pub fn bound_spengler(mps: &[f64], d: usize) -> BoundVerdict {
    let m = mps.len().max(1) as f64;
    let lhs = mps.iter().sum();
    BoundVerdict::new(lhs, 1.0 + (m - 1.0) / d as f64, BoundKind::SpenglerMp)
}

/// I_AB + I_CD ≤ log₂ d.
pub fn bound_maccone_mi(i_ab: f64, i_cd: f64, d: usize) -> BoundVerdict {
    BoundVerdict::new(i_ab + i_cd, (d as f64).log2(), BoundKind::MacconeMi)
}

/// |PCC_AB| + |PCC_CD| ≤ 1.
pub fn bound_maccone_pcc(p_ab: f64, p_cd: f64) -> BoundVerdict {
    BoundVerdict::new(p_ab.abs() + p_cd.abs(), 1.0, BoundKind::MacconePcc)
}

/// Which side of a state-dependent threshold certifies entanglement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EntangledSide {
    Above,
    Below,
}

/// Correlator value of the family's N = 0 member, with the direction in which
/// entangled members of the same family lie.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateDependentThreshold {
    pub value: f64,
    pub entangled_side: EntangledSide,
}

impl StateDependentThreshold {
    /// True when `v` lies strictly on the entangled side (beyond the bound slack).
    pub fn detects(&self, v: f64) -> bool {
        match self.entangled_side {
            EntangledSide::Above => v > self.value + BOUND_SLACK,
            EntangledSide::Below => v < self.value - BOUND_SLACK,
        }
    }

    pub fn verdict(&self, lhs: f64) -> BoundVerdict {
        BoundVerdict {
            lhs,
            threshold: self.value,
            violated: self.detects(lhs),
            bound_kind: BoundKind::StateDependent,
        }
    }
}

fn side_of(entangled: f64, boundary: f64) -> EntangledSide {
    if entangled > boundary {
        EntangledSide::Above
    } else {
        EntangledSide::Below
    }
}

fn require_aux(aux: Option<f64>, family: FamilyKind) -> Result<f64> {
    let a = aux.ok_or_else(|| {
        Error::Unsupported(format!("{family} threshold needs the mixing weight a"))
    })?;
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::ParameterOutOfRange {
            field: "a",
            value: a,
            range: "[0, 1]",
        });
    }
    Ok(a)
}

/// Z-basis correlator value at N = 0 for the family (OPH: the Z, shifted-Z setting with
/// k = 1, at the bound/NPT boundary a = 4).
///
/// For a noisy Bell weight a > 1/d no member is separable. MP and PCC then keep their
/// linear N = 0 formulas (below every attainable value); MI returns −∞.
pub fn state_dependent_threshold(
    family: FamilyKind,
    kind: CorrelatorKind,
    d: usize,
    aux: Option<f64>,
) -> Result<StateDependentThreshold> {
    threshold_impl(family, kind, d, aux, false)
}

/// As [`state_dependent_threshold`] for the sum of the Z- and X-basis correlators
/// (OPH has no X-basis relation and is rejected).
pub fn state_dependent_sum_threshold(
    family: FamilyKind,
    kind: CorrelatorKind,
    d: usize,
    aux: Option<f64>,
) -> Result<StateDependentThreshold> {
    threshold_impl(family, kind, d, aux, true)
}

fn threshold_impl(
    family: FamilyKind,
    kind: CorrelatorKind,
    d: usize,
    aux: Option<f64>,
    with_x: bool,
) -> Result<StateDependentThreshold> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let df = d as f64;
    match family {
        FamilyKind::NoisyBell => {
            let a = require_aux(aux, family)?;
            let z = match kind {
                CorrelatorKind::Mp => 1.0 - a * (df - 1.0),
                CorrelatorKind::Pcc => 1.0 - a * df,
                CorrelatorKind::Mi if a * df <= 1.0 => noisy_bell_z_correlator(kind, d, a, 0.0)?,
                CorrelatorKind::Mi => f64::NEG_INFINITY,
            };
            let x = if with_x {
                noisy_bell_x_correlator(kind, d, a)?
            } else {
                0.0
            };
            // all three Z-basis correlators grow with N at fixed a
            Ok(StateDependentThreshold {
                value: z + x,
                entangled_side: EntangledSide::Above,
            })
        }
        FamilyKind::Werner => {
            let f = |a: f64| -> Result<f64> {
                let z = werner_z_correlator(kind, d, a)?;
                Ok(if with_x {
                    z + werner_x_correlator(kind, d, a)?
                } else {
                    z
                })
            };
            // Z-basis MI is not monotone in a: past its interior minimum some separable
            // states score higher than weakly entangled ones, so the MI threshold
            // only separates the families outside that band.
            let boundary = f(0.5)?;
            Ok(StateDependentThreshold {
                value: boundary,
                entangled_side: side_of(f(0.0)?, boundary),
            })
        }
        FamilyKind::Oph => {
            if with_x {
                return Err(Error::Unsupported(
                    "OPH has no X-basis correlator relation".into(),
                ));
            }
            let (_, npt_edge) = oph_region_thresholds(kind, 1)?;
            Ok(npt_edge)
        }
    }
}

/// OPH thresholds at the separable/bound edge (a = 3) and the bound/NPT edge (a = 4)
/// for the Z, shifted-Z setting with shift `k`.
pub fn oph_region_thresholds(
    kind: CorrelatorKind,
    k: i64,
) -> Result<(StateDependentThreshold, StateDependentThreshold)> {
    if k.rem_euclid(3) == 0 && kind != CorrelatorKind::Mi {
        return Err(Error::Unsupported(format!(
            "OPH {kind} with shift k ≡ 0 (mod 3) does not depend on a"
        )));
    }
    let f = |a: f64| oph_correlator(kind, a, k);
    let top = f(5.0)?;
    let at = |a: f64| -> Result<StateDependentThreshold> {
        let value = f(a)?;
        Ok(StateDependentThreshold {
            value,
            entangled_side: side_of(top, value),
        })
    };
    Ok((at(3.0)?, at(4.0)?))
}

/// PCC of the centred Z and W observables together with the Negativity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConjectureCheck {
    pub pcc_z: f64,
    pub pcc_w: f64,
    pub negativity: f64,
    /// PCC_Z + PCC_W − 1 − 2N/(d − 1).
    pub residual: f64,
}

pub fn conjecture_check(family: &StateFamily) -> Result<ConjectureCheck> {
    if !matches!(
        family,
        StateFamily::PureSchmidt { .. } | StateFamily::CnaBell { .. }
    ) {
        return Err(Error::Unsupported(
            "the PCC_Z + PCC_W relation is only stated for pure Schmidt and colored-noise Bell states"
                .into(),
        ));
    }
    let rho = family.build()?;
    let d = rho.dim_a();
    let z = make_observable(d, ObservableLabel::Z, None)?;
    let w = make_observable(d, ObservableLabel::W, None)?;
    let pcc_z = pcc_observables(&rho, &z, &z)?
        .ok_or_else(|| Error::Undefined("PCC_Z with a deterministic marginal".into()))?;
    let pcc_w = pcc_observables(&rho, &w, &w)?
        .ok_or_else(|| Error::Undefined("PCC_W with a deterministic marginal".into()))?;
    let negativity = family.closed_form_negativity()?;
    Ok(ConjectureCheck {
        pcc_z,
        pcc_w,
        negativity,
        residual: pcc_z + pcc_w - 1.0 - 2.0 * negativity / (d as f64 - 1.0),
    })
}

pub fn conjecture_residual(family: &StateFamily) -> Result<f64> {
    Ok(conjecture_check(family)?.residual)
}
