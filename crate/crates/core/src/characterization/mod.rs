//! Entanglement characterization from correlator values: inverting the closed-form
//! correlator–Negativity relations of the noisy Bell, Werner and one-parameter
//! Horodecki families, plus the state-independent and state-dependent bounds.

mod bounds;
mod inversion;
pub mod relations;

use std::fmt;

use serde::Serialize;

use crate::correlators::CorrelatorKind;
use crate::states::FamilyKind;

pub use bounds::{
    bound_maccone_mi, bound_maccone_pcc, bound_spengler, conjecture_check, conjecture_residual,
    oph_region_thresholds, state_dependent_sum_threshold, state_dependent_threshold,
    BoundKind, BoundVerdict, ConjectureCheck, EntangledSide, StateDependentThreshold,
    BOUND_SLACK,
};
pub use inversion::{
    invert_noisy_bell, invert_werner, oph_from_correlator, werner_mi_band, Inverter,
    WernerMiBand, BISECTION_MAX_ITER, BISECTION_TOL, MONOTONE_SAMPLES,
};

/// Boundary tolerance when sorting an OPH parameter into a region; ties go to the
/// lower region.
pub const REGION_TOL: f64 = 1e-9;

/// Entanglement class of an OPH state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    /// 2 ≤ a ≤ 3
    Separable,
    /// 3 < a ≤ 4: entangled but PPT
    BoundEntangled,
    /// 4 < a ≤ 5
    NptEntangled,
}

impl Region {
    pub fn of_oph(a: f64) -> Region {
        if a <= 3.0 + REGION_TOL {
            Region::Separable
        } else if a <= 4.0 + REGION_TOL {
            Region::BoundEntangled
        } else {
            Region::NptEntangled
        }
    }

    pub fn is_entangled(self) -> bool {
        self != Region::Separable
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::Separable => "separable",
            Region::BoundEntangled => "bound-entangled",
            Region::NptEntangled => "npt-entangled",
        })
    }
}

/// One admissible preimage of a correlator value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Candidate {
    pub parameter: f64,
    pub negativity: f64,
}

/// How a result was obtained.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Method {
    pub family: FamilyKind,
    pub correlator: CorrelatorKind,
    pub bases: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CharacterizationResult {
    /// Recovered Negativity; the smallest candidate value when the inversion is ambiguous.
    pub negativity: f64,
    /// Recovered family parameter, `None` when several candidates remain.
    pub aux_param: Option<f64>,
    /// OPH only.
    pub region: Option<Region>,
    /// Set when the correlator value has more than one preimage.
    pub ambiguity: bool,
    /// Every preimage; a single entry when the inversion is unique.
    pub candidates: Vec<Candidate>,
    pub method: Method,
}

impl CharacterizationResult {
    fn from_candidates(candidates: Vec<Candidate>, region: Option<Region>, method: Method) -> Self {
        let negativity = candidates
            .iter()
            .map(|c| c.negativity)
            .fold(f64::INFINITY, f64::min);
        let aux_param = match candidates.as_slice() {
            [only] => Some(only.parameter),
            _ => None,
        };
        CharacterizationResult {
            negativity,
            aux_param,
            region,
            ambiguity: candidates.len() > 1,
            candidates,
            method,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn region_boundaries_go_to_the_lower_region() {
        assert_eq!(Region::of_oph(2.0), Region::Separable);
        assert_eq!(Region::of_oph(3.0 + 5e-10), Region::Separable);
        assert_eq!(Region::of_oph(3.01), Region::BoundEntangled);
        assert_eq!(Region::of_oph(4.0), Region::BoundEntangled);
        assert_eq!(Region::of_oph(4.01), Region::NptEntangled);
        assert_eq!(Region::of_oph(5.0), Region::NptEntangled);
    }
}
