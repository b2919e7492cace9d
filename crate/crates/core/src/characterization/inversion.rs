use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use super::relations::{
    noisy_bell_x_correlator, noisy_bell_z_correlator, oph_correlator, werner_z_correlator,
};
use super::{Candidate, CharacterizationResult, Method, Region};
use crate::correlators::CorrelatorKind;
use crate::error::{Error, Result};
use crate::states::{
    noisy_bell_signed_range, oph_negativity, werner_negativity, FamilyKind, OPH_DIM, OPH_RANGE,
};

pub const BISECTION_TOL: f64 = 1e-10;
pub const BISECTION_MAX_ITER: usize = 200;
/// Sample count of the strict-monotonicity check run before every bisection.
pub const MONOTONE_SAMPLES: usize = 64;

/// Slack on attainable-range checks, in correlator units.
const RANGE_TOL: f64 = 1e-9;
/// A target this close to a bracket end value resolves to that end. MI is quadratic
/// near its zeros, so bisecting rounding noise there would be amplified to ~1e-8 in
/// the parameter.
const END_SNAP: f64 = 1e-13;
const GOLDEN_TOL: f64 = 1e-12;

/// Bisection settings shared by every inversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inverter {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for Inverter {
    fn default() -> Self {
        Inverter {
            tol: BISECTION_TOL,
            max_iter: BISECTION_MAX_ITER,
        }
    }
}

/// Two-step noisy-Bell inversion with default settings.
pub fn invert_noisy_bell(
    corr_x: f64,
    corr_z: f64,
    kind: CorrelatorKind,
    d: usize,
) -> Result<CharacterizationResult> {
    Inverter::default().noisy_bell(corr_x, corr_z, kind, d)
}

pub fn invert_werner(corr_z: f64, kind: CorrelatorKind, d: usize) -> Result<CharacterizationResult> {
    Inverter::default().werner(corr_z, kind, d)
}

pub fn oph_from_correlator(value: f64, kind: CorrelatorKind, k: i64) -> Result<CharacterizationResult> {
    Inverter::default().oph(value, kind, k)
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    Ok(())
}

fn check_finite(value: f64, context: &str) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::OutOfDomain {
            value,
            min: f64::NEG_INFINITY,
            max: f64::INFINITY,
            context: context.to_string(),
        });
    }
    Ok(())
}

fn out_of_domain(value: f64, min: f64, max: f64, context: String) -> Error {
    Error::OutOfDomain {
        value,
        min,
        max,
        context,
    }
}

impl Inverter {
    pub fn with_tol(tol: f64) -> Self {
        Inverter {
            tol,
            ..Default::default()
        }
    }

    /// Recovers a from the X-basis correlator, then N from the Z-basis correlator at that a.
    pub fn noisy_bell(
        &self,
        corr_x: f64,
        corr_z: f64,
        kind: CorrelatorKind,
        d: usize,
    ) -> Result<CharacterizationResult> {
        check_dim(d)?;
        check_finite(corr_x, "X-basis correlator")?;
        check_finite(corr_z, "Z-basis correlator")?;
        let df = d as f64;
        let a = self.noisy_bell_weight(corr_x, kind, d)?;
        let (s_min, s_max) = noisy_bell_signed_range(d, a);
        let lo = s_min.max(0.0);
        let context = || format!("noisy Bell {kind} Z-basis correlator (d = {d}, a = {a})");

        let negativity = match kind {
            CorrelatorKind::Mp => {
                // P_Z = 1 − a(d−1) + 2S with S ∈ [s_min, s_max]
                let (p_min, p_max) = (a, 1.0);
                if corr_z < p_min - RANGE_TOL || corr_z > p_max + RANGE_TOL {
                    return Err(out_of_domain(corr_z, p_min, p_max, context()));
                }
                ((corr_z - 1.0 + a * (df - 1.0)) / 2.0).clamp(0.0, s_max)
            }
            CorrelatorKind::Mi | CorrelatorKind::Pcc => {
                let g = |s: f64| noisy_bell_z_correlator(kind, d, a, s);
                let top = g(s_max)?;
                // lowest attainable value: MI can reach 0 inside the separable segment
                let bottom = match kind {
                    CorrelatorKind::Mi if s_min < 0.0 => 0.0,
                    _ => g(s_min)?,
                };
                if corr_z > top + RANGE_TOL || corr_z < bottom - RANGE_TOL {
                    return Err(out_of_domain(corr_z, bottom, top, context()));
                }
                if s_max - lo <= self.tol {
                    lo
                } else {
                    let edge = g(lo)?;
                    if corr_z <= edge + END_SNAP {
                        // at or below the N = 0 value: separable (or the least-entangled end)
                        lo
                    } else {
                        self.bisect(g, lo, s_max, corr_z, &context())?
                    }
                }
            }
        };
        Ok(CharacterizationResult::from_candidates(
            vec![Candidate {
                parameter: a,
                negativity: negativity.max(0.0),
            }],
            None,
            Method {
                family: FamilyKind::NoisyBell,
                correlator: kind,
                bases: "X,X + Z,Z".into(),
            },
        ))
    }

    fn noisy_bell_weight(&self, corr_x: f64, kind: CorrelatorKind, d: usize) -> Result<f64> {
        let df = d as f64;
        let context = || format!("noisy Bell {kind} X-basis correlator (d = {d})");
        match kind {
            CorrelatorKind::Mp => {
                // P_X = a + (1 − a)/d
                if corr_x < 1.0 / df - RANGE_TOL || corr_x > 1.0 + RANGE_TOL {
                    return Err(out_of_domain(corr_x, 1.0 / df, 1.0, context()));
                }
                Ok(((df * corr_x - 1.0) / (df - 1.0)).clamp(0.0, 1.0))
            }
            CorrelatorKind::Mi | CorrelatorKind::Pcc => {
                let f = |a: f64| noisy_bell_x_correlator(kind, d, a);
                let (lo_v, hi_v) = (f(0.0)?, f(1.0)?);
                if corr_x < lo_v - RANGE_TOL || corr_x > hi_v + RANGE_TOL {
                    return Err(out_of_domain(corr_x, lo_v, hi_v, context()));
                }
                self.bisect(f, 0.0, 1.0, corr_x, &context())
            }
        }
    }

    /// Werner inversion from a Z-basis correlator. MI is not injective; values at or
    /// below MI(a = 1) have one preimage on each side of the minimum.
    pub fn werner(&self, corr_z: f64, kind: CorrelatorKind, d: usize) -> Result<CharacterizationResult> {
        check_dim(d)?;
        check_finite(corr_z, "Z-basis correlator")?;
        let df = d as f64;
        let context = || format!("Werner {kind} Z-basis correlator (d = {d})");
        let candidate = |a: f64| Candidate {
            parameter: a,
            negativity: werner_negativity(d, a),
        };
        let candidates = match kind {
            CorrelatorKind::Mp => {
                // P_Z = 2a/(d+1)
                let p_max = 2.0 / (df + 1.0);
                if corr_z < -RANGE_TOL || corr_z > p_max + RANGE_TOL {
                    return Err(out_of_domain(corr_z, 0.0, p_max, context()));
                }
                let a = ((df + 1.0) * corr_z / 2.0).clamp(0.0, 1.0);
                let n = ((1.0 - (df + 1.0) * corr_z) / df).max(0.0);
                vec![Candidate {
                    parameter: a,
                    negativity: n,
                }]
            }
            CorrelatorKind::Pcc => {
                let f = |a: f64| werner_z_correlator(kind, d, a);
                let (v0, v1) = (f(0.0)?, f(1.0)?);
                let (lo_v, hi_v) = (v0.min(v1), v0.max(v1));
                if corr_z < lo_v - RANGE_TOL || corr_z > hi_v + RANGE_TOL {
                    return Err(out_of_domain(corr_z, lo_v, hi_v, context()));
                }
                vec![candidate(self.bisect(f, 0.0, 1.0, corr_z, &context())?)]
            }
            CorrelatorKind::Mi => {
                let band = werner_mi_band(d)?;
                let f = |a: f64| werner_z_correlator(kind, d, a);
                let branches = [(0.0, band.minimizer), (band.minimizer, 1.0)];
                let found = self.branch_preimages(f, &branches, corr_z, &context())?;
                found.into_iter().map(candidate).collect()
            }
        };
        Ok(CharacterizationResult::from_candidates(
            candidates,
            None,
            Method {
                family: FamilyKind::Werner,
                correlator: kind,
                bases: "Z,Z".into(),
            },
        ))
    }

    /// OPH inversion from the correlator of the Z, shifted-Z setting with shift `k`.
    pub fn oph(&self, value: f64, kind: CorrelatorKind, k: i64) -> Result<CharacterizationResult> {
        check_finite(value, "OPH correlator")?;
        let (a_lo, a_hi) = OPH_RANGE;
        let shift = k.rem_euclid(OPH_DIM as i64);
        let context = || format!("OPH {kind} correlator (shift k = {k})");
        if shift == 0 && kind != CorrelatorKind::Mi {
            return Err(Error::Unsupported(format!(
                "OPH {kind} with shift k ≡ 0 (mod 3) does not depend on a"
            )));
        }
        let params = match kind {
            CorrelatorKind::Mp => {
                // Σᵢ p(i, i⊕k): a/7 for k ≡ 1, (5 − a)/7 for k ≡ 2
                let (p_min, p_max) = if shift == 1 {
                    (a_lo / 7.0, a_hi / 7.0)
                } else {
                    ((5.0 - a_hi) / 7.0, (5.0 - a_lo) / 7.0)
                };
                if value < p_min - RANGE_TOL || value > p_max + RANGE_TOL {
                    return Err(out_of_domain(value, p_min, p_max, context()));
                }
                let a = if shift == 1 { 7.0 * value } else { 5.0 - 7.0 * value };
                vec![a.clamp(a_lo, a_hi)]
            }
            CorrelatorKind::Pcc => {
                let f = |a: f64| oph_correlator(kind, a, k);
                let (v0, v1) = (f(a_lo)?, f(a_hi)?);
                let (lo_v, hi_v) = (v0.min(v1), v0.max(v1));
                if value < lo_v - RANGE_TOL || value > hi_v + RANGE_TOL {
                    return Err(out_of_domain(value, lo_v, hi_v, context()));
                }
                vec![self.bisect(f, a_lo, a_hi, value, &context())?]
            }
            CorrelatorKind::Mi => {
                let f = |a: f64| oph_correlator(kind, a, k);
                let a_star = golden_minimum(f, a_lo, a_hi)?;
                let branches = [(a_lo, a_star), (a_star, a_hi)];
                self.branch_preimages(f, &branches, value, &context())?
            }
        };
        let regions: Vec<Region> = params.iter().map(|&a| Region::of_oph(a)).collect();
        let region = regions
            .iter()
            .all(|r| *r == regions[0])
            .then_some(regions[0]);
        let candidates = params
            .into_iter()
            .map(|a| Candidate {
                parameter: a,
                negativity: if Region::of_oph(a) == Region::NptEntangled {
                    oph_negativity(a)
                } else {
                    0.0
                },
            })
            .collect();
        Ok(CharacterizationResult::from_candidates(
            candidates,
            region,
            Method {
                family: FamilyKind::Oph,
                correlator: kind,
                bases: format!("Z,shiftZ:{k}"),
            },
        ))
    }

    /// Preimages of `target` on each monotone branch whose value range contains it.
    fn branch_preimages<F>(
        &self,
        f: F,
        branches: &[(f64, f64)],
        target: f64,
        context: &str,
    ) -> Result<Vec<f64>>
    where
        F: Fn(f64) -> Result<f64> + Copy,
    {
        let mut found = Vec::new();
        // a target at the shared minimum yields the same point twice; it still lies in the band
        let (mut overall_lo, mut overall_hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &(lo, hi) in branches {
            let (v_lo, v_hi) = (f(lo)?, f(hi)?);
            let (min, max) = (v_lo.min(v_hi), v_lo.max(v_hi));
            overall_lo = overall_lo.min(min);
            overall_hi = overall_hi.max(max);
            if target >= min - RANGE_TOL && target <= max + RANGE_TOL {
                found.push(self.bisect(f, lo, hi, target, context)?);
            }
        }
        if found.is_empty() {
            return Err(out_of_domain(target, overall_lo, overall_hi, context.to_string()));
        }
        Ok(found)
    }

    /// Bisection for f(x) = target on [lo, hi] after checking that f is strictly
    /// monotone on an evenly spaced sample of the bracket.
    pub fn bisect<F>(&self, f: F, lo: f64, hi: f64, target: f64, context: &str) -> Result<f64>
    where
        F: Fn(f64) -> Result<f64>,
    {
        if hi - lo <= self.tol {
            return Ok(0.5 * (lo + hi));
        }
        let samples = (0..MONOTONE_SAMPLES)
            .map(|i| f(lo + (hi - lo) * i as f64 / (MONOTONE_SAMPLES - 1) as f64))
            .collect::<Result<Vec<f64>>>()?;
        let increasing = samples.windows(2).all(|w| w[1] > w[0]);
        let decreasing = samples.windows(2).all(|w| w[1] < w[0]);
        if !increasing && !decreasing {
            return Err(Error::NotMonotone {
                lo,
                hi,
                context: context.to_string(),
            });
        }
        let (f_lo, f_hi) = (samples[0], samples[MONOTONE_SAMPLES - 1]);
        if (target - f_lo).abs() <= END_SNAP {
            return Ok(lo);
        }
        if (target - f_hi).abs() <= END_SNAP {
            return Ok(hi);
        }
        let (v_min, v_max) = (f_lo.min(f_hi), f_lo.max(f_hi));
        if target < v_min - RANGE_TOL || target > v_max + RANGE_TOL {
            return Err(Error::BracketFailure { lo, hi, target });
        }
        let (mut a, mut b) = (lo, hi);
        for _ in 0..self.max_iter {
            if b - a <= self.tol {
                break;
            }
            let mid = 0.5 * (a + b);
            let below = f(mid)? < target;
            if below == increasing {
                a = mid;
            } else {
                b = mid;
            }
        }
        Ok(0.5 * (a + b))
    }
}

/// Golden-section search for the minimizer of a unimodal function.
fn golden_minimum<F>(f: F, lo: f64, hi: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut e = a + inv_phi * (b - a);
    let (mut fc, mut fe) = (f(c)?, f(e)?);
    while b - a > GOLDEN_TOL {
        if fc < fe {
            b = e;
            e = c;
            fe = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + inv_phi * (b - a);
            fe = f(e)?;
        }
    }
    Ok(0.5 * (a + b))
}

/// Where the Werner Z-basis MI stops being injective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WernerMiBand {
    /// Interior minimizer of a ↦ I_Z(a).
    pub minimizer: f64,
    /// MI(a = 1); MI values at or below this have two preimages.
    pub threshold: f64,
    /// Smallest a whose MI equals the threshold; the band is [left_edge, 1].
    pub left_edge: f64,
}

static WERNER_MI_BANDS: OnceLock<RwLock<HashMap<usize, WernerMiBand>>> = OnceLock::new();

/// Located numerically once per dimension and cached.
pub fn werner_mi_band(d: usize) -> Result<WernerMiBand> {
    check_dim(d)?;
    let cache = WERNER_MI_BANDS.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(band) = cache.read().ok().and_then(|m| m.get(&d).copied()) {
        return Ok(band);
    }
    let f = |a: f64| werner_z_correlator(CorrelatorKind::Mi, d, a);
    let minimizer = golden_minimum(f, 0.0, 1.0)?;
    let threshold = f(1.0)?;
    let left_edge = Inverter::default().bisect(f, 0.0, minimizer, threshold, "Werner MI band edge")?;
    let band = WernerMiBand {
        minimizer,
        threshold,
        left_edge,
    };
    if let Ok(mut m) = cache.write() {
        m.entry(d).or_insert(band);
    }
    Ok(band)
}
