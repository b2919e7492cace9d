//! Closed-form joint distributions of each family, written in terms of the family
//! parameter and (where it applies) the signed Negativity. These are the forward maps
//! the inversions run backwards; they never touch a density matrix.

use crate::correlators::{correlator_value, CorrelatorKind};
use crate::error::Result;
use crate::measurement::JointDistribution;
use crate::states::OPH_DIM;

/// Z⊗Z table of the noisy Bell state at mixing weight `a` and signed Negativity `s`:
/// diagonal (1 − a(d−1) + 2s)/d, off-diagonal a/d − 2s/(d(d−1)).
pub fn noisy_bell_z_table(d: usize, a: f64, s: f64) -> Result<JointDistribution> {
    let df = d as f64;
    let diag = (1.0 - a * (df - 1.0) + 2.0 * s) / df;
    let off = a / df - 2.0 * s / (df * (df - 1.0));
    JointDistribution::with_label_values(d, d, uniform_pattern(d, diag, off))
}

/// X⊗X table of the noisy Bell state: a·δᵢⱼ/d + (1 − a)/d².
pub fn noisy_bell_x_table(d: usize, a: f64) -> Result<JointDistribution> {
    let df = d as f64;
    let base = (1.0 - a) / (df * df);
    JointDistribution::with_label_values(d, d, uniform_pattern(d, a / df + base, base))
}

/// Z⊗Z table of the Werner state in terms of its signed Negativity n = (1 − 2a)/d:
/// diagonal (1 − d·n)/(d(d+1)), off-diagonal (1 + n)/(d² − 1).
pub fn werner_z_table(d: usize, a: f64) -> Result<JointDistribution> {
    let df = d as f64;
    let n = (1.0 - 2.0 * a) / df;
    let diag = (1.0 - df * n) / (df * (df + 1.0));
    let off = (1.0 + n) / (df * df - 1.0);
    JointDistribution::with_label_values(d, d, uniform_pattern(d, diag, off))
}

/// X⊗X table of the Werner state. U⊗U invariance makes it the Z⊗Z table with party B's
/// outcome j read as −j mod d, because party B measures the conjugate Fourier basis.
pub fn werner_x_table(d: usize, a: f64) -> Result<JointDistribution> {
    let z = werner_z_table(d, a)?;
    let mut p = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            p[i * d + (d - j) % d] = z.p(i, j);
        }
    }
    JointDistribution::with_label_values(d, d, p)
}

/// Table of the one-parameter Horodecki state for p(i, j) = ⟨i, j ⊕ k|ρ|i, j ⊕ k⟩.
///
/// The state is diagonal in the product basis with 2/21 on |i,i⟩, a/21 on |i,i⊕1⟩ and
/// (5 − a)/21 on |i,i⊕2⟩.
pub fn oph_table(a: f64, k: i64) -> Result<JointDistribution> {
    let d = OPH_DIM;
    let shift = k.rem_euclid(d as i64) as usize;
    let weights = [2.0 / 21.0, a / 21.0, (5.0 - a) / 21.0];
    let mut p = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            let offset = (j + shift + d - i) % d;
            p[i * d + j] = weights[offset];
        }
    }
    JointDistribution::with_label_values(d, d, p)
}

pub(crate) fn uniform_pattern(d: usize, diag: f64, off: f64) -> Vec<f64> {
    (0..d * d)
        .map(|idx| if idx / d == idx % d { diag } else { off })
        .collect()
}

pub fn noisy_bell_z_correlator(kind: CorrelatorKind, d: usize, a: f64, s: f64) -> Result<f64> {
    correlator_value(&noisy_bell_z_table(d, a, s)?, kind)
}

pub fn noisy_bell_x_correlator(kind: CorrelatorKind, d: usize, a: f64) -> Result<f64> {
    correlator_value(&noisy_bell_x_table(d, a)?, kind)
}

pub fn werner_z_correlator(kind: CorrelatorKind, d: usize, a: f64) -> Result<f64> {
    correlator_value(&werner_z_table(d, a)?, kind)
}

pub fn werner_x_correlator(kind: CorrelatorKind, d: usize, a: f64) -> Result<f64> {
    correlator_value(&werner_x_table(d, a)?, kind)
}

pub fn oph_correlator(kind: CorrelatorKind, a: f64, k: i64) -> Result<f64> {
    correlator_value(&oph_table(a, k)?, kind)
}
