//! Parametric two-qudit state families and their closed-form Negativity.
//!
//! Each [`StateFamily`] is a small serializable descriptor; [`StateFamily::build`]
//! produces the validated density matrix and [`StateFamily::closed_form_negativity`]
//! evaluates the analytic Negativity, which the numeric partial-transpose route is
//! checked against.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::density::{validate_density, DensityMatrix};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64, ONE};

/// The one-parameter Horodecki family only exists for two qutrits.
pub const OPH_DIM: usize = 3;
pub const OPH_RANGE: (f64, f64) = (2.0, 5.0);

const SCHMIDT_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    /// 𝟙/d²
    Isotropic,
    /// Perfectly correlated in the computational basis.
    ColoredA,
    /// Perfectly anticorrelated in the computational basis.
    ColoredB,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateFamily {
    NoiseOnly { kind: NoiseKind, d: usize },
    /// a|φ⁺⟩⟨φ⁺| + (1−a)[b·iso + (1−b)(c·cnA + (1−c)·cnB)]
    NoisyBell { d: usize, a: f64, b: f64, c: f64 },
    /// Weight `a` on the normalized symmetric projector, entangled for a < 1/2.
    Werner { d: usize, a: f64 },
    /// (2/7)|φ⁺⟩⟨φ⁺| + (a/7)σ₊ + ((5−a)/7)σ₋ on two qutrits, 2 ≤ a ≤ 5.
    Oph { a: f64 },
    /// Σᵢ √λᵢ |ii⟩ in the computational (Schmidt) basis.
    PureSchmidt { lambdas: Vec<f64> },
    /// p|φ⁺⟩⟨φ⁺| + (1−p)·cnA.
    CnaBell { d: usize, p: f64 },
}

/// Families the characterization layer knows how to invert.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    NoisyBell,
    Werner,
    Oph,
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyKind::NoisyBell => "noisy-bell",
            FamilyKind::Werner => "werner",
            FamilyKind::Oph => "oph",
        })
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    Ok(())
}

fn check_unit(field: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::ParameterOutOfRange {
            field,
            value,
            range: "[0, 1]",
        });
    }
    Ok(())
}

impl StateFamily {
    /// Rejects out-of-range parameters; nothing is clamped.
    pub fn validate(&self) -> Result<()> {
        match self {
            StateFamily::NoiseOnly { d, .. } => check_dim(*d),
            StateFamily::NoisyBell { d, a, b, c } => {
                check_dim(*d)?;
                check_unit("a", *a)?;
                check_unit("b", *b)?;
                check_unit("c", *c)
            }
            StateFamily::Werner { d, a } => {
                check_dim(*d)?;
                check_unit("a", *a)
            }
            StateFamily::Oph { a } => {
                if !(OPH_RANGE.0..=OPH_RANGE.1).contains(a) {
                    return Err(Error::ParameterOutOfRange {
                        field: "a",
                        value: *a,
                        range: "[2, 5]",
                    });
                }
                Ok(())
            }
            StateFamily::PureSchmidt { lambdas } => {
                check_dim(lambdas.len())?;
                for &l in lambdas {
                    if !(l >= 0.0 && l.is_finite()) {
                        return Err(Error::ParameterOutOfRange {
                            field: "lambdas",
                            value: l,
                            range: "[0, 1]",
                        });
                    }
                }
                let sum: f64 = lambdas.iter().sum();
                if (sum - 1.0).abs() > SCHMIDT_SUM_TOL {
                    return Err(Error::ParameterOutOfRange {
                        field: "lambdas (sum)",
                        value: sum,
                        range: "{1}",
                    });
                }
                Ok(())
            }
            StateFamily::CnaBell { d, p } => {
                check_dim(*d)?;
                check_unit("p", *p)
            }
        }
    }

    /// Local dimension d (both parties have the same dimension in every family).
    pub fn local_dim(&self) -> usize {
        match self {
            StateFamily::NoiseOnly { d, .. }
            | StateFamily::NoisyBell { d, .. }
            | StateFamily::Werner { d, .. }
            | StateFamily::CnaBell { d, .. } => *d,
            StateFamily::Oph { .. } => OPH_DIM,
            StateFamily::PureSchmidt { lambdas } => lambdas.len(),
        }
    }

    pub fn kind(&self) -> Option<FamilyKind> {
        match self {
            StateFamily::NoisyBell { .. } => Some(FamilyKind::NoisyBell),
            StateFamily::Werner { .. } => Some(FamilyKind::Werner),
            StateFamily::Oph { .. } => Some(FamilyKind::Oph),
            _ => None,
        }
    }

    pub fn build(&self) -> Result<DensityMatrix> {
        self.validate()?;
        let d = self.local_dim();
        let m = match self {
            StateFamily::NoiseOnly { kind, d } => noise_matrix(*kind, *d),
            StateFamily::NoisyBell { d, a, b, c } => {
                let noise = mix(&[
                    (*b, noise_matrix(NoiseKind::Isotropic, *d)),
                    ((1.0 - b) * c, noise_matrix(NoiseKind::ColoredA, *d)),
                    ((1.0 - b) * (1.0 - c), noise_matrix(NoiseKind::ColoredB, *d)),
                ]);
                mix(&[(*a, phi_plus_projector(*d)), (1.0 - a, noise)])
            }
            StateFamily::Werner { d, a } => werner_matrix(*d, *a),
            StateFamily::Oph { a } => mix(&[
                (2.0 / 7.0, phi_plus_projector(OPH_DIM)),
                (a / 7.0, oph_sigma(1)),
                ((5.0 - a) / 7.0, oph_sigma(2)),
            ]),
            StateFamily::PureSchmidt { lambdas } => {
                let d = lambdas.len();
                let mut psi = vec![C64::new(0.0, 0.0); d * d];
                for (i, l) in lambdas.iter().enumerate() {
                    psi[i * d + i] = C64::new(l.sqrt(), 0.0);
                }
                ComplexMatrix::outer(&psi, &psi)
            }
            StateFamily::CnaBell { d, p } => {
                // (p/d) Σ_{j,k} |jj⟩⟨kk| + ((1−p)/d) Σ_j |jj⟩⟨jj|
                let d = *d;
                let n = d * d;
                let mut m = ComplexMatrix::zeros(n, n);
                for j in 0..d {
                    for k in 0..d {
                        m[(j * d + j, k * d + k)] = C64::new(p / d as f64, 0.0);
                    }
                    m[(j * d + j, j * d + j)] += C64::new((1.0 - p) / d as f64, 0.0);
                }
                m
            }
        };
        validate_density(m, d, d)
    }

    /// Analytic Negativity of the family at these parameters.
    pub fn closed_form_negativity(&self) -> Result<f64> {
        self.validate()?;
        Ok(match self {
            StateFamily::NoiseOnly { .. } => 0.0,
            StateFamily::NoisyBell { d, a, b, c } => {
                noisy_bell_signed_negativity(*d, *a, *b, *c).max(0.0)
            }
            StateFamily::Werner { d, a } => werner_negativity(*d, *a),
            StateFamily::Oph { a } => oph_negativity(*a),
            StateFamily::PureSchmidt { lambdas } => {
                let mut s = 0.0;
                for (i, li) in lambdas.iter().enumerate() {
                    for (j, lj) in lambdas.iter().enumerate() {
                        if i != j {
                            s += (li * lj).sqrt();
                        }
                    }
                }
                0.5 * s
            }
            StateFamily::CnaBell { d, p } => p * (*d as f64 - 1.0) / 2.0,
        })
    }
}

impl fmt::Display for StateFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serde_json::to_string(self).map_err(|_| fmt::Error)?)
    }
}

/// The bracket inside the noisy-Bell Negativity before clipping at zero:
/// (1/2d)[−d + a·d² + b − a·b + d(1−a)(1−b)c].
pub fn noisy_bell_signed_negativity(d: usize, a: f64, b: f64, c: f64) -> f64 {
    let d = d as f64;
    (-d + a * d * d + b - a * b + d * (1.0 - a) * (1.0 - b) * c) / (2.0 * d)
}

/// Range of the signed noisy-Bell Negativity over b, c ∈ [0, 1] at fixed a:
/// [(a·d − 1)/2, a(d − 1)/2], attained at (b, c) = (0, 0) and (0, 1).
pub fn noisy_bell_signed_range(d: usize, a: f64) -> (f64, f64) {
    let df = d as f64;
    ((a * df - 1.0) / 2.0, a * (df - 1.0) / 2.0)
}

pub fn werner_negativity(d: usize, a: f64) -> f64 {
    ((1.0 - 2.0 * a) / d as f64).max(0.0)
}

pub fn oph_negativity(a: f64) -> f64 {
    if a > 4.0 {
        (2.0 * (41.0 - 20.0 * a + 4.0 * a * a).sqrt() - 10.0) / 28.0
    } else {
        0.0
    }
}

/// Inverse of the NPT branch of [`oph_negativity`]: a = (5 + √(9 + 140N + 196N²))/2.
pub fn oph_parameter_from_negativity(n: f64) -> f64 {
    0.5 * (5.0 + (9.0 + 140.0 * n + 196.0 * n * n).sqrt())
}

fn mix(terms: &[(f64, ComplexMatrix)]) -> ComplexMatrix {
    let n = terms[0].1.rows();
    let mut acc = ComplexMatrix::zeros(n, n);
    for (w, m) in terms {
        if *w != 0.0 {
            acc = &acc + &m.scale_real(*w);
        }
    }
    acc
}

/// |φ⁺⟩⟨φ⁺| with |φ⁺⟩ = Σᵢ|ii⟩/√d.
pub fn phi_plus_projector(d: usize) -> ComplexMatrix {
    let n = d * d;
    let mut m = ComplexMatrix::zeros(n, n);
    let w = C64::new(1.0 / d as f64, 0.0);
    for i in 0..d {
        for j in 0..d {
            m[(i * d + i, j * d + j)] = w;
        }
    }
    m
}

pub fn noise_matrix(kind: NoiseKind, d: usize) -> ComplexMatrix {
    let n = d * d;
    let df = d as f64;
    let diag: Vec<f64> = (0..n)
        .map(|idx| {
            let (i, j) = (idx / d, idx % d);
            match kind {
                NoiseKind::Isotropic => 1.0 / (df * df),
                NoiseKind::ColoredA if i == j => 1.0 / df,
                NoiseKind::ColoredA => 0.0,
                NoiseKind::ColoredB if i != j => 1.0 / (df * (df - 1.0)),
                NoiseKind::ColoredB => 0.0,
            }
        })
        .collect();
    ComplexMatrix::diag_real(&diag)
}

/// Swap operator P = Σ |i⟩⟨j| ⊗ |j⟩⟨i|.
pub fn swap_operator(d: usize) -> ComplexMatrix {
    let n = d * d;
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..d {
        for j in 0..d {
            m[(i * d + j, j * d + i)] = ONE;
        }
    }
    m
}

fn werner_matrix(d: usize, a: f64) -> ComplexMatrix {
    let df = d as f64;
    let id = ComplexMatrix::identity(d * d);
    let p = swap_operator(d);
    let p_sym = (&id + &p).scale_real(0.5);
    let p_as = (&id - &p).scale_real(0.5);
    mix(&[
        (a * 2.0 / (df * (df + 1.0)), p_sym),
        ((1.0 - a) * 2.0 / (df * (df - 1.0)), p_as),
    ])
}

/// σ₊ (shift 1) = (|01⟩⟨01| + |12⟩⟨12| + |20⟩⟨20|)/3, σ₋ (shift 2) = (|10⟩⟨10| + |21⟩⟨21| + |02⟩⟨02|)/3.
fn oph_sigma(shift: usize) -> ComplexMatrix {
    let d = OPH_DIM;
    let mut diag = vec![0.0; d * d];
    for i in 0..d {
        diag[i * d + (i + shift) % d] = 1.0 / 3.0;
    }
    ComplexMatrix::diag_real(&diag)
}
