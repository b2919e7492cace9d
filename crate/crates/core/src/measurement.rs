//! Measurement bases, local observables, joint outcome distributions and expectations.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{kron, kron_vec, ComplexMatrix, C64, ONE, ZERO};

/// Imaginary parts of probabilities or expectations above this are construction bugs.
pub const IMAG_TOL: f64 = 1e-10;
/// Probabilities in (−PROB_CLAMP, 0) are rounding noise and clamped to 0.
pub const PROB_CLAMP: f64 = 1e-12;
pub const PROB_SUM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisLabel {
    /// Computational basis, eigenbasis of the clock operator Z|i⟩ = ωⁱ|i⟩.
    Z,
    /// Fourier basis (1/√d) Σⱼ ω^{jk}|j⟩, eigenbasis of the shift X|i⟩ = |i ⊕ 1⟩.
    X,
    /// Computational basis with outcome j assigned to |j ⊕ k⟩.
    ShiftedZ(i64),
    /// Eigenbasis of W: the uniform vector (value d−1) followed by the other Fourier vectors (value −1).
    WEigen,
}

/// An orthonormal measurement basis with a real value attached to each outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    d: usize,
    vectors: Vec<Vec<C64>>,
    values: Vec<f64>,
    label: BasisLabel,
    conjugated: bool,
}

impl Basis {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn vectors(&self) -> &[Vec<C64>] {
        &self.vectors
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn label(&self) -> BasisLabel {
        self.label
    }

    pub fn is_conjugated(&self) -> bool {
        self.conjugated
    }

    /// Complex-conjugated vectors, same outcome values.
    ///
    /// For |φ⁺⟩, measuring `b` on A and `b.conjugate()` on B gives perfectly
    /// correlated outcomes, since ⟨v|⊗⟨v*| φ⁺⟩ = ⟨v|v⟩/√d.
    pub fn conjugate(&self) -> Self {
        Self {
            vectors: self
                .vectors
                .iter()
                .map(|v| v.iter().map(|z| z.conj()).collect())
                .collect(),
            conjugated: !self.conjugated,
            ..self.clone()
        }
    }

    /// Replaces the outcome values (must have length d).
    pub fn with_values(mut self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "{} outcome values for a {}-outcome basis",
                values.len(),
                self.d
            )));
        }
        self.values = values;
        Ok(self)
    }

    /// max |⟨vᵢ|vⱼ⟩ − δᵢⱼ|.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, u) in self.vectors.iter().enumerate() {
            for (j, v) in self.vectors.iter().enumerate() {
                let ip: C64 = u.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((ip - target).norm());
            }
        }
        worst
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisLabel::Z => f.write_str("Z"),
            BasisLabel::X => f.write_str("X"),
            BasisLabel::ShiftedZ(k) => write!(f, "shiftZ:{k}"),
            BasisLabel::WEigen => f.write_str("W"),
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.label, if self.conjugated { "*" } else { "" })
    }
}

fn fourier_vector(d: usize, k: usize) -> Vec<C64> {
    let norm = 1.0 / (d as f64).sqrt();
    (0..d)
        .map(|j| C64::from_polar(norm, 2.0 * PI * ((j * k) % d) as f64 / d as f64))
        .collect()
}

fn unit_vector(d: usize, i: usize) -> Vec<C64> {
    let mut v = vec![ZERO; d];
    v[i] = ONE;
    v
}

pub fn make_basis(d: usize, label: BasisLabel) -> Result<Basis> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let labels: Vec<f64> = (0..d).map(|i| i as f64).collect();
    let (vectors, values) = match label {
        BasisLabel::Z => ((0..d).map(|i| unit_vector(d, i)).collect(), labels),
        BasisLabel::X => ((0..d).map(|k| fourier_vector(d, k)).collect(), labels),
        BasisLabel::ShiftedZ(k) => {
            let k = k.rem_euclid(d as i64) as usize;
            ((0..d).map(|j| unit_vector(d, (j + k) % d)).collect(), labels)
        }
        BasisLabel::WEigen => {
            let values = (0..d)
                .map(|k| if k == 0 { d as f64 - 1.0 } else { -1.0 })
                .collect();
            ((0..d).map(|k| fourier_vector(d, k)).collect(), values)
        }
    };
    Ok(Basis {
        d,
        vectors,
        values,
        label,
        conjugated: false,
    })
}

/// A pair of local measurements, one per party.
///
/// Fourier-type bases (X, W) on party B are conjugated, so both `X,X` and `W,W`
/// register |φ⁺⟩ as perfectly correlated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MeasurementSetting {
    ZZ,
    ZX,
    XX,
    ZShift(i64),
    WW,
}

impl MeasurementSetting {
    pub fn bases(&self, d: usize) -> Result<(Basis, Basis)> {
        let (a, b) = match self {
            MeasurementSetting::ZZ => (BasisLabel::Z, BasisLabel::Z),
            MeasurementSetting::ZX => (BasisLabel::Z, BasisLabel::X),
            MeasurementSetting::XX => (BasisLabel::X, BasisLabel::X),
            MeasurementSetting::ZShift(k) => (BasisLabel::Z, BasisLabel::ShiftedZ(*k)),
            MeasurementSetting::WW => (BasisLabel::WEigen, BasisLabel::WEigen),
        };
        let basis_a = make_basis(d, a)?;
        let basis_b = make_basis(d, b)?;
        let basis_b = match b {
            BasisLabel::X | BasisLabel::WEigen => basis_b.conjugate(),
            _ => basis_b,
        };
        Ok((basis_a, basis_b))
    }
}

impl fmt::Display for MeasurementSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasurementSetting::ZZ => f.write_str("Z,Z"),
            MeasurementSetting::ZX => f.write_str("Z,X"),
            MeasurementSetting::XX => f.write_str("X,X"),
            MeasurementSetting::ZShift(k) => write!(f, "Z,shiftZ:{k}"),
            MeasurementSetting::WW => f.write_str("W,W"),
        }
    }
}

impl FromStr for MeasurementSetting {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        match compact.as_str() {
            "Z,Z" => Ok(MeasurementSetting::ZZ),
            "Z,X" => Ok(MeasurementSetting::ZX),
            "X,X" => Ok(MeasurementSetting::XX),
            "W,W" => Ok(MeasurementSetting::WW),
            other => {
                if let Some(k) = other.strip_prefix("Z,shiftZ:") {
                    k.parse::<i64>()
                        .map(MeasurementSetting::ZShift)
                        .map_err(|_| format!("invalid shift `{k}` in `{s}`"))
                } else {
                    Err(format!(
                        "unknown basis pair `{s}` (expected Z,Z | Z,X | X,X | Z,shiftZ:k | W,W)"
                    ))
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ObservableLabel {
    Z,
    W,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    d: usize,
    matrix: ComplexMatrix,
    label: ObservableLabel,
}

impl Observable {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn label(&self) -> ObservableLabel {
        self.label
    }
}

/// Z = diag(e₀, …, e_{d−1}) with distinct zero-sum eᵢ (default j − (d−1)/2),
/// or W = Σ_{i≠j} |j⟩⟨i| (all ones off the diagonal).
pub fn make_observable(
    d: usize,
    label: ObservableLabel,
    zvalues: Option<&[f64]>,
) -> Result<Observable> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let matrix = match label {
        ObservableLabel::Z => {
            let values: Vec<f64> = match zvalues {
                Some(v) => {
                    check_zvalues(d, v)?;
                    v.to_vec()
                }
                None => {
                    let centre = (d as f64 - 1.0) / 2.0;
                    (0..d).map(|j| j as f64 - centre).collect()
                }
            };
            ComplexMatrix::diag_real(&values)
        }
        ObservableLabel::W => {
            ComplexMatrix::from_fn(d, d, |i, j| if i == j { ZERO } else { ONE })
        }
    };
    Ok(Observable { d, matrix, label })
}

fn check_zvalues(d: usize, v: &[f64]) -> Result<()> {
    if v.len() != d {
        return Err(Error::InvalidObservableValues(format!(
            "{} values for dimension {d}",
            v.len()
        )));
    }
    let sum: f64 = v.iter().sum();
    if sum.abs() > 1e-12 {
        return Err(Error::InvalidObservableValues(format!(
            "values sum to {sum}, expected 0"
        )));
    }
    for (i, x) in v.iter().enumerate() {
        if !x.is_finite() || v[i + 1..].contains(x) {
            return Err(Error::InvalidObservableValues(format!(
                "value {x} is repeated or not finite"
            )));
        }
    }
    Ok(())
}

/// Outcome probabilities p(i, j) for a dA × dB measurement, with marginals and outcome values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointDistribution {
    d_a: usize,
    d_b: usize,
    p: Vec<f64>,
    marginal_a: Vec<f64>,
    marginal_b: Vec<f64>,
    values_a: Vec<f64>,
    values_b: Vec<f64>,
}

impl JointDistribution {
    /// Builds a distribution from a row-major table, clamping rounding-level negatives to 0.
    pub fn new(
        d_a: usize,
        d_b: usize,
        mut p: Vec<f64>,
        values_a: Vec<f64>,
        values_b: Vec<f64>,
    ) -> Result<Self> {
        if p.len() != d_a * d_b || values_a.len() != d_a || values_b.len() != d_b {
            return Err(Error::DimensionMismatch(format!(
                "{} probabilities, {} + {} values for a {d_a}x{d_b} table",
                p.len(),
                values_a.len(),
                values_b.len()
            )));
        }
        for x in p.iter_mut() {
            if !x.is_finite() || *x < -PROB_CLAMP {
                return Err(Error::ParameterOutOfRange {
                    field: "p(i,j)",
                    value: *x,
                    range: "[0, 1]",
                });
            }
            if *x < 0.0 {
                *x = 0.0;
            }
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::TraceMismatch { trace: total });
        }
        let marginal_a = (0..d_a).map(|i| p[i * d_b..(i + 1) * d_b].iter().sum()).collect();
        let marginal_b = (0..d_b)
            .map(|j| (0..d_a).map(|i| p[i * d_b + j]).sum())
            .collect();
        Ok(Self {
            d_a,
            d_b,
            p,
            marginal_a,
            marginal_b,
            values_a,
            values_b,
        })
    }

    /// Table with outcome values equal to the labels 0..d−1 on both sides.
    pub fn with_label_values(d_a: usize, d_b: usize, p: Vec<f64>) -> Result<Self> {
        let va = (0..d_a).map(|i| i as f64).collect();
        let vb = (0..d_b).map(|i| i as f64).collect();
        Self::new(d_a, d_b, p, va, vb)
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.d_a, self.d_b)
    }

    pub fn p(&self, i: usize, j: usize) -> f64 {
        self.p[i * self.d_b + j]
    }

    pub fn table(&self) -> &[f64] {
        &self.p
    }

    pub fn marginal_a(&self) -> &[f64] {
        &self.marginal_a
    }

    pub fn marginal_b(&self) -> &[f64] {
        &self.marginal_b
    }

    pub fn values_a(&self) -> &[f64] {
        &self.values_a
    }

    pub fn values_b(&self) -> &[f64] {
        &self.values_b
    }

    /// Same probabilities, new outcome values.
    pub fn with_values(&self, values_a: Vec<f64>, values_b: Vec<f64>) -> Result<Self> {
        Self::new(self.d_a, self.d_b, self.p.clone(), values_a, values_b)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dims(), other.dims());
        self.p
            .iter()
            .zip(&other.p)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// p(i, j) = ⟨aᵢ ⊗ bⱼ|ρ|aᵢ ⊗ bⱼ⟩.
pub fn joint_distribution(
    rho: &DensityMatrix,
    basis_a: &Basis,
    basis_b: &Basis,
) -> Result<JointDistribution> {
    let (da, db) = rho.dims();
    if basis_a.dim() != da || basis_b.dim() != db {
        return Err(Error::DimensionMismatch(format!(
            "bases of dimension ({}, {}) for a ({da}, {db}) state",
            basis_a.dim(),
            basis_b.dim()
        )));
    }
    let mut p = Vec::with_capacity(da * db);
    for a in basis_a.vectors() {
        for b in basis_b.vectors() {
            let v = kron_vec(a, b);
            let z = rho.matrix().sandwich(&v, &v)?;
            if z.im.abs() > IMAG_TOL {
                return Err(Error::ImaginaryResidue {
                    residue: z.im.abs(),
                    context: "joint probability",
                });
            }
            p.push(z.re);
        }
    }
    JointDistribution::new(
        da,
        db,
        p,
        basis_a.values().to_vec(),
        basis_b.values().to_vec(),
    )
}

/// Moves column j to j ⊕ k. Outcome values stay attached to column positions,
/// so the relabelled table is read as "outcome j now means what j − k meant".
pub fn relabel_joint(jd: &JointDistribution, k: i64) -> JointDistribution {
    let (da, db) = jd.dims();
    let shift = k.rem_euclid(db as i64) as usize;
    let mut p = vec![0.0; da * db];
    for i in 0..da {
        for j in 0..db {
            p[i * db + (j + shift) % db] = jd.p(i, j);
        }
    }
    let mut marginal_b = vec![0.0; db];
    for j in 0..db {
        marginal_b[(j + shift) % db] = jd.marginal_b[j];
    }
    JointDistribution {
        d_a: da,
        d_b: db,
        p,
        marginal_a: jd.marginal_a.clone(),
        marginal_b,
        values_a: jd.values_a.clone(),
        values_b: jd.values_b.clone(),
    }
}

/// Tr(ρ · (A ⊗ B)); `None` stands for the identity on that side.
pub fn expectation(
    rho: &DensityMatrix,
    op_a: Option<&Observable>,
    op_b: Option<&Observable>,
) -> Result<f64> {
    let (da, db) = rho.dims();
    for (op, d, side) in [(op_a, da, "A"), (op_b, db, "B")] {
        if let Some(op) = op {
            if op.dim() != d {
                return Err(Error::DimensionMismatch(format!(
                    "observable of dimension {} on subsystem {side} of dimension {d}",
                    op.dim()
                )));
            }
        }
    }
    let ia;
    let ib;
    let ma = match op_a {
        Some(op) => op.matrix(),
        None => {
            ia = ComplexMatrix::identity(da);
            &ia
        }
    };
    let mb = match op_b {
        Some(op) => op.matrix(),
        None => {
            ib = ComplexMatrix::identity(db);
            &ib
        }
    };
    let z = rho.matrix().trace_product(&kron(ma, mb))?;
    if z.im.abs() > IMAG_TOL {
        return Err(Error::ImaginaryResidue {
            residue: z.im.abs(),
            context: "expectation value",
        });
    }
    Ok(z.re)
}

/// Squares an observable, keeping its label and dimension.
pub(crate) fn observable_squared(op: &Observable) -> Observable {
    Observable {
        d: op.d,
        matrix: &op.matrix * &op.matrix,
        label: op.label,
    }
}
