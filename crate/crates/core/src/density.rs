//! Validated bipartite density matrices, partial transposition and numerical Negativity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, ComplexMatrix, HERMITIAN_TOL};

/// States whose trace is further than this from 1 are rejected.
pub const TRACE_TOL: f64 = 1e-10;
/// Smallest eigenvalue accepted as positive semidefinite.
pub const PSD_TOL: f64 = -1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
}

/// A Hermitian, unit-trace, positive semidefinite operator on C^dA ⊗ C^dB.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
}

impl DensityMatrix {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    pub fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?[0])
    }

    pub fn partial_transpose(&self, subsystem: Subsystem) -> ComplexMatrix {
        partial_transpose_matrix(&self.matrix, self.dim_a, self.dim_b, subsystem)
            .expect("validated density matrix has consistent dimensions")
    }

    pub fn negativity(&self) -> Result<f64> {
        negativity_numeric(self)
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }
}

/// Checks Hermiticity, unit trace and positivity, in that order.
pub fn validate_density(m: ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<DensityMatrix> {
    check_dims(&m, dim_a, dim_b)?;
    let deviation = m.hermitian_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let trace = m.trace().re;
    if (trace - 1.0).abs() > TRACE_TOL {
        return Err(Error::TraceMismatch { trace });
    }
    let min_eigenvalue = hermitian_eigenvalues(&m)?[0];
    if min_eigenvalue < PSD_TOL {
        return Err(Error::NegativeEigenvalue { min_eigenvalue });
    }
    Ok(DensityMatrix {
        matrix: m,
        dim_a,
        dim_b,
    })
}

fn check_dims(m: &ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<()> {
    let n = dim_a * dim_b;
    if dim_a == 0 || dim_b == 0 || m.rows() != n || m.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix with subsystem dimensions ({dim_a}, {dim_b})",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

/// Transposes the chosen tensor factor of an operator on C^dA ⊗ C^dB.
///
/// Row index i·dB + k, column j·dB + l. Transposing A swaps i↔j, transposing B swaps k↔l.
pub fn partial_transpose_matrix(
    m: &ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
    subsystem: Subsystem,
) -> Result<ComplexMatrix> {
    check_dims(m, dim_a, dim_b)?;
    let n = dim_a * dim_b;
    Ok(ComplexMatrix::from_fn(n, n, |row, col| {
        let (i, k) = (row / dim_b, row % dim_b);
        let (j, l) = (col / dim_b, col % dim_b);
        match subsystem {
            Subsystem::A => m[(j * dim_b + k, i * dim_b + l)],
            Subsystem::B => m[(i * dim_b + l, j * dim_b + k)],
        }
    }))
}

pub fn partial_transpose(rho: &DensityMatrix, subsystem: Subsystem) -> ComplexMatrix {
    rho.partial_transpose(subsystem)
}

/// Negativity (‖ρ^{T_A}‖₁ − 1)/2, computed as the absolute sum of negative PT eigenvalues.
pub fn negativity_numeric(rho: &DensityMatrix) -> Result<f64> {
    let ev = hermitian_eigenvalues(&rho.partial_transpose(Subsystem::A))?;
    let abs_sum: f64 = ev.iter().map(|x| x.abs()).sum();
    let sum: f64 = ev.iter().sum();
    Ok((0.5 * (abs_sum - sum)).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron, C64};
    use approx::assert_abs_diff_eq;

    fn phi_plus(d: usize) -> DensityMatrix {
        let mut v = vec![C64::new(0.0, 0.0); d * d];
        for i in 0..d {
            v[i * d + i] = C64::new(1.0 / (d as f64).sqrt(), 0.0);
        }
        validate_density(ComplexMatrix::outer(&v, &v), d, d).unwrap()
    }

    #[test]
    fn maximally_mixed_is_valid() {
        let m = ComplexMatrix::identity(9).scale_real(1.0 / 9.0);
        let rho = validate_density(m, 3, 3).unwrap();
        assert_eq!(rho.dims(), (3, 3));
        assert_abs_diff_eq!(negativity_numeric(&rho).unwrap(), 0.0);
    }

    #[test]
    fn validation_error_codes_are_distinct() {
        let off_trace = ComplexMatrix::diag_real(&[0.505, 0.505]);
        assert!(matches!(
            validate_density(off_trace, 2, 1),
            Err(Error::TraceMismatch { .. })
        ));

        let non_herm = ComplexMatrix::from_real(2, 2, &[0.5, 0.1, 0.0, 0.5]).unwrap();
        assert!(matches!(
            validate_density(non_herm, 2, 1),
            Err(Error::NotHermitian { .. })
        ));

        let negative = ComplexMatrix::diag_real(&[1.5, -0.5]);
        assert!(matches!(
            validate_density(negative, 1, 2),
            Err(Error::NegativeEigenvalue { .. })
        ));

        let wrong_dims = ComplexMatrix::identity(4).scale_real(0.25);
        assert!(matches!(
            validate_density(wrong_dims, 3, 3),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn pt_of_real_product_state_keeps_spectrum() {
        let ra = ComplexMatrix::from_real(2, 2, &[0.7, 0.2, 0.2, 0.3]).unwrap();
        let rb = ComplexMatrix::from_real(3, 3, &[0.5, 0.1, 0.0, 0.1, 0.3, 0.05, 0.0, 0.05, 0.2])
            .unwrap();
        let rho = validate_density(kron(&ra, &rb), 2, 3).unwrap();
        let pt = rho.partial_transpose(Subsystem::A);
        assert!(pt.max_abs_diff(&kron(&ra.transpose(), &rb)) < 1e-15);
        let before = rho.eigenvalues().unwrap();
        let after = hermitian_eigenvalues(&pt).unwrap();
        for (x, y) in before.iter().zip(&after) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn pt_of_qutrit_bell_state() {
        let rho = phi_plus(3);
        let ev = hermitian_eigenvalues(&rho.partial_transpose(Subsystem::A)).unwrap();
        // swap/3: eigenvalue -1/3 three times, +1/3 six times
        for &x in &ev[..3] {
            assert_abs_diff_eq!(x, -1.0 / 3.0, epsilon = 1e-12);
        }
        for &x in &ev[3..] {
            assert_abs_diff_eq!(x, 1.0 / 3.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(negativity_numeric(&rho).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn pt_is_an_involution_and_subsystems_agree_on_spectrum() {
        let rho = phi_plus(4);
        for sub in [Subsystem::A, Subsystem::B] {
            let once = rho.partial_transpose(sub);
            let twice = partial_transpose_matrix(&once, 4, 4, sub).unwrap();
            assert_eq!(twice, *rho.matrix());
        }
        let ea = hermitian_eigenvalues(&rho.partial_transpose(Subsystem::A)).unwrap();
        let eb = hermitian_eigenvalues(&rho.partial_transpose(Subsystem::B)).unwrap();
        for (x, y) in ea.iter().zip(&eb) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
    }
}
