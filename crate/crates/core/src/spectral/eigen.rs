//! Cyclic Jacobi eigensolver for small real symmetric matrices.

use super::SpectralError;

const MAX_SWEEPS: usize = 100;
const CONVERGENCE: f64 = 1e-14;
/// Eigenvalues in `[-PSD_TOL·trace, 0)` are roundoff and clamp to 0.
pub const PSD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Eigensystem {
    /// Descending.
    pub values: Vec<f64>,
    /// `vectors[i]` belongs to `values[i]`; first nonzero component positive.
    pub vectors: Vec<Vec<f64>>,
}

#[allow(clippy::needless_range_loop)]
fn off_diagonal_norm(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i][j] * a[i][j];
            }
        }
    }
    s.sqrt()
}

/// Diagonalizes a symmetric matrix with cyclic Jacobi rotations.
#[allow(clippy::needless_range_loop)]
pub fn jacobi_eigen(matrix: &[Vec<f64>]) -> Result<Eigensystem, SpectralError> {
    let n = matrix.len();
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let trace: f64 = (0..n).map(|i| a[i][i]).sum();
    let frob = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    let threshold = CONVERGENCE * trace.abs().max(frob);

    let mut sweeps = 0;
    while off_diagonal_norm(&a) > threshold {
        if sweeps == MAX_SWEEPS {
            return Err(SpectralError::EigensolverFailure { sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = order
        .iter()
        .map(|&i| {
            let mut col: Vec<f64> = (0..n).map(|k| v[k][i]).collect();
            if let Some(first) = col.iter().find(|x| x.abs() > 1e-14).copied() {
                if first < 0.0 {
                    col.iter_mut().for_each(|x| *x = -*x);
                }
            }
            col
        })
        .collect();
    Ok(Eigensystem { values, vectors })
}

/// Eigenvalues `λ²` of a block matrix, descending, with roundoff-level
/// negatives clamped to zero.
pub fn block_eigenvalues(matrix: &[Vec<f64>]) -> Result<Eigensystem, SpectralError> {
    let mut sys = jacobi_eigen(matrix)?;
    let trace: f64 = (0..matrix.len()).map(|i| matrix[i][i]).sum();
    let floor = -PSD_TOL * trace.abs();
    for value in sys.values.iter_mut() {
        if *value < floor {
            return Err(SpectralError::PsdViolation { value: *value, threshold: -floor });
        }
        if *value < 0.0 {
            *value = 0.0;
        }
    }
    Ok(sys)
}
