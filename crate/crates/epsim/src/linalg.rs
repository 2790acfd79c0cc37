//! Small dense complex-matrix helpers shared across modules.
//!
//! Everything here operates on matrices of dimension 2–16, so dense
//! eigendecompositions are always appropriate.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Dynamically sized complex matrix used throughout the crate.
pub type CMatrix = DMatrix<Complex64>;

/// sin(z)/z with the removable singularity filled in.
///
/// Valid for complex arguments, so the same expression covers oscillatory
/// (real z) and over-damped (imaginary z) regimes.
pub fn sinc_c(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        Complex64::ONE - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns eigenvalues in ascending order and the matching eigenvector
/// columns. The input is *assumed* Hermitian; only its lower triangle is
/// referenced by the underlying decomposition.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = m.clone().symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

/// Hermitian part deviation max |m - m†|.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Matrix square root of a positive semidefinite Hermitian matrix.
///
/// Eigenvalues below `clip` are treated as exactly zero, absorbing the
/// tomography noise floor.
pub fn sqrtm_psd(m: &CMatrix, clip: f64) -> CMatrix {
    let (values, vectors) = hermitian_eigen(m);
    let n = values.len();
    let mut out = CMatrix::zeros(n, n);
    for k in 0..n {
        let lambda = if values[k] > clip { values[k] } else { 0.0 };
        let root = Complex64::new(lambda.sqrt(), 0.0);
        let v = vectors.column(k);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += root * v[i] * v[j].conj();
            }
        }
    }
    out
}

/// Kronecker product of two complex matrices.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = CMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}
