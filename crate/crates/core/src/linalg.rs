//! Dense complex linear-algebra helpers: the Hermitian eigensolver used by the
//! subspace estimators, fast complex products, vectorization, and norms.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CVector = DVector<C64>;
pub type CMatrix = DMatrix<C64>;

/// Relative tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

const MAX_QR_ITERATIONS_PER_DIM: usize = 1000;

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors, column `k` paired with `values[k]`.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// Columns belonging to the `count` smallest eigenvalues.
    pub fn smallest(&self, count: usize) -> CMatrix {
        let n = self.values.len();
        self.vectors.columns(n - count, count).into_owned()
    }

    /// Columns belonging to the `count` largest eigenvalues.
    pub fn largest(&self, count: usize) -> CMatrix {
        self.vectors.columns(0, count).into_owned()
    }
}

pub fn frobenius(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `max |a_ij - conj(a_ji)|`, relative to the Frobenius norm of `a`.
pub fn hermitian_deviation(a: &CMatrix) -> f64 {
    let scale = frobenius(a);
    if scale == 0.0 {
        return 0.0;
    }
    let n = a.nrows();
    let mut worst = 0.0_f64;
    for j in 0..n {
        for i in 0..=j {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst / scale
}

/// `(A + A^H) / 2`.
pub fn hermitize(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()).scale(0.5)
}

fn split(a: &CMatrix) -> (DMatrix<f64>, DMatrix<f64>) {
    (a.map(|z| z.re), a.map(|z| z.im))
}

fn join(re: DMatrix<f64>, im: &DMatrix<f64>) -> CMatrix {
    CMatrix::from_fn(re.nrows(), re.ncols(), |i, j| C64::new(re[(i, j)], im[(i, j)]))
}

/// `A B`, computed with real matrix products (much faster than the generic
/// complex kernel for the sizes used here).
pub fn mul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ai) = split(a);
    let (br, bi) = split(b);
    // three real products: im = (ar + ai)(br + bi) - ar br - ai bi
    let p1 = &ar * &br;
    let p2 = &ai * &bi;
    let p3 = (&ar + &ai) * (&br + &bi);
    join(&p1 - &p2, &(p3 - p1 - p2))
}

/// `A^H B` without forming the adjoint.
pub fn adjoint_mul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ai) = split(a);
    let (ar, ai) = (ar.transpose(), ai.transpose());
    let (br, bi) = split(b);
    let p1 = &ar * &br;
    let p2 = &ai * &bi;
    let p3 = (&ar - &ai) * (&br + &bi);
    join(&p1 + &p2, &(p3 - p1 + p2))
}

/// `Y Y^H / N` with exactly Hermitian output.
pub fn scaled_gram(y: &CMatrix, n: f64) -> CMatrix {
    let (yr, yi) = split(y);
    let re = (&yr * yr.transpose() + &yi * yi.transpose()) / n;
    let x = &yi * yr.transpose();
    let im = (&x - x.transpose()) / n;
    hermitize(&join(re, &im))
}

/// Column-stacking vectorization.
pub fn vec_cols(a: &CMatrix) -> CVector {
    CVector::from_column_slice(a.as_slice())
}

/// Inverse of [`vec_cols`] for an `rows x cols` matrix.
pub fn unvec(v: &CVector, rows: usize, cols: usize) -> Result<CMatrix> {
    if v.len() != rows * cols {
        return Err(Error::config(format!(
            "cannot reshape length {} into {rows}x{cols}",
            v.len()
        )));
    }
    Ok(CMatrix::from_column_slice(rows, cols, v.as_slice()))
}

/// Exchange (reversal) matrix: ones on the anti-diagonal.
pub fn exchange(n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| {
        if i + j + 1 == n {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Eigenvalues (descending) and orthonormal eigenvectors of a Hermitian
/// matrix, by Householder tridiagonalization and implicit QR.
pub fn eig_hermitian(a: &CMatrix) -> Result<HermitianEigen> {
    if !a.is_square() {
        return Err(Error::domain(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(HermitianEigen { values: vec![], vectors: CMatrix::zeros(0, 0) });
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::domain("matrix has non-finite entries"));
    }
    let dev = hermitian_deviation(a);
    if dev > HERMITIAN_TOL {
        return Err(Error::domain(format!(
            "matrix is not Hermitian (relative deviation {dev:.3e})"
        )));
    }
    let eig = SymmetricEigen::try_new(hermitize(a), f64::EPSILON, MAX_QR_ITERATIONS_PER_DIM * n)
        .ok_or_else(|| Error::numerical(format!("eigensolver did not converge on a {n}x{n} matrix")))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]).then(i.cmp(&j)));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}
