//! Dense complex matrix kernel.
//!
//! Everything here is a pure function of its arguments. Matrices are
//! `nalgebra::DMatrix`; indices of a composite system are ordered with the
//! first subsystem most significant (the usual Kronecker convention).

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Entrywise tolerance used by Hermiticity checks.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Singular values below `RANK_RTOL * s_max` count as zero in [`numerical_rank`].
pub const RANK_RTOL: f64 = 1e-12;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMatrix::from_fn(ar * br, ac * bc, |r, col| {
        a[(r / br, col / bc)] * b[(r % br, col % bc)]
    })
}

/// Kronecker product of a non-empty list, left to right.
pub fn kron_all<'a, I>(factors: I) -> CMatrix
where
    I: IntoIterator<Item = &'a CMatrix>,
{
    factors
        .into_iter()
        .fold(CMatrix::identity(1, 1), |acc, f| kron(&acc, f))
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// `tr(A B)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    debug_assert_eq!(a.ncols(), b.nrows());
    debug_assert_eq!(a.nrows(), b.ncols());
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Largest entrywise `|M - M†|`; infinite for non-square input.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn is_hermitian(m: &CMatrix) -> bool {
    hermitian_deviation(m) <= HERMITIAN_TOL
}

/// Reduced matrix on the subsystems listed in `keep` (ascending order is
/// used regardless of the order given).
pub fn partial_trace(rho: &CMatrix, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    let total: usize = dims.iter().product();
    if !rho.is_square() || rho.nrows() != total {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{}, subsystem dims {:?} multiply to {}",
            rho.nrows(),
            rho.ncols(),
            dims,
            total
        )));
    }
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::DimensionMismatch(format!(
            "subsystem {bad} does not exist in {} subsystems",
            dims.len()
        )));
    }
    let kept: Vec<bool> = (0..dims.len()).map(|i| keep.contains(&i)).collect();
    let kept_dims: Vec<usize> = (0..dims.len()).filter(|&i| kept[i]).map(|i| dims[i]).collect();
    let traced_dims: Vec<usize> = (0..dims.len()).filter(|&i| !kept[i]).map(|i| dims[i]).collect();
    let dk: usize = kept_dims.iter().product();
    let dt: usize = traced_dims.iter().product();

    // full index from (kept multi-index, traced multi-index)
    let compose = |ik: usize, it: usize| -> usize {
        let mut digits = vec![0usize; dims.len()];
        let (mut rk, mut rt) = (ik, it);
        for i in (0..dims.len()).rev() {
            if kept[i] {
                digits[i] = rk % dims[i];
                rk /= dims[i];
            } else {
                digits[i] = rt % dims[i];
                rt /= dims[i];
            }
        }
        digits.iter().zip(dims).fold(0, |acc, (&dg, &d)| acc * d + dg)
    };

    let mut out = CMatrix::zeros(dk, dk);
    for r in 0..dk {
        for col in 0..dk {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..dt {
                acc += rho[(compose(r, t), compose(col, t))];
            }
            out[(r, col)] = acc;
        }
    }
    Ok(out)
}

/// Singular values in descending order.
pub fn singular_values(x: &CMatrix) -> Vec<f64> {
    if x.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<f64> = x.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

pub fn singular_values_real(x: &DMatrix<f64>) -> Vec<f64> {
    if x.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<f64> = x.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Sum of singular values, `tr √(X†X)`.
pub fn trace_norm(x: &CMatrix) -> f64 {
    singular_values(x).iter().sum()
}

pub fn trace_norm_real(x: &DMatrix<f64>) -> f64 {
    singular_values_real(x).iter().sum()
}

/// Number of singular values above `RANK_RTOL` times the largest one.
pub fn numerical_rank(sv: &[f64]) -> usize {
    let top = sv.iter().copied().fold(0.0_f64, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_RTOL * top).count()
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(h: &CMatrix) -> Result<Vec<f64>> {
    let dev = hermitian_deviation(h);
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// `(λ_min, λ_max)` of a Hermitian matrix.
pub fn hermitian_eig_extremes(h: &CMatrix) -> Result<(f64, f64)> {
    let ev = hermitian_eigenvalues(h)?;
    match (ev.first(), ev.last()) {
        (Some(&lo), Some(&hi)) => Ok((lo, hi)),
        _ => Err(Error::DimensionMismatch("empty matrix".into())),
    }
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
