//! Least squares in a diagonally weighted coefficient space.
//!
//! Both the commutative and the free modules reduce their distance
//! problems to `min_x ‖W^{1/2}(b − A x)‖₂` where the columns of `A` are
//! sparse coefficient vectors. Rows are restricted to the union of the
//! supports, which loses nothing since every other row is identically zero.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gram condition number above which the orthogonal factorization is used.
pub const CONDITION_LIMIT: f64 = 1e10;

/// Relative size of the smallest `|R_ii|` below which the system is singular.
const RANK_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    Cholesky,
    QrFallback,
}

impl std::fmt::Display for SolveMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolveMethod::Cholesky => write!(f, "cholesky"),
            SolveMethod::QrFallback => write!(f, "qr_fallback"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub coeffs: Vec<Complex64>,
    /// `‖W^{1/2}(b − A x)‖₂`, evaluated directly.
    pub residual: f64,
    /// `‖W^{1/2} b‖₂²`.
    pub target_norm_sq: f64,
    /// `Re bᴴ W A x`.
    pub explained: f64,
    pub gram_condition: f64,
    pub method: SolveMethod,
}

/// Solves the weighted problem for a sparse target and sparse columns.
pub fn solve<K, W>(
    target: &[(K, Complex64)],
    columns: &[Vec<(K, Complex64)>],
    weight: W,
) -> Result<Solution>
where
    K: Ord + Clone,
    W: Fn(&K) -> Result<f64>,
{
    if columns.is_empty() {
        return Err(Error::DegenerateInput("no basis columns".into()));
    }
    let mut rows: BTreeMap<K, usize> = BTreeMap::new();
    for (k, _) in target.iter().chain(columns.iter().flatten()) {
        rows.entry(k.clone()).or_insert(0);
    }
    let mut scale = Vec::with_capacity(rows.len());
    for (i, (k, slot)) in rows.iter_mut().enumerate() {
        *slot = i;
        scale.push(weight(k)?.sqrt());
    }
    let m = rows.len();
    let n = columns.len();
    let mut a = DMatrix::<Complex64>::zeros(m, n);
    for (j, col) in columns.iter().enumerate() {
        for (k, v) in col {
            let i = rows[k];
            a[(i, j)] += v * scale[i];
        }
    }
    let mut b = DVector::<Complex64>::zeros(m);
    for (k, v) in target {
        let i = rows[k];
        b[i] += v * scale[i];
    }
    solve_dense(&a, &b)
}

/// Dense least squares `min ‖b − A x‖₂` through the normal equations,
/// switching to Householder QR on `A` when the Gram matrix is ill-conditioned.
pub fn solve_dense(a: &DMatrix<Complex64>, b: &DVector<Complex64>) -> Result<Solution> {
    let gram = a.adjoint() * a;
    let rhs = a.adjoint() * b;
    let condition = hermitian_condition(&gram);

    let mut method = SolveMethod::Cholesky;
    let mut x = None;
    if condition <= CONDITION_LIMIT {
        if let Some(ch) = gram.clone().cholesky() {
            x = Some(ch.solve(&rhs));
        }
    }
    let x = match x {
        Some(x) => x,
        None => {
            method = SolveMethod::QrFallback;
            qr_solve(a, b, condition)?
        }
    };
    let resid_vec = b - a * &x;
    let residual = resid_vec.norm();
    let explained = rhs.dotc(&x).re;
    Ok(Solution {
        coeffs: x.iter().copied().collect(),
        residual,
        target_norm_sq: b.norm_squared(),
        explained,
        gram_condition: condition,
        method,
    })
}

fn qr_solve(
    a: &DMatrix<Complex64>,
    b: &DVector<Complex64>,
    condition: f64,
) -> Result<DVector<Complex64>> {
    let (m, n) = a.shape();
    if m < n {
        return Err(Error::Conditioning { condition });
    }
    let qr = a.clone().qr();
    let r = qr.r();
    let max_diag = (0..n).map(|i| r[(i, i)].norm()).fold(0.0, f64::max);
    let min_diag = (0..n).map(|i| r[(i, i)].norm()).fold(f64::INFINITY, f64::min);
    if !(min_diag > RANK_TOLERANCE * max_diag) {
        return Err(Error::Conditioning { condition });
    }
    let qtb = qr.q().adjoint() * b;
    r.solve_upper_triangular(&qtb)
        .ok_or(Error::Conditioning { condition })
}

/// Ratio of extreme eigenvalues of a Hermitian positive semidefinite matrix;
/// infinite when the smallest is not positive.
pub fn hermitian_condition(g: &DMatrix<Complex64>) -> f64 {
    if g.nrows() == 0 {
        return 1.0;
    }
    let eig = SymmetricEigen::new(g.clone());
    let max = eig.eigenvalues.max();
    let min = eig.eigenvalues.min();
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Largest singular value.
pub fn top_singular_value(a: &DMatrix<Complex64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone().svd(false, false).singular_values.max()
}

/// Smallest singular value of a square matrix.
pub fn min_singular_value(a: &DMatrix<Complex64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone().svd(false, false).singular_values.min()
}
