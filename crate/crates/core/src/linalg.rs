//! Small dense complex linear-algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(dim: usize) -> CMat {
    CMat::identity(dim, dim)
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn trace(a: &CMat) -> Complex64 {
    a.trace()
}

/// Largest entrywise deviation from Hermiticity.
pub fn hermiticity_defect(a: &CMat) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..a.nrows() {
        for j in i..a.ncols() {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn is_hermitian(a: &CMat, tol: f64) -> bool {
    a.is_square() && hermiticity_defect(a) <= tol
}

/// Hermitian part `(A + A*)/2`; removes rounding asymmetry before diagonalizing.
pub fn hermitian_part(a: &CMat) -> CMat {
    (a + a.adjoint()).scale(0.5)
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues sorted ascending.
/// Columns of the returned matrix are the matching eigenvectors.
pub fn eigh(a: &CMat) -> (Vec<f64>, CMat) {
    let n = a.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(hermitian_part(a));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    (values, vectors)
}

pub fn eigvalsh(a: &CMat) -> Vec<f64> {
    let n = a.nrows();
    if n == 0 {
        return Vec::new();
    }
    let mut v: Vec<f64> = SymmetricEigen::new(hermitian_part(a))
        .eigenvalues
        .iter()
        .copied()
        .collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Spectral radius of a Hermitian matrix, i.e. its operator norm.
pub fn hermitian_norm(a: &CMat) -> f64 {
    eigvalsh(a).iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Operator (spectral) norm of an arbitrary square matrix.
pub fn spectral_norm(a: &CMat) -> f64 {
    let gram = a.adjoint() * a;
    eigvalsh(&gram)
        .last()
        .copied()
        .unwrap_or(0.0)
        .max(0.0)
        .sqrt()
}

/// `f(A)` for Hermitian `A` via its eigen-decomposition.
pub fn hermitian_fn(a: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, vecs) = eigh(a);
    let n = vals.len();
    let mut scaled = vecs.clone();
    for (col, v) in vals.iter().enumerate() {
        let fv = f(*v);
        for r in 0..n {
            scaled[(r, col)] *= fv;
        }
    }
    scaled * vecs.adjoint()
}

pub fn hermitian_expm(a: &CMat) -> CMat {
    hermitian_fn(a, f64::exp)
}

/// General complex matrix exponential by scaling and squaring with a
/// truncated Taylor series.
pub fn expm(a: &CMat) -> CMat {
    let n = a.nrows();
    let norm1 = (0..n)
        .map(|j| (0..n).map(|i| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm1 * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let x = a.scale(scale);
    let mut result = identity(n);
    let mut term = identity(n);
    for k in 1..=20 {
        term = &term * &x / c(k as f64);
        result += &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Numerically stable `log Σ exp(x_i)`; returns `-inf` for an empty input.
pub fn log_sum_exp<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let v: Vec<f64> = values.into_iter().collect();
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + v.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}
