//! Full-tensor backend on `(ℂ^ℓ)^{⊗N}`. Site 0 is the most significant
//! tensor factor.

use crate::error::{Error, Result};
use crate::lie_basis::MatrixBasis;
use crate::linalg::{self, c, CMat};
use crate::poly::Polynomial;

use super::{word_of, Budget};

/// Hermitian operator on `N` sites of dimension `ℓ` each.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    pub n_sites: usize,
    pub ell: usize,
    pub matrix: CMat,
}

impl DenseOperator {
    pub fn new(n_sites: usize, ell: usize, matrix: CMat) -> Self {
        debug_assert_eq!(matrix.nrows(), ell.pow(n_sites as u32));
        Self {
            n_sites,
            ell,
            matrix,
        }
    }

    pub fn identity(n_sites: usize, ell: usize) -> Self {
        Self::new(n_sites, ell, linalg::identity(ell.pow(n_sites as u32)))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

pub(crate) fn check_dense_budget(ell: usize, n: usize, budget: &Budget) -> Result<usize> {
    let dim = (ell as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if dim > budget.max_dense_dim as u128 {
        return Err(Error::Budget(format!(
            "dense dimension {ell}^{n} exceeds the limit {}",
            budget.max_dense_dim
        )));
    }
    Ok(dim as usize)
}

/// Adds `scale · a` acting on `sites` (in order) to `target`.
fn embed_add(target: &mut CMat, a: &CMat, sites: &[usize], n: usize, ell: usize, scale: f64) {
    let m = sites.len();
    let dim = target.nrows();
    let local_dim = a.nrows();
    // Stride of each site in the global index.
    let strides: Vec<usize> = (0..n).map(|s| ell.pow((n - 1 - s) as u32)).collect();
    let site_strides: Vec<usize> = sites.iter().map(|&s| strides[s]).collect();
    let mut row_offsets = vec![0usize; local_dim];
    for (local, off) in row_offsets.iter_mut().enumerate() {
        let mut rem = local;
        let mut o = 0;
        for k in (0..m).rev() {
            o += (rem % ell) * site_strides[k];
            rem /= ell;
        }
        *off = o;
    }
    for col in 0..dim {
        let mut local_col = 0;
        let mut base = col;
        for &st in &site_strides {
            let digit = (col / st) % ell;
            local_col = local_col * ell + digit;
            base -= digit * st;
        }
        for (local_row, &off) in row_offsets.iter().enumerate() {
            let v = a[(local_row, local_col)];
            if v.re != 0.0 || v.im != 0.0 {
                target[(base + off, col)] += v * scale;
            }
        }
    }
}

fn distinct_tuples(n: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, m: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for s in 0..n {
            if !used[s] {
                used[s] = true;
                cur.push(s);
                rec(n, m, cur, used, out);
                cur.pop();
                used[s] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(n, m, &mut Vec::with_capacity(m), &mut vec![false; n], &mut out);
    out
}

fn falling(n: usize, m: usize) -> f64 {
    (0..m).map(|i| (n - i) as f64).product()
}

/// `π_N^M(a) = ((N-M)!/N!) Σ_{ordered distinct M-tuples} a embedded on the tuple`.
pub fn symmetrize(a: &DenseOperator, n: usize, budget: &Budget) -> Result<DenseOperator> {
    let m = a.n_sites;
    if m > n {
        return Err(Error::InvalidArgument(format!(
            "cannot symmetrize a {m}-site operator into {n} sites"
        )));
    }
    let dim = check_dense_budget(a.ell, n, budget)?;
    if m == 0 {
        return Ok(DenseOperator::new(n, a.ell, linalg::identity(dim) * a.matrix[(0, 0)]));
    }
    let mut out = CMat::zeros(dim, dim);
    let w = 1.0 / falling(n, m);
    for tuple in distinct_tuples(n, m) {
        embed_add(&mut out, &a.matrix, &tuple, n, a.ell, w);
    }
    Ok(DenseOperator::new(n, a.ell, out))
}

/// `Q_N(p)`: each monomial `x_{j_1}..x_{j_L}` becomes
/// `π_N^L(t_{j_1} ⊗ .. ⊗ t_{j_L})`, or zero when `L > N`.
pub fn quantize_dense(p: &Polynomial, n: usize, basis: &MatrixBasis, budget: &Budget) -> Result<DenseOperator> {
    super::check_symbol(p, basis)?;
    let ell = basis.ell();
    let dim = check_dense_budget(ell, n, budget)?;
    let mut out = CMat::zeros(dim, dim);
    for (e, coeff) in p.terms() {
        let word = word_of(e);
        if word.len() > n {
            continue;
        }
        let mut elementary = CMat::identity(1, 1);
        for &a in &word {
            elementary = linalg::kron(&elementary, basis.generator(a));
        }
        let local = DenseOperator::new(word.len(), ell, elementary);
        let sym = symmetrize(&local, n, budget)?;
        out += sym.matrix * c(coeff);
    }
    Ok(DenseOperator::new(n, ell, out))
}

/// Collective average `t_a^{(N)} = (1/N) Σ_x t_a(x)`.
pub fn collective_average(a: usize, n: usize, basis: &MatrixBasis, budget: &Budget) -> Result<DenseOperator> {
    let local = DenseOperator::new(1, basis.ell(), basis.generator(a).clone());
    symmetrize(&local, n, budget)
}

/// `p` evaluated on the collective averages, with each monomial taken as the
/// ordered operator product `Π_a (t_a^{(N)})^{β_a}`.
pub fn mean_field_operator(p: &Polynomial, n: usize, basis: &MatrixBasis, budget: &Budget) -> Result<DenseOperator> {
    super::check_symbol(p, basis)?;
    let dim = check_dense_budget(basis.ell(), n, budget)?;
    let avgs: Vec<CMat> = (0..basis.dim())
        .map(|a| collective_average(a, n, basis, budget).map(|o| o.matrix))
        .collect::<Result<_>>()?;
    let mut out = CMat::zeros(dim, dim);
    for (e, coeff) in p.terms() {
        let mut term = linalg::identity(dim);
        for a in word_of(e) {
            term = term * &avgs[a];
        }
        out += term * c(coeff);
    }
    Ok(DenseOperator::new(n, basis.ell(), out))
}

/// `ρ^{⊗N}` for a single-site density matrix.
pub fn product_state(rho: &CMat, n: usize, budget: &Budget) -> Result<CMat> {
    check_dense_budget(rho.nrows(), n, budget)?;
    let mut out = CMat::identity(1, 1);
    for _ in 0..n {
        out = linalg::kron(&out, rho);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_basis::build_basis;

    #[test]
    fn symmetrize_single_site_sigma_z() {
        let b = build_basis(2).unwrap();
        let sz = DenseOperator::new(1, 2, b.generator(2).clone());
        let out = symmetrize(&sz, 2, &Budget::default()).unwrap();
        let i2 = linalg::identity(2);
        let expect = (linalg::kron(b.generator(2), &i2) + linalg::kron(&i2, b.generator(2))) * c(0.5);
        assert!((out.matrix - expect).norm() < 1e-15);
    }

    #[test]
    fn symmetrize_scalar_and_invariant_inputs() {
        let budget = Budget::default();
        let scalar = DenseOperator::new(0, 2, CMat::identity(1, 1) * c(2.5));
        let out = symmetrize(&scalar, 3, &budget).unwrap();
        assert!((out.matrix - linalg::identity(8) * c(2.5)).norm() < 1e-15);

        let b = build_basis(2).unwrap();
        let x = Polynomial::parse("x1*x3 + x2^2", 3).unwrap();
        let q = quantize_dense(&x, 3, &b, &budget).unwrap();
        let again = symmetrize(&q, 3, &budget).unwrap();
        assert!((again.matrix - q.matrix).norm() < 1e-13);
    }

    #[test]
    fn quantize_examples() {
        let b = build_basis(2).unwrap();
        let budget = Budget::default();
        let one = quantize_dense(&Polynomial::constant(3, 1.0), 3, &b, &budget).unwrap();
        assert!((one.matrix - linalg::identity(8)).norm() < 1e-15);

        let cubic = Polynomial::parse("x1*x2*x3", 3).unwrap();
        assert!(quantize_dense(&cubic, 2, &b, &budget).unwrap().matrix.norm() == 0.0);

        let x3 = Polynomial::var(3, 2);
        let q = quantize_dense(&x3, 2, &b, &budget).unwrap();
        let i2 = linalg::identity(2);
        let expect = (linalg::kron(b.generator(2), &i2) + linalg::kron(&i2, b.generator(2))) * c(0.5);
        assert!((q.matrix - expect).norm() < 1e-15);
    }

    #[test]
    fn budget_is_enforced() {
        let b = build_basis(2).unwrap();
        let tight = Budget {
            max_dense_dim: 16,
            ..Budget::default()
        };
        assert!(matches!(
            quantize_dense(&Polynomial::var(3, 0), 5, &b, &tight),
            Err(Error::Budget(_))
        ));
    }
}
