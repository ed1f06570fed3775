//! Spin-sector backend for `ℓ = 2`.
//!
//! Permutation-invariant operators on `N` qubits are block diagonal in the
//! total-spin decomposition `(ℂ²)^{⊗N} = ⊕_j m_{N,j} · V_j`. Each block is
//! stored once in the `|j, m⟩` basis (`m = j, j-1, .., -j`) together with its
//! multiplicity.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lie_basis::MatrixBasis;
use crate::linalg::{self, c, CMat, I};
use crate::poly::Polynomial;

use super::{word_of, Budget};

#[derive(Debug, Clone)]
pub struct Sector {
    /// Twice the spin label.
    pub two_j: usize,
    pub multiplicity: BigUint,
    pub ln_multiplicity: f64,
    pub block: CMat,
}

impl Sector {
    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }
}

#[derive(Debug, Clone)]
pub struct BlockOperator {
    pub n_sites: usize,
    pub sectors: Vec<Sector>,
}

/// Twice the admissible spins for `N` sites, from `N/2` downwards.
pub fn sector_labels(n: usize) -> Vec<usize> {
    (0..=n / 2).map(|k| n - 2 * k).collect()
}

fn binomial_big(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Number of spin-`j` blocks in `(ℂ²)^{⊗N}`:
/// `binom(N, N/2 - j) - binom(N, N/2 - j - 1)`.
pub fn sector_multiplicity(n: usize, two_j: usize) -> Result<BigUint> {
    if n == 0 || two_j > n || (n - two_j) % 2 != 0 {
        return Err(Error::InvalidSector { n, two_j });
    }
    let k = (n - two_j) / 2;
    let lower = if k == 0 {
        BigUint::zero()
    } else {
        binomial_big(n, k - 1)
    };
    Ok(binomial_big(n, k) - lower)
}

fn ln_big(v: &BigUint) -> f64 {
    if let Some(f) = v.to_f64() {
        if f.is_finite() {
            return f.ln();
        }
    }
    let bits = v.bits();
    let shift = bits.saturating_sub(60);
    let top = (v >> shift).to_f64().unwrap_or(f64::NAN);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `(J_x, J_y, J_z)` for spin `j = two_j/2` in the `m = j..-j` basis.
pub fn spin_matrices(two_j: usize) -> [CMat; 3] {
    let d = two_j + 1;
    let j = two_j as f64 / 2.0;
    let m = |k: usize| j - k as f64;
    let jz = CMat::from_fn(d, d, |r, col| if r == col { c(m(r)) } else { c(0.0) });
    // J+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>; index k-1 holds m+1.
    let mut jp = CMat::zeros(d, d);
    for k in 1..d {
        let mk = m(k);
        jp[(k - 1, k)] = c((j * (j + 1.0) - mk * (mk + 1.0)).sqrt());
    }
    let jm = jp.adjoint();
    let jx = (&jp + &jm) * c(0.5);
    let jy = (&jp - &jm) * (-I * 0.5);
    [jx, jy, jz]
}

pub(crate) fn check_block_supported(basis: &MatrixBasis, n: usize, budget: &Budget) -> Result<()> {
    if basis.ell() != 2 {
        return Err(Error::UnsupportedBackend(format!(
            "the spin-sector backend needs ell = 2, got ell = {}",
            basis.ell()
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    if n > budget.max_block_n {
        return Err(Error::Budget(format!(
            "N = {n} exceeds the block-backend limit {}",
            budget.max_block_n
        )));
    }
    Ok(())
}

/// Distinct-site tuple sums `D(w) = Σ_{distinct i_1..i_L} t_{w_1}(i_1)..t_{w_L}(i_L)`
/// restricted to one spin sector.
struct SectorWords<'a> {
    n: usize,
    basis: &'a MatrixBasis,
    collective: [CMat; 3],
    dim: usize,
    memo: HashMap<Vec<usize>, CMat>,
}

impl<'a> SectorWords<'a> {
    fn new(n: usize, two_j: usize, basis: &'a MatrixBasis) -> Self {
        // Σ_x σ_a(x) = 2 J_a in each sector.
        let [jx, jy, jz] = spin_matrices(two_j);
        Self {
            n,
            basis,
            collective: [jx * c(2.0), jy * c(2.0), jz * c(2.0)],
            dim: two_j + 1,
            memo: HashMap::new(),
        }
    }

    fn get(&mut self, word: &[usize]) -> CMat {
        let mut key = word.to_vec();
        key.sort_unstable();
        if let Some(m) = self.memo.get(&key) {
            return m.clone();
        }
        let value = self.compute(&key);
        self.memo.insert(key, value.clone());
        value
    }

    /// `D(w' a) = D(w') S_a - Σ_m D(w' with w'_m → t_{w'_m} t_a)`, where the
    /// single-site product expands into identity and generators.
    fn compute(&mut self, word: &[usize]) -> CMat {
        let len = word.len();
        if len == 0 {
            return linalg::identity(self.dim);
        }
        if len > self.n {
            return CMat::zeros(self.dim, self.dim);
        }
        let (prefix, last) = (&word[..len - 1], word[len - 1]);
        let mut out = times_tridiagonal(&self.get(prefix), &self.collective[last]);
        for m in 0..prefix.len() {
            let am = prefix[m];
            let scalar = self.basis.product_scalar(am, last);
            if scalar != Complex64::new(0.0, 0.0) {
                let mut reduced = prefix.to_vec();
                reduced.remove(m);
                let free_sites = (self.n + 2 - len) as f64;
                out -= self.get(&reduced) * (scalar * free_sites);
            }
            for cc in 0..self.basis.dim() {
                let coeff = self.basis.product(am, last, cc);
                if coeff != Complex64::new(0.0, 0.0) {
                    let mut replaced = prefix.to_vec();
                    replaced[m] = cc;
                    out -= self.get(&replaced) * coeff;
                }
            }
        }
        out
    }
}

/// `m * s` for tridiagonal `s` in `O(d²)`.
fn times_tridiagonal(m: &CMat, s: &CMat) -> CMat {
    let d = s.nrows();
    let mut out = CMat::zeros(m.nrows(), d);
    for k in 0..d {
        for l in k.saturating_sub(1)..(k + 2).min(d) {
            let v = s[(l, k)];
            if v != Complex64::new(0.0, 0.0) {
                let col = m.column(l) * v;
                let mut target = out.column_mut(k);
                target += col;
            }
        }
    }
    out
}

fn falling(n: usize, m: usize) -> f64 {
    (0..m).map(|i| (n - i) as f64).product()
}

fn build_sectors(n: usize, f: impl Fn(usize) -> CMat + Sync) -> Result<Vec<Sector>> {
    sector_labels(n)
        .into_par_iter()
        .map(|two_j| {
            let multiplicity = sector_multiplicity(n, two_j)?;
            let ln_multiplicity = ln_big(&multiplicity);
            Ok(Sector {
                two_j,
                multiplicity,
                ln_multiplicity,
                block: f(two_j),
            })
        })
        .collect()
}

/// `Q_N(p)` in spin-sector form.
pub fn quantize_block(p: &Polynomial, n: usize, basis: &MatrixBasis, budget: &Budget) -> Result<BlockOperator> {
    check_block_supported(basis, n, budget)?;
    super::check_symbol(p, basis)?;
    let terms: Vec<(Vec<usize>, f64)> = p.terms().map(|(e, v)| (word_of(e), v)).collect();
    let sectors = build_sectors(n, |two_j| {
        let mut words = SectorWords::new(n, two_j, basis);
        let mut block = CMat::zeros(two_j + 1, two_j + 1);
        for (word, coeff) in &terms {
            if word.len() > n {
                continue;
            }
            let d = words.get(word);
            block += d * c(coeff / falling(n, word.len()));
        }
        block
    })?;
    Ok(BlockOperator { n_sites: n, sectors })
}

/// `p` evaluated on collective averages `S_a / N`, monomials taken as ordered
/// operator products.
pub fn mean_field_block(p: &Polynomial, n: usize, basis: &MatrixBasis, budget: &Budget) -> Result<BlockOperator> {
    check_block_supported(basis, n, budget)?;
    super::check_symbol(p, basis)?;
    let terms: Vec<(Vec<usize>, f64)> = p.terms().map(|(e, v)| (word_of(e), v)).collect();
    let sectors = build_sectors(n, |two_j| {
        let [jx, jy, jz] = spin_matrices(two_j);
        let avg = [jx * c(2.0 / n as f64), jy * c(2.0 / n as f64), jz * c(2.0 / n as f64)];
        let mut block = CMat::zeros(two_j + 1, two_j + 1);
        for (word, coeff) in &terms {
            let mut term = linalg::identity(two_j + 1);
            for &a in word {
                term = times_tridiagonal(&term, &avg[a]);
            }
            block += term * c(*coeff);
        }
        block
    })?;
    Ok(BlockOperator { n_sites: n, sectors })
}

impl BlockOperator {
    pub fn identity(n: usize) -> Result<Self> {
        Ok(Self {
            n_sites: n,
            sectors: build_sectors(n, |two_j| linalg::identity(two_j + 1))?,
        })
    }

    /// `Σ_j m_{N,j} (2j+1)`, the full Hilbert-space dimension.
    pub fn total_dimension(&self) -> BigUint {
        self.sectors
            .iter()
            .map(|s| &s.multiplicity * BigUint::from(s.two_j + 1))
            .sum()
    }
}
