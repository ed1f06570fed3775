//! Finite-N quantization of polynomial symbols.
//!
//! `Q_N` sends a monomial `x_{j_1}..x_{j_L}` to the symmetrized elementary
//! tensor `π_N^L(t_{j_1} ⊗ .. ⊗ t_{j_L})` (zero when `L > N`). Two backends
//! implement it: a dense full-tensor one for any `ℓ` and small `N`, and a
//! spin-sector block one for `ℓ = 2` and `N` up to a few hundred.

mod block;
mod dense;

pub use block::{
    mean_field_block, quantize_block, sector_labels, sector_multiplicity, spin_matrices,
    BlockOperator, Sector,
};
pub use dense::{
    collective_average, mean_field_operator, product_state, quantize_dense, symmetrize,
    DenseOperator,
};

use crate::error::{Error, Result};
use crate::lie_basis::{MatrixBasis, StateCoords};
use crate::linalg::{self, CMat, I};
use crate::poly::{poisson_bracket, Polynomial};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Dense,
    Block,
}

impl Backend {
    /// Block backend for qubits beyond ten sites, dense otherwise.
    pub fn auto(ell: usize, n: usize) -> Backend {
        if ell == 2 && n > 10 {
            Backend::Block
        } else {
            Backend::Dense
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Backend::Dense => "dense",
            Backend::Block => "block",
        }
    }
}

/// Size limits for the two backends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Largest admissible `ℓ^N` for the dense backend.
    pub max_dense_dim: usize,
    /// Largest admissible `N` for the block backend.
    pub max_block_n: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_dense_dim: 1 << 14,
            max_block_n: 400,
        }
    }
}

/// Variable indices of a monomial with multiplicity, one slot per factor.
pub(crate) fn word_of(exponent: &[u32]) -> Vec<usize> {
    exponent
        .iter()
        .enumerate()
        .flat_map(|(i, &k)| std::iter::repeat(i).take(k as usize))
        .collect()
}

pub(crate) fn check_symbol(p: &Polynomial, basis: &MatrixBasis) -> Result<()> {
    if p.nvars() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: p.nvars(),
        });
    }
    Ok(())
}

/// A permutation-invariant operator in either representation.
#[derive(Debug, Clone)]
pub enum Operator {
    Dense(DenseOperator),
    Block(BlockOperator),
}

/// One diagonal block with its log-multiplicity (0 for the dense backend).
pub struct SectorView<'a> {
    pub ln_weight: f64,
    pub weight: f64,
    pub matrix: &'a CMat,
}

impl Operator {
    pub fn n_sites(&self) -> usize {
        match self {
            Operator::Dense(d) => d.n_sites,
            Operator::Block(b) => b.n_sites,
        }
    }

    pub fn backend(&self) -> Backend {
        match self {
            Operator::Dense(_) => Backend::Dense,
            Operator::Block(_) => Backend::Block,
        }
    }

    pub fn sectors(&self) -> Vec<SectorView<'_>> {
        match self {
            Operator::Dense(d) => vec![SectorView {
                ln_weight: 0.0,
                weight: 1.0,
                matrix: &d.matrix,
            }],
            Operator::Block(b) => b
                .sectors
                .iter()
                .map(|s| SectorView {
                    ln_weight: s.ln_multiplicity,
                    weight: s.ln_multiplicity.exp(),
                    matrix: &s.block,
                })
                .collect(),
        }
    }

    /// Applies `f` blockwise to two operators of the same shape.
    pub fn zip_with(&self, other: &Operator, f: impl Fn(&CMat, &CMat) -> CMat) -> Result<Operator> {
        match (self, other) {
            (Operator::Dense(a), Operator::Dense(b)) if a.dim() == b.dim() => Ok(Operator::Dense(
                DenseOperator::new(a.n_sites, a.ell, f(&a.matrix, &b.matrix)),
            )),
            (Operator::Block(a), Operator::Block(b)) if a.n_sites == b.n_sites => {
                let sectors = a
                    .sectors
                    .iter()
                    .zip(&b.sectors)
                    .map(|(sa, sb)| Sector {
                        block: f(&sa.block, &sb.block),
                        ..sa.clone()
                    })
                    .collect();
                Ok(Operator::Block(BlockOperator {
                    n_sites: a.n_sites,
                    sectors,
                }))
            }
            _ => Err(Error::InvalidArgument(
                "operators differ in backend or size".into(),
            )),
        }
    }

    pub fn map(&self, f: impl Fn(&CMat) -> CMat) -> Operator {
        match self {
            Operator::Dense(a) => {
                Operator::Dense(DenseOperator::new(a.n_sites, a.ell, f(&a.matrix)))
            }
            Operator::Block(a) => Operator::Block(BlockOperator {
                n_sites: a.n_sites,
                sectors: a
                    .sectors
                    .iter()
                    .map(|s| Sector {
                        block: f(&s.block),
                        ..s.clone()
                    })
                    .collect(),
            }),
        }
    }

    /// Largest Hermiticity defect over all blocks.
    pub fn hermiticity_defect(&self) -> f64 {
        self.sectors()
            .iter()
            .map(|s| linalg::hermiticity_defect(s.matrix))
            .fold(0.0, f64::max)
    }

    /// All eigenvalues with their multiplicity weights.
    pub fn weighted_spectrum(&self) -> Vec<(f64, f64)> {
        self.sectors()
            .iter()
            .flat_map(|s| {
                linalg::eigvalsh(s.matrix)
                    .into_iter()
                    .map(move |v| (v, s.weight))
                    .collect::<Vec<_>>()
            })
            .collect()
    }

    /// `Σ_j m_j Tr(B_j^m)`.
    pub fn trace_moment(&self, m: u32) -> f64 {
        self.sectors()
            .iter()
            .map(|s| {
                let mut p = linalg::identity(s.matrix.nrows());
                for _ in 0..m {
                    p = p * s.matrix;
                }
                s.weight * linalg::trace(&p).re
            })
            .sum()
    }

    /// `Tr e^A`.
    pub fn trace_exp(&self) -> f64 {
        self.sectors()
            .iter()
            .map(|s| s.weight * linalg::eigvalsh(s.matrix).iter().map(|v| v.exp()).sum::<f64>())
            .sum()
    }
}

/// Operator norm (spectral radius for Hermitian input; max over sectors).
pub fn op_norm(op: &Operator) -> f64 {
    op.sectors()
        .iter()
        .map(|s| {
            let scale = s.matrix.norm().max(1e-300);
            if linalg::hermiticity_defect(s.matrix) <= 1e-13 * scale {
                linalg::hermitian_norm(&linalg::hermitian_part(s.matrix))
            } else {
                linalg::spectral_norm(s.matrix)
            }
        })
        .fold(0.0, f64::max)
}

/// `Q_N(p)` in the requested backend.
pub fn quantize(p: &Polynomial, n: usize, basis: &MatrixBasis, backend: Backend, budget: &Budget) -> Result<Operator> {
    match backend {
        Backend::Dense => quantize_dense(p, n, basis, budget).map(Operator::Dense),
        Backend::Block => quantize_block(p, n, basis, budget).map(Operator::Block),
    }
}

/// `p(t^{(N)}_1, ..)` built from collective averages, the mean-field
/// Hamiltonian divided by `N`.
pub fn mean_field(p: &Polynomial, n: usize, basis: &MatrixBasis, backend: Backend, budget: &Budget) -> Result<Operator> {
    match backend {
        Backend::Dense => mean_field_operator(p, n, basis, budget).map(Operator::Dense),
        Backend::Block => mean_field_block(p, n, basis, budget).map(Operator::Block),
    }
}

/// `‖Q_N({f,g}) - i N [Q_N(f), Q_N(g)]‖`.
pub fn dgr_defect(
    f: &Polynomial,
    g: &Polynomial,
    n: usize,
    basis: &MatrixBasis,
    backend: Backend,
    budget: &Budget,
) -> Result<f64> {
    let qf = quantize(f, n, basis, backend, budget)?;
    let qg = quantize(g, n, basis, backend, budget)?;
    let qb = quantize(&poisson_bracket(f, g, basis)?, n, basis, backend, budget)?;
    let scaled = qf.zip_with(&qg, |a, b| linalg::commutator(a, b) * (I * n as f64))?;
    let diff = qb.zip_with(&scaled, |x, y| x - y)?;
    Ok(op_norm(&diff))
}

/// Recomputes the bracket orientation from the DGR condition on linear
/// symbols: returns the sign `s` for which
/// `Q_N(s Σ_c C_ab^c x_c) = i N [Q_N(x_a), Q_N(x_b)]` at `N = 2`.
pub fn calibrate_bracket_sign(basis: &MatrixBasis) -> f64 {
    let budget = Budget::default();
    let n = 2;
    let dim = basis.dim();
    let mut residual = [0.0f64; 2];
    for (slot, sign) in [1.0f64, -1.0].into_iter().enumerate() {
        for a in 0..dim {
            for b in 0..dim {
                let qa = quantize_dense(&Polynomial::var(dim, a), n, basis, &budget).unwrap();
                let qb = quantize_dense(&Polynomial::var(dim, b), n, basis, &budget).unwrap();
                let lin = Polynomial::from_terms(
                    dim,
                    (0..dim).map(|cc| {
                        let mut e = vec![0; dim];
                        e[cc] = 1;
                        (e, sign * basis.structure_constant(a, b, cc))
                    }),
                );
                let ql = quantize_dense(&lin, n, basis, &budget).unwrap();
                let comm = linalg::commutator(&qa.matrix, &qb.matrix) * (I * n as f64);
                residual[slot] = residual[slot].max((ql.matrix - comm).norm());
            }
        }
    }
    if residual[0] <= residual[1] {
        1.0
    } else {
        -1.0
    }
}

/// `ω^N(Q_N(p))` for the product state with single-site coordinates `x`.
///
/// Distinct-site structure makes every monomial of degree `L <= N` evaluate to
/// `x_{j_1}..x_{j_L}`, independent of `N`; monomials with `L > N` contribute 0.
pub fn pairing(x: &StateCoords, p: &Polynomial, n: usize) -> f64 {
    p.terms()
        .filter(|(e, _)| e.iter().sum::<u32>() as usize <= n)
        .map(|(e, v)| {
            v * e
                .iter()
                .zip(&x.x)
                .map(|(&k, &xi)| xi.powi(k as i32))
                .product::<f64>()
        })
        .sum()
}

/// Dense cross-check of [`pairing`]: `Tr(ρ^{⊗N} Q_N(p))`.
pub fn pairing_dense(x: &StateCoords, p: &Polynomial, n: usize, basis: &MatrixBasis, budget: &Budget) -> Result<f64> {
    let rho = basis.density_of_coords(x)?;
    let state = product_state(&rho, n, budget)?;
    let q = quantize_dense(p, n, basis, budget)?;
    Ok(linalg::trace(&(state * q.matrix)).re)
}

/// Compares the full spectrum of a dense operator with that of a block
/// operator expanded by multiplicities.
pub fn block_spectrum_matches(dense: &Operator, block: &Operator, tol: f64) -> bool {
    let mut d: Vec<f64> = dense.weighted_spectrum().into_iter().map(|(v, _)| v).collect();
    let mut b: Vec<f64> = Vec::new();
    for s in block.sectors() {
        let copies = s.weight.round() as usize;
        for v in linalg::eigvalsh(s.matrix) {
            b.extend(std::iter::repeat(v).take(copies));
        }
    }
    if d.len() != b.len() {
        return false;
    }
    d.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    d.iter().zip(&b).all(|(x, y)| (x - y).abs() <= tol)
}
