//! Generator basis of the traceless Hermitian `ℓ×ℓ` matrices.
//!
//! Generators follow the generalized Gell-Mann ordering (off-diagonal
//! symmetric, off-diagonal antisymmetric, diagonal) and are rescaled to unit
//! operator norm, so for `ℓ = 2` they are exactly `(σx, σy, σz)`. All
//! indices are 0-based: coordinate `x1` is index 0.

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, I};
use num_complex::Complex64;
use rand::Rng;

const CLEAN_BELOW: f64 = 1e-13;

/// The generator system `t_1..t_{ℓ²-1}` together with its structure constants
/// `[t_a, t_b] = i Σ_c C_ab^c t_c` and single-site product expansion
/// `t_a t_b = P0_ab 1 + Σ_c P_ab^c t_c`.
#[derive(Debug, Clone)]
pub struct MatrixBasis {
    ell: usize,
    generators: Vec<CMat>,
    /// `Tr(t_a t_a)`; the generators are Hilbert–Schmidt orthogonal.
    hs_weights: Vec<f64>,
    structure: Vec<f64>,
    product_scalar: Vec<Complex64>,
    products: Vec<Complex64>,
    max_c: f64,
}

/// Coordinates `x_μ = Tr(ρ t_μ)` of a single-site state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateCoords {
    pub x: Vec<f64>,
}

impl StateCoords {
    pub fn new(x: Vec<f64>) -> Self {
        Self { x }
    }

    pub fn zeros(n: usize) -> Self {
        Self { x: vec![0.0; n] }
    }

    pub fn norm(&self) -> f64 {
        self.x.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Builds the unit-operator-norm generalized Gell-Mann basis of `M_ℓ(ℂ)`.
pub fn build_basis(ell: usize) -> Result<MatrixBasis> {
    if ell < 2 {
        return Err(Error::InvalidDimension(ell));
    }
    let mut generators = Vec::with_capacity(ell * ell - 1);
    let pairs: Vec<(usize, usize)> = (0..ell)
        .flat_map(|j| (j + 1..ell).map(move |k| (j, k)))
        .collect();
    for &(j, k) in &pairs {
        let mut m = CMat::zeros(ell, ell);
        m[(j, k)] = c(1.0);
        m[(k, j)] = c(1.0);
        generators.push(m);
    }
    for &(j, k) in &pairs {
        let mut m = CMat::zeros(ell, ell);
        m[(j, k)] = -I;
        m[(k, j)] = I;
        generators.push(m);
    }
    for k in 1..ell {
        let mut m = CMat::zeros(ell, ell);
        for i in 0..k {
            m[(i, i)] = c(1.0 / k as f64);
        }
        m[(k, k)] = c(-1.0);
        generators.push(m);
    }
    Ok(MatrixBasis::from_generators(ell, generators))
}

impl MatrixBasis {
    fn from_generators(ell: usize, generators: Vec<CMat>) -> Self {
        let n = generators.len();
        let hs_weights: Vec<f64> = generators
            .iter()
            .map(|t| linalg::trace(&(t * t)).re)
            .collect();

        let mut raw = vec![0.0; n * n * n];
        let mut products = vec![Complex64::new(0.0, 0.0); n * n * n];
        let mut product_scalar = vec![Complex64::new(0.0, 0.0); n * n];
        for a in 0..n {
            for b in 0..n {
                let prod = &generators[a] * &generators[b];
                let comm = linalg::commutator(&generators[a], &generators[b]);
                product_scalar[a * n + b] = clean_c(linalg::trace(&prod) / c(ell as f64));
                for cc in 0..n {
                    let w = hs_weights[cc];
                    // -i Tr([t_a,t_b] t_c) / Tr(t_c t_c)
                    let val = (-I * linalg::trace(&(&comm * &generators[cc]))).re / w;
                    raw[(a * n + b) * n + cc] = val;
                    products[(a * n + b) * n + cc] =
                        clean_c(linalg::trace(&(&prod * &generators[cc])) / c(w));
                }
            }
        }
        let mut structure = vec![0.0; n * n * n];
        let mut max_c = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                for cc in 0..n {
                    let v = 0.5 * (raw[(a * n + b) * n + cc] - raw[(b * n + a) * n + cc]);
                    let v = if v.abs() < CLEAN_BELOW { 0.0 } else { v };
                    structure[(a * n + b) * n + cc] = v;
                    max_c = max_c.max(v.abs());
                }
            }
        }
        Self {
            ell,
            generators,
            hs_weights,
            structure,
            product_scalar,
            products,
            max_c,
        }
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    /// Number of generators, `ℓ² - 1`.
    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[CMat] {
        &self.generators
    }

    pub fn generator(&self, a: usize) -> &CMat {
        &self.generators[a]
    }

    /// `C_ab^c`.
    pub fn structure_constant(&self, a: usize, b: usize, c: usize) -> f64 {
        let n = self.dim();
        self.structure[(a * n + b) * n + c]
    }

    /// Identity component of `t_a t_b`.
    pub fn product_scalar(&self, a: usize, b: usize) -> Complex64 {
        self.product_scalar[a * self.dim() + b]
    }

    /// Component along `t_c` of `t_a t_b`.
    pub fn product(&self, a: usize, b: usize, c: usize) -> Complex64 {
        let n = self.dim();
        self.products[(a * n + b) * n + c]
    }

    /// `max_{a,b,c} |C_ab^c|`.
    pub fn max_c(&self) -> f64 {
        self.max_c
    }

    pub fn hs_weight(&self, a: usize) -> f64 {
        self.hs_weights[a]
    }

    /// `i Σ_c C_ab^c t_c`, the commutator as reconstructed from the structure
    /// constants.
    pub fn commutator_from_structure(&self, a: usize, b: usize) -> CMat {
        let mut out = CMat::zeros(self.ell, self.ell);
        for cc in 0..self.dim() {
            let k = self.structure_constant(a, b, cc);
            if k != 0.0 {
                out += &self.generators[cc] * (I * k);
            }
        }
        out
    }

    /// `P0_ab 1 + Σ_c P_ab^c t_c`.
    pub fn product_from_expansion(&self, a: usize, b: usize) -> CMat {
        let mut out = linalg::identity(self.ell) * self.product_scalar(a, b);
        for cc in 0..self.dim() {
            out += &self.generators[cc] * self.product(a, b, cc);
        }
        out
    }

    /// Coordinates of a density matrix.
    pub fn coords_of_density(&self, rho: &CMat) -> Result<StateCoords> {
        if rho.nrows() != self.ell || rho.ncols() != self.ell {
            return Err(Error::InvalidState(format!(
                "expected a {0}x{0} matrix, got {1}x{2}",
                self.ell,
                rho.nrows(),
                rho.ncols()
            )));
        }
        if !linalg::is_hermitian(rho, 1e-10) {
            return Err(Error::InvalidState("density matrix is not Hermitian".into()));
        }
        let tr = linalg::trace(rho);
        if (tr - c(1.0)).norm() > 1e-10 {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min_eig = linalg::eigvalsh(rho)[0];
        if min_eig < -1e-10 {
            return Err(Error::InvalidState(format!(
                "density matrix has negative eigenvalue {min_eig:e}"
            )));
        }
        let x = self
            .generators
            .iter()
            .map(|t| linalg::trace(&(rho * t)).re)
            .collect();
        Ok(StateCoords { x })
    }

    /// Inverse of [`MatrixBasis::coords_of_density`]; fails when the affine
    /// reconstruction is not positive semidefinite.
    pub fn density_of_coords(&self, coords: &StateCoords) -> Result<CMat> {
        let rho = self.affine_density(coords)?;
        let min_eig = linalg::eigvalsh(&rho)[0];
        if min_eig < -1e-12 {
            return Err(Error::OutOfBody(format!(
                "reconstructed density has eigenvalue {min_eig:e}"
            )));
        }
        Ok(rho)
    }

    /// `1/ℓ + Σ x_μ t_μ / Tr(t_μ²)`, without the positivity check.
    pub fn affine_density(&self, coords: &StateCoords) -> Result<CMat> {
        if coords.x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: coords.x.len(),
            });
        }
        let mut rho = linalg::identity(self.ell) * c(1.0 / self.ell as f64);
        for (mu, &xm) in coords.x.iter().enumerate() {
            if xm != 0.0 {
                rho += &self.generators[mu] * c(xm / self.hs_weights[mu]);
            }
        }
        Ok(rho)
    }

    pub fn in_body(&self, coords: &StateCoords) -> bool {
        self.density_of_coords(coords).is_ok()
    }

    /// A random density matrix `B B* / Tr(B B*)` with Gaussian-like entries.
    pub fn random_density<R: Rng + ?Sized>(&self, rng: &mut R) -> CMat {
        let b = CMat::from_fn(self.ell, self.ell, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let rho = &b * b.adjoint();
        let tr = linalg::trace(&rho);
        rho / tr
    }

    pub fn random_coords<R: Rng + ?Sized>(&self, rng: &mut R) -> StateCoords {
        let rho = self.random_density(rng);
        self.coords_of_density(&rho)
            .expect("random density is a valid state")
    }
}

fn clean_c(z: Complex64) -> Complex64 {
    let re = if z.re.abs() < CLEAN_BELOW { 0.0 } else { z.re };
    let im = if z.im.abs() < CLEAN_BELOW { 0.0 } else { z.im };
    Complex64::new(re, im)
}
