use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lie_basis::{MatrixBasis, StateCoords};
use crate::linalg::{self, CMat};
use crate::optim::{nelder_mead, SimplexOptions};
use crate::poly::Polynomial;

use num_complex::Complex64;

/// Sign with which the von Neumann entropy enters the mean-field objective
/// `f(x) + ENTROPY_SIGN * S(x)`. Fixed by the exactly solvable linear case.
pub const ENTROPY_SIGN: f64 = 1.0;

/// `-Σ λ log λ` of the density matrix with coordinates `x`.
pub fn vn_entropy(x: &StateCoords, basis: &MatrixBasis) -> Result<f64> {
    let rho = basis.density_of_coords(x)?;
    Ok(entropy_of_spectrum(&linalg::eigvalsh(&rho)))
}

fn entropy_of_spectrum(eigs: &[f64]) -> f64 {
    eigs.iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum()
}

fn qubit_entropy(r: f64) -> f64 {
    let r = r.min(1.0);
    let p = 0.5 * (1.0 + r);
    entropy_of_spectrum(&[p, 1.0 - p])
}

#[derive(Debug, Clone)]
pub struct VariationalOptions {
    pub n_starts: usize,
    pub seed: u64,
    /// Grid spacing of the oracle for `ℓ = 2`.
    pub grid_step: f64,
    /// Number of random states used as the oracle for `ℓ >= 3`.
    pub oracle_samples: usize,
    pub simplex: SimplexOptions,
}

impl Default for VariationalOptions {
    fn default() -> Self {
        Self {
            n_starts: 64,
            seed: 0x5eed,
            grid_step: 0.05,
            oracle_samples: 4000,
            simplex: SimplexOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct VariationalResult {
    pub argmax_x: StateCoords,
    pub value: f64,
    pub n_starts: usize,
    /// Refined value minus the best oracle value; never negative.
    pub gap_to_grid: f64,
}

/// Maps unconstrained parameters onto the state body.
trait Chart {
    fn dim(&self) -> usize;
    /// State coordinates and entropy.
    fn state(&self, p: &[f64]) -> (Vec<f64>, f64);
    /// Parameters of a point of the body (for starting a search there).
    fn params(&self, x: &[f64]) -> Vec<f64>;
    fn random_params(&self, rng: &mut ChaCha8Rng) -> Vec<f64>;
}

/// Bloch ball: `x = v tanh|v| / |v|`.
struct BlochChart;

impl Chart for BlochChart {
    fn dim(&self) -> usize {
        3
    }

    fn state(&self, p: &[f64]) -> (Vec<f64>, f64) {
        let r = p.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r == 0.0 {
            return (vec![0.0; 3], std::f64::consts::LN_2);
        }
        let s = r.tanh();
        (p.iter().map(|v| v * s / r).collect(), qubit_entropy(s))
    }

    fn params(&self, x: &[f64]) -> Vec<f64> {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r == 0.0 {
            return vec![0.0; 3];
        }
        let rc = r.min(1.0 - 1e-12);
        x.iter().map(|v| v / r * rc.atanh()).collect()
    }

    fn random_params(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        loop {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            if x.iter().map(|v| v * v).sum::<f64>() <= 1.0 {
                return self.params(&x);
            }
        }
    }
}

/// General `ℓ`: `ρ = B B* / Tr(B B*)` with `B` given by `2ℓ²` real numbers.
struct FactorChart<'a> {
    basis: &'a MatrixBasis,
}

impl FactorChart<'_> {
    fn factor(&self, p: &[f64]) -> CMat {
        let l = self.basis.ell();
        CMat::from_fn(l, l, |i, j| Complex64::new(p[2 * (i * l + j)], p[2 * (i * l + j) + 1]))
    }

    fn coords_of(&self, rho: &CMat) -> Vec<f64> {
        self.basis
            .generators()
            .iter()
            .map(|t| linalg::trace(&(rho * t)).re)
            .collect()
    }
}

impl Chart for FactorChart<'_> {
    fn dim(&self) -> usize {
        2 * self.basis.ell() * self.basis.ell()
    }

    fn state(&self, p: &[f64]) -> (Vec<f64>, f64) {
        let b = self.factor(p);
        let mut rho = &b * b.adjoint();
        let tr = linalg::trace(&rho).re;
        if tr <= 1e-300 {
            let l = self.basis.ell();
            return (vec![0.0; self.basis.dim()], (l as f64).ln());
        }
        rho /= Complex64::new(tr, 0.0);
        let rho = linalg::hermitian_part(&rho);
        (self.coords_of(&rho), entropy_of_spectrum(&linalg::eigvalsh(&rho)))
    }

    fn params(&self, x: &[f64]) -> Vec<f64> {
        let rho = self
            .basis
            .affine_density(&StateCoords::new(x.to_vec()))
            .expect("dimension checked by caller");
        let root = linalg::hermitian_fn(&rho, |v| v.max(0.0).sqrt());
        root.transpose()
            .iter()
            .flat_map(|z| [z.re, z.im])
            .collect()
    }

    fn random_params(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..self.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }
}

/// Oracle points of the body: a cubic grid clipped to the Bloch ball for
/// `ℓ = 2`, random states plus the maximally mixed state otherwise.
fn oracle_points(basis: &MatrixBasis, opts: &VariationalOptions, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    if basis.ell() == 2 {
        let steps = (1.0 / opts.grid_step).round() as i64;
        let mut pts = Vec::new();
        for i in -steps..=steps {
            for j in -steps..=steps {
                for k in -steps..=steps {
                    let x = [i, j, k].map(|v| v as f64 * opts.grid_step);
                    if x.iter().map(|v| v * v).sum::<f64>() <= 1.0 + 1e-12 {
                        pts.push(x.to_vec());
                    }
                }
            }
        }
        pts
    } else {
        let mut pts = vec![vec![0.0; basis.dim()]];
        for _ in 0..opts.oracle_samples {
            pts.push(basis.random_coords(rng).x);
        }
        pts
    }
}

/// `sup_x f(x) + ENTROPY_SIGN * S(x)` over the state body.
pub fn mean_field_sup(f: &Polynomial, basis: &MatrixBasis, opts: &VariationalOptions) -> Result<VariationalResult> {
    sup_with_sign(f, basis, opts, ENTROPY_SIGN)
}

fn sup_with_sign(
    f: &Polynomial,
    basis: &MatrixBasis,
    opts: &VariationalOptions,
    sign: f64,
) -> Result<VariationalResult> {
    if f.nvars() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: f.nvars(),
        });
    }
    if opts.n_starts == 0 {
        return Err(Error::InvalidArgument("need at least one start".into()));
    }
    let bloch = BlochChart;
    let factor = FactorChart { basis };
    let chart: &dyn Chart = if basis.ell() == 2 { &bloch } else { &factor };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let objective_at = |x: &[f64], s: f64| f.eval(x) + sign * s;
    let neg = |p: &[f64]| {
        let (x, s) = chart.state(p);
        -objective_at(&x, s)
    };

    let mut grid_best = f64::NEG_INFINITY;
    let mut grid_arg = vec![0.0; basis.dim()];
    for x in oracle_points(basis, opts, &mut rng) {
        let s = if basis.ell() == 2 {
            qubit_entropy(x.iter().map(|v| v * v).sum::<f64>().sqrt())
        } else {
            vn_entropy(&StateCoords::new(x.clone()), basis)?
        };
        let v = objective_at(&x, s);
        if v > grid_best {
            grid_best = v;
            grid_arg = x;
        }
    }

    let mut starts = vec![chart.params(&grid_arg)];
    starts.extend((1..opts.n_starts).map(|_| chart.random_params(&mut rng)));

    let mut best_val = f64::NEG_INFINITY;
    let mut best_x = grid_arg.clone();
    for p0 in starts {
        let mut r = nelder_mead(neg, &p0, &opts.simplex);
        // one restart around the converged point
        r = nelder_mead(neg, &r.x, &opts.simplex);
        let val = -r.value;
        if val > best_val {
            best_val = val;
            best_x = chart.state(&r.x).0;
        }
    }
    if grid_best > best_val {
        best_val = grid_best;
        best_x = grid_arg;
    }
    Ok(VariationalResult {
        argmax_x: StateCoords::new(best_x),
        value: best_val,
        n_starts: opts.n_starts,
        gap_to_grid: best_val - grid_best,
    })
}
