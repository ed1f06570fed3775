//! Baker–Campbell–Hausdorff coefficients over an abstract bracket, exact
//! Bernoulli numbers and the majorant series `γ(n)`.
//!
//! The recursion is
//!
//! ```text
//! z(1) = a + b
//! z(n) = 1/(2n) [a - b, z(n-1)]
//!      + 1/n Σ_{p>=1, 2p<=n-1} B_{2p}/(2p)! Σ_{k_1+..+k_{2p}=n-1} [z(k_1),[..[z(k_{2p}), a + b]..]]
//! ```
//!
//! Inner sums over compositions are memoized as `T_r(s)`, the sum over all
//! compositions of `s` into `r` parts of the nested bracket, which satisfies
//! `T_r(s) = Σ_k [z(k), T_{r-1}(s-k)]` with `T_0(0) = a + b`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lie_basis::MatrixBasis;
use crate::linalg::{self, c, CMat};
use crate::poly::{poisson_bracket, Polynomial};

/// Exact Bernoulli numbers `B_0..B_max` (convention `B_1 = -1/2`).
#[derive(Debug, Clone)]
pub struct BernoulliTable {
    pub values: Vec<BigRational>,
}

impl BernoulliTable {
    pub fn get(&self, n: usize) -> &BigRational {
        &self.values[n]
    }
}

pub fn bernoulli(up_to: usize) -> BernoulliTable {
    let mut values: Vec<BigRational> = Vec::with_capacity(up_to + 1);
    values.push(BigRational::one());
    for m in 1..=up_to {
        // Σ_{j=0}^{m} C(m+1, j) B_j = 0
        let mut acc = BigRational::zero();
        let mut binom = BigInt::one();
        for (j, bj) in values.iter().enumerate() {
            acc += BigRational::from_integer(binom.clone()) * bj;
            binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        values.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
    }
    BernoulliTable { values }
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// A real Lie algebra presented through its bracket.
pub trait BracketAlgebra {
    type Elem: Clone;

    fn add(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn scale(&self, x: &Self::Elem, factor: f64) -> Self::Elem;
    fn bracket(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn kind(&self) -> BracketKind;

    fn sub(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        self.add(x, &self.scale(y, -1.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BracketKind {
    Commutator,
    ScaledCommutator(f64),
    Poisson,
}

/// Matrix commutator `[x, y] = xy - yx`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Commutator;

/// `N [x, y]`, the bracket whose BCH coefficients are
/// `(1/N) z(N a, N b, [·,·], n)`.
#[derive(Debug, Clone, Copy)]
pub struct ScaledCommutator {
    pub n: f64,
}

/// Lie–Poisson bracket on polynomials over a generator basis.
#[derive(Debug, Clone, Copy)]
pub struct PoissonAlgebra<'a> {
    pub basis: &'a MatrixBasis,
}

impl BracketAlgebra for Commutator {
    type Elem = CMat;
    fn add(&self, x: &CMat, y: &CMat) -> CMat {
        x + y
    }
    fn scale(&self, x: &CMat, factor: f64) -> CMat {
        x * c(factor)
    }
    fn bracket(&self, x: &CMat, y: &CMat) -> CMat {
        linalg::commutator(x, y)
    }
    fn kind(&self) -> BracketKind {
        BracketKind::Commutator
    }
}

impl BracketAlgebra for ScaledCommutator {
    type Elem = CMat;
    fn add(&self, x: &CMat, y: &CMat) -> CMat {
        x + y
    }
    fn scale(&self, x: &CMat, factor: f64) -> CMat {
        x * c(factor)
    }
    fn bracket(&self, x: &CMat, y: &CMat) -> CMat {
        linalg::commutator(x, y) * c(self.n)
    }
    fn kind(&self) -> BracketKind {
        BracketKind::ScaledCommutator(self.n)
    }
}

impl BracketAlgebra for PoissonAlgebra<'_> {
    type Elem = Polynomial;
    fn add(&self, x: &Polynomial, y: &Polynomial) -> Polynomial {
        x.add(y).expect("polynomials share the basis dimension")
    }
    fn scale(&self, x: &Polynomial, factor: f64) -> Polynomial {
        x.scale(factor)
    }
    fn bracket(&self, x: &Polynomial, y: &Polynomial) -> Polynomial {
        poisson_bracket(x, y, self.basis).expect("polynomials share the basis dimension")
    }
    fn kind(&self) -> BracketKind {
        BracketKind::Poisson
    }
}

/// Coefficients `z(1)..z(k)`; `coeffs[n-1]` holds `z(n)`.
#[derive(Debug, Clone)]
pub struct BchSeries<E> {
    pub coeffs: Vec<E>,
    pub kind: BracketKind,
}

impl<E: Clone> BchSeries<E> {
    pub fn z(&self, n: usize) -> &E {
        &self.coeffs[n - 1]
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// `Σ_{n<=k} z(n)`.
    pub fn truncation<A: BracketAlgebra<Elem = E>>(&self, alg: &A, k: usize) -> E {
        let k = k.min(self.coeffs.len());
        let mut acc = self.coeffs[0].clone();
        for z in &self.coeffs[1..k] {
            acc = alg.add(&acc, z);
        }
        acc
    }
}

/// Runs the BCH recursion up to order `k >= 1`.
pub fn bch_coefficients<A: BracketAlgebra>(
    alg: &A,
    a: &A::Elem,
    b: &A::Elem,
    k: usize,
) -> BchSeries<A::Elem> {
    assert!(k >= 1, "BCH order must be at least 1");
    let bern = bernoulli(k.max(2));
    let sum = alg.add(a, b);
    let diff = alg.sub(a, b);

    let mut z: Vec<A::Elem> = vec![sum.clone()];
    // nested[r][s] = T_r(s); only s >= r is populated.
    let mut nested: Vec<Vec<Option<A::Elem>>> = vec![vec![None; k]; k];

    for n in 2..=k {
        let s = n - 1;
        // Fill T_r(s) for r = 1..=s from z(1..=s) and T_{r-1}(< s).
        for r in 1..=s {
            let mut acc: Option<A::Elem> = None;
            for first in 1..=(s + 1 - r) {
                let rest = s - first;
                let inner = if r == 1 {
                    if rest == 0 {
                        Some(&sum)
                    } else {
                        None
                    }
                } else {
                    nested[r - 1][rest].as_ref()
                };
                if let Some(inner) = inner {
                    let term = alg.bracket(&z[first - 1], inner);
                    acc = Some(match acc {
                        None => term,
                        Some(prev) => alg.add(&prev, &term),
                    });
                }
            }
            nested[r][s] = acc;
        }

        let lead = alg.bracket(&diff, &z[n - 2]);
        let mut zn = alg.scale(&lead, rational_to_f64(&ratio(1, 2 * n as i64)));
        let mut p = 1;
        while 2 * p <= n - 1 {
            if let Some(t) = &nested[2 * p][s] {
                let coeff = bern.get(2 * p)
                    / BigRational::from_integer(factorial(2 * p) * BigInt::from(n));
                zn = alg.add(&zn, &alg.scale(t, rational_to_f64(&coeff)));
            }
            p += 1;
        }
        z.push(zn);
    }
    BchSeries {
        coeffs: z,
        kind: alg.kind(),
    }
}

/// Classical BCH coefficients `z(t·a, b, {·,·}, n)` for polynomial symbols.
pub fn classical_bch(
    a_inf: &Polynomial,
    b_inf: &Polynomial,
    t: f64,
    k: usize,
    basis: &MatrixBasis,
) -> Result<BchSeries<Polynomial>> {
    for p in [a_inf, b_inf] {
        if p.nvars() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: p.nvars(),
            });
        }
    }
    if k == 0 {
        return Err(Error::InvalidArgument("truncation order must be >= 1".into()));
    }
    let alg = PoissonAlgebra { basis };
    Ok(bch_coefficients(&alg, &a_inf.scale(t), b_inf, k))
}

/// `Σ_{n<=k} z̄_{∞,t}(n)`.
pub fn classical_truncation(
    a_inf: &Polynomial,
    b_inf: &Polynomial,
    t: f64,
    k: usize,
    basis: &MatrixBasis,
) -> Result<Polynomial> {
    let series = classical_bch(a_inf, b_inf, t, k, basis)?;
    Ok(series.truncation(&PoissonAlgebra { basis }, k))
}

/// Iterator over compositions of `total` into `parts` positive integers, in
/// lexicographic order.
#[derive(Debug, Clone)]
pub struct Compositions {
    current: Option<Vec<usize>>,
    total: usize,
}

impl Compositions {
    pub fn new(total: usize, parts: usize) -> Self {
        let current = if parts == 0 || parts > total {
            None
        } else {
            let mut v = vec![1; parts];
            v[parts - 1] = total - (parts - 1);
            Some(v)
        };
        Self { current, total }
    }
}

impl Iterator for Compositions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let v = self.current.as_mut().unwrap();
        let parts = v.len();
        // Advance: find rightmost position (excluding last) that can grow.
        let mut advanced = false;
        for i in (0..parts.saturating_sub(1)).rev() {
            let prefix: usize = v[..=i].iter().sum();
            let remaining_slots = parts - i - 1;
            if prefix + 1 + remaining_slots <= self.total {
                v[i] += 1;
                for slot in v.iter_mut().take(parts - 1).skip(i + 1) {
                    *slot = 1;
                }
                let used: usize = v[..parts - 1].iter().sum();
                v[parts - 1] = self.total - used;
                advanced = true;
                break;
            }
        }
        if !advanced {
            self.current = None;
        }
        Some(out)
    }
}

/// Exact coefficients of the majorant series `y(z) = Σ γ(n) z^n` together
/// with an empirical estimate of its convergence radius.
#[derive(Debug, Clone)]
pub struct MajorantSeries {
    /// `gamma[n-1] = γ(n)`.
    pub gamma: Vec<BigRational>,
    pub delta_est: f64,
}

impl MajorantSeries {
    pub fn n_max(&self) -> usize {
        self.gamma.len()
    }

    pub fn gamma(&self, n: usize) -> &BigRational {
        &self.gamma[n - 1]
    }

    pub fn gamma_f64(&self, n: usize) -> f64 {
        rational_to_f64(self.gamma(n))
    }

    /// `γ(n)/γ(n+1)` for `n = 1..n_max-1`.
    pub fn ratios(&self) -> Vec<f64> {
        self.gamma
            .windows(2)
            .map(|w| rational_to_f64(&(&w[0] / &w[1])))
            .collect()
    }
}

/// Default table length for majorant computations.
pub const DEFAULT_MAJORANT_ORDER: usize = 40;

/// `(n+1) γ(n+1) = γ(n)/2 + Σ_{p>=1, 2p<=n} |B_{2p}|/(2p)! Σ_{k_1+..+k_{2p}=n} γ(k_1)..γ(k_{2p})`,
/// `γ(1) = 1`, in exact arithmetic.
pub fn majorant_gamma(n_max: usize) -> MajorantSeries {
    assert!(n_max >= 1, "majorant table needs n_max >= 1");
    let bern = bernoulli(n_max.max(2));
    let mut gamma: Vec<BigRational> = vec![BigRational::one()];
    // conv[r][s] = Σ over compositions of s into r parts of Π γ(k_i).
    let mut conv: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); n_max + 1]; n_max + 1];
    conv[0][0] = BigRational::one();
    for n in 1..n_max {
        for r in 1..=n {
            let mut acc = BigRational::zero();
            for first in 1..=(n + 1 - r) {
                acc += &gamma[first - 1] * &conv[r - 1][n - first];
            }
            conv[r][n] = acc;
        }
        let mut rhs = &gamma[n - 1] * ratio(1, 2);
        let mut p = 1;
        while 2 * p <= n {
            let w = bern.get(2 * p).abs() / BigRational::from_integer(factorial(2 * p));
            rhs += w * &conv[2 * p][n];
            p += 1;
        }
        gamma.push(rhs / BigRational::from_integer(BigInt::from(n + 1)));
    }
    let delta_est = estimate_radius(&gamma);
    MajorantSeries { gamma, delta_est }
}

/// Same recursion, but enumerating every composition explicitly.
pub fn majorant_gamma_enumerated(n_max: usize) -> Vec<BigRational> {
    let bern = bernoulli(n_max.max(2));
    let mut gamma: Vec<BigRational> = vec![BigRational::one()];
    for n in 1..n_max {
        let mut rhs = &gamma[n - 1] / BigRational::from_integer(BigInt::from(2));
        let mut p = 1;
        while 2 * p <= n {
            let mut inner = BigRational::zero();
            for comp in Compositions::new(n, 2 * p) {
                let mut prod = BigRational::one();
                for &k in comp.iter().rev() {
                    prod *= &gamma[k - 1];
                }
                inner += prod;
            }
            rhs += bern.get(2 * p).abs() / BigRational::from_integer(factorial(2 * p)) * inner;
            p += 1;
        }
        gamma.push(rhs / BigRational::from_integer(BigInt::from(n + 1)));
    }
    gamma
}

fn estimate_radius(gamma: &[BigRational]) -> f64 {
    let mut ratios: Vec<f64> = gamma
        .windows(2)
        .map(|w| rational_to_f64(&(&w[0] / &w[1])))
        .collect();
    if ratios.is_empty() {
        return f64::INFINITY;
    }
    let tail = ratios.len().saturating_sub(10);
    let last = &mut ratios[tail..];
    last.sort_by(f64::total_cmp);
    let mid = last.len() / 2;
    if last.len() % 2 == 1 {
        last[mid]
    } else {
        0.5 * (last[mid - 1] + last[mid])
    }
}

/// `M^{m-1} (2α)^m γ(m)`.
pub fn majorant_bound(m: usize, alpha: f64, m_const: f64, gamma: &MajorantSeries) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidArgument("majorant order starts at 1".into()));
    }
    if m > gamma.n_max() {
        return Err(Error::ExtendTable {
            requested: m,
            available: gamma.n_max(),
        });
    }
    if alpha == 0.0 {
        return Ok(0.0);
    }
    let log = (m as f64 - 1.0) * m_const.ln() + m as f64 * (2.0 * alpha).ln()
        + gamma.gamma_f64(m).ln();
    Ok(log.exp())
}

/// Bound on `Σ_{m>k} ‖z̄_∞(m)‖`: tabulated majorant terms up to `n_max` plus a
/// geometric remainder with ratio `2Mα/δ_est`.
pub fn tail_bound(k: usize, alpha: f64, m_const: f64, gamma: &MajorantSeries) -> Result<f64> {
    let scaled = 2.0 * m_const * alpha;
    if scaled >= gamma.delta_est {
        return Err(Error::OutsideConvergence {
            scaled,
            delta: gamma.delta_est,
        });
    }
    if alpha == 0.0 {
        return Ok(0.0);
    }
    let q = scaled / gamma.delta_est;
    let n_max = gamma.n_max();
    let mut total = 0.0;
    for m in (k + 1)..=n_max {
        total += majorant_bound(m, alpha, m_const, gamma)?;
    }
    let last = majorant_bound(n_max, alpha, m_const, gamma)?;
    let remainder = if k >= n_max {
        last * q.powi((k - n_max + 1) as i32) / (1.0 - q)
    } else {
        last * q / (1.0 - q)
    };
    Ok(total + remainder)
}

/// `‖e^a e^b - e^{Σ_{n<=k} z(n)}‖`, the truncation defect of the matrix BCH
/// series in operator norm.
pub fn matrix_bch_check(a: &CMat, b: &CMat, k: usize) -> f64 {
    let series = bch_coefficients(&Commutator, a, b, k);
    let z = series.truncation(&Commutator, k);
    let lhs = linalg::expm(a) * linalg::expm(b);
    linalg::spectral_norm(&(lhs - linalg::expm(&z)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_basis::build_basis;
    use crate::poly::{norm_upper, NormOrder};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, d: i64) -> BigRational {
        ratio(n, d)
    }

    #[test]
    fn bernoulli_examples() {
        let b = bernoulli(12);
        assert_eq!(b.get(0), &q(1, 1));
        assert_eq!(b.get(1), &q(-1, 2));
        assert_eq!(b.get(2), &q(1, 6));
        assert_eq!(b.get(3), &q(0, 1));
        assert_eq!(b.get(4), &q(-1, 30));
        assert_eq!(b.get(12), &q(-691, 2730));
        for k in 1..6 {
            assert!(b.get(2 * k + 1).is_zero());
        }
    }

    #[test]
    fn compositions_enumerate_all() {
        let all: Vec<Vec<usize>> = Compositions::new(4, 2).collect();
        assert_eq!(all, vec![vec![1, 3], vec![2, 2], vec![3, 1]]);
        assert_eq!(Compositions::new(5, 5).count(), 1);
        assert_eq!(Compositions::new(3, 4).count(), 0);
        // C(n-1, r-1)
        assert_eq!(Compositions::new(11, 4).count(), 120);
    }

    #[test]
    fn gamma_examples() {
        let g = majorant_gamma(12);
        assert_eq!(g.gamma(1), &q(1, 1));
        assert_eq!(g.gamma(2), &q(1, 4));
        assert_eq!(g.gamma(3), &q(5, 72));
        assert!(g.gamma.iter().all(|v| !v.is_negative()));
    }

    #[test]
    fn gamma_two_summation_orders_agree() {
        let a = majorant_gamma(16);
        let b = majorant_gamma_enumerated(16);
        assert_eq!(a.gamma, b);
    }

    #[test]
    fn radius_estimate_is_stable() {
        let g = majorant_gamma(DEFAULT_MAJORANT_ORDER);
        assert!(g.delta_est > 2.0 && g.delta_est < 2.4, "{}", g.delta_est);
        let ratios = g.ratios();
        // ratios decrease towards the radius
        assert!(ratios.windows(2).skip(5).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn majorant_bound_examples() {
        let g = majorant_gamma(10);
        assert_eq!(majorant_bound(1, 0.3, 108.0, &g).unwrap(), 0.6);
        assert!((majorant_bound(2, 0.1, 108.0, &g).unwrap() - 1.08).abs() < 1e-12);
        assert_eq!(majorant_bound(5, 0.0, 108.0, &g).unwrap(), 0.0);
        assert!(matches!(
            majorant_bound(11, 0.1, 108.0, &g),
            Err(Error::ExtendTable { .. })
        ));
    }

    #[test]
    fn tail_bound_behaviour() {
        let g = majorant_gamma(DEFAULT_MAJORANT_ORDER);
        let m = 108.0;
        assert_eq!(tail_bound(3, 0.0, m, &g).unwrap(), 0.0);
        let alpha = 0.5 * g.delta_est / (2.0 * m);
        let tails: Vec<f64> = (1..=30).map(|k| tail_bound(k, alpha, m, &g).unwrap()).collect();
        assert!(tails.windows(2).all(|w| w[1] <= w[0]));
        // geometric decay with ratio about 1/2
        let cst = tails[0] * 2.0;
        for (i, t) in tails.iter().enumerate() {
            let k = i + 1;
            assert!(*t <= 2.0 * cst * 0.5f64.powi(k as i32), "k={k}");
        }
        assert!(matches!(
            tail_bound(3, g.delta_est / (2.0 * m), m, &g),
            Err(Error::OutsideConvergence { .. })
        ));
    }

    fn herm(rng: &mut ChaCha8Rng, dim: usize, norm: f64) -> CMat {
        let raw = CMat::from_fn(dim, dim, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let h = linalg::hermitian_part(&raw);
        let s = linalg::hermitian_norm(&h);
        h * c(norm / s)
    }

    #[test]
    fn low_order_coefficients_match_closed_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = herm(&mut rng, 3, 0.7);
        let b = herm(&mut rng, 3, 0.4);
        let s = bch_coefficients(&Commutator, &a, &b, 4);
        let br = linalg::commutator;
        assert!((s.z(1) - (&a + &b)).norm() < 1e-14);
        assert!((s.z(2) - br(&a, &b) * c(0.5)).norm() < 1e-14);
        let z3 = br(s.z(2), &(&b - &a)) * c(1.0 / 6.0);
        assert!((s.z(3) - z3).norm() < 1e-14);
        // standard fourth-order term -1/24 [b,[a,[a,b]]]
        let z4 = br(&b, &br(&a, &br(&a, &b))) * c(-1.0 / 24.0);
        assert!((s.z(4) - z4).norm() < 1e-14);
    }

    #[test]
    fn matrix_defect_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = herm(&mut rng, 2, 0.5);
        let zero = CMat::zeros(2, 2);
        assert!(matrix_bch_check(&a, &zero, 1) < 1e-14);
        let commuting = &a * c(-0.3) + linalg::identity(2) * c(0.2);
        assert!(matrix_bch_check(&a, &commuting, 1) < 1e-13);

        let a = herm(&mut rng, 2, 0.1);
        let b = herm(&mut rng, 2, 0.1);
        let defects: Vec<f64> = (1..=20).map(|k| matrix_bch_check(&a, &b, k)).collect();
        assert!(defects[19] < 1e-12);
        assert!(defects[0] > defects[5]);
    }

    #[test]
    fn inverse_symmetry() {
        // e^{-b} e^{-a} inverts e^a e^b, so z(n; -b, -a) = -z(n; a, b)
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = herm(&mut rng, 3, 0.8);
        let b = herm(&mut rng, 3, 0.6);
        let s1 = bch_coefficients(&Commutator, &a, &b, 6);
        let s2 = bch_coefficients(&Commutator, &(-&b), &(-&a), 6);
        for n in 1..=6 {
            assert!((s1.z(n) + s2.z(n)).norm() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn scaled_commutator_is_rescaled_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = herm(&mut rng, 2, 0.3);
        let b = herm(&mut rng, 2, 0.2);
        let n = 5.0;
        let scaled = bch_coefficients(&ScaledCommutator { n }, &a, &b, 5);
        let plain = bch_coefficients(&Commutator, &(&a * c(n)), &(&b * c(n)), 5);
        for k in 1..=5 {
            let expect = plain.z(k) * c(1.0 / n);
            assert!((scaled.z(k) - expect).norm() < 1e-11);
        }
        assert_eq!(scaled.kind, BracketKind::ScaledCommutator(5.0));
    }

    #[test]
    fn classical_examples() {
        let basis = build_basis(2).unwrap();
        let a = Polynomial::parse("x3 + 0.5*x3^2", 3).unwrap();
        let b = Polynomial::parse("-0.2*x3^3 + 1", 3).unwrap();
        for k in 1..=6 {
            let z = classical_truncation(&a, &b, 0.7, k, &basis).unwrap();
            assert_eq!(z, a.scale(0.7).add(&b).unwrap());
        }
        let f = Polynomial::parse("x1 + x2*x3", 3).unwrap();
        let g = Polynomial::parse("x3^2 - x1", 3).unwrap();
        let s = classical_bch(&f, &g, 1.0, 3, &basis).unwrap();
        let half = poisson_bracket(&f, &g, &basis).unwrap().scale(0.5);
        assert!(s.z(2).sub(&half).unwrap().max_abs_coeff() < 1e-14);
        for k in 1..=5 {
            let z = classical_truncation(&f, &g, 0.0, k, &basis).unwrap();
            assert_eq!(z, g);
        }
    }

    #[test]
    fn majorant_dominates_classical_coefficients() {
        let basis = build_basis(2).unwrap();
        let gamma = majorant_gamma(DEFAULT_MAJORANT_ORDER);
        let m = crate::poly::m_constant(&basis);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..5 {
            let mk = |rng: &mut ChaCha8Rng| {
                Polynomial::from_terms(
                    3,
                    (0..3).map(|_| {
                        let mut e = vec![0u32; 3];
                        for _ in 0..rng.gen_range(1..=2) {
                            e[rng.gen_range(0..3)] += 1;
                        }
                        (e, rng.gen_range(-1.0..1.0))
                    }),
                )
            };
            let (f, g) = (mk(&mut rng), mk(&mut rng));
            let target = 0.4 * gamma.delta_est / (2.0 * m);
            let f = f.scale(target / norm_upper(&f, NormOrder::Infinite).value);
            let g = g.scale(target / norm_upper(&g, NormOrder::Infinite).value);
            let alpha = target;
            let s = classical_bch(&f, &g, 1.0, 8, &basis).unwrap();
            for n in 1..=8 {
                let lhs = norm_upper(s.z(n), NormOrder::Infinite).value;
                let rhs = majorant_bound(n, alpha, m, &gamma).unwrap();
                assert!(lhs <= rhs * (1.0 + 1e-9), "n={n}: {lhs} > {rhs}");
            }
        }
    }
}
