//! Real polynomials in the state coordinates `x_1..x_{ℓ²-1}` with the
//! Lie–Poisson bracket and coefficient-sum norm bounds.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::lie_basis::{MatrixBasis, StateCoords};

/// Global orientation of the Lie–Poisson bracket,
/// `{x_a, x_b} = POISSON_SIGN · Σ_c C_ab^c x_c`.
///
/// With `[t_a, t_b] = i Σ_c C_ab^c t_c` the quantized linear symbols satisfy
/// `i N [Q_N(x_a), Q_N(x_b)] = -Σ_c C_ab^c Q_N(x_c)` exactly, so the sign that
/// makes the DGR defect vanish on linear symbols is `-1`. The
/// `quantize::calibrate_bracket_sign` routine recomputes it.
pub const POISSON_SIGN: f64 = -1.0;

pub type Exponent = Vec<u32>;

/// Polynomial with canonical (zero-free) sparse coefficient storage.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Exponent, f64>,
}

/// Order `k` of the derivative norm `‖·‖^(k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormOrder {
    Finite(usize),
    Infinite,
}

/// Upper bound for the derivative norm of a polynomial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormBound {
    pub value: f64,
    pub order: NormOrder,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, value: f64) -> Self {
        Self::monomial(nvars, vec![0; nvars], value)
    }

    /// The coordinate `x_{index+1}` (0-based index).
    pub fn var(nvars: usize, index: usize) -> Self {
        let mut e = vec![0; nvars];
        e[index] = 1;
        Self::monomial(nvars, e, 1.0)
    }

    pub fn monomial(nvars: usize, exponent: Exponent, coeff: f64) -> Self {
        assert_eq!(exponent.len(), nvars, "exponent length must equal nvars");
        let mut p = Self::zero(nvars);
        p.add_term(exponent, coeff);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Exponent, f64)>>(nvars: usize, terms: I) -> Self {
        let mut p = Self::zero(nvars);
        for (e, v) in terms {
            assert_eq!(e.len(), nvars, "exponent length must equal nvars");
            p.add_term(e, v);
        }
        p
    }

    fn add_term(&mut self, exponent: Exponent, coeff: f64) {
        if coeff == 0.0 {
            return;
        }
        let entry = self.terms.entry(exponent);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = *o.get() + coeff;
                if s == 0.0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, f64)> {
        self.terms.iter().map(|(e, v)| (e, *v))
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exponent: &[u32]) -> f64 {
        self.terms.get(exponent).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Drops coefficients with `|c| <= tol`.
    pub fn chop(&self, tol: f64) -> Self {
        Self {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(_, v)| v.abs() > tol)
                .map(|(e, v)| (e.clone(), *v))
                .collect(),
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: other.nvars,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (e, v) in &other.terms {
            out.add_term(e.clone(), *v);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, factor: f64) -> Self {
        if factor == 0.0 {
            return Self::zero(self.nvars);
        }
        Self {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, v)| (e.clone(), v * factor))
                .filter(|(_, v)| *v != 0.0)
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = Self::zero(self.nvars);
        for (e1, v1) in &self.terms {
            for (e2, v2) in &other.terms {
                let e: Exponent = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, v1 * v2);
            }
        }
        Ok(out)
    }

    /// `∂f/∂x_{index+1}`.
    pub fn derivative(&self, index: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, v) in &self.terms {
            let k = e[index];
            if k > 0 {
                let mut d = e.clone();
                d[index] -= 1;
                out.add_term(d, v * k as f64);
            }
        }
        out
    }

    /// Mixed partial derivative `∂^α f`.
    pub fn partial(&self, alpha: &[u32]) -> Self {
        let mut out = self.clone();
        for (i, &k) in alpha.iter().enumerate() {
            for _ in 0..k {
                out = out.derivative(i);
            }
        }
        out
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, v)| {
                v * e
                    .iter()
                    .zip(x)
                    .map(|(&k, &xi)| xi.powi(k as i32))
                    .product::<f64>()
            })
            .sum()
    }

    pub fn eval_at(&self, coords: &StateCoords) -> f64 {
        self.eval(&coords.x)
    }

    /// Sum of absolute coefficients; bounds `sup |f|` on the state body since
    /// every coordinate satisfies `|x_c| <= 1` there.
    pub fn coeff_abs_sum(&self) -> f64 {
        self.terms.values().map(|v| v.abs()).sum()
    }

    /// Parses the config syntax, e.g. `1.5*x1^2*x3 - 0.25*x2`.
    pub fn parse(text: &str, nvars: usize) -> Result<Self> {
        Parser::new(text, nvars).parse()
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, v)) in self.terms.iter().enumerate() {
            let mag = v.abs();
            match (i, *v < 0.0) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            write!(f, "{mag}")?;
            for (idx, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*x{}", idx + 1)?,
                    _ => write!(f, "*x{}^{}", idx + 1, k)?,
                }
            }
        }
        Ok(())
    }
}

/// Lie–Poisson bracket `{f,g}(x) = s Σ C_ab^c x_c ∂_a f ∂_b g`.
pub fn poisson_bracket(f: &Polynomial, g: &Polynomial, basis: &MatrixBasis) -> Result<Polynomial> {
    let n = basis.dim();
    f.check_same(g)?;
    if f.nvars != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: f.nvars,
        });
    }
    let df: Vec<Polynomial> = (0..n).map(|a| f.derivative(a)).collect();
    let dg: Vec<Polynomial> = (0..n).map(|b| g.derivative(b)).collect();
    let mut out = Polynomial::zero(n);
    for a in 0..n {
        if df[a].is_zero() {
            continue;
        }
        for b in 0..n {
            if dg[b].is_zero() {
                continue;
            }
            let linear = Polynomial::from_terms(
                n,
                (0..n).map(|cc| {
                    let mut e = vec![0; n];
                    e[cc] = 1;
                    (e, POISSON_SIGN * basis.structure_constant(a, b, cc))
                }),
            );
            if linear.is_zero() {
                continue;
            }
            let term = df[a].mul(&dg[b])?.mul(&linear)?;
            out = out.add(&term)?;
        }
    }
    Ok(out)
}

/// Upper bound on `‖f‖^(k) = Σ_{|α|<=k} ‖∂^α f‖_∞ / α!`.
///
/// Each `‖∂^α f‖_∞` is replaced by the absolute coefficient sum of `∂^α f`.
/// For a monomial `c x^β` the resulting sum collapses to
/// `|c| Σ_{j<=k} binom(|β|, j)`, so the infinite-order bound is
/// `Σ_β |c_β| 2^{|β|}`.
pub fn norm_upper(f: &Polynomial, order: NormOrder) -> NormBound {
    let value = f
        .terms
        .iter()
        .map(|(e, v)| {
            let deg = e.iter().sum::<u32>() as usize;
            let weight = match order {
                NormOrder::Infinite => 2f64.powi(deg as i32),
                NormOrder::Finite(k) => (0..=k.min(deg)).map(|j| binomial(deg, j)).sum(),
            };
            v.abs() * weight
        })
        .sum();
    NormBound { value, order }
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `M = 2 (ℓ²-1)³ max_{a,b,c} C_ab^c`.
pub fn m_constant(basis: &MatrixBasis) -> f64 {
    m_constant_from(basis.dim(), basis.max_c())
}

pub fn m_constant_from(n_generators: usize, max_c: f64) -> f64 {
    2.0 * (n_generators as f64).powi(3) * max_c
}

/// Conservative membership test for `{f : ‖f‖ < δ/(2M)}` using the
/// infinite-order norm bound and an estimated `δ`.
pub fn in_u(f: &Polynomial, delta_est: f64, basis: &MatrixBasis) -> bool {
    norm_upper(f, NormOrder::Infinite).value < delta_est / (2.0 * m_constant(basis))
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    nvars: usize,
    _src: &'a str,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, nvars: usize) -> Self {
        Self {
            chars: src.chars().collect(),
            pos: 0,
            nvars,
            _src: src,
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            column: self.pos + 1,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn parse(mut self) -> Result<Polynomial> {
        let mut out = Polynomial::zero(self.nvars);
        if self.peek().is_none() {
            return self.err("empty polynomial");
        }
        let mut first = true;
        loop {
            let mut sign = 1.0;
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                }
                Some('-') => {
                    self.pos += 1;
                    sign = -1.0;
                }
                Some(_) if first => {}
                Some(c) => return self.err(format!("expected '+' or '-', found '{c}'")),
                None => break,
            }
            first = false;
            let (e, v) = self.term()?;
            out.add_term(e, sign * v);
            if self.peek().is_none() {
                break;
            }
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<(Exponent, f64)> {
        let mut coeff = 1.0;
        let mut exponent = vec![0u32; self.nvars];
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_digit() || c == '.' => coeff *= self.number()?,
                Some('x') => {
                    let (idx, pow) = self.variable()?;
                    exponent[idx] += pow;
                }
                Some(c) => return self.err(format!("expected a number or variable, found '{c}'")),
                None => return self.err("unexpected end of input"),
            }
            if self.peek() == Some('*') {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok((exponent, coeff))
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        while self.pos < self.chars.len() {
            let c = self.chars[self.pos];
            let prev = if self.pos > start {
                self.chars[self.pos - 1]
            } else {
                ' '
            };
            if c.is_ascii_digit()
                || c == '.'
                || c == 'e'
                || c == 'E'
                || ((c == '-' || c == '+') && (prev == 'e' || prev == 'E'))
            {
                self.pos += 1;
            } else {
                break;
            }
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse::<f64>().or_else(|_| {
            self.pos = start;
            self.err(format!("invalid number '{s}'"))
        })
    }

    fn variable(&mut self) -> Result<(usize, u32)> {
        let start = self.pos;
        self.pos += 1; // 'x'
        let digits_start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let digits: String = self.chars[digits_start..self.pos].iter().collect();
        let idx: usize = match digits.parse() {
            Ok(v) => v,
            Err(_) => {
                self.pos = start;
                return self.err("variable needs an index, e.g. x1");
            }
        };
        if idx == 0 || idx > self.nvars {
            self.pos = start;
            return self.err(format!(
                "unknown variable x{idx} (valid: x1..x{})",
                self.nvars
            ));
        }
        let mut pow = 1u32;
        if self.peek() == Some('^') {
            self.pos += 1;
            self.skip_ws();
            let ps = self.pos;
            while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let p: String = self.chars[ps..self.pos].iter().collect();
            pow = match p.parse() {
                Ok(v) => v,
                Err(_) => {
                    self.pos = ps;
                    return self.err("expected a non-negative integer exponent");
                }
            };
        }
        Ok((idx - 1, pow))
    }
}
