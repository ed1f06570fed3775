use crate::bch::{classical_truncation, majorant_gamma, tail_bound, MajorantSeries, DEFAULT_MAJORANT_ORDER};
use crate::error::{Error, Result};
use crate::lie_basis::MatrixBasis;
use crate::poly::{m_constant, norm_upper, poisson_bracket, NormOrder, Polynomial};

use super::variational::{mean_field_sup, VariationalOptions, VariationalResult};

/// How much the truncated classical BCH series can be trusted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Certificate {
    /// `{a, h} = 0`: the series terminates after the linear term.
    Abelian,
    /// Inside the majorant window; the neglected terms have norm at most
    /// `tail_bound`.
    Majorant { alpha: f64, scaled: f64, tail_bound: f64 },
    /// Outside the window; the value is a truncation without guarantee.
    Uncertified { alpha: f64, scaled: f64 },
}

impl Certificate {
    pub fn tail_bound(&self) -> Option<f64> {
        match self {
            Certificate::Abelian => Some(0.0),
            Certificate::Majorant { tail_bound, .. } => Some(*tail_bound),
            Certificate::Uncertified { .. } => None,
        }
    }

    pub fn is_certified(&self) -> bool {
        !matches!(self, Certificate::Uncertified { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Certificate::Abelian => "abelian",
            Certificate::Majorant { .. } => "majorant",
            Certificate::Uncertified { .. } => "uncertified",
        }
    }
}

#[derive(Debug, Clone)]
pub struct LimitOptions {
    /// Fail instead of returning an uncertified value.
    pub strict: bool,
    pub variational: VariationalOptions,
    pub majorant: MajorantSeries,
}

impl Default for LimitOptions {
    fn default() -> Self {
        Self {
            strict: false,
            variational: VariationalOptions::default(),
            majorant: majorant_gamma(DEFAULT_MAJORANT_ORDER),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FLimit {
    pub t: f64,
    pub value: f64,
    pub truncation: Polynomial,
    pub certificate: Certificate,
    pub sup_z: VariationalResult,
    pub sup_h: VariationalResult,
}

fn brackets_vanish(a: &Polynomial, h: &Polynomial, basis: &MatrixBasis) -> Result<bool> {
    let scale = 1.0 + a.max_abs_coeff() * h.max_abs_coeff();
    Ok(poisson_bracket(a, h, basis)?.chop(1e-13 * scale).is_zero())
}

fn certify(t: f64, h: &Polynomial, a: &Polynomial, k: usize, basis: &MatrixBasis, abelian: bool, opts: &LimitOptions) -> Result<Certificate> {
    if abelian {
        return Ok(Certificate::Abelian);
    }
    let m = m_constant(basis);
    let alpha = norm_upper(&a.scale(t), NormOrder::Infinite)
        .value
        .max(norm_upper(h, NormOrder::Infinite).value);
    let scaled = 2.0 * m * alpha;
    match tail_bound(k, alpha, m, &opts.majorant) {
        Ok(tail) => Ok(Certificate::Majorant {
            alpha,
            scaled,
            tail_bound: tail,
        }),
        Err(Error::OutsideConvergence { scaled, delta }) => {
            if opts.strict {
                Err(Error::OutsideConvergence { scaled, delta })
            } else {
                Ok(Certificate::Uncertified { alpha, scaled })
            }
        }
        Err(e) => Err(e),
    }
}

fn limit_at(
    t: f64,
    h: &Polynomial,
    a: &Polynomial,
    k: usize,
    basis: &MatrixBasis,
    opts: &LimitOptions,
    abelian: bool,
    sup_h: &VariationalResult,
) -> Result<FLimit> {
    let certificate = certify(t, h, a, k, basis, abelian, opts)?;
    let truncation = if abelian {
        a.scale(t).add(h)?
    } else {
        classical_truncation(a, h, t, k, basis)?
    };
    if t == 0.0 {
        return Ok(FLimit {
            t,
            value: 0.0,
            truncation,
            certificate,
            sup_z: sup_h.clone(),
            sup_h: sup_h.clone(),
        });
    }
    let sup_z = mean_field_sup(&truncation, basis, &opts.variational)?;
    Ok(FLimit {
        t,
        value: sup_z.value - sup_h.value,
        truncation,
        certificate,
        sup_z,
        sup_h: sup_h.clone(),
    })
}

/// `F(t) = sup(Z̄^k_t + S) - sup(h + S)` with `Z̄^k_t` the order-`k` classical
/// BCH truncation of `(t a, h)`.
pub fn f_limit(t: f64, h: &Polynomial, a: &Polynomial, k: usize, basis: &MatrixBasis, opts: &LimitOptions) -> Result<FLimit> {
    Ok(f_limit_scan(&[t], h, a, k, basis, opts)?.remove(0))
}

/// [`f_limit`] over several `t`, sharing the `h` optimization.
pub fn f_limit_scan(ts: &[f64], h: &Polynomial, a: &Polynomial, k: usize, basis: &MatrixBasis, opts: &LimitOptions) -> Result<Vec<FLimit>> {
    if k == 0 {
        return Err(Error::InvalidArgument("truncation order must be >= 1".into()));
    }
    let abelian = brackets_vanish(a, h, basis)?;
    let sup_h = mean_field_sup(h, basis, &opts.variational)?;
    ts.iter()
        .map(|&t| limit_at(t, h, a, k, basis, opts, abelian, &sup_h))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_basis::build_basis;

    fn opts() -> LimitOptions {
        LimitOptions {
            variational: VariationalOptions {
                n_starts: 8,
                ..Default::default()
            },
            ..Default::default()
        }
    }

    fn p(s: &str) -> Polynomial {
        Polynomial::parse(s, 3).unwrap()
    }

    #[test]
    fn zero_at_origin() {
        let b = build_basis(2).unwrap();
        let r = f_limit(0.0, &p("x1"), &p("x2"), 3, &b, &opts()).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn commuting_symbols_are_abelian() {
        let b = build_basis(2).unwrap();
        let h = p("0.25*x3^2");
        let a = p("x3");
        let r = f_limit(0.4, &h, &a, 5, &b, &opts()).unwrap();
        assert_eq!(r.certificate, Certificate::Abelian);
        assert_eq!(r.truncation, p("0.4*x3 + 0.25*x3^2"));
        // m = tanh(0.4 + 0.5 m); value = 0.4 m + 0.25 m² + S(m) - log 2
        let mut m = 0.5f64;
        for _ in 0..200 {
            m = (0.4 + 0.5 * m).tanh();
        }
        let pp = 0.5 * (1.0 + m);
        let s = -pp * pp.ln() - (1.0 - pp) * (1.0 - pp).ln();
        let exact = 0.4 * m + 0.25 * m * m + s - 2f64.ln();
        assert!((r.value - exact).abs() < 1e-6, "{} vs {exact}", r.value);
    }

    #[test]
    fn strict_mode_rejects_large_symbols() {
        let b = build_basis(2).unwrap();
        let o = LimitOptions {
            strict: true,
            ..opts()
        };
        let e = f_limit(0.5, &p("x1"), &p("x2"), 3, &b, &o).unwrap_err();
        assert!(matches!(e, Error::OutsideConvergence { .. }));
        let loose = f_limit(0.5, &p("x1"), &p("x2"), 3, &b, &opts()).unwrap();
        assert!(!loose.certificate.is_certified());
    }

    #[test]
    fn small_symbols_get_majorant_certificate() {
        let b = build_basis(2).unwrap();
        let h = p("0.001*x1");
        let a = p("0.002*x2");
        let tail = |k| {
            match f_limit(1.0, &h, &a, k, &b, &opts()).unwrap().certificate {
                Certificate::Majorant { tail_bound, .. } => tail_bound,
                c => panic!("unexpected {c:?}"),
            }
        };
        assert!(tail(2) < 1e-2);
        assert!(tail(6) < tail(4) && tail(4) < tail(2));
    }
}
