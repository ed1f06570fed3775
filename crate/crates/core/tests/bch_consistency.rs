use mfld::bch::{
    bch_coefficients, classical_bch, majorant_bound, majorant_gamma, Commutator, ScaledCommutator,
};
use mfld::linalg::{c, commutator, CMat};
use mfld::poly::{m_constant, norm_upper, NormOrder};
use mfld::quantize::{quantize, Backend, Budget, Operator};
use mfld::{build_basis, Polynomial};
use proptest::prelude::*;

fn dense(p: &str, n: usize) -> CMat {
    let b = build_basis(2).unwrap();
    match quantize(&Polynomial::parse(p, 3).unwrap(), n, &b, Backend::Dense, &Budget::default()).unwrap() {
        Operator::Dense(d) => d.matrix,
        Operator::Block(_) => unreachable!(),
    }
}

#[test]
fn scaled_commutator_series_matches_nested_commutators() {
    for n in 2..=6usize {
        let a = dense("0.4*x1 + 0.2*x3^2", n);
        let b = dense("0.3*x2*x3 - 0.1*x1", n);
        let nf = n as f64;
        let br = |x: &CMat, y: &CMat| commutator(x, y) * c(nf);
        let s = bch_coefficients(&ScaledCommutator { n: nf }, &a, &b, 4);
        let z2 = br(&a, &b) * c(0.5);
        let z3 = (br(&a, &br(&a, &b)) + br(&b, &br(&b, &a))) * c(1.0 / 12.0);
        let z4 = br(&b, &br(&a, &br(&a, &b))) * c(-1.0 / 24.0);
        assert!((s.z(1) - (&a + &b)).norm() < 1e-12);
        assert!((s.z(2) - z2).norm() < 1e-11, "N={n}");
        assert!((s.z(3) - z3).norm() < 1e-11, "N={n}");
        assert!((s.z(4) - z4).norm() < 1e-11, "N={n}");
    }
}

#[test]
fn scaled_commutator_agrees_with_rescaled_plain_series() {
    let a = dense("x1 + x3^2", 4);
    let b = dense("x2", 4);
    let n = 4.0;
    let s = bch_coefficients(&ScaledCommutator { n }, &a, &b, 6);
    let plain = bch_coefficients(&Commutator, &(&a * c(n)), &(&b * c(n)), 6);
    for k in 1..=6 {
        assert!((s.z(k) - plain.z(k) * c(1.0 / n)).norm() < 1e-9);
    }
}

fn pair() -> impl Strategy<Value = (Polynomial, Polynomial)> {
    let term = (prop::collection::vec(0usize..3, 0..=2), -1.0f64..1.0);
    let poly = prop::collection::vec(term, 1..4).prop_map(|terms| {
        Polynomial::from_terms(
            3,
            terms.into_iter().map(|(vars, c)| {
                let mut e = vec![0u32; 3];
                for v in vars {
                    e[v] += 1;
                }
                (e, c)
            }),
        )
    });
    (poly.clone(), poly).prop_filter("non-zero", |(a, b)| !a.is_zero() && !b.is_zero())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn majorant_dominates_classical_coefficients((a, b) in pair(), frac in 0.1f64..0.95) {
        let basis = build_basis(2).unwrap();
        let gamma = majorant_gamma(20);
        let m = m_constant(&basis);
        let alpha = frac * gamma.delta_est / (2.0 * m);
        let a = a.scale(alpha / norm_upper(&a, NormOrder::Infinite).value);
        let b = b.scale(alpha / norm_upper(&b, NormOrder::Infinite).value);
        let series = classical_bch(&a, &b, 1.0, 10, &basis).unwrap();
        for k in 1..=10 {
            let lhs = norm_upper(series.z(k), NormOrder::Infinite).value;
            let rhs = majorant_bound(k, alpha, m, &gamma).unwrap();
            prop_assert!(lhs <= rhs * (1.0 + 1e-12), "k={} {} > {}", k, lhs, rhs);
        }
    }
}
