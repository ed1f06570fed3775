use mfld::quantize::{mean_field, op_norm, quantize, Backend, Budget};
use mfld::{build_basis, Polynomial};

const SUITE: [&str; 4] = ["x3", "x1*x2", "x3^2 - 0.5*x1", "0.5*x1*x2*x3 + x3"];

/// `sup |p|` over a 0.02-grid of the Bloch ball.
fn grid_sup(p: &Polynomial) -> f64 {
    let steps = 50;
    let mut best = 0.0f64;
    for i in -steps..=steps {
        for j in -steps..=steps {
            for k in -steps..=steps {
                let x = [i, j, k].map(|v| v as f64 / steps as f64);
                if x.iter().map(|v| v * v).sum::<f64>() <= 1.0 {
                    best = best.max(p.eval(&x).abs());
                }
            }
        }
    }
    best
}

#[test]
fn norms_converge_to_the_sup_norm() {
    let b = build_basis(2).unwrap();
    let budget = Budget::default();
    for text in SUITE {
        let p = Polynomial::parse(text, 3).unwrap();
        let norms: Vec<f64> = [8usize, 16, 32, 64, 128, 256]
            .iter()
            .map(|&n| op_norm(&quantize(&p, n, &b, Backend::Block, &budget).unwrap()))
            .collect();
        let diffs: Vec<f64> = norms.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        assert!(
            diffs.windows(2).all(|w| w[1] <= w[0] + 1e-12),
            "{text}: {norms:?}"
        );
        let sup = grid_sup(&p);
        assert!((norms[5] - sup).abs() <= 0.05, "{text}: {} vs {sup}", norms[5]);
    }
}

#[test]
fn mean_field_hamiltonian_is_asymptotically_equivalent() {
    // ‖H_N/N - Q_N(h)‖ halves when N doubles
    let b = build_basis(2).unwrap();
    let budget = Budget::default();
    for text in ["0.5*x3^2", "x1*x2 + 0.3*x3", "x1^2*x3"] {
        let h = Polynomial::parse(text, 3).unwrap();
        let dist: Vec<f64> = [16usize, 32, 64, 128]
            .iter()
            .map(|&n| {
                let q = quantize(&h, n, &b, Backend::Block, &budget).unwrap();
                let m = mean_field(&h, n, &b, Backend::Block, &budget).unwrap();
                op_norm(&q.zip_with(&m, |x, y| x - y).unwrap())
            })
            .collect();
        for w in dist.windows(2) {
            let r = w[1] / w[0];
            assert!((0.4..=0.6).contains(&r), "{text}: {dist:?}");
        }
    }
}
